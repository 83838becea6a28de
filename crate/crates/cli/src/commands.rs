//! Command implementations. Each returns a verdict string plus the
//! command-specific payload; `main` wraps them in the common envelope.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use orbex_core::exclusion::{
    check_sufficient_condition, construct_povm, construct_povm_hw_shift, decide,
    solve_polygon_phases, verify_povm, BlockSpectrum, ExclusionCertificate, ExclusionInstance,
    Mode, Povm, SpectrumTerm, COMPLETENESS_TOL, ERROR_RESIDUAL_TOL,
};
use orbex_core::linalg::c;
use orbex_core::oracle::{
    solve_exclusion_sdp, EnsembleInstance, OracleConfig, ZERO_BAND_HIGH, ZERO_BAND_LOW,
};
use orbex_core::pbr::{minimal_n, pbr_condition, pbr_condition_value, MinimalCopies};
use orbex_core::zero_error::{
    build_graph, capacity_lower_bound, complement_povm, CONFUSABILITY_THRESHOLD, DUALITY_GAP_TOL,
};

use crate::errors::CliError;
use crate::report::Json;
use crate::scenario::{ScenarioFile, ScenarioOptions};

/// Gates applied when the CLI classifies numerical results. The profile
/// picks the baseline; scenario options may override individual entries.
#[derive(Debug, Clone)]
pub struct Tolerances {
    pub profile: &'static str,
    pub completeness: f64,
    pub error_residual: f64,
    pub effect_floor: f64,
    pub hermiticity: f64,
    pub domination: f64,
    pub confusability_threshold: f64,
    pub duality_gap: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum ToleranceProfile {
    Default,
    Strict,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum MeasurementChoice {
    /// The covariant construction produced by `construct`.
    Constructed,
    /// The uniform complement of each orbit projector; complete exactly
    /// when the orbit resolves the identity.
    Complement,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum AngleUnit {
    Rad,
    Deg,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum DemoName {
    /// Block-level boundary instance with three equal weights.
    #[value(name = "example1-a")]
    Example1A,
    /// The same blocks with amplitudes failing the weight condition,
    /// excluded via commuting shift designations.
    #[value(name = "example1-b")]
    Example1B,
    /// Minimal copy counts across a sweep of preparation angles.
    #[value(name = "pbr-sweep")]
    PbrSweep,
}

impl Tolerances {
    pub fn from_profile(profile: ToleranceProfile) -> Self {
        match profile {
            ToleranceProfile::Default => Tolerances {
                profile: "default",
                completeness: COMPLETENESS_TOL,
                error_residual: ERROR_RESIDUAL_TOL,
                effect_floor: -1e-10,
                hermiticity: 1e-12,
                domination: 1e-9,
                confusability_threshold: CONFUSABILITY_THRESHOLD,
                duality_gap: DUALITY_GAP_TOL,
            },
            ToleranceProfile::Strict => Tolerances {
                profile: "strict",
                completeness: 1e-12,
                error_residual: 1e-12,
                effect_floor: -1e-12,
                hermiticity: 1e-13,
                domination: 1e-11,
                confusability_threshold: CONFUSABILITY_THRESHOLD,
                duality_gap: 1e-10,
            },
        }
    }

    pub fn apply_overrides(&mut self, options: &ScenarioOptions) {
        if let Some(v) = options.confusability_threshold {
            self.confusability_threshold = v;
        }
        if let Some(v) = options.completeness_tol {
            self.completeness = v;
        }
        if let Some(v) = options.error_residual_tol {
            self.error_residual = v;
        }
    }

    pub fn to_json(&self) -> Json {
        Json::Obj(vec![
            ("completeness", Json::Float(self.completeness)),
            ("error_residual", Json::Float(self.error_residual)),
            ("effect_floor", Json::Float(self.effect_floor)),
            ("hermiticity", Json::Float(self.hermiticity)),
            ("domination", Json::Float(self.domination)),
            ("confusability_threshold", Json::Float(self.confusability_threshold)),
            ("duality_gap", Json::Float(self.duality_gap)),
        ])
    }
}

pub struct CommandOutput {
    pub verdict: String,
    pub result: Json,
}

fn mode_str(mode: Mode) -> &'static str {
    match mode {
        Mode::Explicit => "explicit",
        Mode::BlockLevel => "block_level",
    }
}

/// The instance-level preamble shared by several commands.
fn instance_header(instance: &ExclusionInstance) -> Vec<(&'static str, Json)> {
    vec![
        ("mode", Json::str(mode_str(instance.mode()))),
        ("dim", Json::int(instance.dim())),
        ("group_order", Json::opt_int(instance.group().map(|g| g.order()))),
    ]
}

fn condition_json(instance: &ExclusionInstance) -> Json {
    let check = check_sufficient_condition(instance.spectrum());
    let weights = instance.spectrum().weights();
    let max_length = weights.iter().cloned().fold(0.0_f64, f64::max);
    let total_length: f64 = weights.iter().sum();
    Json::Obj(vec![
        ("holds", Json::Bool(check.holds)),
        ("gap", Json::Float(check.gap)),
        ("max_length", Json::Float(max_length)),
        ("total_length", Json::Float(total_length)),
    ])
}

/// Builds the measurement the scenario asks for: the shift construction
/// when designations are present, the canonical one otherwise.
fn realize(
    instance: &ExclusionInstance,
    shifts: Option<&BTreeMap<String, (usize, usize)>>,
) -> Result<(Povm, &'static str), CliError> {
    match shifts {
        Some(map) if !map.is_empty() => Ok((construct_povm_hw_shift(instance, map)?, "shift")),
        _ => Ok((construct_povm(instance)?, "canonical")),
    }
}

pub fn check_output(
    instance: &ExclusionInstance,
    shifts: Option<&BTreeMap<String, (usize, usize)>>,
) -> Result<CommandOutput, CliError> {
    let mut fields = instance_header(instance);
    fields.push(("condition", condition_json(instance)));
    let certificate = decide(instance, shifts)?;
    let verdict = match certificate {
        ExclusionCertificate::Excludable { povm, max_error_residual } => {
            fields.push(("outcomes", Json::int(povm.outcomes.len())));
            fields.push(("completeness_defect", Json::Float(povm.completeness_defect)));
            fields.push(("min_effect_eigenvalue", Json::Float(povm.min_effect_eigenvalue)));
            fields.push(("max_error_residual", Json::Float(max_error_residual)));
            "excludable"
        }
        ExclusionCertificate::NotExcludable { dual, optimal_error } => {
            fields.push(("weight_gap", Json::Float(dual.gap)));
            fields.push(("optimal_error", Json::Float(optimal_error)));
            fields.push(("dual_trace", Json::Float(dual.matrix.trace().re)));
            "not_excludable"
        }
        ExclusionCertificate::Undecided { reason } => {
            fields.push(("reason", Json::str(reason)));
            "undecided"
        }
    };
    Ok(CommandOutput { verdict: verdict.to_string(), result: Json::Obj(fields) })
}

pub fn construct_output(
    instance: &ExclusionInstance,
    shifts: Option<&BTreeMap<String, (usize, usize)>>,
) -> Result<CommandOutput, CliError> {
    let (povm, method) = realize(instance, shifts)?;
    let terms = instance.spectrum().terms();
    let weights = instance.spectrum().weights();
    let angles = if method == "canonical" {
        solve_polygon_phases(&weights)?
    } else {
        vec![0.0; weights.len()]
    };
    let table: Vec<Json> = terms
        .iter()
        .zip(weights.iter().zip(angles.iter()))
        .map(|(term, (length, angle))| {
            Json::Obj(vec![
                ("label", Json::str(term.label.clone())),
                ("irrep_dim", Json::int(term.irrep_dim)),
                ("multiplicity", Json::int(term.multiplicity)),
                ("amplitude", Json::complex(term.amplitude.re, term.amplitude.im)),
                ("length", Json::Float(*length)),
                ("angle", Json::Float(*angle)),
            ])
        })
        .collect();
    let shifted: Vec<Json> = shifts
        .map(|map| {
            map.iter()
                .map(|(label, (z, x))| {
                    Json::Obj(vec![
                        ("label", Json::str(label.clone())),
                        ("z", Json::int(*z)),
                        ("x", Json::int(*x)),
                    ])
                })
                .collect()
        })
        .unwrap_or_default();
    let mut fields = instance_header(instance);
    fields.push(("construction", Json::str(method)));
    fields.push(("outcomes", Json::int(povm.outcomes.len())));
    fields.push(("completeness_defect", Json::Float(povm.completeness_defect)));
    fields.push(("min_effect_eigenvalue", Json::Float(povm.min_effect_eigenvalue)));
    fields.push(("table", Json::Arr(table)));
    fields.push(("shifted_blocks", Json::Arr(shifted)));
    Ok(CommandOutput { verdict: "constructed".to_string(), result: Json::Obj(fields) })
}

pub fn verify_output(
    instance: &ExclusionInstance,
    shifts: Option<&BTreeMap<String, (usize, usize)>>,
    tol: &Tolerances,
) -> Result<CommandOutput, CliError> {
    let (povm, method) = realize(instance, shifts)?;
    let report = verify_povm(instance, &povm)?;
    let completeness_ok = report.completeness_defect <= tol.completeness;
    let residual_ok = report.max_outcome_error <= tol.error_residual;
    let effects_ok = report.min_effect_eigenvalue >= tol.effect_floor;
    let block_ok = report.block_constraint_defect.map_or(true, |d| d <= tol.completeness);
    let (lemma_json, lemma_hermiticity_ok, lemma_domination_ok) = match &report.lemma_flags {
        Some(flags) => (
            Json::Obj(vec![
                ("hermiticity_defect", Json::Float(flags.hermiticity_defect)),
                ("max_domination_gap", Json::Float(flags.max_domination_gap)),
                ("satisfied", Json::Bool(flags.satisfied)),
            ]),
            flags.hermiticity_defect <= tol.hermiticity,
            flags.max_domination_gap <= tol.domination,
        ),
        None => (Json::Null, true, true),
    };
    let passed =
        completeness_ok && residual_ok && effects_ok && block_ok && lemma_hermiticity_ok && lemma_domination_ok;
    let outcome_errors: Vec<Json> = report
        .outcome_errors
        .iter()
        .map(|(label, error)| {
            Json::Obj(vec![("label", Json::str(label.clone())), ("error", Json::Float(*error))])
        })
        .collect();
    let mut fields = instance_header(instance);
    fields.push(("construction", Json::str(method)));
    fields.push(("max_outcome_error", Json::Float(report.max_outcome_error)));
    fields.push(("completeness_defect", Json::Float(report.completeness_defect)));
    fields.push(("min_effect_eigenvalue", Json::Float(report.min_effect_eigenvalue)));
    fields.push(("block_constraint_defect", Json::opt_float(report.block_constraint_defect)));
    fields.push(("lemma", lemma_json));
    fields.push(("outcome_errors", Json::Arr(outcome_errors)));
    fields.push((
        "gates",
        Json::Obj(vec![
            ("completeness", Json::Bool(completeness_ok)),
            ("error_residual", Json::Bool(residual_ok)),
            ("effect_floor", Json::Bool(effects_ok)),
            ("block_constraint", Json::Bool(block_ok)),
            ("lemma_hermiticity", Json::Bool(lemma_hermiticity_ok)),
            ("lemma_domination", Json::Bool(lemma_domination_ok)),
        ]),
    ));
    fields.push(("passed", Json::Bool(passed)));
    let verdict = if passed { "verified" } else { "rejected" };
    Ok(CommandOutput { verdict: verdict.to_string(), result: Json::Obj(fields) })
}

pub fn pbr_output(theta: f64, unit: AngleUnit, copies: Option<usize>) -> Result<CommandOutput, CliError> {
    let theta_rad = match unit {
        AngleUnit::Rad => theta,
        AngleUnit::Deg => theta.to_radians(),
    };
    let minimal = minimal_n(theta_rad)?;
    let minimal_copies = match minimal {
        MinimalCopies::Copies(m) => Some(m),
        MinimalCopies::Unbounded => None,
    };
    let evaluated = copies.or(minimal_copies);
    let (condition_value, excludable) = match evaluated {
        Some(n) => (
            Some(pbr_condition_value(theta_rad, n)?),
            Some(pbr_condition(theta_rad, n)?),
        ),
        None => (None, None),
    };
    let verdict = match excludable {
        Some(true) => "excludable",
        Some(false) => "not_excludable",
        None => "unbounded",
    };
    let result = Json::Obj(vec![
        ("theta_rad", Json::Float(theta_rad)),
        ("theta_deg", Json::Float(theta_rad.to_degrees())),
        ("n", Json::opt_int(evaluated)),
        ("condition_value", Json::opt_float(condition_value)),
        ("threshold", Json::Float(2.0)),
        ("minimal_n", Json::opt_int(minimal_copies)),
        ("unbounded", Json::Bool(minimal_copies.is_none())),
    ]);
    Ok(CommandOutput { verdict: verdict.to_string(), result })
}

pub fn capacity_output(
    instance: &ExclusionInstance,
    shifts: Option<&BTreeMap<String, (usize, usize)>>,
    measurement: MeasurementChoice,
    graph_csv: Option<&Path>,
    tol: &Tolerances,
) -> Result<CommandOutput, CliError> {
    let (povm, method) = match measurement {
        MeasurementChoice::Constructed => realize(instance, shifts)?,
        MeasurementChoice::Complement => (complement_povm(instance)?, "complement"),
    };
    let graph = build_graph(instance, &povm, tol.confusability_threshold)?;
    let bound = capacity_lower_bound(&graph)?;
    if let Some(path) = graph_csv {
        std::fs::write(path, graph.to_csv())
            .map_err(|source| CliError::WriteFile { path: path.to_path_buf(), source })?;
    }
    let weights: Vec<Json> = graph
        .labels
        .iter()
        .zip(bound.solution.weights.iter())
        .map(|(label, weight)| {
            Json::Obj(vec![("label", Json::str(label.clone())), ("weight", Json::Float(*weight))])
        })
        .collect();
    let capped: Vec<Json> = bound.solution.capped_inputs.iter().map(|l| Json::str(l.clone())).collect();
    let mut fields = instance_header(instance);
    fields.push(("measurement", Json::str(method)));
    fields.push(("threshold", Json::Float(tol.confusability_threshold)));
    fields.push(("alpha_star", Json::Float(bound.packing_value)));
    fields.push(("bound_bits", Json::Float(bound.floor_bits)));
    fields.push(("achieved_bits", Json::Float(bound.bits)));
    fields.push(("duality_gap", Json::Float(bound.solution.duality_gap)));
    fields.push(("capped_inputs", Json::Arr(capped)));
    fields.push(("weights", Json::Arr(weights)));
    fields.push((
        "graph_csv",
        match graph_csv {
            Some(p) => Json::str(p.display().to_string()),
            None => Json::Null,
        },
    ));
    Ok(CommandOutput { verdict: "bounded".to_string(), result: Json::Obj(fields) })
}

pub fn oracle_output(instance: &ExclusionInstance) -> Result<CommandOutput, CliError> {
    let ensemble = EnsembleInstance::from_instance(instance)?;
    let config = OracleConfig::default();
    let outcome = solve_exclusion_sdp(&ensemble, &config)?;
    let (lo, hi) = outcome.band;
    let verdict = if hi <= ZERO_BAND_HIGH {
        "excludable"
    } else if lo >= ZERO_BAND_LOW {
        "not_excludable"
    } else {
        "inconclusive"
    };
    let result = Json::Obj(vec![
        ("states", Json::int(ensemble.len())),
        ("dim", Json::int(ensemble.dim())),
        ("alpha", Json::Float(outcome.alpha)),
        ("band", Json::Arr(vec![Json::Float(lo), Json::Float(hi)])),
        ("witness_error", Json::Float(outcome.witness_error)),
        ("witness_completeness_defect", Json::Float(outcome.witness_completeness_defect)),
        ("witness_min_eigenvalue", Json::Float(outcome.witness_min_eigenvalue)),
        ("iterations", Json::int(outcome.iterations)),
        ("converged", Json::Bool(outcome.converged)),
    ]);
    Ok(CommandOutput { verdict: verdict.to_string(), result })
}

/// The built-in block instance with irrep dimensions (10, 8, 1).
fn demo_block_instance(amplitudes: [f64; 3]) -> Result<ExclusionInstance, CliError> {
    let dims = [10usize, 8, 1];
    let terms: Vec<SpectrumTerm> = dims
        .iter()
        .zip(amplitudes.iter())
        .enumerate()
        .map(|(k, (&d, &a))| SpectrumTerm {
            label: format!("mu{k}"),
            irrep_dim: d,
            multiplicity: d,
            amplitude: c(a, 0.0),
        })
        .collect();
    Ok(ExclusionInstance::block_level(BlockSpectrum::new(terms)?)?)
}

pub fn demo_output(name: DemoName, tol: &Tolerances) -> Result<CommandOutput, CliError> {
    match name {
        DemoName::Example1A => {
            let s = 1641f64.sqrt();
            let instance = demo_block_instance([4.0 / s, 5.0 / s, 40.0 / s])?;
            let check = check_output(&instance, None)?;
            let construct = construct_output(&instance, None)?;
            let verify = verify_output(&instance, None, tol)?;
            let verdict = check.verdict.clone();
            let result = Json::Obj(vec![
                (
                    "description",
                    Json::str(
                        "block-level instance with irrep dimensions (10, 8, 1) and equal \
                         weights: the closable boundary case of the weight condition",
                    ),
                ),
                ("check", Json::Obj(vec![("verdict", Json::str(check.verdict)), ("result", check.result)])),
                ("construct", construct.result),
                (
                    "verify",
                    Json::Obj(vec![("verdict", Json::str(verify.verdict)), ("result", verify.result)]),
                ),
            ]);
            Ok(CommandOutput { verdict, result })
        }
        DemoName::Example1B => {
            let r = 1.0 / 2f64.sqrt();
            let instance = demo_block_instance([r, r, 0.0])?;
            let mut shifts = BTreeMap::new();
            shifts.insert("mu0".to_string(), (1usize, 1usize));
            shifts.insert("mu1".to_string(), (1usize, 1usize));
            let check = check_output(&instance, Some(&shifts))?;
            let construct = construct_output(&instance, Some(&shifts))?;
            let verify = verify_output(&instance, Some(&shifts), tol)?;
            let verdict = check.verdict.clone();
            let result = Json::Obj(vec![
                (
                    "description",
                    Json::str(
                        "the same blocks with amplitudes (1, 1, 0)/sqrt(2): one weight \
                         dominates, so closure fails and commuting shift designations on \
                         the two populated blocks provide the orthogonal reference vectors",
                    ),
                ),
                ("check", Json::Obj(vec![("verdict", Json::str(check.verdict)), ("result", check.result)])),
                ("construct", construct.result),
                (
                    "verify",
                    Json::Obj(vec![("verdict", Json::str(verify.verdict)), ("result", verify.result)]),
                ),
            ]);
            Ok(CommandOutput { verdict, result })
        }
        DemoName::PbrSweep => {
            let mut rows = Vec::new();
            let mut previous: Option<usize> = None;
            let mut monotone = true;
            for deg in (10..=90).step_by(10) {
                let theta = (deg as f64).to_radians();
                let minimal = match minimal_n(theta)? {
                    MinimalCopies::Copies(m) => Some(m),
                    MinimalCopies::Unbounded => None,
                };
                if let (Some(prev), Some(cur)) = (previous, minimal) {
                    if cur > prev {
                        monotone = false;
                    }
                }
                previous = minimal.or(previous);
                rows.push(Json::Obj(vec![
                    ("theta_deg", Json::int(deg)),
                    ("minimal_n", Json::opt_int(minimal)),
                ]));
            }
            let result = Json::Obj(vec![
                (
                    "description",
                    Json::str(
                        "minimal number of copies needed for excludability as the \
                         preparation angle grows; larger angles need fewer copies",
                    ),
                ),
                ("rows", Json::Arr(rows)),
                ("monotone_nonincreasing", Json::Bool(monotone)),
            ]);
            Ok(CommandOutput { verdict: "computed".to_string(), result })
        }
    }
}

/// Everything `main` needs to run a scenario-based command.
pub fn load_instance(scenario: &ScenarioFile) -> Result<ExclusionInstance, CliError> {
    Ok(scenario.instance.to_instance()?)
}

pub fn graph_csv_path(path: Option<&PathBuf>) -> Option<&Path> {
    path.map(|p| p.as_path())
}
