//! Conclusive single-state exclusion for group-orbit ensembles.
//!
//! An instance is a seed state together with a group action, reduced to a
//! block spectrum: one term per isotypical block carrying the block label,
//! the irrep dimension `d`, the multiplicity `m`, and the complex seed
//! amplitude `a`. Two realizations exist:
//!
//! * explicit mode — a finite Abelian group acting through characters on an
//!   orthonormal joint eigenbasis (`d = m = 1` per term);
//! * block-level mode — only the block data, with states and effects living
//!   in `⊕_mu H_mu ⊗ C^{d_mu}` coordinates (`m = d` per term). This covers
//!   actions of continuous or non-Abelian groups whose isotypical structure
//!   is declared rather than computed.
//!
//! The decision pipeline: the weight condition on `d_mu |a_mu|` (can the
//! weights close a polygon?), the phase solver, the covariant POVM built
//! from a single seed effect, and for Abelian instances the exact
//! dichotomy: either the polygon closes and a zero-error POVM exists, or
//! the gap `t > 0` yields a dual certificate proving the optimal error
//! equals `t^2`.

use crate::groups::FiniteGroup;
use crate::isotypical::decompose_abelian;
use crate::groups::UnitaryRep;
use crate::linalg::{c, hermitian_eigenvalues, inner, outer, partial_trace_left, vectorize, CMatrix, LinalgError, HERMITICITY_TOL};
use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

/// Tolerance on `sum |a|^2 - 1` for spectrum normalization.
pub const SPECTRUM_NORM_TOL: f64 = 1e-10;
/// Relative slack for classifying boundary cases of the weight condition:
/// a gap within this fraction of the total weight counts as closable. This
/// keeps mathematically exact equalities (which float rounding perturbs by
/// ~1e-16) on the excludable side.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Contractual bound on the polygon closure residual, relative to the
/// total length.
pub const POLYGON_CLOSURE_TOL: f64 = 1e-10;
/// Frobenius-norm bound on `sum_g M_g - I` for constructed POVMs.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Bound on the computed block overlap `tr[V'^dagger V]` for shifted
/// reference vectors.
pub const SHIFT_ORTHOGONALITY_TOL: f64 = 1e-10;
/// Zero-error residual bound for accepting a constructed measurement.
pub const ERROR_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ExclusionError {
    #[error("spectrum has no terms")]
    EmptySpectrum,
    #[error("spectrum norm is {sum} (must be 1 within {SPECTRUM_NORM_TOL:.0e})")]
    SpectrumNotNormalized { sum: f64 },
    #[error("duplicate spectrum label {label}")]
    DuplicateLabel { label: String },
    #[error("term {label} has multiplicity {m}, block-level terms need m = d = {d}")]
    MultiplicityMismatch { label: String, d: usize, m: usize },
    #[error("block {label} of the decomposition has multiplicity {multiplicity}; explicit instances need a multiplicity-free representation")]
    UnsupportedMultiplicity { label: String, multiplicity: usize },
    #[error("spectrum does not match the decomposition: {detail}")]
    SpectrumBlockMismatch { detail: String },
    #[error("seed vector has norm {norm} (must be 1 within {SPECTRUM_NORM_TOL:.0e})")]
    SeedNotNormalized { norm: f64 },
    #[error("largest weight {max:.6e} exceeds the sum of the others {rest:.6e}: phase polygon cannot close")]
    PolygonInfeasible { max: f64, rest: f64 },
    #[error("shift on block {label} is not orthogonality-breaking: |tr[V'^dagger V]| = {overlap:.3e}")]
    ShiftNotOrthogonal { label: String, overlap: f64 },
    #[error("shift names unknown block {label}")]
    UnknownShiftBlock { label: String },
    #[error("shift on block {label} needs irrep dimension > 1")]
    ShiftNeedsBlockDim { label: String },
    #[error("operation needs an explicit finite-group realization, instance is block-level")]
    NotAbelian,
    #[error("dual certificate needs a positive gap, got {gap:.6e}")]
    GapNotPositive { gap: f64 },
    #[error("POVM outcome labels do not match the instance: expected {expected}, got {got}")]
    LabelMismatch { expected: String, got: String },
    #[error("constructed POVM has completeness defect {defect:.3e}")]
    CompletenessDefect { defect: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One isotypical block of the seed: label, irrep dimension, multiplicity,
/// and the complex amplitude the seed puts on the block.
#[derive(Debug, Clone)]
pub struct SpectrumTerm {
    pub label: String,
    pub irrep_dim: usize,
    pub multiplicity: usize,
    pub amplitude: Complex64,
}

/// The block spectrum of a seed state. Terms enumerate all blocks of the
/// decomposition, zero amplitudes included (they still constrain the
/// measurement), and `sum |a|^2 = 1`.
#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    terms: Vec<SpectrumTerm>,
}

impl BlockSpectrum {
    pub fn new(terms: Vec<SpectrumTerm>) -> Result<Self, ExclusionError> {
        if terms.is_empty() {
            return Err(ExclusionError::EmptySpectrum);
        }
        for (i, t) in terms.iter().enumerate() {
            assert!(t.irrep_dim >= 1 && t.multiplicity >= 1, "block dimensions must be positive");
            if terms[..i].iter().any(|u| u.label == t.label) {
                return Err(ExclusionError::DuplicateLabel { label: t.label.clone() });
            }
        }
        let sum: f64 = terms.iter().map(|t| t.amplitude.norm_sqr()).sum();
        if (sum - 1.0).abs() > SPECTRUM_NORM_TOL {
            return Err(ExclusionError::SpectrumNotNormalized { sum });
        }
        Ok(BlockSpectrum { terms })
    }

    pub fn terms(&self) -> &[SpectrumTerm] {
        &self.terms
    }

    /// The weights `d_mu |a_mu|` in term order.
    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.irrep_dim as f64 * t.amplitude.norm()).collect()
    }
}

/// Outcome of the weight condition: `gap` is the dominant weight minus the
/// sum of all others (non-positive means the phase polygon closes).
#[derive(Debug, Clone, Copy)]
pub struct ConditionCheck {
    pub holds: bool,
    pub gap: f64,
}

/// Sufficient condition for exclusion: the largest weight `d_mu |a_mu|`
/// must not exceed the sum of the remaining ones. Equality (within
/// [`BOUNDARY_TOL`] of the total weight) counts as holding.
pub fn check_sufficient_condition(spectrum: &BlockSpectrum) -> ConditionCheck {
    let weights = spectrum.weights();
    let total: f64 = weights.iter().sum();
    let max = weights.iter().cloned().fold(0.0, f64::max);
    let gap = max - (total - max);
    ConditionCheck { holds: gap <= BOUNDARY_TOL * total, gap }
}

/// Phases closing the polygon `sum_mu L_mu e^{i phi_mu} = 0`.
///
/// Zero lengths get phase 0 and are otherwise ignored. Two nonzero lengths
/// must be equal and go antipodal. Three or more are partitioned greedily
/// (longest first, into the currently lightest of three bins); the
/// precondition `max <= sum of rest` guarantees the three bin sums satisfy
/// the triangle inequality, and the closing triangle comes from the law of
/// cosines. The residual `|sum L e^{i phi}|` stays below
/// [`POLYGON_CLOSURE_TOL`] times the total length.
pub fn solve_polygon_phases(lengths: &[f64]) -> Result<Vec<f64>, ExclusionError> {
    assert!(lengths.iter().all(|&l| l.is_finite() && l >= 0.0), "lengths must be non-negative");
    let total: f64 = lengths.iter().sum();
    if total == 0.0 {
        return Ok(vec![0.0; lengths.len()]);
    }
    let max = lengths.iter().cloned().fold(0.0, f64::max);
    let rest = total - max;
    if max > rest + BOUNDARY_TOL * total {
        return Err(ExclusionError::PolygonInfeasible { max, rest });
    }

    let mut nonzero: Vec<usize> = (0..lengths.len()).filter(|&i| lengths[i] > 0.0).collect();
    let mut phases = vec![0.0f64; lengths.len()];
    match nonzero.len() {
        0 => unreachable!("total is positive"),
        1 => unreachable!("a single positive length fails the precondition"),
        2 => {
            // Antipodal pair; the precondition already forced equality.
            phases[nonzero[1]] = std::f64::consts::PI;
        }
        _ => {
            nonzero.sort_by(|&i, &j| lengths[j].total_cmp(&lengths[i]).then(i.cmp(&j)));
            let mut bins: [(f64, Vec<usize>); 3] = [(0.0, Vec::new()), (0.0, Vec::new()), (0.0, Vec::new())];
            for &i in &nonzero {
                let lightest = (0..3).min_by(|&a, &b| bins[a].0.total_cmp(&bins[b].0)).unwrap();
                bins[lightest].0 += lengths[i];
                bins[lightest].1.push(i);
            }
            bins.sort_by(|a, b| b.0.total_cmp(&a.0));
            let (b1, b2, b3) = (bins[0].0, bins[1].0, bins[2].0);
            // b1 at angle 0, b2 at phi with the law of cosines closing onto
            // b3, b3 opposite their sum. Clamping absorbs boundary rounding.
            let cos_phi = ((b3 * b3 - b1 * b1 - b2 * b2) / (2.0 * b1 * b2)).clamp(-1.0, 1.0);
            let phi = cos_phi.acos();
            let closing = Complex64::new(b1 + b2 * phi.cos(), b2 * phi.sin());
            let mut phi3 = (-closing).arg();
            if phi3 < 0.0 {
                phi3 += 2.0 * std::f64::consts::PI;
            }
            for &i in &bins[0].1 {
                phases[i] = 0.0;
            }
            for &i in &bins[1].1 {
                phases[i] = phi;
            }
            for &i in &bins[2].1 {
                phases[i] = phi3;
            }
        }
    }
    Ok(phases)
}

/// Entrywise unitary `W_{z,x} = sum_k omega^{z k} |k + x mod d><k|` with
/// `omega = exp(2 pi i / d)`. Traceless unless `z = x = 0`.
pub fn heisenberg_weyl(d: usize, z: usize, x: usize) -> CMatrix {
    assert!(d >= 1 && z < d && x < d, "shift indices must lie in 0..d");
    let mut w = CMatrix::zeros(d, d);
    for k in 0..d {
        let angle = 2.0 * std::f64::consts::PI * (z * k) as f64 / d as f64;
        w[((k + x) % d, k)] = c(angle.cos(), angle.sin());
    }
    w
}

/// How an instance realizes its states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Finite Abelian group acting through characters on a joint eigenbasis.
    Explicit,
    /// Declared block data in `⊕ H_mu ⊗ C^{d_mu}` coordinates.
    BlockLevel,
}

#[derive(Debug, Clone)]
enum Realization {
    JointEigenbasis {
        group: FiniteGroup,
        /// `characters[mu][g]`: scalar action of element g on basis column mu.
        characters: Vec<Vec<Complex64>>,
        /// Orthonormal columns `v_mu`, one per spectrum term.
        basis: CMatrix,
    },
    BlockLevel,
}

/// A seed state under a group action, reduced to its block spectrum.
#[derive(Debug, Clone)]
pub struct ExclusionInstance {
    spectrum: BlockSpectrum,
    realization: Realization,
}

impl ExclusionInstance {
    /// Block-level instance: every term must have `m = d`.
    pub fn block_level(spectrum: BlockSpectrum) -> Result<Self, ExclusionError> {
        for t in spectrum.terms() {
            if t.multiplicity != t.irrep_dim {
                return Err(ExclusionError::MultiplicityMismatch {
                    label: t.label.clone(),
                    d: t.irrep_dim,
                    m: t.multiplicity,
                });
            }
        }
        Ok(ExclusionInstance { spectrum, realization: Realization::BlockLevel })
    }

    /// Explicit instance from a representation and a spectrum whose labels
    /// match the Abelian decomposition of the representation (which must be
    /// multiplicity-free).
    pub fn from_spectrum(rep: &UnitaryRep, spectrum: BlockSpectrum) -> Result<Self, ExclusionError> {
        let (labels, characters, basis) = eigenbasis_of(rep)?;
        if spectrum.terms().len() != labels.len() {
            return Err(ExclusionError::SpectrumBlockMismatch {
                detail: format!("{} terms for {} decomposition blocks", spectrum.terms().len(), labels.len()),
            });
        }
        // Reorder the decomposition data into spectrum term order.
        let mut chars_ordered = Vec::new();
        let mut basis_cols = Vec::new();
        for t in spectrum.terms() {
            let pos = labels.iter().position(|l| *l == t.label).ok_or_else(|| {
                ExclusionError::SpectrumBlockMismatch { detail: format!("no decomposition block labeled {}", t.label) }
            })?;
            if t.irrep_dim != 1 || t.multiplicity != 1 {
                return Err(ExclusionError::SpectrumBlockMismatch {
                    detail: format!("term {} must have d = m = 1 in explicit mode", t.label),
                });
            }
            chars_ordered.push(characters[pos].clone());
            basis_cols.push(pos);
        }
        let dim = basis.rows();
        let basis = CMatrix::from_fn(dim, basis_cols.len(), |i, j| basis[(i, basis_cols[j])]);
        Ok(ExclusionInstance {
            spectrum,
            realization: Realization::JointEigenbasis { group: rep.group().clone(), characters: chars_ordered, basis },
        })
    }

    /// Explicit instance from a unit seed vector: amplitudes are the seed's
    /// components in the joint eigenbasis, all blocks retained.
    pub fn from_seed_vector(rep: &UnitaryRep, seed: &CMatrix) -> Result<Self, ExclusionError> {
        assert!(seed.cols() == 1 && seed.rows() == rep.dim(), "seed must be a column of the rep dimension");
        let norm = seed.frobenius_norm();
        if (norm - 1.0).abs() > SPECTRUM_NORM_TOL {
            return Err(ExclusionError::SeedNotNormalized { norm });
        }
        let (labels, characters, basis) = eigenbasis_of(rep)?;
        let terms: Vec<SpectrumTerm> = labels
            .iter()
            .enumerate()
            .map(|(j, label)| {
                let col = CMatrix::from_fn(rep.dim(), 1, |i, _| basis[(i, j)]);
                SpectrumTerm { label: label.clone(), irrep_dim: 1, multiplicity: 1, amplitude: inner(&col, seed) }
            })
            .collect();
        let spectrum = BlockSpectrum::new(terms)?;
        Ok(ExclusionInstance {
            spectrum,
            realization: Realization::JointEigenbasis { group: rep.group().clone(), characters, basis },
        })
    }

    /// Explicit instance from raw joint-eigenbasis data. `basis` columns
    /// must be orthonormal, one per spectrum term; `characters[mu][g]` is
    /// the unimodular scalar action. Used by constructions (diagonal
    /// actions) whose eigenbasis is known exactly.
    pub(crate) fn from_parts(
        group: FiniteGroup,
        spectrum: BlockSpectrum,
        characters: Vec<Vec<Complex64>>,
        basis: CMatrix,
    ) -> Self {
        assert!(group.is_abelian(), "explicit instances need Abelian groups");
        assert_eq!(characters.len(), spectrum.terms().len());
        assert_eq!(basis.cols(), spectrum.terms().len());
        ExclusionInstance { spectrum, realization: Realization::JointEigenbasis { group, characters, basis } }
    }

    pub fn spectrum(&self) -> &BlockSpectrum {
        &self.spectrum
    }

    pub fn mode(&self) -> Mode {
        match self.realization {
            Realization::JointEigenbasis { .. } => Mode::Explicit,
            Realization::BlockLevel => Mode::BlockLevel,
        }
    }

    pub fn group(&self) -> Option<&FiniteGroup> {
        match &self.realization {
            Realization::JointEigenbasis { group, .. } => Some(group),
            Realization::BlockLevel => None,
        }
    }

    /// Carrier dimension: the rep dimension in explicit mode, `sum d_mu^2`
    /// in block-level coordinates.
    pub fn dim(&self) -> usize {
        match &self.realization {
            Realization::JointEigenbasis { basis, .. } => basis.rows(),
            Realization::BlockLevel => self.spectrum.terms().iter().map(|t| t.irrep_dim * t.irrep_dim).sum(),
        }
    }

    /// Offset of each block in block-level coordinates.
    fn block_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.spectrum.terms().len());
        let mut off = 0;
        for t in self.spectrum.terms() {
            offsets.push(off);
            off += t.irrep_dim * t.irrep_dim;
        }
        offsets
    }

    /// The seed state as a concrete column vector. In block-level mode this
    /// is `⊕ (a_mu / sqrt(d_mu)) vec(I_{d_mu})`.
    pub fn seed_vector(&self) -> CMatrix {
        match &self.realization {
            Realization::JointEigenbasis { basis, .. } => {
                let mut v = CMatrix::zeros(basis.rows(), 1);
                for (j, t) in self.spectrum.terms().iter().enumerate() {
                    for i in 0..basis.rows() {
                        v[(i, 0)] += basis[(i, j)] * t.amplitude;
                    }
                }
                v
            }
            Realization::BlockLevel => {
                let mut v = CMatrix::zeros(self.dim(), 1);
                for (t, off) in self.spectrum.terms().iter().zip(self.block_offsets()) {
                    let d = t.irrep_dim;
                    let coeff = t.amplitude.scale(1.0 / (d as f64).sqrt());
                    for i in 0..d {
                        v[(off + i * d + i, 0)] = coeff;
                    }
                }
                v
            }
        }
    }

    /// Orbit state `U_g |psi>` (explicit mode only).
    pub fn orbit_state(&self, g: usize) -> Result<CMatrix, ExclusionError> {
        match &self.realization {
            Realization::JointEigenbasis { characters, basis, .. } => {
                let mut v = CMatrix::zeros(basis.rows(), 1);
                for (j, t) in self.spectrum.terms().iter().enumerate() {
                    let coeff = t.amplitude * characters[j][g];
                    for i in 0..basis.rows() {
                        v[(i, 0)] += basis[(i, j)] * coeff;
                    }
                }
                Ok(v)
            }
            Realization::BlockLevel => Err(ExclusionError::NotAbelian),
        }
    }

    /// Applies the group action to any vector expanded in the term basis
    /// (explicit mode): `U_g` multiplies coefficient `mu` by `chi_mu(g)`.
    fn act_on_coefficients(&self, coeffs: &[Complex64], g: usize) -> Vec<Complex64> {
        match &self.realization {
            Realization::JointEigenbasis { characters, .. } => {
                coeffs.iter().zip(characters).map(|(&a, chi)| a * chi[g]).collect()
            }
            Realization::BlockLevel => unreachable!("coefficient action is explicit-mode only"),
        }
    }

    fn vector_from_coefficients(&self, coeffs: &[Complex64]) -> CMatrix {
        match &self.realization {
            Realization::JointEigenbasis { basis, .. } => {
                let mut v = CMatrix::zeros(basis.rows(), 1);
                for (j, &a) in coeffs.iter().enumerate() {
                    for i in 0..basis.rows() {
                        v[(i, 0)] += basis[(i, j)] * a;
                    }
                }
                v
            }
            Realization::BlockLevel => unreachable!(),
        }
    }
}

fn eigenbasis_of(rep: &UnitaryRep) -> Result<(Vec<String>, Vec<Vec<Complex64>>, CMatrix), ExclusionError> {
    if !rep.group().is_abelian() {
        return Err(ExclusionError::NotAbelian);
    }
    let decomp = decompose_abelian(rep).map_err(|e| match e {
        crate::isotypical::IsotypicalError::NotAbelian => ExclusionError::NotAbelian,
        crate::isotypical::IsotypicalError::Linalg(l) => ExclusionError::Linalg(l),
        other => ExclusionError::SpectrumBlockMismatch { detail: other.to_string() },
    })?;
    for b in &decomp.blocks {
        if b.multiplicity != 1 {
            return Err(ExclusionError::UnsupportedMultiplicity {
                label: b.label.clone(),
                multiplicity: b.multiplicity,
            });
        }
    }
    let labels: Vec<String> = decomp.blocks.iter().map(|b| b.label.clone()).collect();
    let characters: Vec<Vec<Complex64>> = decomp.blocks.iter().map(|b| b.character.clone()).collect();
    let basis = CMatrix::from_fn(decomp.dim, decomp.blocks.len(), |i, j| decomp.blocks[j].basis[(i, 0)]);
    Ok((labels, characters, basis))
}

/// A positive operator-valued measure. In explicit mode there is one
/// outcome per group element (labels `g0, g1, ...`); in block-level mode a
/// single covariant seed outcome labeled `e`, with completeness expressed
/// through the per-block constraint `tr_{H_mu}[P_mu M P_mu] = d_mu I`.
#[derive(Debug, Clone)]
pub struct Povm {
    pub outcomes: Vec<(String, CMatrix)>,
    pub completeness_defect: f64,
    pub min_effect_eigenvalue: f64,
}

/// Builds the covariant zero-error POVM from the polygon phases.
/// Fails with [`ExclusionError::PolygonInfeasible`] when the weight
/// condition does not hold.
pub fn construct_povm(instance: &ExclusionInstance) -> Result<Povm, ExclusionError> {
    let terms = instance.spectrum.terms();
    let weights = instance.spectrum.weights();
    let phases = solve_polygon_phases(&weights)?;
    // Compose the polygon phase against the amplitude phase so the seed
    // effect annihilates the seed state: beta_mu = theta_mu - phi_mu.
    let betas: Vec<Complex64> = terms
        .iter()
        .zip(&phases)
        .map(|(t, &phi)| Complex64::from_polar(1.0, t.amplitude.arg() - phi))
        .collect();

    match &instance.realization {
        Realization::JointEigenbasis { group, .. } => {
            let n = group.order();
            let dim = instance.dim();
            let scale = 1.0 / (n as f64).sqrt();
            let seed_coeffs: Vec<Complex64> = betas.iter().map(|b| b.scale(scale)).collect();
            let mut outcomes = Vec::with_capacity(n);
            let mut sum = CMatrix::zeros(dim, dim);
            for g in 0..n {
                let w = instance.vector_from_coefficients(&instance.act_on_coefficients(&seed_coeffs, g));
                let effect = outer(&w, &w);
                sum = sum.add(&effect);
                outcomes.push((format!("g{g}"), effect));
            }
            let completeness_defect = sum.sub(&CMatrix::identity(dim)).frobenius_norm();
            if completeness_defect > COMPLETENESS_TOL {
                return Err(ExclusionError::CompletenessDefect { defect: completeness_defect });
            }
            // Effects are rank-one outer products: the smallest eigenvalue
            // is exactly 0 unless the carrier is one-dimensional.
            let min_effect_eigenvalue =
                if dim == 1 { outcomes.iter().map(|(_, m)| m[(0, 0)].re).fold(f64::INFINITY, f64::min) } else { 0.0 };
            Ok(Povm { outcomes, completeness_defect, min_effect_eigenvalue })
        }
        Realization::BlockLevel => {
            let seed = block_seed_effect_vector(instance, &betas, None)?;
            block_level_povm(instance, seed)
        }
    }
}

/// Builds the shifted covariant seed effect for block-level instances whose
/// weight condition fails: designated blocks replace `vec(I)` by
/// `vec(W_{z,x})`, which is orthogonal to the unshifted reference vector
/// whenever `tr W_{z,x} = 0`. Blocks carrying seed amplitude should all be
/// designated; undesignated blocks keep the reference vector.
pub fn construct_povm_hw_shift(
    instance: &ExclusionInstance,
    shifts: &BTreeMap<String, (usize, usize)>,
) -> Result<Povm, ExclusionError> {
    let terms = instance.spectrum.terms();
    for label in shifts.keys() {
        let term = terms
            .iter()
            .find(|t| &t.label == label)
            .ok_or_else(|| ExclusionError::UnknownShiftBlock { label: label.clone() })?;
        if term.irrep_dim < 2 {
            return Err(ExclusionError::ShiftNeedsBlockDim { label: label.clone() });
        }
    }
    if instance.mode() != Mode::BlockLevel {
        // Explicit instances have d = 1 everywhere, so any shift request
        // already failed above; reaching here means an empty shift map.
        return Err(ExclusionError::NotAbelian);
    }
    let betas = vec![c(1.0, 0.0); terms.len()];
    let seed = block_seed_effect_vector(instance, &betas, Some(shifts))?;
    block_level_povm(instance, seed)
}

/// Assembles `|phi> = ⊕ sqrt(d) beta_mu vec(V_mu)` with `V_mu = I` or a
/// designated Heisenberg-Weyl shift; verifies shift orthogonality.
fn block_seed_effect_vector(
    instance: &ExclusionInstance,
    betas: &[Complex64],
    shifts: Option<&BTreeMap<String, (usize, usize)>>,
) -> Result<CMatrix, ExclusionError> {
    let mut phi = CMatrix::zeros(instance.dim(), 1);
    for ((t, off), beta) in instance.spectrum.terms().iter().zip(instance.block_offsets()).zip(betas) {
        let d = t.irrep_dim;
        let reference = CMatrix::identity(d);
        let v = match shifts.and_then(|s| s.get(&t.label)) {
            Some(&(z, x)) => {
                let w = heisenberg_weyl(d, z, x);
                let overlap = w.adjoint().mul(&reference).trace().norm();
                if overlap > SHIFT_ORTHOGONALITY_TOL {
                    return Err(ExclusionError::ShiftNotOrthogonal { label: t.label.clone(), overlap });
                }
                w
            }
            None => reference,
        };
        let vec_v = vectorize(&v);
        let coeff = beta.scale((d as f64).sqrt());
        for i in 0..d * d {
            phi[(off + i, 0)] = vec_v.data()[i] * coeff;
        }
    }
    Ok(phi)
}

fn block_level_povm(instance: &ExclusionInstance, phi: CMatrix) -> Result<Povm, ExclusionError> {
    let effect = outer(&phi, &phi);
    let completeness_defect = block_completeness_defect(instance, &effect)?;
    if completeness_defect > COMPLETENESS_TOL {
        return Err(ExclusionError::CompletenessDefect { defect: completeness_defect });
    }
    let min_effect_eigenvalue = if instance.dim() == 1 { effect[(0, 0)].re } else { 0.0 };
    Ok(Povm { outcomes: vec![("e".to_string(), effect)], completeness_defect, min_effect_eigenvalue })
}

/// Worst per-block defect `|| tr_{H_mu}[P_mu M P_mu] - d_mu I ||_F`; zero
/// exactly when the covariant orbit of the seed effect resolves the
/// identity.
fn block_completeness_defect(instance: &ExclusionInstance, effect: &CMatrix) -> Result<f64, ExclusionError> {
    let mut worst = 0.0f64;
    for (t, off) in instance.spectrum.terms().iter().zip(instance.block_offsets()) {
        let d = t.irrep_dim;
        let sub = CMatrix::from_fn(d * d, d * d, |i, j| effect[(off + i, off + j)]);
        let reduced = partial_trace_left(&sub, d, d)?;
        let defect = reduced.sub(&CMatrix::identity(d).scaled(c(d as f64, 0.0))).frobenius_norm();
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// Dual certificate for a non-excludable Abelian instance: a Hermitian `N`
/// with `N <= |u_g><u_g|` for every g and `tr N = t^2`.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub matrix: CMatrix,
    pub gap: f64,
}

/// `N = t (|a_0| P_0 - sum_{mu != 0} |a_mu| P_mu)` with `P_mu` the rank-one
/// projector on basis column mu and index 0 the dominant amplitude.
pub fn build_dual_certificate(instance: &ExclusionInstance) -> Result<DualCertificate, ExclusionError> {
    let basis = match &instance.realization {
        Realization::JointEigenbasis { basis, .. } => basis,
        Realization::BlockLevel => return Err(ExclusionError::NotAbelian),
    };
    let check = check_sufficient_condition(&instance.spectrum);
    let t = check.gap;
    if check.holds {
        return Err(ExclusionError::GapNotPositive { gap: t });
    }
    let terms = instance.spectrum.terms();
    let weights = instance.spectrum.weights();
    let dominant = (0..terms.len()).max_by(|&i, &j| weights[i].total_cmp(&weights[j])).expect("non-empty");
    let dim = basis.rows();
    let mut n = CMatrix::zeros(dim, dim);
    for (j, t_j) in terms.iter().enumerate() {
        let col = CMatrix::from_fn(dim, 1, |i, _| basis[(i, j)]);
        let sign = if j == dominant { 1.0 } else { -1.0 };
        n = n.add(&outer(&col, &col).scaled(c(sign * t_j.amplitude.norm() * t, 0.0)));
    }
    Ok(DualCertificate { matrix: n, gap: t })
}

/// The measurement that attains the optimal error `t^2` on a
/// non-excludable Abelian instance: the orbit of
/// `|phi'> = (1/sqrt(|G|)) (e^{i theta_0} |v_0> - sum_{mu != 0} e^{i theta_mu} |v_mu>)`.
pub fn dual_optimal_povm(instance: &ExclusionInstance) -> Result<Povm, ExclusionError> {
    let group = match &instance.realization {
        Realization::JointEigenbasis { group, .. } => group,
        Realization::BlockLevel => return Err(ExclusionError::NotAbelian),
    };
    let terms = instance.spectrum.terms();
    let weights = instance.spectrum.weights();
    let dominant = (0..terms.len()).max_by(|&i, &j| weights[i].total_cmp(&weights[j])).expect("non-empty");
    let n = group.order();
    let scale = 1.0 / (n as f64).sqrt();
    let coeffs: Vec<Complex64> = terms
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let sign = if j == dominant { 1.0 } else { -1.0 };
            Complex64::from_polar(scale * sign, t.amplitude.arg())
        })
        .collect();
    let dim = instance.dim();
    let mut outcomes = Vec::with_capacity(n);
    let mut sum = CMatrix::zeros(dim, dim);
    for g in 0..n {
        let w = instance.vector_from_coefficients(&instance.act_on_coefficients(&coeffs, g));
        let effect = outer(&w, &w);
        sum = sum.add(&effect);
        outcomes.push((format!("g{g}"), effect));
    }
    let completeness_defect = sum.sub(&CMatrix::identity(dim)).frobenius_norm();
    let min_effect_eigenvalue =
        if dim == 1 { outcomes.iter().map(|(_, m)| m[(0, 0)].re).fold(f64::INFINITY, f64::min) } else { 0.0 };
    Ok(Povm { outcomes, completeness_defect, min_effect_eigenvalue })
}

/// Verdict for an instance.
#[derive(Debug, Clone)]
pub enum ExclusionCertificate {
    /// A measurement excluding every orbit member with zero error.
    Excludable { povm: Povm, max_error_residual: f64 },
    /// Exclusion is impossible; `dual` witnesses optimal error `t^2`.
    NotExcludable { dual: DualCertificate, optimal_error: f64 },
    /// Outside the decidable regime (block-level instance failing the
    /// weight condition with no shift construction supplied).
    Undecided { reason: String },
}

/// Exact dichotomy for explicit Abelian instances: excludable if and only
/// if the dominant amplitude is at most the sum of the others.
pub fn check_abelian_iff(instance: &ExclusionInstance) -> Result<ExclusionCertificate, ExclusionError> {
    if instance.mode() != Mode::Explicit {
        return Err(ExclusionError::NotAbelian);
    }
    let check = check_sufficient_condition(&instance.spectrum);
    if check.holds {
        let povm = construct_povm(instance)?;
        let max_error_residual = max_orbit_error(instance, &povm)?;
        Ok(ExclusionCertificate::Excludable { povm, max_error_residual })
    } else {
        let dual = build_dual_certificate(instance)?;
        let optimal_error = dual.gap * dual.gap;
        Ok(ExclusionCertificate::NotExcludable { dual, optimal_error })
    }
}

fn max_orbit_error(instance: &ExclusionInstance, povm: &Povm) -> Result<f64, ExclusionError> {
    let group = instance.group().ok_or(ExclusionError::NotAbelian)?;
    let mut worst = 0.0f64;
    for g in 0..group.order() {
        let u = instance.orbit_state(g)?;
        let effect = &povm.outcomes[g].1;
        worst = worst.max(inner(&u, &effect.mul(&u)).re);
    }
    Ok(worst)
}

/// Lemma-style optimality flags for a verified measurement: the operator
/// `N = sum_g |u_g><u_g| M_g` must be Hermitian and dominated by every
/// `|u_g><u_g|` at a zero-error optimum.
#[derive(Debug, Clone)]
pub struct Lemma1Flags {
    pub hermiticity_defect: f64,
    /// max over g of the largest eigenvalue of `N - |u_g><u_g|`.
    pub max_domination_gap: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub outcome_errors: Vec<(String, f64)>,
    pub max_outcome_error: f64,
    pub completeness_defect: f64,
    pub min_effect_eigenvalue: f64,
    pub lemma_flags: Option<Lemma1Flags>,
    /// Worst per-block deviation from `tr_{H_mu}[P_mu M P_mu] = d_mu I`
    /// for the seed effect (scaled by `|G|` in explicit mode).
    pub block_constraint_defect: Option<f64>,
}

/// Recomputes every property a claimed exclusion POVM must have.
pub fn verify_povm(instance: &ExclusionInstance, povm: &Povm) -> Result<VerificationReport, ExclusionError> {
    match &instance.realization {
        Realization::JointEigenbasis { group, .. } => {
            let n = group.order();
            if povm.outcomes.len() != n {
                return Err(ExclusionError::LabelMismatch {
                    expected: format!("{n} outcomes"),
                    got: format!("{}", povm.outcomes.len()),
                });
            }
            for (g, (label, _)) in povm.outcomes.iter().enumerate() {
                let expected = format!("g{g}");
                if *label != expected {
                    return Err(ExclusionError::LabelMismatch { expected, got: label.clone() });
                }
            }
            let dim = instance.dim();
            let mut outcome_errors = Vec::with_capacity(n);
            let mut sum = CMatrix::zeros(dim, dim);
            let mut min_eig = f64::INFINITY;
            let mut n_op = CMatrix::zeros(dim, dim);
            for (g, (label, effect)) in povm.outcomes.iter().enumerate() {
                let u = instance.orbit_state(g)?;
                outcome_errors.push((label.clone(), inner(&u, &effect.mul(&u)).re));
                sum = sum.add(effect);
                let eigs = hermitian_eigenvalues(effect, 1e-9)?;
                min_eig = min_eig.min(eigs[0]);
                // u (u^dagger M): rank-one row product keeps this quadratic.
                let row = u.adjoint().mul(effect);
                n_op = n_op.add(&u.mul(&row));
            }
            let completeness_defect = sum.sub(&CMatrix::identity(dim)).frobenius_norm();
            let hermiticity_defect = n_op.hermiticity_defect();
            let n_herm = n_op.hermitized();
            let mut max_domination_gap = f64::NEG_INFINITY;
            for g in 0..n {
                let u = instance.orbit_state(g)?;
                let diff = n_herm.sub(&outer(&u, &u));
                let eigs = hermitian_eigenvalues(&diff, 1e-9)?;
                max_domination_gap = max_domination_gap.max(eigs[eigs.len() - 1]);
            }
            let lemma = Lemma1Flags {
                hermiticity_defect,
                max_domination_gap,
                satisfied: hermiticity_defect <= HERMITICITY_TOL && max_domination_gap <= ERROR_RESIDUAL_TOL,
            };
            // Per-block seed constraint with the identity-element effect.
            let seed_scaled = povm.outcomes[0].1.scaled(c(n as f64, 0.0));
            let mut block_defect = 0.0f64;
            if let Realization::JointEigenbasis { basis, .. } = &instance.realization {
                for j in 0..instance.spectrum.terms().len() {
                    let col = CMatrix::from_fn(dim, 1, |i, _| basis[(i, j)]);
                    let val = inner(&col, &seed_scaled.mul(&col));
                    block_defect = block_defect.max((val - c(1.0, 0.0)).norm());
                }
            }
            let max_outcome_error = outcome_errors.iter().map(|(_, e)| *e).fold(0.0, f64::max);
            Ok(VerificationReport {
                outcome_errors,
                max_outcome_error,
                completeness_defect,
                min_effect_eigenvalue: min_eig,
                lemma_flags: Some(lemma),
                block_constraint_defect: Some(block_defect),
            })
        }
        Realization::BlockLevel => {
            if povm.outcomes.len() != 1 || povm.outcomes[0].0 != "e" {
                return Err(ExclusionError::LabelMismatch {
                    expected: "single outcome e".to_string(),
                    got: povm.outcomes.iter().map(|(l, _)| l.clone()).collect::<Vec<_>>().join(","),
                });
            }
            let effect = &povm.outcomes[0].1;
            let psi = instance.seed_vector();
            let error = inner(&psi, &effect.mul(&psi)).re;
            let completeness_defect = block_completeness_defect(instance, effect)?;
            let eigs = hermitian_eigenvalues(effect, 1e-9)?;
            Ok(VerificationReport {
                outcome_errors: vec![("e".to_string(), error)],
                max_outcome_error: error,
                completeness_defect,
                min_effect_eigenvalue: eigs[0],
                lemma_flags: None,
                block_constraint_defect: Some(completeness_defect),
            })
        }
    }
}

/// Full decision procedure. Explicit instances get the exact dichotomy;
/// block-level instances get the weight-condition construction, the
/// supplied shift construction as a fallback, or `Undecided`.
pub fn decide(
    instance: &ExclusionInstance,
    shifts: Option<&BTreeMap<String, (usize, usize)>>,
) -> Result<ExclusionCertificate, ExclusionError> {
    match instance.mode() {
        Mode::Explicit => check_abelian_iff(instance),
        Mode::BlockLevel => {
            let check = check_sufficient_condition(&instance.spectrum);
            if check.holds {
                let povm = construct_povm(instance)?;
                let report = verify_povm(instance, &povm)?;
                return Ok(ExclusionCertificate::Excludable { povm, max_error_residual: report.max_outcome_error });
            }
            match shifts {
                Some(map) if !map.is_empty() => {
                    let povm = construct_povm_hw_shift(instance, map)?;
                    let report = verify_povm(instance, &povm)?;
                    if report.max_outcome_error <= ERROR_RESIDUAL_TOL {
                        Ok(ExclusionCertificate::Excludable { povm, max_error_residual: report.max_outcome_error })
                    } else {
                        Ok(ExclusionCertificate::Undecided {
                            reason: format!(
                                "shift construction leaves residual {:.3e}; blocks with seed amplitude may be undesignated",
                                report.max_outcome_error
                            ),
                        })
                    }
                }
                _ => Ok(ExclusionCertificate::Undecided {
                    reason: format!(
                        "weight condition fails (gap {:.6e}) and no shift construction was supplied",
                        check.gap
                    ),
                }),
            }
        }
    }
}
