//! The product-qubit exclusion family: `n` copies of
//! `cos(theta/2) |0> + sin(theta/2) |1>` under the sign-flip action of the
//! Boolean cube `Z_2^n` (each element flips the phase of `|1>` on its
//! support).
//!
//! The orbit consists of the `2^n` states whose overlap pattern is
//! controlled by a single angle, and exclusion is decided by a closed-form
//! threshold: the orbit is excludable exactly when
//! `(1 + tan(theta/2))^n >= 2`.

use crate::exclusion::{BlockSpectrum, ExclusionError, ExclusionInstance, SpectrumTerm, BOUNDARY_TOL};
use crate::groups::{FiniteGroup, PAULI_Z_QUBIT_CAP};
use crate::linalg::{c, CMatrix};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PbrError {
    #[error("angle {theta} is outside [0, pi/2]")]
    DomainError { theta: f64 },
    #[error("copy count {n} is outside the supported range 1..={cap}")]
    TooManyQubits { n: usize, cap: usize },
    #[error(transparent)]
    Exclusion(#[from] ExclusionError),
}

fn check_domain(theta: f64) -> Result<(), PbrError> {
    // Allow the right endpoint with relative slack (unit conversions from
    // degrees land within rounding of pi/2).
    if !theta.is_finite() || theta < 0.0 || theta > std::f64::consts::FRAC_PI_2 * (1.0 + BOUNDARY_TOL) {
        return Err(PbrError::DomainError { theta });
    }
    Ok(())
}

/// The threshold quantity `(1 + tan(theta/2))^n`.
pub fn pbr_condition_value(theta: f64, n: usize) -> Result<f64, PbrError> {
    check_domain(theta)?;
    assert!(n >= 1, "need at least one copy");
    Ok((1.0 + (theta / 2.0).tan()).powi(n as i32))
}

/// Whether `n` copies at angle `theta` are excludable:
/// `(1 + tan(theta/2))^n >= 2`, with relative slack [`BOUNDARY_TOL`] so
/// exact boundary pairs (such as one copy at `theta = pi/2`, or two copies
/// at `theta = pi/4` where the value is exactly 2) classify as excludable
/// despite float rounding.
pub fn pbr_condition(theta: f64, n: usize) -> Result<bool, PbrError> {
    Ok(pbr_condition_value(theta, n)? >= 2.0 * (1.0 - BOUNDARY_TOL))
}

/// Result of the minimal-copies search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimalCopies {
    Copies(usize),
    /// No finite number of copies suffices (`theta = 0`, where all orbit
    /// states coincide; also angles so small that `1 + tan(theta/2)`
    /// rounds to 1 in f64, making the threshold unreachable in this
    /// arithmetic).
    Unbounded,
}

/// Smallest `n` with `(1 + tan(theta/2))^n >= 2`.
pub fn minimal_n(theta: f64) -> Result<MinimalCopies, PbrError> {
    check_domain(theta)?;
    let r = 1.0 + (theta / 2.0).tan();
    if r <= 1.0 {
        return Ok(MinimalCopies::Unbounded);
    }
    // Estimate from logarithms, then scan with the boundary-tolerant
    // condition; monotonicity in n makes the first hit minimal.
    let estimate = (2f64.ln() / r.ln()).floor() as i64;
    let mut n = estimate.saturating_sub(2).max(1) as usize;
    loop {
        if pbr_condition(theta, n)? {
            return Ok(MinimalCopies::Copies(n));
        }
        n += 1;
    }
}

/// Builds the orbit instance: group `Z_2^n`, joint eigenbasis the
/// computational product basis, characters `chi_k(x) = (-1)^{|k AND x|}`,
/// amplitudes `cos(theta/2)^{n-|k|} sin(theta/2)^{|k|}`. Labels are
/// bitstrings (`b010` for the basis state `|010>`).
pub fn build_pbr_instance(theta: f64, n: usize) -> Result<ExclusionInstance, PbrError> {
    check_domain(theta)?;
    if n == 0 || n > PAULI_Z_QUBIT_CAP {
        return Err(PbrError::TooManyQubits { n, cap: PAULI_Z_QUBIT_CAP });
    }
    let dim = 1usize << n;
    let (cos_half, sin_half) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut terms = Vec::with_capacity(dim);
    let mut characters = Vec::with_capacity(dim);
    for k in 0..dim {
        let ones = (k as u32).count_ones() as usize;
        let amp = cos_half.powi((n - ones) as i32) * sin_half.powi(ones as i32);
        terms.push(SpectrumTerm {
            label: format!("b{k:0width$b}", width = n),
            irrep_dim: 1,
            multiplicity: 1,
            amplitude: c(amp, 0.0),
        });
        let chi: Vec<Complex64> =
            (0..dim).map(|x| if (k & x).count_ones() % 2 == 0 { c(1.0, 0.0) } else { c(-1.0, 0.0) }).collect();
        characters.push(chi);
    }
    // theta = 0 concentrates everything on b00..0; the spectrum is still
    // normalized, and the weight condition simply fails.
    let spectrum = BlockSpectrum::new(terms)?;
    let group = FiniteGroup::boolean_cube(n);
    Ok(ExclusionInstance::from_parts(group, spectrum, characters, CMatrix::identity(dim)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exclusion::{check_abelian_iff, check_sufficient_condition, verify_povm, ExclusionCertificate};
    use crate::groups::UnitaryRep;
    use crate::linalg::inner;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn threshold_values() {
        // One copy at pi/2: 1 + tan(pi/4) = 2 exactly.
        assert!((pbr_condition_value(FRAC_PI_2, 1).unwrap() - 2.0).abs() < 1e-12);
        // Two copies at pi/4: (1 + tan(pi/8))^2 = (sqrt 2)^2 = 2 exactly.
        assert!((pbr_condition_value(FRAC_PI_4, 2).unwrap() - 2.0).abs() < 1e-12);
        assert!(((1.0 + (PI / 8.0).tan()) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn boundary_cases_classify_as_excludable() {
        assert!(pbr_condition(FRAC_PI_2, 1).unwrap());
        assert!(pbr_condition(FRAC_PI_4, 2).unwrap());
        assert!(!pbr_condition(FRAC_PI_4, 1).unwrap());
        assert!(!pbr_condition(0.3, 2).unwrap());
    }

    #[test]
    fn domain_is_enforced() {
        assert!(matches!(pbr_condition(-0.1, 1), Err(PbrError::DomainError { .. })));
        assert!(matches!(pbr_condition(1.8, 1), Err(PbrError::DomainError { .. })));
        assert!(matches!(minimal_n(f64::NAN), Err(PbrError::DomainError { .. })));
        assert!(matches!(build_pbr_instance(3.0, 2), Err(PbrError::DomainError { .. })));
    }

    #[test]
    fn minimal_copies_known_angles() {
        assert_eq!(minimal_n(FRAC_PI_2).unwrap(), MinimalCopies::Copies(1));
        assert_eq!(minimal_n(FRAC_PI_4).unwrap(), MinimalCopies::Copies(2));
        assert_eq!(minimal_n(PI / 3.0).unwrap(), MinimalCopies::Copies(2));
        assert_eq!(minimal_n(PI / 10.0).unwrap(), MinimalCopies::Copies(5));
        assert_eq!(minimal_n(0.0).unwrap(), MinimalCopies::Unbounded);
        assert_eq!(minimal_n(1e-300).unwrap(), MinimalCopies::Unbounded);
    }

    #[test]
    fn minimal_copies_is_a_threshold() {
        for theta in [0.01, 0.2, 0.7, 1.1, 1.5] {
            match minimal_n(theta).unwrap() {
                MinimalCopies::Copies(n) => {
                    assert!(pbr_condition(theta, n).unwrap(), "theta {theta}: n {n} should pass");
                    if n > 1 {
                        assert!(!pbr_condition(theta, n - 1).unwrap(), "theta {theta}: n-1 should fail");
                    }
                }
                MinimalCopies::Unbounded => panic!("positive angles have finite n"),
            }
        }
    }

    #[test]
    fn instance_amplitudes_are_binomial() {
        let theta = PI / 3.0;
        let instance = build_pbr_instance(theta, 2).unwrap();
        let terms = instance.spectrum().terms();
        assert_eq!(terms.len(), 4);
        let (c2, s2) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let expected = [c2 * c2, c2 * s2, c2 * s2, s2 * s2];
        let labels = ["b00", "b01", "b10", "b11"];
        for (i, t) in terms.iter().enumerate() {
            assert_eq!(t.label, labels[i]);
            assert!((t.amplitude.re - expected[i]).abs() < 1e-15);
            assert_eq!(t.amplitude.im, 0.0);
        }
    }

    #[test]
    fn gap_matches_threshold_value() {
        // The weight gap t and the threshold satisfy
        // value - 2 = -t / cos(theta/2)^n.
        for (theta, n) in [(0.4, 2usize), (1.2, 3), (FRAC_PI_4, 2), (0.9, 1)] {
            let instance = build_pbr_instance(theta, n).unwrap();
            let check = check_sufficient_condition(instance.spectrum());
            let value = pbr_condition_value(theta, n).unwrap();
            let cn = (theta / 2.0).cos().powi(n as i32);
            assert!(
                ((value - 2.0) + check.gap / cn).abs() < 1e-12,
                "theta {theta} n {n}: value {value}, gap {}",
                check.gap
            );
        }
    }

    #[test]
    fn dichotomy_matches_condition_on_a_grid() {
        for n in 1..=3usize {
            for i in 0..12 {
                let theta = FRAC_PI_2 * (i as f64 + 0.5) / 12.0;
                let expected = pbr_condition(theta, n).unwrap();
                let instance = build_pbr_instance(theta, n).unwrap();
                match check_abelian_iff(&instance).unwrap() {
                    ExclusionCertificate::Excludable { povm, max_error_residual } => {
                        assert!(expected, "theta {theta} n {n} should not be excludable");
                        assert!(max_error_residual < 1e-12);
                        let report = verify_povm(&instance, &povm).unwrap();
                        assert!(report.completeness_defect < 1e-10);
                        assert!(report.lemma_flags.unwrap().satisfied);
                    }
                    ExclusionCertificate::NotExcludable { dual, optimal_error } => {
                        assert!(!expected, "theta {theta} n {n} should be excludable");
                        assert!(dual.gap > 0.0);
                        assert!((optimal_error - dual.gap * dual.gap).abs() < 1e-15);
                    }
                    ExclusionCertificate::Undecided { reason } => panic!("unexpected Undecided: {reason}"),
                }
            }
        }
    }

    #[test]
    fn direct_construction_matches_generic_decomposition() {
        // Build the same orbit through the dense diagonal representation
        // and a tensor-product seed vector; certificates must agree.
        let theta = 0.9f64;
        for n in 1..=3usize {
            let direct = build_pbr_instance(theta, n).unwrap();
            let rep = UnitaryRep::pauli_z_rep(n).unwrap();
            let dim = 1usize << n;
            let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            let seed = CMatrix::from_fn(dim, 1, |i, _| {
                let ones = (i as u32).count_ones() as usize;
                c(ch.powi((n - ones) as i32) * sh.powi(ones as i32), 0.0)
            });
            let generic = ExclusionInstance::from_seed_vector(&rep, &seed).unwrap();

            let mut w1 = direct.spectrum().weights();
            let mut w2 = generic.spectrum().weights();
            w1.sort_by(f64::total_cmp);
            w2.sort_by(f64::total_cmp);
            for (a, b) in w1.iter().zip(&w2) {
                assert!((a - b).abs() < 1e-12);
            }
            let c1 = check_sufficient_condition(direct.spectrum());
            let c2 = check_sufficient_condition(generic.spectrum());
            assert_eq!(c1.holds, c2.holds);
            assert!((c1.gap - c2.gap).abs() < 1e-12);

            // Orbit states agree as vectors (same basis up to label order).
            for g in 0..dim {
                let u = direct.orbit_state(g).unwrap();
                let v = generic.orbit_state(g).unwrap();
                assert!((inner(&u, &v).norm() - 1.0).abs() < 1e-10, "orbit state {g} mismatch at n {n}");
            }
        }
    }

    #[test]
    fn qubit_cap_is_enforced() {
        assert!(matches!(build_pbr_instance(0.5, 0), Err(PbrError::TooManyQubits { .. })));
        assert!(matches!(build_pbr_instance(0.5, 11), Err(PbrError::TooManyQubits { .. })));
    }
}
