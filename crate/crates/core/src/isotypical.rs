//! Isotypical decomposition of Abelian unitary representations.
//!
//! Characters of an Abelian group are enumerated from its Cayley table: a
//! greedy search picks generators of maximal order, every element gets an
//! exponent word over those generators, and candidate character values
//! (roots of unity on each generator) are validated with exact integer
//! exponent arithmetic before any floating point enters. Each character
//! then yields the projector `P = (1/|G|) sum_g conj(chi(g)) U_g`; blocks
//! with zero rank are dropped.
//!
//! Non-Abelian representations are deliberately out of scope here: callers
//! with non-Abelian symmetry declare their block data directly at the
//! spectrum level.

use crate::groups::{FiniteGroup, UnitaryRep};
use crate::linalg::{c, hermitian_eigen, CMatrix, LinalgError};
use num_complex::Complex64;
use thiserror::Error;

/// Eigenvalues above this threshold count toward a projector's rank.
pub const RANK_EIGENVALUE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum IsotypicalError {
    #[error("group is not Abelian")]
    NotAbelian,
    #[error("operator is {got}x{got2}, rep dimension is {dim}", got2 = got)]
    DimensionMismatch { got: usize, dim: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One isotypical block of an Abelian decomposition. The irrep dimension is
/// always 1; `multiplicity` is the rank of the character projector. `basis`
/// holds orthonormal columns spanning the block, and `character` the scalar
/// action `chi(g)` per group element.
#[derive(Debug, Clone)]
pub struct IsotypicalBlock {
    pub label: String,
    pub irrep_dim: usize,
    pub multiplicity: usize,
    pub projector: CMatrix,
    pub basis: CMatrix,
    pub character: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct IsotypicalDecomposition {
    pub dim: usize,
    pub blocks: Vec<IsotypicalBlock>,
}

/// Result of checking an operator against the block pattern
/// `sum_mu I_{d_mu} (x) O_mu` in decomposed coordinates.
#[derive(Debug, Clone)]
pub struct BlockFormReport {
    pub conforms: bool,
    pub max_defect: f64,
    /// Coordinates (in the decomposed basis) of the worst deviation.
    pub worst_entry: (usize, usize),
}

/// Exact character table of an Abelian group: `chi[c][g]` is a root of
/// unity, enumerated deterministically (generator exponents in odometer
/// order, last generator fastest).
pub fn abelian_characters(group: &FiniteGroup) -> Result<Vec<Vec<Complex64>>, IsotypicalError> {
    if !group.is_abelian() {
        return Err(IsotypicalError::NotAbelian);
    }
    let n = group.order();

    // Greedy generating set: repeatedly adjoin an uncovered element of
    // maximal order, tracking one exponent word per covered element.
    let mut gens: Vec<usize> = Vec::new();
    let mut gen_orders: Vec<usize> = Vec::new();
    let mut words: Vec<Option<Vec<usize>>> = vec![None; n];
    words[0] = Some(Vec::new());
    while words.iter().any(|w| w.is_none()) {
        let next = (0..n)
            .filter(|&g| words[g].is_none())
            .max_by_key(|&g| group.element_order(g))
            .expect("uncovered element exists");
        let ord = group.element_order(next);
        let covered: Vec<usize> = (0..n).filter(|&g| words[g].is_some()).collect();
        for h in covered {
            let base = words[h].clone().expect("covered");
            let mut acc = h;
            for j in 0..ord {
                if words[acc].is_none() {
                    let mut w = base.clone();
                    w.extend(std::iter::repeat(0).take(gens.len() - base.len()));
                    w.push(j);
                    words[acc] = Some(w);
                }
                acc = group.mul(acc, next);
            }
        }
        gens.push(next);
        gen_orders.push(ord);
    }
    let r = gens.len();
    for w in words.iter_mut() {
        let w = w.as_mut().expect("all covered");
        w.extend(std::iter::repeat(0).take(r - w.len()));
    }
    let words: Vec<Vec<usize>> = words.into_iter().map(|w| w.expect("covered")).collect();

    let lcm = gen_orders.iter().fold(1usize, |acc, &o| acc / gcd(acc, o) * o);

    // A candidate assigns exponent k_i on generator i; its exact phase
    // exponent on element x is s(x) = sum_i k_i * w_i(x) * (lcm / ord_i)
    // modulo lcm. Validity needs s(x * gen_i) = s(x) + s(gen_i) for every
    // element and generator; induction over generator words then gives the
    // full homomorphism property.
    let mut characters = Vec::new();
    let mut digits = vec![0usize; r];
    loop {
        let s = |x: usize| -> usize {
            digits
                .iter()
                .zip(&words[x])
                .zip(&gen_orders)
                .map(|((&k, &e), &o)| k * e % lcm * (lcm / o) % lcm)
                .sum::<usize>()
                % lcm
        };
        let mut valid = true;
        'check: for (i, &g) in gens.iter().enumerate() {
            let sg = digits[i] * (lcm / gen_orders[i]) % lcm;
            for x in 0..n {
                if s(group.mul(x, g)) != (s(x) + sg) % lcm {
                    valid = false;
                    break 'check;
                }
            }
        }
        if valid {
            let row: Vec<Complex64> = (0..n)
                .map(|x| {
                    let angle = 2.0 * std::f64::consts::PI * (s(x) as f64) / (lcm as f64);
                    c(angle.cos(), angle.sin())
                })
                .collect();
            characters.push(row);
        }
        // Odometer over candidate exponents, last generator fastest.
        let mut pos = r;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < gen_orders[pos] {
                break;
            }
            digits[pos] = 0;
        }
        if digits.iter().all(|&d| d == 0) {
            break;
        }
        if r == 0 {
            break;
        }
    }
    assert_eq!(characters.len(), n, "an Abelian group of order {n} has exactly {n} characters");
    Ok(characters)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Decomposes an Abelian representation into character blocks.
pub fn decompose_abelian(rep: &UnitaryRep) -> Result<IsotypicalDecomposition, IsotypicalError> {
    let group = rep.group();
    let characters = abelian_characters(group)?;
    let n = group.order();
    let dim = rep.dim();
    let diagonal = (0..n).all(|g| is_diagonal(rep.matrix(g)));

    let mut blocks = Vec::new();
    for (idx, chi) in characters.iter().enumerate() {
        let label = format!("chi{idx}");
        if diagonal {
            // Diagonal action: the projector is diagonal with entries in
            // {0, 1}; basis columns are exact standard basis vectors.
            let mut diag = vec![Complex64::default(); dim];
            for g in 0..n {
                let w = chi[g].conj();
                for (k, d) in diag.iter_mut().enumerate() {
                    *d += w * rep.matrix(g)[(k, k)];
                }
            }
            let scale = 1.0 / n as f64;
            let members: Vec<usize> =
                (0..dim).filter(|&k| (diag[k] * scale).re > RANK_EIGENVALUE_THRESHOLD).collect();
            if members.is_empty() {
                continue;
            }
            let projector = CMatrix::diagonal(&diag.iter().map(|&d| d * scale).collect::<Vec<_>>());
            let basis = CMatrix::from_fn(dim, members.len(), |i, j| {
                if i == members[j] {
                    c(1.0, 0.0)
                } else {
                    Complex64::default()
                }
            });
            blocks.push(IsotypicalBlock {
                label,
                irrep_dim: 1,
                multiplicity: members.len(),
                projector,
                basis,
                character: chi.clone(),
            });
        } else {
            let mut p = CMatrix::zeros(dim, dim);
            for g in 0..n {
                p = p.add(&rep.matrix(g).scaled(chi[g].conj()));
            }
            p = p.scaled(c(1.0 / n as f64, 0.0)).hermitized();
            let eig = hermitian_eigen(&p, 1e-9)?;
            let kept: Vec<usize> =
                (0..dim).filter(|&k| eig.eigenvalues[k] > RANK_EIGENVALUE_THRESHOLD).collect();
            if kept.is_empty() {
                continue;
            }
            let basis = CMatrix::from_fn(dim, kept.len(), |i, j| eig.eigenvectors[(i, kept[j])]);
            blocks.push(IsotypicalBlock {
                label,
                irrep_dim: 1,
                multiplicity: kept.len(),
                projector: p,
                basis,
                character: chi.clone(),
            });
        }
    }
    Ok(IsotypicalDecomposition { dim, blocks })
}

fn is_diagonal(m: &CMatrix) -> bool {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j && m[(i, j)] != Complex64::default() {
                return false;
            }
        }
    }
    true
}

/// Unnormalized group twirl `sum_g U_g M U_g^dagger`. The result commutes
/// with every `U_g`; dividing by `|G|` makes the twirl idempotent.
pub fn group_average(rep: &UnitaryRep, m: &CMatrix) -> Result<CMatrix, IsotypicalError> {
    if m.rows() != rep.dim() || m.cols() != rep.dim() {
        return Err(IsotypicalError::DimensionMismatch { got: m.rows(), dim: rep.dim() });
    }
    let mut out = CMatrix::zeros(rep.dim(), rep.dim());
    for g in 0..rep.group().order() {
        let u = rep.matrix(g);
        out = out.add(&u.mul(m).mul(&u.adjoint()));
    }
    Ok(out)
}

/// Checks whether `m`, moved into decomposed coordinates, has the pattern
/// `diag_mu (I_{d_mu} (x) O_mu)`: zero across blocks, and within each block
/// constant along the irrep index.
pub fn verify_block_form(decomp: &IsotypicalDecomposition, m: &CMatrix, tol: f64) -> Result<BlockFormReport, IsotypicalError> {
    if m.rows() != decomp.dim || m.cols() != decomp.dim {
        return Err(IsotypicalError::DimensionMismatch { got: m.rows(), dim: decomp.dim });
    }
    let total: usize = decomp.blocks.iter().map(|b| b.irrep_dim * b.multiplicity).sum();
    let mut basis = CMatrix::zeros(decomp.dim, total);
    let mut col = 0;
    let mut spans = Vec::new();
    for b in &decomp.blocks {
        let w = b.irrep_dim * b.multiplicity;
        for j in 0..w {
            for i in 0..decomp.dim {
                basis[(i, col + j)] = b.basis[(i, j)];
            }
        }
        spans.push((col, b.irrep_dim, b.multiplicity));
        col += w;
    }
    let transformed = basis.adjoint().mul(m).mul(&basis);

    let mut max_defect = 0.0f64;
    let mut worst = (0, 0);
    let mut record = |d: f64, at: (usize, usize)| {
        if d > max_defect {
            max_defect = d;
            worst = at;
        }
    };

    for (bi, &(off_i, d_i, m_i)) in spans.iter().enumerate() {
        for (bj, &(off_j, d_j, m_j)) in spans.iter().enumerate() {
            if bi != bj {
                for a in 0..d_i * m_i {
                    for b in 0..d_j * m_j {
                        record(transformed[(off_i + a, off_j + b)].norm(), (off_i + a, off_j + b));
                    }
                }
            } else {
                // Within a block, coordinates are (irrep index i, copy a)
                // at offset i * m + a; entries must be delta_ij * O[a][b].
                let mut o = CMatrix::zeros(m_i, m_i.max(1));
                for a in 0..m_i {
                    for b in 0..m_i {
                        let mut avg = Complex64::default();
                        for i in 0..d_i {
                            avg += transformed[(off_i + i * m_i + a, off_i + i * m_i + b)];
                        }
                        o[(a, b)] = avg.scale(1.0 / d_i as f64);
                    }
                }
                for i in 0..d_i {
                    for j in 0..d_i {
                        for a in 0..m_i {
                            for b in 0..m_i {
                                let got = transformed[(off_i + i * m_i + a, off_i + j * m_i + b)];
                                let want = if i == j { o[(a, b)] } else { Complex64::default() };
                                record((got - want).norm(), (off_i + i * m_i + a, off_i + j * m_i + b));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(BlockFormReport { conforms: max_defect <= tol, max_defect, worst_entry: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::outer;

    fn fourier_defect(chi: &[Complex64], psi: &[Complex64], n: usize) -> f64 {
        (0..n).map(|g| (chi[g] * psi[g].conj()).re).sum::<f64>().abs()
    }

    #[test]
    fn character_table_z4() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let chars = abelian_characters(&g).unwrap();
        assert_eq!(chars.len(), 4);
        // Orthogonality of distinct rows, norm |G| on equal rows.
        for a in 0..4 {
            for b in 0..4 {
                let dot: Complex64 = (0..4).map(|g| chars[a][g] * chars[b][g].conj()).sum();
                let want = if a == b { 4.0 } else { 0.0 };
                assert!((dot.norm() - want).abs() < 1e-12);
            }
        }
        // Homomorphism spot check on every pair for every character.
        for chi in &chars {
            for x in 0..4 {
                for y in 0..4 {
                    let defect = (chi[g.mul(x, y)] - chi[x] * chi[y]).norm();
                    assert!(defect < 1e-12);
                }
            }
        }
    }

    #[test]
    fn character_table_klein_four() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let v4 = FiniteGroup::direct_product(&z2, &z2);
        let chars = abelian_characters(&v4).unwrap();
        assert_eq!(chars.len(), 4);
        // All characters of an elementary Abelian 2-group are real signs.
        for chi in &chars {
            for v in chi {
                assert!(v.im.abs() < 1e-12 && (v.re.abs() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trivial_group_has_one_character() {
        let g = FiniteGroup::cyclic(1).unwrap();
        let chars = abelian_characters(&g).unwrap();
        assert_eq!(chars.len(), 1);
        assert_eq!(chars[0][0], c(1.0, 0.0));
    }

    #[test]
    fn decompose_regular_rep_of_z3() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let rep = UnitaryRep::regular_rep(&g);
        let decomp = decompose_abelian(&rep).unwrap();
        assert_eq!(decomp.blocks.len(), 3);
        let total: usize = decomp.blocks.iter().map(|b| b.multiplicity).sum();
        assert_eq!(total, 3);
        for b in &decomp.blocks {
            assert_eq!(b.irrep_dim, 1);
            assert_eq!(b.multiplicity, 1);
            // Projector is idempotent and the basis is an eigenvector of
            // every U_g with eigenvalue chi(g).
            let idem = b.projector.mul(&b.projector).sub(&b.projector).max_abs();
            assert!(idem < 1e-10);
            for x in 0..3 {
                let action = rep.matrix(x).mul(&b.basis).sub(&b.basis.scaled(b.character[x])).max_abs();
                assert!(action < 1e-10);
            }
        }
        // Projectors resolve the identity.
        let sum = decomp.blocks.iter().fold(CMatrix::zeros(3, 3), |acc, b| acc.add(&b.projector));
        assert!(sum.sub(&CMatrix::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn trivial_z2_rep_has_single_block_of_multiplicity_two() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let rep = UnitaryRep::from_matrices(g, vec![CMatrix::identity(2), CMatrix::identity(2)]).unwrap();
        let decomp = decompose_abelian(&rep).unwrap();
        assert_eq!(decomp.blocks.len(), 1);
        assert_eq!(decomp.blocks[0].multiplicity, 2);
        assert_eq!(decomp.blocks[0].label, "chi0");
    }

    #[test]
    fn pauli_z_rep_blocks_are_basis_states() {
        let rep = UnitaryRep::pauli_z_rep(2).unwrap();
        let decomp = decompose_abelian(&rep).unwrap();
        assert_eq!(decomp.blocks.len(), 4);
        for b in &decomp.blocks {
            assert_eq!(b.multiplicity, 1);
            // Basis columns are exact standard basis vectors.
            let col: Vec<Complex64> = (0..4).map(|i| b.basis[(i, 0)]).collect();
            assert_eq!(col.iter().filter(|&&v| v == c(1.0, 0.0)).count(), 1);
            assert_eq!(col.iter().filter(|&&v| v == Complex64::default()).count(), 3);
        }
        // Distinct joint eigenvalue tuples count equals block count.
        let mut tuples: Vec<Vec<i32>> = Vec::new();
        for k in 0..4 {
            let tuple: Vec<i32> = (0..4).map(|x| rep.matrix(x)[(k, k)].re.round() as i32).collect();
            if !tuples.contains(&tuple) {
                tuples.push(tuple);
            }
        }
        assert_eq!(tuples.len(), decomp.blocks.len());
    }

    #[test]
    fn group_average_commutes_and_is_idempotent_after_normalization() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let rep = UnitaryRep::regular_rep(&g);
        let m = CMatrix::from_fn(4, 4, |i, j| c((i * 7 + j) as f64 * 0.1, (i as f64) - (j as f64)));
        let avg = group_average(&rep, &m).unwrap();
        for x in 0..4 {
            let comm = rep.matrix(x).mul(&avg).sub(&avg.mul(rep.matrix(x))).max_abs();
            assert!(comm < 1e-9 * avg.max_abs().max(1.0));
        }
        let rescaled = avg.scaled(c(0.25, 0.0));
        let again = group_average(&rep, &rescaled).unwrap();
        assert!(again.sub(&avg).max_abs() < 1e-9 * avg.max_abs().max(1.0));
    }

    #[test]
    fn group_average_rejects_wrong_dims() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let rep = UnitaryRep::regular_rep(&g);
        assert!(matches!(
            group_average(&rep, &CMatrix::identity(2)),
            Err(IsotypicalError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn block_form_detects_offenders() {
        let rep = UnitaryRep::pauli_z_rep(1).unwrap();
        let decomp = decompose_abelian(&rep).unwrap();
        // Diagonal operators conform; an off-diagonal coupling does not.
        let good = CMatrix::diagonal(&[c(0.3, 0.0), c(-2.0, 0.0)]);
        let report = verify_block_form(&decomp, &good, 1e-10).unwrap();
        assert!(report.conforms);
        let bad = CMatrix::from_rows(&[vec![c(0.3, 0.0), c(0.5, 0.0)], vec![c(0.5, 0.0), c(-2.0, 0.0)]]);
        let report = verify_block_form(&decomp, &bad, 1e-10).unwrap();
        assert!(!report.conforms);
        assert!((report.max_defect - 0.5).abs() < 1e-12);
    }

    #[test]
    fn averaged_projector_conforms_to_block_form() {
        let g = FiniteGroup::cyclic(5).unwrap();
        let rep = UnitaryRep::regular_rep(&g);
        let decomp = decompose_abelian(&rep).unwrap();
        let seed = CMatrix::from_fn(5, 1, |i, _| c(1.0 / (i as f64 + 1.0), 0.3 * i as f64));
        let avg = group_average(&rep, &outer(&seed, &seed)).unwrap();
        let report = verify_block_form(&decomp, &avg, 1e-9 * avg.max_abs()).unwrap();
        assert!(report.conforms, "twirled operator must be block diagonal, defect {}", report.max_defect);
    }

    #[test]
    fn characters_reject_non_abelian() {
        // Symmetric group S_3 via an explicit Cayley table.
        // Elements: e, (12), (13), (23), (123), (132).
        let perms: Vec<[usize; 3]> =
            vec![[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
        let compose = |a: &[usize; 3], b: &[usize; 3]| -> [usize; 3] {
            [a[b[0]], a[b[1]], a[b[2]]]
        };
        let index_of = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let cayley: Vec<Vec<usize>> = perms
            .iter()
            .map(|a| perms.iter().map(|b| index_of(&compose(a, b))).collect())
            .collect();
        let s3 = FiniteGroup::from_cayley(cayley).unwrap();
        assert!(!s3.is_abelian());
        assert!(matches!(abelian_characters(&s3), Err(IsotypicalError::NotAbelian)));
    }

    #[test]
    fn fourier_rows_are_orthogonal_for_z6() {
        let g = FiniteGroup::cyclic(6).unwrap();
        let chars = abelian_characters(&g).unwrap();
        for a in 0..6 {
            for b in (a + 1)..6 {
                assert!(fourier_defect(&chars[a], &chars[b], 6) < 1e-10);
            }
        }
    }
}
