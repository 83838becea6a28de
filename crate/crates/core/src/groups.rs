//! Finite groups as validated Cayley tables, plus unitary representations.
//!
//! Elements are opaque indices `0..order` with the identity pinned at index
//! 0; display names are left to callers. Construction validates the table
//! (Latin square, identity row/column, two-sided inverses) and checks
//! associativity exhaustively for orders up to 24 — the built-in
//! constructors are associative by construction, so the cubic check only
//! guards hand-entered tables of useful size.

use crate::linalg::CMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Largest group order for which `from_cayley` checks associativity
/// exhaustively (cubic cost).
pub const ASSOCIATIVITY_CHECK_CAP: usize = 24;
/// Cap on qubit count for the diagonal sign representation (`2^n` dims).
pub const PAULI_Z_QUBIT_CAP: usize = 10;
/// Entrywise tolerance for unitarity and homomorphism validation.
pub const REP_VALIDATION_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("group order must be positive")]
    InvalidOrder,
    #[error("Cayley table is not square of the declared order")]
    MalformedTable,
    #[error("Cayley row {row} is not a permutation of the elements")]
    NotLatinSquare { row: usize },
    #[error("element 0 is not a two-sided identity")]
    BadIdentity,
    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: usize },
    #[error("associativity fails at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("{qubits} qubits exceeds the cap of {cap}")]
    DimensionTooLarge { qubits: usize, cap: usize },
    #[error("representation needs one matrix per element: got {got}, expected {expected}")]
    WrongMatrixCount { got: usize, expected: usize },
    #[error("matrix for element {element} is not unitary: defect {defect:.3e}")]
    NotUnitary { element: usize, defect: f64 },
    #[error("homomorphism fails at ({g}, {h}): defect {defect:.3e}")]
    NotHomomorphism { g: usize, h: usize, defect: f64 },
}

/// Finite group given by its Cayley table. `cayley[a][b]` is the index of
/// the product `a * b`; index 0 is the identity.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    order: usize,
    cayley: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates and wraps a Cayley table.
    pub fn from_cayley(cayley: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let order = cayley.len();
        if order == 0 {
            return Err(GroupError::InvalidOrder);
        }
        if cayley.iter().any(|row| row.len() != order) || cayley.iter().flatten().any(|&x| x >= order) {
            return Err(GroupError::MalformedTable);
        }
        for (i, row) in cayley.iter().enumerate() {
            let mut seen = vec![false; order];
            for &x in row {
                seen[x] = true;
            }
            if seen.iter().any(|&s| !s) {
                return Err(GroupError::NotLatinSquare { row: i });
            }
            let mut seen_col = vec![false; order];
            for r in &cayley {
                seen_col[r[i]] = true;
            }
            if seen_col.iter().any(|&s| !s) {
                return Err(GroupError::NotLatinSquare { row: i });
            }
        }
        for a in 0..order {
            if cayley[0][a] != a || cayley[a][0] != a {
                return Err(GroupError::BadIdentity);
            }
        }
        let mut inverses = vec![usize::MAX; order];
        for a in 0..order {
            match (0..order).find(|&b| cayley[a][b] == 0 && cayley[b][a] == 0) {
                Some(b) => inverses[a] = b,
                None => return Err(GroupError::NoInverse { element: a }),
            }
        }
        if order <= ASSOCIATIVITY_CHECK_CAP {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if cayley[cayley[a][b]][c] != cayley[a][cayley[b][c]] {
                            return Err(GroupError::NotAssociative { a, b, c });
                        }
                    }
                }
            }
        }
        Ok(FiniteGroup { order, cayley, inverses })
    }

    /// Cyclic group of order `n` with `cayley[a][b] = (a + b) mod n`.
    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidOrder);
        }
        let cayley = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_cayley(cayley)
    }

    /// Direct product with index `(a, b) -> a * |B| + b`.
    pub fn direct_product(lhs: &FiniteGroup, rhs: &FiniteGroup) -> FiniteGroup {
        let (na, nb) = (lhs.order, rhs.order);
        let order = na * nb;
        let mut cayley = vec![vec![0usize; order]; order];
        for a1 in 0..na {
            for b1 in 0..nb {
                for a2 in 0..na {
                    for b2 in 0..nb {
                        cayley[a1 * nb + b1][a2 * nb + b2] = lhs.cayley[a1][a2] * nb + rhs.cayley[b1][b2];
                    }
                }
            }
        }
        let inverses = (0..order).map(|i| lhs.inverses[i / nb] * nb + rhs.inverses[i % nb]).collect();
        FiniteGroup { order, cayley, inverses }
    }

    /// Elementary Abelian 2-group on `n` bits; the element index is the
    /// bitstring and the product is XOR.
    pub fn boolean_cube(n: usize) -> FiniteGroup {
        let order = 1usize << n;
        let cayley = (0..order).map(|a| (0..order).map(|b| a ^ b).collect()).collect();
        let inverses = (0..order).collect();
        FiniteGroup { order, cayley, inverses }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a..self.order).all(|b| self.cayley[a][b] == self.cayley[b][a]))
    }

    /// Smallest k >= 1 with g^k = e.
    pub fn element_order(&self, g: usize) -> usize {
        let mut acc = g;
        let mut k = 1;
        while acc != 0 {
            acc = self.cayley[acc][g];
            k += 1;
        }
        k
    }

    /// Sorted multiset of element orders; equal profiles are a cheap
    /// necessary condition for isomorphism in tests.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut p: Vec<usize> = (0..self.order).map(|g| self.element_order(g)).collect();
        p.sort_unstable();
        p
    }
}

/// Unitary representation: one matrix per group element, validated to be
/// unitary and homomorphic when built from caller input.
#[derive(Debug, Clone)]
pub struct UnitaryRep {
    group: FiniteGroup,
    dim: usize,
    matrices: Vec<CMatrix>,
}

impl UnitaryRep {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &CMatrix {
        &self.matrices[g]
    }

    /// Wraps caller-supplied matrices, checking unitarity of each and the
    /// homomorphism property on all pairs (both within `REP_VALIDATION_TOL`).
    pub fn from_matrices(group: FiniteGroup, matrices: Vec<CMatrix>) -> Result<Self, GroupError> {
        if matrices.len() != group.order() {
            return Err(GroupError::WrongMatrixCount { got: matrices.len(), expected: group.order() });
        }
        let dim = matrices[0].rows();
        for (g, m) in matrices.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(GroupError::WrongMatrixCount { got: m.rows(), expected: dim });
            }
            let defect = m.adjoint().mul(m).sub(&CMatrix::identity(dim)).max_abs();
            if defect > REP_VALIDATION_TOL {
                return Err(GroupError::NotUnitary { element: g, defect });
            }
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                let gh = group.mul(g, h);
                let defect = matrices[g].mul(&matrices[h]).sub(&matrices[gh]).max_abs();
                if defect > REP_VALIDATION_TOL {
                    return Err(GroupError::NotHomomorphism { g, h, defect });
                }
            }
        }
        Ok(UnitaryRep { group, dim, matrices })
    }

    /// Diagonal sign action of the Boolean cube on `n` qubits: element `x`
    /// acts on basis state `k` by `(-1)^{popcount(x & k)}`.
    pub fn pauli_z_rep(n: usize) -> Result<Self, GroupError> {
        if n == 0 || n > PAULI_Z_QUBIT_CAP {
            return Err(GroupError::DimensionTooLarge { qubits: n, cap: PAULI_Z_QUBIT_CAP });
        }
        let dim = 1usize << n;
        let group = FiniteGroup::boolean_cube(n);
        let matrices = (0..dim)
            .map(|x| {
                CMatrix::diagonal(
                    &(0..dim)
                        .map(|k| {
                            let sign = if (x & k).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                            Complex64::new(sign, 0.0)
                        })
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        Ok(UnitaryRep { group, dim, matrices })
    }

    /// Left regular representation: permutation matrices from the Cayley
    /// table. Faithful, and for Abelian groups multiplicity-free (every
    /// character appears exactly once).
    pub fn regular_rep(group: &FiniteGroup) -> Self {
        let n = group.order();
        let matrices = (0..n)
            .map(|g| {
                let mut m = CMatrix::zeros(n, n);
                for h in 0..n {
                    m[(group.mul(g, h), h)] = Complex64::new(1.0, 0.0);
                }
                m
            })
            .collect();
        UnitaryRep { group: group.clone(), dim: n, matrices }
    }
}
