//! Invariance tests, bases of homogeneous invariants, transfers and the
//! degree-bounded separating set.

use std::collections::HashMap;

use thiserror::Error;

use crate::group::FiniteMatrixGroup;
use crate::linalg::{Echelon, SparseVec};
use crate::mpoly::{Monomial, PolyError, Polynomial, Ring};

/// Bound on the number of monomials in one degree.
pub const MONOMIAL_CAP: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("degree {degree} has {count} monomials, above the cap {cap}")]
    SizeCap { degree: u32, count: u64, cap: u64 },
    #[error("ring has {found} variables but the group acts on dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ring field differs from the group field")]
    FieldMismatch,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Basis of the invariants of one degree, in reduced echelon form over the
/// monomial coordinates (descending leading monomials).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantBasis {
    pub degree: u32,
    pub basis: Vec<Polynomial>,
}

impl InvariantBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn check_ring(g: &FiniteMatrixGroup, ring: &Ring) -> Result<(), InvariantError> {
    if ring.nvars() != g.dim() {
        return Err(InvariantError::DimensionMismatch { expected: g.dim(), found: ring.nvars() });
    }
    if **ring.field() != **g.field() {
        return Err(InvariantError::FieldMismatch);
    }
    Ok(())
}

/// True iff every generator fixes `f`.
pub fn is_invariant(g: &FiniteMatrixGroup, f: &Polynomial) -> Result<bool, InvariantError> {
    check_ring(g, f.ring())?;
    Ok(g.fixes(f)?)
}

/// Invariants of degree `d`: the common kernel of `act(s) - 1` over the
/// generators `s`, in monomial coordinates.
pub fn invariant_basis(g: &FiniteMatrixGroup, ring: &Ring, d: u32) -> Result<InvariantBasis, InvariantError> {
    check_ring(g, ring)?;
    let count = ring.count_monomials_of_degree(d);
    if count > MONOMIAL_CAP {
        return Err(InvariantError::SizeCap { degree: d, count, cap: MONOMIAL_CAP });
    }
    let monos = ring.monomials_of_degree(d);
    let basis = fixed_vectors(g, ring, &monos)?
        .into_iter()
        .map(|v| Polynomial::from_terms(ring, v.into_iter().map(|(i, c)| (monos[i as usize], c))))
        .collect();
    Ok(InvariantBasis { degree: d, basis })
}

/// Reduced echelon basis of the fixed vectors in the span of `monos`, a
/// `G`-stable set of monomials; indices refer to `monos`.
fn fixed_vectors(g: &FiniteMatrixGroup, ring: &Ring, monos: &[Monomial]) -> Result<Vec<SparseVec>, InvariantError> {
    let field = ring.field();
    let position: HashMap<Monomial, u32> = monos.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect();
    let n = monos.len() as u32;
    // Column m of the stacked map: (s_k·m - m) in block k.
    let mut columns = Echelon::new(field, true);
    for m in monos {
        let mono = Polynomial::monomial(ring, *m, 1);
        let mut col: Vec<(u32, u32)> = Vec::new();
        for (k, &s) in g.generators().iter().enumerate() {
            let diff = g.act(s, &mono)?.sub(&mono);
            col.extend(diff.terms().iter().map(|(t, c)| (k as u32 * n + position[t], *c)));
        }
        col.sort_unstable();
        columns.insert(col);
    }
    let mut kernel = Echelon::new(field, false);
    for v in columns.kernel() {
        kernel.insert(v.clone());
    }
    Ok(kernel.reduced_rows())
}

/// `Σ_{g∈G} g·f`.
pub fn transfer(g: &FiniteMatrixGroup, f: &Polynomial) -> Result<Polynomial, InvariantError> {
    check_ring(g, f.ring())?;
    let mut total = Polynomial::zero(f.ring());
    for x in 0..g.order() {
        total = total.add(&g.act(x, f)?);
    }
    Ok(total)
}

/// All invariants of degrees `1..=|G|`, degree by degree.
pub fn noether_separating_set(g: &FiniteMatrixGroup, ring: &Ring) -> Result<Vec<Polynomial>, InvariantError> {
    let top = g.order() as u32;
    let count = ring.count_monomials_of_degree(top);
    if count > MONOMIAL_CAP {
        return Err(InvariantError::SizeCap { degree: top, count, cap: MONOMIAL_CAP });
    }
    let mut out = Vec::new();
    for d in 1..=top {
        out.extend(invariant_basis(g, ring, d)?.basis);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;
    use crate::group::fixtures::*;
    use crate::group::Group;
    use crate::linalg::Matrix;
    use crate::mpoly::PolyRing;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn ring_for(g: &Group) -> Ring {
        let names: Vec<String> = (1..=g.dim()).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        PolyRing::new(g.field(), &refs).unwrap()
    }

    #[test]
    fn c4_examples() {
        let g = c4_perm();
        let r = ring_for(&g);
        assert!(is_invariant(&g, &r.parse("x1*x2*x3*x4").unwrap()).unwrap());
        assert!(!is_invariant(&g, &r.parse("x1").unwrap()).unwrap());
        let b1 = invariant_basis(&g, &r, 1).unwrap();
        assert_eq!(b1.basis, vec![r.parse("x1+x2+x3+x4").unwrap()]);
        assert_eq!(invariant_basis(&g, &r, 2).unwrap().dim(), 3);
        assert_eq!(transfer(&g, &r.parse("x1").unwrap()).unwrap(), r.parse("x1+x2+x3+x4").unwrap());
        let c4 = r.parse("x1*x2*x3*x4").unwrap();
        assert!(transfer(&g, &c4).unwrap().is_zero());
    }

    #[test]
    fn scalar_action_over_f5() {
        let g = c4_scalar5();
        let r = PolyRing::new(g.field(), &["x", "y"]).unwrap();
        for d in 1..4 {
            assert_eq!(invariant_basis(&g, &r, d).unwrap().dim(), 0);
        }
        let b4 = invariant_basis(&g, &r, 4).unwrap();
        assert_eq!(b4.dim(), 5);
        assert_eq!(b4.basis, r.monomials_of_degree(4).into_iter().map(|m| Polynomial::monomial(&r, m, 1)).collect::<Vec<_>>());
        assert_eq!(noether_separating_set(&g, &r).unwrap(), b4.basis);
    }

    #[test]
    fn trivial_group() {
        let g = trivial(3, 1);
        let r = ring_for(&g);
        assert_eq!(noether_separating_set(&g, &r).unwrap(), vec![r.parse("x1").unwrap()]);
        let f = r.parse("2*x1^2").unwrap();
        assert!(is_invariant(&g, &f).unwrap());
        assert_eq!(transfer(&g, &f).unwrap(), f);
        let g3 = trivial(2, 3);
        let r3 = ring_for(&g3);
        assert_eq!(invariant_basis(&g3, &r3, 3).unwrap().dim(), 10);
    }

    #[test]
    fn ring_checks() {
        let g = c4_perm();
        let r = PolyRing::new(g.field(), &["a", "b"]).unwrap();
        assert_eq!(invariant_basis(&g, &r, 1).unwrap_err(), InvariantError::DimensionMismatch { expected: 4, found: 2 });
        let r3 = PolyRing::new(&FieldCtx::prime(3).unwrap(), &["a", "b", "c", "d"]).unwrap();
        assert_eq!(invariant_basis(&g, &r3, 1).unwrap_err(), InvariantError::FieldMismatch);
        let big = trivial(2, 16);
        let rb = ring_for(&big);
        assert!(matches!(invariant_basis(&big, &rb, 8), Err(InvariantError::SizeCap { .. })));
    }

    #[test]
    fn klein_invariants_of_degree_four() {
        let g = klein();
        let r = ring_for(&g);
        let b = invariant_basis(&g, &r, 4).unwrap();
        for f in &b.basis {
            assert!(is_invariant(&g, f).unwrap());
        }
        let a4 = r
            .parse("x1^4 + x1^2*x3^2 + x1^2*x3*x4 + x1*x3^2*x4 + x1*x3*x4^2 + x1*x3*x4*x5 + x1*x4^3 + x2^2*x3^2 + x2*x3^2*x5 + x2*x3*x4^2")
            .unwrap();
        assert!(is_invariant(&g, &a4).unwrap());
        // a4 lies in the computed span.
        let f = g.field().clone();
        let mut span = Echelon::new(&f, false);
        let monos = r.monomials_of_degree(4);
        let coords = |p: &Polynomial| -> SparseVec {
            let mut v: SparseVec = p.terms().iter().map(|(m, c)| (monos.iter().position(|x| x == m).unwrap() as u32, *c)).collect();
            v.sort_unstable();
            v
        };
        for p in &b.basis {
            span.insert(coords(p));
        }
        assert!(span.contains(&coords(&a4)));
    }

    /// Monomial orbit count under a permutation group, by direct permutation
    /// of exponent vectors.
    fn monomial_orbits(g: &Group, monos: &[Monomial]) -> usize {
        let perms: Vec<Vec<usize>> = g
            .elements()
            .iter()
            .map(|e| (0..g.dim()).map(|i| (0..g.dim()).find(|&j| e.matrix().get(j, i) == 1).unwrap()).collect())
            .collect();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut orbits = 0;
        for m in monos {
            let e: Vec<u32> = (0..g.dim()).map(|i| m.exp(i) as u32).collect();
            if seen.contains(&e) {
                continue;
            }
            orbits += 1;
            for p in &perms {
                let mut img = vec![0; g.dim()];
                for i in 0..g.dim() {
                    img[p[i]] = e[i];
                }
                seen.insert(img);
            }
        }
        orbits
    }

    proptest! {
        #[test]
        fn transfer_is_invariant(raw in proptest::collection::vec((proptest::collection::vec(0u32..3, 5), 1u32..2), 0..6)) {
            let g = klein();
            let r = ring_for(&g);
            let f = Polynomial::from_terms(&r, raw.iter().map(|(e, c)| (Monomial::from_exponents(e).unwrap(), *c)));
            prop_assert!(is_invariant(&g, &transfer(&g, &f).unwrap()).unwrap());
        }

        #[test]
        fn permutation_invariants_count_monomial_orbits(p in prop::sample::select(vec![2u64, 3, 5]),
                                                         which in 0usize..3, d in 0u32..5) {
            let f = FieldCtx::prime(p).unwrap();
            let gens: Vec<Vec<Vec<usize>>> = vec![
                vec![vec![1, 2, 3, 0]],
                vec![vec![1, 0, 2, 3], vec![0, 1, 3, 2]],
                vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0]],
            ];
            let mats: Vec<Matrix> = gens[which].iter().map(|im| perm_matrix(&f, im)).collect();
            let g = FiniteMatrixGroup::enumerate(&f, 4, &mats, &[], None).unwrap();
            let r = ring_for(&g);
            let monos = r.monomials_of_degree(d);
            prop_assert_eq!(invariant_basis(&g, &r, d).unwrap().dim(), monomial_orbits(&g, &monos));
        }
    }
}
