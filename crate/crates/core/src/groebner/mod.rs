//! Ideals and Gröbner bases: membership, radical membership, elimination,
//! intersection, quotients, Krull dimension and Hilbert numerators.

mod buchberger;
mod hilbert;

use std::fmt;

use thiserror::Error;

pub use hilbert::hilbert_numerator;

use crate::mpoly::{same_ring, Monomial, MonomialOrder, PolyError, PolyRing, Polynomial, Ring};
use buchberger::Reducer;

/// Default bound on the sugar degree of processed S-pairs.
pub const DEFAULT_DEGREE_CAP: u32 = 40;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GbStats {
    pub pairs_processed: usize,
    pub pairs_discarded: usize,
    pub zero_reductions: usize,
    pub max_sugar: u32,
}

impl fmt::Display for GbStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pairs processed {}, discarded by criteria {}, reduced to zero {}, max degree {}",
            self.pairs_processed, self.pairs_discarded, self.zero_reductions, self.max_sugar
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GbError {
    /// The computation stopped; nothing computed so far may be used as a result.
    #[error("degree cap {cap} exceeded (next S-pair has degree {degree}, partial basis of {partial_basis_size} elements)")]
    DegreeCapExceeded { cap: u32, degree: u32, partial_basis_size: usize, stats: GbStats },
    #[error("polynomial and basis use different monomial orders")]
    OrderMismatch,
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error("the ideal is the whole ring")]
    UnitIdeal,
    #[error("quotient by the zero polynomial")]
    ZeroDivisorQuery,
    #[error("elimination of {k} variables from a ring with {n}")]
    BadElimination { k: usize, n: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl GbError {
    pub fn is_cap(&self) -> bool {
        matches!(self, GbError::DegreeCapExceeded { .. })
    }
}

fn resolve_cap(cap: Option<u32>) -> u32 {
    cap.unwrap_or(DEFAULT_DEGREE_CAP)
}

/// A finitely generated ideal.
#[derive(Clone, Debug)]
pub struct Ideal {
    ring: Ring,
    gens: Vec<Polynomial>,
}

impl Ideal {
    pub fn new(ring: &Ring, gens: Vec<Polynomial>) -> Result<Self, GbError> {
        if gens.iter().any(|g| !same_ring(g.ring(), ring)) {
            return Err(GbError::RingMismatch);
        }
        Ok(Ideal { ring: ring.clone(), gens })
    }

    pub fn zero(ring: &Ring) -> Self {
        Ideal { ring: ring.clone(), gens: Vec::new() }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn is_homogeneous(&self) -> bool {
        self.gens.iter().all(Polynomial::is_homogeneous)
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.gens.iter().map(ToString::to_string).collect();
        write!(f, "({})", g.join(", "))
    }
}

/// Reduced Gröbner basis: monic, no leading monomial divides another, tails
/// fully reduced, sorted by descending leading monomial.
pub struct GroebnerBasis {
    ring: Ring,
    reducers: Vec<Reducer>,
    stats: GbStats,
}

impl fmt::Debug for GroebnerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.reducers.iter().map(|r| r.poly.to_string()).collect();
        write!(f, "{{{}}}", b.join(", "))
    }
}

impl GroebnerBasis {
    /// The ring of the basis; its order is the order of the basis.
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> MonomialOrder {
        self.ring.order()
    }

    pub fn stats(&self) -> GbStats {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.reducers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reducers.is_empty()
    }

    pub fn basis(&self) -> impl Iterator<Item = &Polynomial> {
        self.reducers.iter().map(|r| &r.poly)
    }

    pub fn to_vec(&self) -> Vec<Polynomial> {
        self.basis().cloned().collect()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.reducers.iter().map(|r| r.lm).collect()
    }

    pub fn is_unit(&self) -> bool {
        self.reducers.len() == 1 && self.reducers[0].poly.is_constant()
    }

    pub fn ideal(&self) -> Ideal {
        Ideal { ring: self.ring.clone(), gens: self.to_vec() }
    }

    fn check(&self, f: &Polynomial) -> Result<(), GbError> {
        if same_ring(f.ring(), &self.ring) {
            Ok(())
        } else if f.ring().variables() == self.ring.variables() && f.ring().weights() == self.ring.weights() {
            Err(GbError::OrderMismatch)
        } else {
            Err(GbError::RingMismatch)
        }
    }

    /// Remainder of full division; zero iff `f` lies in the ideal.
    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial, GbError> {
        self.check(f)?;
        let reducers: Vec<(&Reducer, u32)> = self.reducers.iter().map(|r| (r, 0)).collect();
        Ok(buchberger::reduce_with(&self.ring, f, 0, &reducers).0)
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool, GbError> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// True if every monomial of `f` is standard (divisible by no leading monomial).
    pub fn is_reduced(&self, f: &Polynomial) -> bool {
        f.terms().iter().all(|(m, _)| !self.reducers.iter().any(|r| r.lm.divides(m)))
    }
}

impl fmt::Display for GroebnerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Reduced Gröbner basis of `ideal` under `order` (in a copy of the ring
/// carrying that order). `degree_cap` defaults to [`DEFAULT_DEGREE_CAP`].
pub fn buchberger(ideal: &Ideal, order: MonomialOrder, degree_cap: Option<u32>) -> Result<GroebnerBasis, GbError> {
    let ring = if ideal.ring.order() == order { ideal.ring.clone() } else { ideal.ring.with_order(order) };
    let gens: Vec<Polynomial> = ideal.gens.iter().map(|g| g.reorder(&ring)).collect();
    let (basis, stats) = buchberger::run(&ring, &gens, resolve_cap(degree_cap))?;
    Ok(GroebnerBasis { ring, reducers: basis.into_iter().map(Reducer::new).collect(), stats })
}

/// Gröbner basis under the ideal ring's own order.
pub fn groebner(ideal: &Ideal, degree_cap: Option<u32>) -> Result<GroebnerBasis, GbError> {
    buchberger(ideal, ideal.ring.order(), degree_cap)
}

pub fn normal_form(f: &Polynomial, gb: &GroebnerBasis) -> Result<Polynomial, GbError> {
    gb.normal_form(f)
}

/// A variable name starting with the reserved prefix that `ring` does not use.
pub(crate) fn fresh_name(ring: &PolyRing, stem: &str) -> String {
    (0..)
        .map(|k| if k == 0 { stem.to_string() } else { format!("{stem}{k}") })
        .find(|n| ring.var_index(n).is_none())
        .expect("unbounded supply of names")
}

/// Ring with one extra variable of weight 1 appended (`last`) or prepended.
fn extend_ring(ring: &Ring, name: String, last: bool, order: MonomialOrder) -> Result<(Ring, Vec<usize>), GbError> {
    let n = ring.nvars();
    let mut vars = ring.variables().to_vec();
    let mut weights = ring.weights().to_vec();
    let map: Vec<usize> = if last {
        vars.push(name);
        weights.push(1);
        (0..n).collect()
    } else {
        vars.insert(0, name);
        weights.insert(0, 1);
        (1..=n).collect()
    };
    Ok((PolyRing::internal(ring.field(), vars, order, weights)?, map))
}

/// Decides `f ∈ √I` with a cached Gröbner basis of `I` for quick positive
/// answers and the Rabinowitsch trick as the decision procedure.
pub struct RadicalTester {
    ideal: Ideal,
    cap: Option<u32>,
    gb: Option<GroebnerBasis>,
}

impl RadicalTester {
    pub fn new(ideal: Ideal, degree_cap: Option<u32>) -> Self {
        RadicalTester { ideal, cap: degree_cap, gb: None }
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn contains(&mut self, f: &Polynomial) -> Result<bool, GbError> {
        if !same_ring(f.ring(), &self.ideal.ring) {
            return Err(GbError::RingMismatch);
        }
        if f.is_zero() {
            return Ok(true);
        }
        if self.ideal.is_homogeneous() {
            if self.gb.is_none() {
                self.gb = Some(groebner(&self.ideal, self.cap)?);
            }
            let gb = self.gb.as_ref().expect("just computed");
            if gb.is_unit() {
                return Ok(true);
            }
            // f^{p^j} ∈ I already certifies f ∈ √I.
            let deg = f.degree().unwrap_or(0).max(1);
            let p = f.field().characteristic() as u64;
            let mut j = 0;
            while j <= 3 && deg as u64 * p.pow(j) <= 256 {
                let g = f.frobenius_power(j)?.reorder(gb.ring());
                if gb.contains(&g)? {
                    return Ok(true);
                }
                j += 1;
            }
        }
        rabinowitsch(f, &self.ideal, self.cap)
    }
}

fn rabinowitsch(f: &Polynomial, ideal: &Ideal, cap: Option<u32>) -> Result<bool, GbError> {
    let ring = &ideal.ring;
    let name = fresh_name(ring, "Taux");
    let (big, map) = extend_ring(ring, name, true, MonomialOrder::Grevlex)?;
    let t = Polynomial::var(&big, ring.nvars());
    let mut gens = ideal.gens.iter().map(|g| g.map_vars(&big, &map)).collect::<Result<Vec<_>, _>>()?;
    let ft = f.map_vars(&big, &map)?.checked_mul(&t)?;
    gens.push(Polynomial::one(&big).sub(&ft));
    let gb = groebner(&Ideal { ring: big, gens }, cap)?;
    Ok(gb.is_unit())
}

/// `f ∈ √I`, i.e. `f` vanishes on the zero set of `I` over the algebraic closure.
pub fn radical_member(f: &Polynomial, ideal: &Ideal, degree_cap: Option<u32>) -> Result<bool, GbError> {
    RadicalTester::new(ideal.clone(), degree_cap).contains(f)
}

/// Ring of the last `n - k` variables of `ring`.
pub fn subring_without_first(ring: &Ring, k: usize) -> Result<Ring, GbError> {
    let n = ring.nvars();
    if k > n {
        return Err(GbError::BadElimination { k, n });
    }
    let order = match ring.order() {
        MonomialOrder::Lex => MonomialOrder::Lex,
        _ => MonomialOrder::Grevlex,
    };
    Ok(PolyRing::internal(ring.field(), ring.variables()[k..].to_vec(), order, ring.weights()[k..].to_vec())?)
}

/// `I ∩ k[x_{k+1},…,x_n]`, expressed in the subring of the last `n - k` variables.
pub fn eliminate(ideal: &Ideal, k: usize, degree_cap: Option<u32>) -> Result<Ideal, GbError> {
    let sub = subring_without_first(&ideal.ring, k)?;
    let gb = buchberger(ideal, MonomialOrder::Elim(k), degree_cap)?;
    let low_mask = (1u32 << k) - 1;
    let n = ideal.ring.nvars();
    let map: Vec<usize> = (0..n).map(|i| i.saturating_sub(k)).collect();
    let gens = gb
        .basis()
        .filter(|g| g.support_mask() & low_mask == 0)
        .map(|g| g.map_vars(&sub, &map))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Ideal { ring: sub, gens })
}

/// `I ∩ J`, via `t·I + (1-t)·J` and elimination of `t`.
pub fn intersect(i: &Ideal, j: &Ideal, degree_cap: Option<u32>) -> Result<Ideal, GbError> {
    if !same_ring(&i.ring, &j.ring) {
        return Err(GbError::RingMismatch);
    }
    let ring = &i.ring;
    let name = fresh_name(ring, "Tint");
    let (big, map) = extend_ring(ring, name, false, MonomialOrder::Elim(1))?;
    let t = Polynomial::var(&big, 0);
    let one_minus_t = Polynomial::one(&big).sub(&t);
    let mut gens = Vec::with_capacity(i.gens.len() + j.gens.len());
    for g in &i.gens {
        gens.push(g.map_vars(&big, &map)?.checked_mul(&t)?);
    }
    for g in &j.gens {
        gens.push(g.map_vars(&big, &map)?.checked_mul(&one_minus_t)?);
    }
    let elim = eliminate(&Ideal { ring: big, gens }, 1, degree_cap)?;
    let ident: Vec<usize> = (0..ring.nvars()).collect();
    let gens = elim.gens.iter().map(|g| g.map_vars(ring, &ident)).collect::<Result<Vec<_>, _>>()?;
    Ok(Ideal { ring: ring.clone(), gens })
}

/// `(I : f) = {g : g·f ∈ I}`.
pub fn quotient(ideal: &Ideal, f: &Polynomial, degree_cap: Option<u32>) -> Result<Ideal, GbError> {
    if f.is_zero() {
        return Err(GbError::ZeroDivisorQuery);
    }
    if !same_ring(f.ring(), &ideal.ring) {
        return Err(GbError::RingMismatch);
    }
    let principal = Ideal { ring: ideal.ring.clone(), gens: vec![f.clone()] };
    let meet = intersect(ideal, &principal, degree_cap)?;
    let gens = meet
        .gens
        .iter()
        .map(|h| h.exact_div(f).expect("elements of (f) are divisible by f"))
        .collect();
    Ok(Ideal { ring: ideal.ring.clone(), gens })
}

/// Dimension of `R/I`: the largest set of variables containing the support
/// of no leading monomial.
pub fn krull_dimension(gb: &GroebnerBasis) -> Result<usize, GbError> {
    if gb.is_unit() {
        return Err(GbError::UnitIdeal);
    }
    Ok(dimension_of_monomial_ideal(&gb.leading_monomials(), gb.ring.nvars()))
}

/// Dimension of `k[x_1..x_n]/(monomials)`; the monomials must not include 1.
pub fn dimension_of_monomial_ideal(monomials: &[Monomial], n: usize) -> usize {
    let masks: Vec<u32> = monomials.iter().map(Monomial::support_mask).collect();
    (0u32..(1u32 << n))
        .filter(|s| masks.iter().all(|m| m & !s != 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;
    use proptest::prelude::*;

    fn ring(p: u64, vars: &[&str]) -> Ring {
        PolyRing::new(&FieldCtx::prime(p).unwrap(), vars).unwrap()
    }

    fn ideal(r: &Ring, gens: &[&str]) -> Ideal {
        Ideal::new(r, gens.iter().map(|g| r.parse(g).unwrap()).collect()).unwrap()
    }

    /// Textbook Buchberger without criteria, followed by reduction: an
    /// independent oracle for the optimized engine.
    fn naive_gb(r: &Ring, gens: &[Polynomial]) -> Vec<Polynomial> {
        fn divide(f: &Polynomial, g: &[Polynomial]) -> Polynomial {
            let fld = f.field().clone();
            let mut p = f.clone();
            let mut rem = Polynomial::zero(f.ring());
            while let Some(&(m, c)) = p.terms().first() {
                if let Some(d) = g.iter().find(|d| d.leading_monomial().unwrap().divides(&m)) {
                    let q = m.div(d.leading_monomial().unwrap()).unwrap();
                    let k = fld.div(c, d.leading_coefficient().unwrap()).unwrap();
                    p = p.sub(&d.mul_term(&q, k));
                } else {
                    let lt = Polynomial::monomial(f.ring(), m, c);
                    rem = rem.add(&lt);
                    p = p.sub(&lt);
                }
            }
            rem
        }
        let mut g: Vec<Polynomial> = gens.iter().filter(|x| !x.is_zero()).cloned().collect();
        loop {
            let mut added = false;
            let snapshot = g.clone();
            for a in 0..snapshot.len() {
                for b in a + 1..snapshot.len() {
                    let (fa, fb) = (&snapshot[a], &snapshot[b]);
                    let l = fa.leading_monomial().unwrap().lcm(fb.leading_monomial().unwrap());
                    let fld = r.field();
                    let sa = fa.mul_term(&l.div(fa.leading_monomial().unwrap()).unwrap(), fld.inv(fa.leading_coefficient().unwrap()).unwrap());
                    let sb = fb.mul_term(&l.div(fb.leading_monomial().unwrap()).unwrap(), fld.inv(fb.leading_coefficient().unwrap()).unwrap());
                    let h = divide(&sa.sub(&sb), &g);
                    if !h.is_zero() {
                        g.push(h);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        // Minimalize, then reduce.
        let mut min: Vec<Polynomial> = Vec::new();
        for (i, x) in g.iter().enumerate() {
            let lx = x.leading_monomial().unwrap();
            let redundant = g.iter().enumerate().any(|(j, y)| {
                let ly = y.leading_monomial().unwrap();
                j != i && ly.divides(lx) && (ly != lx || j < i)
            });
            if !redundant {
                min.push(x.monic());
            }
        }
        let mut out: Vec<Polynomial> = (0..min.len())
            .map(|i| {
                let others: Vec<Polynomial> = min.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, y)| y.clone()).collect();
                divide(&min[i], &others)
            })
            .collect();
        if out.iter().any(Polynomial::is_constant) {
            return vec![Polynomial::one(r)];
        }
        out.sort_by(|a, b| r.cmp(b.leading_monomial().unwrap(), a.leading_monomial().unwrap()));
        out
    }

    #[test]
    fn worked_examples() {
        let r = ring(2, &["x", "y"]);
        let gb = groebner(&ideal(&r, &["x", "y"]), None).unwrap();
        assert_eq!(format!("{gb}"), "{x, y}");
        assert!(groebner(&Ideal::zero(&r), None).unwrap().is_empty());

        let r5 = ring(5, &["x", "y"]);
        let i = ideal(&r5, &["x^2-y", "x^3"]);
        let gb = groebner(&i, None).unwrap();
        assert_eq!(gb.to_vec(), naive_gb(&r5, i.gens()));
        assert_eq!(format!("{gb}"), "{x^2 + 4*y, x*y, y^2}");
    }

    #[test]
    fn normal_forms() {
        let r = ring(5, &["x", "y"]);
        let gb = groebner(&ideal(&r, &["x^4", "x^3*y"]), None).unwrap();
        assert_eq!(gb.normal_form(&r.parse("y^4").unwrap()).unwrap(), r.parse("y^4").unwrap());
        let gb2 = groebner(&ideal(&r, &["x^4", "y^4"]), None).unwrap();
        assert!(gb2.normal_form(&r.parse("x^4*y^4").unwrap()).unwrap().is_zero());
        let lex = r.with_order(MonomialOrder::Lex);
        let f = r.parse("x").unwrap().reorder(&lex);
        assert_eq!(gb2.normal_form(&f), Err(GbError::OrderMismatch));
    }

    #[test]
    fn radical_membership() {
        let r = ring(2, &["x", "y"]);
        assert!(radical_member(&r.parse("x").unwrap(), &ideal(&r, &["x^2"]), None).unwrap());
        assert!(!radical_member(&r.parse("y").unwrap(), &ideal(&r, &["x"]), None).unwrap());
        assert!(radical_member(&r.parse("x+y").unwrap(), &ideal(&r, &["x^2", "y^2"]), None).unwrap());
        // Non-homogeneous ideal exercises the Rabinowitsch path only.
        assert!(radical_member(&r.parse("x+1").unwrap(), &ideal(&r, &["x^2+1"]), None).unwrap());
        assert!(!radical_member(&r.parse("x").unwrap(), &ideal(&r, &["x^2+1"]), None).unwrap());
        let r3 = ring(3, &["x", "y"]);
        assert!(radical_member(&r3.parse("x*y").unwrap(), &ideal(&r3, &["x^2*y", "x*y^2+x^3"]), None).unwrap());
    }

    #[test]
    fn elimination() {
        let f = FieldCtx::prime(7).unwrap();
        let r = PolyRing::internal(&f, vec!["x".into(), "T1".into(), "T2".into()], MonomialOrder::Grevlex, vec![1, 2, 3]).unwrap();
        let cusp = eliminate(&ideal(&r, &["T1-x^2", "T2-x^3"]), 1, None).unwrap();
        assert_eq!(cusp.gens().len(), 1);
        assert_eq!(cusp.gens()[0].monic(), cusp.ring().parse("T1^3-T2^2").unwrap().monic());
        let r1 = PolyRing::internal(&f, vec!["x".into(), "T".into()], MonomialOrder::Grevlex, vec![1, 2]).unwrap();
        assert!(eliminate(&ideal(&r1, &["T-x^2"]), 1, None).unwrap().gens().is_empty());
        let rx = ring(7, &["x"]);
        assert!(eliminate(&ideal(&rx, &["x"]), 1, None).unwrap().gens().is_empty());
        assert!(matches!(eliminate(&ideal(&rx, &["x"]), 2, None), Err(GbError::BadElimination { .. })));
    }

    #[test]
    fn intersections_and_quotients() {
        let r = ring(2, &["x", "y"]);
        let m = |i: &Ideal| groebner(i, None).unwrap().to_vec();
        assert_eq!(m(&intersect(&ideal(&r, &["x"]), &ideal(&r, &["y"]), None).unwrap()), vec![r.parse("x*y").unwrap()]);
        assert_eq!(
            m(&intersect(&ideal(&r, &["x", "y"]), &ideal(&r, &["x", "y"]), None).unwrap()),
            vec![r.parse("x").unwrap(), r.parse("y").unwrap()]
        );
        assert_eq!(
            m(&intersect(&ideal(&r, &["x"]), &ideal(&r, &["x+y"]), None).unwrap()),
            vec![r.parse("x^2+x*y").unwrap()]
        );
        let x = r.parse("x").unwrap();
        assert_eq!(m(&quotient(&ideal(&r, &["x^2"]), &x, None).unwrap()), vec![x.clone()]);
        assert_eq!(m(&quotient(&ideal(&r, &["x*y"]), &x, None).unwrap()), vec![r.parse("y").unwrap()]);
        assert_eq!(quotient(&ideal(&r, &["x"]), &Polynomial::zero(&r), None).unwrap_err(), GbError::ZeroDivisorQuery);
    }

    #[test]
    fn dimensions() {
        let r4 = ring(2, &["x1", "x2", "x3", "x4"]);
        assert_eq!(krull_dimension(&groebner(&Ideal::zero(&r4), None).unwrap()).unwrap(), 4);
        let c = ideal(&r4, &["x1+x2+x3+x4", "x1*x3+x2*x4", "x1*x2+x2*x3+x3*x4+x1*x4", "x1*x2*x3*x4"]);
        assert_eq!(krull_dimension(&groebner(&c, None).unwrap()).unwrap(), 0);
        let r2 = ring(2, &["x1", "x2"]);
        assert_eq!(krull_dimension(&groebner(&ideal(&r2, &["x1*x2"]), None).unwrap()).unwrap(), 1);
        assert_eq!(krull_dimension(&groebner(&ideal(&r2, &["x1+1", "x1"]), None).unwrap()), Err(GbError::UnitIdeal));
    }

    #[test]
    fn degree_cap_is_reported() {
        let r = ring(3, &["x", "y", "z"]);
        let i = ideal(&r, &["x^2 - y", "x*y - z"]);
        let err = groebner(&i, Some(2)).unwrap_err();
        assert!(err.is_cap());
    }

    fn arb_ideal() -> impl Strategy<Value = Vec<Vec<(Vec<u32>, u32)>>> {
        proptest::collection::vec(proptest::collection::vec((proptest::collection::vec(0u32..3, 3), 1u32..3), 1..4), 1..4)
    }

    fn build(r: &Ring, raw: &[Vec<(Vec<u32>, u32)>]) -> Ideal {
        let gens = raw
            .iter()
            .map(|ts| Polynomial::from_terms(r, ts.iter().map(|(e, c)| (Monomial::from_exponents(e).unwrap(), c % r.field().order()))))
            .collect();
        Ideal::new(r, gens).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn engine_matches_naive_oracle(raw in arb_ideal(), lex in any::<bool>()) {
            let r = ring(3, &["a", "b", "c"]);
            let r = if lex { r.with_order(MonomialOrder::Lex) } else { r };
            let i = build(&r, &raw);
            let gb = groebner(&i, Some(u32::MAX)).unwrap();
            prop_assert_eq!(gb.to_vec(), naive_gb(&r, i.gens()));
        }

        #[test]
        fn buchberger_is_idempotent(raw in arb_ideal()) {
            let r = ring(2, &["a", "b", "c"]);
            let gb = groebner(&build(&r, &raw), Some(u32::MAX)).unwrap();
            let again = groebner(&gb.ideal(), Some(u32::MAX)).unwrap();
            prop_assert_eq!(gb.to_vec(), again.to_vec());
            for g in build(&r, &raw).gens() {
                prop_assert!(gb.normal_form(g).unwrap().is_zero());
            }
        }

        #[test]
        fn membership_implies_radical_membership(raw in arb_ideal(), k in proptest::collection::vec((proptest::collection::vec(0u32..2, 3), 1u32..3), 0..3)) {
            let r = ring(3, &["a", "b", "c"]);
            let i = build(&r, &raw);
            let mult = Polynomial::from_terms(&r, k.iter().map(|(e, c)| (Monomial::from_exponents(e).unwrap(), *c)));
            let f = i.gens()[0].checked_mul(&mult).unwrap();
            prop_assert!(radical_member(&f, &i, Some(u32::MAX)).unwrap());
        }

        #[test]
        fn intersection_lies_in_both(a in arb_ideal(), b in arb_ideal()) {
            let r = ring(2, &["a", "b", "c"]);
            let (i, j) = (build(&r, &a), build(&r, &b));
            let meet = intersect(&i, &j, Some(u32::MAX)).unwrap();
            let (gi, gj) = (groebner(&i, Some(u32::MAX)).unwrap(), groebner(&j, Some(u32::MAX)).unwrap());
            for g in meet.gens() {
                prop_assert!(gi.contains(g).unwrap());
                prop_assert!(gj.contains(g).unwrap());
            }
        }

        #[test]
        fn quotient_contains_ideal(a in arb_ideal(), f in proptest::collection::vec((proptest::collection::vec(0u32..2, 3), 1u32..3), 1..3)) {
            let r = ring(3, &["a", "b", "c"]);
            let i = build(&r, &a);
            let f = Polynomial::from_terms(&r, f.iter().map(|(e, c)| (Monomial::from_exponents(e).unwrap(), *c)));
            prop_assume!(!f.is_zero());
            let q = groebner(&quotient(&i, &f, Some(u32::MAX)).unwrap(), Some(u32::MAX)).unwrap();
            for g in i.gens() {
                prop_assert!(q.contains(g).unwrap());
            }
            for g in q.basis() {
                prop_assert!(groebner(&i, Some(u32::MAX)).unwrap().contains(&g.checked_mul(&f).unwrap()).unwrap());
            }
        }

        #[test]
        fn dimension_matches_growth_of_standard_monomials(raw in proptest::collection::vec(proptest::collection::vec(0u32..4, 3), 1..4)) {
            let r = ring(2, &["a", "b", "c"]);
            let mons: Vec<Monomial> = raw.iter().map(|e| Monomial::from_exponents(e).unwrap()).collect();
            prop_assume!(!mons.iter().any(Monomial::is_one));
            let i = Ideal::new(&r, mons.iter().map(|m| Polynomial::monomial(&r, *m, 1)).collect()).unwrap();
            let dim = krull_dimension(&groebner(&i, None).unwrap()).unwrap();
            // Oracle: the Hilbert function is a polynomial of degree dim-1 in large degree.
            let h: Vec<i64> = (20..26u32)
                .map(|d| r.monomials_of_degree(d).iter().filter(|m| !mons.iter().any(|g| g.divides(m))).count() as i64)
                .collect();
            let mut diffs = h.clone();
            let mut order = 0;
            while diffs.iter().any(|&x| x != 0) {
                diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
                order += 1;
            }
            prop_assert_eq!(dim, order);
        }
    }
}
