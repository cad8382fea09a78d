//! Separation of orbits: by values on finitely many points, over the
//! algebraic closure via graph ideals, and up to purely inseparable closure.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::gf::FieldElem;
use crate::groebner::{groebner, intersect, GbError, Ideal, RadicalTester};
use crate::group::{FiniteMatrixGroup, GroupError};
use crate::mpoly::{same_ring, MonomialOrder, PolyError, PolyRing, Polynomial, Ring, MAX_VARS};
use crate::subalgebra::SubalgebraPresentation;

/// Default largest Frobenius exponent tried by [`inseparable_closure_test`].
pub const DEFAULT_M_MAX: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeparatingError {
    #[error("element {index} of the set is not invariant: {poly}")]
    NotInvariant { index: usize, poly: String },
    #[error("polynomials must live in a ring with one variable per coordinate of V over the group field")]
    RingMismatch,
    #[error("the test needs {needed} variables; at most {max} are supported")]
    TooManyVariables { needed: usize, max: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Points { e: u32 },
    Geometric,
    InseparableClosure,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictKind::Points { e } => write!(f, "point({e})"),
            VerdictKind::Geometric => f.write_str("geometric"),
            VerdictKind::InseparableClosure => f.write_str("inseparable-closure"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Two points in distinct orbits on which every element of the set agrees.
    Points { first: Vec<FieldElem>, second: Vec<FieldElem> },
    /// A generator of the graph ideal outside the radical of the separating ideal.
    GraphGenerator(Polynomial),
    /// An invariant none of whose tried `p^m`-th powers lies in the subalgebra.
    Unreduced { invariant: Polynomial, tried_up_to: u32 },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let point = |v: &[FieldElem]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        match self {
            Witness::Points { first, second } => write!(f, "points ({}) and ({})", point(first), point(second)),
            Witness::GraphGenerator(g) => write!(f, "graph-ideal generator {g}"),
            Witness::Unreduced { invariant, tried_up_to } => {
                write!(f, "no p^m-th power of {invariant} with m <= {tried_up_to} lies in the subalgebra")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatingVerdict {
    pub kind: VerdictKind,
    pub outcome: Outcome,
    /// Present exactly when the outcome is a failure, or an inconclusive
    /// inseparable-closure run.
    pub witness: Option<Witness>,
    /// Why an inconclusive verdict could not be decided.
    pub note: Option<String>,
    /// Inseparable-closure runs: the least `m` found for each invariant.
    pub exponents: Vec<Option<u32>>,
}

impl SeparatingVerdict {
    fn new(kind: VerdictKind, outcome: Outcome) -> Self {
        SeparatingVerdict { kind, outcome, witness: None, note: None, exponents: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

fn check_invariants(g: &FiniteMatrixGroup, set: &[Polynomial]) -> Result<(), SeparatingError> {
    let ring = match set.first() {
        Some(s) => s.ring().clone(),
        None => return Ok(()),
    };
    if ring.nvars() != g.dim() || **ring.field() != **g.field() || set.iter().any(|s| !same_ring(s.ring(), &ring)) {
        return Err(SeparatingError::RingMismatch);
    }
    for (index, s) in set.iter().enumerate() {
        if !g.fixes(s)? {
            return Err(SeparatingError::NotInvariant { index, poly: s.to_string() });
        }
    }
    Ok(())
}

/// Whether the values of `set` distinguish every pair of distinct orbits on
/// `V(F_{q^e})`.
pub fn separates_points(g: &FiniteMatrixGroup, set: &[Polynomial], e: u32) -> Result<SeparatingVerdict, SeparatingError> {
    check_invariants(g, set)?;
    let part = g.orbits_of_points(e)?;
    let ext = part.field().clone();
    // Invariants are constant on orbits, so one representative per orbit suffices.
    let mut seen: HashMap<Vec<u32>, u32> = HashMap::new();
    for orbit in part.orbits() {
        let rep = orbit[0];
        let coords = part.point(rep);
        let values = set.iter().map(|s| s.evaluate_codes(&ext, &coords)).collect::<Result<Vec<u32>, _>>()?;
        if let Some(&other) = seen.get(&values) {
            let elems = |idx: u32| part.point(idx).into_iter().map(|c| FieldElem::new(&ext, c)).collect();
            let mut v = SeparatingVerdict::new(VerdictKind::Points { e }, Outcome::Fail);
            v.witness = Some(Witness::Points { first: elems(other), second: elems(rep) });
            return Ok(v);
        }
        seen.insert(values, rep);
    }
    Ok(SeparatingVerdict::new(VerdictKind::Points { e }, Outcome::Pass))
}

/// Largest point set searched by the point falsifier of the geometric test.
const FALSIFIER_POINTS: u64 = 100_000;

/// Runs point tests over `F_{q^e}`, `e = 1, 2, …`, while the point set stays
/// small; returns the first pair of orbits the set fails to separate.
type PointPair = (Vec<FieldElem>, Vec<FieldElem>);

fn falsifying_pair(g: &FiniteMatrixGroup, set: &[Polynomial]) -> Result<Option<PointPair>, SeparatingError> {
    let q = g.field().order() as u64;
    let mut e = 1;
    while q.checked_pow(e * g.dim() as u32).is_some_and(|n| n <= FALSIFIER_POINTS) {
        if let Some(Witness::Points { first, second }) = separates_points(g, set, e)?.witness {
            return Ok(Some((first, second)));
        }
        e += 1;
    }
    Ok(None)
}

/// `k[x, x']` for two copies of the coordinates; primed names avoid clashes.
fn doubled_ring(ring: &Ring) -> Result<Ring, SeparatingError> {
    let n = ring.nvars();
    if 2 * n + 2 > MAX_VARS {
        return Err(SeparatingError::TooManyVariables { needed: 2 * n + 2, max: MAX_VARS });
    }
    let mut vars = ring.variables().to_vec();
    for i in 0..n {
        let mut name = format!("{}'", ring.var_name(i));
        while vars.contains(&name) {
            name.push('\'');
        }
        vars.push(name);
    }
    Ok(PolyRing::internal(ring.field(), vars, MonomialOrder::Grevlex, vec![1; 2 * n])?)
}

/// The ideal of pairs `(v, g v)`, `g ∈ G`: the intersection over `g` of
/// `(x'_i - Σ_j g_{ij} x_j)`.
pub fn graph_ideal(g: &FiniteMatrixGroup, big: &Ring, degree_cap: Option<u32>) -> Result<Ideal, SeparatingError> {
    let d = g.dim();
    let mut acc: Option<Ideal> = None;
    for x in 0..g.order() {
        let m = g.element(x).matrix();
        let gens: Vec<Polynomial> = (0..d)
            .map(|i| {
                let image = Polynomial::from_terms(big, (0..d).map(|j| (crate::mpoly::Monomial::var(j, 1), m.get(i, j))));
                Polynomial::var(big, d + i).sub(&image)
            })
            .collect();
        let graph = Ideal::new(big, gens)?;
        acc = Some(match acc {
            None => graph,
            Some(j) => {
                let meet = intersect(&j, &graph, degree_cap)?;
                Ideal::new(big, groebner(&meet, degree_cap)?.to_vec())?
            }
        });
    }
    Ok(acc.expect("groups contain the identity"))
}

/// Decides whether `set` separates orbits over the algebraic closure: every
/// generator of the graph ideal `J` must lie in the radical of
/// `(s(x) - s(x') : s ∈ set)`. Degree caps yield an inconclusive verdict.
pub fn geometric_separating_test(
    g: &FiniteMatrixGroup,
    set: &[Polynomial],
    ring: &Ring,
    degree_cap: Option<u32>,
) -> Result<SeparatingVerdict, SeparatingError> {
    if set.iter().any(|s| !same_ring(s.ring(), ring)) {
        return Err(SeparatingError::RingMismatch);
    }
    check_invariants(g, set)?;
    if ring.nvars() != g.dim() || **ring.field() != **g.field() {
        return Err(SeparatingError::RingMismatch);
    }
    match geometric_inner(g, set, ring, degree_cap, true) {
        Err(SeparatingError::Gb(e)) if e.is_cap() => {
            let mut v = SeparatingVerdict::new(VerdictKind::Geometric, Outcome::Inconclusive);
            v.note = Some(e.to_string());
            Ok(v)
        }
        other => other,
    }
}

fn geometric_inner(
    g: &FiniteMatrixGroup,
    set: &[Polynomial],
    ring: &Ring,
    degree_cap: Option<u32>,
    falsify_on_points: bool,
) -> Result<SeparatingVerdict, SeparatingError> {
    let n = ring.nvars();
    let big = doubled_ring(ring)?;
    let left: Vec<usize> = (0..n).collect();
    let right: Vec<usize> = (n..2 * n).collect();
    let sep_gens = set
        .iter()
        .map(|s| Ok(s.map_vars(&big, &left)?.sub(&s.map_vars(&big, &right)?)))
        .collect::<Result<Vec<_>, SeparatingError>>()?;
    let j = graph_ideal(g, &big, degree_cap)?;
    let j_gb = groebner(&j, degree_cap)?;
    for s in &sep_gens {
        // Invariants agree on (v, g v), so the separating ideal lies in J.
        assert!(j_gb.contains(s)?, "separating ideal is not contained in the graph ideal");
    }
    // A pair (v, w) in distinct orbits with equal values lies on V(I_sep)
    // but off V(J), so some generator of J is nonzero there and outside √I_sep.
    let pair = if falsify_on_points { falsifying_pair(g, set)? } else { None };
    if let Some((v, w)) = pair {
        let ext = v[0].field().clone();
        let coords: Vec<u32> = v.iter().chain(&w).map(FieldElem::code).collect();
        let mut best: Option<&Polynomial> = None;
        for gen in j_gb.basis() {
            let smaller = best.is_none_or(|b| (gen.degree(), gen.len()) < (b.degree(), b.len()));
            if smaller && gen.evaluate_codes(&ext, &coords)? != 0 {
                best = Some(gen);
            }
        }
        let gen = best.expect("a pair in distinct orbits lies off the graph variety");
        let mut verdict = SeparatingVerdict::new(VerdictKind::Geometric, Outcome::Fail);
        verdict.witness = Some(Witness::GraphGenerator(gen.clone()));
        return Ok(verdict);
    }
    let mut tester = RadicalTester::new(Ideal::new(&big, sep_gens)?, degree_cap);
    for gen in j_gb.basis() {
        if !tester.contains(gen)? {
            let mut v = SeparatingVerdict::new(VerdictKind::Geometric, Outcome::Fail);
            v.witness = Some(Witness::GraphGenerator(gen.clone()));
            return Ok(v);
        }
    }
    Ok(SeparatingVerdict::new(VerdictKind::Geometric, Outcome::Pass))
}

/// For each invariant `h`, searches the least `m ≤ m_max` with
/// `h^{p^m} ∈ k[set]`. Passes iff every `h` has one; otherwise the first
/// invariant without one is the witness of an inconclusive verdict.
pub fn inseparable_closure_test(
    g: &FiniteMatrixGroup,
    set: &[Polynomial],
    known: &[Polynomial],
    ring: &Ring,
    m_max: Option<u32>,
    degree_cap: Option<u32>,
) -> Result<SeparatingVerdict, SeparatingError> {
    let m_max = m_max.unwrap_or(DEFAULT_M_MAX);
    if set.iter().chain(known).any(|s| !same_ring(s.ring(), ring)) {
        return Err(SeparatingError::RingMismatch);
    }
    check_invariants(g, set)?;
    check_invariants(g, known)?;
    let mut v = SeparatingVerdict::new(VerdictKind::InseparableClosure, Outcome::Pass);
    let algebra = match SubalgebraPresentation::new(ring, set, degree_cap) {
        Ok(a) => a,
        Err(e) if e.is_cap() => {
            v.outcome = Outcome::Inconclusive;
            v.note = Some(e.to_string());
            return Ok(v);
        }
        Err(e) => return Err(e.into()),
    };
    for h in known {
        let mut found = None;
        for m in 0..=m_max {
            if algebra.contains(&h.frobenius_power(m)?)? {
                found = Some(m);
                break;
            }
        }
        if found.is_none() && v.witness.is_none() {
            v.outcome = Outcome::Inconclusive;
            v.witness = Some(Witness::Unreduced { invariant: h.clone(), tried_up_to: m_max });
        }
        v.exponents.push(found);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::fixtures::*;
    use crate::group::Group;
    use crate::gf::FieldCtx;
    use crate::invariant::{invariant_basis, noether_separating_set};
    use crate::linalg::Matrix;

    fn ring_for(g: &Group) -> Ring {
        let names: Vec<String> = (1..=g.dim()).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        PolyRing::new(g.field(), &refs).unwrap()
    }

    fn c_invariants(r: &Ring) -> Vec<Polynomial> {
        ["x1+x2+x3+x4", "x1*x3+x2*x4", "x1*x2+x2*x3+x3*x4+x1*x4", "x1*x2*x3*x4"]
            .iter()
            .map(|s| r.parse(s).unwrap())
            .collect()
    }

    fn scalar_sets() -> (Group, Ring, Vec<Polynomial>, Vec<Polynomial>) {
        let g = c4_scalar5();
        let r = PolyRing::new(g.field(), &["x", "y"]).unwrap();
        let full: Vec<Polynomial> = ["x^4", "x^3*y", "x*y^3", "y^4"].iter().map(|s| r.parse(s).unwrap()).collect();
        let hyper: Vec<Polynomial> = ["x^4", "x^3*y", "y^4"].iter().map(|s| r.parse(s).unwrap()).collect();
        (g, r, full, hyper)
    }

    /// Brute-force oracle: pairs of points in distinct orbits with equal values.
    fn brute_separates(g: &Group, set: &[Polynomial], e: u32) -> bool {
        let part = g.orbits_of_points(e).unwrap();
        let ext = part.field().clone();
        let vals: Vec<Vec<u32>> = (0..part.num_points() as u32)
            .map(|p| set.iter().map(|s| s.evaluate_codes(&ext, &part.point(p)).unwrap()).collect())
            .collect();
        (0..vals.len()).all(|a| (0..a).all(|b| part.orbit_of(a as u32) == part.orbit_of(b as u32) || vals[a] != vals[b]))
    }

    #[test]
    fn point_separation_on_c4() {
        let g = c4_perm();
        let r = ring_for(&g);
        let c = c_invariants(&r);
        assert!(separates_points(&g, &c, 1).unwrap().passed());
        let v = separates_points(&g, &c[..1], 1).unwrap();
        assert_eq!(v.outcome, Outcome::Fail);
        let Some(Witness::Points { first, second }) = v.witness else { panic!("missing witness") };
        let part = g.orbits_of_points(1).unwrap();
        let idx = |p: &[FieldElem]| part.index_of(&p.iter().map(FieldElem::code).collect::<Vec<_>>());
        assert_ne!(part.orbit_of(idx(&first)), part.orbit_of(idx(&second)));
        assert_eq!(
            c[0].evaluate(&first).unwrap(),
            c[0].evaluate(&second).unwrap()
        );
        for e in [1, 2] {
            assert_eq!(separates_points(&g, &c, e).unwrap().passed(), brute_separates(&g, &c, e));
        }
    }

    #[test]
    fn trivial_group_points() {
        let g = trivial(3, 1);
        let r = ring_for(&g);
        for e in 1..4 {
            assert!(separates_points(&g, &[r.parse("x1").unwrap()], e).unwrap().passed());
        }
    }

    #[test]
    fn non_invariants_are_rejected() {
        let g = c4_perm();
        let r = ring_for(&g);
        let err = separates_points(&g, &[r.parse("x1").unwrap()], 1).unwrap_err();
        assert!(matches!(err, SeparatingError::NotInvariant { index: 0, .. }));
        assert!(matches!(
            geometric_separating_test(&g, &[r.parse("x1").unwrap()], &r, None),
            Err(SeparatingError::NotInvariant { .. })
        ));
    }

    #[test]
    fn c4_invariants_are_not_geometric() {
        let g = c4_perm();
        let r = ring_for(&g);
        let v = geometric_separating_test(&g, &c_invariants(&r), &r, None).unwrap();
        assert_eq!(v.outcome, Outcome::Fail);
        assert!(matches!(v.witness, Some(Witness::GraphGenerator(_))));
    }

    #[test]
    fn scalar_sets_are_geometric() {
        let (g, r, full, hyper) = scalar_sets();
        for set in [&full, &hyper] {
            assert!(geometric_separating_test(&g, set, &r, None).unwrap().passed());
            for e in [1, 2] {
                assert!(separates_points(&g, set, e).unwrap().passed());
            }
        }
        let mut more = full.clone();
        more.push(r.parse("x^2*y^2").unwrap());
        assert!(geometric_separating_test(&g, &more, &r, None).unwrap().passed());
        // x^4 and y^4 alone miss the ratio x/y.
        let thin = vec![full[0].clone(), full[3].clone()];
        assert_eq!(geometric_separating_test(&g, &thin, &r, None).unwrap().outcome, Outcome::Fail);
    }

    #[test]
    fn noether_sets_are_geometric() {
        let (g, r, _, _) = scalar_sets();
        let s = noether_separating_set(&g, &r).unwrap();
        assert!(geometric_separating_test(&g, &s, &r, None).unwrap().passed());
        let c4 = c4_perm();
        let rc = ring_for(&c4);
        let s = noether_separating_set(&c4, &rc).unwrap();
        assert!(geometric_separating_test(&c4, &s, &rc, None).unwrap().passed());
    }

    #[test]
    fn ideal_route_without_point_falsifier() {
        let f2 = FieldCtx::prime(2).unwrap();
        let swap = FiniteMatrixGroup::enumerate(&f2, 2, &[perm_matrix(&f2, &[1, 0])], &[], None).unwrap();
        let r = ring_for(&swap);
        let sum = r.parse("x1+x2").unwrap();
        let prod = r.parse("x1*x2").unwrap();
        let v = geometric_inner(&swap, std::slice::from_ref(&sum), &r, None, false).unwrap();
        assert_eq!(v.outcome, Outcome::Fail);
        assert!(geometric_inner(&swap, &[sum, prod], &r, None, false).unwrap().passed());

        // x ↦ -x over F_3: x^2 separates, x^4 cannot tell x^2 = 1 from x^2 = -1.
        let f3 = FieldCtx::prime(3).unwrap();
        let neg = FiniteMatrixGroup::enumerate(&f3, 1, &[Matrix::parse(&f3, "[[2]]").unwrap()], &[], None).unwrap();
        let r = ring_for(&neg);
        assert!(geometric_inner(&neg, &[r.parse("x1^2").unwrap()], &r, None, false).unwrap().passed());
        let quartic = [r.parse("x1^4").unwrap()];
        assert_eq!(geometric_inner(&neg, &quartic, &r, None, false).unwrap().outcome, Outcome::Fail);
        assert!(separates_points(&neg, &quartic, 1).unwrap().passed());
        assert!(!separates_points(&neg, &quartic, 2).unwrap().passed());
    }

    #[test]
    fn degree_cap_gives_inconclusive() {
        let (g, r, full, _) = scalar_sets();
        let v = geometric_separating_test(&g, &full, &r, Some(2)).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert!(v.note.is_some() && v.witness.is_none());
    }

    #[test]
    fn inseparable_closure() {
        let (g, r, full, _) = scalar_sets();
        let v = inseparable_closure_test(&g, &full, &full, &r, None, None).unwrap();
        assert!(v.passed());
        assert_eq!(v.exponents, vec![Some(0); 4]);
        let h = r.parse("x^2*y^2").unwrap();
        let v = inseparable_closure_test(&g, &full, &[h], &r, None, None).unwrap();
        assert!(v.passed());
        // (x^2 y^2)^5 = (x^3 y)^3 · x y^3 · y^4 while x^2 y^2 has degree 4.
        assert_eq!(v.exponents, vec![Some(1)]);
    }

    #[test]
    fn inseparable_closure_on_c4_is_not_a_pass() {
        let g = c4_perm();
        let r = ring_for(&g);
        let known: Vec<Polynomial> = (1..=4).flat_map(|d| invariant_basis(&g, &r, d).unwrap().basis).collect();
        let v = inseparable_closure_test(&g, &c_invariants(&r), &known, &r, Some(2), None).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert!(matches!(v.witness, Some(Witness::Unreduced { tried_up_to: 2, .. })));
    }
}
