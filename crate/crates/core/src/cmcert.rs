//! Cohen-Macaulay checks for presented graded subalgebras and the
//! depth-defect certificate from a nontrivial first cohomology class.
//!
//! Freeness over an hsop `P = k[θ]` is verified in two parts. Generation is
//! checked on products `a_i·m_j` only: the span `M = Σ P·m_j` contains 1 and
//! is stable under every algebra generator, so by induction on monomials in
//! the `a_i` it is all of `A`. A surjection of graded modules with equal
//! Hilbert series is an isomorphism, so the series identity finishes the proof.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::cohomology::{
    annihilates, nontrivial_all_frobenius, Cocycle1, CoefficientModule, CohomologyError, FrobeniusCertificate,
    ModuleKind,
};
use crate::gf::FieldElem;
use crate::groebner::{buchberger, hilbert_numerator, krull_dimension, GbError, GroebnerBasis, Ideal};
use crate::group::{FiniteMatrixGroup, Group};
use crate::linalg::{Echelon, SparseVec};
use crate::mpoly::{same_ring, Monomial, MonomialOrder, PolyError, Polynomial, Ring};
use crate::subalgebra::SubalgebraPresentation;
use crate::tpoly::IntPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CmError {
    #[error("{0} is not homogeneous")]
    NotHomogeneous(String),
    #[error("{0} is constant")]
    Constant(String),
    #[error("{0} is not invariant")]
    NotInvariant(String),
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error("not an hsop: {0}")]
    NotHsop(String),
    #[error("module generators must include 1")]
    MissingOne,
    #[error("nontriviality of every Frobenius power is not proven: {0}")]
    NontrivialityNotCertified(FrobeniusCertificate),
    #[error("element {index} does not annihilate the class")]
    NotAnnihilating { index: usize },
    #[error("not a phsop: k[V]/(a) has dimension {found}, expected {expected}")]
    NotPhsop { expected: usize, found: usize },
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

type Result<T> = std::result::Result<T, CmError>;

/// `A = k[a_1..a_m] ⊆ k[V]` with the relation ideal `R ⊆ k[T_1..T_m]`,
/// `deg T_i = deg a_i`.
pub struct Presentation {
    sub: SubalgebraPresentation,
    relations: GroebnerBasis,
}

/// Presents the algebra generated by homogeneous, nonconstant `gens`;
/// invariance is checked when a group is supplied.
pub fn present(ambient: &Ring, gens: &[Polynomial], group: Option<&FiniteMatrixGroup>, cap: Option<u32>) -> Result<Presentation> {
    for g in gens {
        if !same_ring(g.ring(), ambient) {
            return Err(CmError::RingMismatch);
        }
        if !g.is_homogeneous() || g.is_zero() {
            return Err(CmError::NotHomogeneous(g.to_string()));
        }
        if g.is_constant() {
            return Err(CmError::Constant(g.to_string()));
        }
        if let Some(grp) = group {
            if !grp.fixes(g).map_err(CmError::Poly)? {
                return Err(CmError::NotInvariant(g.to_string()));
            }
        }
    }
    let sub = SubalgebraPresentation::new(ambient, gens, cap)?;
    let tags = sub.tag_ring().clone();
    let relations = buchberger(&Ideal::new(&tags, sub.relations()?)?, MonomialOrder::Grevlex, cap)?;
    for r in relations.basis() {
        debug_assert!(r.is_homogeneous());
        assert!(r.substitute(gens)?.is_zero(), "relation {r} does not vanish");
    }
    Ok(Presentation { sub, relations })
}

impl Presentation {
    pub fn ambient(&self) -> &Ring {
        self.sub.ambient()
    }

    pub fn generators(&self) -> &[Polynomial] {
        self.sub.generators()
    }

    pub fn tag_ring(&self) -> &Ring {
        self.sub.tag_ring()
    }

    pub fn degrees(&self) -> &[u32] {
        self.tag_ring().weights()
    }

    /// Reduced Gröbner basis of `R` in the tag ring.
    pub fn relations(&self) -> &GroebnerBasis {
        &self.relations
    }

    pub fn subalgebra(&self) -> &SubalgebraPresentation {
        &self.sub
    }

    /// Krull dimension of `A`.
    pub fn dim(&self) -> usize {
        if self.relations.is_empty() {
            return self.tag_ring().nvars();
        }
        krull_dimension(&self.relations).expect("R is a proper ideal")
    }

    /// Image of a tag polynomial in `k[V]`.
    pub fn evaluate(&self, p: &Polynomial) -> Result<Polynomial> {
        if !same_ring(p.ring(), self.tag_ring()) {
            return Err(CmError::RingMismatch);
        }
        Ok(p.substitute(self.generators())?)
    }

    /// Tag polynomial for an ambient element of `A`, if it lies in `A`.
    pub fn express(&self, f: &Polynomial) -> Result<Option<Polynomial>> {
        Ok(self.sub.express(f)?)
    }

    fn check_tag(&self, p: &Polynomial) -> Result<()> {
        if !same_ring(p.ring(), self.tag_ring()) {
            return Err(CmError::RingMismatch);
        }
        if !p.is_homogeneous() || p.is_zero() {
            return Err(CmError::NotHomogeneous(p.to_string()));
        }
        Ok(())
    }
}

/// True iff `k[V]/(a_1..a_k)` has dimension `n - k`.
pub fn hsop_check_polyring(elements: &[Polynomial], ring: &Ring, cap: Option<u32>) -> Result<bool> {
    Ok(quotient_dimension(elements, ring, cap)? == ring.nvars().checked_sub(elements.len()))
}

/// Dimension of `k[V]/(a)`; `None` for the unit ideal.
fn quotient_dimension(elements: &[Polynomial], ring: &Ring, cap: Option<u32>) -> Result<Option<usize>> {
    for a in elements {
        if !same_ring(a.ring(), ring) {
            return Err(CmError::RingMismatch);
        }
        if !a.is_homogeneous() || a.is_zero() {
            return Err(CmError::NotHomogeneous(a.to_string()));
        }
        if a.is_constant() {
            return Err(CmError::Constant(a.to_string()));
        }
    }
    let gb = buchberger(&Ideal::new(ring, elements.to_vec())?, MonomialOrder::Grevlex, cap)?;
    if gb.is_unit() {
        return Ok(None);
    }
    Ok(Some(krull_dimension(&gb)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegularSequenceVerdict {
    /// Least 1-based index `i` with `s_i` a zero divisor modulo `s_1..s_{i-1}`.
    pub failing_index: Option<usize>,
}

impl RegularSequenceVerdict {
    pub fn is_regular(&self) -> bool {
        self.failing_index.is_none()
    }
}

/// Tests whether each `s_i` is a nonzerodivisor on `A/(s_1..s_{i-1})`. For a
/// graded module `M` and homogeneous `s` of degree `d`, the exact sequence
/// `0 → (0:s)(-d) → M(-d) → M → M/sM → 0` shows `s` is regular iff
/// `H(M/sM) = (1 - t^d)·H(M)`, so one Gröbner basis per step suffices.
pub fn regular_sequence_check(a: &Presentation, seq: &[Polynomial], cap: Option<u32>) -> Result<RegularSequenceVerdict> {
    for s in seq {
        a.check_tag(s)?;
        if s.is_constant() {
            return Err(CmError::Constant(s.to_string()));
        }
    }
    let tags = a.tag_ring();
    let weights = tags.weights();
    let mut gens = a.relations.to_vec();
    let mut series = hilbert_numerator(&a.relations.leading_monomials(), weights);
    for (i, s) in seq.iter().enumerate() {
        gens.push(s.clone());
        let gb = buchberger(&Ideal::new(tags, gens.clone())?, MonomialOrder::Grevlex, cap)?;
        let next = hilbert_numerator(&gb.leading_monomials(), weights);
        let d = s.degree().expect("nonzero");
        if next != series.mul(&IntPoly::one_minus_t_pow(d)) {
            return Ok(RegularSequenceVerdict { failing_index: Some(i + 1) });
        }
        series = next;
    }
    Ok(RegularSequenceVerdict { failing_index: None })
}

/// `numerator / Π (1 - t^e)` over the denominator exponents.
#[derive(Debug, Clone)]
pub struct HilbertSeries {
    numerator: IntPoly,
    denominator: Vec<u32>,
}

impl PartialEq for HilbertSeries {
    /// Cross-multiplied identity, independent of presentation.
    fn eq(&self, other: &Self) -> bool {
        let lhs = self.numerator.mul(&denominator_poly(&other.denominator));
        let rhs = other.numerator.mul(&denominator_poly(&self.denominator));
        lhs == rhs
    }
}

fn denominator_poly(exps: &[u32]) -> IntPoly {
    exps.iter().fold(IntPoly::one(), |acc, &e| acc.mul(&IntPoly::one_minus_t_pow(e)))
}

impl HilbertSeries {
    /// Cancels whole factors `1 - t^e` (largest `e` first) and sorts the
    /// remaining exponents.
    pub fn new(numerator: IntPoly, denominator: Vec<u32>) -> Self {
        assert!(denominator.iter().all(|&e| e > 0), "denominator exponents are positive");
        let mut num = numerator;
        let mut den = denominator;
        den.sort_unstable();
        let mut i = den.len();
        while i > 0 {
            i -= 1;
            if num.is_zero() {
                break;
            }
            if let Some(q) = num.div_exact(&IntPoly::one_minus_t_pow(den[i])) {
                num = q;
                den.remove(i);
                i = den.len();
            }
        }
        if num.is_zero() {
            den.clear();
        }
        HilbertSeries { numerator: num, denominator: den }
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &[u32] {
        &self.denominator
    }

    /// Order of the pole at `t = 1`, the Krull dimension.
    pub fn pole_order(&self) -> usize {
        let mut n = self.numerator.clone();
        let mut k = self.denominator.len();
        while k > 0 {
            match n.div_exact(&IntPoly::one_minus_t_pow(1)) {
                Some(q) if !n.is_zero() => {
                    n = q;
                    k -= 1;
                }
                _ => break,
            }
        }
        k
    }

    /// Coefficients of `t^0..t^order`.
    pub fn expand(&self, order: usize) -> Vec<i64> {
        let mut out: Vec<i64> = (0..=order).map(|d| self.numerator.coeff(d)).collect();
        for &e in &self.denominator {
            // Multiply by 1/(1 - t^e) = Σ t^{ke}.
            for d in e as usize..=order {
                out[d] += out[d - e as usize];
            }
        }
        out
    }

    /// Parses the canonical text form, e.g. `(1+2t^4+t^8)/((1-t)^3(1-t^4)^2)`.
    pub fn parse(text: &str) -> Option<HilbertSeries> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s.as_str(), ""),
        };
        let num = IntPoly::parse(strip_parens(num))?;
        let mut exps = Vec::new();
        let mut rest = den;
        if rest.starts_with("((") && rest.ends_with(')') {
            rest = &rest[1..rest.len() - 1];
        }
        while !rest.is_empty() {
            let body_end = rest.find(')')?;
            let body = rest.strip_prefix("(1-t")?;
            let body = &body[..body_end - 4];
            let e: u32 = if body.is_empty() { 1 } else { body.strip_prefix('^')?.parse().ok()? };
            rest = &rest[body_end + 1..];
            let mut times = 1;
            if let Some(r) = rest.strip_prefix('^') {
                let digits = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
                times = r[..digits].parse().ok()?;
                rest = &r[digits..];
            }
            if e == 0 {
                return None;
            }
            exps.extend(std::iter::repeat_n(e, times));
        }
        Some(HilbertSeries::new(num, exps))
    }
}

fn strip_parens(s: &str) -> &str {
    s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(s)
}

impl fmt::Display for HilbertSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numerator.to_string();
        let compound = self.numerator.coeffs().iter().filter(|&&c| c != 0).count() > 1;
        if compound && !self.denominator.is_empty() {
            write!(f, "({num})")?;
        } else {
            f.write_str(&num)?;
        }
        if self.denominator.is_empty() {
            return Ok(());
        }
        let mut groups: BTreeMap<u32, usize> = BTreeMap::new();
        for &e in &self.denominator {
            *groups.entry(e).or_default() += 1;
        }
        let parts: Vec<String> = groups
            .iter()
            .map(|(&e, &k)| {
                let base = if e == 1 { "(1-t)".to_string() } else { format!("(1-t^{e})") };
                if k == 1 { base } else { format!("{base}^{k}") }
            })
            .collect();
        if parts.len() == 1 {
            write!(f, "/{}", parts[0])
        } else {
            write!(f, "/({})", parts.concat())
        }
    }
}

/// Hilbert series of `k[T]/R` under the weighted grading.
pub fn hilbert_series(a: &Presentation) -> HilbertSeries {
    let weights = a.degrees();
    HilbertSeries::new(hilbert_numerator(&a.relations.leading_monomials(), weights), weights.to_vec())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeModuleVerdict {
    /// `(generator index, module generator index)` of a product outside `Σ P·m_j`.
    pub generation_failure: Option<(usize, usize)>,
    pub hilbert_identity: bool,
    pub expected_series: HilbertSeries,
}

impl FreeModuleVerdict {
    pub fn is_free(&self) -> bool {
        self.generation_failure.is_none() && self.hilbert_identity
    }
}

/// Verifies that `A` is free over `k[hsop]` on `module_gens` (tag polynomials).
pub fn free_module_check(a: &Presentation, hsop: &[Polynomial], module_gens: &[Polynomial], cap: Option<u32>) -> Result<FreeModuleVerdict> {
    for p in hsop.iter().chain(module_gens) {
        a.check_tag(p)?;
    }
    if !module_gens.iter().any(|m| m.is_constant()) {
        return Err(CmError::MissingOne);
    }
    let dim = a.dim();
    if hsop.len() != dim {
        return Err(CmError::NotHsop(format!("{} elements for an algebra of dimension {dim}", hsop.len())));
    }
    let mut gens = a.relations.to_vec();
    gens.extend(hsop.iter().cloned());
    let gb = buchberger(&Ideal::new(a.tag_ring(), gens)?, MonomialOrder::Grevlex, cap)?;
    if !gb.is_unit() && krull_dimension(&gb)? != 0 {
        return Err(CmError::NotHsop("A/(θ) is not finite-dimensional".into()));
    }

    let theta: Vec<Polynomial> = hsop.iter().map(|h| a.evaluate(h)).collect::<Result<_>>()?;
    let theta_deg: Vec<u32> = hsop.iter().map(|h| h.degree().expect("nonzero")).collect();
    let mods: Vec<Polynomial> = module_gens.iter().map(|m| a.evaluate(m)).collect::<Result<_>>()?;
    let mod_deg: Vec<u32> = module_gens.iter().map(|m| m.degree().expect("nonzero")).collect();
    let mut spans: BTreeMap<u32, DegreeSpan> = BTreeMap::new();
    let mut generation_failure = None;
    'outer: for (i, g) in a.generators().iter().enumerate() {
        for (j, m) in mods.iter().enumerate() {
            let product = g.checked_mul(m)?;
            let d = a.degrees()[i] + mod_deg[j];
            let span = spans.entry(d).or_insert_with(|| DegreeSpan::build(d, &theta, &theta_deg, &mods, &mod_deg));
            if !span.contains(&product) {
                generation_failure = Some((i, j));
                break 'outer;
            }
        }
    }

    let num = mod_deg.iter().fold(IntPoly::zero(), |acc, &d| acc.add(&IntPoly::monomial(1, d)));
    let expected = HilbertSeries::new(num, theta_deg);
    let hilbert_identity = hilbert_series(a) == expected;
    Ok(FreeModuleVerdict { generation_failure, hilbert_identity, expected_series: expected })
}

/// Span of `θ^α·m_j` in one degree, in ambient monomial coordinates.
struct DegreeSpan {
    index: std::collections::HashMap<Monomial, u32>,
    echelon: Echelon,
}

impl DegreeSpan {
    fn build(d: u32, theta: &[Polynomial], theta_deg: &[u32], mods: &[Polynomial], mod_deg: &[u32]) -> Self {
        let field = theta.first().or(mods.first()).expect("nonempty").field().clone();
        let mut span = DegreeSpan { index: Default::default(), echelon: Echelon::new(&field, false) };
        for (m, &md) in mods.iter().zip(mod_deg) {
            if md > d {
                continue;
            }
            let mut products = Vec::new();
            theta_products(d - md, theta, theta_deg, 0, m.clone(), &mut products);
            for p in products {
                let v = span.coords(&p);
                span.echelon.insert(v);
            }
        }
        span
    }

    fn coords(&mut self, p: &Polynomial) -> SparseVec {
        let mut v: SparseVec = p
            .terms()
            .iter()
            .map(|(m, c)| {
                let next = self.index.len() as u32;
                (*self.index.entry(*m).or_insert(next), *c)
            })
            .collect();
        v.sort_unstable();
        v
    }

    fn contains(&mut self, p: &Polynomial) -> bool {
        let v = self.coords(p);
        self.echelon.contains(&v)
    }
}

/// All `acc·θ^α` with `Σ α_i deg θ_i = remaining`, using `θ_start..`.
fn theta_products(remaining: u32, theta: &[Polynomial], deg: &[u32], start: usize, acc: Polynomial, out: &mut Vec<Polynomial>) {
    if remaining == 0 {
        out.push(acc);
        return;
    }
    for i in start..theta.len() {
        if deg[i] <= remaining {
            let next = acc.checked_mul(&theta[i]).expect("degrees are small");
            theta_products(remaining - deg[i], theta, deg, i, next, out);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GorensteinVerdict {
    /// The `a` with `H(1/t) = (-1)^{dim A} t^a H(t)`, if any.
    pub a: Option<i64>,
    /// `a = dim V`, when `dim V` was supplied and `a` exists.
    pub strongly: Option<bool>,
}

impl GorensteinVerdict {
    pub fn is_gorenstein(&self) -> bool {
        self.a.is_some()
    }
}

/// Decides the functional equation `H(1/t) = (-1)^{dim A} t^a H(t)`.
/// With `H = N/Π(1-t^{e_i})`, `H(1/t) = (-1)^r t^{Σe - deg N} N^rev(t)/Π(1-t^{e_i})`.
pub fn gorenstein_check(h: &HilbertSeries, dim_a: usize, dim_v: Option<usize>) -> GorensteinVerdict {
    let n = &h.numerator;
    let Some(deg) = n.degree() else {
        return GorensteinVerdict { a: None, strongly: None };
    };
    let rev = IntPoly::from_coeffs(n.coeffs().iter().rev().copied().collect());
    let low = n.low_degree().unwrap_or(0);
    // t^{deg} N(1/t) = rev, so N(1/t) = t^{-deg}·rev.
    let sign = if rev == *n {
        1
    } else if rev == IntPoly::zero().sub(n) {
        -1
    } else {
        return GorensteinVerdict { a: None, strongly: None };
    };
    debug_assert_eq!(low, 0, "palindromic numerators have nonzero constant term");
    let r = h.denominator.len();
    let total_sign = if r.is_multiple_of(2) { sign } else { -sign };
    let wanted = if dim_a.is_multiple_of(2) { 1 } else { -1 };
    if total_sign != wanted {
        return GorensteinVerdict { a: None, strongly: None };
    }
    let a = h.denominator.iter().map(|&e| e as i64).sum::<i64>() - deg as i64;
    GorensteinVerdict { a: Some(a), strongly: dim_v.map(|v| a == v as i64) }
}

/// Lower bound `cmdef(A) ≥ k - 2` for every graded geometric separating
/// algebra `A ⊆ k[V]^G`, from a class `g ∈ H^1(G, k[V])` whose Frobenius
/// powers never vanish and a phsop `a_1..a_k` of annihilating invariants.
#[derive(Debug, Clone)]
pub struct DefectCertificate {
    pub cocycle: Cocycle1,
    pub nontriviality: FrobeniusCertificate,
    /// Set when a non-proof verdict was accepted on request.
    pub conditional: bool,
    /// `(a_i, b_i)` with `a_i·g_σ = (σ - 1)·b_i`.
    pub elements: Vec<(Polynomial, Polynomial)>,
    pub ambient_dim: usize,
    pub quotient_dim: usize,
}

impl DefectCertificate {
    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn bound(&self) -> usize {
        self.k().saturating_sub(2)
    }

    /// With `k ≥ 3`, no graded geometric separating algebra is Cohen-Macaulay.
    pub fn excludes_cohen_macaulay(&self) -> bool {
        self.k() >= 3
    }

    pub fn verdict(&self) -> String {
        let prefix = if self.conditional { "CONDITIONAL: " } else { "" };
        if self.excludes_cohen_macaulay() {
            format!(
                "{prefix}every graded geometric separating algebra has Cohen-Macaulay defect at least {}; no graded geometric separating algebra is Cohen-Macaulay",
                self.bound()
            )
        } else {
            format!("{prefix}every graded geometric separating algebra has Cohen-Macaulay defect at least {}", self.bound())
        }
    }

    pub fn to_json(&self) -> Value {
        let module = self.cocycle.module();
        let coefficients = match module.kind() {
            ModuleKind::Graded { degree } => json!({ "kind": "graded", "degree": degree }),
            ModuleKind::Character { values } => {
                let f = module.group().field();
                let gens: Vec<String> = module.group().generators().iter().map(|&s| f.format(values[s])).collect();
                json!({ "kind": "character", "generator_values": gens })
            }
        };
        let table: serde_json::Map<String, Value> =
            self.cocycle.table().into_iter().map(|(w, v)| (w, Value::String(v))).collect();
        json!({
            "coefficients": coefficients,
            "cocycle": table,
            "nontriviality": self.nontriviality.to_string(),
            "conditional": self.conditional,
            "annihilators": self.elements.iter().map(|(a, b)| json!({ "a": a.to_string(), "b": b.to_string() })).collect::<Vec<_>>(),
            "ambient_dim": self.ambient_dim,
            "quotient_dim": self.quotient_dim,
            "k": self.k(),
            "bound": self.bound(),
            "verdict": self.verdict(),
        })
    }
}

pub fn defect_certificate(
    g: &Cocycle1,
    ann: &[Polynomial],
    m_max: Option<u32>,
    heuristic: bool,
    cap: Option<u32>,
) -> Result<DefectCertificate> {
    let cert = nontrivial_all_frobenius(g, m_max)?;
    let conditional = match cert {
        FrobeniusCertificate::Refuted { .. } => return Err(CmError::NontrivialityNotCertified(cert)),
        FrobeniusCertificate::Checked { .. } if !heuristic => return Err(CmError::NontrivialityNotCertified(cert)),
        FrobeniusCertificate::Checked { .. } => true,
        _ => false,
    };
    let mut elements = Vec::with_capacity(ann.len());
    for (i, a) in ann.iter().enumerate() {
        match annihilates(a, g)? {
            Some(b) => elements.push((a.clone(), b)),
            None => return Err(CmError::NotAnnihilating { index: i + 1 }),
        }
    }
    let ring = g.module().ring();
    let n = ring.nvars();
    let expected = n.checked_sub(ann.len()).ok_or(CmError::NotPhsop { expected: 0, found: 0 })?;
    let found = quotient_dimension(ann, ring, cap)?.ok_or(CmError::NotPhsop { expected, found: 0 })?;
    if found != expected {
        return Err(CmError::NotPhsop { expected, found });
    }
    Ok(DefectCertificate { cocycle: g.clone(), nontriviality: cert, conditional, elements, ambient_dim: n, quotient_dim: found })
}

/// Re-checks a serialized certificate against the group and ring it claims:
/// the cocycle identity, every witness equation, the phsop dimension and the
/// nontriviality verdict.
pub fn verify_certificate(json: &Value, group: &Group, ring: &Ring, cap: Option<u32>) -> Result<bool> {
    let bad = |what: &str| CmError::Malformed(what.to_string());
    let coeff = json.get("coefficients").ok_or_else(|| bad("coefficients"))?;
    let module = match coeff.get("kind").and_then(Value::as_str) {
        Some("graded") => {
            let d = coeff.get("degree").and_then(Value::as_u64).ok_or_else(|| bad("degree"))?;
            CoefficientModule::graded(group, ring, d as u32)?
        }
        Some("character") => {
            let vals = coeff.get("generator_values").and_then(Value::as_array).ok_or_else(|| bad("generator_values"))?;
            let elems = vals
                .iter()
                .map(|v| {
                    let s = v.as_str().ok_or_else(|| bad("generator value"))?;
                    FieldElem::parse(group.field(), s).map_err(|_| bad("generator value"))
                })
                .collect::<Result<Vec<_>>>()?;
            CoefficientModule::character(group, &elems)?
        }
        _ => return Err(bad("coefficient kind")),
    };
    let table = json.get("cocycle").and_then(Value::as_object).ok_or_else(|| bad("cocycle"))?;
    let words = group.words();
    let values = words
        .iter()
        .map(|w| {
            let s = table.get(w).and_then(Value::as_str).ok_or_else(|| bad("cocycle entry"))?;
            Ok(module.ring().parse(s)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let g = Cocycle1::new(&module, values)?;
    let claimed = json.get("nontriviality").and_then(Value::as_str).ok_or_else(|| bad("nontriviality"))?;
    let conditional = json.get("conditional").and_then(Value::as_bool).ok_or_else(|| bad("conditional"))?;
    let recomputed = nontrivial_all_frobenius(&g, None)?;
    if !conditional && (!recomputed.is_proof() || matches!(recomputed, FrobeniusCertificate::Refuted { .. })) {
        return Ok(false);
    }
    if recomputed.is_proof() && recomputed.to_string() != claimed {
        return Ok(false);
    }
    let pairs = json.get("annihilators").and_then(Value::as_array).ok_or_else(|| bad("annihilators"))?;
    let mut ann = Vec::new();
    for p in pairs {
        let a = ring.parse(p.get("a").and_then(Value::as_str).ok_or_else(|| bad("a"))?)?;
        let b = ring.parse(p.get("b").and_then(Value::as_str).ok_or_else(|| bad("b"))?)?;
        if !group.fixes(&a)? {
            return Ok(false);
        }
        for (sigma, v) in g.values().iter().enumerate() {
            let lhs = match module.kind() {
                ModuleKind::Graded { .. } => a.checked_mul(v)?,
                ModuleKind::Character { .. } => return Err(bad("annihilators need graded coefficients")),
            };
            if group.act(sigma, &b)?.sub(&b) != lhs {
                return Ok(false);
            }
        }
        ann.push(a);
    }
    let expected = ring.nvars().checked_sub(ann.len());
    let k = json.get("k").and_then(Value::as_u64).ok_or_else(|| bad("k"))?;
    Ok(expected.is_some() && k as usize == ann.len() && quotient_dimension(&ann, ring, cap)? == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::CoefficientModule;
    use crate::gf::FieldCtx;
    use crate::group::fixtures::{additive_f4, c4_perm, klein};
    use crate::mpoly::PolyRing;
    use proptest::prelude::*;
    use std::collections::HashSet;

    const KLEIN_GENS: [&str; 7] = [
        "x3",
        "x4",
        "x5",
        "x1^4 + x1^2*x3^2 + x1^2*x3*x4 + x1*x3^2*x4 + x1*x3*x4^2 + x1*x3*x4*x5 + x1*x4^3 + x2^2*x3^2 + x2*x3^2*x5 + x2*x3*x4^2",
        "x2^4 + x2^2*x4^2 + x2^2*x4*x5 + x2^2*x5^2 + x2*x4^2*x5 + x2*x4*x5^2",
        "x1^2*x4^2 + x1*x3*x4*x5 + x1*x4^3 + x2^2*x3^2 + x2*x3^2*x5 + x2*x3*x4^2",
        "x1*x4^2*x5 + x1*x4*x5^2 + x2^2*x3*x5 + x2^2*x4^2 + x2*x3*x5^2 + x2*x4^3",
    ];

    fn ring(p: u64, names: &[&str]) -> Ring {
        PolyRing::new(&FieldCtx::prime(p).unwrap(), names).unwrap()
    }

    fn parse_all(r: &Ring, text: &[&str]) -> Vec<Polynomial> {
        text.iter().map(|s| r.parse(s).unwrap()).collect()
    }

    fn klein_ring() -> Ring {
        ring(2, &["x1", "x2", "x3", "x4", "x5"])
    }

    fn klein_algebra() -> Presentation {
        let r = klein_ring();
        present(&r, &parse_all(&r, &KLEIN_GENS), Some(&klein()), None).unwrap()
    }

    /// Counts the distinct monomials of each degree in the semigroup generated
    /// by `gens` in two variables, by brute-force enumeration.
    fn semigroup_counts(gens: &[(u32, u32)], max_degree: u32) -> Vec<i64> {
        let mut seen: HashSet<(u32, u32)> = HashSet::from([(0, 0)]);
        let mut frontier = vec![(0, 0)];
        while let Some((a, b)) = frontier.pop() {
            for &(c, d) in gens {
                let next = (a + c, b + d);
                if next.0 + next.1 <= max_degree && seen.insert(next) {
                    frontier.push(next);
                }
            }
        }
        let mut counts = vec![0i64; max_degree as usize + 1];
        for (a, b) in seen {
            counts[(a + b) as usize] += 1;
        }
        counts
    }

    #[test]
    fn presentations_of_monomial_algebras() {
        let r = ring(5, &["x", "y"]);
        let a = present(&r, &parse_all(&r, &["x^4", "x^3*y", "y^4"]), None, None).unwrap();
        let rel = a.relations().to_vec();
        assert_eq!(rel.len(), 1);
        assert_eq!(rel[0].monic(), a.tag_ring().parse("T2^4 - T1^3*T3").unwrap().monic());
        assert_eq!(a.dim(), 2);

        let free = present(&r, &parse_all(&r, &["x"]), None, None).unwrap();
        assert!(free.relations().is_empty());
        assert_eq!(free.dim(), 1);

        let four = present(&r, &parse_all(&r, &["x^4", "x^3*y", "x*y^3", "y^4"]), None, None).unwrap();
        let binomials = four.relations().basis().filter(|p| p.len() == 2).count();
        assert!(binomials >= 2);
        assert!(four.relations().basis().all(|p| p.len() == 2));
        for p in four.relations().basis() {
            assert!(four.evaluate(p).unwrap().is_zero());
        }
    }

    #[test]
    fn presentation_rejects_bad_generators() {
        let r = ring(5, &["x", "y"]);
        assert!(matches!(present(&r, &parse_all(&r, &["x^2+y"]), None, None), Err(CmError::NotHomogeneous(_))));
        assert!(matches!(present(&r, &parse_all(&r, &["3"]), None, None), Err(CmError::Constant(_))));
        let kr = klein_ring();
        assert!(matches!(present(&kr, &parse_all(&kr, &["x1"]), Some(&klein()), None), Err(CmError::NotInvariant(_))));
        let other = ring(5, &["u", "v"]);
        assert!(matches!(present(&r, &parse_all(&other, &["u"]), None, None), Err(CmError::RingMismatch)));
    }

    #[test]
    fn hsops_in_the_polynomial_ring() {
        let r = ring(2, &["x1", "x2", "x3", "x4"]);
        let c = parse_all(
            &r,
            &[
                "x1+x2+x3+x4",
                "x1*x2+x1*x3+x1*x4+x2*x3+x2*x4+x3*x4",
                "x1*x2*x3+x1*x2*x4+x1*x3*x4+x2*x3*x4",
                "x1*x2*x3*x4",
            ],
        );
        assert!(hsop_check_polyring(&c, &r, None).unwrap());
        assert!(hsop_check_polyring(&c[..2], &r, None).unwrap());
        let kr = klein_ring();
        assert!(hsop_check_polyring(&parse_all(&kr, &KLEIN_GENS[..5]), &kr, None).unwrap());
        let xy = ring(3, &["x", "y"]);
        assert!(!hsop_check_polyring(&parse_all(&xy, &["x", "x^2"]), &xy, None).unwrap());
        assert!(!hsop_check_polyring(&parse_all(&xy, &["x", "y", "x+y"]), &xy, None).unwrap());
    }

    #[test]
    fn hilbert_series_of_a_monomial_algebra() {
        let r = ring(5, &["x", "y"]);
        let a = present(&r, &parse_all(&r, &["x^4", "x^3*y", "y^4"]), None, None).unwrap();
        let h = hilbert_series(&a);
        assert_eq!(h, HilbertSeries::parse("(1+t^4+t^8+t^12)/(1-t^4)^2").unwrap());
        assert_eq!(h.pole_order(), 2);
        assert_eq!(h.expand(40), semigroup_counts(&[(4, 0), (3, 1), (0, 4)], 40));

        let b = present(&r, &parse_all(&r, &["x^4", "x^3*y", "x*y^3", "y^4"]), None, None).unwrap();
        assert_eq!(hilbert_series(&b).expand(40), semigroup_counts(&[(4, 0), (3, 1), (1, 3), (0, 4)], 40));
    }

    #[test]
    fn series_canonical_form_and_text() {
        let h = HilbertSeries::new(IntPoly::parse("1-t^2").unwrap(), vec![2, 1, 1]);
        assert_eq!(h.to_string(), "1/(1-t)^2");
        assert_eq!(h.denominator(), &[1, 1]);
        // Only whole factors cancel; equality is still by cross-multiplication.
        let partial = HilbertSeries::new(IntPoly::parse("1+t").unwrap(), vec![2, 1]);
        assert_eq!(partial.to_string(), "(1+t)/((1-t)(1-t^2))");
        assert_eq!(partial, h);
        let k = HilbertSeries::new(IntPoly::one(), vec![1]);
        assert_eq!(k.to_string(), "1/(1-t)");
        let klein_text = "(1+2t^4+t^8)/((1-t)^3(1-t^4)^2)";
        let parsed = HilbertSeries::parse(klein_text).unwrap();
        assert_eq!(parsed.to_string(), klein_text);
        assert_eq!(HilbertSeries::parse("1/(1-t)").unwrap(), k);
        assert_eq!(HilbertSeries::parse("(1+t)/(1-t^2)").unwrap(), k);
        assert!(HilbertSeries::parse("1/(1+t)").is_none());
        assert_eq!(HilbertSeries::new(IntPoly::one(), vec![]).to_string(), "1");
    }

    #[test]
    fn klein_separating_algebra_is_gorenstein() {
        let a = klein_algebra();
        assert_eq!(a.dim(), 5);
        let h = hilbert_series(&a);
        assert_eq!(h.to_string(), "(1+2t^4+t^8)/((1-t)^3(1-t^4)^2)");
        let g = gorenstein_check(&h, a.dim(), Some(5));
        assert_eq!(g.a, Some(3));
        assert_eq!(g.strongly, Some(false));

        let t = |s: &str| a.tag_ring().parse(s).unwrap();
        let hsop: Vec<Polynomial> = ["T1", "T2", "T3", "T4", "T5"].iter().map(|s| t(s)).collect();
        assert!(regular_sequence_check(&a, &hsop, None).unwrap().is_regular());
        let module = vec![t("1"), t("T6"), t("T7"), t("T6*T7")];
        let verdict = free_module_check(&a, &hsop, &module, None).unwrap();
        assert!(verdict.is_free(), "{verdict:?}");
    }

    #[test]
    fn gorenstein_functional_equation() {
        let line = gorenstein_check(&HilbertSeries::parse("1/(1-t)").unwrap(), 1, Some(1));
        assert_eq!((line.a, line.strongly), (Some(1), Some(true)));
        assert!(!gorenstein_check(&HilbertSeries::parse("(1+2t)/(1-t)").unwrap(), 1, None).is_gorenstein());
        // k[x^2, xy, y^2]: (1+t^2)/(1-t^2)^2 satisfies H(1/t) = t^2 H(t).
        let veronese = gorenstein_check(&HilbertSeries::parse("(1+t^2)/(1-t^2)^2").unwrap(), 2, Some(2));
        assert_eq!(veronese.a, Some(2));
        // Wrong parity: 1/(1-t) cannot have dimension 2.
        assert!(!gorenstein_check(&HilbertSeries::parse("1/(1-t)").unwrap(), 2, None).is_gorenstein());
    }

    #[test]
    fn non_cohen_macaulay_monomial_algebra() {
        let r = ring(5, &["x", "y"]);
        let a = present(&r, &parse_all(&r, &["x^4", "x^3*y", "x*y^3", "y^4"]), None, None).unwrap();
        let t = |s: &str| a.tag_ring().parse(s).unwrap();
        let hsop = vec![t("T1"), t("T4")];
        let regular = regular_sequence_check(&a, &hsop, None).unwrap();
        assert_eq!(regular.failing_index, Some(2));
        let verdict = free_module_check(&a, &hsop, &[t("1"), t("T2"), t("T3")], None).unwrap();
        assert!(!verdict.is_free());
        assert!(matches!(free_module_check(&a, &hsop, &[t("T2")], None), Err(CmError::MissingOne)));
        assert!(matches!(free_module_check(&a, &hsop[..1], &[t("1")], None), Err(CmError::NotHsop(_))));
        assert!(matches!(free_module_check(&a, &[t("T1"), t("T2")], &[t("1")], None), Err(CmError::NotHsop(_))));
    }

    fn c4_parity() -> (Ring, Cocycle1) {
        let g = c4_perm();
        let r = ring(2, &["x1", "x2", "x3", "x4"]);
        let m = CoefficientModule::graded(&g, &r, 0).unwrap();
        let c = Cocycle1::from_generators(&m, &[Polynomial::one(&r)]).unwrap();
        (r, c)
    }

    #[test]
    fn defect_certificate_for_c4() {
        let (r, g) = c4_parity();
        let ann = parse_all(&r, &["x1+x2+x3+x4", "x1*x3+x2*x4", "x1*x2+x2*x3+x3*x4+x1*x4"]);
        let cert = defect_certificate(&g, &ann, None, false, None).unwrap();
        assert_eq!((cert.k(), cert.bound(), cert.quotient_dim), (3, 1, 1));
        assert!(cert.excludes_cohen_macaulay());
        assert!(!cert.conditional);
        assert!(cert.verdict().contains("no graded geometric separating algebra is Cohen-Macaulay"));
        let json = cert.to_json();
        let text = serde_json::to_string(&json).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert!(verify_certificate(&back, g.group(), &r, None).unwrap());

        let mut forged = back.clone();
        forged["annihilators"][0]["b"] = Value::String("x1".into());
        assert!(!verify_certificate(&forged, g.group(), &r, None).unwrap());

        assert!(matches!(
            defect_certificate(&g, &parse_all(&r, &["x1+x2+x3+x4", "x1*x2*x3*x4"]), None, false, None),
            Err(CmError::NotAnnihilating { index: 2 })
        ));
        let c1 = r.parse("x1+x2+x3+x4").unwrap();
        assert!(matches!(
            defect_certificate(&g, &[c1.clone(), c1.pow(2).unwrap()], None, false, None),
            Err(CmError::NotPhsop { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn defect_certificate_for_the_additive_group() {
        let g = additive_f4();
        let f = g.field().clone();
        let r = PolyRing::new(&f, &["x1", "y1", "x2", "y2", "x3", "y3"]).unwrap();
        let m = CoefficientModule::graded(&g, &r, 0).unwrap();
        let w = f.generator_code().unwrap();
        let c = Cocycle1::from_generators(&m, &[Polynomial::one(&r), Polynomial::constant(&r, w)]).unwrap();
        let cert = defect_certificate(&c, &parse_all(&r, &["x1", "x2", "x3"]), None, false, None).unwrap();
        assert_eq!((cert.k(), cert.bound(), cert.ambient_dim, cert.quotient_dim), (3, 1, 6, 3));
        assert_eq!(cert.nontriviality, FrobeniusCertificate::TrivialCoefficients);
        let text = cert.to_json().to_string();
        assert!(verify_certificate(&serde_json::from_str(&text).unwrap(), &g, &r, None).unwrap());
    }

    #[test]
    fn klein_class_is_not_a_certificate() {
        let g = klein();
        let r = klein_ring();
        let found = crate::cohomology::restriction_trivial_classes(&g, &r, None).unwrap().unwrap();
        let class = &found.classes[0];
        let ann = parse_all(&r, &["x3", "x4", "x5"]);
        assert!(matches!(
            defect_certificate(class, &ann, None, false, None),
            Err(CmError::NontrivialityNotCertified(FrobeniusCertificate::Refuted { m: 2 }))
        ));
        assert!(matches!(
            defect_certificate(class, &ann, None, true, None),
            Err(CmError::NontrivialityNotCertified(FrobeniusCertificate::Refuted { .. }))
        ));
    }

    #[test]
    fn heuristic_certificates_are_conditional() {
        let g = klein();
        let r = klein_ring();
        let class = crate::cohomology::restriction_trivial_classes(&g, &r, None).unwrap().unwrap().classes[0].clone();
        // With m_max = 1 the vanishing at m = 2 is never reached.
        let ann = parse_all(&r, &["x3", "x4^2", "x5"]);
        assert!(matches!(
            defect_certificate(&class, &ann, Some(1), false, None),
            Err(CmError::NontrivialityNotCertified(FrobeniusCertificate::Checked { up_to: 1, .. }))
        ));
        let cert = defect_certificate(&class, &ann, Some(1), true, None).unwrap();
        assert!(cert.conditional);
        assert!(cert.verdict().starts_with("CONDITIONAL"));
        assert_eq!((cert.k(), cert.quotient_dim), (3, 2));
        // x4 alone does not annihilate the class.
        let bare = parse_all(&r, &["x3", "x4", "x5"]);
        assert!(matches!(defect_certificate(&class, &bare, Some(1), true, None), Err(CmError::NotAnnihilating { index: 2 })));
    }

    fn monomial_gens() -> impl Strategy<Value = Vec<(u32, u32)>> {
        proptest::collection::vec((0u32..4, 0u32..4), 1..4)
            .prop_map(|v| v.into_iter().filter(|&(a, b)| a + b > 0).collect::<Vec<_>>())
            .prop_filter("nonempty", |v| !v.is_empty())
    }

    fn monomial_algebra(gens: &[(u32, u32)]) -> (Ring, Vec<Polynomial>) {
        let r = ring(3, &["x", "y"]);
        let polys = gens.iter().map(|&(a, b)| r.parse(&format!("x^{a}*y^{b}")).unwrap()).collect();
        (r, polys)
    }

    /// Toric relations of small monomial algebras reach weighted degree ~100.
    const BIG_CAP: Option<u32> = Some(400);

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn relations_vanish_and_series_counts_monomials(gens in monomial_gens()) {
            let (r, polys) = monomial_algebra(&gens);
            let a = present(&r, &polys, None, BIG_CAP).unwrap();
            for p in a.relations().basis() {
                prop_assert!(a.evaluate(p).unwrap().is_zero());
            }
            let h = hilbert_series(&a);
            prop_assert_eq!(h.expand(20), semigroup_counts(&gens, 20));
        }

        #[test]
        fn series_ignores_generator_order(gens in monomial_gens(), seed in 0usize..6) {
            let (r, polys) = monomial_algebra(&gens);
            let mut shuffled = polys.clone();
            shuffled.rotate_left(seed % polys.len());
            shuffled.reverse();
            let h1 = hilbert_series(&present(&r, &polys, None, BIG_CAP).unwrap());
            let h2 = hilbert_series(&present(&r, &shuffled, None, BIG_CAP).unwrap());
            prop_assert_eq!(h1, h2);
        }

        #[test]
        fn series_coefficients_are_nonnegative(gens in monomial_gens()) {
            let (r, polys) = monomial_algebra(&gens);
            let h = hilbert_series(&present(&r, &polys, None, BIG_CAP).unwrap());
            prop_assert!(h.expand(30).iter().all(|&c| c >= 0));
        }

        #[test]
        fn free_algebras_have_regular_generators(n in 1usize..4, degrees in proptest::collection::vec(1u32..4, 3)) {
            // Powers x_i^{d_i} are algebraically independent: R = 0 and the
            // series is 1/Π(1 - t^{d_i}).
            let names = ["x", "y", "z"];
            let r = ring(5, &names[..n]);
            let gens: Vec<Polynomial> = (0..n).map(|i| r.parse(&format!("{}^{}", names[i], degrees[i])).unwrap()).collect();
            let a = present(&r, &gens, None, BIG_CAP).unwrap();
            prop_assert!(a.relations().is_empty());
            let tags: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(a.tag_ring(), i)).collect();
            prop_assert!(regular_sequence_check(&a, &tags, BIG_CAP).unwrap().is_regular());
            let expected = HilbertSeries::new(IntPoly::one(), degrees[..n].to_vec());
            prop_assert_eq!(hilbert_series(&a), expected);
            let free = free_module_check(&a, &tags, &[Polynomial::one(a.tag_ring())], BIG_CAP).unwrap();
            prop_assert!(free.is_free());
        }

        #[test]
        fn free_implies_regular(gens in monomial_gens()) {
            // For x^a, y^b plus extra monomials, θ = (x^a, y^b) is an hsop;
            // check that a free verdict agrees with the regular-sequence test.
            let mut all = vec![(3u32, 0u32), (0, 3)];
            all.extend(gens.iter().copied().filter(|&g| g != (3, 0) && g != (0, 3)));
            let (r, polys) = monomial_algebra(&all);
            let a = present(&r, &polys, None, BIG_CAP).unwrap();
            let tags: Vec<Polynomial> = (0..polys.len()).map(|i| Polynomial::var(a.tag_ring(), i)).collect();
            let hsop = tags[..2].to_vec();
            let regular = regular_sequence_check(&a, &hsop, BIG_CAP).unwrap().is_regular();
            // Module generators: all tag monomials of degree below the socle bound.
            let mut module = vec![Polynomial::one(a.tag_ring())];
            module.extend(tags[2..].iter().cloned());
            let verdict = free_module_check(&a, &hsop, &module, BIG_CAP).unwrap();
            if verdict.is_free() {
                prop_assert!(regular);
            }
        }
    }
}
