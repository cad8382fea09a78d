//! Sparse multivariate polynomials over a finite field.

mod monomial;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use monomial::{Monomial, MonomialOrder, MAX_VARS};

use crate::expr::{self, ExprAlgebra, ExprError};
use crate::gf::{Field, FieldElem, GfError};
use crate::linalg::Matrix;

/// Prefix reserved for internally generated variables (tags, auxiliaries).
pub const RESERVED_PREFIX: char = 'T';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("invalid variable name `{0}`")]
    InvalidVariableName(String),
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("variable `{0}` uses the reserved prefix `T`")]
    ReservedName(String),
    #[error("variable `{0}` clashes with the field generator")]
    GeneratorClash(String),
    #[error("{0} variables requested; at most 16 are supported")]
    TooManyVariables(usize),
    #[error("weights must be positive and one per variable")]
    BadWeights,
    #[error("exponent overflow (exponents are limited to 65535)")]
    ExponentOverflow,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error(transparent)]
    Field(#[from] GfError),
}

impl From<ExprError> for PolyError {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Syntax { pos, msg } => PolyError::Syntax { pos, msg },
            ExprError::UnknownSymbol { name, pos } => PolyError::UnknownVariable { name, pos },
            ExprError::Eval { msg, .. } if msg == "exponent overflow" => PolyError::ExponentOverflow,
            ExprError::Eval { pos, msg } => PolyError::Syntax { pos, msg },
        }
    }
}

/// `k[x_1,…,x_n]` with a monomial order and positive variable weights.
pub struct PolyRing {
    field: Field,
    vars: Vec<String>,
    order: MonomialOrder,
    weights: Vec<u32>,
}

pub type Ring = Arc<PolyRing>;

impl PartialEq for PolyRing {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.order == other.order && self.weights == other.weights && *self.field == *other.field
    }
}

impl fmt::Debug for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl PolyRing {
    /// Standard-graded ring with grevlex order.
    pub fn new(field: &Field, vars: &[&str]) -> Result<Ring, PolyError> {
        let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let weights = vec![1; names.len()];
        Self::with_options(field, names, MonomialOrder::Grevlex, weights)
    }

    /// User-facing constructor; rejects the reserved `T` prefix.
    pub fn with_options(field: &Field, vars: Vec<String>, order: MonomialOrder, weights: Vec<u32>) -> Result<Ring, PolyError> {
        if let Some(v) = vars.iter().find(|v| v.starts_with(RESERVED_PREFIX)) {
            return Err(PolyError::ReservedName(v.clone()));
        }
        Self::internal(field, vars, order, weights)
    }

    /// Like [`with_options`](Self::with_options) but allows reserved names.
    pub fn internal(field: &Field, vars: Vec<String>, order: MonomialOrder, weights: Vec<u32>) -> Result<Ring, PolyError> {
        if vars.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(vars.len()));
        }
        if weights.len() != vars.len() || weights.contains(&0) {
            return Err(PolyError::BadWeights);
        }
        for (i, v) in vars.iter().enumerate() {
            if !expr::is_identifier(v) {
                return Err(PolyError::InvalidVariableName(v.clone()));
            }
            if !field.is_prime_field() && v == field.generator_name() {
                return Err(PolyError::GeneratorClash(v.clone()));
            }
            if vars[..i].contains(v) {
                return Err(PolyError::DuplicateVariable(v.clone()));
            }
        }
        Ok(Arc::new(PolyRing { field: field.clone(), vars, order, weights }))
    }

    /// Same variables and weights under another order.
    pub fn with_order(&self, order: MonomialOrder) -> Ring {
        Arc::new(PolyRing { field: self.field.clone(), vars: self.vars.clone(), order, weights: self.weights.clone() })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, i: usize) -> &str {
        &self.vars[i]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn is_standard_graded(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }

    /// `"F_2[x1,x2] grevlex"`, with weights listed when nonstandard.
    pub fn describe(&self) -> String {
        let mut s = format!("{}[{}] {}", self.field.describe(), self.vars.join(","), self.order);
        if !self.is_standard_graded() {
            let w: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
            s.push_str(&format!(" weights ({})", w.join(",")));
        }
        s
    }

    #[inline]
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.order.cmp(a, b, &self.weights)
    }

    #[inline]
    pub fn degree_of(&self, m: &Monomial) -> u32 {
        m.weighted_degree(&self.weights)
    }

    /// Monomials of weighted degree `d`, descending in the ring order.
    pub fn monomials_of_degree(&self, d: u32) -> Vec<Monomial> {
        fn rec(w: &[u32], i: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
            if i == w.len() {
                if left == 0 {
                    out.push(*cur);
                }
                return;
            }
            let mut e = 0;
            while e * w[i] <= left {
                cur.set(i, e as u16);
                rec(w, i + 1, left - e * w[i], cur, out);
                e += 1;
            }
            cur.set(i, 0);
        }
        let mut out = Vec::new();
        if d <= u16::MAX as u32 {
            let mut cur = Monomial::ONE;
            rec(&self.weights, 0, d, &mut cur, &mut out);
        }
        out.sort_by(|a, b| self.cmp(b, a));
        out
    }

    /// Number of monomials of weighted degree `d`, without listing them.
    pub fn count_monomials_of_degree(&self, d: u32) -> u64 {
        let mut counts = vec![0u64; d as usize + 1];
        counts[0] = 1;
        for &w in &self.weights {
            for k in w as usize..=d as usize {
                counts[k] = counts[k].saturating_add(counts[k - w as usize]);
            }
        }
        counts[d as usize]
    }

    pub fn parse(self: &Arc<Self>, text: &str) -> Result<Polynomial, PolyError> {
        Ok(expr::parse_with(&PolyAlgebra(self, None), text)?)
    }

    /// Like [`parse`](Self::parse), with extra named polynomials. Ring
    /// variables take precedence over bindings.
    pub fn parse_with_bindings(
        self: &Arc<Self>,
        text: &str,
        bindings: &dyn Fn(&str) -> Option<Polynomial>,
    ) -> Result<Polynomial, PolyError> {
        Ok(expr::parse_with(&PolyAlgebra(self, Some(bindings)), text)?)
    }
}

/// True if two ring handles denote the same ring.
pub fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

type Bindings<'a> = &'a dyn Fn(&str) -> Option<Polynomial>;

struct PolyAlgebra<'a>(&'a Ring, Option<Bindings<'a>>);

impl ExprAlgebra for PolyAlgebra<'_> {
    type Value = Polynomial;

    fn integer(&self, digits: &str) -> Result<Polynomial, String> {
        let f = self.0.field();
        let p = f.characteristic() as u64;
        let c = digits.bytes().fold(0u64, |acc, d| (acc * 10 + (d - b'0') as u64) % p) as u32;
        Ok(Polynomial::constant(self.0, c))
    }

    fn symbol(&self, name: &str) -> Option<Polynomial> {
        if let Some(i) = self.0.var_index(name) {
            return Some(Polynomial::var(self.0, i));
        }
        if let Some(p) = self.1.and_then(|lookup| lookup(name)) {
            return same_ring(p.ring(), self.0).then_some(p);
        }
        let f = self.0.field();
        (!f.is_prime_field() && name == f.generator_name()).then(|| Polynomial::constant(self.0, f.generator_code().unwrap()))
    }

    fn add(&self, a: Polynomial, b: Polynomial) -> Result<Polynomial, String> {
        Ok(&a + &b)
    }

    fn sub(&self, a: Polynomial, b: Polynomial) -> Result<Polynomial, String> {
        Ok(&a - &b)
    }

    fn mul(&self, a: Polynomial, b: Polynomial) -> Result<Polynomial, String> {
        a.checked_mul(&b).map_err(|_| "exponent overflow".to_string())
    }

    fn neg(&self, a: Polynomial) -> Result<Polynomial, String> {
        Ok(-&a)
    }

    fn pow(&self, a: Polynomial, e: u64) -> Result<Polynomial, String> {
        a.pow(e).map_err(|_| "exponent overflow".to_string())
    }
}

/// A polynomial in canonical form: terms strictly descending in the ring
/// order, no zero coefficients.
#[derive(Clone)]
pub struct Polynomial {
    ring: Ring,
    terms: Vec<(Monomial, u32)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && same_ring(&self.ring, &other.ring)
    }
}

impl Eq for Polynomial {}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl Polynomial {
    pub fn zero(ring: &Ring) -> Self {
        Polynomial { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, 1)
    }

    pub fn constant(ring: &Ring, code: u32) -> Self {
        let terms = if code == 0 { Vec::new() } else { vec![(Monomial::ONE, code)] };
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn var(ring: &Ring, i: usize) -> Self {
        assert!(i < ring.nvars(), "variable index out of range");
        Polynomial { ring: ring.clone(), terms: vec![(Monomial::var(i, 1), 1)] }
    }

    pub fn monomial(ring: &Ring, m: Monomial, code: u32) -> Self {
        let terms = if code == 0 { Vec::new() } else { vec![(m, code)] };
        Polynomial { ring: ring.clone(), terms }
    }

    /// Canonicalizes arbitrary terms: sorts, merges duplicates, drops zeros.
    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Monomial, u32)>) -> Self {
        let f = ring.field().clone();
        let mut acc: HashMap<Monomial, u32> = HashMap::new();
        for (m, c) in terms {
            let slot = acc.entry(m).or_insert(0);
            *slot = f.add(*slot, c);
        }
        Self::from_map(ring, acc)
    }

    fn from_map(ring: &Ring, acc: HashMap<Monomial, u32>) -> Self {
        let mut terms: Vec<(Monomial, u32)> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        terms.sort_unstable_by(|a, b| ring.cmp(&b.0, &a.0));
        Polynomial { ring: ring.clone(), terms }
    }

    /// Trusts the caller that `terms` is already canonical.
    pub(crate) fn from_sorted(ring: &Ring, terms: Vec<(Monomial, u32)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| ring.cmp(&w[0].0, &w[1].0) == Ordering::Greater));
        debug_assert!(terms.iter().all(|t| t.1 != 0));
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> &Field {
        self.ring.field()
    }

    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, u32)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.terms[0].1 == 1
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn leading_coefficient(&self) -> Option<u32> {
        self.terms.first().map(|t| t.1)
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms
            .binary_search_by(|t| self.ring.cmp(m, &t.0))
            .map_or(0, |i| self.terms[i].1)
    }

    /// Maximal weighted degree of a term; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| self.ring.degree_of(&t.0)).max()
    }

    /// True when all terms share one weighted degree (zero counts as homogeneous).
    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.iter().map(|t| self.ring.degree_of(&t.0));
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Bitmask of variables occurring in some term.
    pub fn support_mask(&self) -> u32 {
        self.terms.iter().fold(0, |m, t| m | t.0.support_mask())
    }

    fn check_ring(&self, other: &Polynomial) {
        assert!(same_ring(&self.ring, &other.ring), "polynomials belong to different rings");
    }

    pub fn neg(&self) -> Polynomial {
        let f = self.field();
        let terms = self.terms.iter().map(|&(m, c)| (m, f.neg(c))).collect();
        Polynomial { ring: self.ring.clone(), terms }
    }

    /// `self + c·m·other`, merging two sorted term lists.
    pub fn add_scaled_shifted(&self, c: u32, m: &Monomial, other: &Polynomial) -> Polynomial {
        self.check_ring(other);
        if c == 0 || other.is_zero() {
            return self.clone();
        }
        let f = self.field();
        let ring = &self.ring;
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let bm = b[j].0.mul(m);
            match ring.cmp(&a[i].0, &bm) {
                Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Less => {
                    out.push((bm, f.mul(c, b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = f.add(a[i].1, f.mul(c, b[j].1));
                    if v != 0 {
                        out.push((bm, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|&(bm, bc)| (bm.mul(m), f.mul(c, bc))));
        Polynomial { ring: ring.clone(), terms: out }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.add_scaled_shifted(1, &Monomial::ONE, other)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let minus_one = self.field().neg(1);
        self.add_scaled_shifted(minus_one, &Monomial::ONE, other)
    }

    pub fn scale(&self, c: u32) -> Polynomial {
        if c == 0 {
            return Polynomial::zero(&self.ring);
        }
        let f = self.field();
        let terms = self.terms.iter().map(|&(m, x)| (m, f.mul(c, x))).collect();
        Polynomial { ring: self.ring.clone(), terms }
    }

    /// `c·m·self`. Panics on exponent overflow.
    pub fn mul_term(&self, m: &Monomial, c: u32) -> Polynomial {
        if c == 0 {
            return Polynomial::zero(&self.ring);
        }
        let f = self.field();
        let terms = self.terms.iter().map(|&(t, x)| (t.mul(m), f.mul(c, x))).collect();
        Polynomial { ring: self.ring.clone(), terms }
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other);
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero(&self.ring));
        }
        if other.terms.len() == 1 {
            let (m, c) = other.terms[0];
            return self.checked_mul_term(&m, c);
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms[0];
            return other.checked_mul_term(&m, c);
        }
        let f = self.field();
        let mut acc: HashMap<Monomial, u32> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                let m = ma.checked_mul(&mb).ok_or(PolyError::ExponentOverflow)?;
                let slot = acc.entry(m).or_insert(0);
                *slot = f.add(*slot, f.mul(ca, cb));
            }
        }
        Ok(Self::from_map(&self.ring, acc))
    }

    fn checked_mul_term(&self, m: &Monomial, c: u32) -> Result<Polynomial, PolyError> {
        let f = self.field();
        let terms = self
            .terms
            .iter()
            .map(|&(t, x)| t.checked_mul(m).map(|tm| (tm, f.mul(c, x))).ok_or(PolyError::ExponentOverflow))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Polynomial { ring: self.ring.clone(), terms })
    }

    /// `self^e`, splitting `e` in base `p` and using Frobenius for the `p`-power parts.
    pub fn pow(&self, e: u64) -> Result<Polynomial, PolyError> {
        if e == 0 {
            return Ok(Polynomial::one(&self.ring));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let p = self.field().characteristic() as u64;
        let mut result = Polynomial::one(&self.ring);
        let (mut e, mut k) = (e, 0u32);
        while e > 0 {
            let digit = e % p;
            if digit > 0 {
                let base = self.frobenius_power(k)?;
                for _ in 0..digit {
                    result = result.checked_mul(&base)?;
                }
            }
            e /= p;
            k += 1;
        }
        Ok(result)
    }

    /// `self^{p^m}`, computed termwise.
    pub fn frobenius_power(&self, m: u32) -> Result<Polynomial, PolyError> {
        let f = self.field();
        let scale = (f.characteristic() as u64).checked_pow(m).ok_or(PolyError::ExponentOverflow)?;
        let terms = self
            .terms
            .iter()
            .map(|&(t, c)| t.checked_scale(scale).map(|s| (s, f.frobenius(c, m))).ok_or(PolyError::ExponentOverflow))
            .collect::<Result<Vec<_>, _>>()?;
        // Scaling exponents uniformly preserves every supported order.
        Ok(Polynomial { ring: self.ring.clone(), terms })
    }

    /// Leading coefficient scaled to 1; zero stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading_coefficient() {
            None | Some(1) => self.clone(),
            Some(c) => self.scale(self.field().inv(c).expect("nonzero")),
        }
    }

    /// Substitutes `x_j ↦ Σ_i M_{ji} x_i` (row `j` is the image of `x_j`).
    pub fn apply_matrix(&self, m: &Matrix) -> Result<Polynomial, PolyError> {
        let n = self.ring.nvars();
        if m.rows() != n || m.cols() != n {
            return Err(PolyError::DimensionMismatch { expected: n, found: m.rows().max(m.cols()) });
        }
        if **m.field() != **self.field() {
            return Err(PolyError::Field(GfError::IncompatibleFields("matrix and ring fields differ".into())));
        }
        let f = self.field().clone();
        // Monomial matrices permute and scale variables; no expansion needed.
        let single: Option<Vec<(usize, u32)>> = (0..n)
            .map(|j| {
                let nz: Vec<usize> = (0..n).filter(|&i| m.get(j, i) != 0).collect();
                (nz.len() == 1).then(|| (nz[0], m.get(j, nz[0])))
            })
            .collect();
        if let Some(images) = single {
            let mut terms = Vec::with_capacity(self.terms.len());
            for &(t, c) in &self.terms {
                let mut out = Monomial::ONE;
                let mut coeff = c;
                for (j, &(i, a)) in images.iter().enumerate() {
                    let e = t.exp(j);
                    if e > 0 {
                        out.set(i, out.exp(i).checked_add(e).ok_or(PolyError::ExponentOverflow)?);
                        coeff = f.mul(coeff, f.pow(a, e as u64));
                    }
                }
                terms.push((out, coeff));
            }
            return Ok(Polynomial::from_terms(&self.ring, terms));
        }
        let images: Vec<Polynomial> = (0..n)
            .map(|j| Polynomial::from_terms(&self.ring, (0..n).map(|i| (Monomial::var(i, 1), m.get(j, i)))))
            .collect();
        self.substitute(&images)
    }

    /// Simultaneous substitution `x_j ↦ images[j]`; the result lives in the images' ring.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial, PolyError> {
        let n = self.ring.nvars();
        if images.len() != n {
            return Err(PolyError::DimensionMismatch { expected: n, found: images.len() });
        }
        let target = match images.first() {
            Some(p) => p.ring.clone(),
            None => self.ring.clone(),
        };
        if images.iter().any(|p| !same_ring(&p.ring, &target)) {
            return Err(PolyError::RingMismatch);
        }
        if **target.field() != **self.field() {
            return Err(PolyError::Field(GfError::IncompatibleFields("substitution changes the field".into())));
        }
        let mut powers: HashMap<(usize, u16), Polynomial> = HashMap::new();
        let mut total = Polynomial::zero(&target);
        for &(t, c) in &self.terms {
            let mut term = Polynomial::constant(&target, c);
            for (j, image) in images.iter().enumerate() {
                let e = t.exp(j);
                if e == 0 {
                    continue;
                }
                let pw = match powers.get(&(j, e)) {
                    Some(pw) => pw.clone(),
                    None => {
                        let pw = image.pow(e as u64)?;
                        powers.insert((j, e), pw.clone());
                        pw
                    }
                };
                term = term.checked_mul(&pw)?;
            }
            total = total.add(&term);
        }
        Ok(total)
    }

    /// Moves the polynomial to `target`, sending variable `i` to `map[i]`.
    pub fn map_vars(&self, target: &Ring, map: &[usize]) -> Result<Polynomial, PolyError> {
        if map.len() != self.ring.nvars() {
            return Err(PolyError::DimensionMismatch { expected: self.ring.nvars(), found: map.len() });
        }
        if **target.field() != **self.field() {
            return Err(PolyError::Field(GfError::IncompatibleFields("target ring has another field".into())));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(t, c) in &self.terms {
            let mut out = Monomial::ONE;
            for (i, &j) in map.iter().enumerate() {
                out.set(j, out.exp(j).checked_add(t.exp(i)).ok_or(PolyError::ExponentOverflow)?);
            }
            terms.push((out, c));
        }
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Re-sorts into a ring with the same variables but possibly another order.
    pub fn reorder(&self, target: &Ring) -> Polynomial {
        assert_eq!(target.variables(), self.ring.variables(), "reorder needs identical variables");
        let mut terms = self.terms.clone();
        terms.sort_unstable_by(|a, b| target.cmp(&b.0, &a.0));
        Polynomial { ring: target.clone(), terms }
    }

    /// Value at `point`, with coefficients embedded into the point's field.
    pub fn evaluate(&self, point: &[FieldElem]) -> Result<FieldElem, PolyError> {
        let n = self.ring.nvars();
        if point.len() != n {
            return Err(PolyError::DimensionMismatch { expected: n, found: point.len() });
        }
        let target = point.first().map_or_else(|| self.field().clone(), |x| x.field().clone());
        if point.iter().any(|x| **x.field() != *target) {
            return Err(PolyError::Field(GfError::IncompatibleFields("point coordinates lie in different fields".into())));
        }
        let coords: Vec<u32> = point.iter().map(FieldElem::code).collect();
        let code = self.evaluate_codes(&target, &coords)?;
        Ok(FieldElem::new(&target, code))
    }

    /// [`evaluate`](Self::evaluate) on raw codes of `target`.
    pub fn evaluate_codes(&self, target: &Field, point: &[u32]) -> Result<u32, PolyError> {
        let src = self.field();
        let mut acc = 0;
        for &(t, c) in &self.terms {
            let mut v = target.embed_code(src, c)?;
            for (j, &x) in point.iter().enumerate() {
                let e = t.exp(j);
                if e > 0 {
                    v = target.mul(v, target.pow(x, e as u64));
                }
            }
            acc = target.add(acc, v);
        }
        Ok(acc)
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Polynomial) -> Option<Polynomial> {
        self.check_ring(d);
        let (dm, dc) = d.terms.first()?;
        let f = self.field();
        let dinv = f.inv(*dc).expect("nonzero");
        let mut rem = self.clone();
        let mut quo = Vec::new();
        while let Some(&(m, c)) = rem.terms.first() {
            let q = m.div(dm)?;
            let qc = f.mul(c, dinv);
            quo.push((q, qc));
            rem = rem.add_scaled_shifted(f.neg(qc), &q, d);
        }
        Some(Polynomial::from_sorted(&self.ring, quo))
    }

    /// Sum of the terms of weighted degree `d`.
    pub fn homogeneous_component(&self, d: u32) -> Polynomial {
        let terms = self.terms.iter().filter(|t| self.ring.degree_of(&t.0) == d).copied().collect();
        Polynomial { ring: self.ring.clone(), terms }
    }

    fn format_term(&self, m: &Monomial, c: u32) -> String {
        let f = self.field();
        let mut factors = Vec::new();
        for i in 0..self.ring.nvars() {
            match m.exp(i) {
                0 => {}
                1 => factors.push(self.ring.var_name(i).to_string()),
                e => factors.push(format!("{}^{e}", self.ring.var_name(i))),
            }
        }
        let coeff = f.format(c);
        if factors.is_empty() {
            return if coeff.contains('+') { format!("({coeff})") } else { coeff };
        }
        let mono = factors.join("*");
        if c == 1 {
            mono
        } else if coeff.contains('+') {
            format!("({coeff})*{mono}")
        } else {
            format!("{coeff}*{mono}")
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| self.format_term(m, *c)).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::add(self, rhs)
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::sub(self, rhs)
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("exponent overflow")
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;
    use proptest::prelude::*;

    fn ring(p: u64, n: u32, vars: &[&str]) -> Ring {
        PolyRing::new(&FieldCtx::new(p, n).unwrap(), vars).unwrap()
    }

    #[test]
    fn parse_examples() {
        let r = ring(2, 1, &["x1", "x2", "x3", "x4"]);
        let c2 = r.parse("x1*x3 + x2*x4").unwrap();
        assert_eq!(c2.to_string(), "x1*x3 + x2*x4");
        assert!(r.parse("0").unwrap().terms().is_empty());
        let r4 = ring(2, 2, &["y"]);
        let f = r4.parse("w^2*y").unwrap();
        assert_eq!(f.terms(), &[(Monomial::var(0, 1), 3)]);
        assert_eq!(f.to_string(), "(w+1)*y");
        assert_eq!(r4.parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn parse_errors() {
        let r = ring(3, 1, &["x", "y"]);
        assert_eq!(r.parse("x + z"), Err(PolyError::UnknownVariable { name: "z".into(), pos: 4 }));
        assert!(matches!(r.parse("2x"), Err(PolyError::Syntax { pos: 1, .. })));
        assert!(matches!(r.parse("x^70000"), Err(PolyError::Syntax { .. } | PolyError::ExponentOverflow)));
    }

    #[test]
    fn ring_validation() {
        let f = FieldCtx::new(2, 2).unwrap();
        assert_eq!(PolyRing::new(&f, &["T1"]).unwrap_err(), PolyError::ReservedName("T1".into()));
        assert_eq!(PolyRing::new(&f, &["w"]).unwrap_err(), PolyError::GeneratorClash("w".into()));
        assert_eq!(PolyRing::new(&f, &["x", "x"]).unwrap_err(), PolyError::DuplicateVariable("x".into()));
        assert_eq!(PolyRing::new(&f, &["1x"]).unwrap_err(), PolyError::InvalidVariableName("1x".into()));
        let many: Vec<String> = (0..17).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = many.iter().map(String::as_str).collect();
        assert_eq!(PolyRing::new(&f, &refs).unwrap_err(), PolyError::TooManyVariables(17));
        assert!(PolyRing::internal(&f, vec!["T1".into()], MonomialOrder::Grevlex, vec![2]).is_ok());
    }

    #[test]
    fn evaluation_examples() {
        let r = ring(2, 1, &["x1", "x2", "x3", "x4"]);
        let c1 = r.parse("x1+x2+x3+x4").unwrap();
        let f2 = r.field().clone();
        let pt: Vec<FieldElem> = [1, 1, 0, 0].iter().map(|&c| FieldElem::new(&f2, c)).collect();
        assert!(c1.evaluate(&pt).unwrap().is_zero());
        assert!(Polynomial::zero(&r).evaluate(&pt).unwrap().is_zero());
        let r5 = ring(5, 1, &["x"]);
        let x4 = r5.parse("x^4").unwrap();
        assert!(x4.evaluate(&[FieldElem::from_int(r5.field(), 2)]).unwrap().is_one());
        // Coefficients are embedded into the point's field.
        let f4 = FieldCtx::new(2, 2).unwrap();
        let w = FieldElem::generator(&f4).unwrap();
        let g = r.parse("x1*x2 + x3").unwrap();
        let v = g.evaluate(&[w.clone(), w.clone(), FieldElem::one(&f4), FieldElem::zero(&f4)]).unwrap();
        assert_eq!(v, &(&w * &w) + &FieldElem::one(&f4));
        assert!(matches!(g.evaluate(&pt[..2]), Err(PolyError::DimensionMismatch { .. })));
    }

    #[test]
    fn frobenius_examples() {
        let r = ring(2, 1, &["x1", "x2"]);
        let f = r.parse("x1+x2").unwrap();
        assert_eq!(f.frobenius_power(1).unwrap(), r.parse("x1^2+x2^2").unwrap());
        assert_eq!(f.frobenius_power(0).unwrap(), f);
        let r4 = ring(2, 2, &["x"]);
        assert_eq!(r4.parse("w*x").unwrap().frobenius_power(1).unwrap().to_string(), "(w+1)*x^2");
        assert_eq!(r.parse("x1^40000").unwrap().frobenius_power(1), Err(PolyError::ExponentOverflow));
    }

    #[test]
    fn apply_matrix_examples() {
        let r = ring(2, 1, &["x1", "x2"]);
        let f2 = r.field().clone();
        let x1 = r.parse("x1").unwrap();
        assert_eq!(x1.apply_matrix(&Matrix::identity(&f2, 2)).unwrap(), x1);
        let swap = Matrix::parse(&f2, "[[0,1],[1,0]]").unwrap();
        assert_eq!(x1.apply_matrix(&swap).unwrap(), r.parse("x2").unwrap());
        let r5 = ring(5, 1, &["x", "y"]);
        let f5 = r5.field().clone();
        let zeta = FieldElem::from_int(&f5, 2);
        let zinv = zeta.inverse().unwrap();
        let m = Matrix::from_rows(&f5, &[vec![zinv.code(), 0], vec![0, zinv.code()]]).unwrap();
        assert_eq!(r5.parse("y").unwrap().apply_matrix(&m).unwrap().to_string(), "3*y");
        assert!(matches!(x1.apply_matrix(&Matrix::identity(&f2, 3)), Err(PolyError::DimensionMismatch { .. })));
        let shear = Matrix::parse(&f5, "[[1,0],[2,1]]").unwrap();
        assert_eq!(r5.parse("y^2").unwrap().apply_matrix(&shear).unwrap(), r5.parse("(2*x+y)^2").unwrap());
    }

    #[test]
    fn exact_division_and_monomial_counts() {
        let r = ring(3, 1, &["x", "y"]);
        let a = r.parse("x^2 - y^2").unwrap();
        let b = r.parse("x + y").unwrap();
        assert_eq!(a.exact_div(&b).unwrap(), r.parse("x - y").unwrap());
        assert!(r.parse("x^2 + y").unwrap().exact_div(&b).is_none());
        assert_eq!(r.monomials_of_degree(3).len() as u64, r.count_monomials_of_degree(3));
        let mons = r.monomials_of_degree(2);
        assert_eq!(mons[0], Monomial::var(0, 2));
    }

    fn arb_poly(r: Ring) -> impl Strategy<Value = Polynomial> {
        let n = r.nvars();
        let q = r.field().order();
        proptest::collection::vec((proptest::collection::vec(0u32..4, n), 0..q), 0..6)
            .prop_map(move |ts| Polynomial::from_terms(&r, ts.into_iter().map(|(e, c)| (Monomial::from_exponents(&e).unwrap(), c))))
    }

    fn test_ring() -> Ring {
        ring(3, 1, &["a", "b", "c"])
    }

    fn test_ring_f4() -> Ring {
        ring(2, 2, &["u", "v"])
    }

    proptest! {
        #[test]
        fn ring_axioms(f in arb_poly(test_ring()), g in arb_poly(test_ring()), h in arb_poly(test_ring())) {
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
            prop_assert_eq!(&f + &g, &g + &f);
            prop_assert_eq!(&(&f - &g) + &g, f.clone());
        }

        #[test]
        fn print_parse_roundtrip(f in arb_poly(test_ring_f4())) {
            prop_assert_eq!(f.ring().parse(&f.to_string()).unwrap(), f);
        }

        #[test]
        fn frobenius_matches_naive_power(f in arb_poly(test_ring_f4()), m in 0u32..3) {
            let e = 2u64.pow(m);
            let naive = (0..e).fold(Polynomial::one(f.ring()), |acc, _| &acc * &f);
            prop_assert_eq!(f.frobenius_power(m).unwrap(), naive);
        }

        #[test]
        fn pow_matches_naive(f in arb_poly(test_ring()), e in 0u64..8) {
            let naive = (0..e).fold(Polynomial::one(f.ring()), |acc, _| &acc * &f);
            prop_assert_eq!(f.pow(e).unwrap(), naive);
        }

        #[test]
        fn substitution_composes(f in arb_poly(test_ring()),
                                                 a in proptest::collection::vec(0u32..3, 9),
                                                 b in proptest::collection::vec(0u32..3, 9)) {
            let r = test_ring();
            let fld = r.field().clone();
            let ma = Matrix::from_rows(&fld, &a.chunks(3).map(<[u32]>::to_vec).collect::<Vec<_>>()).unwrap();
            let mb = Matrix::from_rows(&fld, &b.chunks(3).map(<[u32]>::to_vec).collect::<Vec<_>>()).unwrap();
            let lhs = f.apply_matrix(&ma).unwrap().apply_matrix(&mb).unwrap();
            // Row j is the image of x_j, so substituting A then B is substituting A·B.
            let rhs = f.apply_matrix(&ma.mul(&mb).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn evaluation_is_a_homomorphism(f in arb_poly(test_ring()), g in arb_poly(test_ring()),
                                        pt in proptest::collection::vec(0u32..9, 3)) {
            let target = FieldCtx::new(3, 2).unwrap();
            let point: Vec<FieldElem> = pt.iter().map(|&c| FieldElem::new(&target, c)).collect();
            let (fv, gv) = (f.evaluate(&point).unwrap(), g.evaluate(&point).unwrap());
            prop_assert_eq!((&f + &g).evaluate(&point).unwrap(), &fv + &gv);
            prop_assert_eq!((&f * &g).evaluate(&point).unwrap(), &fv * &gv);
        }
    }
}
