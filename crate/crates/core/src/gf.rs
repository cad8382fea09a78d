//! Finite fields `F_{p^n}`.
//!
//! An element is stored as a code `Σ c_i p^i`, where `c_0 + c_1 w + … +
//! c_{n-1} w^{n-1}` is its representative modulo the defining polynomial.
//! Codes `0..p` are exactly the prime subfield. Hot paths elsewhere in the
//! crate work on raw codes through a [`FieldCtx`]; [`FieldElem`] is the
//! checked public wrapper.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::expr::{self, ExprAlgebra, ExprError};

/// Largest supported field order.
pub const FIELD_SIZE_CAP: u64 = 1 << 20;

pub type Field = Arc<FieldCtx>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not a prime")]
    CompositeP(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^{n} exceeds the supported size 2^20")]
    SizeCap { p: u64, n: u32 },
    #[error("modulus {0} is not a monic irreducible polynomial of the requested degree")]
    BadModulus(String),
    #[error("`{0}` cannot be used as the field generator name")]
    BadGeneratorName(String),
    #[error("no element of multiplicative order {r} in a field of order {q}")]
    NoSuchRoot { r: u64, q: u64 },
    #[error("incompatible fields: {0}")]
    IncompatibleFields(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error(transparent)]
    Parse(#[from] ExprError),
}

/// Immutable description of `F_{p^n}` with precomputed log/exp tables.
pub struct FieldCtx {
    p: u32,
    n: u32,
    q: u32,
    /// Monic modulus, coefficients low to high, length `n + 1`; `None` for prime fields.
    modulus: Option<Vec<u32>>,
    generator: String,
    /// `exp[i] = g^i` for a fixed primitive `g`; extension fields only.
    exp: Vec<u32>,
    /// Inverse of `exp` on nonzero codes.
    log: Vec<u32>,
    /// Smallest root of a source modulus in this field, keyed by that modulus.
    roots: RwLock<HashMap<Vec<u32>, u32>>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_size(p: u64, n: u32) -> Result<u32, GfError> {
    if !is_prime(p) {
        return Err(GfError::CompositeP(p));
    }
    if n == 0 {
        return Err(GfError::ZeroDegree);
    }
    let mut q: u64 = 1;
    for _ in 0..n {
        q = q.saturating_mul(p);
        if q > FIELD_SIZE_CAP {
            return Err(GfError::SizeCap { p, n });
        }
    }
    Ok(q as u32)
}

/// Dense polynomials over `Z_p`, coefficients low to high, no trailing zeros.
mod zp {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv(a: u32, p: u32) -> u32 {
        super::inv_mod(a, p).expect("nonzero residue")
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r = vec![0; a.len().max(b.len())];
        for (i, slot) in r.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *slot = (x + p - y) % p;
        }
        trim(&mut r);
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut r: Vec<u32> = r.into_iter().map(|c| c as u32).collect();
        trim(&mut r);
        r
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv(b[db], p);
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut quo = vec![0; r.len() - db];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
            quo[shift] = c;
            for (j, &y) in b.iter().enumerate() {
                let t = (c as u64 * y as u64 % p as u64) as u32;
                r[shift + j] = (r[shift + j] + p - t) % p;
            }
            trim(&mut r);
        }
        trim(&mut quo);
        (quo, r)
    }

    /// `s` with `s·a ≡ 1 (mod m)`, provided `gcd(a, m) = 1`.
    pub fn inverse_mod(a: &[u32], m: &[u32], p: u32) -> Option<Vec<u32>> {
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        trim(&mut r1);
        let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s2 = sub(&s0, &mul(&q, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if r0.len() != 1 {
            return None;
        }
        let c = inv(r0[0], p);
        Some(s0.iter().map(|&x| (x as u64 * c as u64 % p as u64) as u32).collect())
    }

    /// Irreducibility by exhaustive trial division with all monic polynomials
    /// of degree at most half the degree.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let n = f.len() - 1;
        if n == 0 {
            return false;
        }
        for d in 1..=n / 2 {
            let count = (p as u64).pow(d as u32);
            for code in 0..count {
                let mut g = Vec::with_capacity(d + 1);
                let mut c = code;
                for _ in 0..d {
                    g.push((c % p as u64) as u32);
                    c /= p as u64;
                }
                g.push(1);
                if divrem(f, &g, p).1.is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

fn inv_mod(a: u32, p: u32) -> Option<u32> {
    let (mut r0, mut r1) = (p as i64, (a % p) as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(p as i64) as u32)
}

fn distinct_prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Lexicographically smallest monic irreducible polynomial of degree `n` over
/// `F_p`, coefficients low to high. Returns `[0, 1]` (the placeholder `w`) for `n = 1`.
pub fn find_irreducible(p: u64, n: u32) -> Result<Vec<u32>, GfError> {
    let q = check_size(p, n)?;
    let p = p as u32;
    // Codes enumerate the lower coefficients with the highest one most
    // significant, so increasing code is lexicographic order.
    for code in 0..q {
        let mut f = Vec::with_capacity(n as usize + 1);
        let mut c = code;
        for _ in 0..n {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        if zp::is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn format_zp_poly(f: &[u32], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, &c) in f.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        parts.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

impl FieldCtx {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Field, GfError> {
        check_size(p, 1)?;
        Ok(Arc::new(Self::assemble(p as u32, 1, None, "w".into())))
    }

    /// `F_{p^n}` with the canonical (smallest) modulus and generator `w`.
    pub fn new(p: u64, n: u32) -> Result<Field, GfError> {
        Self::with_generator(p, n, "w")
    }

    pub fn with_generator(p: u64, n: u32, generator: &str) -> Result<Field, GfError> {
        if n == 1 {
            return Self::prime(p);
        }
        let modulus = find_irreducible(p, n)?;
        Self::with_modulus(p, &modulus, generator)
    }

    /// `F_p[w]/(modulus)`; `modulus` is monic, low to high, and is verified irreducible.
    pub fn with_modulus(p: u64, modulus: &[u32], generator: &str) -> Result<Field, GfError> {
        if !expr::is_identifier(generator) {
            return Err(GfError::BadGeneratorName(generator.into()));
        }
        let n = modulus.len().saturating_sub(1) as u32;
        check_size(p, n.max(1))?;
        let p32 = p as u32;
        let shown = format_zp_poly(modulus, generator);
        if n == 0 || modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p32) {
            return Err(GfError::BadModulus(shown));
        }
        if n == 1 {
            return Self::prime(p);
        }
        if !zp::is_irreducible(modulus, p32) {
            return Err(GfError::BadModulus(shown));
        }
        Ok(Arc::new(Self::assemble(p32, n, Some(modulus.to_vec()), generator.into())))
    }

    fn assemble(p: u32, n: u32, modulus: Option<Vec<u32>>, generator: String) -> Self {
        let q = p.pow(n);
        let mut ctx = FieldCtx {
            p,
            n,
            q,
            modulus,
            generator,
            exp: Vec::new(),
            log: Vec::new(),
            roots: RwLock::new(HashMap::new()),
        };
        if n > 1 {
            ctx.build_tables();
        }
        ctx
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let m = self.modulus.as_ref().expect("extension field");
        let prod = zp::mul(&self.digits(a), &self.digits(b), self.p);
        self.from_digits(&zp::divrem(&prod, m, self.p).1)
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&mut self) {
        let order = (self.q - 1) as u64;
        let factors = distinct_prime_factors(order);
        let g = (2..self.q)
            .find(|&g| factors.iter().all(|&l| self.slow_pow(g, order / l) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; self.q as usize];
        let mut x = 1;
        for i in 0..order as u32 {
            exp.push(x);
            log[x as usize] = i;
            x = self.slow_mul(x, g);
        }
        debug_assert_eq!(x, 1);
        self.exp = exp;
        self.log = log;
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Number of elements `p^n`.
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.n == 1
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    pub fn generator_name(&self) -> &str {
        &self.generator
    }

    /// `"F_5"` or `"F_4 = F_2[w]/(w^2+w+1)"`.
    pub fn describe(&self) -> String {
        match &self.modulus {
            None => format!("F_{}", self.p),
            Some(m) => format!("F_{} = F_{}[{}]/({})", self.q, self.p, self.generator, format_zp_poly(m, &self.generator)),
        }
    }

    /// Code of the generator `w` (equal to `p`); `None` for prime fields.
    pub fn generator_code(&self) -> Option<u32> {
        (self.n > 1).then_some(self.p)
    }

    pub fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.n as usize);
        for _ in 0..self.n {
            d.push(a % self.p);
            a /= self.p;
        }
        d
    }

    /// Inverse of [`digits`](Self::digits); missing high digits are zero.
    pub fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c % self.p)
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if self.n == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else {
            let (mut a, mut b, mut place, mut out) = (a, b, 1, 0);
            while a > 0 || b > 0 {
                out += (a % self.p + b % self.p) % self.p * place;
                a /= self.p;
                b /= self.p;
                place *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            a
        } else if self.n == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let (mut a, mut place, mut out) = (a, 1, 0);
            while a > 0 {
                out += (self.p - a % self.p) % self.p * place;
                a /= self.p;
                place *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.n == 1 {
            (a as u64 * b as u64 % self.p as u64) as u32
        } else if a == 0 || b == 0 {
            0
        } else {
            let s = self.log[a as usize] + self.log[b as usize];
            let m = self.q - 1;
            self.exp[(if s >= m { s - m } else { s }) as usize]
        }
    }

    /// Multiplicative inverse by extended Euclid; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        match &self.modulus {
            None => inv_mod(a, self.p),
            Some(m) => zp::inverse_mod(&self.digits(a), m, self.p).map(|s| self.from_digits(&s)),
        }
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let m = (self.q - 1) as u64;
        if self.n == 1 {
            let p = self.p as u64;
            let (mut base, mut acc, mut e) = (a as u64, 1u64, e % m);
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base % p;
                }
                base = base * base % p;
                e >>= 1;
            }
            acc as u32
        } else {
            let l = self.log[a as usize] as u64;
            self.exp[(l * (e % m) % m) as usize]
        }
    }

    /// `a^{p^m}`.
    pub fn frobenius(&self, a: u32, m: u32) -> u32 {
        let k = m % self.n;
        self.pow(a, (self.p as u64).pow(k))
    }

    /// Exact multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: u32) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let mut ord = (self.q - 1) as u64;
        for l in distinct_prime_factors(ord) {
            while ord.is_multiple_of(l) && self.pow(a, ord / l) == 1 {
                ord /= l;
            }
        }
        Some(ord)
    }

    /// Smallest element (by code) of exact multiplicative order `r`.
    pub fn root_of_unity_code(&self, r: u64) -> Result<u32, GfError> {
        let m = (self.q - 1) as u64;
        if r == 0 || !m.is_multiple_of(r) {
            return Err(GfError::NoSuchRoot { r, q: self.q as u64 });
        }
        Ok((1..self.q).find(|&a| self.multiplicative_order(a) == Some(r)).expect("cyclic group has every divisor order"))
    }

    /// Image of the code `a` of `source` under the fixed embedding into `self`.
    pub fn embed_code(&self, source: &FieldCtx, a: u32) -> Result<u32, GfError> {
        if source.p != self.p || !self.n.is_multiple_of(source.n) {
            return Err(GfError::IncompatibleFields(format!(
                "{} does not embed into {}",
                source.describe(),
                self.describe()
            )));
        }
        if a >= source.q {
            return Err(GfError::IncompatibleFields(format!("{a} is not an element of {}", source.describe())));
        }
        let Some(m) = &source.modulus else {
            return Ok(a);
        };
        if source == self {
            return Ok(a);
        }
        let z = self.root_of(m);
        Ok(source.digits(a).iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, z), c)))
    }

    fn root_of(&self, m: &[u32]) -> u32 {
        if let Some(&z) = self.roots.read().expect("root cache poisoned").get(m) {
            return z;
        }
        let eval = |z: u32| m.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, z), c));
        let z = (0..self.q).find(|&z| eval(z) == 0).expect("subfield modulus splits in the extension");
        self.roots.write().expect("root cache poisoned").insert(m.to_vec(), z);
        z
    }

    /// Canonical text: decimal for prime fields, a polynomial in the generator otherwise.
    pub fn format(&self, a: u32) -> String {
        match &self.modulus {
            None => a.to_string(),
            Some(_) => format_zp_poly(&self.digits(a), &self.generator),
        }
    }

    /// Parses the grammar produced by [`format`](Self::format) (plus `-`, `*`, `^` and parentheses).
    pub fn parse_code(&self, text: &str) -> Result<u32, GfError> {
        Ok(expr::parse_with(&CodeAlgebra(self), text)?)
    }
}

struct CodeAlgebra<'a>(&'a FieldCtx);

impl ExprAlgebra for CodeAlgebra<'_> {
    type Value = u32;

    fn integer(&self, digits: &str) -> Result<u32, String> {
        let p = self.0.p as u64;
        Ok(digits.bytes().fold(0u64, |acc, d| (acc * 10 + (d - b'0') as u64) % p) as u32)
    }

    fn symbol(&self, name: &str) -> Option<u32> {
        (self.0.n > 1 && name == self.0.generator).then_some(self.0.p)
    }

    fn add(&self, a: u32, b: u32) -> Result<u32, String> {
        Ok(self.0.add(a, b))
    }

    fn sub(&self, a: u32, b: u32) -> Result<u32, String> {
        Ok(self.0.sub(a, b))
    }

    fn mul(&self, a: u32, b: u32) -> Result<u32, String> {
        Ok(self.0.mul(a, b))
    }

    fn neg(&self, a: u32) -> Result<u32, String> {
        Ok(self.0.neg(a))
    }

    fn pow(&self, a: u32, e: u64) -> Result<u32, String> {
        Ok(self.0.pow(a, e))
    }
}

/// `Z_p` residue helper shared with callers that need prime-field inverses.
pub fn inverse_mod_p(a: u32, p: u32) -> Option<u32> {
    inv_mod(a, p)
}

/// An element of a specific field. Arithmetic between different fields panics;
/// the `checked_*` methods report [`GfError::IncompatibleFields`] instead.
#[derive(Clone)]
pub struct FieldElem {
    field: Field,
    code: u32,
}

impl FieldElem {
    pub fn new(field: &Field, code: u32) -> Self {
        assert!(code < field.q, "code {code} out of range for {}", field.describe());
        FieldElem { field: field.clone(), code }
    }

    pub fn zero(field: &Field) -> Self {
        Self::new(field, 0)
    }

    pub fn one(field: &Field) -> Self {
        Self::new(field, 1)
    }

    /// Integer `k` reduced into the prime subfield.
    pub fn from_int(field: &Field, k: i64) -> Self {
        Self::new(field, k.rem_euclid(field.p as i64) as u32)
    }

    /// The generator `w`; `None` for prime fields.
    pub fn generator(field: &Field) -> Option<Self> {
        field.generator_code().map(|c| Self::new(field, c))
    }

    pub fn parse(field: &Field, text: &str) -> Result<Self, GfError> {
        Ok(Self::new(field, field.parse_code(text)?))
    }

    pub fn root_of_unity(field: &Field, r: u64) -> Result<Self, GfError> {
        Ok(Self::new(field, field.root_of_unity_code(r)?))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    /// Coefficients in the generator, low to high.
    pub fn coeffs(&self) -> Vec<u32> {
        self.field.digits(self.code)
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    pub fn is_one(&self) -> bool {
        self.code == 1
    }

    fn same_field(&self, other: &Self) -> Result<(), GfError> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(GfError::IncompatibleFields(format!(
                "{} vs {}",
                self.field.describe(),
                other.field.describe()
            )))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        Ok(Self { field: self.field.clone(), code: self.field.add(self.code, other.code) })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        Ok(Self { field: self.field.clone(), code: self.field.sub(self.code, other.code) })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        Ok(Self { field: self.field.clone(), code: self.field.mul(self.code, other.code) })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        let code = self.field.div(self.code, other.code).ok_or(GfError::DivisionByZero)?;
        Ok(Self { field: self.field.clone(), code })
    }

    pub fn inverse(&self) -> Option<Self> {
        self.field.inv(self.code).map(|code| Self { field: self.field.clone(), code })
    }

    pub fn pow(&self, e: u64) -> Self {
        Self { field: self.field.clone(), code: self.field.pow(self.code, e) }
    }

    /// `self^{p^m}`.
    pub fn frobenius(&self, m: u32) -> Self {
        Self { field: self.field.clone(), code: self.field.frobenius(self.code, m) }
    }

    pub fn multiplicative_order(&self) -> Option<u64> {
        self.field.multiplicative_order(self.code)
    }

    /// Image under the fixed embedding into `target`.
    pub fn embed(&self, target: &Field) -> Result<Self, GfError> {
        Ok(Self { field: target.clone(), code: target.embed_code(&self.field, self.code)? })
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code && self.same_field(other).is_ok()
    }
}

impl Eq for FieldElem {}

impl std::hash::Hash for FieldElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.code.hash(state);
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format(self.code))
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.field.describe())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { field: self.field.clone(), code: self.field.neg(self.code) }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}
