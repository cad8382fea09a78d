use std::cmp::Ordering;
use std::fmt;

/// Upper bound on the number of variables of any ring.
pub const MAX_VARS: usize = 16;

/// Exponent vector. Unused slots beyond the ring's variable count stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.exps.iter().rposition(|&e| e != 0).map_or(0, |i| i + 1);
        write!(f, "{:?}", &self.exps[..last])
    }
}

impl Monomial {
    pub const ONE: Monomial = Monomial { exps: [0; MAX_VARS] };

    /// Fails if there are more than [`MAX_VARS`] entries or an entry exceeds `u16::MAX`.
    pub fn from_exponents(exps: &[u32]) -> Option<Monomial> {
        if exps.len() > MAX_VARS {
            return None;
        }
        let mut m = Monomial::ONE;
        for (slot, &e) in m.exps.iter_mut().zip(exps) {
            *slot = u16::try_from(e).ok()?;
        }
        Some(m)
    }

    pub fn var(i: usize, e: u16) -> Monomial {
        let mut m = Monomial::ONE;
        m.exps[i] = e;
        m
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn exponents(&self) -> &[u16; MAX_VARS] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    #[inline]
    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        weights.iter().zip(&self.exps).map(|(&w, &e)| w * e as u32).sum()
    }

    /// Bit `i` set iff variable `i` occurs.
    #[inline]
    pub fn support_mask(&self) -> u32 {
        self.exps.iter().enumerate().fold(0, |m, (i, &e)| if e > 0 { m | (1 << i) } else { m })
    }

    pub fn checked_mul(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Monomial::ONE;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].checked_add(other.exps[i])?;
        }
        Some(out)
    }

    /// Panics on exponent overflow.
    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.checked_mul(other).expect("monomial exponent overflow")
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Monomial::ONE;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].checked_sub(other.exps[i])?;
        }
        Some(out)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = Monomial::ONE;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].max(other.exps[i]);
        }
        out
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Monomial::ONE;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].min(other.exps[i]);
        }
        out
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.support_mask() & other.support_mask() == 0
    }

    /// Every exponent multiplied by `k`.
    pub fn checked_scale(&self, k: u64) -> Option<Monomial> {
        let mut out = Monomial::ONE;
        for i in 0..MAX_VARS {
            let e = self.exps[i] as u64 * k;
            out.exps[i] = u16::try_from(e).ok()?;
        }
        Some(out)
    }

    pub(crate) fn set(&mut self, i: usize, e: u16) {
        self.exps[i] = e;
    }

    /// Exponent `i` replaced by zero.
    pub fn without(&self, i: usize) -> Monomial {
        let mut m = *self;
        m.exps[i] = 0;
        m
    }
}

/// Monomial orders. All are refined by the ring's positive weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Weighted degree, ties broken reverse-lexicographically.
    Grevlex,
    Lex,
    /// Block order: weighted grevlex on the first `k` variables, then on the rest.
    Elim(usize),
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonomialOrder::Grevlex => f.write_str("grevlex"),
            MonomialOrder::Lex => f.write_str("lex"),
            MonomialOrder::Elim(k) => write!(f, "elim({k})"),
        }
    }
}

#[inline]
fn grevlex_block(a: &Monomial, b: &Monomial, weights: &[u32], lo: usize, hi: usize) -> Ordering {
    let da: u32 = (lo..hi).map(|i| weights[i] * a.exps[i] as u32).sum();
    let db: u32 = (lo..hi).map(|i| weights[i] * b.exps[i] as u32).sum();
    if da != db {
        return da.cmp(&db);
    }
    for i in (lo..hi).rev() {
        if a.exps[i] != b.exps[i] {
            return b.exps[i].cmp(&a.exps[i]);
        }
    }
    Ordering::Equal
}

impl MonomialOrder {
    /// Compares monomials of a ring whose weight vector is `weights`.
    #[inline]
    pub fn cmp(&self, a: &Monomial, b: &Monomial, weights: &[u32]) -> Ordering {
        let n = weights.len();
        match *self {
            MonomialOrder::Grevlex => grevlex_block(a, b, weights, 0, n),
            MonomialOrder::Lex => a.exps[..n].cmp(&b.exps[..n]),
            MonomialOrder::Elim(k) => {
                let k = k.min(n);
                grevlex_block(a, b, weights, 0, k).then_with(|| grevlex_block(a, b, weights, k, n))
            }
        }
    }
}
