//! Integer polynomials in one variable `t`, used for Hilbert series numerators.

use std::fmt;

/// Dense integer polynomial; `coeffs[i]` is the coefficient of `t^i`, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(c: i64, d: u32) -> Self {
        let mut coeffs = vec![0; d as usize + 1];
        coeffs[d as usize] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    /// `1 - t^e`.
    pub fn one_minus_t_pow(e: u32) -> Self {
        Self::one().sub(&Self::monomial(1, e))
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> i64 {
        self.coeffs.get(d).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    /// Multiplication by `t^d`.
    pub fn shift(&self, d: u32) -> IntPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0; d as usize];
        coeffs.extend_from_slice(&self.coeffs);
        IntPoly { coeffs }
    }

    /// Exact quotient by a divisor with constant term `±1`, or `None`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        let d0 = d.coeff(0);
        if d0 != 1 && d0 != -1 {
            return None;
        }
        let dn = d.coeffs.len();
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n == 0 {
            return Some(Self::zero());
        }
        if n < dn {
            return None;
        }
        // Power-series division from the low end.
        let mut quo = vec![0i64; n - dn + 1];
        for i in 0..quo.len() {
            let q = rem[i] * d0;
            quo[i] = q;
            for (j, &c) in d.coeffs.iter().enumerate() {
                rem[i + j] -= q * c;
            }
        }
        rem.iter().all(|&c| c == 0).then(|| Self::from_coeffs(quo))
    }

    /// Value at `t = x`.
    pub fn eval(&self, x: i64) -> i64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * x + c)
    }

    /// Parses `1+2t^4-t^8`-style text (optional spaces and `*`).
    pub fn parse(text: &str) -> Option<IntPoly> {
        let s: String = text.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        if s.is_empty() {
            return None;
        }
        let mut total = IntPoly::zero();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -1;
                }
                i += 1;
            } else if i > 0 {
                return None;
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coeff: Option<i64> = if i > start { Some(s[start..i].parse().ok()?) } else { None };
            let mut exp = 0u32;
            if i < bytes.len() && bytes[i] == b't' {
                i += 1;
                exp = 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let es = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    exp = s[es..i].parse().ok()?;
                }
            } else if coeff.is_none() {
                return None;
            }
            total = total.add(&IntPoly::monomial(sign * coeff.unwrap_or(1), exp));
        }
        Some(total)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            let body = match (d, mag) {
                (0, _) => mag.to_string(),
                (1, 1) => "t".into(),
                (1, _) => format!("{mag}t"),
                (_, 1) => format!("t^{d}"),
                _ => format!("{mag}t^{d}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_and_parse() {
        let p = IntPoly::from_coeffs(vec![1, 0, 0, 0, 2, 0, 0, 0, 1]);
        assert_eq!(p.to_string(), "1+2t^4+t^8");
        assert_eq!(IntPoly::parse("1+2t^4+t^8").unwrap(), p);
        assert_eq!(IntPoly::parse("1 - t").unwrap(), IntPoly::one_minus_t_pow(1));
        assert_eq!(IntPoly::parse("-3t^2+t").unwrap().to_string(), "t-3t^2");
        assert!(IntPoly::parse("1+").is_none());
        assert!(IntPoly::parse("x").is_none());
    }

    #[test]
    fn exact_division() {
        let a = IntPoly::one_minus_t_pow(4);
        let b = IntPoly::one_minus_t_pow(1);
        assert_eq!(a.div_exact(&b).unwrap(), IntPoly::from_coeffs(vec![1, 1, 1, 1]));
        assert!(IntPoly::one_minus_t_pow(3).div_exact(&IntPoly::one_minus_t_pow(2)).is_none());
    }

    proptest! {
        #[test]
        fn division_inverts_multiplication(a in proptest::collection::vec(-5i64..5, 0..6), e in 1u32..6) {
            let a = IntPoly::from_coeffs(a);
            let d = IntPoly::one_minus_t_pow(e);
            prop_assert_eq!(a.mul(&d).div_exact(&d).unwrap(), a.clone());
            prop_assert_eq!(IntPoly::parse(&a.to_string()).unwrap(), a);
        }
    }
}
