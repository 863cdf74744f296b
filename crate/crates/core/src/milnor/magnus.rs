use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Default truncation degree.
pub const DEFAULT_DEGREE: usize = 3;

/// A word in the non-commuting variables `X_0, X_1, …`.
pub type Word = Vec<usize>;

/// Truncated power series in non-commuting variables with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagnusSeries {
    degree: usize,
    coeffs: BTreeMap<Word, BigInt>,
}

impl MagnusSeries {
    pub fn zero(degree: usize) -> Self {
        Self { degree, coeffs: BTreeMap::new() }
    }

    pub fn one(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        s.coeffs.insert(Vec::new(), BigInt::one());
        s
    }

    /// `X_i`.
    pub fn variable(i: usize, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        if degree >= 1 {
            s.coeffs.insert(vec![i], BigInt::one());
        }
        s
    }

    /// Image of `g_i^e`: `1 + X_i` for `e = 1`, `1 - X_i + X_i² - …` for `e = -1`.
    pub fn generator(i: usize, exponent: i64, degree: usize) -> Self {
        let base = if exponent >= 0 {
            Self::one(degree).add(&Self::variable(i, degree))
        } else {
            let mut s = Self::zero(degree);
            for k in 0..=degree {
                let c = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                s.coeffs.insert(vec![i; k], c);
            }
            s
        };
        base.pow(exponent.unsigned_abs())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficient(&self, word: &[usize]) -> BigInt {
        self.coeffs.get(word).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Non-zero coefficients in word order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.coeffs.iter()
    }

    fn insert_add(&mut self, w: Word, c: BigInt) {
        if c.is_zero() || w.len() > self.degree {
            return;
        }
        let e = self.coeffs.entry(w.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&w);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self { degree: self.degree.min(other.degree), coeffs: BTreeMap::new() };
        for (w, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.insert_add(w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product truncated at the smaller degree.
    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.degree.min(other.degree);
        let mut out = Self::zero(degree);
        for (w1, c1) in &self.coeffs {
            for (w2, c2) in &other.coeffs {
                if w1.len() + w2.len() <= degree {
                    let mut w = w1.clone();
                    w.extend_from_slice(w2);
                    out.insert_add(w, c1 * c2);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut out = Self::one(self.degree);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Inverse of a series with constant term `±1`.
    pub fn inverse(&self) -> Option<Self> {
        let c0 = self.coefficient(&[]);
        if !(c0.is_one() || (-c0.clone()).is_one()) {
            return None;
        }
        // s = c0 (1 + y), s⁻¹ = c0 Σ (-y)^k.
        let scaled = if c0.is_negative() { self.neg() } else { self.clone() };
        let y = scaled.sub(&Self::one(self.degree));
        let mut term = Self::one(self.degree);
        let mut sum = Self::one(self.degree);
        for _ in 0..self.degree {
            term = term.mul(&y.neg());
            sum = sum.add(&term);
        }
        Some(if c0.is_negative() { sum.neg() } else { sum })
    }

    /// `b⁻¹ a b` for invertible `b`.
    pub fn conjugate(&self, by: &Self) -> Self {
        by.inverse().expect("conjugating series is a unit").mul(self).mul(by)
    }
}

impl fmt::Display for MagnusSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if w.is_empty() {
                write!(f, "{c}")?;
            } else {
                let name: Vec<String> = w.iter().map(|i| format!("X{}", i + 1)).collect();
                write!(f, "{c}*{}", name.join(""))?;
            }
        }
        Ok(())
    }
}
