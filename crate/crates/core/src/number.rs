//! Exact scalars.
//!
//! `Q` is the coefficient field of every polynomial in the crate. `ExpNum`
//! extends it by the exponentials `e^q` of rational numbers: values of the
//! flat functions at rational points land in this ring. By the
//! Lindemann–Weierstrass theorem the numbers `e^q` for distinct rational
//! `q` are linearly independent over the algebraic numbers, so the sparse
//! map below is a canonical form and equality is decided structurally.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Natural log of |x| for a nonzero rational, robust to huge numerators.
fn ln_abs(x: &Q) -> f64 {
    let n = x.numer().abs();
    let d = x.denom().clone();
    ln_bigint(&n) - ln_bigint(&d)
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        n.to_f64().unwrap().ln()
    } else {
        let shift = bits - 900;
        let top: BigInt = n >> shift;
        top.to_f64().unwrap().ln() + (shift as f64) * std::f64::consts::LN_2
    }
}

/// Exact number `Σ c_q · e^q` with rational `q` and `c_q`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExpNum {
    terms: BTreeMap<Q, Q>,
}

impl ExpNum {
    pub fn zero() -> Self {
        ExpNum::default()
    }

    pub fn rational(c: Q) -> Self {
        ExpNum::exp_term(c, Q::zero())
    }

    /// `c · e^exponent`
    pub fn exp_term(c: Q, exponent: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponent, c);
        }
        ExpNum { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Q::zero()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.terms.iter()
    }

    fn insert(&mut self, exponent: Q, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponent.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| q_to_f64(c) * q_to_f64(e).exp())
            .sum()
    }

    /// Sign, computed in log space so that tiny flat contributions such as
    /// `e^{-10000}` are not lost to underflow. A nonzero value never has
    /// sign zero.
    pub fn signum(&self) -> Ordering {
        if self.terms.is_empty() {
            return Ordering::Equal;
        }
        let logs: Vec<(f64, bool)> = self
            .terms
            .iter()
            .map(|(e, c)| (ln_abs(c) + q_to_f64(e), c.is_positive()))
            .collect();
        let top = logs.iter().map(|(l, _)| *l).fold(f64::NEG_INFINITY, f64::max);
        let scaled: f64 = logs
            .iter()
            .map(|(l, pos)| {
                let m = (l - top).exp();
                if *pos {
                    m
                } else {
                    -m
                }
            })
            .sum();
        if scaled > 0.0 {
            Ordering::Greater
        } else if scaled < 0.0 {
            Ordering::Less
        } else {
            // exact cancellation is impossible for a nonzero value; fall
            // back to the dominant term
            let (_, pos) = logs
                .iter()
                .cloned()
                .fold((f64::NEG_INFINITY, true), |a, b| if b.0 > a.0 { b } else { a });
            if pos {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
    }

    pub fn cmp_value(&self, other: &ExpNum) -> Ordering {
        (self.clone() - other.clone()).signum()
    }

    pub fn pow(&self, n: u32) -> ExpNum {
        let mut acc = ExpNum::rational(Q::one());
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl From<Q> for ExpNum {
    fn from(c: Q) -> Self {
        ExpNum::rational(c)
    }
}

impl Add for ExpNum {
    type Output = ExpNum;
    fn add(mut self, rhs: ExpNum) -> ExpNum {
        for (e, c) in rhs.terms {
            self.insert(e, c);
        }
        self
    }
}

impl Neg for ExpNum {
    type Output = ExpNum;
    fn neg(self) -> ExpNum {
        ExpNum {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Sub for ExpNum {
    type Output = ExpNum;
    fn sub(self, rhs: ExpNum) -> ExpNum {
        self + (-rhs)
    }
}

impl Mul for ExpNum {
    type Output = ExpNum;
    fn mul(self, rhs: ExpNum) -> ExpNum {
        let mut out = ExpNum::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.insert(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for ExpNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{}", c)?;
            } else {
                write!(f, "{}*exp({})", c, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExpNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// A point of a chart: exact coordinates in the exponential extension.
pub type Point = Vec<ExpNum>;

pub fn rational_point(coords: &[Q]) -> Point {
    coords.iter().cloned().map(ExpNum::rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_values_are_not_rational() {
        let x = ExpNum::rational(q(1)) + ExpNum::exp_term(q(2), q(-1));
        assert!(x.as_rational().is_none());
        assert!((x.to_f64() - (1.0 + 2.0 * (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn sign_survives_underflow() {
        // 1e-30 - e^{-10000} is positive; e^{-10000} - 1e-30 negative
        let tiny = ExpNum::exp_term(q(1), q(-10000));
        let eps = ExpNum::rational(qr(1, 1_000_000_000_000_000));
        assert_eq!((eps.clone() - tiny.clone()).signum(), Ordering::Greater);
        assert_eq!((tiny.clone() - eps).signum(), Ordering::Less);
        assert_eq!(tiny.signum(), Ordering::Greater);
    }

    #[test]
    fn products_add_exponents() {
        let a = ExpNum::exp_term(q(3), q(-1));
        let b = ExpNum::exp_term(q(2), q(-2));
        assert_eq!(a * b, ExpNum::exp_term(q(6), q(-3)));
    }
}
