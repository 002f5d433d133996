//! One-variable smooth functions with a flat kink at the origin.
//!
//! A `FlatFn` is `P(t) + N(t)` for `t <= 0` and `P(t) + R(t)` for `t >= 0`,
//! where `P` is a polynomial and `N`, `R` are finite sums
//! `Σ c · t^n · e^{-m/t²}` with `m > 0` rational and `n` any integer. Every
//! such sum vanishes to all orders at 0, so the glued function is smooth.
//! The ring is closed under products, derivatives and precomposition with
//! `t ↦ a·t`, and the functions `t^n e^{-m/t²}` are linearly independent as
//! germs on either side of 0, which makes germ equality a coefficient check.
//!
//! The fixed flat function is `φ(t) = sign(t)·e^{-1/t²}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use crate::number::{q, q_to_f64, ExpNum, Q};

/// `Σ c · t^n · e^{-m/t²}` keyed by `(m, n)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct FlatSeries {
    terms: BTreeMap<(Q, i32), Q>,
}

impl FlatSeries {
    pub fn zero() -> Self {
        FlatSeries::default()
    }

    pub fn term(c: Q, n: i32, m: Q) -> Self {
        assert!(m.is_positive(), "flat exponent must be positive");
        let mut s = FlatSeries::zero();
        s.add_term(m, n, c);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Q, i32), &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Q, n: i32, c: Q) {
        if c.is_zero() {
            return;
        }
        let key = (m, n);
        let slot = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &FlatSeries) -> FlatSeries {
        let mut out = self.clone();
        for ((m, n), c) in &other.terms {
            out.add_term(m.clone(), *n, c.clone());
        }
        out
    }

    pub fn neg(&self) -> FlatSeries {
        FlatSeries {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> FlatSeries {
        let mut out = FlatSeries::zero();
        for ((m, n), x) in &self.terms {
            out.add_term(m.clone(), *n, x * c);
        }
        out
    }

    pub fn mul(&self, other: &FlatSeries) -> FlatSeries {
        let mut out = FlatSeries::zero();
        for ((m1, n1), c1) in &self.terms {
            for ((m2, n2), c2) in &other.terms {
                out.add_term(m1 + m2, n1 + n2, c1 * c2);
            }
        }
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> FlatSeries {
        let mut out = FlatSeries::zero();
        for ((m, n), c) in &self.terms {
            for (e, pc) in p.terms() {
                out.add_term(m.clone(), n + e[0] as i32, c * pc);
            }
        }
        out
    }

    pub fn derive(&self) -> FlatSeries {
        // d/dt (t^n e^{-m/t²}) = n t^{n-1} e^{-m/t²} + 2m t^{n-3} e^{-m/t²}
        let mut out = FlatSeries::zero();
        for ((m, n), c) in &self.terms {
            out.add_term(m.clone(), n - 1, c * q(*n as i64));
            out.add_term(m.clone(), n - 3, c * m * q(2));
        }
        out
    }

    /// Precompose with `t ↦ a·t`.
    pub fn scale_arg(&self, a: &Q) -> FlatSeries {
        let a2 = a * a;
        let mut out = FlatSeries::zero();
        for ((m, n), c) in &self.terms {
            out.add_term(m / &a2, *n, c * pow_i(a, *n));
        }
        out
    }

    /// Exact value at a nonzero rational point.
    pub fn eval(&self, x: &Q) -> ExpNum {
        assert!(!x.is_zero());
        let x2 = x * x;
        let mut acc = ExpNum::zero();
        for ((m, n), c) in &self.terms {
            acc = acc + ExpNum::exp_term(c * pow_i(x, *n), -(m / &x2));
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        self.terms
            .iter()
            .map(|((m, n), c)| q_to_f64(c) * x.powi(*n) * (-q_to_f64(m) / (x * x)).exp())
            .sum()
    }
}

fn pow_i(x: &Q, n: i32) -> Q {
    let mut acc = Q::one();
    for _ in 0..n.unsigned_abs() {
        acc *= x;
    }
    if n < 0 {
        acc.recip()
    } else {
        acc
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FlatFn {
    pub poly: Poly,
    pub neg: FlatSeries,
    pub pos: FlatSeries,
}

impl FlatFn {
    pub fn new(poly: Poly, neg: FlatSeries, pos: FlatSeries) -> Self {
        assert_eq!(poly.nvars(), 1, "flat functions live on one-dimensional charts");
        FlatFn { poly, neg, pos }
    }

    /// φ(t) = sign(t)·e^{-1/t²}
    pub fn phi() -> Self {
        FlatFn::new(
            Poly::zero(1),
            FlatSeries::term(-Q::one(), 0, Q::one()),
            FlatSeries::term(Q::one(), 0, Q::one()),
        )
    }

    /// `p(t) + c_neg·φ(t)` for `t <= 0` and `p(t) + c_pos·φ(t)` for `t >= 0`.
    pub fn from_piece(p: Poly, c_neg: Q, c_pos: Q) -> Self {
        FlatFn::new(
            p,
            FlatSeries::term(-c_neg, 0, Q::one()),
            FlatSeries::term(c_pos, 0, Q::one()),
        )
    }

    /// The diffeomorphism `t + 2^i φ(t)` (t ≤ 0), `t + 2^j φ(t)` (t ≥ 0).
    pub fn kinked_diffeo(i: u32, j: u32) -> Self {
        FlatFn::from_piece(Poly::var(1, 0), q(1 << i), q(1 << j))
    }

    pub fn is_polynomial(&self) -> bool {
        self.neg.is_zero() && self.pos.is_zero()
    }

    pub fn add(&self, o: &FlatFn) -> FlatFn {
        FlatFn::new(&self.poly + &o.poly, self.neg.add(&o.neg), self.pos.add(&o.pos))
    }

    pub fn neg(&self) -> FlatFn {
        FlatFn::new(-&self.poly, self.neg.neg(), self.pos.neg())
    }

    pub fn scale(&self, c: &Q) -> FlatFn {
        FlatFn::new(self.poly.scale(c), self.neg.scale(c), self.pos.scale(c))
    }

    pub fn mul(&self, o: &FlatFn) -> FlatFn {
        let branch = |a: &FlatSeries, b: &FlatSeries| {
            a.mul_poly(&o.poly).add(&b.mul_poly(&self.poly)).add(&a.mul(b))
        };
        FlatFn::new(&self.poly * &o.poly, branch(&self.neg, &o.neg), branch(&self.pos, &o.pos))
    }

    pub fn mul_poly(&self, p: &Poly) -> FlatFn {
        FlatFn::new(&self.poly * p, self.neg.mul_poly(p), self.pos.mul_poly(p))
    }

    pub fn derive(&self) -> FlatFn {
        FlatFn::new(self.poly.derive(0), self.neg.derive(), self.pos.derive())
    }

    /// Precompose with `t ↦ a·t`, `a ≠ 0`.
    pub fn scale_arg(&self, a: &Q) -> FlatFn {
        assert!(!a.is_zero());
        let poly = self.poly.compose(&[Poly::affine(Q::zero(), a.clone())]);
        let (neg, pos) = (self.neg.scale_arg(a), self.pos.scale_arg(a));
        if a.is_negative() {
            FlatFn::new(poly, pos, neg)
        } else {
            FlatFn::new(poly, neg, pos)
        }
    }

    pub fn eval(&self, x: &Q) -> ExpNum {
        let p = ExpNum::rational(self.poly.eval(std::slice::from_ref(x)));
        match x.cmp(&Q::zero()) {
            Ordering::Less => p + self.neg.eval(x),
            Ordering::Greater => p + self.pos.eval(x),
            Ordering::Equal => p,
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let p = self.poly.eval_f64(&[x]);
        if x < 0.0 {
            p + self.neg.eval_f64(x)
        } else if x > 0.0 {
            p + self.pos.eval_f64(x)
        } else {
            p
        }
    }

    /// Germ equality at a point on the given side of 0.
    pub fn germ_eq_at(&self, o: &FlatFn, side: Ordering) -> bool {
        if self.poly != o.poly {
            return false;
        }
        match side {
            Ordering::Less => self.neg == o.neg,
            Ordering::Greater => self.pos == o.pos,
            Ordering::Equal => self.neg == o.neg && self.pos == o.pos,
        }
    }

    /// Is the function strictly increasing on ℝ? Checked for the shapes the
    /// bisection registry admits: a strictly increasing affine part plus
    /// nonnegative multiples of e^{-1/t²}·sign(t)-type terms.
    pub fn is_increasing_diffeo(&self) -> bool {
        if self.poly.degree() > 1 {
            return false;
        }
        let slope = self.poly.coeff(&[1]);
        if !slope.is_positive() {
            return false;
        }
        let ok = |s: &FlatSeries, sign: i64| {
            s.terms().all(|((m, n), c)| *n == 0 && *m == Q::one() && (c * q(sign)).is_positive())
        };
        ok(&self.neg, -1) && ok(&self.pos, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::qr;

    #[test]
    fn scalar_multiple_of_piece() {
        let f = FlatFn::from_piece(Poly::var(1, 0), q(1), q(1));
        let g = f.scale(&q(2));
        assert_eq!(g, FlatFn::from_piece(Poly::var(1, 0).scale(&q(2)), q(2), q(2)));
    }

    #[test]
    fn derivative_of_phi_term() {
        // d/dt (t + 2φ) = 1 + 2φ'; on t > 0, φ' = 2 t^{-3} e^{-1/t²}
        let f = FlatFn::from_piece(Poly::var(1, 0), q(2), q(2));
        let d = f.derive();
        assert_eq!(d.poly, Poly::one(1));
        assert_eq!(d.pos, FlatSeries::term(q(4), -3, q(1)));
        // on t < 0, φ = -e^{-1/t²} so φ' = -2 t^{-3} e^{-1/t²}
        assert_eq!(d.neg, FlatSeries::term(q(-4), -3, q(1)));
    }

    #[test]
    fn value_at_one() {
        let f = FlatFn::kinked_diffeo(0, 1);
        let v = f.eval(&q(1));
        assert_eq!(v, ExpNum::rational(q(1)) + ExpNum::exp_term(q(2), q(-1)));
        assert!((v.to_f64() - 1.735_758_882_342_884_6).abs() < 1e-12);
        assert_eq!(f.eval(&q(0)), ExpNum::zero());
    }

    #[test]
    fn germs_of_kinked_maps() {
        let f00 = FlatFn::kinked_diffeo(0, 0);
        let f01 = FlatFn::kinked_diffeo(0, 1);
        assert!(f00.germ_eq_at(&f01, Ordering::Less));
        assert!(!f00.germ_eq_at(&f01, Ordering::Equal));
        assert!(!f00.germ_eq_at(&f01, Ordering::Greater));
    }

    #[test]
    fn negative_scaling_swaps_branches() {
        let phi = FlatFn::phi();
        // φ(-t) = -φ(t)
        assert_eq!(phi.scale_arg(&q(-1)), phi.neg());
        let half = phi.scale_arg(&qr(1, 2));
        assert!((half.eval_f64(0.7) - (-1.0f64 / (0.35 * 0.35)).exp()).abs() < 1e-15);
    }

    #[test]
    fn products_stay_in_class() {
        let f = FlatFn::kinked_diffeo(1, 0);
        let sq = f.mul(&f);
        let x = 0.8f64;
        let v = f.eval_f64(x);
        assert!((sq.eval_f64(x) - v * v).abs() < 1e-12);
        let x = -0.6f64;
        let v = f.eval_f64(x);
        assert!((sq.eval_f64(x) - v * v).abs() < 1e-12);
    }

    #[test]
    fn kinked_maps_are_increasing() {
        for i in 0..2 {
            for j in 0..2 {
                assert!(FlatFn::kinked_diffeo(i, j).is_increasing_diffeo());
            }
        }
        assert!(!FlatFn::phi().neg().is_increasing_diffeo());
    }
}
