use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::flat::FlatFn;
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::number::{ExpNum, Q};

/// An exact coefficient function on a chart.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum CoeffFn {
    Poly(Poly),
    Flat(FlatFn),
}

impl From<Poly> for CoeffFn {
    fn from(p: Poly) -> Self {
        CoeffFn::Poly(p)
    }
}

impl From<FlatFn> for CoeffFn {
    fn from(f: FlatFn) -> Self {
        CoeffFn::flat(f)
    }
}

impl CoeffFn {
    /// Wrap a flat function, collapsing it to a polynomial when both flat
    /// parts vanish.
    pub fn flat(f: FlatFn) -> Self {
        if f.is_polynomial() {
            CoeffFn::Poly(f.poly)
        } else {
            CoeffFn::Flat(f)
        }
    }

    pub fn zero(nvars: usize) -> Self {
        CoeffFn::Poly(Poly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        CoeffFn::Poly(Poly::one(nvars))
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        CoeffFn::Poly(Poly::constant(nvars, c))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        CoeffFn::Poly(Poly::var(nvars, i))
    }

    pub fn nvars(&self) -> usize {
        match self {
            CoeffFn::Poly(p) => p.nvars(),
            CoeffFn::Flat(_) => 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CoeffFn::Poly(p) if p.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            CoeffFn::Poly(p) => Some(p),
            CoeffFn::Flat(_) => None,
        }
    }

    pub fn as_constant(&self) -> Option<Q> {
        self.as_poly().and_then(Poly::as_constant)
    }

    fn to_flat(&self) -> FlatFn {
        match self {
            CoeffFn::Poly(p) => {
                FlatFn::new(p.clone(), Default::default(), Default::default())
            }
            CoeffFn::Flat(f) => f.clone(),
        }
    }

    pub fn scale(&self, c: &Q) -> CoeffFn {
        match self {
            CoeffFn::Poly(p) => CoeffFn::Poly(p.scale(c)),
            CoeffFn::Flat(f) => CoeffFn::flat(f.scale(c)),
        }
    }

    pub fn derive(&self, axis: usize) -> CoeffFn {
        match self {
            CoeffFn::Poly(p) => CoeffFn::Poly(p.derive(axis)),
            CoeffFn::Flat(f) => {
                assert_eq!(axis, 0, "flat functions have a single variable");
                CoeffFn::flat(f.derive())
            }
        }
    }

    /// Substitute `args[i]` for variable `i`.
    pub fn compose(&self, args: &[CoeffFn]) -> Result<CoeffFn> {
        if args.len() != self.nvars() {
            return Err(Error::ChartMismatch(format!(
                "function of {} variables composed with {} arguments",
                self.nvars(),
                args.len()
            )));
        }
        let out_vars = args.first().map(CoeffFn::nvars).unwrap_or(0);
        if args.iter().any(|a| a.nvars() != out_vars) {
            return Err(Error::ChartMismatch("arguments over different charts".into()));
        }
        match self {
            CoeffFn::Poly(p) => {
                if let Some(polys) = args.iter().map(CoeffFn::as_poly).collect::<Option<Vec<_>>>() {
                    let polys: Vec<Poly> = polys.into_iter().cloned().collect();
                    return Ok(CoeffFn::Poly(p.compose(&polys)));
                }
                let mut acc = CoeffFn::zero(out_vars);
                for (m, c) in p.terms() {
                    let mut term = CoeffFn::constant(out_vars, c.clone());
                    for (a, &e) in args.iter().zip(m) {
                        for _ in 0..e {
                            term = &term * a;
                        }
                    }
                    acc = &acc + &term;
                }
                Ok(acc)
            }
            CoeffFn::Flat(f) => {
                let arg = args[0]
                    .as_poly()
                    .ok_or_else(|| Error::UnsupportedComposition("flat function of a flat function".into()))?;
                if let Some(c) = arg.as_constant() {
                    return if c.is_zero() {
                        Ok(CoeffFn::constant(out_vars, f.poly.eval(&[Q::zero()])))
                    } else {
                        Err(Error::UnsupportedComposition(format!(
                            "flat function at the constant {c} is not representable exactly"
                        )))
                    };
                }
                if out_vars == 1 && arg.degree() == 1 && arg.coeff(&[0]).is_zero() {
                    return Ok(CoeffFn::flat(f.scale_arg(&arg.coeff(&[1]))));
                }
                Err(Error::UnsupportedComposition(
                    "flat function composed with a map that is not t -> a*t".into(),
                ))
            }
        }
    }

    /// Exact value at a point. Flat functions need a rational argument.
    pub fn eval(&self, x: &[ExpNum]) -> Result<ExpNum> {
        if x.len() != self.nvars() {
            return Err(Error::ChartMismatch(format!(
                "point of dimension {} for a function of {} variables",
                x.len(),
                self.nvars()
            )));
        }
        match self {
            CoeffFn::Poly(p) => Ok(p.eval_exp(x)),
            CoeffFn::Flat(f) => {
                let t = x[0].as_rational().ok_or_else(|| {
                    Error::UnsupportedComposition(format!("flat function at the irrational point {}", x[0]))
                })?;
                Ok(f.eval(&t))
            }
        }
    }

    pub fn eval_q(&self, x: &[Q]) -> Result<ExpNum> {
        let pt: Vec<ExpNum> = x.iter().cloned().map(ExpNum::rational).collect();
        self.eval(&pt)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            CoeffFn::Poly(p) => p.eval_f64(x),
            CoeffFn::Flat(f) => f.eval_f64(x[0]),
        }
    }

    /// Do the two functions agree on a neighbourhood of `x`?
    pub fn germ_eq(&self, other: &CoeffFn, x: &[ExpNum]) -> Result<bool> {
        if self.nvars() != other.nvars() {
            return Err(Error::ChartMismatch(format!(
                "germs on charts of dimension {} and {}",
                self.nvars(),
                other.nvars()
            )));
        }
        if x.len() != self.nvars() {
            return Err(Error::ChartMismatch("base point dimension".into()));
        }
        match (self, other) {
            (CoeffFn::Poly(a), CoeffFn::Poly(b)) => Ok(a == b),
            _ => Ok(self.to_flat().germ_eq_at(&other.to_flat(), x[0].signum())),
        }
    }

    pub fn is_zero_germ(&self, x: &[ExpNum]) -> Result<bool> {
        self.germ_eq(&CoeffFn::zero(self.nvars()), x)
    }

    /// Restriction of the function to the side of 0 given by `side`, as a
    /// representative that agrees with `self` near any point on that side.
    pub fn branch(&self, side: Ordering) -> CoeffFn {
        match (self, side) {
            (CoeffFn::Flat(f), Ordering::Less) => {
                CoeffFn::flat(FlatFn::new(f.poly.clone(), f.neg.clone(), f.neg.clone()))
            }
            (CoeffFn::Flat(f), Ordering::Greater) => {
                CoeffFn::flat(FlatFn::new(f.poly.clone(), f.pos.clone(), f.pos.clone()))
            }
            _ => self.clone(),
        }
    }
}

impl Add for &CoeffFn {
    type Output = CoeffFn;
    fn add(self, rhs: &CoeffFn) -> CoeffFn {
        match (self, rhs) {
            (CoeffFn::Poly(a), CoeffFn::Poly(b)) => CoeffFn::Poly(a + b),
            _ => CoeffFn::flat(self.to_flat().add(&rhs.to_flat())),
        }
    }
}

impl Neg for &CoeffFn {
    type Output = CoeffFn;
    fn neg(self) -> CoeffFn {
        match self {
            CoeffFn::Poly(p) => CoeffFn::Poly(-p),
            CoeffFn::Flat(f) => CoeffFn::Flat(f.neg()),
        }
    }
}

impl Sub for &CoeffFn {
    type Output = CoeffFn;
    fn sub(self, rhs: &CoeffFn) -> CoeffFn {
        self + &(-rhs)
    }
}

impl Mul for &CoeffFn {
    type Output = CoeffFn;
    fn mul(self, rhs: &CoeffFn) -> CoeffFn {
        match (self, rhs) {
            (CoeffFn::Poly(a), CoeffFn::Poly(b)) => CoeffFn::Poly(a * b),
            (CoeffFn::Poly(a), CoeffFn::Flat(f)) | (CoeffFn::Flat(f), CoeffFn::Poly(a)) => {
                CoeffFn::flat(f.mul_poly(a))
            }
            (CoeffFn::Flat(f), CoeffFn::Flat(g)) => CoeffFn::flat(f.mul(g)),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for CoeffFn {
            type Output = CoeffFn;
            fn $f(self, rhs: CoeffFn) -> CoeffFn {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CoeffFn {
    type Output = CoeffFn;
    fn neg(self) -> CoeffFn {
        -&self
    }
}
