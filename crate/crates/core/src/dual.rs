//! First-order jets `re + ε·eps` with `ε² = 0` over coefficient functions.

use crate::coeffs::{CoeffFn, Poly};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dual {
    pub re: CoeffFn,
    pub eps: CoeffFn,
}

impl Dual {
    pub fn constant(re: CoeffFn) -> Self {
        let n = re.nvars();
        Dual {
            re,
            eps: CoeffFn::zero(n),
        }
    }

    pub fn new(re: CoeffFn, eps: CoeffFn) -> Self {
        Dual { re, eps }
    }

    pub fn add(&self, o: &Dual) -> Dual {
        Dual::new(&self.re + &o.re, &self.eps + &o.eps)
    }

    pub fn sub(&self, o: &Dual) -> Dual {
        Dual::new(&self.re - &o.re, &self.eps - &o.eps)
    }

    pub fn neg(&self) -> Dual {
        Dual::new(-&self.re, -&self.eps)
    }

    pub fn mul(&self, o: &Dual) -> Dual {
        Dual::new(&self.re * &o.re, &(&self.re * &o.eps) + &(&self.eps * &o.re))
    }
}

/// `p(args)` with jets as arguments.
pub fn poly_eval_dual(p: &Poly, args: &[Dual]) -> Dual {
    assert_eq!(p.nvars(), args.len());
    let nvars = args.first().map(|a| a.re.nvars()).unwrap_or(0);
    let mut acc = Dual::constant(CoeffFn::zero(nvars));
    for (m, c) in p.terms() {
        let mut term = Dual::constant(CoeffFn::constant(nvars, c.clone()));
        for (a, &e) in args.iter().zip(m) {
            for _ in 0..e {
                term = term.mul(a);
            }
        }
        acc = acc.add(&term);
    }
    acc
}

/// `f(args)` for an arbitrary coefficient function, by the chain rule.
pub fn coeff_eval_dual(f: &CoeffFn, args: &[Dual]) -> Result<Dual> {
    let re: Vec<CoeffFn> = args.iter().map(|a| a.re.clone()).collect();
    let value = f.compose(&re)?;
    let mut eps = CoeffFn::zero(value.nvars());
    for (k, a) in args.iter().enumerate() {
        if a.eps.is_zero() {
            continue;
        }
        eps = &eps + &(&f.derive(k).compose(&re)? * &a.eps);
    }
    Ok(Dual::new(value, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::FlatFn;
    use crate::number::q;

    #[test]
    fn product_rule() {
        let t = CoeffFn::var(1, 0);
        let x = Dual::new(t.clone(), CoeffFn::one(1));
        let p = Poly::var(1, 0).pow(3);
        let d = poly_eval_dual(&p, &[x]);
        assert_eq!(d.eps, (&t * &t).scale(&q(3)));
    }

    #[test]
    fn chain_rule_through_flat_map() {
        let t = CoeffFn::var(1, 0);
        let f = CoeffFn::flat(FlatFn::kinked_diffeo(1, 0));
        let d = coeff_eval_dual(&f, &[Dual::new(t, CoeffFn::one(1))]).unwrap();
        assert_eq!(d.re, f);
        assert_eq!(d.eps, f.derive(0));
    }
}
