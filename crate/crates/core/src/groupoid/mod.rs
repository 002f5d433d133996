//! Groupoid models with polynomial structure maps, local bisections and
//! their germs.

mod bisection;
mod germ;

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

pub use bisection::{Bisection, Registry, UNIT_ID};
pub use germ::{germ_fiber, GermArrow};

use crate::coeffs::{Chart, CoeffFn, Poly};
use crate::dual::{poly_eval_dual, Dual};
use crate::error::{Error, Result};
use crate::lie_rinehart::LieRinehart;
use crate::number::{q, ExpNum, Point, Q};
use crate::report::{Check, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Pair,
    Heisenberg,
    Etale,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelKind::Pair => "pair",
            ModelKind::Heisenberg => "heisenberg",
            ModelKind::Etale => "etale",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidModel {
    pub kind: ModelKind,
    pub base: Chart,
    pub arrows: Chart,
    /// Source and target, polynomials on the arrow chart.
    pub s: Vec<Poly>,
    pub t: Vec<Poly>,
    /// Unit arrows, polynomials on the base chart.
    pub unit: Vec<Poly>,
    /// Multiplication `(g', g) ↦ g'g` on the doubled arrow chart.
    pub mult: Vec<Poly>,
    /// Arrow coordinates that are the source coordinates.
    pub s_coords: Vec<usize>,
    /// Tangent vectors to the target fibre at units, one per frame element
    /// of the Lie algebroid.
    pub frame: Vec<Vec<Q>>,
    pub lie: Arc<LieRinehart>,
}

impl GroupoidModel {
    /// Pair groupoid ℝ×ℝ, arrow `(y, x)` from `x` to `y`.
    pub fn pair() -> Self {
        let v = |i| Poly::var(2, i);
        let w = |i| Poly::var(4, i);
        GroupoidModel {
            kind: ModelKind::Pair,
            base: Chart::new("R", &["t"]),
            arrows: Chart::new("RxR", &["y", "x"]),
            s: vec![v(1)],
            t: vec![v(0)],
            unit: vec![Poly::var(1, 0), Poly::var(1, 0)],
            mult: vec![w(0), w(3)],
            s_coords: vec![1],
            frame: vec![vec![q(0), q(1)]],
            lie: Arc::new(LieRinehart::tangent_line()),
        }
    }

    /// The Heisenberg group over a point, `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
    pub fn heisenberg() -> Self {
        let w = |i| Poly::var(6, i);
        GroupoidModel {
            kind: ModelKind::Heisenberg,
            base: Chart::point("pt"),
            arrows: Chart::new("H3", &["a", "b", "c"]),
            s: vec![],
            t: vec![],
            unit: vec![Poly::zero(0), Poly::zero(0), Poly::zero(0)],
            mult: vec![&w(0) + &w(3), &w(1) + &w(4), &(&w(2) + &w(5)) + &(&w(0) * &w(4))],
            s_coords: vec![],
            frame: vec![
                vec![q(1), q(0), q(0)],
                vec![q(0), q(1), q(0)],
                vec![q(0), q(0), q(1)],
            ],
            lie: Arc::new(LieRinehart::heisenberg()),
        }
    }

    /// Action groupoid of affine maps `x ↦ m x + c` on the line; arrow
    /// `(m, c, x)` from `x` to `m x + c`. The labels `(m, c)` are discrete.
    pub fn etale() -> Self {
        let v = |i| Poly::var(3, i);
        let w = |i| Poly::var(6, i);
        GroupoidModel {
            kind: ModelKind::Etale,
            base: Chart::new("R", &["t"]),
            arrows: Chart::new("AffxR", &["m", "c", "x"]),
            s: vec![v(2)],
            t: vec![&(&v(0) * &v(2)) + &v(1)],
            unit: vec![Poly::one(1), Poly::zero(1), Poly::var(1, 0)],
            mult: vec![&w(0) * &w(3), &(&w(0) * &w(4)) + &w(1), w(5)],
            s_coords: vec![2],
            frame: vec![],
            lie: Arc::new(LieRinehart::zero_over_line()),
        }
    }

    pub fn of_kind(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Pair => GroupoidModel::pair(),
            ModelKind::Heisenberg => GroupoidModel::heisenberg(),
            ModelKind::Etale => GroupoidModel::etale(),
        }
    }

    pub fn arrow_dim(&self) -> usize {
        self.arrows.dim()
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    /// Multiplication of symbolic arrows over a common chart.
    pub fn mult_fns(&self, gp: &[CoeffFn], g: &[CoeffFn]) -> Result<Vec<CoeffFn>> {
        let args: Vec<CoeffFn> = gp.iter().chain(g).cloned().collect();
        self.mult
            .iter()
            .map(|p| CoeffFn::Poly(p.clone()).compose(&args))
            .collect()
    }

    /// Inverse of a symbolic arrow. In the action groupoid the label `m`
    /// must be a nonzero constant.
    pub fn inv_fns(&self, g: &[CoeffFn]) -> Result<Vec<CoeffFn>> {
        match self.kind {
            ModelKind::Pair => Ok(vec![g[1].clone(), g[0].clone()]),
            ModelKind::Heisenberg => {
                let (a, b, c) = (&g[0], &g[1], &g[2]);
                Ok(vec![-a, -b, &(a * b) - c])
            }
            ModelKind::Etale => {
                let m = g[0]
                    .as_constant()
                    .filter(|m| !m.is_zero())
                    .ok_or_else(|| Error::UnsupportedComposition("inverse of a non-constant label".into()))?;
                let minv = m.recip();
                Ok(vec![
                    CoeffFn::constant(g[0].nvars(), minv.clone()),
                    (-&g[1]).scale(&minv),
                    &g[0] * &g[2] + g[1].clone(),
                ])
            }
        }
    }

    pub fn s_fns(&self, g: &[CoeffFn]) -> Result<Vec<CoeffFn>> {
        self.s.iter().map(|p| CoeffFn::Poly(p.clone()).compose(g)).collect()
    }

    pub fn t_fns(&self, g: &[CoeffFn]) -> Result<Vec<CoeffFn>> {
        self.t.iter().map(|p| CoeffFn::Poly(p.clone()).compose(g)).collect()
    }

    pub fn unit_fns(&self, x: &[CoeffFn], nvars: usize) -> Result<Vec<CoeffFn>> {
        if self.base_dim() == 0 {
            return Ok(self
                .unit
                .iter()
                .map(|p| CoeffFn::constant(nvars, p.as_constant().unwrap()))
                .collect());
        }
        self.unit.iter().map(|p| CoeffFn::Poly(p.clone()).compose(x)).collect()
    }

    pub fn mult_dual(&self, gp: &[Dual], g: &[Dual]) -> Vec<Dual> {
        let args: Vec<Dual> = gp.iter().chain(g).cloned().collect();
        self.mult.iter().map(|p| poly_eval_dual(p, &args)).collect()
    }

    pub fn inv_dual(&self, g: &[Dual]) -> Result<Vec<Dual>> {
        match self.kind {
            ModelKind::Pair => Ok(vec![g[1].clone(), g[0].clone()]),
            ModelKind::Heisenberg => {
                let (a, b, c) = (&g[0], &g[1], &g[2]);
                Ok(vec![a.neg(), b.neg(), a.mul(b).sub(c)])
            }
            ModelKind::Etale => {
                if !g[0].eps.is_zero() {
                    return Err(Error::UnsupportedComposition("label moves infinitesimally".into()));
                }
                let re: Vec<CoeffFn> = g.iter().map(|d| d.re.clone()).collect();
                let eps: Vec<CoeffFn> = g.iter().map(|d| d.eps.clone()).collect();
                let inv = self.inv_fns(&re)?;
                let m = re[0].as_constant().unwrap();
                let minv = m.recip();
                // derivative of (1/m, -c/m, m x + c) in (c, x)
                let d = vec![
                    CoeffFn::zero(re[0].nvars()),
                    (-&eps[1]).scale(&minv),
                    &eps[2].scale(&m) + &eps[1],
                ];
                Ok(inv.into_iter().zip(d).map(|(re, eps)| Dual { re, eps }).collect())
            }
        }
    }

    pub fn s_at(&self, g: &[ExpNum]) -> Point {
        self.s.iter().map(|p| p.eval_exp(g)).collect()
    }

    pub fn t_at(&self, g: &[ExpNum]) -> Point {
        self.t.iter().map(|p| p.eval_exp(g)).collect()
    }

    pub fn unit_at(&self, x: &[ExpNum]) -> Point {
        self.unit.iter().map(|p| p.eval_exp(x)).collect()
    }

    pub fn mult_at(&self, gp: &[ExpNum], g: &[ExpNum]) -> Result<Point> {
        if self.s_at(gp) != self.t_at(g) {
            return Err(Error::NotComposable(format!(
                "source of {} differs from target of {}",
                fmt_point(gp),
                fmt_point(g)
            )));
        }
        let args: Vec<ExpNum> = gp.iter().chain(g).cloned().collect();
        Ok(self.mult.iter().map(|p| p.eval_exp(&args)).collect())
    }

    pub fn inv_at(&self, g: &[ExpNum]) -> Result<Point> {
        match self.kind {
            ModelKind::Pair => Ok(vec![g[1].clone(), g[0].clone()]),
            ModelKind::Heisenberg => {
                let (a, b, c) = (&g[0], &g[1], &g[2]);
                Ok(vec![-a.clone(), -b.clone(), a.clone() * b.clone() - c.clone()])
            }
            ModelKind::Etale => {
                let m = g[0]
                    .as_rational()
                    .filter(|m| !m.is_zero())
                    .ok_or_else(|| Error::DomainError(format!("label {} is not invertible", g[0])))?;
                let minv = ExpNum::rational(m.recip());
                Ok(vec![
                    minv.clone(),
                    -(g[1].clone() * minv),
                    g[0].clone() * g[2].clone() + g[1].clone(),
                ])
            }
        }
    }

    /// Substitute the source coordinates of `gp` (arrow-chart polynomials
    /// over some chart) by the target of `g`, parametrizing composable pairs.
    fn compose_locus(&self, gp: &[Poly], g: &[Poly]) -> Vec<Poly> {
        let mut out = gp.to_vec();
        let tg: Vec<Poly> = self.t.iter().map(|p| p.compose(g)).collect();
        for (k, &i) in self.s_coords.iter().enumerate() {
            out[i] = tg[k].clone();
        }
        out
    }

    fn mult_polys(&self, gp: &[Poly], g: &[Poly]) -> Vec<Poly> {
        let args: Vec<Poly> = gp.iter().chain(g).cloned().collect();
        self.mult.iter().map(|p| p.compose(&args)).collect()
    }

    /// Groupoid axioms as exact identities on the arrow chart. Inverses in
    /// the action groupoid are checked for a few fixed labels.
    pub fn verify(&self) -> Report {
        let mut rep = Report::new(format!("groupoid axioms of the {} model", self.kind));
        let n = self.arrow_dim();
        let b = self.base_dim();
        let x: Vec<Poly> = (0..b).map(|i| Poly::var(b, i)).collect();
        let ux: Vec<Poly> = if b == 0 {
            self.unit.clone()
        } else {
            self.unit.iter().map(|p| p.compose(&x)).collect()
        };
        let s_unit: Vec<Poly> = self.s.iter().map(|p| p.compose(&ux)).collect();
        let t_unit: Vec<Poly> = self.t.iter().map(|p| p.compose(&ux)).collect();
        rep.push(Check::from_witness(
            "s(1_x) = x and t(1_x) = x",
            (s_unit != x || t_unit != x).then(|| format!("s(1_x) = {s_unit:?}, t(1_x) = {t_unit:?}")),
        ));

        // three independent arrows on a chart of 3n variables
        let vars = |off: usize| -> Vec<Poly> { (0..n).map(|i| Poly::var(3 * n, off + i)).collect() };
        let g = vars(0);
        let gp = self.compose_locus(&vars(n), &g);
        let gpp = self.compose_locus(&vars(2 * n), &gp);
        let prod = self.mult_polys(&gp, &g);
        let src = |h: &[Poly]| self.s.iter().map(|p| p.compose(h)).collect::<Vec<_>>();
        let tgt = |h: &[Poly]| self.t.iter().map(|p| p.compose(h)).collect::<Vec<_>>();
        rep.push(Check::from_witness(
            "s(g'g) = s(g) and t(g'g) = t(g')",
            (src(&prod) != src(&g) || tgt(&prod) != tgt(&gp)).then(|| "source/target of product".to_string()),
        ));
        let left = self.mult_polys(&self.mult_polys(&gpp, &gp), &g);
        let right = self.mult_polys(&gpp, &prod);
        rep.push(Check::from_witness(
            "associativity",
            (left != right).then(|| format!("(g''g')g = {left:?} but g''(g'g) = {right:?}")),
        ));
        let unit_of = |pt: Vec<Poly>| -> Vec<Poly> {
            if b == 0 {
                self.unit.iter().map(|p| Poly::constant(n, p.as_constant().unwrap())).collect()
            } else {
                self.unit.iter().map(|p| p.compose(&pt)).collect()
            }
        };
        let g1: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
        let with_units = self.mult_polys(&g1, &unit_of(src(&g1))) == g1
            && self.mult_polys(&unit_of(tgt(&g1)), &g1) == g1;
        rep.push(Check::from_witness(
            "unit laws",
            (!with_units).then(|| "g 1_s(g) or 1_t(g) g differs from g".to_string()),
        ));

        let inv_ok = match self.kind {
            ModelKind::Etale => [q(2), q(-1), crate::number::qr(1, 3)].iter().all(|m| {
                let g: Vec<CoeffFn> = vec![
                    CoeffFn::constant(n, m.clone()),
                    CoeffFn::var(n, 1),
                    CoeffFn::var(n, 2),
                ];
                self.inverse_law_holds(&g)
            }),
            _ => {
                let g: Vec<CoeffFn> = (0..n).map(|i| CoeffFn::var(n, i)).collect();
                self.inverse_law_holds(&g)
            }
        };
        rep.push(Check::from_witness(
            "inverse laws",
            (!inv_ok).then(|| "g^-1 g differs from 1_s(g)".to_string()),
        ));
        rep
    }

    fn inverse_law_holds(&self, g: &[CoeffFn]) -> bool {
        let n = self.arrow_dim();
        let Ok(gi) = self.inv_fns(g) else { return false };
        let (Ok(sg), Ok(tg)) = (self.s_fns(g), self.t_fns(g)) else { return false };
        let (Ok(us), Ok(ut)) = (self.unit_fns(&sg, n), self.unit_fns(&tg, n)) else {
            return false;
        };
        matches!(self.mult_fns(&gi, g), Ok(v) if v == us) && matches!(self.mult_fns(g, &gi), Ok(v) if v == ut)
    }
}

pub fn fmt_point(p: &[ExpNum]) -> String {
    format!("({})", p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rational_point;

    #[test]
    fn models_satisfy_axioms() {
        for m in [GroupoidModel::pair(), GroupoidModel::heisenberg(), GroupoidModel::etale()] {
            let rep = m.verify();
            assert!(rep.pass(), "{rep}");
        }
    }

    #[test]
    fn heisenberg_multiplication_table() {
        let h = GroupoidModel::heisenberg();
        let k = rational_point(&[q(1), q(2), q(3)]);
        let kp = rational_point(&[q(4), q(5), q(6)]);
        // (1,2,3)(4,5,6) = (5, 7, 3 + 6 + 1*5)
        assert_eq!(h.mult_at(&k, &kp).unwrap(), rational_point(&[q(5), q(7), q(14)]));
        let ki = h.inv_at(&k).unwrap();
        assert_eq!(ki, rational_point(&[q(-1), q(-2), q(-1)]));
        assert_eq!(h.mult_at(&k, &ki).unwrap(), rational_point(&[q(0), q(0), q(0)]));
    }

    #[test]
    fn pair_composability() {
        let p = GroupoidModel::pair();
        let g = rational_point(&[q(2), q(1)]);
        let h = rational_point(&[q(3), q(2)]);
        assert_eq!(p.mult_at(&h, &g).unwrap(), rational_point(&[q(3), q(1)]));
        assert!(matches!(p.mult_at(&g, &g), Err(Error::NotComposable(_))));
    }

    #[test]
    fn broken_associativity_is_reported() {
        let mut h = GroupoidModel::heisenberg();
        let w = |i| Poly::var(6, i);
        h.mult[2] = &(&w(2) + &w(5)) + &(&w(0) * &w(0));
        assert!(!h.verify().pass());
    }
}
