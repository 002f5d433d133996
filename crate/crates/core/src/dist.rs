//! Left-invariant differential operators and t-transversal distributions
//! `⟦E, Ω(u)⟧` with their ∗-product.
//!
//! Test functions are polynomials on the arrow chart. A distribution term
//! `⟦E, u⟧` keeps `u` over `s(E)`, and its value on `F` is recorded along the
//! source: at `x = τ_E(z)` it is `Σ f_a(z)·(X̄^a F)(α_E(z))`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{Signed, Zero};

use crate::adjoint::{ad_uea, ad_uea_inverse};
use crate::coeffs::{CoeffFn, Interval, Poly, Region};
use crate::dual::Dual;
use crate::error::{Error, Result};
use crate::groupoid::{Bisection, GroupoidModel, ModelKind, Registry};
use crate::lie_rinehart::Section;
use crate::number::{q, q_to_f64, ExpNum, Q};
use crate::random::{random_poly, rng};
use crate::uea::UEAElement;

/// The left-invariant vector fields `X̄_i` extending the frame, as
/// polynomial vector fields on the arrow chart.
#[derive(Clone, Debug)]
pub struct LeftInvariantFrame {
    pub fields: Vec<Vec<Poly>>,
    s: Vec<Poly>,
    nvars: usize,
}

fn as_poly(f: &CoeffFn, what: &str) -> Result<Poly> {
    f.as_poly()
        .cloned()
        .ok_or_else(|| Error::UnsupportedComposition(format!("{what} must be polynomial")))
}

impl LeftInvariantFrame {
    /// `X̄_i(g) = d/dε g·(1_{s(g)} + ε v_i)`.
    pub fn new(model: &GroupoidModel) -> Self {
        let n = model.arrow_dim();
        let g: Vec<CoeffFn> = (0..n).map(|i| CoeffFn::var(n, i)).collect();
        let sg = model.s_fns(&g).expect("polynomial source map");
        let unit = model.unit_fns(&sg, n).expect("polynomial unit map");
        let gd: Vec<Dual> = g.iter().cloned().map(Dual::constant).collect();
        let fields = model
            .frame
            .iter()
            .map(|v| {
                let h: Vec<Dual> = unit
                    .iter()
                    .zip(v)
                    .map(|(u, c)| Dual::new(u.clone(), CoeffFn::constant(n, c.clone())))
                    .collect();
                model
                    .mult_dual(&gd, &h)
                    .into_iter()
                    .map(|d| d.eps.as_poly().cloned().expect("polynomial multiplication"))
                    .collect()
            })
            .collect();
        LeftInvariantFrame {
            fields,
            s: model.s.clone(),
            nvars: n,
        }
    }

    /// `c∘s` for a function `c` on the base.
    pub fn along_source(&self, c: &Poly) -> Poly {
        if self.s.is_empty() {
            Poly::constant(self.nvars, c.as_constant().expect("point base"))
        } else {
            c.compose(&self.s)
        }
    }

    pub fn rank(&self) -> usize {
        self.fields.len()
    }

    pub fn apply_field(&self, i: usize, f: &Poly) -> Poly {
        let mut acc = Poly::zero(f.nvars());
        for (k, v) in self.fields[i].iter().enumerate() {
            if !v.is_zero() {
                acc = &acc + &(v * &f.derive(k));
            }
        }
        acc
    }

    /// `X̄_0^{a_0} ⋯ X̄_{r-1}^{a_{r-1}} F`, rightmost factor first.
    pub fn apply_monomial(&self, a: &[u32], f: &Poly) -> Poly {
        let mut out = f.clone();
        for i in (0..a.len()).rev() {
            for _ in 0..a[i] {
                out = self.apply_field(i, &out);
            }
        }
        out
    }

    /// `dt(X̄_i) = 0` and `X̄_i(1_x) = v_i` as polynomial identities.
    pub fn check(&self, model: &GroupoidModel) -> Option<String> {
        let b = model.base_dim();
        let x: Vec<Poly> = (0..b).map(|i| Poly::var(b, i)).collect();
        let ux: Vec<Poly> = if b == 0 {
            model.unit.clone()
        } else {
            model.unit.iter().map(|p| p.compose(&x)).collect()
        };
        for (i, field) in self.fields.iter().enumerate() {
            for tj in &model.t {
                let mut dt = Poly::zero(model.arrow_dim());
                for (k, v) in field.iter().enumerate() {
                    dt = &dt + &(v * &tj.derive(k));
                }
                if !dt.is_zero() {
                    return Some(format!("field {} moves the target", model.lie.basis[i]));
                }
            }
            for (k, v) in field.iter().enumerate() {
                let at_unit = v.compose(&ux);
                if at_unit != Poly::constant(b, model.frame[i][k].clone()) {
                    return Some(format!("field {} does not restrict to the frame", model.lie.basis[i]));
                }
            }
        }
        None
    }
}

/// The cached frame of a model family.
pub fn frame_of(model: &GroupoidModel) -> Arc<LeftInvariantFrame> {
    static CACHE: OnceLock<Mutex<HashMap<ModelKind, Arc<LeftInvariantFrame>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    cache
        .lock()
        .unwrap()
        .entry(model.kind)
        .or_insert_with(|| Arc::new(LeftInvariantFrame::new(model)))
        .clone()
}

/// `X̄ = Σ (h_i∘s) X̄_i` for a section with polynomial coefficients.
pub fn left_invariant_field(model: &GroupoidModel, x: &Section) -> Result<Vec<CoeffFn>> {
    let frame = frame_of(model);
    let n = model.arrow_dim();
    let mut out = vec![CoeffFn::zero(n); n];
    for (i, h) in x.coeffs.iter().enumerate() {
        let hs = CoeffFn::Poly(frame.along_source(&as_poly(h, "section coefficient")?));
        for (k, v) in frame.fields[i].iter().enumerate() {
            out[k] = &out[k] + &(&hs * &CoeffFn::Poly(v.clone()));
        }
    }
    Ok(out)
}

/// A left-invariant operator `Ω(u)`.
#[derive(Clone, Debug)]
pub struct LeftInvOp {
    pub frame: Arc<LeftInvariantFrame>,
    pub u: UEAElement,
}

impl LeftInvOp {
    pub fn new(model: &GroupoidModel, u: UEAElement) -> Self {
        LeftInvOp {
            frame: frame_of(model),
            u,
        }
    }

    /// `Σ (f_a∘s)·X̄^a F`.
    pub fn apply(&self, f: &CoeffFn) -> Result<CoeffFn> {
        let f = as_poly(f, "test function")?;
        let mut acc = Poly::zero(f.nvars());
        for (a, c) in self.u.terms() {
            let cs = self.frame.along_source(&as_poly(c, "operator coefficient")?);
            acc = &acc + &(&cs * &self.frame.apply_monomial(a, &f));
        }
        Ok(CoeffFn::Poly(acc))
    }
}

pub fn omega_apply(model: &GroupoidModel, u: &UEAElement, f: &CoeffFn) -> Result<CoeffFn> {
    LeftInvOp::new(model, u.clone()).apply(f)
}

/// `R_E(h) = h·β_E(s(h))` and `R_E^{-1}(k) = k·α_E(s(k))^{-1}` on the arrow
/// chart.
pub fn right_translations(model: &GroupoidModel, e: &Bisection) -> Result<(Vec<CoeffFn>, Vec<CoeffFn>)> {
    let n = model.arrow_dim();
    let g: Vec<CoeffFn> = (0..n).map(|i| CoeffFn::var(n, i)).collect();
    let sg = model.s_fns(&g)?;
    let lift = |fs: &[CoeffFn]| -> Result<Vec<CoeffFn>> {
        fs.iter()
            .map(|f| if sg.is_empty() { Ok(CoeffFn::constant(n, f.as_constant().unwrap())) } else { f.compose(&sg) })
            .collect()
    };
    let beta = lift(&e.beta()?)?;
    let alpha = lift(&e.alpha)?;
    let r = model.mult_fns(&g, &beta)?;
    let rinv = model.mult_fns(&g, &model.inv_fns(&alpha)?)?;
    Ok((r, rinv))
}

/// `Ad_E(u)`, checked against `Ω(Ad_E u)F = Ω(u)(F∘R_E^{-1})∘R_E` on five
/// random test functions.
pub fn adbar(model: &GroupoidModel, e: &Bisection, u: &UEAElement, seed: u64) -> Result<UEAElement> {
    let v = ad_uea(model, e, u)?;
    let (r, rinv) = right_translations(model, e)?;
    let mut rng = rng(seed);
    for _ in 0..5 {
        let f = CoeffFn::Poly(random_poly(&mut rng, model.arrow_dim(), 3, 4));
        let lhs = omega_apply(model, &v, &f)?;
        let rhs = omega_apply(model, u, &f.compose(&rinv)?)?.compose(&r)?;
        if lhs != rhs {
            return Err(Error::VerificationFailed {
                what: format!("Ad along {} commutes with right translation", e.id),
                witness: format!("F = {}", crate::coeffs::text::format_coeff(&f, &model.arrows.vars)),
            });
        }
    }
    Ok(v)
}

/// Finite sum `Σ ⟦E_i, Ω(u_i)⟧` with `u_i` over `s(E_i)`.
#[derive(Clone)]
pub struct TransvDist {
    pub reg: Arc<Registry>,
    terms: BTreeMap<String, UEAElement>,
}

impl PartialEq for TransvDist {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.reg, &other.reg) && self.terms == other.terms
    }
}

impl fmt::Debug for TransvDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TransvDist({})", self.to_text())
    }
}

impl TransvDist {
    pub fn zero(reg: &Arc<Registry>) -> Self {
        TransvDist {
            reg: reg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn term(reg: &Arc<Registry>, id: &str, u: UEAElement) -> Result<Self> {
        let b = reg.get(id)?;
        let mut out = TransvDist::zero(reg);
        out.push(&b, u);
        Ok(out)
    }

    fn push(&mut self, b: &Bisection, u: UEAElement) {
        if b.is_empty() || u.is_zero() {
            return;
        }
        let slot = self.terms.entry(b.id.clone()).or_insert_with(|| UEAElement::zero(&u.parent));
        *slot = slot.add(&u).expect("same algebroid");
        if slot.is_zero() {
            self.terms.remove(&b.id);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&String, &UEAElement)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &TransvDist) -> Result<TransvDist> {
        if !Arc::ptr_eq(&self.reg, &other.reg) {
            return Err(Error::ParentMismatch);
        }
        let mut out = self.clone();
        for (id, u) in &other.terms {
            let b = self.reg.get(id)?;
            out.push(&b, u.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> TransvDist {
        TransvDist {
            reg: self.reg.clone(),
            terms: self.terms.iter().map(|(k, u)| (k.clone(), u.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &TransvDist) -> Result<TransvDist> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &crate::number::Q) -> TransvDist {
        TransvDist {
            reg: self.reg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, u)| (k.clone(), u.scale(c)))
                .filter(|(_, u)| !u.is_zero())
                .collect(),
        }
    }

    /// `T(F)` along the sources of the bisections.
    pub fn eval(&self, f: &CoeffFn) -> Result<DistValue> {
        let model = &self.reg.model;
        let frame = frame_of(model);
        let fp = as_poly(f, "test function")?;
        let mut out = DistValue::zero(model.base_dim());
        for (id, u) in &self.terms {
            let b = self.reg.get(id)?;
            let mut g = CoeffFn::zero(model.base_dim());
            for (a, c) in u.terms() {
                let d = CoeffFn::Poly(frame.apply_monomial(a, &fp)).compose(&b.alpha)?;
                g = &g + &(c * &d);
            }
            out.push(DistPiece::along(&b, g));
        }
        Ok(out)
    }

    /// `⟦E', u'⟧∗⟦E, u⟧ = ⟦E'E, Ad_{E^{-1}}(u')·u⟧`.
    pub fn mul(&self, other: &TransvDist) -> Result<TransvDist> {
        if !Arc::ptr_eq(&self.reg, &other.reg) {
            return Err(Error::ParentMismatch);
        }
        let model = &self.reg.model;
        let mut out = TransvDist::zero(&self.reg);
        for (idp, up) in &self.terms {
            for (id, u) in &other.terms {
                let prod = self.reg.mul(idp, id)?;
                if prod.is_empty() {
                    continue;
                }
                let e = self.reg.get(id)?;
                let moved = ad_uea_inverse(model, &e, up)?;
                out.push(&prod, moved.mul(u)?);
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(id, u)| format!("[[{}, {}]]", id, u.to_text()))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for TransvDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

pub fn dist_eval(t: &TransvDist, f: &CoeffFn) -> Result<DistValue> {
    t.eval(f)
}

pub fn dist_mul(tp: &TransvDist, t: &TransvDist) -> Result<TransvDist> {
    tp.mul(t)
}

/// `T'(g ↦ T|_{s(g)}(F∘L_g))`, computed from the definition with `g` and
/// the inner arrow as separate variables.
pub fn dist_mul_defcheck_value(tp: &TransvDist, t: &TransvDist, f: &CoeffFn) -> Result<DistValue> {
    if !Arc::ptr_eq(&tp.reg, &t.reg) {
        return Err(Error::ParentMismatch);
    }
    let reg = &t.reg;
    let model = &reg.model;
    let frame = frame_of(model);
    let mut out = DistValue::zero(model.base_dim());
    for (idp, up) in &tp.terms {
        let ep = reg.get(idp)?;
        for (id, u) in &t.terms {
            let e = reg.get(id)?;
            let prod = reg.mul(idp, id)?;
            if prod.is_empty() {
                continue;
            }
            // H = Ω(u)F, so that T|_{s(g)}(F∘L_g) = H(g·β_E(s(g)))
            let h = omega_apply(model, u, f)?;
            let g = if up.degree() == 0 {
                // x = τ'(τ(w)): f'(τ(w))·H(α'(τ(w))·α(w))
                let fp = up.coeff(&vec![0; model.lie.rank()]);
                let ap: Vec<CoeffFn> = ep.alpha.iter().map(|a| a.compose(&e.tau)).collect::<Result<_>>()?;
                let arrow = model.mult_fns(&ap, &e.alpha)?;
                &fp.compose(&e.tau)? * &h.compose(&arrow)?
            } else {
                let (r, _) = right_translations(model, &e)?;
                let inner = as_poly(&h.compose(&r)?, "inner test function")?;
                let mut k = CoeffFn::zero(model.base_dim());
                for (a, c) in up.terms() {
                    let d = CoeffFn::Poly(frame.apply_monomial(a, &inner)).compose(&ep.alpha)?;
                    k = &k + &(c * &d);
                }
                k.compose(&e.tau)?
            };
            out.push(DistPiece::along(&prod, g));
        }
    }
    Ok(out)
}

pub fn dist_mul_defcheck(tp: &TransvDist, t: &TransvDist, f: &CoeffFn, x: &[ExpNum]) -> Result<ExpNum> {
    dist_mul_defcheck_value(tp, t, f)?.eval_exact(x)
}

/// One summand of a distribution value: the function `x ↦ g(τ^{-1}(x))`
/// on `τ(region)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistPiece {
    pub region: Region,
    pub tau: Vec<CoeffFn>,
    pub tau_inv: Option<Vec<CoeffFn>>,
    pub g: CoeffFn,
}

impl DistPiece {
    fn along(b: &Bisection, g: CoeffFn) -> Self {
        DistPiece {
            region: b.domain.clone(),
            tau: b.tau.clone(),
            tau_inv: b.tau_inv.clone(),
            g,
        }
    }
}

/// A function on the base, `Σ g_i∘τ_i^{-1}` on `τ_i(region_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistValue {
    pub base_dim: usize,
    pub pieces: Vec<DistPiece>,
}

fn contains_f64(r: &Region, x: f64) -> bool {
    r.boxes().iter().any(|b| {
        let i = &b[0];
        i.lo.as_ref().is_none_or(|l| q_to_f64(l) < x) && i.hi.as_ref().is_none_or(|h| x < q_to_f64(h))
    })
}

/// Solve `τ(z) = x` for a monotone map of the line.
fn solve_monotone(tau: &CoeffFn, x: f64) -> Option<f64> {
    let f = |z: f64| tau.eval_f64(&[z]) - x;
    let increasing = tau.eval_f64(&[1.0]) > tau.eval_f64(&[-1.0]);
    let sgn = if increasing { 1.0 } else { -1.0 };
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut k = 0;
    while sgn * f(lo) > 0.0 || sgn * f(hi) < 0.0 {
        lo *= 2.0;
        hi *= 2.0;
        k += 1;
        if k > 80 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sgn * f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

impl DistValue {
    pub fn zero(base_dim: usize) -> Self {
        DistValue {
            base_dim,
            pieces: Vec::new(),
        }
    }

    fn push(&mut self, p: DistPiece) {
        if !p.g.is_zero() && !p.region.is_empty() {
            self.pieces.push(p);
        }
    }

    pub fn add(&self, other: &DistValue) -> DistValue {
        let mut out = self.clone();
        out.pieces.extend(other.pieces.iter().cloned());
        out
    }

    pub fn neg(&self) -> DistValue {
        let mut out = self.clone();
        for p in &mut out.pieces {
            p.g = -&p.g;
        }
        out
    }

    pub fn sub(&self, other: &DistValue) -> DistValue {
        self.add(&other.neg())
    }

    /// Exact value at a base point. Pieces whose base map has no
    /// representable inverse are evaluated only at their fixed point 0.
    pub fn eval_exact(&self, x: &[ExpNum]) -> Result<ExpNum> {
        let mut acc = ExpNum::zero();
        for p in &self.pieces {
            if self.base_dim == 0 {
                acc = acc + p.g.eval(&[])?;
                continue;
            }
            let z = match &p.tau_inv {
                Some(ti) => ti[0].eval(x)?,
                None if x[0].is_zero() && p.tau[0].eval_q(&[Q::zero()])?.is_zero() => ExpNum::zero(),
                None => {
                    return Err(Error::UnsupportedComposition(format!(
                        "preimage of {} under a kinked base map",
                        x[0]
                    )))
                }
            };
            let z = vec![z];
            if p.region.contains(&z) {
                acc = acc + p.g.eval(&z)?;
            }
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for p in &self.pieces {
            if self.base_dim == 0 {
                acc += p.g.eval_f64(&[]);
                continue;
            }
            let z = match &p.tau_inv {
                Some(ti) => Some(ti[0].eval_f64(x)),
                None => solve_monotone(&p.tau[0], x[0]),
            };
            if let Some(z) = z {
                if contains_f64(&p.region, z) {
                    acc += p.g.eval_f64(&[z]);
                }
            }
        }
        acc
    }

    /// Exact vanishing test. Pieces are grouped by their base map on each
    /// elementary interval of the common refinement; each group must cancel,
    /// and the values at the cut points must cancel.
    pub fn zero_witness(&self) -> Result<Option<String>> {
        if self.base_dim == 0 {
            let mut acc = CoeffFn::zero(0);
            for p in &self.pieces {
                acc = &acc + &p.g;
            }
            return Ok((!acc.is_zero()).then(|| format!("value {}", crate::coeffs::text::format_coeff(&acc, &[]))));
        }
        let mut cuts: Vec<Q> = vec![Q::zero()];
        for p in &self.pieces {
            cuts.extend(p.region.endpoints());
        }
        cuts.sort();
        cuts.dedup();
        let mut cells: Vec<Interval> = Vec::new();
        cells.push(Interval::new(None, Some(cuts[0].clone())));
        for w in cuts.windows(2) {
            cells.push(Interval::new(Some(w[0].clone()), Some(w[1].clone())));
        }
        cells.push(Interval::new(cuts.last().cloned(), None));

        let mut groups: Vec<(usize, CoeffFn, CoeffFn)> = Vec::new();
        for p in &self.pieces {
            for (ci, cell) in cells.iter().enumerate() {
                let s = cell.sample();
                if !p.region.contains_q(std::slice::from_ref(&s)) {
                    continue;
                }
                let side = if s.is_positive() { Ordering::Greater } else { Ordering::Less };
                let tau = p.tau[0].branch(side);
                let g = p.g.branch(side);
                match groups.iter_mut().find(|(c, t, _)| *c == ci && *t == tau) {
                    Some(slot) => slot.2 = (&slot.2 + &g).branch(side),
                    None => groups.push((ci, tau, g)),
                }
            }
        }
        for (ci, tau, g) in &groups {
            if !g.is_zero() {
                return Ok(Some(format!(
                    "on source cell {} along {}: {}",
                    cells[*ci],
                    crate::coeffs::text::format_coeff(tau, &["t".to_string()]),
                    crate::coeffs::text::format_coeff(g, &["t".to_string()])
                )));
            }
        }
        let mut points: Vec<(ExpNum, ExpNum)> = Vec::new();
        for c in &cuts {
            for p in &self.pieces {
                if !p.region.contains_q(std::slice::from_ref(c)) {
                    continue;
                }
                let x = p.tau[0].eval_q(std::slice::from_ref(c))?;
                let v = p.g.eval_q(std::slice::from_ref(c))?;
                match points.iter_mut().find(|(y, _)| *y == x) {
                    Some(slot) => slot.1 = slot.1.clone() + v,
                    None => points.push((x, v)),
                }
            }
        }
        for (x, v) in points {
            if !v.is_zero() {
                return Ok(Some(format!("value {v} at {x}")));
            }
        }
        Ok(None)
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.zero_witness()?.is_none())
    }
}

/// Test functions: all monomials of degree ≤ 4 on the arrow chart and five
/// seeded random cubics.
pub fn test_bank(model: &GroupoidModel, seed: u64) -> Vec<CoeffFn> {
    let n = model.arrow_dim();
    let mut out = Vec::new();
    let mut exps = vec![vec![0u32; n]];
    for _ in 0..4 {
        let mut next = Vec::new();
        for e in &exps {
            for i in 0..n {
                let mut e2 = e.clone();
                e2[i] += 1;
                next.push(e2);
            }
        }
        exps.extend(next);
        exps.sort();
        exps.dedup();
    }
    exps.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
    for e in exps {
        out.push(CoeffFn::Poly(Poly::monomial(e, q(1))));
    }
    let mut r = rng(seed);
    for _ in 0..5 {
        out.push(CoeffFn::Poly(random_poly(&mut r, n, 3, 5)));
    }
    out
}

/// Equal when canonical forms agree, or when the difference vanishes on the
/// whole test bank.
pub fn dist_eq(a: &TransvDist, b: &TransvDist, bank: &[CoeffFn]) -> Result<bool> {
    if a == b {
        return Ok(true);
    }
    let d = a.sub(b)?;
    for f in bank {
        if !d.eval(f)?.is_zero()? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::FlatFn;
    use crate::number::{qr, rational_point};
    use crate::random::random_uea;

    fn var(n: usize, i: usize) -> CoeffFn {
        CoeffFn::var(n, i)
    }

    #[test]
    fn left_invariant_frames() {
        let pair = GroupoidModel::pair();
        let fr = frame_of(&pair);
        assert_eq!(fr.fields, vec![vec![Poly::zero(2), Poly::one(2)]]);
        let heis = GroupoidModel::heisenberg();
        let fr = frame_of(&heis);
        // Y -> ∂b + a∂c
        assert_eq!(fr.fields[1], vec![Poly::zero(3), Poly::one(3), Poly::var(3, 0)]);
        for m in [pair, heis, GroupoidModel::etale()] {
            assert_eq!(frame_of(&m).check(&m), None);
        }
        let reg = Registry::pair_standard();
        let zero = Section::zero(&reg.model.lie);
        assert!(left_invariant_field(&reg.model, &zero).unwrap().iter().all(CoeffFn::is_zero));
    }

    #[test]
    fn omega_examples() {
        let heis = GroupoidModel::heisenberg();
        let y = UEAElement::generator(&heis.lie, 1);
        let ab = &var(3, 0) * &var(3, 1);
        assert_eq!(omega_apply(&heis, &y, &ab).unwrap(), var(3, 0));
        let pair = GroupoidModel::pair();
        let f = UEAElement::from_fn(&pair.lie, var(1, 0));
        let big_f = &var(2, 0) * &var(2, 0);
        assert_eq!(omega_apply(&pair, &f, &big_f).unwrap(), &var(2, 1) * &big_f);
        let one = UEAElement::one(&pair.lie);
        assert_eq!(omega_apply(&pair, &one, &big_f).unwrap(), big_f);
    }

    #[test]
    fn omega_is_an_algebra_action() {
        let mut r = rng(5);
        for m in [GroupoidModel::pair(), GroupoidModel::heisenberg()] {
            for _ in 0..10 {
                let u = random_uea(&mut r, &m.lie, 2, 2);
                let v = random_uea(&mut r, &m.lie, 2, 2);
                let f = CoeffFn::Poly(random_poly(&mut r, m.arrow_dim(), 4, 4));
                let lhs = omega_apply(&m, &u.mul(&v).unwrap(), &f).unwrap();
                let rhs = omega_apply(&m, &u, &omega_apply(&m, &v, &f).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn adbar_examples() {
        let reg = Registry::pair_standard();
        let d = UEAElement::generator(&reg.model.lie, 0);
        let d2 = reg.get("D2").unwrap();
        assert_eq!(adbar(&reg.model, &d2, &d, 1).unwrap(), d.scale(&q(2)));
        assert_eq!(adbar(&reg.model, &reg.unit(), &d, 1).unwrap(), d);
        let heis = Registry::heisenberg_standard();
        heis.insert(Bisection::group_element("b2", [q(0), q(2), q(0)])).unwrap();
        let x = UEAElement::generator(&heis.model.lie, 0);
        let z = UEAElement::generator(&heis.model.lie, 2);
        let k = heis.get("b2").unwrap();
        assert_eq!(adbar(&heis.model, &k, &x, 1).unwrap(), x.sub(&z.scale(&q(2))).unwrap());
        let mut r = rng(11);
        for reg in [Registry::pair_standard(), Registry::heisenberg_standard(), Registry::etale_standard()] {
            for b in reg.declared() {
                let u = random_uea(&mut r, &reg.model.lie, 2, 3);
                adbar(&reg.model, &b, &u, 7).unwrap();
            }
        }
    }

    #[test]
    fn dirac_family_at_units() {
        let reg = Arc::new(Registry::pair_standard());
        let t = TransvDist::term(&reg, "1", UEAElement::one(&reg.model.lie)).unwrap();
        let f = &var(2, 0) * &var(2, 1).scale(&q(3));
        let v = t.eval(&f).unwrap();
        // F(1_x) = 3x^2
        assert_eq!(v.eval_exact(&rational_point(&[q(2)])).unwrap(), ExpNum::rational(q(12)));
    }

    #[test]
    fn derivative_along_translation() {
        // ⟦graph(x+1), ∂⟧(F)(y) = ∂F/∂x (y, y-1)
        let reg = Arc::new(Registry::pair_standard());
        let d = UEAElement::generator(&reg.model.lie, 0);
        let t = TransvDist::term(&reg, "T1", d).unwrap();
        let f = &var(2, 0) * &(&var(2, 1) * &var(2, 1));
        let v = t.eval(&f).unwrap();
        // 2 y (y - 1) at y = 3
        assert_eq!(v.eval_exact(&rational_point(&[q(3)])).unwrap(), ExpNum::rational(q(12)));
    }

    #[test]
    fn degree_zero_product() {
        let reg = Arc::new(Registry::pair_standard());
        let lie = reg.model.lie.clone();
        let t1 = TransvDist::term(&reg, "D2", UEAElement::from_fn(&lie, var(1, 0))).unwrap();
        let t0 = TransvDist::term(&reg, "T1", UEAElement::from_fn(&lie, &var(1, 0) + &CoeffFn::one(1))).unwrap();
        let p = t1.mul(&t0).unwrap();
        // (f'∘τ_E)·f = (t+1)(t+1)
        let want = TransvDist::term(&reg, "D2·T1", UEAElement::from_fn(&lie, &(&var(1, 0) + &CoeffFn::one(1)) * &(&var(1, 0) + &CoeffFn::one(1)))).unwrap();
        assert_eq!(p, want);
        let unit = TransvDist::term(&reg, "1", UEAElement::one(&lie)).unwrap();
        assert_eq!(unit.mul(&t0).unwrap(), t0);
        assert_eq!(t0.mul(&unit).unwrap(), t0);
    }

    #[test]
    fn product_matches_definition() {
        let mut r = rng(21);
        for reg in [Registry::pair_standard(), Registry::heisenberg_standard(), Registry::etale_standard()] {
            let reg = Arc::new(reg);
            let bank = test_bank(&reg.model, 1);
            let ids: Vec<String> = reg.declared().iter().map(|b| b.id.clone()).collect();
            for k in 0..6 {
                let a = TransvDist::term(&reg, &ids[k % ids.len()], random_uea(&mut r, &reg.model.lie, 2, 2)).unwrap();
                let b = TransvDist::term(&reg, &ids[(k * 3 + 1) % ids.len()], random_uea(&mut r, &reg.model.lie, 2, 2)).unwrap();
                let p = a.mul(&b).unwrap();
                for f in bank.iter().step_by(7) {
                    let lhs = p.eval(f).unwrap();
                    let rhs = dist_mul_defcheck_value(&a, &b, f).unwrap();
                    assert_eq!(lhs.sub(&rhs).zero_witness().unwrap(), None, "{a} * {b} on {f:?}");
                }
            }
        }
    }

    #[test]
    fn kinked_pieces_cancel_branchwise() {
        let reg = Arc::new(Registry::pair_kinked());
        let lie = reg.model.lie.clone();
        let one = UEAElement::one(&lie);
        let mut t = TransvDist::zero(&reg);
        for (id, sign) in [("E00", 1), ("E01", -1), ("E10", -1), ("E11", 1)] {
            t = t.add(&TransvDist::term(&reg, id, one.scale(&q(sign))).unwrap()).unwrap();
        }
        let f = &var(2, 0) + &(&var(2, 1) * &var(2, 1));
        let v = t.eval(&f).unwrap();
        assert!(v.is_zero().unwrap());
        assert!(v.eval_f64(&[0.7]).abs() < 1e-12);
        assert!(v.eval_exact(&rational_point(&[q(0)])).unwrap().is_zero());
        let half = TransvDist::term(&reg, "E00", one.clone()).unwrap();
        assert!(!half.eval(&f).unwrap().is_zero().unwrap());
    }

    #[test]
    fn numeric_inverse_of_kinked_map() {
        let tau = CoeffFn::flat(FlatFn::kinked_diffeo(1, 0));
        for x in [-2.0, -0.3, 0.0, 0.4, 3.0] {
            let z = solve_monotone(&tau, x).unwrap();
            assert!((tau.eval_f64(&[z]) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn bank_shape() {
        assert_eq!(test_bank(&GroupoidModel::pair(), 0).len(), 15 + 5);
        assert_eq!(test_bank(&GroupoidModel::heisenberg(), 0).len(), 35 + 5);
        assert_eq!(test_bank(&GroupoidModel::pair(), 3), test_bank(&GroupoidModel::pair(), 3));
    }

    #[test]
    fn equality_through_test_bank() {
        let reg = Arc::new(Registry::pair_standard());
        let lie = reg.model.lie.clone();
        let bank = test_bank(&reg.model, 0);
        let a = TransvDist::term(&reg, "T1", UEAElement::from_fn(&lie, var(1, 0))).unwrap();
        let b = TransvDist::term(&reg, "T1", UEAElement::from_fn(&lie, CoeffFn::constant(1, qr(1, 2)))).unwrap();
        assert!(dist_eq(&a, &a, &bank).unwrap());
        assert!(!dist_eq(&a, &b, &bank).unwrap());
    }
}
