//! The universal enveloping algebra U(R, L) in PBW normal form.
//!
//! Elements are finite sums `Σ f_a · X_1^{a_1} ⋯ X_r^{a_r}` with the
//! coefficient function on the left. Products are normalized with the two
//! rewriting rules `X_i f = f X_i + X_i(f)` and
//! `X_i X_j = X_j X_i + [X_i, X_j]` for `i > j`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::coeffs::{text, CoeffFn};
use crate::error::{Error, Result};
use crate::lie_rinehart::{same_parent, LieRinehart, Section};
use crate::number::{q, ExpNum, Q};

pub type Exps = Vec<u32>;

#[derive(Clone, Debug)]
pub struct UEAElement {
    pub parent: Arc<LieRinehart>,
    terms: BTreeMap<Exps, CoeffFn>,
}

impl PartialEq for UEAElement {
    fn eq(&self, other: &Self) -> bool {
        same_parent(&self.parent, &other.parent) && self.terms == other.terms
    }
}

impl Eq for UEAElement {}

impl std::hash::Hash for UEAElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

fn binom(n: u32, k: u32) -> Q {
    let mut acc = q(1);
    for i in 0..k {
        acc = acc * q((n - i) as i64) / q((i + 1) as i64);
    }
    acc
}

impl UEAElement {
    pub fn zero(parent: &Arc<LieRinehart>) -> Self {
        UEAElement {
            parent: parent.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(parent: &Arc<LieRinehart>) -> Self {
        UEAElement::from_fn(parent, CoeffFn::one(parent.dim()))
    }

    pub fn from_fn(parent: &Arc<LieRinehart>, f: CoeffFn) -> Self {
        UEAElement::monomial(parent, vec![0; parent.rank()], f)
    }

    pub fn generator(parent: &Arc<LieRinehart>, i: usize) -> Self {
        let mut e = vec![0; parent.rank()];
        e[i] = 1;
        UEAElement::monomial(parent, e, CoeffFn::one(parent.dim()))
    }

    pub fn monomial(parent: &Arc<LieRinehart>, exps: Exps, f: CoeffFn) -> Self {
        assert_eq!(exps.len(), parent.rank());
        let mut u = UEAElement::zero(parent);
        u.add_term(exps, f);
        u
    }

    pub fn from_section(x: &Section) -> Self {
        let mut u = UEAElement::zero(&x.parent);
        for (i, c) in x.coeffs.iter().enumerate() {
            let mut e = vec![0; x.parent.rank()];
            e[i] = 1;
            u.add_term(e, c.clone());
        }
        u
    }

    pub fn from_terms(parent: &Arc<LieRinehart>, terms: impl IntoIterator<Item = (Exps, CoeffFn)>) -> Self {
        let mut u = UEAElement::zero(parent);
        for (e, f) in terms {
            u.add_term(e, f);
        }
        u
    }

    pub fn add_term(&mut self, exps: Exps, f: CoeffFn) {
        if f.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps.clone()).or_insert_with(|| CoeffFn::zero(f.nvars()));
        *slot = &*slot + &f;
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &CoeffFn)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> CoeffFn {
        self.terms.get(exps).cloned().unwrap_or_else(|| CoeffFn::zero(self.parent.dim()))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Filtration degree; the zero element has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn check_parent(&self, other: &UEAElement) -> Result<()> {
        if same_parent(&self.parent, &other.parent) {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    pub fn add(&self, other: &UEAElement) -> Result<UEAElement> {
        self.check_parent(other)?;
        let mut out = self.clone();
        for (e, f) in &other.terms {
            out.add_term(e.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &UEAElement) -> Result<UEAElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> UEAElement {
        self.map_coeffs(|f| -f)
    }

    pub fn scale(&self, c: &Q) -> UEAElement {
        self.map_coeffs(|f| f.scale(c))
    }

    /// Left multiplication by a function.
    pub fn mul_fn(&self, g: &CoeffFn) -> UEAElement {
        self.map_coeffs(|f| g * f)
    }

    pub fn map_coeffs(&self, mut m: impl FnMut(&CoeffFn) -> CoeffFn) -> UEAElement {
        let mut out = UEAElement::zero(&self.parent);
        for (e, f) in &self.terms {
            out.add_term(e.clone(), m(f));
        }
        out
    }

    pub fn try_map_coeffs(&self, mut m: impl FnMut(&CoeffFn) -> Result<CoeffFn>) -> Result<UEAElement> {
        let mut out = UEAElement::zero(&self.parent);
        for (e, f) in &self.terms {
            out.add_term(e.clone(), m(f)?);
        }
        Ok(out)
    }

    /// PBW normal form of `self · other`.
    pub fn mul(&self, other: &UEAElement) -> Result<UEAElement> {
        self.check_parent(other)?;
        let mut ctx = Normalizer::new(&self.parent);
        let mut out = UEAElement::zero(&self.parent);
        for (a, f) in &self.terms {
            let mut w = other.clone();
            for i in (0..a.len()).rev() {
                for _ in 0..a[i] {
                    w = ctx.left_mul_gen(i, &w);
                }
            }
            for (e, g) in w.terms {
                out.add_term(e, f * &g);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> UEAElement {
        let mut acc = UEAElement::one(&self.parent);
        for _ in 0..n {
            acc = acc.mul(self).expect("same parent");
        }
        acc
    }

    /// Δ(f X^a) = f Σ_b binom(a, b) X^b ⊗ X^{a-b}
    pub fn coproduct(&self) -> TensorElement {
        let mut out = TensorElement::zero(&self.parent, 2);
        for (a, f) in &self.terms {
            for (b, c, k) in splits(a) {
                out.add_term(vec![b, c], f.scale(&k));
            }
        }
        out
    }

    /// ε(u) = ϱ(u)(1), asserted equal to the degree-0 coefficient.
    pub fn counit(&self) -> CoeffFn {
        let one = CoeffFn::one(self.parent.dim());
        let via_rep = self.anchor_rep(&one).expect("chart of the parent");
        let direct = self.coeff(&vec![0; self.parent.rank()]);
        debug_assert_eq!(via_rep, direct, "counit characterizations disagree");
        via_rep
    }

    /// ϱ(u)(f): the action of `u` on functions by iterated anchors.
    pub fn anchor_rep(&self, f: &CoeffFn) -> Result<CoeffFn> {
        if f.nvars() != self.parent.dim() {
            return Err(Error::ChartMismatch("function on another chart".into()));
        }
        let mut acc = CoeffFn::zero(self.parent.dim());
        for (a, g) in &self.terms {
            let mut h = f.clone();
            for i in (0..a.len()).rev() {
                for _ in 0..a[i] {
                    h = self.parent.anchor_basis(i, &h);
                }
            }
            acc = &acc + &(g * &h);
        }
        Ok(acc)
    }

    pub fn is_primitive(&self) -> bool {
        let one = UEAElement::one(&self.parent);
        let expected = TensorElement::pure(&[one.clone(), self.clone()])
            .add(&TensorElement::pure(&[self.clone(), one]));
        self.coproduct() == expected
    }

    pub fn germ(&self, x: &[ExpNum]) -> Result<GermUEA> {
        self.parent.chart.check_point(x)?;
        Ok(GermUEA {
            u: self.clone(),
            point: x.to_vec(),
        })
    }

    /// Does `self` vanish on a neighbourhood of `x`?
    pub fn is_zero_germ(&self, x: &[ExpNum]) -> Result<bool> {
        for f in self.terms.values() {
            if !f.is_zero_germ(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_text(&self) -> String {
        let vars = &self.parent.chart.vars;
        let mut terms: Vec<(Q, String)> = Vec::new();
        let mut keys: Vec<&Exps> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for e in keys {
            let f = &self.terms[e];
            let mono = self.monomial_text(e);
            match f.as_constant() {
                Some(c) => terms.push((c, mono)),
                None => {
                    let ft = text::format_coeff(f, vars);
                    let ft = if text::needs_parens(f) { format!("({ft})") } else { ft };
                    let s = if mono.is_empty() { ft } else { format!("{ft} * {mono}") };
                    terms.push((q(1), s));
                }
            }
        }
        text::join_terms_sep(&terms, " * ")
    }

    fn monomial_text(&self, e: &[u32]) -> String {
        e.iter()
            .zip(&self.parent.basis)
            .filter(|(k, _)| **k > 0)
            .map(|(k, n)| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for UEAElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// All splittings `a = b + c` with the multinomial weight Π binom(a_i, b_i).
fn splits(a: &[u32]) -> Vec<(Exps, Exps, Q)> {
    let mut out = vec![(Vec::new(), Vec::new(), q(1))];
    for &ai in a {
        let mut next = Vec::with_capacity(out.len() * (ai as usize + 1));
        for (b, c, k) in &out {
            for bi in 0..=ai {
                let mut b2 = b.clone();
                b2.push(bi);
                let mut c2 = c.clone();
                c2.push(ai - bi);
                next.push((b2, c2, k * binom(ai, bi)));
            }
        }
        out = next;
    }
    out
}

/// Normal-ordering engine with a cache for `X_i · X^b`.
struct Normalizer<'a> {
    lie: &'a Arc<LieRinehart>,
    cache: HashMap<(usize, Exps), UEAElement>,
}

impl<'a> Normalizer<'a> {
    fn new(lie: &'a Arc<LieRinehart>) -> Self {
        Normalizer {
            lie,
            cache: HashMap::new(),
        }
    }

    /// X_i · w
    fn left_mul_gen(&mut self, i: usize, w: &UEAElement) -> UEAElement {
        let mut out = UEAElement::zero(self.lie);
        for (b, g) in &w.terms {
            // X_i g X^b = g X_i X^b + X_i(g) X^b
            let xg = self.lie.anchor_basis(i, g);
            out.add_term(b.clone(), xg);
            let prod = self.gen_times_monomial(i, b);
            for (e, h) in &prod.terms {
                out.add_term(e.clone(), g * h);
            }
        }
        out
    }

    /// X_i · X^b in normal form.
    fn gen_times_monomial(&mut self, i: usize, b: &[u32]) -> UEAElement {
        let key = (i, b.to_vec());
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let j = b.iter().position(|&e| e > 0);
        let result = match j {
            Some(j) if j < i => {
                // X_i X_j X^{b'} = X_j (X_i X^{b'}) + [X_i, X_j] X^{b'}
                let mut rest = b.to_vec();
                rest[j] -= 1;
                let inner = self.gen_times_monomial(i, &rest);
                let mut out = self.left_mul_gen(j, &inner);
                let structure = self.lie.bracket[i][j].clone();
                for (k, c) in structure.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let xk = self.gen_times_monomial(k, &rest);
                    for (e, h) in &xk.terms {
                        out.add_term(e.clone(), c * h);
                    }
                }
                out
            }
            _ => {
                let mut e = b.to_vec();
                e[i] += 1;
                UEAElement::monomial(self.lie, e, CoeffFn::one(self.lie.dim()))
            }
        };
        self.cache.insert(key, result.clone());
        result
    }
}

/// Element of the k-fold tensor power of U over R, canonical form
/// `Σ f · (X^{b_1} ⊗ ⋯ ⊗ X^{b_k})`.
#[derive(Clone, Debug)]
pub struct TensorElement {
    pub parent: Arc<LieRinehart>,
    pub arity: usize,
    terms: BTreeMap<Vec<Exps>, CoeffFn>,
}

impl PartialEq for TensorElement {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.terms == other.terms
    }
}

impl TensorElement {
    pub fn zero(parent: &Arc<LieRinehart>, arity: usize) -> Self {
        TensorElement {
            parent: parent.clone(),
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// u_1 ⊗ ⋯ ⊗ u_k with all coefficients pulled into the scalar slot.
    pub fn pure(factors: &[UEAElement]) -> Self {
        let parent = &factors[0].parent;
        let mut acc: Vec<(Vec<Exps>, CoeffFn)> = vec![(Vec::new(), CoeffFn::one(parent.dim()))];
        for u in factors {
            let mut next = Vec::new();
            for (keys, f) in &acc {
                for (e, g) in u.terms() {
                    let mut k2 = keys.clone();
                    k2.push(e.clone());
                    next.push((k2, f * g));
                }
            }
            acc = next;
        }
        let mut out = TensorElement::zero(parent, factors.len());
        for (k, f) in acc {
            out.add_term(k, f);
        }
        out
    }

    pub fn add_term(&mut self, keys: Vec<Exps>, f: CoeffFn) {
        assert_eq!(keys.len(), self.arity);
        if f.is_zero() {
            return;
        }
        let slot = self.terms.entry(keys.clone()).or_insert_with(|| CoeffFn::zero(f.nvars()));
        *slot = &*slot + &f;
        if slot.is_zero() {
            self.terms.remove(&keys);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Exps>, &CoeffFn)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (k, f) in &other.terms {
            out.add_term(k.clone(), f.clone());
        }
        out
    }

    pub fn neg(&self) -> TensorElement {
        let mut out = TensorElement::zero(&self.parent, self.arity);
        for (k, f) in &self.terms {
            out.add_term(k.clone(), -f);
        }
        out
    }

    /// Swap the two factors of a 2-tensor.
    pub fn flip(&self) -> TensorElement {
        assert_eq!(self.arity, 2);
        let mut out = TensorElement::zero(&self.parent, 2);
        for (k, f) in &self.terms {
            out.add_term(vec![k[1].clone(), k[0].clone()], f.clone());
        }
        out
    }

    fn mono(&self, e: &Exps) -> UEAElement {
        UEAElement::monomial(&self.parent, e.clone(), CoeffFn::one(self.parent.dim()))
    }

    /// Build a canonical tensor from per-slot elements times a scalar.
    fn push_product(&self, out: &mut TensorElement, scalar: &CoeffFn, slots: &[UEAElement]) {
        let mut t = TensorElement::pure(slots);
        t = t.scale_fn(scalar);
        *out = out.add(&t);
    }

    pub fn scale_fn(&self, g: &CoeffFn) -> TensorElement {
        let mut out = TensorElement::zero(&self.parent, self.arity);
        for (k, f) in &self.terms {
            out.add_term(k.clone(), g * f);
        }
        out
    }

    /// Factorwise product; well defined when `self` lies in the Takeuchi
    /// subspace.
    pub fn mul(&self, other: &TensorElement) -> Result<TensorElement> {
        assert_eq!(self.arity, other.arity);
        let mut out = TensorElement::zero(&self.parent, self.arity);
        for (k1, f) in &self.terms {
            for (k2, g) in &other.terms {
                let first = UEAElement::monomial(&self.parent, k1[0].clone(), f.clone())
                    .mul(&UEAElement::monomial(&self.parent, k2[0].clone(), g.clone()))?;
                let mut slots = vec![first];
                for s in 1..self.arity {
                    slots.push(self.mono(&k1[s]).mul(&self.mono(&k2[s]))?);
                }
                self.push_product(&mut out, &CoeffFn::one(self.parent.dim()), &slots);
            }
        }
        Ok(out)
    }

    /// Apply Δ to one slot of a 2-tensor, giving a 3-tensor.
    pub fn coproduct_at(&self, slot: usize) -> TensorElement {
        let mut out = TensorElement::zero(&self.parent, self.arity + 1);
        for (k, f) in &self.terms {
            for (b, c, w) in splits(&k[slot]) {
                let mut keys = k[..slot].to_vec();
                keys.push(b);
                keys.push(c);
                keys.extend(k[slot + 1..].iter().cloned());
                out.add_term(keys, f.scale(&w));
            }
        }
        out
    }

    /// Apply ε to one slot, contracting it into the scalar.
    pub fn counit_at(&self, slot: usize) -> UEAElement {
        assert_eq!(self.arity, 2);
        let mut out = UEAElement::zero(&self.parent);
        for (k, f) in &self.terms {
            if k[slot].iter().all(|&e| e == 0) {
                out.add_term(k[1 - slot].clone(), f.clone());
            }
        }
        out
    }

    /// Multiply one slot on the right by a function.
    pub fn right_mul_fn(&self, slot: usize, g: &CoeffFn) -> Result<TensorElement> {
        let gu = UEAElement::from_fn(&self.parent, g.clone());
        let mut out = TensorElement::zero(&self.parent, self.arity);
        for (k, f) in &self.terms {
            let mut slots: Vec<UEAElement> = k.iter().map(|e| self.mono(e)).collect();
            slots[slot] = slots[slot].mul(&gu)?;
            self.push_product(&mut out, f, &slots);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let vars = &self.parent.chart.vars;
        let mut parts = Vec::new();
        for (k, f) in &self.terms {
            let slots: Vec<String> = k
                .iter()
                .map(|e| {
                    let m = self.mono(e).to_text();
                    if m.contains(' ') {
                        format!("({m})")
                    } else {
                        m
                    }
                })
                .collect();
            let ft = text::format_coeff(f, vars);
            parts.push(format!("({ft})*({})", slots.join(" ⊗ ")));
        }
        parts.join(" + ")
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// A germ of an enveloping-algebra element at a base point.
#[derive(Clone, Debug)]
pub struct GermUEA {
    pub u: UEAElement,
    pub point: Vec<ExpNum>,
}

impl GermUEA {
    pub fn germ_eq(&self, other: &GermUEA) -> Result<bool> {
        if self.point != other.point {
            return Err(Error::ChartMismatch("germs at different points".into()));
        }
        self.u.sub(&other.u)?.is_zero_germ(&self.point)
    }

    pub fn mul(&self, other: &GermUEA) -> Result<GermUEA> {
        if self.point != other.point {
            return Err(Error::ChartMismatch("germs at different points".into()));
        }
        Ok(GermUEA {
            u: self.u.mul(&other.u)?,
            point: self.point.clone(),
        })
    }

    pub fn is_zero(&self) -> Result<bool> {
        self.u.is_zero_germ(&self.point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::FlatFn;
    use crate::number::rational_point;

    fn h3() -> Arc<LieRinehart> {
        Arc::new(LieRinehart::heisenberg())
    }

    fn line() -> Arc<LieRinehart> {
        Arc::new(LieRinehart::tangent_line())
    }

    #[test]
    fn heisenberg_reorder() {
        let h = h3();
        let x = UEAElement::generator(&h, 0);
        let y = UEAElement::generator(&h, 1);
        let z = UEAElement::generator(&h, 2);
        let yx = y.mul(&x).unwrap();
        let want = x.mul(&y).unwrap().sub(&z).unwrap();
        assert_eq!(yx, want);
        assert_eq!(yx.to_text(), "X Y - Z");
    }

    #[test]
    fn derivation_past_function() {
        let a = line();
        let d = UEAElement::generator(&a, 0);
        let t = UEAElement::from_fn(&a, CoeffFn::var(1, 0));
        let dt = d.mul(&t).unwrap();
        assert_eq!(dt.to_text(), "t * d + 1");
        assert_eq!(UEAElement::one(&a).mul(&dt).unwrap(), dt);
    }

    #[test]
    fn coproduct_examples() {
        let a = line();
        let d = UEAElement::generator(&a, 0);
        let one = UEAElement::one(&a);
        let delta = d.coproduct();
        let want = TensorElement::pure(&[one.clone(), d.clone()]).add(&TensorElement::pure(&[d.clone(), one.clone()]));
        assert_eq!(delta, want);
        let d2 = d.pow(2);
        let cross = TensorElement::pure(&[d.clone(), d.clone()]);
        let want = TensorElement::pure(&[one.clone(), d2.clone()])
            .add(&cross)
            .add(&cross)
            .add(&TensorElement::pure(&[d2.clone(), one.clone()]));
        assert_eq!(d2.coproduct(), want);
        assert!(d.is_primitive());
        assert!(!d2.is_primitive());
        let f = UEAElement::from_fn(&a, CoeffFn::var(1, 0));
        assert!(!f.is_primitive());
    }

    #[test]
    fn counit_examples() {
        let a = line();
        let t = CoeffFn::var(1, 0);
        let d = UEAElement::generator(&a, 0);
        assert!(d.counit().is_zero());
        assert_eq!(UEAElement::from_fn(&a, t.clone()).counit(), t);
        let u = d.mul_fn(&t).add(&UEAElement::from_fn(&a, CoeffFn::constant(1, q(3)))).unwrap();
        assert_eq!(u.counit(), CoeffFn::constant(1, q(3)));
    }

    #[test]
    fn anchor_rep_examples() {
        let a = line();
        let t = CoeffFn::var(1, 0);
        let d = UEAElement::generator(&a, 0);
        let t3 = &(&t * &t) * &t;
        assert_eq!(d.pow(2).anchor_rep(&t3).unwrap(), t.scale(&q(6)));
        assert!(d.mul_fn(&t).anchor_rep(&CoeffFn::one(1)).unwrap().is_zero());
        let dt = d.mul(&UEAElement::from_fn(&a, t.clone())).unwrap();
        assert_eq!(dt.anchor_rep(&t).unwrap(), t.scale(&q(2)));
    }

    #[test]
    fn germ_of_flat_difference() {
        let a = line();
        let d = UEAElement::generator(&a, 0);
        let diff = &CoeffFn::flat(FlatFn::kinked_diffeo(0, 0)) - &CoeffFn::flat(FlatFn::kinked_diffeo(0, 1));
        let u = d.mul_fn(&diff);
        assert!(!u.is_zero());
        assert!(u.germ(&rational_point(&[q(-1)])).unwrap().is_zero().unwrap());
        assert!(!u.germ(&rational_point(&[q(1)])).unwrap().is_zero().unwrap());
    }
}
