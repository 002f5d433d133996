//! The convolution bialgebra: finite formal sums `Σ ⟨u_i, E_i⟩` over the
//! bisection registry.
//!
//! A term `⟨u, E⟩` takes the value `germ_{t(e)} u` at every arrow germ `e`
//! of `E` and vanishes elsewhere, so `u` is read on `t(E)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::adjoint::ad_uea;
use crate::coeffs::{CoeffFn, Region};
use crate::error::{Error, Result};
use crate::groupoid::{Bisection, GermArrow, Registry};
use crate::random::{random_uea, TestRng};
use crate::uea::{GermUEA, TensorElement, UEAElement};

#[derive(Clone)]
pub struct ConvElement {
    pub reg: Arc<Registry>,
    terms: BTreeMap<String, UEAElement>,
}

impl PartialEq for ConvElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.reg, &other.reg) && self.terms == other.terms
    }
}

impl fmt::Debug for ConvElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConvElement({})", self.to_text())
    }
}

fn same_registry(a: &Arc<Registry>, b: &Arc<Registry>) -> Result<()> {
    if Arc::ptr_eq(a, b) {
        Ok(())
    } else {
        Err(Error::ParentMismatch)
    }
}

impl ConvElement {
    pub fn zero(reg: &Arc<Registry>) -> Self {
        ConvElement {
            reg: reg.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// `⟨u, E⟩`.
    pub fn term(reg: &Arc<Registry>, u: UEAElement, id: &str) -> Result<Self> {
        let b = reg.get(id)?;
        if !crate::lie_rinehart::same_parent(&u.parent, &reg.model.lie) {
            return Err(Error::ParentMismatch);
        }
        let mut out = ConvElement::zero(reg);
        out.push(&b, u);
        Ok(out)
    }

    /// `⟨f, E⟩` for a function `f`.
    pub fn function(reg: &Arc<Registry>, f: CoeffFn, id: &str) -> Result<Self> {
        ConvElement::term(reg, UEAElement::from_fn(&reg.model.lie, f), id)
    }

    /// The element `⟨1, M⟩`.
    pub fn one(reg: &Arc<Registry>) -> Self {
        ConvElement::term(reg, UEAElement::one(&reg.model.lie), crate::groupoid::UNIT_ID).unwrap()
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

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.values().map(UEAElement::degree).max().unwrap_or(0)
    }

    pub fn bisections(&self) -> Result<Vec<Arc<Bisection>>> {
        self.terms.keys().map(|id| self.reg.get(id)).collect()
    }

    pub fn add(&self, other: &ConvElement) -> Result<ConvElement> {
        same_registry(&self.reg, &other.reg)?;
        let mut out = self.clone();
        for (id, u) in &other.terms {
            let b = self.reg.get(id)?;
            out.push(&b, u.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> ConvElement {
        ConvElement {
            reg: self.reg.clone(),
            terms: self.terms.iter().map(|(k, u)| (k.clone(), u.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &ConvElement) -> Result<ConvElement> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &crate::number::Q) -> ConvElement {
        let mut out = ConvElement::zero(&self.reg);
        for (id, u) in &self.terms {
            out.push(&self.reg.get(id).unwrap(), u.scale(c));
        }
        out
    }

    /// The value at an arrow germ: the sum over terms whose bisection has
    /// that germ.
    pub fn eval_germ(&self, e: &GermArrow) -> Result<GermUEA> {
        let point = e.target()?;
        let mut acc = UEAElement::zero(&self.reg.model.lie);
        for (id, u) in &self.terms {
            let b = self.reg.get(id)?;
            if !b.domain.contains(&e.source) {
                continue;
            }
            if GermArrow::new(b, e.source.clone())?.germ_eq(e)? {
                acc = acc.add(u)?;
            }
        }
        acc.germ(&point)
    }

    /// `⟨u', E'⟩·⟨u, E⟩ = ⟨u'·Ad_{E'}(u), E'E⟩`, bilinearly.
    pub fn mul(&self, other: &ConvElement) -> Result<ConvElement> {
        same_registry(&self.reg, &other.reg)?;
        let model = &self.reg.model;
        let mut out = ConvElement::zero(&self.reg);
        for (idp, up) in &self.terms {
            let ep = self.reg.get(idp)?;
            for (id, u) in &other.terms {
                let prod = self.reg.mul(idp, id)?;
                if prod.is_empty() {
                    continue;
                }
                let moved = ad_uea(model, &ep, u)?;
                out.push(&prod, up.mul(&moved)?);
            }
        }
        Ok(out)
    }

    /// Δ⟨u, E⟩ = Σ ⟨u_(1), E⟩ ⊗ ⟨u_(2), E⟩.
    pub fn coproduct(&self) -> ConvTensor {
        let mut out = ConvTensor::zero(&self.reg);
        for (id, u) in &self.terms {
            out.push(id, u.coproduct());
        }
        out
    }

    /// ε(⟨u, E⟩) = ε(u) on t(E).
    pub fn counit(&self) -> Result<LocalFunction> {
        let mut out = LocalFunction::default();
        for (id, u) in &self.terms {
            let b = self.reg.get(id)?;
            out.push(b.target.clone(), u.counit());
        }
        Ok(out)
    }

    /// S⟨f, E⟩ = ⟨f∘τ_E, E^{-1}⟩ on the étale part.
    pub fn antipode(&self) -> Result<ConvElement> {
        let mut out = ConvElement::zero(&self.reg);
        for (id, u) in &self.terms {
            if u.degree() > 0 {
                return Err(Error::NotEtaleElement(format!("term on {id} has degree {}", u.degree())));
            }
            let b = self.reg.get(id)?;
            let inv = self.reg.inv(id)?;
            out.push(&inv, u.try_map_coeffs(|f| f.compose(&b.tau))?);
        }
        Ok(out)
    }

    /// `u ⊗ ⟨1, E⟩` pieces of the tensor picture: one entry per PBW
    /// monomial of each term.
    pub fn tensor_picture(&self) -> Vec<(Vec<u32>, CoeffFn, String)> {
        let mut out = Vec::new();
        for (id, u) in &self.terms {
            for (e, f) in u.terms() {
                out.push((e.clone(), f.clone(), id.clone()));
            }
        }
        out
    }

    pub fn from_tensor_picture(reg: &Arc<Registry>, pieces: &[(Vec<u32>, CoeffFn, String)]) -> Result<ConvElement> {
        let mut out = ConvElement::zero(reg);
        for (e, f, id) in pieces {
            let u = UEAElement::monomial(&reg.model.lie, e.clone(), f.clone());
            out = out.add(&ConvElement::term(reg, u, id)?)?;
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(id, u)| format!("<{} | {}>", u.to_text(), id))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for ConvElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

pub fn conv_mul(ap: &ConvElement, a: &ConvElement) -> Result<ConvElement> {
    ap.mul(a)
}

pub fn conv_coproduct(a: &ConvElement) -> ConvTensor {
    a.coproduct()
}

pub fn conv_counit(a: &ConvElement) -> Result<LocalFunction> {
    a.counit()
}

pub fn antipode_etale(b: &ConvElement) -> Result<ConvElement> {
    b.antipode()
}

/// A function on the base given as a sum of functions restricted to
/// regions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalFunction {
    pub pieces: Vec<(Region, CoeffFn)>,
}

impl LocalFunction {
    fn push(&mut self, r: Region, f: CoeffFn) {
        if f.is_zero() || r.is_empty() {
            return;
        }
        if let Some(slot) = self.pieces.iter_mut().find(|(r2, _)| *r2 == r) {
            slot.1 = &slot.1 + &f;
        } else {
            self.pieces.push((r, f));
        }
        self.pieces.retain(|(_, f)| !f.is_zero());
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// The same function as an element `Σ ⟨f_i, 1|R_i⟩`.
    pub fn as_element(&self, reg: &Arc<Registry>) -> Result<ConvElement> {
        let mut out = ConvElement::zero(reg);
        for (r, f) in &self.pieces {
            let unit = reg.unit_on(r);
            out = out.add(&ConvElement::function(reg, f.clone(), &unit.id)?)?;
        }
        Ok(out)
    }
}

/// Elements of `A ⊗_R A` supported on the diagonal: bisection id to a
/// 2-tensor of enveloping-algebra elements.
#[derive(Clone)]
pub struct ConvTensor {
    pub reg: Arc<Registry>,
    terms: BTreeMap<String, TensorElement>,
}

impl PartialEq for ConvTensor {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.reg, &other.reg) && self.terms == other.terms
    }
}

impl fmt::Debug for ConvTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(id, t)| format!("{id}: {t}")).collect();
        write!(f, "ConvTensor[{}]", parts.join("; "))
    }
}

impl ConvTensor {
    pub fn zero(reg: &Arc<Registry>) -> Self {
        ConvTensor {
            reg: reg.clone(),
            terms: BTreeMap::new(),
        }
    }

    fn push(&mut self, id: &str, t: TensorElement) {
        if t.is_zero() || id == "0" {
            return;
        }
        let slot = self.terms.entry(id.to_string()).or_insert_with(|| TensorElement::zero(&t.parent, 2));
        *slot = slot.add(&t);
        if slot.is_zero() {
            self.terms.remove(id);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&String, &TensorElement)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn flip(&self) -> ConvTensor {
        let mut out = ConvTensor::zero(&self.reg);
        for (id, t) in &self.terms {
            out.push(id, t.flip());
        }
        out
    }

    /// Factorwise product through the convolution product in each slot.
    pub fn mul(&self, other: &ConvTensor) -> Result<ConvTensor> {
        same_registry(&self.reg, &other.reg)?;
        let model = &self.reg.model;
        let lie = &model.lie;
        let mut out = ConvTensor::zero(&self.reg);
        for (idp, tp) in &self.terms {
            let ep = self.reg.get(idp)?;
            for (id, t) in &other.terms {
                let prod = self.reg.mul(idp, id)?;
                if prod.is_empty() {
                    continue;
                }
                let ti = ep.tau_inv_or_err()?;
                let mut moved = TensorElement::zero(lie, 2);
                for (keys, f) in t.terms() {
                    let slots = keys
                        .iter()
                        .map(|e| ad_uea(model, &ep, &UEAElement::monomial(lie, e.clone(), CoeffFn::one(lie.dim()))))
                        .collect::<Result<Vec<_>>>()?;
                    let g = f.compose(ti)?;
                    moved = moved.add(&TensorElement::pure(&slots).scale_fn(&g));
                }
                out.push(&prod.id, tp.mul(&moved)?);
            }
        }
        Ok(out)
    }

    /// Membership in `A ⊗̄_R A`: both right actions of R agree on the test
    /// functions.
    pub fn is_balanced(&self, probes: &[CoeffFn]) -> Result<bool> {
        for (id, t) in &self.terms {
            let b = self.reg.get(id)?;
            for f in probes {
                let g = f.compose(b.tau_inv_or_err()?)?;
                if t.right_mul_fn(0, &g)? != t.right_mul_fn(1, &g)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `μ∘(S⊗id)`.
    pub fn antipode_then_multiply(&self) -> Result<ConvElement> {
        let lie = &self.reg.model.lie;
        let mut out = ConvElement::zero(&self.reg);
        for (id, t) in &self.terms {
            for (keys, f) in t.terms() {
                let left = UEAElement::monomial(lie, keys[0].clone(), f.clone());
                let right = UEAElement::monomial(lie, keys[1].clone(), CoeffFn::one(lie.dim()));
                let a = ConvElement::term(&self.reg, left, id)?.antipode()?;
                let b = ConvElement::term(&self.reg, right, id)?;
                out = out.add(&a.mul(&b)?)?;
            }
        }
        Ok(out)
    }
}

/// Random element with `nterms` terms over the given bisections.
pub fn random_element(reg: &Arc<Registry>, rng: &mut TestRng, ids: &[String], nterms: usize, deg: u32) -> ConvElement {
    use rand::Rng;
    let mut out = ConvElement::zero(reg);
    for _ in 0..nterms {
        let id = &ids[rng.gen_range(0..ids.len())];
        let u = random_uea(rng, &reg.model.lie, deg, 2);
        out = out.add(&ConvElement::term(reg, u, id).unwrap()).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Poly;
    use crate::groupoid::ModelKind;
    use crate::number::{q, qr, rational_point};
    use crate::random::rng;

    fn t() -> CoeffFn {
        CoeffFn::var(1, 0)
    }

    #[test]
    fn function_product_rule() {
        let reg = Arc::new(Registry::pair_standard());
        let a = ConvElement::function(&reg, t(), "D2").unwrap();
        let b = ConvElement::function(&reg, &t() * &t(), "T1").unwrap();
        let p = a.mul(&b).unwrap();
        // f'·(f∘τ_{D2}^{-1}) = t·(t/2)^2
        let half = CoeffFn::Poly(Poly::affine(q(0), qr(1, 2)));
        let want = &t() * &(&half * &half);
        let id = reg.mul("D2", "T1").unwrap().id.clone();
        assert_eq!(p, ConvElement::function(&reg, want, &id).unwrap());
        assert_eq!(id, "D2·T1");
    }

    #[test]
    fn unit_is_a_unit() {
        let reg = Arc::new(Registry::pair_standard());
        let mut r = rng(3);
        let ids: Vec<String> = reg.declared().iter().map(|b| b.id.clone()).collect();
        let a = random_element(&reg, &mut r, &ids, 3, 2);
        let one = ConvElement::one(&reg);
        assert_eq!(one.mul(&a).unwrap(), a);
        assert_eq!(a.mul(&one).unwrap(), a);
    }

    #[test]
    fn heisenberg_twisted_product() {
        let reg = Arc::new(Registry::heisenberg_standard());
        let lie = reg.model.lie.clone();
        let x = UEAElement::generator(&lie, 0);
        let y = UEAElement::generator(&lie, 1);
        let z = UEAElement::generator(&lie, 2);
        let a = ConvElement::term(&reg, y.clone(), "kY").unwrap();
        let b = ConvElement::term(&reg, x.clone(), "kX").unwrap();
        let p = a.mul(&b).unwrap();
        // Ad_{(0,1,0)} X = X - Z
        let want = y.mul(&x.sub(&z).unwrap()).unwrap();
        let id = reg.mul("kY", "kX").unwrap().id.clone();
        assert_eq!(p, ConvElement::term(&reg, want, &id).unwrap());
    }

    #[test]
    fn coproduct_and_counit() {
        let reg = Arc::new(Registry::pair_standard());
        let lie = reg.model.lie.clone();
        let d = UEAElement::generator(&lie, 0);
        let a = ConvElement::term(&reg, d.clone(), "T1").unwrap();
        let one = UEAElement::one(&lie);
        let want = TensorElement::pure(&[one.clone(), d.clone()]).add(&TensorElement::pure(&[d, one]));
        let got = a.coproduct();
        assert_eq!(got.terms().collect::<Vec<_>>(), vec![(&"T1".to_string(), &want)]);
        assert!(a.counit().unwrap().is_zero());
        let f = ConvElement::function(&reg, &t() + &CoeffFn::one(1), "D2").unwrap();
        assert_eq!(f.counit().unwrap().pieces, vec![(Region::whole(1), &t() + &CoeffFn::one(1))]);
        assert!(ConvElement::zero(&reg).coproduct().is_zero());
    }

    #[test]
    fn eval_germ_sums_germ_equal_terms() {
        let reg = Arc::new(Registry::pair_kinked());
        let one = CoeffFn::one(1);
        let a = ConvElement::function(&reg, one.clone(), "E00")
            .unwrap()
            .sub(&ConvElement::function(&reg, one.clone(), "E01").unwrap())
            .unwrap();
        let x = rational_point(&[q(-1)]);
        let e = GermArrow::new(reg.get("E00").unwrap(), x.clone()).unwrap();
        assert!(a.eval_germ(&e).unwrap().is_zero().unwrap());
        let x = rational_point(&[q(1)]);
        let e = GermArrow::new(reg.get("E00").unwrap(), x).unwrap();
        assert!(!a.eval_germ(&e).unwrap().is_zero().unwrap());
        let e = GermArrow::new(reg.get("E10").unwrap(), rational_point(&[q(-1)])).unwrap();
        assert!(a.eval_germ(&e).unwrap().is_zero().unwrap());
        let e = GermArrow::new(reg.get("E10").unwrap(), rational_point(&[q(1)])).unwrap();
        assert!(!a.eval_germ(&e).unwrap().is_zero().unwrap());
    }

    #[test]
    fn etale_antipode() {
        let reg = Arc::new(Registry::etale_standard());
        let f = ConvElement::function(&reg, &t() * &t(), "D").unwrap();
        let s = f.antipode().unwrap();
        let two_t = t().scale(&q(2));
        assert_eq!(s, ConvElement::function(&reg, &two_t * &two_t, "D^-1").unwrap());
        assert_eq!(s.antipode().unwrap(), f);
        let u = ConvElement::function(&reg, t(), "1").unwrap();
        assert_eq!(u.antipode().unwrap(), u);
    }

    #[test]
    fn antipode_rejects_higher_degree() {
        let reg = Arc::new(Registry::pair_standard());
        let d = UEAElement::generator(&reg.model.lie, 0);
        let a = ConvElement::term(&reg, d, "T1").unwrap();
        assert!(matches!(a.antipode(), Err(Error::NotEtaleElement(_))));
    }

    #[test]
    fn hopf_identity_on_disconnected_sheet() {
        let reg = Arc::new(Registry::etale_standard());
        let b = ConvElement::function(&reg, &t() + &CoeffFn::one(1), "S").unwrap();
        let lhs = b.coproduct().antipode_then_multiply().unwrap();
        let rhs = b.antipode().unwrap().counit().unwrap().as_element(&reg).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tensor_picture_round_trip() {
        for kind in [ModelKind::Pair, ModelKind::Heisenberg, ModelKind::Etale] {
            let reg = Arc::new(Registry::standard(kind));
            let ids: Vec<String> = reg.declared().iter().map(|b| b.id.clone()).collect();
            let a = random_element(&reg, &mut rng(9), &ids, 4, 2);
            let back = ConvElement::from_tensor_picture(&reg, &a.tensor_picture()).unwrap();
            assert_eq!(back, a);
        }
    }

    #[test]
    fn text_form() {
        let reg = Arc::new(Registry::pair_standard());
        let a = ConvElement::function(&reg, &t() * &t(), "T1").unwrap();
        assert_eq!(a.to_text(), "<t^2 | T1>");
        assert_eq!(ConvElement::zero(&reg).to_text(), "0");
    }
}
