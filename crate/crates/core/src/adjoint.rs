//! The adjoint action of bisections on the Lie algebroid and on the
//! enveloping algebra.
//!
//! `Ad_E` is the derivative of the conjugation
//! `C_E(h) = α_E(t(h)) · h · α_E(s(h))^{-1}` at units. It is stored as a
//! matrix `A(x)` of functions of the source point: the frame element `X_i`
//! at `x` goes to `Σ_j A[j][i](x) X_j` at `τ_E(x)`.

use num_traits::{One, Zero};

use crate::coeffs::CoeffFn;
use crate::dual::{coeff_eval_dual, poly_eval_dual, Dual};
use crate::error::{Error, Result};
use crate::groupoid::{fmt_point, Bisection, GermArrow, GroupoidModel, ModelKind};
use crate::lie_rinehart::Section;
use crate::number::{ExpNum, Point, Q};
use crate::uea::{GermUEA, UEAElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdMap {
    pub bisection: String,
    /// `matrix[j][i]`, functions of the source point.
    pub matrix: Vec<Vec<CoeffFn>>,
}

/// `α_E(t(h)) · h · α_E(s(h))^{-1}`.
pub fn conjugate_arrow(model: &GroupoidModel, e: &Bisection, h: &[ExpNum]) -> Result<Point> {
    let (s, t) = (model.s_at(h), model.t_at(h));
    if !e.domain.contains(&s) || !e.domain.contains(&t) {
        return Err(Error::DomainError(format!(
            "arrow {} leaves the domain {} of {}",
            fmt_point(h),
            e.domain,
            e.id
        )));
    }
    let at = e.alpha_at(&t)?;
    let as_inv = model.inv_at(&e.alpha_at(&s)?)?;
    model.mult_at(&model.mult_at(&at, h)?, &as_inv)
}

/// Inverse of a rational matrix by Gauss–Jordan elimination.
pub fn invert_q(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut inv: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for k in 0..n {
            a[col][k] = &a[col][k] / &p;
            inv[col][k] = &inv[col][k] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..n {
                    let (x, y) = (&a[col][k] * &f, &inv[col][k] * &f);
                    a[r][k] -= x;
                    inv[r][k] -= y;
                }
            }
        }
    }
    Some(inv)
}

/// Left inverse `(FᵀF)^{-1}Fᵀ` of the constant frame matrix.
fn frame_left_inverse(model: &GroupoidModel) -> Vec<Vec<Q>> {
    let r = model.frame.len();
    let n = model.arrow_dim();
    let gram: Vec<Vec<Q>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| (0..n).map(|k| &model.frame[i][k] * &model.frame[j][k]).sum())
                .collect()
        })
        .collect();
    let ginv = invert_q(&gram).expect("frame vectors are independent");
    (0..r)
        .map(|i| {
            (0..n)
                .map(|k| (0..r).map(|j| &ginv[i][j] * &model.frame[j][k]).sum())
                .collect()
        })
        .collect()
}

/// Ad_E by differentiating the conjugation with dual numbers.
pub fn ad_matrix(model: &GroupoidModel, e: &Bisection) -> Result<AdMap> {
    let b = model.base_dim();
    let r = model.frame.len();
    let x: Vec<CoeffFn> = (0..b).map(|i| CoeffFn::var(b, i)).collect();
    let unit = model.unit_fns(&x, b)?;
    let left_inv = frame_left_inverse(model);
    let unit_tau = model.unit_fns(&e.tau, b)?;
    let mut matrix = vec![vec![CoeffFn::zero(b); r]; r];
    for i in 0..r {
        let h: Vec<Dual> = unit
            .iter()
            .zip(&model.frame[i])
            .map(|(u, v)| Dual::new(u.clone(), CoeffFn::constant(b, v.clone())))
            .collect();
        let th: Vec<Dual> = model.t.iter().map(|p| poly_eval_dual(p, &h)).collect();
        let sh: Vec<Dual> = model.s.iter().map(|p| poly_eval_dual(p, &h)).collect();
        let at = e.alpha.iter().map(|a| coeff_eval_dual(a, &th)).collect::<Result<Vec<_>>>()?;
        let as_ = e.alpha.iter().map(|a| coeff_eval_dual(a, &sh)).collect::<Result<Vec<_>>>()?;
        let c = model.mult_dual(&model.mult_dual(&at, &h), &model.inv_dual(&as_)?);
        let re: Vec<CoeffFn> = c.iter().map(|d| d.re.clone()).collect();
        if re != unit_tau {
            return Err(Error::VerificationFailed {
                what: format!("conjugation by {} sends units to units", e.id),
                witness: format!("frame element {}", model.lie.basis[i]),
            });
        }
        let w: Vec<CoeffFn> = c.iter().map(|d| d.eps.clone()).collect();
        for j in 0..r {
            let mut acc = CoeffFn::zero(b);
            for (k, wk) in w.iter().enumerate() {
                if !left_inv[j][k].is_zero() {
                    acc = &acc + &wk.scale(&left_inv[j][k]);
                }
            }
            matrix[j][i] = acc;
        }
        // the derivative must lie in the span of the frame
        for (k, wk) in w.iter().enumerate() {
            let mut back = CoeffFn::zero(b);
            for j in 0..r {
                back = &back + &matrix[j][i].scale(&model.frame[j][k]);
            }
            if &back != wk {
                return Err(Error::VerificationFailed {
                    what: format!("Ad_{} is tangent to target fibres", e.id),
                    witness: format!("frame element {}", model.lie.basis[i]),
                });
            }
        }
    }
    Ok(AdMap {
        bisection: e.id.clone(),
        matrix,
    })
}

/// Closed-form Ad_E for each model family.
pub fn stored_ad_matrix(model: &GroupoidModel, e: &Bisection) -> AdMap {
    let matrix = match model.kind {
        ModelKind::Pair => vec![vec![e.tau[0].derive(0)]],
        ModelKind::Heisenberg => {
            let (a, b) = (&e.alpha[0], &e.alpha[1]);
            let one = CoeffFn::one(0);
            let zero = CoeffFn::zero(0);
            vec![
                vec![one.clone(), zero.clone(), zero.clone()],
                vec![zero.clone(), one.clone(), zero],
                vec![-b, a.clone(), one],
            ]
        }
        ModelKind::Etale => vec![],
    };
    AdMap {
        bisection: e.id.clone(),
        matrix,
    }
}

/// Ad_E computed by differentiation and checked against the closed form.
pub fn checked_ad_matrix(model: &GroupoidModel, e: &Bisection) -> Result<AdMap> {
    let derived = ad_matrix(model, e)?;
    let stored = stored_ad_matrix(model, e);
    if derived != stored {
        return Err(Error::VerificationFailed {
            what: format!("Ad_{} agrees with the stored matrix", e.id),
            witness: format!("derived {:?}, stored {:?}", derived.matrix, stored.matrix),
        });
    }
    Ok(derived)
}

fn compose_all(fs: &[CoeffFn], args: &[CoeffFn]) -> Result<Vec<CoeffFn>> {
    fs.iter().map(|f| f.compose(args)).collect()
}

/// Ad_E(X) over t(E).
pub fn ad_section(model: &GroupoidModel, e: &Bisection, x: &Section) -> Result<Section> {
    let ad = ad_matrix(model, e)?;
    let ti = e.tau_inv_or_err()?;
    let r = model.frame.len();
    let mut out = vec![CoeffFn::zero(model.base_dim()); r];
    for (i, h) in x.coeffs.iter().enumerate() {
        if h.is_zero() {
            continue;
        }
        for j in 0..r {
            out[j] = &out[j] + &(&ad.matrix[j][i] * h);
        }
    }
    Section::new(&x.parent, compose_all(&out, ti)?)
}

/// Images of the frame under Ad, as degree-one elements over the chart
/// where `coeff_map` sends source functions.
fn transported_frame(
    model: &GroupoidModel,
    matrix: &[Vec<CoeffFn>],
    coeff_map: &dyn Fn(&CoeffFn) -> Result<CoeffFn>,
) -> Result<Vec<UEAElement>> {
    let r = model.frame.len();
    (0..r)
        .map(|i| {
            let mut terms = Vec::new();
            for (j, row) in matrix.iter().enumerate() {
                let mut e = vec![0; r];
                e[j] = 1;
                terms.push((e, coeff_map(&row[i])?));
            }
            Ok(UEAElement::from_terms(&model.lie, terms))
        })
        .collect()
}

fn apply_algebra_map(
    u: &UEAElement,
    images: &[UEAElement],
    coeff_map: &dyn Fn(&CoeffFn) -> Result<CoeffFn>,
) -> Result<UEAElement> {
    let mut out = UEAElement::zero(&u.parent);
    for (a, f) in u.terms() {
        let mut term = UEAElement::from_fn(&u.parent, coeff_map(f)?);
        for (i, &k) in a.iter().enumerate() {
            for _ in 0..k {
                term = term.mul(&images[i])?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// U(Ad_E)(u): transport from s(E) to t(E).
pub fn ad_uea(model: &GroupoidModel, e: &Bisection, u: &UEAElement) -> Result<UEAElement> {
    if u.is_zero() {
        return Ok(u.clone());
    }
    let ti = e.tau_inv_or_err()?.clone();
    let along = move |f: &CoeffFn| f.compose(&ti);
    if u.degree() == 0 {
        return u.try_map_coeffs(&along);
    }
    let ad = ad_matrix(model, e)?;
    let images = transported_frame(model, &ad.matrix, &along)?;
    apply_algebra_map(u, &images, &along)
}

/// U(Ad_E)(u) through the closed-form matrix instead of the derived one.
pub fn ad_uea_stored(model: &GroupoidModel, e: &Bisection, u: &UEAElement) -> Result<UEAElement> {
    let ti = e.tau_inv_or_err()?.clone();
    let along = move |f: &CoeffFn| f.compose(&ti);
    let stored = stored_ad_matrix(model, e);
    let images = transported_frame(model, &stored.matrix, &along)?;
    apply_algebra_map(u, &images, &along)
}

/// U(Ad_{E^{-1}})(u): transport from t(E) back to s(E). Needs no inverse
/// of τ_E; the frame part inverts Ad_E, which must be constant.
pub fn ad_uea_inverse(model: &GroupoidModel, e: &Bisection, u: &UEAElement) -> Result<UEAElement> {
    if u.is_zero() {
        return Ok(u.clone());
    }
    let tau = e.tau.clone();
    let along = move |f: &CoeffFn| f.compose(&tau);
    if u.degree() == 0 {
        return u.try_map_coeffs(&along);
    }
    let ad = ad_matrix(model, e)?;
    let consts: Option<Vec<Vec<Q>>> = ad
        .matrix
        .iter()
        .map(|row| row.iter().map(CoeffFn::as_constant).collect())
        .collect();
    let inv = consts.as_deref().and_then(invert_q).ok_or_else(|| {
        Error::UnsupportedComposition(format!("Ad_{} is not constant, its inverse is not representable", e.id))
    })?;
    let b = model.base_dim();
    let matrix: Vec<Vec<CoeffFn>> = inv
        .into_iter()
        .map(|row| row.into_iter().map(|c| CoeffFn::constant(b, c)).collect())
        .collect();
    let images = transported_frame(model, &matrix, &|f| Ok(f.clone()))?;
    apply_algebra_map(u, &images, &along)
}

/// Ad_e of an enveloping-algebra germ, recorded in source coordinates:
/// `pulled` is the image composed with τ, which determines the germ at the
/// target because τ is a local diffeomorphism.
#[derive(Clone, Debug)]
pub struct AdGerm {
    pub source: Point,
    pub tau: Vec<CoeffFn>,
    pub pulled: UEAElement,
}

impl AdGerm {
    pub fn germ_eq(&self, other: &AdGerm) -> Result<bool> {
        if self.source != other.source {
            return Ok(false);
        }
        for (a, b) in self.tau.iter().zip(&other.tau) {
            if !a.germ_eq(b, &self.source)? {
                return Ok(false);
            }
        }
        self.pulled.sub(&other.pulled)?.is_zero_germ(&self.source)
    }

    /// The germ at the target, when τ^{-1} is representable.
    pub fn at_target(&self, tau_inv: &[CoeffFn]) -> Result<GermUEA> {
        let target: Point = self.tau.iter().map(|f| f.eval(&self.source)).collect::<Result<_>>()?;
        let u = self.pulled.try_map_coeffs(|f| f.compose(tau_inv))?;
        Ok(GermUEA { u, point: target })
    }
}

pub fn ad_germ(model: &GroupoidModel, e: &GermArrow, germ_u: &GermUEA) -> Result<AdGerm> {
    if germ_u.point != e.source {
        return Err(Error::DomainError(format!(
            "germ at {} but the arrow starts at {}",
            fmt_point(&germ_u.point),
            fmt_point(&e.source)
        )));
    }
    let b = &e.bisection;
    let u = &germ_u.u;
    let pulled = if b.tau_inv.is_some() {
        ad_uea(model, b, u)?.try_map_coeffs(|f| f.compose(&b.tau))?
    } else if u.degree() <= 1 {
        let ad = ad_matrix(model, b)?;
        let images = transported_frame(model, &ad.matrix, &|f| Ok(f.clone()))?;
        apply_algebra_map(u, &images, &|f| Ok(f.clone()))?
    } else {
        return Err(Error::UnsupportedComposition(format!(
            "Ad of a degree {} germ along {}",
            u.degree(),
            b.id
        )));
    };
    Ok(AdGerm {
        source: e.source.clone(),
        tau: b.tau.clone(),
        pulled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{Poly, Region};
    use crate::groupoid::Registry;
    use crate::number::{q, qr, rational_point};

    #[test]
    fn pair_conjugation() {
        let reg = Registry::pair_standard();
        let d2 = reg.get("D2").unwrap();
        let h = rational_point(&[q(3), q(5)]);
        assert_eq!(conjugate_arrow(&reg.model, &d2, &h).unwrap(), rational_point(&[q(6), q(10)]));
        assert_eq!(conjugate_arrow(&reg.model, &reg.unit(), &h).unwrap(), h);
    }

    #[test]
    fn heisenberg_conjugation() {
        let reg = Registry::heisenberg_standard();
        let k = reg.get("k1").unwrap();
        let h = rational_point(&[q(2), q(1), q(0)]);
        let kk = k.alpha_at(&[]).unwrap();
        let want = reg.model.mult_at(&reg.model.mult_at(&kk, &h).unwrap(), &reg.model.inv_at(&kk).unwrap()).unwrap();
        assert_eq!(conjugate_arrow(&reg.model, &k, &h).unwrap(), want);
    }

    #[test]
    fn derived_matrices_match_closed_forms() {
        for kind in [ModelKind::Pair, ModelKind::Heisenberg, ModelKind::Etale] {
            let reg = Registry::standard(kind);
            for b in reg.declared() {
                checked_ad_matrix(&reg.model, &b).unwrap();
            }
        }
        let reg = Registry::pair_kinked();
        for b in reg.declared() {
            checked_ad_matrix(&reg.model, &b).unwrap();
        }
    }

    #[test]
    fn pushforward_along_doubling() {
        let reg = Registry::pair_standard();
        let d2 = reg.get("D2").unwrap();
        let t = CoeffFn::var(1, 0);
        let h = &(&t * &t) + &CoeffFn::one(1);
        let x = Section::new(&reg.model.lie, vec![h.clone()]).unwrap();
        let got = ad_section(&reg.model, &d2, &x).unwrap();
        // 2 h(u/2) = 2 (u^2/4 + 1)
        let half = CoeffFn::Poly(Poly::affine(q(0), qr(1, 2)));
        let want = h.compose(&[half]).unwrap().scale(&q(2));
        assert_eq!(got.coeffs, vec![want]);
        assert_eq!(ad_section(&reg.model, &reg.unit(), &x).unwrap(), x);
    }

    #[test]
    fn heisenberg_adjoint() {
        let reg = Registry::heisenberg_standard();
        reg.insert(Bisection::group_element("b3", [q(0), q(3), q(0)])).unwrap();
        let k = reg.get("b3").unwrap();
        let lie = &reg.model.lie;
        let x = UEAElement::generator(lie, 0);
        let z = UEAElement::generator(lie, 2);
        let got = ad_uea(&reg.model, &k, &x).unwrap();
        assert_eq!(got, x.sub(&z.scale(&q(3))).unwrap());
        let back = ad_uea_inverse(&reg.model, &k, &got).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn degree_zero_transport() {
        let reg = Registry::pair_standard();
        let t1 = reg.get("T1").unwrap();
        let t = CoeffFn::var(1, 0);
        let u = UEAElement::from_fn(&reg.model.lie, &t * &t);
        let got = ad_uea(&reg.model, &t1, &u).unwrap();
        let shifted = &t - &CoeffFn::one(1);
        assert_eq!(got, UEAElement::from_fn(&reg.model.lie, &shifted * &shifted));
    }

    #[test]
    fn inverse_transport_matches_inverse_bisection() {
        let reg = Registry::pair_standard();
        let lie = reg.model.lie.clone();
        let t = CoeffFn::var(1, 0);
        let d = UEAElement::generator(&lie, 0);
        let u = d.pow(2).mul_fn(&t).add(&UEAElement::from_fn(&lie, &t * &t)).unwrap();
        for id in ["D2", "A3", "H"] {
            let e = reg.get(id).unwrap();
            let ei = reg.inv(id).unwrap();
            assert_eq!(ad_uea_inverse(&reg.model, &e, &u).unwrap(), ad_uea(&reg.model, &ei, &u).unwrap());
        }
    }

    #[test]
    fn ad_germ_depends_only_on_the_germ() {
        let reg = Registry::pair_kinked();
        let lie = reg.model.lie.clone();
        let x = rational_point(&[q(-1)]);
        let d = UEAElement::generator(&lie, 0).germ(&x).unwrap();
        let e00 = GermArrow::new(reg.get("E00").unwrap(), x.clone()).unwrap();
        let e01 = GermArrow::new(reg.get("E01").unwrap(), x.clone()).unwrap();
        let e10 = GermArrow::new(reg.get("E10").unwrap(), x.clone()).unwrap();
        let a = ad_germ(&reg.model, &e00, &d).unwrap();
        let b = ad_germ(&reg.model, &e01, &d).unwrap();
        let c = ad_germ(&reg.model, &e10, &d).unwrap();
        assert!(a.germ_eq(&b).unwrap());
        assert!(!a.germ_eq(&c).unwrap());
        let unit = GermArrow::unit(&reg, x.clone()).unwrap();
        let id = ad_germ(&reg.model, &unit, &d).unwrap();
        assert_eq!(id.at_target(&[CoeffFn::var(1, 0)]).unwrap().u, d.u);
    }

    #[test]
    fn domain_errors() {
        let reg = Registry::new(GroupoidModel::pair());
        let dom = Region::interval(Some(q(0)), Some(q(1)));
        reg.insert(Bisection::pair_affine("A", q(1), qr(1, 4), dom).unwrap()).unwrap();
        let a = reg.get("A").unwrap();
        let h = rational_point(&[q(5), qr(1, 2)]);
        assert!(matches!(conjugate_arrow(&reg.model, &a, &h), Err(Error::DomainError(_))));
    }
}
