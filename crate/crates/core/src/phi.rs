//! The representation Φ of the convolution bialgebra on t-transversal
//! distributions, its kernel, and the worked scenarios.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::adjoint::{ad_uea_inverse, ad_uea_stored};
use crate::coeffs::{text, CoeffFn, Interval, Poly};
use crate::conv::{random_element, ConvElement};
use crate::dist::{dist_eq, test_bank, TransvDist};
use crate::error::{Error, Result};
use crate::groupoid::{fmt_point, Bisection, GermArrow, Registry, UNIT_ID};
use crate::number::{q, ExpNum, Point, Q};
use crate::random::{random_coeff, random_uea, rng, small_rational};
use crate::report::{Check, Report};
use crate::uea::UEAElement;

/// Φ⟨u, E⟩ = ⟦E, Ad_{E^{-1}}(u)⟧.
pub fn phi(a: &ConvElement) -> Result<TransvDist> {
    let model = &a.reg.model;
    let mut out = TransvDist::zero(&a.reg);
    for (id, u) in a.terms() {
        let e = a.reg.get(id)?;
        out = out.add(&TransvDist::term(&a.reg, id, ad_uea_inverse(model, &e, u)?)?)?;
    }
    Ok(out)
}

/// A piece of the base on which the germ structure is constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StratumShape {
    Open(Interval),
    Point(Q),
    Whole,
}

impl fmt::Display for StratumShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StratumShape::Open(i) => write!(f, "{i}"),
            StratumShape::Point(c) => write!(f, "{{{c}}}"),
            StratumShape::Whole => write!(f, "pt"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Stratum {
    pub shape: StratumShape,
    pub sample: Point,
    /// Germ classes of the active bisections at the sample point.
    pub classes: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct Stratification {
    pub strata: Vec<Stratum>,
}

impl fmt::Display for Stratification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shapes: Vec<String> = self.strata.iter().map(|s| s.shape.to_string()).collect();
        let width = shapes.iter().map(|s| s.chars().count()).max().unwrap_or(0);
        for (s, shape) in self.strata.iter().zip(&shapes) {
            let classes: Vec<String> = s.classes.iter().map(|c| format!("{{{}}}", c.join(", "))).collect();
            let pad = width - shape.chars().count();
            writeln!(f, "  {shape}{}  {}", " ".repeat(pad), classes.join(" "))?;
        }
        Ok(())
    }
}

/// Points where two sections of the source map may start or stop
/// agreeing.
fn coincidence_points(a: &Bisection, b: &Bisection) -> Result<Vec<Q>> {
    let mut out = Vec::new();
    for (fa, fb) in a.alpha.iter().zip(&b.alpha) {
        let d = fa - fb;
        match &d {
            CoeffFn::Poly(p) => match p.degree() {
                0 => {}
                1 => out.push(-p.coeff(&[0]) / p.coeff(&[1])),
                _ => {
                    return Err(Error::UnsupportedRegistry(format!(
                        "{} and {} differ by a map of degree {}",
                        a.id,
                        b.id,
                        p.degree()
                    )))
                }
            },
            CoeffFn::Flat(f) if f.poly.is_zero() => {}
            CoeffFn::Flat(_) => {
                return Err(Error::UnsupportedRegistry(format!(
                    "{} and {} differ by a flat map with a polynomial part",
                    a.id, b.id
                )))
            }
        }
    }
    Ok(out)
}

/// Germ classes among `bisections` at the source point `x`.
fn classes_at(bisections: &[Arc<Bisection>], x: &Point) -> Result<Vec<Vec<Arc<Bisection>>>> {
    let mut classes: Vec<Vec<Arc<Bisection>>> = Vec::new();
    for b in bisections {
        if !b.domain.contains(x) {
            continue;
        }
        let g = GermArrow::new(b.clone(), x.clone())?;
        let mut placed = false;
        for c in classes.iter_mut() {
            if GermArrow::new(c[0].clone(), x.clone())?.germ_eq(&g)? {
                c.push(b.clone());
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![b.clone()]);
        }
    }
    Ok(classes)
}

/// Cut the base into open cells and points on which the germ classes of
/// the given bisections are constant.
pub fn stratify(bisections: &[Arc<Bisection>]) -> Result<Stratification> {
    let dim = bisections.first().map(|b| b.dim()).unwrap_or(1);
    let mk = |shape: StratumShape, sample: Point| -> Result<Stratum> {
        let classes = classes_at(bisections, &sample)?
            .into_iter()
            .map(|c| c.iter().map(|b| b.id.clone()).collect())
            .collect();
        Ok(Stratum { shape, sample, classes })
    };
    if dim == 0 {
        return Ok(Stratification {
            strata: vec![mk(StratumShape::Whole, Vec::new())?],
        });
    }
    if dim != 1 {
        return Err(Error::UnsupportedRegistry(format!("base of dimension {dim}")));
    }
    let mut cuts: Vec<Q> = Vec::new();
    for b in bisections {
        cuts.extend(b.domain.endpoints());
        if b.alpha.iter().any(|f| matches!(f, CoeffFn::Flat(_))) {
            cuts.push(Q::zero());
        }
    }
    for (i, a) in bisections.iter().enumerate() {
        for b in &bisections[i + 1..] {
            cuts.extend(coincidence_points(a, b)?);
        }
    }
    cuts.sort();
    cuts.dedup();
    let pt = |c: &Q| vec![ExpNum::rational(c.clone())];
    let mut strata = Vec::new();
    let mut lo: Option<Q> = None;
    for c in &cuts {
        let cell = Interval::new(lo.clone(), Some(c.clone()));
        strata.push(mk(StratumShape::Open(cell.clone()), pt(&cell.sample()))?);
        strata.push(mk(StratumShape::Point(c.clone()), pt(c))?);
        lo = Some(c.clone());
    }
    let cell = Interval::new(lo, None);
    strata.push(mk(StratumShape::Open(cell.clone()), pt(&cell.sample()))?);
    Ok(Stratification { strata })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelWitness {
    pub stratum: String,
    pub arrow: String,
    pub germ_class: Vec<String>,
    pub sum: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelResult {
    pub in_kernel: bool,
    pub witness: Option<KernelWitness>,
}

/// Does `Σ_{θ(e) = g} e^{-1}·a(e)` vanish for every arrow `g`?
///
/// On each stratum the arrows through the sample source point are grouped,
/// and the transported coefficients of all terms through one arrow are
/// summed as germs at the source.
pub fn kernel_test(a: &ConvElement) -> Result<KernelResult> {
    let model = &a.reg.model;
    let terms: Vec<(Arc<Bisection>, &UEAElement)> = a
        .terms()
        .map(|(id, u)| Ok((a.reg.get(id)?, u)))
        .collect::<Result<_>>()?;
    let bis: Vec<Arc<Bisection>> = terms.iter().map(|(b, _)| b.clone()).collect();
    let strat = stratify(&bis)?;
    for s in &strat.strata {
        let x = &s.sample;
        let mut fibres: Vec<(Point, Vec<String>, UEAElement)> = Vec::new();
        for (b, u) in &terms {
            if !b.domain.contains(x) {
                continue;
            }
            let g = b.alpha_at(x)?;
            let moved = ad_uea_inverse(model, b, u)?;
            match fibres.iter_mut().find(|(h, _, _)| *h == g) {
                Some(slot) => {
                    slot.1.push(b.id.clone());
                    slot.2 = slot.2.add(&moved)?;
                }
                None => fibres.push((g, vec![b.id.clone()], moved)),
            }
        }
        for (g, ids, sum) in fibres {
            if !sum.is_zero_germ(x)? {
                return Ok(KernelResult {
                    in_kernel: false,
                    witness: Some(KernelWitness {
                        stratum: s.shape.to_string(),
                        arrow: fmt_point(&g),
                        germ_class: ids,
                        sum: sum.to_text(),
                    }),
                });
            }
        }
    }
    Ok(KernelResult {
        in_kernel: true,
        witness: None,
    })
}

/// Is `a` zero as a section, germ by germ over its own bisections?
pub fn section_is_zero(a: &ConvElement) -> Result<bool> {
    let bis = a.bisections()?;
    let strat = stratify(&bis)?;
    for s in &strat.strata {
        for b in &bis {
            if !b.domain.contains(&s.sample) {
                continue;
            }
            let e = GermArrow::new(b.clone(), s.sample.clone())?;
            let val = a.eval_germ(&e)?;
            // the value is a germ at the target, pulled back along the germ
            let pulled = val.u.try_map_coeffs(|f| f.compose(&b.tau))?;
            if !pulled.is_zero_germ(&s.sample)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of a named scenario.
#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub pass: bool,
    pub witness: Option<String>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
}

impl ScenarioReport {
    fn from_report(name: &str, rep: Report) -> Self {
        ScenarioReport {
            scenario: name.to_string(),
            pass: rep.pass(),
            witness: rep.first_failure().map(|c| format!("{}: {}", c.name, c.witness.clone().unwrap_or_default())),
            checks: rep.checks,
            table: None,
            summary: None,
        }
    }
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rep = Report {
            title: format!("scenario {}", self.scenario),
            checks: self.checks.clone(),
        };
        write!(f, "{rep}")?;
        if let Some(s) = &self.summary {
            writeln!(f, "{s}")?;
        }
        if let Some(t) = &self.table {
            writeln!(f, "stratification")?;
            write!(f, "{t}")?;
        }
        writeln!(f, "{}", if self.pass { "pass" } else { "FAIL" })
    }
}

fn check_of(name: &str, r: Result<Option<String>>) -> Check {
    Check::from_result(name, r)
}

fn group_element_id(k: &[Q; 3]) -> String {
    format!("k({},{},{})", k[0], k[1], k[2])
}

/// Register a group element under a name derived from its coordinates.
pub fn group_element(reg: &Registry, k: [Q; 3]) -> Result<Arc<Bisection>> {
    reg.insert(Bisection::group_element(&group_element_id(&k), k))
}

/// `⟨u', k'⟩·⟨u, k⟩ = ⟨u'·Ad_{k'}(u), k'k⟩` with Ad from the closed form.
fn twisted_product_oracle(reg: &Arc<Registry>, up: &UEAElement, kp: &str, u: &UEAElement, k: &str) -> Result<ConvElement> {
    let ep = reg.get(kp)?;
    let moved = ad_uea_stored(&reg.model, &ep, u)?;
    let prod = reg.mul(kp, k)?;
    ConvElement::term(reg, up.mul(&moved)?, &prod.id)
}

/// Heisenberg group: Φ is injective on finite sums over group elements and
/// intertwines the twisted product.
pub fn scenario_cartier_gabriel(seed: u64) -> ScenarioReport {
    let reg = Arc::new(Registry::heisenberg_standard());
    let lie = reg.model.lie.clone();
    let bank = test_bank(&reg.model, seed);
    let mut r = rng(seed);
    let mut rep = Report::new("cartier-gabriel");
    let trials = 20;

    let injective = (|| -> Result<Option<String>> {
        for trial in 0..trials {
            use rand::Rng;
            let n = r.gen_range(1..=5);
            let mut a = ConvElement::zero(&reg);
            for _ in 0..n {
                let k = [small_rational(&mut r), small_rational(&mut r), small_rational(&mut r)];
                let b = group_element(&reg, k)?;
                a = a.add(&ConvElement::term(&reg, random_uea(&mut r, &lie, 2, 2), &b.id)?)?;
            }
            if a.is_zero() {
                continue;
            }
            let kt = kernel_test(&a)?;
            if kt.in_kernel {
                return Ok(Some(format!("trial {trial}: nonzero {a} passes the kernel test")));
            }
            let image = phi(&a)?;
            let mut separated = false;
            for f in &bank {
                if !image.eval(f)?.is_zero()? {
                    separated = true;
                    break;
                }
            }
            if !separated {
                return Ok(Some(format!("trial {trial}: Φ({a}) vanishes on the test bank")));
            }
        }
        Ok(None)
    })();
    rep.push(check_of("Φ injective on sums over group elements", injective).with_detail(format!("{trials} inputs")));

    let twisted = (|| -> Result<Option<String>> {
        let ids: Vec<String> = reg.declared().iter().map(|b| b.id.clone()).collect();
        for trial in 0..trials {
            use rand::Rng;
            let kp = &ids[r.gen_range(0..ids.len())];
            let k = &ids[r.gen_range(0..ids.len())];
            let up = random_uea(&mut r, &lie, 2, 2);
            let u = random_uea(&mut r, &lie, 2, 2);
            let a_p = ConvElement::term(&reg, up.clone(), kp)?;
            let a = ConvElement::term(&reg, u.clone(), k)?;
            let prod = a_p.mul(&a)?;
            if prod != twisted_product_oracle(&reg, &up, kp, &u, k)? {
                return Ok(Some(format!("trial {trial}: product differs from the twisted product")));
            }
            let delta = phi(&ConvElement::term(&reg, UEAElement::one(&lie), kp)?)?;
            let lhs = delta.mul(&phi(&a)?)?;
            let rhs = phi(&ConvElement::term(&reg, UEAElement::one(&lie), kp)?.mul(&a)?)?;
            if !dist_eq(&lhs, &rhs, &bank)? {
                return Ok(Some(format!("trial {trial}: δ_{kp} ∗ Φ⟨u, {k}⟩ differs from Φ of the product")));
            }
            if phi(&prod)? != phi(&a_p)?.mul(&phi(&a)?)? {
                return Ok(Some(format!("trial {trial}: Φ is not multiplicative on {a_p} and {a}")));
            }
        }
        Ok(None)
    })();
    rep.push(check_of("twisted product law", twisted).with_detail(format!("{trials} pairs")));

    let decomposition = (|| -> Result<Option<String>> {
        let ids: Vec<String> = reg.declared().iter().map(|b| b.id.clone()).collect();
        for id in &ids {
            let u = random_uea(&mut r, &lie, 2, 3);
            let a = ConvElement::term(&reg, u.clone(), id)?;
            let left = ConvElement::term(&reg, u.clone(), UNIT_ID)?.mul(&ConvElement::term(&reg, UEAElement::one(&lie), id)?)?;
            if left != a {
                return Ok(Some(format!("⟨u,1⟩·⟨1,{id}⟩ ≠ ⟨u,{id}⟩")));
            }
            let right = ConvElement::term(&reg, UEAElement::one(&lie), id)?.mul(&ConvElement::term(&reg, u.clone(), UNIT_ID)?)?;
            let twisted = ConvElement::term(&reg, ad_uea_stored(&reg.model, &*reg.get(id)?, &u)?, id)?;
            if right != twisted {
                return Ok(Some(format!("⟨1,{id}⟩·⟨u,1⟩ ≠ ⟨Ad(u),{id}⟩")));
            }
        }
        Ok(None)
    })();
    rep.push(check_of("grouplike × primitive decomposition", decomposition));

    let abelian = (|| -> Result<Option<String>> {
        let z = UEAElement::generator(&lie, 2);
        let x = UEAElement::generator(&lie, 0);
        let a = ConvElement::term(&reg, x.clone(), "kZ")?;
        let b = ConvElement::term(&reg, z, "kZ")?;
        let (p1, p2) = (a.mul(&b)?, b.mul(&a)?);
        Ok((p1 != p2).then(|| "central elements do not commute".to_string()))
    })();
    rep.push(check_of("central subgroup acts without twist", abelian));

    ScenarioReport::from_report("cartier-gabriel", rep)
}

/// Affine action groupoid: Φ is a bijection between the étale span and
/// the degree-0 distributions over the registry.
pub fn scenario_etale_iso(seed: u64) -> ScenarioReport {
    let reg = Arc::new(Registry::etale_standard());
    let bank = test_bank(&reg.model, seed);
    let mut r = rng(seed);
    let mut rep = Report::new("etale-iso");
    let ids: Vec<String> = reg.declared().iter().map(|b| b.id.clone()).collect();

    let injective = (|| -> Result<Option<String>> {
        for trial in 0..20 {
            let a = random_element(&reg, &mut r, &ids, 3, 0);
            if section_is_zero(&a)? {
                continue;
            }
            if kernel_test(&a)?.in_kernel {
                return Ok(Some(format!("trial {trial}: {a} is in the kernel")));
            }
            let image = phi(&a)?;
            let mut separated = false;
            for f in &bank {
                if !image.eval(f)?.is_zero()? {
                    separated = true;
                    break;
                }
            }
            if !separated {
                return Ok(Some(format!("trial {trial}: Φ({a}) vanishes on the test bank")));
            }
        }
        Ok(None)
    })();
    rep.push(check_of("Φ injective on the registry span", injective));

    let surjective = (|| -> Result<Option<String>> {
        for id in &ids {
            let b = reg.get(id)?;
            let f = random_coeff(&mut r, 1, 3);
            let target = TransvDist::term(&reg, id, UEAElement::from_fn(&reg.model.lie, f.clone()))?;
            let pre = ConvElement::function(&reg, f.compose(b.tau_inv_or_err()?)?, id)?;
            if phi(&pre)? != target {
                return Ok(Some(format!("⟨f∘τ^-1, {id}⟩ is not a preimage of [[{id}, f]]")));
            }
        }
        Ok(None)
    })();
    rep.push(check_of("degree-0 distributions have preimages", surjective).with_detail(format!("{} bisections", ids.len())));

    let hom = (|| -> Result<Option<String>> {
        for trial in 0..20 {
            let a = random_element(&reg, &mut r, &ids, 2, 0);
            let b = random_element(&reg, &mut r, &ids, 2, 0);
            if phi(&a.mul(&b)?)? != phi(&a)?.mul(&phi(&b)?)? {
                return Ok(Some(format!("trial {trial}: Φ({a} · {b})")));
            }
        }
        Ok(None)
    })();
    rep.push(check_of("Φ multiplicative", hom));

    let duplicate = (|| -> Result<Option<String>> {
        let local = Registry::etale_standard();
        let dup = Bisection::etale_sheet("T'", q(1), q(1), crate::coeffs::Region::interval(Some(q(-5)), Some(q(5))))?;
        local.insert(dup)?;
        let local = Arc::new(local);
        let one = CoeffFn::one(1);
        let a = ConvElement::function(&local, one.clone(), "T")?.sub(&ConvElement::function(&local, one, "T'")?)?;
        // nonzero outside (-5, 5), so not in the kernel
        Ok(kernel_test(&a)?.in_kernel.then(|| "germ duplicate hides a nonzero element".to_string()))
    })();
    rep.push(check_of("germ-duplicate bisection keeps injectivity", duplicate));

    ScenarioReport::from_report("etale-iso", rep)
}

/// The kinked graphs `E_ij` of the pair groupoid and the element
/// `a = Σ (-1)^{i+j} ⟨f, E_ij⟩`.
pub struct KernelExample {
    pub reg: Arc<Registry>,
    pub f: CoeffFn,
    pub a: ConvElement,
}

impl KernelExample {
    pub fn new() -> Self {
        KernelExample::with_coeff(CoeffFn::Poly(Poly::affine(q(1), q(1))))
    }

    pub fn with_coeff(f: CoeffFn) -> Self {
        let reg = Arc::new(Registry::pair_kinked());
        let mut a = ConvElement::zero(&reg);
        for i in 0..2 {
            for j in 0..2 {
                let sign = if (i + j) % 2 == 0 { q(1) } else { q(-1) };
                let term = ConvElement::function(&reg, f.scale(&sign), &format!("E{i}{j}")).unwrap();
                a = a.add(&term).unwrap();
            }
        }
        KernelExample { reg, f, a }
    }

    /// Float sample points for the numeric check.
    pub fn float_points() -> Vec<f64> {
        (0..20).map(|k| -1.9 + 0.2 * k as f64).collect()
    }
}

impl Default for KernelExample {
    fn default() -> Self {
        KernelExample::new()
    }
}

pub fn scenario_kernel_example(seed: u64) -> ScenarioReport {
    let ex = KernelExample::new();
    let bank = test_bank(&ex.reg.model, seed);
    let mut rep = Report::new("kernel-example");

    let nonzero = (|| -> Result<Option<String>> {
        if ex.a.is_zero() {
            return Ok(Some("a has no terms".into()));
        }
        let origin = vec![ExpNum::zero()];
        let e = GermArrow::new(ex.reg.get("E00")?, origin)?;
        let v = ex.a.eval_germ(&e)?;
        Ok(v.is_zero()?.then(|| "a vanishes at the germ of E00 at the origin".to_string()))
    })();
    rep.push(check_of("a ≠ 0", nonzero));

    let kernel = kernel_test(&ex.a);
    rep.push(check_of(
        "kernel test",
        kernel.map(|k| k.witness.map(|w| format!("{} at {} over {}: {}", w.stratum, w.arrow, w.germ_class.join(","), w.sum))),
    ));

    let image = phi(&ex.a);
    let exact = (|| -> Result<Option<String>> {
        let image = image.clone()?;
        for (k, f) in bank.iter().enumerate() {
            if let Some(w) = image.eval(f)?.zero_witness()? {
                return Ok(Some(format!("test function {k}: {w}")));
            }
        }
        Ok(None)
    })();
    rep.push(check_of("Φ(a) vanishes on the test bank, exactly", exact).with_detail(format!("{} functions", bank.len())));

    let numeric = (|| -> Result<Option<String>> {
        let image = image.clone()?;
        let mut worst = 0.0f64;
        for f in &bank {
            let v = image.eval(f)?;
            for x in KernelExample::float_points() {
                worst = worst.max(v.eval_f64(&[x]).abs());
            }
        }
        Ok((worst >= 1e-9).then(|| format!("max |Φ(a)(F)(x)| = {worst:e}")))
    })();
    rep.push(check_of("Φ(a) vanishes numerically", numeric).with_detail("20 points, tolerance 1e-9"));

    let bis: Vec<Arc<Bisection>> = ex.reg.declared().into_iter().filter(|b| b.id != UNIT_ID).collect();
    let table = stratify(&bis).map(|s| s.to_string()).ok();
    let mut out = ScenarioReport::from_report("kernel-example", rep);
    out.table = table;
    out.summary = Some(format!(
        "a = {}\nf = {}\na ≠ 0, Φ(a) = 0",
        ex.a,
        text::format_coeff(&ex.f, &["t".to_string()])
    ));
    out
}

pub const SCENARIOS: [&str; 3] = ["cartier-gabriel", "etale-iso", "kernel-example"];

pub fn run_scenario(name: &str, seed: u64) -> Result<ScenarioReport> {
    match name {
        "cartier-gabriel" => Ok(scenario_cartier_gabriel(seed)),
        "etale-iso" => Ok(scenario_etale_iso(seed)),
        "kernel-example" => Ok(scenario_kernel_example(seed)),
        _ => Err(Error::Model(format!("unknown scenario `{name}`"))),
    }

}
#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rational_point;

    #[test]
    fn phi_of_functions() {
        let reg = Arc::new(Registry::pair_standard());
        let t = CoeffFn::var(1, 0);
        let a = ConvElement::function(&reg, &t * &t, "D2").unwrap();
        let b = reg.get("D2").unwrap();
        let want = TransvDist::term(&reg, "D2", UEAElement::from_fn(&reg.model.lie, (&t * &t).compose(&b.tau).unwrap())).unwrap();
        assert_eq!(phi(&a).unwrap(), want);
        let d = UEAElement::generator(&reg.model.lie, 0);
        let m = ConvElement::term(&reg, d.clone(), UNIT_ID).unwrap();
        assert_eq!(phi(&m).unwrap(), TransvDist::term(&reg, UNIT_ID, d).unwrap());
        assert!(phi(&ConvElement::zero(&reg)).unwrap().is_zero());
    }

    #[test]
    fn kinked_stratification() {
        let reg = Registry::pair_kinked();
        let bis: Vec<_> = reg.declared().into_iter().filter(|b| b.id != UNIT_ID).collect();
        let s = stratify(&bis).unwrap();
        let shapes: Vec<String> = s.strata.iter().map(|s| s.shape.to_string()).collect();
        assert_eq!(shapes.len(), 3);
        let classes: Vec<Vec<Vec<String>>> = s.strata.iter().map(|s| s.classes.clone()).collect();
        let v = |x: &[&[&str]]| x.iter().map(|c| c.iter().map(|s| s.to_string()).collect()).collect::<Vec<Vec<String>>>();
        assert_eq!(classes[0], v(&[&["E00", "E01"], &["E10", "E11"]]));
        assert_eq!(classes[1], v(&[&["E00"], &["E01"], &["E10"], &["E11"]]));
        assert_eq!(classes[2], v(&[&["E00", "E10"], &["E01", "E11"]]));

        let one = vec![reg.get("E01").unwrap()];
        let s = stratify(&one).unwrap();
        assert!(s.strata.iter().all(|s| s.classes.len() == 1));
    }

    #[test]
    fn identical_affine_maps_merge() {
        let reg = Registry::new(crate::groupoid::GroupoidModel::pair());
        let whole = crate::coeffs::Region::whole(1);
        let a = reg.insert(Bisection::pair_affine("A", q(2), q(1), whole.clone()).unwrap()).unwrap();
        let b = reg.insert(Bisection::pair_affine("B", q(2), q(1), whole).unwrap()).unwrap();
        let s = stratify(&[a, b]).unwrap();
        assert_eq!(s.strata.len(), 1);
        assert_eq!(s.strata[0].classes, vec![vec!["A".to_string(), "B".to_string()]]);
    }

    #[test]
    fn kernel_example_is_in_the_kernel() {
        let ex = KernelExample::new();
        let k = kernel_test(&ex.a).unwrap();
        assert!(k.in_kernel, "{:?}", k.witness);
        assert!(!ex.a.is_zero());
        assert!(!section_is_zero(&ex.a).unwrap());
    }

    #[test]
    fn unit_terms_are_not_in_the_kernel() {
        let reg = Arc::new(Registry::pair_standard());
        let d = UEAElement::generator(&reg.model.lie, 0);
        let a = ConvElement::term(&reg, d, UNIT_ID).unwrap();
        let k = kernel_test(&a).unwrap();
        assert!(!k.in_kernel);
        assert!(k.witness.is_some());
        assert!(kernel_test(&ConvElement::zero(&reg)).unwrap().in_kernel);
    }

    #[test]
    fn cancelling_germs_are_in_the_kernel() {
        let reg = Arc::new(Registry::pair_kinked());
        let one = CoeffFn::one(1);
        // E00 and E01 agree on t < 0 only
        let a = ConvElement::function(&reg, one.clone(), "E00").unwrap().sub(&ConvElement::function(&reg, one, "E01").unwrap()).unwrap();
        let k = kernel_test(&a).unwrap();
        assert!(!k.in_kernel);
        let w = k.witness.unwrap();
        assert_eq!(w.stratum, "(0, inf)");
        let _ = rational_point(&[q(0)]);
    }

    #[test]
    fn scenarios_pass() {
        for name in SCENARIOS {
            let rep = run_scenario(name, 0xC0FFEE).unwrap();
            assert!(rep.pass, "{rep}");
        }
        assert!(run_scenario("nope", 0).is_err());
    }
}
