//! Named property suites run by `gconv check`.

use std::sync::Arc;

use rand::Rng;

use crate::adjoint::{ad_uea, checked_ad_matrix};
use crate::coeffs::{text::format_coeff, CoeffFn, FlatFn, Poly};
use crate::conv::{random_element, ConvElement, LocalFunction};
use crate::dist::{adbar, dist_mul_defcheck_value, test_bank, TransvDist};
use crate::error::{Error, Result};
use crate::groupoid::{GroupoidModel, ModelKind, Registry, UNIT_ID};
use crate::lie_rinehart::{check_axioms, LieRinehart, Section};
use crate::model::ModelSpec;
use crate::number::{q, Q};
use crate::parse::parse_conv;
use crate::phi::{kernel_test, phi, run_scenario, KernelExample, SCENARIOS};
use crate::random::{random_coeff, random_poly, random_uea, rng, TestRng};
use crate::report::{Check, Report};
use crate::uea::{TensorElement, UEAElement};

pub const SUITES: [&str; 10] = [
    "coeffs",
    "lie-rinehart",
    "uea",
    "groupoid",
    "adjoint",
    "conv",
    "hopf-etale",
    "dist",
    "phi-homomorphism",
    "phi-kernel",
];

/// What the suites run on: the desk models, or one loaded model file.
#[derive(Clone, Debug, Default)]
pub struct Target {
    pub spec: Option<ModelSpec>,
}

impl Target {
    /// Fresh registries for the model-dependent suites.
    fn registries(&self) -> Result<Vec<Arc<Registry>>> {
        match &self.spec {
            None => Ok([ModelKind::Pair, ModelKind::Heisenberg, ModelKind::Etale]
                .into_iter()
                .map(|k| Arc::new(Registry::standard(k)))
                .collect()),
            Some(spec) => match spec.registry()? {
                Some(r) => Ok(vec![r]),
                None => Err(Error::Model("this suite needs a groupoid model".into())),
            },
        }
    }

    fn algebroids(&self) -> Vec<Arc<LieRinehart>> {
        match self.spec.as_ref().and_then(|s| s.algebroid.clone()) {
            Some(a) => vec![a],
            None => match self.spec.as_ref().and_then(|s| s.kind) {
                Some(k) => vec![GroupoidModel::of_kind(k).lie],
                None => vec![
                    Arc::new(LieRinehart::heisenberg()),
                    Arc::new(LieRinehart::tangent_line()),
                    Arc::new(LieRinehart::zero_over_line()),
                ],
            },
        }
    }
}

impl Target {
    /// The suites that make sense for this target, in canonical order.
    pub fn applicable_suites(&self) -> Vec<&'static str> {
        let Some(spec) = &self.spec else { return SUITES.to_vec() };
        match spec.kind {
            None => vec!["coeffs", "lie-rinehart", "uea"],
            Some(kind) => SUITES.iter().copied().filter(|s| *s != "hopf-etale" || kind == ModelKind::Etale).collect(),
        }
    }
}

pub fn is_known(name: &str) -> bool {
    SUITES.contains(&name) || SCENARIOS.contains(&name)
}

pub fn run_suite(name: &str, target: &Target, seed: u64) -> Result<Report> {
    match name {
        "coeffs" => Ok(suite_coeffs(seed)),
        "lie-rinehart" => Ok(suite_lie_rinehart(target, seed)),
        "uea" => Ok(suite_uea(target, seed)),
        "groupoid" => suite_groupoid(target),
        "adjoint" => suite_adjoint(target, seed),
        "conv" => suite_conv(target, seed),
        "hopf-etale" => suite_hopf_etale(target, seed),
        "dist" => suite_dist(target, seed),
        "phi-homomorphism" => suite_phi_homomorphism(target, seed),
        "phi-kernel" => suite_phi_kernel(target, seed),
        s if SCENARIOS.contains(&s) => {
            let rep = run_scenario(s, seed)?;
            Ok(Report {
                title: format!("scenario {s}"),
                checks: rep.checks,
            })
        }
        _ => Err(Error::Model(format!("unknown suite `{name}`"))),
    }
}

fn ids(reg: &Registry) -> Vec<String> {
    reg.declared().iter().map(|b| b.id.clone()).collect()
}

/// Central difference against the symbolic derivative.
pub fn finite_difference_gap(f: &CoeffFn, axis: usize, x: &[f64]) -> (f64, f64) {
    let exact = f.derive(axis).eval_f64(x);
    let h = 1e-5 * x[axis].abs().max(1.0);
    let (mut lo, mut hi) = (x.to_vec(), x.to_vec());
    lo[axis] -= h;
    hi[axis] += h;
    let fd = (f.eval_f64(&hi) - f.eval_f64(&lo)) / (2.0 * h);
    (exact, fd)
}

/// Relative gap with unit floor.
pub fn relative_gap(exact: f64, fd: f64) -> f64 {
    (exact - fd).abs() / exact.abs().max(1.0)
}

pub fn flat_family() -> Vec<CoeffFn> {
    let t = Poly::var(1, 0);
    let phi = FlatFn::phi();
    vec![
        CoeffFn::flat(phi.clone()),
        CoeffFn::flat(FlatFn::kinked_diffeo(0, 1)),
        CoeffFn::flat(FlatFn::kinked_diffeo(1, 0)),
        CoeffFn::flat(phi.scale_arg(&q(2)).derive()),
        CoeffFn::flat(phi.mul_poly(&(&(&t * &t) + &Poly::one(1)))),
    ]
}

fn sample_away(r: &mut TestRng) -> f64 {
    let x = r.gen_range(0.25..2.0);
    if r.gen_bool(0.5) {
        -x
    } else {
        x
    }
}

/// Central differences on polynomial and flat coefficient functions, at 20
/// points per family, 19 away from 0 and one at 0.
pub fn suite_coeffs(seed: u64) -> Report {
    let mut rep = Report::new("coefficient functions");
    let mut r = rng(seed);
    let tol = 1e-6;
    let polys: Vec<CoeffFn> = (0..5)
        .map(|k| CoeffFn::Poly(random_poly(&mut r, 1 + k % 2, 4, 5)))
        .collect();
    for (family, fs) in [("poly", polys), ("flat", flat_family())] {
        let mut worst = 0.0f64;
        let mut witness = None;
        for f in &fs {
            let n = f.nvars();
            let mut points: Vec<Vec<f64>> = (0..19).map(|_| (0..n).map(|_| sample_away(&mut r)).collect()).collect();
            points.push(vec![0.0; n]);
            for x in &points {
                for axis in 0..n {
                    let (exact, fd) = finite_difference_gap(f, axis, x);
                    let gap = relative_gap(exact, fd);
                    worst = worst.max(gap);
                    if gap > tol && witness.is_none() {
                        let vars: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
                        witness = Some(format!(
                            "d/dx{axis} of {} at {x:?}: symbolic {exact}, central difference {fd}",
                            format_coeff(f, &vars)
                        ));
                    }
                }
            }
        }
        rep.push(
            Check::from_witness(format!("derivative matches central differences ({family})"), witness)
                .with_detail(format!("{} functions x 20 points, max rel gap {worst:.1e}", fs.len())),
        );
    }
    let germ = (|| -> Result<Option<String>> {
        let fs = flat_family();
        for x in [q(-1), q(0), q(1)] {
            let p = vec![crate::number::ExpNum::rational(x.clone())];
            for a in &fs {
                for b in &fs {
                    if a.germ_eq(b, &p)? != b.germ_eq(a, &p)? {
                        return Ok(Some(format!("germ equality is not symmetric at {x}")));
                    }
                    for c in &fs {
                        if a.germ_eq(b, &p)? && b.germ_eq(c, &p)? && !a.germ_eq(c, &p)? {
                            return Ok(Some(format!("germ equality is not transitive at {x}")));
                        }
                    }
                }
                if !a.germ_eq(a, &p)? {
                    return Ok(Some(format!("germ equality is not reflexive at {x}")));
                }
            }
        }
        Ok(None)
    })();
    rep.push(Check::from_result("germ equality is an equivalence", germ));
    rep
}

fn random_section(r: &mut TestRng, a: &Arc<LieRinehart>) -> Section {
    let coeffs = (0..a.rank()).map(|_| random_coeff(r, a.dim(), 2)).collect();
    Section::new(a, coeffs).expect("coefficients on the chart")
}

pub fn suite_lie_rinehart(target: &Target, seed: u64) -> Report {
    let mut rep = Report::new("Lie-Rinehart algebras");
    let mut r = rng(seed);
    for a in target.algebroids() {
        let samples: Vec<_> = (0..5)
            .map(|_| (random_section(&mut r, &a), random_section(&mut r, &a), random_section(&mut r, &a)))
            .collect();
        let sub = check_axioms(&a, &samples, seed);
        for c in sub.checks {
            rep.push(Check { name: format!("{}: {}", a.name, c.name), ..c });
        }
    }
    if target.spec.is_none() {
        let mut h = LieRinehart::heisenberg();
        h.bracket[1][0] = vec![CoeffFn::zero(0), CoeffFn::zero(0), CoeffFn::one(0)];
        let sub = check_axioms(&Arc::new(h), &[], seed);
        let caught = sub.first_failure().and_then(|c| c.witness.clone());
        rep.push(match caught {
            Some(w) => Check::pass("corrupted table is rejected").with_detail(w),
            None => Check::fail("corrupted table is rejected", "[Y,X] = Z passed"),
        });
    }
    rep
}

/// Exact identities in the enveloping algebra.
pub fn suite_uea(target: &Target, seed: u64) -> Report {
    let mut rep = Report::new("enveloping algebras");
    let mut r = rng(seed);
    for a in target.algebroids() {
        let name = a.name.clone();
        let rand_u = |r: &mut TestRng| random_uea(r, &a, 2, 2);
        let assoc = (|| -> Result<Option<String>> {
            for _ in 0..100 {
                let (x, y, z) = (rand_u(&mut r), rand_u(&mut r), rand_u(&mut r));
                let lhs = x.mul(&y)?.mul(&z)?;
                let rhs = x.mul(&y.mul(&z)?)?;
                if lhs != rhs {
                    return Ok(Some(format!("({x})({y})({z})")));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{name}: associativity"), assoc).with_detail("100 triples"));

        let samples: Vec<UEAElement> = (0..30).map(|_| random_uea(&mut r, &a, 3, 2)).collect();
        let coassoc = samples.iter().find_map(|u| {
            let d = u.coproduct();
            (d.coproduct_at(0) != d.coproduct_at(1)).then(|| u.to_text())
        });
        rep.push(Check::from_witness(format!("{name}: coassociativity"), coassoc));

        let cocomm = samples.iter().find_map(|u| {
            let d = u.coproduct();
            (d.flip() != d).then(|| u.to_text())
        });
        rep.push(Check::from_witness(format!("{name}: cocommutativity"), cocomm));

        let counit = samples.iter().find_map(|u| {
            let d = u.coproduct();
            (d.counit_at(0) != *u || d.counit_at(1) != *u).then(|| u.to_text())
        });
        rep.push(Check::from_witness(format!("{name}: counit"), counit));

        let probes: Vec<CoeffFn> = (0..3).map(|_| random_coeff(&mut r, a.dim(), 2)).collect();
        let balanced = (|| -> Result<Option<String>> {
            for u in &samples {
                let d = u.coproduct();
                for f in &probes {
                    if d.right_mul_fn(0, f)? != d.right_mul_fn(1, f)? {
                        return Ok(Some(u.to_text()));
                    }
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{name}: coproduct lies in the Takeuchi product"), balanced));

        let mult = (|| -> Result<Option<String>> {
            for pair in samples.chunks(2) {
                let (x, y) = (&pair[0], &pair[1]);
                if x.mul(y)?.coproduct() != x.coproduct().mul(&y.coproduct())? {
                    return Ok(Some(format!("({x})({y})")));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{name}: coproduct is multiplicative"), mult));

        let prim = (0..a.rank()).find_map(|i| {
            let x = UEAElement::generator(&a, i);
            (!x.is_primitive()).then(|| a.basis[i].clone())
        });
        rep.push(Check::from_witness(format!("{name}: frame is primitive"), prim));

        let counit_mult = (|| -> Result<Option<String>> {
            for pair in samples.chunks(2) {
                let (x, y) = (&pair[0], &pair[1]);
                // ε(xy) = ε(x ε(y))
                let lhs = x.mul(y)?.counit();
                let rhs = x.mul(&UEAElement::from_fn(&a, y.counit()))?.counit();
                if lhs != rhs {
                    return Ok(Some(format!("({x})({y})")));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{name}: counit of products"), counit_mult));
    }
    rep
}

pub fn suite_groupoid(target: &Target) -> Result<Report> {
    let mut rep = Report::new("groupoids and bisections");
    for reg in target.registries()? {
        let kind = reg.kind();
        for c in reg.model.verify().checks {
            rep.push(Check { name: format!("{kind}: {}", c.name), ..c });
        }
        // flat graphs have no representable inverse and do not compose with each other
        let ids: Vec<String> = reg.declared().iter().filter(|b| b.tau_inv.is_some()).map(|b| b.id.clone()).collect();
        let inv = (|| -> Result<Option<String>> {
            for a in &ids {
                for b in &ids {
                    let ab = reg.mul(a, b)?;
                    let rhs = reg.mul(&reg.inv(b)?.id, &reg.inv(a)?.id)?;
                    if ab.is_empty() || rhs.is_empty() {
                        if ab.is_empty() != rhs.is_empty() {
                            return Ok(Some(format!("only one of ({a}·{b})^-1 and {b}^-1·{a}^-1 is empty")));
                        }
                        continue;
                    }
                    let lhs = reg.inv(&ab.id)?;
                    if lhs.alpha != rhs.alpha || lhs.domain != rhs.domain {
                        return Ok(Some(format!("({a}·{b})^-1 differs from {b}^-1·{a}^-1")));
                    }
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{kind}: inverse of a product"), inv));
        let assoc = (|| -> Result<Option<String>> {
            for a in &ids {
                for b in &ids {
                    for c in &ids {
                        let (ab, bc) = (reg.mul(a, b)?, reg.mul(b, c)?);
                        let lhs = if ab.is_empty() { ab } else { reg.mul(&ab.id, c)? };
                        let rhs = if bc.is_empty() { bc } else { reg.mul(a, &bc.id)? };
                        if lhs.is_empty() && rhs.is_empty() {
                            continue;
                        }
                        if lhs.alpha != rhs.alpha || lhs.domain != rhs.domain {
                            return Ok(Some(format!("({a}·{b})·{c}")));
                        }
                    }
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{kind}: product of bisections is associative"), assoc));
    }
    Ok(rep)
}

/// Derived against stored adjoint matrices, and the commuting square
/// `Ω(U(Ad_E)(u)) = Ad̄_E(Ω(u))` on 20 random `u` and 5 test functions per
/// bisection.
pub fn suite_adjoint(target: &Target, seed: u64) -> Result<Report> {
    let mut rep = Report::new("adjoint action");
    let mut r = rng(seed);
    for reg in target.registries()? {
        let kind = reg.kind();
        let mut bis = reg.declared();
        bis.retain(|b| b.tau_inv.is_some());
        let matrices = bis
            .iter()
            .find_map(|b| checked_ad_matrix(&reg.model, b).err().map(|e| format!("{}: {e}", b.id)));
        rep.push(Check::from_witness(format!("{kind}: derived matrix equals closed form"), matrices));
        let square = (|| -> Result<Option<String>> {
            for b in &bis {
                for _ in 0..20 {
                    let u = random_uea(&mut r, &reg.model.lie, 2, 2);
                    let s = r.gen();
                    let checked = adbar(&reg.model, b, &u, s)?;
                    if checked != ad_uea(&reg.model, b, &u)? {
                        return Ok(Some(format!("{} on {u}", b.id)));
                    }
                }
            }
            Ok(None)
        })();
        rep.push(
            Check::from_result(format!("{kind}: commuting square"), square)
                .with_detail(format!("{} bisections x 20 elements x 5 test functions", bis.len())),
        );
    }
    Ok(rep)
}

/// Equality of functions given piecewise on regions, decided on the cells
/// cut out by all region endpoints.
pub fn local_eq(a: &LocalFunction, b: &LocalFunction) -> Result<bool> {
    use crate::coeffs::Interval;
    use crate::number::ExpNum;
    let all: Vec<_> = a.pieces.iter().chain(&b.pieces).collect();
    if all.is_empty() {
        return Ok(true);
    }
    let dim = all[0].0.dim();
    let sum_at = |l: &LocalFunction, x: &[ExpNum]| -> CoeffFn {
        let mut acc = CoeffFn::zero(dim);
        for (r, f) in &l.pieces {
            if r.contains(x) {
                acc = &acc + f;
            }
        }
        acc
    };
    if dim == 0 {
        return Ok(sum_at(a, &[]) == sum_at(b, &[]));
    }
    let mut cuts: Vec<Q> = all.iter().flat_map(|(r, _)| r.endpoints()).collect();
    cuts.sort();
    cuts.dedup();
    let mut samples = Vec::new();
    let mut lo = None;
    for c in &cuts {
        samples.push(Interval::new(lo.clone(), Some(c.clone())).sample());
        samples.push(c.clone());
        lo = Some(c.clone());
    }
    samples.push(Interval::new(lo, None).sample());
    for x in samples {
        let p = vec![ExpNum::rational(x)];
        let (fa, fb) = (sum_at(a, &p), sum_at(b, &p));
        if !fa.germ_eq(&fb, &p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bialgebra identities of the convolution algebra.
pub fn suite_conv(target: &Target, seed: u64) -> Result<Report> {
    let mut rep = Report::new("convolution bialgebras");
    let mut r = rng(seed);
    for reg in target.registries()? {
        let kind = reg.kind();
        let mut ids = ids(&reg);
        ids.retain(|id| reg.get(id).map(|b| b.tau_inv.is_some()).unwrap_or(false));
        let deg = if reg.model.lie.rank() == 0 { 0 } else { 2 };
        let el = |r: &mut TestRng| random_element(&reg, r, &ids, 2, deg);

        let assoc = (|| -> Result<Option<String>> {
            for _ in 0..50 {
                let (a, b, c) = (el(&mut r), el(&mut r), el(&mut r));
                if a.mul(&b)?.mul(&c)? != a.mul(&b.mul(&c)?)? {
                    return Ok(Some(format!("({a})({b})({c})")));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{kind}: associativity"), assoc).with_detail("50 triples"));

        let samples: Vec<ConvElement> = (0..20).map(|_| el(&mut r)).collect();
        let one = ConvElement::one(&reg);
        let unit = (|| -> Result<Option<String>> {
            for a in &samples {
                if one.mul(a)? != *a || a.mul(&one)? != *a {
                    return Ok(Some(a.to_string()));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{kind}: unit"), unit));

        let mult = (|| -> Result<Option<String>> {
            for p in samples.chunks(2) {
                let (a, b) = (&p[0], &p[1]);
                if a.mul(b)?.coproduct() != a.coproduct().mul(&b.coproduct())? {
                    return Ok(Some(format!("({a})({b})")));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{kind}: coproduct is multiplicative"), mult));

        let counit = (|| -> Result<Option<String>> {
            for p in samples.chunks(2) {
                let (a, b) = (&p[0], &p[1]);
                let lhs = a.mul(b)?.counit()?;
                let rhs = a.mul(&b.counit()?.as_element(&reg)?)?.counit()?;
                if !local_eq(&lhs, &rhs)? {
                    return Ok(Some(format!("({a})({b})")));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{kind}: counit of products"), counit));

        let probes: Vec<CoeffFn> = (0..3).map(|_| random_coeff(&mut r, reg.model.base_dim(), 2)).collect();
        let balanced = (|| -> Result<Option<String>> {
            for a in &samples {
                if !a.coproduct().is_balanced(&probes)? {
                    return Ok(Some(a.to_string()));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{kind}: coproduct lies in the Takeuchi product"), balanced));

        let lie = &reg.model.lie;
        let prim = (0..lie.rank()).find_map(|i| {
            let x = UEAElement::generator(lie, i);
            let a = ConvElement::term(&reg, x.clone(), UNIT_ID).ok()?;
            let one = UEAElement::one(lie);
            let want = TensorElement::pure(&[x.clone(), one.clone()]).add(&TensorElement::pure(&[one, x]));
            let got: Vec<_> = a.coproduct().terms().map(|(id, t)| (id.clone(), t.clone())).collect();
            (got != vec![(UNIT_ID.to_string(), want)]).then(|| lie.basis[i].clone())
        });
        rep.push(Check::from_witness(format!("{kind}: frame elements are primitive"), prim));

        let round = (|| -> Result<Option<String>> {
            for a in &samples {
                if ConvElement::from_tensor_picture(&reg, &a.tensor_picture())? != *a {
                    return Ok(Some(format!("tensor picture of {a}")));
                }
                if parse_conv(&a.to_text(), &reg)? != *a {
                    return Ok(Some(format!("text form of {a}")));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{kind}: tensor picture and text round trips"), round));
    }
    Ok(rep)
}

/// The Hopf algebroid axioms on functions on the étale groupoid.
pub fn suite_hopf_etale(target: &Target, seed: u64) -> Result<Report> {
    let regs = target.registries()?;
    let reg = match &target.spec {
        None => regs.into_iter().find(|r| r.kind() == ModelKind::Etale).expect("desk models"),
        Some(_) => regs.into_iter().next().expect("one registry"),
    };
    if reg.kind() != ModelKind::Etale {
        return Err(Error::Model("hopf-etale needs the etale model".into()));
    }
    let mut rep = Report::new("Hopf algebroid of the etale groupoid");
    let mut r = rng(seed);
    let mut ids = ids(&reg);
    ids.push(UNIT_ID.to_string());
    let els: Vec<ConvElement> = (0..30).map(|_| random_element(&reg, &mut r, &ids, 3, 0)).collect();
    let fns: Vec<ConvElement> = (0..10)
        .map(|_| ConvElement::function(&reg, random_coeff(&mut r, 1, 3), UNIT_ID).unwrap())
        .collect();
    let probes: Vec<CoeffFn> = (0..3).map(|_| random_coeff(&mut r, 1, 2)).collect();
    let pairs: Vec<(&ConvElement, &ConvElement)> = els.iter().zip(els.iter().skip(1)).collect();

    let mut push = |name: &str, res: Result<Option<String>>| rep.push(Check::from_result(name, res));

    push("(i) coproduct lies in the Takeuchi product", (|| {
        for a in &els {
            if !a.coproduct().is_balanced(&probes)? {
                return Ok(Some(a.to_string()));
            }
        }
        Ok(None)
    })());
    push("(ii) counit restricts to the identity", (|| {
        for f in &fns {
            if f.counit()?.as_element(&reg)? != *f {
                return Ok(Some(f.to_string()));
            }
        }
        Ok(None)
    })());
    push("(iii) coproduct restricts to the embedding", (|| {
        let lie = &reg.model.lie;
        for f in &fns {
            let want: Vec<_> = f
                .terms()
                .map(|(id, u)| (id.clone(), TensorElement::pure(&[u.clone(), UEAElement::one(lie)])))
                .collect();
            let got: Vec<_> = f.coproduct().terms().map(|(id, t)| (id.clone(), t.clone())).collect();
            if got != want {
                return Ok(Some(f.to_string()));
            }
        }
        Ok(None)
    })());
    push("(iv) counit of products", (|| {
        for (a, b) in &pairs {
            let lhs = a.mul(b)?.counit()?;
            let rhs = a.mul(&b.counit()?.as_element(&reg)?)?.counit()?;
            if !local_eq(&lhs, &rhs)? {
                return Ok(Some(format!("({a})({b})")));
            }
        }
        Ok(None)
    })());
    push("(v) coproduct is multiplicative", (|| {
        for (a, b) in &pairs {
            if a.mul(b)?.coproduct() != a.coproduct().mul(&b.coproduct())? {
                return Ok(Some(format!("({a})({b})")));
            }
        }
        Ok(None)
    })());
    push(
        "cocommutativity",
        Ok(els.iter().find(|a| a.coproduct().flip() != a.coproduct()).map(|a| a.to_string())),
    );
    push("(vi) antipode restricts to the identity", (|| {
        for f in &fns {
            if f.antipode()? != *f {
                return Ok(Some(f.to_string()));
            }
        }
        Ok(None)
    })());
    push("antipode is an involution", (|| {
        for a in &els {
            if a.antipode()?.antipode()? != *a {
                return Ok(Some(a.to_string()));
            }
        }
        Ok(None)
    })());
    push("(vii) antipode reverses products", (|| {
        for (a, b) in &pairs {
            if a.mul(b)?.antipode()? != b.antipode()?.mul(&a.antipode()?)? {
                return Ok(Some(format!("({a})({b})")));
            }
        }
        Ok(None)
    })());
    push("(viii) μ∘(S⊗id)∘Δ = ε∘S", (|| {
        for a in &els {
            let lhs = a.coproduct().antipode_then_multiply()?;
            let rhs = a.antipode()?.counit()?.as_element(&reg)?;
            if lhs != rhs {
                return Ok(Some(a.to_string()));
            }
        }
        Ok(None)
    })());
    Ok(rep)
}

/// Products of distributions against the defining formula.
pub fn suite_dist(target: &Target, seed: u64) -> Result<Report> {
    let mut rep = Report::new("transversal distributions");
    let mut r = rng(seed);
    let regs = target.registries()?;
    let per_model = 100usize.div_ceil(regs.len());
    for reg in regs {
        let kind = reg.kind();
        let mut ids = ids(&reg);
        ids.retain(|id| reg.get(id).map(|b| b.tau_inv.is_some()).unwrap_or(false));
        ids.push(UNIT_ID.to_string());
        let bank = test_bank(&reg.model, seed);
        let deg = if reg.model.lie.rank() == 0 { 0 } else { 2 };
        let res = (|| -> Result<Option<String>> {
            for _ in 0..per_model {
                let term = |r: &mut TestRng| -> Result<TransvDist> {
                    let id = &ids[r.gen_range(0..ids.len())];
                    TransvDist::term(&reg, id, random_uea(r, &reg.model.lie, deg, 2))
                };
                let (tp, t) = (term(&mut r)?, term(&mut r)?);
                let prod = tp.mul(&t)?;
                for _ in 0..3 {
                    let f = &bank[r.gen_range(0..bank.len())];
                    let d = prod.eval(f)?.sub(&dist_mul_defcheck_value(&tp, &t, f)?);
                    if let Some(w) = d.zero_witness()? {
                        return Ok(Some(format!("{tp} * {t} on {}: {w}", format_coeff(f, &reg.model.arrows.vars))));
                    }
                }
            }
            Ok(None)
        })();
        rep.push(
            Check::from_result(format!("{kind}: product equals the defining formula"), res)
                .with_detail(format!("{per_model} term pairs x 3 test functions")),
        );
    }
    Ok(rep)
}

pub fn suite_phi_homomorphism(target: &Target, seed: u64) -> Result<Report> {
    let mut rep = Report::new("Φ is an algebra homomorphism");
    let mut r = rng(seed);
    for reg in target.registries()? {
        let kind = reg.kind();
        let mut ids = ids(&reg);
        ids.retain(|id| reg.get(id).map(|b| b.tau_inv.is_some()).unwrap_or(false));
        let deg = if reg.model.lie.rank() == 0 { 0 } else { 2 };
        let res = (|| -> Result<Option<String>> {
            for _ in 0..100 {
                let a = random_element(&reg, &mut r, &ids, 2, deg);
                let b = random_element(&reg, &mut r, &ids, 2, deg);
                if phi(&a.mul(&b)?)? != phi(&a)?.mul(&phi(&b)?)? {
                    return Ok(Some(format!("a = {a}, b = {b}")));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{kind}: Φ(ab) = Φ(a)∗Φ(b)"), res).with_detail("100 pairs"));
        let lin = (|| -> Result<Option<String>> {
            for _ in 0..20 {
                let a = random_element(&reg, &mut r, &ids, 2, deg);
                let b = random_element(&reg, &mut r, &ids, 2, deg);
                let c = q(r.gen_range(-3..=3));
                if phi(&a.add(&b.scale(&c))?)? != phi(&a)?.add(&phi(&b)?.scale(&c))? {
                    return Ok(Some(format!("a = {a}, b = {b}")));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{kind}: Φ is linear"), lin));
        let lie = &reg.model.lie;
        let units = (|| -> Result<Option<String>> {
            for _ in 0..20 {
                let u = random_uea(&mut r, lie, deg, 2);
                if u.is_zero() {
                    continue;
                }
                let a = ConvElement::term(&reg, u.clone(), UNIT_ID)?;
                if phi(&a)? != TransvDist::term(&reg, UNIT_ID, u.clone())? {
                    return Ok(Some(format!("Φ<{u} | 1>")));
                }
                if kernel_test(&a)?.in_kernel {
                    return Ok(Some(format!("<{u} | 1> passes the kernel test")));
                }
            }
            Ok(None)
        })();
        rep.push(Check::from_result(format!("{kind}: Φ embeds the unit bisection"), units));
    }
    Ok(rep)
}

/// Kernel test on the kinked pair registry: the four-graph element, its
/// scalar variants, and soundness/completeness against the test bank.
pub fn suite_phi_kernel(target: &Target, seed: u64) -> Result<Report> {
    let reg = match &target.spec {
        None => Arc::new(Registry::pair_kinked()),
        Some(spec) => spec.registry()?.ok_or_else(|| Error::Model("phi-kernel needs a groupoid model".into()))?,
    };
    let kind = reg.kind();
    let mut rep = Report::new(format!("kernel of Φ on the {kind} registry"));
    let bank = test_bank(&reg.model, seed);
    let mut r = rng(seed);
    let ids = ids(&reg);

    let mut elements: Vec<ConvElement> = Vec::new();
    if target.spec.is_none() {
        let ex = KernelExample::new();
        let a = ex.a.clone();
        // the same element over this suite's registry
        let mut b = ConvElement::zero(&reg);
        for (id, u) in a.terms() {
            b = b.add(&ConvElement::term(&reg, u.clone(), id)?)?;
        }
        elements.push(b.clone());
        for _ in 0..5 {
            let f = random_coeff(&mut r, 1, 3);
            let mut c = ConvElement::zero(&reg);
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let s = if (i + j) % 2 == 0 { q(1) } else { q(-1) };
                c = c.add(&ConvElement::function(&reg, f.scale(&s), &format!("E{i}{j}"))?)?;
            }
            elements.push(c);
        }
    }
    for _ in 0..20 {
        elements.push(random_element(&reg, &mut r, &ids, 3, 0));
    }

    let mut kernel_count = 0;
    let res = (|| -> Result<Option<String>> {
        for a in &elements {
            let k = kernel_test(a)?;
            let image = phi(a)?;
            let mut nonzero = None;
            for f in &bank {
                if let Some(w) = image.eval(f)?.zero_witness()? {
                    nonzero = Some(w);
                    break;
                }
            }
            match (k.in_kernel, nonzero) {
                (true, Some(w)) => return Ok(Some(format!("{a} passes the kernel test but Φ(a) ≠ 0: {w}"))),
                (false, None) => return Ok(Some(format!("{a} fails the kernel test but Φ(a) vanishes on the bank"))),
                (true, None) => kernel_count += 1,
                (false, Some(_)) => {}
            }
        }
        Ok(None)
    })();
    rep.push(
        Check::from_result("kernel test agrees with Φ on the test bank", res)
            .with_detail(format!("{} elements, {kernel_count} in the kernel", elements.len())),
    );
    Ok(rep)
}
