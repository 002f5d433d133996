//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use groupoid_conv::coeffs::{CoeffFn, FlatFn, Poly};
use groupoid_conv::lie_rinehart::{check_axioms, LieRinehart};
use groupoid_conv::model::ModelSpec;
use groupoid_conv::phi::run_scenario;
use groupoid_conv::random::{rng, random_poly, random_uea};
use groupoid_conv::report::Report;
use groupoid_conv::suites::{run_suite, Target};
use groupoid_conv::uea::UEAElement;
use rand::Rng;

const SEED: u64 = 0xC0FFEE;

type Outcome = Result<String, String>;

fn suite(name: &str) -> Result<Report, String> {
    run_suite(name, &Target::default(), SEED).map_err(|e| e.to_string())
}

fn all_pass(rep: &Report) -> Result<(), String> {
    match rep.first_failure() {
        None => Ok(()),
        Some(c) => Err(format!("{}: {}", c.name, c.witness.clone().unwrap_or_default())),
    }
}

/// Leading integer of every detail string whose check name contains `key`.
fn counts(rep: &Report, key: &str) -> Vec<usize> {
    rep.checks
        .iter()
        .filter(|c| c.name.contains(key))
        .filter_map(|c| c.detail.as_ref()?.split_whitespace().next()?.parse().ok())
        .collect()
}

fn lie_rinehart_axioms() -> Outcome {
    let rep = suite("lie-rinehart")?;
    all_pass(&rep)?;
    for name in ["h3", "T(R)", "0"] {
        if !rep.checks.iter().any(|c| c.name.starts_with(&format!("{name}: jacobi"))) {
            return Err(format!("{name} was not checked"));
        }
    }
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "models", "h3-corrupted.json"].iter().collect();
    let spec = ModelSpec::from_json(&std::fs::read_to_string(path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let bad = check_axioms(spec.algebroid.as_ref().unwrap(), &[], SEED);
    let witness = bad
        .first_failure()
        .and_then(|c| c.witness.clone())
        .ok_or("corrupted table passed")?;
    Ok(format!("3 algebroids exact; corrupted table rejected with {witness}"))
}

/// A word in the free algebra on functions and frame letters.
#[derive(Clone, Debug)]
enum Letter {
    F(CoeffFn),
    X(usize),
}

/// Rewrite a product of letters to `f · X^e` normal form with the three
/// defining relations, independently of the library's normalizer.
fn rewrite(lie: &Arc<LieRinehart>, word: Vec<Letter>) -> BTreeMap<Vec<u32>, CoeffFn> {
    let n = lie.dim();
    let mut out: BTreeMap<Vec<u32>, CoeffFn> = BTreeMap::new();
    let mut stack = vec![word];
    'words: while let Some(w) = stack.pop() {
        for k in 0..w.len().saturating_sub(1) {
            match (&w[k], &w[k + 1]) {
                (Letter::F(f), Letter::F(g)) => {
                    let mut v = w.clone();
                    v.splice(k..k + 2, [Letter::F(f * g)]);
                    stack.push(v);
                    continue 'words;
                }
                // X f = f X + X(f)
                (Letter::X(i), Letter::F(g)) => {
                    let mut swapped = w.clone();
                    swapped.swap(k, k + 1);
                    stack.push(swapped);
                    let d = lie.anchor_basis(*i, g);
                    if !d.is_zero() {
                        let mut v = w.clone();
                        v.splice(k..k + 2, [Letter::F(d)]);
                        stack.push(v);
                    }
                    continue 'words;
                }
                // X_j X_i = X_i X_j + [X_j, X_i]
                (Letter::X(j), Letter::X(i)) if j > i => {
                    let mut swapped = w.clone();
                    swapped.swap(k, k + 1);
                    stack.push(swapped);
                    for (m, c) in lie.bracket[*j][*i].iter().enumerate() {
                        if !c.is_zero() {
                            let mut v = w.clone();
                            v.splice(k..k + 2, [Letter::F(c.clone()), Letter::X(m)]);
                            stack.push(v);
                        }
                    }
                    continue 'words;
                }
                _ => {}
            }
        }
        let mut exps = vec![0u32; lie.rank()];
        let mut coeff = CoeffFn::one(n);
        for l in w {
            match l {
                Letter::F(f) => coeff = &coeff * &f,
                Letter::X(i) => exps[i] += 1,
            }
        }
        let slot = out.entry(exps).or_insert_with(|| CoeffFn::zero(n));
        *slot = &*slot + &coeff;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn words(u: &UEAElement) -> Vec<Vec<Letter>> {
    u.terms()
        .map(|(e, f)| {
            let mut w = vec![Letter::F(f.clone())];
            for (i, k) in e.iter().enumerate() {
                w.extend(std::iter::repeat_n(Letter::X(i), *k as usize));
            }
            w
        })
        .collect()
}

fn rewriter_agrees(lie: &Arc<LieRinehart>, x: &UEAElement, y: &UEAElement) -> Result<bool, String> {
    let mut total: BTreeMap<Vec<u32>, CoeffFn> = BTreeMap::new();
    for a in words(x) {
        for b in words(y) {
            let mut w = a.clone();
            w.extend(b);
            for (e, c) in rewrite(lie, w) {
                let slot = total.entry(e).or_insert_with(|| CoeffFn::zero(lie.dim()));
                *slot = &*slot + &c;
            }
        }
    }
    let oracle = UEAElement::from_terms(lie, total);
    Ok(oracle == x.mul(y).map_err(|e| e.to_string())?)
}

fn uea_suite() -> Outcome {
    let rep = suite("uea")?;
    all_pass(&rep)?;
    for key in ["associativity", "coassociativity", "counit", "multiplicative", "Takeuchi"] {
        if !rep.checks.iter().any(|c| c.name.contains(key)) {
            return Err(format!("{key} was not checked"));
        }
    }
    let mut r = rng(SEED ^ 0x5eed);
    let algebroids = [
        Arc::new(LieRinehart::heisenberg()),
        Arc::new(LieRinehart::tangent_line()),
        Arc::new(LieRinehart::zero_over_line()),
    ];
    for k in 0..50 {
        let lie = &algebroids[k % 3];
        let (x, y) = (random_uea(&mut r, lie, 3, 2), random_uea(&mut r, lie, 3, 2));
        if !rewriter_agrees(lie, &x, &y)? {
            return Err(format!("rewriter disagrees on ({x})({y})"));
        }
    }
    Ok("100 triples per algebroid; rewriter oracle agrees on 50 products".into())
}

fn hopf_etale() -> Outcome {
    let rep = suite("hopf-etale")?;
    all_pass(&rep)?;
    let numbered = rep.checks.iter().filter(|c| c.name.starts_with('(')).count();
    if numbered != 8 || !rep.checks.iter().any(|c| c.name.contains("involution")) {
        return Err(format!("{numbered} numbered axioms checked"));
    }
    Ok("axioms (i)-(viii) and S∘S = id on 30 elements".into())
}

fn commuting_square() -> Outcome {
    let rep = suite("adjoint")?;
    all_pass(&rep)?;
    let bis: usize = counts(&rep, "commuting square").iter().sum();
    Ok(format!("{bis} bisections x 20 u x 5 F over 3 models"))
}

fn dist_defcheck() -> Outcome {
    let rep = suite("dist")?;
    all_pass(&rep)?;
    let pairs: usize = counts(&rep, "defining formula").iter().sum();
    if pairs < 100 {
        return Err(format!("only {pairs} term pairs"));
    }
    Ok(format!("{pairs} term pairs"))
}

fn phi_homomorphism() -> Outcome {
    let rep = suite("phi-homomorphism")?;
    all_pass(&rep)?;
    let per_model = counts(&rep, "Φ(ab)");
    if per_model.len() != 3 || per_model.iter().any(|n| *n < 100) {
        return Err(format!("pairs per model: {per_model:?}"));
    }
    Ok("100 pairs on each of 3 models".into())
}

fn scenario(name: &str) -> Outcome {
    let rep = run_scenario(name, SEED).map_err(|e| e.to_string())?;
    if let Some(c) = rep.checks.iter().find(|c| !c.pass) {
        return Err(format!("{}: {}", c.name, c.witness.clone().unwrap_or_default()));
    }
    Ok(rep.checks.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join("; "))
}

fn central_difference(f: &CoeffFn, x: f64) -> f64 {
    let h = 1e-5 * x.abs().max(1.0);
    (f.eval_f64(&[x + h]) - f.eval_f64(&[x - h])) / (2.0 * h)
}

fn finite_differences() -> Outcome {
    let mut r = rng(SEED);
    let t = Poly::var(1, 0);
    let phi = FlatFn::phi();
    let families: [(&str, Vec<CoeffFn>); 2] = [
        ("poly", (0..5).map(|_| CoeffFn::Poly(random_poly(&mut r, 1, 5, 4))).collect()),
        (
            "flat",
            vec![
                CoeffFn::flat(phi.clone()),
                CoeffFn::flat(phi.mul_poly(&(&t * &t))),
                CoeffFn::flat(phi.scale_arg(&groupoid_conv::number::qr(1, 2))),
                CoeffFn::flat(FlatFn::kinked_diffeo(1, 0)),
            ],
        ),
    ];
    let mut worst = 0.0f64;
    for (family, fs) in &families {
        for f in fs {
            let df = f.derive(0);
            for _ in 0..20 {
                let x: f64 = r.gen_range(0.2..2.5) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
                let (exact, fd) = (df.eval_f64(&[x]), central_difference(f, x));
                let rel = (exact - fd).abs() / exact.abs().max(1.0);
                if rel > 1e-6 {
                    return Err(format!("{family} at {x}: {exact} vs {fd}"));
                }
                worst = worst.max(rel);
            }
        }
    }
    Ok(format!("poly and flat families x 20 points, max rel gap {worst:.1e}"))
}

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { name: "Lie-Rinehart axioms", budget: Some(Duration::from_secs(1)), run: lie_rinehart_axioms },
        Criterion { name: "enveloping algebra", budget: Some(Duration::from_secs(10)), run: uea_suite },
        Criterion { name: "etale Hopf algebroid", budget: None, run: hopf_etale },
        Criterion { name: "adjoint commuting square", budget: None, run: commuting_square },
        Criterion { name: "distribution product", budget: None, run: dist_defcheck },
        Criterion { name: "Φ homomorphism", budget: None, run: phi_homomorphism },
        Criterion { name: "kernel example", budget: Some(Duration::from_secs(5)), run: || scenario("kernel-example") },
        Criterion { name: "Cartier-Gabriel", budget: None, run: || scenario("cartier-gabriel") },
        Criterion { name: "etale isomorphism", budget: None, run: || scenario("etale-iso") },
        Criterion { name: "finite differences", budget: None, run: finite_differences },
    ];
    let mut failed = 0;
    for (k, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let took = start.elapsed();
        if let (Ok(_), Some(b)) = (&outcome, c.budget) {
            if took > b {
                outcome = Err(format!("took {took:.2?}, budget {b:?}"));
            }
        }
        let budget = c.budget.map(|b| format!(" < {b:?}")).unwrap_or_default();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {:<26} {took:>9.2?}{budget}  {detail}", k + 1, c.name),
            Err(w) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {:<26} {took:>9.2?}{budget}  {w}", k + 1, c.name);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
