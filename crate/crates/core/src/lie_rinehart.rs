//! Lie–Rinehart algebras with a global frame: a free module over the
//! coefficient functions of a chart, an anchor into vector fields, and a
//! bracket table on the frame.

use std::fmt;
use std::sync::Arc;

use crate::coeffs::{text, CoeffFn, Chart};
use crate::error::{Error, Result};
use crate::random::{random_coeff, rng};
use crate::report::{Check, Report};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieRinehart {
    pub name: String,
    pub chart: Chart,
    pub basis: Vec<String>,
    /// `anchor[i][k]` is the `k`-th component of the vector field ρ(X_i).
    pub anchor: Vec<Vec<CoeffFn>>,
    /// `bracket[i][j][k]`: `[X_i, X_j] = Σ_k bracket[i][j][k] X_k`.
    pub bracket: Vec<Vec<Vec<CoeffFn>>>,
}

impl LieRinehart {
    pub fn new(name: &str, chart: Chart, basis: &[&str]) -> Self {
        let r = basis.len();
        let dim = chart.dim();
        LieRinehart {
            name: name.to_string(),
            anchor: vec![vec![CoeffFn::zero(dim); dim]; r],
            bracket: vec![vec![vec![CoeffFn::zero(dim); r]; r]; r],
            basis: basis.iter().map(|s| s.to_string()).collect(),
            chart,
        }
    }

    /// The Heisenberg Lie algebra over a point: `[X, Y] = Z`.
    pub fn heisenberg() -> Self {
        let mut a = LieRinehart::new("h3", Chart::point("pt"), &["X", "Y", "Z"]);
        a.set_bracket(0, 1, vec![CoeffFn::zero(0), CoeffFn::zero(0), CoeffFn::one(0)]);
        a
    }

    /// The tangent algebroid of the line, frame `d = ∂/∂t`.
    pub fn tangent_line() -> Self {
        let mut a = LieRinehart::new("T(R)", Chart::new("R", &["t"]), &["d"]);
        a.anchor[0][0] = CoeffFn::one(1);
        a
    }

    /// The zero algebroid over the line.
    pub fn zero_over_line() -> Self {
        LieRinehart::new("0", Chart::new("R", &["t"]), &[])
    }

    /// Set `[X_i, X_j] = v` and `[X_j, X_i] = -v`.
    pub fn set_bracket(&mut self, i: usize, j: usize, v: Vec<CoeffFn>) {
        let neg: Vec<CoeffFn> = v.iter().map(|c| -c).collect();
        self.bracket[i][j] = v;
        self.bracket[j][i] = neg;
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// ρ(X_i)(f)
    pub fn anchor_basis(&self, i: usize, f: &CoeffFn) -> CoeffFn {
        let mut acc = CoeffFn::zero(self.dim());
        for (k, a) in self.anchor[i].iter().enumerate() {
            if !a.is_zero() {
                acc = &acc + &(a * &f.derive(k));
            }
        }
        acc
    }

    pub fn format_section(&self, coeffs: &[CoeffFn]) -> String {
        let mut parts = Vec::new();
        for (c, name) in coeffs.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                parts.push(name.clone());
            } else if text::needs_parens(c) {
                parts.push(format!("({})*{name}", text::format_coeff(c, &self.chart.vars)));
            } else {
                parts.push(format!("{}*{name}", text::format_coeff(c, &self.chart.vars)));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// A section `Σ h_i X_i`.
#[derive(Clone, Debug)]
pub struct Section {
    pub parent: Arc<LieRinehart>,
    pub coeffs: Vec<CoeffFn>,
}

impl PartialEq for Section {
    fn eq(&self, other: &Self) -> bool {
        same_parent(&self.parent, &other.parent) && self.coeffs == other.coeffs
    }
}

pub fn same_parent(a: &Arc<LieRinehart>, b: &Arc<LieRinehart>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Section {
    pub fn new(parent: &Arc<LieRinehart>, coeffs: Vec<CoeffFn>) -> Result<Self> {
        if coeffs.len() != parent.rank() {
            return Err(Error::ChartMismatch(format!(
                "{} coefficients for a frame of rank {}",
                coeffs.len(),
                parent.rank()
            )));
        }
        if coeffs.iter().any(|c| c.nvars() != parent.dim()) {
            return Err(Error::ChartMismatch("section coefficient on another chart".into()));
        }
        Ok(Section {
            parent: parent.clone(),
            coeffs,
        })
    }

    pub fn zero(parent: &Arc<LieRinehart>) -> Self {
        Section {
            parent: parent.clone(),
            coeffs: vec![CoeffFn::zero(parent.dim()); parent.rank()],
        }
    }

    pub fn basis(parent: &Arc<LieRinehart>, i: usize) -> Self {
        let mut s = Section::zero(parent);
        s.coeffs[i] = CoeffFn::one(parent.dim());
        s
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(CoeffFn::is_zero)
    }

    fn check_parent(&self, other: &Section) -> Result<()> {
        if same_parent(&self.parent, &other.parent) {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    pub fn add(&self, other: &Section) -> Result<Section> {
        self.check_parent(other)?;
        Ok(Section {
            parent: self.parent.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, f: &CoeffFn) -> Section {
        Section {
            parent: self.parent.clone(),
            coeffs: self.coeffs.iter().map(|c| f * c).collect(),
        }
    }

    /// X(f) = Σ h_i ρ(X_i)(f)
    pub fn anchor_apply(&self, f: &CoeffFn) -> Result<CoeffFn> {
        if f.nvars() != self.parent.dim() {
            return Err(Error::ChartMismatch("function on another chart".into()));
        }
        let mut acc = CoeffFn::zero(self.parent.dim());
        for (i, h) in self.coeffs.iter().enumerate() {
            if !h.is_zero() {
                acc = &acc + &(h * &self.parent.anchor_basis(i, f));
            }
        }
        Ok(acc)
    }

    /// Bracket extended from the frame by the Leibniz rule.
    pub fn bracket(&self, other: &Section) -> Result<Section> {
        self.check_parent(other)?;
        let a = &self.parent;
        let r = a.rank();
        let mut out = vec![CoeffFn::zero(a.dim()); r];
        for (i, h) in self.coeffs.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            for (j, k) in other.coeffs.iter().enumerate() {
                if k.is_zero() {
                    continue;
                }
                let hk = h * k;
                for (l, c) in a.bracket[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[l] = &out[l] + &(&hk * c);
                    }
                }
                out[j] = &out[j] + &(h * &a.anchor_basis(i, k));
                out[i] = &out[i] - &(k * &a.anchor_basis(j, h));
            }
        }
        Ok(Section {
            parent: a.clone(),
            coeffs: out,
        })
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.parent.format_section(&self.coeffs))
    }
}

fn jacobiator(x: &Section, y: &Section, z: &Section) -> Result<Section> {
    let a = x.bracket(&y.bracket(z)?)?;
    let b = y.bracket(&z.bracket(x)?)?;
    let c = z.bracket(&x.bracket(y)?)?;
    a.add(&b)?.add(&c)
}

/// Verify the Lie–Rinehart axioms on the frame and on the supplied sample
/// triples. Random test functions are drawn from `seed`.
pub fn check_axioms(a: &Arc<LieRinehart>, samples: &[(Section, Section, Section)], seed: u64) -> Report {
    let mut report = Report::new(format!("Lie-Rinehart axioms of {}", a.name));
    let r = a.rank();
    let dim = a.dim();
    let basis: Vec<Section> = (0..r).map(|i| Section::basis(a, i)).collect();
    let mut g = rng(seed);
    let fs: Vec<CoeffFn> = (0..5).map(|_| random_coeff(&mut g, dim, 3)).collect();

    let mut witness = None;
    'anti: for i in 0..r {
        for j in 0..r {
            let ok = a.bracket[i][j].iter().zip(&a.bracket[j][i]).all(|(x, y)| (x + y).is_zero());
            if !ok {
                witness = Some(format!(
                    "[{0},{1}] = {2} but [{1},{0}] = {3}",
                    a.basis[i],
                    a.basis[j],
                    a.format_section(&a.bracket[i][j]),
                    a.format_section(&a.bracket[j][i])
                ));
                break 'anti;
            }
        }
    }
    report.push(Check::from_witness("antisymmetry", witness));

    let mut triples: Vec<(Section, Section, Section)> = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                triples.push((basis[i].clone(), basis[j].clone(), basis[k].clone()));
            }
        }
    }
    triples.extend(samples.iter().cloned());
    let mut witness = None;
    for (x, y, z) in &triples {
        match jacobiator(x, y, z) {
            Ok(j) if j.is_zero() => {}
            Ok(j) => {
                witness = Some(format!("J({x}, {y}, {z}) = {j}"));
                break;
            }
            Err(e) => {
                witness = Some(e.to_string());
                break;
            }
        }
    }
    report.push(Check::from_witness("jacobi", witness).with_detail(format!("{} triples", triples.len())));

    let mut witness = None;
    'hom: for x in &basis {
        for y in &basis {
            let xy = x.bracket(y).expect("same parent");
            for f in &fs {
                let lhs = xy.anchor_apply(f).unwrap();
                let rhs = &x.anchor_apply(&y.anchor_apply(f).unwrap()).unwrap()
                    - &y.anchor_apply(&x.anchor_apply(f).unwrap()).unwrap();
                if lhs != rhs {
                    witness = Some(format!(
                        "rho([{x}, {y}]) differs from [rho {x}, rho {y}] on {}",
                        text::format_coeff(f, &a.chart.vars)
                    ));
                    break 'hom;
                }
            }
        }
    }
    report.push(Check::from_witness("anchor preserves brackets", witness));

    let mut witness = None;
    let mut pairs: Vec<(Section, Section)> = Vec::new();
    for x in &basis {
        for y in &basis {
            pairs.push((x.clone(), y.clone()));
        }
    }
    pairs.extend(samples.iter().map(|(x, y, _)| (x.clone(), y.clone())));
    'leib: for (x, y) in &pairs {
        for f in &fs {
            let lhs = x.bracket(&y.scale(f)).unwrap();
            let rhs = x
                .bracket(y)
                .unwrap()
                .scale(f)
                .add(&y.scale(&x.anchor_apply(f).unwrap()))
                .unwrap();
            if lhs != rhs {
                witness = Some(format!("[{x}, f*{y}] with f = {}", text::format_coeff(f, &a.chart.vars)));
                break 'leib;
            }
        }
    }
    report.push(Check::from_witness("leibniz rule", witness));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::q;

    #[test]
    fn heisenberg_bracket() {
        let h = Arc::new(LieRinehart::heisenberg());
        let x = Section::basis(&h, 0);
        let y = Section::basis(&h, 1);
        assert_eq!(x.bracket(&y).unwrap(), Section::basis(&h, 2));
        assert!(x.bracket(&x).unwrap().is_zero());
    }

    #[test]
    fn tangent_line_bracket() {
        let a = Arc::new(LieRinehart::tangent_line());
        let d = Section::basis(&a, 0);
        let td = d.scale(&CoeffFn::var(1, 0));
        let got = td.bracket(&d).unwrap();
        assert_eq!(got.coeffs, vec![CoeffFn::constant(1, q(-1))]);
    }

    #[test]
    fn anchor_examples() {
        let a = Arc::new(LieRinehart::tangent_line());
        let t = CoeffFn::var(1, 0);
        let d = Section::basis(&a, 0);
        let t2 = &t * &t;
        assert_eq!(d.anchor_apply(&t2).unwrap(), t.scale(&q(2)));
        let t3 = &t2 * &t;
        assert_eq!(d.scale(&t).anchor_apply(&t3).unwrap(), t3.scale(&q(3)));
        let h = Arc::new(LieRinehart::heisenberg());
        let c = CoeffFn::constant(0, q(7));
        assert!(Section::basis(&h, 0).anchor_apply(&c).unwrap().is_zero());
    }

    #[test]
    fn parent_mismatch() {
        let a = Arc::new(LieRinehart::tangent_line());
        let h = Arc::new(LieRinehart::heisenberg());
        let err = Section::basis(&a, 0).bracket(&Section::basis(&h, 0)).unwrap_err();
        assert_eq!(err, Error::ParentMismatch);
    }

    #[test]
    fn desk_models_pass() {
        for a in [LieRinehart::heisenberg(), LieRinehart::tangent_line(), LieRinehart::zero_over_line()] {
            let a = Arc::new(a);
            let rep = check_axioms(&a, &[], 7);
            assert!(rep.pass(), "{rep}");
        }
    }

    #[test]
    fn corrupted_table_fails() {
        let mut h = LieRinehart::heisenberg();
        h.bracket[1][0] = vec![CoeffFn::zero(0), CoeffFn::zero(0), CoeffFn::one(0)];
        let rep = check_axioms(&Arc::new(h), &[], 7);
        let fail = rep.first_failure().expect("must fail");
        assert_eq!(fail.name, "antisymmetry");
        assert!(fail.witness.as_ref().unwrap().contains("[X,Y]"));
    }
}
