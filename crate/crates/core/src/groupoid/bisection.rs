use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_traits::{Signed, Zero};

use super::{GroupoidModel, ModelKind};
use crate::coeffs::{CoeffFn, FlatFn, Poly, Region};
use crate::error::{Error, Result};
use crate::number::{q, ExpNum, Point, Q};

/// A local bisection, stored through its section `α` of the source map
/// over `domain = s(E)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bisection {
    pub id: String,
    pub domain: Region,
    pub target: Region,
    /// `α: s(E) → G`, functions on the base chart.
    pub alpha: Vec<CoeffFn>,
    /// `τ = t ∘ α`.
    pub tau: Vec<CoeffFn>,
    /// `τ^{-1}` when it is representable.
    pub tau_inv: Option<Vec<CoeffFn>>,
}

fn orientation(tau: &[CoeffFn]) -> Result<bool> {
    match tau.first() {
        None => Ok(true),
        Some(CoeffFn::Poly(p)) if p.degree() == 1 && p.nvars() == 1 => Ok(p.coeff(&[1]).is_positive()),
        Some(CoeffFn::Flat(f)) if f.is_increasing_diffeo() => Ok(true),
        Some(_) => Err(Error::Model("base map is not a supported diffeomorphism of the line".into())),
    }
}

fn eval_rational(f: &CoeffFn, x: &Q) -> Result<Q> {
    f.eval_q(std::slice::from_ref(x))?
        .as_rational()
        .ok_or_else(|| Error::UnsupportedComposition(format!("value at {x} is not rational")))
}

impl Bisection {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    fn increasing(&self) -> Result<bool> {
        orientation(&self.tau)
    }

    /// Image of a region of the base under `τ`.
    pub fn image(&self, r: &Region) -> Result<Region> {
        if self.dim() == 0 {
            return Ok(r.clone());
        }
        let r = r.intersect(&self.domain);
        let tau = &self.tau[0];
        r.map_monotone(self.increasing()?, |x| eval_rational(tau, x).ok())
    }

    /// `{x ∈ s(E) : τ(x) ∈ r}`.
    pub fn preimage(&self, r: &Region) -> Result<Region> {
        if self.dim() == 0 {
            return Ok(if r.is_empty() { Region::empty(0) } else { self.domain.clone() });
        }
        if r.is_whole() {
            return Ok(self.domain.clone());
        }
        let inv = |y: &Q| -> Option<Q> {
            match &self.tau_inv {
                Some(ti) => eval_rational(&ti[0], y).ok(),
                None => {
                    let zero = Q::zero();
                    (eval_rational(&self.tau[0], &zero).ok()? == *y).then_some(zero)
                }
            }
        };
        let pre = r.map_monotone(self.increasing()?, inv)?;
        Ok(pre.intersect(&self.domain))
    }

    pub fn alpha_at(&self, x: &[ExpNum]) -> Result<Point> {
        self.alpha.iter().map(|f| f.eval(x)).collect()
    }

    pub fn tau_at(&self, x: &[ExpNum]) -> Result<Point> {
        self.tau.iter().map(|f| f.eval(x)).collect()
    }

    /// Does the arrow `g` lie on the bisection?
    pub fn contains_arrow(&self, model: &GroupoidModel, g: &[ExpNum]) -> bool {
        let x = model.s_at(g);
        self.domain.contains(&x) && matches!(self.alpha_at(&x), Ok(a) if a == g)
    }

    /// `β = α ∘ τ^{-1}` on `t(E)`.
    pub fn beta(&self) -> Result<Vec<CoeffFn>> {
        let ti = self.tau_inv_or_err()?;
        self.alpha.iter().map(|a| a.compose(ti)).collect()
    }

    pub fn tau_inv_or_err(&self) -> Result<&Vec<CoeffFn>> {
        self.tau_inv
            .as_ref()
            .ok_or_else(|| Error::UnsupportedComposition(format!("the inverse of the base map of {} is not representable", self.id)))
    }

    /// The unit bisection over `domain`.
    pub fn unit(model: &GroupoidModel, id: &str, domain: Region) -> Self {
        let b = model.base_dim();
        let x: Vec<CoeffFn> = (0..b).map(|i| CoeffFn::var(b, i)).collect();
        let alpha = model.unit_fns(&x, b).expect("unit map is polynomial");
        Bisection {
            id: id.to_string(),
            target: domain.clone(),
            domain,
            alpha,
            tau: x.clone(),
            tau_inv: Some(x),
        }
    }

    /// Graph of a diffeomorphism of the line in the pair groupoid:
    /// `α(x) = (τ(x), x)`.
    pub fn pair_graph(id: &str, tau: CoeffFn, tau_inv: Option<CoeffFn>, domain: Region) -> Result<Self> {
        orientation(std::slice::from_ref(&tau))?;
        let mut b = Bisection {
            id: id.to_string(),
            target: Region::empty(1),
            alpha: vec![tau.clone(), CoeffFn::var(1, 0)],
            tau: vec![tau],
            tau_inv: tau_inv.map(|t| vec![t]),
            domain: domain.clone(),
        };
        b.target = b.image(&domain)?;
        Ok(b)
    }

    pub fn pair_affine(id: &str, slope: Q, offset: Q, domain: Region) -> Result<Self> {
        if slope.is_zero() {
            return Err(Error::Model(format!("bisection {id}: slope must be nonzero")));
        }
        let inv = Poly::affine(-(&offset / &slope), slope.recip());
        Bisection::pair_graph(id, Poly::affine(offset, slope).into(), Some(inv.into()), domain)
    }

    /// Graph of `t + 2^i φ(t)` (t ≤ 0), `t + 2^j φ(t)` (t ≥ 0).
    pub fn pair_kinked(id: &str, i: u32, j: u32) -> Result<Self> {
        Bisection::pair_graph(id, CoeffFn::flat(FlatFn::kinked_diffeo(i, j)), None, Region::whole(1))
    }

    /// A group element of the Heisenberg model.
    pub fn group_element(id: &str, k: [Q; 3]) -> Self {
        Bisection {
            id: id.to_string(),
            domain: Region::whole(0),
            target: Region::whole(0),
            alpha: k.iter().map(|c| CoeffFn::constant(0, c.clone())).collect(),
            tau: vec![],
            tau_inv: Some(vec![]),
        }
    }

    /// Sheet `{(m, c, x) : x ∈ domain}` of the affine action groupoid.
    pub fn etale_sheet(id: &str, m: Q, c: Q, domain: Region) -> Result<Self> {
        if m.is_zero() {
            return Err(Error::Model(format!("bisection {id}: label m must be nonzero")));
        }
        let tau = Poly::affine(c.clone(), m.clone());
        let inv = Poly::affine(-(&c / &m), m.recip());
        let mut b = Bisection {
            id: id.to_string(),
            target: Region::empty(1),
            alpha: vec![CoeffFn::constant(1, m), CoeffFn::constant(1, c), CoeffFn::var(1, 0)],
            tau: vec![tau.into()],
            tau_inv: Some(vec![inv.into()]),
            domain: domain.clone(),
        };
        b.target = b.image(&domain)?;
        Ok(b)
    }

    /// `E'·E`.
    pub fn mul(model: &GroupoidModel, ep: &Bisection, e: &Bisection, id: String) -> Result<Bisection> {
        let domain = e.preimage(&ep.domain.intersect(&e.target))?;
        let alpha_p = ep
            .alpha
            .iter()
            .map(|a| a.compose(&e.tau))
            .collect::<Result<Vec<_>>>()?;
        let alpha = model.mult_fns(&alpha_p, &e.alpha)?;
        let tau = ep.tau.iter().map(|f| f.compose(&e.tau)).collect::<Result<Vec<_>>>()?;
        let tau_inv = match (&e.tau_inv, &ep.tau_inv) {
            (Some(a), Some(b)) => Some(a.iter().map(|f| f.compose(b)).collect::<Result<Vec<_>>>()?),
            _ => None,
        };
        let mut out = Bisection {
            id,
            domain: domain.clone(),
            target: Region::empty(domain.dim()),
            alpha,
            tau,
            tau_inv,
        };
        out.target = if domain.is_empty() { Region::empty(domain.dim()) } else { out.image(&domain)? };
        Ok(out)
    }

    /// `E^{-1}`: α_{E^{-1}} = inv ∘ β_E on t(E).
    pub fn inv(model: &GroupoidModel, e: &Bisection, id: String) -> Result<Bisection> {
        let beta = e.beta()?;
        let alpha = model.inv_fns(&beta)?;
        Ok(Bisection {
            id,
            domain: e.target.clone(),
            target: e.domain.clone(),
            alpha,
            tau: e.tau_inv.clone().unwrap(),
            tau_inv: Some(e.tau.clone()),
        })
    }
}

struct Inner {
    order: Vec<Arc<Bisection>>,
    by_id: HashMap<String, Arc<Bisection>>,
    by_content: HashMap<(Vec<CoeffFn>, Region), String>,
    declared: usize,
}

/// Append-only store of bisections. Products and inverses are interned by
/// content, so equal bisections share one id.
pub struct Registry {
    pub model: Arc<GroupoidModel>,
    inner: RwLock<Inner>,
}

pub const UNIT_ID: &str = "1";

impl Registry {
    pub fn new(model: GroupoidModel) -> Self {
        let model = Arc::new(model);
        let reg = Registry {
            inner: RwLock::new(Inner {
                order: Vec::new(),
                by_id: HashMap::new(),
                by_content: HashMap::new(),
                declared: 0,
            }),
            model: model.clone(),
        };
        let unit = Bisection::unit(&model, UNIT_ID, Region::whole(model.base_dim()));
        reg.insert(unit).expect("fresh registry");
        reg
    }

    /// Register a user bisection.
    pub fn insert(&self, b: Bisection) -> Result<Arc<Bisection>> {
        let mut inner = self.inner.write().unwrap();
        if let Some(old) = inner.by_id.get(&b.id) {
            if **old == b {
                return Ok(old.clone());
            }
            return Err(Error::Model(format!("bisection id `{}` registered twice", b.id)));
        }
        let b = Arc::new(b);
        inner.by_id.insert(b.id.clone(), b.clone());
        inner
            .by_content
            .entry((b.alpha.clone(), b.domain.clone()))
            .or_insert_with(|| b.id.clone());
        inner.order.push(b.clone());
        inner.declared = inner.order.len();
        Ok(b)
    }

    fn intern(&self, b: Bisection) -> Arc<Bisection> {
        let mut inner = self.inner.write().unwrap();
        let key = (b.alpha.clone(), b.domain.clone());
        if let Some(id) = inner.by_content.get(&key) {
            return inner.by_id[id].clone();
        }
        if let Some(old) = inner.by_id.get(&b.id) {
            return old.clone();
        }
        let b = Arc::new(b);
        inner.by_id.insert(b.id.clone(), b.clone());
        inner.by_content.insert(key, b.id.clone());
        inner.order.push(b.clone());
        b
    }

    pub fn get(&self, id: &str) -> Result<Arc<Bisection>> {
        self.inner
            .read()
            .unwrap()
            .by_id
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownBisection(id.to_string()))
    }

    pub fn unit(&self) -> Arc<Bisection> {
        self.get(UNIT_ID).unwrap()
    }

    /// Bisections registered directly (the unit and user declarations), in
    /// registration order.
    pub fn declared(&self) -> Vec<Arc<Bisection>> {
        let inner = self.inner.read().unwrap();
        inner.order[..inner.declared].to_vec()
    }

    /// All bisections including interned products and inverses.
    pub fn all(&self) -> Vec<Arc<Bisection>> {
        self.inner.read().unwrap().order.clone()
    }

    pub fn mul(&self, ep: &str, e: &str) -> Result<Arc<Bisection>> {
        let (a, b) = (self.get(ep)?, self.get(e)?);
        let id = if a.id == UNIT_ID {
            b.id.clone()
        } else if b.id == UNIT_ID {
            a.id.clone()
        } else {
            format!("{}·{}", a.id, b.id)
        };
        let prod = Bisection::mul(&self.model, &a, &b, id)?;
        if prod.is_empty() {
            return Ok(Arc::new(Bisection { id: "0".into(), ..prod }));
        }
        let unit_like = prod.alpha == self.unit().alpha;
        let prod = if unit_like && prod.id != UNIT_ID {
            let id = if prod.domain.is_whole() { UNIT_ID.to_string() } else { format!("1|{}", prod.domain) };
            Bisection { id, ..prod }
        } else {
            prod
        };
        Ok(self.intern(prod))
    }

    pub fn inv(&self, e: &str) -> Result<Arc<Bisection>> {
        let b = self.get(e)?;
        if b.id == UNIT_ID {
            return Ok(b);
        }
        let id = inverse_name(&b.id);
        let inv = Bisection::inv(&self.model, &b, id)?;
        Ok(self.intern(inv))
    }

    /// Restriction of the unit bisection to `domain`.
    pub fn unit_on(&self, domain: &Region) -> Arc<Bisection> {
        if domain.is_whole() {
            return self.unit();
        }
        let id = format!("1|{domain}");
        self.intern(Bisection::unit(&self.model, &id, domain.clone()))
    }

    pub fn kind(&self) -> ModelKind {
        self.model.kind
    }
}

fn inverse_name(id: &str) -> String {
    let atoms: Vec<String> = id
        .split('·')
        .rev()
        .map(|a| match a.strip_suffix("^-1") {
            Some(base) => base.to_string(),
            None => format!("{a}^-1"),
        })
        .collect();
    atoms.join("·")
}

/// The standard bisection families used by the suites and demos.
impl Registry {
    /// Pair groupoid with affine graphs.
    pub fn pair_standard() -> Self {
        let reg = Registry::new(GroupoidModel::pair());
        for (id, a, b) in [("T1", q(1), q(1)), ("D2", q(2), q(0)), ("A3", q(-1), q(3)), ("H", crate::number::qr(1, 2), q(-1))] {
            reg.insert(Bisection::pair_affine(id, a, b, Region::whole(1)).unwrap()).unwrap();
        }
        reg
    }

    /// Pair groupoid with the four kinked graphs through the origin.
    pub fn pair_kinked() -> Self {
        let reg = Registry::new(GroupoidModel::pair());
        for i in 0..2 {
            for j in 0..2 {
                reg.insert(Bisection::pair_kinked(&format!("E{i}{j}"), i, j).unwrap()).unwrap();
            }
        }
        reg
    }

    pub fn heisenberg_standard() -> Self {
        let reg = Registry::new(GroupoidModel::heisenberg());
        let elems = [
            ("kX", [q(1), q(0), q(0)]),
            ("kY", [q(0), q(1), q(0)]),
            ("kZ", [q(0), q(0), q(1)]),
            ("k1", [q(1), q(-2), crate::number::qr(1, 2)]),
            ("k2", [q(-1), q(3), q(2)]),
        ];
        for (id, k) in elems {
            reg.insert(Bisection::group_element(id, k)).unwrap();
        }
        reg
    }

    /// Affine action groupoid; `S` lives on a disconnected domain.
    pub fn etale_standard() -> Self {
        use crate::coeffs::Interval;
        let reg = Registry::new(GroupoidModel::etale());
        let whole = Region::whole(1);
        reg.insert(Bisection::etale_sheet("T", q(1), q(1), whole.clone()).unwrap()).unwrap();
        reg.insert(Bisection::etale_sheet("D", q(2), q(0), whole.clone()).unwrap()).unwrap();
        reg.insert(Bisection::etale_sheet("R", q(-1), q(0), whole.clone()).unwrap()).unwrap();
        let split = Region::from_intervals(vec![
            Interval::new(Some(q(-2)), Some(q(-1))),
            Interval::new(Some(q(1)), Some(q(2))),
        ]);
        reg.insert(Bisection::etale_sheet("S", q(1), q(1), split).unwrap()).unwrap();
        reg
    }

    pub fn standard(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Pair => Registry::pair_standard(),
            ModelKind::Heisenberg => Registry::heisenberg_standard(),
            ModelKind::Etale => Registry::etale_standard(),
        }
    }
}
