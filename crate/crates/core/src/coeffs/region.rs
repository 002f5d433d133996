//! Finite unions of open rational boxes, and charts.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::number::{ExpNum, Q};

/// Open interval with optional rational endpoints (`None` is infinite).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Interval {
    pub lo: Option<Q>,
    pub hi: Option<Q>,
}

impl Interval {
    pub fn whole() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn new(lo: Option<Q>, hi: Option<Q>) -> Self {
        Interval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(a), Some(b)) if a >= b)
    }

    pub fn contains(&self, x: &ExpNum) -> bool {
        let above = match &self.lo {
            None => true,
            Some(a) => x.cmp_value(&ExpNum::rational(a.clone())) == Ordering::Greater,
        };
        let below = match &self.hi {
            None => true,
            Some(b) => x.cmp_value(&ExpNum::rational(b.clone())) == Ordering::Less,
        };
        above && below
    }

    pub fn contains_q(&self, x: &Q) -> bool {
        self.lo.as_ref().is_none_or(|a| x > a) && self.hi.as_ref().is_none_or(|b| x < b)
    }

    pub fn intersect(&self, o: &Interval) -> Interval {
        let lo = match (&self.lo, &o.lo) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            (a, b) => a.clone().or(b.clone()),
        };
        let hi = match (&self.hi, &o.hi) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (a, b) => a.clone().or(b.clone()),
        };
        Interval { lo, hi }
    }

    /// A rational point inside a nonempty interval.
    pub fn sample(&self) -> Q {
        use num_traits::One;
        match (&self.lo, &self.hi) {
            (None, None) => Q::from_integer(0.into()),
            (Some(a), None) => a + Q::one(),
            (None, Some(b)) => b - Q::one(),
            (Some(a), Some(b)) => (a + b) / Q::from_integer(2.into()),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lo.as_ref().map_or("-inf".to_string(), Q::to_string);
        let hi = self.hi.as_ref().map_or("inf".to_string(), Q::to_string);
        write!(f, "({lo}, {hi})")
    }
}

/// Finite union of open boxes in ℝ^dim. A 0-dimensional region is either
/// the point (one empty box) or empty.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Region {
    dim: usize,
    boxes: Vec<Vec<Interval>>,
}

impl Region {
    pub fn whole(dim: usize) -> Self {
        Region {
            dim,
            boxes: vec![vec![Interval::whole(); dim]],
        }
    }

    pub fn empty(dim: usize) -> Self {
        Region { dim, boxes: vec![] }
    }

    pub fn interval(lo: Option<Q>, hi: Option<Q>) -> Self {
        Region::from_intervals(vec![Interval::new(lo, hi)])
    }

    /// One-dimensional region from a list of intervals.
    pub fn from_intervals(ivs: Vec<Interval>) -> Self {
        Region::from_boxes(1, ivs.into_iter().map(|i| vec![i]).collect())
    }

    pub fn from_boxes(dim: usize, boxes: Vec<Vec<Interval>>) -> Self {
        let mut r = Region { dim, boxes };
        r.normalize();
        r
    }

    fn normalize(&mut self) {
        self.boxes.retain(|b| b.iter().all(|i| !i.is_empty()));
        if self.dim == 1 {
            self.boxes.sort_by(|a, b| cmp_lo(&a[0].lo, &b[0].lo));
            let mut merged: Vec<Vec<Interval>> = Vec::new();
            for b in self.boxes.drain(..) {
                if let Some(last) = merged.last_mut() {
                    let overlap = match (&last[0].hi, &b[0].lo) {
                        (None, _) | (_, None) => true,
                        (Some(h), Some(l)) => l < h,
                    };
                    if overlap {
                        let hi = match (&last[0].hi, &b[0].hi) {
                            (Some(a), Some(c)) => Some(a.max(c).clone()),
                            _ => None,
                        };
                        last[0].hi = hi;
                        continue;
                    }
                }
                merged.push(b);
            }
            self.boxes = merged;
        } else {
            self.boxes.dedup();
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[Vec<Interval>] {
        &self.boxes
    }

    /// Intervals of a one-dimensional region.
    pub fn intervals(&self) -> Vec<Interval> {
        assert_eq!(self.dim, 1);
        self.boxes.iter().map(|b| b[0].clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.boxes.len() == 1 && self.boxes[0].iter().all(|i| i.lo.is_none() && i.hi.is_none())
    }

    pub fn contains(&self, x: &[ExpNum]) -> bool {
        x.len() == self.dim && self.boxes.iter().any(|b| b.iter().zip(x).all(|(i, xi)| i.contains(xi)))
    }

    pub fn contains_q(&self, x: &[Q]) -> bool {
        x.len() == self.dim && self.boxes.iter().any(|b| b.iter().zip(x).all(|(i, xi)| i.contains_q(xi)))
    }

    pub fn intersect(&self, o: &Region) -> Region {
        assert_eq!(self.dim, o.dim);
        let mut boxes = Vec::new();
        for a in &self.boxes {
            for b in &o.boxes {
                boxes.push(a.iter().zip(b).map(|(x, y)| x.intersect(y)).collect());
            }
        }
        Region::from_boxes(self.dim, boxes)
    }

    pub fn union(&self, o: &Region) -> Region {
        assert_eq!(self.dim, o.dim);
        Region::from_boxes(self.dim, self.boxes.iter().chain(&o.boxes).cloned().collect())
    }

    /// Finite endpoints of a one-dimensional region, sorted.
    pub fn endpoints(&self) -> Vec<Q> {
        let mut v: Vec<Q> = self
            .boxes
            .iter()
            .flat_map(|b| [b[0].lo.clone(), b[0].hi.clone()])
            .flatten()
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Image of a one-dimensional region under a strictly monotone map of
    /// ℝ onto ℝ, given by its action on finite endpoints.
    pub fn map_monotone(&self, increasing: bool, f: impl Fn(&Q) -> Option<Q>) -> Result<Region> {
        assert_eq!(self.dim, 1);
        let mut out = Vec::new();
        for b in &self.boxes {
            let map = |e: &Option<Q>| -> Result<Option<Q>> {
                match e {
                    None => Ok(None),
                    Some(x) => f(x).map(Some).ok_or_else(|| {
                        Error::UnsupportedComposition(format!("image of the endpoint {x} is not rational"))
                    }),
                }
            };
            let (lo, hi) = (map(&b[0].lo)?, map(&b[0].hi)?);
            out.push(if increasing { Interval::new(lo, hi) } else { Interval::new(hi, lo) });
        }
        Ok(Region::from_intervals(out))
    }
}

fn cmp_lo(a: &Option<Q>, b: &Option<Q>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, _) => Ordering::Less,
        (_, None) => Ordering::Greater,
        (Some(x), Some(y)) => x.cmp(y),
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 0 {
            return write!(f, "{}", if self.is_empty() { "{}" } else { "pt" });
        }
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self
            .boxes
            .iter()
            .map(|b| b.iter().map(Interval::to_string).collect::<Vec<_>>().join("x"))
            .collect();
        write!(f, "{}", parts.join(" u "))
    }
}

/// A coordinate chart: a region of ℝ^dim with named coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Chart {
    pub name: String,
    pub domain: Region,
    pub vars: Vec<String>,
}

impl Chart {
    pub fn new(name: &str, vars: &[&str]) -> Self {
        Chart {
            name: name.to_string(),
            domain: Region::whole(vars.len()),
            vars: vars.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn point(name: &str) -> Self {
        Chart::new(name, &[])
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn check_point(&self, x: &[ExpNum]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::ChartMismatch(format!(
                "point of dimension {} on chart {} of dimension {}",
                x.len(),
                self.name,
                self.dim()
            )));
        }
        if !self.domain.contains(x) {
            let coords: Vec<String> = x.iter().map(|c| c.to_string()).collect();
            return Err(Error::DomainError(format!("({}) not in {}", coords.join(", "), self.domain)));
        }
        Ok(())
    }

    pub fn eval(&self, f: &super::CoeffFn, x: &[ExpNum]) -> Result<ExpNum> {
        self.check_point(x)?;
        f.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{q, rational_point};

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(Some(q(a)), Some(q(b)))
    }

    #[test]
    fn touching_open_intervals_do_not_merge() {
        let r = Region::from_intervals(vec![iv(1, 2), iv(0, 1)]);
        assert_eq!(r.intervals(), vec![iv(0, 1), iv(1, 2)]);
        assert!(!r.contains_q(&[q(1)]));
        let r = Region::from_intervals(vec![iv(0, 2), iv(1, 3)]);
        assert_eq!(r.intervals(), vec![iv(0, 3)]);
    }

    #[test]
    fn intersection_of_unions() {
        let a = Region::from_intervals(vec![iv(-2, -1), iv(1, 2)]);
        let b = Region::interval(Some(q(0)), None);
        assert_eq!(a.intersect(&b).intervals(), vec![iv(1, 2)]);
        assert!(a.intersect(&Region::interval(Some(q(5)), None)).is_empty());
    }

    #[test]
    fn monotone_image() {
        let a = Region::from_intervals(vec![iv(-2, -1), iv(1, 2)]);
        let img = a.map_monotone(false, |x| Some(-x)).unwrap();
        assert_eq!(img, Region::from_intervals(vec![iv(-2, -1), iv(1, 2)]));
        let img = Region::whole(1).map_monotone(true, |x| Some(x * q(2))).unwrap();
        assert!(img.is_whole());
    }

    #[test]
    fn chart_domain_check() {
        let mut c = Chart::new("M", &["t"]);
        c.domain = Region::interval(Some(q(0)), Some(q(1)));
        assert!(c.check_point(&rational_point(&[q(2)])).is_err());
        assert!(c.check_point(&rational_point(&[q(0)])).is_err());
        assert!(Chart::point("pt").check_point(&[]).is_ok());
    }
}
