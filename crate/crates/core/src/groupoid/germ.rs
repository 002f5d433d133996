use std::fmt;
use std::sync::Arc;

use super::{fmt_point, Bisection, GroupoidModel, Registry};
use crate::error::{Error, Result};
use crate::number::{ExpNum, Point};

/// The germ of a bisection at one of its arrows, recorded by the source
/// point of that arrow.
#[derive(Clone, Debug)]
pub struct GermArrow {
    pub bisection: Arc<Bisection>,
    pub source: Point,
}

impl GermArrow {
    pub fn new(bisection: Arc<Bisection>, source: Point) -> Result<Self> {
        if !bisection.domain.contains(&source) {
            return Err(Error::DomainError(format!(
                "{} is not in the domain {} of {}",
                fmt_point(&source),
                bisection.domain,
                bisection.id
            )));
        }
        Ok(GermArrow { bisection, source })
    }

    /// θ: the underlying arrow.
    pub fn theta(&self) -> Result<Point> {
        self.bisection.alpha_at(&self.source)
    }

    pub fn target(&self) -> Result<Point> {
        self.bisection.tau_at(&self.source)
    }

    /// Same arrow and germ-equal sections at the source.
    pub fn germ_eq(&self, other: &GermArrow) -> Result<bool> {
        if self.source != other.source || self.theta()? != other.theta()? {
            return Ok(false);
        }
        for (a, b) in self.bisection.alpha.iter().zip(&other.bisection.alpha) {
            if !a.germ_eq(b, &self.source)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// e'·e, computed through the product of representatives.
    pub fn mul(reg: &Registry, ep: &GermArrow, e: &GermArrow) -> Result<GermArrow> {
        let t = e.target()?;
        if ep.source != t {
            return Err(Error::NotComposable(format!(
                "germ at {} cannot follow a germ ending at {}",
                fmt_point(&ep.source),
                fmt_point(&t)
            )));
        }
        let prod = reg.mul(&ep.bisection.id, &e.bisection.id)?;
        GermArrow::new(prod, e.source.clone())
    }

    pub fn inv(reg: &Registry, e: &GermArrow) -> Result<GermArrow> {
        let inv = reg.inv(&e.bisection.id)?;
        GermArrow::new(inv, e.target()?)
    }

    pub fn unit(reg: &Registry, x: Point) -> Result<GermArrow> {
        GermArrow::new(reg.unit(), x)
    }
}

impl fmt::Display for GermArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "germ of {} at {}", self.bisection.id, fmt_point(&self.source))
    }
}

/// Germ classes at `g` among the bisections that contain `g`.
pub fn germ_fiber(model: &GroupoidModel, g: &[ExpNum], bisections: &[Arc<Bisection>]) -> Result<Vec<Vec<Arc<Bisection>>>> {
    let x = model.s_at(g);
    let mut classes: Vec<Vec<Arc<Bisection>>> = Vec::new();
    for b in bisections {
        if !b.contains_arrow(model, g) {
            continue;
        }
        let germ = GermArrow::new(b.clone(), x.clone())?;
        let mut placed = false;
        for class in classes.iter_mut() {
            let rep = GermArrow::new(class[0].clone(), x.clone())?;
            if rep.germ_eq(&germ)? {
                class.push(b.clone());
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
