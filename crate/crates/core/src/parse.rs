//! Text forms: coefficient functions, enveloping-algebra elements,
//! convolution elements `<u | E>`, distributions `[[E, u]]`, and the
//! expressions accepted by `gconv eval`.
//!
//! ```text
//! expr    := call | conv | dist
//! call    := conv_mul(expr, expr) | dist_mul(expr, expr) | phi(expr)
//!          | kernel_test(expr) | dist_eval(expr, coeff, point)
//! conv    := "0" | "<" uea "|" id ">" (("+" | "-") "<" uea "|" id ">")*
//! dist    := "[[" id "," uea "]]" (("+" | "-") "[[" id "," uea "]]")*
//! point   := number | "(" number ("," number)* ")"
//! ```
//!
//! Coefficients and enveloping-algebra elements are sums of products of
//! rationals, chart variables, frame generators, parenthesised
//! subexpressions and `piecewise(left, right)` flat functions whose
//! branches may contain `exp(-m/t^2)`. Juxtaposition multiplies.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::coeffs::{CoeffFn, FlatFn, FlatSeries, Poly, Region};
use crate::conv::ConvElement;
use crate::dist::TransvDist;
use crate::error::{Error, Result};
use crate::groupoid::{Bisection, Registry, UNIT_ID};
use crate::lie_rinehart::LieRinehart;
use crate::number::{ExpNum, Point, Q};
use crate::phi::{kernel_test, phi, KernelResult};
use crate::uea::UEAElement;

/// Value of an `eval` expression.
#[derive(Clone, Debug)]
pub enum Value {
    Conv(ConvElement),
    Dist(TransvDist),
    Number(ExpNum),
    Kernel(KernelResult),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Conv(a) => write!(f, "{a}"),
            Value::Dist(t) => write!(f, "{t}"),
            Value::Number(x) => write!(f, "{x}"),
            Value::Kernel(k) => match &k.witness {
                None => write!(f, "in kernel"),
                Some(w) => write!(f, "not in kernel: {} at arrow {} over {{{}}} sums to {}", w.stratum, w.arrow, w.germ_class.join(", "), w.sum),
            },
        }
    }
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Conv(_) => "conv",
            Value::Dist(_) => "dist",
            Value::Number(_) => "number",
            Value::Kernel(_) => "kernel",
        }
    }
}

/// Arithmetic the expression parser builds values in.
trait Alg: Sized + Clone {
    fn constant(&self, c: Q) -> Self;
    fn ident(&self, name: &str) -> Option<Self>;
    fn add(&self, o: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Result<Self>;
    /// Integer powers; negative exponents only where the algebra allows.
    fn pow(&self, n: i64) -> Option<Self>;
    fn call(&self, p: &mut Parser<'_>, name: &str, pos: usize) -> Option<Result<Self>>;
}

/// Coefficient functions on a chart.
#[derive(Clone)]
struct Coeff {
    vars: Arc<Vec<String>>,
    f: CoeffFn,
}

impl Alg for Coeff {
    fn constant(&self, c: Q) -> Self {
        Coeff { vars: self.vars.clone(), f: CoeffFn::constant(self.vars.len(), c) }
    }
    fn ident(&self, name: &str) -> Option<Self> {
        let i = self.vars.iter().position(|v| v == name)?;
        Some(Coeff { vars: self.vars.clone(), f: CoeffFn::var(self.vars.len(), i) })
    }
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(Coeff { vars: self.vars.clone(), f: &self.f + &o.f })
    }
    fn neg(&self) -> Self {
        Coeff { vars: self.vars.clone(), f: -&self.f }
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(Coeff { vars: self.vars.clone(), f: &self.f * &o.f })
    }
    fn pow(&self, n: i64) -> Option<Self> {
        if n < 0 {
            return None;
        }
        let mut acc = self.constant(Q::one());
        for _ in 0..n {
            acc = acc.mul(self).ok()?;
        }
        Some(acc)
    }
    fn call(&self, p: &mut Parser<'_>, name: &str, pos: usize) -> Option<Result<Self>> {
        (name == "piecewise").then(|| {
            let f = p.piecewise(&self.vars, pos)?;
            Ok(Coeff { vars: self.vars.clone(), f })
        })
    }
}

/// Enveloping-algebra elements.
#[derive(Clone)]
struct Uea {
    parent: Arc<LieRinehart>,
    u: UEAElement,
}

impl Uea {
    fn wrap(&self, u: UEAElement) -> Self {
        Uea { parent: self.parent.clone(), u }
    }
}

impl Alg for Uea {
    fn constant(&self, c: Q) -> Self {
        self.wrap(UEAElement::one(&self.parent).scale(&c))
    }
    fn ident(&self, name: &str) -> Option<Self> {
        let n = self.parent.dim();
        if let Some(i) = self.parent.chart.vars.iter().position(|v| v == name) {
            return Some(self.wrap(UEAElement::from_fn(&self.parent, CoeffFn::var(n, i))));
        }
        let i = self.parent.basis.iter().position(|b| b == name)?;
        Some(self.wrap(UEAElement::generator(&self.parent, i)))
    }
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(self.wrap(self.u.add(&o.u)?))
    }
    fn neg(&self) -> Self {
        self.wrap(self.u.neg())
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(self.wrap(self.u.mul(&o.u)?))
    }
    fn pow(&self, n: i64) -> Option<Self> {
        (n >= 0).then(|| self.wrap(self.u.pow(n as u32)))
    }
    fn call(&self, p: &mut Parser<'_>, name: &str, pos: usize) -> Option<Result<Self>> {
        (name == "piecewise").then(|| {
            let f = p.piecewise(&self.parent.chart.vars, pos)?;
            Ok(self.wrap(UEAElement::from_fn(&self.parent, f)))
        })
    }
}

/// One branch of a flat function: `Σ c t^n e^{-m/t²}`, keyed by `(m, n)`.
#[derive(Clone)]
struct Side {
    var: Arc<String>,
    terms: BTreeMap<(Q, i64), Q>,
}

impl Side {
    fn single(&self, m: Q, n: i64, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((m, n), c);
        }
        Side { var: self.var.clone(), terms }
    }
}

impl Alg for Side {
    fn constant(&self, c: Q) -> Self {
        self.single(Q::zero(), 0, c)
    }
    fn ident(&self, name: &str) -> Option<Self> {
        (name == self.var.as_str()).then(|| self.single(Q::zero(), 1, Q::one()))
    }
    fn add(&self, o: &Self) -> Result<Self> {
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            let e = terms.entry(k.clone()).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        Ok(Side { var: self.var.clone(), terms })
    }
    fn neg(&self) -> Self {
        Side { var: self.var.clone(), terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        let mut acc = self.constant(Q::zero());
        for ((m1, n1), c1) in &self.terms {
            for ((m2, n2), c2) in &o.terms {
                acc = acc.add(&self.single(m1 + m2, n1 + n2, c1 * c2))?;
            }
        }
        Ok(acc)
    }
    fn pow(&self, n: i64) -> Option<Self> {
        if self.terms.len() == 1 {
            let ((m, k), c) = self.terms.iter().next()?;
            if n < 0 && !m.is_zero() {
                return None;
            }
            let c = if n >= 0 { num_traits::pow(c.clone(), n as usize) } else { num_traits::pow(c.recip(), (-n) as usize) };
            return Some(self.single(m * Q::from_integer(n.into()), k * n, c));
        }
        if n < 0 {
            return None;
        }
        let mut acc = self.constant(Q::one());
        for _ in 0..n {
            acc = acc.mul(self).ok()?;
        }
        Some(acc)
    }
    fn call(&self, p: &mut Parser<'_>, name: &str, pos: usize) -> Option<Result<Self>> {
        (name == "exp").then(|| {
            // exp(-m/t^2) with m a rational, possibly parenthesised
            p.expect('(')?;
            p.expect('-')?;
            let m = if p.eat('(') {
                let m = p.rational()?;
                p.expect(')')?;
                m
            } else {
                p.rational_numerator()?
            };
            p.expect('/')?;
            let v = p.ident()?;
            if v != *self.var {
                return Err(p.err_at(pos, format!("exp argument must be over {}", self.var)));
            }
            p.expect('^')?;
            let two = p.integer()?;
            p.expect(')')?;
            if two != 2 || !m.is_positive() {
                return Err(p.err_at(pos, "expected exp(-m/t^2) with m > 0"));
            }
            Ok(self.single(m, 0, Q::one()))
        })
    }
}

pub struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err_at(&self, pos: usize, msg: impl Into<String>) -> Error {
        Error::Parse { pos, msg: msg.into() }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        self.err_at(self.pos, msg)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let t = self.rest();
        self.pos += t.len() - t.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map(|c| format!("`{c}`")).unwrap_or_else(|| "end of input".into());
            Err(self.err(format!("expected `{c}`, found {found}")))
        }
    }

    pub fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let t = self.rest();
        let len = t
            .char_indices()
            .find(|(i, c)| !(c.is_alphanumeric() || *c == '_') || (*i == 0 && c.is_ascii_digit()))
            .map(|(i, _)| i)
            .unwrap_or(t.len());
        if len == 0 {
            return Err(self.err("expected a name"));
        }
        self.pos += len;
        Ok(t[..len].to_string())
    }

    fn peek_ident(&mut self) -> Option<String> {
        let save = self.pos;
        let out = self.ident().ok();
        self.pos = save;
        out
    }

    fn natural(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let t = self.rest();
        let len = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
        if len == 0 {
            return Err(self.err("expected a number"));
        }
        self.pos += len;
        Ok(t[..len].parse().expect("digits"))
    }

    fn integer(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        let n = self.natural()?;
        let n: i64 = n.try_into().map_err(|_| self.err("exponent too large"))?;
        Ok(if neg { -n } else { n })
    }

    /// `p` or `p/q`, optionally signed.
    fn rational(&mut self) -> Result<Q> {
        let neg = self.eat('-');
        let n = self.rational_numerator()?;
        let save = self.pos;
        let out = if self.eat('/') {
            match self.natural() {
                Ok(d) if !d.is_zero() => n / Q::from_integer(d),
                Ok(_) => return Err(self.err("division by zero")),
                Err(_) => {
                    self.pos = save;
                    n
                }
            }
        } else {
            n
        };
        Ok(if neg { -out } else { out })
    }

    fn rational_numerator(&mut self) -> Result<Q> {
        Ok(Q::from_integer(self.natural()?))
    }

    fn sum<A: Alg>(&mut self, ctx: &A) -> Result<A> {
        let mut acc = if self.eat('-') { self.product(ctx)?.neg() } else { self.product(ctx)? };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.product(ctx)?)?;
            } else if self.peek() == Some('-') {
                self.pos += 1;
                acc = acc.add(&self.product(ctx)?.neg())?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c == '(' || c.is_alphanumeric())
    }

    fn product<A: Alg>(&mut self, ctx: &A) -> Result<A> {
        let mut acc = self.power(ctx)?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power(ctx)?)?;
            } else if self.peek() == Some('/') {
                let pos = self.pos;
                self.pos += 1;
                let d = self.rational()?;
                if d.is_zero() {
                    return Err(self.err_at(pos, "division by zero"));
                }
                acc = acc.mul(&ctx.constant(d.recip()))?;
            } else if self.starts_factor() {
                acc = acc.mul(&self.power(ctx)?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power<A: Alg>(&mut self, ctx: &A) -> Result<A> {
        let base = self.atom(ctx)?;
        if self.eat('^') {
            let pos = self.pos;
            let n = self.integer()?;
            return base.pow(n).ok_or_else(|| self.err_at(pos, format!("exponent {n} not allowed here")));
        }
        Ok(base)
    }

    fn atom<A: Alg>(&mut self, ctx: &A) -> Result<A> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.sum(ctx)?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok(ctx.constant(self.rational_numerator()?)),
            Some(c) if c.is_alphabetic() => {
                let pos = self.pos;
                let name = self.ident()?;
                if self.peek() == Some('(') {
                    if let Some(v) = ctx.call(self, &name, pos) {
                        return v;
                    }
                }
                ctx.ident(&name).ok_or_else(|| self.err_at(pos, format!("unknown name `{name}`")))
            }
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    /// `piecewise(left, right)` on a one-dimensional chart.
    fn piecewise(&mut self, vars: &[String], pos: usize) -> Result<CoeffFn> {
        if vars.len() != 1 {
            return Err(self.err_at(pos, "flat functions need a one-dimensional chart"));
        }
        let ctx = Side { var: Arc::new(vars[0].clone()), terms: BTreeMap::new() };
        self.expect('(')?;
        let neg = self.sum(&ctx)?;
        self.expect(',')?;
        let pos_side = self.sum(&ctx)?;
        self.expect(')')?;
        let split = |s: &Side| -> Result<(Poly, FlatSeries)> {
            let mut p = Poly::zero(1);
            let mut series = FlatSeries::zero();
            for ((m, n), c) in &s.terms {
                if m.is_zero() {
                    if *n < 0 {
                        return Err(self.err_at(pos, "negative power outside a flat term"));
                    }
                    p.add_term(vec![*n as u32], c.clone());
                } else {
                    series.add_term(m.clone(), *n as i32, c.clone());
                }
            }
            Ok((p, series))
        };
        let (p_neg, s_neg) = split(&neg)?;
        let (p_pos, s_pos) = split(&pos_side)?;
        if p_neg != p_pos {
            return Err(self.err_at(pos, "branches differ in their polynomial part"));
        }
        Ok(CoeffFn::flat(FlatFn::new(p_neg, s_neg, s_pos)))
    }

    pub fn coeff(&mut self, vars: &[String]) -> Result<CoeffFn> {
        let ctx = Coeff { vars: Arc::new(vars.to_vec()), f: CoeffFn::zero(vars.len()) };
        Ok(self.sum(&ctx)?.f)
    }

    pub fn uea(&mut self, parent: &Arc<LieRinehart>) -> Result<UEAElement> {
        let ctx = Uea { parent: parent.clone(), u: UEAElement::zero(parent) };
        Ok(self.sum(&ctx)?.u)
    }

    /// Raw text up to `stop` at bracket depth zero.
    fn raw_until(&mut self, stops: &[&str]) -> Result<String> {
        self.skip_ws();
        let t = self.rest();
        let mut depth = 0i32;
        for (i, c) in t.char_indices() {
            if depth == 0 && stops.iter().any(|s| t[i..].starts_with(s)) {
                let out = t[..i].trim().to_string();
                if out.is_empty() {
                    return Err(self.err("expected a bisection id"));
                }
                self.pos += i;
                return Ok(out);
            }
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                _ => {}
            }
        }
        Err(self.err(format!("unterminated term, expected `{}`", stops[0])))
    }

    fn bisection(&mut self, reg: &Registry, stops: &[&str]) -> Result<Arc<Bisection>> {
        self.skip_ws();
        let pos = self.pos;
        let id = self.raw_until(stops)?;
        resolve_bisection(reg, &id).map_err(|e| match e {
            Error::UnknownBisection(id) => self.err_at(pos, format!("unknown bisection `{id}`")),
            e => e,
        })
    }

    /// One `<u | E>` term.
    fn conv_term(&mut self, reg: &Arc<Registry>) -> Result<ConvElement> {
        self.expect('<')?;
        let u = self.uea(&reg.model.lie)?;
        self.expect('|')?;
        let b = self.bisection(reg, &[">"])?;
        self.expect('>')?;
        ConvElement::term(reg, u, &b.id)
    }

    pub fn conv(&mut self, reg: &Arc<Registry>) -> Result<ConvElement> {
        if self.peek() == Some('0') {
            self.pos += 1;
            return Ok(ConvElement::zero(reg));
        }
        let mut acc = self.conv_term(reg)?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.conv_term(reg)?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.conv_term(reg)?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn dist_term(&mut self, reg: &Arc<Registry>) -> Result<TransvDist> {
        if !self.eat_str("[[") {
            return Err(self.err("expected `[[`"));
        }
        let b = self.bisection(reg, &[","])?;
        self.expect(',')?;
        let u = self.uea(&reg.model.lie)?;
        if !self.eat_str("]]") {
            return Err(self.err("expected `]]`"));
        }
        TransvDist::term(reg, &b.id, u)
    }

    pub fn dist(&mut self, reg: &Arc<Registry>) -> Result<TransvDist> {
        if self.peek() == Some('0') {
            self.pos += 1;
            return Ok(TransvDist::zero(reg));
        }
        let mut acc = self.dist_term(reg)?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.dist_term(reg)?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.dist_term(reg)?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn point(&mut self, dim: usize) -> Result<Point> {
        let pos = self.pos;
        let coords = if self.eat('(') {
            let mut v = Vec::new();
            if !self.eat(')') {
                loop {
                    v.push(self.rational()?);
                    if self.eat(')') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
            v
        } else {
            vec![self.rational()?]
        };
        if coords.len() != dim {
            return Err(self.err_at(pos, format!("expected a point with {dim} coordinates")));
        }
        Ok(coords.into_iter().map(ExpNum::rational).collect())
    }

    pub fn expr(&mut self, reg: &Arc<Registry>) -> Result<Value> {
        match self.peek() {
            Some('<') | Some('0') => return Ok(Value::Conv(self.conv(reg)?)),
            Some('[') => return Ok(Value::Dist(self.dist(reg)?)),
            _ => {}
        }
        let pos = self.pos;
        let name = self.peek_ident().ok_or_else(|| self.err("expected an expression"))?;
        self.ident()?;
        self.expect('(')?;
        let out = match name.as_str() {
            "conv_mul" => {
                let a = self.conv_arg(reg)?;
                self.expect(',')?;
                let b = self.conv_arg(reg)?;
                Value::Conv(a.mul(&b)?)
            }
            "dist_mul" => {
                let a = self.dist_arg(reg)?;
                self.expect(',')?;
                let b = self.dist_arg(reg)?;
                Value::Dist(a.mul(&b)?)
            }
            "phi" => Value::Dist(phi(&self.conv_arg(reg)?)?),
            "kernel_test" => Value::Kernel(kernel_test(&self.conv_arg(reg)?)?),
            "dist_eval" => {
                let t = self.dist_arg(reg)?;
                self.expect(',')?;
                let f = self.coeff(&reg.model.arrows.vars)?;
                self.expect(',')?;
                let x = self.point(reg.model.base_dim())?;
                Value::Number(t.eval(&f)?.eval_exact(&x)?)
            }
            _ => return Err(self.err_at(pos, format!("unknown operation `{name}`"))),
        };
        self.expect(')')?;
        Ok(out)
    }

    fn conv_arg(&mut self, reg: &Arc<Registry>) -> Result<ConvElement> {
        let pos = self.pos;
        match self.expr(reg)? {
            Value::Conv(a) => Ok(a),
            v => Err(self.err_at(pos, format!("expected a convolution element, found a {}", v.kind()))),
        }
    }

    fn dist_arg(&mut self, reg: &Arc<Registry>) -> Result<TransvDist> {
        let pos = self.pos;
        match self.expr(reg)? {
            Value::Dist(t) => Ok(t),
            v => Err(self.err_at(pos, format!("expected a distribution, found a {}", v.kind()))),
        }
    }
}

/// Look up an id, building products `A·B` and inverses `A^-1` on demand.
pub fn resolve_bisection(reg: &Registry, id: &str) -> Result<Arc<Bisection>> {
    if let Ok(b) = reg.get(id) {
        return Ok(b);
    }
    let atoms: Vec<&str> = id.split('·').map(str::trim).collect();
    if atoms.len() > 1 {
        let mut acc = resolve_bisection(reg, atoms[0])?;
        for a in &atoms[1..] {
            let next = resolve_bisection(reg, a)?;
            acc = reg.mul(&acc.id, &next.id)?;
        }
        return Ok(acc);
    }
    if let Some(base) = id.strip_suffix("^-1") {
        let b = resolve_bisection(reg, base.trim())?;
        return reg.inv(&b.id);
    }
    Err(Error::UnknownBisection(id.to_string()))
}

fn whole<T>(src: &str, f: impl FnOnce(&mut Parser<'_>) -> Result<T>) -> Result<T> {
    let mut p = Parser::new(src);
    let out = f(&mut p)?;
    p.finish()?;
    Ok(out)
}

/// The affine and kinked pair graphs together with `E1: t ↦ t - 1` and
/// `E2: t ↦ 3t`.
pub fn default_registry() -> Result<Arc<Registry>> {
    let reg = Registry::pair_standard();
    for b in Registry::pair_kinked().declared() {
        if b.id != UNIT_ID {
            reg.insert((*b).clone())?;
        }
    }
    for (id, slope, offset) in [("E1", 1, -1), ("E2", 3, 0)] {
        reg.insert(Bisection::pair_affine(id, Q::from_integer(slope.into()), Q::from_integer(offset.into()), Region::whole(1))?)?;
    }
    Ok(Arc::new(reg))
}

pub fn parse_coeff(src: &str, vars: &[String]) -> Result<CoeffFn> {
    whole(src, |p| p.coeff(vars))
}

pub fn parse_uea(src: &str, parent: &Arc<LieRinehart>) -> Result<UEAElement> {
    whole(src, |p| p.uea(parent))
}

pub fn parse_conv(src: &str, reg: &Arc<Registry>) -> Result<ConvElement> {
    whole(src, |p| p.conv(reg))
}

pub fn parse_dist(src: &str, reg: &Arc<Registry>) -> Result<TransvDist> {
    whole(src, |p| p.dist(reg))
}

pub fn parse_expr(src: &str, reg: &Arc<Registry>) -> Result<Value> {
    whole(src, |p| p.expr(reg))
}

/// A rational written `p` or `p/q`.
pub fn parse_rational(src: &str) -> Result<Q> {
    whole(src, |p| p.rational())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::text::format_coeff;
    use crate::number::{q, qr};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn polynomials() {
        let v = names(&["a", "b"]);
        let p = parse_coeff("3/2*a^2*b + a - 1", &v).unwrap();
        assert_eq!(format_coeff(&p, &v), "3/2*a^2*b + a - 1");
        let p = parse_coeff("(a + 1)^2 - 2 a", &v).unwrap();
        assert_eq!(format_coeff(&p, &v), "a^2 + 1");
        assert_eq!(parse_coeff("a/2", &v).unwrap(), CoeffFn::var(2, 0).scale(&qr(1, 2)));
    }

    #[test]
    fn flat_functions() {
        let t = names(&["t"]);
        let f = CoeffFn::flat(FlatFn::kinked_diffeo(0, 1));
        assert_eq!(parse_coeff("piecewise(t - exp(-1/t^2), t + 2*exp(-1/t^2))", &t).unwrap(), f);
        let g = CoeffFn::flat(FlatFn::phi().scale_arg(&q(2)).derive());
        let s = format_coeff(&g, &t);
        assert_eq!(parse_coeff(&s, &t).unwrap(), g);
        assert!(parse_coeff("piecewise(t, 1)", &t).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let t = names(&["t"]);
        assert_eq!(parse_coeff("t + s", &t).unwrap_err(), Error::Parse { pos: 4, msg: "unknown name `s`".into() });
        assert!(matches!(parse_coeff("t +", &t), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_coeff("(t", &t), Err(Error::Parse { .. })));
    }

    #[test]
    fn enveloping_elements() {
        let h = Arc::new(LieRinehart::heisenberg());
        let u = parse_uea("Y X", &h).unwrap();
        assert_eq!(u.to_text(), "X Y - Z");
        assert_eq!(parse_uea(&u.to_text(), &h).unwrap(), u);
        let tr = Arc::new(LieRinehart::tangent_line());
        let u = parse_uea("d t", &tr).unwrap();
        assert_eq!(u.to_text(), "t * d + 1");
    }

    #[test]
    fn convolution_and_distributions() {
        let reg = Arc::new(Registry::pair_standard());
        let a = parse_conv("<t^2 | D2> + <d | 1>", &reg).unwrap();
        assert_eq!(parse_conv(&a.to_text(), &reg).unwrap(), a);
        let v = parse_expr("phi(<t^2 | D2>)", &reg).unwrap();
        assert_eq!(v.to_string(), "[[D2, 4*t^2]]");
        let v = parse_expr("conv_mul(<1|T1>, <1|D2>)", &reg).unwrap();
        assert_eq!(v.to_string(), "<1 | T1·D2>");
        let v = parse_expr("dist_eval([[T1, 1]], y^2 + x, 3)", &reg).unwrap();
        assert_eq!(v.to_string(), "11");
        let d = parse_dist("[[T1·D2, d]] - [[H^-1, t]]", &reg).unwrap();
        assert_eq!(parse_dist(&d.to_text(), &reg).unwrap(), d);
        assert!(matches!(parse_expr("phi(<1 | Q>)", &reg), Err(Error::Parse { pos: 9, .. })));
        assert!(parse_expr("phi([[T1, 1]])", &reg).is_err());
    }
}
