//! Canonical text form of coefficient functions.
//!
//! Polynomials print as `c*x0^a0*x1^a1 + …`; flat functions as
//! `piecewise(<t <= 0 branch>, <t >= 0 branch>)` where each branch is a
//! polynomial plus terms `c*t^n*exp(-m/t^2)`.

use num_traits::{One, Signed, Zero};

use super::coeff::CoeffFn;
use super::flat::{FlatFn, FlatSeries};
use super::poly::Poly;
use crate::number::Q;

/// Join signed terms `(coefficient, monomial text)`; empty monomial text
/// stands for the constant 1.
pub fn join_terms(terms: &[(Q, String)]) -> String {
    join_terms_sep(terms, "*")
}

/// Like [`join_terms`] with a custom coefficient separator.
pub fn join_terms_sep(terms: &[(Q, String)], sep: &str) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (c, mono)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mono.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(mono);
        } else {
            out.push_str(&format!("{a}{sep}{mono}"));
        }
    }
    out
}

fn power(name: &str, e: i64) -> String {
    match e {
        1 => name.to_string(),
        _ => format!("{name}^{e}"),
    }
}

pub fn monomial_text(m: &[u32], vars: &[String]) -> String {
    m.iter()
        .zip(vars)
        .filter(|(e, _)| **e > 0)
        .map(|(e, v)| power(v, *e as i64))
        .collect::<Vec<_>>()
        .join("*")
}

pub fn poly_terms(p: &Poly, vars: &[String]) -> Vec<(Q, String)> {
    p.sorted_terms()
        .into_iter()
        .map(|(m, c)| (c.clone(), monomial_text(m, vars)))
        .collect()
}

pub fn format_poly(p: &Poly, vars: &[String]) -> String {
    join_terms(&poly_terms(p, vars))
}

fn flat_atom(m: &Q, var: &str) -> String {
    if m.is_integer() {
        format!("exp(-{m}/{var}^2)")
    } else {
        format!("exp(-({m})/{var}^2)")
    }
}

fn series_terms(s: &FlatSeries, var: &str) -> Vec<(Q, String)> {
    s.terms()
        .map(|((m, n), c)| {
            let mut parts = Vec::new();
            if *n != 0 {
                parts.push(power(var, *n as i64));
            }
            parts.push(flat_atom(m, var));
            (c.clone(), parts.join("*"))
        })
        .collect()
}

pub fn format_flat(f: &FlatFn, var: &str) -> String {
    let vars = [var.to_string()];
    let branch = |s: &FlatSeries| {
        let mut terms = poly_terms(&f.poly, &vars);
        terms.extend(series_terms(s, var));
        join_terms(&terms)
    };
    format!("piecewise({}, {})", branch(&f.neg), branch(&f.pos))
}

pub fn format_coeff(f: &CoeffFn, vars: &[String]) -> String {
    match f {
        CoeffFn::Poly(p) => format_poly(p, vars),
        CoeffFn::Flat(fl) => format_flat(fl, &vars[0]),
    }
}

/// Does the printed form need parentheses when used as a factor?
pub fn needs_parens(f: &CoeffFn) -> bool {
    match f {
        CoeffFn::Poly(p) => p.len() > 1 || p.terms().any(|(_, c)| c.is_negative() || (!c.is_integer() && !c.is_zero())),
        CoeffFn::Flat(_) => false,
    }
}
