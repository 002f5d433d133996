//! Browser bindings for the groupoid convolution toolkit.
//!
//! Every export takes and returns strings; results are JSON objects with
//! either the computed fields or a single `error` field.

use std::sync::Arc;

use groupoid_conv::conv::ConvElement;
use groupoid_conv::groupoid::Registry;
use groupoid_conv::parse::{default_registry, parse_coeff, parse_expr, parse_rational, parse_uea};
use groupoid_conv::phi::{group_element, kernel_test, phi, stratify, KernelExample};
use groupoid_conv::{Error, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Evaluate an expression in the pair groupoid registry.
#[wasm_bindgen]
pub fn evaluate(expr: &str) -> String {
    respond(evaluate_value(expr))
}

fn evaluate_value(expr: &str) -> Result<Value> {
    let v = parse_expr(expr, &default_registry()?)?;
    Ok(json!({ "kind": v.kind(), "value": v.to_string() }))
}

/// Sample points for the kernel curves.
pub fn grid() -> Vec<f64> {
    (0..=40).map(|k| -2.0 + 0.1 * k as f64).collect()
}

/// The four kinked-graph terms of `Σ (-1)^{i+j} ⟨f, E_ij⟩`, each paired with
/// the test function `test` through Φ, sampled on [-2, 2].
#[wasm_bindgen]
pub fn kernel_curves(f: &str, test: &str) -> String {
    respond(kernel_value(f, test))
}

fn kernel_value(f: &str, test: &str) -> Result<Value> {
    let f = parse_coeff(f, &["t".to_string()])?;
    let ex = KernelExample::with_coeff(f);
    let test = parse_coeff(test, &ex.reg.model.arrows.vars)?;
    let xs = grid();
    let mut curves = Vec::new();
    let mut total = vec![0.0; xs.len()];
    for (id, u) in ex.a.terms() {
        let term = ConvElement::term(&ex.reg, u.clone(), id)?;
        let v = phi(&term)?.eval(&test)?;
        let ys: Vec<f64> = xs.iter().map(|x| v.eval_f64(&[*x])).collect();
        for (s, y) in total.iter_mut().zip(&ys) {
            *s += y;
        }
        curves.push(json!({ "id": id, "values": ys }));
    }
    let exact = phi(&ex.a)?.eval(&test)?.is_zero()?;
    let bis: Vec<_> = ex.reg.declared().into_iter().filter(|b| b.id.starts_with('E')).collect();
    Ok(json!({
        "element": ex.a.to_string(),
        "kernel": kernel_test(&ex.a)?,
        "exact_zero": exact,
        "strata": stratify(&bis)?.to_string(),
        "x": xs,
        "terms": curves,
        "sum": total,
    }))
}

fn triple(s: &str) -> Result<[groupoid_conv::number::Q; 3]> {
    let parts: Vec<_> = s.split(',').map(|p| parse_rational(p.trim())).collect::<Result<_>>()?;
    parts
        .try_into()
        .map_err(|_| Error::Model(format!("`{s}`: expected three coordinates a, b, c")))
}

/// `⟨u', k'⟩·⟨u, k⟩` in the Heisenberg group, and whether Φ carries it to
/// the product of the images.
#[wasm_bindgen]
pub fn heisenberg_product(kp: &str, up: &str, k: &str, u: &str) -> String {
    respond(heisenberg_value(kp, up, k, u))
}

fn heisenberg_value(kp: &str, up: &str, k: &str, u: &str) -> Result<Value> {
    let reg = Arc::new(Registry::heisenberg_standard());
    let lie = reg.model.lie.clone();
    let left = ConvElement::term(&reg, parse_uea(up, &lie)?, &group_element(&reg, triple(kp)?)?.id)?;
    let right = ConvElement::term(&reg, parse_uea(u, &lie)?, &group_element(&reg, triple(k)?)?.id)?;
    let product = left.mul(&right)?;
    let image = phi(&product)?;
    let composed = phi(&left)?.mul(&phi(&right)?)?;
    Ok(json!({
        "product": product.to_string(),
        "phi": image.to_string(),
        "homomorphism": image == composed,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn evaluates_expressions() {
        let v = parse(&evaluate("conv_mul(<1|E1>,<1|E2>)"));
        assert_eq!(v["value"], "<1 | E1·E2>");
        assert!(parse(&evaluate("conv_mul(<1|E1>,")).get("error").is_some());
    }

    #[test]
    fn kernel_terms_cancel() {
        let v = parse(&kernel_curves("1 + t", "y^2 + x"));
        assert_eq!(v["kernel"]["in_kernel"], true);
        assert_eq!(v["exact_zero"], true);
        assert_eq!(v["terms"].as_array().unwrap().len(), 4);
        assert!(v["sum"].as_array().unwrap().iter().all(|s| s.as_f64().unwrap().abs() < 1e-9));
        let largest = v["terms"][0]["values"].as_array().unwrap().iter().map(|y| y.as_f64().unwrap().abs()).fold(0.0, f64::max);
        assert!(largest > 0.1);
    }

    #[test]
    fn twisted_product_is_respected() {
        let v = parse(&heisenberg_product("1, 0, 0", "Y", "0, 1, 0", "X + 2"));
        assert_eq!(v["homomorphism"], true, "{v}");
        assert_eq!(v["product"], "<X Y + 2 * Y - Z | k(1,0,0)·k(0,1,0)>");
        assert!(parse(&heisenberg_product("1, 0", "X", "0, 0, 0", "1")).get("error").is_some());
    }
}
