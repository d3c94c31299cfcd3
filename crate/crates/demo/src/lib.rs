//! Browser bindings: class listing, a |Ê| heat map and cycle integrals.
//!
//! The `*_json` / `hat_grid_values` functions are plain Rust so they can be tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use lhmf::classical;
use lhmf::cycles::{cycle_integral_adaptive, via_fundamental_domain};
use lhmf::qforms::class_representatives;
use lhmf::series::{eis_hat, EisParams, EvalBudget, HatRoute};
use lhmf::{Complex64, QForm};
use serde_json::json;
use wasm_bindgen::prelude::*;

pub fn classes_json(disc: i64) -> Result<String, String> {
    let reps = class_representatives(disc).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for q in &reps {
        let g = q.automorph().map_err(|e| e.to_string())?;
        out.push(json!({
            "form": q.to_string(),
            "center": q.center(),
            "radius": q.radius(),
            "automorph": [g.p, g.q, g.r, g.s],
        }));
    }
    Ok(json!({"disc": disc, "class_number": reps.len(), "classes": out}).to_string())
}

/// log₁₀|Ê_{k,D}(τ,0)| on an nu × nv grid, row-major from (u0, v0); NaN where the evaluation fails
/// (on or too near the net).
pub fn hat_grid_values(disc: i64, d: i64, k: u32, bounds: [f64; 4], nu: usize, nv: usize, r: f64) -> Result<Vec<f64>, String> {
    let p = EisParams::at_zero(k, disc, d).map_err(|e| e.to_string())?;
    let budget = EvalBudget { r, ..EvalBudget::default() };
    let [u0, u1, v0, v1] = bounds;
    let step = |a: f64, b: f64, n: usize, i: usize| if n > 1 { a + (b - a) * i as f64 / (n - 1) as f64 } else { a };
    let mut vals = Vec::with_capacity(nu * nv);
    for j in 0..nv {
        for i in 0..nu {
            let tau = Complex64::new(step(u0, u1, nu, i), step(v0, v1, nv, j));
            let v = eis_hat(&p, tau, &budget, HatRoute::Direct).map(|r| r.value.norm().log10()).unwrap_or(f64::NAN);
            vals.push(v);
        }
    }
    Ok(vals)
}

pub fn cycle_json(form: &str, func: &str, weight: i32) -> Result<String, String> {
    let q: QForm = form.parse().map_err(|e: lhmf::Error| e.to_string())?;
    let h: Box<dyn Fn(Complex64) -> Complex64> = match func {
        "one" => Box::new(|_| Complex64::new(1.0, 0.0)),
        "j" => Box::new(via_fundamental_domain(classical::j, 0)),
        "e2star" => Box::new(classical::e2star),
        other => return Err(format!("unknown integrand {other:?}; expected one, j or e2star")),
    };
    let r = cycle_integral_adaptive(h, weight, &q, 64, 1e-9).map_err(|e| e.to_string())?;
    Ok(json!({
        "form": q.to_string(),
        "weight": weight,
        "value": [r.value.re, r.value.im],
        "err_estimate": r.err_estimate,
        "nodes": r.nodes,
        "converged": r.converged,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn classes(disc: i32) -> Result<String, JsValue> {
    classes_json(disc.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn hat_grid(disc: i32, d: i32, k: u32, u0: f64, u1: f64, v0: f64, v1: f64, nu: usize, nv: usize, r: f64) -> Result<Vec<f64>, JsValue> {
    hat_grid_values(disc.into(), d.into(), k, [u0, u1, v0, v1], nu, nv, r).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn cycle(form: &str, func: &str, weight: i32) -> Result<String, JsValue> {
    cycle_json(form, func, weight).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_listing() {
        let v: serde_json::Value = serde_json::from_str(&classes_json(5).unwrap()).unwrap();
        assert_eq!(v["class_number"], 1);
        assert_eq!(v["classes"][0]["form"], "[1,1,-1]");
        assert!(classes_json(4).is_err());
    }

    #[test]
    fn grid_shape_and_values() {
        let g = hat_grid_values(5, 1, 6, [-0.5, 0.5, 1.2, 2.0], 3, 2, 60.0).unwrap();
        assert_eq!(g.len(), 6);
        assert!(g.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn cycle_of_one_is_positive_length() {
        let v: serde_json::Value = serde_json::from_str(&cycle_json("1,1,-1", "one", 2).unwrap()).unwrap();
        assert!(v["converged"].as_bool().unwrap());
        assert!(cycle_json("1,1,-1", "nope", 2).is_err());
    }
}
