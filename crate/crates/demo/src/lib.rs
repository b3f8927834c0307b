//! Browser bindings: half-space profiles, series free boundaries and the
//! one-dimensional degenerate ODE, as flat `Float64Array`s of `(x, y)` pairs.

use freeboundary::ck::{theorem12_solve, SolveOptions};
use freeboundary::degenerate::solve_ode_1d;
use freeboundary::exact::{omega, Field, HalfSpaceSolution, ModelConstants};
use freeboundary::series::{MultiIndex, NormParams, TruncatedSeries};
use wasm_bindgen::prelude::*;

fn js(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn interleave(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    xs.iter().zip(ys).flat_map(|(x, y)| [*x, *y]).collect()
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect()
}

pub fn profile(q: f64, samples: usize) -> Result<Vec<f64>, String> {
    let c = ModelConstants::new(q, 2, 1).map_err(|e| e.to_string())?;
    let u = HalfSpaceSolution::standard(c);
    let xs = linspace(-1.0, 1.0, samples);
    let ys: Vec<f64> = xs.iter().map(|&t| u.value(&[0.0, t])[0]).collect();
    Ok(interleave(&xs, &ys))
}

/// `(x_2, u)` along the normal line of the standard half-space solution.
#[wasm_bindgen]
pub fn halfspace_profile(q: f64, samples: usize) -> Result<Vec<f64>, JsValue> {
    profile(q, samples).map_err(js)
}

/// Weiss energy of the half-space solution in the plane.
#[wasm_bindgen]
pub fn halfspace_energy(q: f64) -> Result<f64, JsValue> {
    omega(2, q).map_err(js)
}

pub fn curve(q: f64, eps: f64, order: usize, samples: usize) -> Result<(Vec<f64>, Vec<f64>), String> {
    let c = ModelConstants::new(q, 2, 1).map_err(|e| e.to_string())?;
    let phi = TruncatedSeries::from_monomials(2, order, vec![(MultiIndex::new(vec![2, 0]), eps)]);
    let vplus = [TruncatedSeries::constant(2, order, 1.0)];
    let opts = SolveOptions { order, ..Default::default() };
    let sol = theorem12_solve(&phi, &vplus, c, &opts).map_err(|e| e.to_string())?;
    let xs = linspace(-1.0, 1.0, samples);
    let heights: Vec<f64> = xs.iter().map(|&t| sol.solution.v[0].evaluate(&[t, 0.0])).collect();
    let params = NormParams::new(0.5, 0.1, order).map_err(|e| e.to_string())?;
    let norms = freeboundary::ck::convergence_diagnostics(&sol.solution.v, &params, None).order_norms;
    Ok((interleave(&xs, &heights), norms))
}

/// Free boundary `x_2 = v^1(x_1, 0)` of the series solution with data
/// `φ = ε y_1^2`.
#[wasm_bindgen]
pub fn free_boundary_curve(q: f64, eps: f64, order: usize, samples: usize) -> Result<Vec<f64>, JsValue> {
    curve(q, eps, order, samples).map(|c| c.0).map_err(js)
}

/// Weighted coefficient norm per order of the same series solution.
#[wasm_bindgen]
pub fn series_order_norms(q: f64, eps: f64, order: usize) -> Result<Vec<f64>, JsValue> {
    curve(q, eps, order, 2).map(|c| c.1).map_err(js)
}

pub fn ode(gamma: f64, coeffs: &[f64], nodes: usize) -> Result<Vec<f64>, String> {
    let f = |x: f64| coeffs.iter().rev().fold(0.0, |a, c| a * x + c);
    let s = solve_ode_1d(gamma, f, nodes.max(2)).map_err(|e| e.to_string())?;
    Ok(interleave(&s.x, &s.u))
}

/// `(x, u)` for `x u'' + γ u' = f` on `[0, 1]`, `f` given by polynomial
/// coefficients in increasing degree.
#[wasm_bindgen]
pub fn ode_profile(gamma: f64, coeffs: Vec<f64>, nodes: usize) -> Result<Vec<f64>, JsValue> {
    ode(gamma, &coeffs, nodes).map_err(js)
}
