use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{gauss, Adaptive};

/// Solution of `x u'' + γ u' = f` on `(0, 1)` bounded at `0` with `u(0) = 0`,
/// sampled at nodes, with the sup-norm bounds `‖u'‖ <= ‖f‖/γ` and
/// `‖x u''‖ <= 2‖f‖` measured on the same nodes.
#[derive(Clone, Debug, Serialize)]
pub struct OdeSolution {
    pub gamma: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// `x u''`
    pub x_d2u: Vec<f64>,
    pub f_sup: f64,
    pub du_sup: f64,
    pub x_d2u_sup: f64,
}

impl OdeSolution {
    /// `‖f‖/γ - ‖u'‖`, nonnegative when the first bound holds.
    pub fn du_margin(&self) -> f64 {
        self.f_sup / self.gamma - self.du_sup
    }

    /// `2‖f‖ - ‖x u''‖`
    pub fn x_d2u_margin(&self) -> f64 {
        2.0 * self.f_sup - self.x_d2u_sup
    }

    pub fn bounds_hold(&self) -> bool {
        self.du_margin() >= -1e-14 * (1.0 + self.f_sup) && self.x_d2u_margin() >= -1e-14 * (1.0 + self.f_sup)
    }
}

/// `u'(x) = x^{-γ} ∫_0^x t^{γ-1} f(t) dt = ∫_0^1 s^{γ-1} f(x s) ds`, evaluated
/// after `s = t^4`, which turns the weight into the smoother `4 t^{4γ-1}`.
pub fn ode_derivative<F: Fn(f64) -> f64>(gamma: f64, f: &F, x: f64) -> f64 {
    Adaptive::default().integrate(|t| 4.0 * t.powf(4.0 * gamma - 1.0) * f(x * t.powi(4)), 0.0, 1.0)
}

/// Solves on `nodes` equispaced points of `[0, 1]`; `u` is the integral of
/// `u'` from `0`, panel by panel.
pub fn solve_ode_1d<F: Fn(f64) -> f64>(gamma: f64, f: F, nodes: usize) -> Result<OdeSolution> {
    if !(gamma > 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must exceed 1, got {gamma}")));
    }
    if nodes < 2 {
        return Err(Error::InvalidArgument("need at least two nodes".into()));
    }
    let x: Vec<f64> = (0..nodes).map(|k| k as f64 / (nodes - 1) as f64).collect();
    let du: Vec<f64> = x.iter().map(|&t| ode_derivative(gamma, &f, t)).collect();
    let mut u = vec![0.0; nodes];
    for k in 1..nodes {
        let panel = gauss(|t| ode_derivative(gamma, &f, t), x[k - 1], x[k], 16);
        u[k] = u[k - 1] + panel;
    }
    let x_d2u: Vec<f64> = x.iter().zip(&du).map(|(&t, &d)| f(t) - gamma * d).collect();
    if u.iter().chain(&du).chain(&x_d2u).any(|v| !v.is_finite()) {
        return Err(Error::Quadrature("non-finite value in the ODE solve".into()));
    }
    // sup of f on a grid finer than the output nodes
    let fine = 8 * nodes;
    let f_sup = (0..=fine).map(|k| f(k as f64 / fine as f64).abs()).fold(0.0, f64::max);
    let sup = |v: &[f64]| v.iter().fold(0.0, |a: f64, b| a.max(b.abs()));
    Ok(OdeSolution { gamma, du_sup: sup(&du), x_d2u_sup: sup(&x_d2u), x, u, du, x_d2u, f_sup })
}

/// Green's function of `x u'' + γ u'`: `max(x,y)^{1-γ} / (1-γ)`, or
/// `log max(x,y)` when `γ = 1`.
pub fn green_1d(gamma: f64, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::InvalidArgument(format!("Green's function needs positive arguments, got ({x}, {y})")));
    }
    let t = x.max(y);
    Ok(if gamma == 1.0 { t.ln() } else { t.powf(1.0 - gamma) / (1.0 - gamma) })
}

/// `∫_0^1 G(x, y) y^{γ-1} f(y) dy`, a solution normalized by its value at `1`.
pub fn green_convolution<F: Fn(f64) -> f64>(gamma: f64, f: &F, x: f64) -> Result<f64> {
    let q = Adaptive::default();
    let kernel = |y: f64| green_1d(gamma, x, y).map(|g| g * y.powf(gamma - 1.0) * f(y)).unwrap_or(0.0);
    green_1d(gamma, x, x)?;
    Ok(q.integrate(kernel, 0.0, x) + q.integrate(kernel, x, 1.0))
}
