//! The Weiss energy
//! `W(u, x0, r) = r^{-(n+2κ-2)} ∫_{B_r} (|∇u|² + 2/(1+q) |u|^{1+q}) - κ r^{-(n+2κ-1)} ∫_{∂B_r} |u|²`
//! by nested adaptive Gauss-Legendre quadrature in polar/spherical coordinates.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use super::constants::ModelConstants;
use super::field::Field;
use super::halfspace::HalfSpaceSolution;
use crate::error::{Error, Result};
use crate::quad::Adaptive;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss-Legendre points per radial panel
    pub radial_points: usize,
    /// initial angular panels
    pub angular_points: usize,
    /// maximum bisection depth per panel
    pub depth: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { radial_points: 12, angular_points: 8, depth: 14 }
    }
}

impl QuadratureSpec {
    fn radial(&self) -> Adaptive {
        Adaptive { points: self.radial_points, panels: 1, depth: self.depth, tol: 1e-13 }
    }

    fn angular(&self) -> Adaptive {
        Adaptive { points: self.radial_points, panels: self.angular_points, depth: self.depth, tol: 1e-12 }
    }
}

fn point(x0: &[f64], rho: f64, dir: &[f64]) -> Vec<f64> {
    x0.iter().zip(dir).map(|(a, d)| a + rho * d).collect()
}

fn direction(n: usize, angles: &[f64]) -> Vec<f64> {
    match n {
        2 => vec![angles[0].cos(), angles[0].sin()],
        _ => {
            let (th, ph) = (angles[0], angles[1]);
            vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]
        }
    }
}

/// `∫_{B_r(x0)} f`
pub fn integrate_ball<G: Fn(&[f64]) -> f64>(n: usize, x0: &[f64], r: f64, spec: &QuadratureSpec, f: G) -> Result<f64> {
    let (rad, ang) = (spec.radial(), spec.angular());
    let ray = |dir: &[f64]| rad.integrate(|rho| rho.powi(n as i32 - 1) * f(&point(x0, rho, dir)), 0.0, r);
    let v = match n {
        2 => ang.integrate(|th| ray(&direction(2, &[th])), 0.0, 2.0 * PI),
        3 => ang.integrate(
            |ph| ang.integrate(|th| th.sin() * ray(&direction(3, &[th, ph])), 0.0, PI),
            0.0,
            2.0 * PI,
        ),
        _ => return Err(Error::Quadrature(format!("ball quadrature supports n = 2, 3, got {n}"))),
    };
    finite(v)
}

/// `∫_{∂B_r(x0)} f`
pub fn integrate_sphere<G: Fn(&[f64]) -> f64>(n: usize, x0: &[f64], r: f64, spec: &QuadratureSpec, f: G) -> Result<f64> {
    let ang = spec.angular();
    let v = match n {
        2 => r * ang.integrate(|th| f(&point(x0, r, &direction(2, &[th]))), 0.0, 2.0 * PI),
        3 => {
            r * r
                * ang.integrate(
                    |ph| ang.integrate(|th| th.sin() * f(&point(x0, r, &direction(3, &[th, ph]))), 0.0, PI),
                    0.0,
                    2.0 * PI,
                )
        }
        _ => return Err(Error::Quadrature(format!("sphere quadrature supports n = 2, 3, got {n}"))),
    };
    finite(v)
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature(format!("non-finite integral {v}")))
    }
}

pub fn weiss_energy<F: Field>(u: &F, c: &ModelConstants, x0: &[f64], r: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("Weiss radius must be positive, got {r}")));
    }
    let n = u.dim();
    let (k, q) = (c.kappa, c.q);
    let bulk = integrate_ball(n, x0, r, spec, |x| {
        let j = u.jet(x);
        j.grad_norm_sq() + 2.0 / (1.0 + q) * j.norm().powf(1.0 + q)
    })?;
    let boundary = integrate_sphere(n, x0, r, spec, |x| u.value(x).iter().map(|v| v * v).sum())?;
    let nf = n as f64;
    Ok(r.powf(-(nf + 2.0 * k - 2.0)) * bulk - k * r.powf(-(nf + 2.0 * k - 1.0)) * boundary)
}

/// Weiss energy over a list of radii, as `(r, W)` rows.
pub fn weiss_profile<F: Field>(u: &F, c: &ModelConstants, x0: &[f64], radii: &[f64], spec: &QuadratureSpec) -> Result<Vec<(f64, f64)>> {
    radii.iter().map(|&r| Ok((r, weiss_energy(u, c, x0, r, spec)?))).collect()
}

/// Half-space energy `ω_q = W(h, 0, 1)` for the standard half-space solution,
/// computed once per `(n, q)`.
pub fn omega(n: usize, q: f64) -> Result<f64> {
    static CACHE: Lazy<Mutex<HashMap<(usize, u64), f64>>> = Lazy::new(|| Mutex::new(HashMap::new()));
    if let Some(v) = CACHE.lock().unwrap().get(&(n, q.to_bits())) {
        return Ok(*v);
    }
    let c = ModelConstants::new(q, n, 1)?;
    let h = HalfSpaceSolution::standard(c);
    let v = weiss_energy(&h, &c, &vec![0.0; n], 1.0, &QuadratureSpec::default())?;
    CACHE.lock().unwrap().insert((n, q.to_bits()), v);
    Ok(v)
}
