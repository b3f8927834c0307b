//! The translation diffeomorphisms `Φ_a(z) = (φ(1), z_n)` with
//! `φ' = a ((3/4)^2 - |φ|^2)_+^3 η(z_n)`, `φ(0) = z'`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::CheckRecord;
use crate::error::{Error, Result};

pub const DIFFEO_STEPS: usize = 512;

fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth cut-off: `1` for `|z_n| <= 1/4`, `0` for `|z_n| >= 1/2`.
pub fn eta(zn: f64) -> f64 {
    let t = 4.0 * zn.abs() - 1.0;
    let (a, b) = (psi(1.0 - t), psi(t));
    a / (a + b)
}

fn velocity(a: &[f64], phi: &[f64], e: f64) -> Vec<f64> {
    let r2: f64 = phi.iter().map(|v| v * v).sum();
    let s = (0.5625 - r2).max(0.0).powi(3) * e;
    a.iter().map(|ai| ai * s).collect()
}

fn rk4_step(a: &[f64], phi: &[f64], e: f64, h: f64) -> Vec<f64> {
    let shift = |base: &[f64], k: &[f64], c: f64| -> Vec<f64> { base.iter().zip(k).map(|(x, d)| x + c * d).collect() };
    let k1 = velocity(a, phi, e);
    let k2 = velocity(a, &shift(phi, &k1, h / 2.0), e);
    let k3 = velocity(a, &shift(phi, &k2, h / 2.0), e);
    let k4 = velocity(a, &shift(phi, &k3, h), e);
    (0..phi.len()).map(|i| phi[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
}

/// `Φ_a(z)` by classical Runge-Kutta with [`DIFFEO_STEPS`] steps.
pub fn diffeo_map(a: &[f64], z: &[f64]) -> Vec<f64> {
    let n = z.len();
    let e = eta(z[n - 1]);
    let h = 1.0 / DIFFEO_STEPS as f64;
    let mut phi = z[..n - 1].to_vec();
    for _ in 0..DIFFEO_STEPS {
        phi = rk4_step(a, &phi, e, h);
    }
    phi.push(z[n - 1]);
    phi
}

/// `Φ_a(z)` by step-doubling adaptive Runge-Kutta to local tolerance `tol`.
pub fn diffeo_reference(a: &[f64], z: &[f64], tol: f64) -> Vec<f64> {
    let n = z.len();
    let e = eta(z[n - 1]);
    let mut phi = z[..n - 1].to_vec();
    let (mut t, mut h) = (0.0f64, 0.125f64);
    while t < 1.0 {
        h = h.min(1.0 - t);
        let full = rk4_step(a, &phi, e, h);
        let half = rk4_step(a, &rk4_step(a, &phi, e, h / 2.0), e, h / 2.0);
        let err = full.iter().zip(&half).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if err <= tol || h < 1e-6 {
            phi = half.iter().zip(&full).map(|(y, x)| y + (y - x) / 15.0).collect();
            t += h;
            if err < tol / 64.0 {
                h *= 2.0;
            }
        } else {
            h /= 2.0;
        }
    }
    phi.push(z[n - 1]);
    phi
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// The structural properties of `Φ_a` on a seeded sample, each as one record, plus
/// agreement with the adaptive reference integrator.
pub fn diffeo_check(a: &[f64], tol: f64, seed: u64) -> Result<Vec<CheckRecord>> {
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if a.is_empty() || a.len() > 2 || !(norm <= 1.0) {
        return Err(Error::InvalidArgument(format!("need 1 or 2 tangential entries with |a| <= 1, got {a:?}")));
    }
    let n = a.len() + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = |lo: f64, hi: f64| -> Vec<f64> { (0..n).map(|_| rng.gen_range(lo..hi)).collect() };
    let inputs = format!("a = {a:?}, seed = {seed}");
    let zero = vec![0.0; n - 1];
    let mut out = Vec::new();

    let interior: Vec<Vec<f64>> = (0..64).map(|_| sample(-0.8, 0.8)).collect();
    let identity = interior.iter().map(|z| sup_diff(&diffeo_map(&zero, z), z)).fold(0.0, f64::max);
    out.push(CheckRecord::at_most("diffeo_identity_at_zero", inputs.clone(), identity, tol));

    let mut outside: Vec<Vec<f64>> = Vec::new();
    let mut far = vec![0.0; n];
    far[0] = 0.9;
    outside.push(far);
    while outside.len() < 64 {
        let z = sample(-1.5, 1.5);
        let r: f64 = z[..n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 0.75 || z[n - 1].abs() > 0.5 {
            outside.push(z);
        }
    }
    let fixed = outside.iter().map(|z| sup_diff(&diffeo_map(a, z), z)).fold(0.0, f64::max);
    out.push(CheckRecord::at_most("diffeo_fixed_outside_support", inputs.clone(), fixed, tol));

    let plane = interior
        .iter()
        .map(|z| {
            let mut z = z.clone();
            z[n - 1] = 0.0;
            diffeo_map(a, &z)[n - 1].abs()
        })
        .fold(0.0, f64::max);
    out.push(CheckRecord::at_most("diffeo_preserves_plane", inputs.clone(), plane, tol));

    let h = 1e-3;
    let vertical = interior
        .iter()
        .map(|z| {
            let mut z = z.clone();
            z[n - 1] *= 0.2 / 0.8;
            let (mut up, mut dn) = (z.clone(), z.clone());
            up[n - 1] += h;
            dn[n - 1] -= h;
            let (pu, pd) = (diffeo_map(a, &up), diffeo_map(a, &dn));
            (0..n)
                .map(|i| ((pu[i] - pd[i]) / (2.0 * h) - if i == n - 1 { 1.0 } else { 0.0 }).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    out.push(CheckRecord::at_most("diffeo_vertical_derivative", inputs.clone(), vertical, tol));

    let mut probes = interior.clone();
    probes.push(vec![0.0; n]);
    let reference = probes
        .iter()
        .map(|z| sup_diff(&diffeo_map(a, z), &diffeo_reference(a, z, 1e-14)))
        .fold(0.0, f64::max);
    out.push(CheckRecord::at_most("diffeo_reference", inputs, reference, 1e-9));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_profile() {
        assert_eq!(eta(0.0), 1.0);
        assert_eq!(eta(0.25), 1.0);
        assert_eq!(eta(-0.5), 0.0);
        assert_eq!(eta(0.7), 0.0);
        assert!((eta(0.375) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..=100 {
            let v = eta(0.25 + 0.0025 * k as f64);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn origin_moves_by_roughly_a() {
        let p = diffeo_map(&[0.1], &[0.0, 0.0]);
        let first = 0.1 * (0.5625f64).powi(3);
        assert!((p[0] - first).abs() < 1e-4, "{p:?}");
        assert!((p[0] - diffeo_reference(&[0.1], &[0.0, 0.0], 1e-14)[0]).abs() < 1e-12);
    }

    #[test]
    fn structural_properties() {
        for a in [vec![0.0, 0.0], vec![0.05, 0.0], vec![0.1, 0.1]] {
            for c in diffeo_check(&a, 1e-7, 3).unwrap() {
                assert!(c.pass, "{c:?}");
            }
        }
        for c in diffeo_check(&[0.3], 1e-7, 4).unwrap() {
            assert!(c.pass, "{c:?}");
        }
        assert!(diffeo_check(&[2.0], 1e-7, 0).is_err());
    }
}
