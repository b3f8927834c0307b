//! Gauss-Legendre rules and a bisection-adaptive composite integrator.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: Lazy<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    let mut cache = CACHE.lock().unwrap();
    cache.entry(n).or_insert_with(|| Arc::new(compute_rule(n))).clone()
}

fn compute_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Fixed Gauss-Legendre rule on `[a, b]`.
pub fn gauss<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    rule.0.iter().zip(&rule.1).map(|(&x, &w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Composite adaptive rule: `panels` initial panels, each bisected up to
/// `depth` times while the two-half estimate differs from the whole-panel
/// estimate by more than `tol` (absolute, scaled by the panel fraction).
#[derive(Clone, Copy, Debug)]
pub struct Adaptive {
    pub points: usize,
    pub panels: usize,
    pub depth: usize,
    pub tol: f64,
}

impl Default for Adaptive {
    fn default() -> Self {
        Adaptive { points: 12, panels: 4, depth: 12, tol: 1e-12 }
    }
}

impl Adaptive {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let h = (b - a) / self.panels as f64;
        let mut total = 0.0;
        for k in 0..self.panels {
            let lo = a + k as f64 * h;
            let hi = lo + h;
            let whole = gauss(&mut f, lo, hi, self.points);
            total += self.refine(&mut f, lo, hi, whole, self.depth, self.tol / self.panels as f64);
        }
        total
    }

    fn refine<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64, whole: f64, depth: usize, tol: f64) -> f64 {
        let m = 0.5 * (a + b);
        let left = gauss(&mut *f, a, m, self.points);
        let right = gauss(&mut *f, m, b, self.points);
        let split = left + right;
        if depth == 0 || (split - whole).abs() <= tol {
            return split;
        }
        self.refine(f, a, m, left, depth - 1, 0.5 * tol) + self.refine(f, m, b, right, depth - 1, 0.5 * tol)
    }
}
