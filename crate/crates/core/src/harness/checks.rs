//! Self-contained check batteries behind the CLI subcommands.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::diffeo::diffeo_check;
use super::report::{CheckRecord, ReportDocument};
use crate::degenerate::{
    ball_measure, estimate_wkp_norm, green_convolution, intrinsic_distance, lp_norm, solve_deg_linear_nd,
    solve_direct_nonlinear, solve_ode_1d, Axis, DirectOptions, GridField, TensorGrid,
};
use crate::error::Result;
use crate::exact::{pde_residual, weiss_profile, Field, HalfSpaceSolution, ModelConstants, QuadratureSpec};
use crate::quad::Adaptive;

/// Random unit vector in `R^d`.
fn unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 0.1 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

/// Half-space solution with random `ν`, `e`: PDE residual at `samples`
/// random points with `x·ν > 0`, and Weiss energy constancy (plus `π/16`
/// when `n = 2`, `q = 0`).
pub fn halfspace_report(cn: ModelConstants, samples: usize, seed: u64) -> Result<ReportDocument> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = ReportDocument::new("halfspace");
    let nu = unit(&mut rng, cn.n);
    let e = unit(&mut rng, cn.m);
    let u = HalfSpaceSolution::new(cn, &nu, &e)?;
    let mut worst = 0.0f64;
    let mut taken = 0;
    while taken < samples {
        let x: Vec<f64> = (0..cn.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if u.height(&x) <= 1e-3 {
            continue;
        }
        taken += 1;
        worst = pde_residual(&u, cn.q, &x).iter().fold(worst, |a, v| a.max(v.abs()));
    }
    let inputs = format!("q = {}, n = {}, m = {}, {samples} points", cn.q, cn.n, cn.m);
    doc.push(CheckRecord::at_most("halfspace_residual", inputs, worst, 1e-10));
    let radii = [0.1, 0.25, 0.5, 0.75, 1.0];
    let w = weiss_profile(&u, &cn, &vec![0.0; cn.n], &radii, &QuadratureSpec::default())?;
    doc.plots.weiss = w.iter().map(|&(r, v)| [r, v]).collect();
    let spread = w.iter().map(|p| (p.1 - w[0].1).abs()).fold(0.0, f64::max) / w[0].1.abs();
    doc.push(CheckRecord::at_most("weiss_constant", format!("radii {radii:?}"), spread, 1e-6));
    if cn.n == 2 && cn.q == 0.0 {
        doc.push(CheckRecord::at_most("weiss_closed_form", "pi/16", (w[0].1 - PI / 16.0).abs(), 1e-6));
    }
    Ok(doc)
}

/// Weiss energy of the standard half-space solution over `radii`.
pub fn weiss_report(cn: ModelConstants, radii: &[f64], spec: &QuadratureSpec) -> Result<ReportDocument> {
    let mut doc = ReportDocument::new("weiss");
    let u = HalfSpaceSolution::standard(cn);
    let w = weiss_profile(&u, &cn, &vec![0.0; cn.n], radii, spec)?;
    doc.plots.weiss = w.iter().map(|&(r, v)| [r, v]).collect();
    let spread = w.iter().map(|p| (p.1 - w[0].1).abs()).fold(0.0, f64::max) / w[0].1.abs().max(f64::MIN_POSITIVE);
    doc.push(CheckRecord::at_most("weiss_constant", format!("radii {radii:?}"), spread, 1e-6));
    Ok(doc)
}

/// Closed forms, the two sup-norm bounds over random polynomial sources, and
/// the Green's function representation.
pub fn ode_report(gamma: f64, trials: usize, seed: u64) -> Result<ReportDocument> {
    let mut doc = ReportDocument::new("ode");
    let one = solve_ode_1d(gamma, |_| 1.0, 33)?;
    let lin = solve_ode_1d(gamma, |x| x, 33)?;
    let e1 = one.x.iter().zip(&one.u).map(|(x, u)| (u - x / gamma).abs()).fold(0.0, f64::max);
    let e2 = lin.x.iter().zip(&lin.u).map(|(x, u)| (u - x * x / (2.0 * (gamma + 1.0))).abs()).fold(0.0, f64::max);
    doc.push(CheckRecord::at_most("ode_constant_source", format!("gamma = {gamma}"), e1, 1e-10));
    doc.push(CheckRecord::at_most("ode_linear_source", format!("gamma = {gamma}"), e2, 1e-10));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut m1, mut m2) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..trials {
        let deg = rng.gen_range(0..=5);
        let c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = |x: f64| c.iter().rev().fold(0.0, |a, k| a * x + k);
        let s = solve_ode_1d(gamma, f, 17)?;
        m1 = m1.min(s.du_margin() / s.f_sup.max(1e-300));
        m2 = m2.min(s.x_d2u_margin() / s.f_sup.max(1e-300));
    }
    // relative margins; equality holds for constant sources
    let inputs = format!("{trials} random polynomials, seed {seed}");
    doc.push(CheckRecord::at_least("ode_derivative_bound", inputs.clone(), m1, -1e-14));
    doc.push(CheckRecord::at_least("ode_second_derivative_bound", inputs, m2, -1e-14));
    let f = |x: f64| 1.0 - 2.0 * x + 3.0 * x * x;
    let s = solve_ode_1d(gamma, f, 17)?;
    let shift = Adaptive::default().integrate(f, 0.0, 1.0) / (1.0 - gamma);
    let mut err = 0.0f64;
    for (x, u) in s.x.iter().zip(&s.u).skip(1) {
        err = err.max((green_convolution(gamma, &f, *x)? - shift - u).abs());
    }
    doc.push(CheckRecord::at_most("green_convolution", "f = 1 - 2x + 3x^2", err, 1e-8));
    Ok(doc)
}

/// Comparability of the intrinsic distance with `|√s - √t|` on vertical
/// pairs, and the doubling bound of the weighted ball measure.
pub fn metric_report(samples: usize, seed: u64) -> Result<ReportDocument> {
    let mut doc = ReportDocument::new("metric");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (t, s): (f64, f64) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let d = intrinsic_distance(&[0.0, t], &[0.0, s]);
        let exact = 2.0 * (t.sqrt() - s.sqrt()).abs();
        if exact > 0.0 && d > 0.0 {
            worst = worst.max(d / exact).max(exact / d);
        }
    }
    doc.push(CheckRecord::at_most("metric_vertical_comparability", format!("{samples} pairs"), worst, 4.0));
    let mut ratio = 0.0f64;
    for _ in 0..samples {
        let g = rng.gen_range(1.0..5.0);
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
        let r = rng.gen_range(1e-3..1.0);
        let q = ball_measure(&x, 3.0 * r, g) / ball_measure(&x, r, g) / 3f64.powf(2.0 * g + 6.0);
        ratio = ratio.max(q);
    }
    doc.push(CheckRecord::at_most("metric_doubling", format!("{samples} balls"), ratio, 1.0 + 1e-12));
    Ok(doc)
}

fn half_box(n: usize, k: usize) -> Result<TensorGrid> {
    let mut axes = vec![Axis::uniform(-0.5, 0.5, k); n - 1];
    axes.push(Axis::graded(0.0, 1.0, k));
    TensorGrid::new(axes)
}

/// Manufactured-solution convergence of the degenerate solver and the
/// empirical ratio `‖u‖_{W^{2,2}_*} / ‖f‖_{L^2}` over random sources.
pub fn deglin_report(gamma: f64, n: usize, seed: u64) -> Result<ReportDocument> {
    let mut doc = ReportDocument::new("deglin");
    let exact = |x: &[f64]| x[..n - 1].iter().map(|t| (PI * t).cos()).product::<f64>() * x[n - 1].exp();
    let lap = (n - 1) as f64 * PI * PI;
    let rhs = |x: &[f64]| (x[n - 1] * (1.0 - lap) + gamma) * exact(x);
    let counts: &[usize] = if n == 2 { &[9, 17, 33] } else { &[5, 9, 17] };
    let mut errs = Vec::new();
    for &k in counts {
        let grid = half_box(n, k)?;
        let f = GridField::from_fn(grid, 1, |x| vec![rhs(x)]);
        let s = solve_deg_linear_nd(gamma, &f, exact)?;
        let g = &s.u.grid;
        errs.push((0..g.len()).map(|i| (s.u.values[i] - exact(&g.point(&g.unflat(i)))).abs()).fold(0.0, f64::max));
    }
    let rate = errs.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    doc.push(CheckRecord::at_least("deglin_convergence", format!("max errors {errs:?}"), rate, 1.8));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = half_box(n, if n == 2 { 17 } else { 9 })?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = GridField::from_fn(grid.clone(), 1, |x| vec![c[0] + c[1] * x[0] + c[2] * x[n - 1] + c[3] * x[0] * x[n - 1]]);
        let u = solve_deg_linear_nd(gamma, &f, |_| 0.0)?;
        worst = worst.max(estimate_wkp_norm(&u.u, 2.0)? / lp_norm(&f, 2.0));
    }
    doc.push(CheckRecord::at_most("deglin_estimate_ratio", "20 random sources, p = 2", worst, 10.0));
    Ok(doc)
}

/// Direct nonlinear solve with half-space boundary data on `[-w, w]^n`,
/// returned with its report.
pub fn direct_halfspace_report(cn: ModelConstants, count: usize, half_width: f64) -> Result<(ReportDocument, GridField)> {
    let mut doc = ReportDocument::new("direct");
    let exact = HalfSpaceSolution::standard(cn);
    let grid = TensorGrid::new(vec![Axis::uniform(-half_width, half_width, count); cn.n])?;
    let h = grid.axes[0].spacing();
    let d = solve_direct_nonlinear(&cn, grid.clone(), |x| exact.value(x), &DirectOptions::default())?;
    let mut err = 0.0f64;
    let mut negative = 0.0f64;
    for k in 0..grid.len() {
        let want = exact.value(&grid.point(&grid.unflat(k)));
        for (j, w) in want.iter().enumerate() {
            err = err.max((d.u.get(k, j) - w).abs());
        }
        negative = negative.max(-d.u.get(k, 0));
    }
    let bound = 5.0 * h * h + 5.0 * d.delta.powf(cn.q);
    doc.push(CheckRecord::at_most("direct_error", format!("{count} nodes, {} iterations", d.iterations), err, bound));
    doc.push(CheckRecord::at_most("direct_sign", "max of -u1", negative, d.delta));
    Ok((doc, d.u))
}

pub fn diffeo_report(a: &[f64], tol: f64, seed: u64) -> Result<ReportDocument> {
    let mut doc = ReportDocument::new("diffeo");
    for c in diffeo_check(a, tol, seed)? {
        doc.push(c);
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batteries_pass() {
        let c = ModelConstants::new(0.0, 2, 1).unwrap();
        for doc in [
            halfspace_report(c, 50, 1).unwrap(),
            ode_report(2.5, 5, 2).unwrap(),
            metric_report(50, 3).unwrap(),
            deglin_report(2.0, 2, 4).unwrap(),
            direct_halfspace_report(ModelConstants::new(0.5, 2, 1).unwrap(), 17, 1.0).unwrap().0,
            diffeo_report(&[0.05], 1e-7, 5).unwrap(),
        ] {
            assert!(doc.all_pass(), "{:#?}", doc.checks);
        }
    }
}
