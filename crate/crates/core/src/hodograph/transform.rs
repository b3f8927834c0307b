use crate::degenerate::{GridField, TensorGrid};
use crate::error::{Error, Result};
use crate::exact::{Field, FieldJet, ModelConstants};

use super::coefficients::DENOMINATOR_GUARD;
use super::state::LegendreState;

const MAX_ITER: usize = 200;

/// Vertical coordinate of the hodograph map, `(u^1/α)^{1/κ}`.
fn height(u1: f64, cn: &ModelConstants) -> f64 {
    (u1 / cn.alpha).powf(1.0 / cn.kappa)
}

/// Samples `y = T(x) = (x', (u^1(x)/α)^{1/κ})` at the given points.
pub fn forward_transform<F: Field>(u: &F, cn: &ModelConstants, points: &[Vec<f64>]) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let n = cn.n;
    points
        .iter()
        .map(|x| {
            let jet = u.jet(x);
            let u1 = jet.value[0];
            if u1 < 0.0 {
                return Err(Error::NegativeSample { value: u1, at: x.clone() });
            }
            if u1 > 0.0 && !(jet.grad[0][n - 1] > 0.0) {
                return Err(Error::NotInvertible(x.clone()));
            }
            let mut y = x.clone();
            y[n - 1] = height(u1, cn);
            Ok((x.clone(), y))
        })
        .collect()
}

/// Safeguarded Newton for an increasing scalar function on `[lo, hi]` with
/// `f(lo) <= 0 <= f(hi)`. `f` returns the value and the derivative.
fn bracketed_newton(mut f: impl FnMut(f64) -> Result<(f64, f64)>, mut lo: f64, mut hi: f64, start: f64) -> Result<f64> {
    let mut t = if start > lo && start < hi { start } else { 0.5 * (lo + hi) };
    let mut width = hi - lo;
    for _ in 0..MAX_ITER {
        let (v, d) = f(t)?;
        if v == 0.0 {
            return Ok(t);
        }
        if v < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let mut next = t - v / d;
        // bisect when Newton leaves the bracket or stops shrinking it
        if !(next > lo && next < hi) || hi - lo > 0.5 * width {
            next = 0.5 * (lo + hi);
        }
        width = hi - lo;
        let tol = 4.0 * f64::EPSILON * t.abs().max(1e-3);
        if (next - t).abs() <= tol || hi - lo <= tol {
            return Ok(next);
        }
        t = next;
    }
    Err(Error::NewtonFailure(format!("no convergence in [{lo:e}, {hi:e}]")))
}

/// Doubles `hi` until `f(hi) > 0`.
fn expand_upper(mut f: impl FnMut(f64) -> Result<f64>, lo: f64, step: f64) -> Result<f64> {
    let mut step = step.max(1e-6);
    for _ in 0..80 {
        let hi = lo + step;
        if f(hi)? > 0.0 {
            return Ok(hi);
        }
        step *= 2.0;
    }
    Err(Error::NewtonFailure("could not bracket the root".into()))
}

/// Legendre functions of `u` at one point `y` with `y_n >= 0`.
///
/// Solves `(u^1(y', x_n)/α)^{1/κ} = y_n` for `x_n`; then `v^1 = x_n - y_n` and
/// `v^j = α u^j / u^1`. On `y_n = 0` the free-boundary point is located by
/// bisection and `v^j` is extrapolated from three nearby heights.
pub fn legendre_at<F: Field>(u: &F, cn: &ModelConstants, y: &[f64]) -> Result<Vec<f64>> {
    let n = cn.n;
    let yn = y[n - 1];
    if yn < 0.0 {
        return Err(Error::InvalidArgument(format!("height must be nonnegative, got {yn}")));
    }
    if yn == 0.0 {
        let xb = free_boundary_height(u, cn, &y[..n - 1])?;
        let mut out = vec![xb];
        if cn.m > 1 {
            let h = 1e-3;
            let s: Vec<Vec<f64>> = (1..=3)
                .map(|k| {
                    let mut p = y.to_vec();
                    p[n - 1] = h * k as f64;
                    legendre_at(u, cn, &p)
                })
                .collect::<Result<_>>()?;
            for j in 1..cn.m {
                out.push(3.0 * s[0][j] - 3.0 * s[1][j] + s[2][j]);
            }
        }
        return Ok(out);
    }
    let mut x = y.to_vec();
    let mut eval = |t: f64| -> Result<(f64, f64)> {
        x[n - 1] = t;
        let j = u.jet(&x);
        let u1 = j.value[0].max(0.0);
        let hgt = height(u1, cn);
        let d = if u1 > 0.0 { hgt / (cn.kappa * u1) * j.grad[0][n - 1] } else { 0.0 };
        Ok((hgt - yn, d))
    };
    let lo = {
        let mut lo = yn - 1.0;
        let mut k = 0;
        while eval(lo)?.0 > 0.0 {
            lo -= 2f64.powi(k);
            k += 1;
            if k > 60 {
                return Err(Error::NewtonFailure("could not bracket from below".into()));
            }
        }
        lo
    };
    let hi = expand_upper(|t| eval(t).map(|v| v.0), lo, 1.0)?;
    let xn = bracketed_newton(&mut eval, lo, hi, yn)?;
    let mut p = y.to_vec();
    p[n - 1] = xn;
    let val = u.value(&p);
    let mut out = vec![xn - yn];
    for j in 1..cn.m {
        out.push(cn.alpha * val[j] / val[0]);
    }
    Ok(out)
}

/// Largest `x_n` with `u^1(x', x_n) = 0` near the origin, by bisection.
fn free_boundary_height<F: Field>(u: &F, cn: &ModelConstants, xt: &[f64]) -> Result<f64> {
    let n = cn.n;
    let mut x = xt.to_vec();
    x.push(0.0);
    let mut positive = |t: f64| {
        x[n - 1] = t;
        u.value(&x)[0] > 0.0
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut k = 0;
    while positive(lo) || !positive(hi) {
        lo *= 2.0;
        hi *= 2.0;
        k += 1;
        if k > 40 {
            return Err(Error::NewtonFailure("free boundary not bracketed".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if positive(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// Samples the Legendre functions of `u` on a grid in `y`.
pub fn legendre_from_solution<F: Field>(u: &F, cn: &ModelConstants, grid: TensorGrid) -> Result<LegendreState> {
    let mut g = GridField::zeros(grid, cn.m);
    for k in 0..g.grid.len() {
        let y = g.grid.point(&g.grid.unflat(k));
        let v = legendre_at(u, cn, &y)?;
        g.values[k * cn.m..(k + 1) * cn.m].copy_from_slice(&v);
    }
    LegendreState::from_grid(*cn, g)
}

/// The field `u` recovered from Legendre functions `v`: for a query `x`, solve
/// `Y + v^1(x', Y) = x_n` for `Y >= 0`, then `u^1 = α Y^κ`, `u^j = Y^κ v^j(x', Y)`.
/// Points with no such root lie in the zero phase.
#[derive(Clone, Debug)]
pub struct Reconstructed<V> {
    pub v: V,
    pub constants: ModelConstants,
}

pub fn inverse_reconstruct(v: LegendreState) -> Reconstructed<LegendreState> {
    let constants = v.constants;
    Reconstructed { v, constants }
}

impl<V: Field> Reconstructed<V> {
    pub fn new(v: V, constants: ModelConstants) -> Self {
        Reconstructed { v, constants }
    }

    /// The root `Y(x)`, or `None` in the zero phase.
    pub fn height(&self, x: &[f64]) -> Result<Option<f64>> {
        let n = self.constants.n;
        let xn = x[n - 1];
        let mut y = x.to_vec();
        let mut eval = |t: f64| -> Result<(f64, f64)> {
            y[n - 1] = t;
            let j = self.v.jet(&y);
            let d = 1.0 + j.grad[0][n - 1];
            if d < DENOMINATOR_GUARD {
                return Err(Error::DenominatorGuard(d));
            }
            Ok((t + j.value[0] - xn, d))
        };
        let f0 = eval(0.0)?.0;
        if f0 > 0.0 {
            return Ok(None);
        }
        if f0 == 0.0 {
            return Ok(Some(0.0));
        }
        let hi = expand_upper(|t| eval(t).map(|v| v.0), 0.0, -f0)?;
        bracketed_newton(eval, 0.0, hi, xn.max(0.0)).map(Some)
    }

    pub fn try_jet(&self, x: &[f64]) -> Result<FieldJet> {
        let (n, m) = (self.constants.n, self.constants.m);
        let Some(yh) = self.height(x)? else {
            return Ok(FieldJet::zero(n, m));
        };
        let mut y = x.to_vec();
        y[n - 1] = yh;
        let vj = self.v.jet(&y);
        let nn = n - 1;
        let fy = 1.0 + vj.grad[0][nn];
        if fy < DENOMINATOR_GUARD {
            return Err(Error::DenominatorGuard(fy));
        }
        // implicit derivatives of Y from F(x, Y) = Y + v^1(x', Y) - x_n
        let fx: Vec<f64> = (0..n).map(|i| if i < nn { vj.grad[0][i] } else { -1.0 }).collect();
        let fxy: Vec<f64> = (0..n).map(|i| if i < nn { vj.hess[0][i][nn] } else { 0.0 }).collect();
        let fyy = vj.hess[0][nn][nn];
        let yd: Vec<f64> = fx.iter().map(|f| -f / fy).collect();
        let mut ydd = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let fxx = if i < nn && j < nn { vj.hess[0][i][j] } else { 0.0 };
                ydd[i][j] = -(fxx + fxy[i] * yd[j] + fxy[j] * yd[i] + fyy * yd[i] * yd[j]) / fy;
            }
        }
        let (k, a) = (self.constants.kappa, self.constants.alpha);
        let p0 = yh.powf(k);
        let p1 = k * yh.powf(k - 1.0);
        let p2 = k * (k - 1.0) * yh.powf(k - 2.0);
        // Y^κ and its derivatives in x
        let mut pw = FieldJet::zero(n, 1);
        pw.value[0] = p0;
        for i in 0..n {
            pw.grad[0][i] = p1 * yd[i];
            for j in 0..n {
                pw.hess[0][i][j] = p2 * yd[i] * yd[j] + p1 * ydd[i][j];
            }
        }
        let mut out = FieldJet::zero(n, m);
        out.value[0] = a * pw.value[0];
        for i in 0..n {
            out.grad[0][i] = a * pw.grad[0][i];
            for j in 0..n {
                out.hess[0][i][j] = a * pw.hess[0][i][j];
            }
        }
        for c in 1..m {
            // w(x) = v^c(x', Y(x))
            let g = &vj.grad[c];
            let h = &vj.hess[c];
            let wd: Vec<f64> = (0..n).map(|i| if i < nn { g[i] } else { 0.0 } + g[nn] * yd[i]).collect();
            let w = vj.value[c];
            out.value[c] = pw.value[0] * w;
            for i in 0..n {
                out.grad[c][i] = pw.grad[0][i] * w + pw.value[0] * wd[i];
                for j in 0..n {
                    let mut wdd = h[nn][nn] * yd[i] * yd[j] + g[nn] * ydd[i][j];
                    if i < nn && j < nn {
                        wdd += h[i][j];
                    }
                    if i < nn {
                        wdd += h[i][nn] * yd[j];
                    }
                    if j < nn {
                        wdd += h[j][nn] * yd[i];
                    }
                    out.hess[c][i][j] = pw.hess[0][i][j] * w
                        + pw.grad[0][i] * wd[j]
                        + pw.grad[0][j] * wd[i]
                        + pw.value[0] * wdd;
                }
            }
        }
        Ok(out)
    }
}

impl<V: Field> Field for Reconstructed<V> {
    fn dim(&self) -> usize {
        self.constants.n
    }

    fn components(&self) -> usize {
        self.constants.m
    }

    /// NaN-filled when the inversion fails; use `try_jet` for the error.
    fn jet(&self, x: &[f64]) -> FieldJet {
        self.try_jet(x).unwrap_or_else(|_| {
            let mut j = FieldJet::zero(self.constants.n, self.constants.m);
            j.value.iter_mut().for_each(|v| *v = f64::NAN);
            j
        })
    }
}

/// `v_r(y) = (v^1(r y)/r, v^2(r y), ..., v^m(r y))`
pub fn rescale_legendre(v: &LegendreState, r: f64) -> Result<LegendreState> {
    v.rescale(r)
}
