use crate::degenerate::GridField;
use crate::error::{Error, Result};
use crate::exact::{Field, FieldJet, ModelConstants};
use crate::series::{Scalar, TruncatedSeries};

/// Legendre functions `v = (v^1, ..., v^m)` of `y` in the upper half-space,
/// held either as truncated series (exact algebra through the truncation
/// order) or as grid samples (finite differences).
#[derive(Clone, Debug)]
pub enum LegendreRepr {
    Series(Vec<TruncatedSeries<f64>>),
    Grid(GridField),
}

#[derive(Clone, Debug)]
pub struct LegendreState {
    pub constants: ModelConstants,
    pub repr: LegendreRepr,
}

impl LegendreState {
    pub fn from_series(constants: ModelConstants, v: Vec<TruncatedSeries<f64>>) -> Result<Self> {
        if v.len() != constants.m || v.iter().any(|s| s.dim() != constants.n) {
            return Err(Error::InvalidArgument(format!(
                "expected {} series in dimension {}",
                constants.m, constants.n
            )));
        }
        Ok(LegendreState { constants, repr: LegendreRepr::Series(v) })
    }

    pub fn from_grid(constants: ModelConstants, g: GridField) -> Result<Self> {
        if g.m != constants.m || g.grid.dim() != constants.n {
            return Err(Error::InvalidArgument("grid shape does not match constants".into()));
        }
        g.check_finite()?;
        Ok(LegendreState { constants, repr: LegendreRepr::Grid(g) })
    }

    /// The zero state: the standard half-space solution.
    pub fn zero(constants: ModelConstants, order: usize) -> Self {
        let v = vec![TruncatedSeries::zero(constants.n, order); constants.m];
        LegendreState { constants, repr: LegendreRepr::Series(v) }
    }

    pub fn grid(&self) -> Option<&GridField> {
        match &self.repr {
            LegendreRepr::Grid(g) => Some(g),
            LegendreRepr::Series(_) => None,
        }
    }

    pub fn series(&self) -> Option<&[TruncatedSeries<f64>]> {
        match &self.repr {
            LegendreRepr::Series(v) => Some(v),
            LegendreRepr::Grid(_) => None,
        }
    }

    /// `v_r(y) = (v^1(r y) / r, v^2(r y), ..., v^m(r y))`
    pub fn rescale(&self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("scaling factor must be positive, got {r}")));
        }
        let repr = match &self.repr {
            LegendreRepr::Series(v) => LegendreRepr::Series(rescale_series(v, &r)),
            LegendreRepr::Grid(g) => {
                let mut g = g.clone();
                for a in &mut g.grid.axes {
                    a.lo /= r;
                    a.hi /= r;
                }
                for k in 0..g.grid.len() {
                    g.values[k * g.m] /= r;
                }
                LegendreRepr::Grid(g)
            }
        };
        Ok(LegendreState { constants: self.constants, repr })
    }

    /// Sup over samples of `|v^1| + |∇v^1|` and of `|v^j|`, the two parts of the
    /// smallness normalization.
    pub fn smallness(&self, samples: &[Vec<f64>]) -> (f64, f64) {
        let mut c1 = 0.0f64;
        let mut c0 = 0.0f64;
        for y in samples {
            let j = self.jet(y);
            let g = j.grad[0].iter().map(|v| v.abs()).fold(0.0, f64::max);
            c1 = c1.max(j.value[0].abs().max(g));
            for k in 1..j.value.len() {
                c0 = c0.max(j.value[k].abs());
            }
        }
        (c1, c0)
    }
}

pub fn rescale_series<T: Scalar>(v: &[TruncatedSeries<T>], r: &T) -> Vec<TruncatedSeries<T>> {
    let rr = r.clone();
    v.iter()
        .enumerate()
        .map(|(j, s)| {
            let scaled = s.rescale_axes(&vec![rr.clone(); s.dim()]);
            if j == 0 {
                scaled.scale(&(T::one() / rr.clone()))
            } else {
                scaled
            }
        })
        .collect()
}

/// Value, gradient and Hessian of truncated series at a point.
pub fn series_jet(v: &[TruncatedSeries<f64>], y: &[f64]) -> FieldJet {
    let n = y.len();
    let mut jet = FieldJet::zero(n, v.len());
    for (j, s) in v.iter().enumerate() {
        for (mu, c) in s.terms() {
            let coef = c / mu.factorial();
            let e = mu.entries();
            let pw = |i: usize, d: u32| -> f64 {
                if e[i] < d {
                    0.0
                } else {
                    let k = e[i] as i32;
                    let fall: f64 = (0..d as i32).map(|t| (k - t) as f64).product();
                    fall * y[i].powi(k - d as i32)
                }
            };
            let base: Vec<f64> = (0..n).map(|i| pw(i, 0)).collect();
            let prod_except = |skip: &[usize]| -> f64 {
                (0..n).filter(|i| !skip.contains(i)).map(|i| base[i]).product()
            };
            jet.value[j] += coef * prod_except(&[]);
            for a in 0..n {
                let da = pw(a, 1);
                if da == 0.0 {
                    continue;
                }
                jet.grad[j][a] += coef * da * prod_except(&[a]);
                jet.hess[j][a][a] += coef * pw(a, 2) * prod_except(&[a]);
                for b in 0..n {
                    if b != a {
                        jet.hess[j][a][b] += coef * da * pw(b, 1) * prod_except(&[a, b]);
                    }
                }
            }
        }
    }
    jet
}

impl Field for LegendreState {
    fn dim(&self) -> usize {
        self.constants.n
    }

    fn components(&self) -> usize {
        self.constants.m
    }

    fn jet(&self, y: &[f64]) -> FieldJet {
        match &self.repr {
            LegendreRepr::Series(v) => series_jet(v, y),
            LegendreRepr::Grid(g) => g.interpolate(y),
        }
    }

    fn value(&self, y: &[f64]) -> Vec<f64> {
        match &self.repr {
            LegendreRepr::Series(v) => v.iter().map(|s| s.evaluate(y)).collect(),
            LegendreRepr::Grid(g) => g.value(y),
        }
    }
}
