use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{omega, weiss_profile, Field, ModelConstants, QuadratureSpec};

use super::grid::TensorGrid;

/// Absolute tolerance on `W - ω_q` for a regular verdict.
pub const OMEGA_TOL: f64 = 5e-3;

/// Level-set interface of `|u| > threshold` sampled on a grid: a polyline
/// (segments between crossing points) in 2D, a bare point set in 3D.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Interface {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub segments: Vec<[usize; 2]>,
    /// largest grid spacing, the resolution of the interface
    pub spacing: f64,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn segment_dist(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(p, q)| q - p).collect();
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if len2 > 0.0 {
        (x.iter().zip(a).zip(&ab).map(|((xi, ai), d)| (xi - ai) * d).sum::<f64>() / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let p: Vec<f64> = a.iter().zip(&ab).map(|(ai, d)| ai + t * d).collect();
    dist(x, &p)
}

impl Interface {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Euclidean distance from `x` to the interface.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        let mut d = self.points.iter().map(|p| dist(x, p)).fold(f64::INFINITY, f64::min);
        for s in &self.segments {
            d = d.min(segment_dist(x, &self.points[s[0]], &self.points[s[1]]));
        }
        d
    }

    /// `max |x_n - g(x')|` over the interface points.
    pub fn max_deviation(&self, g: impl Fn(&[f64]) -> f64) -> f64 {
        self.points
            .iter()
            .map(|p| (p[self.dim - 1] - g(&p[..self.dim - 1])).abs())
            .fold(0.0, f64::max)
    }
}

/// Crossing points of `|u| - threshold` along grid edges, joined into
/// segments cell by cell in 2D (marching squares).
pub fn extract_free_boundary<F: Field>(u: &F, grid: &TensorGrid, threshold: f64) -> Result<Interface> {
    let n = grid.dim();
    if n != 2 && n != 3 || u.dim() != n {
        return Err(Error::InvalidArgument(format!("interface extraction needs a 2D or 3D grid, got {n}")));
    }
    let len = grid.len();
    let level: Vec<f64> = (0..len)
        .map(|k| {
            let v = u.value(&grid.point(&grid.unflat(k)));
            v.iter().map(|c| c * c).sum::<f64>().sqrt() - threshold
        })
        .collect();
    if let Some(k) = level.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite sample at {:?}", grid.point(&grid.unflat(k)))));
    }
    let inside = |k: usize| level[k] > 0.0;
    let mut iface = Interface {
        dim: n,
        spacing: grid.axes.iter().map(|a| a.spacing()).fold(0.0, f64::max),
        ..Default::default()
    };
    let mut on_edge: HashMap<(usize, usize), usize> = HashMap::new();
    let mut crossing = |a: usize, b: usize, iface: &mut Interface| -> Option<usize> {
        if inside(a) == inside(b) {
            return None;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&i) = on_edge.get(&key) {
            return Some(i);
        }
        let (pa, pb) = (grid.point(&grid.unflat(a)), grid.point(&grid.unflat(b)));
        let t = level[a] / (level[a] - level[b]);
        iface.points.push(pa.iter().zip(&pb).map(|(x, y)| x + t * (y - x)).collect());
        on_edge.insert(key, iface.points.len() - 1);
        Some(iface.points.len() - 1)
    };
    if n == 3 {
        for k in 0..len {
            let idx = grid.unflat(k);
            for a in 0..3 {
                if idx[a] + 1 < grid.axes[a].count {
                    crossing(k, k + grid.stride(a), &mut iface);
                }
            }
        }
        return Ok(iface);
    }
    let (nx, ny) = (grid.axes[0].count, grid.axes[1].count);
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let c = [grid.flat(&[i, j]), grid.flat(&[i + 1, j]), grid.flat(&[i + 1, j + 1]), grid.flat(&[i, j + 1])];
            let hits: Vec<usize> = (0..4).filter_map(|e| crossing(c[e], c[(e + 1) % 4], &mut iface)).collect();
            match hits.len() {
                2 => iface.segments.push([hits[0], hits[1]]),
                4 => {
                    // saddle: the cell average decides which corners connect
                    let centre: f64 = c.iter().map(|&k| level[k]).sum::<f64>() / 4.0;
                    if (centre > 0.0) == inside(c[0]) {
                        iface.segments.push([hits[0], hits[1]]);
                        iface.segments.push([hits[2], hits[3]]);
                    } else {
                        iface.segments.push([hits[3], hits[0]]);
                        iface.segments.push([hits[1], hits[2]]);
                    }
                }
                _ => {}
            }
        }
    }
    Ok(iface)
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub energies: Vec<(f64, f64)>,
    pub omega: f64,
    /// `W - ω_q` at the smallest radius
    pub deviation: f64,
    pub regular_consistent: bool,
}

/// Compares the Weiss energy at `x0` with the half-space value `ω_q`.
/// `x0` must lie within two grid cells of the interface.
pub fn classify_regular<F: Field>(
    u: &F,
    cn: &ModelConstants,
    x0: &[f64],
    radii: &[f64],
    iface: &Interface,
    spec: &QuadratureSpec,
) -> Result<Verdict> {
    if iface.is_empty() {
        return Err(Error::NoInterface("the extracted interface is empty".into()));
    }
    let d = iface.distance_to(x0);
    if d > 2.0 * iface.spacing {
        return Err(Error::NoInterface(format!("{x0:?} is {d:e} away from the interface")));
    }
    if radii.is_empty() {
        return Err(Error::InvalidArgument("no radii given".into()));
    }
    let energies = weiss_profile(u, cn, x0, radii, spec)?;
    let omega = omega(cn.n, cn.q)?;
    let smallest = energies.iter().min_by(|a, b| a.0.total_cmp(&b.0)).unwrap();
    let deviation = smallest.1 - omega;
    Ok(Verdict { regular_consistent: deviation.abs() < OMEGA_TOL, energies, omega, deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degenerate::Axis;
    use crate::exact::{FnField, FieldJet, HalfSpaceSolution};

    fn square(k: usize) -> TensorGrid {
        TensorGrid::new(vec![Axis::uniform(-1.0, 1.0, k); 2]).unwrap()
    }

    #[test]
    fn tilted_plane_is_recovered() {
        let c = ModelConstants::new(0.5, 2, 1).unwrap();
        let nu = [0.6, 0.8];
        let u = HalfSpaceSolution::new(c, &nu, &[1.0]).unwrap();
        let grid = square(41);
        let iface = extract_free_boundary(&u, &grid, 0.0).unwrap();
        assert!(!iface.is_empty() && !iface.segments.is_empty());
        for p in &iface.points {
            assert!((p[0] * nu[0] + p[1] * nu[1]).abs() <= iface.spacing);
        }
        let v = classify_regular(&u, &c, &[0.0, 0.0], &[0.25, 0.5], &iface, &QuadratureSpec::default()).unwrap();
        assert!(v.regular_consistent, "{v:?}");
    }

    #[test]
    fn three_dimensional_points() {
        let c = ModelConstants::new(0.0, 3, 1).unwrap();
        let u = HalfSpaceSolution::standard(c);
        let grid = TensorGrid::new(vec![Axis::uniform(-1.0, 1.0, 9); 3]).unwrap();
        let iface = extract_free_boundary(&u, &grid, 1e-12).unwrap();
        assert!(iface.segments.is_empty());
        assert!(iface.points.iter().all(|p| p[2].abs() <= iface.spacing));
    }

    #[test]
    fn constant_field_has_no_interface() {
        let u = FnField { n: 2, m: 1, jet: |_: &[f64]| FieldJet { value: vec![1.0], ..FieldJet::zero(2, 1) } };
        let grid = square(11);
        let iface = extract_free_boundary(&u, &grid, 0.0).unwrap();
        assert!(iface.is_empty());
        let c = ModelConstants::new(0.5, 2, 1).unwrap();
        let r = classify_regular(&u, &c, &[0.0, 0.0], &[0.5], &iface, &QuadratureSpec::default());
        assert!(matches!(r, Err(Error::NoInterface(_))));
    }

    #[test]
    fn far_point_is_rejected() {
        let c = ModelConstants::new(0.5, 2, 1).unwrap();
        let u = HalfSpaceSolution::standard(c);
        let iface = extract_free_boundary(&u, &square(11), 0.0).unwrap();
        let r = classify_regular(&u, &c, &[0.0, 0.7], &[0.1], &iface, &QuadratureSpec::default());
        assert!(matches!(r, Err(Error::NoInterface(_))));
    }
}
