//! Tensor-product grids (uniform tangential axes, optionally a vertical axis
//! graded as `y_n = H (k/N)^2`) and node-sampled fields with a binary file
//! format.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Field, FieldJet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisKind {
    Uniform,
    /// nodes `lo + (hi - lo) (k / (count - 1))^2`
    Graded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub kind: AxisKind,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn uniform(lo: f64, hi: f64, count: usize) -> Self {
        Axis { kind: AxisKind::Uniform, lo, hi, count }
    }

    pub fn graded(lo: f64, hi: f64, count: usize) -> Self {
        Axis { kind: AxisKind::Graded, lo, hi, count }
    }

    pub fn node(&self, k: usize) -> f64 {
        let t = k as f64 / (self.count - 1) as f64;
        match self.kind {
            AxisKind::Uniform => self.lo + (self.hi - self.lo) * t,
            AxisKind::Graded => self.lo + (self.hi - self.lo) * t * t,
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.node(k)).collect()
    }

    /// Cell `k` with `node(k) <= x <= node(k+1)` (clamped) and the local coordinate.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let t = ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0);
        let s = match self.kind {
            AxisKind::Uniform => t,
            AxisKind::Graded => t.sqrt(),
        };
        let cells = self.count - 1;
        let k = ((s * cells as f64).floor() as usize).min(cells - 1);
        let (a, b) = (self.node(k), self.node(k + 1));
        (k, ((x - a) / (b - a)).clamp(0.0, 1.0))
    }

    /// Spacing of the first cell.
    pub fn spacing(&self) -> f64 {
        self.node(1) - self.node(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorGrid {
    pub axes: Vec<Axis>,
}

impl TensorGrid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| a.count < 3 || !(a.hi > a.lo)) {
            return Err(Error::InvalidArgument("every axis needs hi > lo and at least 3 nodes".into()));
        }
        Ok(TensorGrid { axes })
    }

    /// Half-box `[-L, L]^{n-1} x [0, H]` with `count` nodes per tangential axis
    /// and a graded vertical axis with `vcount` nodes starting at `y_n = 0`.
    pub fn half_space(n: usize, half_width: f64, count: usize, height: f64, vcount: usize) -> Result<Self> {
        let mut axes = vec![Axis::uniform(-half_width, half_width, count); n - 1];
        axes.push(Axis::graded(0.0, height, vcount));
        Self::new(axes)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major flat index; the last axis varies fastest.
    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.axes).fold(0, |acc, (&i, a)| acc * a.count + i)
    }

    pub fn unflat(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for (d, a) in self.axes.iter().enumerate().rev() {
            idx[d] = k % a.count;
            k /= a.count;
        }
        idx
    }

    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.axes).map(|(&i, a)| a.node(i)).collect()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(|a| a.count).product()
    }

    pub fn is_boundary(&self, idx: &[usize]) -> bool {
        idx.iter().zip(&self.axes).any(|(&i, a)| i == 0 || i + 1 == a.count)
    }
}

/// Lagrange weights for the first and second derivative at node `i` from a
/// three-node stencil (centered in the interior, one-sided at the ends).
pub fn stencil3(nodes: &[f64], i: usize) -> ([usize; 3], [f64; 3], [f64; 3]) {
    let n = nodes.len();
    let s = if i == 0 { 0 } else if i + 1 == n { n - 3 } else { i - 1 };
    let idx = [s, s + 1, s + 2];
    let x = [nodes[s], nodes[s + 1], nodes[s + 2]];
    let x0 = nodes[i];
    let mut d1 = [0.0; 3];
    let mut d2 = [0.0; 3];
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let den = (x[a] - x[b]) * (x[a] - x[c]);
        d1[a] = ((x0 - x[b]) + (x0 - x[c])) / den;
        d2[a] = 2.0 / den;
    }
    (idx, d1, d2)
}

/// Node-sampled `m`-vector field on a tensor grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub grid: TensorGrid,
    pub m: usize,
    /// `values[flat * m + component]`
    pub values: Vec<f64>,
}

impl GridField {
    pub fn zeros(grid: TensorGrid, m: usize) -> Self {
        let len = grid.len() * m;
        GridField { grid, m, values: vec![0.0; len] }
    }

    pub fn from_fn(grid: TensorGrid, m: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let mut out = Self::zeros(grid, m);
        for k in 0..out.grid.len() {
            let v = f(&out.grid.point(&out.grid.unflat(k)));
            out.values[k * m..(k + 1) * m].copy_from_slice(&v[..m]);
        }
        out
    }

    pub fn get(&self, flat: usize, comp: usize) -> f64 {
        self.values[flat * self.m + comp]
    }

    pub fn check_finite(&self) -> Result<()> {
        if let Some(p) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite grid value at slot {p}")));
        }
        Ok(())
    }

    /// Nodal gradient and Hessian by three-point finite differences.
    pub fn nodal_jet(&self, idx: &[usize]) -> FieldJet {
        let n = self.grid.dim();
        let flat = self.grid.flat(idx);
        let mut jet = FieldJet::zero(n, self.m);
        for j in 0..self.m {
            jet.value[j] = self.get(flat, j);
        }
        let nodes: Vec<Vec<f64>> = self.grid.axes.iter().map(|a| a.nodes()).collect();
        for a in 0..n {
            let (ia, d1a, d2a) = stencil3(&nodes[a], idx[a]);
            for t in 0..3 {
                let mut p = idx.to_vec();
                p[a] = ia[t];
                let f = self.grid.flat(&p);
                for j in 0..self.m {
                    let v = self.get(f, j);
                    jet.grad[j][a] += d1a[t] * v;
                    jet.hess[j][a][a] += d2a[t] * v;
                }
            }
            for b in a + 1..n {
                let (ib, d1b, _) = stencil3(&nodes[b], idx[b]);
                for t in 0..3 {
                    for u in 0..3 {
                        let mut p = idx.to_vec();
                        p[a] = ia[t];
                        p[b] = ib[u];
                        let f = self.grid.flat(&p);
                        for j in 0..self.m {
                            let v = d1a[t] * d1b[u] * self.get(f, j);
                            jet.hess[j][a][b] += v;
                            jet.hess[j][b][a] += v;
                        }
                    }
                }
            }
        }
        jet
    }

    /// Multilinear interpolation of nodal jets.
    pub fn interpolate(&self, x: &[f64]) -> FieldJet {
        let n = self.grid.dim();
        let cells: Vec<(usize, f64)> = self.grid.axes.iter().zip(x).map(|(a, &v)| a.locate(v)).collect();
        let mut out = FieldJet::zero(n, self.m);
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = vec![0; n];
            for d in 0..n {
                let bit = (corner >> d) & 1;
                let (k, t) = cells[d];
                idx[d] = k + bit;
                w *= if bit == 1 { t } else { 1.0 - t };
            }
            if w == 0.0 {
                continue;
            }
            let j = self.nodal_jet(&idx);
            for c in 0..self.m {
                out.value[c] += w * j.value[c];
                for a in 0..n {
                    out.grad[c][a] += w * j.grad[c][a];
                    for b in 0..n {
                        out.hess[c][a][b] += w * j.hess[c][a][b];
                    }
                }
            }
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "FBGRID v1")?;
        writeln!(w, "dims {}", self.grid.dim())?;
        writeln!(w, "components {}", self.m)?;
        for (k, a) in self.grid.axes.iter().enumerate() {
            let kind = match a.kind {
                AxisKind::Uniform => "uniform",
                AxisKind::Graded => "graded",
            };
            writeln!(w, "axis {k} {kind} {:e} {:e} {}", a.lo, a.hi, a.count)?;
        }
        let spacing: Vec<String> = self.grid.axes.iter().map(|a| format!("{:e}", a.spacing())).collect();
        writeln!(w, "spacing {}", spacing.join(" "))?;
        writeln!(w, "data f64-le")?;
        let mut buf = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let marker = b"data f64-le\n";
        let pos = bytes
            .windows(marker.len())
            .position(|w| w == marker)
            .ok_or(Error::Parse { line: 0, msg: "missing `data f64-le` marker".into() })?;
        let header = std::str::from_utf8(&bytes[..pos])
            .map_err(|_| Error::Parse { line: 0, msg: "header is not UTF-8".into() })?;
        let payload = &bytes[pos + marker.len()..];
        let mut dims = None;
        let mut m = None;
        let mut axes: Vec<Option<Axis>> = Vec::new();
        for (ln, line) in header.lines().enumerate() {
            let perr = |msg: &str| Error::Parse { line: ln + 1, msg: msg.to_string() };
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok.first().copied() {
                Some("FBGRID") if tok.get(1) == Some(&"v1") => {}
                Some("FBGRID") => return Err(perr("unsupported version")),
                Some("dims") => {
                    let d: usize = tok.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| perr("bad dims"))?;
                    dims = Some(d);
                    axes = vec![None; d];
                }
                Some("components") => {
                    m = Some(tok.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| perr("bad components"))?);
                }
                Some("axis") => {
                    if tok.len() != 6 {
                        return Err(perr("axis line needs `axis k kind lo hi count`"));
                    }
                    let k: usize = tok[1].parse().map_err(|_| perr("bad axis index"))?;
                    let kind = match tok[2] {
                        "uniform" => AxisKind::Uniform,
                        "graded" => AxisKind::Graded,
                        _ => return Err(perr("unknown axis kind")),
                    };
                    let lo: f64 = tok[3].parse().map_err(|_| perr("bad lo"))?;
                    let hi: f64 = tok[4].parse().map_err(|_| perr("bad hi"))?;
                    let count: usize = tok[5].parse().map_err(|_| perr("bad count"))?;
                    let slot = axes.get_mut(k).ok_or_else(|| perr("axis index out of range"))?;
                    *slot = Some(Axis { kind, lo, hi, count });
                }
                Some("spacing") | None => {}
                Some(_) => return Err(perr("unknown header line")),
            }
        }
        let dims = dims.ok_or(Error::Parse { line: 0, msg: "missing dims".into() })?;
        let m = m.ok_or(Error::Parse { line: 0, msg: "missing components".into() })?;
        let axes: Vec<Axis> = axes
            .into_iter()
            .collect::<Option<_>>()
            .ok_or(Error::Parse { line: 0, msg: format!("expected {dims} axis lines") })?;
        let grid = TensorGrid::new(axes)?;
        if payload.len() != grid.len() * m * 8 {
            return Err(Error::Parse {
                line: 0,
                msg: format!("payload has {} bytes, expected {}", payload.len(), grid.len() * m * 8),
            });
        }
        let values = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(GridField { grid, m, values })
    }
}

impl Field for GridField {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    fn components(&self) -> usize {
        self.m
    }

    fn jet(&self, x: &[f64]) -> FieldJet {
        self.interpolate(x)
    }

    fn value(&self, x: &[f64]) -> Vec<f64> {
        let n = self.grid.dim();
        let cells: Vec<(usize, f64)> = self.grid.axes.iter().zip(x).map(|(a, &v)| a.locate(v)).collect();
        let mut out = vec![0.0; self.m];
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = vec![0; n];
            for d in 0..n {
                let bit = (corner >> d) & 1;
                idx[d] = cells[d].0 + bit;
                w *= if bit == 1 { cells[d].1 } else { 1.0 - cells[d].1 };
            }
            let f = self.grid.flat(&idx);
            for c in 0..self.m {
                out[c] += w * self.get(f, c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_axis_has_uniform_intrinsic_spacing() {
        let a = Axis::graded(0.0, 1.0, 9);
        let nodes = a.nodes();
        assert_eq!(nodes[0], 0.0);
        let d: Vec<f64> = nodes.windows(2).map(|w| 2.0 * (w[1].sqrt() - w[0].sqrt())).collect();
        assert!(d.iter().all(|x| (x - d[0]).abs() < 1e-14));
        let (k, t) = a.locate(nodes[3] + 1e-12);
        assert_eq!(k, 3);
        assert!(t < 1e-6);
    }

    #[test]
    fn finite_differences_are_exact_on_quadratics() {
        let g = TensorGrid::half_space(2, 1.0, 7, 1.0, 6).unwrap();
        let f = GridField::from_fn(g, 1, |x| vec![x[0] * x[0] + 3.0 * x[0] * x[1] - x[1] * x[1]]);
        for k in [0, 9, 20, 41] {
            let idx = f.grid.unflat(k);
            let x = f.grid.point(&idx);
            let j = f.nodal_jet(&idx);
            assert!((j.grad[0][0] - (2.0 * x[0] + 3.0 * x[1])).abs() < 1e-12);
            assert!((j.grad[0][1] - (3.0 * x[0] - 2.0 * x[1])).abs() < 1e-12);
            assert!((j.hess[0][0][1] - 3.0).abs() < 1e-11);
            assert!((j.hess[0][1][1] + 2.0).abs() < 1e-11);
        }
    }

    #[test]
    fn file_format_roundtrip_and_errors() {
        let g = TensorGrid::half_space(2, 0.5, 5, 1.0, 4).unwrap();
        let f = GridField::from_fn(g, 2, |x| vec![x[0], x[1] * 2.0]);
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        assert_eq!(GridField::read_from(&buf[..]).unwrap(), f);
        buf.truncate(buf.len() - 8);
        assert!(GridField::read_from(&buf[..]).is_err());
        assert!(GridField::read_from(&b"dims 2\n"[..]).is_err());
    }
}
