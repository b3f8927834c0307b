use crate::error::{Error, Result};
use crate::series::{IndexTable, MultiIndex, Scalar, TruncatedSeries};

use super::data::CauchyData;
use super::system::{system_residual, DegenerateSystem};

const NEWTON_MAX: usize = 100;

/// Output of the Taylor recursion: all derivative values `V^j_μ` with
/// `|μ| + μ_n <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct CkSolution<T: Scalar = f64> {
    pub v: Vec<TruncatedSeries<T>>,
    /// `∂_n v(0)`
    pub p: Vec<T>,
    pub order: usize,
}

impl<T: Scalar> CkSolution<T> {
    pub fn to_f64(&self) -> CkSolution<f64> {
        CkSolution {
            v: self.v.iter().map(|s| s.to_f64()).collect(),
            p: self.p.iter().map(|x| x.to_f64()).collect(),
            order: self.order,
        }
    }
}

/// `∂_n v(0)` and the trace of `∂_n v` on `y_n = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrder<T: Scalar = f64> {
    pub p: Vec<T>,
    pub trace: Vec<TruncatedSeries<T>>,
}

fn with_vertical<T: Scalar>(v0: &[TruncatedSeries<T>], p: &[T]) -> Vec<TruncatedSeries<T>> {
    let n = v0[0].dim();
    v0.iter()
        .zip(p)
        .map(|(s, pj)| {
            let mut s = s.with_order(2);
            s.set(&MultiIndex::unit(n, n - 1), pj.clone());
            s
        })
        .collect()
}

/// Residual of the equations at the origin as a function of `p = ∂_n v(0)`.
fn first_order_map<S: DegenerateSystem, T: Scalar>(sys: &S, v0: &[TruncatedSeries<T>], p: &[T]) -> Result<Vec<T>> {
    Ok(system_residual(sys, &with_vertical(v0, p))?.iter().map(|r| r.constant_term()).collect())
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Damped Newton from `p = 0` on `γ_j p_j = g^j(v_0(0), ∇'v_0(0), p)`.
pub fn newton_first_order<S: DegenerateSystem>(sys: &S, v0: &[TruncatedSeries<f64>]) -> Result<Vec<f64>> {
    let m = sys.components();
    let f = |p: &[f64]| first_order_map(sys, v0, p);
    let mut p = vec![0.0; m];
    let mut fp = f(&p)?;
    for _ in 0..NEWTON_MAX {
        let res = sup(&fp);
        if res <= 1e-15 {
            return Ok(p);
        }
        let mut jac = vec![vec![0.0; m]; m];
        for i in 0..m {
            let h = 1e-7 * (1.0 + p[i].abs());
            let (mut a, mut b) = (p.clone(), p.clone());
            a[i] += h;
            b[i] -= h;
            let (fa, fb) = (f(&a)?, f(&b)?);
            for j in 0..m {
                jac[j][i] = (fa[j] - fb[j]) / (2.0 * h);
            }
        }
        let step = solve_dense(jac, fp.iter().map(|x| -x).collect())
            .ok_or_else(|| Error::SingularBlock { m, index: MultiIndex::zero(sys.dim()) })?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = p.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
            let ft = f(&trial)?;
            if sup(&ft) < res || lambda < 1e-9 {
                let moved = lambda * sup(&step);
                p = trial;
                fp = ft;
                if moved <= 1e-16 * (1.0 + sup(&p)) {
                    return Ok(p);
                }
                break;
            }
            lambda *= 0.5;
        }
        if !p.iter().all(|x| x.is_finite()) {
            break;
        }
    }
    if sup(&fp) <= 1e-13 {
        return Ok(p);
    }
    Err(Error::NewtonFailure(format!("first-order system residual {:e} at p = {p:?}", sup(&fp))))
}

/// The first-order root in the scalar type of the data. Exact mode runs Newton
/// in binary64 and accepts a rational candidate only if its residual is zero.
pub fn first_order_root<S: DegenerateSystem, T: Scalar>(sys: &S, data: &CauchyData<T>) -> Result<Vec<T>> {
    let v0f: Vec<TruncatedSeries<f64>> = data.v0.iter().map(|s| s.to_f64()).collect();
    let pf = newton_first_order(sys, &v0f)?;
    if !T::EXACT {
        return Ok(pf.iter().map(|&x| T::from_f64(x)).collect());
    }
    let cands: Vec<Vec<T>> = pf
        .iter()
        .map(|&x| {
            let mut c = T::snap_candidates(x);
            c.reverse();
            c.insert(0, T::from_f64(x));
            c.truncate(12);
            c
        })
        .collect();
    let mut pick = vec![0usize; cands.len()];
    loop {
        let p: Vec<T> = pick.iter().zip(&cands).map(|(&i, c)| c[i].clone()).collect();
        if first_order_map(sys, &data.v0, &p)?.iter().all(|r| r.is_zero()) {
            return Ok(p);
        }
        // next combination
        let mut k = 0;
        loop {
            if k == pick.len() {
                return Err(Error::NotRepresentable(format!("first-order root near {pf:?} is not a small rational")));
            }
            pick[k] += 1;
            if pick[k] < cands[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub(crate) fn solve_dense<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let m = b.len();
    let scale = a.iter().flatten().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].to_f64().abs().total_cmp(&a[j][col].to_f64().abs()))?;
        let pv = a[piv][col].clone();
        if pv.is_zero() || (!T::EXACT && pv.to_f64().abs() <= 1e-13 * scale) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..m {
            let f = a[r][col].clone() / a[col][col].clone();
            if f.is_zero() {
                continue;
            }
            for c in col..m {
                let t = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - t;
            }
            let t = b[col].clone() * f;
            b[r] = b[r].clone() - t;
        }
    }
    let mut x = vec![T::zero(); m];
    for r in (0..m).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..m {
            acc = acc - a[r][c].clone() * x[c].clone();
        }
        x[r] = acc / a[r][r].clone();
    }
    Some(x)
}

/// Order-by-order Taylor recursion. At weighted order `t >= 3` the unknowns
/// `V_{μ+e_n}` with `|μ| + μ_n = t - 2` enter the residual coefficient at `μ`
/// affinely through an `m x m` block, which is recovered by probing and solved.
pub fn ck_expand<S: DegenerateSystem, T: Scalar>(sys: &S, data: &CauchyData<T>, order: usize) -> Result<CkSolution<T>> {
    let (n, m) = (sys.dim(), sys.components());
    if data.components() != m || data.dim() != n {
        return Err(Error::InvalidArgument(format!(
            "data has {} components in dimension {}, system expects {m} in {n}",
            data.components(),
            data.dim()
        )));
    }
    if order < 1 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    if order > 40 {
        return Err(Error::OrderOverflow(order, 40));
    }
    let p = first_order_root(sys, data)?;
    let mut v: Vec<TruncatedSeries<T>> = data.v0.iter().map(|s| s.with_order(order)).collect();
    if order >= 2 {
        let en = MultiIndex::unit(n, n - 1);
        for (s, pj) in v.iter_mut().zip(&p) {
            s.set(&en, pj.clone());
        }
    }
    for t in 3..=order {
        let base: Vec<TruncatedSeries<T>> = v.iter().map(|s| s.with_order(t)).collect();
        let r0 = system_residual(sys, &base)?;
        let eqs: Vec<MultiIndex> =
            IndexTable::get(n, t - 2).indices.iter().filter(|mu| mu.weighted_order() as usize == t - 2).cloned().collect();
        let unknown = |mu: &MultiIndex| mu.bump(n - 1);
        let mut cols = Vec::with_capacity(m);
        for i in 0..m {
            let mut probe = base.clone();
            for mu in &eqs {
                probe[i].set(&unknown(mu), T::one());
            }
            cols.push(system_residual(sys, &probe)?);
        }
        for mu in &eqs {
            let a: Vec<Vec<T>> = (0..m)
                .map(|j| (0..m).map(|i| cols[i][j].coeff(mu) - r0[j].coeff(mu)).collect())
                .collect();
            let rhs: Vec<T> = (0..m).map(|j| -r0[j].coeff(mu)).collect();
            let x = solve_dense(a, rhs).ok_or_else(|| Error::SingularBlock { m, index: mu.clone() })?;
            for (s, xj) in v.iter_mut().zip(x) {
                s.set(&unknown(mu), xj);
            }
        }
    }
    Ok(CkSolution { v, p, order })
}

/// `p = ∂_n v(0)` and the trace of `∂_n v` through tangential order `order`.
pub fn solve_first_order<S: DegenerateSystem, T: Scalar>(sys: &S, data: &CauchyData<T>, order: usize) -> Result<FirstOrder<T>> {
    let sol = ck_expand(sys, data, order + 2)?;
    let n = sys.dim();
    let trace = sol.v.iter().map(|s| s.differentiate(n - 1).trace().with_order(order)).collect();
    Ok(FirstOrder { p: sol.p, trace })
}
