use crate::error::{Error, Result};
use crate::exact::ModelConstants;
use crate::hodograph::coefficient_series;
use crate::series::{Scalar, TruncatedSeries};

/// One entry `A^j_{kl}` of the principal part, as a series.
pub type PrincipalTerm<T> = (usize, usize, TruncatedSeries<T>);

/// A system `y_n ∂_n^2 v^j + γ_j ∂_n v^j = y_n Σ_{kl} A^j_{kl}(∇v) ∂_{kl} v^j + g^j(v, ∇v)`
/// whose coefficient functions act on truncated series.
///
/// `grads[j][k]` is `∂_k v^j`. All series handed to the callbacks share one
/// order, and the returned series must have that order.
pub trait DegenerateSystem: Sync {
    fn dim(&self) -> usize;

    fn components(&self) -> usize;

    fn gamma<T: Scalar>(&self) -> Result<Vec<T>>;

    /// Nonzero entries of `A^j` for each component `j`.
    fn principal<T: Scalar>(&self, grads: &[Vec<TruncatedSeries<T>>]) -> Result<Vec<Vec<PrincipalTerm<T>>>>;

    fn source<T: Scalar>(&self, v: &[TruncatedSeries<T>], grads: &[Vec<TruncatedSeries<T>>]) -> Result<Vec<TruncatedSeries<T>>>;
}

/// `y_n ∂_n^2 v^j + γ_j ∂_n v^j - y_n Σ A^j_{kl} ∂_{kl} v^j - g^j` for series
/// `v` of order `s >= 2`. The result has order `s - 2` and is exact through it.
pub fn system_residual<S: DegenerateSystem, T: Scalar>(sys: &S, v: &[TruncatedSeries<T>]) -> Result<Vec<TruncatedSeries<T>>> {
    let n = sys.dim();
    let s = v[0].order();
    if s < 2 {
        return Err(Error::InvalidArgument(format!("residual needs order >= 2, got {s}")));
    }
    let o = s - 2;
    let gamma = sys.gamma::<T>()?;
    let vo: Vec<TruncatedSeries<T>> = v.iter().map(|x| x.with_order(o)).collect();
    let grads: Vec<Vec<TruncatedSeries<T>>> =
        v.iter().map(|x| (0..n).map(|k| x.differentiate(k).with_order(o)).collect()).collect();
    let a = sys.principal(&grads)?;
    let g = sys.source(&vo, &grads)?;
    let mut out = Vec::with_capacity(v.len());
    for (j, vj) in v.iter().enumerate() {
        let mut inner = vj.differentiate(n - 1).differentiate(n - 1).with_order(o);
        for (k, l, coef) in &a[j] {
            let d = vj.differentiate(*k).differentiate(*l).with_order(o);
            inner = &inner - &(coef * &d);
        }
        let r = &(&inner.times_variable(n - 1) + &grads[j][n - 1].scale(&gamma[j])) - &g[j];
        out.push(r);
    }
    Ok(out)
}

/// The transformed free-boundary system with `γ_1 = 2(κ-1)`, `γ_j = 2κ`,
/// `A_kk = -1` for `k < n`, `A_ln = -a_l`, `g^1 = b`,
/// `g^j = -κ Σ a_l ∂_l v^j - c ∂_n v^j`.
#[derive(Clone, Copy, Debug)]
pub struct ModelSystem {
    pub constants: ModelConstants,
}

pub fn instantiate_model(constants: ModelConstants) -> ModelSystem {
    ModelSystem { constants }
}

impl DegenerateSystem for ModelSystem {
    fn dim(&self) -> usize {
        self.constants.n
    }

    fn components(&self) -> usize {
        self.constants.m
    }

    fn gamma<T: Scalar>(&self) -> Result<Vec<T>> {
        let k: T = self.constants.kappa_as()?;
        let two = T::from_i64(2);
        Ok((0..self.constants.m)
            .map(|j| if j == 0 { two.clone() * (k.clone() - T::one()) } else { two.clone() * k.clone() })
            .collect())
    }

    fn principal<T: Scalar>(&self, grads: &[Vec<TruncatedSeries<T>>]) -> Result<Vec<Vec<PrincipalTerm<T>>>> {
        let n = self.constants.n;
        let vprime: Vec<TruncatedSeries<T>> = Vec::new();
        let co = coefficient_series(&grads[0], &vprime, &self.constants)?;
        let (dim, order) = (grads[0][0].dim(), grads[0][0].order());
        let mut row = Vec::new();
        for k in 0..n - 1 {
            row.push((k, k, TruncatedSeries::constant(dim, order, -T::one())));
        }
        for (l, al) in co.a.iter().enumerate() {
            row.push((l, n - 1, -al));
        }
        Ok(vec![row; self.constants.m])
    }

    fn source<T: Scalar>(&self, v: &[TruncatedSeries<T>], grads: &[Vec<TruncatedSeries<T>>]) -> Result<Vec<TruncatedSeries<T>>> {
        let n = self.constants.n;
        let kappa: T = self.constants.kappa_as()?;
        let co = coefficient_series(&grads[0], &v[1..], &self.constants)?;
        let mut out = vec![co.b.clone()];
        for g in &grads[1..] {
            let mut drift = TruncatedSeries::zero(g[0].dim(), g[0].order());
            for l in 0..n {
                drift = &drift + &(&co.a[l] * &g[l]);
            }
            out.push(-&(&drift.scale(&kappa) + &(&co.c * &g[n - 1])));
        }
        Ok(out)
    }
}

/// A monomial `c v^a Π (∂_k v^i)^{b_ik}` in the source of a polynomial system.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceTerm {
    pub coef: (i64, i64),
    /// exponent of each component `v^i`
    pub v_pow: Vec<u32>,
    /// exponent of each `∂_k v^i`, indexed `[i][k]`
    pub grad_pow: Vec<Vec<u32>>,
}

/// A system with rational constant `γ_j`, `A^j_kk = -1` for `k < n`,
/// `A^j_nn = Σ_i λ_ji ∂_n v^i`, and a polynomial source. Used for toy
/// problems with closed-form oracles.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialSystem {
    pub n: usize,
    pub gamma: Vec<(i64, i64)>,
    /// `λ_ji`
    pub a_nn: Vec<Vec<(i64, i64)>>,
    pub source: Vec<Vec<SourceTerm>>,
}

impl PolynomialSystem {
    /// Rejects sources with a linear `∂_n v` term, which would break the
    /// structural condition `∂_{v_n} g(0,0) = 0`.
    pub fn new(n: usize, gamma: Vec<(i64, i64)>, a_nn: Vec<Vec<(i64, i64)>>, source: Vec<Vec<SourceTerm>>) -> Result<Self> {
        let m = gamma.len();
        if a_nn.len() != m || source.len() != m || a_nn.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidArgument("component counts disagree".into()));
        }
        for t in source.iter().flatten() {
            let deg: u32 = t.v_pow.iter().sum::<u32>() + t.grad_pow.iter().flatten().sum::<u32>();
            let dn: u32 = t.grad_pow.iter().map(|g| g[n - 1]).sum();
            if deg == 1 && dn == 1 {
                return Err(Error::InvalidArgument("source is linear in a vertical derivative".into()));
            }
        }
        Ok(PolynomialSystem { n, gamma, a_nn, source })
    }
}

impl DegenerateSystem for PolynomialSystem {
    fn dim(&self) -> usize {
        self.n
    }

    fn components(&self) -> usize {
        self.gamma.len()
    }

    fn gamma<T: Scalar>(&self) -> Result<Vec<T>> {
        Ok(self.gamma.iter().map(|&(a, b)| T::from_ratio(a, b)).collect())
    }

    fn principal<T: Scalar>(&self, grads: &[Vec<TruncatedSeries<T>>]) -> Result<Vec<Vec<PrincipalTerm<T>>>> {
        let n = self.n;
        let (dim, order) = (grads[0][0].dim(), grads[0][0].order());
        Ok(self
            .a_nn
            .iter()
            .map(|lam| {
                let mut row: Vec<PrincipalTerm<T>> =
                    (0..n - 1).map(|k| (k, k, TruncatedSeries::constant(dim, order, -T::one()))).collect();
                let mut ann = TruncatedSeries::zero(dim, order);
                for (i, &(a, b)) in lam.iter().enumerate() {
                    if a != 0 {
                        ann = &ann + &grads[i][n - 1].scale(&T::from_ratio(a, b));
                    }
                }
                row.push((n - 1, n - 1, ann));
                row
            })
            .collect())
    }

    fn source<T: Scalar>(&self, v: &[TruncatedSeries<T>], grads: &[Vec<TruncatedSeries<T>>]) -> Result<Vec<TruncatedSeries<T>>> {
        let (dim, order) = (v[0].dim(), v[0].order());
        Ok(self
            .source
            .iter()
            .map(|terms| {
                let mut acc = TruncatedSeries::zero(dim, order);
                for t in terms {
                    let mut p = TruncatedSeries::constant(dim, order, T::from_ratio(t.coef.0, t.coef.1));
                    for (i, &e) in t.v_pow.iter().enumerate() {
                        for _ in 0..e {
                            p = &p * &v[i];
                        }
                    }
                    for (i, row) in t.grad_pow.iter().enumerate() {
                        for (k, &e) in row.iter().enumerate() {
                            for _ in 0..e {
                                p = &p * &grads[i][k];
                            }
                        }
                    }
                    acc = &acc + &p;
                }
                acc
            })
            .collect())
    }
}

/// `A^j_nn` at a constant gradient, `[j]`.
pub fn vertical_principal_at<S: DegenerateSystem>(sys: &S, grad: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = sys.dim();
    let grads: Vec<Vec<TruncatedSeries<f64>>> =
        grad.iter().map(|g| g.iter().map(|&x| TruncatedSeries::constant(n, 0, x)).collect()).collect();
    Ok(sys
        .principal(&grads)?
        .into_iter()
        .map(|row| row.iter().filter(|(k, l, _)| *k == n - 1 && *l == n - 1).map(|(_, _, s)| s.constant_term()).sum())
        .collect())
}

/// `∂g^j/∂(∂_n v^i)` at constant `(v, ∇v)` by central differences, `[j][i]`.
pub fn source_jacobian_at<S: DegenerateSystem>(sys: &S, v: &[f64], grad: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let (n, m) = (sys.dim(), sys.components());
    let eval = |grad: &[Vec<f64>]| -> Result<Vec<f64>> {
        let vs: Vec<TruncatedSeries<f64>> = v.iter().map(|&x| TruncatedSeries::constant(n, 0, x)).collect();
        let gs: Vec<Vec<TruncatedSeries<f64>>> =
            grad.iter().map(|g| g.iter().map(|&x| TruncatedSeries::constant(n, 0, x)).collect()).collect();
        Ok(sys.source(&vs, &gs)?.iter().map(|s| s.constant_term()).collect())
    };
    let h = 1e-6;
    let mut jac = vec![vec![0.0; m]; m];
    for i in 0..m {
        let mut gp = grad.to_vec();
        let mut gm = grad.to_vec();
        gp[i][n - 1] += h;
        gm[i][n - 1] -= h;
        let (fp, fm) = (eval(&gp)?, eval(&gm)?);
        for j in 0..m {
            jac[j][i] = (fp[j] - fm[j]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Largest violation of `A^j_nn(0) = 0` and `∂_{v_n^i} g^j(0,0) = 0`.
pub fn structural_defect<S: DegenerateSystem>(sys: &S) -> Result<f64> {
    let (n, m) = (sys.dim(), sys.components());
    let zero = vec![vec![0.0; n]; m];
    let a = vertical_principal_at(sys, &zero)?;
    let j = source_jacobian_at(sys, &vec![0.0; m], &zero)?;
    Ok(a.iter().chain(j.iter().flatten()).fold(0.0, |acc, x| acc.max(x.abs())))
}
