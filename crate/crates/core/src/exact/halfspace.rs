use super::constants::ModelConstants;
use super::field::{Field, FieldJet};
use crate::error::{Error, Result};

/// `u(x) = alpha max(x . nu, 0)^kappa e`
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpaceSolution {
    pub constants: ModelConstants,
    pub nu: Vec<f64>,
    pub e: Vec<f64>,
}

fn unit(v: &[f64], what: &str) -> Result<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("{what} must be a unit vector, |{what}| = {norm}")));
    }
    Ok(v.iter().map(|x| x / norm).collect())
}

impl HalfSpaceSolution {
    pub fn new(constants: ModelConstants, nu: &[f64], e: &[f64]) -> Result<Self> {
        if nu.len() != constants.n || e.len() != constants.m {
            return Err(Error::InvalidArgument(format!(
                "nu has {} entries and e has {}, expected n = {} and m = {}",
                nu.len(),
                e.len(),
                constants.n,
                constants.m
            )));
        }
        Ok(HalfSpaceSolution { constants, nu: unit(nu, "nu")?, e: unit(e, "e")? })
    }

    /// `nu = e_n`, `e = e_1`
    pub fn standard(constants: ModelConstants) -> Self {
        let mut nu = vec![0.0; constants.n];
        nu[constants.n - 1] = 1.0;
        let mut e = vec![0.0; constants.m];
        e[0] = 1.0;
        HalfSpaceSolution { constants, nu, e }
    }

    pub fn height(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.nu).map(|(a, b)| a * b).sum()
    }

    /// `|u(x)|^{-(1+q)/2} d_i u(x) - kappa alpha^{1/kappa} (nu . e_i) e`; zero on the
    /// exact profile wherever `x . nu > 0`.
    pub fn boundary_limit_deficit(&self, x: &[f64], i: usize) -> Result<Vec<f64>> {
        boundary_limit_deficit(self, &self.constants, &self.nu, &self.e, x, i)
    }
}

/// Deficit of the boundary-limit identity for any field, measured against the
/// half-space direction data `(nu, e)`.
pub fn boundary_limit_deficit<F: Field>(
    u: &F,
    c: &ModelConstants,
    nu: &[f64],
    e: &[f64],
    x: &[f64],
    i: usize,
) -> Result<Vec<f64>> {
    let jet = u.jet(x);
    let norm = jet.norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument(format!("u vanishes at {x:?}; deficit needs x . nu > 0")));
    }
    let scale = norm.powf(-c.half_one_plus_q());
    let target = c.kappa * c.alpha.powf(1.0 / c.kappa) * nu[i];
    Ok((0..c.m).map(|j| scale * jet.grad[j][i] - target * e[j]).collect())
}

impl Field for HalfSpaceSolution {
    fn dim(&self) -> usize {
        self.constants.n
    }

    fn components(&self) -> usize {
        self.constants.m
    }

    fn jet(&self, x: &[f64]) -> FieldJet {
        let (n, m) = (self.constants.n, self.constants.m);
        let (k, a) = (self.constants.kappa, self.constants.alpha);
        let t = self.height(x);
        let mut jet = FieldJet::zero(n, m);
        if t <= 0.0 {
            return jet;
        }
        let p0 = a * t.powf(k);
        let p1 = a * k * t.powf(k - 1.0);
        let p2 = a * k * (k - 1.0) * t.powf(k - 2.0);
        for j in 0..m {
            jet.value[j] = p0 * self.e[j];
            for i in 0..n {
                jet.grad[j][i] = p1 * self.nu[i] * self.e[j];
                for l in 0..n {
                    jet.hess[j][i][l] = p2 * self.nu[i] * self.nu[l] * self.e[j];
                }
            }
        }
        jet
    }
}

/// `Δu - |u|^{q-1} u χ_{|u|>0}` from a jet; zero where `u = 0`.
pub fn pde_residual_jet(jet: &FieldJet, q: f64) -> Vec<f64> {
    let lap = jet.laplacian();
    let norm = jet.norm();
    if norm == 0.0 {
        return lap;
    }
    let f = norm.powf(q - 1.0);
    lap.iter().zip(&jet.value).map(|(l, u)| l - f * u).collect()
}

pub fn pde_residual<F: Field>(u: &F, q: f64, x: &[f64]) -> Vec<f64> {
    pde_residual_jet(&u.jet(x), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::field::FnField;

    #[test]
    fn evaluation_examples() {
        let c = ModelConstants::new(0.0, 3, 2).unwrap();
        let h = HalfSpaceSolution::standard(c);
        assert_eq!(h.value(&[0.3, 0.1, -0.2]), vec![0.0, 0.0]);
        assert_eq!(h.value(&[0.0, 0.0, 1.0]), vec![0.5, 0.0]);
        assert!(pde_residual(&h, 0.0, &[0.4, -1.0, 0.7]).iter().all(|r| r.abs() < 1e-14));
        assert!(HalfSpaceSolution::new(c, &[1.0, 1.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn residual_of_constant_and_zero() {
        let c = 2.0;
        let u = FnField {
            n: 2,
            m: 1,
            jet: move |_: &[f64]| {
                let mut j = FieldJet::zero(2, 1);
                j.value[0] = c;
                j
            },
        };
        let r = pde_residual(&u, 0.5, &[0.0, 0.0])[0];
        assert!((r + c.abs().powf(-0.5) * c).abs() < 1e-15);
        let z = FnField { n: 2, m: 1, jet: |_: &[f64]| FieldJet::zero(2, 1) };
        assert_eq!(pde_residual(&z, 0.5, &[1.0, 1.0]), vec![0.0]);
    }

    #[test]
    fn boundary_limit_identity() {
        let c = ModelConstants::new(0.5, 2, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = HalfSpaceSolution::new(c, &[0.0, 1.0], &[s, s]).unwrap();
        for xn in [1e-3, 0.1, 2.0] {
            for i in 0..2 {
                let d = h.boundary_limit_deficit(&[0.3, xn], i).unwrap();
                assert!(d.iter().all(|v| v.abs() < 1e-12), "{d:?}");
            }
        }
    }
}
