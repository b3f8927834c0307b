/// Value, gradient `[component][axis]` and Hessian `[component][axis][axis]`
/// of a vector field at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldJet {
    pub value: Vec<f64>,
    pub grad: Vec<Vec<f64>>,
    pub hess: Vec<Vec<Vec<f64>>>,
}

impl FieldJet {
    pub fn zero(n: usize, m: usize) -> Self {
        FieldJet { value: vec![0.0; m], grad: vec![vec![0.0; n]; m], hess: vec![vec![vec![0.0; n]; n]; m] }
    }

    pub fn norm(&self) -> f64 {
        self.value.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn laplacian(&self) -> Vec<f64> {
        self.hess.iter().map(|h| (0..h.len()).map(|i| h[i][i]).sum()).collect()
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.grad.iter().flatten().map(|g| g * g).sum()
    }
}

/// A vector field `u: R^n -> R^m` given by callbacks.
pub trait Field: Sync {
    fn dim(&self) -> usize;

    fn components(&self) -> usize;

    fn jet(&self, x: &[f64]) -> FieldJet;

    fn value(&self, x: &[f64]) -> Vec<f64> {
        self.jet(x).value
    }
}

impl<F: Field + ?Sized> Field for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn components(&self) -> usize {
        (**self).components()
    }
    fn jet(&self, x: &[f64]) -> FieldJet {
        (**self).jet(x)
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        (**self).value(x)
    }
}

/// A field backed by a closure returning the full jet.
pub struct FnField<J> {
    pub n: usize,
    pub m: usize,
    pub jet: J,
}

impl<J> Field for FnField<J>
where
    J: Fn(&[f64]) -> FieldJet + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }
    fn components(&self) -> usize {
        self.m
    }
    fn jet(&self, x: &[f64]) -> FieldJet {
        (self.jet)(x)
    }
}

/// `u_r(x) = u(r x) / r^kappa`
pub struct Rescaled<F> {
    pub inner: F,
    pub r: f64,
    pub kappa: f64,
}

impl<F: Field> Field for Rescaled<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn components(&self) -> usize {
        self.inner.components()
    }
    fn jet(&self, x: &[f64]) -> FieldJet {
        let y: Vec<f64> = x.iter().map(|v| v * self.r).collect();
        let mut j = self.inner.jet(&y);
        let s0 = self.r.powf(-self.kappa);
        let s1 = s0 * self.r;
        let s2 = s1 * self.r;
        j.value.iter_mut().for_each(|v| *v *= s0);
        j.grad.iter_mut().flatten().for_each(|v| *v *= s1);
        j.hess.iter_mut().flatten().flatten().for_each(|v| *v *= s2);
        j
    }
}

/// Blow-up rescaling `u(r x) / r^kappa`.
pub fn rescale_blowup<F: Field>(u: F, r: f64, kappa: f64) -> crate::Result<Rescaled<F>> {
    if !(r > 0.0) {
        return Err(crate::Error::InvalidArgument(format!("rescale radius must be positive, got {r}")));
    }
    Ok(Rescaled { inner: u, r, kappa })
}
