//! Common interfaces for functions of `(x, t)`.

use crate::error::Result;

/// A real function on `R^n x R`, evaluated pointwise.
pub trait SpaceTimeField: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64], t: f64) -> f64;
}

/// A positive solution with first derivatives available, as consumed by the
/// Li-Yau quantity.
pub trait PositiveSolution {
    fn dim(&self) -> usize;
    /// Returns `(u, grad u, u_t)` at `(x, t)`.
    fn jet(&self, x: &[f64], t: f64) -> Result<(f64, Vec<f64>, f64)>;
}

/// Wraps a closure as a [`SpaceTimeField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64], f64) -> f64 + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> SpaceTimeField for FnField<F>
where
    F: Fn(&[f64], f64) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64], t: f64) -> f64 {
        (self.f)(x, t)
    }
}

/// Derivatives of a sampled field by second-order central differences.
pub struct FdSampled<'a, S: ?Sized> {
    pub field: &'a S,
    /// Spatial step.
    pub dx: f64,
    /// Time step.
    pub dt: f64,
}

impl<'a, S: SpaceTimeField + ?Sized> FdSampled<'a, S> {
    pub fn new(field: &'a S, dx: f64, dt: f64) -> Self {
        Self { field, dx, dt }
    }

    pub fn grad(&self, x: &[f64], t: f64) -> Vec<f64> {
        let mut p = x.to_vec();
        (0..x.len())
            .map(|i| {
                p[i] = x[i] + self.dx;
                let fp = self.field.value(&p, t);
                p[i] = x[i] - self.dx;
                let fm = self.field.value(&p, t);
                p[i] = x[i];
                (fp - fm) / (2.0 * self.dx)
            })
            .collect()
    }

    pub fn time_derivative(&self, x: &[f64], t: f64) -> f64 {
        (self.field.value(x, t + self.dt) - self.field.value(x, t - self.dt)) / (2.0 * self.dt)
    }

    pub fn laplacian(&self, x: &[f64], t: f64) -> f64 {
        let mut p = x.to_vec();
        let centre = self.field.value(x, t);
        let mut acc = 0.0;
        for i in 0..x.len() {
            p[i] = x[i] + self.dx;
            let fp = self.field.value(&p, t);
            p[i] = x[i] - self.dx;
            let fm = self.field.value(&p, t);
            p[i] = x[i];
            acc += fp - 2.0 * centre + fm;
        }
        acc / (self.dx * self.dx)
    }
}

impl<S: SpaceTimeField + ?Sized> PositiveSolution for FdSampled<'_, S> {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn jet(&self, x: &[f64], t: f64) -> Result<(f64, Vec<f64>, f64)> {
        Ok((self.field.value(x, t), self.grad(x, t), self.time_derivative(x, t)))
    }
}
