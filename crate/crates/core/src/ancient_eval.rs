//! Closed-form evaluation of measure-induced ancient solutions
//! `u(x,t) = sum_j w_j exp(t s_j + sqrt(s_j) x.xi_j)` and the pointwise
//! checks built on it: heat residual, complete monotonicity of
//! `t -> u(x,-t)`, and the Li-Yau quantity.
//!
//! All derivatives are analytic term sums. Finite differences appear only in
//! the cross-check helpers at the bottom of the module.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{PositiveSolution, SpaceTimeField};
use crate::spectral_measure::SpectralMeasure;

/// Largest exponent accepted before evaluation reports a range error.
pub const EXPONENT_LIMIT: f64 = 700.0;

/// Default maximal order for [`check_cm`].
pub const DEFAULT_CM_ORDER: usize = 8;

/// Relative tolerance on each forward difference in [`check_cm`].
pub const CM_RELATIVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
struct Term {
    s: f64,
    w: f64,
    /// `sqrt(s) * xi`
    freq: Vec<f64>,
    /// `|sqrt(s) xi|^2`, equal to `s` up to rounding in `|xi|`.
    freq_sq: f64,
}

/// Ancient solution induced by a valid [`SpectralMeasure`].
#[derive(Debug, Clone)]
pub struct AncientSolution {
    measure: SpectralMeasure,
    terms: Vec<Term>,
}

impl AncientSolution {
    pub fn new(measure: SpectralMeasure) -> Result<Self> {
        measure.ensure_valid()?;
        let terms = measure
            .atoms
            .iter()
            .map(|a| {
                let freq = a.frequency();
                let freq_sq = freq.iter().map(|c| c * c).sum();
                Term { s: a.s, w: a.w, freq, freq_sq }
            })
            .collect();
        Ok(Self { measure, terms })
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    pub fn dim(&self) -> usize {
        self.measure.dim
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    /// `exp(t s + sqrt(s) x.xi)` for each term, guarded against overflow.
    fn kernels<'a>(&'a self, x: &'a [f64], t: f64) -> impl Iterator<Item = Result<(&'a Term, f64)>> + 'a {
        self.terms.iter().map(move |term| {
            let e = t * term.s + dot(&term.freq, x);
            if e > EXPONENT_LIMIT || e.is_nan() {
                Err(Error::Range { exponent: e, threshold: EXPONENT_LIMIT })
            } else {
                Ok((term, e.exp()))
            }
        })
    }

    pub fn eval(&self, x: &[f64], t: f64) -> Result<f64> {
        self.check_point(x)?;
        self.kernels(x, t).map(|r| r.map(|(term, e)| term.w * e)).sum()
    }

    pub fn eval_grad(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let mut g = vec![0.0; self.dim()];
        for r in self.kernels(x, t) {
            let (term, e) = r?;
            for (gi, fi) in g.iter_mut().zip(&term.freq) {
                *gi += term.w * e * fi;
            }
        }
        Ok(g)
    }

    /// `d^k u / dt^k = sum_j w_j s_j^k exp(...)`.
    pub fn eval_dt(&self, x: &[f64], t: f64, k: u32) -> Result<f64> {
        self.check_point(x)?;
        self.kernels(x, t)
            .map(|r| r.map(|(term, e)| term.w * term.s.powi(k as i32) * e))
            .sum()
    }

    /// Term-wise Laplacian `sum_j w_j |sqrt(s_j) xi_j|^2 exp(...)`.
    pub fn eval_lap(&self, x: &[f64], t: f64) -> Result<f64> {
        self.check_point(x)?;
        self.kernels(x, t)
            .map(|r| r.map(|(term, e)| term.w * term.freq_sq * e))
            .sum()
    }

    /// `u(x, -p)` for complex `p`, the Laplace-side profile of the solution.
    pub fn eval_backward_complex(&self, x: &[f64], p: Complex64) -> Result<Complex64> {
        self.check_point(x)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let e = Complex64::new(dot(&term.freq, x), 0.0) - p * term.s;
            if e.re > EXPONENT_LIMIT {
                return Err(Error::Range { exponent: e.re, threshold: EXPONENT_LIMIT });
            }
            acc += term.w * e.exp();
        }
        Ok(acc)
    }

    /// `exp(sqrt(s) x.xi) w` per atom, i.e. the jump the cumulative spectral
    /// function makes at each `s_j` when observed at `x`.
    pub fn spatial_weights(&self, x: &[f64]) -> Result<Vec<(f64, f64)>> {
        self.check_point(x)?;
        self.terms
            .iter()
            .map(|term| {
                let e = dot(&term.freq, x);
                if e > EXPONENT_LIMIT {
                    Err(Error::Range { exponent: e, threshold: EXPONENT_LIMIT })
                } else {
                    Ok((term.s, term.w * e.exp()))
                }
            })
            .collect()
    }

    /// The one-variable profile `f(t) = u(x, -t)`.
    pub fn backward_profile<'a>(&'a self, x: &'a [f64]) -> impl Fn(f64) -> Result<f64> + 'a {
        move |t| self.eval(x, -t)
    }
}

impl SpaceTimeField for AncientSolution {
    fn dim(&self) -> usize {
        self.measure.dim
    }

    /// Panics on range errors; use [`AncientSolution::eval`] for fallible access.
    fn value(&self, x: &[f64], t: f64) -> f64 {
        self.eval(x, t).expect("ancient solution evaluation out of range")
    }
}

impl PositiveSolution for AncientSolution {
    fn dim(&self) -> usize {
        self.measure.dim
    }

    fn jet(&self, x: &[f64], t: f64) -> Result<(f64, Vec<f64>, f64)> {
        Ok((self.eval(x, t)?, self.eval_grad(x, t)?, self.eval_dt(x, t, 1)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatResidual {
    /// `max |u_t - lap u|`
    pub max_abs: f64,
    /// `max |u_t - lap u| / max(|u_t|, 1)`
    pub max_rel: f64,
}

/// Largest heat residual over the sample points.
pub fn heat_residual(sol: &AncientSolution, samples: &[(Vec<f64>, f64)]) -> Result<HeatResidual> {
    let mut out = HeatResidual { max_abs: 0.0, max_rel: 0.0 };
    for (x, t) in samples {
        let ut = sol.eval_dt(x, *t, 1)?;
        let lap = sol.eval_lap(x, *t)?;
        let r = (ut - lap).abs();
        out.max_abs = out.max_abs.max(r);
        out.max_rel = out.max_rel.max(r / ut.abs().max(1.0));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmFailure {
    pub order: usize,
    pub t: f64,
    pub value: f64,
    pub tolerance: f64,
}

/// Result of a complete-monotonicity scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CmReport {
    pub max_order: usize,
    pub step: f64,
    pub t_grid: Vec<f64>,
    /// `minima[k]` is the minimum over the grid of `(-1)^k Delta_h^k f(t)`, `k = 0..=K`.
    pub minima: Vec<f64>,
    pub failures: Vec<CmFailure>,
}

impl CmReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Lowest order that failed anywhere on the grid.
    pub fn first_failing_order(&self) -> Option<usize> {
        self.failures.iter().map(|f| f.order).min()
    }
}

/// Default step `min(t_grid) / (2K)`.
pub fn default_cm_step(t_grid: &[f64], max_order: usize) -> f64 {
    let tmin = t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    tmin / (2.0 * max_order as f64)
}

/// Signs of forward differences `(-1)^k Delta_h^k f(t)` for `k = 0..=K` at
/// every grid point. A function passes when every difference is at least
/// `-1e-10 |f(t)|`.
pub fn check_cm<F>(mut f: F, t_grid: &[f64], max_order: usize, step: f64) -> Result<CmReport>
where
    F: FnMut(f64) -> Result<f64>,
{
    if max_order < 1 {
        return Err(Error::Grid("maximal order must be at least 1".into()));
    }
    if !(step > 0.0) {
        return Err(Error::Grid(format!("step {step} must be positive")));
    }
    if t_grid.is_empty() {
        return Err(Error::Grid("empty t grid".into()));
    }
    for &t in t_grid {
        if !(t > 0.0) || t - max_order as f64 * step <= 0.0 {
            return Err(Error::Grid(format!(
                "grid point t={t} incompatible with order {max_order} and step {step}"
            )));
        }
    }

    let mut minima = vec![f64::INFINITY; max_order + 1];
    let mut failures = Vec::new();
    let mut samples = vec![0.0; max_order + 1];
    for &t in t_grid {
        for (i, v) in samples.iter_mut().enumerate() {
            *v = f(t + i as f64 * step)?;
        }
        let tol = CM_RELATIVE_TOL * samples[0].abs();
        // samples[0..=max_order-k] holds Delta^k f at successive nodes
        let mut diffs = samples.clone();
        for k in 0..=max_order {
            if k > 0 {
                for i in 0..=(max_order - k) {
                    diffs[i] = diffs[i + 1] - diffs[i];
                }
            }
            let signed = if k % 2 == 0 { diffs[0] } else { -diffs[0] };
            minima[k] = minima[k].min(signed);
            if signed < -tol {
                failures.push(CmFailure { order: k, t, value: signed, tolerance: tol });
            }
        }
    }
    Ok(CmReport { max_order, step, t_grid: t_grid.to_vec(), minima, failures })
}

/// `alpha |grad u|^2 / u^2 - u_t / u`.
pub fn li_yau_quantity<S: PositiveSolution + ?Sized>(
    sol: &S,
    x: &[f64],
    t: f64,
    alpha: f64,
) -> Result<f64> {
    let (u, grad, ut) = sol.jet(x, t)?;
    if !(u > 0.0) {
        return Err(Error::NonPositive(u));
    }
    let g2: f64 = grad.iter().map(|g| g * g).sum();
    Ok(alpha * g2 / (u * u) - ut / u)
}

/// Central-difference `u_t` for cross-checking [`AncientSolution::eval_dt`].
pub fn fd_dt(sol: &AncientSolution, x: &[f64], t: f64, h: f64) -> Result<f64> {
    Ok((sol.eval(x, t + h)? - sol.eval(x, t - h)?) / (2.0 * h))
}

/// Central-difference gradient for cross-checking [`AncientSolution::eval_grad`].
pub fn fd_grad(sol: &AncientSolution, x: &[f64], t: f64, h: f64) -> Result<Vec<f64>> {
    let mut p = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        p[i] = x[i] + h;
        let fp = sol.eval(&p, t)?;
        p[i] = x[i] - h;
        let fm = sol.eval(&p, t)?;
        p[i] = x[i];
        out.push((fp - fm) / (2.0 * h));
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}
