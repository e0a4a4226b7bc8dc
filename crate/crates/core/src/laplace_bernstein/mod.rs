//! Laplace-side analysis of completely monotone profiles `f(t) = u(x, -t)`.
//!
//! For a positive ancient solution the profile is the Laplace transform of a
//! nonnegative measure `nu_x`, and its cumulative function
//! `h(x, s) = nu_x([0, s])` satisfies `int e^{-ts} h(x,s) ds = u(x,-t)/t`.
//! This module computes forward transforms, recovers `h` by numerical
//! inversion, checks the elliptic identity `lap h = t h - int_0^t h ds`, and
//! fits nonnegative exponential sums to sampled profiles.

mod inversion;
mod nnls;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use inversion::{
    invert_raw, laplace_invert, Inversion, InversionConfig, InversionMethod, CONSISTENCY_LIMIT,
    DEFAULT_DAMPING,
};
pub use nnls::nnls;

use crate::ancient_eval::AncientSolution;
use crate::error::{Error, Result};
use crate::quadrature;

/// Distance from a jump beyond which recovered values are trusted.
pub const JUMP_MARGIN: f64 = 0.5;

/// Allowed decrease between consecutive trusted values of a recovered `h`.
pub const MONOTONE_SLACK: f64 = 1e-3;

/// Samples `(t_i, f_i)` with strictly increasing abscissae, optionally backed
/// by a closed form.
///
/// Between samples the function is linear; outside the sampled range it is
/// held constant at the nearest end value.
pub struct SampledFunction {
    abscissae: Vec<f64>,
    values: Vec<f64>,
    closed_form: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl std::fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledFunction")
            .field("abscissae", &self.abscissae)
            .field("values", &self.values)
            .field("closed_form", &self.closed_form.is_some())
            .finish()
    }
}

impl SampledFunction {
    pub fn new(abscissae: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: abscissae.len(), found: values.len() });
        }
        if abscissae.is_empty() {
            return Err(Error::invalid("sampled function needs at least one sample"));
        }
        if abscissae.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::invalid("abscissae must be finite and nonnegative"));
        }
        if abscissae.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("abscissae must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sample values must be finite"));
        }
        Ok(Self { abscissae, values, closed_form: None })
    }

    /// Samples `f` at `abscissae` and keeps `f` as the closed form.
    pub fn from_fn<F>(abscissae: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let values = abscissae.iter().map(|&t| f(t)).collect();
        let mut out = Self::new(abscissae, values)?;
        out.closed_form = Some(Box::new(f));
        Ok(out)
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form.is_some()
    }

    /// Closed form when available, otherwise the interpolant.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.closed_form {
            Some(f) => f(t),
            None => self.interpolate(t),
        }
    }

    pub fn interpolate(&self, t: f64) -> f64 {
        let xs = &self.abscissae;
        let ys = &self.values;
        if t <= xs[0] {
            return ys[0];
        }
        let last = xs.len() - 1;
        if t >= xs[last] {
            return ys[last];
        }
        let i = xs.partition_point(|&x| x <= t) - 1;
        let w = (t - xs[i]) / (xs[i + 1] - xs[i]);
        ys[i] + w * (ys[i + 1] - ys[i])
    }
}

/// What [`laplace_forward`] integrates.
pub enum LaplaceSource<'a> {
    /// Closed form with optional breakpoints (discontinuities or kinks).
    Function { f: &'a dyn Fn(f64) -> f64, breakpoints: &'a [f64] },
    /// Interpolant of samples (the closed form is ignored).
    Sampled(&'a SampledFunction),
}

const FORWARD_REL_TOL: f64 = 1e-11;
const FORWARD_MAX_DOUBLINGS: usize = 12;

/// `int_0^inf e^{-ts} g(s) ds` by adaptive Gauss-Kronrod on `[0, S]` with `S`
/// doubled until the exponentially weighted tail is negligible.
pub fn laplace_forward(g: LaplaceSource<'_>, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("Laplace transform needs t > 0, got {t}")));
    }
    match g {
        LaplaceSource::Sampled(sf) => forward_sampled(sf, t),
        LaplaceSource::Function { f, breakpoints } => forward_fn(f, breakpoints, t),
    }
}

fn forward_fn(f: &dyn Fn(f64) -> f64, breakpoints: &[f64], t: f64) -> Result<f64> {
    let mut cut = breakpoints.iter().copied().fold(0.0, f64::max) + 40.0 / t;
    for _ in 0..FORWARD_MAX_DOUBLINGS {
        let mut knots: Vec<f64> = breakpoints.iter().copied().filter(|b| *b > 0.0 && *b < cut).collect();
        knots.push(0.0);
        knots.push(cut);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let mut total = 0.0;
        for w in knots.windows(2) {
            let r = quadrature::adaptive(|s| (-t * s).exp() * f(s), w[0], w[1], 1e-300, FORWARD_REL_TOL);
            total += r.value;
        }
        // tail estimate from the integrand envelope near the cut
        let edge = (-t * cut).exp() * f(cut).abs().max(f(0.5 * cut).abs());
        let tail = edge / t;
        if !total.is_finite() {
            break;
        }
        if tail <= FORWARD_REL_TOL * total.abs().max(1e-300) || tail == 0.0 {
            return Ok(total);
        }
        cut *= 2.0;
    }
    Err(Error::NonconvergentTail {
        t,
        reason: "integrand does not decay against e^{-ts}".into(),
    })
}

fn forward_sampled(sf: &SampledFunction, t: f64) -> Result<f64> {
    let xs = &sf.abscissae;
    let ys = &sf.values;
    // exact integral of e^{-ts} times each linear piece
    let e = |s: f64| (-t * s).exp();
    let mut total = ys[0] * (1.0 - e(xs[0])) / t;
    for i in 0..xs.len() - 1 {
        let (a, b) = (xs[i], xs[i + 1]);
        let (ya, yb) = (ys[i], ys[i + 1]);
        let slope = (yb - ya) / (b - a);
        // int_a^b e^{-ts} (ya + slope (s - a)) ds
        let ea = e(a);
        let eb = e(b);
        let base = ya * (ea - eb) / t;
        let lin = slope * ((ea - eb) / (t * t) - (b - a) * eb / t);
        total += base + lin;
    }
    let last = xs.len() - 1;
    total += ys[last] * e(xs[last]) / t;
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Inverted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    High,
    /// Near a jump or the inversion resolutions disagree.
    Low,
}

/// Cumulative spectral function `s -> h(x, s)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeSpectral {
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub h: Vec<f64>,
    pub confidence: Vec<Confidence>,
    pub provenance: Provenance,
    /// Jump locations and heights, known exactly for analytic provenance.
    pub jumps: Option<Vec<(f64, f64)>>,
}

impl CumulativeSpectral {
    /// Exact step function `h(x, s) = sum_{s_j <= s} w_j e^{sqrt(s_j) x.xi_j}`.
    pub fn analytic(sol: &AncientSolution, x: &[f64], s_grid: &[f64]) -> Result<Self> {
        check_grid(s_grid)?;
        let mut jumps = sol.spatial_weights(x)?;
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let h = s_grid
            .iter()
            .map(|&s| jumps.iter().filter(|(sj, _)| *sj <= s).map(|(_, c)| c).sum())
            .collect();
        Ok(Self {
            x: x.to_vec(),
            s: s_grid.to_vec(),
            h,
            confidence: vec![Confidence::High; s_grid.len()],
            provenance: Provenance::Analytic,
            jumps: Some(jumps),
        })
    }

    /// Largest recovered value, which approximates `u(x, 0)`.
    pub fn sup(&self) -> f64 {
        self.h.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest decrease between consecutive high-confidence values.
    pub fn max_decrease(&self) -> f64 {
        let trusted: Vec<f64> = self
            .h
            .iter()
            .zip(&self.confidence)
            .filter(|(_, c)| **c == Confidence::High)
            .map(|(h, _)| *h)
            .collect();
        trusted.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }

    pub fn value_at(&self, s: f64) -> f64 {
        match &self.jumps {
            Some(j) => j.iter().filter(|(sj, _)| *sj <= s).map(|(_, c)| c).sum(),
            None => self.to_sampled().interpolate(s),
        }
    }

    /// `int_0^t h(x, s) ds`: exact for analytic data, trapezoidal otherwise.
    pub fn integral_to(&self, t: f64) -> Result<f64> {
        if let Some(j) = &self.jumps {
            return Ok(j.iter().filter(|(sj, _)| *sj <= t).map(|(sj, c)| c * (t - sj)).sum());
        }
        if self.s.first().copied() != Some(0.0) || *self.s.last().unwrap_or(&0.0) < t {
            return Err(Error::InsufficientStencil(format!("s-grid must cover [0, {t}]")));
        }
        let sf = self.to_sampled();
        let mut acc = 0.0;
        for w in self.s.windows(2) {
            let (a, b) = (w[0], w[1].min(t));
            if a >= t {
                break;
            }
            acc += 0.5 * (b - a) * (sf.interpolate(a) + sf.interpolate(b));
        }
        Ok(acc)
    }

    pub fn to_sampled(&self) -> SampledFunction {
        SampledFunction::new(self.s.clone(), self.h.clone())
            .expect("cumulative spectral grids are validated on construction")
    }
}

fn check_grid(s_grid: &[f64]) -> Result<()> {
    if s_grid.is_empty() {
        return Err(Error::invalid("empty s-grid"));
    }
    if s_grid.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
        return Err(Error::invalid("s-grid values must be finite and nonnegative"));
    }
    if s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("s-grid must be strictly increasing"));
    }
    Ok(())
}

/// `p` used for the right limit `h(x, 0) = lim_{p -> inf} p F(p) = u(x, -p)`.
const ORIGIN_LIMIT_P: f64 = 1e4;

/// Recovers `h(x, .)` on `s_grid` by inverting `F(p) = u(x, -p) / p`.
///
/// Values within [`JUMP_MARGIN`] of an atom, or whose two inversion
/// resolutions disagree by more than [`CONSISTENCY_LIMIT`], are flagged
/// [`Confidence::Low`]. Trusted values must be nondecreasing up to
/// [`MONOTONE_SLACK`].
pub fn recover_h(
    sol: &AncientSolution,
    x: &[f64],
    s_grid: &[f64],
    cfg: &InversionConfig,
) -> Result<CumulativeSpectral> {
    check_grid(s_grid)?;
    let jumps: Vec<f64> = sol.spatial_weights(x)?.into_iter().map(|(s, _)| s).collect();
    let transform = |p: Complex64| Ok(sol.eval_backward_complex(x, p)? / p);

    let mut h = Vec::with_capacity(s_grid.len());
    let mut confidence = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let near_jump = jumps.iter().any(|sj| (s - sj).abs() < JUMP_MARGIN);
        let (value, estimate) = if s == 0.0 {
            (sol.eval(x, -ORIGIN_LIMIT_P)?, 0.0)
        } else {
            let inv = invert_raw(transform, s, cfg)?;
            (inv.value, inv.estimate)
        };
        let consistent = estimate <= CONSISTENCY_LIMIT;
        if !near_jump && !consistent {
            return Err(Error::InversionFailure { t: s, estimate });
        }
        h.push(value);
        confidence.push(if near_jump || !consistent { Confidence::Low } else { Confidence::High });
    }
    let out = CumulativeSpectral {
        x: x.to_vec(),
        s: s_grid.to_vec(),
        h,
        confidence,
        provenance: Provenance::Inverted,
        jumps: None,
    };
    let drop = out.max_decrease();
    if drop > MONOTONE_SLACK {
        return Err(Error::InversionFailure { t: f64::NAN, estimate: drop });
    }
    Ok(out)
}

/// `h` at a point and its neighbours `x +- delta e_i`.
#[derive(Debug, Clone)]
pub struct HStencil {
    pub centre: CumulativeSpectral,
    pub plus: Vec<CumulativeSpectral>,
    pub minus: Vec<CumulativeSpectral>,
    pub spacing: f64,
}

impl HStencil {
    /// Builds the stencil with `build(point)` for each of the `2n + 1` points.
    pub fn build<F>(x: &[f64], spacing: f64, mut build: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Result<CumulativeSpectral>,
    {
        if !(spacing > 0.0) {
            return Err(Error::InsufficientStencil(format!("spacing {spacing} must be positive")));
        }
        let centre = build(x)?;
        let mut plus = Vec::with_capacity(x.len());
        let mut minus = Vec::with_capacity(x.len());
        let mut p = x.to_vec();
        for i in 0..x.len() {
            p[i] = x[i] + spacing;
            plus.push(build(&p)?);
            p[i] = x[i] - spacing;
            minus.push(build(&p)?);
            p[i] = x[i];
        }
        Ok(Self { centre, plus, minus, spacing })
    }

    pub fn analytic(sol: &AncientSolution, x: &[f64], spacing: f64, s_grid: &[f64]) -> Result<Self> {
        Self::build(x, spacing, |p| CumulativeSpectral::analytic(sol, p, s_grid))
    }

    pub fn recovered(
        sol: &AncientSolution,
        x: &[f64],
        spacing: f64,
        s_grid: &[f64],
        cfg: &InversionConfig,
    ) -> Result<Self> {
        Self::build(x, spacing, |p| recover_h(sol, p, s_grid, cfg))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HIdentity {
    /// Finite-difference Laplacian of `h(., t)`.
    pub lhs: f64,
    /// `t h(x, t) - int_0^t h(x, s) ds`.
    pub rhs: f64,
    pub residual: f64,
}

/// Evaluates both sides of `lap h(x,t) = t h(x,t) - int_0^t h(x,s) ds`.
pub fn verify_h_identity(stencil: &HStencil, t: f64) -> Result<HIdentity> {
    let n = stencil.centre.x.len();
    if stencil.plus.len() != n || stencil.minus.len() != n || n == 0 {
        return Err(Error::InsufficientStencil(format!(
            "need {n} arms in each direction, got {} and {}",
            stencil.plus.len(),
            stencil.minus.len()
        )));
    }
    let hc = stencil.centre.value_at(t);
    let mut lap = 0.0;
    for (p, m) in stencil.plus.iter().zip(&stencil.minus) {
        lap += p.value_at(t) - 2.0 * hc + m.value_at(t);
    }
    lap /= stencil.spacing * stencil.spacing;
    let rhs = t * hc - stencil.centre.integral_to(t)?;
    Ok(HIdentity { lhs: lap, rhs, residual: (lap - rhs).abs() })
}

/// Nonnegative exponential-sum fit `f(t_i) ~ sum_k c_k e^{-t_i s_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinFit {
    pub s_grid: Vec<f64>,
    pub weights: Vec<f64>,
    /// Euclidean norm of the fit residual over the samples.
    pub residual_norm: f64,
}

pub fn bernstein_fit(f: &SampledFunction, s_grid: &[f64]) -> Result<BernsteinFit> {
    check_grid(s_grid)?;
    let ts = f.abscissae();
    let a = DMatrix::from_fn(ts.len(), s_grid.len(), |i, k| (-ts[i] * s_grid[k]).exp());
    let b = DVector::from_column_slice(f.values());
    let c = nnls(&a, &b);
    let residual_norm = (&a * &c - &b).norm();
    let weights: Vec<f64> = c.iter().copied().collect();
    assert!(weights.iter().all(|w| *w >= 0.0), "NNLS returned a negative weight");
    Ok(BernsteinFit { s_grid: s_grid.to_vec(), weights, residual_norm })
}
