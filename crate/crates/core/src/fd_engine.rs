//! Explicit finite differences and heat-kernel convolution in `n = 1, 2`,
//! with checks of the kernel bounds, the forward polynomial bound, the mean
//! value and energy inequalities, and vanishing of high time derivatives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ancient_eval::li_yau_quantity;
use crate::caloric_poly::CaloricPolynomial;
use crate::error::{Error, Result};
use crate::field::{FdSampled, FnField, SpaceTimeField};
use crate::parabolic_geometry::{self, ball_volume, fit_slope, unit_ball_volume, QuadSpec};
use crate::quadrature::GaussLegendre;

/// Default `tau / h^2`; stable for `lambda <= 1 / (2n)` after division by `n`.
pub const DEFAULT_LAMBDA: f64 = 0.4;

/// Convolution window `|y - x| <= 8 sqrt(t)` per coordinate, i.e. `|z| <= 4`
/// after `y = x + 2 sqrt(t) z`.
pub const CONVOLUTION_CUT: f64 = 4.0;

const CONV_PANELS: usize = 8;
const CONV_NODES: usize = 16;

/// Initial data `u0(x)`.
pub type InitialData<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// `(4 pi t)^{-n/2} exp(-|x - y|^2 / (4t))`.
pub fn heat_kernel(x: &[f64], t: f64, y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (4.0 * std::f64::consts::PI * t).powf(-n / 2.0) * (-r2 / (4.0 * t)).exp()
}

/// Kernel mass outside the convolution window, `1 - erf(4)^n`.
pub fn kernel_tail(n: usize) -> f64 {
    1.0 - (1.0 - libm::erfc(CONVOLUTION_CUT)).powi(n as i32)
}

/// Composite Gauss-Legendre tensor rule for `pi^{-n/2} e^{-|z|^2}` on `[-4, 4]^n`.
fn gaussian_nodes(n: usize) -> Vec<(Vec<f64>, f64)> {
    let gl = GaussLegendre::new(CONV_NODES);
    let width = 2.0 * CONVOLUTION_CUT / CONV_PANELS as f64;
    let mut line = Vec::with_capacity(CONV_PANELS * CONV_NODES);
    for p in 0..CONV_PANELS {
        let a = -CONVOLUTION_CUT + p as f64 * width;
        for (z, w) in gl.mapped(a, a + width) {
            line.push((z, w * (-z * z).exp() / std::f64::consts::PI.sqrt()));
        }
    }
    match n {
        1 => line.into_iter().map(|(z, w)| (vec![z], w)).collect(),
        2 => {
            let mut out = Vec::with_capacity(line.len() * line.len());
            for (z1, w1) in &line {
                for (z2, w2) in &line {
                    out.push((vec![*z1, *z2], w1 * w2));
                }
            }
            out
        }
        _ => panic!("convolution implemented for n <= 2"),
    }
}

/// Heat-kernel convolution `int G(x, t, y) u0(y) dy` with precomputed nodes.
#[derive(Debug, Clone)]
pub struct Convolver {
    n: usize,
    nodes: Vec<(Vec<f64>, f64)>,
}

impl Convolver {
    pub fn new(n: usize) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::invalid(format!("convolution supports n = 1, 2, got {n}")));
        }
        Ok(Self { n, nodes: gaussian_nodes(n) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn convolve(&self, u0: InitialData<'_>, x: &[f64], t: f64) -> f64 {
        if t == 0.0 {
            return u0(x);
        }
        let scale = 2.0 * t.sqrt();
        let mut y = vec![0.0; self.n];
        let mut acc = 0.0;
        for (z, w) in &self.nodes {
            for i in 0..self.n {
                y[i] = x[i] + scale * z[i];
            }
            acc += w * u0(&y);
        }
        acc
    }

    /// Quadrature mass of the truncated kernel.
    pub fn truncated_mass(&self) -> f64 {
        self.nodes.iter().map(|(_, w)| w).sum()
    }
}

/// One-off convolution; build a [`Convolver`] when evaluating repeatedly.
pub fn forward_convolve(u0: InitialData<'_>, x: &[f64], t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("forward time must be >= 0, got {t}")));
    }
    Ok(Convolver::new(x.len())?.convolve(u0, x, t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMass {
    pub truncated: f64,
    pub tail: f64,
    pub total: f64,
}

pub fn kernel_mass(n: usize) -> Result<KernelMass> {
    let truncated = Convolver::new(n)?.truncated_mass();
    let tail = kernel_tail(n);
    Ok(KernelMass { truncated, tail, total: truncated + tail })
}

/// `(c1, c2)` with `G <= c1 / |B(x, sqrt t)| exp(-c2 |x - y|^2 / t)`.
pub fn kernel_bound_constants(n: usize) -> (f64, f64) {
    let c1 = unit_ball_volume(n) * (4.0 * std::f64::consts::PI).powf(-(n as f64) / 2.0);
    (c1, 0.25)
}

pub fn gaussian_upper_bound(x: &[f64], t: f64, y: &[f64]) -> f64 {
    let n = x.len();
    let (c1, c2) = kernel_bound_constants(n);
    let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    c1 / ball_volume(n, t.sqrt()) * (-c2 * r2 / t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSweep {
    pub samples: usize,
    pub violations: usize,
    /// Largest `G / bound` seen; one when the bound is tight.
    pub max_ratio: f64,
}

/// Random `(x, y, t)` with `|x|, |y| <= 5`, `t in (0.01, 10)`.
pub fn check_gaussian_bound(n: usize, samples: usize, seed: u64) -> BoundSweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let t = rng.random_range(0.01..10.0);
        let g = heat_kernel(&x, t, &y);
        let b = gaussian_upper_bound(&x, t, &y);
        if b == 0.0 {
            continue;
        }
        if g > b * (1.0 + 1e-12) {
            violations += 1;
        }
        max_ratio = max_ratio.max(g / b);
    }
    BoundSweep { samples, violations, max_ratio }
}

/// `|grad log G|^2 - d_t log G` at `(x, t)` for the kernel centred at 0,
/// analytically and by central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiYauKernel {
    pub exact: f64,
    pub analytic: f64,
    pub finite_difference: f64,
}

pub fn li_yau_kernel(x: &[f64], t: f64) -> Result<LiYauKernel> {
    let n = x.len();
    let r2: f64 = x.iter().map(|a| a * a).sum();
    // grad log G = -x / (2t), d_t log G = -n / (2t) + |x|^2 / (4t^2)
    let analytic = r2 / (4.0 * t * t) - (-(n as f64) / (2.0 * t) + r2 / (4.0 * t * t));
    let origin = vec![0.0; n];
    let kernel = FnField::new(n, |y: &[f64], s| heat_kernel(y, s, &origin));
    let fd = FdSampled::new(&kernel, 1e-4, 1e-5);
    Ok(LiYauKernel {
        exact: n as f64 / (2.0 * t),
        analytic,
        finite_difference: li_yau_quantity(&fd, x, t, 1.0)?,
    })
}

/// Uniform grid on `[-L, L]^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub half_width: f64,
    pub h: f64,
    /// `tau = lambda h^2 / n`.
    pub lambda: f64,
}

impl GridSpec {
    pub fn new(n: usize, half_width: f64, h: f64) -> Self {
        Self { n, half_width, h, lambda: DEFAULT_LAMBDA }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.n) {
            return Err(Error::Grid(format!("grids support n = 1, 2, got {}", self.n)));
        }
        if !(self.h > 0.0 && self.half_width > 0.0) {
            return Err(Error::Grid("spacing and extent must be positive".into()));
        }
        if !(self.lambda > 0.0 && self.lambda <= 0.5) {
            return Err(Error::Grid(format!("lambda = {} violates tau <= h^2 / (2n)", self.lambda)));
        }
        let cells = 2.0 * self.half_width / self.h;
        if (cells - cells.round()).abs() > 1e-9 * cells {
            return Err(Error::Grid("2L must be a multiple of h".into()));
        }
        Ok(())
    }

    pub fn points_per_axis(&self) -> usize {
        (2.0 * self.half_width / self.h).round() as usize + 1
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h
    }
}

/// Solution snapshot of the explicit scheme at time `t`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub spec: GridSpec,
    pub tau: f64,
    pub steps: usize,
    pub t: f64,
    /// Row-major samples, `x_0` fastest.
    pub values: Vec<f64>,
    /// Boundary policy, recorded for output headers.
    pub boundary: &'static str,
}

impl Grid {
    pub fn m(&self) -> usize {
        self.spec.points_per_axis()
    }

    pub fn index(&self, idx: &[usize]) -> usize {
        match idx {
            [i] => *i,
            [i, j] => j * self.m() + i,
            _ => panic!("grid index arity"),
        }
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.values[self.index(idx)]
    }

    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().map(|&i| self.spec.coord(i)).collect()
    }

    /// Indices at distance `>= L/4` from the boundary.
    pub fn core(&self) -> Vec<Vec<usize>> {
        let m = self.m();
        let lim = 0.75 * self.spec.half_width + 1e-12;
        let axis: Vec<usize> = (0..m).filter(|&i| self.spec.coord(i).abs() <= lim).collect();
        match self.spec.n {
            1 => axis.iter().map(|&i| vec![i]).collect(),
            _ => axis.iter().flat_map(|&j| axis.iter().map(move |&i| vec![i, j])).collect(),
        }
    }
}

fn is_boundary(spec: &GridSpec, idx: usize) -> bool {
    let m = spec.points_per_axis();
    let i = idx % m;
    if i == 0 || i == m - 1 {
        return true;
    }
    if spec.n == 2 {
        let j = idx / m;
        return j == 0 || j == m - 1;
    }
    false
}

/// Explicit forward-Euler scheme up to time `t_final`, with boundary values
/// taken from the kernel convolution at every step.
pub fn forward_solve(u0: InitialData<'_>, spec: GridSpec, t_final: f64) -> Result<Grid> {
    spec.validate()?;
    if !(t_final >= 0.0) {
        return Err(Error::invalid(format!("final time must be >= 0, got {t_final}")));
    }
    let n = spec.n;
    let m = spec.points_per_axis();
    let total = m.pow(n as u32);
    let tau_max = spec.lambda * spec.h * spec.h / n as f64;
    let steps = (t_final / tau_max).ceil() as usize;
    let tau = if steps == 0 { 0.0 } else { t_final / steps as f64 };
    let conv = Convolver::new(n)?;

    let point = |idx: usize| -> Vec<f64> {
        match n {
            1 => vec![spec.coord(idx)],
            _ => vec![spec.coord(idx % m), spec.coord(idx / m)],
        }
    };
    let boundary: Vec<usize> = (0..total).filter(|&i| is_boundary(&spec, i)).collect();
    let mut u: Vec<f64> = (0..total).map(|i| u0(&point(i))).collect();
    let mut next = u.clone();
    let mu = tau / (spec.h * spec.h);
    let stride = [1, m];

    for step in 1..=steps {
        let t = step as f64 * tau;
        next.par_iter_mut().enumerate().for_each(|(i, out)| {
            if is_boundary(&spec, i) {
                return;
            }
            let mut lap = -2.0 * n as f64 * u[i];
            for s in &stride[..n] {
                lap += u[i + s] + u[i - s];
            }
            *out = u[i] + mu * lap;
        });
        let edge: Vec<f64> = boundary.par_iter().map(|&i| conv.convolve(u0, &point(i), t)).collect();
        for (&i, v) in boundary.iter().zip(edge) {
            next[i] = v;
        }
        std::mem::swap(&mut u, &mut next);
    }
    Ok(Grid { spec, tau, steps, t: t_final, values: u, boundary: "dirichlet-convolution" })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub spacings: Vec<f64>,
    /// Max error against the convolution on the common core points.
    pub errors: Vec<f64>,
    /// Fitted slope of `log error` against `log h`.
    pub slope: f64,
}

/// Solves with each spacing and compares with the convolution on the points
/// of the coarsest grid lying in every core.
pub fn richardson_study(u0: InitialData<'_>, n: usize, half_width: f64, spacings: &[f64], t_final: f64) -> Result<ConvergenceStudy> {
    if spacings.len() < 2 {
        return Err(Error::invalid("need at least two spacings"));
    }
    let coarse = spacings.iter().copied().fold(0.0, f64::max);
    let conv = Convolver::new(n)?;
    let mut errors = Vec::with_capacity(spacings.len());
    for &h in spacings {
        let grid = forward_solve(u0, GridSpec::new(n, half_width, h), t_final)?;
        let ratio = (coarse / h).round() as usize;
        let err = grid
            .core()
            .into_iter()
            .filter(|idx| idx.iter().all(|i| i % ratio == 0))
            .map(|idx| (grid.at(&idx) - conv.convolve(u0, &grid.point(&idx), t_final)).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    let xs: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    Ok(ConvergenceStudy { spacings: spacings.to_vec(), slope: fit_slope(&xs, &ys), errors })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardBound {
    /// `sup |u0| / (|x| + 1)^q` on the sample lattice.
    pub c0: f64,
    /// `sup |u| / (|x| + sqrt t + 1)^q` over the space-time lattice.
    pub ratio: f64,
}

/// Polynomial growth of the forward solution on `[-L, L]^n x [0, T]`.
pub fn check_forward_bound(u0: InitialData<'_>, n: usize, q: u32, half_width: f64, t_final: f64) -> Result<ForwardBound> {
    if q > 6 {
        return Err(Error::invalid(format!("growth exponent {q} exceeds 6")));
    }
    let conv = Convolver::new(n)?;
    let xs: Vec<f64> = (0..=40).map(|i| -half_width + i as f64 * half_width / 20.0).collect();
    let ts: Vec<f64> = (0..=16).map(|j| j as f64 * t_final / 16.0).collect();
    let points: Vec<Vec<f64>> = match n {
        1 => xs.iter().map(|&x| vec![x]).collect(),
        _ => xs.iter().flat_map(|&a| xs.iter().map(move |&b| vec![a, b])).collect(),
    };
    let weight = |x: &[f64], t: f64| (x.iter().map(|a| a * a).sum::<f64>().sqrt() + t.sqrt() + 1.0).powi(q as i32);
    let c0 = points.iter().map(|x| u0(x).abs() / weight(x, 0.0)).fold(0.0, f64::max);
    let ratio = ts
        .par_iter()
        .map(|&t| points.iter().map(|x| conv.convolve(u0, x, t).abs() / weight(x, t)).fold(0.0, f64::max))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    Ok(ForwardBound { c0, ratio })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValueReport {
    /// `|u(x, t)| |B(x, r)| r^2 / int_{Q_r} |u|`.
    pub ratio: f64,
    /// Same ratio with the doubled quadrature resolution.
    pub refined_ratio: f64,
}

pub fn mean_value_check(u: &dyn SpaceTimeField, x: &[f64], t: f64, r: f64, spec: QuadSpec) -> Result<MeanValueReport> {
    if !(r > 0.0) {
        return Err(Error::NonPositive(r));
    }
    let n = x.len();
    let centre = u.value(x, t).abs();
    let vol = ball_volume(n, r) * r * r;
    let integral = |s: QuadSpec| {
        parabolic_geometry::integrate_over_cylinder(|y, s| u.value(y, s).abs(), x, r, t - r * r, t, s).value
    };
    Ok(MeanValueReport {
        ratio: centre * vol / integral(spec),
        refined_ratio: centre * vol / integral(spec.doubled()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaccioppoliReport {
    /// `int_{Q0_R} (lap u)^2`.
    pub lhs: f64,
    /// `int_{Q0_{2R}} u^2`.
    pub energy: f64,
    /// `lhs R^4 / energy`.
    pub c0: f64,
}

/// Energy estimate on the full cubes `Q0_R = {|x - x1| < R, |t - t1| <= R^2}`.
pub fn caccioppoli_check(
    u: &dyn SpaceTimeField,
    lap_u: &dyn SpaceTimeField,
    x1: &[f64],
    t1: f64,
    r: f64,
    spec: QuadSpec,
) -> Result<CaccioppoliReport> {
    if !(r > 0.0) {
        return Err(Error::NonPositive(r));
    }
    let lhs =
        parabolic_geometry::integrate_over_cylinder(|y, s| lap_u.value(y, s).powi(2), x1, r, t1 - r * r, t1 + r * r, spec)
            .value;
    let r2 = 2.0 * r;
    let energy =
        parabolic_geometry::integrate_over_cylinder(|y, s| u.value(y, s).powi(2), x1, r2, t1 - r2 * r2, t1 + r2 * r2, spec)
            .value;
    Ok(CaccioppoliReport { lhs, energy, c0: lhs * r.powi(4) / energy })
}

/// [`caccioppoli_check`] for a caloric polynomial with its exact Laplacian.
pub fn caccioppoli_poly(u: &CaloricPolynomial, x1: &[f64], t1: f64, r: f64, spec: QuadSpec) -> Result<CaccioppoliReport> {
    let lap = u.polynomial().laplacian();
    let n = u.dim();
    let lap_field = FnField::new(n, |y: &[f64], s| lap.eval(y, s));
    caccioppoli_check(u, &lap_field, x1, t1, r, spec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowEstimate {
    pub radius: f64,
    /// Time step of the difference quotient.
    pub step: f64,
    /// Root mean square of the difference quotient over the window.
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingReport {
    pub k: u32,
    pub q: u32,
    /// `d_t^k u` is the zero polynomial.
    pub symbolic_zero: bool,
    pub windows: Vec<WindowEstimate>,
    /// Fitted slope of `log estimate^2` against `log R`; `None` when every
    /// estimate is exactly zero.
    pub fitted_slope: Option<f64>,
    /// `2q - 4k`.
    pub bound_slope: f64,
}

/// Order-two central difference for `d_t^k` with step `h`.
fn central_kth(f: impl Fn(f64) -> f64, t: f64, k: u32, h: f64) -> f64 {
    let mut acc = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * f(t + (k as f64 / 2.0 - j as f64) * h);
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    acc / h.powi(k as i32)
}

/// Estimates `d_t^k u` over windows of radius `R` around `(x1, t1)`. The
/// step is `R^2 eps^{1/(k+2)}`, which balances truncation and roundoff for
/// smooth data; for caloric polynomials with `k > q/2` only roundoff remains.
pub fn high_dt_vanishing(u: &CaloricPolynomial, k: u32, x1: &[f64], t1: f64, radii: &[f64]) -> Result<VanishingReport> {
    let q = u
        .polynomial()
        .parabolic_degree()
        .ok_or_else(|| Error::invalid("zero polynomial has no degree"))?;
    if 2 * k <= q {
        return Err(Error::invalid(format!("need k > q/2, got k = {k}, q = {q}")));
    }
    if x1.len() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: x1.len() });
    }
    let symbolic_zero = u.dt_k(k).is_zero();
    let p = u.polynomial();
    let offsets = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let windows: Vec<WindowEstimate> = radii
        .iter()
        .map(|&r| {
            let step = r * r * f64::EPSILON.powf(1.0 / (k as f64 + 2.0));
            let mut sum = 0.0;
            let mut count = 0usize;
            let mut x = x1.to_vec();
            let spatial: Vec<Vec<f64>> = match u.dim() {
                1 => offsets.iter().map(|&a| vec![a]).collect(),
                _ => offsets.iter().flat_map(|&a| offsets.iter().map(move |&b| vec![a, b])).collect(),
            };
            for off in &spatial {
                for (xi, (c, o)) in x.iter_mut().zip(x1.iter().zip(off)) {
                    *xi = c + r * o;
                }
                for w in [0.0, 0.5, 1.0] {
                    let t = t1 - w * r * r;
                    let d = central_kth(|s| p.eval(&x, s), t, k, step);
                    sum += d * d;
                    count += 1;
                }
            }
            WindowEstimate { radius: r, step, estimate: (sum / count as f64).sqrt() }
        })
        .collect();
    let fitted_slope = if windows.iter().any(|w| w.estimate == 0.0) {
        None
    } else {
        let xs: Vec<f64> = windows.iter().map(|w| w.radius.ln()).collect();
        let ys: Vec<f64> = windows.iter().map(|w| (w.estimate * w.estimate).ln()).collect();
        Some(fit_slope(&xs, &ys))
    };
    Ok(VanishingReport {
        k,
        q,
        symbolic_zero,
        windows,
        fitted_slope,
        bound_slope: 2.0 * q as f64 - 4.0 * k as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caloric_poly::{caloric_extend, MultiPoly};

    fn poly(s: &str, n: usize) -> CaloricPolynomial {
        caloric_extend(&MultiPoly::parse(s, Some(n)).unwrap()).unwrap()
    }

    #[test]
    fn convolution_reproduces_caloric_extension() {
        let u0 = |x: &[f64]| x[0] * x[0];
        for (x, t) in [(0.0, 0.5), (1.5, 1.0), (-3.0, 4.0)] {
            let v = forward_convolve(&u0, &[x], t).unwrap();
            assert!((v - (x * x + 2.0 * t)).abs() < 1e-6 * (1.0 + x * x), "{v}");
        }
        let one = |_: &[f64]| 1.0;
        assert!((forward_convolve(&one, &[0.3, 0.1], 2.0).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn explicit_scheme_examples() {
        let one = |_: &[f64]| 1.0;
        let g = forward_solve(&one, GridSpec::new(1, 2.0, 0.05), 0.5).unwrap();
        assert!(g.values.iter().all(|v| (v - 1.0).abs() < 1e-7));

        let sq = |x: &[f64]| x[0] * x[0];
        let g = forward_solve(&sq, GridSpec::new(1, 2.0, 0.01), 0.2).unwrap();
        for idx in g.core() {
            let x = g.point(&idx)[0];
            assert!((g.at(&idx) - (x * x + 0.4)).abs() < 1e-4);
        }

        let sine = |x: &[f64]| x[0].sin();
        let g = forward_solve(&sine, GridSpec::new(1, 4.0, 0.01), 0.5).unwrap();
        assert!(g.tau <= 0.5 * 0.01 * 0.01);
        for idx in g.core() {
            let x = g.point(&idx)[0];
            assert!((g.at(&idx) - (-0.5f64).exp() * x.sin()).abs() < 1e-4);
        }
    }

    #[test]
    fn explicit_scheme_two_dimensions() {
        let f = |x: &[f64]| x[0] * x[0] - x[1] * x[1] + x[0] * x[1];
        let g = forward_solve(&f, GridSpec::new(2, 1.0, 0.1), 0.05).unwrap();
        for idx in g.core() {
            let p = g.point(&idx);
            assert!((g.at(&idx) - f(&p)).abs() < 1e-7);
        }
    }

    #[test]
    fn grid_rejects_bad_spacing() {
        let one = |_: &[f64]| 1.0;
        let mut spec = GridSpec::new(1, 1.0, 0.1);
        spec.lambda = 0.6;
        assert!(matches!(forward_solve(&one, spec, 0.1), Err(Error::Grid(_))));
        assert!(forward_solve(&one, GridSpec::new(3, 1.0, 0.1), 0.1).is_err());
        assert!(forward_solve(&one, GridSpec::new(1, 1.0, 0.3), 0.1).is_err());
    }

    #[test]
    fn kernel_constants() {
        let (c1, c2) = kernel_bound_constants(1);
        assert!((c1 - 0.564_189_583_5).abs() < 1e-10);
        assert_eq!(c2, 0.25);
        let (c1, _) = kernel_bound_constants(2);
        assert!((c1 - 0.25).abs() < 1e-15);
        let g = heat_kernel(&[1.0], 1.0, &[0.0]);
        assert!((g - (4.0 * std::f64::consts::PI).powf(-0.5) * (-0.25f64).exp()).abs() < 1e-16);
        assert!((gaussian_upper_bound(&[1.0], 1.0, &[0.0]) / g - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_mass_is_one() {
        for n in [1, 2] {
            let m = kernel_mass(n).unwrap();
            assert!((m.total - 1.0).abs() < 1e-6, "{m:?}");
        }
    }

    #[test]
    fn gaussian_bound_sweep() {
        for n in [1, 2] {
            let s = check_gaussian_bound(n, 2000, 9);
            assert_eq!(s.violations, 0);
            assert!((s.max_ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn li_yau_equality() {
        for (x, t) in [(vec![0.3], 0.7), (vec![1.0, -0.5], 2.0)] {
            let r = li_yau_kernel(&x, t).unwrap();
            assert!((r.analytic - r.exact).abs() < 1e-8);
            assert!((r.finite_difference - r.exact).abs() < 1e-3, "{r:?}");
        }
    }

    #[test]
    fn forward_bound_examples() {
        let sq = |x: &[f64]| x[0] * x[0];
        let b = check_forward_bound(&sq, 1, 2, 10.0, 4.0).unwrap();
        assert!(b.ratio <= 2.0 && b.ratio > 0.0);
        let c = |_: &[f64]| 3.0;
        let b = check_forward_bound(&c, 1, 0, 10.0, 4.0).unwrap();
        assert!(b.ratio <= 3.0 + 1e-7);
        let quartic = |x: &[f64]| x[0].powi(4);
        assert!(check_forward_bound(&quartic, 1, 4, 10.0, 4.0).unwrap().ratio.is_finite());
    }

    #[test]
    fn mean_value_examples() {
        let c = FnField::new(1, |_: &[f64], _| 2.5);
        let r = mean_value_check(&c, &[0.0], 0.0, 1.0, QuadSpec::default()).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);

        let u = poly("x0^2", 1);
        let r = mean_value_check(&u, &[0.5], 1.0, 1.0, QuadSpec::default()).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);

        let kernel = FnField::new(1, |y: &[f64], s| heat_kernel(y, s, &[0.0]));
        let r = mean_value_check(&kernel, &[0.0], 1.0, 0.5, QuadSpec::default()).unwrap();
        assert!((r.ratio / r.refined_ratio - 1.0).abs() < 0.05);
    }

    #[test]
    fn caccioppoli_examples() {
        let c = poly("1", 1);
        assert_eq!(caccioppoli_poly(&c, &[0.0], 0.0, 1.0, QuadSpec::default()).unwrap().lhs, 0.0);

        let u = poly("x0^2", 1);
        let mut seen = Vec::new();
        for r in [1.0, 2.0, 4.0] {
            let rep = caccioppoli_poly(&u, &[0.0], 0.0, r, QuadSpec::default()).unwrap();
            // lap u = 2 on the full cube of volume 2R * 2R^2
            assert!((rep.lhs / (16.0 * r.powi(3)) - 1.0).abs() < 1e-12);
            seen.push(rep.c0);
        }
        assert!(seen.iter().all(|c| (c / seen[0] - 1.0).abs() < 0.1));
        let u = poly("x0^4", 1);
        assert!(caccioppoli_poly(&u, &[0.0], 0.0, 1.0, QuadSpec::default()).unwrap().c0.is_finite());
    }

    #[test]
    fn high_time_derivatives_vanish() {
        let u = poly("x0^4", 1);
        let rep = high_dt_vanishing(&u, 3, &[0.3], -0.2, &[1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!(rep.symbolic_zero);
        assert_eq!(rep.bound_slope, -4.0);
        match rep.fitted_slope {
            Some(s) => assert!(s < 0.0, "{rep:?}"),
            None => assert!(rep.windows.iter().all(|w| w.estimate == 0.0)),
        }

        let u = poly("x0^2", 1);
        let rep = high_dt_vanishing(&u, 2, &[0.0], 0.0, &[1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!(rep.symbolic_zero);
        assert!(rep.windows.iter().all(|w| w.estimate < 1e-6));
        assert!(high_dt_vanishing(&u, 1, &[0.0], 0.0, &[1.0]).is_err());
    }

    #[test]
    fn central_difference_orders() {
        let d = central_kth(|t: f64| t.powi(3), 0.7, 3, 0.1);
        assert!((d - 6.0).abs() < 1e-9);
        let d = central_kth(|t: f64| t.exp(), 0.0, 2, 1e-3);
        assert!((d - 1.0).abs() < 1e-6);
    }
}
