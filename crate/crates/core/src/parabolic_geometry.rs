//! Parabolic distance, truncated paraboloids and cubes, volumes, quadrature
//! over paraboloids and Gram matrices of solution families.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::SpaceTimeField;
use crate::quadrature::{self, GaussLegendre};

/// Samples drawn per independently seeded Monte Carlo stream.
const MC_CHUNK: usize = 1 << 16;

/// Largest scale visited by [`trace_det_iteration`].
pub const MAX_ITERATION_SCALE: f64 = 1e3;

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Parabolic distance `|x - y| + sqrt(|t - s|)`.
pub fn dp(x: &[f64], t: f64, y: &[f64], s: f64) -> f64 {
    dist(x, y) + (t - s).abs().sqrt()
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    std::f64::consts::PI.powf(h) / libm::tgamma(h + 1.0)
}

/// `|B(0, r)|` in `R^n`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    unit_ball_volume(n) * r.powi(n as i32)
}

/// Truncated paraboloid `{(y, s) : d_p((y, s), (x0, t0)) <= r, s <= t0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Paraboloid {
    pub vertex: Vec<f64>,
    pub t0: f64,
    pub radius: f64,
}

impl Paraboloid {
    pub fn new(vertex: Vec<f64>, t0: f64, radius: f64) -> Result<Self> {
        if vertex.is_empty() {
            return Err(Error::invalid("paraboloid needs n >= 1"));
        }
        if !(radius > 0.0) {
            return Err(Error::NonPositive(radius));
        }
        Ok(Self { vertex, t0, radius })
    }

    /// `P_r(0, 0)` in `R^n`.
    pub fn centred(n: usize, radius: f64) -> Result<Self> {
        Self::new(vec![0.0; n], 0.0, radius)
    }

    pub fn dim(&self) -> usize {
        self.vertex.len()
    }

    pub fn contains(&self, y: &[f64], s: f64) -> bool {
        s <= self.t0 && dp(y, s, &self.vertex, self.t0) <= self.radius
    }

    /// Same vertex, radius scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { radius: self.radius * factor, ..self.clone() }
    }

    /// `n w_n int_0^r (r - rho)^2 rho^{n-1} d rho = 2 w_n r^{n+2} / ((n+1)(n+2))`.
    pub fn volume(&self) -> f64 {
        let n = self.dim() as f64;
        2.0 * unit_ball_volume(self.dim()) * self.radius.powf(n + 2.0) / ((n + 1.0) * (n + 2.0))
    }
}

/// Standard parabolic cube `{|y - x| < r, s in [t - r^2, t]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    pub centre: Vec<f64>,
    pub t: f64,
    pub radius: f64,
}

impl Cube {
    pub fn new(centre: Vec<f64>, t: f64, radius: f64) -> Result<Self> {
        if centre.is_empty() {
            return Err(Error::invalid("cube needs n >= 1"));
        }
        if !(radius > 0.0) {
            return Err(Error::NonPositive(radius));
        }
        Ok(Self { centre, t, radius })
    }

    pub fn dim(&self) -> usize {
        self.centre.len()
    }

    pub fn contains(&self, y: &[f64], s: f64) -> bool {
        dist(y, &self.centre) < self.radius && s >= self.t - self.radius * self.radius && s <= self.t
    }

    /// `w_n r^{n+2}`.
    pub fn volume(&self) -> f64 {
        ball_volume(self.dim(), self.radius) * self.radius * self.radius
    }
}

pub fn volume_paraboloid(p: &Paraboloid) -> f64 {
    p.volume()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    /// `|value - mean|` in units of the standard error.
    pub fn sigmas(&self, value: f64) -> f64 {
        (value - self.mean).abs() / self.std_error
    }
}

/// Hit-or-miss estimate of `|P|` from uniform samples of the bounding box.
/// Each chunk of samples draws from its own stream of the seeded generator,
/// so the result does not depend on the thread count.
pub fn volume_mc(p: &Paraboloid, samples: usize, seed: u64) -> McEstimate {
    let n = p.dim();
    let r = p.radius;
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut y = vec![0.0; n];
            let mut hits = 0usize;
            for _ in 0..count {
                for (yi, vi) in y.iter_mut().zip(&p.vertex) {
                    *yi = vi + rng.random_range(-r..r);
                }
                let s = p.t0 - rng.random_range(0.0..r * r);
                if p.contains(&y, s) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let box_volume = (2.0 * r).powi(n as i32) * r * r;
    let frac = hits as f64 / samples as f64;
    McEstimate {
        mean: box_volume * frac,
        std_error: box_volume * (frac * (1.0 - frac) / samples as f64).sqrt(),
        samples,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeRatio {
    /// `|P_r| / |Q_r|`.
    pub ratio: f64,
    /// `d0^{-1} 2^{-(eta + 2)}` with `d0 = 2^n`, `eta = n`.
    pub lower: f64,
    pub upper: f64,
}

impl VolumeRatio {
    pub fn within(&self) -> bool {
        self.lower <= self.ratio && self.ratio <= self.upper
    }
}

pub fn volume_ratio_bounds(n: usize, r: f64) -> Result<VolumeRatio> {
    let p = Paraboloid::centred(n, r)?;
    let q = Cube::new(vec![0.0; n], 0.0, r)?;
    let eta = n as i32;
    Ok(VolumeRatio {
        ratio: p.volume() / q.volume(),
        lower: 2f64.powi(-eta) * 2f64.powi(-(eta + 2)),
        upper: 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingReport {
    /// `(|P_{r2}| / r2^{eta+2}) / (|P_{r1}| / r1^{eta+2})`.
    pub normalized_ratio: f64,
    /// `|B(2 r1)| / |B(r1)|`, the doubling constant.
    pub d0: f64,
    /// `|B(r2)| / (d0 (r2/r1)^eta |B(r1)|)`; at most one when the
    /// doubling-derived comparison holds.
    pub ball_comparison: f64,
}

pub fn doubling_check(n: usize, r1: f64, r2: f64) -> Result<DoublingReport> {
    if !(r1 > 0.0 && r2 > r1) {
        return Err(Error::invalid(format!("need r2 > r1 > 0, got r1 = {r1}, r2 = {r2}")));
    }
    let eta = n as f64;
    let p1 = Paraboloid::centred(n, r1)?.volume();
    let p2 = Paraboloid::centred(n, r2)?.volume();
    let d0 = ball_volume(n, 2.0 * r1) / ball_volume(n, r1);
    Ok(DoublingReport {
        normalized_ratio: (p2 / r2.powf(eta + 2.0)) / (p1 / r1.powf(eta + 2.0)),
        d0,
        ball_comparison: ball_volume(n, r2) / (d0 * (r2 / r1).powf(eta) * ball_volume(n, r1)),
    })
}

/// Resolution of the tensor rule over a paraboloid or cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadSpec {
    pub radial: usize,
    pub time: usize,
    /// Angular resolution; ignored for `n = 1`.
    pub angular: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { radial: 12, time: 12, angular: 12 }
    }
}

impl QuadSpec {
    pub fn doubled(&self) -> Self {
        Self { radial: 2 * self.radial, time: 2 * self.time, angular: 2 * self.angular }
    }
}

/// Directions and weights on `S^{n-1}`; weights sum to the surface area.
pub fn sphere_rule(n: usize, m: usize) -> Vec<(Vec<f64>, f64)> {
    use std::f64::consts::PI;
    match n {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => {
            let m = m.max(1);
            (0..m)
                .map(|k| {
                    let a = 2.0 * PI * k as f64 / m as f64;
                    (vec![a.cos(), a.sin()], 2.0 * PI / m as f64)
                })
                .collect()
        }
        3 => {
            let gl = GaussLegendre::new(m.max(1));
            let nphi = 2 * m.max(1);
            let mut out = Vec::with_capacity(gl.len() * nphi);
            for (z, wz) in gl.nodes.iter().zip(&gl.weights) {
                let rho = (1.0 - z * z).sqrt();
                for k in 0..nphi {
                    let a = 2.0 * PI * k as f64 / nphi as f64;
                    out.push((vec![rho * a.cos(), rho * a.sin(), *z], wz * 2.0 * PI / nphi as f64));
                }
            }
            out
        }
        _ => panic!("sphere rule implemented for n <= 3"),
    }
}

/// Quadrature nodes `(y, s, weight)` of a region with fibres
/// `y = centre + rho w`, `s in [lo(rho), hi]`.
fn fibred_nodes(
    centre: &[f64],
    radius: f64,
    spec: QuadSpec,
    time_range: impl Fn(f64) -> (f64, f64),
) -> Vec<(Vec<f64>, f64, f64)> {
    let n = centre.len();
    let radial = GaussLegendre::new(spec.radial);
    let time = GaussLegendre::new(spec.time);
    let sphere = sphere_rule(n, spec.angular);
    let mut nodes = Vec::with_capacity(radial.len() * time.len() * sphere.len());
    for (rho, wr) in radial.mapped(0.0, radius) {
        let jac = wr * rho.powi(n as i32 - 1);
        let (lo, hi) = time_range(rho);
        if hi <= lo {
            continue;
        }
        for (dir, ws) in &sphere {
            let y: Vec<f64> = centre.iter().zip(dir).map(|(c, d)| c + rho * d).collect();
            for (s, wt) in time.mapped(lo, hi) {
                nodes.push((y.clone(), s, jac * ws * wt));
            }
        }
    }
    nodes
}

fn paraboloid_nodes(p: &Paraboloid, spec: QuadSpec) -> Vec<(Vec<f64>, f64, f64)> {
    let (r, t0) = (p.radius, p.t0);
    fibred_nodes(&p.vertex, r, spec, |rho| (t0 - (r - rho).powi(2), t0))
}

fn cube_nodes(centre: &[f64], radius: f64, lo: f64, hi: f64, spec: QuadSpec) -> Vec<(Vec<f64>, f64, f64)> {
    fibred_nodes(centre, radius, spec, |_| (lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Difference between the given and the doubled resolution.
    pub error: f64,
}

fn integrate_nodes<F: Fn(&[f64], f64) -> f64 + Sync>(nodes: &[(Vec<f64>, f64, f64)], f: &F) -> f64 {
    // sequential sum keeps the result independent of the thread pool
    let vals: Vec<f64> = nodes.par_iter().map(|(y, s, w)| w * f(y, *s)).collect();
    vals.iter().sum()
}

/// `int_P f`, reporting the coarse/fine difference as the error.
pub fn integrate_over_paraboloid<F>(f: F, p: &Paraboloid, spec: QuadSpec) -> Integral
where
    F: Fn(&[f64], f64) -> f64 + Sync,
{
    let coarse = integrate_nodes(&paraboloid_nodes(p, spec), &f);
    let fine = integrate_nodes(&paraboloid_nodes(p, spec.doubled()), &f);
    Integral { value: fine, error: (fine - coarse).abs() }
}

/// `int f` over `{|y - centre| < r, s in [lo, hi]}`.
pub fn integrate_over_cylinder<F>(f: F, centre: &[f64], radius: f64, lo: f64, hi: f64, spec: QuadSpec) -> Integral
where
    F: Fn(&[f64], f64) -> f64 + Sync,
{
    let coarse = integrate_nodes(&cube_nodes(centre, radius, lo, hi, spec), &f);
    let fine = integrate_nodes(&cube_nodes(centre, radius, lo, hi, spec.doubled()), &f);
    Integral { value: fine, error: (fine - coarse).abs() }
}

/// Gram matrix `<u_i, u_j> = int_P u_i u_j` of a family of functions.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub region: Paraboloid,
    pub labels: Vec<String>,
    pub matrix: DMatrix<f64>,
    /// Largest entrywise coarse/fine difference.
    pub error: f64,
}

impl GramMatrix {
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("nonempty basis")
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn is_symmetric(&self) -> bool {
        self.matrix == self.matrix.transpose()
    }
}

fn gram_at(basis: &[&dyn SpaceTimeField], nodes: &[(Vec<f64>, f64, f64)]) -> DMatrix<f64> {
    let k = basis.len();
    let rows: Vec<(Vec<f64>, f64)> = nodes
        .par_iter()
        .map(|(y, s, w)| (basis.iter().map(|u| u.value(y, *s)).collect(), *w))
        .collect();
    let mut g = DMatrix::zeros(k, k);
    for (vals, w) in &rows {
        for i in 0..k {
            for j in 0..=i {
                g[(i, j)] += w * vals[i] * vals[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            g[(j, i)] = g[(i, j)];
        }
    }
    g
}

pub fn gram(basis: &[&dyn SpaceTimeField], region: &Paraboloid, spec: QuadSpec) -> Result<GramMatrix> {
    if basis.is_empty() {
        return Err(Error::invalid("Gram matrix of an empty basis"));
    }
    if let Some(u) = basis.iter().find(|u| u.dim() != region.dim()) {
        return Err(Error::DimensionMismatch { expected: region.dim(), found: u.dim() });
    }
    let coarse = gram_at(basis, &paraboloid_nodes(region, spec));
    let fine = gram_at(basis, &paraboloid_nodes(region, spec.doubled()));
    let error = (&fine - &coarse).amax();
    Ok(GramMatrix {
        region: region.clone(),
        labels: (0..basis.len()).map(|i| format!("u{i}")).collect(),
        matrix: fine,
        error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma31Report {
    /// `sum_i int_{P_R} u_i^2`.
    pub lhs: f64,
    /// `eps^{-(eta+1)}` times the largest eigenvalue of the Gram matrix on
    /// `P_{(1+eps)R}`.
    pub rhs: f64,
    pub ratio: f64,
}

pub fn lemma31_check(
    basis: &[&dyn SpaceTimeField],
    region: &Paraboloid,
    eps: f64,
    spec: QuadSpec,
) -> Result<Lemma31Report> {
    if !(eps > 0.0) {
        return Err(Error::NonPositive(eps));
    }
    let eta = region.dim() as f64;
    let inner = gram(basis, region, spec)?;
    let outer = gram(basis, &region.scaled(1.0 + eps), spec)?;
    let lhs = inner.trace();
    let rhs = eps.powf(-(eta + 1.0)) * outer.max_eigenvalue();
    Ok(Lemma31Report { lhs, rhs, ratio: lhs / rhs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightIntegral {
    /// `int_{P_R(0,0)} [R(1+eps) - d_p]^{-(eta+2)}`.
    pub value: f64,
    /// `I R^eta / (eps^{-(eta+1)} |B(0, R)|)`.
    pub normalized: f64,
}

pub fn weight_integral_i(n: usize, r: f64, eps: f64) -> Result<WeightIntegral> {
    if !(eps > 0.0) {
        return Err(Error::NonPositive(eps));
    }
    if !(r > 0.0) {
        return Err(Error::NonPositive(r));
    }
    let m = n as f64 + 2.0;
    let lo = r * eps;
    // int_0^A 2u (c - u)^{-m} du with c = lo + A, via v = c - u
    let inner = |a: f64| {
        let c = lo + a;
        let prim = |v: f64| 2.0 * (c * v.powf(1.0 - m) / (1.0 - m) - v.powf(2.0 - m) / (2.0 - m));
        prim(c) - prim(lo)
    };
    let area = n as f64 * unit_ball_volume(n);
    let outer = quadrature::adaptive(|rho| rho.powi(n as i32 - 1) * inner(r - rho), 0.0, r, 0.0, 1e-12);
    if !outer.converged {
        return Err(Error::NonconvergentTail { t: r, reason: "weight integral did not converge".into() });
    }
    let value = area * outer.value;
    let eta = n as f64;
    Ok(WeightIntegral {
        value,
        normalized: value * r.powf(eta) / (eps.powf(-(eta + 1.0)) * ball_volume(n, r)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRow {
    pub scale: f64,
    /// `tr(G_{beta R}^{-1} G_R)`.
    pub trace: f64,
    /// `det G_R / det G_{R0}`.
    pub det_ratio: f64,
    pub log_det: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    pub rows: Vec<IterationRow>,
    /// Least-squares slope of `log det G_R` against `log R`.
    pub fitted_exponent: f64,
    /// `k (2q + eta + 2)`.
    pub bound: f64,
    /// `k beta^{-(2q + eta + 2)}`, the trace level in the claim.
    pub trace_threshold: f64,
}

impl IterationLog {
    pub fn within_bound(&self, slack: f64) -> bool {
        self.fitted_exponent <= self.bound + slack
    }
}

pub fn trace_det_iteration(
    basis: &[&dyn SpaceTimeField],
    x0: &[f64],
    t0: f64,
    r0: f64,
    beta: f64,
    q: f64,
    steps: usize,
    spec: QuadSpec,
) -> Result<IterationLog> {
    if !(beta > 1.0) {
        return Err(Error::invalid(format!("beta must exceed 1, got {beta}")));
    }
    let base = Paraboloid::new(x0.to_vec(), t0, r0)?;
    let mut scales = vec![r0];
    while scales.len() <= steps {
        let next = scales.last().unwrap() * beta;
        if next * beta > MAX_ITERATION_SCALE {
            break;
        }
        scales.push(next);
    }
    if scales.len() < 2 {
        return Err(Error::invalid("no room for the iteration below the scale cap"));
    }
    let grams: Vec<DMatrix<f64>> = scales
        .iter()
        .chain(std::iter::once(&(scales.last().unwrap() * beta)))
        .map(|&s| gram(basis, &base.scaled(s / r0), spec).map(|g| g.matrix))
        .collect::<Result<_>>()?;
    let det0 = grams[0].determinant();
    let mut rows = Vec::with_capacity(scales.len());
    for (j, &scale) in scales.iter().enumerate() {
        let chol = grams[j + 1]
            .clone()
            .cholesky()
            .ok_or_else(|| Error::invalid(format!("Gram matrix at scale {} is not positive definite", scale * beta)))?;
        let trace = chol.solve(&grams[j]).trace();
        let det = grams[j].determinant();
        rows.push(IterationRow { scale, trace, det_ratio: det / det0, log_det: det.ln() });
    }
    let k = basis.len() as f64;
    let eta = x0.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.scale.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.log_det).collect();
    Ok(IterationLog {
        rows,
        fitted_exponent: fit_slope(&xs, &ys),
        bound: k * (2.0 * q + eta + 2.0),
        trace_threshold: k * beta.powf(-(2.0 * q + eta + 2.0)),
    })
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Uniform point of `P` by rejection from its bounding box.
pub fn sample_paraboloid<R: Rng + ?Sized>(rng: &mut R, p: &Paraboloid) -> (Vec<f64>, f64) {
    let r = p.radius;
    loop {
        let y: Vec<f64> = p.vertex.iter().map(|v| v + rng.random_range(-r..r)).collect();
        let s = p.t0 - rng.random_range(0.0..r * r);
        if p.contains(&y, s) {
            return (y, s);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NestingReport {
    pub samples: usize,
    pub violations: usize,
}

/// For `(x, t)` in `P_R(x0, t0)` and `r = R(1+eps) - d_p((x, t), (x0, t0))`,
/// checks that samples of `P_r(x, t)` stay in `P_{(1+eps)R}(x0, t0)`.
pub fn nesting_check(region: &Paraboloid, eps: f64, samples: usize, seed: u64) -> Result<NestingReport> {
    if !(eps > 0.0) {
        return Err(Error::NonPositive(eps));
    }
    let outer = region.scaled(1.0 + eps);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..samples {
        let (x, t) = sample_paraboloid(&mut rng, region);
        let r = outer.radius - dp(&x, t, &region.vertex, region.t0);
        let inner = Paraboloid::new(x, t, r)?;
        let (y, s) = sample_paraboloid(&mut rng, &inner);
        let d = dp(&y, s, &outer.vertex, outer.t0);
        if s > outer.t0 || d > outer.radius * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    Ok(NestingReport { samples, violations })
}
