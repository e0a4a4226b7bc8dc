use std::path::Path;

use ancient_core::ancient_eval::{check_cm, default_cm_step, heat_residual};
use ancient_core::caloric_poly::{
    backward_unique, caloric_extend, check_dim_bound, decompose, dim_hq, dim_hq_oracle, CaloricPolynomial, MultiPoly,
};
use ancient_core::error::{Error, Result};
use ancient_core::fd_engine::{self, heat_kernel};
use ancient_core::field::{FnField, SpaceTimeField};
use ancient_core::laplace_bernstein::{
    laplace_forward, recover_h, verify_h_identity, Confidence, CumulativeSpectral, HStencil, InversionConfig, InversionMethod,
    LaplaceSource, JUMP_MARGIN,
};
use ancient_core::parabolic_geometry::{self as geom, Paraboloid, QuadSpec};
use ancient_core::{AncientSolution, SpectralMeasure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::Report;
use crate::{CaloricCommand, CmArgs, Cli, Command, DimArgs, GeomArgs, InvertArgs, PolyArgs, SynthArgs, VerifyArgs};

/// Result of a command: the CSV report, plus plain text for stdout when the
/// command has a direct answer.
pub struct Outcome {
    pub report: Report,
    pub text: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self { report, text: None }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Synth(a) => synth(cli, a).map(Into::into),
        Command::CheckCm(a) => check_cm_cmd(cli, a).map(Into::into),
        Command::Invert(a) => invert(cli, a).map(Into::into),
        Command::Caloric(c) => caloric(cli, c),
        Command::Dim(a) => dim(cli, a).map(Into::into),
        Command::Geom(a) => geometry(cli, a).map(Into::into),
        Command::Verify(a) => verify(cli, a).map(Into::into),
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

/// `a,b,c` or `start:stop:step` (inclusive of `stop` up to rounding).
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (parse_f64(a)?, parse_f64(b)?, parse_f64(step)?);
            if !(step > 0.0) || b < a {
                return Err(Error::Parse(format!("bad range {text:?}")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| a + i as f64 * step).collect())
        }
        [_] => text.split(',').map(parse_f64).collect(),
        _ => Err(Error::Parse(format!("bad list {text:?}"))),
    }
}

fn parse_point(text: Option<&str>, dim: usize) -> Result<Vec<f64>> {
    match text {
        None => Ok(vec![0.0; dim]),
        Some(t) => {
            let p: Vec<f64> = t.split(',').map(parse_f64).collect::<Result<_>>()?;
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            Ok(p)
        }
    }
}

fn fmt_point(x: &[f64]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn load_solution(path: &Path) -> Result<AncientSolution> {
    AncientSolution::new(SpectralMeasure::load(path)?)
}

fn synth(cli: &Cli, a: &SynthArgs) -> Result<Report> {
    let measure = match &a.measure {
        Some(p) => SpectralMeasure::load(p)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            SpectralMeasure::random(&mut rng, a.dim, a.atoms, a.s_max)
        }
    };
    if let Some(p) = &a.save_measure {
        measure.save(p)?;
    }
    let dim = measure.dim;
    let sol = AncientSolution::new(measure)?;
    let points: Vec<Vec<f64>> = match &a.points {
        Some(text) => text.split(';').map(|p| parse_point(Some(p), dim)).collect::<Result<_>>()?,
        None => vec![vec![0.0; dim]],
    };
    let times = parse_list(&a.t)?;
    let tol = cli.tol.unwrap_or(1e-12);

    let mut r = Report::new("synth", cli.seed, cli.threads);
    r.param("measure", a.measure.as_ref().map_or("random".to_string(), |p| p.display().to_string()));
    r.param("dim", dim);
    r.param("atoms", sol.measure().atoms.len());
    r.param("t", &a.t);
    for x in &points {
        for &t in &times {
            let params = format!("x={};t={t}", fmt_point(x));
            r.info("synth", "Thm-1.1", &params, "u", sol.eval(x, t)?);
            r.info("synth", "Thm-1.1", &params, "u_t", sol.eval_dt(x, t, 1)?);
            let res = heat_residual(&sol, &[(x.clone(), t)])?;
            r.check("synth", "Thm-1.1", &params, "heat_residual_rel", res.max_rel, tol, res.max_rel <= tol);
        }
    }
    Ok(r)
}

fn check_cm_cmd(cli: &Cli, a: &CmArgs) -> Result<Report> {
    let grid = parse_list(&a.grid)?;
    let step = a.step.unwrap_or_else(|| default_cm_step(&grid, a.order));
    let mut r = Report::new("check-cm", cli.seed, cli.threads);
    r.param("grid", &a.grid);
    r.param("order", a.order);
    r.param("step", step);

    let report = match (&a.measure, a.function.as_deref()) {
        (Some(p), None) => {
            let sol = load_solution(p)?;
            let x = parse_point(a.x.as_deref(), sol.dim())?;
            r.param("measure", p.display());
            r.param("x", fmt_point(&x));
            check_cm(|t| sol.eval(&x, -t), &grid, a.order, step)?
        }
        (None, Some("gaussian")) => {
            r.param("function", "exp(-t^2)");
            check_cm(|t| Ok((-t * t).exp()), &grid, a.order, step)?
        }
        (None, Some("exp")) => {
            r.param("function", "exp(-t)");
            check_cm(|t| Ok((-t).exp()), &grid, a.order, step)?
        }
        (None, Some(other)) => return Err(Error::InvalidInput(format!("unknown function {other:?}"))),
        _ => return Err(Error::InvalidInput("give exactly one of --measure or --function".into())),
    };
    let tol = cli.tol.unwrap_or(ancient_core::ancient_eval::CM_RELATIVE_TOL);
    for (k, m) in report.minima.iter().enumerate() {
        r.check("check-cm", "Thm-1.1-cm", format!("k={k}"), "min_signed_difference_rel", m, tol, *m >= -tol);
    }
    Ok(r)
}

fn invert(cli: &Cli, a: &InvertArgs) -> Result<Report> {
    let sol = load_solution(&a.measure)?;
    let x = parse_point(a.x.as_deref(), sol.dim())?;
    let s_grid = parse_list(&a.s_grid)?;
    let method: InversionMethod = a.method.parse()?;
    let cfg = InversionConfig { abscissa: a.abscissa, ..InversionConfig::with_method(method) };
    let tol = cli.tol.unwrap_or(1e-3);

    let mut r = Report::new("invert", cli.seed, cli.threads);
    r.param("measure", a.measure.display());
    r.param("x", fmt_point(&x));
    r.param("s_grid", &a.s_grid);
    r.param("method", &a.method);

    let rec = recover_h(&sol, &x, &s_grid, &cfg)?;
    let exact = CumulativeSpectral::analytic(&sol, &x, &s_grid)?;
    let jumps = sol.measure().spectrum();
    r.param("abscissa", a.abscissa.map_or("auto".to_string(), |c| c.to_string()));
    for (((s, h), e), c) in rec.s.iter().zip(&rec.h).zip(&exact.h).zip(&rec.confidence) {
        let params = format!("s={s}");
        let trusted = jumps.iter().all(|j| (s - j).abs() >= JUMP_MARGIN);
        r.info("invert", "Eq-fanlaph", &params, "h_recovered", h);
        let level = if *c == Confidence::High { "high" } else { "low" };
        r.info("invert", "Eq-fanlaph", &params, "confidence", level);
        if trusted {
            let err = (h - e).abs();
            r.check("invert", "Eq-fanlaph", &params, "h_error", err, tol, err <= tol);
        } else {
            r.info("invert", "Eq-fanlaph", &params, "h_error_near_jump", (h - e).abs());
        }
    }
    let sampled = rec.to_sampled();
    for t in parse_list("0.5:5:0.5")? {
        let f = laplace_forward(LaplaceSource::Sampled(&sampled), t)?;
        let expect = sol.eval(&x, -t)? / t;
        let rel = (f - expect).abs() / expect.abs();
        r.check("invert", "Eq-msx", format!("t={t}"), "forward_rel_error", rel, tol, rel <= tol);
    }
    if let Some(times) = &a.identity {
        let st = HStencil::recovered(&sol, &x, 0.05, &s_grid, &cfg)?;
        for t in parse_list(times)? {
            let id = verify_h_identity(&st, t)?;
            r.check("invert", "Addendum-h", format!("t={t}"), "identity_residual", id.residual, tol, id.residual <= tol);
        }
    }
    Ok(r)
}

fn parse_poly(a: &PolyArgs) -> Result<MultiPoly> {
    MultiPoly::parse(&a.polynomial, a.n)
}

fn caloric(cli: &Cli, c: &CaloricCommand) -> Result<Outcome> {
    let mut r = Report::new("caloric", cli.seed, cli.threads);
    let text = match c {
        CaloricCommand::Extend(a) => {
            let u0 = parse_poly(a)?;
            let u = caloric_extend(&u0)?;
            r.param("u0", &u0);
            r.info("caloric-extend", "Thm-1.3b", format!("u0={u0}"), "u", &u);
            let zero = u.polynomial().heat_op().is_zero();
            r.check("caloric-extend", "Thm-1.3b", format!("u0={u0}"), "heat_op_is_zero", zero, 0.0, zero);
            u.to_string()
        }
        CaloricCommand::Decompose(a) => {
            let p = parse_poly(a)?;
            r.param("u", &p);
            let d = decompose(&p)?;
            let lines: Vec<String> = d.chain().iter().enumerate().map(|(i, u)| format!("u{i} = {u}")).collect();
            for (i, u) in d.chain().iter().enumerate() {
                r.info("caloric-decompose", "Thm-1.3b", format!("i={i}"), "chain", u);
            }
            let ok = d.chain_relations_hold();
            r.check("caloric-decompose", "Thm-1.3b", "", "chain_relations", ok, 0.0, ok);
            lines.join("\n")
        }
    };
    Ok(Outcome { report: r, text: Some(text) })
}

fn dim(cli: &Cli, a: &DimArgs) -> Result<Report> {
    let mut r = Report::new("dim", cli.seed, cli.threads);
    r.param("n", a.n);
    r.param("qmax", a.qmax);
    let rows = check_dim_bound(a.n, a.qmax)?;
    let first = rows.first().map_or(0.0, |row| row.ratio);
    for row in &rows {
        let params = format!("n={};q={}", a.n, row.q);
        r.info("dim", "Thm-1.3a", &params, "dim", row.dim);
        r.info("dim", "Thm-1.3a", &params, "q_pow", row.power);
        r.check("dim", "Thm-1.3a", &params, "ratio", row.ratio, first, row.ratio <= first);
        if row.q <= a.oracle_max {
            let oracle = dim_hq_oracle(a.n, f64::from(row.q)) as u64;
            let ok = oracle == dim_hq(a.n, f64::from(row.q));
            r.check("dim", "Thm-1.3a", &params, "nullity", oracle, 0.0, ok);
        }
    }
    if a.backward {
        for q in 1..=a.qmax.min(12) {
            let b = backward_unique(q, a.n)?;
            let params = format!("n={};q={q}", a.n);
            r.info("backward", "Prop-4.1a", &params, "unknowns", b.unknowns);
            r.check("backward", "Prop-4.1a", &params, "nullity", b.nullity, 0.0, b.nullity == 0);
        }
    }
    Ok(r)
}

/// Caloric extensions of all monomials of degree `<= 2` in `n` variables.
fn quadratic_basis(n: usize) -> Result<Vec<CaloricPolynomial>> {
    let mut texts = vec!["1".to_string()];
    texts.extend((0..n).map(|i| format!("x{i}")));
    for i in 0..n {
        for j in i..n {
            texts.push(if i == j { format!("x{i}^2") } else { format!("x{i}*x{j}") });
        }
    }
    texts.iter().map(|t| caloric_extend(&MultiPoly::parse(t, Some(n))?)).collect()
}

fn geometry(cli: &Cli, a: &GeomArgs) -> Result<Report> {
    let n = a.n;
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidInput(format!("geometry supports n <= 3, got {n}")));
    }
    let radii = parse_list(&a.r)?;
    let eps_list = parse_list(&a.eps)?;
    let mut r = Report::new("geom", cli.seed, cli.threads);
    r.param("n", n);
    r.param("r", &a.r);
    r.param("samples", a.samples);
    r.param("eps", &a.eps);
    r.param("beta", a.beta);
    r.param("steps", a.steps);

    for (i, &rad) in radii.iter().enumerate() {
        let p = Paraboloid::centred(n, rad)?;
        let params = format!("n={n};r={rad}");
        let mc = geom::volume_mc(&p, a.samples, cli.seed.wrapping_add(i as u64));
        r.info("volume", "Sec3-paraboloid", &params, "closed_form", p.volume());
        r.info("volume", "Sec3-paraboloid", &params, "monte_carlo", mc.mean);
        r.info("volume", "Sec3-paraboloid", &params, "std_error", mc.std_error);
        let sig = mc.sigmas(p.volume());
        r.check("volume", "Sec3-paraboloid", &params, "sigmas", sig, 3.0, sig <= 3.0);

        let v = geom::volume_ratio_bounds(n, rad)?;
        r.info("volume-ratio", "Sec3-volume-ratio", &params, "lower", v.lower);
        r.check("volume-ratio", "Sec3-volume-ratio", &params, "ratio", v.ratio, v.lower, v.within());
    }
    if radii.len() >= 2 {
        let (r1, r2) = (radii[0], radii[radii.len() - 1]);
        let d = geom::doubling_check(n, r1, r2)?;
        let params = format!("n={n};r1={r1};r2={r2}");
        let err = (d.normalized_ratio - 1.0).abs();
        r.check("doubling", "Eq-pr2pr1", &params, "normalized_ratio", d.normalized_ratio, 1e-12, err <= 1e-12);
        r.check("doubling", "Eq-vdouble", &params, "ball_comparison", d.ball_comparison, 1.0, d.ball_comparison <= 1.0 + 1e-12);
    }

    let basis = quadratic_basis(n)?;
    let fields: Vec<&dyn SpaceTimeField> = basis.iter().map(|u| u as &dyn SpaceTimeField).collect();
    let labels: Vec<String> = basis.iter().map(|u| u.to_string()).collect();
    r.param("basis", labels.join(" | "));
    let spec = QuadSpec::default();
    let k = fields.len() as f64;
    for &rad in &radii {
        let g = geom::gram(&fields, &Paraboloid::centred(n, rad)?, spec)?;
        let params = format!("n={n};R={rad}");
        let min = g.min_eigenvalue();
        r.info("gram", "Eq-uv", &params, "quadrature_error", g.error);
        r.check("gram", "Eq-uv", &params, "min_eigenvalue", min, 0.0, min > 0.0);
    }
    let unit = Paraboloid::centred(n, 1.0)?;
    for &eps in &eps_list {
        let rep = geom::lemma31_check(&fields, &unit, eps, spec)?;
        let params = format!("n={n};R=1;eps={eps}");
        r.info("lemma31", "Lemma-3.1", &params, "lhs", rep.lhs);
        r.info("lemma31", "Lemma-3.1", &params, "rhs", rep.rhs);
        r.check("lemma31", "Lemma-3.1", &params, "ratio", rep.ratio, k, rep.ratio.is_finite() && rep.ratio <= k);
        let w = geom::weight_integral_i(n, 1.0, eps)?;
        r.info("weight-integral", "Lemma-3.1-I", &params, "I", w.value);
        r.info("weight-integral", "Lemma-3.1-I", &params, "normalized", w.normalized);
    }
    let origin = vec![0.0; n];
    let log = geom::trace_det_iteration(&fields, &origin, 0.0, 1.0, a.beta, 2.0, a.steps, spec)?;
    for row in &log.rows {
        let params = format!("n={n};scale={}", row.scale);
        r.info("iteration", "Thm-1.3a-iteration", &params, "trace", row.trace);
        r.info("iteration", "Thm-1.3a-iteration", &params, "det_ratio", row.det_ratio);
    }
    r.info("iteration", "Thm-1.3a-iteration", format!("n={n}"), "trace_threshold", log.trace_threshold);
    r.check(
        "iteration",
        "Thm-1.3a-iteration",
        format!("n={n};q=2"),
        "fitted_det_exponent",
        log.fitted_exponent,
        log.bound + 0.5,
        log.within_bound(0.5),
    );
    let nest = geom::nesting_check(&unit, eps_list.first().copied().unwrap_or(0.5), a.samples.min(20_000), cli.seed)?;
    r.check("nesting", "Eq-pxtpx0t0", format!("n={n};R=1"), "violations", nest.violations, 0.0, nest.violations == 0);
    Ok(r)
}

const VERIFY_CHECKS: [&str; 7] =
    ["richardson", "kernel", "li-yau", "forward-bound", "mean-value", "caccioppoli", "high-dt"];

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<Report> {
    let selected: Vec<&str> = if a.check == "all" {
        VERIFY_CHECKS.to_vec()
    } else if VERIFY_CHECKS.contains(&a.check.as_str()) {
        vec![a.check.as_str()]
    } else {
        return Err(Error::InvalidInput(format!("unknown check {:?}", a.check)));
    };
    if !(1..=2).contains(&a.n) {
        return Err(Error::InvalidInput(format!("verify supports n = 1, 2, got {}", a.n)));
    }
    let n = a.n;
    let mut r = Report::new("verify", cli.seed, cli.threads);
    r.param("check", &a.check);
    r.param("h", a.h);
    r.param("n", n);
    r.param("t_final", a.t_final);
    let spec = QuadSpec::default();

    for check in selected {
        match check {
            "richardson" => {
                let hs = [4.0 * a.h, 2.0 * a.h, a.h];
                let sine = |x: &[f64]| x.iter().map(|v| v.sin()).product::<f64>();
                let half_width = if n == 1 { 4.0 } else { 2.0 };
                let study = fd_engine::richardson_study(&sine, n, half_width, &hs, a.t_final)?;
                for (h, e) in study.spacings.iter().zip(&study.errors) {
                    r.info("richardson", "Thm-1.3b-step1", format!("n={n};h={h}"), "max_error", e);
                }
                let tol = cli.tol.unwrap_or(0.3);
                let ok = (study.slope - 2.0).abs() <= tol;
                r.check("richardson", "Thm-1.3b-step1", format!("n={n}"), "slope", study.slope, tol, ok);
            }
            "kernel" => {
                let m = fd_engine::kernel_mass(n)?;
                let tol = cli.tol.unwrap_or(1e-6);
                let err = (m.total - 1.0).abs();
                r.info("kernel-mass", "Thm-1.3b-step1", format!("n={n}"), "tail", m.tail);
                r.check("kernel-mass", "Thm-1.3b-step1", format!("n={n}"), "mass", m.total, tol, err <= tol);
                let (c1, c2) = fd_engine::kernel_bound_constants(n);
                r.info("gaussian-bound", "Eq-gub", format!("n={n}"), "c1", c1);
                r.info("gaussian-bound", "Eq-gub", format!("n={n}"), "c2", c2);
                let sweep = fd_engine::check_gaussian_bound(n, a.samples, cli.seed);
                r.info("gaussian-bound", "Eq-gub", format!("n={n}"), "max_ratio", sweep.max_ratio);
                r.check(
                    "gaussian-bound",
                    "Eq-gub",
                    format!("n={n};samples={}", sweep.samples),
                    "violations",
                    sweep.violations,
                    0.0,
                    sweep.violations == 0,
                );
            }
            "li-yau" => {
                let tol = cli.tol.unwrap_or(1e-3);
                for t in [0.5, 1.0, 2.0] {
                    let x = vec![0.4; n];
                    let ly = fd_engine::li_yau_kernel(&x, t)?;
                    let params = format!("n={n};t={t}");
                    let ea = (ly.analytic - ly.exact).abs();
                    r.check("li-yau", "Eq-ly", &params, "analytic_error", ea, 1e-8, ea <= 1e-8);
                    let ef = (ly.finite_difference - ly.exact).abs();
                    r.check("li-yau", "Eq-ly", &params, "fd_error", ef, tol, ef <= tol);
                }
            }
            "forward-bound" => {
                let sq = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
                let b = fd_engine::check_forward_bound(&sq, n, 2, 10.0, 4.0)?;
                r.info("forward-bound", "Eq-ut+jie", format!("n={n};u0=|x|^2"), "c0", b.c0);
                // the caloric extension |x|^2 + 2nt stays below 2n (|x| + sqrt t + 1)^2
                let cap = 2.0 * n as f64;
                r.check("forward-bound", "Eq-ut+jie", format!("n={n};u0=|x|^2;q=2"), "ratio", b.ratio, cap, b.ratio <= cap);
                let quartic = |x: &[f64]| x.iter().map(|v| v.powi(4)).sum::<f64>();
                let b = fd_engine::check_forward_bound(&quartic, n, 4, 10.0, 4.0)?;
                r.info("forward-bound", "Eq-ut+jie", format!("n={n};u0=sum x^4;q=4"), "ratio", b.ratio);
            }
            "mean-value" => {
                let c = FnField::new(n, |_: &[f64], _| 1.0);
                let m = fd_engine::mean_value_check(&c, &vec![0.0; n], 0.0, 1.0, spec)?;
                let err = (m.ratio - 1.0).abs();
                r.check("mean-value", "Eq-mvip", format!("n={n};u=1"), "ratio", m.ratio, 1e-12, err <= 1e-12);
                let u = caloric_extend(&MultiPoly::parse("x0^2", Some(n))?)?;
                let m = fd_engine::mean_value_check(&u, &vec![0.0; n], 0.0, 1.0, spec)?;
                r.info("mean-value", "Eq-mvip", format!("n={n};u=x0^2+2t"), "ratio", m.ratio);
                let origin = vec![0.0; n];
                let kernel = FnField::new(n, |y: &[f64], s| heat_kernel(y, s, &origin));
                let m = fd_engine::mean_value_check(&kernel, &vec![0.0; n], 1.0, 0.5, spec)?;
                let drift = (m.ratio / m.refined_ratio - 1.0).abs();
                r.info("mean-value", "Eq-mvip", format!("n={n};u=G;r=0.5"), "ratio", m.ratio);
                r.check("mean-value", "Eq-mvip", format!("n={n};u=G;r=0.5"), "refinement_drift", drift, 0.05, drift <= 0.05);
            }
            "caccioppoli" => {
                for u0 in ["x0^2", "x0^4"] {
                    let u = caloric_extend(&MultiPoly::parse(u0, Some(n))?)?;
                    let mut seen = Vec::new();
                    for rad in [1.0, 2.0, 4.0] {
                        let rep = fd_engine::caccioppoli_poly(&u, &vec![0.0; n], 0.0, rad, spec)?;
                        r.info("caccioppoli", "Eq-ddu2r-4", format!("n={n};u={u};R={rad}"), "C0", rep.c0);
                        seen.push(rep.c0);
                    }
                    let spread = seen.iter().map(|c| (c / seen[0] - 1.0).abs()).fold(0.0, f64::max);
                    r.check("caccioppoli", "Eq-ddu2r-4", format!("n={n};u={u}"), "C0_spread", spread, 0.1, spread <= 0.1);
                }
            }
            "high-dt" => {
                for (u0, k) in [("x0^4", 3), ("x0^2", 2)] {
                    let u = caloric_extend(&MultiPoly::parse(u0, Some(n))?)?;
                    let x1 = vec![0.3; n];
                    let rep = fd_engine::high_dt_vanishing(&u, k, &x1, -0.5, &[1.0, 2.0, 4.0, 8.0])?;
                    let params = format!("n={n};u={u};k={k}");
                    r.check("high-dt", "Thm-1.3b-step2", &params, "symbolic_zero", rep.symbolic_zero, 0.0, rep.symbolic_zero);
                    for w in &rep.windows {
                        r.info("high-dt", "Eq-utk<", format!("{params};R={};step={:e}", w.radius, w.step), "estimate", w.estimate);
                    }
                    r.info("high-dt", "Eq-utk<", &params, "bound_slope", rep.bound_slope);
                    match rep.fitted_slope {
                        Some(s) => r.check("high-dt", "Eq-utk<", &params, "fitted_slope", s, 0.0, s < 0.0),
                        None => r.check("high-dt", "Eq-utk<", &params, "all_estimates_zero", true, 0.0, true),
                    }
                }
            }
            _ => unreachable!("checked against the list above"),
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("1,2.5,-3").unwrap(), vec![1.0, 2.5, -3.0]);
        assert_eq!(parse_list("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_list("0.5:5:0.5").unwrap().len(), 10);
        assert!(parse_list("1:0:0.1").is_err());
        assert!(parse_list("a,b").is_err());
    }

    #[test]
    fn points() {
        assert_eq!(parse_point(Some("1,-2"), 2).unwrap(), vec![1.0, -2.0]);
        assert_eq!(parse_point(None, 3).unwrap(), vec![0.0; 3]);
        assert!(matches!(parse_point(Some("1"), 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn quadratic_basis_size() {
        assert_eq!(quadratic_basis(1).unwrap().len(), 3);
        assert_eq!(quadratic_basis(2).unwrap().len(), 6);
    }
}
