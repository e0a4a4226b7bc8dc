//! Acceptance suite: each criterion runs at its stated tolerance and prints
//! one PASS/FAIL line. Exits nonzero when any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use ancient_core::ancient_eval::{check_cm, default_cm_step, heat_residual, DEFAULT_CM_ORDER};
use ancient_core::caloric_poly::{
    backward_unique, caloric_extend, check_dim_bound, decompose, dim_hq, dim_hq_oracle, CaloricSystem, MultiPoly,
};
use ancient_core::fd_engine::{
    check_gaussian_bound, high_dt_vanishing, kernel_bound_constants, kernel_mass, li_yau_kernel, richardson_study,
};
use ancient_core::field::{FnField, SpaceTimeField};
use ancient_core::laplace_bernstein::{
    laplace_forward, recover_h, verify_h_identity, CumulativeSpectral, HStencil, InversionConfig, LaplaceSource,
    JUMP_MARGIN,
};
use ancient_core::parabolic_geometry::{
    gram, lemma31_check, trace_det_iteration, volume_mc, volume_ratio_bounds, Paraboloid, QuadSpec,
};
use ancient_core::{AncientSolution, SpectralAtom, SpectralMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(outcome: Outcome, elapsed: Duration, budget: Option<Duration>) -> Outcome {
    match (outcome, budget) {
        (Ok(d), Some(b)) if elapsed > b => Err(format!("{d}; runtime {elapsed:.2?} exceeds {b:?}")),
        (o, _) => o,
    }
}

fn random_measures() -> Vec<SpectralMeasure> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..100)
        .map(|_| {
            let dim = rng.random_range(1..=3);
            let atoms = rng.random_range(1..=20);
            SpectralMeasure::random(&mut rng, dim, atoms, 4.0)
        })
        .collect()
}

fn representation_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for m in random_measures() {
        let n = m.dim;
        let sol = AncientSolution::new(m).map_err(|e| e.to_string())?;
        let samples: Vec<(Vec<f64>, f64)> = (0..1000)
            .map(|_| ((0..n).map(|_| rng.random_range(-2.0..2.0)).collect(), rng.random_range(-3.0..0.0)))
            .collect();
        let r = heat_residual(&sol, &samples).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_rel);
    }
    ensure(worst <= 1e-12, format!("max relative residual {worst:.3e} (tol 1e-12)"))
}

fn complete_monotonicity() -> Outcome {
    let grid: Vec<f64> = (1..=10).map(|i| 0.5 * i as f64).collect();
    let step = default_cm_step(&grid, DEFAULT_CM_ORDER);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut passed = 0;
    for m in random_measures() {
        let x: Vec<f64> = (0..m.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sol = AncientSolution::new(m).map_err(|e| e.to_string())?;
        let rep = check_cm(|t| sol.eval(&x, -t), &grid, DEFAULT_CM_ORDER, step).map_err(|e| e.to_string())?;
        if rep.passed() {
            passed += 1;
        }
    }
    let control = check_cm(|t| Ok((-t * t).exp()), &grid, DEFAULT_CM_ORDER, step).map_err(|e| e.to_string())?;
    ensure(
        passed == 100 && !control.passed(),
        format!(
            "{passed}/100 measures CM to order {DEFAULT_CM_ORDER}; e^(-t^2) control fails at order {:?}",
            control.first_failing_order()
        ),
    )
}

fn laplace_round_trip() -> Outcome {
    let cases = vec![
        (vec![SpectralAtom::new(1.5, vec![1.0], 1.0)], vec![0.3]),
        (vec![SpectralAtom::new(1.0, vec![1.0], 1.0), SpectralAtom::new(3.0, vec![-1.0], 0.5)], vec![-0.2]),
    ];
    // linear interpolation of a step on spacing d costs about (t d)^2 / 6
    // relative in the forward transform, so the grid is kept fine
    let s_grid: Vec<f64> = (0..=800).map(|i| 0.01 * i as f64).collect();
    let cfg = InversionConfig::default();
    let (mut h_err, mut f_err): (f64, f64) = (0.0, 0.0);
    for (atoms, x) in cases {
        let sol = AncientSolution::new(SpectralMeasure::new(1, atoms)).map_err(|e| e.to_string())?;
        let jumps: Vec<f64> = sol.measure().spectrum();
        let rec = recover_h(&sol, &x, &s_grid, &cfg).map_err(|e| e.to_string())?;
        let exact = CumulativeSpectral::analytic(&sol, &x, &s_grid).map_err(|e| e.to_string())?;
        for ((s, a), b) in rec.s.iter().zip(&rec.h).zip(&exact.h) {
            if jumps.iter().all(|j| (s - j).abs() >= JUMP_MARGIN) {
                h_err = h_err.max((a - b).abs());
            }
        }
        let sampled = rec.to_sampled();
        for i in 0..=18 {
            let t = 0.5 + 0.25 * i as f64;
            let f = laplace_forward(LaplaceSource::Sampled(&sampled), t).map_err(|e| e.to_string())?;
            let expect = sol.eval(&x, -t).map_err(|e| e.to_string())? / t;
            f_err = f_err.max((f - expect).abs() / expect.abs());
        }
    }
    ensure(
        h_err <= 1e-3 && f_err <= 1e-3,
        format!("h error {h_err:.2e} away from jumps; forward relative error {f_err:.2e} on [0.5, 5] (tol 1e-3)"),
    )
}

fn addendum_identity() -> Outcome {
    let single = SpectralMeasure::new(1, vec![SpectralAtom::new(1.0, vec![1.0], 1.0)]);
    // e^t cosh x
    let cosh = SpectralMeasure::new(
        1,
        vec![SpectralAtom::new(1.0, vec![1.0], 0.5), SpectralAtom::new(1.0, vec![-1.0], 0.5)],
    );
    let s_grid: Vec<f64> = (0..=80).map(|i| 0.05 * i as f64).collect();
    let cfg = InversionConfig::default();
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (name, m) in [("single", single), ("cosh", cosh)] {
        let sol = AncientSolution::new(m).map_err(|e| e.to_string())?;
        let analytic = HStencil::analytic(&sol, &[0.2], 1e-3, &s_grid).map_err(|e| e.to_string())?;
        let recovered = HStencil::recovered(&sol, &[0.2], 0.05, &s_grid, &cfg).map_err(|e| e.to_string())?;
        for t in [2.0, 3.0] {
            let a = verify_h_identity(&analytic, t).map_err(|e| e.to_string())?;
            let r = verify_h_identity(&recovered, t).map_err(|e| e.to_string())?;
            worst = worst.max(a.residual).max(r.residual);
            detail.push(format!("{name}@{t}: {:.1e}/{:.1e}", a.residual, r.residual));
        }
    }
    ensure(worst <= 1e-3, format!("residual analytic/recovered {} (tol 1e-3)", detail.join(", ")))
}

fn caloric_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..500 {
        let dim = rng.random_range(1..=3);
        let deg = rng.random_range(0..=10);
        let terms = rng.random_range(1..=6);
        let u0 = MultiPoly::random_spatial(&mut rng, dim, deg, terms);
        let u = caloric_extend(&u0).map_err(|e| e.to_string())?;
        if !u.polynomial().heat_op().is_zero() {
            return Err(format!("case {i}: heat_op nonzero for u0 = {u0}"));
        }
        if !u.chain_relations_hold() {
            return Err(format!("case {i}: chain relation fails for u0 = {u0}"));
        }
        let d = decompose(u.polynomial()).map_err(|e| e.to_string())?;
        if d.chain() != u.chain() || d.chain().first().map_or(!u0.is_zero(), |c| *c != u0) {
            return Err(format!("case {i}: decompose(extend(u0)) differs for u0 = {u0}"));
        }
    }
    Ok("500 random u0: exact zero residual, chain relations, decompose(extend) = id".into())
}

fn dimension() -> Outcome {
    for n in 1..=3 {
        for q in 1..=8 {
            let closed = dim_hq(n, q as f64);
            let oracle = dim_hq_oracle(n, q as f64) as u64;
            if closed != oracle {
                return Err(format!("n = {n}, q = {q}: closed form {closed} vs nullity {oracle}"));
            }
        }
    }
    let mut worst = 0.0f64;
    for n in 1..=3 {
        let rows = check_dim_bound(n, 20).map_err(|e| e.to_string())?;
        let first = rows[0].ratio;
        worst = worst.max(rows.iter().map(|r| r.ratio / first).fold(0.0, f64::max));
    }
    ensure(worst <= 1.0, format!("closed form = nullity for n <= 3, q <= 8; max ratio / ratio(q=1) = {worst}"))
}

fn backward_uniqueness() -> Outcome {
    for n in 1..=2 {
        for q in 1..=8 {
            let b = backward_unique(q, n).map_err(|e| e.to_string())?;
            if b.nullity != 0 {
                return Err(format!("n = {n}, q = {q}: nullity {}", b.nullity));
            }
            let free = CaloricSystem::build(n, q, false).nullity() as u64;
            if free != dim_hq(n, q as f64) {
                return Err(format!("n = {n}, q = {q}: unconstrained nullity {free}"));
            }
        }
    }
    Ok("constrained nullity 0 and unconstrained nullity = dim H^q for n <= 2, q <= 8".into())
}

fn geometry() -> Outcome {
    let mut worst_sigma: f64 = 0.0;
    for n in 1..=3 {
        for r in [0.5, 1.0, 2.0] {
            let p = Paraboloid::centred(n, r).map_err(|e| e.to_string())?;
            let mc = volume_mc(&p, 1_000_000, 17 + n as u64);
            worst_sigma = worst_sigma.max(mc.sigmas(p.volume()));
        }
    }
    let mut ratio_err: f64 = 0.0;
    let mut inside = true;
    for (n, expect) in [(1, 1.0 / 3.0), (2, 1.0 / 6.0), (3, 0.1)] {
        let v = volume_ratio_bounds(n, 1.0).map_err(|e| e.to_string())?;
        ratio_err = ratio_err.max((v.ratio - expect).abs());
        inside &= v.within();
    }
    let one = FnField::new(1, |_: &[f64], _| 1.0);
    let x = FnField::new(1, |y: &[f64], _| y[0]);
    let basis: [&dyn SpaceTimeField; 2] = [&one, &x];
    let mut gram_err: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        let g = gram(&basis, &Paraboloid::centred(1, r).map_err(|e| e.to_string())?, QuadSpec::default())
            .map_err(|e| e.to_string())?;
        let d0 = 2.0 * r.powi(3) / 3.0;
        let d1 = r.powi(5) / 15.0;
        gram_err = gram_err
            .max((g.matrix[(0, 0)] - d0).abs() / d0)
            .max((g.matrix[(1, 1)] - d1).abs() / d1)
            .max(g.matrix[(0, 1)].abs() / d0.max(d1));
    }
    ensure(
        worst_sigma <= 3.0 && ratio_err <= 1e-12 && inside && gram_err <= 1e-8,
        format!(
            "MC worst {worst_sigma:.2} sigma; ratio error {ratio_err:.1e}, within bounds {inside}; Gram relative error {gram_err:.1e}"
        ),
    )
}

fn caloric_basis() -> Vec<MultiPoly> {
    ["1", "x0", "x0^2"]
        .iter()
        .map(|s| caloric_extend(&MultiPoly::parse(s, Some(1)).unwrap()).unwrap().polynomial().clone())
        .collect()
}

fn weighted_trace_and_iteration() -> Outcome {
    let polys = caloric_basis();
    let fields: Vec<_> = polys.iter().map(|p| FnField::new(1, move |x: &[f64], t| p.eval(x, t))).collect();
    let basis: Vec<&dyn SpaceTimeField> = fields.iter().map(|f| f as &dyn SpaceTimeField).collect();
    let region = Paraboloid::centred(1, 1.0).map_err(|e| e.to_string())?;
    let k = basis.len() as f64;
    let mut ratios = Vec::new();
    for eps in [1.0, 0.5, 0.25, 0.1] {
        let r = lemma31_check(&basis, &region, eps, QuadSpec::default()).map_err(|e| e.to_string())?;
        ratios.push(r.ratio);
    }
    let c_obs = ratios.iter().copied().fold(0.0, f64::max);
    let log = trace_det_iteration(&basis, &[0.0], 0.0, 1.0, 2.0, 2.0, 12, QuadSpec::default())
        .map_err(|e| e.to_string())?;
    ensure(
        ratios.iter().all(|r| r.is_finite() && *r <= k) && log.within_bound(0.5),
        format!(
            "weighted trace ratios {:?} (observed C {c_obs:.3e} <= k = {k}); det exponent {:.4} <= {} + 0.5",
            ratios.iter().map(|r| format!("{r:.3e}")).collect::<Vec<_>>(),
            log.fitted_exponent,
            log.bound
        ),
    )
}

fn fd_engine_checks() -> Outcome {
    let sine = |x: &[f64]| x[0].sin();
    let study = richardson_study(&sine, 1, 4.0, &[0.04, 0.02, 0.01], 0.5).map_err(|e| e.to_string())?;
    let mass = kernel_mass(1).map_err(|e| e.to_string())?;
    let (c1, c2) = kernel_bound_constants(1);
    let mut violations = 0;
    for n in [1, 2] {
        violations += check_gaussian_bound(n, 10_000, 23 + n as u64).violations;
    }
    let mut ly_err: f64 = 0.0;
    for (x, t) in [(vec![0.0], 1.0), (vec![0.8], 0.5), (vec![-1.2], 2.0), (vec![0.3, -0.4], 1.0)] {
        let r = li_yau_kernel(&x, t).map_err(|e| e.to_string())?;
        ly_err = ly_err.max((r.finite_difference - r.exact).abs());
    }
    let mut slopes = Vec::new();
    let mut symbolic = true;
    for (u0, k) in [("x0^4", 3), ("x0^2", 2)] {
        let u = caloric_extend(&MultiPoly::parse(u0, Some(1)).unwrap()).unwrap();
        let rep = high_dt_vanishing(&u, k, &[0.3], -0.5, &[1.0, 2.0, 4.0, 8.0]).map_err(|e| e.to_string())?;
        symbolic &= rep.symbolic_zero;
        slopes.push(rep.fitted_slope);
    }
    // `None` means every window estimate is exactly zero
    let decays = slopes.iter().all(|s| s.is_none_or(|v| v < 0.0));
    ensure(
        (study.slope - 2.0).abs() <= 0.3
            && (mass.total - 1.0).abs() <= 1e-6
            && violations == 0
            && ly_err <= 1e-3
            && symbolic
            && decays,
        format!(
            "Richardson slope {:.3}; mass {:.9}; c1 = {c1:.10}, c2 = {c2}, {violations} violations; Li-Yau FD error {ly_err:.1e}; d_t^k zero {symbolic}, window slopes {slopes:?}",
            study.slope, mass.total
        ),
    )
}

fn cli_binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_ancient"))
}

fn strip_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with("# timestamp")).collect::<Vec<_>>().join("\n")
}

fn cli_reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str, args: &[&str]| -> Result<(i32, String), String> {
        let out = dir.path().join(name);
        let status = Command::new(cli_binary())
            .args(args)
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        let text = std::fs::read_to_string(&out).unwrap_or_default();
        Ok((status.code().unwrap_or(-1), text))
    };
    let geom = ["geom", "--seed", "7", "--samples", "20000"];
    let (c1, a) = run("a.csv", &geom)?;
    let (c2, b) = run("b.csv", &geom)?;
    let identical = c1 == 0 && c2 == 0 && !a.is_empty() && strip_timestamp(&a) == strip_timestamp(&b);
    let (pass_code, _) = run("dim.csv", &["dim", "--n", "2", "--qmax", "6"])?;
    let (fail_code, _) = run("cm.csv", &["check-cm", "--function", "gaussian"])?;
    let usage = Command::new(cli_binary()).arg("no-such-command").output().map_err(|e| e.to_string())?;
    let usage_code = usage.status.code().unwrap_or(-1);
    ensure(
        identical && pass_code == 0 && fail_code == 1 && usage_code == 2,
        format!(
            "byte-identical geom output {identical}; exit codes pass {pass_code}, failing check {fail_code}, usage {usage_code}"
        ),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, Option<u64>);
    let criteria: [Criterion; 11] = [
        ("1 representation identity", representation_identity, Some(5)),
        ("2 complete monotonicity", complete_monotonicity, Some(5)),
        ("3 Laplace round trip", laplace_round_trip, Some(30)),
        ("4 addendum identity", addendum_identity, None),
        ("5 caloric algebra", caloric_algebra, Some(10)),
        ("6 dimension count", dimension, Some(20)),
        ("7 backward uniqueness", backward_uniqueness, None),
        ("8 geometry", geometry, Some(60)),
        ("9 weighted trace and trace/det iteration", weighted_trace_and_iteration, None),
        ("10 finite differences", fd_engine_checks, Some(120)),
        ("11 CLI reproducibility", cli_reproducibility, None),
    ];
    let mut failures = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = within_budget(outcome, elapsed, budget.map(Duration::from_secs));
        match outcome {
            Ok(d) => println!("PASS  criterion {name}: {d} [{elapsed:.2?}]"),
            Err(d) => {
                failures += 1;
                println!("FAIL  criterion {name}: {d} [{elapsed:.2?}]");
            }
        }
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
