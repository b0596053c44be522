//! Desk-scale checks behind the `check-exponent`, `covering` and
//! `verify-all` commands. Each `criterion_*` function returns verdicts
//! tagged with the acceptance criterion it tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::covering::{admissible_radius, build_covering, check_invariants, coverage_check, overlap_count, Scaling, GEOM_TOL};
use crate::error::Result;
use crate::exponents::{check_exp_equivalence, check_log_holder_infinity, check_log_holder_local, check_p_gamma_inf, ExponentFunction, ExponentSpec};
use crate::functions::{FunctionSpec, TestFunction};
use crate::harness::{
    build_suite, hypothesis_samples, run_boundedness_experiment, run_continuity_experiment, strong_continuity_curve, ExperimentConfig, ExperimentReport,
    Verdict,
};
use crate::hermite::{hermite_normalized_eval, HermiteExpansion, MultiIndex};
use crate::quadrature::gauss_hermite_rule;
use crate::sampling::halton_ball;
use crate::scalar::lin_grid;
use crate::semigroup::{kernel_bound_report, kernel_s_grid, ln_mehler_kernel, ou_apply, ou_expansion, Branch, Mode, OuTime};
use crate::subordination::{bessel_multiplier, bessel_multiplier_quadrature, poisson_multiplier, poisson_multiplier_quadrature, SubordinationRule};
use crate::vlp::{luxemburg_from_samples, norm_equivalence_report, MeasureGrid, SampledModular};

fn seeded(cfg: &ExperimentConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn fail_on(criterion: u8, name: &str, e: impl std::fmt::Display) -> Verdict {
    Verdict::new(Some(criterion), name, false).detail(e.to_string())
}

fn random_expansion(dim: usize, max_order: usize, rng: &mut ChaCha8Rng) -> Result<HermiteExpansion<f64>> {
    HermiteExpansion::from_coeffs(dim, MultiIndex::up_to(dim, max_order).into_iter().map(|nu| (nu, rng.gen_range(-1.0..1.0))))
}

/// Gram matrix of the Hermite basis up to degree 8.
pub fn criterion_1(cfg: &ExperimentConfig) -> Vec<Verdict> {
    [(1usize, 1e-10), (2, 1e-8)]
        .into_iter()
        .map(|(d, tol)| {
            let start = std::time::Instant::now();
            let grid = match MeasureGrid::<f64>::gaussian(d, cfg.hermite_nodes) {
                Ok(g) => g,
                Err(e) => return fail_on(1, "Hermite Gram matrix", e),
            };
            let basis = MultiIndex::up_to(d, 8);
            let vals: Vec<Vec<f64>> = basis.iter().map(|nu| grid.points().iter().map(|x| hermite_normalized_eval(nu, x)).collect()).collect();
            let worst = (0..basis.len())
                .into_par_iter()
                .map(|i| {
                    (0..basis.len())
                        .map(|j| {
                            let g: f64 = grid.weights().iter().zip(&vals[i]).zip(&vals[j]).map(|((w, a), b)| w * a * b).sum();
                            (g - if i == j { 1.0 } else { 0.0 }).abs()
                        })
                        .fold(0.0, f64::max)
                })
                .reduce(|| 0.0, f64::max);
            let fast = start.elapsed().as_secs_f64() < 5.0;
            Verdict::new(Some(1), format!("Hermite Gram matrix is the identity (d = {d}, degree <= 8)"), worst <= tol && fast)
                .measured(worst, tol)
                .detail(format!("{} basis elements{}", basis.len(), if fast { "" } else { ", slower than 5 s" }))
        })
        .collect()
}

/// Ten polynomials used for the spectral/quadrature comparison.
pub fn comparison_polynomials() -> Vec<FunctionSpec> {
    let mono = |terms: &[(u32, f64)]| FunctionSpec::Polynomial { terms: terms.iter().map(|&(k, c)| (vec![k], c)).collect() };
    vec![
        mono(&[(1, 1.0)]),
        mono(&[(2, 1.0)]),
        mono(&[(3, 1.0), (0, -0.5)]),
        mono(&[(4, 1.0)]),
        mono(&[(5, 0.5), (1, 1.0)]),
        mono(&[(6, 1.0), (2, -3.0)]),
        mono(&[(7, 0.25)]),
        mono(&[(8, 1.0)]),
        mono(&[(8, 0.1), (5, -0.3), (2, 1.0), (0, 2.0)]),
        mono(&[(4, -1.0), (3, 2.0), (1, 1.0), (0, 1.0)]),
    ]
}

/// Spectral against Mehler-quadrature evaluation of `T_t`.
pub fn criterion_2(cfg: &ExperimentConfig) -> Vec<Verdict> {
    let name = "spectral and quadrature T_t agree";
    let run = || -> Result<f64> {
        let rule = gauss_hermite_rule::<f64>(cfg.hermite_nodes)?;
        let xs = lin_grid(-2.0, 2.0, 9);
        let mut worst = 0.0f64;
        for spec in comparison_polynomials() {
            let f = spec.build::<f64>(1, 8, &rule)?;
            let scale = f.expansion().map_or(1.0, |e| e.l2_norm_sq().sqrt());
            for t in [0.05, 0.3, 1.0, 3.0] {
                let ou = OuTime::from_t(t)?;
                for &x in &xs {
                    let s = ou_apply(&f, &ou, &[x], Mode::Spectral)?;
                    let q = ou_apply(&f, &ou, &[x], Mode::Quadrature(&rule))?;
                    worst = worst.max((q - s).abs() / s.abs().max(scale));
                }
            }
        }
        Ok(worst)
    };
    vec![match run() {
        Ok(w) => Verdict::new(Some(2), name, w < 1e-6).measured(w, 1e-6).detail("10 polynomials, 4 times, 9 points"),
        Err(e) => fail_on(2, name, e),
    }]
}

/// Semigroup law on coefficients and conservativity in both modes.
pub fn criterion_3(cfg: &ExperimentConfig) -> Vec<Verdict> {
    let mut rng = seeded(cfg, 3);
    let mut out = Vec::new();
    let mut law = || -> Result<f64> {
        let mut worst = 0.0f64;
        for d in [1, 2] {
            let e = random_expansion(d, 8, &mut rng)?;
            for (t1, t2) in [(0.05, 0.3), (0.3, 1.0), (1.0, 3.0), (1e-4, 2.0)] {
                let a = ou_expansion(&ou_expansion(&e, t1), t2);
                let b = ou_expansion(&e, t1 + t2);
                worst = worst.max(a.max_abs_diff(&b));
            }
        }
        Ok(worst)
    };
    out.push(match law() {
        Ok(w) => Verdict::new(Some(3), "T_s T_t = T_{s+t} coefficientwise", w <= 1e-12).measured(w, 1e-12),
        Err(e) => fail_on(3, "T_s T_t = T_{s+t} coefficientwise", e),
    });
    let cons = || -> Result<f64> {
        let rule = gauss_hermite_rule::<f64>(cfg.hermite_nodes)?;
        let mut worst = 0.0f64;
        for d in [1, 2] {
            let one = TestFunction::constant(d, 1.0);
            for t in [0.05, 0.3, 1.0, 3.0] {
                let ou = OuTime::from_t(t)?;
                for x in crate::sampling::grid_points(d, 2.0, 5) {
                    for mode in [Mode::Spectral, Mode::Quadrature(&rule)] {
                        worst = worst.max((ou_apply(&one, &ou, &x, mode)? - 1.0).abs());
                    }
                }
            }
        }
        Ok(worst)
    };
    out.push(match cons() {
        Ok(w) => Verdict::new(Some(3), "T_t 1 = 1 in both modes", w <= 1e-10).measured(w, 1e-10),
        Err(e) => fail_on(3, "T_t 1 = 1 in both modes", e),
    });
    out
}

/// `M(s, x, y) e^{|y|^2} = M(s, y, x) e^{|x|^2}` on random triples.
pub fn criterion_4(cfg: &ExperimentConfig) -> Vec<Verdict> {
    let mut rng = seeded(cfg, 4);
    let name = "Mehler kernel symmetry against the Gaussian";
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let d = 1 + i % 2;
        let s = rng.gen_range(0.1..0.9);
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let ou = match OuTime::from_s(s) {
            Ok(o) => o,
            Err(e) => return vec![fail_on(4, name, e)],
        };
        let (a, b) = match (ln_mehler_kernel(&ou, &x, &y), ln_mehler_kernel(&ou, &y, &x)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return vec![fail_on(4, name, e)],
        };
        let lhs = a + crate::scalar::norm_sq(&y);
        let rhs = b + crate::scalar::norm_sq(&x);
        worst = worst.max((lhs - rhs).exp_m1().abs());
    }
    vec![Verdict::new(Some(4), name, worst <= 1e-12).measured(worst, 1e-12).detail("1000 triples, d = 1 and 2")]
}

/// Subordinated multipliers against their closed forms.
pub fn criterion_5(cfg: &ExperimentConfig) -> Vec<Verdict> {
    let mut out = Vec::new();
    match SubordinationRule::<f64>::poisson(cfg.laguerre_nodes) {
        Ok(rule) => {
            let mut worst = 0.0f64;
            for t in lin_grid(0.1, 2.0, 39) {
                for k in 0..=9 {
                    let exact = poisson_multiplier(t, k);
                    worst = worst.max((poisson_multiplier_quadrature(&rule, t, k) - exact).abs() / exact);
                }
            }
            out.push(Verdict::new(Some(5), "Poisson subordination matches e^{-t sqrt k}", worst < 1e-6).measured(worst, 1e-6));
        }
        Err(e) => out.push(fail_on(5, "Poisson subordination", e)),
    }
    let mut worst = 0.0f64;
    for beta in lin_grid(0.5, 4.0, 36) {
        match SubordinationRule::<f64>::bessel(cfg.laguerre_nodes, beta) {
            Ok(rule) => {
                for k in 0..=16 {
                    let exact = bessel_multiplier(beta, k);
                    worst = worst.max((bessel_multiplier_quadrature(&rule, beta, k) - exact).abs() / exact);
                }
            }
            Err(e) => return vec![fail_on(5, "Bessel subordination", e)],
        }
    }
    out.push(Verdict::new(Some(5), "Bessel subordination matches (1 + sqrt k)^{-beta}", worst < 1e-6).measured(worst, 1e-6));
    out
}

/// `E|x|^m` under the one-dimensional Gaussian measure.
fn gaussian_abs_moment(m: f64) -> f64 {
    crate::scalar::gamma((m + 1.0) / 2.0) / std::f64::consts::PI.sqrt()
}

/// Constant-exponent norms of monomials, modular monotonicity and the
/// unit-ball property.
pub fn criterion_6(cfg: &ExperimentConfig) -> Vec<Verdict> {
    let mut out = Vec::new();
    let grid = match MeasureGrid::<f64>::gaussian(1, cfg.hermite_nodes) {
        Ok(g) => g,
        Err(e) => return vec![fail_on(6, "Luxemburg norms", e)],
    };
    let cases = [(1, 2.0), (2, 2.0), (3, 2.0), (4, 2.0), (2, 3.0), (4, 3.0), (1, 4.0), (2, 4.0), (1, 6.0), (2, 5.0)];
    let mut worst = 0.0f64;
    for (j, q) in cases {
        let p = ExponentFunction::constant(1, q).expect("valid exponent");
        let exact = gaussian_abs_moment(j as f64 * q).powf(1.0 / q);
        match crate::vlp::luxemburg_norm(|x| x[0].powi(j), &p, &grid, 1e-12) {
            Ok(n) => worst = worst.max((n.norm - exact).abs() / exact),
            Err(e) => return vec![fail_on(6, "Luxemburg norms", e)],
        }
    }
    out.push(Verdict::new(Some(6), "constant-exponent norms match Gaussian moments", worst <= 1e-8).measured(worst, 1e-8).detail("x^j in L^q, 10 cases"));

    let small = MeasureGrid::<f64>::gaussian(1, 40).expect("rule");
    let mut rng = seeded(cfg, 6);
    let (mut mono_bad, mut ball_bad, mut skipped) = (0usize, 0usize, 0usize);
    for _ in 0..1000 {
        let p0 = rng.gen_range(1.5..4.0);
        let c = rng.gen_range(-0.4..1.0);
        let p = ExponentSpec::RationalDecay { p0, c }.build::<f64>(1).expect("valid exponent");
        let e = random_expansion(1, 4, &mut rng).expect("expansion");
        let m = SampledModular::new(|x| e.eval(x), &p, &small).expect("samples");
        let (l1, l2) = (rng.gen_range(0.05..5.0), rng.gen_range(0.05..5.0));
        let (lo, hi) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
        if m.at(hi) > m.at(lo) * (1.0 + 1e-14) {
            mono_bad += 1;
        }
        let a: f64 = rng.gen_range(0.5..2.0);
        let n = luxemburg_from_samples(&m, 1e-12).expect("norm").norm;
        if (a - 1.0).abs() < 1e-6 || n == 0.0 {
            skipped += 1;
            continue;
        }
        // rho(f / lambda) <= 1 exactly when ||f|| <= lambda.
        let lambda = n / a;
        if (m.at(lambda) <= 1.0) != (n <= lambda) {
            ball_bad += 1;
        }
    }
    out.push(Verdict::new(Some(6), "modular is monotone in lambda", mono_bad == 0).measured(mono_bad as f64, 0.0).detail("1000 random cases"));
    out.push(
        Verdict::new(Some(6), "unit-ball property", ball_bad == 0)
            .measured(ball_bad as f64, 0.0)
            .detail(format!("1000 random cases, {skipped} skipped at the boundary")),
    );
    out
}

/// Gaussian against weighted Lebesgue norm on the suite.
pub fn criterion_7(cfg: &ExperimentConfig) -> Vec<Verdict> {
    [1usize, 2]
        .into_iter()
        .map(|d| {
            let name = format!("norm equivalence ratio in [1, pi^(d/2)] (d = {d})");
            let run = || -> Result<(f64, f64, usize)> {
                let sub = ExperimentConfig { dim: d, suite: None, ..cfg.clone() };
                let p = cfg.exponent.build::<f64>(d)?;
                let suite = build_suite::<f64>(&sub)?;
                let gauss = MeasureGrid::gaussian(d, if d == 1 { cfg.hermite_nodes } else { cfg.hermite_nodes.min(60) })?;
                let leb = if d == 1 { MeasureGrid::lebesgue_box(1, 10.0, 40, 16)? } else { MeasureGrid::lebesgue_box(2, 8.0, 32, 12)? };
                let reports: Vec<Result<_>> = suite.par_iter().map(|f| norm_equivalence_report(|x| f.eval(x), &p, &gauss, &leb, 1e-10)).collect();
                let (mut lo, mut hi, mut bad) = (f64::INFINITY, 0.0f64, 0usize);
                for r in reports {
                    let r = r?;
                    lo = lo.min(r.ratio);
                    hi = hi.max(r.ratio);
                    bad += usize::from(!r.within);
                }
                Ok((lo, hi, bad))
            };
            match run() {
                Ok((lo, hi, bad)) => Verdict::new(Some(7), name, bad == 0)
                    .measured(hi, std::f64::consts::PI.powf(d as f64 / 2.0) + 1e-6)
                    .detail(format!("ratios in [{lo:.6}, {hi:.6}]")),
                Err(e) => fail_on(7, &name, e),
            }
        })
        .collect()
}

/// Random pairs `(x, y)` in `[-3, 3]^d` with `y` outside the admissible
/// ball of `x`.
pub fn global_pairs(dim: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
        if crate::scalar::dist(&x, &y) > admissible_radius(&x) * (1.0 + 1e-9) {
            out.push((x, y));
        }
    }
    out
}

/// Measured constant of `sup_s M <= C bound` per branch.
pub fn criterion_8(cfg: &ExperimentConfig) -> Vec<Verdict> {
    let mut rng = seeded(cfg, 8);
    let pairs = global_pairs(2, 100, &mut rng);
    let measure = |n: usize| -> Result<[f64; 2]> {
        let grid = kernel_s_grid::<f64>(n);
        let reports: Vec<Result<_>> = pairs.par_iter().map(|(x, y)| kernel_bound_report(x, y, &grid)).collect();
        let mut c = [0.0f64; 2];
        for r in reports {
            let r = r?;
            let i = usize::from(r.terms.branch == Branch::BPositive);
            c[i] = c[i].max(r.ratio);
        }
        Ok(c)
    };
    match (measure(200), measure(400)) {
        (Ok(a), Ok(b)) => ["b <= 0", "b > 0"]
            .iter()
            .enumerate()
            .map(|(i, label)| {
                let change = (b[i] / a[i] - 1.0).abs();
                let ok = a[i].is_finite() && a[i] > 0.0 && change <= 0.2;
                Verdict::new(Some(8), format!("kernel bound constant stable ({label})"), ok)
                    .measured(change, 0.2)
                    .detail(format!("C = {:.6}, refined {:.6}", a[i], b[i]))
            })
            .collect(),
        (Err(e), _) | (_, Err(e)) => vec![fail_on(8, "kernel bounds", e)],
    }
}

/// Formula invariants, coverage and overlap of the covering family.
pub fn criterion_9(cfg: &ExperimentConfig) -> Vec<Verdict> {
    covering_verdicts(2, cfg.k_max.max(16), cfg.seed)
}

pub fn covering_verdicts(dim: usize, k_max: usize, seed: u64) -> Vec<Verdict> {
    let run = || -> Result<Vec<Verdict>> {
        let fam = build_covering::<f64>(dim, k_max)?;
        let inv = check_invariants(&fam);
        let err = inv.max_center_error.max(inv.max_diameter_error);
        let mut out = vec![Verdict::new(Some(9), "covering formula invariants", err <= GEOM_TOL && inv.disjoint).measured(err, GEOM_TOL)];
        let samples = halton_ball(dim, fam.built_radius(), 10_000, seed);
        let cov = coverage_check(&fam, &samples)?;
        out.push(Verdict::new(Some(9), format!("tilde family covers the ball of radius sqrt({k_max})"), cov == 1.0).measured(cov, 1.0).detail("10000 samples"));
        let overlap = |k: usize| -> Result<usize> {
            let f = build_covering::<f64>(dim, k)?;
            overlap_count(&f, &halton_ball(dim, f.built_radius(), 10_000, seed), Scaling::Tilde)
        };
        let (a, b) = (overlap(9)?, overlap(25)?);
        out.push(Verdict::new(Some(9), "tilde overlap identical for k_max = 9 and 25", a == b).measured(b as f64, a as f64).detail(format!("N = {a} and {b}")));
        Ok(out)
    };
    run().unwrap_or_else(|e| vec![fail_on(9, "covering", e)])
}

/// Boundedness experiments for the configured exponent and for `p = 2`.
pub fn criterion_10(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = run_boundedness_experiment::<f64>(cfg)?;
    let p2 = ExperimentConfig { exponent: ExponentSpec::Constant { p0: 2.0 }, ..cfg.clone() };
    let r2 = run_boundedness_experiment::<f64>(&p2)?;
    report.verdicts.extend(r2.verdicts.into_iter().filter(|v| v.name.contains("contract")));
    Ok(report)
}

/// Exact continuity curve of `h_1` for `p = 2` and suite curves.
pub fn criterion_11(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = run_continuity_experiment::<f64>(cfg)?;
    let p2 = ExponentFunction::constant(1, 2.0)?;
    let grid = MeasureGrid::gaussian(1, cfg.hermite_nodes)?;
    let h1 = TestFunction::hermite(MultiIndex::new(vec![1]));
    let c = strong_continuity_curve(&h1, &p2, &cfg.continuity_t, &grid, 1e-13)?;
    let worst = c.t.iter().zip(&c.deviation).map(|(t, d)| (d + (-t).exp_m1()).abs()).fold(0.0, f64::max);
    report.verdicts.push(Verdict::new(Some(11), "||T_t h_1 - h_1||_2 = 1 - e^{-t}", worst <= 1e-8).measured(worst, 1e-8));
    Ok(report)
}

/// Runs criteria 1 to 11; the caller times the whole run for the last one.
pub fn verify_all(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let d1 = ExperimentConfig { dim: 1, ..cfg.clone() };
    let mut report = ExperimentReport::new("verify-all", &d1);
    for v in [
        criterion_1(&d1),
        criterion_2(&d1),
        criterion_3(&d1),
        criterion_4(&d1),
        criterion_5(&d1),
        criterion_6(&d1),
        criterion_7(&d1),
        criterion_8(&d1),
        criterion_9(&d1),
    ] {
        report.verdicts.extend(v);
    }
    for (n, r) in [(10u8, criterion_10(&d1)), (11, criterion_11(&d1))] {
        match r {
            Ok(r) => report.absorb(r),
            Err(e) => report.verdicts.push(fail_on(n, "experiment", e)),
        }
    }
    Ok(report)
}

/// Regularity checks of the configured exponent.
pub fn run_check_exponent(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut report = ExperimentReport::new("check-exponent", cfg);
    let p = cfg.exponent.build::<f64>(cfg.dim)?;
    let (shells, pairs) = hypothesis_samples::<f64>(cfg.dim, cfg.seed);
    let cap = cfg.hypothesis_cap;
    let reg = |r: Result<crate::exponents::RegularityReport<f64>>, name: &str| match r {
        Ok(r) => Verdict::new(None, name, r.passed).measured(r.constant, cap).detail(r.verdict()),
        Err(e) => Verdict::new(None, name, false).detail(e.to_string()),
    };
    report.verdicts.push(reg(check_log_holder_local(&p, &pairs, cap), "LH0"));
    report.verdicts.push(reg(check_log_holder_infinity(&p, &shells, p.p_inf(), cap), "LHinf"));
    report.verdicts.push(reg(check_p_gamma_inf(&p, &shells, p.p_inf(), cap), "PgammaInf"));
    report.verdicts.push(match check_exp_equivalence(&p, &shells, None) {
        Ok(r) => Verdict::new(None, "exp-equivalence bounds", r.within_bounds)
            .measured(r.max, r.c1)
            .detail(format!("range [{:.6}, {:.6}], C = {:.6}", r.min, r.max, r.c_gamma)),
        Err(e) => Verdict::new(None, "exp-equivalence bounds", false).detail(e.to_string()),
    });
    Ok(report)
}

/// Covering checks in the configured dimension (at most 2).
pub fn run_covering(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    if cfg.dim > 2 {
        return Err(crate::Error::Config("the covering construction is implemented for d <= 2".into()));
    }
    let mut report = ExperimentReport::new("covering", cfg);
    report.verdicts = covering_verdicts(cfg.dim, cfg.k_max, cfg.seed);
    Ok(report)
}
