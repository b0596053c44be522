use approx::assert_relative_eq;
use gvlp::covering::{build_covering, check_invariants, coverage_check};
use gvlp::exponents::{check_exp_equivalence, check_log_holder_local, check_p_gamma_inf, conjugate, ExponentFunction, ExponentSpec};
use gvlp::functions::TestFunction;
use gvlp::hermite::{expand, hermite_normalized_eval, HermiteExpansion, MultiIndex};
use gvlp::quadrature::{gauss_hermite_rule, integrate_gaussian};
use gvlp::sampling::{halton_ball, offset_pairs, random_box};
use gvlp::semigroup::{mehler_kernel, ou_apply, Mode, OuTime};
use gvlp::subordination::{bessel_apply, bessel_multiplier, poisson_apply, poisson_expansion, poisson_multiplier, SubMode, SubordinationRule};
use gvlp::vlp::{luxemburg_norm, MeasureGrid, SampledModular};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = ExponentSpec> {
    (1.2f64..4.0, -0.15f64..1.5).prop_map(|(p0, c)| ExponentSpec::RationalDecay { p0, c })
}

fn point(dim: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, dim)
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

/// `E |x|^m` under `gamma_1`: `(m-1)!! / 2^{m/2}` for even `m`,
/// `((m-1)/2)! / sqrt(pi)` for odd `m`.
fn abs_moment(m: u32) -> f64 {
    if m.is_multiple_of(2) {
        moment(m)
    } else {
        (1..=(m - 1) / 2).map(f64::from).product::<f64>() / std::f64::consts::PI.sqrt()
    }
}

/// `E x^m` under `gamma_1`.
fn moment(m: u32) -> f64 {
    if m % 2 == 1 {
        0.0
    } else {
        (1..=m / 2).map(|i| f64::from(2 * i - 1) / 2.0).product()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_is_an_involution(spec in rational(), x in point(2, 20.0)) {
        let p = spec.build::<f64>(2).unwrap();
        let back = conjugate(&conjugate(&p).unwrap()).unwrap();
        prop_assert!((back.eval(&x) - p.eval(&x)).abs() <= 8.0 * f64::EPSILON * p.eval(&x));
        let same = match (back.p_inf(), p.p_inf()) {
            (Some(a), Some(b)) => (a - b).abs() <= 8.0 * f64::EPSILON * b,
            (a, b) => a == b,
        };
        prop_assert!(same);
    }

    #[test]
    fn exp_equivalence_within_c1(spec in rational(), pts in prop::collection::vec(point(2, 30.0), 1..40)) {
        let p = spec.build::<f64>(2).unwrap();
        let r = check_exp_equivalence(&p, &pts, None).unwrap();
        prop_assert!(r.within_bounds, "{r:?}");
        prop_assert!(r.min * r.c1 >= 1.0 - 1e-9 && r.max <= r.c1 * (1.0 + 1e-9));
    }

    #[test]
    fn regularity_constants_grow_with_samples(spec in rational(), seed in 0u64..1000, extra in 1usize..50) {
        let p = spec.build::<f64>(2).unwrap();
        let base = random_box(2, 5.0, 20, seed);
        let mut more = base.clone();
        more.extend(random_box(2, 50.0, extra, seed + 1));
        let nonzero = |v: Vec<Vec<f64>>| v.into_iter().filter(|x| x.iter().any(|c| *c != 0.0)).collect::<Vec<_>>();
        let (base, more) = (nonzero(base), nonzero(more));
        let a = check_p_gamma_inf(&p, &base, p.p_inf(), 1e9).unwrap().constant;
        let b = check_p_gamma_inf(&p, &more, p.p_inf(), 1e9).unwrap().constant;
        prop_assert!(b >= a);
        let lengths = [1e-3, 0.1];
        let la = check_log_holder_local(&p, &offset_pairs(&base, &lengths), 1e9).unwrap().constant;
        let lb = check_log_holder_local(&p, &offset_pairs(&more, &lengths), 1e9).unwrap().constant;
        prop_assert!(lb >= la);
    }

    #[test]
    fn gauss_hermite_exact_on_monomials(m in 0u32..60) {
        let rule = gauss_hermite_rule::<f64>(40).unwrap();
        let v = integrate_gaussian(|x| x[0].powi(m as i32), 1, &rule).unwrap();
        prop_assert!((v - moment(m)).abs() <= 1e-12 * abs_moment(m), "m = {m}: {v} vs {}", moment(m));
    }

    #[test]
    fn parseval_for_polynomials(c in coeffs(6)) {
        let rule = gauss_hermite_rule::<f64>(40).unwrap();
        let f = |x: &[f64]| c.iter().enumerate().map(|(k, a)| a * x[0].powi(k as i32)).sum::<f64>();
        let e = expand(f, 1, 5, &rule).unwrap();
        let direct = integrate_gaussian(|x| f(x).powi(2), 1, &rule).unwrap();
        prop_assert!((direct - e.l2_norm_sq()).abs() <= 1e-10 * direct.max(1.0));
    }

    #[test]
    fn eigenrelation(n1 in 0u32..7, n2 in 0u32..7, t in 0.05f64..4.0, x in point(2, 3.0)) {
        let rule = gauss_hermite_rule::<f64>(60).unwrap();
        let nu = MultiIndex::new(vec![n1, n2]);
        let f = TestFunction::hermite(nu.clone());
        let ou = OuTime::from_t(t).unwrap();
        let expect = (-t * f64::from(n1 + n2)).exp() * hermite_normalized_eval(&nu, &x);
        let s = ou_apply(&f, &ou, &x, Mode::Spectral).unwrap();
        let q = ou_apply(&f, &ou, &x, Mode::Quadrature(&rule)).unwrap();
        prop_assert!((s - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        prop_assert!((q - expect).abs() <= 1e-6 * expect.abs().max(1.0));
    }

    #[test]
    fn kernel_and_ou_are_positive(s in 1e-3f64..0.999, x in point(2, 4.0), y in point(2, 4.0), c in point(2, 2.0)) {
        let ou = OuTime::from_s(s).unwrap();
        prop_assert!(mehler_kernel(&ou, &x, &y).unwrap() >= 0.0);
        let rule = gauss_hermite_rule::<f64>(30).unwrap();
        let bump = move |z: &[f64]| (-(z[0] - c[0]).powi(2) - (z[1] - c[1]).powi(2)).exp();
        let f = TestFunction::new("bump", 2, bump);
        prop_assert!(ou_apply(&f, &ou, &x, Mode::Quadrature(&rule)).unwrap() >= 0.0);
    }

    #[test]
    fn poisson_semigroup_and_contraction(t1 in 0.01f64..3.0, t2 in 0.01f64..3.0, beta in 0.1f64..5.0, k in 0usize..200) {
        let m = poisson_multiplier(t1, k) * poisson_multiplier(t2, k);
        prop_assert!((m - poisson_multiplier(t1 + t2, k)).abs() <= 4.0 * f64::EPSILON);
        prop_assert!(poisson_multiplier(t1, k) <= 1.0 && bessel_multiplier(beta, k) <= 1.0);
        let e = HermiteExpansion::from_coeffs(1, (0..9).map(|j| (MultiIndex::new(vec![j]), 1.0 / (1.0 + j as f64)))).unwrap();
        let twice = poisson_expansion(&poisson_expansion(&e, t1), t2);
        prop_assert!(twice.max_abs_diff(&poisson_expansion(&e, t1 + t2)) <= 1e-15);
    }

    #[test]
    fn subordinated_operators_are_positive(q in coeffs(5), t in 0.1f64..2.0, beta in 0.5f64..4.0, x in -3.0f64..3.0) {
        // f = q^2 >= 0 with an exact degree-8 expansion.
        let rule = gauss_hermite_rule::<f64>(40).unwrap();
        let g = move |z: &[f64]| q.iter().enumerate().map(|(k, a)| a * z[0].powi(k as i32)).sum::<f64>().powi(2);
        let e = expand(&g, 1, 8, &rule).unwrap();
        let f = TestFunction::new("square", 1, g).with_expansion(e);
        let prule = SubordinationRule::<f64>::poisson(64).unwrap();
        let brule = SubordinationRule::<f64>::bessel(64, beta).unwrap();
        let slack = 1e-12 * f.expansion().unwrap().l2_norm_sq().sqrt();
        for v in [
            poisson_apply(&f, t, &[x], SubMode::Spectral).unwrap(),
            poisson_apply(&f, t, &[x], SubMode::Quadrature(&prule)).unwrap(),
            bessel_apply(&f, beta, &[x], SubMode::Spectral).unwrap(),
            bessel_apply(&f, beta, &[x], SubMode::Quadrature(&brule)).unwrap(),
        ] {
            prop_assert!(v >= -slack, "{v}");
        }
    }

    #[test]
    fn modular_and_norm_laws(spec in rational(), c in coeffs(5), scale in -4.0f64..4.0, l1 in 0.05f64..5.0, l2 in 0.05f64..5.0) {
        prop_assume!(scale.abs() > 1e-3 && c.iter().any(|v| v.abs() > 1e-3) && (l1 - l2).abs() > 1e-6);
        let grid = MeasureGrid::gaussian(1, 40).unwrap();
        let p = spec.build::<f64>(1).unwrap();
        let f = |x: &[f64]| c.iter().enumerate().map(|(k, a)| a * x[0].powi(k as i32)).sum::<f64>();
        let m = SampledModular::new(f, &p, &grid).unwrap();
        let (lo, hi) = (l1.min(l2), l1.max(l2));
        prop_assert!(m.at(lo) > m.at(hi));
        let tol = 1e-9;
        let n = luxemburg_norm(f, &p, &grid, tol).unwrap().norm;
        let ns = luxemburg_norm(|x| scale * f(x), &p, &grid, tol).unwrap().norm;
        prop_assert!((ns - scale.abs() * n).abs() <= 2.0 * tol * ns);
        prop_assert!(m.at(n) <= 1.0 + tol);
        prop_assert!(m.at(n * (1.0 - 10.0 * tol)) > 1.0);
    }

    #[test]
    fn constant_exponent_is_classical(p0 in 1.1f64..5.0, c in coeffs(4)) {
        prop_assume!(c.iter().any(|v| v.abs() > 1e-3));
        let rule = gauss_hermite_rule::<f64>(80).unwrap();
        let grid = MeasureGrid::gaussian_from_rule(&rule, 1).unwrap();
        let f = |x: &[f64]| c.iter().enumerate().map(|(k, a)| a * x[0].powi(k as i32)).sum::<f64>();
        let p = ExponentFunction::constant(1, p0).unwrap();
        let classical = integrate_gaussian(|x| f(x).abs().powf(p0), 1, &rule).unwrap().powf(1.0 / p0);
        let n = luxemburg_norm(f, &p, &grid, 1e-10).unwrap().norm;
        prop_assert!((n - classical).abs() <= 2e-10 * classical);
    }

    #[test]
    fn covering_invariants(dim in 1usize..=2, k_max in 1usize..30, seed in 0u64..1000) {
        let fam = build_covering::<f64>(dim, k_max).unwrap();
        let inv = check_invariants(&fam);
        prop_assert!(inv.max_center_error <= 1e-12 && inv.max_diameter_error <= 1e-12 && inv.disjoint);
        let samples = halton_ball(dim, fam.built_radius(), 500, seed);
        prop_assert_eq!(coverage_check(&fam, &samples).unwrap(), 1.0);
    }
}

#[test]
fn gaussian_integrals_stable_under_refinement() {
    let cfg = gvlp::harness::ExperimentConfig::default();
    for d in [1, 2] {
        let cfg = gvlp::harness::ExperimentConfig { dim: d, ..cfg.clone() };
        let suite = gvlp::harness::build_suite::<f64>(&cfg).unwrap();
        let (a, b) = (gauss_hermite_rule::<f64>(40).unwrap(), gauss_hermite_rule::<f64>(80).unwrap());
        for f in &suite {
            let g = |x: &[f64]| f.eval(x).powi(2) + (x[0] - 0.3).cos();
            let (u, v) = (integrate_gaussian(g, d, &a).unwrap(), integrate_gaussian(g, d, &b).unwrap());
            assert!((u - v).abs() < 1e-8, "{}: {u} vs {v}", f.id());
        }
    }
}

#[test]
fn f32_instantiation() {
    let rule = gauss_hermite_rule::<f32>(20).unwrap();
    let v = integrate_gaussian(|x| x[0] * x[0], 1, &rule).unwrap();
    assert_relative_eq!(v, 0.5f32, epsilon = 1e-5);
    let p = ExponentSpec::RationalDecay { p0: 3.0, c: 1.0 }.build::<f32>(1).unwrap();
    let grid = gvlp::vlp::MeasureGrid::<f32>::gaussian(1, 20).unwrap();
    let n = luxemburg_norm(|_| 1.0f32, &p, &grid, 1e-5).unwrap().norm;
    assert_relative_eq!(n, 1.0f32, epsilon = 1e-4);
    let e = gvlp::HermiteExpansionF32::basis(MultiIndex::new(vec![2]));
    let t = gvlp::semigroup::ou_expansion(&e, 0.5f32);
    assert_relative_eq!(t.get(&MultiIndex::new(vec![2])), (-1.0f32).exp(), epsilon = 1e-6);
}
