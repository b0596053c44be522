use gvlp::covering::{admissible_radius, build_covering, family_ball_stats, overlap_count, Scaling};
use gvlp::functions::TestFunction;
use gvlp::quadrature::{gauss_hermite_rule, PolarRule};
use gvlp::sampling::{grid_points, halton_ball};
use gvlp::scalar::{dist, log_grid};
use gvlp::semigroup::{ou_apply, ou_split, Mode, OuTime};

fn bump(dim: usize) -> impl Fn(&[f64]) -> f64 + Clone {
    move |y: &[f64]| {
        let c = [0.4, -0.3];
        (-(0..dim).map(|i| (y[i] - c[i]).powi(2)).sum::<f64>()).exp()
    }
}

/// Largest `local / M_HL(f chi_{B(x, 2 r_h)})(x)` over sampled `(x, s)`.
fn domination_constant(dim: usize, angular: usize, radial: usize, n_radii: usize) -> f64 {
    let f = bump(dim);
    let polar = PolarRule::new(dim, angular, radial).unwrap();
    let mut c = 0.0f64;
    for x in grid_points(dim, 2.5, 5) {
        let r_h = admissible_radius(&x);
        let radii = log_grid(1e-3 * r_h, 2.0 * r_h, n_radii);
        let g = |y: &[f64]| if dist(y, &x) <= 2.0 * r_h { f(y) } else { 0.0 };
        let hl = gvlp::semigroup::hl_maximal(g, &x, &radii, &polar).unwrap();
        for s in [2e-3, 0.02, 0.2, 0.6] {
            let split = ou_split(&f, &OuTime::from_s(s).unwrap(), &x, &polar).unwrap();
            c = c.max(split.local / hl);
        }
    }
    c
}

#[test]
fn local_part_is_dominated_by_hardy_littlewood() {
    for dim in [1, 2] {
        let a = domination_constant(dim, 48, 12, 24);
        let b = domination_constant(dim, 96, 24, 48);
        assert!(a.is_finite() && a > 0.0);
        assert!((b / a - 1.0).abs() <= 0.2, "d = {dim}: C = {a} vs {b}");
    }
}

#[test]
fn split_parts_add_up_to_the_semigroup() {
    let rule = gauss_hermite_rule::<f64>(60).unwrap();
    for dim in [1, 2] {
        let f = bump(dim);
        let tf = TestFunction::new("bump", dim, f.clone());
        let polar = PolarRule::new(dim, 64, 16).unwrap();
        for x in grid_points(dim, 2.0, 3) {
            for t in [0.05, 0.5, 2.0] {
                let ou = OuTime::from_t(t).unwrap();
                let split = ou_split(&f, &ou, &x, &polar).unwrap();
                let direct = ou_apply(&tf, &ou, &x, Mode::Quadrature(&rule)).unwrap();
                assert!((split.total() - direct).abs() <= 1e-8 * direct.max(1e-3), "x = {x:?}, t = {t}: {} vs {direct}", split.total());
            }
        }
    }
}

#[test]
fn overlap_and_hull_constants_do_not_grow() {
    let stats = |k: usize| {
        let fam = build_covering::<f64>(2, k).unwrap();
        let n = overlap_count(&fam, &halton_ball(2, fam.built_radius(), 10_000, 5), Scaling::Tilde).unwrap();
        (n, family_ball_stats(&fam, 64, 5).unwrap().hull_constant)
    };
    let (n9, h9) = stats(9);
    let (n25, h25) = stats(25);
    assert_eq!(n9, n25);
    assert!(h25 <= h9 * (1.0 + 1e-9), "hull constant {h9} vs {h25}");
}
