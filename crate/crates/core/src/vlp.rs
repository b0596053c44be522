//! Variable-exponent Lebesgue spaces over the Gaussian and the Lebesgue
//! measure: modulars, Luxemburg norms and the inequalities built on them.
//!
//! Every integral runs over a [`MeasureGrid`], a finite list of nodes whose
//! weights already include the density of the measure. The `p = inf` part
//! of the modular is not implemented since every exponent here has
//! `p_plus < inf`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::Ball;
use crate::error::{invalid, Error, Result};
use crate::exponents::{conjugate, ExponentFunction};
use crate::functions::TestFunction;
use crate::hermite::MultiIndex;
use crate::quadrature::{composite_legendre, for_each_tensor_node, gauss_hermite_rule, PolarRule, QuadratureRule, RuleKind};
use crate::scalar::{lin_grid, norm, norm_sq, Real};

/// Hoelder constant asserted by [`holder_check`] and [`duality_pairing`].
pub const HOLDER_K: f64 = 4.0;
/// Default bisection tolerance of [`luxemburg_norm`].
pub const DEFAULT_TOL: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 60;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Gaussian,
    Lebesgue,
}

impl std::fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MeasureKind::Gaussian => "gaussian",
            MeasureKind::Lebesgue => "lebesgue",
        })
    }
}

/// Nodes with weights that integrate against the measure directly.
#[derive(Debug, Clone)]
pub struct MeasureGrid<T> {
    kind: MeasureKind,
    dim: usize,
    points: Vec<Vec<T>>,
    weights: Vec<T>,
    truncation_radius: T,
}

impl<T: Real> MeasureGrid<T> {
    pub fn from_parts(kind: MeasureKind, points: Vec<Vec<T>>, weights: Vec<T>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(invalid("points and weights differ in length"));
        }
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(invalid("grid points of mixed dimension"));
        }
        let truncation_radius = points.iter().map(|p| norm(p)).fold(T::zero(), T::max);
        Ok(MeasureGrid { kind, dim, points, weights, truncation_radius })
    }

    /// Tensor Gauss-Hermite grid for `gamma_d`.
    pub fn gaussian_from_rule(rule: &QuadratureRule<T>, dim: usize) -> Result<Self> {
        if rule.kind() != RuleKind::GaussHermite {
            return Err(invalid("Gaussian grids need a Gauss-Hermite rule"));
        }
        let scale = T::PI().powf(-T::from_usize_lossy(dim) / T::lit(2.0));
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for_each_tensor_node(rule, dim, |x, w| {
            points.push(x.to_vec());
            weights.push(w * scale);
        });
        Self::from_parts(MeasureKind::Gaussian, points, weights)
    }

    pub fn gaussian(dim: usize, nodes: usize) -> Result<Self> {
        Self::gaussian_from_rule(&gauss_hermite_rule(nodes)?, dim)
    }

    /// Tensor composite Gauss-Legendre grid on `[-h, h]^d`.
    pub fn lebesgue_box(dim: usize, half_width: T, panels: usize, per_panel: usize) -> Result<Self> {
        let breaks = lin_grid(-half_width, half_width, panels.max(1) + 1);
        let rule = composite_legendre(&breaks, per_panel)?;
        Self::tensor(MeasureKind::Lebesgue, &rule, dim, |_| T::one())
    }

    /// Tensor grid of a 1-d interval rule, with the given density.
    pub fn tensor<D: Fn(&[T]) -> T>(kind: MeasureKind, rule: &QuadratureRule<T>, dim: usize, density: D) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for_each_tensor_node(rule, dim, |x, w| {
            points.push(x.to_vec());
            weights.push(w * density(x));
        });
        Self::from_parts(kind, points, weights)
    }

    /// Gaussian measure on a 1-d composite Legendre rule (for integrands
    /// with jumps at the breaks).
    pub fn gaussian_on_breaks(breaks: &[T], per_panel: usize) -> Result<Self> {
        let rule = composite_legendre(breaks, per_panel)?;
        Self::tensor(MeasureKind::Gaussian, &rule, 1, |x| (-norm_sq(x)).exp() / T::PI().sqrt())
    }

    /// Lebesgue measure on the ball `B`, by polar quadrature.
    pub fn lebesgue_ball(ball: &Ball<T>, polar: &PolarRule<T>, panels: usize) -> Result<Self> {
        if polar.dim() != ball.dim() {
            return Err(Error::DimensionMismatch { expected: polar.dim(), got: ball.dim() });
        }
        let breaks = lin_grid(T::zero(), ball.radius, panels.max(1) + 1);
        let (points, weights) = polar.shell_nodes(&ball.center, &breaks);
        Self::from_parts(MeasureKind::Lebesgue, points, weights)
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn truncation_radius(&self) -> T {
        self.truncation_radius
    }

    pub fn integrate<F: Fn(&[T]) -> T>(&self, f: F) -> T {
        self.points.iter().zip(&self.weights).map(|(x, &w)| w * f(x)).sum()
    }

    /// Values of `f` at the nodes, rejecting non-finite ones.
    pub fn sample<F: Fn(&[T]) -> T>(&self, f: F) -> Result<Vec<T>> {
        self.points
            .iter()
            .map(|x| {
                let v = f(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite { node: x.iter().map(|c| c.as_f64()).collect(), value: v.as_f64() })
                }
            })
            .collect()
    }
}

/// `rho(f)` with its measure and integration extent.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModularValue<T> {
    pub value: T,
    pub measure: MeasureKind,
    pub truncation_radius: T,
}

/// `|f| / lambda` raised to `p`, node by node, on precomputed samples.
#[derive(Debug, Clone)]
pub struct SampledModular<T> {
    abs_values: Vec<T>,
    exponents: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> SampledModular<T> {
    pub fn new<F: Fn(&[T]) -> T>(f: F, p: &ExponentFunction<T>, grid: &MeasureGrid<T>) -> Result<Self> {
        if p.dim() != grid.dim() {
            return Err(Error::DimensionMismatch { expected: p.dim(), got: grid.dim() });
        }
        let abs_values = grid.sample(f)?.into_iter().map(T::abs).collect();
        let exponents = grid.points().iter().map(|x| p.eval(x)).collect();
        Ok(SampledModular { abs_values, exponents, weights: grid.weights().to_vec() })
    }

    pub fn from_values(abs_values: Vec<T>, exponents: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if abs_values.len() != exponents.len() || abs_values.len() != weights.len() {
            return Err(invalid("sample arrays differ in length"));
        }
        Ok(SampledModular { abs_values: abs_values.into_iter().map(T::abs).collect(), exponents, weights })
    }

    /// `rho(f / lambda)`.
    pub fn at(&self, lambda: T) -> T {
        let ll = lambda.ln();
        self.abs_values
            .iter()
            .zip(&self.exponents)
            .zip(&self.weights)
            .map(|((&v, &p), &w)| if v == T::zero() { T::zero() } else { w * (p * (v.ln() - ll)).exp() })
            .sum()
    }

    pub fn sup_abs(&self) -> T {
        self.abs_values.iter().copied().fold(T::zero(), T::max)
    }

    /// Modular on the sub-grid where `mask` holds.
    pub fn restricted(&self, mask: &[bool]) -> Self {
        let pick = |v: &[T]| v.iter().zip(mask).filter(|(_, &m)| m).map(|(&a, _)| a).collect::<Vec<T>>();
        SampledModular { abs_values: pick(&self.abs_values), exponents: pick(&self.exponents), weights: pick(&self.weights) }
    }
}

pub fn modular<T: Real, F: Fn(&[T]) -> T>(f: F, p: &ExponentFunction<T>, grid: &MeasureGrid<T>) -> Result<ModularValue<T>> {
    let value = SampledModular::new(f, p, grid)?.at(T::one());
    if !value.is_finite() {
        return Err(Error::NonFinite { node: vec![], value: value.as_f64() });
    }
    Ok(ModularValue { value, measure: grid.kind(), truncation_radius: grid.truncation_radius() })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NormResult<T> {
    pub norm: T,
    pub lambda_bracket: (T, T),
    /// `rho(f / norm)`; at most 1 by construction.
    pub modular_at_norm: T,
    pub iterations: usize,
}

impl<T: Real> NormResult<T> {
    pub fn bracket_width(&self) -> T {
        self.lambda_bracket.1 - self.lambda_bracket.0
    }
}

/// `inf { lambda > 0 : rho(f / lambda) <= 1 }` by bracketing and bisection.
///
/// The bracket starts at `max(sup|f| 1e-6, eps)`, doubling up to 60 times
/// until `rho <= 1`. Bisection stops once `hi - lo <= tol hi`; the norm is
/// the upper end, so `rho(f / norm) <= 1` always holds.
pub fn luxemburg_from_samples<T: Real>(m: &SampledModular<T>, tol: T) -> Result<NormResult<T>> {
    if !(tol > T::zero() && tol <= T::lit(1e-2)) {
        return Err(invalid(format!("tolerance must lie in (0, 1e-2], got {tol}")));
    }
    let sup = m.sup_abs();
    if sup == T::zero() || m.at(T::one()) == T::zero() {
        return Ok(NormResult { norm: T::zero(), lambda_bracket: (T::zero(), T::zero()), modular_at_norm: T::zero(), iterations: 0 });
    }
    let tol = tol.max(T::lit(4.0) * T::eps());
    let mut hi = (sup * T::lit(1e-6)).max(T::min_positive_value());
    let mut lo = T::zero();
    let mut iterations = 0;
    let mut rho_hi = m.at(hi);
    if rho_hi <= T::one() {
        // Tiny support: shrink instead.
        while rho_hi <= T::one() && iterations < MAX_DOUBLINGS {
            lo = hi / T::lit(2.0);
            let r = m.at(lo);
            iterations += 1;
            if r > T::one() {
                break;
            }
            hi = lo;
            rho_hi = r;
            lo = T::zero();
        }
    } else {
        loop {
            if iterations >= MAX_DOUBLINGS {
                return Err(Error::BracketFailure { lambda: hi.as_f64(), modular: rho_hi.as_f64() });
            }
            lo = hi;
            hi = hi * T::lit(2.0);
            rho_hi = m.at(hi);
            iterations += 1;
            if rho_hi <= T::one() {
                break;
            }
        }
    }
    let mut steps = 0;
    while hi - lo > tol * hi && steps < MAX_BISECTIONS {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = m.at(mid);
        if r <= T::one() {
            hi = mid;
            rho_hi = r;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    Ok(NormResult { norm: hi, lambda_bracket: (lo, hi), modular_at_norm: rho_hi, iterations: iterations + steps })
}

pub fn luxemburg_norm<T: Real, F: Fn(&[T]) -> T>(f: F, p: &ExponentFunction<T>, grid: &MeasureGrid<T>, tol: T) -> Result<NormResult<T>> {
    luxemburg_from_samples(&SampledModular::new(f, p, grid)?, tol)
}

/// One CSV row of a norm computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormRow {
    pub function_id: String,
    pub exponent_id: String,
    pub measure: MeasureKind,
    pub norm: f64,
    pub modular_at_norm: f64,
    pub bracket_width: f64,
}

impl NormRow {
    pub fn new<T: Real>(function_id: &str, exponent_id: &str, measure: MeasureKind, r: &NormResult<T>) -> Self {
        NormRow {
            function_id: function_id.to_string(),
            exponent_id: exponent_id.to_string(),
            measure,
            norm: r.norm.as_f64(),
            modular_at_norm: r.modular_at_norm.as_f64(),
            bracket_width: r.bracket_width().as_f64(),
        }
    }
}

pub fn write_norm_csv<W: Write>(rows: &[NormRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush().map_err(|e| Error::Io { path: "<csv writer>".into(), source: e })?;
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EquivalenceReport<T> {
    pub gaussian_norm: T,
    pub lebesgue_norm: T,
    /// `||f e^{-|x|^2/p(x)}||_{p(.)} / ||f||_{p(.), gamma}`.
    pub ratio: T,
    pub lower: T,
    pub upper: T,
    pub within: bool,
}

/// Compares the Gaussian norm of `f` with the Lebesgue norm of
/// `f e^{-|x|^2/p(x)}`; the ratio must lie in `[1, pi^{d/2}]`.
pub fn norm_equivalence_report<T: Real, F>(f: F, p: &ExponentFunction<T>, gauss: &MeasureGrid<T>, leb: &MeasureGrid<T>, tol: T) -> Result<EquivalenceReport<T>>
where
    F: Fn(&[T]) -> T,
{
    if gauss.kind() != MeasureKind::Gaussian || leb.kind() != MeasureKind::Lebesgue {
        return Err(invalid("norm equivalence needs a Gaussian and a Lebesgue grid"));
    }
    let g = luxemburg_norm(&f, p, gauss, tol)?;
    if g.norm == T::zero() {
        return Err(invalid("zero Gaussian norm in the denominator"));
    }
    let l = luxemburg_norm(|x| f(x) * (-norm_sq(x) / p.eval(x)).exp(), p, leb, tol)?;
    let ratio = l.norm / g.norm;
    let slack = T::lit(1e-6).max(T::lit(4.0) * tol);
    let lower = T::one() - slack;
    let upper = T::PI().powf(T::from_usize_lossy(p.dim()) / T::lit(2.0)) + slack;
    Ok(EquivalenceReport { gaussian_norm: g.norm, lebesgue_norm: l.norm, ratio, lower, upper, within: ratio >= lower && ratio <= upper })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HolderResult<T> {
    pub lhs: T,
    pub rhs: T,
    pub ratio: T,
    pub passed: bool,
}

/// `int |f g| d mu <= K ||f||_{p(.)} ||g||_{p'(.)}` with `K = 4`.
pub fn holder_check<T: Real, F, G>(f: F, g: G, p: &ExponentFunction<T>, grid: &MeasureGrid<T>, tol: T) -> Result<HolderResult<T>>
where
    F: Fn(&[T]) -> T,
    G: Fn(&[T]) -> T,
{
    let pc = conjugate(p)?;
    let lhs = grid.integrate(|x| (f(x) * g(x)).abs());
    let rhs = luxemburg_norm(&f, p, grid, tol)?.norm * luxemburg_norm(&g, &pc, grid, tol)?.norm;
    let ratio = if rhs > T::zero() { lhs / rhs } else { T::zero() };
    Ok(HolderResult { lhs, rhs, ratio, passed: lhs <= T::lit(HOLDER_K) * rhs * (T::one() + tol) })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClassGResult<T> {
    pub sum: T,
    pub product: T,
    pub ratio: T,
    pub balls: usize,
}

/// `sum_B ||f chi_B||_{p(.)} ||g chi_B||_{p'(.)}` against
/// `||f||_{p(.)} ||g||_{p'(.)}`, all over Lebesgue measure. Ball norms use
/// polar grids; the global norms use `whole`.
pub fn class_g_check<T: Real, F, G>(
    f: F,
    g: G,
    p: &ExponentFunction<T>,
    balls: &[Ball<T>],
    whole: &MeasureGrid<T>,
    polar: &PolarRule<T>,
    tol: T,
) -> Result<ClassGResult<T>>
where
    F: Fn(&[T]) -> T + Sync,
    G: Fn(&[T]) -> T + Sync,
{
    let pc = conjugate(p)?;
    let terms: Result<Vec<T>> = balls
        .par_iter()
        .map(|b| {
            let grid = MeasureGrid::lebesgue_ball(b, polar, 4)?;
            Ok(luxemburg_norm(&f, p, &grid, tol)?.norm * luxemburg_norm(&g, &pc, &grid, tol)?.norm)
        })
        .collect();
    let sum: T = terms?.into_iter().sum();
    let product = luxemburg_norm(&f, p, whole, tol)?.norm * luxemburg_norm(&g, &pc, whole, tol)?.norm;
    let ratio = if product > T::zero() { sum / product } else { T::zero() };
    Ok(ClassGResult { sum, product, ratio, balls: balls.len() })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Lemma326Report<T> {
    /// `int_E F^{rho(y)}`.
    pub lhs1: T,
    /// `int_E F^{rho_inf}`.
    pub lhs2: T,
    /// `int_E R^{rho_minus}` with `R = (e + |y|)^{-N}`.
    pub tail: T,
    /// `lhs2 + tail`, the first right side with `C = 1`.
    pub rhs1: T,
    /// `lhs1 + tail`, the second right side with `C = 1`.
    pub rhs2: T,
    /// Smallest `C` with `lhs1 <= C lhs2 + tail`.
    pub c1: T,
    /// Smallest `C` with `lhs2 <= C lhs1 + tail`.
    pub c2: T,
}

/// The two truncation inequalities on the grid `e` (a Lebesgue grid of
/// the set `E`). `F` must take values in `[0, 1]` on the grid.
pub fn lemma326_report<T: Real, R, F>(rho: R, rho_minus: T, rho_inf: T, big_f: F, e: &MeasureGrid<T>, n: T) -> Result<Lemma326Report<T>>
where
    R: Fn(&[T]) -> T,
    F: Fn(&[T]) -> T,
{
    if e.kind() != MeasureKind::Lebesgue {
        return Err(invalid("the truncation inequalities are stated for Lebesgue measure"));
    }
    if !(rho_inf > T::zero() && rho_inf.is_finite()) {
        return Err(invalid(format!("need 0 < rho_inf < inf, got {rho_inf}")));
    }
    if !(rho_minus > T::zero() && n > T::from_usize_lossy(e.dim()) / rho_minus) {
        return Err(invalid(format!("need N > d / rho_minus, got N = {n}")));
    }
    let vals = e.sample(&big_f)?;
    if let Some((x, v)) = e.points().iter().zip(&vals).find(|(_, &v)| !(v >= T::zero() && v <= T::one())) {
        return Err(invalid(format!("F = {v} outside [0, 1] at {x:?}")));
    }
    let pow = |v: T, q: T| if v == T::zero() { T::zero() } else { v.powf(q) };
    let mut lhs1 = T::zero();
    let mut lhs2 = T::zero();
    let mut tail = T::zero();
    for ((x, &w), &v) in e.points().iter().zip(e.weights()).zip(&vals) {
        lhs1 = lhs1 + w * pow(v, rho(x));
        lhs2 = lhs2 + w * pow(v, rho_inf);
        tail = tail + w * (T::E() + norm(x)).powf(-n * rho_minus);
    }
    let c = |num: T, den: T| {
        let excess = (num - tail).max(T::zero());
        if excess == T::zero() {
            T::zero()
        } else {
            excess / den
        }
    };
    Ok(Lemma326Report { lhs1, lhs2, tail, rhs1: lhs2 + tail, rhs2: lhs1 + tail, c1: c(lhs1, lhs2), c2: c(lhs2, lhs1) })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DualityResult<T> {
    /// `sup_g int |f| |g| d gamma` over the normalized test set.
    pub pairing: T,
    pub norm: T,
    /// `K ||f||`.
    pub upper: T,
    pub best_index: usize,
    pub within: bool,
}

/// The test functions used by [`duality_pairing`] by default: Hermite
/// polynomials through degree 6, Gaussian bumps at 5 centers and
/// indicators of 4 balls.
pub fn default_duality_set<T: Real>(dim: usize) -> Vec<TestFunction<T>> {
    let mut out: Vec<TestFunction<T>> = MultiIndex::up_to(dim, 6).into_iter().map(TestFunction::hermite).collect();
    let axis = |v: f64| -> Vec<T> {
        let mut c = vec![T::zero(); dim];
        c[0] = T::lit(v);
        c
    };
    for c in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let center = axis(c);
        out.push(TestFunction::new(format!("bump({c})"), dim, move |x| {
            let d2 = x.iter().zip(&center).fold(T::zero(), |a, (&p, &q)| a + (p - q) * (p - q));
            (-d2).exp()
        }));
    }
    for (c, r) in [(0.0, 0.5), (0.0, 1.5), (1.0, 1.0), (-1.5, 0.75)] {
        let center = axis(c);
        let r = T::lit(r);
        out.push(TestFunction::new(format!("ind({c};{r})"), dim, move |x| if crate::scalar::dist(x, &center) <= r { T::one() } else { T::zero() }));
    }
    out
}

/// `sup_g int |f| |g| d gamma` over the test set, each `g` normalized to
/// `||g||_{p'(.), gamma} = 1`. The supremum is at most `K ||f||`.
pub fn duality_pairing<T: Real, F>(f: F, p: &ExponentFunction<T>, test_set: &[TestFunction<T>], grid: &MeasureGrid<T>, tol: T) -> Result<DualityResult<T>>
where
    F: Fn(&[T]) -> T + Sync,
{
    if test_set.is_empty() {
        return Err(invalid("duality pairing needs a nonempty test set"));
    }
    let pc = conjugate(p)?;
    let fv = grid.sample(&f)?;
    let norm = luxemburg_norm(&f, p, grid, tol)?.norm;
    let pairs: Result<Vec<T>> = test_set
        .par_iter()
        .map(|g| {
            let gn = luxemburg_norm(|x| g.eval(x), &pc, grid, tol)?.norm;
            if gn == T::zero() {
                return Ok(T::zero());
            }
            Ok(grid.points().iter().zip(grid.weights()).zip(&fv).map(|((x, &w), &v)| w * (v * g.eval(x)).abs()).sum::<T>() / gn)
        })
        .collect();
    let pairs = pairs?;
    let (best_index, pairing) = pairs.iter().enumerate().fold((0, T::zero()), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    let upper = T::lit(HOLDER_K) * norm;
    Ok(DualityResult { pairing, norm, upper, best_index, within: pairing <= upper * (T::one() + tol) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::ExponentSpec;
    use crate::scalar::erf;
    use std::f64::consts::PI;

    fn g1() -> MeasureGrid<f64> {
        MeasureGrid::gaussian(1, 80).unwrap()
    }

    #[test]
    fn modular_examples() {
        let p2 = ExponentFunction::constant(1, 2.0).unwrap();
        let p3 = ExponentFunction::constant(1, 3.0).unwrap();
        assert!((modular(|_| 1.5, &p3, &g1()).unwrap().value - 1.5f64.powi(3)).abs() < 1e-13);
        assert!((modular(|x| x[0], &p2, &g1()).unwrap().value - 0.5).abs() < 1e-13);

        let a = 0.8;
        let step = ExponentSpec::Step { p0: 2.0, p1: 4.0, r: a }.build::<f64>(1).unwrap();
        let mut breaks = vec![-12.0, -6.0, -3.0, -1.5];
        breaks.extend(lin_grid(-a, a, 9));
        breaks.extend([1.5, 3.0, 6.0, 12.0]);
        let grid = MeasureGrid::gaussian_on_breaks(&breaks, 24).unwrap();
        let ga = erf(a);
        let v = modular(|_| 2.0, &step, &grid).unwrap().value;
        assert!((v - (4.0 * ga + 16.0 * (1.0 - ga))).abs() < 1e-12, "{v}");
    }

    #[test]
    fn norm_examples() {
        let p2 = ExponentFunction::constant(1, 2.0).unwrap();
        let p3 = ExponentFunction::constant(1, 3.0).unwrap();
        let n = luxemburg_norm(|_| 1.5, &p3, &g1(), 1e-10).unwrap();
        assert!((n.norm - 1.5).abs() < 1e-9);
        let n = luxemburg_norm(|x| x[0], &p2, &g1(), 1e-10).unwrap();
        assert!((n.norm - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(n.modular_at_norm <= 1.0);
        assert_eq!(luxemburg_norm(|_| 0.0, &p2, &g1(), 1e-8).unwrap().norm, 0.0);

        let a = 0.8;
        let step = ExponentSpec::Step { p0: 2.0, p1: 4.0, r: a }.build::<f64>(1).unwrap();
        let mut breaks = vec![-12.0, -6.0, -3.0, -1.5];
        breaks.extend(lin_grid(-a, a, 9));
        breaks.extend([1.5, 3.0, 6.0, 12.0]);
        let grid = MeasureGrid::gaussian_on_breaks(&breaks, 24).unwrap();
        let ga = erf(a);
        // 4 ga / L^2 + 16 (1 - ga) / L^4 = 1 is a quadratic in L^2.
        let (qa, qb, qc) = (1.0, -4.0 * ga, -16.0 * (1.0 - ga));
        let l2 = (-qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
        let n = luxemburg_norm(|_| 2.0, &step, &grid, 1e-11).unwrap();
        assert!((n.norm - l2.sqrt()).abs() < 1e-9, "{} vs {}", n.norm, l2.sqrt());
    }

    #[test]
    fn equivalence_examples() {
        let p2 = ExponentFunction::constant(1, 2.0).unwrap();
        let leb = MeasureGrid::lebesgue_box(1, 10.0, 40, 16).unwrap();
        let r = norm_equivalence_report(|_| 1.0, &p2, &g1(), &leb, 1e-11).unwrap();
        assert!((r.ratio - PI.powf(0.25)).abs() < 1e-9 && r.within);
        let r = norm_equivalence_report(|x| x[0], &p2, &g1(), &leb, 1e-11).unwrap();
        assert!((r.ratio - PI.powf(0.25)).abs() < 1e-9);
        let p = ExponentSpec::RationalDecay { p0: 3.0, c: 1.0 }.build::<f64>(2).unwrap();
        let leb2 = MeasureGrid::lebesgue_box(2, 8.0, 32, 12).unwrap();
        let g2 = MeasureGrid::gaussian(2, 60).unwrap();
        let r = norm_equivalence_report(|x| 1.0 + x[0] * x[1], &p, &g2, &leb2, 1e-9).unwrap();
        assert!(r.within && r.ratio <= PI, "{r:?}");
    }

    #[test]
    fn holder_examples() {
        let p2 = ExponentFunction::constant(1, 2.0).unwrap();
        let h1 = TestFunction::<f64>::hermite(MultiIndex::new(vec![1]));
        let h2 = TestFunction::<f64>::hermite(MultiIndex::new(vec![2]));
        let r = holder_check(|x| h1.eval(x), |x| h1.eval(x), &p2, &g1(), 1e-10).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-8 && r.passed);
        let r = holder_check(|_| 1.0, |_| 1.0, &p2, &g1(), 1e-10).unwrap();
        assert!(r.lhs <= r.rhs * (1.0 + 1e-9));
        let r = holder_check(|x| h1.eval(x), |x| h2.eval(x), &p2, &g1(), 1e-10).unwrap();
        assert!(r.lhs <= 1.0 && r.passed);
    }

    #[test]
    fn class_g_two_disjoint_balls() {
        let p2 = ExponentFunction::constant(1, 2.0).unwrap();
        let polar = PolarRule::new(1, 0, 16).unwrap();
        let whole = MeasureGrid::lebesgue_box(1, 10.0, 40, 16).unwrap();
        let f = |x: &[f64]| (-x[0] * x[0]).exp();
        let g = |x: &[f64]| (-(x[0] - 0.5) * (x[0] - 0.5)).exp();
        let balls = [Ball::new(vec![-1.0], 0.9).unwrap(), Ball::new(vec![1.0], 0.9).unwrap()];
        let r = class_g_check(f, g, &p2, &balls, &whole, &polar, 1e-10).unwrap();
        assert!(r.sum <= r.product && r.ratio < 1.0);
        let one = [Ball::new(vec![0.0], 1.0).unwrap()];
        let r = class_g_check(f, g, &p2, &one, &whole, &polar, 1e-10).unwrap();
        assert!(r.ratio <= 1.0);
    }

    #[test]
    fn lemma326_examples() {
        let e = MeasureGrid::lebesgue_box(1, 4.0, 16, 16).unwrap();
        let rho = |x: &[f64]| 2.0 + 1.0 / (1.0 + norm(x));
        let r = lemma326_report(rho, 2.0, 2.0, |_| 1.0, &e, 2.0).unwrap();
        assert!((r.lhs1 - 8.0).abs() < 1e-12 && (r.lhs2 - 8.0).abs() < 1e-12);
        let r = lemma326_report(rho, 2.0, 2.0, |_| 0.0, &e, 2.0).unwrap();
        assert_eq!((r.lhs1, r.c1), (0.0, 0.0));
        let r = lemma326_report(rho, 2.0, 2.0, |x: &[f64]| (-norm(x)).exp(), &e, 2.0).unwrap();
        assert!(r.c1.is_finite() && r.c2.is_finite() && r.lhs1 <= r.rhs1 * (1.0 + r.c1));
        assert!(lemma326_report(rho, 2.0, 2.0, |_| 1.5, &e, 2.0).is_err());
    }

    #[test]
    fn duality_examples() {
        let p2 = ExponentFunction::constant(1, 2.0).unwrap();
        let set = default_duality_set::<f64>(1);
        let h1 = TestFunction::<f64>::hermite(MultiIndex::new(vec![1]));
        let r = duality_pairing(|x| h1.eval(x), &p2, &set, &g1(), 1e-10).unwrap();
        assert!(r.pairing >= 0.79 && r.pairing <= 1.0 + 1e-9, "{r:?}");
        let r = duality_pairing(|x| h1.eval(x) * h1.eval(x).signum(), &p2, &set, &g1(), 1e-10).unwrap();
        assert!(r.pairing <= r.norm * (1.0 + 1e-9));
        let zero = duality_pairing(|_| 0.0, &p2, &set, &g1(), 1e-10).unwrap();
        assert_eq!(zero.pairing, 0.0);
        let f = |x: &[f64]| 2f64.sqrt() * x[0] + (2.0 * x[0] * x[0] - 1.0) / 2f64.sqrt();
        let r = duality_pairing(f, &p2, &set, &g1(), 1e-10).unwrap();
        assert!(r.pairing <= 2f64.sqrt() * (1.0 + 1e-9) && r.within, "{r:?}");
        assert!(duality_pairing(f, &p2, &[], &g1(), 1e-10).is_err());
    }
}
