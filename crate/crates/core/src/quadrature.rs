//! Gauss rules, tensor integration against the Gaussian measure, and polar
//! rules for integrals of kernels over balls and annuli.
//!
//! Gauss rules are built from the three-term recurrence of the orthogonal
//! family: the nodes are the eigenvalues of the symmetric Jacobi matrix
//! (found by Sturm-sequence bisection) and the weights come from the
//! Christoffel formula `w_i = mu_0 / sum_k p_k(x_i)^2` evaluated with the
//! orthonormal recurrence. Everything is computed in `f64` and cast to the
//! target scalar.

use crate::error::{invalid, Error, Result};
use crate::scalar::{gamma, Real};

pub const MAX_GAUSS_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleKind {
    /// Weight `e^{-x^2}` on the real line.
    GaussHermite,
    /// Weight `x^alpha e^{-x}` on `[0, inf)`.
    GaussLaguerre { alpha: f64 },
    /// Weight `(1-x)^alpha (1+x)^beta`, mapped to an interval.
    GaussJacobi { alpha: f64, beta: f64 },
    /// Unit weight on an interval (possibly composite).
    GaussLegendre,
    /// Composite trapezoid rule on an interval.
    Trapezoid,
}

/// One-dimensional quadrature rule. Nodes are strictly increasing and
/// weights are positive.
#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    kind: RuleKind,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Highest polynomial degree integrated exactly (Gauss rules only).
    pub fn exactness_degree(&self) -> Option<usize> {
        match self.kind {
            RuleKind::Trapezoid => None,
            _ => Some(2 * self.order() - 1),
        }
    }

    /// `sum_i w_i f(x_i)`.
    pub fn integrate<F: Fn(T) -> T>(&self, f: F) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }

    /// Affine image of a rule defined on `[-1, 1]` onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> QuadratureRule<T> {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        QuadratureRule {
            kind: self.kind,
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
        }
    }

    fn from_f64(kind: RuleKind, nodes: Vec<f64>, weights: Vec<f64>) -> Self {
        // Weights that underflow f64 carry no mass; drop them so every
        // stored weight stays positive.
        let (nodes, weights) = nodes.into_iter().zip(weights).filter(|&(_, w)| w > 0.0 && T::lit(w) > T::zero()).map(|(x, w)| (T::lit(x), T::lit(w))).unzip();
        QuadratureRule { kind, nodes, weights }
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_GAUSS_NODES {
        return Err(invalid(format!("rule order {n} outside 1..={MAX_GAUSS_NODES}")));
    }
    Ok(())
}

/// Gauss-Hermite rule for the weight `e^{-x^2}` (physicists' convention).
pub fn gauss_hermite_rule<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    check_order(n)?;
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|k| k as f64 / 2.0).collect();
    let (x, w) = golub_welsch(&diag, &off, std::f64::consts::PI.sqrt());
    // Symmetrize to remove bisection round-off.
    let (x, w) = symmetrize(x, w);
    Ok(QuadratureRule::from_f64(RuleKind::GaussHermite, x, w))
}

/// Generalized Gauss-Laguerre rule for the weight `x^alpha e^{-x}`.
pub fn gauss_laguerre_rule<T: Real>(n: usize, alpha: T) -> Result<QuadratureRule<T>> {
    check_order(n)?;
    let alpha = alpha.as_f64();
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(invalid(format!("Laguerre alpha must exceed -1, got {alpha}")));
    }
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|k| k as f64 * (k as f64 + alpha)).collect();
    let (x, w) = golub_welsch(&diag, &off, gamma(alpha + 1.0));
    Ok(QuadratureRule::from_f64(RuleKind::GaussLaguerre { alpha }, x, w))
}

/// Gauss-Jacobi rule on `[-1, 1]` for `(1-x)^alpha (1+x)^beta`.
pub fn gauss_jacobi_rule<T: Real>(n: usize, alpha: T, beta: T) -> Result<QuadratureRule<T>> {
    check_order(n)?;
    let (a, b) = (alpha.as_f64(), beta.as_f64());
    if !(a > -1.0 && b > -1.0) {
        return Err(invalid(format!("Jacobi parameters must exceed -1, got ({a}, {b})")));
    }
    let ab = a + b;
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let s = 2.0 * k as f64 + ab;
                (b * b - a * a) / (s * (s + 2.0))
            }
        })
        .collect();
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let kf = k as f64;
            let s = 2.0 * kf + ab;
            if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
            }
        })
        .collect();
    let mu0 = (ab + 1.0).exp2() * gamma(a + 1.0) * gamma(b + 1.0) / gamma(ab + 2.0);
    let (x, w) = golub_welsch(&diag, &off, mu0);
    Ok(QuadratureRule::from_f64(RuleKind::GaussJacobi { alpha: a, beta: b }, x, w))
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_rule<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    let r = gauss_jacobi_rule(n, T::zero(), T::zero())?;
    let (x, w) = symmetrize(r.nodes.iter().map(|v| v.as_f64()).collect(), r.weights.iter().map(|v| v.as_f64()).collect());
    Ok(QuadratureRule::from_f64(RuleKind::GaussLegendre, x, w))
}

/// Composite Gauss-Legendre rule with panels between consecutive `breaks`.
pub fn composite_legendre<T: Real>(breaks: &[T], per_panel: usize) -> Result<QuadratureRule<T>> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("composite breaks must be strictly increasing with >= 2 entries"));
    }
    let base = gauss_legendre_rule::<T>(per_panel)?;
    let mut nodes = Vec::with_capacity(per_panel * (breaks.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for w in breaks.windows(2) {
        let panel = base.mapped(w[0], w[1]);
        nodes.extend_from_slice(&panel.nodes);
        weights.extend_from_slice(&panel.weights);
    }
    Ok(QuadratureRule { kind: RuleKind::GaussLegendre, nodes, weights })
}

/// Composite trapezoid rule with `n >= 2` equally spaced nodes on `[a, b]`.
pub fn trapezoid_rule<T: Real>(a: T, b: T, n: usize) -> Result<QuadratureRule<T>> {
    if n < 2 || !(b > a) {
        return Err(invalid("trapezoid rule needs n >= 2 and b > a"));
    }
    let h = (b - a) / T::from_usize_lossy(n - 1);
    let nodes = (0..n).map(|i| a + h * T::from_usize_lossy(i)).collect();
    let weights = (0..n).map(|i| if i == 0 || i == n - 1 { h / T::lit(2.0) } else { h }).collect();
    Ok(QuadratureRule { kind: RuleKind::Trapezoid, nodes, weights })
}

fn symmetrize(x: Vec<f64>, w: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut xs = x.clone();
    let mut ws = w.clone();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let xm = 0.5 * (x[j] - x[i]);
        let wm = 0.5 * (w[i] + w[j]);
        xs[i] = -xm;
        xs[j] = xm;
        ws[i] = wm;
        ws[j] = wm;
    }
    if n % 2 == 1 {
        xs[n / 2] = 0.0;
    }
    (xs, ws)
}

/// Nodes and weights from the monic recurrence `p_{k+1} = (x - a_k) p_k - b_k p_{k-1}`.
/// `diag` holds `a_0..a_{n-1}`, `off` holds `b_1..b_{n-1}`.
fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let e: Vec<f64> = off.iter().map(|b| b.sqrt()).collect();
    let nodes = tridiagonal_eigenvalues(diag, &e);
    let weights = nodes.iter().map(|&x| christoffel_weight(x, diag, &e, mu0)).collect();
    debug_assert_eq!(nodes.len(), n);
    (nodes, weights)
}

/// Number of eigenvalues strictly below `x` (Sturm count).
fn sturm_count(diag: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 { f64::MIN_POSITIVE } else { q };
        q = diag[i] - x - e[i - 1] * e[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn tridiagonal_eigenvalues(diag: &[f64], e: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let pad = 1e-12 * (hi - lo).abs().max(1.0);
    lo -= pad;
    hi += pad;
    let mut out = Vec::with_capacity(n);
    let mut prev = lo;
    for k in 0..n {
        // eigenvalues come out ascending, so the previous one bounds below
        let (mut a, mut b) = (prev, hi);
        for _ in 0..400 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, e, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        let x = 0.5 * (a + b);
        out.push(x);
        prev = a;
    }
    out
}

fn christoffel_weight(x: f64, diag: &[f64], e: &[f64], mu0: f64) -> f64 {
    const BIG: f64 = 1e150;
    let mut log_scale = 0.0f64;
    let mut p_prev = 0.0f64;
    let mut p = 1.0f64;
    let mut sum = 1.0f64;
    for k in 0..diag.len() - 1 {
        let sb_prev = if k > 0 { e[k - 1] } else { 0.0 };
        let next = ((x - diag[k]) * p - sb_prev * p_prev) / e[k];
        p_prev = p;
        p = next;
        sum += p * p;
        if p.abs() > BIG || sum > BIG * BIG {
            let s = 1.0 / BIG;
            p *= s;
            p_prev *= s;
            sum *= s * s;
            log_scale += 2.0 * BIG.ln();
        }
    }
    (mu0.ln() - sum.ln() - log_scale).exp()
}

/// Visit every point of the `dim`-fold tensor product of `rule`.
pub fn for_each_tensor_node<T: Real, F: FnMut(&[T], T)>(rule: &QuadratureRule<T>, dim: usize, mut visit: F) {
    let n = rule.order();
    if dim == 0 || n == 0 {
        return;
    }
    let mut idx = vec![0usize; dim];
    let mut point: Vec<T> = vec![rule.nodes[0]; dim];
    loop {
        let mut w = T::one();
        for (k, &i) in idx.iter().enumerate() {
            point[k] = rule.nodes[i];
            w = w * rule.weights[i];
        }
        visit(&point, w);
        let mut axis = 0;
        loop {
            idx[axis] += 1;
            if idx[axis] < n {
                break;
            }
            idx[axis] = 0;
            axis += 1;
            if axis == dim {
                return;
            }
        }
    }
}

/// `int f d gamma_d` using the tensor Gauss-Hermite rule.
pub fn integrate_gaussian<T: Real, F>(f: F, dim: usize, rule: &QuadratureRule<T>) -> Result<T>
where
    F: Fn(&[T]) -> T,
{
    if rule.kind != RuleKind::GaussHermite {
        return Err(invalid("integrate_gaussian needs a Gauss-Hermite rule"));
    }
    if dim == 0 {
        return Err(invalid("dimension must be positive"));
    }
    let mut acc = T::zero();
    let mut bad: Option<Error> = None;
    for_each_tensor_node(rule, dim, |x, w| {
        if bad.is_some() {
            return;
        }
        let v = f(x);
        if !v.is_finite() {
            bad = Some(Error::NonFinite { node: x.iter().map(|c| c.as_f64()).collect(), value: v.as_f64() });
            return;
        }
        acc = acc + w * v;
    });
    if let Some(e) = bad {
        return Err(e);
    }
    Ok(acc * T::PI().powf(-T::from_usize_lossy(dim) / T::lit(2.0)))
}

/// Lebesgue integral over the tensor box spanned by an interval rule.
pub fn integrate_box<T: Real, F>(f: F, dim: usize, rule: &QuadratureRule<T>) -> Result<T>
where
    F: Fn(&[T]) -> T,
{
    let mut acc = T::zero();
    let mut bad: Option<Error> = None;
    for_each_tensor_node(rule, dim, |x, w| {
        if bad.is_some() {
            return;
        }
        let v = f(x);
        if !v.is_finite() {
            bad = Some(Error::NonFinite { node: x.iter().map(|c| c.as_f64()).collect(), value: v.as_f64() });
            return;
        }
        acc = acc + w * v;
    });
    match bad {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

/// Polar rule around a center: Gauss-Legendre panels in the radius, and a
/// direction set on the unit sphere (two points for `d = 1`, a periodic
/// trapezoid rule for `d = 2`, Gauss-Legendre in `cos(theta)` times a
/// trapezoid azimuth for `d = 3`).
#[derive(Debug, Clone)]
pub struct PolarRule<T> {
    dim: usize,
    directions: Vec<Vec<T>>,
    dir_weights: Vec<T>,
    radial: QuadratureRule<T>,
}

impl<T: Real> PolarRule<T> {
    pub fn new(dim: usize, angular: usize, radial_nodes: usize) -> Result<Self> {
        let two_pi = T::PI() * T::lit(2.0);
        let (directions, dir_weights) = match dim {
            1 => (vec![vec![-T::one()], vec![T::one()]], vec![T::one(), T::one()]),
            2 => {
                if angular < 3 {
                    return Err(invalid("need at least 3 angular nodes in 2-d"));
                }
                let h = two_pi / T::from_usize_lossy(angular);
                (0..angular)
                    .map(|j| {
                        let th = h * T::from_usize_lossy(j);
                        (vec![th.cos(), th.sin()], h)
                    })
                    .unzip()
            }
            3 => {
                if angular < 3 {
                    return Err(invalid("need at least 3 angular nodes in 3-d"));
                }
                let polar = gauss_legendre_rule::<T>(angular.div_ceil(2).max(2))?;
                let h = two_pi / T::from_usize_lossy(angular);
                let mut dirs = Vec::new();
                let mut ws = Vec::new();
                for (&c, &wc) in polar.nodes().iter().zip(polar.weights()) {
                    let sn = (T::one() - c * c).max(T::zero()).sqrt();
                    for j in 0..angular {
                        let ph = h * T::from_usize_lossy(j);
                        dirs.push(vec![sn * ph.cos(), sn * ph.sin(), c]);
                        ws.push(wc * h);
                    }
                }
                (dirs, ws)
            }
            _ => return Err(invalid(format!("polar rules support d <= 3, got {dim}"))),
        };
        Ok(PolarRule { dim, directions, dir_weights, radial: gauss_legendre_rule(radial_nodes)? })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `int_{breaks[0] <= |y - c| <= breaks[last]} f(y) dy` with one radial
    /// panel between consecutive breaks.
    pub fn integrate_shells<F: Fn(&[T]) -> T>(&self, f: F, center: &[T], breaks: &[T]) -> T {
        let mut y = vec![T::zero(); self.dim];
        let mut acc = T::zero();
        for w in breaks.windows(2) {
            if !(w[1] > w[0]) {
                continue;
            }
            let panel = self.radial.mapped(w[0], w[1]);
            for (&rho, &wr) in panel.nodes().iter().zip(panel.weights()) {
                let jac = rho.powi(self.dim as i32 - 1);
                let mut ang = T::zero();
                for (dir, &wd) in self.directions.iter().zip(&self.dir_weights) {
                    for k in 0..self.dim {
                        y[k] = center[k] + rho * dir[k];
                    }
                    ang = ang + wd * f(&y);
                }
                acc = acc + wr * jac * ang;
            }
        }
        acc
    }

    /// Nodes and Lebesgue weights of [`Self::integrate_shells`] as explicit
    /// lists.
    pub fn shell_nodes(&self, center: &[T], breaks: &[T]) -> (Vec<Vec<T>>, Vec<T>) {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            if !(w[1] > w[0]) {
                continue;
            }
            let panel = self.radial.mapped(w[0], w[1]);
            for (&rho, &wr) in panel.nodes().iter().zip(panel.weights()) {
                let jac = rho.powi(self.dim as i32 - 1);
                for (dir, &wd) in self.directions.iter().zip(&self.dir_weights) {
                    points.push((0..self.dim).map(|k| center[k] + rho * dir[k]).collect());
                    weights.push(wr * jac * wd);
                }
            }
        }
        (points, weights)
    }

    /// Integral over the annulus `r_in <= |y - c| <= r_out` split into
    /// `panels` equal radial panels.
    pub fn integrate_annulus<F: Fn(&[T]) -> T>(&self, f: F, center: &[T], r_in: T, r_out: T, panels: usize) -> T {
        if !(r_out > r_in) || panels == 0 {
            return T::zero();
        }
        let h = (r_out - r_in) / T::from_usize_lossy(panels);
        let breaks: Vec<T> = (0..=panels).map(|i| r_in + h * T::from_usize_lossy(i)).collect();
        self.integrate_shells(f, center, &breaks)
    }
}

/// Volume of the unit ball in `d` dimensions.
pub fn unit_ball_volume<T: Real>(dim: usize) -> T {
    let d = T::from_usize_lossy(dim);
    let half = T::lit(0.5);
    T::PI().powf(d * half) / gamma(d * half + T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hermite_one_point_rule() {
        let r = gauss_hermite_rule::<f64>(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert!((r.weights()[0] - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hermite_second_moment_two_points() {
        let r = gauss_hermite_rule::<f64>(2).unwrap();
        let m2 = r.integrate(|x| x * x);
        assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn hermite_eighth_moment() {
        let r = gauss_hermite_rule::<f64>(40).unwrap();
        let exact = 105.0 * PI.sqrt() / 16.0;
        assert!((r.integrate(|x| x.powi(8)) - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn hermite_zeroth_moment_and_symmetry_up_to_256() {
        for n in [3, 17, 80, 160, 256] {
            let r = gauss_hermite_rule::<f64>(n).unwrap();
            assert_eq!(r.order(), n);
            let s: f64 = r.weights().iter().sum();
            assert!((s - PI.sqrt()).abs() < 1e-12, "n={n} sum={s}");
            assert!(r.weights().iter().all(|&w| w > 0.0));
            assert!(r.nodes().windows(2).all(|w| w[1] > w[0]));
            for i in 0..n {
                assert_eq!(r.nodes()[i], -r.nodes()[n - 1 - i]);
            }
        }
    }

    #[test]
    fn order_out_of_range_rejected() {
        assert!(gauss_hermite_rule::<f64>(0).is_err());
        assert!(gauss_hermite_rule::<f64>(257).is_err());
        assert!(gauss_laguerre_rule::<f64>(300, 0.0).is_err());
    }

    #[test]
    fn laguerre_moments() {
        let r = gauss_laguerre_rule::<f64>(16, 0.0).unwrap();
        assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        let r = gauss_laguerre_rule::<f64>(16, -0.5).unwrap();
        assert!((r.integrate(|_| 1.0) - PI.sqrt()).abs() < 1e-13);
        let r = gauss_laguerre_rule::<f64>(32, 0.0).unwrap();
        assert!((r.integrate(|s| (-s).exp()) - 0.5).abs() < 1e-10);
        // degree 2n-1 exactness: int s^{alpha+5} e^{-s} = Gamma(alpha+6)
        let r = gauss_laguerre_rule::<f64>(3, 1.5).unwrap();
        let exact = gamma(7.5f64);
        assert!((r.integrate(|s| s.powi(5)) - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn laguerre_alpha_must_exceed_minus_one() {
        assert!(gauss_laguerre_rule::<f64>(8, -1.0).is_err());
        assert!(gauss_laguerre_rule::<f64>(8, -1.5).is_err());
    }

    #[test]
    fn laguerre_large_order_keeps_positive_weights() {
        let r = gauss_laguerre_rule::<f64>(256, -0.5).unwrap();
        assert!(r.weights().iter().all(|&w| w > 0.0));
        assert!((r.integrate(|_| 1.0) - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn jacobi_and_legendre() {
        let r = gauss_legendre_rule::<f64>(5).unwrap();
        assert!((r.integrate(|x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-14);
        let r = gauss_jacobi_rule::<f64>(12, 0.0, -0.5).unwrap();
        // int_{-1}^{1} (1+x)^{-1/2} dx = 2 sqrt 2
        assert!((r.integrate(|_| 1.0) - 2.0 * 2f64.sqrt()).abs() < 1e-13);
        let r = gauss_jacobi_rule::<f64>(6, 1.3, 0.7).unwrap();
        let exact = 2f64.powf(3.0) * gamma(2.3) * gamma(1.7) / gamma(4.0);
        assert!((r.integrate(|_| 1.0) - exact).abs() < 1e-13);
    }

    #[test]
    fn gaussian_integrals() {
        let r = gauss_hermite_rule::<f64>(10).unwrap();
        for d in 1..=3 {
            assert!((integrate_gaussian(|_| 1.0, d, &r).unwrap() - 1.0).abs() < 1e-14);
        }
        let v = integrate_gaussian(|x| x[0] * x[0], 1, &r).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
        let v = integrate_gaussian(|x| x.iter().map(|c| c * c).sum(), 3, &r).unwrap();
        assert!((v - 1.5).abs() < 1e-13);
    }

    #[test]
    fn gaussian_integral_reports_bad_node() {
        let r = gauss_hermite_rule::<f64>(3).unwrap();
        let err = integrate_gaussian(|x| 1.0 / x[0], 1, &r).unwrap_err();
        match err {
            Error::NonFinite { node, .. } => assert_eq!(node, vec![0.0]),
            other => panic!("unexpected {other}"),
        }
        let lag = gauss_laguerre_rule::<f64>(3, 0.0).unwrap();
        assert!(integrate_gaussian(|_| 1.0, 1, &lag).is_err());
    }

    #[test]
    fn single_precision_rule() {
        let r = gauss_hermite_rule::<f32>(12).unwrap();
        let v = integrate_gaussian(|x| x[0] * x[0], 1, &r).unwrap();
        assert!((v - 0.5).abs() < 1e-6);
    }

    #[test]
    fn polar_rule_ball_volumes() {
        for d in 1..=3 {
            let pr = PolarRule::<f64>::new(d, 32, 8).unwrap();
            let v = pr.integrate_annulus(|_| 1.0, &vec![0.3; d], 0.0, 2.0, 1);
            let exact = unit_ball_volume::<f64>(d) * 2f64.powi(d as i32);
            assert!((v - exact).abs() < 1e-12, "d={d}: {v} vs {exact}");
        }
    }

    #[test]
    fn trapezoid_weights() {
        let r = trapezoid_rule(-1.0f64, 1.0, 5).unwrap();
        assert_eq!(r.weights(), &[0.25, 0.5, 0.5, 0.5, 0.25]);
        assert!(trapezoid_rule(1.0f64, 1.0, 5).is_err());
    }
}
