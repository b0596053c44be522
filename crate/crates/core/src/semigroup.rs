//! The Ornstein-Uhlenbeck semigroup `T_t`: spectral multipliers, the Mehler
//! kernel, the local/global split over admissible balls, maximal functions,
//! and the pointwise kernel estimates on the global region.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::covering::admissible_radius;
use crate::error::{invalid, Error, Result};
use crate::functions::TestFunction;
use crate::hermite::HermiteExpansion;
use crate::quadrature::{integrate_gaussian, unit_ball_volume, PolarRule, QuadratureRule};
use crate::scalar::{dist, dot, lin_grid, log_grid, norm, norm_sq, Real};

/// Smallest `s` accepted by the kernel-quadrature path.
pub const S_MIN: f64 = 1e-3;
/// Below this time the automatic mode uses the spectral path.
pub const T_SPECTRAL: f64 = 0.05;

/// A time `t > 0` together with `s = 1 - e^{-2t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuTime<T> {
    t: T,
    s: T,
}

impl<T: Real> OuTime<T> {
    pub fn from_t(t: T) -> Result<Self> {
        if !(t > T::zero() && t.is_finite()) {
            return Err(invalid(format!("OU time must be positive and finite, got {t}")));
        }
        Ok(OuTime { t, s: -(-t * T::lit(2.0)).exp_m1() })
    }

    pub fn from_s(s: T) -> Result<Self> {
        if !(s > T::zero() && s < T::one()) {
            return Err(invalid(format!("s must lie in (0, 1), got {s}")));
        }
        Ok(OuTime { t: -(-s).ln_1p() / T::lit(2.0), s })
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn s(&self) -> T {
        self.s
    }

    /// `sqrt(1 - s) = e^{-t}`, computed without cancellation.
    pub fn contraction(&self) -> T {
        (-self.t).exp()
    }
}

pub fn time_convert<T: Real>(t: T) -> Result<OuTime<T>> {
    OuTime::from_t(t)
}

/// `ln M(s, x, y)` with `M(s,x,y) = (pi s)^{-d/2} exp(-|y - sqrt(1-s) x|^2 / s)`.
pub fn ln_mehler_kernel<T: Real>(ou: &OuTime<T>, x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let s = ou.s;
    if !(s > T::zero() && s <= T::one()) {
        return Err(invalid(format!("s must lie in (0, 1), got {s}")));
    }
    let c = ou.contraction();
    let d2 = x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| {
        let v = b - c * a;
        acc + v * v
    });
    let half_d = T::from_usize_lossy(x.len()) / T::lit(2.0);
    Ok(-half_d * (T::PI() * s).ln() - d2 / s)
}

/// The Mehler kernel of `T_t` against Lebesgue measure.
pub fn mehler_kernel<T: Real>(ou: &OuTime<T>, x: &[T], y: &[T]) -> Result<T> {
    Ok(ln_mehler_kernel(ou, x, y)?.exp())
}

/// The multiplier `e^{-tk}` applied to an expansion.
pub fn ou_expansion<T: Real>(e: &HermiteExpansion<T>, t: T) -> HermiteExpansion<T> {
    e.map_degree(|k| (-t * T::from_usize_lossy(k)).exp())
}

/// `sum_k e^{-tk} (J_k f)(x)`.
pub fn ou_spectral<T: Real>(e: &HermiteExpansion<T>, t: T, x: &[T]) -> T {
    e.degree_components(x).into_iter().enumerate().map(|(k, v)| (-t * T::from_usize_lossy(k)).exp() * v).sum()
}

/// `int M(s,x,y) f(y) dy`, evaluated with the Gauss-Hermite rule in the
/// variable `z = (y - sqrt(1-s) x) / sqrt(s)` in which the kernel becomes
/// the Gaussian density.
pub fn ou_quadrature<T: Real, F>(f: F, ou: &OuTime<T>, x: &[T], rule: &QuadratureRule<T>) -> Result<T>
where
    F: Fn(&[T]) -> T,
{
    if ou.s < T::lit(S_MIN) {
        return Err(Error::SingularKernel { s: ou.s.as_f64(), s_min: S_MIN });
    }
    let c = ou.contraction();
    let rs = ou.s.sqrt();
    let shift: Vec<T> = x.iter().map(|&a| c * a).collect();
    integrate_gaussian(
        |z| {
            let y: Vec<T> = shift.iter().zip(z).map(|(&c, &zk)| c + rs * zk).collect();
            f(&y)
        },
        x.len(),
        rule,
    )
}

#[derive(Debug, Clone, Copy)]
pub enum Mode<'a, T> {
    Spectral,
    Quadrature(&'a QuadratureRule<T>),
    /// Spectral for `t < 0.05` or `s < 10^-3`, quadrature otherwise.
    Auto(&'a QuadratureRule<T>),
}

/// `T_t f(x)` in the requested mode.
pub fn ou_apply<T: Real>(f: &TestFunction<T>, ou: &OuTime<T>, x: &[T], mode: Mode<'_, T>) -> Result<T> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    let spectral = || f.expansion().map(|e| ou_spectral(e, ou.t, x)).ok_or(Error::MissingExpansion);
    match mode {
        Mode::Spectral => spectral(),
        Mode::Quadrature(rule) => ou_quadrature(|y| f.eval(y), ou, x, rule),
        Mode::Auto(rule) => {
            if ou.t < T::lit(T_SPECTRAL) || ou.s < T::lit(S_MIN) {
                spectral()
            } else {
                ou_quadrature(|y| f.eval(y), ou, x, rule)
            }
        }
    }
}

/// Split of `T_t f(x)` at the admissible ball.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitResult<T> {
    pub local: T,
    pub global: T,
    pub admissible_radius: T,
    /// Outer radius of the integration region around `x`.
    pub truncation_radius: T,
}

impl<T: Real> SplitResult<T> {
    pub fn total(&self) -> T {
        self.local + self.global
    }
}

/// Radial breaks (distances from `x`) covering the kernel mass and
/// containing `r_h` when it falls inside that range.
fn kernel_breaks<T: Real>(ou: &OuTime<T>, x: &[T], r_h: T) -> Vec<T> {
    let rs = ou.s.sqrt();
    let offset = norm(x) * (T::one() - ou.contraction());
    let lo = (offset - T::lit(9.0) * rs).max(T::zero());
    let hi = offset + T::lit(9.0) * rs;
    let width = rs / T::lit(2.0);
    let mut cuts = vec![lo, hi];
    if r_h > lo && r_h < hi {
        cuts.insert(1, r_h);
    }
    let mut out = vec![lo];
    for w in cuts.windows(2) {
        let n = ((w[1] - w[0]) / width).ceil().to_usize().unwrap_or(1).max(1);
        out.extend(lin_grid(w[0], w[1], n + 1).into_iter().skip(1));
    }
    out
}

/// `int_{B_h(x)} M f dy` and `int_{B_h(x)^c} M f dy` by polar quadrature
/// around `x`. The region beyond nine kernel widths is dropped
/// (relative kernel mass below `e^{-81}`).
pub fn ou_split<T: Real, F>(f: F, ou: &OuTime<T>, x: &[T], polar: &PolarRule<T>) -> Result<SplitResult<T>>
where
    F: Fn(&[T]) -> T,
{
    if ou.s < T::lit(S_MIN) {
        return Err(Error::SingularKernel { s: ou.s.as_f64(), s_min: S_MIN });
    }
    if polar.dim() != x.len() {
        return Err(Error::DimensionMismatch { expected: polar.dim(), got: x.len() });
    }
    let r_h = admissible_radius(x);
    let breaks = kernel_breaks(ou, x, r_h);
    let outer = *breaks.last().expect("nonempty breaks");
    let g = |y: &[T]| ln_mehler_kernel(ou, x, y).map(|l| l.exp()).unwrap_or(T::nan()) * f(y);
    let (inner, outer_part): (Vec<T>, Vec<T>) = {
        let split = breaks.iter().position(|&b| b >= r_h).unwrap_or(breaks.len() - 1);
        (breaks[..=split].to_vec(), breaks[split..].to_vec())
    };
    let local = if breaks[0] < r_h { polar.integrate_shells(&g, x, &inner) } else { T::zero() };
    let global = if outer > r_h { polar.integrate_shells(&g, x, &outer_part) } else { T::zero() };
    if !(local.is_finite() && global.is_finite()) {
        return Err(Error::NonFinite { node: x.iter().map(|v| v.as_f64()).collect(), value: (local + global).as_f64() });
    }
    Ok(SplitResult { local, global, admissible_radius: r_h, truncation_radius: outer })
}

/// Log-uniform time grid on `[10^-3, 10]`.
pub fn default_t_grid<T: Real>(n: usize) -> Vec<T> {
    log_grid(T::lit(1e-3), T::lit(10.0), n.max(2))
}

/// `max_t T_t f(x)` over the grid: a lower bound of `T* f(x)`.
pub fn ou_maximal<T: Real>(f: &TestFunction<T>, x: &[T], t_grid: &[T], mode: Mode<'_, T>) -> Result<T> {
    if t_grid.is_empty() {
        return Err(invalid("maximal function needs a nonempty time grid"));
    }
    let mut best = T::neg_infinity();
    for &t in t_grid {
        best = best.max(ou_apply(f, &OuTime::from_t(t)?, x, mode)?);
    }
    Ok(best)
}

/// `max_r |B(x,r)|^{-1} int_{B(x,r)} |f|`: a grid lower bound of the
/// Hardy-Littlewood maximal function.
pub fn hl_maximal<T: Real, F>(f: F, x: &[T], radii: &[T], polar: &PolarRule<T>) -> Result<T>
where
    F: Fn(&[T]) -> T,
{
    if radii.is_empty() || radii.iter().any(|&r| !(r > T::zero())) {
        return Err(invalid("radii must be positive and nonempty"));
    }
    if radii.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("radii must be sorted"));
    }
    let vol = unit_ball_volume::<T>(x.len());
    let mut best = T::zero();
    for &r in radii {
        let avg = polar.integrate_annulus(|y| f(y).abs(), x, T::zero(), r, 8) / (vol * r.powi(x.len() as i32));
        best = best.max(avg);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    BNonpositive,
    BPositive,
}

/// The quantities entering the pointwise kernel bounds on the global region.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KernelTerms<T> {
    /// `2 <x, y>`.
    pub b: T,
    /// `|x|^2 + |y|^2`.
    pub a: T,
    /// `2 sqrt(a^2 - b^2) / (a + sqrt(a^2 - b^2))`.
    pub t0: T,
    /// `(|y|^2 - |x|^2 + |x+y| |x-y|) / 2`.
    pub u0: T,
    pub branch: Branch,
    /// `ln` of `e^{-|y|^2}` (b <= 0) or of `e^{-u0} / t0^{d/2}` (b > 0).
    pub ln_bound: T,
}

/// Evaluates the bound terms for any pair (no region check).
/// `sqrt(a^2 - b^2)` is computed as `|x+y| |x-y|`.
pub fn kernel_bound_terms<T: Real>(x: &[T], y: &[T]) -> KernelTerms<T> {
    let b = T::lit(2.0) * dot(x, y);
    let (nx, ny) = (norm_sq(x), norm_sq(y));
    let a = nx + ny;
    let plus: Vec<T> = x.iter().zip(y).map(|(&p, &q)| p + q).collect();
    let root = norm(&plus) * dist(x, y);
    let t0 = T::lit(2.0) * root / (a + root);
    let u0 = (ny - nx + root) / T::lit(2.0);
    let (branch, ln_bound) =
        if b <= T::zero() { (Branch::BNonpositive, -ny) } else { (Branch::BPositive, -u0 - T::from_usize_lossy(x.len()) / T::lit(2.0) * t0.ln()) };
    KernelTerms { b, a, t0, u0, branch, ln_bound }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelBoundReport<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub terms: KernelTerms<T>,
    pub sup_m: T,
    pub s_at_sup: T,
    pub bound: T,
    pub ratio: T,
}

/// `s`-grid logistic in `ln(s / (1 - s))` on `[-L, L]` with `L = ln 10^8`,
/// so it is log-dense at both ends of `(0, 1)`.
pub fn kernel_s_grid<T: Real>(n: usize) -> Vec<T> {
    let l = T::lit(1e8).ln();
    lin_grid(-l, l, n.max(2)).into_iter().map(|u| T::one() / (T::one() + (-u).exp())).collect()
}

/// `ln M` as a function of `u = ln(s / (1 - s))`; then `t = softplus(u) / 2`.
fn ln_m_logit<T: Real>(u: T, x: &[T], y: &[T]) -> T {
    let softplus = if u > T::zero() { u + (-u).exp().ln_1p() } else { u.exp().ln_1p() };
    let ou = OuTime { t: softplus / T::lit(2.0), s: T::one() / (T::one() + (-u).exp()) };
    ln_mehler_kernel(&ou, x, y).unwrap_or(T::neg_infinity())
}

/// Grid maximum of `M(s, x, y)` over `s`, refined by golden-section search
/// around the grid argmax, compared with the pointwise bound.
pub fn kernel_bound_report<T: Real>(x: &[T], y: &[T], s_grid: &[T]) -> Result<KernelBoundReport<T>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let r_h = admissible_radius(x);
    let d = dist(x, y);
    if d <= r_h {
        return Err(Error::LocalRegion { distance: d.as_f64(), radius: r_h.as_f64() });
    }
    if s_grid.len() < 2 || s_grid.iter().any(|&s| !(s > T::zero() && s < T::one())) {
        return Err(invalid("s grid must have at least two points in (0, 1)"));
    }
    let logits: Vec<T> = s_grid.iter().map(|&s| (s / (T::one() - s)).ln()).collect();
    let vals: Vec<T> = logits.iter().map(|&u| ln_m_logit(u, x, y)).collect();
    let (imax, _) = vals.iter().enumerate().fold((0, T::neg_infinity()), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    let lo = logits[imax.saturating_sub(1)];
    let hi = logits[(imax + 1).min(logits.len() - 1)];
    let (u_best, v_best) = golden_max(|u| ln_m_logit(u, x, y), lo, hi, 80);
    let (u_best, ln_sup) = if v_best >= vals[imax] { (u_best, v_best) } else { (logits[imax], vals[imax]) };
    let terms = kernel_bound_terms(x, y);
    Ok(KernelBoundReport {
        x: x.to_vec(),
        y: y.to_vec(),
        terms,
        sup_m: ln_sup.exp(),
        s_at_sup: T::one() / (T::one() + (-u_best).exp()),
        bound: terms.ln_bound.exp(),
        ratio: (ln_sup - terms.ln_bound).exp(),
    })
}

fn golden_max<T: Real, F: Fn(T) -> T>(f: F, mut a: T, mut b: T, iters: usize) -> (T, T) {
    let g = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// One CSV row per `(x, y)` pair; points are `;`-separated coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelBoundRow {
    pub x: String,
    pub y: String,
    pub b: f64,
    pub branch: Branch,
    pub t0: f64,
    pub u0: f64,
    #[serde(rename = "sup_M")]
    pub sup_m: f64,
    pub bound: f64,
    pub ratio: f64,
}

fn join_point<T: Real>(p: &[T]) -> String {
    p.iter().map(|v| format!("{}", v.as_f64())).collect::<Vec<_>>().join(";")
}

impl<T: Real> KernelBoundReport<T> {
    pub fn to_row(&self) -> KernelBoundRow {
        KernelBoundRow {
            x: join_point(&self.x),
            y: join_point(&self.y),
            b: self.terms.b.as_f64(),
            branch: self.terms.branch,
            t0: self.terms.t0.as_f64(),
            u0: self.terms.u0.as_f64(),
            sup_m: self.sup_m.as_f64(),
            bound: self.bound.as_f64(),
            ratio: self.ratio.as_f64(),
        }
    }
}

pub fn write_kernel_bound_csv<T: Real, W: Write>(reports: &[KernelBoundReport<T>], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in reports {
        wr.serialize(r.to_row())?;
    }
    wr.flush().map_err(|e| Error::Io { path: "<csv writer>".into(), source: e })?;
    Ok(())
}

/// `alpha_inf = 1/2 - |1/p_inf - 1/2|`.
pub fn alpha_inf<T: Real>(p_inf: T) -> Result<T> {
    if !(p_inf > T::one()) {
        return Err(invalid(format!("p_inf must exceed 1, got {p_inf}")));
    }
    let half = T::lit(0.5);
    let a = half - (p_inf.recip() - half).abs();
    if !(a > T::zero()) {
        return Err(invalid(format!("alpha_inf = {a} is not positive")));
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MajorantIntegral<T> {
    pub alpha: T,
    pub value: T,
    /// Radial extent of each polar integral.
    pub radius: T,
}

/// `int P(x, y) dy` with `P(x,y) = |x+y|^d e^{-alpha |x+y| |x-y|}`.
///
/// The integrand has cusps at `y = x` and `y = -x`. It is split with the
/// smooth partition `phi = |y+x|^2 / (|y+x|^2 + |y-x|^2)` and each piece is
/// integrated in polar coordinates around its own cusp. The radius is
/// `2|x| + max(8, sqrt(46 / alpha))`, beyond which `P < e^{-46}` times a
/// polynomial factor. In 2-d the angular feature near the far cusp needs
/// about 512 directions for seven correct digits when `|x|` is near 5.
pub fn global_majorant_integral<T: Real>(x: &[T], p_inf: T, polar: &PolarRule<T>) -> Result<MajorantIntegral<T>> {
    let alpha = alpha_inf(p_inf)?;
    if polar.dim() != x.len() {
        return Err(Error::DimensionMismatch { expected: polar.dim(), got: x.len() });
    }
    let dim = x.len() as i32;
    let nx = norm(x);
    let reach = T::lit(8.0).max((T::lit(46.0) / alpha).sqrt());
    let radius = T::lit(2.0) * nx + reach;
    let width = T::lit(0.5).min(T::lit(0.5) / (alpha * (T::lit(2.0) * nx).max(T::one())));
    let n = (radius / width).ceil().to_usize().unwrap_or(1).max(1);
    let mut breaks = lin_grid(T::zero(), radius, n + 1);
    let cusp = T::lit(2.0) * nx;
    if cusp > T::zero() && cusp < radius {
        breaks.push(cusp);
        breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breaks"));
        breaks.dedup();
    }
    let p = |y: &[T]| {
        let (sp, sm) = pm_norms(x, y);
        sp.powi(dim) * (-alpha * sp * sm).exp()
    };
    let value = if nx == T::zero() {
        polar.integrate_shells(p, x, &breaks)
    } else {
        let phi = |y: &[T]| {
            let (sp, sm) = pm_norms(x, y);
            let (a, b) = (sp * sp, sm * sm);
            a / (a + b)
        };
        let neg: Vec<T> = x.iter().map(|&v| -v).collect();
        polar.integrate_shells(|y| p(y) * phi(y), x, &breaks) + polar.integrate_shells(|y| p(y) * (T::one() - phi(y)), &neg, &breaks)
    };
    Ok(MajorantIntegral { alpha, value, radius })
}

fn pm_norms<T: Real>(x: &[T], y: &[T]) -> (T, T) {
    let (mut sp, mut sm) = (T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sp = sp + (a + b) * (a + b);
        sm = sm + (a - b) * (a - b);
    }
    (sp.sqrt(), sm.sqrt())
}
