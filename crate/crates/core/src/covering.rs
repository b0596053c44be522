//! Admissible balls and the shell covering of `R^d` built from the radii
//! `x_k = sqrt(k)`.
//!
//! Shell `k` holds balls `B_j^k` whose centers lie on the sphere of radius
//! `m_k = (sqrt(k+1) + sqrt(k)) / 2` and whose diameter is
//! `sqrt(k+1) - sqrt(k) = 1 / (2 m_k)`. Doubling every shell ball (the
//! "tilde" family) covers the annulus `sqrt(k) <= |x| <= sqrt(k+1)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::sampling::halton_ball;
use crate::scalar::{dist, norm, Real};

/// Relative slack used by every containment and separation test.
pub const GEOM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball<T> {
    pub center: Vec<T>,
    pub radius: T,
}

impl<T: Real> Ball<T> {
    pub fn new(center: Vec<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Closed-ball membership with a relative slack of [`GEOM_TOL`].
    pub fn contains(&self, x: &[T]) -> bool {
        dist(x, &self.center) <= self.radius * (T::one() + T::lit(GEOM_TOL))
    }

    /// `c B`: same center, radius multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Ball { center: self.center.clone(), radius: self.radius * c }
    }
}

/// The admissible ball `B_h(x) = B(x, d min(1, 1/|x|))`.
pub fn admissible_ball<T: Real>(x: &[T]) -> Ball<T> {
    Ball { center: x.to_vec(), radius: admissible_radius(x) }
}

pub fn admissible_radius<T: Real>(x: &[T]) -> T {
    let d = T::from_usize_lossy(x.len());
    let r = norm(x);
    if r <= T::one() {
        d
    } else {
        d / r
    }
}

/// Center radius `m_k` of shell `k`.
pub fn shell_center_radius<T: Real>(k: usize) -> T {
    let (a, b) = (T::from_usize_lossy(k + 1).sqrt(), T::from_usize_lossy(k).sqrt());
    (a + b) / T::lit(2.0)
}

/// Ball diameter in shell `k`, computed as `1 / (2 m_k)` to avoid the
/// cancellation in `sqrt(k+1) - sqrt(k)`.
pub fn shell_diameter<T: Real>(k: usize) -> T {
    (T::lit(2.0) * shell_center_radius::<T>(k)).recip()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Shell<T> {
    pub k: usize,
    pub balls: Vec<Ball<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Shell balls doubled, base ball unchanged.
    Tilde,
    /// Every ball (base included) multiplied by `scale_hat`.
    Hat,
}

#[derive(Debug, Clone)]
pub struct CoveringFamily<T> {
    pub dim: usize,
    pub k_max: usize,
    pub base: Ball<T>,
    pub shells: Vec<Shell<T>>,
    pub scale_tilde: T,
    pub scale_hat: T,
}

/// Builds the family for `d` in {1, 2} and shells `1..=k_max`.
///
/// In 2-d, shell `k` carries the largest number `N_k` of equally spaced
/// balls whose neighbouring centers are at least one diameter apart, so
/// same-shell balls are disjoint without shrinking them.
pub fn build_covering<T: Real>(dim: usize, k_max: usize) -> Result<CoveringFamily<T>> {
    if !(1..=2).contains(&dim) {
        return Err(invalid(format!("covering construction supports d in {{1, 2}}, got {dim}")));
    }
    if k_max == 0 {
        return Err(invalid("k_max must be at least 1"));
    }
    let two = T::lit(2.0);
    let mut shells = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let m = shell_center_radius::<T>(k);
        let diam = shell_diameter::<T>(k);
        let r = diam / two;
        let balls = if dim == 1 {
            vec![Ball { center: vec![-m], radius: r }, Ball { center: vec![m], radius: r }]
        } else {
            let n = balls_per_shell(m, diam);
            let step = T::PI() * two / T::from_usize_lossy(n);
            (0..n)
                .map(|j| {
                    let th = step * T::from_usize_lossy(j);
                    Ball { center: vec![m * th.cos(), m * th.sin()], radius: r }
                })
                .collect()
        };
        shells.push(Shell { k, balls });
    }
    let base = Ball { center: vec![T::zero(); dim], radius: T::one() };
    let mut fam = CoveringFamily { dim, k_max, base, shells, scale_tilde: two, scale_hat: T::one() };
    fam.scale_hat = fam.balls().map(|b| hull_bound(b, dim)).fold(T::one(), T::max);
    Ok(fam)
}

fn balls_per_shell<T: Real>(m: T, diam: T) -> usize {
    let need = diam * (T::one() + T::lit(GEOM_TOL));
    let chord = |n: usize| T::lit(2.0) * m * (T::PI() / T::from_usize_lossy(n)).sin();
    let mut n = (T::PI() / (diam / (T::lit(2.0) * m)).asin()).floor().to_usize().unwrap_or(2).max(2);
    while n > 2 && chord(n) < need {
        n -= 1;
    }
    n
}

/// Smallest `c` such that `B_h(x) ⊂ c B` for every `x` in `B`, bounded
/// analytically: `|x - c_B| + d min(1, 1/|x|) <= r + d min(1, 1/(|c_B| - r))`.
fn hull_bound<T: Real>(b: &Ball<T>, dim: usize) -> T {
    let d = T::from_usize_lossy(dim);
    let inner = (norm(&b.center) - b.radius).max(T::zero());
    let reach = if inner <= T::one() { d } else { d / inner };
    T::one() + reach / b.radius
}

impl<T: Real> CoveringFamily<T> {
    /// Base ball followed by all shell balls in shell order.
    pub fn balls(&self) -> impl Iterator<Item = &Ball<T>> {
        std::iter::once(&self.base).chain(self.shells.iter().flat_map(|s| s.balls.iter()))
    }

    pub fn len(&self) -> usize {
        1 + self.shells.iter().map(|s| s.balls.len()).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Radius up to which the tilde family is known to cover.
    pub fn built_radius(&self) -> T {
        T::from_usize_lossy(self.k_max).sqrt()
    }

    /// The scaled family for the given scaling.
    pub fn scaled_balls(&self, which: Scaling) -> Vec<Ball<T>> {
        match which {
            Scaling::Tilde => {
                std::iter::once(self.base.clone()).chain(self.shells.iter().flat_map(|s| s.balls.iter().map(|b| b.scaled(self.scale_tilde)))).collect()
            }
            Scaling::Hat => self.balls().map(|b| b.scaled(self.scale_hat)).collect(),
        }
    }

    pub fn to_record(&self) -> CoveringRecord {
        let mut balls = vec![BallRecord { center: self.base.center.iter().map(|c| c.as_f64()).collect(), radius: self.base.radius.as_f64(), shell: 0 }];
        for s in &self.shells {
            for b in &s.balls {
                balls.push(BallRecord { center: b.center.iter().map(|c| c.as_f64()).collect(), radius: b.radius.as_f64(), shell: s.k });
            }
        }
        CoveringRecord { dim: self.dim, k_max: self.k_max, balls }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_record())?)
    }
}

/// JSON layout of a family; the base ball is listed with `shell = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringRecord {
    pub dim: usize,
    pub k_max: usize,
    pub balls: Vec<BallRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub center: Vec<f64>,
    pub radius: f64,
    pub shell: usize,
}

/// Worst deviations from the defining formulas of the family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantReport {
    pub max_center_error: f64,
    pub max_diameter_error: f64,
    /// Smallest `|c_i - c_j| / (r_i + r_j)` over same-shell pairs.
    pub min_separation_ratio: f64,
    pub disjoint: bool,
}

pub fn check_invariants<T: Real>(fam: &CoveringFamily<T>) -> InvariantReport {
    let mut center_err = 0.0f64;
    let mut diam_err = 0.0f64;
    let mut sep = f64::INFINITY;
    for s in &fam.shells {
        let (a, b) = ((s.k as f64 + 1.0).sqrt(), (s.k as f64).sqrt());
        let m = (a + b) / 2.0;
        for (i, ball) in s.balls.iter().enumerate() {
            let c = norm(&ball.center).as_f64();
            center_err = center_err.max((c - m).abs());
            let d = 2.0 * ball.radius.as_f64();
            diam_err = diam_err.max((d - (a - b)).abs()).max((d - 1.0 / (2.0 * c)).abs());
            for other in &s.balls[i + 1..] {
                let gap = dist(&ball.center, &other.center).as_f64() / (ball.radius + other.radius).as_f64();
                sep = sep.min(gap);
            }
        }
    }
    InvariantReport { max_center_error: center_err, max_diameter_error: diam_err, min_separation_ratio: sep, disjoint: sep >= 1.0 + GEOM_TOL }
}

fn check_samples<T: Real>(fam: &CoveringFamily<T>, samples: &[Vec<T>]) -> Result<()> {
    let lim = fam.built_radius() * (T::one() + T::lit(GEOM_TOL));
    for x in samples {
        if x.len() != fam.dim {
            return Err(invalid(format!("sample of dimension {} in a {}-d family", x.len(), fam.dim)));
        }
        if norm(x) > lim {
            return Err(invalid(format!("sample at radius {} beyond the built radius {}", norm(x), fam.built_radius())));
        }
    }
    Ok(())
}

/// Fraction of samples in the tilde family.
pub fn coverage_check<T: Real>(fam: &CoveringFamily<T>, samples: &[Vec<T>]) -> Result<f64> {
    check_samples(fam, samples)?;
    if samples.is_empty() {
        return Ok(1.0);
    }
    let balls = fam.scaled_balls(Scaling::Tilde);
    let hit = samples.par_iter().filter(|x| balls.iter().any(|b| b.contains(x))).count();
    Ok(hit as f64 / samples.len() as f64)
}

/// Largest number of scaled balls containing a single sample.
pub fn overlap_count<T: Real>(fam: &CoveringFamily<T>, samples: &[Vec<T>], which: Scaling) -> Result<usize> {
    check_samples(fam, samples)?;
    Ok(max_overlap(&fam.scaled_balls(which), samples))
}

/// Largest number of the given balls containing a single sample.
pub fn max_overlap<T: Real>(balls: &[Ball<T>], samples: &[Vec<T>]) -> usize {
    samples.par_iter().map(|x| balls.iter().filter(|b| b.contains(x)).count()).max().unwrap_or(0)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BallStats<T> {
    /// `max e^{-|x|^2} / e^{-|y|^2}` over sample pairs.
    pub density_ratio: T,
    /// Smallest `c` with `B_h(x) ⊂ c B` for every sampled `x`.
    pub hull_constant: T,
}

pub fn ball_stats<T: Real>(ball: &Ball<T>, samples: &[Vec<T>]) -> Result<BallStats<T>> {
    if samples.is_empty() {
        return Err(invalid("ball statistics need samples"));
    }
    let (mut lo, mut hi) = (T::infinity(), T::zero());
    let mut hull = T::zero();
    for x in samples {
        if !ball.contains(x) {
            return Err(invalid("sample outside the ball"));
        }
        let r2 = crate::scalar::norm_sq(x);
        lo = lo.min(r2);
        hi = hi.max(r2);
        hull = hull.max((dist(x, &ball.center) + admissible_radius(x)) / ball.radius);
    }
    Ok(BallStats { density_ratio: (hi - lo).exp(), hull_constant: hull })
}

/// Center, boundary points along the axes and `n` Halton points of the ball.
pub fn ball_samples<T: Real>(ball: &Ball<T>, n: usize, seed: u64) -> Vec<Vec<T>> {
    let d = ball.dim();
    let mut out = vec![ball.center.clone()];
    for k in 0..d {
        for sgn in [-T::one(), T::one()] {
            let mut p = ball.center.clone();
            p[k] = p[k] + sgn * ball.radius;
            out.push(p);
        }
    }
    let r = norm(&ball.center);
    if r > T::zero() {
        for sgn in [-T::one(), T::one()] {
            out.push(ball.center.iter().map(|&c| c + sgn * ball.radius * c / r).collect());
        }
    }
    out.extend(halton_ball::<T>(d, ball.radius, n, seed).into_iter().map(|p| p.iter().zip(&ball.center).map(|(&a, &c)| a + c).collect()));
    out
}

/// Maximum of [`ball_stats`] over every ball of the family.
pub fn family_ball_stats<T: Real>(fam: &CoveringFamily<T>, per_ball: usize, seed: u64) -> Result<BallStats<T>> {
    let balls: Vec<&Ball<T>> = fam.balls().collect();
    let stats: Result<Vec<BallStats<T>>> = balls.par_iter().map(|b| ball_stats(b, &ball_samples(b, per_ball, seed))).collect();
    let stats = stats?;
    Ok(BallStats {
        density_ratio: stats.iter().map(|s| s.density_ratio).fold(T::zero(), T::max),
        hull_constant: stats.iter().map(|s| s.hull_constant).fold(T::zero(), T::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::halton_ball;

    #[test]
    fn first_shell_values() {
        let m: f64 = shell_center_radius(1);
        assert!((m - 1.207_106_781_186_547_5).abs() < 1e-15);
        assert!((shell_diameter::<f64>(1) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_family_shape() {
        let fam = build_covering::<f64>(1, 3).unwrap();
        assert_eq!(fam.len(), 7);
        let inv = check_invariants(&fam);
        assert!(inv.max_center_error < 1e-12 && inv.max_diameter_error < 1e-12 && inv.disjoint);
    }

    #[test]
    fn two_dimensional_family_is_disjoint_and_covers() {
        let fam = build_covering::<f64>(2, 25).unwrap();
        let inv = check_invariants(&fam);
        assert!(inv.disjoint, "{inv:?}");
        assert!(inv.max_center_error < 1e-12 && inv.max_diameter_error < 1e-12);
        let samples = halton_ball::<f64>(2, 5.0, 4000, 3);
        assert_eq!(coverage_check(&fam, &samples).unwrap(), 1.0);
    }

    #[test]
    fn origin_and_precondition() {
        let fam = build_covering::<f64>(1, 4).unwrap();
        assert_eq!(overlap_count(&fam, &[vec![0.0]], Scaling::Tilde).unwrap(), 1);
        assert_eq!(coverage_check(&fam, &[vec![0.5]]).unwrap(), 1.0);
        assert!(coverage_check(&fam, &[vec![3.0]]).is_err());
        assert!(build_covering::<f64>(3, 4).is_err());
    }

    #[test]
    fn admissible_radii() {
        assert_eq!(admissible_radius(&[2.0f64, 0.0]), 1.0);
        assert_eq!(admissible_radius(&[0.0f64]), 1.0);
        assert!((admissible_radius(&[6.0f64, 0.0, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn base_ball_density_ratio_is_e() {
        let b = Ball::new(vec![0.0f64], 1.0).unwrap();
        let s = ball_stats(&b, &ball_samples(&b, 50, 0)).unwrap();
        assert!((s.density_ratio - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn json_layout() {
        let fam = build_covering::<f64>(1, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&fam.to_json().unwrap()).unwrap();
        assert_eq!(v["dim"], 1);
        assert_eq!(v["balls"].as_array().unwrap().len(), 3);
        assert_eq!(v["balls"][1]["shell"], 1);
    }
}
