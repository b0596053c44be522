//! Variable exponents `p(.)` and sample-based checks of the regularity
//! classes LH0, LHinf and the Gaussian decay class.
//!
//! Every check is a verdict on a finite sample set. A report that passes
//! says "passed on N samples"; it never claims class membership.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{dist, norm, norm_sq, Real};

type EvalFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// An exponent function `p : R^d -> (1, inf)` with cached bounds.
#[derive(Clone)]
pub struct ExponentFunction<T> {
    id: String,
    dim: usize,
    eval: EvalFn<T>,
    p_minus: T,
    p_plus: T,
    p_inf: Option<T>,
}

impl<T: Real> fmt::Debug for ExponentFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExponentFunction")
            .field("id", &self.id)
            .field("dim", &self.dim)
            .field("p_minus", &self.p_minus)
            .field("p_plus", &self.p_plus)
            .field("p_inf", &self.p_inf)
            .finish()
    }
}

impl<T: Real> ExponentFunction<T> {
    /// Builds an exponent from a closure and its declared bounds.
    ///
    /// Requires `1 < p_minus <= p_plus < inf` and, when given,
    /// `p_minus <= p_inf <= p_plus`.
    pub fn new<F>(id: impl Into<String>, dim: usize, eval: F, p_minus: T, p_plus: T, p_inf: Option<T>) -> Result<Self>
    where
        F: Fn(&[T]) -> T + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(invalid("exponent dimension must be positive"));
        }
        if !(p_minus > T::one() && p_minus <= p_plus && p_plus.is_finite()) {
            return Err(invalid(format!("need 1 < p_minus <= p_plus < inf, got [{p_minus}, {p_plus}]")));
        }
        if let Some(pi) = p_inf {
            if !(pi >= p_minus && pi <= p_plus) {
                return Err(invalid(format!("p_inf = {pi} outside [{p_minus}, {p_plus}]")));
            }
        }
        Ok(ExponentFunction { id: id.into(), dim, eval: Arc::new(eval), p_minus, p_plus, p_inf })
    }

    pub fn constant(dim: usize, p0: T) -> Result<Self> {
        Self::new(format!("constant({p0})"), dim, move |_| p0, p0, p0, Some(p0))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn eval(&self, x: &[T]) -> T {
        (self.eval)(x)
    }

    pub fn p_minus(&self) -> T {
        self.p_minus
    }

    pub fn p_plus(&self) -> T {
        self.p_plus
    }

    pub fn p_inf(&self) -> Option<T> {
        self.p_inf
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    /// Returns a copy with `p_inf` set (for instance to a fitted value).
    pub fn with_p_inf(mut self, p_inf: T) -> Result<Self> {
        if !(p_inf >= self.p_minus && p_inf <= self.p_plus) {
            return Err(invalid(format!("p_inf = {p_inf} outside [{}, {}]", self.p_minus, self.p_plus)));
        }
        self.p_inf = Some(p_inf);
        Ok(self)
    }
}

/// `q / (q - 1)`.
#[inline]
pub fn conjugate_value<T: Real>(q: T) -> T {
    q / (q - T::one())
}

/// The conjugate exponent `p' = p / (p - 1)`.
pub fn conjugate<T: Real>(p: &ExponentFunction<T>) -> Result<ExponentFunction<T>> {
    if p.p_minus <= T::one() {
        return Err(invalid("conjugate exponent is unbounded when p_minus = 1"));
    }
    let inner = p.eval.clone();
    Ok(ExponentFunction {
        id: format!("conj({})", p.id),
        dim: p.dim,
        eval: Arc::new(move |x| conjugate_value(inner(x))),
        p_minus: conjugate_value(p.p_plus),
        p_plus: conjugate_value(p.p_minus),
        p_inf: p.p_inf.map(conjugate_value),
    })
}

/// The exponent catalogue accepted in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ExponentSpec {
    /// `p0`.
    Constant { p0: f64 },
    /// `p0 + c / (1 + |x|^2)`.
    RationalDecay { p0: f64, c: f64 },
    /// `p0 + a sin(|x|)`.
    Oscillating { p0: f64, a: f64 },
    /// `p0` on `|x| <= r`, `p1` outside.
    Step { p0: f64, p1: f64, r: f64 },
}

impl ExponentSpec {
    pub fn id(&self) -> String {
        match self {
            ExponentSpec::Constant { p0 } => format!("constant({p0})"),
            ExponentSpec::RationalDecay { p0, c } => format!("rational_decay({p0},{c})"),
            ExponentSpec::Oscillating { p0, a } => format!("oscillating({p0},{a})"),
            ExponentSpec::Step { p0, p1, r } => format!("step({p0},{p1},{r})"),
        }
    }

    /// Instantiates the exponent in dimension `dim`.
    ///
    /// The oscillating family has no limit at infinity, so its `p_inf` is
    /// left unset.
    pub fn build<T: Real>(&self, dim: usize) -> Result<ExponentFunction<T>> {
        let id = self.id();
        match *self {
            ExponentSpec::Constant { p0 } => {
                let p0 = T::lit(p0);
                ExponentFunction::new(id, dim, move |_| p0, p0, p0, Some(p0))
            }
            ExponentSpec::RationalDecay { p0, c } => {
                let (p0, c) = (T::lit(p0), T::lit(c));
                let (lo, hi) = if c >= T::zero() { (p0, p0 + c) } else { (p0 + c, p0) };
                ExponentFunction::new(id, dim, move |x| p0 + c / (T::one() + norm_sq(x)), lo, hi, Some(p0))
            }
            ExponentSpec::Oscillating { p0, a } => {
                let (p0, a) = (T::lit(p0), T::lit(a));
                ExponentFunction::new(id, dim, move |x| p0 + a * norm(x).sin(), p0 - a.abs(), p0 + a.abs(), None)
            }
            ExponentSpec::Step { p0, p1, r } => {
                let (p0, p1, r) = (T::lit(p0), T::lit(p1), T::lit(r));
                let eval = move |x: &[T]| if norm(x) <= r { p0 } else { p1 };
                ExponentFunction::new(id, dim, eval, p0.min(p1), p0.max(p1), Some(p1))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegularityClass {
    #[serde(rename = "LH0")]
    LH0,
    #[serde(rename = "LHinf")]
    LHInf,
    #[serde(rename = "PgammaInf")]
    PGammaInf,
}

impl fmt::Display for RegularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegularityClass::LH0 => "LH0",
            RegularityClass::LHInf => "LHinf",
            RegularityClass::PGammaInf => "PgammaInf",
        })
    }
}

/// Outcome of a sample-based regularity check.
///
/// For the pointwise classes (LHinf, PgammaInf) the witness pair is the
/// maximizing sample together with the base point `0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityReport<T> {
    pub class_name: RegularityClass,
    pub constant: T,
    pub witness_pair: Option<(Vec<T>, Vec<T>)>,
    pub cap: T,
    pub passed: bool,
    pub samples: usize,
    pub skipped: usize,
    pub p_inf: Option<T>,
}

impl<T: Real> RegularityReport<T> {
    pub fn verdict(&self) -> String {
        let state = if self.passed { "passed" } else { "failed" };
        format!("{} {state} on {} samples (constant {:.6e}, cap {})", self.class_name, self.samples, self.constant.as_f64(), self.cap)
    }
}

struct Running<T> {
    best: T,
    witness: Option<(Vec<T>, Vec<T>)>,
    count: usize,
}

impl<T: Real> Running<T> {
    fn new() -> Self {
        Running { best: T::zero(), witness: None, count: 0 }
    }

    fn push(&mut self, v: T, x: &[T], y: &[T]) {
        self.count += 1;
        if self.witness.is_none() || v > self.best {
            self.best = v;
            self.witness = Some((x.to_vec(), y.to_vec()));
        }
    }
}

fn check_dim<T: Real>(p: &ExponentFunction<T>, x: &[T]) -> Result<()> {
    if x.len() != p.dim {
        return Err(Error::DimensionMismatch { expected: p.dim, got: x.len() });
    }
    Ok(())
}

/// Local log-Hoelder check on `1/p`: the largest
/// `|1/p(x) - 1/p(y)| ln(e + 1/|x - y|)` over the pairs.
///
/// Coincident pairs are skipped and counted; pairs farther apart than 1/2
/// are rejected.
pub fn check_log_holder_local<T: Real>(p: &ExponentFunction<T>, pairs: &[(Vec<T>, Vec<T>)], cap: T) -> Result<RegularityReport<T>> {
    if pairs.is_empty() {
        return Err(invalid("log-Hoelder check needs at least one pair"));
    }
    let half = T::lit(0.5) * (T::one() + T::lit(4.0) * T::eps());
    let e = T::E();
    let mut run = Running::new();
    let mut skipped = 0;
    for (x, y) in pairs {
        check_dim(p, x)?;
        check_dim(p, y)?;
        let r = dist(x, y);
        if r == T::zero() {
            skipped += 1;
            continue;
        }
        if r > half {
            return Err(invalid(format!("pair distance {r} exceeds 1/2")));
        }
        let v = (p.eval(x).recip() - p.eval(y).recip()).abs() * (e + r.recip()).ln();
        run.push(v, x, y);
    }
    Ok(finish(RegularityClass::LH0, run, cap, skipped, None))
}

/// Log-Hoelder decay at infinity for `1/p` with base point `0`: the largest
/// `|1/p(x) - 1/p_inf| ln(e + |x|)` over the samples.
pub fn check_log_holder_infinity<T: Real>(p: &ExponentFunction<T>, samples: &[Vec<T>], p_inf: Option<T>, cap: T) -> Result<RegularityReport<T>> {
    let p_inf = match p_inf.or(p.p_inf) {
        Some(v) => v,
        None => fit_p_inf(p, samples)?,
    };
    let origin = vec![T::zero(); p.dim];
    let mut run = Running::new();
    for x in samples {
        check_dim(p, x)?;
        let v = (p.eval(x).recip() - p_inf.recip()).abs() * (T::E() + norm(x)).ln();
        run.push(v, x, &origin);
    }
    if run.count == 0 {
        return Err(invalid("LHinf check needs at least one sample"));
    }
    Ok(finish(RegularityClass::LHInf, run, cap, 0, Some(p_inf)))
}

/// Average of `p` over the outermost decile of the samples by radius.
pub fn fit_p_inf<T: Real>(p: &ExponentFunction<T>, samples: &[Vec<T>]) -> Result<T> {
    if samples.is_empty() {
        return Err(invalid("cannot fit p_inf without samples"));
    }
    let mut order: Vec<(T, usize)> = samples.iter().enumerate().map(|(i, x)| (norm(x), i)).collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    let take = samples.len().div_ceil(10);
    let sum: T = order[..take].iter().map(|&(_, i)| p.eval(&samples[i])).sum();
    Ok(sum / T::from_usize_lossy(take))
}

/// Gaussian decay check: the largest `|p(x) - p_inf| |x|^2` over the
/// samples. Without a guess, `p_inf` is fitted on the outermost decile.
pub fn check_p_gamma_inf<T: Real>(p: &ExponentFunction<T>, samples: &[Vec<T>], p_inf_guess: Option<T>, cap: T) -> Result<RegularityReport<T>> {
    if samples.is_empty() {
        return Err(invalid("PgammaInf check needs at least one sample"));
    }
    for x in samples {
        check_dim(p, x)?;
        if norm_sq(x) == T::zero() {
            return Err(invalid("PgammaInf samples must exclude the origin"));
        }
    }
    let p_inf = match p_inf_guess {
        Some(v) => v,
        None => fit_p_inf(p, samples)?,
    };
    let origin = vec![T::zero(); p.dim];
    let mut run = Running::new();
    for x in samples {
        run.push((p.eval(x) - p_inf).abs() * norm_sq(x), x, &origin);
    }
    Ok(finish(RegularityClass::PGammaInf, run, cap, 0, Some(p_inf)))
}

fn finish<T: Real>(class_name: RegularityClass, run: Running<T>, cap: T, skipped: usize, p_inf: Option<T>) -> RegularityReport<T> {
    RegularityReport { class_name, constant: run.best, passed: run.best <= cap, witness_pair: run.witness, cap, samples: run.count, skipped, p_inf }
}

/// Extremes of `e^{-|x|^2 (p(x)/p_inf - 1)}` and of the same quantity for
/// the conjugate exponent, against the bounds implied by the decay constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpEquivalenceReport<T> {
    pub p_inf: T,
    pub c_gamma: T,
    pub min: T,
    pub max: T,
    pub conj_min: T,
    pub conj_max: T,
    /// `e^{C / p_inf}`.
    pub c1: T,
    /// `e^{C / ((p_minus - 1) p_inf)}`, the bound for the conjugate side.
    pub c1_conj: T,
    pub within_bounds: bool,
    pub samples: usize,
}

/// Measures `e^{-|x|^2 (p(x)/p_inf - 1)}` and its conjugate analogue on the
/// samples. `c_gamma` defaults to the constant of [`check_p_gamma_inf`]
/// with the exponent's own `p_inf`.
pub fn check_exp_equivalence<T: Real>(p: &ExponentFunction<T>, samples: &[Vec<T>], c_gamma: Option<T>) -> Result<ExpEquivalenceReport<T>> {
    let p_inf = p.p_inf.ok_or(Error::MissingPInf)?;
    if samples.is_empty() {
        return Err(invalid("exp-equivalence check needs samples"));
    }
    let pc = conjugate(p)?;
    let pc_inf = conjugate_value(p_inf);
    let c = match c_gamma {
        Some(c) => c,
        None => {
            let nonzero: Vec<Vec<T>> = samples.iter().filter(|x| norm_sq(x) > T::zero()).cloned().collect();
            if nonzero.is_empty() {
                T::zero()
            } else {
                check_p_gamma_inf(p, &nonzero, Some(p_inf), T::infinity())?.constant
            }
        }
    };
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    let (mut clo, mut chi) = (T::infinity(), T::neg_infinity());
    for x in samples {
        check_dim(p, x)?;
        let r2 = norm_sq(x);
        let v = (-r2 * (p.eval(x) / p_inf - T::one())).exp();
        let w = (-r2 * (pc.eval(x) / pc_inf - T::one())).exp();
        lo = lo.min(v);
        hi = hi.max(v);
        clo = clo.min(w);
        chi = chi.max(w);
    }
    let c1 = (c / p_inf).exp();
    let c1_conj = (c / ((p.p_minus - T::one()) * p_inf)).exp();
    // p(x) itself carries a rounding error of a few ulps, which the factor
    // |x|^2 amplifies on far samples.
    let r2_max = samples.iter().map(|x| norm_sq(x)).fold(T::zero(), T::max);
    let slack = (T::lit(1e-12) + T::lit(8.0) * T::eps() * r2_max * p.p_plus / p_inf.min(pc_inf)).exp();
    let within_bounds = hi <= c1 * slack && lo * c1 * slack >= T::one() && chi <= c1_conj * slack && clo * c1_conj * slack >= T::one();
    Ok(ExpEquivalenceReport { p_inf, c_gamma: c, min: lo, max: hi, conj_min: clo, conj_max: chi, c1, c1_conj, within_bounds, samples: samples.len() })
}
