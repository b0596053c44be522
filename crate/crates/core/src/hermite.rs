//! Normalized Hermite polynomials, expansions in the orthonormal basis of
//! `L^2(gamma_d)`, and the degree projections `J_k`.
//!
//! `h_n = H_n / sqrt(2^n n!)` with `H_n` the physicists' polynomials, so
//! `<h_mu, h_nu>_{gamma_d} = delta_{mu nu}` for
//! `gamma_d = pi^{-d/2} e^{-|x|^2} dx`. Values come from the normalized
//! recurrence `h_{n+1} = (sqrt(2) x h_n - sqrt(n) h_{n-1}) / sqrt(n+1)`,
//! which never forms a factorial.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{QuadratureRule, RuleKind};
use crate::scalar::Real;

/// Coefficients at or below this magnitude are not stored.
pub const ZERO_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|nu| = sum_i nu_i`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&v| v as usize).sum()
    }

    /// All indices of exactly order `k` in `dim` variables.
    pub fn of_order(dim: usize, k: usize) -> Vec<MultiIndex> {
        fn rec(dim: usize, k: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == dim {
                prefix.push(k as u32);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for first in (0..=k).rev() {
                prefix.push(first as u32);
                rec(dim, k - first, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if dim > 0 {
            rec(dim, k, &mut Vec::with_capacity(dim), &mut out);
        }
        out
    }

    /// All indices with `|nu| <= max_order`, graded by order.
    pub fn up_to(dim: usize, max_order: usize) -> Vec<MultiIndex> {
        (0..=max_order).flat_map(|k| Self::of_order(dim, k)).collect()
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// `[h_0(x), ..., h_n(x)]`.
pub fn hermite_table<T: Real>(n: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::one());
    if n == 0 {
        return out;
    }
    let sqrt2 = T::SQRT_2();
    out.push(sqrt2 * x);
    for k in 1..n {
        let kf = T::from_usize_lossy(k);
        let next = (sqrt2 * x * out[k] - kf.sqrt() * out[k - 1]) / (kf + T::one()).sqrt();
        out.push(next);
    }
    out
}

/// One-variable normalized Hermite polynomial `h_n(x)`.
pub fn hermite_normalized_1d<T: Real>(n: usize, x: T) -> T {
    hermite_table(n, x)[n]
}

/// `h_nu(x) = prod_i h_{nu_i}(x_i)`.
pub fn hermite_normalized_eval<T: Real>(nu: &MultiIndex, x: &[T]) -> T {
    nu.0.iter().zip(x).fold(T::one(), |acc, (&n, &xi)| acc * hermite_normalized_1d(n as usize, xi))
}

/// Finite expansion `f = sum_nu c_nu h_nu`. Absent indices are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteExpansion<T> {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, T>,
}

impl<T: Real> HermiteExpansion<T> {
    pub fn zero(dim: usize) -> Self {
        HermiteExpansion { dim, coeffs: BTreeMap::new() }
    }

    /// The basis element `h_nu`.
    pub fn basis(nu: MultiIndex) -> Self {
        let mut e = Self::zero(nu.dim());
        e.coeffs.insert(nu, T::one());
        e
    }

    /// The constant function `c`.
    pub fn constant(dim: usize, c: T) -> Self {
        let mut e = Self::zero(dim);
        e.set(MultiIndex::zero(dim), c);
        e
    }

    pub fn from_coeffs<I: IntoIterator<Item = (MultiIndex, T)>>(dim: usize, items: I) -> Result<Self> {
        let mut e = Self::zero(dim);
        for (nu, c) in items {
            if nu.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: nu.dim() });
            }
            let prev = e.get(&nu);
            e.set(nu, prev + c);
        }
        Ok(e)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, nu: &MultiIndex) -> T {
        self.coeffs.get(nu).copied().unwrap_or_else(T::zero)
    }

    /// Sets a coefficient, dropping it when `|c| <= ZERO_TOL`.
    pub fn set(&mut self, nu: MultiIndex, c: T) {
        if c.abs() <= T::lit(ZERO_TOL) {
            self.coeffs.remove(&nu);
        } else {
            self.coeffs.insert(nu, c);
        }
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&MultiIndex, T)> {
        self.coeffs.iter().map(|(k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|nu|` present (0 for the zero expansion).
    pub fn max_order(&self) -> usize {
        self.coeffs.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// `J_k f`: keep exactly the coefficients of order `k`.
    pub fn project_degree(&self, k: usize) -> Self {
        HermiteExpansion { dim: self.dim, coeffs: self.coeffs.iter().filter(|(nu, _)| nu.order() == k).map(|(nu, &c)| (nu.clone(), c)).collect() }
    }

    /// Multiply every `J_k` block by `m(k)`.
    pub fn map_degree<M: Fn(usize) -> T>(&self, m: M) -> Self {
        let mut out = Self::zero(self.dim);
        for (nu, &c) in &self.coeffs {
            out.set(nu.clone(), c * m(nu.order()));
        }
        out
    }

    pub fn scale(&self, a: T) -> Self {
        self.map_degree(|_| a)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, T::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -T::one())
    }

    fn combine(&self, other: &Self, sign: T) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut out = self.clone();
        for (nu, &c) in &other.coeffs {
            let v = out.get(nu) + sign * c;
            out.set(nu.clone(), v);
        }
        Ok(out)
    }

    /// `sum_nu c_nu h_nu(x)`.
    pub fn eval(&self, x: &[T]) -> T {
        let tables = self.tables(x);
        self.coeffs.iter().map(|(nu, &c)| c * product_from_tables(&tables, nu)).sum()
    }

    /// `[(J_0 f)(x), ..., (J_K f)(x)]` with `K = max_order`. Any degree
    /// multiplier `sum_k m(k) (J_k f)(x)` is a dot product with this vector.
    pub fn degree_components(&self, x: &[T]) -> Vec<T> {
        let tables = self.tables(x);
        let mut out = vec![T::zero(); self.max_order() + 1];
        for (nu, &c) in &self.coeffs {
            out[nu.order()] = out[nu.order()] + c * product_from_tables(&tables, nu);
        }
        out
    }

    /// `||f||_{L^2(gamma_d)}^2 = sum c_nu^2` (Parseval).
    pub fn l2_norm_sq(&self) -> T {
        self.coeffs.values().map(|&c| c * c).sum()
    }

    /// Largest coefficientwise difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for (nu, &c) in &self.coeffs {
            m = m.max((c - other.get(nu)).abs());
        }
        for (nu, &c) in &other.coeffs {
            if !self.coeffs.contains_key(nu) {
                m = m.max(c.abs());
            }
        }
        m
    }

    fn tables(&self, x: &[T]) -> Vec<Vec<T>> {
        let mut maxes = vec![0usize; self.dim];
        for nu in self.coeffs.keys() {
            for (m, &v) in maxes.iter_mut().zip(&nu.0) {
                *m = (*m).max(v as usize);
            }
        }
        maxes.iter().zip(x).map(|(&n, &xi)| hermite_table(n, xi)).collect()
    }

    pub fn to_record(&self) -> ExpansionRecord {
        ExpansionRecord { dim: self.dim, coeffs: self.coeffs.iter().map(|(nu, &c)| CoeffRecord { nu: nu.0.clone(), c: c.as_f64() }).collect() }
    }

    pub fn from_record(rec: &ExpansionRecord) -> Result<Self> {
        Self::from_coeffs(rec.dim, rec.coeffs.iter().map(|c| (MultiIndex(c.nu.clone()), T::lit(c.c))))
    }

    /// `{"dim": d, "coeffs": [{"nu": [..], "c": r}, ...]}`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_record(&serde_json::from_str(s)?)
    }
}

fn product_from_tables<T: Real>(tables: &[Vec<T>], nu: &MultiIndex) -> T {
    nu.0.iter().zip(tables).fold(T::one(), |acc, (&n, t)| acc * t[n as usize])
}

/// Interchange form of an expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRecord {
    pub dim: usize,
    pub coeffs: Vec<CoeffRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffRecord {
    pub nu: Vec<u32>,
    pub c: f64,
}

/// Coefficients `<f, h_nu>_{gamma_d}` for every `|nu| <= max_order`, computed
/// with the tensor Gauss-Hermite `rule`.
pub fn expand<T: Real, F>(f: F, dim: usize, max_order: usize, rule: &QuadratureRule<T>) -> Result<HermiteExpansion<T>>
where
    F: Fn(&[T]) -> T,
{
    if rule.kind() != RuleKind::GaussHermite {
        return Err(invalid("expand needs a Gauss-Hermite rule"));
    }
    if dim == 0 {
        return Err(invalid("dimension must be positive"));
    }
    let n = rule.order();
    let tables: Vec<Vec<T>> = rule.nodes().iter().map(|&x| hermite_table(max_order, x)).collect();
    // f * weight on the tensor grid, keyed by the per-axis node indices
    let mut samples: Vec<(Vec<usize>, T)> = Vec::with_capacity(n.pow(dim as u32));
    let mut idx = vec![0usize; dim];
    let mut x = vec![T::zero(); dim];
    'grid: loop {
        let mut w = T::one();
        for k in 0..dim {
            x[k] = rule.nodes()[idx[k]];
            w = w * rule.weights()[idx[k]];
        }
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::NonFinite { node: x.iter().map(|c| c.as_f64()).collect(), value: v.as_f64() });
        }
        samples.push((idx.clone(), v * w));
        for i in idx.iter_mut() {
            *i += 1;
            if *i < n {
                continue 'grid;
            }
            *i = 0;
        }
        break;
    }

    let norm = T::PI().powf(-T::from_usize_lossy(dim) / T::lit(2.0));
    let mut e = HermiteExpansion::zero(dim);
    for nu in MultiIndex::up_to(dim, max_order) {
        let c: T = samples
            .iter()
            .map(|(idx, fw)| {
                let basis = idx.iter().zip(nu.entries()).fold(T::one(), |acc, (&i, &k)| acc * tables[i][k as usize]);
                *fw * basis
            })
            .sum();
        e.set(nu, c * norm);
    }
    Ok(e)
}
