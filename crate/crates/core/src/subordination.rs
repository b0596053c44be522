//! The Poisson-Hermite semigroup `P_t` by subordination of `T_t`, and the
//! Bessel potentials `J_beta` by a Gamma-weighted integral of `P_s`.
//!
//! Both act on the Hermite degree `k` as multipliers: `e^{-t sqrt(k)}` and
//! `(1 + sqrt(k))^{-beta}`. The quadrature paths evaluate the defining
//! integrals with the inner operator applied spectrally, so they test the
//! integral identities themselves.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::functions::TestFunction;
use crate::hermite::HermiteExpansion;
use crate::quadrature::{gauss_jacobi_rule, gauss_laguerre_rule, gauss_legendre_rule};
use crate::scalar::{gamma, Real};

/// Default node count of the Gauss-Laguerre part.
pub const DEFAULT_NODES: usize = 64;
/// Largest node count reached by automatic doubling.
pub const MAX_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubordinationKind {
    /// Plain generalized Gauss-Laguerre.
    Laguerre,
    /// Geometrically graded panels on `[0, a]` plus Gauss-Laguerre on `[a, inf)`.
    Composite,
}

/// Quadrature for `int_0^inf u^alpha e^{-u} g(u) du`.
#[derive(Debug, Clone)]
pub struct SubordinationRule<T> {
    kind: SubordinationKind,
    alpha: T,
    n: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
}

const SPLIT: f64 = 4.0;
const GRADED_PANELS: usize = 16;
const PANEL_NODES: usize = 16;

impl<T: Real> SubordinationRule<T> {
    pub fn laguerre(n: usize, alpha: T) -> Result<Self> {
        let r = gauss_laguerre_rule(n, alpha)?;
        Ok(SubordinationRule { kind: SubordinationKind::Laguerre, alpha, n, nodes: r.nodes().to_vec(), weights: r.weights().to_vec() })
    }

    /// Composite rule: `n` Laguerre nodes on `[a, inf)` with `a = 4`, and on
    /// `[0, a]` a Gauss-Jacobi panel at the origin followed by Gauss-Legendre
    /// panels with breaks `a 2^{-j}`.
    ///
    /// The integrand `e^{-c/u}` of the Poisson subordination is flat near
    /// `u = 0` and turns on at `u ~ c`, which can be far below the smallest
    /// plain Laguerre node; the graded panels resolve every such scale.
    pub fn composite(n: usize, alpha: T) -> Result<Self> {
        if !(alpha > -T::one()) {
            return Err(invalid(format!("alpha must exceed -1, got {alpha}")));
        }
        let a = T::lit(SPLIT);
        let half = T::lit(0.5);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();

        let first = a * T::lit(2.0).powi(-(GRADED_PANELS as i32));
        let jac = gauss_jacobi_rule(PANEL_NODES, T::zero(), alpha)?;
        let scale = (first * half).powf(alpha + T::one());
        for (&x, &w) in jac.nodes().iter().zip(jac.weights()) {
            let u = first * half * (x + T::one());
            nodes.push(u);
            weights.push(scale * w * (-u).exp());
        }
        let leg = gauss_legendre_rule::<T>(PANEL_NODES)?;
        let mut lo = first;
        while lo < a * (T::one() - T::lit(1e-12)) {
            let hi = lo * T::lit(2.0);
            let panel = leg.mapped(lo, hi);
            for (&u, &w) in panel.nodes().iter().zip(panel.weights()) {
                nodes.push(u);
                weights.push(w * u.powf(alpha) * (-u).exp());
            }
            lo = hi;
        }
        let lag = gauss_laguerre_rule(n, T::zero())?;
        let ea = (-a).exp();
        for (&w_node, &w) in lag.nodes().iter().zip(lag.weights()) {
            let u = a + w_node;
            nodes.push(u);
            weights.push(ea * w * u.powf(alpha));
        }
        Ok(SubordinationRule { kind: SubordinationKind::Composite, alpha, n, nodes, weights })
    }

    /// Rule for `P_t`: weight `u^{-1/2} e^{-u}`.
    pub fn poisson(n: usize) -> Result<Self> {
        Self::composite(n, T::lit(-0.5))
    }

    /// Rule for `J_beta`: weight `s^{beta-1} e^{-s}`.
    pub fn bessel(n: usize, beta: T) -> Result<Self> {
        if !(beta > T::zero()) {
            return Err(invalid(format!("beta must be positive, got {beta}")));
        }
        Self::laguerre(n, beta - T::one())
    }

    pub fn kind(&self) -> SubordinationKind {
        self.kind
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Node count of the Laguerre part.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn integrate<F: Fn(T) -> T>(&self, g: F) -> T {
        self.nodes.iter().zip(&self.weights).map(|(&u, &w)| w * g(u)).sum()
    }
}

/// `e^{-t sqrt(k)}`.
pub fn poisson_multiplier<T: Real>(t: T, k: usize) -> T {
    (-t * T::from_usize_lossy(k).sqrt()).exp()
}

/// `(1 + sqrt(k))^{-beta}`.
pub fn bessel_multiplier<T: Real>(beta: T, k: usize) -> T {
    (T::one() + T::from_usize_lossy(k).sqrt()).powf(-beta)
}

/// `pi^{-1/2} int u^{-1/2} e^{-u} e^{-k t^2 / (4u)} du`, by quadrature.
pub fn poisson_multiplier_quadrature<T: Real>(rule: &SubordinationRule<T>, t: T, k: usize) -> T {
    let c = t * t * T::from_usize_lossy(k) / T::lit(4.0);
    rule.integrate(|u| (-c / u).exp()) / T::PI().sqrt()
}

/// `Gamma(beta)^{-1} int s^{beta-1} e^{-s} e^{-s sqrt(k)} ds`, by quadrature.
pub fn bessel_multiplier_quadrature<T: Real>(rule: &SubordinationRule<T>, beta: T, k: usize) -> T {
    let rk = T::from_usize_lossy(k).sqrt();
    rule.integrate(|s| (-s * rk).exp()) / gamma(beta)
}

fn apply_multiplier<T: Real, M: Fn(usize) -> T>(e: &HermiteExpansion<T>, x: &[T], m: M) -> T {
    e.degree_components(x).into_iter().enumerate().map(|(k, v)| m(k) * v).sum()
}

#[derive(Debug, Clone, Copy)]
pub enum SubMode<'a, T> {
    Spectral,
    Quadrature(&'a SubordinationRule<T>),
}

fn expansion_of<'a, T: Real>(f: &'a TestFunction<T>, x: &[T]) -> Result<&'a HermiteExpansion<T>> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    f.expansion().ok_or(Error::MissingExpansion)
}

/// `P_t f(x)`.
pub fn poisson_apply<T: Real>(f: &TestFunction<T>, t: T, x: &[T], mode: SubMode<'_, T>) -> Result<T> {
    if !(t > T::zero()) {
        return Err(invalid(format!("Poisson time must be positive, got {t}")));
    }
    let e = expansion_of(f, x)?;
    Ok(match mode {
        SubMode::Spectral => apply_multiplier(e, x, |k| poisson_multiplier(t, k)),
        SubMode::Quadrature(rule) => apply_multiplier(e, x, |k| poisson_multiplier_quadrature(rule, t, k)),
    })
}

/// `J_beta f(x)`.
pub fn bessel_apply<T: Real>(f: &TestFunction<T>, beta: T, x: &[T], mode: SubMode<'_, T>) -> Result<T> {
    if !(beta > T::zero()) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    let e = expansion_of(f, x)?;
    Ok(match mode {
        SubMode::Spectral => apply_multiplier(e, x, |k| bessel_multiplier(beta, k)),
        SubMode::Quadrature(rule) => apply_multiplier(e, x, |k| bessel_multiplier_quadrature(rule, beta, k)),
    })
}

/// The multiplier `e^{-t sqrt(k)}` applied to an expansion.
pub fn poisson_expansion<T: Real>(e: &HermiteExpansion<T>, t: T) -> HermiteExpansion<T> {
    e.map_degree(|k| poisson_multiplier(t, k))
}

pub fn bessel_expansion<T: Real>(e: &HermiteExpansion<T>, beta: T) -> HermiteExpansion<T> {
    e.map_degree(|k| bessel_multiplier(beta, k))
}

/// Quadrature multiplier with automatic doubling of the Laguerre node count
/// (from `n0` up to [`MAX_NODES`]) while it differs from the exact
/// multiplier by more than `tol` relative. Returns the value and the count
/// used.
pub fn poisson_multiplier_adaptive<T: Real>(t: T, k: usize, n0: usize, tol: T) -> Result<(T, usize)> {
    let exact = poisson_multiplier(t, k);
    let mut n = n0;
    loop {
        let q = poisson_multiplier_quadrature(&SubordinationRule::poisson(n)?, t, k);
        if (q - exact).abs() <= tol * exact.abs() || n >= MAX_NODES {
            return Ok((q, n));
        }
        n = (2 * n).min(MAX_NODES);
    }
}

pub fn bessel_multiplier_adaptive<T: Real>(beta: T, k: usize, n0: usize, tol: T) -> Result<(T, usize)> {
    let exact = bessel_multiplier(beta, k);
    let mut n = n0;
    loop {
        let q = bessel_multiplier_quadrature(&SubordinationRule::bessel(n, beta)?, beta, k);
        if (q - exact).abs() <= tol * exact.abs() || n >= MAX_NODES {
            return Ok((q, n));
        }
        n = (2 * n).min(MAX_NODES);
    }
}
