//! Gaussian harmonic analysis in variable-exponent Lebesgue spaces.
//!
//! The Ornstein-Uhlenbeck semigroup, the Poisson-Hermite semigroup and the
//! Gaussian Bessel potentials, evaluated spectrally on Hermite expansions
//! and by quadrature, together with Luxemburg norms for the Gaussian
//! measure and sample-based checks of the inequalities relating them.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`, which every tolerance in the harness assumes.

// `!(a <= b)` is used deliberately so that NaN lands on the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod covering;
pub mod error;
pub mod exponents;
pub mod functions;
pub mod harness;
pub mod hermite;
pub mod quadrature;
pub mod sampling;
pub mod scalar;
pub mod semigroup;
pub mod subordination;
pub mod verify;
pub mod vlp;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Ball = covering::Ball<f64>;
pub type CoveringFamily = covering::CoveringFamily<f64>;
pub type ExponentFunction = exponents::ExponentFunction<f64>;
pub type HermiteExpansion = hermite::HermiteExpansion<f64>;
pub type MeasureGrid = vlp::MeasureGrid<f64>;
pub type NormResult = vlp::NormResult<f64>;
pub type OuTime = semigroup::OuTime<f64>;
pub type PolarRule = quadrature::PolarRule<f64>;
pub type QuadratureRule = quadrature::QuadratureRule<f64>;
pub type SubordinationRule = subordination::SubordinationRule<f64>;
pub type TestFunction = functions::TestFunction<f64>;

pub type ExponentFunctionF32 = exponents::ExponentFunction<f32>;
pub type HermiteExpansionF32 = hermite::HermiteExpansion<f32>;
pub type QuadratureRuleF32 = quadrature::QuadratureRule<f32>;
