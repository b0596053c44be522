//! Test functions: a pointwise evaluator plus, when available, a Hermite
//! expansion for the spectral operator paths.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hermite::{expand, HermiteExpansion, MultiIndex};
use crate::quadrature::QuadratureRule;
use crate::scalar::{dist, norm_sq, Real};

type EvalFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

#[derive(Clone)]
pub struct TestFunction<T> {
    id: String,
    dim: usize,
    eval: EvalFn<T>,
    expansion: Option<Arc<HermiteExpansion<T>>>,
}

impl<T: Real> fmt::Debug for TestFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.id)
            .field("dim", &self.dim)
            .field("expansion_terms", &self.expansion.as_ref().map(|e| e.len()))
            .finish()
    }
}

impl<T: Real> TestFunction<T> {
    pub fn new<F>(id: impl Into<String>, dim: usize, eval: F) -> Self
    where
        F: Fn(&[T]) -> T + Send + Sync + 'static,
    {
        TestFunction { id: id.into(), dim, eval: Arc::new(eval), expansion: None }
    }

    /// A function given exactly by a finite expansion.
    pub fn from_expansion(id: impl Into<String>, e: HermiteExpansion<T>) -> Self {
        let e = Arc::new(e);
        let inner = e.clone();
        TestFunction { id: id.into(), dim: e.dim(), eval: Arc::new(move |x| inner.eval(x)), expansion: Some(e) }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        Self::from_expansion(format!("const({c})"), HermiteExpansion::constant(dim, c))
    }

    pub fn hermite(nu: MultiIndex) -> Self {
        Self::from_expansion(format!("h{nu}"), HermiteExpansion::basis(nu))
    }

    /// Attaches an expansion used by the spectral paths. The pointwise
    /// evaluator is left unchanged.
    pub fn with_expansion(mut self, e: HermiteExpansion<T>) -> Self {
        self.expansion = Some(Arc::new(e));
        self
    }

    /// Replaces the function by its Hermite truncation of order `max_order`.
    pub fn truncated(&self, max_order: usize, rule: &QuadratureRule<T>) -> Result<Self> {
        let e = expand(|x| self.eval(x), self.dim, max_order, rule)?;
        Ok(Self::from_expansion(format!("{}|K{max_order}", self.id), e))
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

    pub fn expansion(&self) -> Option<&HermiteExpansion<T>> {
        self.expansion.as_deref()
    }

    /// Whether the evaluator is exactly the attached expansion.
    pub fn is_exact_expansion(&self) -> bool {
        match &self.expansion {
            Some(e) => {
                let probe: Vec<T> = (0..self.dim).map(|i| T::lit(0.37 + 0.11 * i as f64)).collect();
                (e.eval(&probe) - self.eval(&probe)).abs() <= T::lit(1e-12) * (T::one() + e.eval(&probe).abs())
            }
            None => false,
        }
    }
}

/// Catalogue of test functions usable in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Constant {
        c: f64,
    },
    /// A normalized Hermite polynomial.
    Hermite {
        nu: Vec<u32>,
    },
    /// A finite Hermite sum `sum c_nu h_nu`.
    HermiteSum {
        terms: Vec<(Vec<u32>, f64)>,
    },
    /// `sum c x^alpha` over monomials.
    Polynomial {
        terms: Vec<(Vec<u32>, f64)>,
    },
    /// `exp(-|x - center|^2 / width^2)`.
    Bump {
        center: Vec<f64>,
        width: f64,
    },
    /// Indicator of the closed ball `B(center, radius)`.
    Indicator {
        center: Vec<f64>,
        radius: f64,
    },
}

impl FunctionSpec {
    pub fn id(&self) -> String {
        fn idx(v: &[u32]) -> String {
            v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
        }
        fn pt(v: &[f64]) -> String {
            v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            FunctionSpec::Constant { c } => format!("const({c})"),
            FunctionSpec::Hermite { nu } => format!("h({})", idx(nu)),
            FunctionSpec::HermiteSum { terms } => {
                let parts: Vec<String> = terms.iter().map(|(nu, c)| format!("{c}*h({})", idx(nu))).collect();
                format!("hsum[{}]", parts.join("+"))
            }
            FunctionSpec::Polynomial { terms } => {
                let parts: Vec<String> = terms.iter().map(|(a, c)| format!("{c}*x^({})", idx(a))).collect();
                format!("poly[{}]", parts.join("+"))
            }
            FunctionSpec::Bump { center, width } => format!("bump({};{width})", pt(center)),
            FunctionSpec::Indicator { center, radius } => format!("ind({};{radius})", pt(center)),
        }
    }

    /// Polynomial degree, or `None` for non-polynomial members.
    pub fn degree(&self) -> Option<usize> {
        let deg = |v: &[u32]| v.iter().map(|&e| e as usize).sum::<usize>();
        match self {
            FunctionSpec::Constant { .. } => Some(0),
            FunctionSpec::Hermite { nu } => Some(deg(nu)),
            FunctionSpec::HermiteSum { terms } | FunctionSpec::Polynomial { terms } => Some(terms.iter().map(|(a, _)| deg(a)).max().unwrap_or(0)),
            _ => None,
        }
    }

    fn check_len(&self, len: usize, dim: usize) -> Result<()> {
        if len != dim {
            return Err(invalid(format!("{}: expected {dim} coordinates, got {len}", self.id())));
        }
        Ok(())
    }

    /// Builds the function. Polynomial members carry their exact expansion
    /// (computed with `rule`, which must be exact to twice their degree);
    /// bumps and indicators carry the order-`max_order` truncation.
    pub fn build<T: Real>(&self, dim: usize, max_order: usize, rule: &QuadratureRule<T>) -> Result<TestFunction<T>> {
        let id = self.id();
        match self {
            FunctionSpec::Constant { c } => Ok(TestFunction::constant(dim, T::lit(*c))),
            FunctionSpec::Hermite { nu } => {
                self.check_len(nu.len(), dim)?;
                Ok(TestFunction::from_expansion(id, HermiteExpansion::basis(MultiIndex::new(nu.clone()))))
            }
            FunctionSpec::HermiteSum { terms } => {
                for (nu, _) in terms {
                    self.check_len(nu.len(), dim)?;
                }
                let e = HermiteExpansion::from_coeffs(dim, terms.iter().map(|(nu, c)| (MultiIndex::new(nu.clone()), T::lit(*c))))?;
                Ok(TestFunction::from_expansion(id, e))
            }
            FunctionSpec::Polynomial { terms } => {
                for (a, _) in terms {
                    self.check_len(a.len(), dim)?;
                }
                let terms: Vec<(Vec<u32>, T)> = terms.iter().map(|(a, c)| (a.clone(), T::lit(*c))).collect();
                let deg = self.degree().unwrap_or(0);
                let f =
                    move |x: &[T]| terms.iter().fold(T::zero(), |acc, (a, c)| acc + *c * a.iter().zip(x).fold(T::one(), |m, (&e, &xi)| m * xi.powi(e as i32)));
                let e = expand(&f, dim, deg, rule)?;
                Ok(TestFunction::new(id, dim, f).with_expansion(e))
            }
            FunctionSpec::Bump { center, width } => {
                self.check_len(center.len(), dim)?;
                if !(*width > 0.0) {
                    return Err(invalid("bump width must be positive"));
                }
                let c: Vec<T> = center.iter().map(|&v| T::lit(v)).collect();
                let w2 = T::lit(width * width);
                let f = move |x: &[T]| {
                    let d2 = x.iter().zip(&c).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
                    (-d2 / w2).exp()
                };
                let e = expand(&f, dim, max_order, rule)?;
                Ok(TestFunction::new(id, dim, f).with_expansion(e))
            }
            FunctionSpec::Indicator { center, radius } => {
                self.check_len(center.len(), dim)?;
                if !(*radius > 0.0) {
                    return Err(invalid("indicator radius must be positive"));
                }
                let c: Vec<T> = center.iter().map(|&v| T::lit(v)).collect();
                let r = T::lit(*radius);
                let f = move |x: &[T]| if dist(x, &c) <= r { T::one() } else { T::zero() };
                let e = expand(&f, dim, max_order, rule)?;
                Ok(TestFunction::new(id, dim, f).with_expansion(e))
            }
        }
    }
}

/// `|x|^2`, handy as a non-negative polynomial.
pub fn radial_square<T: Real>(dim: usize) -> TestFunction<T> {
    let terms: Vec<(MultiIndex, T)> = (0..dim)
        .map(|i| {
            let mut two = vec![0u32; dim];
            two[i] = 2;
            // x_i^2 = 1/2 + h_2(x_i) / sqrt(2)
            (MultiIndex::new(two), T::one() / T::SQRT_2())
        })
        .chain(std::iter::once((MultiIndex::zero(dim), T::lit(0.5) * T::from_usize_lossy(dim))))
        .collect();
    let e = HermiteExpansion::from_coeffs(dim, terms).expect("consistent dimension");
    TestFunction::new("|x|^2", dim, norm_sq::<T>).with_expansion(e)
}
