//! Config-driven experiments: norm ratios of the semigroups and potentials
//! over a test suite, strong continuity curves and report emission.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::exponents::{check_log_holder_local, check_p_gamma_inf, ExponentFunction, ExponentSpec, RegularityReport};
use crate::functions::{FunctionSpec, TestFunction};
use crate::hermite::HermiteExpansion;
use crate::quadrature::gauss_hermite_rule;
use crate::sampling::{halton_box, offset_pairs, shell_points};
use crate::scalar::{log_grid, Real};
use crate::subordination::{bessel_multiplier_quadrature, poisson_multiplier_quadrature, SubordinationRule};
use crate::vlp::{luxemburg_from_samples, write_norm_csv, MeasureGrid, MeasureKind, NormResult, NormRow, SampledModular};

pub const SCHEMA: &str = "gvlp-report/1";
pub const HYPOTHESES_UNVERIFIED: &str = "hypotheses unverified";
pub const T_STAR_NOTE: &str = "T* is the maximum of |T_t f| over the configured t-grid, a lower bound for the maximal operator";
pub const CSV_HEADER: [&str; 5] = ["function_id", "operator", "param", "ratio", "verdict"];

/// Declarative experiment description; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub exponent: ExponentSpec,
    pub dim: usize,
    /// `None` selects [`default_suite`].
    pub suite: Option<Vec<FunctionSpec>>,
    pub t_grid: Vec<f64>,
    pub poisson_t: Vec<f64>,
    pub betas: Vec<f64>,
    /// Times for the strong continuity curve, decreasing to 0.
    pub continuity_t: Vec<f64>,
    pub max_degree: usize,
    pub hermite_nodes: usize,
    pub laguerre_nodes: usize,
    pub norm_tol: f64,
    /// Allowed relative drift of a measured constant under refinement.
    pub stability_tol: f64,
    pub contraction_tol: f64,
    /// Cap for the sampled regularity constants.
    pub hypothesis_cap: f64,
    pub k_max: usize,
    pub seed: u64,
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            exponent: ExponentSpec::RationalDecay { p0: 3.0, c: 1.0 },
            dim: 1,
            suite: None,
            t_grid: vec![0.05, 0.3, 1.0, 3.0],
            poisson_t: vec![0.1, 0.5, 1.0, 2.0],
            betas: vec![0.5, 1.0, 2.0, 4.0],
            continuity_t: vec![1.0, 0.3, 0.1, 0.03, 0.01, 1e-3, 1e-4],
            max_degree: 8,
            hermite_nodes: 80,
            laguerre_nodes: 64,
            norm_tol: 1e-10,
            stability_tol: 0.2,
            contraction_tol: 1e-8,
            hypothesis_cap: 10.0,
            k_max: 16,
            seed: 0,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
        Self::from_json(&s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(1..=3).contains(&self.dim) {
            return bad(format!("dimension must be 1, 2 or 3, got {}", self.dim));
        }
        for (name, g) in [("t_grid", &self.t_grid), ("poisson_t", &self.poisson_t), ("betas", &self.betas), ("continuity_t", &self.continuity_t)] {
            if g.is_empty() {
                return bad(format!("{name} must be nonempty"));
            }
            if g.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return bad(format!("{name} entries must be positive and finite"));
            }
        }
        if self.continuity_t.windows(2).any(|w| w[1] >= w[0]) {
            return bad("continuity_t must be strictly decreasing".into());
        }
        if self.hermite_nodes < 2 * self.max_degree + 2 {
            return bad(format!("hermite_nodes = {} cannot resolve degree {}", self.hermite_nodes, self.max_degree));
        }
        if self.laguerre_nodes < 2 {
            return bad("laguerre_nodes must be at least 2".into());
        }
        if !(self.norm_tol > 0.0 && self.norm_tol <= 1e-2) {
            return bad("norm_tol must lie in (0, 1e-2]".into());
        }
        if !(self.stability_tol > 0.0 && self.contraction_tol >= 0.0 && self.hypothesis_cap > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.k_max == 0 {
            return bad("k_max must be positive".into());
        }
        Ok(())
    }

    /// Doubles every quadrature order.
    pub fn refined(&self) -> Self {
        ExperimentConfig { hermite_nodes: 2 * self.hermite_nodes, laguerre_nodes: 2 * self.laguerre_nodes, ..self.clone() }
    }

    pub fn suite_specs(&self) -> Vec<FunctionSpec> {
        self.suite.clone().unwrap_or_else(|| default_suite(self.dim))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

/// Twenty functions: the constant, Hermite elements (eight in `d = 1`,
/// nine otherwise), two Hermite sums, polynomials, three bumps and three
/// ball indicators.
pub fn default_suite(dim: usize) -> Vec<FunctionSpec> {
    let idx = |a: u32, b: u32| -> Vec<u32> {
        let mut v = vec![0; dim];
        v[0] = a;
        if dim > 1 {
            v[1] = b;
        } else {
            v[0] += b;
        }
        v
    };
    let pt = |a: f64, b: f64| -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[0] = a;
        if dim > 1 {
            v[1] = b;
        }
        v
    };
    let hermites: Vec<(u32, u32)> =
        if dim == 1 { (1..=8).map(|k| (k, 0)).collect() } else { vec![(1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (2, 2), (3, 1), (4, 4), (0, 5)] };
    let mut out = vec![FunctionSpec::Constant { c: 1.0 }];
    out.extend(hermites.iter().map(|&(a, b)| FunctionSpec::Hermite { nu: idx(a, b) }));
    out.push(FunctionSpec::HermiteSum { terms: vec![(idx(2, 0), 1.0), (idx(0, 3), 1.0)] });
    out.push(FunctionSpec::HermiteSum { terms: vec![(idx(1, 0), 1.0), (idx(3, 3), -0.5), (idx(0, 0), 0.25)] });
    let quadratic = if dim == 1 { vec![(idx(2, 0), 1.0), (idx(0, 0), 0.5)] } else { vec![(idx(2, 0), 1.0), (idx(0, 2), 1.0)] };
    out.push(FunctionSpec::Polynomial { terms: quadratic });
    out.push(FunctionSpec::Polynomial { terms: vec![(idx(0, 0), 1.0), (idx(1, 1), 1.0)] });
    if dim == 1 {
        out.push(FunctionSpec::Polynomial { terms: vec![(idx(4, 0), 1.0), (idx(1, 0), -1.0)] });
    }
    out.push(FunctionSpec::Bump { center: pt(0.0, 0.0), width: 1.0 });
    out.push(FunctionSpec::Bump { center: pt(1.0, 0.0), width: 0.7 });
    out.push(FunctionSpec::Bump { center: pt(-0.5, 0.5), width: 1.5 });
    out.push(FunctionSpec::Indicator { center: pt(0.0, 0.0), radius: 1.0 });
    out.push(FunctionSpec::Indicator { center: pt(0.5, 0.0), radius: 0.5 });
    out.push(FunctionSpec::Indicator { center: pt(-1.0, 0.5), radius: 1.5 });
    out
}

/// Builds the suite as Hermite truncations of order `max_degree`, so every
/// operator acts exactly through its multiplier.
pub fn build_suite<T: Real>(cfg: &ExperimentConfig) -> Result<Vec<TestFunction<T>>> {
    let rule = gauss_hermite_rule::<T>(cfg.hermite_nodes)?;
    cfg.suite_specs()
        .iter()
        .map(|spec| {
            let f = spec.build(cfg.dim, cfg.max_degree, &rule)?;
            let e = f.expansion().ok_or(Error::MissingExpansion)?;
            let kept = HermiteExpansion::from_coeffs(cfg.dim, e.coeffs().filter(|(nu, _)| nu.order() <= cfg.max_degree).map(|(nu, c)| (nu.clone(), c)))?;
            Ok(TestFunction::from_expansion(spec.id(), kept))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Operator {
    #[serde(rename = "T_t")]
    Ou,
    #[serde(rename = "T*")]
    OuMaximal,
    #[serde(rename = "P_t")]
    Poisson,
    #[serde(rename = "J_beta")]
    Bessel,
}

impl Operator {
    pub fn name(&self) -> &'static str {
        match self {
            Operator::Ou => "T_t",
            Operator::OuMaximal => "T*",
            Operator::Poisson => "P_t",
            Operator::Bessel => "J_beta",
        }
    }

    pub const ALL: [Operator; 4] = [Operator::Ou, Operator::OuMaximal, Operator::Poisson, Operator::Bessel];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub function_id: String,
    pub operator: Operator,
    /// `t` or `beta`; absent for `T*`.
    pub param: Option<f64>,
    pub ratio: f64,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowError {
    pub function_id: String,
    pub error: String,
}

/// Sup of the ratios of one operator over the suite, at the configured
/// orders and at doubled orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorConstant {
    pub operator: Operator,
    pub sup_ratio: f64,
    pub refined_sup_ratio: f64,
    pub relative_change: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Acceptance criterion number, when the verdict tests one.
    pub criterion: Option<u8>,
    pub name: String,
    pub passed: bool,
    /// Informational verdicts do not affect the exit status.
    pub asserted: bool,
    pub measured: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

impl Verdict {
    pub fn new(criterion: Option<u8>, name: impl Into<String>, passed: bool) -> Self {
        Verdict { criterion, name: name.into(), passed, asserted: true, measured: None, threshold: None, detail: String::new() }
    }

    pub fn measured(mut self, value: f64, threshold: f64) -> Self {
        self.measured = Some(finite_or_max(value));
        self.threshold = Some(threshold);
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    pub fn informational(mut self) -> Self {
        self.asserted = false;
        self
    }

    pub fn line(&self) -> String {
        let tag = match self.criterion {
            Some(c) => format!("[{c:>2}] "),
            None => String::new(),
        };
        let state = match (self.passed, self.asserted) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "INFO",
        };
        let m = match (self.measured, self.threshold) {
            (Some(m), Some(t)) => format!(" (measured {m:.3e}, threshold {t:.3e})"),
            _ => String::new(),
        };
        let d = if self.detail.is_empty() { String::new() } else { format!(": {}", self.detail) };
        format!("{state} {tag}{}{m}{d}", self.name)
    }
}

fn finite_or_max(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

/// Results of the hypothesis checks on the exponent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisStatus {
    pub verified: bool,
    pub flag: Option<String>,
    pub log_holder_local: Option<RegularityReport<f64>>,
    pub p_gamma_inf: Option<RegularityReport<f64>>,
    pub details: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub exponent_id: String,
    pub dim: usize,
    pub hermite_nodes: usize,
    pub laguerre_nodes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuityCurve {
    pub function_id: String,
    pub t: Vec<f64>,
    pub deviation: Vec<f64>,
    pub norm_f: f64,
    /// Last deviation over `norm_f`.
    pub final_ratio: f64,
    pub decreasing: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub command: String,
    pub provenance: Provenance,
    pub notes: Vec<String>,
    pub hypotheses: Option<HypothesisStatus>,
    pub rows: Vec<RatioRow>,
    pub row_errors: Vec<RowError>,
    pub constants: Vec<OperatorConstant>,
    pub norm_rows: Vec<NormRow>,
    pub curves: Vec<ContinuityCurve>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    pub fn new(command: &str, cfg: &ExperimentConfig) -> Self {
        ExperimentReport {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            provenance: Provenance {
                config_hash: cfg.hash(),
                seed: cfg.seed,
                exponent_id: cfg.exponent.id(),
                dim: cfg.dim,
                hermite_nodes: cfg.hermite_nodes,
                laguerre_nodes: cfg.laguerre_nodes,
            },
            notes: Vec::new(),
            hypotheses: None,
            rows: Vec::new(),
            row_errors: Vec::new(),
            constants: Vec::new(),
            norm_rows: Vec::new(),
            curves: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    /// True iff every asserted verdict passed.
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().filter(|v| v.asserted).all(|v| v.passed)
    }

    /// Appends the content of another report (rows, curves, verdicts).
    pub fn absorb(&mut self, other: ExperimentReport) {
        self.rows.extend(other.rows);
        self.row_errors.extend(other.row_errors);
        self.constants.extend(other.constants);
        self.norm_rows.extend(other.norm_rows);
        self.curves.extend(other.curves);
        self.verdicts.extend(other.verdicts);
        for n in other.notes {
            if !self.notes.contains(&n) {
                self.notes.push(n);
            }
        }
        if self.hypotheses.is_none() {
            self.hypotheses = other.hypotheses;
        }
    }
}

/// Sample sets for the hypothesis checks: shells on a log-spaced radius
/// grid out to `10^3`, and short offset pairs from a Halton cloud.
pub fn hypothesis_samples<T: Real>(dim: usize, seed: u64) -> (Vec<Vec<T>>, Vec<(Vec<T>, Vec<T>)>) {
    let per_shell = match dim {
        1 => 2,
        2 => 12,
        _ => 24,
    };
    let shells: Vec<Vec<T>> = log_grid(T::lit(0.25), T::lit(1e3), 40).into_iter().flat_map(|r| shell_points(dim, r, per_shell)).collect();
    let base = halton_box(dim, T::lit(4.0), 200, seed);
    let pairs = offset_pairs(&base, &[T::lit(1e-6), T::lit(1e-3), T::lit(0.05), T::lit(0.5)]);
    (shells, pairs)
}

/// Runs the local log-Hoelder and Gaussian decay checks. A failure or an
/// error marks the hypotheses as unverified.
pub fn check_hypotheses(p: &ExponentFunction<f64>, cfg: &ExperimentConfig) -> HypothesisStatus {
    let (shells, pairs) = hypothesis_samples::<f64>(p.dim(), cfg.seed);
    let mut details = Vec::new();
    let lh0 = check_log_holder_local(p, &pairs, cfg.hypothesis_cap);
    let pg = check_p_gamma_inf(p, &shells, p.p_inf(), cfg.hypothesis_cap);
    let mut verified = true;
    let mut keep = |r: Result<RegularityReport<f64>>| match r {
        Ok(rep) => {
            verified &= rep.passed;
            details.push(rep.verdict());
            Some(rep)
        }
        Err(e) => {
            verified = false;
            details.push(e.to_string());
            None
        }
    };
    let log_holder_local = keep(lh0);
    let p_gamma_inf = keep(pg);
    HypothesisStatus { verified, flag: (!verified).then(|| HYPOTHESES_UNVERIFIED.to_string()), log_holder_local, p_gamma_inf, details }
}

/// Per-node degree components of every suite function on a grid.
struct Evaluated<T> {
    id: String,
    /// `comps[node][k]` is `J_k f` at the node.
    comps: Vec<Vec<T>>,
}

impl<T: Real> Evaluated<T> {
    fn new(f: &TestFunction<T>, grid: &MeasureGrid<T>, max_degree: usize) -> Result<Self> {
        let e = f.expansion().ok_or(Error::MissingExpansion)?;
        let comps = grid
            .points()
            .iter()
            .map(|x| {
                let mut c = e.degree_components(x);
                c.resize(max_degree + 1, T::zero());
                c
            })
            .collect();
        Ok(Evaluated { id: f.id().to_string(), comps })
    }

    fn apply(&self, m: &[T]) -> Vec<T> {
        self.comps.iter().map(|c| c.iter().zip(m).map(|(&v, &w)| v * w).sum()).collect()
    }
}

/// Multiplier tables of every (operator, parameter) pair.
struct Multipliers<T> {
    ou: Vec<(f64, Vec<T>)>,
    poisson: Vec<(f64, Vec<T>)>,
    bessel: Vec<(f64, Vec<T>)>,
}

impl<T: Real> Multipliers<T> {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let ks = 0..=cfg.max_degree;
        let ou = cfg.t_grid.iter().map(|&t| (t, ks.clone().map(|k| (-T::lit(t) * T::from_usize_lossy(k)).exp()).collect())).collect();
        let prule = SubordinationRule::<T>::poisson(cfg.laguerre_nodes)?;
        let poisson = cfg.poisson_t.iter().map(|&t| (t, ks.clone().map(|k| poisson_multiplier_quadrature(&prule, T::lit(t), k)).collect())).collect();
        let bessel = cfg
            .betas
            .iter()
            .map(|&b| {
                let rule = SubordinationRule::<T>::bessel(cfg.laguerre_nodes, T::lit(b))?;
                Ok((b, ks.clone().map(|k| bessel_multiplier_quadrature(&rule, T::lit(b), k)).collect()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Multipliers { ou, poisson, bessel })
    }
}

type RawRow = (usize, Operator, Option<f64>, f64);

/// Ratios of one function on one grid.
fn function_rows<T: Real>(idx: usize, ev: &Evaluated<T>, exps: &[T], grid: &MeasureGrid<T>, m: &Multipliers<T>, tol: T) -> Result<Vec<RawRow>> {
    let norm =
        |vals: Vec<T>| -> Result<NormResult<T>> { luxemburg_from_samples(&SampledModular::from_values(vals, exps.to_vec(), grid.weights().to_vec())?, tol) };
    let ones = vec![T::one(); ev.comps.first().map_or(1, Vec::len)];
    let base = norm(ev.apply(&ones))?.norm;
    if !(base > T::zero()) {
        return Err(invalid(format!("{}: zero norm on the grid", ev.id)));
    }
    let mut rows = Vec::new();
    let mut star = vec![T::zero(); ev.comps.len()];
    for (t, mult) in &m.ou {
        let v = ev.apply(mult);
        for (s, &x) in star.iter_mut().zip(&v) {
            *s = s.max(x.abs());
        }
        rows.push((idx, Operator::Ou, Some(*t), (norm(v)?.norm / base).as_f64()));
    }
    rows.push((idx, Operator::OuMaximal, None, (norm(star)?.norm / base).as_f64()));
    for (t, mult) in &m.poisson {
        rows.push((idx, Operator::Poisson, Some(*t), (norm(ev.apply(mult))?.norm / base).as_f64()));
    }
    for (b, mult) in &m.bessel {
        rows.push((idx, Operator::Bessel, Some(*b), (norm(ev.apply(mult))?.norm / base).as_f64()));
    }
    Ok(rows)
}

struct SuiteRun {
    rows: Vec<RawRow>,
    errors: Vec<(usize, String)>,
}

fn run_suite<T: Real>(cfg: &ExperimentConfig, p: &ExponentFunction<T>, suite: &[TestFunction<T>]) -> Result<SuiteRun> {
    let grid = MeasureGrid::<T>::gaussian(cfg.dim, cfg.hermite_nodes)?;
    let exps: Vec<T> = grid.points().iter().map(|x| p.eval(x)).collect();
    let m = Multipliers::new(cfg)?;
    let tol = T::lit(cfg.norm_tol);
    let results: Vec<(usize, Result<Vec<RawRow>>)> = suite
        .par_iter()
        .enumerate()
        .map(|(i, f)| (i, Evaluated::new(f, &grid, cfg.max_degree).and_then(|ev| function_rows(i, &ev, &exps, &grid, &m, tol))))
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (i, r) in results {
        match r {
            Ok(v) => rows.extend(v),
            Err(e) => errors.push((i, e.to_string())),
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.unwrap_or(0.0).total_cmp(&b.2.unwrap_or(0.0))));
    Ok(SuiteRun { rows, errors })
}

fn sup_by_operator(rows: &[RawRow]) -> BTreeMap<Operator, f64> {
    let mut out = BTreeMap::new();
    for &(_, op, _, r) in rows {
        let e = out.entry(op).or_insert(0.0f64);
        *e = e.max(r);
    }
    out
}

/// Norm ratios `||Op f|| / ||f||` over the suite for `T_t`, `T*`, `P_t` and
/// `J_beta`, at the configured orders and at doubled orders.
pub fn run_boundedness_experiment<T: Real>(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut report = ExperimentReport::new("semigroup", cfg);
    report.notes.push(T_STAR_NOTE.to_string());
    let p64 = cfg.exponent.build::<f64>(cfg.dim)?;
    let hyp = check_hypotheses(&p64, cfg);
    let verified = hyp.verified;
    if !verified {
        report.notes.push(format!("{HYPOTHESES_UNVERIFIED}: boundedness verdicts are informational"));
    }
    report.hypotheses = Some(hyp);

    let p = cfg.exponent.build::<T>(cfg.dim)?;
    let suite = build_suite::<T>(cfg)?;
    let specs = cfg.suite_specs();
    let base = run_suite(cfg, &p, &suite)?;
    let refined = run_suite(&cfg.refined(), &p, &suite)?;

    let contraction = matches!(cfg.exponent, ExponentSpec::Constant { p0 } if p0 == 2.0);
    let limit = 1.0 + cfg.contraction_tol;
    let mut all_finite = true;
    let mut worst_contraction = 0.0f64;
    for &(i, op, param, ratio) in &base.rows {
        let finite = ratio.is_finite();
        all_finite &= finite;
        let checks_contraction = contraction && matches!(op, Operator::Ou | Operator::Poisson);
        if checks_contraction {
            worst_contraction = worst_contraction.max(ratio);
        }
        let ok = finite && (!checks_contraction || ratio <= limit);
        report.rows.push(RatioRow {
            function_id: specs[i].id(),
            operator: op,
            param,
            ratio: finite_or_max(ratio),
            verdict: if ok { "pass" } else { "fail" }.to_string(),
        });
    }
    for (i, e) in &base.errors {
        report.row_errors.push(RowError { function_id: specs[*i].id(), error: e.clone() });
    }

    let s0 = sup_by_operator(&base.rows);
    let s1 = sup_by_operator(&refined.rows);
    for op in Operator::ALL {
        if let (Some(&a), Some(&b)) = (s0.get(&op), s1.get(&op)) {
            let change = if a > 0.0 { (b / a - 1.0).abs() } else { f64::INFINITY };
            let stable = change <= cfg.stability_tol;
            report.constants.push(OperatorConstant { operator: op, sup_ratio: a, refined_sup_ratio: b, relative_change: finite_or_max(change), stable });
            let v = Verdict::new(Some(10), format!("{} sup ratio stable under refinement", op.name()), a.is_finite() && stable)
                .measured(change, cfg.stability_tol)
                .detail(format!("sup {a:.6} at base orders, {b:.6} refined"));
            report.verdicts.push(if verified { v } else { v.informational() });
        }
    }
    report.verdicts.push(Verdict::new(Some(10), "all ratios finite", all_finite).detail(format!("{} rows, {} row errors", base.rows.len(), base.errors.len())));
    if contraction {
        report.verdicts.push(Verdict::new(Some(10), "T_t and P_t contract for p = 2", worst_contraction <= limit).measured(worst_contraction, limit));
    }
    Ok(report)
}

/// `||T_t f - f||_{p(.), gamma}` along a decreasing `t` grid, computed
/// through the spectral multipliers `e^{-tk} - 1`.
pub fn strong_continuity_curve<T: Real>(f: &TestFunction<T>, p: &ExponentFunction<T>, t_grid: &[T], grid: &MeasureGrid<T>, tol: T) -> Result<ContinuityCurve> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] >= w[0]) || t_grid.iter().any(|&t| !(t > T::zero())) {
        return Err(invalid("t grid must be positive and strictly decreasing"));
    }
    if grid.kind() != MeasureKind::Gaussian {
        return Err(invalid("strong continuity is measured in the Gaussian norm"));
    }
    let e = f.expansion().ok_or(Error::MissingExpansion)?;
    let ev = Evaluated::new(f, grid, e.max_order())?;
    let exps: Vec<T> = grid.points().iter().map(|x| p.eval(x)).collect();
    let norm =
        |m: Vec<T>| -> Result<T> { Ok(luxemburg_from_samples(&SampledModular::from_values(ev.apply(&m), exps.clone(), grid.weights().to_vec())?, tol)?.norm) };
    let ks = 0..=e.max_order();
    let norm_f = norm(ks.clone().map(|_| T::one()).collect())?;
    let deviation: Vec<T> = t_grid.iter().map(|&t| norm(ks.clone().map(|k| (-t * T::from_usize_lossy(k)).exp_m1()).collect())).collect::<Result<_>>()?;
    let noise = T::lit(1e-6) * norm_f.max(T::one());
    let decreasing = deviation.windows(2).all(|w| w[1] <= w[0] + noise);
    let last = *deviation.last().expect("nonempty grid");
    let final_ratio = if norm_f > T::zero() { last / norm_f } else { T::zero() };
    let passed = decreasing && last <= T::lit(1e-3) * norm_f;
    Ok(ContinuityCurve {
        function_id: f.id().to_string(),
        t: t_grid.iter().map(|t| t.as_f64()).collect(),
        deviation: deviation.iter().map(|d| d.as_f64()).collect(),
        norm_f: norm_f.as_f64(),
        final_ratio: final_ratio.as_f64(),
        decreasing,
        passed,
    })
}

/// Continuity curves of the whole suite.
pub fn run_continuity_experiment<T: Real>(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut report = ExperimentReport::new("semigroup", cfg);
    let p = cfg.exponent.build::<T>(cfg.dim)?;
    let grid = MeasureGrid::<T>::gaussian(cfg.dim, cfg.hermite_nodes)?;
    let ts: Vec<T> = cfg.continuity_t.iter().map(|&t| T::lit(t)).collect();
    let tol = T::lit(cfg.norm_tol);
    let suite = build_suite::<T>(cfg)?;
    let curves: Vec<Result<ContinuityCurve>> = suite.par_iter().map(|f| strong_continuity_curve(f, &p, &ts, &grid, tol)).collect();
    let mut worst = 0.0f64;
    let mut monotone = true;
    for (f, c) in suite.iter().zip(curves) {
        match c {
            Ok(c) => {
                worst = worst.max(c.final_ratio);
                monotone &= c.decreasing;
                report.curves.push(c);
            }
            Err(e) => report.row_errors.push(RowError { function_id: f.id().to_string(), error: e.to_string() }),
        }
    }
    let t_last = cfg.continuity_t.last().copied().unwrap_or(0.0);
    report.verdicts.push(
        Verdict::new(Some(11), format!("||T_t f - f|| < 1e-3 ||f|| at t = {t_last:e}"), worst < 1e-3 && report.row_errors.is_empty()).measured(worst, 1e-3),
    );
    report.verdicts.push(Verdict::new(Some(11), "continuity curves decrease within 1e-6", monotone));
    Ok(report)
}

/// Gaussian Luxemburg norms of the suite.
pub fn run_norms<T: Real>(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut report = ExperimentReport::new("norms", cfg);
    let p = cfg.exponent.build::<T>(cfg.dim)?;
    let grid = MeasureGrid::<T>::gaussian(cfg.dim, cfg.hermite_nodes)?;
    let fine = MeasureGrid::<T>::gaussian(cfg.dim, 2 * cfg.hermite_nodes)?;
    let tol = T::lit(cfg.norm_tol);
    let suite = build_suite::<T>(cfg)?;
    let exp_id = cfg.exponent.id();
    let results: Vec<Result<(NormResult<T>, NormResult<T>)>> = suite
        .par_iter()
        .map(|f| Ok((crate::vlp::luxemburg_norm(|x| f.eval(x), &p, &grid, tol)?, crate::vlp::luxemburg_norm(|x| f.eval(x), &p, &fine, tol)?)))
        .collect();
    let mut ok = true;
    let mut drift = 0.0f64;
    for (f, r) in suite.iter().zip(results) {
        match r {
            Ok((a, b)) => {
                ok &= a.norm.is_finite() && a.modular_at_norm <= T::one();
                if a.norm > T::zero() {
                    drift = drift.max(((b.norm - a.norm) / a.norm).abs().as_f64());
                }
                report.norm_rows.push(NormRow::new(f.id(), &exp_id, MeasureKind::Gaussian, &a));
            }
            Err(e) => {
                ok = false;
                report.row_errors.push(RowError { function_id: f.id().to_string(), error: e.to_string() });
            }
        }
    }
    report.verdicts.push(Verdict::new(Some(6), "norms finite with modular at most 1", ok));
    report.verdicts.push(Verdict::new(None, "norms stable under doubled quadrature", drift <= cfg.stability_tol).measured(drift, cfg.stability_tol));
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Serializes a report. JSON carries everything; CSV carries the ratio
/// table, or the norm table for `norms` reports.
pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv if report.command == "norms" => {
            let mut out = Vec::new();
            write_norm_csv(&report.norm_rows, &mut out)?;
            Ok(out)
        }
        ReportFormat::Csv => {
            let mut wr = csv::Writer::from_writer(Vec::new());
            wr.write_record(CSV_HEADER)?;
            for r in &report.rows {
                let param = r.param.map(|p| p.to_string()).unwrap_or_default();
                wr.write_record([r.function_id.as_str(), r.operator.name(), &param, &r.ratio.to_string(), &r.verdict])?;
            }
            wr.into_inner().map_err(|e| Error::Io { path: "<csv buffer>".into(), source: e.into_error() })
        }
    }
}

/// Writes the rendered report to `path`.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let bytes = render_report(report, format)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
    }
    fs::write(path, bytes).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::MultiIndex;

    fn small() -> ExperimentConfig {
        ExperimentConfig { hermite_nodes: 40, laguerre_nodes: 32, ..Default::default() }
    }

    #[test]
    fn default_suite_has_twenty_members() {
        for d in 1..=3 {
            let s = default_suite(d);
            assert_eq!(s.len(), 20, "d = {d}");
            let ids: std::collections::BTreeSet<_> = s.iter().map(FunctionSpec::id).collect();
            assert_eq!(ids.len(), 20);
            assert!(s.iter().all(|f| f.degree().unwrap_or(0) <= 8));
        }
    }

    #[test]
    fn config_round_trip_and_validation() {
        let cfg = ExperimentConfig::default();
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&s).unwrap(), cfg);
        let partial = ExperimentConfig::from_json(r#"{"dim": 2, "exponent": {"name": "constant", "p0": 2.0}}"#).unwrap();
        assert_eq!(partial.dim, 2);
        assert!(ExperimentConfig::from_json(r#"{"dim": 4}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"t_grid": []}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert_ne!(cfg.hash(), ExperimentConfig { seed: 1, ..cfg.clone() }.hash());
    }

    #[test]
    fn constants_are_fixed_by_every_operator() {
        let cfg = ExperimentConfig { suite: Some(vec![FunctionSpec::Constant { c: 2.0 }]), ..small() };
        let r = run_boundedness_experiment::<f64>(&cfg).unwrap();
        assert_eq!(r.rows.len(), 4 + 1 + 4 + 4);
        for row in &r.rows {
            assert!((row.ratio - 1.0).abs() < 1e-9, "{row:?}");
        }
    }

    #[test]
    fn p2_contracts() {
        let cfg = ExperimentConfig { exponent: ExponentSpec::Constant { p0: 2.0 }, ..small() };
        let r = run_boundedness_experiment::<f64>(&cfg).unwrap();
        assert!(r.hypotheses.as_ref().unwrap().verified);
        for row in r.rows.iter().filter(|r| matches!(r.operator, Operator::Ou | Operator::Poisson)) {
            assert!(row.ratio <= 1.0 + 1e-8, "{row:?}");
        }
        assert!(r.all_passed(), "{:#?}", r.verdicts);
    }

    #[test]
    fn oscillating_exponent_is_flagged() {
        let cfg = ExperimentConfig { exponent: ExponentSpec::Oscillating { p0: 3.0, a: 0.5 }, suite: Some(default_suite(1)[..3].to_vec()), ..small() };
        let r = run_boundedness_experiment::<f64>(&cfg).unwrap();
        let h = r.hypotheses.as_ref().unwrap();
        assert!(!h.verified && h.flag.as_deref() == Some(HYPOTHESES_UNVERIFIED));
        assert!(!r.rows.is_empty() && r.rows.iter().all(|x| x.ratio.is_finite()));
        assert!(r.verdicts.iter().filter(|v| v.name.contains("stable")).all(|v| !v.asserted));
    }

    #[test]
    fn empty_suite_and_determinism() {
        let cfg = ExperimentConfig { suite: Some(vec![]), ..small() };
        let r = run_boundedness_experiment::<f64>(&cfg).unwrap();
        assert!(r.rows.is_empty());
        let csv = String::from_utf8(render_report(&r, ReportFormat::Csv).unwrap()).unwrap();
        assert_eq!(csv.trim(), "function_id,operator,param,ratio,verdict");
        let json: serde_json::Value = serde_json::from_slice(&render_report(&r, ReportFormat::Json).unwrap()).unwrap();
        assert_eq!(json["schema"], SCHEMA);

        let cfg = ExperimentConfig { suite: Some(default_suite(1)[..4].to_vec()), ..small() };
        let a = render_report(&run_boundedness_experiment::<f64>(&cfg).unwrap(), ReportFormat::Json).unwrap();
        let b = render_report(&run_boundedness_experiment::<f64>(&cfg).unwrap(), ReportFormat::Json).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn continuity_examples() {
        let p2 = ExponentFunction::constant(1, 2.0).unwrap();
        let grid = MeasureGrid::gaussian(1, 60).unwrap();
        let ts = [1.0, 0.1, 0.01, 1e-4];
        let h1 = TestFunction::hermite(MultiIndex::new(vec![1]));
        let c = strong_continuity_curve(&h1, &p2, &ts, &grid, 1e-12).unwrap();
        for (t, d) in c.t.iter().zip(&c.deviation) {
            assert!((d - (1.0 - (-t).exp())).abs() < 1e-9);
        }
        assert!(c.passed);
        let one = TestFunction::constant(1, 1.0);
        assert!(strong_continuity_curve(&one, &p2, &ts, &grid, 1e-12).unwrap().deviation.iter().all(|&d| d == 0.0));

        let p3 = ExponentFunction::constant(1, 3.0).unwrap();
        let e = HermiteExpansion::from_coeffs(1, [(MultiIndex::new(vec![2]), 1.0), (MultiIndex::new(vec![5]), 1.0)]).unwrap();
        let f = TestFunction::from_expansion("h2+h5", e);
        let c = strong_continuity_curve(&f, &p3, &[0.01], &grid, 1e-12).unwrap();
        assert!(c.final_ratio < 0.06, "{c:?}");
    }
}
