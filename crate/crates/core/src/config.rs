//! Problem files.
//!
//! A problem file is TOML with three sections. `[problem]` selects a built-in
//! experiment or describes a custom problem; `[schedule]` and `[solver]` are
//! optional and fall back to the experiment presets.
//!
//! ```toml
//! [problem]
//! kind = "custom"
//! label = "box-constrained pair"
//! a = { kind = "matrix", rows = [[1.0, 0.0], [0.0, 2.0]] }
//! b1 = { kind = "box", lower = [0.0, 0.0], upper = [1.0, 1.0] }
//! b2 = { kind = "whole_space" }
//! f1 = { scale = 2.0 }
//! f2 = { weights = [1.0, 0.5] }
//! big_f = { scale = 1.0 }
//! known_solution = [0.0, 0.0]
//!
//! [schedule]
//! preset = "ex1"
//! rho = 2.5
//!
//! [solver]
//! variant = "forward_backward"
//! tol = 1e-8
//! initial = [1.0, 1.0]
//! ```

use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::experiments::{Case, Experiment, DEFAULT_DIM};
use crate::hilbert::{DenseMatrix, HarmonicShift, LinearOperator, ScaledIdentity, Vector};
use crate::operators::{ConvexSet, IsmMapping, ResolventOperator, StronglyMonotoneMapping};
use crate::problem::{SviParts, SviProblem};
use crate::solver::{AlphaRule, LambdaRule, Schedule, SolverConfig, StopCheck, StopRule, Variant};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub problem: ProblemSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub solver: SolverSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Example1,
    Example2,
    Custom,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub kind: ProblemKind,
    pub dim: Option<usize>,
    pub label: Option<String>,
    pub a: Option<OperatorSpec>,
    pub b1: Option<ResolventSpec>,
    pub b2: Option<ResolventSpec>,
    pub f1: Option<MapSpec>,
    pub f2: Option<MapSpec>,
    pub big_f: Option<MapSpec>,
    pub known_solution: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Matrix {
        rows: Vec<Vec<f64>>,
        adjoint: Option<Vec<Vec<f64>>>,
        norm_sq: Option<f64>,
    },
    ScaledIdentity {
        dim: usize,
        scale: f64,
    },
    HarmonicShift {
        dim: usize,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ResolventSpec {
    ScaledIdentity { c: f64 },
    SoftThreshold,
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    WholeSpace,
}

/// `x ↦ w ∘ x + b`; give either `weights` or a uniform `scale`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub weights: Option<Vec<f64>>,
    pub scale: Option<f64>,
    pub offset: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub preset: Option<String>,
    pub alpha: Option<AlphaRule>,
    pub lambda: Option<LambdaRule>,
    pub rho: Option<f64>,
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub variant: Option<Variant>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub stop_rule: Option<StopRule>,
    pub stop_check: Option<StopCheck>,
    pub moudafi_lambda: Option<f64>,
    pub moudafi_gamma: Option<f64>,
    pub initial: Option<InitialSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Preset(String),
    Point(Vec<f64>),
}

impl InitialSpec {
    pub fn resolve(&self, dim: usize) -> Result<Vector> {
        match self {
            InitialSpec::Preset(name) => Ok(name.parse::<Case>()?.initial_point(dim)),
            InitialSpec::Point(v) => Ok(Vector::from_vec(v.clone())),
        }
    }
}

impl ProblemFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// The built-in experiment this file refers to, if any.
    pub fn experiment(&self) -> Option<Experiment> {
        match self.problem.kind {
            ProblemKind::Example1 => Some(Experiment::One),
            ProblemKind::Example2 => Some(Experiment::Two),
            ProblemKind::Custom => None,
        }
    }

    pub fn build_problem(&self) -> Result<SviProblem> {
        let sec = &self.problem;
        match sec.kind {
            ProblemKind::Example1 => Experiment::One.problem(sec.dim.unwrap_or(DEFAULT_DIM)),
            ProblemKind::Example2 => Experiment::Two.problem(3),
            ProblemKind::Custom => build_custom(sec),
        }
    }

    pub fn build_schedule(&self) -> Result<Schedule> {
        let sec = &self.schedule;
        let mut sched = match sec.preset.as_deref() {
            Some("ex1") => Schedule::example1(),
            Some("ex2") => Schedule::example2(),
            Some(other) => return Err(Error::Config(format!("unknown schedule preset '{other}'"))),
            None => match self.problem.kind {
                ProblemKind::Example2 => Schedule::example2(),
                _ => Schedule::example1(),
            },
        };
        if let Some(a) = sec.alpha {
            sched.alpha = a;
            sched.label = "custom".into();
        }
        if let Some(l) = sec.lambda {
            sched.lambda = l;
            sched.label = "custom".into();
        }
        if let Some(rho) = sec.rho {
            sched.rho = rho;
        }
        if let Some(c) = sec.c {
            sched.c = c;
        }
        Ok(sched)
    }

    pub fn build_solver_config(&self) -> Result<SolverConfig> {
        let sec = &self.solver;
        let variant = sec.variant.unwrap_or(Variant::Regularized);
        let mut cfg = match self.problem.kind {
            ProblemKind::Example2 => SolverConfig::example2(variant),
            _ => SolverConfig::example1(variant),
        };
        if let Some(v) = sec.max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = sec.tol {
            cfg.tol = v;
        }
        if let Some(v) = sec.stop_rule {
            cfg.stop_rule = v;
        }
        if let Some(v) = sec.stop_check {
            cfg.stop_check = v;
        }
        if let Some(v) = sec.moudafi_lambda {
            cfg.moudafi_lambda = v;
        }
        if let Some(v) = sec.moudafi_gamma {
            cfg.moudafi_gamma = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn required<'a, T>(v: &'a Option<T>, name: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Config(format!("custom problem is missing '{name}'")))
}

fn build_operator(spec: &OperatorSpec) -> Result<Arc<dyn LinearOperator>> {
    Ok(match spec {
        OperatorSpec::Matrix { rows, adjoint, norm_sq } => {
            let mut m = DenseMatrix::from_rows(rows)?;
            if let Some(adj) = adjoint {
                m = m.with_adjoint_rows(adj)?;
            }
            if let Some(h) = norm_sq {
                m = m.with_norm_sq_hint(*h)?;
            }
            Arc::new(m)
        }
        OperatorSpec::ScaledIdentity { dim, scale } => Arc::new(ScaledIdentity::new(*dim, *scale)),
        OperatorSpec::HarmonicShift { dim } => Arc::new(HarmonicShift::new(*dim)?),
    })
}

fn build_resolvent(spec: &ResolventSpec, dim: usize) -> Result<ResolventOperator> {
    match spec {
        ResolventSpec::ScaledIdentity { c } => ResolventOperator::scaled_identity(*c, dim),
        ResolventSpec::SoftThreshold => Ok(ResolventOperator::soft_threshold(dim)),
        ResolventSpec::Box { lower, upper } => ResolventOperator::projection(ConvexSet::Box {
            lower: lower.clone().into(),
            upper: upper.clone().into(),
        }),
        ResolventSpec::Ball { center, radius } => ResolventOperator::projection(ConvexSet::Ball {
            center: center.clone().into(),
            radius: *radius,
        }),
        ResolventSpec::WholeSpace => ResolventOperator::projection(ConvexSet::WholeSpace { dim }),
    }
}

fn map_weights(spec: &MapSpec, dim: usize) -> Result<Vec<f64>> {
    match (&spec.weights, spec.scale) {
        (Some(w), None) => Ok(w.clone()),
        (None, Some(s)) => Ok(vec![s; dim]),
        _ => Err(Error::Config("a map needs exactly one of 'weights' or 'scale'".into())),
    }
}

fn build_ism(spec: &MapSpec, dim: usize) -> Result<IsmMapping> {
    let weights = map_weights(spec, dim)?;
    if weights.iter().all(|w| *w == 0.0) && spec.offset.is_none() {
        return Ok(IsmMapping::zero(weights.len()));
    }
    IsmMapping::affine(weights, spec.offset.clone().map(Vector::from_vec))
}

fn build_custom(sec: &ProblemSection) -> Result<SviProblem> {
    let a = build_operator(required(&sec.a, "a")?)?;
    let n1 = a.domain_dim();
    let n2 = a.codomain_dim();
    let big_f_spec = required(&sec.big_f, "big_f")?;
    if big_f_spec.offset.is_some() {
        return Err(Error::Config("big_f does not take an offset".into()));
    }
    SviProblem::new(SviParts {
        b1: build_resolvent(required(&sec.b1, "b1")?, n1)?,
        b2: build_resolvent(required(&sec.b2, "b2")?, n2)?,
        f1: build_ism(required(&sec.f1, "f1")?, n1)?,
        f2: build_ism(required(&sec.f2, "f2")?, n2)?,
        big_f: StronglyMonotoneMapping::diagonal(map_weights(big_f_spec, n1)?)?,
        a,
        known_solution: sec.known_solution.clone().map(Vector::from_vec),
        label: sec.label.clone().unwrap_or_else(|| "custom".into()),
    })
}
