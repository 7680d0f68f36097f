//! The three iterative schemes and the experiments built on them.
//!
//! * [`Variant::Regularized`]: the Tikhonov-regularized forward-backward step
//!   `z ↦ J_λ^{B1}(z − λ f1 z − λ S z − λ α F z)` with `S = A*(I − T)A` and
//!   `T = J_λ^{B2}(I − λ f2)`. Converges strongly under a vanishing `α_n`.
//! * [`Variant::ForwardBackward`]: the same step with `α = 0`.
//! * [`Variant::Moudafi`]: `z ↦ U(z − γ S z)` with `U = J_λ^{B1}(I − λ f1)`
//!   and fixed `λ`, `γ`.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::problem::{check_lambda, lambda_upper_bound, residual_tol_unchecked, SviProblem, DEFAULT_RHO};

/// Iterates are stored in the trace only up to this dimension.
pub const TRACE_ITERATE_MAX_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Regularized,
    ForwardBackward,
    Moudafi,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Regularized, Variant::ForwardBackward, Variant::Moudafi];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Regularized => "regularized",
            Variant::ForwardBackward => "forward_backward",
            Variant::Moudafi => "moudafi",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "regularized" | "reg" => Ok(Variant::Regularized),
            "forward_backward" | "fb" => Ok(Variant::ForwardBackward),
            "moudafi" => Ok(Variant::Moudafi),
            other => Err(Error::Config(format!("unknown variant '{other}'"))),
        }
    }
}

/// Regularization weights `α_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaRule {
    /// `num / (√(scale·n + inner) + outer)`.
    InvSqrt {
        num: f64,
        scale: f64,
        inner: f64,
        outer: f64,
    },
    /// `coef / n^exponent`.
    Power {
        coef: f64,
        exponent: f64,
    },
    Constant {
        value: f64,
    },
}

impl AlphaRule {
    pub fn at(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            AlphaRule::InvSqrt {
                num,
                scale,
                inner,
                outer,
            } => num / ((scale * n + inner).sqrt() + outer),
            AlphaRule::Power { coef, exponent } => coef / n.powf(exponent),
            AlphaRule::Constant { value } => value,
        }
    }
}

/// Step sizes `λ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaRule {
    /// `n / (slope·n + offset)`.
    Rational {
        slope: f64,
        offset: f64,
    },
    Constant {
        value: f64,
    },
}

impl LambdaRule {
    pub fn at(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            LambdaRule::Rational { slope, offset } => n / (slope * n + offset),
            LambdaRule::Constant { value } => value,
        }
    }
}

/// Parameter sequences for the regularized and forward-backward schemes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub alpha: AlphaRule,
    pub lambda: LambdaRule,
    pub rho: f64,
    /// Lower bound `c` with `0 < c < λ_n`.
    pub c: f64,
    pub label: String,
}

impl Schedule {
    /// `α_n = 3/(√n + 3)`, `λ_n = n/(7n + 3)`.
    pub fn example1() -> Self {
        Schedule {
            alpha: AlphaRule::InvSqrt {
                num: 3.0,
                scale: 1.0,
                inner: 0.0,
                outer: 3.0,
            },
            lambda: LambdaRule::Rational {
                slope: 7.0,
                offset: 3.0,
            },
            rho: DEFAULT_RHO,
            c: 0.05,
            label: "ex1".into(),
        }
    }

    /// `α_n = 0.01/(√(500n + 2) + 2)`, `λ_n = n/(14n + 1)`.
    pub fn example2() -> Self {
        Schedule {
            alpha: AlphaRule::InvSqrt {
                num: 0.01,
                scale: 500.0,
                inner: 2.0,
                outer: 2.0,
            },
            lambda: LambdaRule::Rational {
                slope: 14.0,
                offset: 1.0,
            },
            rho: DEFAULT_RHO,
            c: 0.05,
            label: "ex2".into(),
        }
    }

    pub fn alpha_at(&self, n: usize) -> f64 {
        self.alpha.at(n)
    }

    pub fn lambda_at(&self, n: usize) -> f64 {
        self.lambda.at(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// [`crate::problem::residual_tol`] at the current step size.
    Residual,
    /// [`crate::problem::distance_tol`] against the known solution.
    Distance,
}

/// When the stopping functional is evaluated relative to the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopCheck {
    /// After step `n`, on `z_{n+1}` with `λ_n`; the step that first
    /// satisfies the criterion is counted.
    #[default]
    AfterStep,
    /// Before step `n`, on `z_n` with `λ_n`; only steps actually taken are
    /// counted.
    BeforeStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub variant: Variant,
    pub max_iter: usize,
    pub tol: f64,
    pub stop_rule: StopRule,
    pub moudafi_lambda: f64,
    pub moudafi_gamma: f64,
    #[serde(default)]
    pub stop_check: StopCheck,
}

impl SolverConfig {
    /// Residual stopping at `1e-6`; Moudafi with `λ = γ = 0.1`.
    pub fn example1(variant: Variant) -> Self {
        SolverConfig {
            variant,
            max_iter: 10_000,
            tol: 1e-6,
            stop_rule: StopRule::Residual,
            moudafi_lambda: 0.1,
            moudafi_gamma: 0.1,
            stop_check: StopCheck::AfterStep,
        }
    }

    /// Distance stopping at `1e-4`; Moudafi with `λ = γ = 1/15`.
    pub fn example2(variant: Variant) -> Self {
        SolverConfig {
            variant,
            max_iter: 10_000,
            tol: 1e-4,
            stop_rule: StopRule::Distance,
            moudafi_lambda: 1.0 / 15.0,
            moudafi_gamma: 1.0 / 15.0,
            stop_check: StopCheck::AfterStep,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        if self.variant == Variant::Moudafi && !(self.moudafi_lambda > 0.0 && self.moudafi_gamma > 0.0) {
            return Err(Error::invalid("moudafi lambda and gamma must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub tol_value: f64,
    /// `‖z_{n+1} − z_n‖`.
    pub step_norm: f64,
    /// `None` for the unregularized schemes.
    pub alpha_n: Option<f64>,
    pub lambda_n: f64,
    /// `‖z_{n+1} − x*‖` when a solution is known.
    pub dist_to_known: Option<f64>,
    pub elapsed: Duration,
    /// `z_{n+1}`, kept only for small problems.
    pub iterate: Option<Vector>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    /// `‖z_1 − x*‖` when a solution is known.
    pub initial_dist: Option<f64>,
    pub rows: Vec<TraceRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub final_iterate: Vector,
    pub iterations: usize,
    pub converged: bool,
    /// Value of the stopping functional at the final iterate.
    pub final_tol: f64,
    pub trace: IterationTrace,
    pub warnings: Vec<String>,
}

fn check_iterate(p: &SviProblem, z: &Vector) -> Result<()> {
    Error::check_dim("iterate", p.n1(), z.dim())
}

/// One step of the regularized scheme.
pub fn step_regularized(p: &SviProblem, z: &Vector, lambda: f64, alpha: f64) -> Result<Vector> {
    check_lambda(lambda)?;
    if !(alpha >= 0.0) {
        return Err(Error::invalid(format!("alpha must be nonnegative, got {alpha}")));
    }
    check_iterate(p, z)?;
    Ok(regularized_unchecked(p, z, lambda, alpha))
}

/// One step of the unregularized forward-backward scheme.
pub fn step_forward_backward(p: &SviProblem, z: &Vector, lambda: f64) -> Result<Vector> {
    check_lambda(lambda)?;
    check_iterate(p, z)?;
    Ok(forward_backward_unchecked(p, z, lambda))
}

/// One step of Moudafi's scheme. `γ` outside `(0, 1/‖A‖²)` is accepted; [`run`]
/// reports it as a warning.
pub fn step_moudafi(p: &SviProblem, z: &Vector, lambda: f64, gamma: f64) -> Result<Vector> {
    check_lambda(lambda)?;
    if !(gamma > 0.0) {
        return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
    }
    check_iterate(p, z)?;
    Ok(moudafi_unchecked(p, z, lambda, gamma))
}

fn regularized_unchecked(p: &SviProblem, z: &Vector, lambda: f64, alpha: f64) -> Vector {
    if alpha == 0.0 {
        return forward_backward_unchecked(p, z, lambda);
    }
    let f1 = p.f1().call(z);
    let s = p.split_term_unchecked(lambda, z);
    let ff = p.big_f().call(z);
    let arg = Vector::from_fn(z.dim(), |i| {
        z[i] - lambda * f1[i] - lambda * s[i] - lambda * alpha * ff[i]
    });
    p.b1().eval_unchecked(lambda, &arg)
}

fn forward_backward_unchecked(p: &SviProblem, z: &Vector, lambda: f64) -> Vector {
    let f1 = p.f1().call(z);
    let s = p.split_term_unchecked(lambda, z);
    let arg = Vector::from_fn(z.dim(), |i| z[i] - lambda * f1[i] - lambda * s[i]);
    p.b1().eval_unchecked(lambda, &arg)
}

fn moudafi_unchecked(p: &SviProblem, z: &Vector, lambda: f64, gamma: f64) -> Vector {
    let s = p.split_term_unchecked(lambda, z);
    let w = z.zip_map(&s, |v, si| v - gamma * si);
    let f1 = p.f1().call(&w);
    p.b1().eval_unchecked(lambda, &w.zip_map(&f1, |v, g| v - lambda * g))
}

struct StepParams {
    lambda: f64,
    alpha: Option<f64>,
}

fn params_at(sched: &Schedule, cfg: &SolverConfig, n: usize) -> StepParams {
    match cfg.variant {
        Variant::Regularized => StepParams {
            lambda: sched.lambda_at(n),
            alpha: Some(sched.alpha_at(n)),
        },
        Variant::ForwardBackward => StepParams {
            lambda: sched.lambda_at(n),
            alpha: None,
        },
        Variant::Moudafi => StepParams {
            lambda: cfg.moudafi_lambda,
            alpha: None,
        },
    }
}

/// Iterate the configured scheme from `z1` until the stopping functional drops
/// to `cfg.tol` or `cfg.max_iter` steps have been taken.
pub fn run(p: &SviProblem, sched: &Schedule, cfg: &SolverConfig, z1: &Vector) -> Result<SolveResult> {
    cfg.validate()?;
    check_iterate(p, z1)?;
    let mut warnings = Vec::new();
    if cfg.variant == Variant::Moudafi {
        let limit = 1.0 / p.norm_sq();
        if !(cfg.moudafi_gamma < limit) {
            let msg = format!(
                "gamma = {} lies outside (0, 1/‖A‖²) = (0, {limit}); convergence is not guaranteed",
                cfg.moudafi_gamma
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }

    let known = p.known_solution();
    let stop_value = |lambda: f64, z: &Vector| -> Result<f64> {
        match cfg.stop_rule {
            StopRule::Residual => Ok(residual_tol_unchecked(p, lambda, z)),
            StopRule::Distance => {
                let (xs, ys) = p
                    .known_solution()
                    .zip(p.known_image())
                    .ok_or_else(|| Error::Config("distance stopping needs a known solution".into()))?;
                Ok(z.distance(xs) + p.operator().forward(z).distance(ys))
            }
        }
    };

    let keep_iterates = p.n1() <= TRACE_ITERATE_MAX_DIM;
    let mut trace = IterationTrace {
        initial_dist: known.map(|x| z1.distance(x)),
        rows: Vec::new(),
    };
    let mut z = z1.clone();

    if cfg.stop_check == StopCheck::BeforeStep {
        let first = params_at(sched, cfg, 1);
        let v = stop_value(first.lambda, &z)?;
        if v <= cfg.tol {
            return Ok(SolveResult {
                final_iterate: z,
                iterations: 0,
                converged: true,
                final_tol: v,
                trace,
                warnings,
            });
        }
    }

    let mut final_tol = f64::INFINITY;
    for n in 1..=cfg.max_iter {
        let started = Instant::now();
        let params = params_at(sched, cfg, n);
        check_lambda(params.lambda)?;
        let next = match cfg.variant {
            Variant::Regularized => regularized_unchecked(p, &z, params.lambda, params.alpha.unwrap_or(0.0)),
            Variant::ForwardBackward => forward_backward_unchecked(p, &z, params.lambda),
            Variant::Moudafi => moudafi_unchecked(p, &z, params.lambda, cfg.moudafi_gamma),
        };
        let check_lambda_value = match cfg.stop_check {
            StopCheck::AfterStep => params.lambda,
            StopCheck::BeforeStep => params_at(sched, cfg, n + 1).lambda,
        };
        let tol_value = stop_value(check_lambda_value, &next)?;
        let step_norm = next.distance(&z);
        z = next;
        final_tol = tol_value;
        trace.rows.push(TraceRow {
            n,
            tol_value,
            step_norm,
            alpha_n: params.alpha,
            lambda_n: params.lambda,
            dist_to_known: known.map(|x| z.distance(x)),
            elapsed: started.elapsed(),
            iterate: keep_iterates.then(|| z.clone()),
        });
        if !z.is_finite() {
            warnings.push(format!("iterate became non-finite at step {n}"));
            break;
        }
        if tol_value <= cfg.tol {
            return Ok(SolveResult {
                final_iterate: z,
                iterations: n,
                converged: true,
                final_tol,
                trace,
                warnings,
            });
        }
    }
    let iterations = trace.rows.len();
    Ok(SolveResult {
        final_iterate: z,
        iterations,
        converged: false,
        final_tol,
        trace,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// A per-term violation; the schedule is unusable.
    Hard,
    /// A limit condition judged from its trend over a finite horizon.
    Advisory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleCheck {
    pub name: &'static str,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleReport {
    pub horizon: usize,
    pub lambda_upper: f64,
    pub checks: Vec<ScheduleCheck>,
}

impl ScheduleReport {
    pub fn hard_failed(&self) -> bool {
        self.checks.iter().any(|c| c.kind == CheckKind::Hard && !c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ScheduleCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Minimum share of the partial sum `Σα_n` contributed by the second half of
/// the horizon for the divergence trend to count as "still growing".
const SUM_GROWTH_SHARE: f64 = 0.01;
/// `α_H` must be at most this fraction of `α_{H/2}`.
const ALPHA_DECAY_FACTOR: f64 = 0.9;

/// Check the parameter conditions over `1..=horizon`.
///
/// Per-term conditions (`α_n ∈ (0,1)`, `c < λ_n < (1/ρ)·min(τ̃, 1/‖A‖²)`) are
/// hard checks. `α_n → 0`, `Σα_n = ∞` and `|α_{n+1} − α_n|/α_n² → 0` cannot be
/// decided from finitely many terms and are reported as advisory trends.
pub fn validate_schedule(sched: &Schedule, p: &SviProblem, horizon: usize) -> Result<ScheduleReport> {
    if horizon < 10 {
        return Err(Error::invalid("horizon must be at least 10"));
    }
    let upper = lambda_upper_bound(p, sched.rho)?;
    let alphas: Vec<f64> = (1..=horizon + 1).map(|n| sched.alpha_at(n)).collect();
    let alpha = |n: usize| alphas[n - 1];
    let mut checks = Vec::new();

    let bad_alpha = (1..=horizon).find(|&n| !(alpha(n) > 0.0 && alpha(n) < 1.0));
    checks.push(ScheduleCheck {
        name: "alpha_in_unit_interval",
        kind: CheckKind::Hard,
        passed: bad_alpha.is_none(),
        detail: match bad_alpha {
            Some(n) => format!("alpha_{n} = {} outside (0, 1)", alpha(n)),
            None => format!("0 < alpha_n < 1 for n <= {horizon}"),
        },
    });

    let bad_lambda = (1..=horizon).find(|&n| {
        let l = sched.lambda_at(n);
        !(sched.c > 0.0 && sched.c < l && l < upper)
    });
    checks.push(ScheduleCheck {
        name: "lambda_band",
        kind: CheckKind::Hard,
        passed: bad_lambda.is_none(),
        detail: match bad_lambda {
            Some(n) => format!("lambda_{n} = {} outside ({}, {upper})", sched.lambda_at(n), sched.c),
            None => format!("{} < lambda_n < {upper} for n <= {horizon}", sched.c),
        },
    });

    let half = horizon / 2;
    let a_end = alpha(horizon);
    let a_half = alpha(half);
    checks.push(ScheduleCheck {
        name: "alpha_vanishing",
        kind: CheckKind::Advisory,
        passed: a_end <= ALPHA_DECAY_FACTOR * a_half,
        detail: format!("alpha_{half} = {a_half:e}, alpha_{horizon} = {a_end:e}"),
    });

    let mut partial = 0.0;
    let mut partial_half = 0.0;
    for n in 1..=horizon {
        partial += alpha(n);
        if n == half {
            partial_half = partial;
        }
    }
    let share = (partial - partial_half) / partial;
    checks.push(ScheduleCheck {
        name: "alpha_sum_diverging",
        kind: CheckKind::Advisory,
        passed: share >= SUM_GROWTH_SHARE,
        detail: format!(
            "partial sum {partial:.6}, second half contributes {:.4}%",
            100.0 * share
        ),
    });

    let ratio = |n: usize| (alpha(n + 1) - alpha(n)).abs() / (alpha(n) * alpha(n));
    let early = (horizon / 10).max(1);
    let r_early = ratio(early);
    let r_end = ratio(horizon);
    checks.push(ScheduleCheck {
        name: "ratio_vanishing",
        kind: CheckKind::Advisory,
        passed: r_end == 0.0 || r_end < r_early,
        detail: format!("|Δα|/α² at n={early}: {r_early:e}, at n={horizon}: {r_end:e}"),
    });

    Ok(ScheduleReport {
        horizon,
        lambda_upper: upper,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedAlphaSolution {
    pub point: Vector,
    /// `‖z − step(z)‖` at the last step.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Approximate the unique solution `x_α` of the regularized inclusion
/// `0 ∈ B1 x + f1 x + A*(I − T)A x + α F x` by iterating the regularized step
/// with constant `(λ, α)` from the origin.
pub fn solve_rsvi_fixed_alpha(
    p: &SviProblem,
    alpha: f64,
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FixedAlphaSolution> {
    if !(alpha > 0.0) {
        return Err(Error::invalid("alpha must be positive"));
    }
    check_lambda(lambda)?;
    // closure of the band over all ρ > 2
    let limit = lambda_upper_bound(p, DEFAULT_RHO)? * DEFAULT_RHO / 2.0;
    if !(lambda < limit) {
        return Err(Error::invalid(format!("lambda = {lambda} must be below {limit}")));
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::invalid("need tol > 0 and max_iter >= 1"));
    }
    let mut z = Vector::zeros(p.n1());
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let next = regularized_unchecked(p, &z, lambda, alpha);
        residual = next.distance(&z);
        z = next;
        if residual <= tol {
            return Ok(FixedAlphaSolution {
                point: z,
                residual,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(FixedAlphaSolution {
        point: z,
        residual,
        iterations: max_iter,
        converged: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub alpha: f64,
    pub solution: FixedAlphaSolution,
    pub dist_to_known: Option<f64>,
    /// `‖x_{α_prev} − x_α‖ · α_prev / |α_prev − α|` against the previous
    /// (larger) α.
    pub ratio: Option<f64>,
    /// `‖F(x_α)‖ / γ`.
    pub f_norm_over_gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathReport {
    pub lambda: f64,
    pub points: Vec<PathPoint>,
    /// Largest `‖x_α‖` along the path.
    pub max_norm: f64,
    /// `‖F(x*)‖/γ + ‖x*‖`, the a priori bound on `‖x_α‖`.
    pub norm_bound: Option<f64>,
    /// `‖F(x*)‖/γ`, the a priori bound on `‖x_α − x*‖`.
    pub dist_bound: Option<f64>,
    /// Smallest `M` with `‖x_{α1} − x_{α2}‖ ≤ (|α1 − α2|/α1)·M` over
    /// consecutive pairs.
    pub empirical_m: Option<f64>,
    /// `max ‖F(x_α)‖/γ` over the path, the constant the bound is proved with.
    pub analytic_m: f64,
    pub all_converged: bool,
}

const PATH_MAX_ITER: usize = 200_000;

/// Solve the regularized problem along a strictly decreasing list of `α` and
/// summarize how the solutions move.
pub fn regularization_path(p: &SviProblem, alphas: &[f64], lambda: f64, tol: f64) -> Result<PathReport> {
    if alphas.is_empty() {
        return Err(Error::invalid("need at least one alpha"));
    }
    if alphas.iter().any(|a| !(*a > 0.0)) || alphas.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::invalid("alphas must be positive and strictly decreasing"));
    }
    let gamma = p.big_f().gamma();
    let known = p.known_solution();
    let mut points: Vec<PathPoint> = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let solution = solve_rsvi_fixed_alpha(p, alpha, lambda, tol, PATH_MAX_ITER)?;
        if !solution.converged {
            log::warn!(
                "inner solve for alpha = {alpha} stopped at residual {:e}",
                solution.residual
            );
        }
        let ratio = points
            .last()
            .map(|prev| prev.solution.point.distance(&solution.point) * prev.alpha / (prev.alpha - alpha));
        points.push(PathPoint {
            alpha,
            dist_to_known: known.map(|x| solution.point.distance(x)),
            ratio,
            f_norm_over_gamma: p.big_f().call(&solution.point).norm() / gamma,
            solution,
        });
    }
    let max_norm = points.iter().map(|pt| pt.solution.point.norm()).fold(0.0, f64::max);
    let dist_bound = known.map(|x| p.big_f().call(x).norm() / gamma);
    let norm_bound = known.zip(dist_bound).map(|(x, d)| d + x.norm());
    let empirical_m = points.iter().filter_map(|pt| pt.ratio).reduce(f64::max);
    let analytic_m = points.iter().map(|pt| pt.f_norm_over_gamma).fold(0.0, f64::max);
    let all_converged = points.iter().all(|pt| pt.solution.converged);
    Ok(PathReport {
        lambda,
        points,
        max_norm,
        norm_bound,
        dist_bound,
        empirical_m,
        analytic_m,
        all_converged,
    })
}
