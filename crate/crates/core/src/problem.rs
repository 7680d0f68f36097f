//! Split variational inclusion problems.
//!
//! Find `x ∈ H1` with `0 ∈ B1(x) + f1(x)` such that `y = Ax` satisfies
//! `0 ∈ B2(y) + f2(y)`. The split convex minimization and split variational
//! inequality problems are special cases built by [`scmp_to_svi`] and
//! [`svip_to_svi`]. Two fully specified instances ship with the crate:
//! [`build_example1`] and [`build_example2`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hilbert::{estimate_norm_sq, HarmonicShift, LinearOperator, ScaledIdentity, Vector};
use crate::operators::{ConvexSet, IsmMapping, ResolventOperator, StronglyMonotoneMapping};
use crate::oracle::finite_diff_grad_check;

/// Threshold for the known-solution feasibility self-check.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Default `ρ` in the step-size band `λ < (1/ρ)·min(τ̃, 1/‖A‖²)`.
pub const DEFAULT_RHO: f64 = 2.5;

const NORM_MAX_ITERS: usize = 10_000;
const NORM_TOL: f64 = 1e-13;

pub type ObjectiveFn = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;

/// Raw problem data, validated by [`SviProblem::new`].
#[derive(Debug, Clone)]
pub struct SviParts {
    pub b1: ResolventOperator,
    pub b2: ResolventOperator,
    pub f1: IsmMapping,
    pub f2: IsmMapping,
    pub a: Arc<dyn LinearOperator>,
    pub big_f: StronglyMonotoneMapping,
    pub known_solution: Option<Vector>,
    pub label: String,
}

/// A validated split variational inclusion problem together with the
/// strongly monotone `F` that selects among its solutions.
#[derive(Clone)]
pub struct SviProblem {
    parts: SviParts,
    norm_sq: f64,
    known_image: Option<Vector>,
}

impl fmt::Debug for SviProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SviProblem")
            .field("label", &self.parts.label)
            .field("n1", &self.n1())
            .field("n2", &self.n2())
            .field("norm_sq", &self.norm_sq)
            .field("known_solution", &self.parts.known_solution)
            .finish()
    }
}

impl SviProblem {
    pub fn new(parts: SviParts) -> Result<Self> {
        let n1 = parts.a.domain_dim();
        let n2 = parts.a.codomain_dim();
        Error::check_dim("B1 dimension", n1, parts.b1.dim())?;
        Error::check_dim("f1 dimension", n1, parts.f1.dim())?;
        Error::check_dim("F dimension", n1, parts.big_f.dim())?;
        Error::check_dim("B2 dimension", n2, parts.b2.dim())?;
        Error::check_dim("f2 dimension", n2, parts.f2.dim())?;
        let tau_tilde = parts.f1.tau().min(parts.f2.tau());
        if !(tau_tilde > 0.0) {
            return Err(Error::invalid("ism moduli must be positive"));
        }

        let est = estimate_norm_sq(parts.a.as_ref(), NORM_MAX_ITERS, NORM_TOL)?;
        if !est.converged {
            log::warn!(
                "power iteration for ‖A‖² did not converge in {} iterations; using {}",
                est.iterations,
                est.value
            );
        }

        let known_image = match &parts.known_solution {
            Some(x) => Some(parts.a.apply(x)?),
            None => None,
        };
        let problem = SviProblem {
            parts,
            norm_sq: est.value,
            known_image,
        };
        if let Some(x) = &problem.parts.known_solution {
            // at λ = 1 the stopping functional is exactly the fixed-point
            // characterization of a solution
            let r = residual_tol(&problem, 1.0, x)?;
            if !(r < FEASIBILITY_TOL) {
                return Err(Error::invalid(format!(
                    "known solution of '{}' is infeasible: residual {r:e}",
                    problem.parts.label
                )));
            }
        }
        Ok(problem)
    }

    pub fn n1(&self) -> usize {
        self.parts.a.domain_dim()
    }
    pub fn n2(&self) -> usize {
        self.parts.a.codomain_dim()
    }
    pub fn b1(&self) -> &ResolventOperator {
        &self.parts.b1
    }
    pub fn b2(&self) -> &ResolventOperator {
        &self.parts.b2
    }
    pub fn f1(&self) -> &IsmMapping {
        &self.parts.f1
    }
    pub fn f2(&self) -> &IsmMapping {
        &self.parts.f2
    }
    pub fn operator(&self) -> &dyn LinearOperator {
        self.parts.a.as_ref()
    }
    pub fn big_f(&self) -> &StronglyMonotoneMapping {
        &self.parts.big_f
    }
    pub fn known_solution(&self) -> Option<&Vector> {
        self.parts.known_solution.as_ref()
    }
    /// `A x*` for the known solution, if any.
    pub fn known_image(&self) -> Option<&Vector> {
        self.known_image.as_ref()
    }
    pub fn label(&self) -> &str {
        &self.parts.label
    }
    pub fn parts(&self) -> &SviParts {
        &self.parts
    }
    /// `‖A‖²`, from the operator's hint or power iteration.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }
    /// `τ̃ = min(τ1, τ2)`.
    pub fn tau_tilde(&self) -> f64 {
        self.parts.f1.tau().min(self.parts.f2.tau())
    }

    /// `T(y) = J_λ^{B2}(y − λ f2(y))`.
    pub(crate) fn lower_map(&self, lambda: f64, y: &Vector) -> Vector {
        let fy = self.parts.f2.call(y);
        self.parts
            .b2
            .eval_unchecked(lambda, &y.zip_map(&fy, |v, g| v - lambda * g))
    }

    /// `S z = A*(I − T)A z`, the coupling term shared by all three schemes.
    pub(crate) fn split_term_unchecked(&self, lambda: f64, z: &Vector) -> Vector {
        let az = self.parts.a.forward(z);
        let taz = self.lower_map(lambda, &az);
        self.parts.a.adjoint(&(&az - &taz))
    }

    /// Checked form of `A*(I − T)A z`.
    pub fn split_term(&self, lambda: f64, z: &Vector) -> Result<Vector> {
        check_lambda(lambda)?;
        Error::check_dim("split term", self.n1(), z.dim())?;
        Ok(self.split_term_unchecked(lambda, z))
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("step size must be positive, got {lambda}")))
    }
}

/// Residual stopping functional
/// `‖z − J_λ^{B1}(z − f1 z)‖ + ‖Az − J_λ^{B2}(Az − f2(Az))‖`.
///
/// `f1` and `f2` are deliberately not multiplied by `λ` inside the resolvent
/// arguments; iteration counts of the reference experiments depend on it.
pub fn residual_tol(p: &SviProblem, lambda: f64, z: &Vector) -> Result<f64> {
    check_lambda(lambda)?;
    Error::check_dim("residual_tol", p.n1(), z.dim())?;
    Ok(residual_tol_unchecked(p, lambda, z))
}

pub(crate) fn residual_tol_unchecked(p: &SviProblem, lambda: f64, z: &Vector) -> f64 {
    let upper = p.b1().eval_unchecked(lambda, &(z - &p.f1().call(z)));
    let az = p.operator().forward(z);
    let lower = p.b2().eval_unchecked(lambda, &(&az - &p.f2().call(&az)));
    z.distance(&upper) + az.distance(&lower)
}

/// `‖z − x*‖ + ‖Az − y*‖`.
pub fn distance_tol(z: &Vector, x_star: &Vector, a: &dyn LinearOperator, y_star: &Vector) -> Result<f64> {
    Error::check_dim("distance_tol x*", z.dim(), x_star.dim())?;
    Error::check_dim("distance_tol y*", a.codomain_dim(), y_star.dim())?;
    let az = a.apply(z)?;
    Ok(z.distance(x_star) + az.distance(y_star))
}

/// `(1/ρ)·min(τ̃, 1/‖A‖²)`; requires `ρ > 2`.
pub fn lambda_upper_bound(p: &SviProblem, rho: f64) -> Result<f64> {
    if !(rho > 2.0) {
        return Err(Error::invalid(format!("rho must exceed 2, got {rho}")));
    }
    let inv_norm = if p.norm_sq() > 0.0 {
        1.0 / p.norm_sq()
    } else {
        f64::INFINITY
    };
    let bound = p.tau_tilde().min(inv_norm) / rho;
    if bound.is_finite() {
        Ok(bound)
    } else {
        Err(Error::invalid(
            "step-size bound is unbounded: zero operator and zero maps",
        ))
    }
}

/// Split convex minimization: minimize `e1 + e2` over `H1` such that `Ax`
/// minimizes `g1 + g2` over `H2`, where `e1`, `g1` are handled by their
/// proximal maps and `e2`, `g2` by their gradients.
#[derive(Clone)]
pub struct ScmpSpec {
    pub prox_e1: ResolventOperator,
    pub prox_g1: ResolventOperator,
    /// `∇e2`, with modulus `1/L1`.
    pub grad_e2: IsmMapping,
    /// `∇g2`, with modulus `1/L2`.
    pub grad_g2: IsmMapping,
    pub a: Arc<dyn LinearOperator>,
    pub big_f: StronglyMonotoneMapping,
    /// Optional evaluators of `e2` and `g2`; when present the gradients are
    /// finite-difference checked during the reduction.
    pub e2: Option<ObjectiveFn>,
    pub g2: Option<ObjectiveFn>,
    pub known_solution: Option<Vector>,
    pub label: String,
}

const GRAD_CHECK_SAMPLES: usize = 32;
const GRAD_CHECK_STEP: f64 = 1e-5;
const GRAD_CHECK_SEED: u64 = 11;

pub fn scmp_to_svi(spec: ScmpSpec) -> Result<SviProblem> {
    if let Some(e2) = &spec.e2 {
        let r = finite_diff_grad_check(
            e2.as_ref(),
            &spec.grad_e2,
            GRAD_CHECK_SAMPLES,
            GRAD_CHECK_STEP,
            GRAD_CHECK_SEED,
        )?;
        if !r.passed {
            return Err(Error::invalid(format!("∇e2 fails finite differences: {:e}", r.worst)));
        }
    }
    if let Some(g2) = &spec.g2 {
        let r = finite_diff_grad_check(
            g2.as_ref(),
            &spec.grad_g2,
            GRAD_CHECK_SAMPLES,
            GRAD_CHECK_STEP,
            GRAD_CHECK_SEED,
        )?;
        if !r.passed {
            return Err(Error::invalid(format!("∇g2 fails finite differences: {:e}", r.worst)));
        }
    }
    SviProblem::new(SviParts {
        b1: spec.prox_e1,
        b2: spec.prox_g1,
        f1: spec.grad_e2,
        f2: spec.grad_g2,
        a: spec.a,
        big_f: spec.big_f,
        known_solution: spec.known_solution,
        label: spec.label,
    })
}

/// Split variational inequality: find `x ∈ C` solving `VI(C, f1)` such that
/// `Ax ∈ Q` solves `VI(Q, f2)`.
#[derive(Debug, Clone)]
pub struct SvipSpec {
    pub c: ConvexSet,
    pub q: ConvexSet,
    pub f1: IsmMapping,
    pub f2: IsmMapping,
    pub a: Arc<dyn LinearOperator>,
    pub big_f: StronglyMonotoneMapping,
    pub known_solution: Option<Vector>,
    pub label: String,
}

pub fn svip_to_svi(spec: SvipSpec) -> Result<SviProblem> {
    SviProblem::new(SviParts {
        b1: ResolventOperator::projection(spec.c)?,
        b2: ResolventOperator::projection(spec.q)?,
        f1: spec.f1,
        f2: spec.f2,
        a: spec.a,
        big_f: spec.big_f,
        known_solution: spec.known_solution,
        label: spec.label,
    })
}

/// Sequence-space experiment truncated to `R^dim`:
/// `B1 = 3I`, `B2 = 7I`, `f1 = 2I`, `f2 = diag(1, 1/2, 1/3, …)`, `F = 4I`,
/// `A x = (x1, x1, x2/2, x3/3, …)`. The unique solution is `0`.
pub fn build_example1(dim: usize) -> Result<SviProblem> {
    if dim < 4 {
        return Err(Error::invalid(format!("example 1 needs dim >= 4, got {dim}")));
    }
    let a = HarmonicShift::new(dim)?;
    let n2 = a.codomain_dim();
    SviProblem::new(SviParts {
        b1: ResolventOperator::scaled_identity(3.0, dim)?,
        b2: ResolventOperator::scaled_identity(7.0, n2)?,
        f1: IsmMapping::scaled(dim, 2.0)?,
        f2: IsmMapping::diagonal((1..=n2).map(|i| 1.0 / i as f64).collect())?,
        a: Arc::new(a),
        big_f: StronglyMonotoneMapping::scaled(dim, 4.0)?,
        known_solution: Some(Vector::zeros(dim)),
        label: format!("example1(dim={dim})"),
    })
}

pub const EXAMPLE2_E_LINEAR: [f64; 3] = [1.0, 1.0, -3.0];
pub const EXAMPLE2_G_LINEAR: [f64; 3] = [1.0, 1.0, -5.0];

/// Smooth part `‖x‖² + (1,1,−3)·x + 2` of the upper-level objective.
pub fn example2_e2(x: &Vector) -> f64 {
    x.norm_sq() + x.dot(&EXAMPLE2_E_LINEAR.into()) + 2.0
}

/// Smooth part `‖y‖² + (1,1,−5)·y − 3` of the lower-level objective.
pub fn example2_g2(y: &Vector) -> f64 {
    y.norm_sq() + y.dot(&EXAMPLE2_G_LINEAR.into()) - 3.0
}

/// The ℓ1-regularized quadratic pair in `R^3` with `A = 2I` and `F = 2I`.
/// Solution `x* = (0, 0, 1)` with image `(0, 0, 2)`.
pub fn example2_scmp() -> ScmpSpec {
    ScmpSpec {
        prox_e1: ResolventOperator::soft_threshold(3),
        prox_g1: ResolventOperator::soft_threshold(3),
        grad_e2: IsmMapping::affine(vec![2.0; 3], Some(EXAMPLE2_E_LINEAR.into())).expect("valid weights"),
        grad_g2: IsmMapping::affine(vec![2.0; 3], Some(EXAMPLE2_G_LINEAR.into())).expect("valid weights"),
        a: Arc::new(ScaledIdentity::new(3, 2.0)),
        big_f: StronglyMonotoneMapping::scaled(3, 2.0).expect("valid weights"),
        e2: Some(Arc::new(example2_e2)),
        g2: Some(Arc::new(example2_g2)),
        known_solution: Some([0.0, 0.0, 1.0].into()),
        label: "example2".into(),
    }
}

pub fn build_example2() -> SviProblem {
    scmp_to_svi(example2_scmp()).expect("example 2 data is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::forward_backward_map;

    #[test]
    fn example1_structure() {
        let p = build_example1(200).unwrap();
        assert_eq!(p.n1(), 200);
        assert_eq!(p.n2(), 201);
        assert_eq!(p.tau_tilde(), 0.5);
        assert_eq!(p.norm_sq(), 2.0);
        assert_eq!(p.known_solution().unwrap(), &Vector::zeros(200));
        for lambda in [1e-3, 0.05, 0.1, 0.2] {
            assert_eq!(residual_tol(&p, lambda, &Vector::zeros(200)).unwrap(), 0.0);
        }
        assert!(build_example1(3).is_err());
    }

    #[test]
    fn example2_structure() {
        let p = build_example2();
        assert_eq!((p.n1(), p.n2()), (3, 3));
        assert_eq!(p.known_solution().unwrap().as_slice(), &[0.0, 0.0, 1.0]);
        assert_eq!(p.known_image().unwrap().as_slice(), &[0.0, 0.0, 2.0]);
        assert_eq!(p.tau_tilde(), 0.5);
        assert_eq!(p.norm_sq(), 4.0);
        let f1 = p.f1().apply(&[1.0, 2.0, 3.0].into()).unwrap();
        assert_eq!(f1.as_slice(), &[3.0, 5.0, 3.0]);
    }

    #[test]
    fn example2_subgradient_optimality() {
        // 0 ∈ 2x + b + ∂‖·‖₁(x), coordinatewise interval membership
        fn optimal(x: &[f64], b: &[f64]) -> bool {
            x.iter().zip(b).all(|(&xi, &bi)| {
                let g = 2.0 * xi + bi;
                if xi > 0.0 {
                    (g + 1.0).abs() < 1e-14
                } else if xi < 0.0 {
                    (g - 1.0).abs() < 1e-14
                } else {
                    (-1.0..=1.0).contains(&-g)
                }
            })
        }
        let p = build_example2();
        assert!(optimal(p.known_solution().unwrap().as_slice(), &EXAMPLE2_E_LINEAR));
        assert!(optimal(p.known_image().unwrap().as_slice(), &EXAMPLE2_G_LINEAR));
        // 1-D oracle: argmin of t² − 3t + |t| solves 2t − 3 + sign(t) = 0 at t = 1
        let t: f64 = 1.0;
        assert_eq!(2.0 * t - 3.0 + t.signum(), 0.0);
    }

    #[test]
    fn residual_scalar_instance() {
        let p = scalar_problem();
        let r = residual_tol(&p, 0.1, &[1.0].into()).unwrap();
        let expected = (1.0f64 - (1.0 - 2.0) / 1.3).abs() + (1.0f64 - (1.0 - 1.0) / 1.7).abs();
        assert!((r - expected).abs() < 1e-15);
        assert!((r - 2.7692308).abs() < 1e-7);
        assert!(residual_tol(&p, 0.0, &[1.0].into()).is_err());

        let ex1 = build_example1(10).unwrap();
        let near = Vector::from_fn(10, |i| 1e-9 / (i + 1) as f64);
        assert!(residual_tol(&ex1, 0.1, &near).unwrap() < 1e-7);
    }

    pub(crate) fn scalar_problem() -> SviProblem {
        SviProblem::new(SviParts {
            b1: ResolventOperator::scaled_identity(3.0, 1).unwrap(),
            b2: ResolventOperator::scaled_identity(7.0, 1).unwrap(),
            f1: IsmMapping::scaled(1, 2.0).unwrap(),
            f2: IsmMapping::scaled(1, 1.0).unwrap(),
            a: Arc::new(ScaledIdentity::new(1, 1.0)),
            big_f: StronglyMonotoneMapping::scaled(1, 4.0).unwrap(),
            known_solution: Some([0.0].into()),
            label: "scalar".into(),
        })
        .unwrap()
    }

    #[test]
    fn distance_examples() {
        let a = ScaledIdentity::new(3, 2.0);
        let xs: Vector = [0.0, 0.0, 1.0].into();
        let ys: Vector = [0.0, 0.0, 2.0].into();
        assert_eq!(distance_tol(&xs, &xs, &a, &ys).unwrap(), 0.0);
        assert_eq!(distance_tol(&Vector::zeros(3), &xs, &a, &ys).unwrap(), 3.0);
        let z: Vector = [0.3, -0.2, 0.7].into();
        let d = distance_tol(&z, &xs, &a, &ys).unwrap();
        assert!(d <= (1.0 + 2.0) * z.distance(&xs) + 1e-15);
        assert!(distance_tol(&Vector::zeros(2), &xs, &a, &ys).is_err());
    }

    #[test]
    fn step_size_bounds() {
        let p1 = build_example1(50).unwrap();
        assert!((lambda_upper_bound(&p1, 2.5).unwrap() - 0.2).abs() < 1e-15);
        let p2 = build_example2();
        assert!((lambda_upper_bound(&p2, 2.5).unwrap() - 0.1).abs() < 1e-15);
        assert!(lambda_upper_bound(&p2, 2.0).is_err());
        assert!(lambda_upper_bound(&p2, 1e9).unwrap() < 1e-9);
    }

    #[test]
    fn schedules_sit_inside_the_band() {
        let p1 = build_example1(50).unwrap();
        let p2 = build_example2();
        for rho in [2.01, 2.5, 3.0, 3.49] {
            let bound = lambda_upper_bound(&p1, rho).unwrap();
            assert!((1..=100_000).all(|n| (n as f64) / (7.0 * n as f64 + 3.0) < bound));
        }
        for rho in [2.01, 2.5, 3.0, 3.5] {
            let bound = lambda_upper_bound(&p2, rho).unwrap();
            assert!((1..=100_000).all(|n| (n as f64) / (14.0 * n as f64 + 1.0) < bound));
        }
    }

    #[test]
    fn known_solution_is_fixed_point_of_forward_backward() {
        let p = build_example2();
        let xs = p.known_solution().unwrap();
        for lambda in [0.01, 0.05, 1.0 / 15.0, 0.1] {
            let out = forward_backward_map(p.b1(), p.f1(), lambda, xs).unwrap();
            assert!(out.distance(xs) < 1e-14);
            let y = p.known_image().unwrap();
            let out = forward_backward_map(p.b2(), p.f2(), lambda, y).unwrap();
            assert!(out.distance(y) < 1e-14);
        }
    }

    #[test]
    fn infeasible_known_solution_is_rejected() {
        let mut spec = example2_scmp();
        spec.known_solution = Some([0.0, 0.0, 2.0].into());
        assert!(scmp_to_svi(spec).is_err());
    }

    #[test]
    fn corrupted_gradient_is_rejected() {
        let mut spec = example2_scmp();
        spec.grad_e2 = IsmMapping::affine(vec![2.0; 3], Some([-1.0, -1.0, 3.0].into())).unwrap();
        assert!(scmp_to_svi(spec).is_err());
    }

    #[test]
    fn zero_smooth_parts_reduce_to_plain_split_inclusion() {
        let spec = ScmpSpec {
            prox_e1: ResolventOperator::soft_threshold(2),
            prox_g1: ResolventOperator::soft_threshold(2),
            grad_e2: IsmMapping::zero(2),
            grad_g2: IsmMapping::zero(2),
            a: Arc::new(ScaledIdentity::new(2, 1.0)),
            big_f: StronglyMonotoneMapping::scaled(2, 1.0).unwrap(),
            e2: None,
            g2: None,
            known_solution: Some(Vector::zeros(2)),
            label: "byrne".into(),
        };
        let p = scmp_to_svi(spec).unwrap();
        assert_eq!(p.tau_tilde(), f64::INFINITY);
        assert!((lambda_upper_bound(&p, 2.5).unwrap() - 0.4).abs() < 1e-15);
        // with f = 0 the lower map is the plain resolvent
        let y: Vector = [2.0, -0.3].into();
        assert_eq!(p.lower_map(0.5, &y), p.b2().eval(0.5, &y).unwrap());
    }

    #[test]
    fn dimension_chain_is_enforced() {
        let parts = SviParts {
            b1: ResolventOperator::scaled_identity(1.0, 3).unwrap(),
            b2: ResolventOperator::scaled_identity(1.0, 3).unwrap(),
            f1: IsmMapping::scaled(3, 1.0).unwrap(),
            f2: IsmMapping::scaled(2, 1.0).unwrap(),
            a: Arc::new(ScaledIdentity::new(3, 1.0)),
            big_f: StronglyMonotoneMapping::scaled(3, 1.0).unwrap(),
            known_solution: None,
            label: "bad".into(),
        };
        assert!(matches!(SviProblem::new(parts), Err(Error::DimensionMismatch { .. })));
    }
}
