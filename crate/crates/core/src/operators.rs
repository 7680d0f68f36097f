//! Resolvents of maximal monotone operators and the single-valued maps that
//! appear next to them.
//!
//! A monotone operator `B` is never stored as a graph. It is represented by
//! its resolvent `J_λ = (I + λB)⁻¹`, which is all the iterative schemes need.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hilbert::{random_vector, seeded_rng, Vector};

/// Slack allowed when checking firm nonexpansiveness on samples.
pub const FIRM_NONEXPANSIVE_TOL: f64 = 1e-9;
/// Slack allowed when checking the ism and strong monotonicity inequalities.
pub const MONOTONE_TOL: f64 = 1e-10;

pub type VectorFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
pub type ResolventFn = Arc<dyn Fn(f64, &Vector) -> Vector + Send + Sync>;

/// Closed convex sets with explicit metric projections.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    Box { lower: Vector, upper: Vector },
    Ball { center: Vector, radius: f64 },
    WholeSpace { dim: usize },
}

impl ConvexSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexSet::Box { lower, upper } => {
                Error::check_dim("box bounds", lower.dim(), upper.dim())?;
                if lower.iter().zip(upper.iter()).any(|(l, u)| !(l <= u)) {
                    return Err(Error::invalid("box requires lower <= upper in every coordinate"));
                }
            }
            ConvexSet::Ball { radius, center } => {
                if !(*radius >= 0.0) || !center.is_finite() {
                    return Err(Error::invalid("ball requires a finite center and radius >= 0"));
                }
            }
            ConvexSet::WholeSpace { dim } => {
                if *dim == 0 {
                    return Err(Error::invalid("whole space needs a positive dimension"));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Box { lower, .. } => lower.dim(),
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::WholeSpace { dim } => *dim,
        }
    }

    fn project_unchecked(&self, x: &Vector) -> Vector {
        match self {
            ConvexSet::Box { lower, upper } => Vector::from_fn(x.dim(), |i| x[i].max(lower[i]).min(upper[i])),
            ConvexSet::Ball { center, radius } => {
                let d = x - center;
                let n = d.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    let s = radius / n;
                    center.zip_map(&d, |c, di| c + s * di)
                }
            }
            ConvexSet::WholeSpace { .. } => x.clone(),
        }
    }
}

/// Metric projection `P_C(x) = argmin_{y ∈ C} ‖x − y‖`.
pub fn project_convex(set: &ConvexSet, x: &Vector) -> Result<Vector> {
    set.validate()?;
    Error::check_dim("project_convex", set.dim(), x.dim())?;
    Ok(set.project_unchecked(x))
}

/// Proximal map of `λ‖·‖₁`: componentwise soft thresholding.
pub fn prox_l1(lambda: f64, x: &Vector) -> Vector {
    x.map(|v| soft_threshold(v, lambda))
}

#[inline]
fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

#[derive(Clone)]
pub enum ResolventKind {
    /// `B = c·I`, so `J_λ(x) = x / (1 + λc)`.
    ScaledIdentity(f64),
    /// `B = ∂‖·‖₁`.
    SoftThreshold,
    /// `B = N_C`, the normal cone of `C`, whose resolvent is `P_C` for every λ.
    Projection(ConvexSet),
    Custom(ResolventFn),
}

impl fmt::Debug for ResolventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolventKind::ScaledIdentity(c) => write!(f, "ScaledIdentity({c})"),
            ResolventKind::SoftThreshold => write!(f, "SoftThreshold"),
            ResolventKind::Projection(s) => write!(f, "Projection({s:?})"),
            ResolventKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Maximal monotone operator on `R^dim`, known only through its resolvent.
#[derive(Debug, Clone)]
pub struct ResolventOperator {
    dim: usize,
    kind: ResolventKind,
    label: String,
}

impl ResolventOperator {
    /// `B = c·I` with `c ≥ 0`.
    pub fn scaled_identity(c: f64, dim: usize) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("scaled identity needs c >= 0, got {c}")));
        }
        Ok(ResolventOperator {
            dim,
            kind: ResolventKind::ScaledIdentity(c),
            label: format!("{c}·I"),
        })
    }

    pub fn soft_threshold(dim: usize) -> Self {
        ResolventOperator {
            dim,
            kind: ResolventKind::SoftThreshold,
            label: "∂‖·‖₁".into(),
        }
    }

    pub fn projection(set: ConvexSet) -> Result<Self> {
        set.validate()?;
        let label = match &set {
            ConvexSet::Box { .. } => "N_box",
            ConvexSet::Ball { .. } => "N_ball",
            ConvexSet::WholeSpace { .. } => "N_whole_space",
        };
        Ok(ResolventOperator {
            dim: set.dim(),
            kind: ResolventKind::Projection(set),
            label: label.into(),
        })
    }

    /// Caller-supplied resolvent. Nothing about monotonicity is checked here;
    /// see [`check_firmly_nonexpansive_sampled`].
    pub fn custom(
        dim: usize,
        label: impl Into<String>,
        f: impl Fn(f64, &Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        ResolventOperator {
            dim,
            kind: ResolventKind::Custom(Arc::new(f)),
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &ResolventKind {
        &self.kind
    }

    /// `J_λ(x)`.
    pub fn eval(&self, lambda: f64, x: &Vector) -> Result<Vector> {
        if !(lambda > 0.0) {
            return Err(Error::invalid(format!(
                "resolvent parameter must be positive, got {lambda}"
            )));
        }
        Error::check_dim("resolvent_eval", self.dim, x.dim())?;
        Ok(self.eval_unchecked(lambda, x))
    }

    pub(crate) fn eval_unchecked(&self, lambda: f64, x: &Vector) -> Vector {
        match &self.kind {
            ResolventKind::ScaledIdentity(c) => {
                let d = 1.0 + lambda * c;
                x.map(|v| v / d)
            }
            ResolventKind::SoftThreshold => prox_l1(lambda, x),
            ResolventKind::Projection(set) => set.project_unchecked(x),
            ResolventKind::Custom(f) => f(lambda, x),
        }
    }
}

#[derive(Clone)]
pub enum MapKind {
    /// `x ↦ w ∘ x + b`.
    Affine {
        weights: Vector,
        offset: Option<Vector>,
    },
    Custom(VectorFn),
}

impl MapKind {
    fn call(&self, x: &Vector) -> Vector {
        match self {
            MapKind::Affine { weights, offset } => match offset {
                Some(b) => Vector::from_fn(x.dim(), |i| weights[i] * x[i] + b[i]),
                None => weights.zip_map(x, |w, v| w * v),
            },
            MapKind::Custom(f) => f(x),
        }
    }
}

impl fmt::Debug for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapKind::Affine { weights, offset } => f
                .debug_struct("Affine")
                .field("weights", weights)
                .field("offset", offset)
                .finish(),
            MapKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

fn check_weights(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::invalid("weights must be non-empty"));
    }
    if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::invalid("weights must be positive and finite"));
    }
    Ok(weights.iter().cloned().fold(0.0, f64::max))
}

/// Single-valued `τ`-inverse strongly monotone map:
/// `⟨f(x) − f(y), x − y⟩ ≥ τ ‖f(x) − f(y)‖²`.
#[derive(Debug, Clone)]
pub struct IsmMapping {
    dim: usize,
    map: MapKind,
    tau: f64,
}

impl IsmMapping {
    /// `x ↦ diag(w) x` with `τ = 1 / max(w)`.
    pub fn diagonal(weights: Vec<f64>) -> Result<Self> {
        Self::affine(weights, None)
    }

    /// `x ↦ diag(w) x + b`. The offset does not change the modulus.
    pub fn affine(weights: Vec<f64>, offset: Option<Vector>) -> Result<Self> {
        let max = check_weights(&weights)?;
        if let Some(b) = &offset {
            Error::check_dim("affine offset", weights.len(), b.dim())?;
        }
        Ok(IsmMapping {
            dim: weights.len(),
            map: MapKind::Affine {
                weights: Vector::from_vec(weights),
                offset,
            },
            tau: 1.0 / max,
        })
    }

    /// `x ↦ c·x`, modulus `1/c`.
    pub fn scaled(dim: usize, c: f64) -> Result<Self> {
        Self::diagonal(vec![c; dim])
    }

    /// The zero map, ism for every modulus. Its `tau` is `+∞`.
    pub fn zero(dim: usize) -> Self {
        IsmMapping {
            dim,
            map: MapKind::Affine {
                weights: Vector::zeros(dim),
                offset: None,
            },
            tau: f64::INFINITY,
        }
    }

    pub fn custom(dim: usize, tau: f64, f: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::invalid("ism modulus must be positive"));
        }
        Ok(IsmMapping {
            dim,
            map: MapKind::Custom(Arc::new(f)),
            tau,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn kind(&self) -> &MapKind {
        &self.map
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        Error::check_dim("ism mapping", self.dim, x.dim())?;
        Ok(self.call(x))
    }

    pub(crate) fn call(&self, x: &Vector) -> Vector {
        self.map.call(x)
    }
}

/// `γ`-strongly monotone, `L`-Lipschitz single-valued map.
#[derive(Debug, Clone)]
pub struct StronglyMonotoneMapping {
    dim: usize,
    map: MapKind,
    gamma: f64,
    lipschitz: f64,
}

impl StronglyMonotoneMapping {
    /// `x ↦ c·x`, with `γ = L = c`.
    pub fn scaled(dim: usize, c: f64) -> Result<Self> {
        Self::diagonal(vec![c; dim])
    }

    /// `x ↦ diag(w) x`, with `γ = min w` and `L = max w`.
    pub fn diagonal(weights: Vec<f64>) -> Result<Self> {
        let max = check_weights(&weights)?;
        let min = weights.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(StronglyMonotoneMapping {
            dim: weights.len(),
            map: MapKind::Affine {
                weights: Vector::from_vec(weights),
                offset: None,
            },
            gamma: min,
            lipschitz: max,
        })
    }

    pub fn custom(
        dim: usize,
        gamma: f64,
        lipschitz: f64,
        f: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(gamma > 0.0 && lipschitz >= gamma) {
            return Err(Error::invalid("need 0 < gamma <= lipschitz"));
        }
        Ok(StronglyMonotoneMapping {
            dim,
            map: MapKind::Custom(Arc::new(f)),
            gamma,
            lipschitz,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        Error::check_dim("strongly monotone mapping", self.dim, x.dim())?;
        Ok(self.call(x))
    }

    pub(crate) fn call(&self, x: &Vector) -> Vector {
        self.map.call(x)
    }
}

/// `J_λ^B(x − λ f(x))`.
pub fn forward_backward_map(b: &ResolventOperator, f: &IsmMapping, lambda: f64, x: &Vector) -> Result<Vector> {
    Error::check_dim("forward_backward_map", b.dim(), f.dim())?;
    let fx = f.apply(x)?;
    b.eval(lambda, &x.zip_map(&fx, |v, g| v - lambda * g))
}

/// Result of a sampled inequality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledReport {
    pub samples: usize,
    /// Smallest observed margin (or ratio, depending on the check).
    pub worst: f64,
    /// Pass threshold for `worst`.
    pub threshold: f64,
    pub passed: bool,
}

/// Check `⟨Jx − Jy, x − y⟩ ≥ ‖Jx − Jy‖²` on seeded pairs with entries in
/// `[-5, 5]`. `worst` is the smallest value of the left side minus the right.
pub fn check_firmly_nonexpansive_sampled(
    b: &ResolventOperator,
    lambda: f64,
    samples: usize,
    seed: u64,
) -> Result<SampledReport> {
    if !(lambda > 0.0) {
        return Err(Error::invalid("resolvent parameter must be positive"));
    }
    let mut rng = seeded_rng(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples.max(1) {
        let x = random_vector(&mut rng, b.dim(), 5.0);
        let y = random_vector(&mut rng, b.dim(), 5.0);
        let jx = b.eval_unchecked(lambda, &x);
        let jy = b.eval_unchecked(lambda, &y);
        let dj = &jx - &jy;
        let margin = dj.dot(&(&x - &y)) - dj.norm_sq();
        worst = worst.min(if margin.is_nan() { f64::NEG_INFINITY } else { margin });
    }
    Ok(SampledReport {
        samples: samples.max(1),
        worst,
        threshold: -FIRM_NONEXPANSIVE_TOL,
        passed: worst >= -FIRM_NONEXPANSIVE_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    #[test]
    fn scaled_identity_resolvent() {
        let b = ResolventOperator::scaled_identity(3.0, 1).unwrap();
        assert_eq!(b.eval(1.0, &v(&[4.0])).unwrap(), v(&[1.0]));
        let b7 = ResolventOperator::scaled_identity(7.0, 1).unwrap();
        let out = b7.eval(0.1, &v(&[1.7])).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-15);
        assert_eq!(b7.eval(0.5, &v(&[9.0])).unwrap(), v(&[2.0]));
        let b2 = ResolventOperator::scaled_identity(3.0, 2).unwrap();
        assert_eq!(b2.eval(1.0, &v(&[13.0, 0.0])).unwrap(), v(&[3.25, 0.0]));
        // zero of B is a fixed point
        assert_eq!(b2.eval(0.3, &Vector::zeros(2)).unwrap(), Vector::zeros(2));
        let id = ResolventOperator::scaled_identity(0.0, 2).unwrap();
        assert_eq!(id.eval(5.0, &v(&[1.5, -2.0])).unwrap(), v(&[1.5, -2.0]));
    }

    #[test]
    fn resolvent_rejects_bad_inputs() {
        let b = ResolventOperator::scaled_identity(3.0, 2).unwrap();
        assert!(b.eval(0.0, &Vector::zeros(2)).is_err());
        assert!(b.eval(-1.0, &Vector::zeros(2)).is_err());
        assert!(b.eval(1.0, &Vector::zeros(3)).is_err());
        assert!(ResolventOperator::scaled_identity(-1.0, 2).is_err());
    }

    #[test]
    fn diagonal_ism() {
        let f = IsmMapping::diagonal(vec![1.0, 0.5, 1.0 / 3.0]).unwrap();
        let out = f.apply(&v(&[3.0, 4.0, 6.0])).unwrap();
        assert_eq!(out, v(&[3.0, 2.0, 2.0]));
        assert_eq!(f.tau(), 1.0);
        assert_eq!(f.apply(&Vector::zeros(3)).unwrap(), Vector::zeros(3));
        assert_eq!(IsmMapping::scaled(4, 2.0).unwrap().tau(), 0.5);
        assert!(IsmMapping::diagonal(vec![1.0, 0.0]).is_err());
        assert!(IsmMapping::diagonal(vec![1.0, -2.0]).is_err());
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(prox_l1(1.0, &v(&[2.0, -0.5, 0.0])), v(&[1.0, 0.0, 0.0]));
        assert_eq!(prox_l1(0.25, &v(&[-1.0, 1.0])), v(&[-0.75, 0.75]));
        assert_eq!(prox_l1(3.0, &Vector::zeros(4)), Vector::zeros(4));
    }

    #[test]
    fn projections() {
        let bx = ConvexSet::Box {
            lower: v(&[0.0, 0.0]),
            upper: v(&[1.0, 1.0]),
        };
        assert_eq!(project_convex(&bx, &v(&[2.0, -1.0])).unwrap(), v(&[1.0, 0.0]));
        let ball = ConvexSet::Ball {
            center: v(&[0.0, 0.0]),
            radius: 1.0,
        };
        let p = project_convex(&ball, &v(&[3.0, 4.0])).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
        let whole = ConvexSet::WholeSpace { dim: 3 };
        assert_eq!(
            project_convex(&whole, &v(&[1.0, -2.0, 3.0])).unwrap(),
            v(&[1.0, -2.0, 3.0])
        );

        let bad_box = ConvexSet::Box {
            lower: v(&[1.0]),
            upper: v(&[0.0]),
        };
        assert!(bad_box.validate().is_err());
        let bad_ball = ConvexSet::Ball {
            center: v(&[0.0]),
            radius: -1.0,
        };
        assert!(ResolventOperator::projection(bad_ball).is_err());
        assert!(project_convex(&bx, &v(&[1.0])).is_err());
    }

    #[test]
    fn forward_backward_examples() {
        let b2 = ResolventOperator::scaled_identity(7.0, 1).unwrap();
        let f2 = IsmMapping::scaled(1, 1.0).unwrap();
        let out = forward_backward_map(&b2, &f2, 0.1, &v(&[1.0])).unwrap();
        assert!((out[0] - 0.9 / 1.7).abs() < 1e-15);
        assert!((out[0] - 0.5294118).abs() < 1e-7);
        assert_eq!(forward_backward_map(&b2, &f2, 0.1, &v(&[0.0])).unwrap(), v(&[0.0]));

        let zero = IsmMapping::zero(1);
        let plain = forward_backward_map(&b2, &zero, 0.1, &v(&[3.4])).unwrap();
        assert_eq!(plain, b2.eval(0.1, &v(&[3.4])).unwrap());
    }

    #[test]
    fn firm_nonexpansiveness() {
        let b = ResolventOperator::scaled_identity(3.0, 4).unwrap();
        assert!(check_firmly_nonexpansive_sampled(&b, 1.0, 200, 1).unwrap().passed);
        let l1 = ResolventOperator::soft_threshold(4);
        assert!(check_firmly_nonexpansive_sampled(&l1, 0.5, 200, 2).unwrap().passed);
        let fake = ResolventOperator::custom(4, "2x", |_, x| x.scaled(2.0));
        assert!(!check_firmly_nonexpansive_sampled(&fake, 1.0, 10, 3).unwrap().passed);
        assert!(check_firmly_nonexpansive_sampled(&b, 0.0, 10, 3).is_err());
    }
}
