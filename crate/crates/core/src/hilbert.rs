//! Finite-dimensional Hilbert-space primitives.
//!
//! Elements of the spaces `H1`, `H2` are dense [`Vector`]s. Bounded linear maps
//! between them implement [`LinearOperator`], which carries both the forward
//! action and the adjoint. The sequence space of the first built-in experiment
//! is modelled by truncating to `R^N` (see [`HarmonicShift`]).

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Tolerance used by the sampled adjoint identity check.
pub const ADJOINT_TOL: f64 = 1e-10;

/// Seed used when a caller asks for a seeded power iteration without one.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Dense real vector.
#[derive(Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn from_vec(entries: Vec<f64>) -> Self {
        Vector(entries)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> f64) -> Self {
        Vector((0..dim).map(f).collect())
    }

    /// Standard basis vector `e_k` (zero-based `k`).
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[k] = 1.0;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Euclidean inner product. Panics on a dimension mismatch; use [`inner`]
    /// for the checked form.
    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "distance: dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Vector {
        self.map(|v| factor * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|&v| f(v)).collect())
    }

    /// Componentwise combination of two vectors of equal length.
    pub fn zip_map(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        assert_eq!(self.dim(), other.dim(), "zip_map: dimension mismatch");
        Vector(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(v: [f64; N]) -> Self {
        Vector(v.to_vec())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.map(|v| -v)
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;
    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scaled(self)
    }
}

/// Checked inner product `Σ xᵢ yᵢ`.
pub fn inner(x: &Vector, y: &Vector) -> Result<f64> {
    Error::check_dim("inner", x.dim(), y.dim())?;
    Ok(x.dot(y))
}

/// A bounded linear map `A: R^n -> R^m` together with its adjoint.
///
/// Implementors provide the unchecked actions; callers go through
/// [`LinearOperator::apply`] and [`LinearOperator::apply_adjoint`], which
/// validate dimensions first.
pub trait LinearOperator: fmt::Debug + Send + Sync {
    fn domain_dim(&self) -> usize;
    fn codomain_dim(&self) -> usize;

    /// `A x`, with `x.dim() == domain_dim()` guaranteed by the caller.
    fn forward(&self, x: &Vector) -> Vector;

    /// `A* y`, with `y.dim() == codomain_dim()` guaranteed by the caller.
    fn adjoint(&self, y: &Vector) -> Vector;

    /// `‖A‖²` when it is known in closed form.
    fn norm_sq_hint(&self) -> Option<f64> {
        None
    }

    fn apply(&self, x: &Vector) -> Result<Vector> {
        Error::check_dim("apply_operator", self.domain_dim(), x.dim())?;
        Ok(self.forward(x))
    }

    fn apply_adjoint(&self, y: &Vector) -> Result<Vector> {
        Error::check_dim("apply_adjoint", self.codomain_dim(), y.dim())?;
        Ok(self.adjoint(y))
    }
}

/// `x ↦ c·x` on `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledIdentity {
    pub dim: usize,
    pub scale: f64,
}

impl ScaledIdentity {
    pub fn new(dim: usize, scale: f64) -> Self {
        ScaledIdentity { dim, scale }
    }
}

impl LinearOperator for ScaledIdentity {
    fn domain_dim(&self) -> usize {
        self.dim
    }
    fn codomain_dim(&self) -> usize {
        self.dim
    }
    fn forward(&self, x: &Vector) -> Vector {
        x.scaled(self.scale)
    }
    fn adjoint(&self, y: &Vector) -> Vector {
        y.scaled(self.scale)
    }
    fn norm_sq_hint(&self) -> Option<f64> {
        Some(self.scale * self.scale)
    }
}

/// Truncation of the sequence-space map
/// `x ↦ (x₁, x₁, x₂/2, x₃/3, …)` to an `N`-dimensional domain.
///
/// The codomain has `N + 1` entries so that the image of a truncated vector is
/// represented exactly. Its adjoint is `(A*y)₁ = y₁ + y₂` and
/// `(A*y)_k = y_{k+1}/k` for `k ≥ 2`, and `A*A = diag(2, 1/4, 1/9, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicShift {
    dim: usize,
}

impl HarmonicShift {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("HarmonicShift needs a positive dimension"));
        }
        Ok(HarmonicShift { dim })
    }
}

impl LinearOperator for HarmonicShift {
    fn domain_dim(&self) -> usize {
        self.dim
    }
    fn codomain_dim(&self) -> usize {
        self.dim + 1
    }
    fn forward(&self, x: &Vector) -> Vector {
        let x = x.as_slice();
        let mut out = Vec::with_capacity(self.dim + 1);
        out.push(x[0]);
        out.push(x[0]);
        for (k, &v) in x.iter().enumerate().skip(1) {
            out.push(v / (k + 1) as f64);
        }
        Vector(out)
    }
    fn adjoint(&self, y: &Vector) -> Vector {
        let y = y.as_slice();
        let mut out = Vec::with_capacity(self.dim);
        out.push(y[0] + y[1]);
        for k in 1..self.dim {
            out.push(y[k + 1] / (k + 1) as f64);
        }
        Vector(out)
    }
    fn norm_sq_hint(&self) -> Option<f64> {
        // A*A e₁ = 2 e₁ and every other diagonal entry is 1/k² ≤ 1/4
        Some(2.0)
    }
}

/// Row-major dense matrix.
///
/// An explicit adjoint matrix may be supplied instead of the transpose; this
/// exists so that a deliberately inconsistent pair can be loaded from a
/// problem file and caught by [`check_adjoint_consistency`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    adjoint_data: Option<Vec<f64>>,
    norm_sq_hint: Option<f64>,
}

impl DenseMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        if nrows == 0 || rows[0].is_empty() {
            return Err(Error::invalid("matrix must be non-empty"));
        }
        let ncols = rows[0].len();
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            Error::check_dim("matrix row length", ncols, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(DenseMatrix {
            rows: nrows,
            cols: ncols,
            data,
            adjoint_data: None,
            norm_sq_hint: None,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
            adjoint_data: None,
            norm_sq_hint: None,
        }
    }

    /// Replace the transpose with an explicit `cols × rows` adjoint.
    pub fn with_adjoint_rows(mut self, rows: &[Vec<f64>]) -> Result<Self> {
        Error::check_dim("adjoint row count", self.cols, rows.len())?;
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for r in rows {
            Error::check_dim("adjoint row length", self.rows, r.len())?;
            data.extend_from_slice(r);
        }
        self.adjoint_data = Some(data);
        Ok(self)
    }

    pub fn with_norm_sq_hint(mut self, hint: f64) -> Result<Self> {
        if !(hint >= 0.0 && hint.is_finite()) {
            return Err(Error::invalid("norm_sq hint must be finite and nonnegative"));
        }
        self.norm_sq_hint = Some(hint);
        Ok(self)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

impl LinearOperator for DenseMatrix {
    fn domain_dim(&self) -> usize {
        self.cols
    }
    fn codomain_dim(&self) -> usize {
        self.rows
    }
    fn forward(&self, x: &Vector) -> Vector {
        Vector::from_fn(self.rows, |r| {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            row.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
        })
    }
    fn adjoint(&self, y: &Vector) -> Vector {
        match &self.adjoint_data {
            Some(adj) => Vector::from_fn(self.cols, |c| {
                let row = &adj[c * self.rows..(c + 1) * self.rows];
                row.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
            }),
            None => {
                let mut out = vec![0.0; self.cols];
                for (r, &yr) in y.iter().enumerate() {
                    let row = &self.data[r * self.cols..(r + 1) * self.cols];
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += a * yr;
                    }
                }
                Vector(out)
            }
        }
    }
    fn norm_sq_hint(&self) -> Option<f64> {
        self.norm_sq_hint
    }
}

/// Outcome of [`estimate_norm_sq`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    /// Estimate of `‖A‖²`, the spectral radius of `A*A`.
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// `‖A‖²`: the analytic hint when the operator has one, otherwise power
/// iteration on `A*A` started from the all-ones vector.
pub fn estimate_norm_sq(a: &dyn LinearOperator, max_iters: usize, tol: f64) -> Result<NormEstimate> {
    if let Some(hint) = a.norm_sq_hint() {
        check_power_params(max_iters, tol)?;
        return Ok(NormEstimate {
            value: hint,
            converged: true,
            iterations: 0,
        });
    }
    power_iteration(a, Vector(vec![1.0; a.domain_dim()]), max_iters, tol)
}

/// Power iteration from a start vector drawn with the given seed. Ignores the
/// operator's hint.
pub fn estimate_norm_sq_seeded(a: &dyn LinearOperator, max_iters: usize, tol: f64, seed: u64) -> Result<NormEstimate> {
    let mut rng = seeded_rng(seed);
    let start = random_vector(&mut rng, a.domain_dim(), 1.0);
    power_iteration(a, start, max_iters, tol)
}

fn check_power_params(max_iters: usize, tol: f64) -> Result<()> {
    if max_iters == 0 {
        return Err(Error::invalid("power iteration needs max_iters >= 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("power iteration needs tol > 0"));
    }
    Ok(())
}

fn power_iteration(a: &dyn LinearOperator, start: Vector, max_iters: usize, tol: f64) -> Result<NormEstimate> {
    check_power_params(max_iters, tol)?;
    let start_norm = start.norm();
    if start_norm == 0.0 {
        return Err(Error::invalid("power iteration start vector is zero"));
    }
    let mut v = start.scaled(1.0 / start_norm);
    let mut prev = f64::NAN;
    let mut best = 0.0;
    for it in 1..=max_iters {
        let w = a.adjoint(&a.forward(&v));
        // v has unit norm, so the Rayleigh quotient is ⟨v, A*A v⟩
        let rq = v.dot(&w);
        best = rq.max(best);
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(NormEstimate {
                value: 0.0,
                converged: true,
                iterations: it,
            });
        }
        if (rq - prev).abs() < tol {
            return Ok(NormEstimate {
                value: best,
                converged: true,
                iterations: it,
            });
        }
        prev = rq;
        v = w.scaled(1.0 / wn);
    }
    Ok(NormEstimate {
        value: best,
        converged: false,
        iterations: max_iters,
    })
}

/// Worst-case violation of `⟨Ax, y⟩ = ⟨x, A*y⟩` over sampled pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointReport {
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Sample seeded `(x, y)` pairs with entries in `[-1, 1]` and compare both
/// sides of the adjoint identity.
pub fn check_adjoint_consistency(a: &dyn LinearOperator, samples: usize, seed: u64) -> AdjointReport {
    let mut rng = seeded_rng(seed);
    let mut max_error: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let x = random_vector(&mut rng, a.domain_dim(), 1.0);
        let y = random_vector(&mut rng, a.codomain_dim(), 1.0);
        let lhs = a.forward(&x).dot(&y);
        let rhs = x.dot(&a.adjoint(&y));
        let err = (lhs - rhs).abs();
        if err.is_nan() {
            max_error = f64::INFINITY;
        } else {
            max_error = max_error.max(err);
        }
    }
    AdjointReport {
        samples: samples.max(1),
        max_error,
        tolerance: ADJOINT_TOL,
        passed: max_error <= ADJOINT_TOL,
    }
}

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vector with entries drawn uniformly from `[-scale, scale]`.
pub(crate) fn random_vector(rng: &mut impl Rng, dim: usize, scale: f64) -> Vector {
    Vector::from_fn(dim, |_| rng.gen_range(-scale..=scale))
}
