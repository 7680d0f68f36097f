//! Independent reference computations.
//!
//! Nothing here calls into the solver. The scalar step is recomputed from the
//! update formulas by hand with closed-form scalar resolvents, and the sampled
//! checks evaluate the defining inequalities directly.

use crate::error::{Error, Result};
use crate::hilbert::{random_vector, seeded_rng, Vector};
use crate::operators::{IsmMapping, SampledReport};

/// Pass threshold for [`finite_diff_grad_check`].
pub const GRAD_CHECK_TOL: f64 = 1e-6;
/// Slack for [`ism_constant_sampled`].
pub const ISM_TOL: f64 = 1e-9;

/// One-dimensional instance: `B1 x = b1·x`, `B2 x = b2·x`, `f1 x = fc1·x`,
/// `f2 x = fc2·x`, `A x = a·x`, `F x = f_big·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSviInstance {
    pub b1: f64,
    pub b2: f64,
    pub fc1: f64,
    pub fc2: f64,
    pub a: f64,
    pub f_big: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarVariant {
    Regularized { alpha: f64 },
    ForwardBackward,
    Moudafi { gamma: f64 },
}

/// One step of the chosen scheme on a scalar instance.
pub fn scalar_oracle_step(inst: &ScalarSviInstance, variant: ScalarVariant, lambda: f64, z: f64) -> f64 {
    let j1 = |x: f64| x / (1.0 + lambda * inst.b1);
    let j2 = |x: f64| x / (1.0 + lambda * inst.b2);
    // S z = a (a z − T(a z)) with T(y) = J2(y − λ fc2 y)
    let s = |x: f64| {
        let y = inst.a * x;
        let t = j2(y - lambda * (inst.fc2 * y));
        inst.a * (y - t)
    };
    match variant {
        ScalarVariant::Regularized { alpha } => {
            j1(z - lambda * (inst.fc1 * z) - lambda * s(z) - lambda * alpha * (inst.f_big * z))
        }
        ScalarVariant::ForwardBackward => j1(z - lambda * (inst.fc1 * z) - lambda * s(z)),
        ScalarVariant::Moudafi { gamma } => {
            let w = z - gamma * s(z);
            j1(w - lambda * (inst.fc1 * w))
        }
    }
}

/// Bisection for a root of a continuous scalar function with a sign change on
/// `[lo, hi]`.
pub fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut glo = g(lo);
    if glo == 0.0 {
        return Ok(lo);
    }
    let ghi = g(hi);
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::invalid("bisection bracket has no sign change"));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Compare `grad` against central differences of `objective` at seeded points
/// with entries in `[-5, 5]`. `worst` is the largest per-coordinate error
/// relative to `max(1, |∂ᵢ|)`.
pub fn finite_diff_grad_check(
    objective: &dyn Fn(&Vector) -> f64,
    grad: &IsmMapping,
    samples: usize,
    h: f64,
    seed: u64,
) -> Result<SampledReport> {
    if !(h > 0.0) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let dim = grad.dim();
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let x = random_vector(&mut rng, dim, 5.0);
        let g = grad.apply(&x)?;
        for i in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp.as_mut_slice()[i] += h;
            xm.as_mut_slice()[i] -= h;
            let fd = (objective(&xp) - objective(&xm)) / (2.0 * h);
            let err = (fd - g[i]).abs() / g[i].abs().max(1.0);
            worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
        }
    }
    Ok(SampledReport {
        samples: samples.max(1),
        worst,
        threshold: GRAD_CHECK_TOL,
        passed: worst <= GRAD_CHECK_TOL,
    })
}

/// Smallest observed `⟨fx − fy, x − y⟩ / ‖fx − fy‖²` over seeded pairs with
/// entries in `[-5, 5]`. Pairs with `fx = fy` are skipped.
pub fn ism_constant_sampled(
    f: &dyn Fn(&Vector) -> Vector,
    dim: usize,
    claimed_tau: f64,
    samples: usize,
    seed: u64,
) -> Result<SampledReport> {
    if !(claimed_tau > 0.0) {
        return Err(Error::invalid("claimed ism modulus must be positive"));
    }
    let mut rng = seeded_rng(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples.max(1) {
        let x = random_vector(&mut rng, dim, 5.0);
        let y = random_vector(&mut rng, dim, 5.0);
        let df = &f(&x) - &f(&y);
        let den = df.norm_sq();
        if den == 0.0 {
            continue;
        }
        let ratio = df.dot(&(&x - &y)) / den;
        worst = worst.min(if ratio.is_nan() { f64::NEG_INFINITY } else { ratio });
    }
    Ok(SampledReport {
        samples: samples.max(1),
        worst,
        threshold: claimed_tau - ISM_TOL,
        passed: worst >= claimed_tau - ISM_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INST: ScalarSviInstance = ScalarSviInstance {
        b1: 3.0,
        b2: 7.0,
        fc1: 2.0,
        fc2: 1.0,
        a: 1.0,
        f_big: 4.0,
    };

    #[test]
    fn hand_computed_steps() {
        // T(1) = 0.9/1.7, S(1) = 1 − T(1)
        let t1 = 0.9 / 1.7;
        let s1 = 1.0 - t1;
        let reg = scalar_oracle_step(&INST, ScalarVariant::Regularized { alpha: 0.5 }, 0.1, 1.0);
        assert!((reg - (1.0 - 0.2 - 0.1 * s1 - 0.2) / 1.3).abs() < 1e-15);
        assert!((reg - 0.4253394).abs() < 1e-7);
        let fb = scalar_oracle_step(&INST, ScalarVariant::ForwardBackward, 0.1, 1.0);
        assert!((fb - 0.5791855).abs() < 1e-7);
        let m = scalar_oracle_step(&INST, ScalarVariant::Moudafi { gamma: 0.1 }, 0.1, 1.0);
        assert!((m - 0.8 * (1.0 - 0.1 * s1) / 1.3).abs() < 1e-15);
        assert!((m - 0.5864253).abs() < 1e-7);
    }

    #[test]
    fn trivial_steps() {
        for v in [
            ScalarVariant::Regularized { alpha: 0.3 },
            ScalarVariant::ForwardBackward,
            ScalarVariant::Moudafi { gamma: 0.2 },
        ] {
            assert_eq!(scalar_oracle_step(&INST, v, 0.1, 0.0), 0.0);
        }
        let idle = ScalarSviInstance {
            b1: 0.0,
            b2: 0.0,
            fc1: 0.0,
            fc2: 0.0,
            a: 1.0,
            f_big: 0.0,
        };
        assert_eq!(
            scalar_oracle_step(&idle, ScalarVariant::Regularized { alpha: 0.5 }, 0.1, 2.5),
            2.5
        );
    }

    #[test]
    fn bisection() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-6).is_err());
    }

    #[test]
    fn gradient_checks() {
        let b: Vector = [1.0, 1.0, -3.0].into();
        let bc = b.clone();
        let e2 = move |x: &Vector| x.norm_sq() + x.dot(&bc) + 2.0;
        let good = IsmMapping::affine(vec![2.0; 3], Some(b.clone())).unwrap();
        assert!(finite_diff_grad_check(&e2, &good, 20, 1e-5, 1).unwrap().passed);
        let flipped = IsmMapping::affine(vec![2.0; 3], Some(-&b)).unwrap();
        assert!(!finite_diff_grad_check(&e2, &flipped, 20, 1e-5, 1).unwrap().passed);
        assert!(finite_diff_grad_check(&e2, &good, 20, 0.0, 1).is_err());
    }

    #[test]
    fn ism_checks() {
        let two = |x: &Vector| x.scaled(2.0);
        let r = ism_constant_sampled(&two, 4, 0.5, 100, 9).unwrap();
        assert!(r.passed);
        assert!((r.worst - 0.5).abs() < 1e-14);
        assert!(!ism_constant_sampled(&two, 4, 10.0, 100, 9).unwrap().passed);
        let constant = |_: &Vector| Vector::zeros(2);
        let r = ism_constant_sampled(&constant, 2, 1.0, 10, 9).unwrap();
        assert!(r.passed && r.worst.is_infinite());
    }
}
