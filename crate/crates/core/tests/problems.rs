use std::sync::Arc;

use svi_core::experiments::{run_bench, write_trace_csv, Case, Experiment, TRACE_HEADER};
use svi_core::hilbert::ScaledIdentity;
use svi_core::operators::{ConvexSet, IsmMapping, ResolventOperator, StronglyMonotoneMapping};
use svi_core::oracle::bisect;
use svi_core::problem::{build_example1, build_example2, residual_tol, scmp_to_svi, svip_to_svi, ScmpSpec, SvipSpec};
use svi_core::solver::{
    run, step_forward_backward, step_moudafi, step_regularized, validate_schedule, AlphaRule, LambdaRule, Schedule,
    SolverConfig, StopCheck, StopRule, Variant,
};
use svi_core::{Error, Vector};

fn long_config(variant: Variant) -> SolverConfig {
    let mut cfg = SolverConfig::example1(variant);
    cfg.tol = 1e-11;
    cfg.max_iter = 100_000;
    cfg
}

#[test]
fn example2_solution_is_fixed_by_unregularized_steps() {
    let p = build_example2();
    let x = p.known_solution().unwrap().clone();
    for lambda in [0.05, 1.0 / 15.0, 0.1] {
        let fb = step_forward_backward(&p, &x, lambda).unwrap();
        assert!(fb.distance(&x) < 1e-15);
        let m = step_moudafi(&p, &x, lambda, 0.2).unwrap();
        assert!(m.distance(&x) < 1e-15);
        // F(x*) ≠ 0, so regularization moves it
        assert!(step_regularized(&p, &x, lambda, 0.1).unwrap().distance(&x) > 1e-3);
    }
    // the unscaled residual vanishes at a solution only for λ = 1
    assert!(residual_tol(&p, 1.0, &x).unwrap() < 1e-15);
    assert!(residual_tol(&p, 0.1, &x).unwrap() > 1e-3);
}

#[test]
fn svip_on_ball_matches_grid_search() {
    // minimize q(x) = ½ Σ wᵢxᵢ² + b·x over a disc; the lower level is void
    let w = [2.0, 0.5];
    let b = [-3.0, 1.0];
    let center = [0.5, 0.0];
    let radius = 1.0;
    let p = svip_to_svi(SvipSpec {
        c: ConvexSet::Ball {
            center: center.into(),
            radius,
        },
        q: ConvexSet::WholeSpace { dim: 2 },
        f1: IsmMapping::affine(w.to_vec(), Some(b.into())).unwrap(),
        f2: IsmMapping::zero(2),
        a: Arc::new(ScaledIdentity::new(2, 1.0)),
        big_f: StronglyMonotoneMapping::scaled(2, 1.0).unwrap(),
        known_solution: None,
        label: "disc".into(),
    })
    .unwrap();
    let res = run(
        &p,
        &Schedule::example1(),
        &long_config(Variant::ForwardBackward),
        &[3.0, 3.0].into(),
    )
    .unwrap();
    assert!(res.converged);

    let q = |x: f64, y: f64| 0.5 * (w[0] * x * x + w[1] * y * y) + b[0] * x + b[1] * y;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let mut consider = |x: f64, y: f64| {
        let v = q(x, y);
        if v < best.0 {
            best = (v, x, y);
        }
    };
    let n = 400;
    for i in 0..=n {
        for j in 0..=n {
            let x = center[0] - radius + 2.0 * radius * i as f64 / n as f64;
            let y = center[1] - radius + 2.0 * radius * j as f64 / n as f64;
            if (x - center[0]).powi(2) + (y - center[1]).powi(2) <= radius * radius {
                consider(x, y);
            }
        }
    }
    let m = 400_000;
    for k in 0..m {
        let t = std::f64::consts::TAU * k as f64 / m as f64;
        consider(center[0] + radius * t.cos(), center[1] + radius * t.sin());
    }
    let z = &res.final_iterate;
    assert!(
        (z[0] - best.1).abs() < 1e-4 && (z[1] - best.2).abs() < 1e-4,
        "{z:?} vs {best:?}"
    );
    assert!(q(z[0], z[1]) <= best.0 + 1e-9);
}

#[test]
fn scmp_with_identity_matches_scalar_oracle() {
    // minimize |x| + c(x − d)² with a void lower level
    for (c, d) in [(1.0, 3.0), (0.5, -4.0), (2.0, 0.1)] {
        // 0 ∈ 2c(x − d) + ∂|x|: outside [−1, 1] the subgradient is the sign
        let g = |x: f64| 2.0 * c * (x - d) + x.signum();
        let expected = if (2.0 * c * d).abs() <= 1.0 {
            0.0
        } else if d > 0.0 {
            bisect(g, 1e-12, d.abs() + 1.0, 1e-14).unwrap()
        } else {
            bisect(g, -d.abs() - 1.0, -1e-12, 1e-14).unwrap()
        };
        // construction also checks that `expected` solves the inclusion
        let p = scmp_to_svi(ScmpSpec {
            prox_e1: ResolventOperator::soft_threshold(1),
            prox_g1: ResolventOperator::scaled_identity(0.0, 1).unwrap(),
            grad_e2: IsmMapping::affine(vec![2.0 * c], Some([-2.0 * c * d].into())).unwrap(),
            grad_g2: IsmMapping::zero(1),
            a: Arc::new(ScaledIdentity::new(1, 1.0)),
            big_f: StronglyMonotoneMapping::scaled(1, 1.0).unwrap(),
            e2: Some(Arc::new(move |x: &Vector| c * (x[0] - d).powi(2))),
            g2: None,
            known_solution: Some([expected].into()),
            label: "scalar lasso".into(),
        })
        .unwrap();
        // a fast-vanishing α so the regularized scheme settles within the budget
        let mut sched = Schedule::example1();
        sched.alpha = AlphaRule::Power {
            coef: 0.5,
            exponent: 1.5,
        };
        for v in Variant::ALL {
            let mut cfg = long_config(v);
            cfg.stop_rule = StopRule::Distance;
            cfg.tol = 1e-6;
            let res = run(&p, &sched, &cfg, &[5.0].into()).unwrap();
            assert!(res.converged, "{v:?} c={c} d={d}: {}", res.final_tol);
        }
    }
}

#[test]
fn bench_counts_do_not_depend_on_truncation() {
    let counts = |dim| {
        let r = run_bench(Experiment::One, dim).unwrap();
        r.cells.iter().map(|c| c.result.iterations).collect::<Vec<_>>()
    };
    let base = counts(200);
    assert_eq!(counts(50), base);
    assert_eq!(counts(400), base);
}

#[test]
fn before_step_check_gives_the_same_counts() {
    for exp in [Experiment::One, Experiment::Two] {
        let p = exp.problem(200).unwrap();
        for case in exp.cases() {
            for v in Variant::ALL {
                let after = exp.solver_config(v);
                let mut before = after.clone();
                before.stop_check = StopCheck::BeforeStep;
                let z = case.initial_point(p.n1());
                let a = run(&p, &exp.schedule(), &after, &z).unwrap();
                let b = run(&p, &exp.schedule(), &before, &z).unwrap();
                assert_eq!(a.iterations, b.iterations, "{} {}", case.name(), v.name());
            }
        }
    }
}

#[test]
fn every_scheme_reaches_the_origin_on_example1() {
    let p = build_example1(100).unwrap();
    for v in Variant::ALL {
        let res = run(&p, &Schedule::example1(), &long_config(v), &Case::Ic.initial_point(100)).unwrap();
        assert!(res.converged);
        assert!(res.final_iterate.norm() < 1e-10);
        assert!(res.trace.rows.iter().all(|r| r.dist_to_known.is_some()));
    }
}

#[test]
fn non_convergence_is_reported() {
    let p = build_example1(20).unwrap();
    let mut cfg = SolverConfig::example1(Variant::Regularized);
    cfg.max_iter = 1;
    let res = run(&p, &Schedule::example1(), &cfg, &Case::Ia.initial_point(20)).unwrap();
    assert!(!res.converged);
    assert_eq!(res.iterations, 1);
    assert_eq!(res.trace.rows.len(), 1);
}

#[test]
fn distance_stop_needs_a_known_solution() {
    let p = svip_to_svi(SvipSpec {
        c: ConvexSet::WholeSpace { dim: 1 },
        q: ConvexSet::WholeSpace { dim: 1 },
        f1: IsmMapping::scaled(1, 1.0).unwrap(),
        f2: IsmMapping::scaled(1, 1.0).unwrap(),
        a: Arc::new(ScaledIdentity::new(1, 1.0)),
        big_f: StronglyMonotoneMapping::scaled(1, 1.0).unwrap(),
        known_solution: None,
        label: "open".into(),
    })
    .unwrap();
    let mut cfg = SolverConfig::example1(Variant::ForwardBackward);
    cfg.stop_rule = StopRule::Distance;
    assert!(matches!(
        run(&p, &Schedule::example1(), &cfg, &[1.0].into()),
        Err(Error::Config(_))
    ));
    let wrong_dim = run(
        &p,
        &Schedule::example1(),
        &SolverConfig::example1(Variant::Moudafi),
        &[1.0, 2.0].into(),
    );
    assert!(matches!(wrong_dim, Err(Error::DimensionMismatch { .. })));
}

#[test]
fn large_moudafi_gamma_warns() {
    let p = build_example2();
    let mut cfg = SolverConfig::example2(Variant::Moudafi);
    cfg.moudafi_gamma = 0.3;
    cfg.max_iter = 5;
    let res = run(&p, &Schedule::example2(), &cfg, &Case::IIa.initial_point(3)).unwrap();
    assert_eq!(res.warnings.len(), 1);
    cfg.moudafi_gamma = 1.0 / 15.0;
    assert!(run(&p, &Schedule::example2(), &cfg, &Case::IIa.initial_point(3))
        .unwrap()
        .warnings
        .is_empty());
}

#[test]
fn schedule_validation() {
    let p1 = build_example1(50).unwrap();
    assert!(validate_schedule(&Schedule::example1(), &p1, 1000)
        .unwrap()
        .all_passed());
    let p2 = build_example2();
    assert!(validate_schedule(&Schedule::example2(), &p2, 1000)
        .unwrap()
        .all_passed());

    let mut wide = Schedule::example1();
    wide.lambda = LambdaRule::Constant { value: 0.5 };
    let r = validate_schedule(&wide, &p1, 100).unwrap();
    assert!(r.hard_failed());
    assert!(!r.check("lambda_band").unwrap().passed);

    let mut flat = Schedule::example1();
    flat.alpha = AlphaRule::Constant { value: 0.3 };
    let r = validate_schedule(&flat, &p1, 100).unwrap();
    assert!(!r.hard_failed());
    assert!(!r.check("alpha_vanishing").unwrap().passed);

    let mut rho2 = Schedule::example1();
    rho2.rho = 2.0;
    assert!(validate_schedule(&rho2, &p1, 100).is_err());
}

#[test]
fn trace_csv_layout() {
    let p = build_example2();
    let cfg = SolverConfig::example2(Variant::ForwardBackward);
    let res = run(&p, &Schedule::example2(), &cfg, &Case::IIc.initial_point(3)).unwrap();
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, &res.trace, false).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TRACE_HEADER));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 7);
    assert_eq!(first[0], "1");
    assert_eq!(first[3], "", "no alpha for the unregularized scheme");
    assert_eq!(first[6], "", "no timing unless requested");
    assert!(first[1].parse::<f64>().is_ok() && first[5].parse::<f64>().is_ok());
    assert_eq!(text.lines().count(), res.iterations + 1);
}
