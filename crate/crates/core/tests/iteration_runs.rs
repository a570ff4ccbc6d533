//! Scheme runs on the landmark triples plus the exact collapse identities.

mod common;

use common::*;
use fplab_core::{
    coincidence_iterate, ishikawa_iterate, mann_iterate, monotonicity_diagnostics,
    picard_iterate, DiagnosticRule, Interval, IterationStatus, IterationTrace, PiecewiseMap,
    PsiFunction, RunConfig, SolveStage, StepSchedule,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn picard_on_the_contractive_map_sits_still_at_the_fixed_point() {
    let (t, _, _) = contractive_triple();
    let trace = picard_iterate(&t, &RunConfig::new(TWO_THIRDS)).unwrap();
    match trace.status {
        IterationStatus::Converged { limit, at_iter } => {
            assert_eq!(at_iter, 1);
            assert!((limit - TWO_THIRDS).abs() <= 1e-12);
        }
        other => panic!("expected convergence, got {other:?}"),
    }
    for x in &trace.iterates_x {
        assert!((x - TWO_THIRDS).abs() <= 1e-12);
    }
}

#[test]
fn coincidence_run_contracts_to_the_joint_fixed_point() {
    let (t, f, g) = contractive_triple();
    let trace = coincidence_iterate(&t, &f, &g, &RunConfig::new(0.9)).unwrap();

    // the first solve inverts the reflection branch: x1 = 4/3 - T(0.9)
    assert!((trace.iterates_x[1] - 47.0 / 60.0).abs() <= 1e-12);

    let IterationStatus::Converged { limit, at_iter } = trace.status else {
        panic!("expected convergence, got {:?}", trace.status);
    };
    assert!(at_iter <= 200, "took {at_iter} iterations");
    assert!((limit - TWO_THIRDS).abs() <= 1e-8);

    // successive residuals strictly decrease down to the noise floor
    let residuals = trace.successive_residuals();
    for w in residuals.windows(2) {
        if w[0] >= 1e-10 {
            assert!(w[1] < w[0], "residuals {} -> {}", w[0], w[1]);
        }
    }

    // every iterate stays inside the domain
    for &x in &trace.iterates_x {
        assert!(t.domain().contains(x), "iterate {x} escaped");
    }

    // the converged estimate is a joint fixed point up to 10x the tolerance
    let z = trace.fixed_point_estimate();
    for m in [&t, &f, &g] {
        assert!((m.eval(z).unwrap() - z).abs() <= 10.0 * 1e-8);
    }
}

#[test]
fn coincidence_run_from_the_fixed_point_is_constant() {
    let (t, f, g) = contractive_triple();
    let trace = coincidence_iterate(&t, &f, &g, &RunConfig::new(TWO_THIRDS)).unwrap();
    assert!(trace.status.converged());
    for y in &trace.outputs_y {
        assert!((y - TWO_THIRDS).abs() <= 1e-12);
    }
}

#[test]
fn coincidence_diagnostics_hold_on_the_contractive_run() {
    let (t, f, g) = contractive_triple();
    let trace = coincidence_iterate(&t, &f, &g, &RunConfig::new(0.9)).unwrap();
    let report = monotonicity_diagnostics(&trace, &PsiFunction::power_ratio()).unwrap();
    assert_eq!(report.rule, DiagnosticRule::SuccessiveContraction);
    assert!(report.passed, "violation {:?}", report.first_violation);
    assert!(report.steps_checked >= 10);
}

#[test]
fn mann_solve_fails_when_the_combination_leaves_the_range() {
    // from x0 = 1/2 the combined value 3/4 falls in the range gap of f
    let (t, f, g) = contractive_triple();
    let alpha = StepSchedule::constant(0.5).unwrap();
    let trace = mann_iterate(&t, &f, &g, &alpha, &RunConfig::new(0.5)).unwrap();
    assert_eq!(
        trace.status,
        IterationStatus::SolveFailed {
            at_iter: 0,
            stage: SolveStage::Outer
        }
    );
    assert_eq!(trace.iterates_x, vec![0.5]);
}

#[test]
fn mann_on_the_contractive_triple_reaches_the_fixed_point() {
    let (t, f, g) = contractive_triple();
    let alpha = StepSchedule::constant(0.5).unwrap();
    let trace = mann_iterate(&t, &f, &g, &alpha, &RunConfig::new(0.9)).unwrap();
    let IterationStatus::Converged { limit, .. } = trace.status else {
        panic!("expected convergence, got {:?}", trace.status);
    };
    assert!((limit - TWO_THIRDS).abs() <= 1e-6, "limit {limit}");
}

fn random_affine_scenario(
    rng: &mut ChaCha8Rng,
) -> (PiecewiseMap, PiecewiseMap, f64, StepSchedule, StepSchedule) {
    // f: invertible affine selfmap-ish over [0, 1]; T: contraction into f's range
    let iv = Interval::closed(0.0, 1.0).unwrap();
    let f_slope: f64 = if rng.random_bool(0.5) {
        rng.random_range(0.5..1.5)
    } else {
        -rng.random_range(0.5..1.5)
    };
    let f_int = if f_slope > 0.0 {
        rng.random_range(-0.1..0.1)
    } else {
        rng.random_range(0.9..1.1)
    };
    let f = PiecewiseMap::affine("f", iv, f_slope, f_int).unwrap();
    let (f_lo, f_hi) = if f_slope > 0.0 {
        (f_int, f_slope + f_int)
    } else {
        (f_slope + f_int, f_int)
    };
    let t_slope = rng.random_range(0.05..0.45);
    let mid = 0.5 * (f_lo + f_hi);
    let t_int = mid - 0.5 * t_slope;
    let t = PiecewiseMap::affine("t", iv, t_slope, t_int).unwrap();
    let x0 = rng.random_range(0.0..1.0);
    let alpha = StepSchedule::constant(rng.random_range(0.2..0.9)).unwrap();
    let beta = StepSchedule::constant(rng.random_range(0.2..0.9)).unwrap();
    (t, f, x0, alpha, beta)
}

/// Reference one-step scheme through a single map: the two-map special case.
fn mann_two_map_reference(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    alpha: &StepSchedule,
    cfg: &RunConfig,
) -> Vec<f64> {
    let mut xs = vec![cfg.x0];
    let mut ys: Vec<f64> = Vec::new();
    while xs.len() < cfg.max_iter {
        let n = xs.len() - 1;
        let x = *xs.last().unwrap();
        let a = alpha.value(n);
        let y = (1.0 - a) * f.eval(x).unwrap() + a * t.eval(x).unwrap();
        let x_next = f.invert(y, x, cfg.solve_tol).unwrap();
        ys.push(y);
        xs.push(x_next);
        if ys.len() >= 2 && (ys[ys.len() - 1] - ys[ys.len() - 2]).abs() <= cfg.conv_tol {
            break;
        }
    }
    ys
}

/// Reference two-step scheme through a single map.
fn ishikawa_two_map_reference(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    alpha: &StepSchedule,
    beta: &StepSchedule,
    cfg: &RunConfig,
) -> Vec<f64> {
    let mut xs = vec![cfg.x0];
    let mut zs: Vec<f64> = Vec::new();
    while xs.len() < cfg.max_iter {
        let n = xs.len() - 1;
        let x = *xs.last().unwrap();
        let a = alpha.value(n);
        let b = beta.value(n);
        let fx = f.eval(x).unwrap();
        let y = (1.0 - b) * fx + b * t.eval(x).unwrap();
        let v = f.invert(y, x, cfg.solve_tol).unwrap();
        let z = (1.0 - a) * fx + a * t.eval(v).unwrap();
        let x_next = f.invert(z, x, cfg.solve_tol).unwrap();
        zs.push(z);
        xs.push(x_next);
        if zs.len() >= 2 && (zs[zs.len() - 1] - zs[zs.len() - 2]).abs() <= cfg.conv_tol {
            break;
        }
    }
    zs
}

#[test]
fn same_comparison_map_collapses_to_the_two_map_schemes_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for case in 0..10 {
        let (t, f, x0, alpha, beta) = random_affine_scenario(&mut rng);
        let cfg = RunConfig::new(x0).with_max_iter(200);

        let mann = mann_iterate(&t, &f, &f, &alpha, &cfg).unwrap();
        let reference = mann_two_map_reference(&t, &f, &alpha, &cfg);
        assert_eq!(mann.outputs_y, reference, "one-step collapse, case {case}");

        let ish = ishikawa_iterate(&t, &f, &f, &alpha, &beta, &cfg).unwrap();
        let reference = ishikawa_two_map_reference(&t, &f, &alpha, &beta, &cfg);
        assert_eq!(
            ish.outputs_z.as_ref().unwrap(),
            &reference,
            "two-step collapse, case {case}"
        );
    }
}

#[test]
fn zero_inner_step_collapses_the_two_step_scheme_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let zero = StepSchedule::constant(0.0).unwrap();
    for case in 0..10 {
        let (t, f, x0, alpha, _) = random_affine_scenario(&mut rng);
        let cfg = RunConfig::new(x0).with_max_iter(200);
        let mann = mann_iterate(&t, &f, &f, &alpha, &cfg).unwrap();
        let ish = ishikawa_iterate(&t, &f, &f, &alpha, &zero, &cfg).unwrap();
        assert_eq!(ish.outputs_z.as_ref().unwrap(), &mann.outputs_y, "case {case}");
        assert_eq!(ish.iterates_x, mann.iterates_x, "case {case}");
    }
}

#[test]
fn unit_step_with_identity_maps_collapses_to_the_direct_orbit() {
    let id = PiecewiseMap::identity(&unit_domain());
    let t = PiecewiseMap::affine("t", Interval::closed(0.0, 1.0).unwrap(), 0.5, 0.1).unwrap();
    let one = StepSchedule::constant(1.0).unwrap();
    let cfg = RunConfig::new(0.9).with_max_iter(100);
    let mann = mann_iterate(&t, &id, &id, &one, &cfg).unwrap();
    let picard = picard_iterate(&t, &cfg).unwrap();
    assert_eq!(mann.iterates_x, picard.iterates_x);
}

#[test]
fn targeted_residuals_are_recorded_when_a_target_is_set() {
    let (t, f, g) = contractive_triple();
    let cfg = RunConfig::new(0.9).with_target(TWO_THIRDS);
    let trace = coincidence_iterate(&t, &f, &g, &cfg).unwrap();
    for (y, r) in trace.outputs_y.iter().zip(&trace.residuals) {
        let r = r.expect("targeted residuals are always defined");
        assert!((r - (y - TWO_THIRDS).abs()).abs() <= 1e-15);
    }
}

#[test]
fn solve_failure_reports_the_stage_and_index() {
    // T maps into f's range gap immediately on the inner solve
    let (t, f, g) = contractive_triple();
    let alpha = StepSchedule::constant(0.5).unwrap();
    let beta = StepSchedule::constant(0.5).unwrap();
    let trace = ishikawa_iterate(&t, &f, &g, &alpha, &beta, &RunConfig::new(0.5)).unwrap();
    let IterationStatus::SolveFailed { at_iter, stage } = trace.status else {
        panic!("expected a solve failure, got {:?}", trace.status);
    };
    assert_eq!(at_iter, 0);
    assert_eq!(stage, SolveStage::Inner);
}

#[test]
fn warnings_flag_schedules_without_divergent_sums() {
    let (t, f, g) = contractive_triple();
    let alpha = StepSchedule::table(vec![0.5, 0.25], false).unwrap();
    let trace = mann_iterate(&t, &f, &g, &alpha, &RunConfig::new(0.9)).unwrap();
    assert!(!trace.warnings.is_empty());
    let harmonic = StepSchedule::harmonic(1.0).unwrap();
    let trace = mann_iterate(&t, &f, &g, &harmonic, &RunConfig::new(0.9)).unwrap();
    assert!(trace.warnings.is_empty());
}

#[test]
fn trace_shapes_are_consistent_per_scheme() {
    let (t, f, g) = contractive_triple();
    let alpha = StepSchedule::constant(0.5).unwrap();
    let beta = StepSchedule::constant(0.5).unwrap();
    let cfg = RunConfig::new(0.9).with_max_iter(50);

    let co = coincidence_iterate(&t, &f, &g, &cfg).unwrap();
    assert_eq!(co.iterates_x.len(), co.outputs_y.len());
    assert_eq!(co.residuals.len(), co.outputs_y.len());
    assert!(co.outputs_z.is_none() && co.aux_v.is_none());

    let ma = mann_iterate(&t, &f, &g, &alpha, &cfg).unwrap();
    assert_eq!(ma.iterates_x.len(), ma.outputs_y.len() + 1);
    assert_eq!(ma.alphas.as_ref().unwrap().len(), ma.outputs_y.len());

    let check_ishikawa = |tr: &IterationTrace| {
        let n = tr.outputs_y.len();
        assert_eq!(tr.iterates_x.len(), n + 1);
        assert_eq!(tr.outputs_z.as_ref().unwrap().len(), n);
        assert_eq!(tr.aux_v.as_ref().unwrap().len(), n);
        assert_eq!(tr.alphas.as_ref().unwrap().len(), n);
        assert_eq!(tr.betas.as_ref().unwrap().len(), n);
    };
    let ish = ishikawa_iterate(&t, &f, &g, &alpha, &beta, &RunConfig::new(0.9)).unwrap();
    check_ishikawa(&ish);
}
