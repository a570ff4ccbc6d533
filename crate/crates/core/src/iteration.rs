//! Iterative schemes: direct orbits, the alternating coincidence sequence,
//! and the implicit one- and two-step schemes with step schedules.
//!
//! The implicit schemes define the next iterate through `f` (even steps) or
//! `g` (odd steps); solving goes through [`PiecewiseMap::invert`] with the
//! previous iterate as anchor. When a right-hand side is unattainable (a
//! non-convex range, say) the run ends with `SolveFailed` carrying the step
//! index instead of guessing.

use crate::error::{CoreError, Result};
use crate::map::PiecewiseMap;
use crate::psi::PsiFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Picard,
    Coincidence,
    Mann,
    Ishikawa,
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SchemeKind::Picard => write!(f, "picard"),
            SchemeKind::Coincidence => write!(f, "coincidence"),
            SchemeKind::Mann => write!(f, "mann"),
            SchemeKind::Ishikawa => write!(f, "ishikawa"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum ScheduleKind {
    Constant(f64),
    /// alpha_n = min(1, c / (n + 1)).
    Harmonic(f64),
    /// Cycles through the given values.
    Table(Vec<f64>),
}

/// A step-size sequence with analytic divergent-sum metadata.
///
/// Whether the series of steps diverges is never inferred numerically: it
/// is true by construction for positive constants and harmonic schedules
/// and caller-asserted for tables.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSchedule {
    kind: ScheduleKind,
    divergent_sum: bool,
}

impl StepSchedule {
    pub fn constant(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(CoreError::Schedule {
                value: alpha,
                index: 0,
            });
        }
        Ok(StepSchedule {
            kind: ScheduleKind::Constant(alpha),
            divergent_sum: alpha > 0.0,
        })
    }

    pub fn harmonic(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(CoreError::invalid("harmonic schedule needs c > 0"));
        }
        Ok(StepSchedule {
            kind: ScheduleKind::Harmonic(c),
            divergent_sum: true,
        })
    }

    pub fn table(values: Vec<f64>, divergent_sum: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(CoreError::invalid("table schedule needs at least one value"));
        }
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(CoreError::Schedule { value, index });
            }
        }
        Ok(StepSchedule {
            kind: ScheduleKind::Table(values),
            divergent_sum,
        })
    }

    pub fn value(&self, n: usize) -> f64 {
        match &self.kind {
            ScheduleKind::Constant(a) => *a,
            ScheduleKind::Harmonic(c) => (c / (n as f64 + 1.0)).min(1.0),
            ScheduleKind::Table(v) => v[n % v.len()],
        }
    }

    pub fn divergent_sum(&self) -> bool {
        self.divergent_sum
    }
}

/// Run parameters shared by all schemes.
///
/// `max_iter` bounds the trace length including the seed row, so at most
/// `max_iter - 1` steps are taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub x0: f64,
    pub max_iter: usize,
    pub conv_tol: f64,
    pub solve_tol: f64,
    /// Known fixed point; when set, recorded residuals are distances to it.
    pub target: Option<f64>,
}

impl RunConfig {
    pub fn new(x0: f64) -> Self {
        RunConfig {
            x0,
            max_iter: 10_000,
            conv_tol: 1e-8,
            solve_tol: 1e-10,
            target: None,
        }
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_conv_tol(mut self, conv_tol: f64) -> Self {
        self.conv_tol = conv_tol;
        self
    }

    pub fn with_solve_tol(mut self, solve_tol: f64) -> Self {
        self.solve_tol = solve_tol;
        self
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = Some(target);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_iter < 2 {
            return Err(CoreError::invalid("max_iter must be at least 2"));
        }
        if !(self.conv_tol > 0.0) || !(self.solve_tol > 0.0) {
            return Err(CoreError::invalid("tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStage {
    Inner,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IterationStatus {
    Converged { limit: f64, at_iter: usize },
    MaxIterations,
    SolveFailed { at_iter: usize, stage: SolveStage },
}

impl IterationStatus {
    pub fn converged(&self) -> bool {
        matches!(self, IterationStatus::Converged { .. })
    }
}

/// Full record of one run. Rows are indexed by step; parity (even through
/// `f`, odd through `g`) is recoverable as `n % 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub scheme: SchemeKind,
    pub iterates_x: Vec<f64>,
    pub outputs_y: Vec<f64>,
    /// Outer outputs of the two-step scheme (its convergent sequence).
    pub outputs_z: Option<Vec<f64>>,
    /// Inner iterates of the two-step scheme.
    pub aux_v: Option<Vec<f64>>,
    /// Per output: distance to the target when one is set, successive
    /// output distance otherwise (undefined on the first output).
    pub residuals: Vec<Option<f64>>,
    pub alphas: Option<Vec<f64>>,
    pub betas: Option<Vec<f64>>,
    pub status: IterationStatus,
    pub target: Option<f64>,
    pub warnings: Vec<String>,
}

impl IterationTrace {
    fn new(scheme: SchemeKind, x0: f64, target: Option<f64>) -> Self {
        IterationTrace {
            scheme,
            iterates_x: vec![x0],
            outputs_y: Vec::new(),
            outputs_z: None,
            aux_v: None,
            residuals: Vec::new(),
            alphas: None,
            betas: None,
            status: IterationStatus::MaxIterations,
            target,
            warnings: Vec::new(),
        }
    }

    /// The sequence whose convergence the scheme tracks.
    pub fn tracked_outputs(&self) -> &[f64] {
        match self.scheme {
            SchemeKind::Ishikawa => self.outputs_z.as_deref().unwrap_or(&self.outputs_y),
            _ => &self.outputs_y,
        }
    }

    /// Successive distances of the tracked outputs, one per step from 1 on.
    pub fn successive_residuals(&self) -> Vec<f64> {
        self.tracked_outputs()
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .collect()
    }

    /// The best fixed-point estimate a converged run offers: the final
    /// x iterate. At a jump fixed point the outputs may approach from the
    /// discontinuous side while the x iterates stay on the branch the
    /// orbit lives in.
    pub fn fixed_point_estimate(&self) -> f64 {
        *self.iterates_x.last().expect("traces are seeded")
    }
}

/// Tracks the newest output, records the residual, decides stopping.
struct Stopper {
    target: Option<f64>,
    conv_tol: f64,
    prev: Option<f64>,
}

impl Stopper {
    fn new(cfg: &RunConfig) -> Self {
        Stopper {
            target: cfg.target,
            conv_tol: cfg.conv_tol,
            prev: None,
        }
    }

    /// Returns (recorded residual, stop?).
    fn push(&mut self, output: f64) -> (Option<f64>, bool) {
        let successive = self.prev.map(|p| (output - p).abs());
        let targeted = self.target.map(|z| (output - z).abs());
        self.prev = Some(output);
        let recorded = targeted.or(successive);
        let stop = successive.is_some_and(|r| r <= self.conv_tol)
            || targeted.is_some_and(|r| r <= self.conv_tol);
        (recorded, stop)
    }
}

fn check_in_domain(m: &PiecewiseMap, x: f64) -> Result<()> {
    if m.domain().contains(x) {
        Ok(())
    } else {
        Err(CoreError::Domain { x })
    }
}

fn warn_if_convergent_sum(schedule: &StepSchedule, name: &str, trace: &mut IterationTrace) {
    if !schedule.divergent_sum() {
        trace.warnings.push(format!(
            "{name} schedule sum may converge; convergence guarantees need a divergent sum"
        ));
    }
}

/// Direct orbit `x_{n+1} = T(x_n)`.
pub fn picard_iterate(t: &PiecewiseMap, cfg: &RunConfig) -> Result<IterationTrace> {
    cfg.validate()?;
    check_in_domain(t, cfg.x0)?;
    let mut trace = IterationTrace::new(SchemeKind::Picard, cfg.x0, cfg.target);
    let mut stopper = Stopper::new(cfg);
    // the seed is the zeroth orbit point, so |x1 - x0| already counts
    stopper.prev = Some(cfg.x0);
    while trace.iterates_x.len() < cfg.max_iter {
        let x = *trace.iterates_x.last().expect("seeded");
        let y = t.eval(x)?;
        check_in_domain(t, y)?;
        trace.outputs_y.push(y);
        trace.iterates_x.push(y);
        let (residual, stop) = stopper.push(y);
        trace.residuals.push(residual);
        if stop {
            trace.status = IterationStatus::Converged {
                limit: y,
                at_iter: trace.iterates_x.len() - 1,
            };
            break;
        }
    }
    Ok(trace)
}

/// Alternating coincidence sequence: `y_n = T(x_n)` with `f(x_{n+1}) = y_n`
/// on even outputs and `g(x_{n+2}) = y_{n+1}` on odd ones.
pub fn coincidence_iterate(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    cfg: &RunConfig,
) -> Result<IterationTrace> {
    cfg.validate()?;
    crate::contractivity::shared_domain(&[t, f, g])?;
    check_in_domain(t, cfg.x0)?;
    let mut trace = IterationTrace::new(SchemeKind::Coincidence, cfg.x0, cfg.target);
    let mut stopper = Stopper::new(cfg);

    let y0 = t.eval(cfg.x0)?;
    trace.outputs_y.push(y0);
    let (residual, stop) = stopper.push(y0);
    trace.residuals.push(residual);
    if stop {
        trace.status = IterationStatus::Converged {
            limit: y0,
            at_iter: 0,
        };
        return Ok(trace);
    }

    while trace.iterates_x.len() < cfg.max_iter {
        let n = trace.iterates_x.len(); // index of the iterate being solved for
        let solver = if n % 2 == 1 { f } else { g };
        let prev_x = *trace.iterates_x.last().expect("seeded");
        let rhs = *trace.outputs_y.last().expect("seeded");
        let x = match solver.invert(rhs, prev_x, cfg.solve_tol) {
            Ok(x) => x,
            Err(CoreError::NoPreimage { .. }) => {
                trace.status = IterationStatus::SolveFailed {
                    at_iter: n,
                    stage: SolveStage::Outer,
                };
                return Ok(trace);
            }
            Err(e) => return Err(e),
        };
        let y = t.eval(x)?;
        trace.iterates_x.push(x);
        trace.outputs_y.push(y);
        let (residual, stop) = stopper.push(y);
        trace.residuals.push(residual);
        if stop {
            trace.status = IterationStatus::Converged {
                limit: y,
                at_iter: n,
            };
            break;
        }
    }
    Ok(trace)
}

/// One-step implicit scheme: on step n the parity map `m` (f even, g odd)
/// solves `m(x_{n+1}) = (1 - alpha_n) m(x_n) + alpha_n T(x_n)`.
pub fn mann_iterate(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    alpha: &StepSchedule,
    cfg: &RunConfig,
) -> Result<IterationTrace> {
    cfg.validate()?;
    crate::contractivity::shared_domain(&[t, f, g])?;
    check_in_domain(t, cfg.x0)?;
    let mut trace = IterationTrace::new(SchemeKind::Mann, cfg.x0, cfg.target);
    trace.alphas = Some(Vec::new());
    warn_if_convergent_sum(alpha, "alpha", &mut trace);
    let mut stopper = Stopper::new(cfg);

    while trace.iterates_x.len() < cfg.max_iter {
        let n = trace.iterates_x.len() - 1;
        let m = if n % 2 == 0 { f } else { g };
        let a = alpha.value(n);
        if !(0.0..=1.0).contains(&a) {
            return Err(CoreError::Schedule { value: a, index: n });
        }
        let x = *trace.iterates_x.last().expect("seeded");
        let y = (1.0 - a) * m.eval(x)? + a * t.eval(x)?;
        let x_next = match m.invert(y, x, cfg.solve_tol) {
            Ok(v) => v,
            Err(CoreError::NoPreimage { .. }) => {
                trace.status = IterationStatus::SolveFailed {
                    at_iter: n,
                    stage: SolveStage::Outer,
                };
                return Ok(trace);
            }
            Err(e) => return Err(e),
        };
        trace.outputs_y.push(y);
        trace.alphas.as_mut().expect("set above").push(a);
        trace.iterates_x.push(x_next);
        let (residual, stop) = stopper.push(y);
        trace.residuals.push(residual);
        if stop {
            trace.status = IterationStatus::Converged {
                limit: y,
                at_iter: trace.iterates_x.len() - 1,
            };
            break;
        }
    }
    Ok(trace)
}

/// Two-step implicit scheme: step n first solves the inner relation
/// `m(v_n) = (1 - beta_n) m(x_n) + beta_n T(x_n)`, then the outer one
/// `m(x_{n+1}) = (1 - alpha_n) m(x_n) + alpha_n T(v_n)`, with `m` the
/// parity map (f even, g odd). The outer outputs are the tracked sequence.
pub fn ishikawa_iterate(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    alpha: &StepSchedule,
    beta: &StepSchedule,
    cfg: &RunConfig,
) -> Result<IterationTrace> {
    cfg.validate()?;
    crate::contractivity::shared_domain(&[t, f, g])?;
    check_in_domain(t, cfg.x0)?;
    let mut trace = IterationTrace::new(SchemeKind::Ishikawa, cfg.x0, cfg.target);
    trace.outputs_z = Some(Vec::new());
    trace.aux_v = Some(Vec::new());
    trace.alphas = Some(Vec::new());
    trace.betas = Some(Vec::new());
    warn_if_convergent_sum(alpha, "alpha", &mut trace);
    warn_if_convergent_sum(beta, "beta", &mut trace);
    let mut stopper = Stopper::new(cfg);

    while trace.iterates_x.len() < cfg.max_iter {
        let n = trace.iterates_x.len() - 1;
        let m = if n % 2 == 0 { f } else { g };
        let a = alpha.value(n);
        let b = beta.value(n);
        for v in [a, b] {
            if !(0.0..=1.0).contains(&v) {
                return Err(CoreError::Schedule { value: v, index: n });
            }
        }
        let x = *trace.iterates_x.last().expect("seeded");
        let mx = m.eval(x)?;
        let y = (1.0 - b) * mx + b * t.eval(x)?;
        let v = match m.invert(y, x, cfg.solve_tol) {
            Ok(v) => v,
            Err(CoreError::NoPreimage { .. }) => {
                trace.status = IterationStatus::SolveFailed {
                    at_iter: n,
                    stage: SolveStage::Inner,
                };
                return Ok(trace);
            }
            Err(e) => return Err(e),
        };
        let z = (1.0 - a) * mx + a * t.eval(v)?;
        let x_next = match m.invert(z, x, cfg.solve_tol) {
            Ok(v) => v,
            Err(CoreError::NoPreimage { .. }) => {
                trace.status = IterationStatus::SolveFailed {
                    at_iter: n,
                    stage: SolveStage::Outer,
                };
                return Ok(trace);
            }
            Err(e) => return Err(e),
        };
        trace.outputs_y.push(y);
        trace.aux_v.as_mut().expect("set above").push(v);
        trace.outputs_z.as_mut().expect("set above").push(z);
        trace.alphas.as_mut().expect("set above").push(a);
        trace.betas.as_mut().expect("set above").push(b);
        trace.iterates_x.push(x_next);
        let (residual, stop) = stopper.push(z);
        trace.residuals.push(residual);
        if stop {
            trace.status = IterationStatus::Converged {
                limit: z,
                at_iter: trace.iterates_x.len() - 1,
            };
            break;
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticRule {
    /// Successive residuals contract by psi: d_{n+1} <= d_n - psi(d_n).
    SuccessiveContraction,
    /// Distances to the target contract by the stepped psi:
    /// e_n <= e_{n-1} - alpha_{n-1} psi(e_{n-1}).
    TargetedContraction,
    /// Plain strict decrease of successive residuals.
    StrictDecrease,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticViolation {
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub rule: DiagnosticRule,
    pub passed: bool,
    pub first_violation: Option<DiagnosticViolation>,
    pub steps_checked: usize,
    pub slack: f64,
}

/// Index-by-index residual monotonicity check with slack 1e-10.
///
/// Coincidence traces get the psi-contraction of successive residuals;
/// Mann traces with a target and recorded steps get the targeted form;
/// anything else falls back to plain strict decrease.
pub fn monotonicity_diagnostics(
    trace: &IterationTrace,
    psi: &PsiFunction,
) -> Result<DiagnosticsReport> {
    const SLACK: f64 = 1e-10;
    let outputs = trace.tracked_outputs();

    let rule = match (trace.scheme, trace.target, &trace.alphas) {
        (SchemeKind::Coincidence, _, _) => DiagnosticRule::SuccessiveContraction,
        (SchemeKind::Mann, Some(_), Some(_)) => DiagnosticRule::TargetedContraction,
        _ => DiagnosticRule::StrictDecrease,
    };

    let mut report = DiagnosticsReport {
        rule,
        passed: true,
        first_violation: None,
        steps_checked: 0,
        slack: SLACK,
    };

    match rule {
        DiagnosticRule::SuccessiveContraction | DiagnosticRule::StrictDecrease => {
            let diffs: Vec<f64> = outputs.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
            if diffs.len() < 2 {
                return Err(CoreError::invalid("trace has fewer than 2 residuals"));
            }
            for i in 0..diffs.len() - 1 {
                let lhs = diffs[i + 1];
                let rhs = match rule {
                    DiagnosticRule::SuccessiveContraction => diffs[i] - psi.eval(diffs[i])?,
                    _ => diffs[i],
                };
                report.steps_checked += 1;
                if lhs > rhs + SLACK {
                    report.passed = false;
                    report.first_violation = Some(DiagnosticViolation { index: i + 1, lhs, rhs });
                    break;
                }
            }
        }
        DiagnosticRule::TargetedContraction => {
            let z = trace.target.expect("rule selected with target");
            let alphas = trace.alphas.as_ref().expect("rule selected with alphas");
            let errs: Vec<f64> = outputs.iter().map(|y| (y - z).abs()).collect();
            if errs.len() < 2 {
                return Err(CoreError::invalid("trace has fewer than 2 residuals"));
            }
            for i in 1..errs.len() {
                let lhs = errs[i];
                let rhs = errs[i - 1] - alphas[i - 1] * psi.eval(errs[i - 1])?;
                report.steps_checked += 1;
                if lhs > rhs + SLACK {
                    report.passed = false;
                    report.first_violation = Some(DiagnosticViolation { index: i, lhs, rhs });
                    break;
                }
            }
        }
    }
    Ok(report)
}
