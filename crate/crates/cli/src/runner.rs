//! Executes a resolved scenario and renders the deterministic report.
//!
//! Reports carry no timestamps and iterate BTree-ordered structures, so two
//! runs of the same scenario are byte-identical.

use anyhow::{anyhow, bail, Result};

use fplab_core::{
    best_approx, check_inequality, check_weak_compatibility, evaluate_inequality_at,
    find_common_fixed_points, monotonicity_diagnostics, verify_invariant_approximation,
    CheckReport, DiagnosticRule, InequalityKind, IterationStatus, IterationTrace, MapBundle,
    PiecewiseMap, SchemeKind,
};

use crate::scenario::{CheckSpec, IterationSpec, Scenario, WitnessSpec};

/// Tolerance for matching a published violation point by re-evaluation.
const PROBE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Expectation {
    pub item: String,
    pub met: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct TraceArtifact {
    pub file_name: String,
    pub csv: String,
}

#[derive(Debug)]
pub struct ScenarioOutcome {
    pub report: String,
    pub traces: Vec<TraceArtifact>,
    pub expectations: Vec<Expectation>,
}

impl ScenarioOutcome {
    pub fn all_met(&self) -> bool {
        self.expectations.iter().all(|e| e.met)
    }

    pub fn first_unmet(&self) -> Option<&Expectation> {
        self.expectations.iter().find(|e| !e.met)
    }
}

struct Report {
    lines: Vec<String>,
}

impl Report {
    fn new() -> Self {
        Report { lines: Vec::new() }
    }

    fn push(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    fn blank(&mut self) {
        self.lines.push(String::new());
    }

    fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

fn append_check_report(report: &mut Report, check: &CheckReport) {
    report.kv("tol", check.tol);
    report.kv("grid-points", check.grid_points);
    report.kv("pairs-checked", check.pairs_checked);
    report.kv("passed", check.passed);
    report.kv("max-margin", check.max_margin);
    if let Some(w) = &check.witness {
        report.push(format!(
            "witness: x={} y={} lhs={} rhs={} margin={}",
            w.x, w.y, w.lhs, w.rhs, w.margin
        ));
    }
    for note in &check.notes {
        report.kv("note", note);
    }
    for point in &check.skipped {
        report.kv("skipped", point);
    }
}

fn status_label(status: &IterationStatus) -> &'static str {
    match status {
        IterationStatus::Converged { .. } => "converged",
        IterationStatus::MaxIterations => "max-iterations",
        IterationStatus::SolveFailed { .. } => "solve-failed",
    }
}

fn rule_label(rule: DiagnosticRule) -> &'static str {
    match rule {
        DiagnosticRule::SuccessiveContraction => "successive-contraction",
        DiagnosticRule::TargetedContraction => "targeted-contraction",
        DiagnosticRule::StrictDecrease => "strict-decrease",
    }
}

/// 17-significant-digit scientific notation for trace files.
fn full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a trace as CSV with the fixed column set; unused cells are empty.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut out = String::from("n,parity,x_n,y_n,z_n,v_n,residual,alpha_n,beta_n\n");
    let opt = |v: Option<f64>| v.map(full).unwrap_or_default();
    let at = |v: &Option<Vec<f64>>, i: usize| opt(v.as_ref().and_then(|v| v.get(i).copied()));
    for (n, &x) in trace.iterates_x.iter().enumerate() {
        let y = opt(trace.outputs_y.get(n).copied());
        let z = at(&trace.outputs_z, n);
        let v = at(&trace.aux_v, n);
        let residual = opt(trace.residuals.get(n).copied().flatten());
        let alpha = at(&trace.alphas, n);
        let beta = at(&trace.betas, n);
        out.push_str(&format!(
            "{n},{},{},{y},{z},{v},{residual},{alpha},{beta}\n",
            n % 2,
            full(x)
        ));
    }
    out
}

fn bundle_for<'a>(
    scenario: &'a Scenario,
    kind: InequalityKind,
    check: &CheckSpec,
) -> Result<MapBundle<'a>> {
    let named = |field: &Option<String>, what: &str| -> Result<&'a PiecewiseMap> {
        let name = field
            .as_ref()
            .ok_or_else(|| anyhow!("check `{}` needs map `{what}`", check.kind))?;
        scenario.map(name)
    };
    Ok(match kind {
        InequalityKind::Contraction { .. } | InequalityKind::WeaklyContractive => {
            MapBundle::Single {
                t: named(&check.t, "t")?,
            }
        }
        InequalityKind::WeaklyContractiveWrt => MapBundle::Pair {
            t: named(&check.t, "t")?,
            f: named(&check.f, "f")?,
        },
        InequalityKind::AzamShakeel | InequalityKind::FgMin | InequalityKind::FgMax => {
            MapBundle::Triple {
                t: named(&check.t, "t")?,
                f: named(&check.f, "f")?,
                g: named(&check.g, "g")?,
            }
        }
        InequalityKind::FamilyMin => {
            let ts = check
                .ts
                .as_ref()
                .ok_or_else(|| anyhow!("family-min check needs `ts`"))?
                .iter()
                .map(|n| scenario.map(n))
                .collect::<Result<Vec<_>>>()?;
            MapBundle::Family {
                ts,
                f: named(&check.f, "f")?,
                g: named(&check.g, "g")?,
            }
        }
    })
}

fn verify_witness_probe(
    kind: InequalityKind,
    bundle: &MapBundle,
    psi: &fplab_core::PsiFunction,
    probe: &WitnessSpec,
    tol: f64,
) -> Result<(bool, String)> {
    let x = probe.x.resolve()?;
    let y = probe.y.resolve()?;
    let want_lhs = probe.lhs.resolve()?;
    let want_rhs = probe.rhs.resolve()?;
    let (lhs, rhs) = evaluate_inequality_at(kind, bundle, psi, x, y)?;
    let violated = lhs > rhs + tol;
    let lhs_ok = (lhs - want_lhs).abs() <= PROBE_TOL;
    let rhs_ok = (rhs - want_rhs).abs() <= PROBE_TOL;
    let met = violated && lhs_ok && rhs_ok;
    let detail = format!(
        "at ({x}, {y}): lhs={lhs} (expected {want_lhs}), rhs={rhs} (expected {want_rhs}), violated={violated}"
    );
    Ok((met, detail))
}

fn iteration_label(spec: &IterationSpec, index: usize) -> String {
    match &spec.label {
        Some(l) => l.clone(),
        None => format!("{}-{}", spec.scheme, index + 1),
    }
}

/// Runs every declared item in order and assembles the report, the trace
/// files and the expectation outcomes.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioOutcome> {
    let mut report = Report::new();
    let mut expectations: Vec<Expectation> = Vec::new();
    let mut traces: Vec<TraceArtifact> = Vec::new();

    report.kv("scenario", &scenario.name);
    report.kv("schema-version", crate::scenario::SCHEMA_VERSION);
    if let Some(d) = &scenario.description {
        report.kv("description", d);
    }
    for note in &scenario.notes {
        report.kv("note", note);
    }
    report.kv("domain", &scenario.domain);
    report.kv("psi", scenario.psi.label());
    report.kv("grid-points-per-interval", scenario.grid.points_per_interval());
    match scenario.grid.open_endpoint_inset() {
        Some(i) => report.kv("grid-inset", i),
        None => report.kv("grid-inset", "default (1e-6 of interval length)"),
    }

    let expect = |expectations: &mut Vec<Expectation>,
                      report: &mut Report,
                      item: String,
                      met: bool,
                      detail: String| {
        report.push(format!(
            "expectation: {item} -> {}",
            if met { "met" } else { "UNMET" }
        ));
        expectations.push(Expectation { item, met, detail });
    };

    for (i, check) in scenario.checks.iter().enumerate() {
        let kind = scenario.kind_of(check)?;
        let bundle = bundle_for(scenario, kind, check)?;
        let psi = scenario.psi_for(check.psi.as_deref())?;
        let tol = scenario.check_tol(check)?;
        let outcome = check_inequality(kind, &bundle, &psi, &scenario.grid, tol)?;

        report.blank();
        report.push(format!("[check {}: {kind}]", i + 1));
        report.kv("psi", psi.label());
        append_check_report(&mut report, &outcome);

        if let Some(expected) = &check.expect {
            let want_pass = match expected.as_str() {
                "pass" => true,
                "fail" => false,
                other => bail!("check expectation must be pass|fail, got `{other}`"),
            };
            let met = outcome.passed == want_pass;
            expect(
                &mut expectations,
                &mut report,
                format!("check {} ({kind}) {expected}", i + 1),
                met,
                format!("passed={}", outcome.passed),
            );
        }
        if let Some(probe) = &check.witness {
            let (met, detail) = verify_witness_probe(kind, &bundle, &psi, probe, tol)?;
            report.kv("witness-probe", &detail);
            expect(
                &mut expectations,
                &mut report,
                format!("check {} ({kind}) witness probe", i + 1),
                met,
                detail,
            );
        }
    }

    for (i, scan) in scenario.fixed_point_scans.iter().enumerate() {
        let maps = scan
            .maps
            .iter()
            .map(|n| scenario.map(n))
            .collect::<Result<Vec<_>>>()?;
        let residual_tol = match &scan.residual_tol {
            Some(t) => t.resolve()?,
            None => 1e-9,
        };
        let outcome = find_common_fixed_points(&maps, &scenario.grid, residual_tol)?;

        report.blank();
        report.push(format!("[scan {}]", i + 1));
        report.kv("maps", scan.maps.join(", "));
        report.kv("residual-tol", residual_tol);
        report.kv("grid-points", outcome.grid_points);
        report.kv("whole-domain", outcome.whole_domain);
        if outcome.points.is_empty() {
            report.kv("points", "none");
        } else {
            let pts: Vec<String> = outcome.points.iter().map(|p| p.to_string()).collect();
            report.kv("points", pts.join(", "));
        }

        let point_tol = match &scan.point_tol {
            Some(t) => t.resolve()?,
            None => 1e-9,
        };
        if let Some(expected) = &scan.expect_points {
            let want: Vec<f64> = expected
                .iter()
                .map(|p| p.resolve().map_err(Into::into))
                .collect::<Result<Vec<f64>>>()?;
            let met = outcome.points.len() == want.len()
                && outcome
                    .points
                    .iter()
                    .zip(&want)
                    .all(|(a, b)| (a - b).abs() <= point_tol);
            expect(
                &mut expectations,
                &mut report,
                format!("scan {} points", i + 1),
                met,
                format!("found {} point(s)", outcome.points.len()),
            );
        }
        if scan.expect_empty == Some(true) {
            let met = outcome.points.is_empty() && !outcome.whole_domain;
            expect(
                &mut expectations,
                &mut report,
                format!("scan {} empty", i + 1),
                met,
                format!("found {} point(s)", outcome.points.len()),
            );
        }
        if let Some(want) = scan.expect_whole_domain {
            let met = outcome.whole_domain == want;
            expect(
                &mut expectations,
                &mut report,
                format!("scan {} whole-domain {want}", i + 1),
                met,
                format!("whole-domain={}", outcome.whole_domain),
            );
        }
    }

    for (i, compat) in scenario.compatibility_checks.iter().enumerate() {
        let a = scenario.map(&compat.a)?;
        let b = scenario.map(&compat.b)?;
        let tol = match &compat.tol {
            Some(t) => t.resolve()?,
            None => 1e-9,
        };
        let outcome = check_weak_compatibility(a, b, &scenario.grid, tol)?;

        report.blank();
        report.push(format!("[compatibility {}: {} ~ {}]", i + 1, compat.a, compat.b));
        append_check_report(&mut report, &outcome);

        if let Some(expected) = &compat.expect {
            let want_pass = match expected.as_str() {
                "pass" => true,
                "fail" => false,
                other => bail!("compatibility expectation must be pass|fail, got `{other}`"),
            };
            let met = outcome.passed == want_pass;
            expect(
                &mut expectations,
                &mut report,
                format!("compatibility {} {expected}", i + 1),
                met,
                format!("passed={}", outcome.passed),
            );
        }
    }

    for (i, spec) in scenario.iterations.iter().enumerate() {
        let scheme = scenario.scheme_of(spec)?;
        let cfg = scenario.run_config(spec)?;
        let t = scenario.map(&spec.t)?;
        let f_or_t = |field: &Option<String>| -> Result<&PiecewiseMap> {
            match field {
                Some(name) => scenario.map(name),
                None => Ok(t),
            }
        };
        let trace = match scheme {
            SchemeKind::Picard => fplab_core::picard_iterate(t, &cfg)?,
            SchemeKind::Coincidence => {
                let f = f_or_t(&spec.f)?;
                let g = f_or_t(&spec.g)?;
                fplab_core::coincidence_iterate(t, f, g, &cfg)?
            }
            SchemeKind::Mann => {
                let f = f_or_t(&spec.f)?;
                let g = f_or_t(&spec.g)?;
                let alpha = spec
                    .alpha
                    .as_ref()
                    .ok_or_else(|| anyhow!("mann iteration needs `alpha`"))?
                    .resolve()?;
                fplab_core::mann_iterate(t, f, g, &alpha, &cfg)?
            }
            SchemeKind::Ishikawa => {
                let f = f_or_t(&spec.f)?;
                let g = f_or_t(&spec.g)?;
                let alpha = spec
                    .alpha
                    .as_ref()
                    .ok_or_else(|| anyhow!("ishikawa iteration needs `alpha`"))?
                    .resolve()?;
                let beta = spec
                    .beta
                    .as_ref()
                    .ok_or_else(|| anyhow!("ishikawa iteration needs `beta`"))?
                    .resolve()?;
                fplab_core::ishikawa_iterate(t, f, g, &alpha, &beta, &cfg)?
            }
        };

        let label = iteration_label(spec, i);
        let file_name = format!("{}__{}.csv", scenario.name, label);

        report.blank();
        report.push(format!("[iteration {}: {}]", i + 1, spec.scheme));
        report.kv("label", &label);
        report.kv("x0", cfg.x0);
        report.kv("max-iter", cfg.max_iter);
        report.kv("conv-tol", cfg.conv_tol);
        if let Some(z) = cfg.target {
            report.kv("target", z);
        }
        report.kv("status", status_label(&trace.status));
        match trace.status {
            IterationStatus::Converged { limit, at_iter } => {
                report.kv("limit", limit);
                report.kv("iterations", at_iter);
            }
            IterationStatus::MaxIterations => {
                report.kv("iterations", trace.iterates_x.len() - 1);
            }
            IterationStatus::SolveFailed { at_iter, stage } => {
                report.kv("failed-at", at_iter);
                report.kv(
                    "failed-stage",
                    match stage {
                        fplab_core::SolveStage::Inner => "inner",
                        fplab_core::SolveStage::Outer => "outer",
                    },
                );
            }
        }
        for warning in &trace.warnings {
            report.kv("warning", warning);
        }
        report.kv("trace-file", &file_name);

        let diagnostics = if spec.diagnostics == Some(true) {
            let d = monotonicity_diagnostics(&trace, &scenario.psi)?;
            report.kv(
                "diagnostics",
                format!(
                    "{} {}",
                    rule_label(d.rule),
                    if d.passed { "pass" } else { "fail" }
                ),
            );
            if let Some(v) = d.first_violation {
                report.kv(
                    "diagnostics-violation",
                    format!("index={} lhs={} rhs={}", v.index, v.lhs, v.rhs),
                );
            }
            Some(d)
        } else {
            None
        };

        traces.push(TraceArtifact {
            file_name,
            csv: trace_csv(&trace),
        });

        if let Some(expected) = &spec.expect_status {
            let met = status_label(&trace.status) == expected;
            expect(
                &mut expectations,
                &mut report,
                format!("iteration {} status {expected}", i + 1),
                met,
                format!("status={}", status_label(&trace.status)),
            );
        }
        if let Some(expected) = &spec.expect_limit {
            let want = expected.resolve()?;
            let tol = match &spec.limit_tol {
                Some(t) => t.resolve()?,
                None => 1e-8,
            };
            let met = match trace.status {
                IterationStatus::Converged { limit, .. } => (limit - want).abs() <= tol,
                _ => false,
            };
            expect(
                &mut expectations,
                &mut report,
                format!("iteration {} limit", i + 1),
                met,
                format!("status={}", status_label(&trace.status)),
            );
        }
        if let Some(expected) = &spec.expect_diagnostics {
            let want_pass = match expected.as_str() {
                "pass" => true,
                "fail" => false,
                other => bail!("diagnostics expectation must be pass|fail, got `{other}`"),
            };
            let met = diagnostics
                .as_ref()
                .map(|d| d.passed == want_pass)
                .unwrap_or(false);
            expect(
                &mut expectations,
                &mut report,
                format!("iteration {} diagnostics {expected}", i + 1),
                met,
                "see diagnostics line".to_string(),
            );
        }
    }

    if let Some(spec) = &scenario.approx {
        let m = scenario.compact_set(spec)?;
        let x0 = spec.x0.resolve()?;
        report.blank();
        report.push("[approx]".to_string());
        report.kv("set", m.domain());
        report.kv("x0", x0);

        let battery = match (&spec.t, &spec.f, &spec.g) {
            (Some(t), Some(f), Some(g)) => Some(verify_invariant_approximation(
                scenario.map(t)?,
                scenario.map(f)?,
                scenario.map(g)?,
                &m,
                x0,
                &scenario.psi,
                &scenario.grid,
            )?),
            _ => None,
        };
        let best = match &battery {
            Some(b) => b.best.clone(),
            None => best_approx(&m, x0)?,
        };
        report.kv("dist", best.dist);
        let pts: Vec<String> = best.points.iter().map(|p| p.to_string()).collect();
        report.kv("points", pts.join(", "));

        if let Some(b) = &battery {
            for h in &b.hypotheses {
                report.push(format!(
                    "hypothesis: {} -> {} ({})",
                    h.name,
                    if h.passed { "pass" } else { "fail" },
                    h.detail
                ));
            }
            report.push(format!(
                "conclusion: holds={} point={} residual={}",
                b.conclusion.holds,
                b.conclusion
                    .point
                    .map(|p| p.to_string())
                    .unwrap_or_else(|| "none".to_string()),
                b.conclusion.residual
            ));
        }

        if let Some(expected) = &spec.expect_dist {
            let want = expected.resolve()?;
            let met = (best.dist - want).abs() <= 1e-9;
            expect(
                &mut expectations,
                &mut report,
                "approx dist".to_string(),
                met,
                format!("dist={}", best.dist),
            );
        }
        if let Some(expected) = &spec.expect_points {
            let want: Vec<f64> = expected
                .iter()
                .map(|p| p.resolve().map_err(Into::into))
                .collect::<Result<Vec<f64>>>()?;
            let met = best.points.len() == want.len()
                && best.points.iter().zip(&want).all(|(a, b)| (a - b).abs() <= 1e-9);
            expect(
                &mut expectations,
                &mut report,
                "approx points".to_string(),
                met,
                format!("found {} point(s)", best.points.len()),
            );
        }
        if let Some(want) = spec.expect_conclusion {
            let met = battery.as_ref().map(|b| b.conclusion.holds) == Some(want);
            expect(
                &mut expectations,
                &mut report,
                format!("approx conclusion {want}"),
                met,
                "see conclusion line".to_string(),
            );
        }
        if let Some(name) = &spec.expect_failed_hypothesis {
            let met = battery
                .as_ref()
                .and_then(|b| b.hypotheses.iter().find(|h| h.name == name.as_str()))
                .map(|h| !h.passed)
                .unwrap_or(false);
            expect(
                &mut expectations,
                &mut report,
                format!("approx hypothesis {name} fails"),
                met,
                "see hypothesis lines".to_string(),
            );
        }
    }

    report.blank();
    report.push("[expectations]".to_string());
    let met = expectations.iter().filter(|e| e.met).count();
    report.kv("met", format!("{met} of {}", expectations.len()));
    if let Some(first) = expectations.iter().find(|e| !e.met) {
        report.kv("first-unmet", format!("{} ({})", first.item, first.detail));
    }

    Ok(ScenarioOutcome {
        report: report.render(),
        traces,
        expectations,
    })
}
