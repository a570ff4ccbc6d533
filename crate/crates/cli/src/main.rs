use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use fplab_cli::scenario::{CheckSpec, Overrides, Scenario};
use fplab_cli::{builtin, list_builtins, run_scenario, trace_csv};
use fplab_core::schema::RealSpec;
use fplab_core::{
    check_inequality, monotonicity_diagnostics, parse_real, verify_invariant_approximation,
    IterationStatus, RunConfig, SchemeKind, StepSchedule,
};

/// Checks, iteration runs and best-approximation batteries for piecewise
/// selfmaps of 1-D interval domains.
#[derive(Parser)]
#[command(name = "fplab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy, Default)]
struct GridArgs {
    /// Grid points per interval (overrides the scenario grid).
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Absolute inset for open endpoints.
    #[arg(long, global = true)]
    inset: Option<f64>,
    /// Inequality check tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Iteration budget (trace rows including the seed).
    #[arg(long, global = true)]
    max_iter: Option<usize>,
}

impl GridArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            grid_points: self.grid_n,
            inset: self.inset,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the bundled scenarios.
    List,
    /// Run a bundled scenario by name.
    Example {
        name: String,
        /// Directory for the report and trace files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run a scenario file.
    Run {
        file: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run one inequality check against maps from a scenario file.
    Check {
        file: PathBuf,
        /// contraction|weakly-contractive|weakly-contractive-wrt|azam-shakeel|fg-min|fg-max|family-min
        #[arg(long)]
        kind: String,
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        /// Comma-separated family member names (family-min).
        #[arg(long)]
        ts: Option<String>,
        /// Contraction constant.
        #[arg(long)]
        k: Option<String>,
        /// psi family label (power-ratio|half-linear).
        #[arg(long)]
        psi: Option<String>,
        /// Write the report under this directory instead of stdout only.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run one iteration scheme against maps from a scenario file.
    Iterate {
        file: PathBuf,
        /// picard|coincidence|mann|ishikawa
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        t: String,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        x0: String,
        /// Constant step size for the one/two-step schemes.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        conv_tol: Option<String>,
        #[arg(long)]
        target: Option<String>,
        /// csv writes the trace to stdout; report prints the summary.
        #[arg(long, default_value = "report")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run the approximation section of a scenario file.
    Approx {
        file: PathBuf,
        /// Override the anchor point.
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
    },
}

fn load_scenario(path: &Path, overrides: Overrides) -> Result<Scenario> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading scenario file {}", path.display()))?;
    Scenario::from_toml(&text, overrides)
}

fn write_out(dir: &Path, file: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(file);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Exit 0 when all expectations are met (or none are declared), 1 when an
/// expectation is unmet, 2 on hard errors.
fn run_and_report(scenario: &Scenario, out: &Path) -> Result<bool> {
    let outcome = run_scenario(scenario)?;
    let report_path = write_out(out, &format!("{}.report.txt", scenario.name), &outcome.report)?;
    for trace in &outcome.traces {
        write_out(out, &trace.file_name, &trace.csv)?;
    }
    print!("{}", outcome.report);
    println!("report-file: {}", report_path.display());
    if let Some(first) = outcome.first_unmet() {
        println!("diagnostics: first unmet expectation: {} ({})", first.item, first.detail);
    }
    Ok(outcome.all_met())
}

fn real_arg(value: &Option<String>) -> Result<Option<f64>> {
    value.as_deref().map(parse_real).transpose().map_err(Into::into)
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for name in list_builtins() {
                println!("{name}");
            }
            Ok(true)
        }
        Command::Example { name, out, grid } => {
            let text = builtin(&name)
                .ok_or_else(|| anyhow!("no bundled scenario named `{name}` (see `fplab list`)"))?;
            let scenario = Scenario::from_toml(text, grid.overrides())?;
            run_and_report(&scenario, &out)
        }
        Command::Run { file, out, grid } => {
            let scenario = load_scenario(&file, grid.overrides())?;
            run_and_report(&scenario, &out)
        }
        Command::Check {
            file,
            kind,
            t,
            f,
            g,
            ts,
            k,
            psi,
            out,
            grid,
        } => {
            let scenario = load_scenario(&file, grid.overrides())?;
            let spec = CheckSpec {
                kind,
                t,
                f,
                g,
                ts: ts.map(|s| s.split(',').map(|p| p.trim().to_string()).collect()),
                k: k.map(RealSpec::Text),
                psi,
                tol: None,
                expect: None,
                witness: None,
            };
            let ineq = scenario.kind_of(&spec)?;
            let bundle = bundle_from_spec(&scenario, ineq, &spec)?;
            let psi = scenario.psi_for(spec.psi.as_deref())?;
            let tol = scenario.check_tol(&spec)?;
            let report = check_inequality(ineq, &bundle, &psi, &scenario.grid, tol)?;
            let mut text = format!(
                "kind: {ineq}\npsi: {}\ntol: {tol}\ngrid-points: {}\npairs-checked: {}\npassed: {}\nmax-margin: {}\n",
                psi.label(),
                report.grid_points,
                report.pairs_checked,
                report.passed,
                report.max_margin,
            );
            if let Some(w) = &report.witness {
                text.push_str(&format!(
                    "witness: x={} y={} lhs={} rhs={} margin={}\n",
                    w.x, w.y, w.lhs, w.rhs, w.margin
                ));
            }
            print!("{text}");
            if let Some(dir) = out {
                write_out(&dir, &format!("{}.check.txt", scenario.name), &text)?;
            }
            Ok(true)
        }
        Command::Iterate {
            file,
            scheme,
            t,
            f,
            g,
            x0,
            alpha,
            beta,
            conv_tol,
            target,
            format,
            out,
            grid,
        } => {
            let scenario = load_scenario(&file, grid.overrides())?;
            let tm = scenario.map(&t)?;
            let fm = match &f {
                Some(name) => scenario.map(name)?,
                None => tm,
            };
            let gm = match &g {
                Some(name) => scenario.map(name)?,
                None => tm,
            };
            let mut cfg = RunConfig::new(parse_real(&x0)?);
            if let Some(m) = grid.max_iter {
                cfg = cfg.with_max_iter(m);
            }
            if let Some(v) = real_arg(&conv_tol)? {
                cfg = cfg.with_conv_tol(v);
            }
            if let Some(v) = real_arg(&target)? {
                cfg = cfg.with_target(v);
            }
            let scheme = match scheme.as_str() {
                "picard" => SchemeKind::Picard,
                "coincidence" => SchemeKind::Coincidence,
                "mann" => SchemeKind::Mann,
                "ishikawa" => SchemeKind::Ishikawa,
                other => bail!("unknown scheme `{other}`"),
            };
            let schedule = |v: &Option<String>, name: &str| -> Result<StepSchedule> {
                let v = real_arg(v)?
                    .ok_or_else(|| anyhow!("scheme `{scheme}` needs --{name}"))?;
                Ok(StepSchedule::constant(v)?)
            };
            let trace = match scheme {
                SchemeKind::Picard => fplab_core::picard_iterate(tm, &cfg)?,
                SchemeKind::Coincidence => fplab_core::coincidence_iterate(tm, fm, gm, &cfg)?,
                SchemeKind::Mann => {
                    fplab_core::mann_iterate(tm, fm, gm, &schedule(&alpha, "alpha")?, &cfg)?
                }
                SchemeKind::Ishikawa => fplab_core::ishikawa_iterate(
                    tm,
                    fm,
                    gm,
                    &schedule(&alpha, "alpha")?,
                    &schedule(&beta, "beta")?,
                    &cfg,
                )?,
            };
            let csv = trace_csv(&trace);
            match format.as_str() {
                "csv" => print!("{csv}"),
                "report" => {
                    println!("scheme: {scheme}");
                    println!("x0: {}", cfg.x0);
                    match trace.status {
                        IterationStatus::Converged { limit, at_iter } => {
                            println!("status: converged");
                            println!("limit: {limit}");
                            println!("iterations: {at_iter}");
                        }
                        IterationStatus::MaxIterations => {
                            println!("status: max-iterations");
                            println!("iterations: {}", trace.iterates_x.len() - 1);
                        }
                        IterationStatus::SolveFailed { at_iter, stage } => {
                            println!("status: solve-failed");
                            println!("failed-at: {at_iter} ({stage:?})");
                        }
                    }
                    let diag = monotonicity_diagnostics(&trace, &scenario.psi);
                    if let Ok(d) = diag {
                        println!("diagnostics: {:?} pass={}", d.rule, d.passed);
                    }
                }
                other => bail!("unknown format `{other}` (expected csv|report)"),
            }
            if let Some(dir) = out {
                let path = write_out(&dir, &format!("{}.{scheme}.csv", scenario.name), &csv)?;
                println!("trace-file: {}", path.display());
            }
            Ok(true)
        }
        Command::Approx { file, u, out, grid } => {
            let scenario = load_scenario(&file, grid.overrides())?;
            let spec = scenario
                .approx
                .clone()
                .ok_or_else(|| anyhow!("scenario has no [approx] section"))?;
            let m = scenario.compact_set(&spec)?;
            let x0 = match &u {
                Some(v) => parse_real(v)?,
                None => spec.x0.resolve()?,
            };
            let mut text = format!("set: {}\nx0: {x0}\n", m.domain());
            match (&spec.t, &spec.f, &spec.g) {
                (Some(t), Some(f), Some(g)) => {
                    let battery = verify_invariant_approximation(
                        scenario.map(t)?,
                        scenario.map(f)?,
                        scenario.map(g)?,
                        &m,
                        x0,
                        &scenario.psi,
                        &scenario.grid,
                    )?;
                    text.push_str(&format!(
                        "dist: {}\npoints: {}\n",
                        battery.best.dist,
                        battery
                            .best
                            .points
                            .iter()
                            .map(|p| p.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ));
                    for h in &battery.hypotheses {
                        text.push_str(&format!(
                            "hypothesis: {} -> {}\n",
                            h.name,
                            if h.passed { "pass" } else { "fail" }
                        ));
                    }
                    text.push_str(&format!(
                        "conclusion: holds={} residual={}\n",
                        battery.conclusion.holds, battery.conclusion.residual
                    ));
                }
                _ => {
                    let best = fplab_core::best_approx(&m, x0)?;
                    text.push_str(&format!(
                        "dist: {}\npoints: {}\n",
                        best.dist,
                        best.points
                            .iter()
                            .map(|p| p.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ));
                }
            }
            print!("{text}");
            if let Some(dir) = out {
                write_out(&dir, &format!("{}.approx.txt", scenario.name), &text)?;
            }
            Ok(true)
        }
    }
}

fn bundle_from_spec<'a>(
    scenario: &'a Scenario,
    kind: fplab_core::InequalityKind,
    spec: &CheckSpec,
) -> Result<fplab_core::MapBundle<'a>> {
    use fplab_core::{InequalityKind as K, MapBundle};
    let named = |field: &Option<String>, what: &str| -> Result<&'a fplab_core::PiecewiseMap> {
        let name = field
            .as_ref()
            .ok_or_else(|| anyhow!("check needs --{what}"))?;
        scenario.map(name)
    };
    Ok(match kind {
        K::Contraction { .. } | K::WeaklyContractive => MapBundle::Single {
            t: named(&spec.t, "t")?,
        },
        K::WeaklyContractiveWrt => MapBundle::Pair {
            t: named(&spec.t, "t")?,
            f: named(&spec.f, "f")?,
        },
        K::AzamShakeel | K::FgMin | K::FgMax => MapBundle::Triple {
            t: named(&spec.t, "t")?,
            f: named(&spec.f, "f")?,
            g: named(&spec.g, "g")?,
        },
        K::FamilyMin => MapBundle::Family {
            ts: spec
                .ts
                .as_ref()
                .ok_or_else(|| anyhow!("family-min needs --ts"))?
                .iter()
                .map(|n| scenario.map(n))
                .collect::<Result<Vec<_>>>()?,
            f: named(&spec.f, "f")?,
            g: named(&spec.g, "g")?,
        },
    })
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
