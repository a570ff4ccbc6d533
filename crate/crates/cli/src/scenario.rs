//! Scenario files: a domain, named maps, a psi choice, and lists of
//! checks, scans, compatibility checks, iterations and an optional
//! approximation section, each with inline expectations.
//!
//! Numeric fields accept rational strings ("4/3") everywhere.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use fplab_core::schema::{DomainSpec, GridSpecSpec, MapSpec, RealSpec};
use fplab_core::{
    CompactSet, Domain, GridSpec, InequalityKind, PiecewiseMap, PsiFunction, RunConfig,
    SchemeKind, StepSchedule,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub notes: Vec<String>,
    pub domain: DomainSpec,
    #[serde(default)]
    pub psi: Option<PsiSpec>,
    #[serde(default)]
    pub grid: Option<GridSpecSpec>,
    #[serde(default)]
    pub maps: Vec<MapSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub fixed_point_scans: Vec<ScanSpec>,
    #[serde(default)]
    pub compatibility_checks: Vec<CompatSpec>,
    #[serde(default)]
    pub iterations: Vec<IterationSpec>,
    #[serde(default)]
    pub approx: Option<ApproxSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSpec {
    pub family: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub kind: String,
    #[serde(default)]
    pub t: Option<String>,
    #[serde(default)]
    pub f: Option<String>,
    #[serde(default)]
    pub g: Option<String>,
    /// Family members for the family-min check.
    #[serde(default)]
    pub ts: Option<Vec<String>>,
    /// Contraction constant.
    #[serde(default)]
    pub k: Option<RealSpec>,
    /// Per-check psi override (family label).
    #[serde(default)]
    pub psi: Option<String>,
    #[serde(default)]
    pub tol: Option<RealSpec>,
    /// "pass" or "fail".
    #[serde(default)]
    pub expect: Option<String>,
    /// A concrete violation to verify by direct evaluation (fail only).
    #[serde(default)]
    pub witness: Option<WitnessSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSpec {
    pub x: RealSpec,
    pub y: RealSpec,
    pub lhs: RealSpec,
    pub rhs: RealSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub maps: Vec<String>,
    #[serde(default)]
    pub residual_tol: Option<RealSpec>,
    #[serde(default)]
    pub expect_points: Option<Vec<RealSpec>>,
    #[serde(default)]
    pub expect_empty: Option<bool>,
    #[serde(default)]
    pub expect_whole_domain: Option<bool>,
    #[serde(default)]
    pub point_tol: Option<RealSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompatSpec {
    pub a: String,
    pub b: String,
    #[serde(default)]
    pub tol: Option<RealSpec>,
    #[serde(default)]
    pub expect: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub kind: String,
    #[serde(default)]
    pub value: Option<RealSpec>,
    #[serde(default)]
    pub c: Option<RealSpec>,
    #[serde(default)]
    pub values: Option<Vec<RealSpec>>,
    #[serde(default)]
    pub divergent_sum: Option<bool>,
}

impl ScheduleSpec {
    pub fn resolve(&self) -> Result<StepSchedule> {
        match self.kind.as_str() {
            "constant" => {
                let v = self
                    .value
                    .as_ref()
                    .ok_or_else(|| anyhow!("constant schedule needs `value`"))?
                    .resolve()?;
                Ok(StepSchedule::constant(v)?)
            }
            "harmonic" => {
                let c = self
                    .c
                    .as_ref()
                    .ok_or_else(|| anyhow!("harmonic schedule needs `c`"))?
                    .resolve()?;
                Ok(StepSchedule::harmonic(c)?)
            }
            "table" => {
                let values = self
                    .values
                    .as_ref()
                    .ok_or_else(|| anyhow!("table schedule needs `values`"))?
                    .iter()
                    .map(|v| v.resolve().map_err(Into::into))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(StepSchedule::table(
                    values,
                    self.divergent_sum.unwrap_or(false),
                )?)
            }
            other => bail!("unknown schedule kind `{other}`"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationSpec {
    pub scheme: String,
    #[serde(default)]
    pub label: Option<String>,
    pub t: String,
    #[serde(default)]
    pub f: Option<String>,
    #[serde(default)]
    pub g: Option<String>,
    pub x0: RealSpec,
    #[serde(default)]
    pub alpha: Option<ScheduleSpec>,
    #[serde(default)]
    pub beta: Option<ScheduleSpec>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub conv_tol: Option<RealSpec>,
    #[serde(default)]
    pub solve_tol: Option<RealSpec>,
    #[serde(default)]
    pub target: Option<RealSpec>,
    /// Run the monotonicity diagnostics on the finished trace.
    #[serde(default)]
    pub diagnostics: Option<bool>,
    /// "converged", "max-iterations" or "solve-failed".
    #[serde(default)]
    pub expect_status: Option<String>,
    #[serde(default)]
    pub expect_limit: Option<RealSpec>,
    #[serde(default)]
    pub limit_tol: Option<RealSpec>,
    /// "pass" or "fail" for the diagnostics outcome.
    #[serde(default)]
    pub expect_diagnostics: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxSpec {
    pub set: DomainSpec,
    pub x0: RealSpec,
    #[serde(default)]
    pub t: Option<String>,
    #[serde(default)]
    pub f: Option<String>,
    #[serde(default)]
    pub g: Option<String>,
    #[serde(default)]
    pub expect_dist: Option<RealSpec>,
    #[serde(default)]
    pub expect_points: Option<Vec<RealSpec>>,
    #[serde(default)]
    pub expect_conclusion: Option<bool>,
    #[serde(default)]
    pub expect_failed_hypothesis: Option<String>,
}

/// Command-line overrides applied on top of a scenario file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub grid_points: Option<usize>,
    pub inset: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
}

/// A fully resolved scenario ready to execute.
#[derive(Debug)]
pub struct Scenario {
    pub name: String,
    pub description: Option<String>,
    pub notes: Vec<String>,
    pub domain: Domain,
    pub maps: BTreeMap<String, PiecewiseMap>,
    pub psi: PsiFunction,
    pub grid: GridSpec,
    pub checks: Vec<CheckSpec>,
    pub fixed_point_scans: Vec<ScanSpec>,
    pub compatibility_checks: Vec<CompatSpec>,
    pub iterations: Vec<IterationSpec>,
    pub approx: Option<ApproxSpec>,
    pub overrides: Overrides,
}

impl Scenario {
    pub fn from_toml(text: &str, overrides: Overrides) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).context("parsing scenario file")?;
        Scenario::resolve(file, overrides)
    }

    fn resolve(file: ScenarioFile, overrides: Overrides) -> Result<Self> {
        if file.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            );
        }
        let domain = file.domain.resolve()?;
        let mut maps = BTreeMap::new();
        for spec in &file.maps {
            let map = spec.resolve()?;
            if map.domain() != &domain {
                bail!(
                    "map `{}` covers {} instead of the scenario domain {}",
                    map.name(),
                    map.domain(),
                    domain
                );
            }
            if maps.insert(spec.name.clone(), map).is_some() {
                bail!("duplicate map name `{}`", spec.name);
            }
        }
        let psi = match &file.psi {
            Some(p) => PsiFunction::from_label(&p.family)
                .ok_or_else(|| anyhow!("unknown psi family `{}`", p.family))?,
            None => PsiFunction::power_ratio(),
        };
        let mut grid = match &file.grid {
            Some(g) => g.resolve()?,
            None => GridSpec::default(),
        };
        if let Some(n) = overrides.grid_points {
            let inset = grid.open_endpoint_inset();
            grid = GridSpec::new(n)?;
            if let Some(i) = inset {
                grid = grid.with_inset(i)?;
            }
        }
        if let Some(i) = overrides.inset {
            grid = grid.with_inset(i)?;
        }
        for check in &file.checks {
            if check.witness.is_some() && check.expect.as_deref() != Some("fail") {
                bail!("check `{}`: a witness probe needs expect = \"fail\"", check.kind);
            }
        }
        Ok(Scenario {
            name: file.name,
            description: file.description,
            notes: file.notes,
            domain,
            maps,
            psi,
            grid,
            checks: file.checks,
            fixed_point_scans: file.fixed_point_scans,
            compatibility_checks: file.compatibility_checks,
            iterations: file.iterations,
            approx: file.approx,
            overrides,
        })
    }

    pub fn map(&self, name: &str) -> Result<&PiecewiseMap> {
        self.maps
            .get(name)
            .ok_or_else(|| anyhow!("scenario references unknown map `{name}`"))
    }

    pub fn psi_for(&self, label: Option<&str>) -> Result<PsiFunction> {
        match label {
            None => Ok(self.psi.clone()),
            Some(l) => {
                PsiFunction::from_label(l).ok_or_else(|| anyhow!("unknown psi family `{l}`"))
            }
        }
    }

    pub fn kind_of(&self, check: &CheckSpec) -> Result<InequalityKind> {
        Ok(match check.kind.as_str() {
            "contraction" => InequalityKind::Contraction {
                k: check
                    .k
                    .as_ref()
                    .ok_or_else(|| anyhow!("contraction check needs `k`"))?
                    .resolve()?,
            },
            "weakly-contractive" => InequalityKind::WeaklyContractive,
            "weakly-contractive-wrt" => InequalityKind::WeaklyContractiveWrt,
            "azam-shakeel" => InequalityKind::AzamShakeel,
            "fg-min" => InequalityKind::FgMin,
            "fg-max" => InequalityKind::FgMax,
            "family-min" => InequalityKind::FamilyMin,
            other => bail!("unknown inequality kind `{other}`"),
        })
    }

    pub fn check_tol(&self, check: &CheckSpec) -> Result<f64> {
        if let Some(t) = self.overrides.tol {
            return Ok(t);
        }
        match &check.tol {
            Some(t) => Ok(t.resolve()?),
            None => Ok(1e-12),
        }
    }

    pub fn run_config(&self, spec: &IterationSpec) -> Result<RunConfig> {
        let x0 = spec.x0.resolve()?;
        let mut cfg = RunConfig::new(x0);
        if let Some(m) = spec.max_iter {
            cfg = cfg.with_max_iter(m);
        }
        if let Some(m) = self.overrides.max_iter {
            cfg = cfg.with_max_iter(m);
        }
        if let Some(t) = &spec.conv_tol {
            cfg = cfg.with_conv_tol(t.resolve()?);
        }
        if let Some(t) = &spec.solve_tol {
            cfg = cfg.with_solve_tol(t.resolve()?);
        }
        if let Some(t) = &spec.target {
            cfg = cfg.with_target(t.resolve()?);
        }
        Ok(cfg)
    }

    pub fn scheme_of(&self, spec: &IterationSpec) -> Result<SchemeKind> {
        Ok(match spec.scheme.as_str() {
            "picard" => SchemeKind::Picard,
            "coincidence" => SchemeKind::Coincidence,
            "mann" => SchemeKind::Mann,
            "ishikawa" => SchemeKind::Ishikawa,
            other => bail!("unknown scheme `{other}`"),
        })
    }

    pub fn compact_set(&self, spec: &ApproxSpec) -> Result<CompactSet> {
        Ok(CompactSet::new(spec.set.resolve()?)?)
    }
}
