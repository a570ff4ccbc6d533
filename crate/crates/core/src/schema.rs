//! Serde model of the map-definition format shared with the CLI.
//!
//! Every numeric field accepts a plain number or a rational string like
//! "4/3". Branch kinds: `affine` (slope, intercept), `constant` (value),
//! `mobius` (a, b, c, d), `power` (exponent).

use serde::Deserialize;

use crate::error::{CoreError, Result};
use crate::grid::GridSpec;
use crate::interval::{Domain, Interval};
use crate::map::{Branch, BranchKind, PiecewiseMap};
use crate::rational::parse_real;

/// A number that may be written as a rational string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RealSpec {
    Float(f64),
    Int(i64),
    Text(String),
}

impl RealSpec {
    pub fn resolve(&self) -> Result<f64> {
        match self {
            RealSpec::Float(v) => Ok(*v),
            RealSpec::Int(v) => Ok(*v as f64),
            RealSpec::Text(s) => parse_real(s),
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    pub lo: RealSpec,
    pub hi: RealSpec,
    #[serde(default = "default_true")]
    pub lo_closed: bool,
    #[serde(default = "default_true")]
    pub hi_closed: bool,
}

impl IntervalSpec {
    pub fn resolve(&self) -> Result<Interval> {
        Interval::new(
            self.lo.resolve()?,
            self.hi.resolve()?,
            self.lo_closed,
            self.hi_closed,
        )
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub intervals: Vec<IntervalSpec>,
}

impl DomainSpec {
    pub fn resolve(&self) -> Result<Domain> {
        let ivs = self
            .intervals
            .iter()
            .map(|s| s.resolve())
            .collect::<Result<Vec<_>>>()?;
        Domain::new(ivs)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub subdomain: IntervalSpec,
    pub kind: String,
    pub slope: Option<RealSpec>,
    pub intercept: Option<RealSpec>,
    pub value: Option<RealSpec>,
    pub a: Option<RealSpec>,
    pub b: Option<RealSpec>,
    pub c: Option<RealSpec>,
    pub d: Option<RealSpec>,
    pub exponent: Option<RealSpec>,
}

impl BranchSpec {
    pub fn resolve(&self) -> Result<Branch> {
        let missing = |field: &str| {
            CoreError::invalid(format!("branch kind `{}` needs field `{field}`", self.kind))
        };
        let get = |v: &Option<RealSpec>, field: &str| -> Result<f64> {
            v.as_ref().ok_or_else(|| missing(field))?.resolve()
        };
        let kind = match self.kind.as_str() {
            "affine" => BranchKind::Affine {
                slope: get(&self.slope, "slope")?,
                intercept: get(&self.intercept, "intercept")?,
            },
            "constant" => BranchKind::Constant {
                value: get(&self.value, "value")?,
            },
            "mobius" => BranchKind::Mobius {
                a: get(&self.a, "a")?,
                b: get(&self.b, "b")?,
                c: get(&self.c, "c")?,
                d: get(&self.d, "d")?,
            },
            "power" => BranchKind::Power {
                exponent: get(&self.exponent, "exponent")?,
            },
            other => {
                return Err(CoreError::invalid(format!(
                    "unknown branch kind `{other}` (expected affine|constant|mobius|power)"
                )))
            }
        };
        Branch::new(self.subdomain.resolve()?, kind)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub name: String,
    pub branches: Vec<BranchSpec>,
}

impl MapSpec {
    pub fn resolve(&self) -> Result<PiecewiseMap> {
        let branches = self
            .branches
            .iter()
            .map(|b| b.resolve())
            .collect::<Result<Vec<_>>>()?;
        PiecewiseMap::new(self.name.clone(), branches)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpecSpec {
    pub points_per_interval: Option<usize>,
    pub inset: Option<RealSpec>,
}

impl GridSpecSpec {
    pub fn resolve(&self) -> Result<GridSpec> {
        let mut g = match self.points_per_interval {
            Some(n) => GridSpec::new(n)?,
            None => GridSpec::default(),
        };
        if let Some(inset) = &self.inset {
            g = g.with_inset(inset.resolve()?)?;
        }
        Ok(g)
    }
}
