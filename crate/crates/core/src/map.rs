//! Piecewise selfmaps of 1-D domains with exact per-branch inversion.

use crate::error::{CoreError, Result};
use crate::interval::{Domain, Interval};

/// One branch formula. Every kind is either constant or strictly monotone
/// on its subdomain, so preimages are computable in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchKind {
    Constant { value: f64 },
    /// `slope * x + intercept`, slope != 0.
    Affine { slope: f64, intercept: f64 },
    /// `(a x + b) / (c x + d)` with `a d - b c != 0` and no pole on the
    /// subdomain closure. Covers maps like x/(1+x).
    Mobius { a: f64, b: f64, c: f64, d: f64 },
    /// `x^p` with `p > 0`, restricted to nonnegative subdomains.
    Power { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    subdomain: Interval,
    kind: BranchKind,
}

impl Branch {
    pub fn new(subdomain: Interval, kind: BranchKind) -> Result<Self> {
        match kind {
            BranchKind::Constant { value } => {
                if !value.is_finite() {
                    return Err(CoreError::invalid("constant branch value must be finite"));
                }
            }
            BranchKind::Affine { slope, intercept } => {
                if slope == 0.0 {
                    return Err(CoreError::invalid(
                        "affine branch slope must be nonzero (use a constant branch)",
                    ));
                }
                if !slope.is_finite() || !intercept.is_finite() {
                    return Err(CoreError::invalid("affine coefficients must be finite"));
                }
            }
            BranchKind::Mobius { a, b, c, d } => {
                if a * d - b * c == 0.0 {
                    return Err(CoreError::invalid("mobius branch is degenerate (ad = bc)"));
                }
                if c != 0.0 {
                    let pole = -d / c;
                    if pole >= subdomain.lo() && pole <= subdomain.hi() {
                        return Err(CoreError::invalid(format!(
                            "mobius branch has a pole at {pole} inside {subdomain}"
                        )));
                    }
                }
            }
            BranchKind::Power { exponent } => {
                if exponent <= 0.0 || !exponent.is_finite() {
                    return Err(CoreError::invalid("power branch exponent must be positive"));
                }
                if subdomain.lo() < 0.0 {
                    return Err(CoreError::invalid(
                        "power branch subdomain must be nonnegative",
                    ));
                }
            }
        }
        Ok(Branch { subdomain, kind })
    }

    pub fn subdomain(&self) -> &Interval {
        &self.subdomain
    }

    pub fn kind(&self) -> &BranchKind {
        &self.kind
    }

    /// Value of the branch formula at `x` (membership is the caller's duty).
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            BranchKind::Constant { value } => value,
            BranchKind::Affine { slope, intercept } => intercept + slope * x,
            BranchKind::Mobius { a, b, c, d } => (a * x + b) / (c * x + d),
            BranchKind::Power { exponent } => x.powf(exponent),
        }
    }

    /// Closed-form preimage candidate for `y`, or None when the branch
    /// cannot reach `y` (within `tol`). `anchor` picks the representative
    /// point for constant branches.
    fn invert_candidate(&self, y: f64, anchor: f64, tol: f64) -> Option<f64> {
        let x = match self.kind {
            BranchKind::Constant { value } => {
                if (value - y).abs() <= tol {
                    return Some(self.subdomain.clamp_inside(anchor));
                }
                return None;
            }
            BranchKind::Affine { slope, intercept } => (y - intercept) / slope,
            BranchKind::Mobius { a, b, c, d } => {
                let denom = c * y - a;
                if denom == 0.0 {
                    return None; // y is the horizontal asymptote
                }
                (b - d * y) / denom
            }
            BranchKind::Power { exponent } => {
                if y < 0.0 {
                    return None;
                }
                y.powf(1.0 / exponent)
            }
        };
        if self.subdomain.contains_relaxed(x, tol) {
            Some(self.subdomain.clamp_inside(x))
        } else {
            None
        }
    }
}

/// A named piecewise map. Branch subdomains are pairwise disjoint and their
/// union is the map's domain; every domain point is covered by exactly one
/// branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMap {
    name: String,
    branches: Vec<Branch>,
    domain: Domain,
}

impl PiecewiseMap {
    pub fn new(name: impl Into<String>, mut branches: Vec<Branch>) -> Result<Self> {
        let name = name.into();
        if branches.is_empty() {
            return Err(CoreError::invalid(format!("map `{name}` has no branches")));
        }
        branches.sort_by(|a, b| {
            a.subdomain
                .lo()
                .partial_cmp(&b.subdomain.lo())
                .expect("finite endpoints")
                .then(
                    a.subdomain
                        .hi()
                        .partial_cmp(&b.subdomain.hi())
                        .expect("finite endpoints"),
                )
        });
        // Disjointness comes out of Domain::new, which rejects overlaps.
        let domain = Domain::new(branches.iter().map(|b| *b.subdomain()).collect())?;
        Ok(PiecewiseMap {
            name,
            branches,
            domain,
        })
    }

    /// Identity map over `domain` (one affine branch per interval).
    pub fn identity(domain: &Domain) -> Self {
        let branches = domain
            .intervals()
            .iter()
            .map(|iv| {
                Branch::new(
                    *iv,
                    BranchKind::Affine {
                        slope: 1.0,
                        intercept: 0.0,
                    },
                )
                .expect("identity branch")
            })
            .collect();
        PiecewiseMap::new("identity", branches).expect("identity map")
    }

    /// Single affine branch over `interval`.
    pub fn affine(
        name: impl Into<String>,
        interval: Interval,
        slope: f64,
        intercept: f64,
    ) -> Result<Self> {
        PiecewiseMap::new(
            name,
            vec![Branch::new(interval, BranchKind::Affine { slope, intercept })?],
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    fn covering_branch(&self, x: f64) -> Option<&Branch> {
        self.branches.iter().find(|b| b.subdomain.contains(x))
    }

    /// Evaluates the unique covering branch at `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.covering_branch(x) {
            Some(b) => Ok(b.eval(x)),
            None => Err(CoreError::Domain { x }),
        }
    }

    /// Solves `self(x) = y` in closed form per branch.
    ///
    /// Candidates: affine/mobius/power branches invert exactly and are kept
    /// when the preimage lies in the branch subdomain (endpoints relaxed by
    /// `tol`); a constant branch matching `y` within `tol` contributes its
    /// subdomain point nearest to `anchor`. Among candidates the one
    /// minimizing `|x - anchor|` wins, ties to the smaller preimage. If the
    /// anchor itself already maps to `y` exactly it is returned unchanged.
    pub fn invert(&self, y: f64, anchor: f64, tol: f64) -> Result<f64> {
        if tol <= 0.0 {
            return Err(CoreError::invalid("invert tolerance must be positive"));
        }
        if let Some(branch) = self.covering_branch(anchor) {
            if branch.eval(anchor) == y {
                return Ok(anchor);
            }
        }
        let mut candidates: Vec<f64> = self
            .branches
            .iter()
            .filter_map(|b| b.invert_candidate(y, anchor, tol))
            .collect();
        if candidates.is_empty() {
            return Err(CoreError::NoPreimage {
                map: self.name.clone(),
                y,
                tol,
            });
        }
        candidates.sort_by(|a, b| {
            let da = (a - anchor).abs();
            let db = (b - anchor).abs();
            da.partial_cmp(&db)
                .expect("finite candidates")
                .then(a.partial_cmp(b).expect("finite candidates"))
        });
        Ok(candidates[0])
    }

    /// Branch subdomain endpoints that are members of the map's domain,
    /// sorted and deduplicated. These are the only points where the map can
    /// switch formula, so grid scans always include them.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = Vec::new();
        for b in &self.branches {
            for e in [b.subdomain.lo(), b.subdomain.hi()] {
                if self.domain.contains(e) {
                    pts.push(e);
                }
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite endpoints"));
        pts.dedup();
        pts
    }
}
