//! Best-approximation sets over compact 1-D sets and the
//! invariant-approximation hypothesis battery.

use crate::contractivity::{
    check_inequality, check_weak_compatibility, evaluate_inequality_at, MapBundle,
};
use crate::error::{CoreError, Result};
use crate::grid::GridSpec;
use crate::interval::Domain;
use crate::map::PiecewiseMap;
use crate::psi::PsiFunction;
use crate::report::{CheckKind, CheckReport, InequalityKind, Witness};

/// A compact subset of the line: a finite union of closed bounded intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSet {
    domain: Domain,
}

impl CompactSet {
    pub fn new(domain: Domain) -> Result<Self> {
        for iv in domain.intervals() {
            if !iv.lo_closed() || !iv.hi_closed() {
                return Err(CoreError::invalid(format!(
                    "compact set pieces must be closed, got {iv}"
                )));
            }
        }
        Ok(CompactSet { domain })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn contains(&self, x: f64) -> bool {
        self.domain.contains(x)
    }

    pub fn distance_to(&self, x: f64) -> f64 {
        self.domain.distance_to(x)
    }
}

/// The distance from `u` to the set and all points realizing it.
#[derive(Debug, Clone, PartialEq)]
pub struct BestApproxResult {
    pub u: f64,
    pub dist: f64,
    pub points: Vec<f64>,
}

/// Computes the best-approximation set of `u` out of `m` exactly from the
/// interval endpoints. Inside the set the distance is 0 and the set is
/// `{u}`; outside, the minimizers are nearest endpoints (at most two).
pub fn best_approx(m: &CompactSet, u: f64) -> Result<BestApproxResult> {
    if m.domain.is_empty() {
        return Err(CoreError::EmptySet);
    }
    if m.contains(u) {
        return Ok(BestApproxResult {
            u,
            dist: 0.0,
            points: vec![u],
        });
    }
    let mut candidates: Vec<(f64, f64)> = Vec::new(); // (point, distance)
    for iv in m.domain.intervals() {
        if u < iv.lo() {
            candidates.push((iv.lo(), iv.lo() - u));
        } else if u > iv.hi() {
            candidates.push((iv.hi(), u - iv.hi()));
        }
    }
    let dist = candidates
        .iter()
        .map(|c| c.1)
        .fold(f64::INFINITY, f64::min);
    let mut points: Vec<f64> = candidates
        .into_iter()
        .filter(|c| c.1 == dist)
        .map(|c| c.0)
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    points.dedup();
    Ok(BestApproxResult { u, dist, points })
}

/// What a map must leave invariant.
#[derive(Debug, Clone, Copy)]
pub enum InvarianceTarget<'a> {
    Set(&'a CompactSet),
    Points(&'a [f64]),
}

/// Checks `m(x) ∈ s` for sampled (set) or listed (points) arguments.
/// The witness is the first argument whose image escapes.
pub fn check_invariance(
    map: &PiecewiseMap,
    target: InvarianceTarget,
    grid: &GridSpec,
    tol: f64,
) -> Result<CheckReport> {
    if !(tol >= 0.0) {
        return Err(CoreError::invalid("tolerance must be nonnegative"));
    }
    let mut report = CheckReport::new(CheckKind::Invariance, tol);
    let (samples, member_dist): (Vec<f64>, Box<dyn Fn(f64) -> f64>) = match target {
        InvarianceTarget::Set(s) => {
            if !s.domain().subset_of(map.domain()) {
                return Err(CoreError::invalid(
                    "invariance target is not inside the map's domain",
                ));
            }
            let s = s.clone();
            (grid.sample(s.domain()), Box::new(move |v| s.distance_to(v)))
        }
        InvarianceTarget::Points(ps) => {
            let ps: Vec<f64> = ps.to_vec();
            let inside = ps.clone();
            (
                ps,
                Box::new(move |v| {
                    inside
                        .iter()
                        .map(|p| (v - p).abs())
                        .fold(f64::INFINITY, f64::min)
                }),
            )
        }
    };
    report.grid_points = samples.len();
    report.pairs_checked = samples.len();
    let mut max_margin = f64::NEG_INFINITY;
    let mut first: Option<Witness> = None;
    for &x in &samples {
        let v = map.eval(x)?;
        let d = member_dist(v);
        max_margin = max_margin.max(d - tol);
        if d > tol && first.is_none() {
            first = Some(Witness::new(x, v, d, tol));
        }
    }
    report.max_margin = if samples.is_empty() { 0.0 } else { max_margin };
    report.passed = first.is_none();
    report.witness = first;
    Ok(report)
}

/// Checks the strict proximity gap: for every best-approximation point `a`
/// and every ambient grid point `x`, both `d(x,Ta) < d(x,fa)` and
/// `d(x,Ta) < d(x,ga)` with strictness margin 1e-12. Arguments where a
/// compared image coincides with `Ta` make strictness impossible and are
/// reported as witnesses.
pub fn check_strict_gap(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    best: &BestApproxResult,
    grid: &GridSpec,
) -> Result<CheckReport> {
    const STRICTNESS: f64 = 1e-12;
    if best.points.is_empty() {
        return Err(CoreError::EmptySet);
    }
    let domain = crate::contractivity::shared_domain(&[t, f, g])?;
    let pts = grid.sample(domain);
    let mut report = CheckReport::new(CheckKind::StrictGap, STRICTNESS);
    report.grid_points = pts.len();
    let mut max_margin = f64::NEG_INFINITY;
    let mut first: Option<Witness> = None;
    for &a in &best.points {
        let ta = t.eval(a)?;
        let fa = f.eval(a)?;
        let ga = g.eval(a)?;
        for &x in &pts {
            report.pairs_checked += 1;
            let lhs = (x - ta).abs();
            let rhs = (x - fa).abs().min((x - ga).abs());
            let margin = lhs - rhs;
            max_margin = max_margin.max(margin);
            // strictness fails when lhs is not below rhs by more than the margin
            if margin >= -STRICTNESS && first.is_none() {
                first = Some(Witness::new(x, a, lhs, rhs));
            }
        }
    }
    report.max_margin = max_margin;
    report.passed = first.is_none();
    report.witness = first;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<Witness>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConclusionOutcome {
    /// Some best-approximation point is a common fixed point (residual <= 1e-9).
    pub holds: bool,
    pub point: Option<f64>,
    pub residual: f64,
}

/// Outcome of the invariant-approximation pipeline: the best-approximation
/// set, one entry per hypothesis, and the conclusion, all reported
/// independently so a failing premise is named instead of silently
/// asserting the conclusion.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxBattery {
    pub best: BestApproxResult,
    pub hypotheses: Vec<HypothesisOutcome>,
    pub conclusion: ConclusionOutcome,
}

const FIXED_POINT_TOL: f64 = 1e-9;

fn common_residual(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    x: f64,
) -> Result<f64> {
    let mut r: f64 = 0.0;
    for m in [t, f, g] {
        r = r.max((m.eval(x)? - x).abs());
    }
    Ok(r)
}

/// End-to-end battery: best approximations of `x0` out of `m`, the
/// hypothesis checks (common fixed point at `x0`, the min-form inequality
/// on the ambient grid, weak compatibility of (T,f) and (T,g), invariance
/// of `m` under all three maps, invariance of the best-approximation set
/// under `f`), and the conclusion check.
pub fn verify_invariant_approximation(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    m: &CompactSet,
    x0: f64,
    psi: &PsiFunction,
    grid: &GridSpec,
) -> Result<ApproxBattery> {
    let domain = crate::contractivity::shared_domain(&[t, f, g])?;
    if !domain.contains(x0) {
        return Err(CoreError::Domain { x: x0 });
    }
    if !m.domain().subset_of(domain) {
        return Err(CoreError::invalid("compact set must sit inside the ambient domain"));
    }
    let best = best_approx(m, x0)?;
    let mut hypotheses = Vec::new();

    let r0 = common_residual(t, f, g, x0)?;
    hypotheses.push(HypothesisOutcome {
        name: "x0-common-fixed-point",
        passed: r0 <= FIXED_POINT_TOL,
        witness: None,
        detail: format!("max residual at x0: {r0}"),
    });

    let fg = check_inequality(
        InequalityKind::FgMin,
        &MapBundle::Triple { t, f, g },
        psi,
        grid,
        1e-12,
    )?;
    hypotheses.push(HypothesisOutcome {
        name: "min-form-contractivity",
        passed: fg.passed,
        witness: fg.witness,
        detail: format!("max margin {} over {} pairs", fg.max_margin, fg.pairs_checked),
    });

    for (name, other) in [("weak-compatibility-t-f", f), ("weak-compatibility-t-g", g)] {
        let wc = check_weak_compatibility(t, other, grid, FIXED_POINT_TOL)?;
        hypotheses.push(HypothesisOutcome {
            name,
            passed: wc.passed,
            witness: wc.witness,
            detail: format!("{} coincidence point(s) checked", wc.pairs_checked),
        });
    }

    for (name, map) in [
        ("f-invariance-of-m", f),
        ("g-invariance-of-m", g),
        ("t-invariance-of-m", t),
    ] {
        let inv = check_invariance(map, InvarianceTarget::Set(m), grid, FIXED_POINT_TOL)?;
        hypotheses.push(HypothesisOutcome {
            name,
            passed: inv.passed,
            witness: inv.witness,
            detail: format!("{} sample(s)", inv.pairs_checked),
        });
    }

    let inv_p = check_invariance(
        f,
        InvarianceTarget::Points(&best.points),
        grid,
        FIXED_POINT_TOL,
    )?;
    hypotheses.push(HypothesisOutcome {
        name: "f-invariance-of-best-approx-set",
        passed: inv_p.passed,
        witness: inv_p.witness,
        detail: format!("{} point(s)", best.points.len()),
    });

    let mut conclusion = ConclusionOutcome {
        holds: false,
        point: None,
        residual: f64::INFINITY,
    };
    for &z in &best.points {
        let r = common_residual(t, f, g, z)?;
        if r < conclusion.residual {
            conclusion.residual = r;
            conclusion.point = Some(z);
        }
        if r <= FIXED_POINT_TOL {
            conclusion.holds = true;
            conclusion.point = Some(z);
            conclusion.residual = r;
            break;
        }
    }
    Ok(ApproxBattery {
        best,
        hypotheses,
        conclusion,
    })
}

/// Direct evaluation of the min-form inequality at one pair; exposed so
/// reports can re-verify published violation points.
pub fn probe_fg_min(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    psi: &PsiFunction,
    x: f64,
    y: f64,
) -> Result<(f64, f64)> {
    evaluate_inequality_at(InequalityKind::FgMin, &MapBundle::Triple { t, f, g }, psi, x, y)
}
