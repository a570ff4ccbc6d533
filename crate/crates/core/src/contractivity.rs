//! Grid verification of contractive-type inequalities, exhaustive
//! common-fixed-point scans and weak-compatibility checks.
//!
//! A pass is a grid certificate, not a proof. Scans always include the
//! maps' branch breakpoints: the bundled maps are piecewise affine (or
//! piecewise monotone), so margins are extreme on the grid-plus-breakpoint
//! set and published violation points stay reachable.

use crate::error::{CoreError, Result};
use crate::grid::GridSpec;
use crate::interval::Domain;
use crate::map::PiecewiseMap;
use crate::psi::PsiFunction;
use crate::report::{CheckKind, CheckReport, InequalityKind, Witness};

fn dist(a: f64, b: f64) -> f64 {
    (a - b).abs()
}

/// The selfmaps an inequality quantifies over, by arity.
#[derive(Debug, Clone)]
pub enum MapBundle<'a> {
    Single {
        t: &'a PiecewiseMap,
    },
    Pair {
        t: &'a PiecewiseMap,
        f: &'a PiecewiseMap,
    },
    Triple {
        t: &'a PiecewiseMap,
        f: &'a PiecewiseMap,
        g: &'a PiecewiseMap,
    },
    Family {
        ts: Vec<&'a PiecewiseMap>,
        f: &'a PiecewiseMap,
        g: &'a PiecewiseMap,
    },
}

impl<'a> MapBundle<'a> {
    pub fn maps(&self) -> Vec<&'a PiecewiseMap> {
        match self {
            MapBundle::Single { t } => vec![t],
            MapBundle::Pair { t, f } => vec![t, f],
            MapBundle::Triple { t, f, g } => vec![t, f, g],
            MapBundle::Family { ts, f, g } => {
                let mut v: Vec<&PiecewiseMap> = ts.clone();
                v.push(f);
                v.push(g);
                v
            }
        }
    }

    fn arity_name(&self) -> &'static str {
        match self {
            MapBundle::Single { .. } => "one map (T)",
            MapBundle::Pair { .. } => "two maps (T, f)",
            MapBundle::Triple { .. } => "three maps (T, f, g)",
            MapBundle::Family { .. } => "a family (T1..Tk, f, g)",
        }
    }

    /// The single domain every bundled map must share.
    pub fn shared_domain(&self) -> Result<&'a Domain> {
        shared_domain(&self.maps())
    }
}

pub(crate) fn shared_domain<'a>(maps: &[&'a PiecewiseMap]) -> Result<&'a Domain> {
    let first = maps
        .first()
        .ok_or_else(|| CoreError::invalid("no maps given"))?;
    for m in &maps[1..] {
        if m.domain() != first.domain() {
            return Err(CoreError::DomainMismatch {
                a: first.name().to_string(),
                b: m.name().to_string(),
            });
        }
    }
    Ok(first.domain())
}

fn breakpoints_of(maps: &[&PiecewiseMap]) -> Vec<f64> {
    let mut pts: Vec<f64> = maps.iter().flat_map(|m| m.breakpoints()).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    pts.dedup();
    pts
}

/// `d - psi(d)`, the bound every inequality subtracts.
fn damped(d: f64, psi: &PsiFunction) -> Result<f64> {
    Ok(d - psi.eval(d)?)
}

/// The two sides of `kind` at the ordered pair `(x, y)`.
///
/// For `FamilyMin` the left side is the worst member: `max_j d(T1 x, Tj y)`,
/// so one margin per pair still decides the whole family.
pub fn evaluate_inequality_at(
    kind: InequalityKind,
    bundle: &MapBundle,
    psi: &PsiFunction,
    x: f64,
    y: f64,
) -> Result<(f64, f64)> {
    let mismatch = || CoreError::ArityMismatch {
        kind: kind.to_string(),
        expected: expected_arity(kind),
        got: bundle.arity_name(),
    };
    match kind {
        InequalityKind::Contraction { k } => {
            let MapBundle::Single { t } = bundle else {
                return Err(mismatch());
            };
            Ok((dist(t.eval(x)?, t.eval(y)?), k * dist(x, y)))
        }
        InequalityKind::WeaklyContractive => {
            let MapBundle::Single { t } = bundle else {
                return Err(mismatch());
            };
            Ok((dist(t.eval(x)?, t.eval(y)?), damped(dist(x, y), psi)?))
        }
        InequalityKind::WeaklyContractiveWrt => {
            let MapBundle::Pair { t, f } = bundle else {
                return Err(mismatch());
            };
            Ok((
                dist(t.eval(x)?, t.eval(y)?),
                damped(dist(f.eval(x)?, f.eval(y)?), psi)?,
            ))
        }
        InequalityKind::AzamShakeel => {
            let MapBundle::Triple { t, f, g } = bundle else {
                return Err(mismatch());
            };
            Ok((
                dist(g.eval(x)?, t.eval(y)?),
                damped(dist(f.eval(x)?, f.eval(y)?), psi)?,
            ))
        }
        InequalityKind::FgMin | InequalityKind::FgMax => {
            let MapBundle::Triple { t, f, g } = bundle else {
                return Err(mismatch());
            };
            let lhs = dist(t.eval(x)?, t.eval(y)?);
            let cross = damped(dist(f.eval(x)?, g.eval(y)?), psi)?;
            let swapped = damped(dist(g.eval(x)?, f.eval(y)?), psi)?;
            let rhs = if matches!(kind, InequalityKind::FgMin) {
                cross.min(swapped)
            } else {
                cross.max(swapped)
            };
            Ok((lhs, rhs))
        }
        InequalityKind::FamilyMin => {
            let MapBundle::Family { ts, f, g } = bundle else {
                return Err(mismatch());
            };
            if ts.is_empty() {
                return Err(CoreError::invalid("family-min needs a non-empty family"));
            }
            let t1x = ts[0].eval(x)?;
            let mut lhs = f64::NEG_INFINITY;
            for tj in ts {
                lhs = lhs.max(dist(t1x, tj.eval(y)?));
            }
            let cross = damped(dist(f.eval(x)?, g.eval(y)?), psi)?;
            let swapped = damped(dist(g.eval(x)?, f.eval(y)?), psi)?;
            Ok((lhs, cross.min(swapped)))
        }
    }
}

fn expected_arity(kind: InequalityKind) -> &'static str {
    match kind {
        InequalityKind::Contraction { .. } | InequalityKind::WeaklyContractive => "one map (T)",
        InequalityKind::WeaklyContractiveWrt => "two maps (T, f)",
        InequalityKind::AzamShakeel | InequalityKind::FgMin | InequalityKind::FgMax => {
            "three maps (T, f, g)"
        }
        InequalityKind::FamilyMin => "a family (T1..Tk, f, g)",
    }
}

/// Verifies `kind` at every ordered grid pair (breakpoints included).
///
/// Passes iff `lhs <= rhs + tol` everywhere; otherwise the report carries
/// the maximum-margin witness, ties resolved to the lexicographically
/// smallest `(x, y)` by the ascending scan order.
pub fn check_inequality(
    kind: InequalityKind,
    bundle: &MapBundle,
    psi: &PsiFunction,
    grid: &GridSpec,
    tol: f64,
) -> Result<CheckReport> {
    if !(tol > 0.0) {
        return Err(CoreError::invalid("check tolerance must be positive"));
    }
    if let InequalityKind::Contraction { k } = kind {
        if !(0.0..1.0).contains(&k) {
            return Err(CoreError::invalid(format!(
                "contraction constant must be in [0, 1), got {k}"
            )));
        }
    }
    let domain = bundle.shared_domain()?;
    let pts = grid.sample_with(domain, &breakpoints_of(&bundle.maps()));
    if pts.is_empty() {
        return Err(CoreError::invalid("empty grid"));
    }

    let mut report = CheckReport::new(CheckKind::Inequality(kind), tol);
    report.grid_points = pts.len();
    let mut best: Option<Witness> = None;
    let mut max_margin = f64::NEG_INFINITY;
    for &x in &pts {
        for &y in &pts {
            let (lhs, rhs) = evaluate_inequality_at(kind, bundle, psi, x, y)?;
            let margin = lhs - rhs;
            if margin > max_margin {
                max_margin = margin;
                best = Some(Witness::new(x, y, lhs, rhs));
            }
        }
    }
    report.pairs_checked = pts.len() * pts.len();
    report.max_margin = max_margin;
    report.passed = max_margin <= tol;
    if !report.passed {
        report.witness = best;
    }
    Ok(report)
}

/// The finite-family variant: one report covering every member.
pub fn check_family(
    ts: &[&PiecewiseMap],
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    psi: &PsiFunction,
    grid: &GridSpec,
    tol: f64,
) -> Result<CheckReport> {
    check_inequality(
        InequalityKind::FamilyMin,
        &MapBundle::Family {
            ts: ts.to_vec(),
            f,
            g,
        },
        psi,
        grid,
        tol,
    )
}

/// Result of a common-fixed-point grid scan.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointScan {
    /// Deduplicated candidate points (empty when `whole_domain` is set).
    pub points: Vec<f64>,
    /// Set when nearly every grid point qualifies (identity-like bundles).
    pub whole_domain: bool,
    pub grid_points: usize,
    pub residual_tol: f64,
}

fn max_residual(maps: &[&PiecewiseMap], x: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for m in maps {
        worst = worst.max((m.eval(x)? - x).abs());
    }
    Ok(worst)
}

/// Bisection on `m(x) - x` inside a bracketing cell; 50 halvings.
fn bisect_fixed_point(m: &PiecewiseMap, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut r_lo = m.eval(lo)? - lo;
    if r_lo == 0.0 {
        return Ok(lo);
    }
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        let r_mid = m.eval(mid)? - mid;
        if r_mid == 0.0 {
            return Ok(mid);
        }
        if (r_lo < 0.0) != (r_mid < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            r_lo = r_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// True when `a` and `b` lie in one interval of the domain, so that the
/// whole segment between them can be evaluated.
fn same_interval(domain: &Domain, a: f64, b: f64) -> bool {
    domain
        .intervals()
        .iter()
        .any(|iv| iv.contains(a) && iv.contains(b))
}

/// Scans the grid for points fixed by every map at once.
///
/// Grid points passing the residual test are candidates directly. A cell
/// is refined by bisection only when *every* map's `m(x) - x` crosses or
/// vanishes there; a lone map crossing next to a jump would otherwise
/// nominate the jump's limit point, which is not a common fixed point.
/// Refined points still must pass the residual test against all maps.
/// Candidates are clustered with radius equal to the grid spacing.
pub fn find_common_fixed_points(
    maps: &[&PiecewiseMap],
    grid: &GridSpec,
    residual_tol: f64,
) -> Result<FixedPointScan> {
    if !(residual_tol > 0.0) {
        return Err(CoreError::invalid("residual tolerance must be positive"));
    }
    let domain = shared_domain(maps)?;
    let pts = grid.sample_with(domain, &breakpoints_of(maps));
    if pts.is_empty() {
        return Err(CoreError::invalid("empty grid"));
    }

    let mut candidates: Vec<(f64, f64)> = Vec::new(); // (x, residual)
    let mut grid_hits = 0usize;
    for &x in &pts {
        let r = max_residual(maps, x)?;
        if r <= residual_tol {
            grid_hits += 1;
            candidates.push((x, r));
        }
    }
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !same_interval(domain, a, b) {
            continue;
        }
        let mut all_cross = true;
        let mut bisect_on: Option<&PiecewiseMap> = None;
        for m in maps {
            let ra = m.eval(a)? - a;
            let rb = m.eval(b)? - b;
            let strict = ra != 0.0 && rb != 0.0 && (ra < 0.0) != (rb < 0.0);
            if !(strict || ra == 0.0 || rb == 0.0) {
                all_cross = false;
                break;
            }
            if strict && bisect_on.is_none() {
                bisect_on = Some(m);
            }
        }
        if all_cross {
            if let Some(m) = bisect_on {
                let root = bisect_fixed_point(m, a, b)?;
                let r = max_residual(maps, root)?;
                if r <= residual_tol {
                    candidates.push((root, r));
                }
            }
        }
    }

    let whole_domain = grid_hits * 10 >= pts.len() * 9;
    candidates.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite candidates"));

    let radius = grid.spacing(domain);
    let mut points: Vec<f64> = Vec::new();
    let mut cluster_best: Option<(f64, f64)> = None;
    let mut cluster_end = f64::NEG_INFINITY;
    for (x, r) in candidates {
        match cluster_best {
            Some((bx, br)) if x - cluster_end <= radius => {
                if r < br {
                    cluster_best = Some((x, r));
                } else {
                    cluster_best = Some((bx, br));
                }
            }
            Some((bx, _)) => {
                points.push(bx);
                cluster_best = Some((x, r));
            }
            None => cluster_best = Some((x, r)),
        }
        cluster_end = x;
    }
    if let Some((bx, _)) = cluster_best {
        points.push(bx);
    }
    if whole_domain {
        points.clear();
    }

    Ok(FixedPointScan {
        points,
        whole_domain,
        grid_points: pts.len(),
        residual_tol,
    })
}

/// Checks that `a` and `b` commute at every coincidence point.
///
/// Coincidence points are grid points with `|a(x) - b(x)| <= tol` plus
/// bisection-refined sign changes of `a - b`. Points where a composite
/// leaves the domain are recorded in `skipped` and do not fail the check.
pub fn check_weak_compatibility(
    a: &PiecewiseMap,
    b: &PiecewiseMap,
    grid: &GridSpec,
    tol: f64,
) -> Result<CheckReport> {
    if !(tol > 0.0) {
        return Err(CoreError::invalid("check tolerance must be positive"));
    }
    let domain = shared_domain(&[a, b])?;
    let pts = grid.sample_with(domain, &breakpoints_of(&[a, b]));
    if pts.is_empty() {
        return Err(CoreError::invalid("empty grid"));
    }

    let diff = |x: f64| -> Result<f64> { Ok(a.eval(x)? - b.eval(x)?) };

    let mut coincidences: Vec<(f64, f64)> = Vec::new(); // (x, |a-b|)
    for &x in &pts {
        let d = diff(x)?.abs();
        if d <= tol {
            coincidences.push((x, d));
        }
    }
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if !same_interval(domain, lo, hi) {
            continue;
        }
        let (da, db) = (diff(lo)?, diff(hi)?);
        if da != 0.0 && db != 0.0 && (da < 0.0) != (db < 0.0) {
            let mut lo = lo;
            let mut hi = hi;
            let mut d_lo = da;
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                let d_mid = diff(mid)?;
                if d_mid == 0.0 {
                    lo = mid;
                    break;
                }
                if (d_lo < 0.0) != (d_mid < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    d_lo = d_mid;
                }
            }
            let root = lo;
            let d = diff(root)?.abs();
            if d <= tol {
                coincidences.push((root, d));
            }
        }
    }
    coincidences.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite points"));

    // cluster nearby hits, keep the most coincident representative
    let radius = grid.spacing(domain);
    let mut reps: Vec<f64> = Vec::new();
    let mut best: Option<(f64, f64)> = None;
    let mut end = f64::NEG_INFINITY;
    for (x, d) in coincidences {
        match best {
            Some((bx, bd)) if x - end <= radius => {
                best = if d < bd { Some((x, d)) } else { Some((bx, bd)) };
            }
            Some((bx, _)) => {
                reps.push(bx);
                best = Some((x, d));
            }
            None => best = Some((x, d)),
        }
        end = x;
    }
    if let Some((bx, _)) = best {
        reps.push(bx);
    }

    let mut report = CheckReport::new(CheckKind::WeakCompatibility, tol);
    report.grid_points = pts.len();
    let mut max_margin = f64::NEG_INFINITY;
    let mut witness: Option<Witness> = None;
    let mut checked = 0usize;
    for x in reps {
        let ab = b.eval(x).and_then(|inner| a.eval(inner));
        let ba = a.eval(x).and_then(|inner| b.eval(inner));
        let (ab, ba) = match (ab, ba) {
            (Ok(p), Ok(q)) => (p, q),
            _ => {
                report.skipped.push(x);
                continue;
            }
        };
        checked += 1;
        let commutator = (ab - ba).abs();
        if commutator > max_margin {
            max_margin = commutator;
            witness = Some(Witness::new(x, x, commutator, 0.0));
        }
    }
    report.pairs_checked = checked;
    report.max_margin = if checked == 0 { 0.0 } else { max_margin };
    report.passed = report.max_margin <= tol;
    if !report.passed {
        report.witness = witness;
    }
    if checked == 0 {
        report.notes.push("no coincidence points found".to_string());
    }
    if !report.skipped.is_empty() {
        report.notes.push(format!(
            "{} coincidence point(s) skipped: composite leaves the domain",
            report.skipped.len()
        ));
    }
    Ok(report)
}
