//! Shared map fixtures for the integration suites.
//!
//! Three jump-discontinuous triples on half-open interval domains, plus a
//! ratio map, covering the landmark configurations the checkers must
//! separate: min-form contractive with a joint fixed point, cross-form
//! contractive without min-form, and max-form contractive without any
//! common fixed point.

use fplab_core::{Branch, BranchKind, Domain, Interval, PiecewiseMap};

pub const TWO_THIRDS: f64 = 2.0 / 3.0;

fn branch(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool, kind: BranchKind) -> Branch {
    Branch::new(Interval::new(lo, hi, lo_closed, hi_closed).unwrap(), kind).unwrap()
}

fn constant(value: f64) -> BranchKind {
    BranchKind::Constant { value }
}

fn affine(slope: f64, intercept: f64) -> BranchKind {
    BranchKind::Affine { slope, intercept }
}

/// T, f, g on (1/4, 1]: min-form contractive with joint fixed point 2/3.
/// T is constant 1/2 low and 1 - x/2 high; f and g share the reflection
/// 4/3 - x high and differ in their low constants (1 vs 1/3).
pub fn contractive_triple() -> (PiecewiseMap, PiecewiseMap, PiecewiseMap) {
    let t = PiecewiseMap::new(
        "t",
        vec![
            branch(0.25, TWO_THIRDS, false, false, constant(0.5)),
            branch(TWO_THIRDS, 1.0, true, true, affine(-0.5, 1.0)),
        ],
    )
    .unwrap();
    let f = PiecewiseMap::new(
        "f",
        vec![
            branch(0.25, TWO_THIRDS, false, false, constant(1.0)),
            branch(TWO_THIRDS, 1.0, true, true, affine(-1.0, 4.0 / 3.0)),
        ],
    )
    .unwrap();
    let g = PiecewiseMap::new(
        "g",
        vec![
            branch(0.25, TWO_THIRDS, false, false, constant(1.0 / 3.0)),
            branch(TWO_THIRDS, 1.0, true, true, affine(-1.0, 4.0 / 3.0)),
        ],
    )
    .unwrap();
    (t, f, g)
}

/// T, f, g on (0, 1]: satisfies the cross-pair condition (T = g) but not
/// the min-form one. T and g jump to 2/3 at the right endpoint; f jumps
/// to 1 there.
pub fn crosswise_triple() -> (PiecewiseMap, PiecewiseMap, PiecewiseMap) {
    let tg_branches = || {
        vec![
            branch(0.0, TWO_THIRDS, false, false, constant(0.5)),
            branch(TWO_THIRDS, 1.0, true, false, affine(-0.5, 1.0)),
            branch(1.0, 1.0, true, true, constant(TWO_THIRDS)),
        ]
    };
    let t = PiecewiseMap::new("t", tg_branches()).unwrap();
    let g = PiecewiseMap::new("g", tg_branches()).unwrap();
    let f = PiecewiseMap::new(
        "f",
        vec![
            branch(0.0, TWO_THIRDS, false, false, constant(1.0 / 3.0)),
            branch(TWO_THIRDS, 1.0, true, false, affine(-1.0, 4.0 / 3.0)),
            branch(1.0, 1.0, true, true, constant(1.0)),
        ],
    )
    .unwrap();
    (t, f, g)
}

/// T, f, g on (1/4, 1]: satisfies the max-form condition but not the
/// min-form one, and the three maps have no common fixed point. The branch
/// boundary at 2/3 sits in T's and f's low branch but g's high branch.
pub fn maxonly_triple() -> (PiecewiseMap, PiecewiseMap, PiecewiseMap) {
    let t = PiecewiseMap::new(
        "t",
        vec![
            branch(0.25, TWO_THIRDS, false, true, constant(0.5)),
            branch(TWO_THIRDS, 1.0, false, true, affine(-0.5, 1.0)),
        ],
    )
    .unwrap();
    let f = PiecewiseMap::new(
        "f",
        vec![
            branch(0.25, TWO_THIRDS, false, true, constant(1.0)),
            branch(TWO_THIRDS, 1.0, false, true, affine(-1.0, 4.0 / 3.0)),
        ],
    )
    .unwrap();
    let g = PiecewiseMap::new(
        "g",
        vec![
            branch(0.25, TWO_THIRDS, false, false, constant(1.0 / 3.0)),
            branch(TWO_THIRDS, 1.0, true, true, affine(-1.0, 4.0 / 3.0)),
        ],
    )
    .unwrap();
    (t, f, g)
}

/// x / (1 + x) on [0, hi]: weakly contractive but not a contraction.
pub fn ratio_map(hi: f64) -> PiecewiseMap {
    PiecewiseMap::new(
        "ratio",
        vec![branch(
            0.0,
            hi,
            true,
            true,
            BranchKind::Mobius {
                a: 1.0,
                b: 0.0,
                c: 1.0,
                d: 1.0,
            },
        )],
    )
    .unwrap()
}

pub fn unit_domain() -> Domain {
    Domain::single(Interval::closed(0.0, 1.0).unwrap())
}
