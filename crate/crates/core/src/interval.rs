//! 1-D interval domains with independently open or closed endpoints.
//!
//! A [`Domain`] is a finite union of disjoint [`Interval`]s kept in normalized
//! form: sorted by lower endpoint, never overlapping, and with adjacent
//! intervals merged whenever their union is again an interval.

use crate::error::{CoreError, Result};

/// A real interval with endpoint flags, e.g. `(1/4, 1]`.
///
/// Degenerate single-point intervals `[c, c]` are allowed; any other
/// combination with `lo >= hi` is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(CoreError::invalid(format!(
                "interval endpoints must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo > hi || (lo == hi && !(lo_closed && hi_closed)) {
            return Err(CoreError::invalid(format!(
                "empty interval: lo={lo} ({}), hi={hi} ({})",
                if lo_closed { "closed" } else { "open" },
                if hi_closed { "closed" } else { "open" },
            )));
        }
        Ok(Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Interval::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Interval::new(lo, hi, false, false)
    }

    /// The degenerate interval `[c, c]`.
    pub fn point(c: f64) -> Result<Self> {
        Interval::new(c, c, true, true)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// Membership respecting openness exactly: `x ∈ (a, b]` iff `a < x <= b`.
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Membership with endpoints relaxed by `tol` on both sides.
    pub(crate) fn contains_relaxed(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    /// Nearest point of the interval to `x`, nudged off open endpoints.
    pub(crate) fn clamp_inside(&self, x: f64) -> f64 {
        let mut c = x.clamp(self.lo, self.hi);
        if c == self.lo && !self.lo_closed {
            c = c.next_up().min(self.hi);
        }
        if c == self.hi && !self.hi_closed {
            c = c.next_down().max(self.lo);
        }
        c
    }

    /// Distance from `x` to the interval's closure (0 inside).
    pub fn distance_to(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }

    /// True when `self` and `next` (with `self.lo <= next.lo`) share a point.
    fn overlaps(&self, next: &Interval) -> bool {
        next.lo < self.hi || (next.lo == self.hi && next.lo_closed && self.hi_closed)
    }

    /// True when the union of `self` and `next` is again one interval.
    fn merges_with(&self, next: &Interval) -> bool {
        next.lo == self.hi && (next.lo_closed != self.hi_closed)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' },
        )
    }
}

/// A finite union of disjoint intervals in normalized form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Domain {
    intervals: Vec<Interval>,
}

impl Domain {
    /// Builds a normalized domain: sorts, rejects overlaps, merges
    /// adjacent intervals whose union is an interval.
    pub fn new(mut intervals: Vec<Interval>) -> Result<Self> {
        intervals.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .expect("finite endpoints")
                .then(a.hi.partial_cmp(&b.hi).expect("finite endpoints"))
        });
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match merged.last_mut() {
                None => merged.push(iv),
                Some(prev) => {
                    if prev.overlaps(&iv) {
                        return Err(CoreError::invalid(format!(
                            "intervals {prev} and {iv} overlap"
                        )));
                    } else if prev.merges_with(&iv) {
                        prev.hi = iv.hi;
                        prev.hi_closed = iv.hi_closed;
                    } else {
                        merged.push(iv);
                    }
                }
            }
        }
        Ok(Domain { intervals: merged })
    }

    pub fn single(interval: Interval) -> Self {
        Domain {
            intervals: vec![interval],
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    /// Distance from `x` to the closure of the domain.
    pub fn distance_to(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|iv| iv.distance_to(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when every interval of `self` lies inside some interval of `other`.
    pub fn subset_of(&self, other: &Domain) -> bool {
        self.intervals.iter().all(|iv| {
            other.intervals.iter().any(|o| {
                let lo_ok = o.lo < iv.lo || (o.lo == iv.lo && (o.lo_closed || !iv.lo_closed));
                let hi_ok = o.hi > iv.hi || (o.hi == iv.hi && (o.hi_closed || !iv.hi_closed));
                lo_ok && hi_ok
            })
        })
    }
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.intervals.iter().map(|iv| iv.to_string()).collect();
        write!(f, "{}", parts.join(" u "))
    }
}
