//! Grid sampling of domains for pointwise and pairwise checks.

use crate::error::{CoreError, Result};
use crate::interval::Domain;

/// How to discretize a domain. Open endpoints are not dropped but inset by a
/// small amount, so every generated point is a domain member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    points_per_interval: usize,
    /// Absolute inset for open endpoints; `None` means 1e-6 of the
    /// interval's length.
    open_endpoint_inset: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points_per_interval: 201,
            open_endpoint_inset: None,
        }
    }
}

impl GridSpec {
    pub fn new(points_per_interval: usize) -> Result<Self> {
        if points_per_interval < 2 {
            return Err(CoreError::invalid("grid needs at least 2 points per interval"));
        }
        Ok(GridSpec {
            points_per_interval,
            open_endpoint_inset: None,
        })
    }

    pub fn with_inset(mut self, inset: f64) -> Result<Self> {
        if !(inset > 0.0) {
            return Err(CoreError::invalid("open-endpoint inset must be positive"));
        }
        self.open_endpoint_inset = Some(inset);
        Ok(self)
    }

    pub fn points_per_interval(&self) -> usize {
        self.points_per_interval
    }

    pub fn open_endpoint_inset(&self) -> Option<f64> {
        self.open_endpoint_inset
    }

    /// Coarsest spacing over the domain's intervals; used as the cluster
    /// radius when deduplicating nearby scan hits.
    pub fn spacing(&self, domain: &Domain) -> f64 {
        domain
            .intervals()
            .iter()
            .map(|iv| iv.length() / (self.points_per_interval - 1) as f64)
            .fold(0.0, f64::max)
    }

    /// Equally spaced samples per interval, open endpoints inset, sorted
    /// and duplicate-free. Degenerate intervals contribute their point.
    pub fn sample(&self, domain: &Domain) -> Vec<f64> {
        let n = self.points_per_interval;
        let mut out: Vec<f64> = Vec::new();
        for iv in domain.intervals() {
            if iv.is_degenerate() {
                out.push(iv.lo());
                continue;
            }
            let inset = self.open_endpoint_inset.unwrap_or(1e-6 * iv.length());
            for k in 0..n {
                let frac = k as f64 / (n - 1) as f64;
                let mut x = iv.lo() + iv.length() * frac;
                if k == 0 && !iv.lo_closed() {
                    x = iv.lo() + inset;
                }
                if k == n - 1 && !iv.hi_closed() {
                    x = iv.hi() - inset;
                }
                debug_assert!(iv.contains(x), "grid point {x} escaped {iv}");
                out.push(x);
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        out.dedup();
        out
    }

    /// `sample` plus extra points (branch breakpoints), membership-filtered.
    pub fn sample_with(&self, domain: &Domain, extra: &[f64]) -> Vec<f64> {
        let mut out = self.sample(domain);
        out.extend(extra.iter().copied().filter(|x| domain.contains(*x)));
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    #[test]
    fn open_endpoints_are_inset() {
        let d = Domain::single(Interval::new(0.25, 1.0, false, true).unwrap());
        let g = GridSpec::new(3).unwrap().with_inset(1e-6).unwrap();
        let pts = g.sample(&d);
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0], 0.25 + 1e-6);
        assert_eq!(pts[1], 0.625);
        assert_eq!(pts[2], 1.0);
        assert!(pts.iter().all(|x| d.contains(*x)));
    }

    #[test]
    fn closed_interval_keeps_endpoints() {
        let d = Domain::single(Interval::closed(0.0, 1.0).unwrap());
        let pts = GridSpec::new(2).unwrap().sample(&d);
        assert_eq!(pts, vec![0.0, 1.0]);
    }

    #[test]
    fn degenerate_interval_yields_its_point() {
        let d = Domain::single(Interval::point(0.7).unwrap());
        let pts = GridSpec::default().sample(&d);
        assert_eq!(pts, vec![0.7]);
    }

    #[test]
    fn default_inset_scales_with_length() {
        let d = Domain::single(Interval::new(0.0, 0.5, false, false).unwrap());
        let pts = GridSpec::new(11).unwrap().sample(&d);
        assert_eq!(pts[0], 0.5e-6);
        assert_eq!(*pts.last().unwrap(), 0.5 - 0.5e-6);
    }

    #[test]
    fn extras_are_membership_filtered_and_merged() {
        let d = Domain::single(Interval::new(0.25, 1.0, false, true).unwrap());
        let g = GridSpec::new(3).unwrap();
        let pts = g.sample_with(&d, &[2.0 / 3.0, 0.25, 7.0]);
        assert!(pts.contains(&(2.0 / 3.0)));
        assert!(!pts.contains(&0.25)); // not a member
        assert!(!pts.contains(&7.0));
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }
}
