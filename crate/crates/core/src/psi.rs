//! Altering-distance functions ψ: R₊ → R₊ and a sampled class check.

use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::report::{CheckKind, CheckReport, Witness};

/// Built-in families plus arbitrary custom functions of t.
#[derive(Clone)]
pub enum PsiFamily {
    /// ψ(t) = t² / (1 + t)
    PowerRatio,
    /// ψ(t) = t / 2
    HalfLinear,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for PsiFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PsiFamily::PowerRatio => write!(f, "PowerRatio"),
            PsiFamily::HalfLinear => write!(f, "HalfLinear"),
            PsiFamily::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// A candidate altering-distance function: continuous, nondecreasing,
/// ψ(0) = 0, ψ(t) > 0 for t > 0, ψ(t) → ∞. Class membership is not assumed
/// at construction; [`PsiFunction::check_class`] verifies it on samples.
#[derive(Debug, Clone)]
pub struct PsiFunction {
    family: PsiFamily,
    label: String,
}

impl PsiFunction {
    pub fn power_ratio() -> Self {
        PsiFunction {
            family: PsiFamily::PowerRatio,
            label: "power-ratio".to_string(),
        }
    }

    pub fn half_linear() -> Self {
        PsiFunction {
            family: PsiFamily::HalfLinear,
            label: "half-linear".to_string(),
        }
    }

    pub fn custom(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PsiFunction {
            family: PsiFamily::Custom(Arc::new(f)),
            label: label.into(),
        }
    }

    /// Looks up a built-in family by its label.
    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "power-ratio" => Some(PsiFunction::power_ratio()),
            "half-linear" => Some(PsiFunction::half_linear()),
            _ => None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn family(&self) -> &PsiFamily {
        &self.family
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(CoreError::NegativeArgument { t });
        }
        Ok(match &self.family {
            PsiFamily::PowerRatio => t * t / (1.0 + t),
            PsiFamily::HalfLinear => t / 2.0,
            PsiFamily::Custom(f) => f(t),
        })
    }

    /// Sampled membership check for the altering-distance class on
    /// `[0, tmax]` with `n` equally spaced samples.
    ///
    /// Passes iff ψ(0) = 0 exactly, ψ is nondecreasing on consecutive
    /// samples, ψ(t) > 0 at every sampled t > 0, and ψ(tmax) > ψ(tmax/2).
    /// The last condition is a finite proxy for ψ(t) → ∞, which sampling
    /// cannot decide; the report carries a note recording the limitation.
    pub fn check_class(&self, tmax: f64, n: usize) -> Result<CheckReport> {
        if !(tmax > 0.0) {
            return Err(CoreError::invalid("check_class needs tmax > 0"));
        }
        if n < 2 {
            return Err(CoreError::invalid("check_class needs n >= 2"));
        }
        let mut report = CheckReport::new(CheckKind::PsiClass, 0.0);
        report.notes.push(
            "divergence of psi is proxied by strict growth between tmax/2 and tmax".to_string(),
        );

        let mut prev_t = 0.0;
        let mut prev_v = self.eval(0.0)?;
        report.pairs_checked = n;
        if prev_v != 0.0 {
            return Ok(report.fail(Witness::new(0.0, 0.0, prev_v, 0.0)));
        }
        for i in 1..n {
            let t = tmax * (i as f64) / ((n - 1) as f64);
            let v = self.eval(t)?;
            if v <= 0.0 {
                // positivity at sampled t > 0
                return Ok(report.fail(Witness::new(t, 0.0, v, 0.0)));
            }
            if v < prev_v {
                // nondecreasing on consecutive samples
                return Ok(report.fail(Witness::new(prev_t, t, prev_v, v)));
            }
            prev_t = t;
            prev_v = v;
        }
        let half = self.eval(tmax / 2.0)?;
        let full = self.eval(tmax)?;
        if full <= half {
            return Ok(report.fail(Witness::new(tmax / 2.0, tmax, full, half)));
        }
        report.passed = true;
        Ok(report)
    }
}
