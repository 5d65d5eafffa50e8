use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::kernel::{massconserving_at_points, uncorrected_at_points};
use crate::error::{Error, Result};
use crate::geometry::Window;
use crate::pattern::MarkedPointPattern;

/// Intensity estimate plugged into the Cronie–van Lieshout objective.
///
/// `Uncorrected` is the plain leave-in kernel sum `Σ K(x − y)`. Its
/// reciprocal sum grows without bound in `h`, so the objective has an
/// interior minimizer. `MassConserving` uses `Σ K(x − y)/c_W(y)`; because
/// that estimator tends to `N/|W|` as `h → ∞`, its objective also tends to
/// zero there and the search tends to return the largest candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CvlObjective {
    #[default]
    Uncorrected,
    MassConserving,
}

impl CvlObjective {
    pub fn as_str(self) -> &'static str {
        match self {
            CvlObjective::Uncorrected => "uncorrected",
            CvlObjective::MassConserving => "mass-conserving",
        }
    }
}

impl fmt::Display for CvlObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CvlObjective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uncorrected" => Ok(Self::Uncorrected),
            "mass-conserving" => Ok(Self::MassConserving),
            other => Err(Error::InvalidArgument(format!("unknown CvL objective {other:?}"))),
        }
    }
}

/// Outcome of the Cronie–van Lieshout bandwidth search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthSelection {
    pub bandwidth: f64,
    pub objective: f64,
    pub criterion: CvlObjective,
    /// `(candidate, objective)` for every candidate, in input order.
    pub profile: Vec<(f64, f64)>,
}

/// 32 log-spaced candidates from `shorter side / 100` to `shorter side / 2`.
pub fn default_bandwidth_candidates(window: &Window) -> Vec<f64> {
    log_spaced(window.shorter_side() / 100.0, window.shorter_side() / 2.0, 32)
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// `|Σ 1/λ̂_h(x) − |W||` with leave-in evaluation at the data points.
pub fn cvl_objective(pattern: &MarkedPointPattern, bandwidth: f64, criterion: CvlObjective) -> f64 {
    let lambda = match criterion {
        CvlObjective::Uncorrected => uncorrected_at_points(pattern, bandwidth),
        CvlObjective::MassConserving => massconserving_at_points(pattern, bandwidth),
    };
    let total: f64 = lambda.iter().map(|v| 1.0 / v).sum();
    (total - pattern.window().area()).abs()
}

/// [`select_bandwidth_cvl_with`] using the default objective.
pub fn select_bandwidth_cvl(pattern: &MarkedPointPattern, candidates: &[f64]) -> Result<BandwidthSelection> {
    select_bandwidth_cvl_with(pattern, candidates, CvlObjective::default())
}

/// Picks the candidate minimizing [`cvl_objective`]; ties go to the smaller bandwidth.
pub fn select_bandwidth_cvl_with(
    pattern: &MarkedPointPattern,
    candidates: &[f64],
    criterion: CvlObjective,
) -> Result<BandwidthSelection> {
    if pattern.len() < 2 {
        return Err(Error::InsufficientPoints { got: pattern.len(), need: 2 });
    }
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("empty bandwidth candidate set".into()));
    }
    if let Some(h) = candidates.iter().find(|h| !(**h > 0.0) || !h.is_finite()) {
        return Err(Error::InvalidArgument(format!("bandwidth candidate {h} is not positive")));
    }
    let profile: Vec<(f64, f64)> = candidates.iter().map(|&h| (h, cvl_objective(pattern, h, criterion))).collect();
    let best = profile
        .iter()
        .filter(|(_, obj)| obj.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)))
        .copied()
        .ok_or(Error::DegenerateBandwidth)?;
    Ok(BandwidthSelection { bandwidth: best.0, objective: best.1, criterion, profile })
}
