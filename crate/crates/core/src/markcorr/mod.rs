//! Mark correlation functions for marked point patterns.
//!
//! For a test function `tf` the unnormalized mark correlation at distance `r`
//! is the ratio of two intensity-reweighted pair sums,
//!
//! ```text
//!            Σ_{x≠y} tf(m(x), m(y)) K(d(x,y) − r) e(x,y) / (λ(x) λ(y))
//!   c(r) = ─────────────────────────────────────────────────────────────
//!                    Σ_{x≠y} K(d(x,y) − r) e(x,y) / (λ(x) λ(y))
//! ```
//!
//! and the normalized version divides by `μ̂²` (product test function) or
//! `σ̂²` (half squared difference). The homogeneous estimators are the same
//! computation with the constant intensity `N/|W|`. The cumulative variant
//! replaces the pair kernel by the indicator `d(x,y) ≤ r`.

mod estimators;
mod pairs;
mod recipe;

pub use estimators::{
    c_homogeneous, c_inhom, k_ratio_inhom, kappa_homogeneous, kappa_inhom, mark_correlation, pairsum_denominator,
    pairsum_numerator, pcf_inhom,
};
pub use pairs::{epanechnikov, PairTable};
pub use recipe::{BandwidthChoice, CurveRecipe, IntensitySpec, PreparedStatistic};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{EdgeCorrection, Window};
use crate::pattern::{summarize_marks, MarkedPointPattern};

/// Rule for the constant a test function is normalized by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalizer {
    /// Squared sample mean of the marks.
    MeanSquared,
    /// Sample variance of the marks (divisor `N − 1`).
    Variance,
    Constant(f64),
}

/// A nonnegative function of two marks.
#[derive(Clone)]
pub struct TestFunction {
    id: String,
    f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    normalizer: Normalizer,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction").field("id", &self.id).field("normalizer", &self.normalizer).finish()
    }
}

impl TestFunction {
    /// `m₁ m₂`, normalized by `μ̂²`.
    pub fn mm() -> Self {
        Self::custom("mm", |a, b| a * b, Normalizer::MeanSquared)
    }

    /// `(m₁ − m₂)² / 2`, normalized by `σ̂²`.
    pub fn vario() -> Self {
        Self::custom("vario", |a, b| 0.5 * (a - b) * (a - b), Normalizer::Variance)
    }

    /// Constant one; its mark correlation is the pair-correlation ratio itself.
    pub fn unit() -> Self {
        Self::custom("unit", |_, _| 1.0, Normalizer::Constant(1.0))
    }

    pub fn custom<F>(id: impl Into<String>, f: F, normalizer: Normalizer) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self { id: id.into(), f: Arc::new(f), normalizer }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn normalizer(&self) -> Normalizer {
        self.normalizer
    }

    #[inline]
    pub fn eval(&self, m1: f64, m2: f64) -> f64 {
        (self.f)(m1, m2)
    }

    /// Empirical normalizing constant for `marks`. Errors when it is zero
    /// (relative to the mark scale) or not finite.
    pub fn normalizer_value(&self, marks: &[f64]) -> Result<f64> {
        let value = match self.normalizer {
            Normalizer::Constant(c) => c,
            Normalizer::MeanSquared => summarize_marks(marks)?.mean.powi(2),
            Normalizer::Variance => summarize_marks(marks)?.variance,
        };
        let scale = marks.iter().map(|m| m * m).sum::<f64>() / marks.len().max(1) as f64;
        let negligible = match self.normalizer {
            Normalizer::Constant(_) => value == 0.0,
            _ => value <= 1e-14 * scale,
        };
        if negligible || !value.is_finite() {
            return Err(Error::ZeroNormalizer(self.id.clone()));
        }
        Ok(value)
    }
}

impl FromStr for TestFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mm" => Ok(Self::mm()),
            "vario" => Ok(Self::vario()),
            other => Err(Error::InvalidArgument(format!("unknown test function {other:?}"))),
        }
    }
}

/// Distances at which curves are evaluated, with the half-width of the
/// Epanechnikov pair kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RGrid {
    r: Vec<f64>,
    bandwidth: f64,
}

impl RGrid {
    pub fn new(r: Vec<f64>, bandwidth: f64) -> Result<Self> {
        if r.len() < 2 {
            return Err(Error::InvalidArgument("r grid needs at least two values".into()));
        }
        if r[0] < 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) || r.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("r grid must be finite, nonnegative and strictly increasing".into()));
        }
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::InvalidArgument(format!("pair bandwidth must be positive, got {bandwidth}")));
        }
        Ok(Self { r, bandwidth })
    }

    /// `steps` equispaced values on `[0, rmax]`.
    pub fn equispaced(rmax: f64, steps: usize, bandwidth: f64) -> Result<Self> {
        if steps < 2 || !(rmax > 0.0) {
            return Err(Error::InvalidArgument(format!("invalid r grid: rmax={rmax}, steps={steps}")));
        }
        let r = (0..steps).map(|i| rmax * i as f64 / (steps - 1) as f64).collect();
        Self::new(r, bandwidth)
    }

    /// 101 values on `[0, shorter side / 4]` with bandwidth `0.15 / √(N/|W|)`.
    pub fn default_for(pattern: &MarkedPointPattern) -> Result<Self> {
        Self::equispaced(default_rmax(pattern.window()), 101, default_pair_bandwidth(pattern))
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
    pub fn len(&self) -> usize {
        self.r.len()
    }
    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
    pub fn rmax(&self) -> f64 {
        *self.r.last().expect("grid is nonempty")
    }
}

pub fn default_rmax(window: &Window) -> f64 {
    window.shorter_side() / 4.0
}

/// Stoyan-style rule of thumb `0.15 / √(N/|W|)`.
pub fn default_pair_bandwidth(pattern: &MarkedPointPattern) -> f64 {
    0.15 / pattern.mean_intensity().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    #[serde(rename = "hom")]
    Homogeneous,
    #[default]
    #[serde(rename = "inhom")]
    Inhomogeneous,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Homogeneous => "hom",
            Flavor::Inhomogeneous => "inhom",
        }
    }
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hom" | "homogeneous" => Ok(Self::Homogeneous),
            "inhom" | "inhomogeneous" => Ok(Self::Inhomogeneous),
            other => Err(Error::InvalidArgument(format!("unknown flavor {other:?}"))),
        }
    }
}

/// Pair-correlation (kernel at distance `r`) or cumulative (`d ≤ r`) form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    #[default]
    Pcf,
    Cumulative,
}

impl FromStr for Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pcf" => Ok(Self::Pcf),
            "k" | "K" | "cumulative" => Ok(Self::Cumulative),
            other => Err(Error::InvalidArgument(format!("unknown estimator form {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    CUnnorm,
    Kappa,
    Gamma,
    Pcf,
    Numerator,
    Denominator,
    KRatio,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::CUnnorm => "c_unnorm",
            CurveKind::Kappa => "kappa",
            CurveKind::Gamma => "gamma",
            CurveKind::Pcf => "pcf",
            CurveKind::Numerator => "numerator",
            CurveKind::Denominator => "denominator",
            CurveKind::KRatio => "K_ratio",
        }
    }
}

/// Provenance attached to every curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub flavor: Flavor,
    pub form: Form,
    pub edge: EdgeCorrection,
    pub test_function: Option<String>,
    pub intensity: String,
    pub intensity_bandwidth: Option<f64>,
    pub pair_bandwidth: f64,
    pub normalizer: Option<f64>,
}

/// A function of distance on an [`RGrid`]; `None` entries are missing.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCurve {
    pub rgrid: RGrid,
    pub values: Vec<Option<f64>>,
    pub kind: CurveKind,
    pub meta: CurveMeta,
}

impl SummaryCurve {
    pub fn r(&self) -> &[f64] {
        self.rgrid.values()
    }

    pub fn valid_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Values with missing entries as NaN.
    pub fn to_nan_vec(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.unwrap_or(f64::NAN)).collect()
    }

    /// Mean of the defined values with `lo ≤ r ≤ hi`.
    pub fn mean_over(&self, lo: f64, hi: f64) -> Option<f64> {
        let vals: Vec<f64> = self
            .r()
            .iter()
            .zip(&self.values)
            .filter(|(r, _)| **r >= lo && **r <= hi)
            .filter_map(|(_, v)| *v)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }
}
