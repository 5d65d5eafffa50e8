use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, QuadratureGrid};
use crate::pattern::MarkedPointPattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkStatistic {
    Mean,
    Variance,
}

impl FromStr for MarkStatistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Self::Mean),
            "variance" | "var" => Ok(Self::Variance),
            other => Err(Error::InvalidArgument(format!("unknown mark statistic {other:?}"))),
        }
    }
}

/// Kernel-smoothed local mark mean or variance on a grid. `None` marks cells
/// where the kernel weights underflow to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkSurface {
    pub grid: QuadratureGrid,
    pub bandwidth: f64,
    pub statistic: MarkStatistic,
    pub values: Vec<Option<f64>>,
}

impl MarkSurface {
    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

/// Nadaraya–Watson estimate at one location; `None` if all weights vanish.
pub fn nadaraya_watson_at(
    points: &[Point],
    marks: &[f64],
    u: Point,
    bandwidth: f64,
    statistic: MarkStatistic,
) -> Option<f64> {
    let inv = 1.0 / (2.0 * bandwidth * bandwidth);
    let weights: Vec<f64> = points
        .iter()
        .map(|x| (-((u.x - x.x).powi(2) + (u.y - x.y).powi(2)) * inv).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_normal() {
        return None;
    }
    let (lo, hi) = marks.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &m| (a.min(m), b.max(m)));
    let mean = (weights.iter().zip(marks).map(|(w, m)| w * m).sum::<f64>() / total).clamp(lo, hi);
    match statistic {
        MarkStatistic::Mean => Some(mean),
        MarkStatistic::Variance => {
            let var = weights.iter().zip(marks).map(|(w, m)| w * (m - mean).powi(2)).sum::<f64>() / total;
            Some(var.max(0.0))
        }
    }
}

pub fn nadaraya_watson_mark_surface(
    pattern: &MarkedPointPattern,
    bandwidth: f64,
    grid: &QuadratureGrid,
    statistic: MarkStatistic,
) -> Result<MarkSurface> {
    if pattern.len() < 2 {
        return Err(Error::InsufficientPoints { got: pattern.len(), need: 2 });
    }
    if !(bandwidth > 0.0) {
        return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let marks = pattern.marks();
    let (lo, hi) = marks.iter().fold((f64::MAX, f64::MIN), |(a, b), &m| (a.min(m), b.max(m)));
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            nadaraya_watson_at(pattern.points(), marks, grid.center(i), bandwidth, statistic).map(|v| match statistic {
                // a convex combination cannot leave the mark range
                MarkStatistic::Mean => v.clamp(lo, hi),
                MarkStatistic::Variance => v,
            })
        })
        .collect();
    Ok(MarkSurface { grid: grid.clone(), bandwidth, statistic, values })
}
