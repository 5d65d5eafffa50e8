//! Nonparametric intensity estimation and Nadaraya–Watson mark smoothing.
//!
//! Every estimator produces an [`IntensityField`]: values at the data points
//! (used by the pair-sum estimators) and, optionally, values on a
//! [`QuadratureGrid`] (used for export and mass checks). All stored values are
//! floored at `1e-8 · N/|W|` so that reciprocal weights stay finite.

mod bandwidth;
mod kernel;
mod smoothing;
mod voronoi;

pub use bandwidth::{
    cvl_objective, default_bandwidth_candidates, select_bandwidth_cvl, select_bandwidth_cvl_with, BandwidthSelection,
    CvlObjective,
};
pub use kernel::{
    edge_factor_cw, gaussian_kernel, kernel_intensity_massconserving, kernel_intensity_uniform,
    massconserving_at_points, uncorrected_at_points,
};
pub use smoothing::{nadaraya_watson_mark_surface, MarkStatistic, MarkSurface};
pub use voronoi::{voronoi_cell_areas, voronoi_intensity, ConvexPolygon};

use serde::{Deserialize, Serialize};

use crate::geometry::{Point, QuadratureGrid};
use crate::pattern::MarkedPointPattern;

/// Relative clamp floor applied to intensity values (times `N/|W|`).
pub const CLAMP_RELATIVE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    UniformKernel,
    MassConservingKernel,
    VoronoiResample,
    Constant,
    /// A known intensity function evaluated directly.
    Supplied,
}

impl EstimatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::UniformKernel => "uniform-kernel",
            EstimatorKind::MassConservingKernel => "mass-conserving-kernel",
            EstimatorKind::VoronoiResample => "voronoi-resample",
            EstimatorKind::Constant => "constant",
            EstimatorKind::Supplied => "supplied",
        }
    }
}

/// Per-cell values on a quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridValues {
    pub grid: QuadratureGrid,
    pub values: Vec<f64>,
}

impl GridValues {
    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Estimated (or known) intensity surface.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityField {
    kind: EstimatorKind,
    bandwidth: Option<f64>,
    at_points: Vec<f64>,
    grid: Option<GridValues>,
    floor: f64,
    clamped: usize,
}

impl IntensityField {
    /// Builds a field from raw values, applying the clamp floor.
    pub fn from_raw(
        pattern: &MarkedPointPattern,
        kind: EstimatorKind,
        bandwidth: Option<f64>,
        mut at_points: Vec<f64>,
        grid: Option<GridValues>,
    ) -> Self {
        let floor = clamp_floor(pattern);
        let mut clamped = clamp_all(&mut at_points, floor);
        let grid = grid.map(|mut g| {
            clamped += clamp_all(&mut g.values, floor);
            g
        });
        Self { kind, bandwidth, at_points, grid, floor, clamped }
    }

    /// The homogeneous field `N/|W|`.
    pub fn constant(pattern: &MarkedPointPattern, grid: Option<&QuadratureGrid>) -> Self {
        let lambda = pattern.mean_intensity();
        let grid = grid.map(|g| GridValues { grid: g.clone(), values: vec![lambda; g.len()] });
        Self {
            kind: EstimatorKind::Constant,
            bandwidth: None,
            at_points: vec![lambda; pattern.len()],
            grid,
            floor: CLAMP_RELATIVE * lambda,
            clamped: 0,
        }
    }

    /// Evaluates a known intensity function at the data points (and grid).
    pub fn supplied<F>(pattern: &MarkedPointPattern, f: F, grid: Option<&QuadratureGrid>) -> Self
    where
        F: Fn(Point) -> f64,
    {
        let at_points = pattern.points().iter().map(|&p| f(p)).collect();
        let grid = grid.map(|g| GridValues { grid: g.clone(), values: g.centers().map(&f).collect() });
        Self::from_raw(pattern, EstimatorKind::Supplied, None, at_points, grid)
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }
    pub fn bandwidth(&self) -> Option<f64> {
        self.bandwidth
    }
    pub fn at_points(&self) -> &[f64] {
        &self.at_points
    }
    pub fn grid(&self) -> Option<&GridValues> {
        self.grid.as_ref()
    }
    pub fn floor(&self) -> f64 {
        self.floor
    }
    /// Number of values raised to the floor.
    pub fn clamp_count(&self) -> usize {
        self.clamped
    }
}

fn clamp_floor(pattern: &MarkedPointPattern) -> f64 {
    let base = pattern.mean_intensity();
    if base > 0.0 {
        CLAMP_RELATIVE * base
    } else {
        f64::MIN_POSITIVE
    }
}

fn clamp_all(values: &mut [f64], floor: f64) -> usize {
    let mut n = 0;
    for v in values.iter_mut() {
        if !(*v >= floor) {
            *v = floor;
            n += 1;
        }
    }
    n
}
