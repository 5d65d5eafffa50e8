use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rayon::prelude::*;
use libm::erfc;

use super::{EstimatorKind, GridValues, IntensityField};
use crate::geometry::{Point, QuadratureGrid, Window};
use crate::pattern::MarkedPointPattern;

/// Isotropic Gaussian density with standard deviation `sigma`, at offset `(dx, dy)`.
#[inline]
pub fn gaussian_kernel(dx: f64, dy: f64, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    (-(dx * dx + dy * dy) / (2.0 * s2)).exp() / (2.0 * PI * s2)
}

#[inline]
fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Kernel mass inside the window, `∫_W K(u − v) dv`, for the Gaussian kernel.
pub fn edge_factor_cw(window: &Window, u: Point, bandwidth: f64) -> f64 {
    let fx = std_normal_cdf((window.xmax() - u.x) / bandwidth) - std_normal_cdf((window.xmin() - u.x) / bandwidth);
    let fy = std_normal_cdf((window.ymax() - u.y) / bandwidth) - std_normal_cdf((window.ymin() - u.y) / bandwidth);
    fx * fy
}

fn kernel_sum(points: &[Point], weights: Option<&[f64]>, u: Point, bandwidth: f64) -> f64 {
    match weights {
        None => points.iter().map(|x| gaussian_kernel(u.x - x.x, u.y - x.y, bandwidth)).sum(),
        Some(w) => points
            .iter()
            .zip(w)
            .map(|(x, wx)| gaussian_kernel(u.x - x.x, u.y - x.y, bandwidth) * wx)
            .sum(),
    }
}

/// Uniformly corrected kernel estimator `Σ K(u − x) / c_W(u)`, unbiased
/// under homogeneity.
pub fn kernel_intensity_uniform(
    pattern: &MarkedPointPattern,
    bandwidth: f64,
    grid: Option<&QuadratureGrid>,
) -> IntensityField {
    assert!(bandwidth > 0.0, "bandwidth must be positive");
    let window = *pattern.window();
    let pts = pattern.points();
    let eval = |u: Point| kernel_sum(pts, None, u, bandwidth) / edge_factor_cw(&window, u, bandwidth);
    let at_points = pts.iter().map(|&u| eval(u)).collect();
    let grid = grid.map(|g| GridValues {
        grid: g.clone(),
        values: (0..g.len()).into_par_iter().map(|i| eval(g.center(i))).collect(),
    });
    IntensityField::from_raw(pattern, EstimatorKind::UniformKernel, Some(bandwidth), at_points, grid)
}

/// Leave-in kernel sum `Σ K(u − x)` at the data points, without edge correction.
pub fn uncorrected_at_points(pattern: &MarkedPointPattern, bandwidth: f64) -> Vec<f64> {
    let pts = pattern.points();
    pts.iter().map(|&u| kernel_sum(pts, None, u, bandwidth)).collect()
}

/// Unclamped mass-conserving estimate `Σ K(u − x) / c_W(x)` at the data points.
pub fn massconserving_at_points(pattern: &MarkedPointPattern, bandwidth: f64) -> Vec<f64> {
    let inv_cw = inverse_edge_factors(pattern, bandwidth);
    let pts = pattern.points();
    pts.iter().map(|&u| kernel_sum(pts, Some(&inv_cw), u, bandwidth)).collect()
}

fn inverse_edge_factors(pattern: &MarkedPointPattern, bandwidth: f64) -> Vec<f64> {
    let window = pattern.window();
    pattern.points().iter().map(|&x| 1.0 / edge_factor_cw(window, x, bandwidth)).collect()
}

/// Mass-conserving kernel estimator `Σ K(u − x) / c_W(x)`; integrates to `N`
/// over the window.
pub fn kernel_intensity_massconserving(
    pattern: &MarkedPointPattern,
    bandwidth: f64,
    grid: Option<&QuadratureGrid>,
) -> IntensityField {
    assert!(bandwidth > 0.0, "bandwidth must be positive");
    let inv_cw = inverse_edge_factors(pattern, bandwidth);
    let pts = pattern.points();
    let eval = |u: Point| kernel_sum(pts, Some(&inv_cw), u, bandwidth);
    let at_points = pts.iter().map(|&u| eval(u)).collect();
    let grid = grid.map(|g| GridValues {
        grid: g.clone(),
        values: (0..g.len()).into_par_iter().map(|i| eval(g.center(i))).collect(),
    });
    IntensityField::from_raw(pattern, EstimatorKind::MassConservingKernel, Some(bandwidth), at_points, grid)
}
