use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, QuadratureGrid, Window};

/// Piecewise-constant surface on a regular grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Raster {
    pub grid: QuadratureGrid,
    pub values: Vec<f64>,
}

impl Raster {
    pub fn new(grid: QuadratureGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "raster has {} values for {} cells",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.grid.cell_of(p).map_or(0.0, |i| self.values[i])
    }
}

/// Closed set of surfaces used as intensities or Gaussian-field means on
/// the unit square, plus constants and rasters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceExpr {
    Constant(f64),
    /// `50 exp(sin(4x² + 4y²))`
    AssocPoissonIntensity,
    /// `40 (x + y + 0.5)⁴`
    VarioPoissonIntensity,
    /// `log 90 + sin(4x² + 4y²) − 1`
    AssocLgcpMean,
    /// `log(200 (x + y + 0.1))`
    VarioLgcpMean,
    /// `90 exp(sin(4x² + 4y²) − 0.25)`: the mean intensity of the association LGCP.
    AssocLgcpIntensity,
    /// `200 (x + y + 0.1) exp(0.5)`: the mean intensity of the variation LGCP.
    VarioLgcpIntensity,
    Raster(Raster),
}

impl SurfaceExpr {
    pub fn eval(&self, p: Point) -> f64 {
        let (x, y) = (p.x, p.y);
        match self {
            SurfaceExpr::Constant(c) => *c,
            SurfaceExpr::AssocPoissonIntensity => 50.0 * (4.0 * x * x + 4.0 * y * y).sin().exp(),
            SurfaceExpr::VarioPoissonIntensity => 40.0 * (x + y + 0.5).powi(4),
            SurfaceExpr::AssocLgcpMean => 90f64.ln() + (4.0 * x * x + 4.0 * y * y).sin() - 1.0,
            SurfaceExpr::VarioLgcpMean => (200.0 * (x + y + 0.1)).ln(),
            SurfaceExpr::AssocLgcpIntensity => 90.0 * ((4.0 * x * x + 4.0 * y * y).sin() - 0.25).exp(),
            SurfaceExpr::VarioLgcpIntensity => 200.0 * (x + y + 0.1) * 0.5f64.exp(),
            SurfaceExpr::Raster(r) => r.eval(p),
        }
    }

    /// Upper bound for thinning: 1.1 times the maximum over a 257×257 lattice
    /// including the window boundary (exact maximum for rasters).
    pub fn bound(&self, window: &Window) -> Result<f64> {
        let max = match self {
            SurfaceExpr::Raster(r) => r.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            _ => {
                const M: usize = 257;
                let mut max = f64::NEG_INFINITY;
                for iy in 0..M {
                    for ix in 0..M {
                        let p = Point::new(
                            window.xmin() + window.width() * ix as f64 / (M - 1) as f64,
                            window.ymin() + window.height() * iy as f64 / (M - 1) as f64,
                        );
                        let v = self.eval(p);
                        if v.is_nan() || v < 0.0 {
                            return Err(Error::UnboundedIntensity(format!("value {v} at ({}, {})", p.x, p.y)));
                        }
                        max = max.max(v);
                    }
                }
                max
            }
        };
        if !max.is_finite() || max < 0.0 {
            return Err(Error::UnboundedIntensity(format!("grid maximum is {max}")));
        }
        Ok(1.1 * max)
    }

    /// Midpoint-rule integral over `grid`.
    pub fn integrate(&self, grid: &QuadratureGrid) -> f64 {
        grid.centers().map(|p| self.eval(p)).sum::<f64>() * grid.cell_area()
    }
}
