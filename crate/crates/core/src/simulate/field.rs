//! Gaussian random fields on a regular grid by dense Cholesky factorization.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::expr::SurfaceExpr;
use crate::error::{Error, Result};
use crate::geometry::{distance, QuadratureGrid};
use crate::rng;

/// Default cap on the number of field cells (64 × 64).
pub const DEFAULT_MAX_CELLS: usize = 4096;

/// Stationary isotropic covariance models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Covariance {
    /// `variance · exp(−d / scale)`
    Exponential { variance: f64, scale: f64 },
    /// `variance · exp(−rate · d²)`
    Gaussian { variance: f64, rate: f64 },
}

impl Covariance {
    pub fn variance(&self) -> f64 {
        match *self {
            Covariance::Exponential { variance, .. } | Covariance::Gaussian { variance, .. } => variance,
        }
    }

    pub fn at(&self, d: f64) -> f64 {
        match *self {
            Covariance::Exponential { variance, scale } => variance * (-d / scale).exp(),
            Covariance::Gaussian { variance, rate } => variance * (-rate * d * d).exp(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Covariance::Exponential { variance, scale } => variance >= 0.0 && scale > 0.0,
            Covariance::Gaussian { variance, rate } => variance >= 0.0 && rate > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid covariance parameters {self:?}")))
        }
    }
}

/// One realization of a Gaussian field at the cell centers of `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFieldSample {
    pub grid: QuadratureGrid,
    pub values: Vec<f64>,
    pub mean: SurfaceExpr,
    pub covariance: Covariance,
    pub seed: u64,
}

/// Factorized field model; sampling costs one triangular matrix-vector product.
#[derive(Debug, Clone)]
pub struct GaussianFieldSampler {
    grid: QuadratureGrid,
    mean_expr: SurfaceExpr,
    mean: Vec<f64>,
    covariance: Covariance,
    /// `None` when the variance is zero.
    factor: Option<DMatrix<f64>>,
    jitter: f64,
}

impl GaussianFieldSampler {
    pub fn new(mean: SurfaceExpr, covariance: Covariance, grid: QuadratureGrid, max_cells: usize) -> Result<Self> {
        covariance.validate()?;
        let n = grid.len();
        if n > max_cells {
            return Err(Error::InvalidArgument(format!(
                "field grid has {n} cells, more than the dense-factorization limit {max_cells}"
            )));
        }
        let centers: Vec<_> = grid.centers().collect();
        let mean_values = centers.iter().map(|&p| mean.eval(p)).collect();
        let variance = covariance.variance();
        if variance == 0.0 {
            return Ok(Self { grid, mean_expr: mean, mean: mean_values, covariance, factor: None, jitter: 0.0 });
        }
        let cov = DMatrix::from_fn(n, n, |i, j| covariance.at(distance(centers[i], centers[j])));
        let (factor, jitter) = cholesky_with_jitter(cov, variance)?;
        Ok(Self { grid, mean_expr: mean, mean: mean_values, covariance, factor: Some(factor), jitter })
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    /// Diagonal jitter that was needed for the factorization.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn sample_with<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match &self.factor {
            None => self.mean.clone(),
            Some(l) => {
                let n = self.mean.len();
                let eps = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
                let z = l * eps;
                self.mean.iter().zip(z.iter()).map(|(m, v)| m + v).collect()
            }
        }
    }

    pub fn sample(&self, seed: u64) -> GaussianFieldSample {
        let mut rng = rng::stream(seed, rng::tag::FIELD, 0);
        GaussianFieldSample {
            grid: self.grid.clone(),
            values: self.sample_with(&mut rng),
            mean: self.mean_expr.clone(),
            covariance: self.covariance,
            seed,
        }
    }
}

/// Lower Cholesky factor, adding `j · variance` to the diagonal for
/// `j ∈ {0, 1e-10, …, 1e-6}` until the factorization succeeds.
fn cholesky_with_jitter(cov: DMatrix<f64>, variance: f64) -> Result<(DMatrix<f64>, f64)> {
    let steps = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];
    for rel in steps {
        let jitter = rel * variance;
        let mut m = cov.clone();
        if jitter > 0.0 {
            for i in 0..m.nrows() {
                m[(i, i)] += jitter;
            }
        }
        if let Some(ch) = m.cholesky() {
            if jitter > 0.0 {
                log::info!("covariance factorized with diagonal jitter {jitter:e}");
            }
            return Ok((ch.unpack(), jitter));
        }
    }
    Err(Error::NotPositiveDefinite { jitter: 1e-6 * variance })
}

/// One-shot field sample; factorizes the covariance on every call.
pub fn simulate_gaussian_field(
    mean: SurfaceExpr,
    covariance: Covariance,
    grid: &QuadratureGrid,
    seed: u64,
) -> Result<GaussianFieldSample> {
    Ok(GaussianFieldSampler::new(mean, covariance, grid.clone(), DEFAULT_MAX_CELLS)?.sample(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Window;

    #[test]
    fn zero_variance_returns_mean() {
        let g = QuadratureGrid::new(Window::unit_square(), 8, 8).unwrap();
        let s = simulate_gaussian_field(
            SurfaceExpr::AssocLgcpMean,
            Covariance::Exponential { variance: 0.0, scale: 0.1 },
            &g,
            3,
        )
        .unwrap();
        for (i, v) in s.values.iter().enumerate() {
            assert_eq!(*v, SurfaceExpr::AssocLgcpMean.eval(g.center(i)));
        }
    }

    #[test]
    fn rejects_oversized_grid_and_bad_parameters() {
        let g = QuadratureGrid::new(Window::unit_square(), 10, 10).unwrap();
        let cov = Covariance::Exponential { variance: 1.0, scale: 0.1 };
        assert!(GaussianFieldSampler::new(SurfaceExpr::Constant(0.0), cov, g.clone(), 99).is_err());
        let bad = Covariance::Gaussian { variance: 1.0, rate: 0.0 };
        assert!(GaussianFieldSampler::new(SurfaceExpr::Constant(0.0), bad, g, 4096).is_err());
    }

    #[test]
    fn moments_match_covariance() {
        // 500 replicates on a small grid: lag-0 variance and covariance at one pair of cells
        let g = QuadratureGrid::new(Window::unit_square(), 6, 6).unwrap();
        let cov = Covariance::Exponential { variance: 1.5, scale: 0.12 };
        let sampler = GaussianFieldSampler::new(SurfaceExpr::Constant(2.0), cov, g.clone(), 4096).unwrap();
        let (a, b) = (7, 8);
        let reps = 500;
        let samples: Vec<Vec<f64>> = (0..reps).map(|s| sampler.sample(s as u64).values).collect();
        let var: f64 =
            samples.iter().flat_map(|v| v.iter().map(|x| (x - 2.0).powi(2))).sum::<f64>() / (reps * g.len()) as f64;
        assert!((var - 1.5).abs() / 1.5 < 0.1, "variance {var}");
        let prods: Vec<f64> = samples.iter().map(|v| (v[a] - 2.0) * (v[b] - 2.0)).collect();
        let mean = prods.iter().sum::<f64>() / reps as f64;
        let sd = (prods.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        let target = cov.at(distance(g.center(a), g.center(b)));
        assert!((mean - target).abs() < 3.0 * sd / (reps as f64).sqrt(), "cov {mean} vs {target}");
    }

    #[test]
    fn gaussian_covariance_needs_jitter_but_factorizes() {
        let g = QuadratureGrid::new(Window::unit_square(), 24, 24).unwrap();
        let cov = Covariance::Gaussian { variance: 1.0, rate: 100.0 };
        let sampler = GaussianFieldSampler::new(SurfaceExpr::Constant(0.0), cov, g, 4096).unwrap();
        assert!(sampler.jitter() <= 1e-6);
        assert_eq!(sampler.sample(1).values, sampler.sample(1).values);
    }
}
