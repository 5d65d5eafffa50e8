//! Scenario simulators: inhomogeneous Poisson and log-Gaussian Cox ground
//! processes with deterministic or noisy mark rules on the unit square.

mod expr;
mod field;

pub use expr::{Raster, SurfaceExpr};
pub use field::{
    simulate_gaussian_field, Covariance, GaussianFieldSample, GaussianFieldSampler, DEFAULT_MAX_CELLS,
};

use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, QuadratureGrid, Window};
use crate::pattern::MarkedPointPattern;
use crate::rng;

/// Unmarked generating mechanism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ground {
    Poisson { intensity: SurfaceExpr },
    Lgcp { mean: SurfaceExpr, covariance: Covariance, nx: usize, ny: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarkRule {
    /// `sin(x² + y²)`
    SinAssociation,
    /// `a · sin(√(x² + y²))`, `a ~ U(0, 0.5)` independently per point
    NoisyAmplitude,
    /// `U(0, 1)` independently per point
    IidUniform,
}

impl FromStr for MarkRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sin-association" => Ok(Self::SinAssociation),
            "noisy-amplitude" => Ok(Self::NoisyAmplitude),
            "iid-uniform" => Ok(Self::IidUniform),
            other => Err(Error::InvalidArgument(format!("unknown mark rule {other:?}"))),
        }
    }
}

/// A complete generative scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub window: Window,
    pub ground: Ground,
    pub marks: MarkRule,
}

pub const PRESET_NAMES: [&str; 4] = ["assoc-poisson", "assoc-lgcp", "vario-poisson", "vario-lgcp"];

/// The four simulation scenarios on `[0, 1]²`.
pub fn scenario_preset(name: &str) -> Result<ScenarioSpec> {
    let (ground, marks) = match name {
        "assoc-poisson" => (Ground::Poisson { intensity: SurfaceExpr::AssocPoissonIntensity }, MarkRule::SinAssociation),
        "assoc-lgcp" => (
            Ground::Lgcp {
                mean: SurfaceExpr::AssocLgcpMean,
                covariance: Covariance::Exponential { variance: 1.5, scale: 0.12 },
                nx: 64,
                ny: 64,
            },
            MarkRule::SinAssociation,
        ),
        "vario-poisson" => (Ground::Poisson { intensity: SurfaceExpr::VarioPoissonIntensity }, MarkRule::NoisyAmplitude),
        "vario-lgcp" => (
            Ground::Lgcp {
                mean: SurfaceExpr::VarioLgcpMean,
                covariance: Covariance::Gaussian { variance: 1.0, rate: 100.0 },
                nx: 64,
                ny: 64,
            },
            MarkRule::NoisyAmplitude,
        ),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(ScenarioSpec { name: name.to_string(), window: Window::unit_square(), ground, marks })
}

impl ScenarioSpec {
    /// Mean intensity of the ground process (used by simulation checks).
    pub fn expected_intensity(&self) -> Option<SurfaceExpr> {
        match (&self.ground, self.name.as_str()) {
            (Ground::Poisson { intensity }, _) => Some(intensity.clone()),
            (Ground::Lgcp { .. }, "assoc-lgcp") => Some(SurfaceExpr::AssocLgcpIntensity),
            (Ground::Lgcp { .. }, "vario-lgcp") => Some(SurfaceExpr::VarioLgcpIntensity),
            _ => None,
        }
    }
}

fn uniform_in<R: Rng>(rng: &mut R, x0: f64, x1: f64, y0: f64, y1: f64) -> Point {
    Point::new(x0 + (x1 - x0) * rng.random::<f64>(), y0 + (y1 - y0) * rng.random::<f64>())
}

fn poisson_count<R: Rng>(rng: &mut R, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite Poisson mean");
    dist.sample(rng) as usize
}

/// Inhomogeneous Poisson process by thinning a homogeneous one at the
/// bounding rate. Marks are zero.
pub fn simulate_inhomogeneous_poisson(intensity: &SurfaceExpr, window: &Window, seed: u64) -> Result<MarkedPointPattern> {
    let bound = intensity.bound(window)?;
    let mut rng = rng::stream(seed, rng::tag::POINTS, 0);
    let n = poisson_count(&mut rng, bound * window.area());
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let u = uniform_in(&mut rng, window.xmin(), window.xmax(), window.ymin(), window.ymax());
        let keep: f64 = rng.random();
        if keep * bound < intensity.eval(u) {
            points.push(u);
        }
    }
    MarkedPointPattern::unmarked(*window, points)
}

/// Log-Gaussian Cox process with a piecewise-constant intensity
/// `exp(Z(cell))` over the field grid.
#[derive(Debug, Clone)]
pub struct LgcpSimulator {
    window: Window,
    sampler: GaussianFieldSampler,
}

impl LgcpSimulator {
    pub fn new(mean: SurfaceExpr, covariance: Covariance, window: Window, nx: usize, ny: usize) -> Result<Self> {
        let grid = QuadratureGrid::new(window, nx, ny)?;
        let sampler = GaussianFieldSampler::new(mean, covariance, grid, DEFAULT_MAX_CELLS.max(nx * ny))?;
        Ok(Self { window, sampler })
    }

    pub fn sampler(&self) -> &GaussianFieldSampler {
        &self.sampler
    }

    pub fn simulate(&self, seed: u64) -> Result<MarkedPointPattern> {
        let field = self.sampler.sample(seed);
        self.points_given_field(&field.values, seed)
    }

    /// Cox points given log-intensity values per cell.
    pub fn points_given_field(&self, log_intensity: &[f64], seed: u64) -> Result<MarkedPointPattern> {
        let grid = self.sampler.grid();
        let mut rng = rng::stream(seed, rng::tag::POINTS, 0);
        let (dx, dy) = (grid.dx(), grid.dy());
        let mut points = Vec::new();
        for (i, z) in log_intensity.iter().enumerate() {
            let lambda = z.exp();
            if !lambda.is_finite() {
                return Err(Error::UnboundedIntensity(format!("field value {z} overflows")));
            }
            let c = grid.center(i);
            let k = poisson_count(&mut rng, lambda * grid.cell_area());
            for _ in 0..k {
                points.push(uniform_in(&mut rng, c.x - 0.5 * dx, c.x + 0.5 * dx, c.y - 0.5 * dy, c.y + 0.5 * dy));
            }
        }
        let points = points
            .into_iter()
            .map(|p| Point::new(p.x.clamp(self.window.xmin(), self.window.xmax()), p.y.clamp(self.window.ymin(), self.window.ymax())))
            .collect();
        MarkedPointPattern::unmarked(self.window, points)
    }
}

/// One-shot LGCP draw; factorizes the covariance on every call.
pub fn simulate_lgcp(
    mean: SurfaceExpr,
    covariance: Covariance,
    window: Window,
    nx: usize,
    ny: usize,
    seed: u64,
) -> Result<MarkedPointPattern> {
    LgcpSimulator::new(mean, covariance, window, nx, ny)?.simulate(seed)
}

/// Attaches marks to a pattern's locations according to `rule`.
pub fn assign_marks(pattern: &MarkedPointPattern, rule: MarkRule, seed: u64) -> MarkedPointPattern {
    let mut rng = rng::stream(seed, rng::tag::MARKS, 0);
    let marks = pattern
        .points()
        .iter()
        .map(|p| match rule {
            MarkRule::SinAssociation => (p.x * p.x + p.y * p.y).sin(),
            MarkRule::NoisyAmplitude => 0.5 * rng.random::<f64>() * (p.x * p.x + p.y * p.y).sqrt().sin(),
            MarkRule::IidUniform => rng.random::<f64>(),
        })
        .collect();
    pattern.with_marks(marks).expect("finite marks at valid points")
}

/// Scenario with any expensive setup (field factorization) done once.
#[derive(Debug, Clone)]
pub struct ScenarioSimulator {
    spec: ScenarioSpec,
    lgcp: Option<LgcpSimulator>,
}

impl ScenarioSimulator {
    pub fn new(spec: ScenarioSpec) -> Result<Self> {
        let lgcp = match &spec.ground {
            Ground::Poisson { intensity } => {
                intensity.bound(&spec.window)?;
                None
            }
            Ground::Lgcp { mean, covariance, nx, ny } => {
                Some(LgcpSimulator::new(mean.clone(), *covariance, spec.window, *nx, *ny)?)
            }
        };
        Ok(Self { spec, lgcp })
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    /// Unmarked locations for `seed`.
    pub fn ground(&self, seed: u64) -> Result<MarkedPointPattern> {
        match (&self.spec.ground, &self.lgcp) {
            (_, Some(l)) => l.simulate(seed),
            (Ground::Poisson { intensity }, None) => simulate_inhomogeneous_poisson(intensity, &self.spec.window, seed),
            (Ground::Lgcp { .. }, None) => unreachable!("LGCP simulator is built in new"),
        }
    }

    /// Marked pattern for `seed` using the scenario's mark rule.
    pub fn simulate(&self, seed: u64) -> Result<MarkedPointPattern> {
        Ok(assign_marks(&self.ground(seed)?, self.spec.marks, seed))
    }
}
