//! Run configuration: command-line flags layered over an optional TOML file
//! layered over built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;
use serde_json::{json, Value};

use markcorr::geometry::{EdgeCorrection, Window};
use markcorr::intensity::CvlObjective;
use markcorr::markcorr::{Flavor, TestFunction};

/// Options shared by every subcommand. Options a command does not use are
/// accepted and ignored so one config file can drive several commands.
#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    /// TOML file supplying values for any option below (flags take precedence)
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Pattern CSV with header x,y,mark
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Output directory [default: markcorr-out]
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Observation window xmin,xmax,ymin,ymax [default: bounding box of the points]
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,

    /// hom, inhom or both [default: inhom]
    #[arg(long)]
    pub flavor: Option<String>,

    /// mm, vario or both [default: mm; power-study follows the preset]
    #[arg(long)]
    pub tf: Option<String>,

    /// translation or ripley [default: translation]
    #[arg(long)]
    pub edge: Option<String>,

    /// Intensity or smoothing bandwidth, or `auto` for Cronie-van Lieshout selection [default: auto]
    #[arg(long)]
    pub bandwidth: Option<String>,

    /// Half-width of the pair kernel [default: 0.15/sqrt(N/|W|)]
    #[arg(long)]
    pub pair_bandwidth: Option<f64>,

    /// Largest distance of the r grid [default: shorter window side / 4]
    #[arg(long)]
    pub rmax: Option<f64>,

    /// Number of r values including 0 [default: 101]
    #[arg(long)]
    pub rsteps: Option<usize>,

    /// Number of permutations s [default: 999]
    #[arg(long)]
    pub perms: Option<usize>,

    /// Significance level [default: 0.05]
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Run seed [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,

    /// Cells per side of the output grid [default: 128]
    #[arg(long)]
    pub grid: Option<usize>,

    /// Scenario preset [default: assoc-poisson]
    #[arg(long)]
    pub preset: Option<String>,

    /// Number of simulated replicates [default: 1]
    #[arg(long)]
    pub replicates: Option<usize>,

    /// Number of patterns in a power study [default: 100]
    #[arg(long)]
    pub n_patterns: Option<usize>,

    /// Intensity estimator: mass-conserving, uniform or voronoi [default: mass-conserving]
    #[arg(long)]
    pub estimator: Option<String>,

    /// Voronoi retention probability [default: 0.2]
    #[arg(long)]
    pub retention: Option<f64>,

    /// Voronoi thinning replicates [default: 100]
    #[arg(long)]
    pub voronoi_replicates: Option<usize>,

    /// Objective for `auto` bandwidths: uncorrected or mass-conserving [default: uncorrected]
    #[arg(long)]
    pub cvl_objective: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum WindowValue {
    Bounds([f64; 4]),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum BandwidthValue {
    Number(f64),
    Text(String),
}

/// Keys accepted in a config file; names match the long flags with `_`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    window: Option<WindowValue>,
    flavor: Option<String>,
    tf: Option<String>,
    edge: Option<String>,
    bandwidth: Option<BandwidthValue>,
    pair_bandwidth: Option<f64>,
    rmax: Option<f64>,
    rsteps: Option<usize>,
    perms: Option<usize>,
    alpha: Option<f64>,
    seed: Option<u64>,
    grid: Option<usize>,
    preset: Option<String>,
    replicates: Option<usize>,
    n_patterns: Option<usize>,
    estimator: Option<String>,
    retention: Option<f64>,
    voronoi_replicates: Option<usize>,
    cvl_objective: Option<String>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Auto,
    Fixed(f64),
}

impl Bandwidth {
    fn parse(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Bandwidth::Auto);
        }
        let h: f64 = s.parse().with_context(|| format!("bandwidth must be a positive number or `auto`, got {s:?}"))?;
        Self::fixed(h)
    }

    fn fixed(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            bail!("bandwidth must be positive and finite, got {h}");
        }
        Ok(Bandwidth::Fixed(h))
    }

    fn to_value(self) -> Value {
        match self {
            Bandwidth::Auto => json!("auto"),
            Bandwidth::Fixed(h) => json!(h),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlavorSel {
    One(Flavor),
    Both,
}

impl FlavorSel {
    fn parse(s: &str) -> Result<Self> {
        if s == "both" {
            return Ok(FlavorSel::Both);
        }
        Ok(FlavorSel::One(s.parse()?))
    }

    pub fn flavors(self) -> Vec<Flavor> {
        match self {
            FlavorSel::One(f) => vec![f],
            FlavorSel::Both => vec![Flavor::Inhomogeneous, Flavor::Homogeneous],
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            FlavorSel::One(f) => f.as_str(),
            FlavorSel::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TfSel {
    Mm,
    Vario,
    Both,
}

impl TfSel {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "mm" => Ok(TfSel::Mm),
            "vario" => Ok(TfSel::Vario),
            "both" => Ok(TfSel::Both),
            other => bail!("unknown test function {other:?} (expected mm, vario or both)"),
        }
    }

    pub fn test_functions(self) -> Vec<TestFunction> {
        match self {
            TfSel::Mm => vec![TestFunction::mm()],
            TfSel::Vario => vec![TestFunction::vario()],
            TfSel::Both => vec![TestFunction::mm(), TestFunction::vario()],
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            TfSel::Mm => "mm",
            TfSel::Vario => "vario",
            TfSel::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    MassConserving,
    Uniform,
    Voronoi,
}

impl Estimator {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "mass-conserving" | "jd" => Ok(Estimator::MassConserving),
            "uniform" => Ok(Estimator::Uniform),
            "voronoi" => Ok(Estimator::Voronoi),
            other => bail!("unknown intensity estimator {other:?} (expected mass-conserving, uniform or voronoi)"),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Estimator::MassConserving => "mass-conserving",
            Estimator::Uniform => "uniform",
            Estimator::Voronoi => "voronoi",
        }
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone)]
pub struct Settings {
    pub input: Option<PathBuf>,
    pub output: PathBuf,
    pub window: Option<Window>,
    pub flavor: FlavorSel,
    /// `None` leaves the choice to the command.
    pub tf: Option<TfSel>,
    pub edge: EdgeCorrection,
    pub bandwidth: Bandwidth,
    pub pair_bandwidth: Option<f64>,
    pub rmax: Option<f64>,
    pub rsteps: usize,
    pub perms: usize,
    pub alpha: f64,
    pub seed: u64,
    pub grid: usize,
    pub preset: String,
    pub replicates: usize,
    pub n_patterns: usize,
    pub estimator: Estimator,
    pub retention: f64,
    pub voronoi_replicates: usize,
    pub cvl_objective: CvlObjective,
}

impl Settings {
    pub fn resolve(opts: &Opts) -> Result<Self> {
        let file = match &opts.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        Self::merge(opts, file)
    }

    fn merge(o: &Opts, f: FileConfig) -> Result<Self> {
        let window = match (&o.window, f.window) {
            (Some(s), _) => Some(s.parse::<Window>()?),
            (None, Some(WindowValue::Text(s))) => Some(s.parse::<Window>()?),
            (None, Some(WindowValue::Bounds([a, b, c, d]))) => Some(Window::new(a, b, c, d)?),
            (None, None) => None,
        };
        let bandwidth = match (&o.bandwidth, f.bandwidth) {
            (Some(s), _) => Bandwidth::parse(s)?,
            (None, Some(BandwidthValue::Text(s))) => Bandwidth::parse(&s)?,
            (None, Some(BandwidthValue::Number(h))) => Bandwidth::fixed(h)?,
            (None, None) => Bandwidth::Auto,
        };
        let pick = |flag: &Option<String>, file: Option<String>| flag.clone().or(file);
        let settings = Settings {
            input: o.input.clone().or(f.input),
            output: o.output.clone().or(f.output).unwrap_or_else(|| PathBuf::from("markcorr-out")),
            window,
            flavor: FlavorSel::parse(&pick(&o.flavor, f.flavor).unwrap_or_else(|| "inhom".into()))?,
            tf: pick(&o.tf, f.tf).map(|s| TfSel::parse(&s)).transpose()?,
            edge: pick(&o.edge, f.edge).map_or(Ok(EdgeCorrection::Translation), |s| s.parse())?,
            bandwidth,
            pair_bandwidth: o.pair_bandwidth.or(f.pair_bandwidth),
            rmax: o.rmax.or(f.rmax),
            rsteps: o.rsteps.or(f.rsteps).unwrap_or(101),
            perms: o.perms.or(f.perms).unwrap_or(999),
            alpha: o.alpha.or(f.alpha).unwrap_or(0.05),
            seed: o.seed.or(f.seed).unwrap_or(1),
            grid: o.grid.or(f.grid).unwrap_or(128),
            preset: pick(&o.preset, f.preset).unwrap_or_else(|| "assoc-poisson".into()),
            replicates: o.replicates.or(f.replicates).unwrap_or(1),
            n_patterns: o.n_patterns.or(f.n_patterns).unwrap_or(100),
            estimator: Estimator::parse(&pick(&o.estimator, f.estimator).unwrap_or_else(|| "mass-conserving".into()))?,
            retention: o.retention.or(f.retention).unwrap_or(0.2),
            voronoi_replicates: o.voronoi_replicates.or(f.voronoi_replicates).unwrap_or(100),
            cvl_objective: pick(&o.cvl_objective, f.cvl_objective).map_or(Ok(CvlObjective::default()), |s| s.parse())?,
        };
        settings.validate()?;
        Ok(settings)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            bail!("alpha must lie in (0, 1), got {}", self.alpha);
        }
        if self.grid == 0 {
            bail!("grid must be at least 1");
        }
        if let Some(h) = self.pair_bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                bail!("pair bandwidth must be positive, got {h}");
            }
        }
        if let Some(r) = self.rmax {
            if !(r > 0.0 && r.is_finite()) {
                bail!("rmax must be positive, got {r}");
            }
        }
        Ok(())
    }

    /// The settings in config-file form; feeding this back through
    /// `--config` reproduces the run.
    pub fn record(&self) -> Value {
        json!({
            "input": self.input,
            "output": self.output,
            "window": self.window.map(|w| w.as_array()),
            "flavor": self.flavor.as_str(),
            "tf": self.tf.map(TfSel::as_str),
            "edge": self.edge.as_str(),
            "bandwidth": self.bandwidth.to_value(),
            "pair_bandwidth": self.pair_bandwidth,
            "rmax": self.rmax,
            "rsteps": self.rsteps,
            "perms": self.perms,
            "alpha": self.alpha,
            "seed": self.seed,
            "grid": self.grid,
            "preset": self.preset,
            "replicates": self.replicates,
            "n_patterns": self.n_patterns,
            "estimator": self.estimator.as_str(),
            "retention": self.retention,
            "voronoi_replicates": self.voronoi_replicates,
            "cvl_objective": self.cvl_objective.as_str(),
        })
    }
}
