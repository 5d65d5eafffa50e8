use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use markcorr::envelope::run_random_labelling_test;
use markcorr::geometry::QuadratureGrid;
use markcorr::intensity::{
    default_bandwidth_candidates, kernel_intensity_massconserving, kernel_intensity_uniform,
    nadaraya_watson_mark_surface, select_bandwidth_cvl_with, voronoi_intensity, BandwidthSelection, IntensityField,
    MarkStatistic,
};
use markcorr::io::{curves_csv, envelope_csv, grid_csv, write_atomic, write_json};
use markcorr::markcorr::{
    default_pair_bandwidth, default_rmax, BandwidthChoice, CurveRecipe, Flavor, IntensitySpec, RGrid, TestFunction,
};
use markcorr::pattern::{read_pattern, read_points_with_bbox, write_pattern_to, MarkedPointPattern};
use markcorr::rng::{self, tag};
use markcorr::simulate::{scenario_preset, ScenarioSimulator};
use markcorr::study::{pattern_seed, run_power_study, PowerStudyConfig};
use markcorr::Error;

use crate::config::{Bandwidth, Estimator, FlavorSel, Settings, TfSel};

/// Fine grid used to report the expected count of a scenario.
const EXPECTATION_GRID: usize = 512;

fn sidecar(command: &str, settings: &Settings) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("tool".into(), json!("markcorr"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(command));
    m.insert("settings".into(), settings.record());
    m
}

fn output_dir(settings: &Settings) -> Result<&Path> {
    let dir = settings.output.as_path();
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir)
}

fn load_pattern(settings: &Settings) -> Result<MarkedPointPattern> {
    let Some(path) = &settings.input else {
        bail!("--input is required for this command");
    };
    let pattern = match settings.window {
        Some(w) => read_pattern(path, w),
        None => read_points_with_bbox(path),
    }
    .with_context(|| format!("reading {}", path.display()))?;
    log::info!("read {} points from {}", pattern.len(), path.display());
    Ok(pattern)
}

fn require_points(pattern: &MarkedPointPattern, need: usize) -> Result<()> {
    if pattern.len() < need {
        return Err(Error::InsufficientPoints { got: pattern.len(), need }.into());
    }
    Ok(())
}

fn rgrid(settings: &Settings, pattern: &MarkedPointPattern) -> Result<RGrid> {
    let rmax = settings.rmax.unwrap_or_else(|| default_rmax(pattern.window()));
    let h = settings.pair_bandwidth.unwrap_or_else(|| default_pair_bandwidth(pattern));
    Ok(RGrid::equispaced(rmax, settings.rsteps, h)?)
}

fn bandwidth_choice(settings: &Settings) -> BandwidthChoice {
    match settings.bandwidth {
        Bandwidth::Fixed(h) => BandwidthChoice::Fixed(h),
        Bandwidth::Auto => BandwidthChoice::CronieVanLieshout { candidates: None, objective: settings.cvl_objective },
    }
}

fn voronoi_seed(settings: &Settings) -> u64 {
    rng::derive_seed(settings.seed, tag::THINNING, 0)
}

fn intensity_spec(settings: &Settings) -> IntensitySpec {
    match settings.estimator {
        Estimator::MassConserving => IntensitySpec::MassConservingKernel(bandwidth_choice(settings)),
        Estimator::Uniform => IntensitySpec::UniformKernel(bandwidth_choice(settings)),
        Estimator::Voronoi => IntensitySpec::Voronoi {
            retention: settings.retention,
            replicates: settings.voronoi_replicates,
            seed: voronoi_seed(settings),
        },
    }
}

fn resolve_bandwidth(settings: &Settings, pattern: &MarkedPointPattern) -> Result<(f64, Option<BandwidthSelection>)> {
    match settings.bandwidth {
        Bandwidth::Fixed(h) => Ok((h, None)),
        Bandwidth::Auto => {
            let cands = default_bandwidth_candidates(pattern.window());
            let sel = select_bandwidth_cvl_with(pattern, &cands, settings.cvl_objective)?;
            log::info!("selected bandwidth {} ({} objective {})", sel.bandwidth, sel.criterion, sel.objective);
            Ok((sel.bandwidth, Some(sel)))
        }
    }
}

fn intensity_summary(field: &IntensityField) -> Value {
    json!({
        "kind": field.kind().as_str(),
        "bandwidth": field.bandwidth(),
        "clamp_count": field.clamp_count(),
        "floor": field.floor(),
        "integral": field.grid().map(|g| g.integral()),
    })
}

fn pattern_summary(pattern: &MarkedPointPattern) -> Value {
    json!({ "n_points": pattern.len(), "window": pattern.window().as_array() })
}

fn single_tf(settings: &Settings) -> Result<TestFunction> {
    match settings.tf.unwrap_or(TfSel::Mm) {
        TfSel::Mm => Ok(TestFunction::mm()),
        TfSel::Vario => Ok(TestFunction::vario()),
        TfSel::Both => bail!("this command tests one statistic; choose --tf mm or --tf vario"),
    }
}

fn single_flavor(settings: &Settings) -> Result<Flavor> {
    match settings.flavor {
        FlavorSel::One(f) => Ok(f),
        FlavorSel::Both => bail!("this command tests one statistic; choose --flavor hom or --flavor inhom"),
    }
}

pub fn simulate(settings: &Settings) -> Result<()> {
    if settings.replicates == 0 {
        bail!("--replicates must be at least 1");
    }
    let spec = scenario_preset(&settings.preset)?;
    let expected = spec.expected_intensity().map(|e| {
        let g = QuadratureGrid::new(spec.window, EXPECTATION_GRID, EXPECTATION_GRID).expect("positive grid size");
        e.integrate(&g)
    });
    let sim = ScenarioSimulator::new(spec.clone())?;
    let patterns: Vec<(u64, MarkedPointPattern)> = (0..settings.replicates)
        .into_par_iter()
        .map(|i| {
            let seed = pattern_seed(settings.seed, i);
            sim.simulate(seed).map(|p| (seed, p))
        })
        .collect::<std::result::Result<_, _>>()?;
    let dir = output_dir(settings)?;
    let width = settings.replicates.saturating_sub(1).to_string().len().max(3);
    let mut entries = Vec::new();
    for (i, (seed, pattern)) in patterns.iter().enumerate() {
        let file = format!("replicate_{i:0width$}.csv");
        let mut buf = Vec::new();
        write_pattern_to(pattern, &mut buf)?;
        write_atomic(&dir.join(&file), &buf)?;
        entries.push(json!({ "index": i, "seed": seed, "file": file, "n_points": pattern.len() }));
    }
    let counts: Vec<f64> = patterns.iter().map(|(_, p)| p.len() as f64).collect();
    let mut manifest = sidecar("simulate", settings);
    manifest.insert("scenario".into(), serde_json::to_value(&spec)?);
    manifest.insert("seed_derivation".into(), json!("replicate i uses derive_seed(seed, REPLICATE, i)"));
    manifest.insert("expected_count".into(), json!(expected));
    manifest.insert("mean_count".into(), json!(counts.iter().sum::<f64>() / counts.len() as f64));
    manifest.insert("replicates".into(), Value::Array(entries));
    write_json(&dir.join("manifest.json"), &manifest)?;
    println!("wrote {} replicates of {} to {}", settings.replicates, settings.preset, dir.display());
    Ok(())
}

pub fn markcorr(settings: &Settings) -> Result<()> {
    let pattern = load_pattern(settings)?;
    require_points(&pattern, 2)?;
    let grid = rgrid(settings, &pattern)?;
    let flavors = settings.flavor.flavors();
    let spec = intensity_spec(settings);
    let estimated = if flavors.contains(&Flavor::Inhomogeneous) { Some(spec.estimate(&pattern)?) } else { None };
    let mut curves = Vec::new();
    for tf in settings.tf.unwrap_or(TfSel::Mm).test_functions() {
        for &flavor in &flavors {
            let recipe = CurveRecipe {
                edge: settings.edge,
                rgrid: Some(grid.clone()),
                intensity: spec.clone(),
                ..CurveRecipe::normalized(tf.clone(), flavor)
            };
            let prepared = match (&estimated, flavor) {
                (Some((field, sel)), Flavor::Inhomogeneous) => recipe.prepare_with(&pattern, field.clone(), sel.clone())?,
                _ => recipe.prepare(&pattern)?,
            };
            curves.push(prepared.curve(pattern.marks())?);
        }
    }
    let dir = output_dir(settings)?;
    let refs: Vec<_> = curves.iter().collect();
    write_atomic(&dir.join("curves.csv"), curves_csv(&refs).as_bytes())?;
    let mut meta = sidecar("markcorr", settings);
    meta.insert("pattern".into(), pattern_summary(&pattern));
    meta.insert("pair_bandwidth".into(), json!(grid.bandwidth()));
    meta.insert(
        "curves".into(),
        Value::Array(
            curves
                .iter()
                .map(|c| {
                    json!({
                        "kind": c.kind.as_str(),
                        "flavor": c.meta.flavor.as_str(),
                        "valid_points": c.valid_count(),
                        "meta": c.meta,
                    })
                })
                .collect(),
        ),
    );
    meta.insert("intensity".into(), estimated.as_ref().map_or(Value::Null, |(f, _)| intensity_summary(f)));
    meta.insert("bandwidth_selection".into(), json!(estimated.as_ref().and_then(|(_, s)| s.as_ref())));
    write_json(&dir.join("curves.json"), &meta)?;
    println!("wrote {} curves to {}", curves.len(), dir.display());
    Ok(())
}

pub fn envelope(settings: &Settings) -> Result<()> {
    let pattern = load_pattern(settings)?;
    require_points(&pattern, 2)?;
    let tf = single_tf(settings)?;
    let flavor = single_flavor(settings)?;
    let recipe = CurveRecipe {
        edge: settings.edge,
        rgrid: Some(rgrid(settings, &pattern)?),
        intensity: intensity_spec(settings),
        ..CurveRecipe::normalized(tf.clone(), flavor)
    };
    let result = run_random_labelling_test(&pattern, &recipe, settings.perms, settings.alpha, settings.seed)?;
    let env = &result.envelope;
    let dir = output_dir(settings)?;
    write_atomic(&dir.join("envelope.csv"), envelope_csv(env).as_bytes())?;
    let mut verdict = sidecar("envelope", settings);
    verdict.insert("pattern".into(), pattern_summary(&pattern));
    verdict.insert("test_function".into(), json!(tf.id()));
    verdict.insert("flavor".into(), json!(flavor.as_str()));
    verdict.insert("p_lower".into(), json!(env.p_lower));
    verdict.insert("p_upper".into(), json!(env.p_upper));
    verdict.insert("alpha".into(), json!(env.alpha));
    verdict.insert("s".into(), json!(env.s));
    verdict.insert("seed".into(), json!(result.seed));
    verdict.insert("reject".into(), json!(env.reject));
    verdict.insert("boundary".into(), json!(env.boundary));
    verdict.insert("warning".into(), json!(env.warning));
    verdict.insert("above_upper".into(), json!(env.above_upper()));
    verdict.insert("below_lower".into(), json!(env.below_lower()));
    verdict.insert("meta".into(), json!(result.meta));
    verdict.insert("bandwidth_selection".into(), json!(result.bandwidth));
    write_json(&dir.join("envelope.json"), &verdict)?;
    println!(
        "p-interval [{}, {}] at alpha {}: {}",
        env.p_lower,
        env.p_upper,
        env.alpha,
        if env.reject { "reject" } else { "do not reject" }
    );
    Ok(())
}

pub fn power_study(settings: &Settings) -> Result<()> {
    if settings.rmax.is_some() || settings.pair_bandwidth.is_some() {
        log::warn!("power-study evaluates every pattern on its default r grid; rmax and pair_bandwidth are ignored");
    }
    let mut config =
        PowerStudyConfig::new(&settings.preset, settings.n_patterns, settings.perms, settings.alpha, settings.seed);
    config.tf = settings.tf.map(|_| single_tf(settings)).transpose()?;
    config.edge = settings.edge;
    config.intensity = intensity_spec(settings);
    let result = run_power_study(&config)?;
    let dir = output_dir(settings)?;
    let mut table = String::from("flavor,scenario,completed,rejections,failures,rate\n");
    for c in &result.cells {
        let rate = c.rate.map_or_else(|| "NaN".to_string(), |r| r.to_string());
        let _ = writeln!(
            table,
            "{},{},{},{},{},{}",
            c.flavor.as_str(),
            c.scenario.as_str(),
            c.completed,
            c.rejections,
            c.failures,
            rate
        );
    }
    write_atomic(&dir.join("power.csv"), table.as_bytes())?;
    let mut out = sidecar("power-study", settings);
    out.insert("result".into(), serde_json::to_value(&result)?);
    write_json(&dir.join("power.json"), &out)?;
    print!("{table}");
    Ok(())
}

fn square_grid(settings: &Settings, pattern: &MarkedPointPattern) -> Result<QuadratureGrid> {
    Ok(QuadratureGrid::new(*pattern.window(), settings.grid, settings.grid)?)
}

pub fn intensity(settings: &Settings) -> Result<()> {
    let pattern = load_pattern(settings)?;
    require_points(&pattern, 1)?;
    let grid = square_grid(settings, &pattern)?;
    let (field, selection) = match settings.estimator {
        Estimator::MassConserving => {
            let (h, sel) = resolve_bandwidth(settings, &pattern)?;
            (kernel_intensity_massconserving(&pattern, h, Some(&grid)), sel)
        }
        Estimator::Uniform => {
            let (h, sel) = resolve_bandwidth(settings, &pattern)?;
            (kernel_intensity_uniform(&pattern, h, Some(&grid)), sel)
        }
        Estimator::Voronoi => (
            voronoi_intensity(
                &pattern,
                settings.retention,
                settings.voronoi_replicates,
                voronoi_seed(settings),
                Some(&grid),
            )?,
            None,
        ),
    };
    let values: Vec<Option<f64>> =
        field.grid().expect("grid requested").values.iter().map(|&v| Some(v)).collect();
    let dir = output_dir(settings)?;
    write_atomic(&dir.join("intensity.csv"), grid_csv(&grid, &values)?.as_bytes())?;
    let mut meta = sidecar("intensity", settings);
    meta.insert("pattern".into(), pattern_summary(&pattern));
    meta.insert("grid".into(), json!({ "nx": grid.nx(), "ny": grid.ny() }));
    meta.insert("intensity".into(), intensity_summary(&field));
    meta.insert("bandwidth_selection".into(), json!(selection));
    write_json(&dir.join("intensity.json"), &meta)?;
    println!("wrote {}x{} intensity grid to {}", grid.nx(), grid.ny(), dir.display());
    Ok(())
}

pub fn marksurface(settings: &Settings) -> Result<()> {
    let pattern = load_pattern(settings)?;
    require_points(&pattern, 2)?;
    let grid = square_grid(settings, &pattern)?;
    let (h, selection) = resolve_bandwidth(settings, &pattern)?;
    let dir = output_dir(settings)?;
    let mut files = serde_json::Map::new();
    let mut missing = serde_json::Map::new();
    for stat in [MarkStatistic::Mean, MarkStatistic::Variance] {
        let surface = nadaraya_watson_mark_surface(&pattern, h, &grid, stat)?;
        let name = match stat {
            MarkStatistic::Mean => "mean",
            MarkStatistic::Variance => "variance",
        };
        let file = format!("marksurface_{name}.csv");
        write_atomic(&dir.join(&file), grid_csv(&grid, &surface.values)?.as_bytes())?;
        files.insert(name.into(), json!(file));
        missing.insert(name.into(), json!(surface.missing_count()));
    }
    let mut meta = sidecar("marksurface", settings);
    meta.insert("pattern".into(), pattern_summary(&pattern));
    meta.insert("grid".into(), json!({ "nx": grid.nx(), "ny": grid.ny() }));
    meta.insert("bandwidth".into(), json!(h));
    meta.insert("bandwidth_selection".into(), json!(selection));
    meta.insert("files".into(), Value::Object(files));
    meta.insert("missing_cells".into(), Value::Object(missing));
    write_json(&dir.join("marksurface.json"), &meta)?;
    println!("wrote mark mean and variance surfaces to {}", dir.display());
    Ok(())
}

/// Caps the global worker pool at `MARKCORR_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("MARKCORR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("MARKCORR_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        bail!("MARKCORR_THREADS must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the worker pool")?;
    Ok(())
}
