//! Monte-Carlo power study: simulate patterns from a scenario, run the
//! random-labelling test for both flavors under the scenario's mark rule
//! and under independent uniform marks, and tabulate rejection rates.

use serde::Serialize;

use crate::envelope::run_prepared_test;
use crate::error::{Error, Result};
use crate::geometry::EdgeCorrection;
use crate::markcorr::{CurveRecipe, Flavor, IntensitySpec, RGrid, TestFunction};
use crate::pattern::MarkedPointPattern;
use crate::rng::{self, tag};
use crate::simulate::{assign_marks, scenario_preset, MarkRule, ScenarioSimulator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkScenario {
    /// The scenario's own mark rule.
    Alternative,
    /// i.i.d. `U(0, 1)` marks on the same locations.
    Null,
}

impl MarkScenario {
    pub fn as_str(self) -> &'static str {
        match self {
            MarkScenario::Alternative => "alternative",
            MarkScenario::Null => "null",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerStudyConfig {
    pub preset: String,
    pub n_patterns: usize,
    pub s: usize,
    pub alpha: f64,
    pub seed: u64,
    /// `None` picks `mm` for association presets and `vario` otherwise.
    pub tf: Option<TestFunction>,
    pub edge: EdgeCorrection,
    pub rgrid: Option<RGrid>,
    pub intensity: IntensitySpec,
}

impl PowerStudyConfig {
    pub fn new(preset: &str, n_patterns: usize, s: usize, alpha: f64, seed: u64) -> Self {
        Self {
            preset: preset.to_string(),
            n_patterns,
            s,
            alpha,
            seed,
            tf: None,
            edge: EdgeCorrection::Translation,
            rgrid: None,
            intensity: IntensitySpec::default(),
        }
    }

    fn test_function(&self) -> TestFunction {
        self.tf.clone().unwrap_or_else(|| {
            if self.preset.starts_with("assoc") {
                TestFunction::mm()
            } else {
                TestFunction::vario()
            }
        })
    }
}

/// Outcome of one test on one pattern.
#[derive(Debug, Clone, Serialize)]
pub struct TestOutcome {
    pub pattern: usize,
    pub flavor: Flavor,
    pub scenario: MarkScenario,
    pub n_points: usize,
    pub p_upper: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateCell {
    pub flavor: Flavor,
    pub scenario: MarkScenario,
    pub completed: usize,
    pub rejections: usize,
    pub failures: usize,
    /// `rejections / completed`; `None` when nothing completed.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerStudyResult {
    pub preset: String,
    pub test_function: String,
    pub n_patterns: usize,
    pub s: usize,
    pub alpha: f64,
    pub seed: u64,
    pub cells: Vec<RateCell>,
    pub outcomes: Vec<TestOutcome>,
    pub failures: Vec<String>,
}

impl PowerStudyResult {
    pub fn rate(&self, flavor: Flavor, scenario: MarkScenario) -> Option<f64> {
        self.cells.iter().find(|c| c.flavor == flavor && c.scenario == scenario).and_then(|c| c.rate)
    }
}

const FLAVORS: [Flavor; 2] = [Flavor::Inhomogeneous, Flavor::Homogeneous];
const SCENARIOS: [MarkScenario; 2] = [MarkScenario::Alternative, MarkScenario::Null];

/// Seed of simulated pattern `i` under run seed `seed`.
pub fn pattern_seed(seed: u64, i: usize) -> u64 {
    rng::derive_seed(seed, tag::REPLICATE, i as u64)
}

/// Alternative- and null-marked versions of pattern `i`.
pub fn study_patterns(sim: &ScenarioSimulator, seed: u64, i: usize) -> Result<(MarkedPointPattern, MarkedPointPattern)> {
    let ps = pattern_seed(seed, i);
    let ground = sim.ground(ps)?;
    let alt = assign_marks(&ground, sim.spec().marks, ps);
    let null = assign_marks(&ground, MarkRule::IidUniform, rng::derive_seed(seed, tag::NULL_MARKS, i as u64));
    Ok((alt, null))
}

pub fn run_power_study(config: &PowerStudyConfig) -> Result<PowerStudyResult> {
    if config.n_patterns == 0 || config.s == 0 {
        return Err(Error::InvalidArgument("need at least one pattern and one permutation".into()));
    }
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", config.alpha)));
    }
    let sim = ScenarioSimulator::new(scenario_preset(&config.preset)?)?;
    let tf = config.test_function();
    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    let mut failed = vec![0usize; FLAVORS.len() * SCENARIOS.len()];
    for i in 0..config.n_patterns {
        let (alt, null) = match study_patterns(&sim, config.seed, i) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("pattern {i}: simulation failed: {e}");
                failures.push(format!("pattern {i}: {e}"));
                failed.iter_mut().for_each(|f| *f += 1);
                continue;
            }
        };
        let ps = pattern_seed(config.seed, i);
        for (fi, &flavor) in FLAVORS.iter().enumerate() {
            let recipe = CurveRecipe {
                edge: config.edge,
                rgrid: config.rgrid.clone(),
                intensity: config.intensity.clone(),
                ..CurveRecipe::normalized(tf.clone(), flavor)
            };
            let prepared_alt = recipe.prepare(&alt);
            for (si, &scenario) in SCENARIOS.iter().enumerate() {
                let (pattern, perm_seed) = match scenario {
                    MarkScenario::Alternative => (&alt, ps),
                    MarkScenario::Null => (&null, rng::derive_seed(ps, tag::NULL_MARKS, 0)),
                };
                let run = match &prepared_alt {
                    Err(e) => Err(Error::InvalidArgument(e.to_string())),
                    Ok(pa) if scenario == MarkScenario::Alternative => {
                        run_prepared_test(pattern, pa, config.s, config.alpha, perm_seed)
                    }
                    Ok(pa) => recipe
                        .prepare_with(pattern, pa.intensity().clone(), pa.bandwidth_selection().cloned())
                        .and_then(|p| run_prepared_test(pattern, &p, config.s, config.alpha, perm_seed)),
                };
                match run {
                    Ok(r) => outcomes.push(TestOutcome {
                        pattern: i,
                        flavor,
                        scenario,
                        n_points: pattern.len(),
                        p_upper: r.envelope.p_upper,
                        reject: r.envelope.reject,
                    }),
                    Err(e) => {
                        log::warn!("pattern {i} ({} {}): {e}", flavor.as_str(), scenario.as_str());
                        failures.push(format!("pattern {i} {} {}: {e}", flavor.as_str(), scenario.as_str()));
                        failed[fi * SCENARIOS.len() + si] += 1;
                    }
                }
            }
        }
        log::info!("power study: pattern {}/{} done ({} points)", i + 1, config.n_patterns, alt.len());
    }
    let mut cells = Vec::new();
    for (fi, &flavor) in FLAVORS.iter().enumerate() {
        for (si, &scenario) in SCENARIOS.iter().enumerate() {
            let done: Vec<&TestOutcome> =
                outcomes.iter().filter(|o| o.flavor == flavor && o.scenario == scenario).collect();
            let rejections = done.iter().filter(|o| o.reject).count();
            cells.push(RateCell {
                flavor,
                scenario,
                completed: done.len(),
                rejections,
                failures: failed[fi * SCENARIOS.len() + si],
                rate: (!done.is_empty()).then(|| rejections as f64 / done.len() as f64),
            });
        }
    }
    Ok(PowerStudyResult {
        preset: config.preset.clone(),
        test_function: tf.id().to_string(),
        n_patterns: config.n_patterns,
        s: config.s,
        alpha: config.alpha,
        seed: config.seed,
        cells,
        outcomes,
        failures,
    })
}
