//! Global rank envelope test with extreme-rank-length (ERL) ordering.
//!
//! Curve 0 of an ensemble is the observed statistic, curves `1..=s` come from
//! random-labelling permutations. Pointwise two-sided ranks count how many
//! curves lie strictly below / strictly above; the ERL vector of a curve is
//! its pointwise ranks sorted ascending, and lexicographically smaller
//! vectors are more extreme.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intensity::BandwidthSelection;
use crate::markcorr::{CurveMeta, CurveRecipe, PreparedStatistic};
use crate::pattern::{permute_marks, MarkedPointPattern};
use crate::rng;

/// Observed curve plus permutation curves on a shared grid. Grid points
/// missing in any curve are excluded for all curves.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveEnsemble {
    r: Vec<f64>,
    /// `curves[0]` is the data curve.
    curves: Vec<Vec<f64>>,
    valid: Vec<usize>,
}

impl CurveEnsemble {
    pub fn new(r: Vec<f64>, data: Vec<Option<f64>>, simulations: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let k = r.len();
        if data.len() != k || simulations.iter().any(|c| c.len() != k) {
            return Err(Error::CurveLengthMismatch);
        }
        let all: Vec<&Vec<Option<f64>>> = std::iter::once(&data).chain(simulations.iter()).collect();
        let valid: Vec<usize> = (0..k)
            .filter(|&j| all.iter().all(|c| matches!(c[j], Some(v) if v.is_finite())))
            .collect();
        let curves = all.iter().map(|c| c.iter().map(|v| v.unwrap_or(f64::NAN)).collect()).collect();
        Ok(Self { r, curves, valid })
    }

    /// Convenience constructor for complete curves.
    pub fn from_complete(r: Vec<f64>, data: Vec<f64>, simulations: Vec<Vec<f64>>) -> Result<Self> {
        let wrap = |c: Vec<f64>| c.into_iter().map(Some).collect::<Vec<_>>();
        Self::new(r, wrap(data), simulations.into_iter().map(wrap).collect())
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }
    /// Number of permutation curves.
    pub fn s(&self) -> usize {
        self.curves.len() - 1
    }
    pub fn curve(&self, i: usize) -> &[f64] {
        &self.curves[i]
    }
    /// Grid indices used for ranking.
    pub fn valid_indices(&self) -> &[usize] {
        &self.valid
    }
}

/// Two-sided pointwise ranks: `ranks[i][v]` for curve `i` at the `v`-th valid grid index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    pub ranks: Vec<Vec<usize>>,
}

/// `min(#below, #above)` per curve and valid grid point; ties share the
/// more extreme (smaller) rank.
pub fn pointwise_ranks(ensemble: &CurveEnsemble) -> RankTable {
    let n = ensemble.curves.len();
    let mut ranks = vec![Vec::with_capacity(ensemble.valid.len()); n];
    let mut column: Vec<f64> = Vec::with_capacity(n);
    for &j in &ensemble.valid {
        column.clear();
        column.extend(ensemble.curves.iter().map(|c| c[j]));
        let mut sorted = column.clone();
        sorted.sort_by(f64::total_cmp);
        for (i, &v) in column.iter().enumerate() {
            let below = sorted.partition_point(|&x| x < v);
            let above = n - sorted.partition_point(|&x| x <= v);
            ranks[i].push(below.min(above));
        }
    }
    RankTable { ranks }
}

/// ERL vectors; `compare(a, b) == Less` means curve `a` is more extreme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErlOrder {
    pub vectors: Vec<Vec<usize>>,
}

impl ErlOrder {
    pub fn compare(&self, a: usize, b: usize) -> Ordering {
        self.vectors[a].cmp(&self.vectors[b])
    }

    /// Curve indices from most to least extreme; ties keep index order.
    pub fn sorted(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.vectors.len()).collect();
        idx.sort_by(|&a, &b| self.compare(a, b));
        idx
    }
}

pub fn erl_order(ranks: &RankTable) -> ErlOrder {
    let vectors = ranks
        .ranks
        .iter()
        .map(|r| {
            let mut v = r.clone();
            v.sort_unstable();
            v
        })
        .collect();
    ErlOrder { vectors }
}

/// Envelope, central curve and p-value interval of a rank envelope test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeResult {
    pub r: Vec<f64>,
    pub data: Vec<Option<f64>>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
    pub central: Vec<Option<f64>>,
    pub p_lower: f64,
    pub p_upper: f64,
    pub alpha: f64,
    pub s: usize,
    /// `p_upper < alpha`.
    pub reject: bool,
    /// Ties straddle the level: `p_lower < alpha <= p_upper`.
    pub boundary: bool,
    pub warning: Option<String>,
}

impl EnvelopeResult {
    /// Grid indices where the data curve lies strictly above the envelope.
    pub fn above_upper(&self) -> Vec<usize> {
        self.exits(|d, _, hi| d > hi)
    }

    /// Grid indices where the data curve lies strictly below the envelope.
    pub fn below_lower(&self) -> Vec<usize> {
        self.exits(|d, lo, _| d < lo)
    }

    fn exits(&self, f: impl Fn(f64, f64, f64) -> bool) -> Vec<usize> {
        (0..self.r.len())
            .filter(|&j| match (self.data[j], self.lower[j], self.upper[j]) {
                (Some(d), Some(lo), Some(hi)) => f(d, lo, hi),
                _ => false,
            })
            .collect()
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn rank_envelope_test(ensemble: &CurveEnsemble, alpha: f64) -> Result<EnvelopeResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let s = ensemble.s();
    if s < 1 {
        return Err(Error::InvalidArgument("need at least one permutation curve".into()));
    }
    if ensemble.valid.is_empty() {
        return Err(Error::AllMissing);
    }
    let total = s + 1;
    let order = erl_order(&pointwise_ranks(ensemble));
    let at_least = (0..total).filter(|&i| order.compare(i, 0) != Ordering::Greater).count();
    let strictly = (0..total).filter(|&i| order.compare(i, 0) == Ordering::Less).count();
    let p_upper = at_least as f64 / total as f64;
    let p_lower = strictly as f64 / total as f64;

    let excluded = (alpha * total as f64).floor() as usize;
    let warning = if excluded == 0 {
        let msg = format!("alpha * (s + 1) = {} < 1: too few permutations for level {alpha}", alpha * total as f64);
        log::warn!("{msg}");
        Some(msg)
    } else {
        None
    };
    let sorted = order.sorted();
    let critical = sorted[excluded.min(total - 1)];
    let kept: Vec<usize> = (0..total).filter(|&i| order.compare(i, critical) != Ordering::Less).collect();

    let k = ensemble.r.len();
    let mut lower = vec![None; k];
    let mut upper = vec![None; k];
    let mut central = vec![None; k];
    let mut data = vec![None; k];
    let mut buf = Vec::with_capacity(s);
    for &j in &ensemble.valid {
        let (lo, hi) = kept.iter().map(|&i| ensemble.curves[i][j]).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
        lower[j] = Some(lo);
        upper[j] = Some(hi);
        buf.clear();
        buf.extend(ensemble.curves[1..].iter().map(|c| c[j]));
        central[j] = Some(median(&mut buf).clamp(lo, hi));
        data[j] = Some(ensemble.curves[0][j]);
    }
    let reject = p_upper < alpha;
    Ok(EnvelopeResult {
        r: ensemble.r.clone(),
        data,
        lower,
        upper,
        central,
        p_lower,
        p_upper,
        alpha,
        s,
        reject,
        boundary: !reject && p_lower < alpha,
        warning,
    })
}

/// Outcome of a random-labelling test on a pattern.
#[derive(Debug, Clone)]
pub struct RandomLabellingResult {
    pub envelope: EnvelopeResult,
    pub meta: CurveMeta,
    pub seed: u64,
    pub bandwidth: Option<BandwidthSelection>,
}

/// Seed of permutation `i` (1-based) under run seed `seed`.
pub fn permutation_seed(seed: u64, i: usize) -> u64 {
    rng::derive_seed(seed, rng::tag::PERMUTATION, i as u64)
}

/// Random-labelling global envelope test. The intensity is estimated once
/// from the locations and reused for every permutation.
pub fn run_random_labelling_test(
    pattern: &MarkedPointPattern,
    recipe: &CurveRecipe,
    s: usize,
    alpha: f64,
    seed: u64,
) -> Result<RandomLabellingResult> {
    if s < 1 {
        return Err(Error::InvalidArgument("need at least one permutation".into()));
    }
    let prepared = recipe.prepare(pattern)?;
    run_prepared_test(pattern, &prepared, s, alpha, seed)
}

/// Random-labelling test for a statistic already bound to the pattern's
/// locations.
pub fn run_prepared_test(
    pattern: &MarkedPointPattern,
    prepared: &PreparedStatistic,
    s: usize,
    alpha: f64,
    seed: u64,
) -> Result<RandomLabellingResult> {
    if s < 1 {
        return Err(Error::InvalidArgument("need at least one permutation".into()));
    }
    let data = prepared.evaluate(pattern.marks());
    let sims: Vec<Vec<Option<f64>>> = (1..=s)
        .into_par_iter()
        .map(|i| prepared.evaluate(permute_marks(pattern, permutation_seed(seed, i)).marks()))
        .collect();
    let ensemble = CurveEnsemble::new(prepared.rgrid().values().to_vec(), data, sims)?;
    let envelope = rank_envelope_test(&ensemble, alpha)?;
    Ok(RandomLabellingResult {
        envelope,
        meta: prepared.meta().clone(),
        seed,
        bandwidth: prepared.bandwidth_selection().cloned(),
    })
}
