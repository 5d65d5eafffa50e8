use std::fmt;
use std::sync::Arc;

use super::estimators::{denominator_floor, meta, normalized_kind};
use super::{CurveKind, CurveMeta, Flavor, Form, PairTable, RGrid, SummaryCurve, TestFunction};
use crate::error::{Error, Result};
use crate::geometry::{EdgeCorrection, Point};
use crate::intensity::{
    default_bandwidth_candidates, kernel_intensity_massconserving, kernel_intensity_uniform, select_bandwidth_cvl_with,
    voronoi_intensity, BandwidthSelection, CvlObjective, IntensityField,
};
use crate::pattern::MarkedPointPattern;

#[derive(Debug, Clone, PartialEq)]
pub enum BandwidthChoice {
    Fixed(f64),
    /// Cronie–van Lieshout selection; `candidates: None` uses the default grid.
    CronieVanLieshout { candidates: Option<Vec<f64>>, objective: CvlObjective },
}

impl BandwidthChoice {
    /// Cronie–van Lieshout selection with the default grid and objective.
    pub fn cvl() -> Self {
        BandwidthChoice::CronieVanLieshout { candidates: None, objective: CvlObjective::default() }
    }
}

/// How the intensity of an inhomogeneous statistic is obtained.
#[derive(Clone)]
pub enum IntensitySpec {
    MassConservingKernel(BandwidthChoice),
    UniformKernel(BandwidthChoice),
    Voronoi { retention: f64, replicates: usize, seed: u64 },
    /// A known intensity function.
    Supplied(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

impl Default for IntensitySpec {
    fn default() -> Self {
        IntensitySpec::MassConservingKernel(BandwidthChoice::cvl())
    }
}

impl fmt::Debug for IntensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MassConservingKernel(b) => f.debug_tuple("MassConservingKernel").field(b).finish(),
            Self::UniformKernel(b) => f.debug_tuple("UniformKernel").field(b).finish(),
            Self::Voronoi { retention, replicates, seed } => f
                .debug_struct("Voronoi")
                .field("retention", retention)
                .field("replicates", replicates)
                .field("seed", seed)
                .finish(),
            Self::Supplied(_) => f.write_str("Supplied(..)"),
        }
    }
}

impl IntensitySpec {
    /// Estimates the field from the pattern's locations.
    pub fn estimate(&self, pattern: &MarkedPointPattern) -> Result<(IntensityField, Option<BandwidthSelection>)> {
        let resolve = |choice: &BandwidthChoice| -> Result<(f64, Option<BandwidthSelection>)> {
            match choice {
                BandwidthChoice::Fixed(h) if *h > 0.0 => Ok((*h, None)),
                BandwidthChoice::Fixed(h) => Err(Error::InvalidArgument(format!("bandwidth must be positive, got {h}"))),
                BandwidthChoice::CronieVanLieshout { candidates, objective } => {
                    let cands = candidates.clone().unwrap_or_else(|| default_bandwidth_candidates(pattern.window()));
                    let sel = select_bandwidth_cvl_with(pattern, &cands, *objective)?;
                    Ok((sel.bandwidth, Some(sel)))
                }
            }
        };
        match self {
            Self::MassConservingKernel(choice) => {
                let (h, sel) = resolve(choice)?;
                Ok((kernel_intensity_massconserving(pattern, h, None), sel))
            }
            Self::UniformKernel(choice) => {
                let (h, sel) = resolve(choice)?;
                Ok((kernel_intensity_uniform(pattern, h, None), sel))
            }
            Self::Voronoi { retention, replicates, seed } => {
                Ok((voronoi_intensity(pattern, *retention, *replicates, *seed, None)?, None))
            }
            Self::Supplied(f) => Ok((IntensityField::supplied(pattern, |u| f(u), None), None)),
        }
    }
}

/// Everything needed to turn a marked pattern into one summary curve.
#[derive(Debug, Clone)]
pub struct CurveRecipe {
    pub flavor: Flavor,
    pub tf: TestFunction,
    pub form: Form,
    pub normalize: bool,
    pub edge: EdgeCorrection,
    /// `None` uses [`RGrid::default_for`].
    pub rgrid: Option<RGrid>,
    /// Ignored for the homogeneous flavor.
    pub intensity: IntensitySpec,
}

impl CurveRecipe {
    /// Normalized pair-correlation-form statistic with default settings.
    pub fn normalized(tf: TestFunction, flavor: Flavor) -> Self {
        Self {
            flavor,
            tf,
            form: Form::Pcf,
            normalize: true,
            edge: EdgeCorrection::Translation,
            rgrid: None,
            intensity: IntensitySpec::default(),
        }
    }

    /// `κ_mm` (product test function).
    pub fn kappa_mm(flavor: Flavor) -> Self {
        Self::normalized(TestFunction::mm(), flavor)
    }

    /// `γ_mm` (mark variogram).
    pub fn gamma_mm(flavor: Flavor) -> Self {
        Self::normalized(TestFunction::vario(), flavor)
    }

    /// Estimates the intensity (once) and precomputes pair weights.
    pub fn prepare(&self, pattern: &MarkedPointPattern) -> Result<PreparedStatistic> {
        if pattern.len() < 2 {
            return Err(Error::InsufficientPoints { got: pattern.len(), need: 2 });
        }
        let (intensity, selection) = match self.flavor {
            Flavor::Homogeneous => (IntensityField::constant(pattern, None), None),
            Flavor::Inhomogeneous => self.intensity.estimate(pattern)?,
        };
        self.prepare_with(pattern, intensity, selection)
    }

    /// As [`prepare`](Self::prepare) with a given intensity field.
    pub fn prepare_with(
        &self,
        pattern: &MarkedPointPattern,
        intensity: IntensityField,
        selection: Option<BandwidthSelection>,
    ) -> Result<PreparedStatistic> {
        if pattern.len() < 2 {
            return Err(Error::InsufficientPoints { got: pattern.len(), need: 2 });
        }
        let rgrid = match &self.rgrid {
            Some(g) => g.clone(),
            None => RGrid::default_for(pattern)?,
        };
        let normalizer = if self.normalize { Some(self.tf.normalizer_value(pattern.marks())?) } else { None };
        let table = PairTable::new(pattern, intensity.at_points(), &rgrid, self.edge, self.form)?;
        let mut meta = meta(self.flavor, self.form, self.edge, Some(&self.tf), &intensity, &rgrid, normalizer);
        meta.flavor = self.flavor;
        let kind = match (self.normalize, self.form) {
            (true, _) => normalized_kind(&self.tf),
            (false, Form::Pcf) => CurveKind::CUnnorm,
            (false, Form::Cumulative) => CurveKind::KRatio,
        };
        Ok(PreparedStatistic {
            table,
            tf: self.tf.clone(),
            normalizer,
            floor: denominator_floor(pattern),
            kind,
            meta,
            intensity,
            selection,
        })
    }
}

/// A recipe bound to fixed locations: evaluating it for a new mark vector
/// only redoes the mark-dependent part of the pair sums.
#[derive(Debug, Clone)]
pub struct PreparedStatistic {
    table: PairTable,
    tf: TestFunction,
    normalizer: Option<f64>,
    floor: f64,
    kind: CurveKind,
    meta: CurveMeta,
    intensity: IntensityField,
    selection: Option<BandwidthSelection>,
}

impl PreparedStatistic {
    /// Curve values for `marks` (one per point, in pattern order). The
    /// normalizer is the one computed from the observed marks, which any
    /// permutation of them shares.
    pub fn evaluate(&self, marks: &[f64]) -> Vec<Option<f64>> {
        let ratio = self.table.ratio(&self.table.numerator_raw(marks, &self.tf), self.floor);
        match self.normalizer {
            Some(c) => ratio.into_iter().map(|v| v.map(|x| x / c)).collect(),
            None => ratio,
        }
    }

    pub fn curve(&self, marks: &[f64]) -> Result<SummaryCurve> {
        let values = self.evaluate(marks);
        if values.iter().all(Option::is_none) {
            return Err(Error::AllMissing);
        }
        Ok(SummaryCurve { rgrid: self.table.rgrid().clone(), values, kind: self.kind, meta: self.meta.clone() })
    }

    pub fn rgrid(&self) -> &RGrid {
        self.table.rgrid()
    }
    pub fn meta(&self) -> &CurveMeta {
        &self.meta
    }
    pub fn kind(&self) -> CurveKind {
        self.kind
    }
    pub fn intensity(&self) -> &IntensityField {
        &self.intensity
    }
    pub fn bandwidth_selection(&self) -> Option<&BandwidthSelection> {
        self.selection.as_ref()
    }
}
