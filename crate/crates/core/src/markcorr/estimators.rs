use super::{CurveKind, CurveMeta, Flavor, Form, Normalizer, PairTable, RGrid, SummaryCurve, TestFunction};
use crate::error::{Error, Result};
use crate::geometry::EdgeCorrection;
use crate::intensity::{EstimatorKind, IntensityField};
use crate::pattern::MarkedPointPattern;

/// Relative stability floor for denominators, times `(N/|W|)²`.
pub const DENOMINATOR_FLOOR_RELATIVE: f64 = 1e-12;

pub(crate) fn denominator_floor(pattern: &MarkedPointPattern) -> f64 {
    DENOMINATOR_FLOOR_RELATIVE * pattern.mean_intensity().powi(2)
}

fn require_pairs(pattern: &MarkedPointPattern) -> Result<()> {
    if pattern.len() < 2 {
        return Err(Error::InsufficientPoints { got: pattern.len(), need: 2 });
    }
    Ok(())
}

pub(crate) fn meta(
    flavor: Flavor,
    form: Form,
    edge: EdgeCorrection,
    tf: Option<&TestFunction>,
    lambda: &IntensityField,
    rgrid: &RGrid,
    normalizer: Option<f64>,
) -> CurveMeta {
    CurveMeta {
        flavor,
        form,
        edge,
        test_function: tf.map(|t| t.id().to_string()),
        intensity: lambda.kind().as_str().to_string(),
        intensity_bandwidth: lambda.bandwidth(),
        pair_bandwidth: rgrid.bandwidth(),
        normalizer,
    }
}

fn flavor_of(lambda: &IntensityField) -> Flavor {
    if lambda.kind() == EstimatorKind::Constant {
        Flavor::Homogeneous
    } else {
        Flavor::Inhomogeneous
    }
}

/// Kind label for a normalized curve.
pub(crate) fn normalized_kind(tf: &TestFunction) -> CurveKind {
    if tf.normalizer() == Normalizer::Variance {
        CurveKind::Gamma
    } else {
        CurveKind::Kappa
    }
}

/// Mark-weighted pair sum `(1/(2πr|W|)) Σ tf · K(d − r) · e / (λλ)`.
pub fn pairsum_numerator(
    pattern: &MarkedPointPattern,
    tf: &TestFunction,
    lambda: &IntensityField,
    rgrid: &RGrid,
    edge: EdgeCorrection,
) -> Result<SummaryCurve> {
    require_pairs(pattern)?;
    let table = PairTable::new(pattern, lambda.at_points(), rgrid, edge, Form::Pcf)?;
    let values = table.scaled(&table.numerator_raw(pattern.marks(), tf));
    Ok(SummaryCurve {
        rgrid: rgrid.clone(),
        values,
        kind: CurveKind::Numerator,
        meta: meta(flavor_of(lambda), Form::Pcf, edge, Some(tf), lambda, rgrid, None),
    })
}

/// Intensity-reweighted pair sum with `tf ≡ 1`; estimates the pair
/// correlation function of the ground process.
pub fn pairsum_denominator(
    pattern: &MarkedPointPattern,
    lambda: &IntensityField,
    rgrid: &RGrid,
    edge: EdgeCorrection,
) -> Result<SummaryCurve> {
    require_pairs(pattern)?;
    let table = PairTable::new(pattern, lambda.at_points(), rgrid, edge, Form::Pcf)?;
    Ok(SummaryCurve {
        rgrid: rgrid.clone(),
        values: table.scaled(table.denominator_raw()),
        kind: CurveKind::Denominator,
        meta: meta(flavor_of(lambda), Form::Pcf, edge, None, lambda, rgrid, None),
    })
}

/// The denominator sum labelled as a pair correlation function.
pub fn pcf_inhom(
    pattern: &MarkedPointPattern,
    lambda: &IntensityField,
    rgrid: &RGrid,
    edge: EdgeCorrection,
) -> Result<SummaryCurve> {
    let mut curve = pairsum_denominator(pattern, lambda, rgrid, edge)?;
    curve.kind = CurveKind::Pcf;
    Ok(curve)
}

/// General entry point: unnormalized or normalized mark correlation in
/// either form, for any intensity field.
pub fn mark_correlation(
    pattern: &MarkedPointPattern,
    tf: &TestFunction,
    lambda: &IntensityField,
    rgrid: &RGrid,
    edge: EdgeCorrection,
    form: Form,
    normalize: bool,
) -> Result<SummaryCurve> {
    require_pairs(pattern)?;
    let normalizer = if normalize { Some(tf.normalizer_value(pattern.marks())?) } else { None };
    let table = PairTable::new(pattern, lambda.at_points(), rgrid, edge, form)?;
    let ratio = table.ratio(&table.numerator_raw(pattern.marks(), tf), denominator_floor(pattern));
    if ratio.iter().all(Option::is_none) {
        return Err(Error::AllMissing);
    }
    let values = match normalizer {
        Some(c) => ratio.into_iter().map(|v| v.map(|x| x / c)).collect(),
        None => ratio,
    };
    let kind = match (normalize, form) {
        (true, _) => normalized_kind(tf),
        (false, Form::Pcf) => CurveKind::CUnnorm,
        (false, Form::Cumulative) => CurveKind::KRatio,
    };
    Ok(SummaryCurve {
        rgrid: rgrid.clone(),
        values,
        kind,
        meta: meta(flavor_of(lambda), form, edge, Some(tf), lambda, rgrid, normalizer),
    })
}

/// Ratio-unbiased unnormalized inhomogeneous mark correlation.
pub fn c_inhom(
    pattern: &MarkedPointPattern,
    tf: &TestFunction,
    lambda: &IntensityField,
    rgrid: &RGrid,
    edge: EdgeCorrection,
) -> Result<SummaryCurve> {
    mark_correlation(pattern, tf, lambda, rgrid, edge, Form::Pcf, false)
}

/// [`c_inhom`] divided by the empirical normalizer of the test function.
pub fn kappa_inhom(
    pattern: &MarkedPointPattern,
    tf: &TestFunction,
    lambda: &IntensityField,
    rgrid: &RGrid,
    edge: EdgeCorrection,
) -> Result<SummaryCurve> {
    mark_correlation(pattern, tf, lambda, rgrid, edge, Form::Pcf, true)
}

/// Homogeneous mark correlation: [`c_inhom`] with the constant field `N/|W|`.
pub fn c_homogeneous(
    pattern: &MarkedPointPattern,
    tf: &TestFunction,
    rgrid: &RGrid,
    edge: EdgeCorrection,
) -> Result<SummaryCurve> {
    c_inhom(pattern, tf, &IntensityField::constant(pattern, None), rgrid, edge)
}

pub fn kappa_homogeneous(
    pattern: &MarkedPointPattern,
    tf: &TestFunction,
    rgrid: &RGrid,
    edge: EdgeCorrection,
) -> Result<SummaryCurve> {
    kappa_inhom(pattern, tf, &IntensityField::constant(pattern, None), rgrid, edge)
}

/// Cumulative form `K_tf(r) / K(r)` with indicator `d ≤ r`.
pub fn k_ratio_inhom(
    pattern: &MarkedPointPattern,
    tf: &TestFunction,
    lambda: &IntensityField,
    rgrid: &RGrid,
    edge: EdgeCorrection,
) -> Result<SummaryCurve> {
    mark_correlation(pattern, tf, lambda, rgrid, edge, Form::Cumulative, false)
}
