//! Reference implementations used as oracles by the integration tests.
//! Nothing here calls into the library's estimators; only the data types
//! are shared.

#![allow(dead_code)]

use std::f64::consts::PI;

use markcorr::geometry::{Point, Window};
use markcorr::pattern::MarkedPointPattern;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleEdge {
    Translation,
    Ripley,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleTf {
    Product,
    HalfSquaredDifference,
    One,
}

impl OracleTf {
    pub fn eval(self, a: f64, b: f64) -> f64 {
        match self {
            OracleTf::Product => a * b,
            OracleTf::HalfSquaredDifference => 0.5 * (a - b) * (a - b),
            OracleTf::One => 1.0,
        }
    }
}

fn translation_weight(w: &Window, p: Point, q: Point) -> f64 {
    let ox = w.width() - (p.x - q.x).abs();
    let oy = w.height() - (p.y - q.y).abs();
    w.area() / (ox * oy)
}

/// Intersection of two sorted lists of disjoint closed intervals.
fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// Fraction of the circle of radius `r` around `p` inside `w`, as the
/// measure of the set of angles satisfying all four half-plane constraints.
pub fn circle_fraction_inside(w: &Window, p: Point, r: f64) -> f64 {
    let tau = 2.0 * PI;
    let full = vec![(0.0, tau)];
    // cos t >= a
    let cos_ge = |a: f64| -> Vec<(f64, f64)> {
        if a <= -1.0 {
            full.clone()
        } else if a >= 1.0 {
            vec![]
        } else {
            let c = a.acos();
            vec![(0.0, c), (tau - c, tau)]
        }
    };
    // cos t <= b
    let cos_le = |b: f64| -> Vec<(f64, f64)> {
        if b >= 1.0 {
            full.clone()
        } else if b <= -1.0 {
            vec![]
        } else {
            let c = b.acos();
            vec![(c, tau - c)]
        }
    };
    // sin t >= c, with c <= 0
    let sin_ge = |c: f64| -> Vec<(f64, f64)> {
        if c <= -1.0 {
            full.clone()
        } else {
            let s = (-c).asin();
            vec![(0.0, PI + s), (tau - s, tau)]
        }
    };
    // sin t <= d, with d >= 0
    let sin_le = |d: f64| -> Vec<(f64, f64)> {
        if d >= 1.0 {
            full.clone()
        } else {
            let s = d.asin();
            vec![(0.0, s), (PI - s, tau)]
        }
    };
    let mut set = full.clone();
    set = intersect(&set, &cos_ge((w.xmin() - p.x) / r));
    set = intersect(&set, &cos_le((w.xmax() - p.x) / r));
    set = intersect(&set, &sin_ge((w.ymin() - p.y) / r));
    set = intersect(&set, &sin_le((w.ymax() - p.y) / r));
    set.iter().map(|(a, b)| b - a).sum::<f64>() / tau
}

fn ripley_weight(w: &Window, p: Point, r: f64) -> f64 {
    1.0 / circle_fraction_inside(w, p, r).max(1e-6)
}

fn edge_weight(edge: OracleEdge, w: &Window, p: Point, q: Point) -> f64 {
    match edge {
        OracleEdge::Translation => translation_weight(w, p, q),
        OracleEdge::Ripley => ripley_weight(w, p, ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt()),
    }
}

fn epan(t: f64, h: f64) -> f64 {
    if t.abs() < h {
        0.75 * (1.0 - (t / h).powi(2)) / h
    } else {
        0.0
    }
}

/// Scaled pair sum at one distance: the smoothed form when `cumulative` is
/// false, the indicator form otherwise. Returns `None` at `r = 0` in the
/// smoothed form.
#[allow(clippy::too_many_arguments)]
pub fn pair_sum(
    x: &MarkedPointPattern,
    lambda: &[f64],
    tf: OracleTf,
    edge: OracleEdge,
    r: f64,
    h: f64,
    cumulative: bool,
) -> Option<f64> {
    let w = x.window();
    let (pts, m) = (x.points(), x.marks());
    let mut total = 0.0;
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i == j {
                continue;
            }
            let d = ((pts[i].x - pts[j].x).powi(2) + (pts[i].y - pts[j].y).powi(2)).sqrt();
            if d == 0.0 {
                continue;
            }
            let k = if cumulative {
                if d <= r {
                    1.0
                } else {
                    0.0
                }
            } else {
                epan(d - r, h)
            };
            if k == 0.0 {
                continue;
            }
            total += tf.eval(m[i], m[j]) * k * edge_weight(edge, w, pts[i], pts[j]) / (lambda[i] * lambda[j]);
        }
    }
    if cumulative {
        Some(total / w.area())
    } else if r > 0.0 {
        Some(total / (2.0 * PI * r * w.area()))
    } else {
        None
    }
}

pub fn sample_mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance with divisor `n − 1`.
pub fn sample_variance(v: &[f64]) -> f64 {
    let mu = sample_mean(v);
    v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

/// Ratio curve from the brute-force sums, `None` where the scaled
/// denominator is below `1e-12 (N/|W|)²`, then divided by `normalizer`.
#[allow(clippy::too_many_arguments)]
pub fn ratio_curve(
    x: &MarkedPointPattern,
    lambda: &[f64],
    tf: OracleTf,
    edge: OracleEdge,
    r: &[f64],
    h: f64,
    cumulative: bool,
    normalizer: f64,
) -> Vec<Option<f64>> {
    let floor = 1e-12 * (x.len() as f64 / x.window().area()).powi(2);
    r.iter()
        .map(|&rk| {
            let num = pair_sum(x, lambda, tf, edge, rk, h, cumulative)?;
            let den = pair_sum(x, lambda, OracleTf::One, edge, rk, h, cumulative)?;
            (den > 0.0 && den >= floor).then(|| num / den / normalizer)
        })
        .collect()
}

/// Relative agreement of two optional curves; missing entries must match.
pub fn max_relative_error(a: &[Option<f64>], b: &[Option<f64>]) -> Result<f64, String> {
    if a.len() != b.len() {
        return Err(format!("length {} vs {}", a.len(), b.len()));
    }
    let mut worst: f64 = 0.0;
    for (k, (u, v)) in a.iter().zip(b).enumerate() {
        match (u, v) {
            (None, None) => {}
            (Some(u), Some(v)) => {
                let scale = u.abs().max(v.abs());
                if scale > 0.0 {
                    worst = worst.max((u - v).abs() / scale);
                }
            }
            _ => return Err(format!("missing-flag mismatch at index {k}: {u:?} vs {v:?}")),
        }
    }
    Ok(worst)
}

/// Random window with sides in [0.5, 3] and a random pattern of `n` points
/// in it, including one exact duplicate location when `n ≥ 4`.
pub fn random_pattern(rng: &mut ChaCha8Rng, n: usize) -> MarkedPointPattern {
    let (x0, y0) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let (lx, ly) = (rng.random_range(0.5..3.0), rng.random_range(0.5..3.0));
    let w = Window::new(x0, x0 + lx, y0, y0 + ly).unwrap();
    let mut pts: Vec<Point> =
        (0..n).map(|_| Point::new(x0 + lx * rng.random::<f64>(), y0 + ly * rng.random::<f64>())).collect();
    if n >= 4 {
        pts[n - 1] = pts[0];
    }
    let marks = (0..n).map(|_| rng.random_range(0.5..5.0)).collect();
    MarkedPointPattern::new(w, pts, marks).unwrap()
}

/// Homogeneous Poisson pattern on `w` with unit marks.
pub fn poisson_pattern(rng: &mut ChaCha8Rng, w: Window, intensity: f64) -> MarkedPointPattern {
    use rand_distr::{Distribution, Poisson};
    let n = Poisson::new(intensity * w.area()).unwrap().sample(rng) as usize;
    let pts = (0..n)
        .map(|_| Point::new(w.xmin() + w.width() * rng.random::<f64>(), w.ymin() + w.height() * rng.random::<f64>()))
        .collect();
    MarkedPointPattern::new(w, pts, vec![1.0; n]).unwrap()
}
