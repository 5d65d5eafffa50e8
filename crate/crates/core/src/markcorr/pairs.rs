use std::f64::consts::PI;

use super::{Form, RGrid, TestFunction};
use crate::error::{Error, Result};
use crate::geometry::{distance, EdgeCorrection};
use crate::pattern::MarkedPointPattern;

/// One-dimensional Epanechnikov kernel with half-width `h`.
#[inline]
pub fn epanechnikov(t: f64, h: f64) -> f64 {
    let u = t / h;
    if u.abs() < 1.0 {
        0.75 * (1.0 - u * u) / h
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    pair: u32,
    k: u32,
    /// weight of the ordered pair (i, j)
    w_ij: f64,
    /// weight of the ordered pair (j, i)
    w_ji: f64,
}

/// Precomputed geometric weights of all point pairs that contribute to some
/// grid distance. Locations, intensity and edge weights are fixed; marks are
/// supplied per evaluation, so random-labelling permutations reuse one table.
///
/// Pairs at zero distance never contribute.
#[derive(Debug, Clone)]
pub struct PairTable {
    form: Form,
    rgrid: RGrid,
    n: usize,
    area: f64,
    pairs: Vec<(u32, u32)>,
    entries: Vec<Entry>,
    denominator: Vec<f64>,
}

impl PairTable {
    pub fn new(
        pattern: &MarkedPointPattern,
        lambda: &[f64],
        rgrid: &RGrid,
        edge: EdgeCorrection,
        form: Form,
    ) -> Result<Self> {
        let n = pattern.len();
        if lambda.len() != n {
            return Err(Error::InvalidArgument(format!("{} intensity values for {n} points", lambda.len())));
        }
        if let Some(v) = lambda.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("intensity at data points must be positive, got {v}")));
        }
        let window = pattern.window();
        let pts = pattern.points();
        let r = rgrid.values();
        let h = rgrid.bandwidth();
        let cutoff = match form {
            Form::Pcf => rgrid.rmax() + h,
            Form::Cumulative => rgrid.rmax(),
        };
        let mut pairs = Vec::new();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = distance(pts[i], pts[j]);
                if d == 0.0 || d > cutoff || (form == Form::Pcf && d == cutoff) {
                    continue;
                }
                let inv_ll = 1.0 / (lambda[i] * lambda[j]);
                let e_ij = edge.weight(window, pts[i], pts[j], d)? * inv_ll;
                let e_ji = edge.weight(window, pts[j], pts[i], d)? * inv_ll;
                let pair = pairs.len() as u32;
                match form {
                    Form::Pcf => {
                        let start = r.partition_point(|&rk| rk <= d - h);
                        for (k, &rk) in r.iter().enumerate().skip(start) {
                            if rk >= d + h {
                                break;
                            }
                            let kern = epanechnikov(d - rk, h);
                            if kern > 0.0 {
                                entries.push(Entry { pair, k: k as u32, w_ij: kern * e_ij, w_ji: kern * e_ji });
                            }
                        }
                    }
                    Form::Cumulative => {
                        let k = r.partition_point(|&rk| rk < d);
                        entries.push(Entry { pair, k: k as u32, w_ij: e_ij, w_ji: e_ji });
                    }
                }
                pairs.push((i as u32, j as u32));
            }
        }
        let mut table = Self {
            form,
            rgrid: rgrid.clone(),
            n,
            area: window.area(),
            pairs,
            entries,
            denominator: Vec::new(),
        };
        table.denominator = table.accumulate(|_| (1.0, 1.0));
        Ok(table)
    }

    pub fn form(&self) -> Form {
        self.form
    }
    pub fn rgrid(&self) -> &RGrid {
        &self.rgrid
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    fn accumulate<F>(&self, tf_pair: F) -> Vec<f64>
    where
        F: Fn(usize) -> (f64, f64),
    {
        let tf: Vec<(f64, f64)> = (0..self.pairs.len()).map(tf_pair).collect();
        let mut acc = vec![0.0; self.rgrid.len()];
        for e in &self.entries {
            let (t_ij, t_ji) = tf[e.pair as usize];
            if let Some(slot) = acc.get_mut(e.k as usize) {
                *slot += t_ij * e.w_ij + t_ji * e.w_ji;
            }
        }
        if self.form == Form::Cumulative {
            for k in 1..acc.len() {
                acc[k] += acc[k - 1];
            }
        }
        acc
    }

    /// Unscaled mark-weighted pair sums, one per grid distance.
    pub fn numerator_raw(&self, marks: &[f64], tf: &TestFunction) -> Vec<f64> {
        assert_eq!(marks.len(), self.n, "marks do not match the pattern");
        self.accumulate(|p| {
            let (i, j) = self.pairs[p];
            let (mi, mj) = (marks[i as usize], marks[j as usize]);
            (tf.eval(mi, mj), tf.eval(mj, mi))
        })
    }

    /// Unscaled unweighted pair sums (test function ≡ 1).
    pub fn denominator_raw(&self) -> &[f64] {
        &self.denominator
    }

    /// Factor turning a raw sum into an estimate: `1/(2πr|W|)` for the pair
    /// correlation form (`None` at `r = 0`), `1/|W|` for the cumulative form.
    pub fn scale(&self, k: usize) -> Option<f64> {
        let r = self.rgrid.values()[k];
        match self.form {
            Form::Pcf if r > 0.0 => Some(1.0 / (2.0 * PI * r * self.area)),
            Form::Pcf => None,
            Form::Cumulative => Some(1.0 / self.area),
        }
    }

    /// Scaled raw sums with missing entries at singular distances.
    pub fn scaled(&self, raw: &[f64]) -> Vec<Option<f64>> {
        raw.iter().enumerate().map(|(k, v)| self.scale(k).map(|s| v * s)).collect()
    }

    /// `numerator / denominator`, missing where the scaled denominator falls
    /// below `floor`.
    pub fn ratio(&self, numerator_raw: &[f64], floor: f64) -> Vec<Option<f64>> {
        numerator_raw
            .iter()
            .zip(&self.denominator)
            .enumerate()
            .map(|(k, (num, den))| match self.scale(k) {
                Some(s) if *den > 0.0 && den * s >= floor => Some(num / den),
                _ => None,
            })
            .collect()
    }
}
