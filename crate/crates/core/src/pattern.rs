//! Marked point patterns: data model, mark moments, CSV I/O and random
//! labelling.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Window};
use crate::rng;

/// Points with one real-valued mark each, observed in a rectangular window.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPointPattern {
    window: Window,
    points: Vec<Point>,
    marks: Vec<f64>,
}

impl MarkedPointPattern {
    pub fn new(window: Window, points: Vec<Point>, marks: Vec<f64>) -> Result<Self> {
        if points.len() != marks.len() {
            return Err(Error::InvalidArgument(format!(
                "{} points but {} marks",
                points.len(),
                marks.len()
            )));
        }
        let outside: Vec<usize> = points
            .iter()
            .enumerate()
            .filter(|(_, p)| !window.contains(**p))
            .map(|(i, _)| i)
            .collect();
        if !outside.is_empty() {
            return Err(Error::OutOfWindow { rows: outside });
        }
        if let Some(i) = marks.iter().position(|m| !m.is_finite()) {
            return Err(Error::NonFinite { row: i });
        }
        Ok(Self { window, points, marks })
    }

    /// Pattern with all marks set to zero.
    pub fn unmarked(window: Window, points: Vec<Point>) -> Result<Self> {
        let n = points.len();
        Self::new(window, points, vec![0.0; n])
    }

    pub fn window(&self) -> &Window {
        &self.window
    }
    pub fn points(&self) -> &[Point] {
        &self.points
    }
    pub fn marks(&self) -> &[f64] {
        &self.marks
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Average intensity `N / |W|`.
    pub fn mean_intensity(&self) -> f64 {
        self.len() as f64 / self.window.area()
    }

    /// Same locations, new marks.
    pub fn with_marks(&self, marks: Vec<f64>) -> Result<Self> {
        Self::new(self.window, self.points.clone(), marks)
    }

    /// Number of points sharing their location with an earlier point.
    pub fn duplicate_count(&self) -> usize {
        let mut seen = HashSet::with_capacity(self.len());
        self.points
            .iter()
            .filter(|p| !seen.insert((p.x.to_bits(), p.y.to_bits())))
            .count()
    }

    /// Reorders points (and their marks) by `order`, which must be a permutation of `0..N`.
    pub fn reindexed(&self, order: &[usize]) -> Result<Self> {
        let points = order.iter().map(|&i| self.points[i]).collect();
        let marks = order.iter().map(|&i| self.marks[i]).collect();
        Self::new(self.window, points, marks)
    }
}

/// Sample mean and variance (divisor `N − 1`) of the marks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkSummary {
    pub mean: f64,
    pub variance: f64,
}

pub fn mark_summary(pattern: &MarkedPointPattern) -> Result<MarkSummary> {
    summarize_marks(pattern.marks())
}

pub fn summarize_marks(marks: &[f64]) -> Result<MarkSummary> {
    let n = marks.len();
    if n < 2 {
        return Err(Error::InsufficientPoints { got: n, need: 2 });
    }
    if marks.iter().all(|&m| m == marks[0]) {
        return Ok(MarkSummary { mean: marks[0], variance: 0.0 });
    }
    let mean = marks.iter().sum::<f64>() / n as f64;
    let variance = marks.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(MarkSummary { mean, variance })
}

/// Random labelling: the same locations carrying a uniformly random
/// permutation of the marks. Deterministic in `seed`.
pub fn permute_marks(pattern: &MarkedPointPattern, seed: u64) -> MarkedPointPattern {
    let mut marks = pattern.marks.clone();
    marks.shuffle(&mut rng::rng_from_seed(seed));
    MarkedPointPattern { window: pattern.window, points: pattern.points.clone(), marks }
}

fn parse_field(raw: &str, row: usize, name: &str) -> Result<f64> {
    raw.trim().parse::<f64>().map_err(|e| Error::Parse {
        row,
        message: format!("column {name}: {e} ({raw:?})"),
    })
}

/// Reads the `x,y,mark` CSV schema. Lines starting with `#` are ignored.
/// Row numbers in errors are 1-based file line numbers.
pub fn read_pattern_from<R: Read>(reader: R, window: Window) -> Result<MarkedPointPattern> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    check_header(rdr.headers()?)?;
    let mut points = Vec::new();
    let mut marks = Vec::new();
    let mut lines = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != 3 {
            return Err(Error::Parse { row: line, message: format!("expected 3 fields, got {}", rec.len()) });
        }
        let x = parse_field(&rec[0], line, "x")?;
        let y = parse_field(&rec[1], line, "y")?;
        let m = parse_field(&rec[2], line, "mark")?;
        if !x.is_finite() || !y.is_finite() || !m.is_finite() {
            return Err(Error::NonFinite { row: line });
        }
        points.push(Point::new(x, y));
        marks.push(m);
        lines.push(line);
    }
    let outside: Vec<usize> = points
        .iter()
        .zip(&lines)
        .filter(|(p, _)| !window.contains(**p))
        .map(|(_, &l)| l)
        .collect();
    if !outside.is_empty() {
        return Err(Error::OutOfWindow { rows: outside });
    }
    let pattern = MarkedPointPattern::new(window, points, marks)?;
    let dups = pattern.duplicate_count();
    if dups > 0 {
        log::warn!("{dups} duplicated point locations");
    }
    Ok(pattern)
}

fn check_header(headers: &csv::StringRecord) -> Result<()> {
    if headers.is_empty() {
        return Ok(());
    }
    let names: Vec<&str> = headers.iter().collect();
    if names != ["x", "y", "mark"] {
        return Err(Error::Parse { row: 1, message: format!("expected header x,y,mark, got {names:?}") });
    }
    Ok(())
}

pub fn read_pattern(path: impl AsRef<Path>, window: Window) -> Result<MarkedPointPattern> {
    let file = std::fs::File::open(path)?;
    read_pattern_from(std::io::BufReader::new(file), window)
}

/// Reads only the coordinates and marks, returning them with the bounding box
/// of the points (used when no window is given).
pub fn read_points_with_bbox(path: impl AsRef<Path>) -> Result<MarkedPointPattern> {
    let text = std::fs::read_to_string(path)?;
    let huge = Window::new(-f64::MAX, f64::MAX, -f64::MAX, f64::MAX)?;
    let raw = read_pattern_from(text.as_bytes(), huge)?;
    let window = bounding_window(raw.points());
    MarkedPointPattern::new(window, raw.points, raw.marks)
}

/// Bounding box of `points`, widened to unit extent on degenerate axes.
pub fn bounding_window(points: &[Point]) -> Window {
    if points.is_empty() {
        return Window::unit_square();
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    Window::new(x0, x1, y0, y1).expect("bounding box is a valid window")
}

/// Writes the `x,y,mark` schema with shortest round-trip float formatting.
pub fn write_pattern_to<W: Write>(pattern: &MarkedPointPattern, mut out: W) -> Result<()> {
    writeln!(out, "x,y,mark")?;
    for (p, m) in pattern.points.iter().zip(&pattern.marks) {
        writeln!(out, "{},{},{}", p.x, p.y, m)?;
    }
    Ok(())
}

pub fn write_pattern(pattern: &MarkedPointPattern, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_pattern_to(pattern, &mut buf)?;
    crate::io::write_atomic(path.as_ref(), &buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square() -> Window {
        Window::unit_square()
    }

    #[test]
    fn reads_well_formed_csv() {
        let csv = "x,y,mark\n# a comment\n0.1,0.2,3\n0.5,0.5,4.5\n0.9,0.1,-1\n";
        let p = read_pattern_from(csv.as_bytes(), square()).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.points()[1], Point::new(0.5, 0.5));
        assert_eq!(p.marks(), &[3.0, 4.5, -1.0]);
    }

    #[test]
    fn header_only_gives_empty_pattern() {
        let p = read_pattern_from("x,y,mark\n".as_bytes(), square()).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn out_of_window_rows_are_named() {
        let csv = "x,y,mark\n0.1,0.2,3\n1.5,0.5,4\n0.2,-0.1,1\n";
        match read_pattern_from(csv.as_bytes(), square()) {
            Err(Error::OutOfWindow { rows }) => assert_eq!(rows, vec![3, 4]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_and_finiteness_errors() {
        let bad = "x,y,mark\n0.1,0.2,3\n0.1,abc,3\n";
        assert!(matches!(read_pattern_from(bad.as_bytes(), square()), Err(Error::Parse { row: 3, .. })));
        let nan = "x,y,mark\n0.1,0.2,NaN\n";
        assert!(matches!(read_pattern_from(nan.as_bytes(), square()), Err(Error::NonFinite { row: 2 })));
        let header = "a,b,c\n0.1,0.2,1\n";
        assert!(read_pattern_from(header.as_bytes(), square()).is_err());
    }

    #[test]
    fn mark_summary_examples() {
        let s = summarize_marks(&[2.0, 4.0]).unwrap();
        assert_eq!((s.mean, s.variance), (3.0, 2.0));
        let c = summarize_marks(&[0.1; 7]).unwrap();
        assert_eq!((c.mean, c.variance), (0.1, 0.0));
        assert!(matches!(summarize_marks(&[1.0]), Err(Error::InsufficientPoints { got: 1, .. })));
    }

    #[test]
    fn permutation_of_single_point_is_identity() {
        let p = MarkedPointPattern::new(square(), vec![Point::new(0.5, 0.5)], vec![2.0]).unwrap();
        assert_eq!(permute_marks(&p, 9), p);
    }

    fn arb_pattern() -> impl Strategy<Value = MarkedPointPattern> {
        prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, -1e6..1e6f64), 0..40).prop_map(|rows| {
            let points = rows.iter().map(|r| Point::new(r.0, r.1)).collect();
            let marks = rows.iter().map(|r| r.2).collect();
            MarkedPointPattern::new(Window::unit_square(), points, marks).unwrap()
        })
    }

    proptest! {
        #[test]
        fn permutation_preserves_multiset_and_locations(p in arb_pattern(), seed in any::<u64>()) {
            let q = permute_marks(&p, seed);
            prop_assert_eq!(q.points(), p.points());
            let mut a = p.marks().to_vec();
            let mut b = q.marks().to_vec();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            prop_assert_eq!(a, b);
            prop_assert_eq!(permute_marks(&p, seed), q);
        }

        #[test]
        fn csv_round_trip(p in arb_pattern()) {
            let mut buf = Vec::new();
            write_pattern_to(&p, &mut buf).unwrap();
            let back = read_pattern_from(buf.as_slice(), *p.window()).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
