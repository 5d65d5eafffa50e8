//! Rectangular observation windows, interpoint distances, edge-correction
//! weights and midpoint quadrature grids.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower bound on the inside fraction used by the Ripley correction.
pub const RIPLEY_MIN_FRACTION: f64 = 1e-6;

/// A location in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance between two points.
#[inline]
pub fn distance(p: Point, q: Point) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// Axis-aligned rectangular observation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Window {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let finite = [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite());
        if !finite || xmax <= xmin || ymax <= ymin {
            return Err(Error::InvalidWindow(format!(
                "need finite xmin < xmax and ymin < ymax, got ({xmin}, {xmax}, {ymin}, {ymax})"
            )));
        }
        Ok(Self { xmin, xmax, ymin, ymax })
    }

    /// The unit square `[0, 1]²`.
    pub fn unit_square() -> Self {
        Self { xmin: 0.0, xmax: 1.0, ymin: 0.0, ymax: 1.0 }
    }

    pub fn xmin(&self) -> f64 {
        self.xmin
    }
    pub fn xmax(&self) -> f64 {
        self.xmax
    }
    pub fn ymin(&self) -> f64 {
        self.ymin
    }
    pub fn ymax(&self) -> f64 {
        self.ymax
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn shorter_side(&self) -> f64 {
        self.width().min(self.height())
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Closed-rectangle membership.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.xmin, self.xmax, self.ymin, self.ymax]
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.xmin, self.xmax, self.ymin, self.ymax)
    }
}

impl FromStr for Window {
    type Err = Error;

    /// Parses `xmin,xmax,ymin,ymax`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidWindow(format!("cannot parse {s:?}: {e}")))?;
        match parts.as_slice() {
            [a, b, c, d] => Window::new(*a, *b, *c, *d),
            _ => Err(Error::InvalidWindow(format!(
                "expected four comma-separated values, got {s:?}"
            ))),
        }
    }
}

/// Edge-correction weight applied to each ordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeCorrection {
    #[default]
    Translation,
    Ripley,
}

impl EdgeCorrection {
    /// Weight for the ordered pair `(p, q)` at separation `d`.
    pub fn weight(self, window: &Window, p: Point, q: Point, d: f64) -> Result<f64> {
        match self {
            EdgeCorrection::Translation => translation_correction(window, p, q),
            EdgeCorrection::Ripley => Ok(ripley_correction(window, p, d)),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeCorrection::Translation => "translation",
            EdgeCorrection::Ripley => "ripley",
        }
    }
}

impl FromStr for EdgeCorrection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "translation" | "translate" => Ok(Self::Translation),
            "ripley" | "isotropic" => Ok(Self::Ripley),
            other => Err(Error::InvalidArgument(format!("unknown edge correction {other:?}"))),
        }
    }
}

/// Translation edge correction `|W| / |W ∩ (W + (p − q))|`.
pub fn translation_correction(window: &Window, p: Point, q: Point) -> Result<f64> {
    let ox = window.width() - (p.x - q.x).abs();
    let oy = window.height() - (p.y - q.y).abs();
    if ox <= 0.0 || oy <= 0.0 {
        return Err(Error::UndefinedOverlap { dx: p.x - q.x, dy: p.y - q.y });
    }
    Ok(window.area() / (ox * oy))
}

/// Ripley isotropic correction: the reciprocal of the fraction of the circle
/// of radius `r` about `p` lying inside the window.
///
/// The fraction is found exactly by splitting the circle at its crossings
/// with the four supporting lines of the rectangle and testing the midpoint
/// of every arc. It is floored at [`RIPLEY_MIN_FRACTION`].
pub fn ripley_correction(window: &Window, p: Point, r: f64) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    let mut angles = vec![0.0, 2.0 * PI];
    let mut push_crossings = |offset: f64, vertical: bool| {
        // offset is the signed distance from p to the line along its normal
        if offset.abs() > r {
            return;
        }
        let a = (offset / r).clamp(-1.0, 1.0).acos();
        let (t1, t2) = if vertical { (a, -a) } else { (PI / 2.0 - a, PI / 2.0 + a) };
        for t in [t1, t2] {
            angles.push(t.rem_euclid(2.0 * PI));
        }
    };
    push_crossings(window.xmin - p.x, true);
    push_crossings(window.xmax - p.x, true);
    push_crossings(window.ymin - p.y, false);
    push_crossings(window.ymax - p.y, false);
    angles.sort_by(f64::total_cmp);

    let mut inside = 0.0;
    for pair in angles.windows(2) {
        let span = pair[1] - pair[0];
        if span <= 0.0 {
            continue;
        }
        let mid = 0.5 * (pair[0] + pair[1]);
        let probe = Point::new(p.x + r * mid.cos(), p.y + r * mid.sin());
        if window.contains(probe) {
            inside += span;
        }
    }
    let fraction = (inside / (2.0 * PI)).clamp(RIPLEY_MIN_FRACTION, 1.0);
    1.0 / fraction
}

/// Regular `nx × ny` partition of a window into equal cells, used for
/// midpoint quadrature and for exporting surfaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    window: Window,
    nx: usize,
    ny: usize,
}

impl QuadratureGrid {
    pub fn new(window: Window, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid dimensions must be positive, got {nx}x{ny}"
            )));
        }
        Ok(Self { window, nx, ny })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.window.width() / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.window.height() / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Cells are stored row-major: index = iy * nx + ix.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn center(&self, idx: usize) -> Point {
        let ix = idx % self.nx;
        let iy = idx / self.nx;
        Point::new(
            self.window.xmin + (ix as f64 + 0.5) * self.dx(),
            self.window.ymin + (iy as f64 + 0.5) * self.dy(),
        )
    }

    pub fn centers(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.center(i))
    }

    /// Cell containing `p`; points on the upper/right boundary go to the last cell.
    pub fn cell_of(&self, p: Point) -> Option<usize> {
        if !self.window.contains(p) {
            return None;
        }
        let ix = (((p.x - self.window.xmin) / self.dx()) as usize).min(self.nx - 1);
        let iy = (((p.y - self.window.ymin) / self.dy()) as usize).min(self.ny - 1);
        Some(self.index(ix, iy))
    }

    /// Midpoint-rule integral of per-cell values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.cell_area()
    }
}
