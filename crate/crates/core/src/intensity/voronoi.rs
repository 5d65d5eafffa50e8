//! Window-clipped Voronoi cells and the resample-smoothed Voronoi intensity
//! estimator.

use rand::Rng;

use super::{EstimatorKind, GridValues, IntensityField};
use crate::error::{Error, Result};
use crate::geometry::{Point, QuadratureGrid, Window};
use crate::pattern::MarkedPointPattern;
use crate::rng;

/// Convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn from_window(w: &Window) -> Self {
        Self {
            vertices: vec![
                Point::new(w.xmin(), w.ymin()),
                Point::new(w.xmax(), w.ymin()),
                Point::new(w.xmax(), w.ymax()),
                Point::new(w.xmin(), w.ymax()),
            ],
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let mut twice = 0.0;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            twice += a.x * b.y - b.x * a.y;
        }
        0.5 * twice.abs()
    }

    /// Keeps the part where `n · v <= c`.
    pub fn clip(&self, nx: f64, ny: f64, c: f64) -> Self {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let fa = nx * a.x + ny * a.y - c;
            let fb = nx * b.x + ny * b.y - c;
            if fa <= 0.0 {
                out.push(a);
            }
            if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
                let t = fa / (fa - fb);
                out.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
            }
        }
        Self { vertices: out }
    }

    fn max_radius_from(&self, p: Point) -> f64 {
        self.vertices.iter().map(|v| crate::geometry::distance(*v, p)).fold(0.0, f64::max)
    }
}

/// Voronoi cell of `sites[i]` inside `window`, by successive half-plane
/// clipping against the bisectors of the nearest other sites. Sites must be
/// pairwise distinct.
fn voronoi_cell(window: &Window, sites: &[Point], i: usize, order: &mut Vec<(f64, usize)>) -> ConvexPolygon {
    let p = sites[i];
    order.clear();
    order.extend(
        sites
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(j, q)| ((q.x - p.x).powi(2) + (q.y - p.y).powi(2), j)),
    );
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut cell = ConvexPolygon::from_window(window);
    for &(d2, j) in order.iter() {
        // a bisector farther than twice the cell radius cannot cut the cell
        let reach = 2.0 * cell.max_radius_from(p);
        if d2 > reach * reach {
            break;
        }
        let q = sites[j];
        let (nx, ny) = (q.x - p.x, q.y - p.y);
        let c = 0.5 * (nx * (p.x + q.x) + ny * (p.y + q.y));
        cell = cell.clip(nx, ny, c);
        if cell.vertices.is_empty() {
            break;
        }
    }
    cell
}

/// Areas of the window-clipped Voronoi cells of pairwise-distinct sites.
pub fn voronoi_cell_areas(window: &Window, sites: &[Point]) -> Vec<f64> {
    let mut scratch = Vec::with_capacity(sites.len());
    (0..sites.len()).map(|i| voronoi_cell(window, sites, i, &mut scratch).area()).collect()
}

/// Collapses coincident locations; returns distinct sites and multiplicities.
fn distinct_sites(points: &[Point]) -> (Vec<Point>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(points[a].y.total_cmp(&points[b].y)));
    let mut sites: Vec<Point> = Vec::new();
    let mut mult: Vec<f64> = Vec::new();
    for i in idx {
        let p = points[i];
        match sites.last() {
            Some(last) if *last == p => *mult.last_mut().unwrap() += 1.0,
            _ => {
                sites.push(p);
                mult.push(1.0);
            }
        }
    }
    (sites, mult)
}

fn nearest(sites: &[Point], u: Point) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (j, s) in sites.iter().enumerate() {
        let d2 = (s.x - u.x).powi(2) + (s.y - u.y).powi(2);
        if d2 < best.0 {
            best = (d2, j);
        }
    }
    best.1
}

/// Plain Voronoi intensity of `points` evaluated at `queries`: the
/// multiplicity of the nearest site over its cell area. Zero when `points`
/// is empty.
fn voronoi_values(window: &Window, points: &[Point], queries: impl Iterator<Item = Point>) -> Vec<f64> {
    if points.is_empty() {
        return queries.map(|_| 0.0).collect();
    }
    let (sites, mult) = distinct_sites(points);
    let areas = voronoi_cell_areas(window, &sites);
    let cell_value: Vec<f64> = mult.iter().zip(&areas).map(|(m, a)| m / a).collect();
    queries.map(|u| cell_value[nearest(&sites, u)]).collect()
}

/// Resample-smoothed Voronoi estimator: the average over `replicates`
/// independent `retention`-thinnings of the thinned pattern's Voronoi
/// estimator, divided by `retention`.
pub fn voronoi_intensity(
    pattern: &MarkedPointPattern,
    retention: f64,
    replicates: usize,
    seed: u64,
    grid: Option<&QuadratureGrid>,
) -> Result<IntensityField> {
    if !(retention > 0.0 && retention <= 1.0) {
        return Err(Error::InvalidArgument(format!("retention must lie in (0, 1], got {retention}")));
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("need at least one Voronoi replicate".into()));
    }
    let window = *pattern.window();
    let pts = pattern.points();
    let n_grid = grid.map_or(0, QuadratureGrid::len);
    let mut at_points = vec![0.0; pts.len()];
    let mut on_grid = vec![0.0; n_grid];
    let scale = 1.0 / (retention * replicates as f64);
    for r in 0..replicates {
        let kept: Vec<Point> = if retention >= 1.0 {
            pts.to_vec()
        } else {
            let mut rng = rng::stream(seed, rng::tag::THINNING, r as u64);
            pts.iter().copied().filter(|_| rng.random::<f64>() < retention).collect()
        };
        let queries = pts.iter().copied().chain(grid.into_iter().flat_map(|g| g.centers()));
        let vals = voronoi_values(&window, &kept, queries);
        let (vp, vg) = vals.split_at(pts.len());
        for (acc, v) in at_points.iter_mut().zip(vp) {
            *acc += v * scale;
        }
        for (acc, v) in on_grid.iter_mut().zip(vg) {
            *acc += v * scale;
        }
    }
    let grid = grid.map(|g| GridValues { grid: g.clone(), values: on_grid });
    Ok(IntensityField::from_raw(pattern, EstimatorKind::VoronoiResample, None, at_points, grid))
}
