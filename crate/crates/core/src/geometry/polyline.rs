use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};

/// Orientation tolerance on cross products (unit-scale coordinates).
const ORIENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    vertices: Vec<Point>,
    closed: bool,
}

/// A pair of edges found crossing by [`Polyline::find_crossing`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentCrossing {
    pub first: usize,
    pub second: usize,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>, closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidParameter("polyline needs ≥ 2 vertices".into()));
        }
        if let Some(i) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!(
                "consecutive vertices {i} and {} coincide",
                i + 1
            )));
        }
        if closed && vertices[0] == vertices[vertices.len() - 1] {
            return Err(Error::InvalidParameter(
                "closed polyline must not repeat its first vertex".into(),
            ));
        }
        Ok(Self { vertices, closed })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn edge_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..self.edge_count()).map(|i| self.edge(i))
    }

    pub fn reversed(&self) -> Polyline {
        let mut v = self.vertices.clone();
        v.reverse();
        Polyline {
            vertices: v,
            closed: self.closed,
        }
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).fold(f64::INFINITY, f64::min)
    }

    /// Shoelace area, positive for counterclockwise traversal. The closing
    /// edge is implied whether or not the polyline is flagged closed.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
            * 0.5
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Even–odd point-in-polygon test against the implied closed boundary.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.closed_edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn closed_edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Euclidean distance from `p` to the nearest edge.
    pub fn distance_to(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Sweep over edges sorted by their left x-extent, testing each edge
    /// against the active set whose x-interval still overlaps. Returns the
    /// first offending pair, or `None` for a simple polyline.
    pub fn find_crossing(&self) -> Option<SegmentCrossing> {
        let m = self.edge_count();
        let mut order: Vec<usize> = (0..m).collect();
        let xmin = |i: usize| {
            let (a, b) = self.edge(i);
            a.x.min(b.x)
        };
        order.sort_by(|&i, &j| xmin(i).total_cmp(&xmin(j)));
        let mut active: Vec<usize> = Vec::new();
        for &i in &order {
            let (a, b) = self.edge(i);
            let lo = a.x.min(b.x);
            active.retain(|&j| {
                let (c, d) = self.edge(j);
                c.x.max(d.x) >= lo - ORIENT_EPS
            });
            for &j in &active {
                if self.edges_conflict(i, j) {
                    return Some(SegmentCrossing {
                        first: i.min(j),
                        second: i.max(j),
                    });
                }
            }
            active.push(i);
        }
        None
    }

    pub fn is_simple(&self) -> bool {
        self.find_crossing().is_none()
    }

    fn edges_conflict(&self, i: usize, j: usize) -> bool {
        let m = self.edge_count();
        let (a, b) = self.edge(i);
        let (c, d) = self.edge(j);
        if a.y.max(b.y) < c.y.min(d.y) - ORIENT_EPS || c.y.max(d.y) < a.y.min(b.y) - ORIENT_EPS {
            return false;
        }
        let adjacent = (i + 1) % m == j && (self.closed || i + 1 < m)
            || (j + 1) % m == i && (self.closed || j + 1 < m);
        if adjacent {
            // Shared vertex is allowed; folding back onto the neighbour is not.
            let (shared, p, q) = if (i + 1) % m == j { (b, a, d) } else { (a, b, c) };
            let u = p - shared;
            let v = q - shared;
            return u.cross(v).abs() <= ORIENT_EPS * u.norm() * v.norm() && u.dot(v) > 0.0;
        }
        proper_intersection(a, b, c, d)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn write_csv_to(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "x,y")?;
        for p in &self.vertices {
            writeln!(out, "{:e},{:e}", p.x, p.y)?;
        }
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>, closed: bool) -> Result<Self> {
        Self::read_csv_from(std::io::BufReader::new(std::fs::File::open(path)?), closed)
    }

    pub fn read_csv_from(input: impl BufRead, closed: bool) -> Result<Self> {
        let mut pts = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || lineno == 0 && line.starts_with('x') {
                continue;
            }
            let mut cols = line.split(',').map(|c| c.trim().parse::<f64>());
            match (cols.next(), cols.next()) {
                (Some(Ok(x)), Some(Ok(y))) => pts.push(Point::new(x, y)),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected `x,y`",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(pts, closed)
    }
}

pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.dist(a + ab * t)
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    let v = (b - a).cross(c - a);
    if v.abs() <= ORIENT_EPS {
        0.0
    } else {
        v
    }
}

/// Crossing or collinear overlap of two segments. Endpoint contacts that lie
/// within the orientation tolerance of the other segment are not counted.
fn proper_intersection(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    if o1 == 0.0 && o2 == 0.0 {
        // Collinear: overlap of positive length along the common line.
        let dir = b - a;
        let len = dir.norm();
        let proj = |p: Point| (p - a).dot(dir) / len;
        let (s0, s1) = (proj(c).min(proj(d)), proj(c).max(proj(d)));
        return s1.min(len) - s0.max(0.0) > ORIENT_EPS;
    }
    false
}
