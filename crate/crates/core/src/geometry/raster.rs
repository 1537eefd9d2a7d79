use std::collections::VecDeque;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Point, Polyline};
use crate::error::{Error, Result};

/// Isolated interior fragments larger than this share of the total are an
/// error rather than being pruned.
const MAX_PRUNED_FRACTION: f64 = 0.01;

/// Rasterized domain interior on a regular grid of square cells.
///
/// Cell `(i, j)` has center `origin + h·(i + ½, j + ½)`; masks are stored row
/// major with `j` as the row index.
#[derive(Debug, Clone)]
pub struct GridDomain {
    h: f64,
    origin: Point,
    nx: usize,
    ny: usize,
    interior: Vec<bool>,
    boundary: Vec<bool>,
    polygon: Option<Polyline>,
    pruned_cells: usize,
}

/// JSON sidecar written next to the PGM mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub h: f64,
    pub origin: [f64; 2],
    pub area: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridDomain {
    /// Builds a domain from an interior mask; the boundary rim is derived.
    pub fn from_mask(
        h: f64,
        origin: Point,
        nx: usize,
        ny: usize,
        interior: Vec<bool>,
    ) -> Result<Self> {
        if !(h > 0.0) || interior.len() != nx * ny {
            return Err(Error::InvalidParameter("inconsistent grid dimensions".into()));
        }
        let mut g = Self {
            h,
            origin,
            nx,
            ny,
            interior,
            boundary: vec![false; nx * ny],
            polygon: None,
            pruned_cells: 0,
        };
        if g.cell_count() == 0 {
            return Err(Error::InvalidParameter("grid has no interior cells".into()));
        }
        g.rebuild_boundary();
        Ok(g)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    /// Source polygon when the grid came from [`rasterize`].
    pub fn polygon(&self) -> Option<&Polyline> {
        self.polygon.as_ref()
    }

    /// Interior cells removed because they were cut off from the main component.
    pub fn pruned_cells(&self) -> usize {
        self.pruned_cells
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + (i as f64 + 0.5) * self.h,
            self.origin.y + (j as f64 + 0.5) * self.h,
        )
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        self.interior[self.index(i, j)]
    }

    pub fn cell_count(&self) -> usize {
        self.interior.iter().filter(|&&b| b).count()
    }

    pub fn area(&self) -> f64 {
        self.cell_count() as f64 * self.h * self.h
    }

    fn rebuild_boundary(&mut self) {
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        let mut rim = vec![false; self.interior.len()];
        for j in 0..ny {
            for i in 0..nx {
                let k = (j * nx + i) as usize;
                if self.interior[k] {
                    continue;
                }
                'nbr: for dj in -1..=1 {
                    for di in -1..=1 {
                        let (a, b) = (i + di, j + dj);
                        if a >= 0 && b >= 0 && a < nx && b < ny && self.interior[(b * nx + a) as usize]
                        {
                            rim[k] = true;
                            break 'nbr;
                        }
                    }
                }
            }
        }
        self.boundary = rim;
    }

    /// 4-connected component labels of the interior (`usize::MAX` outside),
    /// plus the size of each component.
    pub fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let mut label = vec![usize::MAX; self.interior.len()];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.interior.len() {
            if !self.interior[start] || label[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            label[start] = id;
            queue.push_back(start);
            while let Some(k) = queue.pop_front() {
                size += 1;
                let (i, j) = (k % self.nx, k / self.nx);
                let mut visit = |n: usize| {
                    if self.interior[n] && label[n] == usize::MAX {
                        label[n] = id;
                        queue.push_back(n);
                    }
                };
                if i > 0 {
                    visit(k - 1);
                }
                if i + 1 < self.nx {
                    visit(k + 1);
                }
                if j > 0 {
                    visit(k - self.nx);
                }
                if j + 1 < self.ny {
                    visit(k + self.nx);
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1.len() == 1
    }

    pub fn meta(&self) -> GridMeta {
        GridMeta {
            h: self.h,
            origin: [self.origin.x, self.origin.y],
            area: self.area(),
            nx: self.nx,
            ny: self.ny,
        }
    }

    /// Binary PGM, top row = largest y. 0 outside, 128 rim, 255 interior.
    pub fn write_pgm_to(&self, out: &mut impl Write) -> Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.nx, self.ny)?;
        let mut row = vec![0u8; self.nx];
        for j in (0..self.ny).rev() {
            for (i, px) in row.iter_mut().enumerate() {
                let k = self.index(i, j);
                *px = if self.interior[k] {
                    255
                } else if self.boundary[k] {
                    128
                } else {
                    0
                };
            }
            out.write_all(&row)?;
        }
        Ok(())
    }

    /// Writes `<stem>.pgm` and `<stem>.json`.
    pub fn export(&self, stem: impl AsRef<Path>) -> Result<()> {
        let stem = stem.as_ref();
        let mut pgm = std::io::BufWriter::new(std::fs::File::create(stem.with_extension("pgm"))?);
        self.write_pgm_to(&mut pgm)?;
        pgm.flush()?;
        std::fs::write(
            stem.with_extension("json"),
            serde_json::to_string_pretty(&self.meta())?,
        )?;
        Ok(())
    }

    pub fn import(stem: impl AsRef<Path>) -> Result<Self> {
        let stem = stem.as_ref();
        let meta: GridMeta = serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json"))?)?;
        let mut bytes = Vec::new();
        std::fs::File::open(stem.with_extension("pgm"))?.read_to_end(&mut bytes)?;
        Self::from_pgm(&bytes, &meta)
    }

    pub fn from_pgm(bytes: &[u8], meta: &GridMeta) -> Result<Self> {
        let bad = || Error::Parse("malformed PGM header".into());
        // Header: magic, width, height, maxval, each followed by whitespace.
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad());
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad())?);
        }
        pos += 1;
        if fields[0] != "P5" {
            return Err(bad());
        }
        let nx: usize = fields[1].parse().map_err(|_| bad())?;
        let ny: usize = fields[2].parse().map_err(|_| bad())?;
        if nx != meta.nx || ny != meta.ny || bytes.len() < pos + nx * ny {
            return Err(Error::Parse("PGM size disagrees with sidecar".into()));
        }
        let mut interior = vec![false; nx * ny];
        for j in 0..ny {
            let row = &bytes[pos + (ny - 1 - j) * nx..pos + (ny - j) * nx];
            for i in 0..nx {
                interior[j * nx + i] = row[i] == 255;
            }
        }
        Self::from_mask(meta.h, Point::new(meta.origin[0], meta.origin[1]), nx, ny, interior)
    }
}

/// Even–odd scanline fill of a closed simple polygon at `resolution` cells
/// per unit length. Interior fragments cut off from the main 4-connected
/// component are pruned.
pub fn rasterize(boundary: &Polyline, resolution: usize) -> Result<GridDomain> {
    if !boundary.is_closed() {
        return Err(Error::OpenPolyline);
    }
    if resolution < 16 {
        return Err(Error::InvalidParameter(format!(
            "resolution must be ≥ 16, got {resolution}"
        )));
    }
    if let Some(hit) = boundary.find_crossing() {
        return Err(Error::SelfIntersection {
            first: hit.first,
            second: hit.second,
        });
    }
    let h = 1.0 / resolution as f64;
    let (lo, hi) = boundary.bbox();
    let pad = 2.0 * h;
    let origin = Point::new(lo.x - pad, lo.y - pad);
    let nx = ((hi.x + pad - origin.x) / h).ceil() as usize;
    let ny = ((hi.y + pad - origin.y) / h).ceil() as usize;
    let edges: Vec<(Point, Point)> = boundary.edges().collect();

    let mut interior = vec![false; nx * ny];
    interior
        .par_chunks_mut(nx)
        .enumerate()
        .for_each(|(j, row)| {
            let y = origin.y + (j as f64 + 0.5) * h;
            let mut xs: Vec<f64> = edges
                .iter()
                .filter(|(a, b)| (a.y > y) != (b.y > y))
                .map(|(a, b)| a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y))
                .collect();
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                let first = ((pair[0] - origin.x) / h - 0.5).ceil().max(0.0) as usize;
                let last = ((pair[1] - origin.x) / h - 0.5).floor();
                if last < 0.0 {
                    continue;
                }
                let last = (last as usize).min(nx - 1);
                for cell in row.iter_mut().take(last + 1).skip(first) {
                    *cell = true;
                }
            }
        });

    let mut grid = GridDomain::from_mask(h, origin, nx, ny, interior)?;
    let (labels, sizes) = grid.components();
    if sizes.len() > 1 {
        let (main, &main_size) = sizes
            .iter()
            .enumerate()
            .max_by_key(|&(_, s)| *s)
            .expect("non-empty");
        let total: usize = sizes.iter().sum();
        let pruned = total - main_size;
        if pruned as f64 > MAX_PRUNED_FRACTION * total as f64 {
            return Err(Error::Disconnected {
                components: sizes.len(),
            });
        }
        for (cell, &l) in grid.interior.iter_mut().zip(&labels) {
            if *cell && l != main {
                *cell = false;
            }
        }
        grid.pruned_cells = pruned;
        grid.rebuild_boundary();
    }
    grid.polygon = Some(boundary.clone());
    Ok(grid)
}
