//! Isobenefit lines: level contours of a benefit raster, traced with
//! marching squares.
//!
//! Raster cell centres are the corners of the contouring lattice. A corner
//! is "above" a level when its value is strictly greater than the level.
//! Edge crossings are placed by linear interpolation between the two corner
//! values. Saddle squares are decided by the mean of their four corners: if
//! the mean is above the level the above corners are joined, otherwise
//! (including an exact tie) they are cut off separately.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::Raster;

#[derive(Debug, Clone, PartialEq)]
pub enum Levels {
    Explicit(Vec<f64>),
    /// `n` levels evenly spaced strictly between the raster min and max.
    Count(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Isoline {
    pub level: f64,
    /// Vertices in scene coordinates. Closed lines repeat the first vertex
    /// at the end.
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ContourSet {
    pub levels: Vec<f64>,
    pub lines: Vec<Isoline>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ContourSet {
    pub fn lines_at(&self, level: f64) -> impl Iterator<Item = &Isoline> {
        self.lines.iter().filter(move |l| l.level == level)
    }
}

/// Resolves a level request against a raster.
pub fn resolve_levels(raster: &Raster, levels: &Levels) -> Result<Vec<f64>> {
    match levels {
        Levels::Explicit(v) => {
            if let Some(bad) = v.iter().find(|l| !l.is_finite()) {
                return Err(Error::InvalidLevels(format!("non-finite level {bad}")));
            }
            Ok(v.clone())
        }
        Levels::Count(0) => Err(Error::InvalidLevels("level count must be at least 1".into())),
        &Levels::Count(n) => {
            let (min, max) = min_max(raster.values());
            if min == max {
                return Err(Error::NoFiniteRange(min));
            }
            let span = max - min;
            Ok((1..=n)
                .map(|k| min + span * k as f64 / (n + 1) as f64)
                .collect())
        }
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

pub fn extract_isolines(raster: &Raster, levels: &Levels) -> Result<ContourSet> {
    let grid = raster.grid();
    if grid.ncols < 2 || grid.nrows < 2 {
        return Err(Error::GridTooSmall {
            ncols: grid.ncols,
            nrows: grid.nrows,
        });
    }
    let levels = resolve_levels(raster, levels)?;
    let (min, max) = min_max(raster.values());
    let mut warnings = Vec::new();
    if min == max {
        for &l in levels.iter().filter(|&&l| l == min) {
            warnings.push(format!(
                "raster is constant at level {l}; a plateau has no isoline"
            ));
        }
    }
    let per_level: Vec<Vec<Isoline>> = levels
        .par_iter()
        .map(|&level| trace_level(raster, level))
        .collect();
    Ok(ContourSet {
        levels,
        lines: per_level.into_iter().flatten().collect(),
        warnings,
    })
}

// Segment table indexed by the above-mask (bl=1, br=2, tr=4, tl=8).
// Edges: 0 bottom, 1 right, 2 top, 3 left.
const BOTTOM: u8 = 0;
const RIGHT: u8 = 1;
const TOP: u8 = 2;
const LEFT: u8 = 3;

fn square_segments(mask: u8, centre_above: bool) -> &'static [(u8, u8)] {
    match mask {
        0 | 15 => &[],
        1 | 14 => &[(LEFT, BOTTOM)],
        2 | 13 => &[(BOTTOM, RIGHT)],
        3 | 12 => &[(LEFT, RIGHT)],
        4 | 11 => &[(RIGHT, TOP)],
        6 | 9 => &[(BOTTOM, TOP)],
        7 | 8 => &[(LEFT, TOP)],
        5 if centre_above => &[(BOTTOM, RIGHT), (TOP, LEFT)],
        5 => &[(LEFT, BOTTOM), (RIGHT, TOP)],
        10 if centre_above => &[(LEFT, BOTTOM), (RIGHT, TOP)],
        10 => &[(BOTTOM, RIGHT), (TOP, LEFT)],
        _ => unreachable!(),
    }
}

struct Lattice<'a> {
    raster: &'a Raster,
    ncols: usize,
    nrows: usize,
    level: f64,
}

impl Lattice<'_> {
    /// Horizontal edges come first, then vertical ones.
    fn edge_id(&self, col: usize, row: usize, edge: u8) -> usize {
        let nh = (self.ncols - 1) * self.nrows;
        match edge {
            BOTTOM => row * (self.ncols - 1) + col,
            TOP => (row + 1) * (self.ncols - 1) + col,
            LEFT => nh + row * self.ncols + col,
            RIGHT => nh + row * self.ncols + col + 1,
            _ => unreachable!(),
        }
    }

    fn crossing(&self, edge_id: usize) -> (f64, f64) {
        let nh = (self.ncols - 1) * self.nrows;
        let ((c0, r0), (c1, r1)) = if edge_id < nh {
            let (row, col) = (edge_id / (self.ncols - 1), edge_id % (self.ncols - 1));
            ((col, row), (col + 1, row))
        } else {
            let k = edge_id - nh;
            let (row, col) = (k / self.ncols, k % self.ncols);
            ((col, row), (col, row + 1))
        };
        let v0 = self.raster.get(c0, r0);
        let v1 = self.raster.get(c1, r1);
        let t = (self.level - v0) / (v1 - v0);
        let (x0, y0) = self.raster.grid().center(c0, r0);
        let (x1, y1) = self.raster.grid().center(c1, r1);
        (x0 + t * (x1 - x0), y0 + t * (y1 - y0))
    }
}

fn trace_level(raster: &Raster, level: f64) -> Vec<Isoline> {
    let grid = raster.grid();
    let lat = Lattice {
        raster,
        ncols: grid.ncols,
        nrows: grid.nrows,
        level,
    };

    // crossing nodes keyed by lattice edge, and segments between them
    let mut node_of_edge: HashMap<usize, usize> = HashMap::new();
    let mut node_edges: Vec<usize> = Vec::new();
    let mut segments: Vec<(usize, usize)> = Vec::new();
    let mut node = |edge: usize, node_edges: &mut Vec<usize>| {
        *node_of_edge.entry(edge).or_insert_with(|| {
            node_edges.push(edge);
            node_edges.len() - 1
        })
    };

    for row in 0..grid.nrows - 1 {
        for col in 0..grid.ncols - 1 {
            let bl = raster.get(col, row);
            let br = raster.get(col + 1, row);
            let tr = raster.get(col + 1, row + 1);
            let tl = raster.get(col, row + 1);
            let mask = (bl > level) as u8
                | ((br > level) as u8) << 1
                | ((tr > level) as u8) << 2
                | ((tl > level) as u8) << 3;
            if mask == 0 || mask == 15 {
                continue;
            }
            let centre_above = (bl + br + tr + tl) / 4.0 > level;
            for &(e0, e1) in square_segments(mask, centre_above) {
                let a = node(lat.edge_id(col, row, e0), &mut node_edges);
                let b = node(lat.edge_id(col, row, e1), &mut node_edges);
                segments.push((a, b));
            }
        }
    }

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); node_edges.len()];
    for (s, &(a, b)) in segments.iter().enumerate() {
        incident[a].push(s);
        incident[b].push(s);
    }
    let points: Vec<(f64, f64)> = node_edges.iter().map(|&e| lat.crossing(e)).collect();

    // visit nodes in lattice-edge order so output is independent of hashing
    let mut order: Vec<usize> = (0..node_edges.len()).collect();
    order.sort_unstable_by_key(|&n| node_edges[n]);

    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| -> Vec<usize> {
        let mut path = vec![start];
        let mut at = start;
        while let Some(&s) = incident[at].iter().find(|&&s| !used[s]) {
            used[s] = true;
            let (a, b) = segments[s];
            at = if a == at { b } else { a };
            path.push(at);
        }
        path
    };

    // open lines start at boundary crossings (degree one)
    for &n in &order {
        if incident[n].len() == 1 && !used[incident[n][0]] {
            let path = walk(n, &mut used);
            push_line(&mut lines, level, &path, &points, false);
        }
    }
    for &n in &order {
        if incident[n].iter().any(|&s| !used[s]) {
            let path = walk(n, &mut used);
            let closed = path.len() > 2 && path.first() == path.last();
            push_line(&mut lines, level, &path, &points, closed);
        }
    }
    lines
}

fn push_line(
    lines: &mut Vec<Isoline>,
    level: f64,
    path: &[usize],
    points: &[(f64, f64)],
    closed: bool,
) {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(path.len());
    for &n in path {
        // corner-exact crossings can coincide
        if pts.last() != Some(&points[n]) {
            pts.push(points[n]);
        }
    }
    let distinct = if closed { pts.len() - 1 } else { pts.len() };
    if distinct >= 2 {
        lines.push(Isoline {
            level,
            points: pts,
            closed,
        });
    }
}

/// Bilinear interpolation of the raster at a point inside its centre
/// lattice; `None` outside.
pub fn sample_bilinear(raster: &Raster, x: f64, y: f64) -> Option<f64> {
    let g = raster.grid();
    let fx = (x - g.origin_x) / g.cell_size;
    let fy = (y - g.origin_y) / g.cell_size;
    let tol = 1e-9;
    let maxc = (g.ncols - 1) as f64;
    let maxr = (g.nrows - 1) as f64;
    if fx < -tol || fy < -tol || fx > maxc + tol || fy > maxr + tol {
        return None;
    }
    let fx = fx.clamp(0.0, maxc);
    let fy = fy.clamp(0.0, maxr);
    let c0 = (fx.floor() as usize).min(g.ncols.saturating_sub(2));
    let r0 = (fy.floor() as usize).min(g.nrows.saturating_sub(2));
    let c1 = (c0 + 1).min(g.ncols - 1);
    let r1 = (r0 + 1).min(g.nrows - 1);
    let tx = fx - c0 as f64;
    let ty = fy - r0 as f64;
    let bottom = raster.get(c0, r0) * (1.0 - tx) + raster.get(c1, r0) * tx;
    let top = raster.get(c0, r1) * (1.0 - tx) + raster.get(c1, r1) * tx;
    Some(bottom * (1.0 - ty) + top * ty)
}
