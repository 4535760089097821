//! Numerical range W(A) via the support-function method, the numerical
//! abscissa and the full Hermitian-part spectrum, and epsilon-pseudospectra
//! on a grid with marching-squares contour extraction.

use std::collections::HashMap;

use crate::densela::{cplx, hermitian_eig, hermitian_part, CMat, C64, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::par;

/// Default number of support angles for the numerical range boundary.
pub const DEFAULT_ANGLES: usize = 256;
/// Default pseudospectra grid resolution per axis.
pub const DEFAULT_RESOLUTION: usize = 256;

/// Discretized boundary of W(A) plus the Hermitian-part eigenvalues.
#[derive(Debug, Clone)]
pub struct NumericalRangeBoundary {
    pub angles: Vec<f64>,
    pub points: Vec<C64>,
    /// All eigenvalues of (A + A*)/2, descending; omega_k[0] is the
    /// numerical abscissa.
    pub omega_k: Vec<f64>,
}

impl NumericalRangeBoundary {
    pub fn omega(&self) -> f64 {
        self.omega_k[0]
    }

    /// Axis-aligned bounding box of the boundary points.
    pub fn bounding_box(&self) -> GridBox {
        let mut b = GridBox {
            re_min: f64::INFINITY,
            re_max: f64::NEG_INFINITY,
            im_min: f64::INFINITY,
            im_max: f64::NEG_INFINITY,
        };
        for z in &self.points {
            b.re_min = b.re_min.min(z.re);
            b.re_max = b.re_max.max(z.re);
            b.im_min = b.im_min.min(z.im);
            b.im_max = b.im_max.max(z.im);
        }
        b
    }

    /// Twice the signed polygon area.
    pub fn polygon_area2(&self) -> f64 {
        let pts = &self.points;
        let mut acc = 0.0;
        for i in 0..pts.len() {
            let p = pts[i];
            let q = pts[(i + 1) % pts.len()];
            acc += p.re * q.im - q.re * p.im;
        }
        acc
    }

    /// Convexity check on consecutive edges; `None` when the polygon is
    /// numerically degenerate (normal A with collinear spectrum) and the
    /// test does not apply.
    pub fn verify_convex(&self, scale: f64) -> Option<bool> {
        if self.polygon_area2().abs() < 1e-12 * scale * scale {
            return None;
        }
        let pts = &self.points;
        let m = pts.len();
        let mut sign = 0.0f64;
        for i in 0..m {
            let a = pts[i];
            let b = pts[(i + 1) % m];
            let c = pts[(i + 2) % m];
            let cross = (b.re - a.re) * (c.im - b.im) - (b.im - a.im) * (c.re - b.re);
            if cross.abs() <= 1e-9 * scale * scale {
                continue;
            }
            if sign == 0.0 {
                sign = cross.signum();
            } else if cross.signum() != sign {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Point-in-polygon by winding number, with an inflation margin.
    pub fn contains(&self, z: C64, inflation: f64) -> bool {
        let poly: Vec<(f64, f64)> = self.points.iter().map(|p| (p.re, p.im)).collect();
        if winding_number(&poly, (z.re, z.im)) != 0 {
            return true;
        }
        self.points.iter().any(|p| (p - z).norm() <= inflation)
    }
}

/// Support-function (rotation) method: for each angle theta, the top
/// eigenvector v of the Hermitian part of e^{-i theta} A gives the boundary
/// point v* A v.
pub fn numerical_range(a: &CMat, m: usize) -> Result<NumericalRangeBoundary> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if m < 8 {
        return Err(Error::InvalidInput("numerical_range requires m >= 8".into()));
    }
    let omega_k = hermitian_part_spectrum(a)?;
    let results = par::map_indexed(m, |j| -> Result<(f64, C64)> {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let rotated = a * C64::from_polar(1.0, -theta);
        let h = hermitian_part(&rotated);
        let es = hermitian_eig(&h, DEFAULT_TOL)?;
        let v = es.eigenvectors.column(0);
        let z = (v.adjoint() * a * v)[(0, 0)];
        Ok((theta, z))
    });
    let mut angles = Vec::with_capacity(m);
    let mut points = Vec::with_capacity(m);
    for r in results {
        let (theta, z) = r?;
        angles.push(theta);
        points.push(z);
    }
    Ok(NumericalRangeBoundary {
        angles,
        points,
        omega_k,
    })
}

/// omega(A): the largest eigenvalue of (A + A*)/2.
pub fn numerical_abscissa(a: &CMat) -> Result<f64> {
    Ok(hermitian_part_spectrum(a)?[0])
}

/// All eigenvalues of (A + A*)/2, descending.
pub fn hermitian_part_spectrum(a: &CMat) -> Result<Vec<f64>> {
    let h = hermitian_part(a);
    Ok(hermitian_eig(&h, DEFAULT_TOL)?.eigenvalues)
}

#[derive(Debug, Clone, Copy)]
pub struct GridBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl GridBox {
    pub fn padded(&self, pad: f64) -> GridBox {
        GridBox {
            re_min: self.re_min - pad,
            re_max: self.re_max + pad,
            im_min: self.im_min - pad,
            im_max: self.im_max + pad,
        }
    }
}

/// Default pseudospectra box: the W(A) bounding box padded by
/// max(2 eps_max, 0.1 ||A||), which keeps sigma_eps contours closed.
pub fn default_box(nr: &NumericalRangeBoundary, eps_max: f64, a_norm: f64) -> GridBox {
    nr.bounding_box().padded((2.0 * eps_max).max(0.1 * a_norm))
}

/// Grid of sigma_min(zI - A) = 1/||(zI - A)^{-1}|| values.
#[derive(Debug, Clone)]
pub struct PseudospectrumGrid {
    pub gbox: GridBox,
    pub nx: usize,
    pub ny: usize,
    /// Row-major by imaginary axis: values[iy * nx + ix].
    pub values: Vec<f64>,
}

impl PseudospectrumGrid {
    pub fn x(&self, ix: usize) -> f64 {
        self.gbox.re_min + (self.gbox.re_max - self.gbox.re_min) * ix as f64 / (self.nx - 1) as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.gbox.im_min + (self.gbox.im_max - self.gbox.im_min) * iy as f64 / (self.ny - 1) as f64
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// Evaluate sigma_min(zI - A) on a uniform grid over `gbox`. Nodes are
/// independent; evaluation parallelizes with a deterministic assembly order.
pub fn resolvent_grid(a: &CMat, gbox: GridBox, resolution: usize) -> Result<PseudospectrumGrid> {
    if resolution < 16 {
        return Err(Error::InvalidInput("resolution must be >= 16".into()));
    }
    let n = a.nrows();
    let (nx, ny) = (resolution, resolution);
    let values = par::map_indexed(nx * ny, |idx| {
        let (ix, iy) = (idx % nx, idx / nx);
        let x = gbox.re_min + (gbox.re_max - gbox.re_min) * ix as f64 / (nx - 1) as f64;
        let y = gbox.im_min + (gbox.im_max - gbox.im_min) * iy as f64 / (ny - 1) as f64;
        let shifted = CMat::identity(n, n) * cplx(x, y) - a;
        match shifted.try_svd(false, false, f64::EPSILON, 100_000) {
            Some(dec) => dec.singular_values.iter().cloned().fold(f64::INFINITY, f64::min),
            None => f64::NAN,
        }
    });
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::NoConvergence);
    }
    Ok(PseudospectrumGrid {
        gbox,
        nx,
        ny,
        values,
    })
}

/// Level set of the resolvent grid at one epsilon: closed polylines and the
/// total contour length L_eps.
#[derive(Debug, Clone)]
pub struct EpsilonContour {
    pub epsilon: f64,
    /// Closed point sequences; first point repeated at the end.
    pub polylines: Vec<Vec<(f64, f64)>>,
    pub total_length: f64,
}

impl EpsilonContour {
    /// Whether z is enclosed by any of the contour polylines.
    pub fn encloses(&self, z: C64) -> bool {
        self.polylines
            .iter()
            .any(|poly| winding_number(poly, (z.re, z.im)) != 0)
    }

    /// All contour vertices.
    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        self.polylines
            .iter()
            .flat_map(|poly| poly.iter().map(|&(x, y)| cplx(x, y)))
    }
}

pub fn winding_number(poly: &[(f64, f64)], p: (f64, f64)) -> i32 {
    let mut wn = 0i32;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        if a.1 <= p.1 {
            if b.1 > p.1 && cross(a, b, p) > 0.0 {
                wn += 1;
            }
        } else if b.1 <= p.1 && cross(a, b, p) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn cross(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    (b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1)
}

// Grid edge between two nodes, canonical node order. Interpolated crossing
// points are computed once per edge so shared cell boundaries stitch exactly.
type EdgeId = (usize, usize);

/// Marching squares with linear interpolation at level `eps`. Errors when the
/// level is outside the grid value range or when a contour exits the box.
pub fn epsilon_contour(grid: &PseudospectrumGrid, eps: f64) -> Result<EpsilonContour> {
    let (min_v, max_v) = (grid.min_value(), grid.max_value());
    if !(eps > min_v && eps < max_v) {
        return Err(Error::LevelOutOfRange {
            level: eps,
            min: min_v,
            max: max_v,
        });
    }
    let (nx, ny) = (grid.nx, grid.ny);
    let node = |ix: usize, iy: usize| iy * nx + ix;
    let inside = |id: usize| grid.values[id] < eps;
    let coords = |id: usize| (grid.x(id % nx), grid.y(id / nx));

    let mut edge_points: HashMap<EdgeId, (f64, f64)> = HashMap::new();
    let mut adjacency: HashMap<EdgeId, Vec<EdgeId>> = HashMap::new();
    let mut interp = |n0: usize, n1: usize| -> EdgeId {
        let key = if n0 < n1 { (n0, n1) } else { (n1, n0) };
        edge_points.entry(key).or_insert_with(|| {
            let (v0, v1) = (grid.values[key.0], grid.values[key.1]);
            let t = (eps - v0) / (v1 - v0);
            let (x0, y0) = coords(key.0);
            let (x1, y1) = coords(key.1);
            (x0 + t * (x1 - x0), y0 + t * (y1 - y0))
        });
        key
    };
    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();

    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let n00 = node(ix, iy);
            let n10 = node(ix + 1, iy);
            let n11 = node(ix + 1, iy + 1);
            let n01 = node(ix, iy + 1);
            let (b0, b1, b2, b3) = (inside(n00), inside(n10), inside(n11), inside(n01));
            let mut crossed: Vec<(usize, usize)> = Vec::with_capacity(4);
            if b0 != b1 {
                crossed.push((n00, n10)); // bottom
            }
            if b1 != b2 {
                crossed.push((n10, n11)); // right
            }
            if b3 != b2 {
                crossed.push((n01, n11)); // top
            }
            if b0 != b3 {
                crossed.push((n00, n01)); // left
            }
            match crossed.len() {
                0 => {}
                2 => {
                    let e0 = interp(crossed[0].0, crossed[0].1);
                    let e1 = interp(crossed[1].0, crossed[1].1);
                    segments.push((e0, e1));
                }
                4 => {
                    // saddle: pair the four crossings by the cell-center value
                    let center = 0.25
                        * (grid.values[n00] + grid.values[n10] + grid.values[n11] + grid.values[n01]);
                    let center_inside = center < eps;
                    let bottom = interp(n00, n10);
                    let right = interp(n10, n11);
                    let top = interp(n01, n11);
                    let left = interp(n00, n01);
                    let diag00 = b0; // true when n00/n11 are the inside pair
                    if diag00 == center_inside {
                        segments.push((bottom, right));
                        segments.push((left, top));
                    } else {
                        segments.push((bottom, left));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!("marching squares cell with odd crossing count"),
            }
        }
    }

    for &(a, b) in &segments {
        adjacency.entry(a).or_default().push(b);
        adjacency.entry(b).or_default().push(a);
    }
    if adjacency.values().any(|nbrs| nbrs.len() != 2) {
        return Err(Error::OpenContour { level: eps });
    }

    let mut visited: HashMap<EdgeId, bool> = HashMap::new();
    let mut polylines = Vec::new();
    let mut total_length = 0.0;
    let mut starts: Vec<EdgeId> = adjacency.keys().cloned().collect();
    starts.sort_unstable();
    for start in starts {
        if *visited.get(&start).unwrap_or(&false) {
            continue;
        }
        let mut cycle = vec![start];
        visited.insert(start, true);
        let mut prev = start;
        let mut current = adjacency[&start][0];
        while current != start {
            visited.insert(current, true);
            cycle.push(current);
            let nbrs = &adjacency[&current];
            let next = if nbrs[0] == prev { nbrs[1] } else { nbrs[0] };
            prev = current;
            current = next;
        }
        let mut pts: Vec<(f64, f64)> = cycle.iter().map(|e| edge_points[e]).collect();
        pts.push(pts[0]);
        for w in pts.windows(2) {
            total_length += ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt();
        }
        polylines.push(pts);
    }

    Ok(EpsilonContour {
        epsilon: eps,
        polylines,
        total_length,
    })
}
