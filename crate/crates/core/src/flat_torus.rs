//! Distance functions on the flat torus `R^n / Z^n`.
//!
//! Minimal geodesics from `x` to `K` lift to straight segments from `x` to
//! the lattice translates `K + m` that realize the minimum distance, so the
//! up-set at `x` is read off by enumerating a few lattice shells.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, GeometryError, Result};
use crate::spherical_convexity::{
    classify_polar_region, criticality, min_angle_unchecked, sub_index_of_region, DirectionSet,
    SubIndex,
};
use crate::union_find::UnionFind;
use crate::vector::{dot, norm, normalized};

/// Default minimality slack on squared distances when extracting up-sets.
pub const DEFAULT_MINIMALITY_TOL: f64 = 1e-9;

/// Largest grid accepted by [`TorusDistanceField::sublevel_connectivity`].
const MAX_GRID_VERTICES: usize = 50_000_000;

fn reduce(c: f64) -> f64 {
    let r = c.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A point of the torus, stored with coordinates in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return invalid("torus point needs at least one coordinate");
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return invalid("torus point has a non-finite coordinate");
        }
        Ok(Self {
            coords: coords.into_iter().map(reduce).collect(),
        })
    }

    /// The point `(1/2, ..., 1/2)`.
    pub fn center(dim: usize) -> Self {
        Self {
            coords: vec![0.5; dim],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The point reached from `self` by the straight line `t * v`.
    pub fn translated(&self, v: &[f64], t: f64) -> Self {
        Self {
            coords: self
                .coords
                .iter()
                .zip(v)
                .map(|(c, d)| reduce(c + t * d))
                .collect(),
        }
    }
}

/// Distance to a finite base set `K` on the unit flat torus.
#[derive(Debug, Clone)]
pub struct TorusDistanceField {
    dim: usize,
    base: Vec<TorusPoint>,
    enumeration_radius: usize,
    offsets: Vec<Vec<f64>>,
}

/// A classified critical point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointRecord {
    pub point: TorusPoint,
    pub level: f64,
    pub directions: DirectionSet,
    pub sub_index: SubIndex,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointClass {
    Regular,
    Critical(CriticalPointRecord),
}

/// Outcome of the grid connectivity check across a level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivityReport {
    pub dim: usize,
    pub level: f64,
    pub eps: f64,
    pub grid: usize,
    /// Components of `{dist_K < level + eps}`.
    pub outer_components: usize,
    /// Components of `{dist_K < level - eps}`.
    pub inner_components: usize,
    /// Outer components containing a vertex of the inner sublevel.
    pub outer_components_meeting_inner: usize,
    pub all_meet_inner: bool,
}

fn lattice_offsets(dim: usize, radius: usize) -> Vec<Vec<f64>> {
    let r = radius as i64;
    let side = (2 * r + 1) as usize;
    let total = side.pow(dim as u32);
    (0..total)
        .map(|mut k| {
            (0..dim)
                .map(|_| {
                    let digit = (k % side) as i64 - r;
                    k /= side;
                    digit as f64
                })
                .collect()
        })
        .collect()
}

impl TorusDistanceField {
    /// Unit torus with `K = (1/2, ..., 1/2)` and one lattice shell.
    pub fn centered(dim: usize) -> Result<Self> {
        Self::new(dim, vec![TorusPoint::center(dim)], 1)
    }

    pub fn new(dim: usize, base: Vec<TorusPoint>, enumeration_radius: usize) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        if base.is_empty() {
            return invalid("base set K is empty");
        }
        if base.iter().any(|p| p.dim() != dim) {
            return invalid("base point dimension mismatch");
        }
        if enumeration_radius == 0 {
            return invalid("enumeration radius must be at least 1");
        }
        Ok(Self {
            dim,
            base,
            enumeration_radius,
            offsets: lattice_offsets(dim, enumeration_radius),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base(&self) -> &[TorusPoint] {
        &self.base
    }

    pub fn enumeration_radius(&self) -> usize {
        self.enumeration_radius
    }

    fn check_point(&self, x: &TorusPoint) -> Result<()> {
        if x.dim() != self.dim {
            return invalid(format!(
                "point has dimension {}, field has {}",
                x.dim(),
                self.dim
            ));
        }
        Ok(())
    }

    /// Squared lengths and vectors `K + m - x` over all lifts.
    fn lifts<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = (f64, Vec<f64>)> + 'a {
        self.base.iter().flat_map(move |k| {
            self.offsets.iter().map(move |m| {
                let v: Vec<f64> = (0..self.dim)
                    .map(|i| k.coords[i] + m[i] - x[i])
                    .collect();
                (dot(&v, &v), v)
            })
        })
    }

    fn dist_sq(&self, x: &[f64]) -> f64 {
        self.lifts(x).map(|(d, _)| d).fold(f64::INFINITY, f64::min)
    }

    /// `dist(K, x)`.
    pub fn dist(&self, x: &TorusPoint) -> f64 {
        self.dist_sq(&x.coords).sqrt()
    }

    /// Unit initial vectors of the minimal geodesics from `x` to `K`: all
    /// lifts within `tau` of the minimal squared distance.
    pub fn up_set(&self, x: &TorusPoint, tau: f64) -> Result<DirectionSet> {
        self.check_point(x)?;
        let best = self.dist_sq(&x.coords);
        if best.sqrt() < 1e-12 {
            return invalid("up-set is undefined at a point of K");
        }
        let dirs: Vec<Vec<f64>> = self
            .lifts(&x.coords)
            .filter(|(d, _)| *d <= best + tau)
            .filter_map(|(_, v)| normalized(&v))
            .collect();
        DirectionSet::new(self.dim, dirs, 1e-9)
    }

    pub fn classify_point(&self, x: &TorusPoint) -> Result<PointClass> {
        self.classify_point_with_tol(x, DEFAULT_MINIMALITY_TOL)
    }

    pub fn classify_point_with_tol(&self, x: &TorusPoint, tau: f64) -> Result<PointClass> {
        let directions = self.up_set(x, tau)?;
        if !criticality(&directions)?.critical {
            return Ok(PointClass::Regular);
        }
        let region = classify_polar_region(&directions)?;
        Ok(PointClass::Critical(CriticalPointRecord {
            point: x.clone(),
            level: self.dist(x),
            sub_index: sub_index_of_region(&region, self.dim),
            directions,
        }))
    }

    fn require_centered(&self) -> Result<()> {
        let centered = self.base.len() == 1
            && self.base[0].coords.iter().all(|&c| (c - 0.5).abs() < 1e-12);
        if centered {
            Ok(())
        } else {
            Err(GeometryError::UnsupportedConfiguration(
                "critical-point enumeration needs K = (1/2, ..., 1/2)".into(),
            ))
        }
    }

    /// Centers of the boundary subcubes of `[0,1]^n`: every point with
    /// coordinates in `{0, 1/2}` other than `K`.
    fn subcube_centers(&self) -> Vec<TorusPoint> {
        (0..(1usize << self.dim))
            .filter(|&mask| mask != (1 << self.dim) - 1)
            .map(|mask| TorusPoint {
                coords: (0..self.dim)
                    .map(|i| if mask & (1 << i) != 0 { 0.5 } else { 0.0 })
                    .collect(),
            })
            .collect()
    }

    /// All critical points for the centered base. With `scan_resolution =
    /// Some(m)`, every vertex of the grid `{i/m}^n` is also classified and
    /// any critical vertex that is not a subcube center is an error.
    pub fn enumerate_critical_points(
        &self,
        scan_resolution: Option<usize>,
    ) -> Result<Vec<CriticalPointRecord>> {
        self.require_centered()?;
        let centers = self.subcube_centers();
        let mut records = Vec::with_capacity(centers.len());
        for c in &centers {
            match self.classify_point(c)? {
                PointClass::Critical(r) => records.push(r),
                PointClass::Regular => {
                    return Err(GeometryError::InternalInconsistency(format!(
                        "subcube center {:?} classified as regular",
                        c.coords
                    )))
                }
            }
        }
        if let Some(m) = scan_resolution {
            let extra = self.scan_for_critical_points(m)?;
            let unexpected: Vec<_> = extra
                .into_iter()
                .filter(|p| {
                    !centers.iter().any(|c| {
                        c.coords
                            .iter()
                            .zip(&p.coords)
                            .all(|(a, b)| (a - b).abs() < 1e-9)
                    })
                })
                .collect();
            if let Some(p) = unexpected.first() {
                return Err(GeometryError::InternalInconsistency(format!(
                    "grid scan found a critical point off the subcube centers: {:?}",
                    p.coords
                )));
            }
        }
        Ok(records)
    }

    /// Critical vertices of the grid `{i/m}^n` (excluding points of `K`).
    pub fn scan_for_critical_points(&self, m: usize) -> Result<Vec<TorusPoint>> {
        if m == 0 {
            return invalid("grid resolution must be positive");
        }
        let total = m
            .checked_pow(self.dim as u32)
            .filter(|&t| t <= MAX_GRID_VERTICES)
            .ok_or_else(|| GeometryError::InvalidArgument("scan grid too large".into()))?;
        let found: Vec<Option<TorusPoint>> = (0..total)
            .into_par_iter()
            .map(|idx| -> Result<Option<TorusPoint>> {
                let p = TorusPoint {
                    coords: grid_coords(idx, m, self.dim),
                };
                if self.dist(&p) < 1e-12 {
                    return Ok(None);
                }
                Ok(match self.classify_point(&p)? {
                    PointClass::Critical(_) => Some(p),
                    PointClass::Regular => None,
                })
            })
            .collect::<Result<_>>()?;
        Ok(found.into_iter().flatten().collect())
    }

    /// Histogram of sub-indices over all critical points.
    pub fn betti_table(&self, scan_resolution: Option<usize>) -> Result<BTreeMap<SubIndex, usize>> {
        let mut table = BTreeMap::new();
        for r in self.enumerate_critical_points(scan_resolution)? {
            *table.entry(r.sub_index).or_insert(0) += 1;
        }
        Ok(table)
    }

    /// Largest normalized residual `|dist(x + t v) - (c0 - t cos angle(v, U))| / t^2`
    /// over `steps` log-spaced values of `t` in `[t_min, t_max]`.
    pub fn first_order_check(
        &self,
        x: &TorusPoint,
        v: &[f64],
        t_min: f64,
        t_max: f64,
        steps: usize,
    ) -> Result<f64> {
        if v.len() != self.dim || (norm(v) - 1.0).abs() > 1e-9 {
            return invalid("direction must be a unit vector of matching dimension");
        }
        if !(t_min > 0.0 && t_max >= t_min) || steps == 0 {
            return invalid("need 0 < t_min <= t_max and at least one step");
        }
        let up = self.up_set(x, DEFAULT_MINIMALITY_TOL)?;
        let c0 = self.dist(x);
        let slope = min_angle_unchecked(v, up.directions()).cos();
        let ratio = if steps > 1 {
            (t_max / t_min).powf(1.0 / (steps - 1) as f64)
        } else {
            1.0
        };
        let mut worst: f64 = 0.0;
        let mut t = t_min;
        for _ in 0..steps {
            let d = self.dist(&x.translated(v, t));
            let residual = (d - (c0 - t * slope)).abs() / (t * t);
            worst = worst.max(residual);
            t *= ratio;
        }
        Ok(worst)
    }

    /// Connected components of the grid sublevel sets on either side of a
    /// level, with `2n`-neighbor periodic adjacency.
    pub fn sublevel_connectivity(&self, level: f64, eps: f64, m: usize) -> Result<ConnectivityReport> {
        if m < 2 {
            return invalid("grid resolution must be at least 2");
        }
        if !(eps > 2.0 * (self.dim as f64).sqrt() / m as f64) {
            return invalid(format!(
                "eps = {eps} does not exceed 2 sqrt(n)/m = {}; refine the grid",
                2.0 * (self.dim as f64).sqrt() / m as f64
            ));
        }
        let total = m
            .checked_pow(self.dim as u32)
            .filter(|&t| t <= MAX_GRID_VERTICES)
            .ok_or_else(|| GeometryError::InvalidArgument("grid too large".into()))?;
        let dists: Vec<f64> = (0..total)
            .into_par_iter()
            .map(|idx| self.dist_sq(&grid_coords(idx, m, self.dim)).sqrt())
            .collect();
        let outer: Vec<bool> = dists.iter().map(|&d| d < level + eps).collect();
        let inner: Vec<bool> = dists.iter().map(|&d| d < level - eps).collect();

        let count_components = |mask: &[bool]| -> (UnionFind, usize) {
            let mut uf = UnionFind::new(total);
            for idx in 0..total {
                if !mask[idx] {
                    continue;
                }
                let mut stride = 1;
                for _ in 0..self.dim {
                    let digit = (idx / stride) % m;
                    let next = if digit + 1 == m {
                        idx - digit * stride
                    } else {
                        idx + stride
                    };
                    if mask[next] {
                        uf.union(idx, next);
                    }
                    stride *= m;
                }
            }
            let mut roots = std::collections::BTreeSet::new();
            for (idx, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
                roots.insert(uf.find(idx));
            }
            (uf, roots.len())
        };

        let (mut outer_uf, outer_components) = count_components(&outer);
        let (_, inner_components) = count_components(&inner);
        let mut meeting = std::collections::BTreeSet::new();
        for (idx, _) in inner.iter().enumerate().filter(|(_, &m)| m) {
            meeting.insert(outer_uf.find(idx));
        }
        Ok(ConnectivityReport {
            dim: self.dim,
            level,
            eps,
            grid: m,
            outer_components,
            inner_components,
            outer_components_meeting_inner: meeting.len(),
            all_meet_inner: meeting.len() == outer_components,
        })
    }
}

fn grid_coords(mut idx: usize, m: usize, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let digit = idx % m;
            idx /= m;
            digit as f64 / m as f64
        })
        .collect()
}
