//! Criticality and sub-index of a finite set of unit directions.
//!
//! A point `x0` is critical for `dist(K, .)` when no tangent direction makes
//! an angle greater than `pi/2` with every initial direction of a minimal
//! geodesic to `K` (the up-set). By separating-hyperplane duality this holds
//! exactly when the origin lies in the convex hull of the up-set.
//!
//! For a critical up-set `U`, the polar region `A(U)` is the set of unit
//! vectors at angle `>= pi/2` from all of `U`, i.e. the unit slice of the
//! polar cone `C = {v : v . u <= 0 for all u in U}`. Write `L = span(U)^perp`
//! and `C' = C ∩ span(U)`; then `C = L + C'` and
//!
//! * `C = {0}`            gives an empty polar region (sub-index `n`);
//! * `C' = {0}, L != {0}` gives the great subsphere `S(L)` (sub-index
//!   `n - dim L`);
//! * `C' != {0}`          gives a region with boundary (sub-index infinite).

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{invalid, GeometryError, Result};
use crate::linalg::{apply, rank, row_space_basis};
use crate::lp::{LinearProgram, Relation, Sense, FEASIBILITY_TOL};
use crate::sampling::sphere_points;
use crate::vector::{angle_between, dot, norm, normalized, scale};

/// Directions closer than this angle are merged on construction.
pub const DEDUP_ANGLE: f64 = 1e-8;

/// Separation margins at or below this value certify criticality.
pub const LP_FEASIBILITY_MARGIN: f64 = 1e-9;

/// Separation margins in `(LP_FEASIBILITY_MARGIN, AMBIGUITY_BAND)` are
/// reported as ambiguous instead of being classified.
pub const AMBIGUITY_BAND: f64 = 1e-7;

/// Unit-norm slack used when no explicit tolerance is supplied.
pub const DEFAULT_UNIT_TOL: f64 = 1e-9;

/// Unit-norm slack accepted by [`angle`] and friends for query vectors.
const QUERY_UNIT_TOL: f64 = 1e-6;

/// A finite, nonempty, deduplicated set of unit vectors in `R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDirectionSet", into = "RawDirectionSet")]
pub struct DirectionSet {
    dim: usize,
    directions: Vec<Vec<f64>>,
    tol: f64,
}

/// Wire form: `{"dim": n, "directions": [[..], ..], "tol": f}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawDirectionSet {
    pub dim: usize,
    pub directions: Vec<Vec<f64>>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_UNIT_TOL
}

impl TryFrom<RawDirectionSet> for DirectionSet {
    type Error = GeometryError;

    fn try_from(raw: RawDirectionSet) -> Result<Self> {
        DirectionSet::new(raw.dim, raw.directions, raw.tol)
    }
}

impl From<DirectionSet> for RawDirectionSet {
    fn from(set: DirectionSet) -> Self {
        RawDirectionSet {
            dim: set.dim,
            directions: set.directions,
            tol: set.tol,
        }
    }
}

impl DirectionSet {
    /// Validates unit length within `tol`, renormalizes, and merges
    /// directions closer than [`DEDUP_ANGLE`].
    pub fn new(dim: usize, directions: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        if !(tol >= 0.0 && tol.is_finite()) {
            return invalid(format!("tolerance must be a nonnegative real, got {tol}"));
        }
        if directions.is_empty() {
            return invalid("direction set is empty");
        }
        let mut kept: Vec<Vec<f64>> = Vec::with_capacity(directions.len());
        for (i, d) in directions.into_iter().enumerate() {
            if d.len() != dim {
                return invalid(format!(
                    "direction {i} has {} entries, expected {dim}",
                    d.len()
                ));
            }
            if d.iter().any(|x| !x.is_finite()) {
                return invalid(format!("direction {i} has a non-finite entry"));
            }
            let len = norm(&d);
            if (len - 1.0).abs() > tol.max(f64::EPSILON * 4.0) {
                return invalid(format!("direction {i} has length {len}, not unit within {tol}"));
            }
            let unit = scale(&d, 1.0 / len);
            if !kept.iter().any(|k| angle_between(k, &unit) < DEDUP_ANGLE) {
                kept.push(unit);
            }
        }
        Ok(Self {
            dim,
            directions: kept,
            tol,
        })
    }

    /// Normalizes every nonzero input before validation.
    pub fn from_unnormalized(dim: usize, vectors: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let units = vectors
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                normalized(&v).ok_or_else(|| {
                    GeometryError::InvalidArgument(format!("vector {i} is zero"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, units, tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Image of the set under a linear map (expected orthogonal).
    pub fn transformed(&self, q: &nalgebra::DMatrix<f64>) -> Result<Self> {
        if q.nrows() != self.dim || q.ncols() != self.dim {
            return invalid("matrix shape does not match dimension");
        }
        let dirs = self.directions.iter().map(|d| apply(q, d)).collect();
        Self::from_unnormalized(self.dim, dirs, self.tol.max(1e-9))
    }

    /// A copy with one more direction.
    pub fn with_direction(&self, v: Vec<f64>) -> Result<Self> {
        let mut dirs = self.directions.clone();
        dirs.push(v);
        Self::new(self.dim, dirs, self.tol)
    }
}

/// Shape of the polar region of a critical direction set.
#[derive(Debug, Clone, PartialEq)]
pub enum PolarRegion {
    Empty,
    /// A boundaryless great subsphere; `span_dim` is the dimension of its
    /// linear span.
    GreatSubsphere { span_dim: usize },
    /// A region with boundary, contained in the closed `pi/2`-ball around
    /// `soul`.
    WithBoundary { soul: Vec<f64> },
}

impl PolarRegion {
    pub fn variant_name(&self) -> &'static str {
        match self {
            PolarRegion::Empty => "empty",
            PolarRegion::GreatSubsphere { .. } => "great_subsphere",
            PolarRegion::WithBoundary { .. } => "with_boundary",
        }
    }

    pub fn span_dim(&self) -> Option<usize> {
        match self {
            PolarRegion::GreatSubsphere { span_dim } => Some(*span_dim),
            _ => None,
        }
    }

    pub fn soul(&self) -> Option<&[f64]> {
        match self {
            PolarRegion::WithBoundary { soul } => Some(soul),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubIndex {
    Finite(usize),
    Infinity,
}

impl fmt::Display for SubIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubIndex::Finite(k) => write!(f, "{k}"),
            SubIndex::Infinity => write!(f, "inf"),
        }
    }
}

/// Serialized as an integer, or the string `"inf"`.
impl Serialize for SubIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SubIndex::Finite(k) => s.serialize_u64(*k as u64),
            SubIndex::Infinity => s.serialize_str("inf"),
        }
    }
}

fn check_query(v: &[f64], dim: Option<usize>) -> Result<()> {
    if let Some(d) = dim {
        if v.len() != d {
            return invalid(format!("vector has {} entries, expected {d}", v.len()));
        }
    }
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return invalid("zero or non-finite vector");
    }
    if (n - 1.0).abs() > QUERY_UNIT_TOL {
        return invalid(format!("vector of length {n} is not a unit vector"));
    }
    Ok(())
}

/// Angle in `[0, pi]` between two unit vectors.
pub fn angle(v: &[f64], w: &[f64]) -> Result<f64> {
    if v.len() != w.len() {
        return invalid("vectors have different lengths");
    }
    check_query(v, None)?;
    check_query(w, None)?;
    Ok(dot(v, w).clamp(-1.0, 1.0).acos())
}

/// `min_{u in U} angle(v, u)`.
pub fn min_angle_to_set(v: &[f64], set: &DirectionSet) -> Result<f64> {
    check_query(v, Some(set.dim))?;
    Ok(min_angle_unchecked(v, set.directions()))
}

pub(crate) fn min_angle_unchecked(v: &[f64], dirs: &[Vec<f64>]) -> f64 {
    dirs.iter()
        .map(|u| angle_between(v, u))
        .fold(f64::INFINITY, f64::min)
}

/// Whether `v` lies in the open `theta`-neighborhood of the set. The
/// `pi`-neighborhood is taken to be the whole sphere.
pub fn theta_neighborhood_contains(v: &[f64], set: &DirectionSet, theta: f64) -> Result<bool> {
    let pi = std::f64::consts::PI;
    if !(theta > 0.0 && theta <= pi) {
        return invalid(format!("theta = {theta} must lie in (0, pi]"));
    }
    let a = min_angle_to_set(v, set)?;
    Ok(theta == pi || a < theta)
}

/// Outcome of the criticality LPs.
#[derive(Debug, Clone, PartialEq)]
pub struct Criticality {
    pub critical: bool,
    /// Optimal `s` of `max s : u_i . v + s <= 0, |v|_inf <= 1`. Zero exactly
    /// when the set is critical.
    pub separation_margin: f64,
    /// Convex weights with `sum w_i u_i = 0` (critical sets only).
    pub weights: Option<Vec<f64>>,
    /// Unit vector at angle `> pi/2` from every direction (regular sets only).
    pub escape_direction: Option<Vec<f64>>,
}

fn separation_lp(set: &DirectionSet) -> Result<(f64, Vec<f64>)> {
    let n = set.dim;
    // variables: v_0..v_{n-1} (free), s >= 0
    let mut lp = LinearProgram::new(n + 1, Sense::Maximize);
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    lp.set_objective(&obj);
    for j in 0..n {
        lp.set_free(j);
        let mut row = vec![0.0; n + 1];
        row[j] = 1.0;
        lp.add_constraint(&row, Relation::Le, 1.0);
        lp.add_constraint(&row, Relation::Ge, -1.0);
    }
    for u in set.directions() {
        let mut row = u.clone();
        row.push(1.0);
        lp.add_constraint(&row, Relation::Le, 0.0);
    }
    let sol = lp.solve()?;
    let v = sol.x[..n].to_vec();
    Ok((sol.objective, v))
}

fn convex_weights(set: &DirectionSet) -> Option<Vec<f64>> {
    let m = set.len();
    let mut lp = LinearProgram::new(m, Sense::Minimize);
    lp.add_constraint(&vec![1.0; m], Relation::Eq, 1.0);
    for j in 0..set.dim {
        let row: Vec<f64> = set.directions().iter().map(|u| u[j]).collect();
        lp.add_constraint(&row, Relation::Eq, 0.0);
    }
    lp.solve().ok().map(|s| s.x)
}

/// Decides criticality with a separation LP and, for critical sets, a
/// convex-combination certificate. Margins inside the ambiguity band, or a
/// disagreement between the two LPs, produce
/// [`GeometryError::AmbiguousClassification`].
pub fn criticality(set: &DirectionSet) -> Result<Criticality> {
    let (margin, v) = separation_lp(set)?;
    if margin >= AMBIGUITY_BAND {
        let escape = normalized(&v).ok_or_else(|| {
            GeometryError::InternalInconsistency("separating vector vanished".into())
        })?;
        return Ok(Criticality {
            critical: false,
            separation_margin: margin,
            weights: None,
            escape_direction: Some(escape),
        });
    }
    if margin > LP_FEASIBILITY_MARGIN {
        return Err(GeometryError::AmbiguousClassification { margin });
    }
    match convex_weights(set) {
        Some(w) => Ok(Criticality {
            critical: true,
            separation_margin: margin,
            weights: Some(w),
            escape_direction: None,
        }),
        None => Err(GeometryError::AmbiguousClassification { margin }),
    }
}

pub fn is_critical(set: &DirectionSet) -> Result<bool> {
    Ok(criticality(set)?.critical)
}

/// Whether `C' = C ∩ span(U)` contains a nonzero vector. `span_basis` is an
/// orthonormal basis of `span(U)`; since `C'` is pointed, a nonzero member
/// can be normalized by `sum_i -(u_i . v) = 1`.
fn restricted_cone_is_trivial(set: &DirectionSet, span_basis: &[Vec<f64>]) -> Result<bool> {
    let r = span_basis.len();
    if r == 0 {
        return Ok(true);
    }
    let coords: Vec<Vec<f64>> = set
        .directions()
        .iter()
        .map(|u| span_basis.iter().map(|b| dot(b, u)).collect())
        .collect();
    let mut lp = LinearProgram::new(r, Sense::Minimize);
    for k in 0..r {
        lp.set_free(k);
    }
    let mut sum = vec![0.0; r];
    for c in &coords {
        lp.add_constraint(c, Relation::Le, 0.0);
        sum.iter_mut().zip(c).for_each(|(s, x)| *s -= x);
    }
    lp.add_constraint(&sum, Relation::Eq, 1.0);
    match lp.solve() {
        Ok(_) => Ok(false),
        Err(GeometryError::Infeasible) => Ok(true),
        Err(e) => Err(e),
    }
}

/// A unit vector of `C ∩ (-cone U)`: `w = -sum l_i u_i` with `l >= 0`,
/// `w . u_j <= 0` for all `j`, normalized through `sum_j -(w . u_j) = 1`.
/// Any such `w` is a soul: it lies in `A(U)` and pairs nonnegatively with
/// all of `C`, the dual cone of `-cone U`.
fn soul_vector(set: &DirectionSet) -> Result<Vec<f64>> {
    let dirs = set.directions();
    let m = dirs.len();
    let gram: Vec<Vec<f64>> = dirs
        .iter()
        .map(|a| dirs.iter().map(|b| dot(a, b)).collect())
        .collect();
    let mut lp = LinearProgram::new(m, Sense::Minimize);
    let mut total = vec![0.0; m];
    for row in &gram {
        // (G l)_j >= 0  <=>  w . u_j <= 0
        lp.add_constraint(row, Relation::Ge, 0.0);
        total.iter_mut().zip(row).for_each(|(t, g)| *t += g);
    }
    lp.add_constraint(&total, Relation::Eq, 1.0);
    let sol = match lp.solve() {
        Ok(s) => s,
        Err(GeometryError::Infeasible) => {
            return Err(GeometryError::InternalInconsistency(
                "soul LP infeasible: direction set is not a critical net with boundary".into(),
            ))
        }
        Err(e) => return Err(e),
    };
    let mut w = vec![0.0; set.dim];
    for (l, u) in sol.x.iter().zip(dirs) {
        w.iter_mut().zip(u).for_each(|(acc, x)| *acc -= l * x);
    }
    let w = normalized(&w)
        .ok_or_else(|| GeometryError::InternalInconsistency("soul vector vanished".into()))?;
    let worst = dirs.iter().map(|u| dot(&w, u)).fold(f64::NEG_INFINITY, f64::max);
    if worst > FEASIBILITY_TOL * 10.0 {
        return Err(GeometryError::InternalInconsistency(format!(
            "soul leaves the polar cone by {worst:e}"
        )));
    }
    Ok(w)
}

/// Classifies the polar region of a critical direction set.
pub fn classify_polar_region(set: &DirectionSet) -> Result<PolarRegion> {
    if !is_critical(set)? {
        return Err(GeometryError::NotCritical);
    }
    let span = row_space_basis(set.directions(), set.dim);
    if restricted_cone_is_trivial(set, &span)? {
        let r = span.len();
        if r == set.dim {
            Ok(PolarRegion::Empty)
        } else {
            Ok(PolarRegion::GreatSubsphere {
                span_dim: set.dim - r,
            })
        }
    } else {
        Ok(PolarRegion::WithBoundary {
            soul: soul_vector(set)?,
        })
    }
}

pub fn sub_index_of_region(region: &PolarRegion, dim: usize) -> SubIndex {
    match region {
        PolarRegion::Empty => SubIndex::Finite(dim),
        PolarRegion::GreatSubsphere { span_dim } => SubIndex::Finite(dim - span_dim),
        PolarRegion::WithBoundary { .. } => SubIndex::Infinity,
    }
}

pub fn sub_index(set: &DirectionSet) -> Result<SubIndex> {
    Ok(sub_index_of_region(&classify_polar_region(set)?, set.dim))
}

/// Machine-readable classification of a direction set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub critical: bool,
    pub variant: Option<&'static str>,
    pub span_dim: Option<usize>,
    pub soul: Option<Vec<f64>>,
    pub sub_index: Option<SubIndex>,
}

/// Full classification; regular sets get `null` variant and sub-index.
pub fn classify(set: &DirectionSet) -> Result<Classification> {
    if !is_critical(set)? {
        return Ok(Classification {
            critical: false,
            variant: None,
            span_dim: None,
            soul: None,
            sub_index: None,
        });
    }
    let region = classify_polar_region(set)?;
    Ok(Classification {
        critical: true,
        variant: Some(region.variant_name()),
        span_dim: region.span_dim(),
        soul: region.soul().map(|s| s.to_vec()),
        sub_index: Some(sub_index_of_region(&region, set.dim)),
    })
}

/// Rank of the span of the directions.
pub fn span_rank(set: &DirectionSet) -> usize {
    rank(set.directions(), set.dim)
}

/// Brute-force classification from a near-uniform sample of the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub critical: bool,
    /// Samples at angle `>= pi/2 - margin` from every direction.
    pub polar_samples: Vec<Vec<f64>>,
}

/// Sampling oracle used to cross-validate the LP path. A set is judged
/// critical when no sample lies farther than `pi/2 + margin` from all
/// directions.
pub fn sampling_oracle_classify(set: &DirectionSet, samples: usize, margin: f64) -> OracleResult {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut critical = true;
    let mut polar = Vec::new();
    for v in sphere_points(set.dim, samples) {
        let a = min_angle_unchecked(&v, set.directions());
        if a > half_pi + margin {
            critical = false;
        }
        if a >= half_pi - margin {
            polar.push(v);
        }
    }
    OracleResult {
        critical,
        polar_samples: polar,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn set(dim: usize, dirs: &[&[f64]]) -> DirectionSet {
        DirectionSet::new(dim, dirs.iter().map(|d| d.to_vec()).collect(), 1e-9).unwrap()
    }

    fn diagonals() -> DirectionSet {
        let h = FRAC_1_SQRT_2;
        set(2, &[&[h, h], &[h, -h], &[-h, h], &[-h, -h]])
    }

    #[test]
    fn angle_examples() {
        assert_eq!(angle(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!((angle(&[1.0, 0.0], &[-1.0, 0.0]).unwrap() - PI).abs() < 1e-15);
        assert!((angle(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(
            angle(&[0.0, 0.0], &[1.0, 0.0]),
            Err(GeometryError::InvalidArgument(_))
        ));
    }

    #[test]
    fn min_angle_examples() {
        let u = set(2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(min_angle_to_set(&[1.0, 0.0], &u).unwrap(), 0.0);
        assert!((min_angle_to_set(&[-1.0, 0.0], &u).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let e1 = set(2, &[&[1.0, 0.0]]);
        let d = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        assert!((min_angle_to_set(&d, &e1).unwrap() - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn theta_neighborhood_examples() {
        let e1 = set(2, &[&[1.0, 0.0]]);
        assert!(theta_neighborhood_contains(&[0.0, 1.0], &e1, FRAC_PI_2 + 0.01).unwrap());
        assert!(!theta_neighborhood_contains(&[0.0, 1.0], &e1, FRAC_PI_2).unwrap());
        assert!(theta_neighborhood_contains(&[-1.0, 0.0], &e1, PI).unwrap());
        assert!(theta_neighborhood_contains(&[0.0, 1.0], &e1, 0.0).is_err());
    }

    #[test]
    fn construction_validates_and_dedups() {
        assert!(DirectionSet::new(2, vec![], 1e-9).is_err());
        assert!(DirectionSet::new(2, vec![vec![2.0, 0.0]], 1e-9).is_err());
        assert!(DirectionSet::new(2, vec![vec![1.0]], 1e-9).is_err());
        let s = DirectionSet::new(2, vec![vec![1.0, 0.0], vec![1.0, 1e-10]], 1e-9).unwrap();
        assert_eq!(s.len(), 1);
        let s = DirectionSet::new(2, vec![vec![1.0, 0.0], vec![1.0, 1e-6]], 1e-9).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn criticality_examples() {
        assert!(!is_critical(&set(2, &[&[1.0, 0.0]])).unwrap());
        assert!(is_critical(&set(2, &[&[1.0, 0.0], &[-1.0, 0.0]])).unwrap());
        assert!(is_critical(&diagonals()).unwrap());
    }

    #[test]
    fn regular_sets_carry_an_escape_direction() {
        let u = set(3, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let c = criticality(&u).unwrap();
        assert!(!c.critical);
        let v = c.escape_direction.unwrap();
        for d in u.directions() {
            assert!(angle_between(&v, d) > FRAC_PI_2);
        }
    }

    #[test]
    fn critical_sets_carry_convex_weights() {
        let c = criticality(&diagonals()).unwrap();
        let w = c.weights.unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x >= -1e-12));
    }

    #[test]
    fn near_degenerate_margin_is_ambiguous() {
        // Two directions just past antipodal: regular, with separation margin
        // of order 1e-8, inside the ambiguity band.
        let d = 2e-8;
        let u = DirectionSet::from_unnormalized(
            2,
            vec![vec![1.0, d], vec![-1.0, d]],
            1e-9,
        )
        .unwrap();
        assert!(matches!(
            criticality(&u),
            Err(GeometryError::AmbiguousClassification { .. })
        ));
    }

    #[test]
    fn polar_region_examples() {
        let pair = set(3, &[&[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0]]);
        assert_eq!(
            classify_polar_region(&pair).unwrap(),
            PolarRegion::GreatSubsphere { span_dim: 2 }
        );

        let tee = set(3, &[&[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        match classify_polar_region(&tee).unwrap() {
            PolarRegion::WithBoundary { soul } => {
                assert!((soul[0]).abs() < 1e-12);
                assert!((soul[1] + 1.0).abs() < 1e-12);
                assert!((soul[2]).abs() < 1e-12);
            }
            other => panic!("expected boundary, got {other:?}"),
        }

        assert_eq!(classify_polar_region(&diagonals()).unwrap(), PolarRegion::Empty);
        assert_eq!(
            classify_polar_region(&set(2, &[&[1.0, 0.0]])),
            Err(GeometryError::NotCritical)
        );
    }

    #[test]
    fn sub_index_examples() {
        assert_eq!(sub_index(&diagonals()).unwrap(), SubIndex::Finite(2));
        assert_eq!(
            sub_index(&set(2, &[&[1.0, 0.0], &[-1.0, 0.0]])).unwrap(),
            SubIndex::Finite(1)
        );
        let tee = set(3, &[&[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(sub_index(&tee).unwrap(), SubIndex::Infinity);
        assert_eq!(
            sub_index(&set(1, &[&[1.0], &[-1.0]])).unwrap(),
            SubIndex::Finite(1)
        );
    }

    #[test]
    fn oracle_examples() {
        let e1 = set(3, &[&[1.0, 0.0, 0.0]]);
        let r = sampling_oracle_classify(&e1, 10_000, 1e-2);
        assert!(!r.critical);
        // the closed hemisphere away from e1, padded by the margin
        let frac = r.polar_samples.len() as f64 / 10_000.0;
        assert!((frac - 0.5).abs() < 0.01, "fraction {frac}");
        assert!(r.polar_samples.iter().all(|v| v[0] <= (1e-2f64).sin() + 1e-12));

        let pair = set(3, &[&[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0]]);
        let r = sampling_oracle_classify(&pair, 10_000, 1e-2);
        assert!(r.critical);
        assert!(!r.polar_samples.is_empty());
        assert!(r.polar_samples.iter().all(|v| v[0].abs() <= (1e-2f64).sin() + 1e-12));

        let r = sampling_oracle_classify(&diagonals(), 10_000, 1e-2);
        assert!(r.critical);
        assert!(r.polar_samples.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"dim": 3, "directions": [[1,0,0],[-1,0,0]], "tol": 1e-9}"#;
        let s: DirectionSet = serde_json::from_str(text).unwrap();
        assert_eq!(s.len(), 2);
        let back: DirectionSet = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"dim": 2, "directions": [], "tol": 1e-9}"#;
        assert!(serde_json::from_str::<DirectionSet>(bad).is_err());
    }

    #[test]
    fn classification_json_shape() {
        let pair = set(3, &[&[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0]]);
        let v = serde_json::to_value(classify(&pair).unwrap()).unwrap();
        assert_eq!(v["critical"], true);
        assert_eq!(v["variant"], "great_subsphere");
        assert_eq!(v["span_dim"], 2);
        assert_eq!(v["soul"], serde_json::Value::Null);
        assert_eq!(v["sub_index"], 1);
        let tee = set(3, &[&[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let v = serde_json::to_value(classify(&tee).unwrap()).unwrap();
        assert_eq!(v["sub_index"], "inf");
    }
}
