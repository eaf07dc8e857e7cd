//! Join coordinates on spheres, the linear flow `psi(y, t) = y - t e_1`,
//! and the cut-off flow `omega` that moves a ball off the origin into a
//! cone around `-e_1` while fixing everything outside `B(0, 2R)`.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::error::{invalid, GeometryError, Result};
use crate::linalg::householder_to_e1;
use crate::ode::{integrate, OdeOptions};
use crate::sampling::{covering_radius, random_in_ball, random_unit_vector, seeded_rng, sphere_points};
use crate::spherical_convexity::{classify_polar_region, min_angle_unchecked, DirectionSet, PolarRegion};
use crate::vector::{angle_between, axpy, basis, dot, norm, normalized, scale, sub};

/// `1 / sqrt(10)`: the exit distance per unit radius.
pub const EXIT_FRACTION: f64 = 0.316_227_766_016_837_94;

/// `sqrt(1 / 11)`: `K_0` is the cap `cos angle(z, e_1) <= -COS_CAP`.
pub const COS_CAP: f64 = 0.301_511_344_577_763_6;

/// A point `P = (X sin(theta), Y cos(theta))` of `S^{n-1} = S^p * S^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSplit {
    x: Vec<f64>,
    y: Vec<f64>,
    theta: f64,
}

impl SphereSplit {
    /// `x` and `y` must be unit vectors of lengths `p + 1` and `q + 1`.
    pub fn new(x: Vec<f64>, y: Vec<f64>, theta: f64) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return invalid("both factors need at least one coordinate");
        }
        for (name, v) in [("X", &x), ("Y", &y)] {
            if (norm(v) - 1.0).abs() > 1e-9 {
                return invalid(format!("{name} is not a unit vector"));
            }
        }
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return invalid(format!("theta = {theta} outside [0, pi/2]"));
        }
        if theta == 0.0 || theta == FRAC_PI_2 {
            return Err(GeometryError::SingularPoint(format!(
                "theta = {theta} puts P on one of the factor spheres"
            )));
        }
        Ok(Self { x, y, theta })
    }

    /// Splits a unit vector of `R^n` after its first `p + 1` coordinates.
    pub fn from_point(point: &[f64], p: usize) -> Result<Self> {
        if p + 1 >= point.len() {
            return invalid("need p + 1 < n");
        }
        if (norm(point) - 1.0).abs() > 1e-9 {
            return invalid("point is not on the unit sphere");
        }
        let (head, tail) = point.split_at(p + 1);
        let (sx, cy) = (norm(head), norm(tail));
        if sx < 1e-14 || cy < 1e-14 {
            return Err(GeometryError::SingularPoint(
                "point lies on one of the factor spheres".into(),
            ));
        }
        Ok(Self {
            x: scale(head, 1.0 / sx),
            y: scale(tail, 1.0 / cy),
            theta: sx.atan2(cy),
        })
    }

    pub fn n(&self) -> usize {
        self.x.len() + self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.len() - 1
    }

    pub fn q(&self) -> usize {
        self.y.len() - 1
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn point(&self) -> Vec<f64> {
        let (s, c) = self.theta.sin_cos();
        self.x
            .iter()
            .map(|v| v * s)
            .chain(self.y.iter().map(|v| v * c))
            .collect()
    }

    /// `X` viewed as a point of `S^{n-1}`.
    pub fn x_lifted(&self) -> Vec<f64> {
        self.x.iter().cloned().chain(std::iter::repeat_n(0.0, self.y.len())).collect()
    }
}

/// Returns `theta` and `g = (X cos(theta), -Y sin(theta))`.
///
/// `theta` is the spherical distance from `P` to `S^q` (so `pi/2 - theta`
/// is the distance to `S^p`) and `g` is its gradient: a unit tangent vector
/// at `P` pointing along the meridian towards `X`.
pub fn join_distance_and_gradient(s: &SphereSplit) -> (f64, Vec<f64>) {
    let (sn, cs) = s.theta.sin_cos();
    let g = s
        .x
        .iter()
        .map(|v| v * cs)
        .chain(s.y.iter().map(|v| -v * sn))
        .collect();
    (s.theta, g)
}

/// Point at arclength `s` along the great circle through `p` with unit
/// tangent `v`.
pub fn sphere_exp(p: &[f64], v: &[f64], s: f64) -> Vec<f64> {
    let (sn, cs) = s.sin_cos();
    p.iter().zip(v).map(|(a, b)| cs * a + sn * b).collect()
}

/// Angle at `p` between the minimal geodesics to `a` and to `b`.
pub fn hinge_angle(a: &[f64], p: &[f64], b: &[f64]) -> f64 {
    let ta = axpy(a, -dot(a, p), p);
    let tb = axpy(b, -dot(b, p), p);
    angle_between(&ta, &tb)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientLikeReport {
    pub samples: usize,
    /// Largest hinge angle `angle(X, P, Gamma)` over samples.
    pub max_hinge_angle: f64,
    /// Largest forward-difference derivative of `dist(U, .)` along `g`.
    pub max_directional_derivative: f64,
    /// Largest excess of that derivative over `-cos(hinge)`.
    pub max_derivative_excess: f64,
}

/// Samples points `P` off `S^p` and `S^q` and checks that moving along the
/// meridian towards `S^p` decreases the distance to `U`.
///
/// `U` must lie in `S^p` (the first `p + 1` coordinates) and `S^p` must be
/// covered by `B(U, alpha)`.
pub fn gradient_like_check<R: Rng + ?Sized>(
    set: &DirectionSet,
    p: usize,
    alpha: f64,
    samples: usize,
    rng: &mut R,
) -> Result<GradientLikeReport> {
    let n = set.dim();
    if p + 1 >= n {
        return invalid("need p + 1 < n");
    }
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return invalid("alpha must lie in (0, pi/2)");
    }
    if set.directions().iter().any(|u| u[p + 1..].iter().any(|c| c.abs() > 1e-12)) {
        return invalid("U is not contained in S^p");
    }
    let head: Vec<Vec<f64>> = set.directions().iter().map(|u| u[..=p].to_vec()).collect();
    let net_count = match p + 1 {
        1 => 2,
        2 => 4096,
        3 => 40_000,
        _ => 20_000,
    };
    let slack = covering_radius(p + 1, net_count).unwrap_or(0.0);
    let worst_cover = sphere_points(p + 1, net_count)
        .iter()
        .map(|z| min_angle_unchecked(z, &head))
        .fold(0.0, f64::max);
    if worst_cover + slack >= alpha {
        return invalid(format!(
            "S^p is not covered by B(U, {alpha}): sampled gap {worst_cover} + mesh {slack}"
        ));
    }

    let q = n - p - 2;
    let mut report = GradientLikeReport {
        samples,
        max_hinge_angle: 0.0,
        max_directional_derivative: f64::NEG_INFINITY,
        max_derivative_excess: f64::NEG_INFINITY,
    };
    for _ in 0..samples {
        let x = random_unit_vector(rng, p + 1);
        let y = random_unit_vector(rng, q + 1);
        let theta = rng.random_range(1e-3..FRAC_PI_2 - 1e-3);
        let split = SphereSplit::new(x, y, theta)?;
        let point = split.point();
        let (_, g) = join_distance_and_gradient(&split);
        let gamma = set
            .directions()
            .iter()
            .min_by(|a, b| angle_between(&point, a).total_cmp(&angle_between(&point, b)))
            .expect("nonempty set");
        let hinge = hinge_angle(&split.x_lifted(), &point, gamma);
        let d0 = min_angle_unchecked(&point, set.directions());
        // the truncation error is about h / (2 d0), and d0 can be small
        let h = 1e-5 * d0.min(1.0);
        let d1 = min_angle_unchecked(&sphere_exp(&point, &g, h), set.directions());
        let deriv = (d1 - d0) / h;
        report.max_hinge_angle = report.max_hinge_angle.max(hinge);
        report.max_directional_derivative = report.max_directional_derivative.max(deriv);
        report.max_derivative_excess = report.max_derivative_excess.max(deriv + hinge.cos());
    }
    Ok(report)
}

/// A spherical triangle with a right angle at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RightTriangle {
    pub x: Vec<f64>,
    pub gamma: Vec<f64>,
    pub p: Vec<f64>,
}

/// Random right triangle in `S^{dim-1}` (`dim >= 3`) with legs in `(0, pi)`.
pub fn random_right_triangle<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<RightTriangle> {
    if dim < 3 {
        return invalid("right triangles need dimension at least 3");
    }
    let x = random_unit_vector(rng, dim);
    let orth = |rng: &mut R, against: &[&[f64]]| loop {
        let mut v = random_unit_vector(rng, dim);
        for a in against {
            v = axpy(&v, -dot(&v, a), a);
        }
        if let Some(u) = normalized(&v) {
            if norm(&v) > 1e-3 {
                return u;
            }
        }
    };
    let u1 = orth(rng, &[&x]);
    let u2 = orth(rng, &[&x, &u1]);
    let a = rng.random_range(1e-3..std::f64::consts::PI - 1e-3);
    let b = rng.random_range(1e-3..std::f64::consts::PI - 1e-3);
    Ok(RightTriangle {
        gamma: axpy(&scale(&x, a.cos()), a.sin(), &u1),
        p: axpy(&scale(&x, b.cos()), b.sin(), &u2),
        x,
    })
}

/// `|cos d(Gamma, P) - cos d(Gamma, X) cos d(X, P)|`.
pub fn right_triangle_residual(t: &RightTriangle) -> f64 {
    let gp = angle_between(&t.gamma, &t.p);
    let gx = angle_between(&t.gamma, &t.x);
    let xp = angle_between(&t.x, &t.p);
    (gp.cos() - gx.cos() * xp.cos()).abs()
}

/// `psi(y, t) = y - t e_1`.
pub fn psi(y: &[f64], t: f64) -> Vec<f64> {
    let mut out = y.to_vec();
    if let Some(first) = out.first_mut() {
        *first -= t;
    }
    out
}

/// `t_y = max(0, e_1 . y)`: the time at which `psi` reaches the foot of
/// the perpendicular from `y` to the hyperplane `e_1^perp`.
pub fn t_y(y: &[f64]) -> f64 {
    y.first().copied().unwrap_or(0.0).max(0.0)
}

/// `angle(v, e_1)` for nonzero `v`.
pub fn angle_to_e1(v: &[f64]) -> f64 {
    angle_between(v, &basis(v.len(), 0))
}

fn cos_to_e1(v: &[f64]) -> f64 {
    v[0] / norm(v)
}

/// Derivatives at `t = 0` of `|psi(y, t)|` and `cos angle(psi(y, t), e_1)`:
/// `-(y . e_1)/|y|` and `-|y_perp|^2/|y|^3`.
pub fn psi_derivative_identities(y: &[f64]) -> Result<(f64, f64)> {
    let r = norm(y);
    if y.is_empty() || r == 0.0 {
        return invalid("y must be nonzero");
    }
    let perp2 = dot(&y[1..], &y[1..]);
    Ok((-y[0] / r, -perp2 / (r * r * r)))
}

/// Central differences of the same two quantities with step `h`.
pub fn psi_derivative_finite_difference(y: &[f64], h: f64) -> Result<(f64, f64)> {
    if y.is_empty() || norm(y) == 0.0 {
        return invalid("y must be nonzero");
    }
    let (plus, minus) = (psi(y, h), psi(y, -h));
    Ok((
        (norm(&plus) - norm(&minus)) / (2.0 * h),
        (cos_to_e1(&plus) - cos_to_e1(&minus)) / (2.0 * h),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArriveBounds {
    pub cos_final: f64,
    pub norm_path: f64,
    pub norm_final: f64,
    /// `-sqrt(1/11) - cos_final`
    pub cos_slack: f64,
    /// `|y| + R/sqrt(10) - norm_path`
    pub path_slack: f64,
    /// `norm_final - R/sqrt(10)`
    pub exit_slack: f64,
}

/// Evaluates the three arrival bounds for `y` in `B(0, R)`. The path
/// maximum is exact: `|psi(y, t_y + t)|` is convex in `t`, so it peaks at
/// an end of `[0, R/sqrt(10)]`.
pub fn arrive_bounds_check(y: &[f64], radius: f64) -> Result<ArriveBounds> {
    if !(radius > 0.0) {
        return invalid("radius must be positive");
    }
    if y.is_empty() {
        return invalid("y must have at least one coordinate");
    }
    let ny = norm(y);
    if ny >= radius {
        return invalid(format!("|y| = {ny} is not below R = {radius}"));
    }
    let ty = t_y(y);
    let step = radius * EXIT_FRACTION;
    let end = psi(y, ty + step);
    let norm_final = norm(&end);
    let cos_final = cos_to_e1(&end);
    let norm_path = norm(&psi(y, ty)).max(norm_final);
    Ok(ArriveBounds {
        cos_final,
        norm_path,
        norm_final,
        cos_slack: -COS_CAP - cos_final,
        path_slack: ny + step - norm_path,
        exit_slack: norm_final - step,
    })
}

/// Tally of one inequality over a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityStats {
    pub checked: usize,
    pub violations: usize,
    /// Smallest slack seen; negative means the inequality failed there.
    pub worst_slack: f64,
}

impl InequalityStats {
    fn new() -> Self {
        Self {
            checked: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
        }
    }

    fn record(&mut self, slack: f64, tolerance: f64) {
        self.checked += 1;
        if !(slack >= -tolerance) {
            self.violations += 1;
        }
        self.worst_slack = self.worst_slack.min(slack);
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArriveSuiteReport {
    pub dim: usize,
    pub radius: f64,
    pub samples: usize,
    pub cos_final: InequalityStats,
    pub path_bound: InequalityStats,
    pub exit_bound: InequalityStats,
}

impl ArriveSuiteReport {
    pub fn passed(&self) -> bool {
        self.cos_final.passed() && self.path_bound.passed() && self.exit_bound.passed()
    }
}

/// Slack tolerance for the arrival inequalities.
pub const ARRIVE_TOLERANCE: f64 = 1e-12;

/// Runs [`arrive_bounds_check`] on `samples` seeded uniform points of `B(0, R)`.
pub fn arrive_suite(dim: usize, radius: f64, samples: usize, seed: u64) -> Result<ArriveSuiteReport> {
    if dim == 0 {
        return invalid("dimension must be positive");
    }
    let mut rng = seeded_rng(seed);
    let mut report = ArriveSuiteReport {
        dim,
        radius,
        samples,
        cos_final: InequalityStats::new(),
        path_bound: InequalityStats::new(),
        exit_bound: InequalityStats::new(),
    };
    for _ in 0..samples {
        let y = random_in_ball(&mut rng, dim, radius);
        let b = arrive_bounds_check(&y, radius)?;
        report.cos_final.record(b.cos_slack, ARRIVE_TOLERANCE);
        report.path_bound.record(b.path_slack, ARRIVE_TOLERANCE);
        report.exit_bound.record(b.exit_slack, ARRIVE_TOLERANCE);
    }
    Ok(report)
}

/// Smooth radial cut-off equal to 1 on `[0, a]` and 0 on `[b, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpProfile {
    a: f64,
    b: f64,
}

fn sigma(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

impl BumpProfile {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return invalid("bump profile needs 0 < a < b");
        }
        Ok(Self { a, b })
    }

    /// `a = 3R/2`, `b = 2R`.
    pub fn for_radius(radius: f64) -> Result<Self> {
        Self::new(1.5 * radius, 2.0 * radius)
    }

    pub fn inner(&self) -> f64 {
        self.a
    }

    pub fn outer(&self) -> f64 {
        self.b
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= self.a {
            return 1.0;
        }
        if r >= self.b {
            return 0.0;
        }
        let (p, q) = (sigma(self.b - r), sigma(r - self.a));
        p / (p + q)
    }
}

/// Snapshot of a point under the linear flow with its angle bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowState {
    pub y: Vec<f64>,
    pub radius: f64,
    pub t_y: f64,
    pub alpha0: f64,
}

impl FlowState {
    pub fn new(y: Vec<f64>, radius: f64, alpha0: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return invalid("radius must be positive");
        }
        if !(alpha0 > 0.0 && alpha0 < FRAC_PI_2) {
            return invalid("alpha0 must lie in (0, pi/2)");
        }
        Ok(Self {
            t_y: t_y(&y),
            y,
            radius,
            alpha0,
        })
    }
}

/// Householder reflection sending the soul of `U` to `e_1`, and the image
/// of `U` under it.
pub fn align_soul(set: &DirectionSet) -> Result<(DMatrix<f64>, DirectionSet)> {
    match classify_polar_region(set)? {
        PolarRegion::WithBoundary { soul } => {
            let q = householder_to_e1(&soul);
            let image = set.transformed(&q)?;
            Ok((q, image))
        }
        other => Err(GeometryError::HypothesisViolation(format!(
            "soul alignment needs a polar region with boundary, got {}",
            other.variant_name()
        ))),
    }
}

/// Certified bound on `angle(z, U)` over the cap `K_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Alpha0 {
    /// `sampled_max + mesh`
    pub value: f64,
    pub sampled_max: f64,
    /// Covering radius of the sample.
    pub mesh: f64,
    pub samples_in_cap: usize,
}

/// Maximizes `angle(z, U)` over `K_0` on a deterministic sphere lattice.
///
/// Lattice points within `mesh` of `K_0` are included, so by the Lipschitz
/// bound on `angle(., U)` the returned `value` dominates the supremum over
/// the cap. Supported for `n = 2, 3`.
pub fn compute_alpha0(set: &DirectionSet, samples: usize) -> Result<Alpha0> {
    let n = set.dim();
    let mesh = covering_radius(n, samples).filter(|_| n >= 2).ok_or_else(|| {
        GeometryError::UnsupportedConfiguration(format!(
            "no certified sphere mesh in dimension {n}"
        ))
    })?;
    if n == 3 && samples < 1000 {
        return invalid("need at least 1000 lattice points on S^2");
    }
    match classify_polar_region(set)? {
        PolarRegion::WithBoundary { soul } if angle_between(&soul, &basis(n, 0)) < 1e-6 => {}
        PolarRegion::WithBoundary { .. } => {
            return invalid("soul is not e_1; call align_soul first")
        }
        other => {
            return Err(GeometryError::HypothesisViolation(format!(
                "polar region is {}, not a region with boundary",
                other.variant_name()
            )))
        }
    }
    // K_0 is the set of z with angle(z, e_1) >= beta.
    let beta = (-COS_CAP).acos();
    let threshold = (beta - mesh).cos();
    let (sampled_max, count) = sphere_points(n, samples)
        .par_iter()
        .filter(|z| z[0] <= threshold)
        .map(|z| (min_angle_unchecked(z, set.directions()), 1usize))
        .reduce(|| (0.0, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
    let value = sampled_max + mesh;
    if value >= FRAC_PI_2 {
        return Err(GeometryError::HypothesisViolation(format!(
            "alpha0 bound {value} is not below pi/2"
        )));
    }
    Ok(Alpha0 {
        value,
        sampled_max,
        mesh,
        samples_in_cap: count,
    })
}

/// Which parameter length the cut-off flow uses at `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OmegaParameter {
    /// `t_y + R/sqrt(10)`, matching the arrival bounds.
    #[default]
    LengthScaled,
    /// `t_y + sqrt(R/10)`; agrees with the default only at `R = 1`.
    SqrtRadius,
}

impl OmegaParameter {
    pub fn offset(self, radius: f64) -> f64 {
        match self {
            Self::LengthScaled => radius * EXIT_FRACTION,
            Self::SqrtRadius => (radius / 10.0).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaOptions {
    pub ode: OdeOptions,
    pub parameter: OmegaParameter,
    /// Use `y - s e_1` directly when the segment stays where `f = 1`.
    pub closed_form: bool,
}

impl Default for OmegaOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            parameter: OmegaParameter::default(),
            closed_form: true,
        }
    }
}

/// Flow of the field `-f(|x|) e_1` for parameter length `s >= 0`.
pub fn cutoff_field_flow(y: &[f64], s: f64, bump: &BumpProfile, opts: &OmegaOptions) -> Result<Vec<f64>> {
    if y.is_empty() {
        return invalid("y must have at least one coordinate");
    }
    if !(s >= 0.0) {
        return invalid("flow parameter must be nonnegative");
    }
    let ny = norm(y);
    if ny >= bump.outer() || s == 0.0 {
        return Ok(y.to_vec());
    }
    // |y - s e_1| is convex in s, so the segment stays in the ball where
    // f = 1 iff both ends do.
    let end = psi(y, s);
    if opts.closed_form && ny <= bump.inner() && norm(&end) <= bump.inner() {
        return Ok(end);
    }
    let field = |x: &[f64]| {
        let mut v = vec![0.0; x.len()];
        v[0] = -bump.value(norm(x));
        v
    };
    integrate(field, y, s, &opts.ode).map(|(x, _)| x)
}

/// `omega(y, t)`: the cut-off flow at parameter `(t_y + R/sqrt(10)) t`.
pub fn omega_flow(y: &[f64], t: f64, radius: f64, opts: &OmegaOptions) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return invalid("t must lie in [0, 1]");
    }
    let bump = BumpProfile::for_radius(radius)?;
    let s = (t_y(y) + opts.parameter.offset(radius)) * t;
    cutoff_field_flow(y, s, &bump, opts)
}

/// `omega(y, t_k)` at `steps + 1` equally spaced `t_k` in `[0, 1]`,
/// integrated incrementally.
pub fn omega_trajectory(
    y: &[f64],
    radius: f64,
    steps: usize,
    opts: &OmegaOptions,
) -> Result<Vec<(f64, Vec<f64>)>> {
    if steps == 0 {
        return invalid("need at least one step");
    }
    let bump = BumpProfile::for_radius(radius)?;
    let total = t_y(y) + opts.parameter.offset(radius);
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = y.to_vec();
    out.push((0.0, x.clone()));
    for k in 1..=steps {
        x = cutoff_field_flow(&x, total / steps as f64, &bump, opts)?;
        out.push((k as f64 / steps as f64, x.clone()));
    }
    Ok(out)
}

/// `{+-e_1, e_2}` in `R^n` aligned so that its soul is `e_1`.
pub fn reference_aligned_set(dim: usize) -> Result<DirectionSet> {
    if dim < 2 {
        return invalid("reference set needs dimension at least 2");
    }
    let set = DirectionSet::new(dim, vec![basis(dim, 0), scale(&basis(dim, 0), -1.0), basis(dim, 1)], 1e-9)?;
    Ok(align_soul(&set)?.1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaSuiteReport {
    pub dim: usize,
    pub radius: f64,
    pub samples: usize,
    pub alpha0: Alpha0,
    /// `omega_t(y) = y` for `|y| >= 2R` (slack `-|omega_t(y) - y|`).
    pub identity_outside: InequalityStats,
    /// `|omega_t(y)| <= |y| + R/sqrt(10)` along sampled trajectories.
    pub path_bound: InequalityStats,
    /// `|omega_1(y)| >= R/sqrt(10)`.
    pub exit_bound: InequalityStats,
    /// `angle(omega_1(y), U') <= alpha0`.
    pub angle_bound: InequalityStats,
    /// Largest gap between the integrated flow and the closed form in `B(0, R)`.
    pub ode_closed_form_deviation: f64,
}

impl OmegaSuiteReport {
    pub fn passed(&self) -> bool {
        self.identity_outside.passed()
            && self.path_bound.passed()
            && self.exit_bound.passed()
            && self.angle_bound.passed()
            && self.ode_closed_form_deviation <= 1e-8
    }
}

/// Tolerance for the exit bound of the cut-off flow.
pub const OMEGA_EXIT_TOLERANCE: f64 = 1e-8;

/// Lattice size used for `alpha0` in the suite.
pub const ALPHA0_SAMPLES: usize = 200_000;

/// Checks the cut-off flow properties on the reference aligned set.
pub fn omega_suite(
    dim: usize,
    radius: f64,
    samples: usize,
    seed: u64,
    opts: &OmegaOptions,
) -> Result<OmegaSuiteReport> {
    if !(radius > 0.0) {
        return invalid("radius must be positive");
    }
    let set = reference_aligned_set(dim)?;
    let alpha0 = compute_alpha0(&set, ALPHA0_SAMPLES)?;
    let mut rng = seeded_rng(seed);
    let inside: Vec<Vec<f64>> = (0..samples).map(|_| random_in_ball(&mut rng, dim, radius)).collect();
    let outside: Vec<(Vec<f64>, f64)> = (0..samples)
        .map(|_| {
            let r = rng.random_range(2.0 * radius..4.0 * radius);
            (scale(&random_unit_vector(&mut rng, dim), r), rng.random_range(0.0..=1.0))
        })
        .collect();
    let exit = radius * EXIT_FRACTION;

    let mut identity = InequalityStats::new();
    for (y, t) in &outside {
        let image = omega_flow(y, *t, radius, opts)?;
        identity.record(-norm(&sub(&image, y)), 0.0);
    }

    let per_point: Vec<(Vec<f64>, Vec<f64>, f64)> = inside
        .par_iter()
        .map(|y| -> Result<_> {
            let traj = omega_trajectory(y, radius, 10, opts)?;
            let bound = norm(y) + exit;
            let path: Vec<f64> = traj.iter().map(|(_, x)| bound - norm(x)).collect();
            let end = traj.last().expect("nonempty trajectory").1.clone();
            let direct = omega_flow(y, 1.0, radius, opts)?;
            let forced = omega_flow(
                y,
                1.0,
                radius,
                &OmegaOptions {
                    closed_form: false,
                    ..*opts
                },
            )?;
            let deviation = norm(&sub(&forced, &direct)).max(norm(&sub(&end, &direct)));
            Ok((direct, path, deviation))
        })
        .collect::<Result<_>>()?;

    let mut path_bound = InequalityStats::new();
    let mut exit_bound = InequalityStats::new();
    let mut angle_bound = InequalityStats::new();
    let mut deviation: f64 = 0.0;
    for (end, path, dev) in &per_point {
        for slack in path {
            path_bound.record(*slack, ARRIVE_TOLERANCE);
        }
        let r = norm(end);
        exit_bound.record(r - exit, OMEGA_EXIT_TOLERANCE);
        let ang = if r > 0.0 {
            min_angle_unchecked(&scale(end, 1.0 / r), set.directions())
        } else {
            f64::INFINITY
        };
        angle_bound.record(alpha0.value - ang, 0.0);
        deviation = deviation.max(*dev);
    }
    Ok(OmegaSuiteReport {
        dim,
        radius,
        samples,
        alpha0,
        identity_outside: identity,
        path_bound,
        exit_bound,
        angle_bound,
        ode_closed_form_deviation: deviation,
    })
}
