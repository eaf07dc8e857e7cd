//! Jacobi fields and index forms along geodesics of constant curvature.
//!
//! In a parallel orthonormal frame normal to the geodesic every Jacobi
//! field splits into components `J_i(t) = a_i cs(t) + b_i sn(t)`, where
//! `sn` and `cs` solve `f'' + kappa f = 0` with `sn(0) = 0, sn'(0) = 1` and
//! `cs(0) = 1, cs'(0) = 0`. Everything below is evaluated from that closed
//! form.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, GeometryError, Result};
use crate::linalg::null_space_basis;
use crate::quadrature::GaussLegendre;
use crate::vector::{dot, norm, scale, sub};

/// `|sin(sqrt(kappa) t)|` below this marks `t` as a conjugate time.
pub const CONJUGATE_TOL: f64 = 1e-10;

/// Gauss-Legendre nodes per smooth piece.
pub const QUADRATURE_NODES: usize = 64;

/// Relative agreement required between the two index-form evaluations.
pub const INDEX_FORM_AGREEMENT: f64 = 1e-8;

pub fn sn(kappa: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        let r = kappa.sqrt();
        (r * t).sin() / r
    } else if kappa < 0.0 {
        let r = (-kappa).sqrt();
        (r * t).sinh() / r
    } else {
        t
    }
}

pub fn cs(kappa: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        (kappa.sqrt() * t).cos()
    } else if kappa < 0.0 {
        ((-kappa).sqrt() * t).cosh()
    } else {
        1.0
    }
}

fn is_conjugate_time(kappa: f64, t: f64) -> bool {
    kappa > 0.0 && t > 0.0 && (kappa.sqrt() * t).sin().abs() < CONJUGATE_TOL
}

/// A unit-speed geodesic `[0, length]` in a space of constant curvature,
/// with `frame_dim` normal directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelGeodesic {
    pub kappa: f64,
    pub length: f64,
    pub frame_dim: usize,
}

impl ModelGeodesic {
    pub fn new(kappa: f64, length: f64, frame_dim: usize) -> Result<Self> {
        if !kappa.is_finite() {
            return invalid("curvature must be finite");
        }
        if !(length > 0.0 && length.is_finite()) {
            return invalid("length must be positive");
        }
        if frame_dim == 0 {
            return invalid("frame dimension must be positive");
        }
        Ok(Self {
            kappa,
            length,
            frame_dim,
        })
    }

    /// `pi / sqrt(kappa)` for positive curvature.
    pub fn first_conjugate_time(&self) -> Option<f64> {
        (self.kappa > 0.0).then(|| std::f64::consts::PI / self.kappa.sqrt())
    }

    /// Whether the endpoint is conjugate to the start.
    pub fn endpoint_conjugate(&self) -> bool {
        is_conjugate_time(self.kappa, self.length)
    }
}

/// A Jacobi field given by its frame coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiField {
    kappa: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl JacobiField {
    pub fn new(kappa: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return invalid("coefficient vectors must be nonempty and of equal length");
        }
        Ok(Self { kappa, a, b })
    }

    /// The field with `J(0) = value` and `J'(0) = derivative`.
    pub fn from_initial(kappa: f64, value: &[f64], derivative: &[f64]) -> Result<Self> {
        Self::new(kappa, value.to_vec(), derivative.to_vec())
    }

    /// The field with `J(t0) = v0` and `J(t1) = v1`.
    pub fn through(kappa: f64, t0: f64, v0: &[f64], t1: f64, v1: &[f64]) -> Result<Self> {
        if v0.len() != v1.len() {
            return invalid("boundary values differ in dimension");
        }
        let (c0, s0, c1, s1) = (cs(kappa, t0), sn(kappa, t0), cs(kappa, t1), sn(kappa, t1));
        let det = c0 * s1 - s0 * c1;
        if det.abs() < CONJUGATE_TOL || is_conjugate_time(kappa, (t1 - t0).abs()) {
            return Err(GeometryError::NoSolution(format!(
                "times {t0} and {t1} are conjugate"
            )));
        }
        let a = v0.iter().zip(v1).map(|(p, q)| (p * s1 - q * s0) / det).collect();
        let b = v0.iter().zip(v1).map(|(p, q)| (q * c0 - p * c1) / det).collect();
        Self::new(kappa, a, b)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Coefficients of `cs` and of `sn`.
    pub fn coefficients(&self) -> (&[f64], &[f64]) {
        (&self.a, &self.b)
    }

    fn combine(&self, p: f64, q: f64) -> Vec<f64> {
        self.a.iter().zip(&self.b).map(|(a, b)| a * p + b * q).collect()
    }

    pub fn value(&self, t: f64) -> Vec<f64> {
        self.combine(cs(self.kappa, t), sn(self.kappa, t))
    }

    pub fn derivative(&self, t: f64) -> Vec<f64> {
        self.combine(-self.kappa * sn(self.kappa, t), cs(self.kappa, t))
    }

    pub fn second_derivative(&self, t: f64) -> Vec<f64> {
        self.combine(-self.kappa * cs(self.kappa, t), -self.kappa * sn(self.kappa, t))
    }

    /// `|J''(t) + kappa J(t)|`.
    pub fn jacobi_residual(&self, t: f64) -> f64 {
        let jpp = self.second_derivative(t);
        let j = self.value(t);
        norm(&jpp.iter().zip(&j).map(|(x, y)| x + self.kappa * y).collect::<Vec<_>>())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            kappa: self.kappa,
            a: scale(&self.a, s),
            b: scale(&self.b, s),
        }
    }
}

/// The unique Jacobi field with `J(0) = w` and `J(length) = end`.
///
/// When the endpoint is conjugate every field vanishing at `0` also
/// vanishes at the end, so only `w = 0, end = 0` is solvable (by the zero
/// field); anything else is reported as [`GeometryError::NoSolution`].
pub fn solve_boundary_jacobi(g: &ModelGeodesic, w: &[f64], end: &[f64]) -> Result<JacobiField> {
    if w.len() != g.frame_dim || end.len() != g.frame_dim {
        return invalid("boundary vectors must match the frame dimension");
    }
    if g.endpoint_conjugate() {
        if norm(w) == 0.0 && norm(end) == 0.0 {
            return JacobiField::new(g.kappa, vec![0.0; g.frame_dim], vec![0.0; g.frame_dim]);
        }
        return Err(GeometryError::NoSolution(format!(
            "t = {} is conjugate to 0; w is not orthogonal to the kernel",
            g.length
        )));
    }
    JacobiField::through(g.kappa, 0.0, w, g.length, end)
}

/// A continuous field that is Jacobi on each interval between breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseField {
    breaks: Vec<f64>,
    pieces: Vec<JacobiField>,
}

impl PiecewiseField {
    pub fn new(breaks: Vec<f64>, pieces: Vec<JacobiField>) -> Result<Self> {
        if pieces.is_empty() || breaks.len() != pieces.len() + 1 {
            return invalid("need one more breakpoint than pieces");
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("breakpoints must be strictly increasing");
        }
        let (kappa, dim) = (pieces[0].kappa, pieces[0].dim());
        if pieces.iter().any(|p| p.kappa != kappa || p.dim() != dim) {
            return invalid("pieces differ in curvature or dimension");
        }
        let field = Self { breaks, pieces };
        let jump = field.continuity_residual();
        if jump > 1e-10 * (1.0 + field.max_break_value()) {
            return invalid(format!("field is discontinuous (jump {jump:e})"));
        }
        Ok(field)
    }

    pub fn single(field: JacobiField, t0: f64, t1: f64) -> Result<Self> {
        Self::new(vec![t0, t1], vec![field])
    }

    /// Piecewise-Jacobi interpolation of `values[k]` at `breaks[k]`.
    pub fn interpolate(kappa: f64, breaks: &[f64], values: &[Vec<f64>]) -> Result<Self> {
        if breaks.len() != values.len() || breaks.len() < 2 {
            return invalid("need matching breakpoints and values, at least two");
        }
        let pieces = (0..breaks.len() - 1)
            .map(|k| JacobiField::through(kappa, breaks[k], &values[k], breaks[k + 1], &values[k + 1]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(breaks.to_vec(), pieces)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[JacobiField] {
        &self.pieces
    }

    pub fn kappa(&self) -> f64 {
        self.pieces[0].kappa
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].dim()
    }

    fn locate(&self, t: f64) -> usize {
        let k = self.breaks.partition_point(|&b| b <= t);
        k.saturating_sub(1).min(self.pieces.len() - 1)
    }

    pub fn value(&self, t: f64) -> Vec<f64> {
        self.pieces[self.locate(t)].value(t)
    }

    /// Right derivative (left derivative at the final breakpoint).
    pub fn derivative(&self, t: f64) -> Vec<f64> {
        self.pieces[self.locate(t)].derivative(t)
    }

    /// Largest jump `|V(t_k^-) - V(t_k^+)|` over interior breakpoints.
    pub fn continuity_residual(&self) -> f64 {
        (1..self.pieces.len())
            .map(|k| {
                let t = self.breaks[k];
                norm(&sub(&self.pieces[k - 1].value(t), &self.pieces[k].value(t)))
            })
            .fold(0.0, f64::max)
    }

    fn max_break_value(&self) -> f64 {
        (1..self.pieces.len())
            .map(|k| norm(&self.pieces[k].value(self.breaks[k])))
            .fold(0.0, f64::max)
    }
}

/// Both evaluations of the index form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexForm {
    /// `sum_k int g(V', W') - kappa g(V, W)` by Gauss-Legendre.
    pub quadrature: f64,
    /// `sum_k [g(V', W)]` over the ends of each piece.
    pub boundary: f64,
}

impl IndexForm {
    pub fn value(&self) -> f64 {
        self.boundary
    }

    pub fn discrepancy(&self) -> f64 {
        (self.quadrature - self.boundary).abs()
    }
}

/// `I(V, W)` along `g`, computed by quadrature and by boundary terms. The
/// two must agree to [`INDEX_FORM_AGREEMENT`] (relative to `max(1, |I|)`).
pub fn index_form(g: &ModelGeodesic, v: &PiecewiseField, w: &PiecewiseField) -> Result<IndexForm> {
    let form = index_form_unchecked(g, v, w)?;
    if form.discrepancy() > INDEX_FORM_AGREEMENT * form.boundary.abs().max(1.0) {
        return Err(GeometryError::InternalInconsistency(format!(
            "index form routes disagree: quadrature {} vs boundary {}",
            form.quadrature, form.boundary
        )));
    }
    Ok(form)
}

/// [`index_form`] without the agreement assertion.
pub fn index_form_unchecked(g: &ModelGeodesic, v: &PiecewiseField, w: &PiecewiseField) -> Result<IndexForm> {
    if v.kappa() != g.kappa || w.kappa() != g.kappa {
        return invalid("field curvature differs from the geodesic");
    }
    if v.dim() != g.frame_dim || w.dim() != g.frame_dim {
        return invalid("field dimension differs from the frame");
    }
    if v.breaks.len() != w.breaks.len()
        || v.breaks.iter().zip(&w.breaks).any(|(a, b)| (a - b).abs() > 1e-14)
    {
        return invalid("fields have different breakpoints");
    }
    let scale_t = g.length.max(1.0);
    if v.breaks[0].abs() > 1e-12 * scale_t || (v.breaks[v.breaks.len() - 1] - g.length).abs() > 1e-12 * scale_t {
        return invalid("fields must cover [0, length]");
    }
    let rule = GaussLegendre::new(QUADRATURE_NODES);
    let kappa = g.kappa;
    let mut quadrature = 0.0;
    let mut boundary = 0.0;
    for (k, (pv, pw)) in v.pieces.iter().zip(&w.pieces).enumerate() {
        let (t0, t1) = (v.breaks[k], v.breaks[k + 1]);
        quadrature += rule.integrate(t0, t1, |t| {
            dot(&pv.derivative(t), &pw.derivative(t)) - kappa * dot(&pv.value(t), &pw.value(t))
        });
        boundary += dot(&pv.derivative(t1), &pw.value(t1)) - dot(&pv.derivative(t0), &pw.value(t0));
    }
    Ok(IndexForm {
        quadrature,
        boundary,
    })
}

/// The broken field used to push the index form to `-inf` at a conjugate
/// endpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffField {
    pub eps: f64,
    /// `J` with `J(0) = 0, J'(0) = w`.
    pub kernel: JacobiField,
    /// `Y` on `[0, eps]` with `Y(0) = w`, `Y(eps) = J(eps)/|J(eps)|`.
    pub inner: JacobiField,
    /// `Y` on `[0, eps]`, `J/|J(eps)|` on `[eps, length]`.
    pub field: PiecewiseField,
}

fn check_conjugate_setup(g: &ModelGeodesic, w: &[f64]) -> Result<()> {
    match g.first_conjugate_time() {
        Some(c) if (g.length - c).abs() <= 1e-9 * c => {}
        _ => return invalid("geodesic length must be the first conjugate time"),
    }
    if w.len() != g.frame_dim || (norm(w) - 1.0).abs() > 1e-12 {
        return invalid("w must be a unit frame vector");
    }
    Ok(())
}

pub fn cutoff_field(g: &ModelGeodesic, w: &[f64], eps: f64) -> Result<CutoffField> {
    check_conjugate_setup(g, w)?;
    if !(eps > 0.0 && eps < g.length / 2.0) {
        return invalid(format!("eps = {eps} outside (0, length/2)"));
    }
    let kernel = JacobiField::from_initial(g.kappa, &vec![0.0; w.len()], w)?;
    let j_eps = kernel.value(eps);
    let outer = kernel.scaled(1.0 / norm(&j_eps));
    let inner = JacobiField::through(g.kappa, 0.0, w, eps, &outer.value(eps))?;
    let field = PiecewiseField::new(vec![0.0, eps, g.length], vec![inner.clone(), outer])?;
    Ok(CutoffField {
        eps,
        kernel,
        inner,
        field,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceEntry {
    pub eps: f64,
    /// `I(V_eps, V_eps)` from the boundary terms.
    pub index: f64,
    /// `-g(J'(eps), J(eps)) / |J(eps)|^2`
    pub kernel_term: f64,
    /// `g(Y'(eps), J(eps)/|J(eps)|) - g(Y'(0), w)`
    pub inner_terms: f64,
    /// The same index by quadrature.
    pub quadrature: f64,
}

/// `I(V_eps, V_eps)` for each `eps`.
pub fn index_divergence(g: &ModelGeodesic, w: &[f64], eps: &[f64]) -> Result<Vec<DivergenceEntry>> {
    eps.iter()
        .map(|&e| {
            let c = cutoff_field(g, w, e)?;
            let j = c.kernel.value(e);
            let jn = norm(&j);
            let kernel_term = -dot(&c.kernel.derivative(e), &j) / (jn * jn);
            let inner_terms = dot(&c.inner.derivative(e), &scale(&j, 1.0 / jn)) - dot(&c.inner.derivative(0.0), w);
            let form = index_form(g, &c.field, &c.field)?;
            Ok(DivergenceEntry {
                eps: e,
                index: kernel_term + inner_terms,
                kernel_term,
                inner_terms,
                quadrature: form.quadrature,
            })
        })
        .collect()
}

/// `-cot(eps) - sin(eps) + tan(eps/2) (cos(eps) - 1)`: the cut-off index on
/// the unit sphere at `length = pi`.
pub fn unit_sphere_divergence(eps: f64) -> f64 {
    -1.0 / eps.tan() - eps.sin() + (eps / 2.0).tan() * (eps.cos() - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryValueBound {
    pub bound: f64,
    /// `(eps, max over [0, eps] of the extremal field)`
    pub per_eps: Vec<(f64, f64)>,
}

/// Supremum of `max_{[0, eps]} |J|` over Jacobi fields with `|J(0)| =
/// |J(eps)| = 1`, over the sampled `eps`.
///
/// Writing `J(t) = (sn(eps - t) u + sn(t) v) / sn(eps)` shows `|J|` grows
/// with `u . v`, so the extremal fields are one-component with equal end
/// values; the opposite-sign field is included as a check.
pub fn boundary_value_bound(g: &ModelGeodesic, eps: &[f64]) -> Result<BoundaryValueBound> {
    if eps.is_empty() {
        return invalid("need at least one eps");
    }
    let mut per_eps = Vec::with_capacity(eps.len());
    for &e in eps {
        if !(e > 0.0 && e <= g.length / 2.0) {
            return invalid(format!("eps = {e} outside (0, length/2]"));
        }
        let mut best: f64 = 0.0;
        for end in [1.0, -1.0] {
            let j = JacobiField::through(g.kappa, 0.0, &[1.0], e, &[end])?;
            let grid = (0..=1000).map(|i| e * i as f64 / 1000.0).chain(std::iter::once(e / 2.0));
            for t in grid {
                best = best.max(j.value(t)[0].abs());
            }
        }
        per_eps.push((e, best));
    }
    Ok(BoundaryValueBound {
        bound: per_eps.iter().map(|p| p.1).fold(0.0, f64::max),
        per_eps,
    })
}

/// Which second-order coefficient to compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HessianTerm {
    /// Tangential plus normal boundary Jacobi contributions.
    Full,
    /// Normal contribution only.
    NormalOnly,
}

/// `T(t) = c0 - t cos(theta) + H t^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondOrderModel {
    pub c0: f64,
    pub theta: f64,
    pub h: f64,
}

impl SecondOrderModel {
    pub fn eval(&self, t: f64) -> f64 {
        self.c0 - t * self.theta.cos() + 0.5 * self.h * t * t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondVariationReport {
    pub model: SecondOrderModel,
    pub h_tangential: f64,
    pub h_normal: f64,
    /// `(t, (dist(exp(t w)) - T(t)) / t^2)` for `t = 2^-4 .. 2^-12`.
    pub excess: Vec<(f64, f64)>,
    pub max_excess: f64,
    pub final_excess: f64,
    /// `final_excess <= 1e-6`.
    pub passed: bool,
}

/// Excess-tolerance for the final sample of [`second_variation_check`].
pub const SECOND_VARIATION_TOL: f64 = 1e-6;

/// Distance from `exp(t w)` to the point at distance `c0` along the
/// geodesic, where `w` makes angle `theta` with the geodesic.
pub fn model_distance(kappa: f64, c0: f64, theta: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        let r = kappa.sqrt();
        let c = (r * c0).cos() * (r * t).cos() + (r * c0).sin() * (r * t).sin() * theta.cos();
        c.clamp(-1.0, 1.0).acos() / r
    } else if kappa < 0.0 {
        let r = (-kappa).sqrt();
        let c = (r * c0).cosh() * (r * t).cosh() - (r * c0).sinh() * (r * t).sinh() * theta.cos();
        c.max(1.0).acosh() / r
    } else {
        (c0 * c0 - 2.0 * c0 * t * theta.cos() + t * t).max(0.0).sqrt()
    }
}

/// Compares the distance along `exp(t w)` from a point at distance `c0`
/// with its second-order model. `w` is a unit vector whose first entry is
/// the component along the geodesic and whose remaining `frame_dim`
/// entries are normal.
pub fn second_variation_check(g: &ModelGeodesic, w: &[f64], term: HessianTerm) -> Result<SecondVariationReport> {
    if w.len() != g.frame_dim + 1 || (norm(w) - 1.0).abs() > 1e-12 {
        return invalid("w must be a unit vector of length frame_dim + 1");
    }
    if let Some(c) = g.first_conjugate_time() {
        if g.length >= c * (1.0 - 1e-12) {
            return Err(GeometryError::UnsupportedConfiguration(
                "endpoint at or past the first conjugate point; use index_divergence".into(),
            ));
        }
    }
    let c0 = g.length;
    let theta = w[0].clamp(-1.0, 1.0).acos();
    let normal = &w[1..];
    let jn = solve_boundary_jacobi(g, normal, &vec![0.0; g.frame_dim])?;
    let h_normal = -dot(&jn.derivative(0.0), &jn.value(0.0));
    // tangential Jacobi fields are affine whatever the curvature
    let flat = ModelGeodesic::new(0.0, c0, 1)?;
    let jt = solve_boundary_jacobi(&flat, &w[..1], &[0.0])?;
    let h_tangential = -dot(&jt.derivative(0.0), &jt.value(0.0));
    let h = match term {
        HessianTerm::Full => h_normal + h_tangential,
        HessianTerm::NormalOnly => h_normal,
    };
    let model = SecondOrderModel { c0, theta, h };
    let excess: Vec<(f64, f64)> = (4..=12)
        .map(|k| {
            let t = 2f64.powi(-k);
            (t, (model_distance(g.kappa, c0, theta, t) - model.eval(t)) / (t * t))
        })
        .collect();
    let max_excess = excess.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let final_excess = excess.last().expect("nonempty").1;
    Ok(SecondVariationReport {
        model,
        h_tangential,
        h_normal,
        excess,
        max_excess,
        final_excess,
        passed: final_excess <= SECOND_VARIATION_TOL,
    })
}

/// `g(P, N') - g(P', N)` at `t`.
pub fn lagrange_bracket(p: &JacobiField, n: &JacobiField, t: f64) -> f64 {
    dot(&p.value(t), &n.derivative(t)) - dot(&p.derivative(t), &n.value(t))
}

/// Largest deviation of the Lagrange bracket from its value at `ts[0]`.
pub fn lagrange_residual(p: &JacobiField, n: &JacobiField, ts: &[f64]) -> f64 {
    let Some(&t0) = ts.first() else { return 0.0 };
    let base = lagrange_bracket(p, n, t0);
    ts.iter()
        .map(|&t| (lagrange_bracket(p, n, t) - base).abs())
        .fold(0.0, f64::max)
}

/// Bases of `ker(d exp) = {N'(0) : N(0) = N(length) = 0}` and of
/// `{P(0) : P(length) = 0, P'(length) perp N'(length) for all N}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiFamilies {
    pub kernel: Vec<Vec<f64>>,
    pub p_initial: Vec<Vec<f64>>,
}

impl JacobiFamilies {
    /// Largest `|k . p|` over basis pairs.
    pub fn orthogonality_defect(&self) -> f64 {
        self.kernel
            .iter()
            .flat_map(|k| self.p_initial.iter().map(move |p| dot(k, p).abs()))
            .fold(0.0, f64::max)
    }
}

/// Computes both families one frame component at a time, on the
/// coefficients `(a, b)` of `a cs + b sn`.
pub fn jacobi_families(g: &ModelGeodesic) -> JacobiFamilies {
    let (k, l) = (g.kappa, g.length);
    let (c, s) = (cs(k, l), sn(k, l));
    // N(0) = a = 0 and N(l) = a c + b s = 0
    let n_space = null_space_basis(&[vec![1.0, 0.0], vec![c, s]], 2);
    let mut rows = vec![vec![c, s]];
    for nv in &n_space {
        // P'(l) . N'(l), with X'(l) = -k s a + c b
        let nd = -k * s * nv[0] + c * nv[1];
        rows.push(vec![-k * s * nd, c * nd]);
    }
    let p_space = null_space_basis(&rows, 2);
    let lift = |x: f64, i: usize| {
        let mut v = vec![0.0; g.frame_dim];
        v[i] = x;
        v
    };
    let mut fam = JacobiFamilies {
        kernel: Vec::new(),
        p_initial: Vec::new(),
    };
    for i in 0..g.frame_dim {
        // N'(0) = b, P(0) = a
        fam.kernel.extend(n_space.iter().map(|v| lift(v[1], i)));
        fam.p_initial.extend(p_space.iter().map(|v| lift(v[0], i)));
    }
    fam
}

/// A random continuous piecewise-Jacobi field on `[0, length]` with
/// `pieces` pieces of comparable length and values in `[-1, 1]^frame_dim`
/// at the breakpoints.
pub fn random_piecewise_field<R: Rng + ?Sized>(rng: &mut R, g: &ModelGeodesic, pieces: usize) -> Result<PiecewiseField> {
    if pieces == 0 {
        return invalid("need at least one piece");
    }
    let mut cuts: Vec<f64> = (0..pieces - 1).map(|_| rng.random_range(0.1..0.9)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut breaks = vec![0.0];
    for (i, c) in cuts.iter().enumerate() {
        // keep breakpoints ordered and separated
        let lo = (i as f64 + c) / pieces as f64;
        breaks.push(lo * g.length);
    }
    breaks.push(g.length);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let values: Vec<Vec<f64>> = breaks
        .iter()
        .map(|_| (0..g.frame_dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    PiecewiseField::interpolate(g.kappa, &breaks, &values)
}
