//! Dense `f64` vector helpers on plain slices.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// Returns `None` for vectors of (numerically) zero length.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n > f64::MIN_POSITIVE && n.is_finite() {
        Some(scale(a, 1.0 / n))
    } else {
        None
    }
}

/// `i`-th standard basis vector of `R^dim`.
pub fn basis(dim: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Angle between two nonzero vectors, computed with `atan2` so that nearly
/// parallel and nearly antipodal inputs keep full precision.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let d = dot(a, b);
    // |a x b| via Lagrange's identity, robust in any dimension
    let na2 = dot(a, a);
    let nb2 = dot(b, b);
    let cross2 = (na2 * nb2 - d * d).max(0.0);
    let cross = if cross2 > 1e-6 * na2 * nb2 {
        cross2.sqrt()
    } else {
        // small-angle regime: measure the rejection of b from a directly
        let na = na2.sqrt();
        let nb = nb2.sqrt();
        let ua = scale(a, 1.0 / na);
        let ub = scale(b, 1.0 / nb);
        let s = if d >= 0.0 { sub(&ua, &ub) } else { add(&ua, &ub) };
        let chord = norm(&s);
        let half = 2.0 * (chord / 2.0).min(1.0).asin();
        return if d >= 0.0 {
            half
        } else {
            std::f64::consts::PI - half
        };
    };
    cross.atan2(d)
}
