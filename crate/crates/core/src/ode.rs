//! Adaptive Dormand-Prince 5(4) integration of autonomous vector fields.

use crate::error::{GeometryError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
    /// Steps shorter than this abort the integration.
    pub min_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-9,
            max_steps: 1_000_000,
            min_step: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `x' = field(x)` from `x0` over a parameter interval of length
/// `duration` (which may be zero).
pub fn integrate<F>(field: F, x0: &[f64], duration: f64, opts: &OdeOptions) -> Result<(Vec<f64>, OdeStats)>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut stats = OdeStats::default();
    if !duration.is_finite() || duration < 0.0 {
        return Err(GeometryError::Integration {
            t: 0.0,
            reason: format!("bad integration length {duration}"),
        });
    }
    let n = x0.len();
    let mut x = x0.to_vec();
    if duration == 0.0 {
        return Ok((x, stats));
    }
    let mut t = 0.0;
    let mut h = (duration * 0.01).max(opts.min_step);
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    k[0] = field(&x);
    let mut stage = vec![0.0; n];
    while t < duration {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(GeometryError::Integration {
                t,
                reason: format!("step budget of {} exhausted", opts.max_steps),
            });
        }
        let last = t + h >= duration;
        if last {
            h = duration - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = x[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            debug_assert!(C[s] > 0.0);
            k[s] = field(&stage);
        }
        // stage now holds the fifth-order solution (FSAL row of A equals B5)
        let mut err: f64 = 0.0;
        for i in 0..n {
            let e: f64 = (0..7).map(|s| (B5[s] - B4[s]) * k[s][i]).sum::<f64>() * h;
            let scale = opts.atol + opts.rtol * x[i].abs().max(stage[i].abs());
            err = err.max((e / scale).abs());
        }
        if !err.is_finite() {
            return Err(GeometryError::Integration {
                t,
                reason: "non-finite error estimate".into(),
            });
        }
        if err <= 1.0 {
            t = if last { duration } else { t + h };
            x.copy_from_slice(&stage);
            k[0] = k[6].clone();
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < opts.min_step && t < duration {
            return Err(GeometryError::Integration {
                t,
                reason: format!("step size {h:e} below minimum"),
            });
        }
    }
    Ok((x, stats))
}
