//! Penalty functions and their one-dimensional proximal maps.

use super::{Penalty, PenaltyError};

pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// A quadratic piece `q2·w² + q1·w + q0` of a penalty on `[lo, hi]`, `w ≥ 0`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    q2: f64,
    q1: f64,
    q0: f64,
}

fn pieces(penalty: Penalty, lambda: f64) -> Vec<Piece> {
    match penalty {
        Penalty::Lasso => vec![Piece { lo: 0.0, hi: f64::INFINITY, q2: 0.0, q1: lambda, q0: 0.0 }],
        Penalty::ElasticNet { alpha } => vec![Piece {
            lo: 0.0,
            hi: f64::INFINITY,
            q2: 0.5 * lambda * (1.0 - alpha),
            q1: lambda * alpha,
            q0: 0.0,
        }],
        Penalty::Mcp { gamma } => vec![
            Piece { lo: 0.0, hi: gamma * lambda, q2: -0.5 / gamma, q1: lambda, q0: 0.0 },
            Piece { lo: gamma * lambda, hi: f64::INFINITY, q2: 0.0, q1: 0.0, q0: 0.5 * gamma * lambda * lambda },
        ],
        Penalty::Scad { gamma } => {
            let d = 2.0 * (gamma - 1.0);
            vec![
                Piece { lo: 0.0, hi: lambda, q2: 0.0, q1: lambda, q0: 0.0 },
                Piece { lo: lambda, hi: gamma * lambda, q2: -1.0 / d, q1: 2.0 * gamma * lambda / d, q0: -lambda * lambda / d },
                Piece { lo: gamma * lambda, hi: f64::INFINITY, q2: 0.0, q1: 0.0, q0: 0.5 * lambda * lambda * (gamma + 1.0) },
            ]
        }
    }
}

/// `P(w; λ)` for a single coefficient.
pub fn penalty_eval(penalty: Penalty, w: f64, lambda: f64) -> f64 {
    let a = w.abs();
    pieces(penalty, lambda)
        .into_iter()
        .find(|pc| a <= pc.hi)
        .map_or(0.0, |pc| pc.q2 * a * a + pc.q1 * a + pc.q0)
}

/// Global minimizer of `½ν w² − z w + P(w; λ)` by comparing the best point of
/// every quadratic piece. Valid for any curvature, convex or not.
pub(crate) fn piecewise_prox(penalty: Penalty, z: f64, lambda: f64, nu: f64) -> f64 {
    let za = z.abs();
    let obj = |w: f64| 0.5 * nu * w * w - za * w + penalty_eval(penalty, w, lambda);
    let mut best = (obj(0.0), 0.0);
    for pc in pieces(penalty, lambda) {
        let curv = 0.5 * nu + pc.q2;
        let mut cands = vec![pc.lo];
        if pc.hi.is_finite() {
            cands.push(pc.hi);
        }
        if curv > 0.0 {
            cands.push(((za - pc.q1) / (2.0 * curv)).clamp(pc.lo, pc.hi));
        }
        for w in cands {
            let v = obj(w);
            if v < best.0 || (v == best.0 && w < best.1) {
                best = (v, w);
            }
        }
    }
    best.1.copysign(z)
}

/// `argmin_w ½ν w² − z w + P(w; λ)`.
///
/// Closed forms: soft thresholding for Lasso and Elastic-Net, MCP when
/// `γν > 1`, SCAD when `ν = 1`. Other cases use [`piecewise_prox`].
pub fn univariate_prox(penalty: Penalty, z: f64, lambda: f64, nu: f64) -> Result<f64, PenaltyError> {
    penalty.validate()?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(PenaltyError::InvalidLambda(lambda));
    }
    if !(nu > 0.0) {
        return Err(PenaltyError::InvalidCurvature(nu));
    }
    Ok(prox_unchecked(penalty, z, lambda, nu))
}

pub(crate) fn prox_unchecked(penalty: Penalty, z: f64, lambda: f64, nu: f64) -> f64 {
    match penalty {
        Penalty::Lasso => soft_threshold(z, lambda) / nu,
        Penalty::ElasticNet { alpha } => soft_threshold(z, lambda * alpha) / (nu + lambda * (1.0 - alpha)),
        Penalty::Mcp { gamma } if gamma * nu > 1.0 => {
            if z.abs() <= nu * gamma * lambda {
                soft_threshold(z, lambda) / (nu - 1.0 / gamma)
            } else {
                z / nu
            }
        }
        Penalty::Scad { gamma } if nu == 1.0 => {
            let a = z.abs();
            if a <= 2.0 * lambda {
                soft_threshold(z, lambda)
            } else if a <= gamma * lambda {
                ((gamma - 1.0) * z - z.signum() * gamma * lambda) / (gamma - 2.0)
            } else {
                z
            }
        }
        _ => piecewise_prox(penalty, z, lambda, nu),
    }
}
