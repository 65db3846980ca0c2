//! Loss functions, their Fenchel conjugates and conjugate domains.
//!
//! The conjugate `ℓ̂(y, α) = sup_u { uα − ℓ(y, u) }` is what the dual
//! formulations consume. Outside its domain it is `+∞`.
//!
//! | kind       | `ℓ(y, u)`                 | `ℓ̂(y, α)`                          | domain            |
//! |------------|---------------------------|------------------------------------|-------------------|
//! | `ols`      | `½(y − u)²`               | `½α² + yα`                         | ℝ                 |
//! | `logistic` | `log(1 + e^{−yu})`        | `−H(−yα)`                          | `yα ∈ [−1, 0]`    |
//! | `hinge`    | `max(0, 1 − yu)`          | `yα`                               | `yα ∈ [−1, 0]`    |
//! | `l2svm`    | `½ max(0, 1 − yu)²`       | `½α² + yα`                         | `yα ≤ 0`          |
//! | `l1svr`    | `(|y − u| − ε)₊`          | `yα + ε|α|`                        | `|α| ≤ 1`         |
//! | `l2svr`    | `½ (|y − u| − ε)₊²`       | `½α² + yα + ε|α|`                  | ℝ                 |
//!
//! `H(x) = −x log x − (1 − x) log(1 − x)` is the binary entropy.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LossError {
    #[error("label {label} is not valid for the {kind} loss (expected -1 or +1)")]
    InvalidLabel { kind: LossKind, label: f64 },
    #[error("α = {alpha} is not in the interior of the {kind} conjugate domain (y = {label})")]
    OutsideDomain { kind: LossKind, label: f64, alpha: f64 },
    #[error("unknown loss '{0}' (expected one of ols, logistic, hinge, l2svm, l1svr, l2svr)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    Ols,
    Logistic,
    Hinge,
    /// Squared hinge ("2-norm SVM").
    L2Svm,
    /// ε-insensitive absolute loss ("1-norm SVR").
    L1Svr,
    /// Squared ε-insensitive loss ("2-norm SVR").
    L2Svr,
}

impl LossKind {
    pub const ALL: [LossKind; 6] = [
        LossKind::Ols,
        LossKind::Logistic,
        LossKind::Hinge,
        LossKind::L2Svm,
        LossKind::L1Svr,
        LossKind::L2Svr,
    ];

    /// Stable identifier used on the command line and in config files.
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Ols => "ols",
            LossKind::Logistic => "logistic",
            LossKind::Hinge => "hinge",
            LossKind::L2Svm => "l2svm",
            LossKind::L1Svr => "l1svr",
            LossKind::L2Svr => "l2svr",
        }
    }

    pub fn is_classification(self) -> bool {
        matches!(self, LossKind::Logistic | LossKind::Hinge | LossKind::L2Svm)
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = LossError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LossKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| LossError::UnknownKind(s.to_string()))
    }
}

/// A loss together with the constants its conjugate needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel {
    pub kind: LossKind,
    /// Insensitivity width of the SVR losses.
    pub svr_epsilon: f64,
    /// Interior margin τ: the logistic conjugate domain `yα ∈ (−1, 0)` is
    /// replaced by the closed set `yα ∈ [−1 + τ, −τ]` for projections.
    pub logistic_clamp: f64,
}

impl Default for LossModel {
    fn default() -> Self {
        Self::new(LossKind::Ols)
    }
}

impl From<LossKind> for LossModel {
    fn from(kind: LossKind) -> Self {
        Self::new(kind)
    }
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    z.signum() * (z.abs() - t).max(0.0)
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl LossModel {
    pub fn new(kind: LossKind) -> Self {
        Self { kind, svr_epsilon: 0.1, logistic_clamp: 1e-4 }
    }

    pub fn with_svr_epsilon(mut self, eps: f64) -> Self {
        self.svr_epsilon = eps;
        self
    }

    pub fn with_logistic_clamp(mut self, tau: f64) -> Self {
        self.logistic_clamp = tau;
        self
    }

    pub fn is_classification(&self) -> bool {
        self.kind.is_classification()
    }

    /// Classification losses only accept labels in {−1, +1}; regression
    /// losses accept any finite value.
    pub fn validate_label(&self, y: f64) -> Result<(), LossError> {
        let ok = if self.is_classification() { y == 1.0 || y == -1.0 } else { y.is_finite() };
        if ok {
            Ok(())
        } else {
            Err(LossError::InvalidLabel { kind: self.kind, label: y })
        }
    }

    pub fn validate_labels<'a>(&self, ys: impl IntoIterator<Item = &'a f64>) -> Result<(), LossError> {
        ys.into_iter().try_for_each(|&y| self.validate_label(y))
    }

    /// `ℓ(y, u)`.
    pub fn loss(&self, y: f64, u: f64) -> Result<f64, LossError> {
        self.validate_label(y)?;
        Ok(self.loss_unchecked(y, u))
    }

    pub(crate) fn loss_unchecked(&self, y: f64, u: f64) -> f64 {
        let eps = self.svr_epsilon;
        match self.kind {
            LossKind::Ols => 0.5 * (y - u).powi(2),
            LossKind::Logistic => softplus(-y * u),
            LossKind::Hinge => (1.0 - y * u).max(0.0),
            LossKind::L2Svm => 0.5 * (1.0 - y * u).max(0.0).powi(2),
            LossKind::L1Svr => ((y - u).abs() - eps).max(0.0),
            LossKind::L2Svr => 0.5 * ((y - u).abs() - eps).max(0.0).powi(2),
        }
    }

    /// Whether `α` lies in the closed conjugate domain.
    pub fn in_domain(&self, y: f64, alpha: f64) -> bool {
        let ya = y * alpha;
        match self.kind {
            LossKind::Ols | LossKind::L2Svr => alpha.is_finite(),
            LossKind::Logistic | LossKind::Hinge => (-1.0..=0.0).contains(&ya),
            LossKind::L2Svm => ya <= 0.0,
            LossKind::L1Svr => alpha.abs() <= 1.0,
        }
    }

    /// `ℓ̂(y, α)`, or `+∞` outside the domain.
    pub fn conjugate(&self, y: f64, alpha: f64) -> f64 {
        if !self.in_domain(y, alpha) {
            return f64::INFINITY;
        }
        let eps = self.svr_epsilon;
        match self.kind {
            LossKind::Ols | LossKind::L2Svm => 0.5 * alpha * alpha + y * alpha,
            LossKind::Logistic => {
                let x = -y * alpha;
                xlogx(x) + xlogx(1.0 - x)
            }
            LossKind::Hinge => y * alpha,
            LossKind::L1Svr => y * alpha + eps * alpha.abs(),
            LossKind::L2Svr => 0.5 * alpha * alpha + y * alpha + eps * alpha.abs(),
        }
    }

    /// Nearest point of the (interiorized, for logistic) conjugate domain.
    pub fn project(&self, y: f64, alpha: f64) -> f64 {
        let tau = self.logistic_clamp;
        match self.kind {
            LossKind::Ols | LossKind::L2Svr => alpha,
            LossKind::Logistic => y * (y * alpha).clamp(-1.0 + tau, -tau),
            LossKind::Hinge => y * (y * alpha).clamp(-1.0, 0.0),
            LossKind::L2Svm => y * (y * alpha).min(0.0),
            LossKind::L1Svr => alpha.clamp(-1.0, 1.0),
        }
    }

    /// `∂ℓ̂/∂α` at a point strictly inside the conjugate domain.
    ///
    /// Boundary points and the kink of the SVR conjugates at `α = 0` are
    /// rejected; solvers that step from the boundary use
    /// [`LossModel::conjugate_slope`] instead.
    pub fn conjugate_partial(&self, y: f64, alpha: f64) -> Result<f64, LossError> {
        self.validate_label(y)?;
        let ya = y * alpha;
        let interior = match self.kind {
            LossKind::Ols => alpha.is_finite(),
            LossKind::L2Svr => alpha.is_finite() && alpha != 0.0,
            LossKind::Logistic | LossKind::Hinge => ya > -1.0 && ya < 0.0,
            LossKind::L2Svm => ya < 0.0,
            LossKind::L1Svr => alpha.abs() < 1.0 && alpha != 0.0,
        };
        if !interior {
            return Err(LossError::OutsideDomain { kind: self.kind, label: y, alpha });
        }
        Ok(self.conjugate_slope(y, alpha))
    }

    /// Derivative of the conjugate's formula on the closed domain.
    ///
    /// At the SVR kink `α = 0` this returns `y`, the midpoint of the
    /// subdifferential `[y − ε, y + ε]`. For logistic the argument is pulled
    /// in from the domain ends so the value stays finite.
    pub fn conjugate_slope(&self, y: f64, alpha: f64) -> f64 {
        let eps = self.svr_epsilon;
        let sgn = |a: f64| if a > 0.0 { 1.0 } else if a < 0.0 { -1.0 } else { 0.0 };
        match self.kind {
            LossKind::Ols | LossKind::L2Svm => alpha + y,
            LossKind::Logistic => {
                let x = (-y * alpha).clamp(1e-300, 1.0 - 1e-16);
                -y * (x / (1.0 - x)).ln()
            }
            LossKind::Hinge => y,
            LossKind::L1Svr => y + eps * sgn(alpha),
            LossKind::L2Svr => alpha + y + eps * sgn(alpha),
        }
    }

    /// Center of the conjugate domain, used to initialize dual iterates.
    pub fn domain_center(&self, y: f64) -> f64 {
        match self.kind {
            LossKind::Logistic | LossKind::Hinge | LossKind::L2Svm => -0.5 * y,
            LossKind::L1Svr => 0.0,
            LossKind::Ols | LossKind::L2Svr => -y,
        }
    }

    /// Maximizes `−ℓ̂(y, α) − ½·a·α² − b·α` over the conjugate domain, `a ≥ 0`.
    ///
    /// This is the exact one-dimensional step of dual coordinate ascent. The
    /// logistic case solves its stationarity condition in logit coordinates
    /// by bracketed Newton iterations.
    pub fn coordinate_argmax(&self, y: f64, a: f64, b: f64) -> f64 {
        let eps = self.svr_epsilon;
        match self.kind {
            LossKind::Ols => -(y + b) / (1.0 + a),
            LossKind::L2Svr => -soft_threshold(y + b, eps) / (1.0 + a),
            LossKind::L2Svm => {
                let alpha = -(y + b) / (1.0 + a);
                if y * alpha > 0.0 {
                    0.0
                } else {
                    alpha
                }
            }
            LossKind::Hinge => {
                // Domain is the segment between 0 and −y.
                let (lo, hi) = if y > 0.0 { (-1.0, 0.0) } else { (0.0, 1.0) };
                if a > 0.0 {
                    (-(y + b) / a).clamp(lo, hi)
                } else {
                    let slope = -(y + b);
                    if slope > 0.0 {
                        hi
                    } else if slope < 0.0 {
                        lo
                    } else {
                        0.0
                    }
                }
            }
            LossKind::L1Svr => {
                if a > 0.0 {
                    (-soft_threshold(y + b, eps) / a).clamp(-1.0, 1.0)
                } else if (y + b).abs() > eps {
                    -(y + b).signum()
                } else {
                    0.0
                }
            }
            LossKind::Logistic => {
                // With x = −yα ∈ (0,1) and t = logit(x) the stationarity
                // condition reads g(t) = −t − a·σ(t) + b·y = 0, g decreasing,
                // with the root bracketed by [by − a, by].
                let c = b * y;
                let g = |t: f64| -t - a * sigmoid(t) + c;
                let (mut lo, mut hi) = (c - a, c);
                let mut t = 0.5 * (lo + hi);
                for _ in 0..200 {
                    let gt = g(t);
                    if gt > 0.0 {
                        lo = t;
                    } else {
                        hi = t;
                    }
                    let s = sigmoid(t);
                    let dg = -1.0 - a * s * (1.0 - s);
                    let mut next = t - gt / dg;
                    if !(next > lo && next < hi) {
                        next = 0.5 * (lo + hi);
                    }
                    if (next - t).abs() <= 1e-15 * (1.0 + t.abs()) || hi - lo <= 1e-15 * (1.0 + t.abs()) {
                        t = next;
                        break;
                    }
                    t = next;
                }
                -y * sigmoid(t)
            }
        }
    }
}
