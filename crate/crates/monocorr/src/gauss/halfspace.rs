//! Halfspaces under the standard Gaussian measure: influence vectors, the
//! correlated threshold-pair audit, the nested-pair audit, and the small-r
//! floor check for the normalized density ratio.

use super::normal::{ln_pdf, pdf, upper_tail, LN_2PI};
use super::plackett::{h_integrand, plackett_orthant, GaussError, GaussianPair};
use super::quad::QuadratureConfig;
use crate::report::{AuditReport, CovValue, RatioValue};

/// `{x : <w, x> > t}` with `w` a unit vector.
///
/// Construction accepts a weight vector whose norm is within 1e-12 of 1 and
/// renormalizes it, so downstream formulas may assume an exact unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    w: Vec<f64>,
    t: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HalfspaceError {
    #[error("weight vector must be non-empty and finite")]
    BadWeights,
    #[error("weight norm {norm} is not within 1e-12 of 1")]
    NotUnit { norm: f64 },
    #[error("threshold must be finite")]
    BadThreshold,
    #[error("coordinate {k} out of range for dimension {n}")]
    CoordinateOutOfRange { k: usize, n: usize },
    #[error("halfspaces have different dimensions {left} and {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("floor check needs t >= 1, k >= 1, samples >= 2")]
    FloorDomain,
    #[error("nested-pair audit needs t >= 1")]
    ThresholdTooSmall,
    #[error(transparent)]
    Gauss(#[from] GaussError),
}

impl Halfspace {
    /// `w` must already be a unit vector to within 1e-12; it is divided by
    /// its exact norm so the stored direction is unit to working precision.
    pub fn new(w: Vec<f64>, t: f64) -> Result<Self, HalfspaceError> {
        if w.is_empty() || w.iter().any(|x| !x.is_finite()) {
            return Err(HalfspaceError::BadWeights);
        }
        if !t.is_finite() {
            return Err(HalfspaceError::BadThreshold);
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(HalfspaceError::NotUnit { norm });
        }
        let w = w.into_iter().map(|x| x / norm).collect();
        Ok(Halfspace { w, t })
    }

    /// Normalize an arbitrary nonzero direction into a halfspace.
    pub fn from_direction(raw: &[f64], t: f64) -> Result<Self, HalfspaceError> {
        if raw.is_empty() || raw.iter().any(|x| !x.is_finite()) {
            return Err(HalfspaceError::BadWeights);
        }
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(HalfspaceError::BadWeights);
        }
        let w: Vec<f64> = raw.iter().map(|x| x / norm).collect();
        if !t.is_finite() {
            return Err(HalfspaceError::BadThreshold);
        }
        Ok(Halfspace { w, t })
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn threshold(&self) -> f64 {
        self.t
    }

    /// Gaussian measure of the halfspace.
    pub fn measure(&self) -> f64 {
        upper_tail(self.t)
    }

    /// `<w_a, w_b>`, clamped into [-1, 1] and snapped to 0 when it is pure
    /// rounding noise (|dot| < 1e-12), so orthogonal constructions report
    /// exactly vacuous correlation.
    pub fn correlation(&self, other: &Halfspace) -> Result<f64, HalfspaceError> {
        if self.dim() != other.dim() {
            return Err(HalfspaceError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let dot: f64 = self.w.iter().zip(&other.w).map(|(a, b)| a * b).sum();
        let dot = dot.clamp(-1.0, 1.0);
        Ok(if dot.abs() < 1e-12 { 0.0 } else { dot })
    }
}

/// Influence vectors of a halfspace, in both sign conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceInfluences {
    /// `E[sgn(<w,x> - t) x_k] = 2 pdf(t) w_k`.
    pub signed: Vec<f64>,
    /// Indicator convention `E[1_{<w,x> > t} x_k] = pdf(t) w_k`.
    pub indicator: Vec<f64>,
}

/// Both influence vectors; each is proportional to `w`.
pub fn halfspace_influences(h: &Halfspace) -> HalfspaceInfluences {
    let d = pdf(h.t);
    HalfspaceInfluences {
        signed: h.w.iter().map(|wk| 2.0 * d * wk).collect(),
        indicator: h.w.iter().map(|wk| d * wk).collect(),
    }
}

/// `log(e / pdf(t)^2)` computed in log space; always >= 1.
fn log_e_over_pdf_sq(t: f64) -> f64 {
    1.0 - 2.0 * ln_pdf(t)
}

/// Audit a correlated pair of Gaussian thresholds `(t, s)` at correlation
/// `rho >= 0`: exact-quadrature covariance of the two halfline indicators
/// against the first-level bound core
/// `W1 / sqrt(log(e/W1(A,A))) sqrt(log(e/W1(B,B)))`
/// with `W1 = rho pdf(t) pdf(s)` in the indicator convention.
///
/// Extras carry both `W1` conventions (the signed one is 4x) and the
/// self-pair weights. `n` is recorded as the given ambient dimension.
pub fn threshold_pair_report(
    label: String,
    n: u32,
    t: f64,
    s: f64,
    rho: f64,
    cfg: &QuadratureConfig,
) -> Result<AuditReport, HalfspaceError> {
    let pair = GaussianPair::new(t, s, rho)?;
    let cov = plackett_orthant(&pair, cfg)? - upper_tail(t) * upper_tail(s);
    // log-space product, exponentiated once
    let w1_indicator = if rho == 0.0 {
        0.0
    } else {
        (rho.ln() + ln_pdf(t) + ln_pdf(s)).exp()
    };
    let denom = (log_e_over_pdf_sq(t) * log_e_over_pdf_sq(s)).sqrt();
    let rhs_core = w1_indicator / denom;
    let (ratio, note) = if rho == 0.0 {
        (RatioValue::Vacuous, Some("rho = 0".to_string()))
    } else {
        (RatioValue::Finite(cov / rhs_core), None)
    };
    Ok(AuditReport {
        label,
        n,
        inequality: "halfspace_pair",
        cov: CovValue::Real(cov),
        rhs_core,
        ratio,
        descriptors: vec![format!("threshold {t}"), format!("threshold {s}")],
        note,
        extras: vec![
            ("rho", rho),
            ("w1_indicator", w1_indicator),
            ("w1_signed", 4.0 * w1_indicator),
            ("w1_self_a", (2.0 * ln_pdf(t)).exp()),
            ("w1_self_b", (2.0 * ln_pdf(s)).exp()),
        ],
    })
}

/// Audit a pair of halfspaces: correlation is `<w_a, w_b>`, which must be
/// nonnegative; the rest reduces to [`threshold_pair_report`].
pub fn ltf_pair_report(
    a: &Halfspace,
    b: &Halfspace,
    cfg: &QuadratureConfig,
) -> Result<AuditReport, HalfspaceError> {
    let rho = a.correlation(b)?;
    if rho < 0.0 {
        return Err(HalfspaceError::Gauss(GaussError::NegativeCorrelation {
            rho,
        }));
    }
    let label = format!("ltf_pair_t{}_s{}_r{}", a.t, b.t, rho);
    threshold_pair_report(label, a.dim() as u32, a.t, b.t, rho, cfg)
}

/// Audit the nested pair `{x1 > t}` vs `{x1 > -t}` for `t >= 1`.
///
/// The intersection is the smaller halfspace, so the covariance collapses
/// to the closed form `upper_tail(t)^2` (no quadrature); the bound core is
/// the simplified `pdf(t)^2 / (t^2 + 1)`. The audit expectation is
/// ratio <= 2. The variant with the exact logarithm
/// `pdf(t)^2 / (1 + t^2 + ln 2pi)` is recorded in extras.
pub fn nested_pair_report(t: f64) -> Result<AuditReport, HalfspaceError> {
    if !(t >= 1.0) || !t.is_finite() {
        return Err(HalfspaceError::ThresholdTooSmall);
    }
    let tail = upper_tail(t);
    let cov = tail * tail;
    let pdf_sq = (2.0 * ln_pdf(t)).exp();
    let rhs_core = pdf_sq / (t * t + 1.0);
    let rhs_core_exact_log = pdf_sq / (1.0 + t * t + LN_2PI);
    Ok(AuditReport {
        label: format!("nested_t{t}"),
        n: 1,
        inequality: "nested_halfspace",
        cov: CovValue::Real(cov),
        rhs_core,
        ratio: RatioValue::Finite(cov / rhs_core),
        descriptors: vec![format!("threshold {t}"), format!("threshold {}", -t)],
        note: None,
        extras: vec![
            ("tail", tail),
            ("rhs_core_exact_log", rhs_core_exact_log),
            ("ratio_exact_log", cov / rhs_core_exact_log),
        ],
    })
}

/// Result of [`h_small_r_floor`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HFloorCheck {
    pub min_h: f64,
    pub pass: bool,
}

/// Check that `h_r(t, -k) >= 1/e` across `samples` equispaced `r` in
/// `[0, 1/(2tk)]`, for `t, k >= 1`.
///
/// On that range the exponent of `h` is a small negative quantity of order
/// `1/(tk)`; the floor `1/e` (with 1e-12 slack for roundoff) is the bound
/// the opposite-threshold covariance analysis relies on.
pub fn h_small_r_floor(t: f64, k: f64, samples: u32) -> Result<HFloorCheck, HalfspaceError> {
    if !(t >= 1.0 && k >= 1.0) || !t.is_finite() || !k.is_finite() || samples < 2 {
        return Err(HalfspaceError::FloorDomain);
    }
    let r_max = 1.0 / (2.0 * t * k);
    let mut min_h = f64::INFINITY;
    for i in 0..samples {
        let r = r_max * (i as f64) / ((samples - 1) as f64);
        let h = h_integrand(r, t, -k)?;
        if h < min_h {
            min_h = h;
        }
    }
    let floor = (-1.0f64).exp() - 1e-12;
    Ok(HFloorCheck {
        min_h,
        pass: min_h >= floor,
    })
}
