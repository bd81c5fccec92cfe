//! Bivariate normal orthant probabilities via the Plackett identity, the
//! sign-covariance integral, and the normalized ratio whose grid infimum
//! calibrates the halfspace covariance lower bound.
//!
//! The Plackett identity says the orthant probability P(xi > t, eta > s)
//! under correlation rho equals the independent product plus the integral
//! of the bivariate density over correlations r in [0, rho]. Everything
//! here reduces to one-dimensional quadrature of that integrand or of its
//! normalized cousin h_r = phi_r / (pdf(t) pdf(s)).
//!
//! Exponents are evaluated in the cancellation-free arrangements
//!
//! ```text
//! Q(r,t,s) = (t-s)^2 / (2(1-r^2)) + ts/(1+r)        (phi_r = e^{-Q} / (2 pi sqrt(1-r^2)))
//! E(r,t,s) = ts r/(1+r) - (t-s)^2 r^2 / (2(1-r^2))  (h_r  = e^{E} / sqrt(1-r^2))
//! ```
//!
//! with `1 - r^2` always formed as `(1-r)(1+r)`. Both are algebraically
//! equal to the textbook forms but avoid the catastrophic subtraction the
//! naive exponent suffers when r is near 1 and t is near s.

use super::normal::upper_tail;
use super::quad::{integrate, QuadOutcome, QuadratureConfig, QuadratureError};

/// A pair of halfline thresholds under a given correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPair {
    t: f64,
    s: f64,
    rho: f64,
}

impl GaussianPair {
    /// Requires finite thresholds and `rho` in `[-1, 1]`.
    pub fn new(t: f64, s: f64, rho: f64) -> Result<Self, GaussError> {
        if !t.is_finite() || !s.is_finite() {
            return Err(GaussError::NonFiniteThreshold);
        }
        if !(-1.0..=1.0).contains(&rho) {
            return Err(GaussError::CorrelationOutOfRange { rho });
        }
        Ok(GaussianPair { t, s, rho })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn require_nonnegative_rho(&self) -> Result<(), GaussError> {
        if self.rho < 0.0 {
            return Err(GaussError::NegativeCorrelation { rho: self.rho });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GaussError {
    #[error("thresholds must be finite")]
    NonFiniteThreshold,
    #[error("correlation {rho} outside [-1, 1]")]
    CorrelationOutOfRange { rho: f64 },
    #[error("correlation {rho} is negative; this audit is stated for rho >= 0")]
    NegativeCorrelation { rho: f64 },
    #[error("density requires |r| < 1, got r = {r}")]
    DensityCorrelation { r: f64 },
    #[error("quadrature: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("quadrature at grid point (t={t}, s={s}, rho={rho}): {source}")]
    GridQuadrature {
        t: f64,
        s: f64,
        rho: f64,
        source: QuadratureError,
    },
    #[error("grid axis needs finite lo <= hi and points >= 1 (points >= 2 when lo < hi)")]
    BadGridAxis,
}

/// `(t-s)^2 / (2(1-r^2)) + ts/(1+r)`, the density exponent.
fn q_exponent(r: f64, t: f64, s: f64) -> f64 {
    let d = t - s;
    let one_minus_r2 = (1.0 - r) * (1.0 + r);
    d * d / (2.0 * one_minus_r2) + t * s / (1.0 + r)
}

/// `ts r/(1+r) - (t-s)^2 r^2 / (2(1-r^2))`, the ratio exponent.
fn e_exponent(r: f64, t: f64, s: f64) -> f64 {
    let d = t - s;
    let one_minus_r2 = (1.0 - r) * (1.0 + r);
    t * s * r / (1.0 + r) - d * d * r * r / (2.0 * one_minus_r2)
}

/// Bivariate standard normal density with correlation `r` at `(t, s)`.
pub fn bivariate_density(r: f64, t: f64, s: f64) -> Result<f64, GaussError> {
    if !(r.abs() < 1.0) {
        return Err(GaussError::DensityCorrelation { r });
    }
    let one_minus_r2 = (1.0 - r) * (1.0 + r);
    Ok((-q_exponent(r, t, s)).exp() / (2.0 * std::f64::consts::PI * one_minus_r2.sqrt()))
}

/// Normalized density ratio `h_r(t,s)` with `phi_r = pdf(t) pdf(s) h_r`.
pub fn h_integrand(r: f64, t: f64, s: f64) -> Result<f64, GaussError> {
    if !(r.abs() < 1.0) {
        return Err(GaussError::DensityCorrelation { r });
    }
    let one_minus_r2 = (1.0 - r) * (1.0 + r);
    Ok(e_exponent(r, t, s).exp() / one_minus_r2.sqrt())
}

/// `int_0^rho phi_r(t,s) dr` through the substitution `r = sin theta`.
///
/// In theta the integrand is `exp(-Q(sin theta, t, s)) / (2 pi)`, smooth on
/// the closed interval even at rho = 1 (the sqrt singularity is absorbed by
/// the Jacobian), so plain adaptive quadrature converges fast.
fn plackett_correction_theta(
    t: f64,
    s: f64,
    rho: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadOutcome, QuadratureError> {
    let theta_max = rho.asin();
    integrate(
        |theta| {
            let r = theta.sin();
            (-q_exponent(r, t, s)).exp() / (2.0 * std::f64::consts::PI)
        },
        0.0,
        theta_max,
        cfg,
    )
}

/// `P(xi > t, eta > s)` for a standard bivariate normal pair.
///
/// rho must lie in `[0, 1]`. For rho < 1 this is the Plackett integral
/// `upper_tail(t) upper_tail(s) + int_0^rho phi_r dr`; at rho = 1 the
/// variables coincide and the closed form `upper_tail(max(t, s))` is used.
pub fn plackett_orthant(p: &GaussianPair, cfg: &QuadratureConfig) -> Result<f64, GaussError> {
    p.require_nonnegative_rho()?;
    if p.rho == 1.0 {
        return Ok(upper_tail(p.t.max(p.s)));
    }
    let product = upper_tail(p.t) * upper_tail(p.s);
    if p.rho == 0.0 {
        return Ok(product);
    }
    let correction = plackett_correction_theta(p.t, p.s, p.rho, cfg)?;
    Ok(product + correction.value)
}

/// `Cov(sgn(xi - t), sgn(eta - s)) = 4 int_0^rho phi_r(t,s) dr`, rho in [0, 1].
///
/// Deliberately integrates in the raw r variable (no theta substitution) for
/// rho <= 0.98 so the orthant identity check exercises two genuinely
/// different quadrature paths; near the r = 1 endpoint the sqrt singularity
/// makes the raw path slow, so the theta path takes over.
pub fn sign_cov(p: &GaussianPair, cfg: &QuadratureConfig) -> Result<f64, GaussError> {
    p.require_nonnegative_rho()?;
    if p.rho == 0.0 {
        return Ok(0.0);
    }
    let outcome = if p.rho <= 0.98 {
        integrate(
            |r| {
                let one_minus_r2 = (1.0 - r) * (1.0 + r);
                (-q_exponent(r, p.t, p.s)).exp()
                    / (2.0 * std::f64::consts::PI * one_minus_r2.sqrt())
            },
            0.0,
            p.rho,
            cfg,
        )?
    } else {
        plackett_correction_theta(p.t, p.s, p.rho, cfg)?
    };
    Ok(4.0 * outcome.value)
}

/// Normalized covariance ratio
/// `Gamma(t,s,rho) = 4 (1+|t|)(1+|s|) / rho * int_0^rho h_r(t,s) dr`,
/// extended continuously to `4 (1+|t|)(1+|s|)` at rho = 0.
///
/// The integral runs in theta (`h_r dr = exp(E(sin theta)) d theta`), which
/// keeps the rho = 1 endpoint regular. rho must lie in `[0, 1]`.
pub fn gamma_ratio(p: &GaussianPair, cfg: &QuadratureConfig) -> Result<f64, GaussError> {
    p.require_nonnegative_rho()?;
    let front = 4.0 * (1.0 + p.t.abs()) * (1.0 + p.s.abs());
    if p.rho == 0.0 {
        return Ok(front);
    }
    let outcome = integrate(
        |theta| e_exponent(theta.sin(), p.t, p.s).exp(),
        0.0,
        p.rho.asin(),
        cfg,
    )?;
    Ok(front / p.rho * outcome.value)
}

/// One axis of a rectangular scan grid: `points` equispaced values from
/// `lo` to `hi` inclusive. A single-point axis requires `lo == hi`.
#[derive(Debug, Clone, Copy)]
pub struct GridAxis {
    lo: f64,
    hi: f64,
    points: u32,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, points: u32) -> Result<Self, GaussError> {
        let shape_ok = lo.is_finite()
            && hi.is_finite()
            && lo <= hi
            && points >= 1
            && (points >= 2 || lo == hi);
        if !shape_ok {
            return Err(GaussError::BadGridAxis);
        }
        Ok(GridAxis { lo, hi, points })
    }

    pub fn points(&self) -> u32 {
        self.points
    }

    pub fn value(&self, i: u32) -> f64 {
        debug_assert!(i < self.points);
        if self.points == 1 {
            return self.lo;
        }
        if i == self.points - 1 {
            return self.hi; // hit the endpoint exactly
        }
        self.lo + (self.hi - self.lo) * (i as f64) / ((self.points - 1) as f64)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.value(i))
    }
}

/// Result of a [`gamma_grid_min`] scan.
#[derive(Debug, Clone, Copy)]
pub struct GammaGridMin {
    pub min: f64,
    pub argmin: GaussianPair,
}

/// Minimum of [`gamma_ratio`] over the product grid, with its argmin.
///
/// The scan runs in lexicographic (t, s, rho) order and only a strictly
/// smaller value displaces the incumbent, so ties resolve to the
/// lexicographically first point and the result is deterministic.
pub fn gamma_grid_min(
    t_axis: &GridAxis,
    s_axis: &GridAxis,
    rho_axis: &GridAxis,
    cfg: &QuadratureConfig,
) -> Result<GammaGridMin, GaussError> {
    if rho_axis.lo < 0.0 || rho_axis.hi > 1.0 {
        return Err(GaussError::BadGridAxis);
    }
    let mut best: Option<GammaGridMin> = None;
    for t in t_axis.values() {
        for s in s_axis.values() {
            for rho in rho_axis.values() {
                let p = GaussianPair::new(t, s, rho)?;
                let gamma = gamma_ratio(&p, cfg).map_err(|e| match e {
                    GaussError::Quadrature(source) => {
                        GaussError::GridQuadrature { t, s, rho, source }
                    }
                    other => other,
                })?;
                let better = match &best {
                    None => true,
                    Some(b) => gamma < b.min,
                };
                if better {
                    best = Some(GammaGridMin { min: gamma, argmin: p });
                }
            }
        }
    }
    best.ok_or(GaussError::BadGridAxis)
}
