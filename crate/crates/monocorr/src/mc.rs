//! Seeded Monte-Carlo estimators with empirical standard errors, the
//! independent oracle for every Gaussian closed form and quadrature result.
//!
//! Reproducibility contract: a given (samples, seed, streams) triple yields
//! bit-identical estimates. Stream `j` owns its own counter-based generator
//! (same seed, stream id `j`) and a fixed share of the sample budget;
//! accumulators merge in stream-index order, so any scheduling of the
//! streams produces the same bytes. Normal variates come from the
//! inverse-distribution transform, which consumes exactly one 64-bit word
//! each, keeping streams alignment-free.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gauss::halfspace::Halfspace;
use crate::gauss::normal::{inverse_cdf, pdf};
use crate::gauss::plackett::GaussianPair;
use crate::stieltjes::MonotoneStep;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    /// Total samples across all streams; >= 100.
    pub samples: u64,
    pub seed: u64,
    /// Partition count; >= 1. Part of the reproducibility key.
    pub streams: u32,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 1_000_000,
            seed: 0,
            streams: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum McError {
    #[error("need at least 100 samples, got {0}")]
    TooFewSamples(u64),
    #[error("need at least one stream")]
    NoStreams,
    #[error("coordinate {k} out of range for dimension {n}")]
    CoordinateOutOfRange { k: usize, n: usize },
    #[error("sectional influence needs w[{k}] > 0")]
    NonPositiveWeight { k: usize },
}

/// Sample mean with its empirical standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

impl Estimate {
    /// |mean - reference| <= width * std_error.
    pub fn within(&self, reference: f64, width: f64) -> bool {
        (self.mean - reference).abs() <= width * self.std_error
    }
}

impl McConfig {
    fn validate(&self) -> Result<(), McError> {
        if self.samples < 100 {
            return Err(McError::TooFewSamples(self.samples));
        }
        if self.streams == 0 {
            return Err(McError::NoStreams);
        }
        Ok(())
    }

    /// Sample counts per stream: the budget split as evenly as possible,
    /// earlier streams taking the remainder.
    fn stream_counts(&self) -> Vec<u64> {
        let s = self.streams as u64;
        let base = self.samples / s;
        let extra = self.samples % s;
        (0..s).map(|j| base + u64::from(j < extra)).collect()
    }

    fn stream_rng(&self, j: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(j);
        rng
    }
}

/// Uniform in (0, 1): the top 53 bits, offset half a grid step.
pub(crate) fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    inverse_cdf(uniform(rng))
}

/// `-1` on the closed lower halfline, matching the convention that ties
/// count as absent.
pub(crate) fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn estimate_scalar<F: FnMut(&mut ChaCha8Rng) -> f64>(
    cfg: &McConfig,
    mut draw: F,
) -> Result<Estimate, McError> {
    cfg.validate()?;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for (j, count) in cfg.stream_counts().into_iter().enumerate() {
        let mut rng = cfg.stream_rng(j as u64);
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..count {
            let y = draw(&mut rng);
            s += y;
            s2 += y * y;
        }
        // merge in stream-index order
        sum += s;
        sumsq += s2;
    }
    let n = cfg.samples as f64;
    let mean = sum / n;
    let var = ((sumsq - sum * sum / n) / (n - 1.0)).max(0.0);
    Ok(Estimate {
        mean,
        std_error: (var / n).sqrt(),
        n: cfg.samples,
    })
}

/// Draw a correlated pair: `eta = rho xi + sqrt(1 - rho^2) g`. Both
/// normals are always consumed so the stream layout is rho-independent.
fn correlated_pair(rng: &mut ChaCha8Rng, rho: f64) -> (f64, f64) {
    let xi = normal(rng);
    let g = normal(rng);
    let eta = rho * xi + ((1.0 - rho) * (1.0 + rho)).sqrt() * g;
    (xi, eta)
}

/// Estimate the orthant probability `P(xi > t, eta > s)`.
pub fn mc_orthant(p: &GaussianPair, cfg: &McConfig) -> Result<Estimate, McError> {
    let (t, s, rho) = (p.t(), p.s(), p.rho());
    estimate_scalar(cfg, move |rng| {
        let (xi, eta) = correlated_pair(rng, rho);
        f64::from(xi > t && eta > s)
    })
}

/// Estimate the signed influence `E[sgn(<w, x> - t) x_k]`; closed form
/// `2 pdf(t) w_k`.
pub fn mc_halfspace_influence(
    h: &Halfspace,
    k: usize,
    cfg: &McConfig,
) -> Result<Estimate, McError> {
    let n = h.dim();
    if k >= n {
        return Err(McError::CoordinateOutOfRange { k, n });
    }
    let w = h.weights().to_vec();
    let t = h.threshold();
    let mut x = vec![0.0; n];
    estimate_scalar(cfg, move |rng| {
        for xi in x.iter_mut() {
            *xi = normal(rng);
        }
        let dot: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
        sgn(dot - t) * x[k]
    })
}

/// Estimate the sectional influence: sample the other coordinates, find
/// the section's entry threshold `t_k(x) = (t - sum_{j != k} w_j x_j)/w_k`,
/// and average the Gaussian boundary weight `pdf(t_k(x))`. Closed form
/// `pdf(t) w_k`. Requires `w_k > 0`.
///
/// With n = 1 there is nothing to sample and the value `pdf(t/w_k)` is
/// returned exactly with zero standard error.
pub fn mc_sectional_influence(
    h: &Halfspace,
    k: usize,
    cfg: &McConfig,
) -> Result<Estimate, McError> {
    let n = h.dim();
    if k >= n {
        return Err(McError::CoordinateOutOfRange { k, n });
    }
    let w = h.weights().to_vec();
    if w[k] <= 0.0 {
        return Err(McError::NonPositiveWeight { k });
    }
    let t = h.threshold();
    if n == 1 {
        cfg.validate()?;
        return Ok(Estimate {
            mean: pdf(t / w[k]),
            std_error: 0.0,
            n: cfg.samples,
        });
    }
    estimate_scalar(cfg, move |rng| {
        let mut rest = 0.0;
        for (j, wj) in w.iter().enumerate() {
            if j != k {
                rest += wj * normal(rng);
            }
        }
        pdf((t - rest) / w[k])
    })
}

#[derive(Default, Clone, Copy)]
struct CovSums {
    sx: f64,
    sy: f64,
    sxy: f64,
    sxx: f64,
    syy: f64,
    sxxy: f64,
    sxyy: f64,
    sxxyy: f64,
}

impl CovSums {
    fn push(&mut self, x: f64, y: f64) {
        let (xx, yy, xy) = (x * x, y * y, x * y);
        self.sx += x;
        self.sy += y;
        self.sxy += xy;
        self.sxx += xx;
        self.syy += yy;
        self.sxxy += xx * y;
        self.sxyy += x * yy;
        self.sxxyy += xx * yy;
    }

    fn merge(&mut self, o: &CovSums) {
        self.sx += o.sx;
        self.sy += o.sy;
        self.sxy += o.sxy;
        self.sxx += o.sxx;
        self.syy += o.syy;
        self.sxxy += o.sxxy;
        self.sxyy += o.sxyy;
        self.sxxyy += o.sxxyy;
    }
}

/// Estimate `Cov(f(Z1), g(Z2))` over a correlated standard normal pair.
///
/// The standard error comes from the empirical variance of the centered
/// product `W = (X - mean X)(Y - mean Y)` (first-order delta method), built
/// from raw power sums so stream merging stays order-deterministic.
pub fn mc_general_cov(
    f: &MonotoneStep,
    g: &MonotoneStep,
    rho: f64,
    cfg: &McConfig,
) -> Result<Estimate, McError> {
    cfg.validate()?;
    let mut total = CovSums::default();
    for (j, count) in cfg.stream_counts().into_iter().enumerate() {
        let mut rng = cfg.stream_rng(j as u64);
        let mut part = CovSums::default();
        for _ in 0..count {
            let (xi, eta) = correlated_pair(&mut rng, rho);
            part.push(f.evaluate(xi), g.evaluate(eta));
        }
        total.merge(&part);
    }
    let n = cfg.samples as f64;
    let (mx, my) = (total.sx / n, total.sy / n);
    let cov = total.sxy / n - mx * my;
    // (1/n) sum (x - mx)^2 (y - my)^2, expanded over the raw sums
    let c22 = (total.sxxyy - 2.0 * my * total.sxxy - 2.0 * mx * total.sxyy
        + my * my * total.sxx
        + 4.0 * mx * my * total.sxy
        + mx * mx * total.syy
        - 2.0 * mx * my * my * total.sx
        - 2.0 * mx * mx * my * total.sy
        + n * mx * mx * my * my)
        / n;
    let var_w = (c22 - cov * cov).max(0.0);
    Ok(Estimate {
        mean: cov,
        std_error: (var_w / n).sqrt(),
        n: cfg.samples,
    })
}
