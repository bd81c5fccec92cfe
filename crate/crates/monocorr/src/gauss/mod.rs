//! Gaussian-side machinery: stable normal primitives, adaptive quadrature,
//! Plackett-integral orthant probabilities, and halfspace audits.

pub mod halfspace;
pub mod normal;
pub mod plackett;
pub mod quad;

pub use halfspace::{
    h_small_r_floor, halfspace_influences, ltf_pair_report, nested_pair_report,
    threshold_pair_report, HFloorCheck, Halfspace, HalfspaceError, HalfspaceInfluences,
};
pub use normal::{erfc, inverse_cdf, ln_pdf, ln_upper_tail, pdf, upper_tail};
pub use plackett::{
    bivariate_density, gamma_grid_min, gamma_ratio, h_integrand, plackett_orthant, sign_cov,
    GammaGridMin, GaussError, GaussianPair, GridAxis,
};
pub use quad::{integrate, QuadOutcome, QuadratureConfig, QuadratureError};
