//! Audit engine for correlation inequalities between monotone events, on
//! the discrete cube and on Gaussian space.
//!
//! The cube side ([`cube`], [`bounds`]) enumerates packed truth tables and
//! proves its inequalities in exact rational arithmetic: Harris positivity,
//! influence-weighted lower bounds in the Talagrand and KKM forms, majority
//! correlation bounds, and the KKL maximum-influence ratio. The Gaussian
//! side ([`gauss`], [`stieltjes`]) evaluates orthant probabilities and
//! covariance lower bounds for correlated halfspaces and monotone step
//! transforms through stable closed forms and adaptive quadrature over the
//! correlation path. Seeded Monte-Carlo estimators ([`mc`]) provide an
//! independent oracle for every closed form, and regression pins ([`pins`])
//! freeze the observed constants so reruns are bit-reproducible.
//!
//! Entry points for a full audit campaign live in [`catalog`] and the
//! `monocorr` command-line binary.

pub mod bounds;
pub mod catalog;
pub mod cube;
pub mod gauss;
pub mod mc;
pub mod pins;
pub mod report;
pub mod stieltjes;

pub use report::{fmt_float, AuditReport, CovValue, RatioValue};

// Compile and run every code block in the guide as a doctest, so the book
// can never drift from the library it documents.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub struct $name;
        };
    }

    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(Cube, "../../../book/src/cube.md");
    chapter!(Bounds, "../../../book/src/bounds.md");
    chapter!(Gaussian, "../../../book/src/gaussian.md");
    chapter!(StepFunctions, "../../../book/src/step-functions.md");
    chapter!(MonteCarlo, "../../../book/src/monte-carlo.md");
    chapter!(Cli, "../../../book/src/cli.md");
}
