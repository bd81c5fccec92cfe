//! Monotone step functions, their atomic measures, the moment functionals
//! a and b, the log-moment bound, and the correlated covariance that
//! reduces to a finite double sum of orthant probabilities over atoms.

use serde::{Deserialize, Serialize};

use crate::gauss::normal::pdf;
use crate::gauss::plackett::{plackett_orthant, GaussError, GaussianPair};
use crate::gauss::quad::{integrate, QuadratureConfig};
use crate::gauss::upper_tail;
use crate::report::{AuditReport, CovValue, RatioValue};

/// A non-decreasing, left-continuous step function with values in [0, 1]:
/// `f(x) = base + sum of jumps at breakpoints strictly below x`.
///
/// Its distributional derivative is the purely atomic measure placing mass
/// `jump_j` at `t_j`; every functional below is a finite sum over atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneStep {
    base: f64,
    atoms: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StieltjesError {
    #[error("breakpoints must be finite and strictly increasing")]
    BreakpointsNotIncreasing,
    #[error("jumps must be positive and finite")]
    BadJump,
    #[error("base must be finite and >= 0")]
    BadBase,
    #[error("range overflow: base + total jump mass {0} exceeds 1")]
    RangeOverflow(f64),
    #[error("weight vector must be unit length within 1e-12, got norm {norm}")]
    NotUnit { norm: f64 },
    #[error("direction vectors have different dimensions {left} and {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("step descriptor: {0}")]
    BadDescriptor(String),
    #[error(transparent)]
    Gauss(#[from] GaussError),
}

#[derive(Serialize, Deserialize)]
struct StepSpec {
    base: f64,
    atoms: Vec<(f64, f64)>,
}

impl MonotoneStep {
    /// `atoms` as (breakpoint, jump) pairs with strictly increasing finite
    /// breakpoints, positive jumps, and `base + total mass <= 1`.
    pub fn new(base: f64, atoms: Vec<(f64, f64)>) -> Result<Self, StieltjesError> {
        if !base.is_finite() || base < 0.0 {
            return Err(StieltjesError::BadBase);
        }
        let mut total = base;
        for (i, &(t, d)) in atoms.iter().enumerate() {
            if !t.is_finite() {
                return Err(StieltjesError::BreakpointsNotIncreasing);
            }
            if i > 0 && atoms[i - 1].0 >= t {
                return Err(StieltjesError::BreakpointsNotIncreasing);
            }
            if !d.is_finite() || d <= 0.0 {
                return Err(StieltjesError::BadJump);
            }
            total += d;
        }
        if total > 1.0 {
            return Err(StieltjesError::RangeOverflow(total));
        }
        Ok(MonotoneStep { base, atoms })
    }

    /// The constant function `f = base` (empty measure).
    pub fn constant(base: f64) -> Result<Self, StieltjesError> {
        MonotoneStep::new(base, Vec::new())
    }

    /// Left-continuous evaluation: jumps at `x` itself are excluded.
    pub fn evaluate(&self, x: f64) -> f64 {
        let mut v = self.base;
        for &(t, d) in &self.atoms {
            if t < x {
                v += d;
            } else {
                break;
            }
        }
        v
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Total atomic mass.
    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, d)| d).sum()
    }

    /// `{"base": 0.0, "atoms": [[t, jump], ...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&StepSpec {
            base: self.base,
            atoms: self.atoms.clone(),
        })
        .expect("step spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, StieltjesError> {
        let spec: StepSpec =
            serde_json::from_str(s).map_err(|e| StieltjesError::BadDescriptor(e.to_string()))?;
        MonotoneStep::new(spec.base, spec.atoms)
    }
}

/// The mass and the two Gaussian moment functionals of a step function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesMoments {
    /// Total atomic mass.
    pub mass: f64,
    /// `a = sum jump_j pdf(t_j)`, the Gaussian first-level weight.
    pub a: f64,
    /// `b = sum jump_j (1 + |t_j|) pdf(t_j)`.
    pub b: f64,
}

/// Exact finite-sum moments, accumulated in atom order.
pub fn moments(f: &MonotoneStep) -> StieltjesMoments {
    let mut mass = 0.0;
    let mut a = 0.0;
    let mut b = 0.0;
    for &(t, d) in f.atoms() {
        let p = pdf(t);
        mass += d;
        a += d * p;
        b += d * (1.0 + t.abs()) * p;
    }
    StieltjesMoments { mass, a, b }
}

/// The damped companion moment `A = sum jump_j pdf(t_j)/(1 + |t_j|)`,
/// a diagnostic satisfying `a^2 <= A b` (Cauchy-Schwarz over the measure).
pub fn a_damped(f: &MonotoneStep) -> f64 {
    f.atoms()
        .iter()
        .map(|&(t, d)| d * pdf(t) / (1.0 + t.abs()))
        .sum()
}

/// `E[f(Z) Z]` by numeric quadrature, an independent route to the `a`
/// moment (integration by parts turns it into the atom sum).
///
/// The integrand is piecewise smooth, so the real line is cut at every
/// breakpoint and truncated at |x| = 12 where the density underflows the
/// quadrature tolerance.
pub fn a_via_expectation(
    f: &MonotoneStep,
    cfg: &QuadratureConfig,
) -> Result<f64, StieltjesError> {
    const CUTOFF: f64 = 12.0;
    let mut cuts = vec![-CUTOFF];
    for &(t, _) in f.atoms() {
        if t > -CUTOFF && t < CUTOFF {
            cuts.push(t);
        }
    }
    cuts.push(CUTOFF);
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let out = integrate(
            |x| f.evaluate(x) * x * pdf(x),
            pair[0],
            pair[1],
            cfg,
        )
        .map_err(GaussError::from)?;
        total += out.value;
    }
    Ok(total)
}

/// Outcome of [`log_moment_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMomentCheck {
    /// `b` moment.
    pub lhs: f64,
    /// Final form `2 a sqrt(log(e/a^2))`.
    pub rhs: f64,
    /// Jensen intermediate `a (1 + sqrt(2 log(mass/(sqrt(2 pi) a))))`,
    /// absent when `a = 0`.
    pub intermediate_rhs: Option<f64>,
    pub pass: bool,
}

/// Check `b <= 2 a sqrt(log(e/a^2))` together with the sharper Jensen
/// intermediate bound.
///
/// A single-atom measure makes the intermediate bound an exact equality,
/// so both comparisons carry 1e-12 additive slack for roundoff. When
/// `a = 0` the measure must vanish, so the check degenerates to `b = 0`.
pub fn log_moment_check(f: &MonotoneStep) -> LogMomentCheck {
    let m = moments(f);
    if m.a == 0.0 {
        return LogMomentCheck {
            lhs: m.b,
            rhs: 0.0,
            intermediate_rhs: None,
            pass: m.b == 0.0,
        };
    }
    let rhs = 2.0 * m.a * (1.0 - 2.0 * m.a.ln()).sqrt();
    // pdf <= 1/sqrt(2 pi) forces the log argument >= 1; clamp roundoff.
    let lg = (m.mass / ((2.0 * std::f64::consts::PI).sqrt() * m.a))
        .ln()
        .max(0.0);
    let intermediate = m.a * (1.0 + (2.0 * lg).sqrt());
    let pass = m.b <= rhs + 1e-12 && m.b <= intermediate + 1e-12;
    LogMomentCheck {
        lhs: m.b,
        rhs,
        intermediate_rhs: Some(intermediate),
        pass,
    }
}

/// `Cov(f(X), g(Y))` for standard normal `(X, Y)` with correlation
/// `rho in [0, 1]`: the exact double sum over atom pairs of indicator
/// covariances, each an orthant probability minus the tail product.
///
/// Base constants drop out of covariances, so only atoms contribute. The
/// sum runs in (j, l) order to keep results bit-reproducible.
pub fn general_cov(
    f: &MonotoneStep,
    g: &MonotoneStep,
    rho: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, StieltjesError> {
    let mut total = 0.0;
    for &(t, df) in f.atoms() {
        for &(s, dg) in g.atoms() {
            let pair = GaussianPair::new(t, s, rho)?;
            let indicator_cov = plackett_orthant(&pair, cfg)? - upper_tail(t) * upper_tail(s);
            total += df * dg * indicator_cov;
        }
    }
    Ok(total)
}

fn unit_direction(w: &[f64]) -> Result<(), StieltjesError> {
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(StieltjesError::NotUnit { norm });
    }
    Ok(())
}

/// Audit the step-pair covariance bound for `F = f(<w, x>)` against
/// `G = g(<v, x>)` with unit directions and `rho = <w, v> >= 0`:
/// `cov = general_cov(f, g, rho)` versus
/// `rhs_core = rho a_f a_g / sqrt(log(e/a_f^2)) sqrt(log(e/a_g^2))`.
///
/// Vacuous when `rho = 0` or either `a` moment vanishes. Extras carry
/// `a_f`, `a_g`, and `rho` (the campaign CSV's extra columns).
pub fn step_pair_report(
    label: String,
    f: &MonotoneStep,
    g: &MonotoneStep,
    w: &[f64],
    v: &[f64],
    cfg: &QuadratureConfig,
) -> Result<AuditReport, StieltjesError> {
    if w.len() != v.len() {
        return Err(StieltjesError::DimensionMismatch {
            left: w.len(),
            right: v.len(),
        });
    }
    unit_direction(w)?;
    unit_direction(v)?;
    let dot: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
    let dot = dot.clamp(-1.0, 1.0);
    let rho = if dot.abs() < 1e-12 { 0.0 } else { dot };
    if rho < 0.0 {
        return Err(StieltjesError::Gauss(GaussError::NegativeCorrelation {
            rho,
        }));
    }

    let cov = general_cov(f, g, rho, cfg)?;
    let mf = moments(f);
    let mg = moments(g);
    let w1 = rho * mf.a * mg.a;
    let vacuous = rho == 0.0 || w1 == 0.0;
    let rhs_core = if vacuous {
        0.0
    } else {
        w1 / ((1.0 - 2.0 * mf.a.ln()) * (1.0 - 2.0 * mg.a.ln())).sqrt()
    };
    let (ratio, note) = if vacuous {
        (
            RatioValue::Vacuous,
            Some("rho = 0 or degenerate measure".to_string()),
        )
    } else {
        (RatioValue::Finite(cov / rhs_core), None)
    };
    Ok(AuditReport {
        label,
        n: w.len() as u32,
        inequality: "step_pair",
        cov: CovValue::Real(cov),
        rhs_core,
        ratio,
        descriptors: vec![f.to_json(), g.to_json()],
        note,
        extras: vec![("a_f", mf.a), ("a_g", mg.a), ("rho", rho), ("w1", w1)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol,
            "got {got:.17e}, want {want:.17e}"
        );
    }

    fn indicator_at_zero() -> MonotoneStep {
        MonotoneStep::new(0.0, vec![(0.0, 1.0)]).unwrap()
    }

    fn two_step() -> MonotoneStep {
        MonotoneStep::new(0.0, vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn construction_validates_shape() {
        assert!(MonotoneStep::new(0.0, vec![(0.0, 0.5), (0.0, 0.4)]).is_err());
        assert!(MonotoneStep::new(0.0, vec![(1.0, 0.5), (0.0, 0.4)]).is_err());
        assert!(MonotoneStep::new(0.0, vec![(0.0, -0.1)]).is_err());
        assert!(MonotoneStep::new(0.0, vec![(0.0, 0.0)]).is_err());
        assert!(MonotoneStep::new(-0.1, vec![]).is_err());
        assert!(matches!(
            MonotoneStep::new(0.3, vec![(2.0, 0.8)]),
            Err(StieltjesError::RangeOverflow(_))
        ));
        assert!(MonotoneStep::new(0.5, vec![(2.0, 0.5)]).is_ok());
    }

    #[test]
    fn evaluation_is_left_continuous() {
        let ind = indicator_at_zero();
        assert_eq!(ind.evaluate(0.0), 0.0);
        assert_eq!(ind.evaluate(0.1), 1.0);
        assert_eq!(ind.evaluate(-0.1), 0.0);

        let two = two_step();
        assert_eq!(two.evaluate(-1.0), 0.0);
        assert_eq!(two.evaluate(0.0), 0.5);
        assert_eq!(two.evaluate(1.0), 0.5);
        assert_eq!(two.evaluate(1.5), 1.0);
    }

    #[test]
    fn json_round_trip() {
        let two = two_step();
        let json = two.to_json();
        assert_eq!(json, r#"{"base":0.0,"atoms":[[-1.0,0.5],[1.0,0.5]]}"#);
        assert_eq!(MonotoneStep::from_json(&json).unwrap(), two);
        assert!(MonotoneStep::from_json("{bad").is_err());
        assert!(MonotoneStep::from_json(r#"{"base":0.9,"atoms":[[0,0.5]]}"#).is_err());
    }

    #[test]
    fn moments_reference_values() {
        // Reference values from 40-digit arithmetic.
        let m = moments(&indicator_at_zero());
        assert_eq!(m.mass, 1.0);
        close(m.a, 0.39894228040143267794, 1e-16);
        assert_eq!(m.b, m.a);

        let m = moments(&two_step());
        close(m.a, 0.2419707245191433498, 1e-16);
        close(m.b, 0.4839414490382866996, 1e-16);

        let empty = MonotoneStep::constant(0.4).unwrap();
        assert_eq!(moments(&empty), StieltjesMoments { mass: 0.0, a: 0.0, b: 0.0 });
    }

    #[test]
    fn damped_moment_and_cauchy_schwarz() {
        // Reference value from 40-digit arithmetic.
        let two = two_step();
        close(a_damped(&two), 0.12098536225957167490, 1e-16);
        for f in [indicator_at_zero(), two_step()] {
            let m = moments(&f);
            assert!(m.a * m.a <= a_damped(&f) * m.b * (1.0 + 1e-15));
        }
    }

    #[test]
    fn expectation_route_matches_atom_sums() {
        let c = cfg();
        close(
            a_via_expectation(&indicator_at_zero(), &c).unwrap(),
            0.39894228040143267794,
            1e-11,
        );
        close(
            a_via_expectation(&two_step(), &c).unwrap(),
            0.2419707245191433498,
            1e-11,
        );
        // Constants have zero mean against Z.
        let const_step = MonotoneStep::constant(0.7).unwrap();
        close(a_via_expectation(&const_step, &c).unwrap(), 0.0, 1e-12);
    }

    #[test]
    fn log_moment_reference_cases() {
        // Indicator at 0: the intermediate Jensen bound is an exact
        // equality (single atom), so only the slack keeps it passing.
        let check = log_moment_check(&indicator_at_zero());
        assert!(check.pass);
        close(check.rhs, 1.3441163089646286425, 1e-15);
        close(check.intermediate_rhs.unwrap(), check.lhs, 1e-15);

        // Atom at 5: b = 6 pdf(5) equals the intermediate bound exactly;
        // the final form is looser. Reference values from 40-digit
        // arithmetic.
        let far = MonotoneStep::new(0.0, vec![(5.0, 1.0)]).unwrap();
        let check = log_moment_check(&far);
        assert!(check.pass);
        close(check.lhs, 8.9203170884057862474e-6, 1e-19);
        close(check.rhs, 1.5688343654197866752e-5, 1e-19);

        let empty = MonotoneStep::constant(0.2).unwrap();
        let check = log_moment_check(&empty);
        assert!(check.pass);
        assert_eq!(check.lhs, 0.0);
        assert_eq!(check.intermediate_rhs, None);
    }

    #[test]
    fn general_cov_reference_values() {
        let c = cfg();
        let ind = indicator_at_zero();
        // Variance of a fair indicator at full correlation.
        close(general_cov(&ind, &ind, 1.0, &c).unwrap(), 0.25, 1e-12);
        // Independence.
        assert_eq!(general_cov(&two_step(), &ind, 0.0, &c).unwrap(), 0.0);
        // Nested halflines at full correlation: upper_tail(1)^2.
        let lo = MonotoneStep::new(0.0, vec![(1.0, 1.0)]).unwrap();
        let hi = MonotoneStep::new(0.0, vec![(-1.0, 1.0)]).unwrap();
        close(
            general_cov(&lo, &hi, 1.0, &c).unwrap(),
            0.025171489600055118169,
            1e-12,
        );
        // Reference value from 40-digit arithmetic.
        close(
            general_cov(&two_step(), &ind, 0.5, &c).unwrap(),
            0.048070579610896608811,
            1e-11,
        );
    }

    #[test]
    fn general_cov_symmetric_and_bilinear() {
        let c = cfg();
        let two = two_step();
        let ind = indicator_at_zero();
        let ab = general_cov(&two, &ind, 0.5, &c).unwrap();
        let ba = general_cov(&ind, &two, 0.5, &c).unwrap();
        close(ab, ba, 1e-13);

        // Scaling all jumps of f by alpha scales the covariance by alpha.
        let scaled =
            MonotoneStep::new(0.0, vec![(-1.0, 0.25), (1.0, 0.25)]).unwrap();
        let half = general_cov(&scaled, &ind, 0.5, &c).unwrap();
        close(half, 0.5 * ab, 1e-13 * ab.abs());

        // Base constants contribute nothing.
        let with_base =
            MonotoneStep::new(0.3, vec![(-1.0, 0.25), (1.0, 0.25)]).unwrap();
        assert_eq!(
            general_cov(&with_base, &ind, 0.5, &c).unwrap(),
            general_cov(&scaled, &ind, 0.5, &c).unwrap()
        );
    }

    #[test]
    fn step_pair_self_case_matches_halfspace_pair() {
        // f = g = indicator at 0, w = v: reduces to the halfspace self
        // pair. Reference values from 40-digit arithmetic.
        let c = cfg();
        let ind = indicator_at_zero();
        let w = vec![1.0, 0.0];
        let rep =
            step_pair_report("self".into(), &ind, &ind, &w, &w, &c).unwrap();
        close(rep.cov.to_f64(), 0.25, 1e-11);
        close(rep.rhs_core, 0.056082395173399051176, 1e-15);
        close(rep.ratio.finite().unwrap(), 4.4577268718112767835, 1e-9);
        close(rep.extra("rho").unwrap(), 1.0, 0.0);
    }

    #[test]
    fn step_pair_orthogonal_is_vacuous() {
        let c = cfg();
        let ind = indicator_at_zero();
        let rep = step_pair_report(
            "orth".into(),
            &ind,
            &ind,
            &[1.0, 0.0],
            &[0.0, 1.0],
            &c,
        )
        .unwrap();
        assert_eq!(rep.ratio, RatioValue::Vacuous);
        assert_eq!(rep.cov.to_f64(), 0.0);
    }

    #[test]
    fn step_pair_validates_directions() {
        let c = cfg();
        let ind = indicator_at_zero();
        assert!(matches!(
            step_pair_report("x".into(), &ind, &ind, &[0.6, 0.9], &[1.0, 0.0], &c),
            Err(StieltjesError::NotUnit { .. })
        ));
        assert!(matches!(
            step_pair_report("x".into(), &ind, &ind, &[1.0], &[1.0, 0.0], &c),
            Err(StieltjesError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            step_pair_report("x".into(), &ind, &ind, &[1.0, 0.0], &[-1.0, 0.0], &c),
            Err(StieltjesError::Gauss(GaussError::NegativeCorrelation { .. }))
        ));
    }
}
