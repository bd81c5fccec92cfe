//! Built-in audit instances: the cube family catalog, the seeded step-pair
//! instances for the correlated-halfspace audit, and the closed-form
//! calibration cases for the Monte-Carlo estimators.
//!
//! Everything here is a pure function of fixed seeds, so two builds of the
//! crate produce identical catalogs and identical report files.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cube::FamilyDescriptor;
use crate::gauss::halfspace::Halfspace;
use crate::gauss::normal::{inverse_cdf, pdf, upper_tail};
use crate::gauss::plackett::GaussianPair;
use crate::mc::{mc_halfspace_influence, mc_orthant, mc_sectional_influence, uniform, Estimate, McConfig, McError};
use crate::stieltjes::MonotoneStep;

/// The default family catalog: dictators, majorities, counting thresholds,
/// tribes, and twenty seeded random monotone threshold families, spanning
/// n = 3 through 16.
pub fn default_catalog() -> Vec<FamilyDescriptor> {
    let mut out = Vec::new();
    for n in 3..=16 {
        out.push(FamilyDescriptor::Dictator { n, i: 0 });
    }
    for n in (3..=15).step_by(2) {
        out.push(FamilyDescriptor::Majority { n });
    }
    for n in (4..=12).step_by(2) {
        out.push(FamilyDescriptor::Majority { n });
    }
    for (n, k) in [(5, 2), (6, 4), (9, 5), (10, 3), (12, 7)] {
        out.push(FamilyDescriptor::Threshold { n, k });
    }
    for (n, r) in [
        (4, 2),
        (6, 2),
        (6, 3),
        (8, 2),
        (9, 3),
        (10, 5),
        (12, 3),
        (12, 4),
        (14, 7),
        (15, 3),
        (16, 4),
    ] {
        out.push(FamilyDescriptor::Tribes { n, r });
    }
    for seed in 0..20u64 {
        out.push(FamilyDescriptor::RandomMonotone {
            n: 3 + (seed % 10) as u32,
            seed,
        });
    }
    for (n, seed) in (13..=16).zip(100..) {
        out.push(FamilyDescriptor::RandomMonotone { n, seed });
    }
    out
}

/// One audit instance for the correlated-halfspace covariance bound: step
/// transforms `f`, `g` applied along unit directions `w`, `v` with
/// correlation `rho = <w, v> > 0`.
#[derive(Debug, Clone)]
pub struct StepInstance {
    pub label: String,
    pub f: MonotoneStep,
    pub g: MonotoneStep,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
}

impl StepInstance {
    pub fn rho(&self) -> f64 {
        self.w.iter().zip(&self.v).map(|(a, b)| a * b).sum()
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    inverse_cdf(uniform(rng))
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| normal(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn random_step(rng: &mut ChaCha8Rng) -> MonotoneStep {
    let k = 1 + (uniform(rng) * 5.0) as usize; // 1..=5 atoms
    let mut locations: Vec<f64> = (0..k).map(|_| -3.0 + 6.0 * uniform(rng)).collect();
    locations.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let raw: Vec<f64> = (0..k).map(|_| 0.1 + uniform(rng)).collect();
    let mass = 0.2 + 0.8 * uniform(rng);
    let scale = mass / raw.iter().sum::<f64>();
    let atoms = locations
        .into_iter()
        .zip(raw)
        .map(|(t, j)| (t, j * scale))
        .collect();
    MonotoneStep::new(0.0, atoms).expect("seeded step atoms are sorted with mass < 1")
}

/// Twenty seeded step-pair instances, all with strictly positive direction
/// correlation. Deterministic across runs and platforms.
pub fn step_instances() -> Vec<StepInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5749_4454);
    (0..20)
        .map(|i| {
            let f = random_step(&mut rng);
            let g = random_step(&mut rng);
            let dim = 2 + (uniform(&mut rng) * 4.0) as usize; // 2..=5
            let w = random_unit(&mut rng, dim);
            let mut u = random_unit(&mut rng, dim);
            let dot: f64 = w.iter().zip(&u).map(|(a, b)| a * b).sum();
            if dot < 0.0 {
                for x in u.iter_mut() {
                    *x = -*x;
                }
            }
            // Blend toward w so rho = (1 - lam) <w,u> + lam is bounded away
            // from zero before renormalizing.
            let lam = 0.15 + 0.7 * uniform(&mut rng);
            let blended: Vec<f64> = w
                .iter()
                .zip(&u)
                .map(|(wi, ui)| (1.0 - lam) * ui + lam * wi)
                .collect();
            let norm = blended.iter().map(|x| x * x).sum::<f64>().sqrt();
            let v: Vec<f64> = blended.into_iter().map(|x| x / norm).collect();
            StepInstance {
                label: format!("step_pair_{i:02}"),
                f,
                g,
                w,
                v,
            }
        })
        .collect()
}

/// What a calibration case estimates.
#[derive(Debug, Clone)]
pub enum CalibrationKind {
    Orthant(GaussianPair),
    HalfspaceInfluence { h: Halfspace, k: usize },
    SectionalInfluence { h: Halfspace, k: usize },
}

/// A Monte-Carlo case whose exact value is known in closed form.
#[derive(Debug, Clone)]
pub struct CalibrationCase {
    pub label: String,
    pub truth: f64,
    pub kind: CalibrationKind,
}

impl CalibrationCase {
    pub fn run(&self, cfg: &McConfig) -> Result<Estimate, McError> {
        match &self.kind {
            CalibrationKind::Orthant(p) => mc_orthant(p, cfg),
            CalibrationKind::HalfspaceInfluence { h, k } => mc_halfspace_influence(h, *k, cfg),
            CalibrationKind::SectionalInfluence { h, k } => mc_sectional_influence(h, *k, cfg),
        }
    }
}

/// Fifty seeded estimator cases with closed-form truths: quadrant
/// probabilities at zero thresholds (arcsine law), independent and fully
/// correlated orthants (tail products and single tails), and halfspace
/// influences in both the signed and sectional conventions.
pub fn calibration_cases() -> Vec<CalibrationCase> {
    let mut out = Vec::new();
    for i in 1..=9 {
        let rho = i as f64 / 10.0;
        out.push(CalibrationCase {
            label: format!("orthant_zero_rho{rho}"),
            truth: 0.25 + rho.asin() / (2.0 * std::f64::consts::PI),
            kind: CalibrationKind::Orthant(GaussianPair::new(0.0, 0.0, rho).unwrap()),
        });
    }
    for (t, s) in [(0.5, -0.5), (1.0, 1.0), (2.0, 0.3), (-1.0, 1.5), (0.7, 2.5)] {
        out.push(CalibrationCase {
            label: format!("orthant_indep_t{t}_s{s}"),
            truth: upper_tail(t) * upper_tail(s),
            kind: CalibrationKind::Orthant(GaussianPair::new(t, s, 0.0).unwrap()),
        });
    }
    for (t, s) in [(1.0f64, -1.0), (0.5, 0.5), (2.0, -3.0)] {
        out.push(CalibrationCase {
            label: format!("orthant_comonotone_t{t}_s{s}"),
            truth: upper_tail(t.max(s)),
            kind: CalibrationKind::Orthant(GaussianPair::new(t, s, 1.0).unwrap()),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xCA11_B8A7);
    for i in 0..17 {
        let dim = 2 + (uniform(&mut rng) * 5.0) as usize; // 2..=6
        let w = random_unit(&mut rng, dim);
        let t = -1.5 + 3.0 * uniform(&mut rng);
        let k = (uniform(&mut rng) * dim as f64) as usize;
        let h = Halfspace::new(w.clone(), t).unwrap();
        out.push(CalibrationCase {
            label: format!("halfspace_influence_{i:02}"),
            truth: 2.0 * pdf(t) * w[k],
            kind: CalibrationKind::HalfspaceInfluence { h, k },
        });
    }
    for i in 0..16 {
        let dim = 2 + (uniform(&mut rng) * 5.0) as usize;
        // All-positive weights keep every coordinate sectional-eligible.
        let raw: Vec<f64> = (0..dim).map(|_| 0.05 + uniform(&mut rng)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let w: Vec<f64> = raw.into_iter().map(|x| x / norm).collect();
        let t = -1.5 + 3.0 * uniform(&mut rng);
        let k = (uniform(&mut rng) * dim as f64) as usize;
        let h = Halfspace::new(w.clone(), t).unwrap();
        out.push(CalibrationCase {
            label: format!("sectional_influence_{i:02}"),
            truth: pdf(t) * w[k],
            kind: CalibrationKind::SectionalInfluence { h, k },
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::generate;

    #[test]
    fn catalog_is_deterministic_with_unique_labels() {
        let a = default_catalog();
        let b = default_catalog();
        assert_eq!(a, b);
        let mut labels: Vec<String> = a.iter().map(|d| d.label()).collect();
        labels.sort();
        let before = labels.len();
        labels.dedup();
        assert_eq!(labels.len(), before);
        assert!(a.len() >= 60, "catalog has {} entries", a.len());
        assert!(a.iter().all(|d| (3..=16).contains(&d.n())));
    }

    #[test]
    fn every_catalog_family_generates_and_is_increasing() {
        for d in default_catalog() {
            let f = generate(&d).unwrap();
            assert!(f.classify().increasing, "{} not increasing", d.label());
        }
    }

    #[test]
    fn catalog_covers_small_dimensions_densely() {
        let catalog = default_catalog();
        for n in 3..=12u32 {
            let count = catalog.iter().filter(|d| d.n() == n).count();
            assert!(count >= 2, "only {count} families at n = {n}");
        }
        let small = catalog.iter().filter(|d| d.n() <= 12).count();
        assert!(small >= 30, "{small} families with n <= 12");
    }

    #[test]
    fn step_instances_are_deterministic_with_positive_rho() {
        let a = step_instances();
        let b = step_instances();
        assert_eq!(a.len(), 20);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.label, y.label);
            assert_eq!(x.rho().to_bits(), y.rho().to_bits());
        }
        for inst in &a {
            assert!(inst.rho() > 0.05, "{}: rho = {}", inst.label, inst.rho());
            assert!(inst.rho() <= 1.0 + 1e-12);
            assert!(!inst.f.atoms().is_empty());
            assert!(!inst.g.atoms().is_empty());
            let wn: f64 = inst.w.iter().map(|x| x * x).sum();
            let vn: f64 = inst.v.iter().map(|x| x * x).sum();
            assert!((wn - 1.0).abs() < 1e-12);
            assert!((vn - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn calibration_cases_have_fifty_valid_truths() {
        let cases = calibration_cases();
        assert_eq!(cases.len(), 50);
        for case in &cases {
            assert!(case.truth.is_finite(), "{}", case.label);
        }
        // Spot-check one closed form: the quadrant law at rho = 0.5.
        let sheppard = cases
            .iter()
            .find(|c| c.label == "orthant_zero_rho0.5")
            .unwrap();
        assert!((sheppard.truth - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn calibration_cases_run_cleanly_at_small_n() {
        let cfg = McConfig {
            samples: 2000,
            seed: 11,
            streams: 4,
        };
        let mut inside = 0;
        let cases = calibration_cases();
        for case in &cases {
            let est = case.run(&cfg).unwrap();
            assert_eq!(est.n, 2000);
            // Loose sanity envelope at tiny n; the tight 4 SE coverage
            // claim is an acceptance criterion at the full budget.
            if est.std_error == 0.0 || est.within(case.truth, 6.0) {
                inside += 1;
            }
        }
        assert!(inside >= 45, "{inside}/50 inside 6 SE at n = 2000");
    }
}
