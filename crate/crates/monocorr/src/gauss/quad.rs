//! Adaptive Gauss-Kronrod quadrature on a finite interval.
//!
//! A 7-point Gauss rule embedded in a 15-point Kronrod rule gives both a
//! value and an error estimate per segment; the segment with the largest
//! estimated error is bisected until the summed estimate meets tolerance.
//! The error rescaling heuristic follows QUADPACK's QK15.

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target, applied to the running integral estimate.
    pub rel_tol: f64,
    /// Maximum number of bisections before giving up.
    pub max_subdivisions: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureConfig {
    fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.abs_tol.is_finite() && self.rel_tol.is_finite())
            || self.abs_tol < 0.0
            || self.rel_tol < 0.0
            || (self.abs_tol == 0.0 && self.rel_tol == 0.0)
        {
            return Err(QuadratureError::BadTolerance);
        }
        Ok(())
    }
}

/// Integral value with its final error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome {
    pub value: f64,
    pub error_estimate: f64,
    /// Segments evaluated (1 + number of bisections).
    pub segments: u32,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("quadrature tolerances must be finite, nonnegative, and not both zero")]
    BadTolerance,
    #[error("integration bounds must be finite, got [{0}, {1}]")]
    BadBounds(f64, f64),
    #[error("integrand returned a non-finite value near x = {0}")]
    NonFiniteIntegrand(f64),
    #[error(
        "error estimate {error:e} above tolerance {tolerance:e} after {segments} segments"
    )]
    ToleranceNotReached {
        error: f64,
        tolerance: f64,
        segments: u32,
    },
}

// 15-point Kronrod abscissae on [-1, 1] (positive half; even indices are the
// embedded 7-point Gauss nodes).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

// 7-point Gauss weights.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

// 15-point Kronrod weights.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// QUADPACK's empirical sharpening of the raw |K15 - G7| difference.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let err = err.abs();
    let mut scaled = err;
    if resasc != 0.0 && err != 0.0 {
        let exponent = (200.0 * err / resasc).powf(1.5);
        scaled = if exponent < 1.0 { resasc * exponent } else { resasc };
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor > scaled {
        return floor;
    }
    scaled
}

struct SegmentResult {
    integral: f64,
    error: f64,
}

fn kronrod_segment<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
) -> Result<SegmentResult, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let eval = |x: f64| -> Result<f64, QuadratureError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFiniteIntegrand(x))
        }
    };

    let f_center = eval(center)?;
    let mut result_gauss = WG[3] * f_center;
    let mut result_kronrod = WGK[7] * f_center;
    let mut resabs = result_kronrod.abs();

    let mut fv1 = [0.0f64; 8];
    let mut fv2 = [0.0f64; 8];
    fv1[7] = f_center;
    fv2[7] = f_center;

    for j in 0..7 {
        let offset = half * XGK[j];
        let f1 = eval(center - offset)?;
        let f2 = eval(center + offset)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let fsum = f1 + f2;
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * fsum;
        }
        result_kronrod += WGK[j] * fsum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * result_kronrod;
    let mut resasc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (result_kronrod - result_gauss) * half;
    Ok(SegmentResult {
        integral: result_kronrod * half,
        error: rescale_error(err, resabs * half.abs(), resasc * half.abs()),
    })
}

/// Integrate `f` over `[a, b]` to the configured tolerance.
///
/// `a > b` flips the sign, matching the usual orientation convention.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    config: &QuadratureConfig,
) -> Result<QuadOutcome, QuadratureError> {
    config.validate()?;
    if !a.is_finite() || !b.is_finite() {
        return Err(QuadratureError::BadBounds(a, b));
    }
    if a == b {
        return Ok(QuadOutcome {
            value: 0.0,
            error_estimate: 0.0,
            segments: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    struct Segment {
        lo: f64,
        hi: f64,
        integral: f64,
        error: f64,
    }

    let first = kronrod_segment(&f, lo, hi)?;
    let mut segments = vec![Segment {
        lo,
        hi,
        integral: first.integral,
        error: first.error,
    }];

    for _ in 0..config.max_subdivisions {
        let total: f64 = segments.iter().map(|s| s.integral).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let tolerance = config.abs_tol.max(config.rel_tol * total.abs());
        if error <= tolerance {
            return Ok(QuadOutcome {
                value: sign * total,
                error_estimate: error,
                segments: segments.len() as u32,
            });
        }

        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("segment list is never empty");
        let Segment { lo, hi, .. } = segments[worst];
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval no longer splittable in f64
        }
        let left = kronrod_segment(&f, lo, mid)?;
        let right = kronrod_segment(&f, mid, hi)?;
        segments[worst] = Segment {
            lo,
            hi: mid,
            integral: left.integral,
            error: left.error,
        };
        segments.push(Segment {
            lo: mid,
            hi,
            integral: right.integral,
            error: right.error,
        });
    }

    let total: f64 = segments.iter().map(|s| s.integral).sum();
    let error: f64 = segments.iter().map(|s| s.error).sum();
    let tolerance = config.abs_tol.max(config.rel_tol * total.abs());
    if error <= tolerance {
        return Ok(QuadOutcome {
            value: sign * total,
            error_estimate: error,
            segments: segments.len() as u32,
        });
    }
    Err(QuadratureError::ToleranceNotReached {
        error,
        tolerance,
        segments: segments.len() as u32,
    })
}
