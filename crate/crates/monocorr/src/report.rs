//! Audit reports: one record per (instance, inequality), serializable to
//! CSV and JSON with byte-reproducible formatting.
//!
//! Covariances from cube enumeration are exact rationals; Gaussian-side
//! covariances are floats. Both live in [`CovValue`] so a single report
//! schema covers every audit. All floats print with 17 significant digits
//! (`{:.16e}`), enough to round-trip f64 exactly, so re-running a campaign
//! with identical inputs reproduces reports byte for byte.

use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Exact or floating covariance.
#[derive(Debug, Clone, PartialEq)]
pub enum CovValue {
    Exact(BigRational),
    Real(f64),
}

impl CovValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            CovValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            CovValue::Real(v) => *v,
        }
    }
}

/// cov / rhs_core, with the two degenerate outcomes kept explicit:
/// a zero denominator against positive covariance is reported as infinite,
/// and zero-over-zero is vacuous rather than an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioValue {
    Finite(f64),
    Infinite,
    Vacuous,
}

impl RatioValue {
    /// Finite value, or None for the degenerate outcomes.
    pub fn finite(&self) -> Option<f64> {
        match self {
            RatioValue::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

/// One audited inequality instance.
#[derive(Debug, Clone)]
pub struct AuditReport {
    /// Instance identifier; never contains a comma.
    pub label: String,
    /// Ambient dimension (cube dimension or halfspace dimension).
    pub n: u32,
    /// Which inequality this row audits (fixed tag per audit kind).
    pub inequality: &'static str,
    pub cov: CovValue,
    /// Right-hand side with the universal constant omitted; >= 0.
    pub rhs_core: f64,
    pub ratio: RatioValue,
    /// Labels of the participating families / functions.
    pub descriptors: Vec<String>,
    /// Free-form anomaly or degeneracy note.
    pub note: Option<String>,
    /// Named numeric diagnostics, in insertion order (also the source of
    /// campaign-specific extra CSV columns).
    pub extras: Vec<(&'static str, f64)>,
}

impl AuditReport {
    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extras
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
    }
}

/// 17-significant-digit float formatting used in every report field.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{:.16e}", x)
}

fn ratio_field(r: &RatioValue) -> String {
    match r {
        RatioValue::Finite(v) => fmt_float(*v),
        RatioValue::Infinite => "inf".to_string(),
        RatioValue::Vacuous => "vacuous".to_string(),
    }
}

/// (cov_num, cov_den) CSV cells: integer numerator and denominator for
/// exact values, 17-digit decimal and an empty denominator for floats.
fn cov_fields(c: &CovValue) -> (String, String) {
    match c {
        CovValue::Exact(r) => (r.numer().to_string(), r.denom().to_string()),
        CovValue::Real(v) => (fmt_float(*v), String::new()),
    }
}

pub const CSV_COLUMNS: [&str; 7] = [
    "label",
    "n",
    "inequality",
    "cov_num",
    "cov_den",
    "rhs_core",
    "ratio",
];

/// Render reports as CSV with the fixed seven-column schema, plus any named
/// extra columns (values pulled from each report's `extras`, blank when
/// absent).
pub fn to_csv(reports: &[AuditReport], extra_columns: &[&str]) -> String {
    let mut out = String::new();
    out.push_str(&CSV_COLUMNS.join(","));
    for col in extra_columns {
        out.push(',');
        out.push_str(col);
    }
    out.push('\n');
    for r in reports {
        debug_assert!(!r.label.contains(','), "labels must be comma-free");
        let (num, den) = cov_fields(&r.cov);
        out.push_str(&format!(
            "{},{},{},{},{},{},{}",
            r.label,
            r.n,
            r.inequality,
            num,
            den,
            fmt_float(r.rhs_core),
            ratio_field(&r.ratio)
        ));
        for col in extra_columns {
            out.push(',');
            if let Some(v) = r.extra(col) {
                out.push_str(&fmt_float(v));
            }
        }
        out.push('\n');
    }
    out
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Render reports as a JSON array. Numeric report fields are emitted as
/// 17-significant-digit strings; the writer is hand-rolled so the byte
/// stream is fully deterministic.
pub fn to_json(reports: &[AuditReport]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in reports.iter().enumerate() {
        let (num, den) = cov_fields(&r.cov);
        let den_field = if den.is_empty() {
            "null".to_string()
        } else {
            format!("\"{den}\"")
        };
        out.push_str("  {");
        out.push_str(&format!("\"label\":\"{}\",", json_escape(&r.label)));
        out.push_str(&format!("\"n\":{},", r.n));
        out.push_str(&format!("\"inequality\":\"{}\",", r.inequality));
        out.push_str(&format!("\"cov_num\":\"{num}\",\"cov_den\":{den_field},"));
        out.push_str(&format!("\"rhs_core\":\"{}\",", fmt_float(r.rhs_core)));
        out.push_str(&format!("\"ratio\":\"{}\",", ratio_field(&r.ratio)));
        out.push_str("\"descriptors\":[");
        for (j, d) in r.descriptors.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("\"{}\"", json_escape(d)));
        }
        out.push_str("],\"extras\":{");
        for (j, (k, v)) in r.extras.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("\"{}\":\"{}\"", k, fmt_float(*v)));
        }
        out.push_str("},");
        match &r.note {
            Some(n) => out.push_str(&format!("\"note\":\"{}\"", json_escape(n))),
            None => out.push_str("\"note\":null"),
        }
        out.push('}');
        if i + 1 < reports.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}
