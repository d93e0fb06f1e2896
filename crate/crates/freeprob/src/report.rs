//! Check reports and their deterministic JSON rendering.
//!
//! The soundness asymmetry of grid checks is encoded here: a `Fail` verdict
//! carries a concrete witness and is conclusive up to evaluation error, while
//! `Pass` only certifies consistency with the tested property on the grid.

use num_complex::Complex64;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Grid-consistency with the tested property; not a proof.
    Pass,
    /// A witness violating the property was found (conclusive up to
    /// numerical error).
    Fail,
    /// Too many evaluation failures to decide.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub location: Complex64,
    pub value: Complex64,
    pub detail: Option<String>,
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = 4 + usize::from(self.detail.is_some());
        let mut m = s.serialize_map(Some(n))?;
        m.serialize_entry("re", &self.location.re)?;
        m.serialize_entry("im", &self.location.im)?;
        m.serialize_entry("value_re", &self.value.re)?;
        m.serialize_entry("value_im", &self.value.im)?;
        if let Some(d) = &self.detail {
            m.serialize_entry("detail", d)?;
        }
        m.end()
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GridInfo {
    HalfPlane {
        half: String,
        r_min: f64,
        r_max: f64,
        per_decade: usize,
        angles: usize,
        theta_min: f64,
        count: usize,
    },
    DyadicSweep {
        octave_lo: i32,
        octave_hi: i32,
        per_octave: usize,
        refinements: usize,
        mode: String,
    },
    Hankel {
        order: usize,
    },
    PointSet {
        count: usize,
    },
    Composite {
        parts: Vec<GridInfo>,
    },
}

/// Outcome of one half-plane, sweep, or Hankel check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    /// Worst signed value of the tested quantity over the grid (for
    /// half-plane checks: the max imaginary part; pass means
    /// `margin <= tolerance`).
    pub margin: f64,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    pub grid: GridInfo,
    pub evaluation_failures: usize,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn is_pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn is_fail(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

// ---------------------------------------------------------------------------
// Deterministic JSON rendering
// ---------------------------------------------------------------------------

struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        // 17 significant digits, fixed scientific notation: identical configs
        // produce byte-identical reports.
        write!(writer, "{:.16e}", value)
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{:.16e}", value as f64)
    }
}

/// Renders any serializable value as compact JSON with all floats in fixed
/// 17-significant-digit scientific notation.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    value
        .serialize(&mut ser)
        .expect("JSON serialization cannot fail for report types");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// Schema-versioned envelope every CLI report is wrapped in.
pub fn report_envelope<T: Serialize>(config: &T, body: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "schema": 1,
        "config": serde_json::to_value(config).expect("config serializes"),
        "report": body,
    })
}

/// Serializer helper for sequences of complex margins (CSV-ready tuples).
pub struct MarginRow {
    pub location: Complex64,
    pub value: f64,
}

impl Serialize for MarginRow {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(3))?;
        seq.serialize_element(&self.location.re)?;
        seq.serialize_element(&self.location.im)?;
        seq.serialize_element(&self.value)?;
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_fixed_width() {
        let v = serde_json::json!({"x": 0.5, "y": 1.0e-8});
        let s = to_json_string(&v);
        assert_eq!(s, r#"{"x":5.0000000000000000e-1,"y":1.0000000000000000e-8}"#);
    }

    #[test]
    fn identical_reports_are_byte_identical() {
        let r = CheckReport {
            check: "demo".into(),
            verdict: Verdict::Pass,
            margin: -1.0 / 3.0,
            witness: Some(Witness {
                location: Complex64::new(1.1, -0.1),
                value: Complex64::new(0.0, 50.0),
                detail: None,
            }),
            tolerance: 1e-8,
            grid: GridInfo::PointSet { count: 3 },
            evaluation_failures: 0,
            notes: vec!["sampled".into()],
        };
        assert_eq!(to_json_string(&r), to_json_string(&r.clone()));
    }
}
