//! Deterministic text rendering: identical inputs must produce identical
//! bytes, independent of platform or worker count.

/// Scientific notation with 17 significant digits (enough to round-trip
/// any `f64`) and fixed spellings for the non-finite values.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Assemble a CSV document with `\n` line endings from pre-rendered cells.
pub fn csv(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn json<T: serde::Serialize>(value: &T) -> dcqt::Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| dcqt::Error::InvalidInput(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering_is_fixed_width_and_total() {
        assert_eq!(fmt_f64(0.25), "2.5000000000000000e-1");
        assert_eq!(fmt_f64(-1.0), "-1.0000000000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn csv_uses_newline_endings_only() {
        let doc = csv("a,b", &[vec!["1".into(), "2".into()]]);
        assert_eq!(doc, "a,b\n1,2\n");
        assert!(!doc.contains('\r'));
    }
}
