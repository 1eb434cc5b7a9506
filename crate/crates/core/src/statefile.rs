//! State files: a coefficient matrix on disk.
//!
//! Two encodings are accepted:
//!
//! ```text
//! {"d": 3, "c": [[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.0]], "label": "optional"}
//! ```
//!
//! or a CSV grid preceded by a `# d=<n>` header line (an optional
//! `# label=<text>` line is also read; other `#` lines are ignored):
//!
//! ```text
//! # d=2
//! 0.25,0.25
//! 0.25,0.25
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weyl::CoefficientMatrix;

/// Largest dimension accepted from a file.
pub const MAX_FILE_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub d: usize,
    pub c: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl StateFile {
    pub fn from_coefficients(c: &CoefficientMatrix, label: Option<String>) -> Self {
        Self {
            d: c.d(),
            c: c.to_rows(),
            label,
        }
    }

    /// Checks the grid shape and the state invariants.
    pub fn to_coefficients(&self) -> Result<CoefficientMatrix> {
        if self.d > MAX_FILE_DIM {
            return Err(Error::Parse(format!(
                "d = {} exceeds the supported maximum {MAX_FILE_DIM}",
                self.d
            )));
        }
        if self.c.len() != self.d {
            return Err(Error::Parse(format!(
                "expected {} rows, found {}",
                self.d,
                self.c.len()
            )));
        }
        if let Some((i, row)) = self.c.iter().enumerate().find(|(_, r)| r.len() != self.d) {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {}",
                row.len(),
                self.d
            )));
        }
        CoefficientMatrix::from_rows(&self.c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state files always serialize")
    }
}

pub fn parse_json(text: &str) -> Result<StateFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid state JSON: {e}")))
}

pub fn parse_csv(text: &str) -> Result<StateFile> {
    let mut d = None;
    let mut label = None;
    for line in text.lines().map(str::trim).filter(|l| l.starts_with('#')) {
        let body = line.trim_start_matches('#').trim();
        if let Some(value) = body.strip_prefix("d=") {
            let parsed = value
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad dimension header `{line}`")))?;
            if d.replace(parsed).is_some() {
                return Err(Error::Parse("duplicate `# d=` header".into()));
            }
        } else if let Some(value) = body.strip_prefix("label=") {
            label = Some(value.trim().to_string());
        }
    }
    let d = d.ok_or_else(|| Error::Parse("missing `# d=<n>` header".into()))?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("CSV row {i}: {e}")))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("CSV row {i}: `{field}` is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(StateFile { d, c: rows, label })
}

/// Dispatches on the first non-blank character: `{` means JSON, anything else CSV.
pub fn parse_str(text: &str) -> Result<StateFile> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_csv(text)
    }
}

pub fn parse_bytes(data: &[u8]) -> Result<StateFile> {
    let text = std::str::from_utf8(data)
        .map_err(|e| Error::Parse(format!("state file is not UTF-8: {e}")))?;
    parse_str(text)
}

/// Parses and validates in one step.
pub fn load_coefficients(data: &[u8]) -> Result<(CoefficientMatrix, Option<String>)> {
    let file = parse_bytes(data)?;
    let c = file.to_coefficients()?;
    Ok((c, file.label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn json_state() {
        let f = parse_str(r#"{"d": 2, "c": [[0.5, 0], [0, 0.5]], "label": "mix"}"#).unwrap();
        assert_eq!(f.label.as_deref(), Some("mix"));
        let c = f.to_coefficients().unwrap();
        assert_eq!(c.get(1, 1), 0.5);
        let f = parse_str(r#"{"d": 2, "c": [[0.5, 0], [0, 0.5]]}"#).unwrap();
        assert_eq!(f.label, None);
    }

    #[test]
    fn csv_state() {
        let text = "# d=3\n# label=delta\n1,0,0\n0, 0, 0\n0,0,0\n";
        let f = parse_str(text).unwrap();
        assert_eq!(f.d, 3);
        assert_eq!(f.label.as_deref(), Some("delta"));
        assert_eq!(f.to_coefficients().unwrap().get(0, 0), 1.0);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_str("1,0\n0,0\n"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_str("# d=2\n1,x\n0,0\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_str("# d=2\n# d=2\n1,0\n0,0\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(parse_str("{\"d\": 2"), Err(Error::Parse(_))));
        assert!(matches!(parse_bytes(&[0xff, 0xfe]), Err(Error::Parse(_))));
        let short = parse_str("# d=2\n1,0\n").unwrap();
        assert!(matches!(short.to_coefficients(), Err(Error::Parse(_))));
        let ragged = parse_str(r#"{"d": 2, "c": [[1.0], [0.0, 0.0]]}"#).unwrap();
        assert!(matches!(ragged.to_coefficients(), Err(Error::Parse(_))));
        let huge = StateFile {
            d: 1000,
            c: vec![],
            label: None,
        };
        assert!(huge.to_coefficients().is_err());
    }

    #[test]
    fn invariant_violations_surface() {
        let f = parse_str(r#"{"d": 2, "c": [[0.6, 0], [0, 0.5]]}"#).unwrap();
        assert!(matches!(
            f.to_coefficients(),
            Err(Error::NotNormalized { .. })
        ));
        let f = parse_str("# d=2\n1.1,-0.1\n0,0\n").unwrap();
        assert!(matches!(
            f.to_coefficients(),
            Err(Error::NegativeCoefficient { .. })
        ));
    }

    proptest! {
        #[test]
        fn json_roundtrip(raw in proptest::collection::vec(0.001f64..1.0, 9)) {
            let s: f64 = raw.iter().sum();
            let c = CoefficientMatrix::new(3, raw.iter().map(|v| v / s).collect()).unwrap();
            let file = StateFile::from_coefficients(&c, Some("x".into()));
            let back = parse_str(&file.to_json()).unwrap();
            prop_assert_eq!(back.to_coefficients().unwrap(), c);
        }

        #[test]
        fn arbitrary_text_never_panics(text in ".{0,200}") {
            let _ = parse_str(&text).and_then(|f| f.to_coefficients());
        }
    }
}
