//! Skew matrix interchange records: `{"n": 4, "upper": [m01, m02, ...]}`,
//! strictly-upper entries in row-major order.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use pfaffian_core::SkewMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkewRecord {
    pub n: usize,
    pub upper: Vec<f64>,
}

impl SkewRecord {
    pub fn from_matrix(m: &SkewMatrix) -> Self {
        Self { n: m.dim(), upper: m.upper() }
    }

    pub fn to_matrix(&self) -> anyhow::Result<SkewMatrix> {
        let expected = self.n * self.n.saturating_sub(1) / 2;
        if self.upper.len() != expected {
            bail!("record has n = {} but {} upper entries (expected {expected})", self.n, self.upper.len());
        }
        Ok(SkewMatrix::from_upper(self.n, &self.upper)?)
    }
}

pub fn parse_skew(text: &str) -> anyhow::Result<SkewMatrix> {
    let record: SkewRecord = serde_json::from_str(text).context("malformed skew matrix record")?;
    record.to_matrix()
}

pub fn read_skew(path: &Path) -> anyhow::Result<SkewMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_skew(&text)
}

pub fn write_skew(m: &SkewMatrix) -> String {
    serde_json::to_string(&SkewRecord::from_matrix(m)).expect("finite entries serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = SkewMatrix::from_upper(3, &[1.0, -2.5, 0.125]).unwrap();
        let text = write_skew(&m);
        assert_eq!(text, r#"{"n":3,"upper":[1.0,-2.5,0.125]}"#);
        assert_eq!(parse_skew(&text).unwrap(), m);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(parse_skew(r#"{"n":3,"upper":[1.0,2.0]}"#).is_err());
        assert!(parse_skew(r#"{"n":1,"upper":[]}"#).is_ok());
        assert!(parse_skew(r#"{"n":2,"upper":[1.0],"extra":0}"#).is_err());
    }
}
