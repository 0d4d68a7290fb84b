//! Versioned JSON verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Only for slicing suites with `n - 2r < 3` that found nothing to report.
    UnsupportedRegime,
    /// Hypersurface regime of the composite suite: the inequality is expected
    /// to fail there and a violating sample was exhibited.
    PassWithCounterexampleFound,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass | Verdict::PassWithCounterexampleFound => 0,
            Verdict::Fail => 1,
            Verdict::UnsupportedRegime => 2,
        }
    }

    pub fn is_pass(self) -> bool {
        self.exit_code() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecField {
    pub n: usize,
    pub r: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite: String,
    pub spec: SpecField,
    pub seed: u64,
    pub trials: u64,
    pub violations: u64,
    /// Largest per-trial defect; `null` in JSON when a trial produced a
    /// non-finite value.
    pub max_defect: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Suite-specific tallies (equality hits, skipped samples, ...).
    pub counts: BTreeMap<String, u64>,
    /// First violating sample, by trial index.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    /// Wall-clock seconds; not part of the report body.
    pub elapsed: f64,
}

impl VerificationReport {
    /// The report without `elapsed`: identical for identical `(suite, spec, seed, trials, tol)`.
    pub fn body(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("report is an object").remove("elapsed");
        v
    }

    pub fn body_string(&self) -> String {
        serde_json::to_string_pretty(&self.body()).expect("value serializes")
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }
}

/// Worst exit code over a batch: any failure wins, then unsupported regimes.
pub fn combined_exit_code(reports: &[VerificationReport]) -> i32 {
    let codes: Vec<i32> = reports.iter().map(VerificationReport::exit_code).collect();
    if codes.contains(&1) {
        1
    } else if codes.contains(&2) {
        2
    } else {
        0
    }
}

type FieldCheck = (&'static str, fn(&Value) -> bool);

const REQUIRED: [FieldCheck; 12] = [
    ("schema", |v| v.as_u64() == Some(SCHEMA_VERSION as u64)),
    ("suite", Value::is_string),
    ("spec", |v| v.get("n").is_some_and(Value::is_u64) && v.get("r").is_some_and(Value::is_u64)),
    ("seed", Value::is_u64),
    ("trials", Value::is_u64),
    ("violations", Value::is_u64),
    ("max_defect", |v| v.is_number() || v.is_null()),
    ("tolerance", Value::is_number),
    ("verdict", |v| matches!(v.as_str(), Some("pass" | "fail" | "unsupported-regime" | "pass-with-counterexample-found"))),
    ("counts", |v| v.as_object().is_some_and(|m| m.values().all(Value::is_u64))),
    ("counterexample", |_| true),
    ("notes", |v| v.as_array().is_some_and(|a| a.iter().all(Value::is_string))),
];

/// Checks a report (with or without `elapsed`) against the version-1 layout.
pub fn validate(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("report must be a JSON object")?;
    for (key, ok) in REQUIRED {
        match obj.get(key) {
            Some(field) if !ok(field) => return Err(format!("field `{key}` has the wrong type or value")),
            None if !matches!(key, "counterexample" | "notes") => return Err(format!("missing field `{key}`")),
            _ => {}
        }
    }
    if let Some(e) = obj.get("elapsed") {
        if !e.is_number() {
            return Err("field `elapsed` must be a number".into());
        }
    }
    let allowed = REQUIRED.iter().map(|(k, _)| *k).chain(["elapsed"]);
    let allowed: Vec<&str> = allowed.collect();
    if let Some(extra) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(format!("unknown field `{extra}`"));
    }
    let violations = obj["violations"].as_u64().unwrap_or(0);
    let within = match (obj["max_defect"].as_f64(), obj["tolerance"].as_f64()) {
        (Some(d), Some(t)) => d <= t,
        _ => false,
    };
    let clean = violations == 0 && within;
    let verdict = &obj["verdict"];
    if (verdict == "pass" && !clean) || (verdict == "fail" && clean) {
        return Err("verdict disagrees with violations and max_defect".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VerificationReport {
        VerificationReport {
            schema: SCHEMA_VERSION,
            suite: "lemma47".into(),
            spec: SpecField { n: 6, r: 2 },
            seed: 1,
            trials: 10,
            violations: 0,
            max_defect: 0.0,
            tolerance: 1e-12,
            verdict: Verdict::Pass,
            counts: BTreeMap::new(),
            counterexample: None,
            notes: Vec::new(),
            elapsed: 0.25,
        }
    }

    #[test]
    fn body_drops_elapsed_only() {
        let r = sample();
        let body = r.body();
        assert!(body.get("elapsed").is_none());
        assert_eq!(body["verdict"], "pass");
        assert!(validate(&body).is_ok());
        assert!(validate(&serde_json::to_value(&r).unwrap()).is_ok());
        let mut later = r.clone();
        later.elapsed = 9.0;
        assert_eq!(later.body_string(), r.body_string());
    }

    #[test]
    fn validation_catches_inconsistent_verdicts() {
        let mut r = sample();
        r.violations = 3;
        assert!(validate(&r.body()).is_err());
        r.verdict = Verdict::Fail;
        assert!(validate(&r.body()).is_ok());
        let mut v = r.body();
        v.as_object_mut().unwrap().insert("extra".into(), Value::Null);
        assert!(validate(&v).is_err());
        let mut v = r.body();
        v.as_object_mut().unwrap().remove("seed");
        assert!(validate(&v).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Verdict::Pass.exit_code(), 0);
        assert_eq!(Verdict::Fail.exit_code(), 1);
        assert_eq!(Verdict::UnsupportedRegime.exit_code(), 2);
        assert_eq!(Verdict::PassWithCounterexampleFound.exit_code(), 0);
        let mut a = sample();
        let b = sample();
        a.verdict = Verdict::UnsupportedRegime;
        assert_eq!(combined_exit_code(&[a.clone(), b.clone()]), 2);
        let mut c = sample();
        c.verdict = Verdict::Fail;
        assert_eq!(combined_exit_code(&[a, b, c]), 1);
    }
}
