use serde::{Deserialize, Serialize};

use super::{format_rational, parse_rational, ExactSeries, Result, SeriesError};

/// Wire form of an [`ExactSeries`]:
/// `{"variable": "k", "valuation": 0, "order": 3, "coefficients": ["1/1", ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub variable: String,
    pub valuation: i64,
    pub order: i64,
    pub coefficients: Vec<String>,
}

impl From<&ExactSeries> for SeriesJson {
    fn from(s: &ExactSeries) -> Self {
        Self {
            variable: s.variable().to_string(),
            valuation: s.valuation(),
            order: s.order(),
            coefficients: s.coefficients().iter().map(format_rational).collect(),
        }
    }
}

impl TryFrom<SeriesJson> for ExactSeries {
    type Error = SeriesError;

    fn try_from(j: SeriesJson) -> Result<Self> {
        if j.variable.is_empty() {
            return Err(SeriesError::Parse("empty variable name".into()));
        }
        let coeffs = j
            .coefficients
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>>>()?;
        // checked arithmetic: order - valuation + 1 must not overflow
        let expected = j
            .order
            .checked_sub(j.valuation)
            .and_then(|d| d.checked_add(1))
            .ok_or_else(|| SeriesError::Parse("valuation/order out of range".into()))?;
        if expected < 0 || expected as u64 != coeffs.len() as u64 {
            return Err(SeriesError::LengthMismatch {
                expected: expected.max(0) as usize,
                found: coeffs.len(),
            });
        }
        ExactSeries::new(j.variable, j.valuation, coeffs, j.order)
    }
}

impl ExactSeries {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SeriesJson::from(self)).expect("series json")
    }
}

/// Parses and validates one series document.
pub fn parse_series_json(input: &str) -> Result<ExactSeries> {
    let j: SeriesJson = serde_json::from_str(input).map_err(|e| SeriesError::Parse(e.to_string()))?;
    ExactSeries::try_from(j)
}

#[cfg(test)]
mod tests {
    use super::super::{int, rat};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn emits_num_den_strings() {
        let s = ExactSeries::from_coeffs("k", 0, vec![int(0), int(1), rat(-1, 4)]);
        let v = s.to_json();
        assert_eq!(v["coefficients"], serde_json::json!(["0/1", "1/1", "-1/4"]));
        assert_eq!(v["order"], 2);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            r#"{"variable":"k","valuation":0,"order":1,"coefficients":["1/1"]}"#,
            r#"{"variable":"k","valuation":0,"order":0,"coefficients":["0.5"]}"#,
            r#"{"variable":"","valuation":0,"order":0,"coefficients":["1"]}"#,
            r#"{"variable":"k","valuation":-9223372036854775808,"order":9223372036854775807,"coefficients":[]}"#,
            r#"{"variable":"k","valuation":0,"order":0,"coefficients":["1"],"extra":1}"#,
            r#"[1,2]"#,
        ] {
            assert!(parse_series_json(bad).is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn roundtrip(val in -5i64..5, nums in prop::collection::vec((-50i64..50, 1i64..50), 0..12)) {
            let coeffs = nums.iter().map(|&(n, d)| rat(n, d)).collect();
            let s = ExactSeries::from_coeffs("q", val, coeffs);
            let text = s.to_json().to_string();
            let back = parse_series_json(&text).unwrap();
            prop_assert_eq!(back.to_json().to_string(), text);
            prop_assert_eq!(back, s);
        }
    }
}
