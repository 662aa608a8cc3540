//! Extracts the action and fact/subjectivity weights from a trade-agent reply.

use std::sync::LazyLock;

use log::warn;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::TradeAction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeDecision {
    pub action: TradeAction,
    pub fact_weight: f64,
    pub subjective_weight: f64,
    pub rationale: String,
}

impl TradeDecision {
    /// Hold with even weights; used when no reply could be parsed.
    pub fn fallback(rationale: impl Into<String>) -> Self {
        Self { action: TradeAction::HOLD, fact_weight: 0.5, subjective_weight: 0.5, rationale: rationale.into() }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("no action number found")]
    NoAction,
}

const NUM: &str = r"([+-]?(?:\d+(?:\.\d*)?|\.\d+))";
// No trailing dot, so list markers like "2. Factual vs ..." are not weights.
const WNUM: &str = r"(\d+(?:\.\d+)?|\.\d+)";

static ACTION: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(r#"(?i)\baction\b[*_"'\s]*(?:[:=][*_"'\s\[(]*)?{NUM}"#)).expect("valid regex")
});

// "0.7 factual", "60% weighting on factual information", "40% on subjectivity"
static WEIGHT_BEFORE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(r"(?i){WNUM}\s*(%)?\s*(?:weight(?:ing)?\s+)?(?:(?:on|to|for)\s+)?(?:the\s+)?(fact|subjectiv)"))
        .expect("valid regex")
});

// "Factual: 0.7", "subjective weight = 30%"
static WEIGHT_AFTER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i)\b(fact|subjectiv)\w*[*_\s]*(?:information\s+)?(?:weight(?:ing)?)?[*_\s]*[:=][*_\s]*{WNUM}\s*(%)?"
    ))
    .expect("valid regex")
});

fn parse_num(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Last number after an `Action` label, rounded to one decimal and clamped to [-1, 1].
fn parse_action(text: &str) -> Result<f64, ParseError> {
    let raw = ACTION.captures_iter(text).filter_map(|c| parse_num(&c[1])).last().ok_or(ParseError::NoAction)?;
    let rounded = (raw * 10.0).round() / 10.0;
    if !(-1.0..=1.0).contains(&rounded) {
        warn!("trade action {raw} outside [-1, 1]; clamping");
    }
    // `+ 0.0` folds -0.0 into 0.0.
    Ok(rounded.clamp(-1.0, 1.0) + 0.0)
}

fn as_fraction(value: f64, percent: bool) -> Option<f64> {
    let v = if percent || value > 1.0 { value / 100.0 } else { value };
    (0.0..=1.0).contains(&v).then_some(v)
}

/// `(fact, subjective)` weights summing to 1; 0.5/0.5 when absent or unusable.
fn parse_weights(text: &str) -> (f64, f64) {
    let mut fact = None;
    let mut subj = None;
    let mut record = |label: &str, value: Option<f64>| {
        let slot = if label.eq_ignore_ascii_case("fact") { &mut fact } else { &mut subj };
        if slot.is_none() {
            *slot = value;
        }
    };
    for c in WEIGHT_BEFORE.captures_iter(text) {
        record(&c[3], parse_num(&c[1]).and_then(|v| as_fraction(v, c.get(2).is_some())));
    }
    for c in WEIGHT_AFTER.captures_iter(text) {
        record(&c[1], parse_num(&c[2]).and_then(|v| as_fraction(v, c.get(3).is_some())));
    }
    match (fact, subj) {
        (Some(f), Some(s)) if f + s > 0.0 => (f / (f + s), s / (f + s)),
        (Some(f), None) => (f, 1.0 - f),
        (None, Some(s)) => (1.0 - s, s),
        _ => (0.5, 0.5),
    }
}

pub fn parse_trade_decision(text: &str) -> Result<TradeDecision, ParseError> {
    let normalized = text.replace(['\u{2212}', '\u{2013}'], "-");
    let action = parse_action(&normalized)?;
    let (fact_weight, subjective_weight) = parse_weights(&normalized);
    Ok(TradeDecision {
        action: TradeAction::new(action).expect("clamped into range"),
        fact_weight,
        subjective_weight,
        rationale: text.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, proptest};

    fn parsed(text: &str) -> (f64, f64, f64) {
        let d = parse_trade_decision(text).unwrap();
        (d.action.value(), d.fact_weight, d.subjective_weight)
    }

    #[test]
    fn documented_examples() {
        let (a, f, s) = parsed("Weighting: 0.7 factual, 0.3 subjective. 4. Action: 0.6");
        assert_eq!(a, 0.6);
        assert!((f - 0.7).abs() < 1e-12 && (s - 0.3).abs() < 1e-12);
        assert_eq!(parsed("Action: 1.73").0, 1.0);
        assert_eq!(parse_trade_decision("no action here"), Err(ParseError::NoAction));
        assert_eq!(parsed("Action: -0.4...Slight sell to reduce exposure").0, -0.4);
    }

    #[test]
    fn label_variants() {
        assert_eq!(parsed("**Action:** 0.3").0, 0.3);
        assert_eq!(parsed("4. **Action**: -0.25").0, -0.3);
        assert_eq!(parsed("Action = \u{2212}0.5").0, -0.5);
        assert_eq!(parsed("Action: 0.2\nRevised action: -0.1").0, -0.1);
        assert_eq!(parsed("Final Action: [0.8]").0, 0.8);
        assert_eq!(parsed("action: -0.04").0, 0.0);
        assert!(parse_trade_decision("This is actionable: 0.5").is_err());
    }

    #[test]
    fn weight_variants() {
        let (_, f, s) =
            parsed("approximately 60% weighting on factual information and 40% on subjectivity. Action: 0.2");
        assert!((f - 0.6).abs() < 1e-12 && (s - 0.4).abs() < 1e-12);
        let (_, f, s) = parsed("Factual: 0.8, Subjective: 0.2. Action: 0.5");
        assert!((f - 0.8).abs() < 1e-12 && (s - 0.2).abs() < 1e-12);
        let (_, f, s) = parsed("0.9 factual. Action: 0.5");
        assert!((f - 0.9).abs() < 1e-12 && (s - 0.1).abs() < 1e-12);
        assert_eq!(parsed("1 factual, 1 subjective. Action: 0").1, 0.5);
        assert_eq!(parsed("Action: 0.1").1, 0.5);
        assert_eq!(parsed("2. Factual vs Subjective Weighting: balanced.\n4. Action: 0.1").1, 0.5);
    }

    proptest! {
        #[test]
        fn invariants_hold_for_any_text(s in "\\PC{0,200}") {
            if let Ok(d) = parse_trade_decision(&s) {
                let a = d.action.value();
                prop_assert!((-1.0..=1.0).contains(&a));
                prop_assert!(((a * 10.0).round() / 10.0 - a).abs() < 1e-12);
                prop_assert!((d.fact_weight + d.subjective_weight - 1.0).abs() < 1e-6);
                prop_assert!((0.0..=1.0).contains(&d.fact_weight) && (0.0..=1.0).contains(&d.subjective_weight));
            }
        }

        #[test]
        fn invariants_hold_for_labelled_noise(a in -1e6f64..1e6, f in 0.0f64..200.0, s in 0.0f64..200.0) {
            let d = parse_trade_decision(&format!("{f} factual, {s}% subjective\nAction: {a}")).unwrap();
            prop_assert!((-1.0..=1.0).contains(&d.action.value()));
            prop_assert!((d.fact_weight + d.subjective_weight - 1.0).abs() < 1e-6);
        }
    }
}
