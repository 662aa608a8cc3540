use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::AssetId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    Validation,
    TestBull,
    TestBear,
}

impl SplitKind {
    pub const ALL: [SplitKind; 3] = [SplitKind::Validation, SplitKind::TestBull, SplitKind::TestBear];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitKind::Validation => "validation",
            SplitKind::TestBull => "test_bull",
            SplitKind::TestBear => "test_bear",
        }
    }
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "validation" | "val" => Ok(SplitKind::Validation),
            "test_bull" | "bull" => Ok(SplitKind::TestBull),
            "test_bear" | "bear" => Ok(SplitKind::TestBear),
            other => Err(format!("unknown split `{other}` (expected validation, test_bull or test_bear)")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("split start {start} must precede end {end}")]
    DateOrder { start: NaiveDate, end: NaiveDate },
    #[error("split prices must be positive")]
    NonPositivePrice,
}

/// A named trading period. Trading days are `[start_date, end_date)`; the
/// portfolio is valued at `end_price` on `end_date`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub asset_id: AssetId,
    pub kind: SplitKind,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub start_price: f64,
    pub end_price: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_trend: Option<f64>,
}

impl DatasetSplit {
    pub fn new(
        asset_id: AssetId,
        kind: SplitKind,
        start_date: NaiveDate,
        end_date: NaiveDate,
        start_price: f64,
        end_price: f64,
    ) -> Result<Self, SplitError> {
        let split = Self { asset_id, kind, start_date, end_date, start_price, end_price, expected_trend: None };
        split.validate()?;
        Ok(split)
    }

    pub fn with_expected_trend(mut self, trend_pct: f64) -> Self {
        self.expected_trend = Some(trend_pct);
        self
    }

    pub fn validate(&self) -> Result<(), SplitError> {
        if self.start_date >= self.end_date {
            return Err(SplitError::DateOrder { start: self.start_date, end: self.end_date });
        }
        if !(self.start_price > 0.0 && self.end_price > 0.0) {
            return Err(SplitError::NonPositivePrice);
        }
        Ok(())
    }

    /// Trading days in `[start_date, end_date)`.
    pub fn trading_days(&self) -> impl Iterator<Item = NaiveDate> {
        let end = self.end_date;
        self.start_date.iter_days().take_while(move |d| *d < end)
    }

    pub fn num_trading_days(&self) -> usize {
        (self.end_date - self.start_date).num_days() as usize
    }
}

/// Price change over the split, in percent.
pub fn split_trend(split: &DatasetSplit) -> f64 {
    (split.end_price - split.start_price) / split.start_price * 100.0
}

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid calendar date")
}

/// The nine published evaluation periods (BTC/ETH/SOL x validation/bull/bear),
/// with their printed Open/Close valuation prices and Trend column.
pub fn reference_splits() -> Vec<DatasetSplit> {
    use AssetId::*;
    use SplitKind::*;
    type Ymd = (i32, u32, u32);
    let rows: [(AssetId, SplitKind, Ymd, Ymd, f64, f64, f64); 9] = [
        (Btc, Validation, (2023, 11, 16), (2024, 1, 15), 37879.97, 42511.96, 12.23),
        (Btc, TestBull, (2024, 1, 24), (2024, 3, 13), 39877.59, 71631.35, 79.63),
        (Btc, TestBear, (2024, 5, 21), (2024, 7, 13), 71443.06, 59231.95, -17.09),
        (Eth, Validation, (2023, 11, 10), (2024, 1, 8), 2121.06, 2333.03, 9.99),
        (Eth, TestBull, (2024, 1, 24), (2024, 3, 13), 2241.74, 4006.45, 78.72),
        (Eth, TestBear, (2024, 5, 27), (2024, 7, 8), 3826.13, 2929.86, -23.42),
        (Sol, Validation, (2023, 11, 16), (2024, 1, 8), 65.53, 97.79, 49.18),
        (Sol, TestBull, (2024, 1, 24), (2024, 3, 13), 84.28, 151.02, 77.35),
        (Sol, TestBear, (2024, 5, 21), (2024, 7, 11), 186.51, 127.61, -15.53),
    ];
    rows.iter()
        .map(|&(asset, kind, s, e, open, close, trend)| DatasetSplit {
            asset_id: asset,
            kind,
            start_date: ymd(s.0, s.1, s.2),
            end_date: ymd(e.0, e.1, e.2),
            start_price: open,
            end_price: close,
            expected_trend: Some(trend),
        })
        .collect()
}

pub fn reference_split(asset: AssetId, kind: SplitKind) -> DatasetSplit {
    reference_splits()
        .into_iter()
        .find(|s| s.asset_id == asset && s.kind == kind)
        .expect("every asset has all three splits")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_examples() {
        let eth_val = reference_split(AssetId::Eth, SplitKind::Validation);
        assert!((split_trend(&eth_val) - 9.99).abs() < 0.005);
        let btc_bull = reference_split(AssetId::Btc, SplitKind::TestBull);
        assert!((split_trend(&btc_bull) - 79.63).abs() < 0.005);
        let flat =
            DatasetSplit::new(AssetId::Btc, SplitKind::Validation, ymd(2024, 1, 1), ymd(2024, 1, 2), 5.0, 5.0).unwrap();
        assert_eq!(split_trend(&flat), 0.0);
    }

    #[test]
    fn btc_and_eth_rows_match_printed_trend() {
        for split in reference_splits().iter().filter(|s| s.asset_id != AssetId::Sol) {
            let diff = (split_trend(split) - split.expected_trend.unwrap()).abs();
            assert!(diff < 0.005, "{} {}: off by {diff}", split.asset_id, split.kind);
        }
    }

    #[test]
    fn invariants_enforced() {
        let d = ymd(2024, 1, 1);
        assert_eq!(
            DatasetSplit::new(AssetId::Btc, SplitKind::TestBull, d, d, 1.0, 1.0),
            Err(SplitError::DateOrder { start: d, end: d })
        );
        assert_eq!(
            DatasetSplit::new(AssetId::Btc, SplitKind::TestBull, d, ymd(2024, 1, 5), 0.0, 1.0),
            Err(SplitError::NonPositivePrice)
        );
    }

    #[test]
    fn trading_days_exclude_end() {
        let split = reference_split(AssetId::Btc, SplitKind::TestBull);
        let days: Vec<_> = split.trading_days().collect();
        assert_eq!(days.len(), split.num_trading_days());
        assert_eq!(days[0], split.start_date);
        assert_eq!(*days.last().unwrap(), ymd(2024, 3, 12));
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("bull".parse::<SplitKind>(), Ok(SplitKind::TestBull));
        assert_eq!("test-bear".parse::<SplitKind>(), Ok(SplitKind::TestBear));
        assert!("sideways".parse::<SplitKind>().is_err());
    }
}
