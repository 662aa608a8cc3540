//! Market statistics and news ingestion, date windows, and dataset splits.
//!
//! Market CSV columns are fixed, in this order:
//! `date,open_price,close_price,volume,avg_gas_fee,unique_addresses,total_value_transferred`.
//! Dates are ISO-8601 calendar days (UTC). A loaded [`MarketSeries`] is sorted,
//! duplicate-free and has no missing days.

mod news;
mod remote;
mod splits;
pub mod synthetic;

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use news::{load_news_json, parse_news_json, write_news_json, NewsArticle, NewsError, NewsFeed};
pub use remote::{fetch_news_remote, DateRange, RemoteNewsConfig, RemoteNewsError};
pub use splits::{reference_split, reference_splits, split_trend, DatasetSplit, SplitError, SplitKind};

pub const CSV_HEADER: [&str; 7] =
    ["date", "open_price", "close_price", "volume", "avg_gas_fee", "unique_addresses", "total_value_transferred"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AssetId {
    Btc,
    Eth,
    Sol,
}

impl AssetId {
    pub const ALL: [AssetId; 3] = [AssetId::Btc, AssetId::Eth, AssetId::Sol];

    pub fn symbol(self) -> &'static str {
        match self {
            AssetId::Btc => "BTC",
            AssetId::Eth => "ETH",
            AssetId::Sol => "SOL",
        }
    }

    /// Full coin name, used as the news search keyword.
    pub fn name(self) -> &'static str {
        match self {
            AssetId::Btc => "Bitcoin",
            AssetId::Eth => "Ethereum",
            AssetId::Sol => "Solana",
        }
    }
}

impl fmt::Display for AssetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for AssetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "BTC" => Ok(AssetId::Btc),
            "ETH" => Ok(AssetId::Eth),
            "SOL" => Ok(AssetId::Sol),
            other => Err(format!("unknown asset `{other}` (expected BTC, ETH or SOL)")),
        }
    }
}

/// One day of price and on-chain statistics for one asset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketDaySnapshot {
    pub date: NaiveDate,
    #[serde(alias = "open")]
    pub open_price: f64,
    #[serde(alias = "close")]
    pub close_price: f64,
    pub volume: f64,
    pub avg_gas_fee: f64,
    pub unique_addresses: u64,
    pub total_value_transferred: f64,
}

impl MarketDaySnapshot {
    fn validate(&self) -> Result<(), &'static str> {
        if !(self.open_price > 0.0 && self.close_price > 0.0) {
            return Err("non-positive price");
        }
        if !(self.volume >= 0.0 && self.total_value_transferred >= 0.0 && self.avg_gas_fee >= 0.0) {
            return Err("negative volume, gas fee or transferred value");
        }
        if !(self.open_price.is_finite()
            && self.close_price.is_finite()
            && self.volume.is_finite()
            && self.avg_gas_fee.is_finite()
            && self.total_value_transferred.is_finite())
        {
            return Err("non-finite number");
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum MarketDataError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("line {line}: non-positive price")]
    NonPositivePrice { line: u64 },
    #[error("line {line}: {message}")]
    InvalidValue { line: u64, message: String },
    #[error("unexpected header: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
    #[error("missing date {0}: series must contain every calendar day")]
    MissingDate(NaiveDate),
    #[error("date {0} is not in the series")]
    DateNotInSeries(NaiveDate),
    #[error("lookback must be at least 1")]
    ZeroLookback,
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// A validated, gap-free daily series for one asset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketSeries {
    pub asset_id: AssetId,
    days: Vec<MarketDaySnapshot>,
}

impl MarketSeries {
    /// Sorts `days` and checks the per-day and series invariants.
    pub fn new(asset_id: AssetId, mut days: Vec<MarketDaySnapshot>) -> Result<Self, MarketDataError> {
        for (i, day) in days.iter().enumerate() {
            day.validate().map_err(|message| {
                if message == "non-positive price" {
                    MarketDataError::NonPositivePrice { line: i as u64 + 2 }
                } else {
                    MarketDataError::InvalidValue { line: i as u64 + 2, message: message.to_string() }
                }
            })?;
        }
        days.sort_by_key(|d| d.date);
        check_contiguous(&days)?;
        Ok(Self { asset_id, days })
    }

    pub fn days(&self) -> &[MarketDaySnapshot] {
        &self.days
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.days.first().map(|d| d.date)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.days.last().map(|d| d.date)
    }

    /// Index of `date`, relying on the gap-free invariant.
    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let first = self.first_date()?;
        let offset = (date - first).num_days();
        if offset < 0 || offset as usize >= self.days.len() {
            return None;
        }
        Some(offset as usize)
    }

    pub fn get(&self, date: NaiveDate) -> Option<&MarketDaySnapshot> {
        self.index_of(date).map(|i| &self.days[i])
    }

    pub fn open_prices(&self) -> Vec<f64> {
        self.days.iter().map(|d| d.open_price).collect()
    }
}

fn check_contiguous(days: &[MarketDaySnapshot]) -> Result<(), MarketDataError> {
    for pair in days.windows(2) {
        let (prev, next) = (pair[0].date, pair[1].date);
        if next == prev {
            return Err(MarketDataError::DuplicateDate(next));
        }
        if let Some(expected) = prev.succ_opt() {
            if next != expected {
                return Err(MarketDataError::MissingDate(expected));
            }
        }
    }
    Ok(())
}

pub fn load_market_csv(path: impl AsRef<Path>, asset_id: AssetId) -> Result<MarketSeries, MarketDataError> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| MarketDataError::Io { path: path.display().to_string(), source })?;
    parse_market_csv(&text, asset_id)
}

pub fn parse_market_csv(text: &str, asset_id: AssetId) -> Result<MarketSeries, MarketDataError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let canonical = header.iter().map(String::as_str).eq(CSV_HEADER.iter().copied());
    let short = header.iter().map(String::as_str).eq([
        "date",
        "open",
        "close",
        "volume",
        "avg_gas_fee",
        "unique_addresses",
        "total_value_transferred",
    ]);
    if !canonical && !short {
        return Err(MarketDataError::Header { expected: CSV_HEADER.join(","), found: header.join(",") });
    }

    let mut days = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != CSV_HEADER.len() {
            return Err(MarketDataError::MalformedRow {
                line,
                message: format!("expected {} fields, found {}", CSV_HEADER.len(), record.len()),
            });
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| MarketDataError::MalformedRow {
            line,
            message: format!("unparseable date `{}`: {e}", &record[0]),
        })?;
        let num = |i: usize| -> Result<f64, MarketDataError> {
            record[i].parse::<f64>().map_err(|_| MarketDataError::MalformedRow {
                line,
                message: format!("unparseable number `{}` in column {}", &record[i], CSV_HEADER[i]),
            })
        };
        let unique_addresses = record[5].parse::<u64>().map_err(|_| MarketDataError::MalformedRow {
            line,
            message: format!("unparseable count `{}` in column unique_addresses", &record[5]),
        })?;
        let day = MarketDaySnapshot {
            date,
            open_price: num(1)?,
            close_price: num(2)?,
            volume: num(3)?,
            avg_gas_fee: num(4)?,
            unique_addresses,
            total_value_transferred: num(6)?,
        };
        day.validate().map_err(|message| match message {
            "non-positive price" => MarketDataError::NonPositivePrice { line },
            other => MarketDataError::InvalidValue { line, message: other.to_string() },
        })?;
        days.push(day);
    }
    days.sort_by_key(|d| d.date);
    check_contiguous(&days)?;
    Ok(MarketSeries { asset_id, days })
}

/// Writes the series in the canonical column order. Floats use Rust's shortest
/// round-trip formatting, so re-loading yields an identical series.
pub fn write_market_csv<W: Write>(series: &MarketSeries, writer: W) -> Result<(), MarketDataError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for d in &series.days {
        w.write_record([
            d.date.format("%Y-%m-%d").to_string(),
            d.open_price.to_string(),
            d.close_price.to_string(),
            d.volume.to_string(),
            d.avg_gas_fee.to_string(),
            d.unique_addresses.to_string(),
            d.total_value_transferred.to_string(),
        ])?;
    }
    w.flush().map_err(|e| MarketDataError::Csv(e.into()))?;
    Ok(())
}

/// The `lookback` most recent snapshots ending at and including `as_of`.
pub fn slice_window(series: &MarketSeries, as_of: NaiveDate, lookback: usize) -> Result<MarketSeries, MarketDataError> {
    if lookback == 0 {
        return Err(MarketDataError::ZeroLookback);
    }
    let end = series.index_of(as_of).ok_or(MarketDataError::DateNotInSeries(as_of))?;
    let start = (end + 1).saturating_sub(lookback);
    Ok(MarketSeries { asset_id: series.asset_id, days: series.days[start..=end].to_vec() })
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    const GOOD: &str = "date,open_price,close_price,volume,avg_gas_fee,unique_addresses,total_value_transferred
2024-01-02,101.5,102,5000,0.3,1200,90000
2024-01-01,100,101.5,4000,0.2,1100,80000
2024-01-03,102,99,4500,0.25,1150,85000
";

    #[test]
    fn loads_three_rows_sorted() {
        let s = parse_market_csv(GOOD, AssetId::Eth).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.first_date(), Some(d("2024-01-01")));
        assert_eq!(s.days()[1].open_price, 101.5);
        assert_eq!(s.asset_id, AssetId::Eth);
    }

    #[test]
    fn loads_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, GOOD).unwrap();
        assert_eq!(load_market_csv(&path, AssetId::Btc).unwrap().len(), 3);
        assert!(matches!(load_market_csv(dir.path().join("nope.csv"), AssetId::Btc), Err(MarketDataError::Io { .. })));
    }

    #[test]
    fn rejects_negative_open() {
        let text = GOOD.replace("2024-01-03,102", "2024-01-03,-1");
        let err = parse_market_csv(&text, AssetId::Btc).unwrap_err();
        assert!(err.to_string().contains("non-positive price"), "{err}");
        assert!(err.to_string().starts_with("line 4"), "{err}");
    }

    #[test]
    fn rejects_duplicate_date() {
        let text = GOOD.replace("2024-01-03", "2024-01-02");
        let err = parse_market_csv(&text, AssetId::Btc).unwrap_err();
        assert!(err.to_string().contains("duplicate date"), "{err}");
    }

    #[test]
    fn rejects_gap_and_bad_number() {
        let gap = GOOD.replace("2024-01-03", "2024-01-05");
        assert!(matches!(parse_market_csv(&gap, AssetId::Btc), Err(MarketDataError::MissingDate(_))));
        let bad = GOOD.replace("5000", "5k");
        let err = parse_market_csv(&bad, AssetId::Btc).unwrap_err();
        assert!(err.to_string().contains("line 2") && err.to_string().contains("unparseable number"), "{err}");
    }

    #[test]
    fn rejects_wrong_header() {
        let text = GOOD.replacen("open_price,close_price", "close_price,open_price", 1);
        assert!(matches!(parse_market_csv(&text, AssetId::Btc), Err(MarketDataError::Header { .. })));
    }

    #[test]
    fn window_examples() {
        let start = d("2024-01-01");
        let s = series_from_opens(start, &(1..=10).map(f64::from).collect::<Vec<_>>());
        let w = slice_window(&s, d("2024-01-10"), 3).unwrap();
        assert_eq!(w.open_prices(), vec![8.0, 9.0, 10.0]);
        let head = slice_window(&s, start, 3).unwrap();
        assert_eq!(head.open_prices(), vec![1.0]);
        assert!(matches!(slice_window(&s, d("2024-02-01"), 3), Err(MarketDataError::DateNotInSeries(_))));
        assert!(matches!(slice_window(&s, start, 0), Err(MarketDataError::ZeroLookback)));
    }

    fn arb_series() -> impl Strategy<Value = MarketSeries> {
        prop::collection::vec(
            (1e-3f64..1e6, 1e-3f64..1e6, 0.0f64..1e12, 0.0f64..100.0, 0u64..10_000_000, 0.0f64..1e12),
            1..40,
        )
        .prop_map(|rows| {
            let start = NaiveDate::from_ymd_opt(2023, 11, 1).unwrap();
            let days = rows
                .into_iter()
                .enumerate()
                .map(|(i, (o, c, v, g, u, t))| MarketDaySnapshot {
                    date: start + chrono::Days::new(i as u64),
                    open_price: o,
                    close_price: c,
                    volume: v,
                    avg_gas_fee: g,
                    unique_addresses: u,
                    total_value_transferred: t,
                })
                .collect();
            MarketSeries::new(AssetId::Sol, days).unwrap()
        })
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_identity(series in arb_series()) {
            let mut buf = Vec::new();
            write_market_csv(&series, &mut buf).unwrap();
            let back = parse_market_csv(std::str::from_utf8(&buf).unwrap(), AssetId::Sol).unwrap();
            prop_assert_eq!(back, series);
        }

        #[test]
        fn window_length_is_bounded(len in 1usize..60, pos in 0usize..60, lookback in 1usize..20) {
            let pos = pos % len;
            let start = d("2024-03-01");
            let s = series_from_opens(start, &vec![1.0; len]);
            let w = slice_window(&s, start + chrono::Days::new(pos as u64), lookback).unwrap();
            prop_assert_eq!(w.len(), lookback.min(pos + 1));
        }
    }
}
