//! Deterministic synthetic market data for offline fixtures.
//!
//! Open prices follow a seeded log-space random walk that is pinned to given
//! anchor prices (a Brownian bridge between consecutive anchors). Each day's
//! close equals the next day's open.

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{AssetId, DatasetSplit, MarketDaySnapshot, MarketSeries, NewsArticle, NewsFeed};

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub asset_id: AssetId,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
    /// `(date, open price)` pins, strictly inside `[first_date, last_date]`.
    pub anchors: Vec<(NaiveDate, f64)>,
    /// Standard deviation of daily log returns.
    pub daily_vol: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Anchors every split's start date at its start price and its end date at its end price.
    pub fn from_splits(
        asset_id: AssetId,
        splits: &[DatasetSplit],
        margin_days: u64,
        daily_vol: f64,
        seed: u64,
    ) -> Self {
        let mut anchors: Vec<(NaiveDate, f64)> = splits
            .iter()
            .filter(|s| s.asset_id == asset_id)
            .flat_map(|s| [(s.start_date, s.start_price), (s.end_date, s.end_price)])
            .collect();
        anchors.sort_by_key(|a| a.0);
        anchors.dedup_by_key(|a| a.0);
        let first = anchors.first().expect("at least one split").0 - Days::new(margin_days);
        let last = anchors.last().expect("at least one split").0 + Days::new(margin_days);
        Self { asset_id, first_date: first, last_date: last, anchors, daily_vol, seed }
    }
}

pub fn synthetic_series(spec: &SyntheticSpec) -> MarketSeries {
    let n = (spec.last_date - spec.first_date).num_days() as usize + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let step = Normal::new(0.0, spec.daily_vol).expect("finite volatility");
    let mut walk = vec![0.0f64; n];
    for i in 1..n {
        walk[i] = walk[i - 1] + step.sample(&mut rng);
    }

    let pins: Vec<(usize, f64)> =
        spec.anchors.iter().map(|(d, p)| ((*d - spec.first_date).num_days() as usize, p.ln())).collect();
    let log_price = |i: usize| -> f64 {
        match pins.iter().position(|(idx, _)| *idx >= i) {
            None => {
                let (a, la) = *pins.last().expect("anchors");
                la + walk[i] - walk[a]
            }
            Some(0) => {
                let (b, lb) = pins[0];
                lb + walk[i] - walk[b]
            }
            Some(k) => {
                let ((a, la), (b, lb)) = (pins[k - 1], pins[k]);
                let t = (i - a) as f64 / (b - a) as f64;
                la + (lb - la) * t + (walk[i] - walk[a]) - (walk[b] - walk[a]) * t
            }
        }
    };
    let opens: Vec<f64> = (0..n).map(|i| round_cents(log_price(i).exp())).collect();

    let scale = opens[0];
    let days = (0..n - 1)
        .map(|i| {
            let date = spec.first_date + Days::new(i as u64);
            let activity: f64 = rng.random_range(0.7..1.3);
            MarketDaySnapshot {
                date,
                open_price: opens[i],
                close_price: opens[i + 1],
                volume: (activity * 2.5e4 * scale).round(),
                avg_gas_fee: (activity * 1e4).round() / 1e6,
                unique_addresses: (activity * 550_000.0).round() as u64,
                total_value_transferred: (activity * 1.1e5 * scale).round(),
            }
        })
        .collect();
    MarketSeries::new(spec.asset_id, days).expect("synthetic series satisfies invariants")
}

fn round_cents(p: f64) -> f64 {
    ((p * 100.0).round() / 100.0).max(0.01)
}

const HEADLINES: [(&str, &str, &str); 8] = [
    (
        "{name} network records rise in daily active addresses",
        "On-chain data shows {name} unique addresses climbing for a third straight session.",
        "crypto.news",
    ),
    (
        "Regulator publishes filing timeline for spot {symbol} products",
        "The agency set comment deadlines for several pending {name} exchange-traded product applications.",
        "Bloomberg",
    ),
    (
        "Analyst says {symbol} could retest recent highs within weeks",
        "A senior market strategist argued momentum traders are likely to push {name} higher.",
        "Yahoo Finance",
    ),
    (
        "Exchange outflows of {symbol} reach monthly high",
        "Wallet trackers reported large transfers of {name} off centralized exchanges.",
        "crypto.news",
    ),
    (
        "Trader warns {name} rally looks overextended",
        "A prominent trader said sentiment around {name} is frothy and a pullback is overdue.",
        "Yahoo Finance",
    ),
    (
        "{name} developers schedule protocol upgrade",
        "Core developers confirmed a date for the next {name} network upgrade after testnet trials.",
        "Bloomberg",
    ),
    (
        "Fund manager calls {symbol} a long-term hedge",
        "In an interview, a portfolio manager said {name} allocations are likely to grow.",
        "Bloomberg",
    ),
    (
        "Derivatives open interest in {symbol} climbs",
        "Futures data shows open interest in {name} contracts rising alongside funding rates.",
        "crypto.news",
    ),
];

/// One to three templated articles per day over `[first, last]`.
pub fn synthetic_news(asset_id: AssetId, first: NaiveDate, last: NaiveDate, seed: u64) -> NewsFeed {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fill = |t: &str| t.replace("{name}", asset_id.name()).replace("{symbol}", asset_id.symbol());
    let mut articles = Vec::new();
    for date in first.iter_days().take_while(|d| *d <= last) {
        let count = rng.random_range(1..=3);
        for _ in 0..count {
            let (title, body, source) = HEADLINES[rng.random_range(0..HEADLINES.len())];
            articles.push(NewsArticle {
                date,
                title: fill(title),
                body: fill(body),
                source: source.to_string(),
                url: None,
            });
        }
    }
    NewsFeed::with_range(asset_id, first, last, articles).expect("articles generated inside range")
}

/// The bundled offline dataset for `asset`: a synthetic series pinned to the
/// reference split prices (45 days of margin either side) and templated news.
pub fn reference_fixture(asset_id: AssetId) -> (MarketSeries, NewsFeed) {
    let (vol, seed) = match asset_id {
        AssetId::Btc => (0.025, 11),
        AssetId::Eth => (0.03, 22),
        AssetId::Sol => (0.04, 33),
    };
    let spec = SyntheticSpec::from_splits(asset_id, &super::reference_splits(), 45, vol, seed);
    let series = synthetic_series(&spec);
    let (first, last) = (series.first_date().expect("non-empty"), series.last_date().expect("non-empty"));
    (series, synthetic_news(asset_id, first, last, seed + 100))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::{reference_splits, split_trend};

    #[test]
    fn anchors_are_hit_and_output_is_deterministic() {
        let splits = reference_splits();
        let spec = SyntheticSpec::from_splits(AssetId::Btc, &splits, 45, 0.025, 7);
        let a = synthetic_series(&spec);
        let b = synthetic_series(&spec);
        assert_eq!(a, b);
        for s in splits.iter().filter(|s| s.asset_id == AssetId::Btc) {
            assert_eq!(a.get(s.start_date).unwrap().open_price, s.start_price);
            assert_eq!(a.get(s.end_date).unwrap().open_price, s.end_price);
            assert!(split_trend(s).is_finite());
        }
    }

    #[test]
    fn reference_fixture_covers_every_split() {
        for asset in [AssetId::Btc, AssetId::Eth, AssetId::Sol] {
            let (series, news) = reference_fixture(asset);
            for s in reference_splits().iter().filter(|s| s.asset_id == asset) {
                assert_eq!(series.get(s.start_date).unwrap().open_price, s.start_price);
                assert!(series.get(s.end_date).is_some());
                assert!(!news.on(s.start_date).is_empty());
            }
        }
    }

    #[test]
    fn news_is_in_range() {
        let first = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
        let last = NaiveDate::from_ymd_opt(2024, 1, 10).unwrap();
        let feed = synthetic_news(AssetId::Eth, first, last, 3);
        assert!(feed.len() >= 10);
        assert!(feed.articles().all(|a| a.title.contains("Ethereum") || a.title.contains("ETH")));
    }
}
