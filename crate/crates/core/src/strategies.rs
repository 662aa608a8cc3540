//! Rule-based baselines and their validation-split tuning.
//!
//! Every signal is full-allocation: `+1` spends all cash, `-1` sells all
//! holdings, `0` holds. Signals at day `i` read only `prices[..=i]`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{run_backtest, BacktestConfig, EngineError, Observation, Strategy, StrategyError, TradeAction};
use crate::indicators::{self, PriceSeries, BOLLINGER_K, BOLLINGER_WINDOW};
use crate::market_data::{DatasetSplit, MarketSeries, NewsFeed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyKind {
    BuyAndHold,
    Sma { window: usize },
    Slma { short_window: usize, long_window: usize },
    Macd,
    Bollinger,
    Agent,
}

#[derive(Debug, Error, PartialEq)]
pub enum StrategyParamError {
    #[error("SLMA needs short window < long window, got {short} >= {long}")]
    SlmaOrder { short: usize, long: usize },
    #[error("moving-average window must be at least 1")]
    ZeroWindow,
    #[error("`{0}` is not a rule-based strategy")]
    NotRuleBased(StrategyKind),
}

impl StrategyKind {
    pub fn validate(&self) -> Result<(), StrategyParamError> {
        match *self {
            StrategyKind::Sma { window: 0 } => Err(StrategyParamError::ZeroWindow),
            StrategyKind::Slma { short_window: 0, .. } => Err(StrategyParamError::ZeroWindow),
            StrategyKind::Slma { short_window, long_window } if short_window >= long_window => {
                Err(StrategyParamError::SlmaOrder { short: short_window, long: long_window })
            }
            _ => Ok(()),
        }
    }

    /// Row label used in result tables.
    pub fn family_label(&self) -> &'static str {
        match self {
            StrategyKind::BuyAndHold => "Buy and Hold",
            StrategyKind::Sma { .. } => "SMA",
            StrategyKind::Slma { .. } => "SLMA",
            StrategyKind::Macd => "MACD",
            StrategyKind::Bollinger => "Bollinger Bands",
            StrategyKind::Agent => "Agent",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyKind::Sma { window } => write!(f, "SMA({window})"),
            StrategyKind::Slma { short_window, long_window } => write!(f, "SLMA({short_window},{long_window})"),
            other => f.write_str(other.family_label()),
        }
    }
}

fn signal(value: f64) -> TradeAction {
    TradeAction::new(value).expect("signal values are -1, 0 or 1")
}

pub fn buy_and_hold_signal(day_index: usize) -> TradeAction {
    if day_index == 0 {
        TradeAction::FULL_BUY
    } else {
        TradeAction::HOLD
    }
}

/// `+1` above the SMA, `-1` below, `0` when equal or still warming up.
pub fn sma_signal(prices: &PriceSeries, window: usize, day_index: usize) -> TradeAction {
    let Ok(avg) = indicators::sma(&prices.prefix(day_index + 1), window) else {
        return TradeAction::HOLD;
    };
    match (prices.values().get(day_index), avg.get(day_index).copied().flatten()) {
        (Some(&p), Some(m)) if p > m => TradeAction::FULL_BUY,
        (Some(&p), Some(m)) if p < m => TradeAction::FULL_SELL,
        _ => TradeAction::HOLD,
    }
}

/// Crossing of line `a` over line `b` between two consecutive days. Equality
/// counts as "below", so touching from above is a downward cross.
pub fn crossover(prev_a: f64, prev_b: f64, a: f64, b: f64) -> TradeAction {
    if prev_a <= prev_b && a > b {
        TradeAction::FULL_BUY
    } else if prev_a > prev_b && a <= b {
        TradeAction::FULL_SELL
    } else {
        TradeAction::HOLD
    }
}

pub fn slma_signal(
    prices: &PriceSeries,
    short: usize,
    long: usize,
    day_index: usize,
) -> Result<TradeAction, StrategyParamError> {
    StrategyKind::Slma { short_window: short, long_window: long }.validate()?;
    if day_index == 0 || day_index >= prices.len() {
        return Ok(TradeAction::HOLD);
    }
    let prefix = prices.prefix(day_index + 1);
    let s = indicators::sma(&prefix, short).expect("validated window");
    let l = indicators::sma(&prefix, long).expect("validated window");
    Ok(match (s[day_index - 1], l[day_index - 1], s[day_index], l[day_index]) {
        (Some(ps), Some(pl), Some(cs), Some(cl)) => crossover(ps, pl, cs, cl),
        _ => TradeAction::HOLD,
    })
}

/// MACD line crossing its signal line between `day_index - 1` and `day_index`.
pub fn macd_signal(prices: &PriceSeries, day_index: usize) -> TradeAction {
    if day_index == 0 || day_index >= prices.len() {
        return TradeAction::HOLD;
    }
    let m = indicators::macd(&prices.prefix(day_index + 1)).expect("non-empty prefix");
    crossover(
        m.macd_line[day_index - 1],
        m.signal_line[day_index - 1],
        m.macd_line[day_index],
        m.signal_line[day_index],
    )
}

/// Mean reversion: buy below the lower band, sell above the upper band.
pub fn bollinger_signal(prices: &PriceSeries, day_index: usize) -> TradeAction {
    let Some(&p) = prices.values().get(day_index) else {
        return TradeAction::HOLD;
    };
    let b = indicators::bollinger(&prices.prefix(day_index + 1), BOLLINGER_WINDOW, BOLLINGER_K)
        .expect("standard window is valid");
    // Collapsed bands on flat prices can differ from the price by rounding only.
    let tol = 1e-12 * p;
    match (b.lower[day_index], b.upper[day_index]) {
        (Some(lo), _) if p < lo - tol => signal(1.0),
        (_, Some(hi)) if p > hi + tol => signal(-1.0),
        _ => TradeAction::HOLD,
    }
}

/// Adapter running a rule-based [`StrategyKind`] on the engine's daily observation.
#[derive(Debug, Clone)]
pub struct RuleStrategy {
    kind: StrategyKind,
}

impl RuleStrategy {
    pub fn new(kind: StrategyKind) -> Result<Self, StrategyParamError> {
        kind.validate()?;
        if kind == StrategyKind::Agent {
            return Err(StrategyParamError::NotRuleBased(kind));
        }
        Ok(Self { kind })
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }
}

impl Strategy for RuleStrategy {
    fn name(&self) -> String {
        self.kind.to_string()
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Result<TradeAction, StrategyError> {
        let prices = PriceSeries::new(obs.open_prices())?;
        let today = prices.len() - 1;
        Ok(match self.kind {
            StrategyKind::BuyAndHold => buy_and_hold_signal(obs.day_index),
            StrategyKind::Sma { window } => sma_signal(&prices, window, today),
            StrategyKind::Slma { short_window, long_window } => slma_signal(&prices, short_window, long_window, today)?,
            StrategyKind::Macd => macd_signal(&prices, today),
            StrategyKind::Bollinger => bollinger_signal(&prices, today),
            StrategyKind::Agent => return Err(Box::new(StrategyParamError::NotRuleBased(self.kind))),
        })
    }
}

pub const DEFAULT_WINDOW_GRID: [usize; 6] = [5, 10, 15, 20, 25, 30];

pub fn sma_grid(windows: &[usize]) -> Vec<StrategyKind> {
    windows.iter().map(|&window| StrategyKind::Sma { window }).collect()
}

/// Every ordered pair `short < long` drawn from `windows`.
pub fn slma_grid(windows: &[usize]) -> Vec<StrategyKind> {
    let mut ws = windows.to_vec();
    ws.sort_unstable();
    ws.dedup();
    let mut out = Vec::new();
    for (i, &short_window) in ws.iter().enumerate() {
        for &long_window in &ws[i + 1..] {
            out.push(StrategyKind::Slma { short_window, long_window });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningCandidate {
    pub params: StrategyKind,
    pub total_return: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub split: DatasetSplit,
    pub candidates: Vec<TuningCandidate>,
    pub chosen: StrategyKind,
    pub chosen_return: f64,
}

#[derive(Debug, Error)]
pub enum TuningError {
    #[error("tuning grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Params(#[from] StrategyParamError),
    #[error("validation backtest of {params} failed: {source}")]
    Backtest {
        params: StrategyKind,
        #[source]
        source: EngineError,
    },
}

fn tie_break_key(kind: &StrategyKind) -> (usize, usize) {
    match *kind {
        StrategyKind::Sma { window } => (window, 0),
        StrategyKind::Slma { short_window, long_window } => (short_window, long_window),
        _ => (0, 0),
    }
}

/// Backtests every candidate fee-free on the validation split and keeps the
/// best total return; exact ties go to the smallest window(s).
pub fn tune(
    grid: &[StrategyKind],
    series: &MarketSeries,
    news: &NewsFeed,
    validation: &DatasetSplit,
    config: &BacktestConfig,
) -> Result<TuningResult, TuningError> {
    if grid.is_empty() {
        return Err(TuningError::EmptyGrid);
    }
    let fee_free = BacktestConfig { fee_rate: 0.0, ..config.clone() };
    let mut candidates = Vec::with_capacity(grid.len());
    for &params in grid {
        let mut strategy = RuleStrategy::new(params)?;
        let result = run_backtest(&mut strategy, series, news, validation, &fee_free)
            .map_err(|source| TuningError::Backtest { params, source })?;
        candidates.push(TuningCandidate { params, total_return: result.metrics.total_return });
    }
    let best = candidates
        .iter()
        .min_by(|a, b| {
            b.total_return
                .total_cmp(&a.total_return)
                .then_with(|| tie_break_key(&a.params).cmp(&tie_break_key(&b.params)))
        })
        .expect("non-empty grid");
    Ok(TuningResult { split: validation.clone(), chosen: best.params, chosen_return: best.total_return, candidates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::test_support::series_from_opens;
    use crate::market_data::{AssetId, SplitKind};
    use chrono::NaiveDate;
    use proptest::prelude::{prop, prop_assert, prop_assert_eq, proptest};

    fn ps(v: &[f64]) -> PriceSeries {
        PriceSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn buy_and_hold_examples() {
        assert_eq!(buy_and_hold_signal(0).value(), 1.0);
        assert_eq!(buy_and_hold_signal(1).value(), 0.0);
        assert_eq!(buy_and_hold_signal(57).value(), 0.0);
    }

    #[test]
    fn sma_examples() {
        // SMA(3) of [3,4,5] is 4.
        assert_eq!(sma_signal(&ps(&[3., 4., 5.]), 3, 2).value(), 1.0);
        assert_eq!(sma_signal(&ps(&[5., 4., 3.]), 3, 2).value(), -1.0);
        assert_eq!(sma_signal(&ps(&[5., 4., 3.]), 3, 1).value(), 0.0);
        assert_eq!(sma_signal(&ps(&[4., 4., 4.]), 3, 2).value(), 0.0);
    }

    #[test]
    fn crossover_examples() {
        assert_eq!(crossover(3.9, 4.0, 4.1, 4.0).value(), 1.0);
        assert_eq!(crossover(-0.1, 0.0, 0.1, 0.0).value(), 1.0);
        assert_eq!(crossover(4.1, 4.0, 3.9, 4.0).value(), -1.0);
        assert_eq!(crossover(4.1, 4.0, 4.0, 4.0).value(), -1.0);
        assert_eq!(crossover(4.0, 4.0, 4.0, 4.0).value(), 0.0);
        assert_eq!(crossover(3.0, 4.0, 3.5, 4.0).value(), 0.0);
    }

    #[test]
    fn slma_examples() {
        // short SMA(1) is the price; long SMA(2) of a rising-then-jumping path.
        let p = ps(&[4.0, 3.8, 4.4]);
        assert_eq!(slma_signal(&p, 1, 2, 2).unwrap().value(), 1.0);
        assert_eq!(slma_signal(&p, 1, 2, 1).unwrap().value(), 0.0);
        assert_eq!(slma_signal(&p, 1, 3, 1).unwrap().value(), 0.0);
        assert_eq!(slma_signal(&ps(&[1., 2., 3., 4.]), 1, 2, 3).unwrap().value(), 0.0);
        assert_eq!(slma_signal(&p, 3, 2, 2), Err(StrategyParamError::SlmaOrder { short: 3, long: 2 }));
    }

    #[test]
    fn macd_examples() {
        assert_eq!(macd_signal(&ps(&[5.0; 40]), 30).value(), 0.0);
        assert_eq!(macd_signal(&ps(&[5.0, 6.0]), 0).value(), 0.0);
        // Rally, dip, rally: MACD crosses down through its signal line, then back up.
        let mut p: Vec<f64> = (0..30).map(|i| 100.0 + i as f64).collect();
        p.extend([120.0, 110.0, 105.0, 103.0, 115.0, 130.0, 145.0, 160.0]);
        let prices = ps(&p);
        let fired: Vec<f64> = (0..p.len()).map(|i| macd_signal(&prices, i).value()).collect();
        let down = fired.iter().position(|x| *x == -1.0).expect("downward cross");
        assert!(down >= 30, "{fired:?}");
        assert!(fired[down + 1..].contains(&1.0), "{fired:?}");
    }

    #[test]
    fn bollinger_examples() {
        let mut p = [100.0, 101.0, 99.0, 100.5, 99.5].repeat(4);
        p.push(90.0);
        assert_eq!(bollinger_signal(&ps(&p), 20).value(), 1.0);
        assert_eq!(bollinger_signal(&ps(&p), 19).value(), 0.0);
        let mut q = p.clone();
        q[20] = 115.0;
        assert_eq!(bollinger_signal(&ps(&q), 20).value(), -1.0);
        assert_eq!(bollinger_signal(&ps(&[0.1; 30]), 25).value(), 0.0);
        assert_eq!(bollinger_signal(&ps(&p), 10).value(), 0.0);
    }

    #[test]
    fn grids() {
        assert_eq!(sma_grid(&DEFAULT_WINDOW_GRID).len(), 6);
        let g = slma_grid(&DEFAULT_WINDOW_GRID);
        assert_eq!(g.len(), 15);
        assert!(g.iter().all(|k| k.validate().is_ok()));
        assert_eq!(g[0], StrategyKind::Slma { short_window: 5, long_window: 10 });
    }

    #[test]
    fn kind_serde_shape() {
        let k: StrategyKind = serde_json::from_str(r#"{"kind":"slma","short_window":5,"long_window":20}"#).unwrap();
        assert_eq!(k, StrategyKind::Slma { short_window: 5, long_window: 20 });
        assert_eq!(serde_json::to_string(&StrategyKind::BuyAndHold).unwrap(), r#"{"kind":"buy_and_hold"}"#);
        assert!(RuleStrategy::new(StrategyKind::Agent).is_err());
        assert!(RuleStrategy::new(StrategyKind::Slma { short_window: 10, long_window: 10 }).is_err());
    }

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    #[test]
    fn tune_examples() {
        let opens: Vec<f64> = (0..60).map(|i| 100.0 + i as f64).collect();
        let series = series_from_opens(d("2024-01-01"), &opens);
        let split =
            DatasetSplit::new(AssetId::Btc, SplitKind::Validation, d("2024-02-01"), d("2024-02-20"), 131.0, 150.0)
                .unwrap();
        let feed = NewsFeed::empty(AssetId::Btc);
        let cfg = BacktestConfig::default();

        let single = tune(&[StrategyKind::Sma { window: 15 }], &series, &feed, &split, &cfg).unwrap();
        assert_eq!(single.chosen, StrategyKind::Sma { window: 15 });

        // Monotone rise: every window signals a full buy from day 0, so all tie.
        let all = tune(&sma_grid(&[10, 5, 20]), &series, &feed, &split, &cfg).unwrap();
        assert_eq!(all.chosen, StrategyKind::Sma { window: 5 });
        assert!(all.candidates.iter().all(|c| (c.total_return - all.chosen_return).abs() < 1e-12));

        assert!(matches!(tune(&[], &series, &feed, &split, &cfg), Err(TuningError::EmptyGrid)));
        let mut late = split.clone();
        late.end_date = d("2024-04-01");
        assert!(matches!(
            tune(&sma_grid(&[5]), &series, &feed, &late, &cfg),
            Err(TuningError::Backtest { source: EngineError::Coverage(_), .. })
        ));
    }

    proptest! {
        #[test]
        fn signals_are_ternary_and_causal(
            p in prop::collection::vec(1.0f64..200.0, 2..70),
            tail in prop::collection::vec(1.0f64..200.0, 1..10),
            at in 0usize..70,
        ) {
            let i = at % p.len();
            let base = ps(&p);
            let mut changed = p[..=i].to_vec();
            changed.extend(&tail);
            let changed = ps(&changed);
            let sigs = |x: &PriceSeries| [
                sma_signal(x, 5, i).value(),
                slma_signal(x, 3, 8, i).unwrap().value(),
                macd_signal(x, i).value(),
                bollinger_signal(x, i).value(),
            ];
            let a = sigs(&base);
            for v in a {
                prop_assert!(v == -1.0 || v == 0.0 || v == 1.0);
            }
            prop_assert_eq!(a, sigs(&changed));
        }
    }
}
