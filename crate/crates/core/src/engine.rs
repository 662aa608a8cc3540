//! Daily backtest loop: portfolio state, fee-aware execution, and net-worth accounting.
//!
//! Each trading day the strategy sees only completed days plus the day's open,
//! its action executes at the open, and net worth is sampled at the open right
//! after execution. The final valuation uses the split's end price.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market_data::{AssetId, DatasetSplit, MarketDaySnapshot, MarketSeries, NewsArticle, NewsFeed};
use crate::metrics::{self, MetricsError, MetricsReport};

pub type StrategyError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("fee rate must lie in [0, 1), got {0}")]
    FeeRate(f64),
    #[error("trade action {0} is outside [-1, 1]")]
    ActionRange(f64),
    #[error("split has an empty trading range ({start}..{end})")]
    EmptyRange { start: NaiveDate, end: NaiveDate },
    #[error("market data gap: {0} is missing from the series")]
    Coverage(NaiveDate),
    #[error("series is for {series} but split is for {split}")]
    AssetMismatch { series: AssetId, split: AssetId },
    #[error("strategy failed on {date}: {source}")]
    Strategy {
        date: NaiveDate,
        #[source]
        source: StrategyError,
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Fraction of cash to spend (positive) or of holdings to sell (negative).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TradeAction(f64);

impl TradeAction {
    pub const HOLD: TradeAction = TradeAction(0.0);
    pub const FULL_BUY: TradeAction = TradeAction(1.0);
    pub const FULL_SELL: TradeAction = TradeAction(-1.0);

    pub fn new(value: f64) -> Result<Self, EngineError> {
        if (-1.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(EngineError::ActionRange(value))
        }
    }

    /// Clamps into `[-1, 1]`; NaN becomes a hold.
    pub fn clamped(value: f64) -> Self {
        if value.is_nan() {
            Self::HOLD
        } else {
            Self(value.clamp(-1.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TradeAction {
    type Error = EngineError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<TradeAction> for f64 {
    fn from(a: TradeAction) -> f64 {
        a.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortfolioState {
    pub cash: f64,
    pub units: f64,
    pub fee_rate: f64,
}

/// Half the capital in cash, half converted to the asset at `start_price`, fee-free.
pub fn init_portfolio(capital: f64, start_price: f64, fee_rate: f64) -> Result<PortfolioState, EngineError> {
    if !(capital > 0.0) {
        return Err(EngineError::NonPositive { what: "capital", value: capital });
    }
    if !(start_price > 0.0) {
        return Err(EngineError::NonPositive { what: "start price", value: start_price });
    }
    if !(0.0..1.0).contains(&fee_rate) {
        return Err(EngineError::FeeRate(fee_rate));
    }
    let half = capital / 2.0;
    Ok(PortfolioState { cash: half, units: half / start_price, fee_rate })
}

/// Buys spend `a·cash` and receive units net of fee; sells give up `|a|·units`
/// and receive cash net of fee.
pub fn execute_action(state: PortfolioState, action: TradeAction, price: f64) -> Result<PortfolioState, EngineError> {
    if !(price > 0.0) {
        return Err(EngineError::NonPositive { what: "price", value: price });
    }
    let a = action.value();
    let keep = 1.0 - state.fee_rate;
    let next = if a > 0.0 {
        let spend = a * state.cash;
        PortfolioState { cash: (state.cash - spend).max(0.0), units: state.units + spend * keep / price, ..state }
    } else if a < 0.0 {
        let sold = -a * state.units;
        PortfolioState { cash: state.cash + sold * price * keep, units: (state.units - sold).max(0.0), ..state }
    } else {
        state
    };
    Ok(next)
}

pub fn net_worth(state: &PortfolioState, price: f64) -> f64 {
    state.cash + state.units * price
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyRecord {
    pub date: NaiveDate,
    pub action: TradeAction,
    pub execution_price: f64,
    pub cash: f64,
    pub units: f64,
    pub net_worth: f64,
    /// Fractional change from the previous day's net worth; `None` on the first day.
    pub daily_return: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestConfig {
    pub capital: f64,
    pub fee_rate: f64,
    /// Completed days of statistics exposed to windowed consumers.
    pub lookback: usize,
    /// Days of news visible on a trading day, ending with that day.
    pub news_days: u32,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self { capital: 1_000_000.0, fee_rate: 0.0, lookback: 7, news_days: 1 }
    }
}

/// Everything a strategy may look at on one trading day.
#[derive(Debug, Clone)]
pub struct Observation<'a> {
    pub asset: AssetId,
    pub date: NaiveDate,
    /// Position within the split's trading days, starting at 0.
    pub day_index: usize,
    pub open_price: f64,
    /// Every completed day before `date`, oldest first.
    pub history: &'a [MarketDaySnapshot],
    pub lookback: usize,
    pub news: Vec<NewsArticle>,
    pub portfolio: PortfolioState,
}

impl Observation<'_> {
    /// The last `lookback` completed days.
    pub fn window(&self) -> &[MarketDaySnapshot] {
        let start = self.history.len().saturating_sub(self.lookback);
        &self.history[start..]
    }

    /// Open prices of all completed days followed by today's open.
    pub fn open_prices(&self) -> Vec<f64> {
        self.history.iter().map(|d| d.open_price).chain(std::iter::once(self.open_price)).collect()
    }
}

/// A causal daily decision rule.
pub trait Strategy {
    fn name(&self) -> String;

    fn decide(&mut self, observation: &Observation<'_>) -> Result<TradeAction, StrategyError>;
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    /// Wall-clock creation time; the only non-deterministic field in a report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestResult {
    pub strategy: String,
    pub split: DatasetSplit,
    pub config: BacktestConfig,
    pub records: Vec<DailyRecord>,
    pub final_net_worth: f64,
    pub metrics: MetricsReport,
    #[serde(default)]
    pub metadata: ReportMetadata,
}

impl BacktestResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn run_backtest(
    strategy: &mut dyn Strategy,
    series: &MarketSeries,
    news: &NewsFeed,
    split: &DatasetSplit,
    config: &BacktestConfig,
) -> Result<BacktestResult, EngineError> {
    if split.start_date >= split.end_date {
        return Err(EngineError::EmptyRange { start: split.start_date, end: split.end_date });
    }
    if series.asset_id != split.asset_id {
        return Err(EngineError::AssetMismatch { series: series.asset_id, split: split.asset_id });
    }
    let first = series.index_of(split.start_date).ok_or(EngineError::Coverage(split.start_date))?;
    let last_trading = split.end_date.pred_opt().expect("end date after start date");
    series.index_of(last_trading).ok_or(EngineError::Coverage(last_trading))?;

    let mut state = init_portfolio(config.capital, split.start_price, config.fee_rate)?;
    let days = series.days();
    let mut records: Vec<DailyRecord> = Vec::with_capacity(split.num_trading_days());
    for (day_index, date) in split.trading_days().enumerate() {
        let idx = first + day_index;
        let today = &days[idx];
        debug_assert_eq!(today.date, date);
        let observation = Observation {
            asset: series.asset_id,
            date,
            day_index,
            open_price: today.open_price,
            history: &days[..idx],
            lookback: config.lookback,
            news: news.visible(date, config.news_days),
            portfolio: state,
        };
        let action = strategy.decide(&observation).map_err(|source| EngineError::Strategy { date, source })?;
        state = execute_action(state, action, today.open_price)?;
        let worth = net_worth(&state, today.open_price);
        let daily_return = records.last().map(|prev| (worth - prev.net_worth) / prev.net_worth);
        records.push(DailyRecord {
            date,
            action,
            execution_price: today.open_price,
            cash: state.cash,
            units: state.units,
            net_worth: worth,
            daily_return,
        });
    }

    let final_net_worth = net_worth(&state, split.end_price);
    let path: Vec<f64> = records.iter().map(|r| r.net_worth).chain(std::iter::once(final_net_worth)).collect();
    let metrics = metrics::evaluate(config.capital, &path)?;
    Ok(BacktestResult {
        strategy: strategy.name(),
        split: split.clone(),
        config: config.clone(),
        records,
        final_net_worth,
        metrics,
        metadata: ReportMetadata { generated_at: None, tool_version: env!("CARGO_PKG_VERSION").to_string() },
    })
}
