// Every rule-based baseline on the BTC bull and bear test periods.

use std::error::Error;

use tradelab::cli::ResultTable;
use tradelab::engine::{run_backtest, BacktestConfig};
use tradelab::market_data::synthetic::reference_fixture;
use tradelab::market_data::{reference_split, AssetId, SplitKind};
use tradelab::strategies::{RuleStrategy, StrategyKind};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let (series, news) = reference_fixture(AssetId::Btc);
    let config = BacktestConfig { fee_rate: 0.001, ..BacktestConfig::default() };
    let kinds = [
        StrategyKind::BuyAndHold,
        StrategyKind::Sma { window: 10 },
        StrategyKind::Slma { short_window: 5, long_window: 20 },
        StrategyKind::Macd,
        StrategyKind::Bollinger,
    ];
    let mut table = ResultTable::new();
    for kind in [SplitKind::TestBull, SplitKind::TestBear] {
        let split = reference_split(AssetId::Btc, kind);
        for params in kinds {
            let mut strategy = RuleStrategy::new(params)?;
            let result = run_backtest(&mut strategy, &series, &news, &split, &config)?;
            table.insert(&result.strategy, kind, result.metrics);
        }
    }
    Ok(table.to_markdown())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
