// Grid search for SMA and SLMA windows on the validation period, then a
// test-period run with the chosen parameters.

use std::error::Error;

use tradelab::engine::{run_backtest, BacktestConfig};
use tradelab::market_data::synthetic::reference_fixture;
use tradelab::market_data::{reference_split, AssetId, SplitKind};
use tradelab::strategies::{slma_grid, sma_grid, tune, RuleStrategy, DEFAULT_WINDOW_GRID};

pub fn run_example() -> Result<Vec<String>, Box<dyn Error>> {
    let (series, news) = reference_fixture(AssetId::Eth);
    let config = BacktestConfig::default();
    let validation = reference_split(AssetId::Eth, SplitKind::Validation);
    let mut lines = Vec::new();
    for grid in [sma_grid(&DEFAULT_WINDOW_GRID), slma_grid(&DEFAULT_WINDOW_GRID)] {
        let tuned = tune(&grid, &series, &news, &validation, &config)?;
        for c in &tuned.candidates {
            lines.push(format!("  {:<12} {:>8.2}%", c.params.to_string(), c.total_return));
        }
        lines.push(format!("chosen {} ({:.2}% on validation)", tuned.chosen, tuned.chosen_return));
        for kind in [SplitKind::TestBull, SplitKind::TestBear] {
            let split = reference_split(AssetId::Eth, kind);
            let mut strategy = RuleStrategy::new(tuned.chosen)?;
            let result = run_backtest(&mut strategy, &series, &news, &split, &config)?;
            lines.push(format!("  {kind}: {:.2}%", result.metrics.total_return));
        }
    }
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
