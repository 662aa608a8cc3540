// Performance metrics by hand, then a markdown table built from saved reports.

use std::error::Error;
use std::fs;

use tradelab::cli::cmd_report;
use tradelab::engine::{run_backtest, BacktestConfig};
use tradelab::market_data::synthetic::reference_fixture;
use tradelab::market_data::{reference_split, AssetId, SplitKind};
use tradelab::metrics::{daily_returns, evaluate, mean, sample_std};
use tradelab::strategies::{RuleStrategy, StrategyKind};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let worths = [1_000_000.0, 1_020_000.0, 1_005_000.0, 1_040_000.0, 1_050_000.0];
    let returns = daily_returns(&worths)?;
    let report = evaluate(worths[0], &worths)?;
    // `daily_returns` is fractional; the report is in percent.
    let mut out = format!(
        "daily returns {:?}\nmean {:.4}% std {:.4}% sharpe {:.4} total {:.2}%\n\n",
        returns.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>(),
        mean(&returns) * 100.0,
        sample_std(&returns).unwrap_or(f64::NAN) * 100.0,
        report.sharpe_ratio.unwrap_or(f64::NAN),
        report.total_return,
    );

    let dir = tempfile::tempdir()?;
    let mut files = Vec::new();
    for asset in [AssetId::Btc, AssetId::Sol] {
        let (series, news) = reference_fixture(asset);
        for kind in [SplitKind::TestBull, SplitKind::TestBear] {
            let split = reference_split(asset, kind);
            for params in [StrategyKind::BuyAndHold, StrategyKind::Macd] {
                let mut strategy = RuleStrategy::new(params)?;
                let result = run_backtest(&mut strategy, &series, &news, &split, &BacktestConfig::default())?;
                let path = dir.path().join(format!("{asset}_{kind}_{}.json", files.len()));
                fs::write(&path, result.to_json())?;
                files.push(path);
            }
        }
    }
    out.push_str(&cmd_report(&files, None)?);
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
