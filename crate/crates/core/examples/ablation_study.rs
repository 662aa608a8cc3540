// Full pipeline versus each single-agent removal, on BTC bull and bear
// periods, through the same path the `ablate` subcommand uses.

use std::error::Error;
use std::fs;

use tradelab::cli::{cmd_ablate, ExperimentConfig};
use tradelab::market_data::synthetic::reference_fixture;
use tradelab::market_data::{write_market_csv, write_news_json, AssetId};
use tradelab::strategies::StrategyKind;

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let (series, news) = reference_fixture(AssetId::Btc);
    write_market_csv(&series, fs::File::create(dir.path().join("btc_market.csv"))?)?;
    fs::write(dir.path().join("btc_news.json"), write_news_json(&news))?;
    fs::write(
        dir.path().join("script.json"),
        r#"{"replies": ["Signals are mixed. 0.6 factual, 0.4 subjective. Action: 0.3", "Action: -0.2"], "cycle": true}"#,
    )?;

    let cfg = ExperimentConfig {
        asset: AssetId::Btc,
        strategy: StrategyKind::Agent,
        data_dir: dir.path().to_path_buf(),
        fixture: Some(dir.path().join("script.json")),
        deterministic: true,
        out: Some(dir.path().join("ablation.md")),
        ..ExperimentConfig::default()
    };
    let output = cmd_ablate(&cfg)?;
    Ok(output.table.to_markdown())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()?;
    Ok(())
}
