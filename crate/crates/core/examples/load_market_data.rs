// Loading market statistics and news, and inspecting the reference splits.

use std::error::Error;

use tradelab::market_data::synthetic::reference_fixture;
use tradelab::market_data::{
    parse_market_csv, parse_news_json, reference_splits, slice_window, split_trend, write_market_csv, write_news_json,
    AssetId,
};

const CSV: &str = "\
date,open,close,volume,avg_gas_fee,unique_addresses,total_value_transferred
2024-03-01,61200.5,62300.0,31000000000,3.1,802000,12500000000
2024-03-02,62300.0,61950.2,28000000000,2.9,788000,11800000000
2024-03-03,61950.2,63100.9,30500000000,3.4,815000,13100000000
";

const NEWS: &str = r#"[
  {"date": "2024-03-02", "title": "Spot ETF inflows extend", "body": "Net inflows rose for a fifth day.", "source": "Bloomberg"},
  {"date": "2024-03-03T14:05:00Z", "title": "Analysts eye new highs", "body": "Several desks lifted targets.", "source": "Yahoo Finance"}
]"#;

pub fn run_example() -> Result<Vec<String>, Box<dyn Error>> {
    let mut lines = Vec::new();

    let series = parse_market_csv(CSV, AssetId::Btc)?;
    lines.push(format!("parsed {} BTC days, opens {:?}", series.len(), series.open_prices()));
    let news = parse_news_json(NEWS, AssetId::Btc)?;
    let mar3 = series.last_date().expect("non-empty");
    for article in news.visible(mar3, 1) {
        lines.push(format!("{mar3}: {} ({})", article.title, article.source));
    }

    let window = slice_window(&series, mar3, 7)?;
    lines.push(format!("7-day window ending {mar3}: {} days available", window.len()));

    for split in reference_splits() {
        lines.push(format!(
            "{} {:<10} {} -> {}  {:>10.2} -> {:>10.2}  trend {:+.2}%",
            split.asset_id,
            split.kind,
            split.start_date,
            split.end_date,
            split.start_price,
            split.end_price,
            split_trend(&split)
        ));
    }

    // The bundled synthetic dataset round-trips through the file formats.
    let (eth, eth_news) = reference_fixture(AssetId::Eth);
    let mut csv = Vec::new();
    write_market_csv(&eth, &mut csv)?;
    assert_eq!(parse_market_csv(std::str::from_utf8(&csv)?, AssetId::Eth)?, eth);
    assert_eq!(parse_news_json(&write_news_json(&eth_news), AssetId::Eth)?, eth_news);
    lines.push(format!("ETH fixture: {} days, {} articles", eth.len(), eth_news.len()));
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
