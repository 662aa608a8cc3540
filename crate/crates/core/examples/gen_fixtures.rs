// Writes the bundled offline dataset: market CSVs and news JSON for BTC, ETH
// and SOL, a scripted agent fixture, and sample experiment configs.
//
// `cargo run --example gen_fixtures` regenerates `data/` and `configs/` in
// the crate directory. Output is byte-for-byte reproducible.

use std::collections::BTreeMap;
use std::error::Error;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use serde_json::json;
use tradelab::agents::{AgentKind, ScriptFixture};
use tradelab::market_data::synthetic::reference_fixture;
use tradelab::market_data::{write_market_csv, write_news_json, AssetId};

fn agent_script() -> ScriptFixture {
    let lists: [(AgentKind, &[&str]); 7] = [
        (AgentKind::Statistics, &[
            "Open prices rose steadily over the window while unique addresses held near 550k, pointing to a mild upward statistical trend.",
            "Prices slipped for three sessions and transferred value fell, which suggests short-term weakness.",
            "The window is range-bound: open prices oscillate within two percent and on-chain activity is flat.",
        ]),
        (AgentKind::Fact, &[
            "Regulatory filings progressed on schedule and exchange outflows increased, both constructive for price.",
            "A protocol upgrade date was confirmed; no negative regulatory events were reported.",
            "No material factual developments today; flows were in line with the monthly average.",
        ]),
        (AgentKind::Subjectivity, &[
            "Commentators are upbeat and several analysts call for a retest of recent highs.",
            "A prominent trader warned the rally looks overextended, and sentiment turned cautious.",
        ]),
        (AgentKind::FactReasoning, &[
            "Rising on-chain usage and regulatory progress support accumulating a moderate position.",
            "Facts are neutral to slightly negative; trimming exposure is reasonable.",
        ]),
        (AgentKind::SubjectivityReasoning, &[
            "Optimistic commentary can extend momentum in the short run, though it raises pullback risk.",
            "Cautious sentiment argues for a risk-managed approach until opinions stabilise.",
        ]),
        (AgentKind::Reflection, &[
            "To maximize trading performance, maintain a balanced approach with approximately 60% weighting on factual information and 40% on subjectivity.",
            "Recent buys into negative next-day returns were driven by sentiment; lean on facts with a 70% weighting on factual information.",
        ]),
        (AgentKind::Trade, &[
            "1. Reasoning: facts and statistics agree on an uptrend.\n2. Factual vs Subjective Weighting: 0.7 factual, 0.3 subjective.\n3. Risk Management: scale in.\n4. Action: 0.6",
            "Action: -0.4...Slight sell to reduce exposure while acknowledging underlying network strength and current bearish sentiment.",
            "Weighting 0.6 factual, 0.4 subjective.\n**Action:** 0.2",
            "1. Reasoning: mixed signals.\n2. Factual vs Subjective Weighting: 0.5 factual, 0.5 subjective.\n4. Action: 0.0",
            "Weights: 80% factual, 20% subjective. Action: -0.7",
            "Factual: 0.65, Subjective: 0.35\nAction: 0.3",
            "Reflection guidance favours facts (0.6 factual, 0.4 subjective). Action: 1.0",
        ]),
    ];
    let by_agent: BTreeMap<AgentKind, Vec<String>> =
        lists.iter().map(|(k, replies)| (*k, replies.iter().map(|r| r.to_string()).collect())).collect();
    ScriptFixture { by_agent, ..Default::default() }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Box<dyn Error>> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// Writes everything under `root` and returns the paths written.
pub fn generate(root: &Path) -> Result<Vec<PathBuf>, Box<dyn Error>> {
    let data = root.join("data");
    let configs = root.join("configs");
    fs::create_dir_all(&data)?;
    fs::create_dir_all(&configs)?;
    let mut written = Vec::new();

    for asset in [AssetId::Btc, AssetId::Eth, AssetId::Sol] {
        let (series, news) = reference_fixture(asset);
        let stem = asset.symbol().to_lowercase();
        let csv = data.join(format!("{stem}_market.csv"));
        write_market_csv(&series, File::create(&csv)?)?;
        let news_path = data.join(format!("{stem}_news.json"));
        fs::write(&news_path, write_news_json(&news))?;
        written.extend([csv, news_path]);
    }

    let script = data.join("agent_script.json");
    fs::write(&script, serde_json::to_string_pretty(&agent_script())? + "\n")?;
    written.push(script);

    let samples = [
        (
            "btc_bull_buy_and_hold.json",
            json!({
                "asset": "BTC", "split": "test_bull", "strategy": {"kind": "buy_and_hold"},
                "data_dir": "../data", "deterministic": true, "out": "reports/btc_bull_buy_and_hold.json"
            }),
        ),
        (
            "eth_tune_sma.json",
            json!({
                "asset": "ETH", "strategy": {"kind": "sma", "window": 5}, "grid": [5, 10, 15, 20, 25, 30],
                "data_dir": "../data", "out": "reports/eth_tune_sma.json"
            }),
        ),
        (
            "eth_agent_scripted.json",
            json!({
                "asset": "ETH", "split": "test_bull", "strategy": {"kind": "agent"},
                "backend": "scripted", "fixture": "../data/agent_script.json",
                "data_dir": "../data", "deterministic": true, "out": "reports/eth_bull_agent.json"
            }),
        ),
        (
            "eth_agent_http.json",
            json!({
                "asset": "ETH", "split": "test_bear", "strategy": {"kind": "agent"}, "backend": "http",
                "http": {"endpoint": "https://api.openai.com/v1/chat/completions", "model": "gpt-4o", "api_key_env": "OPENAI_API_KEY"},
                "data_dir": "../data", "out": "reports/eth_bear_agent_live.json"
            }),
        ),
    ];
    for (name, value) in samples {
        let path = configs.join(name);
        write_json(&path, &value)?;
        written.push(path);
    }
    Ok(written)
}

/// Generates into a scratch directory and checks the files load back.
pub fn run_example() -> Result<usize, Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let written = generate(dir.path())?;
    for asset in [AssetId::Btc, AssetId::Eth, AssetId::Sol] {
        let stem = asset.symbol().to_lowercase();
        let series = tradelab::market_data::load_market_csv(dir.path().join(format!("data/{stem}_market.csv")), asset)?;
        let news = tradelab::market_data::load_news_json(dir.path().join(format!("data/{stem}_news.json")), asset)?;
        assert_eq!(series, reference_fixture(asset).0);
        assert!(!news.is_empty());
    }
    tradelab::agents::ScriptedBackend::from_file(dir.path().join("data/agent_script.json"))?;
    Ok(written.len())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    for path in generate(root)? {
        println!("wrote {}", path.strip_prefix(root).unwrap_or(&path).display());
    }
    Ok(())
}
