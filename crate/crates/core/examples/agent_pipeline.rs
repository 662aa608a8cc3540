// The multi-agent pipeline on ten ETH trading days with a scripted backend.
//
// Swap `ScriptedBackend` for `HttpBackend::from_env(HttpBackendConfig::default())`
// to run against a live chat-completions endpoint (needs `OPENAI_API_KEY`).

use std::collections::BTreeMap;
use std::error::Error;

use chrono::Duration;
use tradelab::agents::{AblationConfig, AgentKind, AgentRunner, AgentStrategy, ScriptFixture, ScriptedBackend};
use tradelab::engine::{run_backtest, BacktestConfig};
use tradelab::market_data::synthetic::reference_fixture;
use tradelab::market_data::{reference_split, AssetId, DatasetSplit, SplitKind};

pub fn scripted_backend() -> ScriptedBackend {
    let by_agent = BTreeMap::from([
        (AgentKind::Statistics, vec!["Opens climbed for most of the week on rising active addresses.".to_string()]),
        (AgentKind::Fact, vec!["Exchange reserves fell and an upgrade date was confirmed.".to_string()]),
        (AgentKind::Subjectivity, vec!["Commentary is upbeat, with some warnings of froth.".to_string()]),
        (AgentKind::FactReasoning, vec!["Supply and usage data support a measured long position.".to_string()]),
        (AgentKind::SubjectivityReasoning, vec!["Optimism may carry momentum but raises pullback risk.".to_string()]),
        (
            AgentKind::Reflection,
            vec!["Keep roughly 60% weighting on factual information and 40% on subjectivity.".to_string()],
        ),
        (
            AgentKind::Trade,
            vec![
                "Factual vs Subjective Weighting: 0.7 factual, 0.3 subjective.\nAction: 0.5".to_string(),
                "Weights 60% factual, 40% subjective. Action: -0.3".to_string(),
                "Action: 0.1".to_string(),
            ],
        ),
    ]);
    ScriptedBackend::new(ScriptFixture { by_agent, ..Default::default() })
}

pub fn run_example() -> Result<Vec<String>, Box<dyn Error>> {
    let (series, news) = reference_fixture(AssetId::Eth);
    let bull = reference_split(AssetId::Eth, SplitKind::TestBull);
    let end = bull.start_date + Duration::days(10);
    let end_price = series.get(end).ok_or("fixture covers the split")?.open_price;
    let split =
        DatasetSplit::new(AssetId::Eth, SplitKind::TestBull, bull.start_date, end, bull.start_price, end_price)?;

    let runner = AgentRunner::new(Box::new(scripted_backend()));
    let mut agent = AgentStrategy::new(runner, AblationConfig::full());
    let result = run_backtest(&mut agent, &series, &news, &split, &BacktestConfig::default())?;

    let mut lines = Vec::new();
    for d in agent.decisions() {
        lines.push(format!(
            "{}  action {:+.1}  weights {:.2}/{:.2}  calls {}",
            d.date,
            d.action.value(),
            d.fact_weight,
            d.subjective_weight,
            d.calls
        ));
    }
    lines.push(format!("memory holds {} entries:", agent.memory().len()));
    lines.extend(agent.memory().render().lines().map(|l| format!("  {l}")));
    let last_trade = agent.runner().transcript().iter().rev().find(|e| e.agent == AgentKind::Trade);
    if let Some(entry) = last_trade {
        lines.push("last trade prompt:".into());
        lines.extend(entry.prompt.lines().map(|l| format!("  | {l}")));
    }
    lines.push(format!("total return {:.2}%, {} backend calls", result.metrics.total_return, agent.runner().calls()));
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
