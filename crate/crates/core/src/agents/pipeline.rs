//! Per-agent calls, the daily pipeline step and the engine adapter.
//!
//! Agents run sequentially in a fixed order (statistics, fact, subjectivity,
//! fact reasoning, subjectivity reasoning, reflection, trade), so scripted
//! replies keyed by request ordinal line up with the same agent every run.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use log::warn;
use serde::{Deserialize, Serialize};

use super::memory::{MemoryEntry, ReflectionMemory};
use super::parse::{parse_trade_decision, TradeDecision};
use super::prompt::{PromptTemplate, RenderedPrompt};
use super::runner::AgentRunner;
use super::{AblationConfig, AgentError, AgentKind, AgentReport};
use crate::engine::{Observation, Strategy, StrategyError, TradeAction};
use crate::market_data::{AssetId, MarketDaySnapshot, NewsArticle};

/// Reply attempts the trade agent gets before falling back to hold.
pub const TRADE_PARSE_ATTEMPTS: usize = 3;

pub const COLD_START_REFLECTION: &str = "No trading history is available yet. Keep a balanced approach with a 50% weighting on factual information and 50% on subjectivity, and size positions cautiously until results accumulate.";

const NO_ARTICLES: &str = "No news articles are available for this day.";

fn asset_token(asset: AssetId) -> String {
    asset.symbol().to_lowercase()
}

fn render(
    agent: AgentKind,
    asset: AssetId,
    extra: impl IntoIterator<Item = (&'static str, String)>,
) -> Result<RenderedPrompt, AgentError> {
    let mut ctx: BTreeMap<&str, String> = extra.into_iter().collect();
    ctx.insert("asset", asset_token(asset));
    Ok(PromptTemplate::for_agent(agent).render(&ctx)?)
}

fn report(runner: &mut AgentRunner, date: NaiveDate, prompt: &RenderedPrompt) -> Result<AgentReport, AgentError> {
    let text = runner.complete(date, prompt)?;
    Ok(AgentReport { agent: prompt.agent, date, text })
}

fn fmt_day(d: &MarketDaySnapshot) -> String {
    format!(
        "Date: {}, Open price: {}, volume: {}, average gas fee: {}, unique addresses: {}, total value transferred: {}",
        d.date, d.open_price, d.volume, d.avg_gas_fee, d.unique_addresses, d.total_value_transferred
    )
}

/// Completed days in full, then today's open only; today's close is not yet known.
pub fn render_statistics_window(history: &[MarketDaySnapshot], today: Option<(NaiveDate, f64)>) -> String {
    let mut parts: Vec<String> = history.iter().map(fmt_day).collect();
    if let Some((date, open)) = today {
        parts.push(format!("Date: {date}, Open price: {open}"));
    }
    format!("{{{}}}", parts.join("; "))
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\\', "\\\\").replace('\'', "\\'"))
}

pub fn render_news(news: &[NewsArticle]) -> String {
    if news.is_empty() {
        return NO_ARTICLES.to_string();
    }
    news.iter()
        .map(|a| {
            format!(
                "{{'date': {}, 'title': {}, 'body': {}, 'source': {}}}",
                quote(&a.date.to_string()),
                quote(&a.title),
                quote(&a.body),
                quote(&a.source)
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn run_statistics_agent(
    runner: &mut AgentRunner,
    asset: AssetId,
    date: NaiveDate,
    history: &[MarketDaySnapshot],
    today_open: Option<f64>,
) -> Result<AgentReport, AgentError> {
    if history.is_empty() && today_open.is_none() {
        return Err(AgentError::Precondition { agent: AgentKind::Statistics, message: "empty data window".into() });
    }
    let window = render_statistics_window(history, today_open.map(|p| (date, p)));
    let prompt = render(AgentKind::Statistics, asset, [("window", window)])?;
    report(runner, date, &prompt)
}

pub fn run_fact_agent(
    runner: &mut AgentRunner,
    asset: AssetId,
    date: NaiveDate,
    news: &[NewsArticle],
) -> Result<AgentReport, AgentError> {
    let prompt = render(AgentKind::Fact, asset, [("news", render_news(news))])?;
    report(runner, date, &prompt)
}

pub fn run_subjectivity_agent(
    runner: &mut AgentRunner,
    asset: AssetId,
    date: NaiveDate,
    news: &[NewsArticle],
) -> Result<AgentReport, AgentError> {
    let prompt = render(AgentKind::Subjectivity, asset, [("news", render_news(news))])?;
    report(runner, date, &prompt)
}

fn expect_kind(report: Option<&AgentReport>, want: AgentKind, by: AgentKind) -> Result<&AgentReport, AgentError> {
    match report {
        Some(r) if r.agent == want => Ok(r),
        Some(r) => {
            Err(AgentError::Precondition { agent: by, message: format!("expected {want} report, got {}", r.agent) })
        }
        None => Err(AgentError::Precondition { agent: by, message: format!("missing {want} report") }),
    }
}

/// `stats_report` is `None` when the statistics agent is ablated.
pub fn run_fact_reasoning_agent(
    runner: &mut AgentRunner,
    asset: AssetId,
    date: NaiveDate,
    fact_report: Option<&AgentReport>,
    stats_report: Option<&AgentReport>,
) -> Result<AgentReport, AgentError> {
    let fact = expect_kind(fact_report, AgentKind::Fact, AgentKind::FactReasoning)?;
    let mut analyses = format!("Factual News Analysis: {}", fact.text);
    if let Some(stats) = stats_report {
        let stats = expect_kind(Some(stats), AgentKind::Statistics, AgentKind::FactReasoning)?;
        analyses.push_str(&format!("\nStatistics Analysis: {}", stats.text));
    }
    let prompt = render(AgentKind::FactReasoning, asset, [("analyses", analyses)])?;
    report(runner, date, &prompt)
}

pub fn run_subjectivity_reasoning_agent(
    runner: &mut AgentRunner,
    asset: AssetId,
    date: NaiveDate,
    subj_report: Option<&AgentReport>,
) -> Result<AgentReport, AgentError> {
    let subj = expect_kind(subj_report, AgentKind::Subjectivity, AgentKind::SubjectivityReasoning)?;
    let analyses = format!("Subjective News Analysis: {}", subj.text);
    let prompt = render(AgentKind::SubjectivityReasoning, asset, [("analyses", analyses)])?;
    report(runner, date, &prompt)
}

/// Cold start (empty memory) returns a built-in neutral report without a backend call.
pub fn run_reflection_agent(
    runner: &mut AgentRunner,
    asset: AssetId,
    date: NaiveDate,
    memory: &ReflectionMemory,
) -> Result<AgentReport, AgentError> {
    if memory.is_empty() {
        return Ok(AgentReport { agent: AgentKind::Reflection, date, text: COLD_START_REFLECTION.to_string() });
    }
    let prompt = render(AgentKind::Reflection, asset, [("memory", memory.render())])?;
    report(runner, date, &prompt)
}

/// Order of report sections in the trade prompt.
const TRADE_SECTIONS: [AgentKind; 6] = [
    AgentKind::Statistics,
    AgentKind::Fact,
    AgentKind::Subjectivity,
    AgentKind::FactReasoning,
    AgentKind::SubjectivityReasoning,
    AgentKind::Reflection,
];

pub fn trade_prompt(asset: AssetId, reports: &[AgentReport]) -> Result<RenderedPrompt, AgentError> {
    let sections: Vec<String> = TRADE_SECTIONS
        .iter()
        .filter_map(|kind| reports.iter().find(|r| r.agent == *kind))
        .map(|r| format!("{}: \"{}\"", r.agent.section_label(), r.text))
        .collect();
    render(AgentKind::Trade, asset, [("reports", sections.join("\n"))])
}

/// Returns the decision and the digest of the trade prompt. After
/// [`TRADE_PARSE_ATTEMPTS`] unparseable replies the decision is a hold.
pub fn run_trade_agent(
    runner: &mut AgentRunner,
    asset: AssetId,
    date: NaiveDate,
    reports: &[AgentReport],
) -> Result<(TradeDecision, String), AgentError> {
    let reasoning = [AgentKind::FactReasoning, AgentKind::SubjectivityReasoning];
    if !reports.iter().any(|r| reasoning.contains(&r.agent)) {
        return Err(AgentError::Precondition { agent: AgentKind::Trade, message: "no reasoning report".into() });
    }
    let prompt = trade_prompt(asset, reports)?;
    let digest = prompt.digest();
    let mut last_reply = String::new();
    for attempt in 1..=TRADE_PARSE_ATTEMPTS {
        let reply = runner.complete(date, &prompt)?;
        match parse_trade_decision(&reply) {
            Ok(decision) => return Ok((decision, digest)),
            Err(e) => warn!("trade agent on {date}: {e} (attempt {attempt}/{TRADE_PARSE_ATTEMPTS})"),
        }
        last_reply = reply;
    }
    warn!("trade agent on {date}: no parseable reply; holding");
    Ok((TradeDecision::fallback(last_reply), digest))
}

/// Inputs for one trading day.
#[derive(Debug, Clone, Copy)]
pub struct DayContext<'a> {
    pub asset: AssetId,
    pub date: NaiveDate,
    /// Completed days before `date`, oldest first.
    pub history: &'a [MarketDaySnapshot],
    pub today_open: f64,
    pub news: &'a [NewsArticle],
    pub memory: &'a ReflectionMemory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayOutcome {
    pub decision: TradeDecision,
    pub reports: Vec<AgentReport>,
    pub trade_prompt_digest: String,
    /// Backend calls made for this day, retries included.
    pub calls: usize,
}

/// Runs the enabled agents in dependency order and returns the trade decision.
pub fn agent_pipeline_step(
    runner: &mut AgentRunner,
    ctx: &DayContext<'_>,
    ablation: &AblationConfig,
) -> Result<DayOutcome, AgentError> {
    let calls_before = runner.calls();
    let (asset, date) = (ctx.asset, ctx.date);
    let on = |k| ablation.is_enabled(k);

    let stats = on(AgentKind::Statistics)
        .then(|| run_statistics_agent(runner, asset, date, ctx.history, Some(ctx.today_open)))
        .transpose()?;
    let fact = run_fact_agent(runner, asset, date, ctx.news)?;
    let subj = run_subjectivity_agent(runner, asset, date, ctx.news)?;
    let fact_reasoning = on(AgentKind::FactReasoning)
        .then(|| run_fact_reasoning_agent(runner, asset, date, Some(&fact), stats.as_ref()))
        .transpose()?;
    let subj_reasoning = on(AgentKind::SubjectivityReasoning)
        .then(|| run_subjectivity_reasoning_agent(runner, asset, date, Some(&subj)))
        .transpose()?;
    let reflection =
        on(AgentKind::Reflection).then(|| run_reflection_agent(runner, asset, date, ctx.memory)).transpose()?;

    let reports: Vec<AgentReport> =
        [stats, Some(fact), Some(subj), fact_reasoning, subj_reasoning, reflection].into_iter().flatten().collect();
    let (decision, trade_prompt_digest) = run_trade_agent(runner, asset, date, &reports)?;
    Ok(DayOutcome { decision, reports, trade_prompt_digest, calls: runner.calls() - calls_before })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionLogEntry {
    pub date: NaiveDate,
    pub action: TradeAction,
    pub fact_weight: f64,
    pub subjective_weight: f64,
    pub calls: usize,
    pub trade_prompt_digest: String,
}

struct Pending {
    date: NaiveDate,
    open: f64,
    digest: String,
    decision: TradeDecision,
}

/// Engine strategy backed by the agent pipeline.
pub struct AgentStrategy {
    runner: AgentRunner,
    ablation: AblationConfig,
    memory: ReflectionMemory,
    pending: Option<Pending>,
    decisions: Vec<DecisionLogEntry>,
}

impl AgentStrategy {
    pub fn new(runner: AgentRunner, ablation: AblationConfig) -> Self {
        Self { runner, ablation, memory: ReflectionMemory::default(), pending: None, decisions: Vec::new() }
    }

    pub fn with_memory(mut self, memory: ReflectionMemory) -> Self {
        self.memory = memory;
        self
    }

    pub fn runner(&self) -> &AgentRunner {
        &self.runner
    }

    pub fn memory(&self) -> &ReflectionMemory {
        &self.memory
    }

    pub fn decisions(&self) -> &[DecisionLogEntry] {
        &self.decisions
    }

    pub fn decisions_jsonl(&self) -> String {
        self.decisions.iter().map(|d| serde_json::to_string(d).expect("decision serializes") + "\n").collect()
    }

    /// Folds yesterday's decision into memory once today's open reveals its outcome.
    fn settle(&mut self, today: NaiveDate, today_open: f64) -> Result<(), AgentError> {
        let Some(p) = self.pending.take() else { return Ok(()) };
        if p.date >= today {
            return Ok(());
        }
        self.memory.update(MemoryEntry {
            date: p.date,
            prompt_digest: p.digest,
            action: p.decision.action.value(),
            fact_weight: p.decision.fact_weight,
            subjective_weight: p.decision.subjective_weight,
            realized_return: (today_open / p.open - 1.0) * 100.0,
            rationale: p.decision.rationale,
        })?;
        Ok(())
    }
}

impl Strategy for AgentStrategy {
    fn name(&self) -> String {
        if self.ablation.is_full() {
            "Agent".to_string()
        } else {
            format!("Agent ({})", self.ablation.label())
        }
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Result<TradeAction, StrategyError> {
        self.settle(obs.date, obs.open_price)?;
        let ctx = DayContext {
            asset: obs.asset,
            date: obs.date,
            history: obs.window(),
            today_open: obs.open_price,
            news: &obs.news,
            memory: &self.memory,
        };
        let outcome = agent_pipeline_step(&mut self.runner, &ctx, &self.ablation)?;
        let action = outcome.decision.action;
        self.decisions.push(DecisionLogEntry {
            date: obs.date,
            action,
            fact_weight: outcome.decision.fact_weight,
            subjective_weight: outcome.decision.subjective_weight,
            calls: outcome.calls,
            trade_prompt_digest: outcome.trade_prompt_digest.clone(),
        });
        self.pending = Some(Pending {
            date: obs.date,
            open: obs.open_price,
            digest: outcome.trade_prompt_digest,
            decision: outcome.decision,
        });
        Ok(action)
    }
}
