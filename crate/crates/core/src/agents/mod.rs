//! Multi-agent LLM trading pipeline.
//!
//! Three first-layer agents (statistics, fact, subjectivity) summarize raw
//! inputs, two reasoning agents turn those summaries into trading arguments,
//! a reflection agent reviews recent outcomes, and the trade agent emits the
//! final action. Every backend call goes through an [`AgentRunner`], which
//! applies the retry policy and records the transcript.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod backend;
pub mod memory;
pub mod parse;
pub mod pipeline;
pub mod prompt;
mod runner;

pub use backend::{
    BackendError, ChatMessage, ChatRequest, HttpBackend, HttpBackendConfig, LlmBackend, ScriptFixture, ScriptedBackend,
};
pub use memory::{MemoryEntry, MemoryError, ReflectionMemory};
pub use parse::{parse_trade_decision, ParseError, TradeDecision};
pub use pipeline::{
    agent_pipeline_step, run_fact_agent, run_fact_reasoning_agent, run_reflection_agent, run_statistics_agent,
    run_subjectivity_agent, run_subjectivity_reasoning_agent, run_trade_agent, AgentStrategy, DayContext, DayOutcome,
    DecisionLogEntry,
};
pub use prompt::{render_prompt, PromptTemplate, RenderedPrompt, TemplateError};
pub use runner::{AgentRunner, TranscriptEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Statistics,
    Fact,
    Subjectivity,
    FactReasoning,
    SubjectivityReasoning,
    Trade,
    Reflection,
}

impl AgentKind {
    pub const ALL: [AgentKind; 7] = [
        AgentKind::Statistics,
        AgentKind::Fact,
        AgentKind::Subjectivity,
        AgentKind::FactReasoning,
        AgentKind::SubjectivityReasoning,
        AgentKind::Trade,
        AgentKind::Reflection,
    ];

    /// Agents that may be switched off in an ablation run.
    pub const ABLATABLE: [AgentKind; 4] =
        [AgentKind::Reflection, AgentKind::FactReasoning, AgentKind::SubjectivityReasoning, AgentKind::Statistics];

    pub fn as_str(self) -> &'static str {
        match self {
            AgentKind::Statistics => "statistics",
            AgentKind::Fact => "fact",
            AgentKind::Subjectivity => "subjectivity",
            AgentKind::FactReasoning => "fact_reasoning",
            AgentKind::SubjectivityReasoning => "subjectivity_reasoning",
            AgentKind::Trade => "trade",
            AgentKind::Reflection => "reflection",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            AgentKind::Statistics => "Statistics Agent",
            AgentKind::Fact => "Fact Agent",
            AgentKind::Subjectivity => "Subjectivity Agent",
            AgentKind::FactReasoning => "Fact Reasoning Agent",
            AgentKind::SubjectivityReasoning => "Subjectivity Reasoning Agent",
            AgentKind::Trade => "Trade Agent",
            AgentKind::Reflection => "Reflection Agent",
        }
    }

    /// Section label used when this agent's report is embedded in the trade prompt.
    pub fn section_label(self) -> String {
        format!("{} REPORT", self.display_name().to_uppercase())
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("unknown agent `{0}`")]
pub struct UnknownAgent(pub String);

impl FromStr for AgentKind {
    type Err = UnknownAgent;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        let norm = norm.strip_suffix("_agent").unwrap_or(&norm);
        AgentKind::ALL.into_iter().find(|k| k.as_str() == norm).ok_or_else(|| UnknownAgent(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentReport {
    pub agent: AgentKind,
    pub date: NaiveDate,
    pub text: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum AblationError {
    #[error("unknown agent `{name}`; valid names: {valid}", valid = valid_ablation_names())]
    Unknown { name: String },
    #[error("agent `{agent}` cannot be disabled; valid names: {valid}", agent = .0, valid = valid_ablation_names())]
    NotAblatable(AgentKind),
    #[error("disabling both reasoning agents leaves the trade agent without input")]
    NoReasoning,
}

fn valid_ablation_names() -> String {
    AgentKind::ABLATABLE.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(", ")
}

/// Set of agents switched off for a run. The trade agent is always on.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<AgentKind>", into = "Vec<AgentKind>")]
pub struct AblationConfig {
    disabled: BTreeSet<AgentKind>,
}

impl AblationConfig {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn new(disabled: impl IntoIterator<Item = AgentKind>) -> Result<Self, AblationError> {
        let disabled: BTreeSet<AgentKind> = disabled.into_iter().collect();
        if let Some(k) = disabled.iter().find(|k| !AgentKind::ABLATABLE.contains(k)) {
            return Err(AblationError::NotAblatable(*k));
        }
        if disabled.contains(&AgentKind::FactReasoning) && disabled.contains(&AgentKind::SubjectivityReasoning) {
            return Err(AblationError::NoReasoning);
        }
        Ok(Self { disabled })
    }

    pub fn without(agent: AgentKind) -> Result<Self, AblationError> {
        Self::new([agent])
    }

    pub fn is_enabled(&self, agent: AgentKind) -> bool {
        !self.disabled.contains(&agent)
    }

    pub fn disabled(&self) -> impl Iterator<Item = AgentKind> + '_ {
        self.disabled.iter().copied()
    }

    pub fn is_full(&self) -> bool {
        self.disabled.is_empty()
    }

    /// Row label for result tables: "Full" or "w/o <agent>".
    pub fn label(&self) -> String {
        if self.disabled.is_empty() {
            return "Full".to_string();
        }
        let names: Vec<&str> = self
            .disabled
            .iter()
            .map(|k| match k {
                AgentKind::SubjectivityReasoning => "Sub. Reasoning Agent",
                other => other.display_name(),
            })
            .collect();
        format!("w/o {}", names.join(", "))
    }
}

impl FromStr for AblationConfig {
    type Err = AblationError;

    /// Comma-separated agent names; empty or "none" means the full pipeline.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s.eq_ignore_ascii_case("none") || s.eq_ignore_ascii_case("full") {
            return Ok(Self::full());
        }
        let kinds = s
            .split(',')
            .map(|name| name.parse::<AgentKind>().map_err(|_| AblationError::Unknown { name: name.trim().to_string() }))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(kinds)
    }
}

impl TryFrom<Vec<AgentKind>> for AblationConfig {
    type Error = AblationError;

    fn try_from(v: Vec<AgentKind>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<AblationConfig> for Vec<AgentKind> {
    fn from(c: AblationConfig) -> Self {
        c.disabled.into_iter().collect()
    }
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("{agent} agent: backend failed: {source}")]
    Backend {
        agent: AgentKind,
        #[source]
        source: BackendError,
    },
    #[error("{agent} agent: empty report")]
    EmptyReport { agent: AgentKind },
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("{agent} agent: {message}")]
    Precondition { agent: AgentKind, message: String },
    #[error(transparent)]
    Memory(#[from] MemoryError),
    #[error(transparent)]
    Ablation(#[from] AblationError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_round_trips() {
        for k in AgentKind::ALL {
            assert_eq!(k.as_str().parse::<AgentKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.as_str()));
        }
        assert_eq!("Fact-Reasoning".parse::<AgentKind>().unwrap(), AgentKind::FactReasoning);
        assert_eq!("reflection_agent".parse::<AgentKind>().unwrap(), AgentKind::Reflection);
        assert_eq!(AgentKind::SubjectivityReasoning.section_label(), "SUBJECTIVITY REASONING AGENT REPORT");
    }

    #[test]
    fn ablation_validation() {
        assert!(AblationConfig::full().is_full());
        assert_eq!(AblationConfig::without(AgentKind::Trade), Err(AblationError::NotAblatable(AgentKind::Trade)));
        assert_eq!("fact_reasoning,subjectivity_reasoning".parse::<AblationConfig>(), Err(AblationError::NoReasoning));
        let err = "sentiment".parse::<AblationConfig>().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sentiment"));
        for k in AgentKind::ABLATABLE {
            assert!(msg.contains(k.as_str()), "{msg}");
        }
        let c: AblationConfig = "statistics".parse().unwrap();
        assert!(!c.is_enabled(AgentKind::Statistics) && c.is_enabled(AgentKind::Fact));
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"["statistics"]"#);
        assert!(serde_json::from_str::<AblationConfig>(r#"["trade"]"#).is_err());
    }

    #[test]
    fn ablation_labels() {
        let labels: Vec<String> = std::iter::once(AblationConfig::full())
            .chain(AgentKind::ABLATABLE.map(|k| AblationConfig::without(k).unwrap()))
            .map(|c| c.label())
            .collect();
        assert_eq!(
            labels,
            [
                "Full",
                "w/o Reflection Agent",
                "w/o Fact Reasoning Agent",
                "w/o Sub. Reasoning Agent",
                "w/o Statistics Agent"
            ]
        );
    }
}
