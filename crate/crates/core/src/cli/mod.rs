//! Command-line front end: `backtest`, `tune`, `ablate` and `report`.
//!
//! Settings come from an optional JSON config file, then command-line flags
//! override individual fields. Exit codes: 0 success, 1 domain error,
//! 2 usage or I/O error.

mod table;

use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{
    AblationConfig, AgentKind, AgentRunner, AgentStrategy, HttpBackend, HttpBackendConfig, ReflectionMemory,
    ScriptedBackend,
};
use crate::engine::{run_backtest, BacktestConfig, BacktestResult, Strategy};
use crate::market_data::{
    load_market_csv, load_news_json, reference_split, AssetId, DatasetSplit, MarketDataError, MarketSeries, NewsFeed,
    SplitKind,
};
use crate::strategies::{slma_grid, sma_grid, tune, RuleStrategy, StrategyKind, TuningResult, DEFAULT_WINDOW_GRID};

pub use table::{fmt2, ResultTable};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }

    fn domain(e: impl std::fmt::Display) -> Self {
        CliError::Domain(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BackendChoice {
    /// Replies from a JSON fixture; never touches the network.
    #[default]
    Scripted,
    /// OpenAI-compatible chat-completions endpoint.
    Http,
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub asset: AssetId,
    pub split: SplitKind,
    /// Overrides the built-in split table for `asset`/`split`.
    pub split_def: Option<DatasetSplit>,
    pub strategy: StrategyKind,
    pub fee_rate: f64,
    pub capital: f64,
    pub lookback: usize,
    pub news_days: u32,
    /// Holds `<asset>_market.csv` and `<asset>_news.json` unless overridden.
    pub data_dir: PathBuf,
    pub market_csv: Option<PathBuf>,
    pub news_json: Option<PathBuf>,
    pub backend: BackendChoice,
    pub fixture: Option<PathBuf>,
    pub http: HttpBackendConfig,
    pub ablate: AblationConfig,
    pub memory_capacity: usize,
    pub deterministic: bool,
    pub out: Option<PathBuf>,
    pub grid: Vec<usize>,
    /// `ablate` runs the full pipeline only.
    pub full_only: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            asset: AssetId::Btc,
            split: SplitKind::TestBull,
            split_def: None,
            strategy: StrategyKind::BuyAndHold,
            fee_rate: 0.0,
            capital: 1_000_000.0,
            lookback: 7,
            news_days: 1,
            data_dir: PathBuf::from("data"),
            market_csv: None,
            news_json: None,
            backend: BackendChoice::Scripted,
            fixture: None,
            http: HttpBackendConfig::default(),
            ablate: AblationConfig::full(),
            memory_capacity: ReflectionMemory::DEFAULT_CAPACITY,
            deterministic: false,
            out: None,
            grid: DEFAULT_WINDOW_GRID.to_vec(),
            full_only: false,
        }
    }
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl ExperimentConfig {
    /// Loads a JSON config; relative input paths resolve against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        if !path.exists() {
            return Err(CliError::FileNotFound(path.to_path_buf()));
        }
        let text =
            fs::read_to_string(path).map_err(|source| CliError::Io { context: path.display().to_string(), source })?;
        let mut cfg: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: invalid config: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        rebase(base, &mut cfg.data_dir);
        for p in [&mut cfg.market_csv, &mut cfg.news_json, &mut cfg.fixture].into_iter().flatten() {
            rebase(base, p);
        }
        Ok(cfg)
    }

    pub fn backtest_config(&self) -> BacktestConfig {
        BacktestConfig {
            capital: self.capital,
            fee_rate: self.fee_rate,
            lookback: self.lookback,
            news_days: self.news_days,
        }
    }

    fn asset_file(&self, suffix: &str) -> PathBuf {
        self.data_dir.join(format!("{}_{suffix}", self.asset.symbol().to_lowercase()))
    }

    pub fn market_path(&self) -> PathBuf {
        self.market_csv.clone().unwrap_or_else(|| self.asset_file("market.csv"))
    }

    pub fn news_path(&self) -> PathBuf {
        self.news_json.clone().unwrap_or_else(|| self.asset_file("news.json"))
    }

    pub fn split_for(&self, kind: SplitKind) -> DatasetSplit {
        match &self.split_def {
            Some(s) if s.kind == kind => s.clone(),
            _ => reference_split(self.asset, kind),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.deterministic && self.backend != BackendChoice::Scripted {
            return Err(CliError::Usage("--deterministic requires the scripted backend".into()));
        }
        if let Some(s) = &self.split_def {
            if s.asset_id != self.asset {
                return Err(CliError::Usage(format!("split_def is for {}, not {}", s.asset_id, self.asset)));
            }
        }
        self.strategy.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "tradelab", version, about = "Crypto backtesting lab: baselines, agent pipeline, metrics, ablations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one strategy over one split and write the result JSON.
    Backtest(RunArgs),
    /// Grid-search SMA or SLMA windows on the validation split.
    Tune(RunArgs),
    /// Run the agent pipeline with each agent removed, over bull and bear splits.
    Ablate(RunArgs),
    /// Render result JSON files as a markdown table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub asset: Option<AssetId>,
    /// validation, test_bull or test_bear.
    #[arg(long)]
    pub split: Option<SplitKind>,
    /// JSON file holding a custom split definition.
    #[arg(long)]
    pub split_file: Option<PathBuf>,
    /// buy_and_hold, sma, slma, macd, bollinger or agent.
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub short_window: Option<usize>,
    #[arg(long)]
    pub long_window: Option<usize>,
    #[arg(long)]
    pub fee_rate: Option<f64>,
    #[arg(long)]
    pub capital: Option<f64>,
    #[arg(long)]
    pub lookback: Option<usize>,
    #[arg(long)]
    pub news_days: Option<u32>,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long)]
    pub market: Option<PathBuf>,
    #[arg(long)]
    pub news: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendChoice>,
    /// Scripted backend reply fixture.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Environment variable holding the API key.
    #[arg(long)]
    pub api_key_env: Option<String>,
    /// Comma-separated agents to disable: reflection, fact_reasoning, subjectivity_reasoning, statistics.
    #[arg(long)]
    pub ablate: Option<String>,
    #[arg(long)]
    pub memory_capacity: Option<usize>,
    /// Forbid network backends and omit timestamps from outputs.
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated tuning windows.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<usize>>,
    /// For `ablate`: run the full pipeline only.
    #[arg(long)]
    pub full_only: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Backtest result JSON files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_strategy_name(name: &str, current: StrategyKind, args: &RunArgs) -> Result<StrategyKind, CliError> {
    let norm = name.trim().to_ascii_lowercase().replace('-', "_");
    let (cur_w, cur_s, cur_l) = match current {
        StrategyKind::Sma { window } => (Some(window), None, None),
        StrategyKind::Slma { short_window, long_window } => (None, Some(short_window), Some(long_window)),
        _ => (None, None, None),
    };
    let missing = |flag: &str| CliError::Usage(format!("strategy `{norm}` needs --{flag}"));
    Ok(match norm.as_str() {
        "buy_and_hold" | "bnh" => StrategyKind::BuyAndHold,
        "sma" => StrategyKind::Sma { window: args.window.or(cur_w).ok_or_else(|| missing("window"))? },
        "slma" => StrategyKind::Slma {
            short_window: args.short_window.or(cur_s).ok_or_else(|| missing("short-window"))?,
            long_window: args.long_window.or(cur_l).ok_or_else(|| missing("long-window"))?,
        },
        "macd" => StrategyKind::Macd,
        "bollinger" | "bollinger_bands" => StrategyKind::Bollinger,
        "agent" => StrategyKind::Agent,
        other => {
            return Err(CliError::Usage(format!(
                "unknown strategy `{other}` (expected buy_and_hold, sma, slma, macd, bollinger or agent)"
            )))
        }
    })
}

impl RunArgs {
    /// Config file (if any) with flag overrides applied.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.asset {
            cfg.asset = v;
        }
        if let Some(v) = self.split {
            cfg.split = v;
        }
        if let Some(p) = &self.split_file {
            if !p.exists() {
                return Err(CliError::FileNotFound(p.clone()));
            }
            let text =
                fs::read_to_string(p).map_err(|source| CliError::Io { context: p.display().to_string(), source })?;
            let split: DatasetSplit = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: invalid split: {e}", p.display())))?;
            split.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            cfg.split = split.kind;
            cfg.split_def = Some(split);
        }
        let strategy_name = self.strategy.clone().or_else(|| {
            (self.window.is_some() || self.short_window.is_some() || self.long_window.is_some())
                .then(|| serde_json::to_value(cfg.strategy).ok()?.get("kind")?.as_str().map(str::to_string))
                .flatten()
        });
        if let Some(name) = strategy_name {
            cfg.strategy = parse_strategy_name(&name, cfg.strategy, self)?;
        }
        macro_rules! set {
            ($($field:ident <- $flag:expr),* $(,)?) => {$(
                if let Some(v) = $flag.clone() { cfg.$field = v; }
            )*};
        }
        set!(
            fee_rate <- self.fee_rate,
            capital <- self.capital,
            lookback <- self.lookback,
            news_days <- self.news_days,
            data_dir <- self.data_dir,
            backend <- self.backend,
            memory_capacity <- self.memory_capacity,
            grid <- self.grid,
        );
        if self.market.is_some() {
            cfg.market_csv = self.market.clone();
        }
        if self.news.is_some() {
            cfg.news_json = self.news.clone();
        }
        if self.fixture.is_some() {
            cfg.fixture = self.fixture.clone();
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if let Some(v) = &self.endpoint {
            cfg.http.endpoint = v.clone();
        }
        if let Some(v) = &self.model {
            cfg.http.model = v.clone();
        }
        if let Some(v) = &self.api_key_env {
            cfg.http.api_key_env = v.clone();
        }
        if let Some(v) = &self.ablate {
            cfg.ablate = v.parse().map_err(|e| CliError::Usage(format!("--ablate: {e}")))?;
        }
        cfg.deterministic |= self.deterministic;
        cfg.full_only |= self.full_only;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_series(cfg: &ExperimentConfig) -> Result<MarketSeries, CliError> {
    let path = cfg.market_path();
    if !path.exists() {
        return Err(CliError::FileNotFound(path));
    }
    load_market_csv(&path, cfg.asset).map_err(|e| match e {
        MarketDataError::Io { path, source } => CliError::Io { context: path, source },
        other => CliError::Domain(format!("{}: {other}", path.display())),
    })
}

fn load_news(cfg: &ExperimentConfig) -> Result<NewsFeed, CliError> {
    let path = cfg.news_path();
    if !path.exists() {
        if cfg.news_json.is_some() {
            return Err(CliError::FileNotFound(path));
        }
        warn!("no news file at {}; agents will see no articles", path.display());
        return Ok(NewsFeed::empty(cfg.asset));
    }
    load_news_json(&path, cfg.asset).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

/// Fresh runner per run, so scripted ordinals restart at zero.
pub fn build_runner(cfg: &ExperimentConfig) -> Result<AgentRunner, CliError> {
    match cfg.backend {
        BackendChoice::Scripted => {
            let path =
                cfg.fixture.clone().ok_or_else(|| CliError::Usage("the scripted backend needs --fixture".into()))?;
            if !path.exists() {
                return Err(CliError::FileNotFound(path));
            }
            let backend = ScriptedBackend::from_file(&path).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(AgentRunner::new(Box::new(backend)))
        }
        BackendChoice::Http => {
            if cfg.deterministic {
                return Err(CliError::Usage("--deterministic requires the scripted backend".into()));
            }
            let backend = HttpBackend::from_env(cfg.http.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(AgentRunner::new(Box::new(backend)).with_temperature(cfg.http.temperature))
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { context: dir.display().to_string(), source })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io { context: path.display().to_string(), source })
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn stamp(result: &mut BacktestResult, cfg: &ExperimentConfig) {
    result.metadata.generated_at = (!cfg.deterministic).then(|| chrono::Utc::now().to_rfc3339());
}

fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

pub fn summary_line(result: &BacktestResult) -> String {
    let sharpe = result.metrics.sharpe_ratio.map(fmt2).unwrap_or_else(|| "n/a".into());
    format!(
        "{} {} {}: total return {}%, Sharpe {}",
        result.split.asset_id,
        result.split.kind,
        result.strategy,
        fmt2(result.metrics.total_return),
        sharpe
    )
}

/// Result of `backtest` plus the agent logs when the agent strategy ran.
#[derive(Debug, Clone)]
pub struct BacktestOutput {
    pub result: BacktestResult,
    pub transcript_jsonl: Option<String>,
    pub decisions_jsonl: Option<String>,
}

fn run_one(
    cfg: &ExperimentConfig,
    series: &MarketSeries,
    news: &NewsFeed,
    split: &DatasetSplit,
    ablation: &AblationConfig,
) -> Result<BacktestOutput, CliError> {
    let bt = cfg.backtest_config();
    if cfg.strategy == StrategyKind::Agent {
        let memory =
            ReflectionMemory::with_capacity(cfg.memory_capacity).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut agent = AgentStrategy::new(build_runner(cfg)?, ablation.clone()).with_memory(memory);
        let mut result = run_backtest(&mut agent, series, news, split, &bt).map_err(CliError::domain)?;
        stamp(&mut result, cfg);
        Ok(BacktestOutput {
            result,
            transcript_jsonl: Some(agent.runner().transcript_jsonl()),
            decisions_jsonl: Some(agent.decisions_jsonl()),
        })
    } else {
        let mut strategy = RuleStrategy::new(cfg.strategy).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut result =
            run_backtest(&mut strategy as &mut dyn Strategy, series, news, split, &bt).map_err(CliError::domain)?;
        stamp(&mut result, cfg);
        Ok(BacktestOutput { result, transcript_jsonl: None, decisions_jsonl: None })
    }
}

pub fn cmd_backtest(cfg: &ExperimentConfig) -> Result<BacktestOutput, CliError> {
    let series = load_series(cfg)?;
    let news = load_news(cfg)?;
    let split = cfg.split_for(cfg.split);
    let output = run_one(cfg, &series, &news, &split, &cfg.ablate)?;
    let out = cfg.out.clone().unwrap_or_else(|| {
        PathBuf::from("reports").join(format!(
            "{}_{}_{}.json",
            slug(cfg.asset.symbol()),
            split.kind,
            slug(&output.result.strategy)
        ))
    });
    write_file(&out, &(output.result.to_json() + "\n"))?;
    if let Some(t) = &output.transcript_jsonl {
        write_file(&sidecar(&out, "transcript.jsonl"), t)?;
    }
    if let Some(d) = &output.decisions_jsonl {
        write_file(&sidecar(&out, "decisions.jsonl"), d)?;
    }
    println!("{}", summary_line(&output.result));
    Ok(output)
}

pub fn cmd_tune(cfg: &ExperimentConfig) -> Result<TuningResult, CliError> {
    if cfg.grid.is_empty() {
        return Err(CliError::Domain("tuning grid is empty".into()));
    }
    let grid = match cfg.strategy {
        StrategyKind::Sma { .. } => sma_grid(&cfg.grid),
        StrategyKind::Slma { .. } => slma_grid(&cfg.grid),
        other => return Err(CliError::Usage(format!("`{other}` has no tunable windows; use sma or slma"))),
    };
    if grid.is_empty() {
        return Err(CliError::Domain("tuning grid has no valid candidates".into()));
    }
    let series = load_series(cfg)?;
    let news = load_news(cfg)?;
    let validation = cfg.split_for(SplitKind::Validation);
    let result = tune(&grid, &series, &news, &validation, &cfg.backtest_config()).map_err(CliError::domain)?;
    if let Some(out) = &cfg.out {
        let json = serde_json::to_string_pretty(&result).expect("tuning result serializes");
        write_file(out, &(json + "\n"))?;
    }
    println!("{} validation: chosen {} with total return {}%", cfg.asset, result.chosen, fmt2(result.chosen_return));
    Ok(result)
}

/// Ablation variants in table order: full, then each single-agent removal.
pub fn ablation_variants(cfg: &ExperimentConfig) -> Vec<AblationConfig> {
    let mut out = vec![AblationConfig::full()];
    if cfg.full_only {
        return out;
    }
    let chosen: Vec<AgentKind> = if cfg.ablate.is_full() {
        AgentKind::ABLATABLE.to_vec()
    } else {
        AgentKind::ABLATABLE.into_iter().filter(|k| !cfg.ablate.is_enabled(*k)).collect()
    };
    out.extend(chosen.into_iter().map(|k| AblationConfig::without(k).expect("ablatable agent")));
    out
}

#[derive(Debug, Clone)]
pub struct AblationOutput {
    pub table: ResultTable,
    pub results: Vec<(String, BacktestResult)>,
}

pub fn cmd_ablate(cfg: &ExperimentConfig) -> Result<AblationOutput, CliError> {
    if cfg.strategy != StrategyKind::Agent {
        return Err(CliError::Usage("ablate needs --strategy agent".into()));
    }
    let series = load_series(cfg)?;
    let news = load_news(cfg)?;
    let mut table = ResultTable::new();
    let mut results = Vec::new();
    for variant in ablation_variants(cfg) {
        let label = variant.label();
        for kind in [SplitKind::TestBull, SplitKind::TestBear] {
            let split = cfg.split_for(kind);
            let output = run_one(cfg, &series, &news, &split, &variant)?;
            table.insert(&label, kind, output.result.metrics.clone());
            results.push((label.clone(), output.result));
        }
    }
    let md = table.to_markdown();
    if let Some(out) = &cfg.out {
        write_file(out, &md)?;
        let json: Vec<serde_json::Value> =
            results.iter().map(|(label, r)| serde_json::json!({"variant": label, "result": r})).collect();
        let text = serde_json::to_string_pretty(&json).expect("results serialize");
        write_file(&sidecar(out, "results.json"), &(text + "\n"))?;
    }
    print!("{md}");
    Ok(AblationOutput { table, results })
}

/// Reads result files and lays them out as one row per strategy.
pub fn cmd_report(files: &[PathBuf], out: Option<&Path>) -> Result<String, CliError> {
    if files.is_empty() {
        return Err(CliError::Usage("report needs at least one result file".into()));
    }
    let mut results = Vec::new();
    for path in files {
        if !path.exists() {
            return Err(CliError::FileNotFound(path.clone()));
        }
        let text =
            fs::read_to_string(path).map_err(|source| CliError::Io { context: path.display().to_string(), source })?;
        let bad = |msg: String| CliError::Domain(format!("{}: {msg}", path.display()));
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| bad(format!("malformed report: {e}")))?;
        if value.get("metrics").is_none_or(|m| m.is_null()) {
            return Err(bad("report has no metrics".into()));
        }
        let result: BacktestResult =
            serde_json::from_value(value).map_err(|e| bad(format!("malformed report: {e}")))?;
        results.push(result);
    }
    let multi_asset = results.iter().any(|r| r.split.asset_id != results[0].split.asset_id);
    let mut table = ResultTable::new();
    for r in &results {
        let label = if multi_asset { format!("{} {}", r.split.asset_id, r.strategy) } else { r.strategy.clone() };
        table.insert(&label, r.split.kind, r.metrics.clone());
    }
    let md = table.to_markdown();
    if let Some(out) = out {
        write_file(out, &md)?;
    }
    Ok(md)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Backtest(args) => cmd_backtest(&args.resolve()?).map(drop),
        Command::Tune(mut args) => {
            // Only the strategy family matters here; windows come from the grid.
            args.window.get_or_insert(1);
            args.short_window.get_or_insert(1);
            args.long_window.get_or_insert(2);
            cmd_tune(&args.resolve()?).map(drop)
        }
        Command::Ablate(args) => cmd_ablate(&args.resolve()?).map(drop),
        Command::Report(args) => {
            let md = cmd_report(&args.files, args.out.as_deref())?;
            print!("{md}");
            Ok(())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
