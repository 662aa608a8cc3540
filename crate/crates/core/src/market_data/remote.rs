//! Best-effort news download from a GNews-style HTTP endpoint.

use std::time::Duration;

use chrono::NaiveDate;
use serde_json::Value;
use thiserror::Error;

use super::news::article_from_value;
use super::{AssetId, NewsError, NewsFeed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Option<Self> {
        (start <= end).then_some(Self { start, end })
    }
}

#[derive(Debug, Clone)]
pub struct RemoteNewsConfig {
    /// Case-insensitive publisher allowlist; empty admits every source.
    pub source_allowlist: Vec<String>,
    pub timeout: Duration,
}

impl Default for RemoteNewsConfig {
    fn default() -> Self {
        Self {
            source_allowlist: ["Bloomberg", "Yahoo Finance", "crypto.news"].map(String::from).to_vec(),
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Error)]
pub enum RemoteNewsError {
    #[error("network failure (retriable): {0}")]
    Network(String),
    #[error("rate limited by news endpoint (retry after {retry_after_secs:?} s)")]
    RateLimited { retry_after_secs: Option<u64> },
    #[error("news endpoint returned HTTP {0}")]
    Status(u16),
    #[error(transparent)]
    Malformed(#[from] NewsError),
}

impl RemoteNewsError {
    pub fn is_retriable(&self) -> bool {
        matches!(self, RemoteNewsError::Network(_) | RemoteNewsError::RateLimited { .. })
    }
}

/// `GET {endpoint}?keyword=..&from=..&to=..&lang=en`, expecting a JSON array in
/// the news-file article schema. Articles tagged with a non-English `lang`,
/// from sources outside the allowlist, or outside the range are dropped.
pub fn fetch_news_remote(
    asset_id: AssetId,
    range: DateRange,
    endpoint: &str,
    config: &RemoteNewsConfig,
) -> Result<NewsFeed, RemoteNewsError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(config.timeout)
        .build()
        .map_err(|e| RemoteNewsError::Network(e.to_string()))?;
    let url = reqwest::Url::parse_with_params(
        endpoint,
        [
            ("keyword", asset_id.name().to_string()),
            ("from", range.start.to_string()),
            ("to", range.end.to_string()),
            ("lang", "en".to_string()),
        ],
    )
    .map_err(|e| RemoteNewsError::Network(format!("bad endpoint `{endpoint}`: {e}")))?;
    let response = client.get(url).send().map_err(|e| RemoteNewsError::Network(e.to_string()))?;

    let status = response.status();
    if status.as_u16() == 429 {
        let retry_after_secs = response
            .headers()
            .get(reqwest::header::RETRY_AFTER)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse().ok());
        return Err(RemoteNewsError::RateLimited { retry_after_secs });
    }
    if !status.is_success() {
        return Err(RemoteNewsError::Status(status.as_u16()));
    }
    let body = response.text().map_err(|e| RemoteNewsError::Network(e.to_string()))?;
    if body.trim().is_empty() {
        return Ok(NewsFeed::with_range(asset_id, range.start, range.end, Vec::new())?);
    }

    let value: Value = serde_json::from_str(&body).map_err(NewsError::from)?;
    let Value::Array(records) = value else {
        return Err(NewsError::NotAnArray.into());
    };
    let mut articles = Vec::new();
    for (index, record) in records.iter().enumerate() {
        let lang = record.get("lang").or_else(|| record.get("language")).and_then(Value::as_str);
        if lang.is_some_and(|l| !l.eq_ignore_ascii_case("en")) {
            continue;
        }
        let article = article_from_value(index, record)?;
        let allowed = config.source_allowlist.is_empty()
            || config.source_allowlist.iter().any(|s| s.eq_ignore_ascii_case(article.source.trim()));
        if allowed && article.date >= range.start && article.date <= range.end {
            articles.push(article);
        }
    }
    Ok(NewsFeed::with_range(asset_id, range.start, range.end, articles)?)
}
