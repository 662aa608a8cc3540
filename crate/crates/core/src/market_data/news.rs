use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::AssetId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewsArticle {
    pub date: NaiveDate,
    pub title: String,
    pub body: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
}

#[derive(Debug, Error)]
pub enum NewsError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid news json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("news json must be an array of article objects")]
    NotAnArray,
    #[error("record {index}: missing field: {field}")]
    MissingField { index: usize, field: &'static str },
    #[error("record {index}: unparseable date `{value}`")]
    BadDate { index: usize, value: String },
    #[error("record {index}: title must be non-empty")]
    EmptyTitle { index: usize },
    #[error("article dated {date} lies outside the feed range {start}..={end}")]
    OutOfRange { date: NaiveDate, start: NaiveDate, end: NaiveDate },
}

/// Dated articles for one asset, grouped by day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewsFeed {
    pub asset_id: AssetId,
    /// Declared inclusive coverage; `None` for an empty feed without a declared range.
    range: Option<(NaiveDate, NaiveDate)>,
    by_date: BTreeMap<NaiveDate, Vec<NewsArticle>>,
}

impl NewsFeed {
    pub fn empty(asset_id: AssetId) -> Self {
        Self { asset_id, range: None, by_date: BTreeMap::new() }
    }

    /// Builds a feed whose declared range is the span of the articles' dates.
    pub fn from_articles(asset_id: AssetId, articles: Vec<NewsArticle>) -> Self {
        let range = match (articles.iter().map(|a| a.date).min(), articles.iter().map(|a| a.date).max()) {
            (Some(lo), Some(hi)) => Some((lo, hi)),
            _ => None,
        };
        let mut feed = Self { asset_id, range, by_date: BTreeMap::new() };
        for a in articles {
            feed.by_date.entry(a.date).or_default().push(a);
        }
        feed
    }

    /// Builds a feed with an explicit range; every article must fall inside it.
    pub fn with_range(
        asset_id: AssetId,
        start: NaiveDate,
        end: NaiveDate,
        articles: Vec<NewsArticle>,
    ) -> Result<Self, NewsError> {
        let mut by_date: BTreeMap<NaiveDate, Vec<NewsArticle>> = BTreeMap::new();
        for a in articles {
            if a.date < start || a.date > end {
                return Err(NewsError::OutOfRange { date: a.date, start, end });
            }
            by_date.entry(a.date).or_default().push(a);
        }
        Ok(Self { asset_id, range: Some((start, end)), by_date })
    }

    pub fn range(&self) -> Option<(NaiveDate, NaiveDate)> {
        self.range
    }

    pub fn len(&self) -> usize {
        self.by_date.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_date.is_empty()
    }

    pub fn on(&self, date: NaiveDate) -> &[NewsArticle] {
        self.by_date.get(&date).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Articles dated in `(as_of - days, as_of]`, oldest first.
    pub fn visible(&self, as_of: NaiveDate, days: u32) -> Vec<NewsArticle> {
        let Some(from) = as_of.checked_sub_days(chrono::Days::new(days.saturating_sub(1) as u64)) else {
            return Vec::new();
        };
        self.by_date.range(from..=as_of).flat_map(|(_, v)| v.iter().cloned()).collect()
    }

    pub fn articles(&self) -> impl Iterator<Item = &NewsArticle> {
        self.by_date.values().flatten()
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.by_date.keys().copied()
    }
}

pub fn load_news_json(path: impl AsRef<Path>, asset_id: AssetId) -> Result<NewsFeed, NewsError> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|source| NewsError::Io { path: path.display().to_string(), source })?;
    parse_news_json(&text, asset_id)
}

pub fn parse_news_json(text: &str, asset_id: AssetId) -> Result<NewsFeed, NewsError> {
    let value: Value = serde_json::from_str(text)?;
    let Value::Array(records) = value else {
        return Err(NewsError::NotAnArray);
    };
    let articles = records
        .iter()
        .enumerate()
        .map(|(index, record)| article_from_value(index, record))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NewsFeed::from_articles(asset_id, articles))
}

pub(super) fn article_from_value(index: usize, record: &Value) -> Result<NewsArticle, NewsError> {
    let field = |name: &'static str| -> Result<String, NewsError> {
        record
            .get(name)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or(NewsError::MissingField { index, field: name })
    };
    let raw_date = field("date")?;
    let title = field("title")?;
    let body = field("body")?;
    let source = field("source")?;
    let url = record.get("url").and_then(Value::as_str).map(str::to_string);
    // Accept full timestamps by keeping the leading calendar day.
    let date = NaiveDate::parse_from_str(raw_date.get(..10).unwrap_or(&raw_date), "%Y-%m-%d")
        .map_err(|_| NewsError::BadDate { index, value: raw_date.clone() })?;
    if title.trim().is_empty() {
        return Err(NewsError::EmptyTitle { index });
    }
    Ok(NewsArticle { date, title, body, source, url })
}

pub fn write_news_json(feed: &NewsFeed) -> String {
    let articles: Vec<&NewsArticle> = feed.articles().collect();
    serde_json::to_string_pretty(&articles).expect("articles serialize")
}
