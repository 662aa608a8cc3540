//! Bounded record of recent trade decisions and their realized outcomes.

use std::collections::VecDeque;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MemoryError {
    #[error("memory entry for {got} does not follow last entry {last}")]
    OutOfOrder { last: NaiveDate, got: NaiveDate },
    #[error("memory capacity must be at least 1")]
    ZeroCapacity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryEntry {
    pub date: NaiveDate,
    /// SHA-256 of the trade prompt, truncated for display.
    pub prompt_digest: String,
    pub action: f64,
    pub fact_weight: f64,
    pub subjective_weight: f64,
    /// Market return from this day's open to the next day's open, percent.
    pub realized_return: f64,
    pub rationale: String,
}

const RATIONALE_CHARS: usize = 240;
const DIGEST_CHARS: usize = 12;

impl MemoryEntry {
    fn render(&self) -> String {
        let rationale: String = self.rationale.split_whitespace().collect::<Vec<_>>().join(" ");
        let mut excerpt: String = rationale.chars().take(RATIONALE_CHARS).collect();
        if rationale.chars().count() > RATIONALE_CHARS {
            excerpt.push_str("...");
        }
        let digest: String = self.prompt_digest.chars().take(DIGEST_CHARS).collect();
        format!(
            "Date: {}; Prompt digest: {digest}; Action: {:.1}; Weights: {:.2} factual, {:.2} subjective; Next-day market return: {:+.2}%; Rationale: {excerpt}",
            self.date, self.action, self.fact_weight, self.subjective_weight, self.realized_return
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionMemory {
    capacity: usize,
    entries: VecDeque<MemoryEntry>,
}

impl Default for ReflectionMemory {
    fn default() -> Self {
        Self { capacity: Self::DEFAULT_CAPACITY, entries: VecDeque::new() }
    }
}

impl ReflectionMemory {
    pub const DEFAULT_CAPACITY: usize = 3;

    pub fn with_capacity(capacity: usize) -> Result<Self, MemoryError> {
        if capacity == 0 {
            return Err(MemoryError::ZeroCapacity);
        }
        Ok(Self { capacity, entries: VecDeque::with_capacity(capacity) })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &MemoryEntry> {
        self.entries.iter()
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.entries.back().map(|e| e.date)
    }

    /// Appends a completed day, evicting the oldest entry beyond capacity.
    pub fn update(&mut self, entry: MemoryEntry) -> Result<(), MemoryError> {
        if let Some(last) = self.last_date() {
            if entry.date <= last {
                return Err(MemoryError::OutOfOrder { last, got: entry.date });
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(entry);
        Ok(())
    }

    /// One line per entry, oldest first.
    pub fn render(&self) -> String {
        self.entries.iter().map(MemoryEntry::render).collect::<Vec<_>>().join("\n")
    }
}
