//! Markdown result tables: one row per strategy, one column group per regime.

use std::collections::BTreeMap;

use crate::market_data::SplitKind;
use crate::metrics::MetricsReport;

/// Two decimals, with negative zero printed as zero.
pub fn fmt2(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn group_title(kind: SplitKind) -> &'static str {
    match kind {
        SplitKind::TestBull => "Bull",
        SplitKind::TestBear => "Bear",
        SplitKind::Validation => "Validation",
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    rows: Vec<(String, BTreeMap<SplitKind, MetricsReport>)>,
}

impl ResultTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds metrics under `label`; rows keep first-insertion order.
    pub fn insert(&mut self, label: &str, kind: SplitKind, metrics: MetricsReport) {
        match self.rows.iter_mut().find(|(l, _)| l == label) {
            Some((_, cells)) => {
                cells.insert(kind, metrics);
            }
            None => self.rows.push((label.to_string(), BTreeMap::from([(kind, metrics)]))),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|(l, _)| l.as_str())
    }

    /// Bull and bear groups always; validation only when some row has it.
    fn groups(&self) -> Vec<SplitKind> {
        let mut groups = vec![SplitKind::TestBull, SplitKind::TestBear];
        if self.rows.iter().any(|(_, c)| c.contains_key(&SplitKind::Validation)) {
            groups.push(SplitKind::Validation);
        }
        groups
    }

    pub fn to_markdown(&self) -> String {
        let groups = self.groups();
        let mut header = vec!["Strategy".to_string()];
        for g in &groups {
            let t = group_title(*g);
            header.push(format!("{t} Total Return %"));
            header.push(format!("{t} Daily Return % (mean±std)"));
            header.push(format!("{t} Sharpe"));
        }
        let mut out = format!("| {} |\n", header.join(" | "));
        out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
        for (label, cells) in &self.rows {
            let mut line = vec![label.clone()];
            for g in &groups {
                match cells.get(g) {
                    Some(m) => {
                        line.push(fmt2(m.total_return));
                        let std = m.daily_return_std.map(fmt2).unwrap_or_else(|| "-".into());
                        line.push(format!("{}±{}", fmt2(m.daily_return_mean), std));
                        line.push(m.sharpe_ratio.map(fmt2).unwrap_or_else(|| "-".into()));
                    }
                    None => line.extend(["-".to_string(), "-".to_string(), "-".to_string()]),
                }
            }
            out.push_str(&format!("| {} |\n", line.join(" | ")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(total: f64, sharpe: Option<f64>) -> MetricsReport {
        MetricsReport {
            total_return: total,
            daily_return_mean: 1.18,
            daily_return_std: Some(2.21),
            sharpe_ratio: sharpe,
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(fmt2(0.534), "0.53");
        assert_eq!(fmt2(-0.004), "0.00");
        assert_eq!(fmt2(79.625_1), "79.63");
    }

    #[test]
    fn bull_and_bear_share_a_row() {
        let mut t = ResultTable::new();
        t.insert("Buy and Hold", SplitKind::TestBull, m(79.63, Some(0.534)));
        t.insert("Buy and Hold", SplitKind::TestBear, m(-20.0, None));
        assert_eq!(t.len(), 1);
        let md = t.to_markdown();
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("| Strategy | Bull Total Return % |"));
        assert_eq!(lines[2], "| Buy and Hold | 79.63 | 1.18±2.21 | 0.53 | -20.00 | 1.18±2.21 | - |");
    }
}
