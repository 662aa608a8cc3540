//! Compiles each example into this test binary and runs it.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(gen_fixtures);
example!(load_market_data);
example!(indicators_tour);
example!(baseline_backtest);
example!(tune_windows);
example!(agent_pipeline);
example!(ablation_study);
example!(metrics_report);

#[test]
fn gen_fixtures_round_trips() {
    assert_eq!(gen_fixtures::run_example().unwrap(), 11);
}

#[test]
fn load_market_data_lists_every_split() {
    let lines = load_market_data::run_example().unwrap();
    assert_eq!(lines.iter().filter(|l| l.contains("trend")).count(), 9);
    assert!(lines.iter().any(|l| l.starts_with("BTC test_bull") && l.ends_with("+79.63%")));
}

#[test]
fn indicators_tour_shows_signals() {
    let lines = indicators_tour::run_example().unwrap();
    assert_eq!(lines.len(), 16);
}

#[test]
fn baseline_backtest_has_five_rows() {
    let md = baseline_backtest::run_example().unwrap();
    assert_eq!(md.lines().count(), 7);
    assert!(md.contains("| Bollinger Bands |"));
}

#[test]
fn tune_windows_picks_from_both_grids() {
    let lines = tune_windows::run_example().unwrap();
    assert_eq!(lines.iter().filter(|l| l.starts_with("chosen")).count(), 2);
}

#[test]
fn agent_pipeline_runs_ten_days() {
    let lines = agent_pipeline::run_example().unwrap();
    assert!(lines[0].ends_with("calls 6"));
    assert!(lines[1..10].iter().all(|l| l.ends_with("calls 7")));
    assert!(lines.last().unwrap().ends_with("69 backend calls"));
}

#[test]
fn ablation_study_table() {
    let md = ablation_study::run_example().unwrap();
    assert!(
        md.contains("| Full |") && md.contains("| w/o Reflection Agent |") && md.contains("| w/o Statistics Agent |")
    );
}

#[test]
fn metrics_report_table() {
    let out = metrics_report::run_example().unwrap();
    assert!(out.contains("| BTC Buy and Hold | 79.63 |"));
}
