// Technical indicators and the rule-based signals built on them.

use std::error::Error;

use tradelab::indicators::{bollinger, ema, macd, sma, PriceSeries, BOLLINGER_K, BOLLINGER_WINDOW};
use tradelab::strategies::{bollinger_signal, macd_signal, slma_signal, sma_signal};

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into())
}

pub fn run_example() -> Result<Vec<String>, Box<dyn Error>> {
    // A rally, a sharp pullback, then recovery.
    let mut opens: Vec<f64> = (0..30).map(|i| 100.0 + 1.5 * i as f64).collect();
    opens.extend([140.0, 128.0, 119.0, 113.0, 110.0, 116.0, 124.0, 133.0, 141.0, 150.0]);
    let prices = PriceSeries::new(opens)?;
    let n = prices.len();

    let sma5 = sma(&prices, 5)?;
    let ema12 = ema(&prices, 12)?;
    let m = macd(&prices)?;
    let bands = bollinger(&prices, BOLLINGER_WINDOW, BOLLINGER_K)?;

    let mut lines = vec!["day   open   sma5  ema12   macd signal  lower  upper | sma slma macd boll".to_string()];
    for i in 25..n {
        let slma = slma_signal(&prices, 5, 20, i)?;
        lines.push(format!(
            "{i:>3} {:>6.2} {:>6} {:>6.2} {:>6.2} {:>6.2} {:>6} {:>6} | {:>3} {:>4} {:>4} {:>4}",
            prices.values()[i],
            fmt_opt(sma5[i]),
            ema12[i],
            m.macd_line[i],
            m.signal_line[i],
            fmt_opt(bands.lower[i]),
            fmt_opt(bands.upper[i]),
            sma_signal(&prices, 5, i).value(),
            slma.value(),
            macd_signal(&prices, i).value(),
            bollinger_signal(&prices, i).value(),
        ));
    }
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
