//! Moving-average family indicators over daily prices.
//!
//! Windowed outputs are `None` until the window fills, so a window of `w`
//! yields its first value at index `w - 1`. EMAs are seeded with the first
//! price and are defined everywhere.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IndicatorError {
    #[error("window must be at least {min}, got {got}")]
    Window { min: usize, got: usize },
    #[error("price series is empty")]
    Empty,
    #[error("prices must be positive and finite (index {0})")]
    BadPrice(usize),
}

/// Daily prices aligned by index to a market series.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries(Vec<f64>);

impl PriceSeries {
    pub fn new(values: Vec<f64>) -> Result<Self, IndicatorError> {
        if let Some(i) = values.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(IndicatorError::BadPrice(i));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The first `len` prices.
    pub fn prefix(&self, len: usize) -> PriceSeries {
        PriceSeries(self.0[..len.min(self.0.len())].to_vec())
    }
}

impl AsRef<[f64]> for PriceSeries {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub type IndicatorSeries = Vec<Option<f64>>;

pub fn sma(prices: &PriceSeries, window: usize) -> Result<IndicatorSeries, IndicatorError> {
    if window == 0 {
        return Err(IndicatorError::Window { min: 1, got: 0 });
    }
    let p = prices.values();
    let mut out = vec![None; p.len()];
    if p.len() < window {
        return Ok(out);
    }
    for i in window - 1..p.len() {
        let sum: f64 = p[i + 1 - window..=i].iter().sum();
        out[i] = Some(sum / window as f64);
    }
    Ok(out)
}

/// EMA_t = a * p_t + (1 - a) * EMA_{t-1}, a = 2 / (period + 1), EMA_0 = p_0.
pub fn ema(prices: &PriceSeries, period: usize) -> Result<Vec<f64>, IndicatorError> {
    if period == 0 {
        return Err(IndicatorError::Window { min: 1, got: 0 });
    }
    ema_raw(prices.values(), period)
}

fn ema_raw(values: &[f64], period: usize) -> Result<Vec<f64>, IndicatorError> {
    let (&first, rest) = values.split_first().ok_or(IndicatorError::Empty)?;
    let alpha = 2.0 / (period as f64 + 1.0);
    let mut out = Vec::with_capacity(values.len());
    out.push(first);
    let mut prev = first;
    for &v in rest {
        prev = alpha * v + (1.0 - alpha) * prev;
        out.push(prev);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Macd {
    pub macd_line: Vec<f64>,
    pub signal_line: Vec<f64>,
}

pub const MACD_FAST: usize = 12;
pub const MACD_SLOW: usize = 26;
pub const MACD_SIGNAL: usize = 9;

/// MACD line = EMA12 - EMA26; signal line = 9-period EMA of the MACD line.
pub fn macd(prices: &PriceSeries) -> Result<Macd, IndicatorError> {
    let fast = ema(prices, MACD_FAST)?;
    let slow = ema(prices, MACD_SLOW)?;
    let macd_line: Vec<f64> = fast.iter().zip(&slow).map(|(f, s)| f - s).collect();
    let signal_line = ema_raw(&macd_line, MACD_SIGNAL)?;
    Ok(Macd { macd_line, signal_line })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bollinger {
    pub mid: IndicatorSeries,
    pub upper: IndicatorSeries,
    pub lower: IndicatorSeries,
}

pub const BOLLINGER_WINDOW: usize = 20;
pub const BOLLINGER_K: f64 = 2.0;

/// Bands at `mid ± k·σ`, σ the population standard deviation over the window.
pub fn bollinger(prices: &PriceSeries, window: usize, k: f64) -> Result<Bollinger, IndicatorError> {
    if window < 2 {
        return Err(IndicatorError::Window { min: 2, got: window });
    }
    let mid = sma(prices, window)?;
    let p = prices.values();
    let mut upper = vec![None; p.len()];
    let mut lower = vec![None; p.len()];
    for (i, m) in mid.iter().enumerate() {
        if let Some(m) = *m {
            let var = p[i + 1 - window..=i].iter().map(|x| (x - m).powi(2)).sum::<f64>() / window as f64;
            let sd = var.sqrt();
            upper[i] = Some(m + k * sd);
            lower[i] = Some(m - k * sd);
        }
    }
    Ok(Bollinger { mid, upper, lower })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(v: &[f64]) -> PriceSeries {
        PriceSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sma_examples() {
        assert_eq!(sma(&ps(&[1., 2., 3., 4., 5.]), 3).unwrap(), vec![None, None, Some(2.0), Some(3.0), Some(4.0)]);
        let p = ps(&[3., 1., 4., 1., 5.]);
        assert_eq!(sma(&p, 1).unwrap(), p.values().iter().map(|x| Some(*x)).collect::<Vec<_>>());
        assert!(sma(&p, 6).unwrap().iter().all(Option::is_none));
        assert_eq!(sma(&p, 0), Err(IndicatorError::Window { min: 1, got: 0 }));
    }

    #[test]
    fn ema_examples() {
        let e = ema(&ps(&[1., 2., 3.]), 2).unwrap();
        let expected = [1.0, 5.0 / 3.0, 23.0 / 9.0];
        for (a, b) in e.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(ema(&ps(&[7.; 10]), 5).unwrap(), vec![7.0; 10]);
        let p = ps(&[2., 9., 4.]);
        assert_eq!(ema(&p, 1).unwrap(), p.values().to_vec());
        assert_eq!(ema(&ps(&[]), 3), Err(IndicatorError::Empty));
    }

    #[test]
    fn macd_examples() {
        let m = macd(&ps(&[42.0; 50])).unwrap();
        assert!(m.macd_line.iter().chain(&m.signal_line).all(|x| *x == 0.0));
        let single = macd(&ps(&[10.0])).unwrap();
        assert_eq!((single.macd_line, single.signal_line), (vec![0.0], vec![0.0]));
        assert_eq!(macd(&ps(&[])), Err(IndicatorError::Empty));
    }

    #[test]
    fn bollinger_examples() {
        let b = bollinger(&ps(&[5.0; 25]), 20, 2.0).unwrap();
        for i in 19..25 {
            assert_eq!((b.mid[i], b.upper[i], b.lower[i]), (Some(5.0), Some(5.0), Some(5.0)));
        }
        let b = bollinger(&ps(&[1., 2., 3.]), 3, 2.0).unwrap();
        let sd = (2.0f64 / 3.0).sqrt();
        assert_eq!(b.mid[2], Some(2.0));
        assert!((b.upper[2].unwrap() - (2.0 + 2.0 * sd)).abs() < 1e-12);
        assert!((b.lower[2].unwrap() - (2.0 - 2.0 * sd)).abs() < 1e-12);
        assert!(bollinger(&ps(&[1., 2.]), 3, 2.0).unwrap().upper.iter().all(Option::is_none));
        assert!(bollinger(&ps(&[1., 2.]), 1, 2.0).is_err());
    }

    #[test]
    fn rejects_non_positive_prices() {
        assert_eq!(PriceSeries::new(vec![1.0, 0.0]), Err(IndicatorError::BadPrice(1)));
    }

    fn prices() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.5f64..500.0, 1..80)
    }

    proptest! {
        #[test]
        fn sma_matches_bollinger_mid(p in prices(), w in 2usize..30) {
            let p = ps(&p);
            prop_assert_eq!(sma(&p, w).unwrap(), bollinger(&p, w, 2.0).unwrap().mid);
        }

        #[test]
        fn ema_bounded_by_prefix_range(p in prices(), period in 1usize..40) {
            let e = ema(&ps(&p), period).unwrap();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (x, v) in p.iter().zip(&e) {
                lo = lo.min(*x);
                hi = hi.max(*x);
                prop_assert!(*v >= lo - 1e-9 && *v <= hi + 1e-9);
            }
        }

        #[test]
        fn indicators_scale_linearly(p in prices(), c in 0.1f64..50.0) {
            let a = ps(&p);
            let b = ps(&p.iter().map(|x| x * c).collect::<Vec<_>>());
            let close = |x: f64, y: f64| (x * c - y).abs() <= 1e-9 * (1.0 + y.abs());
            for (x, y) in sma(&a, 5).unwrap().iter().zip(sma(&b, 5).unwrap()) {
                if let (Some(x), Some(y)) = (x, y) { prop_assert!(close(*x, y)); }
            }
            for (x, y) in ema(&a, 7).unwrap().iter().zip(ema(&b, 7).unwrap()) {
                prop_assert!(close(*x, y));
            }
            let (ma, mb) = (macd(&a).unwrap(), macd(&b).unwrap());
            for (x, y) in ma.macd_line.iter().zip(&mb.macd_line).chain(ma.signal_line.iter().zip(&mb.signal_line)) {
                prop_assert!(close(*x, *y));
            }
            let (ba, bb) = (bollinger(&a, 4, 2.0).unwrap(), bollinger(&b, 4, 2.0).unwrap());
            for (x, y) in ba.upper.iter().zip(&bb.upper).chain(ba.lower.iter().zip(&bb.lower)) {
                if let (Some(x), Some(y)) = (x, y) { prop_assert!(close(*x, *y)); }
            }
        }
    }
}
