//! Sample means, standard errors and the least-squares slope fit.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation over `√count`; 0 for fewer than two samples.
    pub stderr: f64,
    pub count: usize,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len();
    if n == 0 {
        return Summary { mean: f64::NAN, stderr: f64::NAN, count: 0 };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let stderr = if n < 2 {
        0.0
    } else {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    Summary { mean, stderr, count: n }
}

/// Summary of `a[t] − b[t]` over paired samples.
pub fn paired_difference(a: &[f64], b: &[f64]) -> Summary {
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    summarize(&diff)
}

/// Standard error of the difference of two independent estimates.
pub fn independent_stderr(a: &Summary, b: &Summary) -> f64 {
    a.stderr.hypot(b.stderr)
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "slope fit needs equal-length inputs");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
