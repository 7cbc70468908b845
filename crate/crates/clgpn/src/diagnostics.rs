//! Convergence diagnostics for scalar draw series: effective sample size
//! via the initial-positive-sequence truncation of the autocorrelation sum,
//! and a standardised mean-difference statistic comparing the first 10% of
//! a series against its last 50% (each segment's variance scaled by its own
//! effective sample size).

use std::fmt::Write as _;

/// Sample autocovariance at the given lag (biased 1/n normalisation, the
/// standard choice for spectral ESS estimates).
fn autocov(series: &[f64], mean: f64, lag: usize) -> f64 {
    let n = series.len();
    let mut s = 0.0;
    for i in 0..n - lag {
        s += (series[i] - mean) * (series[i + lag] - mean);
    }
    s / n as f64
}

/// Effective sample size of a (possibly autocorrelated) series.
///
/// The integrated autocorrelation time `τ = 1 + 2 Σ ρ_t` is truncated at
/// the first lag pair `ρ_{2m-1} + ρ_{2m}` that turns negative — for a
/// reversible chain those pair sums are positive and decreasing, so the
/// first negative pair marks where noise takes over. The estimate is
/// clamped to `[1, n]`.
pub fn ess(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 2 {
        return n as f64;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let g0 = autocov(series, mean, 0);
    if !(g0 > 0.0) {
        return n as f64; // constant series: no autocorrelation structure
    }
    let mut tau = 1.0;
    let mut lag = 1;
    while lag + 1 < n {
        let pair = (autocov(series, mean, lag) + autocov(series, mean, lag + 1)) / g0;
        if pair < 0.0 || !pair.is_finite() {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    (n as f64 / tau).clamp(1.0, n as f64)
}

/// Standardised difference between the means of the first 10% and the last
/// 50% of the series, with each segment's variance divided by its own
/// effective sample size. Near-stationary chains give values of typical
/// standard-normal size; a drifting chain gives large magnitudes. `NaN`
/// when either segment is empty or both variances vanish.
pub fn geweke_z(series: &[f64]) -> f64 {
    let n = series.len();
    let n_a = n / 10;
    let n_b = n / 2;
    if n_a < 2 || n_b < 2 {
        return f64::NAN;
    }
    let a = &series[..n_a];
    let b = &series[n - n_b..];
    let stats = |s: &[f64]| {
        let m = s.iter().sum::<f64>() / s.len() as f64;
        let v = s.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (s.len() - 1) as f64;
        (m, v, ess(s))
    };
    let (ma, va, ea) = stats(a);
    let (mb, vb, eb) = stats(b);
    let denom = (va / ea + vb / eb).sqrt();
    if denom > 0.0 {
        (ma - mb) / denom
    } else if ma == mb {
        0.0
    } else {
        f64::NAN
    }
}

/// Diagnostics for one named scalar series.
#[derive(Clone, Debug)]
pub struct SeriesDiagnostic {
    pub name: String,
    pub n: usize,
    pub ess: f64,
    pub geweke_z: f64,
    /// The series never moved (constant to the last bit).
    pub degenerate: bool,
    /// Too few draws for the estimates to mean much (< 100).
    pub unreliable: bool,
}

/// Compute diagnostics for one series.
pub fn diagnose(name: &str, series: &[f64]) -> SeriesDiagnostic {
    let n = series.len();
    let degenerate = n > 0 && series.iter().all(|v| v.to_bits() == series[0].to_bits());
    SeriesDiagnostic {
        name: name.to_string(),
        n,
        ess: if degenerate { n as f64 } else { ess(series) },
        geweke_z: if degenerate { 0.0 } else { geweke_z(series) },
        degenerate,
        unreliable: n < 100,
    }
}

/// Render diagnostics as an aligned text table.
pub fn render_report(rows: &[SeriesDiagnostic]) -> String {
    let name_w = rows
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(4)
        .max("series".len());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_w$}  {:>6}  {:>9}  {:>8}  flags",
        "series", "draws", "ess", "geweke_z"
    );
    for r in rows {
        let mut flags = Vec::new();
        if r.degenerate {
            flags.push("degenerate");
        }
        if r.unreliable {
            flags.push("unreliable");
        }
        let flag_text = if flags.is_empty() { "-".to_string() } else { flags.join(",") };
        let _ = writeln!(
            out,
            "{:<name_w$}  {:>6}  {:>9.1}  {:>8.2}  {}",
            r.name, r.n, r.ess, r.geweke_z, flag_text
        );
    }
    out
}
