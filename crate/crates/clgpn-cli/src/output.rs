//! Rendering of run outputs: the manifest, draw and state tables,
//! posterior summaries, and the model-selection and scoring reports.
//!
//! Every generated file begins with the line `# manifest: <name>` so that
//! any output can be traced back to the manifest describing the run that
//! produced it. Numeric tables use `Display` formatting for `f64`, which
//! prints the shortest string that parses back to the same value, so
//! machine-readable files survive a round trip bit for bit.

use std::fmt::Write as _;

use clgpn::mcmc::ChainOutput;
use clgpn::params::RegimeParams;
use clgpn::scoring::{CriterionReport, RegimeSummary, ScoreReport};

/// Hex SHA-256 digest of raw bytes; recorded in manifests so inputs and
/// generated datasets can be pinned.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Linear-interpolation quantile of an unsorted sample (p in [0, 1]).
pub fn quantile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&p), "quantile level {p} outside [0, 1]");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let h = p * (v.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        v[lo]
    } else {
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    }
}

/// Median and central 95% interval of a sample.
pub fn median_ci(values: &[f64]) -> (f64, f64, f64) {
    (
        quantile(values, 0.5),
        quantile(values, 0.025),
        quantile(values, 0.975),
    )
}

/// The run manifest: one per command invocation, naming the inputs, the
/// effective configuration, and checksums of what was read and written.
pub struct Manifest {
    pub command: &'static str,
    /// Command-specific lines (input paths, checksums, scheme, fractions).
    pub lines: Vec<(String, String)>,
    /// Effective run configuration, echoed verbatim; absent for commands
    /// that run no chain.
    pub config_echo: Option<Vec<(&'static str, String)>>,
}

impl Manifest {
    pub fn new(command: &'static str) -> Self {
        Manifest {
            command,
            lines: Vec::new(),
            config_echo: None,
        }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    /// Render the manifest text. Wall-clock fields make this the one
    /// output file that is not bit-reproducible across runs.
    pub fn render(&self, wall_clock_ms: u128) -> String {
        let created_unix_ms = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(out, "# run manifest (manifest_version = 1)");
        let _ = writeln!(out, "command = {}", self.command);
        let _ = writeln!(out, "tool = clgpn {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "created_unix_ms = {created_unix_ms}");
        let _ = writeln!(out, "wall_clock_ms = {wall_clock_ms}");
        for (k, v) in &self.lines {
            let _ = writeln!(out, "{k} = {v}");
        }
        if let Some(echo) = &self.config_echo {
            let _ = writeln!(out);
            let _ = writeln!(out, "# effective configuration");
            for (k, v) in echo {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }
}

/// First line of every generated file: a pointer to the manifest that
/// describes the run.
pub fn manifest_header(manifest_name: &str) -> String {
    format!("# manifest: {manifest_name}\n")
}

/// Retained parameter draws as CSV: one row per draw, one column per
/// regime parameter (`<name>_r<regime>`), plus the log joint posterior.
pub fn render_draws(out: &ChainOutput, manifest_name: &str) -> String {
    let k = out.k;
    let mut text = manifest_header(manifest_name);
    text.push_str("draw");
    for j in 0..k {
        for name in RegimeParams::VECTOR_NAMES {
            let _ = write!(text, ",{}_r{}", name, j + 1);
        }
    }
    text.push_str(",log_post\n");
    for (d, draw) in out.draws.iter().enumerate() {
        let _ = write!(text, "{d}");
        for p in &draw.params {
            for v in p.as_vector() {
                let _ = write!(text, ",{v}");
            }
        }
        let _ = writeln!(text, ",{}", draw.log_post);
    }
    text
}

/// The label path of the highest-posterior draw. Position 0 is the
/// pre-sample seed state; positions 1..=T align with the data rows.
/// States are reported 1-based.
pub fn render_map_states(out: &ChainOutput, manifest_name: &str) -> String {
    let mut text = manifest_header(manifest_name);
    text.push_str("position,state\n");
    let map = &out.draws[out.map_index];
    for (pos, &s) in map.labels.iter().enumerate() {
        let _ = writeln!(text, "{pos},{}", s + 1);
    }
    text
}

/// Per-draw imputations for every missing coordinate: `position` is the
/// 1-based data row; a coordinate that was observed is left empty.
pub fn render_imputes(out: &ChainOutput, manifest_name: &str) -> String {
    let mut text = manifest_header(manifest_name);
    text.push_str("draw,position,x,y\n");
    let fmt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for (d, draw) in out.draws.iter().enumerate() {
        for iv in &draw.imputed {
            let _ = writeln!(
                text,
                "{d},{},{},{}",
                iv.index + 1,
                fmt(iv.x),
                fmt(iv.y)
            );
        }
    }
    text
}

/// Posterior medians and central 95% intervals per regime parameter.
pub fn render_summary(out: &ChainOutput, manifest_name: &str) -> String {
    let mut text = manifest_header(manifest_name);
    let _ = writeln!(
        text,
        "posterior summary: median and central 95% interval over {} draws \
         (variant {}, {} regimes)",
        out.draws.len(),
        out.variant,
        out.k
    );
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "{:<12} {:>6} {:>13} {:>13} {:>13}",
        "parameter", "regime", "median", "2.5%", "97.5%"
    );
    for j in 0..out.k {
        for (idx, name) in RegimeParams::VECTOR_NAMES.iter().enumerate() {
            let series: Vec<f64> = out
                .draws
                .iter()
                .map(|d| d.params[j].as_vector()[idx])
                .collect();
            let (med, lo, hi) = median_ci(&series);
            let _ = writeln!(
                text,
                "{:<12} {:>6} {:>13.5} {:>13.5} {:>13.5}",
                name,
                j + 1,
                med,
                lo,
                hi
            );
        }
    }
    if let Some(rates) = &out.accept_sigma_rho {
        let joined: Vec<String> = rates.iter().map(|r| format!("{r:.3}")).collect();
        let _ = writeln!(text);
        let _ = writeln!(
            text,
            "covariance-move acceptance by regime: {}",
            joined.join(", ")
        );
    }
    if let Some(rate) = out.accept_radius {
        let _ = writeln!(text, "radius-move acceptance (pooled): {rate:.3}");
    }
    text
}

/// Model-selection table as CSV.
pub fn render_select_csv(rows: &[(usize, CriterionReport)], manifest_name: &str) -> String {
    let mut text = manifest_header(manifest_name);
    text.push_str("k,param_count,map_loglik,classified_loglik,aic,bic,icl\n");
    for (k, r) in rows {
        let _ = writeln!(
            text,
            "{k},{},{},{},{},{},{}",
            r.param_count, r.map_loglik, r.classified_loglik, r.aic, r.bic, r.icl
        );
    }
    text
}

/// Model-selection table for reading, with the minimizing regime count
/// marked per criterion.
pub fn render_select_txt(rows: &[(usize, CriterionReport)], manifest_name: &str) -> String {
    let mut text = manifest_header(manifest_name);
    let _ = writeln!(
        text,
        "information criteria at the posterior-mode draw (lower is better)"
    );
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "{:>2} {:>7} {:>14} {:>14} {:>14} {:>14} {:>14}",
        "K", "params", "map_loglik", "aic", "bic", "icl", "classified"
    );
    for (k, r) in rows {
        let _ = writeln!(
            text,
            "{:>2} {:>7} {:>14.3} {:>14.3} {:>14.3} {:>14.3} {:>14.3}",
            k, r.param_count, r.map_loglik, r.aic, r.bic, r.icl, r.classified_loglik
        );
    }
    let best = |f: fn(&CriterionReport) -> f64| {
        rows.iter()
            .min_by(|a, b| f(&a.1).total_cmp(&f(&b.1)))
            .map(|(k, _)| *k)
            .unwrap_or(0)
    };
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "minima: aic -> K={}, bic -> K={}, icl -> K={}",
        best(|r| r.aic),
        best(|r| r.bic),
        best(|r| r.icl)
    );
    text
}

/// Held-out scoring report.
pub fn render_score(
    report: &ScoreReport,
    n_circular: usize,
    n_linear: usize,
    detail: &[(String, String)],
    manifest_name: &str,
) -> String {
    let mut text = manifest_header(manifest_name);
    for (k, v) in detail {
        let _ = writeln!(text, "{k} = {v}");
    }
    let _ = writeln!(text, "circular_sites_scored = {n_circular}");
    let _ = writeln!(text, "linear_sites_scored = {n_linear}");
    let _ = writeln!(text, "crps_circular = {}", report.crps_circular);
    let _ = writeln!(text, "crps_linear = {}", report.crps_linear);
    let _ = writeln!(text, "ape = {}", report.ape);
    let _ = writeln!(text, "mse = {}", report.mse);
    text
}

/// Posterior transition probabilities: median and central 95% interval of
/// the per-draw posterior-mean matrix, plus the initial distribution.
pub fn render_transition(
    pi_series: &[Vec<Vec<f64>>],
    pi0_series: &[Vec<f64>],
    manifest_name: &str,
) -> String {
    let k = pi_series.len();
    let mut text = manifest_header(manifest_name);
    let _ = writeln!(
        text,
        "transition probabilities: median and central 95% interval of the \
         per-draw posterior mean"
    );
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "{:>4} {:>3} {:>10} {:>10} {:>10}",
        "from", "to", "median", "2.5%", "97.5%"
    );
    for (i, row) in pi_series.iter().enumerate() {
        for (j, series) in row.iter().enumerate() {
            let (med, lo, hi) = median_ci(series);
            let _ = writeln!(
                text,
                "{:>4} {:>3} {:>10.4} {:>10.4} {:>10.4}",
                i + 1,
                j + 1,
                med,
                lo,
                hi
            );
        }
    }
    let _ = writeln!(text);
    let _ = writeln!(text, "initial distribution:");
    let _ = writeln!(
        text,
        "{:>5} {:>10} {:>10} {:>10}",
        "state", "median", "2.5%", "97.5%"
    );
    for (s, series) in pi0_series.iter().enumerate().take(k) {
        let (med, lo, hi) = median_ci(series);
        let _ = writeln!(
            text,
            "{:>5} {:>10.4} {:>10.4} {:>10.4}",
            s + 1,
            med,
            lo,
            hi
        );
    }
    text
}

/// Per-regime features at the posterior-mode draw: circular mean and
/// concentration of the emission, linear marginal moments, and the
/// circular–linear association of the classified data with its 5%
/// critical value.
pub fn render_regimes(
    rows: &[(usize, RegimeSummary, Option<f64>)],
    manifest_name: &str,
) -> String {
    let mut text = manifest_header(manifest_name);
    let _ = writeln!(
        text,
        "regime features at the posterior-mode draw (association computed \
         from fully observed points classified into the regime)"
    );
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "{:>6} {:>6} {:>10} {:>13} {:>10} {:>10} {:>11} {:>10} {:>10}",
        "regime",
        "n_obs",
        "circ_mean",
        "concentration",
        "lin_mean",
        "lin_var",
        "cl_corr_sq",
        "f_stat",
        "f_crit_95"
    );
    let opt = |v: Option<f64>| match v {
        Some(v) => format!("{v:.4}"),
        None => "NA".to_string(),
    };
    for (j, (n_obs, s, f_crit)) in rows.iter().enumerate() {
        let _ = writeln!(
            text,
            "{:>6} {:>6} {:>10.4} {:>13.4} {:>10.4} {:>10.4} {:>11} {:>10} {:>10}",
            j + 1,
            n_obs,
            s.circ_mean,
            s.concentration,
            s.lin_mean,
            s.lin_var,
            opt(s.cl_corr_sq),
            opt(s.f_stat),
            opt(*f_crit)
        );
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_interpolates_and_hits_endpoints() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn sha256_matches_known_digest() {
        // SHA-256 of the empty string and of "abc" are fixed by the standard.
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_renders_command_lines_and_echo() {
        let mut m = Manifest::new("fit");
        m.push("input", "data.csv");
        m.config_echo = Some(vec![("iterations", "100".to_string())]);
        let text = m.render(42);
        assert!(text.contains("command = fit"));
        assert!(text.contains("wall_clock_ms = 42"));
        assert!(text.contains("input = data.csv"));
        assert!(text.contains("# effective configuration\niterations = 100"));
    }
}
