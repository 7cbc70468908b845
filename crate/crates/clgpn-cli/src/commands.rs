//! Implementations of the CLI subcommands.

use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clgpn::dataset::{self, Observation};
use clgpn::diagnostics;
use clgpn::error::{Error, Result};
use clgpn::hmm::{posterior_mean_transition, HyperBeta};
use clgpn::mcmc::relabel::pivotal_reorder;
use clgpn::mcmc::{run_chain, ChainOutput};
use clgpn::params::{RegimeParams, Variant};
use clgpn::scoring::{self, CriterionReport};
use clgpn::simstudy::{self, Coordinate, Scheme};

use crate::config::{validate_missing_token, RunSettings};
use crate::output::{self, Manifest};
use crate::{CommonFitArgs, DiagnoseArgs, FitArgs, ScoreArgs, SelectArgs, SimulateArgs};

const MANIFEST_NAME: &str = "manifest.txt";

/// Streams 0..chains drive the sampler chains; summary Monte Carlo work
/// uses streams from this offset so it can never collide with a chain.
const SUMMARY_STREAM_BASE: u64 = 1000;

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::data(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content)
        .map_err(|e| Error::data(format!("cannot write {}: {e}", path.display())))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path)
        .map_err(|e| Error::data(format!("cannot read {}: {e}", path.display())))
}

/// Combine defaults, the configuration file, and command-line flags.
fn resolve_settings(common: &CommonFitArgs, k_flag: Option<usize>) -> Result<RunSettings> {
    let mut s = RunSettings::default();
    if let Some(cfg) = &common.config {
        s.apply_file(cfg)?;
    }
    if let Some(seed) = common.seed {
        s.chain.seed = seed;
    }
    if let Some(chains) = common.chains {
        s.chains = chains;
    }
    if let Some(v) = &common.variant {
        s.chain.variant = Variant::parse(v)?;
    }
    if let Some(k) = k_flag {
        s.chain.k = k;
    }
    if common.degrees {
        s.parse.degrees = true;
    }
    if common.log_linear {
        s.parse.log_linear = true;
    }
    if let Some(tok) = &common.missing_token {
        s.parse.missing_token = tok.clone();
    }
    s.validate()?;
    Ok(s)
}

fn file_suffix(chain_idx: usize, chains: usize) -> String {
    if chains == 1 {
        String::new()
    } else {
        format!("_chain{chain_idx}")
    }
}

/// Run the configured chains (stream = chain index) and relabel each one
/// to its own posterior-mode pivot.
fn run_chains(obs: &[Observation], settings: &RunSettings) -> Result<Vec<ChainOutput>> {
    let mut outputs = Vec::with_capacity(settings.chains);
    for chain_idx in 0..settings.chains {
        let mut cfg = settings.chain;
        cfg.stream = chain_idx as u64;
        let mut out = run_chain(obs, &cfg, &settings.priors)?;
        pivotal_reorder(&mut out)?;
        outputs.push(out);
    }
    Ok(outputs)
}

fn manifest_with_input(
    command: &'static str,
    data: &Path,
    input_bytes: &[u8],
    settings: &RunSettings,
) -> Manifest {
    let mut m = Manifest::new(command);
    m.push("input", data.display());
    m.push("input_sha256", output::sha256_hex(input_bytes));
    m.config_echo = Some(settings.echo());
    m
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let started = Instant::now();
    let scheme = Scheme::parse(&args.scheme)?;
    let token = args.missing_token.as_deref().unwrap_or("NA");
    validate_missing_token(token)?;
    let sim = simstudy::generate(scheme, args.t, args.seed)?;
    ensure_dir(&args.out)?;

    let data_text =
        output::manifest_header(MANIFEST_NAME) + &dataset::render_dataset(&sim.obs, token);
    write_file(&args.out, "data.csv", &data_text)?;

    let mut states = output::manifest_header(MANIFEST_NAME);
    states.push_str("position,state\n");
    for (pos, &s) in sim.states.iter().enumerate() {
        states.push_str(&format!("{pos},{}\n", s + 1));
    }
    write_file(&args.out, "states.csv", &states)?;

    let mut m = Manifest::new("simulate");
    m.push("scheme", scheme);
    m.push("t_len", args.t);
    m.push("seed", args.seed);
    m.push("missing_token", token);
    m.push("data_sha256", output::sha256_hex(data_text.as_bytes()));

    if let Some(fraction) = args.missing_fraction {
        let mseed = args.missing_seed.unwrap_or(args.seed.wrapping_add(1));
        let mut mask_text = output::manifest_header(MANIFEST_NAME);
        mask_text.push_str("position,coordinate\n");
        let masked = if args.coordinate_drops {
            let (masked, mask) =
                simstudy::apply_missing_coordinates(&sim.obs, fraction, mseed)?;
            for (i, c) in &mask {
                let name = match c {
                    Coordinate::Circular => "circular",
                    Coordinate::Linear => "linear",
                };
                mask_text.push_str(&format!("{},{name}\n", i + 1));
            }
            m.push("dropped_coordinates", mask.len());
            masked
        } else {
            let (masked, mask) = simstudy::apply_missing(&sim.obs, fraction, mseed)?;
            for i in &mask {
                mask_text.push_str(&format!("{},both\n", i + 1));
            }
            m.push("dropped_pairs", mask.len());
            masked
        };
        let masked_text =
            output::manifest_header(MANIFEST_NAME) + &dataset::render_dataset(&masked, token);
        write_file(&args.out, "masked.csv", &masked_text)?;
        write_file(&args.out, "mask.csv", &mask_text)?;
        m.push("missing_fraction", fraction);
        m.push("missing_seed", mseed);
        m.push("coordinate_drops", args.coordinate_drops);
        m.push("masked_sha256", output::sha256_hex(masked_text.as_bytes()));
    }

    write_file(&args.out, MANIFEST_NAME, &m.render(started.elapsed().as_millis()))?;
    println!(
        "simulate: scheme {scheme}, {} time points, seed {} -> {}",
        args.t,
        args.seed,
        args.out.display()
    );
    Ok(())
}

/// Shared body of `fit` and `summarize`: run chains, write the per-chain
/// outputs, and optionally the interpretation tables.
fn fit_impl(args: &FitArgs, command: &'static str, with_tables: bool) -> Result<()> {
    let started = Instant::now();
    let settings = resolve_settings(&args.common, args.k)?;
    let input_bytes = read_bytes(&args.common.data)?;
    let obs = dataset::parse_dataset(&args.common.data, &settings.parse)?;
    ensure_dir(&args.common.out)?;

    let outputs = run_chains(&obs, &settings)?;
    let hb = HyperBeta::new(settings.priors.beta)?;
    for (chain_idx, out) in outputs.iter().enumerate() {
        let sfx = file_suffix(chain_idx, settings.chains);
        write_file(
            &args.common.out,
            &format!("draws{sfx}.csv"),
            &output::render_draws(out, MANIFEST_NAME),
        )?;
        write_file(
            &args.common.out,
            &format!("map_states{sfx}.csv"),
            &output::render_map_states(out, MANIFEST_NAME),
        )?;
        write_file(
            &args.common.out,
            &format!("imputes{sfx}.csv"),
            &output::render_imputes(out, MANIFEST_NAME),
        )?;
        write_file(
            &args.common.out,
            &format!("summary{sfx}.txt"),
            &output::render_summary(out, MANIFEST_NAME),
        )?;
        write_file(
            &args.common.out,
            &format!("diagnostics{sfx}.txt"),
            &render_chain_diagnostics(out),
        )?;
        if with_tables {
            write_file(
                &args.common.out,
                &format!("transition{sfx}.txt"),
                &render_transition_table(out, hb)?,
            )?;
            write_file(
                &args.common.out,
                &format!("regimes{sfx}.txt"),
                &render_regime_table(out, &obs, &settings, chain_idx)?,
            )?;
        }
    }

    let mut m = manifest_with_input(command, &args.common.data, &input_bytes, &settings);
    m.push("time_points", obs.len());
    m.push("draws_per_chain", settings.chain.kept_draws());
    write_file(
        &args.common.out,
        MANIFEST_NAME,
        &m.render(started.elapsed().as_millis()),
    )?;
    println!(
        "{command}: {} regimes, variant {}, {} chain(s), {} draws/chain -> {}",
        settings.chain.k,
        settings.chain.variant,
        settings.chains,
        settings.chain.kept_draws(),
        args.common.out.display()
    );
    Ok(())
}

pub fn fit(args: &FitArgs) -> Result<()> {
    fit_impl(args, "fit", false)
}

pub fn summarize(args: &FitArgs) -> Result<()> {
    fit_impl(args, "summarize", true)
}

fn render_chain_diagnostics(out: &ChainOutput) -> String {
    let mut rows = Vec::new();
    for j in 0..out.k {
        for (idx, name) in RegimeParams::VECTOR_NAMES.iter().enumerate() {
            let series: Vec<f64> = out
                .draws
                .iter()
                .map(|d| d.params[j].as_vector()[idx])
                .collect();
            rows.push(diagnostics::diagnose(&format!("{name}_r{}", j + 1), &series));
        }
    }
    let log_post: Vec<f64> = out.draws.iter().map(|d| d.log_post).collect();
    rows.push(diagnostics::diagnose("log_post", &log_post));
    output::manifest_header(MANIFEST_NAME) + &diagnostics::render_report(&rows)
}

fn render_transition_table(out: &ChainOutput, hb: HyperBeta) -> Result<String> {
    let k = out.k;
    let n = out.draws.len();
    let mut pi_series = vec![vec![Vec::with_capacity(n); k]; k];
    let mut pi0_series = vec![Vec::with_capacity(n); k];
    for d in &out.draws {
        let (pi, pi0) = posterior_mean_transition(&d.labels, k, hb)?;
        for i in 0..k {
            for j in 0..k {
                pi_series[i][j].push(pi[i][j]);
            }
            pi0_series[i].push(pi0[i]);
        }
    }
    Ok(output::render_transition(&pi_series, &pi0_series, MANIFEST_NAME))
}

fn render_regime_table(
    out: &ChainOutput,
    obs: &[Observation],
    settings: &RunSettings,
    chain_idx: usize,
) -> Result<String> {
    let map = &out.draws[out.map_index];
    let labels = &map.labels[1..]; // positions 1..=T align with the data rows
    let mut rng = ChaCha8Rng::seed_from_u64(settings.chain.seed);
    rng.set_stream(SUMMARY_STREAM_BASE + chain_idx as u64);
    let mut rows = Vec::with_capacity(out.k);
    for j in 0..out.k {
        let classified: Vec<(f64, f64)> = obs
            .iter()
            .zip(labels)
            .filter(|(o, &l)| l == j && o.fully_observed())
            .map(|(o, _)| (o.x.unwrap(), o.y.unwrap()))
            .collect();
        let summary = scoring::regime_summary(&map.params[j], &classified, 20_000, &mut rng)?;
        let f_crit = if classified.len() >= 4 {
            Some(scoring::f_threshold_95(classified.len())?)
        } else {
            None
        };
        rows.push((classified.len(), summary, f_crit));
    }
    Ok(output::render_regimes(&rows, MANIFEST_NAME))
}

pub fn select(args: &SelectArgs) -> Result<()> {
    let started = Instant::now();
    let settings = resolve_settings(&args.common, None)?;
    if settings.chains > 1 {
        return Err(Error::invalid(
            "select runs a single chain per regime count; set chains = 1",
        ));
    }
    if args.k_min < 1 || args.k_min > args.k_max {
        return Err(Error::invalid(format!(
            "regime-count range must satisfy 1 <= k-min <= k-max, got {}..{}",
            args.k_min, args.k_max
        )));
    }
    let input_bytes = read_bytes(&args.common.data)?;
    let obs = dataset::parse_dataset(&args.common.data, &settings.parse)?;
    ensure_dir(&args.common.out)?;
    let hb = HyperBeta::new(settings.priors.beta)?;

    let mut rows: Vec<(usize, CriterionReport)> = Vec::new();
    for k in args.k_min..=args.k_max {
        let mut cfg = settings.chain;
        cfg.k = k;
        // One stream per regime count so the sweep's chains are independent.
        cfg.stream = k as u64;
        cfg.validate()?;
        let mut out = run_chain(&obs, &cfg, &settings.priors)?;
        pivotal_reorder(&mut out)?;
        let map = &out.draws[out.map_index];
        let report = scoring::criteria(&map.params, &map.labels, &obs, cfg.variant, hb)?;
        rows.push((k, report));
    }

    write_file(
        &args.common.out,
        "select.csv",
        &output::render_select_csv(&rows, MANIFEST_NAME),
    )?;
    write_file(
        &args.common.out,
        "select.txt",
        &output::render_select_txt(&rows, MANIFEST_NAME),
    )?;
    let mut m = manifest_with_input("select", &args.common.data, &input_bytes, &settings);
    m.push("k_min", args.k_min);
    m.push("k_max", args.k_max);
    m.push("time_points", obs.len());
    write_file(
        &args.common.out,
        MANIFEST_NAME,
        &m.render(started.elapsed().as_millis()),
    )?;
    println!(
        "select: K = {}..{}, variant {} -> {}",
        args.k_min,
        args.k_max,
        settings.chain.variant,
        args.common.out.display()
    );
    Ok(())
}

pub fn score(args: &ScoreArgs) -> Result<()> {
    let started = Instant::now();
    let settings = resolve_settings(&args.common, args.k)?;
    if settings.chains > 1 {
        return Err(Error::invalid(
            "score runs a single chain; set chains = 1",
        ));
    }
    let input_bytes = read_bytes(&args.common.data)?;
    let original = dataset::parse_dataset(&args.common.data, &settings.parse)?;
    ensure_dir(&args.common.out)?;
    let mseed = args.missing_seed;

    let mut mask_text = output::manifest_header(MANIFEST_NAME);
    mask_text.push_str("position,coordinate\n");
    let (masked, dropped) = if args.coordinate_drops {
        let (masked, mask) =
            simstudy::apply_missing_coordinates(&original, args.missing_fraction, mseed)?;
        for (i, c) in &mask {
            let name = match c {
                Coordinate::Circular => "circular",
                Coordinate::Linear => "linear",
            };
            mask_text.push_str(&format!("{},{name}\n", i + 1));
        }
        (masked, mask.len())
    } else {
        let (masked, mask) = simstudy::apply_missing(&original, args.missing_fraction, mseed)?;
        for i in &mask {
            mask_text.push_str(&format!("{},both\n", i + 1));
        }
        (masked, mask.len())
    };
    // masked.csv holds the series the chain saw, on the model scale
    // (radians; log scale if log_linear was requested).
    write_file(
        &args.common.out,
        "masked.csv",
        &(output::manifest_header(MANIFEST_NAME)
            + &dataset::render_dataset(&masked, &settings.parse.missing_token)),
    )?;
    write_file(&args.common.out, "mask.csv", &mask_text)?;

    let mut cfg = settings.chain;
    // The mask is drawn from the plain stream of missing_seed; running the
    // chain on stream 1 keeps one shared seed from replaying it.
    cfg.stream = 1;
    let mut out = run_chain(&masked, &cfg, &settings.priors)?;
    pivotal_reorder(&mut out)?;
    let (circ, lin) = scoring::imputation_predictions(&out.draws, &original, &masked)?;
    let report = scoring::score_report(&circ, &lin)?;

    let detail = vec![
        (
            "drop_mode".to_string(),
            if args.coordinate_drops {
                "coordinates".to_string()
            } else {
                "whole_pairs".to_string()
            },
        ),
        ("missing_fraction".to_string(), args.missing_fraction.to_string()),
        ("missing_seed".to_string(), mseed.to_string()),
        ("dropped".to_string(), dropped.to_string()),
    ];
    write_file(
        &args.common.out,
        "score.txt",
        &output::render_score(&report, circ.len(), lin.len(), &detail, MANIFEST_NAME),
    )?;

    let mut m = manifest_with_input("score", &args.common.data, &input_bytes, &settings);
    m.push("missing_fraction", args.missing_fraction);
    m.push("missing_seed", mseed);
    m.push("coordinate_drops", args.coordinate_drops);
    m.push("time_points", original.len());
    write_file(
        &args.common.out,
        MANIFEST_NAME,
        &m.render(started.elapsed().as_millis()),
    )?;
    println!(
        "score: {} held-out circular and {} linear sites -> {}",
        circ.len(),
        lin.len(),
        args.common.out.display()
    );
    Ok(())
}

pub fn diagnose(args: &DiagnoseArgs) -> Result<()> {
    let multi = args.draws.len() > 1;
    let mut rows = Vec::new();
    for path in &args.draws {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::data(format!("cannot read {}: {e}", path.display())))?;
        let origin = path.display().to_string();
        let (header, cols) = parse_draws_csv(&text, &origin)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| origin.clone());
        for (name, series) in header.iter().zip(&cols) {
            if name == "draw" {
                continue;
            }
            let label = if multi {
                format!("{stem}:{name}")
            } else {
                name.clone()
            };
            rows.push(diagnostics::diagnose(&label, series));
        }
    }
    let report = diagnostics::render_report(&rows);
    match &args.out {
        Some(path) => std::fs::write(path, &report)
            .map_err(|e| Error::data(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{report}"),
    }
    Ok(())
}

/// Parse a draws CSV written by `fit`: `#` lines are comments, the first
/// remaining line is the header, every later line is one draw.
fn parse_draws_csv(text: &str, origin: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut header: Option<Vec<String>> = None;
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match &header {
            None => {
                cols = vec![Vec::new(); fields.len()];
                header = Some(fields.iter().map(|s| s.trim().to_string()).collect());
            }
            Some(h) => {
                if fields.len() != h.len() {
                    return Err(Error::data(format!(
                        "{origin}:{line_no}: expected {} fields, got {}",
                        h.len(),
                        fields.len()
                    )));
                }
                for (c, f) in fields.iter().enumerate() {
                    let v: f64 = f.trim().parse().map_err(|_| {
                        Error::data(format!("{origin}:{line_no}: unreadable number {f:?}"))
                    })?;
                    cols[c].push(v);
                }
            }
        }
    }
    let header = header.ok_or_else(|| Error::data(format!("{origin}: no header row")))?;
    if cols.first().is_none_or(|c| c.is_empty()) {
        return Err(Error::data(format!("{origin}: no draw rows")));
    }
    Ok((header, cols))
}
