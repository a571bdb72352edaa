//! Subcommand implementations.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use qpg_core::analysis::{
    accuracy_bound, bound_compliance_experiment, effective_dimension, normalize_fims, sample_fims, spectrum_stats,
    EmpiricalFim, NEAR_ZERO, PSD_SLACK,
};
use qpg_core::ansatz::write_checkpoint;
use qpg_core::decode::{count_balanced_partitionings, globality as globality_of, globality_histogram, HistogramMode};
use qpg_core::io::fmt_f64;
use qpg_core::qsim::parse_bits;
use qpg_core::rng;
use qpg_core::train::{aggregate_curves, train_run, write_aggregate_csv, write_curve_csv};
use qpg_core::{ParamSet, Ratio};
use rayon::prelude::*;

use crate::config::{comment_block, ConfigError, ExperimentConfig, PostFnSpec};
use crate::CliError;

type CmdResult = Result<(), CliError>;

/// Largest register whose extracted-information table is printed or written.
pub const EI_TABLE_MAX_QUBITS: usize = 8;

/// Stream ids under the experiment seed.
const FIM_STREAM: u64 = 3;
const EFFDIM_STREAM: u64 = 4;

fn create(dir: &Path, name: &str, header: &str) -> Result<BufWriter<File>, CliError> {
    fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    w.write_all(header.as_bytes())?;
    Ok(w)
}

pub fn train(cfg: &ExperimentConfig, out_dir: &Path, out: &mut dyn Write) -> CmdResult {
    let model = cfg.model_config()?;
    let policy = cfg.policy()?;
    let encoder = cfg.encoder()?;
    let hyper = cfg.hyperparams()?;
    let init = cfg.theta_init()?;
    let header = cfg.header();
    let runs = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let mut env = cfg.environment()?;
            Ok((seed, train_run(env.as_mut(), &encoder, policy.as_ref(), &hyper, init, seed)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    for (seed, outcome) in &runs {
        let mut w = create(out_dir, &format!("curve_seed{seed}.csv"), &header)?;
        write_curve_csv(&mut w, &outcome.curve)?;
        w.flush()?;
        let split = model.num_params();
        let params = ParamSet::from_flat(&model, &outcome.params[..split])?;
        let mut w = create(out_dir, &format!("params_seed{seed}.txt"), "")?;
        write_checkpoint(&mut w, &model, &params, &outcome.params[split..])?;
        w.flush()?;
        let last = outcome.curve.last().map_or(0.0, |p| p.avg20);
        let best = outcome.curve.iter().map(|p| p.avg20).fold(f64::NEG_INFINITY, f64::max);
        writeln!(out, "seed {seed}: final avg20 {}, best avg20 {}", fmt_f64(last), fmt_f64(best))?;
    }
    let curves: Vec<_> = runs.into_iter().map(|(_, o)| o.curve).collect();
    let mut w = create(out_dir, "aggregate.csv", &header)?;
    write_aggregate_csv(&mut w, &aggregate_curves(&curves)?)?;
    w.flush()?;
    Ok(())
}

pub fn globality(
    postfn: &str,
    qubits: Option<usize>,
    actions: Option<usize>,
    ei: bool,
    out_dir: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let f = PostFnSpec::parse(postfn)?.build(qubits, actions)?;
    let report = globality_of(&f)?;
    let g = report.globality();
    writeln!(out, "{f}: G = {g} = {}", fmt_f64(g.to_f64()))?;
    let small = f.n_qubits() <= EI_TABLE_MAX_QUBITS;
    if ei {
        if !small {
            return Err(ConfigError::new("--ei", format!("table output needs n <= {EI_TABLE_MAX_QUBITS}")).into());
        }
        report.write_table(&f, &mut &mut *out)?;
    }
    if let Some(dir) = out_dir {
        let header = comment_block(&format!("postfn = \"{postfn}\"\nqubits = {}\nactions = {}\n", f.n_qubits(), f.num_actions()));
        let mut w = create(dir, "globality.csv", &header)?;
        writeln!(w, "n,actions,ei_total,g_numer,g_denom,g")?;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            f.n_qubits(),
            f.num_actions(),
            report.total,
            g.numer,
            g.denom,
            fmt_f64(g.to_f64())
        )?;
        w.flush()?;
        if small {
            let mut w = create(dir, "ei_table.csv", &header)?;
            report.write_table(&f, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

pub fn enumerate(
    qubits: usize,
    actions: usize,
    sample: Option<usize>,
    seed: u64,
    out_dir: &Path,
    out: &mut dyn Write,
) -> CmdResult {
    let (mode, label) = match sample {
        Some(0) => return Err(ConfigError::new("--sample", "must be positive").into()),
        Some(count) => (HistogramMode::Sampled { count }, format!("sampled:{count}")),
        None => (HistogramMode::Exhaustive, "exhaustive".to_string()),
    };
    let mut r = rng::seeded(seed);
    let hist = globality_histogram(qubits, actions, &mode, &mut r)?;
    let header = comment_block(&format!(
        "qubits = {qubits}\nactions = {actions}\nmode = \"{label}\"\nseed = {seed}\n"
    ));
    let mut w = create(out_dir, "histogram.csv", &header)?;
    hist.write_csv(&mut w)?;
    w.flush()?;
    writeln!(out, "total = {}", hist.total())?;
    if let Ok(count) = count_balanced_partitionings(qubits, actions) {
        writeln!(out, "balanced partitionings = {count}")?;
    }
    writeln!(out, "at G = n: {}", hist.count_at(Ratio::new(qubits as u64, 1)))?;
    Ok(())
}

fn sampled_fims(cfg: &ExperimentConfig, stream: u64) -> Result<Vec<EmpiricalFim>, CliError> {
    let policy = cfg.policy()?;
    let sampler = cfg.state_sampler()?;
    let mut r = rng::stream(cfg.seeds[0], stream);
    Ok(sample_fims(
        policy.as_ref(),
        &sampler,
        cfg.analysis.param_sets,
        cfg.analysis.samples,
        &mut r,
    )?)
}

pub fn fim(cfg: &ExperimentConfig, out_dir: &Path, out: &mut dyn Write) -> CmdResult {
    let fims = sampled_fims(cfg, FIM_STREAM)?;
    let header = cfg.header();

    let mut mean = fims[0].matrix.clone() * 0.0;
    for f in &fims {
        mean += &f.matrix;
    }
    mean /= fims.len() as f64;
    let mean = EmpiricalFim {
        matrix: mean,
        samples: fims.iter().map(|f| f.samples).sum(),
    };
    let mut w = create(out_dir, "fim.csv", &header)?;
    mean.write_csv(&mut w)?;
    w.flush()?;

    let asym = fims.iter().map(EmpiricalFim::max_asymmetry).fold(0.0, f64::max);
    let min_ev = fims.iter().map(EmpiricalFim::min_eigenvalue).fold(f64::INFINITY, f64::min);
    // an identically zero FIM (e.g. beta = 0) has no scale to normalize away
    let matrices = if fims.iter().all(|f| f.trace() == 0.0) {
        fims.iter().map(|f| f.matrix.clone()).collect()
    } else {
        normalize_fims(&fims)?
    };
    let stats = spectrum_stats(&matrices)?;
    let mut w = create(out_dir, "spectrum.csv", &header)?;
    stats.write_csv(&mut w)?;
    w.flush()?;

    writeln!(out, "parameter sets: {}, dimension {}", fims.len(), mean.dim())?;
    writeln!(out, "max asymmetry {}, min eigenvalue {}", fmt_f64(asym), fmt_f64(min_ev))?;
    if min_ev < -PSD_SLACK {
        writeln!(out, "warning: eigenvalue below -{PSD_SLACK}")?;
    }
    writeln!(
        out,
        "near-zero (< {}) fraction: {}",
        fmt_f64(NEAR_ZERO),
        fmt_f64(stats.near_zero_fraction)
    )?;
    Ok(())
}

pub fn effdim(cfg: &ExperimentConfig, out_dir: &Path, out: &mut dyn Write) -> CmdResult {
    let fims = sampled_fims(cfg, EFFDIM_STREAM)?;
    let report = effective_dimension(&fims, &cfg.analysis.data_sizes)?;
    let mut w = create(out_dir, "effdim.csv", &cfg.header())?;
    report.write_csv(&mut w)?;
    w.flush()?;
    writeln!(out, "parameters: {}", report.num_params)?;
    for p in &report.points {
        writeln!(out, "n = {}: ed = {}, normalized {}", p.data_size, fmt_f64(p.eff_dim), fmt_f64(p.normalized))?;
    }
    Ok(())
}

pub fn bound(actions: usize, out: &mut dyn Write) -> CmdResult {
    let b = accuracy_bound(actions).map_err(|e| ConfigError::new("--actions", e))?;
    writeln!(out, "{}", fmt_f64(b))?;
    Ok(())
}

pub fn bound_experiment(cfg: &ExperimentConfig, actions: Option<usize>, out_dir: &Path, out: &mut dyn Write) -> CmdResult {
    let env = cfg
        .bandit()?
        .ok_or_else(|| ConfigError::new("environment.kind", "bound experiments need a bandit"))?;
    if let Some(m) = actions {
        if m != qpg_core::Environment::num_actions(&env) {
            return Err(ConfigError::new("--actions", "differs from the configured bandit").into());
        }
    }
    let policy = cfg.policy()?;
    let report = bound_compliance_experiment(&env, policy.as_ref(), &cfg.hyperparams()?, cfg.theta_init()?, &cfg.seeds)?;
    let mut w = create(out_dir, "bound.csv", &cfg.header())?;
    writeln!(w, "seed,accuracy")?;
    for (seed, acc) in &report.accuracies {
        writeln!(w, "{seed},{}", fmt_f64(*acc))?;
    }
    w.flush()?;
    writeln!(out, "bound {}", fmt_f64(report.bound))?;
    for (seed, acc) in &report.accuracies {
        writeln!(out, "seed {seed}: accuracy {}", fmt_f64(*acc))?;
    }
    writeln!(
        out,
        "{} of {} runs above bound + {}",
        report.exceeding(report.bound + report.slack),
        report.accuracies.len(),
        fmt_f64(report.slack)
    )?;
    Ok(())
}

pub fn decode(postfn: &str, qubits: Option<usize>, actions: Option<usize>, bits: &str, out: &mut dyn Write) -> CmdResult {
    let (value, len) = parse_bits(bits).map_err(|e| ConfigError::new("bits", e))?;
    if let Some(n) = qubits {
        if n != len {
            return Err(ConfigError::new("bits", format!("{len} bits for {n} qubits")).into());
        }
    }
    let f = PostFnSpec::parse(postfn)?.build(Some(len), actions)?;
    writeln!(out, "{}", f.decode(value)?)?;
    Ok(())
}
