//! The experiment subcommands.
//!
//! Each command turns a [`Resolved`] configuration into a pass flag plus
//! named text artifacts. Nothing here reads the clock or the environment,
//! so identical inputs give byte-identical artifacts.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;
use truncfield::diagnostics::{
    ident4_estimate, ks_distance, mean_and_se, refinement_check, stationary_run, GridCdf, QuadratureOracle,
    StationaryRunConfig, StatVerdict,
};
use truncfield::finite_spec::VolumeHamiltonian;
use truncfield::kernel::GeometryKind;
use truncfield::sampler::{ids, CftpConfig, GibbsSampler, SamplerError, SandwichConfig, UniformSource};
use truncfield::transforms::{af_specification_probe, beta_scaling_check};
use truncfield::truncnorm::TruncatedNormal;

use crate::config::Resolved;
use crate::CliError;

/// Residual bound for exact algebraic identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Certificate reassembly bound.
pub const REASSEMBLY_TOLERANCE: f64 = 1e-14;
/// Grid-refinement bounds for the quadrature oracle.
pub const REFINEMENT_MEAN_TOLERANCE: f64 = 1e-6;
pub const REFINEMENT_Z_TOLERANCE: f64 = 1e-8;
/// Closed-form versus quadrature agreement for a single site.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Sandwich,
    Cftp,
    Ident4,
    SpecCheck,
    PdCheck,
    BetaCheck,
    AfProbe,
    OracleCheck,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Sandwich,
        Command::Cftp,
        Command::Ident4,
        Command::SpecCheck,
        Command::PdCheck,
        Command::BetaCheck,
        Command::AfProbe,
        Command::OracleCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Sandwich => "sandwich",
            Command::Cftp => "cftp",
            Command::Ident4 => "ident4",
            Command::SpecCheck => "spec-check",
            Command::PdCheck => "pd-check",
            Command::BetaCheck => "beta-check",
            Command::AfProbe => "af-probe",
            Command::OracleCheck => "oracle-check",
        }
    }

    fn file_stem(self) -> String {
        self.name().replace('-', "_")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub artifacts: Vec<Artifact>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    seed: u64,
    pass: bool,
    config: &'a crate::config::ExperimentConfig,
    result: T,
}

fn envelope<T: Serialize>(cmd: Command, r: &Resolved, pass: bool, result: T) -> Result<Artifact, CliError> {
    let body = Envelope {
        command: cmd.name(),
        seed: r.config.seed,
        pass,
        config: &r.config,
        result,
    };
    let mut contents = serde_json::to_string_pretty(&body)?;
    contents.push('\n');
    Ok(Artifact {
        file_name: format!("{}.json", cmd.file_stem()),
        contents,
    })
}

/// Shortest round-trip text for a float.
pub fn fmt_f64(x: f64) -> String {
    if x != 0.0 && x.is_finite() && !(1e-6..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn csv(file_name: &str, header: &str, rows: impl Iterator<Item = String>) -> Artifact {
    let mut contents = String::with_capacity(1024);
    contents.push_str(header);
    contents.push('\n');
    for row in rows {
        contents.push_str(&row);
        contents.push('\n');
    }
    Artifact {
        file_name: file_name.to_string(),
        contents,
    }
}

fn require_volume(cmd: Command, r: &Resolved) -> Result<VolumeHamiltonian, CliError> {
    if r.geometry.kind() != GeometryKind::Box {
        return Err(CliError::Unsupported {
            command: cmd.name(),
            reason: "needs a box or region geometry",
        });
    }
    Ok(VolumeHamiltonian::new(&r.kernel, &r.geometry).map_err(truncfield::Error::from)?)
}

fn sampler(r: &Resolved) -> Result<GibbsSampler, CliError> {
    Ok(GibbsSampler::new(&r.kernel, r.geometry.clone(), r.interval).map_err(truncfield::Error::from)?)
}

pub fn execute(cmd: Command, r: &Resolved) -> Result<Outcome, CliError> {
    match cmd {
        Command::Sandwich => sandwich(r),
        Command::Cftp => cftp(r),
        Command::Ident4 => ident4(r),
        Command::SpecCheck => spec_check(r),
        Command::PdCheck => pd_check(r),
        Command::BetaCheck => beta_check(r),
        Command::AfProbe => af_probe(r),
        Command::OracleCheck => oracle_check(r),
    }
}

fn sandwich(r: &Resolved) -> Result<Outcome, CliError> {
    let s = sampler(r)?;
    let section = &r.config.sandwich;
    let cfg = SandwichConfig {
        sweeps: section.sweeps,
        snapshot_every: section.snapshot_every,
        seed: r.config.seed,
        fault_at_update: section.fault_at_update,
    };
    match s.run_sandwich(&r.boundary, &cfg) {
        Err(SamplerError::OrderViolation { update, site, lower, upper }) => {
            let result = json!({
                "sites": s.n_sites(),
                "order_preserved": false,
                "order_violation": { "update": update, "site": site, "lower": lower, "upper": upper },
            });
            Ok(Outcome {
                pass: false,
                artifacts: vec![envelope(Command::Sandwich, r, false, result)?],
            })
        }
        Err(e) => Err(truncfield::Error::from(e).into()),
        Ok(trace) => {
            let final_sup_gap = trace.final_sup_gap();
            let pass = section.threshold.is_none_or(|t| final_sup_gap < t);
            let result = json!({
                "sites": s.n_sites(),
                "order_preserved": true,
                "initial_sup_gap": trace.records[0].sup_gap,
                "final_sup_gap": final_sup_gap,
                "final_mean_gap": trace.records.last().map(|g| g.mean_gap),
                "threshold": section.threshold,
                "first_sweep_below_threshold": section.threshold.and_then(|t| trace.first_below(t)),
            });
            let mut artifacts = vec![envelope(Command::Sandwich, r, pass, result)?];
            artifacts.push(csv(
                "sandwich_trace.csv",
                "sweep,sup_gap,mean_gap",
                trace
                    .records
                    .iter()
                    .map(|g| format!("{},{},{}", g.sweep, fmt_f64(g.sup_gap), fmt_f64(g.mean_gap))),
            ));
            if !trace.snapshots.is_empty() {
                artifacts.push(csv(
                    "sandwich_snapshots.csv",
                    "sweep,site,gap",
                    trace.snapshots.iter().flat_map(|snap| {
                        snap.gaps
                            .iter()
                            .enumerate()
                            .map(move |(x, g)| format!("{},{},{}", snap.sweep, x, fmt_f64(*g)))
                    }),
                ));
            }
            Ok(Outcome { pass, artifacts })
        }
    }
}

#[derive(Serialize)]
struct KsReport {
    site: usize,
    distance: f64,
    threshold: f64,
    pass: bool,
}

fn cftp(r: &Resolved) -> Result<Outcome, CliError> {
    let vh = require_volume(Command::Cftp, r)?;
    let s = sampler(r)?;
    let section = &r.config.cftp;
    let cfg = CftpConfig {
        initial_horizon: section.initial_horizon,
        max_horizon: section.max_horizon,
        tolerance: section.tolerance,
    };
    let samples = s
        .cftp_samples(&r.boundary, r.config.seed, section.samples, &cfg)
        .map_err(truncfield::Error::from)?;
    let n = s.n_sites();
    let columns: Vec<Vec<f64>> = (0..n).map(|x| samples.iter().map(|c| c.values[x]).collect()).collect();

    let mut verdicts = Vec::new();
    let mut ks = Vec::new();
    let mut oracle_means: Option<Vec<f64>> = None;
    let ks_check = |site: usize, column: &[f64], grid: &GridCdf| -> Result<KsReport, CliError> {
        let distance = ks_distance(column, grid).map_err(truncfield::Error::from)?;
        Ok(KsReport {
            site,
            distance,
            threshold: section.ks_threshold,
            pass: distance < section.ks_threshold,
        })
    };
    if n == 1 {
        let spec = vh.specification(&r.boundary, r.interval).map_err(truncfield::Error::from)?;
        let tn = TruncatedNormal::new(spec.mean[0], r.interval).map_err(truncfield::Error::from)?;
        let (mean, se) = mean_and_se(&columns[0]);
        verdicts.push(StatVerdict::two_sided("mean site[0]", mean, se, tn.mean()));
        let grid = GridCdf::truncated_normal(&tn, section.ks_grid).map_err(truncfield::Error::from)?;
        if samples.len() >= truncfield::diagnostics::MIN_KS_SAMPLES {
            ks.push(ks_check(0, &columns[0], &grid)?);
        }
        oracle_means = Some(vec![tn.mean()]);
    } else if n <= truncfield::diagnostics::MAX_ORACLE_SITES {
        let oracle = QuadratureOracle::new(&vh, &r.boundary, r.interval, section.n_q).map_err(truncfield::Error::from)?;
        for x in 0..n {
            let (mean, se) = mean_and_se(&columns[x]);
            verdicts.push(StatVerdict::two_sided(format!("mean site[{x}]"), mean, se, oracle.means[x]));
            if samples.len() >= truncfield::diagnostics::MIN_KS_SAMPLES {
                ks.push(ks_check(x, &columns[x], &oracle.marginal_cdfs[x])?);
            }
        }
        oracle_means = Some(oracle.means.clone());
    }
    let pass = verdicts.iter().all(|v| v.pass) && ks.iter().all(|k| k.pass);
    let horizons: Vec<u64> = samples.iter().map(|c| c.horizon).collect();
    let result = json!({
        "sites": r.geometry.sites(),
        "samples": samples.len(),
        "tolerance": section.tolerance,
        "max_gap": samples.iter().map(|c| c.gap).fold(0.0, f64::max),
        "max_horizon": horizons.iter().max(),
        "mean_horizon": horizons.iter().sum::<u64>() as f64 / horizons.len() as f64,
        "oracle_means": oracle_means,
        "verdicts": verdicts,
        "ks": ks,
    });
    let header = std::iter::once("sample,horizon,gap".to_string())
        .chain((0..n).map(|x| format!("site_{x}")))
        .collect::<Vec<_>>()
        .join(",");
    let rows = samples.iter().enumerate().map(|(i, c)| {
        let mut row = format!("{},{},{}", i, c.horizon, fmt_f64(c.gap));
        for v in &c.values {
            let _ = write!(row, ",{}", fmt_f64(*v));
        }
        row
    });
    let artifacts = vec![envelope(Command::Cftp, r, pass, result)?, csv("cftp_samples.csv", &header, rows)];
    Ok(Outcome { pass, artifacts })
}

fn ident4(r: &Resolved) -> Result<Outcome, CliError> {
    let s = sampler(r)?;
    let section = &r.config.ident4;
    let cfg = StationaryRunConfig {
        burn_in_sweeps: section.burn_in,
        measure_sweeps: section.sweeps,
        record_every: section.record_every,
        start: section.start,
        seed: r.config.seed,
    };
    let series = stationary_run(&s, &cfg).map_err(truncfield::Error::from)?;
    let report = ident4_estimate(&series, section.batches).map_err(truncfield::Error::from)?;
    let pass = report.varphi.pass && report.ident2.pass;
    let result = json!({
        "sites": s.n_sites(),
        "records": series.varphi_mean.len(),
        "varphi": report.varphi,
        "ident2": report.ident2,
    });
    let rows = series
        .varphi_mean
        .iter()
        .zip(&series.drift)
        .enumerate()
        .map(|(i, (v, d))| format!("{},{},{}", i, fmt_f64(*v), fmt_f64(*d)));
    let artifacts = vec![
        envelope(Command::Ident4, r, pass, result)?,
        csv("ident4_series.csv", "record,varphi_mean,drift", rows),
    ];
    Ok(Outcome { pass, artifacts })
}

fn spec_check(r: &Resolved) -> Result<Outcome, CliError> {
    let vh = require_volume(Command::SpecCheck, r)?;
    let spec = vh.specification(&r.boundary, r.interval).map_err(truncfield::Error::from)?;
    let n = vh.n_sites();
    let a: Vec<Vec<f64>> = (0..n).map(|i| vh.precision().row(i).iter().copied().collect()).collect();
    let b: Vec<Vec<f64>> = (0..n).map(|i| vh.cross().row(i).iter().copied().collect()).collect();
    let mut src = UniformSource::new(r.config.seed, ids::PROBES);
    let (lo, hi) = (r.interval.lower(), r.interval.upper());
    let mut m2b: f64 = 0.0;
    let mut density: f64 = 0.0;
    for _ in 0..r.config.spec_check.trials {
        let e1: Vec<f64> = (0..n).map(|_| src.next_in(lo, hi)).collect();
        let e2: Vec<f64> = (0..n).map(|_| src.next_in(lo, hi)).collect();
        let h1 = vh.hamiltonian_split(&e1, &r.boundary).map_err(truncfield::Error::from)?;
        let h2 = vh.hamiltonian_split(&e2, &r.boundary).map_err(truncfield::Error::from)?;
        let q1 = vh.quadratic_form_energy(&e1, &r.boundary).map_err(truncfield::Error::from)?;
        m2b = m2b.max((h1 - q1).abs());
        let g = vh.gaussian_energy(&e1, &spec.mean) - vh.gaussian_energy(&e2, &spec.mean);
        density = density.max((h1 - h2 - g).abs());
    }
    let pass = spec.solve_residual <= IDENTITY_TOLERANCE && m2b <= IDENTITY_TOLERANCE && density <= IDENTITY_TOLERANCE;
    let result = json!({
        "sites": vh.sites(),
        "shell": vh.shell(),
        "boundary": r.boundary,
        "A": a,
        "B": b,
        "mean": spec.mean,
        "covariance": spec.covariance,
        "psi": vh.psi(&r.boundary).map_err(truncfield::Error::from)?,
        "solve_residual": spec.solve_residual,
        "trials": r.config.spec_check.trials,
        "max_quadratic_form_residual": m2b,
        "max_density_identity_residual": density,
        "tolerance": IDENTITY_TOLERANCE,
    });
    Ok(Outcome {
        pass,
        artifacts: vec![envelope(Command::SpecCheck, r, pass, result)?],
    })
}

fn pd_check(r: &Resolved) -> Result<Outcome, CliError> {
    let vh = require_volume(Command::PdCheck, r)?;
    let cert = vh.pd_certificate();
    let reassembly = cert.reassembly_error(vh.precision());
    let cholesky = vh.is_positive_definite();
    let min_eigenvalue = vh.min_eigenvalue();
    let pass = cholesky && reassembly <= REASSEMBLY_TOLERANCE && min_eigenvalue > 0.0 && cert.certifies_positive_definite();
    let result = json!({
        "cholesky": cholesky,
        "min_eigenvalue": min_eigenvalue,
        "reassembly_error": reassembly,
        "tolerance": REASSEMBLY_TOLERANCE,
        "certificate": cert,
    });
    Ok(Outcome {
        pass,
        artifacts: vec![envelope(Command::PdCheck, r, pass, result)?],
    })
}

fn beta_check(r: &Resolved) -> Result<Outcome, CliError> {
    let vh = require_volume(Command::BetaCheck, r)?;
    let section = &r.config.beta_check;
    let reports = section
        .betas
        .iter()
        .map(|&beta| beta_scaling_check(&vh, r.interval, beta, section.trials, r.config.seed))
        .collect::<Result<Vec<_>, _>>()
        .map_err(truncfield::Error::from)?;
    let pass = reports.iter().all(|b| b.max_residual <= IDENTITY_TOLERANCE);
    let result = json!({ "tolerance": IDENTITY_TOLERANCE, "reports": reports });
    Ok(Outcome {
        pass,
        artifacts: vec![envelope(Command::BetaCheck, r, pass, result)?],
    })
}

fn af_probe(r: &Resolved) -> Result<Outcome, CliError> {
    let vh = require_volume(Command::AfProbe, r)?;
    let section = &r.config.af_probe;
    let report = af_specification_probe(
        &vh,
        &r.boundary,
        r.interval,
        section.partition(),
        section.trials,
        r.config.seed,
        section.mode,
    )
    .map_err(truncfield::Error::from)?;
    let rows = report
        .deltas
        .iter()
        .enumerate()
        .map(|(i, d)| format!("{},{}", i, fmt_f64(*d)));
    let artifacts = vec![
        csv("af_probe_deltas.csv", "trial,delta", rows),
        envelope(Command::AfProbe, r, true, &report)?,
    ];
    Ok(Outcome { pass: true, artifacts })
}

fn oracle_check(r: &Resolved) -> Result<Outcome, CliError> {
    let vh = require_volume(Command::OracleCheck, r)?;
    let n_q = r.config.oracle.n_q;
    let refinement = refinement_check(&vh, &r.boundary, r.interval, n_q).map_err(truncfield::Error::from)?;
    let mut pass = refinement.max_mean_change < REFINEMENT_MEAN_TOLERANCE
        && refinement.relative_z_change < REFINEMENT_Z_TOLERANCE;
    let mut closed_form = None;
    if vh.n_sites() == 1 {
        let spec = vh.specification(&r.boundary, r.interval).map_err(truncfield::Error::from)?;
        let tn = TruncatedNormal::new(spec.mean[0], r.interval).map_err(truncfield::Error::from)?;
        let diff = (tn.mean() - refinement.fine.means[0]).abs();
        pass &= diff <= CLOSED_FORM_TOLERANCE;
        closed_form = Some(json!({
            "location": spec.mean[0],
            "closed_form_mean": tn.mean(),
            "quadrature_mean": refinement.fine.means[0],
            "difference": diff,
            "tolerance": CLOSED_FORM_TOLERANCE,
        }));
    }
    let summary = |o: &QuadratureOracle| json!({ "n_q": o.n_q, "log_z": o.log_z, "means": o.means, "variances": o.variances });
    let result = json!({
        "sites": vh.sites(),
        "coarse": summary(&refinement.coarse),
        "fine": summary(&refinement.fine),
        "max_mean_change": refinement.max_mean_change,
        "relative_z_change": refinement.relative_z_change,
        "mean_tolerance": REFINEMENT_MEAN_TOLERANCE,
        "z_tolerance": REFINEMENT_Z_TOLERANCE,
        "closed_form": closed_form,
    });
    Ok(Outcome {
        pass,
        artifacts: vec![envelope(Command::OracleCheck, r, pass, result)?],
    })
}
