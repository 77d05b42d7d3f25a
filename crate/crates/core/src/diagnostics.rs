//! Oracles and statistical verdicts for checking the sampler.
//!
//! * [`QuadratureOracle`]: composite Simpson integration of `exp(-H^Λ)` over
//!   `[a,b]^Λ` for volumes of at most three sites.
//! * [`batch_means`] and [`StatVerdict`]: three-standard-error decisions.
//! * [`stationary_run`] / [`ident4_estimate`]: the stationarity identities
//!   `E varphi(eta_bar(x)) = 0` and `E eta_bar(x) = E eta(x)` on a torus.
//! * [`domination_check`] and [`ks_distance`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_spec::{SpecError, VolumeHamiltonian};
use crate::kernel::{GeometryKind, SpinInterval};
use crate::sampler::{ids, GibbsSampler, SamplerError, UpdateStream};
use crate::truncnorm::{varphi, TruncNormError, TruncatedNormal};

pub const MAX_ORACLE_SITES: usize = 3;
pub const MIN_ORACLE_SUBINTERVALS: usize = 64;
pub const DEFAULT_BATCHES: usize = 32;
pub const MIN_KS_SAMPLES: usize = 100;
/// Verdicts pass within this many standard errors.
pub const Z_THRESHOLD: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("quadrature supports at most {MAX_ORACLE_SITES} sites, got {0}")]
    VolumeTooLarge(usize),
    #[error("quadrature needs an even number of at least {MIN_ORACLE_SUBINTERVALS} subintervals, got {0}")]
    GridTooCoarse(usize),
    #[error("stationarity estimates need a torus geometry")]
    NotTorus,
    #[error("sample sets disagree in shape: {0} vs {1} values per sample")]
    GeometryMismatch(usize, usize),
    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    TruncNorm(#[from] TruncNormError),
}

/// Tabulated CDF; `values[i] = F(points[i])` with increasing `points`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCdf {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
}

impl GridCdf {
    pub fn new(points: Vec<f64>, values: Vec<f64>) -> Result<Self, DiagnosticsError> {
        if points.is_empty() || points.len() != values.len() {
            return Err(DiagnosticsError::InvalidGrid("points and values must be nonempty and equal in length"));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(DiagnosticsError::InvalidGrid("points must be strictly increasing"));
        }
        Ok(Self { points, values })
    }

    /// `F` sampled on `n_points` equispaced points of `[lo, hi]`.
    pub fn from_fn<F: Fn(f64) -> f64>(lo: f64, hi: f64, n_points: usize, f: F) -> Result<Self, DiagnosticsError> {
        if n_points < 2 || !(lo < hi) {
            return Err(DiagnosticsError::InvalidGrid("need lo < hi and at least two points"));
        }
        let h = (hi - lo) / (n_points - 1) as f64;
        let points: Vec<f64> = (0..n_points)
            .map(|i| if i + 1 == n_points { hi } else { lo + i as f64 * h })
            .collect();
        let values = points.iter().map(|&x| f(x)).collect();
        Self::new(points, values)
    }

    pub fn truncated_normal(tn: &TruncatedNormal, n_points: usize) -> Result<Self, DiagnosticsError> {
        let iv = tn.interval();
        Self::from_fn(iv.lower(), iv.upper(), n_points, |x| tn.cdf(x))
    }
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and
/// `oracle`, taken over the oracle grid using both one-sided limits of the
/// empirical CDF.
pub fn ks_distance(samples: &[f64], oracle: &GridCdf) -> Result<f64, DiagnosticsError> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(DiagnosticsError::TooFewSamples {
            needed: MIN_KS_SAMPLES,
            found: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (&x, &f) in oracle.points.iter().zip(&oracle.values) {
        let below = sorted.partition_point(|&s| s < x) as f64 / n;
        let at_or_below = sorted.partition_point(|&s| s <= x) as f64 / n;
        d = d.max((below - f).abs()).max((at_or_below - f).abs());
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatVerdict {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    pub target: f64,
    pub z: f64,
    pub pass: bool,
}

impl StatVerdict {
    fn z_score(estimate: f64, se: f64, target: f64) -> f64 {
        let diff = estimate - target;
        if diff == 0.0 {
            0.0
        } else {
            diff / se
        }
    }

    /// Passes when `|estimate - target| <= 3 se`.
    pub fn two_sided(name: impl Into<String>, estimate: f64, se: f64, target: f64) -> Self {
        Self {
            name: name.into(),
            estimate,
            se,
            target,
            z: Self::z_score(estimate, se, target),
            pass: (estimate - target).abs() <= Z_THRESHOLD * se,
        }
    }

    /// Passes when `estimate - target <= 3 se`.
    pub fn at_most(name: impl Into<String>, estimate: f64, se: f64, target: f64) -> Self {
        Self {
            name: name.into(),
            estimate,
            se,
            target,
            z: Self::z_score(estimate, se, target),
            pass: estimate - target <= Z_THRESHOLD * se,
        }
    }
}

/// Mean and batch-means standard error of a correlated series.
///
/// The series is cut into `batches` consecutive batches of equal length;
/// leftover values at the end are dropped.
pub fn batch_means(series: &[f64], batches: usize) -> Result<(f64, f64), DiagnosticsError> {
    let needed = 2 * batches.max(1);
    if batches < 2 || series.len() < needed {
        return Err(DiagnosticsError::TooFewSamples {
            needed,
            found: series.len(),
        });
    }
    let size = series.len() / batches;
    let means: Vec<f64> = series
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let mean = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    Ok((mean, (var / batches as f64).sqrt()))
}

/// Sample mean and standard error of independent draws.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Numerical integration of the finite-volume specification.
#[derive(Debug, Clone, Serialize)]
pub struct QuadratureOracle {
    pub n_q: usize,
    /// `log Z^{Λ,γ}` of `exp(-H^Λ)` over `[a,b]^Λ`.
    pub log_z: f64,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    /// Per-site marginal CDF at the even grid nodes.
    pub marginal_cdfs: Vec<GridCdf>,
}

impl QuadratureOracle {
    /// Simpson's rule with `n_q` subintervals per axis (`n_q + 1` nodes).
    pub fn new(
        vh: &VolumeHamiltonian,
        gamma: &[f64],
        interval: SpinInterval,
        n_q: usize,
    ) -> Result<Self, DiagnosticsError> {
        let k = vh.n_sites();
        if k > MAX_ORACLE_SITES {
            return Err(DiagnosticsError::VolumeTooLarge(k));
        }
        if n_q < MIN_ORACLE_SUBINTERVALS || !n_q.is_multiple_of(2) {
            return Err(DiagnosticsError::GridTooCoarse(n_q));
        }
        let spec = vh.specification(gamma, interval)?;
        let floor = vh.quadratic_form_energy(&spec.mean, gamma)?;
        let a = vh.precision();
        let prec: Vec<f64> = (0..k).flat_map(|i| (0..k).map(move |j| a[(i, j)])).collect();

        let (lo, hi) = (interval.lower(), interval.upper());
        let h = (hi - lo) / n_q as f64;
        let nodes: Vec<f64> = (0..=n_q)
            .map(|i| if i == n_q { hi } else { lo + i as f64 * h })
            .collect();
        let weights: Vec<f64> = (0..=n_q)
            .map(|i| {
                h / 3.0
                    * if i == 0 || i == n_q {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    }
            })
            .collect();

        let mut z = 0.0;
        let mut first = vec![0.0; k];
        let mut second = vec![0.0; k];
        let mut marginal = vec![vec![0.0; n_q + 1]; k];
        let mut idx = vec![0usize; k];
        let mut d = vec![0.0; k];
        let total = (n_q + 1).pow(k as u32);
        for _ in 0..total {
            for s in 0..k {
                d[s] = nodes[idx[s]] - spec.mean[s];
            }
            let mut quad = 0.0;
            for i in 0..k {
                let mut row = 0.0;
                for j in 0..k {
                    row += prec[i * k + j] * d[j];
                }
                quad += d[i] * row;
            }
            let e = (-0.5 * quad).exp();
            let w: f64 = idx.iter().map(|&i| weights[i]).product();
            let we = w * e;
            z += we;
            for s in 0..k {
                let u = nodes[idx[s]];
                first[s] += we * u;
                second[s] += we * u * u;
                marginal[s][idx[s]] += we / weights[idx[s]];
            }
            for s in (0..k).rev() {
                idx[s] += 1;
                if idx[s] <= n_q {
                    break;
                }
                idx[s] = 0;
            }
        }

        let means: Vec<f64> = first.iter().map(|f| f / z).collect();
        let variances = second
            .iter()
            .zip(&means)
            .map(|(s, m)| (s / z - m * m).max(0.0))
            .collect();
        let marginal_cdfs = marginal
            .iter()
            .map(|dens| {
                let mut points = vec![nodes[0]];
                let mut values = vec![0.0];
                let mut acc = 0.0;
                for j in (0..n_q).step_by(2) {
                    acc += h / 3.0 * (dens[j] + 4.0 * dens[j + 1] + dens[j + 2]);
                    points.push(nodes[j + 2]);
                    values.push((acc / z).min(1.0));
                }
                GridCdf { points, values }
            })
            .collect();
        Ok(Self {
            n_q,
            log_z: z.ln() - floor,
            means,
            variances,
            marginal_cdfs,
        })
    }
}

/// Change of the oracle under doubling of the grid.
#[derive(Debug, Clone, Serialize)]
pub struct Refinement {
    pub coarse: QuadratureOracle,
    pub fine: QuadratureOracle,
    pub max_mean_change: f64,
    /// `|Z_fine / Z_coarse - 1|`.
    pub relative_z_change: f64,
}

pub fn refinement_check(
    vh: &VolumeHamiltonian,
    gamma: &[f64],
    interval: SpinInterval,
    n_q: usize,
) -> Result<Refinement, DiagnosticsError> {
    let coarse = QuadratureOracle::new(vh, gamma, interval, n_q)?;
    let fine = QuadratureOracle::new(vh, gamma, interval, 2 * n_q)?;
    let max_mean_change = coarse
        .means
        .iter()
        .zip(&fine.means)
        .map(|(c, f)| (c - f).abs())
        .fold(0.0, f64::max);
    let relative_z_change = (fine.log_z - coarse.log_z).exp_m1().abs();
    Ok(Refinement {
        coarse,
        fine,
        max_mean_change,
        relative_z_change,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    Lower,
    Upper,
}

#[derive(Debug, Clone)]
pub struct StationaryRunConfig {
    pub burn_in_sweeps: usize,
    pub measure_sweeps: usize,
    /// Updates between recorded points; `0` records once per sweep.
    pub record_every: usize,
    pub start: Start,
    pub seed: u64,
}

/// Spatial averages recorded along a torus run.
#[derive(Debug, Clone, Serialize)]
pub struct StationarySeries {
    /// `|T|^{-1} sum_x varphi(eta_bar(x))` at each record.
    pub varphi_mean: Vec<f64>,
    /// `eta_bar(0) - eta(0)` at each record. Its spatial average vanishes
    /// identically on a torus, so a single site is tracked instead.
    pub drift: Vec<f64>,
}

pub fn stationary_run(sampler: &GibbsSampler, config: &StationaryRunConfig) -> Result<StationarySeries, DiagnosticsError> {
    if sampler.geometry().kind() != GeometryKind::Torus {
        return Err(DiagnosticsError::NotTorus);
    }
    let n = sampler.n_sites();
    let interval = sampler.interval();
    let mut field = match config.start {
        Start::Lower => sampler.lower_extreme(&[])?,
        Start::Upper => sampler.upper_extreme(&[])?,
    };
    let mut stream = UpdateStream::new(config.seed, ids::DYNAMICS, n);
    sampler.sweep(&mut field, &mut stream, (config.burn_in_sweeps * n) as u64)?;
    let every = if config.record_every == 0 { n } else { config.record_every };
    let total = config.measure_sweeps * n;
    let records = total / every;
    let mut series = StationarySeries {
        varphi_mean: Vec::with_capacity(records),
        drift: Vec::with_capacity(records),
    };
    for _ in 0..records {
        sampler.sweep(&mut field, &mut stream, every as u64)?;
        let mut v = 0.0;
        for x in 0..n {
            v += varphi(sampler.local_mean(&field, x)?, interval)?;
        }
        series.varphi_mean.push(v / n as f64);
        series.drift.push(sampler.local_mean(&field, 0)? - field.value(0));
    }
    Ok(series)
}

#[derive(Debug, Clone, Serialize)]
pub struct Ident4Report {
    pub varphi: StatVerdict,
    pub ident2: StatVerdict,
}

/// Batch-means verdicts that both recorded averages have mean zero.
pub fn ident4_estimate(series: &StationarySeries, batches: usize) -> Result<Ident4Report, DiagnosticsError> {
    let (v, v_se) = batch_means(&series.varphi_mean, batches)?;
    let (d, d_se) = batch_means(&series.drift, batches)?;
    Ok(Ident4Report {
        varphi: StatVerdict::two_sided("mean varphi(eta_bar)", v, v_se, 0.0),
        ident2: StatVerdict::two_sided("mean eta_bar(0) - eta(0)", d, d_se, 0.0),
    })
}

/// Increasing functionals of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    SiteValue(usize),
    SiteAverage,
    WindowMax { start: usize, len: usize },
    ExpSum,
}

impl Functional {
    pub fn eval(&self, config: &[f64]) -> f64 {
        match *self {
            Functional::SiteValue(i) => config[i],
            Functional::SiteAverage => config.iter().sum::<f64>() / config.len() as f64,
            Functional::WindowMax { start, len } => config[start..start + len]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max),
            Functional::ExpSum => config.iter().map(|v| v.exp()).sum(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Functional::SiteValue(i) => format!("site[{i}]"),
            Functional::SiteAverage => "site average".to_string(),
            Functional::WindowMax { start, len } => format!("max[{start}..{}]", start + len),
            Functional::ExpSum => "sum exp".to_string(),
        }
    }

    /// Every site value, the average, the max over all sites and the exp sum.
    pub fn standard_family(n_sites: usize) -> Vec<Functional> {
        let mut family: Vec<Functional> = (0..n_sites).map(Functional::SiteValue).collect();
        family.push(Functional::SiteAverage);
        family.push(Functional::WindowMax { start: 0, len: n_sites });
        family.push(Functional::ExpSum);
        family
    }
}

/// One-sided verdicts `mean f(samples1) <= mean f(samples2)` within three
/// pooled standard errors, for independent sample sets.
pub fn domination_check(
    samples1: &[Vec<f64>],
    samples2: &[Vec<f64>],
    functionals: &[Functional],
) -> Result<Vec<StatVerdict>, DiagnosticsError> {
    for set in [samples1, samples2] {
        if set.len() < 2 {
            return Err(DiagnosticsError::TooFewSamples { needed: 2, found: set.len() });
        }
    }
    let width = samples1[0].len();
    for s in samples1.iter().chain(samples2) {
        if s.len() != width {
            return Err(DiagnosticsError::GeometryMismatch(width, s.len()));
        }
    }
    for f in functionals {
        let fits = match *f {
            Functional::SiteValue(i) => i < width,
            Functional::WindowMax { start, len } => len > 0 && start + len <= width,
            _ => width > 0,
        };
        if !fits {
            return Err(DiagnosticsError::GeometryMismatch(width, width));
        }
    }
    Ok(functionals
        .iter()
        .map(|f| {
            let v1: Vec<f64> = samples1.iter().map(|s| f.eval(s)).collect();
            let v2: Vec<f64> = samples2.iter().map(|s| f.eval(s)).collect();
            let (m1, se1) = mean_and_se(&v1);
            let (m2, se2) = mean_and_se(&v2);
            StatVerdict::at_most(f.name(), m1 - m2, se1.hypot(se2), 0.0)
        })
        .collect())
}
