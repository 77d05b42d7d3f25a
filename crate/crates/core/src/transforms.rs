//! Inverse-temperature rescaling and the bipartite spin reflection.
//!
//! `H^Λ` is homogeneous of degree two, so `beta H^Λ(eta) = H^Λ(sqrt(beta) eta)`
//! and the inverse temperature can be absorbed into the spin interval.
//!
//! On a bipartite kernel the reflection `R` fixes class one and maps
//! `eta(x) -> a + b - eta(x)` on class two. [`af_specification_probe`]
//! evaluates `Delta = H~(R xi) - H(xi)` for the Hamiltonian `H~` built from
//! `-J` over random interior configurations and reports how much it varies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_spec::{SpecError, VolumeHamiltonian};
use crate::kernel::{InteractionKernel, Point, SpinInterval};
use crate::sampler::{ids, UniformSource};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("inverse temperature must be positive and finite, got {0}")]
    NonpositiveBeta(f64),
    #[error("offset {offset:?} couples two sites of the same class")]
    IncompatiblePartition { offset: Point },
    #[error("partition axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("need at least one trial")]
    NoTrials,
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaReport {
    pub beta: f64,
    pub trials: usize,
    pub max_residual: f64,
}

/// Largest `|beta H(xi) - H(sqrt(beta) xi)|` over `trials` uniform
/// configurations of volume and shell.
pub fn beta_scaling_check(
    vh: &VolumeHamiltonian,
    interval: SpinInterval,
    beta: f64,
    trials: usize,
    seed: u64,
) -> Result<BetaReport, TransformError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(TransformError::NonpositiveBeta(beta));
    }
    let mut src = UniformSource::new(seed, ids::PROBES);
    let len = vh.n_sites() + vh.n_shell();
    let root = beta.sqrt();
    let mut max_residual: f64 = 0.0;
    for _ in 0..trials {
        let xi: Vec<f64> = (0..len)
            .map(|_| src.next_in(interval.lower(), interval.upper()))
            .collect();
        let scaled: Vec<f64> = xi.iter().map(|v| root * v).collect();
        let lhs = beta * vh.hamiltonian(&xi)?;
        let rhs = vh.hamiltonian(&scaled)?;
        max_residual = max_residual.max((lhs - rhs).abs());
    }
    Ok(BetaReport {
        beta,
        trials,
        max_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Class {
    One,
    Two,
}

/// Two-coloring of `Z^d`; class one holds the even sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BipartitePartition {
    /// Parity of the coordinate sum.
    SumParity,
    /// Parity of a single coordinate.
    AxisParity(usize),
}

impl BipartitePartition {
    pub fn class_of(&self, x: &[i64]) -> Class {
        let key = match *self {
            BipartitePartition::SumParity => x.iter().sum::<i64>(),
            BipartitePartition::AxisParity(axis) => x[axis],
        };
        if key.rem_euclid(2) == 0 {
            Class::One
        } else {
            Class::Two
        }
    }

    /// Every kernel offset must connect the two classes.
    pub fn check(&self, kernel: &InteractionKernel) -> Result<(), TransformError> {
        if let BipartitePartition::AxisParity(axis) = *self {
            if axis >= kernel.dim() {
                return Err(TransformError::AxisOutOfRange { axis, dim: kernel.dim() });
            }
        }
        let origin = vec![0; kernel.dim()];
        for (z, _) in kernel.iter() {
            if self.class_of(z) == self.class_of(&origin) {
                return Err(TransformError::IncompatiblePartition { offset: z.clone() });
            }
        }
        Ok(())
    }
}

/// `R eta`: class-two values become `a + b - eta(x)`, clamped into `[a, b]`.
pub fn reflect(
    values: &[f64],
    points: &[Point],
    partition: BipartitePartition,
    interval: SpinInterval,
) -> Result<Vec<f64>, TransformError> {
    if values.len() != points.len() {
        return Err(TransformError::LengthMismatch {
            expected: points.len(),
            found: values.len(),
        });
    }
    let sum = interval.lower() + interval.upper();
    Ok(values
        .iter()
        .zip(points)
        .map(|(&v, p)| match partition.class_of(p) {
            Class::One => v,
            Class::Two => interval.clamp(sum - v),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeMode {
    /// Every interior site is redrawn per trial.
    AllSites,
    /// Only class-one interior sites are redrawn; class two stays frozen.
    ClassOne,
}

#[derive(Debug, Clone, Serialize)]
pub struct AfProbeReport {
    pub mode: ProbeMode,
    pub trials: usize,
    /// `Delta` per trial.
    pub deltas: Vec<f64>,
    pub mean: f64,
    /// `max_i |Delta_i - mean|`.
    pub spread: f64,
}

/// Evaluate `Delta(eta) = H~(R(eta gamma)) - H(eta gamma)` for random
/// interior `eta` and fixed `gamma`. Nothing about the outcome is asserted.
pub fn af_specification_probe(
    vh: &VolumeHamiltonian,
    gamma: &[f64],
    interval: SpinInterval,
    partition: BipartitePartition,
    trials: usize,
    seed: u64,
    mode: ProbeMode,
) -> Result<AfProbeReport, TransformError> {
    partition.check(vh.kernel())?;
    if trials == 0 {
        return Err(TransformError::NoTrials);
    }
    if gamma.len() != vh.n_shell() {
        return Err(TransformError::LengthMismatch {
            expected: vh.n_shell(),
            found: gamma.len(),
        });
    }
    let points: Vec<Point> = vh.sites().iter().chain(vh.shell()).cloned().collect();
    let classes: Vec<Class> = vh.sites().iter().map(|p| partition.class_of(p)).collect();
    let mut src = UniformSource::new(seed, ids::PROBES);
    let (a, b) = (interval.lower(), interval.upper());
    let mut xi: Vec<f64> = (0..vh.n_sites()).map(|_| src.next_in(a, b)).collect();
    xi.extend_from_slice(gamma);
    let mut deltas = Vec::with_capacity(trials);
    for _ in 0..trials {
        for (v, class) in xi.iter_mut().zip(&classes) {
            if mode == ProbeMode::AllSites || *class == Class::One {
                *v = src.next_in(a, b);
            }
        }
        let reflected = reflect(&xi, &points, partition, interval)?;
        // H~ is linear in the couplings, so H~ = -H
        let delta = -vh.hamiltonian(&reflected)? - vh.hamiltonian(&xi)?;
        deltas.push(delta);
    }
    let mean = deltas.iter().sum::<f64>() / trials as f64;
    let spread = deltas.iter().map(|d| (d - mean).abs()).fold(0.0, f64::max);
    Ok(AfProbeReport {
        mode,
        trials,
        deltas,
        mean,
        spread,
    })
}
