//! Bounded-spin Gaussian lattice fields on `[a, b]^Λ`.
//!
//! The single-site conditional law of the field is the truncated normal
//! `N_{a,b}(eta_bar(x), 1)` with `eta_bar` the kernel average of the
//! neighbors. The crate provides the scalar mathematics ([`truncnorm`]),
//! kernels and lattices ([`kernel`]), exact finite-volume Gaussian
//! quantities ([`finite_spec`]), monotone heat-bath dynamics with sandwich
//! runs and coupling from the past ([`sampler`]), oracles and verdicts
//! ([`diagnostics`]) and the rescaling/reflection checks ([`transforms`]).

pub mod diagnostics;
pub mod finite_spec;
pub mod kernel;
pub mod sampler;
pub mod transforms;
pub mod truncnorm;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Kernel(#[from] kernel::KernelError),
    #[error(transparent)]
    TruncNorm(#[from] truncnorm::TruncNormError),
    #[error(transparent)]
    Spec(#[from] finite_spec::SpecError),
    #[error(transparent)]
    Sampler(#[from] sampler::SamplerError),
    #[error(transparent)]
    Diagnostics(#[from] diagnostics::DiagnosticsError),
    #[error(transparent)]
    Transform(#[from] transforms::TransformError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
