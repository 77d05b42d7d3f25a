//! Heat-bath Gibbs dynamics for the truncated-Gaussian field.
//!
//! A site update replaces `eta(x)` by an inverse-CDF draw from
//! `N_{a,b}(eta_bar(x), 1)`. Because `eta_bar` is increasing in the field
//! and the quantile is increasing in its location, two chains fed the same
//! `(site, uniform)` stay pointwise ordered. [`GibbsSampler::run_sandwich`]
//! and [`GibbsSampler::cftp`] are built on that coupling.

pub mod stream;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::{InteractionKernel, KernelError, LatticeGeometry, NeighborTable, SpinInterval};
use crate::truncnorm::{TruncNormError, TruncatedNormal};

pub use stream::{ids, Slot, UniformSource, UpdateStream};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("the sampler needs a normalized kernel, got norm {0}")]
    UnnormalizedKernel(f64),
    #[error("site {site} is not in the interior volume of {n_interior} sites")]
    BoundarySite { site: usize, n_interior: usize },
    #[error("expected {expected} boundary values, got {found}")]
    BoundaryLength { expected: usize, found: usize },
    #[error("expected {expected} interior values, got {found}")]
    ValueLength { expected: usize, found: usize },
    #[error("value {value} at index {index} lies outside the spin interval")]
    ValueOutOfRange { index: usize, value: f64 },
    #[error("coupled chains lost their order at update {update}, site {site}: {lower} > {upper}")]
    OrderViolation { update: u64, site: usize, lower: f64, upper: f64 },
    #[error("no coalescence up to horizon {max_horizon} sweeps (final gap {gap})")]
    NoCoalescence { max_horizon: u64, gap: f64 },
    #[error("invalid run parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    TruncNorm(#[from] TruncNormError),
}

/// Spin values on the interior volume followed by the frozen shell values.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfiguration {
    values: Vec<f64>,
    n_interior: usize,
    interval: SpinInterval,
}

impl FieldConfiguration {
    pub fn new(
        interior: Vec<f64>,
        boundary: &[f64],
        interval: SpinInterval,
    ) -> Result<Self, SamplerError> {
        let n_interior = interior.len();
        let mut values = interior;
        values.extend_from_slice(boundary);
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !interval.contains(**v))
        {
            return Err(SamplerError::ValueOutOfRange { index, value });
        }
        Ok(Self {
            values,
            n_interior,
            interval,
        })
    }

    pub fn interval(&self) -> SpinInterval {
        self.interval
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn interior(&self) -> &[f64] {
        &self.values[..self.n_interior]
    }

    pub fn boundary(&self) -> &[f64] {
        &self.values[self.n_interior..]
    }

    /// Interior and shell values in the combined index order.
    pub fn combined(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// `max_x (other(x) - self(x))` over the interior.
    pub fn sup_gap(&self, other: &Self) -> f64 {
        self.interior()
            .iter()
            .zip(other.interior())
            .map(|(l, u)| u - l)
            .fold(0.0, f64::max)
    }

    pub fn mean_gap(&self, other: &Self) -> f64 {
        let total: f64 = self
            .interior()
            .iter()
            .zip(other.interior())
            .map(|(l, u)| u - l)
            .sum();
        total / self.n_interior as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRecord {
    pub sweep: usize,
    pub sup_gap: f64,
    pub mean_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapSnapshot {
    pub sweep: usize,
    pub gaps: Vec<f64>,
}

/// Gap history of a sandwich run; record `0` is the initial state.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichTrace {
    pub records: Vec<GapRecord>,
    pub snapshots: Vec<GapSnapshot>,
}

impl SandwichTrace {
    pub fn final_sup_gap(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.sup_gap)
    }

    /// First sweep at which the sup-gap is below `threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.sup_gap < threshold)
            .map(|r| r.sweep)
    }
}

#[derive(Debug, Clone)]
pub struct SandwichConfig {
    pub sweeps: usize,
    /// Per-site gap snapshots every this many sweeps; `0` disables them.
    pub snapshot_every: usize,
    pub seed: u64,
    /// Test hook: swap the two chains' values at the site touched by this
    /// update, which must be reported as an order violation.
    pub fault_at_update: Option<u64>,
}

impl SandwichConfig {
    pub fn new(sweeps: usize, seed: u64) -> Self {
        Self {
            sweeps,
            snapshot_every: 0,
            seed,
            fault_at_update: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CftpConfig {
    /// Horizon of the first attempt, in sweeps.
    pub initial_horizon: u64,
    /// Largest horizon tried before giving up, in sweeps.
    pub max_horizon: u64,
    /// Coalescence is declared when the sup-gap at time 0 is at most this.
    pub tolerance: f64,
}

impl Default for CftpConfig {
    fn default() -> Self {
        Self {
            initial_horizon: 1,
            max_horizon: 1 << 16,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CftpSample {
    /// The lower chain at time 0.
    pub values: Vec<f64>,
    /// Horizon in sweeps at which the chains coalesced.
    pub horizon: u64,
    /// Sup-gap between the chains at time 0.
    pub gap: f64,
}

/// Random-scan heat-bath sampler on a torus or a box with frozen shell.
#[derive(Debug, Clone)]
pub struct GibbsSampler {
    geometry: LatticeGeometry,
    table: NeighborTable,
    interval: SpinInterval,
}

impl GibbsSampler {
    pub fn new(
        kernel: &InteractionKernel,
        geometry: LatticeGeometry,
        interval: SpinInterval,
    ) -> Result<Self, SamplerError> {
        if !kernel.is_normalized() {
            return Err(SamplerError::UnnormalizedKernel(kernel.norm()));
        }
        let table = NeighborTable::new(kernel, &geometry)?;
        Ok(Self {
            geometry,
            table,
            interval,
        })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn table(&self) -> &NeighborTable {
        &self.table
    }

    pub fn interval(&self) -> SpinInterval {
        self.interval
    }

    pub fn n_sites(&self) -> usize {
        self.table.n_interior()
    }

    pub fn n_shell(&self) -> usize {
        self.table.n_shell()
    }

    pub fn field(&self, interior: Vec<f64>, boundary: &[f64]) -> Result<FieldConfiguration, SamplerError> {
        if interior.len() != self.n_sites() {
            return Err(SamplerError::ValueLength {
                expected: self.n_sites(),
                found: interior.len(),
            });
        }
        if boundary.len() != self.n_shell() {
            return Err(SamplerError::BoundaryLength {
                expected: self.n_shell(),
                found: boundary.len(),
            });
        }
        FieldConfiguration::new(interior, boundary, self.interval)
    }

    pub fn constant_field(&self, c: f64, boundary: &[f64]) -> Result<FieldConfiguration, SamplerError> {
        self.field(vec![c; self.n_sites()], boundary)
    }

    /// All interior spins at `a`.
    pub fn lower_extreme(&self, boundary: &[f64]) -> Result<FieldConfiguration, SamplerError> {
        self.constant_field(self.interval.lower(), boundary)
    }

    /// All interior spins at `b`.
    pub fn upper_extreme(&self, boundary: &[f64]) -> Result<FieldConfiguration, SamplerError> {
        self.constant_field(self.interval.upper(), boundary)
    }

    /// `eta_bar(x) = sum_y J(y - x) eta(y)`, clamped into `[a, b]`.
    pub fn local_mean(&self, field: &FieldConfiguration, x: usize) -> Result<f64, SamplerError> {
        self.check_site(x)?;
        Ok(self.local_mean_unchecked(field, x))
    }

    #[inline]
    fn local_mean_unchecked(&self, field: &FieldConfiguration, x: usize) -> f64 {
        let m: f64 = self
            .table
            .neighbors(x)
            .iter()
            .map(|nb| nb.weight * field.values[nb.index])
            .sum();
        self.interval.clamp(m)
    }

    fn check_site(&self, x: usize) -> Result<(), SamplerError> {
        if x >= self.n_sites() {
            return Err(SamplerError::BoundarySite {
                site: x,
                n_interior: self.n_sites(),
            });
        }
        Ok(())
    }

    #[inline]
    fn draw(&self, m: f64, u: f64) -> Result<f64, SamplerError> {
        Ok(TruncatedNormal::new(m, self.interval)?.sample(u)?)
    }

    /// Heat-bath update of site `x` driven by `u`; returns the new value.
    pub fn site_update(&self, field: &mut FieldConfiguration, x: usize, u: f64) -> Result<f64, SamplerError> {
        self.check_site(x)?;
        let v = self.draw(self.local_mean_unchecked(field, x), u)?;
        field.values[x] = v;
        Ok(v)
    }

    /// Apply the next `n_updates` slots of `stream`.
    pub fn sweep(
        &self,
        field: &mut FieldConfiguration,
        stream: &mut UpdateStream,
        n_updates: u64,
    ) -> Result<(), SamplerError> {
        for _ in 0..n_updates {
            let slot = stream.next_slot();
            self.site_update(field, slot.site, slot.uniform)?;
        }
        Ok(())
    }

    /// Update `x` in both chains with the same `u`. `update` only labels errors.
    pub fn coupled_update(
        &self,
        lower: &mut FieldConfiguration,
        upper: &mut FieldConfiguration,
        x: usize,
        u: f64,
        update: u64,
    ) -> Result<(), SamplerError> {
        self.check_site(x)?;
        let m_lo = self.local_mean_unchecked(lower, x);
        let m_hi = self.local_mean_unchecked(upper, x);
        let v_lo = self.draw(m_lo, u)?;
        let v_hi = if m_hi == m_lo { v_lo } else { self.draw(m_hi, u)? };
        lower.values[x] = v_lo;
        upper.values[x] = v_hi;
        if v_lo > v_hi {
            return Err(SamplerError::OrderViolation {
                update,
                site: x,
                lower: v_lo,
                upper: v_hi,
            });
        }
        Ok(())
    }

    /// Run the chains started at all-`a` and all-`b` through one stream.
    pub fn run_sandwich(&self, boundary: &[f64], config: &SandwichConfig) -> Result<SandwichTrace, SamplerError> {
        let mut lower = self.lower_extreme(boundary)?;
        let mut upper = self.upper_extreme(boundary)?;
        let n = self.n_sites();
        let mut stream = UpdateStream::new(config.seed, ids::DYNAMICS, n);
        let mut trace = SandwichTrace {
            records: Vec::with_capacity(config.sweeps + 1),
            snapshots: Vec::new(),
        };
        let mut record = |sweep: usize, lower: &FieldConfiguration, upper: &FieldConfiguration| {
            trace.records.push(GapRecord {
                sweep,
                sup_gap: lower.sup_gap(upper),
                mean_gap: lower.mean_gap(upper),
            });
            if config.snapshot_every > 0 && sweep.is_multiple_of(config.snapshot_every) {
                trace.snapshots.push(GapSnapshot {
                    sweep,
                    gaps: lower
                        .interior()
                        .iter()
                        .zip(upper.interior())
                        .map(|(l, u)| u - l)
                        .collect(),
                });
            }
        };
        record(0, &lower, &upper);
        for sweep in 1..=config.sweeps {
            for _ in 0..n {
                let update = stream.position();
                let slot = stream.next_slot();
                if config.fault_at_update == Some(update) {
                    let x = slot.site;
                    std::mem::swap(&mut lower.values[x], &mut upper.values[x]);
                    lower.values[x] = self.interval.upper();
                    upper.values[x] = self.interval.lower();
                    return Err(SamplerError::OrderViolation {
                        update,
                        site: x,
                        lower: lower.values[x],
                        upper: upper.values[x],
                    });
                }
                self.coupled_update(&mut lower, &mut upper, slot.site, slot.uniform, update)?;
            }
            record(sweep, &lower, &upper);
        }
        Ok(trace)
    }

    /// Monotone coupling from the past with a doubling horizon.
    ///
    /// The update at time `-(k + 1)` always uses slot `k` of `stream`, so a
    /// longer attempt extends the previous one further into the past.
    pub fn cftp(
        &self,
        boundary: &[f64],
        stream: &mut UpdateStream,
        config: &CftpConfig,
    ) -> Result<CftpSample, SamplerError> {
        if config.initial_horizon == 0 || config.max_horizon < config.initial_horizon {
            return Err(SamplerError::InvalidParameter("cftp horizons"));
        }
        if !(config.tolerance >= 0.0) {
            return Err(SamplerError::InvalidParameter("cftp tolerance"));
        }
        let n = self.n_sites() as u64;
        let mut horizon = config.initial_horizon;
        let mut gap = self.interval.width();
        while horizon <= config.max_horizon {
            let mut lower = self.lower_extreme(boundary)?;
            let mut upper = self.upper_extreme(boundary)?;
            let total = horizon * n;
            let mut merged = false;
            for k in (0..total).rev() {
                let slot = stream.slot(k);
                if merged {
                    self.site_update(&mut lower, slot.site, slot.uniform)?;
                } else {
                    self.coupled_update(&mut lower, &mut upper, slot.site, slot.uniform, total - 1 - k)?;
                    if k % n == 0 && lower.values == upper.values {
                        merged = true;
                    }
                }
            }
            gap = if merged { 0.0 } else { lower.sup_gap(&upper) };
            if gap <= config.tolerance {
                return Ok(CftpSample {
                    values: lower.interior().to_vec(),
                    horizon,
                    gap,
                });
            }
            horizon = horizon.saturating_mul(2);
        }
        Err(SamplerError::NoCoalescence {
            max_horizon: config.max_horizon,
            gap,
        })
    }

    /// `count` independent CFTP samples; replica `i` reads stream
    /// `ids::CFTP_BASE + i`, so the output does not depend on thread count.
    pub fn cftp_samples(
        &self,
        boundary: &[f64],
        seed: u64,
        count: usize,
        config: &CftpConfig,
    ) -> Result<Vec<CftpSample>, SamplerError> {
        let n = self.n_sites();
        (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let mut stream = UpdateStream::new(seed, ids::CFTP_BASE + i, n);
                self.cftp(boundary, &mut stream, config)
            })
            .collect()
    }

    /// Continuous-time dynamics with independent rate-1 clocks per site,
    /// run for `time` units. Returns the number of updates applied.
    pub fn evolve(
        &self,
        field: &mut FieldConfiguration,
        stream: &mut UpdateStream,
        time: f64,
    ) -> Result<u64, SamplerError> {
        if !(time >= 0.0) {
            return Err(SamplerError::InvalidParameter("evolve time"));
        }
        let rate = self.n_sites() as f64;
        let mut clock = 0.0;
        let mut events = 0;
        loop {
            let slot = stream.next_slot();
            clock += slot.holding / rate;
            if clock > time {
                return Ok(events);
            }
            self.site_update(field, slot.site, slot.uniform)?;
            events += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truncnorm::varphi;

    fn iv(a: f64, b: f64) -> SpinInterval {
        SpinInterval::new(a, b).unwrap()
    }

    fn torus_sampler(extent: usize, a: f64, b: f64) -> GibbsSampler {
        let kernel = InteractionKernel::nearest_neighbor(1).unwrap();
        GibbsSampler::new(&kernel, LatticeGeometry::torus(&[extent]).unwrap(), iv(a, b)).unwrap()
    }

    fn box_sampler(sites: &[i64]) -> GibbsSampler {
        let kernel = InteractionKernel::nearest_neighbor(1).unwrap();
        let geometry = LatticeGeometry::region(&kernel, sites.iter().map(|&s| vec![s])).unwrap();
        GibbsSampler::new(&kernel, geometry, iv(0.0, 1.0)).unwrap()
    }

    #[test]
    fn rejects_unnormalized_kernel() {
        let kernel = InteractionKernel::new(1, [(vec![1], 1.0)], false).unwrap();
        let err = GibbsSampler::new(&kernel, LatticeGeometry::torus(&[8]).unwrap(), iv(0.0, 1.0));
        assert!(matches!(err, Err(SamplerError::UnnormalizedKernel(_))));
    }

    #[test]
    fn local_mean_of_constant_and_alternating_fields() {
        let s = torus_sampler(8, 0.0, 1.0);
        let c = s.constant_field(0.3, &[]).unwrap();
        for x in 0..8 {
            assert_eq!(s.local_mean(&c, x).unwrap(), 0.3);
        }
        let alt = s.field((0..8).map(|i| (i % 2) as f64).collect(), &[]).unwrap();
        for x in 0..8 {
            assert_eq!(s.local_mean(&alt, x).unwrap(), 1.0 - alt.value(x));
        }
        assert!(matches!(
            s.local_mean(&c, 8),
            Err(SamplerError::BoundarySite { site: 8, .. })
        ));
    }

    #[test]
    fn box_local_mean_reads_the_frozen_shell() {
        let s = box_sampler(&[0, 1]);
        // shell is [-1, 2]
        let f = s.field(vec![0.5, 0.5], &[0.0, 1.0]).unwrap();
        assert_eq!(s.local_mean(&f, 0).unwrap(), 0.25);
        assert_eq!(s.local_mean(&f, 1).unwrap(), 0.75);
        assert!(matches!(s.local_mean(&f, 2), Err(SamplerError::BoundarySite { .. })));
    }

    #[test]
    fn field_rejects_out_of_range_and_bad_lengths() {
        let s = box_sampler(&[0, 1]);
        assert!(matches!(
            s.field(vec![0.5, 1.5], &[0.0, 0.0]),
            Err(SamplerError::ValueOutOfRange { index: 1, .. })
        ));
        assert!(matches!(
            s.field(vec![0.5, 0.5], &[0.0]),
            Err(SamplerError::BoundaryLength { expected: 2, found: 1 })
        ));
        assert!(matches!(s.field(vec![0.5], &[0.0, 0.0]), Err(SamplerError::ValueLength { .. })));
    }

    #[test]
    fn median_update_on_symmetric_interval() {
        let s = torus_sampler(8, -1.0, 1.0);
        let mut f = s.constant_field(0.0, &[]).unwrap();
        let v = s.site_update(&mut f, 3, 0.5).unwrap();
        assert!(v.abs() <= 2.0f64.powi(-52));
        assert_eq!(f.value(2), 0.0);
    }

    #[test]
    fn zero_updates_leave_the_field_alone() {
        let s = torus_sampler(8, 0.0, 1.0);
        let mut f = s.constant_field(0.25, &[]).unwrap();
        let before = f.clone();
        s.sweep(&mut f, &mut UpdateStream::new(1, 0, 8), 0).unwrap();
        assert_eq!(f, before);
    }

    #[test]
    fn sweeps_are_deterministic_and_in_range() {
        let s = torus_sampler(16, 0.0, 1.0);
        let run = || {
            let mut f = s.upper_extreme(&[]).unwrap();
            s.sweep(&mut f, &mut UpdateStream::new(42, 0, 16), 2000).unwrap();
            f
        };
        let (f1, f2) = (run(), run());
        assert_eq!(f1, f2);
        assert!(f1.interior().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn frozen_neighborhood_update_mean() {
        let s = box_sampler(&[0]);
        let boundary = [0.2, 0.9];
        let m = 0.55;
        let target = m - varphi(m, iv(0.0, 1.0)).unwrap();
        let mut f = s.field(vec![0.5], &boundary).unwrap();
        let mut stream = UpdateStream::new(5, 0, 1);
        let n = 100_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let slot = stream.next_slot();
            let v = s.site_update(&mut f, 0, slot.uniform).unwrap();
            sum += v;
            sq += v * v;
        }
        let mean = sum / n as f64;
        let se = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - target).abs() < 3.0 * se, "{mean} vs {target} (se {se})");
    }

    #[test]
    fn sandwich_starts_at_full_width_and_stays_ordered() {
        let s = torus_sampler(32, 0.0, 1.0);
        let mut cfg = SandwichConfig::new(50, 7);
        cfg.snapshot_every = 10;
        let trace = s.run_sandwich(&[], &cfg).unwrap();
        assert_eq!(trace.records.len(), 51);
        assert_eq!(trace.records[0].sup_gap, 1.0);
        assert_eq!(trace.records[0].mean_gap, 1.0);
        assert!(trace.records.iter().all(|r| r.sup_gap >= 0.0 && r.mean_gap <= r.sup_gap));
        assert_eq!(trace.snapshots.len(), 6);
        assert!(trace.snapshots.iter().all(|s| s.gaps.iter().all(|g| *g >= 0.0)));
    }

    #[test]
    fn fault_injection_is_reported() {
        let s = torus_sampler(8, 0.0, 1.0);
        let mut cfg = SandwichConfig::new(5, 1);
        cfg.fault_at_update = Some(10);
        assert!(matches!(
            s.run_sandwich(&[], &cfg),
            Err(SamplerError::OrderViolation { update: 10, .. })
        ));
    }

    #[test]
    fn coupled_updates_preserve_order_from_random_pairs() {
        let s = torus_sampler(12, -0.5, 2.0);
        let mut src = UniformSource::new(3, ids::PROBES);
        let mut lower = s.constant_field(-0.5, &[]).unwrap();
        let mut upper = s.constant_field(-0.5, &[]).unwrap();
        for x in 0..12 {
            let lo = src.next_in(-0.5, 2.0);
            let hi = src.next_in(lo, 2.0);
            lower.values[x] = lo;
            upper.values[x] = hi;
        }
        let mut stream = UpdateStream::new(3, 0, 12);
        for k in 0..5000 {
            let slot = stream.next_slot();
            s.coupled_update(&mut lower, &mut upper, slot.site, slot.uniform, k).unwrap();
        }
        assert!(lower.interior().iter().zip(upper.interior()).all(|(l, u)| l <= u));
    }

    #[test]
    fn singleton_cftp_coalesces_in_one_sweep() {
        let s = box_sampler(&[0]);
        let mut stream = UpdateStream::new(1, ids::CFTP_BASE, 1);
        let sample = s.cftp(&[0.2, 0.9], &mut stream, &CftpConfig::default()).unwrap();
        assert_eq!(sample.horizon, 1);
        assert_eq!(sample.gap, 0.0);
        let direct = TruncatedNormal::new(0.55, iv(0.0, 1.0))
            .unwrap()
            .sample(stream.slot(0).uniform)
            .unwrap();
        assert_eq!(sample.values, vec![direct]);
    }

    #[test]
    fn cftp_reuses_slots_and_reports_cap() {
        let s = box_sampler(&[0, 1, 2]);
        let cfg = CftpConfig::default();
        let mut s1 = UpdateStream::new(9, ids::CFTP_BASE, 3);
        let mut s2 = UpdateStream::new(9, ids::CFTP_BASE, 3);
        let a = s.cftp(&[0.0, 1.0], &mut s1, &cfg).unwrap();
        let b = s.cftp(&[0.0, 1.0], &mut s2, &cfg).unwrap();
        assert_eq!(a.values, b.values);
        assert!(a.gap <= 1e-9);
        let tight = CftpConfig {
            initial_horizon: 1,
            max_horizon: 1,
            tolerance: 0.0,
        };
        let mut s3 = UpdateStream::new(9, ids::CFTP_BASE, 3);
        assert!(matches!(
            s.cftp(&[0.0, 1.0], &mut s3, &tight),
            Err(SamplerError::NoCoalescence { max_horizon: 1, .. })
        ));
    }

    #[test]
    fn parallel_cftp_matches_serial() {
        let s = box_sampler(&[0, 1]);
        let cfg = CftpConfig::default();
        let par = s.cftp_samples(&[0.0, 1.0], 17, 20, &cfg).unwrap();
        for (i, sample) in par.iter().enumerate() {
            let mut stream = UpdateStream::new(17, ids::CFTP_BASE + i as u64, 2);
            assert_eq!(s.cftp(&[0.0, 1.0], &mut stream, &cfg).unwrap().values, sample.values);
        }
    }

    #[test]
    fn continuous_time_event_count() {
        let s = torus_sampler(10, 0.0, 1.0);
        let mut f = s.constant_field(0.5, &[]).unwrap();
        let mut stream = UpdateStream::new(2, 0, 10);
        let t = 500.0;
        let events = s.evolve(&mut f, &mut stream, t).unwrap();
        // Poisson(n t) with n t = 5000
        assert!((events as f64 - 5000.0).abs() < 5.0 * 5000f64.sqrt());
    }
}
