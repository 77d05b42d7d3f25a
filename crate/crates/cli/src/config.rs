//! Experiment configuration: TOML in, validated and fully resolved out.
//!
//! Every optional field has a default, and the resolved value (defaults
//! filled in) is embedded in each JSON artifact.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use truncfield::kernel::{InteractionKernel, LatticeGeometry, Point, SpinInterval};
use truncfield::diagnostics::Start;
use truncfield::transforms::{BipartitePartition, ProbeMode};

#[derive(Debug, Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

fn invalid(path: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError {
        path: path.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub kernel: KernelConfig,
    pub interval: IntervalConfig,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub sandwich: SandwichSection,
    #[serde(default)]
    pub cftp: CftpSection,
    #[serde(default)]
    pub ident4: Ident4Section,
    #[serde(default)]
    pub spec_check: SpecCheckSection,
    #[serde(default)]
    pub beta_check: BetaSection,
    #[serde(default)]
    pub af_probe: AfProbeSection,
    #[serde(default)]
    pub oracle: OracleSection,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Nn,
    ExpDecay,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OffsetWeight {
    pub offset: Vec<i64>,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    /// `exp-decay`: `J(z) ~ rate^{|z|_1}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// `exp-decay`: largest `|z|_1` kept.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offsets: Vec<OffsetWeight>,
    #[serde(default = "yes")]
    pub normalize: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntervalConfig {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKindConfig {
    Torus,
    Box,
    Region,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: GeometryKindConfig,
    /// `torus` and `box`: side lengths; a box is `[0, L_1) x ... x [0, L_d)`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extents: Vec<usize>,
    /// `region`: explicit volume sites.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sites: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SiteValue {
    pub site: Vec<i64>,
    pub value: f64,
}

/// Shell values: listed sites take their value, all others `default`
/// (the interval midpoint when unset).
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<SiteValue>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SandwichSection {
    pub sweeps: usize,
    pub snapshot_every: usize,
    /// When set, the final sup-gap must be below it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Test hook forcing an order violation at this update.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault_at_update: Option<u64>,
}

impl Default for SandwichSection {
    fn default() -> Self {
        Self {
            sweeps: 500,
            snapshot_every: 0,
            threshold: None,
            fault_at_update: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CftpSection {
    pub samples: usize,
    pub initial_horizon: u64,
    pub max_horizon: u64,
    pub tolerance: f64,
    /// Points of the closed-form CDF grid used for the KS distance.
    pub ks_grid: usize,
    /// KS distances above this fail.
    pub ks_threshold: f64,
    /// Simpson subintervals of the quadrature oracle.
    pub n_q: usize,
}

impl Default for CftpSection {
    fn default() -> Self {
        Self {
            samples: 10_000,
            initial_horizon: 1,
            max_horizon: 1 << 16,
            tolerance: 1e-9,
            ks_grid: 2049,
            ks_threshold: 0.02,
            n_q: 256,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Ident4Section {
    pub burn_in: usize,
    pub sweeps: usize,
    pub batches: usize,
    /// Updates between records; `0` records once per sweep.
    pub record_every: usize,
    pub start: Start,
}

impl Default for Ident4Section {
    fn default() -> Self {
        Self {
            burn_in: 1000,
            sweeps: 10_000,
            batches: 32,
            record_every: 0,
            start: Start::Upper,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SpecCheckSection {
    pub trials: usize,
}

impl Default for SpecCheckSection {
    fn default() -> Self {
        Self { trials: 100 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BetaSection {
    pub betas: Vec<f64>,
    pub trials: usize,
}

impl Default for BetaSection {
    fn default() -> Self {
        Self {
            betas: vec![0.25, 1.0, 2.5, 10.0],
            trials: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionKind {
    SumParity,
    AxisParity,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AfProbeSection {
    pub trials: usize,
    pub partition: PartitionKind,
    pub axis: usize,
    pub mode: ProbeMode,
}

impl Default for AfProbeSection {
    fn default() -> Self {
        Self {
            trials: 100,
            partition: PartitionKind::SumParity,
            axis: 0,
            mode: ProbeMode::AllSites,
        }
    }
}

impl AfProbeSection {
    pub fn partition(&self) -> BipartitePartition {
        match self.partition {
            PartitionKind::SumParity => BipartitePartition::SumParity,
            PartitionKind::AxisParity => BipartitePartition::AxisParity(self.axis),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub n_q: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self { n_q: 256 }
    }
}

/// Objects built from a validated configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub kernel: InteractionKernel,
    pub interval: SpinInterval,
    pub geometry: LatticeGeometry,
    /// One value per shell site, in shell order.
    pub boundary: Vec<f64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let path = e.span().map_or_else(|| "config".to_string(), |s| locate(text, s.start));
            invalid(path, e.message())
        })
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let kernel = self.build_kernel()?;
        let interval =
            SpinInterval::new(self.interval.a, self.interval.b).map_err(|e| invalid("interval", e))?;
        let geometry = self.build_geometry(&kernel)?;
        let boundary = self.build_boundary(&geometry, interval)?;
        self.check_sections()?;
        Ok(Resolved {
            config: self.clone(),
            kernel,
            interval,
            geometry,
            boundary,
        })
    }

    fn build_kernel(&self) -> Result<InteractionKernel, ConfigError> {
        let k = &self.kernel;
        if k.dim == 0 {
            return Err(invalid("kernel.dim", "must be positive"));
        }
        let kernel = match (k.preset, k.offsets.is_empty()) {
            (Some(_), false) => return Err(invalid("kernel", "give either `preset` or `offsets`, not both")),
            (None, true) => return Err(invalid("kernel", "one of `preset` or `offsets` is required")),
            (Some(Preset::Nn), true) => {
                if k.rate.is_some() || k.range.is_some() {
                    return Err(invalid("kernel", "`rate` and `range` apply to the exp-decay preset only"));
                }
                InteractionKernel::nearest_neighbor(k.dim).map_err(|e| invalid("kernel", e))?
            }
            (Some(Preset::ExpDecay), true) => {
                let rate = k.rate.ok_or_else(|| invalid("kernel.rate", "required by exp-decay"))?;
                let range = k.range.ok_or_else(|| invalid("kernel.range", "required by exp-decay"))?;
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(invalid("kernel.rate", "must be positive and finite"));
                }
                if range == 0 {
                    return Err(invalid("kernel.range", "must be positive"));
                }
                InteractionKernel::exp_decay(k.dim, rate, range).map_err(|e| invalid("kernel", e))?
            }
            (None, false) => {
                for (i, ow) in k.offsets.iter().enumerate() {
                    if ow.offset.len() != k.dim {
                        return Err(invalid(format!("kernel.offsets[{i}].offset"), format!("needs {} coordinates", k.dim)));
                    }
                    if !(ow.weight >= 0.0 && ow.weight.is_finite()) {
                        return Err(invalid(format!("kernel.offsets[{i}].weight"), "must be finite and non-negative"));
                    }
                }
                let raw = k.offsets.iter().map(|ow| (ow.offset.clone(), ow.weight));
                InteractionKernel::new(k.dim, raw, k.normalize).map_err(|e| invalid("kernel.offsets", e))?
            }
        };
        Ok(kernel)
    }

    fn build_geometry(&self, kernel: &InteractionKernel) -> Result<LatticeGeometry, ConfigError> {
        let g = &self.geometry;
        match g.kind {
            GeometryKindConfig::Torus | GeometryKindConfig::Box => {
                if !g.sites.is_empty() {
                    return Err(invalid("geometry.sites", "only used with kind = \"region\""));
                }
                if g.extents.len() != kernel.dim() {
                    return Err(invalid("geometry.extents", format!("needs {} entries", kernel.dim())));
                }
                if g.extents.contains(&0) {
                    return Err(invalid("geometry.extents", "must be positive"));
                }
                let geometry = if g.kind == GeometryKindConfig::Torus {
                    LatticeGeometry::torus(&g.extents)
                } else {
                    LatticeGeometry::block(kernel, &g.extents)
                }
                .map_err(|e| invalid("geometry", e))?;
                if g.kind == GeometryKindConfig::Torus {
                    truncfield::kernel::NeighborTable::new(kernel, &geometry).map_err(|e| invalid("geometry.extents", e))?;
                }
                Ok(geometry)
            }
            GeometryKindConfig::Region => {
                if !g.extents.is_empty() {
                    return Err(invalid("geometry.extents", "not used with kind = \"region\""));
                }
                if g.sites.is_empty() {
                    return Err(invalid("geometry.sites", "region needs at least one site"));
                }
                for (i, s) in g.sites.iter().enumerate() {
                    if s.len() != kernel.dim() {
                        return Err(invalid(format!("geometry.sites[{i}]"), format!("needs {} coordinates", kernel.dim())));
                    }
                }
                LatticeGeometry::region(kernel, g.sites.iter().cloned()).map_err(|e| invalid("geometry.sites", e))
            }
        }
    }

    fn build_boundary(&self, geometry: &LatticeGeometry, interval: SpinInterval) -> Result<Vec<f64>, ConfigError> {
        let b = &self.boundary;
        let default = b.default.unwrap_or(interval.midpoint());
        if !interval.contains(default) {
            return Err(invalid("boundary.default", "must lie in [a, b]"));
        }
        let shell: BTreeMap<&Point, usize> = geometry.shell().iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut values = vec![default; geometry.shell().len()];
        for (i, sv) in b.values.iter().enumerate() {
            let idx = shell
                .get(&sv.site)
                .ok_or_else(|| invalid(format!("boundary.values[{i}].site"), format!("{:?} is not a shell site", sv.site)))?;
            if !interval.contains(sv.value) {
                return Err(invalid(format!("boundary.values[{i}].value"), "must lie in [a, b]"));
            }
            values[*idx] = sv.value;
        }
        Ok(values)
    }

    fn check_sections(&self) -> Result<(), ConfigError> {
        let s = &self.sandwich;
        if s.sweeps == 0 {
            return Err(invalid("sandwich.sweeps", "must be positive"));
        }
        if let Some(t) = s.threshold {
            if !(t > 0.0) {
                return Err(invalid("sandwich.threshold", "must be positive"));
            }
        }
        let c = &self.cftp;
        if c.samples == 0 {
            return Err(invalid("cftp.samples", "must be positive"));
        }
        if c.initial_horizon == 0 {
            return Err(invalid("cftp.initial_horizon", "must be positive"));
        }
        if c.max_horizon < c.initial_horizon {
            return Err(invalid("cftp.max_horizon", "must be at least initial_horizon"));
        }
        if !(c.tolerance >= 0.0 && c.tolerance.is_finite()) {
            return Err(invalid("cftp.tolerance", "must be finite and non-negative"));
        }
        if c.ks_grid < 2 {
            return Err(invalid("cftp.ks_grid", "needs at least two points"));
        }
        if c.n_q < 64 || !c.n_q.is_multiple_of(2) {
            return Err(invalid("cftp.n_q", "must be even and at least 64"));
        }
        let d = &self.ident4;
        if d.batches < 2 {
            return Err(invalid("ident4.batches", "need at least two batches"));
        }
        if self.spec_check.trials == 0 {
            return Err(invalid("spec_check.trials", "must be positive"));
        }
        for (i, beta) in self.beta_check.betas.iter().enumerate() {
            if !(*beta > 0.0 && beta.is_finite()) {
                return Err(invalid(format!("beta_check.betas[{i}]"), "must be positive and finite"));
            }
        }
        if self.beta_check.betas.is_empty() {
            return Err(invalid("beta_check.betas", "needs at least one value"));
        }
        if self.af_probe.trials == 0 {
            return Err(invalid("af_probe.trials", "must be positive"));
        }
        if self.oracle.n_q < 64 || !self.oracle.n_q.is_multiple_of(2) {
            return Err(invalid("oracle.n_q", "must be even and at least 64"));
        }
        Ok(())
    }
}

/// Dotted path of the TOML table and key enclosing byte offset `pos`.
fn locate(text: &str, pos: usize) -> String {
    let mut table = String::new();
    let mut key = String::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if offset > pos {
            break;
        }
        let t = line.trim();
        if t.starts_with('[') {
            table = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            key.clear();
        } else if let Some((k, _)) = t.split_once('=') {
            key = k.trim().to_string();
        }
        offset += line.len();
    }
    match (table.is_empty(), key.is_empty()) {
        (true, true) => "config".to_string(),
        (true, false) => key,
        (false, true) => table,
        (false, false) => format!("{table}.{key}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
seed = 7
[kernel]
dim = 1
preset = "nn"
[interval]
a = 0.0
b = 1.0
[geometry]
kind = "torus"
extents = [32]
"#;

    fn err_path(text: &str) -> String {
        match ExperimentConfig::from_toml(text).and_then(|c| c.resolve().map(|_| ())) {
            Err(e) => e.path,
            Ok(()) => panic!("config accepted"),
        }
    }

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_toml(BASE).unwrap();
        assert_eq!(c.sandwich.sweeps, 500);
        assert_eq!(c.cftp.tolerance, 1e-9);
        assert_eq!(c.ident4.batches, 32);
        let r = c.resolve().unwrap();
        assert_eq!(r.geometry.n_sites(), 32);
        assert!(r.boundary.is_empty());
    }

    #[test]
    fn boundary_defaults_and_overrides() {
        let text = BASE.replace("kind = \"torus\"\nextents = [32]", "kind = \"box\"\nextents = [2]")
            + "[boundary]\ndefault = 0.25\nvalues = [{ site = [2], value = 1.0 }]\n";
        let r = ExperimentConfig::from_toml(&text).unwrap().resolve().unwrap();
        assert_eq!(r.geometry.shell(), &[vec![-1], vec![2]]);
        assert_eq!(r.boundary, vec![0.25, 1.0]);
    }

    #[test]
    fn field_paths_in_errors() {
        assert_eq!(err_path(&BASE.replace("b = 1.0", "b = -1.0")), "interval");
        assert_eq!(err_path(&BASE.replace("extents = [32]", "extents = [2]")), "geometry.extents");
        assert_eq!(err_path(&(BASE.to_string() + "[cftp]\nn_q = 63\n")), "cftp.n_q");
        assert_eq!(err_path(&(BASE.to_string() + "[beta_check]\nbetas = [1.0, -2.0]\n")), "beta_check.betas[1]");
        assert_eq!(err_path(&(BASE.to_string() + "[sandwich]\nsweep = 3\n")), "sandwich.sweep");
        assert_eq!(err_path(&BASE.replace("preset = \"nn\"", "preset = \"square\"")), "kernel.preset");
        let boxed = BASE.replace("kind = \"torus\"\nextents = [32]", "kind = \"box\"\nextents = [2]");
        assert_eq!(
            err_path(&(boxed + "[boundary]\nvalues = [{ site = [5], value = 0.0 }]\n")),
            "boundary.values[0].site"
        );
    }

    #[test]
    fn explicit_offsets() {
        let text = BASE.replace(
            "preset = \"nn\"",
            "offsets = [{ offset = [1], weight = 3.0 }, { offset = [2], weight = 1.0 }]",
        );
        let r = ExperimentConfig::from_toml(&text).unwrap().resolve().unwrap();
        assert_eq!(r.kernel.weight(&[1]), 0.375);
        assert_eq!(r.kernel.weight(&[-2]), 0.125);
    }

    #[test]
    fn round_trips_through_serialization() {
        let c = ExperimentConfig::from_toml(BASE).unwrap();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    }
}
