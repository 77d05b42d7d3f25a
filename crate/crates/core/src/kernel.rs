//! Interaction kernels `J` on lattice offsets and the finite geometries
//! (periodic torus, finite region with an exterior shell) that stand in for
//! the infinite lattice.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

/// A lattice point or offset in `Z^d`.
pub type Point = Vec<i64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("offset {offset:?} has dimension {found}, kernel dimension is {expected}")]
    DimensionMismatch {
        offset: Point,
        expected: usize,
        found: usize,
    },
    #[error("negative weight {weight} at offset {offset:?}")]
    NegativeWeight { offset: Point, weight: f64 },
    #[error("non-finite weight at offset {0:?}")]
    NonFiniteWeight(Point),
    #[error("kernel weights J({offset:?}) = {forward} and J(-z) = {backward} differ")]
    AsymmetricKernel {
        offset: Point,
        forward: f64,
        backward: f64,
    },
    #[error("offset {0:?} listed twice with different weights")]
    DuplicateOffset(Point),
    #[error("kernel has zero total weight")]
    EmptyKernel,
    #[error("the zero offset may not carry a weight")]
    ZeroOffsetPresent,
    #[error("invalid spin interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("torus extent {extent} on axis {axis} must exceed twice the kernel range {range}")]
    GeometryTooSmall { axis: usize, extent: usize, range: i64 },
    #[error("torus extents must be positive")]
    EmptyExtent,
    #[error("site {site:?} needs neighbor {neighbor:?}, which is neither interior nor in the shell")]
    MissingShellSite { site: Point, neighbor: Point },
    #[error("kernel dimension {kernel} does not match geometry dimension {geometry}")]
    GeometryDimension { kernel: usize, geometry: usize },
}

/// Closed spin range `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinInterval {
    a: f64,
    b: f64,
}

impl SpinInterval {
    pub fn new(a: f64, b: f64) -> Result<Self, KernelError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(KernelError::InvalidInterval { a, b });
        }
        Ok(Self { a, b })
    }

    #[inline]
    pub fn lower(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn upper(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// `(a + b) / 2`, the center of odd symmetry of the mean shift.
    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    #[inline]
    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.a, self.b)
    }
}

/// Finite-range, symmetric, non-negative coupling `J` on `Z^d`.
///
/// Only offsets with `J(z) > 0` are stored; the zero offset never is.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionKernel {
    dim: usize,
    weights: BTreeMap<Point, f64>,
    norm: f64,
}

fn negate(z: &[i64]) -> Point {
    z.iter().map(|c| -c).collect()
}

impl InteractionKernel {
    /// Builds a kernel from raw `(offset, weight)` pairs.
    ///
    /// Zero weights are dropped and a missing mirror `-z` is filled in with
    /// `J(z)`. With `normalize`, every weight is divided by the total so that
    /// `sum_z J(z) = 1`.
    pub fn new<I>(dim: usize, raw: I, normalize: bool) -> Result<Self, KernelError>
    where
        I: IntoIterator<Item = (Point, f64)>,
    {
        if dim == 0 {
            return Err(KernelError::ZeroDimension);
        }
        let mut given: BTreeMap<Point, f64> = BTreeMap::new();
        for (offset, weight) in raw {
            if offset.len() != dim {
                return Err(KernelError::DimensionMismatch {
                    expected: dim,
                    found: offset.len(),
                    offset,
                });
            }
            if offset.iter().all(|&c| c == 0) {
                return Err(KernelError::ZeroOffsetPresent);
            }
            if !weight.is_finite() {
                return Err(KernelError::NonFiniteWeight(offset));
            }
            if weight < 0.0 {
                return Err(KernelError::NegativeWeight { offset, weight });
            }
            if let Some(&prev) = given.get(&offset) {
                if prev != weight {
                    return Err(KernelError::DuplicateOffset(offset));
                }
            }
            given.insert(offset, weight);
        }

        let mut weights = BTreeMap::new();
        for (offset, &weight) in &given {
            let mirror = negate(offset);
            let mirrored = given.get(&mirror).copied();
            if let Some(back) = mirrored {
                if back != weight {
                    return Err(KernelError::AsymmetricKernel {
                        offset: offset.clone(),
                        forward: weight,
                        backward: back,
                    });
                }
            }
            if weight > 0.0 {
                weights.insert(offset.clone(), weight);
                weights.insert(mirror, weight);
            }
        }

        let total: f64 = weights.values().sum();
        if weights.is_empty() || total <= 0.0 {
            return Err(KernelError::EmptyKernel);
        }
        if normalize {
            for w in weights.values_mut() {
                *w /= total;
            }
        }
        let norm = weights.values().sum();
        Ok(Self { dim, weights, norm })
    }

    /// Nearest-neighbor kernel, `J = 1/(2d)` on the `2d` unit offsets.
    pub fn nearest_neighbor(dim: usize) -> Result<Self, KernelError> {
        let raw = (0..dim).flat_map(|axis| {
            [1, -1].into_iter().map(move |sign| {
                let mut z = vec![0; dim];
                z[axis] = sign;
                (z, 1.0)
            })
        });
        Self::new(dim, raw, true)
    }

    /// `J(z)` proportional to `rate^{|z|_1}` for `0 < |z|_1 <= range`, normalized.
    pub fn exp_decay(dim: usize, rate: f64, range: u32) -> Result<Self, KernelError> {
        if dim == 0 {
            return Err(KernelError::ZeroDimension);
        }
        let r = range as i64;
        let mut raw = Vec::new();
        let mut z = vec![-r; dim];
        loop {
            let l1: i64 = z.iter().map(|c| c.abs()).sum();
            if l1 > 0 && l1 <= r {
                raw.push((z.clone(), rate.powi(l1 as i32)));
            }
            // odometer over [-r, r]^d
            let mut axis = 0;
            loop {
                if axis == dim {
                    return Self::new(dim, raw, true);
                }
                if z[axis] < r {
                    z[axis] += 1;
                    break;
                }
                z[axis] = -r;
                axis += 1;
            }
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `||J|| = sum_z J(z)`.
    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm - 1.0).abs() <= 1e-12
    }

    /// `J(z)`, zero for offsets outside the support.
    pub fn weight(&self, offset: &[i64]) -> f64 {
        self.weights.get(offset).copied().unwrap_or(0.0)
    }

    /// Support offsets with their weights, in lexicographic offset order.
    pub fn iter(&self) -> impl Iterator<Item = (&Point, f64)> + '_ {
        self.weights.iter().map(|(z, &w)| (z, w))
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Largest `|z_i|` over the support, per axis.
    pub fn range(&self) -> Vec<i64> {
        let mut r = vec![0; self.dim];
        for z in self.weights.keys() {
            for (ri, &c) in r.iter_mut().zip(z) {
                *ri = (*ri).max(c.abs());
            }
        }
        r
    }

    /// Kernel with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        let weights: BTreeMap<Point, f64> =
            self.weights.iter().map(|(z, &w)| (z.clone(), w * factor)).collect();
        let norm = weights.values().sum();
        Self {
            dim: self.dim,
            weights,
            norm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Torus,
    Box,
}

/// A finite set of sites on which a field lives.
///
/// For a torus every site is interior and offsets wrap. For a box the
/// interior `sites` form the volume and `shell` lists every exterior site
/// reachable by one kernel offset; shell values are frozen boundary data.
#[derive(Debug, Clone)]
pub struct LatticeGeometry {
    dim: usize,
    kind: GeometryKind,
    extents: Vec<usize>,
    sites: Vec<Point>,
    shell: Vec<Point>,
    index: HashMap<Point, usize>,
}

impl LatticeGeometry {
    /// Periodic box `Z_{L_1} x ... x Z_{L_d}`, sites in row-major order.
    pub fn torus(extents: &[usize]) -> Result<Self, KernelError> {
        if extents.is_empty() {
            return Err(KernelError::ZeroDimension);
        }
        if extents.contains(&0) {
            return Err(KernelError::EmptyExtent);
        }
        let sites = grid_points(extents, &vec![0; extents.len()]);
        let index = sites.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(Self {
            dim: extents.len(),
            kind: GeometryKind::Torus,
            extents: extents.to_vec(),
            sites,
            shell: Vec::new(),
            index,
        })
    }

    /// Arbitrary finite volume with the exterior shell induced by `kernel`.
    ///
    /// Sites are sorted lexicographically and deduplicated; the shell is
    /// `{x + z : x in volume, J(z) > 0} \ volume`, also sorted.
    pub fn region<I>(kernel: &InteractionKernel, sites: I) -> Result<Self, KernelError>
    where
        I: IntoIterator<Item = Point>,
    {
        let dim = kernel.dim();
        let volume: BTreeSet<Point> = sites.into_iter().collect();
        if let Some(p) = volume.iter().find(|p| p.len() != dim) {
            return Err(KernelError::DimensionMismatch {
                offset: p.clone(),
                expected: dim,
                found: p.len(),
            });
        }
        let mut shell = BTreeSet::new();
        for x in &volume {
            for (z, _) in kernel.iter() {
                let y: Point = x.iter().zip(z).map(|(a, b)| a + b).collect();
                if !volume.contains(&y) {
                    shell.insert(y);
                }
            }
        }
        let sites: Vec<Point> = volume.into_iter().collect();
        let shell: Vec<Point> = shell.into_iter().collect();
        let index = sites
            .iter()
            .chain(shell.iter())
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let extents = bounding_extents(&sites, dim);
        Ok(Self {
            dim,
            kind: GeometryKind::Box,
            extents,
            sites,
            shell,
            index,
        })
    }

    /// The rectangular volume `[0, L_1) x ... x [0, L_d)` with its shell.
    pub fn block(kernel: &InteractionKernel, extents: &[usize]) -> Result<Self, KernelError> {
        if extents.len() != kernel.dim() {
            return Err(KernelError::GeometryDimension {
                kernel: kernel.dim(),
                geometry: extents.len(),
            });
        }
        Self::region(kernel, grid_points(extents, &vec![0; extents.len()]))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    /// Torus side lengths, or the bounding-box extents of a region.
    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    /// Interior sites (the volume), lexicographically ordered.
    pub fn sites(&self) -> &[Point] {
        &self.sites
    }

    /// Exterior shell sites (empty on a torus).
    pub fn shell(&self) -> &[Point] {
        &self.shell
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    /// Index of a site in the combined `[interior.., shell..]` ordering.
    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Site at a combined index.
    pub fn point(&self, i: usize) -> &Point {
        if i < self.sites.len() {
            &self.sites[i]
        } else {
            &self.shell[i - self.sites.len()]
        }
    }
}

fn bounding_extents(sites: &[Point], dim: usize) -> Vec<usize> {
    (0..dim)
        .map(|axis| {
            let lo = sites.iter().map(|p| p[axis]).min();
            let hi = sites.iter().map(|p| p[axis]).max();
            match (lo, hi) {
                (Some(lo), Some(hi)) => (hi - lo + 1) as usize,
                _ => 0,
            }
        })
        .collect()
}

fn grid_points(extents: &[usize], origin: &[i64]) -> Vec<Point> {
    let total: usize = extents.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut p = origin.to_vec();
    for _ in 0..total {
        out.push(p.clone());
        for axis in (0..extents.len()).rev() {
            p[axis] += 1;
            if p[axis] - origin[axis] < extents[axis] as i64 {
                break;
            }
            p[axis] = origin[axis];
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Index into the combined `[interior.., shell..]` value vector.
    pub index: usize,
    pub weight: f64,
}

/// Per-site list of kernel neighbors with their weights.
///
/// On a torus neighbors wrap modulo the extents; in a box they are split
/// between interior indices `< n_interior` and shell indices `>= n_interior`.
#[derive(Debug, Clone)]
pub struct NeighborTable {
    n_interior: usize,
    n_shell: usize,
    starts: Vec<usize>,
    entries: Vec<Neighbor>,
}

impl NeighborTable {
    pub fn new(kernel: &InteractionKernel, geometry: &LatticeGeometry) -> Result<Self, KernelError> {
        if kernel.dim() != geometry.dim() {
            return Err(KernelError::GeometryDimension {
                kernel: kernel.dim(),
                geometry: geometry.dim(),
            });
        }
        if geometry.kind() == GeometryKind::Torus {
            for (axis, (&extent, &range)) in
                geometry.extents().iter().zip(&kernel.range()).enumerate()
            {
                if extent as i64 <= 2 * range {
                    return Err(KernelError::GeometryTooSmall { axis, extent, range });
                }
            }
        }

        let n = geometry.n_sites();
        let mut starts = Vec::with_capacity(n + 1);
        let mut entries = Vec::with_capacity(n * kernel.support_len());
        let mut y = vec![0i64; geometry.dim()];
        for x in geometry.sites() {
            starts.push(entries.len());
            for (z, weight) in kernel.iter() {
                for axis in 0..y.len() {
                    y[axis] = x[axis] + z[axis];
                    if geometry.kind() == GeometryKind::Torus {
                        y[axis] = y[axis].rem_euclid(geometry.extents()[axis] as i64);
                    }
                }
                let index = geometry
                    .index_of(&y)
                    .ok_or_else(|| KernelError::MissingShellSite {
                        site: x.clone(),
                        neighbor: y.clone(),
                    })?;
                entries.push(Neighbor { index, weight });
            }
        }
        starts.push(entries.len());
        Ok(Self {
            n_interior: n,
            n_shell: geometry.shell().len(),
            starts,
            entries,
        })
    }

    #[inline]
    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    #[inline]
    pub fn n_shell(&self) -> usize {
        self.n_shell
    }

    #[inline]
    pub fn neighbors(&self, site: usize) -> &[Neighbor] {
        &self.entries[self.starts[site]..self.starts[site + 1]]
    }

    #[inline]
    pub fn is_interior(&self, index: usize) -> bool {
        index < self.n_interior
    }

    pub fn interior_neighbors(&self, site: usize) -> impl Iterator<Item = &Neighbor> + '_ {
        let n = self.n_interior;
        self.neighbors(site).iter().filter(move |nb| nb.index < n)
    }

    pub fn boundary_neighbors(&self, site: usize) -> impl Iterator<Item = &Neighbor> + '_ {
        let n = self.n_interior;
        self.neighbors(site).iter().filter(move |nb| nb.index >= n)
    }

    /// Total kernel weight seen from `site`, boundary included.
    pub fn weight_sum(&self, site: usize) -> f64 {
        self.neighbors(site).iter().map(|nb| nb.weight).sum()
    }
}
