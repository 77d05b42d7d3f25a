//! Exact finite-volume objects: the Hamiltonian `H^Λ`, the precision and
//! cross matrices of the quadratic form, the truncated multivariate normal
//! parameters of the specification and a constructive positive-definiteness
//! certificate built from z-Toeplitz blocks.
//!
//! For a volume `Λ` with exterior shell `S`,
//!
//! ```text
//! H^Λ(η) = 1/2 Σ_{ {x,y} ⊄ S } J(y-x) (η(x) - η(y))^2          (each pair once)
//!        = 1/2 η_Λ' A η_Λ - η_Λ' B γ_S + 1/2 Ψ(γ_S)
//! A(x,x) = Σ_{y ∈ Λ\{x}} J(y-x) + Σ_{y ∈ S} J(y-x) = ||J||
//! A(x,y) = -J(y-x),   B(x,y) = J(y-x),   Ψ(γ) = Σ_{x∈Λ, y∈S} J(y-x) γ(y)^2
//! ```
//!
//! so the specification is `N(A^{-1} B γ, A^{-1})` truncated to `[a,b]^Λ`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::kernel::{GeometryKind, InteractionKernel, KernelError, LatticeGeometry, Point, SpinInterval};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("volume is empty")]
    EmptyVolume,
    #[error("finite-volume matrices need a box geometry, not a torus")]
    NotARegion,
    #[error("configuration covers {found} sites, expected {expected}")]
    MissingSite { expected: usize, found: usize },
    #[error("precision matrix failed Cholesky factorization")]
    NotPositiveDefinite,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// An unordered interacting pair, indices into `[interior.., shell..]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// `H^Λ` for one volume together with its matrices `A^Λ`, `B^{Λ,S}`.
#[derive(Debug, Clone)]
pub struct VolumeHamiltonian {
    kernel: InteractionKernel,
    sites: Vec<Point>,
    shell: Vec<Point>,
    pairs: Vec<Pair>,
    precision: DMatrix<f64>,
    cross: DMatrix<f64>,
}

impl VolumeHamiltonian {
    pub fn new(kernel: &InteractionKernel, geometry: &LatticeGeometry) -> Result<Self, SpecError> {
        if geometry.kind() != GeometryKind::Box {
            return Err(SpecError::NotARegion);
        }
        if geometry.n_sites() == 0 {
            return Err(SpecError::EmptyVolume);
        }
        if geometry.dim() != kernel.dim() {
            return Err(KernelError::GeometryDimension {
                kernel: kernel.dim(),
                geometry: geometry.dim(),
            }
            .into());
        }
        let n = geometry.n_sites();
        let n_shell = geometry.shell().len();
        let mut precision = DMatrix::zeros(n, n);
        let mut cross = DMatrix::zeros(n, n_shell);
        let mut pairs = Vec::new();
        for (i, x) in geometry.sites().iter().enumerate() {
            let mut interior_weight = 0.0;
            let mut shell_weight = 0.0;
            for (z, w) in kernel.iter() {
                let y: Point = x.iter().zip(z).map(|(a, b)| a + b).collect();
                let j = geometry.index_of(&y).ok_or_else(|| KernelError::MissingShellSite {
                    site: x.clone(),
                    neighbor: y.clone(),
                })?;
                if j < n {
                    precision[(i, j)] = -w;
                    interior_weight += w;
                    if j > i {
                        pairs.push(Pair { i, j, weight: w });
                    }
                } else {
                    cross[(i, j - n)] = w;
                    shell_weight += w;
                    pairs.push(Pair { i, j, weight: w });
                }
            }
            precision[(i, i)] = interior_weight + shell_weight;
        }
        Ok(Self {
            kernel: kernel.clone(),
            sites: geometry.sites().to_vec(),
            shell: geometry.shell().to_vec(),
            pairs,
            precision,
            cross,
        })
    }

    /// Volume `sites` (any order, deduplicated) with the shell induced by `kernel`.
    pub fn from_sites<I>(kernel: &InteractionKernel, sites: I) -> Result<Self, SpecError>
    where
        I: IntoIterator<Item = Point>,
    {
        Self::new(kernel, &LatticeGeometry::region(kernel, sites)?)
    }

    pub fn kernel(&self) -> &InteractionKernel {
        &self.kernel
    }

    pub fn sites(&self) -> &[Point] {
        &self.sites
    }

    pub fn shell(&self) -> &[Point] {
        &self.shell
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn n_shell(&self) -> usize {
        self.shell.len()
    }

    /// Interacting pairs `{x, y}` with at least one end in the volume.
    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    /// `A^Λ`.
    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    /// `B^{Λ,S}`, rows indexed by volume sites, columns by shell sites.
    pub fn cross(&self) -> &DMatrix<f64> {
        &self.cross
    }

    /// Direct pair sum for a configuration laid out as `[η_Λ.., γ_S..]`.
    pub fn hamiltonian(&self, xi: &[f64]) -> Result<f64, SpecError> {
        let expected = self.n_sites() + self.n_shell();
        if xi.len() != expected {
            return Err(SpecError::MissingSite {
                expected,
                found: xi.len(),
            });
        }
        Ok(0.5
            * self
                .pairs
                .iter()
                .map(|p| {
                    let d = xi[p.i] - xi[p.j];
                    p.weight * d * d
                })
                .sum::<f64>())
    }

    /// `H^Λ(η_Λ γ_S)` from the two halves.
    pub fn hamiltonian_split(&self, eta: &[f64], gamma: &[f64]) -> Result<f64, SpecError> {
        self.check_lengths(eta, gamma)?;
        let xi: Vec<f64> = eta.iter().chain(gamma).copied().collect();
        self.hamiltonian(&xi)
    }

    /// `Ψ(γ) = Σ_{x∈Λ} Σ_{y∈S} J(y-x) γ(y)^2`.
    pub fn psi(&self, gamma: &[f64]) -> Result<f64, SpecError> {
        if gamma.len() != self.n_shell() {
            return Err(SpecError::MissingSite {
                expected: self.n_shell(),
                found: gamma.len(),
            });
        }
        let g = DVector::from_column_slice(gamma);
        let row_sums = self.cross.transpose() * DVector::from_element(self.n_sites(), 1.0);
        Ok(row_sums.iter().zip(g.iter()).map(|(w, v)| w * v * v).sum())
    }

    /// The matrix route `1/2 η'Aη - η'Bγ + 1/2 Ψ(γ)` to the same energy.
    pub fn quadratic_form_energy(&self, eta: &[f64], gamma: &[f64]) -> Result<f64, SpecError> {
        self.check_lengths(eta, gamma)?;
        let e = DVector::from_column_slice(eta);
        let g = DVector::from_column_slice(gamma);
        let quad = e.dot(&(&self.precision * &e));
        let lin = e.dot(&(&self.cross * &g));
        Ok(0.5 * quad - lin + 0.5 * self.psi(gamma)?)
    }

    /// `1/2 (η - m)' A (η - m)`.
    pub fn gaussian_energy(&self, eta: &[f64], mean: &[f64]) -> f64 {
        let d = DVector::from_iterator(eta.len(), eta.iter().zip(mean).map(|(e, m)| e - m));
        0.5 * d.dot(&(&self.precision * &d))
    }

    /// Mean `A^{-1} B γ` and covariance `A^{-1}` of the untruncated Gaussian.
    pub fn specification(
        &self,
        gamma: &[f64],
        interval: SpinInterval,
    ) -> Result<GaussianSpecification, SpecError> {
        if gamma.len() != self.n_shell() {
            return Err(SpecError::MissingSite {
                expected: self.n_shell(),
                found: gamma.len(),
            });
        }
        let chol = self
            .precision
            .clone()
            .cholesky()
            .ok_or(SpecError::NotPositiveDefinite)?;
        let rhs = &self.cross * DVector::from_column_slice(gamma);
        let mean = chol.solve(&rhs);
        let residual = (&self.precision * &mean - &rhs).amax();
        let covariance = chol.inverse();
        Ok(GaussianSpecification {
            mean: mean.iter().copied().collect(),
            covariance: rows(&covariance),
            interval,
            solve_residual: residual,
        })
    }

    /// Whether `A^Λ` admits a Cholesky factorization.
    pub fn is_positive_definite(&self) -> bool {
        self.precision.clone().cholesky().is_some()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.precision
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Decomposition `A = Σ_x e_x E^{xx} + s I + Σ_{z∈Δ₊} J(z) T_z`.
    ///
    /// `Z₊` is the set of lexicographically positive offsets and `Δ₊` the
    /// positive offsets realized as `y - x` for `x, y` in the volume (and
    /// carrying weight). Unrealized positive offsets contribute `2 J(z)` to
    /// the slack `s`; whatever the diagonal still needs is `e_x`.
    pub fn pd_certificate(&self) -> PdCertificate {
        let realized = realized_offsets(&self.sites);
        let mut slack = 0.0;
        let mut terms = Vec::new();
        for (z, w) in self.kernel.iter() {
            if !lexicographically_positive(z) {
                continue;
            }
            if realized.contains(z) {
                terms.push(ToeplitzTerm {
                    offset: z.clone(),
                    weight: w,
                    classes: z_connected_classes(&self.sites, z),
                });
            } else {
                slack += 2.0 * w;
            }
        }
        let toeplitz_diag: f64 = terms.iter().map(|t| 2.0 * t.weight).sum();
        let diagonal_excess = (0..self.n_sites())
            .map(|i| self.precision[(i, i)] - slack - toeplitz_diag)
            .collect();
        PdCertificate {
            sites: self.sites.clone(),
            diagonal_excess,
            slack,
            terms,
        }
    }

    fn check_lengths(&self, eta: &[f64], gamma: &[f64]) -> Result<(), SpecError> {
        if eta.len() != self.n_sites() {
            return Err(SpecError::MissingSite {
                expected: self.n_sites(),
                found: eta.len(),
            });
        }
        if gamma.len() != self.n_shell() {
            return Err(SpecError::MissingSite {
                expected: self.n_shell(),
                found: gamma.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Mean and covariance of the Gaussian whose truncation to `[a,b]^Λ` is the
/// specification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianSpecification {
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub interval: SpinInterval,
    /// `||A m - B γ||_∞` of the solve.
    pub solve_residual: f64,
}

/// Maximal arithmetic progression `{start + k z : 0 <= k < len}` inside a volume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZClass {
    pub start: Point,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToeplitzTerm {
    pub offset: Point,
    pub weight: f64,
    pub classes: Vec<ZClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdCertificate {
    pub sites: Vec<Point>,
    /// Coefficient of `E^{xx}` per volume site.
    pub diagonal_excess: Vec<f64>,
    /// Coefficient of the identity.
    pub slack: f64,
    pub terms: Vec<ToeplitzTerm>,
}

impl PdCertificate {
    /// Rebuilds the matrix from its pieces.
    pub fn reassemble(&self) -> DMatrix<f64> {
        let n = self.sites.len();
        let mut m = DMatrix::identity(n, n) * self.slack;
        for (i, e) in self.diagonal_excess.iter().enumerate() {
            m[(i, i)] += e;
        }
        for term in &self.terms {
            m += toeplitz_matrix(&self.sites, &term.offset) * term.weight;
        }
        m
    }

    /// Largest entrywise difference between the reassembly and `target`.
    pub fn reassembly_error(&self, target: &DMatrix<f64>) -> f64 {
        (self.reassemble() - target).amax()
    }

    /// Every piece is positive semidefinite and at least one is definite.
    pub fn certifies_positive_definite(&self) -> bool {
        let psd = self.slack >= 0.0
            && self.diagonal_excess.iter().all(|&e| e >= -1e-14)
            && self.terms.iter().all(|t| t.weight > 0.0);
        psd && (self.slack > 0.0 || !self.terms.is_empty())
    }
}

/// First nonzero coordinate is positive.
pub fn lexicographically_positive(z: &[i64]) -> bool {
    z.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

fn realized_offsets(sites: &[Point]) -> BTreeSet<Point> {
    let mut out = BTreeSet::new();
    for x in sites {
        for y in sites {
            if x != y {
                out.insert(y.iter().zip(x).map(|(a, b)| a - b).collect());
            }
        }
    }
    out
}

/// Splits `sites` into maximal progressions with step `z`, ordered by start.
///
/// Panics if `z` is the zero offset.
pub fn z_connected_classes(sites: &[Point], z: &[i64]) -> Vec<ZClass> {
    assert!(z.iter().any(|&c| c != 0), "z-classes need a nonzero offset");
    let set: BTreeSet<&[i64]> = sites.iter().map(|p| p.as_slice()).collect();
    let step = |p: &[i64], sign: i64| -> Point { p.iter().zip(z).map(|(a, b)| a + sign * b).collect() };
    let mut classes = Vec::new();
    for x in &set {
        if set.contains(step(x, -1).as_slice()) {
            continue;
        }
        let mut len = 1;
        let mut cur = step(x, 1);
        while set.contains(cur.as_slice()) {
            len += 1;
            cur = step(&cur, 1);
        }
        classes.push(ZClass {
            start: x.to_vec(),
            len,
        });
    }
    classes
}

/// `T_z(x,y) = 2 [x = y] - [y - x = ±z]` on `sites` (in the given order).
pub fn toeplitz_matrix(sites: &[Point], z: &[i64]) -> DMatrix<f64> {
    let n = sites.len();
    let mut t = DMatrix::zeros(n, n);
    for (i, x) in sites.iter().enumerate() {
        t[(i, i)] = 2.0;
        for (j, y) in sites.iter().enumerate() {
            let d: Point = y.iter().zip(x).map(|(a, b)| a - b).collect();
            if d.as_slice() == z || d.iter().zip(z).all(|(a, b)| *a == -b) && i != j {
                t[(i, j)] = -1.0;
            }
        }
    }
    t
}

/// `η' T_z η` through the class decomposition: telescoping squared
/// differences along each progression plus the squares at its two ends
/// (doubled for single-site classes).
pub fn toeplitz_quadratic_form(sites: &[Point], z: &[i64], eta: &[f64]) -> f64 {
    assert_eq!(sites.len(), eta.len());
    let index: HashMap<&[i64], usize> = sites.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let mut total = 0.0;
    for class in z_connected_classes(sites, z) {
        let members: Vec<f64> = (0..class.len as i64)
            .map(|k| {
                let p: Point = class.start.iter().zip(z).map(|(a, b)| a + k * b).collect();
                eta[index[p.as_slice()]]
            })
            .collect();
        if members.len() == 1 {
            total += 2.0 * members[0] * members[0];
        } else {
            total += members.windows(2).map(|w| (w[0] - w[1]).powi(2)).sum::<f64>();
            let (first, last) = (members[0], members[members.len() - 1]);
            total += first * first + last * last;
        }
    }
    total
}

/// Grouping of a shell configuration by site for JSON reports.
pub fn shell_values(shell: &[Point], gamma: &[f64]) -> BTreeMap<String, f64> {
    shell
        .iter()
        .zip(gamma)
        .map(|(p, &v)| (format!("{p:?}"), v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nn1() -> InteractionKernel {
        InteractionKernel::nearest_neighbor(1).unwrap()
    }

    fn unit() -> SpinInterval {
        SpinInterval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn constant_configuration_has_zero_energy() {
        let vh = VolumeHamiltonian::from_sites(&nn1(), [vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(vh.hamiltonian(&[0.4; 5]).unwrap(), 0.0);
    }

    #[test]
    fn single_site_hand_sum() {
        let vh = VolumeHamiltonian::from_sites(&nn1(), [vec![0]]).unwrap();
        assert_eq!(vh.shell(), &[vec![-1], vec![1]]);
        // (η(0), γ(-1), γ(1)) = (1, 0, 0): ½[½·1 + ½·1]
        assert_eq!(vh.hamiltonian(&[1.0, 0.0, 0.0]).unwrap(), 0.5);
        assert!(matches!(
            vh.hamiltonian(&[1.0, 0.0]),
            Err(SpecError::MissingSite { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn singleton_volume_is_the_local_conditional() {
        let k = InteractionKernel::exp_decay(2, 0.6, 2).unwrap();
        let vh = VolumeHamiltonian::from_sites(&k, [vec![3, -1]]).unwrap();
        assert_eq!(vh.precision().shape(), (1, 1));
        assert!((vh.precision()[(0, 0)] - 1.0).abs() <= 1e-15);
        let gamma: Vec<f64> = (0..vh.n_shell()).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let local: f64 = vh
            .shell()
            .iter()
            .zip(&gamma)
            .map(|(y, g)| k.weight(&[y[0] - 3, y[1] + 1]) * g)
            .sum();
        let spec = vh.specification(&gamma, unit()).unwrap();
        assert!((spec.mean[0] - local).abs() < 1e-14);
        assert!((spec.covariance[0][0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_site_matrices() {
        let vh = VolumeHamiltonian::from_sites(&nn1(), [vec![0], vec![1]]).unwrap();
        let a = vh.precision();
        assert_eq!(a.as_slice(), &[1.0, -0.5, -0.5, 1.0]);
        assert_eq!(vh.cross().as_slice(), &[0.5, 0.0, 0.0, 0.5]);
        let spec = vh.specification(&[0.0, 1.0], unit()).unwrap();
        // 2×2 inverse: [[1, -.5], [-.5, 1]]^{-1} = (4/3) [[1, .5], [.5, 1]]
        let cov = [[4.0 / 3.0, 2.0 / 3.0], [2.0 / 3.0, 4.0 / 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((spec.covariance[i][j] - cov[i][j]).abs() < 1e-14);
            }
        }
        // A^{-1} (0, 1/2)
        assert!((spec.mean[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((spec.mean[1] - 2.0 / 3.0).abs() < 1e-14);
        assert!(spec.solve_residual <= 1e-10);
        let flat = vh.specification(&[0.3, 0.3], unit()).unwrap();
        assert!((flat.mean[0] - 0.3).abs() < 1e-15 && (flat.mean[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn precision_is_the_hessian_of_the_pair_sum() {
        let k = InteractionKernel::exp_decay(2, 0.5, 2).unwrap();
        let vh = VolumeHamiltonian::from_sites(&k, [vec![0, 0], vec![0, 1], vec![1, 1], vec![2, 0]]).unwrap();
        let n = vh.n_sites();
        let base: Vec<f64> = (0..n + vh.n_shell()).map(|i| 0.1 * i as f64).collect();
        let h = 0.5;
        let energy = |di: usize, dj: usize, si: f64, sj: f64| {
            let mut xi = base.clone();
            xi[di] += si * h;
            xi[dj] += sj * h;
            vh.hamiltonian(&xi).unwrap()
        };
        for i in 0..n {
            for j in 0..n {
                // exact for a quadratic
                let fd = (energy(i, j, 1.0, 1.0) - energy(i, j, 1.0, -1.0) - energy(i, j, -1.0, 1.0)
                    + energy(i, j, -1.0, -1.0))
                    / (4.0 * h * h);
                let expect = vh.precision()[(i, j)];
                assert!((fd - expect).abs() < 1e-12, "({i},{j}) fd={fd} A={expect}");
            }
        }
    }

    #[test]
    fn certificate_for_two_sites() {
        let vh = VolumeHamiltonian::from_sites(&nn1(), [vec![0], vec![1]]).unwrap();
        let cert = vh.pd_certificate();
        assert_eq!(cert.terms.len(), 1);
        assert_eq!(cert.terms[0].offset, vec![1]);
        assert_eq!(cert.terms[0].weight, 0.5);
        assert_eq!(cert.slack, 0.0);
        assert_eq!(cert.diagonal_excess, vec![0.0, 0.0]);
        assert_eq!(toeplitz_matrix(vh.sites(), &[1]).as_slice(), &[2.0, -1.0, -1.0, 2.0]);
        assert!(cert.reassembly_error(vh.precision()) <= 1e-14);
        assert!(cert.certifies_positive_definite());
        let eig = toeplitz_matrix(vh.sites(), &[1]).symmetric_eigen().eigenvalues;
        let mut e: Vec<f64> = eig.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn unrealized_offsets_go_to_slack() {
        let k = InteractionKernel::new(1, [(vec![1], 1.0), (vec![5], 2.0)], true).unwrap();
        let vh = VolumeHamiltonian::from_sites(&k, [vec![0], vec![1], vec![2]]).unwrap();
        let cert = vh.pd_certificate();
        assert_eq!(cert.terms.len(), 1);
        assert!((cert.slack - 2.0 * k.weight(&[5])).abs() < 1e-15);
        assert!(cert.reassembly_error(vh.precision()) <= 1e-14);
    }

    #[test]
    fn z_classes() {
        let pts = |v: &[i64]| v.iter().map(|&x| vec![x]).collect::<Vec<_>>();
        let c = z_connected_classes(&pts(&[0, 1, 2, 5]), &[1]);
        assert_eq!(c, vec![ZClass { start: vec![0], len: 3 }, ZClass { start: vec![5], len: 1 }]);
        let c = z_connected_classes(&pts(&[0, 2, 4]), &[2]);
        assert_eq!(c, vec![ZClass { start: vec![0], len: 3 }]);
        let square = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        let c = z_connected_classes(&square, &[1, 1]);
        assert_eq!(
            c,
            vec![
                ZClass { start: vec![0, 0], len: 2 },
                ZClass { start: vec![0, 1], len: 1 },
                ZClass { start: vec![1, 0], len: 1 },
            ]
        );
    }

    #[test]
    fn toeplitz_form_small_cases() {
        let sites = vec![vec![0], vec![1]];
        assert_eq!(toeplitz_quadratic_form(&sites, &[1], &[1.0, 1.0]), 2.0);
        assert_eq!(toeplitz_quadratic_form(&sites, &[1], &[0.0, 0.0]), 0.0);
        let t = toeplitz_matrix(&sites, &[1]);
        let e = DVector::from_vec(vec![1.0, 1.0]);
        assert_eq!(e.dot(&(&t * &e)), 2.0);
    }

    #[test]
    fn torus_and_empty_volumes_are_rejected() {
        let torus = LatticeGeometry::torus(&[8]).unwrap();
        assert_eq!(VolumeHamiltonian::new(&nn1(), &torus).unwrap_err(), SpecError::NotARegion);
        assert_eq!(
            VolumeHamiltonian::from_sites(&nn1(), Vec::<Point>::new()).unwrap_err(),
            SpecError::EmptyVolume
        );
    }
}
