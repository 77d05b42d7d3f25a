mod common;

use common::kernel_and_volume;
use nalgebra::DVector;
use proptest::prelude::*;
use truncfield::finite_spec::{toeplitz_matrix, toeplitz_quadratic_form, z_connected_classes, VolumeHamiltonian};
use truncfield::kernel::SpinInterval;

fn unit() -> SpinInterval {
    SpinInterval::new(0.0, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matrix_route_equals_pair_sum(
        (kernel, sites) in kernel_and_volume(6),
        seed in prop::collection::vec(0.0f64..1.0, 64),
    ) {
        let vh = VolumeHamiltonian::from_sites(&kernel, sites).unwrap();
        let eta = &seed[..vh.n_sites()];
        let gamma: Vec<f64> = (0..vh.n_shell()).map(|i| seed[(i * 7 + 3) % 64]).collect();
        let direct = vh.hamiltonian_split(eta, &gamma).unwrap();
        let matrix = vh.quadratic_form_energy(eta, &gamma).unwrap();
        prop_assert!((direct - matrix).abs() <= 1e-10);
        prop_assert!(direct >= 0.0);
    }

    #[test]
    fn energy_differences_are_gaussian(
        (kernel, sites) in kernel_and_volume(4),
        values in prop::collection::vec(0.0f64..1.0, 96),
    ) {
        let vh = VolumeHamiltonian::from_sites(&kernel, sites).unwrap();
        let n = vh.n_sites();
        let gamma: Vec<f64> = (0..vh.n_shell()).map(|i| values[8 + (i % 88)]).collect();
        let (e1, e2) = (&values[..n], &values[4..4 + n]);
        let spec = vh.specification(&gamma, unit()).unwrap();
        prop_assert!(spec.solve_residual <= 1e-10);
        let lhs = vh.hamiltonian_split(e1, &gamma).unwrap() - vh.hamiltonian_split(e2, &gamma).unwrap();
        let rhs = vh.gaussian_energy(e1, &spec.mean) - vh.gaussian_energy(e2, &spec.mean);
        prop_assert!((lhs - rhs).abs() <= 1e-10, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn precision_is_positive_definite_and_certified((kernel, sites) in kernel_and_volume(12)) {
        let vh = VolumeHamiltonian::from_sites(&kernel, sites).unwrap();
        prop_assert!(vh.is_positive_definite());
        prop_assert!(vh.min_eigenvalue() > 0.0);
        let cert = vh.pd_certificate();
        prop_assert!(cert.reassembly_error(vh.precision()) <= 1e-14);
        prop_assert!(cert.certifies_positive_definite());
        let a = vh.precision();
        prop_assert_eq!(a, &a.transpose());
    }

    #[test]
    fn class_formula_matches_dense_form(
        (kernel, sites) in kernel_and_volume(10),
        eta in prop::collection::vec(-2.0f64..2.0, 10),
    ) {
        let eta = &eta[..sites.len()];
        for (z, _) in kernel.iter() {
            let classes = z_connected_classes(&sites, z);
            prop_assert_eq!(classes.iter().map(|c| c.len).sum::<usize>(), sites.len());
            let t = toeplitz_matrix(&sites, z);
            let v = DVector::from_column_slice(eta);
            let dense = v.dot(&(&t * &v));
            let formula = toeplitz_quadratic_form(&sites, z, eta);
            prop_assert!((dense - formula).abs() <= 1e-12);
            if eta.iter().any(|&x| x != 0.0) {
                prop_assert!(formula > 0.0);
            }
        }
    }
}
