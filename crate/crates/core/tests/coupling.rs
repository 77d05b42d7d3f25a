mod common;

use common::kernel_strategy;
use proptest::prelude::*;
use truncfield::kernel::{LatticeGeometry, SpinInterval};
use truncfield::sampler::{ids, GibbsSampler, UniformSource, UpdateStream};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ordered_starts_stay_ordered_and_in_range(
        kernel in kernel_strategy(),
        (a, width) in (-3.0f64..3.0, 0.2f64..6.0),
        seed in any::<u64>(),
    ) {
        let interval = SpinInterval::new(a, a + width).unwrap();
        let geometry = LatticeGeometry::torus(&vec![5; kernel.dim()]).unwrap();
        let sampler = GibbsSampler::new(&kernel, geometry, interval).unwrap();
        let n = sampler.n_sites();
        let mut src = UniformSource::new(seed, 7);
        let lo_vals: Vec<f64> = (0..n).map(|_| src.next_in(a, a + width)).collect();
        let hi_vals: Vec<f64> = lo_vals.iter().map(|&l| src.next_in(l, a + width)).collect();
        let mut lower = sampler.field(lo_vals, &[]).unwrap();
        let mut upper = sampler.field(hi_vals, &[]).unwrap();
        let mut stream = UpdateStream::new(seed, 0, n);
        for k in 0..(20 * n as u64) {
            let slot = stream.next_slot();
            sampler.coupled_update(&mut lower, &mut upper, slot.site, slot.uniform, k).unwrap();
        }
        for (l, u) in lower.interior().iter().zip(upper.interior()) {
            prop_assert!(l <= u);
            prop_assert!(interval.contains(*l) && interval.contains(*u));
        }
    }

    #[test]
    fn box_cftp_is_deterministic_and_in_range(seed in any::<u64>(), g in prop::collection::vec(0.0f64..1.0, 4)) {
        let kernel = truncfield::kernel::InteractionKernel::nearest_neighbor(1).unwrap();
        let geometry = LatticeGeometry::block(&kernel, &[2]).unwrap();
        let sampler = GibbsSampler::new(&kernel, geometry, SpinInterval::new(0.0, 1.0).unwrap()).unwrap();
        let boundary = [g[0], g[1]];
        let cfg = Default::default();
        let s1 = sampler.cftp(&boundary, &mut UpdateStream::new(seed, ids::CFTP_BASE, 2), &cfg).unwrap();
        let s2 = sampler.cftp(&boundary, &mut UpdateStream::new(seed, ids::CFTP_BASE, 2), &cfg).unwrap();
        prop_assert_eq!(&s1.values, &s2.values);
        prop_assert!(s1.gap <= 1e-9);
        prop_assert!(s1.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
