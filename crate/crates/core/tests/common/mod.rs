#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use truncfield::kernel::{InteractionKernel, Point};

/// Random symmetric kernel in dimension 1 or 2 with offsets of sup-norm <= 2.
pub fn kernel_strategy() -> impl Strategy<Value = InteractionKernel> {
    (1usize..=2)
        .prop_flat_map(|dim| {
            let offset = prop::collection::vec(-2i64..=2, dim);
            (Just(dim), prop::collection::vec((offset, 0.05f64..3.0), 1..6))
        })
        .prop_filter_map("all offsets zero", |(dim, raw)| {
            // keep one weight per +-z pair; the constructor fills in mirrors
            let mut half: BTreeMap<Point, f64> = BTreeMap::new();
            for (z, w) in raw {
                if z.iter().all(|&c| c == 0) {
                    continue;
                }
                let mirror: Point = z.iter().map(|c| -c).collect();
                half.entry(z.max(mirror)).or_insert(w);
            }
            if half.is_empty() {
                return None;
            }
            InteractionKernel::new(dim, half, true).ok()
        })
}

/// Random volume of `1..=max` distinct sites inside `[0, 4)^dim`.
pub fn volume_strategy(dim: usize, max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::btree_set(prop::collection::vec(0i64..4, dim), 1..=max)
        .prop_map(|s| s.into_iter().collect())
}

pub fn kernel_and_volume(max: usize) -> impl Strategy<Value = (InteractionKernel, Vec<Point>)> {
    kernel_strategy().prop_flat_map(move |k| {
        let dim = k.dim();
        (Just(k), volume_strategy(dim, max))
    })
}
