//! Proptest strategies shared by unit tests.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Dag, Digraph};

pub(crate) fn arb_digraph(max_n: usize, p: f64) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(proptest::bool::weighted(p), n * n).prop_map(move |bits| {
            let edges = (0..n * n)
                .filter(|&k| bits[k] && k / n != k % n)
                .map(|k| (k / n, k % n));
            Digraph::from_edges(n, edges).unwrap().0
        })
    })
}

pub(crate) fn arb_dag(max_n: usize, p: f64) -> impl Strategy<Value = Dag> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(proptest::bool::weighted(p), pairs),
            Just(n),
            any::<u64>(),
        )
            .prop_map(|(bits, n, salt)| {
                // Orient every pair from higher to lower rank, then scramble labels.
                let mut perm: Vec<usize> = (0..n).collect();
                let mut rng = ChaCha8Rng::seed_from_u64(salt);
                rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
                let mut edges = Vec::new();
                let mut k = 0;
                for hi in 0..n {
                    for lo in 0..hi {
                        if bits[k] {
                            edges.push((perm[hi], perm[lo]));
                        }
                        k += 1;
                    }
                }
                Dag::from_edges(n, edges).unwrap().0
            })
    })
}
