//! Randomized invariants for the configuration algebra.

use ban::config::Config;
use proptest::prelude::*;

fn config_and_mask() -> impl Strategy<Value = (Config, u32)> {
    (1usize..=10).prop_flat_map(|n| {
        let full = (1u32 << n) - 1;
        (0..=full, 0..=full).prop_map(move |(bits, mask)| (Config::new(n, bits), mask))
    })
}

fn config_pair() -> impl Strategy<Value = (Config, Config)> {
    (1usize..=10).prop_flat_map(|n| {
        let full = (1u32 << n) - 1;
        (0..=full, 0..=full).prop_map(move |(a, b)| (Config::new(n, a), Config::new(n, b)))
    })
}

fn config_triple() -> impl Strategy<Value = (Config, Config, Config)> {
    (1usize..=10).prop_flat_map(|n| {
        let full = (1u32 << n) - 1;
        (0..=full, 0..=full, 0..=full)
            .prop_map(move |(a, b, c)| (Config::new(n, a), Config::new(n, b), Config::new(n, c)))
    })
}

proptest! {
    #[test]
    fn flip_is_an_involution((x, mask) in config_and_mask()) {
        prop_assert_eq!(x.flip_mask(mask).flip_mask(mask), x);
    }

    #[test]
    fn flip_moves_exactly_the_mask((x, mask) in config_and_mask()) {
        let y = x.flip_mask(mask);
        prop_assert_eq!(x.diff_mask(&y).unwrap(), mask);
    }

    #[test]
    fn hamming_is_zero_iff_equal((x, y) in config_pair()) {
        let (_, d) = x.hamming(&y).unwrap();
        prop_assert_eq!(d == 0, x == y);
    }

    #[test]
    fn hamming_is_symmetric((x, y) in config_pair()) {
        prop_assert_eq!(x.hamming(&y).unwrap().1, y.hamming(&x).unwrap().1);
    }

    #[test]
    fn hamming_satisfies_the_triangle_inequality((x, y, z) in config_triple()) {
        let xz = x.hamming(&z).unwrap().1;
        let xy = x.hamming(&y).unwrap().1;
        let yz = y.hamming(&z).unwrap().1;
        prop_assert!(xz <= xy + yz);
    }

    #[test]
    fn hamming_set_matches_distance((x, y) in config_pair()) {
        let (diff, d) = x.hamming(&y).unwrap();
        prop_assert_eq!(diff.len(), d);
        for i in diff {
            prop_assert_ne!(x.bit(i), y.bit(i));
        }
    }
}
