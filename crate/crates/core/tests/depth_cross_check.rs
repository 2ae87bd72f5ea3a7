//! Early fuzz cross-check: the recursive depth implementation and the
//! arc-method brute-force reference must agree exactly.

use dp_hull_core::dataset::GridDataset;
use dp_hull_core::oracle::depth_bruteforce;
use dp_hull_core::rational::RationalPoint;
use dp_hull_core::tukey::tukey_depth;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn random_instance(rng: &mut ChaCha20Rng) -> (GridDataset, RationalPoint) {
    let d = rng.gen_range(1..=3usize);
    let x = rng.gen_range(1..=8u64);
    let n = rng.gen_range(1..=10usize);
    let points = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(0..=x as i64)).collect())
        .collect();
    let s = GridDataset::new(d, x, points).unwrap();
    // Query points: on-grid, off-grid rationals, and dataset points.
    let q = match rng.gen_range(0..3) {
        0 => RationalPoint::from_numerators(
            &(0..d).map(|_| rng.gen_range(0..=x as i64)).collect::<Vec<_>>(),
            x,
        ),
        1 => RationalPoint::new(
            (0..d)
                .map(|_| {
                    BigRational::new(
                        BigInt::from(rng.gen_range(-2..=(4 * x as i64 + 2))),
                        BigInt::from(4 * x),
                    )
                })
                .collect(),
        ),
        _ => s.point(rng.gen_range(0..n)),
    };
    (s, q)
}

#[test]
fn depth_matches_bruteforce_on_random_instances() {
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
    for trial in 0..600 {
        let (s, q) = random_instance(&mut rng);
        let fast = tukey_depth(&q, &s);
        let slow = depth_bruteforce(&q, &s);
        assert_eq!(
            fast, slow,
            "mismatch on trial {trial}: dataset {:?} query {:?}",
            s, q
        );
    }
}
