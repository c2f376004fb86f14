//! The generating-function transform: for h(w) = sum g w^f,
//! sqrt5 sum g z^f F(jf) = h(alpha^j z) - h(beta^j z) and
//! sum g z^f L(jf) = h(alpha^j z) + h(beta^j z).

use fibsum::golden::{GoldenNum, Rat};
use fibsum::verify::{check_binet_indices, check_binet_transform, BinetError};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn small_rat(rng: &mut StdRng) -> Rat {
    let den = rng.gen_range(1..=4i64);
    let mut num = rng.gen_range(-6..=6i64);
    if num == 0 {
        num = 1;
    }
    Rat::new(num.into(), den.into())
}

fn random_case(rng: &mut StdRng) -> (Vec<(GoldenNum, i64)>, i64, GoldenNum) {
    let len = rng.gen_range(1..=8);
    let coeffs = (0..len)
        .map(|_| (GoldenNum::from_rat(small_rat(rng)), rng.gen_range(-10..=10i64)))
        .collect();
    let j = rng.gen_range(-3..=3i64);
    // z non-zero so negative exponents are defined
    let z = GoldenNum::new(small_rat(rng), Rat::new(rng.gen_range(-2..=2i64).into(), 1.into()));
    (coeffs, j, z)
}

#[test]
fn random_lists_satisfy_the_transform() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let (coeffs, j, z) = random_case(&mut rng);
        assert_eq!(
            check_binet_transform(&coeffs, j, &z),
            Ok(true),
            "{coeffs:?} j={j} z={z}"
        );
    }
}

#[test]
fn any_single_corrupted_index_is_detected() {
    let mut rng = StdRng::seed_from_u64(0xc0ffee);
    for _ in 0..100 {
        let (coeffs, j, z) = random_case(&mut rng);
        let indices: Vec<i64> = coeffs.iter().map(|(_, f)| j * f).collect();
        assert_eq!(check_binet_indices(&coeffs, &indices, j, &z), Ok(true));
        for i in 0..coeffs.len() {
            let mut bad = indices.clone();
            bad[i] += rng.gen_range(1..=3);
            assert_eq!(
                check_binet_indices(&coeffs, &bad, j, &z),
                Ok(false),
                "term {i} of {coeffs:?}"
            );
        }
    }
}

#[test]
fn finite_geometric_sum() {
    // h(w) = 1 + w + ... + w^5
    let coeffs: Vec<(GoldenNum, i64)> = (0..=5).map(|f| (GoldenNum::one(), f)).collect();
    for j in -3..=3 {
        assert_eq!(check_binet_transform(&coeffs, j, &GoldenNum::ratio(1, 2)), Ok(true));
    }
}

#[test]
fn degenerate_inputs() {
    let coeffs = vec![(GoldenNum::one(), -2)];
    assert_eq!(
        check_binet_transform(&coeffs, 1, &GoldenNum::zero()),
        Err(BinetError::ZeroWithNegativeExponent(-2))
    );
    assert_eq!(check_binet_transform(&[], 2, &GoldenNum::one()), Ok(true));
    assert!(matches!(
        check_binet_indices(&coeffs, &[], 1, &GoldenNum::one()),
        Err(BinetError::LengthMismatch(0, 1))
    ));
}
