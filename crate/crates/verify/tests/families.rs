//! Family index arithmetic against formulas written out by hand.

use qseries_core::congruence::PrimeCondition;
use qseries_verify::registry::Registry;

#[test]
fn g2_family_indices() {
    let reg = Registry::builtin();
    let c = &reg.claim("g2/16n+2/j").unwrap().check;
    // 16 p^2 n + 16 p j + 2 p^2 at p = 3
    for j in 1..3 {
        for n in 0..5 {
            assert_eq!(c.family_index(3, 0, j, n).unwrap(), 144 * n + 48 * j + 18);
        }
    }
    assert!(c.family_index(3, 0, 0, 0).is_err());
    assert!(c.family_index(3, 0, 3, 0).is_err());
}

#[test]
fn m_family_indices() {
    let reg = Registry::builtin();
    let c = &reg.claim("m/8n+(P+2)/3/j").unwrap().check;
    // 8 p^2 n + 8 p j + (p^2 + 2)/3 at p = 5
    for j in 1..5 {
        for n in 0..5 {
            assert_eq!(c.family_index(5, 0, j, n).unwrap(), 200 * n + 40 * j + 9);
        }
    }
}

#[test]
fn alpha_scales_family_indices() {
    let reg = Registry::builtin();
    let c = &reg.claim("s/24n+11P/j").unwrap().check;
    // 24 p^{2a+2} n + 24 p^{2a+1} j + 11 p^{2a+2}
    let (p, a) = (5u64, 1u32);
    for j in 1..p {
        let idx = c.family_index(p, a, j, 2).unwrap();
        let expect = 24 * p.pow(2 * a + 2) * 2 + 24 * p.pow(2 * a + 1) * j + 11 * p.pow(2 * a + 2);
        assert_eq!(idx, expect);
    }
}

#[test]
fn smallest_admitted_primes_are_computed() {
    let legendre = |xi| PrimeCondition::Legendre { min_p: 5, xi };
    assert_eq!(legendre(-8).smallest(100), Some(5));
    assert_eq!(legendre(-1).smallest(100), Some(7));
    assert_eq!(legendre(-6).smallest(100), Some(13));
    assert_eq!(legendre(-8).admissible_primes(12), vec![5, 7, 11].into_iter().filter(|&p| {
        // squares mod p never include -8
        (1..p).all(|x| (x * x) % p != (p * 8 - 8) % p)
    }).collect::<Vec<_>>());
    assert_eq!(PrimeCondition::Any { min_p: 3 }.admissible_primes(10), vec![3, 5, 7]);
    assert!(PrimeCondition::Any { min_p: 11 }.admissible_primes(10).is_empty());
}
