//! Cross-checks against oracles written from first principles here.

use num_bigint::BigInt;
use qseries_core::arith::{is_prime, legendre, primes_between};
use qseries_core::builders::{eta_series, theta_series, ThetaAtom};
use qseries_core::expr::{eval_qexpr, parse_qexpr};
use qseries_core::named::{named_series, SeriesName};
use qseries_core::partitions::{count_dp, count_exhaustive, general_pt, PartitionConstraint};
use qseries_core::series::Ring;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn naive_product(factors: &[(i64, usize)], order: usize) -> Vec<i64> {
    // prod (1 - sign q^e) by repeated multiplication
    let mut a = vec![0i64; order + 1];
    a[0] = 1;
    for &(sign, e) in factors {
        for i in (e..=order).rev() {
            a[i] -= sign * a[i - e];
        }
    }
    a
}

fn partitions_into_parts_at_most(n: usize, max: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    (1..=max.min(n))
        .map(|k| partitions_into_parts_at_most(n - k, k))
        .sum()
}

#[test]
fn euler_product_matches_direct_expansion() {
    let order = 60;
    let factors: Vec<_> = (1..=order).map(|k| (1, k)).collect();
    assert_eq!(
        eta_series(1, Ring::Exact, order).unwrap().coefficients(),
        ints(&naive_product(&factors, order))
    );
    let factors: Vec<_> = (1..=order / 3).map(|k| (1, 3 * k)).collect();
    assert_eq!(
        eta_series(3, Ring::Exact, order).unwrap().coefficients(),
        ints(&naive_product(&factors, order))
    );
}

#[test]
fn partition_numbers_match_recursive_count() {
    let table = general_pt(1, 40).unwrap();
    for n in 0..=40 {
        assert_eq!(*table.get(n), partitions_into_parts_at_most(n, n).into(), "n = {}", n);
    }
    assert_eq!(*general_pt(2, 2).unwrap().get(2), 5u32.into());
}

#[test]
fn overpartition_counts_match_known_values() {
    let known = [1u32, 2, 4, 8, 14, 24, 40, 64, 100, 154, 232, 344, 504, 728, 1040];
    let dp = count_dp(&PartitionConstraint::overpartitions(), known.len() - 1);
    let eta = eval_qexpr(&parse_qexpr("l2/l1^2").unwrap(), known.len() - 1, Ring::Exact).unwrap();
    for (n, &k) in known.iter().enumerate() {
        assert_eq!(*dp.get(n), k.into());
        assert_eq!(eta.coeff(n).lift(), k.into());
    }
}

#[test]
fn h_constraint_small_counts() {
    let c = PartitionConstraint::h_partitions();
    assert_eq!(count_exhaustive(&c, 0).unwrap(), 1u32.into());
    assert_eq!(count_exhaustive(&c, 1).unwrap(), 2u32.into());
    assert_eq!(count_exhaustive(&c, 2).unwrap(), 4u32.into());
    let h = named_series(SeriesName::H, Ring::Exact, 2);
    assert_eq!(h.coefficients(), ints(&[1, 2, 4]));
}

#[test]
fn g2_of_two_is_six() {
    let g2 = named_series(SeriesName::G(2), Ring::Exact, 2);
    assert_eq!(g2.coeff(2).lift(), 6.into());
    let dp = count_dp(&PartitionConstraint::overpartitions_gk(2), 2);
    assert_eq!(*dp.get(2), 6u32.into());
}

#[test]
fn theta_coefficients_count_representations() {
    let order = 400;
    let phi = theta_series(&ThetaAtom::phi(1), Ring::Exact, order).unwrap();
    let psi = theta_series(&ThetaAtom::psi(1), Ring::Exact, order).unwrap();
    for k in 0..=order as i64 {
        let squares = (-30i64..=30).filter(|m| m * m == k).count() as i64;
        let triangles = (0i64..=30).filter(|m| m * (m + 1) / 2 == k).count() as i64;
        assert_eq!(phi.coeff(k as usize).lift(), squares.into(), "phi at {}", k);
        assert_eq!(psi.coeff(k as usize).lift(), triangles.into(), "psi at {}", k);
    }
}

#[test]
fn general_theta_counts_signed_representations() {
    // f(-q, -q^5) = sum_m (-1)^m q^{3m^2 - 2m}
    let order = 300;
    let f = theta_series(&ThetaAtom::general((-1, 1), (-1, 5)).unwrap(), Ring::Exact, order).unwrap();
    let mut expect = vec![0i64; order + 1];
    for m in -20i64..=20 {
        let e = 3 * m * m - 2 * m;
        if (0..=order as i64).contains(&e) {
            expect[e as usize] += if m % 2 == 0 { 1 } else { -1 };
        }
    }
    assert_eq!(f.coefficients(), ints(&expect));
}

#[test]
fn legendre_matches_table_of_squares() {
    for p in primes_between(3, 200) {
        let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
        for xi in -40i64..=40 {
            let r = xi.rem_euclid(p as i64) as u64;
            let expect = if r == 0 {
                0
            } else if squares.contains(&r) {
                1
            } else {
                -1
            };
            assert_eq!(legendre(xi, p).unwrap(), expect, "({}/{})", xi, p);
        }
    }
}

#[test]
fn primality_matches_trial_division() {
    for n in 0u64..3000 {
        let naive = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        assert_eq!(is_prime(n), naive, "{}", n);
    }
}
