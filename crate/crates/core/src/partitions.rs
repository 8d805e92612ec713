//! Restricted colour partitions and overpartitions, counted two ways: a
//! knapsack table and (for small n) explicit enumeration.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::builders::eta_series;
use crate::series::Ring;

pub const MAX_COLOURS: u8 = 4;
pub const EXHAUSTIVE_LIMIT: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    ZeroModulus,
    ColourTableLength { modulus: u32, len: usize },
    NoAllowedParts,
    TooManyColours { residue: u32, colours: u8 },
    AboveExhaustiveLimit(usize),
    ZeroColours,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::ZeroModulus => f.write_str("modulus must be at least 1"),
            OracleError::ColourTableLength { modulus, len } => write!(
                f,
                "colour table has {} entries but the modulus is {}",
                len, modulus
            ),
            OracleError::NoAllowedParts => f.write_str("every residue class is excluded"),
            OracleError::TooManyColours { residue, colours } => write!(
                f,
                "residue {} has {} colours (at most {})",
                residue, colours, MAX_COLOURS
            ),
            OracleError::AboveExhaustiveLimit(n) => write!(
                f,
                "exhaustive enumeration is limited to n <= {} (got {})",
                EXHAUSTIVE_LIMIT, n
            ),
            OracleError::ZeroColours => f.write_str("the number of colours must be positive"),
        }
    }
}

/// Parts are allowed by their residue mod `modulus`; `colours[r]` copies of
/// each part `≡ r` exist (0 excludes the class).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionConstraint {
    modulus: u32,
    colours: Vec<u8>,
    overlined: bool,
}

impl PartitionConstraint {
    pub fn new(modulus: u32, colours: Vec<u8>, overlined: bool) -> Result<Self, OracleError> {
        if modulus == 0 {
            return Err(OracleError::ZeroModulus);
        }
        if colours.len() != modulus as usize {
            return Err(OracleError::ColourTableLength {
                modulus,
                len: colours.len(),
            });
        }
        if let Some((r, &c)) = colours.iter().enumerate().find(|(_, &c)| c > MAX_COLOURS) {
            return Err(OracleError::TooManyColours {
                residue: r as u32,
                colours: c,
            });
        }
        if colours.iter().all(|&c| c == 0) {
            return Err(OracleError::NoAllowedParts);
        }
        Ok(PartitionConstraint {
            modulus,
            colours,
            overlined,
        })
    }

    pub fn partitions() -> Self {
        PartitionConstraint::new(1, vec![1], false).unwrap()
    }

    pub fn overpartitions() -> Self {
        PartitionConstraint::new(1, vec![1], true).unwrap()
    }

    /// Overpartitions with no part `≡ 0 (mod 2k)` and two colours on parts
    /// `≡ k (mod 2k)`.
    pub fn overpartitions_gk(k: u32) -> Self {
        assert!(k >= 1);
        let s = 2 * k;
        let colours = (0..s)
            .map(|r| match r {
                0 => 0,
                r if r == k => 2,
                _ => 1,
            })
            .collect();
        PartitionConstraint::new(s, colours, true).unwrap()
    }

    /// Parts `≢ 0 (mod 8)`; parts `≡ 2, 6 (mod 8)` in one colour, the rest in
    /// two.
    pub fn h_partitions() -> Self {
        PartitionConstraint::new(8, vec![0, 2, 1, 2, 2, 2, 1, 2], false).unwrap()
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn colours(&self) -> &[u8] {
        &self.colours
    }

    pub fn overlined(&self) -> bool {
        self.overlined
    }

    pub fn colours_of(&self, value: usize) -> u8 {
        self.colours[value % self.modulus as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    counts: Vec<BigUint>,
}

impl CountTable {
    pub fn get(&self, n: usize) -> &BigUint {
        &self.counts[n]
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn as_slice(&self) -> &[BigUint] {
        &self.counts
    }

    /// Signed copies, for comparison against series coefficients.
    pub fn to_bigints(&self) -> Vec<BigInt> {
        self.counts.iter().cloned().map(BigInt::from).collect()
    }
}

/// Counts for `n = 0..=limit`: each kind contributes `(1 + q^v)/(1 - q^v)`
/// when overlined and `1/(1 - q^v)` otherwise.
pub fn count_dp(c: &PartitionConstraint, limit: usize) -> CountTable {
    let mut counts = vec![BigUint::zero(); limit + 1];
    counts[0] = BigUint::one();
    for v in 1..=limit {
        for _ in 0..c.colours_of(v) {
            if c.overlined {
                for n in (v..=limit).rev() {
                    let prev = counts[n - v].clone();
                    counts[n] += prev;
                }
            }
            for n in v..=limit {
                let prev = counts[n - v].clone();
                counts[n] += prev;
            }
        }
    }
    CountTable { counts }
}

/// Enumerates every partition of `n` into allowed values, every way of
/// spreading each multiplicity over the colours, and every choice of
/// overlines on the kinds that occur.
pub fn count_exhaustive(c: &PartitionConstraint, n: usize) -> Result<BigUint, OracleError> {
    if n > EXHAUSTIVE_LIMIT {
        return Err(OracleError::AboveExhaustiveLimit(n));
    }
    let values: Vec<usize> = (1..=n).rev().filter(|&v| c.colours_of(v) > 0).collect();
    let mut total: u128 = 0;
    let mut parts: Vec<(usize, usize)> = Vec::new();
    partitions_into(&values, n, &mut parts, &mut |parts| {
        let mut ways: u128 = 1;
        for &(v, mult) in parts {
            ways *= colourings(c.colours_of(v) as usize, mult, c.overlined);
        }
        total += ways;
    });
    Ok(BigUint::from(total))
}

/// Calls `visit` with each partition of `n` as (value, multiplicity) pairs,
/// values drawn from `values` (descending).
fn partitions_into(
    values: &[usize],
    n: usize,
    parts: &mut Vec<(usize, usize)>,
    visit: &mut dyn FnMut(&[(usize, usize)]),
) {
    if n == 0 {
        visit(parts);
        return;
    }
    for (i, &v) in values.iter().enumerate() {
        if v > n {
            continue;
        }
        for mult in 1..=n / v {
            parts.push((v, mult));
            partitions_into(&values[i + 1..], n - v * mult, parts, visit);
            parts.pop();
        }
    }
}

/// Number of coloured (and optionally overlined) versions of `mult` equal
/// parts in `colours` colours.
fn colourings(colours: usize, mult: usize, overlined: bool) -> u128 {
    let mut split = vec![0usize; colours];
    let mut total = 0u128;
    compositions(&mut split, 0, mult, &mut |split| {
        let used = split.iter().filter(|&&m| m > 0).count();
        // each used kind is independently overlined or not
        total += if overlined { 1 << used } else { 1 };
    });
    total
}

fn compositions(split: &mut [usize], at: usize, left: usize, visit: &mut dyn FnMut(&[usize])) {
    if at + 1 == split.len() {
        split[at] = left;
        visit(split);
        return;
    }
    for m in 0..=left {
        split[at] = m;
        compositions(split, at + 1, left - m, visit);
    }
}

/// `p_t(n)` for `n = 0..=limit`, the coefficients of `1/l_1^t`.
pub fn general_pt(t: u32, limit: usize) -> Result<CountTable, OracleError> {
    if t == 0 {
        return Err(OracleError::ZeroColours);
    }
    let euler = eta_series(1, Ring::Exact, limit).expect("l1 is well defined");
    let series = euler
        .pow(-(t as i64))
        .expect("l1 has constant term 1");
    let counts = series
        .coefficients()
        .into_iter()
        .map(|c| c.to_biguint().expect("partition counts are nonnegative"))
        .collect();
    Ok(CountTable { counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(t: &CountTable) -> Vec<u64> {
        t.as_slice()
            .iter()
            .map(|c| u64::try_from(c.clone()).unwrap())
            .collect()
    }

    #[test]
    fn dp_examples() {
        assert_eq!(
            small(&count_dp(&PartitionConstraint::partitions(), 5)),
            [1, 1, 2, 3, 5, 7]
        );
        assert_eq!(
            small(&count_dp(&PartitionConstraint::overpartitions(), 4)),
            [1, 2, 4, 8, 14]
        );
        assert_eq!(
            small(&count_dp(&PartitionConstraint::overpartitions_gk(2), 3)),
            [1, 2, 6, 12]
        );
    }

    #[test]
    fn exhaustive_examples() {
        let h = PartitionConstraint::h_partitions();
        assert_eq!(count_exhaustive(&h, 0).unwrap(), BigUint::from(1u8));
        assert_eq!(count_exhaustive(&h, 1).unwrap(), BigUint::from(2u8));
        assert_eq!(count_exhaustive(&h, 2).unwrap(), BigUint::from(4u8));
        assert_eq!(
            count_exhaustive(&h, 31),
            Err(OracleError::AboveExhaustiveLimit(31))
        );
    }

    #[test]
    fn general_pt_examples() {
        assert_eq!(small(&general_pt(1, 4).unwrap()), [1, 1, 2, 3, 5]);
        assert_eq!(small(&general_pt(2, 2).unwrap())[2], 5);
        assert_eq!(small(&general_pt(7, 0).unwrap()), [1]);
        assert!(general_pt(0, 3).is_err());
    }

    #[test]
    fn constraint_validation() {
        assert_eq!(
            PartitionConstraint::new(0, vec![], false),
            Err(OracleError::ZeroModulus)
        );
        assert!(PartitionConstraint::new(2, vec![1], false).is_err());
        assert_eq!(
            PartitionConstraint::new(2, vec![0, 0], true),
            Err(OracleError::NoAllowedParts)
        );
        assert!(PartitionConstraint::new(1, vec![5], true).is_err());
    }

    #[test]
    fn colourings_small_cases() {
        // two equal parts, two colours: aa, ab, bb
        assert_eq!(colourings(2, 2, false), 3);
        // overlined: aa x2, bb x2, ab x4
        assert_eq!(colourings(2, 2, true), 8);
        assert_eq!(colourings(1, 3, true), 2);
    }
}
