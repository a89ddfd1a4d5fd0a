//! Exact binomial identities: the alternating tail sum and the Vandermonde
//! ("cats and dogs") convolution, each computed both by direct summation and in
//! closed form.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `binom(n, k)`, zero outside `0 ≤ k ≤ n`.
pub fn binom(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `binom(n, k)` as a machine integer, when it fits.
pub fn binom_i64(n: i64, k: i64) -> Option<i64> {
    i64::try_from(binom(n, k)).ok()
}

/// Pascal's triangle up to a fixed row, for scans that hit the same values often.
#[derive(Clone, Debug)]
pub struct PascalTable {
    rows: Vec<Vec<BigUint>>,
}

impl PascalTable {
    pub fn new(max_n: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![BigUint::one()]);
        for n in 1..=max_n {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigUint::one());
            for k in 1..n {
                row.push(&prev[k - 1] + &prev[k]);
            }
            row.push(BigUint::one());
            rows.push(row);
        }
        Self { rows }
    }

    pub fn get(&self, n: i64, k: i64) -> BigUint {
        if n < 0 || k < 0 || k > n {
            return BigUint::zero();
        }
        match self.rows.get(n as usize) {
            Some(row) => row[k as usize].clone(),
            None => binom(n, k),
        }
    }
}

fn signed(v: BigUint, negative: bool) -> BigInt {
    let v = BigInt::from(v);
    if negative {
        -v
    } else {
        v
    }
}

fn check_tail(a: i64, b: i64) -> Result<()> {
    if a < 0 || a > b {
        return Err(Error::InvalidArgument(format!("need 0 ≤ A ≤ B, got A = {a}, B = {b}")));
    }
    Ok(())
}

/// `Σ_{k=A}^{B} (−1)^k binom(B, k)` by direct summation.
pub fn alternating_tail_sum(a: i64, b: i64) -> Result<BigInt> {
    check_tail(a, b)?;
    Ok((a..=b).map(|k| signed(binom(b, k), k % 2 == 1)).sum())
}

/// Closed form of the alternating tail: `(1 − 1)^B` for `A = 0` (so `1` at
/// `B = 0`, `0` otherwise), else `(−1)^A binom(B−1, A−1)`.
pub fn alternating_tail_closed(a: i64, b: i64) -> Result<BigInt> {
    check_tail(a, b)?;
    Ok(tail_closed_form(a, b, binom))
}

fn tail_closed_form(a: i64, b: i64, choose: impl Fn(i64, i64) -> BigUint) -> BigInt {
    match (a, b) {
        (0, 0) => BigInt::one(),
        (0, _) => BigInt::zero(),
        _ => signed(choose(b - 1, a - 1), a % 2 == 1),
    }
}

fn check_vandermonde(k: i64, n: i64, a: i64) -> Result<()> {
    if k < 0 || n < 0 || n + a < 0 || n + a > n + k {
        return Err(Error::InvalidArgument(format!(
            "need k, n ≥ 0 and 0 ≤ n + A ≤ n + k, got k = {k}, n = {n}, A = {a}"
        )));
    }
    Ok(())
}

/// `Σ_{i=max(0,A)}^{min(k,n+A)} binom(k, i) binom(n, n+A−i)`.
pub fn vandermonde_sum(k: i64, n: i64, a: i64) -> Result<BigUint> {
    check_vandermonde(k, n, a)?;
    Ok((a.max(0)..=k.min(n + a)).map(|i| binom(k, i) * binom(n, n + a - i)).sum())
}

/// `binom(n + k, n + A)`.
pub fn vandermonde_closed(k: i64, n: i64, a: i64) -> Result<BigUint> {
    check_vandermonde(k, n, a)?;
    Ok(binom(n + k, n + a))
}

/// Both sides of the Vandermonde convolution; errors if they ever disagree.
pub fn vandermonde(k: i64, n: i64, a: i64) -> Result<BigUint> {
    let lhs = vandermonde_sum(k, n, a)?;
    let rhs = vandermonde_closed(k, n, a)?;
    if lhs != rhs {
        return Err(Error::InvalidArgument(format!(
            "Vandermonde mismatch at k = {k}, n = {n}, A = {a}: {lhs} ≠ {rhs}"
        )));
    }
    Ok(lhs)
}

/// Outcome of a full grid scan of both identities.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct IdentityReport {
    pub tail_cases: usize,
    pub vandermonde_cases: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Scans `0 ≤ A ≤ B ≤ max` for the alternating tail and every admissible
/// `(k, n, A)` with `n + k ≤ max` for the convolution.
pub fn check_identities(max: i64) -> IdentityReport {
    let pascal = PascalTable::new(max.max(0) as usize);
    let mut report = IdentityReport::default();
    for b in 0..=max {
        let mut tail = BigInt::zero();
        // accumulate from the top so each A reuses the previous partial sum
        for a in (0..=b).rev() {
            tail += signed(pascal.get(b, a), a % 2 == 1);
            let closed = tail_closed_form(a, b, |n, k| pascal.get(n, k));
            report.tail_cases += 1;
            if tail != closed {
                report.failures.push(format!("alternating tail A = {a}, B = {b}: {tail} ≠ {closed}"));
            }
        }
    }
    for total in 0..=max {
        for k in 0..=total {
            let n = total - k;
            for a in -n..=k {
                let lhs: BigUint = (a.max(0)..=k.min(n + a)).map(|i| pascal.get(k, i) * pascal.get(n, n + a - i)).sum();
                let rhs = pascal.get(n + k, n + a);
                report.vandermonde_cases += 1;
                if lhs != rhs {
                    report.failures.push(format!("Vandermonde k = {k}, n = {n}, A = {a}: {lhs} ≠ {rhs}"));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binom(0, 0), BigUint::one());
        assert_eq!(binom(5, 2), BigUint::from(10u32));
        assert_eq!(binom(2, 1), BigUint::from(2u32));
        assert_eq!(binom(3, 4), BigUint::zero());
        assert_eq!(binom(3, -1), BigUint::zero());
        assert_eq!(binom(-1, 0), BigUint::zero());
        assert_eq!(binom_i64(66, 33), Some(7219428434016265740));
        assert_eq!(binom_i64(70, 35), None);
    }

    #[test]
    fn pascal_recurrence() {
        let t = PascalTable::new(40);
        for n in 1..=80 {
            for k in -1..=n + 1 {
                assert_eq!(binom(n, k), binom(n - 1, k) + binom(n - 1, k - 1), "n={n} k={k}");
                assert_eq!(t.get(n, k), binom(n, k));
            }
        }
    }

    #[test]
    fn alternating_tail_examples() {
        assert_eq!(alternating_tail_sum(0, 5).unwrap(), BigInt::zero());
        assert_eq!(alternating_tail_sum(2, 4).unwrap(), BigInt::from(3));
        assert_eq!(alternating_tail_closed(2, 4).unwrap(), BigInt::from(3));
        assert_eq!(alternating_tail_sum(3, 3).unwrap(), BigInt::from(-1));
        assert_eq!(alternating_tail_closed(3, 3).unwrap(), BigInt::from(-1));
        // the empty power: (1 - 1)^0 = 1
        assert_eq!(alternating_tail_sum(0, 0).unwrap(), BigInt::one());
        assert_eq!(alternating_tail_closed(0, 0).unwrap(), BigInt::one());
        assert!(alternating_tail_sum(-1, 3).is_err());
        assert!(alternating_tail_sum(4, 3).is_err());
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde(3, 2, 1).unwrap(), BigUint::from(10u32));
        assert_eq!(vandermonde_sum(3, 2, 1).unwrap(), BigUint::from(3u32 + 6 + 1));
        assert_eq!(vandermonde(4, 3, -3).unwrap(), BigUint::one());
        assert_eq!(vandermonde(0, 5, -2).unwrap(), binom(5, 3));
        assert!(vandermonde(2, 2, -3).is_err());
        assert!(vandermonde(2, 2, 3).is_err());
    }

    #[test]
    fn small_grid_scan() {
        let r = check_identities(12);
        assert!(r.ok(), "{:?}", r.failures);
        assert_eq!(r.tail_cases, (1..=13).sum::<usize>());
    }
}
