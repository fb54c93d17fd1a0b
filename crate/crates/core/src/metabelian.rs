//! Torsion of cyclic covers of a mapping torus of the 2-torus with monodromy
//! `A ∈ GL(2, Z)`: the n-fold cover has `Z² / (Aⁿ - I)Z²` as torsion
//! subgroup of its abelianization.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::homology::{smith_normal_form, IntMatrix};
use crate::{Error, Result};

pub type Mat2 = [[BigInt; 2]; 2];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn identity() -> Mat2 {
    [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]]
}

pub fn to_mat(a: [[i64; 2]; 2]) -> Mat2 {
    a.map(|r| r.map(BigInt::from))
}

pub fn power(a: &Mat2, mut n: u64) -> Mat2 {
    let mut base = a.clone();
    let mut acc = identity();
    while n > 0 {
        if n & 1 == 1 {
            acc = mul(&acc, &base);
        }
        base = mul(&base, &base);
        n >>= 1;
    }
    acc
}

fn det(a: &Mat2) -> BigInt {
    &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0]
}

pub fn trace(a: &Mat2) -> BigInt {
    &a[0][0] + &a[1][1]
}

/// Parses `"a,b,c,d"` as the row-major matrix `[[a, b], [c, d]]`.
pub fn parse_matrix(text: &str) -> Result<[[i64; 2]; 2]> {
    let v: Vec<i64> = text
        .split(',')
        .map(|s| s.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Malformed(format!("matrix entry: {e}")))?;
    match v[..] {
        [a, b, c, d] => Ok([[a, b], [c, d]]),
        _ => Err(Error::Malformed(format!("expected 4 matrix entries, got {}", v.len()))),
    }
}

fn check_unimodular(a: &Mat2) -> Result<()> {
    if !det(a).abs().is_one() {
        return Err(Error::Malformed(format!(
            "monodromy has determinant {}, not ±1",
            det(a)
        )));
    }
    Ok(())
}

fn shifted(a: &Mat2, n: u64) -> Mat2 {
    let mut m = power(a, n);
    m[0][0] -= 1;
    m[1][1] -= 1;
    m
}

/// `|det(Aⁿ - I)|`.
pub fn metabelian_torsion(a: [[i64; 2]; 2], n: u64) -> Result<BigUint> {
    let a = to_mat(a);
    check_unimodular(&a)?;
    if n == 0 {
        return Err(Error::Singular);
    }
    let d = det(&shifted(&a, n));
    if d.is_zero() {
        return Err(Error::Singular);
    }
    Ok(d.magnitude().clone())
}

/// Invariant factors of `Aⁿ - I`; at most two.
pub fn metabelian_invariant_factors(a: [[i64; 2]; 2], n: u64) -> Result<Vec<BigUint>> {
    let a = to_mat(a);
    check_unimodular(&a)?;
    let m = shifted(&a, n);
    let rows: Vec<Vec<BigInt>> = m.iter().map(|r| r.to_vec()).collect();
    let snf = smith_normal_form(&IntMatrix::from_rows(&rows, 2), false);
    if snf.rank < 2 {
        return Err(Error::Singular);
    }
    Ok(snf.invariant_factors())
}

/// `|det Aⁿ - tr Aⁿ + 1|`, the same torsion from the characteristic
/// polynomial.
pub fn trace_formula(a: [[i64; 2]; 2], n: u64) -> BigUint {
    let a = to_mat(a);
    let an = power(&a, n);
    let v: BigInt = det(&an) - trace(&an) + 1;
    v.magnitude().clone()
}

/// Whether `log T / n` lies within `tol_num/tol_den` (relative) of the log
/// of the spectral radius `λ`, for `T = |det(Aⁿ - I)|`.
///
/// The verdict is exact: with `k = n·(tol_den ∓ tol_num)` the claim is
/// `λ^(n(den-num)) ≤ T^den ≤ λ^(n(den+num))`, and `λ^k` is bracketed by
/// `|tr Aᵏ| ∓ 1` because the other eigenvalue has modulus `λ⁻¹ < 1`.
pub fn growth_within(a: [[i64; 2]; 2], n: u64, tol_num: u64, tol_den: u64) -> Result<bool> {
    let m = to_mat(a);
    check_unimodular(&m)?;
    let tr = trace(&m);
    let hyperbolic = if det(&m).is_one() {
        tr.abs() > BigInt::from(2)
    } else {
        !tr.is_zero()
    };
    if !hyperbolic {
        return Err(Error::Malformed("monodromy has no eigenvalue of modulus > 1".into()));
    }
    if tol_num >= tol_den {
        return Err(Error::Malformed("relative tolerance must be below 1".into()));
    }
    let t = metabelian_torsion(a, n)?;
    let lhs = Pow::pow(t, tol_den);
    let lower_exp = n * (tol_den - tol_num);
    let upper_exp = n * (tol_den + tol_num);
    let lower = BigInt::from(trace(&power(&m, lower_exp)).magnitude().clone()) + 1;
    let upper = BigInt::from(trace(&power(&m, upper_exp)).magnitude().clone()) - 1;
    let lhs = BigInt::from(lhs);
    Ok(lhs >= lower && lhs <= upper)
}

/// Natural log of a big integer, for display.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetabelianRow {
    pub n: u64,
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub torsion: BigUint,
    pub log_ratio: f64,
}

/// Rows for `n = 1..=max_n`; fails on the first singular level.
pub fn metabelian_series(a: [[i64; 2]; 2], max_n: u64) -> Result<Vec<MetabelianRow>> {
    (1..=max_n)
        .map(|n| {
            let torsion = metabelian_torsion(a, n)?;
            let log_ratio = ln_big(&torsion) / n as f64;
            Ok(MetabelianRow { n, torsion, log_ratio })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const CAT: [[i64; 2]; 2] = [[2, 1], [1, 1]];

    #[test]
    fn cat_map_torsion() {
        let t: Vec<u64> = (1..=4)
            .map(|n| metabelian_torsion(CAT, n).unwrap().to_u64().unwrap())
            .collect();
        assert_eq!(t, vec![1, 5, 16, 45]);
        for n in 1..=20 {
            assert_eq!(metabelian_torsion(CAT, n).unwrap(), trace_formula(CAT, n));
        }
    }

    #[test]
    fn identity_is_singular() {
        assert!(matches!(metabelian_torsion([[1, 0], [0, 1]], 3), Err(Error::Singular)));
        assert!(matches!(
            metabelian_torsion([[2, 0], [0, 1]], 1),
            Err(Error::Malformed(_))
        ));
    }

    #[test]
    fn growth_at_thirty() {
        assert!(growth_within(CAT, 30, 1, 50).unwrap());
        let lambda = (3.0 + 5f64.sqrt()) / 2.0;
        let r = ln_big(&metabelian_torsion(CAT, 30).unwrap()) / 30.0;
        assert!((r / lambda.ln() - 1.0).abs() < 0.02);
        // far too tight a tolerance at small n
        assert!(!growth_within(CAT, 2, 1, 1000).unwrap());
    }

    #[test]
    fn parse() {
        assert_eq!(parse_matrix("2,1,1,1").unwrap(), CAT);
        assert!(parse_matrix("2,1,1").is_err());
        assert!(parse_matrix("a,1,1,1").is_err());
    }

    #[test]
    fn ln_of_large_values() {
        let x = BigUint::from(3u32).pow(2000u32);
        assert!((ln_big(&x) - 2000.0 * 3f64.ln()).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn at_most_two_generators(n in 1u64..12, k in -3i64..=3) {
            // [[k, 1], [-1, 0]] has determinant 1
            let a = [[k, 1], [-1, 0]];
            match metabelian_invariant_factors(a, n) {
                Ok(f) => {
                    prop_assert!(f.len() <= 2);
                    prop_assert_eq!(f.iter().product::<BigUint>(), metabelian_torsion(a, n).unwrap());
                }
                Err(Error::Singular) => prop_assert!(metabelian_torsion(a, n).is_err()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }
}
