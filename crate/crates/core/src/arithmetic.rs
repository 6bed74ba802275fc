//! Linear sieve tables (smallest prime factor, Λ(n), ω(n)) and the
//! (x − n)-weighted character–prime sums.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::characters::{gcd, Character};
use crate::numeric::{ComplexSum, NeumaierSum};

pub const DEFAULT_TABLE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithError {
    #[error("table limit must be at least 1")]
    EmptyTable,
    #[error("table limit {limit} exceeds memory cap {cap}")]
    LimitTooLarge { limit: u64, cap: u64 },
    #[error("argument {x} exceeds table limit {limit}")]
    BeyondTable { x: f64, limit: u64 },
}

/// Sieve tables over [1, N]. Index 0 is unused.
#[derive(Debug, Clone)]
pub struct ArithTables {
    limit: u64,
    smallest_prime_factor: Vec<u32>,
    von_mangoldt: Vec<f64>,
    omega: Vec<u8>,
}

impl ArithTables {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of n ≥ 2.
    pub fn smallest_prime_factor(&self, n: u64) -> u64 {
        u64::from(self.smallest_prime_factor[n as usize])
    }

    pub fn von_mangoldt(&self, n: u64) -> f64 {
        self.von_mangoldt[n as usize]
    }

    pub fn omega(&self, n: u64) -> u8 {
        self.omega[n as usize]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.smallest_prime_factor(n) == n
    }

    /// Prime powers n ≤ x together with Λ(n).
    pub fn prime_powers_up_to(&self, x: u64) -> impl Iterator<Item = (u64, f64)> + '_ {
        (2..=x.min(self.limit)).filter_map(move |n| {
            let l = self.von_mangoldt[n as usize];
            (l > 0.0).then_some((n, l))
        })
    }

    fn check(&self, x: f64) -> Result<(), ArithError> {
        if x > self.limit as f64 {
            Err(ArithError::BeyondTable { x, limit: self.limit })
        } else {
            Ok(())
        }
    }
}

pub fn build_tables(limit: u64) -> Result<ArithTables, ArithError> {
    build_tables_capped(limit, DEFAULT_TABLE_LIMIT)
}

/// Linear sieve: every composite is struck exactly once by its least prime.
pub fn build_tables_capped(limit: u64, cap: u64) -> Result<ArithTables, ArithError> {
    if limit == 0 {
        return Err(ArithError::EmptyTable);
    }
    if limit > cap {
        return Err(ArithError::LimitTooLarge { limit, cap });
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let m = i * p as usize;
            if p > si || m > n {
                break;
            }
            spf[m] = p;
        }
    }

    let mut von_mangoldt = vec![0.0f64; n + 1];
    let mut omega = vec![0u8; n + 1];
    // rest[i] = i with every factor spf(i) removed
    let mut rest = vec![1u32; n + 1];
    for i in 2..=n {
        let p = spf[i] as usize;
        let j = i / p;
        if j.is_multiple_of(p) {
            rest[i] = rest[j];
            omega[i] = omega[j];
        } else {
            rest[i] = j as u32;
            omega[i] = omega[j] + 1;
        }
        if rest[i] == 1 {
            von_mangoldt[i] = (p as f64).ln();
        }
    }

    Ok(ArithTables { limit, smallest_prime_factor: spf, von_mangoldt, omega })
}

/// Σ_{n ≤ x} χ(n) Λ(n) (x − n).
pub fn linear_weighted_sum(chi: &Character, x: f64, tables: &ArithTables) -> Result<Complex64, ArithError> {
    tables.check(x)?;
    if x < 2.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut acc = ComplexSum::new();
    for (n, lambda) in tables.prime_powers_up_to(x.floor() as u64) {
        let c = chi.value_complex(n % chi.modulus());
        if c.re != 0.0 || c.im != 0.0 {
            acc += c * (lambda * (x - n as f64));
        }
    }
    Ok(acc.value())
}

/// Splits Σ Λ(n)(x − n) into the part coprime to q and the rest.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PrincipalDecomposition {
    pub full_sum: f64,
    pub restricted_sum: f64,
    pub discrepancy: f64,
    /// discrepancy / (x log x log q), 0 when that scale vanishes
    pub ratio: f64,
}

pub fn principal_decomposition_check(
    q: u64,
    x: f64,
    tables: &ArithTables,
) -> Result<PrincipalDecomposition, ArithError> {
    tables.check(x)?;
    let mut full = NeumaierSum::new();
    let mut restricted = NeumaierSum::new();
    let mut discrepancy = NeumaierSum::new();
    if x >= 2.0 {
        for (n, lambda) in tables.prime_powers_up_to(x.floor() as u64) {
            let term = lambda * (x - n as f64);
            full += term;
            if gcd(n, q) == 1 {
                restricted += term;
            } else {
                discrepancy += term;
            }
        }
    }
    let scale = x * x.ln() * (q as f64).ln();
    let discrepancy = discrepancy.value();
    Ok(PrincipalDecomposition {
        full_sum: full.value(),
        restricted_sum: restricted.value(),
        discrepancy,
        ratio: if scale > 0.0 { discrepancy / scale } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;
    use std::f64::consts::LN_2;

    fn quadratic(q: u64) -> Character {
        enumerate_characters(q).unwrap().into_iter().find(|c| c.order() == 2).unwrap()
    }

    #[test]
    fn small_tables() {
        let t = build_tables(10).unwrap();
        assert_eq!(t.von_mangoldt(8), LN_2);
        assert_eq!(t.von_mangoldt(6), 0.0);
        assert_eq!(t.von_mangoldt(9), 3f64.ln());
        let t = build_tables(12).unwrap();
        assert_eq!(t.omega(12), 2);
        assert_eq!(t.omega(1), 0);
        let t = build_tables(1).unwrap();
        assert_eq!(t.von_mangoldt(1), 0.0);
        assert!(build_tables(0).is_err());
        assert!(matches!(build_tables_capped(1000, 100), Err(ArithError::LimitTooLarge { .. })));
    }

    #[test]
    fn tables_agree_with_trial_division() {
        let t = build_tables(5000).unwrap();
        for n in 2..=5000u64 {
            let f = crate::characters::factorize(n);
            assert_eq!(t.omega(n) as usize, f.len(), "n={n}");
            assert_eq!(t.smallest_prime_factor(n), f[0].0);
            let expected = if f.len() == 1 { (f[0].0 as f64).ln() } else { 0.0 };
            assert_eq!(t.von_mangoldt(n), expected, "n={n}");
        }
    }

    #[test]
    fn chebyshev_psi_near_n() {
        let n = 200_000u64;
        let t = build_tables(n).unwrap();
        let psi: f64 = crate::numeric::compensated_sum((1..=n).map(|k| t.von_mangoldt(k)));
        assert!((psi / n as f64 - 1.0).abs() < 0.05, "psi={psi}");
    }

    #[test]
    fn linear_sums() {
        let t = build_tables(1000).unwrap();
        let p = Character::principal(3).unwrap();
        let main = linear_weighted_sum(&p, 1000.0, &t).unwrap();
        assert!((main.re / 500_000.0 - 1.0).abs() < 0.1, "{main}");
        assert!(main.im.abs() < 1e-9 * main.norm());
        let twisted = linear_weighted_sum(&quadratic(3), 1000.0, &t).unwrap();
        assert!(twisted.norm() < main.re);
        assert_eq!(linear_weighted_sum(&p, 1.5, &t).unwrap(), Complex64::new(0.0, 0.0));
        assert!(linear_weighted_sum(&p, 1000.5, &t).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let t = build_tables(1000).unwrap();
        let d = principal_decomposition_check(2, 10.0, &t).unwrap();
        let expected = LN_2 * (8.0 + 6.0 + 2.0);
        assert!((d.discrepancy - expected).abs() < 1e-12);
        let d = principal_decomposition_check(3, 1000.0, &t).unwrap();
        let expected: f64 = (1..=6).map(|k| 3f64.ln() * (1000.0 - 3f64.powi(k))).sum();
        assert!((d.discrepancy - expected).abs() < 1e-9);
        assert!((d.full_sum - d.restricted_sum - d.discrepancy).abs() < 1e-9);
        let d = principal_decomposition_check(7, 1.0, &t).unwrap();
        assert_eq!((d.full_sum, d.restricted_sum, d.discrepancy), (0.0, 0.0, 0.0));
    }
}
