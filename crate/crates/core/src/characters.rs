//! Dirichlet characters in Conrey labelling.
//!
//! A character mod q is stored as an exponent vector over fixed generators of
//! the CRT components of (ℤ/qℤ)^×. Odd prime powers p^e use the least g that
//! is a primitive root mod p² (hence mod every power of p); 2^e for e ≥ 3 uses
//! the pair (−1, 5). Values are kept as exact fractions k/order of a full turn
//! and only converted to floating point at the boundary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

use crate::numeric::ComplexSum;

/// Largest modulus for which a single character can be built.
pub const MAX_MODULUS: u64 = 10_000_000;
/// Default cap for enumerating the whole character group.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharacterError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("index {index} is not coprime to modulus {modulus}")]
    NotCoprime { modulus: u64, index: u64 },
    #[error("index {index} out of range for modulus {modulus}")]
    IndexOutOfRange { modulus: u64, index: u64 },
    #[error("modulus {modulus} exceeds cap {cap}")]
    ModulusTooLarge { modulus: u64, cap: u64 },
    #[error("requires primitive character, got {0} (conductor {1})")]
    NotPrimitive(CharacterLabel, u64),
    #[error("n(χ) undefined for χ₀ ({0})")]
    Principal(CharacterLabel),
    #[error("malformed character label {0:?}: expected \"q.index\"")]
    Parse(String),
}

/// Conrey label `q.index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacterLabel {
    modulus: u64,
    index: u64,
}

impl CharacterLabel {
    pub fn new(modulus: u64, index: u64) -> Result<Self, CharacterError> {
        if modulus == 0 {
            return Err(CharacterError::ZeroModulus);
        }
        let in_range = if modulus == 1 { index == 1 } else { index >= 1 && index < modulus };
        if !in_range {
            return Err(CharacterError::IndexOutOfRange { modulus, index });
        }
        if gcd(index, modulus) != 1 {
            return Err(CharacterError::NotCoprime { modulus, index });
        }
        Ok(Self { modulus, index })
    }

    pub fn principal(modulus: u64) -> Result<Self, CharacterError> {
        Self::new(modulus, 1)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn index(&self) -> u64 {
        self.index
    }
}

impl fmt::Display for CharacterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.modulus, self.index)
    }
}

impl FromStr for CharacterLabel {
    type Err = CharacterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CharacterError::Parse(s.to_string());
        let (q, m) = s.trim().split_once('.').ok_or_else(bad)?;
        let q: u64 = q.parse().map_err(|_| bad())?;
        let m: u64 = m.parse().map_err(|_| bad())?;
        CharacterLabel::new(q, m)
    }
}

impl Serialize for CharacterLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CharacterLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A character value: zero or a root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitComplexValue {
    pub re: f64,
    pub im: f64,
}

impl UnitComplexValue {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };

    /// e^{2πi k / n}, exact on quarter turns.
    pub fn root_of_unity(k: u64, n: u64) -> Self {
        let k = k % n;
        if (4 * k).is_multiple_of(n) {
            return match 4 * k / n {
                0 => Self { re: 1.0, im: 0.0 },
                1 => Self { re: 0.0, im: 1.0 },
                2 => Self { re: -1.0, im: 0.0 },
                _ => Self { re: 0.0, im: -1.0 },
            };
        }
        let (s, c) = (std::f64::consts::TAU * k as f64 / n as f64).sin_cos();
        Self { re: c, im: s }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

impl From<UnitComplexValue> for Complex64 {
    fn from(v: UnitComplexValue) -> Self {
        Complex64::new(v.re, v.im)
    }
}

#[derive(Debug)]
struct Generator {
    component: usize,
    order: u64,
    // residue mod p^e -> discrete log, u32::MAX for non-units
    dlog: Vec<u32>,
}

#[derive(Debug)]
struct Component {
    prime: u64,
    exponent: u32,
    modulus: u64,
    root: u64,
}

/// The group of characters mod q: CRT data and discrete-log tables.
#[derive(Debug)]
pub struct CharacterGroup {
    modulus: u64,
    components: Vec<Component>,
    generators: Vec<Generator>,
    exponent: u64,
}

impl CharacterGroup {
    pub fn new(modulus: u64) -> Result<Arc<Self>, CharacterError> {
        if modulus == 0 {
            return Err(CharacterError::ZeroModulus);
        }
        if modulus > MAX_MODULUS {
            return Err(CharacterError::ModulusTooLarge { modulus, cap: MAX_MODULUS });
        }
        let mut components = Vec::new();
        let mut generators = Vec::new();
        for (prime, exponent) in factorize(modulus) {
            let pe = prime.pow(exponent);
            let ci = components.len();
            if prime == 2 {
                components.push(Component { prime, exponent, modulus: pe, root: 5 });
                if exponent == 2 {
                    let mut dlog = vec![u32::MAX; 4];
                    dlog[1] = 0;
                    dlog[3] = 1;
                    generators.push(Generator { component: ci, order: 2, dlog });
                } else if exponent >= 3 {
                    let half = pe / 4;
                    let mut sign = vec![u32::MAX; pe as usize];
                    let mut five = vec![u32::MAX; pe as usize];
                    let mut pow = 1u64;
                    for a in 0..half {
                        sign[pow as usize] = 0;
                        five[pow as usize] = a as u32;
                        let neg = pe - pow;
                        sign[neg as usize] = 1;
                        five[neg as usize] = a as u32;
                        pow = pow * 5 % pe;
                    }
                    generators.push(Generator { component: ci, order: 2, dlog: sign });
                    generators.push(Generator { component: ci, order: half, dlog: five });
                }
            } else {
                let root = primitive_root_lifting(prime);
                let order = pe / prime * (prime - 1);
                let mut dlog = vec![u32::MAX; pe as usize];
                let mut pow = 1u64;
                for k in 0..order {
                    dlog[pow as usize] = k as u32;
                    pow = pow * root % pe;
                }
                components.push(Component { prime, exponent, modulus: pe, root });
                generators.push(Generator { component: ci, order, dlog });
            }
        }
        let exponent = generators.iter().fold(1, |acc, g| lcm(acc, g.order));
        Ok(Arc::new(Self { modulus, components, generators, exponent }))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// φ(q).
    pub fn size(&self) -> u64 {
        self.generators.iter().map(|g| g.order).product()
    }

    fn dlogs(&self, n: u64) -> Option<Vec<u64>> {
        // the factor 2^1 carries no generator, so coprimality is checked here
        if gcd(n % self.modulus, self.modulus) != 1 {
            return None;
        }
        let mut out = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let c = &self.components[g.component];
            let l = g.dlog[(n % c.modulus) as usize];
            if l == u32::MAX {
                return None;
            }
            out.push(u64::from(l));
        }
        Some(out)
    }

    pub fn character(self: &Arc<Self>, index: u64) -> Result<Character, CharacterError> {
        let label = CharacterLabel::new(self.modulus, index)?;
        let exps = self.dlogs(index).ok_or(CharacterError::NotCoprime { modulus: self.modulus, index })?;
        Ok(Character::from_parts(Arc::clone(self), label, exps))
    }

    /// All φ(q) characters, ordered by Conrey index.
    pub fn characters(self: &Arc<Self>) -> Vec<Character> {
        (1..self.modulus.max(2))
            .filter(|&m| gcd(m, self.modulus) == 1)
            .map(|m| self.character(m).expect("coprime index"))
            .collect()
    }
}

/// A Dirichlet character with cached order, parity and conductor data.
#[derive(Clone)]
pub struct Character {
    group: Arc<CharacterGroup>,
    label: CharacterLabel,
    exponents: Vec<u64>,
    order: u64,
    parity_kappa: u8,
    conductor: u64,
    inducing_label: CharacterLabel,
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Character")
            .field("label", &self.label)
            .field("order", &self.order)
            .field("parity_kappa", &self.parity_kappa)
            .field("conductor", &self.conductor)
            .field("inducing_label", &self.inducing_label)
            .finish()
    }
}

impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}

impl Eq for Character {}

impl Character {
    pub fn from_label(label: CharacterLabel) -> Result<Self, CharacterError> {
        CharacterGroup::new(label.modulus())?.character(label.index())
    }

    pub fn principal(modulus: u64) -> Result<Self, CharacterError> {
        CharacterGroup::new(modulus)?.character(1)
    }

    fn from_parts(group: Arc<CharacterGroup>, label: CharacterLabel, exponents: Vec<u64>) -> Self {
        let order = group.generators.iter().zip(&exponents).fold(1, |acc, (g, &x)| lcm(acc, g.order / gcd(x, g.order)));

        // conductor and the inducing exponents, component by component
        let mut conductor = 1u64;
        let mut inducing_residues = Vec::new();
        for (ci, comp) in group.components.iter().enumerate() {
            let gens: Vec<(usize, &Generator)> =
                group.generators.iter().enumerate().filter(|(_, g)| g.component == ci).collect();
            let (f_exp, residue) = if comp.prime == 2 {
                match gens.len() {
                    0 => (0, 1),
                    1 => {
                        let u = exponents[gens[0].0];
                        if u == 0 {
                            (0, 1)
                        } else {
                            (2, 3)
                        }
                    }
                    _ => {
                        let u = exponents[gens[0].0];
                        let a = exponents[gens[1].0];
                        if a == 0 {
                            if u == 0 {
                                (0, 1)
                            } else {
                                (2, 3)
                            }
                        } else {
                            let f = comp.exponent - a.trailing_zeros();
                            let fm = 1u64 << f;
                            let a_red = a >> (comp.exponent - f);
                            let mut r = pow_mod(5, a_red, fm);
                            if u == 1 {
                                r = fm - r;
                            }
                            (f, r)
                        }
                    }
                }
            } else {
                let x = exponents[gens[0].0];
                if x == 0 {
                    (0, 1)
                } else {
                    let v = valuation(x, comp.prime).min(comp.exponent - 1);
                    let f = comp.exponent - v;
                    let fm = comp.prime.pow(f);
                    let x_red = x / comp.prime.pow(v);
                    (f, pow_mod(comp.root, x_red, fm))
                }
            };
            let fm = comp.prime.pow(f_exp);
            conductor *= fm;
            inducing_residues.push((residue % fm.max(1), fm));
        }
        let inducing_index = if conductor == 1 { 1 } else { crt(&inducing_residues) };
        let inducing_label =
            CharacterLabel::new(conductor, inducing_index).expect("inducing index is a unit mod the conductor");

        let mut ch = Self { group, label, exponents, order, parity_kappa: 0, conductor, inducing_label };
        let q = ch.modulus();
        if q > 2 {
            ch.parity_kappa = if ch.exponent_of(q - 1) == Some(0) { 0 } else { 1 };
        }
        ch
    }

    pub fn label(&self) -> CharacterLabel {
        self.label
    }

    pub fn modulus(&self) -> u64 {
        self.label.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// κ with χ(−1) = (−1)^κ.
    pub fn parity_kappa(&self) -> u8 {
        self.parity_kappa
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn inducing_label(&self) -> CharacterLabel {
        self.inducing_label
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    /// χ(n) = e^{2πi k/order}; returns k, or `None` when gcd(n, q) > 1.
    pub fn exponent_of(&self, n: u64) -> Option<u64> {
        let logs = self.group.dlogs(n)?;
        let big = self.group.exponent;
        let mut k: u128 = 0;
        for ((g, &x), l) in self.group.generators.iter().zip(&self.exponents).zip(logs) {
            let scale = u128::from(big / g.order);
            k += u128::from(x) * u128::from(l) % u128::from(g.order) * scale;
        }
        let k = (k % u128::from(big)) as u64;
        Some(k / (big / self.order))
    }

    pub fn exponent_of_signed(&self, n: i64) -> Option<u64> {
        self.exponent_of(n.rem_euclid(self.modulus() as i64) as u64)
    }

    pub fn value(&self, n: i64) -> UnitComplexValue {
        match self.exponent_of_signed(n) {
            Some(k) => UnitComplexValue::root_of_unity(k, self.order),
            None => UnitComplexValue::ZERO,
        }
    }

    pub fn value_complex(&self, n: u64) -> Complex64 {
        match self.exponent_of(n) {
            Some(k) => UnitComplexValue::root_of_unity(k, self.order).into(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Values χ(0), χ(1), …, χ(q−1).
    pub fn value_table(&self) -> Vec<Complex64> {
        (0..self.modulus()).map(|n| self.value_complex(n)).collect()
    }

    pub fn conjugate(&self) -> Character {
        let q = self.modulus();
        let inv = if q == 1 { 1 } else { mod_inverse(self.label.index, q) };
        self.group.character(inv).expect("inverse of a unit is a unit")
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Character {
        if self.is_primitive() {
            return self.clone();
        }
        Character::from_label(self.inducing_label).expect("conductor divides a valid modulus")
    }

    pub fn require_primitive(&self) -> Result<(), CharacterError> {
        if self.is_primitive() {
            Ok(())
        } else {
            Err(CharacterError::NotPrimitive(self.label, self.conductor))
        }
    }
}

/// Every character mod q, with the default enumeration cap.
pub fn enumerate_characters(q: u64) -> Result<Vec<Character>, CharacterError> {
    enumerate_characters_capped(q, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_characters_capped(q: u64, cap: u64) -> Result<Vec<Character>, CharacterError> {
    if q > cap {
        return Err(CharacterError::ModulusTooLarge { modulus: q, cap });
    }
    Ok(CharacterGroup::new(q)?.characters())
}

pub fn char_value(chi: &Character, n: i64) -> UnitComplexValue {
    chi.value(n)
}

pub fn character_parity(chi: &Character) -> u8 {
    chi.parity_kappa()
}

pub fn conductor_and_primitive(chi: &Character) -> (u64, Character) {
    (chi.conductor(), chi.primitive())
}

/// τ(χ) = Σ_{a=1}^{q} χ(a) e^{2πia/q} by direct summation.
pub fn gauss_sum(chi: &Character) -> Result<Complex64, CharacterError> {
    chi.require_primitive()?;
    let q = chi.modulus();
    let order = chi.order();
    let full = u128::from(q) * u128::from(order);
    let mut acc = ComplexSum::new();
    for a in 1..=q {
        if let Some(k) = chi.exponent_of(a % q) {
            // k/order + a/q as a single fraction of a turn
            let num = (u128::from(k) * u128::from(q) + u128::from(a) * u128::from(order)) % full;
            acc += UnitComplexValue::root_of_unity(num as u64, full as u64).into();
        }
    }
    Ok(acc.value())
}

/// ε(χ) = τ(χ) / (i^κ √q).
pub fn root_number(chi: &Character) -> Result<Complex64, CharacterError> {
    let tau = gauss_sum(chi)?;
    let i_kappa = if chi.parity_kappa() == 1 { Complex64::new(0.0, 1.0) } else { Complex64::new(1.0, 0.0) };
    Ok(tau / (i_kappa * (chi.modulus() as f64).sqrt()))
}

/// n(χ): least n ≥ 2 coprime to q with χ(n) ≠ 1.
pub fn least_nonresidue(chi: &Character) -> Result<u64, CharacterError> {
    if chi.is_principal() {
        return Err(CharacterError::Principal(chi.label()));
    }
    let q = chi.modulus();
    (2..q).find(|&n| matches!(chi.exponent_of(n), Some(k) if k != 0)).ok_or(CharacterError::Principal(chi.label()))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn valuation(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

pub(crate) fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = u128::from(m);
    let mut b = u128::from(base) % m128;
    let mut r: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            r = r * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    r as u64
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

fn crt(residues: &[(u64, u64)]) -> u64 {
    let mut acc = 0u64;
    let mut modulus = 1u64;
    for &(r, m) in residues {
        if m == 1 {
            continue;
        }
        // acc + modulus * t ≡ r (mod m)
        let inv = mod_inverse(modulus % m, m);
        let diff = (r + m - acc % m) % m;
        let t = (u128::from(diff) * u128::from(inv) % u128::from(m)) as u64;
        acc += modulus * t;
        modulus *= m;
    }
    acc
}

/// Prime factorisation by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).first() == Some(&(n, 1))
}

/// Least g that is a primitive root mod p and mod p².
fn primitive_root_lifting(p: u64) -> u64 {
    let phi_factors: Vec<u64> = factorize(p - 1).into_iter().map(|(r, _)| r).collect();
    let p2 = p * p;
    (2..)
        .find(|&g| {
            g % p != 0 && phi_factors.iter().all(|&r| pow_mod(g, (p - 1) / r, p) != 1) && pow_mod(g, p - 1, p2) != 1
        })
        .expect("primitive roots exist mod odd prime powers")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(q: u64, m: u64) -> Character {
        Character::from_label(CharacterLabel::new(q, m).unwrap()).unwrap()
    }

    fn quadratic(q: u64) -> Character {
        enumerate_characters(q).unwrap().into_iter().find(|c| c.order() == 2 && c.is_primitive()).unwrap()
    }

    #[test]
    fn group_sizes() {
        assert_eq!(enumerate_characters(3).unwrap().len(), 2);
        assert_eq!(enumerate_characters(8).unwrap().len(), 4);
        let one = enumerate_characters(1).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].is_principal());
        assert_eq!(enumerate_characters(2).unwrap().len(), 1);
    }

    #[test]
    fn vanishes_off_units_with_single_factor_two() {
        for q in [2u64, 6, 10, 14, 30, 98] {
            for chi in enumerate_characters(q).unwrap() {
                for n in 0..q {
                    let unit = gcd(n, q) == 1;
                    assert_eq!(chi.value_complex(n).norm() > 0.5, unit, "{} at {n}", chi.label());
                }
            }
        }
    }

    #[test]
    fn label_parsing() {
        let l: CharacterLabel = "7.3".parse().unwrap();
        assert_eq!((l.modulus(), l.index()), (7, 3));
        assert_eq!(l.to_string(), "7.3");
        assert!("7.7".parse::<CharacterLabel>().is_err());
        assert!("12.4".parse::<CharacterLabel>().is_err());
        assert!("abc".parse::<CharacterLabel>().is_err());
        assert_eq!("1.1".parse::<CharacterLabel>().unwrap().modulus(), 1);
    }

    #[test]
    fn legendre_mod_5() {
        let chi = quadratic(5);
        assert_eq!(chi.label().index(), 4);
        // 2^((5-1)/2) = 4 ≡ -1 mod 5
        assert_eq!(pow_mod(2, 2, 5), 4);
        assert_eq!(chi.value(2), UnitComplexValue { re: -1.0, im: 0.0 });
        assert_eq!(chi.value(5), UnitComplexValue::ZERO);
        assert_eq!(chi.value(1), UnitComplexValue { re: 1.0, im: 0.0 });
        assert_eq!(chi.parity_kappa(), 0);
    }

    #[test]
    fn parity_examples() {
        assert_eq!(quadratic(3).parity_kappa(), 1);
        assert_eq!(quadratic(5).parity_kappa(), 0);
        assert_eq!(Character::principal(12).unwrap().parity_kappa(), 0);
    }

    #[test]
    fn conductors() {
        let q7 = quadratic(7);
        assert_eq!(q7.conductor(), 7);
        assert_eq!(q7.primitive(), q7);
        let p12 = Character::principal(12).unwrap();
        assert_eq!(p12.conductor(), 1);
        assert_eq!(p12.inducing_label().to_string(), "1.1");
        // the real character mod 9 comes from mod 3
        let chi9 = ch(9, 8);
        assert_eq!(chi9.order(), 2);
        assert_eq!(chi9.conductor(), 3);
        assert_eq!(chi9.inducing_label().to_string(), "3.2");
    }

    fn brute_conductor(chi: &Character) -> (u64, CharacterLabel) {
        let q = chi.modulus();
        for f in 1..=q {
            if !q.is_multiple_of(f) {
                continue;
            }
            for cand in enumerate_characters(f).unwrap() {
                let agrees = (1..q).filter(|&n| gcd(n, q) == 1).all(|n| {
                    let a: Complex64 = chi.value(n as i64).into();
                    let b: Complex64 = cand.value(n as i64).into();
                    (a - b).norm() < 1e-12
                });
                if agrees {
                    return (f, cand.label());
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn conductor_matches_brute_force() {
        for q in [1u64, 4, 8, 9, 12, 16, 24, 25, 27, 32, 36, 45, 48, 63, 64] {
            for chi in enumerate_characters(q).unwrap() {
                let (f, label) = brute_conductor(&chi);
                assert_eq!(chi.conductor(), f, "{}", chi.label());
                assert_eq!(chi.inducing_label(), label, "{}", chi.label());
            }
        }
    }

    #[test]
    fn order_is_exact() {
        for q in [7u64, 15, 16, 20, 27] {
            for chi in enumerate_characters(q).unwrap() {
                let o = chi.order();
                let brute = (1..=q)
                    .find(|&d| (1..q).filter(|&n| gcd(n, q) == 1).all(|n| chi.exponent_of(n).unwrap() * d % o == 0))
                    .unwrap();
                assert_eq!(o, brute, "{}", chi.label());
            }
        }
    }

    #[test]
    fn gauss_sums_small() {
        let t5 = gauss_sum(&quadratic(5)).unwrap();
        assert!((t5.re - 5f64.sqrt()).abs() < 1e-12 && t5.im.abs() < 1e-12);
        let t3 = gauss_sum(&quadratic(3)).unwrap();
        assert!(t3.re.abs() < 1e-12 && (t3.im - 3f64.sqrt()).abs() < 1e-12);
        let t1 = gauss_sum(&Character::principal(1).unwrap()).unwrap();
        assert!((t1 - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(gauss_sum(&ch(9, 8)), Err(CharacterError::NotPrimitive(..))));
    }

    #[test]
    fn root_numbers() {
        for q in [3u64, 5] {
            let eps = root_number(&quadratic(q)).unwrap();
            assert!((eps - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        for q in 1..=50 {
            for chi in enumerate_characters(q).unwrap().into_iter().filter(|c| c.is_primitive()) {
                let eps = root_number(&chi).unwrap();
                assert!((eps.norm() - 1.0).abs() < 1e-9, "{}", chi.label());
            }
        }
    }

    #[test]
    fn nonresidues() {
        assert_eq!(least_nonresidue(&quadratic(7)).unwrap(), 3);
        assert_eq!(least_nonresidue(&quadratic(3)).unwrap(), 2);
        assert!(matches!(least_nonresidue(&Character::principal(7).unwrap()), Err(CharacterError::Principal(_))));
    }

    #[test]
    fn conjugate_values() {
        for chi in enumerate_characters(13).unwrap() {
            let c = chi.conjugate();
            for n in 0..26 {
                let a: Complex64 = chi.value(n).into();
                let b: Complex64 = c.value(n).into();
                assert!((a.conj() - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(enumerate_characters_capped(1000, 100), Err(CharacterError::ModulusTooLarge { .. })));
        assert!(Character::from_label(CharacterLabel::new(MAX_MODULUS + 1, 2).unwrap()).is_err());
    }

    #[test]
    fn primitive_roots_lift() {
        assert_eq!(primitive_root_lifting(3), 2);
        assert_eq!(primitive_root_lifting(7), 3);
        // 10 is a primitive root mod 487 but 10^486 ≡ 1 mod 487²
        assert_eq!(pow_mod(10, 486, 487 * 487), 1);
        let g = primitive_root_lifting(487);
        assert_ne!(pow_mod(g, 486, 487 * 487), 1);
    }
}
