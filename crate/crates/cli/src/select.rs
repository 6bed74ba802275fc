//! Modulus ranges and character selectors.

use std::fmt;
use std::str::FromStr;

use nonres_core::characters::enumerate_characters;
use nonres_core::{Character, CharacterLabel};

use crate::CliError;

/// Inclusive modulus range `a..b` (also `a..=b` or a single `a`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QRange {
    pub lo: u64,
    pub hi: u64,
}

impl QRange {
    pub fn iter(&self) -> impl Iterator<Item = u64> {
        self.lo..=self.hi
    }
}

impl FromStr for QRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("'{s}' is not a range a..b"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let q = parse(s)?;
                (q, q)
            }
        };
        if lo == 0 || lo > hi {
            return Err(format!("'{s}' must satisfy 1 <= a <= b"));
        }
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for QRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    All,
    Quadratic,
    Primitive,
    Label(CharacterLabel),
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Selector::All),
            "quadratic" => Ok(Selector::Quadratic),
            "primitive" => Ok(Selector::Primitive),
            _ => s
                .parse::<CharacterLabel>()
                .map(Selector::Label)
                .map_err(|e| format!("expected all, quadratic, primitive or a label q.n: {e}")),
        }
    }
}

impl Selector {
    /// Characters mod q picked by the selector, in label order.
    pub fn pick(&self, q: u64) -> Result<Vec<Character>, CliError> {
        if let Selector::Label(l) = self {
            if l.modulus() != q {
                return Ok(Vec::new());
            }
            return Character::from_label(*l).map(|c| vec![c]).map_err(|e| CliError::Usage(format!("--select: {e}")));
        }
        let all = enumerate_characters(q).map_err(|e| CliError::Usage(format!("modulus {q}: {e}")))?;
        Ok(all
            .into_iter()
            .filter(|c| match self {
                Selector::All => true,
                Selector::Quadratic => c.order() == 2,
                Selector::Primitive => c.is_primitive() && !c.is_principal(),
                Selector::Label(_) => unreachable!(),
            })
            .collect())
    }
}

/// Moduli from `--q` or `--q-range`; a label selector supplies its own.
pub fn moduli(q: Option<u64>, range: Option<QRange>, sel: Selector) -> Result<Vec<u64>, CliError> {
    match (q, range, sel) {
        (Some(_), Some(_), _) => Err(CliError::Usage("--q and --q-range are mutually exclusive".into())),
        (Some(0), None, _) => Err(CliError::Usage("--q must be positive".into())),
        (Some(q), None, _) => Ok(vec![q]),
        (None, Some(r), _) => Ok(r.iter().collect()),
        (None, None, Selector::Label(l)) => Ok(vec![l.modulus()]),
        (None, None, _) => Err(CliError::Usage("one of --q or --q-range is required".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!("3..50".parse::<QRange>().unwrap(), QRange { lo: 3, hi: 50 });
        assert_eq!("3..=50".parse::<QRange>().unwrap(), QRange { lo: 3, hi: 50 });
        assert_eq!("7".parse::<QRange>().unwrap(), QRange { lo: 7, hi: 7 });
        assert!("9..3".parse::<QRange>().is_err());
        assert!("0..3".parse::<QRange>().is_err());
        assert!("a..3".parse::<QRange>().is_err());
    }

    #[test]
    fn selectors() {
        assert_eq!(Selector::Quadratic.pick(7).unwrap().len(), 1);
        assert_eq!(Selector::Quadratic.pick(8).unwrap().len(), 3);
        assert_eq!(Selector::All.pick(12).unwrap().len(), 4);
        assert_eq!(Selector::Primitive.pick(9).unwrap().len(), 4);
        let l: Selector = "5.2".parse().unwrap();
        assert_eq!(l.pick(5).unwrap().len(), 1);
        assert!(l.pick(7).unwrap().is_empty());
        assert!("5.5".parse::<Selector>().is_err());
    }
}
