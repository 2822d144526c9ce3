use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A positive rational `a/c` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RatioTarget {
    a: u64,
    c: u64,
}

impl RatioTarget {
    /// Reduces `a/c`; both parts must be positive.
    pub fn new(a: u64, c: u64) -> Result<Self> {
        if a == 0 || c == 0 {
            return Err(Error::Range(format!(
                "ratio {a}/{c} must have a positive numerator and denominator"
            )));
        }
        let g = a.gcd(&c);
        Ok(RatioTarget { a: a / g, c: c / g })
    }

    pub fn from_u128(a: u128, c: u128) -> Result<Self> {
        let g = a.gcd(&c).max(1);
        let (a, c) = (a / g, c / g);
        match (u64::try_from(a), u64::try_from(c)) {
            (Ok(a), Ok(c)) => RatioTarget::new(a, c),
            _ => Err(Error::Range(format!("ratio {a}/{c} exceeds 64-bit parts"))),
        }
    }

    pub fn numer(&self) -> u64 {
        self.a
    }

    pub fn denom(&self) -> u64 {
        self.c
    }

    pub fn inverse(&self) -> Self {
        RatioTarget {
            a: self.c,
            c: self.a,
        }
    }

    pub fn is_below_one(&self) -> bool {
        self.a < self.c
    }

    /// Cross-multiplied exact test `num/den == a/c`.
    pub fn matches(&self, num: u64, den: u64) -> bool {
        u128::from(num) * u128::from(self.c) == u128::from(den) * u128::from(self.a)
    }
}

impl Ord for RatioTarget {
    fn cmp(&self, other: &Self) -> Ordering {
        (u128::from(self.a) * u128::from(other.c)).cmp(&(u128::from(other.a) * u128::from(self.c)))
    }
}

impl PartialOrd for RatioTarget {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RatioTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.c)
    }
}

/// Accepts `a/c` or a bare whole number `a` (meaning `a/1`).
impl FromStr for RatioTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |part: &str| -> Result<u64> {
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("invalid ratio {s:?}")));
            }
            part.parse()
                .map_err(|_| Error::Parse(format!("invalid ratio {s:?}")))
        };
        let (a, c) = match s.split_once('/') {
            Some((a, c)) => (parse(a)?, parse(c)?),
            None => (parse(s)?, 1),
        };
        RatioTarget::new(a, c).map_err(|_| Error::Parse(format!("ratio {s:?} must be positive")))
    }
}
