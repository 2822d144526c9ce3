//! Exact radix expansions, digit sums and run-length digit patterns.
//!
//! Digits are always listed most-significant first. Zero is the empty
//! expansion, so "no leading zero" holds without exception.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{check_base, Error, Result};

/// Arbitrary-precision nonnegative integer.
pub type Natural = BigUint;

/// Base-`q` digits of a natural number, least significant first.
fn digits_le(n: &Natural, q: u32) -> Vec<u32> {
    if n.is_zero() {
        return Vec::new();
    }
    if q <= 256 {
        return n.to_radix_le(q).into_iter().map(u32::from).collect();
    }
    // Peel off chunks of `per_chunk` digits with one bignum division each.
    let (chunk, per_chunk) = word_power(q);
    let chunk_big = Natural::from(chunk);
    let mut out = Vec::new();
    let mut rest = n.clone();
    while !rest.is_zero() {
        let (quot, rem) = rest.div_rem(&chunk_big);
        let mut r = rem.to_u64().expect("remainder below one machine word");
        let last = quot.is_zero();
        for _ in 0..per_chunk {
            if last && r == 0 {
                break;
            }
            out.push((r % u64::from(q)) as u32);
            r /= u64::from(q);
        }
        rest = quot;
    }
    out
}

/// Largest power `q^p` that fits in a `u64`, together with `p`.
fn word_power(q: u32) -> (u64, usize) {
    let q = u64::from(q);
    let mut acc = q;
    let mut p = 1;
    while let Some(next) = acc.checked_mul(q) {
        acc = next;
        p += 1;
    }
    (acc, p)
}

/// Sum of the base-`q` digits of `n`.
pub fn digit_sum(n: &Natural, q: u32) -> Result<u64> {
    check_base(q, 2)?;
    Ok(digit_sum_unchecked(n, q))
}

pub(crate) fn digit_sum_unchecked(n: &Natural, q: u32) -> u64 {
    if q == 2 {
        return n.count_ones();
    }
    if q <= 256 {
        return n.to_radix_le(q).iter().map(|&d| u64::from(d)).sum();
    }
    digits_le(n, q).iter().map(|&d| u64::from(d)).sum()
}

/// Digit sum of a machine-sized value; used by the brute-force scans.
pub fn digit_sum_u128(mut n: u128, q: u32) -> u64 {
    if q == 2 {
        return u64::from(n.count_ones());
    }
    let q = u128::from(q);
    let mut s = 0u64;
    while n > 0 {
        s += (n % q) as u64;
        n /= q;
    }
    s
}

/// Number of base-`q` digits of `n`; equivalently the smallest `m` with `q^m > n`.
pub fn digit_count(n: &Natural, q: u32) -> Result<u64> {
    check_base(q, 2)?;
    if n.is_zero() {
        return Ok(0);
    }
    if q.is_power_of_two() {
        let width = u64::from(q.trailing_zeros());
        return Ok(n.bits().div_ceil(width));
    }
    Ok(digits_le(n, q).len() as u64)
}

/// A base-`q` expansion, most significant digit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitString {
    base: u32,
    digits: Vec<u32>,
}

impl DigitString {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        check_base(base, 2)?;
        if let Some(&d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::MalformedPattern(format!(
                "digit {d} out of range for base {base}"
            )));
        }
        if digits.first() == Some(&0) {
            return Err(Error::MalformedPattern("leading zero digit".into()));
        }
        Ok(DigitString { base, digits })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn value(&self) -> Natural {
        if self.base <= 256 {
            let bytes: Vec<u8> = self.digits.iter().map(|&d| d as u8).collect();
            return Natural::from_radix_be(&bytes, self.base).unwrap_or_default();
        }
        let q = Natural::from(self.base);
        self.digits
            .iter()
            .fold(Natural::zero(), |acc, &d| acc * &q + Natural::from(d))
    }

    /// Collapses the expansion into maximal runs of equal digits.
    pub fn run_length(&self) -> RunLengthPattern {
        let mut runs: Vec<Run> = Vec::new();
        for &d in &self.digits {
            match runs.last_mut() {
                Some(run) if run.digit == d => run.count += 1,
                _ => runs.push(Run { digit: d, count: 1 }),
            }
        }
        RunLengthPattern {
            base: self.base,
            runs,
        }
    }
}

/// Canonical base-`q` digits of `n`.
pub fn expand(n: &Natural, q: u32) -> Result<DigitString> {
    check_base(q, 2)?;
    let mut digits = digits_le(n, q);
    digits.reverse();
    Ok(DigitString { base: q, digits })
}

/// One run `digit^(count)` of a run-length pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Run {
    pub digit: u32,
    pub count: u64,
}

impl Run {
    pub fn new(digit: u32, count: u64) -> Self {
        Run { digit, count }
    }
}

/// A digit string written as runs `d1^(a1) d2^(a2) ... dk^(ak)`.
///
/// Canonical form: every count is at least one, the leading digit is nonzero
/// and adjacent runs carry different digits. The empty pattern denotes zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunLengthPattern {
    base: u32,
    runs: Vec<Run>,
}

impl RunLengthPattern {
    /// Validates an already-canonical run list.
    pub fn new(base: u32, runs: Vec<Run>) -> Result<Self> {
        check_base(base, 2)?;
        for (i, run) in runs.iter().enumerate() {
            if run.digit >= base {
                return Err(Error::MalformedPattern(format!(
                    "digit {} out of range for base {base}",
                    run.digit
                )));
            }
            if run.count == 0 {
                return Err(Error::MalformedPattern(format!("run {i} has zero length")));
            }
            if i > 0 && runs[i - 1].digit == run.digit {
                return Err(Error::MalformedPattern(format!(
                    "runs {} and {i} repeat digit {}",
                    i - 1,
                    run.digit
                )));
            }
        }
        if runs.first().is_some_and(|r| r.digit == 0) {
            return Err(Error::MalformedPattern("leading run of zeros".into()));
        }
        Ok(RunLengthPattern { base, runs })
    }

    /// Builds a pattern from constructor output, dropping empty runs, merging
    /// neighbours with equal digits and stripping leading zeros.
    pub fn normalized<I>(base: u32, runs: I) -> Result<Self>
    where
        I: IntoIterator<Item = Run>,
    {
        check_base(base, 2)?;
        let mut out: Vec<Run> = Vec::new();
        for run in runs {
            if run.digit >= base {
                return Err(Error::MalformedPattern(format!(
                    "digit {} out of range for base {base}",
                    run.digit
                )));
            }
            if run.count == 0 || (out.is_empty() && run.digit == 0) {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.digit == run.digit => last.count += run.count,
                _ => out.push(run),
            }
        }
        Ok(RunLengthPattern { base, runs: out })
    }

    /// Run-length form of the base-`q` expansion of `n`.
    pub fn of(n: &Natural, q: u32) -> Result<Self> {
        Ok(expand(n, q)?.run_length())
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    /// Total number of digits.
    pub fn len(&self) -> u64 {
        self.runs.iter().map(|r| r.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Digit sum read straight off the runs.
    pub fn digit_sum(&self) -> u64 {
        self.runs
            .iter()
            .map(|r| u64::from(r.digit) * r.count)
            .sum()
    }

    /// The integer spelled by the runs.
    pub fn value(&self) -> Natural {
        let q = self.base;
        if q <= 256 {
            let total: u64 = self.len();
            let mut bytes = Vec::with_capacity(total as usize);
            for run in &self.runs {
                bytes.extend(std::iter::repeat_n(run.digit as u8, run.count as usize));
            }
            return Natural::from_radix_be(&bytes, q).unwrap_or_default();
        }
        let qb = Natural::from(q);
        let mut acc = Natural::zero();
        for run in &self.runs {
            let shift = qb.pow(run.count as u32);
            let repunit = (&shift - 1u32) / (q - 1);
            acc = acc * &shift + repunit * run.digit;
        }
        acc
    }
}

/// The integer whose expansion is exactly the concatenated runs.
pub fn from_pattern(p: &RunLengthPattern) -> Result<Natural> {
    // Re-validate: patterns built through `normalized` are canonical by
    // construction, but a caller may hand us a deserialized one.
    RunLengthPattern::new(p.base, p.runs.clone())?;
    Ok(p.value())
}

impl fmt::Display for RunLengthPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}:", self.base)?;
        for (i, run) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}^{}", run.digit, run.count)?;
        }
        Ok(())
    }
}

impl FromStr for RunLengthPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::MalformedPattern(format!("{why} in {s:?}"));
        let rest = s.trim().strip_prefix('b').ok_or_else(|| bad("missing base prefix"))?;
        let (base, body) = rest.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let base: u32 = base.parse().map_err(|_| bad("bad base"))?;
        let mut runs = Vec::new();
        for token in body.split_whitespace() {
            let (d, c) = token.split_once('^').ok_or_else(|| bad("run without '^'"))?;
            let digit = d.parse().map_err(|_| bad("bad digit"))?;
            let count = c.parse().map_err(|_| bad("bad run length"))?;
            runs.push(Run { digit, count });
        }
        RunLengthPattern::new(base, runs)
    }
}

/// Digit sums of the low `k` digits and of everything above them.
pub fn split_digit_sum(n: &Natural, q: u32, k: u64) -> Result<(u64, u64)> {
    check_base(q, 2)?;
    let digits = digits_le(n, q);
    let cut = digits.len().min(usize::try_from(k).unwrap_or(usize::MAX));
    let low = digits[..cut].iter().map(|&d| u64::from(d)).sum();
    let high = digits[cut..].iter().map(|&d| u64::from(d)).sum();
    Ok((low, high))
}

/// `((q-1) | u, (q-1) | s_q(u))`; the two always agree.
pub fn divisibility_pair(u: &Natural, q: u32) -> Result<(bool, bool)> {
    check_base(q, 3)?;
    if u.is_zero() {
        return Err(Error::Domain("divisibility check needs u >= 1".into()));
    }
    let m = q - 1;
    let by_value = (u % m).is_zero();
    let by_digits = digit_sum_unchecked(u, q) % u64::from(m) == 0;
    Ok((by_value, by_digits))
}

/// `q^k` as a natural.
pub fn pow(q: u32, k: u64) -> Natural {
    if q == 2 {
        return Natural::one() << k;
    }
    Natural::from(q).pow(u32::try_from(k).expect("exponent fits in u32"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> Natural {
        Natural::from(v)
    }

    #[test]
    fn digit_sum_examples() {
        assert_eq!(digit_sum(&n(10214), 3).unwrap(), 8);
        assert_eq!(digit_sum(&n(0), 7).unwrap(), 0);
        for q in 2..12 {
            for k in 0..20 {
                assert_eq!(digit_sum(&pow(q, k), q).unwrap(), 1);
            }
        }
        assert!(matches!(
            digit_sum(&n(5), 1),
            Err(Error::InvalidBase { base: 1, .. })
        ));
    }

    #[test]
    fn large_base_digits() {
        let q = 1000u32;
        let v = n(123_045_006_007);
        assert_eq!(expand(&v, q).unwrap().digits(), &[123, 45, 6, 7]);
        assert_eq!(digit_sum(&v, q).unwrap(), 181);
        let big = pow(q, 30) - 1u32;
        assert_eq!(digit_sum(&big, q).unwrap(), 30 * 999);
        assert_eq!(digit_count(&big, q).unwrap(), 30);
    }

    #[test]
    fn expand_examples() {
        assert_eq!(
            expand(&n(10214), 3).unwrap().digits(),
            &[1, 1, 2, 0, 0, 0, 0, 2, 2]
        );
        assert!(expand(&n(0), 2).unwrap().is_empty());
        assert_eq!(expand(&n(49), 2).unwrap().digits(), &[1, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn pattern_examples() {
        let p = RunLengthPattern::new(
            3,
            vec![Run::new(1, 2), Run::new(2, 1), Run::new(0, 4), Run::new(2, 2)],
        )
        .unwrap();
        assert_eq!(from_pattern(&p).unwrap(), n(10214));
        assert_eq!(p.to_string(), "b3:1^2 2^1 0^4 2^2");
        assert_eq!("b3:1^2 2^1 0^4 2^2".parse::<RunLengthPattern>().unwrap(), p);

        let one = RunLengthPattern::new(2, vec![Run::new(1, 1)]).unwrap();
        assert_eq!(from_pattern(&one).unwrap(), n(1));

        let p = "b2:1^4 0^1 1^5 0^1 1^13".parse::<RunLengthPattern>().unwrap();
        assert_eq!(from_pattern(&p).unwrap(), n(16244735));
        assert_eq!(n(16244735), (n(1) << 24u32) - 1u32 - (n(1) << 19u32) - (n(1) << 13u32));
    }

    #[test]
    fn malformed_patterns_rejected() {
        for bad in [
            "b3:0^2 1^1",
            "b3:1^0",
            "b3:1^2 1^3",
            "b3:3^1",
            "3:1^1",
            "b3 1^1",
            "b1:0^1",
        ] {
            assert!(bad.parse::<RunLengthPattern>().is_err(), "{bad}");
        }
    }

    #[test]
    fn normalized_drops_empty_runs() {
        let p = RunLengthPattern::normalized(
            2,
            [Run::new(0, 1), Run::new(1, 0), Run::new(1, 3), Run::new(1, 2), Run::new(0, 0)],
        )
        .unwrap();
        assert_eq!(p.runs(), &[Run::new(1, 5)]);
        let zero = RunLengthPattern::normalized(5, []).unwrap();
        assert!(zero.is_empty());
        assert_eq!(zero.value(), n(0));
        assert_eq!(zero.to_string(), "b5:");
        assert_eq!("b5:".parse::<RunLengthPattern>().unwrap(), zero);
    }

    #[test]
    fn large_base_pattern_value() {
        let p = RunLengthPattern::new(1000, vec![Run::new(999, 3), Run::new(5, 2)]).unwrap();
        assert_eq!(p.value(), n(999_999_999_005_005));
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_digit_sum(&n(49), 2, 3).unwrap(), (1, 2));
        assert_eq!(split_digit_sum(&n(10214), 3, 0).unwrap(), (0, 8));
        assert_eq!(split_digit_sum(&n(10214), 3, 9).unwrap(), (8, 0));
        assert_eq!(split_digit_sum(&n(10214), 3, 900).unwrap(), (8, 0));
    }

    #[test]
    fn divisibility_examples() {
        assert_eq!(divisibility_pair(&n(18), 10).unwrap(), (true, true));
        assert_eq!(divisibility_pair(&n(19), 10).unwrap(), (false, false));
        assert_eq!(divisibility_pair(&n(10214), 3).unwrap(), (true, true));
        assert!(matches!(
            divisibility_pair(&n(10), 2),
            Err(Error::InvalidBase { base: 2, min: 3 })
        ));
        assert!(divisibility_pair(&n(0), 10).is_err());
    }

    #[test]
    fn digit_count_matches_expansion() {
        for q in [2u32, 3, 4, 8, 10, 16] {
            for v in [0u64, 1, 2, 7, 8, 9, 255, 256, 1 << 40] {
                let expect = expand(&n(v), q).unwrap().len() as u64;
                assert_eq!(digit_count(&n(v), q).unwrap(), expect, "q={q} v={v}");
            }
        }
    }
}
