//! Brute-force scans, literature sanity checks and the independent verifier.
//!
//! Nothing in here reuses constructor intermediates: every check recomputes
//! `f(u)` and both digit sums from the bare witness.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{check_base, Error, Result};
use crate::fracpow::interval;
use crate::radix::{digit_sum_u128, digit_sum_unchecked, Natural};
use crate::ratio::RatioTarget;
use crate::report::{ConstructionTrace, Exponent, Route, WitnessReport};

/// Chunk length for the parallel scans.
pub const SCAN_CHUNK: u64 = 1 << 16;

/// Recomputes `f(u)` and both digit sums from scratch.
pub fn verify_witness(u: &Natural, q: u32, exponent: Exponent) -> Result<WitnessReport> {
    check_base(q, 2)?;
    if u.bits() == 0 {
        return Err(Error::Domain("witness must be at least 1".into()));
    }
    let fu = exponent.apply(u);
    let s_u = digit_sum_unchecked(u, q);
    let s_fu = digit_sum_unchecked(&fu, q);
    let ratio = RatioTarget::new(s_fu, s_u)?;
    Ok(WitnessReport {
        q,
        exponent,
        witness: u.clone(),
        s_u,
        s_fu,
        ratio,
        trace: ConstructionTrace::new(Route::Trivial),
        verified: true,
    })
}

/// Re-verifies a constructed witness against its target ratio and returns the
/// verified report carrying `trace`.
pub(crate) fn certify(
    u: Natural,
    q: u32,
    exponent: Exponent,
    target: RatioTarget,
    trace: ConstructionTrace,
) -> Result<WitnessReport> {
    let mut report = verify_witness(&u, q, exponent)?;
    if !target.matches(report.s_fu, report.s_u) {
        return Err(Error::ConstructionDefect(format!(
            "base {q}, exponent {exponent}, target {target}: witness gives {}/{} via route {}",
            report.s_fu,
            report.s_u,
            trace.route.as_str()
        )));
    }
    report.ratio = target;
    report.trace = trace;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RatioEntry {
    #[serde(serialize_with = "as_string")]
    pub min_witness: u64,
    #[serde(serialize_with = "as_string")]
    pub count: u64,
}

fn as_string<S: Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Distribution of `s_q(n^2)/s_q(n)` over `1 <= n <= limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioTable {
    pub q: u32,
    pub limit: u64,
    pub entries: BTreeMap<RatioTarget, RatioEntry>,
}

impl RatioTable {
    /// Smallest and largest ratio seen, each with its first witness.
    pub fn extremes(&self) -> Option<((RatioTarget, u64), (RatioTarget, u64))> {
        let (lo, lo_e) = self.entries.first_key_value()?;
        let (hi, hi_e) = self.entries.last_key_value()?;
        Some(((*lo, lo_e.min_witness), (*hi, hi_e.min_witness)))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("ratio,min_witness,count\n");
        for (r, e) in &self.entries {
            out.push_str(&format!("{r},{},{}\n", e.min_witness, e.count));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .entries
            .iter()
            .map(|(r, e)| {
                serde_json::json!({
                    "ratio": r.to_string(),
                    "min_witness": e.min_witness.to_string(),
                    "count": e.count.to_string(),
                })
            })
            .collect();
        let extremes = self.extremes().map(|((lo, lw), (hi, hw))| {
            serde_json::json!({
                "min": {"ratio": lo.to_string(), "witness": lw.to_string()},
                "max": {"ratio": hi.to_string(), "witness": hw.to_string()},
            })
        });
        serde_json::json!({
            "base": self.q,
            "limit": self.limit.to_string(),
            "entries": entries,
            "extremes": extremes,
        })
    }

    fn merge(mut self, other: RatioTable) -> RatioTable {
        for (r, e) in other.entries {
            self.entries
                .entry(r)
                .and_modify(|cur| {
                    cur.min_witness = cur.min_witness.min(e.min_witness);
                    cur.count += e.count;
                })
                .or_insert(e);
        }
        self.limit = self.limit.max(other.limit);
        self
    }
}

fn scan_range(q: u32, lo: u64, hi: u64) -> RatioTable {
    let mut entries: BTreeMap<RatioTarget, RatioEntry> = BTreeMap::new();
    for n in lo..=hi {
        let s = digit_sum_u128(u128::from(n), q);
        let s_sq = digit_sum_u128(u128::from(n) * u128::from(n), q);
        let r = RatioTarget::new(s_sq, s).expect("digit sums of n >= 1 are positive");
        entries
            .entry(r)
            .and_modify(|e| e.count += 1)
            .or_insert(RatioEntry {
                min_witness: n,
                count: 1,
            });
    }
    RatioTable {
        q,
        limit: hi,
        entries,
    }
}

fn chunks(limit: u64, chunk: u64) -> Vec<(u64, u64)> {
    let chunk = chunk.max(1);
    let mut out = Vec::new();
    let mut lo = 1;
    while lo <= limit {
        let hi = limit.min(lo.saturating_add(chunk - 1));
        out.push((lo, hi));
        lo = hi + 1;
    }
    out
}

/// Enumerates `1 <= n <= limit` and tabulates the reduced ratios.
pub fn scan(q: u32, limit: u64) -> Result<RatioTable> {
    scan_chunked(q, limit, SCAN_CHUNK)
}

/// [`scan`] with an explicit chunk length; the result does not depend on it.
pub fn scan_chunked(q: u32, limit: u64, chunk: u64) -> Result<RatioTable> {
    check_base(q, 2)?;
    if limit == 0 {
        return Err(Error::Domain("scan limit must be at least 1".into()));
    }
    let empty = RatioTable {
        q,
        limit,
        entries: BTreeMap::new(),
    };
    Ok(chunks(limit, chunk)
        .into_par_iter()
        .map(|(lo, hi)| scan_range(q, lo, hi))
        .reduce(|| empty.clone(), RatioTable::merge))
}

/// `#{ n <= limit : s_2(n) = s_2(n^2) }`.
pub fn melfi_count(limit: u64) -> u64 {
    chunks(limit, SCAN_CHUNK)
        .into_par_iter()
        .map(|(lo, hi)| {
            (lo..=hi)
                .filter(|&n| {
                    let n = u128::from(n);
                    (n * n).count_ones() == n.count_ones()
                })
                .count() as u64
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LogBase {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            _ => Err(Error::Parse(format!("log base must be 2 or e, got {s:?}"))),
        }
    }
}

impl std::fmt::Display for LogBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    #[serde(serialize_with = "range_as_strings")]
    pub checked_range: (u64, u64),
    pub h: u32,
    pub log_base: LogBase,
    /// `n` with `s_2(n^2) * floor(log n) < s_2(n)`.
    #[serde(serialize_with = "list_as_strings")]
    pub violations_left_eq1: Vec<u64>,
    /// `n` with `s_2(n^h)/s_2(n) > 2 (h log n)^{1-1/h}`.
    #[serde(rename = "holds_right_eq11", serialize_with = "list_as_strings")]
    pub violations_right_eq11: Vec<u64>,
}

fn range_as_strings<S: Serializer>(r: &(u64, u64), s: S) -> std::result::Result<S::Ok, S::Error> {
    [r.0.to_string(), r.1.to_string()].serialize(s)
}

fn list_as_strings<S: Serializer>(v: &[u64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(u64::to_string).collect::<Vec<_>>().serialize(s)
}

/// Exact `floor(log n)` for `n >= 1`.
pub fn floor_log(n: u64, base: LogBase) -> u64 {
    match base {
        LogBase::Two => u64::from(63 - n.leading_zeros()),
        LogBase::E => e_power_ceilings()
            .iter()
            .take_while(|&&t| t <= u128::from(n))
            .count() as u64,
    }
}

/// `ceil(e^k)` for `k = 1, 2, ...` while it fits in a `u64`.
fn e_power_ceilings() -> &'static [u128] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<u128>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::new();
        for k in 1u64.. {
            // e^k is irrational, so ceil(e^k) = floor(e^k) + 1 once the
            // bracket is tight enough not to straddle an integer.
            let x = BigRational::from_integer(k.into());
            let mut bits = 128;
            let c: num_bigint::BigInt = loop {
                let (lo, hi) = interval::exp_bracket(&x, bits);
                let f: num_bigint::BigInt = lo.floor().to_integer();
                if f == hi.floor().to_integer() {
                    break f + 1u32;
                }
                bits *= 2;
            };
            match c.to_u128() {
                Some(v) if v <= u128::from(u64::MAX) => out.push(v),
                _ => break,
            }
        }
        out
    })
}

/// Left inequality `s_2(n^2) * floor(log n) >= s_2(n)`; exact.
pub fn left_eq1_holds(n: u64, base: LogBase) -> bool {
    let sq = u128::from(n) * u128::from(n);
    u64::from(sq.count_ones()) * floor_log(n, base) >= u64::from(n.count_ones())
}

fn power_digit_sum_2(n: u64, h: u32) -> u64 {
    let p = BigUint::from(n).pow(h);
    p.count_ones()
}

/// Whether `n` certifiably violates `s_2(n^h)/s_2(n) <= 2 (h log n)^{1-1/h}`.
///
/// Uses an upper bound on `log n` tight to about 2^-64 and inflates the right
/// side by `2^-32` before declaring a violation, so rounding can never
/// manufacture one.
pub fn right_eq11_violated(n: u64, h: u32, base: LogBase) -> bool {
    let s = n.count_ones() as f64;
    let sh = power_digit_sum_2(n, h) as f64;
    let ratio = sh / s;
    let ln = (n as f64).ln();
    let log = match base {
        LogBase::Two => ln / std::f64::consts::LN_2,
        LogBase::E => ln,
    };
    let bound = 2.0 * (f64::from(h) * log).powf(1.0 - 1.0 / f64::from(h));
    if ratio < bound * (1.0 - 1e-9) {
        return false;
    }
    right_eq11_violated_exact(n, h, base)
}

fn right_eq11_violated_exact(n: u64, h: u32, base: LogBase) -> bool {
    let s = BigRational::from_integer(n.count_ones().into());
    let sh = BigRational::from_integer(power_digit_sum_2(n, h).into());
    let half_ratio = sh / s / BigRational::from_integer(2.into());
    let (_, log_hi) = match base {
        LogBase::Two => interval::log2_bracket(&BigUint::from(n), 96),
        LogBase::E => interval::ln_bracket(&BigUint::from(n), 96),
    };
    // ratio > 2 (h L)^{1 - 1/h} (1 + 2^-32)  <=>  (ratio/2)^h > (h L)^{h-1} (1 + 2^-32)^h
    let inflate = BigRational::one() + BigRational::new(1.into(), BigUint::from(1u64 << 32).into());
    let lhs = pow_rat(&half_ratio, h);
    let rhs = pow_rat(&(BigRational::from_integer(h.into()) * log_hi), h - 1) * pow_rat(&inflate, h);
    lhs > rhs
}

fn pow_rat(x: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Checks both inequalities for every `4 <= n <= limit`.
pub fn stolarsky_check(limit: u64, h: u32, base: LogBase) -> Result<BoundsReport> {
    if limit < 4 {
        return Err(Error::Domain("bounds check needs a limit of at least 4".into()));
    }
    if h < 2 {
        return Err(Error::Domain("bounds check needs power h >= 2".into()));
    }
    let per_chunk: Vec<(Vec<u64>, Vec<u64>)> = chunks(limit, SCAN_CHUNK)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for n in lo.max(4)..=hi {
                if !left_eq1_holds(n, base) {
                    left.push(n);
                }
                if right_eq11_violated(n, h, base) {
                    right.push(n);
                }
            }
            (left, right)
        })
        .collect();
    let mut violations_left_eq1 = Vec::new();
    let mut violations_right_eq11 = Vec::new();
    for (l, r) in per_chunk {
        violations_left_eq1.extend(l);
        violations_right_eq11.extend(r);
    }
    Ok(BoundsReport {
        checked_range: (4, limit),
        h,
        log_base: base,
        violations_left_eq1,
        violations_right_eq11,
    })
}
