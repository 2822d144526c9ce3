//! Target ratio in, verified witness out.
//!
//! Routes:
//! * ratio below one: the ladder pattern with `(m, t, k, n)` picked minimally;
//! * base 2, ratio at least one: a ladder witness for `(2/3)^s r`, then `s`
//!   amplification steps each multiplying the ratio by 3/2;
//! * base `q >= 3`, ratio in `(1/2, 1)`: a single-gap pattern;
//! * base `q >= 3`, ratio at least one: a single-gap witness for
//!   `2r/(d+1)` copied into `d` blocks whose pairwise products never collide.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{check_base, Error, Result};
use crate::oracle::certify;
use crate::patterns::{self, calibrate, gap_min_n, gap_pattern, ladder_d, ladder_min_k, Constants};
use crate::radix::{digit_count, pow, Natural};
use crate::ratio::RatioTarget;
use crate::report::{AmplifyStep, ChainParams, ConstructionTrace, Exponent, Route, WitnessReport};

/// Upper limit on the `m` search in [`witness_lt1`].
pub const M_SEARCH_CAP: u64 = 1_000_000;

fn overflow(what: &str) -> Error {
    Error::Range(format!("{what} overflows 64-bit parameters"))
}

/// Calibrated ladder constants, memoized per `(q, m)`.
pub fn constants(q: u32, m: u64) -> Result<Constants> {
    static MEMO: OnceLock<Mutex<HashMap<(u32, u64), Constants>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(c) = memo.lock().expect("memo lock").get(&(q, m)) {
        return Ok(c.clone());
    }
    let c = calibrate(q, m)?.constants;
    memo.lock().expect("memo lock").insert((q, m), c.clone());
    Ok(c)
}

/// Ladder parameters `(m, t, k, n)` for a ratio below one.
pub fn ladder_parameters(q: u32, r: RatioTarget) -> Result<(u64, u64, u64, u64)> {
    check_base(q, 2)?;
    let (a, c) = (r.numer(), r.denom());
    if a >= c {
        return Err(Error::Range(format!("ladder route needs a ratio below 1, got {r}")));
    }
    let diff = c - a;
    let step = if q == 2 { 1 } else { u64::from(q - 1) };
    let m = (1..=M_SEARCH_CAP)
        .filter(|m| (m + 1) % step == 0)
        .find(|&m| {
            2 * (u128::from(m) + 1) * u128::from(a) > u128::from(c) && (2 * m + 1).gcd(&diff) == 1
        })
        .ok_or_else(|| {
            Error::SearchExhausted(format!(
                "no admissible m <= {M_SEARCH_CAP} for ratio {r} in base {q}"
            ))
        })?;

    let consts = constants(q, m)?;
    let (e1, e2) = consts.reduced();
    let d = ladder_d(m) as i128;
    let (mi, e1, e2) = (i128::from(m), i128::from(e1), i128::from(e2));
    let floor = (2 * mi * (d + e1) + d + 2 * e1 - e2).max(e1).max(0);
    let min_k = i128::from(ladder_min_k(m));
    let modulus = 2 * mi + 1;
    let (a, diff) = (i128::from(a), i128::from(diff));
    let mut t = floor + 1;
    loop {
        let num = t * diff + e1 - e2;
        if num % modulus == 0 {
            let k = num / modulus;
            let n = t * a + mi * k - e1;
            if k >= min_k && n > (mi + 1) * k + d {
                let cast = |v: i128, what| u64::try_from(v).map_err(|_| overflow(what));
                return Ok((m, cast(t, "t")?, cast(k, "k")?, cast(n, "n")?));
            }
        }
        t += 1;
        if t > floor + 1 + modulus * (min_k + d + 4) * 4 + 1_000_000 {
            return Err(Error::SearchExhausted(format!("no admissible t for ratio {r}")));
        }
    }
}

/// Ladder witness for `0 < r < 1`.
pub fn witness_lt1(q: u32, r: RatioTarget) -> Result<WitnessReport> {
    let (m, t, k, n) = ladder_parameters(q, r)?;
    let u = patterns::pattern_general(q, m, k, n)?;
    let route = if q == 2 { Route::Base2Ladder } else { Route::BaseQLadder };
    let mut trace = ConstructionTrace::new(route);
    trace.m = Some(m);
    trace.t = Some(t);
    trace.k = Some(k);
    trace.n = Some(n);
    certify(u, q, Exponent::Square, r, trace)
}

/// `(2^{2w+1} + 1) u` with `2^w > u`, together with `w`.
pub fn amplify_base2_step(u: &Natural) -> Result<(Natural, u64)> {
    if u.is_zero() {
        return Err(Error::Domain("amplification needs u >= 1".into()));
    }
    let w = u.bits();
    Ok((((u << (2 * w + 1)) + u), w))
}

/// One amplification step: doubles `s_2(u)` and triples `s_2(u^2)`.
pub fn amplify_base2(u: &Natural) -> Result<Natural> {
    Ok(amplify_base2_step(u)?.0)
}

/// Base-2 witness for any positive ratio.
pub fn witness_base2(r: RatioTarget) -> Result<WitnessReport> {
    if r.is_below_one() {
        return witness_lt1(2, r);
    }
    let (a, c) = (u128::from(r.numer()), u128::from(r.denom()));
    let mut s = 0u32;
    let (mut num, mut den) = (a, c);
    while num >= den {
        s += 1;
        num = num.checked_mul(2).ok_or_else(|| overflow("amplification"))?;
        den = den.checked_mul(3).ok_or_else(|| overflow("amplification"))?;
    }
    let r0 = RatioTarget::from_u128(num, den)?;
    let (m, t, k, n) = ladder_parameters(2, r0)?;
    let mut u = patterns::pattern_general(2, m, k, n)?;
    let mut steps = Vec::with_capacity(s as usize);
    for _ in 0..s {
        let (v, w) = amplify_base2_step(&u)?;
        steps.push(AmplifyStep { w });
        u = v;
    }
    let mut trace = ConstructionTrace::new(Route::Base2Amplified);
    trace.m = Some(m);
    trace.t = Some(t);
    trace.k = Some(k);
    trace.n = Some(n);
    trace.inner_ratio = Some(r0);
    trace.amplification = steps;
    certify(u, 2, Exponent::Square, r, trace)
}

/// Single-gap parameters `(k, n, scale)` for `1/2 < r < 1`.
pub fn mid_parameters(q: u32, r: RatioTarget) -> Result<(u64, u64, u64)> {
    check_base(q, 3)?;
    let (a, c) = (r.numer(), r.denom());
    if !(a < c && 2 * u128::from(a) > u128::from(c)) {
        return Err(Error::Range(format!("single-gap route needs 1/2 < r < 1, got {r}")));
    }
    let mul = |x: u64, y: u64| x.checked_mul(y).ok_or_else(|| overflow("gap parameters"));
    let (k, n, scale) = match q {
        3 => (mul(6, c - a)?, mul(6, a)? - 1, 2),
        4 => {
            let (k, n) = (mul(2, c - a)? - 1, mul(2, a)?);
            if n >= k + 3 {
                (k, n, 1)
            } else {
                (mul(4, c - a)? - 1, mul(4, a)?, 2)
            }
        }
        _ => (mul(4, c - a)? + 1, mul(4, a)? - 1, 1),
    };
    if n < gap_min_n(q, k) {
        return Err(Error::Hypothesis(format!(
            "gap parameters k={k}, n={n} miss the bound for base {q}"
        )));
    }
    Ok((k, n, scale))
}

/// Single-gap witness for `1/2 < r < 1`, `q >= 3`.
pub fn witness_mid(q: u32, r: RatioTarget) -> Result<WitnessReport> {
    let (k, n, scale) = mid_parameters(q, r)?;
    let u = gap_pattern(q, k, n)?;
    let mut trace = ConstructionTrace::new(Route::BaseQMid);
    trace.k = Some(k);
    trace.n = Some(n);
    trace.scale = Some(scale);
    certify(u, q, Exponent::Square, r, trace)
}

/// First `d` terms of the greedy Sidon sequence 1, 2, 4, 8, 13, 21, 31, ...
/// (all pairwise sums `g_a + g_b`, `a <= b`, distinct).
pub fn mian_chowla(d: usize) -> Vec<u64> {
    let mut seq: Vec<u64> = Vec::with_capacity(d);
    let mut sums = std::collections::HashSet::new();
    let mut cand = 1u64;
    while seq.len() < d {
        let fresh = seq
            .iter()
            .chain(std::iter::once(&cand))
            .all(|&g| !sums.contains(&(g + cand)));
        if fresh {
            for &g in seq.iter().chain(std::iter::once(&cand)) {
                sums.insert(g + cand);
            }
            seq.push(cand);
        }
        cand += 1;
    }
    seq
}

/// Chain parameters for `d` blocks around `u`.
pub fn chain_params(q: u32, u: &Natural, d: u64) -> Result<ChainParams> {
    check_base(q, 3)?;
    if d == 0 {
        return Err(Error::Domain("chain needs d >= 1".into()));
    }
    let m = digit_count(u, q)?;
    let d_usize = usize::try_from(d).map_err(|_| overflow("chain length"))?;
    Ok(ChainParams {
        d,
        m,
        t_d: d * (d + 1) / 2,
        offsets: mian_chowla(d_usize),
    })
}

fn chain_value(q: u32, u: &Natural, p: &ChainParams) -> Result<Natural> {
    let mut sum = Natural::zero();
    for &g in &p.offsets {
        let e = g
            .checked_mul(2 * (p.m + 1))
            .ok_or_else(|| overflow("chain offset"))?;
        sum += pow(q, e);
    }
    Ok(sum * u)
}

/// `v = sum_e q^{2 g_e (m+1)} u` with `q^m > u`: `s_q(v) = d s_q(u)`, and when
/// `s_q(2u^2) = s_q(u^2)` also `s_q(v^2) = t_d s_q(u^2)`.
pub fn amplify_chain(q: u32, u: &Natural, d: u64) -> Result<Natural> {
    let p = chain_params(q, u, d)?;
    chain_value(q, u, &p)
}

fn witness_chain(q: u32, r: RatioTarget) -> Result<WitnessReport> {
    let (a, c) = (u128::from(r.numer()), u128::from(r.denom()));
    let d = u64::try_from(2 * a / c).map_err(|_| overflow("chain length"))?;
    let inner = RatioTarget::from_u128(2 * a, c * (u128::from(d) + 1))?;
    let (k, n, scale) = mid_parameters(q, inner)?;
    let u = gap_pattern(q, k, n)?;
    let params = chain_params(q, &u, d)?;
    let v = chain_value(q, &u, &params)?;
    let mut trace = ConstructionTrace::new(Route::BaseQChain);
    trace.k = Some(k);
    trace.n = Some(n);
    trace.scale = Some(scale);
    trace.inner_ratio = Some(inner);
    trace.chain = Some(params);
    certify(v, q, Exponent::Square, r, trace)
}

/// Verified witness `u` with `s_q(u^2) / s_q(u) = r`.
pub fn witness(q: u32, r: RatioTarget) -> Result<WitnessReport> {
    check_base(q, 2)?;
    if q == 2 {
        return witness_base2(r);
    }
    let (a, c) = (u128::from(r.numer()), u128::from(r.denom()));
    if a < c {
        if 2 * a > c {
            witness_mid(q, r)
        } else {
            witness_lt1(q, r)
        }
    } else {
        witness_chain(q, r)
    }
}

fn field(v: Option<u64>, name: &str) -> Result<u64> {
    v.ok_or_else(|| Error::Parse(format!("trace is missing {name}")))
}

/// Rebuilds the witness described by `trace` without any search.
pub fn replay(q: u32, exponent: Exponent, trace: &ConstructionTrace) -> Result<Natural> {
    check_base(q, 2)?;
    if let Exponent::Rational { .. } = exponent {
        return crate::fracpow::replay(q, trace);
    }
    match trace.route {
        Route::Base2Ladder | Route::BaseQLadder | Route::Base2Amplified => {
            let m = field(trace.m, "m")?;
            let k = field(trace.k, "k")?;
            let n = field(trace.n, "n")?;
            let mut u = patterns::pattern_general(q, m, k, n)?;
            if trace.route == Route::Base2Amplified {
                for step in &trace.amplification {
                    let (v, w) = amplify_base2_step(&u)?;
                    if w != step.w {
                        return Err(Error::Parse("amplification step does not replay".into()));
                    }
                    u = v;
                }
            }
            Ok(u)
        }
        Route::BaseQMid | Route::BaseQChain => {
            let k = field(trace.k, "k")?;
            let n = field(trace.n, "n")?;
            let u = gap_pattern(q, k, n)?;
            match (&trace.chain, trace.route) {
                (None, Route::BaseQMid) => Ok(u),
                (Some(p), Route::BaseQChain) => {
                    let expect = chain_params(q, &u, p.d)?;
                    if &expect != p {
                        return Err(Error::Parse("chain parameters do not replay".into()));
                    }
                    chain_value(q, &u, p)
                }
                _ => Err(Error::Parse("chain trace is inconsistent".into())),
            }
        }
        route => Err(Error::Parse(format!(
            "route {} cannot be replayed for exponent 2",
            route.as_str()
        ))),
    }
}
