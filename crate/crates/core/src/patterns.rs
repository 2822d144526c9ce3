//! Explicit digit-pattern constructors and their digit-sum closed forms.
//!
//! Two families live here:
//!
//! * the *ladder* pattern `(q-1)^(k) (q-2) (q-1)^(k+1) (q-2) ... (q-1)^(k+m) (q-2) (q-1)^(n)`,
//!   whose square has digit sum `(q-1)(n - mk) + e1` once `k` and `n` are
//!   large enough. `e1` is only known to be a constant depending on `(q, m)`,
//!   so [`calibrate`] measures it and checks that it really is constant;
//! * the single-gap patterns used for ratios in `(1/2, 1)`, which come with
//!   exact digit sums for `u`, `u^2` and `2u^2`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_base, Error, Result};
use crate::radix::{digit_sum_unchecked, Natural, Run, RunLengthPattern};

/// Triangular number `1 + 2 + ... + m`.
pub fn triangular(m: u64) -> u64 {
    m * (m + 1) / 2
}

/// Digit-sum offset of the ladder pattern itself.
pub fn ladder_e2(q: u32, m: u64) -> i64 {
    let t = triangular(m) as i64;
    if q == 2 {
        t
    } else {
        i64::from(q - 2) * (m as i64 + 1) + i64::from(q - 1) * t
    }
}

/// Lower-bound offset for `n`: the ladder formulas need `n > (m+1)k + d`.
pub fn ladder_d(m: u64) -> u64 {
    triangular(m) + (m + 1) + 1
}

/// Smallest admissible `k` for the ladder formulas, `k > 2m(m+1) - 1`.
pub fn ladder_min_k(m: u64) -> u64 {
    (2 * m * (m + 1)).max(1)
}

/// Constants of the ladder pattern for a given `(q, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constants {
    pub q: u32,
    pub m: u64,
    pub e1: i64,
    pub e2: i64,
    pub d: u64,
    /// `e2 / (q-1)`, only for `q >= 3`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e3: Option<i64>,
    /// `e1 / (q-1)`, only for `q >= 3`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e4: Option<i64>,
}

impl Constants {
    /// The pair `(e1, e2)` in units where the digit-sum relations read
    /// `s(u^2) ∝ n - mk + e1`, `s(u) ∝ n + k(m+1) + e2`.
    pub fn reduced(&self) -> (i64, i64) {
        match (self.e4, self.e3) {
            (Some(e4), Some(e3)) => (e4, e3),
            _ => (self.e1, self.e2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CalibrationSample {
    pub k: u64,
    pub n: u64,
    /// Observed digit sum of `u^2`.
    pub s_sq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CalibrationRecord {
    #[serde(flatten)]
    pub constants: Constants,
    pub samples: Vec<CalibrationSample>,
    /// Exponents `c_1 > c_2 > ... > c_{m+2}` with
    /// `u = q^{c_1} - 1 - sum_{i>=2} q^{c_i}` for the first sample.
    pub exponents: Vec<u64>,
}

fn check_ladder_args(q: u32, k: u64, n: u64) -> Result<()> {
    check_base(q, 2)?;
    if k == 0 || n == 0 {
        return Err(Error::Domain(format!(
            "ladder pattern needs k >= 1 and n >= 1 (got k={k}, n={n})"
        )));
    }
    Ok(())
}

/// Run-length form of the ladder pattern.
pub fn ladder_runs(q: u32, m: u64, k: u64, n: u64) -> Result<RunLengthPattern> {
    check_ladder_args(q, k, n)?;
    let top = q - 1;
    let sep = q - 2;
    let mut runs = Vec::with_capacity(2 * m as usize + 3);
    for i in 0..=m {
        runs.push(Run::new(top, k + i));
        runs.push(Run::new(sep, 1));
    }
    runs.push(Run::new(top, n));
    RunLengthPattern::normalized(q, runs)
}

/// The ladder pattern as an integer.
pub fn pattern_general(q: u32, m: u64, k: u64, n: u64) -> Result<Natural> {
    Ok(ladder_runs(q, m, k, n)?.value())
}

/// Exponents `c_i` such that the ladder pattern equals
/// `q^{c_1} - 1 - sum_{i=2}^{m+2} q^{c_i}`.
pub fn ladder_exponents(m: u64, k: u64, n: u64) -> Vec<u64> {
    let mut c = Vec::with_capacity(m as usize + 2);
    c.push(k * (m + 1) + triangular(m) + (m + 1) + n);
    for j in 1..=m {
        let tail: u64 = (j..=m).sum();
        c.push(k * (m - j + 1) + tail + (m + 1 - j) + n);
    }
    c.push(n);
    c
}

/// Measures `e1` on a 3x3 grid of `(k, n)` just above the thresholds and
/// checks that every sample agrees.
pub fn calibrate(q: u32, m: u64) -> Result<CalibrationRecord> {
    check_base(q, 2)?;
    if q >= 3 && (m + 1) % u64::from(q - 1) != 0 {
        return Err(Error::Hypothesis(format!(
            "calibration in base {q} needs (q-1) | (m+1); m={m} does not qualify"
        )));
    }
    let unit = if q == 2 { 1 } else { i64::from(q - 1) };
    let d = ladder_d(m);
    let k0 = ladder_min_k(m);
    let grid: Vec<(u64, u64)> = (k0..k0 + 3)
        .flat_map(|k| {
            let n0 = (m + 1) * k + d + 1;
            (n0..n0 + 3).map(move |n| (k, n))
        })
        .collect();

    let samples: Vec<CalibrationSample> = grid
        .par_iter()
        .map(|&(k, n)| {
            let u = pattern_general(q, m, k, n).expect("grid parameters are valid");
            let s_sq = digit_sum_unchecked(&(&u * &u), q);
            CalibrationSample { k, n, s_sq }
        })
        .collect();

    let inferred: Vec<i64> = samples
        .iter()
        .map(|s| s.s_sq as i64 - unit * (s.n as i64 - (m * s.k) as i64))
        .collect();
    let e1 = inferred[0];
    if inferred.iter().any(|&e| e != e1) {
        let mut observed = inferred.clone();
        observed.sort_unstable();
        observed.dedup();
        return Err(Error::CalibrationInstability { q, m, observed });
    }

    let e2 = ladder_e2(q, m);
    let (e3, e4) = if q >= 3 {
        let unit = i64::from(q - 1);
        if e1 % unit != 0 || e2 % unit != 0 {
            return Err(Error::CalibrationInstability {
                q,
                m,
                observed: vec![e1],
            });
        }
        (Some(e2 / unit), Some(e1 / unit))
    } else {
        (None, None)
    };

    let exponents = ladder_exponents(m, samples[0].k, samples[0].n);
    Ok(CalibrationRecord {
        constants: Constants {
            q,
            m,
            e1,
            e2,
            d,
            e3,
            e4,
        },
        samples,
        exponents,
    })
}

/// Smallest `n` accepted by the single-gap constructions for a given `k`.
///
/// Base 3 needs `n >= k+3`: at `n = k+2` the regrouped middle term goes
/// negative and the closed form breaks (e.g. `k=1, n=3`).
pub fn gap_min_n(q: u32, k: u64) -> u64 {
    if q >= 5 {
        k + 2
    } else {
        k + 3
    }
}

fn check_gap(q: u32, k: u64, n: u64) -> Result<()> {
    check_base(q, 3)?;
    if k == 0 {
        return Err(Error::Hypothesis("gap pattern needs k >= 1".into()));
    }
    let min_n = gap_min_n(q, k);
    if n < min_n {
        let bound = if q >= 5 { "n >= k+2" } else { "n >= k+3" };
        return Err(Error::Hypothesis(format!(
            "gap pattern in base {q} needs {bound}; got k={k}, n={n}"
        )));
    }
    Ok(())
}

/// Run-length form of the single-gap pattern:
/// `(q-1)^(k) 0 (q-1)^(n)` for `q >= 5`, `1 3^(k) 2 3^(n)` for `q = 4`,
/// `1 2^(k) 1 2^(n)` for `q = 3`.
pub fn gap_runs(q: u32, k: u64, n: u64) -> Result<RunLengthPattern> {
    check_gap(q, k, n)?;
    let runs = match q {
        3 => vec![Run::new(1, 1), Run::new(2, k), Run::new(1, 1), Run::new(2, n)],
        4 => vec![Run::new(1, 1), Run::new(3, k), Run::new(2, 1), Run::new(3, n)],
        _ => vec![Run::new(q - 1, k), Run::new(0, 1), Run::new(q - 1, n)],
    };
    RunLengthPattern::new(q, runs)
}

pub fn gap_pattern(q: u32, k: u64, n: u64) -> Result<Natural> {
    Ok(gap_runs(q, k, n)?.value())
}

/// Predicted `(s_q(u), s_q(u^2))` for the single-gap pattern.
pub fn gap_closed_forms(q: u32, k: u64, n: u64) -> Result<(u64, u64)> {
    check_gap(q, k, n)?;
    let unit = u64::from(q - 1);
    Ok(match q {
        3 => (2 + 2 * (k + n), 2 * n + 2),
        4 => (3 + 3 * (k + n), 3 * n),
        _ => (unit * (n + k), unit * (n + 1)),
    })
}

/// Whether `s_q(2u^2) = s_q(u^2)` for the single-gap pattern.
///
/// This fails for `q = 5, k = 1`: the digit `q-4` at position `2n+2` meets
/// the `4` carried in at position `k+2n+1`. Every other small case holds, and
/// the solver never builds base-5 gaps with `k < 5`.
pub fn doubled_square_check(q: u32, k: u64, n: u64) -> Result<bool> {
    let u = gap_pattern(q, k, n)?;
    let sq = &u * &u;
    let doubled: Natural = &sq << 1u32;
    Ok(digit_sum_unchecked(&doubled, q) == digit_sum_unchecked(&sq, q))
}
