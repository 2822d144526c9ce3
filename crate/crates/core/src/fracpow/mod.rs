//! Fractional exponents: exact integer roots, witnesses for `floor(u^{h/m})`
//! with `h/m < 1/2`, certified real powers and the irrational-exponent demos.

pub mod interval;
mod real;

pub use real::{Convergents, RefinableReal};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_base, Error, Result};
use crate::oracle::certify;
use crate::radix::{digit_count, digit_sum_unchecked, pow, Natural};
use crate::ratio::RatioTarget;
use crate::report::{decimal, ConstructionTrace, Exponent, Route, WitnessReport};

/// Default cap on fractional bits used by [`floor_pow_real`].
pub const DEFAULT_MAX_PRECISION: u64 = 1 << 20;

const START_PRECISION: u64 = 128;

/// `floor(n^{1/m})`.
pub fn integer_root(n: &Natural, m: u64) -> Result<Natural> {
    if m == 0 {
        return Err(Error::Domain("root index must be at least 1".into()));
    }
    if m == 1 || n.is_zero() {
        return Ok(n.clone());
    }
    if m >= n.bits() {
        // n < 2^m, so the root is 1.
        return Ok(Natural::one());
    }
    let m = u32::try_from(m).map_err(|_| Error::Range(format!("root index {m} too large")))?;
    Ok(n.nth_root(m))
}

/// `floor(u^{h/m})`, computed as `integer_root(u^h, m)`.
pub fn floor_pow_rational(u: &Natural, h: u64, m: u64) -> Result<Natural> {
    if h == 0 || m == 0 {
        return Err(Error::Domain(format!("exponent {h}/{m} must be positive")));
    }
    let h32 = u32::try_from(h).map_err(|_| Error::Range(format!("power {h} too large")))?;
    integer_root(&u.pow(h32), m)
}

/// Parameters of the fractional-exponent construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FracParams {
    pub q: u32,
    pub h: u64,
    pub m: u64,
    pub h2: u64,
    pub j: u64,
    pub i: u64,
    pub w: u64,
    #[serde(with = "decimal")]
    pub d: Natural,
    pub l: u64,
    #[serde(with = "decimal::rational")]
    pub t1_bound: BigRational,
    #[serde(with = "decimal")]
    pub t2: Natural,
    #[serde(with = "decimal")]
    pub e: Natural,
    pub n: u64,
}

impl FracParams {
    /// `u = q^{nm/h} + (m(d+1)/h) q^{nm/h - n} + e`.
    pub fn witness(&self) -> Result<Natural> {
        let top = self.n * self.m / self.h;
        let mid = Natural::from(self.m) * (&self.d + 1u32);
        if !(&mid % self.h).is_zero() || (self.n * self.m) % self.h != 0 {
            return Err(Error::ConstructionDefect("fractional parameters are not integral".into()));
        }
        let mid = mid / self.h;
        Ok(pow(self.q, top) + mid * pow(self.q, top - self.n) + &self.e)
    }

    /// The predicted value of `floor(u^{h/m})`, namely `q^n + d`.
    pub fn predicted_floor(&self) -> Natural {
        pow(self.q, self.n) + &self.d
    }
}

/// Largest divisor of `h` coprime to `q`.
fn coprime_part(h: u64, q: u64) -> u64 {
    let mut h2 = h;
    loop {
        let g = h2.gcd(&q);
        if g == 1 {
            return h2;
        }
        h2 /= g;
    }
}

/// Multiplicative order of `q` modulo `n` (1 when `n = 1`).
fn mult_order(q: u64, n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let n128 = u128::from(n);
    let q = u128::from(q) % n128;
    let mut acc = q;
    let mut j = 1;
    while acc != 1 {
        acc = acc * q % n128;
        j += 1;
    }
    j
}

/// `|C(x, k)|` for rational `x`.
fn binom_abs(x: &BigRational, k: u64) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        acc *= x - BigRational::from_integer(i.into());
        acc /= BigRational::from_integer((i + 1).into());
    }
    acc.abs()
}

fn to_natural_ceil(x: &BigRational) -> Natural {
    x.ceil().to_integer().to_biguint().unwrap_or_default()
}

/// Smallest natural with base-`q` digit sum `sigma`: `(beta+1) q^alpha - 1`.
fn min_with_digit_sum(q: u32, sigma: u64) -> Natural {
    let unit = u64::from(q - 1);
    let (alpha, beta) = (sigma / unit, sigma % unit);
    Natural::from(beta + 1) * pow(q, alpha) - 1u32
}

/// Builds the parameter ladder for `floor(u^{h/m})` and target ratio `r`.
pub fn frac_params(q: u32, h: u64, m: u64, r: RatioTarget) -> Result<FracParams> {
    check_base(q, 2)?;
    if h == 0 || m == 0 || h.gcd(&m) != 1 {
        return Err(Error::Domain(format!("exponent {h}/{m} must be positive and reduced")));
    }
    if 2 * h >= m {
        return Err(Error::UnsupportedExponent { h, m });
    }
    let (a, c) = (r.numer(), r.denom());
    let q64 = u64::from(q);

    let h2 = coprime_part(h, q64);
    let j = mult_order(q64, h2);
    let qj1 = pow(q, j) - 1u32;
    let base = Natural::from(m) * &qj1;
    let mut i = 0;
    while !(&base * pow(q, i) % h).is_zero() {
        i += 1;
    }
    let a0 = &base * pow(q, i) / h;
    let s_a0 = digit_sum_unchecked(&a0, q);

    let unit = q64 - 1;
    let mut w = 1u64;
    let sigma = loop {
        let total = unit
            .checked_mul(w)
            .and_then(|x| x.checked_mul(c))
            .ok_or_else(|| Error::Range(format!("ratio {r} too large")))?;
        let wa = w
            .checked_mul(a)
            .ok_or_else(|| Error::Range(format!("ratio {r} too large")))?;
        if total > 1 + s_a0 && j + i <= wa {
            break total - 1 - s_a0;
        }
        w += 1;
    };
    let wa = w * a;

    let d = &qj1 * pow(q, wa - j) - 1u32;
    let l = digit_count(&d, q)?.max(1);

    let big_m = BigRational::new(BigInt::from(m), BigInt::from(h));
    let floor_m = m / h;
    let t1_bound = if m % h == 0 {
        BigRational::zero()
    } else {
        // Tail sum_{k > M} |C(M,k)| q^{l(M-k)} d^k: the coefficients decrease
        // in k past M, so a geometric series with ratio d/q^l bounds it.
        let big_k = floor_m + 1;
        let ql = BigInt::from(pow(q, l));
        let dd = BigInt::from(d.clone());
        let q_lm_root = integer_root(&pow(q, l * m), h)? + 1u32;
        binom_abs(&big_m, big_k)
            * BigRational::from_integer(BigInt::from(q_lm_root))
            * BigRational::new(dd.pow(big_k as u32), ql.pow(big_k as u32))
            * BigRational::new(ql.clone(), &ql - &dd)
    };

    let mut e = min_with_digit_sum(q, sigma);
    while BigRational::from_integer(BigInt::from(e.clone())) <= t1_bound {
        e *= q;
    }

    let t2 = (2..=floor_m)
        .map(|k| to_natural_ceil(&binom_abs(&big_m, k)))
        .max()
        .unwrap_or_else(Natural::one);

    let h32 = u32::try_from(h).map_err(|_| Error::Range(format!("power {h} too large")))?;
    let e_h = e.pow(h32);
    let lhs_t2 = &t2 * d.pow(floor_m as u32);
    let md1 = Natural::from(m) * (&d + 1u32);
    let mut n = h;
    loop {
        let qn = pow(q, n);
        let ok = n > l
            && lhs_t2 <= qn
            && e_h < pow(q, n * (m - 2 * h))
            && md1 < Natural::from(h) * &qn;
        if ok {
            break;
        }
        n += h;
    }

    Ok(FracParams {
        q,
        h,
        m,
        h2,
        j,
        i,
        w,
        d,
        l,
        t1_bound,
        t2,
        e,
        n,
    })
}

/// Witness `u` with `s_q(floor(u^{h/m})) / s_q(u) = r`.
///
/// `h/m < 1/2` uses the binomial construction; `h/m = 1/2` squares a witness
/// for the inverse ratio.
pub fn witness_frac(q: u32, h: u64, m: u64, r: RatioTarget) -> Result<WitnessReport> {
    check_base(q, 2)?;
    let exponent = Exponent::rational(h, m)?;
    let (h, m) = match exponent {
        Exponent::Rational { h, m } => (h, m),
        Exponent::Square => return Err(Error::UnsupportedExponent { h: 2, m: 1 }),
    };
    if (h, m) == (1, 2) {
        let inner = crate::solver::witness(q, r.inverse())?;
        let mut trace = ConstructionTrace::new(Route::FracSquare);
        trace.inner = Some(Box::new(inner.trace));
        let u = &inner.witness * &inner.witness;
        return certify(u, q, exponent, r, trace);
    }
    let params = frac_params(q, h, m, r)?;
    let u = params.witness()?;
    if floor_pow_rational(&u, h, m)? != params.predicted_floor() {
        return Err(Error::ConstructionDefect(format!(
            "floor(u^({h}/{m})) differs from q^n + d in base {q} for ratio {r}"
        )));
    }
    let mut trace = ConstructionTrace::new(Route::FracBinomial);
    trace.n = Some(params.n);
    trace.frac = Some(params);
    certify(u, q, exponent, r, trace)
}

/// Rebuilds the witness recorded in a fractional trace.
pub(crate) fn replay(q: u32, trace: &ConstructionTrace) -> Result<Natural> {
    match trace.route {
        Route::FracBinomial => {
            let params = trace
                .frac
                .as_ref()
                .ok_or_else(|| Error::Parse("fractional trace without parameters".into()))?;
            if params.q != q {
                return Err(Error::Parse("trace base does not match".into()));
            }
            params.witness()
        }
        Route::FracSquare => {
            let inner = trace
                .inner
                .as_ref()
                .ok_or_else(|| Error::Parse("square-route trace without inner trace".into()))?;
            let v = crate::solver::replay(q, Exponent::Square, inner)?;
            Ok(&v * &v)
        }
        _ => Err(Error::Parse(format!("route {} is not fractional", trace.route.as_str()))),
    }
}

/// Reads the precision cap from `DIGITWITNESS_MAX_PRECISION`, falling back
/// to [`DEFAULT_MAX_PRECISION`].
pub fn max_precision_from_env() -> Result<u64> {
    match std::env::var("DIGITWITNESS_MAX_PRECISION") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&p| p >= 1)
            .ok_or_else(|| Error::Parse(format!("DIGITWITNESS_MAX_PRECISION={v:?} is not a positive integer"))),
        Err(_) => Ok(DEFAULT_MAX_PRECISION),
    }
}

/// Certified `floor(u^alpha)` for `u >= 1` and `alpha > 0`.
pub fn floor_pow_real(u: &Natural, alpha: &RefinableReal, max_precision: u64) -> Result<Natural> {
    if u.is_zero() {
        return Err(Error::Domain("floor_pow_real needs u >= 1".into()));
    }
    if let Some(x) = alpha.as_rational() {
        if !x.is_positive() {
            return Err(Error::Domain(format!("exponent {x} must be positive")));
        }
        let (p, m) = (x.numer().to_u64(), x.denom().to_u64());
        return match (p, m) {
            (Some(p), Some(m)) => floor_pow_rational(u, p, m),
            _ => Err(Error::Range(format!("exponent {x} has oversized parts"))),
        };
    }
    if alpha.sign() != num_bigint::Sign::Plus {
        return Err(Error::Domain(format!("exponent {alpha} must be positive")));
    }
    if u.is_one() {
        return Ok(Natural::one());
    }
    let slack = u64::BITS as u64 - u.bits().leading_zeros() as u64 + 4;
    let mut p = START_PRECISION.min(max_precision.max(1));
    loop {
        let (a_lo, a_hi) = alpha.bracket(p + slack);
        let (lo, hi) = interval::pow_fixed(u, &a_lo, &a_hi, p);
        if let Some(f) = interval::agreed_floor(&lo, &hi, p) {
            return Ok(f.to_biguint().expect("powers of u >= 1 are positive"));
        }
        if p >= max_precision {
            return Err(Error::IndeterminateFloor { precision: p });
        }
        p = (p * 2).min(max_precision);
    }
}

/// One certified point of the limsup or liminf demonstration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DemoPoint {
    pub mode: DemoMode,
    pub q: u32,
    pub alpha: String,
    pub k: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", with = "rational_opt")]
    pub r: Option<BigRational>,
    #[serde(with = "decimal")]
    pub n_value: Natural,
    #[serde(with = "decimal")]
    pub f_value: Natural,
    #[serde(serialize_with = "as_string")]
    pub s_n: u64,
    #[serde(serialize_with = "as_string")]
    pub s_f: u64,
    #[serde(with = "decimal::rational")]
    pub ratio_bound: BigRational,
}

impl DemoPoint {
    /// Exact ratio `s_f / s_n`.
    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.s_f.into(), self.s_n.into())
    }

    /// Whether the ratio sits on the promised side of `ratio_bound`.
    pub fn bound_holds(&self) -> bool {
        match self.mode {
            DemoMode::Limsup => self.ratio() >= self.ratio_bound,
            DemoMode::Liminf => self.ratio() <= self.ratio_bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DemoMode {
    Limsup,
    Liminf,
}

impl std::str::FromStr for DemoMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "limsup" => Ok(DemoMode::Limsup),
            "liminf" => Ok(DemoMode::Liminf),
            _ => Err(Error::Parse(format!("demo mode must be limsup or liminf, got {s:?}"))),
        }
    }
}

fn as_string<S: serde::Serializer, T: std::fmt::Display>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

mod rational_opt {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.collect_str(&format!("{}/{}", r.numer(), r.denom())),
            None => s.serialize_none(),
        }
    }
}

const CONVERGENT_CAP: usize = 10_000;

/// Point `n = q^k` with `s_q(floor(n^alpha)) >= (q-1) j > target`.
///
/// `k` is a convergent denominator with `k alpha` just below an integer, so
/// the top digits of `q^{k alpha}` are all `q-1`.
pub fn limsup_demo(
    q: u32,
    alpha: &RefinableReal,
    target: u64,
    max_precision: u64,
) -> Result<DemoPoint> {
    check_base(q, 2)?;
    if !alpha.is_irrational() {
        return Err(Error::Domain(format!("limsup demo needs an irrational exponent, got {alpha}")));
    }
    if alpha.sign() != num_bigint::Sign::Plus {
        return Err(Error::Domain(format!("exponent {alpha} must be positive")));
    }
    let unit = u64::from(q - 1);
    let j = target / unit + 1;
    // With delta = p - k alpha, q^{k alpha} = q^p q^{-delta} keeps its top j
    // digits at q-1 exactly when q^{-delta} >= 1 - q^{-j}, i.e. when
    // delta ln q <= ln(q^j / (q^j - 1)).
    let qj = pow(q, j);
    let log_bits = 64 + 2 * qj.bits();
    let (ln_qj, _) = interval::ln_bracket(&qj, log_bits);
    let (_, ln_qj1) = interval::ln_bracket(&(&qj - 1u32), log_bits);
    let (_, ln_q) = interval::ln_bracket(&Natural::from(q), log_bits);
    let eps = (ln_qj - ln_qj1) / ln_q;
    let jr = BigRational::from_integer(j.into());
    let convergents = alpha.convergents().expect("irrational descriptor");
    for (p, k) in convergents.take(CONVERGENT_CAP) {
        if !k.is_positive() {
            continue;
        }
        let bits = k.bits() + 2 * j * u64::from(32 - q.leading_zeros()) + 16;
        let (a_lo, a_hi) = alpha.bracket(bits);
        let kr = BigRational::from_integer(k.clone());
        let pr = BigRational::from_integer(p.clone());
        if &kr * &a_hi >= pr || &kr * &a_lo <= jr {
            continue;
        }
        if !eps.is_positive() || &pr - &kr * &a_lo >= eps {
            continue;
        }
        let k = k
            .to_u64()
            .ok_or_else(|| Error::SearchExhausted("convergent denominator overflow".into()))?;
        let n_value = pow(q, k);
        let f_value = floor_pow_real(&n_value, alpha, max_precision)?;
        let s_n = digit_sum_unchecked(&n_value, q);
        let s_f = digit_sum_unchecked(&f_value, q);
        let point = DemoPoint {
            mode: DemoMode::Limsup,
            q,
            alpha: alpha.to_string(),
            k,
            j: Some(j),
            r: None,
            n_value,
            f_value,
            s_n,
            s_f,
            ratio_bound: BigRational::from_integer((unit * j).into()),
        };
        if !point.bound_holds() || s_f <= target {
            return Err(Error::ConstructionDefect(format!(
                "limsup point k={k} gives digit sum {s_f}, expected at least {}",
                unit * j
            )));
        }
        return Ok(point);
    }
    Err(Error::SearchExhausted(format!(
        "no convergent of {alpha} within {CONVERGENT_CAP} terms meets the limsup conditions"
    )))
}

/// Fraction with denominator at most `max_den` strictly inside `(lo, hi)`
/// closest to their midpoint.
fn nearest_small_fraction(lo: &BigRational, hi: &BigRational, max_den: u64) -> Option<BigRational> {
    let two = BigRational::from_integer(2.into());
    let mid = (lo + hi) / &two;
    let mut best: Option<BigRational> = None;
    for den in 1..=max_den {
        let d = BigInt::from(den);
        let num = (mid.clone() * BigRational::from_integer(d.clone())).round().to_integer();
        for cand in [&num - 1, num.clone(), &num + 1] {
            let f = BigRational::new(cand, d.clone());
            if &f <= lo || &f >= hi {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => (&f - &mid).abs() < (b - &mid).abs(),
            };
            if better {
                best = Some(f);
            }
        }
    }
    best
}

/// Point `u` with `floor(u^alpha) = q^k` and `s_q(u) >= (q-1) k (r-1) > target`.
pub fn liminf_demo(
    q: u32,
    alpha: &RefinableReal,
    target: u64,
    max_precision: u64,
) -> Result<DemoPoint> {
    check_base(q, 2)?;
    if !alpha.is_irrational() {
        return Err(Error::Domain(format!("liminf demo needs an irrational exponent, got {alpha}")));
    }
    let (a_lo, a_hi) = alpha.bracket(64);
    if !a_lo.is_positive() || a_hi >= BigRational::one() {
        return Err(Error::Domain(format!("liminf demo needs alpha in (0, 1), got {alpha}")));
    }
    let inv = alpha.clone().recip();
    let (inv_lo, _) = inv.bracket(64);
    let one = BigRational::one();
    let mut max_den = 8;
    let r = loop {
        if let Some(r) = nearest_small_fraction(&one, &inv_lo, max_den) {
            break r;
        }
        max_den *= 2;
    };
    let excess = &r - &one;
    let step = excess
        .denom()
        .to_u64()
        .ok_or_else(|| Error::Range("ratio denominator too large".into()))?;
    let unit = u64::from(q - 1);
    let mut k = step;
    while BigRational::from_integer((unit * k).into()) * &excess <= BigRational::from_integer(target.into()) {
        k += step;
    }
    let big_l = (BigRational::from_integer(k.into()) * &excess)
        .to_integer()
        .to_u64()
        .expect("k (r-1) is a small integer");

    let qk = pow(q, k);
    let ceil = floor_pow_real(&qk, &inv, max_precision)? + 1u32;
    let ql = pow(q, big_l);
    let low = &ceil % &ql;
    let u = &ceil + &ql - 1u32 - low;

    let f_value = floor_pow_real(&u, alpha, max_precision)?;
    if f_value != qk {
        return Err(Error::ConstructionDefect(format!(
            "liminf point k={k}: floor(u^alpha) is not q^k"
        )));
    }
    let s_n = digit_sum_unchecked(&u, q);
    let s_f = digit_sum_unchecked(&f_value, q);
    let point = DemoPoint {
        mode: DemoMode::Liminf,
        q,
        alpha: alpha.to_string(),
        k,
        j: None,
        r: Some(r),
        n_value: u,
        f_value,
        s_n,
        s_f,
        ratio_bound: BigRational::new(BigInt::one(), BigInt::from(unit * big_l)),
    };
    if !point.bound_holds() || s_n <= target {
        return Err(Error::ConstructionDefect(format!(
            "liminf point k={k} gives digit sum {s_n}, expected more than {target}"
        )));
    }
    Ok(point)
}
