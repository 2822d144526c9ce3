//! Directed-rounding fixed-point arithmetic for certified `ln`, `exp` and real powers.
//!
//! A bracket at precision `p` is a pair of integers `(lo, hi)` with
//! `lo / 2^p <= x <= hi / 2^p`. Every operation rounds the lower end down and
//! the upper end up, so brackets stay valid without separate error analysis.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn one_at(p: u64) -> BigInt {
    BigInt::one() << p
}

/// `ceil(a / b)` for `b > 0`.
fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// `ceil(a / 2^s)`.
fn shr_ceil(a: &BigInt, s: u64) -> BigInt {
    -((-a) >> s)
}

fn rational_floor_fixed(x: &BigRational, p: u64) -> BigInt {
    (x.numer() << p).div_floor(x.denom())
}

fn rational_ceil_fixed(x: &BigRational, p: u64) -> BigInt {
    div_ceil(&(x.numer() << p), x.denom())
}

pub(crate) fn fixed_to_rational(v: &BigInt, p: u64) -> BigRational {
    BigRational::new(v.clone(), one_at(p))
}

/// Bracket of `2 atanh(z)` for `0 <= z < 1/3`, `z` given as a fixed-point bracket.
fn two_atanh(z_lo: &BigInt, z_hi: &BigInt, p: u64) -> (BigInt, BigInt) {
    let shift = 2 * p;

    let z2 = z_lo * z_lo;
    let mut pw = z_lo.clone();
    let mut lo = BigInt::zero();
    let mut i = 0u64;
    loop {
        let term = &pw / BigInt::from(2 * i + 1);
        if term.is_zero() {
            break;
        }
        lo += term;
        pw = (&pw * &z2) >> shift;
        i += 1;
    }

    let z2 = z_hi * z_hi;
    let mut pw = z_hi.clone();
    let mut hi = BigInt::zero();
    let mut i = 0u64;
    loop {
        hi += div_ceil(&pw, &BigInt::from(2 * i + 1));
        if pw <= BigInt::one() {
            // Remaining terms shrink by at least 1/9 each: their sum is below one unit.
            hi += 2;
            break;
        }
        pw = shr_ceil(&(&pw * &z2), shift);
        i += 1;
    }
    (lo << 1, hi << 1)
}

/// Bracket of `ln 2` at precision `p`.
pub(crate) fn ln2_fixed(p: u64) -> (BigInt, BigInt) {
    let one = one_at(p);
    let three = BigInt::from(3);
    let z_lo = &one / &three;
    let z_hi = div_ceil(&one, &three);
    two_atanh(&z_lo, &z_hi, p)
}

/// Bracket of `ln n` at precision `p`, for `n >= 1`.
pub(crate) fn ln_fixed(n: &BigUint, p: u64) -> (BigInt, BigInt) {
    assert!(!n.is_zero(), "ln of zero");
    let b = n.bits() - 1;
    let n = BigInt::from(n.clone());
    let pow2 = BigInt::one() << b;
    // n = 2^b * y with y in [1, 2); ln y = 2 atanh((y-1)/(y+1)).
    let num = (&n - &pow2) << p;
    let den = &n + &pow2;
    let z_lo = num.div_floor(&den);
    let z_hi = div_ceil(&num, &den);
    let (a_lo, a_hi) = two_atanh(&z_lo, &z_hi, p);
    let (l2_lo, l2_hi) = ln2_fixed(p);
    let b = BigInt::from(b);
    (&b * l2_lo + a_lo, &b * l2_hi + a_hi)
}

fn exp_point(x: &BigInt, p: u64, upper: bool) -> BigInt {
    debug_assert!(!x.is_negative());
    // Halve until the argument is below 1/2, run Taylor, square back up.
    let s = (x.bits() + 1).saturating_sub(p);
    let y = if upper { shr_ceil(x, s) } else { x >> s };
    let one = one_at(p);
    let mut sum = one.clone();
    let mut term = one;
    let mut i = 1u64;
    loop {
        let num = &term * &y;
        let den = BigInt::from(i) << p;
        if upper {
            term = div_ceil(&num, &den);
            sum += &term;
            if term <= BigInt::one() {
                sum += 2;
                break;
            }
        } else {
            term = num / den;
            if term.is_zero() {
                break;
            }
            sum += &term;
        }
        i += 1;
    }
    for _ in 0..s {
        let sq = &sum * &sum;
        sum = if upper { shr_ceil(&sq, p) } else { sq >> p };
    }
    sum
}

/// Bracket of `exp(x)` for a nonnegative fixed-point bracket `x`.
pub(crate) fn exp_fixed(x_lo: &BigInt, x_hi: &BigInt, p: u64) -> (BigInt, BigInt) {
    let zero = BigInt::zero();
    let lo = if x_lo.sign() == Sign::Minus {
        // exp is at least 0 on the negative part; only needed as a safe floor.
        zero.clone()
    } else {
        exp_point(x_lo, p, false)
    };
    let hi = exp_point(&x_hi.max(&zero).clone(), p, true);
    (lo, hi)
}

/// Rational bracket of `ln n`, roughly `bits` bits wide.
pub fn ln_bracket(n: &BigUint, bits: u64) -> (BigRational, BigRational) {
    let (lo, hi) = ln_fixed(n, bits);
    (fixed_to_rational(&lo, bits), fixed_to_rational(&hi, bits))
}

/// Rational bracket of `log2 n`.
pub fn log2_bracket(n: &BigUint, bits: u64) -> (BigRational, BigRational) {
    let (lo, hi) = ln_fixed(n, bits);
    let (l2_lo, l2_hi) = ln2_fixed(bits);
    (
        BigRational::new(lo, l2_hi),
        BigRational::new(hi, l2_lo),
    )
}

/// Rational bracket of `exp(x)` for `x >= 0`.
pub fn exp_bracket(x: &BigRational, bits: u64) -> (BigRational, BigRational) {
    let lo = rational_floor_fixed(x, bits);
    let hi = rational_ceil_fixed(x, bits);
    let (e_lo, e_hi) = exp_fixed(&lo, &hi, bits);
    (fixed_to_rational(&e_lo, bits), fixed_to_rational(&e_hi, bits))
}

/// Fixed-point bracket of `u^alpha` for `u >= 1` and an exponent known to lie
/// in `[alpha_lo, alpha_hi]` with `alpha_lo >= 0`.
pub(crate) fn pow_fixed(
    u: &BigUint,
    alpha_lo: &BigRational,
    alpha_hi: &BigRational,
    p: u64,
) -> (BigInt, BigInt) {
    let (l_lo, l_hi) = ln_fixed(u, p);
    let y_lo = (alpha_lo.numer() * l_lo).div_floor(alpha_lo.denom());
    let y_hi = div_ceil(&(alpha_hi.numer() * l_hi), alpha_hi.denom());
    exp_fixed(&y_lo, &y_hi, p)
}

/// `floor` of a fixed-point bracket when both ends agree.
pub(crate) fn agreed_floor(lo: &BigInt, hi: &BigInt, p: u64) -> Option<BigInt> {
    let a = lo >> p;
    let b = hi >> p;
    (a == b).then_some(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn approx(r: &BigRational) -> f64 {
        r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
    }

    #[test]
    fn ln_brackets_contain_truth() {
        for n in [1u64, 2, 3, 10, 1000, 123456789, u64::MAX] {
            let (lo, hi) = ln_bracket(&BigUint::from(n), 80);
            let truth = (n as f64).ln();
            assert!(approx(&lo) <= truth + 1e-12 && truth - 1e-12 <= approx(&hi), "n={n}");
            assert!(&hi - &lo < BigRational::new(1.into(), (BigInt::one() << 60u32).into()));
        }
    }

    #[test]
    fn ln2_digits() {
        let (lo, hi) = ln2_fixed(200);
        // ln 2 = 0.693147180559945309417232121458176568...
        let scaled = |v: &BigInt| (v * BigInt::from(10).pow(30)) >> 200u32;
        let expect: BigInt = "693147180559945309417232121458".parse().unwrap();
        assert!(scaled(&lo) <= expect && expect <= scaled(&hi) + 1);
    }

    #[test]
    fn exp_brackets_contain_truth() {
        for k in [0i64, 1, 2, 5, 20, 40] {
            let (lo, hi) = exp_bracket(&BigRational::from_integer(k.into()), 96);
            let truth = (k as f64).exp();
            let rel = |r: &BigRational| approx(r) / truth;
            assert!(rel(&lo) <= 1.0 + 1e-12 && rel(&hi) >= 1.0 - 1e-12, "k={k}");
            assert!(lo <= hi);
        }
        // e = 2.718281828459045235360287...
        let (lo, hi) = exp_bracket(&BigRational::one(), 128);
        let e = "2718281828459045235360287"
            .parse::<BigInt>()
            .map(|n| BigRational::new(n, BigInt::from(10).pow(24)))
            .unwrap();
        // e is truncated to 24 decimals above.
        assert!(lo <= &e + BigRational::new(1.into(), BigInt::from(10).pow(24)) && e <= hi);
    }

    #[test]
    fn pow_matches_exact_roots() {
        // 2^{1/2} bracket straddles nothing: floor(1000^{1/2}) = 31.
        let half = BigRational::new(1.into(), 2.into());
        let (lo, hi) = pow_fixed(&BigUint::from(1000u32), &half, &half, 64);
        assert_eq!(agreed_floor(&lo, &hi, 64), Some(BigInt::from(31)));
        let third = BigRational::new(1.into(), 3.into());
        let (lo, hi) = pow_fixed(&BigUint::from(4101u32), &third, &third, 64);
        assert_eq!(agreed_floor(&lo, &hi, 64), Some(BigInt::from(16)));
    }
}
