//! Real exponents that can be bracketed to any width: rationals, quadratic
//! surds `p + r sqrt(D)` and their reciprocals.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefinableReal {
    Rational(BigRational),
    /// `p + r sqrt(radicand)`.
    Surd {
        p: BigRational,
        r: BigRational,
        radicand: BigUint,
    },
    /// `1 / (p + r sqrt(radicand))`.
    InvSurd {
        p: BigRational,
        r: BigRational,
        radicand: BigUint,
    },
}

fn is_square(n: &BigUint) -> bool {
    let s = n.sqrt();
    &s * &s == *n
}

impl RefinableReal {
    pub fn sqrt(radicand: u64) -> Self {
        Self::surd(BigRational::zero(), BigRational::one(), BigUint::from(radicand))
    }

    pub fn inv_sqrt(radicand: u64) -> Self {
        Self::sqrt(radicand).recip()
    }

    /// `p + r sqrt(radicand)`, folded to a rational when the surd part vanishes.
    pub fn surd(p: BigRational, r: BigRational, radicand: BigUint) -> Self {
        if r.is_zero() || radicand.is_zero() {
            return RefinableReal::Rational(p);
        }
        if is_square(&radicand) {
            let root = BigInt::from(radicand.sqrt());
            return RefinableReal::Rational(p + r * BigRational::from_integer(root));
        }
        RefinableReal::Surd { p, r, radicand }
    }

    pub fn recip(self) -> Self {
        match self {
            RefinableReal::Rational(x) => RefinableReal::Rational(x.recip()),
            RefinableReal::Surd { p, r, radicand } => RefinableReal::InvSurd { p, r, radicand },
            RefinableReal::InvSurd { p, r, radicand } => RefinableReal::Surd { p, r, radicand },
        }
    }

    pub fn is_irrational(&self) -> bool {
        !matches!(self, RefinableReal::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            RefinableReal::Rational(x) => Some(x),
            _ => None,
        }
    }

    /// Rational bracket `[lo, hi]` of width at most `2^-bits`. Brackets for
    /// increasing `bits` are nested.
    pub fn bracket(&self, bits: u64) -> (BigRational, BigRational) {
        match self {
            RefinableReal::Rational(x) => (x.clone(), x.clone()),
            RefinableReal::Surd { p, r, radicand } => surd_bracket(p, r, radicand, bits),
            RefinableReal::InvSurd { p, r, radicand } => {
                let mut extra = 8;
                loop {
                    let (lo, hi) = surd_bracket(p, r, radicand, bits + extra);
                    if lo.is_positive() || hi.is_negative() {
                        let (a, b) = (hi.recip(), lo.recip());
                        let (a, b) = if a <= b { (a, b) } else { (b, a) };
                        if &b - &a <= width(bits) {
                            return (a, b);
                        }
                    }
                    extra *= 2;
                }
            }
        }
    }

    /// Rough value, for choosing parameters only.
    pub fn approx(&self) -> f64 {
        let (lo, _) = self.bracket(60);
        ratio_to_f64(&lo)
    }

    /// Continued-fraction convergents `(p_i, q_i)` of an irrational value,
    /// computed exactly from its periodic expansion.
    pub fn convergents(&self) -> Option<Convergents> {
        let (p, d, q) = self.quadratic_form()?;
        Some(Convergents {
            p,
            d_sqrt: d.sqrt(),
            d,
            q,
            h: (BigInt::one(), BigInt::zero()),
            k: (BigInt::zero(), BigInt::one()),
        })
    }

    /// Writes the value as `(P + sqrt(D)) / Q` with `Q | D - P^2`.
    fn quadratic_form(&self) -> Option<(BigInt, BigInt, BigInt)> {
        let (x, y, z, radicand) = match self {
            RefinableReal::Rational(_) => return None,
            RefinableReal::Surd { p, r, radicand } => {
                // (pn rd + rn pd sqrt(D)) / (pd rd)
                let x = p.numer() * r.denom();
                let y = r.numer() * p.denom();
                let z = p.denom() * r.denom();
                (x, y, z, BigInt::from(radicand.clone()))
            }
            RefinableReal::InvSurd { p, r, radicand } => {
                let (pp, dd, qq) = RefinableReal::Surd {
                    p: p.clone(),
                    r: r.clone(),
                    radicand: radicand.clone(),
                }
                .quadratic_form()?;
                // Q / (P + sqrt D) = (-QP + Q sqrt D) / (D - P^2)
                let x = -(&qq * &pp);
                let z = &dd - &pp * &pp;
                (x, qq, z, dd)
            }
        };
        // x + y sqrt(R) over z  ->  (P + sqrt(D)) / Q
        let d = &y * &y * &radicand;
        let (mut p, mut q) = if y.is_negative() { (-x, -z) } else { (x, z) };
        let mut d = d;
        if !(&d - &p * &p).is_multiple_of(&q) {
            let abs_q = q.abs();
            p *= &abs_q;
            d *= &q * &q;
            q *= abs_q;
        }
        Some((p, d, q))
    }
}

fn width(bits: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(60);
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

fn surd_bracket(
    p: &BigRational,
    r: &BigRational,
    radicand: &BigUint,
    bits: u64,
) -> (BigRational, BigRational) {
    // |r| * 2^-prec <= 2^-bits
    let prec = bits + r.abs().ceil().to_integer().bits() + 1;
    let scaled = (radicand << (2 * prec)).sqrt();
    let denom = BigInt::one() << prec;
    let s_lo = BigRational::new(BigInt::from(scaled.clone()), denom.clone());
    let s_hi = BigRational::new(BigInt::from(scaled + 1u32), denom);
    if r.is_positive() {
        (p + r * s_lo, p + r * s_hi)
    } else {
        (p + r * s_hi, p + r * s_lo)
    }
}

/// Iterator over convergents `(numerator, denominator)` of a quadratic irrational.
#[derive(Debug, Clone)]
pub struct Convergents {
    p: BigInt,
    d: BigInt,
    d_sqrt: BigInt,
    q: BigInt,
    h: (BigInt, BigInt),
    k: (BigInt, BigInt),
}

impl Convergents {
    /// Next partial quotient `floor((P + sqrt D) / Q)`.
    fn partial_quotient(&self) -> BigInt {
        let num = &self.p + &self.d_sqrt;
        if self.q.is_positive() {
            num.div_floor(&self.q)
        } else {
            // sqrt(D) is irrational, so the quotient is never an integer.
            -(num.div_floor(&-&self.q)) - 1
        }
    }
}

impl Iterator for Convergents {
    type Item = (BigInt, BigInt);

    fn next(&mut self) -> Option<Self::Item> {
        let a = self.partial_quotient();
        let p_next = &a * &self.q - &self.p;
        let q_next = (&self.d - &p_next * &p_next) / &self.q;
        self.p = p_next;
        self.q = q_next;
        let h = &a * &self.h.0 + &self.h.1;
        let k = &a * &self.k.0 + &self.k.1;
        self.h = (h.clone(), std::mem::replace(&mut self.h.0, h.clone()));
        self.k = (k.clone(), std::mem::replace(&mut self.k.0, k.clone()));
        Some((h, k))
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Tokens: `sqrt:D`, `inv-sqrt:D`, `surd:p,r,D` (meaning `p + r sqrt(D)`) and
/// `rat:a/b`.
impl FromStr for RefinableReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid real descriptor {s:?}"));
        let (kind, body) = s.trim().split_once(':').ok_or_else(bad)?;
        let radicand = |t: &str| -> Result<BigUint> { t.trim().parse().map_err(|_| bad()) };
        let value = match kind {
            "sqrt" => RefinableReal::surd(BigRational::zero(), BigRational::one(), radicand(body)?),
            "inv-sqrt" => {
                RefinableReal::surd(BigRational::zero(), BigRational::one(), radicand(body)?).recip()
            }
            "surd" => {
                let parts: Vec<&str> = body.split(',').collect();
                let [p, r, d] = parts.as_slice() else {
                    return Err(bad());
                };
                RefinableReal::surd(parse_rational(p)?, parse_rational(r)?, radicand(d)?)
            }
            "rat" => RefinableReal::Rational(parse_rational(body)?),
            _ => return Err(bad()),
        };
        if let RefinableReal::Rational(x) = &value {
            if x.is_zero() && kind == "inv-sqrt" {
                return Err(bad());
            }
        }
        Ok(value)
    }
}

impl fmt::Display for RefinableReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let surd = |f: &mut fmt::Formatter<'_>, p: &BigRational, r: &BigRational, d: &BigUint| {
            if p.is_zero() && r.is_one() {
                write!(f, "sqrt:{d}")
            } else {
                write!(f, "surd:{p},{r},{d}")
            }
        };
        match self {
            RefinableReal::Rational(x) => write!(f, "rat:{x}"),
            RefinableReal::Surd { p, r, radicand } => surd(f, p, r, radicand),
            RefinableReal::InvSurd { p, r, radicand } if p.is_zero() && r.is_one() => {
                write!(f, "inv-sqrt:{radicand}")
            }
            RefinableReal::InvSurd { p, r, radicand } => {
                f.write_str("inv(")?;
                surd(f, p, r, radicand)?;
                f.write_str(")")
            }
        }
    }
}

impl RefinableReal {
    pub fn sign(&self) -> Sign {
        let mut bits = 16;
        loop {
            let (lo, hi) = self.bracket(bits);
            if lo.is_positive() {
                return Sign::Plus;
            }
            if hi.is_negative() {
                return Sign::Minus;
            }
            if lo.is_zero() && hi.is_zero() {
                return Sign::NoSign;
            }
            bits *= 2;
        }
    }
}
