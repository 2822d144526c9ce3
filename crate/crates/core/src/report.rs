//! Witness reports, construction traces and their JSON form.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fracpow::FracParams;
use crate::radix::{Natural, RunLengthPattern};
use crate::ratio::RatioTarget;

/// The map `f` in `s_q(f(u)) / s_q(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    /// `f(u) = u^2`.
    Square,
    /// `f(u) = floor(u^{h/m})` with `gcd(h, m) = 1`; never `2/1`.
    Rational { h: u64, m: u64 },
}

impl Exponent {
    pub fn rational(h: u64, m: u64) -> Result<Self> {
        if h == 0 || m == 0 {
            return Err(Error::Domain(format!("exponent {h}/{m} must be positive")));
        }
        let g = h.gcd(&m);
        let (h, m) = (h / g, m / g);
        if (h, m) == (2, 1) {
            Ok(Exponent::Square)
        } else {
            Ok(Exponent::Rational { h, m })
        }
    }

    /// Computes `f(u)` directly.
    pub fn apply(&self, u: &Natural) -> Natural {
        match *self {
            Exponent::Square => u * u,
            Exponent::Rational { h, m } => crate::fracpow::floor_pow_rational(u, h, m)
                .expect("exponent parts are positive"),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Square => f.write_str("2"),
            Exponent::Rational { h, m } if *m == 1 => write!(f, "{h}"),
            Exponent::Rational { h, m } => write!(f, "{h}/{m}"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid exponent {s:?}"));
        let num = |p: &str| -> Result<u64> {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            p.parse().map_err(|_| bad())
        };
        let (h, m) = match s.trim().split_once('/') {
            Some((h, m)) => (num(h)?, num(m)?),
            None => (num(s.trim())?, 1),
        };
        Exponent::rational(h, m).map_err(|_| bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Route {
    /// Base-2 ladder pattern, ratio below one.
    #[serde(rename = "base2-ladder")]
    Base2Ladder,
    /// Base-2 ladder pattern followed by 3/2 amplification steps.
    #[serde(rename = "base2-amplified")]
    Base2Amplified,
    /// General-base ladder pattern, ratio below one.
    #[serde(rename = "baseq-ladder")]
    BaseQLadder,
    /// Single-gap pattern, ratio in (1/2, 1).
    #[serde(rename = "baseq-mid")]
    BaseQMid,
    /// Single-gap pattern spread over `d` shifted copies.
    #[serde(rename = "baseq-chain")]
    BaseQChain,
    /// Binomial bracketing for `floor(u^{h/m})` with `h/m < 1/2`.
    #[serde(rename = "frac-binomial")]
    FracBinomial,
    /// Exponent 1/2 via the square of a witness for the inverse ratio.
    #[serde(rename = "frac-square")]
    FracSquare,
    /// No construction: the report only records a verification.
    #[serde(rename = "trivial")]
    Trivial,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Base2Ladder => "base2-ladder",
            Route::Base2Amplified => "base2-amplified",
            Route::BaseQLadder => "baseq-ladder",
            Route::BaseQMid => "baseq-mid",
            Route::BaseQChain => "baseq-chain",
            Route::FracBinomial => "frac-binomial",
            Route::FracSquare => "frac-square",
            Route::Trivial => "trivial",
        }
    }
}

/// One `u -> (2^{2w+1} + 1) u` step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmplifyStep {
    pub w: u64,
}

/// Parameters of `v = sum_e q^{2 g_e (m+1)} u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainParams {
    pub d: u64,
    pub m: u64,
    pub t_d: u64,
    /// The block offsets `g_1 < ... < g_d`.
    pub offsets: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub route: Route,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Scale applied to the single-gap parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<u64>,
    /// Ratio realized by the base witness before amplification or chaining.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "ratio_opt"
    )]
    pub inner_ratio: Option<RatioTarget>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub amplification: Vec<AmplifyStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frac: Option<FracParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Box<ConstructionTrace>>,
}

impl ConstructionTrace {
    pub fn new(route: Route) -> Self {
        ConstructionTrace {
            route,
            m: None,
            t: None,
            k: None,
            n: None,
            scale: None,
            inner_ratio: None,
            amplification: Vec::new(),
            chain: None,
            frac: None,
            inner: None,
        }
    }
}

/// A witness together with both digit sums and how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub q: u32,
    pub exponent: Exponent,
    pub witness: Natural,
    pub s_u: u64,
    pub s_fu: u64,
    pub ratio: RatioTarget,
    pub trace: ConstructionTrace,
    pub verified: bool,
}

impl WitnessReport {
    /// Exact cross-multiplied check `s_fu * c == s_u * a`.
    pub fn ratio_holds(&self) -> bool {
        self.ratio.matches(self.s_fu, self.s_u)
    }

    pub fn pattern(&self) -> RunLengthPattern {
        RunLengthPattern::of(&self.witness, self.q).expect("report base is valid")
    }

    pub fn to_json(&self) -> ReportJson {
        ReportJson {
            base: self.q,
            exponent: self.exponent.to_string(),
            witness: self.witness.to_string(),
            pattern: self.pattern().to_string(),
            s_u: self.s_u.to_string(),
            s_fu: self.s_fu.to_string(),
            ratio: self.ratio.to_string(),
            trace: self.trace.clone(),
            verified: self.verified,
        }
    }
}

/// Wire form of a [`WitnessReport`]: every natural is a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub base: u32,
    pub exponent: String,
    pub witness: String,
    pub pattern: String,
    pub s_u: String,
    pub s_fu: String,
    pub ratio: String,
    pub trace: ConstructionTrace,
    pub verified: bool,
}

impl ReportJson {
    /// Parses the wire form back. The digit sums and the verified flag are
    /// taken at face value; callers that need trust must re-verify.
    pub fn into_report(self) -> Result<WitnessReport> {
        let parse_u64 = |s: &str, what: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| Error::Parse(format!("{what} {s:?} is not a decimal integer")))
        };
        let witness: Natural = self
            .witness
            .parse()
            .map_err(|_| Error::Parse(format!("witness {:?} is not decimal", self.witness)))?;
        Ok(WitnessReport {
            q: self.base,
            exponent: self.exponent.parse()?,
            witness,
            s_u: parse_u64(&self.s_u, "s_u")?,
            s_fu: parse_u64(&self.s_fu, "s_fu")?,
            ratio: self.ratio.parse()?,
            trace: self.trace,
            verified: self.verified,
        })
    }
}

impl Serialize for RatioTarget {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RatioTarget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

mod ratio_opt {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &Option<RatioTarget>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.collect_str(r),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<RatioTarget>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Serde helpers writing naturals and rationals as decimal strings.
pub(crate) mod decimal {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::radix::Natural;

    pub fn serialize<S: Serializer>(v: &Natural, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Natural, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }

    pub mod rational {
        use super::*;

        pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
            s.collect_str(&format!("{}/{}", v.numer(), v.denom()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
            let s = String::deserialize(d)?;
            let (n, m) = s.split_once('/').unwrap_or((s.as_str(), "1"));
            let n: BigInt = n.parse().map_err(serde::de::Error::custom)?;
            let m: BigInt = m.parse().map_err(serde::de::Error::custom)?;
            if m == BigInt::from(0) {
                return Err(serde::de::Error::custom("zero denominator"));
            }
            Ok(BigRational::new(n, m))
        }
    }
}
