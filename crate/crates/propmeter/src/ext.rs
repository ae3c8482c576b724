//! Extended-real scalars: finite `f64` values plus two infinities.
//!
//! Every value larger in magnitude than [`INF_THRESHOLD`] is canonicalized
//! to the matching infinity at construction time, so downstream code never
//! has to compare against the threshold again. NaN is rejected outright.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Magnitudes at or above this value are treated as infinite.
pub const INF_THRESHOLD: f64 = 1e20;

/// A finite real or one of the two infinities. Finite payloads are never
/// NaN and always have magnitude below [`INF_THRESHOLD`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtRealError {
    #[error("NaN is not a valid extended-real value")]
    Nan,
    #[error("sum of opposite infinities is undefined")]
    OppositeInfinities,
    #[error("product of zero and an infinity is undefined")]
    ZeroTimesInfinity,
    #[error("cannot parse {input:?} as an extended-real value")]
    Parse { input: String },
}

impl ExtReal {
    /// Canonicalizing constructor. Maps oversized magnitudes (including the
    /// IEEE infinities) to `NegInf`/`PosInf` and rejects NaN.
    pub fn new(raw: f64) -> Result<Self, ExtRealError> {
        if raw.is_nan() {
            return Err(ExtRealError::Nan);
        }
        if raw >= INF_THRESHOLD {
            Ok(ExtReal::PosInf)
        } else if raw <= -INF_THRESHOLD {
            Ok(ExtReal::NegInf)
        } else {
            Ok(ExtReal::Finite(raw))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    pub fn finite_value(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Addition. The only undefined case is `PosInf + NegInf` (either way
    /// around); finite sums that overflow the threshold canonicalize.
    pub fn checked_add(self, other: ExtReal) -> Result<ExtReal, ExtRealError> {
        use ExtReal::*;
        match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(ExtRealError::OppositeInfinities),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => ExtReal::new(a + b),
        }
    }

    /// Multiplication. Zero times an infinity is undefined; a nonzero
    /// finite factor flips an infinity by its sign.
    pub fn checked_mul(self, other: ExtReal) -> Result<ExtReal, ExtRealError> {
        use ExtReal::*;
        let signed_inf = |positive: bool| if positive { PosInf } else { NegInf };
        match (self, other) {
            (Finite(a), Finite(b)) => ExtReal::new(a * b),
            (Finite(v), inf @ (PosInf | NegInf)) | (inf @ (PosInf | NegInf), Finite(v)) => {
                if v == 0.0 {
                    Err(ExtRealError::ZeroTimesInfinity)
                } else {
                    Ok(signed_inf((v > 0.0) == (inf == PosInf)))
                }
            }
            (PosInf, PosInf) | (NegInf, NegInf) => Ok(PosInf),
            (PosInf, NegInf) | (NegInf, PosInf) => Ok(NegInf),
        }
    }
}

impl std::ops::Neg for ExtReal {
    type Output = ExtReal;

    fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::PosInf => ExtReal::NegInf,
            ExtReal::Finite(v) => ExtReal::Finite(-v),
        }
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            // Finite payloads are never NaN, so the partial order is total.
            (Finite(a), Finite(b)) => a.partial_cmp(b).expect("finite ExtReal is never NaN"),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::PosInf => write!(f, "inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = ExtRealError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "+inf" => Ok(ExtReal::PosInf),
            "-inf" => Ok(ExtReal::NegInf),
            _ => match s.parse::<f64>() {
                Ok(v) => ExtReal::new(v),
                Err(_) => Err(ExtRealError::Parse {
                    input: s.to_string(),
                }),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_threshold_magnitudes() {
        assert_eq!(ExtReal::new(1e21).unwrap(), ExtReal::PosInf);
        assert_eq!(ExtReal::new(INF_THRESHOLD).unwrap(), ExtReal::PosInf);
        assert_eq!(ExtReal::new(-1e20).unwrap(), ExtReal::NegInf);
        assert_eq!(ExtReal::new(f64::INFINITY).unwrap(), ExtReal::PosInf);
        assert_eq!(ExtReal::new(f64::NEG_INFINITY).unwrap(), ExtReal::NegInf);
        assert_eq!(ExtReal::new(9.9e19).unwrap(), ExtReal::Finite(9.9e19));
    }

    #[test]
    fn rejects_nan() {
        assert_eq!(ExtReal::new(f64::NAN), Err(ExtRealError::Nan));
    }

    #[test]
    fn addition_rules() {
        let five = ExtReal::new(5.0).unwrap();
        assert_eq!(five.checked_add(ExtReal::PosInf).unwrap(), ExtReal::PosInf);
        assert_eq!(five.checked_add(ExtReal::NegInf).unwrap(), ExtReal::NegInf);
        assert_eq!(
            ExtReal::PosInf.checked_add(ExtReal::NegInf),
            Err(ExtRealError::OppositeInfinities)
        );
        // Finite overflow past the threshold canonicalizes instead of
        // producing an out-of-range finite payload.
        let big = ExtReal::new(9e19).unwrap();
        assert_eq!(big.checked_add(big).unwrap(), ExtReal::PosInf);
    }

    #[test]
    fn multiplication_rules() {
        let minus_two = ExtReal::new(-2.0).unwrap();
        assert_eq!(
            minus_two.checked_mul(ExtReal::PosInf).unwrap(),
            ExtReal::NegInf
        );
        assert_eq!(
            minus_two.checked_mul(ExtReal::NegInf).unwrap(),
            ExtReal::PosInf
        );
        assert_eq!(
            ExtReal::new(0.0).unwrap().checked_mul(ExtReal::PosInf),
            Err(ExtRealError::ZeroTimesInfinity)
        );
        assert_eq!(
            ExtReal::new(1e15)
                .unwrap()
                .checked_mul(ExtReal::new(1e15).unwrap())
                .unwrap(),
            ExtReal::PosInf
        );
    }

    #[test]
    fn ordering_is_total_and_matches_reals() {
        let vals = [
            ExtReal::NegInf,
            ExtReal::new(-3.5).unwrap(),
            ExtReal::new(0.0).unwrap(),
            ExtReal::new(7.0).unwrap(),
            ExtReal::PosInf,
        ];
        for w in vals.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(ExtReal::NegInf.cmp(&ExtReal::NegInf), Ordering::Equal);
    }

    #[test]
    fn display_parse_round_trip() {
        for v in [
            ExtReal::NegInf,
            ExtReal::PosInf,
            ExtReal::new(0.1).unwrap(),
            ExtReal::new(-7.25).unwrap(),
        ] {
            let text = v.to_string();
            assert_eq!(text.parse::<ExtReal>().unwrap(), v);
        }
        assert_eq!("+inf".parse::<ExtReal>().unwrap(), ExtReal::PosInf);
        assert!("nan".parse::<ExtReal>().is_err());
    }
}
