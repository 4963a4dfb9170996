use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Flux per plaquette in cycles. Rational values are kept exact so that
/// `n·φ mod 1` carries no rounding for any integer `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Flux {
    Rational(Ratio<i64>),
    Real(f64),
}

impl Flux {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("flux denominator is zero".into()));
        }
        Ok(Flux::Rational(Ratio::new(p, q)))
    }

    pub fn zero() -> Self {
        Flux::Rational(Ratio::from_integer(0))
    }

    /// Reduced (p, q) with q > 0, if rational.
    pub fn pq(&self) -> Option<(i64, i64)> {
        match self {
            Flux::Rational(r) => Some((*r.numer(), *r.denom())),
            Flux::Real(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Flux::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Flux::Real(x) => *x,
        }
    }

    /// Fractional part of `n·φ` in [0, 1).
    pub fn frac_times<T: Real>(&self, n: i64) -> T {
        match self {
            Flux::Rational(r) => {
                let (p, q) = (*r.numer() as i128, *r.denom() as i128);
                let m = (n as i128 * p).rem_euclid(q);
                T::lit(m as f64) / T::lit(q as f64)
            }
            Flux::Real(x) => {
                let v = n as f64 * x;
                T::lit(v - v.floor())
            }
        }
    }
}

impl From<Ratio<i64>> for Flux {
    fn from(r: Ratio<i64>) -> Self {
        Flux::Rational(r)
    }
}

impl fmt::Display for Flux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flux::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Flux::Real(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Flux {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad flux '{s}'")))?;
            let q: i64 = q.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad flux '{s}'")))?;
            Flux::new(p, q)
        } else if let Ok(n) = s.parse::<i64>() {
            Flux::new(n, 1)
        } else {
            s.parse::<f64>()
                .map(Flux::Real)
                .map_err(|_| Error::InvalidParameter(format!("bad flux '{s}'")))
        }
    }
}

/// All reduced fractions p/q in [0, 1] with q ≤ `max_q`, ascending.
pub fn farey(max_q: i64) -> Vec<Flux> {
    let mut v: Vec<Ratio<i64>> = Vec::new();
    for q in 1..=max_q {
        for p in 0..=q {
            let r = Ratio::new(p, q);
            if *r.denom() == q {
                v.push(r);
            }
        }
    }
    v.sort();
    v.dedup();
    v.into_iter().map(Flux::Rational).collect()
}
