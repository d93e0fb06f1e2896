//! Exact rational scalars used by the moment/cumulant engines.
//!
//! Hankel-minor decisions mix magnitudes like n! and are hopeless in floating
//! point, so everything that feeds a positivity verdict stays in `BigRational`
//! until a transform actually has to be evaluated.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat_i64(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact conversion: every finite f64 is a dyadic rational.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    BigRational::from_float(x)
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division when numerator/denominator overflow f64.
        let n = r.numer();
        let d = r.denom();
        let shift = (n.bits() as i64 - d.bits() as i64).max(0) as u64;
        let nf = (n >> shift).to_f64().unwrap_or(f64::MAX * n.signum().to_f64().unwrap_or(1.0));
        let df = d.to_f64().unwrap_or(f64::MAX);
        nf / df * 2f64.powi(shift as i32)
    })
}

pub fn rat_zero() -> Rat {
    BigRational::zero()
}

pub fn rat_one() -> Rat {
    BigRational::one()
}

/// Renders `p/q` (or just `p` for integers), the form used in JSON reports.
pub fn rat_display(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses either `p/q` or a plain integer.
pub fn rat_parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}
