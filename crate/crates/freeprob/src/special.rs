//! Gamma function by Lanczos approximation (g = 7, 9 terms, double
//! precision; relative error around 1e-13 on the positive axis).

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)] // published Lanczos coefficients
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Gamma(x) for real x (poles at 0, -1, -2, ... return NaN).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        if x == x.floor() {
            return f64::NAN;
        }
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let sqrt_pi = PI.sqrt();
        assert!((gamma(0.5) - sqrt_pi).abs() < 1e-13);
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(1.5) - sqrt_pi / 2.0).abs() < 1e-13);
        assert!((gamma(4.0) - 6.0).abs() < 2e-13);
        assert!((gamma(10.0) - 362880.0).abs() / 362880.0 < 1e-12);
        // reflection branch
        assert!((gamma(-0.5) + 2.0 * sqrt_pi).abs() < 1e-12);
        assert!(gamma(-1.0).is_nan());
    }
}
