//! Limit laws of the normalized record counts under a functional unit root.
//!
//! `G1` is the limit of `N^u_n / sqrt(n)` and `G2` the limit of
//! `N_n / sqrt(n)`:
//!
//! ```text
//! g1(x) = exp(-x^2 / 4) / sqrt(pi)               F1(x) = erf(x / 2)
//! g2(x) = sqrt(2 / pi) x^2 exp(-x^2 / 2)         F2(x) = erf(x / sqrt 2) - sqrt(2 / pi) x exp(-x^2 / 2)
//! ```
//!
//! for `x >= 0`, and zero otherwise.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

use crate::error::{FrecError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitLaw {
    G1,
    G2,
}

pub fn pdf(law: LimitLaw, x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        return 0.0;
    }
    match law {
        LimitLaw::G1 => 0.5 * FRAC_2_SQRT_PI * (-0.25 * x * x).exp(),
        LimitLaw::G2 => (2.0 / PI).sqrt() * x * x * (-0.5 * x * x).exp(),
    }
}

pub fn cdf(law: LimitLaw, x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    let v = match law {
        LimitLaw::G1 => libm::erf(0.5 * x),
        LimitLaw::G2 => libm::erf(x / SQRT_2) - (2.0 / PI).sqrt() * x * (-0.5 * x * x).exp(),
    };
    v.clamp(0.0, 1.0)
}

/// Upper end of the bisection bracket; `cdf(G2, 10)` is 1 to machine precision
/// and `cdf(G1, 10)` is within 2e-12 of it.
const BRACKET_HI: f64 = 10.0;

/// The `alpha`-quantile, by bisection on `[0, 10]`.
pub fn quantile(law: LimitLaw, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FrecError::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, BRACKET_HI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = cdf(law, mid);
        if (f - alpha).abs() <= 1e-12 {
            return Ok(mid);
        }
        if f < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson quadrature, independent of the closed-form CDFs.
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn step(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let diff = left + right - whole;
            if depth == 0 || diff.abs() <= 15.0 * tol {
                return left + right + diff / 15.0;
            }
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
        let fa = f(a);
        let fb = f(b);
        let fm = f(0.5 * (a + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        step(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    const LAWS: [LimitLaw; 2] = [LimitLaw::G1, LimitLaw::G2];

    #[test]
    fn pdf_values() {
        assert!((pdf(LimitLaw::G1, 0.0) - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert_eq!(pdf(LimitLaw::G2, 0.0), 0.0);
        assert_eq!(pdf(LimitLaw::G1, -1.0), 0.0);
        assert_eq!(pdf(LimitLaw::G2, -0.5), 0.0);
    }

    #[test]
    fn pdfs_integrate_to_one() {
        for law in LAWS {
            // Unit panels so the coarse first pass sees the mass; tails beyond 40 are below 1e-300.
            let total: f64 = (0..40)
                .map(|k| simpson(&|x| pdf(law, x), k as f64, k as f64 + 1.0, 1e-14))
                .sum();
            assert!((total - 1.0).abs() < 1e-10, "{law:?}: {total}");
        }
    }

    #[test]
    fn cdf_matches_quadrature() {
        for law in LAWS {
            for k in 0..1000 {
                let x = 6.0 * k as f64 / 999.0;
                let q = simpson(&|t| pdf(law, t), 0.0, x, 1e-14);
                assert!((cdf(law, x) - q).abs() < 1e-9, "{law:?} at {x}");
            }
        }
    }

    #[test]
    fn cdf_limits() {
        assert_eq!(cdf(LimitLaw::G2, 0.0), 0.0);
        assert_eq!(cdf(LimitLaw::G1, -3.0), 0.0);
        for law in LAWS {
            assert_eq!(cdf(law, f64::INFINITY), 1.0);
        }
        assert!((cdf(LimitLaw::G2, BRACKET_HI) - 1.0).abs() < 1e-15);
        // erf(5) = 1 - 1.5e-12.
        assert!((cdf(LimitLaw::G1, BRACKET_HI) - 1.0).abs() < 2e-12);
        assert!((cdf(LimitLaw::G2, 0.59) - 0.05).abs() < 0.005);
    }

    #[test]
    fn reported_quantiles() {
        let q05 = quantile(LimitLaw::G2, 0.05).unwrap();
        let q01 = quantile(LimitLaw::G2, 0.01).unwrap();
        assert_eq!(format!("{q05:.2}"), "0.59");
        assert_eq!(format!("{q01:.2}"), "0.34");
    }

    #[test]
    fn quantile_round_trip() {
        for law in LAWS {
            for alpha in [0.001, 0.05, 0.5, 0.99] {
                let q = quantile(law, alpha).unwrap();
                assert!((cdf(law, q) - alpha).abs() < 1e-9);
            }
            let mut prev = 0.0;
            for k in 1..1000 {
                let alpha = k as f64 / 1000.0;
                let q = quantile(law, alpha).unwrap();
                assert!((cdf(law, q) - alpha).abs() <= 1e-10);
                assert!(q > prev);
                prev = q;
            }
        }
    }

    #[test]
    fn quantile_rejects_bad_alpha() {
        for a in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(quantile(LimitLaw::G2, a).is_err());
        }
    }

    #[test]
    fn cdf_monotone() {
        for law in LAWS {
            let mut prev = 0.0;
            for k in 0..=2000 {
                let v = cdf(law, k as f64 * 0.005);
                assert!(v >= prev);
                prev = v;
            }
        }
    }
}
