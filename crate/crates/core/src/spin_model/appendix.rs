//! Historical closed forms for the two laser pulses of the protocol, kept
//! for cross-checking the propagator. They are evaluated exactly as
//! originally written, transcription slips included, so the results are raw arrays
//! rather than validated population vectors:
//!
//! * the seg1 expression has its first two components transposed; it starts
//!   at `(1,0,1,0,0,1)/3` instead of `(0,1,1,0,0,1)/3`;
//! * the seg2 expression for the second component does not satisfy its own
//!   initial condition (≈0.61 at `t = 0` instead of 0);
//! * the seg2 coefficients carry two decimals, and the original asymptote
//!   0.34 is replaced by the exact 1/3.

use super::generator::{check_duration, DEGENERACY_GAP};
use super::RateParams;
use crate::error::{Error, Result};

struct Exponentials {
    k_s: f64,
    k_i: f64,
    gap: f64,
    decay_s: f64,
    decay_i: f64,
}

fn exponentials(t: f64, rates: &RateParams) -> Result<Exponentials> {
    check_duration(t)?;
    let (k_s, k_i) = (rates.k_s(), rates.k_i());
    let gap = 3.0 * k_i - k_s;
    if gap.abs() <= DEGENERACY_GAP {
        return Err(Error::Domain(format!(
            "closed form is singular for 3k_i - k_s = {gap:e}"
        )));
    }
    Ok(Exponentials {
        k_s,
        k_i,
        gap,
        decay_s: (-k_s * t).exp(),
        decay_i: (-3.0 * k_i * t).exp(),
    })
}

/// Historical seg1 laser-pulse solution (start `(0,1,1,0,0,1)/3`).
pub fn seg1_appendix_solution(t: f64, rates: &RateParams) -> Result<[f64; 6]> {
    let Exponentials {
        k_s,
        k_i,
        gap,
        decay_s: es,
        decay_i: ei,
    } = exponentials(t, rates)?;
    let third = 1.0 / 3.0;
    Ok([
        third * (1.0 - k_i * (es - ei) / gap),
        third * (1.0 - ((2.0 * k_i - k_s) * ei + k_i * es) / gap),
        third * (1.0 - ((k_i - k_s) * es + (k_s - k_i) * ei) / gap),
        0.0,
        0.0,
        third * es,
    ])
}

/// Historical seg2 laser-pulse solution (start `(0.07,0,0.55,0,0.05,0.33)`).
pub fn seg2_appendix_solution(t: f64, rates: &RateParams) -> Result<[f64; 6]> {
    let Exponentials {
        k_s,
        k_i,
        gap,
        decay_s: es,
        decay_i: ei,
    } = exponentials(t, rates)?;
    let third = 1.0 / 3.0;
    Ok([
        third + (ei * (0.26 * k_s - 0.4 * k_i) - 0.38 * k_i * es) / gap,
        third - (es * (0.38 * k_i - 0.05 * k_s) - ei * (0.63 * k_i - 0.29 * k_s)) / gap,
        third + (ei * (1.03 * k_i - 0.55 * k_s) - es * (0.38 * k_i - 0.33 * k_s)) / gap,
        0.0,
        0.05 * es,
        0.33 * es,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn seg1_historical_initial_value_is_transposed() {
        let p = seg1_appendix_solution(0.0, &RateParams::default()).unwrap();
        let third = 1.0 / 3.0;
        let want = [third, 0.0, third, 0.0, 0.0, third];
        for i in 0..6 {
            assert_abs_diff_eq!(p[i], want[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn seg1_long_time_limit() {
        let p = seg1_appendix_solution(200.0, &RateParams::default()).unwrap();
        for x in &p[..3] {
            assert_abs_diff_eq!(*x, 1.0 / 3.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(p[5], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn seg2_historical_values() {
        let r = RateParams::default();
        let at_zero = seg2_appendix_solution(0.0, &r).unwrap();
        assert!((at_zero[2] - 0.55).abs() < 0.015);
        assert!((at_zero[1] - 0.0).abs() > 0.5);
        let mid = seg2_appendix_solution(0.46, &r).unwrap();
        assert_abs_diff_eq!(mid[0], 0.124, epsilon = 5e-4);
        assert_abs_diff_eq!(mid[5], 0.33 * (-0.46 * r.k_s()).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(mid[5], 0.0601, epsilon = 5e-5);
    }

    #[test]
    fn singular_rates_are_rejected() {
        let r = RateParams::new(0.9, 0.3).unwrap();
        assert!(seg1_appendix_solution(1.0, &r).is_err());
        assert!(seg2_appendix_solution(1.0, &r).is_err());
        assert!(seg1_appendix_solution(-1.0, &RateParams::default()).is_err());
    }
}
