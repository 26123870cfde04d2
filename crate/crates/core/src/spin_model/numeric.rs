use super::generator::{check_duration, rate_matrix};
use super::{PopulationVector, RateParams};
use crate::error::{param, Result};

pub const DEFAULT_STEP_US: f64 = 1e-3;
pub const MAX_STEP_US: f64 = 1e-2;

/// Fixed-step classic RK4 integration of `dP/dt = M P`.
///
/// The step is shrunk so that an integer number of steps lands exactly on
/// `t`. Independent of the closed-form propagator and valid for every rate
/// combination, including `k_s = 3k_i`.
pub fn propagate_numeric(
    p: &PopulationVector,
    t: f64,
    rates: &RateParams,
    step: f64,
) -> Result<PopulationVector> {
    if !(step > 0.0 && step <= MAX_STEP_US) {
        return Err(param(
            "step",
            format!("must lie in (0, {MAX_STEP_US}] µs, got {step}"),
        ));
    }
    check_duration(t)?;
    if t == 0.0 {
        return Ok(*p);
    }

    let m = rate_matrix(rates);
    let n = (t / step).ceil() as usize;
    let h = t / n as f64;
    let axpy = |y: &[f64; 6], k: &[f64; 6], a: f64| -> [f64; 6] {
        std::array::from_fn(|i| y[i] + a * k[i])
    };

    let mut y = *p.as_array();
    for _ in 0..n {
        let k1 = m.apply(&y);
        let k2 = m.apply(&axpy(&y, &k1, h / 2.0));
        let k3 = m.apply(&axpy(&y, &k2, h / 2.0));
        let k4 = m.apply(&axpy(&y, &k3, h));
        for i in 0..6 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    PopulationVector::from_propagated(y)
}
