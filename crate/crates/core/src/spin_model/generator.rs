use std::ops::Mul;

use nalgebra::{Matrix3, Matrix6 as NMatrix6};

use super::numeric::{propagate_numeric, DEFAULT_STEP_US};
use super::{PopulationVector, RateParams};
use crate::error::{Error, Result};

/// Below this value of `|3k_i − k_s|` (µs⁻¹) the closed-form propagator is
/// replaced by numeric integration.
pub const DEGENERACY_GAP: f64 = 1e-6;

/// A 6×6 real matrix acting on population vectors; entry `(i, j)` is the
/// flow into level `i` from level `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix6(NMatrix6<f64>);

impl Matrix6 {
    pub fn identity() -> Self {
        Matrix6(NMatrix6::identity())
    }

    pub fn from_nalgebra(m: NMatrix6<f64>) -> Self {
        Matrix6(m)
    }

    pub fn as_nalgebra(&self) -> &NMatrix6<f64> {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn column_sums(&self) -> [f64; 6] {
        std::array::from_fn(|j| self.0.column(j).sum())
    }

    pub fn apply(&self, p: &[f64; 6]) -> [f64; 6] {
        std::array::from_fn(|i| (0..6).map(|j| self.0[(i, j)] * p[j]).sum())
    }

    fn from_blocks(ul: Matrix3<f64>, ur: Matrix3<f64>, lr: Matrix3<f64>) -> Self {
        let mut m = NMatrix6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&ul);
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&ur);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&lr);
        Matrix6(m)
    }
}

impl Mul for Matrix6 {
    type Output = Matrix6;

    fn mul(self, rhs: Matrix6) -> Matrix6 {
        Matrix6(self.0 * rhs.0)
    }
}

/// The generator `M(k_s, k_i)` of `dP/dt = M P`.
///
/// Nuclear hopping mixes each manifold's three sublevels at `k_i` per pair;
/// only the `m_s = 0` block hops because the `m_s = −1` block is emptied at
/// `k_s` into the `m_s = 0` level with the same `m_I`.
pub fn rate_matrix(rates: &RateParams) -> Matrix6 {
    let (k_s, k_i) = (rates.k_s(), rates.k_i());
    let hop = (Matrix3::repeat(1.0) - Matrix3::identity() * 3.0) * k_i;
    Matrix6::from_blocks(hop, Matrix3::identity() * k_s, Matrix3::identity() * -k_s)
}

/// Solution operator `exp(M t)`.
///
/// The generator's spectrum is `{0, −3k_i, −3k_i, −k_s, −k_s, −k_s}`. With
/// `Π = J/3` the projector onto the nuclear-uniform direction and
/// `Q = I − Π`,
///
/// ```text
/// exp(M t) = | Π + e^{−3k_i t} Q    (1 − e^{−k_s t}) Π + k_s g(t) Q |
///            | 0                    e^{−k_s t} I                    |
/// g(t) = (e^{−k_s t} − e^{−3k_i t}) / (3k_i − k_s)
/// ```
///
/// `g` is a removable singularity at `3k_i = k_s`; inside
/// [`DEGENERACY_GAP`] the matrix is built by numeric integration instead.
pub fn propagator(t: f64, rates: &RateParams) -> Result<Matrix6> {
    check_duration(t)?;
    if t == 0.0 {
        return Ok(Matrix6::identity());
    }
    let (k_s, k_i) = (rates.k_s(), rates.k_i());
    let gap = 3.0 * k_i - k_s;
    if gap.abs() < DEGENERACY_GAP {
        return numeric_propagator(t, rates);
    }

    let decay_s = (-k_s * t).exp();
    let decay_i = (-3.0 * k_i * t).exp();
    // g(t) = e^{−k_s t} (1 − e^{−gap t}) / gap, written to avoid cancellation.
    let g = decay_s * -(-gap * t).exp_m1() / gap;

    let uniform = Matrix3::repeat(1.0 / 3.0);
    let traceless = Matrix3::identity() - uniform;
    let ul = uniform + traceless * decay_i;
    let ur = uniform * (1.0 - decay_s) + traceless * (k_s * g);
    let lr = Matrix3::identity() * decay_s;
    Ok(Matrix6::from_blocks(ul, ur, lr))
}

fn numeric_propagator(t: f64, rates: &RateParams) -> Result<Matrix6> {
    let mut m = NMatrix6::zeros();
    for j in 0..6 {
        let mut e = [0.0; 6];
        e[j] = 1.0;
        let col = propagate_numeric(&PopulationVector(e), t, rates, DEFAULT_STEP_US)?;
        for i in 0..6 {
            m[(i, j)] = col[i];
        }
    }
    Ok(Matrix6(m))
}

/// Populations after a laser pulse of duration `t`.
pub fn propagate(p: &PopulationVector, t: f64, rates: &RateParams) -> Result<PopulationVector> {
    check_duration(t)?;
    if t == 0.0 {
        return Ok(*p);
    }
    if (3.0 * rates.k_i() - rates.k_s()).abs() < DEGENERACY_GAP {
        return propagate_numeric(p, t, rates, DEFAULT_STEP_US);
    }
    let u = propagator(t, rates)?;
    PopulationVector::from_propagated(u.apply(p.as_array()))
}

/// Unique stationary state `(1,1,1,0,0,0)/3` of the pumping dynamics.
pub fn steady_state(rates: &RateParams) -> Result<PopulationVector> {
    if rates.k_i() == 0.0 {
        return Err(Error::NonUniqueSteadyState);
    }
    Ok(PopulationVector::pumped())
}

pub(super) fn check_duration(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!(
            "duration must be finite and >= 0, got {t}"
        )));
    }
    Ok(())
}
