//! Six-level basis, population vectors and the optical-pumping rate model.

mod appendix;
mod generator;
mod numeric;

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

pub use appendix::{seg1_appendix_solution, seg2_appendix_solution};
pub use generator::{propagate, propagator, rate_matrix, steady_state, Matrix6, DEGENERACY_GAP};
pub use numeric::{propagate_numeric, DEFAULT_STEP_US, MAX_STEP_US};

/// Tolerance on population entries and on the total probability.
pub const POPULATION_TOL: f64 = 1e-9;

/// Negative entries above this threshold are float dust and clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

/// One of the six register levels `|m_s, m_I⟩` with `m_s ∈ {0, −1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i8; 2]", into = "[i8; 2]")]
pub struct SpinLevel {
    ms: i8,
    mi: i8,
}

impl SpinLevel {
    /// All levels in canonical order.
    pub const ALL: [SpinLevel; 6] = [
        SpinLevel { ms: 0, mi: -1 },
        SpinLevel { ms: 0, mi: 1 },
        SpinLevel { ms: 0, mi: 0 },
        SpinLevel { ms: -1, mi: -1 },
        SpinLevel { ms: -1, mi: 1 },
        SpinLevel { ms: -1, mi: 0 },
    ];

    /// The target state `|0,0⟩`.
    pub const TARGET: SpinLevel = SpinLevel { ms: 0, mi: 0 };

    pub fn new(ms: i8, mi: i8) -> Result<Self> {
        if !matches!(ms, 0 | -1) {
            return Err(Error::Domain(format!(
                "m_s = {ms} is outside the {{0, -1}} subspace"
            )));
        }
        if !(-1..=1).contains(&mi) {
            return Err(Error::Domain(format!("m_I = {mi} is not in {{-1, 0, +1}}")));
        }
        Ok(SpinLevel { ms, mi })
    }

    pub fn ms(self) -> i8 {
        self.ms
    }

    pub fn mi(self) -> i8 {
        self.mi
    }

    /// Position in the canonical ordering
    /// `(0,−1), (0,+1), (0,0), (−1,−1), (−1,+1), (−1,0)`.
    pub fn index(self) -> usize {
        let nuclear = match self.mi {
            -1 => 0,
            1 => 1,
            _ => 2,
        };
        if self.ms == 0 {
            nuclear
        } else {
            3 + nuclear
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }
}

impl TryFrom<[i8; 2]> for SpinLevel {
    type Error = Error;

    fn try_from([ms, mi]: [i8; 2]) -> Result<Self> {
        SpinLevel::new(ms, mi)
    }
}

impl From<SpinLevel> for [i8; 2] {
    fn from(level: SpinLevel) -> Self {
        [level.ms, level.mi]
    }
}

impl fmt::Display for SpinLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}>", self.ms, self.mi)
    }
}

/// Probabilities of the six levels, indexed in canonical [`SpinLevel`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[f64; 6]")]
pub struct PopulationVector([f64; 6]);

impl PopulationVector {
    /// Validates entries in `[0, 1]` and unit total, both within
    /// [`POPULATION_TOL`].
    pub fn new(p: [f64; 6]) -> Result<Self> {
        for (i, &x) in p.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::Population(format!("entry {i} is not finite")));
            }
            if !(-POPULATION_TOL..=1.0 + POPULATION_TOL).contains(&x) {
                return Err(Error::Population(format!(
                    "entry {i} = {x} is outside [0, 1]"
                )));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > POPULATION_TOL {
            return Err(Error::Population(format!("entries sum to {sum}, not 1")));
        }
        Ok(PopulationVector(p))
    }

    /// Rescales nonnegative weights onto the simplex. Useful for states
    /// quoted with rounded digits.
    pub fn from_unnormalized(w: [f64; 6]) -> Result<Self> {
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Population(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = w.iter().sum();
        if sum <= 0.0 {
            return Err(Error::Population("weights sum to zero".into()));
        }
        Self::new(w.map(|x| x / sum))
    }

    /// Fully mixed state over all six levels.
    pub fn uniform() -> Self {
        PopulationVector([1.0 / 6.0; 6])
    }

    /// `(1,1,1,0,0,0)/3`: electron pumped to `m_s = 0`, nucleus unpolarized.
    pub fn pumped() -> Self {
        let third = 1.0 / 3.0;
        PopulationVector([third, third, third, 0.0, 0.0, 0.0])
    }

    pub fn as_array(&self) -> &[f64; 6] {
        &self.0
    }

    pub fn into_array(self) -> [f64; 6] {
        self.0
    }

    pub fn get(&self, level: SpinLevel) -> f64 {
        self.0[level.index()]
    }

    /// Total population of the `m_s = 0` manifold.
    pub fn total_ms0(&self) -> f64 {
        self.0[..3].iter().sum()
    }

    /// Population of the target `|0,0⟩`.
    pub fn purity(&self) -> f64 {
        self.0[2]
    }

    /// Exchanges the nuclear labels `m_I = −1 ↔ +1` (indices 0↔1, 3↔4).
    /// The rate model is invariant under this relabelling.
    pub fn mirrored(&self) -> Self {
        let p = self.0;
        PopulationVector([p[1], p[0], p[2], p[4], p[3], p[5]])
    }

    /// Builds a vector from a propagation result: entries in
    /// `[−CLAMP_TOL, 0)` become zero, larger negatives are an error.
    pub(crate) fn from_propagated(mut p: [f64; 6]) -> Result<Self> {
        for (i, x) in p.iter_mut().enumerate() {
            if *x < 0.0 {
                if *x < -CLAMP_TOL {
                    return Err(Error::Population(format!(
                        "propagation produced entry {i} = {x:e}"
                    )));
                }
                *x = 0.0;
            }
        }
        Self::new(p)
    }
}

impl Index<usize> for PopulationVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Index<SpinLevel> for PopulationVector {
    type Output = f64;

    fn index(&self, level: SpinLevel) -> &f64 {
        &self.0[level.index()]
    }
}

impl TryFrom<[f64; 6]> for PopulationVector {
    type Error = Error;

    fn try_from(p: [f64; 6]) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PopulationVector> for [f64; 6] {
    fn from(p: PopulationVector) -> Self {
        p.0
    }
}

impl<'de> Deserialize<'de> for PopulationVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = <[f64; 6]>::deserialize(d)?;
        PopulationVector::new(raw).map_err(serde::de::Error::custom)
    }
}

/// Optical pumping rates in µs⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    k_s: f64,
    k_i: f64,
}

impl RateParams {
    /// `k_s` repumps `m_s = −1 → 0`; `k_i` is the hop rate between any two
    /// nuclear sublevels.
    pub fn new(k_s: f64, k_i: f64) -> Result<Self> {
        if !k_s.is_finite() || k_s <= 0.0 {
            return Err(param("k_s", format!("must be finite and > 0, got {k_s}")));
        }
        if !k_i.is_finite() || k_i < 0.0 {
            return Err(param("k_i", format!("must be finite and >= 0, got {k_i}")));
        }
        Ok(RateParams { k_s, k_i })
    }

    /// From the characteristic times `1/k_s` and `1/k_i` in µs. An infinite
    /// nuclear time switches hopping off.
    pub fn from_lifetimes(inv_k_s_us: f64, inv_k_i_us: f64) -> Result<Self> {
        if !(inv_k_s_us > 0.0) {
            return Err(param(
                "inv_k_s_us",
                format!("must be > 0, got {inv_k_s_us}"),
            ));
        }
        if !(inv_k_i_us > 0.0) {
            return Err(param(
                "inv_k_i_us",
                format!("must be > 0, got {inv_k_i_us}"),
            ));
        }
        Self::new(1.0 / inv_k_s_us, 1.0 / inv_k_i_us)
    }

    pub fn k_s(&self) -> f64 {
        self.k_s
    }

    pub fn k_i(&self) -> f64 {
        self.k_i
    }
}

impl Default for RateParams {
    /// `1/k_s = 0.27 µs`, `1/k_i = 4.76 µs`.
    fn default() -> Self {
        RateParams {
            k_s: 1.0 / 0.27,
            k_i: 1.0 / 4.76,
        }
    }
}
