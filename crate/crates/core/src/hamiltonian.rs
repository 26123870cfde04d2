//! Static spin Hamiltonian of the register with the field along the NV axis:
//!
//! ```text
//! H = D S_z² − γ_e B S_z + Q I_z² − γ_n B I_z + A S_z I_z
//! ```
//!
//! Everything is diagonal in `|m_s, m_I⟩`, so level energies are direct
//! substitutions. The measured reference frequencies are carried alongside
//! and the deviation of the computed values is always reported.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::spin_model::SpinLevel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    /// Zero-field splitting `D`, MHz.
    pub d_zfs: f64,
    /// Electron gyromagnetic ratio, MHz/mT.
    pub gamma_e: f64,
    /// ¹⁴N gyromagnetic ratio, MHz/mT.
    pub gamma_n: f64,
    /// Nuclear quadrupole coupling, MHz.
    pub quadrupole: f64,
    /// Hyperfine coupling `A`, MHz.
    pub hyperfine: f64,
    /// Axial field, mT.
    pub b_field: f64,
}

impl Default for HamiltonianParams {
    fn default() -> Self {
        HamiltonianParams {
            d_zfs: 2870.0,
            gamma_e: -28.0,
            gamma_n: -3.1e-3,
            quadrupole: 4.5,
            hyperfine: -2.16,
            b_field: 6.1,
        }
    }
}

impl HamiltonianParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.d_zfs,
            self.gamma_e,
            self.gamma_n,
            self.quadrupole,
            self.hyperfine,
            self.b_field,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(param("hamiltonian", "all constants must be finite"));
        }
        if self.d_zfs <= 0.0 {
            return Err(param("d_zfs", format!("must be > 0, got {}", self.d_zfs)));
        }
        if self.b_field < 0.0 {
            return Err(param(
                "b_field",
                format!("must be >= 0, got {}", self.b_field),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionKind {
    /// Electron spin flip at fixed `m_I`.
    Mw,
    /// Nuclear spin flip at fixed `m_s`.
    Rf,
}

/// A driven transition with its measured frequency and Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRef {
    pub pair: (SpinLevel, SpinLevel),
    pub reference_mhz: f64,
    pub rabi_mhz: f64,
    pub kind: TransitionKind,
}

const fn level(ms: i8, mi: i8) -> SpinLevel {
    SpinLevel::ALL[match (ms, mi) {
        (0, -1) => 0,
        (0, 1) => 1,
        (0, _) => 2,
        (_, -1) => 3,
        (_, 1) => 4,
        _ => 5,
    }]
}

/// The four transitions addressed by the initialization sequence.
pub const REFERENCE_TRANSITIONS: [TransitionRef; 4] = [
    TransitionRef {
        pair: (level(0, -1), level(-1, -1)),
        reference_mhz: 2696.0,
        rabi_mhz: 8.3,
        kind: TransitionKind::Mw,
    },
    TransitionRef {
        pair: (level(0, 1), level(-1, 1)),
        reference_mhz: 2694.0,
        rabi_mhz: 8.3,
        kind: TransitionKind::Mw,
    },
    TransitionRef {
        pair: (level(-1, -1), level(-1, 0)),
        reference_mhz: 2.801,
        rabi_mhz: 3.87e-3,
        kind: TransitionKind::Rf,
    },
    TransitionRef {
        pair: (level(-1, 1), level(-1, 0)),
        reference_mhz: 7.095,
        rabi_mhz: 3.55e-3,
        kind: TransitionKind::Rf,
    },
];

impl TransitionRef {
    /// Looks up the reference entry for a pair, in either orientation.
    pub fn lookup(a: SpinLevel, b: SpinLevel) -> Option<&'static TransitionRef> {
        REFERENCE_TRANSITIONS
            .iter()
            .find(|t| t.pair == (a, b) || t.pair == (b, a))
    }
}

/// Level energy in MHz.
pub fn energy(level: SpinLevel, params: &HamiltonianParams) -> f64 {
    let ms = f64::from(level.ms());
    let mi = f64::from(level.mi());
    let b = params.b_field;
    params.d_zfs * ms * ms - params.gamma_e * b * ms + params.quadrupole * mi * mi
        - params.gamma_n * b * mi
        + params.hyperfine * ms * mi
}

pub fn transition_frequency(a: SpinLevel, b: SpinLevel, params: &HamiltonianParams) -> Result<f64> {
    if a == b {
        return Err(Error::Domain(format!("transition from {a} to itself")));
    }
    Ok((energy(a, params) - energy(b, params)).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRow {
    pub transition: TransitionRef,
    pub computed_mhz: f64,
    /// `computed − reference`.
    pub deviation_mhz: f64,
}

pub fn transition_table(params: &HamiltonianParams) -> Vec<TransitionRow> {
    REFERENCE_TRANSITIONS
        .iter()
        .map(|t| {
            let computed = (energy(t.pair.0, params) - energy(t.pair.1, params)).abs();
            TransitionRow {
                transition: *t,
                computed_mhz: computed,
                deviation_mhz: computed - t.reference_mhz,
            }
        })
        .collect()
}
