//! Simulation and optimization of a population-trapping initialization
//! protocol for the electron and ¹⁴N nuclear spins of a single NV center.
//!
//! The register is restricted to the six levels `|m_s, m_I⟩` with
//! `m_s ∈ {0, −1}` and `m_I ∈ {−1, 0, +1}`. Laser illumination is modelled
//! as a classical rate process (electron repumping at `k_s`, nuclear
//! hopping at `k_i`), MW and RF π pulses as instantaneous population swaps.
//! On top of that sit a partial-tomography readout model and a recursive
//! optimizer for the laser pulse durations.
//!
//! Units throughout: time in µs, rates in µs⁻¹, frequencies in MHz.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hamiltonian;
pub mod optimizer;
pub mod pulse;
pub mod spin_model;
pub mod tomography;

pub use error::{Error, Result};
pub use hamiltonian::{HamiltonianParams, TransitionKind, TransitionRef, TransitionRow};
pub use optimizer::{CycleResult, LaserOverrides, LaserSearch, Objective, Schedule, Strategy};
pub use pulse::{Pulse, Segment, SegmentLabel, TraceRecord};
pub use spin_model::{Matrix6, PopulationVector, RateParams, SpinLevel};
pub use tomography::{Calibration, Fid, FidParams, SpectralAmplitudes, Spectrum};
