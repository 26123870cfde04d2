//! MW/RF π pulses, laser pulses and the two trapping segments.
//!
//! π pulses are instantaneous population exchanges between the two levels
//! of one reference transition. The only continuous dynamics is optical
//! pumping during laser pulses.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::hamiltonian::{TransitionKind, TransitionRef};
use crate::spin_model::{propagate, PopulationVector, RateParams, SpinLevel};

/// Duration of the pumping pulse that prepares the register, µs.
pub const INIT_LASER_US: f64 = 5.0;

fn perfect() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Pulse {
    MwPi {
        pair: (SpinLevel, SpinLevel),
        #[serde(default = "perfect")]
        fidelity: f64,
    },
    RfPi {
        pair: (SpinLevel, SpinLevel),
        #[serde(default = "perfect")]
        fidelity: f64,
    },
    Laser {
        duration_us: f64,
    },
}

impl Pulse {
    pub fn mw(a: SpinLevel, b: SpinLevel) -> Result<Self> {
        let p = Pulse::MwPi {
            pair: (a, b),
            fidelity: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn rf(a: SpinLevel, b: SpinLevel) -> Result<Self> {
        let p = Pulse::RfPi {
            pair: (a, b),
            fidelity: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn laser(duration_us: f64) -> Result<Self> {
        let p = Pulse::Laser { duration_us };
        p.validate()?;
        Ok(p)
    }

    /// Same pulse with a partial swap fidelity (MW/RF only).
    pub fn with_fidelity(self, f: f64) -> Result<Self> {
        let p = match self {
            Pulse::MwPi { pair, .. } => Pulse::MwPi { pair, fidelity: f },
            Pulse::RfPi { pair, .. } => Pulse::RfPi { pair, fidelity: f },
            Pulse::Laser { .. } => {
                return Err(param("fidelity", "laser pulses have no swap fidelity"))
            }
        };
        p.validate()?;
        Ok(p)
    }

    /// MW pairs must be one of the two reference electron transitions, RF
    /// pairs one of the two nuclear ones (either orientation).
    pub fn validate(&self) -> Result<()> {
        match *self {
            Pulse::MwPi { pair, fidelity } => check_swap(pair, fidelity, TransitionKind::Mw),
            Pulse::RfPi { pair, fidelity } => check_swap(pair, fidelity, TransitionKind::Rf),
            Pulse::Laser { duration_us } => {
                if duration_us.is_finite() && duration_us >= 0.0 {
                    Ok(())
                } else {
                    Err(param(
                        "duration_us",
                        format!("must be finite and >= 0, got {duration_us}"),
                    ))
                }
            }
        }
    }
}

fn check_swap(pair: (SpinLevel, SpinLevel), fidelity: f64, kind: TransitionKind) -> Result<()> {
    match TransitionRef::lookup(pair.0, pair.1) {
        Some(t) if t.kind == kind => {}
        _ => return Err(Error::InvalidPair(pair.0, pair.1)),
    }
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(param(
            "fidelity",
            format!("must lie in [0, 1], got {fidelity}"),
        ));
    }
    Ok(())
}

impl fmt::Display for Pulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pulse::MwPi { pair, fidelity } => write!(f, "MW pi {} <-> {}", pair.0, pair.1)
                .and_then(|_| fidelity_suffix(f, *fidelity)),
            Pulse::RfPi { pair, fidelity } => write!(f, "RF pi {} <-> {}", pair.0, pair.1)
                .and_then(|_| fidelity_suffix(f, *fidelity)),
            Pulse::Laser { duration_us } => write!(f, "laser {duration_us} us"),
        }
    }
}

fn fidelity_suffix(f: &mut fmt::Formatter<'_>, fidelity: f64) -> fmt::Result {
    if fidelity < 1.0 {
        write!(f, " (fidelity {fidelity})")
    } else {
        Ok(())
    }
}

pub fn apply_pulse(
    p: &PopulationVector,
    pulse: &Pulse,
    rates: &RateParams,
) -> Result<PopulationVector> {
    pulse.validate()?;
    match *pulse {
        Pulse::MwPi { pair, fidelity } | Pulse::RfPi { pair, fidelity } => {
            let (a, b) = (pair.0.index(), pair.1.index());
            let mut q = p.into_array();
            let (pa, pb) = (q[a], q[b]);
            q[a] = (1.0 - fidelity) * pa + fidelity * pb;
            q[b] = (1.0 - fidelity) * pb + fidelity * pa;
            PopulationVector::new(q)
        }
        Pulse::Laser { duration_us } => propagate(p, duration_us, rates),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentLabel {
    Seg1,
    Seg2,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub label: SegmentLabel,
    pub pulses: Vec<Pulse>,
}

impl Segment {
    /// Traps `m_I = −1`: `|0,−1⟩ ↔ |−1,−1⟩`, `|−1,−1⟩ ↔ |−1,0⟩`, laser.
    pub fn seg1(laser_us: f64) -> Result<Self> {
        let [a, _, _, b, _, c] = SpinLevel::ALL;
        Ok(Segment {
            label: SegmentLabel::Seg1,
            pulses: vec![Pulse::mw(a, b)?, Pulse::rf(b, c)?, Pulse::laser(laser_us)?],
        })
    }

    /// Traps `m_I = +1`: `|0,+1⟩ ↔ |−1,+1⟩`, `|−1,+1⟩ ↔ |−1,0⟩`, laser.
    pub fn seg2(laser_us: f64) -> Result<Self> {
        let [_, a, _, _, b, c] = SpinLevel::ALL;
        Ok(Segment {
            label: SegmentLabel::Seg2,
            pulses: vec![Pulse::mw(a, b)?, Pulse::rf(b, c)?, Pulse::laser(laser_us)?],
        })
    }

    pub fn custom(pulses: Vec<Pulse>) -> Self {
        Segment {
            label: SegmentLabel::Custom,
            pulses,
        }
    }

    /// The swap pulses only, without the closing laser pulse.
    pub fn swaps(&self) -> impl Iterator<Item = &Pulse> {
        self.pulses
            .iter()
            .filter(|p| !matches!(p, Pulse::Laser { .. }))
    }
}

/// State after one pulse of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub index: usize,
    pub pulse: String,
    pub state: PopulationVector,
}

pub fn run_sequence(
    p: &PopulationVector,
    pulses: &[Pulse],
    rates: &RateParams,
) -> Result<(PopulationVector, Vec<TraceRecord>)> {
    let mut state = *p;
    let mut trace = Vec::with_capacity(pulses.len());
    for (index, pulse) in pulses.iter().enumerate() {
        state = apply_pulse(&state, pulse, rates)?;
        trace.push(TraceRecord {
            index,
            pulse: pulse.to_string(),
            state,
        });
    }
    Ok((state, trace))
}

pub fn run_segment(
    p: &PopulationVector,
    seg: &Segment,
    rates: &RateParams,
) -> Result<(PopulationVector, Vec<TraceRecord>)> {
    run_sequence(p, &seg.pulses, rates)
}

/// Register state after pumping the fully mixed six-level state for
/// `init_laser` µs.
pub fn initial_state(rates: &RateParams, init_laser: f64) -> Result<PopulationVector> {
    if !(init_laser > 0.0) {
        return Err(param(
            "init_laser",
            format!("must be > 0, got {init_laser}"),
        ));
    }
    propagate(&PopulationVector::uniform(), init_laser, rates)
}
