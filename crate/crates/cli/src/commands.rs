//! The five subcommands. Each returns its data; the `*_csv` and
//! `*_document` functions render it.

use nvinit_core::hamiltonian::{transition_table, TransitionKind};
use nvinit_core::optimizer::Protocol;
use nvinit_core::pulse::{apply_pulse, initial_state, run_sequence};
use nvinit_core::spin_model::propagate;
use nvinit_core::tomography::{
    self, amplitudes, extract_amplitudes, synthesize_fid, NORMALIZATION,
};
use nvinit_core::{
    Calibration, Fid, FidParams, LaserSearch, PopulationVector, Pulse, Schedule, Segment,
    SpectralAmplitudes, Spectrum, TraceRecord,
};
use serde::{Deserialize, Serialize};

use crate::config::{from_toml, Config};
use crate::error::{CliError, Result};
use crate::output::{csv_document, fmt_num, toml_document};

/// Populations entering seg2 in the reference single-cycle run.
pub const REFERENCE_SEG2_INPUT: [f64; 6] = [0.07, 0.33, 0.55, 0.0, 0.0, 0.05];

pub const TRANSITIONS_HEADER: [&str; 5] = [
    "pair",
    "kind",
    "computed_mhz",
    "reference_mhz",
    "deviation_mhz",
];

pub fn cmd_transitions(config: &Config) -> String {
    let rows = transition_table(&config.hamiltonian)
        .into_iter()
        .map(|row| {
            let t = row.transition;
            let kind = match t.kind {
                TransitionKind::Mw => "MW",
                TransitionKind::Rf => "RF",
            };
            vec![
                format!("{} <-> {}", t.pair.0, t.pair.1),
                kind.to_string(),
                fmt_num(row.computed_mhz),
                fmt_num(t.reference_mhz),
                fmt_num(row.deviation_mhz),
            ]
        });
    csv_document(&TRANSITIONS_HEADER, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepSegment {
    Seg1,
    Seg2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub duration_us: f64,
    pub state: PopulationVector,
    pub amplitudes: SpectralAmplitudes,
}

/// Laser-duration sweep of one segment. seg1 starts from the initialized
/// register, seg2 from the reference post-seg1 populations.
pub fn cmd_sweep(
    segment: SweepSegment,
    t_max: f64,
    steps: usize,
    config: &Config,
) -> Result<Vec<SweepRow>> {
    if steps < 2 {
        return Err(CliError::Usage(format!(
            "sweep needs at least 2 steps, got {steps}"
        )));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(CliError::Usage(format!(
            "sweep t_max must be > 0, got {t_max}"
        )));
    }
    let rates = &config.rates;
    let (start, seg) = match segment {
        SweepSegment::Seg1 => (
            initial_state(rates, config.init_laser_us)?,
            Segment::seg1(0.0)?,
        ),
        SweepSegment::Seg2 => (
            PopulationVector::new(REFERENCE_SEG2_INPUT)?,
            Segment::seg2(0.0)?,
        ),
    };
    let mut swapped = start;
    for pulse in seg.swaps() {
        swapped = apply_pulse(&swapped, pulse, rates)?;
    }
    (0..steps)
        .map(|k| {
            let duration_us = if k == steps - 1 {
                t_max
            } else {
                t_max * k as f64 / (steps - 1) as f64
            };
            let state = propagate(&swapped, duration_us, rates)?;
            Ok(SweepRow {
                duration_us,
                state,
                amplitudes: amplitudes(&state),
            })
        })
        .collect()
}

pub const SWEEP_HEADER: [&str; 11] = [
    "duration_us",
    "p0",
    "p1",
    "p2",
    "p3",
    "p4",
    "p5",
    "a_minus1",
    "a_plus1",
    "a_zero",
    "total_ms0",
];

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    csv_document(
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            let mut fields = vec![fmt_num(r.duration_us)];
            fields.extend(r.state.as_array().iter().map(|&x| fmt_num(x)));
            fields.extend(
                [
                    r.amplitudes.a_minus1,
                    r.amplitudes.a_plus1,
                    r.amplitudes.a_zero,
                    r.state.total_ms0(),
                ]
                .map(fmt_num),
            );
            fields
        }),
    )
}

/// Multi-cycle schedule from the initialized register.
pub fn cmd_optimize(config: &Config) -> Result<Schedule> {
    let o = &config.optimizer;
    let protocol = Protocol {
        rates: config.rates,
        objective: o.objective,
        search: LaserSearch::with_t_max(o.t_max_us),
    };
    let start = initial_state(&config.rates, config.init_laser_us)?;
    Ok(protocol.optimize_schedule(&start, o.n_cycles, o.strategy, o.cycle1_overrides)?)
}

pub const SCHEDULE_HEADER: [&str; 5] = [
    "cycle",
    "t1_ns",
    "p00_after_seg1",
    "t2_ns",
    "p00_after_seg2",
];

pub fn schedule_csv(schedule: &Schedule) -> String {
    csv_document(
        &SCHEDULE_HEADER,
        schedule.cycles.iter().map(|c| {
            vec![
                c.cycle.to_string(),
                fmt_num(c.t1_us * 1e3),
                fmt_num(c.purity_after_seg1),
                fmt_num(c.t2_us * 1e3),
                fmt_num(c.purity_after_seg2),
            ]
        }),
    )
}

#[derive(Serialize)]
struct RatesOut {
    k_s_per_us: f64,
    k_i_per_us: f64,
}

#[derive(Serialize)]
struct ScheduleDoc<'a> {
    strategy: nvinit_core::Strategy,
    objective: nvinit_core::Objective,
    final_purity: f64,
    final_state: PopulationVector,
    rates: RatesOut,
    cycle: &'a [nvinit_core::CycleResult],
}

pub fn schedule_document(schedule: &Schedule, config: &Config) -> Result<String> {
    toml_document(&ScheduleDoc {
        strategy: schedule.strategy,
        objective: schedule.objective,
        final_purity: schedule.final_purity,
        final_state: schedule.final_state,
        rates: RatesOut {
            k_s_per_us: config.rates.k_s(),
            k_i_per_us: config.rates.k_i(),
        },
        cycle: &schedule.cycles,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub state: PopulationVector,
    pub fid: Fid,
    pub spectrum: Spectrum,
    pub direct: SpectralAmplitudes,
    pub extracted: SpectralAmplitudes,
}

/// Synthesizes the readout of `state`, transforms it and reads the line
/// amplitudes back against an embedded calibration run.
pub fn cmd_spectrum(state: &PopulationVector, config: &Config) -> Result<SpectrumReport> {
    let fp = &config.fid;
    let direct = amplitudes(state);
    let fid = synthesize_fid(&direct, fp)?;
    let spectrum = tomography::spectrum(&fid, fp);
    let calibration = Calibration::measure(fp)?;
    let extracted = extract_amplitudes(&spectrum, fp, &calibration)?;
    Ok(SpectrumReport {
        state: *state,
        fid,
        spectrum,
        direct,
        extracted,
    })
}

pub fn fid_csv(fid: &Fid) -> String {
    csv_document(
        &["tau_us", "re", "im"],
        fid.samples
            .iter()
            .enumerate()
            .map(|(k, z)| vec![fmt_num(fid.tau(k)), fmt_num(z.re), fmt_num(z.im)]),
    )
}

pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    csv_document(
        &["freq_mhz", "magnitude"],
        spectrum
            .values
            .iter()
            .enumerate()
            .map(|(j, z)| vec![fmt_num(spectrum.frequency(j)), fmt_num(z.norm())]),
    )
}

#[derive(Serialize)]
struct SpectrumDoc<'a> {
    normalization: &'static str,
    state: PopulationVector,
    fid: &'a FidParams,
    direct: SpectralAmplitudes,
    extracted: SpectralAmplitudes,
}

pub fn spectrum_document(report: &SpectrumReport, config: &Config) -> Result<String> {
    toml_document(&SpectrumDoc {
        normalization: NORMALIZATION,
        state: report.state,
        fid: &config.fid,
        direct: report.direct,
        extracted: report.extracted,
    })
}

/// Pulse sequence document for `simulate`.
///
/// ```toml
/// initial_state = [0.3333333333333333, 0.3333333333333333, 0.3333333333333334, 0, 0, 0]  # optional
///
/// [[pulse]]
/// kind = "mw_pi"
/// pair = [[0, -1], [-1, -1]]
/// fidelity = 1.0            # optional
///
/// [[pulse]]
/// kind = "laser"
/// duration_us = 0.5
/// ```
///
/// Without `initial_state` the run starts from the register after the
/// initialization laser pulse.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDoc {
    pub initial_state: Option<PopulationVector>,
    #[serde(default)]
    pub pulse: Vec<Pulse>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub initial_state: PopulationVector,
    pub final_state: PopulationVector,
    pub trace: Vec<TraceRecord>,
}

pub fn cmd_simulate(sequence: &str, config: &Config) -> Result<SimulationReport> {
    let doc: SequenceDoc = from_toml(sequence)?;
    for (i, pulse) in doc.pulse.iter().enumerate() {
        pulse
            .validate()
            .map_err(|e| CliError::at(format!("pulse[{i}]"), e))?;
    }
    let initial_state = match doc.initial_state {
        Some(p) => p,
        None => initial_state(&config.rates, config.init_laser_us)?,
    };
    let (final_state, trace) = run_sequence(&initial_state, &doc.pulse, &config.rates)?;
    Ok(SimulationReport {
        initial_state,
        final_state,
        trace,
    })
}

pub fn simulation_document(report: &SimulationReport) -> Result<String> {
    toml_document(report)
}
