//! Partial state tomography through a Ramsey free induction decay.
//!
//! Each nuclear sublevel contributes one spectral line whose amplitude is
//! the population difference `A_m = P|0,m⟩ − P|−1,m⟩`. The FID is modelled
//! as a complex (quadrature) signal
//!
//! ```text
//! s(τ) = Σ_m A_m exp(2πi (detuning + split·m) τ) exp(−τ / T2*)
//! ```
//!
//! sampled at `τ_k = k·dt`, zero-padded and Fourier transformed. Line
//! heights are read from the absorption (real) part of the spectrum at the
//! known line positions and normalized against a calibration run of the
//! pumped state `(1,1,1,0,0,0)/3`, whose three lines all have height 1/3.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::spin_model::PopulationVector;

/// Transform convention of [`Spectrum`].
pub const NORMALIZATION: &str =
    "unnormalized forward DFT X_k = sum_n x_n exp(-2 pi i k n / N) over the zero-padded series; \
     Parseval: sum |x_n|^2 = mean |X_k|^2";

const NUCLEAR: [i8; 3] = [-1, 1, 0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralAmplitudes {
    pub a_minus1: f64,
    pub a_plus1: f64,
    pub a_zero: f64,
}

impl SpectralAmplitudes {
    pub fn get(&self, mi: i8) -> f64 {
        match mi {
            -1 => self.a_minus1,
            1 => self.a_plus1,
            _ => self.a_zero,
        }
    }

    fn from_fn(mut f: impl FnMut(i8) -> f64) -> Self {
        SpectralAmplitudes {
            a_minus1: f(-1),
            a_plus1: f(1),
            a_zero: f(0),
        }
    }

    /// Equals `P(m_s=0) − P(m_s=−1)`.
    pub fn sum(&self) -> f64 {
        self.a_minus1 + self.a_plus1 + self.a_zero
    }
}

/// Line amplitudes `A_m = P|0,m⟩ − P|−1,m⟩`.
pub fn amplitudes(p: &PopulationVector) -> SpectralAmplitudes {
    let q = p.as_array();
    SpectralAmplitudes {
        a_minus1: q[0] - q[3],
        a_plus1: q[1] - q[4],
        a_zero: q[2] - q[5],
    }
}

/// Signal model and sampling of the synthesized FID. The defaults are
/// simulation choices, not measured values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidParams {
    pub detuning_mhz: f64,
    /// Line `m` sits at `detuning + hyperfine_split · m`.
    pub hyperfine_split_mhz: f64,
    pub t2star_us: f64,
    pub dt_us: f64,
    pub n_samples: usize,
    /// Transform length after zero padding.
    pub padded_len: usize,
}

impl Default for FidParams {
    fn default() -> Self {
        FidParams {
            detuning_mhz: 4.0,
            hyperfine_split_mhz: -2.16,
            t2star_us: 2.0,
            dt_us: 0.02,
            n_samples: 2048,
            padded_len: 8192,
        }
    }
}

impl FidParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_us > 0.0 && self.dt_us.is_finite()) {
            return Err(param("dt_us", format!("must be > 0, got {}", self.dt_us)));
        }
        if !(self.t2star_us > 0.0 && self.t2star_us.is_finite()) {
            return Err(param(
                "t2star_us",
                format!("must be > 0, got {}", self.t2star_us),
            ));
        }
        if self.n_samples < 256 {
            return Err(param(
                "n_samples",
                format!("must be >= 256, got {}", self.n_samples),
            ));
        }
        if self.padded_len < self.n_samples {
            return Err(param("padded_len", "must be >= n_samples"));
        }
        let nyquist = 0.5 / self.dt_us;
        let highest = self.detuning_mhz.abs() + self.hyperfine_split_mhz.abs();
        if !(highest < nyquist) {
            return Err(param(
                "detuning_mhz",
                format!("lines reach {highest} MHz, beyond the Nyquist frequency {nyquist} MHz"),
            ));
        }
        Ok(())
    }

    pub fn line_frequency(&self, mi: i8) -> f64 {
        self.detuning_mhz + self.hyperfine_split_mhz * f64::from(mi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fid {
    pub dt_us: f64,
    pub samples: Vec<Complex64>,
}

impl Fid {
    pub fn tau(&self, k: usize) -> f64 {
        k as f64 * self.dt_us
    }
}

pub fn synthesize_fid(amps: &SpectralAmplitudes, fp: &FidParams) -> Result<Fid> {
    fp.validate()?;
    let tones: Vec<(f64, f64)> = NUCLEAR
        .iter()
        .map(|&m| (amps.get(m), std::f64::consts::TAU * fp.line_frequency(m)))
        .collect();
    let samples = (0..fp.n_samples)
        .map(|k| {
            let tau = k as f64 * fp.dt_us;
            let envelope = (-tau / fp.t2star_us).exp();
            tones
                .iter()
                .map(|&(a, w)| Complex64::from_polar(a * envelope, w * tau))
                .sum()
        })
        .collect();
    Ok(Fid {
        dt_us: fp.dt_us,
        samples,
    })
}

/// Complex spectrum on a uniform, ascending frequency grid from `−1/(2dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freq_start_mhz: f64,
    pub freq_step_mhz: f64,
    pub values: Vec<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn frequency(&self, j: usize) -> f64 {
        self.freq_start_mhz + j as f64 * self.freq_step_mhz
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }
}

/// Zero-pads the FID to `fp.padded_len` (or its own length, if longer) and
/// transforms it; see [`NORMALIZATION`].
pub fn spectrum(fid: &Fid, fp: &FidParams) -> Spectrum {
    let n = fp.padded_len.max(fid.samples.len()).max(1);
    let mut buf = fid.samples.clone();
    buf.resize(n, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let values = (0..n).map(|j| buf[(j + n - half) % n]).collect();
    let step = 1.0 / (n as f64 * fid.dt_us);
    Spectrum {
        freq_start_mhz: -(half as f64) * step,
        freq_step_mhz: step,
        values,
    }
}

/// Height of the absorption line at the position expected for `mi`.
///
/// Half of the first FID sample is removed first: the transform weights
/// `τ = 0` fully, which puts a constant `s(0)` under every bin, while the
/// continuous-time line shape only carries half of it. Since `s(0)` equals
/// the mean over all bins, the correction needs only the spectrum. The value
/// is then refined by a parabola through the three bins around the line.
fn line_height(spec: &Spectrum, fp: &FidParams, mi: i8) -> Result<f64> {
    let freq = fp.line_frequency(mi);
    let pos = ((freq - spec.freq_start_mhz) / spec.freq_step_mhz).round();
    if !pos.is_finite() || pos < 1.0 || pos > spec.len() as f64 - 2.0 {
        return Err(Error::PeakOffGrid { mi, freq_mhz: freq });
    }
    let k = pos as usize;
    let first_sample: Complex64 = spec.values.iter().sum::<Complex64>() / spec.len() as f64;
    let y = |j: usize| spec.values[j].re - 0.5 * first_sample.re;
    let (ym, y0, yp) = (y(k - 1), y(k), y(k + 1));

    let curvature = ym - 2.0 * y0 + yp;
    if curvature.abs() <= f64::EPSILON * y0.abs().max(1.0) {
        return Ok(y0);
    }
    let offset = 0.5 * (ym - yp) / curvature;
    if offset.abs() > 1.0 {
        return Ok(y0);
    }
    Ok(y0 - 0.25 * (ym - yp) * offset)
}

/// Line heights of the pumped reference state.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    heights: [f64; 3],
    grid: (f64, f64, usize),
}

impl Calibration {
    /// Uses an existing spectrum of the `(1/3,1/3,1/3)` reference state.
    pub fn from_spectrum(spec: &Spectrum, fp: &FidParams) -> Result<Self> {
        let scale = spec.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut heights = [0.0; 3];
        for (h, &mi) in heights.iter_mut().zip(NUCLEAR.iter()) {
            *h = line_height(spec, fp, mi)?;
            if scale == 0.0 || !(*h > 1e-6 * scale) {
                return Err(Error::MissingCalibration { mi, height: *h });
            }
        }
        Ok(Calibration {
            heights,
            grid: grid_of(spec),
        })
    }

    /// Synthesizes and transforms the reference state itself.
    pub fn measure(fp: &FidParams) -> Result<Self> {
        let third = 1.0 / 3.0;
        let reference = SpectralAmplitudes {
            a_minus1: third,
            a_plus1: third,
            a_zero: third,
        };
        let spec = spectrum(&synthesize_fid(&reference, fp)?, fp);
        Self::from_spectrum(&spec, fp)
    }

    fn height(&self, mi: i8) -> f64 {
        self.heights[nuclear_slot(mi)]
    }
}

fn grid_of(spec: &Spectrum) -> (f64, f64, usize) {
    (spec.freq_start_mhz, spec.freq_step_mhz, spec.len())
}

fn nuclear_slot(mi: i8) -> usize {
    NUCLEAR.iter().position(|&m| m == mi).unwrap_or(2)
}

/// Calibrated line amplitudes read back from a spectrum.
///
/// Amplitudes keep their sign: a line with more population in `m_s = −1`
/// than in `m_s = 0` shows up as a negative absorption peak.
pub fn extract_amplitudes(
    spec: &Spectrum,
    fp: &FidParams,
    calibration: &Calibration,
) -> Result<SpectralAmplitudes> {
    if grid_of(spec) != calibration.grid {
        return Err(Error::Domain(
            "spectrum and calibration were transformed on different grids".into(),
        ));
    }
    let mut out = [0.0; 3];
    for (o, &mi) in out.iter_mut().zip(NUCLEAR.iter()) {
        *o = line_height(spec, fp, mi)? / calibration.height(mi) / 3.0;
    }
    Ok(SpectralAmplitudes::from_fn(|mi| out[nuclear_slot(mi)]))
}
