//! Run configuration, read from a TOML document.
//!
//! Every key is optional; omitted keys take the defaults below. Unknown keys
//! are rejected.
//!
//! ```toml
//! output_dir = "out"
//! init_laser_us = 5.0
//!
//! [rates]              # either the rates or their inverses, not both
//! inv_k_s_us = 0.27    # or k_s_per_us
//! inv_k_i_us = 4.76    # or k_i_per_us
//!
//! [hamiltonian]
//! d_zfs_mhz = 2870.0
//! gamma_e_mhz_per_mt = -28.0
//! gamma_n_mhz_per_mt = -0.0031
//! quadrupole_mhz = 4.5
//! hyperfine_mhz = -2.16
//! b_field_mt = 6.1
//!
//! [fid]
//! detuning_mhz = 4.0
//! hyperfine_split_mhz = -2.16
//! t2star_us = 2.0
//! dt_us = 0.02
//! n_samples = 2048
//! padded_len = 8192
//!
//! [optimizer]
//! t_max_us = 10.0
//! objective = "p00"            # or "a0"
//! n_cycles = 3
//! strategy = "interleaved"     # or "blocked"
//! cycle1_overrides_us = [0.5, 0.46]
//! use_cycle1_overrides = true
//! ```

use std::path::PathBuf;

use nvinit_core::optimizer::LaserSearch;
use nvinit_core::{FidParams, HamiltonianParams, LaserOverrides, Objective, RateParams, Strategy};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSettings {
    pub t_max_us: f64,
    pub objective: Objective,
    pub n_cycles: usize,
    pub strategy: Strategy,
    pub cycle1_overrides: Option<LaserOverrides>,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            t_max_us: LaserSearch::default().t_max_us,
            objective: Objective::P00,
            n_cycles: 3,
            strategy: Strategy::Interleaved,
            cycle1_overrides: Some(LaserOverrides::EXPERIMENTAL),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub rates: RateParams,
    pub hamiltonian: HamiltonianParams,
    pub fid: FidParams,
    pub optimizer: OptimizerSettings,
    pub init_laser_us: f64,
    pub output_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            rates: RateParams::default(),
            hamiltonian: HamiltonianParams::default(),
            fid: FidParams::default(),
            optimizer: OptimizerSettings::default(),
            init_laser_us: nvinit_core::pulse::INIT_LASER_US,
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    output_dir: Option<PathBuf>,
    init_laser_us: Option<f64>,
    #[serde(default)]
    rates: RatesDoc,
    #[serde(default)]
    hamiltonian: HamiltonianDoc,
    #[serde(default)]
    fid: FidDoc,
    #[serde(default)]
    optimizer: OptimizerDoc,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatesDoc {
    k_s_per_us: Option<f64>,
    k_i_per_us: Option<f64>,
    inv_k_s_us: Option<f64>,
    inv_k_i_us: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianDoc {
    d_zfs_mhz: Option<f64>,
    gamma_e_mhz_per_mt: Option<f64>,
    gamma_n_mhz_per_mt: Option<f64>,
    quadrupole_mhz: Option<f64>,
    hyperfine_mhz: Option<f64>,
    b_field_mt: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FidDoc {
    detuning_mhz: Option<f64>,
    hyperfine_split_mhz: Option<f64>,
    t2star_us: Option<f64>,
    dt_us: Option<f64>,
    n_samples: Option<usize>,
    padded_len: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizerDoc {
    t_max_us: Option<f64>,
    objective: Option<Objective>,
    n_cycles: Option<usize>,
    strategy: Option<Strategy>,
    cycle1_overrides_us: Option<[f64; 2]>,
    use_cycle1_overrides: Option<bool>,
}

/// Deserializes a TOML document, reporting errors with the offending key
/// path and line.
pub fn from_toml<T: DeserializeOwned>(text: &str) -> Result<T> {
    let line_of = |span: Option<std::ops::Range<usize>>| {
        span.map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
    };
    let de = toml::Deserializer::parse(text).map_err(|e| {
        let line = line_of(e.span())
            .map(|l| format!(" (line {l})"))
            .unwrap_or_default();
        CliError::at("document", format!("{}{line}", e.message().trim()))
    })?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        let inner = e.into_inner();
        let line = line_of(inner.span())
            .map(|l| format!(" (line {l})"))
            .unwrap_or_default();
        CliError::at(key, format!("{}{line}", inner.message().trim()))
    })
}

fn positive(key: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::at(
            key,
            format!("must be a finite number > 0, got {value}"),
        ))
    }
}

fn choose_rate(key: &str, rate: Option<f64>, inverse: Option<f64>, default: f64) -> Result<f64> {
    match (rate, inverse) {
        (Some(_), Some(_)) => Err(CliError::at(
            format!("rates.{key}"),
            "specify either the rate or its inverse, not both",
        )),
        (Some(k), None) => Ok(k),
        (None, Some(inv)) => Ok(1.0 / positive(&format!("rates.inv_{key}_us"), inv)?),
        (None, None) => Ok(default),
    }
}

/// Parses a configuration document and applies defaults.
pub fn parse_config(document: &str) -> Result<Config> {
    let doc: ConfigDoc = from_toml(document)?;
    let base = Config::default();

    let k_s = choose_rate(
        "k_s",
        doc.rates.k_s_per_us,
        doc.rates.inv_k_s_us,
        base.rates.k_s(),
    )?;
    let k_i = choose_rate(
        "k_i",
        doc.rates.k_i_per_us,
        doc.rates.inv_k_i_us,
        base.rates.k_i(),
    )?;
    if !(k_s.is_finite() && k_s > 0.0) {
        return Err(CliError::at(
            "rates.k_s_per_us",
            format!("must be > 0, got {k_s}"),
        ));
    }
    if !(k_i.is_finite() && k_i >= 0.0) {
        return Err(CliError::at(
            "rates.k_i_per_us",
            format!("must be >= 0, got {k_i}"),
        ));
    }
    let rates = RateParams::new(k_s, k_i)?;

    let h = doc.hamiltonian;
    let d = base.hamiltonian;
    let hamiltonian = HamiltonianParams {
        d_zfs: h.d_zfs_mhz.unwrap_or(d.d_zfs),
        gamma_e: h.gamma_e_mhz_per_mt.unwrap_or(d.gamma_e),
        gamma_n: h.gamma_n_mhz_per_mt.unwrap_or(d.gamma_n),
        quadrupole: h.quadrupole_mhz.unwrap_or(d.quadrupole),
        hyperfine: h.hyperfine_mhz.unwrap_or(d.hyperfine),
        b_field: h.b_field_mt.unwrap_or(d.b_field),
    };
    hamiltonian
        .validate()
        .map_err(|e| CliError::at("hamiltonian", e))?;

    let f = doc.fid;
    let d = base.fid;
    let fid = FidParams {
        detuning_mhz: f.detuning_mhz.unwrap_or(d.detuning_mhz),
        hyperfine_split_mhz: f.hyperfine_split_mhz.unwrap_or(d.hyperfine_split_mhz),
        t2star_us: f.t2star_us.unwrap_or(d.t2star_us),
        dt_us: f.dt_us.unwrap_or(d.dt_us),
        n_samples: f.n_samples.unwrap_or(d.n_samples),
        padded_len: f.padded_len.unwrap_or(d.padded_len),
    };
    fid.validate().map_err(|e| CliError::at("fid", e))?;

    let o = doc.optimizer;
    let d = base.optimizer;
    let t_max_us = positive("optimizer.t_max_us", o.t_max_us.unwrap_or(d.t_max_us))?;
    let n_cycles = o.n_cycles.unwrap_or(d.n_cycles);
    if !(1..=20).contains(&n_cycles) {
        return Err(CliError::at(
            "optimizer.n_cycles",
            format!("must lie in 1..=20, got {n_cycles}"),
        ));
    }
    let cycle1_overrides = if o.use_cycle1_overrides.unwrap_or(true) {
        match o.cycle1_overrides_us {
            Some([t1, t2]) => {
                for t in [t1, t2] {
                    if !(t.is_finite() && t >= 0.0) {
                        return Err(CliError::at(
                            "optimizer.cycle1_overrides_us",
                            format!("durations must be >= 0, got {t}"),
                        ));
                    }
                }
                Some(LaserOverrides {
                    t1_us: t1,
                    t2_us: t2,
                })
            }
            None => d.cycle1_overrides,
        }
    } else {
        None
    };
    let optimizer = OptimizerSettings {
        t_max_us,
        objective: o.objective.unwrap_or(d.objective),
        n_cycles,
        strategy: o.strategy.unwrap_or(d.strategy),
        cycle1_overrides,
    };

    Ok(Config {
        rates,
        hamiltonian,
        fid,
        optimizer,
        init_laser_us: positive(
            "init_laser_us",
            doc.init_laser_us.unwrap_or(base.init_laser_us),
        )?,
        output_dir: doc.output_dir.unwrap_or(base.output_dir),
    })
}
