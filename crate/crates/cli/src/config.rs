//! Run configuration: file schema, presets and layered resolution.
//!
//! Values are resolved in the order built-in defaults, preset, config file,
//! command-line flags; each later layer overrides the fields it sets.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use fdbia::network::NetworkConfig;
use fdbia::rate::{Scheduler, System};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Prefix of the manifest line that carries the resolved configuration.
pub const CONFIG_LINE: &str = "# config-json: ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Symmetric DoF table, `K = M` from 1 to 8.
    Fig3,
    /// Single-cell sum rates for (2,2,2,2) from 0 to 40 dB.
    Fig5,
    /// Seven-cell sum rates for (2,2,2,2) over `J`, both schedulers.
    Fig6,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }

    pub fn layer(self) -> ConfigFile {
        let network = Some(NetworkSection { kd: Some(2), ku: Some(2), md: Some(2), mu: Some(2) });
        match self {
            Preset::Fig3 => ConfigFile { dof: Some(DofSection { symmetric: Some((1..=8).collect()) }), ..Default::default() },
            Preset::Fig5 => ConfigFile {
                seed: Some(2024),
                trials: Some(10_000),
                residual_si_power: Some(1.0),
                network,
                single_cell: Some(SingleCellSection {
                    snr_db: Some((0..=8).map(|k| 5.0 * k as f64).collect()),
                    systems: Some(System::ALL.to_vec()),
                }),
                ..Default::default()
            },
            Preset::Fig6 => ConfigFile {
                seed: Some(2024),
                trials: Some(10_000),
                residual_si_power: Some(1.0),
                network,
                multicell: Some(MulticellSection {
                    j_grid: Some(vec![2, 4, 6, 8]),
                    alpha: Some(3.0),
                    p_ref_db: Some(10.0),
                    schedulers: Some(Scheduler::ALL.to_vec()),
                    systems: Some(System::ALL.to_vec()),
                }),
                ..Default::default()
            },
        }
    }
}

/// Schema shared by TOML config files, JSON config files and the manifest
/// header. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_si_power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dof: Option<DofSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_cell: Option<SingleCellSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multicell: Option<MulticellSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kd: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ku: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub md: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DofSection {
    /// Tabulate `K_d = K_u = M_d = M_u = k` for each listed `k` instead of
    /// the single network.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleCellSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub systems: Option<Vec<System>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MulticellSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_grid: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_ref_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedulers: Option<Vec<Scheduler>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub systems: Option<Vec<System>>,
}

fn pick<T>(over: Option<T>, base: Option<T>) -> Option<T> {
    over.or(base)
}

fn merge_section<T: Default>(over: Option<T>, base: Option<T>, f: impl FnOnce(T, T) -> T) -> Option<T> {
    match (over, base) {
        (Some(o), Some(b)) => Some(f(o, b)),
        (o, b) => o.or(b),
    }
}

impl ConfigFile {
    /// `self` with every unset field taken from `base`.
    pub fn over(self, base: ConfigFile) -> ConfigFile {
        ConfigFile {
            seed: pick(self.seed, base.seed),
            trials: pick(self.trials, base.trials),
            residual_si_power: pick(self.residual_si_power, base.residual_si_power),
            network: merge_section(self.network, base.network, |o, b| NetworkSection {
                kd: pick(o.kd, b.kd),
                ku: pick(o.ku, b.ku),
                md: pick(o.md, b.md),
                mu: pick(o.mu, b.mu),
            }),
            dof: merge_section(self.dof, base.dof, |o, b| DofSection { symmetric: pick(o.symmetric, b.symmetric) }),
            single_cell: merge_section(self.single_cell, base.single_cell, |o, b| SingleCellSection {
                snr_db: pick(o.snr_db, b.snr_db),
                systems: pick(o.systems, b.systems),
            }),
            multicell: merge_section(self.multicell, base.multicell, |o, b| MulticellSection {
                j_grid: pick(o.j_grid, b.j_grid),
                alpha: pick(o.alpha, b.alpha),
                p_ref_db: pick(o.p_ref_db, b.p_ref_db),
                schedulers: pick(o.schedulers, b.schedulers),
                systems: pick(o.systems, b.systems),
            }),
        }
    }

    /// Reads a TOML or JSON config file, or the manifest header of a CSV
    /// written by this tool.
    pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        let parsed = if ext.eq_ignore_ascii_case("csv") {
            let line = text
                .lines()
                .find_map(|l| l.strip_prefix(CONFIG_LINE))
                .ok_or_else(|| CliError::Config(format!("{} has no manifest config line", path.display())))?;
            serde_json::from_str(line).map_err(|e| e.to_string())
        } else if ext.eq_ignore_ascii_case("json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::Config(format!("invalid config file {}: {e}", path.display())))
    }

    pub fn network(&self) -> Result<NetworkConfig, CliError> {
        let n = self.network.clone().unwrap_or_default();
        let get = |v: Option<usize>, name: &str| v.ok_or_else(|| CliError::Config(format!("network.{name} is not set")));
        NetworkConfig::new(get(n.kd, "kd")?, get(n.ku, "ku")?, get(n.md, "md")?, get(n.mu, "mu")?)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Built-in defaults, the lowest layer.
pub fn defaults() -> ConfigFile {
    ConfigFile {
        seed: Some(1),
        trials: Some(1000),
        residual_si_power: Some(1.0),
        network: Some(NetworkSection { kd: Some(2), ku: Some(2), md: Some(2), mu: Some(2) }),
        dof: Some(DofSection::default()),
        single_cell: Some(SingleCellSection {
            snr_db: Some((0..=8).map(|k| 5.0 * k as f64).collect()),
            systems: Some(System::ALL.to_vec()),
        }),
        multicell: Some(MulticellSection {
            j_grid: Some(vec![2, 4, 6, 8]),
            alpha: Some(3.0),
            p_ref_db: Some(10.0),
            schedulers: Some(Scheduler::ALL.to_vec()),
            systems: Some(System::ALL.to_vec()),
        }),
    }
}

/// Stacks defaults, preset, file and flags.
pub fn resolve(preset: Option<Preset>, file: Option<&Path>, flags: ConfigFile) -> Result<ConfigFile, CliError> {
    let mut cfg = defaults();
    if let Some(p) = preset {
        cfg = p.layer().over(cfg);
    }
    if let Some(path) = file {
        cfg = ConfigFile::load(path)?.over(cfg);
    }
    Ok(flags.over(cfg))
}

/// Parses `a,b,c` or `start:step:stop` (inclusive) into a list.
pub fn parse_f64_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, step, stop] = parts[..] else {
            return Err(format!("range '{s}' must be start:step:stop"));
        };
        let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(format!("range '{s}' needs step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|k| start + step * k as f64).collect());
    }
    s.split(',').map(num).collect()
}

/// Integer form of [`parse_f64_grid`].
pub fn parse_usize_grid(s: &str) -> Result<Vec<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("'{t}' is not a nonnegative integer"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, step, stop] = parts[..] else {
            return Err(format!("range '{s}' must be start:step:stop"));
        };
        let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
        if step == 0 || stop < start {
            return Err(format!("range '{s}' needs step > 0 and stop >= start"));
        }
        return Ok((start..=stop).step_by(step).collect());
    }
    s.split(',').map(num).collect()
}
