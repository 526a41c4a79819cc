use fdbia::rate::{single_cell_sweep, SingleCellScenario, System};

use super::{check_preset, network_layer, parse_systems, required, usage};
use crate::args::RateSweepArgs;
use crate::config::{parse_f64_grid, resolve, ConfigFile, SingleCellSection, Preset};
use crate::error::CliError;
use crate::output::{emit_table, num, Manifest, Table};

pub fn run(a: RateSweepArgs, json: bool) -> Result<String, CliError> {
    check_preset(a.run.preset, Preset::Fig5, "rate-sweep")?;
    let snr_db = a.snr_grid.as_deref().map(|s| usage("--snr-grid", parse_f64_grid(s))).transpose()?;
    let systems = a.systems.as_deref().map(parse_systems).transpose()?;
    let flags = ConfigFile {
        seed: a.seed,
        trials: a.trials,
        residual_si_power: a.residual_si,
        network: network_layer(&a.network),
        single_cell: Some(SingleCellSection { snr_db, systems }),
        ..Default::default()
    };
    let full = resolve(a.run.preset, a.run.config.as_deref(), flags)?;
    let section = full.single_cell.clone().unwrap_or_default();
    let grid = required(section.snr_db, "single_cell.snr_db")?;
    let systems: Vec<System> = required(section.systems, "single_cell.systems")?;
    if grid.is_empty() || systems.is_empty() {
        return Err(CliError::Config("the SNR grid and the system list must be non-empty".into()));
    }

    let first = systems[0];
    let base = SingleCellScenario {
        cfg: full.network()?,
        model: first.model(),
        duplex: first.duplex(),
        snr_db: grid[0],
        residual_si_power: required(full.residual_si_power, "residual_si_power")?,
        trials: required(full.trials, "trials")?,
        seed: required(full.seed, "seed")?,
    };
    for &snr in &grid {
        base.with_snr_db(snr).validate()?;
    }
    let rows = single_cell_sweep(&base, &grid, &systems)?;

    let mut table = Table::new(vec!["snr_db", "system", "mean_sum_rate", "stderr", "trials"]);
    for r in &rows {
        table.push(vec![num(r.snr_db), r.system.to_string(), num(r.mean_sum_rate), num(r.stderr), r.trials.to_string()]);
    }
    let recorded = ConfigFile { dof: None, multicell: None, ..full };
    let manifest = Manifest::new("rate-sweep", &recorded, a.run.out.as_deref());
    emit_table(&manifest, &table, &rows, a.run.out.as_ref(), json)
}
