use fdbia::rate::{multicell_sweep, MulticellScenario, Scheduler, System};

use super::{check_preset, network_layer, parse_systems, required, usage};
use crate::args::{MulticellArgs, SchedulerArg};
use crate::config::{parse_usize_grid, resolve, ConfigFile, MulticellSection, Preset};
use crate::error::CliError;
use crate::output::{emit_table, num, Manifest, Table};

pub fn run(a: MulticellArgs, json: bool) -> Result<String, CliError> {
    check_preset(a.run.preset, Preset::Fig6, "multicell")?;
    let j_grid = a.j_grid.as_deref().map(|s| usage("--j-grid", parse_usize_grid(s))).transpose()?;
    let systems = a.systems.as_deref().map(parse_systems).transpose()?;
    let schedulers = a.scheduler.map(|s| match s {
        SchedulerArg::RoundRobin => vec![Scheduler::RoundRobin],
        SchedulerArg::MaxSnr => vec![Scheduler::MaxSnr],
        SchedulerArg::Both => Scheduler::ALL.to_vec(),
    });
    let flags = ConfigFile {
        seed: a.seed,
        trials: a.trials,
        residual_si_power: a.residual_si,
        network: network_layer(&a.network),
        multicell: Some(MulticellSection { j_grid, alpha: a.alpha, p_ref_db: a.pref_db, schedulers, systems }),
        ..Default::default()
    };
    let full = resolve(a.run.preset, a.run.config.as_deref(), flags)?;
    let section = full.multicell.clone().unwrap_or_default();
    let j_grid = required(section.j_grid, "multicell.j_grid")?;
    let schedulers = required(section.schedulers, "multicell.schedulers")?;
    let systems: Vec<System> = required(section.systems, "multicell.systems")?;
    if j_grid.is_empty() || schedulers.is_empty() || systems.is_empty() {
        return Err(CliError::Config("the J grid, scheduler list and system list must be non-empty".into()));
    }

    let base = MulticellScenario {
        cfg: full.network()?,
        j_users: j_grid[0],
        alpha_pl: required(section.alpha, "multicell.alpha")?,
        p_ref_db: required(section.p_ref_db, "multicell.p_ref_db")?,
        scheduler: schedulers[0],
        residual_si_power: required(full.residual_si_power, "residual_si_power")?,
        trials: required(full.trials, "trials")?,
        seed: required(full.seed, "seed")?,
    };
    for &s in &schedulers {
        for &j in &j_grid {
            MulticellScenario { scheduler: s, ..base.with_j(j) }.validate()?;
        }
    }
    let mut rows = Vec::new();
    for &s in &schedulers {
        rows.extend(multicell_sweep(&MulticellScenario { scheduler: s, ..base.clone() }, &j_grid, &systems)?);
    }

    let mut table = Table::new(vec!["j", "scheduler", "series", "mean_sum_rate", "stderr", "drops"]);
    for r in &rows {
        table.push(vec![
            r.j_users.to_string(),
            r.scheduler.to_string(),
            r.series.clone(),
            num(r.mean_sum_rate),
            num(r.stderr),
            r.drops.to_string(),
        ]);
    }
    let recorded = ConfigFile { dof: None, single_cell: None, ..full };
    let manifest = Manifest::new("multicell", &recorded, a.run.out.as_deref());
    emit_table(&manifest, &table, &rows, a.run.out.as_ref(), json)
}
