use fdbia::dof::{sum_dof_no_csit, sum_dof_partial_csit, TightRegime};
use fdbia::network::NetworkConfig;
use serde::Serialize;

use super::{check_preset, network_layer, usage};
use crate::args::DofArgs;
use crate::config::{parse_usize_grid, resolve, ConfigFile, DofSection, Preset};
use crate::error::CliError;
use crate::output::{emit_table, Manifest, Table};

#[derive(Debug, Serialize)]
struct DofRow {
    kd: usize,
    ku: usize,
    md: usize,
    mu: usize,
    no_csit: String,
    partial_lower: String,
    partial_upper: String,
    partial_exact: Option<String>,
    regime: Option<&'static str>,
}

fn regime_name(r: TightRegime) -> &'static str {
    match r {
        TightRegime::AllAtLeastTwo => "all-at-least-two",
        TightRegime::SingleDlUser => "single-dl-user",
        TightRegime::SingleUlUser => "single-ul-user",
    }
}

fn row(cfg: &NetworkConfig) -> DofRow {
    let b = sum_dof_partial_csit(cfg);
    DofRow {
        kd: cfg.kd,
        ku: cfg.ku,
        md: cfg.md,
        mu: cfg.mu,
        no_csit: sum_dof_no_csit(cfg).to_string(),
        partial_lower: b.lower.to_string(),
        partial_upper: b.upper.to_string(),
        partial_exact: b.exact.map(|d| d.to_string()),
        regime: TightRegime::of(cfg).map(regime_name),
    }
}

pub fn run(a: DofArgs, json: bool) -> Result<String, CliError> {
    check_preset(a.run.preset, Preset::Fig3, "dof")?;
    let network = network_layer(&a.network);
    let symmetric = match &a.symmetric {
        Some(s) => Some(usage("--symmetric", parse_usize_grid(s))?),
        // explicit network flags ask for that single network
        None if network.is_some() => Some(Vec::new()),
        None => None,
    };
    let flags = ConfigFile { network, dof: Some(DofSection { symmetric }), ..Default::default() };
    let full = resolve(a.run.preset, a.run.config.as_deref(), flags)?;
    let symmetric = full.dof.clone().and_then(|d| d.symmetric).unwrap_or_default();

    let configs = if symmetric.is_empty() {
        vec![full.network()?]
    } else {
        symmetric
            .iter()
            .map(|&k| NetworkConfig::symmetric(k).map_err(|e| CliError::Config(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?
    };
    let rows: Vec<DofRow> = configs.iter().map(row).collect();

    let mut table = Table::new(vec!["kd", "ku", "md", "mu", "no_csit", "partial_lower", "partial_upper", "partial_exact", "regime"]);
    for r in &rows {
        table.push(vec![
            r.kd.to_string(),
            r.ku.to_string(),
            r.md.to_string(),
            r.mu.to_string(),
            r.no_csit.clone(),
            r.partial_lower.clone(),
            r.partial_upper.clone(),
            r.partial_exact.clone().unwrap_or_default(),
            r.regime.unwrap_or("").to_string(),
        ]);
    }
    let recorded = ConfigFile {
        network: if symmetric.is_empty() { full.network.clone() } else { None },
        dof: Some(DofSection { symmetric: Some(symmetric) }),
        ..Default::default()
    };
    let manifest = Manifest::new("dof", &recorded, a.run.out.as_deref());
    emit_table(&manifest, &table, &rows, a.run.out.as_ref(), json)
}
