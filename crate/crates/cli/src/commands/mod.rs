//! One module per subcommand. Each returns the text to print on stdout.

mod dof;
mod multicell;
mod rate_sweep;
mod region;
mod scheme_check;
mod verify;

use fdbia::rate::System;

use crate::args::{Cli, Command, NetworkArgs};
use crate::config::{NetworkSection, Preset};
use crate::error::CliError;

pub fn run(cli: Cli) -> Result<String, CliError> {
    let json = cli.json;
    match cli.command {
        Command::Dof(a) => dof::run(a, json),
        Command::Region(a) => region::run(a, json),
        Command::SchemeCheck(a) => scheme_check::run(a, json),
        Command::Verify(a) => verify::run(a, json),
        Command::RateSweep(a) => rate_sweep::run(a, json),
        Command::Multicell(a) => multicell::run(a, json),
    }
}

/// Rejects a preset that belongs to another subcommand.
fn check_preset(preset: Option<Preset>, allowed: Preset, command: &str) -> Result<(), CliError> {
    match preset {
        Some(p) if p != allowed => Err(CliError::Usage(format!(
            "preset {} does not apply to {command}; use --preset {}",
            p.name(),
            allowed.name()
        ))),
        _ => Ok(()),
    }
}

fn network_layer(n: &NetworkArgs) -> Option<NetworkSection> {
    let any = n.kd.is_some() || n.ku.is_some() || n.md.is_some() || n.mu.is_some();
    any.then_some(NetworkSection { kd: n.kd, ku: n.ku, md: n.md, mu: n.mu })
}

fn parse_systems(s: &str) -> Result<Vec<System>, CliError> {
    s.split(',').map(|t| t.trim().parse::<System>().map_err(|e| CliError::Usage(e.to_string()))).collect()
}

fn usage<T>(flag: &str, r: Result<T, String>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Usage(format!("{flag}: {e}")))
}

fn required<T>(v: Option<T>, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("{what} is not set")))
}
