use fdbia::dof::{best_allocation, SymbolAllocation};
use fdbia::error::SchemeError;
use fdbia::network::{sample_channels, NetworkConfig};
use fdbia::no_csit::build_no_csit;
use fdbia::partial_csit::{build_partial_csit, verify_lemma1, Lemma1Report};
use fdbia::verify::{no_csit_round_trip, partial_csit_round_trip, ALIGNMENT_TOLERANCE, TOLERANCE};
use serde::Serialize;

use super::{network_layer, usage};
use crate::args::{ModelArg, SchemeCheckArgs};
use crate::config::{defaults, ConfigFile};
use crate::error::CliError;

#[derive(Debug, Serialize)]
struct SchemeReport {
    scheme: &'static str,
    config: NetworkConfig,
    seed: u64,
    block_len: usize,
    alloc: Option<(usize, usize)>,
    alignment_residual: f64,
    zero_forcing_residual: Option<f64>,
    lemma1: Option<Lemma1Report>,
    required_rank_p: Option<usize>,
    required_rank_q: Option<usize>,
    /// Relative errors of a noiseless encode, channel, decode pass.
    dl_recovery_error: f64,
    ul_recovery_error: f64,
    /// Exact UL recovery is only expected when `K_u ≤ M_u`.
    ul_recovery_checked: bool,
    passed: bool,
}

fn parse_alloc(s: &str) -> Result<(usize, usize), String> {
    let (d, u) = s.split_once(',').ok_or_else(|| format!("'{s}' must be n_d,n_u"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("'{t}' is not a nonnegative integer"));
    Ok((num(d)?, num(u)?))
}

fn check(
    scheme: &'static str,
    cfg: NetworkConfig,
    seed: u64,
    alloc: Option<SymbolAllocation>,
) -> Result<SchemeReport, SchemeError> {
    let ul_checked = cfg.ku <= cfg.mu;
    let mut report = match alloc {
        None => {
            let p = build_no_csit(&cfg)?;
            let (dl, ul) = no_csit_round_trip(&cfg, seed, 0)?;
            SchemeReport {
                scheme,
                config: cfg,
                seed,
                block_len: p.block_len(),
                alloc: None,
                alignment_residual: p.alignment_residual(),
                zero_forcing_residual: None,
                lemma1: None,
                required_rank_p: None,
                required_rank_q: None,
                dl_recovery_error: dl,
                ul_recovery_error: ul,
                ul_recovery_checked: ul_checked,
                passed: false,
            }
        }
        Some(a) => {
            let cr = sample_channels(cfg, seed);
            let p = build_partial_csit(&cfg, &cr.bs_full_csi(), a)?;
            let lemma = verify_lemma1(&cfg, &cr, a)?;
            let (dl, ul) = partial_csit_round_trip(&cfg, a, seed, 0)?;
            SchemeReport {
                scheme,
                config: cfg,
                seed,
                block_len: p.block_len(),
                alloc: Some((a.nd, a.nu)),
                alignment_residual: p.alignment_residual(),
                zero_forcing_residual: Some(p.zero_forcing_residual()),
                lemma1: Some(lemma),
                required_rank_p: Some(cfg.ld() * a.nd),
                required_rank_q: Some(cfg.lu() * a.nu),
                dl_recovery_error: dl,
                ul_recovery_error: ul,
                ul_recovery_checked: ul_checked,
                passed: false,
            }
        }
    };
    let lemma_ok = match (&report.lemma1, report.required_rank_p, report.required_rank_q) {
        (Some(l), Some(rp), Some(rq)) => l.rank_p == rp && l.rank_q >= rq && l.residual_a <= TOLERANCE && l.residual_b <= TOLERANCE,
        _ => true,
    };
    report.passed = report.alignment_residual <= ALIGNMENT_TOLERANCE
        && report.zero_forcing_residual.is_none_or(|r| r <= TOLERANCE)
        && lemma_ok
        && report.dl_recovery_error <= TOLERANCE
        && (!ul_checked || report.ul_recovery_error <= TOLERANCE);
    Ok(report)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

fn text(r: &SchemeReport) -> String {
    let mut lines = vec![
        format!("scheme: {}", r.scheme),
        format!("network: {}", r.config),
        format!("seed: {}", r.seed),
        format!("block_len: {}", r.block_len),
        format!("alloc: {}", r.alloc.map_or_else(|| "n/a".to_string(), |(d, u)| format!("{d},{u}"))),
        format!("alignment_residual: {:.3e}", r.alignment_residual),
        format!("zero_forcing_residual: {}", r.zero_forcing_residual.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3e}"))),
    ];
    if let Some(l) = &r.lemma1 {
        lines.push(format!("rank_p: {} (required {})", l.rank_p, opt(r.required_rank_p)));
        lines.push(format!("rank_q: {} (required >= {})", l.rank_q, opt(r.required_rank_q)));
        lines.push(format!("block_identity_residual_dl: {:.3e}", l.residual_a));
        lines.push(format!("block_identity_residual_ul: {:.3e}", l.residual_b));
    }
    lines.push(format!("dl_recovery_error: {:.3e}", r.dl_recovery_error));
    let ul_note = if r.ul_recovery_checked { "" } else { " (not checked: ku > mu)" };
    lines.push(format!("ul_recovery_error: {:.3e}{ul_note}", r.ul_recovery_error));
    lines.push(format!("result: {}", if r.passed { "pass" } else { "FAIL" }));
    lines.join("\n") + "\n"
}

pub fn run(a: SchemeCheckArgs, json: bool) -> Result<String, CliError> {
    let layer = ConfigFile { network: network_layer(&a.network), ..Default::default() };
    let base = ConfigFile { network: defaults().network, ..Default::default() };
    let cfg = layer.over(base).network()?;
    let (scheme, alloc) = match a.model {
        ModelArg::NoCsit => {
            if a.alloc.is_some() {
                return Err(CliError::Usage("--alloc applies to --model partial-csit only".into()));
            }
            ("no-csit", None)
        }
        ModelArg::PartialCsit => {
            let alloc = match &a.alloc {
                Some(s) => {
                    let (nd, nu) = usage("--alloc", parse_alloc(s))?;
                    SymbolAllocation::new(nd, nu, &cfg).map_err(|e| CliError::Config(e.to_string()))?
                }
                None => best_allocation(&cfg)
                    .map_err(|e| CliError::Config(e.to_string()))?
                    .ok_or_else(|| CliError::Config(format!("{cfg} admits no partial-CSIT symbol allocation")))?
                    .0,
            };
            ("partial-csit", Some(alloc))
        }
    };
    let report = check(scheme, cfg, a.seed, alloc)?;
    let out = if json { serde_json::to_string_pretty(&report).expect("report serializes") + "\n" } else { text(&report) };
    if report.passed {
        Ok(out)
    } else {
        print!("{out}");
        Err(CliError::Runtime("scheme check failed".into()))
    }
}
