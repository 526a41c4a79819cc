use fdbia::verify::{alignment_suite, lemma1_suite, recovery_suite, AlignmentSummary, Lemma1Summary, RecoverySummary};
use serde::Serialize;

use crate::args::VerifyArgs;
use crate::error::CliError;

#[derive(Serialize)]
struct VerifyReport {
    seed: u64,
    alignment: AlignmentSummary,
    recovery: Vec<RecoverySummary>,
    rank: Vec<Lemma1Summary>,
    passed: bool,
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn text(r: &VerifyReport) -> String {
    let mut out = format!(
        "alignment: {} cases up to block length {}, max residual {:.3e} ... {}\n",
        r.alignment.cases,
        r.alignment.max_block_len,
        r.alignment.max_residual,
        verdict(r.alignment.passed)
    );
    for s in &r.recovery {
        let alloc = s.alloc.map_or_else(String::new, |(d, u)| format!(" alloc {d},{u}"));
        out += &format!(
            "recovery {} ld={} lu={}{alloc}: {} draws, max error dl {:.3e} ul {:.3e} ... {}\n",
            s.scheme,
            s.ld,
            s.lu,
            s.draws,
            s.max_dl_error,
            s.max_ul_error,
            verdict(s.passed)
        );
    }
    for s in &r.rank {
        out += &format!(
            "rank ld={} lu={} alloc {},{}: {} draws, rank P {}/{} rank Q {}/{}, residuals {:.3e} {:.3e} ... {}\n",
            s.ld,
            s.lu,
            s.alloc.0,
            s.alloc.1,
            s.draws,
            s.min_rank_p,
            s.required_rank_p,
            s.min_rank_q,
            s.required_rank_q,
            s.max_residual_a,
            s.max_residual_b,
            verdict(s.passed)
        );
    }
    out += &format!("result: {}\n", verdict(r.passed));
    out
}

pub fn run(a: VerifyArgs, json: bool) -> Result<String, CliError> {
    if a.max_l == 0 || a.max_block == 0 || a.trials == 0 {
        return Err(CliError::Usage("--max-l, --max-block and --trials must be >= 1".into()));
    }
    let alignment = alignment_suite(a.max_block)?;
    let recovery = recovery_suite(a.max_l, a.trials, a.seed)?;
    let rank = lemma1_suite(a.max_l, a.trials, a.seed)?;
    let passed = alignment.passed && recovery.iter().all(|s| s.passed) && rank.iter().all(|s| s.passed);
    let report = VerifyReport { seed: a.seed, alignment, recovery, rank, passed };
    let out = if json { serde_json::to_string_pretty(&report).expect("report serializes") + "\n" } else { text(&report) };
    if passed {
        Ok(out)
    } else {
        print!("{out}");
        Err(CliError::Runtime("verification failed".into()))
    }
}
