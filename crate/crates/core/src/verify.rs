//! Monte Carlo invariant suites for both alignment schemes.
//!
//! Configurations use `K_d = M_d = L_d` and `K_u = M_u = L_u`. Draw `t`
//! takes its channels from trial `t` of the seed and its symbols from the
//! symbol stream of the same trial.

use rayon::prelude::*;
use serde::Serialize;

use crate::dof::{enumerate_allocations, SymbolAllocation};
use crate::error::SchemeError;
use crate::linalg::{ComplexVector, C64};
use crate::network::{apply_channel, sample_channels_for_trial, NetworkConfig};
use crate::no_csit::build_no_csit;
use crate::partial_csit::{build_partial_csit, idft_split, verify_lemma1};
use crate::rng::{complex_gaussian, stream_rng, Stream};

/// Bound on residuals and relative recovery errors.
pub const TOLERANCE: f64 = 1e-8;

/// Bound on `‖W1ᴴw2‖` and `‖W3ᴴW4‖`.
pub const ALIGNMENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentSummary {
    pub max_block_len: usize,
    pub cases: usize,
    pub max_residual: f64,
    pub passed: bool,
}

/// `‖W1ᴴw2‖` for every `L_u ≤ max_block_len` and `‖W3ᴴW4‖` for every
/// allocation with `L_d L_u ≤ max_block_len`. The partial-CSIT precoders do
/// not depend on the channel, so no channel is drawn.
pub fn alignment_suite(max_block_len: usize) -> Result<AlignmentSummary, SchemeError> {
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for lu in 1..=max_block_len {
        let p = build_no_csit(&NetworkConfig::new(1, lu, 1, lu)?)?;
        worst = worst.max(p.alignment_residual());
        cases += 1;
    }
    let configs: Vec<(usize, usize)> =
        (1..=max_block_len).flat_map(|ld| (1..=max_block_len / ld).map(move |lu| (ld, lu))).collect();
    let per_config = configs
        .into_par_iter()
        .map(|(ld, lu)| {
            let cfg = NetworkConfig::new(ld, lu, ld, lu)?;
            let mut worst: f64 = 0.0;
            let allocs = enumerate_allocations(&cfg)?;
            for (alloc, _) in &allocs {
                let (w3, w4) = idft_split(ld * lu, *alloc)?;
                worst = worst.max((w3.adjoint() * w4).norm());
            }
            Ok((allocs.len(), worst))
        })
        .collect::<Result<Vec<_>, SchemeError>>()?;
    for (n, w) in per_config {
        cases += n;
        worst = worst.max(w);
    }
    Ok(AlignmentSummary { max_block_len, cases, max_residual: worst, passed: worst <= ALIGNMENT_TOLERANCE })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoverySummary {
    /// `no-csit` or `partial-csit`.
    pub scheme: &'static str,
    pub ld: usize,
    pub lu: usize,
    /// `(n_d, n_u)`; `None` for the no-CSIT scheme.
    pub alloc: Option<(usize, usize)>,
    pub draws: usize,
    pub max_dl_error: f64,
    pub max_ul_error: f64,
    pub passed: bool,
}

fn random_vec(seed: u64, trial: u64, lens: &[usize]) -> Vec<ComplexVector> {
    let mut rng = stream_rng(seed, trial, Stream::Symbols);
    lens.iter().map(|&n| ComplexVector::from_fn(n, |_, _| complex_gaussian(&mut rng))).collect()
}

fn relative_error(est: &ComplexVector, truth: &ComplexVector) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    (est - truth).norm() / truth.norm()
}

fn stacked(v: &[ComplexVector]) -> ComplexVector {
    ComplexVector::from_iterator(v.iter().map(|x| x.len()).sum(), v.iter().flat_map(|x| x.iter().copied()))
}

/// Largest relative DL and UL errors of one noiseless no-CSIT block.
pub fn no_csit_round_trip(cfg: &NetworkConfig, seed: u64, trial: u64) -> Result<(f64, f64), SchemeError> {
    let cr = sample_channels_for_trial(*cfg, seed, trial);
    let p = build_no_csit(cfg)?;
    let n = p.block_len();
    let mut syms = random_vec(seed, trial, &[p.dl_streams(), cfg.ku]);
    let s_u: Vec<C64> = syms.pop().expect("two vectors").iter().copied().collect();
    let s_d = syms.pop().expect("two vectors");
    let (x_d, x_u) = p.encode(&s_d, &s_u)?;
    let out = apply_channel(&cr, &p.schedule, &x_d, &x_u, &vec![ComplexVector::zeros(n); cfg.kd], &ComplexVector::zeros(n))?;
    let dl = p.decode_dl(&cr.dl_user_csi(0)?, &out.y_d[0])?;
    let ul = p.decode_ul(&cr.bs_receive_csi(), &out.y_u)?;
    Ok((relative_error(&dl, &s_d), relative_error(&ul.symbols, &ComplexVector::from_vec(s_u))))
}

/// Largest relative DL and UL errors of one noiseless partial-CSIT block.
pub fn partial_csit_round_trip(cfg: &NetworkConfig, alloc: SymbolAllocation, seed: u64, trial: u64) -> Result<(f64, f64), SchemeError> {
    let cr = sample_channels_for_trial(*cfg, seed, trial);
    let p = build_partial_csit(cfg, &cr.bs_full_csi(), alloc)?;
    let n = p.block_len();
    let served = p.served_dl_users();
    let mut lens = vec![alloc.nd; served];
    lens.extend(std::iter::repeat_n(alloc.nu, cfg.ku));
    let mut syms = random_vec(seed, trial, &lens);
    let s_u = syms.split_off(served);
    let s_d = syms;
    let (x_d, x_u) = p.encode(&s_d, &s_u)?;
    let out = apply_channel(&cr, &p.schedule, &x_d, &x_u, &vec![ComplexVector::zeros(n); cfg.kd], &ComplexVector::zeros(n))?;
    let mut dl_err: f64 = 0.0;
    for (i, s) in s_d.iter().enumerate() {
        dl_err = dl_err.max(relative_error(&p.decode_dl(i, &out.y_d[i])?, s));
    }
    let ul = p.decode_ul(&out.y_u)?;
    Ok((dl_err, relative_error(&ul.symbols, &stacked(&s_u))))
}

fn cases(max_l: usize) -> Vec<(usize, usize)> {
    (1..=max_l).flat_map(|ld| (1..=max_l).map(move |lu| (ld, lu))).collect()
}

fn recovery_case(
    scheme: &'static str,
    ld: usize,
    lu: usize,
    alloc: Option<SymbolAllocation>,
    draws: usize,
    seed: u64,
) -> Result<RecoverySummary, SchemeError> {
    let cfg = NetworkConfig::new(ld, lu, ld, lu)?;
    let errs = (0..draws as u64)
        .into_par_iter()
        .map(|t| match alloc {
            Some(a) => partial_csit_round_trip(&cfg, a, seed, t),
            None => no_csit_round_trip(&cfg, seed, t),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let max_dl_error = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let max_ul_error = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok(RecoverySummary {
        scheme,
        ld,
        lu,
        alloc: alloc.map(|a| (a.nd, a.nu)),
        draws,
        max_dl_error,
        max_ul_error,
        passed: max_dl_error <= TOLERANCE && max_ul_error <= TOLERANCE,
    })
}

/// Noiseless recovery for the no-CSIT scheme and every partial-CSIT
/// allocation with `L_d, L_u ≤ max_l`.
pub fn recovery_suite(max_l: usize, draws: usize, seed: u64) -> Result<Vec<RecoverySummary>, SchemeError> {
    let mut out = Vec::new();
    for (ld, lu) in cases(max_l) {
        out.push(recovery_case("no-csit", ld, lu, None, draws, seed)?);
        for (a, _) in enumerate_allocations(&NetworkConfig::new(ld, lu, ld, lu)?)? {
            out.push(recovery_case("partial-csit", ld, lu, Some(a), draws, seed)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Summary {
    pub ld: usize,
    pub lu: usize,
    pub alloc: (usize, usize),
    pub draws: usize,
    pub min_rank_p: usize,
    pub required_rank_p: usize,
    pub min_rank_q: usize,
    pub required_rank_q: usize,
    pub max_residual_a: f64,
    pub max_residual_b: f64,
    pub passed: bool,
}

/// Ranks of `P` and `Q` and the block-identity residuals for every
/// allocation with `L_d, L_u ≤ max_l`.
pub fn lemma1_suite(max_l: usize, draws: usize, seed: u64) -> Result<Vec<Lemma1Summary>, SchemeError> {
    let mut out = Vec::new();
    for (ld, lu) in cases(max_l) {
        let cfg = NetworkConfig::new(ld, lu, ld, lu)?;
        for (a, _) in enumerate_allocations(&cfg)? {
            let reports = (0..draws as u64)
                .into_par_iter()
                .map(|t| verify_lemma1(&cfg, &sample_channels_for_trial(cfg, seed, t), a))
                .collect::<Result<Vec<_>, _>>()?;
            let min_rank_p = reports.iter().map(|r| r.rank_p).min().unwrap_or(0);
            let min_rank_q = reports.iter().map(|r| r.rank_q).min().unwrap_or(0);
            let max_residual_a = reports.iter().map(|r| r.residual_a).fold(0.0, f64::max);
            let max_residual_b = reports.iter().map(|r| r.residual_b).fold(0.0, f64::max);
            let (required_rank_p, required_rank_q) = (ld * a.nd, lu * a.nu);
            out.push(Lemma1Summary {
                ld,
                lu,
                alloc: (a.nd, a.nu),
                draws,
                min_rank_p,
                required_rank_p,
                min_rank_q,
                required_rank_q,
                max_residual_a,
                max_residual_b,
                passed: min_rank_p == required_rank_p
                    && min_rank_q >= required_rank_q
                    && max_residual_a <= TOLERANCE
                    && max_residual_b <= TOLERANCE,
            });
        }
    }
    Ok(out)
}
