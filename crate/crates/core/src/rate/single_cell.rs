//! Single-cell sum rates with i.i.d. CN(0,1) gains and sweeps over the SNR.
//!
//! Every system and every SNR point sees the same channel draw for a given
//! trial index, so differences between systems and between SNR points are
//! free of channel-sampling noise.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dof::best_allocation;
use crate::network::{sample_channels_for_trial, ChannelRealization, NetworkConfig};
use crate::no_csit::build_no_csit;
use crate::partial_csit::build_partial_csit;
use crate::rng::{stream_rng, Stream};

use super::fd::{center_rates, CenterLinks, FdCellTx};
use super::stats::{fit_slope, summarize};
use super::{db_to_linear, with_retries, CsiModel, Duplex, RateError, RateReport, ReportMetadata, System};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleCellScenario {
    pub cfg: NetworkConfig,
    pub model: CsiModel,
    pub duplex: Duplex,
    /// Transmit power over unit noise, in dB.
    pub snr_db: f64,
    /// Residual self-interference power at the BS receiver, linear, relative
    /// to the noise.
    pub residual_si_power: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SingleCellScenario {
    pub fn validate(&self) -> Result<(), RateError> {
        self.cfg.validate()?;
        if self.cfg.kd == 0 || self.cfg.ku == 0 {
            return Err(RateError::InvalidScenario(format!("{} needs at least one DL and one UL user", self.cfg)));
        }
        if self.trials == 0 {
            return Err(RateError::InvalidScenario("trials must be >= 1".into()));
        }
        if !(self.residual_si_power >= 0.0 && self.residual_si_power.is_finite()) {
            return Err(RateError::InvalidScenario(format!(
                "residual_si_power must be finite and >= 0, got {}",
                self.residual_si_power
            )));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::INFINITY {
            return Err(RateError::InvalidScenario(format!("snr_db must be a number below +inf, got {}", self.snr_db)));
        }
        Ok(())
    }

    pub fn system(&self) -> System {
        System::new(self.duplex, self.model)
    }

    pub fn with_system(&self, system: System) -> Self {
        SingleCellScenario { model: system.model(), duplex: system.duplex(), ..self.clone() }
    }

    pub fn with_snr_db(&self, snr_db: f64) -> Self {
        SingleCellScenario { snr_db, ..self.clone() }
    }

    fn metadata(&self, trials: usize) -> ReportMetadata {
        ReportMetadata {
            system: self.system(),
            config: self.cfg,
            snr_db: self.snr_db,
            residual_si_power: self.residual_si_power,
            seed: self.seed,
            trials,
        }
    }

    fn check_realization(&self, cr: &ChannelRealization) -> Result<(), RateError> {
        if cr.config() != self.cfg {
            return Err(RateError::InvalidScenario(format!(
                "channel realization is for {}, scenario is {}",
                cr.config(),
                self.cfg
            )));
        }
        Ok(())
    }
}

fn single_cell_links(cr: &ChannelRealization, served_dl: usize) -> CenterLinks {
    let cfg = cr.config();
    CenterLinks {
        dl: (0..served_dl).map(|i| vec![(0..cfg.md).map(|k| cr.h(i, k)).collect()]).collect(),
        cross: (0..served_dl).map(|i| vec![(0..cfg.ku).map(|j| cr.g(i, j)).collect()]).collect(),
        ul: vec![(0..cfg.ku).map(|j| (0..cfg.mu).map(|l| cr.f(j, l)).collect()).collect()],
        bs: vec![Vec::new()],
    }
}

fn pad(mut rates: Vec<f64>, len: usize) -> Vec<f64> {
    rates.resize(len, 0.0);
    rates
}

/// Rates of the FD alignment scheme for one channel draw.
///
/// When no symbol allocation exists (`L_d = L_u = 1`) the partial-CSIT BS
/// falls back to single-user DL transmission to its strongest (user, mode).
pub fn fd_rate_single_trial(scenario: &SingleCellScenario, cr: &ChannelRealization) -> Result<RateReport, RateError> {
    scenario.validate()?;
    scenario.check_realization(cr)?;
    let cfg = scenario.cfg;
    let power = db_to_linear(scenario.snr_db);
    let tx = match scenario.model {
        CsiModel::PartialCsit => match best_allocation(&cfg).map_err(crate::error::SchemeError::from)? {
            Some((alloc, _)) => FdCellTx::partial(&build_partial_csit(&cfg, &cr.bs_full_csi(), alloc)?, power),
            None => {
                let (i, k) = strongest_dl(cr);
                let mut dl = vec![0.0; cfg.kd];
                dl[i] = (1.0 + power * cr.h(i, k).norm_sqr()).log2();
                return Ok(RateReport::new(dl, vec![0.0; cfg.ku], scenario.metadata(1)));
            }
        },
        CsiModel::NoCsit => FdCellTx::no_csit(&build_no_csit(&cfg)?, power),
    };
    let links = single_cell_links(cr, tx.dl_precoders.len());
    let rates = center_rates(&[tx], &links, scenario.residual_si_power, true)?;
    Ok(RateReport::new(pad(rates.dl, cfg.kd), rates.ul, scenario.metadata(1)))
}

/// DL user and transmit mode with the largest `|h_i(k)|`.
fn strongest_dl(cr: &ChannelRealization) -> (usize, usize) {
    let cfg = cr.config();
    let mut best = (0, 0);
    for i in 0..cfg.kd {
        for k in 0..cfg.md {
            if cr.h(i, k).norm_sqr() > cr.h(best.0, best.1).norm_sqr() {
                best = (i, k);
            }
        }
    }
    best
}

/// Receive mode maximizing `Σ_j |f_j(l)|²`.
pub(crate) fn best_receive_mode(gains: &[Vec<crate::linalg::C64>], modes: usize) -> usize {
    let energy = |l: usize| gains.iter().map(|f| f[l].norm_sqr()).sum::<f64>();
    (0..modes).fold(0, |best, l| if energy(l) > energy(best) { l } else { best })
}

/// Successive-decoding split of the single-antenna MAC sum rate
/// `log₂(1 + Σ_j snr_j)`.
pub(crate) fn scalar_sic_rates(snrs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; snrs.len()];
    let mut tail = 0.0;
    for j in (0..snrs.len()).rev() {
        let next = tail + snrs[j];
        out[j] = (1.0 + next).log2() - (1.0 + tail).log2();
        tail = next;
    }
    out
}

/// Rates of the HD TDD baseline for one channel draw, trial 0.
pub fn hd_rate_single_trial(scenario: &SingleCellScenario, cr: &ChannelRealization) -> Result<RateReport, RateError> {
    hd_rate_for_trial(scenario, cr, 0)
}

/// HD rates; the no-CSIT random (user, mode) pick comes from the selection
/// stream of `trial`.
pub fn hd_rate_for_trial(scenario: &SingleCellScenario, cr: &ChannelRealization, trial: u64) -> Result<RateReport, RateError> {
    scenario.validate()?;
    scenario.check_realization(cr)?;
    let cfg = scenario.cfg;
    let power = db_to_linear(scenario.snr_db);
    let (i, k) = match scenario.model {
        CsiModel::PartialCsit => strongest_dl(cr),
        CsiModel::NoCsit => {
            let mut rng = stream_rng(scenario.seed, trial, Stream::Selection);
            (rng.random_range(0..cfg.kd), rng.random_range(0..cfg.md))
        }
    };
    let mut dl = vec![0.0; cfg.kd];
    dl[i] = 0.5 * (1.0 + power * cr.h(i, k).norm_sqr()).log2();

    let f: Vec<Vec<_>> = (0..cfg.ku).map(|j| (0..cfg.mu).map(|l| cr.f(j, l)).collect()).collect();
    let l = best_receive_mode(&f, cfg.mu);
    let snrs: Vec<f64> = f.iter().map(|fj| power * fj[l].norm_sqr()).collect();
    let ul = scalar_sic_rates(&snrs).into_iter().map(|r| 0.5 * r).collect();
    Ok(RateReport::new(dl, ul, scenario.metadata(1)))
}

/// Rates of `scenario`'s system on the channels of Monte Carlo trial
/// `trial`, redrawing on degenerate channels up to the retry budget.
pub fn rate_for_trial(scenario: &SingleCellScenario, trial: u64) -> Result<RateReport, RateError> {
    with_retries(trial, |t| {
        let cr = sample_channels_for_trial(scenario.cfg, scenario.seed, t);
        match scenario.duplex {
            Duplex::FdProposed => fd_rate_single_trial(scenario, &cr),
            Duplex::HdTdd => hd_rate_for_trial(scenario, &cr, t),
        }
    })
}

/// Sum rates per trial at one SNR, indexed `[system][trial]`.
pub fn single_cell_samples(base: &SingleCellScenario, snr_db: f64, systems: &[System]) -> Result<Vec<Vec<f64>>, RateError> {
    base.validate()?;
    let scenario = base.with_snr_db(snr_db);
    scenario.validate()?;
    let per_trial: Vec<Vec<f64>> = (0..base.trials as u64)
        .into_par_iter()
        .map(|t| {
            systems
                .iter()
                .map(|&s| rate_for_trial(&scenario.with_system(s), t).map(|r| r.sum_rate))
                .collect::<Result<Vec<f64>, RateError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok((0..systems.len()).map(|s| per_trial.iter().map(|row| row[s]).collect()).collect())
}

/// One output row of a single-cell sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub system: System,
    pub mean_sum_rate: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Mean sum rate and standard error per (SNR, system), SNR-major.
pub fn single_cell_sweep(base: &SingleCellScenario, snr_grid: &[f64], systems: &[System]) -> Result<Vec<SweepRow>, RateError> {
    let mut rows = Vec::with_capacity(snr_grid.len() * systems.len());
    for &snr_db in snr_grid {
        let samples = single_cell_samples(base, snr_db, systems)?;
        for (&system, xs) in systems.iter().zip(&samples) {
            let s = summarize(xs);
            rows.push(SweepRow { snr_db, system, mean_sum_rate: s.mean, stderr: s.stderr, trials: s.count });
        }
    }
    Ok(rows)
}

/// Least-squares slope of mean sum rate against `log₂ P` for `system`'s rows.
pub fn high_snr_slope(rows: &[SweepRow], system: System) -> f64 {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.system == system)
        .map(|r| (r.snr_db / 10.0 * 10f64.log2(), r.mean_sum_rate))
        .unzip();
    fit_slope(&xs, &ys)
}
