//! Center-cell sum rates in the seven-cell wrap-around layout.
//!
//! Each cell holds `J` DL and `J` UL users dropped uniformly. A link over
//! distance `d` has gain `CN(0,1) / d^{α/2}`, and the power at unit distance
//! is `P_ref`. Every cell runs the same system on the same mode schedule and
//! schedules its own users. Rates are computed at the center cell with all
//! other-cell signals treated as Gaussian noise.
//!
//! In FD systems the center DL users also hear every UL user, and the center
//! BS also hears the other BSs. Each BS-to-BS link has one i.i.d. fading
//! gain per (transmit mode, receive mode) pair. HD cells are synchronized:
//! DL users hear only BSs and the BS hears only UL users.
//!
//! Positions and fading gains come from streams keyed by the object they
//! describe, so a user keeps its position and gains when `J` grows.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dof::best_allocation;
use crate::error::SchemeError;
use crate::linalg::C64;
use crate::network::{ChannelRealization, NetworkConfig};
use crate::no_csit::build_no_csit;
use crate::partial_csit::build_partial_csit;
use crate::rng::{complex_gaussian, keyed_rng, Stream};

use super::fd::{center_rates, CenterLinks, FdCellTx};
use super::geometry::{cell_centers, drop_user, link_distance, Point, NUM_CELLS};
use super::scheduler::Scheduler;
use super::single_cell::{best_receive_mode, scalar_sic_rates};
use super::stats::{paired_difference, summarize};
use super::{db_to_linear, with_retries, CsiModel, Duplex, RateError, System};

/// Largest supported `J`.
pub const MAX_USERS_PER_CELL: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticellScenario {
    pub cfg: NetworkConfig,
    /// DL users and UL users per cell.
    pub j_users: usize,
    /// Path-loss exponent.
    pub alpha_pl: f64,
    /// Power at unit distance over unit noise, in dB.
    pub p_ref_db: f64,
    pub scheduler: Scheduler,
    pub residual_si_power: f64,
    /// Number of independent drops.
    pub trials: usize,
    pub seed: u64,
}

impl MulticellScenario {
    pub fn validate(&self) -> Result<(), RateError> {
        self.cfg.validate()?;
        let cfg = self.cfg;
        if cfg.kd == 0 || cfg.ku == 0 {
            return Err(RateError::InvalidScenario(format!("{cfg} needs at least one DL and one UL user")));
        }
        if self.j_users < cfg.kd.max(cfg.ku) || self.j_users > MAX_USERS_PER_CELL {
            return Err(RateError::InvalidScenario(format!(
                "J = {} must lie in [max(Kd, Ku), {MAX_USERS_PER_CELL}] = [{}, {MAX_USERS_PER_CELL}]",
                self.j_users,
                cfg.kd.max(cfg.ku)
            )));
        }
        if !(self.alpha_pl > 0.0 && self.alpha_pl.is_finite()) {
            return Err(RateError::InvalidScenario(format!("path-loss exponent must be positive, got {}", self.alpha_pl)));
        }
        if !self.p_ref_db.is_finite() {
            return Err(RateError::InvalidScenario(format!("p_ref_db must be finite, got {}", self.p_ref_db)));
        }
        if !(self.residual_si_power >= 0.0 && self.residual_si_power.is_finite()) {
            return Err(RateError::InvalidScenario(format!(
                "residual_si_power must be finite and >= 0, got {}",
                self.residual_si_power
            )));
        }
        if self.trials == 0 {
            return Err(RateError::InvalidScenario("trials must be >= 1".into()));
        }
        if best_allocation(&cfg).map_err(SchemeError::from)?.is_none() {
            return Err(RateError::InvalidScenario(format!("{cfg} admits no partial-CSIT symbol allocation")));
        }
        Ok(())
    }

    pub fn with_j(&self, j_users: usize) -> Self {
        MulticellScenario { j_users, ..self.clone() }
    }
}

#[derive(Clone, Copy)]
#[repr(u64)]
enum Object {
    DlUser = 1,
    UlUser = 2,
    DlLink = 3,
    UlLink = 4,
    CrossLink = 5,
    BsLink = 6,
    HdMode = 7,
}

/// Packs an object kind and up to two (cell, user) pairs into a stream key.
fn key(kind: Object, a: (usize, usize), b: (usize, usize)) -> u64 {
    ((kind as u64) << 60) | ((a.0 as u64) << 56) | ((a.1 as u64) << 36) | ((b.0 as u64) << 32) | ((b.1 as u64) << 12)
}

/// One drop: user positions, with gains drawn on demand.
struct Drop<'a> {
    sc: &'a MulticellScenario,
    trial: u64,
    bs: [Point; NUM_CELLS],
    dl_pos: Vec<Vec<Point>>,
    ul_pos: Vec<Vec<Point>>,
}

impl<'a> Drop<'a> {
    fn new(sc: &'a MulticellScenario, trial: u64) -> Self {
        let bs = cell_centers();
        let place = |kind: Object| -> Vec<Vec<Point>> {
            (0..NUM_CELLS)
                .map(|c| {
                    (0..sc.j_users)
                        .map(|u| drop_user(&mut keyed_rng(sc.seed, trial, Stream::Placement, key(kind, (c, u), (0, 0))), bs[c]))
                        .collect()
                })
                .collect()
        };
        Drop { sc, trial, bs, dl_pos: place(Object::DlUser), ul_pos: place(Object::UlUser) }
    }

    fn fading(&self, k: u64, n: usize, distance: f64) -> Vec<C64> {
        let mut rng = keyed_rng(self.sc.seed, self.trial, Stream::InterCell, k);
        let scale = distance.powf(-self.sc.alpha_pl / 2.0);
        (0..n).map(|_| complex_gaussian(&mut rng) * scale).collect()
    }

    /// Gains from BS `bs` to DL user `u` of cell `c`, one per transmit mode.
    fn dl(&self, c: usize, u: usize, bs: usize) -> Vec<C64> {
        let d = link_distance(self.dl_pos[c][u], self.bs[bs]);
        self.fading(key(Object::DlLink, (c, u), (bs, 0)), self.sc.cfg.md, d)
    }

    /// Gains from UL user `u` of cell `c` to BS `bs`, one per receive mode.
    fn ul(&self, c: usize, u: usize, bs: usize) -> Vec<C64> {
        let d = link_distance(self.ul_pos[c][u], self.bs[bs]);
        self.fading(key(Object::UlLink, (c, u), (bs, 0)), self.sc.cfg.mu, d)
    }

    /// Gain from UL user `(uc, uu)` to DL user `(dc, du)`.
    fn cross(&self, dc: usize, du: usize, uc: usize, uu: usize) -> C64 {
        let d = link_distance(self.dl_pos[dc][du], self.ul_pos[uc][uu]);
        self.fading(key(Object::CrossLink, (dc, du), (uc, uu)), 1, d)[0]
    }

    /// `[transmit mode][receive mode]` gains from BS `tx` to BS `rx`.
    fn bs_link(&self, tx: usize, rx: usize) -> Vec<Vec<C64>> {
        let cfg = self.sc.cfg;
        let d = link_distance(self.bs[tx], self.bs[rx]);
        let flat = self.fading(key(Object::BsLink, (tx, 0), (rx, 0)), cfg.md * cfg.mu, d);
        flat.chunks(cfg.mu).map(<[C64]>::to_vec).collect()
    }

    fn dl_metrics(&self, c: usize) -> Vec<f64> {
        (0..self.sc.j_users)
            .map(|u| self.dl(c, u, c).iter().map(|h| h.norm_sqr()).fold(0.0, f64::max))
            .collect()
    }

    fn ul_metrics(&self, c: usize) -> Vec<f64> {
        (0..self.sc.j_users)
            .map(|u| self.ul(c, u, c).iter().map(|f| f.norm_sqr()).fold(0.0, f64::max))
            .collect()
    }
}

/// Scheduled users of one cell.
struct CellPick {
    dl: Vec<usize>,
    ul: Vec<usize>,
}

fn pick(drop: &Drop<'_>, schedule_trial: u64, dl_count: usize) -> Vec<CellPick> {
    let sc = drop.sc;
    (0..NUM_CELLS)
        .map(|c| CellPick {
            dl: sc.scheduler.select(&drop.dl_metrics(c), dl_count, schedule_trial),
            ul: sc.scheduler.select(&drop.ul_metrics(c), sc.cfg.ku, schedule_trial),
        })
        .collect()
}

/// FD transmit side and center-cell links for `system`.
fn fd_layout(drop: &Drop<'_>, system: System, schedule_trial: u64) -> Result<(Vec<FdCellTx>, CenterLinks), RateError> {
    let sc = drop.sc;
    let cfg = sc.cfg;
    let power = db_to_linear(sc.p_ref_db);
    let dl_count = match system.model() {
        CsiModel::PartialCsit => cfg.kd,
        CsiModel::NoCsit => 1,
    };
    let picks = pick(drop, schedule_trial, dl_count);
    let mut cells = Vec::with_capacity(NUM_CELLS);
    for (c, p) in picks.iter().enumerate() {
        let tx = match system.model() {
            CsiModel::PartialCsit => {
                let cr = ChannelRealization::from_gains(
                    cfg,
                    p.dl.iter().map(|&u| drop.dl(c, u, c)).collect(),
                    p.ul.iter().map(|&u| drop.ul(c, u, c)).collect(),
                    p.dl.iter().map(|&i| p.ul.iter().map(|&j| drop.cross(c, i, c, j)).collect()).collect(),
                )?;
                let (alloc, _) = best_allocation(&cfg).map_err(SchemeError::from)?.expect("validated");
                FdCellTx::partial(&build_partial_csit(&cfg, &cr.bs_full_csi(), alloc)?, power)
            }
            CsiModel::NoCsit => {
                let one = NetworkConfig { kd: 1, ..cfg };
                FdCellTx::no_csit(&build_no_csit(&one)?, power)
            }
        };
        cells.push(tx);
    }
    let served = &picks[0].dl[..cells[0].dl_precoders.len()];
    let links = CenterLinks {
        dl: served.iter().map(|&i| (0..NUM_CELLS).map(|c| drop.dl(0, i, c)).collect()).collect(),
        cross: served
            .iter()
            .map(|&i| (0..NUM_CELLS).map(|c| picks[c].ul.iter().map(|&j| drop.cross(0, i, c, j)).collect()).collect())
            .collect(),
        ul: (0..NUM_CELLS).map(|c| picks[c].ul.iter().map(|&j| drop.ul(c, j, 0)).collect()).collect(),
        bs: (0..NUM_CELLS).map(|c| if c == 0 { Vec::new() } else { drop.bs_link(c, 0) }).collect(),
    };
    Ok((cells, links))
}

fn fd_sum_rate(drop: &Drop<'_>, system: System, schedule_trial: u64) -> Result<f64, RateError> {
    let (cells, links) = fd_layout(drop, system, schedule_trial)?;
    let r = center_rates(&cells, &links, drop.sc.residual_si_power, true)?;
    Ok(r.dl.iter().chain(&r.ul).sum())
}

fn hd_sum_rate(drop: &Drop<'_>, model: CsiModel, schedule_trial: u64) -> f64 {
    let sc = drop.sc;
    let power = db_to_linear(sc.p_ref_db);
    let picks = pick(drop, schedule_trial, 1);

    // DL half: every BS serves its scheduled user on one transmit mode
    let modes: Vec<usize> = (0..NUM_CELLS)
        .map(|c| match model {
            CsiModel::PartialCsit => {
                let h = drop.dl(c, picks[c].dl[0], c);
                (0..h.len()).fold(0, |b, k| if h[k].norm_sqr() > h[b].norm_sqr() { k } else { b })
            }
            CsiModel::NoCsit => {
                keyed_rng(sc.seed, drop.trial, Stream::Selection, key(Object::HdMode, (c, 0), (0, 0))).random_range(0..sc.cfg.md)
            }
        })
        .collect();
    let user = picks[0].dl[0];
    let interference: f64 = (1..NUM_CELLS).map(|c| power * drop.dl(0, user, c)[modes[c]].norm_sqr()).sum();
    let dl = 0.5 * (1.0 + power * drop.dl(0, user, 0)[modes[0]].norm_sqr() / (1.0 + interference)).log2();

    // UL half: all scheduled UL users transmit; the center BS uses its best mode
    let own: Vec<Vec<C64>> = picks[0].ul.iter().map(|&j| drop.ul(0, j, 0)).collect();
    let l = best_receive_mode(&own, sc.cfg.mu);
    let interference: f64 = (1..NUM_CELLS)
        .flat_map(|c| picks[c].ul.iter().map(move |&j| (c, j)))
        .map(|(c, j)| power * drop.ul(c, j, 0)[l].norm_sqr())
        .sum();
    let snrs: Vec<f64> = own.iter().map(|f| power * f[l].norm_sqr() / (1.0 + interference)).collect();
    dl + 0.5 * scalar_sic_rates(&snrs).iter().sum::<f64>()
}

fn drop_rates(sc: &MulticellScenario, systems: &[System], trial: u64) -> Result<Vec<f64>, RateError> {
    with_retries(trial, |t| {
        let drop = Drop::new(sc, t);
        systems
            .iter()
            .map(|&s| match s.duplex() {
                Duplex::FdProposed => fd_sum_rate(&drop, s, trial),
                Duplex::HdTdd => Ok(hd_sum_rate(&drop, s.model(), trial)),
            })
            .collect()
    })
}

/// Center-cell sum rate per drop, indexed `[system][drop]`. All systems see
/// the same drops.
pub fn multicell_samples(sc: &MulticellScenario, systems: &[System]) -> Result<Vec<Vec<f64>>, RateError> {
    sc.validate()?;
    let per_drop: Vec<Vec<f64>> = (0..sc.trials as u64)
        .into_par_iter()
        .map(|t| drop_rates(sc, systems, t))
        .collect::<Result<_, _>>()?;
    Ok((0..systems.len()).map(|s| per_drop.iter().map(|row| row[s]).collect()).collect())
}

/// Largest change in any center DL rate of an FD system when the UL-to-DL
/// interference terms are dropped from the DL covariance.
pub fn fd_cross_interference_effect(sc: &MulticellScenario, system: System, trial: u64) -> Result<f64, RateError> {
    sc.validate()?;
    if system.duplex() != Duplex::FdProposed {
        return Err(RateError::InvalidScenario(format!("{system} is not an FD system")));
    }
    let drop = Drop::new(sc, trial);
    let (cells, links) = fd_layout(&drop, system, trial)?;
    let with = center_rates(&cells, &links, sc.residual_si_power, true)?;
    let without = center_rates(&cells, &links, sc.residual_si_power, false)?;
    Ok(with.dl.iter().zip(&without.dl).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// One output row of a multicell sweep. `series` is a system name, or
/// `gap-partial` / `gap-no-csit` for the per-drop FD minus HD difference
/// under one CSI model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MulticellRow {
    pub j_users: usize,
    pub scheduler: Scheduler,
    pub series: String,
    pub mean_sum_rate: f64,
    pub stderr: f64,
    pub drops: usize,
}

/// Name of the FD minus HD series for `model`.
pub fn gap_series(model: CsiModel) -> &'static str {
    match model {
        CsiModel::PartialCsit => "gap-partial",
        CsiModel::NoCsit => "gap-no-csit",
    }
}

/// Rows per `J` (J-major): one per system, then one per CSI model whose FD
/// and HD systems are both requested.
pub fn multicell_sweep(base: &MulticellScenario, j_grid: &[usize], systems: &[System]) -> Result<Vec<MulticellRow>, RateError> {
    let mut rows = Vec::new();
    for &j in j_grid {
        let sc = base.with_j(j);
        let samples = multicell_samples(&sc, systems)?;
        let row = |series: String, s: super::Summary| MulticellRow {
            j_users: j,
            scheduler: sc.scheduler,
            series,
            mean_sum_rate: s.mean,
            stderr: s.stderr,
            drops: s.count,
        };
        for (&system, xs) in systems.iter().zip(&samples) {
            rows.push(row(system.name().to_string(), summarize(xs)));
        }
        for model in [CsiModel::PartialCsit, CsiModel::NoCsit] {
            let fd = systems.iter().position(|&s| s == System::new(Duplex::FdProposed, model));
            let hd = systems.iter().position(|&s| s == System::new(Duplex::HdTdd, model));
            if let (Some(f), Some(h)) = (fd, hd) {
                rows.push(row(gap_series(model).to_string(), paired_difference(&samples[f], &samples[h])));
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(j: usize, scheduler: Scheduler) -> MulticellScenario {
        MulticellScenario {
            cfg: NetworkConfig::symmetric(2).unwrap(),
            j_users: j,
            alpha_pl: 3.0,
            p_ref_db: 10.0,
            scheduler,
            residual_si_power: 1.0,
            trials: 8,
            seed: 42,
        }
    }

    #[test]
    fn validation() {
        assert!(scenario(2, Scheduler::MaxSnr).validate().is_ok());
        assert!(scenario(1, Scheduler::MaxSnr).validate().is_err());
        let mut sc = scenario(2, Scheduler::MaxSnr);
        sc.alpha_pl = 0.0;
        assert!(sc.validate().is_err());
        sc.alpha_pl = 3.0;
        sc.cfg = NetworkConfig::symmetric(1).unwrap();
        assert!(matches!(sc.validate(), Err(RateError::InvalidScenario(_))));
    }

    #[test]
    fn schedulers_coincide_for_fd_partial_without_choice() {
        let a = multicell_samples(&scenario(2, Scheduler::RoundRobin), &[System::FdPartial]).unwrap();
        let b = multicell_samples(&scenario(2, Scheduler::MaxSnr), &[System::FdPartial]).unwrap();
        for (x, y) in a[0].iter().zip(&b[0]) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn user_to_user_interference_is_aligned_away() {
        for system in [System::FdPartial, System::FdNoCsit] {
            for t in 0..5 {
                let effect = fd_cross_interference_effect(&scenario(4, Scheduler::MaxSnr), system, t).unwrap();
                assert!(effect < 1e-9, "{system}: {effect}");
            }
        }
    }

    #[test]
    fn users_keep_their_draws_when_j_grows() {
        let sc2 = scenario(2, Scheduler::MaxSnr);
        let small = Drop::new(&sc2, 3);
        let sc4 = scenario(4, Scheduler::MaxSnr);
        let big = Drop::new(&sc4, 3);
        for c in 0..NUM_CELLS {
            assert_eq!(small.dl_pos[c][..], big.dl_pos[c][..2]);
            assert_eq!(small.dl(c, 1, 0), big.dl(c, 1, 0));
        }
    }

    #[test]
    fn sweep_rows_and_determinism() {
        let sc = scenario(2, Scheduler::RoundRobin);
        let a = multicell_sweep(&sc, &[2, 3], &System::ALL).unwrap();
        assert_eq!(a.len(), 12);
        assert_eq!(a, multicell_sweep(&sc, &[2, 3], &System::ALL).unwrap());
        assert!(a.iter().all(|r| r.mean_sum_rate.is_finite()));
        let fd = &a[0];
        let hd = &a[2];
        let gap = &a[4];
        assert_eq!(gap.series, "gap-partial");
        assert!((gap.mean_sum_rate - (fd.mean_sum_rate - hd.mean_sum_rate)).abs() < 1e-9);
    }

    #[test]
    fn max_snr_beats_round_robin_on_average() {
        let systems = [System::HdPartial];
        let mut sc = scenario(6, Scheduler::RoundRobin);
        sc.trials = 64;
        let rr = summarize(&multicell_samples(&sc, &systems).unwrap()[0]).mean;
        sc.scheduler = Scheduler::MaxSnr;
        let ms = summarize(&multicell_samples(&sc, &systems).unwrap()[0]).mean;
        assert!(ms > rr);
    }
}
