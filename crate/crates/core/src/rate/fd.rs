//! FD alignment rates at a center cell, optionally surrounded by cells that
//! run the same scheme on the same mode schedule.

use crate::linalg::{hstack, log2_det_snr, ComplexMatrix, C64};
use crate::network::ModeSchedule;
use crate::no_csit::NoCsitPrecoders;
use crate::partial_csit::PartialCsitPrecoders;

use super::RateError;

/// One cell's FD transmit side over a block. Precoders include the symbol
/// amplitude, so unit-variance symbols give the scheme's power.
#[derive(Debug, Clone)]
pub(crate) struct FdCellTx {
    pub schedule: ModeSchedule,
    /// DL receive filter, orthonormal columns.
    pub dl_filter: ComplexMatrix,
    /// Per served DL user, `N × streams`.
    pub dl_precoders: Vec<ComplexMatrix>,
    /// Precoder shared by every UL user, `N × streams`.
    pub ul_precoder: ComplexMatrix,
}

fn scaled(m: &ComplexMatrix, amplitude: f64) -> ComplexMatrix {
    m * C64::new(amplitude, 0.0)
}

impl FdCellTx {
    pub fn partial(p: &PartialCsitPrecoders, power: f64) -> Self {
        let (var_d, var_u) = p.symbol_variances(power);
        FdCellTx {
            schedule: p.schedule.clone(),
            dl_filter: p.w3.clone(),
            dl_precoders: p.u.iter().map(|u| scaled(u, var_d.sqrt())).collect(),
            ul_precoder: scaled(&p.v, var_u.sqrt()),
        }
    }

    pub fn no_csit(p: &NoCsitPrecoders, power: f64) -> Self {
        let (var_d, var_u) = p.symbol_variances(power);
        let w2 = ComplexMatrix::from_column_slice(p.block_len(), 1, p.w2.as_slice());
        FdCellTx {
            schedule: p.schedule.clone(),
            dl_filter: p.w1.clone(),
            dl_precoders: vec![scaled(&p.w1, var_d.sqrt())],
            ul_precoder: scaled(&w2, var_u.sqrt()),
        }
    }

    pub fn block_len(&self) -> usize {
        self.schedule.len()
    }

    fn all_dl(&self) -> ComplexMatrix {
        hstack(&self.dl_precoders).expect("DL precoders share the block length")
    }
}

/// Channel gains seen from the center cell (index 0).
#[derive(Debug, Clone, Default)]
pub(crate) struct CenterLinks {
    /// `[served center DL user][cell][transmit mode of that cell's BS]`.
    pub dl: Vec<Vec<Vec<C64>>>,
    /// `[served center DL user][cell][scheduled UL user of that cell]`.
    pub cross: Vec<Vec<Vec<C64>>>,
    /// `[cell][scheduled UL user][receive mode of the center BS]`.
    pub ul: Vec<Vec<Vec<C64>>>,
    /// `[cell][transmit mode of that BS][receive mode of the center BS]`;
    /// the center entry is unused.
    pub bs: Vec<Vec<Vec<C64>>>,
}

/// Per-user rates of the center cell, bits per slot.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FdRates {
    pub dl: Vec<f64>,
    pub ul: Vec<f64>,
}

/// Multiplies row `t` of `m` by `gain(t)`.
fn per_slot(m: &ComplexMatrix, gain: impl Fn(usize) -> C64) -> ComplexMatrix {
    let mut out = m.clone();
    for (t, mut row) in out.row_iter_mut().enumerate() {
        row *= gain(t);
    }
    out
}

fn add_outer(acc: &mut ComplexMatrix, x: &ComplexMatrix) {
    *acc += x * x.adjoint();
}

/// Successive-decoding split of the joint rate `log det(I + N⁻¹ Σ S_j S_jᴴ)`.
pub(crate) fn sic_rates(signals: &[ComplexMatrix], noise: &ComplexMatrix) -> Result<Vec<f64>, RateError> {
    let mut out = vec![0.0; signals.len()];
    let mut tail = 0.0;
    for j in (0..signals.len()).rev() {
        let total = log2_det_snr(&hstack(&signals[j..])?, noise)?;
        out[j] = (total - tail).max(0.0);
        tail = total;
    }
    Ok(out)
}

/// Rates of the center cell `cells[0]`. With `include_cross = false` the
/// UL-to-DL interference terms are left out of the DL covariance.
pub(crate) fn center_rates(
    cells: &[FdCellTx],
    links: &CenterLinks,
    residual_si: f64,
    include_cross: bool,
) -> Result<FdRates, RateError> {
    let center = &cells[0];
    let n = center.block_len();
    let alpha = center.schedule.alpha();
    let beta = center.schedule.beta();
    let filter_h = center.dl_filter.adjoint();
    let r = filter_h.nrows();
    let all_dl: Vec<ComplexMatrix> = cells.iter().map(FdCellTx::all_dl).collect();

    let mut dl = Vec::with_capacity(center.dl_precoders.len());
    for (i, own) in center.dl_precoders.iter().enumerate() {
        let gains = &links.dl[i];
        let desired = &filter_h * per_slot(own, |t| gains[0][alpha[t]]);
        let mut noise = ComplexMatrix::identity(r, r);
        for (k, other) in center.dl_precoders.iter().enumerate() {
            if k != i {
                add_outer(&mut noise, &(&filter_h * per_slot(other, |t| gains[0][alpha[t]])));
            }
        }
        for (c, precoders) in all_dl.iter().enumerate().skip(1) {
            add_outer(&mut noise, &(&filter_h * per_slot(precoders, |t| gains[c][alpha[t]])));
        }
        if include_cross {
            for (c, cell) in cells.iter().enumerate() {
                for &g in &links.cross[i][c] {
                    add_outer(&mut noise, &(&filter_h * &cell.ul_precoder * g));
                }
            }
        }
        dl.push(log2_det_snr(&desired, &noise)? / n as f64);
    }

    let signals: Vec<ComplexMatrix> = links.ul[0]
        .iter()
        .map(|f| per_slot(&center.ul_precoder, |t| f[beta[t]]))
        .collect();
    let mut noise = ComplexMatrix::identity(n, n) * C64::new(1.0 + residual_si, 0.0);
    for (c, cell) in cells.iter().enumerate().skip(1) {
        for f in &links.ul[c] {
            add_outer(&mut noise, &per_slot(&cell.ul_precoder, |t| f[beta[t]]));
        }
        let b = &links.bs[c];
        add_outer(&mut noise, &per_slot(&all_dl[c], |t| b[alpha[t]][beta[t]]));
    }
    let ul = sic_rates(&signals, &noise)?.into_iter().map(|x| x / n as f64).collect();
    Ok(FdRates { dl, ul })
}
