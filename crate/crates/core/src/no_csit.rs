//! Blind alignment without transmit CSI.
//!
//! Over a block of `L_u` slots the BS keeps its transmit mode fixed and steps
//! its receive mode through `1, …, L_u`. The DL precoder `W1` is the first
//! `L_u − 1` columns of the `L_u`-point IDFT matrix and every UL user sends one
//! symbol along the last column `w2`. Because the transmit mode never changes,
//! DL user 1 sees the UL users only along `w2`, which `W1ᴴ` removes; the BS
//! sees `L_u` distinct gains per UL user and separates `L_u` UL streams. The
//! block carries `L_u − 1` DL symbols and `L_u` UL streams, i.e. sum DoF
//! `2 − 1/L_u`.
//!
//! Only DL user 1 (index 0) is served.

use crate::error::SchemeError;
use crate::linalg::{idft_matrix, least_squares, numerical_rank, ComplexMatrix, ComplexVector, C64};
use crate::network::{BsReceiveCsi, DlUserCsi, ModeSchedule, NetworkConfig};

const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct NoCsitPrecoders {
    cfg: NetworkConfig,
    /// DL precoder, `L_u × (L_u − 1)`.
    pub w1: ComplexMatrix,
    /// Common UL precoder, length `L_u`.
    pub w2: ComplexVector,
    pub schedule: ModeSchedule,
}

pub fn build_no_csit(cfg: &NetworkConfig) -> Result<NoCsitPrecoders, SchemeError> {
    if cfg.kd == 0 || cfg.ku == 0 {
        return Err(SchemeError::UnsupportedTopology(*cfg));
    }
    let lu = cfg.lu();
    let omega = idft_matrix(lu)?;
    Ok(NoCsitPrecoders {
        cfg: *cfg,
        w1: omega.columns(0, lu - 1).into_owned(),
        w2: omega.column(lu - 1).into_owned(),
        schedule: ModeSchedule::fixed_tx_sweeping_rx(lu, 0),
    })
}

impl NoCsitPrecoders {
    pub fn config(&self) -> NetworkConfig {
        self.cfg
    }

    /// Block length `L_u`.
    pub fn block_len(&self) -> usize {
        self.w2.len()
    }

    /// DL symbols per block, `L_u − 1`.
    pub fn dl_streams(&self) -> usize {
        self.w1.ncols()
    }

    /// Per-symbol variances `(DL, UL)` that make each transmitter spend
    /// `L_u·P` over the block: `E‖s_d1‖² = L_u P` and `E|s_uj|² = L_u P`.
    pub fn symbol_variances(&self, power: f64) -> (f64, f64) {
        let n = self.block_len() as f64;
        let dl = if self.dl_streams() == 0 { 0.0 } else { n * power / self.dl_streams() as f64 };
        (dl, n * power)
    }

    /// `‖W1ᴴ w2‖`, zero up to rounding.
    pub fn alignment_residual(&self) -> f64 {
        (self.w1.adjoint() * &self.w2).norm()
    }

    /// The UL effective channel `R = [F_1(β̄) w2, …, F_{K_u}(β̄) w2]` (`L_u × K_u`).
    pub fn effective_ul_channel(&self, csi: &BsReceiveCsi<'_>) -> Result<ComplexMatrix, SchemeError> {
        let mut r = ComplexMatrix::zeros(self.block_len(), csi.num_users());
        for j in 0..csi.num_users() {
            let col = csi.extended(j, &self.schedule)? * &self.w2;
            r.set_column(j, &col);
        }
        Ok(r)
    }

    /// `x_d = W1 s_d1`, `x_uj = w2 s_uj`.
    pub fn encode(&self, s_d1: &ComplexVector, s_u: &[C64]) -> Result<(ComplexVector, Vec<ComplexVector>), SchemeError> {
        if s_d1.len() != self.dl_streams() {
            return Err(SchemeError::DimensionMismatch(format!(
                "expected {} DL symbols, got {}",
                self.dl_streams(),
                s_d1.len()
            )));
        }
        if s_u.len() != self.cfg.ku {
            return Err(SchemeError::DimensionMismatch(format!(
                "expected {} UL symbols, got {}",
                self.cfg.ku,
                s_u.len()
            )));
        }
        let x_d = &self.w1 * s_d1;
        let x_u = s_u.iter().map(|&s| &self.w2 * s).collect();
        Ok((x_d, x_u))
    }

    /// DL user 1's estimate `W1ᴴ y / h_1(α)`.
    pub fn decode_dl(&self, csi: &DlUserCsi<'_>, y_d1: &ComplexVector) -> Result<ComplexVector, SchemeError> {
        if y_d1.len() != self.block_len() {
            return Err(SchemeError::DimensionMismatch(format!(
                "expected a length-{} block, got {}",
                self.block_len(),
                y_d1.len()
            )));
        }
        let gain = csi.h(self.schedule.alpha()[0]);
        if gain.norm() < MIN_GAIN {
            return Err(SchemeError::DegenerateChannel(format!("|h_1| = {:e}", gain.norm())));
        }
        Ok(self.w1.adjoint() * y_d1 / gain)
    }

    /// Least-squares UL detection on `R`. With more UL users than receive
    /// modes the minimum-norm solution is returned and only `rank(R) = L_u`
    /// streams are resolvable.
    pub fn decode_ul(&self, csi: &BsReceiveCsi<'_>, y_u: &ComplexVector) -> Result<UlEstimate, SchemeError> {
        if y_u.len() != self.block_len() {
            return Err(SchemeError::DimensionMismatch(format!(
                "expected a length-{} block, got {}",
                self.block_len(),
                y_u.len()
            )));
        }
        let r = self.effective_ul_channel(csi)?;
        let needed = self.cfg.ku.min(self.block_len());
        let rank = numerical_rank(&r, None);
        if rank < needed {
            return Err(SchemeError::DegenerateChannel(format!("rank(R) = {rank} < {needed}")));
        }
        let (x, _) = least_squares(&r, &ComplexMatrix::from_column_slice(y_u.len(), 1, y_u.as_slice()))?;
        Ok(UlEstimate { symbols: x.column(0).into_owned(), resolvable_streams: rank })
    }
}

/// Stacked UL symbol estimates and the number of streams the BS can separate.
#[derive(Debug, Clone, PartialEq)]
pub struct UlEstimate {
    pub symbols: ComplexVector,
    pub resolvable_streams: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{apply_channel, sample_channels, sample_channels_for_trial};
    use crate::rng::{complex_gaussian, stream_rng, Stream};

    fn cfg(kd: usize, ku: usize, md: usize, mu: usize) -> NetworkConfig {
        NetworkConfig::new(kd, ku, md, mu).unwrap()
    }

    #[test]
    fn two_mode_precoders() {
        let p = build_no_csit(&cfg(2, 2, 2, 2)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(p.w1.shape(), (2, 1));
        assert!((p.w1[(0, 0)] - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((p.w1[(1, 0)] - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((p.w2[0] - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((p.w2[1] - C64::new(-s, 0.0)).norm() < 1e-15);
        assert_eq!(p.schedule.alpha(), &[0, 0]);
        assert_eq!(p.schedule.beta(), &[0, 1]);
    }

    #[test]
    fn single_receive_mode_degenerates_to_uplink_only() {
        let p = build_no_csit(&cfg(1, 3, 1, 1)).unwrap();
        assert_eq!(p.w1.shape(), (1, 0));
        assert_eq!(p.w2.len(), 1);
        assert!((p.w2[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(p.dl_streams(), 0);
    }

    #[test]
    fn rejects_one_sided_topologies() {
        assert!(matches!(build_no_csit(&cfg(0, 2, 1, 2)), Err(SchemeError::UnsupportedTopology(_))));
        assert!(matches!(build_no_csit(&cfg(2, 0, 2, 1)), Err(SchemeError::UnsupportedTopology(_))));
    }

    #[test]
    fn precoders_are_orthogonal_for_all_block_lengths() {
        for lu in 1..=36 {
            let p = build_no_csit(&cfg(1, lu, 1, lu)).unwrap();
            assert!(p.alignment_residual() <= 1e-12, "lu={lu}: {}", p.alignment_residual());
        }
    }

    #[test]
    fn encode_examples() {
        let p = build_no_csit(&cfg(1, 2, 1, 2)).unwrap();
        let (xd, xu) = p.encode(&ComplexVector::zeros(1), &[C64::new(0.0, 0.0); 2]).unwrap();
        assert!(xd.iter().all(|z| z.norm() == 0.0));
        assert!(xu.iter().flatten().all(|z| z.norm() == 0.0));

        let (xd, _) = p.encode(&ComplexVector::from_element(1, C64::new(2f64.sqrt(), 0.0)), &[C64::new(2f64.sqrt(), 0.0); 2]).unwrap();
        assert!((xd.norm_squared() - 2.0).abs() < 1e-12);

        let su = [C64::new(0.3, -1.0), C64::new(2.0, 0.5)];
        let (_, xu) = p.encode(&ComplexVector::zeros(1), &su).unwrap();
        for (x, s) in xu.iter().zip(su) {
            assert!((x / s - &p.w2).norm() < 1e-15);
        }
        assert!(p.encode(&ComplexVector::zeros(2), &su).is_err());
        assert!(p.encode(&ComplexVector::zeros(1), &su[..1]).is_err());
    }

    fn random_vec(rng: &mut impl rand::Rng, n: usize) -> ComplexVector {
        ComplexVector::from_fn(n, |_, _| complex_gaussian(rng))
    }

    #[test]
    fn noiseless_round_trip() {
        for lu in 2..=6 {
            let c = cfg(2, lu, 2, lu);
            let p = build_no_csit(&c).unwrap();
            for trial in 0..20 {
                let cr = sample_channels_for_trial(c, 100 + lu as u64, trial);
                let mut rng = stream_rng(5, trial, Stream::Symbols);
                let sd = random_vec(&mut rng, lu - 1);
                let su: Vec<C64> = (0..lu).map(|_| complex_gaussian(&mut rng)).collect();
                let (xd, xu) = p.encode(&sd, &su).unwrap();
                let zeros = ComplexVector::zeros(lu);
                let out = apply_channel(&cr, &p.schedule, &xd, &xu, &[zeros.clone(), zeros.clone()], &zeros).unwrap();
                let dl = p.decode_dl(&cr.dl_user_csi(0).unwrap(), &out.y_d[0]).unwrap();
                assert!((dl - &sd).norm() <= 1e-10 * sd.norm().max(1.0));
                let ul = p.decode_ul(&cr.bs_receive_csi(), &out.y_u).unwrap();
                let want = ComplexVector::from_column_slice(&su);
                assert!((ul.symbols - &want).norm() <= 1e-8 * want.norm());
                assert_eq!(ul.resolvable_streams, lu);
            }
        }
    }

    #[test]
    fn uplink_interference_is_nulled_at_dl_user() {
        let c = cfg(1, 3, 1, 3);
        let p = build_no_csit(&c).unwrap();
        let cr = sample_channels(c, 8);
        let zeros = ComplexVector::zeros(3);
        let su = [C64::new(4.0, 1.0), C64::new(-2.0, 3.0), C64::new(0.5, 0.5)];
        let (xd, xu) = p.encode(&ComplexVector::zeros(2), &su).unwrap();
        let out = apply_channel(&cr, &p.schedule, &xd, &xu, std::slice::from_ref(&zeros), &zeros).unwrap();
        let est = p.decode_dl(&cr.dl_user_csi(0).unwrap(), &out.y_d[0]).unwrap();
        assert!(est.norm() < 1e-12);
    }

    #[test]
    fn filtered_noise_stays_white() {
        let c = cfg(1, 3, 1, 3);
        let p = build_no_csit(&c).unwrap();
        let cr = sample_channels(c, 21);
        let h = cr.h(0, 0);
        let csi = cr.dl_user_csi(0).unwrap();
        let mut rng = stream_rng(9, 0, Stream::Symbols);
        let trials = 40_000;
        let mut cov = ComplexMatrix::zeros(2, 2);
        for _ in 0..trials {
            let est = p.decode_dl(&csi, &random_vec(&mut rng, 3)).unwrap();
            cov += &est * est.adjoint();
        }
        cov /= C64::new(trials as f64, 0.0);
        let want = ComplexMatrix::identity(2, 2) / C64::new(h.norm_sqr(), 0.0);
        let rel = (cov - &want).norm() / want.norm();
        assert!(rel < 0.03, "relative covariance error {rel}");
    }

    #[test]
    fn surplus_uplink_users_give_min_norm_solution() {
        let c = cfg(1, 4, 1, 2);
        let p = build_no_csit(&c).unwrap();
        let cr = sample_channels(c, 3);
        let zeros = ComplexVector::zeros(2);
        let su = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.5, 0.5)];
        let (xd, xu) = p.encode(&ComplexVector::zeros(1), &su).unwrap();
        let out = apply_channel(&cr, &p.schedule, &xd, &xu, std::slice::from_ref(&zeros), &zeros).unwrap();
        let est = p.decode_ul(&cr.bs_receive_csi(), &out.y_u).unwrap();
        assert_eq!(est.resolvable_streams, 2);
        let r = p.effective_ul_channel(&cr.bs_receive_csi()).unwrap();
        // the estimate reproduces the observation exactly
        assert!((&r * &est.symbols - &out.y_u).norm() < 1e-10);
    }

    #[test]
    fn uplink_rank_is_full_almost_surely() {
        let c = cfg(1, 5, 1, 3);
        let p = build_no_csit(&c).unwrap();
        for trial in 0..1000 {
            let cr = sample_channels_for_trial(c, 2024, trial);
            let r = p.effective_ul_channel(&cr.bs_receive_csi()).unwrap();
            assert_eq!(numerical_rank(&r, None), 3);
        }
    }

    #[test]
    fn vanishing_dl_gain_is_reported() {
        let c = cfg(1, 1, 1, 1);
        let cr = crate::network::ChannelRealization::from_gains(
            c,
            vec![vec![C64::new(0.0, 0.0)]],
            vec![vec![C64::new(1.0, 0.0)]],
            vec![vec![C64::new(1.0, 0.0)]],
        )
        .unwrap();
        let p = build_no_csit(&c).unwrap();
        let err = p.decode_dl(&cr.dl_user_csi(0).unwrap(), &ComplexVector::zeros(1)).unwrap_err();
        assert!(matches!(err, SchemeError::DegenerateChannel(_)));
    }
}
