//! Blind alignment when the BS knows its own DL gains.
//!
//! The block has `N = L_d·L_u` slots. The transmit mode cycles with period
//! `L_d` and the receive mode with period `L_u`. The `N`-point IDFT matrix is
//! split into `W3` (its first `n_d` columns) and `W4` (the next `n_u`). Every
//! UL user sends `n_u` symbols along `V = W4/√n_u`, so at every DL user the
//! UL interference lies in `col(W4)` and is removed by the receive filter
//! `W3ᴴ`. The BS zero-forces DL interference with the right inverse of
//!
//! ```text
//! P = [W3ᴴ H_1(ᾱ); …; W3ᴴ H_{L_d}(ᾱ)]          (L_d n_d × N)
//! ```
//!
//! so `W3ᴴ y_di = s_di / ‖P†‖ + noise`. At the BS the UL signal is
//! `Q s_u / √n_u` with `Q = [F_1(β̄) W4, …, F_{K_u}(β̄) W4]`, which has rank
//! at least `L_u n_u` almost surely.
//!
//! The DL users served are the first `L_d` of the realization.

use serde::Serialize;

use crate::dof::{best_allocation, SymbolAllocation};
use crate::error::SchemeError;
use crate::linalg::{
    block_diag, hstack, idft_matrix, kron, least_squares, numerical_rank, right_pseudoinverse, select_columns,
    submatrix_columns, vstack, ComplexMatrix, ComplexVector, LinalgError, C64,
};
use crate::network::{BsFullCsi, BsReceiveCsi, ChannelRealization, ModeSchedule, NetworkConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct PartialCsitPrecoders {
    cfg: NetworkConfig,
    pub alloc: SymbolAllocation,
    /// DL precoders `U_1 … U_{L_d}`, each `N × n_d`.
    pub u: Vec<ComplexMatrix>,
    /// Common UL precoder `W4 / √n_u`.
    pub v: ComplexMatrix,
    pub w3: ComplexMatrix,
    pub w4: ComplexMatrix,
    pub p: ComplexMatrix,
    pub q: ComplexMatrix,
    /// Frobenius norm of the right inverse of `P`.
    pub p_dagger_norm: f64,
    pub schedule: ModeSchedule,
}

/// `W3` and `W4` for a block of `n` slots.
pub(crate) fn idft_split(n: usize, alloc: SymbolAllocation) -> Result<(ComplexMatrix, ComplexMatrix), LinalgError> {
    let omega = idft_matrix(n)?;
    Ok((
        submatrix_columns(&omega, 1, alloc.nd)?,
        submatrix_columns(&omega, alloc.nd + 1, alloc.nd + alloc.nu)?,
    ))
}

/// `P = [W3ᴴ H_1(ᾱ); …; W3ᴴ H_{L_d}(ᾱ)]`.
fn stacked_dl_matrix(csi: &BsFullCsi<'_>, w3: &ComplexMatrix, sched: &ModeSchedule, ld: usize) -> Result<ComplexMatrix, SchemeError> {
    let w3h = w3.adjoint();
    let blocks = (0..ld)
        .map(|i| Ok(&w3h * csi.extended_dl(i, sched)?))
        .collect::<Result<Vec<_>, SchemeError>>()?;
    Ok(vstack(&blocks)?)
}

/// `Q = [F_1(β̄) W4, …, F_{K_u}(β̄) W4]` over the first `users` UL users.
fn stacked_ul_matrix(csi: &BsReceiveCsi<'_>, w4: &ComplexMatrix, sched: &ModeSchedule, users: usize) -> Result<ComplexMatrix, SchemeError> {
    let blocks = (0..users)
        .map(|j| Ok(csi.extended(j, sched)? * w4))
        .collect::<Result<Vec<_>, SchemeError>>()?;
    Ok(hstack(&blocks)?)
}

fn check_topology(cfg: &NetworkConfig, csi: &BsFullCsi<'_>) -> Result<(), SchemeError> {
    if cfg.kd == 0 || cfg.ku == 0 {
        return Err(SchemeError::UnsupportedTopology(*cfg));
    }
    if csi.num_dl_users() != cfg.kd || csi.receive.num_users() != cfg.ku {
        return Err(SchemeError::DimensionMismatch(format!("channel state does not match {cfg}")));
    }
    Ok(())
}

/// Builds the precoders for `alloc`, which must satisfy the allocation
/// constraints for `cfg`.
pub fn build_partial_csit(
    cfg: &NetworkConfig,
    csi: &BsFullCsi<'_>,
    alloc: SymbolAllocation,
) -> Result<PartialCsitPrecoders, SchemeError> {
    check_topology(cfg, csi)?;
    let alloc = SymbolAllocation::new(alloc.nd, alloc.nu, cfg)?;
    let (ld, lu) = (cfg.ld(), cfg.lu());
    let n = ld * lu;
    let schedule = ModeSchedule::cyclic(ld, lu);
    let (w3, w4) = idft_split(n, alloc)?;

    let p = stacked_dl_matrix(csi, &w3, &schedule, ld)?;
    let p_dagger = right_pseudoinverse(&p).map_err(|e| match e {
        LinalgError::Singular { rank, needed } => {
            SchemeError::DegenerateChannel(format!("rank(P) = {rank} < {needed}"))
        }
        other => other.into(),
    })?;
    let p_dagger_norm = p_dagger.norm();
    let scaled = p_dagger / C64::new(p_dagger_norm, 0.0);
    let u = (0..ld).map(|i| scaled.columns(i * alloc.nd, alloc.nd).into_owned()).collect();

    let v = &w4 / C64::new((alloc.nu as f64).sqrt(), 0.0);
    let q = stacked_ul_matrix(&csi.receive, &w4, &schedule, cfg.ku)?;

    Ok(PartialCsitPrecoders { cfg: *cfg, alloc, u, v, w3, w4, p, q, p_dagger_norm, schedule })
}

/// Builds with the allocation of largest sum DoF (ties toward larger `n_d`).
pub fn build_partial_csit_default(cfg: &NetworkConfig, csi: &BsFullCsi<'_>) -> Result<PartialCsitPrecoders, SchemeError> {
    check_topology(cfg, csi)?;
    let (alloc, _) = best_allocation(cfg)?.ok_or(SchemeError::UnsupportedTopology(*cfg))?;
    build_partial_csit(cfg, csi, alloc)
}

impl PartialCsitPrecoders {
    pub fn config(&self) -> NetworkConfig {
        self.cfg
    }

    /// Block length `L_d·L_u`.
    pub fn block_len(&self) -> usize {
        self.w3.nrows()
    }

    pub fn served_dl_users(&self) -> usize {
        self.u.len()
    }

    /// `[U_1 … U_{L_d}]`.
    pub fn dl_precoder(&self) -> ComplexMatrix {
        hstack(&self.u).expect("precoder blocks share a row count")
    }

    /// Effective UL channel `[F_1(β̄) V, …, F_{K_u}(β̄) V] = Q / √n_u`.
    pub fn effective_ul_channel(&self) -> ComplexMatrix {
        &self.q / C64::new((self.alloc.nu as f64).sqrt(), 0.0)
    }

    /// Per-symbol variances `(DL, UL)` that make the BS and every UL user
    /// spend exactly `N·P` over the block.
    ///
    /// `Σ‖U_i‖² = 1` and `‖V‖² = 1`, so both sides use variance `N·P`.
    pub fn symbol_variances(&self, power: f64) -> (f64, f64) {
        let n = self.block_len() as f64;
        (n * power, n * power)
    }

    /// `‖W3ᴴ W4‖`.
    pub fn alignment_residual(&self) -> f64 {
        (self.w3.adjoint() * &self.w4).norm()
    }

    /// `‖P [U_1 … U_{L_d}] ‖P†‖ − I‖`.
    pub fn zero_forcing_residual(&self) -> f64 {
        let prod = &self.p * self.dl_precoder() * C64::new(self.p_dagger_norm, 0.0);
        (prod - ComplexMatrix::identity(self.p.nrows(), self.p.nrows())).norm()
    }

    /// `x_d = Σ U_i s_di`, `x_uj = V s_uj`.
    pub fn encode(&self, s_d: &[ComplexVector], s_u: &[ComplexVector]) -> Result<(ComplexVector, Vec<ComplexVector>), SchemeError> {
        let (nd, nu) = (self.alloc.nd, self.alloc.nu);
        if s_d.len() != self.u.len() || s_d.iter().any(|s| s.len() != nd) {
            return Err(SchemeError::DimensionMismatch(format!("expected {} DL vectors of length {nd}", self.u.len())));
        }
        if s_u.len() != self.cfg.ku || s_u.iter().any(|s| s.len() != nu) {
            return Err(SchemeError::DimensionMismatch(format!("expected {} UL vectors of length {nu}", self.cfg.ku)));
        }
        let mut x_d = ComplexVector::zeros(self.block_len());
        for (u, s) in self.u.iter().zip(s_d) {
            x_d += u * s;
        }
        let x_u = s_u.iter().map(|s| &self.v * s).collect();
        Ok((x_d, x_u))
    }

    /// DL user `i`'s estimate `‖P†‖ W3ᴴ y_di`.
    pub fn decode_dl(&self, i: usize, y_di: &ComplexVector) -> Result<ComplexVector, SchemeError> {
        if i >= self.u.len() {
            return Err(SchemeError::DimensionMismatch(format!("DL user {i} is not served (serving {})", self.u.len())));
        }
        if y_di.len() != self.block_len() {
            return Err(SchemeError::DimensionMismatch(format!("expected a length-{} block", self.block_len())));
        }
        Ok(self.w3.adjoint() * y_di * C64::new(self.p_dagger_norm, 0.0))
    }

    /// Least-squares UL detection; returns the stacked `K_u n_u` estimates.
    pub fn decode_ul(&self, y_u: &ComplexVector) -> Result<crate::no_csit::UlEstimate, SchemeError> {
        if y_u.len() != self.block_len() {
            return Err(SchemeError::DimensionMismatch(format!("expected a length-{} block", self.block_len())));
        }
        let rank_q = numerical_rank(&self.q, None);
        let needed = self.cfg.lu() * self.alloc.nu;
        if rank_q < needed {
            return Err(SchemeError::DegenerateChannel(format!("rank(Q) = {rank_q} < {needed}")));
        }
        let (x, _) = least_squares(&self.effective_ul_channel(), &ComplexMatrix::from_column_slice(y_u.len(), 1, y_u.as_slice()))?;
        Ok(crate::no_csit::UlEstimate { symbols: x.column(0).into_owned(), resolvable_streams: rank_q })
    }
}

/// Rank and identity diagnostics for the full-rank argument behind the
/// partial-CSIT scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub rank_p: usize,
    pub rank_q: usize,
    /// `‖A·diag(A_1†, …, A_{L_d}†) − H ⊗ I_{n_d}‖`.
    pub residual_a: f64,
    /// `‖B·diag(B_1†, …, B_{L_u}†) − Fᵀ ⊗ I_{n_u}‖`.
    pub residual_b: f64,
}

/// Column order that groups slots by mode: all slots using mode 0 first
/// (`0, period, 2·period, …`), then mode 1, and so on.
pub fn mode_grouping_permutation(period: usize, repeats: usize) -> Vec<usize> {
    (0..period).flat_map(|k| (0..repeats).map(move |m| k + m * period)).collect()
}

/// Recomputes `P` and `Q` from the channel, regroups their columns by BS
/// mode and checks that each regrouped matrix, multiplied by the
/// block-diagonal of right inverses of its IDFT blocks, equals the Kronecker
/// product of the mode-gain matrix with an identity.
pub fn verify_lemma1(cfg: &NetworkConfig, cr: &ChannelRealization, alloc: SymbolAllocation) -> Result<Lemma1Report, SchemeError> {
    let csi = cr.bs_full_csi();
    check_topology(cfg, &csi)?;
    let alloc = SymbolAllocation::new(alloc.nd, alloc.nu, cfg)?;
    let (ld, lu) = (cfg.ld(), cfg.lu());
    let (nd, nu) = (alloc.nd, alloc.nu);
    let sched = ModeSchedule::cyclic(ld, lu);
    let (w3, w4) = idft_split(ld * lu, alloc)?;

    // DL side
    let p = stacked_dl_matrix(&csi, &w3, &sched, ld)?;
    let a = select_columns(&p, &mode_grouping_permutation(ld, lu));
    let w3h = w3.adjoint();
    let a_blocks = (0..ld)
        .map(|k| right_pseudoinverse(&select_columns(&w3h, &mode_grouping_permutation(ld, lu)[k * lu..(k + 1) * lu])))
        .collect::<Result<Vec<_>, _>>()?;
    let h = ComplexMatrix::from_fn(ld, ld, |i, k| cr.h(i, k));
    let residual_a = (a * block_diag(&a_blocks) - kron(&h, &ComplexMatrix::identity(nd, nd))).norm();

    // UL side, on the first L_u UL users
    let q = stacked_ul_matrix(&csi.receive, &w4, &sched, cfg.ku)?;
    let q_sub = stacked_ul_matrix(&csi.receive, &w4, &sched, lu)?;
    let order = mode_grouping_permutation(lu, ld);
    let b = select_columns(&q_sub.transpose(), &order);
    let w4t = w4.transpose();
    let b_blocks = (0..lu)
        .map(|l| right_pseudoinverse(&select_columns(&w4t, &order[l * ld..(l + 1) * ld])))
        .collect::<Result<Vec<_>, _>>()?;
    // (j, l) entry f_j(l)
    let f_t = ComplexMatrix::from_fn(lu, lu, |j, l| cr.f(j, l));
    let residual_b = (b * block_diag(&b_blocks) - kron(&f_t, &ComplexMatrix::identity(nu, nu))).norm();

    Ok(Lemma1Report { rank_p: numerical_rank(&p, None), rank_q: numerical_rank(&q, None), residual_a, residual_b })
}
