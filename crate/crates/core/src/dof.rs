//! Closed-form sum degrees of freedom, the symbol allocations the partial-CSIT
//! scheme can run with, and the no-CSIT converse region.
//!
//! All values are exact rationals.

use num_rational::Ratio;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::network::NetworkConfig;

/// Exact DoF value.
pub type Dof = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DofError {
    #[error("topology {0} has no DL or no UL users; the alignment schemes need both")]
    EmptyTopology(NetworkConfig),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("allocation (n_d={nd}, n_u={nu}) violates 1<=n_d<={lu}, 1<=n_u<={ld}, 2<=n_d+n_u<={block}")]
    InvalidAllocation { nd: usize, nu: usize, ld: usize, lu: usize, block: usize },
}

fn int(v: usize) -> Dof {
    Dof::from_integer(v as i64)
}

fn frac(num: usize, den: usize) -> Dof {
    Dof::new(num as i64, den as i64)
}

/// Sum DoF when one side of the cell is empty: single-user transmission.
fn single_sided(cfg: &NetworkConfig) -> Dof {
    int(cfg.kd.max(cfg.ku).min(1))
}

/// Sum DoF without transmit CSI at the BS:
/// `min{max(K_d, K_u), max(1 + min(K_d,1)(L_u−1)/L_u, 1)}`.
pub fn sum_dof_no_csit(cfg: &NetworkConfig) -> Dof {
    if cfg.kd == 0 || cfg.ku == 0 {
        return single_sided(cfg);
    }
    let lu = cfg.lu();
    let aligned = Dof::one() + int(cfg.kd.min(1)) * frac(lu - 1, lu);
    int(cfg.kd.max(cfg.ku)).min(aligned.max(Dof::one()))
}

/// Where the partial-CSIT bounds meet in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TightRegime {
    /// `K_d, K_u, M_d, M_u ≥ 2`: sum DoF 2.
    AllAtLeastTwo,
    /// `K_d = 1`, `M_u ≥ K_u ≥ 1`: sum DoF `1 + (K_u−1)/K_u`.
    SingleDlUser,
    /// `K_u = 1`, `M_d ≥ K_d ≥ 1`: sum DoF `1 + (K_d−1)/K_d`.
    SingleUlUser,
}

impl TightRegime {
    pub fn of(cfg: &NetworkConfig) -> Option<Self> {
        let NetworkConfig { kd, ku, md, mu } = *cfg;
        if kd >= 2 && ku >= 2 && md >= 2 && mu >= 2 {
            Some(Self::AllAtLeastTwo)
        } else if kd == 1 && ku >= 1 && mu >= ku {
            Some(Self::SingleDlUser)
        } else if ku == 1 && kd >= 1 && md >= kd {
            Some(Self::SingleUlUser)
        } else {
            None
        }
    }

    /// The sum DoF the regime predicts for `cfg`.
    pub fn value(&self, cfg: &NetworkConfig) -> Dof {
        match self {
            Self::AllAtLeastTwo => int(2),
            Self::SingleDlUser => Dof::one() + frac(cfg.ku - 1, cfg.ku),
            Self::SingleUlUser => Dof::one() + frac(cfg.kd - 1, cfg.kd),
        }
    }
}

/// Lower (achievable) and upper (converse) bounds on a sum DoF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DofBounds {
    pub lower: Dof,
    pub upper: Dof,
    /// Present iff the bounds coincide.
    pub exact: Option<Dof>,
}

impl DofBounds {
    pub fn new(lower: Dof, upper: Dof) -> Self {
        assert!(lower <= upper, "lower bound {lower} exceeds upper bound {upper}");
        Self { lower, upper, exact: (lower == upper).then_some(lower) }
    }
}

/// `min{2, max(a, b), max(1 + b(a−1)/a, 1 + a(b−1)/b)}` for `a, b ≥ 1`.
fn two_sided_bound(a: usize, b: usize) -> Dof {
    let dl_heavy = Dof::one() + int(b) * frac(a - 1, a);
    let ul_heavy = Dof::one() + int(a) * frac(b - 1, b);
    int(2).min(int(a.max(b))).min(dl_heavy.max(ul_heavy))
}

/// Bounds on the sum DoF with DL CSI at the BS. The upper bound is the
/// converse for a BS with a single conventional transmit and receive antenna
/// and full CSI; the lower bound is what the partial-CSIT scheme achieves.
pub fn sum_dof_partial_csit(cfg: &NetworkConfig) -> DofBounds {
    if cfg.kd == 0 || cfg.ku == 0 {
        let v = single_sided(cfg);
        return DofBounds::new(v, v);
    }
    let upper = two_sided_bound(cfg.kd, cfg.ku);
    let lower = int(2).min(int(cfg.kd.max(cfg.ku))).min(two_sided_bound(cfg.ld(), cfg.lu()));
    DofBounds::new(lower, upper)
}

/// Symbols per block for the partial-CSIT scheme: `nd` per served DL user and
/// `nu` per UL user over `L_d·L_u` slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SymbolAllocation {
    pub nd: usize,
    pub nu: usize,
}

impl SymbolAllocation {
    /// Checks `nd ∈ [1:L_u]`, `nu ∈ [1:L_d]`, `nd + nu ∈ [2 : L_d L_u]`.
    pub fn new(nd: usize, nu: usize, cfg: &NetworkConfig) -> Result<Self, DofError> {
        let (ld, lu) = (cfg.ld(), cfg.lu());
        let block = ld * lu;
        let ok = (1..=lu).contains(&nd) && (1..=ld).contains(&nu) && (2..=block).contains(&(nd + nu));
        if ok {
            Ok(Self { nd, nu })
        } else {
            Err(DofError::InvalidAllocation { nd, nu, ld, lu, block })
        }
    }

    /// `nd/L_u + nu/L_d`.
    pub fn achieved_dof(&self, cfg: &NetworkConfig) -> Dof {
        frac(self.nd, cfg.lu()) + frac(self.nu, cfg.ld())
    }
}

/// Every allocation the partial-CSIT scheme accepts, with its sum DoF.
pub fn enumerate_allocations(cfg: &NetworkConfig) -> Result<Vec<(SymbolAllocation, Dof)>, DofError> {
    if cfg.kd == 0 || cfg.ku == 0 {
        return Err(DofError::EmptyTopology(*cfg));
    }
    let mut out = Vec::new();
    for nd in 1..=cfg.lu() {
        for nu in 1..=cfg.ld() {
            if let Ok(a) = SymbolAllocation::new(nd, nu, cfg) {
                out.push((a, a.achieved_dof(cfg)));
            }
        }
    }
    Ok(out)
}

/// The allocation with the largest sum DoF; ties go to the larger `nd`.
/// `None` when no allocation exists (`L_d = L_u = 1`).
pub fn best_allocation(cfg: &NetworkConfig) -> Result<Option<(SymbolAllocation, Dof)>, DofError> {
    Ok(enumerate_allocations(cfg)?
        .into_iter()
        .max_by(|(a, da), (b, db)| da.cmp(db).then(a.nd.cmp(&b.nd))))
}

/// The lower-bound corner points `(L_u, min(L_u(L_d−1), L_d))` and
/// `(min(L_d(L_u−1), L_u), L_d)`, keeping only those that are valid
/// allocations. With `L_d = 1` (or `L_u = 1`) one corner has zero UL (or DL)
/// symbols and is dropped; its DoF of 1 is covered by single-user transmission.
pub fn corner_allocations(cfg: &NetworkConfig) -> Result<Vec<SymbolAllocation>, DofError> {
    if cfg.kd == 0 || cfg.ku == 0 {
        return Err(DofError::EmptyTopology(*cfg));
    }
    let (ld, lu) = (cfg.ld(), cfg.lu());
    let candidates = [(lu, (lu * (ld - 1)).min(ld)), ((ld * (lu - 1)).min(lu), ld)];
    Ok(candidates
        .into_iter()
        .filter_map(|(nd, nu)| SymbolAllocation::new(nd, nu, cfg).ok())
        .collect())
}

fn check_region_args(cfg: &NetworkConfig) -> Result<usize, DofError> {
    if cfg.ku == 0 {
        return Err(DofError::InvalidArgument("the converse region needs K_u >= 1".into()));
    }
    Ok(cfg.lu())
}

/// Whether `(d_d, d_u)` (DL and UL sum DoF) lies in the no-CSIT converse
/// region `d_d + d_u/L_u ≤ 1`, `d_u ≤ 1`. Exact.
pub fn region_contains(d_d: Dof, d_u: Dof, cfg: &NetworkConfig) -> Result<bool, DofError> {
    let lu = check_region_args(cfg)?;
    if d_d < Dof::from_integer(0) || d_u < Dof::from_integer(0) {
        return Err(DofError::InvalidArgument("DoF values must be nonnegative".into()));
    }
    Ok(d_d + d_u / int(lu) <= Dof::one() && d_u <= Dof::one())
}

/// Floating-point form of [`region_contains`], with `1e-12` slack for
/// rounding in the inputs.
pub fn region_feasible(d_d: f64, d_u: f64, cfg: &NetworkConfig) -> Result<bool, DofError> {
    let lu = check_region_args(cfg)?;
    if !(d_d >= 0.0 && d_u >= 0.0) {
        return Err(DofError::InvalidArgument(format!("DoF values must be nonnegative, got ({d_d}, {d_u})")));
    }
    const SLACK: f64 = 1e-12;
    Ok(d_d + d_u / lu as f64 <= 1.0 + SLACK && d_u <= 1.0 + SLACK)
}

/// The no-CSIT scheme's operating point `(1 − 1/L_u, 1)`.
pub fn no_csit_corner(cfg: &NetworkConfig) -> Result<(Dof, Dof), DofError> {
    if cfg.kd == 0 || cfg.ku == 0 {
        return Err(DofError::EmptyTopology(*cfg));
    }
    let lu = cfg.lu();
    Ok((frac(lu - 1, lu), Dof::one()))
}
