//! Network topology, channel realizations, BS mode schedules and the
//! time-extended (block) input/output relation.
//!
//! Users, modes and time slots are 0-based in the API. Text dumps and CLI
//! output print them 1-based.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{diag, ComplexMatrix, ComplexVector, C64};
use crate::rng::{complex_gaussian, stream_rng, Stream};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{kind} index {index} out of range (have {count})")]
    IndexOutOfRange { kind: &'static str, index: usize, count: usize },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("malformed channel dump at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// User counts and preset-mode budget of a single cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Number of downlink users `K_d`.
    pub kd: usize,
    /// Number of uplink users `K_u`.
    pub ku: usize,
    /// Transmit preset modes `M_d`.
    pub md: usize,
    /// Receive preset modes `M_u`.
    pub mu: usize,
}

impl NetworkConfig {
    pub fn new(kd: usize, ku: usize, md: usize, mu: usize) -> Result<Self, NetworkError> {
        let cfg = Self { kd, ku, md, mu };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `K_d = K_u = M_d = M_u = k`.
    pub fn symmetric(k: usize) -> Result<Self, NetworkError> {
        Self::new(k, k, k, k)
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        if self.md == 0 || self.mu == 0 {
            return Err(NetworkError::InvalidConfig(format!(
                "preset mode counts must be >= 1 (md={}, mu={})",
                self.md, self.mu
            )));
        }
        Ok(())
    }

    /// `L_d = min(K_d, M_d)`.
    pub fn ld(&self) -> usize {
        self.kd.min(self.md)
    }

    /// `L_u = min(K_u, M_u)`.
    pub fn lu(&self) -> usize {
        self.ku.min(self.mu)
    }
}

impl std::fmt::Display for NetworkConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(Kd={}, Ku={}, Md={}, Mu={})", self.kd, self.ku, self.md, self.mu)
    }
}

/// All channel gains of one coherence block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    cfg: NetworkConfig,
    /// `dl[i][k] = h_i(k)`.
    dl: Vec<Vec<C64>>,
    /// `ul[j][l] = f_j(l)`.
    ul: Vec<Vec<C64>>,
    /// `cross[i][j] = g_ij`.
    cross: Vec<Vec<C64>>,
}

impl ChannelRealization {
    /// Builds a realization from explicit gains, checking shapes and finiteness.
    pub fn from_gains(
        cfg: NetworkConfig,
        dl: Vec<Vec<C64>>,
        ul: Vec<Vec<C64>>,
        cross: Vec<Vec<C64>>,
    ) -> Result<Self, NetworkError> {
        cfg.validate()?;
        let shape_ok = dl.len() == cfg.kd
            && dl.iter().all(|r| r.len() == cfg.md)
            && ul.len() == cfg.ku
            && ul.iter().all(|r| r.len() == cfg.mu)
            && cross.len() == cfg.kd
            && cross.iter().all(|r| r.len() == cfg.ku);
        if !shape_ok {
            return Err(NetworkError::LengthMismatch(format!("gain tables do not match {cfg}")));
        }
        let finite = dl.iter().chain(&ul).chain(&cross).flatten().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(NetworkError::InvalidConfig("channel gains must be finite".into()));
        }
        Ok(Self { cfg, dl, ul, cross })
    }

    pub fn config(&self) -> NetworkConfig {
        self.cfg
    }

    pub fn h(&self, i: usize, k: usize) -> C64 {
        self.dl[i][k]
    }

    pub fn f(&self, j: usize, l: usize) -> C64 {
        self.ul[j][l]
    }

    pub fn g(&self, i: usize, j: usize) -> C64 {
        self.cross[i][j]
    }

    /// What the BS may use without transmit-side CSI: its receive gains.
    pub fn bs_receive_csi(&self) -> BsReceiveCsi<'_> {
        BsReceiveCsi { ul: &self.ul, mu: self.cfg.mu }
    }

    /// Transmit and receive gains, available at the BS under partial CSIT.
    pub fn bs_full_csi(&self) -> BsFullCsi<'_> {
        BsFullCsi { dl: &self.dl, receive: self.bs_receive_csi(), md: self.cfg.md }
    }

    /// DL user `i`'s own receive-side gains.
    pub fn dl_user_csi(&self, i: usize) -> Result<DlUserCsi<'_>, NetworkError> {
        self.check_dl(i)?;
        Ok(DlUserCsi { gains: &self.dl[i] })
    }

    fn check_dl(&self, i: usize) -> Result<(), NetworkError> {
        if i >= self.cfg.kd {
            return Err(NetworkError::IndexOutOfRange { kind: "DL user", index: i, count: self.cfg.kd });
        }
        Ok(())
    }

    fn check_ul(&self, j: usize) -> Result<(), NetworkError> {
        if j >= self.cfg.ku {
            return Err(NetworkError::IndexOutOfRange { kind: "UL user", index: j, count: self.cfg.ku });
        }
        Ok(())
    }

    /// Same realization with every cross gain `g_ij` replaced.
    pub fn with_cross(&self, cross: Vec<Vec<C64>>) -> Result<Self, NetworkError> {
        Self::from_gains(self.cfg, self.dl.clone(), self.ul.clone(), cross)
    }

    /// Text dump, one gain per line: `link,index1,index2,re,im` with 1-based
    /// indices and link types `h` (user, mode), `f` (user, mode), `g` (DL user, UL user).
    pub fn to_dump(&self) -> String {
        let mut out = format!("# kd={} ku={} md={} mu={}\nlink,a,b,re,im\n", self.cfg.kd, self.cfg.ku, self.cfg.md, self.cfg.mu);
        let tables: [(&str, &Vec<Vec<C64>>); 3] = [("h", &self.dl), ("f", &self.ul), ("g", &self.cross)];
        for (tag, table) in tables {
            for (a, row) in table.iter().enumerate() {
                for (b, z) in row.iter().enumerate() {
                    let _ = writeln!(out, "{tag},{},{},{:?},{:?}", a + 1, b + 1, z.re, z.im);
                }
            }
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Self, NetworkError> {
        let mut lines = text.lines().enumerate();
        let (_, head) = lines.next().ok_or(NetworkError::Parse { line: 1, msg: "empty dump".into() })?;
        let mut dims = [None; 4];
        for tok in head.trim_start_matches('#').split_whitespace() {
            let (key, val) = tok.split_once('=').ok_or(NetworkError::Parse { line: 1, msg: format!("bad token {tok:?}") })?;
            let val: usize = val.parse().map_err(|_| NetworkError::Parse { line: 1, msg: format!("bad value {tok:?}") })?;
            let slot = match key {
                "kd" => 0,
                "ku" => 1,
                "md" => 2,
                "mu" => 3,
                _ => return Err(NetworkError::Parse { line: 1, msg: format!("unknown key {key:?}") }),
            };
            dims[slot] = Some(val);
        }
        let [Some(kd), Some(ku), Some(md), Some(mu)] = dims else {
            return Err(NetworkError::Parse { line: 1, msg: "header must give kd, ku, md, mu".into() });
        };
        let cfg = NetworkConfig::new(kd, ku, md, mu)?;
        let nan = C64::new(f64::NAN, f64::NAN);
        let mut dl = vec![vec![nan; md]; kd];
        let mut ul = vec![vec![nan; mu]; ku];
        let mut cross = vec![vec![nan; ku]; kd];
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("link,") {
                continue;
            }
            let err = |msg: String| NetworkError::Parse { line: line_no, msg };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(err(format!("expected 5 fields, got {}", fields.len())));
            }
            let a: usize = fields[1].parse().map_err(|_| err("bad first index".into()))?;
            let b: usize = fields[2].parse().map_err(|_| err("bad second index".into()))?;
            let re: f64 = fields[3].parse().map_err(|_| err("bad real part".into()))?;
            let im: f64 = fields[4].parse().map_err(|_| err("bad imaginary part".into()))?;
            let table = match fields[0] {
                "h" => &mut dl,
                "f" => &mut ul,
                "g" => &mut cross,
                other => return Err(err(format!("unknown link type {other:?}"))),
            };
            let slot = a
                .checked_sub(1)
                .zip(b.checked_sub(1))
                .and_then(|(a, b)| table.get_mut(a).and_then(|row| row.get_mut(b)))
                .ok_or_else(|| err(format!("index ({a},{b}) out of range")))?;
            *slot = C64::new(re, im);
        }
        Self::from_gains(cfg, dl, ul, cross).map_err(|e| match e {
            NetworkError::InvalidConfig(_) => NetworkError::Parse { line: 0, msg: "dump is missing gains".into() },
            other => other,
        })
    }
}

/// Receive-side CSI at the BS: the `f_j(l)` gains only.
#[derive(Debug, Clone, Copy)]
pub struct BsReceiveCsi<'a> {
    ul: &'a [Vec<C64>],
    mu: usize,
}

impl BsReceiveCsi<'_> {
    pub fn num_users(&self) -> usize {
        self.ul.len()
    }

    pub fn num_modes(&self) -> usize {
        self.mu
    }

    pub fn f(&self, j: usize, l: usize) -> C64 {
        self.ul[j][l]
    }

    /// `F_j(β̄) = diag(f_j(β(1)), …, f_j(β(n)))`.
    pub fn extended(&self, j: usize, sched: &ModeSchedule) -> Result<ComplexMatrix, NetworkError> {
        if j >= self.ul.len() {
            return Err(NetworkError::IndexOutOfRange { kind: "UL user", index: j, count: self.ul.len() });
        }
        let entries = sched
            .beta
            .iter()
            .map(|&l| self.ul[j].get(l).copied().ok_or(NetworkError::IndexOutOfRange { kind: "receive mode", index: l, count: self.mu }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(diag(&entries))
    }
}

/// Transmit and receive CSI at the BS.
#[derive(Debug, Clone, Copy)]
pub struct BsFullCsi<'a> {
    dl: &'a [Vec<C64>],
    md: usize,
    pub receive: BsReceiveCsi<'a>,
}

impl BsFullCsi<'_> {
    pub fn num_dl_users(&self) -> usize {
        self.dl.len()
    }

    pub fn h(&self, i: usize, k: usize) -> C64 {
        self.dl[i][k]
    }

    /// `H_i(ᾱ)` for any DL user.
    pub fn extended_dl(&self, i: usize, sched: &ModeSchedule) -> Result<ComplexMatrix, NetworkError> {
        if i >= self.dl.len() {
            return Err(NetworkError::IndexOutOfRange { kind: "DL user", index: i, count: self.dl.len() });
        }
        DlUserCsi { gains: &self.dl[i] }.extended(sched).map_err(|e| match e {
            NetworkError::IndexOutOfRange { index, .. } => {
                NetworkError::IndexOutOfRange { kind: "transmit mode", index, count: self.md }
            }
            other => other,
        })
    }
}

/// A DL user's knowledge of its own gains `h_i(k)`.
#[derive(Debug, Clone, Copy)]
pub struct DlUserCsi<'a> {
    gains: &'a [C64],
}

impl DlUserCsi<'_> {
    pub fn h(&self, k: usize) -> C64 {
        self.gains[k]
    }

    /// `H_i(ᾱ) = diag(h_i(α(1)), …, h_i(α(n)))`.
    pub fn extended(&self, sched: &ModeSchedule) -> Result<ComplexMatrix, NetworkError> {
        let entries = sched
            .alpha
            .iter()
            .map(|&k| {
                self.gains.get(k).copied().ok_or(NetworkError::IndexOutOfRange {
                    kind: "transmit mode",
                    index: k,
                    count: self.gains.len(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(diag(&entries))
    }
}

/// Per-slot transmit (`alpha`) and receive (`beta`) mode indices over one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSchedule {
    alpha: Vec<usize>,
    beta: Vec<usize>,
}

impl ModeSchedule {
    pub fn new(alpha: Vec<usize>, beta: Vec<usize>, md: usize, mu: usize) -> Result<Self, NetworkError> {
        if alpha.len() != beta.len() {
            return Err(NetworkError::LengthMismatch(format!(
                "alpha has {} slots, beta has {}",
                alpha.len(),
                beta.len()
            )));
        }
        if let Some(&k) = alpha.iter().find(|&&k| k >= md) {
            return Err(NetworkError::IndexOutOfRange { kind: "transmit mode", index: k, count: md });
        }
        if let Some(&l) = beta.iter().find(|&&l| l >= mu) {
            return Err(NetworkError::IndexOutOfRange { kind: "receive mode", index: l, count: mu });
        }
        Ok(Self { alpha, beta })
    }

    /// Transmit mode held fixed at `tx`, receive modes sweep `0, 1, …, n−1`.
    pub fn fixed_tx_sweeping_rx(n: usize, tx: usize) -> Self {
        Self { alpha: vec![tx; n], beta: (0..n).collect() }
    }

    /// Both modes cycle: `α(t) = t mod ld`, `β(t) = t mod lu`, over `ld·lu` slots.
    pub fn cyclic(ld: usize, lu: usize) -> Self {
        let n = ld * lu;
        Self { alpha: (0..n).map(|t| t % ld).collect(), beta: (0..n).map(|t| t % lu).collect() }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn beta(&self) -> &[usize] {
        &self.beta
    }
}

/// i.i.d. CN(0,1) gains for one block, reproducible from `seed`.
pub fn sample_channels(cfg: NetworkConfig, seed: u64) -> ChannelRealization {
    sample_channels_for_trial(cfg, seed, 0)
}

/// Channels for Monte Carlo trial `trial`; each link class uses its own stream.
pub fn sample_channels_for_trial(cfg: NetworkConfig, seed: u64, trial: u64) -> ChannelRealization {
    let table = |stream: Stream, rows: usize, cols: usize| {
        let mut rng = stream_rng(seed, trial, stream);
        (0..rows).map(|_| (0..cols).map(|_| complex_gaussian(&mut rng)).collect()).collect()
    };
    ChannelRealization {
        cfg,
        dl: table(Stream::Downlink, cfg.kd, cfg.md),
        ul: table(Stream::Uplink, cfg.ku, cfg.mu),
        cross: table(Stream::Cross, cfg.kd, cfg.ku),
    }
}

pub fn extended_dl_channel(cr: &ChannelRealization, i: usize, sched: &ModeSchedule) -> Result<ComplexMatrix, NetworkError> {
    cr.check_dl(i)?;
    cr.bs_full_csi().extended_dl(i, sched)
}

pub fn extended_ul_channel(cr: &ChannelRealization, j: usize, sched: &ModeSchedule) -> Result<ComplexMatrix, NetworkError> {
    cr.check_ul(j)?;
    cr.bs_receive_csi().extended(j, sched)
}

/// Received block signals.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOutput {
    /// One received vector per DL user.
    pub y_d: Vec<ComplexVector>,
    /// BS received vector, self-interference already removed.
    pub y_u: ComplexVector,
}

/// Evaluates the time-extended relation
/// `y_di = H_i(ᾱ) x_d + Σ_j g_ij x_uj + z_di` and `y_u = Σ_j F_j(β̄) x_uj + z_u`.
///
/// Self-interference at the BS is assumed perfectly suppressed here; residual
/// self-interference only enters the rate computations.
pub fn apply_channel(
    cr: &ChannelRealization,
    sched: &ModeSchedule,
    x_d: &ComplexVector,
    x_u: &[ComplexVector],
    noise_d: &[ComplexVector],
    noise_u: &ComplexVector,
) -> Result<BlockOutput, NetworkError> {
    let n = sched.len();
    let cfg = cr.cfg;
    if x_u.len() != cfg.ku || noise_d.len() != cfg.kd {
        return Err(NetworkError::LengthMismatch(format!(
            "expected {} UL inputs and {} DL noise vectors, got {} and {}",
            cfg.ku,
            cfg.kd,
            x_u.len(),
            noise_d.len()
        )));
    }
    let lengths_ok = x_d.len() == n
        && noise_u.len() == n
        && x_u.iter().all(|v| v.len() == n)
        && noise_d.iter().all(|v| v.len() == n);
    if !lengths_ok {
        return Err(NetworkError::LengthMismatch(format!("all block vectors must have length {n}")));
    }
    let mut y_d = Vec::with_capacity(cfg.kd);
    for (i, noise) in noise_d.iter().enumerate() {
        let mut y = extended_dl_channel(cr, i, sched)? * x_d + noise;
        for (j, xu) in x_u.iter().enumerate() {
            y += xu * cr.g(i, j);
        }
        y_d.push(y);
    }
    let mut y_u = noise_u.clone();
    for (j, xu) in x_u.iter().enumerate() {
        y_u += extended_ul_channel(cr, j, sched)? * xu;
    }
    Ok(BlockOutput { y_d, y_u })
}
