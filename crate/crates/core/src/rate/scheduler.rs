//! User selection within a cell.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RateError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheduler {
    /// Users `(t·n + r) mod J` for `r < n` at drop `t`.
    RoundRobin,
    /// The `n` users with the largest gain metric.
    MaxSnr,
}

impl Scheduler {
    pub const ALL: [Scheduler; 2] = [Scheduler::RoundRobin, Scheduler::MaxSnr];

    pub fn name(self) -> &'static str {
        match self {
            Scheduler::RoundRobin => "round-robin",
            Scheduler::MaxSnr => "max-snr",
        }
    }

    /// Picks `count` distinct users out of `metrics.len()`. Max-SNR returns
    /// them strongest first; ties go to the lower index.
    pub fn select(self, metrics: &[f64], count: usize, trial: u64) -> Vec<usize> {
        let j = metrics.len();
        assert!(count <= j, "cannot schedule {count} of {j} users");
        match self {
            Scheduler::RoundRobin => {
                let start = ((trial % j as u64) * count as u64 % j as u64) as usize;
                (0..count).map(|r| (start + r) % j).collect()
            }
            Scheduler::MaxSnr => {
                let mut order: Vec<usize> = (0..j).collect();
                order.sort_by(|&a, &b| metrics[b].total_cmp(&metrics[a]).then(a.cmp(&b)));
                order.truncate(count);
                order
            }
        }
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheduler {
    type Err = RateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheduler::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| RateError::InvalidScenario(format!("unknown scheduler '{s}' (expected round-robin or max-snr)")))
    }
}
