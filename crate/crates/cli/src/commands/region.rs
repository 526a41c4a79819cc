use fdbia::dof::{region_contains, Dof};
use fdbia::network::NetworkConfig;
use serde::Serialize;

use crate::args::RegionArgs;
use crate::error::CliError;

/// Parses an integer, a fraction `p/q` or a decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Dof, String> {
    let s = s.trim();
    let bad = || format!("'{s}' is not an integer, fraction or decimal");
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(format!("'{s}' has a zero denominator"));
        }
        return Ok(Dof::new(p, q));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 15 {
        return Err(bad());
    }
    let den = 10i64.pow(frac.len() as u32);
    let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
    Ok(Dof::new(sign * num, den))
}

#[derive(Serialize)]
struct RegionReport {
    config: NetworkConfig,
    d_d: String,
    d_u: String,
    feasible: bool,
}

pub fn run(a: RegionArgs, json: bool) -> Result<String, CliError> {
    let n = &a.network;
    let (Some(ku), Some(mu)) = (n.ku, n.mu) else {
        return Err(CliError::Usage("region needs --ku and --mu".into()));
    };
    let cfg = NetworkConfig::new(n.kd.unwrap_or(1), ku, n.md.unwrap_or(1), mu).map_err(|e| CliError::Config(e.to_string()))?;
    let (d, u) = a
        .point
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("--point '{}' must be d_d,d_u", a.point)))?;
    let d_d = parse_rational(d).map_err(|e| CliError::Usage(format!("--point: {e}")))?;
    let d_u = parse_rational(u).map_err(|e| CliError::Usage(format!("--point: {e}")))?;
    let feasible = region_contains(d_d, d_u, &cfg).map_err(|e| CliError::Config(e.to_string()))?;
    if json {
        let report = RegionReport { config: cfg, d_d: d_d.to_string(), d_u: d_u.to_string(), feasible };
        return Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n");
    }
    Ok(format!("{}\n", if feasible { "feasible" } else { "infeasible" }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), Dof::new(1, 2));
        assert_eq!(parse_rational("0.5").unwrap(), Dof::new(1, 2));
        assert_eq!(parse_rational("2").unwrap(), Dof::from_integer(2));
        assert_eq!(parse_rational(".25").unwrap(), Dof::new(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), Dof::new(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational(".").is_err());
    }
}
