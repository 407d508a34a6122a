//! Plain-text scenario files: one `key = value` per line, `#` starts a comment.
//!
//! Recognized keys: `mode`, `rule`, `N`, `M`, `eta`, `sigma_xi_sq`,
//! `sigma_zeta_sq`, `seed`, `replications`, `t_max`, `record_interval`,
//! `q0`, `r0`, `q_kl0`, `r_kl0`, `t_kl`. Missing keys take the values of
//! [`ScenarioConfig::default`]: DNP, `N = 1000`, `M = 1`, `eta = 0.1`,
//! `sigma_xi_sq = sigma_zeta_sq = 0.01`, seed 1, 20 replications,
//! `t_max = 10`, `record_interval = 0.5`, `q0 = 1`, and zero for
//! `r0`, `q_kl0`, `r_kl0`, `t_kl`.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::ScenarioConfig;
use crate::io::fmt_sig9;

pub const KEYS: [&str; 16] = [
    "mode",
    "rule",
    "N",
    "M",
    "eta",
    "sigma_xi_sq",
    "sigma_zeta_sq",
    "seed",
    "replications",
    "t_max",
    "record_interval",
    "q0",
    "r0",
    "q_kl0",
    "r_kl0",
    "t_kl",
];

fn parse_value<V: std::str::FromStr>(line: usize, key: &str, raw: &str) -> Result<V>
where
    V::Err: std::fmt::Display,
{
    raw.parse::<V>().map_err(|e| Error::Scenario {
        line,
        key: key.to_string(),
        message: format!("cannot parse `{raw}`: {e}"),
    })
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let mut sc = ScenarioConfig::default();
    let mut seen = HashSet::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Scenario {
                line,
                key: content.to_string(),
                message: "expected `key = value`".into(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(Error::Scenario {
                line,
                key: key.to_string(),
                message: format!("unknown key (expected one of {})", KEYS.join(", ")),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(Error::Scenario {
                line,
                key: key.to_string(),
                message: "duplicate key".into(),
            });
        }
        match key {
            "mode" => sc.mode = parse_value(line, key, value)?,
            "rule" => sc.model.rule = parse_value(line, key, value)?,
            "N" => sc.model.n_inputs = parse_value(line, key, value)?,
            "M" => sc.model.n_outputs = parse_value(line, key, value)?,
            "eta" => sc.model.eta = parse_value(line, key, value)?,
            "sigma_xi_sq" => sc.model.sigma_xi_sq = parse_value(line, key, value)?,
            "sigma_zeta_sq" => sc.model.sigma_zeta_sq = parse_value(line, key, value)?,
            "seed" => sc.seed = parse_value(line, key, value)?,
            "replications" => sc.replications = parse_value(line, key, value)?,
            "t_max" => sc.t_max = parse_value(line, key, value)?,
            "record_interval" => sc.record_interval = parse_value(line, key, value)?,
            "q0" => sc.q0 = parse_value(line, key, value)?,
            "r0" => sc.r0 = parse_value(line, key, value)?,
            "q_kl0" => sc.q_kl0 = parse_value(line, key, value)?,
            "r_kl0" => sc.r_kl0 = parse_value(line, key, value)?,
            "t_kl" => sc.t_kl = parse_value(line, key, value)?,
            _ => unreachable!("key list checked above"),
        }
    }
    sc.validate()?;
    Ok(sc)
}

pub fn read_scenario(path: &Path) -> Result<ScenarioConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// Renders every key, in [`KEYS`] order.
pub fn render_scenario(sc: &ScenarioConfig) -> String {
    let m = &sc.model;
    let values = [
        sc.mode.name().to_string(),
        m.rule.name().to_string(),
        m.n_inputs.to_string(),
        m.n_outputs.to_string(),
        fmt_sig9(m.eta),
        fmt_sig9(m.sigma_xi_sq),
        fmt_sig9(m.sigma_zeta_sq),
        sc.seed.to_string(),
        sc.replications.to_string(),
        fmt_sig9(sc.t_max),
        fmt_sig9(sc.record_interval),
        fmt_sig9(sc.q0),
        fmt_sig9(sc.r0),
        fmt_sig9(sc.q_kl0),
        fmt_sig9(sc.r_kl0),
        fmt_sig9(sc.t_kl),
    ];
    KEYS.iter()
        .zip(values)
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}
