//! Trajectory CSV: `t,eps_g,eps_g_stderr,Q,R,Q_kl,R_kl`, one row per record
//! point, nine significant digits, empty cells for absent fields.

use crate::error::{Error, Result};
use crate::harness::{PointStats, Trajectory, TrajectoryMeta, TrajectoryPoint};
use crate::io::fmt_sig9;

pub const HEADER: &str = "t,eps_g,eps_g_stderr,Q,R,Q_kl,R_kl";

fn cell(v: Option<f64>) -> String {
    v.map(fmt_sig9).unwrap_or_default()
}

pub fn emit_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * (traj.points.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for (i, p) in traj.points.iter().enumerate() {
        let se = traj
            .stats
            .as_ref()
            .and_then(|s| s.get(i))
            .and_then(|s| s.eps_g);
        let row = [
            fmt_sig9(p.t),
            fmt_sig9(p.eps_g),
            cell(se),
            fmt_sig9(p.q),
            fmt_sig9(p.r),
            cell(p.q_kl),
            cell(p.r_kl),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn parse_cell(line: usize, name: &str, raw: &str) -> Result<Option<f64>> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<f64>().map(Some).map_err(|e| Error::Csv {
        line,
        message: format!("column {name}: cannot parse `{raw}`: {e}"),
    })
}

fn required(line: usize, name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::Csv {
        line,
        message: format!("column {name} must not be empty"),
    })
}

/// Parses a trajectory CSV. Standard errors other than `eps_g` are not
/// part of the format and come back as `None`.
pub fn parse_csv(text: &str) -> Result<Trajectory> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        Some((_, h)) => {
            return Err(Error::Csv {
                line: 1,
                message: format!("unexpected header `{h}` (expected `{HEADER}`)"),
            })
        }
        None => {
            return Err(Error::Csv {
                line: 1,
                message: "empty file".into(),
            })
        }
    }
    let names: Vec<&str> = HEADER.split(',').collect();
    let mut points = Vec::new();
    let mut stats = Vec::new();
    let mut any_se = false;
    for (i, raw) in lines {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != names.len() {
            return Err(Error::Csv {
                line,
                message: format!("expected {} fields, found {}", names.len(), fields.len()),
            });
        }
        let v = fields
            .iter()
            .zip(&names)
            .map(|(f, n)| parse_cell(line, n, f))
            .collect::<Result<Vec<_>>>()?;
        any_se |= v[2].is_some();
        points.push(TrajectoryPoint {
            t: required(line, "t", v[0])?,
            eps_g: required(line, "eps_g", v[1])?,
            q: required(line, "Q", v[3])?,
            r: required(line, "R", v[4])?,
            q_kl: v[5],
            r_kl: v[6],
        });
        stats.push(PointStats {
            eps_g: v[2],
            ..PointStats::default()
        });
    }
    if points.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::Csv {
            line: 0,
            message: "t must be strictly increasing".into(),
        });
    }
    Ok(Trajectory {
        points,
        stats: any_se.then_some(stats),
        meta: TrajectoryMeta::default(),
    })
}

pub fn read_csv(path: &std::path::Path) -> Result<Trajectory> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_csv(&text)
}
