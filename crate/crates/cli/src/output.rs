//! Plot data and report files.
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! a file back yields bit-identical values. Lines end in LF.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use zhs_core::{Ansatz, Family, FieldOffset, KinkState, PeakonState, Sample, SampleGrid, Train, Trajectory};

use crate::RunError;

/// Trajectory read back from a file, tagged by family.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedTrajectory {
    Peakon(Trajectory<PeakonState>),
    Kink(Trajectory<KinkState>),
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn header_lines(out: &mut String, hash: &str) {
    writeln!(out, "# config-sha256: {hash}").unwrap();
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Peakon => "peakon",
        Family::Kink => "kink",
    }
}

/// Columns `t`, then u and v amplitudes, then u and v positions.
pub fn trajectory_csv<S: Ansatz>(trajectory: &Trajectory<S>, hash: &str) -> String {
    let first = &trajectory.first().state;
    let (n, m) = (first.u().len(), first.v().len());
    let off = trajectory.offset();
    let mut out = String::new();
    header_lines(&mut out, hash);
    writeln!(out, "# family: {}", family_name(S::FAMILY)).unwrap();
    writeln!(out, "# b: {}", first.exponent()).unwrap();
    writeln!(out, "# offset: {} {}", fmt_f64(off.du), fmt_f64(off.dv)).unwrap();
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|i| format!("u_amplitude_{i}")));
    cols.extend((1..=m).map(|i| format!("v_amplitude_{i}")));
    cols.extend((1..=n).map(|i| format!("u_position_{i}")));
    cols.extend((1..=m).map(|i| format!("v_position_{i}")));
    out.push_str(&cols.join(","));
    out.push('\n');
    for s in trajectory.samples() {
        let (u, v) = (s.state.u(), s.state.v());
        let row = std::iter::once(s.t)
            .chain(u.amplitudes().iter().copied())
            .chain(v.amplitudes().iter().copied())
            .chain(u.positions().iter().copied())
            .chain(v.positions().iter().copied())
            .map(fmt_f64)
            .collect::<Vec<_>>();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Rows `t,x,u,v` on the grid, at the samples nearest to each requested time.
/// With no times given, the first and last samples are used.
pub fn fields_csv<S: Ansatz>(
    trajectory: &Trajectory<S>,
    grid: &SampleGrid,
    times: &[f64],
    hash: &str,
) -> String {
    let samples = trajectory.samples();
    let mut picks: Vec<&Sample<S>> = if times.is_empty() {
        vec![trajectory.first(), trajectory.last()]
    } else {
        times
            .iter()
            .map(|&t| {
                samples
                    .iter()
                    .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
                    .expect("trajectory is non-empty")
            })
            .collect()
    };
    picks.dedup_by(|a, b| a.t == b.t);
    let mut out = String::new();
    header_lines(&mut out, hash);
    out.push_str("t,x,u,v\n");
    for s in picks {
        for x in grid.nodes() {
            let (u, v) = s.state.fields(trajectory.offset(), x);
            writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(s.t),
                fmt_f64(x),
                fmt_f64(u),
                fmt_f64(v)
            )
            .unwrap();
        }
    }
    out
}

/// TOML report preceded by the hash comment.
pub fn report_toml<T: serde::Serialize>(report: &T, hash: &str) -> String {
    let mut out = String::new();
    header_lines(&mut out, hash);
    out.push_str(&toml::to_string(report).expect("report serializes"));
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    fs::write(path, contents).map_err(|e| RunError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> RunError {
    RunError::Input(format!("line {line}: {msg}"))
}

fn parse_float(s: &str, line: usize) -> Result<f64, RunError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("not a number: {s:?}")))
}

/// Inverse of [`trajectory_csv`].
pub fn parse_trajectory(text: &str) -> Result<LoadedTrajectory, RunError> {
    let mut family = None;
    let mut b = None;
    let mut offset = FieldOffset::default();
    let mut header: Option<(usize, usize)> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        if let Some(comment) = raw.strip_prefix('#') {
            let Some((key, value)) = comment.split_once(':') else {
                continue;
            };
            let value = value.trim();
            match key.trim() {
                "family" => {
                    family = Some(match value {
                        "peakon" => Family::Peakon,
                        "kink" => Family::Kink,
                        other => return Err(parse_err(line, format!("unknown family {other:?}"))),
                    })
                }
                "b" => {
                    let parsed = value.parse::<u32>().ok().filter(|&b| b >= 1);
                    b = Some(parsed.ok_or_else(|| parse_err(line, "b must be a positive integer"))?);
                }
                "offset" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(parse_err(line, "offset needs two values"));
                    }
                    offset = FieldOffset {
                        du: parse_float(parts[0], line)?,
                        dv: parse_float(parts[1], line)?,
                    };
                }
                _ => {}
            }
            continue;
        }
        match header {
            None => {
                let cols: Vec<&str> = raw.split(',').map(str::trim).collect();
                if cols.first() != Some(&"t") {
                    return Err(parse_err(line, "header must start with t"));
                }
                let count = |prefix: &str| cols.iter().filter(|c| c.starts_with(prefix)).count();
                let (n, m) = (count("u_amplitude_"), count("v_amplitude_"));
                if count("u_position_") != n || count("v_position_") != m || cols.len() != 1 + 2 * (n + m) {
                    return Err(parse_err(line, "header columns do not describe a trajectory"));
                }
                header = Some((n, m));
            }
            Some((n, m)) => {
                let row = raw
                    .split(',')
                    .map(|s| parse_float(s, line))
                    .collect::<Result<Vec<_>, _>>()?;
                if row.len() != 1 + 2 * (n + m) {
                    return Err(parse_err(
                        line,
                        format!("expected {} values, found {}", 1 + 2 * (n + m), row.len()),
                    ));
                }
                rows.push(row);
            }
        }
    }
    let family = family.ok_or_else(|| RunError::Input("missing '# family:' line".into()))?;
    let b = b.ok_or_else(|| RunError::Input("missing '# b:' line".into()))?;
    let (n, m) = header.ok_or_else(|| RunError::Input("missing header row".into()))?;
    fn build<S: Ansatz>(
        rows: &[Vec<f64>],
        b: u32,
        n: usize,
        m: usize,
        offset: FieldOffset,
    ) -> Result<Trajectory<S>, RunError> {
        let samples = rows
            .iter()
            .map(|r| {
                let u = Train::new(r[1..1 + n].to_vec(), r[1 + n + m..1 + 2 * n + m].to_vec())?;
                let v = Train::new(r[1 + n..1 + n + m].to_vec(), r[1 + 2 * n + m..].to_vec())?;
                Ok(Sample {
                    t: r[0],
                    state: S::from_trains(b, u, v)?,
                })
            })
            .collect::<zhs_core::Result<Vec<_>>>()?;
        Ok(Trajectory::from_samples(samples, offset)?)
    }
    Ok(match family {
        Family::Peakon => LoadedTrajectory::Peakon(build(&rows, b, n, m, offset)?),
        Family::Kink => LoadedTrajectory::Kink(build(&rows, b, n, m, offset)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use zhs_core::{integrate, stationary_kink, IntegratorConfig};

    #[test]
    fn stationary_kink_fields_are_odd() {
        let k = stationary_kink(2, 1.0, 1.0, 0.0).unwrap();
        let traj = integrate(&k, &IntegratorConfig::rk4(0.1, 0.2)).unwrap();
        let grid = SampleGrid::new(-5.0, 5.0, 11).unwrap();
        let text = fields_csv(&traj, &grid, &[0.0], "h");
        let rows: Vec<Vec<f64>> = text
            .lines()
            .skip(2)
            .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 11);
        for i in 0..11 {
            assert_eq!(rows[i][2], -rows[10 - i][2]);
        }
        assert_eq!(rows[5][2], 0.0);
    }

    #[test]
    fn constant_amplitudes_give_constant_strings() {
        let k = stationary_kink(1, 0.3, -0.7, 1.0).unwrap();
        let traj = integrate(&k, &IntegratorConfig::rk4(0.1, 1.0)).unwrap();
        let text = trajectory_csv(&traj, "h");
        let cols: Vec<Vec<&str>> = text.lines().skip(5).map(|l| l.split(',').collect()).collect();
        assert_eq!(cols.len(), 11);
        assert!(cols.iter().all(|r| r[1] == "0.3" && r[2] == "-0.7"));
    }

    #[test]
    fn header_layout() {
        let s = PeakonState::pair(2, 1.0, 0.0, 2.0, 1.0).unwrap();
        let traj = integrate(&s, &IntegratorConfig::rk4(0.1, 0.1)).unwrap();
        let text = trajectory_csv(&traj, "abc");
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# config-sha256: abc"));
        assert_eq!(lines.next(), Some("# family: peakon"));
        assert_eq!(lines.next(), Some("# b: 2"));
        assert_eq!(lines.next(), Some("# offset: 0.0 0.0"));
        assert_eq!(
            lines.next(),
            Some("t,u_amplitude_1,v_amplitude_1,u_position_1,v_position_1")
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(parse_trajectory("t,u_amplitude_1\n").is_err());
        assert!(parse_trajectory("# family: kink\n# b: 0\n").is_err());
        let ok =
            "# family: kink\n# b: 1\nt,u_amplitude_1,v_amplitude_1,u_position_1,v_position_1\n0,1,1,0,0\n";
        assert!(parse_trajectory(ok).is_ok());
        assert!(parse_trajectory(&ok.replace("0,1,1,0,0", "0,1,1,0")).is_err());
        assert!(parse_trajectory(&ok.replace("0,1,1,0,0", "0,1,x,0,0")).is_err());
    }
}
