//! CSV readers and writers for trajectories, boundary-flux series,
//! energy series, and profiles.
//!
//! Every number is written with Rust's default float `Display`, which
//! emits the shortest string that parses back to the identical bits —
//! files therefore round-trip exactly and identical runs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{CellField, FluxSample, GridSpec, Trajectory};

/// `t,x,u` rows, one per (snapshot, cell), snapshots in time order.
pub fn snapshots_csv(traj: &Trajectory) -> Result<String> {
    let grid = traj.grid()?;
    let centers: Vec<f64> = grid.centers().collect();
    let mut out = String::from("t,x,u\n");
    for snap in traj.snapshots() {
        let t = snap.time();
        for (x, u) in centers.iter().zip(snap.values()) {
            let _ = writeln!(out, "{t},{x},{u}");
        }
    }
    Ok(out)
}

pub fn write_snapshots(path: &Path, traj: &Trajectory) -> Result<()> {
    write_text(path, &snapshots_csv(traj)?)
}

/// Rebuild a trajectory from a `t,x,u` file.  Rows must be grouped by
/// snapshot in time order with a fixed cell count per snapshot (the
/// format [`write_snapshots`] emits); the grid is inferred from the
/// cell count.
pub fn read_snapshots(path: &Path, epsilon: f64, cfl: f64) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "t,x,u" => {}
        other => {
            return Err(Error::Io(format!(
                "{}: expected header `t,x,u`, got {:?}",
                path.display(),
                other.unwrap_or("<empty>")
            )))
        }
    }
    // Group rows into blocks of equal t.
    let mut blocks: Vec<(f64, Vec<f64>)> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(t), Some(_x), Some(u), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::Io(format!(
                "{}: line {}: expected three columns",
                path.display(),
                idx + 2
            )));
        };
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| {
                Error::Io(format!(
                    "{}: line {}: bad {what} `{s}`",
                    path.display(),
                    idx + 2
                ))
            })
        };
        let t = parse(t, "time")?;
        let u = parse(u, "value")?;
        match blocks.last_mut() {
            Some((bt, values)) if *bt == t => values.push(u),
            _ => blocks.push((t, vec![u])),
        }
    }
    if blocks.is_empty() {
        return Err(Error::Io(format!("{}: no data rows", path.display())));
    }
    let n = blocks[0].1.len();
    let grid = GridSpec::new(n)?;
    let mut snapshots = Vec::with_capacity(blocks.len());
    for (t, values) in blocks {
        if values.len() != n {
            return Err(Error::Io(format!(
                "{}: snapshot at t = {t} has {} cells, expected {n}",
                path.display(),
                values.len()
            )));
        }
        snapshots.push(CellField::from_values(grid, t, values)?);
    }
    Trajectory::from_parts(epsilon, cfl, snapshots, Vec::new())
}

/// `t,F0,F1` rows, one per time step (`t` is the beginning-of-step
/// time).
pub fn fluxes_csv(samples: &[FluxSample]) -> String {
    let mut out = String::from("t,F0,F1\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{}", s.t, s.f_left, s.f_right);
    }
    out
}

pub fn write_fluxes(path: &Path, samples: &[FluxSample]) -> Result<()> {
    write_text(path, &fluxes_csv(samples))
}

/// Generic two-column series, e.g. `t,energy`.
pub fn series_csv(header: &str, rows: &[(f64, f64)]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for (a, b) in rows {
        let _ = writeln!(out, "{a},{b}");
    }
    out
}

pub fn write_series(path: &Path, header: &str, rows: &[(f64, f64)]) -> Result<()> {
    write_text(path, &series_csv(header, rows))
}

/// `x,v` rows for a single profile.
pub fn profile_csv(field: &CellField) -> String {
    let mut out = String::from("x,v\n");
    for (x, v) in field.grid().centers().zip(field.values()) {
        let _ = writeln!(out, "{x},{v}");
    }
    out
}

pub fn write_profile(path: &Path, field: &CellField) -> Result<()> {
    write_text(path, &profile_csv(field))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| Error::Io(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("qslab-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn snapshots_round_trip_bit_for_bit() {
        let grid = GridSpec::new(16).unwrap();
        let mut traj = Trajectory::new(0.1, 0.9);
        for k in 0..4 {
            let t = k as f64 * 0.31;
            traj.push_snapshot(CellField::from_fn(grid, t, |x| {
                0.5 + 0.4 * (13.7 * x + t).sin()
            }))
            .unwrap();
        }
        let path = tmp("snapshots.csv");
        write_snapshots(&path, &traj).unwrap();
        let back = read_snapshots(&path, 0.1, 0.9).unwrap();
        assert_eq!(back.snapshots().len(), 4);
        for (a, b) in traj.snapshots().iter().zip(back.snapshots()) {
            assert_eq!(a.time().to_bits(), b.time().to_bits());
            for (x, y) in a.values().iter().zip(b.values()) {
                assert_eq!(x.to_bits(), y.to_bits(), "value mismatch after round trip");
            }
        }
    }

    #[test]
    fn malformed_snapshot_files_are_rejected() {
        let path = tmp("bad.csv");
        std::fs::write(&path, "wrong,header\n1,2,3\n").unwrap();
        assert!(read_snapshots(&path, 0.1, 0.9).is_err());
        std::fs::write(&path, "t,x,u\n0,0.5\n").unwrap();
        assert!(read_snapshots(&path, 0.1, 0.9).is_err());
        std::fs::write(&path, "t,x,u\n").unwrap();
        assert!(read_snapshots(&path, 0.1, 0.9).is_err());
        // Ragged snapshot blocks.
        std::fs::write(&path, "t,x,u\n0,0.1,0.5\n0,0.3,0.5\n1,0.1,0.5\n").unwrap();
        assert!(read_snapshots(&path, 0.1, 0.9).is_err());
    }

    #[test]
    fn flux_and_series_files_have_fixed_headers() {
        let samples = vec![FluxSample {
            t: 0.0,
            dt: 0.5,
            f_left: 0.21,
            f_right: 0.16,
        }];
        assert_eq!(fluxes_csv(&samples), "t,F0,F1\n0,0.21,0.16\n");
        assert_eq!(
            series_csv("t,energy", &[(0.0, 1.5), (0.5, 1.25)]),
            "t,energy\n0,1.5\n0.5,1.25\n"
        );
        let grid = GridSpec::new(4).unwrap();
        let field = CellField::from_values(grid, 0.0, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(
            profile_csv(&field),
            "x,v\n0.125,0.1\n0.375,0.2\n0.625,0.3\n0.875,0.4\n"
        );
    }
}
