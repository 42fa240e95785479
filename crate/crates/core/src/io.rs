//! CSV and JSON artifacts.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which parses back to
//! the same `f64` bit pattern.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::biotsavart::{Particle, RadialProfile, SteadyBackground, VorticityParticles};
use crate::error::{Error, Result};
use crate::geometry::{HelixParams, Vec2};
use crate::transport::{BackgroundMode, TrajectoryState};

pub const SNAPSHOT_HEADER: [&str; 5] = ["j", "z1", "z2", "gamma", "area"];
pub const SNAPSHOT_INDEX: &str = "index.json";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a CSV with the given header; every row must have the header's width.
pub fn emit_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn emit_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn write_snapshot_csv(path: &Path, w: &VorticityParticles) -> Result<()> {
    let rows: Vec<Vec<String>> = w
        .particles()
        .iter()
        .enumerate()
        .map(|(j, p)| vec![j.to_string(), fmt_f64(p.z.x), fmt_f64(p.z.y), fmt_f64(p.gamma), fmt_f64(p.area)])
        .collect();
    emit_csv(path, &SNAPSHOT_HEADER, &rows)
}

fn parse_f64(s: &str, path: &Path) -> Result<f64> {
    s.trim().parse().map_err(|_| {
        Error::invalid("invalid_snapshot", format!("{}: cannot parse {s:?} as a number", path.display()))
    })
}

pub fn read_snapshot_csv(path: &Path, h: HelixParams) -> Result<VorticityParticles> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SNAPSHOT_HEADER {
        return Err(Error::invalid(
            "invalid_snapshot",
            format!("{}: header must be {}", path.display(), SNAPSHOT_HEADER.join(",")),
        ));
    }
    let mut ps = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let j: usize = rec[0].trim().parse().map_err(|_| {
            Error::invalid("invalid_snapshot", format!("{}: bad index on row {i}", path.display()))
        })?;
        if j != i {
            return Err(Error::invalid("invalid_snapshot", format!("{}: rows out of order at {i}", path.display())));
        }
        ps.push(Particle {
            z: Vec2::new(parse_f64(&rec[1], path)?, parse_f64(&rec[2], path)?),
            gamma: parse_f64(&rec[3], path)?,
            area: parse_f64(&rec[4], path)?,
        });
    }
    VorticityParticles::new(h, ps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotEntry {
    pub file: String,
    pub t: f64,
    pub step: usize,
}

/// Everything `weakform-check` needs to re-evaluate the velocity of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotIndex {
    pub kappa: f64,
    pub dt: f64,
    pub blob_epsilon: f64,
    pub quad_tolerance: f64,
    pub lp_exponent: f64,
    pub background_mode: BackgroundMode,
    pub profile: Option<RadialProfile>,
    pub entries: Vec<SnapshotEntry>,
}

/// Writes one CSV per state plus `index.json` into `dir`.
pub fn write_snapshots(dir: &Path, states: &[TrajectoryState], mut index: SnapshotIndex, steps: &[usize]) -> Result<()> {
    fs::create_dir_all(dir)?;
    index.entries.clear();
    for (k, s) in states.iter().enumerate() {
        let file = format!("snapshot_{k:05}.csv");
        write_snapshot_csv(&dir.join(&file), &s.particles)?;
        index.entries.push(SnapshotEntry {
            file,
            t: s.t,
            step: steps.get(k).copied().unwrap_or(k),
        });
    }
    emit_json(&dir.join(SNAPSHOT_INDEX), &index)
}

pub fn read_index(dir: &Path) -> Result<SnapshotIndex> {
    let path = dir.join(SNAPSHOT_INDEX);
    let text = fs::read_to_string(&path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::invalid("invalid_snapshot_index", format!("{}: {e}", path.display())))
}

/// Loads a snapshot series written by [`write_snapshots`].
pub fn read_snapshots(dir: &Path) -> Result<(SnapshotIndex, Vec<TrajectoryState>)> {
    let index = read_index(dir)?;
    let h = HelixParams::new(index.kappa)?;
    let background = index.profile.map(|p| SteadyBackground::new(p, h));
    let mut states = Vec::with_capacity(index.entries.len());
    for e in &index.entries {
        let path: PathBuf = dir.join(&e.file);
        states.push(TrajectoryState {
            t: e.t,
            particles: read_snapshot_csv(&path, h)?,
            background,
        });
    }
    Ok((index, states))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip_is_bitwise() {
        let h = HelixParams::new(1.0).unwrap();
        let ps = vec![
            Particle {
                z: Vec2::new(0.1, -1.0 / 3.0),
                gamma: std::f64::consts::PI * 1e-7,
                area: 0.0123,
            },
            Particle {
                z: Vec2::new(-2.5e-300, 7.0),
                gamma: -1.0 / 7.0,
                area: 1.0,
            },
        ];
        let w = VorticityParticles::new(h, ps).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_snapshot_csv(&path, &w).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("j,z1,z2,gamma,area\n"));
        let back = read_snapshot_csv(&path, h).unwrap();
        for (a, b) in w.particles().iter().zip(back.particles()) {
            assert_eq!(a.z.x.to_bits(), b.z.x.to_bits());
            assert_eq!(a.z.y.to_bits(), b.z.y.to_bits());
            assert_eq!(a.gamma.to_bits(), b.gamma.to_bits());
            assert_eq!(a.area.to_bits(), b.area.to_bits());
        }
    }

    #[test]
    fn rejects_wrong_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        fs::write(&path, "j,x,y,gamma,area\n0,0,0,1,1\n").unwrap();
        let e = read_snapshot_csv(&path, HelixParams::new(1.0).unwrap()).unwrap_err();
        assert_eq!(e.code(), "invalid_snapshot");
    }
}
