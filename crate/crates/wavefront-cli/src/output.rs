//! Files written by the subcommands, and readers for each of them.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use wavefront::profile::{FrontKind, SweepRow, WaveProfile};
use wavefront::simulator::ObservationLog;

pub type IoResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub z: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub h: f64,
    pub c_sharp: Option<f64>,
    pub c_star: Option<f64>,
    pub kind: Option<String>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRow {
    pub t: f64,
    pub x: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub x: f64,
    pub t: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: f64,
    pub t: f64,
    pub left: Option<f64>,
    pub right: Option<f64>,
}

pub fn kind_name(kind: FrontKind) -> &'static str {
    match kind {
        FrontKind::Pushed => "pushed",
        FrontKind::PulledMinimal => "pulled_minimal",
        FrontKind::NonMinimal => "non_minimal",
    }
}

pub fn profile_rows(p: &WaveProfile) -> Vec<ProfileRow> {
    p.grid
        .nodes()
        .into_iter()
        .zip(&p.values)
        .map(|(z, &phi)| ProfileRow { z, phi })
        .collect()
}

pub fn sweep_records(rows: &[SweepRow]) -> Vec<SweepRecord> {
    rows.iter()
        .map(|r| SweepRecord {
            h: r.h,
            c_sharp: r.c_sharp,
            c_star: r.c_star,
            kind: r.kind.map(|k| kind_name(k).to_string()),
            note: r.note.clone(),
        })
        .collect()
}

pub fn snapshot_rows(log: &ObservationLog) -> Vec<SnapshotRow> {
    let Some(grid) = log.grid else {
        return Vec::new();
    };
    let nodes = grid.nodes();
    log.snapshots
        .iter()
        .flat_map(|s| {
            nodes
                .iter()
                .zip(&s.values)
                .map(move |(&x, &u)| SnapshotRow { t: s.t, x, u })
        })
        .collect()
}

pub fn point_rows(log: &ObservationLog) -> Vec<PointRow> {
    log.points
        .iter()
        .flat_map(|p| p.samples.iter().map(move |&(t, u)| PointRow { x: p.x, t, u }))
        .collect()
}

pub fn level_rows(log: &ObservationLog) -> Vec<LevelRow> {
    log.level_sets
        .iter()
        .flat_map(|l| {
            l.samples.iter().map(move |s| LevelRow {
                level: l.level,
                t: s.t,
                left: s.left,
                right: s.right,
            })
        })
        .collect()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> IoResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> IoResult<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<Result<Vec<T>, _>>()?;
    Ok(rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> IoResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> IoResult<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
