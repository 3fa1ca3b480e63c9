//! CSV and JSON formats for worldlines, time maps, energy audits and
//! perturbation runs.
//!
//! Numbers are written in the shortest decimal form that parses back to
//! the same `f64`, so every file round-trips exactly and identical inputs
//! give identical bytes.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chronometry::TimeMapSample;
use crate::dynamics::EnergyRow;
use crate::error::{Error, Result};
use crate::perturbation::PerturbationRun;
use crate::spacetime::{Boost, FrameTag, Vec3};
use crate::worldline::{Sample, Worldline};

pub const WORLDLINE_HEADER: [&str; 7] = ["t", "x", "y", "z", "ux", "uy", "uz"];
pub const TIME_MAP_HEADER: [&str; 3] = ["t_prime", "g", "t"];
pub const ENERGY_HEADER: [&str; 4] = ["t", "kinetic", "potential", "total"];
pub const PERTURBATION_HEADER: [&str; 10] = ["t", "r0x", "r0y", "r0z", "r1x", "r1y", "r1z", "Fx", "Fy", "Fz"];

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
            _ => Error::Parse(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

/// Shortest round-trip decimal form.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

fn write_table<W: Write, const N: usize>(out: W, header: &[&str; N], rows: impl Iterator<Item = [f64; N]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format_f64(*v)))?;
    }
    w.flush()?;
    Ok(())
}

fn read_table<R: Read, const N: usize>(input: R, header: &[&str; N]) -> Result<Vec<[f64; N]>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(Error::Parse(format!("expected header `{}`, found `{}`", header.join(","), found.join(","))));
    }
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        if record.len() != N {
            return Err(Error::Parse(format!("row {}: expected {N} fields, found {}", line + 1, record.len())));
        }
        let mut row = [0.0; N];
        for (i, field) in record.iter().enumerate() {
            row[i] = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {}, column `{}`: `{field}` is not a number", line + 1, header[i])))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_worldline<W: Write>(w: &Worldline, out: W) -> Result<()> {
    write_table(
        out,
        &WORLDLINE_HEADER,
        w.samples().iter().map(|s| [s.t, s.r.x, s.r.y, s.r.z, s.u.x, s.u.y, s.u.z]),
    )
}

/// Parses worldline CSV; the frame is not part of the CSV and is supplied
/// by the caller (or the sidecar, see [`load_worldline`]).
pub fn read_worldline<R: Read>(input: R, frame: FrameTag) -> Result<Worldline> {
    let samples = read_table(input, &WORLDLINE_HEADER)?
        .into_iter()
        .map(|v| Sample::new(v[0], Vec3::new(v[1], v[2], v[3]), Vec3::new(v[4], v[5], v[6])))
        .collect();
    Worldline::new(frame, samples)
}

/// Boost parameters as stored in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostRecord {
    pub v0: f64,
    pub primed: FrameTag,
    pub unprimed: FrameTag,
}

impl From<&Boost> for BoostRecord {
    fn from(b: &Boost) -> Self {
        BoostRecord {
            v0: b.v0(),
            primed: b.primed().clone(),
            unprimed: b.unprimed().clone(),
        }
    }
}

impl BoostRecord {
    pub fn to_boost(&self) -> Result<Boost> {
        Boost::with_frames(self.v0, self.primed.clone(), self.unprimed.clone())
    }
}

/// Worldline sidecar: the frame of the samples and, optionally, the boost
/// relating it to another frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub frame: FrameTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boost: Option<BoostRecord>,
}

/// `path` with its extension replaced by `json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `path` (CSV) and its JSON sidecar.
pub fn save_worldline(path: &Path, w: &Worldline, boost: Option<&Boost>) -> Result<()> {
    let mut csv = Vec::new();
    write_worldline(w, &mut csv)?;
    fs::write(path, csv)?;
    let sidecar = Sidecar {
        frame: w.frame().clone(),
        boost: boost.map(BoostRecord::from),
    };
    fs::write(sidecar_path(path), to_json_pretty(&sidecar)?)?;
    Ok(())
}

/// Reads a worldline CSV and, when present, its sidecar. Without a sidecar
/// the samples are taken to be in the moving frame K′.
pub fn load_worldline(path: &Path) -> Result<(Worldline, Option<Boost>)> {
    let side = sidecar_path(path);
    let sidecar = if side.exists() && side != path {
        serde_json::from_str::<Sidecar>(&fs::read_to_string(&side)?)?
    } else {
        Sidecar {
            frame: FrameTag::moving(),
            boost: None,
        }
    };
    let w = read_worldline(fs::File::open(path)?, sidecar.frame)?;
    let boost = sidecar.boost.map(|b| b.to_boost()).transpose()?;
    Ok((w, boost))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_time_map<W: Write>(samples: &[TimeMapSample], out: W) -> Result<()> {
    write_table(out, &TIME_MAP_HEADER, samples.iter().map(|s| [s.t_prime, s.g, s.t]))
}

pub fn read_time_map<R: Read>(input: R) -> Result<Vec<TimeMapSample>> {
    Ok(read_table(input, &TIME_MAP_HEADER)?
        .into_iter()
        .map(|v| TimeMapSample {
            t_prime: v[0],
            g: v[1],
            t: v[2],
        })
        .collect())
}

pub fn write_energy_audit<W: Write>(rows: &[EnergyRow], out: W) -> Result<()> {
    write_table(out, &ENERGY_HEADER, rows.iter().map(|r| [r.t, r.kinetic, r.potential, r.total]))
}

pub fn read_energy_audit<R: Read>(input: R) -> Result<Vec<EnergyRow>> {
    Ok(read_table(input, &ENERGY_HEADER)?
        .into_iter()
        .map(|v| EnergyRow {
            t: v[0],
            kinetic: v[1],
            potential: v[2],
            total: v[3],
        })
        .collect())
}

/// One row of a perturbation run: zero-order position, correction and
/// time force.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationRow {
    pub t: f64,
    pub r0: Vec3,
    pub r1: Vec3,
    pub force: Vec3,
}

pub fn perturbation_rows(run: &PerturbationRun) -> Vec<PerturbationRow> {
    (0..run.zero.len())
        .map(|i| PerturbationRow {
            t: run.zero.grid.time(i),
            r0: run.zero.r[i],
            r1: run.correction.r[i],
            force: run.time_force[i],
        })
        .collect()
}

pub fn write_perturbation<W: Write>(rows: &[PerturbationRow], out: W) -> Result<()> {
    write_table(
        out,
        &PERTURBATION_HEADER,
        rows.iter().map(|r| [r.t, r.r0.x, r.r0.y, r.r0.z, r.r1.x, r.r1.y, r.r1.z, r.force.x, r.force.y, r.force.z]),
    )
}

pub fn read_perturbation<R: Read>(input: R) -> Result<Vec<PerturbationRow>> {
    Ok(read_table(input, &PERTURBATION_HEADER)?
        .into_iter()
        .map(|v| PerturbationRow {
            t: v[0],
            r0: Vec3::new(v[1], v[2], v[3]),
            r1: Vec3::new(v[4], v[5], v[6]),
            force: Vec3::new(v[7], v[8], v[9]),
        })
        .collect())
}
