//! Trajectory export.
//!
//! Binary layout, all integers u64 and all floats f64, little-endian:
//!
//! ```text
//! offset 0   magic "PTCL1" padded with three NUL bytes
//! offset 8   rows
//! offset 16  columns (always 4)
//! offset 24  seed
//! offset 32  ensemble member
//! offset 40  columns back to back: times, x, p, f_ph
//! ```
//!
//! The run configuration goes to a JSON sidecar next to the data file.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use photocool_core::simulator::{SimConfig, Trajectory, RNG_ALGORITHM};
use photocool_core::SystemParams;
use serde::{Deserialize, Serialize};

pub const MAGIC: [u8; 8] = *b"PTCL1\0\0\0";
const COLUMNS: u64 = 4;

/// Columns read back from a binary file.
#[derive(Debug, Clone, PartialEq)]
pub struct Columns {
    pub seed: u64,
    pub member: u64,
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub f_ph: Vec<f64>,
}

impl From<&Trajectory> for Columns {
    fn from(t: &Trajectory) -> Self {
        Columns {
            seed: t.seed,
            member: t.member,
            times: t.times.clone(),
            x: t.x.clone(),
            p: t.p.clone(),
            f_ph: t.f_ph.clone(),
        }
    }
}

pub fn write_binary(traj: &Trajectory, mut w: impl Write) -> io::Result<()> {
    w.write_all(&MAGIC)?;
    for v in [traj.x.len() as u64, COLUMNS, traj.seed, traj.member] {
        w.write_all(&v.to_le_bytes())?;
    }
    for col in [&traj.times, &traj.x, &traj.p, &traj.f_ph] {
        let mut buf = Vec::with_capacity(col.len() * 8);
        for v in col.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn bad(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

pub fn read_binary(mut r: impl Read) -> io::Result<Columns> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(bad("not a PTCL1 trajectory file"));
    }
    let mut word = [0u8; 8];
    let mut next = |r: &mut dyn Read| -> io::Result<u64> {
        r.read_exact(&mut word)?;
        Ok(u64::from_le_bytes(word))
    };
    let rows = next(&mut r)?;
    let columns = next(&mut r)?;
    let seed = next(&mut r)?;
    let member = next(&mut r)?;
    if columns != COLUMNS {
        return Err(bad(format!("expected {COLUMNS} columns, found {columns}")));
    }
    let rows = usize::try_from(rows).map_err(|_| bad("row count overflows usize"))?;
    let mut read_col = || -> io::Result<Vec<f64>> {
        let mut buf = vec![0u8; rows.checked_mul(8).ok_or_else(|| bad("row count too large"))?];
        r.read_exact(&mut buf)?;
        Ok(buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect())
    };
    let times = read_col()?;
    let x = read_col()?;
    let p = read_col()?;
    let f_ph = read_col()?;
    Ok(Columns {
        seed,
        member,
        times,
        x,
        p,
        f_ph,
    })
}

pub fn write_csv(traj: &Trajectory, w: impl Write) -> io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["time_s", "x_m", "p_kg_m_per_s", "f_ph_n"])?;
    for i in 0..traj.len() {
        wtr.write_record([
            format!("{:e}", traj.times[i]),
            format!("{:e}", traj.x[i]),
            format!("{:e}", traj.p[i]),
            format!("{:e}", traj.f_ph[i]),
        ])?;
    }
    wtr.flush()
}

/// Run description written next to each trajectory file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool_version: String,
    pub rng: String,
    pub seed: u64,
    pub member: u64,
    pub rows: usize,
    pub sample_interval_s: f64,
    pub config: SimConfig,
    pub params: SystemParams,
}

impl Sidecar {
    pub fn new(traj: &Trajectory, params: &SystemParams) -> Self {
        Sidecar {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            rng: RNG_ALGORITHM.to_string(),
            seed: traj.seed,
            member: traj.member,
            rows: traj.len(),
            sample_interval_s: traj.sample_interval(),
            config: traj.config,
            params: *params,
        }
    }
}

/// `<path>.json` for a data file at `path`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}
