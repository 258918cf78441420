//! Deterministic CSV/JSON emission. Every file is written to a temporary
//! sibling and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use lll_core::integrate::Trajectory;
use serde::Serialize;

use crate::error::CliError;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

#[derive(Serialize)]
struct Row {
    t: f64,
    re_a: f64,
    im_a: f64,
    #[serde(rename = "M")]
    mass: f64,
    #[serde(rename = "E")]
    energy: f64,
    #[serde(rename = "H")]
    hamiltonian: f64,
    xalpha: f64,
    front_p50: Option<f64>,
    front_p90: Option<f64>,
}

pub fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    }
    w.into_inner()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
}

pub fn trajectory_csv(traj: &Trajectory) -> Result<Vec<u8>, CliError> {
    csv_bytes(traj.observables.iter().map(|r| Row {
        t: r.t,
        re_a: r.a.re,
        im_a: r.a.im,
        mass: r.mass,
        energy: r.energy,
        hamiltonian: r.hamiltonian,
        xalpha: r.xalpha,
        front_p50: r.front_p50,
        front_p90: r.front_p90,
    }))
}

#[derive(Serialize)]
struct Snapshot {
    t: f64,
    /// `[re, im]` per coordinate; coordinate 0 is the condensate.
    z: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    command: &'a str,
    system: String,
    scheme: &'a str,
    dt: f64,
    t_end: f64,
    /// `false` when the run stopped on a numerical failure.
    complete: bool,
    snapshots: Vec<Snapshot>,
}

pub struct RunMeta<'a> {
    pub command: &'a str,
    pub system: String,
    pub scheme: &'a str,
    pub dt: f64,
    pub t_end: f64,
    pub complete: bool,
}

pub fn sidecar_json(meta: RunMeta<'_>, traj: &Trajectory) -> Result<Vec<u8>, CliError> {
    let doc = Sidecar {
        command: meta.command,
        system: meta.system,
        scheme: meta.scheme,
        dt: meta.dt,
        t_end: meta.t_end,
        complete: meta.complete,
        snapshots: traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(t, z)| Snapshot {
                t: *t,
                z: z.iter().map(|c| [c.re, c.im]).collect(),
            })
            .collect(),
    };
    let mut bytes =
        serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn output_path(dir: &Path, prefix: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{prefix}{suffix}"))
}
