//! Configuration, snapshot files, run manifests and run orchestration.

pub mod config;
pub mod snapshot;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{enstrophy, kinetic_energy, min_density_pressure};
use crate::cases::Diagnostic;
use crate::error::{Error, Result};
use crate::reconstruction::FallbackCount;
use crate::solver::Simulation;

pub use config::{parse_config, RunConfig, SnapshotFormat};
pub use snapshot::{read_snapshot, snapshot_name, write_snapshot, Snapshot};

pub const MANIFEST_NAME: &str = "manifest.json";
pub const DIAGNOSTICS_NAME: &str = "diagnostics.csv";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub generator: String,
    pub case: String,
    pub scheme: String,
    pub config: String,
    pub grid: [usize; 3],
    pub t_final: f64,
    pub steps: usize,
    pub fallback_mp5: u64,
    pub fallback_first_order: u64,
    pub fallback_evaluations: u64,
    pub files: Vec<FileEntry>,
}

pub fn sha256_file(path: &Path) -> Result<(String, u64)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for b in digest {
        let _ = write!(hex, "{b:02x}");
    }
    Ok((hex, bytes.len() as u64))
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if path != root.join(MANIFEST_NAME) {
            out.push(path);
        }
    }
    Ok(())
}

/// Checksums every file under `dir` except the manifest itself.
pub fn file_entries(dir: &Path) -> Result<Vec<FileEntry>> {
    let mut files = Vec::new();
    collect_files(dir, dir, &mut files)?;
    files.sort();
    files
        .iter()
        .map(|p| {
            let (sha256, bytes) = sha256_file(p)?;
            let rel = p.strip_prefix(dir).unwrap_or(p);
            Ok(FileEntry { path: rel.to_string_lossy().replace('\\', "/"), sha256, bytes })
        })
        .collect()
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<PathBuf> {
    let path = dir.join(MANIFEST_NAME);
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::Snapshot { path: path.clone(), message: e.to_string() })?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_NAME);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Snapshot { path, message: e.to_string() })
}

/// Background thread writing snapshots in the order they are queued.
pub struct SnapshotWriter {
    tx: Option<mpsc::Sender<(Snapshot, PathBuf)>>,
    handle: Option<thread::JoinHandle<Result<()>>>,
}

impl SnapshotWriter {
    pub fn new(format: SnapshotFormat) -> Self {
        let (tx, rx) = mpsc::channel::<(Snapshot, PathBuf)>();
        let handle = thread::spawn(move || {
            for (snap, path) in rx {
                write_snapshot(&snap, &path, format)?;
            }
            Ok(())
        });
        Self { tx: Some(tx), handle: Some(handle) }
    }

    pub fn submit(&self, snap: Snapshot, path: PathBuf) -> Result<()> {
        let tx = self.tx.as_ref().expect("writer already finished");
        tx.send((snap, path.clone()))
            .map_err(|_| Error::Snapshot { path, message: "snapshot writer stopped early".into() })
    }

    /// Waits for every queued snapshot to reach the disk.
    pub fn finish(mut self) -> Result<()> {
        self.tx.take();
        match self.handle.take().map(|h| h.join()) {
            Some(Ok(r)) => r,
            Some(Err(_)) => Err(Error::Config("snapshot writer panicked".into())),
            None => Ok(()),
        }
    }
}

impl Drop for SnapshotWriter {
    fn drop(&mut self) {
        self.tx.take();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

/// Outcome of [`run`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output: PathBuf,
    pub steps: usize,
    pub time: f64,
    pub fallbacks: FallbackCount,
    pub files: Vec<FileEntry>,
}

struct DiagnosticsTable {
    columns: Vec<Diagnostic>,
    text: String,
}

impl DiagnosticsTable {
    fn new(columns: Vec<Diagnostic>) -> Self {
        let mut text = String::from("step,time,dt");
        for c in &columns {
            text += match c {
                Diagnostic::KineticEnergy => ",kinetic_energy",
                Diagnostic::Enstrophy => ",enstrophy",
                Diagnostic::MinDensityPressure => ",min_rho,min_p",
                Diagnostic::Fallbacks => ",fallback_mp5,fallback_first_order,fallback_evaluations",
            };
        }
        text.push('\n');
        Self { columns, text }
    }

    fn record(&mut self, sim: &Simulation, cfg: &RunConfig) -> Result<()> {
        let dt = sim.history.last().map_or(0.0, |r| r.dt);
        let last = sim.history.last().map(|r| r.fallbacks).unwrap_or_default();
        let _ = write!(self.text, "{},{:.16e},{:.16e}", sim.steps, sim.time, dt);
        for c in &self.columns {
            match c {
                Diagnostic::KineticEnergy => {
                    let _ = write!(self.text, ",{:.16e}", kinetic_energy(&sim.q, sim.grid()));
                }
                Diagnostic::Enstrophy => {
                    let z = enstrophy(&sim.q, sim.grid(), sim.gas(), cfg.diagnostic_gradient())?;
                    let _ = write!(self.text, ",{z:.16e}");
                }
                Diagnostic::MinDensityPressure => {
                    let (r, p) = min_density_pressure(&sim.q, sim.grid(), sim.gas());
                    let _ = write!(self.text, ",{r:.16e},{p:.16e}");
                }
                Diagnostic::Fallbacks => {
                    let _ = write!(self.text, ",{},{},{}", last.to_mp5, last.to_first_order, last.evaluations);
                }
            }
        }
        self.text.push('\n');
        Ok(())
    }
}

/// Runs a configured case to completion, writing snapshots, diagnostics and
/// the manifest into the output directory.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cfg.threads > 0 {
        builder = builder.num_threads(cfg.threads);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_in_pool(cfg))
}

fn run_in_pool(cfg: &RunConfig) -> Result<RunSummary> {
    let case = cfg.case_spec()?;
    let grid = case.grid_with(cfg.grid.unwrap_or(case.n))?;
    let t_final = cfg.t_final.unwrap_or(case.t_final);
    let mut options = case.scheme_options(cfg.scheme);
    options.characteristic = cfg.characteristic;
    let mut sim = case.simulation(&grid, options, Some(cfg.cfl))?;

    let dir = &cfg.output;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let writer = SnapshotWriter::new(cfg.format);
    let vort = if grid.dimension() > 1 && (case.gas.viscous || case.diagnostics.contains(&Diagnostic::Enstrophy)) {
        Some(cfg.diagnostic_gradient())
    } else {
        None
    };
    let mut index = 0;
    let snapshot = |sim: &Simulation, index: &mut usize| -> Result<()> {
        let snap = Snapshot::from_field(&sim.q, sim.grid(), sim.gas(), case.name, sim.time, sim.steps, vort)?;
        let path = dir.join(snapshot_name(&snap, *index));
        *index += 1;
        writer.submit(snap, path)
    };
    snapshot(&sim, &mut index)?;

    let mut table = cfg.diagnostics.then(|| DiagnosticsTable::new(case.diagnostics.clone()));
    if let Some(t) = table.as_mut() {
        t.record(&sim, cfg)?;
    }
    let every = cfg.diagnostics_every;
    let mut targets = Vec::new();
    if let Some(dt) = cfg.snapshot_every {
        let mut k = 1;
        while (k as f64) * dt < t_final * (1.0 - 1e-12) {
            targets.push(k as f64 * dt);
            k += 1;
        }
    }
    targets.push(t_final);
    for target in targets {
        sim.advance_to(target, |s| match table.as_mut() {
            Some(t) if s.steps % every == 0 => t.record(s, cfg),
            _ => Ok(()),
        })?;
        snapshot(&sim, &mut index)?;
    }
    if let Some(t) = table.as_mut() {
        if sim.steps % every != 0 {
            t.record(&sim, cfg)?;
        }
        let path = dir.join(DIAGNOSTICS_NAME);
        std::fs::write(&path, &t.text).map_err(|e| Error::io(&path, e))?;
    }
    writer.finish()?;

    let files = file_entries(dir)?;
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        generator: format!("igflow {}", env!("CARGO_PKG_VERSION")),
        case: case.name.to_string(),
        scheme: cfg.scheme.to_string(),
        config: cfg.to_text(),
        grid: grid.n,
        t_final,
        steps: sim.steps,
        fallback_mp5: sim.fallbacks.to_mp5,
        fallback_first_order: sim.fallbacks.to_first_order,
        fallback_evaluations: sim.fallbacks.evaluations,
        files: files.clone(),
    };
    write_manifest(dir, &manifest)?;
    Ok(RunSummary { output: dir.clone(), steps: sim.steps, time: sim.time, fallbacks: sim.fallbacks, files })
}
