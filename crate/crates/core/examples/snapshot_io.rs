//! Writes a 2D vortex snapshot as legacy VTK in ASCII and binary form, then
//! reads both back and compares.
//!
//! ```text
//! cargo run --example snapshot_io
//! ```

use igflow::cases::make_case;
use igflow::gradients::GradientScheme;
use igflow::io::{read_snapshot, snapshot_name, write_snapshot, Snapshot, SnapshotFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let case = make_case("isentropic_vortex")?;
    let grid = case.grid_with([32, 32, 1])?;
    let sim = case.simulation(&grid, case.scheme_options(igflow::reconstruction::ReconScheme::Ig4Mp), None)?;
    let mut q = sim.q.clone();
    igflow::solver::fill_ghosts(&mut q, &grid, sim.gas(), &sim.op.bcs, 0.0)?;
    let snap = Snapshot::from_field(&q, &grid, sim.gas(), "isentropic_vortex", 0.0, 0, Some(GradientScheme::Cd4))?;

    let dir = std::env::temp_dir().join("igflow_snapshot_io");
    std::fs::create_dir_all(&dir)?;
    for format in [SnapshotFormat::Ascii, SnapshotFormat::Binary] {
        let path = dir.join(format!("{format:?}_{}", snapshot_name(&snap, 0)));
        write_snapshot(&snap, &path, format)?;
        let back = read_snapshot(&path)?;
        let bytes = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
        println!(
            "{format:?}: {} ({bytes} bytes), fields {:?}, identical: {}",
            path.display(),
            back.scalars
                .iter()
                .map(|(n, _)| n.as_str())
                .chain(back.vectors.iter().map(|(n, _)| n.as_str()))
                .collect::<Vec<_>>(),
            back == snap
        );
    }
    Ok(())
}
