//! Two-dimensional Riemann problem (configuration 3) on a coarse grid, with
//! the final state written as binary legacy VTK.
//!
//! ```text
//! cargo run --release --example riemann_2d [N]
//! ```

use igflow::analysis::min_density_pressure;
use igflow::cases::make_case;
use igflow::io::{write_snapshot, Snapshot, SnapshotFormat};
use igflow::reconstruction::ReconScheme;

fn main() -> igflow::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let case = make_case("riemann_config3")?;
    let grid = case.grid_with([n, n, 1])?;
    let mut sim = case.simulation(&grid, case.scheme_options(ReconScheme::Ig6Mp), None)?;
    sim.advance_to(case.t_final, |s| {
        if s.steps % 100 == 0 {
            let (r, p) = min_density_pressure(&s.q, s.grid(), s.gas());
            println!("step {:>5} t={:.4} min rho {r:.4} min p {p:.4}", s.steps, s.time);
        }
        Ok(())
    })?;
    println!("done: {} steps, fallbacks {:?}", sim.steps, sim.fallbacks);
    let snap = Snapshot::from_field(&sim.q, &grid, sim.gas(), "riemann_config3", sim.time, sim.steps, None)?;
    let path = std::env::temp_dir().join("riemann_config3_final.vtk");
    write_snapshot(&snap, &path, SnapshotFormat::Binary)?;
    println!("wrote {}", path.display());
    Ok(())
}
