//! Sod shock tube with IG4MP and IG6MP against the exact solution.
//! Writes the final IG6MP profile to `sod_final.csv` in the temp directory.
//!
//! ```text
//! cargo run --release --example shock_tube [sod|lax] [N]
//! ```

use igflow::analysis::{l1_error, min_density_pressure};
use igflow::cases::make_case;
use igflow::io::{write_snapshot, Snapshot, SnapshotFormat};
use igflow::reconstruction::ReconScheme;

fn main() -> igflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "sod".into());
    let case = make_case(&name)?;
    let grid = match args.next().and_then(|a| a.parse().ok()) {
        Some(n) => case.grid_with([n, 1, 1])?,
        None => case.grid()?,
    };
    let exact = case.exact.clone().expect("shock tubes carry an exact solution");

    for scheme in [ReconScheme::Muscl3, ReconScheme::Ig4Mp, ReconScheme::Ig6Mp] {
        let sim = case.run(&grid, scheme)?;
        let l1 = l1_error(&sim.q, &grid, |x| exact(x, sim.time).rho)?;
        let (rmin, pmin) = min_density_pressure(&sim.q, &grid, sim.gas());
        println!("{name} {scheme:>6}: {} steps, t={:.4}, density L1 {l1:.4e}, min rho {rmin:.4}, min p {pmin:.4}, MP5 fallbacks {}", sim.steps, sim.time, sim.fallbacks.to_mp5);
        if scheme == ReconScheme::Ig6Mp {
            let snap = Snapshot::from_field(&sim.q, &grid, sim.gas(), &name, sim.time, sim.steps, None)?;
            let path = std::env::temp_dir().join(format!("{name}_final.csv"));
            write_snapshot(&snap, &path, SnapshotFormat::Ascii)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
