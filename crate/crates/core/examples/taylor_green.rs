//! Inviscid Taylor-Green vortex: kinetic energy and enstrophy histories.
//!
//! The default 16^3 grid to t=2 runs in seconds; the acceptance run uses 32^3
//! to the case's final time.
//!
//! ```text
//! cargo run --release --example taylor_green [N] [t_final]
//! ```

use igflow::analysis::{enstrophy, kinetic_energy};
use igflow::cases::make_case;
use igflow::reconstruction::ReconScheme;

fn main() -> igflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(16);
    let t_final: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(2.0);
    let case = make_case("tgv_inviscid")?;
    let grid = case.grid_with([n; 3])?;

    for scheme in [ReconScheme::Ig4Mp, ReconScheme::Ig6Mp, ReconScheme::Muscl3] {
        let gradient = scheme.gradient_scheme().unwrap_or(igflow::gradients::GradientScheme::Cd6);
        let mut sim = case.simulation(&grid, case.scheme_options(scheme), None)?;
        let ke0 = kinetic_energy(&sim.q, &grid);
        let mut next = 0.0;
        println!("{scheme}: t, KE/KE0, enstrophy ({gradient:?})");
        sim.advance_to(t_final, |s| {
            if s.time + 1e-12 >= next {
                let z = enstrophy(&s.q, &grid, s.gas(), gradient)?;
                println!("  {:.3} {:.6} {z:.5e}", s.time, kinetic_energy(&s.q, &grid) / ke0);
                next += 0.5;
            }
            Ok(())
        })?;
    }
    Ok(())
}
