//! Interface states of every reconstruction scheme on a density jump,
//! with the BVD switch count of the hybrid schemes.
//!
//! ```text
//! cargo run --example interface_states
//! ```

use igflow::reconstruction::{reconstruct_axis, ReconOptions, ReconScheme};
use igflow::solver::{fill_ghosts, BoundaryCondition, BoundarySet};
use igflow::state::{Field, GasModel, Grid, PrimitiveState};

fn main() -> igflow::Result<()> {
    let gas = GasModel::inviscid(1.4);
    let grid = Grid::line(16, 0.0, 1.0, false)?;
    let mut q = Field::from_primitive_fn(&grid, &gas, |x| {
        if x[0] < 0.5 {
            PrimitiveState::new_1d(1.0, 0.0, 1.0)
        } else {
            PrimitiveState::new_1d(0.125, 0.0, 0.1)
        }
    })?;
    fill_ghosts(&mut q, &grid, &gas, &BoundarySet::uniform(BoundaryCondition::ZeroGradient), 0.0)?;
    let prim = q.to_primitive(&gas);

    for scheme in ReconScheme::ALL {
        let states = reconstruct_axis(&prim, &grid, 0, ReconOptions::new(scheme, gas.gamma))?;
        let rho: Vec<String> = (5..=11)
            .map(|k| {
                let (l, r) = states.at(0, k);
                format!("{:.4}|{:.4}", l[0], r[0])
            })
            .collect();
        println!("{:>6} rho L|R at faces 5..=11: {}", scheme.to_string(), rho.join(" "));
        if scheme.uses_bvd() {
            println!("       fallbacks: {:?}", states.count);
        }
    }
    Ok(())
}
