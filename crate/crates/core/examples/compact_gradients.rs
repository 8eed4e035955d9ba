//! Accuracy of the EG2, CD4 and CD6 first and second derivatives on a
//! periodic sine, under grid refinement.
//!
//! ```text
//! cargo run --example compact_gradients
//! ```

use std::f64::consts::PI;

use igflow::gradients::{derivatives, GradientScheme};
use igflow::solver::{fill_ghosts, BoundarySet};
use igflow::state::{Field, GasModel, Grid, PrimitiveState};

fn main() -> igflow::Result<()> {
    let gas = GasModel::inviscid(1.4);
    for scheme in [GradientScheme::Eg2, GradientScheme::Cd4, GradientScheme::Cd6] {
        let mut prev: Option<(f64, f64)> = None;
        for n in [16, 32, 64, 128] {
            let grid = Grid::line(n, 0.0, 2.0 * PI, true)?;
            let mut q = Field::from_primitive_fn(&grid, &gas, |x| PrimitiveState::new_1d(2.0 + x[0].sin(), 0.0, 1.0))?;
            fill_ghosts(&mut q, &grid, &gas, &BoundarySet::periodic(), 0.0)?;
            let prim = q.to_primitive(&gas);
            let d = derivatives(&prim, &grid, 0, scheme)?;
            let (mut e1, mut e2) = (0.0f64, 0.0f64);
            for (i, j, k) in grid.interior_cells() {
                let x = grid.center(0, i);
                let idx = grid.index(i + grid.offset(0), j + grid.offset(1), k + grid.offset(2));
                e1 = e1.max((d.physical_first(&grid, idx)[0] - x.cos()).abs());
                e2 = e2.max((d.physical_second(&grid, idx)[0] + x.sin()).abs());
            }
            let order = prev
                .map(|(p1, p2)| format!("  orders {:.2} {:.2}", (p1 / e1).log2(), (p2 / e2).log2()))
                .unwrap_or_default();
            println!("{scheme:?} n={n:>4}: max|d1 err| {e1:.3e}  max|d2 err| {e2:.3e}{order}");
            prev = Some((e1, e2));
        }
    }
    Ok(())
}
