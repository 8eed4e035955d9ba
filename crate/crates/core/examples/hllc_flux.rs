//! HLLC flux for a few interface pairs, against the physical flux.
//!
//! ```text
//! cargo run --example hllc_flux
//! ```

use igflow::flux::{convective_flux, hllc_flux, wave_speed_estimates};
use igflow::state::{GasModel, PrimitiveState};

fn main() -> igflow::Result<()> {
    let gas = GasModel::inviscid(1.4);
    let pairs = [
        ("uniform", PrimitiveState::new_2d(1.0, 0.5, 0.2, 1.0), PrimitiveState::new_2d(1.0, 0.5, 0.2, 1.0)),
        ("contact", PrimitiveState::new_2d(1.0, 0.3, 0.0, 1.0), PrimitiveState::new_2d(0.2, 0.3, 0.0, 1.0)),
        ("sod", PrimitiveState::new_1d(1.0, 0.0, 1.0), PrimitiveState::new_1d(0.125, 0.0, 0.1)),
        ("shear", PrimitiveState::new_2d(1.0, 0.0, 1.0, 1.0), PrimitiveState::new_2d(1.0, 0.0, -1.0, 1.0)),
    ];
    for (name, l, r) in pairs {
        let s = wave_speed_estimates(&l, &r, &gas, 0);
        let f = hllc_flux(&l, &r, &gas, 0)?;
        println!("{name}: S_L = {:.5}, S_* = {:.5}, S_R = {:.5}", s.s_left, s.s_star, s.s_right);
        println!("  HLLC     {f:.6?}");
        println!("  F(left)  {:.6?}", convective_flux(&l, &gas, 0));
        println!("  F(right) {:.6?}", convective_flux(&r, &gas, 0));
    }
    Ok(())
}
