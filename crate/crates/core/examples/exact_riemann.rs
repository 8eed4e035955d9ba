//! Exact Riemann solutions of the Sod and Lax problems.
//!
//! ```text
//! cargo run --example exact_riemann
//! ```

use igflow::analysis::riemann::{exact_riemann, Wave};
use igflow::state::PrimitiveState;

fn describe(w: &Wave) -> String {
    match w {
        Wave::Shock { speed } => format!("shock at {speed:.6}"),
        Wave::Rarefaction { head, tail } => format!("rarefaction {head:.6} .. {tail:.6}"),
    }
}

fn main() -> igflow::Result<()> {
    let problems = [
        ("sod", PrimitiveState::new_1d(1.0, 0.0, 1.0), PrimitiveState::new_1d(0.125, 0.0, 0.1), 0.2),
        ("lax", PrimitiveState::new_1d(0.445, 0.698, 3.528), PrimitiveState::new_1d(0.5, 0.0, 0.571), 0.14),
    ];
    for (name, left, right, t) in problems {
        let sol = exact_riemann(left, right, 1.4)?;
        println!(
            "{name}: p* = {:.9}, u* = {:.9}, rho*L = {:.6}, rho*R = {:.6} ({} Newton iterations)",
            sol.p_star, sol.u_star, sol.rho_star_left, sol.rho_star_right, sol.iterations
        );
        println!("  left wave:  {}", describe(&sol.left_wave));
        println!("  right wave: {}", describe(&sol.right_wave));
        println!("  x        rho        u          p");
        for k in 0..=10 {
            let x = k as f64 / 10.0;
            let s = sol.at(x, t, 0.5);
            println!("  {x:.2} {:>10.6} {:>10.6} {:>10.6}", s.rho, s.u, s.p);
        }
    }
    Ok(())
}
