//! Lists the registered cases with their domains, default grids and presets.
//!
//! ```text
//! cargo run --example case_registry
//! ```

use igflow::cases::{make_case, CASE_NAMES};

fn main() -> igflow::Result<()> {
    for name in CASE_NAMES {
        let c = make_case(name)?;
        let presets: Vec<String> = c.presets.iter().map(|(p, n)| format!("{p}={}x{}x{}", n[0], n[1], n[2])).collect();
        println!(
            "{name:<20} {}D  [{:?} .. {:?}]  n={:?}  t={}  exact={}  presets: {}",
            c.dimension(),
            &c.lower[..c.dimension()],
            &c.upper[..c.dimension()],
            &c.n[..c.dimension()],
            c.t_final,
            c.exact.is_some(),
            if presets.is_empty() { "-".into() } else { presets.join(" ") }
        );
    }
    Ok(())
}
