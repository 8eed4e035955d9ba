//! Grid convergence of the IG schemes on the smooth cases.
//!
//! ```text
//! cargo run --release --example convergence [linear_ooa|isentropic_vortex]
//! ```

use igflow::cases::{convergence_study, make_case};
use igflow::reconstruction::ReconScheme;

fn main() -> igflow::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "linear_ooa".into());
    let case = make_case(&name)?;
    let sizes: &[usize] = if name == "isentropic_vortex" { &[25, 50, 100] } else { &[10, 20, 40, 80] };
    println!("scheme,n,error,order");
    for scheme in [ReconScheme::Ig4Mp, ReconScheme::Ig6Mp] {
        for row in convergence_study(&case, scheme, sizes)? {
            let order = row.order.map(|o| format!("{o:.3}")).unwrap_or_default();
            println!("{scheme},{},{:.4e},{order}", row.n, row.error);
        }
    }
    Ok(())
}
