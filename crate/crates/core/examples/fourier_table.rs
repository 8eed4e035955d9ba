//! Dispersion and dissipation of the EG, IG4 and IG6 upwind operators.
//!
//! Prints the closed form next to the operator measured on a periodic grid,
//! then fits the leading error terms of IG6.
//!
//! ```text
//! cargo run --release --example fourier_table [N]
//! ```

use igflow::analysis::fourier::{
    fit_expansion, operator_closed, operator_numeric, resolvable_wavenumbers, FourierScheme,
};

fn main() -> igflow::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(64);
    let schemes = [FourierScheme::Eg, FourierScheme::Ig4, FourierScheme::Ig6];

    println!(
        "{:>8} {:>6} {:>14} {:>14} {:>14} {:>14}",
        "scheme", "beta", "re(closed)", "im(closed)", "re(numeric)", "im(numeric)"
    );
    for scheme in schemes {
        for (k, beta) in resolvable_wavenumbers(n).into_iter().enumerate() {
            if k % (n / 16).max(1) != 0 {
                continue;
            }
            let closed = operator_closed(scheme, beta);
            let numeric = operator_numeric(scheme, beta, n)?;
            println!(
                "{:>8} {beta:>6.3} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
                scheme.to_string(),
                closed.re,
                closed.im,
                numeric.re,
                numeric.im
            );
        }
    }

    let fit = fit_expansion(FourierScheme::Ig6, 2048, 0.05, 0.3, &[6, 8], &[5, 7])?;
    println!();
    println!(
        "IG6 leading terms: re ~ {:.6e} b^6 (1/1440 = {:.6e}), im + b ~ {:.6e} b^5 (1/720 = {:.6e})",
        fit.dissipative,
        -1.0 / 1440.0,
        fit.dispersive,
        -1.0 / 720.0
    );
    Ok(())
}
