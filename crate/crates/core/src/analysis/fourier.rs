//! Fourier symbols of the linear upwind schemes.
//!
//! Operators are normalised to unit spacing: the exact convection operator
//! of the mode `exp(i beta x / dx)` is `-i beta`. The real part measures
//! dissipation, the imaginary part dispersion.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gradients::{explicit_first, explicit_second, GradientScheme, LineGradients};

/// Linear schemes with a Fourier symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FourierScheme {
    FirstOrder,
    Eg,
    Ig4,
    Ig6,
}

impl FourierScheme {
    pub const ALL: [FourierScheme; 4] =
        [FourierScheme::FirstOrder, FourierScheme::Eg, FourierScheme::Ig4, FourierScheme::Ig6];

    pub fn name(self) -> &'static str {
        match self {
            FourierScheme::FirstOrder => "FO",
            FourierScheme::Eg => "EG",
            FourierScheme::Ig4 => "IG4",
            FourierScheme::Ig6 => "IG6",
        }
    }
}

impl fmt::Display for FourierScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FourierScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FO" => Ok(FourierScheme::FirstOrder),
            "EG" | "MUSCL3" => Ok(FourierScheme::Eg),
            "IG4" => Ok(FourierScheme::Ig4),
            "IG6" => Ok(FourierScheme::Ig6),
            _ => Err(Error::Config(format!("unknown Fourier scheme '{s}'"))),
        }
    }
}

/// Explicit-gradient (MUSCL3) operator.
pub fn operator_eg(beta: f64) -> Complex64 {
    let (s, c) = beta.sin_cos();
    Complex64::new(-(c - 1.0).powi(2) / 3.0, s * (c - 4.0) / 3.0)
}

pub fn operator_ig4(beta: f64) -> Complex64 {
    let (s, c) = beta.sin_cos();
    let den = 12.0 * (5.0 * c + 7.0).powi(2);
    let re = (c - 1.0).powi(2) * (c.powi(3) - 7.0 * c * c + 11.0 * c - 5.0) / den;
    let im = -s * (c.powi(4) - 8.0 * c.powi(3) + 78.0 * c * c + 728.0 * c + 929.0) / den;
    Complex64::new(re, im)
}

/// Denominator of the imaginary part of the IG6 closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ig6Denominator {
    /// `108 (2 cos b + 3)^2`, same as the real part.
    Consistent,
    /// `108 (2 cos b + 37)^2`.
    Printed,
}

pub fn operator_ig6(beta: f64, variant: Ig6Denominator) -> Complex64 {
    let (s, c) = beta.sin_cos();
    let den_re = 108.0 * (2.0 * c + 3.0).powi(2);
    let den_im = match variant {
        Ig6Denominator::Consistent => den_re,
        Ig6Denominator::Printed => 108.0 * (2.0 * c + 37.0).powi(2),
    };
    let re = (c - 1.0).powi(2) * (c.powi(3) - 7.0 * c * c + 26.0 * c - 20.0) / den_re;
    let im = -s * (c.powi(4) - 8.0 * c.powi(3) + 105.0 * c * c + 1070.0 * c + 1532.0) / den_im;
    Complex64::new(re, im)
}

pub fn operator_first_order(beta: f64) -> Complex64 {
    -(Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -beta))
}

/// Closed-form symbol (IG6 with the consistent denominator).
pub fn operator_closed(scheme: FourierScheme, beta: f64) -> Complex64 {
    match scheme {
        FourierScheme::FirstOrder => operator_first_order(beta),
        FourierScheme::Eg => operator_eg(beta),
        FourierScheme::Ig4 => operator_ig4(beta),
        FourierScheme::Ig6 => operator_ig6(beta, Ig6Denominator::Consistent),
    }
}

/// Scaled first-derivative symbol `G0 dx / (i Q0)` of a compact scheme.
pub fn compact_first_symbol(scheme: GradientScheme, beta: f64) -> f64 {
    let (s, c) = beta.sin_cos();
    match scheme {
        GradientScheme::Eg2 => s,
        GradientScheme::Cd4 => (s * c + 11.0 * s) / (5.0 * c + 7.0),
        GradientScheme::Cd6 => s * (c + 14.0) / (3.0 * (2.0 * c + 3.0)),
    }
}

/// Scaled second-derivative symbol `H0 dx^2 / Q0` (the first operator applied twice).
pub fn compact_second_symbol(scheme: GradientScheme, beta: f64) -> f64 {
    let g = compact_first_symbol(scheme, beta);
    -g * g
}

/// Applies the discrete pipeline (gradients, interface state, upwind flux
/// `F = Q^L`, flux difference) to one real periodic sample line.
fn upwind_residual(scheme: FourierScheme, samples: &[f64]) -> Result<Vec<f64>> {
    let n = samples.len();
    const G: usize = 5;
    let ext = n + 2 * G;
    let line: Vec<f64> = (0..ext).map(|e| samples[(e + n - G) % n]).collect();
    let mut left = vec![0.0; ext];
    match scheme {
        FourierScheme::FirstOrder => left.copy_from_slice(&line),
        FourierScheme::Eg | FourierScheme::Ig4 | FourierScheme::Ig6 => {
            let (mut d1, mut d2, mut s) = (vec![0.0; ext], vec![0.0; ext], vec![0.0; ext]);
            match scheme {
                FourierScheme::Eg => {
                    explicit_first(&line, &mut d1);
                    explicit_second(&line, &mut d2);
                }
                _ => {
                    let gs = if scheme == FourierScheme::Ig4 { GradientScheme::Cd4 } else { GradientScheme::Cd6 };
                    LineGradients::new(gs, ext, G, true, false)?.first_and_second(&line, &mut d1, &mut d2, &mut s);
                }
            }
            for e in 1..ext - 1 {
                left[e] = (line[e] + 0.5 * d1[e]) + d2[e] / 12.0;
            }
        }
    }
    Ok((0..n).map(|j| -(left[G + j] - left[G + j - 1])).collect())
}

/// Symbol of the discrete operator on the periodic mode with wavenumber `beta`
/// (must be resolvable on `n` cells, i.e. `beta = 2 pi k / n`).
pub fn operator_numeric(scheme: FourierScheme, beta: f64, n: usize) -> Result<Complex64> {
    if n < 8 {
        return Err(Error::LineTooShort { len: n, min: 8 });
    }
    let re: Vec<f64> = (0..n).map(|j| (beta * j as f64).cos()).collect();
    let im: Vec<f64> = (0..n).map(|j| (beta * j as f64).sin()).collect();
    let rr = upwind_residual(scheme, &re)?;
    let ri = upwind_residual(scheme, &im)?;
    // average the ratio over the line to wash out roundoff
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let mode = Complex64::new(re[j], im[j]);
        acc += Complex64::new(rr[j], ri[j]) / mode;
    }
    Ok(acc / n as f64)
}

/// Resolvable wavenumbers `2 pi k / n`, `k = 1..=n/2`.
pub fn resolvable_wavenumbers(n: usize) -> Vec<f64> {
    (1..=n / 2).map(|k| 2.0 * std::f64::consts::PI * k as f64 / n as f64).collect()
}

/// Least-squares fit of `y = sum_k c_k x^p_k`.
pub fn fit_powers(x: &[f64], y: &[f64], powers: &[i32]) -> Vec<f64> {
    let m = powers.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (&xi, &yi) in x.iter().zip(y) {
        let basis: Vec<f64> = powers.iter().map(|&p| xi.powi(p)).collect();
        for r in 0..m {
            for c in 0..m {
                a[r][c] += basis[r] * basis[c];
            }
            a[r][m] += basis[r] * yi;
        }
    }
    // scale columns so the normal equations stay well conditioned
    let scale: Vec<f64> = (0..m).map(|r| a[r][r].sqrt()).collect();
    for r in 0..m {
        for c in 0..m {
            a[r][c] /= scale[r] * scale[c];
        }
        a[r][m] /= scale[r];
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    (0..m).map(|r| a[r][m] / a[r][r] / scale[r]).collect()
}

/// Leading dissipative and dispersive coefficients of a scheme fitted on
/// resolvable wavenumbers in `[lo, hi]`: `Re F ~ a beta^pr`, `Im F + beta ~ b beta^pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionFit {
    pub dissipative: f64,
    pub dispersive: f64,
}

pub fn fit_expansion(
    scheme: FourierScheme,
    n: usize,
    lo: f64,
    hi: f64,
    real_powers: &[i32],
    imag_powers: &[i32],
) -> Result<ExpansionFit> {
    let betas: Vec<f64> = resolvable_wavenumbers(n).into_iter().filter(|&b| b >= lo && b <= hi).collect();
    let mut re = Vec::with_capacity(betas.len());
    let mut im = Vec::with_capacity(betas.len());
    for &b in &betas {
        let f = operator_numeric(scheme, b, n)?;
        re.push(f.re);
        im.push(f.im + b);
    }
    Ok(ExpansionFit {
        dissipative: fit_powers(&betas, &re, real_powers)[0],
        dispersive: fit_powers(&betas, &im, imag_powers)[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn eg_hand_values() {
        let f = operator_eg(PI);
        assert!((f.re + 4.0 / 3.0).abs() < 1e-15 && f.im.abs() < 1e-15);
        let f = operator_eg(PI / 2.0);
        assert!((f.re + 1.0 / 3.0).abs() < 1e-15 && (f.im + 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ig4_at_nyquist() {
        let f = operator_ig4(PI);
        assert!((f.re + 2.0).abs() < 1e-14 && f.im.abs() < 1e-14);
    }

    #[test]
    fn first_order_numeric_symbol() {
        for b in resolvable_wavenumbers(32) {
            let f = operator_numeric(FourierScheme::FirstOrder, b, 32).unwrap();
            assert!((f - operator_first_order(b)).norm() < 1e-13);
        }
    }

    #[test]
    fn closed_forms_match_numeric_operator() {
        for scheme in [FourierScheme::Eg, FourierScheme::Ig4, FourierScheme::Ig6] {
            for b in resolvable_wavenumbers(64) {
                let d = (operator_numeric(scheme, b, 64).unwrap() - operator_closed(scheme, b)).norm();
                assert!(d <= 1e-10, "{scheme} beta {b}: {d}");
            }
        }
    }

    #[test]
    fn printed_ig6_denominator_is_rejected_by_numeric_operator() {
        let b = PI / 4.0;
        let num = operator_numeric(FourierScheme::Ig6, b, 64).unwrap();
        assert!((num - operator_ig6(b, Ig6Denominator::Printed)).norm() > 1e-2);
    }

    #[test]
    fn cd4_first_symbol_matches_operator() {
        let b = PI / 4.0;
        let n = 64;
        let samples: Vec<f64> = (0..n + 10).map(|e| (b * (e as f64 - 5.0)).sin()).collect();
        let lg = LineGradients::new(GradientScheme::Cd4, n + 10, 5, true, false).unwrap();
        let (mut d1, mut d2, mut s) = (vec![0.0; n + 10], vec![0.0; n + 10], vec![0.0; n + 10]);
        lg.first_and_second(&samples, &mut d1, &mut d2, &mut s);
        let g = compact_first_symbol(GradientScheme::Cd4, b);
        let h = compact_second_symbol(GradientScheme::Cd4, b);
        for e in 5..n + 5 {
            let x = b * (e as f64 - 5.0);
            assert!((d1[e] - g * x.cos()).abs() < 1e-12);
            assert!((d2[e] - h * x.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn ig4_has_no_odd_dissipation() {
        let fit = fit_expansion(FourierScheme::Ig4, 1024, 0.1, 0.3, &[6, 8], &[5, 7]).unwrap();
        // leading real term is beta^8 / 6912 in the expansion
        assert!(fit.dissipative.abs() < 1e-5, "{fit:?}");
        assert!((fit.dispersive + 1.0 / 720.0).abs() < 0.05 / 720.0, "{fit:?}");
    }

    #[test]
    fn fit_recovers_polynomial() {
        let x: Vec<f64> = (1..20).map(|k| 0.05 * k as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v.powi(3) - 0.5 * v.powi(5)).collect();
        let c = fit_powers(&x, &y, &[3, 5]);
        assert!((c[0] - 2.0).abs() < 1e-9 && (c[1] + 0.5).abs() < 1e-9);
    }
}
