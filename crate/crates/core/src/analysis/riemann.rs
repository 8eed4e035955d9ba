//! Exact solution of the one-dimensional Riemann problem for a gamma-law gas.

use crate::error::{Error, Result};
use crate::state::PrimitiveState;

/// Wave connecting an outer state to the star region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    Shock { speed: f64 },
    Rarefaction { head: f64, tail: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannExact {
    pub left: PrimitiveState,
    pub right: PrimitiveState,
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
    pub iterations: usize,
}

/// Pressure function of one side and its derivative.
fn side_function(p: f64, rho: f64, pk: f64, ck: f64, g: f64) -> (f64, f64) {
    if p > pk {
        let a = 2.0 / ((g + 1.0) * rho);
        let b = (g - 1.0) / (g + 1.0) * pk;
        let sq = (a / (p + b)).sqrt();
        ((p - pk) * sq, sq * (1.0 - 0.5 * (p - pk) / (b + p)))
    } else {
        let ratio = p / pk;
        let e = (g - 1.0) / (2.0 * g);
        (2.0 * ck / (g - 1.0) * (ratio.powf(e) - 1.0), ratio.powf(-(g + 1.0) / (2.0 * g)) / (rho * ck))
    }
}

/// Solves for the star region by Newton iteration on the pressure.
pub fn exact_riemann(left: PrimitiveState, right: PrimitiveState, gamma: f64) -> Result<RiemannExact> {
    exact_riemann_tol(left, right, gamma, 1e-14)
}

pub fn exact_riemann_tol(left: PrimitiveState, right: PrimitiveState, gamma: f64, tol: f64) -> Result<RiemannExact> {
    if !left.is_physical() || !right.is_physical() {
        return Err(Error::NonPhysical {
            context: "Riemann data".into(),
            rho: left.rho.min(right.rho),
            p: left.p.min(right.p),
        });
    }
    let g = gamma;
    let cl = (g * left.p / left.rho).sqrt();
    let cr = (g * right.p / right.rho).sqrt();
    let du = right.u - left.u;
    if 2.0 / (g - 1.0) * (cl + cr) <= du {
        return Err(Error::Vacuum);
    }
    // two-rarefaction guess, always positive
    let e = (g - 1.0) / (2.0 * g);
    let guess = ((cl + cr - 0.5 * (g - 1.0) * du) / (cl / left.p.powf(e) + cr / right.p.powf(e))).powf(1.0 / e);
    let mut p = guess.max(1e-14 * left.p.min(right.p));
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (fl, dl) = side_function(p, left.rho, left.p, cl, g);
        let (fr, dr) = side_function(p, right.rho, right.p, cr, g);
        let step = (fl + fr + du) / (dl + dr);
        let mut next = p - step;
        if next <= 0.0 {
            next = 0.5 * p;
        }
        let change = 2.0 * (next - p).abs() / (next + p);
        p = next;
        if change < tol || iterations > 200 {
            break;
        }
    }
    let (fl, _) = side_function(p, left.rho, left.p, cl, g);
    let (fr, _) = side_function(p, right.rho, right.p, cr, g);
    let u = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
    let gr = (g - 1.0) / (g + 1.0);
    let side = |s: &PrimitiveState, c: f64, sign: f64| -> (f64, Wave) {
        if p > s.p {
            let ratio = p / s.p;
            let rho = s.rho * (ratio + gr) / (gr * ratio + 1.0);
            let speed = s.u + sign * c * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt();
            (rho, Wave::Shock { speed })
        } else {
            let rho = s.rho * (p / s.p).powf(1.0 / g);
            let c_star = c * (p / s.p).powf(e);
            (rho, Wave::Rarefaction { head: s.u + sign * c, tail: u + sign * c_star })
        }
    };
    let (rho_star_left, left_wave) = side(&left, cl, -1.0);
    let (rho_star_right, right_wave) = side(&right, cr, 1.0);
    Ok(RiemannExact {
        left,
        right,
        gamma,
        p_star: p,
        u_star: u,
        rho_star_left,
        rho_star_right,
        left_wave,
        right_wave,
        iterations,
    })
}

impl RiemannExact {
    /// State on the ray `xi = x / t`.
    pub fn sample(&self, xi: f64) -> PrimitiveState {
        let g = self.gamma;
        let fan = |s: &PrimitiveState, sign: f64| {
            let c = (g * s.p / s.rho).sqrt();
            let base = 2.0 / (g + 1.0) - sign * (g - 1.0) / ((g + 1.0) * c) * (s.u - xi);
            let rho = s.rho * base.powf(2.0 / (g - 1.0));
            let u = 2.0 / (g + 1.0) * (-sign * c + 0.5 * (g - 1.0) * s.u + xi);
            let p = s.p * base.powf(2.0 * g / (g - 1.0));
            PrimitiveState::new(rho, u, s.v, s.w, p)
        };
        if xi <= self.u_star {
            let s = &self.left;
            match self.left_wave {
                Wave::Shock { speed } => {
                    if xi <= speed {
                        *s
                    } else {
                        PrimitiveState::new(self.rho_star_left, self.u_star, s.v, s.w, self.p_star)
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi <= head {
                        *s
                    } else if xi >= tail {
                        PrimitiveState::new(self.rho_star_left, self.u_star, s.v, s.w, self.p_star)
                    } else {
                        fan(s, -1.0)
                    }
                }
            }
        } else {
            let s = &self.right;
            match self.right_wave {
                Wave::Shock { speed } => {
                    if xi >= speed {
                        *s
                    } else {
                        PrimitiveState::new(self.rho_star_right, self.u_star, s.v, s.w, self.p_star)
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi >= head {
                        *s
                    } else if xi <= tail {
                        PrimitiveState::new(self.rho_star_right, self.u_star, s.v, s.w, self.p_star)
                    } else {
                        fan(s, 1.0)
                    }
                }
            }
        }
    }

    /// Solution at `x` and time `t` for a jump initially at `x0`.
    pub fn at(&self, x: f64, t: f64, x0: f64) -> PrimitiveState {
        if t <= 0.0 {
            return if x < x0 { self.left } else { self.right };
        }
        self.sample((x - x0) / t)
    }
}
