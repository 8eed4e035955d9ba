//! Euler fluxes, the HLLC Riemann solver and viscous face fluxes.
//!
//! The Riemann solver works in a rotated frame where the normal velocity
//! sits in slot 1. Every expression is arranged so that reflecting the
//! problem about the interface (swap sides, negate the normal velocity)
//! reproduces the mirrored flux bit for bit.

use crate::error::{Error, Result};
use crate::state::{GasModel, PrimitiveState, NVAR};

/// Five-component flux in conserved ordering.
pub type FluxVector = [f64; NVAR];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSpeeds {
    pub s_left: f64,
    pub s_right: f64,
    pub s_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoeAverage {
    pub density: f64,
    pub velocity: [f64; 3],
    pub enthalpy: f64,
    pub sound_speed: f64,
}

/// Rotates velocity slots so that the `axis` component lands in slot 1.
#[inline]
pub(crate) fn to_normal_frame(s: &[f64; NVAR], axis: usize) -> [f64; NVAR] {
    match axis {
        0 => *s,
        1 => [s[0], s[2], s[3], s[1], s[4]],
        _ => [s[0], s[3], s[1], s[2], s[4]],
    }
}

#[inline]
pub(crate) fn from_normal_frame(s: &[f64; NVAR], axis: usize) -> [f64; NVAR] {
    match axis {
        0 => *s,
        1 => [s[0], s[3], s[1], s[2], s[4]],
        _ => [s[0], s[2], s[3], s[1], s[4]],
    }
}

#[inline]
fn kinetic(u: f64, v: f64, w: f64) -> f64 {
    (u * u + v * v) + w * w
}

/// Euler flux of a primitive state in the normal frame, with its conserved vector.
#[inline]
fn normal_flux(s: &[f64; NVAR], gm1: f64) -> ([f64; NVAR], [f64; NVAR]) {
    let [rho, u, v, w, p] = *s;
    let energy = p / gm1 + 0.5 * rho * kinetic(u, v, w);
    let q = [rho, rho * u, rho * v, rho * w, energy];
    let f = [rho * u, rho * u * u + p, rho * u * v, rho * u * w, u * (energy + p)];
    (f, q)
}

/// Convective flux of a primitive array along `axis`.
pub(crate) fn euler_flux(s: &[f64; NVAR], gamma: f64, axis: usize) -> FluxVector {
    let (f, _) = normal_flux(&to_normal_frame(s, axis), gamma - 1.0);
    from_normal_frame(&f, axis)
}

pub fn convective_flux(s: &PrimitiveState, gas: &GasModel, axis: usize) -> FluxVector {
    euler_flux(&s.to_array(), gas.gamma, axis)
}

#[inline]
fn roe_frame(l: &[f64; NVAR], r: &[f64; NVAR], gamma: f64) -> RoeAverage {
    let gm1 = gamma - 1.0;
    let sl = l[0].sqrt();
    let sr = r[0].sqrt();
    let inv = 1.0 / (sl + sr);
    let hl = gamma / gm1 * l[4] / l[0] + 0.5 * kinetic(l[1], l[2], l[3]);
    let hr = gamma / gm1 * r[4] / r[0] + 0.5 * kinetic(r[1], r[2], r[3]);
    let vel = [(sl * l[1] + sr * r[1]) * inv, (sl * l[2] + sr * r[2]) * inv, (sl * l[3] + sr * r[3]) * inv];
    let h = (sl * hl + sr * hr) * inv;
    let c2 = gm1 * (h - 0.5 * kinetic(vel[0], vel[1], vel[2]));
    RoeAverage { density: sl * sr, velocity: vel, enthalpy: h, sound_speed: c2.max(0.0).sqrt() }
}

/// Square-root-density weighted Roe averages.
pub fn roe_average(left: &PrimitiveState, right: &PrimitiveState, gas: &GasModel) -> RoeAverage {
    roe_frame(&left.to_array(), &right.to_array(), gas.gamma)
}

pub(crate) fn roe_arrays(left: &[f64; NVAR], right: &[f64; NVAR], gamma: f64) -> RoeAverage {
    roe_frame(left, right, gamma)
}

/// Einfeldt outer speeds and Batten contact speed, normal frame.
#[inline]
fn speeds(l: &[f64; NVAR], r: &[f64; NVAR], gamma: f64) -> WaveSpeeds {
    let cl = (gamma * l[4] / l[0]).sqrt();
    let cr = (gamma * r[4] / r[0]).sqrt();
    let roe = roe_frame(l, r, gamma);
    let (ut, ct) = (roe.velocity[0], roe.sound_speed);
    let s_left = (l[1] - cl).min(ut - ct);
    let s_right = (r[1] + cr).max(ut + ct);
    let a = l[0] * l[1] * (s_left - l[1]);
    let b = r[0] * r[1] * (s_right - r[1]);
    let num = (r[4] - l[4]) + (a - b);
    let den = l[0] * (s_left - l[1]) - r[0] * (s_right - r[1]);
    let s_star = if den != 0.0 { num / den } else { 0.0 };
    WaveSpeeds { s_left, s_right, s_star }
}

pub fn wave_speed_estimates(left: &PrimitiveState, right: &PrimitiveState, gas: &GasModel, axis: usize) -> WaveSpeeds {
    speeds(&to_normal_frame(&left.to_array(), axis), &to_normal_frame(&right.to_array(), axis), gas.gamma)
}

#[inline]
fn star_flux(s: &[f64; NVAR], f: &[f64; NVAR], q: &[f64; NVAR], sk: f64, s_star: f64) -> [f64; NVAR] {
    let [rho, u, v, w, p] = *s;
    let factor = (sk - u) / (sk - s_star);
    let energy = q[4] + (s_star - u) * (rho * s_star + p / (sk - u));
    let qs = [factor * rho, factor * (rho * s_star), factor * (rho * v), factor * (rho * w), factor * energy];
    let mut out = [0.0; NVAR];
    for c in 0..NVAR {
        out[c] = f[c] + sk * (qs[c] - q[c]);
    }
    out
}

/// HLLC flux on primitive arrays (natural frame in and out).
pub(crate) fn hllc(left: &[f64; NVAR], right: &[f64; NVAR], gamma: f64, axis: usize) -> FluxVector {
    let l = to_normal_frame(left, axis);
    let r = to_normal_frame(right, axis);
    let gm1 = gamma - 1.0;
    let ws = speeds(&l, &r, gamma);
    let f = if ws.s_left >= 0.0 {
        normal_flux(&l, gm1).0
    } else if ws.s_right <= 0.0 {
        normal_flux(&r, gm1).0
    } else if ws.s_star > 0.0 {
        let (fl, ql) = normal_flux(&l, gm1);
        star_flux(&l, &fl, &ql, ws.s_left, ws.s_star)
    } else if ws.s_star < 0.0 {
        let (fr, qr) = normal_flux(&r, gm1);
        star_flux(&r, &fr, &qr, ws.s_right, ws.s_star)
    } else {
        let (fl, ql) = normal_flux(&l, gm1);
        let (fr, qr) = normal_flux(&r, gm1);
        let a = star_flux(&l, &fl, &ql, ws.s_left, ws.s_star);
        let b = star_flux(&r, &fr, &qr, ws.s_right, ws.s_star);
        let mut m = [0.0; NVAR];
        for c in 0..NVAR {
            m[c] = 0.5 * (a[c] + b[c]);
        }
        m
    };
    from_normal_frame(&f, axis)
}

/// HLLC flux between two physical states along `axis`.
pub fn hllc_flux(left: &PrimitiveState, right: &PrimitiveState, gas: &GasModel, axis: usize) -> Result<FluxVector> {
    let f = hllc(&left.to_array(), &right.to_array(), gas.gamma, axis);
    if f.iter().all(|x| x.is_finite()) {
        Ok(f)
    } else {
        Err(Error::NonFinite(format!("HLLC flux along axis {axis}")))
    }
}

/// Normal face derivative from the two neighbouring cells and their
/// cell-centre derivatives, damped towards the two-point difference.
#[inline]
pub fn face_normal_gradient(ul: f64, ur: f64, gl: f64, gr: f64, h: f64, alpha_d: f64) -> f64 {
    let mean = 0.5 * (gl + gr);
    mean + alpha_d / h * ((ur - ul) - h * mean)
}

/// Viscous flux through a face normal to `axis`.
///
/// `grad[i][k]` is `d u_i / d x_k` at the face, `grad_t[k]` is `dT/dx_k`.
pub fn viscous_face_flux(
    velocity: [f64; 3],
    grad: [[f64; 3]; 3],
    grad_t: [f64; 3],
    gas: &GasModel,
    axis: usize,
) -> FluxVector {
    let mu = gas.viscosity / gas.reynolds;
    let div = (grad[0][0] + grad[1][1]) + grad[2][2];
    let a = axis;
    let mut tau = [0.0; 3];
    for (i, t) in tau.iter_mut().enumerate() {
        let mut s = grad[i][a] + grad[a][i];
        if i == a {
            s -= 2.0 / 3.0 * div;
        }
        *t = mu * s;
    }
    let q = -gas.heat_conductivity() * grad_t[a];
    let work = (velocity[0] * tau[0] + velocity[1] * tau[1]) + velocity[2] * tau[2];
    [0.0, tau[0], tau[1], tau[2], work - q]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::conservative_from_primitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn air() -> GasModel {
        GasModel::inviscid(1.4)
    }

    fn random_state(rng: &mut ChaCha8Rng) -> PrimitiveState {
        PrimitiveState::new(
            rng.gen_range(0.05..5.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(0.05..10.0),
        )
    }

    #[test]
    fn stagnant_flux_is_pressure_only() {
        let s = PrimitiveState::new_1d(1.3, 0.0, 2.0);
        assert_eq!(convective_flux(&s, &air(), 0), [0.0, 2.0, 0.0, 0.0, 0.0]);
        assert_eq!(convective_flux(&s, &air(), 1), [0.0, 0.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn unit_state_flux_by_hand() {
        let f = convective_flux(&PrimitiveState::new_1d(1.0, 1.0, 1.0), &air(), 0);
        assert_eq!(f[0], 1.0);
        assert_eq!(f[1], 2.0);
        assert!((f[4] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn roe_velocity_weighting() {
        let l = PrimitiveState::new_1d(1.0, 0.0, 1.0);
        let r = PrimitiveState::new_1d(4.0, 3.0, 1.0);
        assert!((roe_average(&l, &r, &air()).velocity[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn roe_of_identical_states() {
        let s = PrimitiveState::new(0.7, 0.3, -0.2, 0.1, 1.1);
        let gas = air();
        let roe = roe_average(&s, &s, &gas);
        assert!((roe.velocity[0] - 0.3).abs() < 1e-15);
        assert!((roe.sound_speed - crate::state::sound_speed(&s, &gas)).abs() < 1e-14);
    }

    #[test]
    fn stagnant_wave_speeds() {
        let s = PrimitiveState::new_1d(1.0, 0.0, 1.0);
        let ws = wave_speed_estimates(&s, &s, &air(), 0);
        let c = 1.4f64.sqrt();
        assert!((ws.s_left + c).abs() < 1e-15 && (ws.s_right - c).abs() < 1e-15);
        assert_eq!(ws.s_star, 0.0);
    }

    #[test]
    fn sod_contact_speed_matches_direct_formula() {
        let gas = air();
        let l = PrimitiveState::new_1d(0.125, 0.0, 0.1);
        let r = PrimitiveState::new_1d(1.0, 0.0, 1.0);
        let ws = wave_speed_estimates(&l, &r, &gas, 0);
        // independent evaluation
        let cl = (1.4f64 * 0.1 / 0.125).sqrt();
        let cr = 1.4f64.sqrt();
        let (sl_, sr_) = (0.125f64.sqrt(), 1.0);
        let ut = 0.0;
        let hl = 3.5 * 0.1 / 0.125;
        let hr = 3.5;
        let ht = (sl_ * hl + sr_ * hr) / (sl_ + sr_);
        let ct = (0.4 * ht).sqrt();
        let s_l = (-cl).min(ut - ct);
        let s_r = cr.max(ut + ct);
        let s_star = (1.0 - 0.1) / (0.125 * s_l - s_r);
        assert!((ws.s_left - s_l).abs() < 1e-14);
        assert!((ws.s_right - s_r).abs() < 1e-14);
        assert!((ws.s_star - s_star).abs() < 1e-14, "{} vs {s_star}", ws.s_star);
    }

    #[test]
    fn wave_ordering_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gas = air();
        for _ in 0..10_000 {
            let (l, r) = (random_state(&mut rng), random_state(&mut rng));
            let axis = rng.gen_range(0..3);
            let ws = wave_speed_estimates(&l, &r, &gas, axis);
            assert!(ws.s_left <= ws.s_star && ws.s_star <= ws.s_right, "{ws:?}");
        }
    }

    #[test]
    fn hllc_consistency_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gas = air();
        for _ in 0..10_000 {
            let s = random_state(&mut rng);
            let axis = rng.gen_range(0..3);
            let f = hllc_flux(&s, &s, &gas, axis).unwrap();
            let e = convective_flux(&s, &gas, axis);
            for c in 0..NVAR {
                assert!((f[c] - e[c]).abs() <= 1e-13 * e[c].abs().max(1.0), "{f:?} vs {e:?}");
            }
        }
    }

    #[test]
    fn supersonic_flow_takes_left_flux() {
        let gas = air();
        let l = PrimitiveState::new_1d(1.0, 3.0, 1.0);
        let r = PrimitiveState::new_1d(0.8, 3.0, 0.9);
        assert_eq!(hllc_flux(&l, &r, &gas, 0).unwrap(), convective_flux(&l, &gas, 0));
    }

    #[test]
    fn quiescent_pressure_balance_has_no_mass_flux() {
        let gas = air();
        let l = PrimitiveState::new_1d(1.0, 0.0, 1.0);
        let r = PrimitiveState::new_1d(0.2, 0.0, 1.0);
        let ws = wave_speed_estimates(&l, &r, &gas, 0);
        assert_eq!(ws.s_star, 0.0);
        assert_eq!(hllc_flux(&l, &r, &gas, 0).unwrap()[0], 0.0);
    }

    #[test]
    fn star_branches_agree_at_zero_contact_speed() {
        let gas = air();
        let l = PrimitiveState::new(1.0, 0.0, 0.4, 0.0, 1.0);
        let r = PrimitiveState::new(0.3, 0.0, -0.2, 0.0, 1.0);
        let (la, ra) = (l.to_array(), r.to_array());
        let ws = speeds(&la, &ra, gas.gamma);
        assert_eq!(ws.s_star, 0.0);
        let (fl, ql) = normal_flux(&la, 0.4);
        let (fr, qr) = normal_flux(&ra, 0.4);
        let a = star_flux(&la, &fl, &ql, ws.s_left, 0.0);
        let b = star_flux(&ra, &fr, &qr, ws.s_right, 0.0);
        // tangential momentum is carried by the contact and differs by design
        for c in [0, 1, 4] {
            assert!((a[c] - b[c]).abs() <= 1e-12, "component {c}: {} vs {}", a[c], b[c]);
        }
    }

    #[test]
    fn hllc_is_mirror_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2000 {
            let (l, r) = (random_state(&mut rng).to_array(), random_state(&mut rng).to_array());
            let axis = rng.gen_range(0..3);
            let f = hllc(&l, &r, 1.4, axis);
            let mut lm = r;
            let mut rm = l;
            lm[1 + axis] = -lm[1 + axis];
            rm[1 + axis] = -rm[1 + axis];
            let g = hllc(&lm, &rm, 1.4, axis);
            for c in 0..NVAR {
                let expected = if c == 1 + axis { f[c] } else { -f[c] };
                assert_eq!(g[c], expected, "component {c}");
            }
        }
    }

    #[test]
    fn energy_flux_uses_total_energy() {
        let gas = air();
        let s = PrimitiveState::new(1.2, 0.4, 0.1, -0.3, 0.9);
        let q = conservative_from_primitive(s, &gas).unwrap();
        let f = convective_flux(&s, &gas, 2);
        assert!((f[4] - s.w * (q.rho_e + s.p)).abs() < 1e-14);
    }

    #[test]
    fn uniform_flow_has_no_viscous_flux() {
        let gas = GasModel::navier_stokes(1.4, 1.0, 0.72, 1.0, 1.0);
        let f = viscous_face_flux([1.0, 2.0, 0.0], [[0.0; 3]; 3], [0.0; 3], &gas, 0);
        assert_eq!(f, [0.0; 5]);
    }

    #[test]
    fn couette_shear_stress() {
        let gas = GasModel::navier_stokes(1.4, 1.0, 0.72, 1.0, 1.0);
        let mut g = [[0.0; 3]; 3];
        g[0][1] = 1.0;
        let f = viscous_face_flux([0.5, 0.0, 0.0], g, [0.0; 3], &gas, 1);
        assert_eq!(f[1], 1.0);
        assert_eq!(f[4], 0.5);
    }

    #[test]
    fn face_gradient_is_exact_on_linears() {
        let h = 0.1;
        assert!((face_normal_gradient(1.0, 1.3, 3.0, 3.0, h, 1.0) - 3.0).abs() < 1e-13);
        assert!((face_normal_gradient(1.0, 1.3, 3.0, 3.0, h, 4.0 / 3.0) - 3.0).abs() < 1e-13);
    }
}
