//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Arguments that do not start with `-` select criteria by name prefix, e.g.
//! `cargo test --test acceptance -- shock`. `IGFLOW_TGV_N` sets the
//! Taylor-Green grid (default 32).

use std::time::Instant;

use igflow::analysis::fourier::{
    fit_expansion, operator_closed, operator_numeric, resolvable_wavenumbers, FourierScheme,
};
use igflow::analysis::{enstrophy, interior_density, kinetic_energy, l1_error, l2_values, min_density_pressure};
use igflow::cases::{convergence_study, make_case, reference_solution, CaseSpec};
use igflow::gradients::GradientScheme;
use igflow::reconstruction::{reconstruct_axis, ReconOptions, ReconScheme};
use igflow::solver::{fill_ghosts, rk3_step, Simulation, SpatialOperator, TimeStepRule};
use igflow::state::{Field, GasModel, Grid, PrimitiveState, NVAR};
use igflow::Result;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

/// Sod and Lax L1 density thresholds, frozen from the first validated run
/// (observed value rounded up by about 10%).
const SOD_L1: [(ReconScheme, f64); 2] = [(ReconScheme::Ig4Mp, 1.6e-3), (ReconScheme::Ig6Mp, 1.6e-3)];
const LAX_L1: [(ReconScheme, f64); 2] = [(ReconScheme::Ig4Mp, 8.0e-3), (ReconScheme::Ig6Mp, 8.1e-3)];

const LINEAR_REFERENCE_ERRORS: [(ReconScheme, [f64; 4]); 2] = [
    (ReconScheme::Ig4Mp, [4.65e-4, 4.37e-5, 2.30e-6, 1.74e-7]),
    (ReconScheme::Ig6Mp, [5.98e-4, 4.59e-5, 2.54e-6, 1.77e-7]),
];
const VORTEX_REFERENCE_ERRORS: [(ReconScheme, [f64; 3]); 2] =
    [(ReconScheme::Ig4Mp, [3.14e-3, 6.55e-4, 1.64e-4]), (ReconScheme::Ig6Mp, [3.14e-3, 6.54e-4, 1.64e-4])];

fn within_factor(value: f64, target: f64, factor: f64) -> bool {
    value <= target * factor && value >= target / factor
}

fn fourier() -> Outcome {
    let mut worst: f64 = 0.0;
    for scheme in [FourierScheme::Eg, FourierScheme::Ig4] {
        for b in resolvable_wavenumbers(64) {
            worst = worst.max((operator_numeric(scheme, b, 64)? - operator_closed(scheme, b)).norm());
        }
    }
    let fit = fit_expansion(FourierScheme::Ig6, 2048, 0.05, 0.3, &[6, 8], &[5, 7])?;
    let dispersive = fit.dispersive / (-1.0 / 720.0);
    let dissipative = fit.dissipative / (-1.0 / 1440.0);
    let ok = worst <= 1e-10 && (dispersive - 1.0).abs() <= 0.05 && (dissipative - 1.0).abs() <= 0.05;
    Ok((
        ok,
        format!("max |closed - numeric| {worst:.2e} (<= 1e-10); IG6 fit b^5/720 ratio {dispersive:.4}, b^6/1440 ratio {dissipative:.4} (within 5%)"),
    ))
}

fn linear_ooa() -> Outcome {
    let case = make_case("linear_ooa")?;
    let mut ok = true;
    let mut msg = Vec::new();
    for (scheme, table) in LINEAR_REFERENCE_ERRORS {
        let rows = convergence_study(&case, scheme, &[10, 20, 40, 80])?;
        let orders: Vec<f64> = rows.iter().filter_map(|r| r.order).collect();
        let errors_ok = rows.iter().zip(table).all(|(r, t)| within_factor(r.error, t, 2.0));
        let orders_ok = orders[1] >= 3.4 && orders[2] >= 3.5;
        ok &= errors_ok && orders_ok;
        let errs: Vec<String> = rows.iter().zip(table).map(|(r, t)| format!("{:.2e}/{t:.2e}", r.error)).collect();
        msg.push(format!(
            "{scheme} errors {} orders {:.2},{:.2},{:.2}",
            errs.join(" "),
            orders[0],
            orders[1],
            orders[2]
        ));
    }
    Ok((ok, msg.join("; ")))
}

fn vortex_ooa() -> Outcome {
    let case = make_case("isentropic_vortex")?;
    let mut ok = true;
    let mut msg = Vec::new();
    for (scheme, table) in VORTEX_REFERENCE_ERRORS {
        let rows = convergence_study(&case, scheme, &[25, 50, 100])?;
        let finest = rows[2].order.unwrap_or(f64::NAN);
        let errors_ok = rows.iter().zip(table).all(|(r, t)| within_factor(r.error, t, 2.0));
        ok &= errors_ok && (finest - 2.0).abs() <= 0.2;
        let errs: Vec<String> = rows.iter().zip(table).map(|(r, t)| format!("{:.2e}/{t:.2e}", r.error)).collect();
        msg.push(format!("{scheme} errors {} finest order {finest:.3}", errs.join(" ")));
    }
    Ok((ok, msg.join("; ")))
}

/// Largest excursion of reconstructed (rho, u, p) outside `[lo, hi]`, per component.
fn interface_excursion(sim: &Simulation, scheme: ReconScheme, lo: [f64; 3], hi: [f64; 3]) -> Result<[f64; 3]> {
    let mut q = sim.q.clone();
    fill_ghosts(&mut q, sim.grid(), sim.gas(), &sim.op.bcs, sim.time)?;
    let prim = q.to_primitive(sim.gas());
    let states = reconstruct_axis(&prim, sim.grid(), 0, ReconOptions::new(scheme, sim.gas().gamma))?;
    let mut worst = [0.0f64; 3];
    for s in states.left.iter().chain(&states.right) {
        for (c, v) in [(0, s[0]), (1, s[1]), (2, s[4])] {
            worst[c] = worst[c].max(lo[c] - v).max(v - hi[c]);
        }
    }
    Ok(worst)
}

fn shock_tubes() -> Outcome {
    let mut ok = true;
    let mut msg = Vec::new();
    for (name, thresholds) in [("sod", SOD_L1), ("lax", LAX_L1)] {
        let case = make_case(name)?;
        let grid = case.grid()?;
        let exact = case.exact.clone().expect("shock tubes have exact solutions");
        // range of the exact solution: the initial states plus the star states
        let (mut lo, mut hi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
        for k in 0..=20000 {
            let s = exact([k as f64 / 20000.0, 0.0, 0.0], case.t_final);
            for (c, v) in [s.rho, s.u, s.p].into_iter().enumerate() {
                lo[c] = lo[c].min(v);
                hi[c] = hi[c].max(v);
            }
        }
        for (scheme, threshold) in thresholds {
            let mut sim = case.simulation(&grid, case.scheme_options(scheme), None)?;
            let mut min_rp: f64 = f64::INFINITY;
            let mut excursion = [0.0f64; 3];
            sim.advance_to(case.t_final, |s| {
                let (r, p) = min_density_pressure(&s.q, s.grid(), s.gas());
                min_rp = min_rp.min(r).min(p);
                let e = interface_excursion(s, scheme, lo, hi)?;
                for c in 0..3 {
                    excursion[c] = excursion[c].max(e[c]);
                }
                Ok(())
            })?;
            let l1 = l1_error(&sim.q, &grid, |x| exact(x, sim.time).rho)?;
            // u starts uniform in both tubes, so only rho and p carry a bound
            let bounded = excursion[0].max(excursion[2]);
            ok &= min_rp > 0.0 && l1 < threshold && bounded <= 5e-3;
            msg.push(format!(
                "{name} {scheme}: min(rho,p) {min_rp:.3e}, L1 {l1:.4e} (< {threshold:.1e}), rho/p overshoot {:.2e}/{:.2e} (<= 5e-3), u overshoot {:.2e}",
                excursion[0], excursion[2], excursion[1]
            ));
        }
    }
    Ok((ok, msg.join("; ")))
}

fn density(sim: &Simulation) -> Result<Vec<f64>> {
    interior_density(&sim.q, sim.grid())
}

fn wave_problems() -> Outcome {
    let mut ok = true;
    let mut msg = Vec::new();
    for name in ["shu_osher", "titarev_toro"] {
        let case = make_case(name)?;
        let reference = reference_solution(&case, None)?;
        let coarse = case.grid()?;
        let fine = case.grid_with(case.n.map(|n| if n > 1 { 2 * n } else { 1 }))?;
        let muscl = l2_values(&density(&case.run(&coarse, ReconScheme::Muscl3)?)?, &reference.density_on(&coarse)?)?;
        for scheme in [ReconScheme::Ig4Mp, ReconScheme::Ig6Mp] {
            let e0 = l2_values(&density(&case.run(&coarse, scheme)?)?, &reference.density_on(&coarse)?)?;
            let e1 = l2_values(&density(&case.run(&fine, scheme)?)?, &reference.density_on(&fine)?)?;
            ok &= e0 < muscl && e1 < e0;
            msg.push(format!("{name} {scheme}: L2 {e0:.4e} < MUSCL3 {muscl:.4e}, refined {e1:.4e}"));
        }
    }
    Ok((ok, msg.join("; ")))
}

fn conservation() -> Outcome {
    let gas = GasModel::inviscid(1.4);
    let mut free_stream: f64 = 0.0;
    let mut residual_sum: f64 = 0.0;
    for scheme in ReconScheme::ALL {
        // free stream on a periodic 2D grid
        let grid = Grid::rect([24, 20], [0.0, 0.0], [1.0, 0.8], [true; 2])?;
        let state = PrimitiveState::new_2d(1.2, 0.3, -0.2, 0.9);
        let q = Field::from_primitive_fn(&grid, &gas, |_| state)?;
        let q0 = q.clone();
        let op = SpatialOperator::new(
            grid.clone(),
            gas,
            igflow::solver::BoundarySet::periodic(),
            igflow::solver::SourceTerm::None,
            igflow::solver::SchemeOptions::new(scheme),
        )?;
        let mut sim = Simulation::new(op, q, TimeStepRule::Cfl(0.2))?;
        for _ in 0..100 {
            let dt = sim.stable_dt()?;
            sim.step(dt)?;
        }
        for (i, j, k) in grid.interior_cells() {
            let (a, b) = (sim.q.interior(&grid, i, j, k), q0.interior(&grid, i, j, k));
            for c in 0..NVAR {
                free_stream = free_stream.max((a[c] - b[c]).abs());
            }
        }
        // residual integrals at every stage on a periodic vortex
        let case = make_case("isentropic_vortex")?;
        let grid = case.grid_with([40, 40, 1])?;
        let mut sim = case.simulation(&grid, case.scheme_options(scheme), None)?;
        for _ in 0..5 {
            let dt = sim.stable_dt()?;
            let op = sim.op.clone();
            let t = sim.time;
            rk3_step(&mut sim.q, &grid, dt, t, |f, time| {
                let r = op.residual(f, time)?;
                for v in r.integral(&grid) {
                    residual_sum = residual_sum.max(v.abs());
                }
                Ok(r.values)
            })?;
            sim.time += dt;
        }
    }
    let ok = free_stream <= 1e-13 && residual_sum <= 1e-12;
    Ok((ok, format!("all schemes: free-stream drift {free_stream:.2e} (<= 1e-13), max |sum residual * vol| {residual_sum:.2e} (<= 1e-12)")))
}

fn tgv() -> Outcome {
    let n: usize = std::env::var("IGFLOW_TGV_N").ok().and_then(|v| v.parse().ok()).unwrap_or(32);
    let case = make_case("tgv_inviscid")?;
    let grid = case.grid_with([n; 3])?;
    let mut ke = std::collections::HashMap::new();
    let mut ens = std::collections::HashMap::new();
    let mut monotone = true;
    let mut worst_rise: f64 = 0.0;
    let mut muscl_ens = std::collections::HashMap::new();
    for scheme in [ReconScheme::Ig4, ReconScheme::Ig6, ReconScheme::Ig4Mp, ReconScheme::Ig6Mp, ReconScheme::Muscl3] {
        let mut sim = case.simulation(&grid, case.scheme_options(scheme), None)?;
        let ke0 = kinetic_energy(&sim.q, &grid);
        let mut prev = ke0;
        sim.advance_to(case.t_final, |s| {
            let k = kinetic_energy(&s.q, &grid);
            let rise = (k - prev) / prev;
            worst_rise = worst_rise.max(rise);
            if rise > 1e-6 {
                monotone = false;
            }
            prev = k;
            Ok(())
        })?;
        ke.insert(scheme, kinetic_energy(&sim.q, &grid) / ke0);
        match scheme.gradient_scheme() {
            Some(g) => {
                ens.insert(scheme, enstrophy(&sim.q, &grid, sim.gas(), g)?);
            }
            None => {
                for g in [GradientScheme::Cd4, GradientScheme::Cd6] {
                    muscl_ens.insert(g, enstrophy(&sim.q, &grid, sim.gas(), g)?);
                }
            }
        }
    }
    let ordering = ke[&ReconScheme::Ig4] >= ke[&ReconScheme::Ig4Mp] && ke[&ReconScheme::Ig6] >= ke[&ReconScheme::Ig6Mp];
    let mut ens_ok = true;
    let mut ens_msg = Vec::new();
    for s in [ReconScheme::Ig4, ReconScheme::Ig6, ReconScheme::Ig4Mp, ReconScheme::Ig6Mp] {
        let g = s.gradient_scheme().unwrap();
        ens_ok &= ens[&s] > muscl_ens[&g];
        ens_msg.push(format!("{s} {:.4e} vs {:.4e}", ens[&s], muscl_ens[&g]));
    }
    let ok = monotone && ordering && ens_ok;
    Ok((
        ok,
        format!(
            "{n}^3: max relative KE rise {worst_rise:.2e} (<= 1e-6); KE/KE0 IG4 {:.5} IG4MP {:.5} IG6 {:.5} IG6MP {:.5} MUSCL3 {:.5}; enstrophy vs MUSCL3: {}",
            ke[&ReconScheme::Ig4],
            ke[&ReconScheme::Ig4Mp],
            ke[&ReconScheme::Ig6],
            ke[&ReconScheme::Ig6Mp],
            ke[&ReconScheme::Muscl3],
            ens_msg.join(", ")
        ),
    ))
}

/// Runs to the final time and returns the fallback fraction after `skip` steps.
fn run_with_fallbacks(case: &CaseSpec, n: [usize; 3], scheme: ReconScheme, skip: usize) -> Result<(Simulation, f64)> {
    let grid = case.grid_with(n)?;
    let mut sim = case.simulation(&grid, case.scheme_options(scheme), None)?;
    sim.advance_to(case.t_final, |_| Ok(()))?;
    let (mut replaced, mut checked) = (0u64, 0u64);
    for r in sim.history.iter().skip(skip) {
        replaced += r.fallbacks.total();
        checked += r.fallbacks.evaluations;
    }
    let fraction = if checked == 0 { 0.0 } else { replaced as f64 / checked as f64 };
    Ok((sim, fraction))
}

fn dmr_vst() -> Outcome {
    let mut ok = true;
    let mut msg = Vec::new();
    let dmr = make_case("dmr")?;
    for scheme in [ReconScheme::Ig4Mp, ReconScheme::Ig6Mp] {
        let (sim, f) = run_with_fallbacks(&dmr, dmr.preset("coarse").unwrap(), scheme, 10)?;
        let done = (sim.time - dmr.t_final).abs() < 1e-12;
        ok &= done && f < 0.01;
        msg.push(format!("dmr 384x128 {scheme}: t={:.4} in {} steps, fallback {:.3}%", sim.time, sim.steps, 100.0 * f));
    }
    let vst = make_case("viscous_shock_tube")?;
    let (sim, f) = run_with_fallbacks(&vst, vst.preset("coarse").unwrap(), ReconScheme::Ig6Mp, 10)?;
    let done = (sim.time - vst.t_final).abs() < 1e-12;
    ok &= done && f < 0.01;
    msg.push(format!("vst 500x250 IG6MP: t={:.4} in {} steps, fallback {:.3}%", sim.time, sim.steps, 100.0 * f));
    Ok((ok, msg.join("; ")))
}

fn rc3_rt() -> Outcome {
    let rc3 = make_case("riemann_config3")?;
    let (sim, _) = run_with_fallbacks(&rc3, rc3.n, ReconScheme::Ig6Mp, 0)?;
    let rc3_done = (sim.time - rc3.t_final).abs() < 1e-12;
    let rt = make_case("rayleigh_taylor")?;
    let (sim_rt, _) = run_with_fallbacks(&rt, rt.n, ReconScheme::Ig6Mp, 0)?;
    let rt_done = (sim_rt.time - rt.t_final).abs() < 1e-12;
    let g = sim_rt.grid();
    let mut asym: f64 = 0.0;
    for j in 0..g.n[1] {
        for i in 0..g.n[0] / 2 {
            let a = sim_rt.q.interior(g, i, j, 0);
            let b = sim_rt.q.interior(g, g.n[0] - 1 - i, j, 0);
            for c in 0..NVAR {
                let mirrored = if c == 1 { -b[c] } else { b[c] };
                asym = asym.max((a[c] - mirrored).abs());
            }
        }
    }
    let ok = rc3_done && rt_done && asym <= 1e-10;
    Ok((
        ok,
        format!(
            "riemann_config3 400^2 IG6MP t={:.4} ({} steps); rayleigh_taylor 120x480 IG6MP t={:.4} ({} steps), mirror asymmetry {asym:.2e} (<= 1e-10)",
            sim.time, sim.steps, sim_rt.time, sim_rt.steps
        ),
    ))
}

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [Criterion; 9] = [
        ("fourier_operators", fourier),
        ("linear_ooa", linear_ooa),
        ("vortex_ooa", vortex_ooa),
        ("shock_tubes", shock_tubes),
        ("shu_osher_titarev_toro", wave_problems),
        ("conservation", conservation),
        ("taylor_green", tgv),
        ("dmr_viscous_shock_tube", dmr_vst),
        ("riemann_config3_rayleigh_taylor", rc3_rt),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        if !filters.is_empty() && !filters.iter().any(|p| name.starts_with(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("{} {name}: {detail} [{:.1}s]", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
