//! Boundary conditions, the semi-discrete residual and TVD-RK3 stepping.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flux::{face_normal_gradient, hllc, viscous_face_flux};
use crate::gradients::{line_starts, GradientScheme, LineGradients};
use crate::reconstruction::{interior_line_starts, FallbackCount, LineReconstructor, ReconOptions, ReconScheme, Vec5};
use crate::state::{cons_to_prim, prim_to_cons, Field, FieldKind, GasModel, Grid, PrimitiveState, NVAR};

/// State prescribed at a ghost-cell centre and time.
pub type ProfileFn = Arc<dyn Fn([f64; 3], f64) -> PrimitiveState + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition {
    Periodic,
    /// Mirror image with the normal velocity negated; `no_slip` negates all velocities.
    Reflective {
        no_slip: bool,
    },
    ZeroGradient,
    Dirichlet(PrimitiveState),
    TimeDependent {
        tag: String,
        profile: ProfileFn,
    },
    /// Fixed state where the coordinate along `axis` is below `split`, slip wall elsewhere.
    SplitWall {
        axis: usize,
        split: f64,
        state: PrimitiveState,
    },
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Periodic => write!(f, "Periodic"),
            BoundaryCondition::Reflective { no_slip } => write!(f, "Reflective {{ no_slip: {no_slip} }}"),
            BoundaryCondition::ZeroGradient => write!(f, "ZeroGradient"),
            BoundaryCondition::Dirichlet(s) => write!(f, "Dirichlet({s:?})"),
            BoundaryCondition::TimeDependent { tag, .. } => write!(f, "TimeDependent({tag})"),
            BoundaryCondition::SplitWall { axis, split, state } => {
                write!(f, "SplitWall {{ axis: {axis}, split: {split}, state: {state:?} }}")
            }
        }
    }
}

/// Boundary conditions on the low (index 0) and high (index 1) face of every axis.
#[derive(Debug, Clone)]
pub struct BoundarySet {
    pub faces: [[BoundaryCondition; 2]; 3],
}

impl BoundarySet {
    pub fn uniform(bc: BoundaryCondition) -> Self {
        Self { faces: [[bc.clone(), bc.clone()], [bc.clone(), bc.clone()], [bc.clone(), bc]] }
    }

    pub fn periodic() -> Self {
        Self::uniform(BoundaryCondition::Periodic)
    }

    pub fn with(mut self, axis: usize, side: usize, bc: BoundaryCondition) -> Self {
        self.faces[axis][side] = bc;
        self
    }

    pub fn with_axis(self, axis: usize, bc: BoundaryCondition) -> Self {
        self.with(axis, 0, bc.clone()).with(axis, 1, bc)
    }

    /// Periodic faces must come in pairs that match the grid.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        for axis in grid.active_axes() {
            let p = [0, 1].map(|s| matches!(self.faces[axis][s], BoundaryCondition::Periodic));
            if p[0] != p[1] {
                return Err(Error::Config(format!("unmatched periodic boundary on axis {axis}")));
            }
            if p[0] != grid.periodic[axis] {
                return Err(Error::Config(format!("axis {axis}: periodic boundaries disagree with the grid")));
            }
        }
        Ok(())
    }
}

fn coords(grid: &Grid, idx: usize) -> [f64; 3] {
    let ex = grid.extent(0);
    let ey = grid.extent(1);
    let i = idx % ex;
    let j = (idx / ex) % ey;
    let k = idx / (ex * ey);
    [grid.center_extended(0, i), grid.center_extended(1, j), grid.center_extended(2, k)]
}

/// Fills every ghost layer of a conserved field, axis by axis so corner
/// regions take consistent values.
pub fn fill_ghosts(field: &mut Field, grid: &Grid, gas: &GasModel, bcs: &BoundarySet, time: f64) -> Result<()> {
    if field.kind != FieldKind::Conserved {
        return Err(Error::Config("ghost filling expects a conserved field".into()));
    }
    bcs.validate(grid)?;
    let gm1 = gas.gamma - 1.0;
    for axis in 0..3 {
        if !grid.is_active(axis) {
            continue;
        }
        let g = grid.ghost;
        let n = grid.n[axis];
        let stride = grid.stride(axis);
        for start in line_starts(grid, axis) {
            for side in 0..2 {
                let bc = &bcs.faces[axis][side];
                for k in 0..g {
                    let (ghost, mirror, image, edge) = if side == 0 {
                        (g - 1 - k, g + k, g + n - 1 - k, g)
                    } else {
                        (g + n + k, g + n - 1 - k, g + k, g + n - 1)
                    };
                    let dst = start + ghost * stride;
                    let reflect = |data: &[Vec5], no_slip: bool| {
                        let mut q = data[start + mirror * stride];
                        if no_slip {
                            q[1] = -q[1];
                            q[2] = -q[2];
                            q[3] = -q[3];
                        } else {
                            q[1 + axis] = -q[1 + axis];
                        }
                        q
                    };
                    let value = match bc {
                        BoundaryCondition::Periodic => field.data[start + image * stride],
                        BoundaryCondition::Reflective { no_slip } => reflect(&field.data, *no_slip),
                        BoundaryCondition::ZeroGradient => field.data[start + edge * stride],
                        BoundaryCondition::Dirichlet(s) => prim_to_cons(&s.to_array(), gm1),
                        BoundaryCondition::TimeDependent { profile, .. } => {
                            prim_to_cons(&profile(coords(grid, dst), time).to_array(), gm1)
                        }
                        BoundaryCondition::SplitWall { axis: along, split, state } => {
                            if coords(grid, dst)[*along] < *split {
                                prim_to_cons(&state.to_array(), gm1)
                            } else {
                                reflect(&field.data, false)
                            }
                        }
                    };
                    field.data[dst] = value;
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceTerm {
    None,
    /// Unit gravity along +y: `S = (0, 0, rho, 0, rho v)`.
    RayleighTaylorGravity,
}

impl SourceTerm {
    #[inline]
    pub fn evaluate(self, q: &Vec5) -> Vec5 {
        match self {
            SourceTerm::None => [0.0; NVAR],
            SourceTerm::RayleighTaylorGravity => [0.0, 0.0, q[0], 0.0, q[2]],
        }
    }
}

/// Spatial discretisation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeOptions {
    pub scheme: ReconScheme,
    pub characteristic: bool,
    pub mirror_exact: bool,
    /// Damping weight of the viscous face-normal gradient.
    pub alpha_d: f64,
}

impl SchemeOptions {
    pub fn new(scheme: ReconScheme) -> Self {
        Self { scheme, characteristic: false, mirror_exact: false, alpha_d: 1.0 }
    }
}

/// Residual with its fallback counters.
#[derive(Debug, Clone)]
pub struct Residual {
    /// Per extended cell; ghost entries are zero.
    pub values: Vec<Vec5>,
    pub fallbacks: FallbackCount,
}

impl Residual {
    /// Sum of the interior residuals times the cell volume, per component.
    pub fn integral(&self, grid: &Grid) -> Vec5 {
        let vol = grid.cell_volume();
        let mut s = [0.0; NVAR];
        for (i, j, k) in grid.interior_cells() {
            let r = self.values[grid.interior_index(i, j, k)];
            for c in 0..NVAR {
                s[c] += r[c] * vol;
            }
        }
        s
    }
}

/// The semi-discrete right-hand side for one problem setup.
#[derive(Debug, Clone)]
pub struct SpatialOperator {
    pub grid: Grid,
    pub gas: GasModel,
    pub bcs: BoundarySet,
    pub source: SourceTerm,
    pub options: SchemeOptions,
}

/// Physical derivatives of (u, v, w, T) along each axis, per extended cell.
type ViscousGradients = [Vec<[f64; 4]>; 3];

impl SpatialOperator {
    pub fn new(
        grid: Grid,
        gas: GasModel,
        bcs: BoundarySet,
        source: SourceTerm,
        options: SchemeOptions,
    ) -> Result<Self> {
        gas.validate()?;
        bcs.validate(&grid)?;
        Ok(Self { grid, gas, bcs, source, options })
    }

    fn recon_options(&self) -> ReconOptions {
        ReconOptions {
            scheme: self.options.scheme,
            characteristic: self.options.characteristic,
            mirror_exact: self.options.mirror_exact,
            gamma: self.gas.gamma,
        }
    }

    fn viscous_gradient_scheme(&self) -> GradientScheme {
        self.options.scheme.gradient_scheme().unwrap_or(GradientScheme::Eg2)
    }

    fn viscous_gradients(&self, prim: &[Vec5]) -> Result<ViscousGradients> {
        let grid = &self.grid;
        let len = prim.len();
        let mut out: ViscousGradients = [vec![[0.0; 4]; len], vec![[0.0; 4]; len], vec![[0.0; 4]; len]];
        let tfac = self.gas.mach * self.gas.mach * self.gas.gamma;
        for axis in grid.active_axes().collect::<Vec<_>>() {
            let lg = LineGradients::for_axis(self.viscous_gradient_scheme(), grid, axis, self.options.mirror_exact)?;
            let ext = grid.extent(axis);
            let stride = grid.stride(axis);
            let inv_h = 1.0 / grid.spacing[axis];
            let starts = line_starts(grid, axis);
            let lines: Vec<Vec<[f64; 4]>> = starts
                .par_iter()
                .map_init(
                    || (vec![0.0; ext], vec![0.0; ext], vec![0.0; ext]),
                    |(f, d, s), &start| {
                        let mut res = vec![[0.0; 4]; ext];
                        for q in 0..4 {
                            for e in 0..ext {
                                let p = &prim[start + e * stride];
                                f[e] = if q < 3 { p[1 + q] } else { tfac * p[4] / p[0] };
                            }
                            lg.first(f, d, s);
                            for e in 0..ext {
                                res[e][q] = d[e] * inv_h;
                            }
                        }
                        res
                    },
                )
                .collect();
            for (start, line) in starts.iter().zip(lines) {
                for (e, v) in line.into_iter().enumerate() {
                    out[axis][start + e * stride] = v;
                }
            }
        }
        Ok(out)
    }

    /// Residual of a conserved field at time `t`. Ghosts are refilled first.
    pub fn residual(&self, q: &mut Field, t: f64) -> Result<Residual> {
        fill_ghosts(q, &self.grid, &self.gas, &self.bcs, t)?;
        let grid = &self.grid;
        let gm1 = self.gas.gamma - 1.0;
        let prim: Vec<Vec5> = q.data.par_iter().map(|c| cons_to_prim(c, gm1)).collect();
        let vgrad = if self.gas.viscous { Some(self.viscous_gradients(&prim)?) } else { None };
        let mut values = vec![[0.0; NVAR]; prim.len()];
        let mut fallbacks = FallbackCount::default();
        let opts = self.recon_options();
        for axis in grid.active_axes().collect::<Vec<_>>() {
            let proto = LineReconstructor::new(opts, grid, axis)?;
            let ext = grid.extent(axis);
            let stride = grid.stride(axis);
            let n = grid.n[axis];
            let g = grid.ghost;
            let h = grid.spacing[axis];
            let starts = interior_line_starts(grid, axis);
            let gamma = self.gas.gamma;
            let tfac = self.gas.mach * self.gas.mach * gamma;
            let lines: Vec<Result<(Vec<Vec5>, FallbackCount)>> = starts
                .par_iter()
                .map_init(
                    || (proto.clone(), vec![[0.0; NVAR]; ext], vec![[0.0; NVAR]; n + 1]),
                    |(rec, line, flux), &start| {
                        for (e, v) in line.iter_mut().enumerate() {
                            *v = prim[start + e * stride];
                        }
                        rec.count = FallbackCount::default();
                        rec.reconstruct(line)?;
                        for k in 0..=n {
                            let i = g - 1 + k;
                            flux[k] = hllc(&rec.states.left[i], &rec.states.right[i], gamma, axis);
                        }
                        if let Some(vg) = &vgrad {
                            for k in 0..=n {
                                let (a, b) = (start + (g - 1 + k) * stride, start + (g + k) * stride);
                                let fv = viscous_face(
                                    &prim[a],
                                    &prim[b],
                                    vg,
                                    a,
                                    b,
                                    axis,
                                    h,
                                    tfac,
                                    self.options.alpha_d,
                                    &self.gas,
                                );
                                for c in 0..NVAR {
                                    flux[k][c] -= fv[c];
                                }
                            }
                        }
                        let inv_h = 1.0 / h;
                        let out = (0..n)
                            .map(|k| {
                                let mut r = [0.0; NVAR];
                                for c in 0..NVAR {
                                    r[c] = -(flux[k + 1][c] - flux[k][c]) * inv_h;
                                }
                                r
                            })
                            .collect();
                        Ok((out, rec.count))
                    },
                )
                .collect();
            for (start, res) in starts.iter().zip(lines) {
                let (line, count) = res?;
                fallbacks.add(&count);
                for (k, r) in line.into_iter().enumerate() {
                    let dst = &mut values[start + (g + k) * stride];
                    for c in 0..NVAR {
                        dst[c] += r[c];
                    }
                }
            }
        }
        if self.source != SourceTerm::None {
            for (i, j, k) in grid.interior_cells() {
                let idx = grid.interior_index(i, j, k);
                let s = self.source.evaluate(&q.data[idx]);
                for c in 0..NVAR {
                    values[idx][c] += s[c];
                }
            }
        }
        Ok(Residual { values, fallbacks })
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn viscous_face(
    pa: &Vec5,
    pb: &Vec5,
    vg: &ViscousGradients,
    a: usize,
    b: usize,
    axis: usize,
    h: f64,
    tfac: f64,
    alpha_d: f64,
    gas: &GasModel,
) -> Vec5 {
    let qa = [pa[1], pa[2], pa[3], tfac * pa[4] / pa[0]];
    let qb = [pb[1], pb[2], pb[3], tfac * pb[4] / pb[0]];
    // g[q][dir] = d q / d x_dir at the face
    let mut g = [[0.0; 3]; 4];
    for q in 0..4 {
        for dir in 0..3 {
            g[q][dir] = if dir == axis {
                face_normal_gradient(qa[q], qb[q], vg[dir][a][q], vg[dir][b][q], h, alpha_d)
            } else {
                0.5 * (vg[dir][a][q] + vg[dir][b][q])
            };
        }
    }
    let vel = [0.5 * (pa[1] + pb[1]), 0.5 * (pa[2] + pb[2]), 0.5 * (pa[3] + pb[3])];
    viscous_face_flux(vel, [g[0], g[1], g[2]], g[3], gas, axis)
}

/// Residual of a conserved field, building a one-off operator.
pub fn residual(
    q: &mut Field,
    grid: &Grid,
    gas: &GasModel,
    scheme: SchemeOptions,
    bcs: &BoundarySet,
    source: SourceTerm,
    time: f64,
) -> Result<Residual> {
    SpatialOperator::new(grid.clone(), *gas, bcs.clone(), source, scheme)?.residual(q, time)
}

/// How the time step is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStepRule {
    /// `CFL * min(dt_inviscid, dt_viscous)`.
    Cfl(f64),
    /// `CFL * dx^2` on the smallest active spacing.
    SpacingSquared(f64),
    Fixed(f64),
}

/// Constant of the viscous time-step bound.
pub const VISCOUS_ALPHA: f64 = 4.0;

/// Stable time step of a conserved field.
pub fn compute_dt(q: &Field, grid: &Grid, gas: &GasModel, cfl: f64) -> Result<f64> {
    let gm1 = gas.gamma - 1.0;
    let axes: Vec<usize> = grid.active_axes().collect();
    let mut dt_inv = f64::INFINITY;
    let mut dt_visc = f64::INFINITY;
    for (i, j, k) in grid.interior_cells() {
        let p = cons_to_prim(&q.data[grid.interior_index(i, j, k)], gm1);
        let c = (gas.gamma * p[4] / p[0]).sqrt();
        if !c.is_finite() {
            return Err(Error::NonFinite(format!("sound speed in cell ({i},{j},{k})")));
        }
        let nu = gas.kinematic_viscosity(p[0]);
        for &a in &axes {
            let h = grid.spacing[a];
            dt_inv = dt_inv.min(h / (p[1 + a].abs() + c));
            if nu > 0.0 {
                dt_visc = dt_visc.min(h * h / (VISCOUS_ALPHA * nu));
            }
        }
    }
    let dt = cfl * dt_inv.min(dt_visc);
    if dt.is_finite() && dt > 0.0 {
        Ok(dt)
    } else {
        Err(Error::NonFinite("time step".into()))
    }
}

/// One TVD-RK3 step on the interior cells of `q`. `res` receives the stage
/// field (ghosts free to overwrite) and the stage time.
pub fn rk3_step(
    q: &mut Field,
    grid: &Grid,
    dt: f64,
    t: f64,
    mut res: impl FnMut(&mut Field, f64) -> Result<Vec<Vec5>>,
) -> Result<()> {
    let cells: Vec<usize> = grid.interior_cells().map(|(i, j, k)| grid.interior_index(i, j, k)).collect();
    let check = |f: &Field, stage: usize, time: f64| -> Result<()> {
        if cells.iter().all(|&i| f.data[i].iter().all(|v| v.is_finite())) {
            Ok(())
        } else {
            Err(Error::StageNaN { stage, time })
        }
    };
    let q0 = q.clone();
    let r = res(q, t)?;
    let mut q1 = q0.clone();
    for &i in &cells {
        for c in 0..NVAR {
            q1.data[i][c] = q0.data[i][c] + dt * r[i][c];
        }
    }
    check(&q1, 1, t)?;
    let r = res(&mut q1, t + dt)?;
    let mut q2 = q1.clone();
    for &i in &cells {
        for c in 0..NVAR {
            q2.data[i][c] = 0.75 * q0.data[i][c] + 0.25 * q1.data[i][c] + 0.25 * dt * r[i][c];
        }
    }
    check(&q2, 2, t + dt)?;
    let r = res(&mut q2, t + 0.5 * dt)?;
    for &i in &cells {
        for c in 0..NVAR {
            q.data[i][c] = q0.data[i][c] / 3.0 + 2.0 / 3.0 * q2.data[i][c] + 2.0 / 3.0 * dt * r[i][c];
        }
    }
    check(q, 3, t + 0.5 * dt)
}

/// Per-step record kept by [`Simulation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub fallbacks: FallbackCount,
}

/// A conserved field advanced in time by one spatial operator.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub op: SpatialOperator,
    pub q: Field,
    pub time: f64,
    pub steps: usize,
    pub rule: TimeStepRule,
    pub fallbacks: FallbackCount,
    pub history: Vec<StepRecord>,
}

impl Simulation {
    pub fn new(op: SpatialOperator, q: Field, rule: TimeStepRule) -> Result<Self> {
        if !q.matches(&op.grid) || q.kind != FieldKind::Conserved {
            return Err(Error::GridMismatch("initial field must be conserved on the operator grid".into()));
        }
        let mut q = q;
        fill_ghosts(&mut q, &op.grid, &op.gas, &op.bcs, 0.0)?;
        Ok(Self { op, q, time: 0.0, steps: 0, rule, fallbacks: FallbackCount::default(), history: Vec::new() })
    }

    pub fn grid(&self) -> &Grid {
        &self.op.grid
    }

    pub fn gas(&self) -> &GasModel {
        &self.op.gas
    }

    pub fn stable_dt(&self) -> Result<f64> {
        match self.rule {
            TimeStepRule::Cfl(cfl) => compute_dt(&self.q, &self.op.grid, &self.op.gas, cfl),
            TimeStepRule::SpacingSquared(cfl) => {
                let h = self.op.grid.active_axes().map(|a| self.op.grid.spacing[a]).fold(f64::INFINITY, f64::min);
                Ok(cfl * h * h)
            }
            TimeStepRule::Fixed(dt) => Ok(dt),
        }
    }

    /// Advances by exactly `dt`.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let op = &self.op;
        let mut count = FallbackCount::default();
        rk3_step(&mut self.q, &op.grid, dt, self.time, |f, t| {
            let r = op.residual(f, t)?;
            count.add(&r.fallbacks);
            Ok(r.values)
        })?;
        self.time += dt;
        self.steps += 1;
        self.fallbacks.add(&count);
        self.history.push(StepRecord { step: self.steps, time: self.time, dt, fallbacks: count });
        fill_ghosts(&mut self.q, &self.op.grid, &self.op.gas, &self.op.bcs, self.time)
    }

    /// Steps until `t_final`, clipping the last step; `observe` runs after each step.
    pub fn advance_to(&mut self, t_final: f64, mut observe: impl FnMut(&Simulation) -> Result<()>) -> Result<()> {
        while self.time < t_final {
            let mut dt = self.stable_dt()?;
            let remaining = t_final - self.time;
            if dt >= remaining || remaining - dt < 1e-12 * t_final {
                dt = remaining;
            }
            self.step(dt)?;
            if t_final - self.time <= 1e-14 * t_final.max(1.0) {
                self.time = t_final;
            }
            observe(self)?;
        }
        Ok(())
    }

    pub fn primitive(&self) -> Field {
        self.q.to_primitive(&self.op.gas)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn periodic_1d(n: usize, init: impl Fn(f64) -> PrimitiveState) -> (Grid, Field, GasModel) {
        let grid = Grid::line(n, 0.0, 1.0, true).unwrap();
        let gas = GasModel::inviscid(1.4);
        let q = Field::from_primitive_fn(&grid, &gas, |x| init(x[0])).unwrap();
        (grid, q, gas)
    }

    #[test]
    fn periodic_ghosts_copy_the_far_side() {
        let (grid, mut q, gas) = periodic_1d(16, |x| PrimitiveState::new_1d(2.0 + (2.0 * PI * x).sin(), 0.0, 1.0));
        fill_ghosts(&mut q, &grid, &gas, &BoundarySet::periodic(), 0.0).unwrap();
        let g = grid.ghost;
        assert_eq!(q.data[g - 1], q.data[g + 15]);
        assert_eq!(q.data[g + 16], q.data[g]);
    }

    #[test]
    fn reflective_ghosts_mirror() {
        let grid = Grid::line(8, 0.0, 1.0, false).unwrap();
        let gas = GasModel::inviscid(1.4);
        let mut q =
            Field::from_primitive_fn(&grid, &gas, |x| PrimitiveState::new(1.0 + x[0], 0.5, 0.2, 0.0, 1.0)).unwrap();
        let bcs = BoundarySet::uniform(BoundaryCondition::Reflective { no_slip: false });
        fill_ghosts(&mut q, &grid, &gas, &bcs, 0.0).unwrap();
        let g = grid.ghost;
        for k in 0..g {
            let (ghost, inner) = (q.data[g - 1 - k], q.data[g + k]);
            assert_eq!(ghost[0], inner[0]);
            assert_eq!(ghost[1], -inner[1]);
            assert_eq!(ghost[2], inner[2]);
            assert_eq!(ghost[4], inner[4]);
        }
        let bcs = BoundarySet::uniform(BoundaryCondition::Reflective { no_slip: true });
        fill_ghosts(&mut q, &grid, &gas, &bcs, 0.0).unwrap();
        assert_eq!(q.data[g - 1][2], -q.data[g][2]);
    }

    #[test]
    fn unmatched_periodic_pair_is_rejected() {
        let grid = Grid::line(8, 0.0, 1.0, true).unwrap();
        let bcs = BoundarySet::periodic().with(0, 1, BoundaryCondition::ZeroGradient);
        assert!(bcs.validate(&grid).is_err());
    }

    #[test]
    fn uniform_state_has_zero_residual() {
        for scheme in ReconScheme::ALL {
            let grid = Grid::rect([12, 10], [0.0, 0.0], [1.0, 1.0], [true, true]).unwrap();
            let gas = GasModel::inviscid(1.4);
            let mut q = Field::from_primitive_fn(&grid, &gas, |_| PrimitiveState::new_2d(1.0, 0.3, -0.4, 2.0)).unwrap();
            let r = residual(
                &mut q,
                &grid,
                &gas,
                SchemeOptions::new(scheme),
                &BoundarySet::periodic(),
                SourceTerm::None,
                0.0,
            )
            .unwrap();
            for (i, j, k) in grid.interior_cells() {
                for v in r.values[grid.interior_index(i, j, k)] {
                    assert!(v.abs() < 1e-13, "{scheme}: {v}");
                }
            }
        }
    }

    #[test]
    fn periodic_residual_telescopes() {
        let (grid, mut q, gas) =
            periodic_1d(40, |x| PrimitiveState::new_1d(1.0 + 0.5 * (2.0 * PI * x).sin(), 1.0, 1.0));
        for scheme in [ReconScheme::Ig4Mp, ReconScheme::Ig6Mp, ReconScheme::Muscl3] {
            let r = residual(
                &mut q,
                &grid,
                &gas,
                SchemeOptions::new(scheme),
                &BoundarySet::periodic(),
                SourceTerm::None,
                0.0,
            )
            .unwrap();
            for s in r.integral(&grid) {
                assert!(s.abs() <= 1e-12, "{scheme}: {s}");
            }
        }
    }

    #[test]
    fn dt_for_stagnant_gas() {
        let grid = Grid::line(100, 0.0, 1.0, false).unwrap();
        let gas = GasModel::inviscid(1.4);
        let q = Field::from_primitive_fn(&grid, &gas, |_| PrimitiveState::new_1d(1.0, 0.0, 1.0)).unwrap();
        let dt = compute_dt(&q, &grid, &gas, 0.2).unwrap();
        assert!((dt - 0.2 * 0.01 / 1.4f64.sqrt()).abs() < 1e-15);
        let fine = Grid::line(200, 0.0, 1.0, false).unwrap();
        let qf = Field::from_primitive_fn(&fine, &gas, |_| PrimitiveState::new_1d(1.0, 0.0, 1.0)).unwrap();
        assert!((compute_dt(&qf, &fine, &gas, 0.2).unwrap() - 0.5 * dt).abs() < 1e-15);
    }

    #[test]
    fn viscous_dt_bound() {
        let grid = Grid::line(10, 0.0, 1.0, false).unwrap();
        let gas = GasModel::navier_stokes(1.4, 1.0, 0.72, 1.0, 1.0);
        let q = Field::from_primitive_fn(&grid, &gas, |_| PrimitiveState::new_1d(1.0, 0.0, 1e-6)).unwrap();
        let dt = compute_dt(&q, &grid, &gas, 1.0).unwrap();
        assert!((dt - 0.0025).abs() < 1e-15);
    }

    #[test]
    fn rk3_matches_stability_polynomial() {
        let grid = Grid::line(4, 0.0, 1.0, true).unwrap();
        let mut q = Field::zeros(&grid, FieldKind::Conserved);
        for c in q.data.iter_mut() {
            *c = [1.0; NVAR];
        }
        let lambda = -0.7;
        let dt = 0.3;
        rk3_step(&mut q, &grid, dt, 0.0, |f, _| Ok(f.data.iter().map(|v| v.map(|x| lambda * x)).collect())).unwrap();
        let z: f64 = lambda * dt;
        let expected = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
        assert!((q.data[grid.interior_index(1, 0, 0)][0] - expected).abs() < 1e-14);
    }

    #[test]
    fn rk3_zero_residual_is_identity() {
        let (grid, mut q, _) = periodic_1d(8, |x| PrimitiveState::new_1d(1.0 + x, 0.0, 1.0));
        let before = q.clone();
        rk3_step(&mut q, &grid, 0.1, 0.0, |f, _| Ok(vec![[0.0; NVAR]; f.data.len()])).unwrap();
        assert_eq!(q, before);
    }

    #[test]
    fn rk3_reports_nan_stage() {
        let (grid, mut q, _) = periodic_1d(8, |_| PrimitiveState::new_1d(1.0, 0.0, 1.0));
        let err = rk3_step(&mut q, &grid, 0.1, 0.0, |f, _| Ok(vec![[f64::NAN; NVAR]; f.data.len()])).unwrap_err();
        assert!(matches!(err, Error::StageNaN { stage: 1, .. }));
    }

    #[test]
    fn free_stream_survives_steps() {
        let grid = Grid::rect([10, 10], [0.0, 0.0], [1.0, 1.0], [true, true]).unwrap();
        let gas = GasModel::inviscid(1.4);
        let state = PrimitiveState::new_2d(1.0, 0.5, 0.25, 1.0);
        let q = Field::from_primitive_fn(&grid, &gas, |_| state).unwrap();
        let op = SpatialOperator::new(
            grid.clone(),
            gas,
            BoundarySet::periodic(),
            SourceTerm::None,
            SchemeOptions::new(ReconScheme::Ig6Mp),
        )
        .unwrap();
        let mut sim = Simulation::new(op, q.clone(), TimeStepRule::Cfl(0.2)).unwrap();
        for _ in 0..20 {
            let dt = sim.stable_dt().unwrap();
            sim.step(dt).unwrap();
        }
        for (i, j, k) in grid.interior_cells() {
            let idx = grid.interior_index(i, j, k);
            for c in 0..NVAR {
                assert!((sim.q.data[idx][c] - q.data[idx][c]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn last_step_is_clipped() {
        let (grid, q, gas) = periodic_1d(16, |x| PrimitiveState::new_1d(1.0 + 0.1 * (2.0 * PI * x).sin(), 1.0, 1.0));
        let op = SpatialOperator::new(
            grid,
            gas,
            BoundarySet::periodic(),
            SourceTerm::None,
            SchemeOptions::new(ReconScheme::Ig4),
        )
        .unwrap();
        let mut sim = Simulation::new(op, q, TimeStepRule::Cfl(0.2)).unwrap();
        sim.advance_to(0.0123, |_| Ok(())).unwrap();
        assert_eq!(sim.time, 0.0123);
    }

    #[test]
    fn gravity_source() {
        let s = SourceTerm::RayleighTaylorGravity.evaluate(&[2.0, 0.1, 0.4, 0.0, 5.0]);
        assert_eq!(s, [0.0, 0.0, 2.0, 0.0, 0.4]);
    }

    #[test]
    fn couette_flow_is_steady() {
        // u = y between a moving and a fixed wall is an exact viscous solution
        let grid = Grid::rect([8, 16], [0.0, 0.0], [1.0, 1.0], [true, false]).unwrap();
        let gas = GasModel::navier_stokes(1.4, 1.0, 0.72, 1.0, 0.01);
        let mut q = Field::from_primitive_fn(&grid, &gas, |x| PrimitiveState::new_2d(1.0, x[1], 0.0, 1.0)).unwrap();
        let profile: ProfileFn = Arc::new(|x, _| PrimitiveState::new_2d(1.0, x[1], 0.0, 1.0));
        let bcs =
            BoundarySet::periodic().with_axis(1, BoundaryCondition::TimeDependent { tag: "couette".into(), profile });
        for scheme in [ReconScheme::Muscl3, ReconScheme::Ig4] {
            let r = residual(&mut q, &grid, &gas, SchemeOptions::new(scheme), &bcs, SourceTerm::None, 0.0).unwrap();
            for (i, j, k) in grid.interior_cells() {
                let v = r.values[grid.interior_index(i, j, k)];
                // viscous heating of a linear shear profile
                assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12 && v[2].abs() < 1e-10, "{scheme} {v:?}");
                assert!((v[4] - 0.01).abs() < 1e-10, "{scheme} {v:?}");
            }
        }
    }
}
