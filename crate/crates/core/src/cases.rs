//! Registry of the benchmark problems.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::analysis::{exact_riemann, project_values};
use crate::error::{Error, Result};
use crate::reconstruction::ReconScheme;
use crate::solver::{
    BoundaryCondition, BoundarySet, SchemeOptions, Simulation, SourceTerm, SpatialOperator, TimeStepRule,
};
use crate::state::{Field, GasModel, Grid, PrimitiveState};

pub type Initializer = Arc<dyn Fn([f64; 3]) -> PrimitiveState + Send + Sync>;
/// Exact primitive solution at a position and time.
pub type ExactSolution = Arc<dyn Fn([f64; 3], f64) -> PrimitiveState + Send + Sync>;

/// Default CFL number of every case.
pub const DEFAULT_CFL: f64 = 0.2;

pub const CASE_NAMES: [&str; 13] = [
    "linear_ooa",
    "linear_ooa_printed",
    "isentropic_vortex",
    "sod",
    "lax",
    "shu_osher",
    "titarev_toro",
    "shock_entropy_2d",
    "riemann_config3",
    "rayleigh_taylor",
    "dmr",
    "tgv_inviscid",
    "viscous_shock_tube",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagnostic {
    KineticEnergy,
    Enstrophy,
    MinDensityPressure,
    Fallbacks,
}

#[derive(Clone)]
pub struct CaseSpec {
    pub name: &'static str,
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    /// Default cell counts; inactive axes hold 1.
    pub n: [usize; 3],
    pub periodic: [bool; 3],
    pub gas: GasModel,
    pub initializer: Initializer,
    pub bcs: BoundarySet,
    pub source: SourceTerm,
    pub t_final: f64,
    pub time_step: TimeStepRule,
    /// Named alternative grids.
    pub presets: Vec<(&'static str, [usize; 3])>,
    /// Axis about whose mid-plane the solution stays mirror-symmetric.
    pub mirror_axis: Option<usize>,
    pub exact: Option<ExactSolution>,
    /// Fine grid of the self-generated reference, if any.
    pub reference_grid: Option<[usize; 3]>,
    pub diagnostics: Vec<Diagnostic>,
}

impl std::fmt::Debug for CaseSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CaseSpec")
            .field("name", &self.name)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("n", &self.n)
            .field("gas", &self.gas)
            .field("t_final", &self.t_final)
            .field("time_step", &self.time_step)
            .finish_non_exhaustive()
    }
}

impl CaseSpec {
    pub fn dimension(&self) -> usize {
        self.n.iter().filter(|&&n| n > 1).count()
    }

    pub fn grid(&self) -> Result<Grid> {
        self.grid_with(self.n)
    }

    /// Grid over the case domain with other cell counts.
    pub fn grid_with(&self, n: [usize; 3]) -> Result<Grid> {
        for a in 0..3 {
            if (n[a] > 1) != (self.n[a] > 1) {
                return Err(Error::GridMismatch(format!("{}: axis {a} activity differs from the case", self.name)));
            }
        }
        Grid::new(n, self.lower, self.upper, crate::state::DEFAULT_GHOST, self.periodic)
    }

    /// Uniform refinement `m` cells along every active axis scaled by the default aspect.
    pub fn grid_cells(&self, m: usize) -> [usize; 3] {
        let base = self.n.iter().filter(|&&n| n > 1).min().copied().unwrap_or(1);
        self.n.map(|n| if n > 1 { n * m / base } else { 1 })
    }

    pub fn preset(&self, name: &str) -> Option<[usize; 3]> {
        self.presets.iter().find(|(p, _)| *p == name).map(|(_, n)| *n)
    }

    pub fn initial_field(&self, grid: &Grid) -> Result<Field> {
        let init = self.initializer.clone();
        let mut q = Field::from_primitive_fn(grid, &self.gas, move |x| init(x))?;
        if let Some(axis) = self.mirror_axis {
            q.mirror_symmetrize(grid, axis);
        }
        Ok(q)
    }

    pub fn scheme_options(&self, scheme: ReconScheme) -> SchemeOptions {
        let mut o = SchemeOptions::new(scheme);
        o.mirror_exact = self.mirror_axis.is_some();
        o
    }

    /// Ready-to-run simulation; `cfl` replaces the CFL number of the case rule.
    pub fn simulation(&self, grid: &Grid, options: SchemeOptions, cfl: Option<f64>) -> Result<Simulation> {
        let op = SpatialOperator::new(grid.clone(), self.gas, self.bcs.clone(), self.source, options)?;
        let rule = match (self.time_step, cfl) {
            (TimeStepRule::Cfl(_), Some(c)) => TimeStepRule::Cfl(c),
            (TimeStepRule::SpacingSquared(_), Some(c)) => TimeStepRule::SpacingSquared(c),
            (rule, _) => rule,
        };
        Simulation::new(op, self.initial_field(grid)?, rule)
    }

    /// Runs `scheme` on `grid` to the final time with default settings.
    pub fn run(&self, grid: &Grid, scheme: ReconScheme) -> Result<Simulation> {
        let mut sim = self.simulation(grid, self.scheme_options(scheme), None)?;
        sim.advance_to(self.t_final, |_| Ok(()))?;
        Ok(sim)
    }
}

fn case_1d(
    name: &'static str,
    lower: f64,
    upper: f64,
    n: usize,
    gamma: f64,
    t_final: f64,
    init: Initializer,
) -> CaseSpec {
    CaseSpec {
        name,
        lower: [lower, 0.0, 0.0],
        upper: [upper, 1.0, 1.0],
        n: [n, 1, 1],
        periodic: [false; 3],
        gas: GasModel::inviscid(gamma),
        initializer: init,
        bcs: BoundarySet::uniform(BoundaryCondition::ZeroGradient),
        source: SourceTerm::None,
        t_final,
        time_step: TimeStepRule::Cfl(DEFAULT_CFL),
        presets: Vec::new(),
        mirror_axis: None,
        exact: None,
        reference_grid: None,
        diagnostics: vec![Diagnostic::MinDensityPressure, Diagnostic::Fallbacks],
    }
}

fn riemann_tube(name: &'static str, l: PrimitiveState, r: PrimitiveState, t_final: f64) -> Result<CaseSpec> {
    let exact = exact_riemann(l, r, 1.4)?;
    let mut c = case_1d(name, 0.0, 1.0, 200, 1.4, t_final, Arc::new(move |x| if x[0] < 0.5 { l } else { r }));
    c.exact = Some(Arc::new(move |x, t| exact.at(x[0], t, 0.5)));
    Ok(c)
}

/// Wraps `d` into `[-l/2, l/2)`.
fn wrap(d: f64, l: f64) -> f64 {
    d - l * (d / l + 0.5).floor()
}

/// Isentropic vortex of strength `beta` centred at `(xc, yc)`.
pub fn vortex_state(x: f64, y: f64, xc: f64, yc: f64, beta: f64, gamma: f64) -> PrimitiveState {
    let (dx, dy) = (x - xc, y - yc);
    let r2 = dx * dx + dy * dy;
    let rho =
        (1.0 - (gamma - 1.0) * beta * beta / (8.0 * gamma * PI * PI) * (1.0 - r2).exp()).powf(1.0 / (gamma - 1.0));
    let s = beta / (2.0 * PI) * (0.5 * (1.0 - r2)).exp();
    PrimitiveState::new_2d(rho, 1.0 - s * dy, 1.0 + s * dx, rho.powf(gamma))
}

/// Taylor-Green vortex initial state.
pub fn tgv_state(x: [f64; 3]) -> PrimitiveState {
    let [x, y, z] = x;
    let p = 100.0 + ((2.0 * z).cos() + 2.0) * ((2.0 * x).cos() + (2.0 * y).cos()) / 16.0 - 2.0 / 16.0;
    PrimitiveState::new(1.0, x.sin() * y.cos() * z.cos(), -x.cos() * y.sin() * z.cos(), 0.0, p)
}

/// Post-shock state of the Mach 10 double-Mach-reflection shock.
pub const DMR_POST: PrimitiveState = PrimitiveState::new_2d(8.0, 7.144_709_581_221_618, -4.125, 116.5);
pub const DMR_PRE: PrimitiveState = PrimitiveState::new_2d(1.4, 0.0, 0.0, 1.0);

fn dmr_state(x: [f64; 3], t: f64) -> PrimitiveState {
    if x[0] < 1.0 / 6.0 + (x[1] + 20.0 * t) / 3f64.sqrt() {
        DMR_POST
    } else {
        DMR_PRE
    }
}

/// Density wave `1 + 0.5 sin(k (x + y - 2t))` advected diagonally through
/// exact Dirichlet ghosts.
fn linear_case(name: &'static str, k: f64) -> CaseSpec {
    let exact = move |x: [f64; 3], t: f64| {
        PrimitiveState::new_2d(1.0 + 0.5 * (k * (x[0] + x[1] - 2.0 * t)).sin(), 1.0, 1.0, 1.0)
    };
    let profile: crate::solver::ProfileFn = Arc::new(exact);
    CaseSpec {
        name,
        lower: [-1.0, -1.0, 0.0],
        upper: [1.0, 1.0, 1.0],
        n: [40, 40, 1],
        periodic: [false; 3],
        gas: GasModel::inviscid(1.4),
        initializer: Arc::new(move |x| exact(x, 0.0)),
        bcs: BoundarySet::uniform(BoundaryCondition::TimeDependent { tag: "exact".into(), profile }),
        source: SourceTerm::None,
        t_final: 2.0,
        time_step: TimeStepRule::SpacingSquared(DEFAULT_CFL),
        presets: vec![("10", [10, 10, 1]), ("20", [20, 20, 1]), ("40", [40, 40, 1]), ("80", [80, 80, 1])],
        mirror_axis: None,
        exact: Some(Arc::new(exact)),
        reference_grid: None,
        diagnostics: vec![Diagnostic::MinDensityPressure],
    }
}

pub fn make_case(name: &str) -> Result<CaseSpec> {
    let case = match name {
        "linear_ooa" => linear_case("linear_ooa", PI),
        "linear_ooa_printed" => linear_case("linear_ooa_printed", 1.0),
        "isentropic_vortex" => {
            let gamma = 1.4;
            CaseSpec {
                name: "isentropic_vortex",
                lower: [0.0, 0.0, 0.0],
                upper: [10.0, 10.0, 1.0],
                n: [100, 100, 1],
                periodic: [true, true, false],
                gas: GasModel::inviscid(gamma),
                initializer: Arc::new(move |x| vortex_state(x[0], x[1], 5.0, 5.0, 5.0, gamma)),
                bcs: BoundarySet::periodic(),
                source: SourceTerm::None,
                t_final: 10.0,
                time_step: TimeStepRule::Cfl(DEFAULT_CFL),
                presets: vec![("25", [25, 25, 1]), ("50", [50, 50, 1]), ("100", [100, 100, 1]), ("200", [200, 200, 1])],
                mirror_axis: None,
                exact: Some(Arc::new(move |x, t| {
                    let dx = wrap(x[0] - 5.0 - t, 10.0);
                    let dy = wrap(x[1] - 5.0 - t, 10.0);
                    vortex_state(dx, dy, 0.0, 0.0, 5.0, gamma)
                })),
                reference_grid: None,
                diagnostics: vec![Diagnostic::MinDensityPressure],
            }
        }
        "sod" => {
            riemann_tube("sod", PrimitiveState::new_1d(0.125, 0.0, 0.1), PrimitiveState::new_1d(1.0, 0.0, 1.0), 0.2)?
        }
        "lax" => riemann_tube(
            "lax",
            PrimitiveState::new_1d(0.445, 0.698, 3.528),
            PrimitiveState::new_1d(0.5, 0.0, 0.571),
            0.14,
        )?,
        "shu_osher" => {
            let mut c = case_1d(
                "shu_osher",
                -5.0,
                5.0,
                300,
                1.4,
                1.8,
                Arc::new(|x| {
                    if x[0] < -4.0 {
                        PrimitiveState::new_1d(3.857143, 2.629369, 10.3333)
                    } else {
                        PrimitiveState::new_1d(1.0 + 0.2 * (5.0 * x[0]).sin(), 0.0, 1.0)
                    }
                }),
            );
            c.presets = vec![("150", [150, 1, 1]), ("300", [300, 1, 1])];
            c.reference_grid = Some([1600, 1, 1]);
            c
        }
        "titarev_toro" => {
            let mut c = case_1d(
                "titarev_toro",
                -5.0,
                5.0,
                1000,
                1.4,
                5.0,
                Arc::new(|x| {
                    if x[0] < -4.5 {
                        PrimitiveState::new_1d(1.515695, 0.523326, 1.805)
                    } else {
                        PrimitiveState::new_1d(1.0 + 0.1 * (20.0 * PI * x[0]).sin(), 0.0, 1.0)
                    }
                }),
            );
            c.reference_grid = Some([3000, 1, 1]);
            c
        }
        "shock_entropy_2d" => {
            let theta = PI / 6.0;
            CaseSpec {
                name: "shock_entropy_2d",
                lower: [-5.0, -1.0, 0.0],
                upper: [5.0, 1.0, 1.0],
                n: [400, 80, 1],
                periodic: [false, true, false],
                gas: GasModel::inviscid(1.4),
                initializer: Arc::new(move |x| {
                    if x[0] <= -4.0 {
                        PrimitiveState::new_2d(3.857143, 2.629369, 0.0, 10.3333)
                    } else {
                        PrimitiveState::new_2d(
                            1.0 + 0.2 * (10.0 * x[0] * theta.cos() + 10.0 * x[1] * theta.sin()).sin(),
                            0.0,
                            0.0,
                            1.0,
                        )
                    }
                }),
                bcs: BoundarySet::periodic()
                    .with(0, 0, BoundaryCondition::Dirichlet(PrimitiveState::new_2d(3.857143, 2.629369, 0.0, 10.3333)))
                    .with(0, 1, BoundaryCondition::ZeroGradient),
                source: SourceTerm::None,
                t_final: 1.8,
                time_step: TimeStepRule::Cfl(DEFAULT_CFL),
                presets: Vec::new(),
                mirror_axis: None,
                exact: None,
                reference_grid: Some([1600, 320, 1]),
                diagnostics: vec![Diagnostic::MinDensityPressure, Diagnostic::Fallbacks],
            }
        }
        "riemann_config3" => {
            let a = 4.0 / 11f64.sqrt();
            CaseSpec {
                name: "riemann_config3",
                lower: [0.0; 3],
                upper: [1.0; 3],
                n: [400, 400, 1],
                periodic: [false; 3],
                gas: GasModel::inviscid(1.4),
                initializer: Arc::new(move |x| match (x[0] > 0.8, x[1] > 0.8) {
                    (true, true) => PrimitiveState::new_2d(1.5, 0.0, 0.0, 1.5),
                    (false, true) => PrimitiveState::new_2d(33.0 / 62.0, a, 0.0, 0.3),
                    (false, false) => PrimitiveState::new_2d(77.0 / 558.0, a, a, 9.0 / 310.0),
                    (true, false) => PrimitiveState::new_2d(33.0 / 62.0, 0.0, a, 0.3),
                }),
                bcs: BoundarySet::uniform(BoundaryCondition::ZeroGradient),
                source: SourceTerm::None,
                t_final: 0.8,
                time_step: TimeStepRule::Cfl(DEFAULT_CFL),
                presets: vec![("coarse", [200, 200, 1])],
                mirror_axis: None,
                exact: None,
                reference_grid: None,
                diagnostics: vec![Diagnostic::MinDensityPressure, Diagnostic::Fallbacks],
            }
        }
        "rayleigh_taylor" => {
            let gamma = 5.0 / 3.0;
            CaseSpec {
                name: "rayleigh_taylor",
                lower: [0.0, 0.0, 0.0],
                upper: [0.25, 1.0, 1.0],
                n: [120, 480, 1],
                periodic: [false; 3],
                gas: GasModel::inviscid(gamma),
                initializer: Arc::new(move |x| {
                    let (rho, p) = if x[1] < 0.5 { (2.0, 2.0 * x[1] + 1.0) } else { (1.0, x[1] + 1.5) };
                    let c = (gamma * p / rho).sqrt();
                    PrimitiveState::new_2d(rho, 0.0, -0.025 * c * (8.0 * PI * x[0]).cos(), p)
                }),
                bcs: BoundarySet::uniform(BoundaryCondition::Reflective { no_slip: false })
                    .with(1, 0, BoundaryCondition::Dirichlet(PrimitiveState::new_2d(2.0, 0.0, 0.0, 1.0)))
                    .with(1, 1, BoundaryCondition::Dirichlet(PrimitiveState::new_2d(1.0, 0.0, 0.0, 2.5))),
                source: SourceTerm::RayleighTaylorGravity,
                t_final: 1.95,
                time_step: TimeStepRule::Cfl(DEFAULT_CFL),
                presets: vec![("coarse", [60, 240, 1])],
                mirror_axis: Some(0),
                exact: None,
                reference_grid: None,
                diagnostics: vec![Diagnostic::MinDensityPressure, Diagnostic::Fallbacks],
            }
        }
        "dmr" => CaseSpec {
            name: "dmr",
            lower: [0.0, 0.0, 0.0],
            upper: [3.0, 1.0, 1.0],
            n: [768, 256, 1],
            periodic: [false; 3],
            gas: GasModel::inviscid(1.4),
            initializer: Arc::new(|x| dmr_state(x, 0.0)),
            bcs: BoundarySet::uniform(BoundaryCondition::ZeroGradient)
                .with(0, 0, BoundaryCondition::Dirichlet(DMR_POST))
                .with(1, 0, BoundaryCondition::SplitWall { axis: 0, split: 1.0 / 6.0, state: DMR_POST })
                .with(
                    1,
                    1,
                    BoundaryCondition::TimeDependent { tag: "moving shock".into(), profile: Arc::new(dmr_state) },
                ),
            source: SourceTerm::None,
            t_final: 0.2,
            time_step: TimeStepRule::Cfl(DEFAULT_CFL),
            presets: vec![("coarse", [384, 128, 1])],
            mirror_axis: None,
            exact: None,
            reference_grid: None,
            diagnostics: vec![Diagnostic::MinDensityPressure, Diagnostic::Fallbacks],
        },
        "tgv_inviscid" => {
            let l = 2.0 * PI;
            CaseSpec {
                name: "tgv_inviscid",
                lower: [0.0; 3],
                upper: [l; 3],
                n: [64; 3],
                periodic: [true; 3],
                gas: GasModel::inviscid(5.0 / 3.0),
                initializer: Arc::new(tgv_state),
                bcs: BoundarySet::periodic(),
                source: SourceTerm::None,
                t_final: 10.0,
                time_step: TimeStepRule::Cfl(DEFAULT_CFL),
                presets: vec![("smoke", [32; 3])],
                mirror_axis: None,
                exact: None,
                reference_grid: None,
                diagnostics: vec![Diagnostic::KineticEnergy, Diagnostic::Enstrophy, Diagnostic::Fallbacks],
            }
        }
        "viscous_shock_tube" => {
            let gamma = 1.4;
            CaseSpec {
                name: "viscous_shock_tube",
                lower: [0.0; 3],
                upper: [1.0, 0.5, 1.0],
                n: [2000, 1000, 1],
                periodic: [false; 3],
                gas: GasModel::navier_stokes(gamma, 2500.0, 0.73, 1.0, 1.0),
                initializer: Arc::new(move |x| {
                    if x[0] < 0.5 {
                        PrimitiveState::new_2d(120.0, 0.0, 0.0, 120.0 / gamma)
                    } else {
                        PrimitiveState::new_2d(1.2, 0.0, 0.0, 1.2 / gamma)
                    }
                }),
                bcs: BoundarySet::uniform(BoundaryCondition::Reflective { no_slip: true }).with(
                    1,
                    1,
                    BoundaryCondition::Reflective { no_slip: false },
                ),
                source: SourceTerm::None,
                t_final: 1.0,
                time_step: TimeStepRule::Cfl(DEFAULT_CFL),
                presets: vec![("coarse", [500, 250, 1])],
                mirror_axis: None,
                exact: None,
                reference_grid: None,
                diagnostics: vec![Diagnostic::MinDensityPressure, Diagnostic::Fallbacks, Diagnostic::Enstrophy],
            }
        }
        other => return Err(Error::UnknownCase(other.to_string())),
    };
    Ok(case)
}

/// L2 density errors of `scheme` on square refinements `m` (cells per
/// shortest active axis) against the exact solution of the case.
pub fn convergence_study(
    case: &CaseSpec,
    scheme: ReconScheme,
    sizes: &[usize],
) -> Result<Vec<crate::analysis::ErrorReport>> {
    let exact = case.exact.clone().ok_or_else(|| Error::Config(format!("{} has no exact solution", case.name)))?;
    let mut errors = Vec::new();
    for &m in sizes {
        let grid = case.grid_with(case.grid_cells(m))?;
        let sim = case.run(&grid, scheme)?;
        let e = crate::analysis::l2_error(&sim.q, &grid, |x| exact(x, sim.time).rho)?;
        errors.push((m, e));
    }
    if errors.len() == 1 {
        return Ok(vec![crate::analysis::ErrorReport { n: errors[0].0, error: errors[0].1, order: None }]);
    }
    crate::analysis::error_table(&errors)
}

/// Reference density, either exact or from a fine-grid run, ready to be
/// evaluated on coarser grids of the same domain.
#[derive(Clone)]
pub enum Reference {
    Exact { solution: ExactSolution, time: f64 },
    Fine { grid: Grid, density: Vec<f64> },
}

impl Reference {
    /// Interior density on `grid`, in storage order.
    pub fn density_on(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            Reference::Exact { solution, time } => {
                Ok(grid.interior_cells().map(|(i, j, k)| solution(grid.position(i, j, k), *time).rho).collect())
            }
            Reference::Fine { grid: fine, density } => project_values(density, fine, grid),
        }
    }
}

/// Reference at the final time: exact where known, otherwise an IG6MP run on
/// `fine` cells (default: the case's reference grid).
pub fn reference_solution(case: &CaseSpec, fine: Option<[usize; 3]>) -> Result<Reference> {
    if let Some(solution) = &case.exact {
        return Ok(Reference::Exact { solution: solution.clone(), time: case.t_final });
    }
    let n =
        fine.or(case.reference_grid).ok_or_else(|| Error::Config(format!("{} has no reference recipe", case.name)))?;
    let grid = case.grid_with(n)?;
    let sim = case.run(&grid, ReconScheme::Ig6Mp)?;
    let density = crate::analysis::interior_density(&sim.q, &grid)?;
    Ok(Reference::Fine { grid, density })
}
