//! Grid geometry, state vectors and ideal-gas conversions.
//!
//! All quantities are nondimensional. State vectors always carry five
//! components `(rho, u, v, w, p)` / `(rho, rho u, rho v, rho w, rho E)`, even
//! for one- and two-dimensional runs, where the unused velocity components
//! stay identically zero.

use crate::error::{Error, Result};

/// Number of components in every state vector.
pub const NVAR: usize = 5;

/// Component indices shared by primitive and conserved arrays.
pub const RHO: usize = 0;
pub const MX: usize = 1;
pub const MY: usize = 2;
pub const MZ: usize = 3;
pub const EN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub p: f64,
}

impl PrimitiveState {
    pub const fn new(rho: f64, u: f64, v: f64, w: f64, p: f64) -> Self {
        Self { rho, u, v, w, p }
    }

    /// One-dimensional state `(rho, u, p)`.
    pub const fn new_1d(rho: f64, u: f64, p: f64) -> Self {
        Self::new(rho, u, 0.0, 0.0, p)
    }

    pub const fn new_2d(rho: f64, u: f64, v: f64, p: f64) -> Self {
        Self::new(rho, u, v, 0.0, p)
    }

    pub fn from_array(a: [f64; NVAR]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn to_array(self) -> [f64; NVAR] {
        [self.rho, self.u, self.v, self.w, self.p]
    }

    /// Density and pressure strictly positive and every entry finite.
    pub fn is_physical(&self) -> bool {
        self.rho > 0.0 && self.p > 0.0 && self.to_array().iter().all(|x| x.is_finite())
    }

    pub fn velocity(&self, axis: usize) -> f64 {
        match axis {
            0 => self.u,
            1 => self.v,
            _ => self.w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState {
    pub rho: f64,
    pub rho_u: f64,
    pub rho_v: f64,
    pub rho_w: f64,
    /// Total energy per unit volume.
    pub rho_e: f64,
}

impl ConservedState {
    pub const fn new(rho: f64, rho_u: f64, rho_v: f64, rho_w: f64, rho_e: f64) -> Self {
        Self { rho, rho_u, rho_v, rho_w, rho_e }
    }

    pub fn from_array(a: [f64; NVAR]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn to_array(self) -> [f64; NVAR] {
        [self.rho, self.rho_u, self.rho_v, self.rho_w, self.rho_e]
    }
}

/// Ideal gas with optional constant-viscosity Navier-Stokes terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
    pub reynolds: f64,
    pub prandtl: f64,
    pub mach: f64,
    pub viscosity: f64,
    pub viscous: bool,
}

impl GasModel {
    pub fn inviscid(gamma: f64) -> Self {
        Self { gamma, reynolds: f64::INFINITY, prandtl: 0.72, mach: 1.0, viscosity: 0.0, viscous: false }
    }

    pub fn navier_stokes(gamma: f64, reynolds: f64, prandtl: f64, mach: f64, viscosity: f64) -> Self {
        Self { gamma, reynolds, prandtl, mach, viscosity, viscous: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return Err(Error::Config(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if self.viscous {
            for (name, value) in [
                ("reynolds", self.reynolds),
                ("prandtl", self.prandtl),
                ("mach", self.mach),
                ("viscosity", self.viscosity),
            ] {
                if !(value > 0.0) || !value.is_finite() {
                    return Err(Error::Config(format!("{name} must be positive and finite, got {value}")));
                }
            }
        }
        Ok(())
    }

    /// Effective kinematic viscosity `mu / (Re rho)` of the nondimensional equations.
    pub fn kinematic_viscosity(&self, rho: f64) -> f64 {
        if self.viscous {
            self.viscosity / (self.reynolds * rho)
        } else {
            0.0
        }
    }

    /// Coefficient multiplying `-dT/dx` in the heat flux.
    pub fn heat_conductivity(&self) -> f64 {
        self.viscosity / (self.reynolds * self.prandtl * self.mach * self.mach * (self.gamma - 1.0))
    }
}

fn check_finite(values: &[f64; NVAR], what: &str) -> Result<()> {
    if values.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Converts a conserved state to primitive form. A non-positive pressure is
/// returned as-is so positivity checks downstream can act on it.
pub fn primitive_from_conservative(q: ConservedState, gas: &GasModel) -> Result<PrimitiveState> {
    let a = q.to_array();
    check_finite(&a, "conserved state")?;
    if !(q.rho > 0.0) {
        return Err(Error::NonPhysical { context: "conserved state".into(), rho: q.rho, p: f64::NAN });
    }
    Ok(PrimitiveState::from_array(cons_to_prim(&a, gas.gamma - 1.0)))
}

pub fn conservative_from_primitive(s: PrimitiveState, gas: &GasModel) -> Result<ConservedState> {
    let a = s.to_array();
    check_finite(&a, "primitive state")?;
    Ok(ConservedState::from_array(prim_to_cons(&a, gas.gamma - 1.0)))
}

pub fn sound_speed(s: &PrimitiveState, gas: &GasModel) -> f64 {
    (gas.gamma * s.p / s.rho).sqrt()
}

pub fn temperature(s: &PrimitiveState, gas: &GasModel) -> f64 {
    gas.mach * gas.mach * gas.gamma * s.p / s.rho
}

#[inline]
pub(crate) fn cons_to_prim(q: &[f64; NVAR], gm1: f64) -> [f64; NVAR] {
    let rho = q[RHO];
    let inv = 1.0 / rho;
    let u = q[MX] * inv;
    let v = q[MY] * inv;
    let w = q[MZ] * inv;
    let kinetic = 0.5 * (q[MX] * u + q[MY] * v + q[MZ] * w);
    [rho, u, v, w, gm1 * (q[EN] - kinetic)]
}

#[inline]
pub(crate) fn prim_to_cons(s: &[f64; NVAR], gm1: f64) -> [f64; NVAR] {
    let rho = s[RHO];
    let (u, v, w) = (s[1], s[2], s[3]);
    let kinetic = 0.5 * rho * (u * u + v * v + w * w);
    [rho, rho * u, rho * v, rho * w, s[4] / gm1 + kinetic]
}

/// Uniform Cartesian mesh with ghost layers on every active axis.
///
/// An axis is active when it carries more than one cell. Cell `j`
/// (zero-based) has its centre at `lower + (j + 1/2) * spacing`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n: [usize; 3],
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub spacing: [f64; 3],
    pub ghost: usize,
    pub periodic: [bool; 3],
}

/// Minimum ghost width. The BVD selector needs total-boundary-variation
/// values two cells outside the domain, each built from MP5 stencils.
pub const MIN_GHOST: usize = 3;
pub const DEFAULT_GHOST: usize = 5;

impl Grid {
    pub fn new(n: [usize; 3], lower: [f64; 3], upper: [f64; 3], ghost: usize, periodic: [bool; 3]) -> Result<Self> {
        if ghost < MIN_GHOST {
            return Err(Error::Config(format!("ghost width {ghost} below minimum {MIN_GHOST}")));
        }
        let mut spacing = [1.0; 3];
        for d in 0..3 {
            if n[d] == 0 {
                return Err(Error::Config(format!("axis {d} has zero cells")));
            }
            if !(upper[d] > lower[d]) {
                return Err(Error::Config(format!("axis {d} has empty extent")));
            }
            spacing[d] = (upper[d] - lower[d]) / n[d] as f64;
        }
        Ok(Self { n, lower, upper, spacing, ghost, periodic })
    }

    pub fn line(n: usize, lower: f64, upper: f64, periodic: bool) -> Result<Self> {
        Self::new([n, 1, 1], [lower, 0.0, 0.0], [upper, 1.0, 1.0], DEFAULT_GHOST, [periodic, false, false])
    }

    pub fn rect(n: [usize; 2], lower: [f64; 2], upper: [f64; 2], periodic: [bool; 2]) -> Result<Self> {
        Self::new(
            [n[0], n[1], 1],
            [lower[0], lower[1], 0.0],
            [upper[0], upper[1], 1.0],
            DEFAULT_GHOST,
            [periodic[0], periodic[1], false],
        )
    }

    pub fn cube(n: [usize; 3], lower: [f64; 3], upper: [f64; 3], periodic: [bool; 3]) -> Result<Self> {
        Self::new(n, lower, upper, DEFAULT_GHOST, periodic)
    }

    pub fn is_active(&self, axis: usize) -> bool {
        self.n[axis] > 1
    }

    pub fn active_axes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..3).filter(move |&d| self.is_active(d))
    }

    pub fn dimension(&self) -> usize {
        self.active_axes().count()
    }

    /// Ghost offset along `axis` (zero on inactive axes).
    pub fn offset(&self, axis: usize) -> usize {
        if self.is_active(axis) {
            self.ghost
        } else {
            0
        }
    }

    /// Extended extent (cells plus ghosts) along `axis`.
    pub fn extent(&self, axis: usize) -> usize {
        self.n[axis] + 2 * self.offset(axis)
    }

    pub fn extents(&self) -> [usize; 3] {
        [self.extent(0), self.extent(1), self.extent(2)]
    }

    pub fn len_extended(&self) -> usize {
        self.extent(0) * self.extent(1) * self.extent(2)
    }

    pub fn num_cells(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    /// Centre of interior cell `j` (zero-based) along `axis`.
    pub fn center(&self, axis: usize, j: usize) -> f64 {
        self.lower[axis] + (j as f64 + 0.5) * self.spacing[axis]
    }

    /// Centre of extended index `e` along `axis`; may lie outside the domain.
    pub fn center_extended(&self, axis: usize, e: usize) -> f64 {
        self.lower[axis] + (e as f64 - self.offset(axis) as f64 + 0.5) * self.spacing[axis]
    }

    /// Product of the spacings of the active axes.
    pub fn cell_volume(&self) -> f64 {
        self.active_axes().map(|d| self.spacing[d]).product()
    }

    /// Flat index of extended coordinates.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.extent(1) + j) * self.extent(0) + i
    }

    /// Flat index of interior coordinates (zero-based).
    #[inline]
    pub fn interior_index(&self, i: usize, j: usize, k: usize) -> usize {
        self.index(i + self.offset(0), j + self.offset(1), k + self.offset(2))
    }

    /// Stride between neighbours along `axis` in the flat layout.
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => 1,
            1 => self.extent(0),
            _ => self.extent(0) * self.extent(1),
        }
    }

    /// Iterates interior cells as `(i, j, k)` interior coordinates.
    pub fn interior_cells(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let [nx, ny, nz] = self.n;
        (0..nz).flat_map(move |k| (0..ny).flat_map(move |j| (0..nx).map(move |i| (i, j, k))))
    }

    /// Cell-centre coordinates of interior cell `(i, j, k)`.
    pub fn position(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.center(0, i), self.center(1, j), self.center(2, k)]
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.n == other.n && self.ghost == other.ghost
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Conserved,
    Primitive,
}

/// Cell-centred five-component data over the ghost-extended grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub kind: FieldKind,
    extents: [usize; 3],
    pub data: Vec<[f64; NVAR]>,
}

impl Field {
    pub fn zeros(grid: &Grid, kind: FieldKind) -> Self {
        Self { kind, extents: grid.extents(), data: vec![[0.0; NVAR]; grid.len_extended()] }
    }

    pub fn extents(&self) -> [usize; 3] {
        self.extents
    }

    pub fn matches(&self, grid: &Grid) -> bool {
        self.extents == grid.extents()
    }

    /// Fills interior cells from a primitive initializer evaluated at cell centres.
    pub fn from_primitive_fn(grid: &Grid, gas: &GasModel, init: impl Fn([f64; 3]) -> PrimitiveState) -> Result<Self> {
        let mut field = Self::zeros(grid, FieldKind::Conserved);
        let gm1 = gas.gamma - 1.0;
        for (i, j, k) in grid.interior_cells() {
            let s = init(grid.position(i, j, k));
            if !s.is_physical() {
                return Err(Error::NonPhysical {
                    context: format!("initial condition at cell ({i},{j},{k})"),
                    rho: s.rho,
                    p: s.p,
                });
            }
            field.data[grid.interior_index(i, j, k)] = prim_to_cons(&s.to_array(), gm1);
        }
        Ok(field)
    }

    pub fn interior(&self, grid: &Grid, i: usize, j: usize, k: usize) -> [f64; NVAR] {
        self.data[grid.interior_index(i, j, k)]
    }

    /// Primitive copy of a conserved field (all cells, ghosts included).
    pub fn to_primitive(&self, gas: &GasModel) -> Field {
        debug_assert_eq!(self.kind, FieldKind::Conserved);
        let gm1 = gas.gamma - 1.0;
        Field {
            kind: FieldKind::Primitive,
            extents: self.extents,
            data: self.data.iter().map(|q| cons_to_prim(q, gm1)).collect(),
        }
    }

    pub fn to_conserved(&self, gas: &GasModel) -> Field {
        debug_assert_eq!(self.kind, FieldKind::Primitive);
        let gm1 = gas.gamma - 1.0;
        Field {
            kind: FieldKind::Conserved,
            extents: self.extents,
            data: self.data.iter().map(|s| prim_to_cons(s, gm1)).collect(),
        }
    }

    /// Primitive state of interior cell `(i, j, k)` of a conserved field.
    pub fn primitive_at(&self, grid: &Grid, gas: &GasModel, i: usize, j: usize, k: usize) -> PrimitiveState {
        let q = self.interior(grid, i, j, k);
        match self.kind {
            FieldKind::Conserved => PrimitiveState::from_array(cons_to_prim(&q, gas.gamma - 1.0)),
            FieldKind::Primitive => PrimitiveState::from_array(q),
        }
    }

    /// Makes the interior exactly mirror-symmetric about the mid-plane of
    /// `axis`, copying the lower half onto the upper half with the normal
    /// momentum negated.
    pub fn mirror_symmetrize(&mut self, grid: &Grid, axis: usize) {
        let n = grid.n[axis];
        let [nx, ny, nz] = grid.n;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let c = [i, j, k];
                    if c[axis] >= n / 2 {
                        continue;
                    }
                    let mut m = c;
                    m[axis] = n - 1 - c[axis];
                    let mut q = self.interior(grid, i, j, k);
                    q[1 + axis] = -q[1 + axis];
                    self.data[grid.interior_index(m[0], m[1], m[2])] = q;
                }
            }
        }
    }
}
