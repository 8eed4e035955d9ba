//! Interface states along grid lines.
//!
//! Lines are ghost-extended arrays of primitive 5-vectors. Interface `i` of a
//! line lies between extended cells `i` and `i + 1`; `left[i]` is the state
//! reconstructed from cell `i`, `right[i]` the one from cell `i + 1`.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::flux::{from_normal_frame, roe_arrays, to_normal_frame};
use crate::gradients::{GradientScheme, LineGradients};
use crate::state::{Field, FieldKind, Grid, NVAR};

pub type Vec5 = [f64; NVAR];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReconScheme {
    FirstOrder,
    Muscl3,
    Mp5,
    Ig4,
    Ig6,
    Ig4Mp,
    Ig6Mp,
}

impl ReconScheme {
    pub const ALL: [ReconScheme; 7] = [
        ReconScheme::FirstOrder,
        ReconScheme::Muscl3,
        ReconScheme::Mp5,
        ReconScheme::Ig4,
        ReconScheme::Ig6,
        ReconScheme::Ig4Mp,
        ReconScheme::Ig6Mp,
    ];

    /// Compact scheme supplying the implicit gradients, if any.
    pub fn gradient_scheme(self) -> Option<GradientScheme> {
        match self {
            ReconScheme::Ig4 | ReconScheme::Ig4Mp => Some(GradientScheme::Cd4),
            ReconScheme::Ig6 | ReconScheme::Ig6Mp => Some(GradientScheme::Cd6),
            _ => None,
        }
    }

    pub fn uses_bvd(self) -> bool {
        matches!(self, ReconScheme::Ig4Mp | ReconScheme::Ig6Mp)
    }

    pub fn name(self) -> &'static str {
        match self {
            ReconScheme::FirstOrder => "FO",
            ReconScheme::Muscl3 => "MUSCL3",
            ReconScheme::Mp5 => "MP5",
            ReconScheme::Ig4 => "IG4",
            ReconScheme::Ig6 => "IG6",
            ReconScheme::Ig4Mp => "IG4MP",
            ReconScheme::Ig6Mp => "IG6MP",
        }
    }
}

impl fmt::Display for ReconScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReconScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        let scheme = match up.as_str() {
            "FO" | "FIRSTORDER" | "FIRST_ORDER" => ReconScheme::FirstOrder,
            "MUSCL3" | "EG" | "EG2" => ReconScheme::Muscl3,
            "MP5" => ReconScheme::Mp5,
            "IG4" => ReconScheme::Ig4,
            "IG6" => ReconScheme::Ig6,
            "IG4MP" => ReconScheme::Ig4Mp,
            "IG6MP" => ReconScheme::Ig6Mp,
            _ => return Err(Error::Config(format!("unknown scheme '{s}'"))),
        };
        Ok(scheme)
    }
}

/// Variables the MP5 limiter acts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mp5Variables {
    Primitive,
    /// Roe-averaged characteristic variables of the split Euler Jacobian.
    Characteristic {
        gamma: f64,
        axis: usize,
    },
}

/// Left/right states on every interface of one ghost-extended line.
#[derive(Debug, Clone, PartialEq)]
pub struct LineStates {
    pub left: Vec<Vec5>,
    pub right: Vec<Vec5>,
}

impl LineStates {
    pub fn new(len: usize) -> Self {
        Self { left: vec![[0.0; NVAR]; len], right: vec![[0.0; NVAR]; len] }
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }
}

#[inline]
fn sgn(a: f64) -> f64 {
    if a > 0.0 {
        1.0
    } else if a < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    0.5 * (sgn(a) + sgn(b)) * a.abs().min(b.abs())
}

/// Four-argument minmod: smallest magnitude when all signs agree, else zero.
#[inline]
pub fn minmod4(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let s = sgn(a);
    if s != 0.0 && sgn(b) == s && sgn(c) == s && sgn(d) == s {
        s * a.abs().min(b.abs()).min(c.abs()).min(d.abs())
    } else {
        0.0
    }
}

/// Unlimited fifth-order value at the right face of the centre cell.
#[inline]
pub fn mp5_linear(um2: f64, um1: f64, u0: f64, up1: f64, up2: f64) -> f64 {
    u0 + (((2.0 * (um2 - u0) - 13.0 * (um1 - u0)) + 27.0 * (up1 - u0)) - 3.0 * (up2 - u0)) / 60.0
}

/// MP5 value at the right face of the centre cell of a five-point stencil.
#[inline]
pub fn mp5_face(um2: f64, um1: f64, u0: f64, up1: f64, up2: f64) -> f64 {
    let lin = mp5_linear(um2, um1, u0, up1, up2);
    let ump = u0 + minmod(up1 - u0, 7.0 * (u0 - um1));
    if (lin - u0) * (lin - ump) <= 1e-20 {
        return lin;
    }
    let djm1 = (um2 - 2.0 * um1) + u0;
    let dj = (um1 - 2.0 * u0) + up1;
    let djp1 = (u0 - 2.0 * up1) + up2;
    let dm_plus = minmod4(4.0 * dj - djp1, 4.0 * djp1 - dj, dj, djp1);
    let dm_minus = minmod4(4.0 * djm1 - dj, 4.0 * dj - djm1, djm1, dj);
    let umd = 0.5 * (u0 + up1) - 0.5 * dm_plus;
    let uul = u0 + 4.0 * (u0 - um1);
    let ulc = 0.5 * (3.0 * u0 - um1) + 4.0 / 3.0 * dm_minus;
    let umin = u0.min(up1).min(umd).max(u0.min(uul).min(ulc));
    let umax = u0.max(up1).max(umd).min(u0.max(uul).max(ulc));
    lin + minmod(umin - lin, umax - lin)
}

/// Interfaces whose full MP5 stencils fit inside a line of `len` cells.
pub fn mp5_range(len: usize) -> Range<usize> {
    2..len.saturating_sub(3)
}

/// Piecewise-constant states.
pub fn first_order_states(u: &[Vec5], range: Range<usize>, out: &mut LineStates) {
    for i in range {
        out.left[i] = u[i];
        out.right[i] = u[i + 1];
    }
}

/// Third-order explicit-gradient states with weights (-1, 5, 2)/6.
pub fn muscl3_states(u: &[Vec5], range: Range<usize>, out: &mut LineStates) {
    for i in range {
        for c in 0..NVAR {
            let (a, b, d, e) = (u[i - 1][c], u[i][c], u[i + 1][c], u[i + 2][c]);
            out.left[i][c] = b + (-(a - b) + 2.0 * (d - b)) / 6.0;
            out.right[i][c] = d + (-(e - d) + 2.0 * (b - d)) / 6.0;
        }
    }
}

/// Implicit-gradient states from scaled first and second derivatives.
pub fn ig_states(u: &[Vec5], d1: &[Vec5], d2: &[Vec5], range: Range<usize>, out: &mut LineStates) {
    for i in range {
        for c in 0..NVAR {
            out.left[i][c] = (u[i][c] + 0.5 * d1[i][c]) + d2[i][c] / 12.0;
            out.right[i][c] = (u[i + 1][c] - 0.5 * d1[i + 1][c]) + d2[i + 1][c] / 12.0;
        }
    }
}

#[inline]
fn mp5_pair(u: &[f64; 6]) -> (f64, f64) {
    (mp5_face(u[0], u[1], u[2], u[3], u[4]), mp5_face(u[5], u[4], u[3], u[2], u[1]))
}

/// Left rows of the primitive eigenvector matrix in the normal frame.
#[inline]
fn char_project(w: &Vec5, rho: f64, c: f64) -> Vec5 {
    let a = rho / (2.0 * c);
    let b = 1.0 / (2.0 * c * c);
    [-a * w[1] + b * w[4], w[0] - w[4] / (c * c), w[2], w[3], a * w[1] + b * w[4]]
}

#[inline]
fn char_restore(v: &Vec5, rho: f64, c: f64) -> Vec5 {
    let s = c / rho;
    [(v[0] + v[1]) + v[4], s * (v[4] - v[0]), v[2], v[3], c * c * (v[0] + v[4])]
}

/// MP5 states at one interface.
pub fn mp5_interface(u: &[Vec5], i: usize, vars: Mp5Variables) -> (Vec5, Vec5) {
    let mut l = [0.0; NVAR];
    let mut r = [0.0; NVAR];
    match vars {
        Mp5Variables::Primitive => {
            for c in 0..NVAR {
                let s = [u[i - 2][c], u[i - 1][c], u[i][c], u[i + 1][c], u[i + 2][c], u[i + 3][c]];
                (l[c], r[c]) = mp5_pair(&s);
            }
        }
        Mp5Variables::Characteristic { gamma, axis } => {
            let roe = roe_arrays(&u[i], &u[i + 1], gamma);
            let (rho, cs) = (roe.density, roe.sound_speed);
            let mut w = [[0.0; NVAR]; 6];
            for (k, wk) in w.iter_mut().enumerate() {
                *wk = char_project(&to_normal_frame(&u[i - 2 + k], axis), rho, cs);
            }
            let mut wl = [0.0; NVAR];
            let mut wr = [0.0; NVAR];
            for c in 0..NVAR {
                let s = [w[0][c], w[1][c], w[2][c], w[3][c], w[4][c], w[5][c]];
                (wl[c], wr[c]) = mp5_pair(&s);
            }
            l = from_normal_frame(&char_restore(&wl, rho, cs), axis);
            r = from_normal_frame(&char_restore(&wr, rho, cs), axis);
        }
    }
    (l, r)
}

pub fn mp5_states(u: &[Vec5], range: Range<usize>, vars: Mp5Variables, out: &mut LineStates) {
    for i in range {
        let (l, r) = mp5_interface(u, i, vars);
        out.left[i] = l;
        out.right[i] = r;
    }
}

/// Total boundary variation of cell `j`, per component.
#[inline]
pub fn tbv(states: &LineStates, j: usize) -> Vec5 {
    let mut t = [0.0; NVAR];
    for (c, tc) in t.iter_mut().enumerate() {
        *tc = (states.left[j - 1][c] - states.right[j - 1][c]).abs() + (states.left[j][c] - states.right[j][c]).abs();
    }
    t
}

/// Boundary-variation-diminishing selection.
///
/// Candidates must be valid on `candidates`; cells whose two faces both lie
/// in that range are tested. A cell where MP5 has strictly smaller TBV than
/// IG marks its four nearest interfaces; marked interfaces inside `target`
/// take both MP5 states, component by component. Returns the number of
/// (interface, component) pairs switched.
pub fn bvd_select(
    ig: &LineStates,
    mp: &LineStates,
    candidates: Range<usize>,
    target: Range<usize>,
    out: &mut LineStates,
) -> usize {
    let mut mask = vec![[false; NVAR]; ig.len()];
    for j in candidates.start + 1..candidates.end {
        let t_ig = tbv(ig, j);
        let t_mp = tbv(mp, j);
        for c in 0..NVAR {
            if t_mp[c] < t_ig[c] {
                for i in j.saturating_sub(2)..=j + 1 {
                    if i < mask.len() {
                        mask[i][c] = true;
                    }
                }
            }
        }
    }
    let mut switched = 0;
    for i in target {
        for c in 0..NVAR {
            if mask[i][c] {
                out.left[i][c] = mp.left[i][c];
                out.right[i][c] = mp.right[i][c];
                switched += 1;
            } else {
                out.left[i][c] = ig.left[i][c];
                out.right[i][c] = ig.right[i][c];
            }
        }
    }
    switched
}

#[inline]
pub fn is_physical(s: &Vec5) -> bool {
    s[0] > 0.0 && s[4] > 0.0 && s.iter().all(|x| x.is_finite())
}

/// Fallback counters of one reconstruction pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FallbackCount {
    /// One-sided states checked.
    pub evaluations: u64,
    pub to_mp5: u64,
    pub to_first_order: u64,
}

impl FallbackCount {
    pub fn total(&self) -> u64 {
        self.to_mp5 + self.to_first_order
    }

    /// Share of checked states that were replaced.
    pub fn fraction(&self) -> f64 {
        if self.evaluations == 0 {
            0.0
        } else {
            self.total() as f64 / self.evaluations as f64
        }
    }

    pub fn add(&mut self, other: &FallbackCount) {
        self.evaluations += other.evaluations;
        self.to_mp5 += other.to_mp5;
        self.to_first_order += other.to_first_order;
    }
}

/// Replaces non-physical one-sided states, first by MP5 and then by the
/// piecewise-constant state. A non-physical cell value is fatal.
pub fn positivity_fallback(
    u: &[Vec5],
    states: &mut LineStates,
    range: Range<usize>,
    mp5: &mut dyn FnMut(usize) -> (Vec5, Vec5),
    count: &mut FallbackCount,
) -> Result<()> {
    for i in range {
        count.evaluations += 2;
        let left_ok = is_physical(&states.left[i]);
        let right_ok = is_physical(&states.right[i]);
        if left_ok && right_ok {
            continue;
        }
        let (ml, mr) = mp5(i);
        for (ok, slot, cand, fo) in
            [(left_ok, &mut states.left[i], ml, u[i]), (right_ok, &mut states.right[i], mr, u[i + 1])]
        {
            if ok {
                continue;
            }
            if is_physical(&cand) {
                *slot = cand;
                count.to_mp5 += 1;
            } else if is_physical(&fo) {
                *slot = fo;
                count.to_first_order += 1;
            } else {
                return Err(Error::NonPhysical {
                    context: format!("cell value next to interface {i}"),
                    rho: fo[0],
                    p: fo[4],
                });
            }
        }
    }
    Ok(())
}

/// Options shared by every line of a reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconOptions {
    pub scheme: ReconScheme,
    pub characteristic: bool,
    /// Average forward and reversed compact solves so mirrored data gives
    /// exactly mirrored states.
    pub mirror_exact: bool,
    pub gamma: f64,
}

impl ReconOptions {
    pub fn new(scheme: ReconScheme, gamma: f64) -> Self {
        Self { scheme, characteristic: false, mirror_exact: false, gamma }
    }
}

/// Reusable per-line reconstruction workspace for one axis.
#[derive(Debug, Clone)]
pub struct LineReconstructor {
    opts: ReconOptions,
    axis: usize,
    len: usize,
    ghost: usize,
    grads: Option<LineGradients>,
    comp: Vec<f64>,
    o1: Vec<f64>,
    o2: Vec<f64>,
    scratch: Vec<f64>,
    pub d1: Vec<Vec5>,
    pub d2: Vec<Vec5>,
    ig: LineStates,
    mp: LineStates,
    pub states: LineStates,
    pub count: FallbackCount,
    pub switched: u64,
}

impl LineReconstructor {
    pub fn new(opts: ReconOptions, grid: &Grid, axis: usize) -> Result<Self> {
        let len = grid.extent(axis);
        let ghost = grid.offset(axis);
        if ghost < 3 {
            return Err(Error::Config(format!("axis {axis} needs at least 3 ghost layers")));
        }
        let grads = match opts.scheme.gradient_scheme() {
            Some(g) => Some(LineGradients::for_axis(g, grid, axis, opts.mirror_exact)?),
            None => None,
        };
        Ok(Self {
            opts,
            axis,
            len,
            ghost,
            grads,
            comp: vec![0.0; len],
            o1: vec![0.0; len],
            o2: vec![0.0; len],
            scratch: vec![0.0; len],
            d1: vec![[0.0; NVAR]; len],
            d2: vec![[0.0; NVAR]; len],
            ig: LineStates::new(len),
            mp: LineStates::new(len),
            states: LineStates::new(len),
            count: FallbackCount::default(),
            switched: 0,
        })
    }

    pub fn options(&self) -> &ReconOptions {
        &self.opts
    }

    fn mp5_vars(&self) -> Mp5Variables {
        if self.opts.characteristic {
            Mp5Variables::Characteristic { gamma: self.opts.gamma, axis: self.axis }
        } else {
            Mp5Variables::Primitive
        }
    }

    /// Interfaces bounding the interior cells.
    pub fn domain_interfaces(&self) -> Range<usize> {
        self.ghost - 1..self.len - self.ghost
    }

    fn compute_gradients(&mut self, u: &[Vec5]) {
        let g = self.grads.as_ref().expect("compact scheme");
        for c in 0..NVAR {
            for (e, v) in self.comp.iter_mut().enumerate() {
                *v = u[e][c];
            }
            g.first_and_second(&self.comp, &mut self.o1, &mut self.o2, &mut self.scratch);
            for e in 0..self.len {
                self.d1[e][c] = self.o1[e];
                self.d2[e][c] = self.o2[e];
            }
        }
    }

    /// Reconstructs the domain interfaces of `u` into `self.states`.
    pub fn reconstruct(&mut self, u: &[Vec5]) -> Result<()> {
        debug_assert_eq!(u.len(), self.len);
        let target = self.domain_interfaces();
        let vars = self.mp5_vars();
        match self.opts.scheme {
            ReconScheme::FirstOrder => first_order_states(u, target.clone(), &mut self.states),
            ReconScheme::Muscl3 => muscl3_states(u, target.clone(), &mut self.states),
            ReconScheme::Mp5 => mp5_states(u, target.clone(), vars, &mut self.states),
            ReconScheme::Ig4 | ReconScheme::Ig6 => {
                self.compute_gradients(u);
                ig_states(u, &self.d1, &self.d2, target.clone(), &mut self.states);
            }
            ReconScheme::Ig4Mp | ReconScheme::Ig6Mp => {
                self.compute_gradients(u);
                let full = mp5_range(self.len);
                let cand = full.start.max(target.start.saturating_sub(2))..full.end.min(target.end + 2);
                ig_states(u, &self.d1, &self.d2, cand.clone(), &mut self.ig);
                mp5_states(u, cand.clone(), vars, &mut self.mp);
                self.switched += bvd_select(&self.ig, &self.mp, cand, target.clone(), &mut self.states) as u64;
            }
        }
        let mp = &self.mp;
        let reuse = self.opts.scheme.uses_bvd();
        let mut lookup = |i: usize| {
            if reuse {
                (mp.left[i], mp.right[i])
            } else {
                mp5_interface(u, i, vars)
            }
        };
        positivity_fallback(u, &mut self.states, target, &mut lookup, &mut self.count)
    }
}

/// Interface states of every interior line along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceStates {
    pub axis: usize,
    /// Interfaces per line (`n + 1`).
    pub per_line: usize,
    /// Interior flat index of the first cell of each line, in line order.
    pub line_cells: Vec<usize>,
    pub left: Vec<Vec5>,
    pub right: Vec<Vec5>,
    pub count: FallbackCount,
}

impl InterfaceStates {
    /// States at interface `k` (0..=n) of line `line`.
    pub fn at(&self, line: usize, k: usize) -> (Vec5, Vec5) {
        let idx = line * self.per_line + k;
        (self.left[idx], self.right[idx])
    }
}

/// Extended flat indices of the first ghost cell of every interior line along `axis`.
pub fn interior_line_starts(grid: &Grid, axis: usize) -> Vec<usize> {
    let mut lo = [grid.offset(0), grid.offset(1), grid.offset(2)];
    let mut n = grid.n;
    lo[axis] = 0;
    n[axis] = 1;
    let mut starts = Vec::with_capacity(n[0] * n[1] * n[2]);
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                starts.push(grid.index(lo[0] + i, lo[1] + j, lo[2] + k));
            }
        }
    }
    starts
}

/// Reconstructs a primitive field with filled ghosts along `axis`.
pub fn reconstruct_axis(field: &Field, grid: &Grid, axis: usize, opts: ReconOptions) -> Result<InterfaceStates> {
    if field.kind != FieldKind::Primitive {
        return Err(Error::Config("reconstruction expects a primitive field".into()));
    }
    if !field.matches(grid) {
        return Err(Error::GridMismatch("field extents differ from grid".into()));
    }
    let mut rec = LineReconstructor::new(opts, grid, axis)?;
    let stride = grid.stride(axis);
    let len = grid.extent(axis);
    let starts = interior_line_starts(grid, axis);
    let per_line = grid.n[axis] + 1;
    let mut out = InterfaceStates {
        axis,
        per_line,
        line_cells: Vec::with_capacity(starts.len()),
        left: Vec::with_capacity(starts.len() * per_line),
        right: Vec::with_capacity(starts.len() * per_line),
        count: FallbackCount::default(),
    };
    let mut line = vec![[0.0; NVAR]; len];
    for &s in &starts {
        for (e, v) in line.iter_mut().enumerate() {
            *v = field.data[s + e * stride];
        }
        rec.reconstruct(&line)?;
        let range = rec.domain_interfaces();
        out.left.extend_from_slice(&rec.states.left[range.clone()]);
        out.right.extend_from_slice(&rec.states.right[range]);
        out.line_cells.push(s + grid.offset(axis) * stride);
    }
    out.count = rec.count;
    Ok(out)
}
