//! Cell-centre first and second derivatives along grid lines.
//!
//! Derivatives are stored pre-scaled: `U' = dx * dU/dx` and
//! `U'' = dx^2 * d2U/dx2`, so the interface formulas need no mesh factors.
//!
//! The compact schemes solve a tridiagonal system per line. Periodic lines
//! use a cyclic solve over the interior cells and copy the result into the
//! ghost layers. Non-periodic lines are solved over the whole ghost-extended
//! line with third-order one-sided closures at the two ends, so the boundary
//! closures sit inside the ghost layers.

mod tridiagonal;

use std::fmt;
use std::str::FromStr;

pub use tridiagonal::{solve_tridiagonal, LineSystem};
pub(crate) use tridiagonal::{Factor, Thomas};

use crate::error::{Error, Result};
use crate::state::{Field, Grid, NVAR};

/// Derivative scheme used for the implicit (or explicit) gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GradientScheme {
    /// Second-order explicit central differences.
    Eg2,
    /// Optimised fourth-order compact scheme, alpha = 5/14.
    Cd4,
    /// Sixth-order compact scheme, alpha = 1/3.
    Cd6,
}

impl GradientScheme {
    /// Off-diagonal weight of the compact left-hand side.
    pub fn alpha(self) -> f64 {
        match self {
            GradientScheme::Eg2 => 0.0,
            GradientScheme::Cd4 => 5.0 / 14.0,
            GradientScheme::Cd6 => 1.0 / 3.0,
        }
    }

    /// Right-hand side weights `(a, b)` of the tridiagonal family with
    /// `a = 2(alpha + 2)/3` and `b = (4 alpha - 1)/3`.
    pub fn rhs_weights(self) -> (f64, f64) {
        match self {
            GradientScheme::Eg2 => (1.0, 0.0),
            GradientScheme::Cd4 => (11.0 / 7.0, 1.0 / 7.0),
            GradientScheme::Cd6 => (14.0 / 9.0, 1.0 / 9.0),
        }
    }

    pub fn is_compact(self) -> bool {
        !matches!(self, GradientScheme::Eg2)
    }
}

impl fmt::Display for GradientScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradientScheme::Eg2 => "EG2",
            GradientScheme::Cd4 => "CD4",
            GradientScheme::Cd6 => "CD6",
        })
    }
}

impl FromStr for GradientScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EG2" | "EG" => Ok(GradientScheme::Eg2),
            "CD4" => Ok(GradientScheme::Cd4),
            "CD6" => Ok(GradientScheme::Cd6),
            _ => Err(Error::Config(format!("unknown gradient scheme '{s}'"))),
        }
    }
}

const CLOSURE_ALPHA: f64 = 0.25;
const CLOSURE_A_HALF: f64 = 0.75;

/// Factorised compact first-derivative operator for one line length.
#[derive(Debug, Clone)]
pub struct CompactLine {
    len: usize,
    cyclic: bool,
    a_half: f64,
    b_quarter: f64,
    factor: Factor,
}

impl CompactLine {
    pub fn new(scheme: GradientScheme, len: usize, cyclic: bool) -> Result<Self> {
        if !scheme.is_compact() {
            return Err(Error::Config("explicit gradients have no compact operator".into()));
        }
        if len < 5 {
            return Err(Error::LineTooShort { len, min: 5 });
        }
        let system = Self::matrix(scheme, len, cyclic);
        let factor = if cyclic {
            Factor::cyclic(&system.sub, &system.diag, &system.sup, 0)?
        } else {
            Factor::Plain(Thomas::new(&system.sub, &system.diag, &system.sup, 0)?)
        };
        let (a, b) = scheme.rhs_weights();
        Ok(Self { len, cyclic, a_half: 0.5 * a, b_quarter: 0.25 * b, factor })
    }

    /// Left-hand-side matrix (rhs left empty).
    pub fn matrix(scheme: GradientScheme, len: usize, cyclic: bool) -> LineSystem {
        let alpha = scheme.alpha();
        let mut sub = vec![alpha; len];
        let diag = vec![1.0; len];
        let mut sup = vec![alpha; len];
        if !cyclic {
            // third-order one-sided closures, fourth-order Pade one row in
            sub[0] = 0.0;
            sup[0] = 2.0;
            sub[len - 1] = 2.0;
            sup[len - 1] = 0.0;
            sub[1] = CLOSURE_ALPHA;
            sup[1] = CLOSURE_ALPHA;
            sub[len - 2] = CLOSURE_ALPHA;
            sup[len - 2] = CLOSURE_ALPHA;
        }
        LineSystem::new(sub, diag, sup, vec![0.0; len], cyclic)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    /// Right-hand side of the compact relation for samples `f`.
    pub fn rhs(&self, f: &[f64], out: &mut [f64]) {
        let n = self.len;
        let (a2, b4) = (self.a_half, self.b_quarter);
        if self.cyclic {
            for j in 0..n {
                let jp1 = if j + 1 == n { 0 } else { j + 1 };
                let jp2 = (j + 2) % n;
                let jm1 = (j + n - 1) % n;
                let jm2 = (j + n - 2) % n;
                out[j] = b4 * (f[jp2] - f[jm2]) + a2 * (f[jp1] - f[jm1]);
            }
        } else {
            out[0] = closure(f[0], f[1], f[2]);
            out[1] = CLOSURE_A_HALF * (f[2] - f[0]);
            for j in 2..n - 2 {
                out[j] = b4 * (f[j + 2] - f[j - 2]) + a2 * (f[j + 1] - f[j - 1]);
            }
            out[n - 2] = CLOSURE_A_HALF * (f[n - 1] - f[n - 3]);
            out[n - 1] = -closure(f[n - 1], f[n - 2], f[n - 3]);
        }
    }

    /// Scaled derivative of `f` into `out`.
    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        self.rhs(f, out);
        self.factor.solve_in_place(&mut out[..self.len]);
    }

    /// Same as [`apply`](Self::apply) but exactly equivariant under reversal
    /// of the line: the forward solve and the solve of the reversed system
    /// are averaged. `scratch` must hold `len` values.
    pub fn apply_mirror_exact(&self, f: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        let n = self.len;
        self.rhs(f, out);
        for j in 0..n {
            scratch[j] = out[n - 1 - j];
        }
        self.factor.solve_in_place(&mut out[..n]);
        self.factor.solve_in_place(&mut scratch[..n]);
        for j in 0..n {
            out[j] = 0.5 * (out[j] + scratch[n - 1 - j]);
        }
    }
}

#[inline]
fn closure(f0: f64, f1: f64, f2: f64) -> f64 {
    (-2.5 * f0 + 2.0 * f1) + 0.5 * f2
}

/// Derivative evaluation on ghost-extended lines of one axis.
#[derive(Debug, Clone)]
pub struct LineGradients {
    scheme: GradientScheme,
    ext: usize,
    ghost: usize,
    n: usize,
    periodic: bool,
    mirror_exact: bool,
    op: Option<CompactLine>,
}

impl LineGradients {
    /// `ext` is the extended line length, `ghost` the ghost width on each side.
    pub fn new(scheme: GradientScheme, ext: usize, ghost: usize, periodic: bool, mirror_exact: bool) -> Result<Self> {
        let n = ext - 2 * ghost;
        let op = if scheme.is_compact() {
            Some(if periodic { CompactLine::new(scheme, n, true)? } else { CompactLine::new(scheme, ext, false)? })
        } else {
            None
        };
        Ok(Self { scheme, ext, ghost, n, periodic, mirror_exact, op })
    }

    pub fn for_axis(scheme: GradientScheme, grid: &Grid, axis: usize, mirror_exact: bool) -> Result<Self> {
        Self::new(scheme, grid.extent(axis), grid.offset(axis), grid.periodic[axis], mirror_exact)
    }

    pub fn scheme(&self) -> GradientScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.ext
    }

    pub fn is_empty(&self) -> bool {
        self.ext == 0
    }

    fn compact(&self, op: &CompactLine, f: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        let (lo, hi) = if self.periodic { (self.ghost, self.ghost + self.n) } else { (0, self.ext) };
        if self.mirror_exact {
            op.apply_mirror_exact(&f[lo..hi], &mut out[lo..hi], scratch);
        } else {
            op.apply(&f[lo..hi], &mut out[lo..hi]);
        }
        if self.periodic {
            let (g, n) = (self.ghost, self.n);
            for k in 0..g {
                out[g - 1 - k] = out[g + n - 1 - k];
                out[g + n + k] = out[g + k];
            }
        }
    }

    /// Scaled first derivative along the line.
    pub fn first(&self, f: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        match &self.op {
            Some(op) => self.compact(op, f, out, scratch),
            None => explicit_first(f, out),
        }
    }

    /// Scaled first and second derivatives. For compact schemes the second
    /// derivative applies the same operator to the first derivative.
    pub fn first_and_second(&self, f: &[f64], d1: &mut [f64], d2: &mut [f64], scratch: &mut [f64]) {
        match &self.op {
            Some(op) => {
                self.compact(op, f, d1, scratch);
                self.compact(op, d1, d2, scratch);
            }
            None => {
                explicit_first(f, d1);
                explicit_second(f, d2);
            }
        }
    }

    /// Applies the first-derivative operator to already computed first
    /// derivatives, giving the second derivative.
    pub fn second_from_first(&self, d1: &[f64], d2: &mut [f64], scratch: &mut [f64]) {
        match &self.op {
            Some(op) => self.compact(op, d1, d2, scratch),
            None => explicit_first(d1, d2),
        }
    }
}

/// `U'_j = (U_{j+1} - U_{j-1}) / 2` with second-order one-sided end values.
pub fn explicit_first(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    for j in 1..n - 1 {
        out[j] = 0.5 * (f[j + 1] - f[j - 1]);
    }
    out[0] = 0.5 * ((-3.0 * f[0] + 4.0 * f[1]) - f[2]);
    out[n - 1] = -0.5 * ((-3.0 * f[n - 1] + 4.0 * f[n - 2]) - f[n - 3]);
}

/// `U''_j = U_{j+1} - 2 U_j + U_{j-1}`, ends copied from their neighbours.
pub fn explicit_second(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    for j in 1..n - 1 {
        out[j] = (f[j + 1] - 2.0 * f[j]) + f[j - 1];
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];
}

/// Scaled first and second derivatives of every component of a field along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeField {
    pub axis: usize,
    pub scheme: GradientScheme,
    pub first: Vec<[f64; NVAR]>,
    pub second: Vec<[f64; NVAR]>,
}

impl DerivativeField {
    /// Physical first derivative `dU/dx` at a flat index.
    pub fn physical_first(&self, grid: &Grid, idx: usize) -> [f64; NVAR] {
        let h = grid.spacing[self.axis];
        self.first[idx].map(|v| v / h)
    }

    pub fn physical_second(&self, grid: &Grid, idx: usize) -> [f64; NVAR] {
        let h = grid.spacing[self.axis];
        self.second[idx].map(|v| v / (h * h))
    }
}

/// Flat start index of every line along `axis` covering the full extended
/// cross-section.
pub fn line_starts(grid: &Grid, axis: usize) -> Vec<usize> {
    let ext = grid.extents();
    let mut starts = Vec::new();
    for k in 0..ext[2] {
        for j in 0..ext[1] {
            for i in 0..ext[0] {
                let c = [i, j, k];
                if c[axis] == 0 {
                    starts.push(grid.index(i, j, k));
                }
            }
        }
    }
    starts
}

fn map_lines(
    data: &[[f64; NVAR]],
    grid: &Grid,
    axis: usize,
    mut kernel: impl FnMut(&[f64], &mut [f64], &mut [f64], &mut [f64]),
) -> (Vec<[f64; NVAR]>, Vec<[f64; NVAR]>) {
    let len = grid.extent(axis);
    let stride = grid.stride(axis);
    let mut d1 = vec![[0.0; NVAR]; data.len()];
    let mut d2 = vec![[0.0; NVAR]; data.len()];
    let mut line = vec![0.0; len];
    let mut o1 = vec![0.0; len];
    let mut o2 = vec![0.0; len];
    let mut scratch = vec![0.0; len];
    for start in line_starts(grid, axis) {
        for c in 0..NVAR {
            for e in 0..len {
                line[e] = data[start + e * stride][c];
            }
            kernel(&line, &mut o1, &mut o2, &mut scratch);
            for e in 0..len {
                d1[start + e * stride][c] = o1[e];
                d2[start + e * stride][c] = o2[e];
            }
        }
    }
    (d1, d2)
}

fn check_axis(grid: &Grid, field: &Field, axis: usize) -> Result<()> {
    if !field.matches(grid) {
        return Err(Error::GridMismatch("field extents differ from grid".into()));
    }
    if !grid.is_active(axis) {
        return Err(Error::Config(format!("axis {axis} is inactive")));
    }
    Ok(())
}

/// Explicit central-difference derivatives of every component along `axis`.
pub fn explicit_gradients(field: &Field, grid: &Grid, axis: usize) -> Result<DerivativeField> {
    check_axis(grid, field, axis)?;
    let (first, second) = map_lines(&field.data, grid, axis, |f, o1, o2, _| {
        explicit_first(f, o1);
        explicit_second(f, o2);
    });
    Ok(DerivativeField { axis, scheme: GradientScheme::Eg2, first, second })
}

/// Compact (CD4/CD6) scaled first derivative of every component along `axis`.
pub fn compact_first_derivative(
    field: &Field,
    grid: &Grid,
    axis: usize,
    scheme: GradientScheme,
) -> Result<Vec<[f64; NVAR]>> {
    check_axis(grid, field, axis)?;
    if !scheme.is_compact() {
        return Err(Error::Config(format!("{scheme} is not a compact scheme")));
    }
    let lg = LineGradients::for_axis(scheme, grid, axis, false)?;
    Ok(map_lines(&field.data, grid, axis, |f, o1, _, s| lg.first(f, o1, s)).0)
}

/// Second derivative obtained by applying the compact operator to first derivatives.
pub fn compact_second_derivative(
    first: &[[f64; NVAR]],
    grid: &Grid,
    axis: usize,
    scheme: GradientScheme,
) -> Result<Vec<[f64; NVAR]>> {
    if first.len() != grid.len_extended() {
        return Err(Error::GridMismatch("derivative array length differs from grid".into()));
    }
    if !scheme.is_compact() {
        return Err(Error::Config(format!("{scheme} is not a compact scheme")));
    }
    let lg = LineGradients::for_axis(scheme, grid, axis, false)?;
    Ok(map_lines(first, grid, axis, |f, o1, _, s| lg.second_from_first(f, o1, s)).0)
}

/// First and second derivatives with the requested scheme.
pub fn derivatives(field: &Field, grid: &Grid, axis: usize, scheme: GradientScheme) -> Result<DerivativeField> {
    if !scheme.is_compact() {
        return explicit_gradients(field, grid, axis);
    }
    let first = compact_first_derivative(field, grid, axis, scheme)?;
    let second = compact_second_derivative(&first, grid, axis, scheme)?;
    Ok(DerivativeField { axis, scheme, first, second })
}
