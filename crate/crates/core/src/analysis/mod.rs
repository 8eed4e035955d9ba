//! Error norms, convergence orders and flow diagnostics.

pub mod fourier;
pub mod riemann;

use crate::error::{Error, Result};
use crate::gradients::{derivatives, GradientScheme};
use crate::state::{cons_to_prim, Field, FieldKind, GasModel, Grid, RHO};

pub use fourier::{operator_eg, operator_ig4, operator_ig6, operator_numeric, FourierScheme};
pub use riemann::{exact_riemann, RiemannExact};

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub n: usize,
    pub error: f64,
    pub order: Option<f64>,
}

/// Interior densities in storage order.
pub fn interior_density(q: &Field, grid: &Grid) -> Result<Vec<f64>> {
    if !q.matches(grid) {
        return Err(Error::GridMismatch("field extents differ from grid".into()));
    }
    Ok(grid.interior_cells().map(|(i, j, k)| q.interior(grid, i, j, k)[RHO]).collect())
}

/// RMS density error against a function of the cell centre.
pub fn l2_error(q: &Field, grid: &Grid, exact: impl Fn([f64; 3]) -> f64) -> Result<f64> {
    let rho = interior_density(q, grid)?;
    let sum: f64 =
        grid.interior_cells().zip(&rho).map(|((i, j, k), r)| (r - exact(grid.position(i, j, k))).powi(2)).sum();
    Ok((sum / rho.len() as f64).sqrt())
}

/// RMS density difference of two fields on the same grid.
pub fn l2_distance(a: &Field, b: &Field, grid: &Grid) -> Result<f64> {
    l2_values(&interior_density(a, grid)?, &interior_density(b, grid)?)
}

/// RMS difference of two equally long value lists.
pub fn l2_values(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::GridMismatch(format!("{} values against {}", a.len(), b.len())));
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    Ok((sum / a.len() as f64).sqrt())
}

/// Density L1 distance `sum |err| * cell volume` against a function of the cell centre.
pub fn l1_error(q: &Field, grid: &Grid, exact: impl Fn([f64; 3]) -> f64) -> Result<f64> {
    let rho = interior_density(q, grid)?;
    let sum: f64 =
        grid.interior_cells().zip(&rho).map(|((i, j, k), r)| (r - exact(grid.position(i, j, k))).abs()).sum();
    Ok(sum * grid.cell_volume())
}

/// Orders `log2(e_coarse / e_fine)` scaled by the actual refinement ratio.
pub fn observed_order(errors: &[(usize, f64)]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(Error::Config("at least two grids are needed".into()));
    }
    if errors.iter().any(|&(n, e)| e <= 0.0 || !e.is_finite() || n == 0) {
        return Err(Error::ZeroError);
    }
    Ok(errors.windows(2).map(|w| (w[0].1 / w[1].1).ln() / (w[1].0 as f64 / w[0].0 as f64).ln()).collect())
}

/// Builds a convergence table from `(N, error)` pairs.
pub fn error_table(errors: &[(usize, f64)]) -> Result<Vec<ErrorReport>> {
    let orders = observed_order(errors)?;
    Ok(errors
        .iter()
        .enumerate()
        .map(|(i, &(n, error))| ErrorReport { n, error, order: if i == 0 { None } else { Some(orders[i - 1]) } })
        .collect())
}

/// Overlap weights mapping `nf` fine cells onto `nc` coarse cells of the same interval.
fn overlap_weights(nf: usize, nc: usize) -> Vec<Vec<(usize, f64)>> {
    let r = nf as f64 / nc as f64;
    (0..nc)
        .map(|c| {
            let a = c as f64 * r;
            let b = (c + 1) as f64 * r;
            let mut w = Vec::new();
            let mut f = a.floor() as usize;
            while (f as f64) < b && f < nf {
                let lo = a.max(f as f64);
                let hi = b.min((f + 1) as f64);
                if hi > lo {
                    w.push((f, (hi - lo) / r));
                }
                f += 1;
            }
            w
        })
        .collect()
}

/// Conservative average of interior values from a fine grid onto a coarser one
/// covering the same domain.
pub fn project_values(fine: &[f64], fine_grid: &Grid, coarse: &Grid) -> Result<Vec<f64>> {
    for a in 0..3 {
        if fine_grid.lower[a] != coarse.lower[a]
            || fine_grid.upper[a] != coarse.upper[a]
            || fine_grid.is_active(a) != coarse.is_active(a)
        {
            return Err(Error::GridMismatch("projection needs identical domains".into()));
        }
    }
    if fine.len() != fine_grid.num_cells() {
        return Err(Error::GridMismatch("value count differs from fine grid".into()));
    }
    let mut n = fine_grid.n;
    let mut data = fine.to_vec();
    for axis in 0..3 {
        let nc = coarse.n[axis];
        if n[axis] == nc {
            continue;
        }
        let w = overlap_weights(n[axis], nc);
        let mut m = n;
        m[axis] = nc;
        let mut out = vec![0.0; m[0] * m[1] * m[2]];
        for k in 0..m[2] {
            for j in 0..m[1] {
                for i in 0..m[0] {
                    let c = [i, j, k];
                    let mut s = 0.0;
                    for &(f, wt) in &w[c[axis]] {
                        let mut src = c;
                        src[axis] = f;
                        s += wt * data[(src[2] * n[1] + src[1]) * n[0] + src[0]];
                    }
                    out[(k * m[1] + j) * m[0] + i] = s;
                }
            }
        }
        n = m;
        data = out;
    }
    Ok(data)
}

/// `sum 1/2 rho |u|^2 * cell volume` over the interior of a conserved field.
pub fn kinetic_energy(q: &Field, grid: &Grid) -> f64 {
    debug_assert_eq!(q.kind, FieldKind::Conserved);
    let sum: f64 = grid
        .interior_cells()
        .map(|(i, j, k)| {
            let c = q.interior(grid, i, j, k);
            0.5 * (c[1] * c[1] + c[2] * c[2] + c[3] * c[3]) / c[0]
        })
        .sum();
    sum * grid.cell_volume()
}

/// Cell-centre vorticity vectors over the interior, from velocity gradients of
/// the given scheme. Ghost cells of `q` must be filled.
pub fn vorticity(q: &Field, grid: &Grid, gas: &GasModel, scheme: GradientScheme) -> Result<Vec<[f64; 3]>> {
    let prim = match q.kind {
        FieldKind::Conserved => q.to_primitive(gas),
        FieldKind::Primitive => q.clone(),
    };
    let mut grad = [[0.0f64; 3]; 3];
    let mut per_axis = Vec::new();
    for axis in 0..3 {
        per_axis.push(if grid.is_active(axis) { Some(derivatives(&prim, grid, axis, scheme)?) } else { None });
    }
    Ok(grid
        .interior_cells()
        .map(|(i, j, k)| {
            let idx = grid.interior_index(i, j, k);
            for (axis, d) in per_axis.iter().enumerate() {
                for c in 0..3 {
                    grad[c][axis] = d.as_ref().map_or(0.0, |d| d.physical_first(grid, idx)[1 + c]);
                }
            }
            [grad[2][1] - grad[1][2], grad[0][2] - grad[2][0], grad[1][0] - grad[0][1]]
        })
        .collect())
}

/// `sum |curl u| * cell volume` with velocity gradients of the given scheme.
pub fn enstrophy(q: &Field, grid: &Grid, gas: &GasModel, scheme: GradientScheme) -> Result<f64> {
    let w = vorticity(q, grid, gas, scheme)?;
    let sum: f64 = w.iter().map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()).sum();
    Ok(sum * grid.cell_volume())
}

/// Smallest interior density and pressure.
pub fn min_density_pressure(q: &Field, grid: &Grid, gas: &GasModel) -> (f64, f64) {
    let gm1 = gas.gamma - 1.0;
    grid.interior_cells().fold((f64::INFINITY, f64::INFINITY), |(r, p), (i, j, k)| {
        let s = match q.kind {
            FieldKind::Conserved => cons_to_prim(&q.interior(grid, i, j, k), gm1),
            FieldKind::Primitive => q.interior(grid, i, j, k),
        };
        (r.min(s[0]), p.min(s[4]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{fill_ghosts, BoundarySet};
    use crate::state::PrimitiveState;
    use std::f64::consts::PI;

    #[test]
    fn l2_of_exact_field_is_zero_and_offset_is_recovered() {
        let grid = Grid::line(50, 0.0, 1.0, true).unwrap();
        let gas = GasModel::inviscid(1.4);
        let q = Field::from_primitive_fn(&grid, &gas, |x| PrimitiveState::new_1d(1.0 + x[0], 0.0, 1.0)).unwrap();
        assert_eq!(l2_error(&q, &grid, |x| 1.0 + x[0]).unwrap(), 0.0);
        let e = l2_error(&q, &grid, |x| 1.0 + x[0] + 1e-3).unwrap();
        assert!((e - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn order_from_exact_ratios() {
        let o = observed_order(&[(10, 1e-2), (20, 1.25e-3)]).unwrap();
        assert!((o[0] - 3.0).abs() < 1e-14);
        let o = observed_order(&[(20, 4.65e-4), (40, 4.37e-5)]).unwrap();
        assert!((o[0] - 3.41).abs() < 5e-3);
        let o = observed_order(&[(50, 1.64e-4), (100, 4.10e-5)]).unwrap();
        assert!((o[0] - 2.00).abs() < 5e-3);
        assert!(matches!(observed_order(&[(10, 0.0), (20, 1.0)]), Err(Error::ZeroError)));
    }

    #[test]
    fn projection_preserves_averages() {
        let fine = Grid::line(1600, -5.0, 5.0, false).unwrap();
        let vals: Vec<f64> = (0..1600).map(|j| fine.center(0, j)).collect();
        let nested = Grid::line(400, -5.0, 5.0, false).unwrap();
        let p = project_values(&vals, &fine, &nested).unwrap();
        for (j, v) in p.iter().enumerate() {
            assert!((v - nested.center(0, j)).abs() < 1e-12);
        }
        let coarse = Grid::line(300, -5.0, 5.0, false).unwrap();
        let ones = project_values(&vec![1.0; 1600], &fine, &coarse).unwrap();
        let worst = ones.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
        let mean_f: f64 = vals.iter().map(|v| v * v).sum::<f64>() / 1600.0;
        let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
        let mean_c: f64 = project_values(&sq, &fine, &coarse).unwrap().iter().sum::<f64>() / 300.0;
        assert!((mean_f - mean_c).abs() < 1e-12);
    }

    #[test]
    fn projection_in_two_dimensions() {
        let fine = Grid::rect([8, 6], [0.0, 0.0], [1.0, 1.0], [false; 2]).unwrap();
        let coarse = Grid::rect([4, 3], [0.0, 0.0], [1.0, 1.0], [false; 2]).unwrap();
        let vals: Vec<f64> = fine
            .interior_cells()
            .map(|(i, j, k)| {
                let x = fine.position(i, j, k);
                2.0 * x[0] - x[1]
            })
            .collect();
        let p = project_values(&vals, &fine, &coarse).unwrap();
        for ((i, j, k), v) in coarse.interior_cells().zip(&p) {
            let x = coarse.position(i, j, k);
            assert!((v - (2.0 * x[0] - x[1])).abs() < 1e-13);
        }
    }

    #[test]
    fn kinetic_energy_scales_quadratically() {
        let grid = Grid::rect([8, 8], [0.0, 0.0], [1.0, 1.0], [true; 2]).unwrap();
        let gas = GasModel::inviscid(1.4);
        let rest = Field::from_primitive_fn(&grid, &gas, |_| PrimitiveState::new_2d(1.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(kinetic_energy(&rest, &grid), 0.0);
        let f = |s: f64| {
            Field::from_primitive_fn(&grid, &gas, move |x| PrimitiveState::new_2d(1.0 + x[0], s * x[1], -s, 1.0))
                .unwrap()
        };
        let (a, b) = (kinetic_energy(&f(1.0), &grid), kinetic_energy(&f(2.0), &grid));
        assert!((b - 4.0 * a).abs() < 1e-13 * b);
    }

    #[test]
    fn tgv_kinetic_energy_matches_integral() {
        let n = 16;
        let l = 2.0 * PI;
        let grid = Grid::cube([n; 3], [0.0; 3], [l; 3], [true; 3]).unwrap();
        let gas = GasModel::inviscid(5.0 / 3.0);
        let q = Field::from_primitive_fn(&grid, &gas, |x| {
            PrimitiveState::new(
                1.0,
                x[0].sin() * x[1].cos() * x[2].cos(),
                -x[0].cos() * x[1].sin() * x[2].cos(),
                0.0,
                100.0,
            )
        })
        .unwrap();
        let ke = kinetic_energy(&q, &grid);
        assert!((ke - l.powi(3) / 8.0).abs() < 1e-10, "{ke}");
    }

    #[test]
    fn solid_body_rotation_has_uniform_vorticity() {
        let grid = Grid::rect([16, 16], [-1.0, -1.0], [1.0, 1.0], [false; 2]).unwrap();
        let gas = GasModel::inviscid(1.4);
        let init = |x: [f64; 3]| PrimitiveState::new_2d(1.0, -x[1], x[0], 10.0);
        let mut q = Field::from_primitive_fn(&grid, &gas, init).unwrap();
        let bcs = BoundarySet::uniform(crate::solver::BoundaryCondition::TimeDependent {
            tag: "rotation".into(),
            profile: std::sync::Arc::new(move |x, _| init(x)),
        });
        fill_ghosts(&mut q, &grid, &gas, &bcs, 0.0).unwrap();
        for scheme in [GradientScheme::Eg2, GradientScheme::Cd4, GradientScheme::Cd6] {
            let z = enstrophy(&q, &grid, &gas, scheme).unwrap();
            assert!((z - 8.0).abs() < 1e-11, "{scheme}: {z}");
        }
        let uniform = Field::from_primitive_fn(&grid, &gas, |_| PrimitiveState::new_2d(1.0, 0.3, 0.2, 1.0)).unwrap();
        let mut u = uniform;
        fill_ghosts(&mut u, &grid, &gas, &BoundarySet::uniform(crate::solver::BoundaryCondition::ZeroGradient), 0.0)
            .unwrap();
        assert!(enstrophy(&u, &grid, &gas, GradientScheme::Cd6).unwrap().abs() < 1e-13);
    }

    #[test]
    fn tgv_enstrophy_converges() {
        let l = 2.0 * PI;
        let gas = GasModel::inviscid(5.0 / 3.0);
        // |curl u| at t=0 integrated by a fine midpoint rule
        let exact = {
            let m = 96;
            let h = l / m as f64;
            let mut s = 0.0;
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        let (x, y, z) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h, (k as f64 + 0.5) * h);
                        let wx = -x.cos() * y.sin() * z.sin();
                        let wy = -x.sin() * y.cos() * z.sin();
                        let wz = 2.0 * x.sin() * y.sin() * z.cos();
                        s += (wx * wx + wy * wy + wz * wz).sqrt();
                    }
                }
            }
            s * h * h * h
        };
        let mut errs = Vec::new();
        for n in [12, 24] {
            let grid = Grid::cube([n; 3], [0.0; 3], [l; 3], [true; 3]).unwrap();
            let mut q = Field::from_primitive_fn(&grid, &gas, |x| {
                PrimitiveState::new(
                    1.0,
                    x[0].sin() * x[1].cos() * x[2].cos(),
                    -x[0].cos() * x[1].sin() * x[2].cos(),
                    0.0,
                    100.0,
                )
            })
            .unwrap();
            fill_ghosts(&mut q, &grid, &gas, &BoundarySet::periodic(), 0.0).unwrap();
            errs.push((enstrophy(&q, &grid, &gas, GradientScheme::Cd4).unwrap() - exact).abs());
        }
        assert!(errs[1] < errs[0], "{errs:?}");
    }
}
