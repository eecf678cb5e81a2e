//! Wigner quasi-probability functions of oscillator density matrices.
//!
//! Production evaluation uses the displaced-parity identity
//! W(beta) = (2/pi) Tr[rho D(2 beta) P] with closed-form Fock matrix
//! elements of the displacement operator. An independent characteristic-
//! function quadrature is kept as a slow cross-check for tests.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::entanglement::{DensityBasis, DensityMatrix};
use crate::error::{Error, Result};
use crate::fock::{CMatrix, FockSpace};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Uniform square grid in the oscillator phase plane.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Half-width of the square grid, centered on the origin.
    pub half_width: f64,
    /// Number of points per axis.
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        // covers displacements up to ~1.4 plus the vacuum width
        Self {
            half_width: 4.0,
            points: 101,
        }
    }
}

/// Wigner function sampled on a uniform grid; `values[(i, j)]` is
/// W(re_alpha[i] + i im_alpha[j]).
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub re_alpha: Vec<f64>,
    pub im_alpha: Vec<f64>,
    pub values: DMatrix<f64>,
    pub cell_area: f64,
}

impl WignerGrid {
    /// Riemann integral of W over the grid; 1 for well-contained states.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }
}

/// Fock-basis matrix elements of D(gamma), built row by row from the
/// raising recurrence; every entry is bounded by 1, so the recurrence is
/// overflow-free at any truncation.
pub(crate) fn displacement_elements(n: usize, gamma: Complex64) -> CMatrix {
    let mut d = CMatrix::zeros(n, n);
    d[(0, 0)] = re((-gamma.norm_sqr() / 2.0).exp());
    for k in 1..n {
        d[(0, k)] = d[(0, k - 1)] * (-gamma.conj()) / re((k as f64).sqrt());
    }
    for m in 0..n - 1 {
        let root_m1 = re(((m + 1) as f64).sqrt());
        for k in 0..n {
            let lower = if k > 0 {
                re((k as f64).sqrt()) * d[(m, k - 1)]
            } else {
                Complex64::default()
            };
            d[(m + 1, k)] = (lower + gamma * d[(m, k)]) / root_m1;
        }
    }
    d
}

/// W(beta) for an oscillator density matrix via the displaced-parity sum.
pub fn wigner_point(rho: &CMatrix, beta: Complex64) -> f64 {
    let n = rho.nrows();
    let d2 = displacement_elements(n, beta * re(2.0));
    let mut acc = Complex64::default();
    for m in 0..n {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        for k in 0..n {
            acc += rho[(m, k)] * d2[(k, m)] * re(sign);
        }
    }
    2.0 / std::f64::consts::PI * acc.re
}

/// Wigner function of an oscillator density matrix on a uniform grid.
///
/// Errors if more than 1% of the |W| mass sits on the boundary ring, which
/// signals a grid too small for the state.
pub fn wigner(rho: &DensityMatrix, spec: &GridSpec) -> Result<WignerGrid> {
    if rho.basis != DensityBasis::Oscillator {
        return Err(Error::InvalidParams(
            "wigner expects an oscillator-basis density matrix".into(),
        ));
    }
    if (rho.trace() - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParams(format!(
            "density matrix trace {} != 1",
            rho.trace()
        )));
    }
    if spec.points < 3 {
        return Err(Error::InvalidParams("grid needs at least 3 points".into()));
    }
    let n_pts = spec.points;
    let step = 2.0 * spec.half_width / (n_pts - 1) as f64;
    let axis: Vec<f64> = (0..n_pts)
        .map(|k| -spec.half_width + step * k as f64)
        .collect();

    let rows: Vec<Vec<f64>> = axis
        .par_iter()
        .map(|&x| {
            axis.iter()
                .map(|&y| wigner_point(&rho.matrix, Complex64::new(x, y)))
                .collect()
        })
        .collect();
    let values = DMatrix::from_fn(n_pts, n_pts, |i, j| rows[i][j]);

    let cell_area = step * step;
    let mut boundary_mass = 0.0;
    for i in 0..n_pts {
        for j in 0..n_pts {
            if i == 0 || j == 0 || i == n_pts - 1 || j == n_pts - 1 {
                boundary_mass += values[(i, j)].abs() * cell_area;
            }
        }
    }
    if boundary_mass > 0.01 {
        return Err(Error::GridTooSmall(boundary_mass));
    }

    Ok(WignerGrid {
        re_alpha: axis.clone(),
        im_alpha: axis,
        values,
        cell_area,
    })
}

/// Slow reference evaluation of W(beta) by direct 2-D quadrature of the
/// characteristic-function integral
/// (1/pi^2) Int exp(eta* beta - eta beta*) Tr[rho D(eta)] d^2 eta,
/// with D(eta) built by generator exponentiation. Intended for tests.
pub fn wigner_oracle(rho: &DensityMatrix, beta: Complex64) -> Result<f64> {
    if rho.basis != DensityBasis::Oscillator {
        return Err(Error::InvalidParams(
            "wigner_oracle expects an oscillator-basis density matrix".into(),
        ));
    }
    let coarse = characteristic_quadrature(rho, beta, 101, 192)?;
    let fine = characteristic_quadrature(rho, beta, 151, 256)?;
    let delta = (fine - coarse).abs();
    if delta > 1e-4 {
        return Err(Error::QuadratureNonConvergence(delta));
    }
    Ok(fine)
}

/// Evaluates the characteristic-function integral in polar coordinates
/// eta = r exp(i theta). One generator exponentiation per radius suffices
/// because D(r e^{i theta}) = e^{i theta N} D(r) e^{-i theta N} exactly,
/// which turns the trace into a Fourier series in theta.
fn characteristic_quadrature(
    rho: &DensityMatrix,
    beta: Complex64,
    n_radial: usize,
    n_angular: usize,
) -> Result<f64> {
    use std::f64::consts::PI;
    let r_max = 5.0f64;
    // pad the workspace so the exponentiated generator stays faithful over
    // the whole eta domain
    let n = rho.dim().max((1.8 * r_max * r_max).ceil() as usize);
    let space = FockSpace::new(n)?;
    let mut padded = CMatrix::zeros(n, n);
    padded
        .view_mut((0, 0), (rho.dim(), rho.dim()))
        .copy_from(&rho.matrix);

    let dr = r_max / (n_radial - 1) as f64;
    let dtheta = 2.0 * PI / n_angular as f64;

    let sum: f64 = (0..n_radial)
        .into_par_iter()
        .map(|ri| {
            let r = ri as f64 * dr;
            let d_r = space.displacement(re(r));
            // band sums c_d = sum_{k - m = d} rho_{mk} D(r)_{km}
            let mut bands = vec![Complex64::default(); 2 * n - 1];
            for m in 0..n {
                for k in 0..n {
                    bands[(n - 1 + k) - m] += padded[(m, k)] * d_r[(k, m)];
                }
            }
            let mut acc = 0.0;
            for ti in 0..n_angular {
                let theta = ti as f64 * dtheta;
                // exp(eta* beta - eta beta*) = exp(2 i r Im(beta e^{-i theta}))
                let phase_arg = 2.0 * r * (beta.im * theta.cos() - beta.re * theta.sin());
                let phase = Complex64::new(0.0, phase_arg).exp();
                let mut chi = Complex64::default();
                for (d_idx, c) in bands.iter().enumerate() {
                    if c.norm_sqr() > 0.0 {
                        let d = d_idx as isize - (n as isize - 1);
                        chi += c * Complex64::new(0.0, theta * d as f64).exp();
                    }
                }
                acc += (phase * chi).re;
            }
            // trapezoid in r (periodic theta needs no end correction)
            let w = if ri == 0 || ri == n_radial - 1 { 0.5 } else { 1.0 };
            acc * r * w
        })
        .sum();

    Ok(sum * dr * dtheta / (PI * PI))
}

/// CSV export with columns `re_alpha,im_alpha,w`, row-major over the grid.
pub fn write_wigner_csv<P: AsRef<Path>>(path: P, grid: &WignerGrid) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "re_alpha,im_alpha,w")?;
    for (i, &x) in grid.re_alpha.iter().enumerate() {
        for (j, &y) in grid.im_alpha.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", x, y, grid.values[(i, j)])?;
        }
    }
    Ok(())
}

/// Quadratically refined maximum of W near a grid peak along the real axis.
pub fn refine_peak_re(grid: &WignerGrid, i: usize, j: usize) -> f64 {
    if i == 0 || i + 1 >= grid.re_alpha.len() {
        return grid.re_alpha[i];
    }
    let (ym, y0, yp) = (
        grid.values[(i - 1, j)],
        grid.values[(i, j)],
        grid.values[(i + 1, j)],
    );
    let denom = ym - 2.0 * y0 + yp;
    if denom.abs() < 1e-30 {
        return grid.re_alpha[i];
    }
    let step = grid.re_alpha[1] - grid.re_alpha[0];
    grid.re_alpha[i] + 0.5 * step * (ym - yp) / denom
}
