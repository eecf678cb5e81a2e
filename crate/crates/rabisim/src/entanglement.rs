//! Reduced density matrices, ground-state von Neumann entanglement, thermal
//! states, and negativity.
//!
//! Entanglement of a pure joint state is the base-2 von Neumann entropy of
//! the qubit's reduced density matrix. For thermal mixtures the measure is
//! twice the negativity of the partial transpose (taken over the qubit
//! index), normalized to lie in [0, 1].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::consts::BOLTZMANN_GHZ_PER_K;
use crate::error::{Error, Result};
use crate::fock::{CMatrix, JointState};
use crate::rabi::RabiParams;
use crate::spectrum::{adaptive_truncation, EigenSystem};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityBasis {
    Joint,
    Qubit,
    Oscillator,
}

/// Hermitian, positive-semidefinite, unit-trace density matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub matrix: CMatrix,
    pub basis: DensityBasis,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, basis: DensityBasis) -> Self {
        Self { matrix, basis }
    }

    /// Projector onto a pure joint state.
    pub fn from_pure(state: &JointState) -> Self {
        let v = state.amplitudes();
        Self {
            matrix: v * v.adjoint(),
            basis: DensityBasis::Joint,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Checks unit trace (1e-10) and spectrum bounded below by -1e-10.
    pub fn validate(&self) -> Result<()> {
        if (self.trace() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParams(format!(
                "density matrix trace {} != 1",
                self.trace()
            )));
        }
        let eig = self.matrix.clone().symmetric_eigen();
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::InvalidParams(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let eig = self.matrix.clone().symmetric_eigen();
        let mut sqrt_v = eig.eigenvectors.clone();
        for (k, lambda) in eig.eigenvalues.iter().enumerate() {
            let s = re(lambda.max(0.0).sqrt());
            sqrt_v.column_mut(k).apply(|z| *z *= s);
        }
        let sqrt_rho = sqrt_v * eig.eigenvectors.adjoint();
        let inner = &sqrt_rho * &other.matrix * &sqrt_rho;
        let inner_eig = inner.symmetric_eigen();
        let tr: f64 = inner_eig
            .eigenvalues
            .iter()
            .map(|l| l.max(0.0).sqrt())
            .sum();
        Ok(tr * tr)
    }
}

/// Qubit reduced density matrix of a pure joint state:
/// rho_q[s, s'] = sum_n psi[s, n] psi*[s', n].
pub fn reduce_to_qubit(state: &JointState) -> DensityMatrix {
    let n_max = state.n_max();
    let mut rho = CMatrix::zeros(2, 2);
    for s in 0..2 {
        for sp in 0..2 {
            let mut acc = Complex64::default();
            for n in 0..n_max {
                acc += state.amplitude(s, n) * state.amplitude(sp, n).conj();
            }
            rho[(s, sp)] = acc;
        }
    }
    DensityMatrix::new(rho, DensityBasis::Qubit)
}

/// Qubit reduced density matrix of a joint density matrix.
pub fn reduce_to_qubit_rho(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let n_max = joint_n_max(rho)?;
    let mut out = CMatrix::zeros(2, 2);
    for s in 0..2 {
        for sp in 0..2 {
            let mut acc = Complex64::default();
            for n in 0..n_max {
                acc += rho.matrix[(s * n_max + n, sp * n_max + n)];
            }
            out[(s, sp)] = acc;
        }
    }
    Ok(DensityMatrix::new(out, DensityBasis::Qubit))
}

/// Oscillator reduced density matrix of a pure joint state.
pub fn reduce_to_oscillator(state: &JointState) -> DensityMatrix {
    let n_max = state.n_max();
    let mut rho = CMatrix::zeros(n_max, n_max);
    for n in 0..n_max {
        for np in 0..n_max {
            let mut acc = Complex64::default();
            for s in 0..2 {
                acc += state.amplitude(s, n) * state.amplitude(s, np).conj();
            }
            rho[(n, np)] = acc;
        }
    }
    DensityMatrix::new(rho, DensityBasis::Oscillator)
}

/// Oscillator reduced density matrix of a joint density matrix.
pub fn reduce_to_oscillator_rho(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let n_max = joint_n_max(rho)?;
    let mut out = CMatrix::zeros(n_max, n_max);
    for n in 0..n_max {
        for np in 0..n_max {
            out[(n, np)] = rho.matrix[(n, np)] + rho.matrix[(n_max + n, n_max + np)];
        }
    }
    Ok(DensityMatrix::new(out, DensityBasis::Oscillator))
}

fn joint_n_max(rho: &DensityMatrix) -> Result<usize> {
    if rho.basis != DensityBasis::Joint || rho.dim() % 2 != 0 {
        return Err(Error::InvalidParams(
            "expected a joint-basis density matrix of even dimension".into(),
        ));
    }
    Ok(rho.dim() / 2)
}

/// Base-2 von Neumann entropy of a density matrix.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let eig = rho.matrix.clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > 1e-15)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Qubit-oscillator entanglement of a pure joint state: the base-2 entropy
/// of the qubit's reduced density matrix.
pub fn vn_entanglement(state: &JointState) -> f64 {
    von_neumann_entropy(&reduce_to_qubit(state))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxOrder {
    /// Binary entropy of (1 +- exp(-2 alpha^2)) / 2, the entanglement of the
    /// displaced-branch superposition.
    ExactFormula,
    /// 1 - exp(-4 alpha^2) / (2 ln 2), its second-order expansion; only
    /// meaningful for alpha >= 0.5.
    SecondOrder,
}

/// Closed-form approximation with a validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxEntanglement {
    pub value: f64,
    pub valid: bool,
}

pub fn vn_entanglement_approx(alpha: f64, order: ApproxOrder) -> ApproxEntanglement {
    let s = (-2.0 * alpha * alpha).exp();
    match order {
        ApproxOrder::ExactFormula => {
            let p = 0.5 * (1.0 + s);
            let q = 0.5 * (1.0 - s);
            let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
            ApproxEntanglement {
                value: h(p) + h(q),
                valid: true,
            }
        }
        ApproxOrder::SecondOrder => ApproxEntanglement {
            value: 1.0 - s * s / (2.0 * std::f64::consts::LN_2),
            valid: alpha >= 0.5,
        },
    }
}

/// Bath temperature; k_B T in GHz is temperature_mk * 1e-3 * 20.836619.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    pub temperature_mk: f64,
}

impl ThermalSpec {
    pub fn new(temperature_mk: f64) -> Result<Self> {
        if !(temperature_mk > 0.0) {
            return Err(Error::InvalidParams(format!(
                "temperature must be positive, got {temperature_mk} mK"
            )));
        }
        Ok(Self { temperature_mk })
    }

    pub fn kb_t_ghz(&self) -> f64 {
        self.temperature_mk * 1e-3 * BOLTZMANN_GHZ_PER_K
    }
}

/// Boltzmann mixture of the computed levels.
///
/// Errors unless the computed levels reach far enough that the smallest
/// included weight is below 1e-12 of the largest.
pub fn thermal_state(es: &EigenSystem, t: &ThermalSpec) -> Result<DensityMatrix> {
    let kbt = t.kb_t_ghz();
    let e0 = es.energies[0];
    let weights: Vec<f64> = es.energies.iter().map(|e| (-(e - e0) / kbt).exp()).collect();
    let min_ratio = weights.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_ratio >= 1e-12 {
        return Err(Error::InsufficientLevels(min_ratio));
    }
    let z: f64 = weights.iter().sum();
    let dim = 2 * es.n_max_used;
    let mut rho = CMatrix::zeros(dim, dim);
    for (w, state) in weights.iter().zip(&es.states) {
        if *w < 1e-18 {
            continue;
        }
        let v = state.amplitudes();
        rho += (v * v.adjoint()) * re(w / z);
    }
    Ok(DensityMatrix::new(rho, DensityBasis::Joint))
}

/// Partial transpose over the qubit index of a joint matrix:
/// rho[(s, n), (s', n')] -> rho[(s', n), (s, n')].
pub fn partial_transpose_qubit(rho: &CMatrix) -> CMatrix {
    let n_max = rho.nrows() / 2;
    let mut out = rho.clone();
    // swap the two off-diagonal qubit blocks
    for n in 0..n_max {
        for np in 0..n_max {
            out[(n, n_max + np)] = rho[(n_max + n, np)];
            out[(n_max + n, np)] = rho[(n, n_max + np)];
        }
    }
    out
}

/// Twice the negativity of the partial transpose over the qubit, in [0, 1]
/// for this bipartition.
pub fn negativity_entanglement(rho: &DensityMatrix) -> Result<f64> {
    if rho.basis != DensityBasis::Joint || rho.dim() % 2 != 0 {
        return Err(Error::InvalidParams(
            "negativity requires a joint-basis density matrix".into(),
        ));
    }
    let pt = partial_transpose_qubit(&rho.matrix);
    let eig = pt.symmetric_eigen();
    Ok(2.0 * eig.eigenvalues.iter().filter(|&&l| l < 0.0).map(|l| -l).sum::<f64>())
}

/// Quick thermal-entanglement estimate
/// (1 - exp(-4 alpha^2)/(2 ln 2)) tanh(delta exp(-2 alpha^2) / (2 k_B T)),
/// the product of the approximate ground-state entanglement and the
/// two-level population contrast.
pub fn thermal_entanglement_estimate(p: &RabiParams, t: &ThermalSpec) -> f64 {
    let alpha = p.alpha();
    if alpha < 0.5 {
        log::warn!("thermal entanglement estimate is unreliable for alpha = {alpha:.3} < 0.5");
    }
    let e_gs = vn_entanglement_approx(alpha, ApproxOrder::SecondOrder).value;
    let omega01 = p.delta * (-2.0 * alpha * alpha).exp();
    e_gs * (omega01 / (2.0 * t.kb_t_ghz())).tanh()
}

/// One row of an entanglement-vs-displacement sweep.
#[derive(Debug, Clone, Copy)]
pub struct EntanglementSweepPoint {
    pub alpha: f64,
    pub e_gs_exact: f64,
    pub e_gs_formula: f64,
    pub e_gs_second_order: f64,
    pub e_te_exact: f64,
    pub e_te_estimate: f64,
}

/// Exact and closed-form entanglement across a displacement sweep at fixed
/// (delta, omega_o), with g = alpha * omega_o.
pub fn entanglement_sweep(
    delta: f64,
    omega_o: f64,
    alphas: &[f64],
    t: &ThermalSpec,
) -> Result<Vec<EntanglementSweepPoint>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let p = RabiParams::new(delta, omega_o, alpha * omega_o)?;
            let es = adaptive_truncation(&p, 24, 1e-9);
            let rho_t = thermal_state(&es, t)?;
            Ok(EntanglementSweepPoint {
                alpha,
                e_gs_exact: vn_entanglement(&es.states[0]),
                e_gs_formula: vn_entanglement_approx(alpha, ApproxOrder::ExactFormula).value,
                e_gs_second_order: vn_entanglement_approx(alpha, ApproxOrder::SecondOrder).value,
                e_te_exact: negativity_entanglement(&rho_t)?,
                e_te_estimate: thermal_entanglement_estimate(&p, t),
            })
        })
        .collect()
}

/// CSV export with columns
/// `alpha,e_gs_exact,e_gs_formula,e_gs_second_order,e_te_exact,e_te_estimate`.
pub fn write_entanglement_csv<P: AsRef<Path>>(
    path: P,
    rows: &[EntanglementSweepPoint],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "alpha,e_gs_exact,e_gs_formula,e_gs_second_order,e_te_exact,e_te_estimate"
    )?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.alpha, r.e_gs_exact, r.e_gs_formula, r.e_gs_second_order, r.e_te_exact, r.e_te_estimate
        )?;
    }
    Ok(())
}
