//! Eigensystems, transition frequencies and matrix elements, bias sweeps,
//! and the level-2/3 parity crossing.
//!
//! Energy eigenstates are labeled by their order in the energy ladder, index
//! 0 being the ground state. Exact degeneracies (within 1e-12) are broken by
//! the joint-parity eigenvalue, +1 before -1.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{hermiticity_deviation, qubit_identity, CMatrix, FockSpace, JointState};
use crate::rabi::{build_hamiltonian, joint_parity, RabiParams};

/// Matrix elements below this threshold mark a forbidden transition.
pub const FORBIDDEN_THRESHOLD: f64 = 1e-8;

/// Default relative tolerance for truncation convergence.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Ordered low-lying eigensystem of a joint Hamiltonian.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Ascending energies in GHz.
    pub energies: Vec<f64>,
    pub states: Vec<JointState>,
    pub n_max_used: usize,
    pub converged: bool,
    /// Largest relative change of a kept energy in the final truncation
    /// doubling (0 for a direct single-size diagonalization).
    pub convergence_residual: f64,
}

/// Lowest `k_levels` eigenpairs of a Hermitian joint-space matrix.
///
/// The input dimension must be even (2 * n_max).
pub fn diagonalize(h: &CMatrix, k_levels: usize) -> Result<EigenSystem> {
    let dev = hermiticity_deviation(h);
    if dev > 1e-12 {
        return Err(Error::NotHermitian(dev));
    }
    let dim = h.nrows();
    if dim % 2 != 0 || dim < 4 {
        return Err(Error::DimensionMismatch {
            expected: dim + dim % 2,
            found: dim,
        });
    }
    let space = FockSpace::new(dim / 2)?;
    let eig = h.clone().symmetric_eigen();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let k = k_levels.min(dim);
    let mut energies: Vec<f64> = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut states: Vec<JointState> = order[..k]
        .iter()
        .map(|&i| {
            let col = DVector::from_column_slice(eig.eigenvectors.column(i).as_slice());
            JointState::normalized(space, col)
        })
        .collect::<Result<_>>()?;

    // break exact ties by parity eigenvalue, +1 first
    let parity = joint_parity(space);
    let mut idx = 0;
    while idx + 1 < k {
        let scale = energies[idx].abs().max(1.0);
        if (energies[idx + 1] - energies[idx]).abs() <= 1e-12 * scale {
            let p0 = states[idx].expectation(&parity)?.re;
            let p1 = states[idx + 1].expectation(&parity)?.re;
            if p1 > p0 + 0.5 {
                states.swap(idx, idx + 1);
                energies.swap(idx, idx + 1);
            }
        }
        idx += 1;
    }

    Ok(EigenSystem {
        energies,
        states,
        n_max_used: dim / 2,
        converged: true,
        convergence_residual: 0.0,
    })
}

/// Doubles the Fock truncation from 30 until the lowest `k_levels` energies
/// are stable to `rel_tol`, or the budget n_max > 2000 is hit (result then
/// flagged unconverged).
pub fn adaptive_truncation(p: &RabiParams, k_levels: usize, rel_tol: f64) -> EigenSystem {
    let mut n_max = 30usize;
    let mut prev: Option<Vec<f64>> = None;
    loop {
        let space = FockSpace::new(n_max).expect("n_max >= 30");
        let h = build_hamiltonian(p, space);
        let mut es = diagonalize(&h, k_levels).expect("construction is Hermitian");
        if let Some(prev_e) = prev {
            let residual = es
                .energies
                .iter()
                .zip(prev_e.iter())
                .map(|(e, pe)| (e - pe).abs() / e.abs().max(1.0))
                .fold(0.0f64, f64::max);
            es.convergence_residual = residual;
            if residual < rel_tol {
                es.converged = true;
                return es;
            }
            if n_max * 2 > 2000 {
                es.converged = false;
                return es;
            }
        }
        prev = Some(es.energies.clone());
        n_max *= 2;
    }
}

/// One transition |i> -> |j>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionEntry {
    pub i: usize,
    pub j: usize,
    /// E_j - E_i in GHz.
    pub omega_ij: f64,
    /// <i| (a + a†) |j>.
    pub t_ij: num_complex::Complex64,
    pub allowed: bool,
}

#[derive(Debug, Clone)]
pub struct TransitionTable {
    pub entries: Vec<TransitionEntry>,
}

impl TransitionTable {
    pub fn get(&self, i: usize, j: usize) -> Option<&TransitionEntry> {
        self.entries.iter().find(|e| e.i == i && e.j == j)
    }
}

/// Frequencies and matrix elements for the requested level pairs.
pub fn transition_table(
    es: &EigenSystem,
    space: FockSpace,
    pairs: &[(usize, usize)],
) -> Result<TransitionTable> {
    if space.n_max() != es.n_max_used {
        return Err(Error::DimensionMismatch {
            expected: es.n_max_used,
            found: space.n_max(),
        });
    }
    let x = qubit_identity().kronecker(&space.quadrature());
    let mut entries = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        let available = es.energies.len();
        if i >= available || j >= available {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                available,
            });
        }
        let t_ij = es.states[i].matrix_element(&x, &es.states[j])?;
        entries.push(TransitionEntry {
            i,
            j,
            omega_ij: es.energies[j] - es.energies[i],
            t_ij,
            allowed: t_ij.norm() > FORBIDDEN_THRESHOLD,
        });
    }
    Ok(TransitionTable { entries })
}

/// Transition tables across a flux-bias sweep, all computed at one fixed
/// truncation (the largest the adaptive rule picks anywhere on the sweep).
#[derive(Debug, Clone)]
pub struct BiasSweep {
    pub epsilons: Vec<f64>,
    pub tables: Vec<TransitionTable>,
    pub params: RabiParams,
    pub n_max_used: usize,
}

pub fn bias_sweep(
    template: &RabiParams,
    epsilons: &[f64],
    pairs: &[(usize, usize)],
) -> Result<BiasSweep> {
    if epsilons.is_empty() {
        return Err(Error::InvalidParams("empty epsilon grid".into()));
    }
    if pairs.is_empty() {
        return Err(Error::InvalidParams("no transition pairs requested".into()));
    }
    let k_levels = pairs.iter().map(|&(i, j)| i.max(j)).max().unwrap() + 1;

    let adaptive: Vec<EigenSystem> = epsilons
        .par_iter()
        .map(|&eps| adaptive_truncation(&template.with_epsilon(eps), k_levels, DEFAULT_REL_TOL))
        .collect();
    let n_max = adaptive.iter().map(|es| es.n_max_used).max().unwrap();
    let space = FockSpace::new(n_max)?;

    let tables: Vec<TransitionTable> = epsilons
        .par_iter()
        .zip(adaptive.into_par_iter())
        .map(|(&eps, es)| {
            let es = if es.n_max_used == n_max {
                es
            } else {
                let h = build_hamiltonian(&template.with_epsilon(eps), space);
                diagonalize(&h, k_levels)?
            };
            transition_table(&es, space, pairs)
        })
        .collect::<Result<_>>()?;

    Ok(BiasSweep {
        epsilons: epsilons.to_vec(),
        tables,
        params: *template,
        n_max_used: n_max,
    })
}

/// Joint-parity expectation <psi| sigma_x (x) (-1)^(a†a) |psi>.
pub fn parity_expectation(state: &JointState, space: FockSpace) -> Result<f64> {
    Ok(state.expectation(&joint_parity(space))?.re)
}

/// Coupling strength at which eigenstates 2 and 3 exchange physical
/// character at epsilon = 0, located by bisection on the parity label of
/// state 2.
pub fn find_level_crossing(p: &RabiParams, g_range: (f64, f64)) -> Result<f64> {
    if p.epsilon != 0.0 {
        return Err(Error::InvalidParams(
            "level crossing search requires epsilon = 0".into(),
        ));
    }
    let (mut lo, mut hi) = g_range;
    if !(hi > lo) || lo < 0.0 {
        return Err(Error::InvalidParams(format!(
            "invalid g range ({lo}, {hi})"
        )));
    }
    // fixed truncation from the most demanding end of the range
    let n_max = adaptive_truncation(
        &RabiParams::new(p.delta, p.omega_o, hi)?,
        4,
        DEFAULT_REL_TOL,
    )
    .n_max_used;
    let space = FockSpace::new(n_max)?;
    let parity2 = |g: f64| -> Result<f64> {
        let pg = RabiParams::new(p.delta, p.omega_o, g)?;
        let es = diagonalize(&build_hamiltonian(&pg, space), 3)?;
        parity_expectation(&es.states[2], space)
    };

    let p_lo = parity2(lo)?;
    let p_hi = parity2(hi)?;
    if p_lo.signum() == p_hi.signum() {
        return Err(Error::NoCrossingInRange(lo, hi));
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if parity2(mid)?.signum() == p_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Writes a bias sweep as CSV with columns
/// `epsilon_ghz,i,j,omega_ij_ghz,re_tij,im_tij,allowed`.
pub fn write_sweep_csv<P: AsRef<Path>>(path: P, sweep: &BiasSweep) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "epsilon_ghz,i,j,omega_ij_ghz,re_tij,im_tij,allowed")?;
    for (eps, table) in sweep.epsilons.iter().zip(&sweep.tables) {
        for e in &table.entries {
            writeln!(
                w,
                "{:.16e},{},{},{:.16e},{:.16e},{:.16e},{}",
                eps, e.i, e.j, e.omega_ij, e.t_ij.re, e.t_ij.im, e.allowed
            )?;
        }
    }
    Ok(())
}
