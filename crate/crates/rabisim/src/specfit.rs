//! Transmission-spectroscopy data model: synthetic |S21| generation,
//! Lorentzian dip extraction, and a global least-squares fit of
//! (delta, omega_o, g) to the extracted dip frequencies.
//!
//! |S21| columns are normalized to unit maximum per flux bias. Dips are
//! modeled as 1 - d (gamma/2)^2 / ((omega - omega0)^2 + (gamma/2)^2) on a
//! unit baseline, with depth proportional to the initial-level population
//! times |T_ij|^2.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::ThermalSpec;
use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::rabi::{build_hamiltonian, RabiParams};
use crate::spectrum::{adaptive_truncation, diagonalize, transition_table};

/// Maximum dip depth used when synthesizing data.
const DEPTH_SCALE: f64 = 0.8;

/// Transitions used by default when assigning dips.
pub const DEFAULT_TRANSITIONS: [(usize, usize); 4] = [(0, 1), (0, 2), (1, 3), (2, 4)];

#[derive(Debug, Clone, Default)]
pub struct DatasetMeta {
    pub circuit: String,
    pub n_phi_q: f64,
}

/// A rectangular grid of normalized |S21| values; rows index probe
/// frequency, columns index flux bias.
#[derive(Debug, Clone)]
pub struct SpectroscopyDataset {
    pub epsilons: Vec<f64>,
    pub probe_freqs: Vec<f64>,
    pub s21_mag: DMatrix<f64>,
    pub meta: DatasetMeta,
}

/// One fitted absorption dip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dip {
    pub center: f64,
    pub fwhm: f64,
    pub depth: f64,
}

/// Extracted dips per flux bias.
#[derive(Debug, Clone)]
pub struct DipSet {
    pub epsilons: Vec<f64>,
    pub dips: Vec<Vec<Dip>>,
}

impl DipSet {
    pub fn total_dips(&self) -> usize {
        self.dips.iter().map(Vec::len).sum()
    }
}

/// Dip assigned to a transition during fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub eps_index: usize,
    pub dip_index: usize,
    pub transition: (usize, usize),
}

/// Result of the global parameter fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: RabiParams,
    pub residual_rms: f64,
    pub assignments: Vec<Assignment>,
    /// Finite-difference variance of (delta, omega_o, g).
    pub covariance_diag: [f64; 3],
}

/// Synthetic dataset: unit baseline minus one Lorentzian per thermally
/// occupied allowed transition, plus Gaussian noise, each bias column
/// normalized to unit maximum. Deterministic for a fixed seed.
pub fn synthesize_dataset(
    template: &RabiParams,
    t: &ThermalSpec,
    epsilons: &[f64],
    probe_freqs: &[f64],
    linewidth: f64,
    noise_sigma: f64,
    rng_seed: u64,
) -> Result<SpectroscopyDataset> {
    if !(linewidth > 0.0) {
        return Err(Error::InvalidParams("linewidth must be positive".into()));
    }
    if epsilons.is_empty() || probe_freqs.len() < 2 {
        return Err(Error::InvalidParams(
            "need at least one bias and two probe frequencies".into(),
        ));
    }
    let k_levels = 14;
    let max_eps = epsilons.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let n_max = adaptive_truncation(&template.with_epsilon(max_eps), k_levels, 1e-8)
        .n_max_used
        .max(adaptive_truncation(template, k_levels, 1e-8).n_max_used);
    let space = FockSpace::new(n_max)?;
    let kbt = t.kb_t_ghz();
    let probe_lo = probe_freqs.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let probe_hi = probe_freqs.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));

    // all transitions among the lowest levels, weighted by initial-level
    // population and |T_ij|^2
    let pairs: Vec<(usize, usize)> = (0..7)
        .flat_map(|i| (i + 1..7).map(move |j| (i, j)))
        .collect();
    let per_eps: Vec<Vec<(f64, f64)>> = epsilons
        .par_iter()
        .map(|&eps| {
            let h = build_hamiltonian(&template.with_epsilon(eps), space);
            let es = diagonalize(&h, k_levels)?;
            let z: f64 = es
                .energies
                .iter()
                .map(|e| (-(e - es.energies[0]) / kbt).exp())
                .sum();
            let table = transition_table(&es, space, &pairs)?;
            let mut dips = Vec::new();
            for e in &table.entries {
                let pop = (-(es.energies[e.i] - es.energies[0]) / kbt).exp() / z;
                let strength = pop * e.t_ij.norm_sqr();
                let visible = e.omega_ij > probe_lo - 3.0 * linewidth
                    && e.omega_ij < probe_hi + 3.0 * linewidth;
                if e.allowed && visible && strength > 1e-8 {
                    dips.push((e.omega_ij, strength));
                }
            }
            Ok(dips)
        })
        .collect::<Result<_>>()?;

    let w_max = per_eps
        .iter()
        .flatten()
        .map(|&(_, w)| w)
        .fold(0.0f64, f64::max);

    let mut s21 = DMatrix::from_element(probe_freqs.len(), epsilons.len(), 1.0);
    if w_max > 0.0 {
        for (col, dips) in per_eps.iter().enumerate() {
            for &(omega0, w) in dips {
                let depth = DEPTH_SCALE * w / w_max;
                let hw2 = (linewidth / 2.0) * (linewidth / 2.0);
                for (row, &omega) in probe_freqs.iter().enumerate() {
                    s21[(row, col)] -= depth * hw2 / ((omega - omega0).powi(2) + hw2);
                }
            }
        }
    }

    if noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        for col in 0..epsilons.len() {
            for row in 0..probe_freqs.len() {
                let n: f64 = StandardNormal.sample(&mut rng);
                s21[(row, col)] += noise_sigma * n;
            }
        }
    }

    for mut col in s21.column_iter_mut() {
        let max = col.iter().fold(f64::MIN, |m, &v| m.max(v));
        if max > 0.0 {
            col /= max;
        }
    }
    s21.apply(|v| *v = v.max(0.0));

    Ok(SpectroscopyDataset {
        epsilons: epsilons.to_vec(),
        probe_freqs: probe_freqs.to_vec(),
        s21_mag: s21,
        meta: DatasetMeta {
            circuit: "synthetic".into(),
            n_phi_q: f64::NAN,
        },
    })
}

/// Levenberg-Marquardt over a residual vector with a forward-difference
/// Jacobian.
pub(crate) struct LmOutcome {
    pub x: Vec<f64>,
    pub cost: f64,
    pub converged: bool,
}

pub(crate) fn levenberg_marquardt<F>(
    mut residuals: F,
    x0: &[f64],
    max_iters: usize,
    step_tol: f64,
) -> LmOutcome
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let p = x0.len();
    let mut x = x0.to_vec();
    let mut r = residuals(&x);
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut lambda = 1e-3;

    for _ in 0..max_iters {
        let m = r.len();
        let mut jac = DMatrix::zeros(m, p);
        for k in 0..p {
            let h = 1e-6 * x[k].abs().max(1e-4);
            let mut xf = x.clone();
            xf[k] += h;
            let rf = residuals(&xf);
            for i in 0..m {
                jac[(i, k)] = (rf[i] - r[i]) / h;
            }
        }
        let rvec = DMatrix::from_column_slice(m, 1, &r);
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * rvec;

        let mut accepted = false;
        let mut step_norm = 0.0;
        for _ in 0..24 {
            let mut a = jtj.clone();
            for k in 0..p {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let delta = match a.lu().solve(&(-&jtr)) {
                Some(d) => d,
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let x_new: Vec<f64> = (0..p).map(|k| x[k] + delta[(k, 0)]).collect();
            let r_new = residuals(&x_new);
            let cost_new: f64 = r_new.iter().map(|v| v * v).sum();
            if cost_new < cost {
                step_norm = delta.norm();
                x = x_new;
                r = r_new;
                cost = cost_new;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !accepted {
            // no damping level improves the cost: we are at a minimum
            // within floating-point resolution
            return LmOutcome {
                x,
                cost,
                converged: true,
            };
        }
        let x_scale: f64 = 1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if step_norm < step_tol * x_scale {
            return LmOutcome {
                x,
                cost,
                converged: true,
            };
        }
    }
    LmOutcome {
        x,
        cost,
        converged: false,
    }
}

fn lorentzian(omega: f64, center: f64, fwhm: f64, depth: f64) -> f64 {
    let hw2 = (fwhm / 2.0) * (fwhm / 2.0);
    1.0 - depth * hw2 / ((omega - center).powi(2) + hw2)
}

/// Per-bias local-minimum candidates refined by a Lorentzian least-squares
/// fit on a local window. Dips whose refinement fails are dropped.
pub fn extract_dips(ds: &SpectroscopyDataset, max_dips: usize, prominence: f64) -> DipSet {
    let grid_step = if ds.probe_freqs.len() > 1 {
        ds.probe_freqs[1] - ds.probe_freqs[0]
    } else {
        0.0
    };

    let dips: Vec<Vec<Dip>> = (0..ds.epsilons.len())
        .into_par_iter()
        .map(|col| {
            let column: Vec<f64> = ds.s21_mag.column(col).iter().cloned().collect();
            extract_column_dips(&ds.probe_freqs, &column, max_dips, prominence, grid_step)
        })
        .collect();

    DipSet {
        epsilons: ds.epsilons.clone(),
        dips,
    }
}

fn extract_column_dips(
    probe: &[f64],
    column: &[f64],
    max_dips: usize,
    prominence: f64,
    grid_step: f64,
) -> Vec<Dip> {
    let n = column.len();
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    for i in 1..n - 1 {
        let depth = 1.0 - column[i];
        if column[i] < column[i - 1] && column[i] <= column[i + 1] && depth >= prominence {
            candidates.push((i, depth));
        }
    }
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
    candidates.truncate(max_dips);
    candidates.sort_by_key(|&(i, _)| i);
    let centers: Vec<usize> = candidates.iter().map(|&(i, _)| i).collect();

    let mut out = Vec::new();
    for (k, &(i0, depth0)) in candidates.iter().enumerate() {
        // half-depth width scan for the initial linewidth
        let half = 1.0 - depth0 / 2.0;
        let mut left = i0;
        while left > 0 && column[left] < half {
            left -= 1;
        }
        let mut right = i0;
        while right + 1 < n && column[right] < half {
            right += 1;
        }
        let fwhm0 = ((right - left).max(1) as f64) * grid_step;

        // window: out to 4 widths, but never past the midpoint to a
        // neighboring candidate
        let reach = ((4.0 * fwhm0 / grid_step).ceil() as usize).max(5);
        let mut lo = i0.saturating_sub(reach);
        let mut hi = (i0 + reach).min(n - 1);
        if k > 0 {
            lo = lo.max((centers[k - 1] + i0) / 2 + 1);
        }
        if k + 1 < centers.len() {
            hi = hi.min((centers[k + 1] + i0) / 2 - 1);
        }
        if hi - lo + 1 < 5 {
            continue;
        }
        let win_x = &probe[lo..=hi];
        let win_y = &column[lo..=hi];
        let outcome = levenberg_marquardt(
            |x| {
                win_x
                    .iter()
                    .zip(win_y.iter())
                    .map(|(&w, &y)| lorentzian(w, x[0], x[1], x[2]) - y)
                    .collect()
            },
            &[probe[i0], fwhm0, depth0],
            60,
            1e-10,
        );
        let center = outcome.x[0];
        let fwhm = outcome.x[1].abs();
        let depth = outcome.x[2];
        if !outcome.converged && outcome.cost > 1e-4 * win_x.len() as f64 {
            log::debug!("dropping dip near {:.4} GHz: refinement did not converge", probe[i0]);
            continue;
        }
        if center < win_x[0] || center > win_x[win_x.len() - 1] || depth <= 0.0 {
            log::debug!("dropping dip near {:.4} GHz: unphysical refinement", probe[i0]);
            continue;
        }
        out.push(Dip {
            center,
            fwhm,
            depth,
        });
    }
    out.sort_by(|a, b| a.center.total_cmp(&b.center));
    out
}

/// Transition frequencies for the candidate parameters at each bias,
/// aligned with `transitions`.
fn model_frequencies(
    params: &RabiParams,
    epsilons: &[f64],
    transitions: &[(usize, usize)],
    space: FockSpace,
) -> Result<Vec<Vec<f64>>> {
    let k_levels = transitions.iter().map(|&(i, j)| i.max(j)).max().unwrap() + 1;
    epsilons
        .par_iter()
        .map(|&eps| {
            let h = build_hamiltonian(&params.with_epsilon(eps), space);
            let es = diagonalize(&h, k_levels)?;
            Ok(transitions
                .iter()
                .map(|&(i, j)| es.energies[j] - es.energies[i])
                .collect())
        })
        .collect()
}

fn clamp_params(x: &[f64]) -> RabiParams {
    RabiParams {
        delta: x[0].max(1e-4),
        omega_o: x[1].max(1e-4),
        g: x[2].max(0.0),
        epsilon: 0.0,
    }
}

/// Greedy nearest-frequency assignment with a rejection radius of five
/// linewidths.
fn assign(
    dips: &DipSet,
    freqs: &[Vec<f64>],
    transitions: &[(usize, usize)],
) -> Vec<Assignment> {
    let mut out = Vec::new();
    for (eps_index, dip_list) in dips.dips.iter().enumerate() {
        for (dip_index, dip) in dip_list.iter().enumerate() {
            let mut best: Option<(usize, f64)> = None;
            for (t_idx, &f) in freqs[eps_index].iter().enumerate() {
                let d = (dip.center - f).abs();
                if best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((t_idx, d));
                }
            }
            if let Some((t_idx, d)) = best {
                if d <= 5.0 * dip.fwhm.max(1e-6) {
                    out.push(Assignment {
                        eps_index,
                        dip_index,
                        transition: transitions[t_idx],
                    });
                }
            }
        }
    }
    out
}

/// Global least-squares fit of (delta, omega_o, g) to assigned dip
/// frequencies: an outer Levenberg-Marquardt loop over the parameters with
/// the dip-to-transition assignment re-derived between rounds.
pub fn fit_parameters(
    dips: &DipSet,
    initial: &RabiParams,
    transitions: &[(usize, usize)],
) -> Result<FitResult> {
    if dips.total_dips() < 3 {
        return Err(Error::NotIdentifiable(format!(
            "need at least 3 dips, have {}",
            dips.total_dips()
        )));
    }
    let max_eps = dips.epsilons.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let k_levels = transitions.iter().map(|&(i, j)| i.max(j)).max().unwrap() + 1;
    let n_max = adaptive_truncation(&initial.with_epsilon(max_eps), k_levels, 1e-8).n_max_used;
    let space = FockSpace::new(n_max)?;

    let freqs0 = model_frequencies(initial, &dips.epsilons, transitions, space)?;
    let mut assignments = assign(dips, &freqs0, transitions);
    {
        let mut seen = std::collections::BTreeSet::new();
        for a in &assignments {
            seen.insert(a.transition);
        }
        if assignments.len() < 3 || seen.len() < 2 {
            return Err(Error::NotIdentifiable(format!(
                "{} assigned dips across {} transitions (need >= 3 across >= 2)",
                assignments.len(),
                seen.len()
            )));
        }
    }

    let mut x = vec![initial.delta, initial.omega_o, initial.g];
    let mut last = LmOutcome {
        x: x.clone(),
        cost: f64::INFINITY,
        converged: false,
    };
    for _round in 0..6 {
        let fixed = assignments.clone();
        let outcome = levenberg_marquardt(
            |xs| {
                let params = clamp_params(xs);
                let freqs = model_frequencies(&params, &dips.epsilons, transitions, space)
                    .expect("Hermitian by construction");
                fixed
                    .iter()
                    .map(|a| {
                        let t_idx = transitions
                            .iter()
                            .position(|&t| t == a.transition)
                            .expect("assignment uses a known transition");
                        dips.dips[a.eps_index][a.dip_index].center - freqs[a.eps_index][t_idx]
                    })
                    .collect()
            },
            &x,
            80,
            1e-9,
        );
        x = outcome.x.clone();
        last = outcome;
        let params = clamp_params(&x);
        let freqs = model_frequencies(&params, &dips.epsilons, transitions, space)?;
        let new_assignments = assign(dips, &freqs, transitions);
        if new_assignments == assignments {
            break;
        }
        assignments = new_assignments;
    }
    if !last.converged {
        return Err(Error::NoConvergence(
            "parameter fit exhausted its iteration budget".into(),
        ));
    }

    let params = clamp_params(&x);
    let m = assignments.len();
    let residual_rms = (last.cost / m as f64).sqrt();

    // finite-difference covariance diagonal at the optimum
    let freqs_at = |xs: &[f64]| -> Vec<f64> {
        let p = clamp_params(xs);
        let freqs = model_frequencies(&p, &dips.epsilons, transitions, space)
            .expect("Hermitian by construction");
        assignments
            .iter()
            .map(|a| {
                let t_idx = transitions.iter().position(|&t| t == a.transition).unwrap();
                dips.dips[a.eps_index][a.dip_index].center - freqs[a.eps_index][t_idx]
            })
            .collect()
    };
    let r0 = freqs_at(&x);
    let mut jac = DMatrix::zeros(m, 3);
    for k in 0..3 {
        let h = 1e-6 * x[k].abs().max(1e-4);
        let mut xf = x.clone();
        xf[k] += h;
        let rf = freqs_at(&xf);
        for i in 0..m {
            jac[(i, k)] = (rf[i] - r0[i]) / h;
        }
    }
    let jtj = jac.transpose() * &jac;
    let sigma2 = last.cost / (m.saturating_sub(3).max(1)) as f64;
    let covariance_diag = match jtj.try_inverse() {
        Some(inv) => [
            sigma2 * inv[(0, 0)],
            sigma2 * inv[(1, 1)],
            sigma2 * inv[(2, 2)],
        ],
        None => [f64::NAN; 3],
    };

    Ok(FitResult {
        params,
        residual_rms,
        assignments,
        covariance_diag,
    })
}

/// Bath temperature in mK from the depth ratio of two dips sharing levels 1
/// and 0 as initial states: T = (omega01 / k_B) / ln(1 / ratio).
pub fn estimate_temperature(depth_ratio_13_vs_02: f64, omega01: f64) -> Result<f64> {
    if depth_ratio_13_vs_02 >= 1.0 {
        return Err(Error::PopulationInversion(depth_ratio_13_vs_02));
    }
    if !(depth_ratio_13_vs_02 > 0.0) || !(omega01 > 0.0) {
        return Err(Error::InvalidParams(
            "need 0 < ratio < 1 and omega01 > 0".into(),
        ));
    }
    let t_k = omega01 / (crate::consts::BOLTZMANN_GHZ_PER_K * (1.0 / depth_ratio_13_vs_02).ln());
    Ok(t_k * 1e3)
}

/// Reads a dataset from CSV with header `epsilon_ghz,probe_ghz,s21`, one
/// row per grid point in any order; the grid must be rectangular.
pub fn read_dataset_csv<P: AsRef<Path>>(path: P) -> Result<SpectroscopyDataset> {
    let path_str = path.as_ref().display().to_string();
    let file = File::open(&path)?;
    let reader = BufReader::new(file);
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    let mut lines = reader.lines();

    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::MalformedCsv {
            path: path_str.clone(),
            line: 1,
            msg: "empty file".into(),
        })?;
    if header.trim() != "epsilon_ghz,probe_ghz,s21" {
        return Err(Error::MalformedCsv {
            path: path_str,
            line: 1,
            msg: format!("expected header epsilon_ghz,probe_ghz,s21, got {header:?}"),
        });
    }
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::MalformedCsv {
                path: path_str.clone(),
                line: line_no,
                msg: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::MalformedCsv {
                path: path_str.clone(),
                line: line_no,
                msg: format!("cannot parse {what} {s:?}"),
            })
        };
        rows.push((
            parse(fields[0], "epsilon_ghz")?,
            parse(fields[1], "probe_ghz")?,
            parse(fields[2], "s21")?,
        ));
    }

    let mut eps_set: Vec<f64> = rows.iter().map(|r| r.0).collect();
    eps_set.sort_by(f64::total_cmp);
    eps_set.dedup();
    let mut probe_set: Vec<f64> = rows.iter().map(|r| r.1).collect();
    probe_set.sort_by(f64::total_cmp);
    probe_set.dedup();

    let eps_idx: BTreeMap<u64, usize> = eps_set
        .iter()
        .enumerate()
        .map(|(i, &v)| (v.to_bits(), i))
        .collect();
    let probe_idx: BTreeMap<u64, usize> = probe_set
        .iter()
        .enumerate()
        .map(|(i, &v)| (v.to_bits(), i))
        .collect();

    let mut s21 = DMatrix::from_element(probe_set.len(), eps_set.len(), f64::NAN);
    for &(e, p, v) in &rows {
        s21[(probe_idx[&p.to_bits()], eps_idx[&e.to_bits()])] = v;
    }
    if s21.iter().any(|v| v.is_nan()) {
        return Err(Error::MalformedCsv {
            path: path_str,
            line: 0,
            msg: format!(
                "grid is not rectangular: {} rows cover {} x {} cells",
                rows.len(),
                probe_set.len(),
                eps_set.len()
            ),
        });
    }

    Ok(SpectroscopyDataset {
        epsilons: eps_set,
        probe_freqs: probe_set,
        s21_mag: s21,
        meta: DatasetMeta {
            circuit: "csv".into(),
            n_phi_q: f64::NAN,
        },
    })
}

/// Writes a dataset in the `epsilon_ghz,probe_ghz,s21` format.
pub fn write_dataset_csv<P: AsRef<Path>>(path: P, ds: &SpectroscopyDataset) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "epsilon_ghz,probe_ghz,s21")?;
    for (col, &eps) in ds.epsilons.iter().enumerate() {
        for (row, &probe) in ds.probe_freqs.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", eps, probe, ds.s21_mag[(row, col)])?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct FitResultFile {
    delta_ghz: f64,
    omega_o_ghz: f64,
    g_ghz: f64,
    residual_rms_ghz: f64,
}

/// Writes the fitted parameters as a flat key-value JSON document.
pub fn write_fit_result<P: AsRef<Path>>(path: P, fit: &FitResult) -> Result<()> {
    let file = FitResultFile {
        delta_ghz: fit.params.delta,
        omega_o_ghz: fit.params.omega_o,
        g_ghz: fit.params.g,
        residual_rms_ghz: fit.residual_rms,
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &file)?;
    writeln!(w)?;
    Ok(())
}
