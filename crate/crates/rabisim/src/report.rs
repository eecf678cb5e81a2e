//! End-to-end verification checks with pinned expectations, runnable as a
//! batch (the `reproduce` subcommand) or individually from the test suite.
//!
//! Each criterion compares computed values against tabulated or derived
//! expectations at a fixed tolerance and reports one pass/fail line per
//! check.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::circuit::{self, CouplerCircuit};
use crate::entanglement::{
    negativity_entanglement, partial_transpose_qubit, thermal_entanglement_estimate,
    thermal_state, vn_entanglement, vn_entanglement_approx, ApproxOrder, ThermalSpec,
};
use crate::error::Result;
use crate::fock::{hermiticity_deviation, FockSpace};
use crate::presets;
use crate::rabi::{
    bogoliubov_frame, build_hamiltonian, build_hamiltonian_a2, joint_parity, superradiance_report,
    NonlinearCoupling, RabiParams,
};
use crate::specfit::{
    extract_dips, fit_parameters, synthesize_dataset, DEFAULT_TRANSITIONS,
};
use crate::spectrum::{
    adaptive_truncation, diagonalize, find_level_crossing, transition_table,
};
use crate::states::{cat_state_for_eigenlevel, fidelity};
use crate::wigner::{refine_peak_re, wigner, GridSpec};

pub const CRITERIA_COUNT: usize = 13;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub lines: Vec<String>,
}

#[derive(Default)]
struct Checker {
    passed: bool,
    lines: Vec<String>,
}

impl Checker {
    fn new() -> Self {
        Self {
            passed: true,
            lines: Vec::new(),
        }
    }

    fn check_abs(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.passed &= ok;
        self.lines.push(format!(
            "[{}] {label}: {got:.6} (expected {want} +- {tol})",
            if ok { "ok" } else { "FAIL" }
        ));
    }

    fn check_rel(&mut self, label: &str, got: f64, want: f64, rel_tol: f64) {
        let ok = (got - want).abs() <= rel_tol * want.abs();
        self.passed &= ok;
        self.lines.push(format!(
            "[{}] {label}: {got:.6} (expected {want:.6} within {:.2}%)",
            if ok { "ok" } else { "FAIL" },
            rel_tol * 100.0
        ));
    }

    fn check_below(&mut self, label: &str, got: f64, bound: f64) {
        let ok = got < bound;
        self.passed &= ok;
        self.lines.push(format!(
            "[{}] {label}: {got:.6} (expected < {bound})",
            if ok { "ok" } else { "FAIL" }
        ));
    }

    fn check_true(&mut self, label: &str, ok: bool) {
        self.passed &= ok;
        self.lines
            .push(format!("[{}] {label}", if ok { "ok" } else { "FAIL" }));
    }
}

fn criterion_body(index: usize, seed: u64, c: &mut Checker) -> Result<()> {
    match index {
        1 => lamb_shift_ratio(c),
        2 => ground_state_entanglement(c),
        3 => approximation_gap(c),
        4 => cat_state_fidelities(c),
        5 => selection_rules(c),
        6 => level_crossing(c),
        7 => superradiance_ratios(c),
        8 => bogoliubov_equivalence(c),
        9 => thermal_entanglement_bounds(c),
        10 => wigner_lobes(c),
        11 => circuit_inductances(c),
        12 => fit_round_trip(c, seed),
        13 => property_suites(c),
        _ => {
            c.check_true("criterion index in 1..=13", false);
            Ok(())
        }
    }
}

const NAMES: [&str; CRITERIA_COUNT] = [
    "lamb_shift_ratio",
    "ground_state_entanglement",
    "approximation_gap",
    "cat_state_fidelities",
    "selection_rules",
    "level_crossing",
    "superradiance_ratios",
    "bogoliubov_equivalence",
    "thermal_entanglement_bounds",
    "wigner_lobes",
    "circuit_inductances",
    "fit_round_trip",
    "property_suites",
];

pub fn run_criterion(index: usize, seed: u64) -> CriterionResult {
    let mut checker = Checker::new();
    if let Err(e) = criterion_body(index, seed, &mut checker) {
        checker.passed = false;
        checker.lines.push(format!("[FAIL] aborted: {e}"));
    }
    CriterionResult {
        index,
        name: NAMES.get(index.wrapping_sub(1)).copied().unwrap_or("unknown"),
        passed: checker.passed,
        lines: checker.lines,
    }
}

/// Runs the selected criteria (all 13 when `criteria` is empty).
pub fn run_all(criteria: &[usize], seed: u64) -> Vec<CriterionResult> {
    let list: Vec<usize> = if criteria.is_empty() {
        (1..=CRITERIA_COUNT).collect()
    } else {
        criteria.to_vec()
    };
    list.into_iter().map(|i| run_criterion(i, seed)).collect()
}

pub fn render_report(results: &[CriterionResult]) -> String {
    let mut out = String::new();
    let mut n_pass = 0;
    for r in results {
        let _ = writeln!(
            out,
            "criterion {:02} {:<28} {}",
            r.index,
            r.name,
            if r.passed { "PASS" } else { "FAIL" }
        );
        for line in &r.lines {
            let _ = writeln!(out, "    {line}");
        }
        n_pass += r.passed as usize;
    }
    let _ = writeln!(out, "summary: {n_pass}/{} criteria passed", results.len());
    out
}

pub fn write_report<P: AsRef<Path>>(path: P, results: &[CriterionResult]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(render_report(results).as_bytes())?;
    Ok(())
}

fn lamb_shift_ratio(c: &mut Checker) -> Result<()> {
    let p = presets::by_id("I_m1p5")?.params;
    let es = adaptive_truncation(&p, 2, 1e-9);
    let omega01 = es.energies[1] - es.energies[0];
    c.check_abs("omega01 / delta at I_m1p5", omega01 / p.delta, 0.30, 0.01);
    Ok(())
}

fn ground_entanglement_of(p: &RabiParams) -> f64 {
    let es = adaptive_truncation(p, 1, 1e-9);
    vn_entanglement(&es.states[0])
}

fn ground_state_entanglement(c: &mut Checker) -> Result<()> {
    for preset in presets::all() {
        let e = ground_entanglement_of(&preset.params);
        if preset.id == "II_m0p5" {
            c.check_abs("E_gs at II_m0p5", e, 0.9988, 0.0005);
        }
        c.check_true(&format!("E_gs >= 0.90 at {} ({e:.4})", preset.id), e >= 0.90);
    }
    Ok(())
}

fn approximation_gap(c: &mut Checker) -> Result<()> {
    let exact_formula = vn_entanglement_approx(1.34, ApproxOrder::ExactFormula).value;
    let second = vn_entanglement_approx(1.34, ApproxOrder::SecondOrder).value;
    c.check_abs("closed-form E_gs at alpha = 1.34", exact_formula, 0.9994, 1e-4);
    c.check_abs("second-order E_gs at alpha = 1.34", second, 0.9994, 1e-4);
    let exact = ground_entanglement_of(&presets::by_id("II_m0p5")?.params);
    c.check_true(
        &format!("closed forms overestimate the exact value ({exact:.6})"),
        exact_formula > exact && second > exact,
    );
    Ok(())
}

fn cat_state_fidelities(c: &mut Checker) -> Result<()> {
    let p3 = presets::by_id("III_0p5")?.params;
    let es = adaptive_truncation(&p3, 4, 1e-9);
    let space = FockSpace::new(es.n_max_used)?;
    let expected = [0.981, 0.985, 0.975, 0.967];
    for level in 0..4 {
        let cat = cat_state_for_eigenlevel(level, &p3, space)?;
        let f = fidelity(&cat, &es.states[level])?;
        c.check_abs(&format!("fidelity of level {level} at III_0p5"), f, expected[level], 0.002);
    }

    let p2 = presets::by_id("II_m0p5")?.params;
    let es2 = adaptive_truncation(&p2, 1, 1e-9);
    let space2 = FockSpace::new(es2.n_max_used)?;
    let cat0 = cat_state_for_eigenlevel(0, &p2, space2)?;
    let f0 = fidelity(&cat0, &es2.states[0])?;
    c.check_abs("ground fidelity at II_m0p5", f0, 0.99994, 2e-5);
    Ok(())
}

fn selection_rules(c: &mut Checker) -> Result<()> {
    let p = presets::by_id("I_m1p5")?.params;
    let es = adaptive_truncation(&p, 4, 1e-9);
    let space = FockSpace::new(es.n_max_used)?;
    let table = transition_table(&es, space, &[(0, 2), (1, 3), (0, 3), (1, 2)])?;
    c.check_below("|T_02| at epsilon = 0", table.get(0, 2).unwrap().t_ij.norm(), 1e-8);
    c.check_below("|T_13| at epsilon = 0", table.get(1, 3).unwrap().t_ij.norm(), 1e-8);

    let t03 = table.get(0, 3).unwrap().t_ij.norm();
    let t12 = table.get(1, 2).unwrap().t_ij.norm();
    let mut peaked_03 = t03 > 1e-3;
    let mut peaked_12 = t12 > 1e-3;
    for eps in [-0.2, 0.2] {
        let es_off = adaptive_truncation(&p.with_epsilon(eps), 4, 1e-9);
        let space_off = FockSpace::new(es_off.n_max_used)?;
        let t = transition_table(&es_off, space_off, &[(0, 3), (1, 2)])?;
        peaked_03 &= t.get(0, 3).unwrap().t_ij.norm() < t03;
        peaked_12 &= t.get(1, 2).unwrap().t_ij.norm() < t12;
    }
    c.check_true("|T_03| is locally maximal at epsilon = 0", peaked_03);
    c.check_true("|T_12| is locally maximal at epsilon = 0", peaked_12);
    Ok(())
}

fn level_crossing(c: &mut Checker) -> Result<()> {
    let p = presets::by_id("I_m1p5")?.params;
    let without_g = RabiParams::new(p.delta, p.omega_o, 0.0)?;
    let g_cross = find_level_crossing(&without_g, (1.0, 5.0))?;
    c.check_abs("parity crossing of levels 2/3", g_cross, 3.15, 0.1);
    Ok(())
}

fn superradiance_ratios(c: &mut Checker) -> Result<()> {
    let expected = presets::tabulated_ratios();
    for (preset, want) in presets::all().iter().zip(expected) {
        let r = superradiance_report(&preset.params, &NonlinearCoupling::NONE);
        c.check_abs(&format!("2g/sqrt(omega_o delta) at {}", preset.id), r.ratio, want, 0.05);
    }
    Ok(())
}

fn bogoliubov_equivalence(c: &mut Checker) -> Result<()> {
    let p = presets::by_id("I_m1p5")?.params;
    let space = FockSpace::new(120)?;
    for c_a2 in [0.01, 0.05, 0.1] {
        let nl = NonlinearCoupling::new(c_a2, 0.0);
        let frame = bogoliubov_frame(&p, &nl)?;
        let p_lin = RabiParams::new(p.delta, frame.omega_o_prime, frame.g_prime)?;
        let e_a2 = diagonalize(&build_hamiltonian_a2(&p, &nl, space)?, 7)?;
        let e_lin = diagonalize(&build_hamiltonian(&p_lin, space), 7)?;
        let max_gap_err = (1..7)
            .map(|k| {
                ((e_a2.energies[k] - e_a2.energies[0]) - (e_lin.energies[k] - e_lin.energies[0]))
                    .abs()
            })
            .fold(0.0f64, f64::max);
        c.check_below(
            &format!("max gap mismatch at c_a2 = {c_a2}"),
            max_gap_err,
            1e-6,
        );
    }
    Ok(())
}

fn thermal_entanglement_bounds(c: &mut Checker) -> Result<()> {
    let t = ThermalSpec::new(45.0)?;
    for preset in presets::all() {
        let es = adaptive_truncation(&preset.params, 24, 1e-9);
        let rho = thermal_state(&es, &t)?;
        let e_te = negativity_entanglement(&rho)?;
        let bound = if preset.circuit == "III" { 0.25 } else { 0.08 };
        c.check_below(&format!("thermal negativity at {}", preset.id), e_te, bound);
        if preset.circuit == "III" {
            let est = thermal_entanglement_estimate(&preset.params, &t);
            c.check_abs("estimate vs exact negativity at III_0p5", est, e_te, 0.05);
        }
    }
    Ok(())
}

fn wigner_lobes(c: &mut Checker) -> Result<()> {
    let p = presets::by_id("II_m0p5")?.params;
    let es = adaptive_truncation(&p, 1, 1e-9);
    let rho_o = crate::entanglement::reduce_to_oscillator(&es.states[0]);
    let grid = wigner(&rho_o, &GridSpec::default())?;

    c.check_abs("Wigner normalization", grid.total(), 1.0, 0.01);

    let n = grid.re_alpha.len();
    let j_mid = n / 2;
    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        let v = grid.values[(i, j_mid)];
        if v > grid.values[(i - 1, j_mid)] && v >= grid.values[(i + 1, j_mid)] && v > 0.05 {
            peaks.push(refine_peak_re(&grid, i, j_mid));
        }
    }
    c.check_true(&format!("two positive lobes ({peaks:?})"), peaks.len() == 2);
    if peaks.len() == 2 {
        c.check_abs("lobe separation 2 alpha", (peaks[1] - peaks[0]).abs(), 2.67, 0.05);
    }

    let space = FockSpace::new(es.n_max_used)?;
    let alpha = p.alpha();
    let left = space.displacement(num_complex::Complex64::new(-alpha, 0.0))
        * space.fock_state(0)?;
    let right =
        space.displacement(num_complex::Complex64::new(alpha, 0.0)) * space.fock_state(0)?;
    let overlap = left.dotc(&right).norm();
    c.check_abs("branch overlap <-alpha|alpha>", overlap, 0.028, 0.002);
    Ok(())
}

fn circuit_inductances(c: &mut Checker) -> Result<()> {
    let circuit = CouplerCircuit::default();
    let points = circuit::coupler_sweep(&circuit, 0.46, 0.54, 17, 10.0)?;
    let mut worst_lc_dev = 0.0f64;
    let mut worst_branch_dev = 0.0f64;
    for p in &points {
        worst_lc_dev = worst_lc_dev.max((p.set.m - p.set.l_c).abs() / p.set.l_c);
        worst_branch_dev = worst_branch_dev.max((p.m_l - p.m_r).abs() / p.set.m);
    }
    c.check_below("max |M - L_c| / L_c over the sweep", worst_lc_dev, 0.05);
    c.check_below("max |M_L - M_R| / M over the sweep", worst_branch_dev, 0.01);
    Ok(())
}

fn fit_round_trip(c: &mut Checker, seed: u64) -> Result<()> {
    let t = ThermalSpec::new(45.0)?;
    let epsilons: Vec<f64> = (0..41).map(|k| -8.0 + 0.4 * k as f64).collect();
    let probe: Vec<f64> = (0..491).map(|k| 0.2 + 0.02 * k as f64).collect();
    for (idx, preset) in presets::all().iter().enumerate() {
        let truth = preset.params;
        let ds = synthesize_dataset(
            &truth,
            &t,
            &epsilons,
            &probe,
            0.06,
            0.01,
            seed + idx as u64,
        )?;
        let dips = extract_dips(&ds, 6, 0.05);
        let initial = RabiParams::new(truth.delta * 1.10, truth.omega_o * 0.93, truth.g * 1.08)?;
        let fit = fit_parameters(&dips, &initial, &DEFAULT_TRANSITIONS)?;
        c.check_rel(
            &format!("recovered delta at {}", preset.id),
            fit.params.delta,
            truth.delta,
            0.02,
        );
        c.check_rel(
            &format!("recovered omega_o at {}", preset.id),
            fit.params.omega_o,
            truth.omega_o,
            0.02,
        );
        c.check_rel(
            &format!("recovered g at {}", preset.id),
            fit.params.g,
            truth.g,
            0.02,
        );
    }
    Ok(())
}

fn property_suites(c: &mut Checker) -> Result<()> {
    // parity commutation at the symmetry point
    let p = presets::by_id("I_m1p5")?.params;
    let space = FockSpace::new(40)?;
    let h = build_hamiltonian(&p, space);
    let pi = joint_parity(space);
    let comm_norm = (&h * &pi - &pi * &h).norm() / h.norm();
    c.check_below("parity commutator norm", comm_norm, 1e-12);

    // truncated commutation relation
    let a = space.annihilation();
    let comm = &a * a.adjoint() - a.adjoint() * &a;
    let mut dev = 0.0f64;
    for i in 0..39 {
        for j in 0..39 {
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((comm[(i, j)] - num_complex::Complex64::new(want, 0.0)).norm());
        }
    }
    c.check_below("[a, a†] identity below truncation", dev, 1e-12);

    // partial transpose structure on a thermal state
    let es = adaptive_truncation(&p, 24, 1e-9);
    let rho = thermal_state(&es, &ThermalSpec::new(45.0)?)?;
    let pt = partial_transpose_qubit(&rho.matrix);
    c.check_below(
        "partial transpose trace shift",
        (pt.trace().re - 1.0).abs(),
        1e-12,
    );
    c.check_below("partial transpose hermiticity", hermiticity_deviation(&pt), 1e-12);

    // Wigner bound on a computed grid
    let p2 = presets::by_id("II_m0p5")?.params;
    let es2 = adaptive_truncation(&p2, 1, 1e-9);
    let rho_o = crate::entanglement::reduce_to_oscillator(&es2.states[0]);
    let grid = wigner(
        &rho_o,
        &GridSpec {
            half_width: 4.0,
            points: 61,
        },
    )?;
    c.check_below(
        "max |W| against 2/pi",
        grid.max_abs(),
        2.0 / std::f64::consts::PI + 1e-9,
    );

    // eigenbasis inductance trace preservation
    let mut worst = 0.0f64;
    for k in 0..20 {
        let theta = 0.157 * k as f64;
        let (g, e) = circuit::eigenbasis_inductances(311.0, 347.0, theta);
        worst = worst.max((g + e - (311.0 + 347.0)).abs());
    }
    c.check_below("eigenbasis inductance trace deviation", worst, 1e-12);
    Ok(())
}
