//! File-oriented command-line front end: spectra, entanglement, Wigner
//! maps, coupler sweeps, synthetic datasets, fits, and the reproduction
//! report.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 3 for numerical
//! failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rabisim::entanglement::{
    entanglement_sweep, negativity_entanglement, thermal_entanglement_estimate, thermal_state,
    vn_entanglement, write_entanglement_csv, ThermalSpec,
};
use rabisim::error::{Error, Result};
use rabisim::presets;
use rabisim::rabi::RabiParams;
use rabisim::report;
use rabisim::specfit::{
    extract_dips, fit_parameters, read_dataset_csv, synthesize_dataset, write_dataset_csv,
    write_fit_result, DEFAULT_TRANSITIONS,
};
use rabisim::spectrum::{adaptive_truncation, bias_sweep, write_sweep_csv};
use rabisim::wigner::{wigner, write_wigner_csv, GridSpec};

#[derive(Parser)]
#[command(name = "rabisim", version, about = "Flux-qubit / LC-oscillator circuit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamsArgs {
    /// Built-in parameter set: I_m0p5, I_m1p5, I_2p5, II_m0p5, III_0p5.
    #[arg(long)]
    preset: Option<String>,
    /// JSON file overriding the built-in presets (same keys as the fit
    /// output: delta_ghz, omega_o_ghz, g_ghz), keyed by preset id.
    #[arg(long)]
    params_file: Option<PathBuf>,
}

impl ParamsArgs {
    fn resolve(&self) -> Result<RabiParams> {
        let id = self
            .preset
            .as_deref()
            .ok_or_else(|| Error::InvalidParams("--preset is required".into()))?;
        if let Some(path) = &self.params_file {
            let map = presets::load_params_file(path)?;
            if let Some(p) = map.get(id) {
                return Ok(*p);
            }
        }
        Ok(presets::by_id(id)?.params)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Transition frequencies and matrix elements across a flux-bias sweep
    /// (CSV).
    Spectrum {
        #[command(flatten)]
        params: ParamsArgs,
        /// Lowest bias in GHz.
        #[arg(long, default_value_t = -8.0)]
        eps_min: f64,
        /// Highest bias in GHz.
        #[arg(long, default_value_t = 8.0)]
        eps_max: f64,
        /// Number of bias points.
        #[arg(long, default_value_t = 161)]
        steps: usize,
        /// Comma-separated transition pairs, e.g. 0:1,0:2,1:3,2:4.
        #[arg(long, default_value = "0:1,0:2,1:3,2:4")]
        pairs: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ground-state and thermal entanglement for a parameter set.
    Entanglement {
        #[command(flatten)]
        params: ParamsArgs,
        #[arg(long, default_value_t = 45.0)]
        temperature_mk: f64,
        /// Optional CSV of an entanglement-vs-displacement sweep.
        #[arg(long)]
        sweep_out: Option<PathBuf>,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Wigner function of a reduced oscillator eigenstate (CSV).
    Wigner {
        #[command(flatten)]
        params: ParamsArgs,
        /// Energy eigenstate index to reduce.
        #[arg(long, default_value_t = 0)]
        state: usize,
        #[arg(long, default_value_t = 4.0)]
        half_width: f64,
        #[arg(long, default_value_t = 101)]
        grid_points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Josephson coupler sweep: phases and inductances vs flux bias (CSV).
    Coupler {
        /// JSON file with the circuit parameters; defaults to the reference
        /// four-junction coupler.
        #[arg(long)]
        circuit_file: Option<PathBuf>,
        #[arg(long, default_value_t = 0.46)]
        n_min: f64,
        #[arg(long, default_value_t = 0.54)]
        n_max: f64,
        #[arg(long, default_value_t = 33)]
        steps: usize,
        /// Probe bias current in nA for the mutual inductance.
        #[arg(long, default_value_t = 10.0)]
        delta_i: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthesize a transmission dataset (CSV).
    Synthesize {
        #[command(flatten)]
        params: ParamsArgs,
        #[arg(long, default_value_t = -8.0)]
        eps_min: f64,
        #[arg(long, default_value_t = 8.0)]
        eps_max: f64,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        #[arg(long, default_value_t = 0.2)]
        probe_min: f64,
        #[arg(long, default_value_t = 10.0)]
        probe_max: f64,
        #[arg(long, default_value_t = 491)]
        probe_steps: usize,
        #[arg(long, default_value_t = 0.06)]
        linewidth: f64,
        #[arg(long, default_value_t = 0.01)]
        noise_sigma: f64,
        #[arg(long, default_value_t = 45.0)]
        temperature_mk: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit (delta, omega_o, g) to a dataset CSV.
    Fit {
        /// Input dataset (header epsilon_ghz,probe_ghz,s21).
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        init_delta: f64,
        #[arg(long)]
        init_omega_o: f64,
        #[arg(long)]
        init_g: f64,
        #[arg(long, default_value_t = 6)]
        max_dips: usize,
        #[arg(long, default_value_t = 0.05)]
        prominence: f64,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full verification suite and write a pass/fail report.
    Reproduce {
        #[arg(long)]
        out_dir: PathBuf,
        /// Comma-separated criterion indices (default: all).
        #[arg(long)]
        criteria: Option<String>,
        #[arg(long, default_value_t = 12345)]
        seed: u64,
    },
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|chunk| {
            let mut it = chunk.trim().split(':');
            let i = it.next().and_then(|v| v.parse().ok());
            let j = it.next().and_then(|v| v.parse().ok());
            match (i, j, it.next()) {
                (Some(i), Some(j), None) => Ok((i, j)),
                _ => Err(Error::InvalidParams(format!("bad pair {chunk:?}"))),
            }
        })
        .collect()
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 1 || (steps == 1 && hi != lo) || hi < lo {
        return Err(Error::InvalidParams(format!(
            "bad range [{lo}, {hi}] with {steps} steps"
        )));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
        .collect())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectrum {
            params,
            eps_min,
            eps_max,
            steps,
            pairs,
            out,
        } => {
            let p = params.resolve()?;
            let pairs = parse_pairs(&pairs)?;
            let epsilons = linspace(eps_min, eps_max, steps)?;
            let sweep = bias_sweep(&p, &epsilons, &pairs)?;
            write_sweep_csv(&out, &sweep)?;
        }
        Command::Entanglement {
            params,
            temperature_mk,
            sweep_out,
            out,
        } => {
            let p = params.resolve()?;
            let t = ThermalSpec::new(temperature_mk)?;
            let es = adaptive_truncation(&p, 24, 1e-9);
            let e_gs = vn_entanglement(&es.states[0]);
            let rho = thermal_state(&es, &t)?;
            let e_te = negativity_entanglement(&rho)?;
            let estimate = thermal_entanglement_estimate(&p, &t);
            let doc = serde_json::json!({
                "alpha": p.alpha(),
                "e_gs": e_gs,
                "e_te": e_te,
                "e_te_estimate": estimate,
                "temperature_mk": temperature_mk,
            });
            std::fs::write(&out, format!("{:#}\n", doc))?;
            if let Some(path) = sweep_out {
                let alphas: Vec<f64> = (0..=40).map(|k| 0.3 + 0.05 * k as f64).collect();
                let rows = entanglement_sweep(p.delta, p.omega_o, &alphas, &t)?;
                write_entanglement_csv(&path, &rows)?;
            }
        }
        Command::Wigner {
            params,
            state,
            half_width,
            grid_points,
            out,
        } => {
            let p = params.resolve()?;
            let es = adaptive_truncation(&p, state + 1, 1e-9);
            let rho = rabisim::entanglement::reduce_to_oscillator(&es.states[state]);
            let grid = wigner(
                &rho,
                &GridSpec {
                    half_width,
                    points: grid_points,
                },
            )?;
            write_wigner_csv(&out, &grid)?;
        }
        Command::Coupler {
            circuit_file,
            n_min,
            n_max,
            steps,
            delta_i,
            out,
        } => {
            let circuit = match circuit_file {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    serde_json::from_str(&text)?
                }
                None => rabisim::circuit::CouplerCircuit::default(),
            };
            let points = rabisim::circuit::coupler_sweep(&circuit, n_min, n_max, steps, delta_i)?;
            rabisim::circuit::write_coupler_csv(&out, &points)?;
        }
        Command::Synthesize {
            params,
            eps_min,
            eps_max,
            steps,
            probe_min,
            probe_max,
            probe_steps,
            linewidth,
            noise_sigma,
            temperature_mk,
            seed,
            out,
        } => {
            let p = params.resolve()?;
            let t = ThermalSpec::new(temperature_mk)?;
            let epsilons = linspace(eps_min, eps_max, steps)?;
            let probe = linspace(probe_min, probe_max, probe_steps)?;
            let ds = synthesize_dataset(&p, &t, &epsilons, &probe, linewidth, noise_sigma, seed)?;
            write_dataset_csv(&out, &ds)?;
        }
        Command::Fit {
            data,
            init_delta,
            init_omega_o,
            init_g,
            max_dips,
            prominence,
            out,
        } => {
            let ds = read_dataset_csv(&data)?;
            let dips = extract_dips(&ds, max_dips, prominence);
            let initial = RabiParams::new(init_delta, init_omega_o, init_g)?;
            let fit = fit_parameters(&dips, &initial, &DEFAULT_TRANSITIONS)?;
            write_fit_result(&out, &fit)?;
        }
        Command::Reproduce {
            out_dir,
            criteria,
            seed,
        } => {
            let list: Vec<usize> = match criteria {
                Some(s) => s
                    .split(',')
                    .map(|v| {
                        v.trim().parse::<usize>().map_err(|_| {
                            Error::InvalidParams(format!("bad criterion index {v:?}"))
                        })
                    })
                    .collect::<Result<_>>()?,
                None => Vec::new(),
            };
            std::fs::create_dir_all(&out_dir)?;
            let results = report::run_all(&list, seed);
            let path = out_dir.join("report.txt");
            report::write_report(&path, &results)?;
            print!("{}", report::render_report(&results));
            if results.iter().any(|r| !r.passed) {
                return Err(Error::NoConvergence("some criteria failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
