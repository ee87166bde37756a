use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vqebench::adapt::{run_adapt, run_vqe, AdaptConfig, Method};
use vqebench::ansatz::build_uccsd_pool;
use vqebench::error::{Error, Result};
use vqebench::fermion::verify_car;
use vqebench::hamiltonian::{parse_fcidump, read_fcidump};
use vqebench::optimize::OptimizerKind;
use vqebench::oracle::solve_fci;
use vqebench::scan::{emit_report, run_scan, ScanConfig, ScanRow};
use vqebench::statevector::StateVector;

#[derive(Parser)]
#[command(name = "vqebench", version, about = "Statevector VQE / ADAPT-VQE benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every input x method x optimizer listed in a TOML config.
    Scan {
        #[arg(long)]
        config: PathBuf,
    },
    /// Single point.
    Run {
        #[arg(long)]
        fcidump: PathBuf,
        #[arg(long, default_value = "adapt")]
        method: Method,
        #[arg(long, default_value = "lbfgs")]
        optimizer: OptimizerKind,
        #[arg(long)]
        grad_norm_threshold: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        fd_step: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Quick internal consistency checks.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scan { config } => scan(config),
        Command::Run {
            fcidump,
            method,
            optimizer,
            grad_norm_threshold,
            tol,
            fd_step,
            max_iter,
        } => {
            let mut cfg = AdaptConfig::default().with_optimizer(optimizer);
            if let Some(v) = grad_norm_threshold {
                cfg.grad_norm_threshold = v;
            }
            if let Some(v) = tol {
                cfg.tol_rel_energy = v;
            }
            if let Some(v) = fd_step {
                cfg.fd_step = v;
            }
            if let Some(v) = max_iter {
                cfg.max_iterations = v;
            }
            run(fcidump, method, cfg)
        }
        Command::Selftest => selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn scan(config: PathBuf) -> Result<()> {
    let cfg = ScanConfig::load(&config)?;
    let rows = run_scan(&cfg)?;
    for f in emit_report(&rows, &cfg.output)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn run(path: PathBuf, method: Method, cfg: AdaptConfig) -> Result<()> {
    cfg.validate()?;
    let ham = read_fcidump(&path)?;
    let sol = solve_fci(&ham)?;
    println!("system      {} ({} qubits, {} electrons)", ham.label, ham.n_qubits(), ham.n_electrons());
    println!("fci energy  {:.9}", sol.energy);
    if sol.degeneracy_flag {
        println!("note        degenerate ground state ({} states)", sol.degenerate_states.len());
    }
    let out = match method {
        Method::Fci => return Ok(()),
        Method::Vqe => run_vqe(&ham, &cfg)?,
        Method::Adapt => run_adapt(&ham, &cfg)?,
    };
    for (i, it) in out.trace.iterations.iter().enumerate() {
        println!(
            "iter {:>3}   op {:>3}  |G| {:.6e}  E {:.9}  meas {}",
            i + 1,
            it.selected_pool_id,
            it.grad_norm,
            it.energy,
            it.measurement_count_cumulative
        );
    }
    if let Some(g) = out.final_grad_norm {
        println!("final |G|   {g:.6e}");
    }
    let row = ScanRow::from_outcome(&ham.label, &out, &sol)?;
    println!("{} {} energy {:.9}", row.method, row.optimizer, row.energy);
    println!("abs error   {:e}", row.abs_error_vs_fci);
    println!("infidelity  {:e}", row.infidelity);
    println!("operators   {}", row.n_operators);
    println!("gates       {} (depth {})", row.gate_count, row.depth);
    println!("measurements {}", row.measurement_total);
    println!("converged   {}", row.converged);
    Ok(())
}

const SELFTEST_DUMP: &str = include_str!("../../../../data/h2/h2_0.70.fcidump");

fn check(name: &str, ok: bool, failures: &mut Vec<String>) {
    println!("{} {name}", if ok { "ok  " } else { "FAIL" });
    if !ok {
        failures.push(name.to_string());
    }
}

fn selftest() -> Result<()> {
    let mut failures = Vec::new();
    for n in 1..=6 {
        check(&format!("anticommutation relations, {n} modes"), verify_car(n), &mut failures);
    }
    check("CAS(2,2) pool has 2 operators", build_uccsd_pool(2, 2)?.len() == 2, &mut failures);

    let ham = parse_fcidump(SELFTEST_DUMP)?;
    let sol = solve_fci(&ham)?;
    let h_p = ham.qubit_hamiltonian()?;
    let residual = {
        let hv = sol.ground_state.apply_sum(&h_p)?;
        let e = sol.energy - ham.core_energy();
        hv.iter()
            .zip(sol.ground_state.amplitudes())
            .map(|(a, b)| (a - b * e).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    check("exact ground state is an eigenvector", residual < 1e-8, &mut failures);
    let hf = StateVector::hartree_fock_reference(ham.n_qubits(), ham.n_electrons())?;
    check(
        "exact energy below reference energy",
        sol.energy <= hf.expectation(&h_p)? + ham.core_energy() + 1e-12,
        &mut failures,
    );
    for opt in [OptimizerKind::NelderMead, OptimizerKind::Lbfgs] {
        let cfg = AdaptConfig::default().with_optimizer(opt);
        for (name, out) in [("vqe", run_vqe(&ham, &cfg)?), ("adapt", run_adapt(&ham, &cfg)?)] {
            let err = out.energy - sol.energy;
            check(
                &format!("H2 {name}/{opt} within 1e-6 of exact, not below"),
                err.abs() <= 1e-6 && err >= -1e-9,
                &mut failures,
            );
            let circuit = out.ansatz.compile_circuit(&out.pool)?.simulate(&hf)?;
            check(
                &format!("H2 {name}/{opt} compiled circuit matches state"),
                circuit.infidelity(&out.state)? < 1e-10,
                &mut failures,
            );
        }
    }
    if failures.is_empty() {
        println!("all checks passed");
        Ok(())
    } else {
        Err(Error::Invariant(format!("{} selftest check(s) failed", failures.len())))
    }
}
