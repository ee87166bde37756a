//! ADAPT-VQE outer loop, the fixed-ansatz VQE driver, and measurement accounting.

use serde::{Deserialize, Serialize};

use crate::ansatz::{build_uccsd_pool, Ansatz, Pool, PoolOperator};
use crate::circuit::CircuitMetrics;
use crate::error::{Error, Result};
use crate::hamiltonian::MolecularHamiltonian;
use crate::optimize::{
    minimize, Objective, OptimizationResult, OptimizerKind, DEFAULT_FD_STEP, DEFAULT_MAX_EVALUATIONS,
    DEFAULT_TOL_REL_ENERGY,
};
use crate::pauli::PauliSum;
use crate::statevector::StateVector;

const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptConfig {
    pub grad_norm_threshold: f64,
    pub max_iterations: usize,
    pub optimizer: OptimizerKind,
    pub tol_rel_energy: f64,
    pub fd_step: f64,
    /// Objective-evaluation budget per optimization.
    pub max_evaluations: usize,
    /// Start each re-optimization from the previous optimum (new parameter at
    /// zero) instead of all zeros. Off by default.
    pub warm_start: bool,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            grad_norm_threshold: 1e-2,
            max_iterations: 50,
            optimizer: OptimizerKind::Lbfgs,
            tol_rel_energy: DEFAULT_TOL_REL_ENERGY,
            fd_step: DEFAULT_FD_STEP,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
            warm_start: false,
        }
    }
}

impl AdaptConfig {
    pub fn with_optimizer(mut self, optimizer: OptimizerKind) -> Self {
        self.optimizer = optimizer;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("grad_norm_threshold", self.grad_norm_threshold),
            ("tol_rel_energy", self.tol_rel_energy),
            ("fd_step", self.fd_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if self.max_evaluations == 0 {
            return Err(Error::Config("max_evaluations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Symbolic measurement cost: one unit per non-identity Pauli string in every
/// operator whose expectation is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementLedger {
    pub energy_evaluations: u64,
    pub commutator_evaluations: u64,
    pub pauli_term_measurements: u64,
}

impl MeasurementLedger {
    pub fn charge_energy(&mut self, h_p: &PauliSum, count: usize) {
        self.energy_evaluations += count as u64;
        self.pauli_term_measurements += (count * h_p.non_identity_len()) as u64;
    }

    pub fn charge_commutator(&mut self, commutator: &PauliSum) {
        self.commutator_evaluations += 1;
        self.pauli_term_measurements += commutator.non_identity_len() as u64;
    }

    pub fn total(&self) -> u64 {
        self.pauli_term_measurements
    }
}

/// `[H_P, τ_k]` for every pool element, computed once per Hamiltonian.
#[derive(Debug, Clone)]
pub struct CommutatorCache {
    commutators: Vec<PauliSum>,
}

impl CommutatorCache {
    pub fn new(h_p: &PauliSum, pool: &Pool) -> Result<Self> {
        let commutators = pool
            .operators()
            .iter()
            .map(|op| h_p.commutator(&op.qubit_form))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { commutators })
    }

    pub fn commutators(&self) -> &[PauliSum] {
        &self.commutators
    }

    /// `⟨ψ|[H_P, τ_k]|ψ⟩` for every `k`, charging each evaluation.
    pub fn screen(&self, psi: &StateVector, ledger: &mut MeasurementLedger) -> Result<Vec<f64>> {
        self.commutators
            .iter()
            .map(|c| {
                ledger.charge_commutator(c);
                psi.expectation(c)
            })
            .collect()
    }
}

/// One-shot screening without a cache.
pub fn screen_pool(
    psi: &StateVector,
    h_p: &PauliSum,
    pool: &[PoolOperator],
    ledger: &mut MeasurementLedger,
) -> Result<Vec<f64>> {
    if pool.is_empty() {
        return Err(Error::contract("screening needs a non-empty pool"));
    }
    pool.iter()
        .map(|op| {
            let c = h_p.commutator(&op.qubit_form)?;
            ledger.charge_commutator(&c);
            psi.expectation(&c)
        })
        .collect()
}

/// Index of the largest `|g_k|`; ties within 1e-12 go to the lowest index.
pub fn select_operator(grads: &[f64]) -> Result<usize> {
    if grads.is_empty() {
        return Err(Error::contract("cannot select from an empty pool"));
    }
    let mut best = 0;
    for (k, g) in grads.iter().enumerate().skip(1) {
        if g.abs() > grads[best].abs() + TIE_TOL {
            best = k;
        }
    }
    Ok(best)
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptIteration {
    pub selected_pool_id: usize,
    /// Norm of the screening gradient that selected this operator.
    pub grad_norm: f64,
    pub grad_vector: Vec<f64>,
    /// Optimized energy (core included) after adding the operator.
    pub energy: f64,
    pub theta: Vec<f64>,
    /// Ledger total after this iteration's optimization and the screening of
    /// the state it produced.
    pub measurement_count_cumulative: u64,
    pub optimizer_converged: bool,
    pub optimizer_evaluations: usize,
    /// Set when the zero start ended above the previous energy and a second
    /// optimization from the previous optimum was run.
    pub warm_restarted: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AdaptTrace {
    pub iterations: Vec<AdaptIteration>,
}

impl AdaptTrace {
    /// Screening norm measured on the state after `n_operators` additions,
    /// when that screening happened.
    pub fn grad_norm_at(&self, n_operators: usize, final_norm: f64) -> Option<f64> {
        match n_operators.cmp(&self.iterations.len()) {
            std::cmp::Ordering::Less => Some(self.iterations[n_operators].grad_norm),
            std::cmp::Ordering::Equal => Some(final_norm),
            std::cmp::Ordering::Greater => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Fci,
    Vqe,
    Adapt,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Fci => "fci",
            Method::Vqe => "vqe",
            Method::Adapt => "adapt",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fci" => Ok(Method::Fci),
            "vqe" => Ok(Method::Vqe),
            "adapt" | "adapt-vqe" | "adapt_vqe" => Ok(Method::Adapt),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// Result of a VQE or ADAPT-VQE run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub method: Method,
    pub optimizer: OptimizerKind,
    pub pool: Pool,
    pub ansatz: Ansatz,
    /// Total energy, core included.
    pub energy: f64,
    pub state: StateVector,
    pub trace: AdaptTrace,
    pub ledger: MeasurementLedger,
    pub resources: CircuitMetrics,
    pub converged: bool,
    /// Norm of the last screening gradient (ADAPT only).
    pub final_grad_norm: Option<f64>,
    pub final_gradient: Vec<f64>,
    /// Per-iteration energies of the (last) optimizer run.
    pub optimizer_trace: Vec<f64>,
}

/// Everything derived from the Hamiltonian that both drivers share.
struct Problem {
    h_p: PauliSum,
    core: f64,
    pool: Pool,
    reference: StateVector,
}

impl Problem {
    fn new(ham: &MolecularHamiltonian) -> Result<Self> {
        let h_p = ham.qubit_hamiltonian()?;
        let pool = build_uccsd_pool(ham.n_spatial(), ham.n_electrons())?;
        let reference = StateVector::hartree_fock_reference(ham.n_qubits(), ham.n_electrons())?;
        Ok(Self {
            h_p,
            core: ham.core_energy(),
            pool,
            reference,
        })
    }

    fn energy_of(&self, state: &StateVector) -> f64 {
        // H_P is Hermitian by construction; skip the per-call check.
        self.core + state.expectation_complex(&self.h_p).re
    }

    fn optimize(
        &self,
        ansatz: &Ansatz,
        theta0: &[f64],
        cfg: &AdaptConfig,
        ledger: &mut MeasurementLedger,
    ) -> Result<OptimizationResult> {
        let mut failure = None;
        let result = {
            let mut obj = Objective::new(theta0.len(), |theta: &[f64]| {
                match ansatz.prepare_with(&self.pool, &self.reference, theta) {
                    Ok(s) => self.energy_of(&s),
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                }
            });
            minimize(cfg.optimizer, &mut obj, theta0, cfg.tol_rel_energy, cfg.fd_step, cfg.max_evaluations)?
        };
        if let Some(e) = failure {
            return Err(e);
        }
        ledger.charge_energy(&self.h_p, result.n_energy_evals);
        Ok(result)
    }
}

fn finish(
    method: Method,
    cfg: &AdaptConfig,
    problem: Problem,
    ansatz: Ansatz,
    energy: f64,
    state: StateVector,
) -> Result<RunOutcome> {
    let resources = ansatz.compile_circuit(&problem.pool)?.metrics();
    Ok(RunOutcome {
        method,
        optimizer: cfg.optimizer,
        pool: problem.pool,
        ansatz,
        energy,
        state,
        trace: AdaptTrace::default(),
        ledger: MeasurementLedger::default(),
        resources,
        converged: true,
        final_grad_norm: None,
        final_gradient: Vec::new(),
        optimizer_trace: Vec::new(),
    })
}

/// Grows the ansatz one operator at a time until the screening gradient norm
/// drops to the threshold, re-optimizing all parameters after each addition.
pub fn run_adapt(ham: &MolecularHamiltonian, cfg: &AdaptConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let problem = Problem::new(ham)?;
    let cache = CommutatorCache::new(&problem.h_p, &problem.pool)?;
    let mut ledger = MeasurementLedger::default();
    let mut trace = AdaptTrace::default();
    let mut ansatz = Ansatz::new();
    let mut state = problem.reference.clone();
    let mut energy = problem.energy_of(&state);
    ledger.charge_energy(&problem.h_p, 1);
    let mut optimizer_trace = Vec::new();

    let mut converged = false;
    let mut gradient = Vec::new();
    for iteration in 0..=cfg.max_iterations {
        gradient = cache.screen(&state, &mut ledger)?;
        if let Some(last) = trace.iterations.last_mut() {
            last.measurement_count_cumulative = ledger.total();
        }
        let norm = l2_norm(&gradient);
        if norm <= cfg.grad_norm_threshold {
            converged = true;
            break;
        }
        if iteration == cfg.max_iterations {
            break;
        }
        let selected = select_operator(&gradient)?;
        let mut warm = ansatz.thetas();
        warm.push(0.0);
        let theta0 = if cfg.warm_start { warm.clone() } else { vec![0.0; warm.len()] };
        ansatz.push(selected, 0.0);
        let mut result = problem.optimize(&ansatz, &theta0, cfg, &mut ledger)?;
        // The previous optimum is still reachable with the new angle at zero;
        // a loose stop can land above it, so retry from there.
        let mut warm_restarted = false;
        if iteration > 0 && result.energy > energy && theta0 != warm {
            let retry = problem.optimize(&ansatz, &warm, cfg, &mut ledger)?;
            warm_restarted = true;
            if retry.energy < result.energy {
                result = retry;
            }
        }
        ansatz.set_thetas(&result.theta_opt)?;
        state = ansatz.prepare_state(&problem.pool, &problem.reference)?;
        energy = result.energy;
        trace.iterations.push(AdaptIteration {
            selected_pool_id: selected,
            grad_norm: norm,
            grad_vector: gradient.clone(),
            energy,
            theta: result.theta_opt.clone(),
            measurement_count_cumulative: ledger.total(),
            optimizer_converged: result.converged,
            optimizer_evaluations: result.n_energy_evals,
            warm_restarted,
        });
        optimizer_trace = result.trace;
    }

    let final_norm = l2_norm(&gradient);
    let mut out = finish(Method::Adapt, cfg, problem, ansatz, energy, state)?;
    out.trace = trace;
    out.ledger = ledger;
    out.converged = converged;
    out.final_grad_norm = Some(final_norm);
    out.final_gradient = gradient;
    out.optimizer_trace = optimizer_trace;
    Ok(out)
}

/// Optimizes the full UCCSD product ansatz once from all-zero parameters.
pub fn run_vqe(ham: &MolecularHamiltonian, cfg: &AdaptConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let problem = Problem::new(ham)?;
    let mut ledger = MeasurementLedger::default();
    if problem.pool.is_empty() {
        let state = problem.reference.clone();
        let energy = problem.energy_of(&state);
        ledger.charge_energy(&problem.h_p, 1);
        let mut out = finish(Method::Vqe, cfg, problem, Ansatz::new(), energy, state)?;
        out.ledger = ledger;
        return Ok(out);
    }
    let mut ansatz = Ansatz::full_uccsd(&problem.pool)?;
    let theta0 = vec![0.0; ansatz.len()];
    let result = problem.optimize(&ansatz, &theta0, cfg, &mut ledger)?;
    ansatz.set_thetas(&result.theta_opt)?;
    let state = ansatz.prepare_state(&problem.pool, &problem.reference)?;
    let mut out = finish(Method::Vqe, cfg, problem, ansatz, result.energy, state)?;
    out.ledger = ledger;
    out.converged = result.converged;
    out.optimizer_trace = result.trace;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_rule() {
        assert_eq!(select_operator(&[0.1, -0.5]).unwrap(), 1);
        assert_eq!(select_operator(&[0.3, 0.3]).unwrap(), 0);
        assert_eq!(select_operator(&[-0.3, 0.3 + 1e-13]).unwrap(), 0);
        assert!(select_operator(&[]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(AdaptConfig::default().validate().is_ok());
        let bad = AdaptConfig {
            grad_norm_threshold: 0.0,
            ..AdaptConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = AdaptConfig {
            max_iterations: 0,
            ..AdaptConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn ledger_skips_identity() {
        let h = PauliSum::from_labels(
            2,
            &[
                ("I", num_complex::Complex64::new(1.0, 0.0)),
                ("Z0", num_complex::Complex64::new(0.5, 0.0)),
                ("X0 X1", num_complex::Complex64::new(0.1, 0.0)),
            ],
        )
        .unwrap();
        let mut ledger = MeasurementLedger::default();
        ledger.charge_energy(&h, 3);
        assert_eq!(ledger.energy_evaluations, 3);
        assert_eq!(ledger.total(), 6);
    }

    #[test]
    fn grad_norm_lookup() {
        let it = |n: f64| AdaptIteration {
            selected_pool_id: 0,
            grad_norm: n,
            grad_vector: vec![n],
            energy: 0.0,
            theta: vec![],
            measurement_count_cumulative: 0,
            optimizer_converged: true,
            optimizer_evaluations: 0,
            warm_restarted: false,
        };
        let trace = AdaptTrace {
            iterations: vec![it(0.5), it(0.02)],
        };
        assert_eq!(trace.grad_norm_at(1, 0.001), Some(0.02));
        assert_eq!(trace.grad_norm_at(2, 0.001), Some(0.001));
        assert_eq!(trace.grad_norm_at(3, 0.001), None);
    }
}
