//! Statevector VQE and ADAPT-VQE benchmark harness for small molecular
//! Hamiltonians: Pauli algebra, Jordan-Wigner mapping, FCIDUMP input, UCCSD
//! pools, classical optimizers, an exact-diagonalization reference and
//! potential-curve scans.

pub mod adapt;
pub mod ansatz;
pub mod circuit;
pub mod error;
pub mod fermion;
pub mod hamiltonian;
pub mod optimize;
pub mod oracle;
pub mod pauli;
pub mod scan;
pub mod statevector;

pub use adapt::{run_adapt, run_vqe, AdaptConfig, AdaptTrace, MeasurementLedger, Method, RunOutcome};
pub use ansatz::{build_uccsd_pool, Ansatz, Pool, PoolOperator};
pub use circuit::{CircuitMetrics, Gate, GateCircuit};
pub use error::{Error, Result};
pub use fermion::{jordan_wigner, verify_car, FermionOperator, LadderProduct};
pub use hamiltonian::{parse_fcidump, read_fcidump, MolecularHamiltonian};
pub use optimize::{minimize, Objective, OptimizationResult, OptimizerKind};
pub use oracle::{infidelity_vs_fci, solve_fci, FciSolution};
pub use pauli::{Pauli, PauliSum, PauliTerm};
pub use scan::{emit_report, run_scan, ScanConfig, ScanRow};
pub use statevector::StateVector;
