//! Gate-level compilation of Pauli exponentials for resource reporting.
//!
//! Each string `exp(iφP)` becomes the usual staircase: basis changes
//! (H for X, Rx(π/2) for Y), a CNOT ladder up to the highest support qubit,
//! `Rz(−2φ)` there, then the mirror image. `Rz(λ) = exp(−iλZ/2)` and
//! `Rx(λ) = exp(−iλX/2)`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliSum};
use crate::statevector::StateVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    Rx(f64, usize),
    Rz(f64, usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::Rx(_, q) | Gate::Rz(_, q) => (q, None),
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub gate_count: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl GateCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let (a, b) = gate.qubits();
        let top = a.max(b.unwrap_or(0));
        if top >= self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: top + 1,
            });
        }
        if b == Some(a) {
            return Err(Error::contract("CNOT control and target must differ"));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Emits `exp(θ·τ)` for an anti-Hermitian generator, one staircase per
    /// string in canonical order. Zero angles still emit their gates.
    pub(crate) fn append_generator(&mut self, tau: &PauliSum, theta: f64) {
        for t in tau.terms() {
            if t.is_identity() {
                continue;
            }
            let phi = theta * t.coeff().im;
            let support: Vec<usize> = (0..self.n_qubits).filter(|&q| t.support() >> q & 1 == 1).collect();
            for &q in &support {
                match t.pauli_at(q) {
                    Pauli::X => self.gates.push(Gate::H(q)),
                    Pauli::Y => self.gates.push(Gate::Rx(FRAC_PI_2, q)),
                    _ => {}
                }
            }
            for w in support.windows(2) {
                self.gates.push(Gate::Cnot {
                    control: w[0],
                    target: w[1],
                });
            }
            self.gates.push(Gate::Rz(-2.0 * phi, *support.last().unwrap()));
            for w in support.windows(2).rev() {
                self.gates.push(Gate::Cnot {
                    control: w[0],
                    target: w[1],
                });
            }
            for &q in &support {
                match t.pauli_at(q) {
                    Pauli::X => self.gates.push(Gate::H(q)),
                    Pauli::Y => self.gates.push(Gate::Rx(-FRAC_PI_2, q)),
                    _ => {}
                }
            }
        }
    }

    /// Gate count and greedy as-soon-as-possible layer depth.
    pub fn metrics(&self) -> CircuitMetrics {
        let mut level = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let l = match g.qubits() {
                (a, None) => {
                    level[a] += 1;
                    level[a]
                }
                (a, Some(b)) => {
                    let l = level[a].max(level[b]) + 1;
                    level[a] = l;
                    level[b] = l;
                    l
                }
            };
            depth = depth.max(l);
        }
        CircuitMetrics {
            gate_count: self.gates.len(),
            depth,
        }
    }

    /// Line-based listing: `H 0`, `RX 1.5707963267948966 2`, `RZ 0.123 2`, `CNOT 0 1`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            match *g {
                Gate::H(q) => writeln!(out, "H {q}"),
                Gate::Rx(a, q) => writeln!(out, "RX {a} {q}"),
                Gate::Rz(a, q) => writeln!(out, "RZ {a} {q}"),
                Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}"),
            }
            .unwrap();
        }
        out
    }

    /// Gate-by-gate simulation, independent of the Pauli-exponential kernels.
    pub fn simulate(&self, input: &StateVector) -> Result<StateVector> {
        if input.n_qubits() != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: input.n_qubits(),
            });
        }
        let mut amps = input.amplitudes().to_vec();
        for g in &self.gates {
            match *g {
                Gate::H(q) => {
                    let h = FRAC_1_SQRT_2;
                    apply_1q(&mut amps, q, [[h.into(), h.into()], [h.into(), (-h).into()]]);
                }
                Gate::Rx(a, q) => {
                    let (s, c) = (a / 2.0).sin_cos();
                    let ms = Complex64::new(0.0, -s);
                    apply_1q(&mut amps, q, [[c.into(), ms], [ms, c.into()]]);
                }
                Gate::Rz(a, q) => {
                    let zero = Complex64::new(0.0, 0.0);
                    apply_1q(
                        &mut amps,
                        q,
                        [[Complex64::from_polar(1.0, -a / 2.0), zero], [zero, Complex64::from_polar(1.0, a / 2.0)]],
                    );
                }
                Gate::Cnot { control, target } => {
                    let (cb, tb) = (1usize << control, 1usize << target);
                    for b in 0..amps.len() {
                        if b & cb != 0 && b & tb == 0 {
                            amps.swap(b, b | tb);
                        }
                    }
                }
            }
        }
        StateVector::from_amplitudes(amps)
    }
}

fn apply_1q(amps: &mut [Complex64], q: usize, m: [[Complex64; 2]; 2]) {
    let bit = 1usize << q;
    for b in 0..amps.len() {
        if b & bit != 0 {
            continue;
        }
        let (a0, a1) = (amps[b], amps[b | bit]);
        amps[b] = m[0][0] * a0 + m[0][1] * a1;
        amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
    }
}
