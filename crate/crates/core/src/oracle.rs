//! Exact ground state by dense diagonalization in the fixed-particle-number sector.
//! Capped at 12 qubits.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::MolecularHamiltonian;
use crate::pauli::{i_pow, DENSE_QUBIT_CAP};
use crate::statevector::StateVector;

/// Two lowest sector eigenvalues closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct FciSolution {
    /// Ground-state energy, core included.
    pub energy: f64,
    pub ground_state: StateVector,
    /// Basis indices of the particle-number sector that was diagonalized.
    pub sector: Vec<usize>,
    pub degeneracy_flag: bool,
    /// Orthonormal basis of the lowest eigenspace (ground state first).
    pub degenerate_states: Vec<StateVector>,
    /// Lowest few sector eigenvalues, core included, ascending.
    pub low_spectrum: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    pub infidelity: f64,
    pub degenerate: bool,
}

pub fn solve_fci(ham: &MolecularHamiltonian) -> Result<FciSolution> {
    let n = ham.n_qubits();
    if n > DENSE_QUBIT_CAP {
        return Err(Error::ResourceLimit {
            what: "qubits for exact diagonalization",
            requested: n,
            cap: DENSE_QUBIT_CAP,
        });
    }
    let h_p = ham.qubit_hamiltonian()?;
    let ne = ham.n_electrons() as u32;
    let sector: Vec<usize> = (0..1usize << n).filter(|b| b.count_ones() == ne).collect();
    let m = sector.len();
    let mut position = vec![usize::MAX; 1 << n];
    for (i, &b) in sector.iter().enumerate() {
        position[b] = i;
    }
    // P = i^{|x&z|} X^x Z^z, so P|b⟩ = i^{|x&z|} (−1)^{|z&b|} |b⊕x⟩.
    let mut block = DMatrix::<Complex64>::zeros(m, m);
    for t in h_p.terms() {
        let (x, z) = (t.x_mask() as usize, t.z_mask() as usize);
        let c = t.coeff() * i_pow((t.x_mask() & t.z_mask()).count_ones());
        for (j, &b) in sector.iter().enumerate() {
            let i = position[b ^ x];
            if i == usize::MAX {
                continue;
            }
            let sign = if (z & b).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            block[(i, j)] += c * sign;
        }
    }
    let eig = block.symmetric_eigen();

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e0 = eig.eigenvalues[order[0]];
    let lift = |k: usize| -> Result<StateVector> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (i, &b) in sector.iter().enumerate() {
            amps[b] = eig.eigenvectors[(i, k)];
        }
        StateVector::from_amplitudes(amps)
    };
    let degenerate_states = order
        .iter()
        .take_while(|&&k| eig.eigenvalues[k] - e0 < DEGENERACY_TOL)
        .map(|&k| lift(k))
        .collect::<Result<Vec<_>>>()?;
    let core = ham.core_energy();
    Ok(FciSolution {
        energy: e0 + core,
        ground_state: degenerate_states[0].clone(),
        degeneracy_flag: degenerate_states.len() > 1,
        degenerate_states,
        low_spectrum: order.iter().take(4).map(|&k| eig.eigenvalues[k] + core).collect(),
        sector,
    })
}

/// `1 − |⟨ψ_FCI|ψ⟩|`, minimized over the degenerate ground-state basis when
/// the lowest level is degenerate.
pub fn infidelity_vs_fci(prepared: &StateVector, sol: &FciSolution) -> Result<FidelityReport> {
    let mut best = f64::INFINITY;
    for s in &sol.degenerate_states {
        best = best.min(prepared.infidelity(s)?);
    }
    Ok(FidelityReport {
        infidelity: best,
        degenerate: sol.degeneracy_flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_orbital(h: f64, u: f64) -> MolecularHamiltonian {
        MolecularHamiltonian::new(1, 2, 0.25, vec![h], vec![u]).unwrap()
    }

    #[test]
    fn two_electrons_one_orbital() {
        // Only one determinant: E = 2h + U + core.
        let sol = solve_fci(&one_orbital(-1.2, 0.7)).unwrap();
        assert!((sol.energy - (-2.4 + 0.7 + 0.25)).abs() < 1e-12);
        assert_eq!(sol.sector, vec![3]);
        assert!(!sol.degeneracy_flag);
    }

    #[test]
    fn open_shell_degeneracy_flagged() {
        // One electron in one spatial orbital: α and β are degenerate.
        let ham = MolecularHamiltonian::new(1, 1, 0.0, vec![-0.5], vec![0.3]).unwrap();
        let sol = solve_fci(&ham).unwrap();
        assert!(sol.degeneracy_flag);
        assert_eq!(sol.degenerate_states.len(), 2);
        let alpha = StateVector::basis_state(2, 1).unwrap();
        let r = infidelity_vs_fci(&alpha, &sol).unwrap();
        assert!(r.degenerate);
        assert!(r.infidelity < 1e-12 || sol.degenerate_states.iter().all(|s| alpha.infidelity(s).unwrap() >= r.infidelity));
    }

    #[test]
    fn ground_state_is_eigenvector() {
        let sol = solve_fci(&one_orbital(-0.9, 0.4)).unwrap();
        assert!(sol.ground_state.infidelity(&sol.ground_state).unwrap() < 1e-12);
        assert_eq!(sol.ground_state.number_expectation().round() as usize, 2);
    }
}
