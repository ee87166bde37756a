mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;

use common::*;
use vqebench::ansatz::{build_uccsd_pool, Ansatz};
use vqebench::hamiltonian::read_fcidump;
use vqebench::oracle::{infidelity_vs_fci, solve_fci};
use vqebench::statevector::StateVector;

fn dense_fermionic(op: &vqebench::fermion::FermionOperator) -> DMatrix<Complex64> {
    let dim = 1 << op.n_modes();
    let mut total = DMatrix::zeros(dim, dim);
    for p in op.products() {
        let factors: Vec<(usize, bool)> = p.factors.iter().map(|f| (f.mode, f.dagger)).collect();
        for b in 0..dim {
            if let Some((sg, out)) = apply_ladders(b, &factors) {
                total[(out, b)] += p.coeff * sg;
            }
        }
    }
    total
}

fn max_matrix_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn qubit_hamiltonian_matches_second_quantization() {
    let mut r = rng(11);
    for (ns, ne) in [(1, 2), (2, 2), (2, 1), (3, 2), (3, 4)] {
        let ham = random_hamiltonian(&mut r, ns, ne);
        let qubit = ham.qubit_hamiltonian().unwrap().to_matrix().unwrap();
        assert!(max_matrix_diff(&qubit, &dense_hamiltonian(&ham)) < 1e-12, "({ns},{ne})");
    }
    let ham = read_fcidump(fcidump_path("h2", "0.70")).unwrap();
    let qubit = ham.qubit_hamiltonian().unwrap().to_matrix().unwrap();
    assert!(max_matrix_diff(&qubit, &dense_hamiltonian(&ham)) < 1e-12);
}

#[test]
fn reference_energy_matches_closed_shell_formula() {
    let mut r = rng(12);
    for (ns, ne) in [(2, 2), (3, 2), (3, 4), (4, 4)] {
        let ham = random_hamiltonian(&mut r, ns, ne);
        let hf = StateVector::hartree_fock_reference(ham.n_qubits(), ne).unwrap();
        let e = hf.expectation(&ham.qubit_hamiltonian().unwrap()).unwrap() + ham.core_energy();
        assert!((e - closed_shell_energy(&ham)).abs() < 1e-12, "({ns},{ne})");
    }
}

#[test]
fn energies_match_external_reference() {
    for system in ["h2", "nah", "kh"] {
        for (label, hf_ref, exact_ref) in reference_energies(system) {
            let ham = read_fcidump(fcidump_path(system, &label)).unwrap();
            let hf = closed_shell_energy(&ham);
            let sol = solve_fci(&ham).unwrap();
            assert!((hf - hf_ref).abs() < 1e-9, "{system} {label}: hf {hf} vs {hf_ref}");
            assert!(
                (sol.energy - exact_ref).abs() < 1e-9,
                "{system} {label}: exact {} vs {exact_ref}",
                sol.energy
            );
        }
    }
}

#[test]
fn sector_solution_matches_independent_diagonalization() {
    let mut r = rng(13);
    for (ns, ne) in [(1, 1), (2, 1), (2, 2), (2, 3), (3, 2), (3, 3), (3, 4)] {
        let ham = random_hamiltonian(&mut r, ns, ne);
        let dense = dense_hamiltonian(&ham);
        let idx: Vec<usize> = (0..dense.nrows()).filter(|b| b.count_ones() as usize == ne).collect();
        let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| dense[(idx[i], idx[j])]);
        let lowest = block.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        let sol = solve_fci(&ham).unwrap();
        assert!((sol.energy - ham.core_energy() - lowest).abs() < 1e-10, "({ns},{ne})");

        // Eigen-residual and exact particle number.
        let v = to_dvector(&sol.ground_state);
        let resid = (&dense * &v - &v * Complex64::new(sol.energy - ham.core_energy(), 0.0)).norm();
        assert!(resid < 1e-8, "residual {resid}");
        assert!((sol.ground_state.number_expectation() - ne as f64).abs() < 1e-12);
        for s in &sol.degenerate_states {
            assert!(s.amplitudes().iter().enumerate().all(|(b, a)| a.norm() < 1e-14 || b.count_ones() as usize == ne));
        }
    }
}

#[test]
fn infidelity_conventions() {
    let ham = read_fcidump(fcidump_path("h2", "0.70")).unwrap();
    let sol = solve_fci(&ham).unwrap();
    assert!(infidelity_vs_fci(&sol.ground_state, &sol).unwrap().infidelity < 1e-12);
    // Wrong particle number is orthogonal to the whole ground sector.
    let outside = StateVector::basis_state(4, 0b0001).unwrap();
    assert!((infidelity_vs_fci(&outside, &sol).unwrap().infidelity - 1.0).abs() < 1e-12);
    assert!(infidelity_vs_fci(&StateVector::basis_state(2, 0).unwrap(), &sol).is_err());
}

#[test]
fn pool_exponentials_match_dense_oracle() {
    let mut r = rng(14);
    for (ns, ne) in [(2, 2), (3, 2), (3, 4)] {
        let pool = build_uccsd_pool(ns, ne).unwrap();
        let psi = random_state(&mut r, 2 * ns);
        for op in pool.operators() {
            let theta: f64 = rand::Rng::random_range(&mut r, -1.5..1.5);
            let tau = dense_fermionic(&op.fermionic);
            assert!(max_matrix_diff(&tau, &op.qubit_form.to_matrix().unwrap()) < 1e-12);
            let a = tau * Complex64::new(theta, 0.0);
            let want = if ns == 2 { expm(&a) * to_dvector(&psi) } else { expm_action(&a, &to_dvector(&psi)) };
            let got = psi.apply_pool_operator(&op.qubit_form, theta).unwrap();
            assert!(max_diff(got.amplitudes(), want.as_slice()) < 1e-10, "{}", op.description);
        }
    }
}

#[test]
fn prepared_states_match_ordered_product() {
    let mut r = rng(15);
    let pool = build_uccsd_pool(3, 2).unwrap();
    let mut ansatz = Ansatz::full_uccsd(&pool).unwrap();
    let thetas: Vec<f64> = (0..ansatz.len()).map(|_| rand::Rng::random_range(&mut r, -1.0..1.0)).collect();
    ansatz.set_thetas(&thetas).unwrap();
    let hf = StateVector::hartree_fock_reference(6, 2).unwrap();
    let mut want = to_dvector(&hf);
    for (e, th) in ansatz.elements().iter().zip(&thetas) {
        let tau = dense_fermionic(&pool.get(e.pool_id).unwrap().fermionic);
        want = expm_action(&(tau * Complex64::new(*th, 0.0)), &want);
    }
    let got = ansatz.prepare_state(&pool, &hf).unwrap();
    assert!(max_diff(got.amplitudes(), want.as_slice()) < 1e-10);
    let via_gates = ansatz.compile_circuit(&pool).unwrap().simulate(&hf).unwrap();
    assert!(max_diff(via_gates.amplitudes(), got.amplitudes()) < 1e-10);
}

#[test]
fn expm_helpers_agree() {
    let mut r = rng(16);
    let pool = build_uccsd_pool(2, 2).unwrap();
    let tau = dense_fermionic(&pool.operators()[1].fermionic) * Complex64::new(2.3, 0.0);
    let v = to_dvector(&random_state(&mut r, 4));
    let a = expm(&tau) * &v;
    let b = expm_action(&tau, &v);
    assert!((a - b).norm() < 1e-12);
}
