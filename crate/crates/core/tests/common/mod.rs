//! Independent reference implementations shared by the integration tests.
//! Nothing here goes through the crate's Pauli algebra or Jordan-Wigner code.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use vqebench::hamiltonian::MolecularHamiltonian;
use vqebench::statevector::StateVector;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn data_path(rel: &str) -> PathBuf {
    workspace_root().join("data").join(rel)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Annihilator on mode `p` in the occupation basis, with the sign counting
/// occupied modes below `p`.
pub fn annihilator(n: usize, p: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        if b >> p & 1 == 1 {
            let sign = if (b & ((1 << p) - 1)).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[(b ^ (1 << p), b)] = Complex64::new(sign, 0.0);
        }
    }
    m
}

pub fn creator(n: usize, p: usize) -> DMatrix<Complex64> {
    annihilator(n, p).adjoint()
}

/// Applies a ladder string (rightmost factor first) to basis state `b`.
/// Returns the sign and the resulting state, or `None` when it vanishes.
pub fn apply_ladders(mut b: usize, factors: &[(usize, bool)]) -> Option<(f64, usize)> {
    let mut sign = 1.0;
    for &(p, dagger) in factors.iter().rev() {
        let occupied = b >> p & 1 == 1;
        if occupied == dagger {
            return None;
        }
        if (b & ((1 << p) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        b ^= 1 << p;
    }
    Some((sign, b))
}

/// Second-quantized Hamiltonian (core excluded) assembled by acting with
/// ladder strings on occupation-number states, spin orbitals interleaved α, β.
pub fn dense_hamiltonian(ham: &MolecularHamiltonian) -> DMatrix<Complex64> {
    let n = 2 * ham.n_spatial();
    let dim = 1usize << n;
    let mut h = DMatrix::zeros(dim, dim);
    let spin = |p: usize| p % 2;
    let orb = |p: usize| p / 2;
    for b in 0..dim {
        for p in 0..n {
            for q in 0..n {
                if spin(p) != spin(q) {
                    continue;
                }
                if let Some((sg, out)) = apply_ladders(b, &[(p, true), (q, false)]) {
                    h[(out, b)] += Complex64::new(sg * ham.h1(orb(p), orb(q)), 0.0);
                }
            }
        }
        // ½ Σ (pr|qs) a†_p a†_q a_s a_r
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        if spin(p) != spin(r) || spin(q) != spin(s) {
                            continue;
                        }
                        if let Some((sg, out)) = apply_ladders(b, &[(p, true), (q, true), (s, false), (r, false)]) {
                            h[(out, b)] += Complex64::new(0.5 * sg * ham.h2(orb(p), orb(r), orb(q), orb(s)), 0.0);
                        }
                    }
                }
            }
        }
    }
    h
}

/// Closed-shell determinant energy, core included.
pub fn closed_shell_energy(ham: &MolecularHamiltonian) -> f64 {
    let occ = ham.n_electrons() / 2;
    let mut e = ham.core_energy();
    for i in 0..occ {
        e += 2.0 * ham.h1(i, i);
        for j in 0..occ {
            e += 2.0 * ham.h2(i, i, j, j) - ham.h2(i, j, j, i);
        }
    }
    e
}

/// Random real integrals with the full 8-fold symmetry.
pub fn random_hamiltonian(r: &mut StdRng, n_spatial: usize, n_electrons: usize) -> MolecularHamiltonian {
    let n = n_spatial;
    let mut h1 = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = r.random_range(-1.0..1.0);
            h1[i * n + j] = v;
            h1[j * n + i] = v;
        }
    }
    let mut h2 = vec![0.0; n * n * n * n];
    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if h2[idx(i, j, k, l)] != 0.0 {
                        continue;
                    }
                    let v = r.random_range(-0.5..0.5);
                    for (a, b, c, d) in [
                        (i, j, k, l),
                        (j, i, k, l),
                        (i, j, l, k),
                        (j, i, l, k),
                        (k, l, i, j),
                        (l, k, i, j),
                        (k, l, j, i),
                        (l, k, j, i),
                    ] {
                        h2[idx(a, b, c, d)] = v;
                    }
                }
            }
        }
    }
    let core = r.random_range(-1.0..1.0);
    MolecularHamiltonian::new(n_spatial, n_electrons, core, h1, h2).unwrap()
}

pub fn random_state(r: &mut StdRng, n_qubits: usize) -> StateVector {
    let mut amps: Vec<Complex64> = (0..1usize << n_qubits)
        .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(amps).unwrap()
}

/// `exp(A) v` by a Taylor series on `s` sub-steps with `‖A‖₁/s ≤ 1/2`.
pub fn expm_action(a: &DMatrix<Complex64>, v: &DVector<Complex64>) -> DVector<Complex64> {
    let norm1 = (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let steps = (2.0 * norm1).ceil().max(1.0) as usize;
    let a = a / Complex64::new(steps as f64, 0.0);
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut sum = out.clone();
        for k in 1..60 {
            term = &a * term / Complex64::new(k as f64, 0.0);
            sum += &term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        out = sum;
    }
    out
}

/// Dense `exp(A)` by scaling and squaring of a Taylor polynomial.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let norm1 = (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let dim = a.nrows();
    let mut sum = DMatrix::identity(dim, dim);
    let mut term = DMatrix::identity(dim, dim);
    for k in 1..30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn to_dvector(s: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(s.amplitudes())
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Reference energies written by the external generator: `label -> (hf, exact)`.
pub fn reference_energies(system: &str) -> Vec<(String, f64, f64)> {
    let text = std::fs::read_to_string(data_path(&format!("{system}/reference.csv"))).unwrap();
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

pub fn fcidump_path(system: &str, label: &str) -> PathBuf {
    data_path(&format!("{system}/{system}_{label}.fcidump"))
}
