//! Dense statevector simulation of Pauli-string exponentials.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{i_pow, PauliSum, PauliTerm, PRUNE_TOL};

/// Register width accepted by [`StateVector`].
pub const MAX_STATE_QUBITS: usize = 24;

const NORM_TOL: f64 = 1e-10;

#[inline]
fn parity_sign(mask: u64, basis: usize) -> f64 {
    if (mask & basis as u64).count_ones() % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_STATE_QUBITS {
            return Err(Error::ResourceLimit {
                what: "statevector qubits",
                requested: n_qubits,
                cap: MAX_STATE_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Dimension {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes; they must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::contract(format!("length {dim} is not a power of two")));
        }
        let s = Self {
            n_qubits: dim.trailing_zeros() as usize,
            amps,
        };
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::contract(format!("state not normalized (norm {norm})")));
        }
        Ok(s)
    }

    /// Occupation-number reference with qubits `0..n_electrons` set.
    pub fn hartree_fock_reference(n_qubits: usize, n_electrons: usize) -> Result<Self> {
        if n_electrons > n_qubits {
            return Err(Error::contract(format!(
                "{n_electrons} electrons do not fit in {n_qubits} spin orbitals"
            )));
        }
        Self::basis_state(n_qubits, (1usize << n_electrons) - 1)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_same_width(&self, other: &StateVector) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(())
    }

    fn check_operator_width(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: n,
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_width(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `⟨N̂⟩` in the occupation-number convention.
    pub fn number_expectation(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(b, a)| a.norm_sqr() * b.count_ones() as f64)
            .sum()
    }

    /// In-place `exp(i·angle·P)` for the Hermitian string with masks `(x, z)`.
    pub(crate) fn rotate_in_place(&mut self, x: u64, z: u64, angle: f64) {
        let (sin, cos) = angle.sin_cos();
        let isin = Complex64::new(0.0, sin);
        let base = i_pow((x & z).count_ones());
        let xs = x as usize;
        if xs == 0 {
            // Diagonal string: each amplitude picks up exp(±i·angle).
            for (b, a) in self.amps.iter_mut().enumerate() {
                let p = base * parity_sign(z, b);
                *a *= Complex64::new(cos, 0.0) + isin * p;
            }
            return;
        }
        for b in 0..self.amps.len() {
            let partner = b ^ xs;
            if partner < b {
                continue;
            }
            let (sb, sp) = (self.amps[b], self.amps[partner]);
            // (P s)[b] = base·sign(partner)·s[partner], and symmetrically.
            let pb = base * parity_sign(z, partner) * sp;
            let pp = base * parity_sign(z, b) * sb;
            self.amps[b] = sb * cos + isin * pb;
            self.amps[partner] = sp * cos + isin * pp;
        }
    }

    /// `exp(i·angle·P)|self⟩` for a unit-coefficient Hermitian string.
    pub fn apply_pauli_exponential(&self, p: &PauliTerm, angle: f64) -> Result<StateVector> {
        self.check_operator_width(p.n_qubits())?;
        if (p.coeff() - Complex64::new(1.0, 0.0)).norm() > PRUNE_TOL {
            return Err(Error::contract(format!(
                "exponent string must carry unit real coefficient, got {}",
                p.coeff()
            )));
        }
        let mut out = self.clone();
        out.rotate_in_place(p.x_mask(), p.z_mask(), angle);
        Ok(out)
    }

    pub(crate) fn check_pool_generator(tau: &PauliSum) -> Result<()> {
        if !tau.is_anti_hermitian() {
            return Err(Error::contract("generator is not anti-Hermitian"));
        }
        if !tau.terms_mutually_commute() {
            return Err(Error::contract("generator strings do not mutually commute"));
        }
        Ok(())
    }

    /// Applies `exp(θ·τ)` term by term in canonical order, assuming the
    /// generator was already validated.
    pub(crate) fn apply_generator_in_place(&mut self, tau: &PauliSum, theta: f64) {
        for t in tau.terms() {
            // τ term = i·a·P, so exp(θ·i·a·P) rotates by θ·a.
            self.rotate_in_place(t.x_mask(), t.z_mask(), theta * t.coeff().im);
        }
    }

    /// `exp(θ·τ)|self⟩` for an anti-Hermitian generator with mutually
    /// commuting strings.
    pub fn apply_pool_operator(&self, tau: &PauliSum, theta: f64) -> Result<StateVector> {
        self.check_operator_width(tau.n_qubits())?;
        Self::check_pool_generator(tau)?;
        let mut out = self.clone();
        out.apply_generator_in_place(tau, theta);
        Ok(out)
    }

    /// `O|self⟩` for an arbitrary Pauli sum (result is generally unnormalized).
    pub fn apply_sum(&self, o: &PauliSum) -> Result<Vec<Complex64>> {
        self.check_operator_width(o.n_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for t in o.terms() {
            let base = t.coeff() * i_pow((t.x_mask() & t.z_mask()).count_ones());
            let xs = t.x_mask() as usize;
            for (b, a) in self.amps.iter().enumerate() {
                out[b ^ xs] += base * parity_sign(t.z_mask(), b) * a;
            }
        }
        Ok(out)
    }

    /// `⟨self|O|self⟩` without the Hermiticity check; returns the full complex value.
    pub(crate) fn expectation_complex(&self, o: &PauliSum) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for t in o.terms() {
            let base = t.coeff() * i_pow((t.x_mask() & t.z_mask()).count_ones());
            let xs = t.x_mask() as usize;
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, a) in self.amps.iter().enumerate() {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                acc += self.amps[b ^ xs].conj() * a * parity_sign(t.z_mask(), b);
            }
            total += base * acc;
        }
        total
    }

    /// `⟨self|O|self⟩` for Hermitian `O`.
    pub fn expectation(&self, o: &PauliSum) -> Result<f64> {
        self.check_operator_width(o.n_qubits())?;
        if !o.is_hermitian() {
            return Err(Error::contract("expectation requires a Hermitian operator"));
        }
        let v = self.expectation_complex(o);
        if v.im.abs() >= NORM_TOL {
            return Err(Error::Invariant(format!(
                "expectation of Hermitian operator has imaginary part {}",
                v.im
            )));
        }
        Ok(v.re)
    }

    /// `1 − |⟨reference|self⟩|`, clamped to `[0, 1]`.
    pub fn infidelity(&self, reference: &StateVector) -> Result<f64> {
        let overlap = reference.inner(self)?.norm();
        Ok((1.0 - overlap).clamp(0.0, 1.0))
    }
}
