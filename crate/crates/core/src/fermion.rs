//! Second-quantized ladder operators and their Jordan-Wigner image.
//!
//! Conventions: qubit value 1 means the spin orbital is occupied, and the
//! parity string runs over lower indices, so
//! `a_p† ↦ Z_0⋯Z_{p−1} (X_p − iY_p)/2` and `a_p ↦ Z_0⋯Z_{p−1} (X_p + iY_p)/2`.
//! Spin orbitals are interleaved: spatial orbital `m` owns `2m` (α) and `2m+1` (β).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm, PRUNE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LadderOp {
    pub mode: usize,
    pub dagger: bool,
}

impl LadderOp {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }
}

/// Ordered product of ladder operators with a scalar weight. Factor order is
/// kept exactly as given.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderProduct {
    pub factors: Vec<LadderOp>,
    pub coeff: Complex64,
}

impl LadderProduct {
    pub fn new(factors: Vec<LadderOp>, coeff: Complex64) -> Self {
        Self { factors, coeff }
    }

    /// `a_to† a_from`
    pub fn single(to: usize, from: usize, coeff: Complex64) -> Self {
        Self::new(vec![LadderOp::create(to), LadderOp::annihilate(from)], coeff)
    }

    /// `a_p† a_q† a_r a_s`
    pub fn double(p: usize, q: usize, r: usize, s: usize, coeff: Complex64) -> Self {
        Self::new(
            vec![
                LadderOp::create(p),
                LadderOp::create(q),
                LadderOp::annihilate(r),
                LadderOp::annihilate(s),
            ],
            coeff,
        )
    }

    pub fn adjoint(&self) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|f| LadderOp {
                    mode: f.mode,
                    dagger: !f.dagger,
                })
                .collect(),
            coeff: self.coeff.conj(),
        }
    }

    /// All creation operators precede all annihilation operators.
    pub fn is_excitation_ordered(&self) -> bool {
        let first_annihilator = self
            .factors
            .iter()
            .position(|f| !f.dagger)
            .unwrap_or(self.factors.len());
        self.factors[first_annihilator..].iter().all(|f| !f.dagger)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermionOperator {
    n_modes: usize,
    products: Vec<LadderProduct>,
}

impl FermionOperator {
    pub fn new(n_modes: usize) -> Self {
        Self {
            n_modes,
            products: Vec::new(),
        }
    }

    pub fn from_products(n_modes: usize, products: Vec<LadderProduct>) -> Result<Self> {
        let mut op = Self::new(n_modes);
        for p in products {
            op.push(p)?;
        }
        Ok(op)
    }

    pub fn push(&mut self, product: LadderProduct) -> Result<()> {
        if let Some(f) = product.factors.iter().find(|f| f.mode >= self.n_modes) {
            return Err(Error::Dimension {
                expected: self.n_modes,
                found: f.mode + 1,
            });
        }
        self.products.push(product);
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn products(&self) -> &[LadderProduct] {
        &self.products
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_modes: self.n_modes,
            products: self.products.iter().map(LadderProduct::adjoint).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            n_modes: self.n_modes,
            products: self
                .products
                .iter()
                .map(|p| LadderProduct::new(p.factors.clone(), p.coeff * factor))
                .collect(),
        }
    }

    pub fn add(&self, other: &FermionOperator) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::Dimension {
                expected: self.n_modes,
                found: other.n_modes,
            });
        }
        let mut out = self.clone();
        out.products.extend(other.products.iter().cloned());
        Ok(out)
    }

    /// `t − t†` for an excitation operator `t`.
    pub fn anti_hermitian_pair(&self) -> Result<Self> {
        if let Some(bad) = self.products.iter().find(|p| !p.is_excitation_ordered()) {
            return Err(Error::contract(format!(
                "not an excitation operator: {:?}",
                bad.factors
            )));
        }
        self.add(&self.adjoint().scale(Complex64::new(-1.0, 0.0)))
    }
}

/// Jordan-Wigner image of a single ladder operator on `n_qubits` qubits.
pub fn ladder_image(n_qubits: usize, mode: usize, dagger: bool) -> Result<PauliSum> {
    if mode >= n_qubits {
        return Err(Error::Dimension {
            expected: n_qubits,
            found: mode + 1,
        });
    }
    let parity = (1u64 << mode) - 1;
    let bit = 1u64 << mode;
    let y_sign = if dagger { -0.5 } else { 0.5 };
    PauliSum::from_terms(
        n_qubits,
        [
            PauliTerm::new(n_qubits, bit, parity, Complex64::new(0.5, 0.0))?,
            PauliTerm::new(n_qubits, bit, parity | bit, Complex64::new(0.0, y_sign))?,
        ],
    )
}

/// Maps a fermionic operator through an arbitrary per-ladder image. Exposed so
/// alternative (e.g. deliberately broken) transforms can be checked with the
/// same machinery as the real one.
pub fn map_with<F>(op: &FermionOperator, image: F) -> Result<PauliSum>
where
    F: Fn(usize, usize, bool) -> Result<PauliSum>,
{
    let n = op.n_modes();
    let mut cache: Vec<[Option<PauliSum>; 2]> = vec![[None, None]; n];
    let mut total = PauliSum::zero(n);
    for product in op.products() {
        let mut acc = PauliSum::identity(n, product.coeff);
        for f in &product.factors {
            let slot = &mut cache[f.mode][usize::from(f.dagger)];
            if slot.is_none() {
                *slot = Some(image(n, f.mode, f.dagger)?);
            }
            acc = acc.multiply(slot.as_ref().unwrap())?;
            if acc.is_empty() {
                break;
            }
        }
        total = total.add(&acc)?;
    }
    Ok(total)
}

pub fn jordan_wigner(op: &FermionOperator) -> Result<PauliSum> {
    map_with(op, ladder_image)
}

/// Checks `{a_p, a_q†} = δ_pq` and `{a_p, a_q} = 0` for all `p, q < n`
/// under the Jordan-Wigner images.
pub fn verify_car(n: usize) -> bool {
    verify_car_with(n, ladder_image)
}

pub fn verify_car_with<F>(n: usize, image: F) -> bool
where
    F: Fn(usize, usize, bool) -> Result<PauliSum>,
{
    let mut ann = Vec::with_capacity(n);
    let mut cre = Vec::with_capacity(n);
    for p in 0..n {
        match (image(n, p, false), image(n, p, true)) {
            (Ok(a), Ok(c)) => {
                ann.push(a);
                cre.push(c);
            }
            _ => return false,
        }
    }
    let id = PauliSum::identity(n, Complex64::new(1.0, 0.0));
    let zero = PauliSum::zero(n);
    for p in 0..n {
        for q in 0..n {
            let (Ok(mixed), Ok(same)) = (ann[p].anticommutator(&cre[q]), ann[p].anticommutator(&ann[q]))
            else {
                return false;
            };
            let want = if p == q { &id } else { &zero };
            if mixed.max_abs_diff(want) > PRUNE_TOL || same.max_abs_diff(&zero) > PRUNE_TOL {
                return false;
            }
        }
    }
    true
}
