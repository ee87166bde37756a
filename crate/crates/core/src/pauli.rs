//! Symplectic Pauli-string algebra.
//!
//! A Pauli string on `n` qubits is stored as a pair of bit masks: bit `q` of
//! `x_mask` marks an X factor on qubit `q`, bit `q` of `z_mask` a Z factor,
//! and both bits together mark a Y. The string itself is always the
//! Hermitian tensor product (`Y`, not `XZ`), so any phase lives in the
//! complex coefficient. Qubit 0 is the least-significant bit of basis-state
//! indices.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with modulus below this are dropped after every add/multiply.
pub const PRUNE_TOL: f64 = 1e-12;

/// Default cap on the qubit count accepted by [`PauliSum::to_matrix`].
pub const DENSE_QUBIT_CAP: usize = 12;

/// Masks are `u64`, which bounds the register width.
pub const MAX_QUBITS: usize = 64;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

fn width_mask(n_qubits: usize) -> u64 {
    if n_qubits >= 64 {
        u64::MAX
    } else {
        (1u64 << n_qubits) - 1
    }
}

/// `i^k` for `k` taken mod 4.
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

/// Power of `i` picked up by the product of the Hermitian strings
/// `(x1, z1)·(x2, z2)`, expressed relative to the Hermitian string of the
/// XOR'd masks.
///
/// With `P(x, z) = i^{|x∧z|} X^x Z^z` and `Z^z X^x = (-1)^{|z∧x|} X^x Z^z`
/// the product is `i^{|x1∧z1| + |x2∧z2| + 2|z1∧x2| − |x3∧z3|} P(x3, z3)`.
fn product_phase(x1: u64, z1: u64, x2: u64, z2: u64) -> u32 {
    let x3 = x1 ^ x2;
    let z3 = z1 ^ z2;
    let k = (x1 & z1).count_ones() as i64
        + (x2 & z2).count_ones() as i64
        + 2 * (z1 & x2).count_ones() as i64
        - (x3 & z3).count_ones() as i64;
    k.rem_euclid(4) as u32
}

/// A single weighted Pauli string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
    coeff: Complex64,
}

impl PauliTerm {
    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64, coeff: Complex64) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                what: "qubits",
                requested: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        let outside = !width_mask(n_qubits);
        if (x_mask | z_mask) & outside != 0 {
            return Err(Error::contract(format!(
                "mask bits set beyond qubit {}",
                n_qubits
            )));
        }
        Ok(Self {
            n_qubits,
            x_mask,
            z_mask,
            coeff,
        })
    }

    pub fn identity(n_qubits: usize, coeff: Complex64) -> Self {
        Self {
            n_qubits,
            x_mask: 0,
            z_mask: 0,
            coeff,
        }
    }

    /// Builds a term from `(qubit, Pauli)` factors. Repeated qubits are an error.
    pub fn from_factors(
        n_qubits: usize,
        factors: &[(usize, Pauli)],
        coeff: Complex64,
    ) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        for &(q, p) in factors {
            if q >= n_qubits {
                return Err(Error::Dimension {
                    expected: n_qubits,
                    found: q + 1,
                });
            }
            let bit = 1u64 << q;
            if (x | z) & bit != 0 {
                return Err(Error::contract(format!("qubit {q} appears twice")));
            }
            let (bx, bz) = p.bits();
            if bx {
                x |= bit;
            }
            if bz {
                z |= bit;
            }
        }
        Self::new(n_qubits, x, z, coeff)
    }

    /// Parses a label such as `"X0 Z1 Y3"` (or `"I"` for the identity).
    pub fn from_label(n_qubits: usize, label: &str, coeff: Complex64) -> Result<Self> {
        let mut factors = Vec::new();
        for tok in label.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let p = match chars.next() {
                Some('X') => Pauli::X,
                Some('Y') => Pauli::Y,
                Some('Z') => Pauli::Z,
                _ => return Err(Error::contract(format!("bad Pauli factor '{tok}'"))),
            };
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::contract(format!("bad qubit index in '{tok}'")))?;
            factors.push((q, p));
        }
        Self::from_factors(n_qubits, &factors, coeff)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    pub fn with_coeff(self, coeff: Complex64) -> Self {
        Self { coeff, ..self }
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    pub fn support(&self) -> u64 {
        self.x_mask | self.z_mask
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn pauli_at(&self, qubit: usize) -> Pauli {
        let bit = 1u64 << qubit;
        Pauli::from_bits(self.x_mask & bit != 0, self.z_mask & bit != 0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.coeff.im.abs() <= PRUNE_TOL
    }

    pub fn commutes_with(&self, other: &PauliTerm) -> bool {
        let k = (self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones();
        k.is_multiple_of(2)
    }

    /// Operator product `self · other`.
    pub fn multiply(&self, other: &PauliTerm) -> Result<PauliTerm> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(self.multiply_unchecked(other))
    }

    fn multiply_unchecked(&self, other: &PauliTerm) -> PauliTerm {
        let phase = product_phase(self.x_mask, self.z_mask, other.x_mask, other.z_mask);
        PauliTerm {
            n_qubits: self.n_qubits,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
            coeff: self.coeff * other.coeff * i_pow(phase),
        }
    }

    /// Label without the coefficient, e.g. `"X0 Z1"`; the identity renders as `"I"`.
    pub fn label(&self) -> String {
        if self.is_identity() {
            return "I".to_string();
        }
        (0..self.n_qubits)
            .filter(|&q| self.support() >> q & 1 == 1)
            .map(|q| format!("{}{}", self.pauli_at(q).symbol(), q))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub(crate) fn format_complex(c: Complex64) -> String {
    let sign = if c.im.is_sign_negative() && c.im != 0.0 {
        '-'
    } else {
        '+'
    };
    format!("({}{}{}i)", c.re + 0.0, sign, c.im.abs())
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", format_complex(self.coeff), self.label())
    }
}

/// Linear combination of Pauli strings. Keys are `(z_mask, x_mask)`, so
/// iteration order is the canonical rendering order.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<(u64, u64), Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: Complex64) -> Self {
        let mut s = Self::zero(n_qubits);
        s.accumulate(0, 0, coeff);
        s.prune();
        s
    }

    pub fn from_terms<I: IntoIterator<Item = PauliTerm>>(n_qubits: usize, terms: I) -> Result<Self> {
        let mut s = Self::zero(n_qubits);
        for t in terms {
            s.add_term(t)?;
        }
        s.prune();
        Ok(s)
    }

    /// Convenience constructor from `(label, coefficient)` pairs.
    pub fn from_labels(n_qubits: usize, items: &[(&str, Complex64)]) -> Result<Self> {
        let terms = items
            .iter()
            .map(|(l, c)| PauliTerm::from_label(n_qubits, l, *c))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n_qubits, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored terms other than the identity.
    pub fn non_identity_len(&self) -> usize {
        self.terms.len() - usize::from(self.terms.contains_key(&(0, 0)))
    }

    pub fn coefficient(&self, term: &PauliTerm) -> Complex64 {
        self.terms
            .get(&(term.z_mask, term.x_mask))
            .copied()
            .unwrap_or_default()
    }

    pub fn identity_coefficient(&self) -> Complex64 {
        self.terms.get(&(0, 0)).copied().unwrap_or_default()
    }

    /// Terms in canonical `(z_mask, x_mask)` order.
    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(move |(&(z, x), &c)| PauliTerm {
            n_qubits: self.n_qubits,
            x_mask: x,
            z_mask: z,
            coeff: c,
        })
    }

    fn accumulate(&mut self, x: u64, z: u64, c: Complex64) {
        *self.terms.entry((z, x)).or_default() += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    fn check_width(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: n,
            });
        }
        Ok(())
    }

    pub fn add_term(&mut self, t: PauliTerm) -> Result<()> {
        self.check_width(t.n_qubits)?;
        self.accumulate(t.x_mask, t.z_mask, t.coeff);
        self.prune();
        Ok(())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_width(other.n_qubits)?;
        let mut out = self.clone();
        for (&(z, x), &c) in &other.terms {
            out.accumulate(x, z, c);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_width(other.n_qubits)?;
        let mut out = PauliSum::zero(self.n_qubits);
        for a in self.terms() {
            for b in other.terms() {
                let p = a.multiply_unchecked(&b);
                out.accumulate(p.x_mask, p.z_mask, p.coeff);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `self·other − other·self`. Anticommuting string pairs contribute
    /// `2·a·b`; commuting pairs cancel and are skipped.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_width(other.n_qubits)?;
        let mut out = PauliSum::zero(self.n_qubits);
        for a in self.terms() {
            for b in other.terms() {
                if a.commutes_with(&b) {
                    continue;
                }
                let p = a.multiply_unchecked(&b);
                out.accumulate(p.x_mask, p.z_mask, 2.0 * p.coeff);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `self·other + other·self`.
    pub fn anticommutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_width(other.n_qubits)?;
        let mut out = PauliSum::zero(self.n_qubits);
        for a in self.terms() {
            for b in other.terms() {
                if !a.commutes_with(&b) {
                    continue;
                }
                let p = a.multiply_unchecked(&b);
                out.accumulate(p.x_mask, p.z_mask, 2.0 * p.coeff);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Hermitian conjugate. Strings are Hermitian, so only coefficients conjugate.
    pub fn adjoint(&self) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.conj();
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.im.abs() <= PRUNE_TOL)
    }

    pub fn is_anti_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.re.abs() <= PRUNE_TOL)
    }

    /// True when every pair of stored strings commutes.
    pub fn terms_mutually_commute(&self) -> bool {
        let ts: Vec<PauliTerm> = self.terms().collect();
        ts.iter()
            .enumerate()
            .all(|(i, a)| ts[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    /// Max-norm distance between coefficient maps.
    pub fn max_abs_diff(&self, other: &PauliSum) -> f64 {
        let mut keys: Vec<&(u64, u64)> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|k| {
                let a = self.terms.get(k).copied().unwrap_or_default();
                let b = other.terms.get(k).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.to_matrix_capped(DENSE_QUBIT_CAP)
    }

    pub fn to_matrix_capped(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > cap {
            return Err(Error::ResourceLimit {
                what: "dense matrix qubits",
                requested: self.n_qubits,
                cap,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in self.terms() {
            let base = t.coeff * i_pow((t.x_mask & t.z_mask).count_ones());
            for col in 0..dim {
                let row = col ^ t.x_mask as usize;
                let sign = if (t.z_mask & col as u64).count_ones() % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                m[(row, col)] += base * sign;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self.terms().map(|t| t.to_string()).collect();
        write!(f, "{}", rendered.join(" + "))
    }
}
