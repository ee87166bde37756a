//! Singlet-adapted UCCSD operator pool and product-form ansatze.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::circuit::GateCircuit;
use crate::error::{Error, Result};
use crate::fermion::{jordan_wigner, FermionOperator, LadderProduct};
use crate::pauli::{PauliSum, PRUNE_TOL};
use crate::statevector::StateVector;

/// One candidate generator `τ = T − T†` together with its qubit image.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolOperator {
    pub id: usize,
    pub fermionic: FermionOperator,
    pub qubit_form: PauliSum,
    pub description: String,
}

impl PoolOperator {
    fn from_excitation(id: usize, t: FermionOperator, description: String) -> Result<Self> {
        let fermionic = t.anti_hermitian_pair()?;
        let qubit_form = jordan_wigner(&fermionic)?;
        StateVector::check_pool_generator(&qubit_form)?;
        Ok(Self {
            id,
            fermionic,
            qubit_form,
            description,
        })
    }
}

/// An ordered, immutable set of pool operators over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Pool {
    n_qubits: usize,
    operators: Vec<PoolOperator>,
}

impl Pool {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn operators(&self) -> &[PoolOperator] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&PoolOperator> {
        self.operators.get(id)
    }
}

fn spin_orbital(spatial: usize, beta: bool) -> usize {
    2 * spatial + usize::from(beta)
}

/// `a_p† a_q† a_r a_s` brought to `p > q`, `r > s` with the reordering sign.
/// Returns `None` when the product vanishes identically.
fn canonical_double(p: usize, q: usize, r: usize, s: usize) -> Option<((usize, usize, usize, usize), f64)> {
    if p == q || r == s {
        return None;
    }
    let mut sign = 1.0;
    let (p, q) = if p > q { (p, q) } else { sign = -sign; (q, p) };
    let (r, s) = if r > s { (r, s) } else { sign = -sign; (s, r) };
    Some(((p, q, r, s), sign))
}

/// Spin-free double `E_ai E_bj` in normal order: `Σ_στ a_{aσ}† a_{bτ}† a_{jτ} a_{iσ}`.
fn add_spin_free_double(
    acc: &mut BTreeMap<(usize, usize, usize, usize), f64>,
    i: usize,
    a: usize,
    j: usize,
    b: usize,
) {
    for sigma in [false, true] {
        for tau in [false, true] {
            let (p, q) = (spin_orbital(a, sigma), spin_orbital(b, tau));
            let (r, s) = (spin_orbital(j, tau), spin_orbital(i, sigma));
            if let Some((key, sign)) = canonical_double(p, q, r, s) {
                *acc.entry(key).or_default() += sign;
            }
        }
    }
}

/// A spin-orbital double `(p, q, r, s)` and its coefficient.
type Channel = ((usize, usize, usize, usize), f64);

/// Splits spin-orbital channels into groups whose JW strings mutually commute,
/// placing each channel in the first group that still commutes.
fn commuting_groups(
    n_modes: usize,
    channels: Vec<Channel>,
) -> Result<Vec<Vec<Channel>>> {
    let tau_of = |chs: &[Channel]| -> Result<PauliSum> {
        let products = chs
            .iter()
            .map(|&((p, q, r, s), c)| LadderProduct::double(p, q, r, s, Complex64::new(c, 0.0)))
            .collect();
        jordan_wigner(&FermionOperator::from_products(n_modes, products)?.anti_hermitian_pair()?)
    };
    let mut groups: Vec<Vec<Channel>> = Vec::new();
    for ch in channels {
        let mut placed = false;
        for g in groups.iter_mut() {
            let mut trial = g.clone();
            trial.push(ch);
            if tau_of(&trial)?.terms_mutually_commute() {
                *g = trial;
                placed = true;
                break;
            }
        }
        if !placed {
            groups.push(vec![ch]);
        }
    }
    Ok(groups)
}

/// Singlet-adapted UCCSD pool over a closed-shell reference.
///
/// Singles share one amplitude across both spin channels. Each double over
/// spatial indices `i ≤ j` (occupied), `a ≤ b` (virtual) is the normal-ordered
/// spin-free excitation `E_ai E_bj + E_bi E_aj`, rescaled to unit largest
/// coefficient. Where its spin channels do not yield mutually commuting JW
/// strings, it is split into commuting components.
pub fn build_uccsd_pool(n_spatial: usize, n_electrons: usize) -> Result<Pool> {
    if !n_electrons.is_multiple_of(2) {
        return Err(Error::UnsupportedReference(format!(
            "{n_electrons} electrons: only closed-shell references are supported"
        )));
    }
    if n_electrons > 2 * n_spatial {
        return Err(Error::UnsupportedReference(format!(
            "{n_electrons} electrons exceed {n_spatial} spatial orbitals"
        )));
    }
    let n_modes = 2 * n_spatial;
    let n_occ = n_electrons / 2;
    let occ: Vec<usize> = (0..n_occ).collect();
    let virt: Vec<usize> = (n_occ..n_spatial).collect();
    let one = Complex64::new(1.0, 0.0);

    let mut ops: Vec<PoolOperator> = Vec::new();
    let mut seen: Vec<PauliSum> = Vec::new();
    let mut push = |t: FermionOperator, description: String, ops: &mut Vec<PoolOperator>| -> Result<()> {
        let op = PoolOperator::from_excitation(ops.len(), t, description)?;
        if op.qubit_form.is_empty() || seen.iter().any(|s| s.max_abs_diff(&op.qubit_form) <= PRUNE_TOL) {
            return Ok(());
        }
        seen.push(op.qubit_form.clone());
        ops.push(op);
        Ok(())
    };

    for &i in &occ {
        for &a in &virt {
            let t = FermionOperator::from_products(
                n_modes,
                vec![
                    LadderProduct::single(spin_orbital(a, false), spin_orbital(i, false), one),
                    LadderProduct::single(spin_orbital(a, true), spin_orbital(i, true), one),
                ],
            )?;
            push(t, format!("single {i}->{a} (singlet)"), &mut ops)?;
        }
    }

    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x..] {
            for (y, &a) in virt.iter().enumerate() {
                for &b in &virt[y..] {
                    let mut acc = BTreeMap::new();
                    add_spin_free_double(&mut acc, i, a, j, b);
                    add_spin_free_double(&mut acc, i, b, j, a);
                    let scale = acc.values().fold(0.0f64, |m, v| m.max(v.abs()));
                    let channels: Vec<_> = acc
                        .into_iter()
                        .filter(|(_, v)| v.abs() > PRUNE_TOL)
                        .map(|(k, v)| (k, v / scale))
                        .collect();
                    if channels.is_empty() {
                        continue;
                    }
                    let groups = commuting_groups(n_modes, channels)?;
                    let split = groups.len() > 1;
                    for (g, group) in groups.into_iter().enumerate() {
                        let products = group
                            .iter()
                            .map(|&((p, q, r, s), c)| LadderProduct::double(p, q, r, s, Complex64::new(c, 0.0)))
                            .collect();
                        let t = FermionOperator::from_products(n_modes, products)?;
                        let description = if split {
                            format!("double {i}{j}->{a}{b} (singlet, component {g})")
                        } else {
                            format!("double {i}{j}->{a}{b} (singlet)")
                        };
                        push(t, description, &mut ops)?;
                    }
                }
            }
        }
    }

    Ok(Pool {
        n_qubits: n_modes,
        operators: ops,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzElement {
    pub pool_id: usize,
    pub theta: f64,
}

/// Product-form ansatz `∏ exp(θ_k τ_k)`; the first element acts first on the
/// reference.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ansatz {
    elements: Vec<AnsatzElement>,
}

impl Ansatz {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_elements(pool: &Pool, elements: Vec<AnsatzElement>) -> Result<Self> {
        let a = Self { elements };
        a.validate(pool)?;
        Ok(a)
    }

    /// Every pool operator once, in pool order, all parameters zero.
    pub fn full_uccsd(pool: &Pool) -> Result<Self> {
        if pool.is_empty() {
            return Err(Error::contract("full UCCSD ansatz needs a non-empty pool"));
        }
        Ok(Self {
            elements: (0..pool.len())
                .map(|pool_id| AnsatzElement { pool_id, theta: 0.0 })
                .collect(),
        })
    }

    pub fn validate(&self, pool: &Pool) -> Result<()> {
        match self.elements.iter().find(|e| e.pool_id >= pool.len()) {
            Some(e) => Err(Error::contract(format!(
                "pool id {} out of range for pool of {}",
                e.pool_id,
                pool.len()
            ))),
            None => Ok(()),
        }
    }

    pub fn elements(&self) -> &[AnsatzElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn push(&mut self, pool_id: usize, theta: f64) {
        self.elements.push(AnsatzElement { pool_id, theta });
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.theta).collect()
    }

    pub fn set_thetas(&mut self, thetas: &[f64]) -> Result<()> {
        if thetas.len() != self.elements.len() {
            return Err(Error::Dimension {
                expected: self.elements.len(),
                found: thetas.len(),
            });
        }
        for (e, &t) in self.elements.iter_mut().zip(thetas) {
            e.theta = t;
        }
        Ok(())
    }

    pub fn prepare_state(&self, pool: &Pool, reference: &StateVector) -> Result<StateVector> {
        self.validate(pool)?;
        if reference.n_qubits() != pool.n_qubits() {
            return Err(Error::Dimension {
                expected: pool.n_qubits(),
                found: reference.n_qubits(),
            });
        }
        let mut state = reference.clone();
        for e in &self.elements {
            state.apply_generator_in_place(&pool.operators[e.pool_id].qubit_form, e.theta);
        }
        Ok(state)
    }

    /// Same as [`Ansatz::prepare_state`] with the parameters overridden.
    pub fn prepare_with(&self, pool: &Pool, reference: &StateVector, thetas: &[f64]) -> Result<StateVector> {
        let mut a = self.clone();
        a.set_thetas(thetas)?;
        a.prepare_state(pool, reference)
    }

    pub fn compile_circuit(&self, pool: &Pool) -> Result<GateCircuit> {
        self.validate(pool)?;
        let mut circuit = GateCircuit::new(pool.n_qubits());
        for e in &self.elements {
            circuit.append_generator(&pool.operators[e.pool_id].qubit_form, e.theta);
        }
        Ok(circuit)
    }
}
