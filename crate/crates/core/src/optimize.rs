//! Classical optimizers over an energy objective: Nelder-Mead and L-BFGS with
//! central finite-difference gradients. Every objective call is counted.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const DEFAULT_TOL_REL_ENERGY: f64 = 1e-6;
pub const DEFAULT_MAX_EVALUATIONS: usize = 100_000;

const NM_INITIAL_STEP: f64 = 0.1;
const LBFGS_MEMORY: usize = 10;
const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK_SHRINK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 40;
const GRAD_INF_TOL: f64 = 1e-8;

/// Relative-energy test shared by both optimizers.
fn within_rel_tol(delta: f64, reference: f64, tol: f64) -> bool {
    delta.abs() <= tol * reference.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    NelderMead,
    Lbfgs,
}

impl OptimizerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerKind::NelderMead => "nelder_mead",
            OptimizerKind::Lbfgs => "lbfgs",
        }
    }

    pub fn is_gradient_based(self) -> bool {
        matches!(self, OptimizerKind::Lbfgs)
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nm" | "nelder_mead" | "nelder-mead" | "neldermead" => Ok(OptimizerKind::NelderMead),
            "lbfgs" | "l-bfgs" | "l_bfgs" => Ok(OptimizerKind::Lbfgs),
            other => Err(Error::Config(format!("unknown optimizer '{other}'"))),
        }
    }
}

type EnergyFn<'a> = Box<dyn FnMut(&[f64]) -> f64 + 'a>;

/// Energy as a function of the parameter vector, with an evaluation counter.
pub struct Objective<'a> {
    dimension: usize,
    func: EnergyFn<'a>,
    evaluations: usize,
}

impl<'a> Objective<'a> {
    pub fn new(dimension: usize, func: impl FnMut(&[f64]) -> f64 + 'a) -> Self {
        Self {
            dimension,
            func: Box::new(func),
            evaluations: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn eval(&mut self, theta: &[f64]) -> f64 {
        debug_assert_eq!(theta.len(), self.dimension);
        self.evaluations += 1;
        (self.func)(theta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub theta_opt: Vec<f64>,
    pub energy: f64,
    pub n_energy_evals: usize,
    pub n_gradient_evals: usize,
    pub converged: bool,
    /// Best (Nelder-Mead) or accepted (L-BFGS) energy per iteration, starting
    /// with the initial point.
    pub trace: Vec<f64>,
}

/// Central differences: component `k` is `(E(θ+h e_k) − E(θ−h e_k)) / 2h`.
pub fn central_difference_gradient(obj: &mut Objective<'_>, theta: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut probe = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            probe[k] = theta[k] + h;
            let plus = obj.eval(&probe);
            probe[k] = theta[k] - h;
            let minus = obj.eval(&probe);
            probe[k] = theta[k];
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

fn check_start(obj: &Objective<'_>, theta0: &[f64]) -> Result<()> {
    if theta0.is_empty() {
        return Err(Error::contract("optimization needs at least one parameter"));
    }
    if theta0.len() != obj.dimension() {
        return Err(Error::Dimension {
            expected: obj.dimension(),
            found: theta0.len(),
        });
    }
    Ok(())
}

fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Nelder-Mead with coefficients reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5 and an initial simplex of 0.1 rad steps along each axis.
/// Stops when the vertex spread is within `tol_rel_energy * |f_best|`, so an
/// objective whose minimum is exactly zero never meets the test.
///
/// A collapsed simplex can meet the spread test away from the minimum, so on
/// convergence the search restarts from the best vertex with a fresh simplex
/// and stops once a restart no longer improves by more than the tolerance.
pub fn minimize_nelder_mead(
    obj: &mut Objective<'_>,
    theta0: &[f64],
    tol_rel_energy: f64,
    max_evaluations: usize,
) -> Result<OptimizationResult> {
    check_start(obj, theta0)?;
    let start_evals = obj.evaluations();
    let mut trace = Vec::new();
    let mut start = (theta0.to_vec(), obj.eval(theta0));
    trace.push(start.1);
    let mut converged;
    loop {
        let budget = max_evaluations.saturating_sub(obj.evaluations() - start_evals);
        let previous = start.1;
        let (best, ok) = nelder_mead_pass(obj, start, tol_rel_energy, budget, &mut trace);
        converged = ok;
        let improved = !within_rel_tol(previous - best.1, best.1, tol_rel_energy);
        start = best;
        if !converged || !improved {
            break;
        }
    }
    let (theta_opt, energy) = start;
    Ok(OptimizationResult {
        theta_opt,
        energy,
        n_energy_evals: obj.evaluations() - start_evals,
        n_gradient_evals: 0,
        converged,
        trace,
    })
}

/// One simplex search from an already evaluated start; returns the best vertex
/// and whether the spread test was met within `budget` evaluations.
fn nelder_mead_pass(
    obj: &mut Objective<'_>,
    start: (Vec<f64>, f64),
    tol_rel_energy: f64,
    budget: usize,
    trace: &mut Vec<f64>,
) -> ((Vec<f64>, f64), bool) {
    let start_evals = obj.evaluations();
    let used = |obj: &Objective<'_>| obj.evaluations() - start_evals;
    let n = start.0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    for k in 0..n {
        if used(obj) >= budget {
            return (start, false);
        }
        let mut v = start.0.clone();
        v[k] += NM_INITIAL_STEP;
        let f = obj.eval(&v);
        simplex.push((v, f));
    }
    simplex.insert(0, start);

    let mut converged = false;
    loop {
        // Stable sort keeps ties in insertion order.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        trace.push(best);
        if within_rel_tol(worst - best, best, tol_rel_energy) {
            converged = true;
            break;
        }
        if used(obj) >= budget {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let (xw, fw) = simplex[n].clone();
        let second_worst = simplex[n - 1].1;
        let diff: Vec<f64> = centroid.iter().zip(&xw).map(|(c, w)| c - w).collect();

        let xr = axpy(1.0, &diff, &centroid);
        let fr = obj.eval(&xr);
        if fr < best {
            let xe = axpy(2.0, &diff, &centroid);
            let fe = obj.eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < second_worst {
            simplex[n] = (xr, fr);
            continue;
        }
        if fr < fw {
            let xc = axpy(0.5, &diff, &centroid);
            let fc = obj.eval(&xc);
            if fc <= fr {
                simplex[n] = (xc, fc);
                continue;
            }
        } else {
            let xcc = axpy(-0.5, &diff, &centroid);
            let fcc = obj.eval(&xcc);
            if fcc < fw {
                simplex[n] = (xcc, fcc);
                continue;
            }
        }
        let x_best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = x_best.iter().zip(&entry.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
            let f = obj.eval(&v);
            *entry = (v, f);
        }
    }
    // A converged simplex often straddles the minimum; its centroid is one
    // cheap extra candidate.
    if converged && used(obj) < budget {
        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / (n + 1) as f64;
            }
        }
        let fc = obj.eval(&centroid);
        simplex.push((centroid, fc));
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex.swap_remove(0), converged)
}

/// Two-loop recursion for `−H·g` with the scaled-identity initial Hessian.
fn lbfgs_direction(g: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        q = axpy(-a, y, &q);
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q = axpy(a - b, s, &q);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// L-BFGS (memory 10) with backtracking Armijo line search and central
/// finite-difference gradients.
pub fn minimize_lbfgs(
    obj: &mut Objective<'_>,
    theta0: &[f64],
    tol_rel_energy: f64,
    fd_step: f64,
    max_evaluations: usize,
) -> Result<OptimizationResult> {
    check_start(obj, theta0)?;
    if fd_step <= 0.0 {
        return Err(Error::contract("finite-difference step must be positive"));
    }
    let start_evals = obj.evaluations();
    let used = |obj: &Objective<'_>| obj.evaluations() - start_evals;

    let mut x = theta0.to_vec();
    let mut f = obj.eval(&x);
    let mut g = central_difference_gradient(obj, &x, fd_step);
    let mut n_gradient_evals = 1;
    let mut trace = vec![f];
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(LBFGS_MEMORY);

    let inf_norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut converged = inf_norm(&g) <= GRAD_INF_TOL;

    while !converged && used(obj) < max_evaluations {
        let mut d = lbfgs_direction(&g, &memory);
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            memory.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            let trial = axpy(step, &d, &x);
            let ft = obj.eval(&trial);
            if ft <= f + ARMIJO_C1 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= BACKTRACK_SHRINK;
            if used(obj) >= max_evaluations {
                break;
            }
        }
        let Some((x_new, f_new)) = accepted else {
            break;
        };

        let g_new = central_difference_gradient(obj, &x_new, fd_step);
        n_gradient_evals += 1;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > f64::EPSILON * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if memory.len() == LBFGS_MEMORY {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }

        let delta = f - f_new;
        x = x_new;
        f = f_new;
        g = g_new;
        trace.push(f);
        converged = within_rel_tol(delta, f, tol_rel_energy) || inf_norm(&g) <= GRAD_INF_TOL;
    }

    Ok(OptimizationResult {
        theta_opt: x,
        energy: f,
        n_energy_evals: used(obj),
        n_gradient_evals,
        converged,
        trace,
    })
}

/// Dispatches on the optimizer kind with shared settings.
pub fn minimize(
    kind: OptimizerKind,
    obj: &mut Objective<'_>,
    theta0: &[f64],
    tol_rel_energy: f64,
    fd_step: f64,
    max_evaluations: usize,
) -> Result<OptimizationResult> {
    match kind {
        OptimizerKind::NelderMead => minimize_nelder_mead(obj, theta0, tol_rel_energy, max_evaluations),
        OptimizerKind::Lbfgs => minimize_lbfgs(obj, theta0, tol_rel_energy, fd_step, max_evaluations),
    }
}
