//! Propagation of conditioned states under a time-independent,
//! non-Hermitian generator `G = −i H_cond` (ħ = 1).
//!
//! Because `G` does not depend on time, a single one-step transfer matrix
//! `exp(G Δt)` is computed once and applied repeatedly. States are kept
//! unnormalized; `‖ψ(t)‖²` is the probability that no photon was emitted in
//! `(0, t)`.

use std::collections::HashMap;
use std::sync::Mutex;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::hilbert::{Basis, Operator, StateVector};
use crate::linalg;

/// Largest ‖GΔt‖₁ accepted for a single step. Keeps the number of
/// squarings inside `expm` at ten or fewer.
pub const MAX_STEP_NORM: f64 = 4096.0;

/// Default relative accuracy target for the one-step matrix.
pub const DEFAULT_EPSILON: f64 = 1e-9;

const MAX_REFINEMENTS: u32 = 24;

/// `G` in `dψ/dt = G ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalGenerator {
    basis: Basis,
    matrix: Array2<C64>,
}

impl ConditionalGenerator {
    pub fn new(basis: Basis, matrix: Array2<C64>) -> Result<Self> {
        let d = basis.dim();
        if matrix.dim() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, found: matrix.nrows() });
        }
        Ok(ConditionalGenerator { basis, matrix })
    }

    /// `G = −i H` for a conditional Hamiltonian `H`.
    pub fn from_hamiltonian(h: &Operator) -> Self {
        let minus_i = C64::new(0.0, -1.0);
        ConditionalGenerator { basis: h.basis(), matrix: h.matrix().mapv(|z| minus_i * z) }
    }

    /// `H = i G`.
    pub fn hamiltonian(&self) -> Operator {
        let i = C64::new(0.0, 1.0);
        Operator::new(self.basis, self.matrix.mapv(|z| i * z)).expect("same basis")
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn check_finite(&self) -> Result<()> {
        match self.matrix.indexed_iter().find(|(_, z)| !(z.re.is_finite() && z.im.is_finite())) {
            Some(((row, col), _)) => Err(Error::NonFinite { row, col }),
            None => Ok(()),
        }
    }
}

/// Precomputed stepping for one generator over `[0, t_total]`.
#[derive(Debug)]
pub struct PropagatorPlan {
    generator: ConditionalGenerator,
    t_total: f64,
    n_outputs: usize,
    substeps: usize,
    step: f64,
    transfer: Array2<C64>,
    epsilon: f64,
    achieved: f64,
    remainders: Mutex<HashMap<u64, Array2<C64>>>,
}

/// Build a plan: `Δt = t_total / (n_outputs · m)` with the smallest power-of-two
/// refinement `m` for which the one-step matrix agrees with `exp(GΔt/2)²` to
/// relative accuracy `epsilon`.
pub fn plan(generator: &ConditionalGenerator, t_total: f64, n_outputs: usize, epsilon: f64) -> Result<PropagatorPlan> {
    generator.check_finite()?;
    if !(t_total.is_finite() && t_total > 0.0) {
        return Err(invalid("t_total", format!("must be positive and finite, got {t_total}")));
    }
    if n_outputs == 0 {
        return Err(invalid("n_outputs", "must be at least 1"));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    let out_dt = t_total / n_outputs as f64;
    let norm = linalg::norm1(generator.matrix.view());
    let base = ((norm * out_dt) / MAX_STEP_NORM).ceil().max(1.0) as usize;
    build(generator.clone(), t_total, n_outputs, base, epsilon)
}

fn build(generator: ConditionalGenerator, t_total: f64, n_outputs: usize, mut substeps: usize, epsilon: f64) -> Result<PropagatorPlan> {
    let out_dt = t_total / n_outputs as f64;
    let mut achieved = f64::INFINITY;
    for _ in 0..=MAX_REFINEMENTS {
        let step = out_dt / substeps as f64;
        let transfer = linalg::expm(generator.matrix.mapv(|z| z * step).view());
        let half = linalg::expm(generator.matrix.mapv(|z| z * (0.5 * step)).view());
        let reference = half.dot(&half);
        let scale = linalg::norm1(reference.view()).max(f64::MIN_POSITIVE);
        achieved = linalg::norm1((&transfer - &reference).view()) / scale;
        if achieved <= epsilon {
            return Ok(PropagatorPlan {
                generator,
                t_total,
                n_outputs,
                substeps,
                step,
                transfer,
                epsilon,
                achieved,
                remainders: Mutex::new(HashMap::new()),
            });
        }
        substeps *= 2;
    }
    Err(Error::Accuracy { target: epsilon, achieved })
}

impl PropagatorPlan {
    pub fn generator(&self) -> &ConditionalGenerator {
        &self.generator
    }

    pub fn t_total(&self) -> f64 {
        self.t_total
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Measured relative mismatch of the one-step matrix.
    pub fn achieved_accuracy(&self) -> f64 {
        self.achieved
    }

    pub fn transfer_matrix(&self) -> &Array2<C64> {
        &self.transfer
    }

    /// Same plan with Δt halved.
    pub fn refined(&self) -> Result<PropagatorPlan> {
        build(self.generator.clone(), self.t_total, self.n_outputs, self.substeps * 2, self.epsilon)
    }

    /// Whole steps taken to reach time `t`.
    pub fn steps_to(&self, t: f64) -> usize {
        let x = t / self.step;
        let r = x.round();
        if (x - r).abs() <= 1e-9 * r.max(1.0) {
            r as usize
        } else {
            x.floor() as usize
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t.is_finite() && t >= 0.0 && t <= self.t_total * (1.0 + 1e-12)) {
            return Err(Error::GridOutOfRange { t, t_total: self.t_total });
        }
        Ok(())
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.basis() != self.generator.basis {
            return Err(Error::DimensionMismatch { expected: self.generator.dim(), found: state.basis().dim() });
        }
        Ok(())
    }

    fn apply_remainder(&self, state: &ndarray::Array1<C64>, r: f64) -> ndarray::Array1<C64> {
        let key = r.to_bits();
        let mut cache = self.remainders.lock().expect("remainder cache poisoned");
        let m = cache
            .entry(key)
            .or_insert_with(|| linalg::expm(self.generator.matrix.mapv(|z| z * r).view()));
        m.dot(state)
    }

    /// States at each time of a non-decreasing grid inside `[0, t_total]`.
    pub fn propagate(&self, state0: &StateVector, t_grid: &[f64]) -> Result<Vec<StateVector>> {
        self.check_state(state0)?;
        for t in t_grid {
            self.check_time(*t)?;
        }
        for w in t_grid.windows(2) {
            if w[1] < w[0] {
                return Err(Error::UnorderedGrid { prev: w[0], next: w[1] });
            }
        }
        let basis = state0.basis();
        let mut current = state0.amplitudes().clone();
        let mut taken = 0usize;
        let mut out = Vec::with_capacity(t_grid.len());
        for &t in t_grid {
            let k = self.steps_to(t);
            while taken < k {
                current = self.transfer.dot(&current);
                taken += 1;
            }
            let r = t - k as f64 * self.step;
            let amps = if r > 1e-12 * self.step {
                self.apply_remainder(&current, r)
            } else {
                current.clone()
            };
            out.push(StateVector::from_amplitudes(basis, amps)?);
        }
        Ok(out)
    }

    /// State at `t_total`.
    pub fn final_state(&self, state0: &StateVector) -> Result<StateVector> {
        Ok(self.propagate(state0, &[self.t_total])?.pop().expect("one output"))
    }

    /// `‖exp(Gt) ψ‖²`.
    pub fn no_photon_probability(&self, state0: &StateVector, t: f64) -> Result<f64> {
        Ok(self.propagate(state0, &[t])?[0].norm_sqr())
    }

    /// Uniform output grid `0, t_total/n, …, t_total` (n + 1 points).
    pub fn output_grid(&self) -> Vec<f64> {
        (0..=self.n_outputs).map(|i| self.t_total * i as f64 / self.n_outputs as f64).collect()
    }
}
