//! Two Λ-type atoms in a lossy cavity driven by a single weak laser pulse.
//!
//! Atom 1 (control) is driven on its 1–2 transition, atom 2 (target) on its
//! 0–2 transition, both with Rabi frequency `Ω₀ = Ω₁ = √2 Ω`. Level 2 of each
//! atom couples to the cavity on the 1–2 transition with strength `g`. The
//! conditional Hamiltonian is
//!
//! ```text
//! H = i g Σᵢ (|2⟩ᵢ⟨1| b − h.c.)
//!   + ½ (Ω₀ |0⟩₂⟨2| + Ω₁ |1⟩₁⟨2| + h.c.)
//!   − (i/2) κ b†b − (i/2) Γ Σᵢ |2⟩ᵢ⟨2|
//! ```
//!
//! Operators are assembled in the product basis and rotated into the
//! symmetrized `{…, a, s, 22}` configuration set.

use std::f64::consts::PI;

use ndarray::{array, Array2};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::hilbert::{self, annihilation, fock_atoms, on_atom, transition, Basis, Label, AtomicConfig, LambdaConfig, Operator, QubitState, Scheme, StateVector};
use crate::linalg;
use crate::propagator::ConditionalGenerator;
use crate::regime::{RegimeReport, DEFAULT_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaParams {
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// Ω₀ (= Ω₁).
    pub omega0: f64,
}

impl Default for LambdaParams {
    fn default() -> Self {
        LambdaParams { g: 1.0, kappa: 1.0, gamma: 0.0, omega0: 0.1 }
    }
}

impl LambdaParams {
    pub fn new(omega0: f64, kappa: f64, gamma: f64) -> Self {
        LambdaParams { g: 1.0, kappa, gamma, omega0 }
    }

    /// Ω = Ω₀/√2.
    pub fn omega(&self) -> f64 {
        self.omega0 / std::f64::consts::SQRT_2
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g", self.g), ("kappa", self.kappa), ("gamma", self.gamma), ("omega0", self.omega0)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("must be a finite non-negative rate, got {v}")));
            }
        }
        Ok(())
    }
}

/// Signed couplings of a Λ-type conditional Hamiltonian. The adiabatically
/// eliminated Raman model reuses this with negative effective rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaCouplings {
    pub g: f64,
    pub omega0: f64,
    pub omega1: f64,
    pub kappa: f64,
    pub gamma: f64,
}

impl From<&LambdaParams> for LambdaCouplings {
    fn from(p: &LambdaParams) -> Self {
        LambdaCouplings { g: p.g, omega0: p.omega0, omega1: p.omega0, kappa: p.kappa, gamma: p.gamma }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn product_op(basis: Basis, product: Array2<C64>) -> Result<Operator> {
    Operator::new(basis, hilbert::symmetrize_lambda(basis.n_max(), &product))
}

/// `i g Σᵢ (|2⟩ᵢ⟨1| b − |1⟩ᵢ⟨2| b†)`.
pub fn cavity_coupling(basis: Basis, g: f64) -> Result<Operator> {
    basis.expect(Scheme::Lambda)?;
    let b = annihilation(basis.n_max());
    let up = transition(3, 2, 1);
    let mut x = Array2::<C64>::zeros((basis.dim(), basis.dim()));
    for atom in 0..2 {
        x = x + fock_atoms(&b, &on_atom(&up, atom));
    }
    let h = (&x - &linalg::adjoint(x.view())).mapv(|z| c(0.0, g) * z);
    product_op(basis, h)
}

/// `½ (Ω₀ |0⟩₂⟨2| + Ω₁ |1⟩₁⟨2| + h.c.)`.
pub fn laser_hamiltonian(basis: Basis, omega0: f64, omega1: f64) -> Result<Operator> {
    basis.expect(Scheme::Lambda)?;
    let l = on_atom(&transition(3, 0, 2), 1).mapv(|z| z * omega0) + on_atom(&transition(3, 1, 2), 0).mapv(|z| z * omega1);
    let l = (&l + &linalg::adjoint(l.view())).mapv(|z| z * 0.5);
    product_op(basis, fock_atoms(&linalg::identity(basis.n_max() + 1), &l))
}

/// `−(i/2) κ b†b`.
pub fn cavity_damping(basis: Basis, kappa: f64) -> Result<Operator> {
    basis.expect(Scheme::Lambda)?;
    let b = annihilation(basis.n_max());
    let n = linalg::adjoint(b.view()).dot(&b);
    product_op(basis, fock_atoms(&n, &linalg::identity(9)).mapv(|z| c(0.0, -0.5 * kappa) * z))
}

/// `−(i/2) Γ Σᵢ |2⟩ᵢ⟨2|`.
pub fn atomic_decay(basis: Basis, gamma: f64) -> Result<Operator> {
    basis.expect(Scheme::Lambda)?;
    let p2 = transition(3, 2, 2);
    let atoms = on_atom(&p2, 0) + on_atom(&p2, 1);
    product_op(basis, fock_atoms(&linalg::identity(basis.n_max() + 1), &atoms).mapv(|z| c(0.0, -0.5 * gamma) * z))
}

pub fn conditional_hamiltonian(couplings: &LambdaCouplings, basis: Basis) -> Result<Operator> {
    let h = cavity_coupling(basis, couplings.g)?.into_matrix()
        + laser_hamiltonian(basis, couplings.omega0, couplings.omega1)?.matrix()
        + cavity_damping(basis, couplings.kappa)?.matrix()
        + atomic_decay(basis, couplings.gamma)?.matrix();
    Operator::new(basis, h)
}

pub fn build_generator_from_couplings(couplings: &LambdaCouplings, basis: Basis) -> Result<ConditionalGenerator> {
    Ok(ConditionalGenerator::from_hamiltonian(&conditional_hamiltonian(couplings, basis)?))
}

/// `G = −i H_cond` for the Λ scheme.
pub fn build_generator_lambda(params: &LambdaParams, basis: Basis) -> Result<ConditionalGenerator> {
    params.validate()?;
    build_generator_from_couplings(&params.into(), basis)
}

/// Generator for a field-free window after the pulse: lasers off, all
/// damping still on.
pub fn build_relaxation_generator(params: &LambdaParams, basis: Basis) -> Result<ConditionalGenerator> {
    params.validate()?;
    let couplings = LambdaCouplings { omega0: 0.0, omega1: 0.0, ..LambdaCouplings::from(params) };
    build_generator_from_couplings(&couplings, basis)
}

/// Laser Hamiltonian projected onto the decoherence-free subspace,
/// `P H_laser P`. Equals `½ Ω (|10⟩⟨a| − |a⟩⟨11| + h.c.)` at n = 0.
pub fn projected_laser_hamiltonian(params: &LambdaParams, basis: Basis) -> Result<Operator> {
    let p = hilbert::dfs_projector(basis)?;
    let h = laser_hamiltonian(basis, params.omega0, params.omega0)?;
    Operator::new(basis, p.matrix().dot(h.matrix()).dot(p.matrix()))
}

/// Pulse length `T = √2 π / Ω = 2π / Ω₀`.
pub fn pulse_duration(params: &LambdaParams) -> Result<f64> {
    if !(params.omega0.is_finite() && params.omega0 > 0.0) {
        return Err(invalid("omega0", "pulse duration undefined unless omega0 > 0"));
    }
    Ok(2.0 * PI / params.omega0)
}

/// Rates of the adiabatically eliminated dynamics inside the DFS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRates {
    /// Ω²κ / 16g²
    pub k1: f64,
    /// k₁ + Ω²/2κ + Γ/2
    pub k2: f64,
}

pub fn effective_rates(params: &LambdaParams) -> Result<EffectiveRates> {
    params.validate()?;
    if params.kappa <= 0.0 {
        return Err(Error::RegimeViolation("effective rates need kappa > 0".into()));
    }
    if params.g <= 0.0 {
        return Err(Error::RegimeViolation("effective rates need g > 0".into()));
    }
    let om2 = params.omega().powi(2);
    let k1 = om2 * params.kappa / (16.0 * params.g * params.g);
    Ok(EffectiveRates { k1, k2: k1 + om2 / (2.0 * params.kappa) + params.gamma / 2.0 })
}

/// Amplitudes of the five n = 0 decoherence-free states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfAmplitudes {
    pub c00: C64,
    pub c01: C64,
    pub c10: C64,
    pub c11: C64,
    pub ca: C64,
}

impl DfAmplitudes {
    pub fn from_qubits(q: &QubitState) -> Self {
        let [c00, c01, c10, c11] = q.0;
        DfAmplitudes { c00, c01, c10, c11, ca: c(0.0, 0.0) }
    }

    /// Read the DF amplitudes off a Λ-basis state (other amplitudes ignored).
    pub fn from_state(state: &StateVector) -> Result<Self> {
        let b = state.basis();
        let [i00, i01, i10, i11, ia] = hilbert::dfs_indices(b)?;
        let a = state.amplitudes();
        Ok(DfAmplitudes { c00: a[i00], c01: a[i01], c10: a[i10], c11: a[i11], ca: a[ia] })
    }

    pub fn as_array(&self) -> [C64; 5] {
        [self.c00, self.c01, self.c10, self.c11, self.ca]
    }

    pub fn max_abs_diff(&self, other: &DfAmplitudes) -> f64 {
        self.as_array().iter().zip(other.as_array()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Closed DFS dynamics after adiabatic elimination, for explicit rates.
///
/// `(c₁₀, c₁₁, c_a)` evolve under `−½ [[10k₁, 2k₁, iΩ], [2k₁, 2k₁, −iΩ],
/// [iΩ, −iΩ, 2k₂]]`; `c₀₀` decays as `e^{−4k₁t}` and `c₀₁` is frozen.
pub fn effective_dfs_evolution_with(initial: &DfAmplitudes, rates: EffectiveRates, omega: f64, t: f64) -> DfAmplitudes {
    let EffectiveRates { k1, k2 } = rates;
    let io = c(0.0, omega);
    let m = array![
        [c(10.0 * k1, 0.0), c(2.0 * k1, 0.0), io],
        [c(2.0 * k1, 0.0), c(2.0 * k1, 0.0), -io],
        [io, -io, c(2.0 * k2, 0.0)]
    ]
    .mapv(|z| z * (-0.5 * t));
    let u = linalg::expm(m.view());
    let v = u.dot(&array![initial.c10, initial.c11, initial.ca]);
    DfAmplitudes { c00: initial.c00 * (-4.0 * k1 * t).exp(), c01: initial.c01, c10: v[0], c11: v[1], ca: v[2] }
}

pub fn effective_dfs_evolution(initial: &DfAmplitudes, params: &LambdaParams, t: f64) -> Result<DfAmplitudes> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be non-negative, got {t}")));
    }
    Ok(effective_dfs_evolution_with(initial, effective_rates(params)?, params.omega(), t))
}

/// `U_CNOT` on `00, 01, 10, 11`.
pub fn cnot_matrix() -> Array2<C64> {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    array![[l, o, o, o], [o, l, o, o], [o, o, o, l], [o, o, l, o]]
}

/// First-order conditional evolution on the qubit subspace at the end of
/// the pulse (after the bus state has relaxed).
pub fn analytic_ucond(params: &LambdaParams) -> Result<Array2<C64>> {
    let EffectiveRates { k1, k2 } = effective_rates(params)?;
    let t = pulse_duration(params)?;
    Ok(analytic_ucond_with(EffectiveRates { k1, k2 }, t))
}

pub fn analytic_ucond_with(rates: EffectiveRates, t: f64) -> Array2<C64> {
    let EffectiveRates { k1, k2 } = rates;
    let diag = (6.0 * k1 - k2) * t / 4.0;
    let off = (10.0 * k1 + k2) * t / 4.0;
    let mut u = cnot_matrix();
    u[[2, 2]] -= diag;
    u[[3, 3]] -= diag;
    u[[2, 3]] -= off;
    u[[3, 2]] -= off;
    u[[0, 0]] -= 4.0 * k1 * t;
    u
}

/// First-order success probability; `raw` is the unclamped formula value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticP0 {
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

pub fn analytic_p0_qubits(q: &QubitState, params: &LambdaParams) -> Result<AnalyticP0> {
    let EffectiveRates { k1, k2 } = effective_rates(params)?;
    let t = pulse_duration(params)?;
    let [c00, _, c10, c11] = q.0;
    let cross = c10 * c11.conj() + c10.conj() * c11;
    let raw = 1.0
        - 0.5 * (10.0 * k1 + k2) * t * (c10.norm_sqr() + c11.norm_sqr())
        - 0.5 * (6.0 * k1 - k2) * t * cross.re
        - 8.0 * k1 * t * c00.norm_sqr();
    let value = raw.clamp(0.0, 1.0);
    Ok(AnalyticP0 { value, raw, clamped: value != raw })
}

/// First-order success probability for a Λ-basis state supported on the
/// n = 0 qubit configurations.
pub fn analytic_p0(psi: &StateVector, params: &LambdaParams) -> Result<AnalyticP0> {
    psi.basis().expect(Scheme::Lambda)?;
    analytic_p0_qubits(&QubitState::from_state(psi)?, params)
}

/// Ratios `Γ/Ω`, `Ωκ/g²` and `Ω/κ` against the "≪" threshold.
pub fn validate_regime_lambda(params: &LambdaParams, threshold: f64) -> RegimeReport {
    let mut r = RegimeReport::new();
    if let Err(e) = params.validate() {
        r.violation(e.to_string());
        return r;
    }
    if params.omega0 <= 0.0 {
        r.violation("omega0 must be positive for a gate");
        return r;
    }
    let om = params.omega();
    r.much_less("gamma/omega", params.gamma / om, threshold);
    r.much_less("omega*kappa/g^2", om * params.kappa / (params.g * params.g), threshold);
    r.much_less("omega/kappa", om / params.kappa, threshold);
    r
}

pub fn validate_regime_lambda_default(params: &LambdaParams) -> RegimeReport {
    validate_regime_lambda(params, DEFAULT_THRESHOLD)
}

/// `|0, config⟩` index helper for tests and diagnostics.
pub fn n0_index(basis: Basis, config: LambdaConfig) -> Result<usize> {
    basis.index_of(Label { photons: 0, config: AtomicConfig::Lambda(config) })
}
