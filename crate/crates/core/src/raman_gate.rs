//! Six-level (Raman) variant: every Λ transition is replaced by a far-detuned
//! Raman transition through excited levels `e₀, e₁, e₂`, which suppresses
//! spontaneous emission from the bus state.
//!
//! Full conditional Hamiltonian in the interaction picture:
//!
//! ```text
//! H = i g Σᵢ (|e₂⟩ᵢ⟨1| b − h.c.)
//!   + ½ (Ω₂₁ |2⟩₁⟨e₁| + Ω₂₀ |2⟩₂⟨e₀| + h.c.)
//!   + ½ Σᵢⱼ (Ω_jj |j⟩ᵢ⟨e_j| + h.c.) + Σᵢⱼ Δ_j |e_j⟩ᵢ⟨e_j|
//!   − (i/2) κ b†b − (i/2) Σᵢⱼ Γ_j |e_j⟩ᵢ⟨e_j|
//! ```
//!
//! Eliminating the excited levels gives a Λ-type model with
//! `Ω_j,eff = −Ω₂ⱼΩ_jj / 2Δ_j`, `g_eff = −gΩ₂₂ / 2Δ₂`, no atomic decay, and
//! level shifts `−g²/Δ₂ |1⟩⟨1| b†b`, `−Ω_jj²/4Δ_j |j⟩⟨j|`,
//! `−Ω₂₀²/4Δ₀ |2⟩₂⟨2|`, `−Ω₂₁²/4Δ₁ |2⟩₁⟨2|`.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::hilbert::{self, annihilation, fock_atoms, on_atom, transition, Basis, Level6, Operator, Scheme, StateVector};
use crate::lambda_gate::{self, LambdaCouplings};
use crate::linalg;
use crate::propagator::ConditionalGenerator;
use crate::regime::{RegimeReport, Status, DEFAULT_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanParams {
    /// Cavity coupling on the 1–e₂ transition.
    pub g: f64,
    pub kappa: f64,
    /// Detunings Δ_j of the lasers driving the j–e_j transitions.
    pub delta: [f64; 3],
    /// Strong fields Ω_jj on j–e_j, applied to both atoms.
    pub omega_diag: [f64; 3],
    /// Weak field on atom 1's 2–e₁ transition.
    pub omega21: f64,
    /// Weak field on atom 2's 2–e₀ transition.
    pub omega20: f64,
    /// Decay rates Γ_j of e_j.
    pub gamma: [f64; 3],
}

impl Default for RamanParams {
    /// Δ = 1000g, Ω_jj = 2g, Ω₂₀ = Ω₂₁ = 0.05g, κ = |g_eff|, Γ = 0.
    fn default() -> Self {
        RamanParams::symmetric(1000.0, 2.0, 0.05, 0.0)
    }
}

impl RamanParams {
    /// Equal detunings, equal strong fields, `Ω₂₁ = Ω₂₀`, equal decay rates
    /// and `κ = |g_eff|`.
    pub fn symmetric(delta: f64, omega_strong: f64, omega20: f64, gamma: f64) -> Self {
        let g = 1.0;
        RamanParams {
            g,
            kappa: (g * omega_strong / (2.0 * delta)).abs(),
            delta: [delta; 3],
            omega_diag: [omega_strong; 3],
            omega21: omega20,
            omega20,
            gamma: [gamma; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [("g", self.g), ("kappa", self.kappa), ("omega20", self.omega20), ("omega21", self.omega21)];
        for (name, v) in rates {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("must be a finite non-negative rate, got {v}")));
            }
        }
        for j in 0..3 {
            if !(self.omega_diag[j].is_finite() && self.omega_diag[j] >= 0.0) {
                return Err(invalid("omega-strong", format!("Ω_{j}{j} must be non-negative, got {}", self.omega_diag[j])));
            }
            if !(self.gamma[j].is_finite() && self.gamma[j] >= 0.0) {
                return Err(invalid("gamma", format!("Γ_{j} must be non-negative, got {}", self.gamma[j])));
            }
            if !(self.delta[j].is_finite() && self.delta[j] > 0.0) {
                return Err(invalid("delta", format!("Δ_{j} must be positive, got {}", self.delta[j])));
            }
        }
        Ok(())
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn lvl(l: Level6) -> usize {
    l.ordinal()
}

/// Sum of `coef · |i⟩⟨j|` on both atoms (or one atom) embedded in the
/// Fock ⊗ atoms product space with the identity on the cavity.
fn atomic_term(basis: Basis, terms: &[(usize, usize, usize, C64)]) -> Array2<C64> {
    let mut a = Array2::<C64>::zeros((36, 36));
    for &(atom, i, j, coef) in terms {
        a = a + on_atom(&transition(6, i, j), atom).mapv(|z| z * coef);
    }
    fock_atoms(&linalg::identity(basis.n_max() + 1), &a)
}

/// Hermitian part of the six-level conditional Hamiltonian.
pub fn coherent_hamiltonian(params: &RamanParams, basis: Basis) -> Result<Operator> {
    basis.expect(Scheme::Raman)?;
    let b = annihilation(basis.n_max());
    let mut cav = Array2::<C64>::zeros((basis.dim(), basis.dim()));
    for atom in 0..2 {
        cav = cav + fock_atoms(&b, &on_atom(&transition(6, lvl(Level6::E2), lvl(Level6::G1)), atom));
    }
    let mut h = (&cav - &linalg::adjoint(cav.view())).mapv(|z| c(0.0, params.g) * z);

    let mut lasers = vec![
        (0, lvl(Level6::G2), lvl(Level6::E1), c(0.5 * params.omega21, 0.0)),
        (1, lvl(Level6::G2), lvl(Level6::E0), c(0.5 * params.omega20, 0.0)),
    ];
    for atom in 0..2 {
        for j in 0..3 {
            lasers.push((atom, lvl(Level6::ground(j)), lvl(Level6::excited(j)), c(0.5 * params.omega_diag[j], 0.0)));
        }
    }
    let l = atomic_term(basis, &lasers);
    h = h + &l + linalg::adjoint(l.view());

    let mut detunings = Vec::new();
    for atom in 0..2 {
        for j in 0..3 {
            let e = lvl(Level6::excited(j));
            detunings.push((atom, e, e, c(params.delta[j], 0.0)));
        }
    }
    h = h + atomic_term(basis, &detunings);
    Operator::new(basis, h)
}

/// Anti-Hermitian part `−(i/2)(κ b†b + Σᵢⱼ Γ_j |e_j⟩ᵢ⟨e_j|)`.
pub fn dissipator(params: &RamanParams, basis: Basis) -> Result<Operator> {
    basis.expect(Scheme::Raman)?;
    let b = annihilation(basis.n_max());
    let n = linalg::adjoint(b.view()).dot(&b);
    let mut d = fock_atoms(&n, &linalg::identity(36)).mapv(|z| z * params.kappa);
    let mut decays = Vec::new();
    for atom in 0..2 {
        for j in 0..3 {
            let e = lvl(Level6::excited(j));
            decays.push((atom, e, e, c(params.gamma[j], 0.0)));
        }
    }
    d = d + atomic_term(basis, &decays);
    Operator::new(basis, d.mapv(|z| c(0.0, -0.5) * z))
}

pub fn conditional_hamiltonian(params: &RamanParams, basis: Basis) -> Result<Operator> {
    let h = coherent_hamiltonian(params, basis)?.into_matrix() + dissipator(params, basis)?.matrix();
    Operator::new(basis, h)
}

/// `G = −i H_cond` for the six-level scheme.
pub fn build_generator_raman(params: &RamanParams, basis: Basis) -> Result<ConditionalGenerator> {
    params.validate()?;
    Ok(ConditionalGenerator::from_hamiltonian(&conditional_hamiltonian(params, basis)?))
}

/// Effective Λ-scheme rates and level-shift magnitudes after eliminating
/// the excited levels. Shift fields hold positive magnitudes; they enter the
/// Hamiltonian with a minus sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveLambdaView {
    pub omega0_eff: f64,
    pub omega1_eff: f64,
    pub g_eff: f64,
    /// g²/Δ₂, multiplying Σᵢ |1⟩ᵢ⟨1| b†b.
    pub cavity_shift: f64,
    /// Ω_jj²/4Δ_j on level j of each atom.
    pub ground_shifts: [f64; 3],
    /// Ω₂₀²/4Δ₀ on |2⟩ of atom 2.
    pub shift20: f64,
    /// Ω₂₁²/4Δ₁ on |2⟩ of atom 1.
    pub shift21: f64,
}

impl EffectiveLambdaView {
    /// Same view with every level shift removed.
    pub fn without_shifts(&self) -> Self {
        EffectiveLambdaView { cavity_shift: 0.0, ground_shifts: [0.0; 3], shift20: 0.0, shift21: 0.0, ..*self }
    }

    /// Same view with only the ground-state shifts Ω_jj²/4Δ_j removed.
    pub fn without_ground_shifts(&self) -> Self {
        EffectiveLambdaView { ground_shifts: [0.0; 3], ..*self }
    }
}

pub fn effective_lambda_view(params: &RamanParams) -> Result<EffectiveLambdaView> {
    params.validate()?;
    let d = params.delta;
    let od = params.omega_diag;
    Ok(EffectiveLambdaView {
        omega0_eff: -params.omega20 * od[0] / (2.0 * d[0]),
        omega1_eff: -params.omega21 * od[1] / (2.0 * d[1]),
        g_eff: -params.g * od[2] / (2.0 * d[2]),
        cavity_shift: params.g * params.g / d[2],
        ground_shifts: [0, 1, 2].map(|j| od[j] * od[j] / (4.0 * d[j])),
        shift20: params.omega20 * params.omega20 / (4.0 * d[0]),
        shift21: params.omega21 * params.omega21 / (4.0 * d[1]),
    })
}

/// Level-shift terms of the eliminated model, in the Λ (symmetrized) basis.
pub fn shift_hamiltonian(view: &EffectiveLambdaView, basis: Basis) -> Result<Operator> {
    basis.expect(Scheme::Lambda)?;
    let b = annihilation(basis.n_max());
    let n = linalg::adjoint(b.view()).dot(&b);
    let eye_f = linalg::identity(basis.n_max() + 1);
    let mut atoms = Array2::<C64>::zeros((9, 9));
    let mut cavity = Array2::<C64>::zeros((9, 9));
    for atom in 0..2 {
        cavity = cavity + on_atom(&transition(3, 1, 1), atom);
        for j in 0..3 {
            atoms = atoms + on_atom(&transition(3, j, j), atom).mapv(|z| z * view.ground_shifts[j]);
        }
    }
    atoms = atoms + on_atom(&transition(3, 2, 2), 1).mapv(|z| z * view.shift20);
    atoms = atoms + on_atom(&transition(3, 2, 2), 0).mapv(|z| z * view.shift21);
    let h = fock_atoms(&n, &cavity).mapv(|z| z * view.cavity_shift) + fock_atoms(&eye_f, &atoms);
    Operator::new(basis, hilbert::symmetrize_lambda(basis.n_max(), &h.mapv(|z| -z)))
}

/// Eliminated-model generator from an explicit view (shifts may be zeroed).
pub fn build_generator_effective_from_view(view: &EffectiveLambdaView, kappa: f64, basis: Basis) -> Result<ConditionalGenerator> {
    let couplings = LambdaCouplings { g: view.g_eff, omega0: view.omega0_eff, omega1: view.omega1_eff, kappa, gamma: 0.0 };
    let h = lambda_gate::conditional_hamiltonian(&couplings, basis)?.into_matrix() + shift_hamiltonian(view, basis)?.matrix();
    Ok(ConditionalGenerator::from_hamiltonian(&Operator::new(basis, h)?))
}

/// Generator of the adiabatically eliminated dynamics on the Λ basis.
pub fn build_generator_effective(params: &RamanParams, basis: Basis) -> Result<ConditionalGenerator> {
    build_generator_effective_from_view(&effective_lambda_view(params)?, params.kappa, basis)
}

/// `T = 2π/|Ω₀,eff| = 4πΔ₀ / (Ω₂₀ Ω₀₀)`.
pub fn raman_pulse_duration(params: &RamanParams) -> Result<f64> {
    params.validate()?;
    if params.omega20 <= 0.0 {
        return Err(invalid("omega20", "pulse duration undefined for a zero weak field"));
    }
    if params.omega_diag[0] <= 0.0 {
        return Err(invalid("omega-strong", "pulse duration undefined for Ω₀₀ = 0"));
    }
    Ok(4.0 * PI * params.delta[0] / (params.omega20 * params.omega_diag[0]))
}

/// Total population of configurations with at least one atom excited.
pub fn excited_population(state: &StateVector) -> Result<f64> {
    state.basis().expect(Scheme::Raman)?;
    let b = state.basis();
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| match b.label(*i).config {
            hilbert::AtomicConfig::Raman(cfg) => cfg.atom1.is_excited() || cfg.atom2.is_excited(),
            _ => false,
        })
        .map(|(_, z)| z.norm_sqr())
        .sum())
}

/// Conditions under which the six-level system acts as the Λ gate.
pub fn validate_regime_raman(params: &RamanParams, threshold: f64) -> RegimeReport {
    let mut r = RegimeReport::new();
    if let Err(e) = params.validate() {
        r.violation(e.to_string());
        return r;
    }
    if params.omega20 <= 0.0 || params.omega21 <= 0.0 {
        r.violation("weak fields omega20 and omega21 must be positive for a gate");
        return r;
    }
    let v = effective_lambda_view(params).expect("validated");
    let o0 = v.omega0_eff.abs();

    let mismatch = (v.omega0_eff - v.omega1_eff).abs() / o0.max(v.omega1_eff.abs()).max(f64::MIN_POSITIVE);
    r.at_most("omega0_eff == omega1_eff (relative mismatch)", mismatch, 1e-12, Status::Violation);
    r.much_less("|omega0_eff|/(g_eff^2/kappa)", o0 * params.kappa / (v.g_eff * v.g_eff), threshold);
    r.much_less("|omega0_eff|/kappa", o0 / params.kappa, threshold);
    r.much_less("omega20/omega00", params.omega20 / params.omega_diag[0], threshold);
    r.much_less("omega21/omega11", params.omega21 / params.omega_diag[1], threshold);
    r.much_less("g/omega22", params.g / params.omega_diag[2], threshold);

    let s: Vec<f64> = (0..3).map(|j| params.omega_diag[j].powi(2) / params.delta[j]).collect();
    let hi = s.iter().cloned().fold(f64::MIN, f64::max);
    let lo = s.iter().cloned().fold(f64::MAX, f64::min);
    let spread = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    r.at_most("equal shifts Omega_jj^2/Delta_j (relative spread)", spread, 1e-9, Status::Warn);

    let others = [params.g, params.kappa, params.omega20, params.omega21]
        .into_iter()
        .chain(params.omega_diag)
        .chain(params.gamma)
        .fold(0.0, f64::max);
    let dmin = params.delta.iter().cloned().fold(f64::MAX, f64::min);
    r.much_less("max rate/Delta", others / dmin, threshold);
    r
}

pub fn validate_regime_raman_default(params: &RamanParams) -> RegimeReport {
    validate_regime_raman(params, DEFAULT_THRESHOLD)
}
