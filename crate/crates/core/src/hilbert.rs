//! Truncated Fock ⊗ two-atom bases, state vectors and dense operators.
//!
//! Ordering is photon-number major: index = n · (configs per sector) + config
//! ordinal. Config ordinals are fixed:
//!
//! * Λ scheme: `00, 01, 10, 11, 02, 20, a, s, 22` with
//!   `a = (|12⟩ − |21⟩)/√2` and `s = (|12⟩ + |21⟩)/√2`.
//! * Raman scheme: product pairs `(x₁, x₂)` with levels ordered
//!   `0, 1, 2, e0, e1, e2`; ordinal = 6·x₁ + x₂. Written as `x1/x2`.
//! * Shelving: single atom, levels `A, B, C`, no cavity.
//!
//! Atom 1 is the control qubit and is written first.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Lambda,
    Raman,
    Shelving,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Lambda => "lambda",
            Scheme::Raman => "raman",
            Scheme::Shelving => "shelving",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lambda" => Ok(Scheme::Lambda),
            "raman" => Ok(Scheme::Raman),
            "shelving" => Ok(Scheme::Shelving),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// Two-atom configuration of the Λ scheme, with the 12/21 pair symmetrized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambdaConfig {
    Q00,
    Q01,
    Q10,
    Q11,
    X02,
    X20,
    Anti,
    Sym,
    X22,
}

impl LambdaConfig {
    pub const ALL: [LambdaConfig; 9] = [
        LambdaConfig::Q00,
        LambdaConfig::Q01,
        LambdaConfig::Q10,
        LambdaConfig::Q11,
        LambdaConfig::X02,
        LambdaConfig::X20,
        LambdaConfig::Anti,
        LambdaConfig::Sym,
        LambdaConfig::X22,
    ];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            LambdaConfig::Q00 => "00",
            LambdaConfig::Q01 => "01",
            LambdaConfig::Q10 => "10",
            LambdaConfig::Q11 => "11",
            LambdaConfig::X02 => "02",
            LambdaConfig::X20 => "20",
            LambdaConfig::Anti => "a",
            LambdaConfig::Sym => "s",
            LambdaConfig::X22 => "22",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == s)
    }
}

/// Level of a single six-level atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level6 {
    G0,
    G1,
    G2,
    E0,
    E1,
    E2,
}

impl Level6 {
    pub const ALL: [Level6; 6] = [Level6::G0, Level6::G1, Level6::G2, Level6::E0, Level6::E1, Level6::E2];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn is_excited(self) -> bool {
        matches!(self, Level6::E0 | Level6::E1 | Level6::E2)
    }

    /// Excited partner `e_j` of ground level `j`.
    pub fn excited(j: usize) -> Level6 {
        [Level6::E0, Level6::E1, Level6::E2][j]
    }

    pub fn ground(j: usize) -> Level6 {
        [Level6::G0, Level6::G1, Level6::G2][j]
    }

    pub fn name(self) -> &'static str {
        match self {
            Level6::G0 => "0",
            Level6::G1 => "1",
            Level6::G2 => "2",
            Level6::E0 => "e0",
            Level6::E1 => "e1",
            Level6::E2 => "e2",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|l| l.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RamanConfig {
    pub atom1: Level6,
    pub atom2: Level6,
}

impl RamanConfig {
    pub fn new(atom1: Level6, atom2: Level6) -> Self {
        RamanConfig { atom1, atom2 }
    }

    pub fn ordinal(self) -> usize {
        6 * self.atom1.ordinal() + self.atom2.ordinal()
    }

    fn from_ordinal(i: usize) -> Self {
        RamanConfig::new(Level6::ALL[i / 6], Level6::ALL[i % 6])
    }

    fn parse(s: &str) -> Option<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = s.split_once(['/', ','])?;
        Some(RamanConfig::new(Level6::parse(a.trim())?, Level6::parse(b.trim())?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShelvingLevel {
    A,
    B,
    C,
}

impl ShelvingLevel {
    pub const ALL: [ShelvingLevel; 3] = [ShelvingLevel::A, ShelvingLevel::B, ShelvingLevel::C];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomicConfig {
    Lambda(LambdaConfig),
    Raman(RamanConfig),
    Shelving(ShelvingLevel),
}

impl AtomicConfig {
    pub fn scheme(self) -> Scheme {
        match self {
            AtomicConfig::Lambda(_) => Scheme::Lambda,
            AtomicConfig::Raman(_) => Scheme::Raman,
            AtomicConfig::Shelving(_) => Scheme::Shelving,
        }
    }

    fn ordinal(self) -> usize {
        match self {
            AtomicConfig::Lambda(c) => c.ordinal(),
            AtomicConfig::Raman(c) => c.ordinal(),
            AtomicConfig::Shelving(l) => l as usize,
        }
    }
}

impl fmt::Display for AtomicConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomicConfig::Lambda(c) => f.write_str(c.name()),
            AtomicConfig::Raman(c) => write!(f, "{}/{}", c.atom1.name(), c.atom2.name()),
            AtomicConfig::Shelving(l) => write!(f, "{l:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Label {
    pub photons: usize,
    pub config: AtomicConfig,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}⟩", self.photons, self.config)
    }
}

/// Truncated basis. Labels are computed from the index arithmetic, so a
/// basis is a cheap `Copy` value that can be shared freely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Basis {
    scheme: Scheme,
    n_max: usize,
}

impl Basis {
    pub fn new(scheme: Scheme, n_max: usize) -> Self {
        let n_max = if scheme == Scheme::Shelving { 0 } else { n_max };
        Basis { scheme, n_max }
    }

    pub fn lambda(n_max: usize) -> Self {
        Basis::new(Scheme::Lambda, n_max)
    }

    pub fn raman(n_max: usize) -> Self {
        Basis::new(Scheme::Raman, n_max)
    }

    pub fn shelving() -> Self {
        Basis::new(Scheme::Shelving, 0)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn configs_per_sector(&self) -> usize {
        match self.scheme {
            Scheme::Lambda => 9,
            Scheme::Raman => 36,
            Scheme::Shelving => 3,
        }
    }

    pub fn dim(&self) -> usize {
        (self.n_max + 1) * self.configs_per_sector()
    }

    pub fn expect(&self, scheme: Scheme) -> Result<()> {
        if self.scheme == scheme {
            Ok(())
        } else {
            Err(Error::SchemeMismatch { expected: scheme, found: self.scheme })
        }
    }

    pub fn index_of(&self, label: Label) -> Result<usize> {
        if label.config.scheme() != self.scheme || label.photons > self.n_max {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        Ok(label.photons * self.configs_per_sector() + label.config.ordinal())
    }

    pub fn label(&self, index: usize) -> Label {
        assert!(index < self.dim(), "index {index} out of range for dimension {}", self.dim());
        let per = self.configs_per_sector();
        let (photons, k) = (index / per, index % per);
        let config = match self.scheme {
            Scheme::Lambda => AtomicConfig::Lambda(LambdaConfig::ALL[k]),
            Scheme::Raman => AtomicConfig::Raman(RamanConfig::from_ordinal(k)),
            Scheme::Shelving => AtomicConfig::Shelving(ShelvingLevel::ALL[k]),
        };
        Label { photons, config }
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.dim()).map(move |i| self.label(i))
    }

    /// Parse a configuration name in this basis' scheme.
    pub fn parse_config(&self, name: &str) -> Result<AtomicConfig> {
        let name = name.trim();
        let parsed = match self.scheme {
            Scheme::Lambda => LambdaConfig::parse(name).map(AtomicConfig::Lambda),
            Scheme::Raman => RamanConfig::parse(name).map(AtomicConfig::Raman),
            Scheme::Shelving => match name {
                "A" | "a" => Some(AtomicConfig::Shelving(ShelvingLevel::A)),
                "B" | "b" => Some(AtomicConfig::Shelving(ShelvingLevel::B)),
                "C" | "c" => Some(AtomicConfig::Shelving(ShelvingLevel::C)),
                _ => None,
            },
        };
        parsed.ok_or_else(|| Error::UnknownLabel(format!("{name} ({} basis)", self.scheme)))
    }

    pub fn index_of_named(&self, photons: usize, name: &str) -> Result<usize> {
        let config = self.parse_config(name)?;
        self.index_of(Label { photons, config }).map_err(|_| {
            Error::UnknownLabel(format!("|{photons},{name}⟩ (n_max = {})", self.n_max))
        })
    }

    /// Configurations spanning the two-qubit register, in the order
    /// `00, 01, 10, 11`.
    pub fn qubit_configs(&self) -> Result<[AtomicConfig; 4]> {
        use Level6::{G0, G1};
        match self.scheme {
            Scheme::Lambda => Ok([
                AtomicConfig::Lambda(LambdaConfig::Q00),
                AtomicConfig::Lambda(LambdaConfig::Q01),
                AtomicConfig::Lambda(LambdaConfig::Q10),
                AtomicConfig::Lambda(LambdaConfig::Q11),
            ]),
            Scheme::Raman => Ok([
                AtomicConfig::Raman(RamanConfig::new(G0, G0)),
                AtomicConfig::Raman(RamanConfig::new(G0, G1)),
                AtomicConfig::Raman(RamanConfig::new(G1, G0)),
                AtomicConfig::Raman(RamanConfig::new(G1, G1)),
            ]),
            Scheme::Shelving => Err(Error::SchemeMismatch { expected: Scheme::Lambda, found: Scheme::Shelving }),
        }
    }

    /// Indices of the n = 0 qubit configurations.
    pub fn qubit_indices(&self) -> Result<[usize; 4]> {
        let cfg = self.qubit_configs()?;
        let mut out = [0; 4];
        for (o, c) in out.iter_mut().zip(cfg) {
            *o = self.index_of(Label { photons: 0, config: c })?;
        }
        Ok(out)
    }
}

/// Unnormalized state over a basis. Its squared norm is the no-photon
/// probability of the conditioned evolution that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: Basis,
    amps: Array1<C64>,
}

impl StateVector {
    pub fn zeros(basis: Basis) -> Self {
        StateVector { basis, amps: Array1::zeros(basis.dim()) }
    }

    pub fn from_amplitudes(basis: Basis, amps: Array1<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: amps.len() });
        }
        Ok(StateVector { basis, amps })
    }

    pub fn basis_vector(basis: Basis, label: Label) -> Result<Self> {
        let i = basis.index_of(label)?;
        let mut s = StateVector::zeros(basis);
        s.amps[i] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut Array1<C64> {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Array1<C64> {
        self.amps
    }

    pub fn amplitude(&self, label: Label) -> Result<C64> {
        Ok(self.amps[self.basis.index_of(label)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::vec_norm_sqr(self.amps.view())
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        linalg::inner(self.amps.view(), other.amps.view())
    }

    /// Write `n,config,re,im` rows with a header line.
    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "config", "re", "im"])?;
        for (i, z) in self.amps.iter().enumerate() {
            let l = self.basis.label(i);
            w.write_record([l.photons.to_string(), l.config.to_string(), z.re.to_string(), z.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read rows written by [`StateVector::write_csv`]. Labels absent from
    /// the input are zero.
    pub fn read_csv<R: Read>(basis: Basis, input: R) -> std::result::Result<Self, Box<dyn std::error::Error>> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut s = StateVector::zeros(basis);
        for rec in rdr.records() {
            let rec = rec?;
            let n: usize = rec[0].trim().parse()?;
            let i = basis.index_of_named(n, &rec[1])?;
            s.amps[i] = C64::new(rec[2].trim().parse()?, rec[3].trim().parse()?);
        }
        Ok(s)
    }
}

pub fn build_basis(scheme: Scheme, n_max: usize) -> Basis {
    Basis::new(scheme, n_max)
}

/// Unit vector at `|n, config⟩`, with `config` given by name.
pub fn basis_state(basis: Basis, n: usize, config: &str) -> Result<StateVector> {
    let i = basis.index_of_named(n, config)?;
    let mut s = StateVector::zeros(basis);
    s.amps[i] = C64::new(1.0, 0.0);
    Ok(s)
}

/// Two-qubit register state over `00, 01, 10, 11` (control first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState(pub [C64; 4]);

impl QubitState {
    pub const LABELS: [&'static str; 4] = ["00", "01", "10", "11"];

    pub fn basis(k: usize) -> Self {
        let mut a = [C64::new(0.0, 0.0); 4];
        a[k] = C64::new(1.0, 0.0);
        QubitState(a)
    }

    /// Parse `10`, or an equal-weight superposition such as `00+10`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut a = [C64::new(0.0, 0.0); 4];
        let mut count = 0usize;
        for part in text.split('+') {
            let part = part.trim();
            let k = Self::LABELS
                .iter()
                .position(|l| *l == part)
                .ok_or_else(|| Error::UnknownLabel(format!("qubit state `{part}`")))?;
            a[k] += C64::new(1.0, 0.0);
            count += 1;
        }
        let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        debug_assert!(count > 0);
        Ok(QubitState(a.map(|z| z / norm)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Place the register at n = 0 in `basis`.
    pub fn embed(&self, basis: Basis) -> Result<StateVector> {
        let idx = basis.qubit_indices()?;
        let mut s = StateVector::zeros(basis);
        for (i, z) in idx.iter().zip(self.0) {
            s.amps[*i] = z;
        }
        Ok(s)
    }

    /// Extract the n = 0 qubit amplitudes, failing if `state` has weight
    /// anywhere else.
    pub fn from_state(state: &StateVector) -> Result<Self> {
        let idx = state.basis.qubit_indices()?;
        for (i, z) in state.amps.iter().enumerate() {
            if !idx.contains(&i) && z.norm() > 0.0 {
                return Err(Error::NonQubitSupport(state.basis.label(i).to_string()));
            }
        }
        Ok(QubitState(idx.map(|i| state.amps[i])))
    }
}

/// Dense operator on a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    basis: Basis,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn new(basis: Basis, matrix: Array2<C64>) -> Result<Self> {
        let d = basis.dim();
        if matrix.dim() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, found: matrix.nrows() });
        }
        Ok(Operator { basis, matrix })
    }

    pub fn zeros(basis: Basis) -> Self {
        let d = basis.dim();
        Operator { basis, matrix: Array2::zeros((d, d)) }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.basis != self.basis {
            return Err(Error::DimensionMismatch { expected: self.basis.dim(), found: state.basis.dim() });
        }
        Ok(StateVector { basis: self.basis, amps: self.matrix.dot(&state.amps) })
    }

    pub fn adjoint(&self) -> Operator {
        Operator { basis: self.basis, matrix: linalg::adjoint(self.matrix.view()) }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }
}

/// Orthogonal projector onto the five-dimensional decoherence-free subspace
/// `span{|0,00⟩, |0,01⟩, |0,10⟩, |0,11⟩, |0,a⟩}`.
pub fn dfs_projector(basis: Basis) -> Result<Operator> {
    basis.expect(Scheme::Lambda)?;
    let mut p = Operator::zeros(basis);
    for i in dfs_indices(basis)? {
        p.matrix[[i, i]] = C64::new(1.0, 0.0);
    }
    Ok(p)
}

/// Indices of the DFS basis vectors, ordered `00, 01, 10, 11, a`.
pub fn dfs_indices(basis: Basis) -> Result<[usize; 5]> {
    basis.expect(Scheme::Lambda)?;
    let q = basis.qubit_indices()?;
    let a = basis.index_of(Label { photons: 0, config: AtomicConfig::Lambda(LambdaConfig::Anti) })?;
    Ok([q[0], q[1], q[2], q[3], a])
}

// ---------------------------------------------------------------------------
// Product-space construction helpers shared by the generator builders.

/// Cavity annihilation operator `b` truncated at `n_max` photons.
pub(crate) fn annihilation(n_max: usize) -> Array2<C64> {
    let n = n_max + 1;
    let mut b = Array2::zeros((n, n));
    for k in 1..n {
        b[[k - 1, k]] = C64::new((k as f64).sqrt(), 0.0);
    }
    b
}

/// `|i⟩⟨j|` on a `levels`-dimensional single atom.
pub(crate) fn transition(levels: usize, i: usize, j: usize) -> Array2<C64> {
    let mut m = Array2::zeros((levels, levels));
    m[[i, j]] = C64::new(1.0, 0.0);
    m
}

/// Embed a single-atom operator on atom `atom` (0 or 1) of a two-atom
/// product space.
pub(crate) fn on_atom(op: &Array2<C64>, atom: usize) -> Array2<C64> {
    let eye = linalg::identity(op.nrows());
    match atom {
        0 => linalg::kron(op.view(), eye.view()),
        1 => linalg::kron(eye.view(), op.view()),
        _ => panic!("two atoms only"),
    }
}

/// `fock ⊗ atoms` in photon-major order.
pub(crate) fn fock_atoms(fock: &Array2<C64>, atoms: &Array2<C64>) -> Array2<C64> {
    linalg::kron(fock.view(), atoms.view())
}

/// Real orthogonal map from Λ product coordinates (x₁x₂ ordinal 3x₁+x₂)
/// to the symmetrized config order of [`LambdaConfig`], per photon sector.
pub(crate) fn lambda_symmetrizer(n_max: usize) -> Array2<C64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = Array2::<C64>::zeros((9, 9));
    let one = C64::new(1.0, 0.0);
    let pairs = [(LambdaConfig::Q00, 0), (LambdaConfig::Q01, 1), (LambdaConfig::Q10, 3), (LambdaConfig::Q11, 4), (LambdaConfig::X02, 2), (LambdaConfig::X20, 6), (LambdaConfig::X22, 8)];
    for (cfg, p) in pairs {
        v[[cfg.ordinal(), p]] = one;
    }
    // |12⟩ has product ordinal 5, |21⟩ ordinal 7
    v[[LambdaConfig::Anti.ordinal(), 5]] = C64::new(r, 0.0);
    v[[LambdaConfig::Anti.ordinal(), 7]] = C64::new(-r, 0.0);
    v[[LambdaConfig::Sym.ordinal(), 5]] = C64::new(r, 0.0);
    v[[LambdaConfig::Sym.ordinal(), 7]] = C64::new(r, 0.0);
    fock_atoms(&linalg::identity(n_max + 1), &v)
}

/// Convert a product-basis Λ operator to the symmetrized basis.
pub(crate) fn symmetrize_lambda(n_max: usize, product: &Array2<C64>) -> Array2<C64> {
    let v = lambda_symmetrizer(n_max);
    v.dot(product).dot(&v.t())
}
