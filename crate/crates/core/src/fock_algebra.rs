//! Truncated Hilbert space for two two-level atoms and one cavity mode.
//!
//! The composite basis is |a1⟩ ⊗ |a2⟩ ⊗ |n⟩ with the cavity index n varying
//! fastest: index = (2*a1 + a2) * (n_max + 1) + n, where a = 0 labels |g⟩ and
//! a = 1 labels |e⟩. Everything is dense; the public containers carry their
//! space tag so that mixing full-space and atoms-only objects fails loudly.

use ndarray as nd;
use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Two atoms and a cavity mode truncated at `n_max` photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpace {
    n_max: usize,
}

impl HilbertSpace {
    pub const DEFAULT_N_MAX: usize = 10;

    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Cavity levels |0⟩ .. |n_max⟩.
    pub fn cavity_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Total dimension 4 * (n_max + 1).
    pub fn dim(&self) -> usize {
        4 * self.cavity_dim()
    }

    /// Index of |a1 a2, n⟩ in the composite basis.
    pub fn index(&self, atoms: AtomPair, n: usize) -> usize {
        atoms.block() * self.cavity_dim() + n
    }

    /// Same space with `extra` more photon levels.
    pub fn extended(&self, extra: usize) -> Self {
        Self::new(self.n_max + extra)
    }
}

impl Default for HilbertSpace {
    fn default() -> Self {
        Self::new(Self::DEFAULT_N_MAX)
    }
}

/// Either the full atom1 x atom2 x cavity space or the 4-dimensional
/// atoms-only space used by the effective models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Full(HilbertSpace),
    Atoms,
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Full(hs) => hs.dim(),
            Space::Atoms => 4,
        }
    }
}

/// Which atom an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    One,
    Two,
}

/// Single-atom operators in the {|g⟩, |e⟩} basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomOp {
    /// |e⟩⟨g|
    SigmaPlus,
    /// |g⟩⟨e|
    SigmaMinus,
    /// |e⟩⟨e| - |g⟩⟨g|
    SigmaZ,
    /// |e⟩⟨e|
    ProjectExcited,
    /// |g⟩⟨g|
    ProjectGround,
}

/// Joint configuration of the two atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomPair {
    GG,
    GE,
    EG,
    EE,
}

impl AtomPair {
    pub const ALL: [AtomPair; 4] = [AtomPair::GG, AtomPair::GE, AtomPair::EG, AtomPair::EE];

    /// Block index 2*a1 + a2 with g = 0, e = 1.
    pub fn block(&self) -> usize {
        match self {
            AtomPair::GG => 0,
            AtomPair::GE => 1,
            AtomPair::EG => 2,
            AtomPair::EE => 3,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AtomPair::GG => "g1g2",
            AtomPair::GE => "g1e2",
            AtomPair::EG => "e1g2",
            AtomPair::EE => "e1e2",
        }
    }
}

/// Dense operator tagged with the space it acts on.
#[derive(Debug, Clone)]
pub struct Operator {
    space: Space,
    mat: nd::Array2<C64>,
}

impl Operator {
    pub fn new(space: Space, mat: nd::Array2<C64>) -> Result<Self> {
        let d = space.dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Dimension {
                context: "Operator::new",
                expected: d,
                got: mat.nrows().max(mat.ncols()),
            });
        }
        Ok(Self { space, mat })
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            mat: nd::Array2::zeros((d, d)),
        }
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            mat: nd::Array2::eye(d).mapv(|x: f64| C64::new(x, 0.0)),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn matrix(&self) -> &nd::Array2<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> nd::Array2<C64> {
        self.mat
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space,
            mat: dagger(&self.mat),
        }
    }

    pub fn dot(&self, rhs: &Operator) -> Result<Operator> {
        if self.space != rhs.space {
            return Err(Error::Dimension {
                context: "Operator::dot",
                expected: self.dim(),
                got: rhs.dim(),
            });
        }
        Ok(Self {
            space: self.space,
            mat: self.mat.dot(&rhs.mat),
        })
    }

    /// Largest |H[i,j] - conj(H[j,i])| over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Pure state or density matrix.
#[derive(Debug, Clone)]
pub enum StateRepr {
    Ket(nd::Array1<C64>),
    Density(nd::Array2<C64>),
}

/// State vector or density matrix tagged with its space.
#[derive(Debug, Clone)]
pub struct QuantumState {
    space: Space,
    repr: StateRepr,
}

impl QuantumState {
    /// Product basis state |a1 a2, n⟩ in the full space.
    pub fn basis_ket(hs: HilbertSpace, atoms: AtomPair, n: usize) -> Result<Self> {
        if n > hs.n_max() {
            return Err(Error::Dimension {
                context: "QuantumState::basis_ket photon index",
                expected: hs.n_max(),
                got: n,
            });
        }
        let mut v = nd::Array1::zeros(hs.dim());
        v[hs.index(atoms, n)] = C64::new(1.0, 0.0);
        Ok(Self {
            space: Space::Full(hs),
            repr: StateRepr::Ket(v),
        })
    }

    /// Basis state of the 4-dimensional atoms-only space.
    pub fn atoms_ket(atoms: AtomPair) -> Self {
        let mut v = nd::Array1::zeros(4);
        v[atoms.block()] = C64::new(1.0, 0.0);
        Self {
            space: Space::Atoms,
            repr: StateRepr::Ket(v),
        }
    }

    pub fn from_ket(space: Space, v: nd::Array1<C64>) -> Result<Self> {
        if v.len() != space.dim() {
            return Err(Error::Dimension {
                context: "QuantumState::from_ket",
                expected: space.dim(),
                got: v.len(),
            });
        }
        Ok(Self {
            space,
            repr: StateRepr::Ket(v),
        })
    }

    pub fn from_density(space: Space, m: nd::Array2<C64>) -> Result<Self> {
        if m.nrows() != space.dim() || m.ncols() != space.dim() {
            return Err(Error::Dimension {
                context: "QuantumState::from_density",
                expected: space.dim(),
                got: m.nrows().max(m.ncols()),
            });
        }
        Ok(Self {
            space,
            repr: StateRepr::Density(m),
        })
    }

    /// |psi⟩⟨psi| for a ket; a density matrix passes through unchanged.
    pub fn to_density(&self) -> Self {
        match &self.repr {
            StateRepr::Ket(v) => {
                let d = v.len();
                let mut m = nd::Array2::zeros((d, d));
                for i in 0..d {
                    for j in 0..d {
                        m[(i, j)] = v[i] * v[j].conj();
                    }
                }
                Self {
                    space: self.space,
                    repr: StateRepr::Density(m),
                }
            }
            StateRepr::Density(_) => self.clone(),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    pub fn as_ket(&self) -> Option<&nd::Array1<C64>> {
        match &self.repr {
            StateRepr::Ket(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_density(&self) -> Option<&nd::Array2<C64>> {
        match &self.repr {
            StateRepr::Density(m) => Some(m),
            _ => None,
        }
    }

    /// Ket norm or density-matrix trace (real part).
    pub fn weight(&self) -> f64 {
        match &self.repr {
            StateRepr::Ket(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            StateRepr::Density(m) => m.diag().iter().map(|z| z.re).sum(),
        }
    }

    /// Probabilities of the four atomic configurations, cavity traced out.
    /// Order: [gg, ge, eg, ee].
    pub fn atomic_populations(&self) -> [f64; 4] {
        let mut p = [0.0; 4];
        match (&self.space, &self.repr) {
            (Space::Full(hs), StateRepr::Ket(v)) => {
                let cd = hs.cavity_dim();
                for b in 0..4 {
                    p[b] = (0..cd).map(|n| v[b * cd + n].norm_sqr()).sum();
                }
            }
            (Space::Full(hs), StateRepr::Density(m)) => {
                let cd = hs.cavity_dim();
                for b in 0..4 {
                    p[b] = (0..cd).map(|n| m[(b * cd + n, b * cd + n)].re).sum();
                }
            }
            (Space::Atoms, StateRepr::Ket(v)) => {
                for b in 0..4 {
                    p[b] = v[b].norm_sqr();
                }
            }
            (Space::Atoms, StateRepr::Density(m)) => {
                for b in 0..4 {
                    p[b] = m[(b, b)].re;
                }
            }
        }
        p
    }

    pub fn population(&self, atoms: AtomPair) -> f64 {
        self.atomic_populations()[atoms.block()]
    }

    /// ⟨a†a⟩ of the cavity mode; None on the atoms-only space.
    pub fn mean_photon(&self) -> Option<f64> {
        match (&self.space, &self.repr) {
            (Space::Full(hs), StateRepr::Ket(v)) => {
                let cd = hs.cavity_dim();
                let mut s = 0.0;
                for b in 0..4 {
                    for n in 0..cd {
                        s += n as f64 * v[b * cd + n].norm_sqr();
                    }
                }
                Some(s)
            }
            (Space::Full(hs), StateRepr::Density(m)) => {
                let cd = hs.cavity_dim();
                let mut s = 0.0;
                for b in 0..4 {
                    for n in 0..cd {
                        let i = b * cd + n;
                        s += n as f64 * m[(i, i)].re;
                    }
                }
                Some(s)
            }
            (Space::Atoms, _) => None,
        }
    }
}

/// Conjugate transpose.
pub fn dagger(m: &nd::Array2<C64>) -> nd::Array2<C64> {
    m.t().mapv(|z| z.conj())
}

pub fn hermiticity_deviation(m: &nd::Array2<C64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Kronecker product, second factor varying fastest.
pub fn kron(a: &nd::ArrayView2<C64>, b: &nd::ArrayView2<C64>) -> nd::Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = nd::Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            let mut block = out.slice_mut(nd::s![i * rb..(i + 1) * rb, j * cb..(j + 1) * cb]);
            block.assign(&b.mapv(|x| aij * x));
        }
    }
    out
}

/// Chained Kronecker product of all factors, last factor varying fastest.
pub fn tensor_embed(factors: &[nd::ArrayView2<C64>]) -> Result<nd::Array2<C64>> {
    let mut iter = factors.iter();
    let first = iter.next().ok_or(Error::Dimension {
        context: "tensor_embed needs at least one factor",
        expected: 1,
        got: 0,
    })?;
    for f in factors {
        if f.nrows() != f.ncols() {
            return Err(Error::Dimension {
                context: "tensor_embed factor must be square",
                expected: f.nrows(),
                got: f.ncols(),
            });
        }
    }
    let mut acc = first.to_owned();
    for f in iter {
        acc = kron(&acc.view(), f);
    }
    Ok(acc)
}

/// Truncated ladder operator with a[n-1, n] = sqrt(n).
pub fn cavity_ladder(cavity_dim: usize) -> nd::Array2<C64> {
    let mut a = nd::Array2::zeros((cavity_dim, cavity_dim));
    for n in 1..cavity_dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Cavity annihilation operator embedded in the full space.
pub fn annihilation(hs: HilbertSpace) -> Operator {
    let eye4 = nd::Array2::eye(4).mapv(|x: f64| C64::new(x, 0.0));
    let mat = kron(&eye4.view(), &cavity_ladder(hs.cavity_dim()).view());
    Operator {
        space: Space::Full(hs),
        mat,
    }
}

/// a†a embedded in the full space.
pub fn photon_number(hs: HilbertSpace) -> Operator {
    let a = annihilation(hs);
    Operator {
        space: Space::Full(hs),
        mat: dagger(&a.mat).dot(&a.mat),
    }
}

/// 2x2 single-atom matrix in the {|g⟩, |e⟩} basis.
pub fn atom_matrix(op: AtomOp) -> nd::Array2<C64> {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    match op {
        AtomOp::SigmaPlus => nd::array![[z, z], [one, z]],
        AtomOp::SigmaMinus => nd::array![[z, one], [z, z]],
        AtomOp::SigmaZ => nd::array![[-one, z], [z, one]],
        AtomOp::ProjectExcited => nd::array![[z, z], [z, one]],
        AtomOp::ProjectGround => nd::array![[one, z], [z, z]],
    }
}

/// Single-atom operator embedded in the full space.
pub fn atom_operator(hs: HilbertSpace, atom: Atom, op: AtomOp) -> Operator {
    let eye2 = nd::Array2::eye(2).mapv(|x: f64| C64::new(x, 0.0));
    let eyec = nd::Array2::eye(hs.cavity_dim()).mapv(|x: f64| C64::new(x, 0.0));
    let m = atom_matrix(op);
    let factors = match atom {
        Atom::One => [m.view(), eye2.view(), eyec.view()],
        Atom::Two => [eye2.view(), m.view(), eyec.view()],
    };
    let mat = tensor_embed(&factors).expect("square factors always embed");
    Operator {
        space: Space::Full(hs),
        mat,
    }
}

/// Single-atom operator embedded in the 4-dimensional atoms-only space.
pub fn atom_operator_atoms_only(atom: Atom, op: AtomOp) -> nd::Array2<C64> {
    let eye2 = nd::Array2::eye(2).mapv(|x: f64| C64::new(x, 0.0));
    let m = atom_matrix(op);
    let (a, b) = match atom {
        Atom::One => (m.view(), eye2.view()),
        Atom::Two => (eye2.view(), m.view()),
    };
    kron(&a, &b)
}

/// Eigendecomposition of a Hermitian operator.
pub struct Eig {
    /// Ascending.
    pub values: nd::Array1<f64>,
    /// Column k is the eigenvector of values[k].
    pub vectors: nd::Array2<C64>,
}

/// Hermiticity is enforced up to 1e-10 relative to the largest element.
pub fn eig_hermitian(op: &Operator) -> Result<Eig> {
    eig_hermitian_mat(&op.mat)
}

pub fn eig_hermitian_mat(m: &nd::Array2<C64>) -> Result<Eig> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let dev = hermiticity_deviation(m);
    if dev > 1e-10 * scale {
        return Err(Error::NonHermitian { deviation: dev });
    }
    let d = m.nrows();
    // Symmetrize before handing off so roundoff in the input cannot leak
    // a complex eigenvalue out of the solver.
    let mut na = nalgebra::DMatrix::<C64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            na[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)].conj());
        }
    }
    let eig = na.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut values = nd::Array1::zeros(d);
    let mut vectors = nd::Array2::zeros((d, d));
    for (k, &src) in order.iter().enumerate() {
        values[k] = eig.eigenvalues[src];
        for i in 0..d {
            vectors[(i, k)] = eig.eigenvectors[(i, src)];
        }
    }
    Ok(Eig { values, vectors })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &nd::Array2<C64>) -> Result<f64> {
    Ok(eig_hermitian_mat(m)?.values[0])
}

/// exp(-i H dt) applied to a ket or conjugated onto a density matrix,
/// computed through the eigendecomposition of H.
pub fn expm_action(op: &Operator, state: &QuantumState, dt: f64) -> Result<QuantumState> {
    if op.space != state.space {
        return Err(Error::Dimension {
            context: "expm_action",
            expected: op.dim(),
            got: state.dim(),
        });
    }
    let eig = eig_hermitian(op)?;
    let phases: nd::Array1<C64> = eig
        .values
        .iter()
        .map(|&w| C64::from_polar(1.0, -w * dt))
        .collect();
    let v = &eig.vectors;
    let vdag = dagger(v);
    match &state.repr {
        StateRepr::Ket(psi) => {
            let mut coeff = vdag.dot(psi);
            coeff.zip_mut_with(&phases, |c, ph| *c *= ph);
            let out = v.dot(&coeff);
            QuantumState::from_ket(state.space, out)
        }
        StateRepr::Density(rho) => {
            let mut core = vdag.dot(rho).dot(v);
            for i in 0..core.nrows() {
                for j in 0..core.ncols() {
                    core[(i, j)] *= phases[i] * phases[j].conj();
                }
            }
            let out = v.dot(&core).dot(&vdag);
            QuantumState::from_density(state.space, out)
        }
    }
}
