//! Truncated Fock-space and qubit primitives.
//!
//! The composite space is always ordered qubit first, so an index `q * N + n`
//! addresses `|q> ⊗ |n>`. The qubit basis is `|e> = 0`, `|g> = 1`, which makes
//! `σz = diag(+1, -1)`.

use std::fmt;

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector, I, ONE, ZERO};

/// Index of the excited state in the qubit basis.
pub const EXCITED: usize = 0;
/// Index of the ground state in the qubit basis.
pub const GROUND: usize = 1;

/// Motional number basis `|0> … |N-1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidParameter("Fock cutoff must be at least 1".into()));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Largest `|alpha|^2` accepted by displacement-based builders.
    pub fn guard_band(&self) -> f64 {
        self.cutoff as f64 / 4.0
    }

    pub fn check_guard_band(&self, alpha: C64) -> Result<()> {
        let norm_sqr = alpha.norm_sqr();
        let limit = self.guard_band();
        // allow for round-off on points placed exactly at the edge
        if norm_sqr > limit * (1.0 + 1e-12) {
            return Err(Error::GuardBandViolation { alpha, norm_sqr, limit });
        }
        Ok(())
    }
}

/// The space an operator or state lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Qubit,
    Fock(FockSpace),
    /// qubit ⊗ Fock
    Composite(FockSpace),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Qubit => 2,
            Space::Fock(f) => f.cutoff,
            Space::Composite(f) => 2 * f.cutoff,
        }
    }

    pub fn composite(cutoff: usize) -> Result<Self> {
        Ok(Space::Composite(FockSpace::new(cutoff)?))
    }

    pub(crate) fn ensure_same(&self, other: &Space) -> Result<()> {
        if self != other {
            return Err(mismatch(self, other));
        }
        Ok(())
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Qubit => write!(f, "qubit"),
            Space::Fock(s) => write!(f, "fock({})", s.cutoff),
            Space::Composite(s) => write!(f, "qubit⊗fock({})", s.cutoff),
        }
    }
}

fn mismatch(a: &Space, b: &Space) -> Error {
    Error::SpaceMismatch { left: a.to_string(), right: b.to_string() }
}

/// A dense complex matrix tagged with the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: Space,
    mat: Matrix,
}

impl Operator {
    pub fn new(space: Space, mat: Matrix) -> Result<Self> {
        let d = space.dim();
        if mat.dim() != (d, d) {
            return Err(Error::SpaceMismatch {
                left: space.to_string(),
                right: format!("{}x{} matrix", mat.nrows(), mat.ncols()),
            });
        }
        Ok(Self { space, mat })
    }

    // Builders in this crate construct matrices of the right size by
    // construction.
    pub(crate) fn from_parts(space: Space, mat: Matrix) -> Self {
        debug_assert_eq!(mat.dim(), (space.dim(), space.dim()));
        Self { space, mat }
    }

    pub fn identity(space: Space) -> Self {
        Self::from_parts(space, linalg::identity(space.dim()))
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        Self::from_parts(space, Array2::zeros((d, d)))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    pub fn dagger(&self) -> Self {
        Self::from_parts(self.space, linalg::dagger(&self.mat))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_parts(self.space, self.mat.mapv(|z| z * c))
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(Self::from_parts(self.space, &self.mat + &other.mat))
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(Self::from_parts(self.space, &self.mat - &other.mat))
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Operator) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(Self::from_parts(self.space, self.mat.dot(&other.mat)))
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(Self::from_parts(self.space, linalg::commutator(&self.mat, &other.mat)))
    }

    /// `u · self · u^dagger`
    pub fn conjugate_by(&self, u: &Operator) -> Result<Self> {
        self.space.ensure_same(&u.space)?;
        Ok(Self::from_parts(self.space, linalg::conjugate(&u.mat, &self.mat)))
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.space.ensure_same(&psi.space)?;
        Ok(StateVector { space: self.space, amps: self.mat.dot(&psi.amps) })
    }

    /// `<psi|self|psi>`
    pub fn expectation(&self, psi: &StateVector) -> Result<C64> {
        self.space.ensure_same(&psi.space)?;
        Ok(linalg::inner(&psi.amps, &self.mat.dot(&psi.amps)))
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.space.ensure_same(&other.space)?;
        Ok(linalg::max_abs_diff(&self.mat, &other.mat))
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `max |U U^dagger - I|`
    pub fn unitarity_error(&self) -> f64 {
        let p = self.mat.dot(&linalg::dagger(&self.mat));
        linalg::max_abs_diff(&p, &linalg::identity(self.space.dim()))
    }

    /// Max elementwise difference restricted to rows and columns whose Fock
    /// index is below `n_max`. Used to compare operators away from the
    /// truncation edge.
    pub fn low_block_diff(&self, other: &Operator, n_max: usize) -> Result<f64> {
        self.space.ensure_same(&other.space)?;
        let keep: Vec<usize> = (0..self.space.dim())
            .filter(|&i| fock_index(self.space, i) < n_max)
            .collect();
        let mut dev: f64 = 0.0;
        for &i in &keep {
            for &j in &keep {
                dev = dev.max((self.mat[[i, j]] - other.mat[[i, j]]).norm());
            }
        }
        Ok(dev)
    }
}

fn fock_index(space: Space, i: usize) -> usize {
    match space {
        Space::Qubit => 0,
        Space::Fock(_) => i,
        Space::Composite(f) => i % f.cutoff,
    }
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: Space,
    amps: Vector,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(space: Space, amps: Vector) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::SpaceMismatch {
                left: space.to_string(),
                right: format!("vector of length {}", amps.len()),
            });
        }
        let n = linalg::norm(&amps);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter("state vector has zero or non-finite norm".into()));
        }
        Ok(Self { space, amps: amps.mapv(|z| z / n) })
    }

    pub(crate) fn from_parts(space: Space, amps: Vector) -> Self {
        Self { space, amps }
    }

    pub fn basis(space: Space, index: usize) -> Result<Self> {
        let dim = space.dim();
        if index >= dim {
            return Err(Error::IndexOutOfSpace { index, dim });
        }
        let mut amps = Array1::zeros(dim);
        amps[index] = ONE;
        Ok(Self { space, amps })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amps)
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.space.ensure_same(&other.space)?;
        Ok(linalg::inner(&self.amps, &other.amps))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { space: self.space, amps: self.amps.mapv(|z| z * c) }
    }

    /// `|qubit> ⊗ |motion>`
    pub fn tensor(qubit: &StateVector, motion: &StateVector) -> Result<Self> {
        let fock = match (qubit.space, motion.space) {
            (Space::Qubit, Space::Fock(f)) => f,
            (a, b) => return Err(mismatch(&a, &b)),
        };
        let n = fock.cutoff;
        let mut amps = Array1::zeros(2 * n);
        for q in 0..2 {
            for k in 0..n {
                amps[q * n + k] = qubit.amps[q] * motion.amps[k];
            }
        }
        Ok(Self { space: Space::Composite(fock), amps })
    }

    /// Normalized superposition `Σ c_i |psi_i>`.
    pub fn superpose(terms: &[(C64, &StateVector)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty superposition".into()))?;
        let space = first.space;
        let mut amps = Array1::zeros(space.dim());
        for (c, psi) in terms {
            space.ensure_same(&psi.space)?;
            amps.scaled_add(*c, &psi.amps);
        }
        Self::new(space, amps)
    }

    /// Density matrix `|psi><psi|`.
    pub fn projector(&self) -> Matrix {
        let col = self.amps.view().insert_axis(Axis(1));
        let row = self.amps.mapv(|z| z.conj()).insert_axis(Axis(0));
        col.dot(&row)
    }
}

/// A mixed state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: Space,
    mat: Matrix,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-9;
    pub const POSITIVITY_TOL: f64 = 1e-9;

    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(space: Space, mat: Matrix) -> Result<Self> {
        let op = Operator::new(space, mat)?;
        let dev = op.hermiticity_error();
        if dev > Self::HERMITIAN_TOL {
            return Err(Error::NonHermitianInput { deviation: dev });
        }
        let rho = Self { space, mat: op.into_matrix() };
        let tr = rho.trace();
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::InvalidParameter(format!("density matrix trace {tr}")));
        }
        let min = rho.min_eigenvalue()?;
        if min < -Self::POSITIVITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix has eigenvalue {min:.3e}"
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_parts(space: Space, mat: Matrix) -> Self {
        Self { space, mat }
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        Self { space: psi.space, mat: psi.projector() }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.mat).re
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = linalg::hermitian_eigen(&self.mat)?;
        Ok(vals.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    /// `Tr(op · rho)`
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        self.space.ensure_same(&op.space())?;
        Ok(linalg::trace(&op.matrix().dot(&self.mat)))
    }
}

/// Annihilation operator `a` with `<m|a|n> = sqrt(n) δ_{m,n-1}`.
pub fn annihilation(space: FockSpace) -> Operator {
    let n = space.cutoff;
    let mut m = Array2::zeros((n, n));
    for k in 1..n {
        m[[k - 1, k]] = linalg::real((k as f64).sqrt());
    }
    Operator::from_parts(Space::Fock(space), m)
}

pub fn creation(space: FockSpace) -> Operator {
    annihilation(space).dagger()
}

/// `a^dagger a`, built directly as a diagonal.
pub fn number_operator(space: FockSpace) -> Operator {
    let n = space.cutoff;
    let m = Array2::from_diag(&Array1::from_shape_fn(n, |k| linalg::real(k as f64)));
    Operator::from_parts(Space::Fock(space), m)
}

/// `D(alpha) = exp(alpha a^dagger - alpha^* a)` on the truncated space.
///
/// The truncated generator is exponentiated exactly through the
/// eigendecomposition of the Hermitian matrix `i(alpha a^dagger - alpha^* a)`,
/// so the result is unitary to round-off regardless of the cutoff.
pub fn displacement(alpha: C64, space: FockSpace) -> Result<Operator> {
    space.check_guard_band(alpha)?;
    Ok(displacement_unchecked(alpha, space))
}

pub(crate) fn displacement_unchecked(alpha: C64, space: FockSpace) -> Operator {
    if alpha == ZERO {
        return Operator::identity(Space::Fock(space));
    }
    let a = annihilation(space).into_matrix();
    let ad = linalg::dagger(&a);
    // K = i(alpha a† - alpha* a) is Hermitian and D = exp(-iK).
    let k = (&ad * alpha - &a * alpha.conj()).mapv(|z| z * I);
    let d = linalg::unitary_exp(&k, 1.0).expect("eigendecomposition of a tridiagonal Hermitian matrix");
    Operator::from_parts(Space::Fock(space), d)
}

/// The single-qubit operators used throughout.
#[derive(Debug, Clone)]
pub struct QubitOps {
    pub sx: Operator,
    pub sy: Operator,
    pub sz: Operator,
    /// `σ+ = |e><g|`
    pub sp: Operator,
    /// `σ- = |g><e|`
    pub sm: Operator,
    /// `|g><g|`
    pub proj_g: Operator,
    /// `|e><e|`
    pub proj_e: Operator,
    /// `|-><-|` with `|-> = (|e> - |g>)/√2`
    pub proj_minus: Operator,
}

fn qubit(m: [[C64; 2]; 2]) -> Operator {
    Operator::from_parts(Space::Qubit, ndarray::arr2(&m))
}

pub fn qubit_ops() -> QubitOps {
    let h = linalg::real(0.5);
    QubitOps {
        sx: qubit([[ZERO, ONE], [ONE, ZERO]]),
        sy: qubit([[ZERO, -I], [I, ZERO]]),
        sz: qubit([[ONE, ZERO], [ZERO, -ONE]]),
        sp: qubit([[ZERO, ONE], [ZERO, ZERO]]),
        sm: qubit([[ZERO, ZERO], [ONE, ZERO]]),
        proj_g: qubit([[ZERO, ZERO], [ZERO, ONE]]),
        proj_e: qubit([[ONE, ZERO], [ZERO, ZERO]]),
        proj_minus: qubit([[h, -h], [-h, h]]),
    }
}

pub fn excited() -> StateVector {
    StateVector::basis(Space::Qubit, EXCITED).expect("qubit basis")
}

pub fn ground() -> StateVector {
    StateVector::basis(Space::Qubit, GROUND).expect("qubit basis")
}

/// Kronecker product `a ⊗ b`. Only `qubit ⊗ Fock` is a valid ordering.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    match (a.space, b.space) {
        (Space::Qubit, Space::Fock(f)) => {
            Ok(Operator::from_parts(Space::Composite(f), linalg::kron(&a.mat, &b.mat)))
        }
        (x, y) => Err(mismatch(&x, &y)),
    }
}

/// `op ⊗ I_N`
pub fn lift_qubit(op: &Operator, fock: FockSpace) -> Result<Operator> {
    tensor(op, &Operator::identity(Space::Fock(fock)))
}

/// `I_2 ⊗ op`
pub fn lift_motion(op: &Operator) -> Result<Operator> {
    tensor(&Operator::identity(Space::Qubit), op)
}

/// `D(alpha)|0>`.
pub fn coherent_state(alpha: C64, space: FockSpace) -> Result<StateVector> {
    let d = displacement(alpha, space)?;
    let vac = number_state(0, space)?;
    d.apply(&vac)
}

/// `N(|alpha> + |-alpha>)`.
pub fn cat_state(alpha: C64, space: FockSpace) -> Result<StateVector> {
    let plus = coherent_state(alpha, space)?;
    let minus = coherent_state(-alpha, space)?;
    StateVector::superpose(&[(ONE, &plus), (ONE, &minus)])
}

/// Closed-form cat normalization `1/sqrt(2 + 2 exp(-2|alpha|^2))`.
pub fn cat_normalization(alpha: C64) -> f64 {
    1.0 / (2.0 + 2.0 * (-2.0 * alpha.norm_sqr()).exp()).sqrt()
}

pub fn number_state(n: usize, space: FockSpace) -> Result<StateVector> {
    StateVector::basis(Space::Fock(space), n)
}

/// `|<psi|phi>|^2`
pub fn overlap_fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr())
}
