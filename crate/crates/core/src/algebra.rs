//! Qubit and two-qubit operator arithmetic.
//!
//! Single-qubit objects are kept in Bloch form; matrices are derived on
//! demand. All single-qubit traces then reduce to dot products, so the
//! quantities that feed bound checks carry essentially no floating error.

use num_complex::Complex64;

use crate::bounds::BellExpression;
use crate::eig::jacobi_symmetric;
use crate::error::{Error, Result};

pub const UNIT_TOL: f64 = 1e-9;
pub const HERMITIAN_TOL: f64 = 1e-10;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real three-vector of Pauli coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.x, s * self.y, s * self.z)
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            None
        } else {
            Some(self.scale(1.0 / n))
        }
    }
}

/// Dichotomic qubit observable `A = n.sigma` with eigenvalues +1 and -1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitObservable {
    bloch: BlochVector,
}

impl QubitObservable {
    /// Build from a Bloch vector, renormalizing drift up to `UNIT_TOL`.
    pub fn from_bloch(v: BlochVector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitBloch { norm, tol: UNIT_TOL });
        }
        Ok(Self {
            bloch: v.normalized().expect("norm near 1"),
        })
    }

    /// Build without renormalization; the vector must be unit to `UNIT_TOL`.
    pub fn from_bloch_strict(v: BlochVector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitBloch { norm, tol: UNIT_TOL });
        }
        Ok(Self { bloch: v })
    }

    pub fn sigma_x() -> Self {
        Self { bloch: BlochVector::new(1.0, 0.0, 0.0) }
    }

    pub fn sigma_y() -> Self {
        Self { bloch: BlochVector::new(0.0, 1.0, 0.0) }
    }

    pub fn sigma_z() -> Self {
        Self { bloch: BlochVector::new(0.0, 0.0, 1.0) }
    }

    pub fn bloch(&self) -> BlochVector {
        self.bloch
    }

    pub fn negated(&self) -> Self {
        Self { bloch: self.bloch.neg() }
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::from_bloch(0.0, &self.bloch)
    }
}

/// Qubit state `rho = (I + r.sigma)/2` with `|r| <= 1`.
///
/// Rank-1 projectors and the pure states they prepare share this
/// representation; the role is carried by the call site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensity {
    bloch: BlochVector,
}

impl QubitDensity {
    pub fn from_bloch(v: BlochVector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm > 1.0 + 1e-12 {
            return Err(Error::Validation(format!(
                "density Bloch norm {norm} exceeds 1"
            )));
        }
        Ok(Self { bloch: v })
    }

    pub fn maximally_mixed() -> Self {
        Self { bloch: BlochVector::new(0.0, 0.0, 0.0) }
    }

    pub fn bloch(&self) -> BlochVector {
        self.bloch
    }

    pub fn is_pure(&self) -> bool {
        (self.bloch.norm() - 1.0).abs() <= 1e-12
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::from_bloch(0.5, &self.bloch.scale(0.5))
    }
}

/// Projector `(I + sign A)/2` onto the `sign` eigenspace of `A`.
pub fn projector_of(a: &QubitObservable, sign: i8) -> QubitDensity {
    let s = if sign >= 0 { 1.0 } else { -1.0 };
    QubitDensity { bloch: a.bloch().scale(s) }
}

/// `Tr[rho P]` for a state and a projector/effect, via Bloch dot product.
pub fn expectation_effect(state: &QubitDensity, effect: &QubitDensity) -> f64 {
    0.5 * (1.0 + state.bloch().dot(&effect.bloch()))
}

/// `Tr[rho A]` for a dichotomic observable.
pub fn expectation_observable(state: &QubitDensity, obs: &QubitObservable) -> f64 {
    state.bloch().dot(&obs.bloch())
}

/// Dense 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    /// `c*I + r.sigma` (so a density is `from_bloch(0.5, r/2)` scaled form).
    fn from_bloch(c: f64, r: &BlochVector) -> Self {
        Mat2([
            [Complex64::new(c + r.z, 0.0), Complex64::new(r.x, -r.y)],
            [Complex64::new(r.x, r.y), Complex64::new(c - r.z, 0.0)],
        ])
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[i][j] + other.0[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    m.0[i][j] += self.0[i][k] * other.0[k][j];
                }
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Decompose a Hermitian matrix as `c*I + r.sigma`.
    pub fn bloch_decomposition(&self) -> (f64, BlochVector) {
        let c = 0.5 * (self.0[0][0].re + self.0[1][1].re);
        let r = BlochVector::new(
            self.0[0][1].re,
            -self.0[0][1].im,
            0.5 * (self.0[0][0].re - self.0[1][1].re),
        );
        (c, r)
    }
}

/// Dense 4x4 complex operator on two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitOperator {
    pub m: [[Complex64; 4]; 4],
}

impl TwoQubitOperator {
    pub fn zero() -> Self {
        Self { m: [[ZERO; 4]; 4] }
    }

    pub fn identity() -> Self {
        let mut op = Self::zero();
        for i in 0..4 {
            op.m[i][i] = ONE;
        }
        op
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut op = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                op.m[i][j] = self.m[i][j] + other.m[i][j];
            }
        }
        op
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut op = *self;
        for row in op.m.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        op
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut op = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    op.m[i][j] += self.m[i][k] * other.m[k][j];
                }
            }
        }
        op
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.m[i][i]).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                dev = dev.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }
}

/// Kronecker product of two 2x2 matrices.
pub fn tensor_product(a: &Mat2, b: &Mat2) -> TwoQubitOperator {
    let mut op = TwoQubitOperator::zero();
    for i in 0..4 {
        for j in 0..4 {
            op.m[i][j] = a.0[i / 2][j / 2] * b.0[i % 2][j % 2];
        }
    }
    op
}

pub fn tensor_observables(a: &QubitObservable, b: &QubitObservable) -> TwoQubitOperator {
    tensor_product(&a.matrix(), &b.matrix())
}

/// Partial trace over the second qubit.
pub fn partial_trace_b(op: &TwoQubitOperator) -> Mat2 {
    let mut m = Mat2::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                m.0[i][j] += op.m[2 * i + k][2 * j + k];
            }
        }
    }
    m
}

/// `sum_xy M[x][y] A_x (x) B_y`.
pub fn bell_operator(
    expr: &BellExpression,
    alice: &[QubitObservable],
    bob: &[QubitObservable],
) -> Result<TwoQubitOperator> {
    if alice.len() != expr.rows() || bob.len() != expr.cols() {
        return Err(Error::DimensionMismatch(format!(
            "expression is {}x{} but settings are {}x{}",
            expr.rows(),
            expr.cols(),
            alice.len(),
            bob.len()
        )));
    }
    let mut op = TwoQubitOperator::zero();
    for (x, ax) in alice.iter().enumerate() {
        for (y, by) in bob.iter().enumerate() {
            let c = expr.coeff(x, y) as f64;
            if c != 0.0 {
                op = op.add(&tensor_observables(ax, by).scale(c));
            }
        }
    }
    Ok(op)
}

/// Two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    op: TwoQubitOperator,
}

impl TwoQubitState {
    pub fn new(op: TwoQubitOperator) -> Result<Self> {
        if !op.is_hermitian(1e-12) {
            return Err(Error::NotHermitian(op.hermiticity_deviation()));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::Validation(format!("state trace {tr} is not 1")));
        }
        let (eigs, _) = hermitian_eigensystem(&op);
        if eigs.iter().any(|&e| e < -1e-10) {
            return Err(Error::Validation("state has negative eigenvalue".into()));
        }
        Ok(Self { op })
    }

    /// Rank-1 density `|v><v|` from a normalized 4-vector.
    pub fn from_pure(v: &[Complex64; 4]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "pure state vector norm^2 {norm2} is not 1"
            )));
        }
        let mut op = TwoQubitOperator::zero();
        for i in 0..4 {
            for j in 0..4 {
                op.m[i][j] = v[i] * v[j].conj() / norm2;
            }
        }
        Ok(Self { op })
    }

    pub fn operator(&self) -> &TwoQubitOperator {
        &self.op
    }

    pub fn reduced_a(&self) -> Mat2 {
        partial_trace_b(&self.op)
    }
}

/// `Tr[rho O]` for a Hermitian two-qubit operator.
pub fn expectation_two_qubit(state: &TwoQubitState, obs: &TwoQubitOperator) -> Result<f64> {
    let tr = state.op.mul(obs).trace();
    if tr.im.abs() > 1e-9 {
        return Err(Error::NotHermitian(tr.im.abs()));
    }
    Ok(tr.re)
}

/// Named maximally entangled two-qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "phi_plus" => Ok(Self::PhiPlus),
            "phi_minus" => Ok(Self::PhiMinus),
            "psi_plus" => Ok(Self::PsiPlus),
            "psi_minus" => Ok(Self::PsiMinus),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PhiPlus => "phi_plus",
            Self::PhiMinus => "phi_minus",
            Self::PsiPlus => "psi_plus",
            Self::PsiMinus => "psi_minus",
        }
    }
}

pub fn maximally_entangled_state(kind: BellState) -> TwoQubitState {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let a = Complex64::new(r, 0.0);
    let v = match kind {
        BellState::PhiPlus => [a, ZERO, ZERO, a],
        BellState::PhiMinus => [a, ZERO, ZERO, -a],
        BellState::PsiPlus => [ZERO, a, a, ZERO],
        BellState::PsiMinus => [ZERO, a, -a, ZERO],
    };
    TwoQubitState::from_pure(&v).expect("Bell states are normalized")
}

/// All eigenvalues and eigenvectors of a 4x4 Hermitian operator.
///
/// Uses the real symmetric embedding; the eight embedded eigenpairs
/// collapse onto the four complex ones.
/// All four eigenvalues, ascending. The real embedding carries each twice,
/// so adjacent sorted pairs collapse to one value each.
pub fn hermitian_eigenvalues(h: &TwoQubitOperator) -> Result<[f64; 4]> {
    if !h.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian(h.hermiticity_deviation()));
    }
    let (eigs, _) = hermitian_eigensystem(h);
    let mut s = eigs;
    s.sort_by(f64::total_cmp);
    Ok([s[0], s[2], s[4], s[6]])
}

fn hermitian_eigensystem(h: &TwoQubitOperator) -> ([f64; 8], [[f64; 8]; 8]) {
    let mut e = [[0.0f64; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            e[i][j] = h.m[i][j].re;
            e[i + 4][j + 4] = h.m[i][j].re;
            e[i][j + 4] = -h.m[i][j].im;
            e[i + 4][j] = h.m[i][j].im;
        }
    }
    jacobi_symmetric(e)
}

/// Largest eigenvalue and a matching normalized eigenvector.
pub fn max_eigenvalue_hermitian(h: &TwoQubitOperator) -> Result<(f64, [Complex64; 4])> {
    if !h.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian(h.hermiticity_deviation()));
    }
    let (eigs, vecs) = hermitian_eigensystem(h);
    let (k, &value) = eigs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let mut v = [ZERO; 4];
    for i in 0..4 {
        v[i] = Complex64::new(vecs[i][k], vecs[i + 4][k]);
    }
    let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in v.iter_mut() {
        *c /= norm;
    }
    Ok((value, v))
}
