//! Exact complex linear algebra on one and two spin-1/2 systems.
//!
//! Everything here is fixed-size (2×2 and 4×4) and serves as the brute-force
//! reference the closed-form predictions are checked against. Basis
//! convention: `|+⟩` is spin-up along the lab z axis, and two-spin operators
//! are ordered A⊗B.

use std::fmt;
use std::ops::Neg;

use nalgebra::{Matrix2, Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for exact-algebra identities.
pub const EXACT_TOL: f64 = 1e-12;

pub type ComplexMatrix2 = Matrix2<Complex64>;
pub type ComplexMatrix4 = Matrix4<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A unit vector in R³: a measurement axis, a polarization, or a final-state
/// momentum direction.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Direction {
    x: f64,
    y: f64,
    z: f64,
}

impl Direction {
    pub const X: Direction = Direction { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Direction = Direction { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Direction = Direction { x: 0.0, y: 0.0, z: 1.0 };

    /// Accepts the components only if they already form a unit vector
    /// (within [`EXACT_TOL`] on the squared norm).
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || (n2 - 1.0).abs() > EXACT_TOL {
            return Err(Error::NonUnitDirection { norm: n2.sqrt() });
        }
        Ok(Direction { x, y, z })
    }

    /// Rescales any non-zero vector onto the unit sphere.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::ZeroVector);
        }
        Ok(Direction { x: x / n, y: y / n, z: z / n })
    }

    pub fn from_vector(v: &Vector3<f64>) -> Result<Self> {
        Self::normalize(v.x, v.y, v.z)
    }

    /// Polar angle `theta` from +z and azimuth `phi` from +x, in radians.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        // sin²+cos² is unit to within a few ulp.
        Direction { x: st * cp, y: st * sp, z: ct }
    }

    /// Isotropically distributed direction.
    pub fn random(rng: &mut impl rand::Rng) -> Self {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        Self::from_spherical(z.acos(), phi)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn dot_vec(&self, v: &Vector3<f64>) -> f64 {
        self.x * v.x + self.y * v.y + self.z * v.z
    }

    /// Angle to `other` in [0, π].
    pub fn angle_to(&self, other: &Direction) -> f64 {
        // atan2 of |cross| and dot is accurate near 0 and π, unlike acos.
        let c = self.to_vector().cross(&other.to_vector()).norm();
        c.atan2(self.dot(other))
    }

    /// Two unit vectors completing `self` to a right-handed orthonormal frame.
    pub fn orthonormal_complement(&self) -> (Vector3<f64>, Vector3<f64>) {
        let u = self.to_vector();
        // Branchless frame construction (Duff et al. 2017).
        let sign = 1.0f64.copysign(u.z);
        let a = -1.0 / (sign + u.z);
        let b = u.x * u.y * a;
        let e1 = Vector3::new(1.0 + sign * u.x * u.x * a, sign * b, -sign * u.x);
        let e2 = Vector3::new(b, sign + u.y * u.y * a, -u.y);
        (e1, e2)
    }
}

impl Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction { x: -self.x, y: -self.y, z: -self.z }
    }
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.x, self.y, self.z)
    }
}

impl TryFrom<[f64; 3]> for Direction {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        Direction::new(v[0], v[1], v[2])
    }
}

impl From<Direction> for [f64; 3] {
    fn from(d: Direction) -> [f64; 3] {
        d.components()
    }
}

pub fn identity2() -> ComplexMatrix2 {
    ComplexMatrix2::identity()
}

pub fn sigma_x() -> ComplexMatrix2 {
    ComplexMatrix2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> ComplexMatrix2 {
    ComplexMatrix2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> ComplexMatrix2 {
    ComplexMatrix2::new(ONE, ZERO, ZERO, -ONE)
}

/// `[σx, σy, σz]`
pub fn pauli() -> [ComplexMatrix2; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// `σ·d`
pub fn pauli_dot(d: &Direction) -> ComplexMatrix2 {
    let (x, y, z) = (d.x, d.y, d.z);
    ComplexMatrix2::new(Complex64::new(z, 0.0), Complex64::new(x, -y), Complex64::new(x, y), Complex64::new(-z, 0.0))
}

/// Pure spin state polarized along `u`, as the projector `(1 + σ·u)/2`.
pub fn spin_state(u: &Direction) -> ComplexMatrix2 {
    (identity2() + pauli_dot(u)).scale(0.5)
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix2, b: &ComplexMatrix2) -> ComplexMatrix4 {
    a.kronecker(b)
}

/// Largest entry-wise modulus of `m − m†`.
pub fn hermitian_residual2(m: &ComplexMatrix2) -> f64 {
    (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn hermitian_residual4(m: &ComplexMatrix4) -> f64 {
    (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian 2×2 matrix, ascending.
pub fn eigenvalues2(m: &ComplexMatrix2) -> [f64; 2] {
    let ev = m.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1]];
    out.sort_by(f64::total_cmp);
    out
}

/// Eigenvalues of a Hermitian 4×4 matrix, ascending.
pub fn eigenvalues4(m: &ComplexMatrix4) -> [f64; 4] {
    let ev = m.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(f64::total_cmp);
    out
}

/// Checks trace, Hermiticity and positivity of a one-qubit density matrix.
pub fn validate_density2(rho: &ComplexMatrix2) -> Result<()> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > EXACT_TOL || tr.im.abs() > EXACT_TOL {
        return Err(Error::InvalidState(format!("trace {tr} != 1")));
    }
    let h = hermitian_residual2(rho);
    if h > EXACT_TOL {
        return Err(Error::InvalidState(format!("not Hermitian (residual {h:e})")));
    }
    // Principal minors of a 2×2 Hermitian matrix.
    let d0 = rho[(0, 0)].re;
    let d1 = rho[(1, 1)].re;
    let det = rho.determinant().re;
    if d0 < -EXACT_TOL || d1 < -EXACT_TOL || det < -EXACT_TOL {
        return Err(Error::InvalidState(format!("not positive semidefinite (minors {d0}, {d1}, {det})")));
    }
    Ok(())
}

/// Density matrix of two spin-1/2 particles, ordered A⊗B.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    rho: ComplexMatrix4,
}

impl TwoQubitState {
    /// Validates trace, Hermiticity and positivity.
    pub fn from_density(rho: ComplexMatrix4) -> Result<Self> {
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > EXACT_TOL || tr.im.abs() > EXACT_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let h = hermitian_residual4(&rho);
        if h > EXACT_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (residual {h:e})")));
        }
        let min = eigenvalues4(&rho)[0];
        if min < -EXACT_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(TwoQubitState { rho })
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector in the basis
    /// `|++⟩, |+−⟩, |−+⟩, |−−⟩`.
    pub fn from_pure(psi: Vector4<Complex64>) -> Result<Self> {
        let n = psi.norm();
        if (n - 1.0).abs() > EXACT_TOL {
            return Err(Error::InvalidState(format!("state vector norm {n} != 1")));
        }
        Self::from_density(psi * psi.adjoint())
    }

    /// `(|+−⟩ − |−+⟩)/√2`
    pub fn singlet() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = Vector4::new(ZERO, h, -h, ZERO);
        TwoQubitState { rho: psi * psi.adjoint() }
    }

    /// `(|+−⟩ + |−+⟩)/√2`, the `m = 0` member of the spin triplet.
    pub fn triplet_m0() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = Vector4::new(ZERO, h, h, ZERO);
        TwoQubitState { rho: psi * psi.adjoint() }
    }

    pub fn density(&self) -> &ComplexMatrix4 {
        &self.rho
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    /// `tr(ρ · op)` for a Hermitian observable.
    pub fn expectation(&self, op: &ComplexMatrix4) -> Result<f64> {
        let h = hermitian_residual4(op);
        if h > EXACT_TOL {
            return Err(Error::NotHermitian { residual: h });
        }
        let v = (self.rho * op).trace();
        if v.im.abs() > EXACT_TOL {
            return Err(Error::NotHermitian { residual: v.im.abs() });
        }
        Ok(v.re)
    }

    /// Reduced state of particle A.
    pub fn reduced_a(&self) -> ComplexMatrix2 {
        let r = &self.rho;
        ComplexMatrix2::new(r[(0, 0)] + r[(1, 1)], r[(0, 2)] + r[(1, 3)], r[(2, 0)] + r[(3, 1)], r[(2, 2)] + r[(3, 3)])
    }

    /// Reduced state of particle B.
    pub fn reduced_b(&self) -> ComplexMatrix2 {
        let r = &self.rho;
        ComplexMatrix2::new(r[(0, 0)] + r[(2, 2)], r[(0, 1)] + r[(2, 3)], r[(1, 0)] + r[(3, 2)], r[(1, 1)] + r[(3, 3)])
    }

    /// Spin-correlation matrix `C_ij = ⟨σ_i ⊗ σ_j⟩`.
    pub fn spin_correlation_matrix(&self) -> [[f64; 3]; 3] {
        let s = pauli();
        let mut c = [[0.0; 3]; 3];
        for (i, si) in s.iter().enumerate() {
            for (j, sj) in s.iter().enumerate() {
                // Products of Pauli matrices are Hermitian; trace is real.
                c[i][j] = (self.rho * tensor(si, sj)).trace().re;
            }
        }
        c
    }
}

/// Expectation of a Hermitian two-spin observable in `state`.
pub fn expectation(state: &TwoQubitState, op: &ComplexMatrix4) -> Result<f64> {
    state.expectation(op)
}
