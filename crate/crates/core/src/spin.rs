//! Angular-momentum operators and the coherent spin Hamiltonian.
//!
//! Basis ordering: index `k` holds the `J_z` eigenstate with `M = J - k`, so
//! the fully polarised state `|J, J⟩` is the first basis vector.

use std::fmt;

use nalgebra::DVector;

use crate::{CMatrix, Error, Result, C64};

/// Spin size stored as `2J` so half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinSize {
    two_j: u32,
}

impl SpinSize {
    pub const HALF: SpinSize = SpinSize { two_j: 1 };

    pub fn from_two_j(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::invalid(
                "two_j",
                "spin 0 is one-dimensional and has no dynamics",
            ));
        }
        Ok(SpinSize { two_j })
    }

    /// Parses `"1/2"`, `"3/2"`, `"2"`, `"10"`, or a decimal such as `"2.5"`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::invalid("spin", format!("cannot parse {text:?} as a spin size"));
        if let Some((num, den)) = text.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "2" => Self::from_two_j(num),
                "1" => Self::from_two_j(2 * num),
                _ => Err(bad()),
            }
        } else {
            let j: f64 = text.parse().map_err(|_| bad())?;
            let two_j = 2.0 * j;
            if !two_j.is_finite() || two_j < 0.0 || (two_j - two_j.round()).abs() > 1e-9 {
                return Err(bad());
            }
            Self::from_two_j(two_j.round() as u32)
        }
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Hilbert-space dimension `2J + 1`.
    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// `J_z` eigenvalues in basis order, `J, J - 1, ..., -J`.
    pub fn m_values(self) -> impl Iterator<Item = f64> {
        let j = self.j();
        (0..self.dim()).map(move |k| j - k as f64)
    }
}

impl fmt::Display for SpinSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j.is_multiple_of(2) {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

/// Dense matrix representation of `J_x`, `J_y`, `J_z`, `J_+`, `J_-`.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub spin: SpinSize,
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
    pub jplus: CMatrix,
    pub jminus: CMatrix,
}

impl SpinOperators {
    pub fn new(spin: SpinSize) -> Self {
        let n = spin.dim();
        let j = spin.j();
        let jz = CMatrix::from_diagonal(&DVector::from_iterator(
            n,
            spin.m_values().map(|m| C64::new(m, 0.0)),
        ));
        // J_+ |M⟩ = sqrt(J(J+1) - M(M+1)) |M+1⟩; M + 1 sits one index up.
        let mut jplus = CMatrix::zeros(n, n);
        for k in 1..n {
            let m = j - k as f64;
            jplus[(k - 1, k)] = C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
        let jminus = jplus.adjoint();
        let jx = (&jplus + &jminus) * C64::new(0.5, 0.0);
        // (J_+ - J_-) / 2i
        let jy = (&jplus - &jminus) * C64::new(0.0, -0.5);
        SpinOperators { spin, jx, jy, jz, jplus, jminus }
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found });
        }
        Ok(())
    }
}

pub fn build_spin_operators(spin: SpinSize) -> SpinOperators {
    SpinOperators::new(spin)
}

/// Coherent parameters: bias `ε` and tunnel amplitude `T_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub spin: SpinSize,
    pub epsilon: f64,
    pub tc: f64,
    delta: f64,
}

impl SystemParams {
    pub fn new(spin: SpinSize, epsilon: f64, tc: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::invalid("epsilon", format!("must be finite, got {epsilon}")));
        }
        if !(tc > 0.0 && tc.is_finite()) {
            return Err(Error::invalid("tc", format!("must be positive, got {tc}")));
        }
        let delta = (4.0 * tc * tc + epsilon * epsilon).sqrt();
        Ok(SystemParams { spin, epsilon, tc, delta })
    }

    /// Level spacing `Δ = sqrt(4 T_c² + ε²)`.
    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// `H = ε J_z + 2 T_c J_x`.
pub fn hamiltonian(params: &SystemParams, ops: &SpinOperators) -> Result<CMatrix> {
    ops.check_dim(params.spin.dim())?;
    Ok(&ops.jz * C64::from(params.epsilon) + &ops.jx * C64::from(2.0 * params.tc))
}

/// `exp(i θ J_y)` from the eigendecomposition of the Hermitian generator.
pub fn y_rotation(ops: &SpinOperators, angle: f64) -> CMatrix {
    let eig = ops.jy.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&DVector::from_iterator(
        ops.dim(),
        eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, angle * l)),
    ));
    v * phases * v.adjoint()
}

/// Rotation onto the Dicke frame, `U A U†` with `U = exp(i π/2 J_y)`.
///
/// With this convention `J_z ↦ -J_x` and `J_x ↦ J_z`, so the unbiased
/// Hamiltonian `2 T_c J_x` becomes `2 T_c J_z`.
pub fn dicke_rotate(ops: &SpinOperators, matrix: &CMatrix) -> Result<CMatrix> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::invalid("matrix", "must be square"));
    }
    ops.check_dim(matrix.nrows())?;
    let u = y_rotation(ops, std::f64::consts::FRAC_PI_2);
    Ok(&u * matrix * u.adjoint())
}

pub(crate) fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}
