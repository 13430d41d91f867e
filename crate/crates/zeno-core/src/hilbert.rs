//! Composite Hilbert space of one truncated cavity mode and two three-level
//! atoms, with the dense state/operator types everything else builds on.
//!
//! Basis ordering is row-major over `(n, j1, j2)` with the photon number `n`
//! slowest: `index = n·9 + j1·3 + j2`. This keeps each photon-number block
//! contiguous, so the `n = 0` block (which contains the decoherence-free
//! subspace) is a leading sub-matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, C64};

/// Number of levels per atom (ground states 0, 1 and excited state 2).
pub const ATOM_LEVELS: usize = 3;

/// Number of two-atom internal states.
pub const ATOM_DIM: usize = ATOM_LEVELS * ATOM_LEVELS;

/// Photon-number truncation of the cavity mode.
///
/// The full space has dimension `(n_max + 1) · 9`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SpaceConfig {
    n_max: usize,
}

impl SpaceConfig {
    /// Create a space with Fock states `0..=n_max`. Requires `n_max ≥ 1`.
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1"));
        }
        Ok(SpaceConfig { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Total Hilbert-space dimension `(n_max + 1) · 9`.
    pub fn dim(&self) -> usize {
        (self.n_max + 1) * ATOM_DIM
    }
}

/// Product-basis label: `n` photons, atom 1 in level `j1`, atom 2 in `j2`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct BasisLabel {
    pub n: usize,
    pub j1: u8,
    pub j2: u8,
}

impl BasisLabel {
    pub fn new(n: usize, j1: u8, j2: u8) -> Self {
        BasisLabel { n, j1, j2 }
    }
}

/// Flat index of a basis label under the documented `(n, j1, j2)` ordering.
pub fn basis_index(label: BasisLabel, space: SpaceConfig) -> Result<usize> {
    if label.n > space.n_max() || label.j1 >= ATOM_LEVELS as u8 || label.j2 >= ATOM_LEVELS as u8 {
        return Err(Error::InvalidBasisLabel {
            n: label.n,
            j1: label.j1,
            j2: label.j2,
            n_max: space.n_max(),
        });
    }
    Ok(label.n * ATOM_DIM + label.j1 as usize * ATOM_LEVELS + label.j2 as usize)
}

/// Inverse of [`basis_index`].
pub fn basis_label(index: usize, space: SpaceConfig) -> Result<BasisLabel> {
    if index >= space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            actual: index,
        });
    }
    Ok(BasisLabel {
        n: index / ATOM_DIM,
        j1: ((index % ATOM_DIM) / ATOM_LEVELS) as u8,
        j2: (index % ATOM_LEVELS) as u8,
    })
}

/// Complex amplitudes over the product basis.
///
/// Conditionally evolved states are generally unnormalized: the squared norm
/// only shrinks from 1 (up to integrator tolerance) and is itself the
/// no-emission probability.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        StateVector {
            amps: vec![C64::new(0.0, 0.0); dim],
        }
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        StateVector { amps }
    }

    /// Unit vector on a single basis label.
    pub fn basis_state(space: SpaceConfig, label: BasisLabel) -> Result<Self> {
        let idx = basis_index(label, space)?;
        let mut v = StateVector::zeros(space.dim());
        v.amps[idx] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, i: usize) -> C64 {
        self.amps[i]
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    /// Same direction, unit norm. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= 0.0 {
            return Err(Error::ZeroNormState);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, z: C64) -> Self {
        StateVector {
            amps: self.amps.iter().map(|a| a * z).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        StateVector {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        StateVector {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let d: f64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        libm::sqrt(d)
    }
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Dense complex matrix on the product space (row-major storage).
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Operator::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    #[inline]
    pub fn add_assign_at(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] += value;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Matrix–vector product.
    pub fn apply(&self, psi: &StateVector) -> StateVector {
        assert_eq!(self.dim, psi.dim(), "operator/state dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.dim..(r + 1) * self.dim];
            let mut acc = C64::new(0.0, 0.0);
            for (m, a) in row.iter().zip(psi.amps()) {
                acc += m * a;
            }
            *o = acc;
        }
        StateVector::from_amplitudes(out)
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let src = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[r * n..(r + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn scaled(&self, z: C64) -> Self {
        Operator {
            dim: self.dim,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Hermitian part `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scaled(C64::new(0.5, 0.0))
    }

    /// Anti-Hermitian part `(A − A†)/2`.
    pub fn anti_hermitian_part(&self) -> Self {
        self.sub(&self.adjoint()).scaled(C64::new(0.5, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Maximum column sum of absolute values.
    pub fn one_norm(&self) -> f64 {
        let n = self.dim;
        let mut max = 0.0_f64;
        for c in 0..n {
            let mut sum = 0.0;
            for r in 0..n {
                sum += self.data[r * n + c].norm();
            }
            if sum > max {
                max = sum;
            }
        }
        max
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> C64 {
        inner_product(psi, &self.apply(psi)).expect("dimensions checked by apply")
    }
}

/// Photon annihilation operator `b`: `b|n φ⟩ = √n |n−1 φ⟩`, identity on the
/// atoms. The top Fock level only annihilates downward (truncation).
pub fn annihilation_operator(space: SpaceConfig) -> Operator {
    let mut b = Operator::zeros(space.dim());
    for n in 1..=space.n_max() {
        let amp = C64::new(libm::sqrt(n as f64), 0.0);
        for atom in 0..ATOM_DIM {
            let col = n * ATOM_DIM + atom;
            let row = (n - 1) * ATOM_DIM + atom;
            b.set(row, col, amp);
        }
    }
    b
}

/// Photon number operator `b†b`.
pub fn number_operator(space: SpaceConfig) -> Operator {
    let mut m = Operator::zeros(space.dim());
    for n in 0..=space.n_max() {
        for atom in 0..ATOM_DIM {
            let i = n * ATOM_DIM + atom;
            m.set(i, i, C64::new(n as f64, 0.0));
        }
    }
    m
}

/// `|j⟩⟨k|` on atom `i ∈ {1, 2}`, identity on the other atom and the cavity.
pub fn atomic_transition(atom: usize, j: u8, k: u8, space: SpaceConfig) -> Result<Operator> {
    if atom != 1 && atom != 2 {
        return Err(Error::InvalidAtomIndex(atom));
    }
    if j >= ATOM_LEVELS as u8 {
        return Err(Error::InvalidAtomicLevel(j));
    }
    if k >= ATOM_LEVELS as u8 {
        return Err(Error::InvalidAtomicLevel(k));
    }
    let mut m = Operator::zeros(space.dim());
    let one = C64::new(1.0, 0.0);
    for n in 0..=space.n_max() {
        for other in 0..ATOM_LEVELS as u8 {
            let (from, to) = if atom == 1 {
                (
                    BasisLabel::new(n, k, other),
                    BasisLabel::new(n, j, other),
                )
            } else {
                (
                    BasisLabel::new(n, other, k),
                    BasisLabel::new(n, other, j),
                )
            };
            let col = basis_index(from, space)?;
            let row = basis_index(to, space)?;
            m.set(row, col, one);
        }
    }
    Ok(m)
}

/// Orthonormality tolerance used by [`projector_from_states`].
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Projector `Σ |ψ_k⟩⟨ψ_k|` onto the span of pairwise-orthonormal states.
pub fn projector_from_states(states: &[StateVector]) -> Result<Operator> {
    if states.is_empty() {
        return Err(Error::InvalidParameter("projector needs at least one state"));
    }
    let dim = states[0].dim();
    let mut max_dev = 0.0_f64;
    for (i, a) in states.iter().enumerate() {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: a.dim(),
            });
        }
        for (j, b) in states.iter().enumerate() {
            let overlap = inner_product(a, b)?;
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (overlap - C64::new(target, 0.0)).norm();
            if dev > max_dev {
                max_dev = dev;
            }
        }
    }
    if max_dev > ORTHONORMALITY_TOL {
        return Err(Error::NotOrthonormal { max_deviation: max_dev });
    }
    let mut p = Operator::zeros(dim);
    for s in states {
        for r in 0..dim {
            let ar = s.amp(r);
            if ar.norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..dim {
                p.add_assign_at(r, c, ar * s.amp(c).conj());
            }
        }
    }
    Ok(p)
}
