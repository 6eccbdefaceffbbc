//! Small dense complex linear algebra helpers shared by every module.
//!
//! All operators in this crate are tiny (dimension at most a few dozen), so
//! everything is a dynamically sized `nalgebra` matrix over `Complex<f64>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// `n x n` identity.
pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Rank-1 projector `v v†` of a (not necessarily normalized) vector.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Physics-convention inner product `⟨a|b⟩` (conjugate-linear in `a`).
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Largest entry magnitude.
pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise difference `max |a_ij - b_ij|`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    max_abs_entry(&(a - b))
}

/// Deviation from hermiticity, `max |m - m†|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Rescale a vector by a global phase so its first nonzero component is real
/// and positive. Canonicalizes vectors for export; a zero vector is returned
/// unchanged.
pub fn normalize_phase(v: &CVector) -> CVector {
    let first = v.iter().find(|z| z.norm() > 1e-14);
    match first {
        Some(z) => {
            let phase = z.conj() / z.norm();
            v * C64::new(phase.re, phase.im)
        }
        None => v.clone(),
    }
}

/// Orthonormal basis of the real vector space of Hermitian `n x n` matrices
/// under the Frobenius inner product `Tr(A B)`.
///
/// Consists of the normalized identity, the normalized traceless diagonal
/// matrices, and the symmetric/antisymmetric off-diagonal pairs (the
/// generalized Gell-Mann family). Length is always `n²`.
pub fn hermitian_basis(n: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    let inv_sqrt_n = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    basis.push(identity(n) * inv_sqrt_n);
    for l in 1..n {
        // diag(1, .., 1, -l, 0, .., 0) / sqrt(l(l+1))
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..l {
            m[(i, i)] = C64::new(norm, 0.0);
        }
        m[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
        basis.push(m);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sym = CMatrix::zeros(n, n);
            sym[(i, j)] = C64::new(s, 0.0);
            sym[(j, i)] = C64::new(s, 0.0);
            basis.push(sym);
            let mut asym = CMatrix::zeros(n, n);
            asym[(i, j)] = C64::new(0.0, s);
            asym[(j, i)] = C64::new(0.0, -s);
            basis.push(asym);
        }
    }
    basis
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`]; real because
/// `Tr(E H)` is real for Hermitian `E`, `H`.
pub fn hermitian_coords(m: &CMatrix, basis: &[CMatrix]) -> DVector<f64> {
    DVector::from_iterator(basis.len(), basis.iter().map(|e| (e * m).trace().re))
}

/// Inverse of [`hermitian_coords`].
pub fn from_hermitian_coords(coords: &DVector<f64>, basis: &[CMatrix]) -> CMatrix {
    let n = basis[0].nrows();
    let mut m = CMatrix::zeros(n, n);
    for (c, e) in coords.iter().zip(basis) {
        m += e * C64::new(*c, 0.0);
    }
    m
}

/// Complex vector with i.i.d. standard-Gaussian real and imaginary parts.
pub fn gaussian_vector<R: Rng>(n: usize, rng: &mut R) -> CVector {
    CVector::from_iterator(
        n,
        (0..n).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
    )
}

/// Haar-ish random unit vector.
pub fn random_unit_vector<R: Rng>(n: usize, rng: &mut R) -> CVector {
    let v = gaussian_vector(n, rng);
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Random unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    g.qr().q()
}

/// Random density matrix `A A† / Tr(A A†)`: Hermitian, positive, unit trace.
pub fn random_density_matrix<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let m = &a * a.adjoint();
    let t = m.trace().re;
    m / C64::new(t, 0.0)
}
