//! Mutually unbiased bases in prime-power dimension.
//!
//! Two orthonormal bases {|v_i⟩}, {|w_j⟩} of C^N are mutually unbiased when
//! |⟨v_i|w_j⟩|² = 1/N for all i, j; at most N+1 bases can be pairwise
//! unbiased, and for prime-power N that bound is attained. This module
//! constructs the complete set for odd prime powers via the character sum
//!
//! ```text
//! (v^{(r)}_m)_x = exp(2πi·tr(r·x² + m·x)/p) / √q ,   r, m, x ∈ GF(q)
//! ```
//!
//! with `tr` the absolute trace to GF(p), prepending the computational
//! basis; unbiasedness reduces to quadratic Gauss sums of modulus √q. For
//! q = 2 the three Pauli eigenbases (up/down, right/left, in/out) are used
//! directly. Characteristic-2 extensions (q = 4, 8, …) are rejected: the
//! Gauss-sum argument needs odd characteristic, and the Galois-ring
//! construction that covers those orders is out of scope here.

use std::f64::consts::TAU;

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::field::FiniteField;
use crate::linalg::{inner, normalize_phase, CVector, C64};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MubError {
    #[error("bases have different dimensions: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(
        "MUBs for order {q} = 2^k with k ≥ 2 are not implemented: the \
         character-sum construction requires odd characteristic, and the \
         Galois-ring alternative is unimplemented here (not nonexistent)"
    )]
    UnsupportedCharacteristic { q: u32 },
    #[error("basis needs {dim} vectors of length {dim}, got {n_vectors} of length {len}")]
    MalformedBasis {
        dim: usize,
        n_vectors: usize,
        len: usize,
    },
}

/// An orthonormal basis of C^N, stored as N column vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    dim: usize,
    vectors: Vec<CVector>,
    label: String,
}

impl Basis {
    /// Wrap N vectors of dimension N. Orthonormality is *not* enforced here;
    /// it is a measured property, reported by [`check_basis`].
    pub fn new(vectors: Vec<CVector>, label: impl Into<String>) -> Result<Self, MubError> {
        let dim = vectors.len();
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(MubError::MalformedBasis {
                dim,
                n_vectors: vectors.len(),
                len: v.len(),
            });
        }
        Ok(Self {
            dim,
            vectors,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// A family of bases of common dimension, at most N+1 of them when valid.
#[derive(Debug, Clone, PartialEq)]
pub struct MubSet {
    dim: usize,
    bases: Vec<Basis>,
    provenance: String,
}

impl MubSet {
    pub fn from_bases(
        bases: Vec<Basis>,
        provenance: impl Into<String>,
    ) -> Result<Self, MubError> {
        let dim = bases.first().map_or(0, Basis::dim);
        if let Some(b) = bases.iter().find(|b| b.dim() != dim) {
            return Err(MubError::DimensionMismatch {
                left: dim,
                right: b.dim(),
            });
        }
        Ok(Self {
            dim,
            bases,
            provenance: provenance.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }
}

/// Outcome of a deviation measurement against a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationReport {
    pub max_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

impl DeviationReport {
    fn new(max_deviation: f64, tol: f64) -> Self {
        Self {
            max_deviation,
            tol,
            pass: max_deviation <= tol,
        }
    }
}

/// Build the complete set of q+1 mutually unbiased bases over GF(q).
///
/// Supported orders: q = 2 (Pauli eigenbases) and odd prime powers
/// (character-sum construction). Even prime powers q = 4, 8, … return
/// [`MubError::UnsupportedCharacteristic`].
///
/// Every vector is phase-normalized so its first nonzero component is real
/// positive, making exports canonical.
pub fn build_mubs(field: &FiniteField) -> Result<MubSet, MubError> {
    let q = field.order();
    if field.characteristic() == 2 && field.degree() >= 2 {
        return Err(MubError::UnsupportedCharacteristic { q });
    }
    if q == 2 {
        return pauli_bases();
    }

    let n = q as usize;
    let p = field.characteristic();
    let norm = 1.0 / (n as f64).sqrt();
    let mut bases = Vec::with_capacity(n + 2);
    bases.push(computational_basis(n));
    for r in 0..q {
        let vectors = (0..q)
            .map(|m| {
                let v = CVector::from_iterator(
                    n,
                    (0..q).map(|x| {
                        let x2 = field.mul(x, x);
                        let arg = field.add(field.mul(r, x2), field.mul(m, x));
                        let t = field.absolute_trace(arg);
                        Complex::from_polar(norm, TAU * f64::from(t) / f64::from(p))
                    }),
                );
                normalize_phase(&v)
            })
            .collect();
        bases.push(Basis::new(vectors, format!("r = {r}"))?);
    }
    let set = MubSet::from_bases(bases, format!("character sum over GF({q})"))?;
    debug_assert!(count_bound_check(&set));
    Ok(set)
}

fn computational_basis(n: usize) -> Basis {
    let vectors = (0..n)
        .map(|i| {
            let mut v = CVector::zeros(n);
            v[i] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    Basis::new(vectors, "computational").expect("square by construction")
}

fn pauli_bases() -> Result<MubSet, MubError> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re = |x: f64| C64::new(x, 0.0);
    let im = |y: f64| C64::new(0.0, y);
    let vec2 = |a: C64, b: C64| CVector::from_vec(vec![a, b]);
    let bases = vec![
        Basis::new(
            vec![vec2(re(1.0), re(0.0)), vec2(re(0.0), re(1.0))],
            "z (up/down)",
        )?,
        Basis::new(
            vec![vec2(re(s), re(s)), vec2(re(s), re(-s))],
            "x (right/left)",
        )?,
        Basis::new(vec![vec2(re(s), im(s)), vec2(re(s), im(-s))], "y (in/out)")?,
    ];
    MubSet::from_bases(bases, "Pauli eigenbases")
}

/// Maximum orthonormality deviation max_{i,j} |⟨v_i|v_j⟩ − δ_ij|.
pub fn check_basis(b: &Basis, tol: f64) -> DeviationReport {
    let mut max_dev: f64 = 0.0;
    // An under- or over-complete basis is maximally deviant by fiat.
    if b.vectors.len() != b.dim {
        return DeviationReport::new(1.0, tol);
    }
    for (i, vi) in b.vectors.iter().enumerate() {
        for (j, vj) in b.vectors.iter().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            max_dev = max_dev.max((inner(vi, vj) - delta).norm());
        }
    }
    DeviationReport::new(max_dev, tol)
}

/// Maximum unbiasedness deviation max_{i,j} ||⟨v_i|w_j⟩|² − 1/N|.
pub fn check_unbiased(b1: &Basis, b2: &Basis, tol: f64) -> Result<DeviationReport, MubError> {
    if b1.dim != b2.dim {
        return Err(MubError::DimensionMismatch {
            left: b1.dim,
            right: b2.dim,
        });
    }
    let target = 1.0 / b1.dim as f64;
    let mut max_dev: f64 = 0.0;
    for vi in &b1.vectors {
        for wj in &b2.vectors {
            max_dev = max_dev.max((inner(vi, wj).norm_sqr() - target).abs());
        }
    }
    Ok(DeviationReport::new(max_dev, tol))
}

/// Structural guard: no more than N+1 bases may ever be pairwise unbiased.
pub fn count_bound_check(m: &MubSet) -> bool {
    m.bases.len() <= m.dim + 1
}
