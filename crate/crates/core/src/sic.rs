//! SIC-POVMs: verification, the exact qubit tetrahedron, and numerical
//! fiducial search.
//!
//! A SIC-POVM in dimension N is a set of N² unit vectors whose projectors
//! satisfy Tr P_iP_j = 1/(N+1) for i ≠ j; the operators E_i = P_i/N then
//! resolve the identity and are informationally complete. Existence is
//! proven only dimension by dimension; this module reproduces the numerical
//! evidence at desk scale and never claims more than a residual.
//!
//! The search restricts to Weyl–Heisenberg orbits: with the clock Z and
//! shift X and τ = −e^{iπ/N},
//!
//! ```text
//! D_{j,k} = τ^{jk} X^j Z^k ,   (D_{j,k} v)_x = τ^{jk} ω^{k(x−j)} v_{x−j}
//! ```
//!
//! a single fiducial |f⟩ generates the candidate {D_{j,k}|f⟩}. Covariance
//! collapses the frame potential to the N²−1 first-row overlaps
//! m_d = |⟨f|D_d|f⟩|²,
//!
//! ```text
//! F(f) = Σ_{i<j} (|⟨ψ_i|ψ_j⟩|² − 1/(N+1))² = (N²/2) Σ_{d≠0} (m_d − 1/(N+1))²
//! ```
//!
//! which each restart minimizes in two phases: steepest descent over unit
//! vectors (Wirtinger gradient, backtracking line search, renormalization
//! after every step), then a Levenberg–Marquardt polish on the residual
//! system {m_d − 1/(N+1)} ∪ {‖f‖² − 1}. The polish matters in dimension 3,
//! where the SIC set is a continuous family and the potential grows only
//! quartically off it — descent alone crawls at ~1e−11 there while
//! Gauss–Newton steps converge quadratically to the manifold. Restarts are
//! independent, seeded per index, and merged by (residual, index) — the
//! outcome is deterministic regardless of thread count. The verifier
//! accepts arbitrary candidates; covariance is an optimization choice, not
//! a correctness assumption.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{identity, max_abs_diff, normalize_phase, random_unit_vector, CMatrix, CVector, C64};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Unit-norm slack accepted when wrapping candidate vectors.
const NORM_TOL: f64 = 1e-12;

/// Restarts are dispatched in fixed-size batches so that early stopping
/// commits to the same restart prefix no matter how many threads run.
const RESTART_BATCH: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum SicError {
    #[error("dimension {dim} needs {expected} vectors, got {got}")]
    WrongCount {
        dim: usize,
        expected: usize,
        got: usize,
    },
    #[error("vector {index} has length {len}, expected {dim}")]
    InconsistentDimensions {
        index: usize,
        len: usize,
        dim: usize,
    },
    #[error("vector {index} has norm {norm}, expected 1 within {NORM_TOL:e}")]
    NotUnitNorm { index: usize, norm: f64 },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
}

/// Where a candidate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Closed-form construction.
    Exact,
    /// Orbit of a fiducial found by [`search_fiducial`] with this seed.
    Search { seed: u64 },
    /// Anything read from outside.
    Imported,
}

/// N² candidate SIC vectors (unit norm enforced on construction).
#[derive(Debug, Clone, PartialEq)]
pub struct SicCandidate {
    dim: usize,
    vectors: Vec<CVector>,
    provenance: Provenance,
}

impl SicCandidate {
    pub fn new(vectors: Vec<CVector>, provenance: Provenance) -> Result<Self, SicError> {
        let dim = vectors.first().map_or(0, CVector::len);
        if dim < 2 {
            return Err(SicError::DimensionTooSmall(dim));
        }
        if vectors.len() != dim * dim {
            return Err(SicError::WrongCount {
                dim,
                expected: dim * dim,
                got: vectors.len(),
            });
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(SicError::InconsistentDimensions {
                    index,
                    len: v.len(),
                    dim,
                });
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(SicError::NotUnitNorm { index, norm });
            }
        }
        Ok(Self {
            dim,
            vectors,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

/// A unit vector seeding a Weyl–Heisenberg orbit, with the frame potential
/// of that orbit as its residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiducial {
    dim: usize,
    vector: CVector,
    residual: f64,
}

impl Fiducial {
    /// Wrap a unit vector; the residual is computed on the spot from its
    /// orbit's covariant frame potential.
    pub fn new(vector: CVector) -> Result<Self, SicError> {
        let dim = vector.len();
        if dim < 2 {
            return Err(SicError::DimensionTooSmall(dim));
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(SicError::NotUnitNorm { index: 0, norm });
        }
        let kernel = WhKernel::new(dim);
        let residual = kernel.covariant_potential(&vector);
        Ok(Self {
            dim,
            vector,
            residual,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    /// Frame potential of this fiducial's Weyl–Heisenberg orbit.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Parameters for [`search_fiducial`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Independent random starts (≥ 1).
    pub restarts: usize,
    /// Descent-iteration cap per restart.
    pub max_iterations: usize,
    /// Master seed; restart i draws from stream i of this seed.
    pub seed: u64,
    /// Stop a restart — and the whole search, deterministically — once the
    /// frame potential drops this low.
    pub target_residual: f64,
    /// Abandon a restart when the projected gradient norm falls below this
    /// (the restart has converged to whatever minimum it is in).
    pub grad_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iterations: 20_000,
            seed: 0,
            target_residual: 1e-18,
            grad_tol: 1e-12,
        }
    }
}

/// Phase tables for the displacement operators of one dimension.
/// Application is O(N) per operator; materializing matrices is reserved
/// for [`wh_displacements`].
struct WhKernel {
    n: usize,
    /// τ^t for t = 0..2N (τ has order dividing 2N).
    tau_pow: Vec<C64>,
    /// ω^x for x = 0..N.
    omega_pow: Vec<C64>,
}

impl WhKernel {
    fn new(n: usize) -> Self {
        assert!(n >= 2, "displacements need dimension ≥ 2");
        // τ = −e^{iπ/N} = e^{iπ(N+1)/N}
        let tau_pow = (0..2 * n)
            .map(|t| Complex::from_polar(1.0, PI * ((n + 1) * t) as f64 / n as f64))
            .collect();
        let omega_pow = (0..n)
            .map(|x| Complex::from_polar(1.0, 2.0 * PI * x as f64 / n as f64))
            .collect();
        Self {
            n,
            tau_pow,
            omega_pow,
        }
    }

    fn phase(&self, j: usize, k: usize, x: usize) -> C64 {
        self.tau_pow[(j * k) % (2 * self.n)] * self.omega_pow[(k * x) % self.n]
    }

    /// D_{j,k} v.
    fn apply(&self, j: usize, k: usize, v: &CVector) -> CVector {
        let n = self.n;
        let mut out = CVector::zeros(n);
        for x in 0..n {
            out[(x + j) % n] = self.phase(j, k, x) * v[x];
        }
        out
    }

    /// D_{j,k}† v.
    fn apply_adjoint(&self, j: usize, k: usize, v: &CVector) -> CVector {
        let n = self.n;
        let mut out = CVector::zeros(n);
        for x in 0..n {
            out[x] = self.phase(j, k, x).conj() * v[(x + j) % n];
        }
        out
    }

    fn matrix(&self, j: usize, k: usize) -> CMatrix {
        let n = self.n;
        let mut m = CMatrix::zeros(n, n);
        for x in 0..n {
            m[((x + j) % n, x)] = self.phase(j, k, x);
        }
        m
    }

    /// Covariant frame potential (N²/2)·Σ_{d≠0}(|⟨f|D_d f⟩|² − 1/(N+1))².
    fn covariant_potential(&self, f: &CVector) -> f64 {
        let n = self.n;
        let t = 1.0 / (n as f64 + 1.0);
        let mut sum = 0.0;
        for j in 0..n {
            for k in 0..n {
                if j == 0 && k == 0 {
                    continue;
                }
                let c = f.dotc(&self.apply(j, k, f));
                let e = c.norm_sqr() - t;
                sum += e * e;
            }
        }
        (n * n) as f64 / 2.0 * sum
    }

    /// Objective value and its Wirtinger gradient ∂F/∂f̄ at `f`:
    /// g = N²·Σ_{d≠0} e_d (c̄_d·D_d f + c_d·D_d† f) with e_d = |c_d|² − t.
    fn covariant_gradient(&self, f: &CVector) -> (f64, CVector) {
        let n = self.n;
        let t = 1.0 / (n as f64 + 1.0);
        let mut sum = 0.0;
        let mut g = CVector::zeros(n);
        for j in 0..n {
            for k in 0..n {
                if j == 0 && k == 0 {
                    continue;
                }
                let u = self.apply(j, k, f);
                let c = f.dotc(&u);
                let e = c.norm_sqr() - t;
                sum += e * e;
                let w = self.apply_adjoint(j, k, f);
                g += (u * c.conj() + w * c) * C64::new(e, 0.0);
            }
        }
        let nn = (n * n) as f64;
        (nn / 2.0 * sum, g * C64::new(nn, 0.0))
    }

    /// Residuals r = ({m_d − t}_{d≠0}, ‖f‖² − 1) and their Jacobian with
    /// respect to the 2N real coordinates (Re f, Im f).
    ///
    /// Row d: ∂m_d/∂(Re f_x) = 2 Re h_{d,x}, ∂m_d/∂(Im f_x) = 2 Im h_{d,x}
    /// with h_d = c̄_d·D_d f + c_d·D_d† f — the same per-displacement vector
    /// the Wirtinger gradient is built from.
    fn residual_system(&self, f: &CVector) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.n;
        let t = 1.0 / (n as f64 + 1.0);
        let rows = n * n; // n²−1 overlap residuals + 1 norm residual
        let mut r = DVector::<f64>::zeros(rows);
        let mut jac = DMatrix::<f64>::zeros(rows, 2 * n);
        let mut row = 0;
        for j in 0..n {
            for k in 0..n {
                if j == 0 && k == 0 {
                    continue;
                }
                let u = self.apply(j, k, f);
                let c = f.dotc(&u);
                let w = self.apply_adjoint(j, k, f);
                let h = u * c.conj() + w * c;
                r[row] = c.norm_sqr() - t;
                for x in 0..n {
                    jac[(row, x)] = 2.0 * h[x].re;
                    jac[(row, n + x)] = 2.0 * h[x].im;
                }
                row += 1;
            }
        }
        r[row] = f.norm_squared() - 1.0;
        for x in 0..n {
            jac[(row, x)] = 2.0 * f[x].re;
            jac[(row, n + x)] = 2.0 * f[x].im;
        }
        (r, jac)
    }

    /// Σ r² for the system above — the Levenberg–Marquardt objective.
    fn squared_residuals(&self, f: &CVector) -> f64 {
        let n = self.n;
        let t = 1.0 / (n as f64 + 1.0);
        let mut sum = 0.0;
        for j in 0..n {
            for k in 0..n {
                if j == 0 && k == 0 {
                    continue;
                }
                let e = f.dotc(&self.apply(j, k, f)).norm_sqr() - t;
                sum += e * e;
            }
        }
        let e = f.norm_squared() - 1.0;
        sum + e * e
    }

    /// Levenberg–Marquardt on the residual system, started at `start`.
    /// Returns the best (covariant potential, unit vector) pair seen.
    ///
    /// Near a zero-residual point the damped Gauss–Newton step converges
    /// quadratically even where the solution set is a manifold (rank-
    /// deficient Jacobian) — exactly the regime that stalls steepest
    /// descent in dimension 3. Fully deterministic.
    fn lm_polish(&self, start: &CVector, target: f64, max_iters: usize) -> (f64, CVector) {
        let n = self.n;
        let mut f = start.clone();
        let mut lambda = 1e-3f64;
        let unit = f.normalize();
        let mut best = (self.covariant_potential(&unit), unit);

        for _ in 0..max_iters {
            let (r, jac) = self.residual_system(&f);
            let s0 = r.norm_squared();
            let jtj = jac.transpose() * &jac;
            let jtr = jac.transpose() * &r;

            let mut stepped = false;
            while lambda < 1e14 {
                let mut a = jtj.clone();
                for i in 0..2 * n {
                    a[(i, i)] += lambda;
                }
                let Some(chol) = a.cholesky() else {
                    lambda *= 10.0;
                    continue;
                };
                let delta = chol.solve(&jtr);
                let mut candidate = f.clone();
                for x in 0..n {
                    candidate[x] -= C64::new(delta[x], delta[n + x]);
                }
                if self.squared_residuals(&candidate) < s0 {
                    f = candidate;
                    lambda = (lambda / 3.0).max(1e-12);
                    stepped = true;
                    break;
                }
                lambda *= 10.0;
            }
            if !stepped {
                break; // stationary for Σr²: no downhill damped step exists
            }
            let unit = f.normalize();
            let value = self.covariant_potential(&unit);
            if value < best.0 {
                best = (value, unit);
            }
            if best.0 <= target {
                break;
            }
        }
        best
    }
}

/// All N² displacement operators D_{j,k} = τ^{jk} X^j Z^k as matrices,
/// indexed j·N + k. D_{0,0} is the identity; every entry is unitary.
pub fn wh_displacements(n: usize) -> Vec<CMatrix> {
    let kernel = WhKernel::new(n);
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            out.push(kernel.matrix(j, k));
        }
    }
    out
}

/// The Weyl–Heisenberg orbit {D_{j,k}|f⟩}, indexed j·N + k, as a candidate.
///
/// The result carries [`Provenance::Imported`] until tagged via
/// [`SicCandidate::with_provenance`].
pub fn wh_orbit(f: &Fiducial) -> SicCandidate {
    let kernel = WhKernel::new(f.dim);
    let mut vectors = Vec::with_capacity(f.dim * f.dim);
    for j in 0..f.dim {
        for k in 0..f.dim {
            vectors.push(kernel.apply(j, k, &f.vector));
        }
    }
    SicCandidate::new(vectors, Provenance::Imported)
        .expect("orbit of a unit vector consists of unit vectors")
}

/// Literal frame potential Σ_{i<j} (|⟨ψ_i|ψ_j⟩|² − 1/(N+1))².
///
/// Zero exactly when the candidate is a SIC. For Weyl–Heisenberg orbits this
/// agrees with the covariant shortcut used inside the optimizer.
pub fn frame_potential(c: &SicCandidate) -> f64 {
    let t = 1.0 / (c.dim as f64 + 1.0);
    let mut sum = 0.0;
    for (i, a) in c.vectors.iter().enumerate() {
        for b in &c.vectors[i + 1..] {
            let e = a.dotc(b).norm_sqr() - t;
            sum += e * e;
        }
    }
    sum
}

/// How many Levenberg–Marquardt iterations may follow the descent phase.
const POLISH_ITERATIONS: usize = 200;

/// One restart from `start`: steepest descent, then LM polish; returns the
/// final unit vector and its objective value.
fn minimize(kernel: &WhKernel, start: CVector, cfg: &SearchConfig) -> (f64, CVector) {
    // Hand over to the polish when a window of descent iterations fails to
    // halve the objective — the signature of a flat (quartic) valley.
    const STALL_WINDOW: usize = 256;

    let mut f = start.normalize();
    let (mut value, mut grad) = kernel.covariant_gradient(&f);
    let mut eta = 1.0f64;
    let mut window_value = value;

    for iteration in 0..cfg.max_iterations {
        if !value.is_finite() {
            return (f64::INFINITY, f);
        }
        if value <= cfg.target_residual {
            break;
        }
        if iteration % STALL_WINDOW == STALL_WINDOW - 1 {
            if value > 0.5 * window_value {
                break;
            }
            window_value = value;
        }
        // Project out the radial/phase direction: descent lives on the sphere.
        let radial = f.dotc(&grad);
        let tangent = &grad - &f * radial;
        let gnorm2 = tangent.norm_squared();
        if gnorm2.sqrt() <= cfg.grad_tol {
            break;
        }

        // Backtracking line search with step doubling on acceptance.
        let mut accepted = false;
        while eta > 1e-18 {
            let candidate = (&f - &tangent * C64::new(eta, 0.0)).normalize();
            let candidate_value = kernel.covariant_potential(&candidate);
            if candidate_value <= value - 1e-4 * eta * gnorm2 {
                f = candidate;
                let (v, g) = kernel.covariant_gradient(&f);
                value = v;
                grad = g;
                eta *= 2.0;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break; // step size underflow: converged as far as f64 allows
        }
    }

    if value.is_finite() && value > cfg.target_residual {
        let (pv, pf) = kernel.lm_polish(&f, cfg.target_residual, POLISH_ITERATIONS);
        if pv < value {
            return (pv, pf);
        }
    }
    (value, f)
}

fn run_restart(n: usize, cfg: &SearchConfig, index: usize) -> (f64, CVector) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let start = random_unit_vector(n, &mut rng);
    let kernel = WhKernel::new(n);
    minimize(&kernel, start, cfg)
}

/// Minimize the frame potential over Weyl–Heisenberg orbits in dimension `n`.
///
/// Runs `cfg.restarts` independent descents from seeded random starts and
/// returns the best fiducial found. Restart i derives its generator from
/// (cfg.seed, stream i), and the search stops after the batch containing the
/// first restart that reaches `cfg.target_residual`; the winner is the
/// (residual, index)-minimum over the complete prefix up to that restart.
/// The returned vector is phase-normalized. Output depends only on
/// (n, cfg), never on thread count or execution order. A residual above
/// target is not an error — it is the honest answer of the search.
pub fn search_fiducial(n: usize, cfg: &SearchConfig) -> Fiducial {
    assert!(n >= 2, "fiducial search needs dimension ≥ 2");
    assert!(cfg.restarts >= 1, "at least one restart required");

    let mut results: Vec<(f64, CVector)> = Vec::with_capacity(cfg.restarts);
    let mut batch_start = 0;
    while batch_start < cfg.restarts {
        let batch_end = (batch_start + RESTART_BATCH).min(cfg.restarts);
        let indices: Vec<usize> = (batch_start..batch_end).collect();

        #[cfg(feature = "parallel")]
        let batch: Vec<(f64, CVector)> = indices
            .par_iter()
            .map(|&i| run_restart(n, cfg, i))
            .collect();
        #[cfg(not(feature = "parallel"))]
        let batch: Vec<(f64, CVector)> = indices.iter().map(|&i| run_restart(n, cfg, i)).collect();

        results.extend(batch);
        if results.iter().any(|(v, _)| *v <= cfg.target_residual) {
            break;
        }
        batch_start = batch_end;
    }

    // Deterministic winner: truncate at the first restart that hit target,
    // then take the smallest residual (ties to the earlier index).
    let cutoff = results
        .iter()
        .position(|(v, _)| *v <= cfg.target_residual)
        .map_or(results.len(), |k| k + 1);
    let (_, best) = results[..cutoff]
        .iter()
        .enumerate()
        .min_by(|(i, (va, _)), (j, (vb, _))| va.total_cmp(vb).then(i.cmp(j)))
        .map(|(_, r)| r.clone())
        .expect("at least one restart ran");

    Fiducial::new(normalize_phase(&best)).expect("search output is a unit vector")
}

/// Verification outcome for a candidate.
#[derive(Debug, Clone, Serialize)]
pub struct SicReport {
    pub tol: f64,
    /// (a) max over i≠j of |Tr P_iP_j − 1/(N+1)|.
    pub max_overlap_deviation: f64,
    /// (b) max entry of |Σ_i P_i/N − I|.
    pub povm_resolution_deviation: f64,
    /// (c) rank of the Gram matrix G_ij = Tr(P_iP_j), cutoff tol·σ_max.
    pub gram_rank: usize,
    pub expected_rank: usize,
    pub pass: bool,
}

/// Check Tr P_iP_j = 1/(N+1), POVM resolution of the identity, and
/// informational completeness (full Gram rank).
pub fn verify_sic(c: &SicCandidate, tol: f64) -> SicReport {
    let n = c.dim;
    let target = 1.0 / (n as f64 + 1.0);

    let count = c.vectors.len();
    let mut gram = nalgebra::DMatrix::<f64>::zeros(count, count);
    let mut max_overlap_deviation: f64 = 0.0;
    for i in 0..count {
        for j in 0..count {
            let overlap = c.vectors[i].dotc(&c.vectors[j]).norm_sqr();
            gram[(i, j)] = overlap;
            if i != j {
                max_overlap_deviation = max_overlap_deviation.max((overlap - target).abs());
            }
        }
    }

    let mut sum = CMatrix::zeros(n, n);
    for v in &c.vectors {
        sum += crate::linalg::outer(v);
    }
    sum /= C64::new(n as f64, 0.0);
    let povm_resolution_deviation = max_abs_diff(&sum, &identity(n));

    let svd = gram.svd(false, false);
    let sigma_max = svd.singular_values.max();
    let gram_rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > tol * sigma_max)
        .count();

    let expected_rank = n * n;
    SicReport {
        tol,
        max_overlap_deviation,
        povm_resolution_deviation,
        gram_rank,
        expected_rank,
        pass: max_overlap_deviation <= tol
            && povm_resolution_deviation <= tol
            && gram_rank == expected_rank,
    }
}

/// The exact qubit SIC: four states whose Bloch vectors point to the
/// corners (1,1,1), (1,−1,−1), (−1,1,−1), (−1,−1,1) of a tetrahedron
/// (normalized by √3).
pub fn sic_dim2_exact() -> SicCandidate {
    let corners = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    let s3 = 3.0f64.sqrt();
    let vectors = corners
        .iter()
        .map(|&[x, y, z]| {
            let (bx, by, bz) = (x / s3, y / s3, z / s3);
            let theta = bz.acos();
            let phi = by.atan2(bx);
            let v = CVector::from_vec(vec![
                C64::new((theta / 2.0).cos(), 0.0),
                Complex::from_polar((theta / 2.0).sin(), phi),
            ]);
            normalize_phase(&v)
        })
        .collect();
    SicCandidate::new(vectors, Provenance::Exact).expect("tetrahedron states are unit vectors")
}

/// Bloch vector corresponding to the orbit fiducial of the exact qubit SIC
/// (the (1,1,1)/√3 corner): used by tests and the CLI demo path.
pub fn tetrahedron_fiducial() -> Fiducial {
    let v = sic_dim2_exact().vectors()[0].clone();
    Fiducial::new(v).expect("unit vector")
}
