//! The §5 toy hidden-variable model.
//!
//! Ontic states are the N(N+1) points of a dual plane of order N; the N²
//! epistemic states — what an observer perceives as pure quantum states —
//! are its lines, each containing N+1 points. Asking an epistemic state
//! λ_j of a system prepared in λ_i answers "yes" with probability
//! |λ_i ∩ λ_j|/(N+1): 1 on the diagonal and, by the one-point intersection
//! property of dual planes, exactly 1/(N+1) off it — the same value a SIC
//! assigns to Tr P_iP_j. The model is purely combinatorial, so the
//! probabilities here are exact rationals and the comparison against a
//! numerical SIC is sharp.
//!
//! No extension to full quantum theory is attempted: hidden-variable
//! theories of this noncontextual kind are ruled out by the Kochen–Specker
//! theorem, and the toy model reproduces only the single-SIC fragment of
//! the statistics.

use num_rational::Ratio;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::IncidenceStructure;
use crate::linalg::inner;
use crate::sic::SicCandidate;

#[derive(Debug, Error, PartialEq)]
pub enum ToyError {
    #[error("structure has {points} points / {lines} lines; order {n} needs {expected_points} / {expected_lines}")]
    CountMismatch {
        n: usize,
        points: usize,
        lines: usize,
        expected_points: usize,
        expected_lines: usize,
    },
    #[error("line {line} has {len} points, expected {expected}")]
    LineSizeMismatch {
        line: usize,
        len: usize,
        expected: usize,
    },
    #[error("epistemic index {index} out of range for {n_lines} lines")]
    IndexOutOfRange { index: usize, n_lines: usize },
    #[error("alignment must map the {n_lines} epistemic states onto distinct SIC elements: {detail}")]
    AlignmentMissing { n_lines: usize, detail: String },
}

/// Hidden-variable model over a dual-plane-shaped incidence structure.
#[derive(Debug, Clone)]
pub struct ToyModel {
    order: usize,
    dual_plane: IncidenceStructure,
}

impl ToyModel {
    /// Wrap an incidence structure, checking only the §4 counts
    /// (N(N+1) points, N² lines of N+1 points each) — deliberately not the
    /// duality axioms, so degenerate hand-built structures can be probed.
    pub fn new(order: usize, dual_plane: IncidenceStructure) -> Result<Self, ToyError> {
        let expected_points = order * (order + 1);
        let expected_lines = order * order;
        if dual_plane.n_points() != expected_points || dual_plane.n_lines() != expected_lines {
            return Err(ToyError::CountMismatch {
                n: order,
                points: dual_plane.n_points(),
                lines: dual_plane.n_lines(),
                expected_points,
                expected_lines,
            });
        }
        for (line, pts) in dual_plane.lines().iter().enumerate() {
            if pts.len() != order + 1 {
                return Err(ToyError::LineSizeMismatch {
                    line,
                    len: pts.len(),
                    expected: order + 1,
                });
            }
        }
        Ok(Self { order, dual_plane })
    }

    /// The model over the dual of the affine plane of prime-power order q.
    pub fn of_order(q: u32) -> Result<Self, crate::field::FieldError> {
        let field = crate::field::FiniteField::of_order(q)?;
        let plane = crate::geometry::build_affine_plane(&field);
        let dual = crate::geometry::dualize(plane.incidence());
        Ok(Self::new(q as usize, dual).expect("dual of an affine plane has the §4 counts"))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dual_plane(&self) -> &IncidenceStructure {
        &self.dual_plane
    }

    fn line(&self, index: usize) -> Result<&[usize], ToyError> {
        if index >= self.dual_plane.n_lines() {
            return Err(ToyError::IndexOutOfRange {
                index,
                n_lines: self.dual_plane.n_lines(),
            });
        }
        Ok(self.dual_plane.line(index))
    }

    /// Exact probability of "yes" when state λ_i is asked question λ_j:
    /// |λ_i ∩ λ_j| / (N+1).
    pub fn yes_probability(&self, i: usize, j: usize) -> Result<Ratio<u64>, ToyError> {
        let a = self.line(i)?;
        let b = self.line(j)?;
        let common = a
            .iter()
            .filter(|p| b.binary_search(p).is_ok())
            .count() as u64;
        Ok(Ratio::new(common, self.order as u64 + 1))
    }

    /// Empirical yes-frequency over `trials` draws of a uniform ontic
    /// state from λ_i, deterministic for a given seed.
    pub fn simulate(&self, i: usize, j: usize, trials: u64, seed: u64) -> Result<f64, ToyError> {
        assert!(trials >= 1, "at least one trial");
        let a = self.line(i)?;
        let b = self.line(j)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut yes = 0u64;
        for _ in 0..trials {
            let ontic = a[rng.random_range(0..a.len())];
            if b.binary_search(&ontic).is_ok() {
                yes += 1;
            }
        }
        Ok(yes as f64 / trials as f64)
    }

    /// Max over i ≠ j of |yes_probability(i, j) − Tr P_iP_j| for a SIC
    /// candidate whose element `alignment[i]` plays the role of epistemic
    /// state i. Zero (to numerical precision) exactly when the candidate's
    /// overlaps all equal 1/(N+1).
    pub fn compare_to_quantum(
        &self,
        sic: &SicCandidate,
        alignment: Option<&[usize]>,
    ) -> Result<f64, ToyError> {
        let n_lines = self.dual_plane.n_lines();
        let identity: Vec<usize>;
        let alignment = match alignment {
            Some(a) => a,
            None => {
                identity = (0..n_lines).collect();
                &identity
            }
        };
        if sic.vectors().len() != n_lines {
            return Err(ToyError::AlignmentMissing {
                n_lines,
                detail: format!("candidate has {} elements", sic.vectors().len()),
            });
        }
        if alignment.len() != n_lines {
            return Err(ToyError::AlignmentMissing {
                n_lines,
                detail: format!("alignment has {} entries", alignment.len()),
            });
        }
        let mut hit = vec![false; n_lines];
        for &e in alignment {
            if e >= n_lines || hit[e] {
                return Err(ToyError::AlignmentMissing {
                    n_lines,
                    detail: format!("element index {e} repeated or out of range"),
                });
            }
            hit[e] = true;
        }

        let vectors = sic.vectors();
        let mut discrepancy: f64 = 0.0;
        for i in 0..n_lines {
            for j in 0..n_lines {
                if i == j {
                    continue;
                }
                let exact = self.yes_probability(i, j)?;
                let p = *exact.numer() as f64 / *exact.denom() as f64;
                let quantum = inner(&vectors[alignment[i]], &vectors[alignment[j]]).norm_sqr();
                discrepancy = discrepancy.max((p - quantum).abs());
            }
        }
        Ok(discrepancy)
    }
}
