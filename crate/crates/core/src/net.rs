//! Quantum nets: phase-space point operators and discrete Wigner functions.
//!
//! A quantum net assigns to each line λ of the affine plane a pure state
//! P_λ, constantly along striations picking the vectors of one MUB basis.
//! The point operators are recovered from the line projectors as
//!
//! ```text
//! A_α = Σ_{λ ∋ α} P_λ − I
//! ```
//!
//! and satisfy the three defining properties (in the paper's normalization
//! A_α/N): unit scaled trace, orthogonality between distinct points, and
//! line sums reproducing the projectors. With the identification k = N, the
//! same traces count set cardinalities: points per line, singleton overlaps,
//! and the N² points of the identity.
//!
//! The assignment of basis vectors to lines within a striation is a gauge
//! choice; we fix vector j ↦ the line with intercept j. All verified
//! properties are gauge-independent, and callers should rely only on them.
//!
//! No construction of the A_α that bypasses a pre-existing complete MUB set
//! is known or implemented here.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::AffinePlane;
use crate::linalg::{hermiticity_deviation, identity, max_abs_diff, outer, trace, CMatrix};
use crate::mub::MubSet;
use crate::DEFAULT_TOL;

#[derive(Debug, Error, PartialEq)]
pub enum NetError {
    #[error("expected a complete set of {expected} bases, got {got}")]
    IncompleteMubSet { expected: usize, got: usize },
    #[error("MUB dimension {dim} does not match plane order {order}")]
    OrderMismatch { dim: usize, order: u32 },
    #[error("malformed net: {0}")]
    MalformedNet(String),
    #[error("state matrix is {rows}×{cols}, expected {dim}×{dim}")]
    StateDimensionMismatch {
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("state is not Hermitian (max |ρ − ρ†| entry = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("state trace is {trace:.12}, expected 1")]
    NotUnitTrace { trace: f64 },
}

/// Line projectors P_λ and point operators A_α over an affine plane.
///
/// Both families are indexed canonically: projectors by the plane's
/// striation-major line index, point operators by the point index a·q + b.
#[derive(Debug, Clone)]
pub struct QuantumNet {
    dim: usize,
    plane: AffinePlane,
    line_projectors: Vec<CMatrix>,
    point_operators: Vec<CMatrix>,
}

impl QuantumNet {
    /// Assemble a net from explicit parts, checking only shapes. Property
    /// violations are the business of [`verify_net`], not construction —
    /// this is the entry point for fault injection and deserialized data.
    pub fn from_parts(
        plane: AffinePlane,
        line_projectors: Vec<CMatrix>,
        point_operators: Vec<CMatrix>,
    ) -> Result<Self, NetError> {
        let dim = plane.order() as usize;
        if line_projectors.len() != plane.incidence().n_lines() {
            return Err(NetError::MalformedNet(format!(
                "{} projectors for {} lines",
                line_projectors.len(),
                plane.incidence().n_lines()
            )));
        }
        if point_operators.len() != plane.incidence().n_points() {
            return Err(NetError::MalformedNet(format!(
                "{} point operators for {} points",
                point_operators.len(),
                plane.incidence().n_points()
            )));
        }
        for m in line_projectors.iter().chain(&point_operators) {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(NetError::MalformedNet(format!(
                    "operator is {}×{}, expected {dim}×{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Self {
            dim,
            plane,
            line_projectors,
            point_operators,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn plane(&self) -> &AffinePlane {
        &self.plane
    }

    pub fn line_projectors(&self) -> &[CMatrix] {
        &self.line_projectors
    }

    pub fn point_operators(&self) -> &[CMatrix] {
        &self.point_operators
    }

    pub fn projector(&self, line: usize) -> &CMatrix {
        &self.line_projectors[line]
    }

    pub fn point_operator(&self, point: usize) -> &CMatrix {
        &self.point_operators[point]
    }

    /// Swap in a different projector for one line, leaving the point
    /// operators untouched. Intended for fault injection when exercising
    /// [`verify_net`]; the result will generally fail verification.
    pub fn replace_projector(&mut self, line: usize, projector: CMatrix) {
        self.line_projectors[line] = projector;
    }
}

/// Build the quantum net for a complete MUB set over the matching plane.
///
/// Striation i is measured by basis i, and within a striation the line with
/// intercept j gets the projector onto basis vector j (the gauge fixed by
/// this crate). Point operators are A_α = Σ_{λ∋α} P_λ − I.
pub fn build_quantum_net(mubs: &MubSet, plane: &AffinePlane) -> Result<QuantumNet, NetError> {
    let n = plane.order() as usize;
    if mubs.dim() != n {
        return Err(NetError::OrderMismatch {
            dim: mubs.dim(),
            order: plane.order(),
        });
    }
    if mubs.bases().len() != n + 1 {
        return Err(NetError::IncompleteMubSet {
            expected: n + 1,
            got: mubs.bases().len(),
        });
    }

    // Striation-major line order matches the plane's line indexing.
    let mut line_projectors = Vec::with_capacity(n * (n + 1));
    for basis in mubs.bases() {
        for v in basis.vectors() {
            line_projectors.push(outer(v));
        }
    }

    let incidence = plane.incidence();
    let through = incidence.lines_through();
    let id = identity(n);
    let point_operators = (0..incidence.n_points())
        .map(|alpha| {
            let mut a = -&id;
            for &li in &through[alpha] {
                a += &line_projectors[li];
            }
            a
        })
        .collect();

    QuantumNet::from_parts(plane.clone(), line_projectors, point_operators)
}

/// Deviations measured by [`verify_net`], in the paper's A_α/N normalization.
#[derive(Debug, Clone, Serialize)]
pub struct NetReport {
    pub tol: f64,
    /// Property 1: max |Tr(A_α/N) − 1/N|.
    pub trace_deviation: f64,
    /// Property 2: max |Tr[(A_α/N)(A_β/N)] − δ_αβ/N|.
    pub orthogonality_deviation: f64,
    /// Property 3: max entry of |Σ_{α∈λ} A_α/N − P_λ|.
    pub line_sum_deviation: f64,
    /// Line achieving the property-3 maximum.
    pub line_sum_witness: Option<usize>,
    /// Tr(P_λ P_ν) for parallel λ ≠ ν, deviation from 0.
    pub parallel_overlap_deviation: f64,
    /// Tr(P_λ P_ν) for non-parallel λ, ν, deviation from 1/N.
    pub nonparallel_overlap_deviation: f64,
    pub pass: bool,
}

impl NetReport {
    pub fn max_deviation(&self) -> f64 {
        self.trace_deviation
            .max(self.orthogonality_deviation)
            .max(self.line_sum_deviation)
            .max(self.parallel_overlap_deviation)
            .max(self.nonparallel_overlap_deviation)
    }
}

/// Measure all five defining deviations of a net.
pub fn verify_net(net: &QuantumNet, tol: f64) -> NetReport {
    let n = net.dim as f64;
    let points = &net.point_operators;
    let lines = &net.line_projectors;
    let incidence = net.plane.incidence();

    let mut trace_deviation: f64 = 0.0;
    for a in points {
        trace_deviation = trace_deviation.max((trace(a).re / n - 1.0 / n).abs().max(trace(a).im.abs() / n));
    }

    let mut orthogonality_deviation: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate() {
            let target = if i == j { 1.0 / n } else { 0.0 };
            let t = trace(&(a * b)) / (n * n);
            orthogonality_deviation =
                orthogonality_deviation.max((t.re - target).abs().max(t.im.abs()));
        }
    }

    let mut line_sum_deviation: f64 = 0.0;
    let mut line_sum_witness = None;
    for (li, line) in incidence.lines().iter().enumerate() {
        let mut sum = CMatrix::zeros(net.dim, net.dim);
        for &alpha in line {
            sum += &points[alpha];
        }
        sum /= num_complex::Complex::new(n, 0.0);
        let dev = max_abs_diff(&sum, &lines[li]);
        if dev > line_sum_deviation {
            line_sum_deviation = dev;
            line_sum_witness = Some(li);
        }
    }

    // Two lines are parallel exactly when they belong to the same striation
    // (same block of the striation-major index) — for verification we use
    // disjointness of the underlying point sets.
    let mut parallel_overlap_deviation: f64 = 0.0;
    let mut nonparallel_overlap_deviation: f64 = 0.0;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let shared = incidence
                .line(i)
                .iter()
                .filter(|p| incidence.line(j).binary_search(p).is_ok())
                .count();
            let t = trace(&(&lines[i] * &lines[j]));
            if shared == 0 {
                parallel_overlap_deviation =
                    parallel_overlap_deviation.max(t.re.abs().max(t.im.abs()));
            } else {
                nonparallel_overlap_deviation =
                    nonparallel_overlap_deviation.max((t.re - 1.0 / n).abs().max(t.im.abs()));
            }
        }
    }

    let max = trace_deviation
        .max(orthogonality_deviation)
        .max(line_sum_deviation)
        .max(parallel_overlap_deviation)
        .max(nonparallel_overlap_deviation);
    NetReport {
        tol,
        trace_deviation,
        orthogonality_deviation,
        line_sum_deviation,
        line_sum_witness,
        parallel_overlap_deviation,
        nonparallel_overlap_deviation,
        pass: max <= tol,
    }
}

/// Trace–cardinality identities |S_M| = k·Tr M at k = N.
#[derive(Debug, Clone, Serialize)]
pub struct CorrespondenceReport {
    /// The multiplier k (always the net dimension N).
    pub k: usize,
    /// Singletons: |k·Tr(A_α/N) − 1|.
    pub singleton_deviation: f64,
    /// Pair intersections: |k·Tr[(A_α/N)(A_β/N)] − δ_αβ|.
    pub pair_deviation: f64,
    /// Lines: |k·Tr P_λ − N|.
    pub line_deviation: f64,
    /// Identity: |k·Tr I − N²|.
    pub identity_deviation: f64,
}

impl CorrespondenceReport {
    pub fn max_deviation(&self) -> f64 {
        self.singleton_deviation
            .max(self.pair_deviation)
            .max(self.line_deviation)
            .max(self.identity_deviation)
    }
}

/// Check that traces count cardinalities: a point is a singleton, the
/// intersection of two points has 0 or 1 elements, a line has N points, and
/// the identity stands for all N² points.
pub fn trace_cardinality_check(net: &QuantumNet) -> CorrespondenceReport {
    let n = net.dim as f64;
    let k = n;

    let mut singleton_deviation: f64 = 0.0;
    for a in &net.point_operators {
        singleton_deviation = singleton_deviation.max((k * trace(a).re / n - 1.0).abs());
    }

    let mut pair_deviation: f64 = 0.0;
    for (i, a) in net.point_operators.iter().enumerate() {
        for (j, b) in net.point_operators.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            let t = k * trace(&(a * b)).re / (n * n);
            pair_deviation = pair_deviation.max((t - target).abs());
        }
    }

    let mut line_deviation: f64 = 0.0;
    for p in &net.line_projectors {
        line_deviation = line_deviation.max((k * trace(p).re - n).abs());
    }

    let identity_deviation = (k * trace(&identity(net.dim)).re - n * n).abs();

    CorrespondenceReport {
        k: net.dim,
        singleton_deviation,
        pair_deviation,
        line_deviation,
        identity_deviation,
    }
}

/// A state rendered as a real function on the N×N phase space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerFunction {
    dim: usize,
    values: Vec<f64>,
}

impl WignerFunction {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Values indexed by phase-space point a·N + b.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, point: usize) -> f64 {
        self.values[point]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sum over the given point indices — for a line of the net's plane this
    /// equals the Born probability Tr(ρ P_λ).
    pub fn line_sum(&self, line: &[usize]) -> f64 {
        line.iter().map(|&p| self.values[p]).sum()
    }
}

/// Evaluate W_α = Tr(ρ A_α)/N over all phase-space points.
///
/// ρ must be Hermitian with unit trace (checked at [`DEFAULT_TOL`]). The
/// values always sum to 1, and summing along a line λ gives Tr(ρ P_λ) by
/// property 3.
pub fn wigner_function(rho: &CMatrix, net: &QuantumNet) -> Result<WignerFunction, NetError> {
    if rho.nrows() != net.dim || rho.ncols() != net.dim {
        return Err(NetError::StateDimensionMismatch {
            rows: rho.nrows(),
            cols: rho.ncols(),
            dim: net.dim,
        });
    }
    let herm = hermiticity_deviation(rho);
    if herm > DEFAULT_TOL {
        return Err(NetError::NotHermitian { deviation: herm });
    }
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > DEFAULT_TOL || tr.im.abs() > DEFAULT_TOL {
        return Err(NetError::NotUnitTrace { trace: tr.re });
    }

    let n = net.dim as f64;
    let values = net
        .point_operators
        .iter()
        .map(|a| {
            let w = trace(&(rho * a)) / num_complex::Complex::new(n, 0.0);
            debug_assert!(w.im.abs() < 1e-12, "Wigner value acquired imaginary part");
            w.re
        })
        .collect();
    Ok(WignerFunction {
        dim: net.dim,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use crate::geometry::build_affine_plane;
    use crate::linalg::{random_density_matrix, C64};
    use crate::mub::build_mubs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn net(q: u32) -> QuantumNet {
        let field = FiniteField::of_order(q).unwrap();
        let mubs = build_mubs(&field).unwrap();
        let plane = build_affine_plane(&field);
        build_quantum_net(&mubs, &plane).unwrap()
    }

    #[test]
    fn dimension_two_point_operator_traces() {
        let net = net(2);
        for a in net.point_operators() {
            let t = trace(a);
            assert!((t.re - 1.0).abs() < 1e-12 && t.im.abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_two_point_operator_orthogonality() {
        // Tr(A_α A_β) = N δ_αβ, i.e. 2 on the diagonal and 0 off it.
        let net = net(2);
        for (i, a) in net.point_operators().iter().enumerate() {
            for (j, b) in net.point_operators().iter().enumerate() {
                let t = trace(&(a * b));
                let expected = if i == j { 2.0 } else { 0.0 };
                assert!((t.re - expected).abs() < 1e-12 && t.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn line_sums_reconstruct_projectors_for_order_three() {
        // Direct matrix-summation oracle for property 3, all 12 lines.
        let net = net(3);
        for (li, line) in net.plane().incidence().lines().iter().enumerate() {
            let mut sum = CMatrix::zeros(3, 3);
            for &alpha in line {
                sum += net.point_operator(alpha);
            }
            sum /= C64::new(3.0, 0.0);
            assert!(max_abs_diff(&sum, net.projector(li)) < 1e-10, "line {li}");
        }
    }

    #[test]
    fn verify_net_passes_for_small_orders() {
        for q in [2u32, 3, 5] {
            let report = verify_net(&net(q), DEFAULT_TOL);
            assert!(report.pass, "q = {q}: {report:?}");
        }
    }

    #[test]
    fn corrupted_projector_is_caught_with_witness() {
        let mut n = net(3);
        let maximally_mixed = identity(3) / C64::new(3.0, 0.0);
        n.replace_projector(0, maximally_mixed);
        let report = verify_net(&n, DEFAULT_TOL);
        assert!(!report.pass);
        assert!(report.line_sum_deviation >= 1.0 / 3.0 - 1e-12);
        assert_eq!(report.line_sum_witness, Some(0));
    }

    #[test]
    fn dimension_two_nonparallel_overlaps_are_one_half() {
        let report = verify_net(&net(2), DEFAULT_TOL);
        assert!(report.nonparallel_overlap_deviation < 1e-12);
        assert!(report.parallel_overlap_deviation < 1e-12);
    }

    #[test]
    fn projectors_of_each_striation_resolve_identity() {
        for q in [2u32, 3, 5] {
            let net = net(q);
            let n = q as usize;
            for s in 0..=n {
                let mut sum = CMatrix::zeros(n, n);
                for li in net.plane().striation_line_indices(s) {
                    sum += net.projector(li);
                }
                assert!(max_abs_diff(&sum, &identity(n)) < 1e-10, "q = {q}, striation {s}");
            }
        }
    }

    #[test]
    fn trace_cardinality_identities() {
        for q in [2u32, 3] {
            let report = trace_cardinality_check(&net(q));
            assert!(report.max_deviation() < 1e-10, "q = {q}: {report:?}");
        }
        // Spot values: k·Tr P_λ = N points per line; k·Tr I = N² points.
        let n2 = net(2);
        for p in n2.line_projectors() {
            assert!((2.0 * trace(p).re - 2.0).abs() < 1e-12);
        }
        assert!((2.0 * trace(&identity(2)).re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn wigner_of_maximally_mixed_state_is_flat() {
        let net = net(3);
        let rho = identity(3) / C64::new(3.0, 0.0);
        let w = wigner_function(&rho, &net).unwrap();
        for &v in w.values() {
            assert!((v - 1.0 / 9.0).abs() < 1e-12);
        }
        assert!((w.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wigner_of_a_net_line_state() {
        // ρ = P_λ: value 1/N on each point of λ, line sum 1.
        let net = net(3);
        let li = 5;
        let rho = net.projector(li).clone();
        let w = wigner_function(&rho, &net).unwrap();
        let line = net.plane().incidence().line(li);
        for &alpha in line {
            assert!((w.value(alpha) - 1.0 / 3.0).abs() < 1e-10);
        }
        assert!((w.line_sum(line) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn wigner_line_sums_are_born_probabilities() {
        // N = 2, ρ = |0⟩⟨0|: striation sums {1, 0}, {½, ½}, {½, ½}.
        let net = net(2);
        let mut rho = CMatrix::zeros(2, 2);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let w = wigner_function(&rho, &net).unwrap();
        let sums: Vec<Vec<f64>> = (0..3)
            .map(|s| {
                net.plane()
                    .striation_line_indices(s)
                    .into_iter()
                    .map(|li| w.line_sum(net.plane().incidence().line(li)))
                    .collect()
            })
            .collect();
        assert!((sums[0][0] - 1.0).abs() < 1e-12 && sums[0][1].abs() < 1e-12);
        for s in 1..3 {
            for &v in &sums[s] {
                assert!((v - 0.5).abs() < 1e-12);
            }
        }
        // Cross-check every line against the Born rule directly.
        for (li, p) in net.line_projectors().iter().enumerate() {
            let born = trace(&(&rho * p)).re;
            let sum = w.line_sum(net.plane().incidence().line(li));
            assert!((sum - born).abs() < 1e-10);
        }
    }

    #[test]
    fn wigner_values_are_real_and_sum_to_one_for_random_states() {
        let net = net(5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rho = random_density_matrix(5, &mut rng);
            let w = wigner_function(&rho, &net).unwrap();
            assert!((w.sum() - 1.0).abs() < 1e-10);
            for (li, p) in net.line_projectors().iter().enumerate() {
                let born = trace(&(&rho * p)).re;
                let sum = w.line_sum(net.plane().incidence().line(li));
                assert!((sum - born).abs() < 1e-10);
                assert!((-1e-10..=1.0 + 1e-10).contains(&born));
            }
        }
    }

    #[test]
    fn wigner_input_validation() {
        let net = net(2);
        let rho3 = identity(3) / C64::new(3.0, 0.0);
        assert!(matches!(
            wigner_function(&rho3, &net).unwrap_err(),
            NetError::StateDimensionMismatch { .. }
        ));

        let mut nonherm = CMatrix::zeros(2, 2);
        nonherm[(0, 0)] = C64::new(1.0, 0.0);
        nonherm[(0, 1)] = C64::new(0.5, 0.0); // ρ ≠ ρ†
        assert!(matches!(
            wigner_function(&nonherm, &net).unwrap_err(),
            NetError::NotHermitian { .. }
        ));

        let double = identity(2);
        assert!(matches!(
            wigner_function(&double, &net).unwrap_err(),
            NetError::NotUnitTrace { .. }
        ));
    }

    #[test]
    fn build_rejects_mismatched_inputs() {
        let f2 = FiniteField::of_order(2).unwrap();
        let f3 = FiniteField::of_order(3).unwrap();
        let mubs2 = build_mubs(&f2).unwrap();
        let plane3 = build_affine_plane(&f3);
        assert!(matches!(
            build_quantum_net(&mubs2, &plane3).unwrap_err(),
            NetError::OrderMismatch { dim: 2, order: 3 }
        ));

        let mubs3 = build_mubs(&f3).unwrap();
        let partial =
            crate::mub::MubSet::from_bases(mubs3.bases()[..3].to_vec(), "partial").unwrap();
        assert!(matches!(
            build_quantum_net(&partial, &plane3).unwrap_err(),
            NetError::IncompleteMubSet { expected: 4, got: 3 }
        ));
    }

    #[test]
    fn deviations_invariant_under_plane_automorphism() {
        // Translate (a, b) ↦ (a, b+1): verticals are fixed, slope lines map
        // intercept c ↦ c+1 within their striation. Relabelling projectors
        // and point operators accordingly must leave every measured
        // deviation exactly unchanged (the maxima run over permuted sets).
        let q = 3u32;
        let field = FiniteField::of_order(q).unwrap();
        let original = net(q);
        let n = q as usize;

        let tau = |p: usize| {
            let (a, b) = ((p / n) as u32, (p % n) as u32);
            (a as usize) * n + field.add(b, 1) as usize
        };
        let sigma = |li: usize| {
            let (s, c) = (li / n, li % n);
            if s == 0 {
                li // verticals fixed
            } else {
                s * n + field.add(c as u32, 1) as usize
            }
        };

        let inv = |f: &dyn Fn(usize) -> usize, len: usize| {
            let mut out = vec![0usize; len];
            for i in 0..len {
                out[f(i)] = i;
            }
            out
        };
        let sigma_inv = inv(&sigma, original.line_projectors().len());
        let tau_inv = inv(&tau, original.point_operators().len());

        let projectors = (0..original.line_projectors().len())
            .map(|li| original.projector(sigma_inv[li]).clone())
            .collect();
        let operators = (0..original.point_operators().len())
            .map(|p| original.point_operator(tau_inv[p]).clone())
            .collect();
        let relabeled =
            QuantumNet::from_parts(original.plane().clone(), projectors, operators).unwrap();

        let a = verify_net(&original, DEFAULT_TOL);
        let b = verify_net(&relabeled, DEFAULT_TOL);
        assert!((a.trace_deviation - b.trace_deviation).abs() < 1e-12);
        assert!((a.orthogonality_deviation - b.orthogonality_deviation).abs() < 1e-12);
        assert!((a.line_sum_deviation - b.line_sum_deviation).abs() < 1e-12);
        assert!((a.parallel_overlap_deviation - b.parallel_overlap_deviation).abs() < 1e-12);
        assert!(
            (a.nonparallel_overlap_deviation - b.nonparallel_overlap_deviation).abs() < 1e-12
        );
        assert!(b.pass);
    }
}
