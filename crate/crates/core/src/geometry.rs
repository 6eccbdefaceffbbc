//! Affine planes over GF(q), striations, Latin squares, and duality.
//!
//! The combinatorial side of the construction: an affine plane of order N
//! has N² points and N(N+1) lines, the lines fall into N+1 striations
//! (parallel classes), and any two lines from different striations meet in
//! exactly one point. Picking two striations as rows and columns turns each
//! remaining striation into a Latin square, and the squares so obtained are
//! mutually orthogonal. Reversing the roles of points and lines yields the
//! dual structure whose counts govern the SIC-POVM analogue.
//!
//! Canonical labelling (relied on by JSON exports and tests): points of the
//! plane over GF(q) are pairs (a, b) indexed a·q + b; striations come in the
//! order verticals, slope 0, slope 1, …, slope q−1 (slopes in field-encoding
//! order); lines are stored striation-major, each sorted ascending.

use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldDescriptor, FiniteField};

/// Default node budget for [`search_orthogonal_mate`].
pub const DEFAULT_MATE_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("line {line} contains point index {index}, outside 0..{n_points}")]
    PointOutOfRange {
        line: usize,
        index: usize,
        n_points: usize,
    },
    #[error("lines {first} and {second} contain the same point set")]
    DuplicateLine { first: usize, second: usize },
    #[error("striations live on different point sets ({left} vs {right} points)")]
    PointSetMismatch { left: usize, right: usize },
    #[error("lines do not partition the point set")]
    NotAPartition,
    #[error("not a valid Latin square: {0}")]
    InvalidLatinSquare(String),
}

/// A finite incidence structure: points 0..n_points and lines as point sets.
///
/// The generic carrier for affine planes and their duals. Line point-indices
/// are kept sorted ascending; line order is whatever the constructor was
/// given (planes use striation-major order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceStructure {
    n_points: usize,
    lines: Vec<Vec<usize>>,
    point_labels: Option<Vec<String>>,
    line_labels: Option<Vec<String>>,
}

impl IncidenceStructure {
    /// Build a structure, sorting each line and rejecting out-of-range
    /// indices and duplicate lines.
    pub fn new(n_points: usize, lines: Vec<Vec<usize>>) -> Result<Self, GeometryError> {
        let s = Self::allow_duplicates(n_points, lines)?;
        for i in 0..s.lines.len() {
            for j in i + 1..s.lines.len() {
                if s.lines[i] == s.lines[j] {
                    return Err(GeometryError::DuplicateLine { first: i, second: j });
                }
            }
        }
        Ok(s)
    }

    /// Same as [`new`](Self::new) but permits repeated lines. Dual structures
    /// of degenerate inputs legitimately contain them (two points on a single
    /// shared line dualize to two copies of the same one-point line).
    pub fn allow_duplicates(
        n_points: usize,
        mut lines: Vec<Vec<usize>>,
    ) -> Result<Self, GeometryError> {
        for (li, line) in lines.iter_mut().enumerate() {
            line.sort_unstable();
            line.dedup();
            if let Some(&bad) = line.iter().find(|&&p| p >= n_points) {
                return Err(GeometryError::PointOutOfRange {
                    line: li,
                    index: bad,
                    n_points,
                });
            }
        }
        Ok(Self {
            n_points,
            lines,
            point_labels: None,
            line_labels: None,
        })
    }

    pub fn with_labels(
        mut self,
        point_labels: Option<Vec<String>>,
        line_labels: Option<Vec<String>>,
    ) -> Self {
        self.point_labels = point_labels;
        self.line_labels = line_labels;
        self
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> &[usize] {
        &self.lines[i]
    }

    pub fn point_labels(&self) -> Option<&[String]> {
        self.point_labels.as_deref()
    }

    pub fn line_labels(&self) -> Option<&[String]> {
        self.line_labels.as_deref()
    }

    /// Indices of the lines through each point.
    pub fn lines_through(&self) -> Vec<Vec<usize>> {
        let mut through = vec![Vec::new(); self.n_points];
        for (li, line) in self.lines.iter().enumerate() {
            for &p in line {
                through[p].push(li);
            }
        }
        through
    }

    /// One bitmask (64-bit blocks) per line, for fast intersection tests.
    fn line_masks(&self) -> Vec<Vec<u64>> {
        let blocks = self.n_points.div_ceil(64).max(1);
        self.lines
            .iter()
            .map(|line| {
                let mut mask = vec![0u64; blocks];
                for &p in line {
                    mask[p / 64] |= 1 << (p % 64);
                }
                mask
            })
            .collect()
    }
}

fn masks_disjoint(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    // both sorted ascending
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// A parallel class: lines that partition the full point set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Striation {
    label: String,
    n_points: usize,
    lines: Vec<Vec<usize>>,
}

impl Striation {
    /// Build a striation, checking the partition property.
    pub fn new(
        label: impl Into<String>,
        n_points: usize,
        lines: Vec<Vec<usize>>,
    ) -> Result<Self, GeometryError> {
        let mut seen = vec![false; n_points];
        let mut covered = 0usize;
        for line in &lines {
            for &p in line {
                if p >= n_points || seen[p] {
                    return Err(GeometryError::NotAPartition);
                }
                seen[p] = true;
                covered += 1;
            }
        }
        if covered != n_points {
            return Err(GeometryError::NotAPartition);
        }
        let mut lines = lines;
        for line in &mut lines {
            line.sort_unstable();
        }
        Ok(Self {
            label: label.into(),
            n_points,
            lines,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }
}

/// True iff every line of `s1` meets every line of `s2` in exactly one
/// point — the geometric counterpart of unbiasedness between bases.
///
/// A striation compared against itself fails: parallel lines meet in
/// 0 points (or all N, for a line and itself).
pub fn check_striations_unbiased(s1: &Striation, s2: &Striation) -> Result<bool, GeometryError> {
    if s1.n_points != s2.n_points {
        return Err(GeometryError::PointSetMismatch {
            left: s1.n_points,
            right: s2.n_points,
        });
    }
    for a in &s1.lines {
        for b in &s2.lines {
            if intersection_size(a, b) != 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The affine plane AG(2, q) built from GF(q)².
#[derive(Debug, Clone)]
pub struct AffinePlane {
    order: u32,
    field: FieldDescriptor,
    incidence: IncidenceStructure,
    striations: Vec<Striation>,
}

impl AffinePlane {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn incidence(&self) -> &IncidenceStructure {
        &self.incidence
    }

    pub fn striations(&self) -> &[Striation] {
        &self.striations
    }

    /// Line indices (into the incidence structure) of striation `s`.
    /// Lines are stored striation-major, so this is a contiguous block.
    pub fn striation_line_indices(&self, s: usize) -> Vec<usize> {
        let q = self.order as usize;
        (s * q..(s + 1) * q).collect()
    }
}

/// Build the affine plane over the given field.
///
/// Points are pairs (a, b) ∈ GF(q)² with index a·q + b. The q+1 striations
/// are, in order: the verticals {(c, y) : y} for c = 0..q, then for each
/// slope m in encoding order the lines {(x, m·x + c) : x} for intercepts
/// c = 0..q. Within a striation, lines are ordered by c.
pub fn build_affine_plane(field: &FiniteField) -> AffinePlane {
    let q = field.order();
    let n_points = (q * q) as usize;
    let idx = |a: u32, b: u32| (a * q + b) as usize;

    let mut lines: Vec<Vec<usize>> = Vec::with_capacity((q * (q + 1)) as usize);
    let mut line_labels = Vec::with_capacity(lines.capacity());
    let mut striations = Vec::with_capacity(q as usize + 1);

    let verticals: Vec<Vec<usize>> = (0..q)
        .map(|c| (0..q).map(|y| idx(c, y)).collect())
        .collect();
    for (c, line) in verticals.iter().enumerate() {
        lines.push(line.clone());
        line_labels.push(format!("x = {c}"));
    }
    striations.push(Striation::new("verticals", n_points, verticals).expect("partition"));

    for m in 0..q {
        let slope_lines: Vec<Vec<usize>> = (0..q)
            .map(|c| {
                let mut line: Vec<usize> =
                    (0..q).map(|x| idx(x, field.add(field.mul(m, x), c))).collect();
                line.sort_unstable();
                line
            })
            .collect();
        for (c, line) in slope_lines.iter().enumerate() {
            lines.push(line.clone());
            line_labels.push(format!("y = {m}x + {c}"));
        }
        striations
            .push(Striation::new(format!("slope {m}"), n_points, slope_lines).expect("partition"));
    }

    // Structural bound: a plane never yields more than N+1 parallel classes.
    assert!(striations.len() as u32 <= q + 1);

    let point_labels = (0..q)
        .flat_map(|a| (0..q).map(move |b| format!("({a},{b})")))
        .collect();
    let incidence = IncidenceStructure::new(n_points, lines)
        .expect("plane construction yields distinct in-range lines")
        .with_labels(Some(point_labels), Some(line_labels));

    AffinePlane {
        order: q,
        field: field.descriptor(),
        incidence,
        striations,
    }
}

/// Failure witness inside an [`AxiomReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxiomWitness {
    /// A point pair lying on `line_count` ≠ 1 common lines.
    PointPair {
        a: usize,
        b: usize,
        line_count: usize,
    },
    /// A (point, line) pair with `parallel_count` ≠ 1 parallels through the point.
    ParallelFailure {
        point: usize,
        line: usize,
        parallel_count: usize,
    },
    /// Every triple of points is collinear (or there are fewer than 3 points).
    NoNoncollinearTriple,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub pass: bool,
    pub witness: Option<AxiomWitness>,
}

impl AxiomCheck {
    fn pass() -> Self {
        Self {
            pass: true,
            witness: None,
        }
    }

    fn fail(witness: AxiomWitness) -> Self {
        Self {
            pass: false,
            witness: Some(witness),
        }
    }
}

/// Result of [`check_affine_axioms`]: one check per axiom plus derived counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub n_points: usize,
    pub n_lines: usize,
    /// Axiom 1: every point pair lies on exactly one common line.
    pub unique_joining_line: AxiomCheck,
    /// Axiom 2: for a line λ and point α ∉ λ, exactly one line through α
    /// misses λ entirely (is parallel to it).
    pub unique_parallel: AxiomCheck,
    /// Axiom 3: some three points are noncollinear.
    pub noncollinear_triple: AxiomCheck,
    /// Whether the lines decompose into parallel classes each partitioning
    /// the points (computed by closing each line under parallelism).
    pub striation_decomposable: bool,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.unique_joining_line.pass && self.unique_parallel.pass && self.noncollinear_triple.pass
    }
}

/// Check the three affine-plane axioms. Failures are reported with
/// witnesses, never raised as errors — verification tooling wants to see
/// what broke.
pub fn check_affine_axioms(s: &IncidenceStructure) -> AxiomReport {
    let through = s.lines_through();
    let masks = s.line_masks();

    // Axiom 1: scan point pairs, counting shared lines via the adjacency.
    let mut unique_joining_line = AxiomCheck::pass();
    'pairs: for a in 0..s.n_points() {
        for b in a + 1..s.n_points() {
            let count = through[a].iter().filter(|li| s.line(**li).binary_search(&b).is_ok()).count();
            if count != 1 {
                unique_joining_line = AxiomCheck::fail(AxiomWitness::PointPair {
                    a,
                    b,
                    line_count: count,
                });
                break 'pairs;
            }
        }
    }

    // Axiom 2: for each line λ and external point α, exactly one line
    // through α must be disjoint from λ.
    let mut unique_parallel = AxiomCheck::pass();
    'parallel: for (li, mask) in masks.iter().enumerate() {
        for alpha in 0..s.n_points() {
            if mask[alpha / 64] >> (alpha % 64) & 1 == 1 {
                continue;
            }
            let count = through[alpha]
                .iter()
                .filter(|&&mi| masks_disjoint(&masks[mi], mask))
                .count();
            if count != 1 {
                unique_parallel = AxiomCheck::fail(AxiomWitness::ParallelFailure {
                    point: alpha,
                    line: li,
                    parallel_count: count,
                });
                break 'parallel;
            }
        }
    }

    // Axiom 3: hunt for a noncollinear triple, bailing out at the first hit.
    let collinear = |a: usize, b: usize, c: usize| {
        through[a]
            .iter()
            .any(|&li| s.line(li).binary_search(&b).is_ok() && s.line(li).binary_search(&c).is_ok())
    };
    let mut found_triple = false;
    'triples: for a in 0..s.n_points() {
        for b in a + 1..s.n_points() {
            for c in b + 1..s.n_points() {
                if !collinear(a, b, c) {
                    found_triple = true;
                    break 'triples;
                }
            }
        }
    }
    let noncollinear_triple = if found_triple {
        AxiomCheck::pass()
    } else {
        AxiomCheck::fail(AxiomWitness::NoNoncollinearTriple)
    };

    AxiomReport {
        n_points: s.n_points(),
        n_lines: s.n_lines(),
        unique_joining_line,
        unique_parallel,
        noncollinear_triple,
        striation_decomposable: striation_decomposable(s, &masks),
    }
}

/// Can the lines be grouped into parallel classes, each partitioning the
/// points? Each unused line is closed under "disjoint from": the closure
/// must itself be pairwise disjoint and cover everything.
fn striation_decomposable(s: &IncidenceStructure, masks: &[Vec<u64>]) -> bool {
    let mut used = vec![false; s.n_lines()];
    for seed in 0..s.n_lines() {
        if used[seed] {
            continue;
        }
        let class: Vec<usize> = (0..s.n_lines())
            .filter(|&li| !used[li] && (li == seed || masks_disjoint(&masks[li], &masks[seed])))
            .collect();
        let mut covered = 0usize;
        for (i, &a) in class.iter().enumerate() {
            covered += s.line(a).len();
            for &b in &class[i + 1..] {
                if !masks_disjoint(&masks[a], &masks[b]) {
                    return false;
                }
            }
        }
        if covered != s.n_points() {
            return false;
        }
        for &li in &class {
            used[li] = true;
        }
    }
    true
}

/// One of the five §4-style count conditions on a dual structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountCheck {
    pub pass: bool,
    pub detail: Option<String>,
}

impl CountCheck {
    fn from_result(pass: bool, detail: impl FnOnce() -> String) -> Self {
        Self {
            pass,
            detail: (!pass).then(detail),
        }
    }
}

/// Result of [`check_dual_counts`]: the five conditions a dual affine plane
/// of order N must satisfy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    /// 1. exactly N(N+1) points
    pub point_count: CountCheck,
    /// 2. exactly N² lines
    pub line_count: CountCheck,
    /// 3. each line contains exactly N+1 points
    pub points_per_line: CountCheck,
    /// 4. each point lies on exactly N lines
    pub lines_per_point: CountCheck,
    /// 5. each pair of lines intersects in exactly one point
    pub pairwise_intersection: CountCheck,
}

impl CountReport {
    pub fn all_pass(&self) -> bool {
        self.point_count.pass
            && self.line_count.pass
            && self.points_per_line.pass
            && self.lines_per_point.pass
            && self.pairwise_intersection.pass
    }
}

/// Verify the five counts that characterise the dual of an affine plane
/// of order `n`: N(N+1) points, N² lines, N+1 points per line, N lines
/// per point, and pairwise line intersections of exactly one point.
pub fn check_dual_counts(s: &IncidenceStructure, n: u32) -> CountReport {
    let n = n as usize;
    let point_count = CountCheck::from_result(s.n_points() == n * (n + 1), || {
        format!("{} points, expected {}", s.n_points(), n * (n + 1))
    });
    let line_count = CountCheck::from_result(s.n_lines() == n * n, || {
        format!("{} lines, expected {}", s.n_lines(), n * n)
    });

    let bad_line = s.lines().iter().position(|l| l.len() != n + 1);
    let points_per_line = CountCheck::from_result(bad_line.is_none(), || {
        let li = bad_line.unwrap();
        format!("line {} has {} points, expected {}", li, s.line(li).len(), n + 1)
    });

    let through = s.lines_through();
    let bad_point = through.iter().position(|t| t.len() != n);
    let lines_per_point = CountCheck::from_result(bad_point.is_none(), || {
        let p = bad_point.unwrap();
        format!("point {} lies on {} lines, expected {}", p, through[p].len(), n)
    });

    let mut bad_pair = None;
    'outer: for i in 0..s.n_lines() {
        for j in i + 1..s.n_lines() {
            let size = intersection_size(s.line(i), s.line(j));
            if size != 1 {
                bad_pair = Some((i, j, size));
                break 'outer;
            }
        }
    }
    let pairwise_intersection = CountCheck::from_result(bad_pair.is_none(), || {
        let (i, j, size) = bad_pair.unwrap();
        format!("lines {i} and {j} share {size} points, expected 1")
    });

    CountReport {
        point_count,
        line_count,
        points_per_line,
        lines_per_point,
        pairwise_intersection,
    }
}

/// Interchange points and lines: output point j is input line j, and the
/// output line for input point α is the set of input lines through α.
///
/// Applying `dualize` twice returns the original structure (indices and
/// labels included). Duplicate output lines are allowed — degenerate inputs
/// produce them.
pub fn dualize(s: &IncidenceStructure) -> IncidenceStructure {
    let dual_lines = s.lines_through();
    IncidenceStructure::allow_duplicates(s.n_lines(), dual_lines)
        .expect("dual line indices are in range by construction")
        .with_labels(
            s.line_labels().map(<[String]>::to_vec),
            s.point_labels().map(<[String]>::to_vec),
        )
}

/// An N×N Latin square: symbols 0..N−1, each appearing once per row and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare {
    order: usize,
    cells: Vec<Vec<usize>>,
}

impl LatinSquare {
    /// Validate and wrap a row-major symbol array.
    pub fn from_cells(cells: Vec<Vec<usize>>) -> Result<Self, GeometryError> {
        let n = cells.len();
        if n == 0 {
            return Err(GeometryError::InvalidLatinSquare("empty array".into()));
        }
        for (r, row) in cells.iter().enumerate() {
            if row.len() != n {
                return Err(GeometryError::InvalidLatinSquare(format!(
                    "row {r} has {} cells, expected {n}",
                    row.len()
                )));
            }
            if let Some(&s) = row.iter().find(|&&s| s >= n) {
                return Err(GeometryError::InvalidLatinSquare(format!(
                    "symbol {s} out of range in row {r}"
                )));
            }
        }
        for r in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for c in 0..n {
                if row_seen[cells[r][c]] {
                    return Err(GeometryError::InvalidLatinSquare(format!(
                        "symbol {} repeats in row {r}",
                        cells[r][c]
                    )));
                }
                row_seen[cells[r][c]] = true;
                if col_seen[cells[c][r]] {
                    return Err(GeometryError::InvalidLatinSquare(format!(
                        "symbol {} repeats in column {r}",
                        cells[c][r]
                    )));
                }
                col_seen[cells[c][r]] = true;
            }
        }
        Ok(Self { order: n, cells })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, r: usize, c: usize) -> usize {
        self.cells[r][c]
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    /// Cyclic (Z_n addition table) square: cell (r, c) = (r + c) mod n.
    pub fn cyclic(n: usize) -> Self {
        let cells = (0..n).map(|r| (0..n).map(|c| (r + c) % n).collect()).collect();
        Self { order: n, cells }
    }

    /// True iff superposing the two squares produces every ordered symbol
    /// pair exactly once.
    pub fn is_orthogonal_to(&self, other: &Self) -> bool {
        if self.order != other.order {
            return false;
        }
        let n = self.order;
        let mut seen = vec![false; n * n];
        for r in 0..n {
            for c in 0..n {
                let pair = self.cells[r][c] * n + other.cells[r][c];
                if seen[pair] {
                    return false;
                }
                seen[pair] = true;
            }
        }
        true
    }
}

/// Extract the complete family of N−1 mutually orthogonal Latin squares
/// from a plane.
///
/// Two striations must be designated rows and columns; the paper leaves the
/// choice open, and we fix the convention: verticals (striation 0) are the
/// columns, slope 0 (striation 1) the rows. Each remaining striation gives
/// one square, cell (r, c) holding the within-striation index of the line
/// through the point at row r, column c.
pub fn mols_from_plane(plane: &AffinePlane) -> Vec<LatinSquare> {
    let q = plane.order() as usize;
    let n_points = plane.incidence().n_points();

    let mut col_of = vec![0usize; n_points];
    for (c, line) in plane.striations()[0].lines().iter().enumerate() {
        for &p in line {
            col_of[p] = c;
        }
    }
    let mut row_of = vec![0usize; n_points];
    for (r, line) in plane.striations()[1].lines().iter().enumerate() {
        for &p in line {
            row_of[p] = r;
        }
    }

    plane.striations()[2..]
        .iter()
        .map(|striation| {
            let mut cells = vec![vec![0usize; q]; q];
            for (symbol, line) in striation.lines().iter().enumerate() {
                for &p in line {
                    cells[row_of[p]][col_of[p]] = symbol;
                }
            }
            LatinSquare::from_cells(cells).expect("striation yields a Latin square")
        })
        .collect()
}

/// Outcome of an orthogonal-mate search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MateSearch {
    /// An orthogonal mate, together with the number of search nodes visited.
    Found { mate: LatinSquare, nodes: u64 },
    /// The entire search space was exhausted: no mate exists.
    ProvedNone { nodes: u64 },
    /// The node budget ran out before the search finished.
    BudgetExhausted { nodes: u64 },
}

/// Search for a Latin square orthogonal to `sq`.
///
/// A mate exists iff `sq` decomposes into N disjoint transversals (cell sets
/// meeting each row, column, and symbol once). The search enumerates all
/// transversals, then runs an exact-cover backtrack selecting N disjoint
/// ones, always branching on the lowest uncovered cell and trying
/// transversals in enumeration order — the result is deterministic. Both
/// phases charge the shared node `budget`.
pub fn search_orthogonal_mate(sq: &LatinSquare, budget: u64) -> Result<MateSearch, GeometryError> {
    // Revalidate: callers may have deserialized the cells from outside.
    LatinSquare::from_cells(sq.cells().to_vec())?;
    let n = sq.order();
    let blocks = (n * n).div_ceil(64);
    let mut nodes: u64 = 0;

    // Phase 1: enumerate transversals row by row, columns ascending.
    let mut transversals: Vec<(Vec<usize>, Vec<u64>)> = Vec::new(); // (cols per row, cell mask)
    let mut cols = vec![0usize; n];
    let mut col_used = vec![false; n];
    let mut sym_used = vec![false; n];
    let mut stack_row = 0usize;
    let mut next_col = vec![0usize; n + 1];
    loop {
        if stack_row == n {
            let mut mask = vec![0u64; blocks];
            for (r, &c) in cols.iter().enumerate() {
                let cell = r * n + c;
                mask[cell / 64] |= 1 << (cell % 64);
            }
            transversals.push((cols.clone(), mask));
            stack_row -= 1;
            let c = cols[stack_row];
            col_used[c] = false;
            sym_used[sq.get(stack_row, c)] = false;
            continue;
        }
        let mut advanced = false;
        for c in next_col[stack_row]..n {
            if !col_used[c] && !sym_used[sq.get(stack_row, c)] {
                nodes += 1;
                if nodes > budget {
                    return Ok(MateSearch::BudgetExhausted { nodes });
                }
                cols[stack_row] = c;
                col_used[c] = true;
                sym_used[sq.get(stack_row, c)] = true;
                next_col[stack_row] = c + 1;
                stack_row += 1;
                next_col[stack_row] = 0;
                advanced = true;
                break;
            }
        }
        if !advanced {
            if stack_row == 0 {
                break;
            }
            stack_row -= 1;
            let c = cols[stack_row];
            col_used[c] = false;
            sym_used[sq.get(stack_row, c)] = false;
        }
    }

    // Phase 2: exact cover — pick n disjoint transversals covering all cells.
    let mut by_cell: Vec<Vec<usize>> = vec![Vec::new(); n * n];
    for (ti, (cols, _)) in transversals.iter().enumerate() {
        for (r, &c) in cols.iter().enumerate() {
            by_cell[r * n + c].push(ti);
        }
    }

    let mut covered = vec![0u64; blocks];
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    match cover(
        &transversals,
        &by_cell,
        &mut covered,
        &mut chosen,
        n,
        budget,
        &mut nodes,
    ) {
        CoverOutcome::Found => {
            let mut cells = vec![vec![0usize; n]; n];
            for (symbol, &ti) in chosen.iter().enumerate() {
                for (r, &c) in transversals[ti].0.iter().enumerate() {
                    cells[r][c] = symbol;
                }
            }
            let mate = LatinSquare::from_cells(cells)
                .expect("disjoint transversal cover yields a Latin square");
            debug_assert!(sq.is_orthogonal_to(&mate));
            Ok(MateSearch::Found { mate, nodes })
        }
        CoverOutcome::Exhausted => Ok(MateSearch::ProvedNone { nodes }),
        CoverOutcome::OutOfBudget => Ok(MateSearch::BudgetExhausted { nodes }),
    }
}

enum CoverOutcome {
    Found,
    Exhausted,
    OutOfBudget,
}

fn cover(
    transversals: &[(Vec<usize>, Vec<u64>)],
    by_cell: &[Vec<usize>],
    covered: &mut [u64],
    chosen: &mut Vec<usize>,
    n: usize,
    budget: u64,
    nodes: &mut u64,
) -> CoverOutcome {
    if chosen.len() == n {
        return CoverOutcome::Found;
    }
    // Branch on the lowest uncovered cell.
    let cell = match covered
        .iter()
        .enumerate()
        .find_map(|(b, &w)| (w != u64::MAX).then(|| b * 64 + (!w).trailing_zeros() as usize))
        .filter(|&c| c < n * n)
    {
        Some(c) => c,
        None => return CoverOutcome::Exhausted, // all covered but fewer than n chosen: impossible
    };
    for &ti in &by_cell[cell] {
        let mask = &transversals[ti].1;
        if !masks_disjoint(mask, covered) {
            continue;
        }
        *nodes += 1;
        if *nodes > budget {
            return CoverOutcome::OutOfBudget;
        }
        for (w, m) in covered.iter_mut().zip(mask) {
            *w |= m;
        }
        chosen.push(ti);
        match cover(transversals, by_cell, covered, chosen, n, budget, nodes) {
            CoverOutcome::Exhausted => {}
            other => return other,
        }
        chosen.pop();
        for (w, m) in covered.iter_mut().zip(mask) {
            *w &= !m;
        }
    }
    CoverOutcome::Exhausted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;

    fn plane(q: u32) -> AffinePlane {
        build_affine_plane(&FiniteField::of_order(q).unwrap())
    }

    #[test]
    fn plane_counts() {
        // GF(3): 9 points, 12 lines, 4 striations; GF(2): 4/6/3.
        // Larger orders against the counting oracle N², N(N+1), N+1.
        for q in [2u32, 3, 4, 5, 7, 8, 9] {
            let p = plane(q);
            let n = q as usize;
            assert_eq!(p.incidence().n_points(), n * n);
            assert_eq!(p.incidence().n_lines(), n * (n + 1));
            assert_eq!(p.striations().len(), n + 1);
            for line in p.incidence().lines() {
                assert_eq!(line.len(), n);
            }
        }
    }

    #[test]
    fn axioms_hold_for_small_planes() {
        for q in [2u32, 3, 4, 5] {
            let p = plane(q);
            let report = check_affine_axioms(p.incidence());
            assert!(report.all_pass(), "axioms failed for q = {q}: {report:?}");
            assert!(report.striation_decomposable);
        }
    }

    #[test]
    fn removing_a_line_breaks_axiom_one() {
        let p = plane(3);
        let mut lines = p.incidence().lines().to_vec();
        lines.pop();
        let broken = IncidenceStructure::new(9, lines).unwrap();
        let report = check_affine_axioms(&broken);
        assert!(!report.unique_joining_line.pass);
        // The witness pair must come from the removed line.
        match report.unique_joining_line.witness {
            Some(AxiomWitness::PointPair { a, b, line_count }) => {
                assert_eq!(line_count, 0);
                let removed = p.incidence().line(p.incidence().n_lines() - 1);
                assert!(removed.contains(&a) && removed.contains(&b));
            }
            other => panic!("expected point-pair witness, got {other:?}"),
        }
    }

    #[test]
    fn tiny_structure_fails_axiom_three() {
        let s = IncidenceStructure::new(2, vec![vec![0, 1]]).unwrap();
        let report = check_affine_axioms(&s);
        assert!(!report.noncollinear_triple.pass);
        assert_eq!(
            report.noncollinear_triple.witness,
            Some(AxiomWitness::NoNoncollinearTriple)
        );
    }

    #[test]
    fn grid_striations_are_unbiased() {
        // Rows vs columns of a 3×3 grid meet in exactly one cell.
        let rows = Striation::new("rows", 9, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]).unwrap();
        let cols = Striation::new("cols", 9, vec![vec![0, 3, 6], vec![1, 4, 7], vec![2, 5, 8]]).unwrap();
        assert!(check_striations_unbiased(&rows, &cols).unwrap());
        // A striation against itself fails: parallel lines share 0 or N points.
        assert!(!check_striations_unbiased(&rows, &rows).unwrap());
    }

    #[test]
    fn nongrid_striations_of_order_three_plane_are_unbiased() {
        let p = plane(3);
        // Striations 2 and 3 are the two diagonal families of Fig. 1.
        let s = p.striations();
        assert!(check_striations_unbiased(&s[2], &s[3]).unwrap());
        for i in 0..s.len() {
            for j in 0..s.len() {
                assert_eq!(check_striations_unbiased(&s[i], &s[j]).unwrap(), i != j);
            }
        }
    }

    #[test]
    fn striation_point_set_mismatch() {
        let a = Striation::new("a", 2, vec![vec![0, 1]]).unwrap();
        let b = Striation::new("b", 3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(
            check_striations_unbiased(&a, &b).unwrap_err(),
            GeometryError::PointSetMismatch { left: 2, right: 3 }
        );
    }

    #[test]
    fn striation_must_partition() {
        assert_eq!(
            Striation::new("bad", 4, vec![vec![0, 1], vec![1, 2]]).unwrap_err(),
            GeometryError::NotAPartition
        );
        assert_eq!(
            Striation::new("short", 4, vec![vec![0, 1]]).unwrap_err(),
            GeometryError::NotAPartition
        );
    }

    /// Brute-force orthogonality oracle: count ordered symbol pairs in the
    /// superposition and insist each occurs exactly once.
    fn orthogonal_by_pair_count(a: &LatinSquare, b: &LatinSquare) -> bool {
        let n = a.order();
        let mut counts = vec![0usize; n * n];
        for r in 0..n {
            for c in 0..n {
                counts[a.get(r, c) * n + b.get(r, c)] += 1;
            }
        }
        counts.iter().all(|&k| k == 1)
    }

    #[test]
    fn mols_counts_and_orthogonality() {
        // Order 3 → 2 squares; order 2 → 1; order 4 → 3 pairwise orthogonal.
        for (q, expect) in [(2u32, 1usize), (3, 2), (4, 3), (5, 4)] {
            let squares = mols_from_plane(&plane(q));
            assert_eq!(squares.len(), expect);
            assert_eq!(squares.len(), q as usize - 1);
            for (i, a) in squares.iter().enumerate() {
                for b in &squares[i + 1..] {
                    assert!(a.is_orthogonal_to(b));
                    assert!(orthogonal_by_pair_count(a, b));
                }
            }
        }
    }

    #[test]
    fn mols_symbols_match_algebraic_oracle() {
        // For prime q the incidence-driven construction must reproduce
        // L_m[r][c] = (r − m·c) mod q.
        for q in [3usize, 5, 7] {
            let squares = mols_from_plane(&plane(q as u32));
            for (mi, square) in squares.iter().enumerate() {
                let m = mi + 1; // striation index 2 ↔ slope 1
                for r in 0..q {
                    for c in 0..q {
                        let expected = (r + (q - m % q) * c) % q;
                        assert_eq!(square.get(r, c), expected, "q={q} m={m} r={r} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn dual_of_order_two_plane() {
        let d = dualize(plane(2).incidence());
        assert_eq!(d.n_points(), 6);
        assert_eq!(d.n_lines(), 4);
        for line in d.lines() {
            assert_eq!(line.len(), 3);
        }
        assert!(check_dual_counts(&d, 2).all_pass());
    }

    #[test]
    fn dual_of_order_three_plane() {
        let d = dualize(plane(3).incidence());
        assert_eq!(d.n_points(), 12);
        assert_eq!(d.n_lines(), 9);
        for line in d.lines() {
            assert_eq!(line.len(), 4);
        }
        // Exhaustive pair-intersection check.
        for i in 0..d.n_lines() {
            for j in i + 1..d.n_lines() {
                assert_eq!(intersection_size(d.line(i), d.line(j)), 1);
            }
        }
        assert!(check_dual_counts(&d, 3).all_pass());
    }

    #[test]
    fn plane_itself_fails_dual_counts() {
        let p = plane(3);
        let report = check_dual_counts(p.incidence(), 3);
        assert!(!report.point_count.pass); // 9 ≠ 12
        assert!(!report.all_pass());
    }

    #[test]
    fn dual_of_degenerate_structure_has_duplicate_lines() {
        // A single line on two points dualizes to two copies of a one-point line.
        let s = IncidenceStructure::new(2, vec![vec![0, 1]]).unwrap();
        let d = dualize(&s);
        assert_eq!(d.n_points(), 1);
        assert_eq!(d.lines(), &[vec![0], vec![0]]);
    }

    #[test]
    fn double_dual_is_the_identity() {
        for q in [2u32, 3, 4] {
            let s = plane(q).incidence().clone();
            assert_eq!(dualize(&dualize(&s)), s);
        }
        let degenerate = IncidenceStructure::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(dualize(&dualize(&degenerate)), degenerate);
    }

    #[test]
    fn incidence_validation() {
        assert_eq!(
            IncidenceStructure::new(2, vec![vec![0, 2]]).unwrap_err(),
            GeometryError::PointOutOfRange {
                line: 0,
                index: 2,
                n_points: 2
            }
        );
        assert_eq!(
            IncidenceStructure::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap_err(),
            GeometryError::DuplicateLine { first: 0, second: 1 }
        );
    }

    #[test]
    fn latin_square_validation() {
        assert!(LatinSquare::from_cells(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(matches!(
            LatinSquare::from_cells(vec![vec![0, 1]]),
            Err(GeometryError::InvalidLatinSquare(_))
        ));
        assert!(matches!(
            LatinSquare::from_cells(vec![vec![0, 2], vec![2, 0]]),
            Err(GeometryError::InvalidLatinSquare(_))
        ));
        assert!(matches!(
            LatinSquare::from_cells(vec![vec![0, 0], vec![1, 1]]),
            Err(GeometryError::InvalidLatinSquare(_))
        ));
        // Latin rows but a repeated column symbol.
        assert!(matches!(
            LatinSquare::from_cells(vec![vec![0, 1, 2], vec![1, 2, 0], vec![0, 1, 2]]),
            Err(GeometryError::InvalidLatinSquare(_))
        ));
    }

    #[test]
    fn mate_found_for_order_three() {
        let sq = LatinSquare::cyclic(3);
        match search_orthogonal_mate(&sq, DEFAULT_MATE_BUDGET).unwrap() {
            MateSearch::Found { mate, .. } => {
                assert!(sq.is_orthogonal_to(&mate));
                assert!(orthogonal_by_pair_count(&sq, &mate));
            }
            other => panic!("expected a mate, got {other:?}"),
        }
    }

    #[test]
    fn order_two_has_no_mate() {
        // Both order-2 Latin squares lack transversals entirely.
        let sq = LatinSquare::cyclic(2);
        assert!(matches!(
            search_orthogonal_mate(&sq, DEFAULT_MATE_BUDGET).unwrap(),
            MateSearch::ProvedNone { .. }
        ));
    }

    #[test]
    fn order_six_cyclic_has_no_mate() {
        // The Z₆ addition table has no transversal, so exhaustion is instant;
        // consistent with M(6) = 3.
        let sq = LatinSquare::cyclic(6);
        assert!(matches!(
            search_orthogonal_mate(&sq, DEFAULT_MATE_BUDGET).unwrap(),
            MateSearch::ProvedNone { .. }
        ));
    }

    #[test]
    fn tiny_budget_exhausts() {
        let sq = LatinSquare::cyclic(3);
        assert!(matches!(
            search_orthogonal_mate(&sq, 1).unwrap(),
            MateSearch::BudgetExhausted { nodes: 2 }
        ));
    }

    #[test]
    fn mate_search_is_deterministic() {
        let sq = mols_from_plane(&plane(4)).remove(0);
        let a = search_orthogonal_mate(&sq, DEFAULT_MATE_BUDGET).unwrap();
        let b = search_orthogonal_mate(&sq, DEFAULT_MATE_BUDGET).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn striation_line_indices_are_contiguous() {
        let p = plane(3);
        assert_eq!(p.striation_line_indices(0), vec![0, 1, 2]);
        assert_eq!(p.striation_line_indices(2), vec![6, 7, 8]);
        // Index blocks agree with the striation contents.
        for (si, striation) in p.striations().iter().enumerate() {
            for (k, li) in p.striation_line_indices(si).into_iter().enumerate() {
                assert_eq!(p.incidence().line(li), &striation.lines()[k][..]);
            }
        }
    }
}
