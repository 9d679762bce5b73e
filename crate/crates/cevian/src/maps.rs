//! The six linear subdivision maps `M1..M6` of incenter (angle-bisector)
//! subdivision, acting on the angle simplex `P`.
//!
//! Each map sends the angle triple of a parent triangle to the angle triple
//! of one of its six daughters. The matrices have entries in `{0, 1/2, 1}`
//! and unit column sums, so they preserve the hyperplane `α + β + γ = π`
//! and map `P` into itself. Their union covers `P`, which yields a preimage
//! step for any point, and every map contracts ambient distances by at
//! least `√3/2`, which together drive the density construction in
//! [`crate::density`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::simplex::AngleTriple;

/// Number of subdivision maps.
pub const MAP_COUNT: usize = 6;

/// Contraction bound `√3/2` shared by all six maps.
pub fn contraction_ratio() -> f64 {
    3f64.sqrt() / 2.0
}

/// The matrices, row major, exactly as compiled-in constants.
const MATRICES: [[[f64; 3]; 3]; MAP_COUNT] = [
    [[0.5, 0.0, 0.0], [0.5, 0.5, 0.0], [0.0, 0.5, 1.0]],
    [[0.5, 0.5, 0.0], [0.0, 0.5, 0.0], [0.5, 0.0, 1.0]],
    [[1.0, 0.0, 0.5], [0.0, 0.5, 0.0], [0.0, 0.5, 0.5]],
    [[1.0, 0.5, 0.0], [0.0, 0.5, 0.5], [0.0, 0.0, 0.5]],
    [[0.5, 0.0, 0.5], [0.5, 1.0, 0.0], [0.0, 0.0, 0.5]],
    [[0.5, 0.0, 0.0], [0.0, 1.0, 0.5], [0.5, 0.0, 0.5]],
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("map index {0} out of range 1..=6")]
    IndexOutOfRange(usize),
    #[error("cannot parse map word from {text:?}")]
    Parse { text: String },
}

/// Index of one subdivision map, `1..=6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MapIndex(u8);

impl MapIndex {
    pub fn new(i: usize) -> Result<Self, MapError> {
        if (1..=MAP_COUNT).contains(&i) {
            Ok(Self(i as u8))
        } else {
            Err(MapError::IndexOutOfRange(i))
        }
    }

    /// All six indices in order.
    pub fn all() -> [Self; MAP_COUNT] {
        [Self(1), Self(2), Self(3), Self(4), Self(5), Self(6)]
    }

    /// One-based index as printed.
    pub fn get(&self) -> usize {
        self.0 as usize
    }

    fn slot(&self) -> usize {
        self.0 as usize - 1
    }

    /// The matrix of this map, row major.
    pub fn matrix(&self) -> &'static [[f64; 3]; 3] {
        &MATRICES[self.slot()]
    }

    /// The exact inverse matrix. Entries are small integers: the inverse of
    /// each map equals the adjugate of its doubled (integer) matrix, because
    /// `det(2·Mi) = 2`.
    pub fn inverse_matrix(&self) -> &'static [[f64; 3]; 3] {
        &inverse_matrices()[self.slot()]
    }
}

impl fmt::Display for MapIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite composition of subdivision maps, applied right to left: the
/// word `[i1, i2, ..., ik]` acts as the product `M_{i1}·M_{i2}···M_{ik}`,
/// so the leftmost index is the outermost (last-applied) map.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct MapWord(Vec<MapIndex>);

impl MapWord {
    pub fn new(indices: Vec<MapIndex>) -> Self {
        Self(indices)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[MapIndex] {
        &self.0
    }

    pub fn push(&mut self, i: MapIndex) {
        self.0.push(i);
    }

    /// The word of the first `len` (outermost) indices.
    pub fn prefix(&self, len: usize) -> Self {
        Self(self.0[..len].to_vec())
    }
}

impl fmt::Display for MapWord {
    /// Text form: digits concatenated, e.g. `123` for `M1·M2·M3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.0 {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl FromStr for MapWord {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .ok_or_else(|| MapError::Parse { text: s.to_owned() })
                    .and_then(|d| {
                        MapIndex::new(d as usize).map_err(|_| MapError::Parse { text: s.to_owned() })
                    })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(MapWord)
    }
}

impl Serialize for MapWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MapWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Applies one subdivision map: `Mi · t`.
pub fn apply(i: MapIndex, t: &AngleTriple) -> AngleTriple {
    mat_apply(i.matrix(), t)
}

fn mat_apply(m: &[[f64; 3]; 3], t: &AngleTriple) -> AngleTriple {
    let [a, b, g] = t.coords();
    AngleTriple::new_unchecked(
        m[0][0] * a + m[0][1] * b + m[0][2] * g,
        m[1][0] * a + m[1][1] * b + m[1][2] * g,
        m[2][0] * a + m[2][1] * b + m[2][2] * g,
    )
}

/// Applies a word with the rightmost index first; the empty word is the
/// identity.
pub fn apply_word(w: &MapWord, t: &AngleTriple) -> AngleTriple {
    w.indices().iter().rev().fold(*t, |acc, &i| apply(i, &acc))
}

fn inverse_matrices() -> &'static [[[f64; 3]; 3]; MAP_COUNT] {
    static INVERSES: OnceLock<[[[f64; 3]; 3]; MAP_COUNT]> = OnceLock::new();
    INVERSES.get_or_init(|| {
        let mut out = [[[0.0; 3]; 3]; MAP_COUNT];
        for (slot, m) in MATRICES.iter().enumerate() {
            // inverse(M) = adj(2M): entries of 2M are integers 0,1,2 and
            // det(2M) = 2, so every inverse entry is an exact integer.
            let d = |r: usize, c: usize| 2.0 * m[r][c];
            let cof = |r0: usize, c0: usize, r1: usize, c1: usize| d(r0, c0) * d(r1, c1) - d(r0, c1) * d(r1, c0);
            out[slot] = [
                [cof(1, 1, 2, 2), -cof(0, 1, 2, 2), cof(0, 1, 1, 2)],
                [-cof(1, 0, 2, 2), cof(0, 0, 2, 2), -cof(0, 0, 1, 2)],
                [cof(1, 0, 2, 1), -cof(0, 0, 2, 1), cof(0, 0, 1, 1)],
            ];
        }
        out
    })
}

/// Applies the exact inverse of one map. The result need not lie in `P`.
fn apply_inverse_raw(i: MapIndex, t: &AngleTriple) -> [f64; 3] {
    let m = i.inverse_matrix();
    let [a, b, g] = t.coords();
    [
        m[0][0] * a + m[0][1] * b + m[0][2] * g,
        m[1][0] * a + m[1][1] * b + m[1][2] * g,
        m[2][0] * a + m[2][1] * b + m[2][2] * g,
    ]
}

/// The six strict coordinate orderings, as permutations listing coordinate
/// positions from smallest to largest, in lexicographic order.
const ORDERINGS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// For each ordering in [`ORDERINGS`], the unique map whose inverse carries
/// that whole sextant of `P` into `P`. Built by brute force: the sextant is
/// the triangle spanned by a corner, an edge midpoint and the center, and a
/// linear map keeps it in `P` iff it keeps those three points in `P`.
fn ordering_table() -> &'static [MapIndex; 6] {
    static TABLE: OnceLock<[MapIndex; 6]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let in_p = |v: &[f64; 3]| v.iter().all(|&x| x >= -1e-12);
        let mut table = [MapIndex(1); 6];
        for (oi, ord) in ORDERINGS.iter().enumerate() {
            // sextant corners: largest coordinate at ord[2]
            let mut corner = [0.0; 3];
            corner[ord[2]] = PI;
            let mut mid = [0.0; 3];
            mid[ord[1]] = PI / 2.0;
            mid[ord[2]] = PI / 2.0;
            let center = [PI / 3.0; 3];
            let sextant = [corner, mid, center].map(|c| AngleTriple::new(c[0], c[1], c[2]).unwrap());
            let hits: Vec<MapIndex> = MapIndex::all()
                .into_iter()
                .filter(|&i| sextant.iter().all(|p| in_p(&apply_inverse_raw(i, p))))
                .collect();
            assert_eq!(
                hits.len(),
                1,
                "ordering {ord:?} must be covered by exactly one map, got {hits:?}"
            );
            table[oi] = hits[0];
        }
        table
    })
}

/// The lexicographically smallest ordering compatible with the weak sort of
/// `t`; ties between equal coordinates resolve toward the earlier position.
fn sort_ordering(t: &AngleTriple) -> usize {
    let c = t.coords();
    ORDERINGS
        .iter()
        .position(|ord| c[ord[0]] <= c[ord[1]] && c[ord[1]] <= c[ord[2]])
        .expect("some ordering always sorts the coordinates")
}

/// One preimage step: returns `(i, t')` with `t' ∈ P` and `apply(i, t') = t`
/// up to rounding. For `α ≤ β ≤ γ` this is the closed form
/// `(M1)⁻¹ t = (2α, 2β−2α, α−β+γ)`; other orderings route through the
/// ordering table. Deterministic, including on ties.
pub fn preimage_step(t: &AngleTriple) -> (MapIndex, AngleTriple) {
    let i = ordering_table()[sort_ordering(t)];
    let p = apply_inverse_raw(i, t);
    let pre = AngleTriple::new(p[0], p[1], p[2])
        .expect("inverse of the ordering-matched map stays in P");
    (i, pre)
}

/// The `k`-step preimage word of `t`: a word `w = [i1, ..., ik]` together
/// with the `k`-fold preimage `t_k` such that `apply_word(w, t_k) = t`.
pub fn preimage_chain(t: &AngleTriple, k: usize) -> (MapWord, AngleTriple) {
    let mut word = MapWord::empty();
    let mut cur = *t;
    for _ in 0..k {
        let (i, pre) = preimage_step(&cur);
        word.push(i);
        cur = pre;
    }
    (word, cur)
}

/// The word part of [`preimage_chain`].
pub fn preimage_word(t: &AngleTriple, k: usize) -> MapWord {
    preimage_chain(t, k).0
}

/// The affine image of `P` under a word, stored as the images of the three
/// corners of `P`. Because the maps are linear and sum preserving, the
/// region is exactly the convex hull of these vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionImage {
    pub word: MapWord,
    #[serde(with = "triple_array_serde")]
    pub vertices: [AngleTriple; 3],
}

mod triple_array_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[AngleTriple; 3], s: S) -> Result<S::Ok, S::Error> {
        let raw: [[f64; 3]; 3] = [v[0].coords(), v[1].coords(), v[2].coords()];
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[AngleTriple; 3], D::Error> {
        let raw = <[[f64; 3]; 3]>::deserialize(d)?;
        let mut out = [AngleTriple::equilateral(); 3];
        for (slot, c) in raw.iter().enumerate() {
            out[slot] = AngleTriple::new(c[0], c[1], c[2]).map_err(D::Error::custom)?;
        }
        Ok(out)
    }
}

/// Computes the region image of a word: the three corners of `P` pushed
/// through the word.
pub fn region_image(w: &MapWord) -> RegionImage {
    let vertices = AngleTriple::corners().map(|c| apply_word(w, &c));
    RegionImage { word: w.clone(), vertices }
}

/// Range of the min-angle function over a region image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinAngleBounds {
    /// Minimum over the region of `min(α, β, γ)`; attained at a vertex.
    pub minmin: f64,
    /// Maximum over the region of `min(α, β, γ)`.
    pub maxmin: f64,
    /// The three vertices are collinear within `1e−12` (embedded signed
    /// area); the bounds then cover the degenerate segment.
    pub degenerate: bool,
}

/// Exact range of `min(α, β, γ)` over the convex hull of three vertices.
///
/// The min of linear functions is concave: its minimum over a polytope sits
/// at a vertex, and its maximum is attained either at a vertex, on an edge
/// where two coordinates tie, or at the interior point `α = β = γ` when the
/// region contains it. Enumerating those candidates is exhaustive.
pub fn min_angle_bounds_of(vertices: &[AngleTriple; 3]) -> MinAngleBounds {
    let verts: [[f64; 3]; 3] = [vertices[0].coords(), vertices[1].coords(), vertices[2].coords()];
    let minmin = vertices.iter().map(|v| v.min_angle()).fold(f64::INFINITY, f64::min);
    let mut maxmin = vertices.iter().map(|v| v.min_angle()).fold(f64::NEG_INFINITY, f64::max);

    // edge candidates: loci where a pair of coordinates is equal
    for (e0, e1) in [(0usize, 1usize), (1, 2), (0, 2)] {
        let u = verts[e0];
        let w = verts[e1];
        for (a, b) in [(0usize, 1usize), (1, 2), (0, 2)] {
            let du = u[a] - u[b];
            let dw = w[a] - w[b];
            let denom = du - dw;
            if denom.abs() < 1e-300 {
                continue;
            }
            let s = du / denom;
            if (0.0..=1.0).contains(&s) {
                let p = [
                    (1.0 - s) * u[0] + s * w[0],
                    (1.0 - s) * u[1] + s * w[1],
                    (1.0 - s) * u[2] + s * w[2],
                ];
                maxmin = maxmin.max(p[0].min(p[1]).min(p[2]));
            }
        }
    }

    // interior candidate: the equilateral point, the global max of min(·)
    let (bary, degenerate) = barycentric_in_plane(&verts, &[PI / 3.0; 3]);
    if !degenerate && bary.iter().all(|&l| l >= -1e-12) {
        maxmin = maxmin.max(PI / 3.0);
    }

    MinAngleBounds { minmin, maxmin, degenerate }
}

/// Bounds of the min-angle function over a region image. Collinear vertex
/// sets are flagged, not rejected: the returned bounds then describe the
/// degenerate segment.
pub fn region_min_angle_bounds(r: &RegionImage) -> MinAngleBounds {
    min_angle_bounds_of(&r.vertices)
}

/// Barycentric coordinates of `p` relative to the triangle `verts`, computed
/// in the embedded plane. Second return is the degeneracy flag (signed area
/// within `1e−12`).
pub fn barycentric_in_plane(verts: &[[f64; 3]; 3], p: &[f64; 3]) -> ([f64; 3], bool) {
    let embed = |c: &[f64; 3]| [(c[0] + 2.0 * c[1]) / 3f64.sqrt(), c[0]];
    let [a, b, c] = [embed(&verts[0]), embed(&verts[1]), embed(&verts[2])];
    let q = embed(p);
    let cross = |o: &[f64; 2], u: &[f64; 2], v: &[f64; 2]| {
        (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])
    };
    let area = cross(&a, &b, &c);
    if area.abs() <= 1e-12 {
        return ([f64::NAN; 3], true);
    }
    let l0 = cross(&q, &b, &c) / area;
    let l1 = cross(&a, &q, &c) / area;
    let l2 = cross(&a, &b, &q) / area;
    ([l0, l1, l2], false)
}

/// Observed contraction ratio `‖Mi t − Mi s‖ / ‖t − s‖`; always in
/// `(0, √3/2]`. Requires `t ≠ s`.
pub fn contraction_check(i: MapIndex, t: &AngleTriple, s: &AngleTriple) -> f64 {
    let d = t.distance(s);
    debug_assert!(d > 0.0, "contraction_check requires distinct points");
    apply(i, t).distance(&apply(i, s)) / d
}

/// Indices of the maps whose daughter of `t` is similar to `t` within `tol`.
pub fn self_similar_indices(t: &AngleTriple, tol: f64) -> Vec<MapIndex> {
    MapIndex::all()
        .into_iter()
        .filter(|&i| apply(i, t).similar(t, tol))
        .collect()
}

/// A coordinate permutation `σ`: `(σ·v)[p] = v[perm[p]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Permutation(pub [usize; 3]);

impl Permutation {
    pub fn all() -> [Self; 6] {
        [
            Self([0, 1, 2]),
            Self([0, 2, 1]),
            Self([1, 0, 2]),
            Self([1, 2, 0]),
            Self([2, 0, 1]),
            Self([2, 1, 0]),
        ]
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        [v[self.0[0]], v[self.0[1]], v[self.0[2]]]
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// An interior triple fixed by `σ ∘ Mi`, i.e. a triangle one of whose
/// daughters is similar to it, with the witnessing pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarSolution {
    pub index: MapIndex,
    pub permutation: Permutation,
    pub triple: AngleTriple,
}

/// Solves all 36 systems `(σ ∘ Mi − I) t = 0` with `α + β + γ = π` and
/// `α, β, γ > 0`, one candidate per rank-deficient direction. Solutions are
/// kept at residual `1e−10`; every witnessing pair is reported (the same
/// similarity class may recur under several pairs).
pub fn solve_all_self_similar() -> Vec<SelfSimilarSolution> {
    let mut out = Vec::new();
    for i in MapIndex::all() {
        let m = i.matrix();
        for sigma in Permutation::all() {
            // rows of σ·Mi are the σ-selected rows of Mi
            let mut n = [[0.0; 3]; 3];
            for r in 0..3 {
                for c in 0..3 {
                    n[r][c] = m[sigma.0[r]][c];
                }
                n[r][r] -= 1.0;
            }
            for cand in null_space_candidates(&n) {
                let sum: f64 = cand.iter().sum();
                if sum.abs() < 1e-10 {
                    continue;
                }
                let t = [PI * cand[0] / sum, PI * cand[1] / sum, PI * cand[2] / sum];
                if t.iter().any(|&x| x <= 1e-9) {
                    continue;
                }
                let residual: f64 = (0..3)
                    .map(|r| {
                        let row: f64 = (0..3).map(|c| n[r][c] * t[c]).sum();
                        row * row
                    })
                    .sum::<f64>()
                    .sqrt();
                if residual > 1e-10 * PI {
                    continue;
                }
                out.push(SelfSimilarSolution {
                    index: i,
                    permutation: sigma,
                    triple: AngleTriple::new(t[0], t[1], t[2]).expect("solved on the simplex"),
                });
            }
        }
    }
    out
}

/// Distinct similarity classes among solutions, deduplicated by sorted
/// triple at `1e−8` and returned sorted ascending.
pub fn similarity_classes(solutions: &[SelfSimilarSolution]) -> Vec<[f64; 3]> {
    let mut classes: Vec<[f64; 3]> = Vec::new();
    for s in solutions {
        let key = s.triple.sorted_coords();
        if !classes
            .iter()
            .any(|c| c.iter().zip(key.iter()).all(|(a, b)| (a - b).abs() <= 1e-8))
        {
            classes.push(key);
        }
    }
    classes.sort_by(|a, b| a[0].total_cmp(&b[0]));
    classes
}

/// Null-space candidate directions of a 3×3 matrix via Gaussian elimination
/// with partial pivoting; pivots below `1e−10` count as zero. A nullity-2
/// system meets the sum hyperplane in a line; the midpoint of its positive
/// segment is emitted as the representative (no such system arises among
/// the 36 solved here).
fn null_space_candidates(n: &[[f64; 3]; 3]) -> Vec<[f64; 3]> {
    let mut a = *n;
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..3 {
        let (best, best_val) = (row..3)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap_or((row, 0.0));
        if best_val <= 1e-10 {
            continue;
        }
        a.swap(row, best);
        let pivot_row = a[row];
        for (r, target) in a.iter_mut().enumerate() {
            if r != row {
                let f = target[col] / pivot_row[col];
                for (t, p) in target.iter_mut().zip(pivot_row.iter()) {
                    *t -= f * p;
                }
            }
        }
        pivot_cols.push((row, col));
        row += 1;
        if row == 3 {
            break;
        }
    }
    let free_cols: Vec<usize> = (0..3).filter(|c| !pivot_cols.iter().any(|&(_, pc)| pc == *c)).collect();
    let mut basis = Vec::new();
    for &fc in &free_cols {
        let mut v = [0.0; 3];
        v[fc] = 1.0;
        for &(pr, pc) in &pivot_cols {
            v[pc] = -a[pr][fc] / a[pr][pc];
        }
        basis.push(v);
    }
    match basis.len() {
        0 | 1 => basis,
        _ => {
            // intersect span(basis) with the sum-π hyperplane: a line
            let s0: f64 = basis[0].iter().sum();
            let s1: f64 = basis[1].iter().sum();
            let point = if s0.abs() >= s1.abs() { basis[0] } else { basis[1] };
            let psum: f64 = point.iter().sum();
            if psum.abs() < 1e-10 {
                return vec![];
            }
            let dir: [f64; 3] = std::array::from_fn(|k| s1 * basis[0][k] - s0 * basis[1][k]);
            // clip {point/psum + s·dir > 0} to its positive segment
            let base: [f64; 3] = std::array::from_fn(|k| point[k] / psum);
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for k in 0..3 {
                if dir[k].abs() < 1e-14 {
                    if base[k] <= 0.0 {
                        return vec![];
                    }
                } else {
                    let bound = -base[k] / dir[k];
                    if dir[k] > 0.0 {
                        lo = lo.max(bound);
                    } else {
                        hi = hi.min(bound);
                    }
                }
            }
            if lo >= hi {
                return vec![];
            }
            let mid = 0.5 * (lo.max(-1e6) + hi.min(1e6));
            vec![std::array::from_fn(|k| base[k] + mid * dir[k])]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(a: f64, b: f64, g: f64) -> AngleTriple {
        AngleTriple::new(a, b, g).unwrap()
    }

    #[test]
    fn matrices_have_unit_column_sums() {
        for i in MapIndex::all() {
            let m = i.matrix();
            for col in 0..3 {
                let s: f64 = m.iter().map(|row| row[col]).sum();
                assert_eq!(s, 1.0, "column {col} of M{i}");
            }
        }
    }

    #[test]
    fn inverses_are_exact() {
        for i in MapIndex::all() {
            let m = i.matrix();
            let inv = i.inverse_matrix();
            for (r, inv_row) in inv.iter().enumerate() {
                for c in 0..3 {
                    let e: f64 = (0..3).map(|k| inv_row[k] * m[k][c]).sum();
                    let expect = if r == c { 1.0 } else { 0.0 };
                    assert_eq!(e, expect, "inv(M{i})·M{i} at ({r},{c})");
                    assert_eq!(inv_row[c], inv_row[c].round(), "integer entries");
                }
            }
        }
    }

    #[test]
    fn apply_matches_printed_matrix_arithmetic() {
        let e = AngleTriple::equilateral();
        let d = apply(MapIndex::new(1).unwrap(), &e);
        assert!(d.distance(&triple(PI / 6.0, PI / 3.0, PI / 2.0)) < 1e-15);

        // sorted-fixed daughter of the golden triangle
        let golden = triple(PI / 5.0, 2.0 * PI / 5.0, 2.0 * PI / 5.0);
        let d3 = apply(MapIndex::new(3).unwrap(), &golden);
        assert!(d3.distance(&triple(2.0 * PI / 5.0, PI / 5.0, 2.0 * PI / 5.0)) < 1e-15);
        assert!(d3.similar(&golden, 1e-12));

        let d1 = apply(MapIndex::new(1).unwrap(), &triple(PI / 2.0, 0.0, PI / 2.0));
        assert!(d1.distance(&triple(PI / 4.0, PI / 4.0, PI / 2.0)) < 1e-15);
    }

    #[test]
    fn word_application_folds_right_to_left() {
        let w: MapWord = "123".parse().unwrap();
        let [c1, c2, c3] = AngleTriple::corners();
        assert!(apply_word(&w, &c1).distance(&triple(PI / 4.0, PI / 4.0, PI / 2.0)) < 1e-15);
        assert!(apply_word(&w, &c2).distance(&triple(PI / 8.0, PI / 4.0, 5.0 * PI / 8.0)) < 1e-15);
        assert!(apply_word(&w, &c3).distance(&triple(PI / 8.0, PI / 8.0, 3.0 * PI / 4.0)) < 1e-15);

        let t = triple(0.3, 1.3, PI - 1.6);
        assert_eq!(apply_word(&MapWord::empty(), &t), t);

        // fold associativity: w = [head] ++ rest
        let head = w.indices()[0];
        let rest = MapWord::new(w.indices()[1..].to_vec());
        let lhs = apply_word(&w, &t);
        let rhs = apply(head, &apply_word(&rest, &t));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn word_text_round_trips() {
        let w: MapWord = "615243".parse().unwrap();
        assert_eq!(w.to_string(), "615243");
        assert_eq!(w.len(), 6);
        assert!("107".parse::<MapWord>().is_err());
        assert_eq!("".parse::<MapWord>().unwrap(), MapWord::empty());
    }

    #[test]
    fn ordering_table_is_unique_and_starts_at_m1() {
        let table = ordering_table();
        assert_eq!(table[0].get(), 1, "sorted ordering is the closed-form M1 case");
        let mut seen: Vec<usize> = table.iter().map(|i| i.get()).collect();
        seen.sort_unstable();
        assert_eq!(seen, vec![1, 2, 3, 4, 5, 6], "each map handles exactly one ordering");
    }

    #[test]
    fn preimage_step_examples() {
        let (i, p) = preimage_step(&triple(PI / 4.0, PI / 4.0, PI / 2.0));
        assert_eq!(i.get(), 1);
        assert!(p.distance(&triple(PI / 2.0, 0.0, PI / 2.0)) < 1e-15);

        let (i, p) = preimage_step(&triple(PI / 6.0, PI / 3.0, PI / 2.0));
        assert_eq!(i.get(), 1);
        assert!(p.distance(&AngleTriple::equilateral()) < 1e-15);

        let (i, p) = preimage_step(&AngleTriple::equilateral());
        assert_eq!(i.get(), 1);
        assert!(p.distance(&triple(2.0 * PI / 3.0, 0.0, PI / 3.0)) < 1e-15);
        assert!(p.is_degenerate());
    }

    #[test]
    fn preimage_chain_reconstructs_the_point() {
        let t = triple(PI / 4.0, PI / 4.0, PI / 2.0);
        let (w, tk) = preimage_chain(&t, 2);
        assert_eq!(w.to_string(), "12");
        assert!(tk.distance(&triple(PI, 0.0, 0.0)) < 1e-15);
        assert!(apply_word(&w, &tk).distance(&t) < 1e-12);
        assert_eq!(preimage_word(&t, 0), MapWord::empty());
    }

    #[test]
    fn region_image_examples() {
        let r = region_image(&"123".parse().unwrap());
        assert!(r.vertices[0].distance(&triple(PI / 4.0, PI / 4.0, PI / 2.0)) < 1e-15);
        assert!(r.vertices[1].distance(&triple(PI / 8.0, PI / 4.0, 5.0 * PI / 8.0)) < 1e-15);
        assert!(r.vertices[2].distance(&triple(PI / 8.0, PI / 8.0, 3.0 * PI / 4.0)) < 1e-15);

        let empty = region_image(&MapWord::empty());
        for (v, c) in empty.vertices.iter().zip(AngleTriple::corners().iter()) {
            assert_eq!(v, c);
        }

        // images of the corners under M1 are its columns scaled by π
        let r1 = region_image(&"1".parse().unwrap());
        assert!(r1.vertices[0].distance(&triple(PI / 2.0, PI / 2.0, 0.0)) < 1e-15);
        assert!(r1.vertices[1].distance(&triple(0.0, PI / 2.0, PI / 2.0)) < 1e-15);
        assert!(r1.vertices[2].distance(&triple(0.0, 0.0, PI)) < 1e-15);
    }

    #[test]
    fn region_json_matches_the_declared_shape() {
        let r = region_image(&"123".parse().unwrap());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with("{\"word\":\"123\",\"vertices\":[["));
        let back: RegionImage = serde_json::from_str(&json).unwrap();
        assert_eq!(back.word, r.word);
        for (a, b) in back.vertices.iter().zip(r.vertices.iter()) {
            assert!(a.distance(b) < 1e-15);
        }
    }

    #[test]
    fn min_angle_bounds_examples() {
        let b = region_min_angle_bounds(&region_image(&"123".parse().unwrap()));
        assert!(!b.degenerate);
        assert!((b.minmin - PI / 8.0).abs() < 1e-12);
        assert!(b.maxmin >= PI / 4.0 - 1e-12);
        assert!(b.maxmin <= PI / 3.0 + 1e-12);

        let whole = region_min_angle_bounds(&region_image(&MapWord::empty()));
        assert_eq!(whole.minmin, 0.0);
        assert!((whole.maxmin - PI / 3.0).abs() < 1e-12);

        // collinear vertex set: still bounded, flagged; this segment passes
        // through the equilateral point at parameter 2/3
        let seg = min_angle_bounds_of(&[
            triple(PI, 0.0, 0.0),
            triple(PI / 2.0, PI / 4.0, PI / 4.0),
            triple(0.0, PI / 2.0, PI / 2.0),
        ]);
        assert!(seg.degenerate);
        assert_eq!(seg.minmin, 0.0);
        assert!((seg.maxmin - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn contraction_examples() {
        let t = triple(PI, 0.0, 0.0);
        let s = triple(0.0, PI, 0.0);
        let r = contraction_check(MapIndex::new(1).unwrap(), &t, &s);
        assert!((r - 0.5).abs() < 1e-12);

        // β difference zero attains the bound exactly
        let t = triple(PI, 0.0, 0.0);
        let s = triple(0.0, 0.0, PI);
        let r = contraction_check(MapIndex::new(1).unwrap(), &t, &s);
        assert!((r - contraction_ratio()).abs() < 1e-12);
    }

    #[test]
    fn self_similar_indices_examples() {
        let golden = triple(PI / 5.0, 2.0 * PI / 5.0, 2.0 * PI / 5.0);
        let hits: Vec<usize> = self_similar_indices(&golden, 1e-9).iter().map(|i| i.get()).collect();
        assert_eq!(hits, vec![3, 4]);

        let other = triple(2.0 * PI / 9.0, 3.0 * PI / 9.0, 4.0 * PI / 9.0);
        let hits: Vec<usize> = self_similar_indices(&other, 1e-9).iter().map(|i| i.get()).collect();
        assert_eq!(hits, vec![5]);

        assert!(self_similar_indices(&AngleTriple::equilateral(), 1e-9).is_empty());
    }

    #[test]
    fn solver_finds_exactly_two_interior_classes() {
        let solutions = solve_all_self_similar();
        let classes = similarity_classes(&solutions);
        assert_eq!(classes.len(), 2);
        let golden = [PI / 5.0, 2.0 * PI / 5.0, 2.0 * PI / 5.0];
        let other = [2.0 * PI / 9.0, PI / 3.0, 4.0 * PI / 9.0];
        for (got, want) in classes[0].iter().zip(golden.iter()) {
            assert!((got - want).abs() < 1e-9);
        }
        for (got, want) in classes[1].iter().zip(other.iter()) {
            assert!((got - want).abs() < 1e-9);
        }

        // the printed witnessing pair: M3 with the swap of the first two
        // coordinates fixes the golden triple itself
        assert!(solutions.iter().any(|s| {
            s.index.get() == 3
                && s.permutation == Permutation([1, 0, 2])
                && s.triple.distance(&triple(golden[0], golden[1], golden[2])) < 1e-9
        }));
        // no solution is equilateral
        assert!(solutions
            .iter()
            .all(|s| !s.triple.similar(&AngleTriple::equilateral(), 1e-6)));
    }
}
