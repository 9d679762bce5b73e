//! Generation enumeration, Monte-Carlo sampling of the limiting
//! distribution, triangular histograms over the embedded simplex, min-angle
//! CDF bounds from region images, and flatness statistics.
//!
//! Incenter walks run on the subdivision matrices of [`crate::maps`]; every
//! other strategy subdivides geometrically through [`crate::geometry`]. A
//! walk that reaches a triangle too degenerate for the geometric engine is
//! frozen there: all its daughters are the triangle itself, which keeps
//! generation counts at exactly `6^n`.
//!
//! Randomness comes from a seeded ChaCha12 stream ([`GENERATOR_NAME`]);
//! parallel sampling derives worker `w`'s seed as `seed + w`. Histogram and
//! CDF accumulators merge associatively and commutatively, so worker splits
//! never change counts.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::geometry::{subdivide, CenterStrategy, DEGENERATE_ANGLE};
use crate::maps::{apply, min_angle_bounds_of, MapIndex};
use crate::simplex::AngleTriple;

/// Name of the seedable generator recorded in every output artifact.
pub const GENERATOR_NAME: &str = "chacha12";

/// Largest `n` for which `enumerate_generation` materializes all `6^n`
/// triples; `visit_generation` streams without this cap.
pub const MATERIALIZE_CAP: u32 = 9;

/// Largest `n` accepted by `cdf_bounds`; `6^8 ≈ 1.7M` region evaluations.
pub const CDF_CAP: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("generation {n} exceeds budget cap {cap} (6^n blowup)")]
    BudgetExceeded { n: u32, cap: u32 },
    #[error("start triple is degenerate")]
    DegenerateStart,
    #[error("theta grid must be nonempty, ascending, inside [0, pi/3]")]
    BadThetaGrid,
    #[error("delta {0} outside (0, pi)")]
    BadDelta(f64),
}

/// The six daughters of one subdivision step under a strategy. Incenter
/// uses the exact matrices; other strategies go through the geometric
/// engine, freezing on degeneracy.
pub fn step_daughters(strategy: CenterStrategy, t: &AngleTriple) -> [AngleTriple; 6] {
    match strategy {
        CenterStrategy::Incenter => MapIndex::all().map(|i| apply(i, t)),
        _ => subdivide(strategy, t).unwrap_or([*t; 6]),
    }
}

fn one_daughter(strategy: CenterStrategy, t: &AngleTriple, slot: usize) -> AngleTriple {
    match strategy {
        CenterStrategy::Incenter => apply(MapIndex::all()[slot], t),
        _ => subdivide(strategy, t).map(|d| d[slot]).unwrap_or(*t),
    }
}

fn check_start(start: &AngleTriple) -> Result<(), DynamicsError> {
    if start.min_angle() <= DEGENERATE_ANGLE {
        Err(DynamicsError::DegenerateStart)
    } else {
        Ok(())
    }
}

fn visit_rec<F: FnMut(&AngleTriple)>(
    strategy: CenterStrategy,
    t: &AngleTriple,
    depth: u32,
    f: &mut F,
) {
    if depth == 0 {
        f(t);
        return;
    }
    for d in step_daughters(strategy, t) {
        visit_rec(strategy, &d, depth - 1, f);
    }
}

/// Streams all `6^n` n-th generation daughters of `start` to `f`, depth
/// first. No materialization cap; the caller owns the `6^n` cost.
pub fn visit_generation<F: FnMut(&AngleTriple)>(
    start: &AngleTriple,
    strategy: CenterStrategy,
    n: u32,
    f: &mut F,
) -> Result<(), DynamicsError> {
    check_start(start)?;
    visit_rec(strategy, start, n, f);
    Ok(())
}

/// All `6^n` n-th generation daughters (with multiplicity), materialized.
pub fn enumerate_generation(
    start: &AngleTriple,
    strategy: CenterStrategy,
    n: u32,
) -> Result<Vec<AngleTriple>, DynamicsError> {
    if n > MATERIALIZE_CAP {
        return Err(DynamicsError::BudgetExceeded { n, cap: MATERIALIZE_CAP });
    }
    let mut out = Vec::with_capacity(6usize.pow(n));
    visit_generation(start, strategy, n, &mut |t| out.push(*t))?;
    Ok(out)
}

/// Streams `m` independently sampled n-th generation daughters: each sample
/// walks `n` uniform daughter choices from `start`. Deterministic in
/// `seed` (ChaCha12).
pub fn sample_each<F: FnMut(AngleTriple)>(
    start: &AngleTriple,
    strategy: CenterStrategy,
    n: u32,
    m: u64,
    seed: u64,
    mut f: F,
) -> Result<(), DynamicsError> {
    check_start(start)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..m {
        let mut cur = *start;
        for _ in 0..n {
            let slot = rng.random_range(0..6usize);
            cur = one_daughter(strategy, &cur, slot);
        }
        f(cur);
    }
    Ok(())
}

/// Materialized [`sample_each`].
pub fn sample_walks(
    start: &AngleTriple,
    strategy: CenterStrategy,
    n: u32,
    m: u64,
    seed: u64,
) -> Result<Vec<AngleTriple>, DynamicsError> {
    let mut out = Vec::with_capacity(m as usize);
    sample_each(start, strategy, n, m, seed, |t| out.push(t))?;
    Ok(out)
}

/// Parallel sampling over `workers` threads; worker `w` draws its share of
/// the `m` samples from the stream seeded `seed + w`, and outputs are
/// concatenated in worker order. `workers = 1` reproduces [`sample_walks`]
/// exactly.
pub fn sample_walks_par(
    start: &AngleTriple,
    strategy: CenterStrategy,
    n: u32,
    m: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<AngleTriple>, DynamicsError> {
    check_start(start)?;
    let workers = workers.max(1).min(m.max(1) as usize);
    let base = m / workers as u64;
    let rem = m % workers as u64;
    let mut chunks: Vec<Result<Vec<AngleTriple>, DynamicsError>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let count = base + u64::from((w as u64) < rem);
                let start = *start;
                scope.spawn(move || {
                    sample_walks(&start, strategy, n, count, seed.wrapping_add(w as u64))
                })
            })
            .collect();
        chunks = handles.into_iter().map(|h| h.join().expect("sampler thread")).collect();
    });
    let mut out = Vec::with_capacity(m as usize);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Orientation of a triangular histogram cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Upright,
    Inverted,
}

impl Orientation {
    pub fn as_u8(self) -> u8 {
        match self {
            Orientation::Upright => 0,
            Orientation::Inverted => 1,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Orientation::Upright),
            1 => Some(Orientation::Inverted),
            _ => None,
        }
    }
}

/// Address of one cell: `row` is the `α` band, `col` counts cells of the
/// given orientation within the band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellId {
    pub row: usize,
    pub col: usize,
    pub orientation: Orientation,
}

/// Triangular raster of counts over the embedded simplex: `bins_per_side²`
/// cells, `bins_per_side − row` upright plus `bins_per_side − row − 1`
/// inverted cells per row.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramGrid {
    bins_per_side: usize,
    counts: Vec<u64>,
    total: u64,
}

impl HistogramGrid {
    pub fn new(bins_per_side: usize) -> Self {
        assert!(bins_per_side >= 1, "need at least one bin per side");
        Self {
            bins_per_side,
            counts: vec![0; bins_per_side * bins_per_side],
            total: 0,
        }
    }

    /// Rebuilds a grid from raw counts (the CSV reader path). `None` when
    /// the count vector does not hold exactly `bins_per_side²` cells.
    pub fn from_counts(bins_per_side: usize, counts: Vec<u64>) -> Option<Self> {
        if bins_per_side == 0 || counts.len() != bins_per_side * bins_per_side {
            return None;
        }
        let total = counts.iter().sum();
        Some(Self { bins_per_side, counts, total })
    }

    pub fn bins_per_side(&self) -> usize {
        self.bins_per_side
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    fn row_offset(&self, row: usize) -> usize {
        row * (2 * self.bins_per_side - row)
    }

    /// Linear index of a cell; `None` for out-of-range addresses.
    pub fn cell_index(&self, id: CellId) -> Option<usize> {
        let n = self.bins_per_side;
        if id.row >= n {
            return None;
        }
        match id.orientation {
            Orientation::Upright if id.col < n - id.row => {
                Some(self.row_offset(id.row) + id.col)
            }
            Orientation::Inverted if id.col + 1 < n - id.row => {
                Some(self.row_offset(id.row) + (n - id.row) + id.col)
            }
            _ => None,
        }
    }

    /// Cell address of a linear index.
    pub fn cell_id(&self, mut idx: usize) -> CellId {
        let n = self.bins_per_side;
        assert!(idx < n * n, "cell index out of range");
        let mut row = 0;
        while idx >= 2 * (n - row) - 1 {
            idx -= 2 * (n - row) - 1;
            row += 1;
        }
        if idx < n - row {
            CellId { row, col: idx, orientation: Orientation::Upright }
        } else {
            CellId { row, col: idx - (n - row), orientation: Orientation::Inverted }
        }
    }

    /// Barycentric center of a cell as an angle triple.
    pub fn cell_center(&self, id: CellId) -> AngleTriple {
        let n = self.bins_per_side as f64;
        let (r, c) = (id.row as f64, id.col as f64);
        let coords = match id.orientation {
            Orientation::Upright => {
                let k = n - 1.0 - r - c;
                [(3.0 * r + 1.0), (3.0 * c + 1.0), (3.0 * k + 1.0)]
            }
            Orientation::Inverted => {
                let k = n - 2.0 - r - c;
                [(3.0 * r + 2.0), (3.0 * c + 2.0), (3.0 * k + 2.0)]
            }
        };
        AngleTriple::new(
            coords[0] * PI / (3.0 * n),
            coords[1] * PI / (3.0 * n),
            coords[2] * PI / (3.0 * n),
        )
        .expect("cell centers lie inside P")
    }

    /// Cell containing a sample. Samples on cell boundaries go to the
    /// containing cell with the smallest linear index; the assignment is a
    /// pure function of the sample's grid coordinates.
    pub fn cell_of(&self, t: &AngleTriple) -> usize {
        let n = self.bins_per_side;
        let nf = n as f64;
        let [a, b, g] = t.coords();
        let ua = (a * nf / PI).clamp(0.0, nf);
        let ub = (b * nf / PI).clamp(0.0, nf);
        let uc = (g * nf / PI).clamp(0.0, nf);
        let i = (ua.floor() as usize).min(n - 1);
        let j = (ub.floor() as usize).min(n - 1);
        let k = (uc.floor() as usize).min(n - 1);
        let on_boundary = ua.fract() == 0.0 || ub.fract() == 0.0 || uc.fract() == 0.0;
        if !on_boundary {
            let s = i + j + k;
            if s == n - 1 {
                if let Some(idx) = self.cell_index(CellId { row: i, col: j, orientation: Orientation::Upright }) {
                    return idx;
                }
            } else if s + 2 == n {
                if let Some(idx) = self.cell_index(CellId { row: i, col: j, orientation: Orientation::Inverted }) {
                    return idx;
                }
            }
        }
        // boundary or pathological rounding: smallest-index containing cell
        let mut best: Option<usize> = None;
        for r in i.saturating_sub(1)..=(i + 1).min(n - 1) {
            for c in j.saturating_sub(1)..=(j + 1).min(n - 1) {
                if r + c < n {
                    let kk = (n - 1 - r - c) as f64;
                    if ua >= r as f64 && ub >= c as f64 && uc >= kk {
                        let idx = self.cell_index(CellId { row: r, col: c, orientation: Orientation::Upright });
                        best = match (best, idx) {
                            (Some(x), Some(y)) => Some(x.min(y)),
                            (x, y) => x.or(y),
                        };
                    }
                }
                if r + c + 2 <= n {
                    let kk = (n - 1 - r - c) as f64;
                    if ua <= (r + 1) as f64 && ub <= (c + 1) as f64 && uc <= kk {
                        let idx = self.cell_index(CellId { row: r, col: c, orientation: Orientation::Inverted });
                        best = match (best, idx) {
                            (Some(x), Some(y)) => Some(x.min(y)),
                            (x, y) => x.or(y),
                        };
                    }
                }
            }
        }
        best.unwrap_or_else(|| {
            // conspired rounding pushed the point out of every candidate;
            // fall back to the clamped floor cell
            let row = i.min(n - 1);
            let col = j.min(n - 1 - row);
            self.cell_index(CellId { row, col, orientation: Orientation::Upright })
                .expect("clamped upright cell exists")
        })
    }

    pub fn accumulate(&mut self, t: &AngleTriple) {
        let idx = self.cell_of(t);
        self.counts[idx] += 1;
        self.total += 1;
    }

    /// Merges another grid of the same resolution into this one. Merging is
    /// associative and commutative.
    pub fn merge(&mut self, other: &HistogramGrid) {
        assert_eq!(self.bins_per_side, other.bins_per_side, "bin mismatch in merge");
        for (c, o) in self.counts.iter_mut().zip(other.counts.iter()) {
            *c += o;
        }
        self.total += other.total;
    }

    pub fn cells(&self) -> impl Iterator<Item = (CellId, u64)> + '_ {
        (0..self.counts.len()).map(move |idx| (self.cell_id(idx), self.counts[idx]))
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Cell with the largest count; ties go to the smallest index.
    pub fn modal_cell(&self) -> (CellId, u64) {
        let mut best = 0usize;
        for (idx, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = idx;
            }
        }
        (self.cell_id(best), self.counts[best])
    }
}

/// Histogram of a sample set.
pub fn histogram(samples: &[AngleTriple], bins_per_side: usize) -> HistogramGrid {
    let mut grid = HistogramGrid::new(bins_per_side);
    for t in samples {
        grid.accumulate(t);
    }
    grid
}

/// Pointwise bounds on the CDF of the min angle in the limiting
/// distribution, computed from the `6^generation` region images.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfBounds {
    pub generation: u32,
    pub thetas: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Uniform grid of `points ≥ 2` thetas on `[0, π/3]`, endpoints included.
pub fn theta_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2, "theta grid needs at least two points");
    (0..points)
        .map(|j| (j as f64 / (points - 1) as f64) * (PI / 3.0))
        .collect()
}

/// The 512-point default grid.
pub fn default_theta_grid() -> Vec<f64> {
    theta_grid(512)
}

/// Enumerates all `6^n` region images and bounds the min-angle CDF on the
/// grid: `lower(θ)` counts regions whose min angle never exceeds `θ`,
/// `upper(θ)` counts regions containing some point with min angle `≤ θ`.
/// Capped at [`CDF_CAP`]; see [`cdf_bounds_with_cap`] for deeper runs.
pub fn cdf_bounds(n: u32, thetas: &[f64]) -> Result<CdfBounds, DynamicsError> {
    cdf_bounds_with_cap(n, thetas, CDF_CAP)
}

/// [`cdf_bounds`] with an explicit budget cap. The enumeration streams with
/// a per-theta accumulator, so memory stays `O(grid)` at any depth, but
/// time is `6^n` region evaluations: `n = 11` is on the order of `3.6e8`
/// regions (hours).
pub fn cdf_bounds_with_cap(n: u32, thetas: &[f64], cap: u32) -> Result<CdfBounds, DynamicsError> {
    if n > cap {
        return Err(DynamicsError::BudgetExceeded { n, cap });
    }
    if thetas.is_empty()
        || thetas.windows(2).any(|w| w[0] > w[1])
        || thetas[0] < 0.0
        || *thetas.last().unwrap() > PI / 3.0 + 1e-12
    {
        return Err(DynamicsError::BadThetaGrid);
    }
    let mut bucket_lower = vec![0u64; thetas.len() + 1];
    let mut bucket_upper = vec![0u64; thetas.len() + 1];
    let corners = AngleTriple::corners();
    // depth-first over all products; prepending a map to the product is
    // applying it to the current vertex images
    fn rec(
        depth: u32,
        verts: &[AngleTriple; 3],
        thetas: &[f64],
        bucket_lower: &mut [u64],
        bucket_upper: &mut [u64],
    ) {
        if depth == 0 {
            let bounds = min_angle_bounds_of(verts);
            let maxmin = bounds.maxmin.clamp(0.0, PI / 3.0);
            let minmin = bounds.minmin.clamp(0.0, PI / 3.0);
            bucket_lower[thetas.partition_point(|&th| th < maxmin)] += 1;
            bucket_upper[thetas.partition_point(|&th| th < minmin)] += 1;
            return;
        }
        for i in MapIndex::all() {
            let next = [apply(i, &verts[0]), apply(i, &verts[1]), apply(i, &verts[2])];
            rec(depth - 1, &next, thetas, bucket_lower, bucket_upper);
        }
    }
    rec(n, &corners, thetas, &mut bucket_lower, &mut bucket_upper);

    let denom = 6f64.powi(n as i32);
    let prefix = |bucket: &[u64]| {
        let mut acc = 0u64;
        bucket[..thetas.len()]
            .iter()
            .map(|&b| {
                acc += b;
                acc as f64 / denom
            })
            .collect::<Vec<f64>>()
    };
    Ok(CdfBounds {
        generation: n,
        thetas: thetas.to_vec(),
        lower: prefix(&bucket_lower),
        upper: prefix(&bucket_upper),
    })
}

/// Fraction of `m` sampled n-th generation daughters whose largest angle
/// exceeds `π − delta`.
pub fn flatness_stats(
    start: &AngleTriple,
    strategy: CenterStrategy,
    n: u32,
    m: u64,
    delta: f64,
    seed: u64,
) -> Result<f64, DynamicsError> {
    if delta.is_nan() || delta <= 0.0 || delta >= PI {
        return Err(DynamicsError::BadDelta(delta));
    }
    let mut flat = 0u64;
    sample_each(start, strategy, n, m, seed, |t| {
        if t.max_angle() > PI - delta {
            flat += 1;
        }
    })?;
    Ok(flat as f64 / m as f64)
}
