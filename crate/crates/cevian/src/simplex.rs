//! The angle simplex `P`: triangles represented as points `(α, β, γ)` with
//! `α, β, γ ≥ 0` and `α + β + γ = π`.
//!
//! Every similarity class of triangles appears as up to six permuted points
//! of `P`. Degenerate triangles (a zero coordinate) live on the boundary and
//! are representable; constructors flag them, and the coordinate-geometry
//! engine is the only consumer that rejects them.
//!
//! The canonical metric of this crate is the ambient 3-D Euclidean norm.
//! The 2-D embedding [`AngleTriple::embed_2d`] is used only for plotting and
//! histogram binning; it scales all ambient distances by the constant factor
//! `√(2/3)` (see [`EMBED_SCALE`]).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Tolerance for the `α + β + γ = π` constraint, in radians.
///
/// Generous against float drift accumulated over ~50 chained map
/// applications, and far below any geometric feature of interest.
pub const TOL_SUM: f64 = 1e-9;

/// Ratio between embedded 2-D distances and ambient 3-D distances:
/// `‖embed(t) − embed(s)‖ = EMBED_SCALE · ‖t − s‖` for all `t, s` in `P`.
pub const EMBED_SCALE: f64 = 0.816_496_580_927_726; // sqrt(2/3)

/// Ambient 3-D diameter of `P`: the corner-to-corner distance `π√2`.
pub fn simplex_diameter() -> f64 {
    PI * std::f64::consts::SQRT_2
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TripleError {
    /// `|α + β + γ − π|` exceeded [`TOL_SUM`].
    #[error("angle sum {sum} is not pi (tolerance {TOL_SUM})")]
    SumViolation { sum: f64 },
    /// A coordinate was below `−TOL_SUM`. Values in `[−TOL_SUM, 0]` are
    /// clamped to zero instead.
    #[error("negative angle {value}")]
    NegativeAngle { value: f64 },
    #[error("cannot parse angle triple from {text:?}")]
    Parse { text: String },
}

/// A point of the angle simplex `P`.
///
/// Coordinates are radians. Construction validates the simplex constraints
/// but never re-normalizes; the only mutation is the documented clamp of
/// coordinates in `[−TOL_SUM, 0]` to exactly `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleTriple {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

/// A point of the 2-D embedding plane used for plotting and binning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint2D {
    pub u: f64,
    pub v: f64,
}

impl PlanePoint2D {
    pub fn distance(&self, other: &PlanePoint2D) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }
}

impl AngleTriple {
    /// Validates and constructs a triple. Coordinates in `[−TOL_SUM, 0]`
    /// are clamped to `0`; anything lower is a [`TripleError::NegativeAngle`].
    /// The sum check uses the raw inputs.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, TripleError> {
        for v in [alpha, beta, gamma] {
            if v.is_nan() || v < -TOL_SUM {
                return Err(TripleError::NegativeAngle { value: v });
            }
        }
        let sum = alpha + beta + gamma;
        let drift = (sum - PI).abs();
        if drift.is_nan() || drift > TOL_SUM {
            return Err(TripleError::SumViolation { sum });
        }
        Ok(Self {
            alpha: alpha.max(0.0),
            beta: beta.max(0.0),
            gamma: gamma.max(0.0),
        })
    }

    /// Construction for values already known to satisfy the simplex
    /// constraints (outputs of the subdivision maps, which have unit column
    /// sums and nonnegative entries).
    pub(crate) fn new_unchecked(alpha: f64, beta: f64, gamma: f64) -> Self {
        debug_assert!(alpha >= -TOL_SUM && beta >= -TOL_SUM && gamma >= -TOL_SUM);
        debug_assert!((alpha + beta + gamma - PI).abs() <= TOL_SUM);
        Self {
            alpha: alpha.max(0.0),
            beta: beta.max(0.0),
            gamma: gamma.max(0.0),
        }
    }

    /// The equilateral point `(π/3, π/3, π/3)`.
    pub fn equilateral() -> Self {
        Self {
            alpha: PI / 3.0,
            beta: PI / 3.0,
            gamma: PI / 3.0,
        }
    }

    /// The three corners of `P`: `(π,0,0)`, `(0,π,0)`, `(0,0,π)`.
    pub fn corners() -> [Self; 3] {
        [
            Self { alpha: PI, beta: 0.0, gamma: 0.0 },
            Self { alpha: 0.0, beta: PI, gamma: 0.0 },
            Self { alpha: 0.0, beta: 0.0, gamma: PI },
        ]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    /// True when some coordinate is zero (a point of `∂P`).
    pub fn is_degenerate(&self) -> bool {
        self.alpha == 0.0 || self.beta == 0.0 || self.gamma == 0.0
    }

    pub fn min_angle(&self) -> f64 {
        self.alpha.min(self.beta).min(self.gamma)
    }

    pub fn max_angle(&self) -> f64 {
        self.alpha.max(self.beta).max(self.gamma)
    }

    /// Coordinates sorted ascending; the canonical similarity-class key.
    pub fn sorted_coords(&self) -> [f64; 3] {
        let mut c = self.coords();
        c.sort_by(f64::total_cmp);
        c
    }

    /// Euclidean distance in the ambient 3-space.
    pub fn distance(&self, other: &AngleTriple) -> f64 {
        let da = self.alpha - other.alpha;
        let db = self.beta - other.beta;
        let dg = self.gamma - other.gamma;
        (da * da + db * db + dg * dg).sqrt()
    }

    /// Isometric-up-to-scale planar coordinates `((α + 2β)/√3, α)`.
    pub fn embed_2d(&self) -> PlanePoint2D {
        PlanePoint2D {
            u: (self.alpha + 2.0 * self.beta) / 3f64.sqrt(),
            v: self.alpha,
        }
    }

    /// True iff the sorted coordinate vectors agree componentwise within
    /// `tol`: similarity of the underlying triangles.
    pub fn similar(&self, other: &AngleTriple, tol: f64) -> bool {
        let a = self.sorted_coords();
        let b = other.sorted_coords();
        a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= tol)
    }
}

/// True iff the two collections match as multisets of similarity classes:
/// every triple of `xs` pairs with a distinct triple of `ys` that is
/// [`AngleTriple::similar`] to it within `tol`.
pub fn multiset_similar(xs: &[AngleTriple], ys: &[AngleTriple], tol: f64) -> bool {
    if xs.len() != ys.len() {
        return false;
    }
    let mut used = vec![false; ys.len()];
    for x in xs {
        let Some(pos) = ys
            .iter()
            .enumerate()
            .position(|(i, y)| !used[i] && x.similar(y, tol))
        else {
            return false;
        };
        used[pos] = true;
    }
    true
}

impl fmt::Display for AngleTriple {
    /// Canonical text form: three decimal radians, comma separated,
    /// 15 digits after the decimal point.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.15},{:.15},{:.15}", self.alpha, self.beta, self.gamma)
    }
}

impl FromStr for AngleTriple {
    type Err = TripleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |p: &str| -> Result<f64, TripleError> {
            p.trim().parse::<f64>().map_err(|_| TripleError::Parse { text: s.to_owned() })
        };
        let mut parts = s.split(',');
        let (a, b, g) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(g), None) => (parse(a)?, parse(b)?, parse(g)?),
            _ => return Err(TripleError::Parse { text: s.to_owned() }),
        };
        AngleTriple::new(a, b, g)
    }
}
