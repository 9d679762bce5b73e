//! Coordinate-geometry subdivision for arbitrary interior-point strategies:
//! build a triangle from its angles, locate the chosen center, cut along the
//! three Cevians through it, and read the six daughters' angle triples back
//! off the picture.
//!
//! The centers are evaluated from their barycentric coordinates, which are
//! the textbook equivalents of the classical ruler-and-compass
//! descriptions: centroid `(1:1:1)`, incenter `(a:b:c)`, Gergonne
//! `(1/(s−a) : 1/(s−b) : 1/(s−c))` (Cevians to the incircle's points of
//! tangency), Lemoine `(a²:b²:c²)` (medians reflected across the angle
//! bisectors). The incenter route is cross-checked against the subdivision
//! matrices in [`crate::maps`], which validates the whole pipeline.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::simplex::AngleTriple;

/// Angles at or below this are treated as degenerate by the engine.
pub const DEGENERATE_ANGLE: f64 = 1e-9;

/// Signed areas at or below this reject a vertex set as collinear.
pub const DEGENERATE_AREA: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("triangle is degenerate (angle or area below guard)")]
    DegenerateTriangle,
    /// A Cevian foot fell outside its open edge segment by more than
    /// `1e−9`: the chosen center is not interior.
    #[error("cevian foot outside its edge (non-interior center)")]
    CevianFailure,
    #[error("weighted strategy needs positive weights summing to 1, got {0:?}")]
    BadWeights([f64; 3]),
    #[error("unknown center strategy {0:?}")]
    ParseStrategy(String),
}

/// Which interior point drives the subdivision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CenterStrategy {
    Centroid,
    Incenter,
    Gergonne,
    Lemoine,
    /// Ordin's point `p0·A + p1·B + p2·C` with fixed positive weights
    /// summing to 1.
    Weighted([f64; 3]),
}

impl CenterStrategy {
    pub fn weighted(p0: f64, p1: f64, p2: f64) -> Result<Self, GeometryError> {
        let w = [p0, p1, p2];
        if w.iter().all(|&p| p > 0.0) && (p0 + p1 + p2 - 1.0).abs() <= 1e-9 {
            Ok(Self::Weighted(w))
        } else {
            Err(GeometryError::BadWeights(w))
        }
    }
}

impl fmt::Display for CenterStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Centroid => write!(f, "centroid"),
            Self::Incenter => write!(f, "incenter"),
            Self::Gergonne => write!(f, "gergonne"),
            Self::Lemoine => write!(f, "lemoine"),
            Self::Weighted(w) => write!(f, "weighted:{},{},{}", w[0], w[1], w[2]),
        }
    }
}

impl FromStr for CenterStrategy {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "centroid" => Ok(Self::Centroid),
            "incenter" => Ok(Self::Incenter),
            "gergonne" => Ok(Self::Gergonne),
            "lemoine" => Ok(Self::Lemoine),
            other => {
                if let Some(rest) = other.strip_prefix("weighted:") {
                    let parts: Vec<f64> = rest
                        .split(',')
                        .map(|p| p.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| GeometryError::ParseStrategy(s.to_owned()))?;
                    if parts.len() != 3 {
                        return Err(GeometryError::ParseStrategy(s.to_owned()));
                    }
                    Self::weighted(parts[0], parts[1], parts[2])
                } else {
                    Err(GeometryError::ParseStrategy(s.to_owned()))
                }
            }
        }
    }
}

/// A concrete triangle in canonical placement: `A = (0,0)`, `B = (1,0)`,
/// `C` in the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleXY {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
}

fn sub(p: [f64; 2], q: [f64; 2]) -> [f64; 2] {
    [p[0] - q[0], p[1] - q[1]]
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn cross(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

fn dot(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[0] + u[1] * v[1]
}

impl TriangleXY {
    /// Signed area; positive for counterclockwise vertex order.
    pub fn signed_area(&self) -> f64 {
        0.5 * cross(sub(self.b, self.a), sub(self.c, self.a))
    }

    /// Side lengths `(|BC|, |CA|, |AB|)` opposite `A`, `B`, `C`.
    pub fn side_lengths(&self) -> [f64; 3] {
        [
            norm(sub(self.c, self.b)),
            norm(sub(self.a, self.c)),
            norm(sub(self.b, self.a)),
        ]
    }

    pub fn angles(&self) -> Result<AngleTriple, GeometryError> {
        angles_of_points(self.a, self.b, self.c)
    }
}

/// Canonical triangle with the given angles: `A = (0,0)`, `B = (1,0)`,
/// `C = (b·cos α, b·sin α)` with `b = sin β / sin γ` by the law of sines.
pub fn vertices_from_angles(t: &AngleTriple) -> Result<TriangleXY, GeometryError> {
    if t.min_angle() <= DEGENERATE_ANGLE {
        return Err(GeometryError::DegenerateTriangle);
    }
    let [alpha, beta, gamma] = t.coords();
    let b = beta.sin() / gamma.sin();
    let tri = TriangleXY {
        a: [0.0, 0.0],
        b: [1.0, 0.0],
        c: [b * alpha.cos(), b * alpha.sin()],
    };
    if tri.signed_area() <= DEGENERATE_AREA {
        return Err(GeometryError::DegenerateTriangle);
    }
    Ok(tri)
}

/// Interior angles at three arbitrary noncollinear points, in point order,
/// via the two-argument arctangent of the edge vectors. Invariant under
/// rigid motion and uniform scaling.
pub fn angles_of_points(
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
) -> Result<AngleTriple, GeometryError> {
    let area2 = cross(sub(b, a), sub(c, a)).abs();
    if area2 <= 2.0 * DEGENERATE_AREA {
        return Err(GeometryError::DegenerateTriangle);
    }
    let corner = |o: [f64; 2], p: [f64; 2], q: [f64; 2]| {
        let u = sub(p, o);
        let v = sub(q, o);
        cross(u, v).abs().atan2(dot(u, v))
    };
    let alpha = corner(a, b, c);
    let beta = corner(b, c, a);
    let gamma = corner(c, a, b);
    AngleTriple::new(alpha, beta, gamma).map_err(|_| GeometryError::DegenerateTriangle)
}

/// Unnormalized barycentric weights of the strategy's center on `(A, B, C)`.
pub fn barycentric_weights(strategy: CenterStrategy, tri: &TriangleXY) -> [f64; 3] {
    let [a, b, c] = tri.side_lengths();
    match strategy {
        CenterStrategy::Centroid => [1.0, 1.0, 1.0],
        CenterStrategy::Incenter => [a, b, c],
        CenterStrategy::Gergonne => {
            let s = 0.5 * (a + b + c);
            [1.0 / (s - a), 1.0 / (s - b), 1.0 / (s - c)]
        }
        CenterStrategy::Lemoine => [a * a, b * b, c * c],
        CenterStrategy::Weighted(w) => w,
    }
}

/// Cartesian point of the strategy's center inside `tri`.
pub fn center_point(strategy: CenterStrategy, tri: &TriangleXY) -> [f64; 2] {
    let w = barycentric_weights(strategy, tri);
    let total = w[0] + w[1] + w[2];
    [
        (w[0] * tri.a[0] + w[1] * tri.b[0] + w[2] * tri.c[0]) / total,
        (w[0] * tri.a[1] + w[1] * tri.b[1] + w[2] * tri.c[1]) / total,
    ]
}

/// Foot of the Cevian through the center, on the edge from `p` to `q`,
/// where `wp`, `wq` are the center's barycentric weights at `p` and `q`.
/// The foot divides the edge at parameter `u = wq / (wp + wq)`.
fn cevian_foot(p: [f64; 2], q: [f64; 2], wp: f64, wq: f64) -> Result<[f64; 2], GeometryError> {
    let denom = wp + wq;
    if denom.abs() < 1e-300 {
        return Err(GeometryError::CevianFailure);
    }
    let u = wq / denom;
    if !(-1e-9..=1.0 + 1e-9).contains(&u) {
        return Err(GeometryError::CevianFailure);
    }
    Ok([p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1])])
}

/// Subdivides by the three Cevians through the strategy's center and returns
/// the six daughters' angle triples in the fixed order
/// `A-F-X, F-B-X, B-D-X, D-C-X, C-E-X, E-A-X`, where `X` is the center,
/// `D` lies on `BC`, `E` on `CA`, `F` on `AB`, and each daughter's angles
/// are listed at its vertices in that order.
pub fn subdivide(
    strategy: CenterStrategy,
    t: &AngleTriple,
) -> Result<[AngleTriple; 6], GeometryError> {
    let tri = vertices_from_angles(t)?;
    let w = barycentric_weights(strategy, &tri);
    let total = w[0] + w[1] + w[2];
    let x = [
        (w[0] * tri.a[0] + w[1] * tri.b[0] + w[2] * tri.c[0]) / total,
        (w[0] * tri.a[1] + w[1] * tri.b[1] + w[2] * tri.c[1]) / total,
    ];
    let d = cevian_foot(tri.b, tri.c, w[1], w[2])?;
    let e = cevian_foot(tri.c, tri.a, w[2], w[0])?;
    let f = cevian_foot(tri.a, tri.b, w[0], w[1])?;
    Ok([
        angles_of_points(tri.a, f, x)?,
        angles_of_points(f, tri.b, x)?,
        angles_of_points(tri.b, d, x)?,
        angles_of_points(d, tri.c, x)?,
        angles_of_points(tri.c, e, x)?,
        angles_of_points(e, tri.a, x)?,
    ])
}
