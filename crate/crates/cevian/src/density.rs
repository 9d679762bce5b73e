//! Constructive density: from any nondegenerate start triangle, a word of
//! subdivision maps whose result lands within `ε` of any target triangle,
//! packaged as a verifiable certificate.
//!
//! The construction chains preimage steps of the target for `k` steps, with
//! `k` chosen so that the `√3/2` contraction beats the simplex diameter:
//! `π√2 · (√3/2)^k < ε`. Applying the discovered word to the start then
//! lands within `ε` of the target regardless of where the start is.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::{apply_word, contraction_ratio, preimage_chain, MapWord};
use crate::simplex::{simplex_diameter, AngleTriple};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    /// The start triangle has a zero angle; subdivision needs a
    /// nondegenerate triangle.
    #[error("start triple is degenerate")]
    DegenerateStart,
    /// `ε` must be strictly positive; a zero tolerance is unsatisfiable in
    /// floating point.
    #[error("epsilon {0} is not strictly positive")]
    BadEpsilon(f64),
}

/// A witness that `apply_word(word, start)` is within `epsilon` of `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCertificate {
    #[serde(with = "triple_serde")]
    pub start: AngleTriple,
    #[serde(with = "triple_serde")]
    pub target: AngleTriple,
    pub epsilon: f64,
    pub word: MapWord,
    pub achieved_error: f64,
    /// A-priori depth bound from [`required_depth`]; the word may be
    /// shorter when early exit is enabled.
    pub k_bound: u32,
}

mod triple_serde {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &AngleTriple, s: S) -> Result<S::Ok, S::Error> {
        t.coords().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<AngleTriple, D::Error> {
        let c = <[f64; 3]>::deserialize(d)?;
        AngleTriple::new(c[0], c[1], c[2]).map_err(D::Error::custom)
    }
}

/// Smallest `k ≥ 0` with `π√2 · (√3/2)^k < epsilon`.
///
/// `π√2` is the ambient diameter of `P`, so `k` preimage steps suffice for
/// any start/target pair. Panics if `epsilon` is not strictly positive.
pub fn required_depth(epsilon: f64) -> u32 {
    assert!(epsilon > 0.0, "required_depth needs epsilon > 0");
    let ratio = contraction_ratio();
    let mut bound = simplex_diameter();
    let mut k = 0u32;
    while bound >= epsilon {
        bound *= ratio;
        k += 1;
    }
    k
}

/// [`approximate`] with the early-exit truncation made explicit. With
/// `early_exit` disabled the word is the full `k`-step preimage word of the
/// target and depends only on `(target, epsilon)`, never on the start.
pub fn approximate_with(
    start: &AngleTriple,
    target: &AngleTriple,
    epsilon: f64,
    early_exit: bool,
) -> Result<DensityCertificate, DensityError> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(DensityError::BadEpsilon(epsilon));
    }
    if start.min_angle() <= 0.0 {
        return Err(DensityError::DegenerateStart);
    }
    let k = required_depth(epsilon);
    let (word, _deepest) = preimage_chain(target, k as usize);

    let mut chosen = word.clone();
    let mut achieved = apply_word(&word, start).distance(target);
    if early_exit {
        for len in 0..=word.len() {
            let prefix = word.prefix(len);
            let err = apply_word(&prefix, start).distance(target);
            if err < epsilon {
                chosen = prefix;
                achieved = err;
                break;
            }
        }
    }
    debug_assert!(achieved < epsilon, "contraction chain must reach epsilon");
    Ok(DensityCertificate {
        start: *start,
        target: *target,
        epsilon,
        word: chosen,
        achieved_error: achieved,
        k_bound: k,
    })
}

/// Builds a density certificate for `(start, target, epsilon)`, truncating
/// the word at the first prefix already within `epsilon`.
pub fn approximate(
    start: &AngleTriple,
    target: &AngleTriple,
    epsilon: f64,
) -> Result<DensityCertificate, DensityError> {
    approximate_with(start, target, epsilon, true)
}

/// Recomputes the certificate's claims from scratch: the stored error must
/// match the replayed word within `1e−12`, beat `epsilon`, and the word
/// must respect the depth bound.
pub fn verify(cert: &DensityCertificate) -> bool {
    if cert.epsilon.is_nan() || cert.epsilon <= 0.0 {
        return false;
    }
    let replayed = apply_word(&cert.word, &cert.start).distance(&cert.target);
    (replayed - cert.achieved_error).abs() <= 1e-12
        && replayed < cert.epsilon
        && cert.achieved_error < cert.epsilon
        && cert.word.len() <= cert.k_bound as usize
}
