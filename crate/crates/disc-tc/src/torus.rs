//! Scalar torus actions on discriminantal varieties and the upper bound
//! 2m - s + t on (equivariant) topological complexity.
//!
//! An s x m integer matrix Xi whose rows are homogeneisations of Delta acts
//! on the complement V of { Delta = 0 } by z_j -> theta_1^xi_1j ... theta_s^xi_sj z_j.
//! The stabiliser of a point depends only on which coordinates vanish; on the
//! stratum with zero-pattern S the stabiliser dimension is
//! s - rank_Q(Xi restricted to the columns outside S). Maximising over the
//! achievable patterns (those where Delta does not vanish identically) gives t.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{self, homog_lattice};
use crate::poly::SparsePoly;
use crate::zmat;

/// Enumeration cap: zero-pattern search is 2^m.
pub const PATTERN_DIM_CAP: usize = 20;

/// A validated scalar torus action.
#[derive(Debug, Clone, Serialize)]
pub struct TorusAction {
    pub s: usize,
    pub xi: Vec<Vec<i64>>,
    pub row_degrees: Vec<i64>,
}

impl TorusAction {
    /// Applies theta . z coordinatewise; theta entries should be unit modulus.
    pub fn apply(&self, theta: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(theta.len(), self.s);
        z.iter()
            .enumerate()
            .map(|(j, &zj)| {
                let mut factor = Complex64::ONE;
                for (r, t) in theta.iter().enumerate() {
                    factor *= t.powi(self.xi[r][j] as i32);
                }
                factor * zj
            })
            .collect()
    }

    /// Same action in interleaved real coordinates (x1,y1,...,xm,ym).
    pub fn apply_real(&self, theta: &[Complex64], coords: &[f64]) -> Vec<f64> {
        let z: Vec<Complex64> = coords
            .chunks_exact(2)
            .map(|xy| Complex64::new(xy[0], xy[1]))
            .collect();
        self.apply(theta, &z)
            .into_iter()
            .flat_map(|w| [w.re, w.im])
            .collect()
    }

    /// The trivial action of a 0-dimensional torus.
    pub fn trivial(m: usize) -> Self {
        let _ = m;
        TorusAction {
            s: 0,
            xi: Vec::new(),
            row_degrees: Vec::new(),
        }
    }
}

/// Report emitted by [`tc_upper_bound`].
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub m: usize,
    pub s: usize,
    pub t: usize,
    pub bound: i64,
    pub witness_pattern: Vec<usize>,
    pub lattice_rank: usize,
}

/// Validates that every row of `xi` is a homogeneisation of `delta`.
pub fn validate_action(delta: &SparsePoly, xi: &[Vec<i64>]) -> Result<TorusAction> {
    if delta.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let m = delta.dim();
    let mut degrees = Vec::with_capacity(xi.len());
    for (r, row) in xi.iter().enumerate() {
        if row.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: row.len(),
            });
        }
        match lattice::is_homogeneisation(delta, row) {
            Some(n) => degrees.push(n),
            None => return Err(Error::InvalidActionRow { row: r }),
        }
    }
    Ok(TorusAction {
        s: xi.len(),
        xi: xi.to_vec(),
        row_degrees: degrees,
    })
}

/// A zero-pattern is achievable when Delta restricted to it is not the zero
/// polynomial, i.e. the corresponding stratum of V is nonempty.
pub fn pattern_achievable(delta: &SparsePoly, pattern: &[usize]) -> bool {
    !delta.restrict_to_zero(pattern).is_zero()
}

/// Dimension of the common stabiliser on the stratum with zero-pattern
/// `pattern`: s minus the rational rank of Xi restricted to the surviving
/// columns. Finite (torsion) stabiliser parts contribute 0 by design.
pub fn stabiliser_dim(
    delta: &SparsePoly,
    action: &TorusAction,
    pattern: &[usize],
) -> Result<usize> {
    if !pattern_achievable(delta, pattern) {
        return Err(Error::UnachievablePattern {
            pattern: pattern.to_vec(),
        });
    }
    Ok(stabiliser_dim_unchecked(delta.dim(), action, pattern))
}

fn stabiliser_dim_unchecked(m: usize, action: &TorusAction, pattern: &[usize]) -> usize {
    let keep: Vec<usize> = (0..m).filter(|j| !pattern.contains(j)).collect();
    let restricted: Vec<Vec<i64>> = action
        .xi
        .iter()
        .map(|row| keep.iter().map(|&j| row[j]).collect())
        .collect();
    action.s - zmat::rank_q(&restricted)
}

fn mask_to_pattern(mask: u32, m: usize) -> Vec<usize> {
    (0..m).filter(|j| mask >> j & 1 == 1).collect()
}

/// Maximal stabiliser dimension t over all achievable zero-patterns, with a
/// witness pattern attaining it (smallest such pattern in mask order).
///
/// Enumerates the 2^m patterns with memoised monotonicity pruning: removing
/// a coordinate from an unachievable pattern's zero set never makes a
/// superset achievable, so unachievability propagates upward for free.
pub fn max_stabiliser_dim(
    delta: &SparsePoly,
    action: &TorusAction,
) -> Result<(usize, Vec<usize>)> {
    let m = delta.dim();
    if m > PATTERN_DIM_CAP {
        return Err(Error::PatternCapExceeded {
            dim: m,
            cap: PATTERN_DIM_CAP,
        });
    }
    let total = 1u64 << m;
    let mut achievable = vec![false; total as usize];
    let mut best_t = 0usize;
    let mut witness: Vec<usize> = Vec::new();
    let mut have_witness = false;
    for mask in 0..total {
        let mask = mask as u32;
        let idx = mask as usize;
        let parent_ok = mask == 0 || achievable[(mask & (mask - 1)) as usize];
        let pattern = mask_to_pattern(mask, m);
        achievable[idx] = parent_ok && pattern_achievable(delta, &pattern);
        if !achievable[idx] {
            continue;
        }
        let dim = stabiliser_dim_unchecked(m, action, &pattern);
        if !have_witness || dim > best_t {
            best_t = dim;
            witness = pattern;
            have_witness = true;
        }
    }
    Ok((best_t, witness))
}

/// Same maximisation over an explicitly supplied pattern list (the escape
/// hatch above the enumeration cap). Unachievable patterns are errors.
pub fn max_stabiliser_dim_over(
    delta: &SparsePoly,
    action: &TorusAction,
    patterns: &[Vec<usize>],
) -> Result<(usize, Vec<usize>)> {
    let mut best: Option<(usize, Vec<usize>)> = None;
    for p in patterns {
        let dim = stabiliser_dim(delta, action, p)?;
        if best.as_ref().map_or(true, |(b, _)| dim > *b) {
            best = Some((dim, p.clone()));
        }
    }
    best.ok_or(Error::UnachievablePattern {
        pattern: Vec::new(),
    })
}

/// The headline bound TC(V) <= TC_{T^s}(V) <= 2m - s + t.
pub fn tc_upper_bound(delta: &SparsePoly, action: &TorusAction) -> Result<BoundReport> {
    let m = delta.dim();
    let (t, witness_pattern) = max_stabiliser_dim(delta, action)?;
    let lattice_rank = homog_lattice(delta)?.rank;
    Ok(BoundReport {
        m,
        s: action.s,
        t,
        bound: 2 * m as i64 - action.s as i64 + t as i64,
        witness_pattern,
        lattice_rank,
    })
}
