//! The Z-module of homogeneisations of a sparse polynomial.
//!
//! A degree vector d in Z^m is a homogeneisation of Delta when the weighted
//! degree i . d is the same integer N over every exponent vector i in the
//! support. Equivalently, d lies in the integer kernel of the matrix of
//! support differences against a fixed reference monomial.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::SparsePoly;
use crate::zmat;

/// Integer basis of the homogeneisation module, with the degree of each
/// basis vector.
#[derive(Debug, Clone, Serialize)]
pub struct HomogLattice {
    pub dim: usize,
    pub rank: usize,
    pub basis: Vec<Vec<i64>>,
    pub degrees: Vec<i64>,
}

impl HomogLattice {
    /// Membership test: integer combinations of the basis.
    pub fn contains(&self, d: &[i64]) -> bool {
        d.len() == self.dim && zmat::in_integer_span(&self.basis, d)
    }

    /// Degree functional N(d), linear on the lattice. `None` if `d` is not a
    /// member (degree is defined only there).
    pub fn degree_of(&self, delta: &SparsePoly, d: &[i64]) -> Option<i64> {
        is_homogeneisation(delta, d)
    }
}

/// Weighted degree of `d` if constant over the support of `delta`.
pub fn is_homogeneisation(delta: &SparsePoly, d: &[i64]) -> Option<i64> {
    if d.len() != delta.dim() || delta.is_zero() {
        return None;
    }
    let mut degree: Option<i64> = None;
    for exp in delta.support() {
        let n: i64 = exp.iter().zip(d.iter()).map(|(&e, &w)| e as i64 * w).sum();
        match degree {
            None => degree = Some(n),
            Some(prev) if prev != n => return None,
            Some(_) => {}
        }
    }
    degree
}

/// Checked variant reporting dimension mismatches as errors.
pub fn check_homogeneisation(delta: &SparsePoly, d: &[i64]) -> Result<Option<i64>> {
    if d.len() != delta.dim() {
        return Err(Error::DimensionMismatch {
            expected: delta.dim(),
            got: d.len(),
        });
    }
    if delta.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(is_homogeneisation(delta, d))
}

/// Computes a Z-basis of Homog(Delta).
///
/// The reference monomial is the lexicographically smallest support element,
/// so the difference matrix (and with it the reported basis) is deterministic.
pub fn homog_lattice(delta: &SparsePoly) -> Result<HomogLattice> {
    if delta.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let m = delta.dim();
    let support = delta.support();
    let reference = support[0]; // lex smallest: BTreeMap iteration order
    let rows: Vec<Vec<i64>> = support[1..]
        .iter()
        .map(|exp| {
            exp.iter()
                .zip(reference.iter())
                .map(|(&a, &b)| a as i64 - b as i64)
                .collect()
        })
        .collect();
    let basis = zmat::integer_kernel(&rows, m);
    let degrees = basis
        .iter()
        .map(|d| {
            reference
                .iter()
                .zip(d.iter())
                .map(|(&e, &w)| e as i64 * w)
                .sum()
        })
        .collect();
    Ok(HomogLattice {
        dim: m,
        rank: basis.len(),
        basis,
        degrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::sample_delta;

    fn only_homog() -> SparsePoly {
        // z1 + z1^2 + z2^2 + z2^3: only the zero homogeneisation
        SparsePoly::from_real_terms(
            2,
            [
                (vec![1, 0], 1.0),
                (vec![2, 0], 1.0),
                (vec![0, 2], 1.0),
                (vec![0, 3], 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn known_examples_membership_and_degrees() {
        let d = sample_delta(); // z1^2 - z2*z3
        let lat = homog_lattice(&d).unwrap();
        assert_eq!(lat.rank, 2);
        assert!(lat.contains(&[1, 1, 1]));
        assert!(lat.contains(&[2, 4, 0]));
        assert_eq!(is_homogeneisation(&d, &[1, 1, 1]), Some(2));
        assert_eq!(is_homogeneisation(&d, &[2, 4, 0]), Some(4));
        assert_eq!(is_homogeneisation(&d, &[1, 0, 0]), None);
        // (0,...,0) is always a homogeneisation, of degree 0
        assert!(lat.contains(&[0, 0, 0]));
        assert_eq!(is_homogeneisation(&d, &[0, 0, 0]), Some(0));
    }

    #[test]
    fn rank_zero_lattice() {
        let lat = homog_lattice(&only_homog()).unwrap();
        assert_eq!(lat.rank, 0);
        assert!(lat.basis.is_empty());
        assert!(lat.contains(&[0, 0]));
        assert!(!lat.contains(&[1, 0]));
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(matches!(
            homog_lattice(&SparsePoly::zero(2)),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn brute_force_box_cross_check() {
        // membership in the computed lattice must agree with the direct
        // homogeneisation test on every vector in a box
        let d = sample_delta();
        let lat = homog_lattice(&d).unwrap();
        let b = 10i64;
        // 3 coordinates: scan a coarse sub-box exhaustively plus the full
        // [-B,B]^3 box at stride 1 would be 9261 points; cheap enough
        for x in -b..=b {
            for y in -b..=b {
                for z in -b..=b {
                    let v = [x, y, z];
                    let member = lat.contains(&v);
                    let homog = is_homogeneisation(&d, &v).is_some();
                    assert_eq!(member, homog, "mismatch at {v:?}");
                }
            }
        }
    }

    #[test]
    fn degree_functional_linear_and_closed() {
        let d = sample_delta();
        let lat = homog_lattice(&d).unwrap();
        let b0 = &lat.basis[0];
        let b1 = &lat.basis[1];
        let sum: Vec<i64> = b0.iter().zip(b1.iter()).map(|(a, b)| a + b).collect();
        let neg: Vec<i64> = b0.iter().map(|a| -a).collect();
        let n0 = is_homogeneisation(&d, b0).unwrap();
        let n1 = is_homogeneisation(&d, b1).unwrap();
        assert_eq!(is_homogeneisation(&d, &sum), Some(n0 + n1));
        assert_eq!(is_homogeneisation(&d, &neg), Some(-n0));
        assert_eq!(lat.degrees[0], n0);
        assert_eq!(lat.degrees[1], n1);
    }
}
