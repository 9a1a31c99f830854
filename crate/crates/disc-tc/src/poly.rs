//! Sparse multivariate complex polynomials.
//!
//! Terms are keyed by exponent vectors in a `BTreeMap`, so iteration (and
//! hence evaluation order) is lexicographic and deterministic. Canonical form
//! never stores an exactly-zero coefficient.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector of a monomial; length equals the ambient dimension.
pub type MultiIndex = Vec<u32>;

/// Sparse polynomial in `dim` complex variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl SparsePoly {
    /// The zero polynomial in `dim` variables.
    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "ambient dimension must be positive");
        SparsePoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial from (exponent vector, coefficient) pairs.
    /// Coefficients on equal exponent vectors are accumulated; exact zeros
    /// are stripped.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut map: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (exp, coeff) in terms {
            if exp.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: exp.len(),
                });
            }
            let entry = map.entry(exp).or_insert(Complex64::ZERO);
            *entry += coeff;
        }
        map.retain(|_, c| *c != Complex64::ZERO);
        Ok(SparsePoly { dim, terms: map })
    }

    /// Convenience constructor with real coefficients.
    pub fn from_real_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        Self::from_terms(
            dim,
            terms
                .into_iter()
                .map(|(e, c)| (e, Complex64::new(c, 0.0))),
        )
    }

    /// The constant polynomial `c`.
    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = Self::zero(dim);
        if c != Complex64::ZERO {
            p.terms.insert(vec![0; dim], c);
        }
        p
    }

    /// The monomial `z_j` (0-based index).
    pub fn variable(dim: usize, j: usize) -> Result<Self> {
        if j >= dim {
            return Err(Error::IndexOutOfRange { index: j, dim });
        }
        let mut exp = vec![0u32; dim];
        exp[j] = 1;
        Self::from_terms(dim, [(exp, Complex64::ONE)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    /// Support of the polynomial (exponent vectors, lexicographic order).
    pub fn support(&self) -> Vec<&MultiIndex> {
        self.terms.keys().collect()
    }

    /// Evaluates at `z` with Kahan-compensated summation in lexicographic
    /// term order, so results are reproducible across runs.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        let mut sum = Complex64::ZERO;
        let mut comp = Complex64::ZERO;
        for (exp, coeff) in &self.terms {
            let mut term = *coeff;
            for (zi, &e) in z.iter().zip(exp.iter()) {
                term *= zi.powu(e);
            }
            // Kahan step, componentwise.
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        Ok(sum)
    }

    /// Holomorphic partial derivative with respect to `z_j` (0-based).
    pub fn partial(&self, j: usize) -> Result<SparsePoly> {
        if j >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: j,
                dim: self.dim,
            });
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (exp, coeff) in &self.terms {
            if exp[j] == 0 {
                continue;
            }
            let mut e = exp.clone();
            e[j] -= 1;
            terms.push((e, coeff * exp[j] as f64));
        }
        SparsePoly::from_terms(self.dim, terms)
    }

    /// Substitutes `z_j = 0` for every `j` in `zeroed` (0-based indices):
    /// drops each term with a positive exponent at a zeroed coordinate.
    /// The ambient dimension is unchanged.
    pub fn restrict_to_zero(&self, zeroed: &[usize]) -> SparsePoly {
        let terms = self
            .terms
            .iter()
            .filter(|(exp, _)| zeroed.iter().all(|&j| exp[j] == 0))
            .map(|(e, c)| (e.clone(), *c));
        SparsePoly {
            dim: self.dim,
            terms: terms.collect(),
        }
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let all = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(e, c)| (e.clone(), *c));
        SparsePoly::from_terms(self.dim, all)
    }

    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: MultiIndex = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                *acc.entry(exp).or_insert(Complex64::ZERO) += ca * cb;
            }
        }
        acc.retain(|_, c| *c != Complex64::ZERO);
        Ok(SparsePoly {
            dim: self.dim,
            terms: acc,
        })
    }

    pub fn scale(&self, c: Complex64) -> SparsePoly {
        let mut terms = self.terms.clone();
        if c == Complex64::ZERO {
            terms.clear();
        } else {
            for v in terms.values_mut() {
                *v *= c;
            }
        }
        SparsePoly {
            dim: self.dim,
            terms,
        }
    }

    /// All holomorphic first partials, index order `0..dim`.
    pub fn gradient(&self) -> Vec<SparsePoly> {
        (0..self.dim).map(|j| self.partial(j).unwrap()).collect()
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for (j, &e) in exp.iter().enumerate() {
                if e == 1 {
                    write!(f, "*z{}", j + 1)?;
                } else if e > 1 {
                    write!(f, "*z{}^{}", j + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

// --- JSON wire format -------------------------------------------------------
//
// {"dim": m, "terms": [{"exp": [i1,...,im], "re": a, "im": b}, ...]}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    dim: usize,
    terms: Vec<TermJson>,
}

impl Serialize for SparsePoly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let dto = PolyJson {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        };
        dto.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SparsePoly {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let dto = PolyJson::deserialize(de)?;
        if dto.dim == 0 {
            return Err(D::Error::custom("dim must be positive"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &dto.terms {
            if t.exp.len() != dto.dim {
                return Err(D::Error::custom(format!(
                    "exponent vector {:?} has length {}, expected {}",
                    t.exp,
                    t.exp.len(),
                    dto.dim
                )));
            }
            if !seen.insert(t.exp.clone()) {
                return Err(D::Error::custom(format!(
                    "duplicate exponent vector {:?}",
                    t.exp
                )));
            }
        }
        SparsePoly::from_terms(
            dto.dim,
            dto.terms
                .into_iter()
                .map(|t| (t.exp, Complex64::new(t.re, t.im))),
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Delta = z1^2 - z2*z3, the running example.
    pub fn sample_delta() -> SparsePoly {
        SparsePoly::from_real_terms(3, [(vec![2, 0, 0], 1.0), (vec![0, 1, 1], -1.0)]).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn eval_examples() {
        let d = sample_delta();
        assert_eq!(d.eval(&[c(1.0), c(1.0), c(1.0)]).unwrap(), c(0.0));
        assert_eq!(d.eval(&[c(2.0), c(1.0), c(1.0)]).unwrap(), c(3.0));
        let z = SparsePoly::zero(3);
        assert_eq!(z.eval(&[c(5.0), c(-1.0), c(2.0)]).unwrap(), c(0.0));
    }

    #[test]
    fn eval_dimension_mismatch() {
        let d = sample_delta();
        assert!(matches!(
            d.eval(&[c(1.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_examples() {
        let d = sample_delta();
        let d1 = d.partial(0).unwrap();
        let expected = SparsePoly::from_real_terms(3, [(vec![1, 0, 0], 2.0)]).unwrap();
        assert_eq!(d1, expected);

        let d2 = d.partial(1).unwrap();
        let expected = SparsePoly::from_real_terms(3, [(vec![0, 0, 1], -1.0)]).unwrap();
        assert_eq!(d2, expected);

        let konst = SparsePoly::constant(3, c(7.0));
        assert!(konst.partial(2).unwrap().is_zero());

        assert!(matches!(
            d.partial(3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn restrict_examples() {
        let d = sample_delta();
        let r = d.restrict_to_zero(&[1]);
        assert_eq!(
            r,
            SparsePoly::from_real_terms(3, [(vec![2, 0, 0], 1.0)]).unwrap()
        );
        let r = d.restrict_to_zero(&[0]);
        assert_eq!(
            r,
            SparsePoly::from_real_terms(3, [(vec![0, 1, 1], -1.0)]).unwrap()
        );
        assert!(d.restrict_to_zero(&[0, 1]).is_zero());
        assert_eq!(r.dim(), 3);
    }

    #[test]
    fn partial_commutes_with_restrict_off_pattern() {
        let d = sample_delta();
        let a = d.partial(0).unwrap().restrict_to_zero(&[1]);
        let b = d.restrict_to_zero(&[1]).partial(0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn canonical_form_strips_zeros() {
        let p = SparsePoly::from_real_terms(2, [(vec![1, 0], 1.0), (vec![1, 0], -1.0)]).unwrap();
        assert!(p.is_zero());
        let q = SparsePoly::from_real_terms(2, [(vec![0, 1], 2.0)]).unwrap();
        assert_eq!(p.add(&q).unwrap(), q);
    }

    #[test]
    fn json_roundtrip_and_duplicate_rejection() {
        let d = sample_delta();
        let s = serde_json::to_string(&d).unwrap();
        let back: SparsePoly = serde_json::from_str(&s).unwrap();
        assert_eq!(d, back);

        let dup = r#"{"dim":2,"terms":[{"exp":[1,0],"re":1.0,"im":0.0},{"exp":[1,0],"re":2.0,"im":0.0}]}"#;
        assert!(serde_json::from_str::<SparsePoly>(dup).is_err());
    }

    #[test]
    fn mul_expands_products() {
        // (z1 - z2)(z1 + z2) = z1^2 - z2^2
        let a = SparsePoly::from_real_terms(2, [(vec![1, 0], 1.0), (vec![0, 1], -1.0)]).unwrap();
        let b = SparsePoly::from_real_terms(2, [(vec![1, 0], 1.0), (vec![0, 1], 1.0)]).unwrap();
        let p = a.mul(&b).unwrap();
        let expected =
            SparsePoly::from_real_terms(2, [(vec![2, 0], 1.0), (vec![0, 2], -1.0)]).unwrap();
        assert_eq!(p, expected);
    }
}

#[cfg(test)]
pub use tests::sample_delta;
