//! Planar configuration spaces: barycentre retraction, the correspondence
//! between root multisets and elementary-symmetric coefficients, the
//! discriminants of the ordered and unordered models, and the 2n-3 bounds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::SparsePoly;
use crate::torus::{self, TorusAction};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Cap for symbolic expansion of the ordered-model discriminant.
pub const EXPANSION_CAP: usize = 6;

/// Distinctness floor for root finding, relative to the configuration scale.
pub const ROOT_MARGIN_TOL: f64 = 1e-10;

/// Residual acceptance for the simultaneous root finder, relative to the
/// coefficient scale.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;

/// A multiset (or tuple, when `ordered`) of n pairwise-distinct points in C.
#[derive(Debug, Clone)]
pub struct PlanarConfig {
    points: Vec<Complex64>,
    ordered: bool,
}

impl PlanarConfig {
    pub fn new(points: Vec<Complex64>, ordered: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Parse("a configuration needs at least 2 points".into()));
        }
        let c = PlanarConfig { points, ordered };
        let margin = c.margin();
        if margin <= 0.0 {
            return Err(Error::CoincidentPoints { margin });
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn ordered(&self) -> bool {
        self.ordered
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Smallest pairwise distance.
    pub fn margin(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                min = min.min((self.points[i] - self.points[j]).norm());
            }
        }
        min
    }

    pub fn scale(&self) -> f64 {
        self.points
            .iter()
            .fold(1.0f64, |acc, w| acc.max(w.norm()))
    }

    pub fn barycentre(&self) -> Complex64 {
        self.points.iter().sum::<Complex64>() / self.points.len() as f64
    }

    pub fn is_centred(&self) -> bool {
        self.points.iter().sum::<Complex64>().norm() < 1e-12 * self.scale() * self.n() as f64
    }

    pub fn rotate(&self, theta: Complex64) -> PlanarConfig {
        PlanarConfig {
            points: self.points.iter().map(|w| theta * w).collect(),
            ordered: self.ordered,
        }
    }

    /// Canonical representative for serialisation of unordered configs:
    /// points sorted lexicographically on (re, im).
    pub fn canonical_points(&self) -> Vec<Complex64> {
        if self.ordered {
            return self.points.clone();
        }
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| {
            (a.re, a.im)
                .partial_cmp(&(b.re, b.im))
                .expect("finite coordinates")
        });
        pts
    }
}

/// Minimal over matchings of the maximal per-point displacement between two
/// same-size point sets. Exhaustive over permutations with pruning (n <= 10
/// in practice; planner and roundtrip scales).
pub fn matching_displacement(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut used = vec![false; n];
    let mut best = f64::INFINITY;
    fn go(
        a: &[Complex64],
        b: &[Complex64],
        used: &mut [bool],
        i: usize,
        current_max: f64,
        best: &mut f64,
    ) {
        if current_max >= *best {
            return; // prune
        }
        if i == a.len() {
            *best = current_max;
            return;
        }
        for j in 0..b.len() {
            if used[j] {
                continue;
            }
            let d = (a[i] - b[j]).norm();
            used[j] = true;
            go(a, b, used, i + 1, current_max.max(d), best);
            used[j] = false;
        }
    }
    go(a, b, &mut used, 0, 0.0, &mut best);
    best
}

/// Distance between two configurations: exact per-index for ordered ones,
/// optimal matching for multisets.
pub fn config_distance(a: &PlanarConfig, b: &PlanarConfig) -> f64 {
    if a.ordered() && b.ordered() {
        a.points()
            .iter()
            .zip(b.points())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    } else {
        matching_displacement(a.points(), b.points())
    }
}

/// Elementary-symmetric coefficients (a_2, ..., a_n) of a centred
/// configuration; the monic polynomial is P(w) = w^n + sum (-1)^i a_i w^{n-i}.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    pub a: Vec<Complex64>,
}

impl CoeffVector {
    pub fn n(&self) -> usize {
        self.a.len() + 1
    }

    /// Monic coefficient list c_0..c_n of P, highest degree first:
    /// c_0 = 1, c_1 = 0, c_k = (-1)^k a_k.
    pub fn monic_coeffs(&self) -> Vec<Complex64> {
        let n = self.n();
        let mut c = vec![Complex64::ZERO; n + 1];
        c[0] = Complex64::ONE;
        for k in 2..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            c[k] = sign * self.a[k - 2];
        }
        c
    }
}

/// The barycentre retraction rho(c; t): every point shifted by -t * mean.
/// At t = 1 the result is centred; pairwise distances are unchanged.
pub fn retract_barycentre(c: &PlanarConfig, t: f64) -> PlanarConfig {
    let shift = t * c.barycentre();
    PlanarConfig {
        points: c.points.iter().map(|w| w - shift).collect(),
        ordered: c.ordered,
    }
}

/// Elementary symmetric functions of a centred configuration.
pub fn roots_to_coeffs(c: &PlanarConfig) -> Result<CoeffVector> {
    let sum: Complex64 = c.points.iter().sum();
    let tol = 1e-9 * c.scale() * c.n() as f64;
    if sum.norm() > tol {
        return Err(Error::NotCentred { norm: sum.norm() });
    }
    // expand prod (w - w_i) by convolution; e_k = (-1)^k c_k
    let n = c.n();
    let mut coeffs = vec![Complex64::ZERO; n + 1];
    coeffs[0] = Complex64::ONE;
    for (i, w) in c.points.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            let lower = coeffs[k - 1];
            coeffs[k] -= w * lower;
        }
    }
    let a = (2..=n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * coeffs[k]
        })
        .collect();
    Ok(CoeffVector { a })
}

/// Aberth-Ehrlich simultaneous root finding for the monic polynomial defined
/// by `a`, seeded on a scaled circle. Roots come back re-centred and are
/// accepted only when every residual is below the contract tolerance and the
/// pairwise margin is safe.
pub fn coeffs_to_roots(a: &CoeffVector) -> Result<PlanarConfig> {
    let n = a.n();
    let coeffs = a.monic_coeffs();
    let coeff_scale = coeffs.iter().fold(1.0f64, |acc, c| acc.max(c.norm()));

    let eval = |w: Complex64| -> (Complex64, Complex64) {
        // Horner for P and P'
        let mut p = Complex64::ZERO;
        let mut dp = Complex64::ZERO;
        for c in &coeffs {
            dp = dp * w + p;
            p = p * w + *c;
        }
        (p, dp)
    };

    // seed radius: Fujiwara-style bound on root moduli
    let radius = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| 2.0 * c.norm().powf(1.0 / k as f64))
        .fold(0.5f64, f64::max);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| {
            Complex64::from_polar(
                radius,
                std::f64::consts::TAU * k as f64 / n as f64 + 0.4,
            )
        })
        .collect();

    const MAX_ITERS: usize = 400;
    let mut converged = false;
    for _ in 0..MAX_ITERS {
        let mut max_resid = 0.0f64;
        let mut next = roots.clone();
        for i in 0..n {
            let (p, dp) = eval(roots[i]);
            max_resid = max_resid.max(p.norm());
            if p.norm() <= 1e-3 * ROOT_RESIDUAL_TOL * coeff_scale {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { p };
            let mut repulsion = Complex64::ZERO;
            for j in 0..n {
                if j != i {
                    let diff = roots[i] - roots[j];
                    if diff.norm() > 0.0 {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = Complex64::ONE - newton * repulsion;
            let correction = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            next[i] = roots[i] - correction;
        }
        roots = next;
        if max_resid <= ROOT_RESIDUAL_TOL * coeff_scale {
            converged = true;
            break;
        }
    }
    if !converged {
        // one final check: the last update may have landed within tolerance
        let worst = roots.iter().map(|&w| eval(w).0.norm()).fold(0.0, f64::max);
        if worst > ROOT_RESIDUAL_TOL * coeff_scale {
            return Err(Error::RootFindingFailed { iters: MAX_ITERS });
        }
    }

    // polish: two full sweeps past the tolerance, driving simple-root
    // residuals to machine level so the multiplicity check below has margin
    for _ in 0..2 {
        let mut next = roots.clone();
        for i in 0..n {
            let (p, dp) = eval(roots[i]);
            let newton = if dp.norm() > 0.0 { p / dp } else { p };
            let mut repulsion = Complex64::ZERO;
            for j in 0..n {
                if j != i {
                    let diff = roots[i] - roots[j];
                    if diff.norm() > 0.0 {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = Complex64::ONE - newton * repulsion;
            if denom.norm() > 1e-300 {
                next[i] = roots[i] - newton / denom;
            }
        }
        roots = next;
    }

    // re-centre (the mean is already ~0 since the w^{n-1} coefficient vanishes)
    let mean = roots.iter().sum::<Complex64>() / n as f64;
    for w in roots.iter_mut() {
        *w -= mean;
    }

    let scale = roots.iter().fold(1.0f64, |acc, w| acc.max(w.norm()));
    let mut margin = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            margin = margin.min((roots[i] - roots[j]).norm());
        }
    }
    let tol = ROOT_MARGIN_TOL * scale;
    if margin < tol {
        return Err(Error::MultipleRoots { margin, tol });
    }

    // multiplicity check via backward error: a k-fold root smears into a
    // cluster whose Newton correction |P/P'| stays comparable to the cluster
    // diameter, while a polished simple root's correction is at machine
    // level, far below any honest margin
    let worst_correction = roots
        .iter()
        .map(|&w| {
            let (p, dp) = eval(w + mean); // undo the re-centring shift
            if dp.norm() > 0.0 {
                (p / dp).norm()
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    if worst_correction > 0.05 * margin {
        return Err(Error::MultipleRoots {
            margin,
            tol: worst_correction,
        });
    }
    PlanarConfig::new(roots, false)
}

/// Discriminant from roots: prod_{i<j} (w_i - w_j)^2.
pub fn disc_from_roots(points: &[Complex64]) -> Complex64 {
    let mut d = Complex64::ONE;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let diff = points[i] - points[j];
            d *= diff * diff;
        }
    }
    d
}

/// Delta^C evaluated on a configuration (root path).
pub fn disc_c_from_roots(c: &PlanarConfig) -> Complex64 {
    disc_from_roots(c.points())
}

/// Delta^C evaluated on a coefficient vector, through root finding.
pub fn disc_c_from_coeffs(a: &CoeffVector) -> Result<Complex64> {
    let roots = coeffs_to_roots(a)?;
    Ok(disc_from_roots(roots.points()))
}

/// Delta^F evaluated at (w_1, ..., w_{n-1}) by its product formula:
/// (prod_{i<j} (w_i - w_j)) * (prod_i (w_i + (w_1 + ... + w_{n-1}))).
pub fn disc_f(w: &[Complex64]) -> Complex64 {
    let sum: Complex64 = w.iter().sum();
    let mut d = Complex64::ONE;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            d *= w[i] - w[j];
        }
    }
    for wi in w {
        d *= wi + sum;
    }
    d
}

/// Symbolic expansion of Delta^F for the ordered model in n - 1 variables.
/// Exponential in n; capped at n <= 6.
pub fn disc_f_poly(n: usize) -> Result<SparsePoly> {
    if n < 2 {
        return Err(Error::Parse("need n >= 2".into()));
    }
    if n > EXPANSION_CAP {
        return Err(Error::ExpansionCapExceeded {
            n,
            cap: EXPANSION_CAP,
        });
    }
    let m = n - 1;
    let mut acc = SparsePoly::constant(m, Complex64::ONE);
    for i in 0..m {
        for j in i + 1..m {
            let mut exps_i = vec![0u32; m];
            exps_i[i] = 1;
            let mut exps_j = vec![0u32; m];
            exps_j[j] = 1;
            let factor =
                SparsePoly::from_real_terms(m, [(exps_i, 1.0), (exps_j, -1.0)])?;
            acc = acc.mul(&factor)?;
        }
    }
    for i in 0..m {
        // w_i + (w_1 + ... + w_{n-1}) has coefficient 2 at i, 1 elsewhere
        let terms = (0..m).map(|k| {
            let mut e = vec![0u32; m];
            e[k] = 1;
            (e, if k == i { 2.0 } else { 1.0 })
        });
        let factor = SparsePoly::from_real_terms(m, terms)?;
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}

/// Report of the configuration-space pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigBoundReport {
    pub n: usize,
    pub ordered: bool,
    pub m: usize,
    pub s: usize,
    pub t: usize,
    pub bound: i64,
    pub witness_pattern: Vec<usize>,
}

/// Runs the torus-action pipeline for F_n (ordered, symbolic expansion with
/// Xi = (1,...,1)) or C_n (unordered, Xi = (2,...,n) with achievability
/// sampled through the root finder) and returns the bound 2n - 3. Fails
/// loudly if the computed maximal stabiliser dimension is not 0.
pub fn bound_for_config_spaces(n: usize, ordered: bool, seed: u64) -> Result<ConfigBoundReport> {
    if n < 2 {
        return Err(Error::Parse("need n >= 2".into()));
    }
    if ordered {
        let delta = disc_f_poly(n)?;
        let xi = vec![vec![1i64; n - 1]];
        let action = torus::validate_action(&delta, &xi)?;
        let rep = torus::tc_upper_bound(&delta, &action)?;
        if rep.t != 0 {
            return Err(Error::StabiliserMismatch {
                t: rep.t,
                expected: 0,
            });
        }
        Ok(ConfigBoundReport {
            n,
            ordered,
            m: rep.m,
            s: rep.s,
            t: rep.t,
            bound: rep.bound,
            witness_pattern: rep.witness_pattern,
        })
    } else {
        bound_unordered(n, seed)
    }
}

/// Unordered pipeline: Delta^C is never expanded symbolically. The action
/// row (2, 3, ..., n) is validated numerically through the scaling identity
/// Delta^C(theta^2 a_2, ..., theta^n a_n) = theta^{n(n-1)} Delta^C(a), and
/// pattern achievability is sampled through the root finder.
fn bound_unordered(n: usize, seed: u64) -> Result<ConfigBoundReport> {
    let m = n - 1;
    let mut rng = StdRng::seed_from_u64(seed);

    // scaling-identity check standing in for lattice membership of (2,...,n)
    for trial in 0..20 {
        let a = random_coeffs(m, &mut rng);
        let Ok(d0) = disc_c_from_coeffs(&a) else {
            continue;
        };
        if d0.norm() < 1e-9 {
            continue;
        }
        let theta = Complex64::from_polar(1.0, 0.3 + 0.11 * trial as f64);
        let scaled = CoeffVector {
            a: a.a
                .iter()
                .enumerate()
                .map(|(k, &ak)| theta.powi((k + 2) as i32) * ak)
                .collect(),
        };
        let d1 = disc_c_from_coeffs(&scaled)?;
        let expected = theta.powi((n * (n - 1)) as i32) * d0;
        if (d1 - expected).norm() > 1e-6 * d0.norm() {
            return Err(Error::InvalidActionRow { row: 0 });
        }
    }

    let xi_row: Vec<i64> = (2..=n as i64).collect();
    let action = TorusAction {
        s: 1,
        xi: vec![xi_row.clone()],
        row_degrees: vec![(n * (n - 1)) as i64],
    };

    // maximise the stabiliser dimension over achievable zero-patterns
    let mut t = 0usize;
    let mut witness: Vec<usize> = Vec::new();
    for mask in 0u32..(1 << m) {
        let pattern: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
        if !pattern_achievable_sampled(n, &pattern, &mut rng) {
            continue;
        }
        let keep: Vec<Vec<i64>> = vec![(0..m)
            .filter(|j| !pattern.contains(j))
            .map(|j| xi_row[j])
            .collect()];
        let dim = action.s - crate::zmat::rank_q(&keep);
        if dim > t {
            t = dim;
            witness = pattern;
        }
    }
    if t != 0 {
        return Err(Error::StabiliserMismatch { t, expected: 0 });
    }
    Ok(ConfigBoundReport {
        n,
        ordered: false,
        m,
        s: 1,
        t,
        bound: 2 * m as i64 - 1 + t as i64,
        witness_pattern: witness,
    })
}

fn random_coeffs(m: usize, rng: &mut StdRng) -> CoeffVector {
    CoeffVector {
        a: (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    }
}

/// Achievability of a zero-pattern for Delta^C, sampled: a pattern is
/// achievable when some coefficient vector vanishing exactly on it yields
/// distinct roots. The all-zero pattern gives P = w^n, never achievable.
fn pattern_achievable_sampled(n: usize, pattern: &[usize], rng: &mut StdRng) -> bool {
    let m = n - 1;
    if pattern.len() == m {
        return false; // P = w^n has an n-fold root
    }
    for _ in 0..8 {
        let mut a = random_coeffs(m, rng);
        for &j in pattern {
            a.a[j] = Complex64::ZERO;
        }
        if let Ok(roots) = coeffs_to_roots(&a) {
            if disc_from_roots(roots.points()).norm() > 1e-12 {
                return true;
            }
        }
    }
    false
}

// --- JSON wire formats -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    n: usize,
    ordered: bool,
    points: Vec<[f64; 2]>,
}

impl Serialize for PlanarConfig {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let dto = ConfigJson {
            n: self.n(),
            ordered: self.ordered,
            points: self
                .canonical_points()
                .iter()
                .map(|w| [w.re, w.im])
                .collect(),
        };
        dto.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PlanarConfig {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let dto = ConfigJson::deserialize(de)?;
        if dto.points.len() != dto.n {
            return Err(D::Error::custom(format!(
                "declared n = {} but {} points given",
                dto.n,
                dto.points.len()
            )));
        }
        PlanarConfig::new(
            dto.points
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
            dto.ordered,
        )
        .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    n: usize,
    a: Vec<[f64; 2]>,
}

impl Serialize for CoeffVector {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffJson {
            n: self.n(),
            a: self.a.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CoeffVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let dto = CoeffJson::deserialize(de)?;
        if dto.a.len() + 1 != dto.n {
            return Err(D::Error::custom("coefficient count must be n - 1"));
        }
        Ok(CoeffVector {
            a: dto.a.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        })
    }
}
