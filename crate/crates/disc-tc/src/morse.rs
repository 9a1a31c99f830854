//! The potential g(z) = |z|^2 + |1/Delta(z)|^2 on the complement of the zero
//! locus, its exact gradient and Euclidean Hessian assembled from Wirtinger
//! derivatives, eigenvalue inertia, and a descending gradient flow on V x V.
//!
//! Real coordinates are interleaved: (x_1, y_1, ..., x_m, y_m).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::SparsePoly;

pub const DEFAULT_GRAD_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_STEPS: usize = 100_000;
pub const DEFAULT_NULL_TOL: f64 = 1e-9;

pub fn to_complex(coords: &[f64]) -> Vec<Complex64> {
    coords
        .chunks_exact(2)
        .map(|xy| Complex64::new(xy[0], xy[1]))
        .collect()
}

pub fn to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|w| [w.re, w.im]).collect()
}

/// A point of R^{2m}, identified with (z_1,...,z_m) in C^m.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealPoint {
    pub coords: Vec<f64>,
}

impl RealPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() % 2 != 0 || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parse("real point must have 2m finite entries".into()));
        }
        Ok(RealPoint { coords })
    }

    /// Constructor for points tagged as lying in V: |Delta(z)| must be
    /// strictly positive.
    pub fn in_variety(coords: Vec<f64>, delta: &SparsePoly) -> Result<Self> {
        let p = Self::new(coords)?;
        if delta.eval(&to_complex(&p.coords))?.norm() > 0.0 {
            Ok(p)
        } else {
            Err(Error::OnZeroLocus)
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        to_complex(&self.coords)
    }
}

/// Eigenvalue signature of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub null: usize,
}

/// Value, first and second holomorphic partials of a function eta at a point.
/// Everything needed to assemble the Euclidean Hessian of |eta|^2.
#[derive(Debug, Clone)]
pub struct WirtingerData {
    pub value: Complex64,
    pub grad: Vec<Complex64>,
    pub hess: Vec<Vec<Complex64>>,
}

impl WirtingerData {
    pub fn dim(&self) -> usize {
        self.grad.len()
    }
}

/// Wirtinger data of eta = 1/Delta at z. Errors on the zero locus.
pub fn eta_data(delta: &SparsePoly, z: &[Complex64]) -> Result<WirtingerData> {
    let m = delta.dim();
    let d = delta.eval(z)?;
    if d.norm() == 0.0 {
        return Err(Error::OnZeroLocus);
    }
    let firsts: Vec<SparsePoly> = delta.gradient();
    let dz: Vec<Complex64> = firsts
        .iter()
        .map(|p| p.eval(z))
        .collect::<Result<_>>()?;
    let inv = d.inv();
    let inv2 = inv * inv;
    let grad: Vec<Complex64> = dz.iter().map(|&dj| -dj * inv2).collect();
    let mut hess = vec![vec![Complex64::ZERO; m]; m];
    for i in 0..m {
        // d^2 Delta / dz_i dz_j for j >= i (symmetric)
        let row = firsts[i].gradient();
        for j in i..m {
            let dij = row[j].eval(z)?;
            let v = -dij * inv2 + 2.0 * dz[i] * dz[j] * inv2 * inv;
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    Ok(WirtingerData {
        value: inv,
        grad,
        hess,
    })
}

/// Euclidean Hessian (2m x 2m, coordinates x_1,y_1,...,x_m,y_m) of
/// h = |eta|^2 from Wirtinger data.
///
/// With A_ij = eta_ij * conj(eta) and C_ij = eta_i * conj(eta_j):
///   h_{x_i x_j} =  2 Re A + 2 Re C      h_{x_i y_j} =  2 Im C - 2 Im A
///   h_{y_i x_j} = -2 Im A - 2 Im C      h_{y_i y_j} =  2 Re C - 2 Re A
/// The C-block is the positive-semidefinite part, the A-block the indefinite
/// one.
pub fn hessian_abs2(data: &WirtingerData) -> DMatrix<f64> {
    let m = data.dim();
    let conj = data.value.conj();
    let mut h = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let a = data.hess[i][j] * conj;
            let c = data.grad[i] * data.grad[j].conj();
            h[(2 * i, 2 * j)] = 2.0 * (a.re + c.re);
            h[(2 * i + 1, 2 * j + 1)] = 2.0 * (c.re - a.re);
            h[(2 * i, 2 * j + 1)] = 2.0 * (c.im - a.im);
            h[(2 * i + 1, 2 * j)] = -2.0 * (a.im + c.im);
        }
    }
    h
}

/// Real gradient (length 2m) of |eta|^2 from Wirtinger data:
/// d/dx_j = 2 Re(conj(eta) eta_j), d/dy_j = -2 Im(conj(eta) eta_j).
pub fn grad_abs2(data: &WirtingerData) -> Vec<f64> {
    let conj = data.value.conj();
    data.grad
        .iter()
        .flat_map(|&gj| {
            let w = conj * gj;
            [2.0 * w.re, -2.0 * w.im]
        })
        .collect()
}

/// g(z) = sum |z_j|^2 + |1/Delta(z)|^2.
pub fn potential_g(delta: &SparsePoly, coords: &[f64]) -> Result<f64> {
    let z = to_complex(coords);
    let d = delta.eval(&z)?;
    if d.norm() == 0.0 {
        return Err(Error::OnZeroLocus);
    }
    let quad: f64 = coords.iter().map(|c| c * c).sum();
    Ok(quad + 1.0 / d.norm_sqr())
}

/// Exact real gradient of g (length 2m).
pub fn grad_g(delta: &SparsePoly, coords: &[f64]) -> Result<Vec<f64>> {
    let z = to_complex(coords);
    let data = eta_data(delta, &z)?;
    let mut grad = grad_abs2(&data);
    for (gi, ci) in grad.iter_mut().zip(coords.iter()) {
        *gi += 2.0 * ci;
    }
    Ok(grad)
}

/// Euclidean Hessian of g: 2 I_{2m} plus the Hessian of |1/Delta|^2.
pub fn hessian_g(delta: &SparsePoly, coords: &[f64]) -> Result<DMatrix<f64>> {
    let z = to_complex(coords);
    let data = eta_data(delta, &z)?;
    let mut h = hessian_abs2(&data);
    for i in 0..h.nrows() {
        h[(i, i)] += 2.0;
    }
    Ok(h)
}

/// Counts eigenvalues above, below, and within the null band. The band is
/// `null_tol` relative to the largest eigenvalue magnitude.
pub fn inertia(matrix: &DMatrix<f64>, null_tol: f64) -> Inertia {
    let sym = (matrix + matrix.transpose()) * 0.5;
    let eigen = sym.symmetric_eigenvalues();
    let max_abs = eigen.iter().fold(0.0f64, |acc, &e| acc.max(e.abs()));
    let thr = null_tol * max_abs;
    let mut inertia = Inertia {
        positive: 0,
        negative: 0,
        null: 0,
    };
    for &e in eigen.iter() {
        if e > thr {
            inertia.positive += 1;
        } else if e < -thr {
            inertia.negative += 1;
        } else {
            inertia.null += 1;
        }
    }
    inertia
}

// --- pair potential on V x V ------------------------------------------------

/// f~(p, p') = g(p) + g(p'). Coordinates are the concatenation of both
/// points' real coordinates.
pub fn pair_potential(delta: &SparsePoly, pair: &[f64]) -> Result<f64> {
    let (p, q) = split_pair(delta, pair)?;
    Ok(potential_g(delta, p)? + potential_g(delta, q)?)
}

pub fn pair_grad(delta: &SparsePoly, pair: &[f64]) -> Result<Vec<f64>> {
    let (p, q) = split_pair(delta, pair)?;
    let mut g = grad_g(delta, p)?;
    g.extend(grad_g(delta, q)?);
    Ok(g)
}

/// Block sum of the two Euclidean Hessians; the off-diagonal blocks vanish.
pub fn pair_hessian(delta: &SparsePoly, pair: &[f64]) -> Result<DMatrix<f64>> {
    let (p, q) = split_pair(delta, pair)?;
    let hp = hessian_g(delta, p)?;
    let hq = hessian_g(delta, q)?;
    let n = hp.nrows();
    let mut h = DMatrix::<f64>::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(&hp);
    h.view_mut((n, n), (n, n)).copy_from(&hq);
    Ok(h)
}

fn split_pair<'a>(delta: &SparsePoly, pair: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
    let n = 2 * delta.dim();
    if pair.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: pair.len(),
        });
    }
    Ok(pair.split_at(n))
}

// --- gradient flow -----------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    pub grad_tol: f64,
    pub max_steps: usize,
    pub initial_step: f64,
    /// Cap on per-step displacement (continuity bound for path sampling).
    pub max_displacement: f64,
    /// Record every k-th step into the trace (terminal always recorded).
    pub record_stride: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            grad_tol: DEFAULT_GRAD_TOL,
            max_steps: DEFAULT_MAX_STEPS,
            initial_step: 0.1,
            max_displacement: 0.1,
            record_stride: 16,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowSample {
    pub point: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowTrace {
    pub samples: Vec<FlowSample>,
    pub terminal: Vec<f64>,
    pub converged: bool,
    pub steps: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Backtracking gradient descent on an arbitrary smooth potential.
///
/// `eval` returns (value, gradient) or None outside the admissible domain;
/// `guard` vets a candidate step given the previous point (step rejection).
/// Descent is monotone by construction: a step is accepted only on an Armijo
/// decrease, so recorded samples have non-increasing values.
pub fn descend<E, G>(eval: E, guard: G, start: &[f64], opts: &FlowOptions) -> Result<FlowTrace>
where
    E: Fn(&[f64]) -> Option<(f64, Vec<f64>)>,
    G: Fn(&[f64], &[f64]) -> bool,
{
    const ARMIJO: f64 = 1e-4;
    let Some((mut value, mut grad)) = eval(start) else {
        return Err(Error::OnZeroLocus);
    };
    let mut x = start.to_vec();
    let mut step = opts.initial_step;
    let mut samples = vec![FlowSample {
        point: x.clone(),
        value,
        grad_norm: norm(&grad),
    }];
    let mut converged = norm(&grad) < opts.grad_tol;
    let mut steps_taken = 0usize;

    while !converged && steps_taken < opts.max_steps {
        let gnorm = norm(&grad);
        // clamp so one step never moves farther than the continuity bound
        let mut t = step.min(opts.max_displacement / gnorm.max(1e-300));
        let mut accepted = false;
        while t > 1e-16 {
            let candidate: Vec<f64> = x.iter().zip(grad.iter()).map(|(xi, gi)| xi - t * gi).collect();
            if let Some((v, g)) = eval(&candidate) {
                if v <= value - ARMIJO * t * gnorm * gnorm && guard(&x, &candidate) {
                    x = candidate;
                    value = v;
                    grad = g;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break; // stuck: line search exhausted
        }
        step = (t * 2.0).min(1.0);
        steps_taken += 1;
        if steps_taken % opts.record_stride == 0 {
            samples.push(FlowSample {
                point: x.clone(),
                value,
                grad_norm: norm(&grad),
            });
        }
        converged = norm(&grad) < opts.grad_tol;
    }

    if samples.last().map(|s| &s.point) != Some(&x) {
        samples.push(FlowSample {
            point: x.clone(),
            value,
            grad_norm: norm(&grad),
        });
    }
    Ok(FlowTrace {
        terminal: x,
        samples,
        converged,
        steps: steps_taken,
    })
}

/// Descending gradient flow of the pair potential f~ on V x V.
///
/// The guard rejects any step that would drop |Delta| at either component
/// below half its current value, so the trace never approaches the zero
/// locus uncontrolled.
pub fn gradient_flow(delta: &SparsePoly, start: &[f64], opts: &FlowOptions) -> Result<FlowTrace> {
    let n = 2 * delta.dim();
    let abs_delta = |coords: &[f64]| -> Option<(f64, f64)> {
        let (p, q) = coords.split_at(n);
        let a = delta.eval(&to_complex(p)).ok()?.norm();
        let b = delta.eval(&to_complex(q)).ok()?.norm();
        Some((a, b))
    };
    match abs_delta(start) {
        Some((a, b)) if a > 0.0 && b > 0.0 => {}
        _ => return Err(Error::OnZeroLocus),
    }
    let eval = |coords: &[f64]| -> Option<(f64, Vec<f64>)> {
        let v = pair_potential(delta, coords).ok()?;
        let g = pair_grad(delta, coords).ok()?;
        Some((v, g))
    };
    let guard = |old: &[f64], new: &[f64]| -> bool {
        match (abs_delta(old), abs_delta(new)) {
            (Some((a0, b0)), Some((a1, b1))) => a1 >= 0.5 * a0 && b1 >= 0.5 * b0,
            _ => false,
        }
    };
    descend(eval, guard, start, opts)
}
