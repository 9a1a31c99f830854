//! Seeded sampling sweeps checking the eigenvalue-signature claims behind the
//! bound: at every sampled point of V the Hessian of |1/Delta|^2 has at most
//! m negative eigenvalues, the Hessian of g at least m positive ones, and the
//! Hessian of the pair potential at least 2m positive ones.
//!
//! Point generation is sequential and fully determined by the seed; only the
//! per-point linear algebra is dispatched through the parallel map, and the
//! results come back in sample order, so reports are reproducible bit-for-bit.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::morse::{self, Inertia};
use crate::poly::SparsePoly;

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub samples: usize,
    pub seed: u64,
    /// Points are drawn uniformly from the box [-w, w]^{2m}.
    pub half_width: f64,
    /// Rejection floor on |Delta|, keeping samples away from the zero locus.
    pub min_abs_delta: f64,
    pub null_tol: f64,
    /// Also check pair Hessians on consecutive sample pairs.
    pub check_pairs: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            samples: 1000,
            seed: 0,
            half_width: 2.0,
            min_abs_delta: 1e-3,
            null_tol: morse::DEFAULT_NULL_TOL,
            check_pairs: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub coords: Vec<f64>,
    pub abs_delta: f64,
    /// Signature of the Hessian of |1/Delta|^2.
    pub inertia_inv_abs2: Inertia,
    /// Signature of the Hessian of g.
    pub inertia_g: Inertia,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub m: usize,
    pub samples: usize,
    /// Draws discarded for falling within the |Delta| floor.
    pub rejected: usize,
    pub seed: u64,
    /// max over samples of the negative count of H(|1/Delta|^2).
    pub max_negative: usize,
    /// min over samples of the positive count of H(g).
    pub min_positive_g: usize,
    /// min over checked pairs of the positive count of the pair Hessian.
    pub min_positive_pair: Option<usize>,
    /// Samples where the negative count of H(|1/Delta|^2) exceeds m.
    pub negativity_violations: usize,
    /// Samples where the positive count of H(g) falls below m.
    pub positivity_violations: usize,
    pub pair_violations: usize,
    pub records: Vec<PointRecord>,
}

/// Draws `count` points of V, rejecting any with |Delta| at or below the
/// floor; returns the points plus the rejection count. Errors if acceptance
/// stalls (a floor too high for the polynomial's scale).
pub fn sample_variety_points(
    delta: &SparsePoly,
    count: usize,
    seed: u64,
    half_width: f64,
    min_abs_delta: f64,
) -> Result<(Vec<Vec<f64>>, usize)> {
    let m = delta.dim();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut rejected = 0usize;
    let budget = 1000 * count.max(1);
    let mut draws = 0usize;
    while points.len() < count {
        if draws >= budget {
            return Err(Error::Parse(format!(
                "sampling stalled: {rejected} of {draws} draws below the |Delta| floor \
                 {min_abs_delta:e}"
            )));
        }
        draws += 1;
        let coords: Vec<f64> = (0..2 * m)
            .map(|_| rng.gen_range(-half_width..half_width))
            .collect();
        let z: Vec<Complex64> = morse::to_complex(&coords);
        if delta.eval(&z)?.norm() > min_abs_delta {
            points.push(coords);
        } else {
            rejected += 1;
        }
    }
    Ok((points, rejected))
}

fn record_at(delta: &SparsePoly, coords: &[f64], null_tol: f64) -> Result<PointRecord> {
    let z = morse::to_complex(coords);
    let abs_delta = delta.eval(&z)?.norm();
    let data = morse::eta_data(delta, &z)?;
    let h_inv = morse::hessian_abs2(&data);
    let h_g = morse::hessian_g(delta, coords)?;
    Ok(PointRecord {
        coords: coords.to_vec(),
        abs_delta,
        inertia_inv_abs2: morse::inertia(&h_inv, null_tol),
        inertia_g: morse::inertia(&h_g, null_tol),
    })
}

fn summarize(
    delta: &SparsePoly,
    points: Vec<Vec<f64>>,
    rejected: usize,
    opts: &SweepOptions,
    records: Vec<Result<PointRecord>>,
) -> Result<SweepReport> {
    let m = delta.dim();
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        out.push(r?);
    }
    let max_negative = out
        .iter()
        .map(|r| r.inertia_inv_abs2.negative)
        .max()
        .unwrap_or(0);
    let min_positive_g = out.iter().map(|r| r.inertia_g.positive).min().unwrap_or(0);
    let negativity_violations = out.iter().filter(|r| r.inertia_inv_abs2.negative > m).count();
    let positivity_violations = out.iter().filter(|r| r.inertia_g.positive < m).count();

    let (min_positive_pair, pair_violations) = if opts.check_pairs {
        let pairs: Vec<Vec<f64>> = points
            .chunks_exact(2)
            .map(|pq| pq[0].iter().chain(pq[1].iter()).copied().collect())
            .collect();
        let pair_inertias = exec::map(&pairs, |pair| {
            morse::pair_hessian(delta, pair).map(|h| morse::inertia(&h, opts.null_tol))
        });
        let mut min_pos = usize::MAX;
        let mut violations = 0usize;
        for sig in pair_inertias {
            let sig = sig?;
            min_pos = min_pos.min(sig.positive);
            if sig.positive < 2 * m {
                violations += 1;
            }
        }
        if min_pos == usize::MAX {
            (None, 0)
        } else {
            (Some(min_pos), violations)
        }
    } else {
        (None, 0)
    };

    Ok(SweepReport {
        m,
        samples: out.len(),
        rejected,
        seed: opts.seed,
        max_negative,
        min_positive_g,
        min_positive_pair,
        negativity_violations,
        positivity_violations,
        pair_violations,
        records: out,
    })
}

/// Sampling sweep with the per-point linear algebra dispatched in parallel.
pub fn hessian_sweep(delta: &SparsePoly, opts: &SweepOptions) -> Result<SweepReport> {
    let (points, rejected) = sample_variety_points(
        delta,
        opts.samples,
        opts.seed,
        opts.half_width,
        opts.min_abs_delta,
    )?;
    let records = exec::map(&points, |coords| record_at(delta, coords, opts.null_tol));
    summarize(delta, points, rejected, opts, records)
}

/// Strictly sequential variant of [`hessian_sweep`], for benchmarking and for
/// confirming that parallel dispatch does not change the report.
pub fn hessian_sweep_seq(delta: &SparsePoly, opts: &SweepOptions) -> Result<SweepReport> {
    let (points, rejected) = sample_variety_points(
        delta,
        opts.samples,
        opts.seed,
        opts.half_width,
        opts.min_abs_delta,
    )?;
    let records = exec::map_seq(&points, |coords| record_at(delta, coords, opts.null_tol));
    summarize(delta, points, rejected, opts, records)
}
