//! Rotation-equivariant motion planning on unordered planar configuration
//! spaces, in three legs: barycentre retraction at both ends, descending
//! gradient flow of the pair potential down to a near-critical pair, and a
//! connecting move along the common rotation orbit or through a catalog of
//! critical configurations.
//!
//! The flow runs in configuration (root) coordinates with the potential
//! pulled back from coefficient space, so no root finding happens inside the
//! flow loop. This is an illustration of the scheme, not a certified
//! continuous planner: step (3) is scoped to small n where catalogs close it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{
    config_distance, disc_from_roots, matching_displacement, retract_barycentre, PlanarConfig,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::morse::{self, FlowOptions};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Catalogs are built only where complete critical lists are plausible.
pub const CATALOG_N_CAP: usize = 4;

/// Which potential drives the flow and the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    /// g pulled back to root coordinates: sum |a_i|^2 + 1/|Delta^C|^2.
    G,
    /// g' = sum |w_i|^2 + sum 1/|w_i - w_j| (central configurations).
    GPrime,
}

// --- potentials in root coordinates -----------------------------------------

fn points_of(coords: &[f64]) -> Vec<Complex64> {
    morse::to_complex(coords)
}

/// g'(w) = sum |w_i|^2 + sum_{i<j} 1/|w_i - w_j|.
pub fn potential_gprime(points: &[Complex64]) -> Result<f64> {
    let mut v: f64 = points.iter().map(|w| w.norm_sqr()).sum();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i] - points[j]).norm();
            if d == 0.0 {
                return Err(Error::CoincidentPoints { margin: 0.0 });
            }
            v += 1.0 / d;
        }
    }
    Ok(v)
}

/// Exact real gradient of g' (interleaved coordinates, length 2n).
pub fn grad_gprime(points: &[Complex64]) -> Result<Vec<f64>> {
    let n = points.len();
    let mut grad = vec![0.0f64; 2 * n];
    for k in 0..n {
        // Wirtinger derivative: conj(w_k) - sum_j conj(w_k - w_j) / (2 |w_k - w_j|^3)
        let mut u = points[k].conj();
        for j in 0..n {
            if j == k {
                continue;
            }
            let d = points[k] - points[j];
            let dn = d.norm();
            if dn == 0.0 {
                return Err(Error::CoincidentPoints { margin: 0.0 });
            }
            u -= d.conj() / (2.0 * dn.powi(3));
        }
        grad[2 * k] = 2.0 * u.re;
        grad[2 * k + 1] = -2.0 * u.im;
    }
    Ok(grad)
}

/// The coefficient-model potential g pulled back to root coordinates:
/// sum_{i=2}^n |e_i(w)|^2 + 1/|prod (w_i - w_j)^2|^2.
pub fn potential_g_roots(points: &[Complex64]) -> Result<f64> {
    let esym = elementary_symmetric(points);
    let d = disc_from_roots(points);
    if d.norm() == 0.0 {
        return Err(Error::CoincidentPoints { margin: 0.0 });
    }
    let coeff_part: f64 = esym[2..].iter().map(|a| a.norm_sqr()).sum();
    Ok(coeff_part + 1.0 / d.norm_sqr())
}

/// Exact real gradient of the pulled-back g via the Wirtinger chain rule.
pub fn grad_g_roots(points: &[Complex64]) -> Result<Vec<f64>> {
    let n = points.len();
    let esym = elementary_symmetric(points);
    let d = disc_from_roots(points);
    if d.norm() == 0.0 {
        return Err(Error::CoincidentPoints { margin: 0.0 });
    }
    let inv_d2_conj = (d * d * d.conj()).inv();
    let mut grad = vec![0.0f64; 2 * n];
    for k in 0..n {
        // de_i/dw_k = e_{i-1} of the other points
        let others: Vec<Complex64> = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &w)| w)
            .collect();
        let esub = elementary_symmetric(&others);
        let mut u = Complex64::ZERO;
        for i in 2..=n {
            // e_{i-1} of n-1 points; index i-1 <= n-1 always
            u += esym[i].conj() * esub[i - 1];
        }
        // dD/dw_k = D * sum_{j != k} 2/(w_k - w_j)
        let mut log_der = Complex64::ZERO;
        for j in 0..n {
            if j != k {
                log_der += 2.0 * (points[k] - points[j]).inv();
            }
        }
        u -= d * log_der * inv_d2_conj;
        grad[2 * k] = 2.0 * u.re;
        grad[2 * k + 1] = -2.0 * u.im;
    }
    Ok(grad)
}

/// e_0..e_n of the given points, by convolution.
fn elementary_symmetric(points: &[Complex64]) -> Vec<Complex64> {
    let n = points.len();
    let mut e = vec![Complex64::ZERO; n + 1];
    e[0] = Complex64::ONE;
    for (i, w) in points.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            let lower = e[k - 1];
            e[k] = e[k] + w * lower;
        }
    }
    e
}

fn potential_value(kind: PotentialKind, points: &[Complex64]) -> Result<f64> {
    match kind {
        PotentialKind::G => potential_g_roots(points),
        PotentialKind::GPrime => potential_gprime(points),
    }
}

fn potential_grad(kind: PotentialKind, points: &[Complex64]) -> Result<Vec<f64>> {
    match kind {
        PotentialKind::G => grad_g_roots(points),
        PotentialKind::GPrime => grad_gprime(points),
    }
}

/// Projects an ambient gradient onto the centred subspace (sum of points
/// fixed at zero), which the flow must preserve.
fn project_centred(grad: &mut [f64]) {
    let n = grad.len() / 2;
    let mean_x: f64 = grad.iter().step_by(2).sum::<f64>() / n as f64;
    let mean_y: f64 = grad.iter().skip(1).step_by(2).sum::<f64>() / n as f64;
    for k in 0..n {
        grad[2 * k] -= mean_x;
        grad[2 * k + 1] -= mean_y;
    }
}

// --- configuration flow -------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct PlanOptions {
    pub potential: PotentialKind,
    pub grad_tol: f64,
    pub max_steps: usize,
    /// Continuity bound: consecutive samples differ by at most this much.
    pub sample_step: f64,
    /// Two near-critical configurations within this matching distance after
    /// optimal rotation count as lying on a common orbit.
    pub orbit_tol: f64,
    /// Shape distance under which a near-critical configuration matches a
    /// catalog entry.
    pub catalog_tol: f64,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            potential: PotentialKind::G,
            grad_tol: 1e-7,
            max_steps: 50_000,
            sample_step: 0.05,
            orbit_tol: 1e-4,
            catalog_tol: 1e-2,
        }
    }
}

/// Gradient flow of the selected potential in root coordinates, recording
/// every accepted step. The guard keeps |Delta^C| above half its per-step
/// value, so the trajectory stays inside the configuration space.
pub fn flow_config(
    start: &PlanarConfig,
    opts: &PlanOptions,
) -> Result<(Vec<PlanarConfig>, bool)> {
    let kind = opts.potential;
    let eval = |coords: &[f64]| -> Option<(f64, Vec<f64>)> {
        let pts = points_of(coords);
        let v = potential_value(kind, &pts).ok()?;
        let mut g = potential_grad(kind, &pts).ok()?;
        project_centred(&mut g);
        Some((v, g))
    };
    let guard = |old: &[f64], new: &[f64]| -> bool {
        let d_old = disc_from_roots(&points_of(old)).norm();
        let d_new = disc_from_roots(&points_of(new)).norm();
        d_new >= 0.5 * d_old
    };
    let flow_opts = FlowOptions {
        grad_tol: opts.grad_tol,
        max_steps: opts.max_steps,
        initial_step: 0.05,
        max_displacement: opts.sample_step,
        record_stride: 1,
    };
    let start_coords = morse::to_real(start.points());
    let trace = morse::descend(eval, guard, &start_coords, &flow_opts)?;
    let mut samples = Vec::with_capacity(trace.samples.len());
    for s in &trace.samples {
        samples.push(PlanarConfig::new(points_of(&s.point), false)?);
    }
    Ok((samples, trace.converged))
}

// --- catalog -------------------------------------------------------------------

/// One critical configuration with its Morse-index label and, when
/// construction succeeded, an audited waypoint path to the catalog hub
/// (the entry of least potential value).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub config: PlanarConfig,
    pub value: f64,
    pub grad_norm: f64,
    pub index_label: String,
    pub shape_hash: String,
    pub recipe_to_hub: Option<Vec<PlanarConfig>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalCatalog {
    pub n: usize,
    pub potential: PotentialKind,
    pub grad_tol: f64,
    pub entries: Vec<CatalogEntry>,
}

/// Rotation-invariant distance between shapes: best matching displacement
/// over candidate aligning rotations.
pub fn shape_distance(a: &PlanarConfig, b: &PlanarConfig) -> f64 {
    best_rotation(a, b).1
}

/// Finds the unit rotation theta minimising the matching displacement from
/// theta * a to b; returns (theta, distance).
pub fn best_rotation(a: &PlanarConfig, b: &PlanarConfig) -> (Complex64, f64) {
    let mut best = (Complex64::ONE, matching_displacement(a.points(), b.points()));
    for &wa in a.points() {
        if wa.norm() < 1e-12 {
            continue;
        }
        for &wb in b.points() {
            if (wb.norm() - wa.norm()).abs() > 0.5 * wa.norm().max(1e-6) {
                continue;
            }
            let theta = (wb / wa) / (wb / wa).norm();
            let rotated: Vec<Complex64> = a.points().iter().map(|w| theta * w).collect();
            let d = matching_displacement(&rotated, b.points());
            if d < best.1 {
                best = (theta, d);
            }
        }
    }
    best
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Rotation-invariant hash: sorted pairwise distances rounded to 1e-6.
pub fn shape_hash(c: &PlanarConfig) -> String {
    let pts = c.points();
    let mut dists: Vec<i64> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            dists.push(((pts[i] - pts[j]).norm() * 1e6).round() as i64);
        }
    }
    dists.sort_unstable();
    let bytes: Vec<u8> = dists.iter().flat_map(|d| d.to_le_bytes()).collect();
    format!("{:016x}", fnv1a(&bytes))
}

/// Builds a catalog of near-critical configurations by multi-start descent,
/// deduplicated up to rotation and relabeling. Completeness is not claimed.
pub fn build_catalog(
    n: usize,
    seeds: usize,
    potential: PotentialKind,
    seed: u64,
) -> Result<CriticalCatalog> {
    if !(2..=CATALOG_N_CAP).contains(&n) {
        return Err(Error::CatalogUnavailable {
            n,
            cap: CATALOG_N_CAP,
        });
    }
    let opts = PlanOptions {
        potential,
        ..PlanOptions::default()
    };
    let mut rng = StdRng::seed_from_u64(seed);
    // Pure descent only reaches minima from generic starts. Saddles fixed by
    // a reflection (collinear shapes) sit in an invariant subspace the flow
    // preserves, so half the starts are drawn collinear to land on them too.
    let starts: Vec<PlanarConfig> = (0..seeds)
        .map(|i| {
            if i % 2 == 0 {
                random_centred_config(n, &mut rng)
            } else {
                random_collinear_config(n, &mut rng)
            }
        })
        .collect();

    // flows are independent: parallel over seeds, serialized dedup merge
    let results = exec::map(&starts, |start| flow_config(start, &opts));

    let mut entries: Vec<CatalogEntry> = Vec::new();
    for res in results {
        let Ok((samples, converged)) = res else {
            continue;
        };
        if !converged {
            continue;
        }
        let terminal = samples.last().expect("flow records its terminal").clone();
        if entries
            .iter()
            .any(|e| shape_distance(&e.config, &terminal) < 1e-3)
        {
            continue;
        }
        let pts = terminal.points().to_vec();
        let value = potential_value(potential, &pts)?;
        let mut grad = potential_grad(potential, &pts)?;
        project_centred(&mut grad);
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        let index_label = morse_index_label(potential, &terminal);
        entries.push(CatalogEntry {
            shape_hash: shape_hash(&terminal),
            config: terminal,
            value,
            grad_norm,
            index_label,
            recipe_to_hub: None,
        });
    }
    entries.sort_by(|a, b| a.value.partial_cmp(&b.value).expect("finite values"));

    // recipes: audited waypoint paths from each entry to the hub (entry 0)
    if !entries.is_empty() {
        let hub = entries[0].config.clone();
        entries[0].recipe_to_hub = Some(vec![hub.clone()]);
        for e in entries.iter_mut().skip(1) {
            e.recipe_to_hub = connect_shapes(&e.config, &hub, opts.sample_step);
        }
    }
    Ok(CriticalCatalog {
        n,
        potential,
        grad_tol: opts.grad_tol,
        entries,
    })
}

/// Index label from the eigenvalue signature of a finite-difference Hessian
/// of the potential at the configuration (ambient coordinates; the rotation
/// and centering directions show up as near-null).
fn morse_index_label(kind: PotentialKind, c: &PlanarConfig) -> String {
    let coords = morse::to_real(c.points());
    let dim = coords.len();
    let h = 1e-5;
    let mut mat = nalgebra::DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        let mut plus = coords.clone();
        let mut minus = coords.clone();
        plus[j] += h;
        minus[j] -= h;
        let gp = potential_grad(kind, &points_of(&plus)).unwrap_or_else(|_| vec![0.0; dim]);
        let gm = potential_grad(kind, &points_of(&minus)).unwrap_or_else(|_| vec![0.0; dim]);
        for i in 0..dim {
            mat[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    let sig = morse::inertia(&mat, 1e-6);
    format!("index {} (null {})", sig.negative, sig.null)
}

fn random_centred_config(n: usize, rng: &mut StdRng) -> PlanarConfig {
    loop {
        let mut pts: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
            .collect();
        let mean = pts.iter().sum::<Complex64>() / n as f64;
        for p in pts.iter_mut() {
            *p -= mean;
        }
        if let Ok(c) = PlanarConfig::new(pts, false) {
            if c.margin() > 0.3 {
                return c;
            }
        }
    }
}

fn random_collinear_config(n: usize, rng: &mut StdRng) -> PlanarConfig {
    loop {
        let dir = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        for x in xs.iter_mut() {
            *x -= mean;
        }
        let pts: Vec<Complex64> = xs.iter().map(|&x| x * dir).collect();
        if let Ok(c) = PlanarConfig::new(pts, false) {
            if c.margin() > 0.3 {
                return c;
            }
        }
    }
}

/// Matched straight-line waypoints between two centred shapes (after optimal
/// rotation alignment), audited for collisions; falls back to a radial lift
/// at 3x scale. Returns None when no audited connection was found.
fn connect_shapes(from: &PlanarConfig, to: &PlanarConfig, step: f64) -> Option<Vec<PlanarConfig>> {
    let (theta, _) = best_rotation(from, to);
    let aligned = from.rotate(theta);

    if let Some(path) = interpolate_matched(&aligned, to, step) {
        let mut full = rotation_leg(from, theta, step)?;
        full.extend(path.into_iter().skip(1));
        return Some(full);
    }
    // radial lift: out at 3x, across, back in
    let lifted_from = scale_config(&aligned, 3.0);
    let lifted_to = scale_config(to, 3.0);
    let out = interpolate_matched(&aligned, &lifted_from, step)?;
    let across = interpolate_matched(&lifted_from, &lifted_to, step)?;
    let down = interpolate_matched(&lifted_to, to, step)?;
    let mut full = rotation_leg(from, theta, step)?;
    full.extend(out.into_iter().skip(1));
    full.extend(across.into_iter().skip(1));
    full.extend(down.into_iter().skip(1));
    Some(full)
}

fn scale_config(c: &PlanarConfig, factor: f64) -> PlanarConfig {
    PlanarConfig::new(c.points().iter().map(|w| factor * w).collect(), false)
        .expect("scaling preserves distinctness")
}

/// Samples the rotation orbit from `c` to `theta * c`, short way around.
fn rotation_leg(c: &PlanarConfig, theta: Complex64, step: f64) -> Option<Vec<PlanarConfig>> {
    let angle = theta.arg();
    let radius = c.points().iter().fold(0.0f64, |acc, w| acc.max(w.norm()));
    let arc = angle.abs() * radius;
    let steps = (arc / step).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        out.push(c.rotate(Complex64::from_polar(1.0, t * angle)));
    }
    Some(out)
}

/// Straight-line interpolation in root coordinates under the optimal point
/// matching, sampled at the continuity step and audited for margin. None if
/// any intermediate configuration collides.
fn interpolate_matched(from: &PlanarConfig, to: &PlanarConfig, step: f64) -> Option<Vec<PlanarConfig>> {
    let matched_to = align_points(from.points(), to.points());
    let dist = from
        .points()
        .iter()
        .zip(matched_to.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let steps = (dist / step).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let pts: Vec<Complex64> = from
            .points()
            .iter()
            .zip(matched_to.iter())
            .map(|(a, b)| a * (1.0 - t) + b * t)
            .collect();
        let cfg = PlanarConfig::new(pts, false).ok()?;
        if cfg.margin() < 1e-6 {
            return None;
        }
        out.push(cfg);
    }
    Some(out)
}

/// Permutes `b` into the order best matching `a` (min-max displacement).
fn align_points(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let mut best_perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let d = a
            .iter()
            .enumerate()
            .map(|(i, ai)| (ai - b[p[i]]).norm())
            .fold(0.0, f64::max);
        if d < best {
            best = d;
            best_perm = p.to_vec();
        }
    });
    best_perm.iter().map(|&j| b[j]).collect()
}

fn permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

// --- path assembly --------------------------------------------------------------

/// Time-ordered collision-free samples with the smallest margin attained.
#[derive(Debug, Clone, Serialize)]
pub struct PathPolyline {
    pub n: usize,
    pub samples: Vec<Vec<[f64; 2]>>,
    pub min_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanReport {
    pub path: PathPolyline,
    /// true when step (3) was a pure rotation along a common orbit
    pub used_rotation: bool,
    /// catalog entries matched for (q, q') when the orbit route did not apply
    pub catalog_entries: Option<(usize, usize)>,
    /// ambiguities the scheme leaves open, reported rather than resolved
    pub notes: Vec<String>,
}

fn margin_of(pts: &[Complex64]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            min = min.min((pts[i] - pts[j]).norm());
        }
    }
    min
}

/// Concatenates legs into a polyline with consistent point ordering:
/// each appended sample is permuted to best match its predecessor.
fn assemble(legs: Vec<Vec<PlanarConfig>>) -> PathPolyline {
    let mut samples: Vec<Vec<Complex64>> = Vec::new();
    for leg in legs {
        for cfg in leg {
            let pts = match samples.last() {
                Some(prev) => align_points(prev, cfg.points()),
                None => cfg.points().to_vec(),
            };
            if let Some(prev) = samples.last() {
                let move_dist = prev
                    .iter()
                    .zip(pts.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                if move_dist < 1e-12 {
                    continue; // drop duplicate junction samples
                }
            }
            samples.push(pts);
        }
    }
    let n = samples.first().map_or(0, |s| s.len());
    let min_margin = samples.iter().map(|s| margin_of(s)).fold(f64::INFINITY, f64::min);
    PathPolyline {
        n,
        samples: samples
            .into_iter()
            .map(|pts| pts.into_iter().map(|w| [w.re, w.im]).collect())
            .collect(),
        min_margin,
    }
}

/// Re-samples every segment of the polyline at `factor`-fold density and
/// returns the smallest margin seen, the collision-freeness audit.
pub fn audit_path(path: &PathPolyline, factor: usize) -> f64 {
    let mut min = f64::INFINITY;
    let to_pts = |s: &Vec<[f64; 2]>| -> Vec<Complex64> {
        s.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
    };
    for w in path.samples.windows(2) {
        let a = to_pts(&w[0]);
        let b = to_pts(&w[1]);
        for k in 0..=factor {
            let t = k as f64 / factor as f64;
            let pts: Vec<Complex64> = a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| x * (1.0 - t) + y * t)
                .collect();
            min = min.min(margin_of(&pts));
        }
    }
    if let Some(first) = path.samples.first() {
        min = min.min(margin_of(&to_pts(first)));
    }
    min
}

/// The three-step planner: connects `p` to `p_end` through the centred slice,
/// the gradient flow, and a rotation or catalog move between the two flow
/// terminals. Flow non-convergence and catalog misses are errors, never
/// silently bridged.
pub fn plan(
    p: &PlanarConfig,
    p_end: &PlanarConfig,
    catalog: &CriticalCatalog,
    opts: &PlanOptions,
) -> Result<PlanReport> {
    let n = p.n();
    if p_end.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p_end.n(),
        });
    }
    if n != catalog.n {
        return Err(Error::CatalogUnavailable {
            n,
            cap: CATALOG_N_CAP,
        });
    }
    let mut notes = Vec::new();

    // degenerate query: all three steps collapse
    if config_distance(p, p_end) < 1e-9 {
        let path = assemble(vec![vec![p.clone(), p_end.clone()]]);
        let min_margin = p.margin();
        return Ok(PlanReport {
            path: PathPolyline { min_margin, ..path },
            used_rotation: false,
            catalog_entries: None,
            notes,
        });
    }

    // step (1): retraction legs at both ends
    let leg_start = retraction_leg(p, opts.sample_step);
    let leg_end = retraction_leg(p_end, opts.sample_step);
    let centred_start = leg_start.last().expect("nonempty").clone();
    let centred_end = leg_end.last().expect("nonempty").clone();

    // step (2): flow both centred configurations down to near-critical ones
    let (flow_start, conv_a) = flow_config(&centred_start, opts)?;
    let (flow_end, conv_b) = flow_config(&centred_end, opts)?;
    if !conv_a || !conv_b {
        return Err(Error::FlowNonConvergence {
            steps: opts.max_steps,
            grad_norm: f64::NAN,
        });
    }
    let q = flow_start.last().expect("nonempty").clone();
    let q_end = flow_end.last().expect("nonempty").clone();

    // step (3): common orbit rotation, else catalog recipes
    let (theta, orbit_dist) = best_rotation(&q, &q_end);
    let mut used_rotation = false;
    let mut catalog_entries = None;
    let connect: Vec<Vec<PlanarConfig>> = if orbit_dist < opts.orbit_tol {
        used_rotation = true;
        let rot = rotation_leg(&q, theta, opts.sample_step)
            .expect("rotation legs always sample");
        // close the residual mismatch (below orbit_tol) with one short leg
        let closing = interpolate_matched(
            rot.last().expect("nonempty"),
            &q_end,
            opts.sample_step,
        )
        .ok_or_else(|| Error::CatalogMiss {
            what: "orbit closing leg collided".into(),
        })?;
        vec![rot, closing]
    } else {
        let (ia, ea) = nearest_entry(catalog, &q, opts.catalog_tol, "start")?;
        let (ib, eb) = nearest_entry(catalog, &q_end, opts.catalog_tol, "end")?;
        catalog_entries = Some((ia, ib));
        if ia == ib {
            notes.push(
                "flow terminals matched the same catalog entry beyond orbit tolerance; \
                 routing through its representative"
                    .into(),
            );
        }
        let to_entry = connect_shapes(&q, &ea.config, opts.sample_step).ok_or_else(|| {
            Error::CatalogMiss {
                what: "no audited connection from flow terminal to catalog entry".into(),
            }
        })?;
        let recipe_a = ea.recipe_to_hub.clone().ok_or_else(|| Error::CatalogMiss {
            what: format!("entry {ia} has no recipe to the hub"),
        })?;
        let recipe_b = eb.recipe_to_hub.clone().ok_or_else(|| Error::CatalogMiss {
            what: format!("entry {ib} has no recipe to the hub"),
        })?;
        let from_entry = connect_shapes(&eb.config, &q_end, opts.sample_step).ok_or_else(|| {
            Error::CatalogMiss {
                what: "no audited connection from catalog entry to flow terminal".into(),
            }
        })?;
        let mut recipe_b_rev = recipe_b;
        recipe_b_rev.reverse();
        vec![to_entry, recipe_a, recipe_b_rev, from_entry]
    };

    // assemble p -> q -> q' -> p' with the p'-side legs reversed
    let mut legs: Vec<Vec<PlanarConfig>> = vec![leg_start, flow_start];
    legs.extend(connect);
    let mut flow_end_rev = flow_end;
    flow_end_rev.reverse();
    let mut leg_end_rev = leg_end;
    leg_end_rev.reverse();
    legs.push(flow_end_rev);
    legs.push(leg_end_rev);

    let path = assemble(legs);
    Ok(PlanReport {
        path,
        used_rotation,
        catalog_entries,
        notes,
    })
}

fn nearest_entry<'a>(
    catalog: &'a CriticalCatalog,
    q: &PlanarConfig,
    tol: f64,
    which: &str,
) -> Result<(usize, &'a CatalogEntry)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in catalog.entries.iter().enumerate() {
        let d = shape_distance(&e.config, q);
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    match best {
        Some((i, d)) if d < tol => Ok((i, &catalog.entries[i])),
        Some((_, d)) => Err(Error::CatalogMiss {
            what: format!("{which} terminal is {d:.3e} from the nearest entry (tol {tol:.1e})"),
        }),
        None => Err(Error::CatalogMiss {
            what: "catalog is empty".into(),
        }),
    }
}

/// Samples rho(p, t) for t in [0, 1] at the continuity step.
fn retraction_leg(p: &PlanarConfig, step: f64) -> Vec<PlanarConfig> {
    let shift = p.barycentre().norm();
    let steps = (shift / step).ceil().max(1.0) as usize;
    (0..=steps)
        .map(|k| retract_barycentre(p, k as f64 / steps as f64))
        .collect()
}

/// Static SVG rendering of the trails, one polyline per robot.
pub fn path_svg(path: &PathPolyline) -> String {
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for s in &path.samples {
        for &[x, y] in s {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
    }
    let pad = 0.1 * ((max_x - min_x).max(max_y - min_y)).max(1.0);
    let (w, h) = (max_x - min_x + 2.0 * pad, max_y - min_y + 2.0 * pad);
    let colors = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        min_x - pad,
        min_y - pad,
        w,
        h
    );
    for robot in 0..path.n {
        let pts: Vec<String> = path
            .samples
            .iter()
            .map(|s| format!("{:.4},{:.4}", s[robot][0], s[robot][1]))
            .collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{:.4}\" points=\"{}\"/>\n",
            colors[robot % colors.len()],
            0.01 * w,
            pts.join(" ")
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
