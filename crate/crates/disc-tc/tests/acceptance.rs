//! End-to-end acceptance suite. Each test covers one contract criterion,
//! prints a PASS/FAIL line with its runtime, and enforces a time budget.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use disc_tc::config::{
    self, bound_for_config_spaces, coeffs_to_roots, disc_f_poly, disc_from_roots,
    matching_displacement, retract_barycentre, roots_to_coeffs, CoeffVector, PlanarConfig,
};
use disc_tc::planner::{self, audit_path, build_catalog, flow_config, PlanOptions, PotentialKind};
use disc_tc::{lattice, morse, torus, verify, Error, SparsePoly};

fn criterion<F: FnOnce()>(name: &str, budget: Duration, f: F) {
    let t0 = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f));
    let dt = t0.elapsed();
    let ok = result.is_ok() && dt <= budget;
    println!("{} {name} ({dt:.2?}, budget {budget:?})", if ok { "PASS" } else { "FAIL" });
    if let Err(e) = result {
        resume_unwind(e);
    }
    assert!(dt <= budget, "{name} exceeded its {budget:?} budget: {dt:?}");
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Delta = z1^2 - z2*z3.
fn cone_delta() -> SparsePoly {
    SparsePoly::from_real_terms(3, [(vec![2, 0, 0], 1.0), (vec![0, 1, 1], -1.0)]).unwrap()
}

fn z1_delta() -> SparsePoly {
    SparsePoly::from_real_terms(1, [(vec![1], 1.0)]).unwrap()
}

/// The four sampling targets: z1, the cone, and the ordered-model
/// discriminants for 3 and 4 points.
fn sweep_targets() -> Vec<SparsePoly> {
    vec![
        z1_delta(),
        cone_delta(),
        disc_f_poly(3).unwrap(),
        disc_f_poly(4).unwrap(),
    ]
}

#[test]
fn c01_homogeneisation_examples() {
    criterion("homogeneisation examples", Duration::from_secs(1), || {
        let d = cone_delta();
        let lat = lattice::homog_lattice(&d).unwrap();
        assert_eq!(lat.rank, 2);
        assert!(lat.contains(&[1, 1, 1]));
        assert!(lat.contains(&[2, 4, 0]));
        assert_eq!(lattice::is_homogeneisation(&d, &[1, 1, 1]), Some(2));
        assert_eq!(lattice::is_homogeneisation(&d, &[2, 4, 0]), Some(4));
        assert_eq!(lattice::is_homogeneisation(&d, &[1, 0, 0]), None);

        let rigid = SparsePoly::from_real_terms(
            2,
            [
                (vec![1, 0], 1.0),
                (vec![2, 0], 1.0),
                (vec![0, 2], 1.0),
                (vec![0, 3], 1.0),
            ],
        )
        .unwrap();
        assert_eq!(lattice::homog_lattice(&rigid).unwrap().rank, 0);
    });
}

#[test]
fn c02_config_space_bounds_are_2n_minus_3() {
    criterion("configuration-space bounds 2n-3", Duration::from_secs(10), || {
        for n in 2..=6usize {
            let expected = 2 * n as i64 - 3;
            let ordered = bound_for_config_spaces(n, true, 7).unwrap();
            assert_eq!((ordered.bound, ordered.t), (expected, 0), "ordered n = {n}");
            let unordered = bound_for_config_spaces(n, false, 7).unwrap();
            assert_eq!(
                (unordered.bound, unordered.t),
                (expected, 0),
                "unordered n = {n}"
            );
        }
    });
}

#[test]
fn c03_negativity_index_at_most_m() {
    criterion("negativity index of H(|1/D|^2) <= m", Duration::from_secs(30), || {
        for (k, delta) in sweep_targets().iter().enumerate() {
            let opts = verify::SweepOptions {
                samples: 1000,
                seed: 100 + k as u64,
                check_pairs: false,
                ..verify::SweepOptions::default()
            };
            let rep = verify::hessian_sweep(delta, &opts).unwrap();
            assert_eq!(rep.samples, 1000);
            assert_eq!(
                rep.negativity_violations, 0,
                "target {k}: max negative {} > m = {}",
                rep.max_negative, rep.m
            );
        }
    });
}

#[test]
fn c04_positivity_index_at_least_m_and_2m() {
    criterion("positivity index of H(g) >= m, pairs >= 2m", Duration::from_secs(60), || {
        for (k, delta) in sweep_targets().iter().enumerate() {
            let opts = verify::SweepOptions {
                samples: 1000,
                seed: 200 + k as u64,
                check_pairs: true,
                ..verify::SweepOptions::default()
            };
            let rep = verify::hessian_sweep(delta, &opts).unwrap();
            assert_eq!(rep.positivity_violations, 0, "target {k}");
            assert_eq!(rep.pair_violations, 0, "target {k}");
            assert!(rep.min_positive_g >= rep.m);
            assert!(rep.min_positive_pair.unwrap() >= 2 * rep.m);
        }
    });
}

#[test]
fn c05_derivatives_match_finite_differences() {
    criterion("gradient/Hessian finite-difference oracles", Duration::from_secs(10), || {
        for (k, delta) in sweep_targets().iter().enumerate() {
            let (points, _) =
                verify::sample_variety_points(delta, 100, 300 + k as u64, 2.0, 1e-3).unwrap();
            let h = 1e-5;
            for coords in &points {
                let dim = coords.len();
                let grad = morse::grad_g(delta, coords).unwrap();
                let gscale = grad.iter().map(|g| g * g).sum::<f64>().sqrt().max(1.0);
                for i in 0..dim {
                    let mut plus = coords.clone();
                    let mut minus = coords.clone();
                    plus[i] += h;
                    minus[i] -= h;
                    let fd = (morse::potential_g(delta, &plus).unwrap()
                        - morse::potential_g(delta, &minus).unwrap())
                        / (2.0 * h);
                    assert!(
                        (grad[i] - fd).abs() <= 1e-5 * gscale,
                        "target {k}: gradient component {i}: {} vs {fd}",
                        grad[i]
                    );
                }
                let hess = morse::hessian_g(delta, coords).unwrap();
                let hscale = hess.amax().max(1.0);
                for j in 0..dim {
                    let mut plus = coords.clone();
                    let mut minus = coords.clone();
                    plus[j] += h;
                    minus[j] -= h;
                    let gp = morse::grad_g(delta, &plus).unwrap();
                    let gm = morse::grad_g(delta, &minus).unwrap();
                    for i in 0..dim {
                        let fd = (gp[i] - gm[i]) / (2.0 * h);
                        assert!(
                            (hess[(i, j)] - fd).abs() <= 1e-5 * hscale,
                            "target {k}: Hessian entry ({i},{j})"
                        );
                    }
                }
            }
        }
    });
}

#[test]
fn c06_invariance_identities() {
    criterion("torus invariance of g and coefficient scaling", Duration::from_secs(5), || {
        // g(theta . z) = g(z) for the validated action on the cone
        let delta = cone_delta();
        let action = torus::validate_action(&delta, &[vec![1, 1, 1], vec![2, 4, 0]]).unwrap();
        let mut rng = StdRng::seed_from_u64(41);
        let mut trials = 0;
        while trials < 100 {
            let coords: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let z = morse::to_complex(&coords);
            if delta.eval(&z).unwrap().norm() < 1e-3 {
                continue;
            }
            trials += 1;
            let theta: Vec<Complex64> = (0..2)
                .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
                .collect();
            let moved = action.apply_real(&theta, &coords);
            let g0 = morse::potential_g(&delta, &coords).unwrap();
            let g1 = morse::potential_g(&delta, &moved).unwrap();
            assert!((g0 - g1).abs() <= 1e-9 * g0.abs().max(1.0));
        }

        // Delta^C(theta^2 a_2, ..., theta^n a_n) = theta^{n(n-1)} Delta^C(a)
        for n in 2..=6usize {
            for trial in 0..20 {
                let a = CoeffVector {
                    a: (0..n - 1)
                        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect(),
                };
                let Ok(roots) = coeffs_to_roots(&a) else {
                    continue;
                };
                let d0 = disc_from_roots(roots.points());
                if d0.norm() < 1e-6 {
                    continue;
                }
                let theta = Complex64::from_polar(1.0, 0.17 + 0.29 * trial as f64);
                let scaled = CoeffVector {
                    a: a.a
                        .iter()
                        .enumerate()
                        .map(|(k, &ak)| theta.powi((k + 2) as i32) * ak)
                        .collect(),
                };
                let d1 = disc_from_roots(coeffs_to_roots(&scaled).unwrap().points());
                let expected = theta.powi((n * (n - 1)) as i32) * d0;
                assert!(
                    (d1 - expected).norm() <= 1e-9 * d0.norm(),
                    "scaling identity at n = {n}"
                );
            }
        }
    });
}

#[test]
fn c07_classical_discriminant_formulas() {
    criterion("discriminant oracles for 2 and 3 points", Duration::from_secs(5), || {
        let mut rng = StdRng::seed_from_u64(55);
        // 2 points: disc(w^2 + c) = -4c with c = a_2
        for _ in 0..100 {
            let w = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            if w.norm() < 0.05 {
                continue;
            }
            let cfg = PlanarConfig::new(vec![w, -w], false).unwrap();
            let a = roots_to_coeffs(&cfg).unwrap();
            let d = disc_from_roots(cfg.points());
            let expected = -4.0 * a.a[0];
            assert!((d - expected).norm() <= 1e-9 * expected.norm().max(1.0));
        }
        // 3 points: disc(w^3 + p w + q) = -4p^3 - 27q^2 with p = a_2, q = -a_3
        for _ in 0..100 {
            let mut pts: Vec<Complex64> = (0..3)
                .map(|_| c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                .collect();
            let mean = pts.iter().sum::<Complex64>() / 3.0;
            for w in pts.iter_mut() {
                *w -= mean;
            }
            let Ok(cfg) = PlanarConfig::new(pts, false) else {
                continue;
            };
            if cfg.margin() < 0.05 {
                continue;
            }
            let a = roots_to_coeffs(&cfg).unwrap();
            let (p, q) = (a.a[0], -a.a[1]);
            let expected = -4.0 * p * p * p - 27.0 * q * q;
            let d = disc_from_roots(cfg.points());
            assert!((d - expected).norm() <= 1e-9 * expected.norm().max(1.0));
        }
    });
}

#[test]
fn c08_roots_coefficients_roundtrip() {
    criterion("roots <-> coefficients roundtrip", Duration::from_secs(10), || {
        let mut rng = StdRng::seed_from_u64(77);
        for n in 2..=8usize {
            let mut done = 0;
            while done < 100 {
                let mut pts: Vec<Complex64> = (0..n)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let mean = pts.iter().sum::<Complex64>() / n as f64;
                for w in pts.iter_mut() {
                    *w -= mean;
                }
                let Ok(cfg) = PlanarConfig::new(pts, false) else {
                    continue;
                };
                if cfg.margin() < 0.1 {
                    continue;
                }
                done += 1;
                let back = coeffs_to_roots(&roots_to_coeffs(&cfg).unwrap()).unwrap();
                let err = matching_displacement(cfg.points(), back.points());
                assert!(err < 1e-8, "roundtrip error {err:.3e} at n = {n}");
            }
        }
    });
}

#[test]
fn c09_flow_terminates_on_critical_circle() {
    criterion("gradient flow reaches the unit circle", Duration::from_secs(1), || {
        let delta = z1_delta();
        let start = [2.0, 0.0, 2.0, 0.0];
        let trace = morse::gradient_flow(&delta, &start, &morse::FlowOptions::default()).unwrap();
        assert!(trace.converged);
        for slot in trace.terminal.chunks_exact(2) {
            let r = (slot[0] * slot[0] + slot[1] * slot[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-6, "terminal radius {r}");
        }
    });
}

fn random_config(n: usize, rng: &mut StdRng) -> PlanarConfig {
    loop {
        let offset = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let pts: Vec<Complex64> = (0..n)
            .map(|_| offset + c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
            .collect();
        if let Ok(cfg) = PlanarConfig::new(pts, false) {
            if cfg.margin() > 0.3 {
                return cfg;
            }
        }
    }
}

#[test]
fn c10_planner_paths_audited() {
    criterion("planner paths collision-free and equivariant", Duration::from_secs(300), || {
        let opts = PlanOptions::default();
        for n in 2..=4usize {
            let catalog = build_catalog(n, 64, PotentialKind::G, 1000 + n as u64).unwrap();
            let mut rng = StdRng::seed_from_u64(500 + n as u64);
            let mut planned = 0usize;
            let mut misses = 0usize;
            for _ in 0..100 {
                let p = random_config(n, &mut rng);
                let q = random_config(n, &mut rng);
                let report = match planner::plan(&p, &q, &catalog, &opts) {
                    Ok(r) => r,
                    Err(Error::CatalogMiss { .. }) | Err(Error::FlowNonConvergence { .. }) => {
                        misses += 1;
                        continue;
                    }
                    Err(e) => panic!("unexpected planning failure at n = {n}: {e}"),
                };
                planned += 1;
                // collision-free under the 10x re-sampling audit
                let audited = audit_path(&report.path, 10);
                assert!(audited > 1e-9, "n = {n}: audited margin {audited:.3e}");
                assert!(report.path.min_margin > 1e-9);
                // endpoints match the query configurations
                let first: Vec<Complex64> = report.path.samples[0]
                    .iter()
                    .map(|&[re, im]| c(re, im))
                    .collect();
                let last: Vec<Complex64> = report.path.samples.last().unwrap()
                    .iter()
                    .map(|&[re, im]| c(re, im))
                    .collect();
                assert!(matching_displacement(&first, p.points()) < 1e-6);
                assert!(matching_displacement(&last, q.points()) < 1e-6);
            }
            println!(
                "  planner n = {n}: {planned} paths, {misses} connection misses (reported)"
            );
            assert!(planned > 0, "n = {n}: every query missed");
            if n == 2 {
                assert_eq!(misses, 0, "2-point terminals always share one orbit");
            }

            // equivariance of retraction + flow under a common rotation
            for trial in 0..10 {
                let p = random_config(n, &mut rng);
                let theta = Complex64::from_polar(1.0, 0.3 + 0.55 * trial as f64);
                let centred = retract_barycentre(&p, 1.0);
                let (flow_a, conv_a) = flow_config(&centred, &opts).unwrap();
                let (flow_b, conv_b) =
                    flow_config(&retract_barycentre(&p.rotate(theta), 1.0), &opts).unwrap();
                assert!(conv_a && conv_b);
                // near the terminal the Armijo decrease sits at float-noise
                // level, so the two runs may disagree by a few trailing
                // micro-steps; those must stay within tolerance of the other
                // run's terminal
                let common = flow_a.len().min(flow_b.len());
                for (sa, sb) in flow_a.iter().zip(flow_b.iter()).take(common) {
                    let rotated: Vec<Complex64> =
                        sa.points().iter().map(|w| theta * w).collect();
                    assert!(
                        matching_displacement(&rotated, sb.points()) < 1e-6,
                        "flow sample drifted under rotation at n = {n}"
                    );
                }
                let term_a: Vec<Complex64> = flow_a
                    .last()
                    .unwrap()
                    .points()
                    .iter()
                    .map(|w| theta * w)
                    .collect();
                let term_b = flow_b.last().unwrap().points();
                for s in flow_a.iter().skip(common) {
                    let rotated: Vec<Complex64> = s.points().iter().map(|w| theta * w).collect();
                    assert!(matching_displacement(&rotated, term_b) < 1e-6);
                }
                for s in flow_b.iter().skip(common) {
                    assert!(matching_displacement(s.points(), &term_a) < 1e-6);
                }
            }
        }
    });
}

// the expansion cap and the catalog cap are reported, not silently truncated
#[test]
fn caps_are_loud() {
    assert!(matches!(
        disc_f_poly(7),
        Err(Error::ExpansionCapExceeded { .. })
    ));
    assert!(matches!(
        build_catalog(5, 4, PotentialKind::G, 0),
        Err(Error::CatalogUnavailable { .. })
    ));
    assert!(matches!(
        config::bound_for_config_spaces(1, true, 0),
        Err(Error::Parse(_))
    ));
}
