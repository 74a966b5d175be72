//! Cross-module checks that combine the generators with the core pipeline:
//! heat decay at the natural time scale, cube counts for the cosine family,
//! sine-series root counts and the smoothed-point-mass scalings.

use std::f64::consts::PI;

use nodal_core::diagnostics::{classify_cubes, natural_time, proof_faithful_cn, snap_delta};
use nodal_core::nodal::sign_changes;
use nodal_core::spectral::eigenvalue_of;
use nodal_core::{Field, FrequencyScaleOptions, TorusGrid};
use nodal_harness::gen::{gen_dirac_field, gen_highpass, gen_sine_highpass};

#[test]
fn natural_time_gives_l1_decay_bound() {
    // ‖e^{tΔ}f‖₁ ≤ c‖f‖₁ + e^{-λt}‖f‖₂ at t = (1/λ)·ln(e/‖f‖₁)
    let grid = TorusGrid::line(1024).unwrap();
    let c = 0.01;
    for seed in 0..20 {
        let f = gen_highpass(seed, 6, 20, grid).unwrap();
        let l1 = f.norm_l1();
        let scale = f.frequency_scale(FrequencyScaleOptions::with_c(c)).unwrap();
        let t = natural_time(scale.lambda, l1, 1.0).unwrap();
        let evolved_l1 = f.heat_evolve(t).unwrap().norm_l1();
        let bound = c * l1 + (-scale.lambda * t).exp() * f.norm_l2();
        assert!(
            evolved_l1 <= bound * (1.0 + 1e-9),
            "seed {seed}: {evolved_l1} > {bound}"
        );
    }
}

#[test]
fn cosine_family_dense_cube_count_is_stable() {
    // with δ = √t at the natural time scale (multiplier large enough that
    // every cube decays), the snapped cube side divides the |cos| period,
    // every cube carries the global mean and β·‖f‖₁ = #B·δ² = 1 exactly;
    // β itself drifts only through the coarse |cos| quadrature at high k
    let grid = TorusGrid::square(256).unwrap();
    let cn = proof_faithful_cn(2);
    let mut betas = Vec::new();
    for k in [8u64, 16, 32] {
        let f = Field::cosine(grid, [k as i64, 0], 1.0);
        let lambda = eigenvalue_of(k * k);
        let l1 = f.norm_l1();
        let t = natural_time(lambda, l1, 12.0).unwrap();
        let delta = snap_delta(grid, t.sqrt());
        let part = classify_cubes(&f, t, delta, cn).unwrap();
        assert_eq!(part.count_c, 0, "k={k}: undamped cubes");
        assert_eq!(part.count_b, part.cubes.len(), "k={k}: sparse cubes");
        let beta = part.beta();
        assert!(
            (beta * l1 - 1.0).abs() < 1e-12,
            "k={k}: beta·l1 = {}",
            beta * l1
        );
        assert!(
            (beta - PI / 2.0).abs() < 0.06 * PI / 2.0,
            "k={k}: beta {beta}"
        );
        betas.push(beta);
    }
    let spread = betas.iter().cloned().fold(0.0f64, f64::max)
        / betas.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 2.0, "betas {betas:?}");
}

#[test]
fn sine_series_root_count_reaches_twice_lowest_frequency() {
    let grid = TorusGrid::line(8192).unwrap();
    for k_min in [4u32, 8, 16] {
        for seed in 0..100 {
            let f = gen_sine_highpass(seed, k_min, 2 * k_min + 8, grid).unwrap();
            let roots = sign_changes(&f).unwrap().measure as u32;
            assert!(
                roots >= 2 * k_min,
                "k_min={k_min} seed={seed}: {roots} roots"
            );
        }
    }
}

#[test]
fn mean_free_highpass_has_roots() {
    // orthogonality to constants alone already forces sign changes
    let grid = TorusGrid::line(1024).unwrap();
    for seed in 0..20 {
        let f = gen_highpass(seed, 0, 12, grid).unwrap();
        assert!(sign_changes(&f).unwrap().measure >= 2.0);
    }
}

#[test]
fn dirac_sup_norm_tracks_lattice_gaussian_prediction() {
    // at fixed n the sup norm follows (4πt)^{-1}·(1 + neighbor tails) − n;
    // jitter moves the neighbor tails, so the tolerance widens with r
    let grid = TorusGrid::square(512).unwrap();
    let n_points = 64u32;
    for (r, tol) in [(0.05, 0.05), (0.1, 0.10), (0.2, 0.30)] {
        for seed in 0..3 {
            let df = gen_dirac_field(n_points, r, seed, grid).unwrap();
            let free_peak = (4.0 * PI * df.t).recip() - n_points as f64;
            let linf = df.field.norm_linf();
            assert!(
                (linf - free_peak).abs() <= tol * free_peak,
                "r={r} seed={seed}: linf={linf} prediction={free_peak}"
            );
        }
    }
}

#[test]
fn dirac_sup_norm_slope_in_asymptotic_regime() {
    // log-log slope of ‖f‖_∞ against r over {0.02, 0.04, 0.08}: the bump
    // height dominates the -n baseline there and the slope is -2 ± 0.15
    let grid = TorusGrid::square(512).unwrap();
    for seed in 0..3 {
        let mut pts = Vec::new();
        for r in [0.02, 0.04, 0.08] {
            let df = gen_dirac_field(64, r, seed, grid).unwrap();
            pts.push((r.ln(), df.field.norm_linf().ln()));
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let slope = cov / var;
        assert!(
            (-2.15..=-1.85).contains(&slope),
            "seed {seed}: slope {slope}"
        );
    }
}

#[test]
fn highpass_frequency_scale_matches_cutoff() {
    let grid = TorusGrid::line(1024).unwrap();
    let f = gen_highpass(42, 5, 18, grid).unwrap();
    let r = f
        .frequency_scale(FrequencyScaleOptions::with_c(0.01))
        .unwrap();
    assert!(r.lambda >= eigenvalue_of(36));
    assert_eq!(r.first_failing_eigenvalue, Some(r.lambda));
}
