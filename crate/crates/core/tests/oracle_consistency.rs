mod common;

use common::*;
use concordia_core::measures::{self, all_measures, concordance_q, MEASURE_NAMES};
use concordia_core::oracle::{cb_measures, checkerboard_of, mc_measures};
use concordia_core::synthesis::{c_b, d_b, l_ab};
use concordia_core::{CopulaExpr, Scalar};
use rand::Rng;

fn cb(e: &CopulaExpr, n: usize) -> concordia_core::MeasureVector {
    cb_measures(&checkerboard_of(e, n).unwrap())
}

fn close(x: &Scalar, y: &Scalar, tol: f64) -> bool {
    (x.to_f64() - y.to_f64()).abs() <= tol
}

#[test]
fn q_against_checkerboard_mixture() {
    // τ(½X + ½Y) = (τ(X) + τ(Y))/4 + Q(X, Y)/2
    let (x, y) = (c_b(&r(1, 8)).unwrap(), d_b(&r(1, 4)).unwrap());
    let q = concordance_q(&x, &y).unwrap();
    let mix = CopulaExpr::convex(vec![(r(1, 2), x.clone()), (r(1, 2), y.clone())]).unwrap();
    let (tx, ty, tm) = (cb(&x, 1024).tau.to_f64(), cb(&y, 1024).tau.to_f64(), cb(&mix, 1024).tau.to_f64());
    let estimate = 2.0 * tm - (tx + ty) / 2.0;
    assert!((q.to_f64() - estimate).abs() <= 5e-3, "{q} vs {estimate}");
}

#[test]
fn gamma_middle_case_against_checkerboard() {
    let e = CopulaExpr::ordinal(vec![(r(1, 10), r(3, 5), CopulaExpr::w())]).unwrap();
    let exact = measures::gamma(&e).unwrap();
    assert!(close(&exact, &cb(&e, 1024).gamma, 5e-3), "{exact}");
}

#[test]
fn rho_of_c_quarter_against_checkerboard() {
    let e = c_b(&r(1, 4)).unwrap();
    assert!(close(&measures::rho(&e).unwrap(), &cb(&e, 1024).rho, 5e-3));
}

#[test]
fn xi_of_shuffle_approached_monotonically() {
    let e = c_b(&r(1, 8)).unwrap();
    assert_eq!(measures::xi(&e).unwrap(), Scalar::one());
    let seq: Vec<f64> = [64, 128, 256].iter().map(|n| cb(&e, *n).xi.to_f64()).collect();
    assert!(seq[0] < seq[1] && seq[1] < seq[2] && seq[2] < 1.0, "{seq:?}");
}

/// Mass of cell `(i, j)` from the support segments: the length of
/// `{u ∈ cell i : h(u) ∈ cell j}` summed over pieces.
#[test]
fn checkerboard_matches_segment_rasterization() {
    let e = c_b(&r(1, 4)).unwrap();
    let n = 8;
    let board = checkerboard_of(&e, n).unwrap();
    let sh = e.as_shuffle().unwrap();
    for i in 0..n {
        for j in 0..n {
            let (x0, x1, y0, y1) = (i as f64 / 8.0, (i + 1) as f64 / 8.0, j as f64 / 8.0, (j + 1) as f64 / 8.0);
            let mut mass = 0.0;
            for p in sh.pieces() {
                let ((u0, v0), (u1, v1)) = p.endpoints();
                let (u0, u1, v0, v1) = (u0.to_f64(), u1.to_f64(), v0.to_f64(), v1.to_f64());
                // v = v0 + slope (u − u0) with slope ±1
                let slope = if v1 >= v0 { 1.0 } else { -1.0 };
                let (ya, yb) = ((y0 - v0) * slope + u0, (y1 - v0) * slope + u0);
                let lo = x0.max(u0).max(ya.min(yb));
                let hi = x1.min(u1).min(ya.max(yb));
                mass += (hi - lo).max(0.0);
            }
            assert!((board.mass(i, j) - mass).abs() < 1e-12, "cell ({i}, {j}): {} vs {mass}", board.mass(i, j));
        }
    }
    for k in 0..n {
        let row: f64 = (0..n).map(|j| board.mass(k, j)).sum();
        assert!((row - 0.125).abs() < 1e-12);
    }
}

#[test]
fn mc_examples() {
    let pi = mc_measures(&CopulaExpr::pi(), 1_000_000, 42).unwrap();
    assert!(pi.tau.within(0.0, 4.0), "{:?}", pi.tau);
    let m = mc_measures(&CopulaExpr::m(), 100_000, 1).unwrap();
    assert!((m.phi.value - 1.0).abs() <= 4.0 * m.phi.stderr + 1e-12);
    let l = mc_measures(&l_ab(&r(1, 8), &r(1, 4)).unwrap(), 1_000_000, 7).unwrap();
    assert!(l.tau.within(-0.25, 4.0), "{:?}", l.tau);
}

#[test]
fn mc_is_bit_reproducible() {
    let e = c_b(&r(1, 8)).unwrap();
    assert_eq!(mc_measures(&e, 50_000, 3).unwrap(), mc_measures(&e, 50_000, 3).unwrap());
}

/// Every closed form against the checkerboard at n = 1024, with the error
/// decreasing like 1/n.
#[test]
fn random_shuffles_against_checkerboard() {
    let mut g = rng(21);
    for _ in 0..50 {
        let e = random_shuffle(&mut g, 6);
        let exact = all_measures(&e).to_f64();
        let fine = cb(&e, 1024).to_f64();
        let coarse = cb(&e, 512).to_f64();
        let err = |v: &[f64; 6]| v.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        for (k, name) in MEASURE_NAMES.iter().enumerate() {
            if *name == "xi" {
                // the board smears each off-grid piece over two cells per
                // column, so 1 − ξ is c/n with c up to about 5.5
                assert!(fine[k] <= 1.0 && 1024.0 * (1.0 - fine[k]) <= 8.0, "xi: {}", fine[k]);
            } else {
                assert!((fine[k] - exact[k]).abs() <= 5e-3, "{name}: {} vs {}", fine[k], exact[k]);
            }
        }
        // off-grid splits make the per-doubling ratio erratic (0.25 to 0.7
        // observed), so the rate is checked as a bound on n · error
        let (e512, e1024) = (err(&coarse), err(&fine));
        assert!(e1024 < e512 || e512 < 1e-12, "{e512} then {e1024} for {}", e.to_json_string());
        assert!(512.0 * e512 <= 8.0 && 1024.0 * e1024 <= 8.0, "{e512}, {e1024}");
    }
}

/// Closed forms against Monte Carlo; ξ is left out because the rank
/// estimator is biased by O(pieces / samples) on graph-supported copulas.
#[test]
fn nested_constructions_against_monte_carlo() {
    let mut g = rng(22);
    for k in 0..6 {
        let e = random_nested(&mut g, 2);
        let exact = all_measures(&e);
        let mc = mc_measures(&e, 1_000_000, 100 + k).unwrap();
        for name in ["rho", "tau", "phi", "gamma", "beta"] {
            let est = mc.get(name).unwrap();
            let want = exact.get(name).unwrap().to_f64();
            assert!(
                est.within(want, 4.0) || (est.value - want).abs() < 1e-9,
                "{name}: {est:?} vs {want} for {}",
                e.to_json_string()
            );
        }
    }
}

/// Rejection sampling in the bounding box, with the half-spaces evaluated
/// independently of the region module.
#[test]
fn volume_by_rejection_sampling() {
    let mut g = rng(23);
    let total = 10_000_000u64;
    let mut hits = 0u64;
    for _ in 0..total {
        let (phi, gamma, tau) = (g.random_range(-0.5..1.0), g.random_range(-1.0..1.0), g.random_range(-1.0..1.0));
        if inequality_slacks(phi, gamma, tau)[9..].iter().all(|(_, s)| *s >= 0.0) {
            hits += 1;
        }
    }
    let p = hits as f64 / total as f64;
    let volume = 6.0 * p;
    let stderr = 6.0 * (p * (1.0 - p) / total as f64).sqrt();
    assert!((volume - 3.0 / 16.0).abs() <= 4.0 * stderr, "{volume} ± {stderr}");
}
