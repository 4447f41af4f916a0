#![allow(dead_code)]

use std::collections::BTreeSet;

use concordia_core::region::{contains, RegionPoint};
use concordia_core::{Axis, CopulaExpr, Scalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn r(p: i64, q: i64) -> Scalar {
    Scalar::ratio(p, q)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k` distinct sorted multiples of `1/den` strictly inside `(0, 1)`.
fn grid_points(rng: &mut impl Rng, k: usize, den: i64) -> Vec<Scalar> {
    let mut pts = BTreeSet::new();
    while pts.len() < k {
        pts.insert(rng.random_range(1..den));
    }
    pts.into_iter().map(|p| r(p, den)).collect()
}

/// Shuffle of M with up to `max_pieces` pieces on a grid of step 1/720.
pub fn random_shuffle(rng: &mut impl Rng, max_pieces: usize) -> CopulaExpr {
    let n = rng.random_range(1..=max_pieces);
    let splits = grid_points(rng, n - 1, 720);
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    let flips = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    CopulaExpr::shuffle(splits, perm, flips).expect("valid random shuffle")
}

pub fn random_base(rng: &mut impl Rng) -> CopulaExpr {
    match rng.random_range(0..3) {
        0 => CopulaExpr::m(),
        1 => CopulaExpr::w(),
        _ => CopulaExpr::pi(),
    }
}

fn random_axis(rng: &mut impl Rng) -> Axis {
    if rng.random_bool(0.5) {
        Axis::First
    } else {
        Axis::Second
    }
}

/// Ordinal sum with 1 to 3 blocks whose summands come from `summand`.
pub fn random_ordinal<R: Rng>(rng: &mut R, summand: &mut dyn FnMut(&mut R) -> CopulaExpr) -> CopulaExpr {
    let k = rng.random_range(1..=3);
    let ends = grid_points(rng, 2 * k, 48);
    let blocks = ends.chunks(2).map(|p| (p[0].clone(), p[1].clone(), summand(rng))).collect();
    CopulaExpr::ordinal(blocks).expect("disjoint blocks")
}

/// Single block `[a, 1 − a]` around the centre, the straddling case.
pub fn random_centered<R: Rng>(rng: &mut R, summand: CopulaExpr) -> CopulaExpr {
    let a = r(rng.random_range(0..24), 48);
    concordia_core::synthesis::nest_middle(&a, summand).expect("a < 1/2")
}

/// Nested ordinal sums and reflections over shuffles, `Π`, `M`, `W`.
/// No mixtures, so every measure has a leaf-level recomputation.
pub fn random_nested(rng: &mut ChaCha8Rng, depth: usize) -> CopulaExpr {
    let pick = if depth == 0 { rng.random_range(0..2) } else { rng.random_range(0..5) };
    match pick {
        0 => random_base(rng),
        1 => random_shuffle(rng, 6),
        2 => random_ordinal(rng, &mut |g| random_nested(g, depth - 1)),
        3 => {
            let inner = random_nested(rng, depth - 1);
            random_centered(rng, inner)
        }
        _ => random_nested(rng, depth - 1).reflect(random_axis(rng)),
    }
}

/// Convex combination of 2 or 3 parts with exact weights.
pub fn random_mixture(rng: &mut ChaCha8Rng, part: &mut dyn FnMut(&mut ChaCha8Rng) -> CopulaExpr) -> CopulaExpr {
    let k = rng.random_range(2..=3);
    let raw: Vec<i64> = (0..k).map(|_| rng.random_range(1..=12)).collect();
    let total: i64 = raw.iter().sum();
    let parts = raw.iter().map(|w| (r(*w, total), part(rng))).collect();
    CopulaExpr::convex(parts).expect("weights sum to one")
}

/// Any expression, mixtures included.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> CopulaExpr {
    if depth > 0 && rng.random_range(0..4) == 0 {
        return random_mixture(rng, &mut |g| random_expr(g, depth - 1));
    }
    random_nested(rng, depth)
}

/// Rejection sample from the bounding box, as an exact dyadic point.
pub fn random_region_point(rng: &mut impl Rng) -> RegionPoint {
    loop {
        let p = RegionPoint::from_f64(
            rng.random_range(-0.5..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        )
        .exact();
        if contains(&p, 0.0).violated.is_empty() {
            return p;
        }
    }
}

/// The three pairwise inequality chains and the seven half-spaces, as
/// slacks that must be nonnegative.
pub fn inequality_slacks(phi: f64, gamma: f64, tau: f64) -> Vec<(&'static str, f64)> {
    vec![
        ("4φ/3 − 1/3 ≤ γ", gamma - (4.0 * phi / 3.0 - 1.0 / 3.0)),
        ("γ ≤ 4φ/3 + 1/6", 4.0 * phi / 3.0 + 1.0 / 6.0 - gamma),
        ("γ ≤ 2φ/3 + 1/3", 2.0 * phi / 3.0 + 1.0 / 3.0 - gamma),
        ("4φ/3 − 1/3 ≤ τ", tau - (4.0 * phi / 3.0 - 1.0 / 3.0)),
        ("τ ≤ 2φ/3 + 1/3", 2.0 * phi / 3.0 + 1.0 / 3.0 - tau),
        ("2γ/3 − 1/3 ≤ τ", tau - (2.0 * gamma / 3.0 - 1.0 / 3.0)),
        ("2γ − 1 ≤ τ", tau - (2.0 * gamma - 1.0)),
        ("τ ≤ 2γ/3 + 1/3", 2.0 * gamma / 3.0 + 1.0 / 3.0 - tau),
        ("τ ≤ 2γ + 1", 2.0 * gamma + 1.0 - tau),
        ("−2φ ≤ 1", 1.0 + 2.0 * phi),
        ("−2φ + 3γ − 3τ ≤ 1", 1.0 + 2.0 * phi - 3.0 * gamma + 3.0 * tau),
        ("4φ − 6γ + 3τ ≤ 1", 1.0 - 4.0 * phi + 6.0 * gamma - 3.0 * tau),
        ("4φ − 3τ ≤ 1", 1.0 - 4.0 * phi + 3.0 * tau),
        ("−8φ + 6γ ≤ 1", 1.0 + 8.0 * phi - 6.0 * gamma),
        ("−2φ + 3τ ≤ 1", 1.0 + 2.0 * phi - 3.0 * tau),
        ("−2φ + 3γ ≤ 1", 1.0 + 2.0 * phi - 3.0 * gamma),
    ]
}
