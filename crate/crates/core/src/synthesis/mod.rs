//! Explicit copulas attaining prescribed points of the region.
//!
//! Boundary points come from closed-form inversions of the face families.
//! In `s = (1 − 2a)²` and `q = s b²` the nested families are affine:
//!
//! ```text
//! A_{a,b}:  φ = 12q − 3s/2 + 1,   γ = 16q − 3s/2 + 1,   τ = 8q − s + 1
//! F_{a,b}:  φ = −3q + 3s/2 − 1/2, γ = −2q + 2s − 1,     τ = −4q + 2s − 1
//! H_{a,b}:  φ = 1 − 3s/4,         γ = 1 − s/2,          τ = 8q − s + 1
//! ```
//!
//! so `(s, q)` is a linear solve and `a = (1 − √s)/2`, `b = √(q/s)`.
//! `L_{a,b}` depends on `d = b − a` and `b` through `φ = 12d² − ½` and
//! `τ = 16d² − 8b²`. The three remaining faces are reached through the
//! σ₂-reflection, which acts on `(φ, γ, τ)` as the involution `𝒜`.
//!
//! Interior points follow the vertical segment through `(φ, γ)`: the lower
//! and upper endpoints are attained on the faces realizing the τ bounds and
//! mixed with the weight that solves the quadratic
//! `τ(t) = t²τ₁ + (1−t)²τ₀ + 2t(1−t)Q(C₀, C₁)`. φ and γ are linear in the
//! copula, so the mixture keeps them fixed.

mod families;

use serde::{Deserialize, Serialize};

pub use families::{
    a_ab, c_b, d_b, f_ab, g_b, h_ab, l_ab, make_family, nest_middle, FamilyId, FamilyParams,
};

use crate::copula::{Axis, CopulaExpr};
use crate::error::{Error, Result};
use crate::measures::{all_measures, concordance_q, MeasureVector};
use crate::region::{classify, contains, involution_a, tau_bound_faces, tau_bounds_with_tol, FaceId, RegionPoint, DEFAULT_TOL};
use crate::scalar::Scalar;

/// How far an inverted parameter may leave its domain before clamping is
/// treated as a bug rather than rounding.
pub const PARAM_SLACK: f64 = 1e-9;
/// Largest residual accepted from a construction.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub target: RegionPoint,
    pub achieved: MeasureVector,
    /// Largest coordinate error in `(φ, γ, τ)`.
    pub residual: Scalar,
    pub recipe: String,
    pub expr: CopulaExpr,
}

/// Tolerance used when none is given: zero for exact targets.
pub fn default_tol(target: &RegionPoint) -> f64 {
    if target.is_exact() {
        0.0
    } else {
        DEFAULT_TOL
    }
}

/// A copula attaining a point on the given face.
pub fn attain_face(face: FaceId, target: &RegionPoint) -> Result<SynthesisResult> {
    attain_face_with_tol(face, target, default_tol(target))
}

pub fn attain_face_with_tol(face: FaceId, target: &RegionPoint, tol: f64) -> Result<SynthesisResult> {
    let on_face = match classify(target, tol) {
        Ok(c) if c.active.contains(&face) => Ok(()),
        Ok(c) => Err(format!("{} has {} = {}", target, face.constraint(), face.lhs(target))
            + if c.active.is_empty() { " (interior point)" } else { "" }),
        Err(e) => Err(e.to_string()),
    };
    on_face.map_err(|detail| Error::OutOfFace { face: face.to_string(), detail })?;
    let (expr, recipe) = build_face(face, target)?;
    finish(target, expr, recipe)
}

/// A copula attaining any point of the region.
pub fn attain(target: &RegionPoint) -> Result<SynthesisResult> {
    attain_with_tol(target, default_tol(target))
}

pub fn attain_with_tol(target: &RegionPoint, tol: f64) -> Result<SynthesisResult> {
    if let Some(v) = contains(target, tol).violated.first() {
        return Err(Error::OutOfRegion { constraint: v.constraint.clone() });
    }
    let (phi, gamma, tau) = (&target.phi, &target.gamma, &target.tau);
    let (tau0, tau1) = tau_bounds_with_tol(phi, gamma, tol)?;
    let (face0, face1) = tau_bound_faces(phi, gamma);
    let lower = RegionPoint::new(phi.clone(), gamma.clone(), tau0.clone());
    let upper = RegionPoint::new(phi.clone(), gamma.clone(), tau1.clone());
    if *tau <= tau0 || tau0 == tau1 {
        let (expr, recipe) = build_face(face0, &lower)?;
        return finish(target, expr, recipe);
    }
    if *tau >= tau1 {
        let (expr, recipe) = build_face(face1, &upper)?;
        return finish(target, expr, recipe);
    }
    let (c0, recipe0) = build_face(face0, &lower)?;
    let (c1, recipe1) = build_face(face1, &upper)?;
    let t = mixing_weight(&c0, &c1, tau)?;
    let expr = CopulaExpr::convex(vec![(t.clone(), c1), (Scalar::one() - &t, c0)])?;
    finish(target, expr, format!("{recipe1} ⊕ t={t} ⊗ {recipe0}"))
}

/// Smallest `t ∈ [0, 1]` with `τ(t C₁ + (1 − t) C₀) = τ`.
fn mixing_weight(c0: &CopulaExpr, c1: &CopulaExpr, tau: &Scalar) -> Result<Scalar> {
    let tau0 = crate::measures::tau(c0)?;
    let tau1 = crate::measures::tau(c1)?;
    let q = concordance_q(c0, c1)?;
    let two = Scalar::int(2);
    // τ(t) − τ = A t² + B t + C
    let qa = &tau0 + &tau1 - &two * &q;
    let qb = &two * (&q - &tau0);
    let qc = &tau0 - tau;
    let unit = |t: &Scalar| {
        let slack = Scalar::float(1e-12);
        (-&slack <= *t && *t <= Scalar::one() + &slack).then(|| t.clamp_unit())
    };
    let roots = quadratic_roots(&qa, &qb, &qc);
    if let Some(t) = roots.iter().filter_map(unit).min_by(|x, y| x.partial_cmp(y).expect("finite")) {
        return Ok(t);
    }
    bisect(qa.to_f64(), qb.to_f64(), qc.to_f64()).map(Scalar::float)
}

/// Real roots of `a t² + b t + c`, in the cancellation-free form.
fn quadratic_roots(a: &Scalar, b: &Scalar, c: &Scalar) -> Vec<Scalar> {
    let tiny = |x: &Scalar| if x.is_exact() { x.is_zero() } else { x.to_f64().abs() < 1e-15 };
    if tiny(a) {
        return if b.is_zero() { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - Scalar::int(4) * a * c;
    let disc = if disc < Scalar::zero() && !disc.is_exact() && disc.to_f64() > -1e-14 {
        Scalar::zero()
    } else {
        disc
    };
    if disc < Scalar::zero() {
        return Vec::new();
    }
    let root = disc.sqrt();
    let signed = if *b < Scalar::zero() { -&root } else { root };
    let half_sum = -(b + &signed) / Scalar::int(2);
    let mut out = vec![&half_sum / a];
    if !half_sum.is_zero() {
        out.push(c / &half_sum);
    }
    out
}

/// Root of the mixing quadratic by bisection; the endpoint values bracket
/// zero whenever the target lies between the τ bounds.
fn bisect(a: f64, b: f64, c: f64) -> Result<f64> {
    let f = |t: f64| (a * t + b) * t + c;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return Err(Error::Internal(format!("mixing quadratic has no root in [0, 1]: {a}t² + {b}t + {c}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn finish(target: &RegionPoint, expr: CopulaExpr, recipe: String) -> Result<SynthesisResult> {
    let expr = tidy(expr, target.is_exact());
    let achieved = all_measures(&expr);
    let got = RegionPoint::new(achieved.phi.clone(), achieved.gamma.clone(), achieved.tau.clone());
    let residual = got.max_abs_diff(target);
    if residual.to_f64() > RESIDUAL_LIMIT {
        return Err(Error::Internal(format!("construction {recipe} reaches {got}, not {target}")));
    }
    Ok(SynthesisResult { target: target.clone(), achieved, residual, recipe, expr })
}

/// Graph copulas, mixture parts included, are rendered in shuffle normal
/// form with a single piece as `M` or `W`. Anything not fully rational
/// becomes all-float.
fn tidy(expr: CopulaExpr, exact: bool) -> CopulaExpr {
    let expr = match &expr {
        CopulaExpr::Convex(mix) => {
            let parts = mix.parts().iter().map(|p| (p.weight().clone(), tidy(p.expr().clone(), true))).collect();
            CopulaExpr::convex(parts).expect("weights are unchanged")
        }
        _ => expr.simplified(),
    };
    if exact && expr.is_exact() {
        expr
    } else {
        expr.to_float()
    }
}

/// Construction for a point assumed to lie on `face`.
fn build_face(face: FaceId, p: &RegionPoint) -> Result<(CopulaExpr, String)> {
    let r = Scalar::ratio;
    let (phi, gamma, tau) = (&p.phi, &p.gamma, &p.tau);
    let label = |sym: &str, a: &Scalar, b: &Scalar| format!("{face}:{sym}(a={a},b={b})");
    match face {
        FaceId::F6 => {
            let s = r(2, 3) * (Scalar::int(3) * gamma - Scalar::int(4) * phi + Scalar::one());
            let q = (gamma - phi) / Scalar::int(4);
            let (a, b) = nested_params(&s, &q, &r(1, 4))?;
            Ok((a_ab(&a, &b)?, label("A", &a, &b)))
        }
        FaceId::F4 => {
            let s = (Scalar::int(3) * gamma - Scalar::int(2) * phi + Scalar::int(2)) / Scalar::int(3);
            let q = (r(3, 2) * &s - Scalar::half() - phi) / Scalar::int(3);
            let (a, b) = nested_params(&s, &q, &Scalar::half())?;
            Ok((f_ab(&a, &b)?, label("F", &a, &b)))
        }
        FaceId::F7 => {
            let s = r(4, 3) * (Scalar::one() - phi);
            let q = (tau - Scalar::one() + &s) / Scalar::int(8);
            let (a, b) = nested_params(&s, &q, &r(1, 4))?;
            Ok((h_ab(&a, &b)?, label("H", &a, &b)))
        }
        FaceId::F5 if tau >= gamma => {
            let (a, b) = l_params(phi, tau)?;
            Ok((l_ab(&a, &b)?, label("L", &a, &b)))
        }
        FaceId::F5 => {
            let mirrored = involution_a(p);
            let (a, b) = l_params(&mirrored.phi, &mirrored.tau)?;
            Ok((l_ab(&a, &b)?.reflect(Axis::Second), label("M", &a, &b)))
        }
        FaceId::F1 | FaceId::F2 | FaceId::F3 => {
            let (expr, recipe) = build_face(face.involution(), &involution_a(p))?;
            let inner = recipe.split_once(':').map(|(_, rest)| rest).unwrap_or(&recipe);
            let recipe = match face {
                FaceId::F1 => format!("{face}:K{}", inner.trim_start_matches('H')),
                _ => format!("{face}:σ₂{inner}"),
            };
            Ok((expr.reflect(Axis::Second), recipe))
        }
    }
}

/// Clamps `x` into `[lo, hi]`, allowing [`PARAM_SLACK`] of rounding.
fn clamp_param(name: &str, x: &Scalar, lo: &Scalar, hi: &Scalar) -> Result<Scalar> {
    let slack = Scalar::float(PARAM_SLACK);
    if !x.is_finite() || *x < lo - &slack || *x > hi + &slack {
        return Err(Error::Internal(format!("inverted {name} = {x} leaves [{lo}, {hi}]")));
    }
    Ok(x.max(lo).min(hi))
}

/// `(a, b)` from `s = (1 − 2a)²` and `q = s b²` with `b ≤ b_max`.
fn nested_params(s: &Scalar, q: &Scalar, b_max: &Scalar) -> Result<(Scalar, Scalar)> {
    let s = clamp_param("s", s, &Scalar::zero(), &Scalar::one())?;
    let q = clamp_param("q", q, &Scalar::zero(), &(&s * b_max.square()))?;
    if s.is_zero() {
        return Ok((Scalar::half(), Scalar::zero()));
    }
    let a = ((Scalar::one() - s.sqrt()) / Scalar::int(2)).clamp_unit().min(&Scalar::half());
    let b = (&q / &s).min(&b_max.square()).sqrt();
    Ok((a, b))
}

/// `(a, b)` of `L_{a,b}` from `φ = 12(b − a)² − ½` and `τ = 16(b − a)² − 8b²`.
fn l_params(phi: &Scalar, tau: &Scalar) -> Result<(Scalar, Scalar)> {
    let sixteenth = Scalar::ratio(1, 16);
    let d2 = clamp_param("(b−a)²", &((phi + Scalar::half()) / Scalar::int(12)), &Scalar::zero(), &sixteenth)?;
    let b2 = clamp_param("b²", &((Scalar::int(16) * &d2 - tau) / Scalar::int(8)), &d2, &sixteenth)?;
    let (d, b) = (d2.sqrt(), b2.sqrt());
    let a = (&b - &d).max(&Scalar::zero());
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::VertexId;

    fn r(p: i64, q: i64) -> Scalar {
        Scalar::ratio(p, q)
    }

    fn pt(phi: Scalar, gamma: Scalar, tau: Scalar) -> RegionPoint {
        RegionPoint::new(phi, gamma, tau)
    }

    #[test]
    fn face_examples() {
        let p3 = VertexId::P3.point();
        let res = attain_face(FaceId::F6, &p3).unwrap();
        assert_eq!(res.recipe, "F6:A(a=0,b=0)");
        assert!(res.residual.is_zero());

        let res = attain_face(FaceId::F4, &VertexId::P1.point()).unwrap();
        assert_eq!(res.expr, CopulaExpr::w());

        let res = attain_face(FaceId::F7, &pt(r(1, 4), r(1, 2), r(0, 1))).unwrap();
        assert_eq!(res.recipe, "F7:H(a=0,b=0)");
        assert_eq!(res.expr, g_b(&r(0, 1)).unwrap().simplified());
        assert!(res.residual.is_zero());
    }

    #[test]
    fn off_face_is_rejected() {
        let err = attain_face(FaceId::F6, &pt(r(0, 1), r(0, 1), r(0, 1))).unwrap_err();
        assert!(matches!(err, Error::OutOfFace { .. }), "{err}");
        let err = attain_face(FaceId::F6, &pt(r(2, 1), r(0, 1), r(0, 1))).unwrap_err();
        assert!(matches!(err, Error::OutOfFace { .. }), "{err}");
    }

    #[test]
    fn every_vertex_on_every_incident_face() {
        for v in VertexId::ALL {
            for face in v.faces() {
                let res = attain_face(face, &v.point()).unwrap_or_else(|e| panic!("{v} on {face}: {e}"));
                assert!(res.residual.to_f64() < 1e-12, "{v} on {face}: {}", res.residual);
            }
        }
    }

    #[test]
    fn attain_examples() {
        assert_eq!(attain(&VertexId::P4.point()).unwrap().expr, CopulaExpr::m());
        let res = attain(&pt(r(1, 4), r(1, 2), r(0, 1))).unwrap();
        assert!(res.residual.is_zero());
        let res = attain(&pt(r(0, 1), r(0, 1), r(0, 1))).unwrap();
        assert!(res.residual.to_f64() <= 1e-9, "{}", res.residual);
        assert!(res.recipe.contains('⊕'), "{}", res.recipe);
    }

    #[test]
    fn outside_is_rejected() {
        let err = attain(&pt(r(-1, 1), r(0, 1), r(0, 1))).unwrap_err();
        assert_eq!(err, Error::OutOfRegion { constraint: FaceId::F1.constraint() });
    }

    #[test]
    fn float_targets() {
        let res = attain(&RegionPoint::from_f64(0.1, 0.05, 0.02)).unwrap();
        assert!(res.residual.to_f64() <= 1e-9, "{}", res.residual);
    }

    #[test]
    fn quadratic_roots_are_stable() {
        let roots = quadratic_roots(&Scalar::float(1e-9), &Scalar::float(1.0), &Scalar::float(-0.5));
        assert!(roots.iter().any(|t| (t.to_f64() - 0.5).abs() < 1e-9));
        let roots = quadratic_roots(&r(1, 1), &r(-3, 1), &r(2, 1));
        assert!(roots.contains(&r(1, 1)) && roots.contains(&r(2, 1)));
    }
}
