//! The six dependence coefficients and the concordance function `Q`.
//!
//! | measure | definition |
//! |---|---|
//! | Spearman's rho | `ρ = 12 ∫∫ C − 3 = 3 Q(C, Π)` |
//! | Kendall's tau | `τ = Q(C, C)` |
//! | Spearman's footrule | `φ = 6 ∫ δ_C − 2` |
//! | Gini's gamma | `γ = 4 ∫ δ_C + 4 ∫ ω_C − 2` |
//! | Blomqvist's beta | `β = 4 C(½, ½) − 1` |
//! | Chatterjee's xi | `ξ = 6 ∫∫ (∂₁C)² − 2` |
//!
//! with `Q(C₁, C₂) = 4 ∫ C₂ dC₁ − 1`, `δ_C(u) = C(u, u)` and `ω_C(u) = C(u, 1 − u)`.
//!
//! The public functions recurse over the expression: ordinal sums use the
//! propagation formulas in the block widths, reflections flip the sign of
//! the concordance measures (with `φ(C^σ) = φ(C) − 3γ(C)/2`), mixtures are
//! affine (bilinear for `τ`), and shuffle leaves are integrated exactly along
//! their support. The [`direct`] module computes the same quantities without
//! any structural rule and serves as a cross-check.
//!
//! `ξ` of reflections (invariant) and of shuffles (always 1) are not covered
//! by the propagation formulas; they follow from `∂₁C` being an indicator
//! almost everywhere under complete dependence and are validated against
//! the checkerboard oracle. `ξ` of a mixture has no closed form here.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::copula::{
    integral_against, line_integral, BaseCopula, CopulaExpr, OrdinalSum, PathSegment,
    PlanePath, Point,
};
use crate::error::{Error, Result};
use crate::oracle;
use crate::scalar::Scalar;

/// Checkerboard resolution used when a measure has no closed form.
pub const FALLBACK_RESOLUTION: usize = 256;

fn s(p: i64, q: i64) -> Scalar {
    Scalar::ratio(p, q)
}

/// `Q(c1, c2) = 4 ∫ C₂ dC₁ − 1`, exact for every expression.
pub fn concordance_q(c1: &CopulaExpr, c2: &CopulaExpr) -> Result<Scalar> {
    Ok(Scalar::int(4) * integral_against(c1, c2) - Scalar::one())
}

/// Which of the three ordinal-sum cases applies to Gini's gamma.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaCase {
    /// `½` lies in no open block interval.
    Outside,
    /// Block `j` is centred at `½`.
    Symmetric { j: usize },
    Middle(GammaMiddleCase),
}

/// Block `j` straddles `½` off-centre; `c = (1 − a − b)/(b − a) ∈ (−1, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaMiddleCase {
    pub j: usize,
    pub c: Scalar,
}

pub fn gamma_case(o: &OrdinalSum) -> GammaCase {
    let half = Scalar::half();
    for (j, blk) in o.blocks().iter().enumerate() {
        if blk.a() < &half && &half < blk.b() {
            let sum = blk.a() + blk.b();
            if sum == Scalar::one() {
                return GammaCase::Symmetric { j };
            }
            let c = (Scalar::one() - sum) / blk.width();
            return GammaCase::Middle(GammaMiddleCase { j, c });
        }
    }
    GammaCase::Outside
}

/// `Σ w_k^p (1 − m_k)` over the blocks, skipping `skip`.
fn deficit(
    o: &OrdinalSum,
    power: u32,
    skip: Option<usize>,
    m: impl Fn(&CopulaExpr) -> Result<Scalar>,
) -> Result<Scalar> {
    let mut total = Scalar::zero();
    for (k, blk) in o.blocks().iter().enumerate() {
        if Some(k) == skip {
            continue;
        }
        let w = blk.width();
        let wp = (1..power).fold(w.clone(), |acc, _| acc * &w);
        total = total + wp * (Scalar::one() - m(blk.summand())?);
    }
    Ok(total)
}

fn linear(expr_parts: &crate::copula::Mixture, m: impl Fn(&CopulaExpr) -> Result<Scalar>) -> Result<Scalar> {
    let mut total = Scalar::zero();
    for part in expr_parts.parts() {
        total = total + part.weight() * m(part.expr())?;
    }
    Ok(total)
}

/// Spearman's footrule.
pub fn phi(expr: &CopulaExpr) -> Result<Scalar> {
    match expr {
        CopulaExpr::Base(BaseCopula::M) => Ok(Scalar::one()),
        CopulaExpr::Base(BaseCopula::W) => Ok(s(-1, 2)),
        CopulaExpr::Base(BaseCopula::Pi) => Ok(Scalar::zero()),
        CopulaExpr::Shuffle(_) => Ok(direct::phi(expr)),
        CopulaExpr::Ordinal(o) => Ok(Scalar::one() - deficit(o, 2, None, phi)?),
        CopulaExpr::Reflect { of, .. } => Ok(phi(of)? - s(3, 2) * gamma(of)?),
        CopulaExpr::Convex(m) => linear(m, phi),
    }
}

/// Gini's gamma.
pub fn gamma(expr: &CopulaExpr) -> Result<Scalar> {
    match expr {
        CopulaExpr::Base(BaseCopula::M) => Ok(Scalar::one()),
        CopulaExpr::Base(BaseCopula::W) => Ok(Scalar::int(-1)),
        CopulaExpr::Base(BaseCopula::Pi) => Ok(Scalar::zero()),
        CopulaExpr::Shuffle(_) => Ok(direct::gamma(expr)),
        CopulaExpr::Ordinal(o) => ordinal_gamma(o),
        CopulaExpr::Reflect { of, .. } => Ok(-gamma(of)?),
        CopulaExpr::Convex(m) => linear(m, gamma),
    }
}

fn ordinal_gamma(o: &OrdinalSum) -> Result<Scalar> {
    let two_thirds = s(2, 3);
    let one = Scalar::one();
    match gamma_case(o) {
        GammaCase::Outside => Ok(&one - &two_thirds * deficit(o, 2, None, phi)?),
        GammaCase::Symmetric { j } => {
            let blk = &o.blocks()[j];
            let own = blk.width().square() * (&one - gamma(blk.summand())?);
            Ok(&one - own - &two_thirds * deficit(o, 2, Some(j), phi)?)
        }
        GammaCase::Middle(GammaMiddleCase { j, c }) => {
            let blk = &o.blocks()[j];
            let (a, w2) = (blk.a(), blk.width().square());
            let zero = Scalar::zero();
            let lo = c.max(&zero);
            let hi = &one + c.min(&zero);
            let top = &one + &c;
            let path = PlanePath::new(vec![PathSegment {
                from: Point::new(lo.clone(), &top - &lo),
                to: Point::new(hi.clone(), &top - &hi),
                weight: &hi - &lo,
            }])?;
            let cross = line_integral(blk.summand(), &path);
            let four = Scalar::int(4);
            Ok(&four * &w2 * lo.square() + &four * a - &four * a.square()
                - &two_thirds * deficit(o, 2, None, phi)?
                + &four * &w2 * cross)
        }
    }
}

/// Kendall's tau.
pub fn tau(expr: &CopulaExpr) -> Result<Scalar> {
    match expr {
        CopulaExpr::Base(BaseCopula::M) => Ok(Scalar::one()),
        CopulaExpr::Base(BaseCopula::W) => Ok(Scalar::int(-1)),
        CopulaExpr::Base(BaseCopula::Pi) => Ok(Scalar::zero()),
        CopulaExpr::Shuffle(sh) => {
            let along = line_integral(expr, &PlanePath::graph(sh));
            Ok(Scalar::int(4) * along - Scalar::one())
        }
        CopulaExpr::Ordinal(o) => Ok(Scalar::one() - deficit(o, 2, None, tau)?),
        CopulaExpr::Reflect { of, .. } => Ok(-tau(of)?),
        CopulaExpr::Convex(m) => {
            // τ is the quadratic form of the symmetric bilinear Q
            let parts = m.parts();
            let mut total = Scalar::zero();
            for (i, pi) in parts.iter().enumerate() {
                total = total + pi.weight().square() * tau(pi.expr())?;
                for pj in &parts[i + 1..] {
                    let q = concordance_q(pi.expr(), pj.expr())?;
                    total = total + Scalar::int(2) * pi.weight() * pj.weight() * q;
                }
            }
            Ok(total)
        }
    }
}

/// Spearman's rho.
pub fn rho(expr: &CopulaExpr) -> Result<Scalar> {
    match expr {
        CopulaExpr::Base(BaseCopula::M) => Ok(Scalar::one()),
        CopulaExpr::Base(BaseCopula::W) => Ok(Scalar::int(-1)),
        CopulaExpr::Base(BaseCopula::Pi) => Ok(Scalar::zero()),
        CopulaExpr::Shuffle(sh) => {
            let along = line_integral(&CopulaExpr::pi(), &PlanePath::graph(sh));
            Ok(Scalar::int(12) * along - Scalar::int(3))
        }
        CopulaExpr::Ordinal(o) => Ok(Scalar::one() - deficit(o, 3, None, rho)?),
        CopulaExpr::Reflect { of, .. } => Ok(-rho(of)?),
        CopulaExpr::Convex(m) => linear(m, rho),
    }
}

/// Blomqvist's beta.
pub fn beta(expr: &CopulaExpr) -> Result<Scalar> {
    match expr {
        CopulaExpr::Ordinal(o) => {
            let half = Scalar::half();
            for blk in o.blocks() {
                if blk.a() < &half && &half < blk.b() {
                    let w = blk.width();
                    let t = (&half - blk.a()) / &w;
                    let four = Scalar::int(4);
                    return Ok(&four * blk.a() + &four * &w * blk.summand().eval(&t, &t) - Scalar::one());
                }
            }
            Ok(Scalar::one())
        }
        CopulaExpr::Reflect { of, .. } => Ok(-beta(of)?),
        CopulaExpr::Convex(m) => linear(m, beta),
        _ => Ok(direct::beta(expr)),
    }
}

/// Chatterjee's xi.
pub fn xi(expr: &CopulaExpr) -> Result<Scalar> {
    match expr {
        CopulaExpr::Base(BaseCopula::Pi) => Ok(Scalar::zero()),
        CopulaExpr::Base(_) | CopulaExpr::Shuffle(_) => Ok(Scalar::one()),
        CopulaExpr::Ordinal(o) => Ok(Scalar::one() - deficit(o, 2, None, xi)?),
        CopulaExpr::Reflect { of, .. } => xi(of),
        CopulaExpr::Convex(_) => Err(Error::NotComputableExactly(
            "Chatterjee's xi of a mixture has no closed form".into(),
        )),
    }
}

/// Recomputation from the defining integrals over the whole expression,
/// without the propagation rules.
pub mod direct {
    use super::*;

    pub fn diagonal_integral(expr: &CopulaExpr) -> Scalar {
        line_integral(expr, &PlanePath::diagonal())
    }

    pub fn opposite_diagonal_integral(expr: &CopulaExpr) -> Scalar {
        line_integral(expr, &PlanePath::anti_diagonal())
    }

    pub fn phi(expr: &CopulaExpr) -> Scalar {
        Scalar::int(6) * diagonal_integral(expr) - Scalar::int(2)
    }

    pub fn gamma(expr: &CopulaExpr) -> Scalar {
        let four = Scalar::int(4);
        &four * diagonal_integral(expr) + &four * opposite_diagonal_integral(expr) - Scalar::int(2)
    }

    pub fn tau(expr: &CopulaExpr) -> Scalar {
        Scalar::int(4) * integral_against(expr, expr) - Scalar::one()
    }

    pub fn rho(expr: &CopulaExpr) -> Scalar {
        Scalar::int(12) * integral_against(expr, &CopulaExpr::pi()) - Scalar::int(3)
    }

    pub fn beta(expr: &CopulaExpr) -> Scalar {
        let h = Scalar::half();
        Scalar::int(4) * expr.eval(&h, &h) - Scalar::one()
    }

    /// Complete dependence gives `ξ = 1`; anything else has no direct route.
    pub fn xi(expr: &CopulaExpr) -> Result<Scalar> {
        expr.as_shuffle().map(|_| Scalar::one()).map_err(|_| {
            Error::NotComputableExactly("xi needs a graph-supported copula".into())
        })
    }
}

/// Which fields came from closed forms rather than the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exactness {
    pub rho: bool,
    pub tau: bool,
    pub phi: bool,
    pub gamma: bool,
    pub beta: bool,
    pub xi: bool,
}

impl Exactness {
    pub const ALL: Exactness = Exactness { rho: true, tau: true, phi: true, gamma: true, beta: true, xi: true };
    pub const NONE: Exactness = Exactness { rho: false, tau: false, phi: false, gamma: false, beta: false, xi: false };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureVector {
    pub rho: Scalar,
    pub tau: Scalar,
    pub phi: Scalar,
    pub gamma: Scalar,
    pub beta: Scalar,
    pub xi: Scalar,
    pub exact: Exactness,
}

/// Field names in output order.
pub const MEASURE_NAMES: [&str; 6] = ["rho", "tau", "phi", "gamma", "beta", "xi"];

impl MeasureVector {
    pub fn get(&self, name: &str) -> Option<&Scalar> {
        match name {
            "rho" => Some(&self.rho),
            "tau" => Some(&self.tau),
            "phi" => Some(&self.phi),
            "gamma" => Some(&self.gamma),
            "beta" => Some(&self.beta),
            "xi" => Some(&self.xi),
            _ => None,
        }
    }

    pub fn values(&self) -> [&Scalar; 6] {
        [&self.rho, &self.tau, &self.phi, &self.gamma, &self.beta, &self.xi]
    }

    pub fn to_f64(&self) -> [f64; 6] {
        self.values().map(Scalar::to_f64)
    }

    /// `(φ, γ, τ)`.
    pub fn region_coordinates(&self) -> [Scalar; 3] {
        [self.phi.clone(), self.gamma.clone(), self.tau.clone()]
    }
}

impl fmt::Display for MeasureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rho={} tau={} phi={} gamma={} beta={} xi={}",
            self.rho, self.tau, self.phi, self.gamma, self.beta, self.xi
        )
    }
}

/// All six measures; fields without a closed form are estimated by the
/// checkerboard oracle at [`FALLBACK_RESOLUTION`] and flagged inexact.
pub fn all_measures(expr: &CopulaExpr) -> MeasureVector {
    let mut exact = Exactness::ALL;
    let mut fallback: Option<MeasureVector> = None;
    let mut field = |f: fn(&CopulaExpr) -> Result<Scalar>, pick: fn(&MeasureVector) -> &Scalar, flag: &mut bool| {
        match f(expr) {
            Ok(v) => v,
            Err(_) => {
                *flag = false;
                let cb = fallback.get_or_insert_with(|| {
                    let board = oracle::checkerboard_of(expr, FALLBACK_RESOLUTION)
                        .expect("valid expressions discretize");
                    oracle::cb_measures(&board)
                });
                pick(cb).clone()
            }
        }
    };
    let rho_v = field(rho, |m| &m.rho, &mut exact.rho);
    let tau_v = field(tau, |m| &m.tau, &mut exact.tau);
    let phi_v = field(phi, |m| &m.phi, &mut exact.phi);
    let gamma_v = field(gamma, |m| &m.gamma, &mut exact.gamma);
    let beta_v = field(beta, |m| &m.beta, &mut exact.beta);
    let xi_v = field(xi, |m| &m.xi, &mut exact.xi);
    MeasureVector { rho: rho_v, tau: tau_v, phi: phi_v, gamma: gamma_v, beta: beta_v, xi: xi_v, exact }
}

/// `(φ, γ, τ)` only; every expression has these in closed form.
pub fn region_triple(expr: &CopulaExpr) -> Result<[Scalar; 3]> {
    Ok([phi(expr)?, gamma(expr)?, tau(expr)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::Axis;

    fn r(p: i64, q: i64) -> Scalar {
        Scalar::ratio(p, q)
    }

    fn c_b(b: Scalar) -> CopulaExpr {
        let h = Scalar::half();
        CopulaExpr::shuffle(
            vec![b.clone(), &h - &b, h.clone(), &h + &b, Scalar::one() - &b],
            vec![3, 5, 1, 6, 2, 4],
            vec![1; 6],
        )
        .unwrap()
    }

    fn d_b(b: Scalar) -> CopulaExpr {
        CopulaExpr::shuffle(vec![b.clone(), Scalar::one() - &b], vec![1, 2, 3], vec![-1, 1, -1]).unwrap()
    }

    fn mid_pi() -> CopulaExpr {
        CopulaExpr::ordinal(vec![(r(1, 4), r(3, 4), CopulaExpr::pi())]).unwrap()
    }

    #[test]
    fn concordance_values() {
        assert_eq!(concordance_q(&CopulaExpr::m(), &CopulaExpr::m()).unwrap(), r(1, 1));
        assert_eq!(concordance_q(&c_b(r(1, 4)), &CopulaExpr::m()).unwrap(), r(1, 2));
        assert_eq!(concordance_q(&CopulaExpr::m(), &CopulaExpr::w()).unwrap(), r(0, 1));
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(&CopulaExpr::w()).unwrap(), r(-1, 2));
        assert_eq!(phi(&c_b(r(1, 4))).unwrap(), r(1, 4));
        assert_eq!(phi(&mid_pi()).unwrap(), r(3, 4));
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(&c_b(r(1, 4))).unwrap(), r(1, 2));
        assert_eq!(gamma(&mid_pi()).unwrap(), r(3, 4));
        let off = CopulaExpr::ordinal(vec![(r(1, 10), r(3, 5), CopulaExpr::w())]).unwrap();
        assert!(matches!(
            gamma_case(match &off { CopulaExpr::Ordinal(o) => o, _ => unreachable!() }),
            GammaCase::Middle(GammaMiddleCase { j: 0, ref c }) if *c == r(3, 5)
        ));
        assert_eq!(gamma(&off).unwrap(), direct::gamma(&off));
    }

    #[test]
    fn tau_values() {
        assert_eq!(tau(&d_b(r(1, 2))).unwrap(), r(0, 1));
        assert_eq!(tau(&mid_pi()).unwrap(), r(3, 4));
        let mix = CopulaExpr::convex(vec![(r(1, 2), CopulaExpr::m()), (r(1, 2), CopulaExpr::w())]).unwrap();
        assert_eq!(tau(&mix).unwrap(), r(0, 1));
        assert_eq!(direct::tau(&mix), r(0, 1));
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(&CopulaExpr::w()).unwrap(), r(-1, 1));
        assert_eq!(rho(&mid_pi()).unwrap(), r(7, 8));
        assert_eq!(direct::rho(&mid_pi()), r(7, 8));
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(&CopulaExpr::pi()).unwrap(), r(0, 1));
        assert_eq!(beta(&mid_pi()).unwrap(), r(1, 2));
        let off = CopulaExpr::ordinal(vec![(r(3, 10), r(9, 10), CopulaExpr::pi())]).unwrap();
        assert_eq!(beta(&off).unwrap(), r(1, 5) + r(4, 15));
        assert_eq!(beta(&off).unwrap(), direct::beta(&off));
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi(&CopulaExpr::pi()).unwrap(), r(0, 1));
        assert_eq!(xi(&mid_pi()).unwrap(), r(3, 4));
        let mix = CopulaExpr::convex(vec![(r(1, 2), CopulaExpr::m()), (r(1, 2), CopulaExpr::pi())]).unwrap();
        assert!(matches!(xi(&mix), Err(Error::NotComputableExactly(_))));
    }

    #[test]
    fn all_measures_of_bounds() {
        let m = all_measures(&CopulaExpr::m());
        assert!(m.values().iter().all(|v| **v == Scalar::one()));
        let w = all_measures(&CopulaExpr::w());
        assert_eq!(w.to_f64(), [-1.0, -1.0, -0.5, -1.0, -1.0, 1.0]);
        assert_eq!(w.exact, Exactness::ALL);
    }

    #[test]
    fn reflection_rules_match_direct() {
        for e in [c_b(r(1, 8)), d_b(r(1, 3)), mid_pi()] {
            for axis in [Axis::First, Axis::Second] {
                let refl = e.clone().reflect(axis);
                assert_eq!(phi(&refl).unwrap(), direct::phi(&refl));
                assert_eq!(gamma(&refl).unwrap(), direct::gamma(&refl));
                assert_eq!(tau(&refl).unwrap(), direct::tau(&refl));
                assert_eq!(rho(&refl).unwrap(), direct::rho(&refl));
            }
        }
    }

    #[test]
    fn mixture_xi_falls_back() {
        let mix = CopulaExpr::convex(vec![(r(1, 2), CopulaExpr::m()), (r(1, 2), CopulaExpr::pi())]).unwrap();
        let mv = all_measures(&mix);
        assert!(!mv.exact.xi);
        assert!(mv.exact.tau);
        // ∂₁C = ½·1[v ≥ u] + ½v gives ∫∫(∂₁C)² = 1/8 + 1/6 + 1/12, so ξ = 1/4
        assert!((mv.xi.to_f64() - 0.25).abs() < 1e-2);
    }
}
