//! Copula expressions: base copulas, shuffles of M, ordinal sums, reflections
//! and convex combinations, with exact pointwise evaluation.

mod integrate;
mod json;
mod sample;
mod section;
mod shuffle;

pub(crate) use integrate::integral_against;
pub use integrate::{line_integral, mass_atoms, segment_mean, MassAtom, PathSegment, PlanePath, Point};
pub use sample::{sample, sample_given_u};
pub use section::{diagonal, opposite_diagonal, PiecewiseLinear};
pub use json::ExprParseError;
pub use shuffle::{Flip, Piece, ShuffleOfM};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance for mixture weights summing to one in float mode.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseCopula {
    /// Upper Fréchet–Hoeffding bound `min(u, v)`.
    M,
    /// Lower Fréchet–Hoeffding bound `max(0, u + v - 1)`.
    W,
    /// Independence copula `uv`.
    Pi,
}

impl BaseCopula {
    pub fn eval(self, u: &Scalar, v: &Scalar) -> Scalar {
        match self {
            BaseCopula::M => u.min(v),
            BaseCopula::W => (u + v - Scalar::one()).max(&Scalar::zero()),
            BaseCopula::Pi => u * v,
        }
    }

    pub fn eval_f64(self, u: f64, v: f64) -> f64 {
        match self {
            BaseCopula::M => u.min(v),
            BaseCopula::W => (u + v - 1.0).max(0.0),
            BaseCopula::Pi => u * v,
        }
    }
}

/// Reflection axis: `First` is `σ₁(u, v) = v - C(1-u, v)`, `Second` is
/// `σ₂(u, v) = u - C(u, 1-v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    First,
    Second,
}

impl Axis {
    pub fn from_index(i: u8) -> Option<Axis> {
        match i {
            1 => Some(Axis::First),
            2 => Some(Axis::Second),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Axis::First => 1,
            Axis::Second => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrdinalBlock {
    a: Scalar,
    b: Scalar,
    summand: CopulaExpr,
    af: f64,
    bf: f64,
}

impl OrdinalBlock {
    pub fn new(a: Scalar, b: Scalar, summand: CopulaExpr) -> Result<Self> {
        if !(a >= Scalar::zero() && a < b && b <= Scalar::one()) {
            return Err(Error::InvalidExpression(format!(
                "ordinal block ({a}, {b}) must satisfy 0 <= a < b <= 1"
            )));
        }
        let (af, bf) = (a.to_f64(), b.to_f64());
        Ok(OrdinalBlock { a, b, summand, af, bf })
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }

    pub fn b(&self) -> &Scalar {
        &self.b
    }

    pub fn width(&self) -> Scalar {
        &self.b - &self.a
    }

    pub fn summand(&self) -> &CopulaExpr {
        &self.summand
    }

    fn contains(&self, u: &Scalar, v: &Scalar) -> bool {
        &self.a <= u && u <= &self.b && &self.a <= v && v <= &self.b
    }

    fn to_local(&self, x: &Scalar) -> Scalar {
        (x - &self.a) / self.width()
    }
}

/// An M-ordinal sum: M outside the squares `[a_k, b_k]²`, a rescaled summand inside.
#[derive(Clone, Debug, PartialEq)]
pub struct OrdinalSum {
    blocks: Vec<OrdinalBlock>,
}

impl OrdinalSum {
    /// Blocks are sorted by `a`; their open intervals must be disjoint.
    pub fn new(mut blocks: Vec<OrdinalBlock>) -> Result<Self> {
        blocks.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(std::cmp::Ordering::Equal));
        for pair in blocks.windows(2) {
            if pair[0].b > pair[1].a {
                return Err(Error::InvalidExpression(format!(
                    "ordinal blocks ({}, {}) and ({}, {}) overlap",
                    pair[0].a, pair[0].b, pair[1].a, pair[1].b
                )));
            }
        }
        Ok(OrdinalSum { blocks })
    }

    pub fn blocks(&self) -> &[OrdinalBlock] {
        &self.blocks
    }

    pub fn eval(&self, u: &Scalar, v: &Scalar) -> Scalar {
        for blk in &self.blocks {
            if blk.contains(u, v) {
                let inner = blk.summand.eval(&blk.to_local(u), &blk.to_local(v));
                return &blk.a + blk.width() * inner;
            }
        }
        u.min(v)
    }

    fn eval_f64(&self, u: f64, v: f64) -> f64 {
        for blk in &self.blocks {
            if blk.af <= u && u <= blk.bf && blk.af <= v && v <= blk.bf {
                let w = blk.bf - blk.af;
                let inner = blk.summand.eval_f64((u - blk.af) / w, (v - blk.af) / w);
                return blk.af + w * inner;
            }
        }
        u.min(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPart {
    weight: Scalar,
    expr: CopulaExpr,
    wf: f64,
}

impl ConvexPart {
    pub fn weight(&self) -> &Scalar {
        &self.weight
    }

    pub fn expr(&self) -> &CopulaExpr {
        &self.expr
    }
}

/// A convex combination `Σ w_i C_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mixture {
    parts: Vec<ConvexPart>,
}

impl Mixture {
    /// Weights must be nonnegative and sum to one: exactly when all are
    /// rational, within [`WEIGHT_SUM_TOL`] otherwise.
    pub fn new(parts: Vec<(Scalar, CopulaExpr)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidExpression("empty convex combination".into()));
        }
        if parts.iter().any(|(w, _)| !w.is_finite() || *w < Scalar::zero()) {
            return Err(Error::InvalidExpression("negative mixture weight".into()));
        }
        let total: Scalar = parts.iter().map(|(w, _)| w).sum();
        let ok = if total.is_exact() {
            total == Scalar::one()
        } else {
            (total.to_f64() - 1.0).abs() <= WEIGHT_SUM_TOL
        };
        if !ok {
            return Err(Error::InvalidExpression(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(Mixture {
            parts: parts
                .into_iter()
                .map(|(weight, expr)| ConvexPart { wf: weight.to_f64(), weight, expr })
                .collect(),
        })
    }

    pub fn parts(&self) -> &[ConvexPart] {
        &self.parts
    }
}

/// Immutable expression tree; every constructible value is a valid copula.
#[derive(Clone, Debug, PartialEq)]
pub enum CopulaExpr {
    Base(BaseCopula),
    Shuffle(ShuffleOfM),
    Ordinal(OrdinalSum),
    Reflect { axis: Axis, of: Box<CopulaExpr> },
    Convex(Mixture),
}

impl From<ShuffleOfM> for CopulaExpr {
    fn from(s: ShuffleOfM) -> Self {
        CopulaExpr::Shuffle(s)
    }
}

impl CopulaExpr {
    pub fn m() -> Self {
        CopulaExpr::Base(BaseCopula::M)
    }

    pub fn w() -> Self {
        CopulaExpr::Base(BaseCopula::W)
    }

    pub fn pi() -> Self {
        CopulaExpr::Base(BaseCopula::Pi)
    }

    pub fn shuffle(splits: Vec<Scalar>, perm: Vec<usize>, flips: Vec<i64>) -> Result<Self> {
        ShuffleOfM::new(splits, perm, flips).map(CopulaExpr::Shuffle)
    }

    /// Ordinal sum from `(a, b, summand)` triples.
    pub fn ordinal(blocks: Vec<(Scalar, Scalar, CopulaExpr)>) -> Result<Self> {
        let blocks = blocks
            .into_iter()
            .map(|(a, b, c)| OrdinalBlock::new(a, b, c))
            .collect::<Result<Vec<_>>>()?;
        OrdinalSum::new(blocks).map(CopulaExpr::Ordinal)
    }

    pub fn convex(parts: Vec<(Scalar, CopulaExpr)>) -> Result<Self> {
        Mixture::new(parts).map(CopulaExpr::Convex)
    }

    pub fn reflect(self, axis: Axis) -> Self {
        CopulaExpr::Reflect { axis, of: Box::new(self) }
    }

    /// `C(u, v)`; arguments are clamped to the unit square.
    pub fn eval(&self, u: &Scalar, v: &Scalar) -> Scalar {
        let u = u.clamp_unit();
        let v = v.clamp_unit();
        match self {
            CopulaExpr::Base(b) => b.eval(&u, &v),
            CopulaExpr::Shuffle(s) => s.eval(&u, &v),
            CopulaExpr::Ordinal(o) => o.eval(&u, &v),
            CopulaExpr::Reflect { axis: Axis::First, of } => {
                &v - of.eval(&(Scalar::one() - &u), &v)
            }
            CopulaExpr::Reflect { axis: Axis::Second, of } => {
                &u - of.eval(&u, &(Scalar::one() - &v))
            }
            CopulaExpr::Convex(m) => m
                .parts
                .iter()
                .map(|p| &p.weight * p.expr.eval(&u, &v))
                .sum(),
        }
    }

    /// Float-only evaluation used by the sampling and discretization paths.
    pub fn eval_f64(&self, u: f64, v: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let v = v.clamp(0.0, 1.0);
        match self {
            CopulaExpr::Base(b) => b.eval_f64(u, v),
            CopulaExpr::Shuffle(s) => s.eval_f64(u, v),
            CopulaExpr::Ordinal(o) => o.eval_f64(u, v),
            CopulaExpr::Reflect { axis: Axis::First, of } => v - of.eval_f64(1.0 - u, v),
            CopulaExpr::Reflect { axis: Axis::Second, of } => u - of.eval_f64(u, 1.0 - v),
            CopulaExpr::Convex(m) => m.parts.iter().map(|p| p.wf * p.expr.eval_f64(u, v)).sum(),
        }
    }

    /// Mass of `[u1, u2] × [v1, v2]`.
    pub fn rect_volume(&self, u1: &Scalar, u2: &Scalar, v1: &Scalar, v2: &Scalar) -> Result<Scalar> {
        if u1 > u2 || v1 > v2 {
            return Err(Error::InvalidArgument(format!(
                "inverted rectangle [{u1}, {u2}] x [{v1}, {v2}]"
            )));
        }
        Ok(self.eval(u2, v2) - self.eval(u2, v1) - self.eval(u1, v2) + self.eval(u1, v1))
    }

    /// `h_C(u)` when the expression is graph-supported.
    pub fn h_map(&self, u: &Scalar) -> Result<Scalar> {
        Ok(self.as_shuffle()?.h(u))
    }

    /// Canonical shuffle-of-M normal form.
    pub fn as_shuffle(&self) -> Result<ShuffleOfM> {
        let raw = match self {
            CopulaExpr::Base(BaseCopula::M) => ShuffleOfM::identity(),
            CopulaExpr::Base(BaseCopula::W) => ShuffleOfM::counter_identity(),
            CopulaExpr::Base(BaseCopula::Pi) => {
                return Err(Error::NotAShuffle("the independence copula has no graph support".into()))
            }
            CopulaExpr::Shuffle(s) => s.clone(),
            CopulaExpr::Reflect { axis, of } => of.as_shuffle()?.reflected(*axis),
            CopulaExpr::Convex(_) => {
                return Err(Error::NotAShuffle("convex combinations are not shuffles".into()))
            }
            CopulaExpr::Ordinal(o) => {
                let mut pieces = Vec::new();
                let mut cursor = Scalar::zero();
                for blk in &o.blocks {
                    if cursor < blk.a {
                        pieces.push(identity_piece(&cursor, &blk.a));
                    }
                    let inner = blk.summand.as_shuffle()?;
                    let w = blk.width();
                    for p in inner.pieces() {
                        pieces.push(Piece {
                            u0: &blk.a + &w * &p.u0,
                            u1: &blk.a + &w * &p.u1,
                            v0: &blk.a + &w * &p.v0,
                            v1: &blk.a + &w * &p.v1,
                            flip: p.flip,
                        });
                    }
                    cursor = blk.b.clone();
                }
                if cursor < Scalar::one() {
                    pieces.push(identity_piece(&cursor, &Scalar::one()));
                }
                ShuffleOfM::from_pieces(&pieces)?
            }
        };
        Ok(raw.normalized())
    }

    /// Graph-supported expressions collapse to their canonical shuffle, which
    /// is rendered as `M` or `W` when it has a single piece.
    pub fn simplified(&self) -> CopulaExpr {
        match self.as_shuffle() {
            Ok(s) if s.n() == 1 && s.flips()[0] == Flip::Up => CopulaExpr::m(),
            Ok(s) if s.n() == 1 => CopulaExpr::w(),
            Ok(s) => CopulaExpr::Shuffle(s),
            Err(_) => self.clone(),
        }
    }

    /// True when every number in the tree is an exact rational.
    pub fn is_exact(&self) -> bool {
        match self {
            CopulaExpr::Base(_) => true,
            CopulaExpr::Shuffle(s) => s.is_exact(),
            CopulaExpr::Ordinal(o) => o
                .blocks
                .iter()
                .all(|b| b.a.is_exact() && b.b.is_exact() && b.summand.is_exact()),
            CopulaExpr::Reflect { of, .. } => of.is_exact(),
            CopulaExpr::Convex(m) => m.parts.iter().all(|p| p.weight.is_exact() && p.expr.is_exact()),
        }
    }

    /// Same expression with every number in float mode.
    pub fn to_float(&self) -> CopulaExpr {
        match self {
            CopulaExpr::Base(b) => CopulaExpr::Base(*b),
            CopulaExpr::Shuffle(s) => CopulaExpr::Shuffle(s.to_float()),
            CopulaExpr::Ordinal(o) => CopulaExpr::Ordinal(OrdinalSum {
                blocks: o
                    .blocks
                    .iter()
                    .map(|b| OrdinalBlock {
                        a: b.a.to_float(),
                        b: b.b.to_float(),
                        summand: b.summand.to_float(),
                        af: b.af,
                        bf: b.bf,
                    })
                    .collect(),
            }),
            CopulaExpr::Reflect { axis, of } => of.to_float().reflect(*axis),
            CopulaExpr::Convex(m) => CopulaExpr::Convex(Mixture {
                parts: m
                    .parts
                    .iter()
                    .map(|p| ConvexPart {
                        weight: p.weight.to_float(),
                        expr: p.expr.to_float(),
                        wf: p.wf,
                    })
                    .collect(),
            }),
        }
    }

    /// Whether the expression contains a convex combination anywhere.
    pub fn contains_mixture(&self) -> bool {
        match self {
            CopulaExpr::Base(_) | CopulaExpr::Shuffle(_) => false,
            CopulaExpr::Ordinal(o) => o.blocks.iter().any(|b| b.summand.contains_mixture()),
            CopulaExpr::Reflect { of, .. } => of.contains_mixture(),
            CopulaExpr::Convex(_) => true,
        }
    }
}

fn identity_piece(from: &Scalar, to: &Scalar) -> Piece {
    Piece {
        u0: from.clone(),
        u1: to.clone(),
        v0: from.clone(),
        v1: to.clone(),
        flip: Flip::Up,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Scalar {
        Scalar::ratio(p, q)
    }

    fn f(x: f64) -> Scalar {
        Scalar::float(x)
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

    #[test]
    fn base_values() {
        assert_eq!(CopulaExpr::m().eval(&f(0.3), &f(0.7)).to_f64(), 0.3);
        assert_eq!(CopulaExpr::w().eval(&f(0.3), &f(0.6)).to_f64(), 0.0);
        assert_eq!(CopulaExpr::w().eval(&r(3, 10), &r(3, 5)), Scalar::zero());
    }

    #[test]
    fn shuffle_c_quarter_values() {
        let c = c_b(r(1, 4));
        assert_eq!(c.eval(&r(1, 2), &r(1, 2)), r(1, 2));
        assert_eq!(c.eval(&r(1, 4), &r(1, 4)), r(0, 1));
    }

    #[test]
    fn ordinal_of_pi() {
        let e = CopulaExpr::ordinal(vec![(r(1, 4), r(3, 4), CopulaExpr::pi())]).unwrap();
        assert_eq!(e.eval(&r(1, 2), &r(1, 2)), r(3, 8));
        assert_eq!(e.eval_f64(0.5, 0.5), 0.375);
        // outside the block it is M
        assert_eq!(e.eval(&r(1, 8), &r(9, 10)), r(1, 8));
    }

    #[test]
    fn validation_errors() {
        assert!(CopulaExpr::convex(vec![(r(1, 2), CopulaExpr::m()), (r(1, 3), CopulaExpr::w())]).is_err());
        assert!(CopulaExpr::convex(vec![(r(3, 2), CopulaExpr::m()), (r(-1, 2), CopulaExpr::w())]).is_err());
        assert!(CopulaExpr::convex(vec![(f(0.5), CopulaExpr::m()), (f(0.5 + 1e-13), CopulaExpr::w())]).is_ok());
        assert!(CopulaExpr::ordinal(vec![
            (r(0, 1), r(1, 2), CopulaExpr::pi()),
            (r(1, 3), r(2, 3), CopulaExpr::w()),
        ])
        .is_err());
        // touching blocks are fine
        assert!(CopulaExpr::ordinal(vec![
            (r(1, 2), r(1, 1), CopulaExpr::pi()),
            (r(0, 1), r(1, 2), CopulaExpr::w()),
        ])
        .is_ok());
        assert!(CopulaExpr::ordinal(vec![(r(1, 2), r(1, 2), CopulaExpr::pi())]).is_err());
    }

    #[test]
    fn rect_volume_examples() {
        let z = Scalar::zero();
        let h = Scalar::half();
        assert_eq!(CopulaExpr::pi().rect_volume(&z, &h, &z, &h).unwrap(), r(1, 4));
        assert_eq!(CopulaExpr::m().rect_volume(&z, &h, &h, &Scalar::one()).unwrap(), z);
        assert!(CopulaExpr::m().rect_volume(&h, &z, &z, &h).is_err());
    }

    /// Brute force: total length of support segments (parametrised by u)
    /// falling inside a rectangle.
    fn segment_oracle_volume(s: &ShuffleOfM, u1: f64, u2: f64, v1: f64, v2: f64) -> f64 {
        s.pieces()
            .iter()
            .map(|p| {
                let (a, b) = (p.u0.to_f64(), p.u1.to_f64());
                if b <= a {
                    return 0.0;
                }
                // h is affine on the piece: intersect the u-range with h^{-1}([v1, v2])
                let ha = p.h(&Scalar::float(a)).to_f64();
                let hb = p.h(&Scalar::float(b)).to_f64();
                let slope = (hb - ha) / (b - a);
                let t1 = a + (v1 - ha) / slope;
                let t2 = a + (v2 - ha) / slope;
                let (lo, hi) = (t1.min(t2), t1.max(t2));
                (b.min(u2).min(hi) - a.max(u1).max(lo)).max(0.0)
            })
            .sum()
    }

    #[test]
    fn rect_volume_matches_segment_oracle() {
        let c = c_b(r(1, 4));
        let s = c.as_shuffle().unwrap();
        let v = c.rect_volume(&r(0, 1), &r(1, 4), &r(1, 4), &r(1, 2)).unwrap();
        assert_eq!(v, r(1, 4));
        assert!((segment_oracle_volume(&s, 0.0, 0.25, 0.25, 0.5) - 0.25).abs() < 1e-15);
        for &(u1, u2, v1, v2) in &[(0.1, 0.6, 0.2, 0.9), (0.0, 0.3, 0.0, 1.0), (0.45, 0.55, 0.3, 0.8)] {
            let exact = c.rect_volume(&f(u1), &f(u2), &f(v1), &f(v2)).unwrap().to_f64();
            assert!((exact - segment_oracle_volume(&s, u1, u2, v1, v2)).abs() < 1e-12);
        }
    }

    #[test]
    fn reflections_of_bounds() {
        let mw = CopulaExpr::m().reflect(Axis::Second);
        let wm = CopulaExpr::w().reflect(Axis::Second);
        for i in 0..=20 {
            for j in 0..=20 {
                let (u, v) = (r(i, 20), r(j, 20));
                assert_eq!(mw.eval(&u, &v), CopulaExpr::w().eval(&u, &v));
                assert_eq!(wm.eval(&u, &v), CopulaExpr::m().eval(&u, &v));
            }
        }
    }

    fn assert_pointwise_equal(a: &CopulaExpr, b: &CopulaExpr, steps: i64) {
        for i in 0..=steps {
            for j in 0..=steps {
                let (u, v) = (r(i, steps), r(j, steps));
                let (x, y) = (a.eval(&u, &v), b.eval(&u, &v));
                assert!((x.to_f64() - y.to_f64()).abs() <= 1e-12, "({u},{v}): {x} vs {y}");
            }
        }
    }

    #[test]
    fn reflected_c_quarter_as_shuffle() {
        let e = c_b(r(1, 4)).reflect(Axis::Second);
        let s = e.as_shuffle().unwrap();
        // the two zero-width pieces of C_{1/4} are dropped, the rest are all reversed
        assert_eq!(s.n(), 4);
        assert!(s.flips().iter().all(|f| *f == Flip::Down));
        assert_eq!(s.perm_one_based(), vec![3, 4, 1, 2]);
        assert_pointwise_equal(&e, &CopulaExpr::Shuffle(s), 100);
    }

    #[test]
    fn as_shuffle_of_ordinals() {
        let c = c_b(r(1, 4));
        let whole = CopulaExpr::ordinal(vec![(r(0, 1), r(1, 1), c.clone())]).unwrap();
        assert_eq!(whole.as_shuffle().unwrap(), c.as_shuffle().unwrap());
        let mid_m = CopulaExpr::ordinal(vec![(r(1, 4), r(3, 4), CopulaExpr::m())]).unwrap();
        assert_eq!(mid_m.as_shuffle().unwrap(), ShuffleOfM::identity());
        let rd = d_b(r(1, 4)).reflect(Axis::Second);
        let s = rd.as_shuffle().unwrap();
        assert_eq!(s.n(), 3);
        assert_pointwise_equal(&rd, &CopulaExpr::Shuffle(s), 100);
        assert!(CopulaExpr::pi().as_shuffle().is_err());
        let mix = CopulaExpr::convex(vec![(r(1, 2), CopulaExpr::m()), (r(1, 2), CopulaExpr::w())]).unwrap();
        assert!(matches!(mix.as_shuffle(), Err(Error::NotAShuffle(_))));
    }

    #[test]
    fn h_map_examples() {
        let c = c_b(r(1, 4));
        assert_eq!(c.h_map(&f(0.1)).unwrap().to_f64(), 0.35);
        assert!((c.h_map(&f(0.3)).unwrap().to_f64() - 0.05).abs() < 1e-15);
        let id = CopulaExpr::shuffle(vec![], vec![1], vec![1]).unwrap();
        assert_eq!(id.h_map(&f(0.42)).unwrap().to_f64(), 0.42);
    }

    #[test]
    fn simplified_collapses_to_bounds() {
        let e = CopulaExpr::ordinal(vec![(r(0, 1), r(1, 1), CopulaExpr::m().reflect(Axis::Second))])
            .unwrap()
            .reflect(Axis::Second);
        assert_eq!(e.simplified(), CopulaExpr::m());
        assert_eq!(d_b(r(1, 2)).reflect(Axis::First).simplified().as_shuffle().unwrap().n(), 2);
    }
}
