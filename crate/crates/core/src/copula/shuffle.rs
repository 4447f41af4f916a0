//! Shuffles of M: copulas whose mass sits on finitely many segments of slope ±1.
//!
//! A shuffle cuts `[0,1]` at `u_1 ≤ … ≤ u_{n-1}`, sends piece `i` onto image band
//! `perm(i)` and traverses it upwards (`Flip::Up`) or downwards (`Flip::Down`).
//! Image bands are laid out so that band `j` has the width of the domain piece
//! mapped onto it.
//!
//! Pieces are half-open `[u_{i-1}, u_i)` with the last one closed at 1; this
//! fixes the value of `h` on the (null) set of breakpoints.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Axis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flip {
    Up,
    Down,
}

impl Flip {
    pub fn sign(self) -> i8 {
        match self {
            Flip::Up => 1,
            Flip::Down => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Flip> {
        match sign {
            1 => Some(Flip::Up),
            -1 => Some(Flip::Down),
            _ => None,
        }
    }

    pub fn reversed(self) -> Flip {
        match self {
            Flip::Up => Flip::Down,
            Flip::Down => Flip::Up,
        }
    }
}

/// One mass segment: `[u0, u1] → [v0, v1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub u0: Scalar,
    pub u1: Scalar,
    pub v0: Scalar,
    pub v1: Scalar,
    pub flip: Flip,
}

impl Piece {
    pub fn width(&self) -> Scalar {
        &self.u1 - &self.u0
    }

    pub fn h(&self, u: &Scalar) -> Scalar {
        match self.flip {
            Flip::Up => u + &self.v0 - &self.u0,
            Flip::Down => &self.v1 + &self.u0 - u,
        }
    }

    /// Endpoints of the support segment, left to right.
    pub fn endpoints(&self) -> ((Scalar, Scalar), (Scalar, Scalar)) {
        match self.flip {
            Flip::Up => (
                (self.u0.clone(), self.v0.clone()),
                (self.u1.clone(), self.v1.clone()),
            ),
            Flip::Down => (
                (self.u0.clone(), self.v1.clone()),
                (self.u1.clone(), self.v0.clone()),
            ),
        }
    }

    /// `λ{t ∈ [u0, min(u, u1)] : h(t) ≤ v}`.
    pub fn mass_below(&self, u: &Scalar, v: &Scalar) -> Scalar {
        let zero = Scalar::zero();
        match self.flip {
            Flip::Up => {
                let hi = u.min(&self.u1).min(&(v - &self.v0 + &self.u0));
                (hi - &self.u0).max(&zero)
            }
            Flip::Down => {
                let hi = u.min(&self.u1);
                let lo = self.u0.max(&(&self.v1 + &self.u0 - v));
                (hi - lo).max(&zero)
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct FastPiece {
    u0: f64,
    u1: f64,
    v0: f64,
    v1: f64,
    up: bool,
}

impl FastPiece {
    fn mass_below(&self, u: f64, v: f64) -> f64 {
        if self.up {
            (u.min(self.u1).min(v - self.v0 + self.u0) - self.u0).max(0.0)
        } else {
            (u.min(self.u1) - self.u0.max(self.v1 + self.u0 - v)).max(0.0)
        }
    }
}

#[derive(Clone)]
pub struct ShuffleOfM {
    /// `u_0 = 0, …, u_n = 1`.
    splits: Vec<Scalar>,
    /// Zero-based image band of each piece.
    perm: Vec<usize>,
    flips: Vec<Flip>,
    /// `v_0 = 0, …, v_n = 1`.
    images: Vec<Scalar>,
    pieces: Vec<Piece>,
    fast: Vec<FastPiece>,
}

impl fmt::Debug for ShuffleOfM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let splits: Vec<String> = self.interior_splits().iter().map(|s| s.to_string()).collect();
        let flips: Vec<i8> = self.flips.iter().map(|f| f.sign()).collect();
        write!(
            f,
            "M({}, ({}), {:?}, {:?})",
            self.n(),
            splits.join(", "),
            self.perm_one_based(),
            flips
        )
    }
}

impl PartialEq for ShuffleOfM {
    fn eq(&self, other: &Self) -> bool {
        self.splits == other.splits && self.perm == other.perm && self.flips == other.flips
    }
}

impl ShuffleOfM {
    /// Builds `M(n, J, π, ω)` from the interior splitting points `J`, the
    /// one-based image tuple `π` and the flip signs `ω`.
    ///
    /// `splits` may also include the endpoints `0` and `1`.
    pub fn new(splits: Vec<Scalar>, perm: Vec<usize>, flips: Vec<i64>) -> Result<Self> {
        let n = perm.len();
        let invalid = |msg: String| Err(Error::InvalidExpression(msg));
        if n == 0 {
            return invalid("shuffle needs at least one piece".into());
        }
        if flips.len() != n {
            return invalid(format!("shuffle has {n} pieces but {} flips", flips.len()));
        }
        let full = if splits.len() + 1 == n {
            let mut full = Vec::with_capacity(n + 1);
            full.push(Scalar::zero());
            full.extend(splits);
            full.push(Scalar::one());
            full
        } else if splits.len() == n + 1
            && splits[0].is_zero()
            && splits[n] == Scalar::one()
        {
            splits
        } else {
            return invalid(format!(
                "shuffle with {n} pieces needs {} interior splits, got {}",
                n - 1,
                splits.len()
            ));
        };
        if full.iter().any(|s| !s.is_finite() || *s < Scalar::zero() || *s > Scalar::one()) {
            return invalid("shuffle splits must lie in [0,1]".into());
        }
        if full.windows(2).any(|w| w[1] < w[0]) {
            return invalid("shuffle splits must be nondecreasing".into());
        }
        let mut seen = vec![false; n];
        let mut zero_based = Vec::with_capacity(n);
        for &p in &perm {
            if p == 0 || p > n || seen[p - 1] {
                return invalid(format!("{perm:?} is not a permutation of 1..={n}"));
            }
            seen[p - 1] = true;
            zero_based.push(p - 1);
        }
        let flips = flips
            .into_iter()
            .map(|s| {
                Flip::from_sign(s)
                    .ok_or_else(|| Error::InvalidExpression(format!("flip {s} is not ±1")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(full, zero_based, flips))
    }

    fn assemble(splits: Vec<Scalar>, perm: Vec<usize>, flips: Vec<Flip>) -> Self {
        let n = perm.len();
        let mut inverse = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let mut images = Vec::with_capacity(n + 1);
        images.push(Scalar::zero());
        for j in 0..n {
            let i = inverse[j];
            let w = &splits[i + 1] - &splits[i];
            let next = if j + 1 == n {
                Scalar::one()
            } else {
                &images[j] + w
            };
            images.push(next);
        }
        let pieces: Vec<Piece> = (0..n)
            .map(|i| Piece {
                u0: splits[i].clone(),
                u1: splits[i + 1].clone(),
                v0: images[perm[i]].clone(),
                v1: images[perm[i] + 1].clone(),
                flip: flips[i],
            })
            .collect();
        let fast = pieces
            .iter()
            .map(|p| FastPiece {
                u0: p.u0.to_f64(),
                u1: p.u1.to_f64(),
                v0: p.v0.to_f64(),
                v1: p.v1.to_f64(),
                up: p.flip == Flip::Up,
            })
            .collect();
        ShuffleOfM { splits, perm, flips, images, pieces, fast }
    }

    /// Rebuilds a shuffle from pieces listed in domain order. Only the widths,
    /// the order of the image bands and the flips are used; image coordinates
    /// are recomputed.
    pub fn from_pieces(pieces: &[Piece]) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidExpression("no pieces".into()));
        }
        let mut order: Vec<usize> = (0..pieces.len()).collect();
        order.sort_by(|&a, &b| {
            pieces[a]
                .v0
                .partial_cmp(&pieces[b].v0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut perm = vec![0; pieces.len()];
        for (band, &i) in order.iter().enumerate() {
            perm[i] = band;
        }
        let mut splits = Vec::with_capacity(pieces.len() + 1);
        splits.push(Scalar::zero());
        for p in &pieces[..pieces.len() - 1] {
            splits.push(p.u1.clone());
        }
        splits.push(Scalar::one());
        Ok(Self::assemble(
            splits,
            perm,
            pieces.iter().map(|p| p.flip).collect(),
        ))
    }

    /// The shuffle representation of M.
    pub fn identity() -> Self {
        Self::assemble(vec![Scalar::zero(), Scalar::one()], vec![0], vec![Flip::Up])
    }

    /// The shuffle representation of W.
    pub fn counter_identity() -> Self {
        Self::assemble(vec![Scalar::zero(), Scalar::one()], vec![0], vec![Flip::Down])
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// All breakpoints `u_0 = 0, …, u_n = 1`.
    pub fn splits(&self) -> &[Scalar] {
        &self.splits
    }

    pub fn interior_splits(&self) -> &[Scalar] {
        &self.splits[1..self.splits.len() - 1]
    }

    pub fn perm_one_based(&self) -> Vec<usize> {
        self.perm.iter().map(|p| p + 1).collect()
    }

    pub fn flips(&self) -> &[Flip] {
        &self.flips
    }

    /// Image breakpoints `v_0 = 0, …, v_n = 1`.
    pub fn images(&self) -> &[Scalar] {
        &self.images
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_exact(&self) -> bool {
        self.splits.iter().all(Scalar::is_exact)
    }

    /// The measure-preserving bijection `h`.
    pub fn h(&self, u: &Scalar) -> Scalar {
        let u = u.clamp_unit();
        let mut last = None;
        for p in &self.pieces {
            if p.u1 <= p.u0 {
                continue;
            }
            if u < p.u1 {
                return p.h(&u);
            }
            last = Some(p);
        }
        match last {
            Some(p) => p.h(&u),
            None => u,
        }
    }

    pub fn h_f64(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let mut last = None;
        for p in &self.fast {
            if p.u1 <= p.u0 {
                continue;
            }
            if u < p.u1 {
                return fast_h(p, u);
            }
            last = Some(p);
        }
        last.map_or(u, |p| fast_h(p, u))
    }

    /// `C(u, v) = λ{t ≤ u : h(t) ≤ v}`.
    pub fn eval(&self, u: &Scalar, v: &Scalar) -> Scalar {
        let u = u.clamp_unit();
        let v = v.clamp_unit();
        self.pieces
            .iter()
            .filter(|p| p.u0 < u)
            .map(|p| p.mass_below(&u, &v))
            .sum()
    }

    pub fn eval_f64(&self, u: f64, v: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let v = v.clamp(0.0, 1.0);
        self.fast
            .iter()
            .take_while(|p| p.u0 < u)
            .map(|p| p.mass_below(u, v))
            .sum()
    }

    /// Canonical form: zero-width pieces dropped, adjacent collinear pieces merged.
    pub fn normalized(&self) -> Self {
        let mut merged: Vec<Piece> = Vec::with_capacity(self.n());
        for p in self.pieces.iter().filter(|p| p.u1 > p.u0) {
            if let Some(last) = merged.last_mut() {
                let joins = last.flip == p.flip
                    && match p.flip {
                        Flip::Up => last.v1 == p.v0,
                        Flip::Down => last.v0 == p.v1,
                    };
                if joins {
                    last.u1 = p.u1.clone();
                    match p.flip {
                        Flip::Up => last.v1 = p.v1.clone(),
                        Flip::Down => last.v0 = p.v0.clone(),
                    }
                    continue;
                }
            }
            merged.push(p.clone());
        }
        if merged.is_empty() {
            return Self::identity();
        }
        Self::from_pieces(&merged).expect("pieces of a valid shuffle")
    }

    /// `C^σ₁` or `C^σ₂` as a shuffle.
    pub fn reflected(&self, axis: Axis) -> Self {
        let one = Scalar::one();
        let pieces: Vec<Piece> = match axis {
            // mass at (1 - t, h(t))
            Axis::First => self
                .pieces
                .iter()
                .rev()
                .map(|p| Piece {
                    u0: &one - &p.u1,
                    u1: &one - &p.u0,
                    v0: p.v0.clone(),
                    v1: p.v1.clone(),
                    flip: p.flip.reversed(),
                })
                .collect(),
            // mass at (t, 1 - h(t))
            Axis::Second => self
                .pieces
                .iter()
                .map(|p| Piece {
                    u0: p.u0.clone(),
                    u1: p.u1.clone(),
                    v0: &one - &p.v1,
                    v1: &one - &p.v0,
                    flip: p.flip.reversed(),
                })
                .collect(),
        };
        Self::from_pieces(&pieces).expect("reflection of a valid shuffle")
    }

    /// Same shuffle with every coordinate in float mode.
    pub fn to_float(&self) -> Self {
        Self::assemble(
            self.splits.iter().map(Scalar::to_float).collect(),
            self.perm.clone(),
            self.flips.clone(),
        )
    }
}

fn fast_h(p: &FastPiece, u: f64) -> f64 {
    if p.up {
        u + p.v0 - p.u0
    } else {
        p.v1 + p.u0 - u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Scalar {
        Scalar::ratio(p, q)
    }

    fn c_quarter() -> ShuffleOfM {
        ShuffleOfM::new(
            vec![r(1, 4), r(1, 4), r(1, 2), r(3, 4), r(3, 4)],
            vec![3, 5, 1, 6, 2, 4],
            vec![1; 6],
        )
        .unwrap()
    }

    #[test]
    fn images_follow_widths() {
        let s = c_quarter();
        assert_eq!(
            s.images(),
            &[r(0, 1), r(1, 4), r(1, 4), r(1, 2), r(3, 4), r(3, 4), r(1, 1)]
        );
    }

    #[test]
    fn h_on_pieces() {
        let s = c_quarter();
        assert_eq!(s.h(&Scalar::float(0.1)).to_f64(), 0.35);
        assert!((s.h(&Scalar::float(0.3)).to_f64() - 0.05).abs() < 1e-15);
        assert_eq!(s.h(&r(1, 10)), r(7, 20));
        assert_eq!(s.h(&r(3, 10)), r(1, 20));
        // half-open pieces: u = 1/4 belongs to the piece starting there
        assert_eq!(s.h(&r(1, 4)), r(0, 1));
        assert_eq!(s.h(&Scalar::one()), r(3, 4));
    }

    #[test]
    fn eval_matches_h_measure() {
        let s = c_quarter();
        assert_eq!(s.eval(&r(1, 2), &r(1, 2)), r(1, 2));
        assert_eq!(s.eval(&r(1, 4), &r(1, 4)), r(0, 1));
        assert_eq!(s.eval_f64(0.5, 0.5), 0.5);
    }

    #[test]
    fn normalization_drops_and_merges() {
        let s = c_quarter().normalized();
        assert_eq!(s.n(), 4);
        let m = ShuffleOfM::new(vec![r(1, 3), r(1, 3), r(1, 2)], vec![1, 2, 3, 4], vec![1; 4])
            .unwrap()
            .normalized();
        assert_eq!(m, ShuffleOfM::identity());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ShuffleOfM::new(vec![r(1, 2)], vec![1, 1], vec![1, 1]).is_err());
        assert!(ShuffleOfM::new(vec![r(1, 2)], vec![1, 2], vec![1, 0]).is_err());
        assert!(ShuffleOfM::new(vec![r(3, 2)], vec![1, 2], vec![1, 1]).is_err());
        assert!(ShuffleOfM::new(vec![r(1, 2), r(1, 4)], vec![1, 2, 3], vec![1; 3]).is_err());
        assert!(ShuffleOfM::new(vec![], vec![1, 2], vec![1, 1]).is_err());
    }

    #[test]
    fn second_reflection_reverses_images() {
        let s = c_quarter().normalized();
        let t = s.reflected(Axis::Second);
        assert!(t.flips().iter().all(|f| *f == Flip::Down));
        let n = s.n();
        for (a, b) in s.perm_one_based().iter().zip(t.perm_one_based()) {
            assert_eq!(a + b, n + 1);
        }
    }
}
