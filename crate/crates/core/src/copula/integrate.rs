//! Exact integration of copula expressions along straight segments and
//! against the mass of another expression.
//!
//! Restricted to a segment, every expression is piecewise polynomial of
//! degree at most two: shuffles and the bounds are piecewise linear, `Π` is
//! quadratic, and ordinal sums, reflections and mixtures preserve this. The
//! breakpoints ("kinks") are collected structurally, and Simpson's rule,
//! exact for cubics, is applied between consecutive kinks. With rational
//! inputs the result is an exact rational.
//!
//! The same idea gives `∫ C₂ dC₁` exactly: the mass of `C₁` decomposes into
//! uniform densities on segments and axis-parallel rectangles ([`MassAtom`]);
//! segments are handled by [`segment_mean`], rectangles by Fubini,
//! `∫∫_R C₂ = ∫ (x₁ - max(s, x₀))⁺ (y₁ - max(t, y₀))⁺ dC₂(s, t)`,
//! which is again a piecewise quadratic along every atom of `C₂`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Axis, BaseCopula, CopulaExpr, Flip, ShuffleOfM};

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point { x, y }
    }

    fn lerp(&self, to: &Point, s: &Scalar) -> Point {
        Point {
            x: &self.x + s * (&to.x - &self.x),
            y: &self.y + s * (&to.y - &self.y),
        }
    }

    fn inside_unit_square(&self) -> bool {
        let (z, o) = (Scalar::zero(), Scalar::one());
        self.x >= z && self.x <= o && self.y >= z && self.y <= o
    }
}

/// A straight piece of a path, traversed uniformly over a parameter range of
/// length `weight`: it contributes `weight · mean(C on the segment)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSegment {
    pub from: Point,
    pub to: Point,
    pub weight: Scalar,
}

/// A finite chain of straight segments inside the unit square.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanePath {
    segments: Vec<PathSegment>,
}

impl PlanePath {
    pub fn new(segments: Vec<PathSegment>) -> Result<Self> {
        for seg in &segments {
            if !seg.from.inside_unit_square() || !seg.to.inside_unit_square() {
                return Err(Error::InvalidArgument(format!(
                    "path segment ({}, {}) -> ({}, {}) leaves the unit square",
                    seg.from.x, seg.from.y, seg.to.x, seg.to.y
                )));
            }
            if seg.weight < Scalar::zero() {
                return Err(Error::InvalidArgument("negative path weight".into()));
            }
        }
        Ok(PlanePath { segments })
    }

    /// `u ↦ (u, u)`.
    pub fn diagonal() -> Self {
        PlanePath {
            segments: vec![PathSegment {
                from: Point::new(Scalar::zero(), Scalar::zero()),
                to: Point::new(Scalar::one(), Scalar::one()),
                weight: Scalar::one(),
            }],
        }
    }

    /// `u ↦ (u, 1 - u)`.
    pub fn anti_diagonal() -> Self {
        PlanePath {
            segments: vec![PathSegment {
                from: Point::new(Scalar::zero(), Scalar::one()),
                to: Point::new(Scalar::one(), Scalar::zero()),
                weight: Scalar::one(),
            }],
        }
    }

    /// `u ↦ (u, h(u))` for a shuffle, one segment per nonempty piece.
    pub fn graph(s: &ShuffleOfM) -> Self {
        let segments = s
            .pieces()
            .iter()
            .filter(|p| p.u1 > p.u0)
            .map(|p| {
                let ((x0, y0), (x1, y1)) = p.endpoints();
                PathSegment {
                    from: Point::new(x0, y0),
                    to: Point::new(x1, y1),
                    weight: p.width(),
                }
            })
            .collect();
        PlanePath { segments }
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }
}

/// `∫ C(x(t), y(t)) dt` along the path.
pub fn line_integral(expr: &CopulaExpr, path: &PlanePath) -> Scalar {
    path.segments
        .iter()
        .map(|seg| &seg.weight * segment_mean(expr, &seg.from, &seg.to))
        .sum()
}

/// Mean of `C` over the segment `from → to` under uniform parametrisation.
pub fn segment_mean(expr: &CopulaExpr, from: &Point, to: &Point) -> Scalar {
    simpson_mean(from, to, |s| collect_kinks(expr, from, to, s), |p| expr.eval(&p.x, &p.y))
}

/// Sorted, deduplicated parameters in `[0, 1]` including both ends.
fn partition(mut kinks: Vec<Scalar>) -> Vec<Scalar> {
    let (zero, one) = (Scalar::zero(), Scalar::one());
    kinks.retain(|s| *s > zero && *s < one);
    kinks.push(zero);
    kinks.push(one);
    kinks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    kinks.dedup();
    kinks
}

fn simpson_mean(
    from: &Point,
    to: &Point,
    kinks: impl FnOnce(&mut Vec<Scalar>),
    f: impl Fn(&Point) -> Scalar,
) -> Scalar {
    if from == to {
        return f(from);
    }
    let mut raw = Vec::new();
    kinks(&mut raw);
    let grid = partition(raw);
    let two = Scalar::int(2);
    let six = Scalar::int(6);
    let four = Scalar::int(4);
    let mut total = Scalar::zero();
    let mut f_left = f(from);
    for w in grid.windows(2) {
        let mid = (&w[0] + &w[1]) / &two;
        let f_mid = f(&from.lerp(to, &mid));
        let f_right = f(&from.lerp(to, &w[1]));
        total = total + (&w[1] - &w[0]) * (&f_left + &four * f_mid + &f_right) / &six;
        f_left = f_right;
    }
    total
}

struct Line<'a> {
    from: &'a Point,
    dx: Scalar,
    dy: Scalar,
}

impl<'a> Line<'a> {
    fn new(from: &'a Point, to: &Point) -> Self {
        Line { from, dx: &to.x - &from.x, dy: &to.y - &from.y }
    }

    /// Parameter where `α x + β y = c`, if the segment is not parallel to it.
    fn crossing(&self, alpha: i64, beta: i64, c: &Scalar, out: &mut Vec<Scalar>) {
        let (a, b) = (Scalar::int(alpha), Scalar::int(beta));
        let denom = &a * &self.dx + &b * &self.dy;
        if denom.is_zero() {
            return;
        }
        out.push((c - &a * &self.from.x - &b * &self.from.y) / denom);
    }

    fn x_at(&self, c: &Scalar, out: &mut Vec<Scalar>) {
        self.crossing(1, 0, c, out);
    }

    fn y_at(&self, c: &Scalar, out: &mut Vec<Scalar>) {
        self.crossing(0, 1, c, out);
    }

    fn box_edges(&self, lo: &Scalar, hi: &Scalar, out: &mut Vec<Scalar>) {
        self.x_at(lo, out);
        self.x_at(hi, out);
        self.y_at(lo, out);
        self.y_at(hi, out);
    }
}

/// Pushes every parameter where `C` restricted to the segment may change its
/// polynomial form. Values outside `(0, 1)` are discarded later.
pub(crate) fn collect_kinks(expr: &CopulaExpr, from: &Point, to: &Point, out: &mut Vec<Scalar>) {
    let line = Line::new(from, to);
    let (zero, one) = (Scalar::zero(), Scalar::one());
    // clamping to the unit square
    line.box_edges(&zero, &one, out);
    match expr {
        CopulaExpr::Base(BaseCopula::M) => line.crossing(1, -1, &zero, out),
        CopulaExpr::Base(BaseCopula::W) => line.crossing(1, 1, &one, out),
        CopulaExpr::Base(BaseCopula::Pi) => {}
        CopulaExpr::Shuffle(s) => {
            for u in s.splits() {
                line.x_at(u, out);
            }
            for v in s.images() {
                line.y_at(v, out);
            }
            for p in s.pieces() {
                match p.flip {
                    Flip::Up => line.crossing(1, -1, &(&p.u0 - &p.v0), out),
                    Flip::Down => line.crossing(1, 1, &(&p.v1 + &p.u0), out),
                }
            }
        }
        CopulaExpr::Ordinal(o) => {
            line.crossing(1, -1, &zero, out);
            for blk in o.blocks() {
                line.box_edges(blk.a(), blk.b(), out);
                let w = blk.width();
                let local = |p: &Point| Point::new((&p.x - blk.a()) / &w, (&p.y - blk.a()) / &w);
                collect_kinks(blk.summand(), &local(from), &local(to), out);
            }
        }
        CopulaExpr::Reflect { axis, of } => {
            let (f, t) = (reflect_point(from, *axis), reflect_point(to, *axis));
            collect_kinks(of, &f, &t, out);
        }
        CopulaExpr::Convex(m) => {
            for part in m.parts() {
                collect_kinks(part.expr(), from, to, out);
            }
        }
    }
}

fn reflect_point(p: &Point, axis: Axis) -> Point {
    match axis {
        Axis::First => Point::new(Scalar::one() - &p.x, p.y.clone()),
        Axis::Second => Point::new(p.x.clone(), Scalar::one() - &p.y),
    }
}

/// A piece of the probability mass of a copula with uniform density.
#[derive(Clone, Debug, PartialEq)]
pub enum MassAtom {
    /// Mass spread uniformly along a segment.
    Segment { from: Point, to: Point, mass: Scalar },
    /// Mass spread uniformly over `[x0, x1] × [y0, y1]`.
    Rect { x0: Scalar, x1: Scalar, y0: Scalar, y1: Scalar, mass: Scalar },
}

impl MassAtom {
    pub fn mass(&self) -> &Scalar {
        match self {
            MassAtom::Segment { mass, .. } | MassAtom::Rect { mass, .. } => mass,
        }
    }

    fn map(&self, f: &impl Fn(&Point) -> Point, scale: &Scalar) -> MassAtom {
        match self {
            MassAtom::Segment { from, to, mass } => MassAtom::Segment {
                from: f(from),
                to: f(to),
                mass: mass * scale,
            },
            MassAtom::Rect { x0, x1, y0, y1, mass } => {
                let a = f(&Point::new(x0.clone(), y0.clone()));
                let b = f(&Point::new(x1.clone(), y1.clone()));
                MassAtom::Rect {
                    x0: a.x.min(&b.x),
                    x1: a.x.max(&b.x),
                    y0: a.y.min(&b.y),
                    y1: a.y.max(&b.y),
                    mass: mass * scale,
                }
            }
        }
    }

    /// `E[C(S, T)]` for `(S, T)` distributed according to this atom.
    pub fn expect(&self, expr: &CopulaExpr) -> Scalar {
        match self {
            MassAtom::Segment { from, to, .. } => segment_mean(expr, from, to),
            MassAtom::Rect { x0, x1, y0, y1, .. } => {
                let area = (x1 - x0) * (y1 - y0);
                let integral: Scalar = mass_atoms(expr)
                    .iter()
                    .map(|b| b.mass() * b.expect_box_kernel(x0, x1, y0, y1))
                    .sum();
                integral / area
            }
        }
    }

    /// `E[(x1 - max(S, x0))⁺ (y1 - max(T, y0))⁺]` under this atom.
    fn expect_box_kernel(&self, x0: &Scalar, x1: &Scalar, y0: &Scalar, y1: &Scalar) -> Scalar {
        let kernel = |p: &Point| ramp(x0, x1, &p.x) * ramp(y0, y1, &p.y);
        match self {
            MassAtom::Segment { from, to, .. } => simpson_mean(
                from,
                to,
                |out| Line::new(from, to).box_edges_xy(x0, x1, y0, y1, out),
                kernel,
            ),
            MassAtom::Rect { x0: s0, x1: s1, y0: t0, y1: t1, .. } => {
                interval_mean(s0, s1, x0, x1) * interval_mean(t0, t1, y0, y1)
            }
        }
    }
}

impl<'a> Line<'a> {
    fn box_edges_xy(&self, x0: &Scalar, x1: &Scalar, y0: &Scalar, y1: &Scalar, out: &mut Vec<Scalar>) {
        self.x_at(x0, out);
        self.x_at(x1, out);
        self.y_at(y0, out);
        self.y_at(y1, out);
    }
}

/// `(hi - max(s, lo))⁺`.
fn ramp(lo: &Scalar, hi: &Scalar, s: &Scalar) -> Scalar {
    (hi - s.max(lo)).max(&Scalar::zero())
}

/// Mean of `ramp(lo, hi, ·)` over `[s0, s1]`.
fn interval_mean(s0: &Scalar, s1: &Scalar, lo: &Scalar, hi: &Scalar) -> Scalar {
    let from = Point::new(s0.clone(), Scalar::zero());
    let to = Point::new(s1.clone(), Scalar::zero());
    simpson_mean(
        &from,
        &to,
        |out| {
            let line = Line::new(&from, &to);
            line.x_at(lo, out);
            line.x_at(hi, out);
        },
        |p| ramp(lo, hi, &p.x),
    )
}

/// Decomposes the copula's probability mass into uniform atoms.
pub fn mass_atoms(expr: &CopulaExpr) -> Vec<MassAtom> {
    let (zero, one) = (Scalar::zero(), Scalar::one());
    match expr {
        CopulaExpr::Base(BaseCopula::M) => vec![diagonal_atom(&zero, &one)],
        CopulaExpr::Base(BaseCopula::W) => vec![MassAtom::Segment {
            from: Point::new(zero, one.clone()),
            to: Point::new(one.clone(), Scalar::zero()),
            mass: one,
        }],
        CopulaExpr::Base(BaseCopula::Pi) => vec![MassAtom::Rect {
            x0: zero.clone(),
            x1: one.clone(),
            y0: zero,
            y1: one.clone(),
            mass: one,
        }],
        CopulaExpr::Shuffle(s) => s
            .pieces()
            .iter()
            .filter(|p| p.u1 > p.u0)
            .map(|p| {
                let ((x0, y0), (x1, y1)) = p.endpoints();
                MassAtom::Segment {
                    from: Point::new(x0, y0),
                    to: Point::new(x1, y1),
                    mass: p.width(),
                }
            })
            .collect(),
        CopulaExpr::Ordinal(o) => {
            let mut atoms = Vec::new();
            let mut cursor = zero;
            for blk in o.blocks() {
                if &cursor < blk.a() {
                    atoms.push(diagonal_atom(&cursor, blk.a()));
                }
                let w = blk.width();
                let to_global = |p: &Point| Point::new(blk.a() + &w * &p.x, blk.a() + &w * &p.y);
                atoms.extend(mass_atoms(blk.summand()).iter().map(|a| a.map(&to_global, &w)));
                cursor = blk.b().clone();
            }
            if cursor < one {
                atoms.push(diagonal_atom(&cursor, &one));
            }
            atoms
        }
        CopulaExpr::Reflect { axis, of } => {
            let axis = *axis;
            mass_atoms(of)
                .iter()
                .map(|a| a.map(&|p: &Point| reflect_point(p, axis), &one))
                .collect()
        }
        CopulaExpr::Convex(m) => m
            .parts()
            .iter()
            .flat_map(|part| {
                let w = part.weight().clone();
                mass_atoms(part.expr())
                    .into_iter()
                    .map(move |a| a.map(&|p: &Point| p.clone(), &w))
            })
            .filter(|a| !a.mass().is_zero())
            .collect(),
    }
}

fn diagonal_atom(from: &Scalar, to: &Scalar) -> MassAtom {
    MassAtom::Segment {
        from: Point::new(from.clone(), from.clone()),
        to: Point::new(to.clone(), to.clone()),
        mass: to - from,
    }
}

/// `∫ C₂ dC₁` from the atoms of `C₁`.
pub(crate) fn integral_against(c1: &CopulaExpr, c2: &CopulaExpr) -> Scalar {
    mass_atoms(c1).iter().map(|a| a.mass() * a.expect(c2)).sum()
}
