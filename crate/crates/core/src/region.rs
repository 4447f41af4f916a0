//! The attainable region `Ω` of `(φ, γ, τ)`.
//!
//! `Ω` is the convex polyhedron cut out by seven half-spaces `ℓ(φ, γ, τ) ≤ 1`.
//! It has six vertices, seven faces (six triangles and the planar
//! quadrilateral `F5`) and eleven edges. All arithmetic here is exact; float
//! inputs are converted to their exact dyadic values and compared with an
//! explicit tolerance.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default tolerance for float queries.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub phi: Scalar,
    pub gamma: Scalar,
    pub tau: Scalar,
}

impl RegionPoint {
    pub fn new(phi: Scalar, gamma: Scalar, tau: Scalar) -> Self {
        RegionPoint { phi, gamma, tau }
    }

    pub fn from_f64(phi: f64, gamma: f64, tau: f64) -> Self {
        RegionPoint::new(Scalar::float(phi), Scalar::float(gamma), Scalar::float(tau))
    }

    fn ratio(phi: (i64, i64), gamma: (i64, i64), tau: (i64, i64)) -> Self {
        RegionPoint::new(
            Scalar::ratio(phi.0, phi.1),
            Scalar::ratio(gamma.0, gamma.1),
            Scalar::ratio(tau.0, tau.1),
        )
    }

    pub fn coords(&self) -> [&Scalar; 3] {
        [&self.phi, &self.gamma, &self.tau]
    }

    pub fn is_exact(&self) -> bool {
        self.coords().iter().all(|c| c.is_exact())
    }

    /// Same point with every coordinate an exact rational.
    pub fn exact(&self) -> RegionPoint {
        RegionPoint::new(exactify(&self.phi), exactify(&self.gamma), exactify(&self.tau))
    }

    /// Largest coordinate difference.
    pub fn max_abs_diff(&self, other: &RegionPoint) -> Scalar {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (*a - b).abs())
            .fold(Scalar::zero(), |m, d| m.max(&d))
    }
}

impl fmt::Display for RegionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.phi, self.gamma, self.tau)
    }
}

fn exactify(x: &Scalar) -> Scalar {
    x.to_rational().map(Scalar::Exact).unwrap_or_else(|| x.clone())
}

fn tol_scalar(tol: f64) -> Scalar {
    exactify(&Scalar::float(tol.max(0.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexId {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FaceId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
}

impl VertexId {
    pub const ALL: [VertexId; 6] = [VertexId::P1, VertexId::P2, VertexId::P3, VertexId::P4, VertexId::P5, VertexId::P6];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn point(self) -> RegionPoint {
        match self {
            VertexId::P1 => RegionPoint::ratio((-1, 2), (-1, 1), (-1, 1)),
            VertexId::P2 => RegionPoint::ratio((-1, 2), (-1, 2), (-1, 2)),
            VertexId::P3 => RegionPoint::ratio((-1, 2), (-1, 2), (0, 1)),
            VertexId::P4 => RegionPoint::ratio((1, 1), (1, 1), (1, 1)),
            VertexId::P5 => RegionPoint::ratio((1, 4), (1, 2), (0, 1)),
            VertexId::P6 => RegionPoint::ratio((1, 4), (1, 2), (1, 2)),
        }
    }

    /// Faces through this vertex.
    pub fn faces(self) -> Vec<FaceId> {
        FaceId::ALL.into_iter().filter(|f| f.cycle().contains(&self)).collect()
    }
}

impl FaceId {
    pub const ALL: [FaceId; 7] = [FaceId::F1, FaceId::F2, FaceId::F3, FaceId::F4, FaceId::F5, FaceId::F6, FaceId::F7];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_label(label: &str) -> Option<FaceId> {
        FaceId::ALL.into_iter().find(|f| f.to_string().eq_ignore_ascii_case(label))
    }

    /// Vertices in cyclic order.
    pub fn cycle(self) -> &'static [VertexId] {
        use VertexId::*;
        match self {
            FaceId::F1 => &[P1, P2, P3],
            FaceId::F2 => &[P1, P2, P5],
            FaceId::F3 => &[P1, P3, P4],
            FaceId::F4 => &[P1, P4, P5],
            FaceId::F5 => &[P2, P3, P6, P5],
            FaceId::F6 => &[P3, P4, P6],
            FaceId::F7 => &[P4, P5, P6],
        }
    }

    /// Coefficients `(α, β, γ)` of the supporting inequality `αφ + βγ + γτ ≤ 1`.
    pub fn coefficients(self) -> [i64; 3] {
        match self {
            FaceId::F1 => [-2, 0, 0],
            FaceId::F2 => [-2, 3, -3],
            FaceId::F3 => [4, -6, 3],
            FaceId::F4 => [4, 0, -3],
            FaceId::F5 => [-8, 6, 0],
            FaceId::F6 => [-2, 0, 3],
            FaceId::F7 => [-2, 3, 0],
        }
    }

    /// The inequality as text, e.g. `4φ − 3τ ≤ 1`.
    pub fn constraint(self) -> String {
        linear_form_text(&self.coefficients(), &["φ", "γ", "τ"]) + " ≤ 1"
    }

    /// Left-hand side `ℓ(p)`.
    pub fn lhs(self, p: &RegionPoint) -> Scalar {
        let c = self.coefficients();
        p.coords()
            .iter()
            .zip(c)
            .map(|(x, k)| Scalar::int(k) * *x)
            .sum()
    }

    /// Image under the involution `𝒜`.
    pub fn involution(self) -> FaceId {
        match self {
            FaceId::F1 => FaceId::F7,
            FaceId::F7 => FaceId::F1,
            FaceId::F2 => FaceId::F6,
            FaceId::F6 => FaceId::F2,
            FaceId::F3 => FaceId::F4,
            FaceId::F4 => FaceId::F3,
            FaceId::F5 => FaceId::F5,
        }
    }
}

fn linear_form_text(coeffs: &[i64], names: &[&str]) -> String {
    let mut out = String::new();
    for (k, name) in coeffs.iter().zip(names) {
        if *k == 0 {
            continue;
        }
        let mag = k.abs();
        let sign = if *k < 0 { "−" } else { "+" };
        if out.is_empty() {
            if *k < 0 {
                out.push('−');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        if mag != 1 {
            out.push_str(&mag.to_string());
        }
        out.push_str(name);
    }
    out
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.index() + 1)
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.index() + 1)
    }
}

/// The eleven edges, each the intersection of two faces.
pub const EDGES: [(VertexId, VertexId, FaceId, FaceId); 11] = {
    use FaceId::*;
    use VertexId::*;
    [
        (P1, P2, F1, F2),
        (P1, P3, F1, F3),
        (P1, P4, F3, F4),
        (P1, P5, F2, F4),
        (P2, P3, F1, F5),
        (P2, P5, F2, F5),
        (P3, P4, F3, F6),
        (P3, P6, F5, F6),
        (P4, P5, F4, F7),
        (P4, P6, F6, F7),
        (P5, P6, F5, F7),
    ]
};

/// `𝒜(φ, γ, τ) = (φ − 3γ/2, −γ, −τ)`, the action of a σ-reflection on `Ω`.
pub fn involution_a(p: &RegionPoint) -> RegionPoint {
    RegionPoint::new(&p.phi - Scalar::ratio(3, 2) * &p.gamma, -&p.gamma, -&p.tau)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Inside,
    Boundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub face: FaceId,
    pub constraint: String,
    /// Value of the left-hand side.
    pub lhs: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Containment {
    pub status: Status,
    /// Faces whose equality holds within the tolerance.
    pub active: Vec<FaceId>,
    pub violated: Vec<Violation>,
}

/// Evaluates the seven inequalities.
pub fn contains(p: &RegionPoint, tol: f64) -> Containment {
    let p = p.exact();
    let one = Scalar::one();
    let tol = tol_scalar(tol);
    let mut active = Vec::new();
    let mut violated = Vec::new();
    for face in FaceId::ALL {
        let lhs = face.lhs(&p);
        let slack = &lhs - &one;
        if slack > tol {
            violated.push(Violation { face, constraint: face.constraint(), lhs });
        } else if slack.abs() <= tol {
            active.push(face);
        }
    }
    let status = if !violated.is_empty() {
        Status::Outside
    } else if active.is_empty() {
        Status::Inside
    } else {
        Status::Boundary
    };
    Containment { status, active, violated }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Location {
    Interior,
    Face { face: FaceId },
    Edge { from: VertexId, to: VertexId },
    Vertex { vertex: VertexId },
    /// Active faces that do not meet in a single edge or vertex; only
    /// possible with a large tolerance.
    Faces { faces: Vec<FaceId> },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Interior => write!(f, "interior"),
            Location::Face { face } => write!(f, "face {face}"),
            Location::Edge { from, to } => write!(f, "edge {from}{to}"),
            Location::Vertex { vertex } => write!(f, "vertex {vertex}"),
            Location::Faces { faces } => {
                let names: Vec<String> = faces.iter().map(|x| x.to_string()).collect();
                write!(f, "faces {}", names.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub active: Vec<FaceId>,
    /// The most specific location: vertex, then edge, then face.
    pub location: Location,
}

/// Boundary classification from the active face set.
pub fn classify(p: &RegionPoint, tol: f64) -> Result<Classification> {
    let c = contains(p, tol);
    if let Some(v) = c.violated.first() {
        return Err(Error::OutOfRegion { constraint: v.constraint.clone() });
    }
    let active = c.active;
    let location = match active.len() {
        0 => Location::Interior,
        1 => Location::Face { face: active[0] },
        2 => EDGES
            .iter()
            .find(|(_, _, f, g)| active.contains(f) && active.contains(g))
            .map(|(a, b, _, _)| Location::Edge { from: *a, to: *b })
            .unwrap_or(Location::Faces { faces: active.clone() }),
        _ => VertexId::ALL
            .into_iter()
            .map(|v| (v, v.faces().iter().filter(|f| active.contains(f)).count()))
            .filter(|(_, hits)| *hits >= 3)
            .max_by_key(|(_, hits)| *hits)
            .map(|(v, _)| Location::Vertex { vertex: v })
            .unwrap_or(Location::Faces { faces: active.clone() }),
    };
    Ok(Classification { active, location })
}

/// The four constraints of the projection of `Ω` to the `(φ, γ)` plane.
const PROJECTION: [([i64; 2], &str); 4] = [
    ([-2, 0], "−2φ ≤ 1"),
    ([-8, 6], "−8φ + 6γ ≤ 1"),
    ([-2, 3], "−2φ + 3γ ≤ 1"),
    ([4, -3], "4φ − 3γ ≤ 1"),
];

/// `[τ_min, τ_max]` over `Ω` at fixed `(φ, γ)`, with [`DEFAULT_TOL`].
pub fn tau_bounds(phi: &Scalar, gamma: &Scalar) -> Result<(Scalar, Scalar)> {
    tau_bounds_with_tol(phi, gamma, DEFAULT_TOL)
}

/// `τ_min = max{4φ/3 − 1/3, −2φ/3 + γ − 1/3}` and
/// `τ_max = min{2φ/3 + 1/3, −4φ/3 + 2γ + 1/3}`. Within the tolerance band a
/// slightly crossed interval collapses to its midpoint.
pub fn tau_bounds_with_tol(phi: &Scalar, gamma: &Scalar, tol: f64) -> Result<(Scalar, Scalar)> {
    let (phi_x, gamma_x) = (exactify(phi), exactify(gamma));
    let tol_x = tol_scalar(tol);
    for (c, text) in PROJECTION {
        let lhs = Scalar::int(c[0]) * &phi_x + Scalar::int(c[1]) * &gamma_x;
        if lhs - Scalar::one() > tol_x {
            return Err(Error::OutOfRegion { constraint: text.to_string() });
        }
    }
    let r = Scalar::ratio;
    let lo_f4 = r(4, 3) * phi - r(1, 3);
    let lo_f2 = r(-2, 3) * phi + gamma - r(1, 3);
    let hi_f6 = r(2, 3) * phi + r(1, 3);
    let hi_f3 = r(-4, 3) * phi + Scalar::int(2) * gamma + r(1, 3);
    let lo = lo_f4.max(&lo_f2);
    let hi = hi_f6.min(&hi_f3);
    if lo > hi {
        let mid = (&lo + &hi) / Scalar::int(2);
        return Ok((mid.clone(), mid));
    }
    Ok((lo, hi))
}

/// Which face attains each end of [`tau_bounds`]: `(lower, upper)`.
pub fn tau_bound_faces(phi: &Scalar, gamma: &Scalar) -> (FaceId, FaceId) {
    let r = Scalar::ratio;
    let lo_f4 = r(4, 3) * phi - r(1, 3);
    let lo_f2 = r(-2, 3) * phi + gamma - r(1, 3);
    let hi_f6 = r(2, 3) * phi + r(1, 3);
    let hi_f3 = r(-4, 3) * phi + Scalar::int(2) * gamma + r(1, 3);
    let lower = if lo_f4 >= lo_f2 { FaceId::F4 } else { FaceId::F2 };
    let upper = if hi_f6 <= hi_f3 { FaceId::F6 } else { FaceId::F3 };
    (lower, upper)
}

fn sub(a: &[Scalar; 3], b: &[Scalar; 3]) -> [Scalar; 3] {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn det3(a: &[Scalar; 3], b: &[Scalar; 3], c: &[Scalar; 3]) -> Scalar {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

fn vertex_coords(v: VertexId) -> [Scalar; 3] {
    let p = v.point();
    [p.phi, p.gamma, p.tau]
}

/// Exact volume of `Ω`: faces fanned into triangles, each coned to the
/// vertex centroid, with orientations fixed by the outward normals.
pub fn volume() -> Scalar {
    volume_of(&|p: &RegionPoint| p.clone())
}

/// Volume of the image of `Ω` under a linear map of the vertices.
pub fn volume_of(map: &dyn Fn(&RegionPoint) -> RegionPoint) -> Scalar {
    let coords = |v: VertexId| {
        let p = map(&v.point());
        [p.phi, p.gamma, p.tau]
    };
    let six = Scalar::int(6);
    let mut centroid = [Scalar::zero(), Scalar::zero(), Scalar::zero()];
    for v in VertexId::ALL {
        let c = coords(v);
        for k in 0..3 {
            centroid[k] = &centroid[k] + &c[k] / &six;
        }
    }
    let mut total = Scalar::zero();
    for face in FaceId::ALL {
        let cyc: Vec<[Scalar; 3]> = face.cycle().iter().map(|v| coords(*v)).collect();
        for k in 1..cyc.len() - 1 {
            let d = det3(&sub(&cyc[0], &centroid), &sub(&cyc[k], &centroid), &sub(&cyc[k + 1], &centroid));
            total = total + d.abs() / &six;
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plane {
    PhiGamma,
    PhiTau,
    GammaTau,
}

impl Plane {
    pub fn parse(text: &str) -> Option<Plane> {
        match text {
            "phi_gamma" | "phi-gamma" => Some(Plane::PhiGamma),
            "phi_tau" | "phi-tau" => Some(Plane::PhiTau),
            "gamma_tau" | "gamma-tau" => Some(Plane::GammaTau),
            _ => None,
        }
    }

    fn project(self, p: RegionPoint) -> (Scalar, Scalar) {
        match self {
            Plane::PhiGamma => (p.phi, p.gamma),
            Plane::PhiTau => (p.phi, p.tau),
            Plane::GammaTau => (p.gamma, p.tau),
        }
    }
}

fn cross(o: &(Scalar, Scalar), a: &(Scalar, Scalar), b: &(Scalar, Scalar)) -> Scalar {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Convex hull in counter-clockwise order (monotone chain).
fn convex_hull(mut pts: Vec<(Scalar, Scalar)>) -> Vec<(Scalar, Scalar)> {
    pts.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    });
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<(Scalar, Scalar)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(Scalar, Scalar)>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for p in iter {
            while hull.len() >= start + 2
                && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= Scalar::zero()
            {
                hull.pop();
            }
            hull.push(p.clone());
        }
        hull.pop();
    }
    hull
}

/// The projected polygon, counter-clockwise.
pub fn projection(plane: Plane) -> Vec<(Scalar, Scalar)> {
    convex_hull(VertexId::ALL.iter().map(|v| plane.project(v.point())).collect())
}

/// Exact area of the projection of `Ω`.
pub fn projection_area(plane: Plane) -> Scalar {
    let hull = projection(plane);
    let mut twice = Scalar::zero();
    for k in 0..hull.len() {
        let (a, b) = (&hull[k], &hull[(k + 1) % hull.len()]);
        twice = twice + &a.0 * &b.1 - &b.0 * &a.1;
    }
    twice.abs() / Scalar::int(2)
}

/// Volume of the box `[−½, 1] × [−1, 1] × [−1, 1]` of a priori ranges.
pub fn box_volume() -> Scalar {
    Scalar::ratio(3, 2) * Scalar::int(2) * Scalar::int(2)
}

#[derive(Serialize)]
struct MeshVertex {
    label: String,
    phi: Scalar,
    gamma: Scalar,
    tau: Scalar,
}

#[derive(Serialize)]
struct MeshFace {
    label: String,
    cycle: Vec<String>,
}

#[derive(Serialize)]
struct Mesh {
    vertices: Vec<MeshVertex>,
    faces: Vec<MeshFace>,
}

pub fn mesh_json() -> serde_json::Value {
    let mesh = Mesh {
        vertices: VertexId::ALL
            .iter()
            .map(|v| {
                let p = v.point();
                MeshVertex { label: v.to_string(), phi: p.phi, gamma: p.gamma, tau: p.tau }
            })
            .collect(),
        faces: FaceId::ALL
            .iter()
            .map(|f| MeshFace {
                label: f.to_string(),
                cycle: f.cycle().iter().map(|v| v.to_string()).collect(),
            })
            .collect(),
    };
    serde_json::to_value(mesh).expect("mesh serializes")
}

/// Triangle mesh in OBJ format; faces are fanned from their first vertex.
pub fn mesh_obj() -> String {
    let mut out = String::from("# vertices are (phi, gamma, tau)\n");
    for v in VertexId::ALL {
        let [x, y, z] = vertex_coords(v).map(|c| c.to_f64());
        out.push_str(&format!("v {x} {y} {z}\n"));
    }
    for f in FaceId::ALL {
        out.push_str(&format!("g {f}\n"));
        let cyc = f.cycle();
        for k in 1..cyc.len() - 1 {
            out.push_str(&format!(
                "f {} {} {}\n",
                cyc[0].index() + 1,
                cyc[k].index() + 1,
                cyc[k + 1].index() + 1
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Scalar {
        Scalar::ratio(p, q)
    }

    #[test]
    fn vertex_face_incidence_is_exact() {
        for face in FaceId::ALL {
            for v in face.cycle() {
                assert_eq!(face.lhs(&v.point()), Scalar::one(), "{v} on {face}");
            }
            for v in VertexId::ALL {
                assert!(face.lhs(&v.point()) <= Scalar::one());
            }
        }
    }

    #[test]
    fn edges_are_face_intersections() {
        for (a, b, f, g) in EDGES {
            for v in [a, b] {
                assert!(f.cycle().contains(&v) && g.cycle().contains(&v));
            }
            let shared: Vec<_> = f.cycle().iter().filter(|v| g.cycle().contains(v)).collect();
            assert_eq!(shared.len(), 2);
        }
    }

    #[test]
    fn containment_examples() {
        let c = contains(&VertexId::P4.point(), 0.0);
        assert_eq!(c.status, Status::Boundary);
        assert_eq!(c.active, vec![FaceId::F3, FaceId::F4, FaceId::F6, FaceId::F7]);
        assert_eq!(contains(&RegionPoint::from_f64(0.0, 0.0, 0.0), DEFAULT_TOL).status, Status::Inside);
        let out = contains(&RegionPoint::from_f64(1.0, 1.0, -1.0), DEFAULT_TOL);
        assert_eq!(out.status, Status::Outside);
        assert!(out.violated.iter().any(|v| v.face == FaceId::F4 && v.lhs == Scalar::int(7)));
        assert_eq!(FaceId::F4.constraint(), "4φ − 3τ ≤ 1");
    }

    #[test]
    fn tau_bound_examples() {
        assert_eq!(tau_bounds(&r(0, 1), &r(0, 1)).unwrap(), (r(-1, 3), r(1, 3)));
        assert_eq!(tau_bounds(&r(1, 1), &r(1, 1)).unwrap(), (r(1, 1), r(1, 1)));
        assert_eq!(tau_bounds(&r(-1, 2), &r(-1, 2)).unwrap(), (r(-1, 2), r(0, 1)));
        match tau_bounds(&r(1, 1), &r(-1, 1)) {
            Err(Error::OutOfRegion { constraint }) => assert_eq!(constraint, "4φ − 3γ ≤ 1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn involution_table() {
        use VertexId::*;
        for (a, b) in [(P1, P4), (P2, P6), (P3, P5)] {
            assert_eq!(involution_a(&a.point()), b.point());
            assert_eq!(involution_a(&b.point()), a.point());
        }
        let origin = RegionPoint::ratio((0, 1), (0, 1), (0, 1));
        assert_eq!(involution_a(&origin), origin);
        for f in FaceId::ALL {
            let mut image: Vec<RegionPoint> = f.cycle().iter().map(|v| involution_a(&v.point())).collect();
            let mut target: Vec<RegionPoint> = f.involution().cycle().iter().map(|v| v.point()).collect();
            let key = |p: &RegionPoint| p.to_string();
            image.sort_by_key(key);
            target.sort_by_key(key);
            assert_eq!(image, target, "{f}");
        }
    }

    #[test]
    fn classification_examples() {
        let edge = classify(&RegionPoint::ratio((1, 4), (1, 2), (1, 4)), 0.0).unwrap();
        assert_eq!(edge.location, Location::Edge { from: VertexId::P5, to: VertexId::P6 });
        let vertex = classify(&VertexId::P6.point(), 0.0).unwrap();
        assert_eq!(vertex.location, Location::Vertex { vertex: VertexId::P6 });
        let inner = classify(&RegionPoint::ratio((0, 1), (0, 1), (0, 1)), 0.0).unwrap();
        assert_eq!(inner.location, Location::Interior);
        for v in VertexId::ALL {
            assert_eq!(classify(&v.point(), 0.0).unwrap().location, Location::Vertex { vertex: v });
        }
    }

    #[test]
    fn volume_and_areas() {
        assert_eq!(volume(), r(3, 16));
        assert_eq!(volume_of(&involution_a), r(3, 16));
        assert_eq!(projection_area(Plane::PhiGamma), r(9, 16));
        assert_eq!(projection_area(Plane::PhiTau), r(3, 4));
        assert_eq!(projection_area(Plane::GammaTau), r(1, 1));
        assert_eq!(volume() / box_volume(), r(1, 32));
    }

    #[test]
    fn quadrilateral_face_is_planar() {
        let f5 = FaceId::F5;
        assert_eq!(f5.cycle().len(), 4);
        assert!(f5.cycle().iter().all(|v| f5.lhs(&v.point()) == Scalar::one()));
    }

    #[test]
    fn obj_export_is_triangulated() {
        let obj = mesh_obj();
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 8);
        let json = mesh_json();
        assert_eq!(json["vertices"][0]["phi"], "-1/2");
        assert_eq!(json["faces"][4]["cycle"][2], "P6");
    }
}
