use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::copula::{Axis, CopulaExpr};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The parametric families used to reach the boundary of the region.
///
/// | id | construction | domain |
/// |----|--------------|--------|
/// | `Cb` | 6-piece shuffle, flips all up | `b ∈ [0, ¼]` |
/// | `Db` | 3-piece shuffle, outer pieces flipped | `b ∈ [0, ½]` |
/// | `Gb` | 6-piece shuffle, pieces 2 and 5 flipped | `b ∈ [0, ¼]` |
/// | `Lab` | 10-piece shuffle | `0 ≤ a ≤ b ≤ ¼` |
/// | `Aab` | `NestMiddle(a, C_b)` | `a ∈ [0, ½]`, `b ∈ [0, ¼]` |
/// | `Fab` | `σ₂(NestMiddle(a, σ₂(D_b)))` | `a ∈ [0, ½]`, `b ∈ [0, ½]` |
/// | `Hab` | `NestMiddle(a, G_b)` | `a ∈ [0, ½]`, `b ∈ [0, ¼]` |
/// | `Kab` | `σ₂(H_{a,b})` | as `Hab` |
/// | `Mab` | `σ₂(L_{a,b})` | as `Lab` |
/// | `NestMiddle` | ordinal sum of one summand on `[a, 1 − a]` | `a ∈ [0, ½]` |
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    Cb,
    Db,
    Gb,
    Lab,
    Aab,
    Fab,
    Hab,
    Kab,
    Mab,
    NestMiddle,
}

impl FamilyId {
    pub const ALL: [FamilyId; 10] = [
        FamilyId::Cb,
        FamilyId::Db,
        FamilyId::Gb,
        FamilyId::Lab,
        FamilyId::Aab,
        FamilyId::Fab,
        FamilyId::Hab,
        FamilyId::Kab,
        FamilyId::Mab,
        FamilyId::NestMiddle,
    ];

    /// Letter used in recipes.
    pub fn symbol(self) -> &'static str {
        match self {
            FamilyId::Cb => "C",
            FamilyId::Db => "D",
            FamilyId::Gb => "G",
            FamilyId::Lab => "L",
            FamilyId::Aab => "A",
            FamilyId::Fab => "F",
            FamilyId::Hab => "H",
            FamilyId::Kab => "K",
            FamilyId::Mab => "M",
            FamilyId::NestMiddle => "B",
        }
    }

    /// Whether the family takes the nesting parameter `a`.
    pub fn takes_a(self) -> bool {
        !matches!(self, FamilyId::Cb | FamilyId::Db | FamilyId::Gb)
    }

    /// Whether the family takes the shape parameter `b`.
    pub fn takes_b(self) -> bool {
        self != FamilyId::NestMiddle
    }

    /// Upper end of the `b` domain.
    pub fn b_max(self) -> Scalar {
        match self {
            FamilyId::Db | FamilyId::Fab => Scalar::half(),
            _ => Scalar::ratio(1, 4),
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s) || id.symbol() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family {s:?}")))
    }
}

/// Arguments of [`make_family`]; unused fields are ignored.
#[derive(Clone, Debug, Default)]
pub struct FamilyParams {
    pub a: Option<Scalar>,
    pub b: Option<Scalar>,
    /// The summand of `NestMiddle`.
    pub summand: Option<CopulaExpr>,
}

impl FamilyParams {
    pub fn b(b: Scalar) -> Self {
        FamilyParams { b: Some(b), ..Default::default() }
    }

    pub fn ab(a: Scalar, b: Scalar) -> Self {
        FamilyParams { a: Some(a), b: Some(b), summand: None }
    }

    pub fn nest(a: Scalar, summand: CopulaExpr) -> Self {
        FamilyParams { a: Some(a), b: None, summand: Some(summand) }
    }
}

fn in_range(name: &str, x: &Scalar, lo: &Scalar, hi: &Scalar) -> Result<()> {
    if x.is_finite() && lo <= x && x <= hi {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {x} outside [{lo}, {hi}]")))
    }
}

fn check_a(a: &Scalar) -> Result<()> {
    in_range("a", a, &Scalar::zero(), &Scalar::half())
}

fn check_b(id: FamilyId, b: &Scalar) -> Result<()> {
    in_range("b", b, &Scalar::zero(), &id.b_max())
}

/// Builds a member of a family.
pub fn make_family(id: FamilyId, params: &FamilyParams) -> Result<CopulaExpr> {
    let need = |x: &Option<Scalar>, name: &str| {
        x.clone().ok_or_else(|| Error::InvalidArgument(format!("family {id} needs parameter {name}")))
    };
    if id == FamilyId::NestMiddle {
        let a = need(&params.a, "a")?;
        let summand = params
            .summand
            .clone()
            .ok_or_else(|| Error::InvalidArgument("family NestMiddle needs a summand".into()))?;
        return nest_middle(&a, summand);
    }
    let b = need(&params.b, "b")?;
    match id {
        FamilyId::Cb => c_b(&b),
        FamilyId::Db => d_b(&b),
        FamilyId::Gb => g_b(&b),
        FamilyId::Lab => l_ab(&need(&params.a, "a")?, &b),
        FamilyId::Mab => Ok(l_ab(&need(&params.a, "a")?, &b)?.reflect(Axis::Second)),
        FamilyId::Aab => a_ab(&need(&params.a, "a")?, &b),
        FamilyId::Fab => f_ab(&need(&params.a, "a")?, &b),
        FamilyId::Hab => h_ab(&need(&params.a, "a")?, &b),
        FamilyId::Kab => Ok(h_ab(&need(&params.a, "a")?, &b)?.reflect(Axis::Second)),
        FamilyId::NestMiddle => unreachable!(),
    }
}

/// Ordinal sum of `summand` on `[a, 1 − a]`, `M` elsewhere. `a = 0` returns
/// the summand itself and `a = ½` returns `M`.
pub fn nest_middle(a: &Scalar, summand: CopulaExpr) -> Result<CopulaExpr> {
    check_a(a)?;
    if a.is_zero() {
        return Ok(summand);
    }
    if *a == Scalar::half() {
        return Ok(CopulaExpr::m());
    }
    CopulaExpr::ordinal(vec![(a.clone(), Scalar::one() - a, summand)])
}

/// `M(6, (b, ½−b, ½, ½+b, 1−b), (3,5,1,6,2,4), (1,1,1,1,1,1))`.
pub fn c_b(b: &Scalar) -> Result<CopulaExpr> {
    check_b(FamilyId::Cb, b)?;
    CopulaExpr::shuffle(six_splits(b), vec![3, 5, 1, 6, 2, 4], vec![1; 6])
}

/// `M(3, (b, 1−b), (1,2,3), (−1,1,−1))`.
pub fn d_b(b: &Scalar) -> Result<CopulaExpr> {
    check_b(FamilyId::Db, b)?;
    CopulaExpr::shuffle(vec![b.clone(), Scalar::one() - b], vec![1, 2, 3], vec![-1, 1, -1])
}

/// `M(6, (b, ½−b, ½, ½+b, 1−b), (3,2,1,6,5,4), (1,−1,1,1,−1,1))`.
pub fn g_b(b: &Scalar) -> Result<CopulaExpr> {
    check_b(FamilyId::Gb, b)?;
    CopulaExpr::shuffle(six_splits(b), vec![3, 2, 1, 6, 5, 4], vec![1, -1, 1, 1, -1, 1])
}

/// The 10-piece shuffle with splits
/// `(a, b, ½−b, ½−b+a, ½, ½+b−a, ½+b, 1−b, 1−a)`.
pub fn l_ab(a: &Scalar, b: &Scalar) -> Result<CopulaExpr> {
    check_b(FamilyId::Lab, b)?;
    in_range("a", a, &Scalar::zero(), b)?;
    let h = Scalar::half();
    let one = Scalar::one();
    let splits = vec![
        a.clone(),
        b.clone(),
        &h - b,
        &h - b + a,
        h.clone(),
        &h + b - a,
        &h + b,
        &one - b,
        &one - a,
    ];
    CopulaExpr::shuffle(splits, vec![7, 5, 8, 10, 2, 9, 1, 3, 6, 4], vec![-1, 1, 1, -1, 1, 1, -1, 1, 1, -1])
}

pub fn a_ab(a: &Scalar, b: &Scalar) -> Result<CopulaExpr> {
    nest_middle(a, c_b(b)?)
}

pub fn f_ab(a: &Scalar, b: &Scalar) -> Result<CopulaExpr> {
    Ok(nest_middle(a, d_b(b)?.reflect(Axis::Second))?.reflect(Axis::Second))
}

pub fn h_ab(a: &Scalar, b: &Scalar) -> Result<CopulaExpr> {
    nest_middle(a, g_b(b)?)
}

fn six_splits(b: &Scalar) -> Vec<Scalar> {
    let h = Scalar::half();
    vec![b.clone(), &h - b, h.clone(), &h + b, Scalar::one() - b]
}
