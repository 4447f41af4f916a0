//! Diagonal and opposite-diagonal sections of graph-supported copulas.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::integrate::{collect_kinks, Point};
use super::CopulaExpr;

/// A continuous piecewise-linear function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    breakpoints: Vec<Scalar>,
    values: Vec<Scalar>,
}

impl PiecewiseLinear {
    /// Breakpoints must increase strictly from 0 to 1.
    pub fn new(breakpoints: Vec<Scalar>, values: Vec<Scalar>) -> Result<Self> {
        let ok = breakpoints.len() >= 2
            && breakpoints.len() == values.len()
            && breakpoints[0].is_zero()
            && breakpoints[breakpoints.len() - 1] == Scalar::one()
            && breakpoints.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::InvalidArgument(
                "piecewise-linear breakpoints must increase strictly from 0 to 1".into(),
            ));
        }
        Ok(PiecewiseLinear { breakpoints, values })
    }

    pub fn breakpoints(&self) -> &[Scalar] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        let t = t.clamp_unit();
        let k = self
            .breakpoints
            .windows(2)
            .position(|w| t <= w[1])
            .unwrap_or(self.breakpoints.len() - 2);
        let (t0, t1) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
        let (y0, y1) = (&self.values[k], &self.values[k + 1]);
        y0 + (y1 - y0) * (&t - t0) / (t1 - t0)
    }

    /// `∫₀¹` by the trapezoid rule, exact for polylines.
    pub fn integral(&self) -> Scalar {
        let two = Scalar::int(2);
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, y)| (&t[1] - &t[0]) * (&y[0] + &y[1]) / &two)
            .sum()
    }

    /// Drops breakpoints where the slope does not change.
    fn simplified(self) -> Self {
        let n = self.breakpoints.len();
        let mut keep = vec![true; n];
        for k in 1..n - 1 {
            let (t0, t1, t2) = (&self.breakpoints[k - 1], &self.breakpoints[k], &self.breakpoints[k + 1]);
            let (y0, y1, y2) = (&self.values[k - 1], &self.values[k], &self.values[k + 1]);
            let lhs = (y1 - y0) * (t2 - t1);
            let rhs = (y2 - y1) * (t1 - t0);
            keep[k] = if lhs.is_exact() && rhs.is_exact() {
                lhs != rhs
            } else {
                (lhs.to_f64() - rhs.to_f64()).abs() > 1e-15
            };
        }
        let (breakpoints, values) = self
            .breakpoints
            .into_iter()
            .zip(self.values)
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(bv, _)| bv)
            .unzip();
        PiecewiseLinear { breakpoints, values }
    }
}

fn piecewise_linear_section(expr: &CopulaExpr, what: &str) -> Result<()> {
    match expr {
        CopulaExpr::Convex(m) => m
            .parts()
            .iter()
            .try_for_each(|p| piecewise_linear_section(p.expr(), what)),
        other => other.as_shuffle().map(|_| ()).map_err(|e| match e {
            Error::NotAShuffle(msg) => Error::NotAShuffle(format!("no exact {what}: {msg}")),
            e => e,
        }),
    }
}

fn section(expr: &CopulaExpr, from: Point, to: Point, what: &str) -> Result<PiecewiseLinear> {
    piecewise_linear_section(expr, what)?;
    let mut kinks = vec![Scalar::zero(), Scalar::one()];
    collect_kinks(expr, &from, &to, &mut kinks);
    let (zero, one) = (Scalar::zero(), Scalar::one());
    kinks.retain(|s| *s >= zero && *s <= one);
    kinks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    kinks.dedup();
    let values = kinks
        .iter()
        .map(|t| {
            let y = &from.y + t * (&to.y - &from.y);
            expr.eval(t, &y)
        })
        .collect();
    Ok(PiecewiseLinear::new(kinks, values)?.simplified())
}

/// `δ_C(u) = C(u, u)`.
pub fn diagonal(expr: &CopulaExpr) -> Result<PiecewiseLinear> {
    section(
        expr,
        Point::new(Scalar::zero(), Scalar::zero()),
        Point::new(Scalar::one(), Scalar::one()),
        "diagonal section",
    )
}

/// `ω_C(u) = C(u, 1 - u)`.
pub fn opposite_diagonal(expr: &CopulaExpr) -> Result<PiecewiseLinear> {
    section(
        expr,
        Point::new(Scalar::zero(), Scalar::one()),
        Point::new(Scalar::one(), Scalar::zero()),
        "opposite-diagonal section",
    )
}
