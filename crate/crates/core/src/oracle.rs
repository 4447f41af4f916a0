//! Brute-force ground truth: checkerboard discretization and Monte Carlo.
//!
//! # Checkerboard measures
//!
//! A checkerboard copula spreads mass `m_ij` uniformly over the cell
//! `[i/n, (i+1)/n] × [j/n, (j+1)/n]` (`i` indexes `u`, `j` indexes `v`).
//! With `G_ij = Σ_{i'<i, j'<j} m_i'j'` the grid values, it is bilinear in each
//! cell: for local coordinates `s, t ∈ [0, 1]`,
//!
//! ```text
//! C = G + A s + B t + m s t,   A = G_(i+1)j − G_ij,   B = G_i(j+1) − G_ij.
//! ```
//!
//! `A` is the mass of column strip `i` below row `j`, `B` the mass of row strip
//! `j` left of column `i`. Each defining integral is then a finite sum:
//!
//! * `∫∫ C = E[(1−U)(1−V)] = Σ m_ij (1 − (i+½)/n)(1 − (j+½)/n)`
//! * `∫ δ = Σ_i (1/n) (G + (A + B)/2 + m/3)` over the cells `(i, i)`
//! * `∫ ω = Σ_i (1/n) (G + A/2 + B/2 + m/6)` over the cells `(i, n−1−i)`,
//!   where `t = 1 − s` and `∫ s(1−s) = 1/6`
//! * `∫ C dC = Σ m (G + A/2 + B/2 + m/4)`, the density being uniform per cell
//! * `∫∫ (∂₁C)² = Σ (A² + A m + m²/3)`, since `∂₁C = n (A + m t)` in a cell
//! * `C(½, ½)` by bilinear interpolation.
//!
//! For `M` this gives `τ = φ = ξ = 1 − 1/n` exactly.
//!
//! # Monte Carlo
//!
//! `mc_measures` splits the sample into [`MC_BATCHES`] batches. Batch `b`
//! draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `b`, each pair as
//! `U` followed by whatever [`sample_given_u`] consumes. Every batch yields
//! rank-based estimates; the reported value is the batch mean and the
//! standard error is the batch standard deviation over `√batches`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copula::{sample_given_u, CopulaExpr};
use crate::error::{Error, Result};
use crate::measures::{Exactness, MeasureVector};
use crate::scalar::Scalar;

/// Tolerance for the uniform-marginal check on generated checkerboards.
pub const MARGINAL_TOL: f64 = 1e-12;
/// Most negative cell mass accepted before the expression is deemed invalid.
pub const NEGATIVE_MASS_TOL: f64 = 1e-10;
pub const MC_BATCHES: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkerboard {
    n: usize,
    /// Row-major, `mass[i * n + j]` for `u`-cell `i` and `v`-cell `j`.
    mass: Vec<f64>,
}

impl Checkerboard {
    /// Validates nonnegativity and uniform marginals.
    pub fn from_masses(n: usize, mass: Vec<f64>) -> Result<Self> {
        if n == 0 || mass.len() != n * n {
            return Err(Error::InvalidArgument(format!("need {n}x{n} masses, got {}", mass.len())));
        }
        if let Some(bad) = mass.iter().find(|m| **m < 0.0 || !m.is_finite()) {
            return Err(Error::InvalidExpression(format!("negative cell mass {bad}")));
        }
        let cb = Checkerboard { n, mass };
        cb.check_marginals()?;
        Ok(cb)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.n + j]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    fn check_marginals(&self) -> Result<()> {
        let n = self.n;
        let target = 1.0 / n as f64;
        for k in 0..n {
            let row: f64 = (0..n).map(|j| self.mass(k, j)).sum();
            let col: f64 = (0..n).map(|i| self.mass(i, k)).sum();
            if (row - target).abs() > MARGINAL_TOL || (col - target).abs() > MARGINAL_TOL {
                return Err(Error::InvalidExpression(format!(
                    "checkerboard strip {k} has masses {row}, {col} instead of 1/{n}"
                )));
            }
        }
        Ok(())
    }

    /// Strip masses `(A_ij, B_ij)` per cell, row-major: `A` sums column
    /// `i` below row `j`, `B` sums row `j` left of column `i`. Summed
    /// directly rather than differenced from the grid to avoid cancellation.
    fn strip_masses(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n * n];
        for i in 0..n {
            let mut below = 0.0;
            for j in 0..n {
                a[i * n + j] = below;
                below += self.mass(i, j);
            }
        }
        for j in 0..n {
            let mut left = 0.0;
            for i in 0..n {
                b[i * n + j] = left;
                left += self.mass(i, j);
            }
        }
        (a, b)
    }

    /// `G_ij = C(i/n, j/n)` for `0 ≤ i, j ≤ n`, row-major with stride `n + 1`.
    fn grid(&self) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.mass(i, j);
                g[(i + 1) * (n + 1) + j + 1] = g[i * (n + 1) + j + 1] + row;
            }
        }
        g
    }

    /// The checkerboard copula at `(u, v)`.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        let g = self.grid();
        self.eval_on(&g, u, v)
    }

    fn eval_on(&self, g: &[f64], u: f64, v: f64) -> f64 {
        let n = self.n;
        let stride = n + 1;
        let (x, y) = (u.clamp(0.0, 1.0) * n as f64, v.clamp(0.0, 1.0) * n as f64);
        let i = (x.floor() as usize).min(n - 1);
        let j = (y.floor() as usize).min(n - 1);
        let (s, t) = (x - i as f64, y - j as f64);
        let g00 = g[i * stride + j];
        let a = g[(i + 1) * stride + j] - g00;
        let b = g[i * stride + j + 1] - g00;
        g00 + a * s + b * t + self.mass(i, j) * s * t
    }

    /// Row-major CSV with a `n=<n>` header line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:e}", self.mass(i, j))).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Discretizes an expression on the `n × n` grid.
pub fn checkerboard_of(expr: &CopulaExpr, n: usize) -> Result<Checkerboard> {
    if n == 0 {
        return Err(Error::InvalidArgument("checkerboard resolution must be positive".into()));
    }
    let nf = n as f64;
    let stride = n + 1;
    let grid: Vec<f64> = (0..=n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let u = i as f64 / nf;
            (0..=n).map(move |j| expr.eval_f64(u, j as f64 / nf))
        })
        .collect();
    let mut mass = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let m = grid[(i + 1) * stride + j + 1] - grid[i * stride + j + 1] - grid[(i + 1) * stride + j]
                + grid[i * stride + j];
            if m < -NEGATIVE_MASS_TOL {
                return Err(Error::InvalidExpression(format!(
                    "cell ({i}, {j}) of the {n}x{n} grid has negative mass {m}"
                )));
            }
            mass[i * n + j] = m.max(0.0);
        }
    }
    let cb = Checkerboard { n, mass };
    cb.check_marginals()?;
    Ok(cb)
}

/// Neumaier-compensated running sum; the per-cell sums have `n²` terms and
/// plain accumulation would grow round-off like `n² ε`.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// All six measures of the checkerboard copula, in closed form per cell.
pub fn cb_measures(cb: &Checkerboard) -> MeasureVector {
    let n = cb.n;
    let nf = n as f64;
    let stride = n + 1;
    let g = cb.grid();
    let (sa, sb) = cb.strip_masses();
    let mut double = Compensated::default();
    let mut self_int = Compensated::default();
    let mut xi_sum = Compensated::default();
    for i in 0..n {
        let wu = 1.0 - (i as f64 + 0.5) / nf;
        for j in 0..n {
            let m = cb.mass(i, j);
            let (g00, a, b) = (g[i * stride + j], sa[i * n + j], sb[i * n + j]);
            double.add(m * wu * (1.0 - (j as f64 + 0.5) / nf));
            self_int.add(m * (g00 + 0.5 * a + 0.5 * b + 0.25 * m));
            xi_sum.add(a * a + a * m + m * m / 3.0);
        }
    }
    let (double, self_int, xi_sum) = (double.value(), self_int.value(), xi_sum.value());
    let mut diag = Compensated::default();
    let mut anti = Compensated::default();
    for i in 0..n {
        let (g00, a, b, m) = (g[i * stride + i], sa[i * n + i], sb[i * n + i], cb.mass(i, i));
        diag.add(g00 + 0.5 * (a + b) + m / 3.0);
        let j = n - 1 - i;
        let (g00, a, b, m) = (g[i * stride + j], sa[i * n + j], sb[i * n + j], cb.mass(i, j));
        anti.add(g00 + 0.5 * a + 0.5 * b + m / 6.0);
    }
    let (diag, anti) = (diag.value() / nf, anti.value() / nf);
    let f = Scalar::float;
    MeasureVector {
        rho: f(12.0 * double - 3.0),
        tau: f(4.0 * self_int - 1.0),
        phi: f(6.0 * diag - 2.0),
        gamma: f(4.0 * diag + 4.0 * anti - 2.0),
        beta: f(4.0 * cb.eval_on(&g, 0.5, 0.5) - 1.0),
        xi: f(6.0 * xi_sum - 2.0),
        exact: Exactness::NONE,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// `|value − target| ≤ k · stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McMeasures {
    pub rho: McEstimate,
    pub tau: McEstimate,
    pub phi: McEstimate,
    pub gamma: McEstimate,
    pub beta: McEstimate,
    pub xi: McEstimate,
}

impl McMeasures {
    pub fn get(&self, name: &str) -> Option<&McEstimate> {
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
}

/// Ranks `1..=m` of `xs`; ties broken by position.
fn ranks(xs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    let mut r = vec![0; xs.len()];
    for (k, &i) in order.iter().enumerate() {
        r[i] = k + 1;
    }
    r
}

/// Number of inversions, by merge sort.
fn inversions(xs: &mut [usize]) -> u64 {
    let n = xs.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = inversions(&mut xs[..mid]) + inversions(&mut xs[mid..]);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if xs[i] <= xs[j] {
            merged.push(xs[i]);
            i += 1;
        } else {
            merged.push(xs[j]);
            count += (mid - i) as u64;
            j += 1;
        }
    }
    merged.extend_from_slice(&xs[i..mid]);
    merged.extend_from_slice(&xs[j..n]);
    xs.copy_from_slice(&merged);
    count
}

/// Rank estimates `[ρ, τ, φ, γ, β, ξ]` from one batch.
pub fn rank_estimates(pairs: &[(f64, f64)]) -> [f64; 6] {
    let m = pairs.len();
    let mf = m as f64;
    let us: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (r, s) = (ranks(&us), ranks(&vs));
    let mut d2 = 0.0;
    let mut abs_diff = 0.0;
    let mut gini = 0.0;
    let mut low = 0usize;
    for k in 0..m {
        let (ri, si) = (r[k] as f64, s[k] as f64);
        d2 += (ri - si) * (ri - si);
        abs_diff += (ri - si).abs();
        gini += (ri + si - mf - 1.0).abs() - (ri - si).abs();
        if 2 * r[k] <= m + 1 && 2 * s[k] <= m + 1 {
            low += 1;
        }
    }
    // v-ranks in u order
    let mut by_u = vec![0; m];
    for k in 0..m {
        by_u[r[k] - 1] = s[k];
    }
    let chatterjee: f64 = by_u.windows(2).map(|w| (w[1] as f64 - w[0] as f64).abs()).sum();
    let inv = inversions(&mut by_u) as f64;
    [
        1.0 - 6.0 * d2 / (mf * (mf * mf - 1.0)),
        1.0 - 4.0 * inv / (mf * (mf - 1.0)),
        1.0 - 3.0 * abs_diff / (mf * mf - 1.0),
        gini / ((m * m / 2) as f64),
        4.0 * low as f64 / mf - 1.0,
        1.0 - 3.0 * chatterjee / (mf * mf - 1.0),
    ]
}

/// Seeded Monte Carlo estimates of all six measures.
pub fn mc_measures(expr: &CopulaExpr, samples: usize, seed: u64) -> Result<McMeasures> {
    if samples < 100 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least 100 samples".into()));
    }
    let per_batch = samples / MC_BATCHES;
    let batches: Vec<[f64; 6]> = (0..MC_BATCHES)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let pairs: Vec<(f64, f64)> = (0..per_batch)
                .map(|_| {
                    let u = rng.random::<f64>();
                    (u, sample_given_u(expr, u, &mut rng))
                })
                .collect();
            rank_estimates(&pairs)
        })
        .collect();
    let k = MC_BATCHES as f64;
    let estimate = |idx: usize| {
        let mean = batches.iter().map(|b| b[idx]).sum::<f64>() / k;
        let var = batches.iter().map(|b| (b[idx] - mean).powi(2)).sum::<f64>() / (k - 1.0);
        McEstimate { value: mean, stderr: (var / k).sqrt(), samples: per_batch * MC_BATCHES, seed }
    };
    Ok(McMeasures {
        rho: estimate(0),
        tau: estimate(1),
        phi: estimate(2),
        gamma: estimate(3),
        beta: estimate(4),
        xi: estimate(5),
    })
}
