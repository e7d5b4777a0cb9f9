//! Jacobi (recurrence) parameters of a measure, from a grid discretization or
//! from a finite list of moments, and their bordered-Toeplitz packaging.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::CosineRule;
use crate::laws::SupportInterval;

/// Numerical thresholds shared by the Jacobi routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Lanczos stops when `beta_n` falls below this (relative to the largest
    /// `|x|` in the measure).
    pub breakdown: f64,
    /// Relative Cholesky pivot threshold for Hankel matrices.
    pub positive_definite: f64,
    /// Entries within this distance of the tail are folded into it.
    pub trim: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            breakdown: 1e-12,
            positive_definite: 1e-10,
            trim: 1e-8,
        }
    }
}

/// A probability measure sampled on a grid: `sum_j w_j delta(x - x_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedMeasure {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscretizedMeasure {
    /// Validates strictly increasing finite points, non-negative weights and
    /// unit total mass (to 1e-12).
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.len() < 2 {
            return Err(Error::InvalidMeasure("need at least two grid points".into()));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite grid point".into()));
        }
        if let Some(i) = points.windows(2).position(|p| p[0] >= p[1]) {
            return Err(Error::InvalidMeasure(format!(
                "points not strictly increasing at index {}",
                i + 1
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidMeasure("weights must be finite and >= 0".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { points, weights })
    }

    /// Like [`DiscretizedMeasure::new`] but rescales the weights to unit mass.
    pub fn from_unnormalized(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not positive")));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Self::new(points, weights)
    }

    /// Discretize a density on `[lo, hi]` with `n` cosine-spaced points; the
    /// weights are `density * dx` from the cosine-substitution rule.
    pub fn from_density<F: Fn(f64) -> f64>(lo: f64, hi: f64, n: usize, density: F) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::InvalidArgument(format!(
                "cannot discretize on [{lo}, {hi}] with {n} points"
            )));
        }
        let rule = CosineRule::new(lo, hi, n);
        let weights = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| (density(x) * w).max(0.0))
            .collect();
        Self::from_unnormalized(rule.nodes, weights)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn moment(&self, n: u32) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * x.powi(n as i32))
            .sum()
    }

    /// Raw moments `m_0..m_{count-1}`.
    pub fn moments(&self, count: usize) -> Vec<f64> {
        (0..count as u32).map(|n| self.moment(n)).collect()
    }

    /// Push every point through an increasing affine map `x -> scale * x + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument("affine scale must be positive".into()));
        }
        Self::new(
            self.points.iter().map(|x| scale * x + shift).collect(),
            self.weights.clone(),
        )
    }
}

/// Raw moments `m_0..m_N` of a probability measure.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    moments: Vec<f64>,
}

impl MomentSequence {
    /// Requires `m_0 = 1` and a Hankel matrix `H[i][j] = m_{i+j}` that is
    /// positive semidefinite (checked by attempting its Cholesky factor).
    pub fn new(moments: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(moments, Tolerances::default().positive_definite)
    }

    pub fn with_tolerance(moments: Vec<f64>, pd_tol: f64) -> Result<Self> {
        let not_realizable = |reason: String| Error::NotRealizable {
            reason,
            partial_alphas: vec![],
            partial_betas: vec![],
        };
        if moments.is_empty() {
            return Err(not_realizable("empty moment sequence".into()));
        }
        if let Some(i) = moments.iter().position(|m| !m.is_finite()) {
            return Err(not_realizable(format!("moment m_{i} is not finite")));
        }
        if (moments[0] - 1.0).abs() > 1e-12 {
            return Err(not_realizable(format!("m_0 = {} but must be 1", moments[0])));
        }
        let order = (moments.len() - 1) / 2 + 1;
        let h = |i: usize, j: usize| moments[i + j];
        let mut r = vec![vec![0.0; order]; order];
        for j in 0..order {
            for i in 0..j {
                let s: f64 = (0..i).map(|l| r[l][i] * r[l][j]).sum();
                r[i][j] = (h(i, j) - s) / r[i][i];
            }
            let d = h(j, j) - (0..j).map(|l| r[l][j] * r[l][j]).sum::<f64>();
            let scale = h(j, j).abs().max(f64::MIN_POSITIVE);
            if d < -pd_tol * scale {
                return Err(not_realizable(format!(
                    "Hankel matrix is indefinite (pivot {j} = {d:e})"
                )));
            }
            if d <= pd_tol * scale {
                // Singular but semidefinite: the measure has finitely many
                // atoms, higher pivots carry no information.
                break;
            }
            r[j][j] = d.sqrt();
        }
        Ok(Self { moments })
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    /// Index of the last moment, `N`.
    pub fn max_index(&self) -> usize {
        self.moments.len() - 1
    }

    /// Largest number of recurrence steps the data supports (`2 * steps <= N`).
    pub fn max_steps(&self) -> usize {
        self.max_index() / 2
    }
}

/// Diagonal (`alphas`) and off-diagonal (`betas`) Jacobi entries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobiParams {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl JacobiParams {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

/// Jacobi parameters that are constant from index `k` on.
///
/// Entries `0..k` come from `boundary_alpha`/`boundary_beta`; every later
/// entry equals `tail_alpha`/`tail_beta`. `k = 0` is a pure Toeplitz matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BorderedJacobi {
    boundary_alpha: Vec<f64>,
    boundary_beta: Vec<f64>,
    tail_alpha: f64,
    tail_beta: f64,
}

impl BorderedJacobi {
    pub fn new(
        boundary_alpha: Vec<f64>,
        boundary_beta: Vec<f64>,
        tail_alpha: f64,
        tail_beta: f64,
    ) -> Result<Self> {
        if boundary_alpha.len() != boundary_beta.len() {
            return Err(Error::InvalidArgument(format!(
                "boundary has {} alphas but {} betas",
                boundary_alpha.len(),
                boundary_beta.len()
            )));
        }
        if boundary_alpha.iter().chain([&tail_alpha]).any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("alphas must be finite".into()));
        }
        if boundary_beta
            .iter()
            .chain([&tail_beta])
            .any(|b| !(b.is_finite() && *b > 0.0))
        {
            return Err(Error::InvalidArgument("betas must be finite and positive".into()));
        }
        Ok(Self {
            boundary_alpha,
            boundary_beta,
            tail_alpha,
            tail_beta,
        })
    }

    pub fn toeplitz(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(vec![], vec![], alpha, beta)
    }

    /// Boundary length.
    pub fn k(&self) -> usize {
        self.boundary_alpha.len()
    }

    pub fn boundary_alpha(&self) -> &[f64] {
        &self.boundary_alpha
    }

    pub fn boundary_beta(&self) -> &[f64] {
        &self.boundary_beta
    }

    pub fn tail_alpha(&self) -> f64 {
        self.tail_alpha
    }

    pub fn tail_beta(&self) -> f64 {
        self.tail_beta
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.boundary_alpha.get(i).copied().unwrap_or(self.tail_alpha)
    }

    pub fn beta(&self, i: usize) -> f64 {
        self.boundary_beta.get(i).copied().unwrap_or(self.tail_beta)
    }

    /// The first `n` entries of the infinite sequences.
    pub fn truncated(&self, n: usize) -> JacobiParams {
        JacobiParams {
            alphas: (0..n).map(|i| self.alpha(i)).collect(),
            betas: (0..n).map(|i| self.beta(i)).collect(),
        }
    }

    /// `[tail_alpha - 2 tail_beta, tail_alpha + 2 tail_beta]`, the support of
    /// the absolutely continuous part.
    pub fn tail_support(&self) -> SupportInterval {
        SupportInterval::new(
            self.tail_alpha - 2.0 * self.tail_beta,
            self.tail_alpha + 2.0 * self.tail_beta,
        )
        .expect("tail beta is positive")
    }
}

/// Output of [`lanczos_discrete_with`]: the parameters and the orthonormal
/// polynomials `q_0..q_steps` sampled on the measure's grid.
#[derive(Clone, Debug)]
pub struct LanczosOutput {
    pub params: JacobiParams,
    pub basis: Vec<Vec<f64>>,
}

/// Lanczos iteration on a discretized measure with default tolerances.
pub fn lanczos_discrete(mu: &DiscretizedMeasure, steps: usize) -> Result<JacobiParams> {
    lanczos_discrete_with(mu, steps, &Tolerances::default()).map(|out| out.params)
}

/// Lanczos on the grid with inner product `(p, q) = sum_j w_j p(x_j) q(x_j)`:
///
/// ```text
/// v = x q_n;  alpha_n = (q_n, v);  v -= beta_{n-1} q_{n-1} + alpha_n q_n
/// beta_n = |v|;  q_{n+1} = v / beta_n
/// ```
///
/// `v` is reorthogonalized against every earlier `q` (two Gram-Schmidt
/// passes) before its norm is taken.
pub fn lanczos_discrete_with(
    mu: &DiscretizedMeasure,
    steps: usize,
    tol: &Tolerances,
) -> Result<LanczosOutput> {
    if steps == 0 || steps > mu.len() - 1 {
        return Err(Error::InvalidArgument(format!(
            "{steps} Lanczos steps requested on a {}-point measure",
            mu.len()
        )));
    }
    let x = mu.points();
    let w = mu.weights();
    let dot = |p: &[f64], q: &[f64]| -> f64 {
        w.iter().zip(p).zip(q).map(|((w, p), q)| w * p * q).sum()
    };
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };

    let mut alphas = Vec::with_capacity(steps);
    let mut betas = Vec::with_capacity(steps);
    let mut basis: Vec<Vec<f64>> = vec![vec![1.0; x.len()]];
    let mut beta_prev = 0.0;

    for n in 0..steps {
        let q = &basis[n];
        let mut v: Vec<f64> = x.iter().zip(q).map(|(x, q)| x * q).collect();
        let alpha = dot(q, &v);
        for (j, vj) in v.iter_mut().enumerate() {
            *vj -= alpha * q[j];
            if n > 0 {
                *vj -= beta_prev * basis[n - 1][j];
            }
        }
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &v);
                v.iter_mut().zip(b).for_each(|(vj, bj)| *vj -= c * bj);
            }
        }
        alphas.push(alpha);
        let beta = dot(&v, &v).sqrt();
        if !(beta >= tol.breakdown * scale) {
            return Err(Error::Breakdown {
                step: n,
                beta,
                alphas,
                betas,
            });
        }
        betas.push(beta);
        basis.push(v.into_iter().map(|v| v / beta).collect());
        beta_prev = beta;
    }
    Ok(LanczosOutput {
        params: JacobiParams { alphas, betas },
        basis,
    })
}

/// Recurrence coefficients from moments with default tolerances.
pub fn moments_to_jacobi(m: &MomentSequence, steps: usize) -> Result<JacobiParams> {
    moments_to_jacobi_with(m, steps, &Tolerances::default())
}

/// Recurrence coefficients from the Cholesky factor `H = R^T R` of the Hankel
/// matrix `H[i][j] = m_{i+j}` of order `steps + 1`:
///
/// ```text
/// alpha_n = R[n][n+1] / R[n][n] - R[n-1][n] / R[n-1][n-1]
/// beta_n  = R[n+1][n+1] / R[n][n]
/// ```
pub fn moments_to_jacobi_with(
    m: &MomentSequence,
    steps: usize,
    tol: &Tolerances,
) -> Result<JacobiParams> {
    if steps == 0 || 2 * steps > m.max_index() {
        return Err(Error::InvalidArgument(format!(
            "{steps} steps need moments up to m_{}, have up to m_{}",
            2 * steps,
            m.max_index()
        )));
    }
    let mom = m.moments();
    let order = steps + 1;
    let mut r = vec![vec![0.0; order]; order];
    let mut alphas = Vec::with_capacity(steps);
    let mut betas = Vec::with_capacity(steps);
    let ratio = |r: &[Vec<f64>], n: usize| r[n][n + 1] / r[n][n];

    for j in 0..order {
        for i in 0..j {
            let s: f64 = (0..i).map(|l| r[l][i] * r[l][j]).sum();
            r[i][j] = (mom[i + j] - s) / r[i][i];
        }
        if j > 0 {
            let n = j - 1;
            let prev = if n > 0 { ratio(&r, n - 1) } else { 0.0 };
            alphas.push(ratio(&r, n) - prev);
        }
        let hjj = mom[2 * j];
        let d = hjj - (0..j).map(|l| r[l][j] * r[l][j]).sum::<f64>();
        if !(d > tol.positive_definite * hjj.abs().max(f64::MIN_POSITIVE)) {
            return Err(Error::NotRealizable {
                reason: format!("non-positive Hankel pivot {j} = {d:e}"),
                partial_alphas: alphas,
                partial_betas: betas,
            });
        }
        r[j][j] = d.sqrt();
        if j > 0 {
            betas.push(r[j][j] / r[j - 1][j - 1]);
        }
    }
    Ok(JacobiParams { alphas, betas })
}

/// Package Lanczos output as a bordered Toeplitz matrix with default trimming.
pub fn to_bordered(alphas: &[f64], betas: &[f64]) -> Result<BorderedJacobi> {
    to_bordered_with(alphas, betas, Tolerances::default().trim)
}

/// The last entry becomes the tail; boundary entries within `trim_tol` of the
/// tail are folded into it from the right, so `k` is as small as possible.
pub fn to_bordered_with(alphas: &[f64], betas: &[f64], trim_tol: f64) -> Result<BorderedJacobi> {
    if alphas.is_empty() || alphas.len() != betas.len() {
        return Err(Error::InvalidArgument(format!(
            "need equal nonempty alpha/beta vectors, got {} and {}",
            alphas.len(),
            betas.len()
        )));
    }
    let last = alphas.len() - 1;
    let (ta, tb) = (alphas[last], betas[last]);
    let mut k = last;
    while k > 0 && (alphas[k - 1] - ta).abs() <= trim_tol && (betas[k - 1] - tb).abs() <= trim_tol {
        k -= 1;
    }
    BorderedJacobi::new(alphas[..k].to_vec(), betas[..k].to_vec(), ta, tb)
}

/// Largest deviation of the trailing half of the parameters from their final
/// entries.
pub fn toeplitz_distance(alphas: &[f64], betas: &[f64]) -> f64 {
    let len = alphas.len().min(betas.len());
    if len < 2 {
        return 0.0;
    }
    let (ta, tb) = (alphas[len - 1], betas[len - 1]);
    (len / 2..len)
        .map(|i| (alphas[i] - ta).abs().max((betas[i] - tb).abs()))
        .fold(0.0, f64::max)
}

/// `e_1^T T^n e_1` for the `s x s` Jacobi matrix with diagonal `alphas` and
/// off-diagonal `betas[..s-1]`.
pub fn truncated_moment(alphas: &[f64], betas: &[f64], n: u32) -> f64 {
    let s = alphas.len();
    let mut v = vec![0.0; s];
    if s == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    v[0] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; s];
        for i in 0..s {
            next[i] = alphas[i] * v[i];
            if i > 0 {
                next[i] += betas[i - 1] * v[i - 1];
            }
            if i + 1 < s {
                next[i] += betas[i] * v[i + 1];
            }
        }
        v = next;
    }
    v[0]
}
