//! Measure recovery from a bordered-Toeplitz Jacobi matrix.
//!
//! With `alpha_i = alpha_k`, `beta_i = beta_k` for `i >= k`, the Cauchy
//! transform is the terminating continued fraction
//!
//! ```text
//! g(x) = 1 / (x - a_0 - b_0^2 / (x - a_1 - ... - 2 b_{k-1}^2 / (x - a_k + sqrt((a_k - x)^2 - 4 b_k^2))))
//! ```
//!
//! and the density is `-Im g(x) / pi` on `[a_k - 2 b_k, a_k + 2 b_k]`. Zeros of
//! the outermost denominator outside that interval are atoms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::{BorderedJacobi, DiscretizedMeasure};
use crate::laws::{ComplexPoint, SupportInterval};
use crate::quadrature::CosineRule;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoverOptions {
    /// `|denominator|` below this on the real axis outside the support is a pole.
    pub pole_tol: f64,
    /// Negative density values down to `-atom_tol` are rounding noise.
    pub atom_tol: f64,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        Self {
            pole_tol: 1e-9,
            atom_tol: 1e-9,
        }
    }
}

/// A real pole of the Cauchy transform outside the continuous support.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuspectedAtom {
    pub location: f64,
    /// Residue estimate `1 / |d'(x)|` of the outermost denominator.
    pub mass: f64,
    pub note: String,
}

/// Density sampled on a uniform interior grid of the tail support.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveredDensity {
    pub support: SupportInterval,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub suspected_atoms: Vec<SuspectedAtom>,
    /// Smallest density value before clamping.
    pub min_raw_value: f64,
    /// Number of values clamped up to zero.
    pub clamped: usize,
}

impl RecoveredDensity {
    /// Midpoint-rule mass of the continuous part.
    pub fn continuous_mass(&self) -> f64 {
        let h = self.support.width() / self.grid.len() as f64;
        self.values.iter().sum::<f64>() * h
    }

    pub fn atom_mass(&self) -> f64 {
        self.suspected_atoms.iter().map(|a| a.mass).sum()
    }

    /// Density at an arbitrary `x` by linear interpolation on the grid; zero
    /// outside the grid's span.
    pub fn interpolate(&self, x: f64) -> f64 {
        let (first, last) = (self.grid[0], *self.grid.last().expect("nonempty grid"));
        if !(x >= first && x <= last) {
            return 0.0;
        }
        let h = self.support.width() / self.grid.len() as f64;
        let i = (((x - first) / h).floor() as usize).min(self.grid.len() - 2);
        let t = (x - self.grid[i]) / h;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }
}

pub fn tail_support(j: &BorderedJacobi) -> SupportInterval {
    j.tail_support()
}

/// Innermost level `x - alpha_k + sqrt((alpha_k - x)^2 - 4 beta_k^2)`.
///
/// Inside the support the root is `+i sqrt(|r|)`; outside it carries the sign
/// of `x - alpha_k`, so the continued fraction decays like `1/x`.
pub fn tail_g(j: &BorderedJacobi, x: f64) -> ComplexPoint {
    let d = x - j.tail_alpha();
    let beta = j.tail_beta();
    let r = d * d - 4.0 * beta * beta;
    if r < 0.0 {
        Complex64::new(d, (-r).sqrt())
    } else {
        Complex64::new(d + d.signum() * r.sqrt(), 0.0)
    }
}

/// Cauchy transform of the bordered Jacobi matrix on the real axis, with
/// default pole tolerance.
pub fn continued_fraction_g(j: &BorderedJacobi, x: f64) -> Result<ComplexPoint> {
    continued_fraction_g_with(j, x, &RecoverOptions::default())
}

pub fn continued_fraction_g_with(
    j: &BorderedJacobi,
    x: f64,
    opts: &RecoverOptions,
) -> Result<ComplexPoint> {
    let outside = !j.tail_support().interior_contains(x);
    let check = |d: Complex64, level: usize| -> Result<Complex64> {
        if outside && d.norm() < opts.pole_tol {
            Err(Error::Pole { x, level })
        } else {
            Ok(d)
        }
    };
    let k = j.k();
    let inner = check(tail_g(j, x), k)?;
    if k == 0 {
        return Ok(2.0 / inner);
    }
    let b = j.beta(k - 1);
    let mut d = check(x - j.alpha(k - 1) - 2.0 * b * b / inner, k - 1)?;
    for i in (0..k - 1).rev() {
        let b = j.beta(i);
        d = check(x - j.alpha(i) - b * b / d, i)?;
    }
    Ok(1.0 / d)
}

/// `1 / g(x)` for real `x` outside the support, in real arithmetic.
fn outer_denominator(j: &BorderedJacobi, x: f64) -> f64 {
    let inner = tail_g(j, x).re;
    let k = j.k();
    if k == 0 {
        return inner / 2.0;
    }
    let b = j.beta(k - 1);
    let mut d = x - j.alpha(k - 1) - 2.0 * b * b / inner;
    for i in (0..k - 1).rev() {
        let b = j.beta(i);
        d = x - j.alpha(i) - b * b / d;
    }
    d
}

/// Gershgorin bounds on the spectrum of the infinite Jacobi matrix.
fn spectral_bounds(j: &BorderedJacobi) -> (f64, f64) {
    let mut lo = j.tail_alpha() - 2.0 * j.tail_beta();
    let mut hi = j.tail_alpha() + 2.0 * j.tail_beta();
    for i in 0..=j.k() {
        let left = if i == 0 { 0.0 } else { j.beta(i - 1) };
        let radius = left + j.beta(i);
        lo = lo.min(j.alpha(i) - radius);
        hi = hi.max(j.alpha(i) + radius);
    }
    (lo, hi)
}

/// Locate zeros of `1/g` on the real axis outside the tail support.
///
/// The search covers the Gershgorin interval, sampling more densely towards
/// the support edges, and refines each sign change by bisection. Sign changes
/// caused by a pole of the denominator (where `g` merely vanishes) are
/// discarded.
pub fn find_atoms(j: &BorderedJacobi) -> Vec<SuspectedAtom> {
    const SAMPLES: usize = 4000;
    let support = j.tail_support();
    let (glo, ghi) = spectral_bounds(j);
    let margin = 1e-9 * (1.0 + glo.abs().max(ghi.abs()));
    let mut atoms = Vec::new();
    for (edge, far) in [(support.hi, ghi + margin), (support.lo, glo - margin)] {
        if (far - edge).abs() <= margin {
            continue;
        }
        let at = |t: f64| edge + (far - edge) * t * t;
        let mut prev_x = at(1e-6);
        let mut prev_d = outer_denominator(j, prev_x);
        for s in 1..=SAMPLES {
            let x = at(s as f64 / SAMPLES as f64);
            let d = outer_denominator(j, x);
            if prev_d.is_finite() && d.is_finite() && prev_d.signum() != d.signum() {
                if let Some(atom) = refine_zero(j, prev_x, x) {
                    atoms.push(atom);
                }
            }
            prev_x = x;
            prev_d = d;
        }
    }
    atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
    atoms
}

fn refine_zero(j: &BorderedJacobi, mut a: f64, mut b: f64) -> Option<SuspectedAtom> {
    let fa = outer_denominator(j, a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = outer_denominator(j, m);
        if fm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    let x = 0.5 * (a + b);
    let scale = 1.0 + x.abs();
    let value = outer_denominator(j, x);
    if !(value.abs() <= 1e-6 * scale) {
        // bracket collapsed onto a pole of the denominator
        return None;
    }
    let h = 1e-6 * scale;
    let slope = (outer_denominator(j, x + h) - outer_denominator(j, x - h)) / (2.0 * h);
    Some(SuspectedAtom {
        location: x,
        mass: 1.0 / slope.abs(),
        note: "real pole of the continued fraction outside the tail support".into(),
    })
}

/// Recover the density on `grid_size` uniform interior points with default
/// options.
pub fn recover_density(j: &BorderedJacobi, grid_size: usize) -> Result<RecoveredDensity> {
    recover_density_with(j, grid_size, &RecoverOptions::default())
}

pub fn recover_density_with(
    j: &BorderedJacobi,
    grid_size: usize,
    opts: &RecoverOptions,
) -> Result<RecoveredDensity> {
    if grid_size < 16 {
        return Err(Error::InvalidArgument(format!(
            "recovery grid needs at least 16 points, got {grid_size}"
        )));
    }
    let support = j.tail_support();
    let h = support.width() / grid_size as f64;
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| support.lo + (i as f64 + 0.5) * h)
        .collect();
    let mut suspected_atoms = find_atoms(j);
    let mut values = Vec::with_capacity(grid_size);
    let mut min_raw_value = f64::INFINITY;
    let mut clamped = 0;
    for &x in &grid {
        let raw = match continued_fraction_g_with(j, x, opts) {
            Ok(g) => -g.im / PI,
            Err(Error::Pole { x, level }) => {
                suspected_atoms.push(SuspectedAtom {
                    location: x,
                    mass: f64::NAN,
                    note: format!("pole at continued-fraction level {level} on the grid"),
                });
                0.0
            }
            Err(e) => return Err(e),
        };
        min_raw_value = min_raw_value.min(raw);
        if raw < 0.0 {
            clamped += 1;
            values.push(0.0);
        } else {
            values.push(raw);
        }
    }
    Ok(RecoveredDensity {
        support,
        grid,
        values,
        suspected_atoms,
        min_raw_value,
        clamped,
    })
}

/// Continuous part of the recovered measure on a cosine grid of `points`
/// nodes, renormalized; the second value is its mass before normalization.
pub fn discretize_recovered(j: &BorderedJacobi, points: usize) -> Result<(DiscretizedMeasure, f64)> {
    let s = j.tail_support();
    let rule = CosineRule::new(s.lo, s.hi, points);
    let mut weights = Vec::with_capacity(points);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let g = continued_fraction_g(j, x)?;
        weights.push((-g.im / PI).max(0.0) * w);
    }
    let mass = weights.iter().sum();
    Ok((DiscretizedMeasure::from_unnormalized(rule.nodes, weights)?, mass))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wigner() -> BorderedJacobi {
        BorderedJacobi::new(vec![0.0], vec![1.0], 0.0, 1.0).unwrap()
    }

    #[test]
    fn tail_support_examples() {
        let s = tail_support(&BorderedJacobi::toeplitz(0.0, 1.0).unwrap());
        assert_eq!((s.lo, s.hi), (-2.0, 2.0));
        let r2 = 2f64.sqrt();
        let s = tail_support(&BorderedJacobi::toeplitz(3.0, r2).unwrap());
        assert!((s.lo - (1.0 - r2).powi(2)).abs() < 1e-14);
        assert!((s.hi - (1.0 + r2).powi(2)).abs() < 1e-14);
        let s2 = tail_support(&BorderedJacobi::toeplitz(3.5, r2).unwrap());
        assert!((s2.lo - s.lo - 0.5).abs() < 1e-14 && (s2.hi - s.hi - 0.5).abs() < 1e-14);
    }

    #[test]
    fn tail_g_branches() {
        let j = BorderedJacobi::toeplitz(0.0, 1.0).unwrap();
        assert_eq!(tail_g(&j, 0.0), Complex64::new(0.0, 2.0));
        let g = tail_g(&j, 3.0);
        assert!((g.re - (3.0 + 5f64.sqrt())).abs() < 1e-15 && g.im == 0.0);
        let g = tail_g(&j, -3.0);
        assert!((g.re + 3.0 + 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn wigner_center_and_outside() {
        let g = continued_fraction_g(&wigner(), 0.0).unwrap();
        assert!(g.re.abs() < 1e-15 && (g.im + 1.0).abs() < 1e-15);
        let g = continued_fraction_g(&wigner(), 3.0).unwrap();
        assert!((g.re - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        let g = continued_fraction_g(&BorderedJacobi::toeplitz(0.0, 1.0).unwrap(), 3.0).unwrap();
        assert!((g.re - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn decay_at_infinity() {
        let j = BorderedJacobi::new(vec![0.3, -0.2], vec![0.9, 1.4], 0.1, 0.8).unwrap();
        for sign in [-1.0, 1.0] {
            let x = sign * 1e3 * (1.0 + 0.1 + 0.8);
            let g = continued_fraction_g(&j, x).unwrap();
            assert!((g.re * x - 1.0).abs() < 1e-3, "{}", g.re * x);
        }
    }

    #[test]
    fn detects_atom_of_strong_boundary() {
        // A large first beta pushes an eigenvalue out of [-2, 2].
        let j = BorderedJacobi::new(vec![0.0], vec![3.0], 0.0, 1.0).unwrap();
        let atoms = find_atoms(&j);
        assert_eq!(atoms.len(), 2, "{atoms:?}");
        let rec = recover_density(&j, 4000).unwrap();
        let total = rec.continuous_mass() + rec.atom_mass();
        assert!((total - 1.0).abs() < 1e-3, "total mass {total}");
        assert!(continued_fraction_g(&j, atoms[1].location).is_err());
    }

    #[test]
    fn no_atoms_for_laws() {
        for j in [wigner(), BorderedJacobi::new(vec![2.0], vec![2f64.sqrt()], 3.0, 2f64.sqrt()).unwrap()] {
            assert!(find_atoms(&j).is_empty());
        }
    }

    #[test]
    fn grid_is_interior_and_small_grids_rejected() {
        let rec = recover_density(&wigner(), 16).unwrap();
        assert_eq!(rec.grid.len(), 16);
        assert!((rec.grid[0] + 2.0 - 0.125).abs() < 1e-15);
        assert!(recover_density(&wigner(), 15).is_err());
    }
}
