//! The four big level-density laws (Wigner semicircle, Marchenko-Pastur,
//! Kesten-McKay, Wachter) in every representation: density, support,
//! moments, Cauchy/R/S-transforms, free cumulants, Jacobi parameters and
//! orthogonal polynomials.
//!
//! All four Cauchy transforms are evaluated in the rationalized form
//! `g(z) = c / (P(z) + s sqrt((z - lo)(z - hi)))`, where `sqrt((z-lo)(z-hi))`
//! is the product of two principal square roots. That branch is analytic off
//! the support and behaves like `z` at infinity, so `g(z) ~ 1/z`; the
//! rationalized form also removes the removable singularities of the
//! textbook expressions (`z = 0`, `z = 1`, `z = +-v`).

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combinatorics::{binomial, catalan, narayana_poly, narayana_poly_exact, to_f64, chebyshev_u};
use crate::error::{Error, Result};
use crate::jacobi::{BorderedJacobi, DiscretizedMeasure};

/// Complex argument/result of the transforms.
pub type ComplexPoint = Complex64;

/// Closed interval `[lo, hi]` with `lo < hi`, both finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupportInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SupportInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Strictly inside.
    pub fn interior_contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// Parameterization of one of the four laws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Law {
    WignerSemicircle,
    MarchenkoPastur { lambda: f64 },
    KestenMcKay { v: f64 },
    Wachter { a: f64, b: f64 },
}

/// A validated [`Law`]. Only the constructors can build one, so every
/// `LawSpec` in circulation satisfies its parameter constraints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LawSpec(Law);

impl LawSpec {
    pub fn wigner() -> Self {
        Self(Law::WignerSemicircle)
    }

    pub fn marchenko_pastur(lambda: f64) -> Result<Self> {
        Self::new(Law::MarchenkoPastur { lambda })
    }

    pub fn kesten_mckay(v: f64) -> Result<Self> {
        Self::new(Law::KestenMcKay { v })
    }

    pub fn wachter(a: f64, b: f64) -> Result<Self> {
        Self::new(Law::Wachter { a, b })
    }

    pub fn new(law: Law) -> Result<Self> {
        let bad = |law, constraint, value| Err(Error::InvalidParameter { law, constraint, value });
        match law {
            Law::WignerSemicircle => {}
            Law::MarchenkoPastur { lambda } => {
                if !(lambda.is_finite() && lambda >= 1.0) {
                    return bad("Marchenko-Pastur", "lambda >= 1", lambda);
                }
            }
            Law::KestenMcKay { v } => {
                if !(v.is_finite() && v >= 2.0) {
                    return bad("Kesten-McKay", "v >= 2", v);
                }
            }
            Law::Wachter { a, b } => {
                if !(a.is_finite() && a >= 1.0) {
                    return bad("Wachter", "a >= 1", a);
                }
                if !(b.is_finite() && b >= 1.0) {
                    return bad("Wachter", "b >= 1", b);
                }
            }
        }
        Ok(Self(law))
    }

    pub fn law(&self) -> Law {
        self.0
    }

    pub fn name(&self) -> &'static str {
        match self.0 {
            Law::WignerSemicircle => "wigner",
            Law::MarchenkoPastur { .. } => "marchenko_pastur",
            Law::KestenMcKay { .. } => "kesten_mckay",
            Law::Wachter { .. } => "wachter",
        }
    }

    /// True for the laws symmetric about zero (odd moments vanish).
    pub fn is_symmetric(&self) -> bool {
        matches!(self.0, Law::WignerSemicircle | Law::KestenMcKay { .. })
    }

    pub fn support(&self) -> SupportInterval {
        let (lo, hi) = match self.0 {
            Law::WignerSemicircle => (-2.0, 2.0),
            Law::MarchenkoPastur { lambda } => {
                let r = lambda.sqrt();
                ((1.0 - r).powi(2), (1.0 + r).powi(2))
            }
            Law::KestenMcKay { v } => {
                let e = 2.0 * (v - 1.0).sqrt();
                (-e, e)
            }
            Law::Wachter { a, b } => {
                let (p, q) = (b.sqrt(), (a * (a + b - 1.0)).sqrt());
                (((p - q) / (a + b)).powi(2), ((p + q) / (a + b)).powi(2))
            }
        };
        SupportInterval { lo, hi }
    }

    /// Density with respect to Lebesgue measure; zero off the open support.
    pub fn density(&self, x: f64) -> f64 {
        let s = self.support();
        if !s.interior_contains(x) {
            return 0.0;
        }
        let root = ((s.hi - x) * (x - s.lo)).sqrt();
        match self.0 {
            Law::WignerSemicircle => root / (2.0 * PI),
            Law::MarchenkoPastur { .. } => root / (2.0 * PI * x),
            Law::KestenMcKay { v } => v * root / (2.0 * PI * (v - x) * (v + x)),
            Law::Wachter { a, b } => (a + b) * root / (2.0 * PI * x * (1.0 - x)),
        }
    }

    /// Cauchy transform `g(z) = int dmu(x) / (z - x)` off the support.
    pub fn cauchy_transform(&self, z: ComplexPoint) -> Result<ComplexPoint> {
        let s = self.support();
        if z.im == 0.0 && s.interior_contains(z.re) {
            return Err(Error::Domain(format!(
                "Cauchy transform of {} evaluated inside its support at {}",
                self.name(),
                z.re
            )));
        }
        let one = Complex64::new(1.0, 0.0);
        let (c, p, scale) = match self.0 {
            Law::WignerSemicircle => (2.0, z, 1.0),
            Law::MarchenkoPastur { lambda } => (2.0, z + (1.0 - lambda), 1.0),
            Law::KestenMcKay { v } => (2.0 * (v - 1.0), z * (v - 2.0), v),
            Law::Wachter { a, b } => (
                2.0 * (a + b - 1.0),
                z * (a + b - 2.0) + one * (1.0 - a),
                a + b,
            ),
        };
        let root = (z - s.lo).sqrt() * (z - s.hi).sqrt();
        let g = c / (p + root * scale);
        if g.is_finite() {
            Ok(g)
        } else {
            Err(Error::Domain(format!("Cauchy transform of {} is singular at {z}", self.name())))
        }
    }

    /// Raw moment `m_n`.
    pub fn moment(&self, n: u32) -> f64 {
        if n == 0 {
            return 1.0;
        }
        match self.0 {
            Law::WignerSemicircle => {
                if n % 2 == 0 {
                    to_f64(&catalan(n / 2))
                } else {
                    0.0
                }
            }
            Law::MarchenkoPastur { lambda } => narayana_poly(n, lambda),
            Law::KestenMcKay { v } => {
                if n % 2 == 1 {
                    return 0.0;
                }
                let h = n / 2;
                (1..=h)
                    .map(|j| to_f64(&kesten_mckay_coefficient(n, j)) * v.powi(j as i32) * (v - 1.0).powi((h - j) as i32))
                    .sum()
            }
            Law::Wachter { a, b } => {
                let c = a * (a + b - 1.0);
                let r = b / c;
                let base = c / ((a + b) * (a + b));
                let tail: f64 = (0..n - 1)
                    .map(|j| base.powi(j as i32 + 2) * narayana_poly(j + 1, r))
                    .sum();
                a / (a + b) - (a + b) * tail
            }
        }
    }

    /// Free cumulant `kappa_n`, `n >= 1`.
    pub fn free_cumulant(&self, n: u32) -> f64 {
        assert!(n >= 1, "free cumulants start at n = 1");
        match self.0 {
            Law::WignerSemicircle => {
                if n == 2 {
                    1.0
                } else {
                    0.0
                }
            }
            Law::MarchenkoPastur { lambda } => lambda,
            Law::KestenMcKay { v } => {
                if n % 2 == 1 {
                    return 0.0;
                }
                let h = (n - 2) / 2;
                let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
                sign * v * to_f64(&catalan(h))
            }
            Law::Wachter { a, b } => {
                // kappa_n = -N_{n-1}(-b/a) (-a)^n / (a+b)^{2n-1}
                let s = a + b;
                -narayana_poly(n - 1, -b / a) * (-a).powi(n as i32) / s.powi(2 * n as i32 - 1)
            }
        }
    }

    /// R-transform `R(w) = sum_n kappa_{n+1} w^n`, on the branch regular at 0.
    pub fn r_transform(&self, w: ComplexPoint) -> Result<ComplexPoint> {
        let out = match self.0 {
            Law::WignerSemicircle => w,
            Law::MarchenkoPastur { lambda } => {
                if w == Complex64::new(1.0, 0.0) {
                    return Err(Error::Domain("Marchenko-Pastur R-transform has a pole at w = 1".into()));
                }
                lambda / (1.0 - w)
            }
            Law::KestenMcKay { v } => {
                // (-v + v sqrt(1 + 4w^2)) / (2w), rationalized
                2.0 * v * w / (1.0 + (1.0 + 4.0 * w * w).sqrt())
            }
            Law::Wachter { a, b } => {
                // (-a - b + w + sqrt((a+b)^2 + 2(a-b)w + w^2)) / (2w), rationalized
                let disc = (a + b) * (a + b) + 2.0 * (a - b) * w + w * w;
                2.0 * a / (disc.sqrt() + (a + b) - w)
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::Domain(format!("R-transform of {} is singular at {w}", self.name())))
        }
    }

    /// S-transform `S(z) = R^{-1}(z) / z`.
    pub fn s_transform(&self, z: ComplexPoint) -> Result<ComplexPoint> {
        let zero = Complex64::zero();
        let domain = |what: &str| Err(Error::Domain(format!("{} S-transform undefined at {what}", self.name())));
        let out = match self.0 {
            Law::WignerSemicircle => Complex64::one(),
            Law::MarchenkoPastur { lambda } => {
                if z == zero {
                    return domain("z = 0");
                }
                (z - lambda) / (z * z)
            }
            Law::KestenMcKay { v } => {
                if z == Complex64::new(v, 0.0) || z == Complex64::new(-v, 0.0) {
                    return domain("z = +-v");
                }
                v / (v * v - z * z)
            }
            Law::Wachter { a, b } => {
                if z == zero || z == Complex64::one() {
                    return domain("z = 0 or z = 1");
                }
                (a - (a + b) * z) / (z * z * (z - 1.0))
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::Domain(format!("S-transform of {} is singular at {z}", self.name())))
        }
    }

    /// Jacobi parameters: a one-entry boundary `(alpha_0, beta_0)` followed by
    /// the constant tail `(alpha_n, beta_n)`, `n >= 1`.
    pub fn jacobi_params(&self) -> BorderedJacobi {
        let (a0, b0, a1, b1) = match self.0 {
            Law::WignerSemicircle => (0.0, 1.0, 0.0, 1.0),
            Law::MarchenkoPastur { lambda } => {
                let r = lambda.sqrt();
                (lambda, r, lambda + 1.0, r)
            }
            Law::KestenMcKay { v } => (0.0, v.sqrt(), 0.0, (v - 1.0).sqrt()),
            Law::Wachter { a, b } => {
                let s = a + b;
                (
                    a / s,
                    (a * b).sqrt() / s.powf(1.5),
                    (a * a - a + a * b + b) / (s * s),
                    (a * b * (s - 1.0)).sqrt() / (s * s),
                )
            }
        };
        BorderedJacobi::new(vec![a0], vec![b0], a1, b1).expect("law parameters are valid")
    }

    /// Monic orthogonal polynomial of degree `n`,
    /// `beta_1^{n-1} (x - alpha_0) U_{n-1}(t) - beta_0^2 beta_1^{n-2} U_{n-2}(t)`
    /// with `t = (x - alpha_1) / (2 beta_1)`.
    ///
    /// These are not unit-norm; their squared norm is `prod_{i<n} beta_i^2`.
    pub fn orthogonal_poly(&self, n: u32, x: f64) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let j = self.jacobi_params();
        let (a0, b0, a1, b1) = (j.alpha(0), j.beta(0), j.alpha(1), j.beta(1));
        let t = (x - a1) / (2.0 * b1);
        let n = n as i64;
        let first = b1.powi(n as i32 - 1) * (x - a0) * chebyshev_u(n - 1, t);
        if n == 1 {
            return first;
        }
        first - b0 * b0 * b1.powi(n as i32 - 2) * chebyshev_u(n - 2, t)
    }

    /// Cosine-grid discretization of the density over its support.
    pub fn discretize(&self, points: usize) -> Result<DiscretizedMeasure> {
        let s = self.support();
        DiscretizedMeasure::from_density(s.lo, s.hi, points, |x| self.density(x))
    }
}

/// Integer coefficient `binom(n-j, n/2) j / (n-j)` of `v^j (v-1)^{n/2-j}` in
/// the `n`-th Kesten-McKay moment.
pub fn kesten_mckay_coefficient(n: u32, j: u32) -> BigUint {
    let h = n / 2;
    assert!(n % 2 == 0 && (1..=h).contains(&j));
    binomial((n - j) as u64, h as u64) * j / (n - j)
}

/// A law with exact rational parameters, for exact moment/cumulant checks.
#[derive(Clone, Debug, PartialEq)]
pub enum RationalLaw {
    WignerSemicircle,
    MarchenkoPastur { lambda: BigRational },
    KestenMcKay { v: BigRational },
    Wachter { a: BigRational, b: BigRational },
}

impl RationalLaw {
    pub fn moment(&self, n: u32) -> BigRational {
        let int = |v: BigUint| BigRational::from_integer(BigInt::from(v));
        if n == 0 {
            return BigRational::one();
        }
        match self {
            RationalLaw::WignerSemicircle => {
                if n % 2 == 0 {
                    int(catalan(n / 2))
                } else {
                    BigRational::zero()
                }
            }
            RationalLaw::MarchenkoPastur { lambda } => narayana_poly_exact(n, lambda),
            RationalLaw::KestenMcKay { v } => {
                if n % 2 == 1 {
                    return BigRational::zero();
                }
                let h = n / 2;
                let vm1 = v - BigRational::one();
                (1..=h)
                    .map(|j| {
                        int(kesten_mckay_coefficient(n, j))
                            * num_traits::pow(v.clone(), j as usize)
                            * num_traits::pow(vm1.clone(), (h - j) as usize)
                    })
                    .fold(BigRational::zero(), |acc, t| acc + t)
            }
            RationalLaw::Wachter { a, b } => {
                let one = BigRational::one();
                let s = a + b;
                let c = a * (&s - &one);
                let r = b / &c;
                let base = &c / (&s * &s);
                let mut tail = BigRational::zero();
                for j in 0..n - 1 {
                    tail += num_traits::pow(base.clone(), j as usize + 2) * narayana_poly_exact(j + 1, &r);
                }
                a / &s - s * tail
            }
        }
    }

    pub fn free_cumulant(&self, n: u32) -> BigRational {
        assert!(n >= 1);
        match self {
            RationalLaw::WignerSemicircle => {
                if n == 2 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
            RationalLaw::MarchenkoPastur { lambda } => lambda.clone(),
            RationalLaw::KestenMcKay { v } => {
                if n % 2 == 1 {
                    return BigRational::zero();
                }
                let h = (n - 2) / 2;
                let c = BigRational::from_integer(BigInt::from(catalan(h)));
                let t = v * c;
                if h % 2 == 0 {
                    t
                } else {
                    -t
                }
            }
            RationalLaw::Wachter { a, b } => {
                let s = a + b;
                let neg_a = -a.clone();
                -narayana_poly_exact(n - 1, &(-(b / a)))
                    * num_traits::pow(neg_a, n as usize)
                    / num_traits::pow(s, 2 * n as usize - 1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> ComplexPoint {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn parameter_validation() {
        assert!(LawSpec::marchenko_pastur(0.5).is_err());
        assert!(LawSpec::marchenko_pastur(1.0).is_ok());
        assert!(LawSpec::kesten_mckay(1.9).is_err());
        assert!(LawSpec::kesten_mckay(2.0).is_ok());
        assert!(LawSpec::wachter(0.5, 2.0).is_err());
        assert!(LawSpec::wachter(2.0, 0.99).is_err());
        assert!(LawSpec::wachter(1.0, 1.0).is_ok());
        assert!(LawSpec::marchenko_pastur(f64::NAN).is_err());
        let msg = LawSpec::marchenko_pastur(0.5).unwrap_err().to_string();
        assert!(msg.contains("lambda >= 1"), "{msg}");
    }

    #[test]
    fn supports() {
        assert_eq!(LawSpec::wigner().support(), SupportInterval { lo: -2.0, hi: 2.0 });
        let s = LawSpec::marchenko_pastur(1.0).unwrap().support();
        assert_eq!((s.lo, s.hi), (0.0, 4.0));
        let s = LawSpec::wachter(1.0, 1.0).unwrap().support();
        assert!((s.lo - 0.0).abs() < 1e-15 && (s.hi - 1.0).abs() < 1e-15);
        let s = LawSpec::kesten_mckay(5.0).unwrap().support();
        assert_eq!((s.lo, s.hi), (-4.0, 4.0));
    }

    #[test]
    fn density_points() {
        let w = LawSpec::wigner();
        assert!((w.density(0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(w.density(3.0), 0.0);
        assert_eq!(w.density(2.0), 0.0);
        let km = LawSpec::kesten_mckay(2.0).unwrap();
        assert!((km.density(0.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn arcsine_specialization() {
        let km = LawSpec::kesten_mckay(2.0).unwrap();
        for i in 1..400 {
            let x = -2.0 + 4.0 * i as f64 / 400.0;
            let want = 1.0 / (PI * ((2.0 - x) * (2.0 + x)).sqrt());
            assert!((km.density(x) - want).abs() <= 4.0 * f64::EPSILON * want, "x={x}");
        }
    }

    #[test]
    fn kesten_mckay_is_linear_image_of_wachter() {
        for v in [2.0, 3.0, 4.5, 7.0] {
            let km = LawSpec::kesten_mckay(v).unwrap();
            let wa = LawSpec::wachter(v / 2.0, v / 2.0).unwrap();
            for i in 1..200 {
                let xw = i as f64 / 200.0;
                let xk = (2.0 * xw - 1.0) * v;
                // dx_k = 2v dx_w
                let pushed = wa.density(xw) / (2.0 * v);
                assert!((km.density(xk) - pushed).abs() <= 1e-10, "v={v} x={xw}");
            }
        }
    }

    #[test]
    fn cauchy_examples() {
        let w = LawSpec::wigner();
        let g = w.cauchy_transform(c(3.0)).unwrap();
        assert!((g.re - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15 && g.im == 0.0);
        let g = w.cauchy_transform(c(-3.0)).unwrap();
        assert!((g.re + (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        let big = 1e8;
        assert!((w.cauchy_transform(c(big)).unwrap().re * big - 1.0).abs() < 1e-12);
        assert!(matches!(w.cauchy_transform(c(0.5)), Err(Error::Domain(_))));
        // just above the cut the density appears
        let g = w.cauchy_transform(Complex64::new(0.0, 1e-12)).unwrap();
        assert!((-g.im / PI - 1.0 / PI).abs() < 1e-9);
    }

    #[test]
    fn cauchy_matches_moment_series() {
        let mp = LawSpec::marchenko_pastur(2.0).unwrap();
        let z: f64 = 40.0;
        let series: f64 = (0..=30).map(|n| mp.moment(n) / z.powi(n as i32 + 1)).sum();
        let g = mp.cauchy_transform(c(z)).unwrap();
        assert!((g.re - series).abs() <= 1e-9, "{} vs {series}", g.re);
    }

    #[test]
    fn cauchy_removable_points_are_finite() {
        let km = LawSpec::kesten_mckay(3.0).unwrap();
        assert!(km.cauchy_transform(c(3.0)).unwrap().is_finite());
        let wa = LawSpec::wachter(2.0, 3.0).unwrap();
        assert!(wa.cauchy_transform(c(1.0)).unwrap().is_finite());
        assert!(wa.cauchy_transform(c(0.0)).unwrap().is_finite());
    }

    #[test]
    fn moments_examples() {
        let w = LawSpec::wigner();
        let got: Vec<f64> = (0..=12).map(|n| w.moment(n)).collect();
        assert_eq!(got, vec![1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0, 0.0, 42.0, 0.0, 132.0]);
        assert_eq!(LawSpec::marchenko_pastur(1.0).unwrap().moment(3), 5.0);
        let (a, b) = (2.5, 1.5);
        let wa = LawSpec::wachter(a, b).unwrap();
        assert!((wa.moment(1) - a / (a + b)).abs() < 1e-15);
        // KM: m_4 = 2v^2 - v
        let km = LawSpec::kesten_mckay(3.0).unwrap();
        assert_eq!(km.moment(4), 15.0);
        assert_eq!(km.moment(5), 0.0);
    }

    #[test]
    fn cumulant_examples() {
        let w = LawSpec::wigner();
        assert_eq!(w.free_cumulant(2), 1.0);
        assert_eq!(w.free_cumulant(3), 0.0);
        assert_eq!(LawSpec::kesten_mckay(3.0).unwrap().free_cumulant(4), -3.0);
        assert_eq!(LawSpec::marchenko_pastur(2.0).unwrap().free_cumulant(5), 2.0);
        // Wachter: kappa_1 is the mean, kappa_2 the variance
        let (a, b) = (2.0, 3.0);
        let wa = LawSpec::wachter(a, b).unwrap();
        assert!((wa.free_cumulant(1) - 0.4).abs() < 1e-15);
        assert!((wa.free_cumulant(2) - a * b / 125.0).abs() < 1e-15);
    }

    #[test]
    fn r_transform_examples() {
        let w = LawSpec::wigner();
        let z = Complex64::new(0.3, -0.2);
        assert_eq!(w.r_transform(z).unwrap(), z);
        let mp = LawSpec::marchenko_pastur(2.0).unwrap();
        assert!((mp.r_transform(c(0.5)).unwrap().re - 4.0).abs() < 1e-15);
        assert!(mp.r_transform(c(1.0)).is_err());
        let km = LawSpec::kesten_mckay(4.0).unwrap();
        assert_eq!(km.r_transform(c(0.0)).unwrap(), Complex64::zero());
        let wa = LawSpec::wachter(2.0, 3.0).unwrap();
        assert!((wa.r_transform(c(0.0)).unwrap().re - 0.4).abs() < 1e-15);
    }

    #[test]
    fn r_transform_series_matches_cumulants() {
        let laws = [
            LawSpec::marchenko_pastur(2.0).unwrap(),
            LawSpec::kesten_mckay(3.0).unwrap(),
            LawSpec::wachter(2.0, 3.0).unwrap(),
        ];
        for law in laws {
            let w: f64 = 0.01;
            let series: f64 = (0..12).map(|n| law.free_cumulant(n + 1) * w.powi(n as i32)).sum();
            let r = law.r_transform(c(w)).unwrap().re;
            assert!((r - series).abs() < 1e-14, "{}: {r} vs {series}", law.name());
        }
    }

    #[test]
    fn s_transform_examples() {
        assert_eq!(LawSpec::wigner().s_transform(c(0.0)).unwrap(), Complex64::one());
        let mp = LawSpec::marchenko_pastur(3.0).unwrap();
        let z = Complex64::new(0.7, 0.1);
        assert!((mp.s_transform(z).unwrap() - (z - 3.0) / (z * z)).norm() < 1e-15);
        assert!(mp.s_transform(c(0.0)).is_err());
        let km = LawSpec::kesten_mckay(3.0).unwrap();
        assert!((km.s_transform(c(1.0)).unwrap().re - 3.0 / 8.0).abs() < 1e-15);
        assert!(km.s_transform(c(3.0)).is_err());
        assert!(km.s_transform(c(-3.0)).is_err());
        let wa = LawSpec::wachter(2.0, 3.0).unwrap();
        assert!(wa.s_transform(c(0.0)).is_err());
        assert!(wa.s_transform(c(1.0)).is_err());
    }

    #[test]
    fn jacobi_params_examples() {
        let j = LawSpec::wigner().jacobi_params();
        assert_eq!((j.alpha(0), j.beta(0), j.alpha(1), j.beta(1)), (0.0, 1.0, 0.0, 1.0));
        let j = LawSpec::marchenko_pastur(2.0).unwrap().jacobi_params();
        let r2 = 2f64.sqrt();
        assert_eq!((j.alpha(0), j.alpha(1)), (2.0, 3.0));
        assert!((j.beta(0) - r2).abs() < 1e-15 && (j.beta(1) - r2).abs() < 1e-15);
        let j = LawSpec::wachter(1.0, 1.0).unwrap().jacobi_params();
        assert!((j.alpha(0) - 0.5).abs() < 1e-15);
        assert!((j.beta(0) - 1.0 / (2.0 * r2)).abs() < 1e-15);
        assert!((j.alpha(1) - 0.5).abs() < 1e-15);
        assert!((j.beta(1) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn tail_support_matches_law_support() {
        for law in [
            LawSpec::wigner(),
            LawSpec::marchenko_pastur(4.0).unwrap(),
            LawSpec::kesten_mckay(3.0).unwrap(),
            LawSpec::wachter(2.0, 3.0).unwrap(),
        ] {
            let (s, t) = (law.support(), law.jacobi_params().tail_support());
            assert!((s.lo - t.lo).abs() < 1e-14 && (s.hi - t.hi).abs() < 1e-14, "{}", law.name());
        }
    }

    #[test]
    fn wigner_polys_are_chebyshev() {
        let w = LawSpec::wigner();
        for n in 0..8 {
            for x in [-1.9, -0.3, 0.0, 1.1, 2.5] {
                let want = chebyshev_u(n as i64, x / 2.0);
                assert!((w.orthogonal_poly(n, x) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orthogonal_poly_matches_recurrence() {
        // monic recurrence p_{n+1} = (x - alpha_n) p_n - beta_{n-1}^2 p_{n-1}
        let law = LawSpec::marchenko_pastur(2.0).unwrap();
        let j = law.jacobi_params();
        for i in 0..20 {
            let x = -1.0 + 0.37 * i as f64;
            let (mut prev, mut cur) = (0.0, 1.0);
            for n in 0..6u32 {
                assert!((law.orthogonal_poly(n, x) - cur).abs() <= 1e-10 * cur.abs().max(1.0));
                let b = if n == 0 { 0.0 } else { j.beta(n as usize - 1) };
                let next = (x - j.alpha(n as usize)) * cur - b * b * prev;
                prev = cur;
                cur = next;
            }
        }
    }

    #[test]
    fn exact_cumulants_match_float() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let exact = RationalLaw::Wachter { a: r(2, 1), b: r(3, 1) };
        let float = LawSpec::wachter(2.0, 3.0).unwrap();
        for n in 1..8 {
            let e = num_traits::ToPrimitive::to_f64(&exact.free_cumulant(n)).unwrap();
            assert!((e - float.free_cumulant(n)).abs() < 1e-15);
            let m = num_traits::ToPrimitive::to_f64(&exact.moment(n)).unwrap();
            assert!((m - float.moment(n)).abs() < 1e-14);
        }
    }
}
