//! Exact combinatorics: Catalan and Narayana numbers, Chebyshev polynomials of
//! the second kind, a small bivariate polynomial ring over the rationals, and
//! the number pyramid built from the Wachter moments.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Catalan number `C_n = binom(2n, n) / (n + 1)`.
pub fn catalan(n: u32) -> BigUint {
    binomial(2 * n as u64, n as u64) / (n as u64 + 1)
}

/// Narayana number `N_{n,j} = binom(n, j) binom(n, j-1) / n` for `1 <= j <= n`.
pub fn narayana(n: u32, j: u32) -> Result<BigUint> {
    if n == 0 || j == 0 || j > n {
        return Err(Error::InvalidArgument(format!(
            "Narayana number N({n},{j}) needs 1 <= j <= n"
        )));
    }
    let (n, j) = (n as u64, j as u64);
    Ok(binomial(n, j) * binomial(n, j - 1) / n)
}

/// Row `n` of the Narayana triangle, `[N_{n,1}, ..., N_{n,n}]`.
pub fn narayana_row(n: u32) -> Vec<BigUint> {
    (1..=n).map(|j| narayana(n, j).expect("j in range")).collect()
}

/// Narayana polynomial `N_n(r) = sum_j N_{n,j} r^j`, with `N_0(r) = 1`.
pub fn narayana_poly(n: u32, r: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    // Horner on the coefficient row, highest power first.
    let row = narayana_row(n);
    let mut acc = 0.0;
    for c in row.iter().rev() {
        acc = acc * r + to_f64(c);
    }
    acc * r
}

/// Exact Narayana polynomial at a rational argument.
pub fn narayana_poly_exact(n: u32, r: &BigRational) -> BigRational {
    if n == 0 {
        return BigRational::one();
    }
    let mut acc = BigRational::zero();
    for c in narayana_row(n).iter().rev() {
        acc = acc * r + BigRational::from_integer(BigInt::from(c.clone()));
    }
    acc * r
}

/// Chebyshev polynomial of the second kind by its three-term recurrence;
/// `U_{-1} = 0`, `U_0 = 1`.
pub fn chebyshev_u(n: i64, x: f64) -> f64 {
    assert!(n >= -1, "chebyshev_u is defined for n >= -1");
    if n == -1 {
        return 0.0;
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub(crate) fn to_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial in two formal symbols `a`, `b` with exact rational coefficients.
///
/// Terms are keyed by `(deg_a, deg_b)`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BivariatePolynomial {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: BigRational, deg_a: u32, deg_b: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((deg_a, deg_b), c);
        }
        Self { terms }
    }

    /// The symbol `a`.
    pub fn a() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    /// The symbol `b`.
    pub fn b() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    pub fn from_integer(c: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, deg_a: u32, deg_b: u32) -> BigRational {
        self.terms
            .get(&(deg_a, deg_b))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Iterate `((deg_a, deg_b), coefficient)` in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    fn add_term(&mut self, key: (u32, u32), c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval_f64(&self, a: f64, b: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| rational_to_f64(c) * a.powi(i as i32) * b.powi(j as i32))
            .sum()
    }

    pub fn eval_rational(&self, a: &BigRational, b: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&(i, j), c) in &self.terms {
            acc += c * num_traits::pow(a.clone(), i as usize) * num_traits::pow(b.clone(), j as usize);
        }
        acc
    }

    /// Exact quotient by `(a + b)`, or `None` when `(a + b)` does not divide.
    pub fn div_a_plus_b(&self) -> Option<Self> {
        let mut rem = self.clone();
        let mut quot = Self::zero();
        // Lex order with a > b: the last key is the leading term.
        while let Some((&(i, j), c)) = rem.terms.iter().next_back() {
            if i == 0 {
                return None;
            }
            let c = c.clone();
            quot.add_term((i - 1, j), c.clone());
            rem.add_term((i, j), -c.clone());
            rem.add_term((i - 1, j + 1), -c);
        }
        Some(quot)
    }
}

impl<'a> Add<&'a BivariatePolynomial> for &'a BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl<'a> Sub<&'a BivariatePolynomial> for &'a BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, -v.clone());
        }
        out
    }
}

impl<'a> Mul<&'a BivariatePolynomial> for &'a BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn mul(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = BivariatePolynomial::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn neg(self) -> BivariatePolynomial {
        BivariatePolynomial {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let unit = mag.is_one();
            if !unit || (i == 0 && j == 0) {
                write!(f, "{mag}")?;
            }
            for (sym, d) in [("a", i), ("b", j)] {
                match d {
                    0 => {}
                    1 => write!(f, "{sym}")?,
                    _ => write!(f, "{sym}^{d}")?,
                }
            }
        }
        Ok(())
    }
}

/// A Wachter moment `numerator(a, b) / (a + b)^denominator_power` with every
/// common factor of `(a + b)` cancelled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WachterMomentExact {
    pub numerator: BivariatePolynomial,
    pub denominator_power: u32,
}

impl WachterMomentExact {
    pub fn eval_f64(&self, a: f64, b: f64) -> f64 {
        self.numerator.eval_f64(a, b) / (a + b).powi(self.denominator_power as i32)
    }

    pub fn eval_rational(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.numerator.eval_rational(a, b)
            / num_traits::pow(a + b, self.denominator_power as usize)
    }
}

/// The `k`-th Wachter moment as an exact rational function of `a` and `b`.
///
/// Each summand `(a(a+b-1))^{j+2} / (a+b)^{2j+4} * N_{j+1}(b / (a(a+b-1)))`
/// clears to a polynomial over `(a+b)^{2j+4}` because every Narayana term
/// `r^i` has `i <= j+1`. All terms are brought over `(a+b)^{2k-1}` and the
/// numerator is then divided by `(a+b)` while it divides exactly.
pub fn wachter_moment_exact(k: u32) -> Result<WachterMomentExact> {
    if k == 0 {
        return Err(Error::InvalidArgument("Wachter moment index must be >= 1".into()));
    }
    let a = BivariatePolynomial::a();
    let b = BivariatePolynomial::b();
    let s = &a + &b;
    let c = &(&s - &BivariatePolynomial::one()) * &a; // a(a+b-1)

    let top = 2 * k - 1;
    let mut numerator = &a * &s.pow(top - 1);
    for j in 0..k.saturating_sub(1) {
        // (a+b) * c^{j+2} N_{j+1}(b/c) / (a+b)^{2j+4}
        //   = [sum_i N_{j+1,i} b^i c^{j+2-i}] / (a+b)^{2j+3}
        let mut term = BivariatePolynomial::zero();
        for (idx, coeff) in narayana_row(j + 1).into_iter().enumerate() {
            let i = idx as u32 + 1;
            let q = BigRational::from_integer(BigInt::from(coeff));
            term = &term + &(&b.pow(i) * &c.pow(j + 2 - i)).scale(&q);
        }
        let lift = s.pow(top - (2 * j + 3));
        numerator = &numerator - &(&term * &lift);
    }

    let mut denominator_power = top;
    while denominator_power > 0 {
        match numerator.div_a_plus_b() {
            Some(q) => {
                numerator = q;
                denominator_power -= 1;
            }
            None => break,
        }
    }
    Ok(WachterMomentExact {
        numerator,
        denominator_power,
    })
}

/// One triangle of the Wachter moment pyramid.
///
/// Rows are indexed by the power of `b` in the reduced numerator, highest power
/// first: `rows[0]` collects the monomials `a^i b^{k-1}`, the last row is the
/// lone `a^{2k-1}`. Inside a row coefficients are ordered by descending power
/// of `a`, signs dropped. Only monomials that actually occur are listed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentPyramidTriangle {
    pub moment_index: u32,
    pub rows: Vec<Vec<BigUint>>,
}

impl MomentPyramidTriangle {
    pub fn top_row(&self) -> &[BigUint] {
        self.rows.first().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Rows rendered as decimal strings.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect()
    }
}

pub fn wachter_pyramid(k: u32) -> Result<MomentPyramidTriangle> {
    let moment = wachter_moment_exact(k)?;
    let mut by_degree: BTreeMap<u32, Vec<(u32, BigUint)>> = BTreeMap::new();
    for (&(i, j), c) in moment.numerator.terms() {
        if !c.is_integer() {
            return Err(Error::InvalidArgument(format!(
                "non-integer coefficient {c} in Wachter moment {k}"
            )));
        }
        let mag = c.to_integer().abs().to_biguint().expect("non-negative");
        by_degree.entry(j).or_default().push((i, mag));
    }
    let rows = by_degree
        .into_iter()
        .rev()
        .map(|(_, mut row)| {
            row.sort_by_key(|t| std::cmp::Reverse(t.0));
            row.into_iter().map(|(_, c)| c).collect()
        })
        .collect();
    Ok(MomentPyramidTriangle {
        moment_index: k,
        rows,
    })
}
