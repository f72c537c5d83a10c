//! Truncated power series over `Complex64`, in one and two variables.
//!
//! A [`TruncatedSeries`] of order `N` holds exactly the coefficients
//! `c_0..=c_N`; every binary operation truncates to the smaller order of its
//! operands. A [`BivariateSeries`] of total degree `M` holds `c(i, j)` for
//! `i + j <= M` in a dense triangular layout.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{require_order, Error, Result};

/// Default truncation order for univariate series.
pub const DEFAULT_ORDER: usize = 12;

/// Allowed distance of a constant term from 1 before `log`/`pow` refuse.
pub const UNIT_CONSTANT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_unit(c0: Complex64) -> Result<()> {
    if (c0 - ONE).norm() > UNIT_CONSTANT_TOL {
        Err(Error::NonUnitConstantTerm { re: c0.re, im: c0.im })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    /// Builds a series of order `coeffs.len() - 1`.
    ///
    /// Panics if `coeffs` is empty; a series always has at least `c_0`.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least c_0");
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![ZERO; order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(order, 0, ONE)
    }

    /// `c * z^k` truncated at `order` (vanishes if `k > order`).
    pub fn monomial(order: usize, k: usize, c: Complex64) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^n`, or `None` beyond the truncation.
    pub fn coeff(&self, n: usize) -> Option<Complex64> {
        self.coeffs.get(n).copied()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order());
        Self::new(self.coeffs[..=keep].to_vec())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        Self::new(self.coeffs.iter().enumerate().map(|(n, &a)| f(n, a)).collect())
    }

    pub fn conj(&self) -> Self {
        self.map(|_, a| a.conj())
    }

    /// Formal derivative; order drops by one (an order-0 series maps to 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, &a)| a * n as f64)
                .collect(),
        )
    }

    /// Antiderivative with constant term `c0`; order grows by one.
    pub fn integral(&self, c0: Complex64) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(c0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, &a)| a / (n + 1) as f64),
        );
        Self::new(out)
    }

    /// `f(z^k)`: index dilation, order becomes `k * order`.
    pub fn dilate(&self, k: usize) -> Self {
        assert!(k >= 1, "dilation factor must be positive");
        let mut out = Self::zero(self.order() * k);
        for (n, &a) in self.coeffs.iter().enumerate() {
            out.coeffs[n * k] = a;
        }
        out
    }

    /// Multiplies by `z^k`, keeping the order fixed at `order() + k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(coeffs)
    }

    /// Cauchy product truncated at `min(order(self), order(other))`.
    pub fn cauchy_product(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|n| (0..=n).map(|k| self.coeffs[k] * other.coeffs[n - k]).sum())
            .collect();
        Self::new(coeffs)
    }

    /// `self / other`; needs `other.c_0 != 0`.
    pub fn divide(&self, other: &Self) -> Result<Self> {
        let d0 = other.coeffs[0];
        if d0 == ZERO {
            return Err(Error::DomainError("division by a series with zero constant term".into()));
        }
        let order = self.order().min(other.order());
        let mut q = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let acc: Complex64 = (1..=n).map(|k| other.coeffs[k] * q[n - k]).sum();
            q.push((self.coeffs[n] - acc) / d0);
        }
        Ok(Self::new(q))
    }

    /// Principal logarithm of a series with constant term 1, via `L' = u'/u`.
    pub fn log(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        check_unit(c0)?;
        if self.order() == 0 {
            return Ok(Self::new(vec![c0.ln()]));
        }
        let q = self.derivative().divide(&self.truncate(self.order() - 1))?;
        Ok(q.integral(c0.ln()))
    }

    /// Series exponential; any constant term is allowed.
    pub fn exp(&self) -> Self {
        let order = self.order();
        let mut e = Vec::with_capacity(order + 1);
        e.push(self.coeffs[0].exp());
        for n in 1..=order {
            let acc: Complex64 = (1..=n)
                .map(|k| self.coeffs[k] * k as f64 * e[n - k])
                .sum();
            e.push(acc / n as f64);
        }
        Self::new(e)
    }

    /// `exp(alpha * log(self))`, the branch with value 1 at the origin.
    pub fn pow(&self, alpha: f64) -> Result<Self> {
        Ok(self.log()?.scale(Complex64::new(alpha, 0.0)).exp())
    }

    /// Largest coefficient gap over the common truncation.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.cauchy_product(rhs)
    }
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        TruncatedSeries::new((0..=order).map(|n| self.coeffs[n] + rhs.coeffs[n]).collect())
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        TruncatedSeries::new((0..=order).map(|n| self.coeffs[n] - rhs.coeffs[n]).collect())
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.map(|_, a| -a)
    }
}

/// Truncated series in `(t, z)`, coefficients `c(i, j)` for `i + j <= M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSeries {
    total_degree: usize,
    coeffs: Vec<Complex64>,
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

impl BivariateSeries {
    pub fn zero(total_degree: usize) -> Self {
        let len = (total_degree + 1) * (total_degree + 2) / 2;
        Self { total_degree, coeffs: vec![ZERO; len] }
    }

    pub fn one(total_degree: usize) -> Self {
        let mut s = Self::zero(total_degree);
        s.coeffs[0] = ONE;
        s
    }

    pub fn from_fn(total_degree: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut s = Self::zero(total_degree);
        for d in 0..=total_degree {
            for j in 0..=d {
                s.coeffs[tri_index(d - j, j)] = f(d - j, j);
            }
        }
        s
    }

    pub fn total_degree(&self) -> usize {
        self.total_degree
    }

    /// `c(i, j)`, or `None` when `i + j` exceeds the total degree.
    pub fn get(&self, i: usize, j: usize) -> Option<Complex64> {
        (i + j <= self.total_degree).then(|| self.coeffs[tri_index(i, j)])
    }

    /// All retained entries as `(i, j, c)`, ordered by total degree.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..=self.total_degree)
            .flat_map(|d| (0..=d).map(move |j| (d - j, j)))
            .map(|(i, j)| (i, j, self.coeffs[tri_index(i, j)]))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            total_degree: self.total_degree,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let m = self.total_degree.min(other.total_degree);
        Self::from_fn(m, |i, j| {
            f(self.coeffs[tri_index(i, j)], other.coeffs[tri_index(i, j)])
        })
    }

    pub fn product(&self, other: &Self) -> Self {
        let m = self.total_degree.min(other.total_degree);
        let mut out = Self::zero(m);
        for d1 in 0..=m {
            for j1 in 0..=d1 {
                let a = self.coeffs[tri_index(d1 - j1, j1)];
                if a == ZERO {
                    continue;
                }
                for d2 in 0..=(m - d1) {
                    for j2 in 0..=d2 {
                        let b = other.coeffs[tri_index(d2 - j2, j2)];
                        out.coeffs[tri_index(d1 - j1 + d2 - j2, j1 + j2)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// The divided-difference kernel `(f(t) - f(z)) / (t - z)`, truncated to
    /// total degree `total_degree`. Since `(t^n - z^n)/(t - z)` is the sum of
    /// `t^i z^j` over `i + j = n - 1`, entry `(i, j)` is `a_{i+j+1}`.
    pub fn divided_difference(f: &TruncatedSeries, total_degree: usize) -> Result<Self> {
        match (f.coeff(0), f.coeff(1)) {
            (Some(c0), Some(c1)) if c0 == ZERO && c1 == ONE => {}
            _ => return Err(Error::NotNormalized),
        }
        require_order(total_degree + 1, f.order())?;
        Ok(Self::from_fn(total_degree, |i, j| f.coeffs[i + j + 1]))
    }

    /// Principal logarithm by the Mercator series of `log(1 + u)`,
    /// `u = F / F(0,0) - 1`; `u^k` starts at degree `k`, so `k <= M` terms
    /// are exact up to truncation.
    pub fn log(&self) -> Result<Self> {
        let c00 = self.coeffs[0];
        check_unit(c00)?;
        let mut u = self.scale(c00.inv());
        u.coeffs[0] = ZERO;
        let mut out = Self::zero(self.total_degree);
        out.coeffs[0] = c00.ln();
        let mut power = u.clone();
        for k in 1..=self.total_degree {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let w = Complex64::new(sign / k as f64, 0.0);
            for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                *o += p * w;
            }
            power = power.product(&u);
        }
        Ok(out)
    }

    /// Series exponential, `exp(c00) * sum v^k / k!` with `v = self - c00`.
    pub fn exp(&self) -> Self {
        let c00 = self.coeffs[0];
        let mut v = self.clone();
        v.coeffs[0] = ZERO;
        let mut out = Self::one(self.total_degree);
        let mut term = Self::one(self.total_degree);
        for k in 1..=self.total_degree {
            term = term.product(&v).scale(Complex64::new(1.0 / k as f64, 0.0));
            out = &out + &term;
        }
        out.scale(c00.exp())
    }

    /// `max |c(i,j) - c(j,i)|` over retained entries.
    pub fn max_asymmetry(&self) -> f64 {
        self.entries()
            .map(|(i, j, c)| (c - self.coeffs[tri_index(j, i)]).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl<'a> Add<&'a BivariateSeries> for &'a BivariateSeries {
    type Output = BivariateSeries;
    fn add(self, rhs: &BivariateSeries) -> BivariateSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a BivariateSeries> for &'a BivariateSeries {
    type Output = BivariateSeries;
    fn sub(self, rhs: &BivariateSeries) -> BivariateSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<'a> Mul<&'a BivariateSeries> for &'a BivariateSeries {
    type Output = BivariateSeries;
    fn mul(self, rhs: &BivariateSeries) -> BivariateSeries {
        self.product(rhs)
    }
}
