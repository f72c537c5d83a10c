//! Parametric families whose members are univalent by construction.
//!
//! Starlike members come from atomic Herglotz measures: with
//! `P(z) = sum_k w_k (1 + x_k z)/(1 - x_k z)` the solution of `z f'/f = P`
//! is starlike. Convex members are obtained through the Alexander
//! correspondence `a_n -> a_n / n`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

const WEIGHT_SUM_TOL: f64 = 1e-12;
const UNIMODULAR_TOL: f64 = 1e-12;

/// Where a function came from, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyTag {
    Identity,
    KoebeRotation { theta: f64 },
    KFoldKoebe { k: u32 },
    Herglotz { weights: Vec<f64>, angles: Vec<f64> },
    Convex { source: Box<FamilyTag> },
    Raw,
}

impl FamilyTag {
    /// Flat parameter list, family specific.
    pub fn params(&self) -> Vec<f64> {
        match self {
            FamilyTag::Identity | FamilyTag::Raw => Vec::new(),
            FamilyTag::KoebeRotation { theta } => vec![*theta],
            FamilyTag::KFoldKoebe { k } => vec![f64::from(*k)],
            FamilyTag::Herglotz { weights, angles } => weights
                .iter()
                .zip(angles)
                .flat_map(|(&w, &a)| [w, a])
                .collect(),
            FamilyTag::Convex { source } => source.params(),
        }
    }

    /// Short identifier such as `convex(herglotz)`.
    pub fn name(&self) -> String {
        match self {
            FamilyTag::Identity => "identity".into(),
            FamilyTag::KoebeRotation { .. } => "koebe".into(),
            FamilyTag::KFoldKoebe { .. } => "kfold_koebe".into(),
            FamilyTag::Herglotz { .. } => "herglotz".into(),
            FamilyTag::Convex { source } => format!("convex({})", source.name()),
            FamilyTag::Raw => "raw".into(),
        }
    }
}

/// A normalized function `z + a_2 z^2 + ...` with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchlichtFunction {
    #[serde(serialize_with = "serialize_coeffs")]
    coeffs: TruncatedSeries,
    tag: FamilyTag,
    certified: bool,
}

fn serialize_coeffs<S: serde::Serializer>(c: &TruncatedSeries, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::cserde::vec::serialize(c.coeffs(), s)
}

impl SchlichtFunction {
    fn certified(coeffs: Vec<Complex64>, tag: FamilyTag) -> Self {
        debug_assert!(coeffs[0] == Complex64::new(0.0, 0.0) && coeffs[1] == Complex64::new(1.0, 0.0));
        Self { coeffs: TruncatedSeries::new(coeffs), tag, certified: true }
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.coeffs
    }

    pub fn tag(&self) -> &FamilyTag {
        &self.tag
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Every certified family in the catalog is starlike.
    pub fn is_certified_starlike(&self) -> bool {
        self.certified
    }

    pub fn order(&self) -> usize {
        self.coeffs.order()
    }

    /// Taylor coefficient `a_n`.
    pub fn a(&self, n: usize) -> Result<Complex64> {
        self.coeffs.coeff(n).ok_or(Error::InsufficientOrder { needed: n, available: self.order() })
    }

    /// The function with all coefficients conjugated, i.e. `conj(f(conj z))`.
    /// Membership in each class is preserved.
    pub fn conjugate(&self) -> Self {
        Self { coeffs: self.coeffs.conj(), tag: self.tag.clone(), certified: self.certified }
    }
}

/// The identity `f(z) = z`, starlike and convex.
pub fn identity(order: usize) -> SchlichtFunction {
    let order = order.max(1);
    let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
    c[1] = Complex64::new(1.0, 0.0);
    SchlichtFunction::certified(c, FamilyTag::Identity)
}

/// `z / (1 - e^{i theta} z)^2`, with `a_n = n e^{i(n-1) theta}`.
pub fn koebe_rotation(theta: f64, order: usize) -> SchlichtFunction {
    let order = order.max(1);
    let mut c = vec![Complex64::new(0.0, 0.0)];
    c.extend((1..=order).map(|n| Complex64::from_polar(n as f64, (n - 1) as f64 * theta)));
    c[1] = Complex64::new(1.0, 0.0);
    SchlichtFunction::certified(c, FamilyTag::KoebeRotation { theta })
}

/// `z / (1 - z^k)^{2/k}` expanded by the binomial series in `z^k`.
pub fn kfold_koebe(k: u32, order: usize) -> Result<SchlichtFunction> {
    if k == 0 {
        return Err(Error::BadParametrization("k-fold Koebe needs k >= 1".into()));
    }
    let order = order.max(1);
    let k_us = k as usize;
    let alpha = 2.0 / f64::from(k);
    let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
    // coefficient of w^m in (1 - w)^{-alpha} is prod_{j<m} (alpha + j)/(j + 1)
    let mut binom = 1.0;
    let mut m = 0;
    while 1 + k_us * m <= order {
        c[1 + k_us * m] = Complex64::new(binom, 0.0);
        binom *= (alpha + m as f64) / (m as f64 + 1.0);
        m += 1;
    }
    Ok(SchlichtFunction::certified(c, FamilyTag::KFoldKoebe { k }))
}

/// A discrete probability measure on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzAtoms {
    weights: Vec<f64>,
    points: Vec<Complex64>,
}

impl HerglotzAtoms {
    pub fn new(weights: Vec<f64>, points: Vec<Complex64>) -> Result<Self> {
        if weights.is_empty() || weights.len() != points.len() {
            return Err(Error::InvalidAtoms(format!(
                "{} weights for {} points",
                weights.len(),
                points.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(Error::InvalidAtoms(format!("negative weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidAtoms(format!("weights sum to {total}")));
        }
        if let Some(x) = points.iter().find(|x| (x.norm() - 1.0).abs() > UNIMODULAR_TOL) {
            return Err(Error::InvalidAtoms(format!("point {x} is off the unit circle")));
        }
        Ok(Self { weights, points })
    }

    pub fn from_angles(weights: Vec<f64>, angles: &[f64]) -> Result<Self> {
        let points = angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
        Self::new(weights, points)
    }

    /// `k` atoms at the `k`-th roots of unity with equal weights.
    pub fn roots_of_unity(k: usize) -> Self {
        let angles: Vec<f64> = (0..k).map(|j| TAU * j as f64 / k as f64).collect();
        Self::from_angles(vec![1.0 / k as f64; k], &angles).expect("roots of unity are valid atoms")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn angles(&self) -> Vec<f64> {
        self.points.iter().map(|x| x.arg()).collect()
    }

    /// `p_m = 2 sum_k w_k x_k^m`, the Taylor coefficients of `P` for `m >= 1`.
    fn moments(&self, order: usize) -> Vec<Complex64> {
        let mut p = vec![Complex64::new(1.0, 0.0); order + 1];
        for m in 1..=order {
            p[m] = self
                .weights
                .iter()
                .zip(&self.points)
                .map(|(&w, x)| x.powu(m as u32) * (2.0 * w))
                .sum();
        }
        p
    }
}

/// Solves `z f'/f = P` by `(n-1) a_n = sum_{j=1}^{n-1} p_{n-j} a_j`.
pub fn starlike_from_herglotz(atoms: &HerglotzAtoms, order: usize) -> SchlichtFunction {
    let order = order.max(1);
    let p = atoms.moments(order);
    let mut a = vec![Complex64::new(0.0, 0.0); order + 1];
    a[1] = Complex64::new(1.0, 0.0);
    for n in 2..=order {
        let acc: Complex64 = (1..n).map(|j| p[n - j] * a[j]).sum();
        a[n] = acc / (n - 1) as f64;
    }
    SchlichtFunction::certified(
        a,
        FamilyTag::Herglotz { weights: atoms.weights.clone(), angles: atoms.angles() },
    )
}

/// Alexander transform: the `f` with `z f' = g`, i.e. `a_n(f) = a_n(g)/n`.
///
/// Truncates to `min(order, g.order())`.
pub fn convex_from_starlike(g: &SchlichtFunction, order: usize) -> Result<SchlichtFunction> {
    if !g.is_certified_starlike() {
        return Err(Error::NotCertified);
    }
    let order = order.max(1).min(g.order());
    let c = g.coeffs.truncate(order).map(|n, a| if n == 0 { a } else { a / n as f64 });
    Ok(SchlichtFunction::certified(c.into_coeffs(), FamilyTag::Convex { source: Box::new(g.tag.clone()) }))
}

/// Wraps arbitrary coefficients `a_1..a_N` (with `a_1 = 1`); never certified.
pub fn raw_coefficients(a: &[Complex64], order: usize) -> Result<SchlichtFunction> {
    if a.first() != Some(&Complex64::new(1.0, 0.0)) {
        return Err(Error::NotNormalized);
    }
    let order = order.max(a.len());
    let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
    c[1..=a.len()].copy_from_slice(a);
    Ok(SchlichtFunction { coeffs: TruncatedSeries::new(c), tag: FamilyTag::Raw, certified: false })
}

/// Like [`raw_coefficients`] for real input.
pub fn raw_real_coefficients(a: &[f64], order: usize) -> Result<SchlichtFunction> {
    let a: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    raw_coefficients(&a, order)
}
