//! Grunsky coefficients of the odd square-root transform `f2(z) = sqrt(f(z^2))`.
//!
//! With `log((f2(t) - f2(z))/(t - z)) = sum w(p,q) t^p z^q`, the table keeps
//! `w(r, s)` for odd `r, s`, indexed by the odd indices themselves.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{require_order, Error, Result};
use crate::families::{FamilyTag, SchlichtFunction};
use crate::series::{BivariateSeries, TruncatedSeries};

/// Default largest odd Grunsky index; needs `a_8`.
pub const DEFAULT_MAX_INDEX: usize = 7;

/// Mixed-parity entries must vanish to this level.
pub const PARITY_TOL: f64 = 1e-10;

/// `z * (f(z^2)/z^2)^{1/2}`, an odd series of order `2N - 1`.
pub fn sqrt_transform(f: &SchlichtFunction) -> Result<TruncatedSeries> {
    let s = f.series();
    if s.coeff(0) != Some(Complex64::new(0.0, 0.0)) || s.coeff(1) != Some(Complex64::new(1.0, 0.0)) {
        return Err(Error::NotNormalized);
    }
    let quotient = TruncatedSeries::new(s.coeffs()[1..].to_vec());
    let root = quotient.pow(0.5)?;
    Ok(root.dilate(2).shift_up(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrunskyTable {
    entries: BTreeMap<(usize, usize), Complex64>,
    max_index: usize,
    source: FamilyTag,
}

impl GrunskyTable {
    /// All-zero table; this is the table of `f(z) = z`.
    pub fn zero(max_index: usize) -> Self {
        Self::from_fn(max_index, FamilyTag::Identity, |_, _| Complex64::new(0.0, 0.0))
    }

    /// Table with caller-supplied entries, symmetrized by evaluating only
    /// `r <= s`.
    pub fn from_fn(
        max_index: usize,
        source: FamilyTag,
        f: impl Fn(usize, usize) -> Complex64,
    ) -> Self {
        let mut entries = BTreeMap::new();
        for r in (1..=max_index).step_by(2) {
            for s in (r..=max_index).step_by(2) {
                let w = f(r, s);
                entries.insert((r, s), w);
                entries.insert((s, r), w);
            }
        }
        Self { entries, max_index, source }
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn source(&self) -> &FamilyTag {
        &self.source
    }

    /// `w(r, s)` for odd `r, s <= max_index`.
    pub fn get(&self, r: usize, s: usize) -> Option<Complex64> {
        self.entries.get(&(r, s)).copied()
    }

    /// Like [`get`](Self::get) but reports a missing entry as an error.
    pub fn omega(&self, r: usize, s: usize) -> Result<Complex64> {
        if r % 2 == 0 || s % 2 == 0 {
            return Err(Error::DimensionMismatch(format!(
                "Grunsky table stores odd indices only, asked for ({r},{s})"
            )));
        }
        self.get(r, s).ok_or(Error::InsufficientOrder {
            needed: r.max(s),
            available: self.max_index,
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.entries
            .iter()
            .map(|(&(r, s), w)| (w - self.entries[&(s, r)]).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn low_order(&self) -> Result<LowOrder> {
        Ok(LowOrder {
            w11: self.omega(1, 1)?,
            w13: self.omega(1, 3)?,
            w33: self.omega(3, 3)?,
            w15: self.omega(1, 5)?,
            w35: self.omega(3, 5)?,
        })
    }
}

/// The five Grunsky coefficients that appear in the coefficient relations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LowOrder {
    pub w11: Complex64,
    pub w13: Complex64,
    pub w33: Complex64,
    pub w15: Complex64,
    pub w35: Complex64,
}

impl Serialize for GrunskyTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            r: usize,
            s: usize,
            #[serde(with = "crate::cserde")]
            omega: Complex64,
        }
        let entries: Vec<Entry> = self
            .entries
            .iter()
            .map(|(&(r, s), &omega)| Entry { r, s, omega })
            .collect();
        let mut st = s.serialize_struct("GrunskyTable", 3)?;
        st.serialize_field("source", &self.source)?;
        st.serialize_field("max_index", &self.max_index)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

/// Builds the table of `f2` for odd indices up to `max_index`.
///
/// Needs `a_{max_index + 1}`: the kernel is taken to total degree
/// `2 * max_index`, which reads `c_{2 max_index + 1}` of `f2`.
pub fn grunsky_table(f: &SchlichtFunction, max_index: usize) -> Result<GrunskyTable> {
    if max_index % 2 == 0 {
        return Err(Error::DomainError(format!("max_index must be odd, got {max_index}")));
    }
    require_order(max_index + 1, f.order())?;
    let f2 = sqrt_transform(f)?;
    let kernel = BivariateSeries::divided_difference(&f2, 2 * max_index)?;
    let log = kernel.log()?;
    // f2 is odd, so the kernel and its log only have even total degree.
    for (i, j, w) in log.entries() {
        if (i + j) % 2 == 1 && w.norm() > PARITY_TOL {
            return Err(Error::ParityDefect { r: i, s: j, modulus: w.norm() });
        }
    }
    let mut entries = BTreeMap::new();
    for r in (1..=max_index).step_by(2) {
        for s in (1..=max_index).step_by(2) {
            entries.insert((r, s), log.get(r, s).expect("within total degree"));
        }
    }
    Ok(GrunskyTable { entries, max_index, source: f.tag().clone() })
}

/// Residuals `lhs - rhs` of the coefficient relations expressing
/// `a_2..a_5` through Grunsky coefficients of `f2`.
///
/// `a5` is the relation in its commonly quoted form with the term
/// `5 w15^2`; `a5_omega13` is the same relation with `5 w13^2`, which is the
/// form that holds identically. The two differ by `5 (w13^2 - w15^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientRelations {
    #[serde(with = "crate::cserde")]
    pub a2: Complex64,
    #[serde(with = "crate::cserde")]
    pub a3: Complex64,
    #[serde(with = "crate::cserde")]
    pub a4: Complex64,
    #[serde(with = "crate::cserde")]
    pub a5: Complex64,
    /// `3 w15 - 3 w11 w13 + w11^3 - 3 w33`, which vanishes for odd `f2`.
    #[serde(with = "crate::cserde")]
    pub omega_identity: Complex64,
    #[serde(with = "crate::cserde")]
    pub a5_omega13: Complex64,
}

impl CoefficientRelations {
    pub const NAMES: [&'static str; 5] = ["a2", "a3", "a4", "a5", "omega_identity"];

    /// The five relations in their quoted form.
    pub fn residuals(&self) -> [Complex64; 5] {
        [self.a2, self.a3, self.a4, self.a5, self.omega_identity]
    }

    pub fn max_modulus(&self) -> f64 {
        self.residuals().iter().map(|r| r.norm()).fold(0.0, f64::max)
    }
}

pub fn verify_coefficient_relations(
    f: &SchlichtFunction,
    table: &GrunskyTable,
) -> Result<CoefficientRelations> {
    require_order(5, f.order())?;
    let LowOrder { w11, w13, w33, w15, w35 } = table.low_order()?;
    let a = |n| f.a(n).expect("order checked");
    let common_a5 = 2.0 * w35 + 8.0 * w11 * w33 + 18.0 * w11 * w11 * w13 + (7.0 / 3.0) * w11.powu(4);
    Ok(CoefficientRelations {
        a2: a(2) - 2.0 * w11,
        a3: a(3) - (2.0 * w13 + 3.0 * w11 * w11),
        a4: a(4) - (2.0 * w33 + 8.0 * w11 * w13 + (10.0 / 3.0) * w11.powu(3)),
        a5: a(5) - (common_a5 + 5.0 * w15 * w15),
        omega_identity: 3.0 * w15 - 3.0 * w11 * w13 + w11.powu(3) - 3.0 * w33,
        a5_omega13: a(5) - (common_a5 + 5.0 * w13 * w13),
    })
}

/// Test vector `(x_1, x_3, x_5, ...)` and outer truncation `q_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityProbe {
    #[serde(with = "crate::cserde::vec")]
    pub x: Vec<Complex64>,
    pub q_max: usize,
}

impl InequalityProbe {
    pub fn new(x: Vec<Complex64>, q_max: usize) -> Self {
        Self { x, q_max }
    }

    /// Unit vector in slot `slot` (0 for `x_1`, 1 for `x_3`, ...).
    pub fn unit(len: usize, slot: usize, q_max: usize) -> Self {
        let mut x = vec![Complex64::new(0.0, 0.0); len];
        x[slot] = Complex64::new(1.0, 0.0);
        Self { x, q_max }
    }

    /// `(1,0,0)` and `(0,1,0)`, with the full outer sum the table allows.
    pub fn canonical(max_index: usize) -> [Self; 2] {
        let q = (max_index + 1) / 2;
        let len = q.min(3);
        [Self::unit(len, 0, q), Self::unit(len, 1.min(len - 1), q)]
    }

    /// Unit-norm vector with independent Gaussian-ish components.
    pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, len: usize, q_max: usize) -> Self {
        loop {
            let x: Vec<Complex64> = (0..len)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-3 {
                return Self { x: x.into_iter().map(|z| z / norm).collect(), q_max };
            }
        }
    }
}

/// `rhs - lhs` of the truncated odd-index Grunsky inequality
/// `sum_q (2q-1) |sum_p w(2p-1,2q-1) x_{2p-1}|^2 <= sum_p |x_{2p-1}|^2/(2p-1)`.
///
/// Partial sums of the left side only grow with `q_max`, so a negative value
/// below rounding is a genuine violation.
pub fn grunsky_residual(table: &GrunskyTable, probe: &InequalityProbe) -> Result<f64> {
    let p_len = probe.x.len();
    let largest = 2 * p_len.max(probe.q_max);
    if largest > table.max_index + 1 {
        return Err(Error::DimensionMismatch(format!(
            "probe needs index {} but table stops at {}",
            largest - 1,
            table.max_index
        )));
    }
    let rhs: f64 = probe
        .x
        .iter()
        .enumerate()
        .map(|(p, x)| x.norm_sqr() / (2 * p + 1) as f64)
        .sum();
    let lhs: f64 = (1..=probe.q_max)
        .map(|q| {
            let s = 2 * q - 1;
            let inner: Complex64 = probe
                .x
                .iter()
                .enumerate()
                .map(|(p, x)| table.entries[&(2 * p + 1, s)] * x)
                .sum();
            s as f64 * inner.norm_sqr()
        })
        .sum();
    Ok(rhs - lhs)
}
