//! Step-by-step evaluation of the bound chain for `|H_2(2)|` and `|H_3(1)|`
//! on concrete functions.
//!
//! Every inequality in the chain is stored as `bound - quantity`, so a
//! negative entry is a violated step. The auxiliary maxima of `phi` and
//! `psi` are recomputed numerically rather than taken as constants.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{FamilyTag, SchlichtFunction};
use crate::grunsky::{grunsky_table, GrunskyTable};
use crate::hankel::{h22_direct, h22_grunsky, h31_direct, h31_grunsky, h31_grunsky_corrected, hankel_det};
use crate::optim::{golden_section_max, NelderMead};

/// Upper bound for `|H_2(2)|` on the whole class.
pub const H22_BOUND: f64 = 11.0 / 3.0;
/// Upper bound for `|H_3(1)|`: `4/3 + 4/5 + sqrt(19/15) = (32 + sqrt 285)/15`.
pub fn h31_bound() -> f64 {
    (32.0 + 285f64.sqrt()) / 15.0
}
pub const B1_BOUND: f64 = 4.0 / 3.0;
/// `B_2 <= 4/5` as obtained from the claimed maximum `psi = 1`.
pub const B2_CLAIMED_BOUND: f64 = 4.0 / 5.0;
pub const B3_SQUARED_BOUND: f64 = 19.0 / 15.0;
pub const PHI_CLAIMED_MAX: f64 = 2.0;
pub const PSI_CLAIMED_MAX: f64 = 1.0;

pub const PHI_GRID_STEP: f64 = 1e-4;
pub const PHI_TOL: f64 = 1e-10;
pub const PSI_GRID_STEP: f64 = 1e-3;
pub const PSI_TOL: f64 = 1e-8;
const PSI_STARTS: usize = 5;
/// Slack for the `psi` domain edge, which is sampled exactly.
const DOMAIN_SLACK: f64 = 1e-12;

/// `2(1 - t) + sqrt(3) t sqrt(1 - t)` on `[0, 1]`.
pub fn phi(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::DomainError(format!("phi needs 0 <= t <= 1, got {t}")));
    }
    Ok(phi_unchecked(t))
}

fn phi_unchecked(t: f64) -> f64 {
    2.0 * (1.0 - t) + 3f64.sqrt() * t * (1.0 - t).max(0.0).sqrt()
}

/// Upper edge of the `psi` domain, `sqrt(1 - t^2)/sqrt(3)`.
pub fn psi_s_max(t: f64) -> f64 {
    (1.0 - t * t).max(0.0).sqrt() / 3f64.sqrt()
}

/// `sqrt(1 - t^2 - 3 s^2) + sqrt(5) t s` on
/// `0 <= t <= 1, 0 <= s <= sqrt(1 - t^2)/sqrt(3)`.
pub fn psi(t: f64, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) || !(s >= 0.0) || s > psi_s_max(t) + DOMAIN_SLACK {
        return Err(Error::DomainError(format!("psi is undefined at ({t}, {s})")));
    }
    Ok(psi_unchecked(t, s))
}

fn psi_unchecked(t: f64, s: f64) -> f64 {
    (1.0 - t * t - 3.0 * s * s).max(0.0).sqrt() + 5f64.sqrt() * t * s
}

/// A recomputed maximum next to the value it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremumReport {
    pub arg: Vec<f64>,
    pub value: f64,
    pub claimed: f64,
    /// `value - claimed`.
    pub discrepancy: f64,
    pub grid_resolution: f64,
    pub refined_tolerance: f64,
    pub grid_max: f64,
    pub grid_arg: Vec<f64>,
    pub grid_points: usize,
    /// For `phi` only: largest forward difference over the grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_forward_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotone_decreasing: Option<bool>,
}

/// Grid over `[0, 1]` with step `1e-4`, then golden section in the bracket
/// around the best grid point. Also checks that `phi` decreases along the
/// grid (forward differences `<= 1e-12`).
pub fn maximize_phi() -> ExtremumReport {
    let steps = (1.0 / PHI_GRID_STEP).round() as usize;
    let grid: Vec<(f64, f64)> = (0..=steps)
        .map(|i| {
            let t = i as f64 / steps as f64;
            (t, phi_unchecked(t))
        })
        .collect();
    let (i_best, &(t_best, v_best)) = grid
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("grid is non-empty");
    let max_forward_difference = grid
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .fold(f64::NEG_INFINITY, f64::max);

    let lo = grid[i_best.saturating_sub(1)].0;
    let hi = grid[(i_best + 1).min(steps)].0;
    let refined = golden_section_max(phi_unchecked, lo, hi, PHI_TOL);
    let (arg, value) = if refined.value > v_best { (refined.x[0], refined.value) } else { (t_best, v_best) };

    ExtremumReport {
        arg: vec![arg],
        value,
        claimed: PHI_CLAIMED_MAX,
        discrepancy: value - PHI_CLAIMED_MAX,
        grid_resolution: PHI_GRID_STEP,
        refined_tolerance: PHI_TOL,
        grid_max: v_best,
        grid_arg: vec![t_best],
        grid_points: grid.len(),
        max_forward_difference: Some(max_forward_difference),
        monotone_decreasing: Some(max_forward_difference <= 1e-12),
    }
}

/// Grid with step `1e-3` in both variables, masked to the domain, plus the
/// exact upper edge `s = s_max(t)` for every grid `t`; then Nelder–Mead from
/// the five best grid points.
pub fn maximize_psi() -> ExtremumReport {
    let steps = (1.0 / PSI_GRID_STEP).round() as usize;
    let mut samples = Vec::new();
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let edge = psi_s_max(t);
        let mut j = 0;
        loop {
            let s = j as f64 * PSI_GRID_STEP;
            if s >= edge {
                break;
            }
            samples.push((psi_unchecked(t, s), t, s));
            j += 1;
        }
        samples.push((psi_unchecked(t, edge), t, edge));
    }
    let grid_points = samples.len();
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (grid_max, gt, gs) = samples[0];

    let objective = |x: &[f64]| match psi(x[0], x[1]) {
        Ok(v) => v,
        Err(_) => f64::NEG_INFINITY,
    };
    let nm = NelderMead {
        initial_scale: PSI_GRID_STEP,
        ftol: 1e-15,
        xtol: PSI_TOL,
        max_evals: 5_000,
        ..Default::default()
    };
    let (mut value, mut arg) = (grid_max, vec![gt, gs]);
    for &(_, t, s) in samples.iter().take(PSI_STARTS) {
        let opt = nm.maximize(objective, &[t, s]);
        if opt.value > value {
            value = opt.value;
            arg = opt.x;
        }
    }

    ExtremumReport {
        arg,
        value,
        claimed: PSI_CLAIMED_MAX,
        discrepancy: value - PSI_CLAIMED_MAX,
        grid_resolution: PSI_GRID_STEP,
        refined_tolerance: PSI_TOL,
        grid_max,
        grid_arg: vec![gt, gs],
        grid_points,
        max_forward_difference: None,
        monotone_decreasing: None,
    }
}

/// Cached result of [`maximize_psi`].
pub fn psi_maximum() -> &'static ExtremumReport {
    static CACHE: OnceLock<ExtremumReport> = OnceLock::new();
    CACHE.get_or_init(maximize_psi)
}

/// The three moduli bounding `|H_3(1)|` through its decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundTerms {
    /// `2 |w13| |4 w13^2 - w11^4|`
    pub b1: f64,
    /// `|2 w33 - (2/3) w11^3|^2`
    pub b2: f64,
    /// `|2 w35 + 5 w15^2| |2 w13 - w11^2|`
    pub b3: f64,
}

impl BoundTerms {
    pub fn sum(&self) -> f64 {
        self.b1 + self.b2 + self.b3
    }
}

pub fn bound_terms(table: &GrunskyTable) -> Result<BoundTerms> {
    let g = table.low_order()?;
    let (w11, w13, w33, w15, w35) = (g.w11, g.w13, g.w33, g.w15, g.w35);
    Ok(BoundTerms {
        b1: 2.0 * w13.norm() * (4.0 * w13 * w13 - w11.powu(4)).norm(),
        b2: (2.0 * w33 - (2.0 / 3.0) * w11.powu(3)).norm_sqr(),
        b3: (2.0 * w35 + 5.0 * w15 * w15).norm() * (2.0 * w13 - w11 * w11).norm(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub function_id: FamilyTag,
    pub certified: bool,
    #[serde(with = "crate::cserde")]
    pub h22: Complex64,
    #[serde(with = "crate::cserde")]
    pub h31: Complex64,
    /// `H_3(1)` from the generic pivoted determinant.
    #[serde(with = "crate::cserde")]
    pub h31_generic: Complex64,
    #[serde(with = "crate::cserde")]
    pub h22_grunsky: Complex64,
    #[serde(with = "crate::cserde")]
    pub h31_grunsky: Complex64,
    #[serde(with = "crate::cserde")]
    pub h31_grunsky_corrected: Complex64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    /// `B_3` with `5 w13^2` in place of `5 w15^2`.
    pub b3_corrected: f64,
    /// `psi` maximum used for the `B_2` step.
    pub psi_max: f64,
    /// `bound - quantity` for every step that holds on the whole class.
    pub chain_residuals: BTreeMap<String, f64>,
    /// Steps resting on the claimed `max psi = 1` or on the quoted
    /// decomposition of `H_3(1)`; reported, never asserted.
    pub informational: BTreeMap<String, f64>,
}

impl AuditReport {
    /// Smallest chain residual and its name.
    pub fn weakest_step(&self) -> (&str, f64) {
        self.chain_residuals
            .iter()
            .map(|(k, &v)| (k.as_str(), v))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("chain is non-empty")
    }

    pub fn violations(&self, tol: f64) -> Vec<&str> {
        self.chain_residuals
            .iter()
            .filter(|(_, &v)| v < -tol)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

/// Order needed by [`audit_chain`]: the table up to index 5 reads `a_6`.
pub const AUDIT_MIN_ORDER: usize = 6;

/// Evaluates every step of the bound chain on `f`.
///
/// Non-certified input is audited too; `certified` is carried into the
/// report.
pub fn audit_chain(f: &SchlichtFunction) -> Result<AuditReport> {
    audit_chain_with(f, psi_maximum().value)
}

/// [`audit_chain`] with an explicit `psi` maximum.
pub fn audit_chain_with(f: &SchlichtFunction, psi_max: f64) -> Result<AuditReport> {
    let table = grunsky_table(f, 5)?;
    let g = table.low_order()?;
    let h22 = h22_direct(f)?;
    let h31 = h31_direct(f)?;
    let h31_generic = hankel_det(f, 3, 1)?.value;
    let h22_g = h22_grunsky(&table)?;
    let h31_g = h31_grunsky(&table)?;
    let h31_gc = h31_grunsky_corrected(&table)?;
    let BoundTerms { b1, b2, b3 } = bound_terms(&table)?;

    let (m11, m13, m33, m15) = (g.w11.norm(), g.w13.norm(), g.w33.norm(), g.w15.norm());
    let w31 = table.omega(3, 1)?.norm();
    let fekete_szego = (2.0 * g.w13 - g.w11 * g.w11).norm();
    let b2_root = (2.0 * g.w33 - (2.0 / 3.0) * g.w11.powu(3)).norm();
    let b3_first = (2.0 * g.w35 + 5.0 * g.w15 * g.w15).norm();
    let first_probe_room = 1.0 - m11 * m11 - 3.0 * m13 * m13;
    let b3_corrected = (2.0 * g.w35 + 5.0 * g.w13 * g.w13).norm() * fekete_szego;
    let (abs22, abs31) = (h22.norm(), h31.norm());

    let mut chain = BTreeMap::new();
    let mut put = |k: &str, v: f64| {
        chain.insert(k.to_string(), v);
    };
    put("h22_triangle", 4.0 * m11 * m33 + (4.0 / 3.0) * m11.powi(4) + fekete_szego.powi(2) - abs22);
    put("fekete_szego", 1.0 - fekete_szego);
    put("omega11_unit", 1.0 - m11);
    put("omega13_first_probe", (1.0 - m11 * m11) / 3.0 - m13 * m13);
    put("omega33_bound", 1.0 / 3.0 - m33);
    put("omega33_sharp", (1.0 - 3.0 * w31 * w31) / 9.0 - m33 * m33);
    put("h22_polynomial", (4.0 / 3.0) * m11 + (4.0 / 3.0) * m11.powi(4) + 1.0 - abs22);
    put("h22_headline", H22_BOUND - abs22);

    let b1_factored = 2.0 * m13 * (2.0 * g.w13 + g.w11 * g.w11).norm();
    let b1_split = 2.0 * m13 * (2.0 * m13 + m11 * m11);
    put("b1_fekete_szego", b1_factored - b1);
    put("b1_triangle", b1_split - b1_factored);
    put("b1_phi", (2.0 / 3.0) * phi_unchecked((m11 * m11).min(1.0)) - b1_split);
    put("b1_bound", B1_BOUND - b1);

    put("b2_triangle", 2.0 * m15 + 2.0 * m11 * m13 - b2_root);
    put("omega15_bound", first_probe_room.max(0.0).sqrt() / 5f64.sqrt() - m15);
    put("b2_psi", 2.0 / 5f64.sqrt() * psi_unchecked(m11, m13) - b2_root);
    put("b2_recomputed_max", 2.0 / 5f64.sqrt() * psi_max - b2_root);

    put("b3_grunsky_probe", 5.0 * m15 * m15 + 4.0 / 15.0 - b3_first * b3_first);
    put("b3_omega15_bound", first_probe_room - 5.0 * m15 * m15);
    put("b3_constant", B3_SQUARED_BOUND - (first_probe_room + 4.0 / 15.0));
    put("b3_bound", B3_SQUARED_BOUND.sqrt() - b3);

    put("h31_triangle", b1 + b2 + b3 - h31_g.norm());
    put("h31_headline", h31_bound() - abs31);

    let mut info = BTreeMap::new();
    info.insert("b2_claimed_max".to_string(), B2_CLAIMED_BOUND - b2);
    info.insert("h31_sum_claimed".to_string(), h31_bound() - (b1 + b2 + b3));
    info.insert(
        "h31_sum_recomputed".to_string(),
        B1_BOUND + B2_CLAIMED_BOUND * psi_max * psi_max + B3_SQUARED_BOUND.sqrt() - (b1 + b2 + b3),
    );
    info.insert("h31_triangle_direct".to_string(), b1 + b2 + b3 - abs31);
    info.insert("h31_triangle_corrected".to_string(), b1 + b2 + b3_corrected - abs31);
    info.insert("h31_quoted_decomposition_gap".to_string(), (h31_g - h31).norm());

    Ok(AuditReport {
        function_id: f.tag().clone(),
        certified: f.is_certified(),
        h22,
        h31,
        h31_generic,
        h22_grunsky: h22_g,
        h31_grunsky: h31_g,
        h31_grunsky_corrected: h31_gc,
        b1,
        b2,
        b3,
        b3_corrected,
        psi_max,
        chain_residuals: chain,
        informational: info,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{identity, kfold_koebe, koebe_rotation};

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.0).unwrap(), 2.0);
        assert_eq!(phi(1.0).unwrap(), 0.0);
        let expected = 0.5 + 3.0 * 3f64.sqrt() / 8.0;
        assert!((phi(0.75).unwrap() - expected).abs() < 1e-15);
        assert!(phi(-0.1).is_err());
        assert!(phi(1.5).is_err());
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(psi(1.0, 0.0).unwrap(), 0.0);
        let expected = 0.48f64.sqrt() + 5f64.sqrt() * 0.15;
        assert!((psi(0.5, 0.3).unwrap() - expected).abs() < 1e-15);
        assert!(psi(0.5, 0.6).is_err());
        assert!(psi(-0.1, 0.0).is_err());
        assert!(psi(0.2, -0.1).is_err());
        let t = 0.37;
        assert!(psi(t, psi_s_max(t)).is_ok());
    }

    #[test]
    fn phi_maximum_is_at_the_origin() {
        let r = maximize_phi();
        assert!((r.value - 2.0).abs() < 1e-9);
        assert!(r.arg[0].abs() < 1e-6);
        assert!(r.grid_max <= r.value + 1e-12);
        assert_eq!(r.monotone_decreasing, Some(true));
        assert!(r.max_forward_difference.unwrap() <= 0.0);
    }

    #[test]
    fn psi_maximum_dominates_grid_and_origin() {
        let r = psi_maximum();
        assert!(r.value >= 1.0 - 1e-12);
        assert!(r.value >= r.grid_max - 1e-12);
        assert_eq!(r.claimed, 1.0);
        assert!((r.discrepancy - (r.value - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn bound_terms_on_reference_tables() {
        let koebe = grunsky_table(&koebe_rotation(0.0, 12), 5).unwrap();
        let t = bound_terms(&koebe).unwrap();
        assert!(t.b1 < 1e-10 && t.b2 < 1e-10 && t.b3 < 1e-10, "{t:?}");
        assert_eq!(bound_terms(&GrunskyTable::zero(5)).unwrap(), BoundTerms { b1: 0.0, b2: 0.0, b3: 0.0 });
        let three = grunsky_table(&kfold_koebe(3, 12).unwrap(), 5).unwrap();
        assert!(bound_terms(&three).unwrap().sum() >= 4.0 / 9.0 - 1e-12);
        assert!(bound_terms(&GrunskyTable::zero(3)).is_err());
    }

    #[test]
    fn koebe_audit() {
        let r = audit_chain(&koebe_rotation(0.0, 12)).unwrap();
        assert!(r.chain_residuals["fekete_szego"].abs() < 1e-10);
        assert!((r.chain_residuals["h22_headline"] - 8.0 / 3.0).abs() < 1e-9);
        assert!(r.violations(1e-9).is_empty(), "{:?}", r.weakest_step());
    }

    #[test]
    fn identity_audit_residuals_are_the_constants() {
        let r = audit_chain(&identity(12)).unwrap();
        let c = &r.chain_residuals;
        assert_eq!((r.b1, r.b2, r.b3), (0.0, 0.0, 0.0));
        assert_eq!(c["fekete_szego"], 1.0);
        assert_eq!(c["omega13_first_probe"], 1.0 / 3.0);
        assert_eq!(c["omega33_bound"], 1.0 / 3.0);
        assert_eq!(c["omega33_sharp"], 1.0 / 9.0);
        assert_eq!(c["h22_headline"], 11.0 / 3.0);
        assert_eq!(c["b1_bound"], 4.0 / 3.0);
        assert_eq!(c["b3_bound"], (19.0f64 / 15.0).sqrt());
        assert_eq!(c["h31_headline"], h31_bound());
    }

    #[test]
    fn threefold_koebe_audit() {
        let r = audit_chain(&kfold_koebe(3, 12).unwrap()).unwrap();
        assert!((r.h31.norm() - 4.0 / 9.0).abs() < 1e-10);
        let expected = h31_bound() - 4.0 / 9.0;
        assert!((r.chain_residuals["h31_headline"] - expected).abs() < 1e-10);
        assert!(r.violations(1e-9).is_empty());
    }

    #[test]
    fn audit_needs_order_six() {
        assert!(matches!(
            audit_chain(&koebe_rotation(0.0, 5)),
            Err(Error::InsufficientOrder { .. })
        ));
    }

    #[test]
    fn headline_constant() {
        let sum = 4.0 / 3.0 + 4.0 / 5.0 + (19.0f64 / 15.0).sqrt();
        assert!((h31_bound() - sum).abs() < 1e-15);
        assert!((h31_bound() - 3.258796).abs() < 1e-6);
    }
}
