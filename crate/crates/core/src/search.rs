//! Seeded multi-start Nelder–Mead over certified family parameters.
//!
//! Herglotz weights are decoded from unconstrained reals by a softmax and
//! atom positions from angles, so every parameter vector is feasible.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{
    convex_from_starlike, koebe_rotation, starlike_from_herglotz, HerglotzAtoms, SchlichtFunction,
};
use crate::hankel::{h22_direct, h31_direct};
use crate::optim::NelderMead;
use crate::series::DEFAULT_ORDER;

pub const MAX_ATOMS: usize = 16;
pub const DEFAULT_ATOMS: usize = 4;
/// Tolerance on the objective spread at which a restart stops.
pub const SEARCH_FTOL: f64 = 1e-9;
/// Later restarts must beat the incumbent by more than this.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchFamily {
    Herglotz { atoms: usize },
    ConvexHerglotz { atoms: usize },
    KoebeRotation,
}

impl SearchFamily {
    pub fn dimension(&self) -> usize {
        match self {
            SearchFamily::Herglotz { atoms } | SearchFamily::ConvexHerglotz { atoms } => 2 * atoms,
            SearchFamily::KoebeRotation => 1,
        }
    }
}

/// Functional to maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Objective {
    AbsH22,
    AbsH31,
    /// `|a_n|`
    AbsCoefficient(usize),
    /// `|a_3 - a_2^2|`
    AbsFeketeSzego,
}

impl Objective {
    pub fn evaluate(&self, f: &SchlichtFunction) -> Result<f64> {
        Ok(match self {
            Objective::AbsH22 => h22_direct(f)?.norm(),
            Objective::AbsH31 => h31_direct(f)?.norm(),
            Objective::AbsCoefficient(n) => f.a(*n)?.norm(),
            Objective::AbsFeketeSzego => (f.a(3)? - f.a(2)?.powu(2)).norm(),
        })
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::AbsH22 => write!(f, "abs_h22"),
            Objective::AbsH31 => write!(f, "abs_h31"),
            Objective::AbsCoefficient(n) => write!(f, "abs_a{n}"),
            Objective::AbsFeketeSzego => write!(f, "abs_fekete_szego"),
        }
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abs_h22" => Ok(Objective::AbsH22),
            "abs_h31" => Ok(Objective::AbsH31),
            "abs_fekete_szego" => Ok(Objective::AbsFeketeSzego),
            _ => s
                .strip_prefix("abs_a")
                .and_then(|n| n.parse().ok())
                .filter(|&n: &usize| n >= 1)
                .map(Objective::AbsCoefficient)
                .ok_or_else(|| Error::BadParametrization(format!("unknown objective {s:?}"))),
        }
    }
}

impl TryFrom<String> for Objective {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Objective> for String {
    fn from(o: Objective) -> String {
        o.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub family: SearchFamily,
    pub objective: Objective,
    pub restarts: usize,
    pub seed: u64,
    /// Total evaluation budget shared by all restarts.
    pub max_evals: usize,
    pub truncation: usize,
}

impl SearchSpec {
    pub fn new(family: SearchFamily, objective: Objective, restarts: usize, seed: u64) -> Self {
        Self { family, objective, restarts, seed, max_evals: restarts * 5_000, truncation: DEFAULT_ORDER }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::BadParametrization("restarts must be at least 1".into()));
        }
        if self.max_evals < self.restarts {
            return Err(Error::BadParametrization(format!(
                "max_evals ({}) is smaller than restarts ({})",
                self.max_evals, self.restarts
            )));
        }
        if let SearchFamily::Herglotz { atoms } | SearchFamily::ConvexHerglotz { atoms } = self.family {
            if !(1..=MAX_ATOMS).contains(&atoms) {
                return Err(Error::BadParametrization(format!("atom count {atoms} outside 1..={MAX_ATOMS}")));
            }
        }
        if self.truncation < 5 {
            return Err(Error::InsufficientOrder { needed: 5, available: self.truncation });
        }
        Ok(())
    }

    /// Evaluation budget of restart `r`; the remainder goes to early restarts.
    pub fn restart_budget(&self, r: usize) -> usize {
        self.max_evals / self.restarts + usize::from(r < self.max_evals % self.restarts)
    }
}

/// Softmax onto the probability simplex.
pub fn simplex_weights(raw: &[f64]) -> Vec<f64> {
    let top = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = raw.iter().map(|&r| (r - top).exp()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}

/// Builds the family member for a raw parameter vector: for Herglotz
/// families the first half are softmax logits, the second half angles.
pub fn decode(spec: &SearchSpec, params: &[f64]) -> Result<SchlichtFunction> {
    let dim = spec.family.dimension();
    if params.len() != dim {
        return Err(Error::BadParametrization(format!("expected {dim} parameters, got {}", params.len())));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::BadParametrization("non-finite parameter".into()));
    }
    match spec.family {
        SearchFamily::KoebeRotation => Ok(koebe_rotation(params[0], spec.truncation)),
        SearchFamily::Herglotz { atoms } | SearchFamily::ConvexHerglotz { atoms } => {
            let weights = simplex_weights(&params[..atoms]);
            let points = params[atoms..].iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
            let atoms = HerglotzAtoms::new(weights, points)?;
            let g = starlike_from_herglotz(&atoms, spec.truncation);
            match spec.family {
                SearchFamily::ConvexHerglotz { .. } => convex_from_starlike(&g, spec.truncation),
                _ => Ok(g),
            }
        }
    }
}

/// Objective value at `params`; a non-finite value maps to `-inf`.
pub fn evaluate_objective(spec: &SearchSpec, params: &[f64]) -> Result<f64> {
    let f = decode(spec, params)?;
    let v = spec.objective.evaluate(&f)?;
    Ok(if v.is_finite() { v } else { f64::NEG_INFINITY })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartOutcome {
    pub restart: usize,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub best_value: f64,
    pub best_params: Vec<f64>,
    pub best_function: SchlichtFunction,
    pub evals_used: usize,
    /// Some restart stopped on its budget rather than on tolerance.
    pub budget_exhausted: bool,
    pub history: Vec<RestartOutcome>,
    /// `|H_2(2)|` and `|H_3(1)|` of the best function.
    pub best_abs_h22: f64,
    pub best_abs_h31: f64,
}

fn initial_point(spec: &SearchSpec, restart: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(restart as u64);
    match spec.family {
        SearchFamily::KoebeRotation => vec![rng.gen_range(0.0..TAU)],
        SearchFamily::Herglotz { atoms } | SearchFamily::ConvexHerglotz { atoms } => {
            let mut x: Vec<f64> = (0..atoms).map(|_| rng.gen_range(-1.0..1.0)).collect();
            x.extend((0..atoms).map(|_| rng.gen_range(0.0..TAU)));
            x
        }
    }
}

fn run_restart(spec: &SearchSpec, restart: usize) -> (RestartOutcome, Vec<f64>) {
    let x0 = initial_point(spec, restart);
    let nm = NelderMead { max_evals: spec.restart_budget(restart), ftol: SEARCH_FTOL, ..Default::default() };
    let opt = nm.maximize(|x| evaluate_objective(spec, x).unwrap_or(f64::NEG_INFINITY), &x0);
    (
        RestartOutcome { restart, value: opt.value, evals: opt.evals, converged: opt.converged },
        opt.x,
    )
}

/// Runs every restart (in parallel) and keeps the best; on ties within
/// `1e-12` the earlier restart wins, so the result depends only on `spec`.
pub fn multi_start_search(spec: &SearchSpec) -> Result<SearchResult> {
    spec.validate()?;
    let runs: Vec<(RestartOutcome, Vec<f64>)> =
        (0..spec.restarts).into_par_iter().map(|r| run_restart(spec, r)).collect();

    let mut best = 0;
    for (i, (outcome, _)) in runs.iter().enumerate().skip(1) {
        if outcome.value > runs[best].0.value + TIE_TOL {
            best = i;
        }
    }
    let best_params = runs[best].1.clone();
    let best_function = decode(spec, &best_params)?;
    let best_value = spec.objective.evaluate(&best_function)?;
    Ok(SearchResult {
        best_value,
        best_params,
        best_abs_h22: h22_direct(&best_function)?.norm(),
        best_abs_h31: h31_direct(&best_function)?.norm(),
        best_function,
        evals_used: runs.iter().map(|(o, _)| o.evals).sum(),
        budget_exhausted: runs.iter().any(|(o, _)| !o.converged),
        history: runs.into_iter().map(|(o, _)| o).collect(),
    })
}
