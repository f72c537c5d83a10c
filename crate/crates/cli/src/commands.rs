use std::time::Instant;

use hankel_core::audit::{maximize_phi, psi_maximum, AUDIT_MIN_ORDER};
use hankel_core::grunsky::{grunsky_residual, verify_coefficient_relations, CoefficientRelations};
use hankel_core::hankel::{h22_direct, h31_direct};
use hankel_core::search::{Objective, SearchFamily, MAX_ATOMS};
use hankel_core::{audit_chain, grunsky_table, multi_start_search, InequalityProbe, SearchSpec};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Settings, DEFAULT_MAX_INDEX, DEFAULT_RESTARTS, DEFAULT_SEED};
use crate::exit::CliError;
use crate::family;
use crate::report::{to_value, Report, Timings};

/// Residual tolerance for `verify`.
pub const VERIFY_TOL: f64 = 1e-9;
/// Chain residuals below `-AUDIT_TOL` count as violations.
pub const AUDIT_TOL: f64 = 1e-9;
/// The audit reads `w35`; below this order the tail is too short to trust.
pub const AUDIT_REFUSE_BELOW: usize = 10;

/// A finished run: the report, and whether it must exit with code 1.
pub struct Outcome {
    pub report: Report,
    pub failure: Option<String>,
}

#[derive(Serialize)]
struct ComplexPair {
    re: f64,
    im: f64,
}

impl From<hankel_core::Complex64> for ComplexPair {
    fn from(z: hankel_core::Complex64) -> Self {
        ComplexPair { re: z.re, im: z.im }
    }
}

fn log(settings: &Settings, msg: impl FnOnce() -> String) {
    if settings.verbose > 0 {
        eprintln!("{}", msg());
    }
}

fn function_inputs(settings: &Settings, extra: Value) -> Result<Value, CliError> {
    let mut inputs = json!({
        "functions": to_value(settings.function_specs()?),
        "order": settings.order(),
        "format": to_value(settings.format()),
    });
    if let (Value::Object(base), Value::Object(extra)) = (&mut inputs, extra) {
        base.extend(extra);
    }
    Ok(inputs)
}

fn finish(command: &'static str, inputs: Value, results: Value, start: Instant, failure: Option<String>) -> Outcome {
    Outcome {
        report: Report {
            schema_version: crate::report::SCHEMA_VERSION,
            command,
            inputs,
            results,
            timings: Timings { total_seconds: start.elapsed().as_secs_f64() },
        },
        failure,
    }
}

pub fn grunsky(settings: &Settings) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let max_index = settings.max_index.unwrap_or(DEFAULT_MAX_INDEX);
    let mut tables = Vec::new();
    for spec in settings.function_specs()? {
        let f = family::build(&spec, settings.order())?;
        log(settings, || format!("grunsky: {} (N = {})", f.tag().name(), f.order()));
        let table = grunsky_table(&f, max_index)?;
        let h22 = h22_direct(&f).ok().map(ComplexPair::from);
        let h31 = h31_direct(&f).ok().map(ComplexPair::from);
        tables.push(json!({
            "function": to_value(&f),
            "table": to_value(&table),
            "hankel": { "h22": to_value(h22), "h31": to_value(h31) },
        }));
    }
    let inputs = function_inputs(settings, json!({ "max_index": max_index }))?;
    Ok(finish("grunsky", inputs, json!({ "tables": tables }), start, None))
}

pub fn verify(settings: &Settings) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let max_index = settings.max_index.unwrap_or(DEFAULT_MAX_INDEX);
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for spec in settings.function_specs()? {
        let f = family::build(&spec, settings.order())?;
        log(settings, || format!("verify: {} (N = {})", f.tag().name(), f.order()));
        let table = grunsky_table(&f, max_index)?;
        let relations = verify_coefficient_relations(&f, &table)?;
        let moduli: serde_json::Map<String, Value> = CoefficientRelations::NAMES
            .iter()
            .zip(relations.residuals())
            .map(|(name, r)| (name.to_string(), json!(r.norm())))
            .collect();
        let mut probes = Vec::new();
        for probe in InequalityProbe::canonical(max_index) {
            let residual = grunsky_residual(&table, &probe)?;
            probes.push(json!({ "probe": to_value(&probe), "residual": residual }));
        }
        let relations_pass = relations.max_modulus() < VERIFY_TOL;
        let probes_pass = probes.iter().all(|p| p["residual"].as_f64().is_some_and(|r| r >= -VERIFY_TOL));
        let pass = relations_pass && probes_pass;
        if f.is_certified() && !pass {
            failed.push(f.tag().name());
        }
        rows.push(json!({
            "function": to_value(f.tag()),
            "certified": f.is_certified(),
            "informational_only": !f.is_certified(),
            "residuals": to_value(relations),
            "residual_moduli": moduli,
            "max_residual": relations.max_modulus(),
            "a5_omega13_residual": relations.a5_omega13.norm(),
            "probes": probes,
            "tolerance": VERIFY_TOL,
            "pass": pass,
        }));
    }
    let failure = (!failed.is_empty()).then(|| format!("residuals above {VERIFY_TOL:e} for {}", failed.join(", ")));
    let results = json!({ "all_pass": failure.is_none(), "functions": rows });
    let inputs = function_inputs(settings, json!({ "max_index": max_index }))?;
    Ok(finish("verify", inputs, results, start, failure))
}

pub fn audit(settings: &Settings) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let order = settings.order();
    if order < AUDIT_REFUSE_BELOW {
        return Err(CliError::Order(format!(
            "audit needs truncation order at least {AUDIT_REFUSE_BELOW}, got {order}"
        )));
    }
    debug_assert!(AUDIT_REFUSE_BELOW >= AUDIT_MIN_ORDER);
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for spec in settings.function_specs()? {
        let f = family::build(&spec, order)?;
        log(settings, || format!("audit: {} (N = {})", f.tag().name(), f.order()));
        let r = audit_chain(&f)?;
        let violations: Vec<String> = r.violations(AUDIT_TOL).into_iter().map(String::from).collect();
        if f.is_certified() && !violations.is_empty() {
            failed.push(format!("{} ({})", f.tag().name(), violations.join(", ")));
        }
        let (weakest, slack) = r.weakest_step();
        let mut entry = to_value(&r);
        if let Value::Object(map) = &mut entry {
            map.insert("weakest_step".into(), json!({ "name": weakest, "residual": slack }));
            map.insert("violations".into(), to_value(violations));
            map.insert("abs_h22".into(), json!(r.h22.norm()));
            map.insert("abs_h31".into(), json!(r.h31.norm()));
        }
        reports.push(entry);
    }
    log(settings, || "audit: global phi/psi extrema".into());
    let extrema = json!({ "phi": to_value(maximize_phi()), "psi": to_value(psi_maximum()) });
    let failure = (!failed.is_empty()).then(|| format!("bound chain violated for {}", failed.join("; ")));
    let results = json!({ "reports": reports, "extrema": extrema });
    let inputs = function_inputs(settings, json!({ "tolerance": AUDIT_TOL }))?;
    Ok(finish("audit", inputs, results, start, failure))
}

fn search_spec(settings: &Settings) -> Result<SearchSpec, CliError> {
    let atoms = settings.atoms.unwrap_or(hankel_core::search::DEFAULT_ATOMS);
    if !(1..=MAX_ATOMS).contains(&atoms) {
        return Err(CliError::Config(format!("--atoms must be in 1..={MAX_ATOMS}, got {atoms}")));
    }
    if settings.params.is_some() {
        return Err(CliError::Config("search takes no --params; parameters are searched".into()));
    }
    let family = match settings.family.as_deref().unwrap_or("herglotz") {
        "herglotz" => SearchFamily::Herglotz { atoms },
        "convex-herglotz" => SearchFamily::ConvexHerglotz { atoms },
        "koebe" | "koebe_rotation" => SearchFamily::KoebeRotation,
        other => {
            return Err(CliError::Config(format!(
                "search family must be herglotz, convex-herglotz or koebe, got {other:?}"
            )))
        }
    };
    let objective: Objective = settings
        .objective
        .as_deref()
        .unwrap_or("abs_h22")
        .parse()
        .map_err(|e: hankel_core::Error| CliError::Config(e.to_string()))?;
    let restarts = settings.restarts.unwrap_or(DEFAULT_RESTARTS);
    let mut spec = SearchSpec::new(family, objective, restarts, settings.seed.unwrap_or(DEFAULT_SEED));
    if let Some(n) = settings.max_evals {
        spec.max_evals = n;
    }
    spec.truncation = settings.order();
    match spec.validate() {
        Err(hankel_core::Error::InsufficientOrder { needed, available }) => {
            Err(CliError::Order(format!("search needs truncation order at least {needed}, got {available}")))
        }
        Err(e) => Err(CliError::Config(e.to_string())),
        Ok(()) => Ok(spec),
    }
}

pub fn search(settings: &Settings) -> Result<Outcome, CliError> {
    let start = Instant::now();
    if settings.functions.is_some() {
        return Err(CliError::Config("search does not take a `functions` list".into()));
    }
    let spec = search_spec(settings)?;
    log(settings, || {
        format!("search: {} restarts, {} evaluations, objective {}", spec.restarts, spec.max_evals, spec.objective)
    });
    let result = multi_start_search(&spec)?;
    let inputs = json!({ "spec": to_value(&spec), "format": to_value(settings.format()) });
    Ok(finish("search", inputs, to_value(&result), start, None))
}
