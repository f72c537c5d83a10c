use hankel_core::families::{
    convex_from_starlike, identity, kfold_koebe, koebe_rotation, raw_real_coefficients,
    starlike_from_herglotz,
};
use hankel_core::{HerglotzAtoms, SchlichtFunction};

use crate::config::FunctionSpec;
use crate::exit::CliError;

pub const FAMILIES: &str = "identity, koebe [theta], kfold k, herglotz w1,theta1,..., raw a1,a2,..., \
convex-<identity|koebe|kfold|herglotz>";

fn no_params(name: &str, params: &[f64]) -> Result<(), CliError> {
    if params.is_empty() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} takes no parameters, got {}", params.len())))
    }
}

fn starlike(name: &str, params: &[f64], order: usize) -> Result<SchlichtFunction, CliError> {
    match name {
        "identity" => {
            no_params(name, params)?;
            Ok(identity(order))
        }
        "koebe" | "koebe_rotation" => match params {
            [] => Ok(koebe_rotation(0.0, order)),
            [theta] => Ok(koebe_rotation(*theta, order)),
            _ => Err(CliError::Config(format!("koebe takes one angle, got {} values", params.len()))),
        },
        "kfold" | "kfold_koebe" => match params {
            [k] if k.fract() == 0.0 && *k >= 1.0 && *k <= u32::MAX as f64 => {
                Ok(kfold_koebe(*k as u32, order)?)
            }
            _ => Err(CliError::Config(format!("kfold takes one positive integer k, got {params:?}"))),
        },
        "herglotz" => {
            if params.is_empty() || params.len() % 2 != 0 {
                return Err(CliError::Config(
                    "herglotz takes weight,angle pairs: w1,theta1,w2,theta2,...".into(),
                ));
            }
            let weights = params.iter().step_by(2).copied().collect();
            let angles: Vec<f64> = params.iter().skip(1).step_by(2).copied().collect();
            let atoms = HerglotzAtoms::from_angles(weights, &angles)?;
            Ok(starlike_from_herglotz(&atoms, order))
        }
        _ => Err(CliError::Config(format!("unknown family {name:?}; known: {FAMILIES}"))),
    }
}

pub fn build(spec: &FunctionSpec, order: usize) -> Result<SchlichtFunction, CliError> {
    let name = spec.family.as_str();
    if let Some(inner) = name.strip_prefix("convex-") {
        let g = starlike(inner, &spec.params, order)?;
        return Ok(convex_from_starlike(&g, order)?);
    }
    if name == "raw" {
        if spec.params.is_empty() {
            return Err(CliError::Config("raw takes coefficients a1,a2,... with a1 = 1".into()));
        }
        return Ok(raw_real_coefficients(&spec.params, order)?);
    }
    starlike(name, &spec.params, order)
}
