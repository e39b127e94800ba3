//! JSON construction recipes: nested objects describing how to build a
//! handle, e.g. {"op":"tensor","args":[{"op":"cayley","n":3},{"op":"cayley","n":3}]}.

use super::ConstructError;
use crate::herm3;
use crate::lattice::{Degree, Subgroup};
use crate::scalar::Scalar;
use crate::torus::TorusHandle;
use serde_json::Value;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecipeError {
    #[error("recipe schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Build(#[from] ConstructError),
}

fn schema(msg: impl Into<String>) -> RecipeError {
    RecipeError::Schema(msg.into())
}

fn get<'v>(v: &'v Value, key: &str) -> Result<&'v Value, RecipeError> {
    v.get(key)
        .ok_or_else(|| schema(format!("missing field {key:?}")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize, RecipeError> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| schema(format!("{what} must be a non-negative integer")))
}

fn as_degree(v: &Value, what: &str) -> Result<Degree, RecipeError> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema(format!("{what} must be an array of integers")))?;
    let coords = arr
        .iter()
        .map(|x| {
            x.as_i64()
                .ok_or_else(|| schema(format!("{what} entries must be integers")))
        })
        .collect::<Result<Vec<i64>, _>>()?;
    Ok(Degree(coords))
}

fn as_degree_list(v: &Value, what: &str) -> Result<Vec<Degree>, RecipeError> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema(format!("{what} must be an array of degree arrays")))?;
    arr.iter().map(|x| as_degree(x, what)).collect()
}

fn as_scalar(v: &Value, what: &str) -> Result<Scalar, RecipeError> {
    match v {
        Value::String(s) => {
            Scalar::parse(s).map_err(|e| schema(format!("{what}: {e}")))
        }
        Value::Number(n) => n
            .as_i64()
            .map(Scalar::from_int)
            .ok_or_else(|| schema(format!("{what} must be an integer or 'p/q' string"))),
        _ => Err(schema(format!("{what} must be an integer or 'p/q' string"))),
    }
}

/// Build a handle from a recipe value.
pub fn build_recipe(v: &Value) -> Result<Arc<TorusHandle>, RecipeError> {
    let op = get(v, "op")?
        .as_str()
        .ok_or_else(|| schema("op must be a string"))?;
    match op {
        "laurent" => {
            let r = as_usize(get(v, "r")?, "r")?;
            Ok(super::laurent(r))
        }
        "laurent_signed" => {
            let skew = get(v, "skew")?
                .as_array()
                .ok_or_else(|| schema("skew must be an array of booleans"))?
                .iter()
                .map(|x| x.as_bool().ok_or_else(|| schema("skew entries must be booleans")))
                .collect::<Result<Vec<bool>, _>>()?;
            Ok(super::laurent_with_signs(skew))
        }
        "cayley" => {
            let n = as_usize(get(v, "n")?, "n")?;
            Ok(super::cayley(n)?)
        }
        "cayley_star2" => Ok(super::cayley_star2()?),
        "tensor" => {
            let args = get(v, "args")?
                .as_array()
                .ok_or_else(|| schema("args must be an array of recipes"))?;
            let handles = args
                .iter()
                .map(build_recipe)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(super::tensor_all(&handles)?)
        }
        "regrade" => {
            let inner = build_recipe(get(v, "arg")?)?;
            let rows = as_degree_list(get(v, "matrix")?, "matrix")?;
            Ok(super::regrade(&inner, rows)?)
        }
        "cd_double" => {
            let inner = build_recipe(get(v, "arg")?)?;
            let mu_deg = as_degree(get(v, "mu_degree")?, "mu_degree")?;
            let gen_deg = as_degree(get(v, "gen_degree")?, "gen_degree")?;
            let mu_coeff = match v.get("mu_coeff") {
                Some(c) => as_scalar(c, "mu_coeff")?,
                None => Scalar::one(),
            };
            Ok(super::cd_double(&inner, mu_deg, mu_coeff, gen_deg)?)
        }
        "plus" => {
            let inner = build_recipe(get(v, "arg")?)?;
            Ok(super::plus_algebra(&inner)?)
        }
        "hermitian_part" => {
            let inner = build_recipe(get(v, "arg")?)?;
            Ok(super::hermitian_part(&inner)?)
        }
        "hermitian_form_torus" => {
            let base = build_recipe(get(v, "B")?)?;
            let rho = as_degree_list(get(v, "rho")?, "rho")?;
            let b_degs = as_degree_list(get(v, "b")?, "b")?;
            Ok(super::hermitian_form_torus(&base, rho, b_degs)?)
        }
        "jordan_cd" => {
            let j = build_recipe(get(v, "J")?)?;
            let sigma0 = as_degree(get(v, "sigma0")?, "sigma0")?;
            let mu = get(v, "mu")?;
            let mu_deg = as_degree(get(mu, "degree")?, "mu.degree")?;
            let mu_coeff = match mu.get("coeff") {
                Some(c) => as_scalar(c, "mu.coeff")?,
                None => Scalar::one(),
            };
            let m = match v.get("m_basis") {
                Some(rows) => {
                    Subgroup::hnf(j.rank(), &as_degree_list(rows, "m_basis")?)
                }
                None => j.meta().span.clone(),
            };
            Ok(super::jordan_cd(&j, &m, sigma0, mu_deg, mu_coeff)?)
        }
        "a_herm" => {
            let variant = get(v, "variant")?
                .as_str()
                .ok_or_else(|| schema("variant must be a string"))?;
            let variant = match variant {
                "quaternion" => herm3::HermVariant::Quaternion,
                "octonion" => herm3::HermVariant::Octonion,
                "octonion_prime" => herm3::HermVariant::OctonionPrime,
                other => {
                    return Err(schema(format!(
                        "unknown variant {other:?}; expected quaternion or octonion"
                    )))
                }
            };
            Ok(herm3::build_a_herm(variant)?)
        }
        "mutate" => {
            let inner = build_recipe(get(v, "arg")?)?;
            let pair = get(v, "pair")?
                .as_array()
                .ok_or_else(|| schema("pair must be an array of two degree arrays"))?;
            if pair.len() != 2 {
                return Err(schema("pair must contain exactly two degrees"));
            }
            let l = as_degree(&pair[0], "pair[0]")?;
            let r = as_degree(&pair[1], "pair[1]")?;
            Ok(super::mutate_sign(&inner, &l, &r))
        }
        other => Err(schema(format!("unknown op {other:?}"))),
    }
}

/// Parse a recipe from JSON text.
pub fn parse_recipe(text: &str) -> Result<Arc<TorusHandle>, RecipeError> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| schema(format!("invalid JSON: {e}")))?;
    build_recipe(&v)
}
