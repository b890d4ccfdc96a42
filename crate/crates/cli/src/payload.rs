//! Parsing of command-line state payloads.

use std::io::Read;

use locc_core::fourqubit::{FourQubitForm, SeedParams, C64};
use locc_core::polytope::HalfspaceSystem;
use serde::Deserialize;

use crate::Failure;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeed {
    a: f64,
    b: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawForm {
    seed: RawSeed,
    gammas: [[f64; 3]; 4],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHrep {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

/// Reads a payload given inline, as `@path`, or as `-` for standard input.
pub fn read_text(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("cannot read stdin: {e}")))?;
        Ok(s)
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(arg: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(&read_text(arg)?).map_err(|e| Failure::usage(format!("malformed {what} payload: {e}")))
}

/// A four-qubit state `{"seed": {...}, "gammas": [...]}`; shape errors are
/// usage errors, invariant violations are domain errors.
pub fn four_qubit(arg: &str) -> Result<FourQubitForm, Failure> {
    let raw: RawForm = parse_json(arg, "four-qubit state")?;
    let z = |x: [f64; 2]| C64::new(x[0], x[1]);
    let seed = SeedParams::new(raw.seed.a, z(raw.seed.b), z(raw.seed.c), z(raw.seed.d))?;
    Ok(FourQubitForm::new(seed, raw.gammas)?)
}

/// An H-representation `{"A": [[...]], "b": [...]}` of `A·x + b ≥ 0`.
pub fn hrep(arg: &str) -> Result<HalfspaceSystem, Failure> {
    let raw: RawHrep = parse_json(arg, "H-representation")?;
    Ok(HalfspaceSystem::new(raw.a, raw.b)?)
}
