//! Reading states, observables and Hamiltonians from flags.
//!
//! Each flag takes either inline JSON or a path to a JSON file. A value whose
//! first non-blank character is `{` or `[` is parsed as JSON; anything else is
//! a path. A few names are built in.

use std::fs;

use serde::de::DeserializeOwned;

use crate::dynamics::Hamiltonian;
use crate::error::{Error, Result};
use crate::linalg::UnitVec3;
use crate::states::{singlet, LocalObservable, TwoQubitState};

fn looks_inline(s: &str) -> bool {
    matches!(s.trim_start().chars().next(), Some('{' | '['))
}

fn parse_json<T: DeserializeOwned>(what: &str, arg: &str) -> Result<T> {
    let (text, origin) = if looks_inline(arg) {
        (arg.to_string(), "inline JSON".to_string())
    } else {
        let text = fs::read_to_string(arg)
            .map_err(|e| Error::InvalidInput(format!("cannot read {what} file '{arg}': {e}")))?;
        (text, format!("'{arg}'"))
    };
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("malformed {what} in {origin}: {e}")))
}

/// `singlet`, inline `{"amplitudes": ...}` or a file holding it.
pub fn parse_state(arg: &str) -> Result<TwoQubitState> {
    if arg.trim() == "singlet" {
        return Ok(singlet());
    }
    parse_json("state", arg)
}

/// `sx`, `sy`, `sz`, `id`, inline `{"alpha1", "alpha2", "axis"}` or a file holding it.
pub fn parse_observable(arg: &str) -> Result<LocalObservable> {
    match arg.trim() {
        "sx" => Ok(LocalObservable::spin(UnitVec3::X)),
        "sy" => Ok(LocalObservable::spin(UnitVec3::Y)),
        "sz" => Ok(LocalObservable::spin(UnitVec3::Z)),
        "id" => Ok(LocalObservable::identity()),
        _ => parse_json("observable", arg),
    }
}

/// `zero` or a 4×4 Hermitian as JSON.
pub fn parse_hamiltonian(arg: &str) -> Result<Hamiltonian> {
    if arg.trim() == "zero" {
        return Ok(Hamiltonian::zero());
    }
    parse_json("hamiltonian", arg)
}
