//! The five experiment runners behind the CLI subcommands.

pub mod cnot;
pub mod dfs;
pub mod fig2;
pub mod scaling;
pub mod vsystem;

use anyhow::{bail, Result};
use zeno_core::hilbert::{basis_label, BasisLabel, SpaceConfig, StateVector};
use zeno_core::model::trapped_state;
use zeno_core::C64;

/// Bound asserted on every deterministic observable when the experiment is
/// re-run with the photon truncation raised by one.
pub const DRIFT_BOUND: f64 = 1e-8;

/// Parse an initial-state name: a zero-photon basis label (`000`, `011`, …),
/// the trapped state (`a` or `0a`), or a two-term superposition such as
/// `010+011` (normalized, real coefficients).
pub fn parse_initial_state(name: &str, space: SpaceConfig) -> Result<StateVector> {
    let name = name.trim();
    for (sep, sign) in [('+', 1.0), ('-', -1.0)] {
        if let Some((left, right)) = name.split_once(sep) {
            let a = parse_basis_term(left, space)?;
            let b = parse_basis_term(right, space)?;
            let sum = a.add(&b.scaled(C64::new(sign, 0.0)));
            return sum
                .normalized()
                .map_err(|_| anyhow::anyhow!("terms of `{name}` cancel"));
        }
    }
    parse_basis_term(name, space)
}

fn parse_basis_term(token: &str, space: SpaceConfig) -> Result<StateVector> {
    let token = token.trim();
    if token == "a" || token == "0a" {
        return Ok(trapped_state(space));
    }
    let digits: Vec<char> = token.chars().collect();
    if digits.len() != 3 || digits[0] != '0' {
        bail!(
            "unknown initial state `{token}`: expected 000/001/010/011, `0a`, or a \
             two-term superposition like 010+011"
        );
    }
    let parse_level = |c: char| -> Result<u8> {
        c.to_digit(10)
            .filter(|&d| d < 3)
            .map(|d| d as u8)
            .ok_or_else(|| anyhow::anyhow!("invalid atomic level `{c}` in `{token}`"))
    };
    let label = BasisLabel::new(0, parse_level(digits[1])?, parse_level(digits[2])?);
    Ok(StateVector::basis_state(space, label)?)
}

/// Nonzero components of a state as `|n j1 j2> amp` lines.
pub fn format_state(state: &StateVector, space: SpaceConfig) -> String {
    let mut out = String::new();
    for idx in 0..state.dim() {
        let amp = state.amp(idx);
        if amp.norm() < 1e-9 {
            continue;
        }
        let label = basis_label(idx, space).expect("index in range");
        out.push_str(&format!(
            "    |{} {} {}>  {:+.10}{:+.10}i\n",
            label.n, label.j1, label.j2, amp.re, amp.im
        ));
    }
    out
}
