//! Text literals for states.
//!
//! A ket literal is a sum of terms `coef |label>`, e.g.
//! `(1/sqrt(2)) |1,0> - (1/sqrt(2)) |0,1>` or `sqrt(3)|00> + |11>`.
//! Labels are comma separated occupation numbers, or a digit string with one
//! digit per site. Coefficients are expressions understood by [`crate::expr`];
//! a missing coefficient means 1.
//!
//! A mixture literal is `w1 : ket1 ; w2 : ket2 ; ...`.

use std::collections::HashMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{self, ExprError};
use crate::fock::{FockError, FockKet, TwoModeState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiteralError {
    #[error("no ket found in {0:?}")]
    NoKet(String),
    #[error("unterminated ket in {0:?}")]
    Unterminated(String),
    #[error("bad ket label {0:?}")]
    BadLabel(String),
    #[error("expected {expected} sites in label {label:?}")]
    SiteCount { label: String, expected: usize },
    #[error("trailing text {0:?} after last ket")]
    Trailing(String),
    #[error("mixture component {0:?} is not of the form `weight : ket`")]
    BadComponent(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

pub type KetTerms = Vec<(Complex64, Vec<usize>)>;

fn parse_label(label: &str) -> Result<Vec<usize>, LiteralError> {
    let trimmed = label.trim();
    let bad = || LiteralError::BadLabel(label.to_string());
    if trimmed.is_empty() {
        return Err(bad());
    }
    if trimmed.contains(',') {
        trimmed
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect()
    } else {
        trimmed
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
            .collect()
    }
}

fn parse_coefficient(text: &str, vars: &HashMap<String, f64>) -> Result<Complex64, LiteralError> {
    let mut t = text.trim();
    if let Some(stripped) = t.strip_suffix('*') {
        t = stripped.trim_end();
    }
    match t {
        "" | "+" => Ok(Complex64::new(1.0, 0.0)),
        "-" => Ok(Complex64::new(-1.0, 0.0)),
        _ => Ok(expr::eval_with(t, vars)?),
    }
}

/// Splits a ket literal into `(coefficient, label)` terms.
pub fn parse_ket_terms(src: &str, vars: &HashMap<String, f64>) -> Result<KetTerms, LiteralError> {
    let mut terms = Vec::new();
    let mut rest = src;
    while let Some(bar) = rest.find('|') {
        let close = rest[bar..]
            .find('>')
            .map(|i| i + bar)
            .ok_or_else(|| LiteralError::Unterminated(src.to_string()))?;
        let coef = parse_coefficient(&rest[..bar], vars)?;
        let label = parse_label(&rest[bar + 1..close])?;
        terms.push((coef, label));
        rest = &rest[close + 1..];
    }
    if !rest.trim().is_empty() {
        return Err(LiteralError::Trailing(rest.trim().to_string()));
    }
    if terms.is_empty() {
        return Err(LiteralError::NoKet(src.to_string()));
    }
    Ok(terms)
}

fn two_mode_ket(src: &str, cutoff: usize, vars: &HashMap<String, f64>) -> Result<FockKet, LiteralError> {
    let terms = parse_ket_terms(src, vars)?;
    let mut flat = Vec::with_capacity(terms.len());
    for (coef, label) in terms {
        if label.len() != 2 {
            return Err(LiteralError::SiteCount {
                label: format!("{label:?}"),
                expected: 2,
            });
        }
        flat.push((coef, label[0], label[1]));
    }
    Ok(FockKet::from_terms(cutoff, &flat)?)
}

/// Parses a two-mode ket or mixture literal. Kets are kept unnormalized so
/// integer amplitudes stay exact.
pub fn parse_two_mode_with(
    src: &str,
    cutoff: usize,
    vars: &HashMap<String, f64>,
) -> Result<TwoModeState, LiteralError> {
    if !src.contains(':') {
        return Ok(TwoModeState::pure(two_mode_ket(src, cutoff, vars)?));
    }
    let mut components = Vec::new();
    for part in src.split(';').filter(|p| !p.trim().is_empty()) {
        let (w, ket) = part
            .split_once(':')
            .ok_or_else(|| LiteralError::BadComponent(part.to_string()))?;
        let weight = expr::eval_real_with(w, vars)?;
        components.push((weight, two_mode_ket(ket, cutoff, vars)?));
    }
    Ok(TwoModeState::mixture(components)?)
}

pub fn parse_two_mode(src: &str, cutoff: usize) -> Result<TwoModeState, LiteralError> {
    parse_two_mode_with(src, cutoff, &HashMap::new())
}
