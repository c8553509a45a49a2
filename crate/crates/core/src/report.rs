//! Residual reports returned by every checker.

use std::collections::BTreeSet;
use std::fmt;

use crate::graded::GradedSpace;
use crate::multimap::Vector;
use crate::scalar::{fmt_scalar, Scalar};

/// One failing instance of an identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Residual<S: Scalar> {
    /// Short name of the identity.
    pub condition: String,
    /// Total input length.
    pub weight: usize,
    /// Rendered input, symbols separated by spaces.
    pub input: String,
    /// Nonzero output, as (symbol or rendered word, coefficient).
    pub output: Vec<(String, S)>,
}

impl<S: Scalar> Residual<S> {
    pub fn new(condition: impl Into<String>, weight: usize, input: impl Into<String>, output: Vec<(String, S)>) -> Self {
        Residual { condition: condition.into(), weight, input: input.into(), output }
    }

    pub fn from_vector(condition: &str, space_in: &GradedSpace, w: &[usize], space_out: &GradedSpace, v: &Vector<S>) -> Self {
        Residual::new(condition, w.len(), space_in.render(w), render_vector(space_out, v))
    }

    pub fn with_weight(mut self, weight: usize) -> Self {
        self.weight = weight;
        self
    }

    /// `(condition, weight, input)`
    pub fn key(&self) -> (String, usize, String) {
        (self.condition.clone(), self.weight, self.input.clone())
    }
}

impl<S: Scalar> fmt::Display for Residual<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={} [{}] ->", self.condition, self.weight, self.input)?;
        for (sym, c) in &self.output {
            write!(f, " {} {}", fmt_scalar(c), sym)?;
        }
        Ok(())
    }
}

pub fn render_vector<S: Scalar>(space: &GradedSpace, v: &Vector<S>) -> Vec<(String, S)> {
    v.iter().map(|(i, c)| (space.symbol(*i).to_string(), c.clone())).collect()
}

/// Outcome of a check up to a weight bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report<S: Scalar> {
    pub check: String,
    pub bound: usize,
    pub residuals: Vec<Residual<S>>,
    /// Extra lines (constructed brackets, ranks, sub-verdicts).
    pub notes: Vec<String>,
}

impl<S: Scalar> Report<S> {
    pub fn new(check: impl Into<String>, bound: usize) -> Self {
        Report { check: check.into(), bound, residuals: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.residuals.is_empty()
    }

    pub fn push(&mut self, r: Residual<S>) {
        self.residuals.push(r);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Set of `(weight, input)` pairs that fail.
    pub fn support(&self) -> BTreeSet<(usize, String)> {
        self.residuals.iter().map(|r| (r.weight, r.input.clone())).collect()
    }

    pub fn merge(&mut self, other: Report<S>) {
        self.residuals.extend(other.residuals);
        self.notes.extend(other.notes);
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed() {
            "verified"
        } else {
            "fails"
        }
    }
}

impl<S: Scalar> fmt::Display for Report<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "check: {}", self.check)?;
        writeln!(f, "bound: {}", self.bound)?;
        writeln!(f, "verdict: {}", self.verdict())?;
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        for r in &self.residuals {
            writeln!(f, "residual: {r}")?;
        }
        Ok(())
    }
}
