//! Text and machine renderings of a [`CliReport`]. Neither includes timing,
//! so equal inputs give equal bytes.

use std::fmt::Write as _;

use clap::ValueEnum;
use embtensor::scalar::fmt_scalar;
use sha2::{Digest, Sha256};

use crate::commands::CliReport;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

pub fn digest(bytes: &[u8]) -> String {
    let mut out = String::from("sha256:");
    for b in Sha256::digest(bytes).iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

pub fn render(report: &CliReport, format: Format) -> String {
    match format {
        Format::Text => text(report),
        Format::Machine => machine(report),
    }
}

fn text(r: &CliReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "command: {}", r.command);
    let _ = writeln!(out, "digest: {}", r.digest);
    let _ = writeln!(out, "bound: {}", r.settings.bound);
    let _ = writeln!(out, "seed: {}", r.settings.seed);
    let _ = writeln!(out, "verdict: {}", r.verdict.as_str());
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    for c in &r.checks {
        let _ = write!(out, "\n{c}");
    }
    if let Some(o) = &r.output {
        let _ = write!(out, "\n# constructed\n{o}");
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// The report in the section format of structure files.
fn machine(r: &CliReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[report]");
    let _ = writeln!(out, "command = {}", r.command);
    let _ = writeln!(out, "digest = {}", quote(&r.digest));
    let _ = writeln!(out, "bound = {}", r.settings.bound);
    let _ = writeln!(out, "seed = {}", r.settings.seed);
    let _ = writeln!(out, "verdict = {}", r.verdict.as_str());
    for n in &r.notes {
        let _ = writeln!(out, "note = {}", quote(n));
    }
    for c in &r.checks {
        let _ = writeln!(out, "\n[check {}]", quote(&c.check));
        let _ = writeln!(out, "bound = {}", c.bound);
        let _ = writeln!(out, "verdict = {}", c.verdict());
        for n in &c.notes {
            let _ = writeln!(out, "note = {}", quote(n));
        }
        for res in &c.residuals {
            let _ = write!(out, "residual = {} {} {} ->", res.condition, res.weight, quote(&res.input));
            for (sym, coef) in &res.output {
                let _ = write!(out, " {} {}", quote(sym), quote(&fmt_scalar(coef)));
            }
            out.push('\n');
        }
    }
    if let Some(o) = &r.output {
        let _ = writeln!(out, "\n[output]");
        for line in o.lines().filter(|l| !l.is_empty()) {
            let _ = writeln!(out, "line = {}", quote(line));
        }
    }
    out
}
