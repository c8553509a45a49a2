//! One function per subcommand, each returning a [`CliReport`].

use clap::ValueEnum;
use embtensor::action::{check_action, hemisemidirect, product_arity, theorem_crosscheck, ActionFamily};
use embtensor::homotopy::{check_lie_infinity, check_lie_morphism, check_loday_infinity, check_loday_morphism, lie_to_loday, HomotopyStructure};
use embtensor::random::{sweep, Sampler};
use embtensor::report::Report;
use embtensor::scalar::fmt_scalar;
use embtensor::tensor::{
    adjoint_strict_check, centroid_basis, centroid_check, check_descendent_morphism, check_embedding, check_embedding_explicit,
    descendent, DeformationComplex, EmbeddingTensor,
};
use embtensor::{AlgebraError, Family, Flavor, Q};
use thiserror::Error;

use crate::format::{serialize, structure_file, MorphismDecl, ParseError, Settings, StructureFile, TensorDecl};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    CheckLie,
    CheckLoday,
    CheckMorphism,
    CheckAction,
    CheckCoherence,
    BuildProduct,
    CheckTensor,
    Descend,
    CheckDescendentMorphism,
    AdjointStrict,
    Centroid,
    Deform,
    Cohomology,
}

impl Command {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Algebra(AlgebraError::Inconsistency(_)) => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Constructed,
    Fails,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Verified => "verified",
            Verdict::Constructed => "constructed",
            Verdict::Fails => "fails",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Fails => 1,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CliReport {
    pub command: String,
    pub digest: String,
    pub settings: Settings,
    pub verdict: Verdict,
    pub checks: Vec<Report<Q>>,
    pub notes: Vec<String>,
    /// Constructed structures, as structure-file text.
    pub output: Option<String>,
}

impl CliReport {
    fn new(command: Command, digest: &str, settings: &Settings) -> Self {
        CliReport {
            command: command.name(),
            digest: digest.to_string(),
            settings: settings.clone(),
            verdict: Verdict::Verified,
            checks: Vec::new(),
            notes: Vec::new(),
            output: None,
        }
    }

    fn push(&mut self, mut report: Report<Q>, label: &str) {
        report.check = format!("{} {label}", report.check);
        self.checks.push(report);
    }

    fn finish(mut self, constructed: bool) -> Self {
        self.verdict = if self.checks.iter().any(|r| !r.passed()) {
            Verdict::Fails
        } else if constructed {
            Verdict::Constructed
        } else {
            Verdict::Verified
        };
        self
    }
}

fn loday(s: &HomotopyStructure<Q>) -> CliResult<HomotopyStructure<Q>> {
    Ok(match s.flavor() {
        Flavor::Symmetric => lie_to_loday(s)?,
        Flavor::Plain => s.clone(),
    })
}

fn actions(file: &StructureFile) -> CliResult<&[crate::format::ActionDecl]> {
    if file.actions.is_empty() {
        return Err(CliError::Input("no [action] section".into()));
    }
    Ok(&file.actions)
}

/// Every tensor paired with the action on the same spaces.
fn tensors(file: &StructureFile) -> CliResult<Vec<(&TensorDecl, &ActionFamily<Q>)>> {
    if file.tensors.is_empty() {
        return Err(CliError::Input("no [tensor] section".into()));
    }
    file.tensors
        .iter()
        .map(|t| {
            file.actions
                .iter()
                .find(|a| a.e == t.e && a.v == t.v)
                .map(|a| (t, &a.action))
                .ok_or_else(|| CliError::Input(format!("tensor `{}` needs an [action {} {}] section", t.name, t.e, t.v)))
        })
        .collect()
}

fn label(t: &TensorDecl) -> String {
    format!("{}: {} -> {}", t.name, t.v, t.e)
}

/// Candidates `T'` for the deformation sweep: multiples of `T` and of one
/// seeded random tensor.
fn sweep_candidates(t: &EmbeddingTensor<Q>, phi: &ActionFamily<Q>, seed: u64) -> Vec<(String, EmbeddingTensor<Q>)> {
    let mut sampler = Sampler::new(seed);
    let random = sampler.tensor(phi, t.family().top_arity().max(1), 0.3);
    let mut out = Vec::new();
    for c in sweep::<Q>() {
        out.push((format!("{}*T", fmt_scalar(&c)), t.scale(&c)));
        out.push((format!("{}*R", fmt_scalar(&c)), random.scale(&c)));
    }
    out
}

pub fn run(command: Command, file: &StructureFile, settings: &Settings, digest: &str) -> CliResult<CliReport> {
    let n = settings.bound;
    let mut out = CliReport::new(command, digest, settings);
    let mut constructed = false;
    match command {
        Command::CheckLie => {
            let mut any = false;
            for space in &file.spaces {
                let s = file.structure(space.name()).expect("listed space");
                if s.flavor() == Flavor::Symmetric {
                    out.push(check_lie_infinity(&s, n)?, space.name());
                    any = true;
                }
            }
            if !any {
                return Err(CliError::Input("no symmetric structure to check".into()));
            }
        }
        Command::CheckLoday => {
            if file.spaces.is_empty() {
                return Err(CliError::Input("no [space] section".into()));
            }
            for space in &file.spaces {
                let s = file.structure(space.name()).expect("listed space");
                out.push(check_loday_infinity(&loday(&s)?, n)?, space.name());
            }
        }
        Command::CheckMorphism => {
            if file.morphisms.is_empty() {
                return Err(CliError::Input("no [morphism] section".into()));
            }
            for m in &file.morphisms {
                out.push(check_morphism(file, m, n)?, &m.name);
            }
        }
        Command::CheckAction => {
            for a in actions(file)? {
                out.push(check_action(&a.action, n)?, &format!("{} on {}", a.e, a.v));
            }
        }
        Command::CheckCoherence => {
            for a in actions(file)? {
                let label = format!("{} on {}", a.e, a.v);
                let action = check_action(&a.action, n)?;
                if !action.passed() {
                    out.notes.push(format!("{label}: not an action, coherence not checked"));
                    out.push(action, &label);
                    continue;
                }
                let c = theorem_crosscheck(&a.action, n)?;
                out.push(c.coherence, &label);
                out.push(c.loday, &format!("{label} hemisemidirect"));
            }
        }
        Command::BuildProduct => {
            let mut text = String::new();
            for a in actions(file)? {
                let product = hemisemidirect(&a.action, product_arity(&a.action, n))?;
                let verdict = check_loday_infinity(&product.structure, n)?.verdict();
                out.notes.push(format!("{} on {}: product Loday check {verdict}", a.e, a.v));
                text.push_str(&serialize(&structure_file(&product.structure, settings)));
            }
            out.output = Some(text);
            constructed = true;
        }
        Command::CheckTensor => {
            for (t, phi) in tensors(file)? {
                let (explicit, mc) = check_embedding(&t.tensor, phi, n)?;
                if explicit.support() == mc.support() {
                    out.notes.push(format!("{}: routes agree", label(t)));
                }
                out.push(explicit, &label(t));
                out.push(mc, &label(t));
            }
        }
        Command::Descend => {
            let mut text = String::new();
            for (t, phi) in tensors(file)? {
                out.push(check_embedding_explicit(&t.tensor, phi, n)?, &label(t));
                let d = descendent(&t.tensor, phi, n)?;
                out.push(check_loday_infinity(&d, n)?, &format!("descendent of {}", t.name));
                text.push_str(&serialize(&structure_file(&d, settings)));
            }
            out.output = Some(text);
            constructed = true;
        }
        Command::CheckDescendentMorphism => {
            for (t, phi) in tensors(file)? {
                out.push(check_descendent_morphism(&t.tensor, phi, n)?, &label(t));
            }
        }
        Command::AdjointStrict => {
            let strict: Vec<&TensorDecl> = file.tensors.iter().filter(|t| t.v == t.e).collect();
            if strict.is_empty() {
                return Err(CliError::Input("no [tensor NAME E E] section".into()));
            }
            for t in strict {
                if !t.tensor.is_strict() {
                    return Err(CliError::Input(format!("tensor `{}` has components of arity above 1", t.name)));
                }
                let e = file.structure(&t.e).expect("parsed space");
                out.push(adjoint_strict_check(&e, &t.tensor.unary())?, &label(t));
            }
        }
        Command::Centroid => {
            let mut found = StructureFile { settings: settings.clone(), ..StructureFile::default() };
            for b in file.brackets.iter().filter(|b| b.structure.flavor() == Flavor::Symmetric) {
                let basis = centroid_basis(&b.structure, n);
                out.notes.push(format!("centroid of {}: dimension {}", b.space, basis.len()));
                for (i, f) in basis.iter().enumerate() {
                    out.push(centroid_check(&b.structure, f, n)?, &format!("C{i} on {}", b.space));
                    let family = Family::from_maps(f.source().clone(), f.target().clone(), 0, Flavor::Plain, vec![f.clone()])?;
                    found.morphisms.push(MorphismDecl {
                        name: format!("C{i}_{}", b.space),
                        source: b.space.clone(),
                        target: b.space.clone(),
                        family,
                    });
                }
                found.spaces.push(b.structure.space().clone());
            }
            if found.spaces.is_empty() {
                return Err(CliError::Input("no symmetric [brackets] section".into()));
            }
            out.output = Some(serialize(&found));
            constructed = true;
        }
        Command::Deform => {
            for (t, phi) in tensors(file)? {
                let Some(dc) = deformation_complex(&mut out, t, phi, n)? else { continue };
                out.notes.push(format!("{}: truncated complex of dimension {}", label(t), dc.basis().len()));
                out.push(dc.square_check(), &label(t));
                for (name, cand) in sweep_candidates(&t.tensor, phi, settings.seed) {
                    let r = dc.mc_check(&cand)?;
                    out.notes.push(format!("{}: T' = {name}: MC {}, matches T+T'", label(t), r.verdict()));
                }
            }
        }
        Command::Cohomology => {
            for (t, phi) in tensors(file)? {
                let Some(dc) = deformation_complex(&mut out, t, phi, n)? else { continue };
                let square = dc.square_check();
                let ok = square.passed();
                out.push(square, &label(t));
                if !ok {
                    continue;
                }
                for r in dc.cohomology_table(n)? {
                    out.notes.push(format!(
                        "{}: degree {} weight {}: dim {} rank_in {} rank_out {} kernel {} cohomology {}",
                        label(t),
                        r.degree,
                        r.weight,
                        r.dim,
                        r.rank_in,
                        r.rank_out,
                        r.kernel,
                        r.cohomology
                    ));
                }
            }
            constructed = true;
        }
    }
    Ok(out.finish(constructed))
}

/// The complex of a verified tensor; otherwise the failing embedding check
/// goes into the report.
fn deformation_complex(
    out: &mut CliReport,
    t: &TensorDecl,
    phi: &ActionFamily<Q>,
    n: usize,
) -> CliResult<Option<DeformationComplex<Q>>> {
    let explicit = check_embedding_explicit(&t.tensor, phi, n)?;
    if !explicit.passed() {
        out.notes.push(format!("{}: not an embedding tensor, no deformation complex", label(t)));
        out.push(explicit, &label(t));
        return Ok(None);
    }
    Ok(Some(DeformationComplex::new(&t.tensor, phi, n)?))
}

fn check_morphism(file: &StructureFile, m: &MorphismDecl, n: usize) -> CliResult<Report<Q>> {
    let src = file.structure(&m.source).expect("parsed space");
    let tgt = file.structure(&m.target).expect("parsed space");
    Ok(match m.family.flavor() {
        Flavor::Symmetric => {
            if src.flavor() != Flavor::Symmetric || tgt.flavor() != Flavor::Symmetric {
                return Err(CliError::Input(format!("symmetric morphism `{}` needs symmetric brackets on both ends", m.name)));
            }
            check_lie_morphism(&m.family, &src, &tgt, n)?
        }
        Flavor::Plain => check_loday_morphism(&m.family, &loday(&src)?, &loday(&tgt)?, n)?,
    })
}
