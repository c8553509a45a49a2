//! The structure file: a line-oriented text format with section headers.
//!
//! ```text
//! [settings]
//! bound = 4
//!
//! [space V]
//! p -1
//! q -1
//! z -1
//!
//! [brackets V symmetric]
//! p q -> z "1/1"
//!
//! [action E V]
//! x ; p -> z "1/1"
//!
//! [tensor T V E]
//! p -> x "1/1"
//! ```
//!
//! `#` starts a comment. Scalars are quoted reduced fractions. Keys of
//! symmetric maps (brackets, both halves of an action entry) must already be
//! in canonical order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use embtensor::action::ActionFamily;
use embtensor::homotopy::HomotopyStructure;
use embtensor::scalar::fmt_scalar;
use embtensor::tensor::EmbeddingTensor;
use embtensor::{AlgebraError, Family, Flavor, GradedSpace, Scalar, Space, Q};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown section `{0}`")]
    UnknownSection(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("duplicate {0}")]
    Duplicate(String),
    #[error("unknown space `{0}`")]
    UnknownSpace(String),
    #[error("unknown symbol `{symbol}` in space `{space}`")]
    UnknownSymbol { space: String, symbol: String },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("scalar `{0}` is not a reduced fraction p/q")]
    NonReducedScalar(String),
    #[error("{0}")]
    Algebra(AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

type Parsed<T> = std::result::Result<T, ParseError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub bound: usize,
    pub max_arity: usize,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { bound: 4, max_arity: 3, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Brackets {
    pub space: String,
    pub structure: HomotopyStructure<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionDecl {
    pub e: String,
    pub v: String,
    pub action: ActionFamily<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorDecl {
    pub name: String,
    pub v: String,
    pub e: String,
    pub tensor: EmbeddingTensor<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub family: Family<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StructureFile {
    pub settings: Settings,
    pub spaces: Vec<Space>,
    /// Declared bracket sections, in space order.
    pub brackets: Vec<Brackets>,
    pub actions: Vec<ActionDecl>,
    pub tensors: Vec<TensorDecl>,
    pub morphisms: Vec<MorphismDecl>,
}

impl StructureFile {
    pub fn space(&self, name: &str) -> Option<&Space> {
        self.spaces.iter().find(|s| s.name() == name)
    }

    /// The declared brackets on `name`, or the abelian structure.
    pub fn structure(&self, name: &str) -> Option<HomotopyStructure<Q>> {
        let space = self.space(name)?;
        Some(match self.brackets.iter().find(|b| b.space == name) {
            Some(b) => b.structure.clone(),
            None => HomotopyStructure::abelian(space.clone(), Flavor::Symmetric, self.settings.max_arity),
        })
    }
}

#[derive(Clone, Debug)]
struct Token {
    text: String,
    col: usize,
}

#[derive(Clone, Debug)]
struct Line {
    number: usize,
    tokens: Vec<Token>,
}

impl Line {
    fn err(&self, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.number, col, kind }
    }
}

fn tokenize(number: usize, raw: &str) -> Parsed<Line> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = raw.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                i += 1;
            }
            if i == chars.len() {
                return Err(ParseError { line: number, col: start + 1, kind: ParseErrorKind::Syntax("unterminated scalar".into()) });
            }
            i += 1;
        } else if c == ';' || c == '=' || c == '[' || c == ']' {
            i += 1;
        } else {
            while i < chars.len() && !chars[i].is_whitespace() && !matches!(chars[i], '#' | '"' | ';' | '=' | '[' | ']') {
                i += 1;
            }
        }
        tokens.push(Token { text: chars[start..i].iter().collect(), col: start + 1 });
    }
    Ok(Line { number, tokens })
}

#[derive(Clone, Debug)]
struct Section {
    header: Line,
    kind: String,
    args: Vec<Token>,
    body: Vec<Line>,
}

fn split_sections(text: &str) -> Parsed<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = tokenize(i + 1, raw)?;
        if line.tokens.is_empty() {
            continue;
        }
        if line.tokens[0].text == "[" {
            let close = line.tokens.iter().position(|t| t.text == "]");
            let Some(close) = close.filter(|&c| c + 1 == line.tokens.len() && c >= 2) else {
                return Err(line.err(1, ParseErrorKind::Syntax("section header must look like `[kind args…]`".into())));
            };
            let kind = line.tokens[1].text.clone();
            let args = line.tokens[2..close].to_vec();
            sections.push(Section { header: line, kind, args, body: Vec::new() });
        } else {
            match sections.last_mut() {
                Some(s) => s.body.push(line),
                None => return Err(line.err(1, ParseErrorKind::Syntax("entry before any section header".into()))),
            }
        }
    }
    Ok(sections)
}

fn expect_args<'a>(s: &'a Section, names: &[&str]) -> Parsed<&'a [Token]> {
    if s.args.len() != names.len() {
        return Err(s.header.err(
            1,
            ParseErrorKind::Syntax(format!("`[{}]` takes {}", s.kind, if names.is_empty() { "no arguments".into() } else { names.join(" ") })),
        ));
    }
    Ok(&s.args)
}

/// A quoted, reduced fraction with positive denominator.
pub fn parse_scalar(text: &str) -> std::result::Result<Q, ParseErrorKind> {
    let inner = text
        .strip_prefix('"')
        .and_then(|t| t.strip_suffix('"'))
        .ok_or_else(|| ParseErrorKind::Syntax(format!("scalar `{text}` must be a quoted \"p/q\"")))?;
    let Some((num, den)) = inner.split_once('/') else {
        return Err(ParseErrorKind::NonReducedScalar(inner.into()));
    };
    let digits = |s: &str, signed: bool| {
        let body = if signed { s.strip_prefix('-').unwrap_or(s) } else { s };
        !body.is_empty() && body.chars().all(|c| c.is_ascii_digit())
    };
    if !digits(num, true) || !digits(den, false) {
        return Err(ParseErrorKind::Syntax(format!("scalar `{inner}` must be p/q with decimal integers")));
    }
    if den.chars().all(|c| c == '0') {
        return Err(ParseErrorKind::ZeroDenominator(inner.into()));
    }
    let q = Q::from_str(inner).map_err(|_| ParseErrorKind::Syntax(format!("bad scalar `{inner}`")))?;
    if fmt_scalar(&q) != inner {
        return Err(ParseErrorKind::NonReducedScalar(inner.into()));
    }
    Ok(q)
}

fn algebra(line: &Line, col: usize) -> impl Fn(AlgebraError) -> ParseError + '_ {
    move |e| {
        let kind = match e {
            AlgebraError::DegreeMismatch(m) => ParseErrorKind::DegreeMismatch(m),
            AlgebraError::UnknownSymbol { space, symbol } => ParseErrorKind::UnknownSymbol { space, symbol },
            other => ParseErrorKind::Algebra(other),
        };
        line.err(col, kind)
    }
}

fn lookup(space: &GradedSpace, line: &Line, tok: &Token) -> Parsed<usize> {
    space.index_of(&tok.text).ok_or_else(|| {
        line.err(tok.col, ParseErrorKind::UnknownSymbol { space: space.name().into(), symbol: tok.text.clone() })
    })
}

/// `inputs… -> out "p/q"`, with inputs split at `;` when `halves`.
struct Entry<'a> {
    inputs: Vec<Vec<&'a Token>>,
    output: &'a Token,
    scalar: Q,
}

fn parse_entry(line: &Line, halves: bool) -> Parsed<Entry<'_>> {
    let n = line.tokens.len();
    let arrow = line.tokens.iter().position(|t| t.text == "->");
    let shape = || {
        line.err(
            1,
            ParseErrorKind::Syntax(if halves {
                "expected `e-symbols… ; v-symbols… -> symbol \"p/q\"`".into()
            } else {
                "expected `symbols… -> symbol \"p/q\"`".into()
            }),
        )
    };
    let Some(arrow) = arrow.filter(|&a| a + 3 == n && a > 0) else { return Err(shape()) };
    let scalar_tok = &line.tokens[n - 1];
    let scalar = parse_scalar(&scalar_tok.text).map_err(|k| line.err(scalar_tok.col, k))?;
    let lhs: Vec<&Token> = line.tokens[..arrow].iter().collect();
    let inputs = if halves {
        let Some(semi) = lhs.iter().position(|t| t.text == ";") else { return Err(shape()) };
        if semi == 0 || semi + 1 == lhs.len() || lhs[semi + 1..].iter().any(|t| t.text == ";") {
            return Err(shape());
        }
        vec![lhs[..semi].to_vec(), lhs[semi + 1..].to_vec()]
    } else {
        if lhs.iter().any(|t| t.text == ";") {
            return Err(shape());
        }
        vec![lhs]
    };
    for t in inputs.iter().flatten().chain([&&line.tokens[n - 2]]) {
        if t.text.starts_with('"') || matches!(t.text.as_str(), "=" | "[" | "]" | "->") {
            return Err(line.err(t.col, ParseErrorKind::Syntax(format!("`{}` is not a symbol", t.text))));
        }
    }
    Ok(Entry { inputs, output: &line.tokens[n - 2], scalar })
}

fn symbols(space: &GradedSpace, line: &Line, toks: &[&Token]) -> Parsed<Vec<usize>> {
    toks.iter().map(|t| lookup(space, line, t)).collect()
}

fn flavor_of(line: &Line, tok: &Token) -> Parsed<Flavor> {
    match tok.text.as_str() {
        "symmetric" => Ok(Flavor::Symmetric),
        "plain" => Ok(Flavor::Plain),
        other => Err(line.err(tok.col, ParseErrorKind::Syntax(format!("flavor must be `symmetric` or `plain`, got `{other}`")))),
    }
}

struct Ctx {
    spaces: BTreeMap<String, (Space, usize)>,
}

impl Ctx {
    fn space(&self, line: &Line, tok: &Token) -> Parsed<Space> {
        self.spaces.get(&tok.text).map(|(s, _)| s.clone()).ok_or_else(|| line.err(tok.col, ParseErrorKind::UnknownSpace(tok.text.clone())))
    }
}

/// Seen `(key, output)` pairs, to reject repeated entries.
type Seen = BTreeMap<(Vec<Vec<usize>>, usize), usize>;

fn check_duplicate(seen: &mut Seen, line: &Line, key: Vec<Vec<usize>>, out: usize) -> Parsed<()> {
    if let Some(prev) = seen.insert((key, out), line.number) {
        return Err(line.err(1, ParseErrorKind::Duplicate(format!("entry (first given on line {prev})"))));
    }
    Ok(())
}

fn parse_settings(s: &Section) -> Parsed<Settings> {
    expect_args(s, &[])?;
    let mut out = Settings::default();
    let mut seen = BTreeMap::new();
    for line in &s.body {
        let t = &line.tokens;
        if t.len() != 3 || t[1].text != "=" {
            return Err(line.err(1, ParseErrorKind::Syntax("expected `key = value`".into())));
        }
        if seen.insert(t[0].text.clone(), line.number).is_some() {
            return Err(line.err(t[0].col, ParseErrorKind::Duplicate(format!("setting `{}`", t[0].text))));
        }
        let bad = || line.err(t[2].col, ParseErrorKind::Syntax(format!("`{}` needs a non-negative integer", t[0].text)));
        match t[0].text.as_str() {
            "bound" => out.bound = t[2].text.parse().map_err(|_| bad())?,
            "max_arity" => out.max_arity = t[2].text.parse().map_err(|_| bad())?,
            "seed" => out.seed = t[2].text.parse().map_err(|_| bad())?,
            other => return Err(line.err(t[0].col, ParseErrorKind::UnknownKey(other.into()))),
        }
    }
    if out.bound == 0 || out.max_arity == 0 {
        return Err(s.header.err(1, ParseErrorKind::Syntax("bound and max_arity must be positive".into())));
    }
    Ok(out)
}

fn parse_space(s: &Section) -> Parsed<Space> {
    let name = &expect_args(s, &["NAME"])?[0];
    let mut gens = Vec::new();
    for line in &s.body {
        let t = &line.tokens;
        if t.len() != 2 {
            return Err(line.err(1, ParseErrorKind::Syntax("expected `symbol degree`".into())));
        }
        let d: i32 = t[1].text.parse().map_err(|_| line.err(t[1].col, ParseErrorKind::Syntax("degree must be an integer".into())))?;
        gens.push((t[0].text.clone(), d));
    }
    let space = GradedSpace::new(name.text.as_str(), gens).map_err(|e| {
        let kind = match e {
            AlgebraError::DuplicateSymbol(sym) => ParseErrorKind::Duplicate(format!("symbol `{sym}`")),
            other => ParseErrorKind::Algebra(other),
        };
        s.header.err(name.col, kind)
    })?;
    Ok(Arc::new(space))
}

fn parse_brackets(s: &Section, ctx: &Ctx, settings: &Settings) -> Parsed<Brackets> {
    let args = expect_args(s, &["SPACE", "symmetric|plain"])?;
    let space = ctx.space(&s.header, &args[0])?;
    let flavor = flavor_of(&s.header, &args[1])?;
    let mut top = settings.max_arity;
    let mut entries = Vec::new();
    let mut seen = Seen::new();
    for line in &s.body {
        let e = parse_entry(line, false)?;
        let w = symbols(&space, line, &e.inputs[0])?;
        let out = lookup(&space, line, e.output)?;
        check_duplicate(&mut seen, line, vec![w.clone()], out)?;
        if e.scalar != Q::int(0) {
            top = top.max(w.len());
        }
        entries.push((line, w, out, e.scalar));
    }
    let mut f = Family::new(space.clone(), space.clone(), 1, flavor, top);
    for (line, w, out, c) in entries {
        f.insert(&w, out, c).map_err(algebra(line, 1))?;
    }
    let structure = HomotopyStructure::new(f).map_err(algebra(&s.header, 1))?;
    Ok(Brackets { space: space.name().to_string(), structure })
}

fn parse_action(s: &Section, ctx: &Ctx, file: &StructureFile) -> Parsed<ActionDecl> {
    let args = expect_args(s, &["E", "V"])?;
    let (es, vs) = (ctx.space(&s.header, &args[0])?, ctx.space(&s.header, &args[1])?);
    let e = file.structure(es.name()).expect("known space");
    let v = file.structure(vs.name()).expect("known space");
    let mut action = ActionFamily::new(e, v).map_err(algebra(&s.header, 1))?;
    let mut seen = Seen::new();
    for line in &s.body {
        let entry = parse_entry(line, true)?;
        let x = symbols(&es, line, &entry.inputs[0])?;
        let w = symbols(&vs, line, &entry.inputs[1])?;
        let out = lookup(&vs, line, entry.output)?;
        check_duplicate(&mut seen, line, vec![x.clone(), w.clone()], out)?;
        action.insert(&x, &w, out, entry.scalar).map_err(algebra(line, 1))?;
    }
    Ok(ActionDecl { e: es.name().into(), v: vs.name().into(), action })
}

fn parse_tensor(s: &Section, ctx: &Ctx) -> Parsed<TensorDecl> {
    let args = expect_args(s, &["NAME", "V", "E"])?;
    let (vs, es) = (ctx.space(&s.header, &args[1])?, ctx.space(&s.header, &args[2])?);
    let mut entries = Vec::new();
    let mut seen = Seen::new();
    let mut top = 1;
    for line in &s.body {
        let e = parse_entry(line, false)?;
        let w = symbols(&vs, line, &e.inputs[0])?;
        let out = lookup(&es, line, e.output)?;
        check_duplicate(&mut seen, line, vec![w.clone()], out)?;
        if e.scalar != Q::int(0) {
            top = top.max(w.len());
        }
        entries.push((line, w, out, e.scalar));
    }
    let mut tensor = EmbeddingTensor::new(vs.clone(), es.clone(), top);
    for (line, w, out, c) in entries {
        tensor.insert(&w, out, c).map_err(algebra(line, 1))?;
    }
    Ok(TensorDecl { name: args[0].text.clone(), v: vs.name().into(), e: es.name().into(), tensor })
}

fn parse_morphism(s: &Section, ctx: &Ctx) -> Parsed<MorphismDecl> {
    let args = expect_args(s, &["NAME", "SOURCE", "TARGET", "symmetric|plain"])?;
    let (src, tgt) = (ctx.space(&s.header, &args[1])?, ctx.space(&s.header, &args[2])?);
    let flavor = flavor_of(&s.header, &args[3])?;
    let mut entries = Vec::new();
    let mut seen = Seen::new();
    let mut top = 1;
    for line in &s.body {
        let e = parse_entry(line, false)?;
        let w = symbols(&src, line, &e.inputs[0])?;
        let out = lookup(&tgt, line, e.output)?;
        check_duplicate(&mut seen, line, vec![w.clone()], out)?;
        if e.scalar != Q::int(0) {
            top = top.max(w.len());
        }
        entries.push((line, w, out, e.scalar));
    }
    let mut family = Family::new(src.clone(), tgt.clone(), 0, flavor, top);
    for (line, w, out, c) in entries {
        family.insert(&w, out, c).map_err(algebra(line, 1))?;
    }
    Ok(MorphismDecl { name: args[0].text.clone(), source: src.name().into(), target: tgt.name().into(), family })
}

pub fn parse(text: &str) -> Parsed<StructureFile> {
    let sections = split_sections(text)?;
    let mut file = StructureFile::default();
    let mut settings_seen = None;
    let mut ctx = Ctx { spaces: BTreeMap::new() };
    let known = ["settings", "space", "brackets", "action", "tensor", "morphism"];
    for s in &sections {
        if !known.contains(&s.kind.as_str()) {
            return Err(s.header.err(2, ParseErrorKind::UnknownSection(s.kind.clone())));
        }
    }
    // settings and spaces first: everything else refers to them
    for s in &sections {
        match s.kind.as_str() {
            "settings" => {
                if let Some(prev) = settings_seen.replace(s.header.number) {
                    return Err(s.header.err(1, ParseErrorKind::Duplicate(format!("[settings] (first on line {prev})"))));
                }
                file.settings = parse_settings(s)?;
            }
            "space" => {
                let space = parse_space(s)?;
                if let Some((_, prev)) = ctx.spaces.get(space.name()) {
                    return Err(s.header.err(1, ParseErrorKind::Duplicate(format!("space `{}` (first on line {prev})", space.name()))));
                }
                ctx.spaces.insert(space.name().to_string(), (space.clone(), s.header.number));
                file.spaces.push(space);
            }
            _ => {}
        }
    }
    let mut brackets = BTreeMap::new();
    for s in sections.iter().filter(|s| s.kind == "brackets") {
        let b = parse_brackets(s, &ctx, &file.settings)?;
        if brackets.insert(b.space.clone(), b).is_some() {
            return Err(s.header.err(1, ParseErrorKind::Duplicate(format!("brackets for `{}`", s.args[0].text))));
        }
    }
    file.brackets = file.spaces.iter().filter_map(|sp| brackets.remove(sp.name())).collect();
    let mut names = BTreeMap::new();
    for s in &sections {
        match s.kind.as_str() {
            "action" => {
                let a = parse_action(s, &ctx, &file)?;
                if file.actions.iter().any(|b| b.e == a.e && b.v == a.v) {
                    return Err(s.header.err(1, ParseErrorKind::Duplicate(format!("action of `{}` on `{}`", a.e, a.v))));
                }
                file.actions.push(a);
            }
            "tensor" | "morphism" => {
                let name = &expect_args(s, if s.kind == "tensor" { &["NAME", "V", "E"] } else { &["NAME", "SOURCE", "TARGET", "symmetric|plain"] })?[0];
                if names.insert(name.text.clone(), s.header.number).is_some() {
                    return Err(s.header.err(name.col, ParseErrorKind::Duplicate(format!("name `{}`", name.text))));
                }
                if s.kind == "tensor" {
                    file.tensors.push(parse_tensor(s, &ctx)?);
                } else {
                    file.morphisms.push(parse_morphism(s, &ctx)?);
                }
            }
            _ => {}
        }
    }
    Ok(file)
}

fn write_entry(out: &mut String, halves: &[String], output: &str, c: &Q) {
    let _ = writeln!(out, "{} -> {output} \"{}\"", halves.join(" ; "), fmt_scalar(c));
}

fn write_family(out: &mut String, f: &Family<Q>) {
    let (src, tgt) = (f.source(), f.target());
    for m in f.maps() {
        for (w, v) in m.constants() {
            for (o, c) in v {
                write_entry(out, &[src.render(w)], tgt.symbol(*o), c);
            }
        }
    }
}

/// Canonical text: sections in a fixed order, entries sorted, comments and
/// zero entries dropped.
pub fn serialize(file: &StructureFile) -> String {
    let mut out = String::new();
    let s = &file.settings;
    let _ = writeln!(out, "[settings]\nbound = {}\nmax_arity = {}\nseed = {}", s.bound, s.max_arity, s.seed);
    for space in &file.spaces {
        let _ = writeln!(out, "\n[space {}]", space.name());
        for g in space.basis() {
            let _ = writeln!(out, "{} {}", g.symbol, g.degree);
        }
    }
    for b in &file.brackets {
        let _ = writeln!(out, "\n[brackets {} {}]", b.space, b.structure.flavor().as_str());
        write_family(&mut out, b.structure.brackets());
    }
    for a in &file.actions {
        let _ = writeln!(out, "\n[action {} {}]", a.e, a.v);
        let (es, vs) = (a.action.e_space(), a.action.v_space());
        for ((x, w), v) in a.action.components() {
            for (o, c) in v {
                write_entry(&mut out, &[es.render(x), vs.render(w)], vs.symbol(*o), c);
            }
        }
    }
    for t in &file.tensors {
        let _ = writeln!(out, "\n[tensor {} {} {}]", t.name, t.v, t.e);
        write_family(&mut out, t.tensor.family());
    }
    for m in &file.morphisms {
        let _ = writeln!(out, "\n[morphism {} {} {} {}]", m.name, m.source, m.target, m.family.flavor().as_str());
        write_family(&mut out, &m.family);
    }
    out
}

/// A file holding one structure, for constructed outputs.
pub fn structure_file(structure: &HomotopyStructure<Q>, settings: &Settings) -> StructureFile {
    StructureFile {
        settings: settings.clone(),
        spaces: vec![structure.space().clone()],
        brackets: vec![Brackets { space: structure.space().name().to_string(), structure: structure.clone() }],
        ..StructureFile::default()
    }
}
