//! Acceptance criteria 1 to 8. Prints one PASS/FAIL line per criterion and
//! exits non-zero when an outcome differs from [`EXPECTED_FAIL`].

use std::path::{Path, PathBuf};
use std::process::Command as Process;
use std::sync::Arc;
use std::time::{Duration, Instant};

use embtensor::action::{theorem_crosscheck, ActionFamily};
use embtensor::coalgebra::{twist, zinbiel_coproduct, Coalgebra, Tensor2, TruncatedCoderivation, TruncatedComorphism};
use embtensor::fixtures;
use embtensor::graded::{koszul_sign, unshuffles, WordKind};
use embtensor::homotopy::{check_loday_infinity, HomotopyStructure};
use embtensor::multimap::{decalage, inverse_decalage};
use embtensor::random::{sweep, ActionKind, Sampler};
use embtensor::tensor::{
    adjoint_strict_check, centroid_basis, centroid_check, check_descendent_morphism, check_embedding_explicit, check_embedding_mc,
    compose_unary, descendent, identity_unary, strict_algebra_compose, DeformationComplex, EmbeddingTensor,
};
use embtensor::{Flavor, GradedSpace, MultiMap, Permutation, Scalar, Word, Q};
use embtensor_cli::commands::Command;
use embtensor_cli::format::{parse, serialize};

/// Every check below is exact over `Q`; the only tolerances are wall-clock.
const BOUND: usize = 4;
const DEFORM_BOUND: usize = 3;
const SEED: u64 = 2024;
const LIMIT_1: Duration = Duration::from_secs(60);
const LIMIT_2: Duration = Duration::from_secs(60);
const LIMIT_6: Duration = Duration::from_secs(120);

/// Composition of strict adjoint tensors is not closed on sl2; see
/// `criterion_7`.
const EXPECTED_FAIL: &[usize] = &[7];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

type Corpus = Vec<(String, ActionFamily<Q>, EmbeddingTensor<Q>)>;
type Criterion = Box<dyn FnOnce(&mut Corpus) -> Outcome>;

fn main() {
    let start = Instant::now();
    let mut corpus = Corpus::new();
    let criteria: Vec<(usize, Criterion)> = vec![
        (1, Box::new(|_| criterion_1())),
        (2, Box::new(criterion_2)),
        (3, Box::new(|c| criterion_3(c))),
        (4, Box::new(|_| criterion_4())),
        (5, Box::new(|_| criterion_5())),
        (6, Box::new(|c| criterion_6(c))),
        (7, Box::new(|_| criterion_7())),
        (8, Box::new(|_| criterion_8())),
    ];
    let mut unexpected = Vec::new();
    for (n, run) in criteria {
        let t = Instant::now();
        let o = run(&mut corpus);
        let word = if o.pass { "PASS" } else { "FAIL" };
        println!("{word} criterion {n}: {} [{:.2} s]", o.detail, t.elapsed().as_secs_f64());
        if o.pass == EXPECTED_FAIL.contains(&n) {
            unexpected.push(n);
        }
    }
    println!("acceptance finished in {:.2} s", start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut s = Sampler::new(SEED);
    let (mut total, mut coherent, mut violating, mut disagree) = (0, 0, 0, Vec::new());
    let mut attempts = 0;
    while (total < 200 || coherent < 20 || violating < 20) && attempts < 2000 {
        let kind = ActionKind::ALL[attempts % ActionKind::ALL.len()];
        attempts += 1;
        let Some(phi) = s.action::<Q>(kind, 3, BOUND) else { continue };
        let c = theorem_crosscheck(&phi, BOUND).expect("generated actions are valid input");
        total += 1;
        if !c.agree() {
            disagree.push(format!("{}#{total}", kind.label()));
        }
        match kind {
            ActionKind::Coherent if c.coherence.passed() => coherent += 1,
            ActionKind::NonCentral if !c.coherence.passed() => violating += 1,
            _ => {}
        }
    }
    let elapsed = start.elapsed();
    let pass = total >= 200 && coherent >= 20 && violating >= 20 && disagree.is_empty() && elapsed < LIMIT_1;
    Outcome::new(
        pass,
        format!(
            "{total} actions, {coherent} built coherent, {violating} built non-central, {} disagreements {:?}",
            disagree.len(),
            disagree.first()
        ),
    )
}

fn coherent_actions(s: &mut Sampler, count: usize) -> Vec<ActionFamily<Q>> {
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < count && i < 20 * count {
        let kind = [ActionKind::Coherent, ActionKind::CentralKernel, ActionKind::Adjoint, ActionKind::Representation][i % 4];
        i += 1;
        if let Some(phi) = s.action::<Q>(kind, 3, BOUND) {
            if embtensor::action::check_coherence(&phi, BOUND).expect("valid").passed() {
                out.push(phi);
            }
        }
    }
    out
}

/// Fills `corpus` with the tensors that pass both routes.
fn criterion_2(corpus: &mut Corpus) -> Outcome {
    let start = Instant::now();
    let mut s = Sampler::new(SEED + 1);
    let mut cases = Corpus::new();
    let phi = fixtures::heisenberg_action::<Q>();
    cases.push(("heisenberg".into(), phi.clone(), fixtures::heisenberg_tensor(&phi)));
    let (phi, t) = fixtures::adjoint_identity::<Q>();
    cases.push(("adjoint-identity".into(), phi, t));
    let mut random = 0;
    for (k, phi) in coherent_actions(&mut s, 80).into_iter().enumerate() {
        if let Some(t) = s.annihilator_tensor(&phi, BOUND) {
            cases.push((format!("annihilator-{k}"), phi.clone(), t));
            random += 1;
        }
        let t = s.tensor(&phi, 2, 0.3);
        cases.push((format!("random-{k}"), phi, t));
        random += 1;
    }
    let mut mismatched = Vec::new();
    let (mut passed, mut failed) = (0, 0);
    for (name, phi, t) in cases {
        let explicit = check_embedding_explicit(&t, &phi, BOUND).expect("coherent input");
        let mc = check_embedding_mc(&t, &phi, BOUND).expect("coherent input");
        if explicit.passed() != mc.passed() || explicit.support() != mc.support() {
            mismatched.push(name);
            continue;
        }
        if explicit.passed() {
            passed += 1;
            corpus.push((name, phi, t));
        } else {
            failed += 1;
        }
    }
    let fixtures_ok = corpus.iter().filter(|(n, _, _)| n == "heisenberg" || n == "adjoint-identity").count() == 2;
    let pass = random >= 100 && mismatched.is_empty() && fixtures_ok && start.elapsed() < LIMIT_2;
    Outcome::new(
        pass,
        format!("2 fixtures + {random} random tensors, {passed} tensors, {failed} non-tensors, mismatches {mismatched:?}"),
    )
}

fn criterion_3(corpus: &Corpus) -> Outcome {
    let mut bad = Vec::new();
    for (name, phi, t) in corpus {
        let d = descendent(t, phi, BOUND).expect("verified tensor");
        if !check_loday_infinity(&d, BOUND).expect("plain structure").passed() {
            bad.push(format!("{name}: loday"));
        }
        if !check_descendent_morphism(t, phi, BOUND).expect("verified tensor").passed() {
            bad.push(format!("{name}: morphism"));
        }
    }
    let (phi, t) = fixtures::adjoint_identity::<Q>();
    let d = descendent(&t, &phi, BOUND).expect("verified tensor");
    let same = d.brackets().same_values(&phi.e().brackets().to_plain(), BOUND);
    if !same {
        bad.push("adjoint-identity: brackets differ".into());
    }
    Outcome::new(bad.is_empty() && !corpus.is_empty(), format!("{} descendent structures, failures {bad:?}", corpus.len()))
}

fn space_of(degs: &[i32]) -> Arc<GradedSpace> {
    Arc::new(GradedSpace::new("V", degs.iter().enumerate().map(|(i, &d)| (format!("v{i}"), d))).expect("distinct symbols"))
}

/// Ordered coshuffle by subsets of positions, with the Koszul sign of moving
/// odd letters of the right part past odd letters of the left part.
fn coshuffle_oracle(space: &GradedSpace, word: &[usize]) -> Tensor2<Q> {
    let n = word.len();
    let d = space.degrees_of(word);
    let mut out = Tensor2::new();
    for mask in 1..(1u32 << n) - 1 {
        let left: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let right: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let swaps = right.iter().flat_map(|&r| left.iter().map(move |&l| (l, r))).filter(|&(l, r)| l > r && d[l] % 2 != 0 && d[r] % 2 != 0).count();
        let a: Word = left.iter().map(|&i| word[i]).collect();
        let b: Word = right.iter().map(|&i| word[i]).collect();
        out.add_term((a, b), Q::int(if swaps % 2 == 1 { -1 } else { 1 }));
    }
    out
}

fn criterion_4() -> Outcome {
    let mut koszul = 0;
    let mut bad = Vec::new();
    for n in 1..=4usize {
        let perms = Permutation::all(n);
        for pattern in 0..(1u32 << n) {
            let degs: Vec<i64> = (0..n).map(|i| i64::from(pattern >> i & 1)).collect();
            for sigma in &perms {
                for tau in &perms {
                    let composite = Permutation::new(sigma.images().iter().map(|&j| tau.images()[j]).collect()).expect("bijection");
                    let lhs = koszul_sign(&composite, &degs).expect("lengths match");
                    let rhs = koszul_sign(tau, &degs).expect("lengths match") * koszul_sign(sigma, &tau.apply(&degs)).expect("lengths match");
                    koszul += 1;
                    if lhs != rhs {
                        bad.push(format!("koszul n={n} {:?} {:?}", sigma.images(), tau.images()));
                    }
                }
            }
        }
    }
    let mut shuffles = 0;
    for total in 2..=6usize {
        let all = Permutation::all(total);
        for p in 1..total {
            let q = total - p;
            let brute = all.iter().filter(|s| s.images()[..p].windows(2).all(|w| w[0] < w[1]) && s.images()[p..].windows(2).all(|w| w[0] < w[1])).count();
            let binomial = (1..=p).fold(1usize, |acc, i| acc * (q + i) / i);
            let got = unshuffles(&[p, q]).expect("positive blocks").len();
            shuffles += 1;
            if got != brute || brute != binomial {
                bad.push(format!("Sh({p},{q}) = {got}, brute {brute}, binomial {binomial}"));
            }
        }
    }
    let v = space_of(&[0, 1, -1]);
    let mut words = 0;
    for w in v.words_up_to(5, WordKind::Ordered) {
        let z = zinbiel_coproduct::<Q>(&v, &w);
        let mut sum = z.clone();
        sum.add_comb(&twist(&v, &z));
        words += 1;
        if sum != coshuffle_oracle(&v, &w) {
            bad.push(format!("coproduct on [{}]", v.render(&w)));
        }
    }
    Outcome::new(bad.is_empty(), format!("{koszul} sign pairs, {shuffles} shuffle sets, {words} words, failures {:?}", bad.first()))
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    let mut families = 0;
    let mut decalages = 0;
    for seed in 0..60u64 {
        let mut s = Sampler::new(SEED + 100 + seed);
        let dim = 1 + s.below(3);
        let v = s.space("V", "v", dim);
        let degree = seed as i32 % 3 - 1;
        let sym = s.family::<Q>(&v, degree, Flavor::Symmetric, 3, 0.5);
        let plain = s.family::<Q>(&v, degree, Flavor::Plain, 3, 0.5);
        let f = s.family::<Q>(&v, 0, Flavor::Plain, 3, 0.5);
        let g = s.family::<Q>(&v, 0, Flavor::Symmetric, 3, 0.5);
        let ok = TruncatedCoderivation::lift(&sym, v.clone(), Coalgebra::Symmetric, BOUND).coderivation_defects().is_empty()
            && TruncatedCoderivation::lift(&plain, v.clone(), Coalgebra::Zinbiel, BOUND).coderivation_defects().is_empty()
            && TruncatedComorphism::lift(&f, v.clone(), v.clone(), Coalgebra::Zinbiel, BOUND).expect("degree 0").comorphism_defects().is_empty()
            && TruncatedComorphism::lift(&g, v.clone(), v.clone(), Coalgebra::Symmetric, BOUND).expect("degree 0").comorphism_defects().is_empty();
        families += 4;
        if !ok {
            bad.push(format!("lift seed {seed}"));
        }
        let sv = Arc::new(v.shifted("sV", 1));
        let arity = 1 + s.below(3);
        let m: MultiMap<Q> = s.multimap(&v, arity, seed as i32 % 5 - 2, Flavor::Plain, 0.6);
        let back = decalage(&m, sv).and_then(|d| inverse_decalage(&d, v.clone())).expect("shifted space");
        decalages += 1;
        if back != m {
            bad.push(format!("decalage seed {seed}"));
        }
    }
    Outcome::new(bad.is_empty(), format!("{families} lifted families, {decalages} round trips, failures {bad:?}"))
}

fn criterion_6(corpus: &Corpus) -> Outcome {
    let start = Instant::now();
    let mut s = Sampler::new(SEED + 2);
    let mut bad = Vec::new();
    let (mut squares, mut agree_pass, mut agree_fail) = (0, 0, 0);
    for (name, phi, t) in corpus {
        let dc = DeformationComplex::new(t, phi, DEFORM_BOUND).expect("verified tensor");
        squares += 1;
        if !dc.square_check().passed() {
            bad.push(format!("{name}: square"));
        }
        let r = s.tensor(phi, 2, 0.4);
        for c in sweep::<Q>() {
            for tp in [t.scale(&c), r.scale(&c)] {
                let direct = check_embedding_explicit(&t.add(&tp).expect("same spaces"), phi, DEFORM_BOUND).expect("coherent");
                match dc.mc_check(&tp) {
                    Ok(mc) if mc.passed() == direct.passed() && mc.support() == direct.support() => {
                        if direct.passed() {
                            agree_pass += 1;
                        } else {
                            agree_fail += 1;
                        }
                    }
                    _ => bad.push(format!("{name}: sweep at {c}")),
                }
            }
        }
    }
    let pass = bad.is_empty() && squares > 0 && agree_fail > 0 && start.elapsed() < LIMIT_6;
    Outcome::new(
        pass,
        format!("{squares} complexes, sweep agreed on {agree_pass} tensors and {agree_fail} non-tensors, failures {:?}", bad.first()),
    )
}

/// Degree-0 endomorphisms with entries in {-1, 0, 1} that pass the strict
/// check.
fn strict_endomorphisms(e: &HomotopyStructure<Q>) -> Vec<MultiMap<Q>> {
    let n = e.space().dim();
    let mut out = Vec::new();
    for code in 0..3usize.pow((n * n) as u32) {
        let mut m = MultiMap::zero(e.space().clone(), e.space().clone(), 1, 0, Flavor::Plain);
        let mut c = code;
        for j in 0..n {
            for i in 0..n {
                let v = (c % 3) as i64 - 1;
                c /= 3;
                if v != 0 && e.space().degree(i) == e.space().degree(j) {
                    m.insert(&[j], i, Q::int(v)).expect("degree 0");
                }
            }
        }
        if adjoint_strict_check(e, &m).expect("endomorphism").passed() {
            out.push(m);
        }
    }
    out
}

fn render_unary(e: &HomotopyStructure<Q>, m: &MultiMap<Q>) -> String {
    let sp = e.space();
    let parts: Vec<String> = (0..sp.dim())
        .filter_map(|j| {
            let v = m.eval(&[j]);
            (!v.is_zero()).then(|| {
                let terms: Vec<String> = v.iter().map(|(i, c)| format!("{c}{}", sp.symbol(*i))).collect();
                format!("{} -> {}", sp.symbol(j), terms.join(" + "))
            })
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn criterion_7() -> Outcome {
    let mut s = Sampler::new(SEED + 3);
    let algebras = [("two-dim", fixtures::two_dim::<Q>()), ("sl2", fixtures::sl2()), ("heisenberg", fixtures::heisenberg_algebra())];
    let mut summary = Vec::new();
    let mut pool_size = 0;
    let mut open_example = None;
    let mut centroid_ok = true;
    let mut unit_ok = true;
    for (name, e) in &algebras {
        let mut pool = strict_endomorphisms(e);
        // a seeded sample keeps the pairwise loop small on the larger pools
        while pool.len() > 24 {
            pool.swap_remove(s.below(pool.len()));
        }
        let centroid = centroid_basis(e, BOUND);
        for f in &centroid {
            centroid_ok &= centroid_check(e, f, BOUND).expect("endomorphism").passed();
            centroid_ok &= adjoint_strict_check(e, f).expect("endomorphism").passed();
        }
        pool.extend(centroid);
        pool.push(identity_unary(e.space()));
        pool_size += pool.len();
        let (mut closed, mut open) = (0, 0);
        for a in &pool {
            for b in &pool {
                let r = strict_algebra_compose(e, a, b).expect("strict factors");
                unit_ok &= r.residuals.iter().all(|x| x.condition != "unit");
                if r.passed() {
                    closed += 1;
                } else {
                    open += 1;
                    if open_example.is_none() {
                        let c = compose_unary(a, b).expect("endomorphisms");
                        open_example = Some(format!(
                            "{name}: {} after {} gives {}, residual {}",
                            render_unary(e, a),
                            render_unary(e, b),
                            render_unary(e, &c),
                            r.residuals.iter().find(|x| x.condition != "unit").map(|x| x.to_string()).unwrap_or_default().trim()
                        ));
                    }
                }
            }
        }
        summary.push(format!("{name} {closed} closed/{open} open"));
    }
    let closure = open_example.is_none();
    let pass = closure && centroid_ok && unit_ok && pool_size >= 10;
    let mut detail = format!("pool of {pool_size}, {}, unit {unit_ok}, centroid strict {centroid_ok}", summary.join(", "));
    if let Some(ex) = open_example {
        detail.push_str(&format!("; closure fails: {ex}"));
    }
    Outcome::new(pass, detail)
}

fn fixture_paths() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut out: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("fixture directory")
        .map(|e| e.expect("readable entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "emb"))
        .collect();
    out.sort();
    out
}

fn run_binary(command: Command, path: &Path, format: &str) -> (Option<i32>, Vec<u8>) {
    let out = Process::new(env!("CARGO_BIN_EXE_embtensor"))
        .arg(command.name())
        .arg(path)
        .args(["--format", format])
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

fn criterion_8() -> Outcome {
    let mut bad = Vec::new();
    let mut runs = 0;
    let paths = fixture_paths();
    for path in &paths {
        let shown = path.file_name().expect("file").to_string_lossy().to_string();
        let text = std::fs::read_to_string(path).expect("readable fixture");
        match parse(&text) {
            Ok(file) => {
                let once = serialize(&file);
                match parse(&once) {
                    Ok(again) if again == file && serialize(&again) == once => {}
                    _ => bad.push(format!("{shown}: round trip")),
                }
            }
            Err(e) => bad.push(format!("{shown}: {e}")),
        }
        for command in <Command as clap::ValueEnum>::value_variants() {
            for format in ["text", "machine"] {
                let first = run_binary(*command, path, format);
                let second = run_binary(*command, path, format);
                runs += 2;
                if first != second {
                    bad.push(format!("{shown} {} {format}: output differs", command.name()));
                }
                if first.0 == Some(3) || first.0.is_none() {
                    bad.push(format!("{shown} {}: exit {:?}", command.name(), first.0));
                }
            }
        }
    }
    Outcome::new(bad.is_empty() && !paths.is_empty(), format!("{} fixtures, {runs} runs, failures {bad:?}", paths.len()))
}
