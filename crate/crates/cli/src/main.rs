//! `gelfand`: spectra, sections, duality roundtrips, constructions and
//! functional calculus on JSON files.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure,
//! 2 on invalid input or an axiom violation (including a failed `validate`).

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use gelfand_core::cstarcat::{
    check_axioms, conjugate, groupoid_category, groupoid_report, is_commutative, is_full, multi_linking,
    FiniteGroup, FiniteGroupoid, MatrixCategory, StarFunctor,
};
use gelfand_core::duality::{
    evaluation, gelfand, sections, sections_on_morphism, spectrum, spectrum_nonunital, verify_duality,
    DualityInstance, GelfandOptions,
};
use gelfand_core::funcalc::{funcalc, spectrum_of_element, SpectralFunction};
use gelfand_core::io::{
    emit, parse, parse_input, CategoryFile, FunctionFile, GroupoidFile, InputFile, SpaceoidFile, SpectrumReport,
};
use gelfand_core::numkit::{random_phase, random_unitary, Matrix, C64};
use gelfand_core::selftest::{self, Sizes, SuiteConfig};
use gelfand_core::spaceoid::{
    object_ids, point_ids, torsor_associated, twisted_pullback, validate, Gauge, PhaseFunctor,
    SpaceoidData,
};

#[derive(Parser)]
#[command(name = "gelfand", version, about = "Gel'fand duality for finite commutative C*-categories")]
struct Cli {
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the produced file here instead of embedding it in the report.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum spaceoid of a commutative full category (or groupoid) file.
    Spectrum { file: PathBuf },
    /// Category of sections of a spaceoid file.
    Sections { file: PathBuf },
    /// Gel'fand, evaluation and naturality checks on any category, groupoid
    /// or spaceoid file.
    Roundtrip { file: PathBuf },
    /// Build a standard construction.
    Make(MakeArgs),
    /// Functional calculus of a matrix viewed as an arrow of a block.
    Funcalc(FuncalcArgs),
    /// Randomized invariant suite.
    Selftest(SelftestArgs),
    /// Axiom checks on any input file.
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum MakeKind {
    /// Trivial spaceoid.
    Trivial,
    /// Multi-object linking category with seeded bijections and phases.
    Linking,
    /// Groupoid file: `--objects` copies of `--group` made transitive.
    Groupoid,
    /// Associated spaceoid of seeded phase-functor representatives.
    Torsor,
}

#[derive(Args)]
struct MakeArgs {
    kind: MakeKind,
    /// Number of base points.
    #[arg(long, default_value_t = 2)]
    points: usize,
    /// Number of objects.
    #[arg(long, default_value_t = 1)]
    objects: usize,
    /// Stabilizer group: Z<m>, V4, S3, or a product such as Z2xZ4.
    #[arg(long, default_value = "Z2")]
    group: String,
}

#[derive(Args)]
struct FuncalcArgs {
    /// Matrix file.
    file: PathBuf,
    /// Block `A:B`; equal ids make the matrix an endomorphism.
    #[arg(long, default_value = "A:B")]
    block: String,
    /// `identity`, `poly:c0,c1,...` with real coefficients, inline JSON, or
    /// a function file.
    #[arg(long, default_value = "identity")]
    function: String,
}

#[derive(Args)]
struct SelftestArgs {
    /// Cases per randomized check.
    #[arg(long, default_value_t = 20)]
    cases: usize,
    #[arg(long, default_value_t = 8)]
    max_points: usize,
    #[arg(long, default_value_t = 5)]
    max_objects: usize,
    #[arg(long, default_value_t = 40)]
    max_dim: usize,
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl Check {
    fn flag(name: &str, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
            residual: None,
            detail: None,
        }
    }

    fn residual(name: &str, residual: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            passed: residual <= threshold,
            residual: Some(residual),
            detail: None,
        }
    }

    fn error(name: &str, e: impl ToString) -> Self {
        Check {
            name: name.into(),
            passed: false,
            residual: None,
            detail: Some(e.to_string()),
        }
    }
}

#[derive(Serialize)]
struct Outcome {
    command: &'static str,
    passed: bool,
    summary: Vec<String>,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    data: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    written_to: Option<String>,
    /// Failed checks are axiom violations rather than verification failures.
    #[serde(skip)]
    axioms: bool,
}

impl Outcome {
    fn new(command: &'static str) -> Self {
        Outcome {
            command,
            passed: true,
            summary: Vec::new(),
            checks: Vec::new(),
            data: None,
            output: None,
            written_to: None,
            axioms: false,
        }
    }

    fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    fn render_text(&self) -> String {
        let mut s = String::new();
        for line in &self.summary {
            s.push_str(line);
            s.push('\n');
        }
        for c in &self.checks {
            s.push_str(&format!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name));
            if let Some(r) = c.residual {
                s.push_str(&format!(" residual={r:.3e}"));
            }
            if let Some(d) = &c.detail {
                s.push_str(&format!(" ({d})"));
            }
            s.push('\n');
        }
        if let Some(path) = &self.written_to {
            s.push_str(&format!("wrote {path}\n"));
        }
        s.push_str(if self.passed { "result: pass\n" } else { "result: FAIL\n" });
        if let Some(out) = &self.output {
            s.push_str(&serde_json::to_string_pretty(out).expect("serializable"));
            s.push('\n');
        }
        s
    }
}

/// Invalid input, reported with exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CliResult<T> = Result<T, InputError>;

struct Ctx {
    tol: f64,
    seed: u64,
    out: Option<PathBuf>,
}

impl Ctx {
    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn artifact<T: Serialize>(&self, outcome: &mut Outcome, v: &T) -> CliResult<()> {
        match &self.out {
            Some(path) => {
                fs::write(path, emit(v)?).map_err(|e| InputError(format!("cannot write {}: {e}", path.display())))?;
                outcome.written_to = Some(path.display().to_string());
            }
            None => outcome.output = Some(serde_json::to_value(v)?),
        }
        Ok(())
    }
}

fn read_input(path: &PathBuf) -> CliResult<InputFile> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_input(&text)?)
}

fn load_category(input: InputFile, tol: f64) -> CliResult<MatrixCategory> {
    match input {
        InputFile::Category(f) => Ok(f.load(tol)?),
        InputFile::Groupoid(g) => Ok(groupoid_category(&g.to_groupoid()?)?),
        _ => Err(InputError("expected a category or groupoid file".into())),
    }
}

fn load_spaceoid(input: InputFile) -> CliResult<SpaceoidData> {
    match input {
        InputFile::Spaceoid(f) => Ok(f.to_spaceoid()?),
        _ => Err(InputError("expected a spaceoid file".into())),
    }
}

fn cmd_spectrum(ctx: &Ctx, file: &PathBuf) -> CliResult<Outcome> {
    let c = load_category(read_input(file)?, ctx.tol)?;
    let sp = if c.is_unital() {
        spectrum(&c, ctx.tol)?
    } else {
        spectrum_nonunital(&c, ctx.tol)?
    };
    let mut out = Outcome::new("spectrum");
    out.summary.push(format!(
        "spectrum: {} classes over {} objects",
        sp.n_classes(),
        sp.spaceoid.n_objects()
    ));
    let valid = validate(&sp.spaceoid, ctx.tol * c.scale());
    out.check(Check::residual("spaceoid_valid", valid.worst_residual(), ctx.tol * c.scale()));
    let mut residuals = std::collections::BTreeMap::new();
    residuals.insert("spaceoid_validation".to_string(), valid.worst_residual());
    if c.is_unital() {
        let opts = GelfandOptions {
            tol: ctx.tol,
            samples: 20,
            seed: ctx.seed,
            check_functor: true,
        };
        let (_, rep) = gelfand(&c, opts)?;
        residuals.insert("gelfand_isometry".to_string(), rep.isometry_residual);
        out.check(Check::residual("gelfand_isometry", rep.isometry_residual, ctx.tol));
    }
    let report = SpectrumReport::new(&c, &sp, residuals);
    for (pair, corr) in &report.correspondences {
        out.summary.push(format!("  {pair}: {corr:?}"));
    }
    out.data = Some(serde_json::to_value(report)?);
    ctx.artifact(&mut out, &SpaceoidFile::from_spaceoid(&sp.spaceoid))?;
    Ok(out)
}

fn cmd_sections(ctx: &Ctx, file: &PathBuf) -> CliResult<Outcome> {
    let e = load_spaceoid(read_input(file)?)?;
    let report = validate(&e, ctx.tol);
    if let Some(bad) = report.checks.iter().find(|c| !c.passed) {
        return Err(InputError(format!(
            "not a spaceoid: {} fails (residual {:.3e})",
            bad.name, bad.worst_residual
        )));
    }
    let c = sections(&e, ctx.tol)?;
    let mut out = Outcome::new("sections");
    let dims: Vec<String> = (0..c.n_objects()).map(|a| format!("{}={}", c.id(a), c.dim(a))).collect();
    out.summary.push(format!("sections: {} objects ({})", c.n_objects(), dims.join(", ")));
    ctx.artifact(&mut out, &CategoryFile::from_category(&c))?;
    Ok(out)
}

/// Gel'fand checks plus the category square on a seeded unitary relabelling.
fn category_roundtrip(ctx: &Ctx, c: &MatrixCategory, out: &mut Outcome) {
    let opts = GelfandOptions {
        tol: ctx.tol,
        samples: 20,
        seed: ctx.seed,
        check_functor: true,
    };
    let sp = match gelfand(c, opts) {
        Ok((gt, rep)) => {
            out.check(Check::flag("gelfand_bijective", rep.object_bijective && rep.block_bijective));
            out.check(Check::residual("gelfand_isometry", rep.isometry_residual, ctx.tol));
            if let Some(r) = rep.functor_residual {
                out.check(Check::residual("gelfand_functor", r, ctx.tol));
            }
            gt.spectrum
        }
        Err(e) => return out.check(Check::error("gelfand", e)),
    };
    out.summary.push(format!("spectrum: {} classes", sp.n_classes()));
    match evaluation(&sp.spaceoid, ctx.tol) {
        Ok((_, rep, _)) => {
            out.check(Check::flag("evaluation_isomorphism", rep.base_bijective && rep.is_isomorphism));
            out.check(Check::residual("evaluation_morphism", rep.morphism_residual, ctx.tol));
        }
        Err(e) => out.check(Check::error("evaluation", e)),
    }
    let mut rng = ctx.rng();
    let us: Vec<Matrix> = (0..c.n_objects()).map(|a| random_unitary(c.dim(a), &mut rng)).collect();
    let target = conjugate(c, &us);
    let functor = StarFunctor::from_matrix_map(
        c,
        &target,
        (0..c.n_objects()).collect(),
        |a, b, x| &(&us[a] * x) * &us[b].adjoint(),
        ctx.tol,
    );
    match functor {
        Ok(functor) => {
            let rep = verify_duality(
                &[DualityInstance::Functor {
                    label: "unitary relabelling".into(),
                    source: c.clone(),
                    target,
                    functor,
                }],
                ctx.tol,
            );
            push_duality(out, rep);
        }
        Err(e) => out.check(Check::error("naturality_category", e)),
    }
}

fn push_duality(out: &mut Outcome, rep: gelfand_core::duality::DualityReport) {
    for r in rep.instances {
        out.check(Check {
            name: format!("naturality_{}", r.square),
            passed: r.passed,
            residual: r.residual.is_finite().then_some(r.residual),
            detail: r.error,
        });
    }
}

/// Structure checks, evaluation, Gel'fand on the sections, and both squares
/// on a seeded morphism into `e`.
fn spaceoid_roundtrip(ctx: &Ctx, e: &SpaceoidData, out: &mut Outcome) {
    let report = validate(e, ctx.tol);
    for c in &report.checks {
        out.check(Check {
            name: format!("spaceoid_{}", c.name),
            passed: c.passed,
            residual: Some(c.worst_residual),
            detail: c.location.clone(),
        });
    }
    if !report.passed() {
        return;
    }
    if e.n_points() == 0 {
        out.summary.push("empty base: sections are zero-dimensional, nothing further to check".into());
        return;
    }
    match evaluation(e, ctx.tol) {
        Ok((_, rep, _)) => {
            out.check(Check::flag("evaluation_isomorphism", rep.base_bijective && rep.is_isomorphism));
            out.check(Check::residual("evaluation_morphism", rep.morphism_residual, ctx.tol));
        }
        Err(err) => out.check(Check::error("evaluation", err)),
    }
    let gamma = match sections(e, ctx.tol) {
        Ok(c) => c,
        Err(err) => return out.check(Check::error("sections", err)),
    };
    let opts = GelfandOptions {
        tol: ctx.tol,
        samples: 20,
        seed: ctx.seed,
        check_functor: true,
    };
    match gelfand(&gamma, opts) {
        Ok((_, rep)) => out.check(Check::residual("sections_gelfand_isometry", rep.isometry_residual, ctx.tol)),
        Err(err) => out.check(Check::error("sections_gelfand", err)),
    }
    let mut rng = ctx.rng();
    let k1 = rng.random_range(1..=e.n_points());
    let f: Vec<usize> = (0..k1).map(|_| rng.random_range(0..e.n_points())).collect();
    let mut fr: Vec<usize> = (0..e.n_objects()).collect();
    for i in (1..fr.len()).rev() {
        fr.swap(i, rng.random_range(0..=i));
    }
    let s = Gauge::random(k1, e.n_objects(), &mut rng);
    match twisted_pullback(&f, &fr, s, e) {
        Ok((domain, m)) => {
            let mut instances = vec![DualityInstance::Morphism {
                label: "seeded morphism".into(),
                domain: domain.clone(),
                codomain: e.clone(),
                morphism: m.clone(),
            }];
            if let Ok(source) = sections(&domain, ctx.tol) {
                instances.push(DualityInstance::Functor {
                    label: "sections of seeded morphism".into(),
                    source: gamma.clone(),
                    target: source,
                    functor: sections_on_morphism(&m),
                });
            }
            push_duality(out, verify_duality(&instances, ctx.tol));
        }
        Err(err) => out.check(Check::error("naturality", err)),
    }
}

fn cmd_roundtrip(ctx: &Ctx, file: &PathBuf) -> CliResult<Outcome> {
    let input = read_input(file)?;
    let mut out = Outcome::new("roundtrip");
    match input {
        InputFile::Spaceoid(f) => {
            let e = f.to_spaceoid()?;
            out.summary.push(format!("spaceoid: {} points, {} objects", e.n_points(), e.n_objects()));
            spaceoid_roundtrip(ctx, &e, &mut out);
        }
        InputFile::Matrix(_) => return Err(InputError("roundtrip needs a category, groupoid or spaceoid".into())),
        other => {
            let c = load_category(other, ctx.tol)?;
            if !is_commutative(&c, ctx.tol) {
                return Err(InputError("category is not commutative".into()));
            }
            if !is_full(&c, ctx.tol) {
                return Err(InputError("category is not full".into()));
            }
            out.summary.push(format!("category: {} objects", c.n_objects()));
            category_roundtrip(ctx, &c, &mut out);
        }
    }
    Ok(out)
}

fn parse_group(name: &str) -> CliResult<FiniteGroup> {
    let factor = |s: &str| -> CliResult<FiniteGroup> {
        match s {
            "S3" => Ok(FiniteGroup::s3()),
            "V4" | "klein" => Ok(FiniteGroup::klein()),
            "trivial" => Ok(FiniteGroup::trivial()),
            _ => {
                let m: usize = s
                    .strip_prefix('Z')
                    .and_then(|m| m.parse().ok())
                    .filter(|&m| m >= 1)
                    .ok_or_else(|| InputError(format!("unknown group {s:?}")))?;
                Ok(FiniteGroup::cyclic(m))
            }
        }
    };
    let mut parts = name.split('x');
    let mut g = factor(parts.next().unwrap_or_default())?;
    for p in parts {
        g = FiniteGroup::product(&g, &factor(p)?);
    }
    Ok(g)
}

fn cmd_make(ctx: &Ctx, args: &MakeArgs) -> CliResult<Outcome> {
    let mut out = Outcome::new("make");
    let mut rng = ctx.rng();
    let (k, n) = (args.points, args.objects);
    if n == 0 {
        return Err(InputError("--objects must be positive".into()));
    }
    match args.kind {
        MakeKind::Trivial => {
            let e = SpaceoidData::trivial(point_ids(k), object_ids(n))?;
            out.summary.push(format!("trivial spaceoid: {k} points, {n} objects"));
            ctx.artifact(&mut out, &SpaceoidFile::from_spaceoid(&e))?;
        }
        MakeKind::Linking => {
            if k == 0 {
                return Err(InputError("--points must be positive".into()));
            }
            let corrs: Vec<Vec<usize>> = (1..n)
                .map(|_| {
                    let mut p: Vec<usize> = (0..k).collect();
                    for i in (1..k).rev() {
                        p.swap(i, rng.random_range(0..=i));
                    }
                    p
                })
                .collect();
            let phases: Vec<Vec<C64>> = (1..n).map(|_| (0..k).map(|_| random_phase(&mut rng)).collect()).collect();
            let c = multi_linking(k, &corrs, &phases)?;
            out.summary.push(format!("linking category: {k} points, {n} objects"));
            out.check(Check::flag("commutative", is_commutative(&c, ctx.tol)));
            out.check(Check::flag("full", is_full(&c, ctx.tol)));
            ctx.artifact(&mut out, &CategoryFile::from_category(&c))?;
        }
        MakeKind::Groupoid => {
            let group = parse_group(&args.group)?;
            let g = FiniteGroupoid::transitive(n, &group)?;
            let rep = groupoid_report(&g);
            let c = groupoid_category(&g)?;
            let (comm, full) = (is_commutative(&c, ctx.tol), is_full(&c, ctx.tol));
            out.summary.push(format!(
                "groupoid: {n} objects, stabilizer {} of order {}",
                group.name,
                group.order()
            ));
            out.summary.push(format!(
                "commutative: {comm}, full: {full}, abelian stabilizers: {}, transitive: {}",
                rep.stabilizers_abelian, rep.transitive
            ));
            out.check(Check::flag("commutativity_matches_stabilizers", comm == rep.stabilizers_abelian));
            out.check(Check::flag("fullness_matches_transitivity", full == rep.transitive));
            out.data = Some(serde_json::json!({ "commutative": comm, "full": full, "report": rep }));
            ctx.artifact(&mut out, &GroupoidFile::from_groupoid(&g))?;
        }
        MakeKind::Torsor => {
            let reps: Vec<PhaseFunctor> = (0..k).map(|_| PhaseFunctor::random(n, &mut rng)).collect();
            let e = torsor_associated(n, k, &reps)?;
            out.summary.push(format!("torsor spaceoid: {k} points, {n} objects"));
            ctx.artifact(&mut out, &SpaceoidFile::from_spaceoid(&e))?;
        }
    }
    Ok(out)
}

fn parse_function(spec: &str) -> CliResult<SpectralFunction> {
    if spec == "identity" {
        return Ok(SpectralFunction::identity());
    }
    if let Some(coeffs) = spec.strip_prefix("poly:") {
        let c = coeffs
            .split(',')
            .map(|t| t.trim().parse::<f64>().map(|x| C64::new(x, 0.0)))
            .collect::<Result<Vec<C64>, _>>()
            .map_err(|e| InputError(format!("bad polynomial coefficient: {e}")))?;
        return Ok(SpectralFunction::Polynomial(c));
    }
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        fs::read_to_string(spec).map_err(|e| InputError(format!("cannot read function file {spec}: {e}")))?
    };
    Ok(parse::<FunctionFile>(&text)?.to_function()?)
}

fn cmd_funcalc(ctx: &Ctx, args: &FuncalcArgs) -> CliResult<Outcome> {
    let x = match read_input(&args.file)? {
        InputFile::Matrix(m) => m,
        _ => return Err(InputError("expected a matrix file".into())),
    };
    let (a, b) = args
        .block
        .split_once(':')
        .ok_or_else(|| InputError(format!("block {:?} is not of the form A:B", args.block)))?;
    let f = parse_function(&args.function)?;
    let spec = spectrum_of_element(&x, a, b, ctx.tol)?;
    let y = funcalc(&x, a, b, &f, ctx.tol)?;
    let mut out = Outcome::new("funcalc");
    let pts: Vec<String> = spec.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
    out.summary.push(format!("spectrum of {a}:{b}: [{}]", pts.join(", ")));
    let values: Vec<[f64; 2]> = spec
        .iter()
        .map(|z| f.eval(*z, ctx.tol.sqrt()).map(|v| [v.re, v.im]).unwrap_or([f64::NAN, f64::NAN]))
        .collect();
    let points: Vec<[f64; 2]> = spec.iter().map(|z| [z.re, z.im]).collect();
    out.data = Some(serde_json::json!({ "spectrum": points, "values": values }));
    ctx.artifact(&mut out, &y)?;
    Ok(out)
}

fn cmd_selftest(ctx: &Ctx, args: &SelftestArgs) -> CliResult<Outcome> {
    if args.max_points == 0 || args.max_objects == 0 || args.max_dim == 0 {
        return Err(InputError("sizes must be positive".into()));
    }
    let cfg = SuiteConfig {
        seed: ctx.seed,
        tol: ctx.tol,
        sizes: Sizes {
            max_points: args.max_points,
            max_objects: args.max_objects,
            max_dim: args.max_dim,
        },
        cases: args.cases,
        gelfand_samples: 20,
    };
    let rep = selftest::run(cfg);
    let mut out = Outcome::new("selftest");
    out.summary.push(format!(
        "selftest: seed {} tol {:e}, {} cases per check",
        ctx.seed, ctx.tol, args.cases
    ));
    for c in &rep.checks {
        out.check(Check {
            name: format!("{} {}/{}", c.name, c.cases - c.failures, c.cases),
            passed: c.passed(),
            residual: c.worst_residual.is_finite().then_some(c.worst_residual),
            detail: c.first_failure.clone(),
        });
    }
    Ok(out)
}

fn cmd_validate(ctx: &Ctx, file: &PathBuf) -> CliResult<Outcome> {
    let mut out = Outcome::new("validate");
    out.axioms = true;
    match read_input(file)? {
        InputFile::Spaceoid(f) => {
            let e = f.to_spaceoid()?;
            out.summary.push(format!("spaceoid: {} points, {} objects", e.n_points(), e.n_objects()));
            for c in validate(&e, ctx.tol).checks {
                out.check(Check {
                    name: c.name,
                    passed: c.passed,
                    residual: Some(c.worst_residual),
                    detail: c.location,
                });
            }
        }
        InputFile::Matrix(m) => {
            out.summary.push(format!("matrix: {}x{}", m.rows(), m.cols()));
        }
        input => {
            let groupoid = match &input {
                InputFile::Groupoid(g) => Some(groupoid_report(&g.to_groupoid()?)),
                _ => None,
            };
            let c = load_category(input, ctx.tol)?;
            let dims: Vec<String> = (0..c.n_objects()).map(|a| format!("{}={}", c.id(a), c.dim(a))).collect();
            out.summary.push(format!("category: {} objects ({})", c.n_objects(), dims.join(", ")));
            for a in check_axioms(&c, ctx.tol, ctx.seed).checks {
                out.check(Check {
                    name: a.name,
                    passed: a.passed,
                    residual: Some(a.worst_residual),
                    detail: None,
                });
            }
            let (comm, full) = (is_commutative(&c, ctx.tol), is_full(&c, ctx.tol));
            out.summary.push(format!("commutative: {comm}, full: {full}"));
            if let Some(rep) = groupoid {
                out.summary.push(format!(
                    "abelian stabilizers: {}, transitive: {}",
                    rep.stabilizers_abelian, rep.transitive
                ));
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        eprintln!("error: --tol must be a positive number");
        return ExitCode::from(2);
    }
    let ctx = Ctx {
        tol: cli.tol,
        seed: cli.seed,
        out: cli.out.clone(),
    };
    let result = match &cli.command {
        Command::Spectrum { file } => cmd_spectrum(&ctx, file),
        Command::Sections { file } => cmd_sections(&ctx, file),
        Command::Roundtrip { file } => cmd_roundtrip(&ctx, file),
        Command::Make(args) => cmd_make(&ctx, args),
        Command::Funcalc(args) => cmd_funcalc(&ctx, args),
        Command::Selftest(args) => cmd_selftest(&ctx, args),
        Command::Validate { file } => cmd_validate(&ctx, file),
    };
    match result {
        Ok(outcome) => {
            let text = if cli.json {
                serde_json::to_string_pretty(&outcome).expect("serializable") + "\n"
            } else {
                outcome.render_text()
            };
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            match (outcome.passed, outcome.axioms) {
                (true, _) => ExitCode::SUCCESS,
                (false, false) => ExitCode::from(1),
                (false, true) => ExitCode::from(2),
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
