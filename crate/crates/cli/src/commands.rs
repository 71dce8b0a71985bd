use std::io::Read;
use std::path::Path;

use isotopy::batch::batch_classify;
use isotopy::json::{
    parse_scalars, AlgebraRef, AlgebraSpec, CompFormSpec, ElementSpec, IsotopeSpec, MapSpec, QuatFormSpec, Registry,
    TripleSpec,
};
use isotopy::linear::{polar_decompose, similitude_check};
use isotopy::oracle::{run_oracle, standard_params, Property};
use isotopy::triality::{
    comp_canonical, comp_iso_test, ellipsoid_report, pair_conjugacy, quat_iso_test, quaternion_canonical, so4_factor,
    triality_align, triality_components_with, IsoVerdict, SolverOptions, TrialityTriple,
};
use isotopy::{Algebra, Backend, Element, Error, LinMap, Rational, Scalar, Tolerance};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::report::{coords, map, Report};
use crate::{
    AlgebraCmd, BatchCmd, ClassifyCmd, CliError, Command, ElementArgs, FormKind, IsoTestArgs, IsotopeCmd, MapArgs,
    MapInput, OracleArgs, PairArgs, SimilitudeCmd, SolverArgs, TrialityCmd,
};

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs `f::<Rational>` or `f::<f64>` according to a backend.
macro_rules! on_backend {
    ($backend:expr, $f:ident($($arg:expr),* $(,)?)) => {
        match $backend {
            Backend::Exact => $f::<Rational>($($arg),*),
            Backend::Approx => $f::<f64>($($arg),*),
        }
    };
}

pub struct Context {
    pub registry: Registry,
    pub tol: Tolerance,
}

impl Context {
    /// Loads the session file and applies `ISOTOPE_TOL` to the residual
    /// tolerance.
    pub fn new(session: Option<&Path>) -> CliResult<Self> {
        let registry = session.map(read_json).transpose()?.unwrap_or_default();
        let mut tol = Tolerance::default();
        if let Ok(raw) = std::env::var("ISOTOPE_TOL") {
            let value: f64 =
                raw.trim().parse().map_err(|_| CliError::Input(format!("ISOTOPE_TOL={raw:?} is not a number")))?;
            tol = tol.with_residual(value).map_err(|e| CliError::Input(e.to_string()))?;
        }
        Ok(Context { registry, tol })
    }

    fn resolve(&self, r: &AlgebraRef) -> CliResult<AlgebraSpec> {
        Ok(self.registry.resolve(r)?)
    }

    /// The first algebra named among `candidates`.
    fn pick(&self, candidates: &[Option<&AlgebraRef>]) -> CliResult<AlgebraRef> {
        candidates
            .iter()
            .flatten()
            .next()
            .map(|r| (*r).clone())
            .ok_or_else(|| CliError::Input("no algebra given (use --algebra or an \"algebra\" field)".into()))
    }

    fn build<S: Scalar>(&self, r: &AlgebraRef) -> CliResult<Algebra<S>> {
        Ok(self.resolve(r)?.build(self.tol)?)
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let direct = T::deserialize(&value);
    // A report from another subcommand stands in for its first matching witness.
    let witness = value.get("witnesses").and_then(Value::as_object).and_then(|w| {
        w.values().find_map(|v| T::deserialize(v).ok())
    });
    match (direct, witness) {
        (Ok(t), _) | (Err(_), Some(t)) => Ok(t),
        (Err(e), None) => Err(CliError::Input(format!("{}: {e}", path.display()))),
    }
}

/// `--algebra` accepts an id or an inline JSON algebra.
fn algebra_arg(arg: &Option<String>) -> CliResult<Option<AlgebraRef>> {
    match arg {
        None => Ok(None),
        Some(s) if s.trim_start().starts_with('{') => {
            let spec: AlgebraSpec = serde_json::from_str(s).map_err(|e| CliError::Input(format!("--algebra: {e}")))?;
            Ok(Some(AlgebraRef::Inline(spec)))
        }
        Some(s) => Ok(Some(AlgebraRef::Id(s.clone()))),
    }
}

fn require_approx(backend: Backend) -> CliResult<()> {
    if backend == Backend::Approx {
        Ok(())
    } else {
        Err(Error::BackendMismatch { expected: Backend::Approx, got: backend }.into())
    }
}

fn same_algebra(ctx: &Context, a: &AlgebraRef, b: &AlgebraRef) -> CliResult<()> {
    if ctx.resolve(a)? == ctx.resolve(b)? {
        Ok(())
    } else {
        Err(Error::AlgebraMismatch.into())
    }
}

/// Largest coordinate of `x - y`, as a double.
fn gap<S: Scalar>(x: &Element<S>, y: &Element<S>) -> f64 {
    x.coords().iter().zip(y.coords()).map(|(a, b)| (a.clone() - b.clone()).abs_f64()).fold(0.0, f64::max)
}

pub fn execute(ctx: &Context, operation: &str, command: Command) -> CliResult<Report> {
    match command {
        Command::Algebra(AlgebraCmd::New { params, backend }) => {
            let spec = AlgebraSpec { dim: 1usize.checked_shl(params.len() as u32).unwrap_or(0), params, backend };
            on_backend!(backend, algebra_new(ctx, operation, &spec))
        }
        Command::Element(args) => element(ctx, operation, &args),
        Command::Map(args) => map_cmd(ctx, operation, &args),
        Command::Isotope(cmd) => isotope(ctx, operation, cmd),
        Command::Similitude(SimilitudeCmd::Check(input)) => {
            let (spec, r) = load_map_spec(ctx, &input)?;
            on_backend!(ctx.resolve(&r)?.backend, similitude(ctx, operation, &spec, &r))
        }
        Command::Triality(cmd) => triality(ctx, operation, cmd),
        Command::Polar(input) => polar(ctx, operation, &input),
        Command::So4Factor(input) => so4(ctx, operation, &input),
        Command::Classify(cmd) => classify(ctx, operation, cmd),
        Command::IsoTest(args) => iso_test(ctx, operation, &args),
        Command::PairConjugacy(args) => pairs(ctx, operation, &args),
        Command::Oracle(args) => oracle(ctx, operation, &args),
        Command::Batch(BatchCmd::Classify { count, seed, sampler, backend }) => {
            let summary = batch_classify(count, seed, sampler, backend, ctx.tol)?;
            Ok(Report::new(operation, "completed", ctx.tol)
                .residual("max", summary.residuals.max)
                .residual("mean", summary.residuals.mean)
                .witness("summary", &summary)
                .seed(seed))
        }
    }
}

fn algebra_new<S: Scalar>(ctx: &Context, operation: &str, spec: &AlgebraSpec) -> CliResult<Report> {
    let alg: Algebra<S> = spec.build(ctx.tol)?;
    Ok(Report::new(operation, "constructed", ctx.tol)
        .witness("algebra", AlgebraSpec::of(&alg))
        .witness("norm_diagonal", isotopy::json::scalars_to_strings(alg.norm_diagonal()))
        .witness("euclidean", alg.is_euclidean())
        .witness("associative", alg.is_associative())
        .witness("split_binary", alg.is_split_binary()))
}

fn element(ctx: &Context, operation: &str, args: &ElementArgs) -> CliResult<Report> {
    let x: ElementSpec = read_json(&args.element)?;
    let y: Option<ElementSpec> = args.times.as_deref().map(read_json).transpose()?;
    if let Some(y) = &y {
        same_algebra(ctx, &x.algebra, &y.algebra)?;
    }
    on_backend!(ctx.resolve(&x.algebra)?.backend, element_report(ctx, operation, &x, y.as_ref()))
}

fn element_report<S: Scalar>(
    ctx: &Context,
    operation: &str,
    x: &ElementSpec,
    y: Option<&ElementSpec>,
) -> CliResult<Report> {
    let alg = ctx.build::<S>(&x.algebra)?;
    let e = x.build(&alg)?;
    let mut report = Report::new(operation, "computed", ctx.tol)
        .witness("norm", e.norm().to_string())
        .witness("trace", e.trace().to_string())
        .witness("conjugate", coords(&e.conjugate()))
        .witness("inverse", e.inverse().ok().map(|i| coords(&i)));
    if let Some(y) = y {
        let f = y.build(&alg)?;
        report = report.witness("product", coords(&e.multiply(&f)?));
    }
    Ok(report)
}

enum MapSourceSpec {
    Rows(MapSpec),
    Left(ElementSpec),
    Right(ElementSpec),
    Inner(ElementSpec),
    Identity,
    Conjugation,
}

fn map_cmd(ctx: &Context, operation: &str, args: &MapArgs) -> CliResult<Report> {
    let s = &args.source;
    let fallback = algebra_arg(&args.algebra)?;
    let (source, named) = if let Some(p) = &s.map {
        let m: MapSpec = read_json(p)?;
        let r = m.algebra.clone();
        (MapSourceSpec::Rows(m), r)
    } else if let Some(p) = s.left.as_ref().or(s.right.as_ref()).or(s.inner.as_ref()) {
        let e: ElementSpec = read_json(p)?;
        let r = Some(e.algebra.clone());
        let source = match (&s.left, &s.right) {
            (Some(_), _) => MapSourceSpec::Left(e),
            (_, Some(_)) => MapSourceSpec::Right(e),
            _ => MapSourceSpec::Inner(e),
        };
        (source, r)
    } else if s.identity {
        (MapSourceSpec::Identity, None)
    } else {
        (MapSourceSpec::Conjugation, None)
    };
    let r = ctx.pick(&[named.as_ref(), fallback.as_ref()])?;
    on_backend!(ctx.resolve(&r)?.backend, map_report(ctx, operation, &source, &r))
}

fn map_report<S: Scalar>(ctx: &Context, operation: &str, source: &MapSourceSpec, r: &AlgebraRef) -> CliResult<Report> {
    let alg = ctx.build::<S>(r)?;
    let m = match source {
        MapSourceSpec::Rows(spec) => spec.build(&alg)?,
        MapSourceSpec::Left(e) => LinMap::left(&e.build(&alg)?),
        MapSourceSpec::Right(e) => LinMap::right(&e.build(&alg)?),
        MapSourceSpec::Inner(e) => LinMap::inner(&e.build(&alg)?)?,
        MapSourceSpec::Identity => LinMap::identity(&alg),
        MapSourceSpec::Conjugation => LinMap::conjugation(&alg),
    };
    Ok(Report::new(operation, "computed", ctx.tol)
        .witness("map", MapSpec::of(&m, Some(r.clone())))
        .witness("determinant", m.determinant().to_string())
        .witness("invertible", m.is_invertible()))
}

/// A map file together with the algebra it lives in.
fn load_map_spec(ctx: &Context, input: &MapInput) -> CliResult<(MapSpec, AlgebraRef)> {
    let spec: MapSpec = read_json(&input.map)?;
    let fallback = algebra_arg(&input.algebra)?;
    let r = ctx.pick(&[spec.algebra.as_ref(), fallback.as_ref()])?;
    Ok((spec, r))
}

fn isotope(ctx: &Context, operation: &str, cmd: IsotopeCmd) -> CliResult<Report> {
    match cmd {
        IsotopeCmd::New { alpha, beta, algebra } => {
            let a: MapSpec = read_json(&alpha)?;
            let b: MapSpec = read_json(&beta)?;
            let fallback = algebra_arg(&algebra)?;
            let r = ctx.pick(&[a.algebra.as_ref(), b.algebra.as_ref(), fallback.as_ref()])?;
            let spec = IsotopeSpec { algebra: r, alpha: a, beta: b };
            on_backend!(ctx.resolve(&spec.algebra)?.backend, isotope_new(ctx, operation, &spec))
        }
        IsotopeCmd::Identity { isotope } => {
            let spec: IsotopeSpec = read_json(&isotope)?;
            on_backend!(ctx.resolve(&spec.algebra)?.backend, identity(ctx, operation, &spec))
        }
        IsotopeCmd::DoubleSign { isotope, exponent } => {
            let spec: IsotopeSpec = read_json(&isotope)?;
            on_backend!(ctx.resolve(&spec.algebra)?.backend, double_sign(ctx, operation, &spec, exponent))
        }
        IsotopeCmd::Same { isotope, other } => {
            let first: IsotopeSpec = read_json(&isotope)?;
            let second: IsotopeSpec = read_json(&other)?;
            same_algebra(ctx, &first.algebra, &second.algebra)?;
            on_backend!(ctx.resolve(&first.algebra)?.backend, same(ctx, operation, &first, &second))
        }
        IsotopeCmd::Transport { isotope, phi, triple, solver } => {
            let spec: IsotopeSpec = read_json(&isotope)?;
            let phi: MapSpec = read_json(&phi)?;
            let triple: Option<TripleSpec> = triple.as_deref().map(read_json).transpose()?;
            on_backend!(
                ctx.resolve(&spec.algebra)?.backend,
                transport(ctx, operation, &spec, &phi, triple.as_ref(), &solver)
            )
        }
    }
}

fn isotope_new<S: Scalar>(ctx: &Context, operation: &str, spec: &IsotopeSpec) -> CliResult<Report> {
    let alg = ctx.build::<S>(&spec.algebra)?;
    let iso = spec.build(&alg)?;
    Ok(Report::new(operation, "constructed", ctx.tol).witness("isotope", IsotopeSpec::of(&iso, spec.algebra.clone())))
}

fn identity<S: Scalar>(ctx: &Context, operation: &str, spec: &IsotopeSpec) -> CliResult<Report> {
    let alg = ctx.build::<S>(&spec.algebra)?;
    let iso = spec.build(&alg)?;
    let e = iso.find_identity()?;
    let mut residual: f64 = 0.0;
    for i in 0..alg.dim() {
        let x = alg.basis(i);
        residual = residual.max(gap(&iso.mul(&e, &x)?, &x)).max(gap(&iso.mul(&x, &e)?, &x));
    }
    let scale = iso.unital_norm_scale().ok().map(|s| s.to_string());
    Ok(Report::new(operation, "unital", ctx.tol)
        .witness("identity", ElementSpec::of(&e, spec.algebra.clone()))
        .witness("norm_scale", scale)
        .residual("identity", residual))
}

fn double_sign<S: Scalar>(
    ctx: &Context,
    operation: &str,
    spec: &IsotopeSpec,
    exponent: Option<u32>,
) -> CliResult<Report> {
    let alg = ctx.build::<S>(&spec.algebra)?;
    let iso = spec.build(&alg)?;
    let ds = match exponent {
        Some(e) => iso.double_sign_with_exponent(e)?,
        None => iso.double_sign()?,
    };
    let coset = |c: &isotopy::scalar::PowerCoset<S>| serde_json::json!({ "exponent": c.exponent, "representative": c.representative.to_string() });
    Ok(Report::new(operation, "computed", ctx.tol).witness("alpha", coset(&ds.alpha)).witness("beta", coset(&ds.beta)))
}

fn same<S: Scalar>(ctx: &Context, operation: &str, first: &IsotopeSpec, second: &IsotopeSpec) -> CliResult<Report> {
    let alg = ctx.build::<S>(&first.algebra)?;
    let w = first.build(&alg)?.same_isotope(&second.build(&alg)?)?;
    Ok(Report::new(operation, "same", ctx.tol).witness("w", ElementSpec::of(&w, first.algebra.clone())))
}

fn solve<S: Scalar>(phi: &LinMap<S>, solver: &SolverArgs) -> CliResult<TrialityTriple<S>> {
    let cert = similitude_check(phi)?;
    let options = SolverOptions { restarts: solver.restarts, seed: solver.seed, ..SolverOptions::default() };
    Ok(triality_components_with(phi, &cert, &options)?)
}

fn transport<S: Scalar>(
    ctx: &Context,
    operation: &str,
    spec: &IsotopeSpec,
    phi: &MapSpec,
    triple: Option<&TripleSpec>,
    solver: &SolverArgs,
) -> CliResult<Report> {
    let alg = ctx.build::<S>(&spec.algebra)?;
    let iso = spec.build(&alg)?;
    let phi = phi.build(&alg)?;
    let triple = match triple {
        Some(t) => t.build(&alg)?,
        None => solve(&phi, solver)?,
    };
    let result = iso.transport(&phi, &triple)?;
    Ok(Report::new(operation, "transported", ctx.tol)
        .witness("target", IsotopeSpec::of(&result.target, spec.algebra.clone()))
        .witness("triple", TripleSpec::of(&result.triple, spec.algebra.clone()))
        .residual("transport", result.residual)
        .residual("triality", result.triple.residual)
        .seed(solver.seed))
}

fn similitude<S: Scalar>(ctx: &Context, operation: &str, spec: &MapSpec, r: &AlgebraRef) -> CliResult<Report> {
    let alg = ctx.build::<S>(r)?;
    let phi = spec.build(&alg)?;
    match similitude_check(&phi) {
        Ok(cert) => Ok(Report::new(operation, "similitude", ctx.tol)
            .witness("multiplier", cert.multiplier.to_string())
            .witness("proper", cert.proper)
            .residual("similitude", cert.residual)),
        Err(Error::Singular) => Ok(Report::new(operation, "not-similitude", ctx.tol).reason("map is singular")),
        Err(e) => Err(e.into()),
    }
}

fn triality(ctx: &Context, operation: &str, cmd: TrialityCmd) -> CliResult<Report> {
    match cmd {
        TrialityCmd::Solve { input, solver } => {
            let (spec, r) = load_map_spec(ctx, &input)?;
            on_backend!(ctx.resolve(&r)?.backend, triality_solve(ctx, operation, &spec, &r, &solver))
        }
        TrialityCmd::Verify { triple } => {
            let t: TripleSpec = read_json(&triple)?;
            on_backend!(ctx.resolve(&t.algebra)?.backend, triality_verify(ctx, operation, &t))
        }
        TrialityCmd::Align { triple, other } => {
            let t1: TripleSpec = read_json(&triple)?;
            let t2: TripleSpec = read_json(&other)?;
            same_algebra(ctx, &t1.algebra, &t2.algebra)?;
            on_backend!(ctx.resolve(&t1.algebra)?.backend, triality_align_cmd(ctx, operation, &t1, &t2))
        }
    }
}

fn triality_solve<S: Scalar>(
    ctx: &Context,
    operation: &str,
    spec: &MapSpec,
    r: &AlgebraRef,
    solver: &SolverArgs,
) -> CliResult<Report> {
    let alg = ctx.build::<S>(r)?;
    let t = solve(&spec.build(&alg)?, solver)?;
    Ok(Report::new(operation, "solved", ctx.tol)
        .witness("triple", TripleSpec::of(&t, r.clone()))
        .residual("triality", t.residual)
        .seed(solver.seed))
}

fn triality_verify<S: Scalar>(ctx: &Context, operation: &str, spec: &TripleSpec) -> CliResult<Report> {
    let alg = ctx.build::<S>(&spec.algebra)?;
    let t = spec.build(&alg)?;
    let valid = match S::BACKEND {
        Backend::Exact => t.residual == 0.0,
        Backend::Approx => t.residual < ctx.tol.residual,
    };
    Ok(Report::new(operation, if valid { "valid" } else { "invalid" }, ctx.tol).residual("triality", t.residual))
}

fn triality_align_cmd<S: Scalar>(
    ctx: &Context,
    operation: &str,
    t1: &TripleSpec,
    t2: &TripleSpec,
) -> CliResult<Report> {
    let alg = ctx.build::<S>(&t1.algebra)?;
    let w = triality_align(&t1.build(&alg)?, &t2.build(&alg)?)?;
    Ok(Report::new(operation, "related", ctx.tol).witness("w", ElementSpec::of(&w, t1.algebra.clone())))
}

fn approx_map(ctx: &Context, input: &MapInput) -> CliResult<(LinMap<f64>, AlgebraRef)> {
    let (spec, r) = load_map_spec(ctx, input)?;
    require_approx(ctx.resolve(&r)?.backend)?;
    let alg = ctx.build::<f64>(&r)?;
    Ok((spec.build(&alg)?, r))
}

fn polar(ctx: &Context, operation: &str, input: &MapInput) -> CliResult<Report> {
    let (alpha, _) = approx_map(ctx, input)?;
    let f = polar_decompose(&alpha)?;
    let residual = f.recompose().distance(&alpha) / alpha.matrix().max_abs().max(f64::MIN_POSITIVE);
    Ok(Report::new(operation, "computed", ctx.tol)
        .witness("rotation", map(&f.rotation))
        .witness("positive", map(&f.positive))
        .witness("reflection", f.reflection)
        .residual("recompose", residual))
}

fn so4(ctx: &Context, operation: &str, input: &MapInput) -> CliResult<Report> {
    let (zeta, r) = approx_map(ctx, input)?;
    let (p, q) = so4_factor(&zeta)?;
    let residual = (&LinMap::left(&p) * &LinMap::right(&q)).distance(&zeta);
    Ok(Report::new(operation, "factored", ctx.tol)
        .witness("p", ElementSpec::of(&p, r.clone()))
        .witness("q", ElementSpec::of(&q, r))
        .residual("factor", residual))
}

fn quat_form(ctx: &Context, spec: &IsotopeSpec) -> CliResult<isotopy::triality::QuatCanonicalForm> {
    require_approx(ctx.resolve(&spec.algebra)?.backend)?;
    let alg = ctx.build::<f64>(&spec.algebra)?;
    Ok(quaternion_canonical(&spec.build(&alg)?)?)
}

fn classify(ctx: &Context, operation: &str, cmd: ClassifyCmd) -> CliResult<Report> {
    match cmd {
        ClassifyCmd::Quaternion { isotope } => {
            let spec: IsotopeSpec = read_json(&isotope)?;
            let form = quat_form(ctx, &spec)?;
            let again = quaternion_canonical(&form.rebuild()?)?;
            let residual = match quat_iso_test(&form, &again) {
                IsoVerdict::Isomorphic { residual, .. } | IsoVerdict::Inconclusive { residual, .. } => residual,
                IsoVerdict::NotIsomorphic { .. } => f64::INFINITY,
            };
            Ok(Report::new(operation, "classified", ctx.tol)
                .witness("class", [form.class.0, form.class.1])
                .witness("form", QuatFormSpec::of(&form, spec.algebra.clone()))
                .witness("ellipsoids", ellipsoid_report(&form)?)
                .residual("canonical", residual))
        }
        ClassifyCmd::Composition { isotope } => {
            let spec: IsotopeSpec = read_json(&isotope)?;
            on_backend!(ctx.resolve(&spec.algebra)?.backend, classify_composition(ctx, operation, &spec))
        }
    }
}

fn classify_composition<S: Scalar>(ctx: &Context, operation: &str, spec: &IsotopeSpec) -> CliResult<Report> {
    let alg = ctx.build::<S>(&spec.algebra)?;
    let form = comp_canonical(&spec.build(&alg)?)?;
    Ok(Report::new(operation, "classified", ctx.tol)
        .witness("class", [form.class.0, form.class.1])
        .witness("form", CompFormSpec::of(&form, spec.algebra.clone())))
}

/// An `iso-test` operand: an isotope or one of the two form kinds.
enum Operand {
    Isotope(IsotopeSpec),
    Quat(QuatFormSpec),
    Comp(CompFormSpec),
}

impl Operand {
    fn load(path: &Path) -> CliResult<Self> {
        let value: Value = read_json(path)?;
        let parse = |v: Value| -> CliResult<Operand> {
            let bad = |e: serde_json::Error| CliError::Input(format!("{}: {e}", path.display()));
            if v.get("delta").is_some() {
                Ok(Operand::Quat(QuatFormSpec::deserialize(v).map_err(bad)?))
            } else if v.get("class").is_some() {
                Ok(Operand::Comp(CompFormSpec::deserialize(v).map_err(bad)?))
            } else {
                Ok(Operand::Isotope(IsotopeSpec::deserialize(v).map_err(bad)?))
            }
        };
        parse(value)
    }

    fn algebra(&self) -> &AlgebraRef {
        match self {
            Operand::Isotope(s) => &s.algebra,
            Operand::Quat(s) => &s.algebra,
            Operand::Comp(s) => &s.algebra,
        }
    }

    fn kind(&self) -> Option<FormKind> {
        match self {
            Operand::Isotope(_) => None,
            Operand::Quat(_) => Some(FormKind::Quaternion),
            Operand::Comp(_) => Some(FormKind::Composition),
        }
    }

    fn quat(&self, ctx: &Context) -> CliResult<isotopy::triality::QuatCanonicalForm> {
        match self {
            Operand::Isotope(s) => quat_form(ctx, s),
            Operand::Quat(s) => Ok(s.build(&ctx.build::<f64>(&s.algebra)?)?),
            Operand::Comp(_) => unreachable!("kinds are checked before canonicalising"),
        }
    }

    fn comp<S: Scalar>(&self, alg: &Algebra<S>) -> CliResult<isotopy::triality::CompCanonicalForm<S>> {
        match self {
            Operand::Isotope(s) => Ok(comp_canonical(&s.build(alg)?)?),
            Operand::Comp(s) => Ok(s.build(alg)?),
            Operand::Quat(_) => unreachable!("kinds are checked before canonicalising"),
        }
    }
}

fn verdict_report<S: Scalar>(ctx: &Context, operation: &str, verdict: IsoVerdict<S>, r: &AlgebraRef) -> Report {
    match verdict {
        IsoVerdict::Isomorphic { witness, residual } => Report::new(operation, "isomorphic", ctx.tol)
            .witness("s", ElementSpec::of(&witness, r.clone()))
            .residual("witness", residual),
        IsoVerdict::Inconclusive { witness, residual } => Report::new(operation, "inconclusive", ctx.tol)
            .witness("s", ElementSpec::of(&witness, r.clone()))
            .residual("witness", residual),
        IsoVerdict::NotIsomorphic { reason } => Report::new(operation, "not-isomorphic", ctx.tol).reason(reason),
    }
}

fn iso_test(ctx: &Context, operation: &str, args: &IsoTestArgs) -> CliResult<Report> {
    let first = Operand::load(&args.first)?;
    let second = Operand::load(&args.second)?;
    same_algebra(ctx, first.algebra(), second.algebra())?;
    let r = first.algebra().clone();
    let backend = ctx.resolve(&r)?.backend;
    let default = if backend == Backend::Approx { FormKind::Quaternion } else { FormKind::Composition };
    let kind = match (first.kind(), second.kind(), args.kind) {
        (Some(a), Some(b), _) if a != b => return Err(CliError::Input("operands are forms of different kinds".into())),
        (Some(k), _, Some(requested)) | (_, Some(k), Some(requested)) if k != requested => {
            return Err(CliError::Input(format!("--kind does not match the {k:?} form given")))
        }
        (Some(k), _, _) | (_, Some(k), _) => k,
        (None, None, requested) => requested.unwrap_or(default),
    };
    match kind {
        FormKind::Quaternion => {
            let verdict = quat_iso_test(&first.quat(ctx)?, &second.quat(ctx)?);
            Ok(verdict_report(ctx, operation, verdict, &r))
        }
        FormKind::Composition => on_backend!(backend, comp_test(ctx, operation, &first, &second, &r)),
    }
}

fn comp_test<S: Scalar>(
    ctx: &Context,
    operation: &str,
    first: &Operand,
    second: &Operand,
    r: &AlgebraRef,
) -> CliResult<Report> {
    let alg = ctx.build::<S>(r)?;
    let verdict = comp_iso_test(&first.comp(&alg)?, &second.comp(&alg)?);
    Ok(verdict_report(ctx, operation, verdict, r))
}

#[derive(Deserialize)]
struct PairsSpec {
    algebra: AlgebraRef,
    first: [Vec<String>; 2],
    second: [Vec<String>; 2],
}

fn pairs(ctx: &Context, operation: &str, args: &PairArgs) -> CliResult<Report> {
    let spec: PairsSpec = read_json(&args.pairs)?;
    on_backend!(ctx.resolve(&spec.algebra)?.backend, pairs_report(ctx, operation, &spec))
}

fn pairs_report<S: Scalar>(ctx: &Context, operation: &str, spec: &PairsSpec) -> CliResult<Report> {
    let alg = ctx.build::<S>(&spec.algebra)?;
    let el = |c: &Vec<String>| -> CliResult<Element<S>> { Ok(alg.element(parse_scalars(c)?)?) };
    let (a, b) = (el(&spec.first[0])?, el(&spec.first[1])?);
    let (a2, b2) = (el(&spec.second[0])?, el(&spec.second[1])?);
    let s = pair_conjugacy((&a, &b), (&a2, &b2))?;
    Ok(Report::new(operation, "conjugate", ctx.tol).witness("s", ElementSpec::of(&s, spec.algebra.clone())))
}

fn oracle(ctx: &Context, operation: &str, args: &OracleArgs) -> CliResult<Report> {
    let property: Property = args.property.parse()?;
    let params = match &args.params {
        Some(p) => parse_scalars::<Rational>(p)?,
        None => standard_params(args.dim)?,
    };
    if 1 << params.len() != args.dim {
        return Err(Error::DimensionMismatch { expected: args.dim, got: 1 << params.len() }.into());
    }
    let report = run_oracle(property, &params, args.trials, args.seed)?;
    Ok(Report::new(operation, if report.passed { "pass" } else { "fail" }, ctx.tol)
        .witness("property", report.property)
        .witness("dim", report.dim)
        .witness("params", &report.params)
        .witness("trials", report.trials)
        .witness("violations", report.violations)
        .witness("first_violation", report.first_violation)
        .seed(args.seed))
}
