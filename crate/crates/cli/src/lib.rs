//! Command-line front end. [`run`] parses the arguments, dispatches to the
//! calculators and returns the exit code with the text to print, so the
//! binary and the tests share one code path.
//!
//! Exit codes: 0 on success, 1 for domain errors, 2 for usage errors.
//! Errors are always printed as `{"error":{"kind":..,"message":..}}`.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use virtmor::arnold::{self, cocompose, ArnoldElement};
use virtmor::curves::{compose_framed, compose_unframed, factorization_family_check, FamilyConfig, FramedCurve, StableCurve, INF};
use virtmor::fm_operad::{enumerate, graft, tree_to_curve, PlanarTree};
use virtmor::kn::z_points_to_kn;
use virtmor::logmodel::LogModel;
use virtmor::monoid::{group_completion, is_saturated, AffineMonoid, Saturation};
use virtmor::pab::{braid_eq, compose_vertical, operadic_insert, Braid, PabMorphism};
use virtmor::random::{self, DEFAULT_SEED};
use virtmor::scalar::parse_q;
use virtmor::tangential::{enumerate_cover, p1_three_points, signs, Chart};
use virtmor::{Field, Q};

#[derive(Parser, Debug)]
#[command(name = "virtmor", version, about = "Exact calculators for virtual morphisms, stable curves and their operads")]
struct Cli {
    /// Wrap the result in a JSON envelope.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Read the main payload from a file, or `-` for stdin.
    #[arg(long = "in", global = true, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Worker threads for parallel enumerations.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Planar binary trees.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Stable rational curves with a tangent vector at the root.
    #[command(subcommand)]
    Curve(CurveCmd),
    /// The Arnold algebra of logarithmic forms on configuration space.
    #[command(subcommand)]
    Arnold(ArnoldCmd),
    /// Braids and parenthesized braids.
    #[command(subcommand)]
    Braid(BraidCmd),
    /// Affine monoids.
    #[command(subcommand)]
    Monoid(MonoidCmd),
    /// Integral virtual points and Kato-Nakayama points.
    #[command(subcommand)]
    Points(PointsCmd),
}

#[derive(Subcommand, Debug)]
enum TreeCmd {
    /// Parse a tree and print its canonical form.
    Parse { tree: Option<String> },
    /// Replace the leaf `at` of the left tree by the right tree.
    Graft {
        #[arg(long)]
        left: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        right: String,
    },
    /// All binary trees on the labels, sorted.
    Enumerate {
        /// Comma-separated labels.
        #[arg(long)]
        labels: String,
        /// Also print the curve of each tree.
        #[arg(long)]
        curves: bool,
    },
}

#[derive(Subcommand, Debug)]
enum CurveCmd {
    /// Transport a tangent vector between two special points.
    Transport {
        curve: Option<String>,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Glue the root of the right curve to a marking of the left curve.
    Compose {
        #[arg(long)]
        left: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        right: String,
        /// Inputs and output carry framings at the markings.
        #[arg(long)]
        framed: bool,
    },
    /// Compare the s-tensor of a degenerating family with the nodal fibre.
    FactorCheck {
        /// Outer markings `a=1,b=3`.
        #[arg(long)]
        outer: Option<String>,
        #[arg(long)]
        node: Option<String>,
        /// Inner markings `x=1,y=2`.
        #[arg(long)]
        inner: Option<String>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        c: String,
        /// Check this many random families instead.
        #[arg(long)]
        random: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum ArnoldCmd {
    /// Dimensions of the graded pieces.
    Dim {
        #[arg(long)]
        n: usize,
    },
    /// Rewrite an element in the admissible basis.
    Reduce {
        expr: Option<String>,
        #[arg(long)]
        n: usize,
    },
    /// Cocomposition along the collision of the inner labels.
    Cocompose {
        expr: Option<String>,
        #[arg(long)]
        n: usize,
        /// Comma-separated inner labels.
        #[arg(long)]
        inner: String,
        #[arg(long, default_value = "v")]
        nu: String,
    },
}

#[derive(Subcommand, Debug)]
enum BraidCmd {
    /// Decide equality of two braid words.
    Eq {
        left: String,
        right: String,
        #[arg(long)]
        strands: Option<usize>,
    },
    /// Vertical composite: braid words or parenthesized braids as JSON.
    Compose {
        first: String,
        second: String,
        #[arg(long)]
        strands: Option<usize>,
    },
    /// Insert one parenthesized braid into a strand of another.
    Insert {
        #[arg(long)]
        outer: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        inner: String,
    },
}

#[derive(Subcommand, Debug)]
enum MonoidCmd {
    /// Group completion of the monoid spanned by the generators.
    Gp { generators: Option<String> },
    /// Saturation verdict with certificate or witness.
    Saturated {
        generators: Option<String>,
        #[arg(long, default_value_t = 6)]
        bound: u64,
    },
}

#[derive(Subcommand, Debug)]
enum PointsCmd {
    /// Integral virtual points of P1 with three boundary points and of the log point.
    Enumerate,
    /// Compare integral points with integral Kato-Nakayama points.
    Kn,
}

enum CliError {
    Usage(String),
    Domain(virtmor::Error),
    Io(String),
}

impl From<virtmor::Error> for CliError {
    fn from(e: virtmor::Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Domain(e) => (e.kind(), e.to_string()),
            CliError::Io(m) => ("io", m.clone()),
        };
        json!({ "error": { "kind": kind, "message": message } })
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A command result: the plain text and the JSON form.
struct Output {
    text: String,
    value: Value,
}

impl Output {
    fn new(text: impl Into<String>, value: Value) -> Self {
        Output { text: text.into(), value }
    }
}

struct Ctx {
    seed: u64,
    input: Option<PathBuf>,
    threads: Option<usize>,
}

impl Ctx {
    /// The inline payload, or the `--in` file, or stdin for `--in -`.
    fn payload(&self, inline: Option<String>, what: &str) -> CliResult<String> {
        if let Some(s) = inline {
            return Ok(s);
        }
        match &self.input {
            Some(p) if p.as_os_str() == "-" => {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(e.to_string()))?;
                Ok(s.trim().to_string())
            }
            Some(p) => std::fs::read_to_string(p)
                .map(|s| s.trim().to_string())
                .map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
            None => Err(CliError::Usage(format!("missing {what}: pass it inline or with --in"))),
        }
    }

    fn pool(&self) -> CliResult<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(CliError::Usage("--threads must be positive".into()));
            }
            b = b.num_threads(n);
        }
        b.build().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Run the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => (0, e.to_string()),
                _ => (2, CliError::Usage(e.to_string().trim().to_string()).to_json().to_string()),
            };
        }
    };
    let ctx = Ctx { seed: cli.seed, input: cli.input, threads: cli.threads };
    let (name, result) = dispatch(&ctx, cli.cmd);
    match result {
        Ok(out) if cli.json => (0, json!({ "command": name, "result": out.value }).to_string()),
        Ok(out) => (0, out.text),
        Err(e) => (e.code(), e.to_json().to_string()),
    }
}

fn dispatch(ctx: &Ctx, cmd: Cmd) -> (&'static str, CliResult<Output>) {
    match cmd {
        Cmd::Tree(c) => match c {
            TreeCmd::Parse { tree } => ("tree parse", tree_parse(ctx, tree)),
            TreeCmd::Graft { left, at, right } => ("tree graft", tree_graft(&left, &at, &right)),
            TreeCmd::Enumerate { labels, curves } => ("tree enumerate", tree_enumerate(ctx, &labels, curves)),
        },
        Cmd::Curve(c) => match c {
            CurveCmd::Transport { curve, from, to, lambda } => ("curve transport", curve_transport(ctx, curve, &from, &to, &lambda)),
            CurveCmd::Compose { left, at, right, framed } => ("curve compose", curve_compose(&left, &at, &right, framed)),
            CurveCmd::FactorCheck { outer, node, inner, c, random } => {
                ("curve factor-check", curve_factor_check(ctx, outer, node, inner, &c, random))
            }
        },
        Cmd::Arnold(c) => match c {
            ArnoldCmd::Dim { n } => ("arnold dim", arnold_dim(n)),
            ArnoldCmd::Reduce { expr, n } => ("arnold reduce", arnold_reduce(ctx, expr, n)),
            ArnoldCmd::Cocompose { expr, n, inner, nu } => ("arnold cocompose", arnold_cocompose(ctx, expr, n, &inner, &nu)),
        },
        Cmd::Braid(c) => match c {
            BraidCmd::Eq { left, right, strands } => ("braid eq", braid_equal(&left, &right, strands)),
            BraidCmd::Compose { first, second, strands } => ("braid compose", braid_compose(&first, &second, strands)),
            BraidCmd::Insert { outer, at, inner } => ("braid insert", braid_insert(&outer, &at, &inner)),
        },
        Cmd::Monoid(c) => match c {
            MonoidCmd::Gp { generators } => ("monoid gp", monoid_gp(ctx, generators)),
            MonoidCmd::Saturated { generators, bound } => ("monoid saturated", monoid_saturated(ctx, generators, bound)),
        },
        Cmd::Points(c) => match c {
            PointsCmd::Enumerate => ("points enumerate", points_enumerate()),
            PointsCmd::Kn => ("points kn", points_kn()),
        },
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

fn parse_json<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> CliResult<T> {
    serde_json::from_str(s).map_err(|e| CliError::Domain(virtmor::Error::Parse(format!("{what}: {e}"))))
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

// ---------------------------------------------------------------- trees

fn tree_parse(ctx: &Ctx, tree: Option<String>) -> CliResult<Output> {
    let t = PlanarTree::parse(&ctx.payload(tree, "tree")?)?;
    let r = t.render();
    Ok(Output::new(r.clone(), json!({ "tree": r, "leaves": t.leaf_order(), "binary": t.is_binary() })))
}

fn tree_graft(left: &str, at: &str, right: &str) -> CliResult<Output> {
    let t = graft(&PlanarTree::parse(left)?, at, &PlanarTree::parse(right)?)?;
    Ok(Output::new(t.render(), json!({ "tree": t.render() })))
}

fn tree_enumerate(ctx: &Ctx, labels: &str, curves: bool) -> CliResult<Output> {
    let labels = split_list(labels);
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let trees = enumerate(&refs)?;
    if !curves {
        let r: Vec<String> = trees.iter().map(|t| t.render()).collect();
        return Ok(Output::new(r.join("\n"), json!(r)));
    }
    // par_iter keeps the input order in the collected results
    let rows: Vec<virtmor::Result<(String, StableCurve<Q>)>> =
        ctx.pool()?.install(|| trees.par_iter().map(|t| Ok((t.render(), tree_to_curve(t)?))).collect());
    let mut text = Vec::new();
    let mut values = Vec::new();
    for row in rows {
        let (t, c) = row?;
        let cj = to_json(&c);
        text.push(format!("{t}\t{cj}"));
        values.push(json!({ "tree": t, "curve": cj }));
    }
    Ok(Output::new(text.join("\n"), Value::Array(values)))
}

// ---------------------------------------------------------------- curves

fn curve_transport(ctx: &Ctx, curve: Option<String>, from: &str, to: &str, lambda: &str) -> CliResult<Output> {
    let c: StableCurve<Q> = parse_json(&ctx.payload(curve, "curve")?, "curve")?;
    let lambda = parse_q(lambda)?;
    let scaling = c.transport_scaling(from, to)?;
    let v = scaling.apply(&lambda)?;
    Ok(Output::new(v.to_text(), json!({ "value": v.to_text(), "scaling": to_json(&scaling) })))
}

fn curve_compose(left: &str, at: &str, right: &str, framed: bool) -> CliResult<Output> {
    if framed {
        let l: FramedCurve<Q> = parse_json(left, "left curve")?;
        let r: FramedCurve<Q> = parse_json(right, "right curve")?;
        let c = compose_framed(&l, at, &r)?.canonical();
        let v = to_json(&c);
        return Ok(Output::new(v.to_string(), v));
    }
    let l: StableCurve<Q> = parse_json(left, "left curve")?;
    let r: StableCurve<Q> = parse_json(right, "right curve")?;
    let c = compose_unframed(&l, at, &r)?.canonical();
    let v = to_json(&c);
    Ok(Output::new(v.to_string(), v))
}

fn parse_points(s: &str) -> CliResult<Vec<(String, Q)>> {
    split_list(s)
        .into_iter()
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected label=value, got {kv:?}")))?;
            Ok((k.trim().to_string(), parse_q(v.trim())?))
        })
        .collect()
}

fn curve_factor_check(
    ctx: &Ctx,
    outer: Option<String>,
    node: Option<String>,
    inner: Option<String>,
    c: &str,
    count: Option<usize>,
) -> CliResult<Output> {
    let c = parse_q(c)?;
    let configs: Vec<FamilyConfig> = match (count, outer, node, inner) {
        (Some(n), None, None, None) => {
            let mut r = random::rng(ctx.seed);
            (0..n).map(|_| random::family(&mut r, &["a", "b"], &["x", "y"], c.clone())).collect()
        }
        (None, Some(o), Some(nd), Some(i)) => {
            vec![FamilyConfig { outer: parse_points(&o)?, node: parse_q(&nd)?, inner: parse_points(&i)?, c }]
        }
        _ => return Err(CliError::Usage("pass either --random N or all of --outer, --node and --inner".into())),
    };
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    let mut failures = 0;
    for (k, cfg) in configs.iter().enumerate() {
        let mut pts: Vec<String> = cfg.outer.iter().chain(&cfg.inner).map(|(l, _)| l.clone()).collect();
        pts.push(INF.to_string());
        for p in &pts {
            for q in &pts {
                if p == q {
                    continue;
                }
                let rep = factorization_family_check(cfg, p, q)?;
                if !rep.holds() {
                    failures += 1;
                }
                lines.push(format!(
                    "{k} {p} {q}: order {} leading {} expected order {} expected {} {}",
                    rep.order,
                    rep.leading.to_text(),
                    rep.expected_order,
                    rep.expected.to_text(),
                    if rep.holds() { "ok" } else { "FAIL" }
                ));
                rows.push(json!({
                    "family": k, "from": p, "to": q, "order": rep.order, "leading": rep.leading.to_text(),
                    "expected_order": rep.expected_order, "expected": rep.expected.to_text(), "holds": rep.holds()
                }));
            }
        }
    }
    lines.push(if failures == 0 { "all hold".to_string() } else { format!("{failures} failures") });
    Ok(Output::new(lines.join("\n"), json!({ "checks": rows, "failures": failures })))
}

// ---------------------------------------------------------------- Arnold algebra

fn arnold_dim(n: usize) -> CliResult<Output> {
    if n == 0 {
        return Err(CliError::Domain(virtmor::Error::Invalid("n must be positive".into())));
    }
    let dims: Vec<u64> = (0..n).map(|k| arnold::dimension(n, k)).collect();
    let text: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    Ok(Output::new(text.join(" "), json!(dims)))
}

fn arnold_reduce(ctx: &Ctx, expr: Option<String>, n: usize) -> CliResult<Output> {
    let labels = ArnoldElement::numbered(n);
    let e = ArnoldElement::parse(&labels, &ctx.payload(expr, "expression")?)?;
    Ok(Output::new(e.to_string(), json!({ "labels": labels, "element": e.to_string() })))
}

fn arnold_cocompose(ctx: &Ctx, expr: Option<String>, n: usize, inner: &str, nu: &str) -> CliResult<Output> {
    let labels = ArnoldElement::numbered(n);
    let e = ArnoldElement::parse(&labels, &ctx.payload(expr, "expression")?)?;
    let t = cocompose(&e, &split_list(inner), nu)?;
    Ok(Output::new(t.to_string(), t.to_json()))
}

// ---------------------------------------------------------------- braids

fn braid_equal(left: &str, right: &str, strands: Option<usize>) -> CliResult<Output> {
    let (a, b) = same_strands(left, right, strands)?;
    let eq = braid_eq(&a, &b)?;
    Ok(Output::new(if eq { "equal" } else { "different" }, json!({ "equal": eq })))
}

/// Parse two words on a common number of strands.
fn same_strands(left: &str, right: &str, strands: Option<usize>) -> CliResult<(Braid, Braid)> {
    let n = match strands {
        Some(n) => n,
        None => Braid::parse(left, None)?.strands().max(Braid::parse(right, None)?.strands()),
    };
    Ok((Braid::parse(left, Some(n))?, Braid::parse(right, Some(n))?))
}

fn morphism(s: &str) -> CliResult<PabMorphism> {
    let v: Value = parse_json(s, "parenthesized braid")?;
    Ok(PabMorphism::from_json(&v)?)
}

fn braid_compose(first: &str, second: &str, strands: Option<usize>) -> CliResult<Output> {
    if first.trim_start().starts_with('{') {
        let f = compose_vertical(&morphism(first)?, &morphism(second)?)?;
        let v = f.to_json();
        return Ok(Output::new(v.to_string(), v));
    }
    let (a, b) = same_strands(first, second, strands)?;
    let c = a.then(&b)?;
    Ok(Output::new(c.to_string(), json!({ "strands": c.strands(), "word": c.to_string() })))
}

fn braid_insert(outer: &str, at: &str, inner: &str) -> CliResult<Output> {
    let f = operadic_insert(&morphism(outer)?, at, &morphism(inner)?)?;
    let v = f.to_json();
    Ok(Output::new(v.to_string(), v))
}

// ---------------------------------------------------------------- monoids

fn monoid(ctx: &Ctx, generators: Option<String>) -> CliResult<AffineMonoid> {
    let gens: Vec<Vec<i64>> = parse_json(&ctx.payload(generators, "generators")?, "generators")?;
    let rank = gens.first().map_or(0, |g| g.len());
    Ok(AffineMonoid::new(rank, gens)?)
}

fn monoid_gp(ctx: &Ctx, generators: Option<String>) -> CliResult<Output> {
    let g = group_completion(&monoid(ctx, generators)?);
    Ok(Output::new(g.to_string(), to_json(&g)))
}

fn monoid_saturated(ctx: &Ctx, generators: Option<String>, bound: u64) -> CliResult<Output> {
    Ok(match is_saturated(&monoid(ctx, generators)?, bound) {
        Saturation::Saturated(cert) => {
            Output::new(format!("saturated: {cert}"), json!({ "verdict": "saturated", "certificate": cert }))
        }
        Saturation::NotSaturated { witness, multiple } => Output::new(
            format!("not saturated: {witness:?} is missing but {multiple} times it is present"),
            json!({ "verdict": "not_saturated", "witness": witness, "multiple": multiple }),
        ),
        Saturation::Inconclusive => Output::new("inconclusive", json!({ "verdict": "inconclusive" })),
    })
}

// ---------------------------------------------------------------- points

fn charts() -> Vec<Chart<Q>> {
    let mut c = p1_three_points::<Q>(&signs());
    c.push(Chart { label: "log point".into(), model: LogModel::log_point(), points: vec![vec![Q::from_int(0)]] });
    c
}

fn points_enumerate() -> CliResult<Output> {
    let pts = enumerate_cover(&charts(), &signs())?;
    let mut by_chart: BTreeMap<String, Vec<Value>> = BTreeMap::new();
    let mut text = Vec::new();
    for (chart, vp) in &pts {
        let v = to_json(vp);
        text.push(format!("{chart}\t{v}"));
        by_chart.entry(chart.clone()).or_default().push(v);
    }
    text.push(format!("{} points", pts.len()));
    Ok(Output::new(text.join("\n"), json!({ "count": pts.len(), "charts": by_chart })))
}

fn points_kn() -> CliResult<Output> {
    let reports = z_points_to_kn(&charts())?;
    let mut text = Vec::new();
    let mut rows = Vec::new();
    for r in &reports {
        text.push(format!(
            "{}: {} integral points, {} KN points, {}",
            r.label,
            r.integral_points,
            r.kn_points,
            if r.is_bijection() { "bijective" } else { "not bijective" }
        ));
        rows.push(json!({
            "chart": r.label, "integral_points": r.integral_points, "kn_points": r.kn_points,
            "injective": r.injective, "surjective": r.surjective
        }));
    }
    Ok(Output::new(text.join("\n"), Value::Array(rows)))
}
