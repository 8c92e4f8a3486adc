use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gtflow_core::combinatorics::{enumerate_shsyt, format_rational, Partition};
use gtflow_core::corpus::Corpus;
use gtflow_core::dot::{dual_network_dot, network_dot, poset_dot, reduction_tree_dot};
use gtflow_core::gt::{
    build_g_lambda, enumerate_gt_points, gt_points_lidskii, gt_volume_lidskii, gt_volume_product, gt_volume_shsyt,
    shsyt_to_flow, weyl_dimension,
};
use gtflow_core::subdivision::{canonical_reduction_tree, full_subdivision_check, ExtensionBijection};
use gtflow_core::transform::{build_g_pal, build_skew_flow, skew_gt_points};
use gtflow_core::verify::{run_verify, Bounds, Scope};
use gtflow_core::{DualNetwork, FlowNetwork, MarkedEmbedding};

#[derive(Parser)]
#[command(name = "gtflow", version, about = "Exact counts and volumes for GT, marked order and flow polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A JSON file, or a fixture name looked up in the corpus.
#[derive(Args)]
struct Source {
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GtMethod {
    All,
    Product,
    Tableaux,
    Lidskii,
    Enumerate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountMethod {
    Memo,
    Enumerate,
    Lidskii,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportObject {
    Network,
    Embedding,
    Poset,
    ReductionTree,
    GLambda,
}

#[derive(Subcommand)]
enum Command {
    /// Volume and lattice-point count of GT(λ)
    Gt {
        #[arg(long)]
        lambda: String,
        #[arg(long, value_enum, default_value = "all")]
        method: GtMethod,
        /// also list the patterns
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Number of integer flows of a network
    Kostant {
        #[command(flatten)]
        src: Source,
        /// netflow vector, defaults to the network's own
        #[arg(long, allow_hyphen_values = true)]
        netflow: Option<String>,
        #[arg(long, value_enum, default_value = "memo")]
        method: CountMethod,
        #[command(flatten)]
        out: Output,
    },
    /// Lidskii volume and point counts
    Lidskii {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Flow network of a marked embedding
    Poset2flow {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Skew GT polytope and its flow network
    Skew {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Canonical reduction tree of a network, or paired subdivision of an embedding
    Subdivide {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Shifted tableaux to flows (`--n`), or leaves to linear extensions (an embedding)
    Bijection {
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Run the identity checks; exit status 1 on any failure
    Verify {
        #[arg(long, default_value = "all")]
        scope: String,
        /// e.g. n=3,lmax=3
        #[arg(long, default_value = "")]
        bounds: String,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// DOT export
    Export {
        #[arg(long, value_enum)]
        object: ExportObject,
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn corpus() -> Result<Corpus> {
    match std::env::var_os("GTFLOW_CORPUS") {
        Some(dir) => Ok(Corpus::load(Path::new(&dir))?),
        None => Ok(Corpus::builtin()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(p: &Path) -> Result<T> {
    let text = std::fs::read_to_string(p).with_context(|| format!("{}", p.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}", p.display()))
}

enum Loaded {
    Network(FlowNetwork),
    Embedding(MarkedEmbedding),
}

impl Source {
    fn load(&self) -> Result<Loaded> {
        if let Some(p) = &self.input {
            let v: Value = read_json(p)?;
            return if v.get("faces").is_some() {
                Ok(Loaded::Embedding(serde_json::from_value(v).with_context(|| format!("{}", p.display()))?))
            } else {
                Ok(Loaded::Network(serde_json::from_value(v).with_context(|| format!("{}", p.display()))?))
            };
        }
        let name = self.fixture.as_deref().ok_or_else(|| anyhow!("give --input or --fixture"))?;
        let c = corpus()?;
        if let Some((_, g)) = c.networks.iter().find(|(n, _)| n == name) {
            return Ok(Loaded::Network(g.clone()));
        }
        if let Some((_, e)) = c.embeddings.iter().find(|(n, _)| n == name) {
            return Ok(Loaded::Embedding(e.clone()));
        }
        bail!("no fixture named {name}")
    }

    fn network(&self) -> Result<FlowNetwork> {
        match self.load()? {
            Loaded::Network(g) => Ok(g),
            Loaded::Embedding(_) => bail!("expected a network, got an embedding"),
        }
    }

    fn embedding(&self) -> Result<MarkedEmbedding> {
        match self.load()? {
            Loaded::Embedding(e) => Ok(e),
            Loaded::Network(_) => bail!("expected an embedding, got a network"),
        }
    }
}

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().with_context(|| format!("not an integer: {x}")))
        .collect()
}

fn emit(text: String, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("{}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(v: &Value, out: &Output) -> Result<()> {
    if out.format == Format::Dot {
        bail!("this command has no DOT output");
    }
    emit(serde_json::to_string_pretty(v)? + "\n", &out.out)
}

fn network_json(g: &FlowNetwork) -> Value {
    serde_json::to_value(g).expect("networks serialize")
}

fn dual_json(me: &MarkedEmbedding, dn: &DualNetwork) -> Value {
    let labels: Vec<String> = (0..dn.network.vertex_count()).map(|v| dn.label_name(me.embedding(), v)).collect();
    json!({
        "network": network_json(&dn.network),
        "labels": labels,
        "crossing": dn.crossing,
    })
}

fn gt(lambda: &str, method: GtMethod, list: bool, out: &Output) -> Result<()> {
    let lam = Partition::parse(lambda)?;
    let mut v = json!({ "lambda": lam.parts() });
    let all = method == GtMethod::All;
    if all || method == GtMethod::Product {
        v["volume_product"] = json!(format_rational(&gt_volume_product(&lam)));
        v["points_weyl"] = json!(weyl_dimension(&lam).to_string());
    }
    if all || method == GtMethod::Tableaux {
        v["volume_tableaux"] = json!(format_rational(&gt_volume_shsyt(&lam)?));
    }
    if all || method == GtMethod::Lidskii {
        v["volume_lidskii"] = json!(format_rational(&gt_volume_lidskii(&lam)?));
        v["points_lidskii"] = json!(gt_points_lidskii(&lam)?.to_string());
        let g = build_g_lambda(&lam)?;
        v["points_kostant"] = json!(g.network.kostant(g.network.netflow())?.to_string());
    }
    if all || method == GtMethod::Enumerate || list {
        let pts = enumerate_gt_points(&lam);
        v["points_enumerated"] = json!(pts.len().to_string());
        if list {
            v["patterns"] = serde_json::to_value(&pts)?;
        }
    }
    emit_json(&v, out)
}

fn kostant(src: &Source, netflow: Option<&str>, method: CountMethod, out: &Output) -> Result<()> {
    let g = src.network()?;
    let b = match netflow {
        Some(s) => parse_ints(s)?,
        None => g.netflow().to_vec(),
    };
    let count = match method {
        CountMethod::Memo => g.kostant(&b)?.to_string(),
        CountMethod::Enumerate => g.enumerate_integer_flows(&b)?.len().to_string(),
        CountMethod::Lidskii => {
            if netflow.is_some() && b != g.netflow() {
                g.with_netflow(b.clone())?.lidskii_points_binomial()?.to_string()
            } else {
                g.lidskii_points_binomial()?.to_string()
            }
        }
    };
    emit_json(&json!({ "netflow": b, "count": count }), out)
}

fn lidskii(src: &Source, out: &Output) -> Result<()> {
    let g = src.network()?;
    emit_json(
        &json!({
            "dimension": g.generic_dimension(),
            "volume": format_rational(&g.lidskii_volume()?),
            "points_binomial": g.lidskii_points_binomial()?.to_string(),
            "points_multiset": g.lidskii_points_multiset()?.to_string(),
        }),
        out,
    )
}

fn poset2flow(src: &Source, out: &Output) -> Result<()> {
    let me = src.embedding()?;
    let dn = build_g_pal(&me)?;
    match out.format {
        Format::Dot => emit(dual_network_dot(me.embedding(), &dn), &out.out),
        Format::Json => emit_json(&dual_json(&me, &dn), out),
    }
}

fn skew(lambda: &str, mu: &str, m: usize, out: &Output) -> Result<()> {
    let (lam, mu) = (Partition::parse(lambda)?, Partition::parse(mu)?);
    let pts = skew_gt_points(&lam, &mu, m)?;
    let dn = build_skew_flow(&lam, &mu, m)?;
    match out.format {
        Format::Dot => emit(network_dot(&dn.network, None), &out.out),
        Format::Json => emit_json(
            &json!({
                "points": pts.len().to_string(),
                "kostant": dn.network.kostant(dn.network.netflow())?.to_string(),
                "network": network_json(&dn.network),
            }),
            out,
        ),
    }
}

fn subdivide(src: &Source, out: &Output) -> Result<()> {
    match src.load()? {
        Loaded::Network(g) => {
            let t = canonical_reduction_tree(&g)?;
            if out.format == Format::Dot {
                return emit(reduction_tree_dot(&t), &out.out);
            }
            emit_json(
                &json!({
                    "nodes": t.nodes.len(),
                    "leaves": t.leaves().len(),
                    "level_sizes": t.level_sizes(),
                    "leaf_volume_sum": format_rational(&t.leaf_volume_sum()?),
                    "volume": format_rational(&g.lidskii_volume()?),
                }),
                out,
            )
        }
        Loaded::Embedding(me) => emit_json(&serde_json::to_value(full_subdivision_check(&me, None)?)?, out),
    }
}

fn bijection(n: Option<usize>, src: &Source, out: &Output) -> Result<()> {
    let v = match n {
        Some(n) => {
            let mut rows = Vec::new();
            for t in enumerate_shsyt(n) {
                let (_, f) = shsyt_to_flow(&t)?;
                rows.push(json!({ "tableau": t.rows(), "diagonal_gaps": t.diagonal_gaps(), "flow": f }));
            }
            Value::Array(rows)
        }
        None => {
            let me = src.embedding()?;
            let bij = ExtensionBijection::new(&me)?;
            let triples = bij.triples()?;
            Value::Array(
                triples
                    .into_iter()
                    .map(|t| json!({ "a": t.a, "flow": t.flow, "leaf": t.leaf, "extension": t.extension }))
                    .collect(),
            )
        }
    };
    emit_json(&v, out)
}

fn verify(scope: &str, bounds: &str, seed: Option<u64>, out: &Output) -> Result<bool> {
    let scope: Scope = scope.parse()?;
    let mut b = Bounds::parse(bounds)?;
    if let Some(s) = seed {
        b.seed = s;
    }
    let rep = run_verify(scope, &b, &corpus()?);
    for n in rep.notes.iter().filter(|n| n.starts_with("warning")) {
        eprintln!("{n}");
    }
    let failed = rep.failures().len();
    eprintln!("{} checks, {} failed", rep.checks.len(), failed);
    emit_json(&serde_json::to_value(&rep)?, out)?;
    Ok(failed == 0)
}

fn export(object: ExportObject, src: &Source, lambda: Option<&str>, out: &Option<PathBuf>) -> Result<()> {
    let text = match object {
        ExportObject::GLambda => {
            let lam = Partition::parse(lambda.ok_or_else(|| anyhow!("--lambda is required"))?)?;
            let g = build_g_lambda(&lam)?;
            let labels: Vec<String> = g.vertices.iter().map(|v| format!("{v:?}")).collect();
            network_dot(&g.network, Some(&labels))
        }
        ExportObject::Network => network_dot(&src.network()?, None),
        ExportObject::ReductionTree => reduction_tree_dot(&canonical_reduction_tree(&src.network()?)?),
        ExportObject::Embedding => {
            let me = src.embedding()?;
            dual_network_dot(me.embedding(), &build_g_pal(&me)?)
        }
        ExportObject::Poset => poset_dot(&src.embedding()?.hat_poset()),
    };
    emit(text, out)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gt { lambda, method, list, out } => gt(&lambda, method, list, &out)?,
        Command::Kostant { src, netflow, method, out } => kostant(&src, netflow.as_deref(), method, &out)?,
        Command::Lidskii { src, out } => lidskii(&src, &out)?,
        Command::Poset2flow { src, out } => poset2flow(&src, &out)?,
        Command::Skew { lambda, mu, m, out } => skew(&lambda, &mu, m, &out)?,
        Command::Subdivide { src, out } => subdivide(&src, &out)?,
        Command::Bijection { n, src, out } => bijection(n, &src, &out)?,
        Command::Verify { scope, bounds, seed, out } => return verify(&scope, &bounds, seed, &out),
        Command::Export { object, src, lambda, out } => export(object, &src, lambda.as_deref(), &out)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
