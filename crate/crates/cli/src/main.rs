use std::io::Read;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use quiverss::hn::{coarse_dm_with, hn_filtration_with, CoarseDm, HNFiltration};
use quiverss::io::Instance;
use quiverss::king::{extremal_maximizer, Extreme, KingMaximizer, KingOptions, StrategyRegistry};
use quiverss::ncpit::decide_gl_semistable;
use quiverss::numerics::{ExactMatrix, Subspace};
use quiverss::quiver::{Quiver, Representation, Slope, Subrepresentation, Weight};
use quiverss::rankone::{check_k1_f, check_k2, gale_feasible, submodular_flow_feasible, DvNode, RankOneRep, SubflowInstance};
use quiverss::registry::{DeciderOptions, DeciderRegistry};
use quiverss::semistability::{SsConfig, Verdict};
use quiverss::Error;

const EXIT_DECIDED: u8 = 0;
const EXIT_INFEASIBLE: u8 = 1;
const EXIT_INVALID: u8 = 2;
/// The instance is valid but exceeded a configured limit or hit a numerical failure.
const EXIT_UNDECIDED: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "quiverss", version, about = "Semistability of quiver representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// ε = epsilon_scale / (6N) for the scaling decider.
    #[arg(long, global = true, default_value_t = 1.0)]
    epsilon_scale: f64,
    /// Hard cap on scaling iterations.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_iters: u64,
    /// Constant c in the iteration bound.
    #[arg(long, global = true, default_value_t = 10.0)]
    iter_constant: f64,
    /// Largest digraph for lower-set enumeration.
    #[arg(long, global = true, default_value_t = quiverss::lattice::DEFAULT_LOWERSET_LIMIT)]
    lowerset_limit: usize,
    /// Seed for randomized proposals and Wong sequences.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Decide σ-semistability.
    CheckSs {
        /// Instance file, or `-` for stdin.
        instance: String,
        #[arg(long, default_value = "scaling")]
        decider: String,
        /// Record the left residual after every left normalization.
        #[arg(long)]
        audit: bool,
    },
    /// Minimum or maximum maximizer of W ↦ σ(dimv W).
    KingMax {
        instance: String,
        #[arg(long, conflicts_with = "max")]
        min: bool,
        #[arg(long)]
        max: bool,
        #[arg(long, default_value = "auto")]
        strategy: String,
    },
    /// Harder-Narasimhan filtration for the slope σ/τ.
    Hn {
        instance: String,
        #[arg(long, default_value = "auto")]
        strategy: String,
    },
    /// Coarse Dulmage-Mendelsohn decomposition of a linear matrix.
    CoarseDm {
        instance: String,
        #[arg(long, default_value = "auto")]
        strategy: String,
    },
    /// Conditions (K1), (F), (K2) and submodular-flow feasibility.
    RankOneCheck { instance: String },
    /// Lower-set condition on the support quiver.
    Gale { instance: String },
    /// GL(α)-semistability via trace polynomials (cycles allowed).
    GeneralSs { instance: String },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::WeightInfeasible(_) => EXIT_INFEASIBLE,
            Error::NumericalFailure(_) | Error::LowerSetLimit { .. } | Error::OutOfRange(_) => EXIT_UNDECIDED,
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INVALID, message: message.into() }
}

fn load(path: &str) -> Result<Instance, Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| invalid(format!("reading stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| invalid(format!("reading {path}: {e}")))?
    };
    Ok(Instance::from_json(&text)?)
}

fn need<'a>(w: &'a Option<Weight>, what: &str) -> Result<&'a Weight, Failure> {
    w.as_ref().ok_or_else(|| invalid(format!("instance has no `{what}`")))
}

fn space_json(s: &Subspace) -> Value {
    let b = s.basis();
    let vecs: Vec<Value> = (0..b.cols()).map(|c| Value::from(b.column(c).iter().map(|x| x.to_string()).collect::<Vec<_>>())).collect();
    Value::from(vecs)
}

fn subrep_json(q: &Quiver, w: &Subrepresentation) -> Value {
    let mut dims = Map::new();
    let mut bases = Map::new();
    for i in 0..q.n_vertices() {
        dims.insert(q.vertex_name(i).into(), w.space(i).dim().into());
        bases.insert(q.vertex_name(i).into(), space_json(w.space(i)));
    }
    json!({ "dims": dims, "bases": bases })
}

fn king_json(q: &Quiver, m: &KingMaximizer) -> Value {
    json!({ "value": m.value, "extremal": m.extremal, "method": m.method, "w": subrep_json(q, &m.w) })
}

fn filtration_json(q: &Quiver, f: &HNFiltration) -> Value {
    json!({
        "chain": f.chain.iter().map(|w| subrep_json(q, w)).collect::<Vec<_>>(),
        "slopes": f.slopes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "criticals": f.criticals.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "certified": f.certified,
    })
}

fn dm_json(d: &CoarseDm) -> Value {
    json!({
        "blocks": d.blocks.iter().map(|(r, c)| json!({"rows": r, "cols": c})).collect::<Vec<_>>(),
        "kernel_dim": d.kernel_dim,
        "column_flags": d.column_flags.iter().map(space_json).collect::<Vec<_>>(),
        "row_flags": d.row_flags.iter().map(space_json).collect::<Vec<_>>(),
        "slopes": d.filtration.slopes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "certified": d.filtration.certified,
    })
}

fn king_options(common: &Common, strategy: &str) -> KingOptions {
    KingOptions { strategy: strategy.into(), seed: common.seed, ss: ss_config(common, false), ..KingOptions::default() }
}

fn ss_config(common: &Common, audit: bool) -> SsConfig {
    SsConfig { epsilon_scale: common.epsilon_scale, iter_constant: common.iter_constant, max_iters: common.max_iters, audit }
}

fn infeasible_report(rep: &Representation, sigma: &Weight) -> Option<(u8, Map<String, Value>)> {
    let total = sigma.eval(rep.alpha().as_slice());
    (total != 0).then(|| {
        let mut m = Map::new();
        m.insert("verdict".into(), Verdict::WeightInfeasible.as_str().into());
        m.insert("sigma_alpha".into(), total.into());
        (EXIT_INFEASIBLE, m)
    })
}

fn check_strategy(name: &str) -> Result<(), Failure> {
    if name == "auto" || StrategyRegistry::default().get(name).is_some() {
        return Ok(());
    }
    Err(invalid(format!("unknown strategy `{name}`; available: auto, {}", StrategyRegistry::default().names().join(", "))))
}

fn execute(cmd: &Command, common: &Common) -> Result<(u8, Map<String, Value>), Failure> {
    let mut out = Map::new();
    match cmd {
        Command::CheckSs { instance, decider, audit } => {
            let inst = load(instance)?;
            let sigma = need(&inst.sigma, "sigma")?;
            let reg = DeciderRegistry::default();
            if reg.get(decider).is_none() {
                return Err(invalid(format!("unknown decider `{decider}`; available: {}", reg.names().join(", "))));
            }
            let opts = DeciderOptions {
                ss: ss_config(common, *audit),
                lowerset_limit: common.lowerset_limit,
                king: king_options(common, "auto"),
            };
            let d = reg.decide(decider, &inst.rep, sigma, &opts)?;
            out.insert("verdict".into(), d.verdict.as_str().into());
            out.insert("decider".into(), d.decider.into());
            out.insert("certificate".into(), d.certificate.into());
            if let Some(s) = d.scaling {
                out.insert("iterations".into(), s.iterations.into());
                out.insert("bound".into(), s.bound.into());
                out.insert("epsilon".into(), s.epsilon.into());
                out.insert("final_residual".into(), s.final_residual.into());
                if let Some(r) = s.max_post_left_residual {
                    out.insert("max_post_left_residual".into(), r.into());
                }
            }
            let code = if d.verdict == Verdict::WeightInfeasible { EXIT_INFEASIBLE } else { EXIT_DECIDED };
            Ok((code, out))
        }
        Command::KingMax { instance, min, max, strategy } => {
            check_strategy(strategy)?;
            let inst = load(instance)?;
            let sigma = need(&inst.sigma, "sigma")?;
            if let Some(r) = infeasible_report(&inst.rep, sigma) {
                return Ok(r);
            }
            let which = if *max && !*min { Extreme::Max } else { Extreme::Min };
            let m = extremal_maximizer(&inst.rep, sigma, which, &king_options(common, strategy))?;
            out.insert("extreme".into(), (if which == Extreme::Max { "max" } else { "min" }).into());
            out.insert("verdict".into(), (if m.value == 0 { "semistable" } else { "unstable" }).into());
            out.insert("maximizer".into(), king_json(inst.rep.quiver(), &m));
            Ok((EXIT_DECIDED, out))
        }
        Command::Hn { instance, strategy } => {
            check_strategy(strategy)?;
            let inst = load(instance)?;
            let slope = Slope::new(need(&inst.sigma, "sigma")?.clone(), need(&inst.tau, "tau")?.clone())?;
            let f = hn_filtration_with(&inst.rep, &slope, &king_options(common, strategy))?;
            out.insert("verdict".into(), (if f.slopes.len() <= 1 { "semistable" } else { "unstable" }).into());
            out.insert("filtration".into(), filtration_json(inst.rep.quiver(), &f));
            Ok((EXIT_DECIDED, out))
        }
        Command::CoarseDm { instance, strategy } => {
            check_strategy(strategy)?;
            let inst = load(instance)?;
            let mats: Vec<ExactMatrix> = match &inst.pencil {
                Some(p) => p.clone(),
                None => inst.rep.matrices().to_vec(),
            };
            if inst.pencil.is_none() {
                let q = inst.rep.quiver();
                let same = q.arcs().windows(2).all(|w| (w[0].tail, w[0].head) == (w[1].tail, w[1].head));
                if !same {
                    return Err(invalid("coarse-dm needs a `pencil` field or a generalized Kronecker quiver"));
                }
            }
            let d = coarse_dm_with(&mats, &king_options(common, strategy))?;
            out.insert("n_blocks".into(), d.blocks.len().into());
            out.insert("decomposition".into(), dm_json(&d));
            Ok((EXIT_DECIDED, out))
        }
        Command::RankOneCheck { instance } => {
            let inst = load(instance)?;
            let sigma = need(&inst.sigma, "sigma")?;
            let r1 = RankOneRep::from_support(&inst.rep)?;
            let kf = check_k1_f(&r1, sigma)?;
            let k2 = check_k2(&r1, sigma, common.lowerset_limit)?;
            let (flow, flow_witness) = submodular_flow_feasible(&SubflowInstance::from_rank_one(&r1, sigma)?, common.lowerset_limit)?;
            let ss = kf.k1 && kf.f && k2.holds;
            let q = r1.base().quiver();
            let witness = k2.witness.map(|w| {
                w.iter()
                    .map(|n| match n {
                        DvNode::F(a) => format!("F({})", q.arc(*a).id),
                        DvNode::V(a) => format!("V({})", q.arc(*a).id),
                    })
                    .collect::<Vec<_>>()
            });
            out.insert("verdict".into(), (if ss { "semistable" } else { "unstable" }).into());
            out.insert("k1".into(), kf.k1.into());
            out.insert("f".into(), kf.f.into());
            out.insert("k2".into(), k2.holds.into());
            out.insert("k2_min_lhs".into(), k2.min_lhs.into());
            out.insert("sigma_total".into(), kf.sigma_total.into());
            out.insert("k2_witness".into(), witness.into());
            out.insert("submodular_flow_feasible".into(), flow.into());
            out.insert("submodular_flow_witness_size".into(), flow_witness.map(|w| w.len()).into());
            Ok((if kf.k1 { EXIT_DECIDED } else { EXIT_INFEASIBLE }, out))
        }
        Command::Gale { instance } => {
            let inst = load(instance)?;
            let sigma = need(&inst.sigma, "sigma")?;
            let g = gale_feasible(&inst.rep.support_quiver(), sigma)?;
            let q = inst.rep.quiver();
            out.insert("feasible".into(), g.feasible.into());
            out.insert("sigma_total".into(), g.total.into());
            out.insert("max_lower".into(), g.max_lower.into());
            out.insert("witness".into(), g.witness.map(|w| w.iter().map(|&i| q.vertex_name(i).to_string()).collect::<Vec<_>>()).into());
            if inst.rep.alpha().as_slice().iter().all(|&d| d == 1) {
                out.insert("verdict".into(), (if g.feasible { "semistable" } else { "unstable" }).into());
            }
            Ok((if g.total != 0 { EXIT_INFEASIBLE } else { EXIT_DECIDED }, out))
        }
        Command::GeneralSs { instance } => {
            let inst = load(instance)?;
            let ss = decide_gl_semistable(&inst.rep)?;
            out.insert("verdict".into(), (if ss { "semistable" } else { "unstable" }).into());
            out.insert("acyclic".into(), inst.rep.quiver().is_acyclic().into());
            Ok((EXIT_DECIDED, out))
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::CheckSs { .. } => "check-ss",
        Command::KingMax { .. } => "king-max",
        Command::Hn { .. } => "hn",
        Command::CoarseDm { .. } => "coarse-dm",
        Command::RankOneCheck { .. } => "rank-one-check",
        Command::Gale { .. } => "gale",
        Command::GeneralSs { .. } => "general-ss",
    }
}

fn render(report: &Map<String, Value>, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serialization"),
        Format::Text => report
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}: {s}"),
                other => format!("{k}: {other}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_DECIDED,
                ErrorKind::InvalidSubcommand | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand | ErrorKind::MissingSubcommand => {
                    EXIT_USAGE
                }
                _ => EXIT_INVALID,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let (code, mut report) = match execute(&cli.command, &cli.common) {
        Ok(r) => r,
        Err(f) => {
            let mut m = Map::new();
            m.insert("error".into(), f.message.into());
            (f.code, m)
        }
    };
    let mut full = Map::new();
    full.insert("command".into(), command_name(&cli.command).into());
    full.insert("exit_code".into(), code.into());
    full.append(&mut report);
    full.insert("tool_version".into(), env!("CARGO_PKG_VERSION").into());
    full.insert("wall_time_ms".into(), (start.elapsed().as_secs_f64() * 1e3).into());
    println!("{}", render(&full, cli.common.format));
    ExitCode::from(code)
}
