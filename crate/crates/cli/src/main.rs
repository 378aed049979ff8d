//! `liecert`: certificates for root subalgebras, their derivations, and
//! their loop algebras and affinizations.
//!
//! Every command prints one JSON certificate on standard output and exits
//! with 0 (verified), 1 (a checked property is violated), 2 (invalid input)
//! or 3 (inconclusive). Diagnostics go to standard error.

mod cache;
mod certificate;
mod input;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use liecert::acceptance::{run_all, run_one};
use liecert::chevalley::{extract_subalgebra, DistinguishedBasis, LieAlgebra, SubalgebraSpec};
use liecert::dercalc::{
    aid_eq_inn_report, aid_falsify_random, aid_membership, centroid_space, derivation_space,
    diagonal_map, AidVerdict, DEFAULT_SEED, DEFAULT_TRIALS,
};
use liecert::exact::MatQ;
use liecert::loopalg::{
    aid_obstruction_check, dij_witness, global_inner_match, DijWitnessOutcome, LoopAlgebra, LoopError,
    LoopOperator, ObstructionVerdict, Window,
};
use liecert::qgraded::{certify, enumerate_minimal, DEFAULT_CAP};
use liecert::rootsys::{Family, RootSystem};

use certificate::{Certificate, Status};

#[derive(Parser, Debug)]
#[command(name = "liecert", version, about = "Exact certificates for minimal Q-graded subalgebras")]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, env = "LIECERT_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Also write the certificate to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Structure-table cache directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "cache")]
    cache: PathBuf,
    /// Build structure tables in memory only.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Degree window `LO:HI` for loop witness searches.
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "LO:HI")]
    window: Option<String>,
    /// Record wall-clock timings in the certificate.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct TypeArgs {
    /// Cartan type letter.
    #[arg(long, default_value = "B")]
    family: Family,
    #[arg(long, default_value_t = 2)]
    rank: usize,
}

#[derive(Args, Debug, Clone)]
struct SubArgs {
    #[command(flatten)]
    ty: TypeArgs,
    /// Ψ as coordinate tuples in the simple-root basis, e.g. "1,0;2,1".
    #[arg(long, default_value = "1,0;2,1")]
    psi: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the roots in canonical order.
    Roots(TypeArgs),
    /// Enumerate all minimal Q-graded subsets Ψ.
    Minimal {
        #[command(flatten)]
        ty: TypeArgs,
        /// Maximum number of subsets to scan.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Closure, lattice span, minimality and metabelian checks for Ψ.
    Certify(SubArgs),
    /// Dimensions of Der(L), Inn(L) and a complement.
    Der(SubArgs),
    /// AID membership of one derivation, or AID = Inn for the whole algebra.
    Aid {
        #[command(flatten)]
        sub: SubArgs,
        /// Diagonal derivation scalars on x_1..x_m, e.g. "1,0".
        #[arg(long, conflicts_with = "matrix")]
        diag: Option<String>,
        /// A derivation as a matrix JSON document in the local basis.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
    /// Basis of the centroid.
    Centroid(SubArgs),
    /// Bracket two loop elements.
    AffineBracket {
        #[command(flatten)]
        sub: SubArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Use the loop algebra (no central term).
        #[arg(long = "loop")]
        loop_only: bool,
    },
    /// Find Y with D_ij(X) = [X, Y].
    DijWitness {
        #[command(flatten)]
        sub: SubArgs,
        /// Torus index, 1-based.
        #[arg(long)]
        i: usize,
        #[arg(long, allow_negative_numbers = true)]
        j: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Decide op(X) ∈ [X, L̃] for a combination of D_ij (and inner) operators.
    AidCheck {
        #[command(flatten)]
        sub: SubArgs,
        /// `i,j[,c]` terms separated by `;` (i 1-based).
        #[arg(long, allow_hyphen_values = true, conflicts_with = "op")]
        dij: Option<String>,
        /// An operator JSON document.
        #[arg(long)]
        op: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Look for one Y matching op on the probe family within the window.
    InnerMatch {
        #[command(flatten)]
        sub: SubArgs,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "op")]
        dij: Option<String>,
        #[arg(long)]
        op: Option<String>,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run a single criterion (1-10).
        #[arg(long)]
        only: Option<usize>,
    },
}

/// An input error: reported with exit code 2.
#[derive(Debug)]
struct BadInput(anyhow::Error);

impl std::fmt::Display for BadInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for BadInput {}

fn bad<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| anyhow::Error::new(BadInput(e)))
}

struct Ctx {
    seed: u64,
    cache: Option<PathBuf>,
    window: Option<Window>,
    timings: Option<BTreeMap<String, f64>>,
}

impl Ctx {
    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if let Some(t) = self.timings.as_mut() {
            t.insert(phase.to_string(), start.elapsed().as_secs_f64());
        }
        out
    }

    fn system(&self, ty: &TypeArgs) -> Result<Arc<RootSystem>> {
        bad(RootSystem::build(ty.family, ty.rank).map(Arc::new).map_err(Into::into))
    }

    fn algebra(&mut self, rs: &RootSystem) -> LieAlgebra {
        let dir = self.cache.clone();
        self.time("structure", || cache::load_or_build(dir.as_deref(), rs))
    }

    fn subalgebra(&mut self, sub: &SubArgs) -> Result<(SubalgebraSpec, LieAlgebra, LieAlgebra, DistinguishedBasis)> {
        let rs = self.system(&sub.ty)?;
        let coords = bad(input::parse_psi(&sub.psi, rs.rank()))?;
        let spec = bad(SubalgebraSpec::from_coords(rs.clone(), &coords).map_err(Into::into))?;
        let g = self.algebra(&rs);
        let (l, basis) = bad(extract_subalgebra(&g, &spec).map_err(Into::into))?;
        Ok((spec, g, l, basis))
    }

    fn loop_algebra(&mut self, sub: &SubArgs, central: bool) -> Result<LoopAlgebra> {
        let (_, _, l, basis) = self.subalgebra(sub)?;
        let alg = if central {
            LoopAlgebra::affinization(l, basis)
        } else {
            LoopAlgebra::loop_algebra(l, basis)
        };
        bad(alg.map_err(Into::into))
    }
}

fn sub_inputs(sub: &SubArgs) -> serde_json::Value {
    json!({"family": sub.ty.family, "rank": sub.ty.rank, "psi": sub.psi})
}

fn parse_operator(dij: &Option<String>, op: &Option<String>, rank: usize) -> Result<LoopOperator> {
    match (dij, op) {
        (Some(d), _) => bad(input::parse_dij_combination(d, rank)),
        (None, Some(o)) => bad(serde_json::from_str(o).context("bad operator JSON")),
        (None, None) => bad(Err(anyhow!("give --dij or --op"))),
    }
}

fn loop_err(e: LoopError) -> anyhow::Error {
    anyhow::Error::new(BadInput(e.into()))
}

fn run(cli: Cli) -> Result<Certificate> {
    let mut ctx = Ctx {
        seed: cli.seed,
        cache: (!cli.no_cache).then(|| cli.cache.clone()),
        window: cli.window.as_deref().map(input::parse_window).transpose().map_err(|e| anyhow::Error::new(BadInput(e)))?,
        timings: cli.timings.then(BTreeMap::new),
    };
    let seed = ctx.seed;
    let mut cert = match &cli.command {
        Command::Roots(ty) => {
            let rs = ctx.system(ty)?;
            let mut c = Certificate::new("roots", json!({"family": ty.family, "rank": ty.rank}), seed);
            c.verdict("name", &rs.name());
            c.verdict("count", &rs.len());
            c.verdict("cartan", &rs.cartan());
            c.verdict("roots", &rs.roots());
            c
        }
        Command::Minimal { ty, cap } => {
            let rs = ctx.system(ty)?;
            let mut c = Certificate::new("minimal", json!({"family": ty.family, "rank": ty.rank, "cap": cap}), seed);
            let found = ctx.time("enumerate", || enumerate_minimal(&rs, *cap));
            let specs = bad(found.map_err(Into::into))?;
            let sets: Vec<Vec<Vec<i64>>> = specs.iter().map(|s| s.coords()).collect();
            c.verdict("count", &sets.len());
            c.verdict("psi_sets", &sets);
            c
        }
        Command::Certify(sub) => {
            let (spec, g, _, _) = ctx.subalgebra(sub)?;
            let mut c = Certificate::new("certify", sub_inputs(sub), seed);
            let q = ctx.time("certify", || certify(&g, &spec)).map_err(|e| anyhow::Error::new(BadInput(e.into())))?;
            c.verdict("closed", &q.closed);
            c.verdict("spans_q", &q.spans_q);
            c.verdict("minimal", &q.minimal);
            c.verdict("metabelian", &q.metabelian);
            c.verdict("dims", &q.dims);
            c.verdict("all_positive", &q.all_positive());
            if !q.all_positive() {
                c.status = Status::Violated;
            }
            c
        }
        Command::Der(sub) => {
            let (_, _, l, _) = ctx.subalgebra(sub)?;
            let mut c = Certificate::new("der", sub_inputs(sub), seed);
            let ders = ctx.time("derivations", || derivation_space(&l));
            c.verdict("dim", &l.dim());
            c.verdict("dim_der", &ders.dim_der());
            c.verdict("dim_inn", &ders.dim_inn());
            c.verdict("dim_complement", &ders.complement_basis.len());
            c.verdict("dim_center", &l.center_dim());
            c.verdict("complement_basis", &ders.complement_basis);
            c
        }
        Command::Aid { sub, diag, matrix, trials } => {
            let (_, _, l, basis) = ctx.subalgebra(sub)?;
            let mut inputs = sub_inputs(sub);
            inputs["diag"] = json!(diag);
            inputs["matrix"] = json!(matrix);
            inputs["trials"] = json!(trials);
            let mut c = Certificate::new("aid", inputs, seed);
            let d = match (diag, matrix) {
                (Some(s), _) => {
                    let a = bad(input::parse_rats(s))?;
                    if a.len() != basis.num_roots() {
                        return bad(Err(anyhow!("--diag needs {} scalars", basis.num_roots())));
                    }
                    Some(diagonal_map(&basis, &a))
                }
                (None, Some(m)) => {
                    let m: MatQ = bad(serde_json::from_str(m).context("bad matrix JSON"))?;
                    Some(m)
                }
                (None, None) => None,
            };
            match d {
                Some(d) => {
                    let v = ctx
                        .time("aid", || aid_membership(&l, &basis, &d))
                        .map_err(|e| anyhow::Error::new(BadInput(e.into())))?;
                    c.status = match &v {
                        AidVerdict::Inner { .. } => Status::Verified,
                        AidVerdict::NotAid { .. } => {
                            let x = aid_falsify_random(&l, &d, *trials, seed);
                            c.verdict("random_falsification", &x);
                            Status::Violated
                        }
                        AidVerdict::NotDerivation { .. } => Status::InvalidInput,
                    };
                    c.verdict("aid", &v);
                }
                None => {
                    let r = ctx
                        .time("aid_eq_inn", || aid_eq_inn_report(&l, &basis, *trials, seed))
                        .map_err(|e| anyhow::Error::new(BadInput(e.into())))?;
                    if !r.positive {
                        c.status = Status::Violated;
                    }
                    c.verdict("aid_eq_inn", &r);
                }
            }
            c
        }
        Command::Centroid(sub) => {
            let (_, _, l, _) = ctx.subalgebra(sub)?;
            let mut c = Certificate::new("centroid", sub_inputs(sub), seed);
            let cent = ctx.time("centroid", || centroid_space(&l));
            let diagonal = cent
                .basis
                .iter()
                .all(|m| (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)].is_zero())));
            c.verdict("dim", &cent.basis.len());
            c.verdict("commutative", &cent.commutative);
            c.verdict("diagonal", &diagonal);
            c.verdict("basis", &cent.basis);
            c
        }
        Command::AffineBracket { sub, x, y, loop_only } => {
            let alg = ctx.loop_algebra(sub, !loop_only)?;
            let (xe, ye) = (bad(input::parse_element(x, &alg))?, bad(input::parse_element(y, &alg))?);
            let mut inputs = sub_inputs(sub);
            inputs["x"] = json!(xe);
            inputs["y"] = json!(ye);
            inputs["loop"] = json!(loop_only);
            let mut c = Certificate::new("affine-bracket", inputs, seed);
            c.verdict("bracket", &alg.bracket(&xe, &ye).map_err(loop_err)?);
            c
        }
        Command::DijWitness { sub, i, j, x } => {
            let alg = ctx.loop_algebra(sub, true)?;
            let xe = bad(input::parse_element(x, &alg))?;
            if *i == 0 || *i > alg.rank() {
                return bad(Err(anyhow!("--i must be in 1..={}", alg.rank())));
            }
            let mut inputs = sub_inputs(sub);
            inputs["i"] = json!(i);
            inputs["j"] = json!(j);
            inputs["x"] = json!(xe);
            inputs["window"] = json!(ctx.window);
            let mut c = Certificate::new("dij-witness", inputs, seed);
            let window = ctx.window;
            let out = ctx.time("witness", || dij_witness(&alg, i - 1, *j, &xe, window));
            let out = match out {
                Err(LoopError::ZeroDegree) => {
                    return bad(Err(anyhow!("j = 0 has no witness of this shape; run aid-check instead")))
                }
                other => other.map_err(loop_err)?,
            };
            if matches!(out, DijWitnessOutcome::NoWitnessInWindow { .. }) {
                c.status = Status::Inconclusive;
            }
            c.verdict("witness", &out);
            c
        }
        Command::AidCheck { sub, dij, op, x } => {
            let alg = ctx.loop_algebra(sub, true)?;
            let op = parse_operator(dij, op, alg.rank())?;
            let xe = bad(input::parse_element(x, &alg))?;
            let mut inputs = sub_inputs(sub);
            inputs["op"] = json!(op);
            inputs["x"] = json!(xe);
            inputs["window"] = json!(ctx.window);
            let mut c = Certificate::new("aid-check", inputs, seed);
            let window = ctx.window;
            let v = ctx
                .time("check", || aid_obstruction_check(&alg, &op, &xe, window))
                .map_err(loop_err)?;
            c.status = match &v {
                ObstructionVerdict::Witnessed { .. } => Status::Verified,
                ObstructionVerdict::CentralObstruction => {
                    if has_zero_degree_dij(&op) {
                        c.verdict(
                            "discrepancy",
                            &"D_i0 is a derivation with no witness at h_i⊗1; the AID claim for all j ∈ Z fails at j = 0",
                        );
                    }
                    Status::Violated
                }
                ObstructionVerdict::NoWitnessInWindow { .. } => Status::Inconclusive,
            };
            c.verdict("aid_check", &v);
            c
        }
        Command::InnerMatch { sub, dij, op } => {
            let alg = ctx.loop_algebra(sub, true)?;
            let op = parse_operator(dij, op, alg.rank())?;
            let window = ctx.window.unwrap_or(Window::new(-4, 4));
            let mut inputs = sub_inputs(sub);
            inputs["op"] = json!(op);
            inputs["window"] = json!(window);
            let mut c = Certificate::new("inner-match", inputs, seed);
            let m = ctx
                .time("match", || global_inner_match(&alg, &op, window))
                .map_err(loop_err)?;
            if m.y.is_none() {
                c.status = Status::Inconclusive;
                c.verdict("label", &"inconclusive_negative");
            }
            c.verdict("inner_match", &m);
            c
        }
        Command::Selftest { only } => {
            let mut c = Certificate::new("selftest", json!({"only": only}), seed);
            let outcomes = match only {
                Some(id) => vec![bad(run_one(*id, seed).ok_or_else(|| anyhow!("criteria are numbered 1-10")))?],
                None => run_all(seed),
            };
            for o in &outcomes {
                eprintln!("{}", o.line());
                if let Some(t) = ctx.timings.as_mut() {
                    t.insert(format!("criterion_{}", o.id), o.elapsed.as_secs_f64());
                }
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            if passed != outcomes.len() {
                c.status = Status::Violated;
            }
            c.verdict("criteria", &outcomes);
            c.verdict("passed", &passed);
            c.verdict("total", &outcomes.len());
            c
        }
    };
    cert.timings = ctx.timings.take();
    Ok(cert)
}

fn has_zero_degree_dij(op: &LoopOperator) -> bool {
    match op {
        LoopOperator::Dij { j, .. } => *j == 0,
        LoopOperator::Sum { terms } => terms.iter().any(|(_, t)| has_zero_degree_dij(t)),
        _ => false,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_path = cli.json.clone();
    match run(cli) {
        Ok(cert) => {
            let text = cert.to_json();
            print!("{text}");
            if let Some(path) = json_path {
                if let Err(e) = std::fs::write(&path, &text) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(cert.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.downcast_ref::<BadInput>().is_some() { 2 } else { 1 };
            ExitCode::from(code)
        }
    }
}
