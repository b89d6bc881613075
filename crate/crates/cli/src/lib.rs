//! Front end for the `cone-auglag` binary. [`run`] parses arguments, merges the JSON config
//! with the flags, runs one analysis and writes `<out>/<stem>.{json,csv}`.
//!
//! Exit codes: 0 success, 1 a Fail/Mismatch verdict, 2 usage or configuration error.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cone_auglag::analysis::{
    alternance_check, dual_value, kkt_residual, local_saddle_check, sublevel_probe, AlternanceReport, KktOptions,
    KktResidual, ProbeReport, ProbeVerdict,
};
use cone_auglag::aug_lagrangians::{family_ids, make_family, MultiplierCone, PhiFamily};
use cone_auglag::axioms::{check_all, Verdict};
use cone_auglag::catalog;
use cone_auglag::cones::{BlockVector, ConeSpec};
use cone_auglag::exact_al::{exact_sublevel_probe, Construction, ExactAlInstance};
use cone_auglag::problems::Problem;
use cone_auglag::solvers::{alm_solve, exact_al_solve, SolveStatus, SolverReport};

use config::RunConfig;
use report::{num, nums, Envelope, Table};

#[derive(Parser, Debug)]
#[command(name = "cone-auglag", version, about = "Augmented Lagrangians for cone constrained problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON run configuration; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Falls back to the config file, then CONE_AUGLAG_SEED
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report directory [default: reports]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Point {
    /// Comma separated; defaults to the catalog reference
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<f64>>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Audit a family against the axiom list
    Axioms {
        #[arg(long)]
        family: Option<String>,
        /// e.g. orthant:2,soc:3; defaults to the family's own cone
        #[arg(long)]
        cone: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Multiplier method on a catalog problem
    Solve {
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        c0: Option<f64>,
        #[arg(long)]
        max_outer: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Joint minimization of an exact augmented Lagrangian
    Exact {
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        construction: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        c0: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Local saddle point check at a primal-dual pair
    Saddle {
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        family: Option<String>,
        /// Penalty list, comma separated
        #[arg(long, value_delimiter = ',')]
        c: Option<Vec<f64>>,
        #[arg(long)]
        radius: Option<f64>,
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        common: Common,
    },
    /// Multistart estimate of the augmented dual function
    Dual {
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_delimiter = ',')]
        c: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Option<Vec<f64>>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sublevel-set probe of an augmented Lagrangian or an exact construction
    Sublevel {
        #[arg(long)]
        problem: Option<String>,
        #[arg(long, conflicts_with = "construction")]
        family: Option<String>,
        #[arg(long)]
        construction: Option<String>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
    /// Alternance search at a point of a minimax problem
    Alternance {
        #[arg(long)]
        problem: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// KKT residual at a primal-dual pair
    Kkt {
        #[arg(long)]
        problem: Option<String>,
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// List catalog problems, families and exact constructions
    Catalog {
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `argv` (program name first) and runs one command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn set<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

fn setv<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn prepare(common: &Common) -> anyhow::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    set(&mut cfg.out, common.out.clone());
    cfg.resolve_seed(common.seed)?;
    Ok(cfg)
}

fn required(v: &Option<String>, flag: &str) -> anyhow::Result<String> {
    v.clone().with_context(|| format!("--{flag} is required (or set \"{flag}\" in the config)"))
}

fn family(cfg: &RunConfig, default: Option<&str>) -> anyhow::Result<PhiFamily> {
    let id = match (&cfg.family, default) {
        (Some(f), _) => f.clone(),
        (None, Some(d)) => d.to_string(),
        (None, None) => bail!("--family is required; known ids: {}", family_ids().join(", ")),
    };
    Ok(make_family(&id, &cfg.family_params)?)
}

fn construction(cfg: &RunConfig) -> anyhow::Result<Construction> {
    let id = required(&cfg.construction, "construction")?;
    Ok(id.parse()?)
}

fn problem(cfg: &RunConfig) -> anyhow::Result<Problem> {
    Ok(catalog::get(&required(&cfg.problem, "problem")?)?)
}

fn reference_x(p: &Problem, cfg: &RunConfig) -> anyhow::Result<Vec<f64>> {
    match (&cfg.x, &p.reference) {
        (Some(x), _) => Ok(x.clone()),
        (None, Some(r)) => Ok(r.x.clone()),
        (None, None) => bail!("{} has no reference point; pass --x", p.name),
    }
}

fn reference_lambda(p: &Problem, cfg: &RunConfig) -> anyhow::Result<BlockVector> {
    let l = match (&cfg.lambda, &p.reference) {
        (Some(l), _) => l.clone(),
        (None, Some(r)) => r.lambda.clone(),
        (None, None) => bail!("{} has no reference multiplier; pass --lambda", p.name),
    };
    Ok(p.multiplier(l)?)
}

/// Kebab-case serde tag of a unit or internally tagged enum value.
fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(serde_json::Value::Object(m)) => m
            .get("verdict")
            .and_then(|t| t.as_str())
            .map(str::to_string)
            .unwrap_or_default(),
        _ => String::new(),
    }
}

fn finish<T: Serialize>(cfg: &RunConfig, command: &str, stem: &str, result: &T, table: &Table) -> anyhow::Result<()> {
    let hash = cfg.hash();
    // the output location stays out of the report so identical runs give identical bytes
    let embedded = RunConfig { out: None, ..cfg.clone() };
    let env = Envelope {
        tool: "cone-auglag",
        version: report::VERSION,
        command,
        seed: cfg.seed.unwrap_or(config::DEFAULT_SEED),
        config_hash: &hash,
        config: &embedded,
        result,
    };
    let (json, csv) = report::emit(&cfg.out_dir(), stem, &env, table)?;
    println!("wrote {} and {}", json.display(), csv.display());
    Ok(())
}

fn execute(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::Axioms { family: f, cone, common } => {
            let mut cfg = prepare(&common)?;
            set(&mut cfg.family, f);
            set(&mut cfg.cone, cone);
            axioms(cfg)
        }
        Command::Solve { problem: p, family: f, c0, max_outer, tol, common } => {
            let mut cfg = prepare(&common)?;
            set(&mut cfg.problem, p);
            set(&mut cfg.family, f);
            setv(&mut cfg.alm.c0, c0);
            setv(&mut cfg.alm.max_outer, max_outer);
            setv(&mut cfg.alm.tol, tol);
            solve(cfg)
        }
        Command::Exact { problem: p, construction: k, alpha, kappa, c0, tol, common } => {
            let mut cfg = prepare(&common)?;
            set(&mut cfg.problem, p);
            set(&mut cfg.construction, k);
            setv(&mut cfg.exact_params.barrier.alpha, alpha);
            setv(&mut cfg.exact_params.barrier.kappa, kappa);
            setv(&mut cfg.exact_solve.c0, c0);
            setv(&mut cfg.exact_solve.tol, tol);
            exact(cfg)
        }
        Command::Saddle { problem: p, family: f, c, radius, point, common } => {
            let mut cfg = prepare(&common)?;
            set(&mut cfg.problem, p);
            set(&mut cfg.family, f);
            setv(&mut cfg.saddle.c_list, c);
            setv(&mut cfg.saddle.radius, radius);
            set(&mut cfg.x, point.x);
            set(&mut cfg.lambda, point.lambda);
            saddle(cfg)
        }
        Command::Dual { problem: p, family: f, c, lambda, tol, common } => {
            let mut cfg = prepare(&common)?;
            set(&mut cfg.problem, p);
            set(&mut cfg.family, f);
            set(&mut cfg.c, c);
            set(&mut cfg.lambda, lambda);
            set(&mut cfg.tol, tol);
            dual(cfg)
        }
        Command::Sublevel { problem: p, family: f, construction: k, c, lambda, common } => {
            let mut cfg = prepare(&common)?;
            set(&mut cfg.problem, p);
            set(&mut cfg.family, f);
            set(&mut cfg.construction, k);
            set(&mut cfg.c, c.map(|c| vec![c]));
            set(&mut cfg.lambda, lambda);
            sublevel(cfg)
        }
        Command::Alternance { problem: p, x, tol, common } => {
            let mut cfg = prepare(&common)?;
            set(&mut cfg.problem, p);
            set(&mut cfg.x, x);
            set(&mut cfg.tol, tol);
            alternance(cfg)
        }
        Command::Kkt { problem: p, point, tol, common } => {
            let mut cfg = prepare(&common)?;
            set(&mut cfg.problem, p);
            set(&mut cfg.x, point.x);
            set(&mut cfg.lambda, point.lambda);
            set(&mut cfg.tol, tol);
            kkt(cfg)
        }
        Command::Catalog { common } => catalog_cmd(prepare(&common)?),
    }
}

fn axioms(mut cfg: RunConfig) -> anyhow::Result<bool> {
    let fam = family(&cfg, None)?;
    let cone: ConeSpec = match &cfg.cone {
        Some(s) => s.parse()?,
        None => fam.default_cone(),
    };
    cfg.cone = Some(cone.to_string());
    let report = check_all(&fam, &cone, &cfg.plan)?;

    let mut table =
        Table::new(&["axiom", "claim", "expectation", "verdict", "comparison", "evaluations", "skipped", "seed"]);
    println!("{fam} on {cone}");
    println!("{:<5} {:<32} {:<10} {:<22} comparison", "axiom", "claim", "expect", "verdict");
    for e in &report.entries {
        let verdict = tag(&e.verdict);
        println!(
            "{:<5} {:<32} {:<10} {:<22} {}",
            e.axiom.to_string(),
            e.claim,
            tag(&e.expectation),
            verdict,
            e.comparison
        );
        if let Verdict::Inconclusive { reason } = &e.verdict {
            println!("      {reason}");
        }
        table.push(vec![
            e.axiom.to_string(),
            e.claim.clone(),
            tag(&e.expectation),
            verdict,
            e.comparison.to_string(),
            e.evaluations.to_string(),
            e.skipped.to_string(),
            e.seed.to_string(),
        ]);
    }
    println!("{} mismatch(es)", report.mismatches);
    finish(&cfg, "axioms", &format!("axioms-{}", fam.id), &report, &table)?;
    Ok(report.mismatches == 0)
}

fn solver_table(r: &SolverReport) -> Table {
    let mut t = Table::new(&[
        "status",
        "f",
        "value",
        "stationarity",
        "feasibility",
        "complementarity",
        "dual_feasibility",
        "kkt_total",
        "eta",
        "outer_iterations",
        "inner_iterations",
        "c_final",
        "x",
        "multiplier",
    ]);
    t.push(vec![
        tag(&r.status),
        num(r.f),
        num(r.value),
        num(r.kkt.stationarity),
        num(r.kkt.feasibility),
        num(r.kkt.complementarity),
        num(r.kkt.dual_feasibility),
        num(r.kkt.total),
        r.eta.map(num).unwrap_or_default(),
        r.outer_iterations.to_string(),
        r.inner_iterations.to_string(),
        r.c_trajectory.last().map(|c| num(*c)).unwrap_or_default(),
        nums(&r.x),
        nums(&r.multiplier),
    ]);
    t
}

fn print_solver(r: &SolverReport) {
    println!("status {}  f {}  kkt {}", tag(&r.status), r.f, r.kkt.total);
    println!("x = {:?}", r.x);
    println!("multiplier = {:?}", r.multiplier);
    for n in &r.notes {
        println!("note: {n}");
    }
}

fn solve(mut cfg: RunConfig) -> anyhow::Result<bool> {
    let p = problem(&cfg)?;
    let fam = family(&cfg, Some("hpr"))?;
    cfg.family = Some(fam.id.clone());
    let r = alm_solve(&p, &fam, &cfg.alm)?;
    print_solver(&r);
    finish(&cfg, "solve", &format!("solve-{}-{}", p.name, fam.id), &r, &solver_table(&r))?;
    Ok(r.status == SolveStatus::Converged)
}

fn exact(mut cfg: RunConfig) -> anyhow::Result<bool> {
    let k = construction(&cfg)?;
    if cfg.problem.is_none() {
        cfg.problem = Some(k.default_problem().to_string());
    }
    let p = problem(&cfg)?;
    let inst = ExactAlInstance::new(&p, k, cfg.exact_params.clone())?;
    let r = exact_al_solve(&inst, &cfg.exact_solve)?;
    print_solver(&r);
    finish(&cfg, "exact", &format!("exact-{}-{}", p.name, k.id()), &r, &solver_table(&r))?;
    Ok(r.status == SolveStatus::Converged)
}

fn saddle(mut cfg: RunConfig) -> anyhow::Result<bool> {
    let p = problem(&cfg)?;
    // a reference multiplier outside K* needs Λ = Y*
    if cfg.family_params.multiplier_cone.is_none()
        && cfg.lambda.is_none()
        && p.reference.as_ref().is_some_and(|r| !r.lambda_in_polar)
    {
        cfg.family_params.multiplier_cone = Some(MultiplierCone::FullDual);
    }
    let fam = family(&cfg, None)?;
    let x = reference_x(&p, &cfg)?;
    let l = reference_lambda(&p, &cfg)?;
    let r = local_saddle_check(&p, &fam, &x, &l, &cfg.saddle)?;

    let mut table = Table::new(&["c", "reference_value", "sup", "sup_margin", "inf", "inf_margin", "divergent", "pass"]);
    for e in &r.entries {
        println!(
            "c = {:<8} value {:<12} sup {:<12} inf {:<12} {}",
            e.c,
            e.reference_value,
            e.sup,
            e.inf,
            if e.pass { "pass" } else { "FAIL" }
        );
        table.push(vec![
            num(e.c),
            num(e.reference_value),
            num(e.sup),
            num(e.sup_margin),
            num(e.inf),
            num(e.inf_margin),
            e.divergent_ray.is_some().to_string(),
            e.pass.to_string(),
        ]);
    }
    finish(&cfg, "saddle", &format!("saddle-{}-{}", p.name, fam.id), &r, &table)?;
    Ok(r.pass)
}

#[derive(Serialize)]
struct DualRow {
    c: f64,
    #[serde(with = "cone_auglag::ext::serde_f64")]
    value: f64,
    argmin: Vec<f64>,
    weak_duality: Option<bool>,
}

#[derive(Serialize)]
struct DualRun {
    problem: String,
    family: String,
    lambda: Vec<f64>,
    f_star: Option<f64>,
    rows: Vec<DualRow>,
}

fn dual(mut cfg: RunConfig) -> anyhow::Result<bool> {
    let p = problem(&cfg)?;
    let fam = family(&cfg, Some("hpr"))?;
    cfg.family = Some(fam.id.clone());
    if cfg.lambda.is_none() {
        // the reference multiplier when admissible, otherwise the origin
        cfg.lambda = Some(match &p.reference {
            Some(r) if r.lambda_in_polar => r.lambda.clone(),
            _ => vec![0.0; p.cone.dim()],
        });
    }
    let cs = cfg.c.get_or_insert_with(|| vec![0.1, 1.0, 10.0, 100.0, 1000.0]).clone();
    let tol = *cfg.tol.get_or_insert(1e-8);
    let l = reference_lambda(&p, &cfg)?;
    let f_star = p.reference.as_ref().map(|r| r.f);

    let mut rows = Vec::new();
    let mut table = Table::new(&["c", "theta", "f_star", "gap", "weak_duality"]);
    for &c in &cs {
        let d = dual_value(&p, &fam, &l, c, &cfg.dual)?;
        let ok = f_star.map(|f| d.value <= f + tol);
        println!("c = {c:<8} theta {}", d.value);
        table.push(vec![
            num(c),
            num(d.value),
            f_star.map(num).unwrap_or_default(),
            f_star.map(|f| num(f - d.value)).unwrap_or_default(),
            ok.map(|b| b.to_string()).unwrap_or_default(),
        ]);
        rows.push(DualRow { c, value: d.value, argmin: d.argmin, weak_duality: ok });
    }
    let pass = rows.iter().all(|r| r.weak_duality != Some(false));
    let run = DualRun { problem: p.name.clone(), family: fam.id.clone(), lambda: l.into_vec(), f_star, rows };
    finish(&cfg, "dual", &format!("dual-{}-{}", p.name, fam.id), &run, &table)?;
    Ok(pass)
}

fn sublevel(mut cfg: RunConfig) -> anyhow::Result<bool> {
    let c = match cfg.c.as_deref() {
        None => {
            cfg.c = Some(vec![1.0]);
            1.0
        }
        Some([c]) => *c,
        Some(_) => bail!("sublevel takes a single penalty value"),
    };
    let (report, label): (ProbeReport, String) = if cfg.construction.is_some() {
        let k = construction(&cfg)?;
        if cfg.problem.is_none() {
            cfg.problem = Some(k.default_problem().to_string());
        }
        let p = problem(&cfg)?;
        let inst = ExactAlInstance::new(&p, k, cfg.exact_params.clone())?;
        (exact_sublevel_probe(&inst, c, &cfg.exact_probe)?, format!("{}-{}", p.name, k.id()))
    } else {
        let p = problem(&cfg)?;
        let fam = family(&cfg, Some("hpr"))?;
        cfg.family = Some(fam.id.clone());
        let l = reference_lambda(&p, &cfg)?;
        (sublevel_probe(&p, &fam, &l, c, &cfg.probe)?, format!("{}-{}", p.name, fam.id))
    };

    let mut table = Table::new(&["radius", "hits"]);
    for (r, h) in &report.hits_per_shell {
        table.push(vec![num(*r), h.to_string()]);
    }
    let pass = match &report.verdict {
        ProbeVerdict::BoundedWithin { radius, hits } => {
            println!("bounded within radius {radius} ({hits} hits)");
            true
        }
        ProbeVerdict::EscapeDetected { witness } => {
            println!(
                "escape: value {} < level {} at radius {} (x = {:?}, lambda = {:?})",
                witness.value, witness.level, witness.radius, witness.x, witness.lambda
            );
            false
        }
        ProbeVerdict::Inconclusive { reason } => {
            println!("inconclusive: {reason}");
            true
        }
    };
    finish(&cfg, "sublevel", &format!("sublevel-{label}"), &report, &table)?;
    Ok(pass)
}

fn alternance(mut cfg: RunConfig) -> anyhow::Result<bool> {
    let p = problem(&cfg)?;
    let x = reference_x(&p, &cfg)?;
    cfg.x = Some(x.clone());
    let tol = *cfg.tol.get_or_insert(1e-9);
    let r: AlternanceReport = alternance_check(&p, &x, None, tol)?;
    let mut table = Table::new(&["index", "vector", "determinant", "sign"]);
    for (i, v) in r.vectors.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            nums(v),
            r.determinants.get(i).map(|d| num(*d)).unwrap_or_default(),
            r.signs.get(i).map(|s| s.to_string()).unwrap_or_default(),
        ]);
    }
    println!("complete alternance: {} (p = {}, signs {:?})", r.found, r.p, r.signs);
    finish(&cfg, "alternance", &format!("alternance-{}", p.name), &r, &table)?;
    Ok(r.found)
}

fn kkt(mut cfg: RunConfig) -> anyhow::Result<bool> {
    let p = problem(&cfg)?;
    let x = reference_x(&p, &cfg)?;
    let l = reference_lambda(&p, &cfg)?;
    let tol = *cfg.tol.get_or_insert(1e-6);
    let opts = KktOptions { weights: p.reference.as_ref().and_then(|r| r.weights.clone()), ..KktOptions::default() };
    let r: KktResidual = kkt_residual(&p, &x, &l, &opts)?;
    let mut table = Table::new(&[
        "stationarity",
        "feasibility",
        "complementarity",
        "dual_feasibility",
        "total",
        "multiplier_outside_polar",
        "heuristic_weights",
    ]);
    table.push(vec![
        num(r.stationarity),
        num(r.feasibility),
        num(r.complementarity),
        num(r.dual_feasibility),
        num(r.total),
        r.multiplier_outside_polar.to_string(),
        r.heuristic_weights.to_string(),
    ]);
    println!(
        "stationarity {}  feasibility {}  complementarity {}  dual {}  total {}",
        r.stationarity, r.feasibility, r.complementarity, r.dual_feasibility, r.total
    );
    finish(&cfg, "kkt", &format!("kkt-{}", p.name), &r, &table)?;
    Ok(r.total <= tol)
}

#[derive(Serialize)]
struct CatalogRun {
    problems: Vec<catalog::CatalogEntry>,
    families: Vec<&'static str>,
    constructions: Vec<&'static str>,
}

fn catalog_cmd(cfg: RunConfig) -> anyhow::Result<bool> {
    let problems = catalog::list();
    let mut table = Table::new(&["name", "dim", "cone", "f_star", "description"]);
    for e in &problems {
        let f = e.reference.as_ref().map(|r| num(r.f)).unwrap_or_default();
        println!("{:<18} {:>3}  {:<22} {:<10} {}", e.name, e.dim, e.cone, f, e.description);
        table.push(vec![e.name.clone(), e.dim.to_string(), e.cone.clone(), f, e.description.clone()]);
    }
    let run = CatalogRun {
        problems,
        families: family_ids().to_vec(),
        constructions: Construction::ALL.iter().map(|k| k.id()).collect(),
    };
    println!("families: {}", run.families.join(", "));
    println!("constructions: {}", run.constructions.join(", "));
    finish(&cfg, "catalog", "catalog", &run, &table)?;
    Ok(true)
}
