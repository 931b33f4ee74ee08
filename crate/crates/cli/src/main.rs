use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mlpit::algebra::{Field, MERSENNE_61};
use mlpit::formula::{parse, Formula, FormulaClass};
use mlpit::hitting::params::{depth3_epsilon, regular_delta_bound, tau};
use mlpit::hitting::{
    depth3_hs, depth4_hs, pit_blackbox, regular_hs, GridBackend, HittingSet, HsConfig, Verdict,
};
use mlpit::lowerbound::{vanishing_multilinear, verify_certificate};
use mlpit::reduce::{reduce_depth3, reduce_depth4, regular_to_depth4, ReductionTrace};
use mlpit::roabp::Roabp;
use mlpit::selftest::{run_criterion, SelftestConfig};

#[derive(Parser, Debug)]
#[command(
    name = "mlpit",
    version,
    about = "Hitting sets and identity tests for multilinear formulas"
)]
struct Cli {
    /// Prime modulus of the field.
    #[arg(long, global = true, default_value_t = MERSENNE_61)]
    modulus: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest point set any step may build.
    #[arg(long, global = true, default_value_t = 1 << 22)]
    max_points: usize,
    /// Largest number of monomials any expansion may reach.
    #[arg(long, global = true, default_value_t = mlpit::formula::DEFAULT_TERM_CAP)]
    max_terms: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassArg {
    D3,
    D4,
    Regular,
}

impl From<ClassArg> for FormulaClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::D3 => FormulaClass::Depth3,
            ClassArg::D4 => FormulaClass::Depth4,
            ClassArg::Regular => FormulaClass::Regular,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a hitting set and write it as a point-set file.
    GenHs(GenHsArgs),
    /// Evaluate a formula on a point set.
    Pit {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        hs: PathBuf,
    },
    /// Run a support reduction (or the regular-to-depth-4 rewrite).
    Reduce(ReduceArgs),
    /// Print the ROABP of a depth-4 formula.
    Roabp {
        #[arg(long)]
        formula: PathBuf,
        /// Reading order as 1-based indices, e.g. `3,1,2`.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Find a nonzero multilinear polynomial vanishing on a point set.
    Lowerbound {
        #[arg(long)]
        hs: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest number of entries in the linear system.
        #[arg(long, default_value_t = mlpit::lowerbound::DEFAULT_MAX_CELLS)]
        max_cells: usize,
    },
    /// Run the acceptance criteria and report one line each.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Smaller corpora for a fast smoke run.
        #[arg(long)]
        quick: bool,
        /// Only these criteria (1 to 10).
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<usize>>,
    },
    /// Time the main constructions.
    Bench {
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
}

#[derive(Args, Debug)]
struct GenHsArgs {
    #[arg(long, value_enum)]
    class: ClassArg,
    #[arg(long)]
    n: usize,
    /// δ for the depth-3 and regular classes.
    #[arg(long)]
    delta: Option<f64>,
    /// Top fan-in bound for depth 4.
    #[arg(long = "M")]
    top_fanin: Option<f64>,
    /// Size bound for depth 4.
    #[arg(long = "S")]
    size: Option<f64>,
    /// Product depth of the regular class.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    q: Option<u64>,
    /// Keep enumerating after the union already equals the full grid.
    #[arg(long)]
    no_saturation: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long)]
    formula: PathBuf,
    #[arg(long, value_enum)]
    class: Option<ClassArg>,
    #[arg(long, conflicts_with = "epsilon")]
    tau: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Constant of the regular rewrite.
    #[arg(long, default_value_t = 5.0)]
    c: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Ctx {
    field: Field,
    max_points: usize,
    max_terms: usize,
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_formula(ctx: &Ctx, path: &Path, class: Option<ClassArg>) -> anyhow::Result<Formula> {
    let mut text = read(path)?;
    if let Some(c) = class {
        text = format!("# class: {}\n{text}", FormulaClass::from(c).tag());
    }
    Ok(parse(ctx.field, &text)?)
}

fn gen_hs(ctx: &Ctx, a: &GenHsArgs) -> anyhow::Result<()> {
    let cfg = HsConfig {
        field: ctx.field,
        backend: Arc::new(GridBackend::new(ctx.max_points)),
        max_points: ctx.max_points,
        saturation_cutoff: !a.no_saturation,
        k: a.k,
        m: a.m,
        q: a.q,
    };
    let h = match a.class {
        ClassArg::D3 => {
            let delta = a
                .delta
                .ok_or_else(|| anyhow!("--delta is required for class d3"))?;
            depth3_hs(&cfg, a.n, delta)?
        }
        ClassArg::D4 => {
            let m = a
                .top_fanin
                .ok_or_else(|| anyhow!("--M is required for class d4"))?;
            let s = a
                .size
                .ok_or_else(|| anyhow!("--S is required for class d4"))?;
            depth4_hs(&cfg, a.n, m, s)?
        }
        ClassArg::Regular => {
            let delta = a.delta.unwrap_or_else(|| regular_delta_bound(a.d));
            regular_hs(&cfg, a.n, a.d, delta)?
        }
    };
    emit(a.out.as_deref(), &h.to_file_string())?;
    if a.out.is_some() {
        eprintln!("{} points on {} variables", h.len(), h.n());
    }
    Ok(())
}

fn pit(ctx: &Ctx, formula: &Path, hs: &Path) -> anyhow::Result<()> {
    let h = HittingSet::parse_file(&read(hs)?)?;
    let ctx = Ctx {
        field: h.field(),
        ..*ctx
    };
    let f = load_formula(&ctx, formula, None)?;
    if f.n() > h.n() {
        bail!(
            "formula uses {} variables but the point set has only {}",
            f.n(),
            h.n()
        );
    }
    let f = f.with_n(h.n())?;
    let out = pit_blackbox(|p| f.eval(p), &h)?;
    match out.verdict {
        Verdict::ZeroOnH => println!("zero-on-H ({} evaluations)", out.evals),
        Verdict::Nonzero { witness, value } => {
            let w: Vec<String> = witness.iter().map(u64::to_string).collect();
            println!(
                "nonzero witness={} value={value} ({} evaluations)",
                w.join(","),
                out.evals
            );
        }
    }
    Ok(())
}

fn commented(trace: &ReductionTrace) -> String {
    trace
        .to_string()
        .lines()
        .map(|l| format!("# {l}\n"))
        .collect()
}

fn reduce(ctx: &Ctx, a: &ReduceArgs) -> anyhow::Result<()> {
    let f = load_formula(ctx, &a.formula, a.class)?;
    let n = f.n();
    let tau_value = match (a.tau, a.epsilon) {
        (Some(t), _) => Some(t),
        (None, Some(e)) => Some(tau(n, e)),
        (None, None) => None,
    };
    let text = match f.class() {
        FormulaClass::Depth3 => {
            let t = tau_value.unwrap_or_else(|| tau(n, depth3_epsilon(0.5)));
            let r = reduce_depth3(f.as_depth3()?, t, ctx.max_terms)?;
            format!("# reduce d3 tau={t}\n{}{}", commented(&r.trace), r.formula)
        }
        FormulaClass::Depth4 => {
            let t =
                tau_value.ok_or_else(|| anyhow!("--tau or --epsilon is required for class d4"))?;
            let t = integer_tau(t)?;
            let r = reduce_depth4(&f.to_depth4()?, t, ctx.max_terms)?;
            format!(
                "# reduce d4 tau={t} simple_size={} initial_delta={}\n{}{}",
                r.simple_size,
                r.initial_delta,
                commented(&r.trace),
                r.formula
            )
        }
        FormulaClass::Regular => {
            let r = regular_to_depth4(f.as_regular()?, a.c, ctx.max_terms)?;
            let mut head = format!(
                "# regular to depth 4 c={} case={} source_size={} log2_top_fanin={} within_bound={}\n",
                a.c,
                r.case.tag(),
                r.source_size,
                r.log2_top_fanin,
                r.fanin_within_bound
            );
            if let mlpit::reduce::ReducedCase::Split { t, alpha } = r.case {
                head.push_str(&format!("# split t={t} alpha={alpha}\n"));
            }
            match tau_value {
                None => format!("{head}{}", r.formula),
                Some(t) => {
                    let t = integer_tau(t)?;
                    let red = reduce_depth4(&r.formula, t, ctx.max_terms)?;
                    format!(
                        "{head}# reduce d4 tau={t}\n{}{}",
                        commented(&red.trace),
                        red.formula
                    )
                }
            }
        }
    };
    emit(a.out.as_deref(), &text)
}

fn integer_tau(t: f64) -> anyhow::Result<usize> {
    if t.is_nan() || t < 1.0 {
        bail!("tau must be at least 1 for depth-4 reductions, got {t}");
    }
    Ok(t.floor() as usize)
}

fn roabp(ctx: &Ctx, formula: &Path, order: Option<&[usize]>) -> anyhow::Result<()> {
    let f = load_formula(ctx, formula, None)?.to_depth4()?;
    let order: Vec<usize> = match order {
        None => (0..f.n()).collect(),
        Some(o) => o
            .iter()
            .map(|&i| {
                i.checked_sub(1)
                    .ok_or_else(|| anyhow!("order indices are 1-based"))
            })
            .collect::<anyhow::Result<_>>()?,
    };
    let p = Roabp::from_sparse_products(&f, &order)?;
    print!("{p}");
    Ok(())
}

fn lowerbound(hs: &Path, out: Option<&Path>, max_cells: usize) -> anyhow::Result<()> {
    let h = HittingSet::parse_file(&read(hs)?)?;
    let f = vanishing_multilinear(&h, max_cells)?;
    let check = verify_certificate(&f, &h);
    if !check.is_pass() {
        bail!("certificate check failed: {check:?}");
    }
    let text = format!(
        "# vanishes on {} points of {} (construction={} p={})\n# n: {}\n{f}\n",
        h.len(),
        hs.display(),
        h.meta.construction,
        h.field().modulus(),
        h.n()
    );
    emit(out, &text)
}

fn selftest(
    ctx: &Ctx,
    seed: u64,
    n_max: usize,
    quick: bool,
    only: Option<&[usize]>,
) -> anyhow::Result<bool> {
    let mut cfg = if quick {
        SelftestConfig::quick(seed)
    } else {
        SelftestConfig::full(seed)
    };
    cfg.n_max = n_max;
    cfg.hs.field = ctx.field;
    cfg.hs.max_points = ctx.max_points;
    cfg.hs.backend = Arc::new(GridBackend::new(ctx.max_points));
    let ids: Vec<usize> = only.map_or_else(|| (1..=10).collect(), <[usize]>::to_vec);
    let mut ok = true;
    for id in ids {
        let r = run_criterion(&cfg, id);
        println!("{r}");
        ok &= r.passed;
    }
    Ok(ok)
}

fn bench(ctx: &Ctx, n: usize) -> anyhow::Result<()> {
    let cfg = HsConfig {
        field: ctx.field,
        backend: Arc::new(GridBackend::new(ctx.max_points)),
        max_points: ctx.max_points,
        ..HsConfig::default()
    };
    let time = |name: &str, f: &mut dyn FnMut() -> anyhow::Result<usize>| -> anyhow::Result<()> {
        let start = Instant::now();
        let size = f()?;
        println!(
            "{name:<28} {size:>8} points  {:>9.3} ms",
            start.elapsed().as_secs_f64() * 1e3
        );
        Ok(())
    };
    let mut h3 = None;
    time("depth3_hs delta=0.5", &mut || {
        let h = depth3_hs(&cfg, n, 0.5)?;
        let len = h.len();
        h3 = Some(h);
        Ok(len)
    })?;
    time("depth4_hs M=2 S=2^n-1", &mut || {
        Ok(depth4_hs(&cfg, n, 2.0, (1u64 << n.min(62)) as f64 - 1.0)?.len())
    })?;
    time("regular_hs d=2", &mut || {
        Ok(regular_hs(&cfg, n, 2, regular_delta_bound(2))?.len())
    })?;
    let h = h3.expect("depth-3 set built above");
    if (h.len() as u128) < (1u128 << n) {
        time("lowerbound on depth3_hs", &mut || {
            let f = vanishing_multilinear(&h, mlpit::lowerbound::DEFAULT_MAX_CELLS)?;
            Ok(f.sparsity())
        })?;
    } else {
        println!("lowerbound on depth3_hs     skipped: |H| = 2^n");
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    if cli.max_points == 0 || cli.max_terms == 0 {
        bail!("budgets must be positive");
    }
    let ctx = Ctx {
        field: Field::new(cli.modulus)?,
        max_points: cli.max_points,
        max_terms: cli.max_terms,
    };
    match &cli.command {
        Command::GenHs(a) => gen_hs(&ctx, a)?,
        Command::Pit { formula, hs } => pit(&ctx, formula, hs)?,
        Command::Reduce(a) => reduce(&ctx, a)?,
        Command::Roabp { formula, order } => roabp(&ctx, formula, order.as_deref())?,
        Command::Lowerbound { hs, out, max_cells } => lowerbound(hs, out.as_deref(), *max_cells)?,
        Command::Selftest {
            seed,
            n_max,
            quick,
            only,
        } => return selftest(&ctx, *seed, *n_max, *quick, only.as_deref()),
        Command::Bench { n } => bench(&ctx, *n)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
