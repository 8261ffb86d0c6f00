//! `fpp`: build, verify, count and export the causal circuits for the Fourier promise problem.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpp_core::algorithms::{
    nlogn_bound, nlogn_circuit, nlogn_queries, reference_switch, sim_switch_circuit, sim_switch_queries,
    six_query_n3, sqrt_bound, sqrt_circuit, sqrt_queries, superperm_length, superperm_sim_switch, PhaseProfile,
    Protocol, VerificationReport,
};
use fpp_core::circuit::Circuit;
use fpp_core::densesim::{build_promise_unitaries, run_dense, InitialState};
use fpp_core::perms::{enumerate_valid_labelings, factoradic_labeling, Labeling};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
/// Largest `n` for which a full labeling table is built.
const MAX_TABLE_N: usize = 9;

#[derive(Parser)]
#[command(name = "fpp", version, about = "Exact verifier for causal Fourier promise problem circuits")]
struct Cli {
    /// Worker threads for the x sweep (FPP_THREADS overrides).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Alg {
    Switch,
    SimSwitch,
    Superperm,
    SixQuery,
    Nlogn,
    NlognReduced,
    Sqrt,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a protocol and verify it for the requested y values.
    Run(RunArgs),
    /// Print query counts and upper bounds for n = 2..=n_max.
    Queries {
        #[arg(long, default_value_t = 16)]
        n_max: usize,
    },
    /// Count (and optionally list) the consistent labelings for n = 3.
    Enumerate {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Print every labeling table.
        #[arg(long)]
        list: bool,
    },
    /// Print a circuit in the line-oriented export format.
    Export {
        #[command(flatten)]
        cfg: CircuitArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a circuit on dense promise unitaries (n = 2 or 3) and measure y.
    Dense {
        #[command(flatten)]
        cfg: CircuitArgs,
        #[arg(long, default_value = "all")]
        y: String,
        /// Random initial data states from this seed instead of |0>.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct CircuitArgs {
    #[arg(long, value_enum, default_value_t = Alg::SimSwitch)]
    alg: Alg,
    #[arg(long)]
    n: usize,
    /// factoradic, file:<path> or enumerate-index:<k>.
    #[arg(long, default_value = "factoradic")]
    labeling: String,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    cfg: CircuitArgs,
    /// An integer, `all`, or `sample:<count>`.
    #[arg(long, default_value = "sample:10")]
    y: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn check_compat(alg: Alg, n: usize) -> Result<(), Usage> {
    let ok = match alg {
        Alg::SixQuery => n == 3,
        Alg::Superperm => n == 3 || n == 4,
        Alg::NlognReduced => n == 4 || n == 8,
        _ => n >= 2,
    };
    if !ok {
        return Err(Usage(format!("--alg {} does not support n = {n}", alg_name(alg))));
    }
    if n > MAX_TABLE_N {
        return Err(Usage(format!("n = {n} exceeds the supported maximum {MAX_TABLE_N}")));
    }
    Ok(())
}

fn alg_name(alg: Alg) -> String {
    alg.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn load_labeling(cfg: &str, n: usize) -> Result<Labeling, Usage> {
    if cfg == "factoradic" {
        return Ok(factoradic_labeling(n)?);
    }
    if let Some(path) = cfg.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{path}: {e}")))?;
        let l = Labeling::parse_table_text(path, &text)?;
        if l.n() != n {
            return Err(Usage(format!("{path} labels n = {}, not {n}", l.n())));
        }
        return Ok(l);
    }
    if let Some(k) = cfg.strip_prefix("enumerate-index:") {
        if n != 3 {
            return Err(Usage("enumerate-index labelings exist only for n = 3".into()));
        }
        let k: usize = k.parse().map_err(|_| Usage(format!("bad labeling index {k:?}")))?;
        let mut all = enumerate_valid_labelings(3)?;
        if k >= all.len() {
            return Err(Usage(format!("labeling index {k} out of range 0..{}", all.len())));
        }
        return Ok(all.swap_remove(k));
    }
    Err(Usage(format!("unknown labeling {cfg:?}")))
}

fn build_circuit(alg: Alg, l: &Labeling) -> Result<Circuit, Usage> {
    let n = l.n();
    Ok(match alg {
        Alg::Switch => return Err(Usage("the reference switch is not a circuit".into())),
        Alg::SimSwitch => sim_switch_circuit(l)?,
        Alg::Superperm => superperm_sim_switch(l)?,
        Alg::SixQuery => six_query_n3(l)?,
        Alg::Nlogn => nlogn_circuit(n, false)?,
        Alg::NlognReduced => nlogn_circuit(n, true)?,
        Alg::Sqrt => sqrt_circuit(l)?,
    })
}

fn parse_ys(cfg: &str, size: u64, seed: u64) -> Result<Vec<u64>, Usage> {
    if cfg == "all" {
        return Ok((0..size).collect());
    }
    if let Some(count) = cfg.strip_prefix("sample:") {
        let count: usize = count.parse().map_err(|_| Usage(format!("bad sample count {count:?}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok((0..count).map(|_| rng.gen_range(0..size)).collect());
    }
    let y: u64 = cfg.parse().map_err(|_| Usage(format!("--y must be an integer, all or sample:<count>, got {cfg:?}")))?;
    if y >= size {
        return Err(Usage(format!("y = {y} out of range 0..{size}")));
    }
    Ok(vec![y])
}

#[derive(Serialize)]
struct RunOutput {
    passed: usize,
    total: usize,
    reports: Vec<VerificationReport>,
}

fn emit<T: Serialize>(out: &mut String, value: &T) -> Result<(), Usage> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn cmd_run(args: &RunArgs, format: Format, out: &mut String) -> Result<bool, Usage> {
    let cfg = &args.cfg;
    check_compat(cfg.alg, cfg.n)?;
    let l = load_labeling(&cfg.labeling, cfg.n)?;
    let ys = parse_ys(&args.y, l.size(), args.seed)?;
    let switch;
    let circuit;
    let protocol: &dyn Protocol = if cfg.alg == Alg::Switch {
        switch = reference_switch(&l);
        &switch
    } else {
        circuit = build_circuit(cfg.alg, &l)?;
        &circuit
    };
    let profile = match PhaseProfile::compute(protocol, &l) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("verification failed: {e}");
            return Ok(false);
        }
    };
    let reports = ys.iter().map(|&y| profile.solve(y)).collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().filter(|r| r.passed && r.bounds_hold()).count();
    let total = reports.len();
    if format == Format::Json {
        emit(out, &RunOutput { passed, total, reports })?;
    } else {
        writeln!(out, "protocol {} labeling {} n {} queries {}", protocol.name(), l.name(), l.n(), protocol.query_count())?;
        for b in protocol.bound_checks() {
            writeln!(out, "bound {}: {} {} {} {}", b.name, b.value, b.relation, b.bound, if b.holds { "ok" } else { "VIOLATED" })?;
        }
        for r in &reports {
            let solved = r.solved_y.map_or("none".to_string(), |s| s.to_string());
            writeln!(out, "y={} solved={solved} {}", r.y, if r.passed { "pass" } else { "FAIL" })?;
        }
        writeln!(out, "{passed}/{total} pass")?;
    }
    Ok(passed == total)
}

#[derive(Serialize)]
struct QueryRow {
    n: usize,
    switch: u64,
    sim_switch: u64,
    superperm: Option<u64>,
    six_query: Option<u64>,
    nlogn: u64,
    nlogn_bound: f64,
    sqrt: u64,
    sqrt_bound: f64,
    bounds_hold: bool,
}

fn cmd_queries(n_max: usize, format: Format, out: &mut String) -> Result<bool, Usage> {
    if !(2..=1_000_000).contains(&n_max) {
        return Err(Usage("--n-max must lie in 2..=1000000".into()));
    }
    let rows: Vec<QueryRow> = (2..=n_max)
        .map(|n| {
            let (nl, nb, sq, sb) = (nlogn_queries(n), nlogn_bound(n), sqrt_queries(n), sqrt_bound(n));
            QueryRow {
                n,
                switch: n as u64,
                sim_switch: sim_switch_queries(n),
                superperm: (3..=7).contains(&n).then(|| superperm_length(n)),
                six_query: (n == 3).then_some(6),
                nlogn: nl,
                nlogn_bound: nb,
                sqrt: sq,
                sqrt_bound: sb,
                bounds_hold: nl as f64 <= nb && (sq as f64) < sb,
            }
        })
        .collect();
    let ok = rows.iter().all(|r| r.bounds_hold);
    if format == Format::Json {
        emit(out, &rows)?;
    } else {
        let opt = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        writeln!(out, "{:>8} {:>8} {:>14} {:>9} {:>5} {:>12} {:>14} {:>12} {:>14} ok", "n", "switch", "n^2", "superperm", "six", "nlogn", "nlogn_bound", "sqrt", "sqrt_bound")?;
        for r in &rows {
            writeln!(
                out,
                "{:>8} {:>8} {:>14} {:>9} {:>5} {:>12} {:>14.1} {:>12} {:>14.1} {}",
                r.n, r.switch, r.sim_switch, opt(r.superperm), opt(r.six_query), r.nlogn, r.nlogn_bound, r.sqrt, r.sqrt_bound,
                if r.bounds_hold { "yes" } else { "NO" }
            )?;
        }
        writeln!(out, "bounds hold for n = 2..={n_max}: {}", if ok { "yes" } else { "no" })?;
    }
    Ok(ok)
}

fn cmd_enumerate(n: usize, list: bool, format: Format, out: &mut String) -> Result<bool, Usage> {
    if !(2..=3).contains(&n) {
        return Err(Usage("enumeration is supported for n = 2 and n = 3".into()));
    }
    let all = enumerate_valid_labelings(n)?;
    if format == Format::Json {
        let tables: Vec<_> = all.iter().map(|l| (l.name().to_string(), l.to_table_text())).collect();
        emit(out, &serde_json::json!({ "n": n, "count": all.len(), "labelings": tables }))?;
    } else {
        writeln!(out, "{} valid labelings", all.len())?;
        if list {
            for l in &all {
                writeln!(out, "# {}", l.name())?;
                write!(out, "{}", l.to_table_text())?;
            }
        }
    }
    Ok(true)
}

fn cmd_export(cfg: &CircuitArgs, output: Option<&PathBuf>, out: &mut String) -> Result<bool, Usage> {
    check_compat(cfg.alg, cfg.n)?;
    let l = load_labeling(&cfg.labeling, cfg.n)?;
    let text = build_circuit(cfg.alg, &l)?.export_text();
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Usage(format!("{}: {e}", path.display())))?,
        None => out.push_str(&text),
    }
    Ok(true)
}

#[derive(Serialize)]
struct DenseRow {
    y: u64,
    measured_y: u64,
    peak_probability: f64,
    symbolic_y: Option<u64>,
    passed: bool,
}

fn cmd_dense(cfg: &CircuitArgs, y: &str, seed: Option<u64>, format: Format, out: &mut String) -> Result<bool, Usage> {
    if !(2..=3).contains(&cfg.n) {
        return Err(Usage("dense simulation supports n = 2 and n = 3".into()));
    }
    check_compat(cfg.alg, cfg.n)?;
    let l = load_labeling(&cfg.labeling, cfg.n)?;
    let c = build_circuit(cfg.alg, &l)?;
    let profile = PhaseProfile::compute(&c, &l)?;
    let mut rows = Vec::new();
    let mut dim = 0;
    for y in parse_ys(y, l.size(), seed.unwrap_or(0))? {
        let units = build_promise_unitaries(cfg.n, y, profile.table())?;
        dim = units[0].dim();
        let init = seed.map_or(InitialState::Zero, |seed| InitialState::Random { seed });
        let dense = run_dense(&c, &units, y, init)?;
        let symbolic_y = profile.solve(y)?.solved_y;
        let passed = dense.matches_truth && symbolic_y == Some(dense.measured_y);
        rows.push(DenseRow { y, measured_y: dense.measured_y, peak_probability: dense.peak_probability, symbolic_y, passed });
    }
    if format == Format::Json {
        emit(out, &rows)?;
    } else {
        writeln!(out, "dense {} n {} dim {}", c.name(), cfg.n, dim)?;
        for r in &rows {
            writeln!(out, "y={} measured {} p={:.12} {}", r.y, r.measured_y, r.peak_probability, if r.passed { "pass" } else { "FAIL" })?;
        }
    }
    Ok(rows.iter().all(|r| r.passed))
}

fn configure_threads(flag: Option<usize>) -> Result<(), Usage> {
    let env = std::env::var("FPP_THREADS").ok();
    let threads = match env {
        Some(v) => Some(v.parse::<usize>().map_err(|_| Usage(format!("FPP_THREADS must be a number, got {v:?}")))?),
        None => flag,
    };
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = configure_threads(cli.threads).and_then(|()| match &cli.cmd {
        Cmd::Run(args) => cmd_run(args, cli.format, &mut out),
        Cmd::Queries { n_max } => cmd_queries(*n_max, cli.format, &mut out),
        Cmd::Enumerate { n, list } => cmd_enumerate(*n, *list, cli.format, &mut out),
        Cmd::Export { cfg, output } => cmd_export(cfg, output.as_ref(), &mut out),
        Cmd::Dense { cfg, y, seed } => cmd_dense(cfg, y, *seed, cli.format, &mut out),
    });
    // A closed pipe (e.g. `| head`) is not an error.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
