use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gauss_oracle::circuit::resources;
use gauss_oracle::lattice::{
    gauss_value, GaugeGroup, LatticeAssignment, LatticeSpec, SiteEnvironment,
};
use gauss_oracle::oracle::{
    build_oracle, build_query, check_environment, check_exhaustive, measure_physicality, Matter,
};
use gauss_oracle::schwinger::{
    leakage_experiment, linear_fit, log_log_slope, log_space, write_csv, SchwingerSpec,
    TrotterOrdering,
};
use gauss_oracle::sim::StateVector;

const THREADS_VAR: &str = "GAUSS_ORACLE_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "gauss-oracle",
    version,
    about = "Gauss-law oracle circuits and checks"
)]
struct Cli {
    /// Seed for every random choice; printed in each report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the query circuit for one site in the circuit text format.
    Build(BuildArgs),
    /// Check oracle verdicts exhaustively or on a lattice file.
    Check(CheckArgs),
    /// Measure the query wire on a superposition of two environments.
    Simulate(SimulateArgs),
    /// Report gate counts, optionally over a range of link widths.
    Resources(ResourcesArgs),
    /// Trotter leakage study for the truncated Schwinger model.
    Trotter(TrotterArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupArg {
    U1,
    Z2n,
}

impl From<GroupArg> for GaugeGroup {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::U1 => GaugeGroup::TruncatedU1,
            GroupArg::Z2n => GaugeGroup::Z2n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum MatterArg {
    None,
    Dirac,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrderingArg {
    Revlex,
    Lex,
}

impl From<OrderingArg> for TrotterOrdering {
    fn from(o: OrderingArg) -> Self {
        match o {
            OrderingArg::Revlex => TrotterOrdering::ReverseLexicographic,
            OrderingArg::Lex => TrotterOrdering::Lexicographic,
        }
    }
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    dim: u8,
    /// Bits per link.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
    n: u32,
    #[arg(long, value_enum)]
    group: GroupArg,
    #[arg(long, value_enum)]
    matter: MatterArg,
}

impl LatticeArgs {
    fn spec(&self, bits: u32) -> Result<LatticeSpec> {
        let spec = LatticeSpec::single_site(self.dim as usize, bits, self.group.into())?;
        Ok(match self.matter {
            MatterArg::None => spec,
            MatterArg::Dirac => spec.with_dirac(),
        })
    }
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    /// Output file; the circuit goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["exhaustive", "state"])))]
struct CheckArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), required_unless_present = "state")]
    dim: Option<u8>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16), required_unless_present = "state")]
    n: Option<u32>,
    #[arg(long, value_enum, required_unless_present = "state")]
    group: Option<GroupArg>,
    #[arg(long, value_enum, required_unless_present = "state")]
    matter: Option<MatterArg>,
    /// Enumerate every environment of one site.
    #[arg(long)]
    exhaustive: bool,
    /// Lattice assignment file to query.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Site of the lattice file to query.
    #[arg(long, default_value_t = 0, requires = "state")]
    site: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    /// Mixing angle between the physical and unphysical environments.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    theta: f64,
    /// Environment code of the physical component.
    #[arg(long)]
    phys: Option<u64>,
    /// Environment code of the unphysical component.
    #[arg(long)]
    unphys: Option<u64>,
    #[arg(long, default_value_t = 1)]
    shots: usize,
    /// Write the post-measurement state of the last shot here.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ResourcesArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    dim: u8,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16), required_unless_present = "sweep")]
    n: Option<u32>,
    #[arg(long, value_enum)]
    group: GroupArg,
    #[arg(long, value_enum)]
    matter: MatterArg,
    /// Range of link widths such as `1..4` (inclusive).
    #[arg(long, value_parser = parse_range)]
    sweep: Option<(u32, u32)>,
}

#[derive(Args, Debug)]
struct TrotterArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    nph: u64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
    n: u32,
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    /// Comma-separated time steps; nine log-spaced points in [1e-3, 1e-1]
    /// by default.
    #[arg(long, value_delimiter = ',')]
    dt_list: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1)]
    steps: usize,
    #[arg(long, value_enum, default_value = "revlex")]
    ordering: OrderingArg,
    /// CSV output; written to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> std::result::Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a range like 1..4, got `{s}`"))?;
    let a: u32 = a.parse().map_err(|_| format!("bad range start `{a}`"))?;
    let b: u32 = b.parse().map_err(|_| format!("bad range end `{b}`"))?;
    if a == 0 || b < a || b > 16 {
        return Err(format!(
            "range {a}..{b} must satisfy 1 <= start <= end <= 16"
        ));
    }
    Ok((a, b))
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_build(args: &BuildArgs) -> Result<()> {
    let spec = args.lattice.spec(args.lattice.n)?;
    let query = build_query(&spec, 0)?;
    write_output(&args.out, &query.export())?;
    let regs = query.layout.registers();
    let budget = format!(
        "{}: {} wires ({} ancilla), {} gates",
        query.describe(),
        regs.num_wires(),
        regs.ancilla_wires().len(),
        query.circuit.len()
    );
    // keep stdout clean when it carries the circuit
    if args.out.is_some() {
        println!("{budget}");
    } else {
        eprintln!("{budget}");
    }
    Ok(())
}

fn cmd_check(args: &CheckArgs, seed: u64) -> Result<bool> {
    println!("seed: {seed}");
    if let Some(path) = &args.state {
        return check_state(args, path);
    }
    let lattice = LatticeArgs {
        dim: args.dim.expect("required by clap"),
        n: args.n.expect("required by clap"),
        group: args.group.expect("required by clap"),
        matter: args.matter.expect("required by clap"),
    };
    let spec = lattice.spec(lattice.n)?;
    let query = build_query(&spec, 0)?;
    let r = check_exhaustive(&query)?;
    println!("{}", query.describe());
    println!(
        "environments: {} ({} physical), cases: {} (both query inputs)",
        r.environments, r.physical, r.cases
    );
    println!("{}/{} verdicts correct", r.correct, r.cases);
    println!("{}/{} inputs restored", r.restored, r.cases);
    println!("{}", if r.all_pass() { "PASS" } else { "FAIL" });
    Ok(r.all_pass())
}

fn check_state(args: &CheckArgs, path: &PathBuf) -> Result<bool> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let assignment: LatticeAssignment = text.parse()?;
    let spec = assignment.spec();
    if let Some(d) = args.dim {
        if d as usize != spec.dim {
            bail!(
                "--dim {d} disagrees with D={} in {}",
                spec.dim,
                path.display()
            );
        }
    }
    if let Some(n) = args.n {
        if n != spec.bits {
            bail!(
                "--n {n} disagrees with n={} in {}",
                spec.bits,
                path.display()
            );
        }
    }
    if let Some(g) = args.group {
        if GaugeGroup::from(g) != spec.group {
            bail!(
                "--group disagrees with group={} in {}",
                spec.group,
                path.display()
            );
        }
    }
    if let Some(m) = args.matter {
        let file = Matter::of(spec)?;
        if (m == MatterArg::Dirac) != (file == Matter::Dirac) {
            bail!(
                "--matter disagrees with the matter content of {}",
                path.display()
            );
        }
    }
    let env = assignment.site_environment(args.site)?;
    let query = build_query(spec, args.site)?;
    let outcome = check_environment(&query, &env)?;
    let g = gauss_value(&env, spec)?;
    let verdict = if outcome.flipped {
        "physical"
    } else {
        "unphysical"
    };
    println!("{}", query.describe());
    println!("site {}: verdict {verdict}", args.site);
    println!("classical gauss value: {g}");
    let agrees = outcome.deterministic && outcome.restored && outcome.flipped == (g == 0);
    println!("{}", if agrees { "consistent" } else { "INCONSISTENT" });
    Ok(agrees)
}

fn pick_environment(
    spec: &LatticeSpec,
    code: Option<u64>,
    physical: bool,
) -> Result<SiteEnvironment> {
    let bits = SiteEnvironment::bit_count(spec);
    let env = match code {
        Some(c) => {
            if bits < 64 && c >> bits != 0 {
                bail!("environment code {c} needs more than {bits} bits");
            }
            SiteEnvironment::from_code(c, spec)
        }
        None => SiteEnvironment::enumerate(spec)
            .find(|e| {
                gauss_value(e, spec)
                    .map(|g| (g == 0) == physical)
                    .unwrap_or(false)
            })
            .ok_or_else(|| anyhow!("no environment with the requested physicality"))?,
    };
    if (gauss_value(&env, spec)? == 0) != physical {
        bail!(
            "environment {env:?} is {}",
            if physical { "unphysical" } else { "physical" }
        );
    }
    Ok(env)
}

fn cmd_simulate(args: &SimulateArgs, seed: u64) -> Result<()> {
    let spec = args.lattice.spec(args.lattice.n)?;
    let query = build_query(&spec, 0)?;
    let regs = query.layout.registers().clone();
    let phys = query
        .layout
        .encode(&pick_environment(&spec, args.phys, true)?, false)?;
    let unphys = query
        .layout
        .encode(&pick_environment(&spec, args.unphys, false)?, false)?;
    let mut psi = StateVector::zero(regs.clone())?;
    let mut amps = psi.amplitudes().to_vec();
    amps[0] = Complex64::new(0.0, 0.0);
    amps[phys.to_index() as usize] = Complex64::new(args.theta.cos(), 0.0);
    amps[unphys.to_index() as usize] = Complex64::new(args.theta.sin(), 0.0);
    psi = StateVector::from_amplitudes(regs, amps)?;

    let mut after = psi.clone();
    after.apply_circuit(&query.circuit)?;
    let p_flip = after.probability(query.layout.query(), true);
    println!("seed: {seed}");
    println!("{}", query.describe());
    println!("wires: {}", psi.num_wires());
    println!("physical component: {phys}");
    println!("unphysical component: {unphys}");
    println!("theta: {}", args.theta);
    println!(
        "P(flip) = {p_flip:.17e} (cos^2 theta = {:.17e})",
        args.theta.cos().powi(2)
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flips = 0;
    let mut last = None;
    for shot in 0..args.shots {
        let (flipped, post) = measure_physicality(&psi, &query, &mut rng)?;
        flips += flipped as usize;
        println!(
            "shot {shot}: {}",
            if flipped {
                "flipped (physical)"
            } else {
                "not flipped (unphysical)"
            }
        );
        last = Some(post);
    }
    println!("flipped {flips}/{}", args.shots);
    if let (Some(path), Some(post)) = (&args.dump, last) {
        write_output(&Some(path.clone()), &post.dump())?;
    }
    Ok(())
}

fn cmd_resources(args: &ResourcesArgs, seed: u64) -> Result<()> {
    let lattice = LatticeArgs {
        dim: args.dim,
        n: args.n.unwrap_or(1),
        group: args.group,
        matter: args.matter,
    };
    let (lo, hi) = match (args.sweep, args.n) {
        (Some(r), _) => r,
        (None, Some(n)) => (n, n),
        (None, None) => unreachable!("clap requires --n or --sweep"),
    };
    println!("seed: {seed}");
    println!("n t_count_excluding_multicz t_count cnot ancilla wires");
    let mut ns = Vec::new();
    let mut ts = Vec::new();
    for n in lo..=hi {
        let spec = lattice.spec(n)?;
        let (oracle, _) = build_oracle(&spec, 0)?;
        let r = resources(&oracle);
        println!(
            "{n} {} {} {} {} {}",
            r.t_count_excluding_multicz,
            r.t_count,
            r.cnot_count(),
            r.ancilla_count,
            r.wires
        );
        ns.push(n as f64);
        ts.push(r.t_count_excluding_multicz as f64);
    }
    if ns.len() >= 2 {
        let (slope, intercept) = linear_fit(&ns, &ts).expect("at least two points");
        let exact = ns
            .iter()
            .zip(&ts)
            .all(|(n, t)| (slope * n + intercept - t).abs() < 1e-9);
        println!(
            "fit: t_count_excluding_multicz = {slope} n + {intercept} ({})",
            if exact { "exact" } else { "approximate" }
        );
    }
    Ok(())
}

fn cmd_trotter(args: &TrotterArgs, seed: u64) -> Result<()> {
    let spec = SchwingerSpec::new(args.nph as usize, args.n, args.x, args.mu)?;
    let dts = args
        .dt_list
        .clone()
        .unwrap_or_else(|| log_space(-3.0, -1.0, 9));
    let ordering = TrotterOrdering::from(args.ordering);
    let rows = leakage_experiment(&spec, &dts, args.steps, ordering, &spec.vacuum()?)?;
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv)?;
    let report = |line: String| {
        // the CSV owns stdout when no file is given
        if args.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    };
    write_output(&args.out, std::str::from_utf8(&csv)?)?;
    report(format!("seed: {seed}"));
    report(format!(
        "N_ph={} n={} x={} mu={} wires={} steps={} ordering={ordering}",
        spec.n_ph,
        spec.bits,
        spec.x,
        spec.mu,
        spec.num_wires(),
        args.steps
    ));
    let max = rows.iter().map(|r| r.leakage).fold(0.0, f64::max);
    report(format!("max leakage: {max:.17e}"));
    match log_log_slope(&rows) {
        Some(s) if rows.iter().filter(|r| r.leakage > 0.0).count() == rows.len() => {
            report(format!("log-log slope: {s}"))
        }
        _ => report("log-log slope: undefined (leakage vanishes)".to_string()),
    }
    Ok(())
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Build(a) => cmd_build(a).map(|_| true),
        Command::Check(a) => cmd_check(a, cli.seed),
        Command::Simulate(a) => cmd_simulate(a, cli.seed).map(|_| true),
        Command::Resources(a) => cmd_resources(a, cli.seed).map(|_| true),
        Command::Trotter(a) => cmd_trotter(a, cli.seed).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
