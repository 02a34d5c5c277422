use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use wudlab::characters::{build_character_table_guarded, curve_point_count, z_chi_all, DEFAULT_TABLE_GUARD};
use wudlab::density::{alpha, coprime_value_prime_sum, xi_max_roots};
use wudlab::lab::{
    run_distribution, run_scenario, write_csv, write_json, ConfigFile, DistributionRequest, ExperimentConfig, Filter,
    Format, Record, ScenarioName,
};
use wudlab::number::factor;
use wudlab::poly::IntPoly;
use wudlab::sieve::{sieve_range, MultiplicativeSpec, PrimePowerRule, SieveOptions};
use wudlab::tuples::{additive_tuple_counts, target_ratios, TupleMethod};
use wudlab::{Error, Result};

/// Residue classes of polynomially-defined multiplicative functions.
#[derive(Parser, Debug)]
#[command(name = "wudlab", version, about)]
struct Cli {
    /// TOML experiment file, one table per experiment (dist and scenario)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for report files; reports go to stdout without it
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format for dist, scenario and the sieve summary
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,

    /// Worker threads for sieve segments and enumerations
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Local root counts, α(q) and ξ(q)
    Density(DensityArgs),
    /// Sieve f(n) mod q over [1, x], optionally dumping every n
    Sieve(SieveArgs),
    /// Character sums Z_χ mod ℓ^e against their bounds
    Chars(CharsArgs),
    /// Unit tuple counts V″ (or the additive counts) per target
    Tuples(TuplesArgs),
    /// Residue-class distribution of f(n) mod q
    Dist(DistArgs),
    /// Named experiment presets
    Scenario(ScenarioArgs),
}

#[derive(Args, Debug)]
struct DensityArgs {
    /// Coefficients constant term first, e.g. "[-1,1]", or a preset
    #[arg(long, default_value = "phi")]
    poly: String,
    #[arg(long)]
    q: u64,
    /// Also compute Σ 1/p over p ≤ x with gcd(F(p), q) = 1
    #[arg(long)]
    x: Option<f64>,
}

#[derive(Args, Debug)]
struct SieveArgs {
    #[arg(long, default_value = "phi")]
    poly: String,
    /// completely-multiplicative | poly-at-prime-powers | euler-like | custom:p^e=v;...
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    x: u64,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 65_536)]
    segment_size: usize,
    /// CSV with one row per n
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CharsArgs {
    #[arg(long, default_value = "phi")]
    poly: String,
    #[arg(long)]
    ell: u64,
    #[arg(long, default_value_t = 1)]
    e: u32,
    /// Include the principal and imprimitive characters
    #[arg(long)]
    all_chars: bool,
    /// Also count points on F(x)F(y) = w mod ℓ
    #[arg(long)]
    curve: Option<u64>,
}

#[derive(Args, Debug)]
struct TuplesArgs {
    #[arg(long, default_value = "phi")]
    poly: String,
    #[arg(long)]
    q: u64,
    #[arg(long = "J", short = 'J')]
    j: u32,
    /// `all` or one target residue
    #[arg(long, default_value = "all")]
    w: String,
    #[arg(long, default_value = "char")]
    method: TupleMethod,
    /// Count sums of units instead of products of F-values
    #[arg(long)]
    additive: bool,
}

#[derive(Args, Debug)]
struct DistArgs {
    #[arg(long)]
    poly: Option<String>,
    #[arg(long)]
    rule: Option<String>,
    #[arg(long, value_delimiter = ',')]
    q: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    x: Vec<u64>,
    /// none | convenient | pD+2>q | p<k>>q
    #[arg(long = "filter", value_delimiter = ',')]
    filters: Vec<String>,
    #[arg(long)]
    delta: Option<f64>,
    /// Overrides ⌊log log log x⌋
    #[arg(long)]
    j: Option<u32>,
    #[arg(long)]
    y: Option<f64>,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// distribution | counterexample-i | counterexample-ii | restricted-a | restricted-b | additive;
    /// omit to run every table of --config
    name: Option<String>,
    #[arg(long)]
    poly: Option<String>,
    #[arg(long)]
    rule: Option<String>,
    #[arg(long, value_delimiter = ',')]
    q: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    x: Vec<u64>,
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long)]
    delta: Option<f64>,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_poly(text: &str) -> Result<IntPoly> {
    let f: IntPoly = text.parse()?;
    f.check_defining()?;
    Ok(f)
}

/// Where one report goes: `<out>/<name>` when `--out` is set, else stdout.
fn sink(out: Option<&Path>, name: &str) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Box::new(BufWriter::new(File::create(dir.join(name))?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, name: &str) -> Result<()> {
    let mut w = sink(out, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn emit_records(records: &[Record], format: Format, out: Option<&Path>, stem: &str) -> Result<()> {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut w = sink(out, &format!("{stem}.{ext}"))?;
    match format {
        Format::Csv => write_csv(records, &mut w)?,
        Format::Json => write_json(records, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DensityOutput {
    q: u64,
    polynomial: String,
    alpha: String,
    alpha_float: f64,
    locals: Vec<wudlab::density::LocalDensity>,
    xi: Option<wudlab::density::XiReport>,
    prime_sum: Option<wudlab::density::PrimeSumReport>,
    flags: DensityFlags,
}

#[derive(Serialize)]
struct DensityFlags {
    admissible: bool,
    alpha_zero: bool,
    zero_primes: Vec<u64>,
    squarefree: bool,
    lower_bound_ratio: f64,
}

const XI_GUARD: u64 = 10_000_000;

fn density(args: &DensityArgs, out: Option<&Path>) -> Result<()> {
    let f = parse_poly(&args.poly)?;
    let q = factor(args.q)?;
    let profile = alpha(&f, &q)?;
    let xi = if q.q <= XI_GUARD { Some(xi_max_roots(&f, &q, XI_GUARD)?) } else { None };
    let prime_sum = args.x.map(|x| coprime_value_prime_sum(&f, &q, x)).transpose()?;
    let report = DensityOutput {
        q: q.q,
        polynomial: f.to_string(),
        alpha: profile.alpha.to_string(),
        alpha_float: profile.alpha_float,
        flags: DensityFlags {
            admissible: profile.locals.iter().all(|l| l.admissible),
            alpha_zero: profile.alpha.is_zero(),
            zero_primes: profile.zero_primes.clone(),
            squarefree: q.is_squarefree(),
            lower_bound_ratio: profile.lower_bound_ratio,
        },
        locals: profile.locals,
        xi,
        prime_sum,
    };
    emit_json(&report, out, "density.json")
}

fn sieve(args: &SieveArgs, format: Format, out: Option<&Path>) -> Result<()> {
    let f = parse_poly(&args.poly)?;
    let spec = match &args.rule {
        Some(r) => MultiplicativeSpec::new(f, r.parse::<PrimePowerRule>()?),
        None => MultiplicativeSpec::with_default_rule(f),
    };
    let mut req = DistributionRequest::new(spec.clone(), vec![args.x], vec![args.q]);
    req.scenario = "sieve".into();
    req.delta = args.delta;
    req.segment_size = args.segment_size;
    if let Some(path) = &args.dump {
        let params = req.params(args.x)?;
        let opts = SieveOptions { segment_size: args.segment_size, ..Default::default() };
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
        w.write_record(["n", "f_mod_q", "coprime", "Omega", "P1", "P2", "convenient"])?;
        for rec in sieve_range(&spec, 1, args.x, args.q, &params, opts)? {
            let rec = rec?;
            let fr = &rec.factorization;
            w.write_record([
                rec.n.to_string(),
                rec.f_mod.to_string(),
                (rec.coprime as u8).to_string(),
                fr.omega_big.to_string(),
                fr.p_k(1).to_string(),
                fr.p_k(2).to_string(),
                (rec.convenient as u8).to_string(),
            ])?;
        }
        w.flush()?;
    }
    let records: Vec<Record> = run_distribution(&req)?.into_iter().map(Record::Distribution).collect();
    emit_records(&records, format, out, "sieve")
}

#[derive(Serialize)]
struct CharRow {
    t: u64,
    order: u64,
    conductor: u64,
    #[serde(rename = "Z_re")]
    z_re: f64,
    #[serde(rename = "Z_im")]
    z_im: f64,
    abs: f64,
    bound: Option<f64>,
    uniform_bound: Option<f64>,
    binding: bool,
    ok: bool,
}

#[derive(Serialize)]
struct CharsOutput {
    ell: u64,
    e: u32,
    polynomial: String,
    admissible: bool,
    rows: Vec<CharRow>,
    curve: Option<wudlab::characters::CurveCountReport>,
}

fn chars(args: &CharsArgs, out: Option<&Path>) -> Result<()> {
    let f = parse_poly(&args.poly)?;
    let table = build_character_table_guarded(args.ell, args.e, DEFAULT_TABLE_GUARD)?;
    let rows = z_chi_all(&f, &table)?
        .into_iter()
        .filter(|r| args.all_chars || (r.t != 0 && r.conductor == table.modulus))
        .map(|r| CharRow {
            t: r.t,
            order: r.order,
            conductor: r.conductor,
            z_re: r.z_re,
            z_im: r.z_im,
            abs: r.abs,
            bound: r.bound,
            uniform_bound: r.uniform_bound,
            binding: r.binding,
            ok: r.ok,
        })
        .collect();
    let curve = args.curve.map(|w| curve_point_count(&f, args.ell, w)).transpose()?;
    let report = CharsOutput { ell: args.ell, e: args.e, polynomial: f.to_string(), admissible: f.is_admissible(args.ell), rows, curve };
    emit_json(&report, out, "chars.json")
}

fn tuples(args: &TuplesArgs, out: Option<&Path>) -> Result<()> {
    let q = factor(args.q)?;
    let targets: Option<Vec<u64>> = match args.w.as_str() {
        "all" => None,
        w => Some(vec![w.parse().map_err(|_| Error::InvalidInput(format!("--w expects `all` or an integer, got `{w}`")))?]),
    };
    let mut rows: Vec<[String; 4]> = Vec::new();
    if args.additive {
        let phi_j = (q.phi as f64).powi(args.j as i32);
        let ws = targets.unwrap_or_else(|| (0..q.q).collect());
        for t in ws {
            let r = additive_tuple_counts(&q, args.j, t)?;
            let ratio = r.formula as f64 * q.q as f64 / phi_j;
            rows.push([r.w.to_string(), r.formula.to_string(), ratio.to_string(), r.predicted.to_string()]);
        }
    } else {
        let f = parse_poly(&args.poly)?;
        let report = target_ratios(&f, &q, args.j, targets.as_deref(), args.method)?;
        if report.vacuous {
            eprintln!("α({}) = 0: no unit tuples to count", q.q);
        }
        for r in &report.rows {
            rows.push([r.w.to_string(), r.v_double.to_string(), r.ratio.to_string(), r.r_bound.to_string()]);
        }
    }
    let mut w = csv::Writer::from_writer(sink(out, "tuples.csv")?);
    w.write_record(["w", "v_double", "ratio", "bound"])?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn dist_request(args: &DistArgs) -> Result<DistributionRequest> {
    let cfg = ExperimentConfig {
        polynomial: args.poly.clone(),
        rule: args.rule.clone(),
        delta: args.delta,
        j: args.j,
        y: args.y,
        ..Default::default()
    };
    cfg.validate()?;
    let spec = cfg.spec_for(cfg.poly()?)?;
    let xs = if args.x.is_empty() { vec![1_000_000] } else { args.x.clone() };
    if args.q.is_empty() {
        return Err(Error::InvalidInput("dist needs at least one --q".into()));
    }
    let mut req = DistributionRequest::new(spec, xs, args.q.clone());
    if !args.filters.is_empty() {
        req.filters = args.filters.iter().map(|s| s.parse::<Filter>()).collect::<Result<_>>()?;
    }
    req.delta = cfg.delta();
    req.j = args.j;
    req.y = args.y;
    Ok(req)
}

/// Runs one config table and returns its records.
fn run_table(name: &str, exp: &ExperimentConfig) -> Result<Vec<Record>> {
    let scenario = ConfigFile::scenario_of(name, exp);
    let mut report = run_scenario(scenario, exp)?;
    if scenario == ScenarioName::Distribution {
        for d in &mut report.distributions {
            d.scenario = name.to_string();
        }
    }
    Ok(Record::from_scenario(report))
}

fn run_config(path: &Path, only_distribution: bool, cli: &Cli) -> Result<()> {
    let file = ConfigFile::load(path)?;
    for (name, exp) in &file.experiments {
        if only_distribution && ConfigFile::scenario_of(name, exp) != ScenarioName::Distribution {
            continue;
        }
        let format = cli.format.or(exp.format).unwrap_or_default();
        let records = with_threads(cli.threads.or(exp.threads), || run_table(name, exp))?;
        match (&cli.out, &exp.out) {
            (None, Some(file)) => {
                if let Some(parent) = file.parent().filter(|p| !p.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent)?;
                }
                wudlab::lab::export_report(&records, format, file)?;
            }
            (out, _) => emit_records(&records, format, out.as_deref(), name)?,
        }
    }
    Ok(())
}

fn scenario(args: &ScenarioArgs, cli: &Cli) -> Result<()> {
    let Some(name) = &args.name else {
        let path = cli.config.as_deref().ok_or_else(|| Error::InvalidInput("scenario needs a name or --config".into()))?;
        return run_config(path, false, cli);
    };
    let which: ScenarioName = name.parse()?;
    let cfg = ExperimentConfig {
        scenario: Some(which),
        polynomial: args.poly.clone(),
        rule: args.rule.clone(),
        x: args.x.clone(),
        q: args.q.clone(),
        degree: args.degree,
        delta: args.delta,
        ..Default::default()
    };
    cfg.validate()?;
    let records = Record::from_scenario(run_scenario(which, &cfg)?);
    emit_records(&records, cli.format.unwrap_or(Format::Json), cli.out.as_deref(), which.as_str())
}

/// Runs `job` on a pool of `threads` workers, or the global pool when unset.
fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(job),
        None => job(),
    }
}

fn run(cli: &Cli) -> Result<()> {
    if cli.threads == Some(0) {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    let out = cli.out.as_deref();
    let format = cli.format.unwrap_or_default();
    with_threads(cli.threads, || match &cli.command {
        Command::Density(a) => density(a, out),
        Command::Sieve(a) => sieve(a, format, out),
        Command::Chars(a) => chars(a, out),
        Command::Tuples(a) => tuples(a, out),
        Command::Dist(a) => match &cli.config {
            Some(path) if a.poly.is_none() && a.q.is_empty() => run_config(path, true, cli),
            _ => {
                let records: Vec<Record> = run_distribution(&dist_request(a)?)?.into_iter().map(Record::Distribution).collect();
                emit_records(&records, format, out, "dist")
            }
        },
        Command::Scenario(a) => scenario(a, cli),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wudlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
