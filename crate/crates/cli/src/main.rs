use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lieverify::catalog::{
    default_catalog, instantiate_params, load_catalog, verify_catalog, verify_entry, verify_transformed, Catalog,
    CatalogEntry, CatalogReport, Outcome, VerifyConfig,
};
use lieverify::equivtrans::{pushforward_field, transform_f, EquivalenceTransform};
use lieverify::liealg::{decompose_operator, match_algebra, structure_constants};
use lieverify::parser::{parse_rational, print_expr, print_vectorfield};
use lieverify::simplify::mix_seed;
use lieverify::{normalize, parse_expr, parse_vectorfield, Expr, Symbol};

#[derive(Parser, Debug)]
#[command(name = "lieverify", version, about = "Check symmetry realizations of u_tt = u_xx + F(t, x, u, u_x)")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Catalog file; the bundled catalog when omitted.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Seed for all sampling.
    #[arg(long, global = true, env = "LIEVERIFY_SEED", default_value_t = 42)]
    seed: u64,
    /// Sample points per numeric zero test.
    #[arg(long, global = true, default_value_t = 32, value_parser = clap::value_parser!(u64).range(8..))]
    points: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for catalog runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// More detail in text output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an expression or vector field and print its normal form.
    Parse {
        text: String,
    },
    /// Verify catalog entries.
    Verify {
        /// Only these entries (repeatable).
        #[arg(long = "entry")]
        entries: Vec<String>,
    },
    /// Print the commutator table of an entry.
    Commutators {
        #[arg(long)]
        entry: String,
    },
    /// Apply an equivalence transformation to an entry and re-verify it.
    Transform {
        #[arg(long)]
        entry: String,
        /// key=value with keys gamma, gamma1, gamma2, epsilon, rho, theta.
        spec: Vec<String>,
    },
}

impl RunArgs {
    fn config(&self) -> VerifyConfig {
        VerifyConfig::new(self.seed).with_points(self.points as usize)
    }

    fn catalog(&self) -> Result<Catalog> {
        match &self.catalog {
            Some(p) => Ok(load_catalog(p)?),
            None => Ok(default_catalog()),
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.jobs {
            if n == 0 {
                bail!("--jobs must be at least 1");
            }
            b = b.num_threads(n);
        }
        Ok(b.build()?)
    }
}

/// Usage and input errors exit with 1, unexpected verification failures with 2.
enum Status {
    Ok,
    Failures,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failures) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Status> {
    let mut out = std::io::stdout().lock();
    match &cli.command {
        Command::Parse { text } => cmd_parse(&mut out, text),
        Command::Verify { entries } => cmd_verify(&mut out, &cli.run, entries),
        Command::Commutators { entry } => cmd_commutators(&mut out, &cli.run, entry),
        Command::Transform { entry, spec } => cmd_transform(&mut out, &cli.run, entry, spec),
    }
}

fn cmd_parse(out: &mut impl Write, text: &str) -> Result<Status> {
    if text.contains("d_t") || text.contains("d_x") || text.contains("d_u") {
        let v = parse_vectorfield(text).map_err(|e| anyhow!("{e}"))?;
        writeln!(out, "{}", print_vectorfield(&v.normalize()))?;
        match decompose_operator(&v) {
            Ok(op) => writeln!(out, "admissible form: {op}")?,
            Err(e) => writeln!(out, "not in admissible form: {e}")?,
        }
    } else {
        let e = parse_expr(text).map_err(|e| anyhow!("{e}"))?;
        writeln!(out, "{}", print_expr(&normalize(&e)))?;
    }
    Ok(Status::Ok)
}

fn select(cat: &Catalog, ids: &[String]) -> Result<Vec<CatalogEntry>> {
    if ids.is_empty() {
        return Ok(cat.entries.clone());
    }
    ids.iter()
        .map(|id| cat.get(id).cloned().ok_or_else(|| anyhow!("no entry {id} in catalog")))
        .collect()
}

fn cmd_verify(out: &mut impl Write, run: &RunArgs, ids: &[String]) -> Result<Status> {
    let cat = run.catalog()?;
    let entries = select(&cat, ids)?;
    let cfg = run.config();
    let report = run.pool()?.install(|| verify_catalog(&entries, &cfg));
    match run.format {
        Format::Jsonl => out.write_all(report.to_jsonl().as_bytes())?,
        Format::Text => {
            out.write_all(report.to_text().as_bytes())?;
            if run.verbose > 0 {
                details(out, &report)?;
            }
        }
    }
    Ok(if report.unexpected_failures().is_empty() {
        Status::Ok
    } else {
        Status::Failures
    })
}

fn details(out: &mut impl Write, report: &CatalogReport) -> Result<()> {
    for e in &report.entries {
        if e.outcome() == Outcome::Pass {
            continue;
        }
        writeln!(out, "\n{}:", e.id)?;
        for r in e.records() {
            if let Some(w) = &r.witness {
                writeln!(out, "  {} {}: {} at {:?}, value {:.3e}", r.check, r.verdict, w.atom, w.point, w.value)?;
            } else if r.check == "algebra" {
                writeln!(out, "  algebra {}: {}", r.verdict, r.detail.as_deref().unwrap_or(""))?;
            }
        }
    }
    Ok(())
}

fn first_binding(entry: &CatalogEntry, seed: u64) -> Result<lieverify::catalog::Binding> {
    let seed = mix_seed(seed, &entry.id);
    let mut bs = instantiate_params(&entry.id, &entry.params, seed, 1)?;
    Ok(bs.remove(0))
}

fn show_binding(b: &lieverify::catalog::Binding) -> String {
    b.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

fn cmd_commutators(out: &mut impl Write, run: &RunArgs, id: &str) -> Result<Status> {
    let cat = run.catalog()?;
    let entry = cat.get(id).ok_or_else(|| anyhow!("no entry {id} in catalog"))?;
    let binding = first_binding(entry, run.seed)?;
    let (gens, _) = entry.instantiate(&binding);
    let sc = structure_constants(&gens, &entry.sampling_domain(), mix_seed(run.seed, "commutators"))?;
    if !binding.is_empty() {
        writeln!(out, "binding: {}", show_binding(&binding))?;
    }
    for (i, g) in gens.iter().enumerate() {
        writeln!(out, "e{} = {}", i + 1, print_vectorfield(g))?;
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            writeln!(out, "[e{}, e{}] = {}", i + 1, j + 1, sc.bracket_string(i, j))?;
        }
    }
    let m = match_algebra(&sc, entry.q_value(&binding).as_ref());
    let verdict = match m.name {
        Some(name) => format!("matches {name}"),
        None if m.semisimple => "semisimple".into(),
        None => "no match in this basis".into(),
    };
    writeln!(out, "declared {}: {verdict}", entry.algebra)?;
    Ok(Status::Ok)
}

fn parse_transform(spec: &[String]) -> Result<EquivalenceTransform> {
    let mut tr = EquivalenceTransform::identity();
    for item in spec {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got {item:?}"))?;
        let num = || parse_rational(v.trim()).map_err(|e| anyhow!("{k}: {e}"));
        match k.trim() {
            "gamma" => tr.gamma = num()?,
            "gamma1" => tr.gamma1 = num()?,
            "gamma2" => tr.gamma2 = num()?,
            "epsilon" => {
                tr.epsilon = match v.trim() {
                    "1" | "+1" => 1,
                    "-1" => -1,
                    other => bail!("epsilon must be 1 or -1, got {other}"),
                }
            }
            "rho" => tr.rho = parse_expr(v).map_err(|e| anyhow!("rho: {e}"))?,
            "theta" => tr.theta = parse_expr(v).map_err(|e| anyhow!("theta: {e}"))?,
            other => bail!("unknown transform key {other}"),
        }
    }
    if num_traits::Zero::is_zero(&tr.gamma) {
        bail!("gamma must be nonzero");
    }
    if normalize(&tr.rho).is_zero() {
        bail!("rho must be nonzero");
    }
    let only = |e: &Expr, allowed: &[&str], what: &str| -> Result<()> {
        for s in e.free_symbols() {
            if !allowed.contains(&s.name()) {
                bail!("{what} may only depend on {}, found {s}", allowed.join(", "));
            }
        }
        Ok(())
    };
    only(&tr.rho, &[Symbol::X.name()], "rho")?;
    only(&tr.theta, &[Symbol::T.name(), Symbol::X.name()], "theta")?;
    Ok(EquivalenceTransform::new(
        tr.gamma,
        tr.gamma1,
        tr.gamma2,
        tr.epsilon,
        normalize(&tr.rho),
        normalize(&tr.theta),
    ))
}

fn cmd_transform(out: &mut impl Write, run: &RunArgs, id: &str, spec: &[String]) -> Result<Status> {
    let tr = parse_transform(spec)?;
    let cat = run.catalog()?;
    let entry = cat.get(id).ok_or_else(|| anyhow!("no entry {id} in catalog"))?;
    let cfg = run.config();
    let binding = first_binding(entry, run.seed)?;
    let (gens, f) = entry.instantiate(&binding);
    if !binding.is_empty() {
        writeln!(out, "binding: {}", show_binding(&binding))?;
    }
    writeln!(out, "F' = {}", print_expr(&transform_f(&tr, &f)))?;
    for (i, g) in gens.iter().enumerate() {
        writeln!(out, "e{}' = {}", i + 1, print_vectorfield(&pushforward_field(&tr, g)))?;
    }
    let source = verify_entry(entry, &cfg);
    let image = verify_transformed(entry, &tr, &cfg);
    let label = |ok: bool| if ok { "pass" } else { "fail" };
    writeln!(out, "source: {}", label(source.all_checks_pass()))?;
    write!(out, "transformed: {}", label(image.all_checks_pass()))?;
    let failing = image.failing_checks();
    if !failing.is_empty() {
        write!(out, "  [{}]", failing.join(", "))?;
    }
    writeln!(out)?;
    if run.format == Format::Jsonl {
        let mut r = image.clone();
        r.id = format!("{}'", entry.id);
        for rec in r.records() {
            writeln!(out, "{}", serde_json::to_string(&rec)?)?;
        }
    }
    Ok(if source.all_checks_pass() && !image.all_checks_pass() {
        Status::Failures
    } else {
        Status::Ok
    })
}
