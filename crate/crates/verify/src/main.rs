use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qseries_core::expr::{parse_qexpr, Evaluator};
use qseries_core::series::Ring;
use qseries_verify::emit::without_timing;
use qseries_verify::{exit_code, render, run_suite, Format, PrimeChoice, Registry, RunConfig, Suite};

#[derive(Parser, Debug)]
#[command(name = "qseries", version, about = "Expand q-series and verify partition congruences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the coefficients of an expression.
    Expand {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(short = 'N', default_value_t = 20)]
        order: usize,
        /// Reduce modulo this power of two.
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Run verification suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// identities, interpretations, lemmas, intermediates, congruences,
    /// families, mutations, agreement, corrections or all
    #[arg(long, value_delimiter = ',', default_value = "all")]
    suite: Vec<String>,
    #[arg(short = 'N', default_value_t = 300)]
    order: usize,
    #[arg(long, default_value_t = 500)]
    terms: usize,
    #[arg(long, default_value_t = 20)]
    family_terms: usize,
    #[arg(long, default_value_t = 500)]
    counts: usize,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    alpha: Vec<u32>,
    /// "auto" or a comma-separated list
    #[arg(long, default_value = "auto")]
    primes: PrimeChoice,
    #[arg(long, default_value_t = 100)]
    prime_bound: u64,
    #[arg(long, default_value_t = 4_000_000)]
    budget: usize,
    #[arg(long, default_value = "text")]
    format: Format,
    #[arg(long)]
    jobs: Option<usize>,
    /// Claim registry to use instead of the bundled one.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Leave timings out of the report.
    #[arg(long)]
    no_timing: bool,
}

fn expand(expr: &str, order: usize, modulus: Option<u64>) -> Result<(), String> {
    let e = parse_qexpr(expr)
        .map_err(|e| format!("{}\n  {}\n  {}^", e, expr, " ".repeat(e.position)))?;
    let ring = match modulus {
        None => Ring::Exact,
        Some(m) => Ring::from_modulus(m).map_err(|e| e.to_string())?,
    };
    let s = Evaluator::new(ring, order).eval(&e).map_err(|e| e.to_string())?;
    let mut out = String::new();
    for (n, c) in s.coefficients().iter().enumerate() {
        out.push_str(&format!("{}\t{}\n", n, c));
    }
    print!("{}", out);
    Ok(())
}

fn suites(names: &[String]) -> Result<Vec<Suite>, String> {
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(n.parse::<Suite>()?);
        }
    }
    out.dedup();
    Ok(out)
}

fn verify(args: VerifyArgs) -> Result<i32, String> {
    if args.order == 0 || args.terms == 0 || args.family_terms == 0 || args.prime_bound < 3 {
        return Err("orders, term counts and the prime bound must be positive".into());
    }
    let registry = match &args.registry {
        None => Registry::builtin(),
        Some(path) => Registry::load(path).map_err(|e| e.to_string())?,
    };
    let suites = suites(&args.suite)?;
    let cfg = RunConfig {
        order: args.order,
        terms: args.terms,
        family_terms: args.family_terms,
        counts: args.counts,
        alphas: args.alpha.clone(),
        primes: args.primes.clone(),
        prime_bound: args.prime_bound,
        budget: args.budget,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| e.to_string())?;
    let mut results: Vec<_> = pool.install(|| {
        suites
            .iter()
            .map(|&s| run_suite(s, &registry, &cfg))
            .collect()
    });
    if args.no_timing {
        without_timing(&mut results);
    }
    print!("{}", render(&results, &cfg, args.format));
    Ok(exit_code(&results))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Expand {
            expr,
            order,
            modulus,
        } => expand(&expr, order, modulus).map(|_| 0),
        Command::Verify(args) => verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
