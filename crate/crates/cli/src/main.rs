mod commands;
mod render;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use krein_core::spinor::Case;
use krein_core::verify::Suite;

#[derive(Parser)]
#[command(name = "krein", version, about = "Krein products, KO signs and Wick rotation for complex Clifford algebras")]
struct Cli {
    /// Output format; JSON is the stable contract.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Seed for every random choice.
    #[arg(long, env = "KREIN_CLIFFORD_SEED", default_value_t = krein_core::sample::DEFAULT_SEED, global = true)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Computed KO sign tables in both conventions.
    KoTable {
        #[arg(long, value_parser = parse_case)]
        case: Case,
        /// Even dimensions, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2,4,6,8")]
        n: Vec<usize>,
    },
    /// Gamma matrices, Krein form, chirality and charge conjugation.
    Gammas {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Light-cone verdict for a vector.
    Cone {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// Components, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<f64>,
    },
    /// Inertia of the sigma-product on the blade basis.
    Garling {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// `c`, or a multivector such as `e_1` defining sigma = Ad_b c.
        #[arg(long, default_value = "c")]
        b: String,
    },
    /// Wick-rotate a flat lattice Dirac operator and report residuals.
    Wick {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        sites: usize,
        /// Target case; defaults to antilorentz from Euclidean signature,
        /// euclidean otherwise.
        #[arg(long, value_parser = parse_case)]
        to: Option<Case>,
        /// Number of leading eigenvalues to report.
        #[arg(long, default_value_t = 8)]
        k: usize,
    },
    /// C*-norm of an element for a Euclidean real structure.
    Csnorm {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value = "c")]
        b: String,
        /// Element, e.g. `1.0*e_1 + 2.0i*e_23`.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
    /// Restricted sigma-product on a minimal left ideal.
    Ideal {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value = "c")]
        b: String,
        /// Idempotent given explicitly; overrides `--flip`.
        #[arg(long, allow_hyphen_values = true)]
        e: Option<String>,
        /// Sign choices for the factors of the constructed idempotent.
        #[arg(long, value_delimiter = ',')]
        flip: Vec<u8>,
    },
    /// Run the property suites.
    Verify {
        #[arg(long, value_parser = parse_suite, default_value = "all")]
        suite: Suite,
    },
}

fn parse_case(s: &str) -> Result<Case, String> {
    s.parse().map_err(|e: krein_core::Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: krein_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::KoTable { case, n } => commands::ko_table(case, &n),
        Command::Gammas { p, q } => commands::gammas(p, q),
        Command::Cone { p, q, v } => commands::cone(p, q, &v),
        Command::Garling { p, q, b } => commands::garling(p, q, &b),
        Command::Wick { p, q, sites, to, k } => commands::wick(p, q, sites, to, k, cli.seed),
        Command::Csnorm { p, q, b, a } => commands::csnorm(p, q, &b, &a),
        Command::Ideal { p, q, b, e, flip } => commands::ideal(p, q, &b, e.as_deref(), &flip),
        Command::Verify { suite } => commands::verify(suite, cli.seed),
    };
    match result {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.to_json()).expect("serializable")),
                Format::Text => print!("{}", render::text(&out)),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
