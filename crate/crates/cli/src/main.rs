use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use diagfpt_cli::{parse_range, parse_rational, render, run, Command, Output, Request};
use diagfpt_core::frobenius::Limits;
use diagfpt_core::Rational;

#[derive(Parser)]
#[command(name = "diagfpt", version, about = "F-pure thresholds and test ideals of diagonal hypersurfaces over F_p")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    output: Format,

    /// Terms or search nodes the oracle may visit.
    #[arg(long, env = "DIAGFPT_BUDGET_TERMS", global = true)]
    budget_terms: Option<u64>,

    /// Matrix columns allowed in one membership solve.
    #[arg(long, env = "DIAGFPT_BUDGET_COLUMNS", global = true)]
    budget_columns: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct FormArgs {
    /// Exponents d_1,...,d_n.
    #[arg(long, value_delimiter = ',', required = true)]
    exponents: Vec<u64>,
    /// Nonzero coefficients u_1,...,u_n (default all 1).
    #[arg(long, value_delimiter = ',')]
    coefficients: Option<Vec<u64>>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Threshold of a diagonal form from the closed formula.
    Fpt {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        prime: u64,
    },
    /// Threshold of the degree-d Fermat form in d variables.
    FermatFpt {
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        prime: u64,
    },
    /// Test ideal at the threshold, or at --lambda via the oracle.
    TestIdeal {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_parser = parse_rational)]
        lambda: Option<Rational>,
        /// Starting level for the oracle.
        #[arg(long)]
        e: Option<u32>,
    },
    /// F-jumping numbers of a Fermat form in (0, 1].
    Jumping {
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        prime: u64,
    },
    /// Largest N with f^N outside the e-th Frobenius power of m.
    Nu {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        e: u32,
    },
    /// Checks the formulas against the oracle.
    Verify {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        prime: u64,
        /// Deepest level to bracket.
        #[arg(long, default_value_t = 2)]
        e: u32,
    },
    /// One row per prime in an inclusive range.
    Sweep {
        #[arg(long, value_delimiter = ',', conflicts_with = "degree", required_unless_present = "degree")]
        exponents: Vec<u64>,
        #[arg(long)]
        degree: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        coefficients: Option<Vec<u64>>,
        /// Such as 2..200 (both ends included).
        #[arg(long, value_parser = parse_range)]
        primes: (u64, u64),
    },
    /// Grid scan for changes in the test ideal of a Fermat form.
    JumpScan {
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        e_max: u32,
    },
}

fn blank(command: Command, output: Output, limits: Limits) -> Request {
    Request {
        command,
        exponents: Vec::new(),
        degree: None,
        prime: None,
        primes: None,
        lambda: None,
        e: None,
        coefficients: None,
        output,
        limits,
    }
}

fn request(cli: Cli) -> Request {
    let output = match cli.output {
        Format::Json => Output::Json,
        Format::Csv => Output::Csv,
        Format::Text => Output::Text,
    };
    let defaults = Limits::default();
    let limits = Limits {
        max_terms: cli.budget_terms.unwrap_or(defaults.max_terms),
        max_columns: cli.budget_columns.unwrap_or(defaults.max_columns),
    };
    match cli.command {
        Cmd::Fpt { form, prime } => Request {
            exponents: form.exponents,
            coefficients: form.coefficients,
            prime: Some(prime),
            ..blank(Command::Fpt, output, limits)
        },
        Cmd::FermatFpt { degree, prime } => Request {
            degree: Some(degree),
            prime: Some(prime),
            ..blank(Command::FermatFpt, output, limits)
        },
        Cmd::TestIdeal { form, prime, lambda, e } => Request {
            exponents: form.exponents,
            coefficients: form.coefficients,
            prime: Some(prime),
            lambda,
            e,
            ..blank(Command::TestIdeal, output, limits)
        },
        Cmd::Jumping { degree, prime } => Request {
            degree: Some(degree),
            prime: Some(prime),
            ..blank(Command::Jumping, output, limits)
        },
        Cmd::Nu { form, prime, e } => Request {
            exponents: form.exponents,
            coefficients: form.coefficients,
            prime: Some(prime),
            e: Some(e),
            ..blank(Command::Nu, output, limits)
        },
        Cmd::Verify { form, prime, e } => Request {
            exponents: form.exponents,
            coefficients: form.coefficients,
            prime: Some(prime),
            e: Some(e),
            ..blank(Command::Verify, output, limits)
        },
        Cmd::Sweep {
            exponents,
            degree,
            coefficients,
            primes,
        } => Request {
            exponents,
            degree,
            coefficients,
            primes: Some(primes),
            ..blank(Command::Sweep, output, limits)
        },
        Cmd::JumpScan { degree, prime, e_max } => Request {
            degree: Some(degree),
            prime: Some(prime),
            e: Some(e_max),
            ..blank(Command::JumpScan, output, limits)
        },
    }
}

fn main() -> ExitCode {
    let req = request(Cli::parse());
    let report = run(&req);
    if let Some(reason) = &report.reason {
        eprintln!("diagfpt: {reason}");
    }
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(render(&report, req.output).as_bytes()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(report.status.exit_code())
}
