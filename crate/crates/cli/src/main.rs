use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dg_operad::{Execution, Flavor};
use dg_operad_cli::commands::{EXIT_PARSE, EXIT_OK};
use dg_operad_cli::{run, CheckKind, Request, Show, Source, Verb};

const EXIT_CODES: &str = "\
Exit codes:
  0  clean: every check passed
  1  validation failure: a report contains failures or an isomorphism was not certified
  2  parse error: bad arguments, unreadable file or malformed workspace (with line and column)
  3  precondition error: wrong object kind or flavor, unknown object, action not free
  4  truncation exceeded: the request leaves the stored arities or the stage window";

#[derive(Parser)]
#[command(name = "dgop", version, about = "Operads over DG modules in exact arithmetic", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    verb: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every validator on the objects of a workspace.
    Validate(Common),
    /// Build the free operad on an object.
    Free {
        #[command(flatten)]
        common: Common,
        /// Print dimensions per arity and degree (default).
        #[arg(long, conflicts_with = "basis")]
        dims: bool,
        /// Print the tree basis.
        #[arg(long)]
        basis: bool,
    },
    /// Run one of the structural checks.
    Check {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        which: Which,
    },
    /// Dimensions of an object per arity and degree.
    Dims(Common),
    /// Basis of an object per arity.
    Basis(Common),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Which {
    /// Unit, associativity, equivariance and differential axioms.
    #[arg(long)]
    axioms: bool,
    /// G∘U = nU∘𝒢 on a symmetric operad.
    #[arg(long)]
    square_forget: bool,
    /// F∘H ≅ ℋ∘nF on an ℕ-module.
    #[arg(long)]
    square_free: bool,
    /// F ≅ ℋ∘nF∘G∘Ψ on an 𝕊-module with free actions.
    #[arg(long)]
    corollary: bool,
}

#[derive(Args)]
struct Common {
    /// Workspace file.
    #[arg(required_unless_present = "example", conflicts_with = "example")]
    file: Option<PathBuf>,
    /// Built-in example: N, M, binary-generator or two-term-complex.
    #[arg(long)]
    example: Option<String>,
    /// Object to use (default: the first one).
    #[arg(long)]
    object: Option<String>,
    /// Make the object symmetric first (H on modules, ℋ on operads).
    #[arg(long, conflicts_with = "nonsymmetric")]
    symmetric: bool,
    /// Forget the actions first (G on modules, 𝒢 on operads).
    #[arg(long)]
    nonsymmetric: bool,
    #[arg(long)]
    max_arity: Option<usize>,
    #[arg(long, default_value_t = 3)]
    max_stage: usize,
    /// Run checkers on a single thread.
    #[arg(long)]
    sequential: bool,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

fn request(verb: Verb, c: &Common) -> Request {
    let source = match (&c.file, &c.example) {
        (Some(f), _) => Source::File(f.clone()),
        (None, Some(e)) => Source::Example(e.clone()),
        (None, None) => unreachable!("clap requires one of them"),
    };
    let flavor = if c.symmetric {
        Some(Flavor::Symmetric)
    } else if c.nonsymmetric {
        Some(Flavor::Nonsymmetric)
    } else {
        None
    };
    Request {
        verb,
        source,
        object: c.object.clone(),
        flavor,
        max_arity: c.max_arity,
        max_stage: c.max_stage,
        execution: if c.sequential { Execution::Sequential } else { Execution::default() },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            return ExitCode::from(code as u8);
        }
    };
    let (req, json) = match &cli.verb {
        Command::Validate(c) => (request(Verb::Validate, c), c.json),
        Command::Free { common, basis, .. } => {
            let show = if *basis { Show::Basis } else { Show::Dims };
            (request(Verb::Free(show), common), common.json)
        }
        Command::Check { common, which } => {
            let kind = if which.axioms {
                CheckKind::Axioms
            } else if which.square_forget {
                CheckKind::SquareForget
            } else if which.square_free {
                CheckKind::SquareFree
            } else {
                CheckKind::Corollary
            };
            (request(Verb::Check(kind), common), common.json)
        }
        Command::Dims(c) => (request(Verb::Dims, c), c.json),
        Command::Basis(c) => (request(Verb::Basis, c), c.json),
    };
    match run(&req) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code as u8)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
