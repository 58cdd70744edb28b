mod ops;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mfstar::error::Error;

#[derive(Parser, Debug)]
#[command(name = "mfstar", version, about = "Matrix factorizations, extension modules and ball certificates")]
struct Cli {
    /// Coefficient field override: `Q` or `Fp:<p>`.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Monomial order override: `grevlex` or `lex`.
    #[arg(long, global = true)]
    order: Option<String>,
    /// Cross-check exactness claims with the prime field truncation up to degree D.
    #[arg(long = "truncation-oracle", value_name = "D", global = true)]
    truncation_oracle: Option<u32>,
    /// Write the JSON result here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// JSON input file; standard input when absent or `-`.
    input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduced Gröbner basis of an ideal or submodule.
    Gb(Input),
    /// Normal form modulo a Gröbner basis.
    Nf(Input),
    /// Kernel of a matrix, optionally modulo an ideal.
    Ker(Input),
    /// Solve `A x = b`, optionally modulo an ideal.
    Lift(Input),
    /// Presented module checks.
    #[command(subcommand)]
    Mod(ModCmd),
    /// Matrix factorizations.
    #[command(subcommand)]
    Mf(MfCmd),
    /// Filtered modules.
    #[command(subcommand)]
    Star(StarCmd),
    /// Ball certificates.
    #[command(subcommand)]
    Cert(CertCmd),
    /// Named factorizations.
    Catalog(CatalogArgs),
}

#[derive(Subcommand, Debug)]
pub enum ModCmd {
    CheckMorphism(Input),
    CheckIso(Input),
    CheckSummand(Input),
    CheckExact(Input),
}

#[derive(Subcommand, Debug)]
pub enum MfCmd {
    Verify(Input),
    FromPresentation(Input),
    Syzygy(Input),
    Scale(Input),
    Periodicity(Input),
    Sum(Input),
}

#[derive(Subcommand, Debug)]
pub enum StarCmd {
    Assemble(Input),
    Filtrate(Input),
    BuildC(Input),
    ReduceC(Input),
    Lemma3(Input),
    Reassoc(Input),
}

#[derive(Subcommand, Debug)]
pub enum CertCmd {
    Verify(Input),
    Lemma5(Input),
    Scale(Input),
    Theorem0(Input),
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    /// Directory holding registered entries.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    #[command(subcommand)]
    command: CatalogCmd,
}

#[derive(Subcommand, Debug)]
pub enum CatalogCmd {
    List,
    Get {
        name: String,
        /// Parameter `key=value`, repeatable.
        #[arg(long = "param", short = 'p')]
        params: Vec<String>,
    },
    Register(Input),
}

/// Malformed input versus a claim that turned out false.
fn exit_of(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::Malformed(_)
        | Error::Shape(_)
        | Error::RingMismatch
        | Error::Field(_)
        | Error::UnknownEntry(_)
        | Error::ParamOutOfRange(_)
        | Error::BadSplit { .. }
        | Error::Rank { .. }
        | Error::Internal(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

fn read_input(inp: &Input) -> Result<Value, Error> {
    let text = match &inp.input {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).map_err(|e| Error::Malformed(format!("{}: {e}", p.display())))?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| Error::Malformed(e.to_string()))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("JSON at line {} column {}: {e}", e.line(), e.column())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = ops::Ctx { field: cli.field.clone(), order: cli.order.clone(), oracle: cli.truncation_oracle };
    let (op, outcome) = dispatch(&ctx, &cli.command);
    let (code, doc) = match outcome {
        Ok(o) => (if o.ok { 0 } else { 1 }, json!({ "op": op, "ok": o.ok, "result": o.result })),
        Err(e) => (
            exit_of(&e),
            json!({ "op": op, "ok": false, "result": null, "error": { "kind": error_kind(&e), "message": e.to_string() } }),
        ),
    };
    let text = if cli.pretty { serde_json::to_string_pretty(&doc) } else { serde_json::to_string(&doc) }.expect("serializable");
    let written = match &cli.output {
        Some(p) => fs::write(p, format!("{text}\n")),
        None => writeln!(io::stdout(), "{text}"),
    };
    if let Err(e) = written {
        eprintln!("mfstar: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

fn dispatch(ctx: &ops::Ctx, cmd: &Command) -> (String, Result<ops::Outcome, Error>) {
    let run = |name: &str, inp: &Input, f: ops::Handler| (name.to_string(), read_input(inp).and_then(|v| f(ctx, &v)));
    match cmd {
        Command::Gb(i) => run("gb", i, ops::gb),
        Command::Nf(i) => run("nf", i, ops::nf),
        Command::Ker(i) => run("ker", i, ops::ker),
        Command::Lift(i) => run("lift", i, ops::lift),
        Command::Mod(m) => match m {
            ModCmd::CheckMorphism(i) => run("mod check-morphism", i, ops::check_morphism),
            ModCmd::CheckIso(i) => run("mod check-iso", i, ops::check_iso),
            ModCmd::CheckSummand(i) => run("mod check-summand", i, ops::check_summand),
            ModCmd::CheckExact(i) => run("mod check-exact", i, ops::check_exact),
        },
        Command::Mf(m) => match m {
            MfCmd::Verify(i) => run("mf verify", i, ops::mf_verify),
            MfCmd::FromPresentation(i) => run("mf from-presentation", i, ops::mf_from_presentation),
            MfCmd::Syzygy(i) => run("mf syzygy", i, ops::mf_syzygy),
            MfCmd::Scale(i) => run("mf scale", i, ops::mf_scale),
            MfCmd::Periodicity(i) => run("mf periodicity", i, ops::mf_periodicity),
            MfCmd::Sum(i) => run("mf sum", i, ops::mf_sum),
        },
        Command::Star(s) => match s {
            StarCmd::Assemble(i) => run("star assemble", i, ops::star_assemble),
            StarCmd::Filtrate(i) => run("star filtrate", i, ops::star_filtrate),
            StarCmd::BuildC(i) => run("star build-c", i, ops::star_build_c),
            StarCmd::ReduceC(i) => run("star reduce-c", i, ops::star_reduce_c),
            StarCmd::Lemma3(i) => run("star lemma3", i, ops::star_lemma3),
            StarCmd::Reassoc(i) => run("star reassoc", i, ops::star_reassoc),
        },
        Command::Cert(c) => match c {
            CertCmd::Verify(i) => run("cert verify", i, ops::cert_verify),
            CertCmd::Lemma5(i) => run("cert lemma5", i, ops::cert_lemma5),
            CertCmd::Scale(i) => run("cert scale", i, ops::cert_scale),
            CertCmd::Theorem0(i) => run("cert theorem0", i, ops::cert_theorem0),
        },
        Command::Catalog(c) => match &c.command {
            CatalogCmd::List => ("catalog list".into(), ops::catalog_list(ctx, c.registry.as_deref())),
            CatalogCmd::Get { name, params } => ("catalog get".into(), ops::catalog_get(ctx, c.registry.as_deref(), name, params)),
            CatalogCmd::Register(i) => {
                ("catalog register".into(), read_input(i).and_then(|v| ops::catalog_register(c.registry.as_deref(), &v)))
            }
        },
    }
}
