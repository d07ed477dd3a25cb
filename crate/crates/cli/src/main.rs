use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cpgame::chinesewall::{
    verify_nit_theorem_with, CwModel, GrantRule, NitVerdict, RandomModelParams, DEFAULT_MAX_STATES,
};
use cpgame::corpus::{builtin, list_builtins};
use cpgame::fixpoint::{least_nonempty_fixed_points, EXHAUSTIVE_LIMIT};
use cpgame::format::{
    emit_dot, emit_report, export_cp_document, parse_game_document_with, DotLayer, GameDocument,
    ReportFormat,
};
use cpgame::{classify, cp_equilibria, CpGame};

#[derive(Parser)]
#[command(name = "cpg", version, about = "Analyse conversion/preference games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the equilibria of a game document (cp or strategic).
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
        /// Cross-check against the exhaustive least-fixed-point enumeration.
        #[arg(long)]
        fixpoint_verify: bool,
        /// Close every preference transitively before analysis.
        #[arg(long)]
        close_preference: bool,
    },
    /// Analyse or export one of the bundled games.
    Builtin {
        #[arg(required_unless_present = "list", conflicts_with = "list")]
        name: Option<String>,
        #[arg(long)]
        list: bool,
        /// Write the game as a cp document instead of analysing it.
        #[arg(long, value_name = "PATH")]
        export: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check that no reachable Chinese Wall allocation permits insider trading.
    Chinesewall(CwArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write a Graphviz rendering to PATH.
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Layer::Com)]
    layer: Layer,
}

#[derive(Args)]
struct CwArgs {
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "random",
        required_unless_present = "random"
    )]
    file: Option<PathBuf>,
    #[arg(long, requires_all = ["subjects", "classes", "companies", "objects", "seed"])]
    random: bool,
    #[arg(long)]
    subjects: Option<usize>,
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    companies: Option<usize>,
    #[arg(long)]
    objects: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
    /// Ignore the wall and grant any object (shows what the rule prevents).
    #[arg(long)]
    unrestricted: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layer {
    Com,
    Conversion,
    Preference,
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn report(game: &CpGame, out: &OutputArgs) -> Result<(), String> {
    let rep = classify(game);
    let format = match out.format {
        Format::Json => ReportFormat::Json,
        Format::Text => ReportFormat::Text,
    };
    print!("{}", emit_report(&rep, format));
    if let Some(path) = &out.dot {
        let layer = match out.layer {
            Layer::Com => DotLayer::ChangeOfMind,
            Layer::Conversion => DotLayer::Conversion,
            Layer::Preference => DotLayer::Preference,
        };
        write(path, &emit_dot(game, &rep, layer))?;
    }
    Ok(())
}

fn analyze(file: &Path, out: &OutputArgs, verify: bool, close: bool) -> Result<(), String> {
    let text = read(file)?;
    let doc =
        parse_game_document_with(&text, close).map_err(|e| format!("{}: {e}", file.display()))?;
    let game = match doc {
        GameDocument::Cp(g) => g,
        GameDocument::Strategic(sg) => sg.to_cp_game().map_err(|e| e.to_string())?,
        GameDocument::ChineseWall(_) => {
            return Err("chinesewall documents are checked with `cpg chinesewall --file`".into())
        }
    };
    if verify {
        let n = game.num_situations();
        let least = least_nonempty_fixed_points(&game).map_err(|e| e.to_string())?;
        if least != cp_equilibria(&game) {
            return Err("fixed-point enumeration disagrees with the SCC equilibria".into());
        }
        eprintln!("fixed-point check passed ({n} situations, limit {EXHAUSTIVE_LIMIT})");
    }
    report(&game, out)
}

fn run_builtin(name: &str, export: Option<&Path>, out: &OutputArgs) -> Result<(), String> {
    let entry = builtin(name).map_err(|e| e.to_string())?;
    match export {
        Some(path) => write(path, &export_cp_document(&entry.game)),
        None => report(&entry.game, out),
    }
}

fn chinesewall(args: &CwArgs) -> Result<(), String> {
    let model = match &args.file {
        Some(path) => {
            let text = read(path)?;
            match parse_game_document_with(&text, false)
                .map_err(|e| format!("{}: {e}", path.display()))?
            {
                GameDocument::ChineseWall(m) => m,
                _ => return Err(format!("{}: not a chinesewall document", path.display())),
            }
        }
        None => {
            let params = RandomModelParams {
                subjects: args.subjects.unwrap_or_default(),
                classes: args.classes.unwrap_or_default(),
                companies: args.companies.unwrap_or_default(),
                objects: args.objects.unwrap_or_default(),
            };
            CwModel::random(params, args.seed.unwrap_or_default()).map_err(|e| e.to_string())?
        }
    };
    let rule = if args.unrestricted {
        GrantRule::Unrestricted
    } else {
        GrantRule::ChineseWall
    };
    match verify_nit_theorem_with(&model, args.max_states, rule) {
        NitVerdict::Holds {
            states,
            transitions,
        } => {
            println!("no insider trading: {states} reachable states, {transitions} transitions");
            Ok(())
        }
        NitVerdict::Violated { state, path } => {
            println!("insider trading reachable: {}", model.describe(&state));
            for (step, (p, s)) in path.iter().enumerate() {
                println!(
                    "  {}. {} -> {}",
                    step + 1,
                    model.subjects()[*p],
                    model.describe(s)
                );
            }
            Err("violation found".into())
        }
        NitVerdict::Truncated { explored } => Err(format!(
            "inconclusive: state limit of {} reached after {explored} states without a violation",
            args.max_states
        )),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze {
            file,
            out,
            fixpoint_verify,
            close_preference,
        } => analyze(file, out, *fixpoint_verify, *close_preference),
        Command::Builtin {
            name,
            list,
            export,
            out,
        } => {
            if *list {
                for n in list_builtins() {
                    println!("{n}");
                }
                Ok(())
            } else {
                run_builtin(name.as_deref().unwrap_or_default(), export.as_deref(), out)
            }
        }
        Command::Chinesewall(args) => chinesewall(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("cpg: {msg}");
            ExitCode::from(1)
        }
    }
}
