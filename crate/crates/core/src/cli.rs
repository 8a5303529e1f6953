//! Command-line front end.
//!
//! Every command prints one JSON document (pretty-printed, deterministic for
//! fixed flags and seed) to standard output or to `--output`. Exit status is
//! 0 on success, 1 when a result fails verification and 2 on usage, parse
//! or I/O errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::antichecker::{
    build_anti_checker, dovetail_anti_checker, sample_hard, Language, ProgramFamily,
};
use crate::certificate::{check_certificate, make_certificate, StrategyCertificate};
use crate::error::{Error, Result};
use crate::game::{GameFormat, GameMatrix, Player};
use crate::solver::{mwu_iteration_budget, solve_auto, solve_exact_small, solve_mwu, SolveOptions};
use crate::sparsify::{
    dovetail_set_with, greedy_k_uniform, sample_k_uniform, DovetailMethod, SparsifyParams,
    StrategyRecord, DEFAULT_MAX_ATTEMPTS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sparsegame",
    version,
    about = "Zero-sum games, sparse strategies and certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the game value bracket and optimal strategies.
    Solve {
        #[command(flatten)]
        game: GameArgs,
        /// Target bracket width for the MWU solver.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = SolverChoice::Auto)]
        solver: SolverChoice,
        #[arg(long)]
        max_iters: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build a k-uniform strategy for one player.
    Sparsify {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        epsilon: f64,
        /// Multiset size; defaults to ceil(ln c / (2 epsilon^2)).
        #[arg(long)]
        k: Option<usize>,
        /// Bracket width used when solving the game first.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build a dovetailing set for one player.
    Dovetail {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        epsilon: f64,
        /// Bracket width used when solving the game first.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve the game and emit a value certificate.
    CertMake {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check a certificate against a game; exits 1 when rejected.
    CertCheck {
        #[command(flatten)]
        game: GameArgs,
        certificate: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build an anti-checker, or a dovetailed input set from a cost matrix.
    Anticheck(AnticheckArgs),
    /// Emit built-in games, languages and program families.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// Game file (JSON or CSV, chosen by extension unless --format is given).
    pub game: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<FormatChoice>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StrategyArgs {
    #[arg(long, default_value = "min")]
    pub player: Player,
    #[arg(long, value_enum, default_value_t = MethodChoice::Sampled)]
    pub method: MethodChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
    pub max_attempts: usize,
}

#[derive(Debug, Args)]
pub struct AnticheckArgs {
    /// Built-in language (parity, majority, x<i>, const0, const1, random:<seed>).
    #[arg(long, conflicts_with_all = ["language_file", "costs"])]
    pub language: Option<String>,
    /// Truth-table file for the language.
    #[arg(long)]
    pub language_file: Option<PathBuf>,
    /// Built-in family (constants, dictators, pairs, junta1..junta3).
    #[arg(long, conflicts_with_all = ["family_file", "costs"])]
    pub family: Option<String>,
    /// Program family JSON file.
    #[arg(long)]
    pub family_file: Option<PathBuf>,
    /// Input length for built-in languages and families.
    #[arg(long)]
    pub n: Option<usize>,
    /// Cost matrix CSV (programs by inputs); selects dovetailed mode.
    #[arg(long, conflicts_with_all = ["language_file", "family_file"])]
    pub costs: Option<PathBuf>,
    /// Step budget for dovetailed mode.
    #[arg(long, requires = "costs")]
    pub t: Option<u64>,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit this many draws from the hard distribution instead of the
    /// anti-checker itself.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// A built-in or random game.
    Game {
        #[arg(value_enum)]
        kind: GameKind,
        #[arg(long, default_value_t = 2)]
        rows: usize,
        #[arg(long, default_value_t = 2)]
        cols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FormatChoice::Json)]
        format: FormatChoice,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// A built-in language as a truth table.
    Language {
        name: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// A built-in program family as JSON.
    Family {
        name: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    Auto,
    Exact,
    Mwu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Sampled,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatChoice {
    Json,
    Csv,
}

impl From<FormatChoice> for GameFormat {
    fn from(f: FormatChoice) -> Self {
        match f {
            FormatChoice::Json => GameFormat::Json,
            FormatChoice::Csv => GameFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameKind {
    MatchingPennies,
    Rps,
    Random,
}

/// Result of one invocation: exit status, standard output text and a
/// one-line diagnostic for standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: Option<String>,
}

/// Output of a command before it is written out.
struct Emitted {
    text: String,
    rejection: Option<String>,
}

impl Emitted {
    fn ok(text: String) -> Self {
        Emitted {
            text,
            rejection: None,
        }
    }

    fn checked(text: String, verified: bool, what: &str) -> Self {
        Emitted {
            text,
            rejection: (!verified).then(|| format!("{what} failed verification")),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.to_string();
            return if code == EXIT_OK {
                RunOutput {
                    code,
                    stdout: text,
                    stderr: None,
                }
            } else {
                RunOutput {
                    code,
                    stdout: String::new(),
                    stderr: Some(first_line(&text)),
                }
            };
        }
    };
    let output_path = cli.command.output().map(Path::to_path_buf);
    let emitted = match execute(cli.command) {
        Ok(emitted) => emitted,
        Err(e) => {
            return RunOutput {
                code: exit_code(&e),
                stdout: String::new(),
                stderr: Some(format!("error: {}", first_line(&e.to_string()))),
            }
        }
    };
    let mut text = emitted.text;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let stdout = match output_path {
        Some(path) => {
            if let Err(e) = fs::write(&path, &text) {
                return RunOutput {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: Some(format!("error: cannot write {}: {e}", path.display())),
                };
            }
            String::new()
        }
        None => text,
    };
    RunOutput {
        code: if emitted.rejection.is_some() {
            EXIT_REJECTED
        } else {
            EXIT_OK
        },
        stdout,
        stderr: emitted.rejection,
    }
}

fn first_line(text: &str) -> String {
    text.lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("")
        .trim()
        .to_string()
}

/// Mathematical failures map to 1, everything else to 2.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ValueTooLow { .. }
        | Error::NeverExceeds { .. }
        | Error::NoValueGap { .. }
        | Error::Unverified
        | Error::Uncoverable { .. }
        | Error::ConstructionFailed(_) => EXIT_REJECTED,
        _ => EXIT_USAGE,
    }
}

impl Command {
    fn output(&self) -> Option<&Path> {
        let out = match self {
            Command::Solve { out, .. }
            | Command::Sparsify { out, .. }
            | Command::Dovetail { out, .. }
            | Command::CertMake { out, .. }
            | Command::CertCheck { out, .. } => out,
            Command::Anticheck(args) => &args.out,
            Command::Gen { what } => match what {
                GenCommand::Game { out, .. }
                | GenCommand::Language { out, .. }
                | GenCommand::Family { out, .. } => out,
            },
        };
        out.output.as_deref()
    }
}

fn load_game(args: &GameArgs) -> Result<GameMatrix> {
    GameMatrix::load(&args.game, args.format.map(GameFormat::from))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "--{name} must be positive, got {x}"
        )));
    }
    Ok(())
}

fn execute(command: Command) -> Result<Emitted> {
    match command {
        Command::Solve {
            game,
            delta,
            solver,
            max_iters,
            ..
        } => {
            let game = load_game(&game)?;
            check_positive("delta", delta)?;
            let span = game.range_hi() - game.range_lo();
            let iters = max_iters.unwrap_or_else(|| mwu_iteration_budget(game.rows(), delta, span));
            let result = match solver {
                SolverChoice::Auto => solve_auto(
                    &game,
                    &SolveOptions {
                        max_iters,
                        ..SolveOptions::with_delta(delta)
                    },
                )?,
                SolverChoice::Exact => solve_exact_small(&game)?,
                SolverChoice::Mwu => solve_mwu(&game, delta, iters)?,
            };
            let converged = result.converged;
            Ok(Emitted::checked(
                to_json(&result)?,
                converged,
                "solver bracket",
            ))
        }
        Command::Sparsify {
            game,
            epsilon,
            k,
            delta,
            strategy,
            ..
        } => {
            let game = load_game(&game)?;
            check_positive("delta", delta)?;
            let solution = solve_auto(&game, &SolveOptions::with_delta(delta))?;
            let mut params = SparsifyParams::for_game(&game, strategy.player, epsilon)?;
            params.k = k.unwrap_or(params.k);
            params.seed = strategy.seed;
            params.max_attempts = strategy.max_attempts;
            params.validate()?;
            let value = solution.guarantee(strategy.player);
            let record = match strategy.method {
                MethodChoice::Sampled => {
                    sample_k_uniform(&game, solution.strategy(strategy.player), value, &params)?
                        .to_record()
                }
                MethodChoice::Greedy => {
                    let (multiset, exploitability) =
                        greedy_k_uniform(&game, params.k, strategy.player)?;
                    let slack = epsilon * (game.range_hi() - game.range_lo());
                    let verified = match strategy.player {
                        Player::Min => exploitability <= value + slack,
                        Player::Max => exploitability >= value - slack,
                    };
                    StrategyRecord {
                        player: strategy.player,
                        items: multiset.items().to_vec(),
                        epsilon,
                        verified,
                        exploitability,
                    }
                }
            };
            Ok(Emitted::checked(
                to_json(&record)?,
                record.verified,
                "k-uniform strategy",
            ))
        }
        Command::Dovetail {
            game,
            epsilon,
            delta,
            strategy,
            ..
        } => {
            let game = load_game(&game)?;
            check_positive("delta", delta)?;
            let solution = solve_auto(&game, &SolveOptions::with_delta(delta))?;
            let method = match strategy.method {
                MethodChoice::Sampled => DovetailMethod::Sampled {
                    seed: strategy.seed,
                    max_attempts: strategy.max_attempts,
                },
                MethodChoice::Greedy => DovetailMethod::GreedyCover,
            };
            let outcome = dovetail_set_with(&game, &solution, epsilon, strategy.player, method)?;
            let record = outcome.to_record();
            Ok(Emitted::checked(
                to_json(&record)?,
                record.verified,
                "dovetailing set",
            ))
        }
        Command::CertMake {
            game,
            epsilon,
            seed,
            ..
        } => {
            let game = load_game(&game)?;
            let cert = make_certificate(&game, epsilon, seed)?;
            Ok(Emitted::ok(cert.to_json_string()))
        }
        Command::CertCheck {
            game, certificate, ..
        } => {
            let game = load_game(&game)?;
            let cert = StrategyCertificate::from_json_str(&read_text(&certificate)?)?;
            let verdict = check_certificate(&game, &cert)?;
            let text = to_json(&verdict)?;
            Ok(Emitted {
                text,
                rejection: (!verdict.accepted).then(|| {
                    format!(
                        "certificate rejected: {}",
                        serde_json::to_value(verdict.reason)
                            .ok()
                            .and_then(|v| v.as_str().map(str::to_string))
                            .unwrap_or_default()
                    )
                }),
            })
        }
        Command::Anticheck(args) => anticheck(args),
        Command::Gen { what } => generate(what),
    }
}

fn anticheck(args: AnticheckArgs) -> Result<Emitted> {
    if let Some(costs) = &args.costs {
        let t = args
            .t
            .ok_or_else(|| Error::InvalidParameter("--costs requires --t".into()))?;
        let fam = ProgramFamily::from_cost_csv(file_stem(costs), &read_text(costs)?)?;
        let outcome = dovetail_anti_checker(&fam, t, args.epsilon, args.seed)?;
        let record = outcome.to_record();
        return Ok(Emitted::checked(
            to_json(&record)?,
            record.verified,
            "dovetailed input set",
        ));
    }

    let need_n = || {
        args.n.ok_or_else(|| {
            Error::InvalidParameter("built-in languages and families need --n".into())
        })
    };
    let lang = match (&args.language, &args.language_file) {
        (Some(name), None) => Language::builtin(name, need_n()?)?,
        (None, Some(path)) => Language::parse_truth_table(file_stem(path), &read_text(path)?)?,
        _ => {
            return Err(Error::InvalidParameter(
                "exactly one of --language, --language-file or --costs is required".into(),
            ))
        }
    };
    let fam = match (&args.family, &args.family_file) {
        (Some(name), None) => ProgramFamily::builtin(name, args.n.unwrap_or(lang.n()))?,
        (None, Some(path)) => ProgramFamily::from_json_str(&read_text(path)?)?,
        _ => {
            return Err(Error::InvalidParameter(
                "exactly one of --family or --family-file is required".into(),
            ))
        }
    };
    let ac = build_anti_checker(&lang, &fam, args.epsilon, args.seed)?;
    match args.samples {
        Some(count) => {
            let draws = sample_hard(&ac, args.seed, count)?;
            Ok(Emitted::ok(to_json(&draws)?))
        }
        None => Ok(Emitted::checked(
            ac.to_json_string(),
            ac.verified,
            "anti-checker",
        )),
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unnamed".into())
}

fn generate(what: GenCommand) -> Result<Emitted> {
    match what {
        GenCommand::Game {
            kind,
            rows,
            cols,
            seed,
            format,
            ..
        } => {
            let game = match kind {
                GameKind::MatchingPennies => GameMatrix::matching_pennies(),
                GameKind::Rps => GameMatrix::rock_paper_scissors(),
                GameKind::Random => GameMatrix::random_uniform(rows, cols, seed)?,
            };
            Ok(Emitted::ok(match format {
                FormatChoice::Json => game.to_json_string(),
                FormatChoice::Csv => game.to_csv_string(),
            }))
        }
        GenCommand::Language { name, n, .. } => {
            Ok(Emitted::ok(Language::builtin(&name, n)?.to_truth_table()))
        }
        GenCommand::Family { name, n, .. } => Ok(Emitted::ok(
            ProgramFamily::builtin(&name, n)?.to_json_string(),
        )),
    }
}
