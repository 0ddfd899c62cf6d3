//! The `tlg` command line.
//!
//! Exit codes: 0 true/valid/satisfiable, 1 false/invalid/unsatisfiable,
//! 2 usage or input error, 3 resource guard exceeded.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dqbf::{self, DqbfInstance, DqbfOutcome, QbfInstance};
use crate::error::{Error, Result};
use crate::formula::{parse_modal, parse_prop, Fragment, ModalFormula, PropFormula};
use crate::kripke::{self, KripkeStructure};
use crate::prop_team::{self, max_team, pl_pointwise, pt_eval, PropTeam, SatResult};
use crate::settings::Settings;
use crate::translate::{self, ValidityVerdict};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "tlg", version, about = "Team-semantics model checking and validity for dependence logics")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Print the verdict as a JSON object.
    #[arg(long, global = true)]
    json: bool,
    /// Report wall-clock time in the JSON stats (otherwise 0).
    #[arg(long, global = true)]
    timing: bool,
    /// Largest domain for maximal propositional teams.
    #[arg(long, global = true, value_name = "N")]
    max_team: Option<usize>,
    /// Largest number of successor-choice functions per diamond.
    #[arg(long, global = true, value_name = "N")]
    max_choices: Option<u128>,
    /// Largest number of `ior` occurrences to eliminate.
    #[arg(long, global = true, value_name = "N")]
    max_selections: Option<usize>,
    /// Largest total Skolem-table size.
    #[arg(long, global = true, value_name = "N")]
    max_skolem_bits: Option<usize>,
    /// Largest antichain of maximal subteams per subformula.
    #[arg(long, global = true, value_name = "N")]
    max_antichain: Option<usize>,
    /// Worker threads for the disjunct search.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

impl GlobalArgs {
    fn settings(&self) -> Settings {
        let d = Settings::default();
        Settings {
            max_domain: self.max_team.unwrap_or(d.max_domain),
            max_choices: self.max_choices.unwrap_or(d.max_choices),
            max_selections: self.max_selections.unwrap_or(d.max_selections),
            max_skolem_bits: self.max_skolem_bits.unwrap_or(d.max_skolem_bits),
            max_antichain: self.max_antichain.unwrap_or(d.max_antichain),
            jobs: self.jobs.unwrap_or(d.jobs).max(1),
            ..d
        }
    }
}

#[derive(Args, Debug)]
struct FormulaArg {
    /// Formula text, or `-` to read it from standard input.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    formula: Option<String>,
    /// Read the formula from a file (`-` for standard input).
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Logic {
    Pl,
    Pd,
    Ml,
    Mdl,
    Emdl,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and print it with its fragment.
    Parse(FormulaArg),
    /// Model check against a propositional team or a Kripke model.
    Mc {
        /// Team file (propositional).
        #[arg(long, value_name = "PATH", conflicts_with = "model", required_unless_present = "model")]
        team: Option<PathBuf>,
        /// Kripke model file; its `team` field (default all worlds) is used.
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// PD satisfiability.
    Sat {
        /// Only nonempty teams count as witnesses.
        #[arg(long)]
        nonempty: bool,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Validity in the chosen logic.
    Valid {
        #[arg(long, value_enum)]
        logic: Logic,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Translate an EMDL formula into ML(ior).
    Translate {
        /// Print every `ior`-free instance, prefixed by its selection bits.
        #[arg(long)]
        eliminate: bool,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Evaluate a DQBF instance.
    DqbfEval { path: PathBuf },
    /// Print the PD formula that is valid iff the DQBF instance is true.
    DqbfReduce { path: PathBuf },
    /// Convert a QBF into a DQBF with a simple constraint.
    QbfToDqbf { path: PathBuf },
    /// Convert a simple-constraint DQBF into a QBF.
    DqbfToQbf { path: PathBuf },
}

#[derive(Serialize)]
struct Report {
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    stats: Stats,
}

#[derive(Serialize)]
struct Stats {
    disjuncts_checked: u64,
    elapsed_ms: u128,
}

/// What a verb produced before formatting.
struct Outcome {
    code: i32,
    verdict: String,
    witness: Option<String>,
    disjuncts_checked: u64,
}

impl Outcome {
    fn verdict(holds: bool, yes: &str, no: &str, witness: Option<String>) -> Outcome {
        Outcome {
            code: if holds { EXIT_TRUE } else { EXIT_FALSE },
            verdict: if holds { yes } else { no }.to_string(),
            witness,
            disjuncts_checked: 0,
        }
    }

    fn text(text: String) -> Outcome {
        Outcome { code: EXIT_TRUE, verdict: "ok".into(), witness: Some(text), disjuncts_checked: 0 }
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_TRUE };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let settings = cli.global.settings();
    let started = Instant::now();
    let mut input = Input { stdin, consumed: false };
    match execute(&cli.command, &settings, &mut input) {
        Ok(outcome) => {
            let written = if cli.global.json {
                let report = Report {
                    verdict: outcome.verdict,
                    witness: outcome.witness,
                    stats: Stats {
                        disjuncts_checked: outcome.disjuncts_checked,
                        elapsed_ms: if cli.global.timing { started.elapsed().as_millis() } else { 0 },
                    },
                };
                writeln!(out, "{}", serde_json::to_string(&report).expect("report serialises"))
            } else {
                let mut text = match outcome.verdict.as_str() {
                    "ok" => String::new(),
                    v => format!("{v}\n"),
                };
                if let Some(w) = outcome.witness {
                    text.push_str(&w);
                    if !w.ends_with('\n') {
                        text.push('\n');
                    }
                }
                write!(out, "{text}")
            };
            if written.is_err() {
                return EXIT_USAGE;
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "tlg: {e}");
            if e.is_guard() {
                EXIT_GUARD
            } else {
                EXIT_USAGE
            }
        }
    }
}

struct Input<'a> {
    stdin: &'a mut dyn Read,
    consumed: bool,
}

impl Input<'_> {
    fn read_path(&mut self, path: &std::path::Path) -> Result<String> {
        if path.as_os_str() == "-" {
            return self.read_stdin();
        }
        std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
    }

    fn read_stdin(&mut self) -> Result<String> {
        if self.consumed {
            return Err(Error::Malformed("standard input can only be read once".into()));
        }
        self.consumed = true;
        let mut text = String::new();
        self.stdin
            .read_to_string(&mut text)
            .map_err(|e| Error::Malformed(format!("standard input: {e}")))?;
        Ok(text)
    }

    fn formula_text(&mut self, arg: &FormulaArg) -> Result<String> {
        match (&arg.formula, &arg.file) {
            (_, Some(path)) => self.read_path(path),
            (Some(text), None) if text == "-" => self.read_stdin(),
            (Some(text), None) => Ok(text.clone()),
            (None, None) => Err(Error::Malformed("no formula given".into())),
        }
    }
}

fn fragment_of(f: &ModalFormula) -> Result<Fragment> {
    f.classify().ok_or_else(|| Error::Fragment {
        expected: "EMDL or ML(ior)",
        reason: "`ior` cannot be combined with dependence atoms".into(),
    })
}

fn require(f: &ModalFormula, logic: Fragment) -> Result<Fragment> {
    let frag = fragment_of(f)?;
    if !frag.is_within(logic) {
        return Err(Error::Fragment { expected: logic.name(), reason: format!("the formula is {frag}") });
    }
    Ok(frag)
}

fn execute(command: &Command, settings: &Settings, input: &mut Input<'_>) -> Result<Outcome> {
    match command {
        Command::Parse(arg) => {
            let f = parse_modal(&input.formula_text(arg)?)?;
            let frag = fragment_of(&f)?;
            Ok(Outcome::text(format!("{f}\nfragment {frag}")))
        }
        Command::Mc { team, model, formula } => {
            let text = input.formula_text(formula)?;
            if let Some(path) = team {
                let x = PropTeam::from_json(&input.read_path(path)?)?;
                let f = parse_prop(&text)?;
                Ok(Outcome::verdict(pt_eval(&x, &f, settings)?, "true", "false", None))
            } else {
                let path = model.as_ref().expect("clap enforces --team or --model");
                let (k, t) = KripkeStructure::from_json(&input.read_path(path)?)?;
                let f = parse_modal(&text)?;
                fragment_of(&f)?;
                Ok(Outcome::verdict(kripke::mt_eval(&k, &t, &f, settings)?, "true", "false", None))
            }
        }
        Command::Sat { nonempty, formula } => {
            let f = parse_prop(&input.formula_text(formula)?)?;
            Ok(match prop_team::pd_sat(&f, *nonempty, settings)? {
                SatResult::Sat(x) => Outcome::verdict(true, "sat", "unsat", Some(x.to_json())),
                SatResult::Unsat => Outcome::verdict(false, "sat", "unsat", None),
            })
        }
        Command::Valid { logic, formula } => {
            let text = input.formula_text(formula)?;
            valid(*logic, &text, settings)
        }
        Command::Translate { eliminate, formula } => {
            let f = parse_modal(&input.formula_text(formula)?)?;
            let plus = translate::emdl_to_mliv(&f, settings)?;
            if !eliminate {
                return Ok(Outcome::text(plus.to_string()));
            }
            let k = translate::idis_occurrences(&plus);
            if k > settings.max_selections {
                return Err(Error::guard("max-selections", k as u128, settings.max_selections as u128));
            }
            let lines: Vec<String> =
                translate::eliminate_idis(&plus).map(|(sel, g)| format!("{sel}\t{g}")).collect();
            Ok(Outcome::text(lines.join("\n")))
        }
        Command::DqbfEval { path } => {
            let d = DqbfInstance::parse(&input.read_path(path)?)?;
            Ok(match dqbf::dqbf_eval(&d, settings)? {
                DqbfOutcome::True(tables) => {
                    let lines: Vec<String> = tables.iter().map(ToString::to_string).collect();
                    let witness = if lines.is_empty() { None } else { Some(lines.join("\n")) };
                    Outcome::verdict(true, "true", "false", witness)
                }
                DqbfOutcome::False => Outcome::verdict(false, "true", "false", None),
            })
        }
        Command::DqbfReduce { path } => {
            let d = DqbfInstance::parse(&input.read_path(path)?)?;
            Ok(Outcome::text(dqbf::reduce_to_pd(&d).to_string()))
        }
        Command::QbfToDqbf { path } => {
            let q = QbfInstance::parse(&input.read_path(path)?)?;
            Ok(Outcome::text(dqbf::qbf_to_dqbf(&q)?.to_text()))
        }
        Command::DqbfToQbf { path } => {
            let d = DqbfInstance::parse(&input.read_path(path)?)?;
            Ok(Outcome::text(dqbf::dqbf_to_qbf(&d)?.to_text()))
        }
    }
}

fn valid(logic: Logic, text: &str, settings: &Settings) -> Result<Outcome> {
    match logic {
        Logic::Pl | Logic::Pd => {
            let f = parse_prop(text)?;
            let wanted = if matches!(logic, Logic::Pl) { Fragment::Pl } else { Fragment::Pd };
            require(&f.to_modal(), wanted)?;
            let domain: Vec<_> = f.symbols().into_iter().collect();
            let full = max_team(&domain, settings)?;
            if pt_eval(&full, &f, settings)? {
                return Ok(Outcome::verdict(true, "valid", "invalid", None));
            }
            Ok(Outcome::verdict(false, "valid", "invalid", Some(prop_countermodel(&full, &f, logic)?.to_json())))
        }
        Logic::Ml => {
            let f = parse_modal(text)?;
            require(&f, Fragment::Ml)?;
            Ok(report(translate::ml_valid(&f)?, 1))
        }
        Logic::Mdl | Logic::Emdl => {
            let f = parse_modal(text)?;
            let frag = fragment_of(&f)?;
            let (verdict, stats) = if frag == Fragment::MlIdis && matches!(logic, Logic::Emdl) {
                translate::mliv_valid(&f, settings)?
            } else {
                require(&f, if matches!(logic, Logic::Mdl) { Fragment::Mdl } else { Fragment::Emdl })?;
                translate::emdl_valid_with_stats(&f, settings)?
            };
            Ok(report(verdict, stats.disjuncts_checked))
        }
    }
}

/// The refuting team printed for an invalid propositional formula: a single
/// falsifying row for PL (flatness), the maximal team for PD.
fn prop_countermodel(full: &PropTeam, f: &PropFormula, logic: Logic) -> Result<PropTeam> {
    if matches!(logic, Logic::Pl) {
        for (i, row) in full.rows().enumerate() {
            if !pl_pointwise(&row, f)? {
                return Ok(full.subteam(1 << i));
            }
        }
    }
    Ok(full.clone())
}

fn report(verdict: ValidityVerdict, disjuncts_checked: u64) -> Outcome {
    let mut out = match verdict {
        ValidityVerdict::Valid(sel) => Outcome::verdict(true, "valid", "invalid", sel.map(|s| s.to_string())),
        ValidityVerdict::Invalid(cm) => {
            Outcome::verdict(false, "valid", "invalid", Some(cm.model.to_json(Some(&cm.team))))
        }
    };
    out.disjuncts_checked = disjuncts_checked;
    out
}
