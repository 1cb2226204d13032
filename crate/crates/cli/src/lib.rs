//! Command line front end for `coalmu`.

use std::io::Write;
use std::path::Path;
use std::thread;

use clap::{Parser, Subcommand, ValueEnum};
use coalmu::automata::{
    accepting_points, simulate, synthesize_model, Automaton, EquivMode, Synthesis, TModel,
};
use coalmu::bases::{
    conj_subst, divisible, is_disjunctive, yoneda_representation, Basis, Disjunctivity,
};
use coalmu::frontend::{
    compile, eval_fixpoint, parse_automaton, parse_formula, parse_one_step, render_automaton,
    NamedModel,
};
use coalmu::functors::{Caps, Functor};
use coalmu::logic::equiv::{one_step_equivalent, Equivalence};
use coalmu::logic::OneStep;
use coalmu::transforms::{
    equations, is_monotone, lyndon_automaton, uniform_interpolant, Monotonicity,
};
use coalmu::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "coalmu",
    version,
    about = "Coalgebraic fixpoint logic with disjunctive bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula on a model file with the fixpoint evaluator and the acceptance game.
    Check { formula: String, model: String },
    /// Emit an equivalent disjunctive automaton.
    Simulate {
        input: String,
        #[arg(long, default_value = "powerset")]
        functor: String,
    },
    /// Uniform interpolant over the kept letters.
    Interpolate {
        input: String,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<String>,
        #[arg(long, default_value = "powerset")]
        functor: String,
    },
    /// Automaton positive in a letter, if the input is monotone in it.
    Lyndon {
        input: String,
        #[arg(long)]
        var: String,
        #[arg(long, default_value = "powerset")]
        functor: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Decide monotonicity in a letter.
    Monotone {
        input: String,
        #[arg(long)]
        var: String,
        #[arg(long, value_enum, default_value_t = Mode::Enum)]
        mode: Mode,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long, default_value = "powerset")]
        functor: String,
    },
    /// Produce a model of size at most the state count, or report emptiness.
    Synth {
        input: String,
        #[arg(long, default_value = "powerset")]
        functor: String,
    },
    /// One-step formula utilities.
    Onestep {
        #[command(subcommand)]
        command: OneStepCommand,
    },
    /// Disjunctive basis self tests.
    Basis {
        #[arg(value_enum)]
        basis: BasisName,
        #[arg(value_parser = ["selftest"])]
        action: String,
    },
}

#[derive(Subcommand, Debug)]
enum OneStepCommand {
    Disjunctive {
        formula: String,
        #[arg(long, default_value = "powerset")]
        functor: String,
    },
    Equiv {
        left: String,
        right: String,
        #[arg(long, default_value = "powerset")]
        functor: String,
    },
    Normalform {
        formula: String,
        #[arg(long, default_value = "powerset")]
        functor: String,
    },
    Yoneda {
        formula: String,
        #[arg(long, default_value = "powerset")]
        functor: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Enum,
    Empty,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BasisName {
    Powerset,
    Bag,
    Sum,
    Prod,
    Comp,
}

/// Run the command line `args` (program name first), writing reports to `out`.
pub fn run<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let caps = Caps::from_env();
    match dispatch(cli.command, &caps, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            match e {
                Error::Resource(_) => EXIT_RESOURCE,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e)
}

fn functor(text: &str) -> Result<Functor> {
    text.parse()
}

/// An automaton file when `input` names one, a formula otherwise.
fn load(input: &str, f: &Functor, out: &mut dyn Write) -> Result<Automaton> {
    if Path::new(input).is_file() {
        let text = std::fs::read_to_string(input)?;
        return parse_automaton(&text);
    }
    let c = compile(&parse_formula(input, f)?, f)?;
    if c.rewritten {
        writeln!(out, "note: unguarded input rewritten to {}", c.formula).map_err(io)?;
    }
    Ok(c.automaton)
}

fn disjunctive(aut: &Automaton, caps: &Caps) -> Result<Automaton> {
    if aut.is_disjunctive() {
        return Ok(aut.clone());
    }
    simulate(aut, &Basis::for_functor(&aut.functor)?, caps)
}

fn caps_line(caps: &Caps) -> String {
    format!(
        "bounds: bag multiplicity <= {}, carrier <= {}, compose table <= {}, elements <= {}",
        caps.bag_mult, caps.carrier, caps.compose_table, caps.max_elements
    )
}

fn print_model(m: &TModel, out: &mut dyn Write) -> Result<()> {
    write!(out, "{}", NamedModel::new(m.clone()).to_json()?).map_err(io)
}

fn dispatch(cmd: Command, caps: &Caps, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Check { formula, model } => check(&formula, &model, out),
        Command::Simulate { input, functor: f } => {
            let aut = load(&input, &functor(&f)?, out)?;
            let d = disjunctive(&aut, caps)?;
            write!(out, "{}", render_automaton(&d)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Interpolate {
            input,
            keep,
            functor: f,
        } => {
            let aut = load(&input, &functor(&f)?, out)?;
            let keep: Vec<&str> = keep.iter().map(String::as_str).collect();
            let i = uniform_interpolant(&aut, &keep, caps)?;
            let gone: Vec<&str> = i.eliminated.iter().map(|p| &**p).collect();
            writeln!(out, "eliminated: {}", gone.join(",")).map_err(io)?;
            write!(out, "{}", render_automaton(&i.automaton)).map_err(io)?;
            writeln!(out, "equations:").map_err(io)?;
            write!(out, "{}", equations(&i.automaton)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Lyndon {
            input,
            var,
            functor: f,
            bound,
        } => {
            let aut = load(&input, &functor(&f)?, out)?;
            let d = disjunctive(&aut, caps)?;
            match monotonicity(&d, &var, &EquivMode::Enumerate(bound), bound, caps, out)? {
                EXIT_OK => {
                    write!(out, "{}", render_automaton(&lyndon_automaton(&d, &var)?))
                        .map_err(io)?;
                    Ok(EXIT_OK)
                }
                code => Ok(code),
            }
        }
        Command::Monotone {
            input,
            var,
            mode,
            bound,
            functor: f,
        } => {
            let aut = load(&input, &functor(&f)?, out)?;
            let mode = match mode {
                Mode::Enum => EquivMode::Enumerate(bound),
                Mode::Empty => EquivMode::Emptiness,
            };
            monotonicity(&aut, &var, &mode, bound, caps, out)
        }
        Command::Synth { input, functor: f } => {
            let aut = load(&input, &functor(&f)?, out)?;
            let d = disjunctive(&aut, caps)?;
            match synthesize_model(&d, caps)? {
                Synthesis::Model(m) => {
                    writeln!(out, "model with {} points ({} states)", m.len(), d.len())
                        .map_err(io)?;
                    print_model(&m, out)?;
                    Ok(EXIT_OK)
                }
                Synthesis::Empty { bounded } => {
                    writeln!(out, "empty").map_err(io)?;
                    if bounded {
                        writeln!(out, "{}", caps_line(caps)).map_err(io)?;
                        return Ok(EXIT_RESOURCE);
                    }
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Onestep { command } => onestep(command, caps, out),
        Command::Basis { basis, .. } => selftest(basis, caps, out),
    }
}

fn check(formula: &str, model: &str, out: &mut dyn Write) -> Result<i32> {
    let named = NamedModel::from_json(&std::fs::read_to_string(model)?)?;
    let m = named.model;
    let phi = parse_formula(formula, &m.functor)?;
    let c = compile(&phi, &m.functor)?;
    let (fix, game) = thread::scope(|s| {
        let fix = s.spawn(|| eval_fixpoint(&phi, &m));
        let game = s.spawn(|| accepting_points(&c.automaton, &m));
        (
            fix.join().expect("fixpoint worker"),
            game.join().expect("game worker"),
        )
    });
    let fix = fix? >> m.point & 1 == 1;
    let game = game?[m.point];
    writeln!(
        out,
        "{} (game) / {} (fixpoint)",
        if game { "accepted" } else { "rejected" },
        fix
    )
    .map_err(io)?;
    if fix != game {
        writeln!(
            out,
            "BUG: the acceptance game disagrees with the fixpoint evaluator"
        )
        .map_err(io)?;
        return Ok(EXIT_RESOURCE);
    }
    Ok(if fix { EXIT_OK } else { EXIT_NEGATIVE })
}

fn monotonicity(
    aut: &Automaton,
    p: &str,
    mode: &EquivMode,
    bound: usize,
    caps: &Caps,
    out: &mut dyn Write,
) -> Result<i32> {
    match is_monotone(aut, p, mode, caps)? {
        Monotonicity::Monotone { bounded } => {
            writeln!(out, "monotone in {p}").map_err(io)?;
            if bounded {
                writeln!(
                    out,
                    "bounds: models with at most {bound} points, {}",
                    caps_line(caps).trim_start_matches("bounds: ")
                )
                .map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Monotonicity::NotMonotone { smaller, larger } => {
            writeln!(out, "not monotone in {p}").map_err(io)?;
            if let Some(s) = smaller {
                writeln!(out, "accepted:").map_err(io)?;
                print_model(&s, out)?;
            }
            writeln!(out, "rejected after enlarging {p}:").map_err(io)?;
            print_model(&larger, out)?;
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn report_disjunctivity(d: &Disjunctivity, caps: &Caps, out: &mut dyn Write) -> Result<i32> {
    match d {
        Disjunctivity::Disjunctive { bounded } => {
            writeln!(out, "disjunctive").map_err(io)?;
            if *bounded {
                writeln!(out, "{}", caps_line(caps)).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Disjunctivity::Counterexample(m) => {
            writeln!(out, "not disjunctive: no dividing cover on {m}").map_err(io)?;
            Ok(EXIT_NEGATIVE)
        }
        Disjunctivity::Inconclusive(m, why) => {
            writeln!(out, "inconclusive on {m}: {why}").map_err(io)?;
            writeln!(out, "{}", caps_line(caps)).map_err(io)?;
            Ok(EXIT_RESOURCE)
        }
    }
}

fn report_equivalence(e: &Equivalence, caps: &Caps, out: &mut dyn Write) -> Result<i32> {
    match e {
        Equivalence::Equivalent { bounded } => {
            writeln!(out, "equivalent").map_err(io)?;
            if *bounded {
                writeln!(out, "{}", caps_line(caps)).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Equivalence::Counterexample(m) => {
            writeln!(out, "not equivalent: {m}").map_err(io)?;
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn onestep(cmd: OneStepCommand, caps: &Caps, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        OneStepCommand::Disjunctive {
            formula,
            functor: f,
        } => {
            let f = functor(&f)?;
            let alpha = parse_one_step(&formula, &f)?;
            report_disjunctivity(&is_disjunctive(&f, &alpha, caps)?, caps, out)
        }
        OneStepCommand::Equiv {
            left,
            right,
            functor: f,
        } => {
            let f = functor(&f)?;
            let (a, b) = (parse_one_step(&left, &f)?, parse_one_step(&right, &f)?);
            report_equivalence(&one_step_equivalent(&f, &a, &b, caps)?, caps, out)
        }
        OneStepCommand::Normalform {
            formula,
            functor: f,
        } => {
            let f = functor(&f)?;
            let alpha = parse_one_step(&formula, &f)?;
            let d = Basis::for_functor(&f)?.normal_form(&alpha)?;
            writeln!(out, "{}", d.to_formula()).map_err(io)?;
            Ok(EXIT_OK)
        }
        OneStepCommand::Yoneda {
            formula,
            functor: f,
        } => {
            let f = functor(&f)?;
            let alpha = parse_one_step(&formula, &f)?;
            let rep = yoneda_representation(&f, &alpha, caps)?;
            let div = divisible(&f, &rep, caps)?;
            writeln!(
                out,
                "representation: {} elements over {} points",
                rep.members.len(),
                rep.points.len()
            )
            .map_err(io)?;
            writeln!(out, "divisible: {div}").map_err(io)?;
            Ok(if div { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

fn selftest_cases(b: BasisName) -> (Functor, &'static [&'static str]) {
    match b {
        BasisName::Powerset => (
            Functor::Powerset,
            &[
                "<>a",
                "[]a",
                "<>a & []b",
                "[]a | <>b",
                "<>(a | b) & <>a",
                "[](a & b) & <>a",
            ],
        ),
        BasisName::Bag => (
            Functor::Bag,
            &[
                "<1>a",
                "[1]a",
                "<2>(a & b)",
                "<1>a & [1]b",
                "<1>a & <1>b",
                "[0]a | <2>b",
            ],
        ),
        BasisName::Sum => (
            Functor::sum(Functor::Powerset, Functor::Powerset),
            &[
                "@1 <>a",
                "@2 []b",
                "@1 <>a | @2 <>b",
                "@1 <>a & @1 []b",
                "@1 true",
                "@2 false | @1 []a",
            ],
        ),
        BasisName::Prod => (
            Functor::product(Functor::Powerset, Functor::Identity),
            &[
                "@1 <>a",
                "@2 X b",
                "@1 <>a & @2 X b",
                "@1 []a | @2 X a",
                "@1 <>a & @1 <>b & @2 X (a | b)",
            ],
        ),
        BasisName::Comp => (
            Functor::compose(Functor::Powerset, Functor::Identity),
            &[
                "<>(X a)",
                "[](X a)",
                "<>(X a) & [](X b)",
                "<>(X a) | <>(X b)",
            ],
        ),
    }
}

/// Normal forms must lie in the basis, be disjunctive and be equivalent to
/// their input; checked per case on a worker, reported in input order.
fn selftest(b: BasisName, caps: &Caps, out: &mut dyn Write) -> Result<i32> {
    let (f, cases) = selftest_cases(b);
    let basis = Basis::for_functor(&f)?;
    let results: Vec<Result<(String, i32)>> = thread::scope(|s| {
        let handles: Vec<_> = cases
            .iter()
            .map(|text| {
                let (f, basis) = (&f, &basis);
                s.spawn(move || selftest_case(f, basis, text, caps))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("selftest worker"))
            .collect()
    });
    writeln!(out, "functor {f}").map_err(io)?;
    let mut code = EXIT_OK;
    for r in results {
        let (line, c) = r?;
        writeln!(out, "{line}").map_err(io)?;
        code = code.max(c);
    }
    writeln!(out, "{}", caps_line(caps)).map_err(io)?;
    writeln!(
        out,
        "{}",
        match code {
            EXIT_OK => "PASS",
            EXIT_NEGATIVE => "FAIL",
            _ => "INCONCLUSIVE",
        }
    )
    .map_err(io)?;
    Ok(code)
}

fn selftest_case(f: &Functor, basis: &Basis, text: &str, caps: &Caps) -> Result<(String, i32)> {
    let alpha = parse_one_step(text, f)?;
    let d = basis.normal_form(&alpha)?;
    let delta: OneStep = d.to_formula();
    let member = basis.contains(&d);
    let checks = is_disjunctive(f, &delta, caps).and_then(|disj| {
        let equiv = one_step_equivalent(f, &alpha, &conj_subst(&delta)?, caps)?;
        Ok((disj, equiv))
    });
    let (disj, equiv) = match checks {
        Ok(x) => x,
        Err(Error::Resource(why)) => {
            return Ok((
                format!("??   {text} => {delta} [inconclusive: {why}]"),
                EXIT_RESOURCE,
            ))
        }
        Err(e) => return Err(e),
    };
    let inconclusive = matches!(disj, Disjunctivity::Inconclusive(..));
    let ok = member && disj.holds() && equiv.holds();
    let tag = if ok {
        "ok  "
    } else if inconclusive {
        "??  "
    } else {
        "FAIL"
    };
    let line = format!(
        "{tag} {text} => {delta} [basis {member}, disjunctive {}, equivalent {}]",
        disj.holds(),
        equiv.holds()
    );
    let code = if ok {
        EXIT_OK
    } else if inconclusive {
        EXIT_RESOURCE
    } else {
        EXIT_NEGATIVE
    };
    Ok((line, code))
}
