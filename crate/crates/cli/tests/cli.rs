use coalmu::automata::TModel;
use coalmu::frontend::{compile, parse_formula, render_automaton, NamedModel};
use coalmu::functors::{Elem, Functor};
use coalmu_cli::{run, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(
        std::iter::once("coalmu").chain(args.iter().copied()),
        &mut out,
    );
    (code, String::from_utf8(out).unwrap())
}

fn chain_file(dir: &tempfile::TempDir) -> String {
    let m = TModel::new(
        Functor::Powerset,
        vec![Elem::set([1]), Elem::set([2]), Elem::set([])],
        0,
    )
    .with_prop("p", &[2]);
    let path = dir.path().join("chain.model");
    std::fs::write(&path, NamedModel::new(m).to_json().unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_reports_both_evaluators() {
    let dir = tempfile::tempdir().unwrap();
    let chain = chain_file(&dir);
    let (code, out) = call(&["check", "mu x. p | <>x", &chain]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("accepted (game) / true (fixpoint)"), "{out}");
    let (code, out) = call(&["check", "nu x. <>x", &chain]);
    assert_eq!(code, EXIT_NEGATIVE, "{out}");
    assert!(out.contains("rejected (game) / false (fixpoint)"), "{out}");
}

#[test]
fn monotone_exit_codes() {
    let (code, out) = call(&["monotone", "~p", "--var", "p"]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(
        out.contains("accepted:") && out.contains("rejected after enlarging p:"),
        "{out}"
    );
    let (code, out) = call(&["monotone", "mu x. p | <>x", "--var", "p"]);
    assert_eq!(code, EXIT_OK);
    assert!(
        out.contains("bounds: models with at most 3 points"),
        "{out}"
    );
    let (code, _) = call(&["monotone", "<>p & []q", "--var", "p", "--mode", "empty"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn synth_empty_and_model() {
    let (code, out) = call(&["synth", "false"]);
    assert_eq!((code, out.trim()), (EXIT_NEGATIVE, "empty"));
    let (code, out) = call(&["synth", "<>p & <>~p"]);
    assert_eq!(code, EXIT_OK);
    let json = &out[out.find('{').unwrap()..];
    let m = NamedModel::from_json(json).unwrap().model;
    assert!(m.check().is_ok());
}

#[test]
fn automaton_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let f = Functor::Powerset;
    let aut = compile(&parse_formula("<>p & []q", &f).unwrap(), &f)
        .unwrap()
        .automaton;
    let path = dir.path().join("a.aut");
    std::fs::write(&path, render_automaton(&aut)).unwrap();
    let (code, out) = call(&["simulate", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("functor powerset"), "{out}");
}

#[test]
fn interpolate_and_lyndon() {
    let (code, out) = call(&["interpolate", "p & <>q", "--keep", "q"]);
    assert_eq!(code, EXIT_OK);
    assert!(
        out.contains("eliminated: p") && out.contains("props q\n"),
        "{out}"
    );
    let (code, out) = call(&["lyndon", "<>p", "--var", "p"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("props p"), "{out}");
    let (code, _) = call(&["lyndon", "[]~p", "--var", "p"]);
    assert_eq!(code, EXIT_NEGATIVE);
}

#[test]
fn onestep_commands() {
    assert_eq!(
        call(&["onestep", "disjunctive", "<>a & <>b & [](a | b)"]).0,
        EXIT_OK
    );
    assert_eq!(
        call(&["onestep", "disjunctive", "[]a & <>b"]).0,
        EXIT_NEGATIVE
    );
    assert_eq!(
        call(&["onestep", "equiv", "<>(a | ~a) & <>a", "<>true & <>a"]).0,
        EXIT_OK
    );
    assert_eq!(call(&["onestep", "equiv", "<>a", "[]a"]).0, EXIT_NEGATIVE);
    let (code, out) = call(&["onestep", "normalform", "[]a"]);
    assert_eq!(code, EXIT_OK);
    assert!(!out.trim().is_empty());
    assert_eq!(call(&["onestep", "yoneda", "<>a"]).0, EXIT_OK);
    assert_eq!(call(&["onestep", "yoneda", "[]a & <>b"]).0, EXIT_NEGATIVE);
}

#[test]
fn basis_selftests_pass() {
    for b in ["powerset", "sum", "prod", "comp"] {
        let (code, out) = call(&["basis", b, "selftest"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.trim_end().ends_with("PASS"));
    }
}

#[test]
fn usage_errors() {
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["monotone", "~p"]).0, EXIT_USAGE);
    let (code, out) = call(&["simulate", "mu x. (p"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.contains("error:"), "{out}");
    assert_eq!(call(&["basis", "bag", "run"]).0, EXIT_USAGE);
}
