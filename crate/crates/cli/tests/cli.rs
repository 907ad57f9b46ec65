use std::path::PathBuf;
use std::process::{Command, Output};

use pical_core::digest::hex;
use pical_core::semantics::{enabled_steps, State};
use pical_core::{encode, parse_file, well_formed, CalculusId, EncodingId};

fn data(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(file)
}

fn pical(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pical")).args(args).env_remove("PICAL_MAX_STATES").output().unwrap()
}

fn examples() -> String {
    data("examples.pi").display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn encode_prints_the_target() {
    let o = pical(&["encode", &examples(), "nilTerm", "--enc", "sep-asyn"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "new l.(l?(t,f).t!<>)\n");

    let o = pical(&["encode", &examples(), "com", "--enc", "sep-asyn", "--show-roles"]);
    assert!(stdout(&o).contains("l:sumlock"));
    let o = pical(&["encode", &examples(), "com", "--enc", "mix-asyn", "--expand-booleans", "false"]);
    assert!(stdout(&o).contains("l!<true>"));
}

#[test]
fn encode_exit_codes() {
    let o = pical(&["encode", &examples(), "server", "--enc", "mix-asyn2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("replicated input unsupported"));
    assert_eq!(code(&pical(&["encode", &examples(), "missing", "--enc", "sep-asyn"])), 1);
    assert_eq!(code(&pical(&["encode", "no/such/file.pi", "nilTerm", "--enc", "sep-asyn"])), 1);
    assert_eq!(code(&pical(&["encode", &examples(), "mixed", "--enc", "sep-asyn"])), 2);
}

#[test]
fn step_replays_scripts() {
    let o = pical(&["step", &examples(), "com", "--script", "0"]);
    let out = stdout(&o);
    assert!(out.contains("  0: com on x -> 0"), "{out}");
    assert!(!out.contains("  1:"));
    assert!(out.ends_with("[1] 0\nno redex\n"), "{out}");

    let o = pical(&["step", &examples(), "conflict", "--script", "1"]);
    let out = stdout(&o);
    let first: Vec<&str> = out.lines().take_while(|l| !l.starts_with("[1]")).collect();
    assert_eq!(first.iter().filter(|l| l.starts_with("  ")).count(), 3);

    let a = pical(&["step", &examples(), "conflict", "--enc", "mix-asyn", "--script", "0,0,1,0"]);
    let b = pical(&["step", &examples(), "conflict", "--enc", "mix-asyn", "--script", "0,0,1,0"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("[PureAdmin]"));
}

#[test]
fn graph_and_trace() {
    let o = pical(&["graph", &examples(), "com"]);
    assert_eq!(code(&o), 0);
    let g: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(g["states"].as_array().unwrap().len(), 2);
    assert_eq!(g["status"], "Complete");

    let o = pical(&["graph", &examples(), "com", "--enc", "mix-asyn", "--reduced"]);
    let g: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(g["edges"].as_array().unwrap().iter().any(|e| e["class"] == "NonAdmin"));

    let o = pical(&["trace", &examples(), "mixed", "--enc", "mix-asyn", "--json"]);
    assert_eq!(code(&o), 0);
    let steps: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(steps.as_array().unwrap().len() > 2);
    let o = pical(&["trace", &examples(), "com"]);
    assert_eq!(stdout(&o), "no success state is reachable\n");
}

#[test]
fn corpus_is_deterministic_and_well_formed() {
    let a = pical(&["corpus", "--seed", "42", "--size", "30"]);
    let b = pical(&["corpus", "--seed", "42", "--size", "30"]);
    assert_eq!(a.stdout, b.stdout);
    let file = parse_file(&stdout(&a)).unwrap();
    assert_eq!(file.declarations.len(), 30);
    assert!(file.declarations.iter().all(|d| well_formed(&d.term, CalculusId::PiMix).is_ok()));

    let o = pical(&["corpus", "--seed", "42", "--size", "30", "--sep-only"]);
    let file = parse_file(&stdout(&o)).unwrap();
    assert!(file.declarations.iter().all(|d| well_formed(&d.term, CalculusId::PiSep).is_ok()));
}

#[test]
fn check_exit_codes() {
    let o = pical(&["check", &examples(), "success", "--enc", "sep-asyn", "--criterion", "success"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("success-sensitiveness: pass"));

    let o = pical(&["check", &examples(), "counterexample", "--enc", "mix-asyn", "--criterion", "distribution"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Sequentialized"));
    assert!(stdout(&o).contains("ChainLock"));
    let o = pical(&["check", &examples(), "counterexample", "--enc", "sep-asyn", "--criterion", "distribution"]);
    assert!(stdout(&o).contains("Distributable"));

    let bounded = Command::new(env!("CARGO_BIN_EXE_pical"))
        .args(["check", &examples(), "mixed", "--enc", "mix-asyn", "--criterion", "completeness"])
        .env("PICAL_MAX_STATES", "5")
        .output()
        .unwrap();
    assert_eq!(code(&bounded), 3);
    assert!(stdout(&bounded).contains("unknown (bounds 5 states"));
}

#[test]
fn shipped_corpus_passes_and_witnesses_replay() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("corpus-report.json");
    let corpus = data("corpus.pi");
    let o = pical(&["check", corpus.to_str().unwrap(), "--all", "--enc", "sep-asyn", "--json", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let file = parse_file(&std::fs::read_to_string(&corpus).unwrap()).unwrap();
    let entries: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(entries.len(), file.declarations.len() * 7);
    let mut replayed = 0;
    for e in &entries {
        let r = &e["report"];
        for key in ["criterion", "verdict", "limits", "witnesses"] {
            assert!(r.get(key).is_some(), "report without {key}");
        }
        let decl = file.get(e["declaration"].as_str().unwrap()).unwrap();
        let root = encode(&decl.term, EncodingId::SepToAsyn).unwrap();
        for w in r["witnesses"].as_array().unwrap() {
            let steps = w.as_array().unwrap();
            assert_eq!(steps[0]["state"], hex(State::from_term(&root).0.digest));
            let mut cur = root.clone();
            for s in &steps[1..] {
                let next = enabled_steps(&cur, CalculusId::PiAsyn)
                    .into_iter()
                    .map(|(_, t)| t)
                    .find(|t| hex(State::from_term(t).0.digest) == s["state"].as_str().unwrap());
                cur = next.expect("witness step is a reduction");
            }
            replayed += 1;
        }
    }
    assert!(replayed > 0);
}

#[test]
fn fmt_is_stable() {
    let o = pical(&["fmt", &examples(), "--check"]);
    assert_eq!(code(&o), 0);
    let once = pical(&["fmt", &examples()]);
    assert_eq!(String::from_utf8_lossy(&once.stdout), std::fs::read_to_string(data("examples.pi")).unwrap());
}
