#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use sqclp::frontend::{load_program, parse_goal};
use sqclp::qualdom::{QualDomain, QualValue};
use sqclp::rational::parse_rational;
use sqclp::sqchl::{solve, SearchOptions, Solution};
use sqclp::syntax::Program;

pub fn examples_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples")
}

pub fn example_text(name: &str) -> String {
    std::fs::read_to_string(examples_dir().join(name)).expect("example file exists")
}

pub fn program(text: &str) -> Program {
    match load_program(text) {
        Ok(p) => p,
        Err(diags) => panic!("{diags:?}"),
    }
}

pub fn example(name: &str) -> Program {
    program(&example_text(name))
}

/// Goals listed in `%? ` comment lines.
pub fn sample_goals(text: &str) -> Vec<String> {
    text.lines()
        .filter_map(|l| l.strip_prefix("%? "))
        .map(str::to_string)
        .collect()
}

/// All `.sqclp` files of the example corpus, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(examples_dir())
        .expect("examples directory")
        .filter_map(|e| {
            let path = e.ok()?.path();
            (path.extension()? == "sqclp").then(|| {
                let name = path.file_name().unwrap().to_string_lossy().into_owned();
                (name, std::fs::read_to_string(&path).unwrap())
            })
        })
        .collect();
    out.sort();
    out
}

pub fn run(program: &Program, goal: &str, opts: &SearchOptions) -> Vec<Solution> {
    let goal = parse_goal(goal, &program.qdom).expect("goal parses");
    solve(program, &goal, opts)
        .expect("goal is well formed")
        .collect()
}

pub fn r(s: &str) -> sqclp::rational::Rational {
    parse_rational(s).expect("rational literal")
}

pub fn u(s: &str) -> QualValue {
    QualValue::certainty(r(s))
}

pub fn w(s: &str) -> QualValue {
    QualValue::weight(r(s))
}

pub fn uw(c: &str, d: &str) -> QualValue {
    QualValue::pair(u(c), w(d))
}

pub fn uw_domain() -> QualDomain {
    QualDomain::product(QualDomain::Uncertainty, QualDomain::Weight)
}
