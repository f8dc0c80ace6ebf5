//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use genbind::gen::{random_term, GenConfig};
use genbind::syntax::{self, SymbolTable};
use genbind::{lambda, systemf, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn tests_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub fn golden_dir() -> PathBuf {
    tests_dir().join("golden")
}

/// Golden cases as (name, argv) pairs, sorted by name. A `.cmd` file holds
/// one argument per line.
pub fn golden_cases() -> Vec<(String, Vec<String>)> {
    let mut cases: Vec<(String, Vec<String>)> = fs::read_dir(golden_dir())
        .expect("golden directory")
        .filter_map(|e| {
            let path = e.ok()?.path();
            if path.extension()? != "cmd" {
                return None;
            }
            let name = path.file_stem()?.to_str()?.to_string();
            let text = fs::read_to_string(&path).ok()?;
            Some((name, text.lines().map(str::to_string).collect()))
        })
        .collect();
    cases.sort();
    cases
}

/// Runs the binary from the golden directory and renders stdout, the exit
/// status and stderr into one transcript.
pub fn transcript(args: &[String]) -> String {
    let output = Command::new(env!("CARGO_BIN_EXE_genbind"))
        .args(args)
        .current_dir(golden_dir())
        .output()
        .expect("run genbind");
    let mut text = String::from_utf8_lossy(&output.stdout).into_owned();
    text.push_str(&format!("--- exit {}\n", output.status.code().unwrap_or(-1)));
    text.push_str(&String::from_utf8_lossy(&output.stderr));
    text
}

/// Compares one case with its `.out` file, or rewrites the file when
/// `UPDATE_GOLDEN` is set.
pub fn check_golden(name: &str, args: &[String]) -> Result<(), String> {
    let path = golden_dir().join(format!("{}.out", name));
    let actual = transcript(args);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = fs::read_to_string(&path).map_err(|e| format!("{}: {}", path.display(), e))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!("{}: expected\n{}\ngot\n{}", name, expected, actual))
    }
}

/// Surface syntax of one object language.
#[derive(Clone, Copy, Debug)]
pub enum Surface {
    Lambda,
    SystemF,
}

impl Surface {
    pub fn parse(self, text: &str, st: &mut SymbolTable) -> genbind::Result<Term> {
        match self {
            Surface::Lambda => syntax::parse_lambda(text, st),
            Surface::SystemF => syntax::parse_systemf(text, st),
        }
    }

    pub fn print(self, t: &Term, st: &SymbolTable) -> String {
        match self {
            Surface::Lambda => syntax::print_lambda(t, st),
            Surface::SystemF => syntax::print_systemf(t, st),
        }
    }

    pub fn corpus_stem(self) -> &'static str {
        match self {
            Surface::Lambda => "lambda",
            Surface::SystemF => "systemf",
        }
    }
}

/// parse(print(t)) == t and print(parse(print(t))) == print(t) on `count`
/// random terms; returns the failures.
pub fn round_trip_failures(surface: Surface, count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GenConfig::default();
    let code = match surface {
        Surface::Lambda => lambda::lam_code(),
        Surface::SystemF => systemf::term_code(),
    };
    let mut failures = Vec::new();
    for _ in 0..count {
        let t = random_term(&code, &cfg, &mut rng);
        let text = surface.print(&t, &SymbolTable::new());
        let mut st = SymbolTable::new();
        st.reserve_explicit(&text);
        match surface.parse(&text, &mut st) {
            Ok(back) if back == t && surface.print(&back, &st) == text => {}
            Ok(_) => failures.push(format!("round trip changed {}", text)),
            Err(e) => failures.push(format!("{}: {}", text, e)),
        }
    }
    failures
}

/// Same property for the generic s-expression syntax over `code`.
pub fn generic_round_trip_failures(
    code: &std::sync::Arc<genbind::FunctorCode>,
    count: usize,
    seed: u64,
) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GenConfig::default();
    let mut failures = Vec::new();
    for _ in 0..count {
        let t = random_term(code, &cfg, &mut rng);
        let text = syntax::print_generic(&t, &SymbolTable::new());
        let mut st = SymbolTable::new();
        st.reserve_explicit(&text);
        match syntax::parse_generic_term(code, &text, &mut st) {
            Ok(back) if back == t => {}
            Ok(_) => failures.push(format!("round trip changed {}", text)),
            Err(e) => failures.push(format!("{}: {}", text, e)),
        }
    }
    failures
}

/// Each non-empty line of `corpus/<stem>.txt` is parsed with a fresh symbol
/// table and re-printed; the result must match the same line of
/// `corpus/<stem>.expected`.
pub fn corpus_failures(surface: Surface) -> Vec<String> {
    let dir = tests_dir().join("corpus");
    let input = fs::read_to_string(dir.join(format!("{}.txt", surface.corpus_stem()))).expect("corpus input");
    let rendered: Vec<String> = input
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let mut st = SymbolTable::new();
            st.reserve_explicit(line);
            match surface.parse(line, &mut st) {
                Ok(t) => surface.print(&t, &st),
                Err(e) => format!("error: {}", e),
            }
        })
        .collect();
    let expected_path = dir.join(format!("{}.expected", surface.corpus_stem()));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        let mut text = rendered.join("\n");
        text.push('\n');
        fs::write(&expected_path, text).expect("write corpus expectation");
        return Vec::new();
    }
    let expected = fs::read_to_string(&expected_path).expect("corpus expectation");
    let expected: Vec<&str> = expected.lines().collect();
    let mut failures = Vec::new();
    if expected.len() != rendered.len() {
        failures.push(format!(
            "{} expected lines, {} rendered",
            expected.len(),
            rendered.len()
        ));
    }
    for (i, (e, r)) in expected.iter().zip(&rendered).enumerate() {
        if *e != r {
            failures.push(format!("line {}: expected {:?}, got {:?}", i + 1, e, r));
        }
    }
    failures
}
