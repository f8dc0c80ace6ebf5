//! Byte-exact CLI transcripts. Set `UPDATE_GOLDEN=1` to regenerate.

mod common;

use common::{check_golden, corpus_failures, golden_cases, transcript, Surface};

#[test]
fn transcripts_match() {
    let cases = golden_cases();
    assert!(cases.len() >= 30, "only {} golden cases", cases.len());
    let failures: Vec<String> = cases
        .iter()
        .filter_map(|(name, args)| check_golden(name, args).err())
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}

#[test]
fn output_is_deterministic() {
    for (_, args) in golden_cases().iter().take(10) {
        assert_eq!(transcript(args), transcript(args));
    }
}

#[test]
fn lambda_corpus_renders_canonically() {
    let failures = corpus_failures(Surface::Lambda);
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn systemf_corpus_renders_canonically() {
    let failures = corpus_failures(Surface::SystemF);
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
