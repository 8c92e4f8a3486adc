use gtflow_core::corpus::Corpus;
use gtflow_core::verify::{run_verify, Bounds, Scope};

#[test]
fn builtin_corpus_verifies() {
    let rep = run_verify(Scope::All, &Bounds::default(), &Corpus::builtin());
    for n in &rep.notes {
        println!("note: {n}");
    }
    for c in rep.failures() {
        println!("FAIL [{}] {} / {}: expected {} got {}", c.criterion, c.identity, c.instance, c.expected, c.actual);
    }
    println!("{} checks", rep.checks.len());
    assert!(rep.passed());
}
