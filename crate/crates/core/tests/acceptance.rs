//! One test per acceptance criterion, so the harness prints one pass/fail
//! line for each. Run with `--nocapture` to see check counts and timings.

use std::time::Instant;

use gtflow_core::corpus::Corpus;
use gtflow_core::verify::{
    verify_gt, verify_lidskii, verify_posets, verify_subdivision, verify_tableaux, verify_transform, Bounds, Report,
};

fn bounds() -> Bounds {
    Bounds { n: 4, lmax: 4, bmax: 3, amax: 3, poset_max: 7, trials: 100, seed: 2024 }
}

fn criterion(k: u8, title: &str, rep: Report, mut failures: Vec<String>, start: Instant) {
    let mine = rep.for_criterion(k);
    if mine.is_empty() {
        failures.push("no checks ran".into());
    }
    failures.extend(
        mine.iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} / {}: expected {} got {}", c.identity, c.instance, c.expected, c.actual)),
    );
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {k}: {status} ({} checks, {:.2}s) {title}", mine.len(), start.elapsed().as_secs_f64());
    for f in failures.iter().take(20) {
        println!("    {f}");
    }
    assert!(failures.is_empty(), "criterion {k} failed: {}", failures.join("; "));
}

#[test]
fn criterion_1_gt_volume_and_point_chain() {
    let t = Instant::now();
    criterion(1, "GT volume and point-count chain", verify_gt(&bounds()), vec![], t);
}

#[test]
fn criterion_2_lidskii_formulas() {
    let t = Instant::now();
    let corpus = Corpus::builtin();
    let mut pre = Vec::new();
    if corpus.networks.len() < 20 {
        pre.push(format!("only {} networks", corpus.networks.len()));
    }
    for (name, g) in &corpus.networks {
        if g.vertex_count() > 6 || g.edges().len() > 10 {
            pre.push(format!("{name} exceeds 6 vertices or 10 edges"));
        }
    }
    criterion(2, "Lidskii formulas against enumeration and Ehrhart", verify_lidskii(&corpus.networks), pre, t);
}

#[test]
fn criterion_3_shifted_tableaux_bijection() {
    let t = Instant::now();
    criterion(3, "shifted tableaux against Kostant, with bijection", verify_tableaux(&bounds()), vec![], t);
}

#[test]
fn criterion_4_gamma_bijection() {
    let t = Instant::now();
    let corpus = Corpus::builtin();
    let mut pre = Vec::new();
    let small = corpus.embeddings.iter().filter(|(_, me)| me.embedding().base().len() <= 8).count();
    if small < 10 {
        pre.push(format!("only {small} embeddings with at most 8 elements"));
    }
    criterion(4, "Γ bijection for marked embeddings", verify_transform(&corpus.embeddings, &bounds()), pre, t);
}

#[test]
fn criterion_5_marked_volume_and_ehrhart() {
    let t = Instant::now();
    let rep = verify_posets(&Corpus::builtin().embeddings, &bounds());
    criterion(5, "marked volume, extensions, order polynomial", rep, vec![], t);
}

#[test]
fn criterion_6_log_concavity() {
    let t = Instant::now();
    let rep = verify_posets(&Corpus::builtin().embeddings, &bounds());
    criterion(6, "log-concavity of extension counts", rep, vec![], t);
}

#[test]
fn criterion_7_reduction_tree_conservation() {
    let t = Instant::now();
    criterion(7, "reduction tree conservation", verify_subdivision(&Corpus::builtin(), &bounds()), vec![], t);
}

#[test]
fn criterion_8_extensions_through_leaves_and_flows() {
    let t = Instant::now();
    let rep = verify_subdivision(&Corpus::builtin(), &bounds());
    criterion(8, "linear extensions through leaves and flows", rep, vec![], t);
}

#[test]
fn criterion_9_minkowski_additivity() {
    let t = Instant::now();
    let rep = verify_posets(&Corpus::builtin().embeddings, &bounds());
    criterion(9, "Minkowski additivity of markings", rep, vec![], t);
}
