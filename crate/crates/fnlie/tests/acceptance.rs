//! The acceptance gate: one test per criterion, each printing a single
//! pass/fail line (run with `--nocapture` to see them alongside the
//! harness output).

use std::process::Command;

use fnlie::dsl::{Binding, DefKind, ModelFile};
use fnlie::rand_gen;
use fnlie::verify::{run_suite, Suite, SuiteOutcome, SuiteParams};

fn params(dim: usize, trials: u64, seed: u64) -> SuiteParams {
    SuiteParams { dim, max_degree: 2, coeff_degree: 2, trials, seed }
}

fn run(criterion: &str, suite: Suite, p: &SuiteParams) {
    match run_suite(suite, p).unwrap() {
        SuiteOutcome::Pass { .. } => {}
        SuiteOutcome::Fail { trial, reason, model } => {
            println!("{criterion}: fail");
            panic!(
                "{} failed at dim {} trial {trial}: {reason}\n{}",
                suite.name(),
                p.dim,
                model.pretty_print()
            );
        }
    }
}

fn spread(criterion: &str, suite: Suite, trials: u64, seed: u64) {
    // the bulk at dim 2, plus smaller runs at the other desk-scale dims
    run(criterion, suite, &params(2, trials, seed));
    run(criterion, suite, &params(1, trials.min(25), seed + 1));
    run(criterion, suite, &params(3, trials.min(25), seed + 2));
    println!("{criterion}: pass");
}

#[test]
fn criterion_01_fn_graded_antisymmetry_and_jacobi() {
    run("criterion 01", Suite::FnAntisym, &params(2, 200, 101));
    run("criterion 01", Suite::FnAntisym, &params(1, 25, 102));
    run("criterion 01", Suite::FnAntisym, &params(3, 25, 103));
    run("criterion 01", Suite::FnJacobi, &params(2, 50, 104));
    run("criterion 01", Suite::FnJacobi, &params(3, 10, 105));
    println!("criterion 01: pass");
}

#[test]
fn criterion_02_dual_route_fn_bracket() {
    run("criterion 02", Suite::DualRoute, &params(2, 200, 201));
    run("criterion 02", Suite::DualRoute, &params(1, 25, 202));
    run("criterion 02", Suite::DualRoute, &params(3, 25, 203));
    println!("criterion 02: pass");
}

#[test]
fn criterion_03_lie_derivation_identity() {
    spread("criterion 03", Suite::LieDerivation, 100, 301);
}

#[test]
fn criterion_04_projectable_closure_and_underline() {
    spread("criterion 04", Suite::ProjClosure, 100, 401);
}

#[test]
fn criterion_05_liouville_brackets_characterize_linearity() {
    spread("criterion 05", Suite::LinearClosure, 100, 501);
}

#[test]
fn criterion_06_hermitian_implies_complex_linear_and_two_routes() {
    // every 10th trial is a deliberate non-Hermitian instance that both
    // routes must reject, so 100 trials include 10 rejections
    spread("criterion 06", Suite::HermitianClosure, 100, 601);
}

#[test]
fn criterion_07_hermitian_closure_decomposition() {
    spread("criterion 07", Suite::HermitianClosure, 100, 701);
}

#[test]
fn criterion_08_curvature_lemma_identities() {
    // trials alternate general linear and Hermitian connections: 50 + 50
    run("criterion 08", Suite::CurvatureIdentities, &params(2, 100, 801));
    run("criterion 08", Suite::CurvatureIdentities, &params(1, 20, 802));
    run("criterion 08", Suite::CurvatureIdentities, &params(3, 20, 803));
    println!("criterion 08: pass");
}

#[test]
fn criterion_09_hermitian_connection_triad() {
    // the Hermitian half of the suite checks Phi = 2dA = i tr R, dPhi = 0,
    // R = -i Phi (x) I, and the nabla Leibniz rule; 100 trials = 50 Hermitian
    run("criterion 09", Suite::CurvatureIdentities, &params(2, 100, 901));
    run("criterion 09", Suite::CurvatureIdentities, &params(3, 20, 902));
    println!("criterion 09: pass");
}

#[test]
fn criterion_10_classification_theorem() {
    run("criterion 10", Suite::IsoTheorem, &params(2, 100, 1001));
    run("criterion 10", Suite::IsoTheorem, &params(3, 25, 1002));
    run("criterion 10", Suite::InversePair, &params(2, 100, 1003));
    run("criterion 10", Suite::InversePair, &params(3, 25, 1004));
    println!("criterion 10: pass");
}

#[test]
fn criterion_11_jacobi_defect_law() {
    // dims 1 and 2 exercise the closed route only; at dim 3 every fifth
    // trial is a non-closed Phi on a decomposable triple (20 of 100)
    run("criterion 11", Suite::JacobiDefect, &params(1, 25, 1101));
    run("criterion 11", Suite::JacobiDefect, &params(2, 100, 1102));
    run("criterion 11", Suite::JacobiDefect, &params(3, 100, 1103));
    println!("criterion 11: pass");
}

fn fnlie(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_fnlie"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

fn corpus_model(index: usize) -> ModelFile {
    let mut rng = rand_gen::trial_rng(0xC0_FFEE, index as u64);
    let dim = 1 + index % 3;
    let names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut m = ModelFile::new("E", &refs);
    let qc = m.qchart.clone();
    let total = qc.total().clone();
    m.push(
        DefKind::Form,
        "a",
        Binding::Form(rand_gen::form(&mut rng, &total, index % 3, 2)),
    );
    m.push(
        DefKind::Tvf,
        "T",
        Binding::Tvf(rand_gen::tvf(&mut rng, &total, (index + 1) % 3, 2)),
    );
    m.push(
        DefKind::ProjTvf,
        "V",
        Binding::ProjTvf(rand_gen::hermitian_proj_tvf(&mut rng, &qc, index % 3, 2)),
    );
    m.push(DefKind::Section, "Psi", Binding::Section(rand_gen::section(&mut rng, &qc, 2)));
    m.push(
        DefKind::Connection,
        "c",
        Binding::Connection(rand_gen::linear_connection(&mut rng, &qc, 2)),
    );
    m
}

#[test]
fn criterion_12_cli_determinism_and_fixpoint_corpus() {
    // byte-identical repeated runs, in both formats
    for format in ["text", "json"] {
        let args = [
            "verify",
            "iso-theorem",
            "--dim",
            "2",
            "--trials",
            "20",
            "--seed",
            "7",
            "--format",
            format,
        ];
        let (out1, _, code1) = fnlie(&args);
        let (out2, _, code2) = fnlie(&args);
        assert_eq!(code1, 0, "verify run failed:\n{out1}");
        assert_eq!(code2, 0);
        assert_eq!(out1, out2, "{format} output is not deterministic");
    }
    // a 20-file corpus on which pretty-print/parse is a fixpoint
    for index in 0..20 {
        let m = corpus_model(index);
        let printed = m.pretty_print();
        let reparsed = ModelFile::parse(&printed)
            .unwrap_or_else(|e| panic!("corpus file {index} does not re-parse: {e}\n{printed}"));
        assert_eq!(
            reparsed.pretty_print(),
            printed,
            "corpus file {index} is not a pretty-print fixpoint"
        );
        assert_eq!(reparsed.defs, m.defs, "corpus file {index} changed under the round trip");
    }
    println!("criterion 12: pass");
}
