//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or invalid input, 2 a verification check
//! failed.

mod report;
mod spec_file;
mod verify;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::classify::{an_certificate, classify_an, AnVerdict, ClassifyError, CompositeOperator, NotAnReason, Witness};
use crate::numlab::{jacobi_eigen, matrix_sqrt, truncate_composite, truncate_diagonal, truncate_shift, DEFAULT_TOL};
use crate::rational::Rational;
use crate::seqmodel::SequenceSpec;
use crate::shiftapp::{classify_shift, modulus, ShiftBranch, ShiftConditionReport};

pub use report::{
    BelowIndicesReport, BelowReport, CheckReport, CheckStatus, ConditionsReport, PairReport, ReasonReport, Report,
    VerdictKind, WitnessReport,
};
pub use spec_file::{parse_spec, parse_spec_str, Model};
pub use verify::{
    modulus_identity_error, resolvable_witness_count, verify_composite, verify_sequence, verify_shift, ESCAPE_MARGIN,
    IDENTITY_RANGE, WITNESS_VECTORS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

/// Section sizes used when a command does not ask for any.
pub const DEFAULT_SIZES: [usize; 3] = [10, 50, 200];
/// Witness vectors listed in JSON reports.
const JSON_WITNESS_VECTORS: usize = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("{0}")]
    NotApplicable(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INVALID
    }
}

#[derive(Debug, Parser)]
#[command(name = "absnorm", version, about = "Decide absolute norm attainment for diagonal operators and weighted shifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the verdict and the conditions behind it.
    Classify {
        file: PathBuf,
        /// Emit a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print alpha, K+ and F for an AN operator.
    Decompose {
        file: PathBuf,
        /// Number of leading entries to tabulate.
        #[arg(long, default_value_t = 20)]
        entries: usize,
    },
    /// Print a non-attainment witness for an operator that is not AN.
    Witness {
        file: PathBuf,
        /// Number of witness vectors to list.
        #[arg(long, default_value_t = 10)]
        pairs: usize,
    },
    /// Cross-check the verdict numerically on finite sections.
    Verify {
        file: PathBuf,
        /// Comma-separated section sizes.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Emit a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Eigenvalues of the N x N section (of |T| for shifts).
    Spectrum {
        file: PathBuf,
        #[arg(long)]
        truncate: usize,
        /// Write `index,eigenvalue` rows here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_INVALID
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Classify { file, json } => {
            let model = parse_spec(&file)?;
            let report = classify_report(&model)?;
            if json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                out.write_all(render_classify(&model, &report).as_bytes())?;
            }
            Ok(EXIT_OK)
        }
        Command::Decompose { file, entries } => {
            let model = parse_spec(&file)?;
            out.write_all(render_decomposition(&model, entries)?.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Witness { file, pairs } => {
            let model = parse_spec(&file)?;
            out.write_all(render_witness(&model, pairs)?.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Verify { file, sizes, tol, json } => {
            check_sizes(&sizes)?;
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Usage("--tol must be a positive number".into()));
            }
            let model = parse_spec(&file)?;
            let report = verify_report(&model, &sizes, tol)?;
            if json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                out.write_all(render_checks(&report).as_bytes())?;
            }
            Ok(if report.checks.iter().any(CheckReport::failed) { EXIT_CHECK_FAILED } else { EXIT_OK })
        }
        Command::Spectrum { file, truncate, csv } => {
            check_sizes(&[truncate])?;
            let model = parse_spec(&file)?;
            let values = section_spectrum(&model, truncate)?;
            let mut table = String::from("index,eigenvalue\n");
            for (i, v) in values.iter().enumerate() {
                let _ = writeln!(table, "{},{v:e}", i + 1);
            }
            match csv {
                Some(path) => {
                    write_file(&path, &table)?;
                    writeln!(
                        out,
                        "wrote {} eigenvalues to {} (min {:e}, max {:e})",
                        values.len(),
                        path.display(),
                        values.first().copied().unwrap_or(f64::NAN),
                        values.last().copied().unwrap_or(f64::NAN)
                    )?;
                }
                None => out.write_all(table.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn check_sizes(sizes: &[usize]) -> Result<(), CliError> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(CliError::Usage("section sizes must be positive".into()));
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Ascending eigenvalues of the `n`-section.
pub fn section_spectrum(model: &Model, n: usize) -> Result<Vec<f64>, CliError> {
    let numeric = |e: crate::numlab::NumError| CliError::Numeric(e.to_string());
    let section = match model {
        Model::Diagonal(seq) => truncate_diagonal(seq, n),
        Model::Shift(shift) => {
            let (_, tt) = truncate_shift(shift, n).map_err(|e| CliError::Usage(e.to_string()))?;
            matrix_sqrt(&tt, DEFAULT_TOL).map_err(numeric)?
        }
        Model::Composite(op) => truncate_composite(op, n),
    };
    Ok(jacobi_eigen(&section).map_err(numeric)?.values)
}

/// The `classify` report for a model.
pub fn classify_report(model: &Model) -> Result<Report, CliError> {
    let kind = model.kind().to_string();
    Ok(match model {
        Model::Diagonal(seq) => {
            let verdict = classify_an(seq);
            let (v, alpha, reason, witness) = report::verdict_fields(seq, &verdict, JSON_WITNESS_VECTORS);
            Report {
                kind,
                verdict: v,
                alpha,
                reason,
                conditions: Some(ConditionsReport::spectral(seq)),
                witness,
                checks: vec![],
            }
        }
        Model::Shift(shift) => {
            let (conditions, verdict) = classify_shift(shift);
            let moduli = modulus(shift);
            let (v, alpha, reason, witness) = report::verdict_fields(&moduli, &verdict, JSON_WITNESS_VECTORS);
            Report {
                kind,
                verdict: v,
                alpha,
                reason,
                conditions: Some(ConditionsReport::from_shift(&conditions)),
                witness,
                checks: vec![],
            }
        }
        Model::Composite(op) => composite_report(op, &DEFAULT_SIZES, DEFAULT_TOL, kind)?,
    })
}

fn composite_report(op: &CompositeOperator, sizes: &[usize], tol: f64, kind: String) -> Result<Report, CliError> {
    Ok(match an_certificate(op, sizes, tol) {
        Ok(cert) => Report {
            kind,
            verdict: VerdictKind::An,
            alpha: Some(cert.alpha.clone()),
            reason: None,
            conditions: Some(ConditionsReport::from_certificate(&cert)),
            witness: None,
            checks: vec![],
        },
        Err(ClassifyError::NotPositive { size, eigenvalue }) => Report {
            kind,
            verdict: VerdictKind::NotPositive,
            alpha: None,
            reason: None,
            conditions: Some(ConditionsReport::Composite {
                is_positive: false,
                rank_f: op.rank_f(),
                min_eigenvalue_per_size: vec![(size, eigenvalue)],
            }),
            witness: None,
            checks: vec![],
        },
        Err(e) => return Err(CliError::Numeric(e.to_string())),
    })
}

/// The `verify` report: the classification plus every check.
pub fn verify_report(model: &Model, sizes: &[usize], tol: f64) -> Result<Report, CliError> {
    let mut report = match model {
        Model::Composite(op) => composite_report(op, sizes, tol, model.kind().to_string())?,
        _ => classify_report(model)?,
    };
    report.checks = match model {
        Model::Diagonal(seq) => verify_sequence(seq, sizes, tol)?.1,
        Model::Shift(shift) => verify_shift(shift, sizes, tol)?.1,
        Model::Composite(op) => verify_composite(op, sizes, tol)?,
    };
    Ok(report)
}

fn set(values: &[Rational]) -> String {
    let items: Vec<String> = values.iter().map(Rational::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn verdict_line(report: &Report) -> String {
    match (report.verdict, &report.alpha) {
        (VerdictKind::An, Some(alpha)) => format!("AN: yes, α = {alpha}"),
        (VerdictKind::An, None) => "AN: yes".into(),
        (VerdictKind::NotAn, _) => "AN: no".into(),
        (VerdictKind::NotPositive, _) => "AN: undetermined (operator is not positive)".into(),
    }
}

fn describe_reason(reason: &ReasonReport) -> String {
    match reason {
        ReasonReport::MultipleEssentialPoints { points } => {
            format!("essential spectrum has {} points {}", points.len(), set(points))
        }
        ReasonReport::InfinitelyManyBelowAlpha { alpha, strand_index } => {
            format!("infinitely many spectral points below α = {alpha} (strand {strand_index} approaches from below)")
        }
    }
}

fn describe_witness(witness: &WitnessReport) -> String {
    match witness {
        WitnessReport::Coordinate { strand_index, sup, .. } => {
            format!("coordinate vectors on strand {strand_index}, norms increase to {sup} without reaching it")
        }
        WitnessReport::MixedPairs { a, b, sup, .. } => {
            format!("mixed pairs between limits {a} and {b}, norms increase to {sup} without reaching it")
        }
    }
}

fn shift_branch_label(report: &ShiftConditionReport) -> String {
    match &report.branch {
        ShiftBranch::InfiniteSpectrum { .. } => "(i)(ii)(iii)".into(),
        ShiftBranch::FiniteSpectrum { .. } => "(i')(ii')".into(),
    }
}

fn opt(b: Option<bool>) -> &'static str {
    match b {
        Some(b) => verify::yes_no(b),
        None => "n/a",
    }
}

fn render_classify(model: &Model, report: &Report) -> String {
    let mut s = String::new();
    let mut line = verdict_line(report);
    if let Model::Shift(shift) = model {
        let (conditions, _) = classify_shift(shift);
        let _ = write!(line, ", branch {}", shift_branch_label(&conditions));
    }
    let _ = writeln!(s, "{line}");
    if let Some(reason) = &report.reason {
        let _ = writeln!(s, "reason: {}", describe_reason(reason));
    }
    match &report.conditions {
        Some(ConditionsReport::Spectral { essential_spectrum, below_alpha, .. }) => {
            let _ = writeln!(s, "essential spectrum: {}", set(essential_spectrum));
            match below_alpha {
                Some(BelowReport::Finite { values }) => {
                    let _ = writeln!(s, "spectrum below α: {} (finite)", set(values));
                }
                Some(BelowReport::Infinite { strand_index }) => {
                    let _ = writeln!(s, "spectrum below α: infinite (strand {strand_index})");
                }
                None => {}
            }
        }
        Some(ConditionsReport::InfiniteSpectrum { i, ii, iii, limit_points, violating_values, .. }) => {
            let _ = writeln!(s, "limit points of |w|: {}", set(limit_points));
            let _ = writeln!(s, "condition  holds");
            let _ = writeln!(s, "(i)        {}", verify::yes_no(*i));
            let _ = writeln!(s, "(ii)       {}", opt(*ii));
            let _ = writeln!(s, "(iii)      {}", opt(*iii));
            if !violating_values.is_empty() {
                let _ = writeln!(s, "other values repeated infinitely often: {}", set(violating_values));
            }
        }
        Some(ConditionsReport::FiniteSpectrum { i_prime, ii_prime, sigma, infinite_multiplicity_values }) => {
            let _ = writeln!(s, "values of |w|: {}", set(sigma));
            let _ = writeln!(s, "infinitely repeated: {}", set(infinite_multiplicity_values));
            let _ = writeln!(s, "condition  holds");
            let _ = writeln!(s, "(i')       {}", verify::yes_no(*i_prime));
            let _ = writeln!(s, "(ii')      {}", verify::yes_no(*ii_prime));
        }
        Some(ConditionsReport::Composite { rank_f, min_eigenvalue_per_size, .. }) => {
            let _ = writeln!(s, "rank F: {rank_f}");
            for (n, l) in min_eigenvalue_per_size {
                let _ = writeln!(s, "N = {n}: smallest eigenvalue {l:e}");
            }
        }
        None => {}
    }
    if let Some(witness) = &report.witness {
        let _ = writeln!(s, "witness: {}", describe_witness(witness));
    }
    s
}

fn render_checks(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", verdict_line(report));
    for c in &report.checks {
        let status = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
        };
        let size = c.size.map(|n| format!(" N={n}")).unwrap_or_default();
        let _ = writeln!(s, "{status} {}{size}: {}", c.name, c.detail);
    }
    let failed = report.checks.iter().filter(|c| c.failed()).count();
    let _ = writeln!(s, "{} checks, {failed} failed", report.checks.len());
    s
}

fn diagonal_of(model: &Model) -> Option<SequenceSpec> {
    match model {
        Model::Diagonal(seq) => Some(seq.clone()),
        Model::Shift(shift) => Some(modulus(shift)),
        Model::Composite(_) => None,
    }
}

fn render_decomposition(model: &Model, entries: usize) -> Result<String, CliError> {
    let mut s = String::new();
    if let Model::Composite(op) = model {
        let _ = writeln!(s, "α = {}", op.alpha());
        let _ = writeln!(s, "rank F = {}", op.rank_f());
        let support: Vec<String> = op.f_support().iter().map(usize::to_string).collect();
        let _ = writeln!(s, "F support: {{{}}}", support.join(", "));
        let _ = writeln!(s, "n\tK(n)\tT(n,n)");
        for n in 1..=entries {
            let _ = writeln!(s, "{n}\t{}\t{}", op.k_diag().entry(n), op.entry(n, n));
        }
        return Ok(s);
    }
    let seq = diagonal_of(model).expect("diagonal or shift");
    let decomposition = match classify_an(&seq) {
        AnVerdict::IsAn { decomposition, .. } => decomposition,
        AnVerdict::NotAn { reason, .. } => {
            return Err(CliError::NotApplicable(format!(
                "operator is not AN ({}); no decomposition exists",
                describe_reason(&ReasonReport::from(&reason))
            )));
        }
    };
    let _ = writeln!(s, "α = {}", decomposition.alpha());
    let _ = writeln!(s, "rank F = {}", decomposition.rank_f());
    let f: Vec<String> = decomposition.f_entries().iter().map(|(n, v)| format!("{n}: {v}")).collect();
    let _ = writeln!(s, "F: {{{}}}", f.join(", "));
    let _ = writeln!(s, "n\tT(n)\tK+(n)\tF(n)");
    for (i, t) in seq.entries(entries).iter().enumerate() {
        let n = i + 1;
        let _ = writeln!(s, "{n}\t{t}\t{}\t{}", decomposition.kplus_entry(n), decomposition.f_entry(n));
    }
    Ok(s)
}

fn render_witness(model: &Model, count: usize) -> Result<String, CliError> {
    let seq = diagonal_of(model)
        .ok_or_else(|| CliError::NotApplicable("composite operators are AN once positive; no witness".into()))?;
    let (reason, witness) = match classify_an(&seq) {
        AnVerdict::NotAn { reason, witness } => (reason, witness),
        AnVerdict::IsAn { alpha, .. } => {
            return Err(CliError::NotApplicable(format!("operator is AN with α = {alpha}; no witness exists")));
        }
    };
    let mut s = String::new();
    let _ = writeln!(s, "reason: {}", describe_reason(&ReasonReport::from(&reason)));
    let _ = writeln!(s, "witness: {}", describe_witness(&WitnessReport::new(&seq, &witness, 0)));
    if let NotAnReason::MultipleEssentialPoints { .. } = reason {
        debug_assert_eq!(witness.kind(), "mixed_pairs");
    }
    let predicted = witness.predicted_norms(&seq, count);
    match &witness {
        Witness::Coordinate(_) => {
            let _ = writeln!(s, "m\tindex\tnorm");
            for (m, ((_, n, _), p)) in seq.strand_occurrences(coordinate_strand(&witness)).zip(&predicted).enumerate() {
                let _ = writeln!(s, "{}\t{n}\t{p}", m + 1);
            }
        }
        Witness::MixedPairs(w) => {
            let _ = writeln!(s, "k\ta_index\tb_index\tv\tu\tμ\tt");
            for p in w.pairs(&seq).take(count) {
                let _ = writeln!(s, "{}\t{}\t{}\t{}\t{}\t{}\t{:.12}", p.k, p.a_index, p.b_index, p.v, p.u, p.mu, p.t());
            }
        }
    }
    Ok(s)
}

fn coordinate_strand(witness: &Witness) -> usize {
    match witness {
        Witness::Coordinate(w) => w.strand_index,
        Witness::MixedPairs(w) => w.a_strand,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("absnorm").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn temp_spec(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("absnorm-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    const ALL_ONES: &str = r#"{"kind": "shift", "strands": [{"limit": "1", "approach": "exact"}]}"#;
    const BELOW: &str =
        r#"{"kind": "diagonal", "strands": [{"limit": "1", "approach": "below", "amplitude": "1/2", "ratio": "1/2"}]}"#;
    const TWO_LIMITS: &str = r#"{"kind": "diagonal", "strands": [
        {"limit": "1", "approach": "exact"}, {"limit": "2", "approach": "exact"}]}"#;

    #[test]
    fn parse_examples() {
        let m = parse_spec_str(
            r#"{"kind": "diagonal", "strands": [{"limit": "1", "approach": "above", "amplitude": "1", "ratio": "1/2"}],
                "overrides": {"2": "10"}}"#,
        )
        .unwrap();
        let Model::Diagonal(seq) = m else { panic!("expected diagonal") };
        assert_eq!(seq.entry(1), "2".parse().unwrap());
        assert_eq!(seq.entry(2), "10".parse().unwrap());
        assert_eq!(seq.entry(3), "5/4".parse().unwrap());

        assert!(matches!(parse_spec_str(ALL_ONES).unwrap(), Model::Shift(_)));
        let comp = parse_spec_str(
            r#"{"kind": "composite", "alpha": 1, "k_diag": {"strands": [{"limit": 0, "approach": "exact"}]},
                "f_terms": [{"coef": "-1/2", "vector": {"1": 1}}]}"#,
        )
        .unwrap();
        let Model::Composite(op) = comp else { panic!("expected composite") };
        assert_eq!(op.entry(1, 1), "1/2".parse().unwrap());
    }

    #[test]
    fn parse_errors() {
        let bad_ratio =
            r#"{"kind": "diagonal", "strands": [{"limit": "1", "approach": "above", "amplitude": "1", "ratio": "3/2"}]}"#;
        let e = parse_spec_str(bad_ratio).unwrap_err();
        assert!(e.to_string().contains("ratio must lie in (0,1)"), "{e}");
        for text in [
            r#"{"kind": "diagonal", "strands": []}"#,
            r#"{"kind": "diagonal", "strands": [{"limit": "1", "approach": "exact"}], "overrides": {"0": "1"}}"#,
            r#"{"kind": "diagonal", "strands": [{"limit": "1", "approach": "exact"}], "overrides": {"1": "1", "01": "2"}}"#,
            r#"{"kind": "diagonal", "strands": [{"limit": "1", "approach": "exact", "amplitude": "1"}]}"#,
            r#"{"kind": "diagonal", "strands": [{"limit": "1", "approach": "below"}]}"#,
            r#"{"kind": "diagonal", "strands": [{"limit": "-1", "approach": "exact"}]}"#,
            r#"{"kind": "diagonal", "strands": [{"limit": "1", "approach": "exact", "extra": 1}]}"#,
            r#"{"kind": "matrix"}"#,
            r#"{"kind": "shift", "strands": [{"limit": "1", "approach": "exact"}], "phases": {"1": "x"}}"#,
            r#"{"kind": "composite", "alpha": 1, "k_diag": {"strands": [{"limit": 1, "approach": "exact"}]}}"#,
            "not json",
        ] {
            assert!(matches!(parse_spec_str(text), Err(CliError::InvalidSpec(_))), "{text}");
        }
    }

    #[test]
    fn classify_text_and_exit_codes() {
        let ones = temp_spec("ones.json", ALL_ONES);
        let (code, out, _) = run_args(&["classify", ones.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.starts_with("AN: yes, α = 1, branch (i')(ii')"), "{out}");

        let below = temp_spec("below.json", BELOW);
        let (code, out, _) = run_args(&["classify", below.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.starts_with("AN: no"), "{out}");

        let (code, _, err) = run_args(&["classify", "/nonexistent/spec.json"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("cannot read"));

        let (code, _, _) = run_args(&["frobnicate"]);
        assert_eq!(code, EXIT_INVALID);
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("classify"));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        for (name, text) in [("ones.json", ALL_ONES), ("below.json", BELOW), ("two.json", TWO_LIMITS)] {
            let report = classify_report(&parse_spec_str(text).unwrap()).unwrap();
            let json = report.to_json();
            let back = Report::from_json(&json).unwrap();
            assert_eq!(back, report, "{name}");
            assert_eq!(back.to_json(), json, "{name}");
        }
        let report = verify_report(&parse_spec_str(BELOW).unwrap(), &[10, 50], 1e-8).unwrap();
        assert_eq!(Report::from_json(&report.to_json()).unwrap().to_json(), report.to_json());
    }

    #[test]
    fn json_fields() {
        let report = classify_report(&parse_spec_str(TWO_LIMITS).unwrap()).unwrap();
        let value: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(value["kind"], "diagonal");
        assert_eq!(value["verdict"], "not_an");
        assert_eq!(value["reason"]["type"], "multiple_essential_points");
        assert_eq!(value["witness"]["type"], "mixed_pairs");
        assert_eq!(value["witness"]["pairs"][0]["mu"], "3/2");
    }

    #[test]
    fn verify_passes_on_examples() {
        for text in [ALL_ONES, BELOW, TWO_LIMITS] {
            let report = verify_report(&parse_spec_str(text).unwrap(), &DEFAULT_SIZES, 1e-8).unwrap();
            assert!(!report.checks.is_empty());
            assert!(report.checks.iter().all(|c| !c.failed()), "{report:?}");
        }
    }

    #[test]
    fn verify_exit_code_on_not_positive_composite() {
        let path = temp_spec(
            "neg.json",
            r#"{"kind": "composite", "alpha": 1, "k_diag": {"strands": [{"limit": 0, "approach": "exact"}]},
                "f_terms": [{"coef": -2, "vector": {"1": 1}}]}"#,
        );
        let (code, out, _) = run_args(&["verify", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_CHECK_FAILED);
        assert!(out.contains("FAIL positivity"));
    }

    #[test]
    fn decompose_and_witness_commands() {
        let dip = temp_spec(
            "dip.json",
            r#"{"kind": "diagonal", "strands": [{"limit": "1", "approach": "exact"}], "overrides": {"1": "1/2"}}"#,
        );
        let (code, out, _) = run_args(&["decompose", dip.to_str().unwrap(), "--entries", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("α = 1") && out.contains("F: {1: -1/2}"), "{out}");
        let (code, _, err) = run_args(&["witness", dip.to_str().unwrap()]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("no witness"));

        let two = temp_spec("two.json", TWO_LIMITS);
        let (code, out, _) = run_args(&["witness", two.to_str().unwrap(), "--pairs", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().filter(|l| l.starts_with(char::is_numeric)).count(), 3);
        let (code, _, _) = run_args(&["decompose", two.to_str().unwrap()]);
        assert_eq!(code, EXIT_INVALID);
    }

    #[test]
    fn spectrum_csv() {
        let ones = temp_spec("ones.json", ALL_ONES);
        let csv = ones.with_file_name("ones.csv");
        let (code, _, _) =
            run_args(&["spectrum", ones.to_str().unwrap(), "--truncate", "5", "--csv", csv.to_str().unwrap()]);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(&csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,eigenvalue");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("1,"));
        let values: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert!(values[0].abs() < 1e-12);
        assert!(values[1..].iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
}
