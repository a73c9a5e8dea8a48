use std::path::PathBuf;
use std::process::{Command, Output};

use absnorm::cli::{Report, VerdictKind};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn absnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_absnorm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn classify_json(name: &str) -> (String, Report) {
    let path = data(name);
    let o = absnorm(&["classify", path.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{name}");
    let text = stdout(&o);
    let report = Report::from_json(&text).expect("report parses");
    (text, report)
}

#[test]
fn classify_verdicts() {
    let cases = [
        ("shift_all_ones.json", VerdictKind::An, Some("1")),
        ("signed_shift.json", VerdictKind::An, Some("2")),
        ("finite_dip.json", VerdictKind::An, Some("1")),
        ("composite_dip.json", VerdictKind::An, Some("1")),
        ("below_strand.json", VerdictKind::NotAn, Some("1")),
        ("two_limits.json", VerdictKind::NotAn, None),
    ];
    for (name, verdict, alpha) in cases {
        let (_, report) = classify_json(name);
        assert_eq!(report.verdict, verdict, "{name}");
        assert_eq!(report.alpha.map(|a| a.to_string()).as_deref(), alpha, "{name}");
        assert_eq!(report.witness.is_some(), verdict == VerdictKind::NotAn, "{name}");
    }
}

#[test]
fn json_report_round_trips_byte_for_byte() {
    for name in ["shift_all_ones.json", "below_strand.json", "two_limits.json", "signed_shift.json"] {
        let (text, report) = classify_json(name);
        assert_eq!(format!("{}\n", report.to_json()), text, "{name}");
    }
}

#[test]
fn shift_text_names_the_branch() {
    let o = absnorm(&["classify", data("shift_all_ones.json").to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.starts_with("AN: yes, α = 1, branch (i')(ii')"), "{text}");
    assert!(text.contains("(ii')      yes"));

    let o = absnorm(&["classify", data("signed_shift.json").to_str().unwrap()]);
    assert!(stdout(&o).contains("branch (i)(ii)(iii)"));
}

#[test]
fn verify_passes_on_every_sample() {
    for name in [
        "shift_all_ones.json",
        "signed_shift.json",
        "finite_dip.json",
        "composite_dip.json",
        "below_strand.json",
        "two_limits.json",
    ] {
        let o = absnorm(&["verify", data(name).to_str().unwrap(), "--sizes", "10,50,200", "--tol", "1e-8"]);
        let text = stdout(&o);
        assert_eq!(o.status.code(), Some(0), "{name}: {text}");
        assert!(text.trim_end().ends_with("0 failed"), "{name}: {text}");
        assert!(!text.contains("FAIL"), "{name}: {text}");
    }
}

#[test]
fn invalid_input_exits_1() {
    let o = absnorm(&["classify", data("bad_ratio.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ratio must lie in (0,1)"));

    assert_eq!(absnorm(&["classify"]).status.code(), Some(1));
    assert_eq!(absnorm(&["classify", "/no/such/file.json"]).status.code(), Some(1));
    let o = absnorm(&["verify", data("two_limits.json").to_str().unwrap(), "--sizes", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn decompose_and_witness() {
    let o = absnorm(&["decompose", data("finite_dip.json").to_str().unwrap(), "--entries", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("rank F = 2"), "{text}");
    assert!(text.contains("F: {1: -3/4, 4: -1}"), "{text}");

    let o = absnorm(&["witness", data("two_limits.json").to_str().unwrap(), "--pairs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\t3/2\t"), "{text}");

    let o = absnorm(&["witness", data("shift_all_ones.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn spectrum_csv_export() {
    let out = std::env::temp_dir().join(format!("absnorm-spectrum-{}.csv", std::process::id()));
    let o = absnorm(&[
        "spectrum",
        data("finite_dip.json").to_str().unwrap(),
        "--truncate",
        "6",
        "--csv",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<(usize, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (i, v) = l.split_once(',').unwrap();
            (i.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(text.lines().next(), Some("index,eigenvalue"));
    // entries 1/4, 1, 3/2, 0, 5/4, 1
    let expected = [0.0, 0.25, 1.0, 1.0, 1.25, 1.5];
    assert_eq!(rows.len(), expected.len());
    for (k, ((i, v), e)) in rows.iter().zip(expected).enumerate() {
        assert_eq!(*i, k + 1);
        assert!((v - e).abs() < 1e-12, "{v} vs {e}");
    }
}
