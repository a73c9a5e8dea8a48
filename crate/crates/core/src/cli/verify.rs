//! Numerical cross-checks of a verdict on finite sections.

use crate::classify::{an_certificate, classify_an, AnVerdict, ClassifyError, CompositeOperator, Decomposition, Witness};
use crate::numlab::{
    matrix_sqrt, spectral_count_below, truncate_composite, truncate_diagonal, truncate_shift, verify_witness_numeric,
    Matrix,
};
use crate::seqmodel::SequenceSpec;
use crate::shiftapp::{classify_shift, modulus, WeightedShift};

use super::report::CheckReport;
use super::CliError;

/// Largest witness prefix tried per section.
pub const WITNESS_VECTORS: usize = 20;
/// Exact indices compared in the decomposition identity.
pub const IDENTITY_RANGE: usize = 1000;
/// Margin by which restricted norms must stay below the supremum.
pub const ESCAPE_MARGIN: f64 = 1e-12;
/// Relative spacing a predicted norm needs to be distinguishable in f64.
const RESOLUTION: f64 = 1e-9;

fn numeric(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

/// Number of leading witness vectors that fit in the `n`-section and whose
/// predicted norms are separated from each other and from the supremum well
/// beyond f64 rounding.
pub fn resolvable_witness_count(seq: &SequenceSpec, witness: &Witness, n: usize, cap: usize) -> usize {
    let predicted = witness.predicted_norms(seq, cap);
    let vectors = witness.basis_vectors(seq, cap);
    let sup = witness.sup().to_f64();
    let res = RESOLUTION * sup.abs().max(1.0);
    let mut count = 0;
    let mut previous = f64::NEG_INFINITY;
    for (v, p) in vectors.iter().zip(&predicted) {
        let p = p.to_f64();
        if v.iter().any(|&(idx, _)| idx > n) || sup - p < res || p - previous < res {
            break;
        }
        previous = p;
        count += 1;
    }
    count
}

fn decomposition_checks(seq: &SequenceSpec, d: &Decomposition, sizes: &[usize], tol: f64) -> Result<Vec<CheckReport>, CliError> {
    let mut checks = Vec::new();
    let entries = seq.entries(IDENTITY_RANGE);
    let kplus = d.kplus().entries(IDENTITY_RANGE);
    let mismatch = (1..=IDENTITY_RANGE).find(|&n| d.reassemble(n) != entries[n - 1]);
    let negative = kplus.iter().position(|k| k.is_negative()).map(|i| i + 1);
    checks.push(CheckReport::new(
        "decomposition_identity",
        None,
        mismatch.is_none() && negative.is_none(),
        match (mismatch, negative) {
            (Some(n), _) => format!("alpha + K+ + F differs from T at n = {n}"),
            (None, Some(n)) => format!("K+ is negative at n = {n}"),
            (None, None) => format!("exact for n <= {IDENTITY_RANGE}, rank F = {}", d.rank_f()),
        },
    ));

    let composite = d.to_composite();
    let alpha = d.alpha().to_f64();
    for &n in sizes {
        let diag = truncate_diagonal(seq, n);
        let diff = truncate_composite(&composite, n).as_matrix().max_abs_diff(diag.as_matrix());
        checks.push(CheckReport::new(
            "decomposition_section",
            Some(n),
            diff <= tol,
            format!("max |(alpha I + K+ + F)_N - T_N| = {diff:e}"),
        ));
        let below = spectral_count_below(&diag, alpha, tol).map_err(numeric)?;
        checks.push(CheckReport::new(
            "eigenvalues_below_alpha",
            Some(n),
            below <= d.rank_f(),
            format!("{below} eigenvalues below alpha, rank F = {}", d.rank_f()),
        ));
    }
    Ok(checks)
}

fn witness_checks(seq: &SequenceSpec, witness: &Witness, sizes: &[usize], tol: f64) -> Result<Vec<CheckReport>, CliError> {
    let mut checks = Vec::new();
    for &n in sizes {
        let m = resolvable_witness_count(seq, witness, n, WITNESS_VECTORS);
        if m == 0 {
            checks.push(CheckReport::skip("witness_escape", Some(n), "no resolvable witness vector fits this section"));
            continue;
        }
        let report = match verify_witness_numeric(seq, witness, m, n, tol) {
            Ok(check) => CheckReport::new(
                "witness_escape",
                Some(n),
                check.escapes(ESCAPE_MARGIN),
                format!(
                    "m = {m}, nu_m = {:.12}, sup = {:.12}, increasing = {}, max prediction error {:e}",
                    check.norms.last().copied().unwrap_or(f64::NAN),
                    check.sup,
                    check.strictly_increasing,
                    check.max_prediction_error
                ),
            ),
            Err(e) => CheckReport::new("witness_escape", Some(n), false, e.to_string()),
        };
        checks.push(report);
    }
    Ok(checks)
}

/// Checks for a diagonal operator.
pub fn verify_sequence(seq: &SequenceSpec, sizes: &[usize], tol: f64) -> Result<(AnVerdict, Vec<CheckReport>), CliError> {
    let verdict = classify_an(seq);
    let checks = match &verdict {
        AnVerdict::IsAn { decomposition, .. } => decomposition_checks(seq, decomposition, sizes, tol)?,
        AnVerdict::NotAn { witness, .. } => witness_checks(seq, witness, sizes, tol)?,
    };
    Ok((verdict, checks))
}

/// `sqrt(T_N^T T_N) = diag(|w_1|, ..., |w_{N-1}|, 0)`.
pub fn modulus_identity_error(shift: &WeightedShift, n: usize, tol: f64) -> Result<f64, CliError> {
    let (_, tt) = truncate_shift(shift, n).map_err(numeric)?;
    let root = matrix_sqrt(&tt, tol).map_err(numeric)?;
    let mut diag: Vec<f64> = shift.moduli().entries(n - 1).iter().map(|w| w.abs().to_f64()).collect();
    diag.push(0.0);
    Ok(root.as_matrix().max_abs_diff(&Matrix::from_diagonal(&diag)))
}

/// Checks for a weighted shift: the conditions agree with the classifier on
/// `|T|`, `|T|` sections match the moduli, then the diagonal checks on `|T|`.
pub fn verify_shift(shift: &WeightedShift, sizes: &[usize], tol: f64) -> Result<(AnVerdict, Vec<CheckReport>), CliError> {
    let (report, verdict) = classify_shift(shift);
    let mut checks = vec![CheckReport::new(
        "conditions_match_classifier",
        None,
        report.verdict == verdict.is_an() && report.alpha() == verdict.alpha().filter(|_| verdict.is_an()),
        format!("conditions say {}, classifier says {}", yes_no(report.verdict), yes_no(verdict.is_an())),
    )];
    for &n in sizes {
        if n < 2 {
            checks.push(CheckReport::skip("modulus_identity", Some(n), "shift sections need N >= 2"));
            continue;
        }
        let err = modulus_identity_error(shift, n, tol)?;
        checks.push(CheckReport::new(
            "modulus_identity",
            Some(n),
            err <= tol,
            format!("max |sqrt(T^T T) - diag(|w|, 0)| = {err:e}"),
        ));
    }
    let (_, rest) = verify_sequence(&modulus(shift), sizes, tol)?;
    checks.extend(rest);
    Ok((verdict, checks))
}

/// Checks for `alpha I + K + F`: positivity of each section and at most
/// `rank F` eigenvalues below alpha.
pub fn verify_composite(op: &CompositeOperator, sizes: &[usize], tol: f64) -> Result<Vec<CheckReport>, CliError> {
    let cert = match an_certificate(op, sizes, tol) {
        Ok(cert) => cert,
        Err(ClassifyError::NotPositive { size, eigenvalue }) => {
            return Ok(vec![CheckReport::new(
                "positivity",
                Some(size),
                false,
                format!("smallest eigenvalue {eigenvalue:e}"),
            )]);
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let mut checks: Vec<CheckReport> = cert
        .min_eigenvalue_per_size
        .iter()
        .map(|&(n, l)| CheckReport::new("positivity", Some(n), true, format!("smallest eigenvalue {l:e}")))
        .collect();
    let alpha = op.alpha().to_f64();
    for &n in sizes {
        let below = spectral_count_below(&truncate_composite(op, n), alpha, tol).map_err(numeric)?;
        checks.push(CheckReport::new(
            "eigenvalues_below_alpha",
            Some(n),
            below <= cert.rank_f,
            format!("{below} eigenvalues below alpha, rank F = {}", cert.rank_f),
        ));
    }
    Ok(checks)
}

pub(crate) fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
