//! `nhom-lab analyze`: full diagnostic pass over one user-supplied map.

use serde_json::json;

use nhom_core::json::{witness_to_json, MapJson, VerificationReportJson};
use nhom_core::nhom::{
    is_n_homomorphism, split_involutive, unital_decompose, LinearMapRep, VerifyMode,
    DEFAULT_BUDGET,
};
use nhom_core::positivity::{contractivity_check, is_completely_positive};
use nhom_core::Error;

/// Consolidated analysis result: the JSON report plus the overall verdict.
#[derive(Debug)]
pub struct Analysis {
    pub report: serde_json::Value,
    pub pass: bool,
}

/// Run the full check chain on a map: star-linearity and n-multiplicativity
/// first; when both hold (and the domain is unital) the decomposition,
/// complete-positivity, and contractivity diagnostics.
pub fn analyze_map(map: &LinearMapRep, n: u32, tol: f64, seed: u64) -> nhom_core::Result<Analysis> {
    let star_residual = map.star_linearity_residual();
    let star_pass = star_residual <= tol;
    let nhom_report = is_n_homomorphism(
        map,
        n,
        tol,
        VerifyMode::Auto { trials: 200, seed },
        DEFAULT_BUDGET,
    )?;
    let mut report = json!({
        "n": n,
        "tol": tol,
        "domain": map.domain(),
        "codomain": map.codomain(),
        "star_linear": { "pass": star_pass, "residual": star_residual },
        "n_homomorphism": VerificationReportJson::from_report(&nhom_report),
    });
    let mut pass = star_pass && nhom_report.pass;
    if !pass {
        report["verdict"] = json!("fail");
        return Ok(Analysis { report, pass });
    }

    if !map.domain().is_unital() {
        report["decomposition"] = json!({
            "skipped": "nonunital (nilpotent) domain: unital decomposition does not apply"
        });
        report["verdict"] = json!("pass");
        return Ok(Analysis { report, pass });
    }

    match unital_decompose(map, n, tol) {
        Ok(dec) => {
            report["decomposition"] = json!({
                "e": nhom_core::json::MatrixJson::from_matrix(dec.e.matrix()),
                "residuals": dec.residuals,
            });
        }
        Err(err) => {
            report["decomposition"] = json!({ "error": err.to_string() });
            pass = false;
        }
    }

    match split_involutive(map, n, tol, VerifyMode::Auto { trials: 200, seed }, DEFAULT_BUDGET) {
        Ok(dec) => {
            let split = match &dec.odd_split {
                Some((psi1, psi2)) => json!({
                    "kind": "odd_difference",
                    "psi1": MapJson::from_map(psi1),
                    "psi2": MapJson::from_map(psi2),
                    "residuals": dec.residuals,
                }),
                None => json!({
                    "kind": "even_star_homomorphism",
                    "residuals": dec.residuals,
                }),
            };
            report["split"] = split;
        }
        Err(err) => {
            report["split"] = json!({ "error": err.to_string() });
            pass = false;
        }
    }

    match is_completely_positive(map, tol) {
        Ok(cp) => {
            report["completely_positive"] = json!(cp);
        }
        Err(Error::NonDirectSumDomain) => {
            report["completely_positive"] = json!(null);
        }
        Err(err) => return Err(err),
    }

    let con = contractivity_check(map, 500, tol, seed.wrapping_add(1));
    report["contractivity"] = json!({
        "max_ratio": con.max_ratio,
        "pass": con.pass,
        "trials": con.trials,
    });
    pass = pass && con.pass;
    report["verdict"] = json!(if pass { "pass" } else { "fail" });
    Ok(Analysis { report, pass })
}

/// Parse a map file and analyze it.
pub fn analyze_file(path: &std::path::Path, n: u32, tol: f64) -> nhom_core::Result<Analysis> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::ShapeMismatch {
        context: format!("cannot read {}: {e}", path.display()),
    })?;
    let map_json: MapJson = serde_json::from_str(&text).map_err(|e| Error::ShapeMismatch {
        context: format!("malformed map JSON: {e}"),
    })?;
    let map = map_json.to_map()?;
    analyze_map(&map, n, tol, 0)
}

// re-exported for witness rendering in the binary
pub fn witness_json(w: &nhom_core::nhom::Witness) -> serde_json::Value {
    witness_to_json(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nhom_core::generate::random_involutive_nhom;
    use nhom_core::{AlgebraDescriptor, Complex64};

    fn md(d: usize) -> AlgebraDescriptor {
        AlgebraDescriptor::full_matrix(d).unwrap()
    }

    #[test]
    fn identity_map_analysis_passes() {
        let id = LinearMapRep::identity(md(2));
        let a = analyze_map(&id, 3, 1e-9, 0).unwrap();
        assert!(a.pass);
        assert_eq!(a.report["verdict"], "pass");
        assert_eq!(a.report["completely_positive"], true);
    }

    #[test]
    fn negated_representation_passes_with_odd_split_and_cp_false() {
        let psi = LinearMapRep::identity(md(2));
        let phi = psi.scaled(Complex64::new(-1.0, 0.0));
        let a = analyze_map(&phi, 3, 1e-9, 0).unwrap();
        assert!(a.pass, "odd involutive map analyzes cleanly");
        assert_eq!(a.report["completely_positive"], false);
        assert_eq!(a.report["split"]["kind"], "odd_difference");
    }

    #[test]
    fn random_non_multiplicative_map_fails_with_witness() {
        let m = nhom_core::generate::random_linear_map(&md(2), &md(2), 3);
        let a = analyze_map(&m, 3, 1e-9, 0).unwrap();
        assert!(!a.pass);
        assert_eq!(a.report["verdict"], "fail");
        assert!(a.report["n_homomorphism"]["witness"].is_object());
    }

    #[test]
    fn involutive_even_instance_passes() {
        let inst = random_involutive_nhom(&md(2), &md(4), 4, 11).unwrap();
        let a = analyze_map(&inst.map, 4, 1e-9, 0).unwrap();
        assert!(a.pass);
        assert_eq!(a.report["split"]["kind"], "even_star_homomorphism");
        assert_eq!(a.report["completely_positive"], true);
    }
}
