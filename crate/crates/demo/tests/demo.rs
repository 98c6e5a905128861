use snne_demo::{similarity_report, tau_curve_report, theorem_report, MAX_ANSWERS};

const ANSWERS: &str = "Paris\nThe capital is Paris\n\nLyon\n  Paris, France  \n";

#[test]
fn similarity_matrix_is_symmetric_with_unit_diagonal() {
    let r = similarity_report(ANSWERS, 1.0).unwrap();
    assert_eq!(
        r.answers,
        ["Paris", "The capital is Paris", "Lyon", "Paris, France"]
    );
    let n = r.matrix.len();
    for i in 0..n {
        assert_eq!(r.matrix[i][i], 1.0);
        for j in 0..n {
            assert_eq!(r.matrix[i][j], r.matrix[j][i]);
        }
    }
    assert_eq!(r.matrix[0][2], 0.0);
    assert!((r.matrix[0][1] - 0.4).abs() < 1e-12);
    assert!(r.snne.is_finite() && r.deg > 0.0 && r.lexsim < 0.0);
}

#[test]
fn identical_answers_are_least_uncertain() {
    let same = similarity_report("a\na\na", 1.0).unwrap();
    let mixed = similarity_report("a\nb\nc", 1.0).unwrap();
    assert!(same.snne < mixed.snne);
    assert!((same.snne - (-1.0 - 3f64.ln())).abs() < 1e-12);
}

#[test]
fn tau_curve_meets_both_limits() {
    let c = tau_curve_report(ANSWERS, -3.0, 6.0, 10).unwrap();
    assert_eq!(c.taus.len(), 10);
    assert!((c.taus[0] - 1e-3).abs() < 1e-15 && (c.taus[9] - 1e6).abs() < 1e-3);
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    assert!(rel(c.snne[0], c.small_tau[0]) < 1e-6);
    assert!(rel(c.snne[9], c.large_tau[9]) < 1e-6);
}

#[test]
fn theorems_hold_for_entered_partitions() {
    let r = theorem_report("3, 2 1", "", 10.0).unwrap();
    assert_eq!(r.labels, [0, 0, 0, 1, 1, 2]);
    assert!((r.snne - r.dse).abs() < 1e-12);
    assert!((r.wsnne - r.se).abs() < 1e-12);
    assert!((r.se - r.dse).abs() < 1e-12);

    let w = theorem_report("2,1", "-0.1 -2 -0.5", 1.0).unwrap();
    assert!((w.wsnne - w.se).abs() < 1e-12);
    assert!((w.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn bad_input_is_explained() {
    assert!(similarity_report("   \n", 1.0)
        .unwrap_err()
        .contains("at least one"));
    let many = vec!["x"; MAX_ANSWERS + 1].join("\n");
    assert!(similarity_report(&many, 1.0).is_err());
    assert!(tau_curve_report("a", 2.0, 1.0, 10).is_err());
    assert!(theorem_report("2,0", "", 1.0).is_err());
    assert!(theorem_report("2", "-1", 1.0)
        .unwrap_err()
        .contains("1 log-probs"));
    assert!(theorem_report("x", "", 1.0).unwrap_err().contains("`x`"));
    assert!(theorem_report("2", "", 0.0).is_err());
}
