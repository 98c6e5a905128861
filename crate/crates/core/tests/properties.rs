use proptest::collection::vec;
use proptest::prelude::*;

use snne_core::corpus::{read_records, write_records, Answer, GenerationRecord};
use snne_core::estimators::{deg, dse, lexsim, se, snne, sum_eigv, wsnne, SequenceProbabilities};
use snne_core::matrix::SquareMatrix;
use snne_core::metrics::{prr, LabeledScore};
use snne_core::similarity::{ClusterAssignment, SimilarityMatrix};

fn square(values: &[f64], n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, |i, j| values[i * n + j])
}

fn symmetric_unit(values: &[f64], n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Less => values[i * n + j],
        std::cmp::Ordering::Greater => values[j * n + i],
    })
}

fn arb_record() -> impl Strategy<Value = GenerationRecord> {
    (1usize..5).prop_flat_map(|n| {
        (
            "[a-z]{1,6}",
            vec(("[a-z ]{1,12}", vec(-8.0f64..=0.0, 1..6)), n),
            vec("[a-z]{1,8}", 0..3),
            proptest::option::of(0.0f64..=1.0),
            proptest::option::of(vec(0.0f64..=1.0, n * n)),
            vec(-1.0f64..=1.0, n * n),
        )
            .prop_map(
                move |(id, answers, golds, ptrue, entail, embed)| GenerationRecord {
                    id,
                    question: "q?".into(),
                    greedy_answer: Answer::new(answers[0].0.clone()),
                    answers: answers
                        .into_iter()
                        .map(|(t, lp)| Answer::with_logprobs(t, lp))
                        .collect(),
                    gold_answers: golds,
                    ptrue,
                    quality: None,
                    entailment: entail.map(|v| square(&v, n)),
                    embed_sim: Some(symmetric_unit(&embed, n)),
                },
            )
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn records_round_trip(records in vec(arb_record(), 0..4)) {
        let mut buf = Vec::new();
        write_records(&mut buf, &records).unwrap();
        let back = read_records(buf.as_slice()).unwrap();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn estimators_ignore_answer_order(
        (n, values, sym, nlp, labels, perm) in (2usize..9).prop_flat_map(|n| (
            Just(n),
            vec(-2.0f64..2.0, n * n),
            vec(0.0f64..=1.0, n * n),
            vec(-6.0f64..0.0, n),
            vec(0usize..4, n),
            permutation(n),
        )),
        tau in 0.1f64..100.0,
    ) {
        let directed = SimilarityMatrix::custom(square(&values, n)).unwrap();
        let affinity = SimilarityMatrix::custom(symmetric_unit(&sym, n)).unwrap();
        let probs = SequenceProbabilities::from_normalized(nlp).unwrap();
        let clusters = ClusterAssignment::from_labels(&labels);
        let (d2, a2, p2, c2) = (
            directed.permuted(&perm),
            affinity.permuted(&perm),
            probs.permuted(&perm),
            clusters.permuted(&perm),
        );
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-10;
        prop_assert!(close(snne(&d2, tau).unwrap(), snne(&directed, tau).unwrap()));
        prop_assert!(close(wsnne(&d2, &p2, tau).unwrap(), wsnne(&directed, &probs, tau).unwrap()));
        prop_assert!(close(se(&c2, &p2).unwrap(), se(&clusters, &probs).unwrap()));
        prop_assert!(close(dse(&c2).unwrap(), dse(&clusters).unwrap()));
        prop_assert!(close(lexsim(&a2).unwrap(), lexsim(&affinity).unwrap()));
        prop_assert!(close(deg(&a2), deg(&affinity)));
        prop_assert!(close(sum_eigv(&a2), sum_eigv(&affinity)));
    }

    #[test]
    fn large_tau_approaches_mean_similarity(
        (n, values) in (1usize..10).prop_flat_map(|n| (Just(n), vec(-1.0f64..1.0, n * n))),
        scale in 1e4f64..1e7,
    ) {
        let m = square(&values, n);
        let max_abs = m.values().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-3);
        let tau = scale * max_abs;
        let s = snne(&SimilarityMatrix::custom(m.clone()).unwrap(), tau).unwrap();
        let mean = m.values().iter().sum::<f64>() / (n * n) as f64;
        let limit = -(n as f64).ln() - mean / tau;
        prop_assert!((s - limit).abs() <= 1e-6 * (1.0 + s.abs()), "{} vs {}", s, limit);
    }

    #[test]
    fn small_tau_with_unit_self_similarity(
        (n, values) in (1usize..10).prop_flat_map(|n| (Just(n), vec(0.0f64..0.9, n * n))),
        tau in 1e-4f64..1e-2,
    ) {
        let m = SquareMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { values[i * n + j] });
        let s = snne(&SimilarityMatrix::custom(m).unwrap(), tau).unwrap();
        prop_assert!(((s + 1.0 / tau) * tau).abs() <= 1e-6);
    }

    #[test]
    fn prr_never_exceeds_one(raw in vec((0u8..6, 0u8..5), 2..30)) {
        let scores: Vec<LabeledScore> = raw
            .iter()
            .enumerate()
            .map(|(i, &(u, q))| LabeledScore::new(format!("r{i:02}"), u as f64, q as f64 / 4.0, 0.5))
            .collect();
        if let Ok(v) = prr(&scores) {
            prop_assert!(v <= 1.0 + 1e-12, "{}", v);
        }
    }
}
