//! ROUGE-L F-measure with the tokenizer of Google's `rouge_scorer`.

/// Lowercases, replaces every run of characters outside `[a-z0-9]` with a
/// space and splits on whitespace. No stemming.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in lowered.chars() {
        if c.is_ascii_lowercase() || c.is_ascii_digit() {
            current.push(c);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Length of the longest common subsequence, two-row dynamic program.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut curr = vec![0usize; short.len() + 1];
    for x in long {
        for (j, y) in short.iter().enumerate() {
            curr[j + 1] = if x == y {
                prev[j] + 1
            } else {
                curr[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[short.len()]
}

/// F-measure from an LCS length and the two token counts. `target` is the
/// recall denominator, `prediction` the precision denominator.
pub fn f_measure(lcs: usize, target_len: usize, prediction_len: usize) -> f64 {
    if lcs == 0 || target_len == 0 || prediction_len == 0 {
        return 0.0;
    }
    let precision = lcs as f64 / prediction_len as f64;
    let recall = lcs as f64 / target_len as f64;
    2.0 * precision * recall / (precision + recall)
}

pub fn rouge_l_tokens(target: &[String], prediction: &[String]) -> f64 {
    f_measure(lcs_len(target, prediction), target.len(), prediction.len())
}

/// ROUGE-L F-measure between two texts; symmetric, in [0,1].
pub fn rouge_l(target: &str, prediction: &str) -> f64 {
    rouge_l_tokens(&tokenize(target), &tokenize(prediction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenizer_matches_reference_rules() {
        assert_eq!(tokenize("The Cat, sat!"), ["the", "cat", "sat"]);
        assert_eq!(tokenize("U.S.A. 1984"), ["u", "s", "a", "1984"]);
        assert_eq!(tokenize("  "), Vec::<String>::new());
        // non-ASCII letters are separators, as in the reference `[^a-z0-9]+` rule
        assert_eq!(tokenize("café noir"), ["caf", "noir"]);
    }

    #[test]
    fn hand_worked_example() {
        // L = 2, P = 2/2, R = 2/3, F = 0.8
        let f = rouge_l("the cat sat", "the cat");
        assert!((f - 0.8).abs() < 1e-15, "{f}");
    }

    #[test]
    fn identity_and_disjoint() {
        assert_eq!(rouge_l("abc def", "abc def"), 1.0);
        assert_eq!(rouge_l("alpha", "beta"), 0.0);
        assert_eq!(rouge_l("", "alpha"), 0.0);
        assert_eq!(rouge_l("", ""), 0.0);
    }

    #[test]
    fn lcs_handles_empty_inputs() {
        assert_eq!(lcs_len::<u8>(&[], &[1, 2]), 0);
        assert_eq!(lcs_len(&[1, 2, 3, 2, 1], &[3, 2, 1, 2, 3]), 3);
    }

    proptest! {
        #[test]
        fn symmetric(a in "[a-c ]{0,20}", b in "[a-c ]{0,20}") {
            prop_assert_eq!(rouge_l(&a, &b), rouge_l(&b, &a));
        }

        #[test]
        fn self_similarity_is_one(a in "[a-z]{1,5}( [a-z]{1,5}){0,6}") {
            prop_assert_eq!(rouge_l(&a, &a), 1.0);
        }

        #[test]
        fn bounded(a in "[a-d ]{0,30}", b in "[a-d ]{0,30}") {
            let f = rouge_l(&a, &b);
            prop_assert!((0.0..=1.0).contains(&f));
        }
    }
}
