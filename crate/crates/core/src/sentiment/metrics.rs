//! The multi-label metric suite plus binary accuracy.
//!
//! Every metric takes aligned prediction/gold lists and fails on length
//! mismatch or zero samples rather than guessing. Probabilities are
//! assumed to be in [0, 1]; the model and the prediction importer both
//! enforce that upstream.

use super::{EmotionLabel, LabelVector, SentimentError, LABEL_COUNT};

fn check_aligned(preds: usize, golds: usize) -> Result<(), SentimentError> {
    if preds != golds {
        return Err(SentimentError::LengthMismatch { preds, golds });
    }
    if preds == 0 {
        return Err(SentimentError::EmptyInput);
    }
    Ok(())
}

/// Fraction of disagreeing bits: `(1/(N·10)) Σ_n Σ_l [pred ≠ gold]`.
pub fn hamming_loss(preds: &[LabelVector], golds: &[LabelVector]) -> Result<f64, SentimentError> {
    check_aligned(preds.len(), golds.len())?;
    let mut mismatches = 0usize;
    for (pred, gold) in preds.iter().zip(golds) {
        for label in EmotionLabel::ALL {
            if pred.get(label) != gold.get(label) {
                mismatches += 1;
            }
        }
    }
    Ok(mismatches as f64 / (preds.len() * LABEL_COUNT) as f64)
}

/// Mean over samples of `|pred ∩ gold| / |pred ∪ gold|`. A sample where
/// both sets are empty scores 1: both agree nothing applies.
pub fn jaccard_score(preds: &[LabelVector], golds: &[LabelVector]) -> Result<f64, SentimentError> {
    check_aligned(preds.len(), golds.len())?;
    let mut total = 0.0;
    for (pred, gold) in preds.iter().zip(golds) {
        let union = pred.union_size(gold);
        total += if union == 0 {
            1.0
        } else {
            pred.intersection_size(gold) as f64 / union as f64
        };
    }
    Ok(total / preds.len() as f64)
}

/// Label-ranking average precision: per sample, the average over true
/// labels `l` of (true labels ranked at or above `l`) / (rank of `l`),
/// ranking by descending probability; the sample scores are then averaged.
///
/// Tied probabilities share their group's average rank, applied to both
/// the rank of `l` and the count of true labels at or above it, so the
/// score never leaves [0, 1]. A sample with no true labels scores 1.
pub fn lrap(
    probs: &[[f64; LABEL_COUNT]],
    golds: &[LabelVector],
) -> Result<f64, SentimentError> {
    check_aligned(probs.len(), golds.len())?;
    let mut total = 0.0;
    for (prob, gold) in probs.iter().zip(golds) {
        if gold.is_empty() {
            total += 1.0;
            continue;
        }
        let gold_bits = gold.bits();
        let mut sample = 0.0;
        for l in 0..LABEL_COUNT {
            if !gold_bits[l] {
                continue;
            }
            let pl = prob[l];
            let mut above_all = 0usize;
            let mut tied_all = 0usize;
            let mut above_true = 0usize;
            let mut tied_true = 0usize;
            for (k, &pk) in prob.iter().enumerate() {
                if k == l {
                    continue;
                }
                if pk > pl {
                    above_all += 1;
                    if gold_bits[k] {
                        above_true += 1;
                    }
                } else if pk == pl {
                    tied_all += 1;
                    if gold_bits[k] {
                        tied_true += 1;
                    }
                }
            }
            let rank = above_all as f64 + 1.0 + tied_all as f64 / 2.0;
            let true_at_or_above = above_true as f64 + 1.0 + tied_true as f64 / 2.0;
            sample += true_at_or_above / rank;
        }
        total += sample / gold.count() as f64;
    }
    Ok(total / probs.len() as f64)
}

/// Averaging mode for [`f1_score`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum F1Mode {
    /// One F1 over globally pooled true/false positives and negatives.
    Micro,
    /// Unweighted mean of the ten per-label F1 scores; a label with zero
    /// support and zero predictions scores 0.
    Macro,
}

fn f1_from_counts(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// Micro- or macro-averaged F1 over the ten labels.
pub fn f1_score(
    preds: &[LabelVector],
    golds: &[LabelVector],
    mode: F1Mode,
) -> Result<f64, SentimentError> {
    check_aligned(preds.len(), golds.len())?;
    let mut tp = [0usize; LABEL_COUNT];
    let mut fp = [0usize; LABEL_COUNT];
    let mut fn_ = [0usize; LABEL_COUNT];
    for (pred, gold) in preds.iter().zip(golds) {
        for label in EmotionLabel::ALL {
            let i = label.index();
            match (pred.get(label), gold.get(label)) {
                (true, true) => tp[i] += 1,
                (true, false) => fp[i] += 1,
                (false, true) => fn_[i] += 1,
                (false, false) => {}
            }
        }
    }
    Ok(match mode {
        F1Mode::Micro => f1_from_counts(tp.iter().sum(), fp.iter().sum(), fn_.iter().sum()),
        F1Mode::Macro => {
            let sum: f64 = (0..LABEL_COUNT)
                .map(|i| f1_from_counts(tp[i], fp[i], fn_[i]))
                .sum();
            sum / LABEL_COUNT as f64
        }
    })
}

/// Fraction of samples whose predicted label set matches the gold set
/// exactly.
pub fn subset_accuracy(
    preds: &[LabelVector],
    golds: &[LabelVector],
) -> Result<f64, SentimentError> {
    check_aligned(preds.len(), golds.len())?;
    let exact = preds
        .iter()
        .zip(golds)
        .filter(|(pred, gold)| pred == gold)
        .count();
    Ok(exact as f64 / preds.len() as f64)
}

/// Fraction of exact matches between two boolean lists.
pub fn binary_accuracy(preds: &[bool], golds: &[bool]) -> Result<f64, SentimentError> {
    check_aligned(preds.len(), golds.len())?;
    let matches = preds.iter().zip(golds).filter(|(p, g)| p == g).count();
    Ok(matches as f64 / preds.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn vec_of(labels: &[EmotionLabel]) -> LabelVector {
        LabelVector::from_labels(labels)
    }

    use EmotionLabel::*;

    #[test]
    fn hamming_counts_bit_disagreements() {
        let golds = vec![vec_of(&[Sad, Anxious]), vec_of(&[])];
        assert_eq!(hamming_loss(&golds, &golds).unwrap(), 0.0);

        let one_flip = vec![vec_of(&[Sad]), vec_of(&[])];
        assert!((hamming_loss(&one_flip, &golds).unwrap() - 0.05).abs() < 1e-12);

        let single = vec![vec_of(&[Sad])];
        let single_gold = vec![vec_of(&[Sad, Anxious])];
        assert!((hamming_loss(&single, &single_gold).unwrap() - 0.1).abs() < 1e-12);

        // Every bit wrong on two samples.
        let all = LabelVector::from_bits([true; LABEL_COUNT]);
        let none = LabelVector::empty();
        let preds = vec![all.clone(), none.clone()];
        let golds = vec![none, all];
        assert_eq!(hamming_loss(&preds, &golds).unwrap(), 1.0);
    }

    #[test]
    fn jaccard_examples() {
        let preds = vec![vec_of(&[Sad])];
        let golds = vec![vec_of(&[Sad, Anxious])];
        assert!((jaccard_score(&preds, &golds).unwrap() - 0.5).abs() < 1e-12);

        let empty = vec![vec_of(&[])];
        assert_eq!(jaccard_score(&empty, &empty).unwrap(), 1.0);

        let disjoint_preds = vec![vec_of(&[Joking])];
        let disjoint_golds = vec![vec_of(&[Sad])];
        assert_eq!(jaccard_score(&disjoint_preds, &disjoint_golds).unwrap(), 0.0);

        // Mean over samples.
        let preds = vec![vec_of(&[Sad]), vec_of(&[])];
        let golds = vec![vec_of(&[Sad, Anxious]), vec_of(&[])];
        assert!((jaccard_score(&preds, &golds).unwrap() - 0.75).abs() < 1e-12);
    }

    fn probs_from(pairs: &[(usize, f64)]) -> [f64; LABEL_COUNT] {
        let mut probs = [0.0; LABEL_COUNT];
        for &(i, p) in pairs {
            probs[i] = p;
        }
        probs
    }

    #[test]
    fn lrap_examples() {
        // All true labels strictly above all false labels.
        let probs = vec![probs_from(&[(0, 0.9), (1, 0.8), (2, 0.1)])];
        let golds = vec![vec_of(&[Optimistic, Thankful])];
        assert!((lrap(&probs, &golds).unwrap() - 1.0).abs() < 1e-12);

        // Single true label ranked second among ten distinct probabilities.
        let mut descending = [0.0; LABEL_COUNT];
        for (i, slot) in descending.iter_mut().enumerate() {
            *slot = 1.0 - i as f64 * 0.1;
        }
        let golds = vec![vec_of(&[Thankful])]; // index 1 = second highest
        assert!((lrap(&[descending], &golds).unwrap() - 0.5).abs() < 1e-12);

        // No true labels: scores 1 by convention.
        let golds = vec![vec_of(&[])];
        assert_eq!(lrap(&[descending], &golds).unwrap(), 1.0);
    }

    #[test]
    fn lrap_ties_share_average_rank() {
        // Two true labels tied at the top: still a perfect 1.
        let probs = vec![probs_from(&[(0, 0.7), (1, 0.7)])];
        let golds = vec![vec_of(&[Optimistic, Thankful])];
        assert!((lrap(&probs, &golds).unwrap() - 1.0).abs() < 1e-12);

        // One true label tied with one false label above everything else:
        // rank 1.5, one true at or above, score 1/1.5.
        let probs = vec![probs_from(&[(0, 0.7), (1, 0.7)])];
        let golds = vec![vec_of(&[Optimistic])];
        assert!((lrap(&probs, &golds).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn f1_examples() {
        let golds = vec![vec_of(&[Sad, Anxious]), vec_of(&[Optimistic])];
        assert_eq!(f1_score(&golds, &golds, F1Mode::Micro).unwrap(), 1.0);
        // Macro on perfect predictions: labels that never occur have zero
        // support and zero predictions, so they drag the mean by scoring 0.
        let macro_perfect = f1_score(&golds, &golds, F1Mode::Macro).unwrap();
        assert!((macro_perfect - 0.3).abs() < 1e-12);

        // No positive predictions at all while gold has positives.
        let empty = vec![vec_of(&[]), vec_of(&[])];
        assert_eq!(f1_score(&empty, &golds, F1Mode::Micro).unwrap(), 0.0);
        assert_eq!(f1_score(&empty, &golds, F1Mode::Macro).unwrap(), 0.0);
    }

    #[test]
    fn macro_f1_punishes_a_noisy_label_harder_than_micro() {
        // Nine labels predicted perfectly across many samples; one label
        // always predicted but never true.
        let mut preds = Vec::new();
        let mut golds = Vec::new();
        for _ in 0..20 {
            let mut gold = LabelVector::from_bits([true; LABEL_COUNT]);
            gold.set(Joking, false);
            let pred = LabelVector::from_bits([true; LABEL_COUNT]);
            preds.push(pred);
            golds.push(gold);
        }
        let micro = f1_score(&preds, &golds, F1Mode::Micro).unwrap();
        let macro_ = f1_score(&preds, &golds, F1Mode::Macro).unwrap();
        assert!(macro_ < micro, "macro {macro_} should fall below micro {micro}");
    }

    #[test]
    fn subset_and_binary_accuracy() {
        let preds = vec![vec_of(&[Sad]), vec_of(&[Sad])];
        let golds = vec![vec_of(&[Sad]), vec_of(&[Sad, Anxious])];
        assert_eq!(subset_accuracy(&preds, &golds).unwrap(), 0.5);

        assert_eq!(
            binary_accuracy(&[true, false], &[true, false]).unwrap(),
            1.0
        );
        assert_eq!(
            binary_accuracy(&[true, false], &[false, true]).unwrap(),
            0.0
        );
        assert_eq!(
            binary_accuracy(&[true, false], &[true, true]).unwrap(),
            0.5
        );
    }

    #[test]
    fn misaligned_or_empty_inputs_are_errors() {
        let one = vec![vec_of(&[Sad])];
        assert!(matches!(
            hamming_loss(&one, &[]),
            Err(SentimentError::LengthMismatch { preds: 1, golds: 0 })
        ));
        assert!(matches!(
            jaccard_score(&[], &[]),
            Err(SentimentError::EmptyInput)
        ));
        assert!(matches!(
            binary_accuracy(&[true], &[]),
            Err(SentimentError::LengthMismatch { .. })
        ));
        assert!(matches!(lrap(&[], &[]), Err(SentimentError::EmptyInput)));
    }

    // Strategy: up to 6 samples of paired (pred, gold) bit sets.
    fn label_sets(n: usize) -> impl Strategy<Value = Vec<([bool; LABEL_COUNT], [bool; LABEL_COUNT])>> {
        proptest::collection::vec(
            (proptest::array::uniform10(any::<bool>()), proptest::array::uniform10(any::<bool>())),
            1..=n,
        )
    }

    proptest! {
        // Brute-force recomputation straight from the formulas.
        #[test]
        fn metrics_match_brute_force(sets in label_sets(6)) {
            let preds: Vec<LabelVector> = sets.iter().map(|(p, _)| LabelVector::from_bits(*p)).collect();
            let golds: Vec<LabelVector> = sets.iter().map(|(_, g)| LabelVector::from_bits(*g)).collect();
            let n = sets.len() as f64;

            // Hamming: disagreements over N·10.
            let mut wrong = 0.0;
            for (p, g) in &sets {
                for i in 0..LABEL_COUNT {
                    if p[i] != g[i] { wrong += 1.0; }
                }
            }
            let hamming = hamming_loss(&preds, &golds).unwrap();
            prop_assert!((hamming - wrong / (n * 10.0)).abs() < 1e-12);

            // Jaccard via explicit sets.
            let mut jac = 0.0;
            for (p, g) in &sets {
                let ps: BTreeSet<usize> = (0..LABEL_COUNT).filter(|&i| p[i]).collect();
                let gs: BTreeSet<usize> = (0..LABEL_COUNT).filter(|&i| g[i]).collect();
                let union = ps.union(&gs).count();
                jac += if union == 0 {
                    1.0
                } else {
                    ps.intersection(&gs).count() as f64 / union as f64
                };
            }
            let jaccard = jaccard_score(&preds, &golds).unwrap();
            prop_assert!((jaccard - jac / n).abs() < 1e-12);

            // Micro F1 from pooled counts.
            let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
            for (p, g) in &sets {
                for i in 0..LABEL_COUNT {
                    match (p[i], g[i]) {
                        (true, true) => tp += 1,
                        (true, false) => fp += 1,
                        (false, true) => fn_ += 1,
                        _ => {}
                    }
                }
            }
            let expected_micro = if 2 * tp + fp + fn_ == 0 {
                0.0
            } else {
                2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
            };
            let micro = f1_score(&preds, &golds, F1Mode::Micro).unwrap();
            prop_assert!((micro - expected_micro).abs() < 1e-12);

            // Every metric stays in [0, 1].
            for value in [hamming, jaccard, micro] {
                prop_assert!((0.0..=1.0).contains(&value));
            }
        }

        // LRAP stays in (0, 1] and hits 1 on perfectly separated rankings.
        #[test]
        fn lrap_bounds_hold(
            sets in proptest::collection::vec(
                (proptest::array::uniform10(0u8..=10), proptest::array::uniform10(any::<bool>())),
                1..=6,
            ),
        ) {
            let probs: Vec<[f64; LABEL_COUNT]> = sets
                .iter()
                .map(|(p, _)| {
                    let mut row = [0.0; LABEL_COUNT];
                    for i in 0..LABEL_COUNT { row[i] = p[i] as f64 / 10.0; }
                    row
                })
                .collect();
            let golds: Vec<LabelVector> = sets.iter().map(|(_, g)| LabelVector::from_bits(*g)).collect();
            let score = lrap(&probs, &golds).unwrap();
            prop_assert!(score > 0.0 && score <= 1.0 + 1e-12);
        }
    }
}
