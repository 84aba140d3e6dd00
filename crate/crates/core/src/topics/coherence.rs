use std::collections::BTreeSet;

use serde::Serialize;

use super::lda::{fit_lda, LdaSettings, TopicModel};
use super::TopicError;

/// The `top_n` most probable terms of `topic`, ties broken lexicographically.
pub fn top_words(model: &TopicModel, topic: usize, top_n: usize) -> Vec<(&str, f64)> {
    let row = &model.topic_word[topic];
    let mut order: Vec<usize> = (0..row.len()).collect();
    // vocabulary is sorted, so a stable sort on probability keeps ties lexicographic
    order.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
    order
        .into_iter()
        .take(top_n)
        .map(|w| (model.vocabulary[w].as_str(), row[w]))
        .collect()
}

/// UMass coherence averaged over topics.
///
/// For each topic's ranked top words, sums `ln((D(wi, wj) + 1) / D(wj))` over
/// every pair where `wj` ranks above `wi`; `D` counts documents containing
/// all given words. Terms absent from `docs` contribute nothing.
pub fn coherence<D: AsRef<[String]>>(model: &TopicModel, docs: &[D], top_n: usize) -> f64 {
    let doc_sets: Vec<BTreeSet<&str>> = docs
        .iter()
        .map(|d| d.as_ref().iter().map(String::as_str).collect())
        .collect();
    let count = |words: &[&str]| {
        doc_sets
            .iter()
            .filter(|s| words.iter().all(|w| s.contains(w)))
            .count()
    };

    let mut total = 0.0;
    for topic in 0..model.topic_count {
        let words: Vec<&str> = top_words(model, topic, top_n)
            .into_iter()
            .map(|(w, _)| w)
            .collect();
        for i in 1..words.len() {
            for j in 0..i {
                let dj = count(&[words[j]]);
                if dj == 0 {
                    continue;
                }
                let dij = count(&[words[i], words[j]]);
                total += ((dij as f64 + 1.0) / dj as f64).ln();
            }
        }
    }
    total / model.topic_count as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KScore {
    pub k: usize,
    pub coherence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicScan {
    pub best_k: usize,
    pub scores: Vec<KScore>,
    pub best_model: TopicModel,
}

/// Fits every `k` in `k_min..=k_max` with the same seed and keeps the most
/// coherent one; ties go to the smaller `k`.
pub fn select_topic_count<D: AsRef<[String]>>(
    docs: &[D],
    k_min: usize,
    k_max: usize,
    settings: &LdaSettings,
) -> Result<TopicScan, TopicError> {
    if k_min == 0 || k_min > k_max {
        return Err(TopicError::BadHyperparam(format!(
            "topic count range {k_min}..={k_max} is empty or starts at 0"
        )));
    }
    let mut scores = Vec::with_capacity(k_max - k_min + 1);
    let mut best: Option<(f64, TopicModel)> = None;
    for k in k_min..=k_max {
        let model = fit_lda(
            docs,
            k,
            settings.alpha_for(k),
            settings.beta,
            settings.iterations,
            settings.seed,
        )?;
        let c = coherence(&model, docs, settings.top_n);
        log::info!("k={k} coherence={c:.6}");
        scores.push(KScore { k, coherence: c });
        if best.as_ref().is_none_or(|(b, _)| c > *b) {
            best = Some((c, model));
        }
    }
    let (_, best_model) = best.expect("range is non-empty");
    Ok(TopicScan {
        best_k: best_model.topic_count,
        scores,
        best_model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(raw: &[&str]) -> Vec<Vec<String>> {
        raw.iter()
            .map(|d| d.split_whitespace().map(String::from).collect())
            .collect()
    }

    /// A one-topic model whose ranking is fixed by hand.
    fn ranked(words: &[&str]) -> TopicModel {
        let mut vocabulary: Vec<String> = words.iter().map(|s| s.to_string()).collect();
        vocabulary.sort();
        let n = words.len() as f64;
        let row = vocabulary
            .iter()
            .map(|w| {
                let rank = words.iter().position(|x| x == w).unwrap() as f64;
                (n - rank) / (n * (n + 1.0) / 2.0)
            })
            .collect();
        TopicModel {
            topic_count: 1,
            vocabulary,
            topic_word: vec![row],
            doc_topic: vec![],
            assignments: vec![],
            seed: 0,
            alpha: 1.0,
            beta: 1.0,
            iterations: 1,
        }
    }

    #[test]
    fn single_word_is_zero() {
        let corpus = docs(&["a b", "a"]);
        assert_eq!(coherence(&ranked(&["a", "b"]), &corpus, 1), 0.0);
    }

    #[test]
    fn pair_terms() {
        let together = docs(&["x y", "x y", "x y", "x y"]);
        let c = coherence(&ranked(&["x", "y"]), &together, 2);
        assert!((c - (5.0f64 / 4.0).ln()).abs() < 1e-12);

        let apart = docs(&["x", "x", "x", "x", "y"]);
        let c = coherence(&ranked(&["x", "y"]), &apart, 2);
        assert!((c - (1.0f64 / 4.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn ties_rank_lexicographically() {
        let corpus = docs(&["b a c"]);
        let m = fit_lda(&corpus, 1, 1.0, 1.0, 1, 0).unwrap();
        let words: Vec<&str> = top_words(&m, 0, 3).into_iter().map(|(w, _)| w).collect();
        assert_eq!(words, ["a", "b", "c"]);
    }

    #[test]
    fn single_k_range() {
        let corpus = docs(&["a b", "c d"]);
        let settings = LdaSettings {
            iterations: 10,
            ..LdaSettings::default()
        };
        let scan = select_topic_count(&corpus, 5, 5, &settings).unwrap();
        assert_eq!(scan.best_k, 5);
        assert_eq!(scan.scores.len(), 1);
        assert!(select_topic_count(&corpus, 3, 2, &settings).is_err());
    }

    #[test]
    fn two_disjoint_clusters_pick_two_topics() {
        let corpus = docs(&[
            "apple banana cherry",
            "apple banana cherry",
            "apple banana",
            "banana cherry apple",
            "xenon yttrium zinc",
            "xenon zinc yttrium",
            "yttrium zinc",
            "zinc xenon yttrium",
        ]);
        let settings = LdaSettings {
            alpha: Some(0.1),
            beta: 0.01,
            iterations: 200,
            seed: 42,
            top_n: 3,
        };
        let scan = select_topic_count(&corpus, 1, 4, &settings).unwrap();
        eprintln!("{:?}", scan.scores);
        assert_eq!(scan.scores.len(), 4);
        assert_eq!(scan.best_k, 2);
        // two pure topics: each has pairs (banana|apple), (cherry|apple), (cherry|banana)
        // => ln(5/4) + ln(4/4) + ln(4/4) per topic (and the same shape for the second cluster)
        let k2 = scan.scores[1].coherence;
        assert!((k2 - (5.0f64 / 4.0).ln()).abs() < 1e-12, "{k2}");
    }
}
