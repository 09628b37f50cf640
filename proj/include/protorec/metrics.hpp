#pragma once

#include <optional>
#include <string>
#include <vector>

#include "protorec/phoneme.hpp"
#include "protorec/phonotactics.hpp"

namespace protorec {

struct EvalConfig {
  // Literal prose readings of the two normalized A.3 metrics, for comparison
  // runs: N_EDIT_DIST as mean lev / pair count, MCER as total errors / pair
  // count. Defaults use per-pair gold-length normalization.
  bool n_edit_prose = false;
  bool mcer_prose = false;
};

struct EvalReport {
  double c_acc = 0.0;        // percent
  double cer = 0.0;          // percent, consonant errors over gold phonemes
  double ver = 0.0;          // percent, vowel errors over gold phonemes
  double edit_dist = 0.0;    // mean Levenshtein
  double feat_dist = 0.0;    // mean feature distance
  double mcer = 0.0;         // mean character error rate
  double n_edit_dist = 0.0;  // normalized mean edit distance
  double fer = 0.0;          // feat_dist over the table's feature count
  double pvr = 0.0;          // fraction of predictions violating constraints
  std::size_t n = 0;         // pairs with gold present
  std::size_t skipped = 0;   // pairs lacking gold
};

/// Percent of gold phonemes matched positionwise under the canonical
/// alignment. Throws on an empty gold form.
double char_accuracy(const PhonemeSeq& pred, const PhonemeSeq& gold, const FeatureTable& table);

/// (CER, VER) percentages for one pair: edit-script errors attributed to the
/// consonant or vowel class of the gold-side phoneme (insertions) or of the
/// deleted prediction-side phoneme, over the gold phoneme count.
std::pair<double, double> vc_error_rates(const PhonemeSeq& pred, const PhonemeSeq& gold,
                                         const FeatureTable& table);

/// Fraction of predictions with at least one phonotactic violation.
double pvr(const std::vector<PhonemeSeq>& predictions, const PhonotacticConstraints& constraints,
           const FeatureTable& table);

using EvalPair = std::pair<PhonemeSeq, PhonemeSeq>;  // (prediction, gold)

struct EditMetrics {
  double edit_dist = 0.0;
  double n_edit_dist = 0.0;
  double mcer = 0.0;
};
/// Mean Levenshtein distance plus its two normalized companions over
/// (prediction, gold) pairs.
EditMetrics edit_metrics(const std::vector<EvalPair>& pairs, const FeatureTable& table,
                         const EvalConfig& config = {});

struct FeatMetrics {
  double feat_dist = 0.0;
  double fer = 0.0;
};
/// Mean feature distance and its table-normalized error rate.
FeatMetrics feat_metrics(const std::vector<EvalPair>& pairs, const FeatureTable& table);

/// All nine metrics over id-aligned prediction/gold lists. Pairs whose gold
/// is absent are skipped and counted; PVR covers every prediction.
EvalReport evaluate(const std::vector<PhonemeSeq>& predictions,
                    const std::vector<std::optional<PhonemeSeq>>& golds, const FeatureTable& table,
                    const PhonotacticConstraints& constraints, const EvalConfig& config = {});

std::string format_report_tsv(const EvalReport& report);
std::string format_report_summary(const EvalReport& report);

}  // namespace protorec
