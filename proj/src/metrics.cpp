#include "protorec/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "protorec/distance.hpp"
#include "protorec/errors.hpp"

namespace protorec {

namespace {

struct PairCounts {
  int errors = 0;
  int consonant_errors = 0;
  int vowel_errors = 0;
  int matches = 0;
};

PairCounts classify_pair(const PhonemeSeq& pred, const PhonemeSeq& gold,
                         const FeatureTable& table) {
  PairCounts counts;
  for (const AlignedPair& col : align(pred, gold)) {
    if (col.kind == EditKind::Match) {
      ++counts.matches;
      continue;
    }
    ++counts.errors;
    // Substitutions and insertions answer to the gold-side phoneme; a
    // deletion has none, so it answers to the deleted prediction phoneme.
    PhonemeId owner = col.y != kGap ? col.y : col.x;
    if (table.is_vowel(owner))
      ++counts.vowel_errors;
    else
      ++counts.consonant_errors;
  }
  return counts;
}

}  // namespace

double char_accuracy(const PhonemeSeq& pred, const PhonemeSeq& gold, const FeatureTable& table) {
  if (gold.empty()) throw DataError("char_accuracy: empty gold form");
  PairCounts counts = classify_pair(pred, gold, table);
  return 100.0 * static_cast<double>(counts.matches) / static_cast<double>(gold.size());
}

std::pair<double, double> vc_error_rates(const PhonemeSeq& pred, const PhonemeSeq& gold,
                                         const FeatureTable& table) {
  if (gold.empty()) throw DataError("vc_error_rates: empty gold form");
  PairCounts counts = classify_pair(pred, gold, table);
  double denom = static_cast<double>(gold.size());
  return {100.0 * counts.consonant_errors / denom, 100.0 * counts.vowel_errors / denom};
}

double pvr(const std::vector<PhonemeSeq>& predictions, const PhonotacticConstraints& constraints,
           const FeatureTable& table) {
  if (predictions.empty()) return 0.0;
  std::size_t violating = 0;
  for (const PhonemeSeq& p : predictions)
    if (violates(p, constraints, table)) ++violating;
  return static_cast<double>(violating) / static_cast<double>(predictions.size());
}

EditMetrics edit_metrics(const std::vector<EvalPair>& pairs, const FeatureTable& table,
                         const EvalConfig& config) {
  EditMetrics out;
  if (pairs.empty()) return out;
  double lev_sum = 0.0, nedit_sum = 0.0, mcer_sum = 0.0;
  long long error_total = 0;
  for (const auto& [pred, gold] : pairs) {
    if (gold.empty()) throw DataError("edit_metrics: empty gold form");
    int lev = levenshtein(pred, gold);
    lev_sum += lev;
    nedit_sum += static_cast<double>(lev) / static_cast<double>(gold.size());
    mcer_sum += static_cast<double>(classify_pair(pred, gold, table).errors) /
                static_cast<double>(gold.size());
    error_total += lev;
  }
  double n = static_cast<double>(pairs.size());
  out.edit_dist = lev_sum / n;
  out.n_edit_dist = config.n_edit_prose ? out.edit_dist / n : nedit_sum / n;
  out.mcer = config.mcer_prose ? static_cast<double>(error_total) / n : mcer_sum / n;
  return out;
}

FeatMetrics feat_metrics(const std::vector<EvalPair>& pairs, const FeatureTable& table) {
  FeatMetrics out;
  if (pairs.empty()) return out;
  double feat_sum = 0.0;
  for (const auto& [pred, gold] : pairs) feat_sum += feature_distance(pred, gold, table);
  out.feat_dist = feat_sum / static_cast<double>(pairs.size());
  out.fer = out.feat_dist / static_cast<double>(table.feature_count());
  return out;
}

EvalReport evaluate(const std::vector<PhonemeSeq>& predictions,
                    const std::vector<std::optional<PhonemeSeq>>& golds, const FeatureTable& table,
                    const PhonotacticConstraints& constraints, const EvalConfig& config) {
  if (predictions.size() != golds.size())
    throw DataError("evaluate: prediction and gold lists differ in length");

  EvalReport report;
  double acc_sum = 0.0, lev_sum = 0.0, feat_sum = 0.0, nedit_sum = 0.0, mcer_sum = 0.0;
  long long cons_errors = 0, vowel_errors = 0, error_total = 0, gold_phonemes = 0;

  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!golds[i].has_value() || golds[i]->empty()) {
      ++report.skipped;
      continue;
    }
    const PhonemeSeq& gold = *golds[i];
    const PhonemeSeq& pred = predictions[i];
    ++report.n;

    PairCounts counts = classify_pair(pred, gold, table);
    int lev = levenshtein(pred, gold);
    acc_sum += 100.0 * counts.matches / static_cast<double>(gold.size());
    lev_sum += lev;
    feat_sum += feature_distance(pred, gold, table);
    nedit_sum += static_cast<double>(lev) / static_cast<double>(gold.size());
    mcer_sum += static_cast<double>(counts.errors) / static_cast<double>(gold.size());
    cons_errors += counts.consonant_errors;
    vowel_errors += counts.vowel_errors;
    error_total += counts.errors;
    gold_phonemes += static_cast<long long>(gold.size());
  }

  if (report.n > 0) {
    double n = static_cast<double>(report.n);
    report.c_acc = acc_sum / n;
    report.edit_dist = lev_sum / n;
    report.feat_dist = feat_sum / n;
    report.cer = gold_phonemes ? 100.0 * cons_errors / static_cast<double>(gold_phonemes) : 0.0;
    report.ver = gold_phonemes ? 100.0 * vowel_errors / static_cast<double>(gold_phonemes) : 0.0;
    report.n_edit_dist = config.n_edit_prose ? report.edit_dist / n : nedit_sum / n;
    report.mcer = config.mcer_prose ? static_cast<double>(error_total) / n : mcer_sum / n;
    report.fer = report.feat_dist / static_cast<double>(table.feature_count());
  }
  report.pvr = pvr(predictions, constraints, table);
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string format_report_tsv(const EvalReport& report) {
  std::ostringstream out;
  out << "c_acc\tcer\tver\tedit_dist\tfeat_dist\tmcer\tn_edit_dist\tfer\tpvr\tn\tskipped\n";
  out << fmt(report.c_acc) << '\t' << fmt(report.cer) << '\t' << fmt(report.ver) << '\t'
      << fmt(report.edit_dist) << '\t' << fmt(report.feat_dist) << '\t' << fmt(report.mcer)
      << '\t' << fmt(report.n_edit_dist) << '\t' << fmt(report.fer) << '\t' << fmt(report.pvr)
      << '\t' << report.n << '\t' << report.skipped << '\n';
  return out.str();
}

std::string format_report_summary(const EvalReport& report) {
  std::ostringstream out;
  out << "evaluated pairs: " << report.n << " (skipped without gold: " << report.skipped << ")\n"
      << "  C_ACC       " << fmt(report.c_acc) << " %\n"
      << "  CER         " << fmt(report.cer) << " %\n"
      << "  VER         " << fmt(report.ver) << " %\n"
      << "  EDIT_DIST   " << fmt(report.edit_dist) << '\n'
      << "  FEAT_DIST   " << fmt(report.feat_dist) << '\n'
      << "  MCER        " << fmt(report.mcer) << '\n'
      << "  N_EDIT_DIST " << fmt(report.n_edit_dist) << '\n'
      << "  FER         " << fmt(report.fer) << '\n'
      << "  PVR         " << fmt(report.pvr) << '\n';
  return out.str();
}

}  // namespace protorec
