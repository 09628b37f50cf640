#include "protorec/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "protorec/errors.hpp"

namespace protorec {

EditClassification classify_edits(const PhonemeSeq& candidate, const PhonemeSeq& reflex,
                                  const FeatureTable& table) {
  EditClassification result;
  std::vector<AlignedPair> cols = align(candidate, reflex);

  int cand_pos = 0;
  std::map<std::pair<std::string, std::string>, bool> types;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const AlignedPair& col = cols[j];
    if (col.kind == EditKind::Match) {
      ++cand_pos;
      continue;
    }
    EditOp op;
    op.kind = col.kind;
    op.position = cand_pos;
    if (col.x != kGap) op.before = table.symbol(col.x);
    if (col.y != kGap) op.after = table.symbol(col.y);
    if (j > 0 && cols[j - 1].x != kGap) op.left_context = table.symbol(cols[j - 1].x);
    if (j + 1 < cols.size() && cols[j + 1].x != kGap)
      op.right_context = table.symbol(cols[j + 1].x);
    op.conditioned = !op.left_context.empty() || !op.right_context.empty();

    result.m_tokens += 1;
    if (op.conditioned) result.cond_tokens += 1;
    auto key = std::make_pair(op.before, op.after);
    auto it = types.find(key);
    if (it == types.end())
      types.emplace(key, op.conditioned);
    else
      it->second = it->second || op.conditioned;

    result.script.push_back(std::move(op));
    if (col.x != kGap) ++cand_pos;
  }
  result.m = static_cast<int>(types.size());
  for (const auto& [key, cond] : types) {
    (void)key;
    if (cond) ++result.cond;
  }
  return result;
}

double pds_score(const PhonemeSeq& candidate, const std::vector<PhonemeSeq>& reflexes,
                 const RankerConfig& config, const FeatureTable& table) {
  if (reflexes.empty()) throw Error("pds_score requires at least one reflex");
  const double log_base = std::log(config.b);
  auto log_b = [&](double x) { return std::log(x) / log_base; };

  int loss = 0, m_c = 0, cond_c = 0;
  for (const PhonemeSeq& reflex : reflexes) {
    if (candidate != reflex) ++loss;
    EditClassification ec = classify_edits(candidate, reflex, table);
    m_c += config.count_tokens ? ec.m_tokens : ec.m;
    cond_c += config.count_tokens ? ec.cond_tokens : ec.cond;
  }
  const int L = static_cast<int>(reflexes.size());
  double sum = 0.0;
  for (int i = loss + 1; i <= L; ++i) sum += log_b(i) - log_b(i - loss);
  return m_c * log_b(config.h) + cond_c * log_b(2.0) + sum - L;
}

double brevity_penalty(const PhonemeSeq& candidate, const std::vector<PhonemeSeq>& reflexes,
                       double lambda) {
  if (reflexes.empty()) throw Error("brevity_penalty requires at least one reflex");
  double mean = 0.0;
  for (const auto& r : reflexes) mean += static_cast<double>(r.size());
  mean /= static_cast<double>(reflexes.size());
  return -lambda * std::abs(static_cast<double>(candidate.size()) - mean);
}

double edit_penalty(const PhonemeSeq& candidate, const std::vector<PhonemeSeq>& reflexes,
                    double mu) {
  if (reflexes.empty()) throw Error("edit_penalty requires at least one reflex");
  double total = 0.0;
  for (const auto& r : reflexes) total += levenshtein(candidate, r);
  return -mu * total / static_cast<double>(reflexes.size());
}

double structural_adjust(const PhonemeSeq& candidate, const std::vector<PhonemeSeq>& reflexes,
                         const RankerConfig& config, const PhonotacticConstraints& constraints,
                         const FeatureTable& table) {
  double delta = 0.0;
  double len = static_cast<double>(candidate.size());

  if (!reflexes.empty()) {
    double mean = 0.0;
    for (const auto& r : reflexes) mean += static_cast<double>(r.size());
    mean /= static_cast<double>(reflexes.size());
    double dev = std::abs(len - mean);
    // Length terms fire only outside the slack band around the reflex
    // profile; a candidate matching the reflex lengths is never penalized
    // regardless of its absolute size.
    if (dev > config.len_mismatch_slack) {
      delta -= config.len_mismatch_rate * (dev - config.len_mismatch_slack);
      if (len < mean) delta -= config.short_form_penalty;
      if (len > mean) delta -= config.long_form_rate * std::abs(len - config.long_form_baseline);
    }
  }

  if (!contains_vowel(candidate, table)) delta -= config.no_vowel_penalty;
  delta -= config.invalid_seq_penalty * count_illicit(candidate, constraints);
  delta -= config.cluster_penalty *
           count_consonant_runs(candidate, table, config.cluster_run_limit + 1);
  return delta;
}

std::vector<Candidate> rank_candidates(const std::vector<Candidate>& candidates,
                                       const std::vector<PhonemeSeq>& reflexes,
                                       const RankerConfig& config,
                                       const PhonotacticConstraints& constraints,
                                       const FeatureTable& table) {
  if (candidates.empty()) throw Error("rank_candidates requires a non-empty candidate list");

  std::vector<Candidate> scored = candidates;
  for (Candidate& c : scored) {
    double pds = pds_score(c.form, reflexes, config, table);
    double brev = brevity_penalty(c.form, reflexes, config.lambda);
    double edit = edit_penalty(c.form, reflexes, config.mu);
    double structural = structural_adjust(c.form, reflexes, config, constraints, table);
    // The composite sums pds+brev+edit per language and then renormalizes by
    // |L|; all three are per-set scalars, so the factors cancel.
    double score = pds + brev + edit + structural;
    c.score_components["pds"] = pds;
    c.score_components["brev"] = brev;
    c.score_components["edit"] = edit;
    c.score_components["structural"] = structural;
    c.score_components["score"] = score;
  }

  if (config.sim_threshold > 0.0) {
    std::vector<Candidate> kept;
    for (const Candidate& c : scored) {
      double best = -1.0;
      for (const PhonemeSeq& r : reflexes) {
        std::size_t mx = std::max(c.form.size(), r.size());
        double s = mx == 0 ? 1.0 : 1.0 - static_cast<double>(levenshtein(c.form, r)) /
                                             static_cast<double>(mx);
        best = std::max(best, s);
      }
      if (best > config.sim_threshold) kept.push_back(c);
    }
    // The filter is a retention gate, not an emptiness source: when nothing
    // clears the bar, fall back to the full scored list.
    if (!kept.empty()) scored = std::move(kept);
  }

  std::sort(scored.begin(), scored.end(), [&](const Candidate& a, const Candidate& b) {
    double sa = a.score_components.at("score");
    double sb = b.score_components.at("score");
    if (sa != sb) return sa > sb;
    if (a.cumulative_cost != b.cumulative_cost) return a.cumulative_cost < b.cumulative_cost;
    return form_less(a.form, b.form, table);
  });
  if (scored.size() > static_cast<std::size_t>(config.rerank_top))
    scored.resize(static_cast<std::size_t>(config.rerank_top));
  return scored;
}

}  // namespace protorec
