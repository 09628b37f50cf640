#include "protorec/parsimony.hpp"

#include <algorithm>
#include <map>

#include "protorec/errors.hpp"

namespace protorec {

int column_extension_cost(PhonemeId sigma, const std::vector<PhonemeId>& column) {
  int cost = 0;
  for (PhonemeId cell : column)
    if (cell != sigma) ++cost;
  return cost;
}

namespace {

struct Prefix {
  PhonemeSeq choices;  // gap choices included
  int cost = 0;
};

std::vector<Candidate> run_beam(const AlignmentMatrix& matrix, int beam_width, int candidate_cap,
                                const FeatureTable& table) {
  std::vector<Prefix> beam{Prefix{}};
  std::vector<PhonemeId> column;
  for (std::size_t col = 0; col < matrix.width; ++col) {
    column.clear();
    for (const auto& row : matrix.rows) column.push_back(row[col]);

    // Attested symbols plus the gap (deletion) option, in a fixed order.
    std::vector<PhonemeId> options;
    for (PhonemeId cell : column)
      if (cell != kGap && std::find(options.begin(), options.end(), cell) == options.end())
        options.push_back(cell);
    std::sort(options.begin(), options.end(),
              [&](PhonemeId a, PhonemeId b) { return table.symbol(a) < table.symbol(b); });
    options.push_back(kGap);

    std::map<PhonemeId, int> option_cost;
    for (PhonemeId sigma : options) option_cost[sigma] = column_extension_cost(sigma, column);

    std::vector<Prefix> expanded;
    expanded.reserve(beam.size() * options.size());
    for (const Prefix& prefix : beam) {
      for (PhonemeId sigma : options) {
        Prefix next = prefix;
        next.choices.push_back(sigma);
        next.cost += option_cost[sigma];
        expanded.push_back(std::move(next));
      }
    }
    std::sort(expanded.begin(), expanded.end(), [&](const Prefix& a, const Prefix& b) {
      if (a.cost != b.cost) return a.cost < b.cost;
      return form_less(a.choices, b.choices, table);
    });
    if (expanded.size() > static_cast<std::size_t>(beam_width))
      expanded.resize(static_cast<std::size_t>(beam_width));
    beam = std::move(expanded);
  }

  // Strip gaps, dedupe identical forms at minimum cost.
  std::map<PhonemeSeq, int> best;
  for (const Prefix& prefix : beam) {
    PhonemeSeq form;
    for (PhonemeId id : prefix.choices)
      if (id != kGap) form.push_back(id);
    auto it = best.find(form);
    if (it == best.end() || prefix.cost < it->second) best[form] = prefix.cost;
  }

  std::vector<Candidate> out;
  out.reserve(best.size());
  for (auto& [form, cost] : best) {
    Candidate c;
    c.form = form;
    c.cumulative_cost = cost;
    c.provenance = {ProvenanceKind::Parsimony, ""};
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.cumulative_cost != b.cumulative_cost) return a.cumulative_cost < b.cumulative_cost;
    return form_less(a.form, b.form, table);
  });
  if (out.size() > static_cast<std::size_t>(candidate_cap))
    out.resize(static_cast<std::size_t>(candidate_cap));
  return out;
}

}  // namespace

std::vector<Candidate> beam_reconstruct(const AlignmentMatrix& matrix, const BeamConfig& config,
                                        const FeatureTable& table) {
  if (matrix.rows.empty()) throw EmptyMatrixError();

  // Upper bound on distinct beam paths; once the beam covers it, widening
  // cannot surface anything new.
  long long path_bound = 1;
  for (std::size_t col = 0; col < matrix.width && path_bound < (1LL << 40); ++col) {
    std::vector<PhonemeId> distinct;
    for (const auto& row : matrix.rows)
      if (row[col] != kGap &&
          std::find(distinct.begin(), distinct.end(), row[col]) == distinct.end())
        distinct.push_back(row[col]);
    path_bound *= static_cast<long long>(distinct.size()) + 1;
  }

  std::vector<Candidate> result;
  for (int attempt = 1; attempt <= std::max(1, config.max_iterations); ++attempt) {
    long long width = static_cast<long long>(config.beam_width) * attempt;
    result = run_beam(matrix, static_cast<int>(std::min<long long>(width, path_bound)),
                      config.candidate_cap, table);
    if (result.size() >= static_cast<std::size_t>(config.rerank_top)) break;
    if (width >= path_bound) break;  // beam already exhaustive
  }
  return result;
}

}  // namespace protorec
