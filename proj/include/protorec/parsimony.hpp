#pragma once

#include "protorec/candidate.hpp"
#include "protorec/dataset.hpp"

namespace protorec {

struct BeamConfig {
  int beam_width = 10;     // surviving prefixes per column
  int candidate_cap = 50;  // pool fed to reranking
  int rerank_top = 10;     // candidates the ranker keeps
  int max_iterations = 5;  // beam-widening restarts
};

/// Cost of extending a prefix with sigma against one alignment column:
/// one penalty per cell that differs from sigma, with the gap treated as an
/// ordinary value (so choosing the gap costs one per non-gap cell).
int column_extension_cost(PhonemeId sigma, const std::vector<PhonemeId>& column);

/// Column-wise beam search over the padded matrix. Each column is extended
/// with every symbol attested in it plus the gap option; the beam keeps the
/// cheapest prefixes, ties broken lexicographically. Final forms are
/// gap-stripped, deduplicated at minimum cost, and returned cost-ascending
/// (ties lexicographic), at most candidate_cap of them. When fewer than
/// rerank_top distinct forms survive, the search restarts with an
/// incrementally widened beam, up to max_iterations attempts.
std::vector<Candidate> beam_reconstruct(const AlignmentMatrix& matrix, const BeamConfig& config,
                                        const FeatureTable& table);

}  // namespace protorec
