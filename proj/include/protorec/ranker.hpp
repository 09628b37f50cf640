#pragma once

#include "protorec/candidate.hpp"
#include "protorec/distance.hpp"
#include "protorec/phonotactics.hpp"

namespace protorec {

struct EditOp {
  EditKind kind = EditKind::Substitute;
  int position = 0;          // candidate-side index (insertion point for inserts)
  std::string before;        // candidate-side symbol, empty for insertions
  std::string after;         // reflex-side symbol, empty for deletions
  std::string left_context;  // adjacent candidate phoneme, empty at a boundary
  std::string right_context;
  bool conditioned = false;
};

struct EditClassification {
  int m = 0;     // distinct (before -> after) change types
  int cond = 0;  // change types with at least one conditioned occurrence
  int m_tokens = 0;
  int cond_tokens = 0;
  std::vector<EditOp> script;
};

struct RankerConfig {
  double h = 10.0;      // homotopy parameter
  double b = 10000.0;   // complexity base
  double lambda = 5.0;  // brevity weight
  double mu = 5.0;      // edit weight
  // Candidates must come within this normalized similarity of some reflex to
  // survive ranking; <= 0 disables the filter.
  double sim_threshold = 0.8;
  // Count change tokens instead of distinct change types in m/cond.
  bool count_tokens = false;

  // Structural penalty constants.
  double len_mismatch_rate = 0.3;
  double len_mismatch_slack = 2.0;
  double short_form_penalty = 2.0;
  double long_form_rate = 0.4;
  double long_form_baseline = 12.0;
  double no_vowel_penalty = 6.0;
  double invalid_seq_penalty = 1.0;
  double cluster_penalty = 0.6;
  int cluster_run_limit = 3;  // runs longer than this are penalized

  int rerank_top = 10;
};

/// One minimal edit script between candidate and reflex (the canonical
/// alignment), with each change classified as conditioned when it has an
/// adjacent candidate-side segment in the aligned view, unconditioned when it
/// stands alone at a word edge.
EditClassification classify_edits(const PhonemeSeq& candidate, const PhonemeSeq& reflex,
                                  const FeatureTable& table);

/// Log-scaled phonological plausibility P(D|S):
///   m_c*log_b(h) + cond_c*log_b(2) + sum_{i=loss+1..|L|}[log_b(i)-log_b(i-loss)] - |L|
/// where loss counts reflexes the candidate fails to match exactly.
double pds_score(const PhonemeSeq& candidate, const std::vector<PhonemeSeq>& reflexes,
                 const RankerConfig& config, const FeatureTable& table);

/// -lambda * |len(candidate) - mean reflex length|.
double brevity_penalty(const PhonemeSeq& candidate, const std::vector<PhonemeSeq>& reflexes,
                       double lambda);

/// -mu * mean Levenshtein distance to the reflexes.
double edit_penalty(const PhonemeSeq& candidate, const std::vector<PhonemeSeq>& reflexes,
                    double mu);

/// Structural penalties: length deviations beyond the slack (with the flat
/// short-form and baseline-relative long-form terms), missing vowels, illicit
/// sequences, and over-long consonant clusters. Zero for a form matching the
/// reflex profile.
double structural_adjust(const PhonemeSeq& candidate, const std::vector<PhonemeSeq>& reflexes,
                         const RankerConfig& config, const PhonotacticConstraints& constraints,
                         const FeatureTable& table);

/// Score candidates with pds + brevity + edit + structural, drop those
/// farther than sim_threshold from every reflex (keeping everything when the
/// filter would empty the list), and return the rerank_top best, descending.
std::vector<Candidate> rank_candidates(const std::vector<Candidate>& candidates,
                                       const std::vector<PhonemeSeq>& reflexes,
                                       const RankerConfig& config,
                                       const PhonotacticConstraints& constraints,
                                       const FeatureTable& table);

}  // namespace protorec
