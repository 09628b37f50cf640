#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "protorec/candidate.hpp"
#include "protorec/dataset.hpp"
#include "protorec/phonotactics.hpp"

namespace protorec {

// One A -> B sound change, optionally conditioned on adjacent material.
// Contexts are plain phoneme sequences or a word-boundary anchor.
struct RuleContext {
  bool boundary = false;
  PhonemeSeq seq;
  bool unconstrained() const { return !boundary && seq.empty(); }
};

struct SoundRule {
  std::string language;
  PhonemeSeq source;
  PhonemeSeq target;
  RuleContext left;
  RuleContext right;
};

struct MorphCue {
  PhonemeSeq suffix;
  double bonus = 0.5;
};

/// The linguistic inventory backing Phase II and the evolutionary prior:
/// per-language weighted rewrite rules, morphological cues, phonotactic
/// constraints, and the phylogeny used for likelihood weights.
struct RuleInventory {
  std::vector<std::string> languages;  // configured reflex languages
  std::map<std::string, std::vector<SoundRule>> rules;  // file order preserved
  std::map<std::string, std::vector<MorphCue>> cues;    // keyed by cue language
  PhonotacticConstraints constraints;
  std::string proto_language = "latin";  // cue set consulted when scoring protoforms
  std::map<std::string, double> psi;     // per-language phylogenetic weight

  const std::vector<SoundRule>& rules_for(const std::string& language) const;
  const std::vector<MorphCue>& cues_for(const std::string& language) const;
  double psi_for(const std::string& language) const;

  void load_rules_file(const std::string& path, const FeatureTable& table);
  void load_rules(std::istream& in, const FeatureTable& table);
  void load_cues_file(const std::string& path, const FeatureTable& table, double default_bonus);
  void load_cues(std::istream& in, const FeatureTable& table, double default_bonus);

  /// Parse "((french,spanish),portuguese,italian,romanian)". Leaves must be
  /// exactly the configured languages. With depth_weights, a leaf's weight is
  /// halved for each nesting level below the root.
  void set_phylogeny(const std::string& text, bool depth_weights);
};

struct PathwayConfig {
  int depth = 3;   // max inverse-application recursion
  int cap = 10;    // pathways retained per depth level; <= 0 means unbounded
  int top_k = 3;   // pathways kept per language
  double alpha = 0.5;  // length penalty in the naturalness weight
  // Accumulated log rule weight participates in per-level capping; disable to
  // cap on the well-formedness score alone.
  bool weight_in_capping = true;
  double default_cue_bonus = 0.5;

  // Well-formedness constants. Phase II penalizes clusters already at three
  // consecutive consonants, one step stricter than the ranker.
  double cluster_penalty = 0.6;
  int cluster_min_run = 3;
  double no_vowel_penalty = 6.0;
  double illicit_penalty = 1.0;
};

/// phi(s,t) / (1 + alpha*|len(s)-len(t)|): phonetic-class affinity damped by
/// the length change. Always in (0, 1.5].
double naturalness_weight(const SoundRule& rule, double alpha, const FeatureTable& table);

/// Apply the language's rules in file order, one pass per rule over
/// non-overlapping left-to-right matches. Realizes r^l(p).
PhonemeSeq forward_apply(const PhonemeSeq& protoform, const std::string& language,
                         const RuleInventory& inventory);
/// Same, also reporting the number of site rewrites performed (the inverse
/// depth needed to undo the derivation).
PhonemeSeq forward_apply_counted(const PhonemeSeq& protoform, const std::string& language,
                                 const RuleInventory& inventory, int* rewrites);

/// Morphological well-formedness: sum of bonuses of cue suffixes the form
/// ends with, drawn from the given cue language's set.
double morph_score(const PhonemeSeq& form, const std::string& cue_language,
                   const RuleInventory& inventory);
/// Phonotactic well-formedness: cluster, vowel-absence, and illicit-sequence
/// penalties. Zero for a clean form.
double phono_score(const PhonemeSeq& form, const RuleInventory& inventory,
                   const PathwayConfig& config, const FeatureTable& table);
/// M_score + P_score.
double pathway_score(const PhonemeSeq& form, const std::string& cue_language,
                     const RuleInventory& inventory, const PathwayConfig& config,
                     const FeatureTable& table);

/// Bounded-depth breadth-first inverse rule application. Each level rewrites
/// one matching site per emitted form, accumulates log naturalness weights,
/// and keeps the cap best forms by pathway score (+ accumulated weight). The
/// returned pool is the union over levels, depth 0 (the unchanged input)
/// included, deduplicated by form.
std::vector<Candidate> reverse_transform(const Candidate& candidate, const std::string& language,
                                         const RuleInventory& inventory,
                                         const PathwayConfig& config, const FeatureTable& table);

/// Per-language union of reverse transforms over all Phase I candidates,
/// top_k best retained per language.
std::map<std::string, std::vector<Candidate>> top_pathways(
    const std::vector<Candidate>& candidates, const RuleInventory& inventory,
    const PathwayConfig& config, const FeatureTable& table);

/// Testing oracle for the generative assumption w = r^l(p) + noise: derive
/// every reflex by forward rule application, optionally perturbed by one
/// seeded random single-phoneme edit per reflex with the given probability.
Dataset synthesize_dataset(const std::vector<PhonemeSeq>& protoforms,
                           const RuleInventory& inventory,
                           const std::vector<std::string>& languages, double noise,
                           std::uint64_t seed, const FeatureTable& table,
                           const std::string& gold_column = "latin");

}  // namespace protorec
