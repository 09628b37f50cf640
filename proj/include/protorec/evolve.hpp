#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "protorec/candidate.hpp"
#include "protorec/dataset.hpp"
#include "protorec/rules.hpp"

namespace protorec {

struct EvoConfig {
  int max_rounds = 20;
  int pool_size = 10;
  // Fitness multipliers (additive in log space) for forms shorter than the
  // shortest reflex / longer than the longest reflex plus two.
  double short_len_mult = 0.8;
  double long_len_mult = 0.5;
  double theta_div = 0.3;  // mutation trigger: mean normalized pairwise distance
  int patience = 3;        // rounds without best-fitness improvement before stopping
  double alpha_morph = 1.0;
  double beta_phono = 1.0;
  double eps_floor = 1e-6;  // likelihood floor before the log
  bool elitism = true;      // the incumbent best survives every elimination
  // The printed mutation formula deletes the vowel instead of replacing it;
  // kept available for strict-formula runs.
  bool vowel_mutation_deletes = false;
  double morph_append_prob = 0.5;
  std::uint64_t seed = 0;
  PathwayConfig pathway;  // prior constants shared with Phase II
};

enum class MutationOperator { Vowel, Morph, Cluster };
const char* operator_name(MutationOperator op);

enum class TerminationReason { SingleSurvivor, MaxGenerations, FitnessConvergence };
const char* termination_name(TerminationReason r);

struct EvoRoundRecord {
  int round = 0;
  std::vector<std::string> pool;  // rendered forms, fitness-descending
  std::vector<double> fitness;    // parallel to pool
  double diversity = 0.0;
  std::vector<std::string> eliminated;
  std::vector<std::pair<std::string, std::string>> injected;  // form, operator
};

struct EvoTrace {
  std::vector<EvoRoundRecord> rounds;
  TerminationReason reason = TerminationReason::MaxGenerations;
};

/// Deduplicated union of parsimony and pathway seeds, truncated to pool_size
/// by fitness; when the union is smaller, padded with vowel mutants of the
/// best member.
std::vector<Candidate> seed_population(const std::vector<Candidate>& parsimony_top,
                                       const std::vector<Candidate>& pathway_top,
                                       const CognateSet& set, const RuleInventory& inventory,
                                       const EvoConfig& config, const FeatureTable& table,
                                       std::mt19937_64& rng);

/// Composite fitness: phylogeny-weighted log-likelihood of the reflexes under
/// forward rule application (sim rescaled into (0,1]) plus the morphological
/// and phonotactic prior, with the short/long length adjustments.
double fitness(const Candidate& candidate, const CognateSet& set, const RuleInventory& inventory,
               const EvoConfig& config, const FeatureTable& table);

/// Remove the max(1, floor(|pool|/5)) lowest-fitness members; ties drop the
/// lexicographically larger form first. Never empties the pool, and under
/// elitism never removes the incumbent best.
std::vector<Candidate> eliminate_round(const std::vector<Candidate>& pool,
                                       const std::vector<double>& fitnesses,
                                       const EvoConfig& config, const FeatureTable& table);

/// Mean normalized pairwise Levenshtein distance, in [0,1]; 0 for singletons.
double diversity(const std::vector<Candidate>& pool);

/// Apply one mutation operator; nullopt when the operator does not apply
/// (no vowel to mutate, no over-long cluster, no usable suffix).
std::optional<Candidate> mutate(const Candidate& candidate, MutationOperator op,
                                const RuleInventory& inventory, const EvoConfig& config,
                                const FeatureTable& table, std::mt19937_64& rng);

/// Run the evolutionary loop to termination and return the fittest survivor
/// plus the full per-round trace. Deterministic under a fixed config seed.
std::pair<Candidate, EvoTrace> evolve(const CognateSet& set, const std::vector<Candidate>& seeds,
                                      const RuleInventory& inventory, const EvoConfig& config,
                                      const FeatureTable& table);

}  // namespace protorec
