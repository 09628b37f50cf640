#include "protorec/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "protorec/distance.hpp"
#include "protorec/errors.hpp"
#include "protorec/rng.hpp"

namespace protorec {

const char* operator_name(MutationOperator op) {
  switch (op) {
    case MutationOperator::Vowel: return "vowel";
    case MutationOperator::Morph: return "morph";
    case MutationOperator::Cluster: return "cluster";
  }
  return "vowel";
}

const char* termination_name(TerminationReason r) {
  switch (r) {
    case TerminationReason::SingleSurvivor: return "single-survivor";
    case TerminationReason::MaxGenerations: return "max-generations";
    case TerminationReason::FitnessConvergence: return "fitness-convergence";
  }
  return "max-generations";
}

double fitness(const Candidate& candidate, const CognateSet& set, const RuleInventory& inventory,
               const EvoConfig& config, const FeatureTable& table) {
  double likelihood = 0.0;
  std::size_t min_len = SIZE_MAX, max_len = 0;
  for (std::size_t l : set.present_indices()) {
    const PhonemeSeq& reflex = *set.reflexes[l];
    min_len = std::min(min_len, reflex.size());
    max_len = std::max(max_len, reflex.size());
    const std::string& language = inventory.languages[l];
    PhonemeSeq derived = forward_apply(candidate.form, language, inventory);
    double p = std::max(config.eps_floor, sim_norm(derived, reflex, table));
    likelihood += inventory.psi_for(language) * std::log(p);
  }

  double prior =
      config.alpha_morph * morph_score(candidate.form, inventory.proto_language, inventory) +
      config.beta_phono * phono_score(candidate.form, inventory, config.pathway, table);

  double f = likelihood + prior;
  // Length adjustments are probability-scale multipliers, i.e. additive here.
  if (candidate.form.size() < min_len) f += std::log(config.short_len_mult);
  if (candidate.form.size() > max_len + 2) f += std::log(config.long_len_mult);
  return f;
}

std::vector<Candidate> eliminate_round(const std::vector<Candidate>& pool,
                                       const std::vector<double>& fitnesses,
                                       const EvoConfig& config, const FeatureTable& table) {
  if (pool.size() <= 1) return pool;
  std::size_t eta = std::max<std::size_t>(1, pool.size() / 5);
  eta = std::min(eta, pool.size() - 1);  // never empty the pool

  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Ascending fitness; among ties the lexicographically larger form dies
  // first.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (fitnesses[a] != fitnesses[b]) return fitnesses[a] < fitnesses[b];
    return form_less(pool[b].form, pool[a].form, table);
  });

  std::size_t incumbent = order.back();  // max fitness, lexicographically least among ties
  std::vector<bool> dead(pool.size(), false);
  std::size_t removed = 0;
  for (std::size_t k = 0; k < order.size() && removed < eta; ++k) {
    if (config.elitism && order[k] == incumbent) continue;
    dead[order[k]] = true;
    ++removed;
  }

  std::vector<Candidate> out;
  out.reserve(pool.size() - removed);
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (!dead[i]) out.push_back(pool[i]);
  return out;
}

double diversity(const std::vector<Candidate>& pool) {
  if (pool.size() < 2) return 0.0;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      std::size_t mx = std::max(pool[i].form.size(), pool[j].form.size());
      total += mx == 0 ? 0.0
                       : static_cast<double>(levenshtein(pool[i].form, pool[j].form)) /
                             static_cast<double>(mx);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

namespace {

// Lower sonority deletes first when a cluster is simplified.
int sonority(PhonemeId id, const FeatureTable& table) {
  switch (table.cls(id)) {
    case PhonemeClass::Stop: return 1;
    case PhonemeClass::Fricative: return 2;
    case PhonemeClass::Nasal: return 3;
    case PhonemeClass::Liquid: return 4;
    case PhonemeClass::Other: return 5;
    case PhonemeClass::Vowel: return 6;
  }
  return 5;
}

std::optional<PhonemeSeq> mutate_vowel(const PhonemeSeq& form, const EvoConfig& config,
                                       const FeatureTable& table, std::mt19937_64& rng) {
  std::vector<std::size_t> vowel_positions;
  for (std::size_t i = 0; i < form.size(); ++i)
    if (table.is_vowel(form[i])) vowel_positions.push_back(i);
  if (vowel_positions.empty()) return std::nullopt;
  std::size_t pos = vowel_positions[rand_index(rng, vowel_positions.size())];
  PhonemeSeq out = form;
  if (config.vowel_mutation_deletes) {
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos));
  } else {
    const auto& vowels = table.vowels();
    out[pos] = vowels[rand_index(rng, vowels.size())];
  }
  return out;
}

std::optional<PhonemeSeq> mutate_morph(const PhonemeSeq& form, const RuleInventory& inventory,
                                       const EvoConfig& config, std::mt19937_64& rng) {
  const auto& cues = inventory.cues_for(inventory.proto_language);
  if (cues.empty()) return std::nullopt;

  // A suffix is recognized when it equals a cue or is a proper prefix of one
  // (the truncated remnant of a valid ending); longest match wins.
  std::size_t max_cue = 0;
  for (const auto& cue : cues) max_cue = std::max(max_cue, cue.suffix.size());
  std::size_t recognized = 0;
  for (std::size_t k = std::min(form.size(), max_cue); k >= 1 && recognized == 0; --k) {
    PhonemeSeq tail(form.end() - static_cast<std::ptrdiff_t>(k), form.end());
    for (const auto& cue : cues) {
      if (cue.suffix.size() < tail.size()) continue;
      if (std::equal(tail.begin(), tail.end(), cue.suffix.begin())) {
        recognized = k;
        break;
      }
    }
  }

  const PhonemeSeq& replacement = cues[rand_index(rng, cues.size())].suffix;
  if (recognized > 0) {
    PhonemeSeq out(form.begin(), form.end() - static_cast<std::ptrdiff_t>(recognized));
    out.insert(out.end(), replacement.begin(), replacement.end());
    if (out == form) return std::nullopt;
    return out;
  }
  if (rand_unit(rng) < config.morph_append_prob) {
    PhonemeSeq out = form;
    out.insert(out.end(), replacement.begin(), replacement.end());
    return out;
  }
  return std::nullopt;
}

std::optional<PhonemeSeq> mutate_cluster(const PhonemeSeq& form, const RuleInventory& inventory,
                                         const FeatureTable& table) {
  int limit = inventory.constraints.max_cluster;
  PhonemeSeq out = form;
  bool changed = false;
  while (true) {
    // Locate the first over-long consonant run.
    std::size_t run_start = 0, run_len = 0;
    bool found = false;
    for (std::size_t i = 0; i <= out.size(); ++i) {
      bool cons = i < out.size() && out[i] != kGap && !table.is_vowel(out[i]);
      if (cons) {
        if (run_len == 0) run_start = i;
        ++run_len;
      } else {
        if (run_len > static_cast<std::size_t>(limit)) {
          found = true;
          break;
        }
        run_len = 0;
      }
    }
    if (!found) break;
    // Drop the leftmost lowest-sonority member of the run.
    std::size_t victim = run_start;
    for (std::size_t i = run_start; i < run_start + run_len; ++i)
      if (sonority(out[i], table) < sonority(out[victim], table)) victim = i;
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(victim));
    changed = true;
  }
  if (!changed) return std::nullopt;
  return out;
}

}  // namespace

std::optional<Candidate> mutate(const Candidate& candidate, MutationOperator op,
                                const RuleInventory& inventory, const EvoConfig& config,
                                const FeatureTable& table, std::mt19937_64& rng) {
  std::optional<PhonemeSeq> form;
  switch (op) {
    case MutationOperator::Vowel:
      form = mutate_vowel(candidate.form, config, table, rng);
      break;
    case MutationOperator::Morph:
      form = mutate_morph(candidate.form, inventory, config, rng);
      break;
    case MutationOperator::Cluster:
      form = mutate_cluster(candidate.form, inventory, table);
      break;
  }
  if (!form) return std::nullopt;
  Candidate out;
  out.form = std::move(*form);
  out.provenance = {ProvenanceKind::Mutant, operator_name(op)};
  return out;
}

namespace {

int provenance_rank(const Provenance& p) {
  switch (p.kind) {
    case ProvenanceKind::Parsimony: return 0;
    case ProvenanceKind::Pathway: return 1;
    case ProvenanceKind::Mutant: return 2;
  }
  return 2;
}

}  // namespace

std::vector<Candidate> seed_population(const std::vector<Candidate>& parsimony_top,
                                       const std::vector<Candidate>& pathway_top,
                                       const CognateSet& set, const RuleInventory& inventory,
                                       const EvoConfig& config, const FeatureTable& table,
                                       std::mt19937_64& rng) {
  if (parsimony_top.empty() && pathway_top.empty()) throw EmptySeedsError();

  std::map<PhonemeSeq, Candidate> dedup;
  auto absorb = [&](const Candidate& c) {
    auto it = dedup.find(c.form);
    if (it == dedup.end() || provenance_rank(c.provenance) < provenance_rank(it->second.provenance))
      dedup[c.form] = c;
  };
  for (const Candidate& c : parsimony_top) absorb(c);
  for (const Candidate& c : pathway_top) absorb(c);

  std::vector<std::pair<Candidate, double>> scored;
  scored.reserve(dedup.size());
  for (auto& [form, c] : dedup) {
    (void)form;
    double f = fitness(c, set, inventory, config, table);
    scored.emplace_back(std::move(c), f);
  }
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return form_less(a.first.form, b.first.form, table);
  });
  if (scored.size() > static_cast<std::size_t>(config.pool_size))
    scored.resize(static_cast<std::size_t>(config.pool_size));

  std::vector<Candidate> pool;
  pool.reserve(static_cast<std::size_t>(config.pool_size));
  for (auto& [c, f] : scored) {
    c.score_components["fitness"] = f;
    pool.push_back(std::move(c));
  }

  // Pad a small union with vowel variants of the best member.
  int attempts = 0;
  const int attempt_limit = config.pool_size * 20;
  while (pool.size() < static_cast<std::size_t>(config.pool_size) && attempts < attempt_limit) {
    ++attempts;
    auto mutant = mutate(pool.front(), MutationOperator::Vowel, inventory, config, table, rng);
    if (!mutant) break;
    bool duplicate = std::any_of(pool.begin(), pool.end(), [&](const Candidate& c) {
      return c.form == mutant->form;
    });
    if (duplicate) continue;
    mutant->score_components["fitness"] = fitness(*mutant, set, inventory, config, table);
    pool.push_back(std::move(*mutant));
  }
  return pool;
}

std::pair<Candidate, EvoTrace> evolve(const CognateSet& set, const std::vector<Candidate>& seeds,
                                      const RuleInventory& inventory, const EvoConfig& config,
                                      const FeatureTable& table) {
  if (seeds.empty()) throw EmptySeedsError();
  std::mt19937_64 rng(config.seed);

  std::vector<Candidate> parsimony_seeds, pathway_seeds;
  for (const Candidate& c : seeds)
    (c.provenance.kind == ProvenanceKind::Pathway ? pathway_seeds : parsimony_seeds).push_back(c);
  std::vector<Candidate> pool =
      seed_population(parsimony_seeds, pathway_seeds, set, inventory, config, table, rng);

  EvoTrace trace;
  double best_fitness = -std::numeric_limits<double>::infinity();
  int stagnant = 0;

  const MutationOperator cycle[3] = {MutationOperator::Vowel, MutationOperator::Morph,
                                     MutationOperator::Cluster};

  for (int round = 1;; ++round) {
    std::vector<double> fits(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      fits[i] = fitness(pool[i], set, inventory, config, table);
      pool[i].score_components["fitness"] = fits[i];
    }

    // Fitness-descending view for the record and for picking the incumbent.
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (fits[a] != fits[b]) return fits[a] > fits[b];
      return form_less(pool[a].form, pool[b].form, table);
    });

    EvoRoundRecord record;
    record.round = round;
    record.diversity = diversity(pool);
    for (std::size_t i : order) {
      record.pool.push_back(table.detokenize(pool[i].form));
      record.fitness.push_back(fits[i]);
    }

    double round_best = fits[order.front()];
    if (round_best > best_fitness) {
      best_fitness = round_best;
      stagnant = 0;
    } else {
      ++stagnant;
    }

    std::optional<TerminationReason> stop;
    if (pool.size() == 1)
      stop = TerminationReason::SingleSurvivor;
    else if (round >= config.max_rounds)
      stop = TerminationReason::MaxGenerations;
    else if (stagnant >= config.patience)
      stop = TerminationReason::FitnessConvergence;

    if (stop) {
      trace.rounds.push_back(std::move(record));
      trace.reason = *stop;
      Candidate best = pool[order.front()];
      return {std::move(best), std::move(trace)};
    }

    std::vector<Candidate> survivors = eliminate_round(pool, fits, config, table);
    for (const Candidate& before : pool) {
      bool alive = std::any_of(survivors.begin(), survivors.end(), [&](const Candidate& c) {
        return c.form == before.form;
      });
      if (!alive) record.eliminated.push_back(table.detokenize(before.form));
    }
    pool = std::move(survivors);

    if (diversity(pool) < config.theta_div) {
      // Inject one mutant per survivor, cycling operators, fittest first.
      std::vector<std::size_t> inject_order(pool.size());
      for (std::size_t i = 0; i < inject_order.size(); ++i) inject_order[i] = i;
      std::sort(inject_order.begin(), inject_order.end(), [&](std::size_t a, std::size_t b) {
        double fa = pool[a].score_components.at("fitness");
        double fb = pool[b].score_components.at("fitness");
        if (fa != fb) return fa > fb;
        return form_less(pool[a].form, pool[b].form, table);
      });
      std::vector<Candidate> injected;
      for (std::size_t k = 0; k < inject_order.size(); ++k) {
        if (pool.size() + injected.size() >= static_cast<std::size_t>(config.pool_size)) break;
        const Candidate& parent = pool[inject_order[k]];
        for (int attempt = 0; attempt < 3; ++attempt) {
          MutationOperator op = cycle[(k + static_cast<std::size_t>(attempt)) % 3];
          auto mutant = mutate(parent, op, inventory, config, table, rng);
          if (!mutant) continue;
          bool duplicate =
              std::any_of(pool.begin(), pool.end(),
                          [&](const Candidate& c) { return c.form == mutant->form; }) ||
              std::any_of(injected.begin(), injected.end(),
                          [&](const Candidate& c) { return c.form == mutant->form; });
          if (duplicate) continue;
          record.injected.emplace_back(table.detokenize(mutant->form), operator_name(op));
          injected.push_back(std::move(*mutant));
          break;
        }
      }
      for (Candidate& c : injected) {
        c.score_components["fitness"] = fitness(c, set, inventory, config, table);
        pool.push_back(std::move(c));
      }
    }

    trace.rounds.push_back(std::move(record));
  }
}

}  // namespace protorec
