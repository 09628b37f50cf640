#include "protorec/rules.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "protorec/distance.hpp"
#include "protorec/errors.hpp"
#include "protorec/rng.hpp"

namespace protorec {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

constexpr const char* kEmptyMark = "∅";  // ∅ in rule files

PhonemeSeq parse_side(const std::string& text, const FeatureTable& table) {
  if (text.empty() || text == kEmptyMark) return {};
  return table.tokenize(text);
}

RuleContext parse_context(const std::string& text, const FeatureTable& table) {
  RuleContext ctx;
  if (text.empty() || text == kEmptyMark) return ctx;
  if (text == "#") {
    ctx.boundary = true;
    return ctx;
  }
  ctx.seq = table.tokenize(text);
  return ctx;
}

bool seq_matches_at(const PhonemeSeq& seq, std::size_t pos, const PhonemeSeq& pat) {
  if (pos + pat.size() > seq.size()) return false;
  for (std::size_t i = 0; i < pat.size(); ++i)
    if (seq[pos + i] != pat[i]) return false;
  return true;
}

// Does `what` (a source or inverted source) match seq at pos under the rule's
// contexts?
bool rule_matches(const PhonemeSeq& seq, std::size_t pos, const PhonemeSeq& what,
                  const RuleContext& left, const RuleContext& right) {
  if (!seq_matches_at(seq, pos, what)) return false;
  if (left.boundary) {
    if (pos != 0) return false;
  } else if (!left.seq.empty()) {
    if (pos < left.seq.size()) return false;
    if (!seq_matches_at(seq, pos - left.seq.size(), left.seq)) return false;
  }
  std::size_t end = pos + what.size();
  if (right.boundary) {
    if (end != seq.size()) return false;
  } else if (!right.seq.empty()) {
    if (!seq_matches_at(seq, end, right.seq)) return false;
  }
  return true;
}

PhonemeSeq splice(const PhonemeSeq& seq, std::size_t pos, std::size_t len,
                  const PhonemeSeq& replacement) {
  PhonemeSeq out;
  out.reserve(seq.size() - len + replacement.size());
  out.insert(out.end(), seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(pos));
  out.insert(out.end(), replacement.begin(), replacement.end());
  out.insert(out.end(), seq.begin() + static_cast<std::ptrdiff_t>(pos + len), seq.end());
  return out;
}

}  // namespace

const std::vector<SoundRule>& RuleInventory::rules_for(const std::string& language) const {
  static const std::vector<SoundRule> none;
  auto it = rules.find(language);
  return it == rules.end() ? none : it->second;
}

const std::vector<MorphCue>& RuleInventory::cues_for(const std::string& language) const {
  static const std::vector<MorphCue> none;
  auto it = cues.find(language);
  return it == cues.end() ? none : it->second;
}

double RuleInventory::psi_for(const std::string& language) const {
  auto it = psi.find(language);
  return it == psi.end() ? 1.0 : it->second;
}

void RuleInventory::load_rules_file(const std::string& path, const FeatureTable& table) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rule file: " + path);
  load_rules(in, table);
}

void RuleInventory::load_rules(std::istream& in, const FeatureTable& table) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_tabs(line);
    if (cells.size() < 3 || cells.size() > 5)
      throw MalformedRecordError(line_no, "expected language, source, target[, left[, right]]");
    SoundRule rule;
    rule.language = cells[0];
    if (std::find(languages.begin(), languages.end(), rule.language) == languages.end())
      throw MalformedRecordError(line_no, "rule language '" + rule.language + "' is not configured");
    rule.source = parse_side(cells[1], table);
    rule.target = parse_side(cells[2], table);
    if (rule.source.empty() && rule.target.empty())
      throw MalformedRecordError(line_no, "source and target cannot both be empty");
    if (rule.source == rule.target)
      throw MalformedRecordError(line_no, "source and target must differ");
    if (cells.size() > 3) rule.left = parse_context(cells[3], table);
    if (cells.size() > 4) rule.right = parse_context(cells[4], table);
    rules[rule.language].push_back(std::move(rule));
  }
}

void RuleInventory::load_cues_file(const std::string& path, const FeatureTable& table,
                                   double default_bonus) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cue file: " + path);
  load_cues(in, table, default_bonus);
}

void RuleInventory::load_cues(std::istream& in, const FeatureTable& table, double default_bonus) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_tabs(line);
    if (cells.size() < 2 || cells.size() > 3)
      throw MalformedRecordError(line_no, "expected language, suffix[, bonus]");
    MorphCue cue;
    cue.suffix = table.tokenize(cells[1]);
    if (cue.suffix.empty()) throw MalformedRecordError(line_no, "empty cue suffix");
    cue.bonus = cells.size() > 2 ? std::stod(cells[2]) : default_bonus;
    cues[cells[0]].push_back(std::move(cue));
  }
}

void RuleInventory::set_phylogeny(const std::string& text, bool depth_weights) {
  psi.clear();
  if (text.empty()) return;
  std::vector<std::pair<std::string, int>> leaves;
  int depth = 0;
  std::string current;
  for (char c : text) {
    if (c == '(') {
      ++depth;
    } else if (c == ')' || c == ',') {
      if (!current.empty()) {
        leaves.emplace_back(current, depth);
        current.clear();
      }
      if (c == ')') --depth;
    } else if (c != ' ') {
      current += c;
    }
  }
  if (!current.empty()) leaves.emplace_back(current, depth);
  if (depth != 0) throw ConfigError("unbalanced parentheses in phylogeny: " + text);

  std::vector<std::string> seen;
  for (const auto& [name, lvl] : leaves) {
    if (std::find(languages.begin(), languages.end(), name) == languages.end())
      throw ConfigError("phylogeny leaf '" + name + "' is not a configured language");
    if (std::find(seen.begin(), seen.end(), name) != seen.end())
      throw ConfigError("phylogeny leaf '" + name + "' appears twice");
    seen.push_back(name);
    psi[name] = depth_weights ? std::pow(0.5, lvl - 1) : 1.0;
  }
  for (const auto& lang : languages)
    if (std::find(seen.begin(), seen.end(), lang) == seen.end())
      throw ConfigError("language '" + lang + "' missing from phylogeny");
}

double naturalness_weight(const SoundRule& rule, double alpha, const FeatureTable& table) {
  double phi = phonetic_bonus_strings(rule.source, rule.target, table);
  double gap = std::abs(static_cast<double>(rule.source.size()) -
                        static_cast<double>(rule.target.size()));
  return phi / (1.0 + alpha * gap);
}

namespace {

PhonemeSeq apply_one_rule(const PhonemeSeq& input, const SoundRule& rule, int* rewrites) {
  PhonemeSeq cur = input;
  std::size_t pos = 0;
  // Non-overlapping, left to right; empty-source (insertion) rules skip one
  // original phoneme after each insertion so the pass terminates.
  while (pos <= cur.size()) {
    if (!rule.source.empty() && pos + rule.source.size() > cur.size()) break;
    if (rule_matches(cur, pos, rule.source, rule.left, rule.right)) {
      cur = splice(cur, pos, rule.source.size(), rule.target);
      if (rewrites) ++(*rewrites);
      pos += rule.target.size() + (rule.source.empty() ? 1 : 0);
    } else {
      ++pos;
    }
  }
  return cur;
}

}  // namespace

PhonemeSeq forward_apply(const PhonemeSeq& protoform, const std::string& language,
                         const RuleInventory& inventory) {
  return forward_apply_counted(protoform, language, inventory, nullptr);
}

PhonemeSeq forward_apply_counted(const PhonemeSeq& protoform, const std::string& language,
                                 const RuleInventory& inventory, int* rewrites) {
  PhonemeSeq cur = protoform;
  for (const SoundRule& rule : inventory.rules_for(language))
    cur = apply_one_rule(cur, rule, rewrites);
  return cur;
}

double morph_score(const PhonemeSeq& form, const std::string& cue_language,
                   const RuleInventory& inventory) {
  double score = 0.0;
  for (const MorphCue& cue : inventory.cues_for(cue_language)) {
    if (cue.suffix.size() > form.size()) continue;
    if (std::equal(cue.suffix.begin(), cue.suffix.end(), form.end() - static_cast<std::ptrdiff_t>(cue.suffix.size())))
      score += cue.bonus;
  }
  return score;
}

double phono_score(const PhonemeSeq& form, const RuleInventory& inventory,
                   const PathwayConfig& config, const FeatureTable& table) {
  double score = 0.0;
  score -= config.cluster_penalty * count_consonant_runs(form, table, config.cluster_min_run);
  if (!contains_vowel(form, table)) score -= config.no_vowel_penalty;
  score -= config.illicit_penalty * count_illicit(form, inventory.constraints);
  return score;
}

double pathway_score(const PhonemeSeq& form, const std::string& cue_language,
                     const RuleInventory& inventory, const PathwayConfig& config,
                     const FeatureTable& table) {
  return morph_score(form, cue_language, inventory) + phono_score(form, inventory, config, table);
}

std::vector<Candidate> reverse_transform(const Candidate& candidate, const std::string& language,
                                         const RuleInventory& inventory,
                                         const PathwayConfig& config, const FeatureTable& table) {
  const std::vector<SoundRule>& fwd_rules = inventory.rules_for(language);

  // Inverse rules: swap source/target, keep contexts and the forward weight.
  struct Inverse {
    PhonemeSeq match;    // forward target
    PhonemeSeq replace;  // forward source
    RuleContext left, right;
    double log_weight;
  };
  std::vector<Inverse> inverses;
  inverses.reserve(fwd_rules.size());
  for (const SoundRule& rule : fwd_rules)
    inverses.push_back({rule.target, rule.source, rule.left, rule.right,
                        std::log(naturalness_weight(rule, config.alpha, table))});

  auto cap_score = [&](const PhonemeSeq& form, double weight) {
    return pathway_score(form, inventory.proto_language, inventory, config, table) +
           (config.weight_in_capping ? weight : 0.0);
  };

  // form -> best accumulated log weight
  std::map<PhonemeSeq, double> pool;
  pool[candidate.form] = 0.0;
  std::map<PhonemeSeq, double> frontier = pool;

  for (int level = 0; level < config.depth && !frontier.empty(); ++level) {
    std::map<PhonemeSeq, double> next;
    for (const auto& [form, weight] : frontier) {
      for (const Inverse& inv : inverses) {
        if (form.size() < inv.match.size()) continue;
        // Inclusive position bound; empty matches insert at every boundary.
        std::size_t limit = form.size() - inv.match.size();
        for (std::size_t pos = 0; pos <= limit; ++pos) {
          if (!rule_matches(form, pos, inv.match, inv.left, inv.right)) continue;
          PhonemeSeq rewritten = splice(form, pos, inv.match.size(), inv.replace);
          double w = weight + inv.log_weight;
          auto it = next.find(rewritten);
          if (it == next.end() || w > it->second) next[rewritten] = w;
        }
      }
    }
    if (config.cap > 0 && next.size() > static_cast<std::size_t>(config.cap)) {
      std::vector<std::pair<PhonemeSeq, double>> ordered(next.begin(), next.end());
      std::sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
        double sa = cap_score(a.first, a.second);
        double sb = cap_score(b.first, b.second);
        if (sa != sb) return sa > sb;
        return form_less(a.first, b.first, table);
      });
      ordered.resize(static_cast<std::size_t>(config.cap));
      next = std::map<PhonemeSeq, double>(ordered.begin(), ordered.end());
    }
    for (const auto& [form, weight] : next) {
      auto it = pool.find(form);
      if (it == pool.end() || weight > it->second) pool[form] = weight;
    }
    frontier = std::move(next);
  }

  std::vector<Candidate> out;
  out.reserve(pool.size());
  for (const auto& [form, weight] : pool) {
    Candidate c;
    c.form = form;
    c.cumulative_cost = candidate.cumulative_cost;
    c.provenance = {ProvenanceKind::Pathway, language};
    c.score_components["pathway"] =
        pathway_score(form, inventory.proto_language, inventory, config, table);
    c.score_components["log_weight"] = weight;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) {
    double sa = a.score_components.at("pathway") +
                (config.weight_in_capping ? a.score_components.at("log_weight") : 0.0);
    double sb = b.score_components.at("pathway") +
                (config.weight_in_capping ? b.score_components.at("log_weight") : 0.0);
    if (sa != sb) return sa > sb;
    return form_less(a.form, b.form, table);
  });
  return out;
}

std::map<std::string, std::vector<Candidate>> top_pathways(
    const std::vector<Candidate>& candidates, const RuleInventory& inventory,
    const PathwayConfig& config, const FeatureTable& table) {
  if (candidates.empty()) throw Error("top_pathways requires Phase I candidates");
  std::map<std::string, std::vector<Candidate>> out;
  for (const std::string& language : inventory.languages) {
    std::map<PhonemeSeq, Candidate> merged;
    for (const Candidate& candidate : candidates) {
      for (Candidate& pathway : reverse_transform(candidate, language, inventory, config, table)) {
        auto it = merged.find(pathway.form);
        if (it == merged.end() ||
            pathway.score_components.at("log_weight") > it->second.score_components.at("log_weight"))
          merged[pathway.form] = std::move(pathway);
      }
    }
    std::vector<Candidate> ranked;
    ranked.reserve(merged.size());
    for (auto& [form, c] : merged) {
      (void)form;
      ranked.push_back(std::move(c));
    }
    std::sort(ranked.begin(), ranked.end(), [&](const Candidate& a, const Candidate& b) {
      double sa = a.score_components.at("pathway") +
                  (config.weight_in_capping ? a.score_components.at("log_weight") : 0.0);
      double sb = b.score_components.at("pathway") +
                  (config.weight_in_capping ? b.score_components.at("log_weight") : 0.0);
      if (sa != sb) return sa > sb;
      return form_less(a.form, b.form, table);
    });
    if (ranked.size() > static_cast<std::size_t>(config.top_k))
      ranked.resize(static_cast<std::size_t>(config.top_k));
    out[language] = std::move(ranked);
  }
  return out;
}

Dataset synthesize_dataset(const std::vector<PhonemeSeq>& protoforms,
                           const RuleInventory& inventory,
                           const std::vector<std::string>& languages, double noise,
                           std::uint64_t seed, const FeatureTable& table,
                           const std::string& gold_column) {
  Dataset dataset;
  dataset.languages = languages;
  dataset.gold_column = gold_column;
  dataset.columns.push_back(gold_column);
  for (const auto& lang : languages) dataset.columns.push_back(lang);

  for (std::size_t i = 0; i < protoforms.size(); ++i) {
    CognateSet set;
    set.id = static_cast<int>(i);
    set.gold = protoforms[i];
    set.reflexes.assign(languages.size(), std::nullopt);
    for (std::size_t l = 0; l < languages.size(); ++l) {
      PhonemeSeq reflex = forward_apply(protoforms[i], languages[l], inventory);
      if (noise > 0.0) {
        std::mt19937_64 rng(mix_seed(seed, i, l));
        if (rand_unit(rng) < noise) {
          std::size_t op = rand_index(rng, 3);
          if (reflex.empty()) op = 1;  // only insertion applies
          PhonemeId random_ph = static_cast<PhonemeId>(rand_index(rng, table.size()));
          if (op == 0) {  // substitute
            reflex[rand_index(rng, reflex.size())] = random_ph;
          } else if (op == 1) {  // insert
            reflex.insert(reflex.begin() + static_cast<std::ptrdiff_t>(
                                               rand_index(rng, reflex.size() + 1)),
                          random_ph);
          } else {  // delete
            reflex.erase(reflex.begin() +
                         static_cast<std::ptrdiff_t>(rand_index(rng, reflex.size())));
          }
        }
      }
      // A reflex reduced to nothing is recorded as missing data.
      if (reflex.empty())
        set.reflexes[l] = std::nullopt;
      else
        set.reflexes[l] = std::move(reflex);
    }
    if (set.present_count() == 0) continue;  // degenerate set, drop it
    dataset.sets.push_back(std::move(set));
  }
  // Re-number after any drops so ids stay dense.
  for (std::size_t i = 0; i < dataset.sets.size(); ++i)
    dataset.sets[i].id = static_cast<int>(i);
  return dataset;
}

}  // namespace protorec
