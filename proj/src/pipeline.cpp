#include "protorec/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "protorec/distance.hpp"
#include "protorec/errors.hpp"
#include "protorec/rng.hpp"

namespace protorec {

using nlohmann::json;

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::RankedProbEvo: return "ranked-prob-evo";
    case Variant::RankedProbEvoExt: return "ranked-prob-evo-ext";
    case Variant::RankedPathProb: return "ranked-path-prob";
    case Variant::MRanked: return "m-ranked";
    case Variant::MUnranked: return "m-unranked";
  }
  return "ranked-prob-evo";
}

Variant variant_from_name(const std::string& name) {
  if (name == "ranked-prob-evo") return Variant::RankedProbEvo;
  if (name == "ranked-prob-evo-ext") return Variant::RankedProbEvoExt;
  if (name == "ranked-path-prob") return Variant::RankedPathProb;
  if (name == "m-ranked") return Variant::MRanked;
  if (name == "m-unranked") return Variant::MUnranked;
  throw ConfigError("unknown variant '" + name + "'");
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

json config_json_object(const PipelineConfig& c) {
  json j;
  j["variant"] = variant_name(c.variant);
  j["languages"] = c.languages;
  j["gold_column"] = c.gold_column;
  j["pre_aligned"] = c.pre_aligned;
  j["absent_as_gap_rows"] = c.absent_as_gap_rows;
  j["phylogeny"] = c.phylogeny;
  j["phylo_depth_weights"] = c.phylo_depth_weights;
  j["ext_all_languages"] = c.ext_all_languages;
  j["beam"] = {{"beam_width", c.beam.beam_width},
               {"candidate_cap", c.beam.candidate_cap},
               {"rerank_top", c.beam.rerank_top},
               {"max_iterations", c.beam.max_iterations}};
  j["ranker"] = {{"h", c.ranker.h},
                 {"b", c.ranker.b},
                 {"lambda", c.ranker.lambda},
                 {"mu", c.ranker.mu},
                 {"sim_threshold", c.ranker.sim_threshold},
                 {"count_tokens", c.ranker.count_tokens},
                 {"len_mismatch_rate", c.ranker.len_mismatch_rate},
                 {"len_mismatch_slack", c.ranker.len_mismatch_slack},
                 {"short_form_penalty", c.ranker.short_form_penalty},
                 {"long_form_rate", c.ranker.long_form_rate},
                 {"long_form_baseline", c.ranker.long_form_baseline},
                 {"no_vowel_penalty", c.ranker.no_vowel_penalty},
                 {"invalid_seq_penalty", c.ranker.invalid_seq_penalty},
                 {"cluster_penalty", c.ranker.cluster_penalty},
                 {"cluster_run_limit", c.ranker.cluster_run_limit},
                 {"rerank_top", c.ranker.rerank_top}};
  j["pathway"] = {{"depth", c.pathway.depth},
                  {"cap", c.pathway.cap},
                  {"top_k", c.pathway.top_k},
                  {"alpha", c.pathway.alpha},
                  {"weight_in_capping", c.pathway.weight_in_capping},
                  {"default_cue_bonus", c.pathway.default_cue_bonus},
                  {"cluster_penalty", c.pathway.cluster_penalty},
                  {"cluster_min_run", c.pathway.cluster_min_run},
                  {"no_vowel_penalty", c.pathway.no_vowel_penalty},
                  {"illicit_penalty", c.pathway.illicit_penalty}};
  j["evo"] = {{"max_rounds", c.evo.max_rounds},
              {"pool_size", c.evo.pool_size},
              {"short_len_mult", c.evo.short_len_mult},
              {"long_len_mult", c.evo.long_len_mult},
              {"theta_div", c.evo.theta_div},
              {"patience", c.evo.patience},
              {"alpha_morph", c.evo.alpha_morph},
              {"beta_phono", c.evo.beta_phono},
              {"eps_floor", c.evo.eps_floor},
              {"elitism", c.evo.elitism},
              {"vowel_mutation_deletes", c.evo.vowel_mutation_deletes},
              {"morph_append_prob", c.evo.morph_append_prob}};
  j["eval"] = {{"n_edit_prose", c.eval.n_edit_prose}, {"mcer_prose", c.eval.mcer_prose}};
  j["paths"] = {{"features", c.features_path},
                {"dataset", c.dataset_path},
                {"rules", c.rules_path},
                {"cues", c.cues_path},
                {"constraints", c.constraints_path}};
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["report_format"] = c.report_format;
  return j;
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string config_to_json(const PipelineConfig& config) {
  return config_json_object(config).dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  PipelineConfig c;
  try {
    if (j.contains("variant")) c.variant = variant_from_name(j.at("variant").get<std::string>());
    get_if_present(j, "languages", c.languages);
    get_if_present(j, "gold_column", c.gold_column);
    get_if_present(j, "pre_aligned", c.pre_aligned);
    get_if_present(j, "absent_as_gap_rows", c.absent_as_gap_rows);
    get_if_present(j, "phylogeny", c.phylogeny);
    get_if_present(j, "phylo_depth_weights", c.phylo_depth_weights);
    get_if_present(j, "ext_all_languages", c.ext_all_languages);
    if (j.contains("beam")) {
      const json& b = j.at("beam");
      get_if_present(b, "beam_width", c.beam.beam_width);
      get_if_present(b, "candidate_cap", c.beam.candidate_cap);
      get_if_present(b, "rerank_top", c.beam.rerank_top);
      get_if_present(b, "max_iterations", c.beam.max_iterations);
    }
    if (j.contains("ranker")) {
      const json& r = j.at("ranker");
      get_if_present(r, "h", c.ranker.h);
      get_if_present(r, "b", c.ranker.b);
      get_if_present(r, "lambda", c.ranker.lambda);
      get_if_present(r, "mu", c.ranker.mu);
      get_if_present(r, "sim_threshold", c.ranker.sim_threshold);
      get_if_present(r, "count_tokens", c.ranker.count_tokens);
      get_if_present(r, "len_mismatch_rate", c.ranker.len_mismatch_rate);
      get_if_present(r, "len_mismatch_slack", c.ranker.len_mismatch_slack);
      get_if_present(r, "short_form_penalty", c.ranker.short_form_penalty);
      get_if_present(r, "long_form_rate", c.ranker.long_form_rate);
      get_if_present(r, "long_form_baseline", c.ranker.long_form_baseline);
      get_if_present(r, "no_vowel_penalty", c.ranker.no_vowel_penalty);
      get_if_present(r, "invalid_seq_penalty", c.ranker.invalid_seq_penalty);
      get_if_present(r, "cluster_penalty", c.ranker.cluster_penalty);
      get_if_present(r, "cluster_run_limit", c.ranker.cluster_run_limit);
      get_if_present(r, "rerank_top", c.ranker.rerank_top);
    }
    if (j.contains("pathway")) {
      const json& p = j.at("pathway");
      get_if_present(p, "depth", c.pathway.depth);
      get_if_present(p, "cap", c.pathway.cap);
      get_if_present(p, "top_k", c.pathway.top_k);
      get_if_present(p, "alpha", c.pathway.alpha);
      get_if_present(p, "weight_in_capping", c.pathway.weight_in_capping);
      get_if_present(p, "default_cue_bonus", c.pathway.default_cue_bonus);
      get_if_present(p, "cluster_penalty", c.pathway.cluster_penalty);
      get_if_present(p, "cluster_min_run", c.pathway.cluster_min_run);
      get_if_present(p, "no_vowel_penalty", c.pathway.no_vowel_penalty);
      get_if_present(p, "illicit_penalty", c.pathway.illicit_penalty);
    }
    if (j.contains("evo")) {
      const json& e = j.at("evo");
      get_if_present(e, "max_rounds", c.evo.max_rounds);
      get_if_present(e, "pool_size", c.evo.pool_size);
      get_if_present(e, "short_len_mult", c.evo.short_len_mult);
      get_if_present(e, "long_len_mult", c.evo.long_len_mult);
      get_if_present(e, "theta_div", c.evo.theta_div);
      get_if_present(e, "patience", c.evo.patience);
      get_if_present(e, "alpha_morph", c.evo.alpha_morph);
      get_if_present(e, "beta_phono", c.evo.beta_phono);
      get_if_present(e, "eps_floor", c.evo.eps_floor);
      get_if_present(e, "elitism", c.evo.elitism);
      get_if_present(e, "vowel_mutation_deletes", c.evo.vowel_mutation_deletes);
      get_if_present(e, "morph_append_prob", c.evo.morph_append_prob);
    }
    if (j.contains("eval")) {
      const json& e = j.at("eval");
      get_if_present(e, "n_edit_prose", c.eval.n_edit_prose);
      get_if_present(e, "mcer_prose", c.eval.mcer_prose);
    }
    if (j.contains("paths")) {
      const json& p = j.at("paths");
      get_if_present(p, "features", c.features_path);
      get_if_present(p, "dataset", c.dataset_path);
      get_if_present(p, "rules", c.rules_path);
      get_if_present(p, "cues", c.cues_path);
      get_if_present(p, "constraints", c.constraints_path);
    }
    get_if_present(j, "seed", c.seed);
    get_if_present(j, "jobs", c.jobs);
    get_if_present(j, "report_format", c.report_format);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return c;
}

PipelineConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

namespace {

void validate_config(const PipelineConfig& c) {
  if (c.languages.empty()) throw ConfigError("no languages configured");
  if (c.beam.beam_width < 1 || c.beam.candidate_cap < 1 || c.beam.rerank_top < 1 ||
      c.beam.max_iterations < 1)
    throw ConfigError("beam parameters must be strictly positive");
  if (c.beam.rerank_top > c.beam.candidate_cap)
    throw ConfigError("rerank_top must not exceed candidate_cap");
  if (c.ranker.b <= 1.0) throw ConfigError("ranker base b must exceed 1");
  if (c.ranker.h <= 0.0) throw ConfigError("ranker homotopy h must be positive");
  if (c.ranker.lambda < 0.0 || c.ranker.mu < 0.0)
    throw ConfigError("ranker weights must be non-negative");
  if (c.pathway.depth < 0 || c.pathway.top_k < 1) throw ConfigError("bad pathway parameters");
  if (c.evo.max_rounds < 1 || c.evo.pool_size < 1) throw ConfigError("bad evolution parameters");
  if (c.evo.theta_div < 0.0 || c.evo.theta_div > 1.0)
    throw ConfigError("theta_div must lie in [0,1]");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (c.report_format != "tsv" && c.report_format != "summary" && c.report_format != "both")
    throw ConfigError("report_format must be tsv, summary, or both");
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

PipelineContext load_pipeline_context(const PipelineConfig& config) {
  validate_config(config);
  if (config.features_path.empty()) throw ConfigError("a feature table path is required");
  PipelineContext ctx{config, FeatureTable::load_file(config.features_path), {}, {}};

  ctx.inventory.languages = config.languages;
  ctx.inventory.proto_language = config.gold_column.empty() ? "latin" : config.gold_column;
  if (!config.rules_path.empty()) ctx.inventory.load_rules_file(config.rules_path, ctx.table);
  if (!config.cues_path.empty())
    ctx.inventory.load_cues_file(config.cues_path, ctx.table, config.pathway.default_cue_bonus);
  if (!config.constraints_path.empty())
    ctx.inventory.constraints = PhonotacticConstraints::load_file(config.constraints_path, ctx.table);
  ctx.inventory.set_phylogeny(config.phylogeny, config.phylo_depth_weights);

  if (!config.dataset_path.empty()) {
    ParseOptions opts;
    opts.gold_column = config.gold_column;
    opts.pre_aligned = config.pre_aligned;
    ctx.dataset = parse_dataset_file(config.dataset_path, ctx.table, config.languages, opts);
  }
  return ctx;
}

SetResult reconstruct_set(const CognateSet& set, const PipelineContext& context,
                          EvoTrace* trace_out) {
  const PipelineConfig& cfg = context.config;
  SetResult result;
  result.id = set.id;
  try {
    if (set.reflexes.size() != context.inventory.languages.size())
      throw DataError("cognate set " + std::to_string(set.id) +
                      " carries " + std::to_string(set.reflexes.size()) + " reflex slots for " +
                      std::to_string(context.inventory.languages.size()) + " languages");
    PadOptions pad_opts;
    pad_opts.absent_as_gap_rows = cfg.absent_as_gap_rows;
    AlignmentMatrix matrix = pad_align(set, pad_opts);
    std::vector<Candidate> parsimony = beam_reconstruct(matrix, cfg.beam, context.table);
    if (parsimony.empty()) throw Error("parsimony search produced no candidates");

    if (cfg.variant == Variant::MUnranked) {
      result.prediction = parsimony.front().form;
      result.components["cost"] = parsimony.front().cumulative_cost;
      result.ok = true;
      return result;
    }

    std::vector<PhonemeSeq> reflexes;
    for (std::size_t l : set.present_indices()) reflexes.push_back(*set.reflexes[l]);

    std::vector<Candidate> ranked =
        rank_candidates(parsimony, reflexes, cfg.ranker, context.inventory.constraints,
                        context.table);
    if (cfg.variant == Variant::MRanked) {
      result.prediction = ranked.front().form;
      result.components = ranked.front().score_components;
      result.ok = true;
      return result;
    }

    auto pathway_map = top_pathways(ranked, context.inventory, cfg.pathway, context.table);
    std::vector<Candidate> pathway_seeds;
    for (const std::string& language : context.inventory.languages)
      for (const Candidate& c : pathway_map[language]) pathway_seeds.push_back(c);

    if (cfg.variant == Variant::RankedProbEvoExt) {
      // Additional seeds: reverse transforms of each present reflex, by
      // default through its own language's rules.
      for (std::size_t l : set.present_indices()) {
        const std::string& reflex_language = context.inventory.languages[l];
        Candidate reflex_candidate;
        reflex_candidate.form = *set.reflexes[l];
        reflex_candidate.provenance = {ProvenanceKind::Pathway, reflex_language};
        std::vector<std::string> apply_languages =
            cfg.ext_all_languages ? context.inventory.languages
                                  : std::vector<std::string>{reflex_language};
        for (const std::string& language : apply_languages) {
          auto pool = reverse_transform(reflex_candidate, language, context.inventory,
                                        cfg.pathway, context.table);
          std::size_t keep = std::min<std::size_t>(pool.size(),
                                                   static_cast<std::size_t>(cfg.pathway.top_k));
          for (std::size_t i = 0; i < keep; ++i) pathway_seeds.push_back(pool[i]);
        }
      }
    }

    std::vector<Candidate> seeds;
    if (cfg.variant == Variant::RankedPathProb) {
      seeds = pathway_seeds;
    } else {
      seeds = ranked;
      seeds.insert(seeds.end(), pathway_seeds.begin(), pathway_seeds.end());
    }

    EvoConfig evo_cfg = cfg.evo;
    evo_cfg.pathway = cfg.pathway;
    evo_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(set.id));
    auto [best, trace] = evolve(set, seeds, context.inventory, evo_cfg, context.table);
    if (trace_out) *trace_out = std::move(trace);
    result.prediction = best.form;
    result.components = best.score_components;
    result.ok = true;
    return result;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
    return result;
  }
}

namespace {

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string predictions_tsv(const PipelineContext& ctx, const std::vector<SetResult>& results) {
  std::ostringstream out;
  out << "id\tstatus\tgold\tprediction\tc_acc\tedit_dist\tfeat_dist\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const SetResult& r = results[i];
    const CognateSet& set = ctx.dataset.sets[i];
    out << r.id << '\t' << (r.ok ? "ok" : "failed") << '\t';
    out << (set.gold ? ctx.table.detokenize(*set.gold) : "-") << '\t';
    if (!r.ok) {
      out << "-\t-\t-\t-\n";
      continue;
    }
    out << ctx.table.detokenize(r.prediction) << '\t';
    if (set.gold && !set.gold->empty()) {
      out << fmt4(char_accuracy(r.prediction, *set.gold, ctx.table)) << '\t'
          << levenshtein(r.prediction, *set.gold) << '\t'
          << fmt4(feature_distance(r.prediction, *set.gold, ctx.table)) << '\n';
    } else {
      out << "-\t-\t-\n";
    }
  }
  return out.str();
}

}  // namespace

std::string trace_to_jsonl(const EvoTrace& trace) {
  std::ostringstream out;
  for (const EvoRoundRecord& record : trace.rounds) {
    json j;
    j["round"] = record.round;
    j["pool"] = record.pool;
    j["fitness"] = record.fitness;
    j["diversity"] = record.diversity;
    j["eliminated"] = record.eliminated;
    json injected = json::array();
    for (const auto& [form, op] : record.injected)
      injected.push_back({{"form", form}, {"operator", op}});
    j["injected"] = injected;
    if (record.round == trace.rounds.back().round) j["termination"] = termination_name(trace.reason);
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string RunManifest::to_json() const {
  json j;
  j["config"] = json::parse(config_json);
  json inputs = json::object();
  for (const auto& [path, digest] : input_digests) inputs[path] = digest;
  j["inputs"] = inputs;
  j["determinism_key"] = determinism_key;
  j["predictions_digest"] = predictions_digest;
  j["timing"] = {{"wall_seconds", wall_seconds}};
  j["n_sets"] = n_sets;
  j["n_failed"] = n_failed;
  if (has_report) {
    j["report"] = {{"c_acc", report.c_acc},
                   {"cer", report.cer},
                   {"ver", report.ver},
                   {"edit_dist", report.edit_dist},
                   {"feat_dist", report.feat_dist},
                   {"mcer", report.mcer},
                   {"n_edit_dist", report.n_edit_dist},
                   {"fer", report.fer},
                   {"pvr", report.pvr},
                   {"n", report.n},
                   {"skipped", report.skipped}};
  }
  return j.dump(2) + "\n";
}

RunManifest run_pipeline(const PipelineConfig& config) {
  auto started = std::chrono::steady_clock::now();
  PipelineContext ctx = load_pipeline_context(config);
  if (config.dataset_path.empty()) throw ConfigError("a dataset path is required");

  RunManifest manifest;
  manifest.config_json = config_to_json(config);
  for (const std::string& path :
       {config.features_path, config.dataset_path, config.rules_path, config.cues_path,
        config.constraints_path})
    if (!path.empty()) manifest.input_digests[path] = fnv1a64_hex(read_file_bytes(path));
  {
    std::string key_material = manifest.config_json;
    for (const auto& [path, digest] : manifest.input_digests)
      key_material += path + "=" + digest + ";";
    manifest.determinism_key = fnv1a64_hex(key_material);
  }

  const std::size_t n = ctx.dataset.sets.size();
  std::vector<SetResult> results(n);
  std::vector<EvoTrace> traces(config.write_trace ? n : 0);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      results[i] = reconstruct_set(ctx.dataset.sets[i], ctx,
                                   config.write_trace ? &traces[i] : nullptr);
    }
  };
  if (config.jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 1; t < config.jobs; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
  }

  manifest.n_sets = n;
  for (const SetResult& r : results)
    if (!r.ok) ++manifest.n_failed;

  // Evaluate against gold where present; failed sets are skipped.
  std::vector<PhonemeSeq> predictions;
  std::vector<std::optional<PhonemeSeq>> golds;
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i].ok) continue;
    predictions.push_back(results[i].prediction);
    golds.push_back(ctx.dataset.sets[i].gold);
  }
  if (!predictions.empty() && !ctx.dataset.gold_column.empty()) {
    manifest.report =
        evaluate(predictions, golds, ctx.table, ctx.inventory.constraints, config.eval);
    manifest.has_report = manifest.report.n > 0;
  }

  std::string predictions_text = predictions_tsv(ctx, results);
  manifest.predictions_digest = fnv1a64_hex(predictions_text);
  manifest.results = std::move(results);

  auto finished = std::chrono::steady_clock::now();
  manifest.wall_seconds = std::chrono::duration<double>(finished - started).count();

  if (!config.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    std::ofstream(fs::path(config.out_dir) / "predictions.tsv") << predictions_text;
    if (manifest.has_report) {
      if (config.report_format == "tsv" || config.report_format == "both")
        std::ofstream(fs::path(config.out_dir) / "report.tsv")
            << format_report_tsv(manifest.report);
      if (config.report_format == "summary" || config.report_format == "both")
        std::ofstream(fs::path(config.out_dir) / "report.txt")
            << format_report_summary(manifest.report);
    }
    std::ofstream(fs::path(config.out_dir) / "manifest.json") << manifest.to_json();
    if (config.write_trace) {
      fs::create_directories(fs::path(config.out_dir) / "traces");
      for (std::size_t i = 0; i < traces.size(); ++i) {
        if (!manifest.results[i].ok) continue;
        if (traces[i].rounds.empty()) continue;  // variants without Phase III
        std::ofstream(fs::path(config.out_dir) / "traces" /
                      ("set_" + std::to_string(manifest.results[i].id) + ".jsonl"))
            << trace_to_jsonl(traces[i]);
      }
    }
  }
  return manifest;
}

std::vector<SweepPoint> run_rule_sweep(const PipelineConfig& config,
                                       const std::vector<std::string>& rule_files, bool per_rule) {
  if (rule_files.empty()) throw ConfigError("rule sweep needs at least one rule file");

  namespace fs = std::filesystem;
  fs::path scratch =
      fs::temp_directory_path() / ("protorec_sweep_" + std::to_string(mix_seed(config.seed, 1)));
  fs::create_directories(scratch);

  // Build the cumulative prefixes as temporary rule files.
  std::vector<std::pair<int, std::string>> stages;  // rules-used, path
  if (per_rule) {
    std::vector<std::string> lines;
    for (const std::string& file : rule_files) {
      std::ifstream in(file);
      if (!in) throw ConfigError("cannot open rule file: " + file);
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
      }
    }
    for (std::size_t k = 1; k <= lines.size(); ++k) {
      fs::path p = scratch / ("rules_" + std::to_string(k) + ".tsv");
      std::ofstream out(p);
      for (std::size_t i = 0; i < k; ++i) out << lines[i] << '\n';
      stages.emplace_back(static_cast<int>(k), p.string());
    }
  } else {
    std::string accumulated;
    for (std::size_t k = 0; k < rule_files.size(); ++k) {
      accumulated += read_file_bytes(rule_files[k]);
      if (!accumulated.empty() && accumulated.back() != '\n') accumulated += '\n';
      fs::path p = scratch / ("rules_files_" + std::to_string(k + 1) + ".tsv");
      std::ofstream(p) << accumulated;
      stages.emplace_back(static_cast<int>(k + 1), p.string());
    }
  }

  std::vector<SweepPoint> points;
  for (const auto& [rules_used, path] : stages) {
    PipelineConfig stage_config = config;
    stage_config.rules_path = path;
    stage_config.out_dir.clear();  // per-stage artifacts are not persisted
    RunManifest manifest = run_pipeline(stage_config);
    SweepPoint point;
    point.rules_used = rules_used;
    point.report = manifest.report;
    points.push_back(point);
  }
  return points;
}

std::string format_sweep_tsv(const std::vector<SweepPoint>& points, bool normalized) {
  auto value = [](const EvalReport& r, int metric) {
    switch (metric) {
      case 0: return r.c_acc;
      case 1: return r.cer;
      case 2: return r.ver;
      case 3: return r.edit_dist;
      default: return r.feat_dist;
    }
  };
  static const char* names[] = {"c_acc", "cer", "ver", "edit_dist", "feat_dist"};

  std::ostringstream out;
  out << "rules";
  for (const char* name : names) out << '\t' << name;
  out << '\n';
  for (const SweepPoint& point : points) {
    out << point.rules_used;
    for (int metric = 0; metric < 5; ++metric) {
      double v = value(point.report, metric);
      if (normalized) {
        double lo = v, hi = v;
        for (const SweepPoint& q : points) {
          lo = std::min(lo, value(q.report, metric));
          hi = std::max(hi, value(q.report, metric));
        }
        v = hi > lo ? (v - lo) / (hi - lo) : 0.0;
      }
      out << '\t' << fmt4(v);
    }
    out << '\n';
  }
  return out.str();
}

RunManifest run_synthetic(const PipelineConfig& config, const SynthParams& params) {
  PipelineConfig synth_config = config;
  synth_config.dataset_path.clear();
  PipelineContext ctx = load_pipeline_context(synth_config);

  std::ifstream in(params.protoforms_path);
  if (!in) throw ConfigError("cannot open protoform lexicon: " + params.protoforms_path);
  std::vector<PhonemeSeq> protoforms;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      protoforms.push_back(ctx.table.tokenize(preprocess(line)));
    } catch (const UnknownSymbolError& e) {
      throw MalformedRecordError(line_no, e.what());
    }
  }
  if (protoforms.empty()) throw DataError("protoform lexicon is empty");

  Dataset corpus = synthesize_dataset(protoforms, ctx.inventory, config.languages, params.noise,
                                      config.seed, ctx.table,
                                      config.gold_column.empty() ? "latin" : config.gold_column);

  namespace fs = std::filesystem;
  fs::path corpus_path;
  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    corpus_path = fs::path(config.out_dir) / "synthetic_corpus.tsv";
  } else {
    corpus_path = fs::temp_directory_path() /
                  ("protorec_synth_" + std::to_string(mix_seed(config.seed, 2)) + ".tsv");
  }
  {
    std::ofstream out(corpus_path);
    serialize_dataset(corpus, ctx.table, out);
  }

  PipelineConfig run_config = config;
  run_config.dataset_path = corpus_path.string();
  return run_pipeline(run_config);
}

}  // namespace protorec
