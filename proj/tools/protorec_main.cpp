#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "protorec/errors.hpp"
#include "protorec/pipeline.hpp"

using namespace protorec;

namespace {

// Exit codes: 0 ok, 1 config error, 2 data error, 3 partial failure.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

struct CommonArgs {
  std::string config_path;
  std::string variant = "ranked-prob-evo";
  std::string dataset, features, rules, cues, constraints;
  std::string languages_csv;
  std::string gold_column;
  std::string out_dir;
  std::string report_format;
  std::uint64_t seed = 0;
  int jobs = 0;
  bool trace = false;
  bool pre_aligned = false;

  // Per-module overrides; <0 / NaN means "not given".
  int beam_width = -1, candidate_cap = -1, rerank_top = -1, max_iterations = -1;
  int depth = -1, pathway_cap = -1, top_k = -1;
  double alpha = -1.0;
  int pool_size = -1, max_rounds = -1, patience = -1;
  double theta_div = -1.0, h = -1.0, base = -1.0, lambda = -1.0, mu = -1.0,
         sim_threshold = -2.0;
  bool ext_all_languages = false;
  bool phylo_depth_weights = false;
  bool mcer_prose = false, n_edit_prose = false;
};

void add_common_options(CLI::App* cmd, CommonArgs& args, bool needs_dataset) {
  cmd->add_option("--config", args.config_path, "JSON config file (flags override it)")
      ->envname("PROTOREC_CONFIG");
  cmd->add_option("--variant", args.variant,
                  "ranked-prob-evo | ranked-prob-evo-ext | ranked-path-prob | m-ranked | m-unranked")
      ->envname("PROTOREC_VARIANT");
  auto* dataset = cmd->add_option("--dataset", args.dataset, "cognate wordlist TSV")
                      ->envname("PROTOREC_DATASET");
  if (needs_dataset) dataset->required();
  cmd->add_option("--features", args.features, "phoneme feature table")
      ->envname("PROTOREC_FEATURES");
  cmd->add_option("--rules", args.rules, "sound-change rule file")->envname("PROTOREC_RULES");
  cmd->add_option("--cues", args.cues, "morphological cue file")->envname("PROTOREC_CUES");
  cmd->add_option("--constraints", args.constraints, "phonotactic constraints file")
      ->envname("PROTOREC_CONSTRAINTS");
  cmd->add_option("--languages", args.languages_csv, "comma-separated reflex language columns")
      ->envname("PROTOREC_LANGUAGES");
  cmd->add_option("--gold-column", args.gold_column, "name of the gold column (default latin)")
      ->envname("PROTOREC_GOLD_COLUMN");
  cmd->add_option("--seed", args.seed, "global RNG seed")->envname("PROTOREC_SEED");
  cmd->add_option("--jobs", args.jobs, "worker threads over cognate sets")
      ->envname("PROTOREC_JOBS");
  cmd->add_option("--out", args.out_dir, "output directory")->envname("PROTOREC_OUT");
  cmd->add_flag("--trace", args.trace, "write per-set evolution traces");
  cmd->add_flag("--pre-aligned", args.pre_aligned, "cells may carry embedded gap characters");
  cmd->add_option("--report-format", args.report_format, "tsv | summary | both")
      ->envname("PROTOREC_REPORT_FORMAT");

  cmd->add_option("--beam-width", args.beam_width, "parsimony beam width")
      ->envname("PROTOREC_BEAM_WIDTH");
  cmd->add_option("--candidate-cap", args.candidate_cap, "parsimony candidate pool cap");
  cmd->add_option("--rerank-top", args.rerank_top, "candidates kept after ranking");
  cmd->add_option("--max-iterations", args.max_iterations, "beam widening restarts");
  cmd->add_option("--depth", args.depth, "inverse rule application depth")
      ->envname("PROTOREC_DEPTH");
  cmd->add_option("--pathway-cap", args.pathway_cap, "pathways kept per depth level");
  cmd->add_option("--top-k", args.top_k, "pathways kept per language")->envname("PROTOREC_TOP_K");
  cmd->add_option("--alpha", args.alpha, "naturalness length penalty");
  cmd->add_option("--pool-size", args.pool_size, "evolution pool size")
      ->envname("PROTOREC_POOL_SIZE");
  cmd->add_option("--max-rounds", args.max_rounds, "evolution round cap")
      ->envname("PROTOREC_MAX_ROUNDS");
  cmd->add_option("--theta-div", args.theta_div, "diversity threshold for mutation")
      ->envname("PROTOREC_THETA_DIV");
  cmd->add_option("--patience", args.patience, "convergence patience in rounds");
  cmd->add_option("--homotopy", args.h, "homotopy parameter h");
  cmd->add_option("--base", args.base, "complexity base b");
  cmd->add_option("--lambda", args.lambda, "brevity weight");
  cmd->add_option("--mu", args.mu, "edit weight");
  cmd->add_option("--sim-threshold", args.sim_threshold, "ranking retention threshold");
  cmd->add_flag("--ext-all-languages", args.ext_all_languages,
                "Ext mode: reverse reflexes with every language's rules");
  cmd->add_flag("--phylo-depth-weights", args.phylo_depth_weights,
                "halve likelihood weights per phylogeny nesting level");
  cmd->add_flag("--mcer-prose", args.mcer_prose, "MCER as total errors / pair count");
  cmd->add_flag("--n-edit-prose", args.n_edit_prose, "N_EDIT_DIST as mean lev / pair count");
}

PipelineConfig build_config(const CommonArgs& args) {
  PipelineConfig config;
  if (!args.config_path.empty()) config = config_from_json_file(args.config_path);

  if (!args.variant.empty()) config.variant = variant_from_name(args.variant);
  if (!args.dataset.empty()) config.dataset_path = args.dataset;
  if (!args.features.empty()) config.features_path = args.features;
  if (!args.rules.empty()) config.rules_path = args.rules;
  if (!args.cues.empty()) config.cues_path = args.cues;
  if (!args.constraints.empty()) config.constraints_path = args.constraints;
  if (!args.languages_csv.empty()) {
    config.languages.clear();
    std::stringstream ss(args.languages_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) config.languages.push_back(item);
  }
  if (!args.gold_column.empty()) config.gold_column = args.gold_column;
  if (args.seed != 0) config.seed = args.seed;
  if (args.jobs > 0) config.jobs = args.jobs;
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  if (args.trace) config.write_trace = true;
  if (args.pre_aligned) config.pre_aligned = true;
  if (!args.report_format.empty()) config.report_format = args.report_format;

  if (args.beam_width > 0) config.beam.beam_width = args.beam_width;
  if (args.candidate_cap > 0) config.beam.candidate_cap = args.candidate_cap;
  if (args.rerank_top > 0) {
    config.beam.rerank_top = args.rerank_top;
    config.ranker.rerank_top = args.rerank_top;
  }
  if (args.max_iterations > 0) config.beam.max_iterations = args.max_iterations;
  if (args.depth >= 0) config.pathway.depth = args.depth;
  if (args.pathway_cap > 0) config.pathway.cap = args.pathway_cap;
  if (args.top_k > 0) config.pathway.top_k = args.top_k;
  if (args.alpha >= 0.0) config.pathway.alpha = args.alpha;
  if (args.pool_size > 0) config.evo.pool_size = args.pool_size;
  if (args.max_rounds > 0) config.evo.max_rounds = args.max_rounds;
  if (args.patience > 0) config.evo.patience = args.patience;
  if (args.theta_div >= 0.0) config.evo.theta_div = args.theta_div;
  if (args.h > 0.0) config.ranker.h = args.h;
  if (args.base > 1.0) config.ranker.b = args.base;
  if (args.lambda >= 0.0) config.ranker.lambda = args.lambda;
  if (args.mu >= 0.0) config.ranker.mu = args.mu;
  if (args.sim_threshold > -2.0) config.ranker.sim_threshold = args.sim_threshold;
  if (args.ext_all_languages) config.ext_all_languages = true;
  if (args.phylo_depth_weights) config.phylo_depth_weights = true;
  if (args.mcer_prose) config.eval.mcer_prose = true;
  if (args.n_edit_prose) config.eval.n_edit_prose = true;
  return config;
}

void print_report(const RunManifest& manifest, const PipelineConfig& config) {
  if (!manifest.has_report) return;
  if (config.report_format == "tsv" || config.report_format == "both")
    std::cout << format_report_tsv(manifest.report);
  if (config.report_format == "summary" || config.report_format == "both")
    std::cout << format_report_summary(manifest.report);
}

int finish(const RunManifest& manifest) {
  std::cerr << manifest.n_sets - manifest.n_failed << "/" << manifest.n_sets
            << " sets reconstructed";
  if (!manifest.predictions_digest.empty())
    std::cerr << " (predictions digest " << manifest.predictions_digest << ")";
  std::cerr << "\n";
  return manifest.n_failed > 0 ? kExitPartial : kExitOk;
}

int cmd_reconstruct(const CommonArgs& args) {
  PipelineConfig config = build_config(args);
  RunManifest manifest = run_pipeline(config);
  print_report(manifest, config);
  return finish(manifest);
}

int cmd_evaluate(const CommonArgs& args, const std::string& predictions_path) {
  PipelineConfig config = build_config(args);
  PipelineContext ctx = load_pipeline_context(config);

  std::ifstream in(predictions_path);
  if (!in) throw ConfigError("cannot open predictions file: " + predictions_path);
  std::map<int, PhonemeSeq> by_id;
  std::string line;
  std::size_t line_no = 0;
  int id_col = -1, pred_col = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) cells.push_back(cell);
    if (line_no == 1) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c] == "id") id_col = static_cast<int>(c);
        if (cells[c] == "prediction") pred_col = static_cast<int>(c);
      }
      if (id_col < 0 || pred_col < 0)
        throw MalformedRecordError(1, "predictions file needs 'id' and 'prediction' columns");
      continue;
    }
    if (static_cast<int>(cells.size()) <= std::max(id_col, pred_col))
      throw MalformedRecordError(line_no, "short row");
    const std::string& cell_text = cells[static_cast<std::size_t>(pred_col)];
    if (cell_text == "-") continue;  // failed or absent prediction
    by_id[std::stoi(cells[static_cast<std::size_t>(id_col)])] =
        ctx.table.tokenize(preprocess(cell_text));
  }

  std::vector<PhonemeSeq> predictions;
  std::vector<std::optional<PhonemeSeq>> golds;
  for (const CognateSet& set : ctx.dataset.sets) {
    auto it = by_id.find(set.id);
    if (it == by_id.end()) continue;
    predictions.push_back(it->second);
    golds.push_back(set.gold);
  }
  EvalReport report = evaluate(predictions, golds, ctx.table, ctx.inventory.constraints,
                               config.eval);
  if (config.report_format == "tsv" || config.report_format == "both")
    std::cout << format_report_tsv(report);
  if (config.report_format == "summary" || config.report_format == "both")
    std::cout << format_report_summary(report);
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::vector<std::string>& rule_files, bool per_rule) {
  PipelineConfig config = build_config(args);
  auto points = run_rule_sweep(config, rule_files, per_rule);
  std::cout << format_sweep_tsv(points, /*normalized=*/false);
  std::cout << "\n# min-max normalized\n";
  std::cout << format_sweep_tsv(points, /*normalized=*/true);
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    std::ofstream(std::filesystem::path(config.out_dir) / "sweep_reports.tsv")
        << format_sweep_tsv(points, false);
    std::ofstream(std::filesystem::path(config.out_dir) / "sweep_normalized.tsv")
        << format_sweep_tsv(points, true);
  }
  return kExitOk;
}

int cmd_synth(const CommonArgs& args, const std::string& protoforms, double noise) {
  PipelineConfig config = build_config(args);
  SynthParams params;
  params.protoforms_path = protoforms;
  params.noise = noise;
  RunManifest manifest = run_synthetic(config, params);
  print_report(manifest, config);
  return finish(manifest);
}

int cmd_inspect_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    std::cout << "round " << j.value("round", 0) << ": pool=" << j["pool"].size()
              << " diversity=" << j.value("diversity", 0.0);
    if (!j["pool"].empty())
      std::cout << " best=" << j["pool"][0].get<std::string>() << " ("
                << j["fitness"][0].get<double>() << ")";
    if (!j["eliminated"].empty()) {
      std::cout << " eliminated=[";
      for (std::size_t i = 0; i < j["eliminated"].size(); ++i)
        std::cout << (i ? " " : "") << j["eliminated"][i].get<std::string>();
      std::cout << "]";
    }
    if (!j["injected"].empty()) std::cout << " injected=" << j["injected"].size();
    if (j.contains("termination"))
      std::cout << " termination=" << j["termination"].get<std::string>();
    std::cout << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"protorec: protoform reconstruction from cognate wordlists"};
  app.require_subcommand(1);

  CommonArgs reconstruct_args, evaluate_args, sweep_args, synth_args;
  std::string predictions_path, protoforms_path, trace_path;
  std::vector<std::string> sweep_rule_files;
  bool sweep_per_rule = false;
  double synth_noise = 0.0;

  CLI::App* reconstruct = app.add_subcommand("reconstruct", "run the pipeline over a dataset");
  add_common_options(reconstruct, reconstruct_args, /*needs_dataset=*/false);

  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "score a predictions file against gold");
  add_common_options(evaluate_cmd, evaluate_args, /*needs_dataset=*/false);
  evaluate_cmd->add_option("--predictions", predictions_path, "predictions TSV")->required();

  CLI::App* sweep = app.add_subcommand("sweep-rules", "rerun per rule-file prefix");
  add_common_options(sweep, sweep_args, /*needs_dataset=*/false);
  sweep->add_option("--rule-file", sweep_rule_files, "ordered rule files (repeatable)")
      ->required();
  sweep->add_flag("--per-rule", sweep_per_rule, "sweep individual rules, not whole files");

  CLI::App* synth = app.add_subcommand("synth", "synthesize a corpus, reconstruct, evaluate");
  add_common_options(synth, synth_args, /*needs_dataset=*/false);
  synth->add_option("--protoforms", protoforms_path, "protoform lexicon, one form per line")
      ->required();
  synth->add_option("--noise", synth_noise, "per-reflex random edit probability");

  CLI::App* inspect = app.add_subcommand("inspect-trace", "summarize an evolution trace");
  inspect->add_option("--trace-file", trace_path, "trace JSONL file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (reconstruct->parsed()) return cmd_reconstruct(reconstruct_args);
    if (evaluate_cmd->parsed()) return cmd_evaluate(evaluate_args, predictions_path);
    if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_rule_files, sweep_per_rule);
    if (synth->parsed()) return cmd_synth(synth_args, protoforms_path, synth_noise);
    if (inspect->parsed()) return cmd_inspect_trace(trace_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
