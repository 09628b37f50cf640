#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "protorec/dataset.hpp"
#include "protorec/evolve.hpp"
#include "protorec/metrics.hpp"
#include "protorec/parsimony.hpp"
#include "protorec/ranker.hpp"
#include "protorec/rules.hpp"

namespace protorec {

enum class Variant { RankedProbEvo, RankedProbEvoExt, RankedPathProb, MRanked, MUnranked };
const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct PipelineConfig {
  Variant variant = Variant::RankedProbEvo;
  std::vector<std::string> languages = {"romanian", "french", "italian", "spanish", "portuguese"};
  std::string gold_column = "latin";
  bool pre_aligned = false;
  bool absent_as_gap_rows = false;
  std::string phylogeny = "((french,spanish),portuguese,italian,romanian)";
  bool phylo_depth_weights = false;
  // Ext mode reverse-transforms each reflex with its own language's rules;
  // this widens it to every language's rules.
  bool ext_all_languages = false;

  BeamConfig beam;
  RankerConfig ranker;
  PathwayConfig pathway;
  EvoConfig evo;
  EvalConfig eval;

  std::string features_path;
  std::string dataset_path;
  std::string rules_path;       // optional
  std::string cues_path;        // optional
  std::string constraints_path; // optional

  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir;  // empty: nothing written to disk
  bool write_trace = false;
  std::string report_format = "both";  // tsv | summary | both
};

/// JSON round-trip for the config; the manifest embeds the snapshot and the
/// CLI accepts it via --config.
std::string config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const std::string& json_text);
PipelineConfig config_from_json_file(const std::string& path);

struct SetResult {
  int id = 0;
  bool ok = false;
  std::string error;
  PhonemeSeq prediction;
  std::map<std::string, double> components;
};

struct RunManifest {
  std::string config_json;
  std::map<std::string, std::string> input_digests;  // path -> fnv1a64 hex
  // Digest of (config snapshot, input digests); equal keys imply bit-equal
  // prediction output.
  std::string determinism_key;
  std::string predictions_digest;
  double wall_seconds = 0.0;
  std::size_t n_sets = 0;
  std::size_t n_failed = 0;
  bool has_report = false;
  EvalReport report;
  std::vector<SetResult> results;

  std::string to_json() const;
};

// Everything loaded once per run and shared read-only by the workers.
struct PipelineContext {
  PipelineConfig config;
  FeatureTable table;
  RuleInventory inventory;
  Dataset dataset;
};

PipelineContext load_pipeline_context(const PipelineConfig& config);

/// Run one cognate set through the configured variant. Pure given the
/// context; the per-set RNG is keyed by (seed, set id).
SetResult reconstruct_set(const CognateSet& set, const PipelineContext& context,
                          EvoTrace* trace_out = nullptr);

/// Full run: load, reconstruct every set (data-parallel, id-ordered output),
/// evaluate when gold is available, and write predictions/report/manifest
/// under out_dir when set.
RunManifest run_pipeline(const PipelineConfig& config);

/// Figure-3-style experiment: run the pipeline once per prefix of the rule
/// list and report the metric trajectory. With per_rule, prefixes are taken
/// over individual rules of the concatenated files instead of whole files.
struct SweepPoint {
  int rules_used = 0;
  EvalReport report;
};
std::vector<SweepPoint> run_rule_sweep(const PipelineConfig& config,
                                       const std::vector<std::string>& rule_files, bool per_rule);
std::string format_sweep_tsv(const std::vector<SweepPoint>& points, bool normalized);

struct SynthParams {
  std::string protoforms_path;
  double noise = 0.0;
};
/// synthesize -> reconstruct -> evaluate in one pass; the synthesized corpus
/// is written next to the other outputs.
RunManifest run_synthetic(const PipelineConfig& config, const SynthParams& params);

std::string fnv1a64_hex(const std::string& bytes);

std::string trace_to_jsonl(const EvoTrace& trace);

}  // namespace protorec
