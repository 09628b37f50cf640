#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "protorec/phoneme.hpp"

namespace protorec {

struct CognateSet {
  int id = 0;
  std::optional<PhonemeSeq> gold;  // ancestral target when the corpus has one
  // Parallel to the configured language list; nullopt marks a missing reflex.
  std::vector<std::optional<PhonemeSeq>> reflexes;

  std::size_t present_count() const;
  std::vector<std::size_t> present_indices() const;
};

// Gap-padded reflex rows of equal width. Absent reflexes contribute no row.
struct AlignmentMatrix {
  std::vector<PhonemeSeq> rows;
  std::vector<std::size_t> row_language;  // index into the language list
  std::size_t width = 0;
};

struct ParseOptions {
  std::string gold_column = "latin";
  // Accept gap characters embedded in cells (externally pre-aligned corpora).
  bool pre_aligned = false;
};

struct Dataset {
  std::vector<std::string> columns;    // file header order, for round-trips
  std::vector<std::string> languages;  // configured order, reflex indexing
  std::string gold_column;             // empty when the corpus has no gold
  std::vector<CognateSet> sets;
};

/// Strip vowel-length marks (":" and U+02D0). Idempotent.
std::string preprocess(const std::string& raw);

/// Parse a UTF-8 TSV cognate wordlist. The header row names one column per
/// configured language plus an optional gold column; "-" marks missing data.
Dataset parse_dataset(std::istream& in, const FeatureTable& table,
                      const std::vector<std::string>& languages,
                      const ParseOptions& options = {});
Dataset parse_dataset_file(const std::string& path, const FeatureTable& table,
                           const std::vector<std::string>& languages,
                           const ParseOptions& options = {});

void serialize_dataset(const Dataset& dataset, const FeatureTable& table, std::ostream& out);

struct PadOptions {
  // Sensitivity hook: keep absent reflexes as all-gap rows instead of
  // dropping them.
  bool absent_as_gap_rows = false;
};

/// Right-pad the present reflexes to a common width. Rows that already carry
/// gaps (pre-aligned input) keep them and are only padded at the end.
AlignmentMatrix pad_align(const CognateSet& set, const PadOptions& options = {});

}  // namespace protorec
