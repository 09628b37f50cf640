#pragma once

#include <string>
#include <vector>

#include "protorec/phoneme.hpp"

namespace protorec {

// A banned subsequence, optionally anchored to a word edge. Written in the
// constraints file as e.g. "^ŋ" (word-initial) or "mk$" (word-final).
struct IllicitPattern {
  PhonemeSeq seq;
  bool anchor_start = false;
  bool anchor_end = false;
};

struct PhonotacticConstraints {
  int max_cluster = 3;        // longest permissible consonant run
  bool require_vowel = true;  // every well-formed word contains a vowel
  std::vector<IllicitPattern> illicit;

  static PhonotacticConstraints load_file(const std::string& path, const FeatureTable& table);
  static PhonotacticConstraints load(std::istream& in, const FeatureTable& table);
};

bool contains_vowel(const PhonemeSeq& seq, const FeatureTable& table);

/// Number of maximal consonant runs of length >= min_run. Gaps break runs.
int count_consonant_runs(const PhonemeSeq& seq, const FeatureTable& table, int min_run);

int count_illicit(const PhonemeSeq& seq, const PhonotacticConstraints& constraints);

/// True when the form breaks any constraint: an over-long consonant cluster,
/// an illicit sequence, or (when required) a missing vowel.
bool violates(const PhonemeSeq& seq, const PhonotacticConstraints& constraints,
              const FeatureTable& table);

}  // namespace protorec
