#pragma once

// Shared fixtures for the unit suites: the shipped data files plus small
// helpers for building sequences and brute-force oracles that stay
// independent of the library's DP implementations.

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "protorec/dataset.hpp"
#include "protorec/phoneme.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
  return std::string(PROTOREC_DATA_DIR) + "/" + name;
}

inline const protorec::FeatureTable& table() {
  static protorec::FeatureTable t =
      protorec::FeatureTable::load_file(data_path("features_latin_romance.tsv"));
  return t;
}

inline protorec::PhonemeSeq tok(const std::string& s) { return table().tokenize(s); }

inline std::string detok(const protorec::PhonemeSeq& s) { return table().detokenize(s); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Recursive edit-distance oracle straight from the three-way definition; no
// table, no backtrace, nothing shared with the library implementation.
inline int lev_brute(const protorec::PhonemeSeq& x, const protorec::PhonemeSeq& y,
                     std::size_t i = 0, std::size_t j = 0) {
  if (i == x.size()) return static_cast<int>(y.size() - j);
  if (j == y.size()) return static_cast<int>(x.size() - i);
  int sub = lev_brute(x, y, i + 1, j + 1) + (x[i] == y[j] ? 0 : 1);
  int del = lev_brute(x, y, i + 1, j) + 1;
  int ins = lev_brute(x, y, i, j + 1) + 1;
  return std::min({sub, del, ins});
}

// Recursive weighted oracle for the feature distance, same shape.
inline double feat_brute(const protorec::PhonemeSeq& x, const protorec::PhonemeSeq& y,
                         const protorec::FeatureTable& t, std::size_t i = 0, std::size_t j = 0) {
  if (i == x.size()) {
    double c = 0;
    for (std::size_t k = j; k < y.size(); ++k) c += t.feature_load(y[k]);
    return c;
  }
  if (j == y.size()) {
    double c = 0;
    for (std::size_t k = i; k < x.size(); ++k) c += t.feature_load(x[k]);
    return c;
  }
  double sub = feat_brute(x, y, t, i + 1, j + 1) + t.feature_diff(x[i], y[j]);
  double del = feat_brute(x, y, t, i + 1, j) + t.feature_load(x[i]);
  double ins = feat_brute(x, y, t, i, j + 1) + t.feature_load(y[j]);
  return std::min({sub, del, ins});
}

inline protorec::PhonemeSeq random_seq(std::mt19937_64& rng, const std::vector<protorec::PhonemeId>& alphabet,
                                       std::size_t max_len) {
  std::size_t len = rng() % (max_len + 1);
  protorec::PhonemeSeq out;
  for (std::size_t i = 0; i < len; ++i) out.push_back(alphabet[rng() % alphabet.size()]);
  return out;
}

}  // namespace testutil
