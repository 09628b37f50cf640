#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace protorec {

enum class PhonemeClass { Vowel, Stop, Fricative, Liquid, Nasal, Other };

const char* class_name(PhonemeClass c);
PhonemeClass class_from_name(const std::string& name);

// Phonemes are interned: a sequence is a vector of ids into the loaded
// FeatureTable. kGap is the alignment gap sentinel and never lives in the
// table itself.
using PhonemeId = std::int32_t;
inline constexpr PhonemeId kGap = -1;
using PhonemeSeq = std::vector<PhonemeId>;

struct PhonemeInfo {
  std::string symbol;  // IPA grapheme cluster, 1-3 code points
  PhonemeClass cls = PhonemeClass::Other;
  std::map<std::string, std::string> features;  // feature name -> value
};

/// Phoneme inventory with articulatory features and the tokenizer built on
/// top of it. Loaded from a TSV file: symbol, class, feature=value pairs.
/// Any symbol longer than one code point acts as a multigraph and is matched
/// longest-first during tokenization.
class FeatureTable {
 public:
  static FeatureTable load_file(const std::string& path);
  static FeatureTable load(std::istream& in);

  std::size_t size() const { return entries_.size(); }
  const PhonemeInfo& info(PhonemeId id) const { return entries_.at(static_cast<std::size_t>(id)); }
  const std::string& symbol(PhonemeId id) const { return info(id).symbol; }
  PhonemeClass cls(PhonemeId id) const { return info(id).cls; }
  bool is_vowel(PhonemeId id) const { return id != kGap && cls(id) == PhonemeClass::Vowel; }

  bool contains(const std::string& symbol) const { return by_symbol_.count(symbol) != 0; }
  PhonemeId id_of(const std::string& symbol) const;  // throws UnknownSymbolError

  // Number of distinct feature names declared anywhere in the table. This is
  // the FER denominator; it is a property of the shipped table, not of any
  // particular phoneme.
  int feature_count() const { return feature_count_; }

  // Count of feature values that disagree between the two phonemes, over the
  // union of their declared feature names (a feature present on one side only
  // counts as a mismatch).
  double feature_diff(PhonemeId a, PhonemeId b) const;
  // Number of features the phoneme carries; insertion/deletion cost in the
  // feature-distance DP.
  double feature_load(PhonemeId a) const;

  const std::vector<PhonemeId>& vowels() const { return vowels_; }

  /// Longest-match, left-to-right segmentation against the inventory.
  /// With allow_gap, "-" and U+2212 decode to kGap (pre-aligned input).
  PhonemeSeq tokenize(const std::string& raw, bool allow_gap = false) const;
  /// Inverse of tokenize; gaps render as "-".
  std::string detokenize(const PhonemeSeq& seq) const;

 private:
  std::vector<PhonemeInfo> entries_;
  std::map<std::string, PhonemeId> by_symbol_;
  std::vector<PhonemeId> vowels_;
  std::vector<PhonemeId> match_order_;  // by byte length descending
  std::vector<double> diff_;            // dense pairwise feature_diff cache
  int feature_count_ = 0;
};

/// Deterministic total order on forms: elementwise comparison of symbol
/// strings, gap sorting before any symbol. Used for every tie-break.
bool form_less(const PhonemeSeq& a, const PhonemeSeq& b, const FeatureTable& table);

}  // namespace protorec
