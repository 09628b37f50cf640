#pragma once

#include "protorec/phoneme.hpp"

namespace protorec {

/// Unit-cost edit distance at phoneme granularity.
int levenshtein(const PhonemeSeq& x, const PhonemeSeq& y);

enum class EditKind { Match, Substitute, Delete, Insert };

struct AlignedPair {
  PhonemeId x = kGap;  // gap on insert columns
  PhonemeId y = kGap;  // gap on delete columns
  EditKind kind = EditKind::Match;
};

/// Canonical minimal alignment of x against y: the DP backtrace that prefers
/// substitution over deletion over insertion on cost ties. Every consumer of
/// "the" edit script (edit classification, char accuracy, vowel/consonant
/// error attribution) uses this one alignment.
std::vector<AlignedPair> align(const PhonemeSeq& x, const PhonemeSeq& y);

/// 1.5 when the two phonemes share a phonetic class, 1.0 otherwise.
double phonetic_bonus(PhonemeId p, PhonemeId q, const FeatureTable& table);

/// Class of a multi-phoneme string: the shared class when uniform, Other when
/// mixed. Gaps are ignored.
PhonemeClass string_class(const PhonemeSeq& s, const FeatureTable& table);

/// phonetic_bonus lifted to rule-side strings. An empty side has no class and
/// never earns the bonus.
double phonetic_bonus_strings(const PhonemeSeq& s, const PhonemeSeq& t, const FeatureTable& table);

/// 1 - lev/max(|x|,|y|) + sum of positionwise phonetic bonuses over the
/// shorter length. Two empty sequences score 1 (the lev term reads 0/0 := 0).
/// Unbounded above; callers must not assume [0,1].
double sim(const PhonemeSeq& x, const PhonemeSeq& y, const FeatureTable& table);

/// sim rescaled by its identity-case ceiling 1 + 1.5*max(|x|,|y|), giving a
/// value in [0,1] suitable for log-likelihoods.
double sim_norm(const PhonemeSeq& x, const PhonemeSeq& y, const FeatureTable& table);

/// Weighted edit distance where substituting p for q costs the number of
/// disagreeing articulatory features and inserting/deleting a phoneme costs
/// its full feature load.
double feature_distance(const PhonemeSeq& x, const PhonemeSeq& y, const FeatureTable& table);

}  // namespace protorec
