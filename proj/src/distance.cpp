#include "protorec/distance.hpp"

#include <algorithm>

namespace protorec {

int levenshtein(const PhonemeSeq& x, const PhonemeSeq& y) {
  std::size_t n = x.size(), m = y.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::vector<AlignedPair> align(const PhonemeSeq& x, const PhonemeSeq& y) {
  std::size_t n = x.size(), m = y.size();
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) dp[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) dp[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      dp[i][j] = std::min({dp[i - 1][j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1),
                           dp[i - 1][j] + 1, dp[i][j - 1] + 1});

  std::vector<AlignedPair> cols;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        dp[i][j] == dp[i - 1][j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1)) {
      cols.push_back({x[i - 1], y[j - 1],
                      x[i - 1] == y[j - 1] ? EditKind::Match : EditKind::Substitute});
      --i;
      --j;
    } else if (i > 0 && dp[i][j] == dp[i - 1][j] + 1) {
      cols.push_back({x[i - 1], kGap, EditKind::Delete});
      --i;
    } else {
      cols.push_back({kGap, y[j - 1], EditKind::Insert});
      --j;
    }
  }
  std::reverse(cols.begin(), cols.end());
  return cols;
}

double phonetic_bonus(PhonemeId p, PhonemeId q, const FeatureTable& table) {
  return table.cls(p) == table.cls(q) ? 1.5 : 1.0;
}

PhonemeClass string_class(const PhonemeSeq& s, const FeatureTable& table) {
  bool first = true;
  PhonemeClass c = PhonemeClass::Other;
  for (PhonemeId id : s) {
    if (id == kGap) continue;
    if (first) {
      c = table.cls(id);
      first = false;
    } else if (table.cls(id) != c) {
      return PhonemeClass::Other;
    }
  }
  return c;
}

double phonetic_bonus_strings(const PhonemeSeq& s, const PhonemeSeq& t, const FeatureTable& table) {
  if (s.empty() || t.empty()) return 1.0;
  return string_class(s, table) == string_class(t, table) ? 1.5 : 1.0;
}

double sim(const PhonemeSeq& x, const PhonemeSeq& y, const FeatureTable& table) {
  std::size_t mx = std::max(x.size(), y.size());
  double lev_term = mx == 0 ? 0.0 : static_cast<double>(levenshtein(x, y)) / static_cast<double>(mx);
  double bonus = 0.0;
  std::size_t mn = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < mn; ++i) bonus += phonetic_bonus(x[i], y[i], table);
  return 1.0 - lev_term + bonus;
}

double sim_norm(const PhonemeSeq& x, const PhonemeSeq& y, const FeatureTable& table) {
  double ceiling = 1.0 + 1.5 * static_cast<double>(std::max(x.size(), y.size()));
  return sim(x, y, table) / ceiling;
}

double feature_distance(const PhonemeSeq& x, const PhonemeSeq& y, const FeatureTable& table) {
  std::size_t n = x.size(), m = y.size();
  std::vector<double> prev(m + 1), cur(m + 1);
  prev[0] = 0.0;
  for (std::size_t j = 1; j <= m; ++j) prev[j] = prev[j - 1] + table.feature_load(y[j - 1]);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = prev[0] + table.feature_load(x[i - 1]);
    for (std::size_t j = 1; j <= m; ++j) {
      double sub = prev[j - 1] + table.feature_diff(x[i - 1], y[j - 1]);
      double del = prev[j] + table.feature_load(x[i - 1]);
      double ins = cur[j - 1] + table.feature_load(y[j - 1]);
      cur[j] = std::min({sub, del, ins});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace protorec
