#include "protorec/phonotactics.hpp"

#include <fstream>
#include <sstream>

#include "protorec/errors.hpp"

namespace protorec {

PhonotacticConstraints PhonotacticConstraints::load_file(const std::string& path,
                                                         const FeatureTable& table) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open constraints file: " + path);
  return load(in, table);
}

PhonotacticConstraints PhonotacticConstraints::load(std::istream& in, const FeatureTable& table) {
  PhonotacticConstraints out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw MalformedRecordError(line_no, "expected key<TAB>value");
    std::string key = line.substr(0, tab);
    std::string value = line.substr(tab + 1);
    if (key == "max_cluster") {
      out.max_cluster = std::stoi(value);
      if (out.max_cluster < 1) throw MalformedRecordError(line_no, "max_cluster must be >= 1");
    } else if (key == "require_vowel") {
      out.require_vowel = (value == "true" || value == "1");
    } else if (key == "illicit") {
      IllicitPattern pat;
      if (!value.empty() && value.front() == '^') {
        pat.anchor_start = true;
        value.erase(0, 1);
      }
      if (!value.empty() && value.back() == '$') {
        pat.anchor_end = true;
        value.pop_back();
      }
      if (value.empty()) throw MalformedRecordError(line_no, "empty illicit pattern");
      pat.seq = table.tokenize(value);
      out.illicit.push_back(std::move(pat));
    } else {
      throw MalformedRecordError(line_no, "unknown constraint key '" + key + "'");
    }
  }
  return out;
}

bool contains_vowel(const PhonemeSeq& seq, const FeatureTable& table) {
  for (PhonemeId id : seq)
    if (id != kGap && table.is_vowel(id)) return true;
  return false;
}

int count_consonant_runs(const PhonemeSeq& seq, const FeatureTable& table, int min_run) {
  int runs = 0, current = 0;
  for (PhonemeId id : seq) {
    if (id != kGap && !table.is_vowel(id)) {
      ++current;
    } else {
      if (current >= min_run) ++runs;
      current = 0;
    }
  }
  if (current >= min_run) ++runs;
  return runs;
}

namespace {

bool matches_at(const PhonemeSeq& seq, std::size_t pos, const PhonemeSeq& pat) {
  if (pos + pat.size() > seq.size()) return false;
  for (std::size_t i = 0; i < pat.size(); ++i)
    if (seq[pos + i] != pat[i]) return false;
  return true;
}

}  // namespace

int count_illicit(const PhonemeSeq& seq, const PhonotacticConstraints& constraints) {
  int count = 0;
  for (const auto& pat : constraints.illicit) {
    if (pat.seq.size() > seq.size()) continue;
    if (pat.anchor_start && pat.anchor_end) {
      if (seq.size() == pat.seq.size() && matches_at(seq, 0, pat.seq)) ++count;
    } else if (pat.anchor_start) {
      if (matches_at(seq, 0, pat.seq)) ++count;
    } else if (pat.anchor_end) {
      if (matches_at(seq, seq.size() - pat.seq.size(), pat.seq)) ++count;
    } else {
      for (std::size_t pos = 0; pos + pat.seq.size() <= seq.size(); ++pos)
        if (matches_at(seq, pos, pat.seq)) ++count;
    }
  }
  return count;
}

bool violates(const PhonemeSeq& seq, const PhonotacticConstraints& constraints,
              const FeatureTable& table) {
  if (constraints.require_vowel && !contains_vowel(seq, table)) return true;
  if (count_consonant_runs(seq, table, constraints.max_cluster + 1) > 0) return true;
  if (count_illicit(seq, constraints) > 0) return true;
  return false;
}

}  // namespace protorec
