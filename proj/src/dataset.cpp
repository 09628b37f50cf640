#include "protorec/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "protorec/errors.hpp"

namespace protorec {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

constexpr const char* kLengthMark = "ː";  // IPA triangular colon

}  // namespace

std::size_t CognateSet::present_count() const {
  std::size_t n = 0;
  for (const auto& r : reflexes)
    if (r.has_value()) ++n;
  return n;
}

std::vector<std::size_t> CognateSet::present_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < reflexes.size(); ++i)
    if (reflexes[i].has_value()) out.push_back(i);
  return out;
}

std::string preprocess(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] == ':') {
      ++i;
      continue;
    }
    if (raw.compare(i, 2, kLengthMark) == 0) {
      i += 2;
      continue;
    }
    out += raw[i];
    ++i;
  }
  return out;
}

Dataset parse_dataset(std::istream& in, const FeatureTable& table,
                      const std::vector<std::string>& languages,
                      const ParseOptions& options) {
  Dataset dataset;
  dataset.languages = languages;

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) return dataset;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  dataset.columns = split_tabs(line);

  // column index -> reflex slot (or gold)
  std::vector<int> column_role(dataset.columns.size(), -2);
  int gold_col = -1;
  for (std::size_t c = 0; c < dataset.columns.size(); ++c) {
    const std::string& name = dataset.columns[c];
    if (!options.gold_column.empty() && name == options.gold_column) {
      if (gold_col >= 0) throw MalformedRecordError(line_no, "duplicate gold column");
      gold_col = static_cast<int>(c);
      column_role[c] = -1;
      continue;
    }
    auto it = std::find(languages.begin(), languages.end(), name);
    if (it == languages.end())
      throw MalformedRecordError(line_no, "column '" + name + "' is not a configured language");
    std::size_t slot = static_cast<std::size_t>(it - languages.begin());
    if (std::count(column_role.begin(), column_role.end(), static_cast<int>(slot)))
      throw MalformedRecordError(line_no, "duplicate language column '" + name + "'");
    column_role[c] = static_cast<int>(slot);
  }
  for (const std::string& lang : languages)
    if (std::find(dataset.columns.begin(), dataset.columns.end(), lang) == dataset.columns.end())
      throw MalformedRecordError(line_no, "missing language column '" + lang + "'");
  if (gold_col >= 0) dataset.gold_column = options.gold_column;

  auto parse_cell = [&](const std::string& cell, std::size_t lineno) -> std::optional<PhonemeSeq> {
    if (cell == "-" || cell == "−") return std::nullopt;
    try {
      return table.tokenize(preprocess(cell), options.pre_aligned);
    } catch (const UnknownSymbolError& e) {
      throw MalformedRecordError(lineno, std::string("in cell '") + cell + "': " + e.what());
    }
  };

  int next_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (cells.size() != dataset.columns.size())
      throw MalformedRecordError(line_no, "expected " + std::to_string(dataset.columns.size()) +
                                              " columns, got " + std::to_string(cells.size()));
    CognateSet set;
    set.id = next_id++;
    set.reflexes.assign(languages.size(), std::nullopt);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (column_role[c] == -1)
        set.gold = parse_cell(cells[c], line_no);
      else
        set.reflexes[static_cast<std::size_t>(column_role[c])] = parse_cell(cells[c], line_no);
    }
    if (set.present_count() == 0)
      throw MalformedRecordError(line_no, "cognate set has no present reflex");
    dataset.sets.push_back(std::move(set));
  }
  return dataset;
}

Dataset parse_dataset_file(const std::string& path, const FeatureTable& table,
                           const std::vector<std::string>& languages,
                           const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset: " + path);
  return parse_dataset(in, table, languages, options);
}

void serialize_dataset(const Dataset& dataset, const FeatureTable& table, std::ostream& out) {
  for (std::size_t c = 0; c < dataset.columns.size(); ++c) {
    if (c) out << '\t';
    out << dataset.columns[c];
  }
  out << '\n';
  for (const CognateSet& set : dataset.sets) {
    for (std::size_t c = 0; c < dataset.columns.size(); ++c) {
      if (c) out << '\t';
      const std::string& name = dataset.columns[c];
      const std::optional<PhonemeSeq>* cell = nullptr;
      if (!dataset.gold_column.empty() && name == dataset.gold_column) {
        cell = &set.gold;
      } else {
        auto it = std::find(dataset.languages.begin(), dataset.languages.end(), name);
        cell = &set.reflexes[static_cast<std::size_t>(it - dataset.languages.begin())];
      }
      out << (cell->has_value() ? table.detokenize(**cell) : "-");
    }
    out << '\n';
  }
}

AlignmentMatrix pad_align(const CognateSet& set, const PadOptions& options) {
  AlignmentMatrix matrix;
  std::size_t width = 0;
  for (const auto& r : set.reflexes)
    if (r.has_value()) width = std::max(width, r->size());
  matrix.width = width;
  for (std::size_t i = 0; i < set.reflexes.size(); ++i) {
    if (set.reflexes[i].has_value()) {
      PhonemeSeq row = *set.reflexes[i];
      row.resize(width, kGap);
      matrix.rows.push_back(std::move(row));
      matrix.row_language.push_back(i);
    } else if (options.absent_as_gap_rows) {
      matrix.rows.emplace_back(width, kGap);
      matrix.row_language.push_back(i);
    }
  }
  return matrix;
}

}  // namespace protorec
