#include "protorec/phoneme.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "protorec/errors.hpp"

namespace protorec {

namespace {

// Byte length of the UTF-8 code point starting at s[i].
std::size_t cp_len(const std::string& s, std::size_t i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) return 1;
  if ((c >> 5) == 0x6) return 2;
  if ((c >> 4) == 0xe) return 3;
  if ((c >> 3) == 0x1e) return 4;
  return 1;  // invalid byte, treat as opaque
}

std::size_t count_code_points(const std::string& s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); i += cp_len(s, i)) ++n;
  return n;
}

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

constexpr const char* kMinusSign = "−";  // alternate gap glyph

}  // namespace

const char* class_name(PhonemeClass c) {
  switch (c) {
    case PhonemeClass::Vowel: return "vowel";
    case PhonemeClass::Stop: return "stop";
    case PhonemeClass::Fricative: return "fricative";
    case PhonemeClass::Liquid: return "liquid";
    case PhonemeClass::Nasal: return "nasal";
    case PhonemeClass::Other: return "other";
  }
  return "other";
}

PhonemeClass class_from_name(const std::string& name) {
  if (name == "vowel") return PhonemeClass::Vowel;
  if (name == "stop") return PhonemeClass::Stop;
  if (name == "fricative") return PhonemeClass::Fricative;
  if (name == "liquid") return PhonemeClass::Liquid;
  if (name == "nasal") return PhonemeClass::Nasal;
  if (name == "other") return PhonemeClass::Other;
  throw DataError("unknown phoneme class '" + name + "'");
}

FeatureTable FeatureTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open feature table: " + path);
  return load(in);
}

FeatureTable FeatureTable::load(std::istream& in) {
  FeatureTable table;
  std::map<std::string, bool> seen_features;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_tabs(line);
    if (cells.size() < 2) throw MalformedRecordError(line_no, "expected symbol, class, feature=value...");
    PhonemeInfo info;
    info.symbol = cells[0];
    if (info.symbol.empty()) throw MalformedRecordError(line_no, "empty symbol");
    if (info.symbol == "-" || info.symbol == kMinusSign)
      throw MalformedRecordError(line_no, "'-' is reserved for gaps / missing data");
    if (count_code_points(info.symbol) > 3)
      throw MalformedRecordError(line_no, "symbol '" + info.symbol + "' exceeds 3 code points");
    if (table.by_symbol_.count(info.symbol))
      throw MalformedRecordError(line_no, "duplicate symbol '" + info.symbol + "'");
    info.cls = class_from_name(cells[1]);
    for (std::size_t i = 2; i < cells.size(); ++i) {
      if (cells[i].empty()) continue;
      std::size_t eq = cells[i].find('=');
      if (eq == std::string::npos)
        throw MalformedRecordError(line_no, "feature '" + cells[i] + "' is not name=value");
      std::string name = cells[i].substr(0, eq);
      std::string value = cells[i].substr(eq + 1);
      if (name.empty() || value.empty())
        throw MalformedRecordError(line_no, "feature '" + cells[i] + "' is not name=value");
      info.features[name] = value;
      seen_features[name] = true;
    }
    auto require = [&](const char* f) {
      if (!info.features.count(f))
        throw MalformedRecordError(line_no, "'" + info.symbol + "' missing required feature " + f);
    };
    if (info.cls == PhonemeClass::Vowel) {
      require("height");
      require("backness");
      require("rounding");
    } else {
      require("voicing");
      require("place");
      require("manner");
    }
    PhonemeId id = static_cast<PhonemeId>(table.entries_.size());
    table.by_symbol_[info.symbol] = id;
    if (info.cls == PhonemeClass::Vowel) table.vowels_.push_back(id);
    table.entries_.push_back(std::move(info));
  }
  if (table.entries_.empty()) throw DataError("feature table is empty");
  table.feature_count_ = static_cast<int>(seen_features.size());

  table.match_order_.resize(table.entries_.size());
  for (std::size_t i = 0; i < table.entries_.size(); ++i)
    table.match_order_[i] = static_cast<PhonemeId>(i);
  std::sort(table.match_order_.begin(), table.match_order_.end(),
            [&](PhonemeId a, PhonemeId b) {
              const std::string& sa = table.entries_[static_cast<std::size_t>(a)].symbol;
              const std::string& sb = table.entries_[static_cast<std::size_t>(b)].symbol;
              if (sa.size() != sb.size()) return sa.size() > sb.size();
              return sa < sb;
            });

  // Dense cache: the diff is consulted in the inner loop of the feature DP.
  std::size_t n = table.entries_.size();
  table.diff_.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto& fa = table.entries_[a].features;
      const auto& fb = table.entries_[b].features;
      double d = 0;
      for (const auto& [name, value] : fa) {
        auto it = fb.find(name);
        if (it == fb.end() || it->second != value) d += 1;
      }
      for (const auto& [name, value] : fb) {
        (void)value;
        if (!fa.count(name)) d += 1;
      }
      table.diff_[a * n + b] = d;
      table.diff_[b * n + a] = d;
    }
  }
  return table;
}

PhonemeId FeatureTable::id_of(const std::string& symbol) const {
  auto it = by_symbol_.find(symbol);
  if (it == by_symbol_.end()) throw UnknownSymbolError(0, symbol);
  return it->second;
}

double FeatureTable::feature_diff(PhonemeId a, PhonemeId b) const {
  return diff_[static_cast<std::size_t>(a) * entries_.size() + static_cast<std::size_t>(b)];
}

double FeatureTable::feature_load(PhonemeId a) const {
  return static_cast<double>(info(a).features.size());
}

PhonemeSeq FeatureTable::tokenize(const std::string& raw, bool allow_gap) const {
  PhonemeSeq out;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (allow_gap) {
      if (raw[i] == '-') {
        out.push_back(kGap);
        ++i;
        continue;
      }
      if (raw.compare(i, 3, kMinusSign) == 0) {
        out.push_back(kGap);
        i += 3;
        continue;
      }
    }
    bool matched = false;
    for (PhonemeId id : match_order_) {
      const std::string& sym = entries_[static_cast<std::size_t>(id)].symbol;
      if (raw.compare(i, sym.size(), sym) == 0) {
        out.push_back(id);
        i += sym.size();
        matched = true;
        break;
      }
    }
    if (!matched)
      throw UnknownSymbolError(out.size() + 1, raw.substr(i, cp_len(raw, i)));
  }
  return out;
}

std::string FeatureTable::detokenize(const PhonemeSeq& seq) const {
  std::string out;
  for (PhonemeId id : seq) {
    if (id == kGap)
      out += '-';
    else
      out += symbol(id);
  }
  return out;
}

bool form_less(const PhonemeSeq& a, const PhonemeSeq& b, const FeatureTable& table) {
  static const std::string empty;
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& sa = a[i] == kGap ? empty : table.symbol(a[i]);
    const std::string& sb = b[i] == kGap ? empty : table.symbol(b[i]);
    if (sa != sb) return sa < sb;
  }
  return a.size() < b.size();
}

}  // namespace protorec
