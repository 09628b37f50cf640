#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "protorec/distance.hpp"
#include "protorec/errors.hpp"
#include "protorec/phoneme.hpp"
#include "test_util.hpp"

using namespace protorec;
using testutil::table;
using testutil::tok;

TEST_CASE("tokenize: longest match over declared multigraphs") {
  PhonemeSeq s = tok("abdʒa");
  REQUIRE(s.size() == 4);
  CHECK(table().symbol(s[0]) == "a");
  CHECK(table().symbol(s[1]) == "b");
  CHECK(table().symbol(s[2]) == "dʒ");
  CHECK(table().symbol(s[3]) == "a");

  CHECK(tok("").empty());

  PhonemeSeq t = tok("akantʰom");
  REQUIRE(t.size() == 7);
  CHECK(table().symbol(t[4]) == "tʰ");
}

TEST_CASE("tokenize: unknown symbol reports position and grapheme") {
  CHECK_THROWS_AS(tok("anʘo"), UnknownSymbolError);
  try {
    tok("anʘo");
  } catch (const UnknownSymbolError& e) {
    CHECK(e.position == 3);
    CHECK(e.grapheme == "ʘ");
  }
}

TEST_CASE("tokenize: gap sentinels only in pre-aligned mode") {
  CHECK_THROWS_AS(tok("a-n"), UnknownSymbolError);
  PhonemeSeq s = table().tokenize("a-n", /*allow_gap=*/true);
  REQUIRE(s.size() == 3);
  CHECK(s[1] == kGap);
  CHECK(table().detokenize(s) == "a-n");
}

TEST_CASE("detok(tok(s)) is the identity on inventory-valid strings") {
  std::mt19937_64 rng(1234);
  std::vector<PhonemeId> all;
  for (std::size_t i = 0; i < table().size(); ++i) all.push_back(static_cast<PhonemeId>(i));
  for (int iter = 0; iter < 500; ++iter) {
    PhonemeSeq seq = testutil::random_seq(rng, all, 10);
    std::string raw = table().detokenize(seq);
    CHECK(table().detokenize(table().tokenize(raw)) == raw);
  }
}

TEST_CASE("levenshtein: worked examples") {
  CHECK(levenshtein(tok("ano"), tok("ano")) == 0);
  CHECK(levenshtein(tok("ano"), tok("anom")) == 1);
  CHECK(levenshtein(tok("kitten"), tok("sitting")) == 3);
  CHECK(levenshtein({}, tok("abd")) == 3);
}

TEST_CASE("levenshtein: metric axioms on random triples") {
  std::mt19937_64 rng(99);
  std::vector<PhonemeId> alphabet = tok("anots");
  for (int iter = 0; iter < 2000; ++iter) {
    PhonemeSeq x = testutil::random_seq(rng, alphabet, 6);
    PhonemeSeq y = testutil::random_seq(rng, alphabet, 6);
    PhonemeSeq z = testutil::random_seq(rng, alphabet, 6);
    int dxy = levenshtein(x, y);
    CHECK(dxy >= 0);
    CHECK(dxy == levenshtein(y, x));
    CHECK((dxy == 0) == (x == y));
    CHECK(dxy <= levenshtein(x, z) + levenshtein(z, y));
  }
}

TEST_CASE("levenshtein: brute-force agreement on short pairs") {
  std::vector<PhonemeId> alphabet = tok("ant");
  // Every form of length <= 3 over a 3-symbol alphabet.
  std::vector<PhonemeSeq> forms{{}};
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (forms[i].size() >= 3) continue;
    for (PhonemeId a : alphabet) {
      PhonemeSeq next = forms[i];
      next.push_back(a);
      forms.push_back(std::move(next));
    }
  }
  for (const auto& x : forms)
    for (const auto& y : forms) {
      if (x.size() + y.size() > 6) continue;
      CHECK(levenshtein(x, y) == testutil::lev_brute(x, y));
    }
}

TEST_CASE("phonetic_bonus: class table lookups") {
  auto id = [&](const char* s) { return table().id_of(s); };
  CHECK(phonetic_bonus(id("b"), id("p"), table()) == 1.5);
  CHECK(phonetic_bonus(id("a"), id("s"), table()) == 1.0);
  CHECK(phonetic_bonus(id("m"), id("n"), table()) == 1.5);
  // symmetric, two-valued
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    PhonemeId p = static_cast<PhonemeId>(rng() % table().size());
    PhonemeId q = static_cast<PhonemeId>(rng() % table().size());
    double b = phonetic_bonus(p, q, table());
    CHECK(b == phonetic_bonus(q, p, table()));
    CHECK((b == 1.0 || b == 1.5));
  }
}

TEST_CASE("string class: uniform inherits, mixed is other, empty never bonuses") {
  CHECK(string_class(tok("aō"), table()) == PhonemeClass::Vowel);
  CHECK(string_class(tok("om"), table()) == PhonemeClass::Other);
  CHECK(phonetic_bonus_strings(tok("aō"), tok("o"), table()) == 1.5);
  CHECK(phonetic_bonus_strings(tok("om"), tok("o"), table()) == 1.0);
  CHECK(phonetic_bonus_strings({}, tok("om"), table()) == 1.0);
}

TEST_CASE("sim: worked examples and identity form") {
  CHECK(sim(tok("ano"), tok("ano"), table()) == doctest::Approx(5.5));
  CHECK(sim({}, {}, table()) == doctest::Approx(1.0));
  CHECK(sim(tok("an"), tok("am"), table()) == doctest::Approx(3.5));
  // sim(x,x) = 1 + 1.5|x|
  std::mt19937_64 rng(7);
  std::vector<PhonemeId> alphabet = tok("anotskelu");
  for (int iter = 0; iter < 100; ++iter) {
    PhonemeSeq x = testutil::random_seq(rng, alphabet, 8);
    if (x.empty()) continue;
    CHECK(sim(x, x, table()) == doctest::Approx(1.0 + 1.5 * static_cast<double>(x.size())));
    CHECK(sim_norm(x, x, table()) == doctest::Approx(1.0));
  }
  // empty vs non-empty: lev term saturates, no positional bonuses
  CHECK(sim({}, tok("an"), table()) == doctest::Approx(0.0));
}

TEST_CASE("feature_distance: voicing-only beats multi-feature mismatch") {
  CHECK(feature_distance(tok("t"), tok("t"), table()) == doctest::Approx(0.0));
  double td = feature_distance(tok("t"), tok("d"), table());
  double kz = feature_distance(tok("k"), tok("z"), table());
  CHECK(td == doctest::Approx(1.0));  // voicing only, under the shipped table
  CHECK(td < kz);
  CHECK(kz == doctest::Approx(3.0));
}

TEST_CASE("feature_distance: identity, symmetry, brute-force agreement") {
  std::mt19937_64 rng(21);
  std::vector<PhonemeId> alphabet = tok("atdkzmo");
  for (int iter = 0; iter < 300; ++iter) {
    PhonemeSeq x = testutil::random_seq(rng, alphabet, 4);
    PhonemeSeq y = testutil::random_seq(rng, alphabet, 4);
    CHECK(feature_distance(x, x, table()) == doctest::Approx(0.0));
    CHECK(feature_distance(x, y, table()) == doctest::Approx(feature_distance(y, x, table())));
    CHECK(feature_distance(x, y, table()) == doctest::Approx(testutil::feat_brute(x, y, table())));
  }
}

TEST_CASE("feature table: load-time validation") {
  std::istringstream dup(
      "a\tvowel\theight=open\tbackness=central\trounding=unrounded\n"
      "a\tvowel\theight=open\tbackness=central\trounding=unrounded\n");
  CHECK_THROWS_AS(FeatureTable::load(dup), MalformedRecordError);

  std::istringstream missing("t\tstop\tvoicing=voiceless\tplace=alveolar\n");
  CHECK_THROWS_AS(FeatureTable::load(missing), MalformedRecordError);

  std::istringstream bad_class("t\tclick\tvoicing=voiceless\tplace=alveolar\tmanner=stop\n");
  CHECK_THROWS_AS(FeatureTable::load(bad_class), DataError);

  CHECK(table().feature_count() == 7);
}

TEST_CASE("canonical alignment prefers substitution over indels on ties") {
  auto cols = align(tok("anom"), tok("ano"));
  REQUIRE(cols.size() == 4);
  CHECK(cols[3].kind == EditKind::Delete);
  int edits = 0;
  for (const auto& c : cols)
    if (c.kind != EditKind::Match) ++edits;
  CHECK(edits == levenshtein(tok("anom"), tok("ano")));

  auto cols2 = align(tok("a"), tok("e"));
  REQUIRE(cols2.size() == 1);
  CHECK(cols2[0].kind == EditKind::Substitute);
}
