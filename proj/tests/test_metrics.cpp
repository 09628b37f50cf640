#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "protorec/errors.hpp"
#include "protorec/metrics.hpp"
#include "protorec/ranker.hpp"
#include "test_util.hpp"

using namespace protorec;
using testutil::table;
using testutil::tok;

namespace {

PhonotacticConstraints default_constraints() {
  static PhonotacticConstraints c =
      PhonotacticConstraints::load_file(testutil::data_path("constraints_latin.tsv"), table());
  return c;
}

std::vector<std::optional<PhonemeSeq>> golds_of(const std::vector<std::string>& forms) {
  std::vector<std::optional<PhonemeSeq>> out;
  for (const auto& f : forms)
    out.push_back(f == "-" ? std::optional<PhonemeSeq>{} : tok(f));
  return out;
}

std::vector<PhonemeSeq> preds_of(const std::vector<std::string>& forms) {
  std::vector<PhonemeSeq> out;
  for (const auto& f : forms) out.push_back(tok(f));
  return out;
}

}  // namespace

TEST_CASE("char_accuracy: alignment-based positional matching") {
  CHECK(char_accuracy(tok("anom"), tok("anom"), table()) == doctest::Approx(100.0));
  CHECK(char_accuracy(tok("ano"), tok("anom"), table()) == doctest::Approx(75.0));
  CHECK(char_accuracy(tok("tar"), tok("tarom"), table()) == doctest::Approx(60.0));
  CHECK(char_accuracy({}, tok("an"), table()) == doctest::Approx(0.0));
  CHECK_THROWS_AS(char_accuracy(tok("an"), {}, table()), DataError);
}

TEST_CASE("vc_error_rates: class attribution of errors") {
  auto [cer0, ver0] = vc_error_rates(tok("anom"), tok("anom"), table());
  CHECK(cer0 == doctest::Approx(0.0));
  CHECK(ver0 == doctest::Approx(0.0));

  auto [cer1, ver1] = vc_error_rates(tok("enom"), tok("anom"), table());
  CHECK(cer1 == doctest::Approx(0.0));
  CHECK(ver1 == doctest::Approx(25.0));

  auto [cer2, ver2] = vc_error_rates(tok("anod"), tok("anom"), table());
  CHECK(cer2 == doctest::Approx(25.0));
  CHECK(ver2 == doctest::Approx(0.0));

  // deletion of a prediction-side phoneme counts by its own class
  auto [cer3, ver3] = vc_error_rates(tok("anoms"), tok("anom"), table());
  CHECK(cer3 == doctest::Approx(25.0));
  CHECK(ver3 == doctest::Approx(0.0));
}

TEST_CASE("pvr: violation counting") {
  PhonotacticConstraints c = default_constraints();
  CHECK(pvr(preds_of({"ano", "mento", "tarom"}), c, table()) == doctest::Approx(0.0));
  // one violator among five
  CHECK(pvr(preds_of({"ano", "mento", "tarom", "salo", "bstro"}), c, table()) ==
        doctest::Approx(0.2));
  // vowel-free, over-long cluster, and word-initial illicit all violate
  CHECK(pvr(preds_of({"tr"}), c, table()) == doctest::Approx(1.0));
  CHECK(pvr(preds_of({"abstro"}), c, table()) == doctest::Approx(1.0));
  CHECK(pvr(preds_of({"ŋano"}), c, table()) == doctest::Approx(1.0));
  CHECK(pvr({}, c, table()) == doctest::Approx(0.0));
}

TEST_CASE("evaluate: perfect predictions zero every error metric") {
  std::vector<std::string> forms{"anom", "mento", "tarom", "salinom"};
  EvalReport report =
      evaluate(preds_of(forms), golds_of(forms), table(), default_constraints());
  CHECK(report.n == 4);
  CHECK(report.skipped == 0);
  CHECK(report.c_acc == doctest::Approx(100.0));
  CHECK(report.cer == doctest::Approx(0.0));
  CHECK(report.ver == doctest::Approx(0.0));
  CHECK(report.edit_dist == doctest::Approx(0.0));
  CHECK(report.feat_dist == doctest::Approx(0.0));
  CHECK(report.mcer == doctest::Approx(0.0));
  CHECK(report.n_edit_dist == doctest::Approx(0.0));
  CHECK(report.fer == doctest::Approx(0.0));
  CHECK(report.pvr == doctest::Approx(0.0));
}

TEST_CASE("evaluate: worked aggregates") {
  // pairs: (ano, anom) lev 1, (mereno, mento) lev 2... keep it hand-checkable
  EvalReport report = evaluate(preds_of({"ano", "mento"}), golds_of({"anom", "meno"}), table(),
                               default_constraints());
  CHECK(report.n == 2);
  // lev: 1 and 1 -> mean 1.0
  CHECK(report.edit_dist == doctest::Approx(1.0));
  // n_edit: 1/4 and 1/4 -> 0.25
  CHECK(report.n_edit_dist == doctest::Approx(0.25));
  CHECK(report.mcer == doctest::Approx(0.25));
  // c_acc: 3/4 and 4/4... "mento" vs "meno": m,e,n match, t deleted, o match -> 4/4
  CHECK(report.c_acc == doctest::Approx((75.0 + 100.0) / 2));
  // errors: insertion of gold-side m (nasal) and deletion of pred-side t
  // (stop), both consonants, over 8 gold phonemes
  CHECK(report.cer == doctest::Approx(100.0 * 2 / 8));
  CHECK(report.ver == doctest::Approx(0.0));

  // mean-lev example: distances 2 and 4 -> 3.0
  EvalReport spread = evaluate(preds_of({"ab", "abkl"}), golds_of({"abde", "ablume"}), table(),
                               default_constraints());
  CHECK(spread.edit_dist == doctest::Approx(3.0));
}

TEST_CASE("edit_metrics and feat_metrics standalone") {
  // identical pairs zero everything
  std::vector<EvalPair> same{{tok("ano"), tok("ano")}, {tok("mento"), tok("mento")}};
  EditMetrics em0 = edit_metrics(same, table());
  CHECK(em0.edit_dist == doctest::Approx(0.0));
  CHECK(em0.n_edit_dist == doctest::Approx(0.0));
  CHECK(em0.mcer == doctest::Approx(0.0));
  FeatMetrics fm0 = feat_metrics(same, table());
  CHECK(fm0.feat_dist == doctest::Approx(0.0));
  CHECK(fm0.fer == doctest::Approx(0.0));

  // lev {2, 4} -> mean 3.0
  std::vector<EvalPair> spread{{tok("ab"), tok("abde")}, {tok("abkl"), tok("ablume")}};
  CHECK(edit_metrics(spread, table()).edit_dist == doctest::Approx(3.0));

  // single voicing mismatch under the shipped table
  std::vector<EvalPair> td{{tok("t"), tok("d")}};
  FeatMetrics fm = feat_metrics(td, table());
  CHECK(fm.feat_dist == doctest::Approx(1.0));
  CHECK(fm.fer == doctest::Approx(1.0 / 7.0));

  // evaluate agrees with the standalone routes on a mixed corpus
  std::vector<std::string> preds{"ano", "mento", "tar"};
  std::vector<std::string> golds{"anom", "meno", "tarom"};
  std::vector<EvalPair> pairs;
  for (std::size_t i = 0; i < preds.size(); ++i)
    pairs.emplace_back(tok(preds[i]), tok(golds[i]));
  EvalReport report =
      evaluate(preds_of(preds), golds_of(golds), table(), default_constraints());
  EditMetrics em = edit_metrics(pairs, table());
  FeatMetrics fm2 = feat_metrics(pairs, table());
  CHECK(report.edit_dist == doctest::Approx(em.edit_dist));
  CHECK(report.n_edit_dist == doctest::Approx(em.n_edit_dist));
  CHECK(report.mcer == doctest::Approx(em.mcer));
  CHECK(report.feat_dist == doctest::Approx(fm2.feat_dist));
  CHECK(report.fer == doctest::Approx(fm2.fer));
}

TEST_CASE("evaluate: prose normalization modes") {
  EvalConfig prose;
  prose.n_edit_prose = true;
  prose.mcer_prose = true;
  EvalReport report = evaluate(preds_of({"ano", "mento"}), golds_of({"anom", "meno"}), table(),
                               default_constraints(), prose);
  // literal readings: mean-lev / n and total errors / n
  CHECK(report.n_edit_dist == doctest::Approx(report.edit_dist / 2.0));
  CHECK(report.mcer == doctest::Approx(2.0 / 2.0));
}

TEST_CASE("evaluate: pairs without gold are skipped and counted") {
  EvalReport report = evaluate(preds_of({"ano", "mento", "tar"}),
                               golds_of({"anom", "-", "tar"}), table(), default_constraints());
  CHECK(report.n == 2);
  CHECK(report.skipped == 1);
  // PVR still covers every prediction
  EvalReport with_violator = evaluate(preds_of({"bstr", "mento"}), golds_of({"-", "mento"}),
                                      table(), default_constraints());
  CHECK(with_violator.pvr == doctest::Approx(0.5));
}

TEST_CASE("evaluate: permutation invariance and list-length mismatch") {
  std::vector<std::string> preds{"ano", "mento", "tarom", "iwo"};
  std::vector<std::string> golds{"anom", "meno", "tarom", "iwom"};
  EvalReport a = evaluate(preds_of(preds), golds_of(golds), table(), default_constraints());
  std::vector<std::size_t> perm{2, 0, 3, 1};
  std::vector<std::string> preds_p, golds_p;
  for (std::size_t i : perm) {
    preds_p.push_back(preds[i]);
    golds_p.push_back(golds[i]);
  }
  EvalReport b = evaluate(preds_of(preds_p), golds_of(golds_p), table(), default_constraints());
  CHECK(a.c_acc == doctest::Approx(b.c_acc));
  CHECK(a.cer == doctest::Approx(b.cer));
  CHECK(a.ver == doctest::Approx(b.ver));
  CHECK(a.edit_dist == doctest::Approx(b.edit_dist));
  CHECK(a.feat_dist == doctest::Approx(b.feat_dist));
  CHECK(a.mcer == doctest::Approx(b.mcer));
  CHECK(a.n_edit_dist == doctest::Approx(b.n_edit_dist));
  CHECK(a.pvr == doctest::Approx(b.pvr));

  CHECK_THROWS_AS(evaluate(preds_of({"ano"}), golds_of({"ano", "an"}), table(),
                           default_constraints()),
                  DataError);
}

TEST_CASE("per-pair error numerators never exceed the script length") {
  std::mt19937_64 rng(31);
  std::vector<PhonemeId> alphabet = tok("anomstel");
  for (int iter = 0; iter < 300; ++iter) {
    PhonemeSeq pred = testutil::random_seq(rng, alphabet, 6);
    PhonemeSeq gold = testutil::random_seq(rng, alphabet, 6);
    if (gold.empty()) continue;
    auto [cer, ver] = vc_error_rates(pred, gold, table());
    double total_ops = levenshtein(pred, gold);
    CHECK((cer + ver) * static_cast<double>(gold.size()) / 100.0 ==
          doctest::Approx(total_ops));
    // n_edit <= edit whenever gold length >= 1
    CHECK(static_cast<double>(levenshtein(pred, gold)) / gold.size() <= total_ops + 1e-12);
  }
}

TEST_CASE("report formatting is stable") {
  EvalReport report = evaluate(preds_of({"ano"}), golds_of({"anom"}), table(),
                               default_constraints());
  std::string tsv = format_report_tsv(report);
  CHECK(tsv.find("c_acc\tcer") == 0);
  CHECK(tsv.find("75.0000") != std::string::npos);
  std::string summary = format_report_summary(report);
  CHECK(summary.find("C_ACC") != std::string::npos);
  CHECK(format_report_tsv(report) == tsv);
}
