#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "doctest.h"
#include "json.hpp"
#include "ontostream/embeddings.hpp"
#include "ontostream/errors.hpp"
#include "test_support.hpp"

using namespace ontostream;
using namespace testsupport;

namespace {

Stream qrStream() {
  return Stream::fromDocuments(loadDocument(fixturePath("traffic.onto")),
                               loadDocument(fixturePath("traffic_qr.stream")));
}

std::vector<std::string> texts(const FactIndex& index) {
  std::vector<std::string> out;
  for (const auto& f : index.facts) out.push_back(f.text());
  return out;
}

constexpr double kTol = 1e-12;

}  // namespace

TEST_CASE("fact index catalogues every dynamic fact once, in order") {
  StreamAnalysis a(qrStream());
  FactIndex index = buildIndex(a);

  CHECK(index.size() == 12);
  CHECK(texts(index) ==
        std::vector<std::string>{
            "BusRoad(r1)", "BusRoad(r2)", "ClearedRoad(r1)", "ClearedRoad(r2)",
            "DisruptedRoad(r2)", "Long(_sk(r2,travel))", "OK(_sk(r1,travel))",
            "OK(_sk(r2,travel))", "travel(r1,_sk(r1,travel))", "travel(r2,_sk(r2,travel))",
            "with(r1,b0)", "with(r2,b0)"});
  CHECK(std::is_sorted(index.facts.begin(), index.facts.end()));
  CHECK(index.digest == factIndexDigest(index.facts));
  CHECK(index.digest.size() == 16);

  for (int k = 0; k < index.size(); ++k) CHECK(index.indexOf(index.facts[k]) == k);
  CHECK(index.indexOf(Fact::parse("Road(r1)")) == -1);  // static, not catalogued

  // excluding a prediction target shrinks the index and changes the digest
  FactIndex without = buildIndex(a, Fact::parse("BusRoad(r2)"));
  CHECK(without.size() == 11);
  CHECK(without.indexOf(Fact::parse("BusRoad(r2)")) == -1);
  CHECK(without.digest != index.digest);
}

TEST_CASE("fact index serialization round-trips and rejects tampering") {
  StreamAnalysis a(qrStream());
  FactIndex index = buildIndex(a);

  FactIndex back = FactIndex::fromJson(index.toJson());
  CHECK(back.facts == index.facts);
  CHECK(back.digest == index.digest);

  auto j = nlohmann::json::parse(index.toJson());
  j["digest"] = "0000000000000000";
  CHECK_THROWS_AS((void)FactIndex::fromJson(j.dump()), IndexMismatch);

  auto j2 = nlohmann::json::parse(index.toJson());
  j2["facts"].erase(0);  // drop a fact but keep the old digest
  CHECK_THROWS_AS((void)FactIndex::fromJson(j2.dump()), IndexMismatch);

  CHECK_THROWS_AS((void)FactIndex::fromJson("not json"), InvalidArgument);
  CHECK_THROWS_AS((void)FactIndex::fromJson("{\"facts\": []}"), InvalidArgument);
}

TEST_CASE("entailment vectors are the 0/1 footprint of each snapshot") {
  StreamAnalysis a(qrStream());
  FactIndex index = buildIndex(a);

  using V = std::vector<double>;
  CHECK(entailmentVector(a, 0, index) == V{1, 0, 1, 0, 0, 0, 1, 0, 1, 0, 1, 0});
  CHECK(entailmentVector(a, 1, index) == V{0, 1, 0, 1, 0, 0, 0, 1, 0, 1, 0, 1});
  V longRegime{0, 1, 0, 0, 1, 1, 0, 0, 0, 1, 0, 1};
  CHECK(entailmentVector(a, 2, index) == longRegime);
  CHECK(entailmentVector(a, 3, index) == longRegime);
  CHECK(entailmentVector(a, 4, index) == longRegime);

  CHECK_THROWS_AS((void)entailmentVector(a, 5, index), WindowOutOfRange);
  CHECK_THROWS_AS((void)entailmentVector(a, -1, index), WindowOutOfRange);
}

TEST_CASE("inconsistent snapshots entail every catalogued fact") {
  Stream s = qrStream();
  std::vector<Axiom> clash = s.snapshots[1];
  for (const auto& ax : s.snapshots[2]) clash.push_back(ax);
  s.snapshots[1] = clash;

  StreamAnalysis a(std::move(s));
  REQUIRE_FALSE(a.snapshotConsistent(1));

  // the broken snapshot contributes no catalogue entries...
  FactIndex index = buildIndex(a);
  CHECK(index.indexOf(Fact::parse("ClearedRoad(r2)")) == -1);
  CHECK(index.indexOf(Fact::parse("DisruptedRoad(r2)")) >= 0);

  // ...but reads over it as entailing everything
  std::vector<double> v = entailmentVector(a, 1, index);
  CHECK(std::all_of(v.begin(), v.end(), [](double x) { return x == 1.0; }));

  CHECK_THROWS_AS((void)consistencyEntry(a, 1, 3), InconsistentSnapshot);
  CHECK_THROWS_AS((void)consistencyVector(a, 1), InconsistentSnapshot);
}

TEST_CASE("snapshot agreement on the traffic stream") {
  StreamAnalysis a(qrStream());

  // identical regimes agree fully, disjoint compatible ones score 0, and a
  // contradiction drops the score below 0
  CHECK(consistencyEntry(a, 1, 3) == doctest::Approx(0.2 - 1.0).epsilon(kTol));
  CHECK(consistencyEntry(a, 3, 0) == doctest::Approx(0.0).epsilon(kTol));
  CHECK(consistencyEntry(a, 3, 2) == doctest::Approx(1.0).epsilon(kTol));
  CHECK(consistencyEntry(a, 0, 1) == doctest::Approx(0.0).epsilon(kTol));

  std::vector<double> c3 = consistencyVector(a, 3);
  REQUIRE(c3.size() == 4);
  CHECK(c3[0] == doctest::Approx(0.0).epsilon(kTol));
  CHECK(c3[1] == doctest::Approx(-0.8).epsilon(kTol));
  CHECK(c3[2] == doctest::Approx(1.0).epsilon(kTol));
  CHECK(c3[3] == doctest::Approx(1.0).epsilon(kTol));

  std::vector<double> c4 = consistencyVector(a, 4);
  REQUIRE(c4.size() == 5);
  CHECK(c4[1] == doctest::Approx(-0.8).epsilon(kTol));
  CHECK(c4[4] == doctest::Approx(1.0).epsilon(kTol));

  CHECK_THROWS_AS((void)consistencyEntry(a, 0, 9), WindowOutOfRange);
  CHECK_THROWS_AS((void)consistencyVector(a, 5), WindowOutOfRange);
}

TEST_CASE("agreement is symmetric, bounded, and 1 on the diagonal") {
  std::mt19937_64 rng(24601);
  int streamsChecked = 0;
  int negativeSeen = 0;
  for (int iter = 0; iter < 40 && streamsChecked < 25; ++iter) {
    CAPTURE(iter);
    Stream s = randomElStream(rng);
    StreamAnalysis a(std::move(s));
    bool allConsistent = true;
    for (int t = 0; t < a.size(); ++t)
      if (!a.snapshotConsistent(t)) allConsistent = false;
    if (!allConsistent) continue;
    ++streamsChecked;

    for (int i = 0; i < a.size(); ++i) {
      CHECK(consistencyEntry(a, i, i) == doctest::Approx(1.0).epsilon(kTol));
      for (int j = 0; j < i; ++j) {
        double e = consistencyEntry(a, i, j);
        CHECK(e == doctest::Approx(consistencyEntry(a, j, i)).epsilon(kTol));
        CHECK(e >= -1.0 - kTol);
        CHECK(e <= 1.0 + kTol);
        if (e < 0.0) ++negativeSeen;
      }
    }
  }
  CHECK(streamsChecked >= 10);
  CHECK(negativeSeen > 0);  // contradictory pairs do occur in the sample
}

TEST_CASE("every catalogued fact is entailed by some snapshot") {
  std::mt19937_64 rng(5150);
  for (int iter = 0; iter < 25; ++iter) {
    CAPTURE(iter);
    Stream s = randomElStream(rng);
    StreamAnalysis a(std::move(s));
    FactIndex index = buildIndex(a);
    CHECK(std::is_sorted(index.facts.begin(), index.facts.end()));
    CHECK(index.digest == factIndexDigest(index.facts));
    for (const auto& f : index.facts) {
      bool seen = false;
      for (int t = 0; t < a.size() && !seen; ++t)
        if (a.snapshotConsistent(t) && a.snapshotEntails(t, f)) seen = true;
      CHECK(seen);
    }
  }
}
