#include "ontostream/embeddings.hpp"

#include <algorithm>
#include <iterator>
#include <set>

#include "json.hpp"
#include "ontostream/errors.hpp"

namespace ontostream {

namespace {

// Dynamic view: everything a snapshot adds on top of the background.
constexpr UniverseSpec kDynamic{FactScope::ClassAndRole, false, false};
// Class-level view used for snapshot agreement.
constexpr UniverseSpec kClassOnly{FactScope::ClassOnly, false, false};

void checkSnapshotId(const StreamAnalysis& a, int t) {
  if (t < 0 || t >= a.size())
    throw WindowOutOfRange("snapshot " + std::to_string(t) + " outside stream of size " +
                           std::to_string(a.size()));
}

}  // namespace

int FactIndex::indexOf(const Fact& f) const {
  auto it = std::lower_bound(facts.begin(), facts.end(), f);
  if (it == facts.end() || *it != f) return -1;
  return static_cast<int>(it - facts.begin());
}

std::string FactIndex::toJson() const {
  nlohmann::ordered_json j;
  j["facts"] = nlohmann::ordered_json::array();
  for (const auto& f : facts) j["facts"].push_back(f.text());
  j["digest"] = digest;
  return j.dump(2);
}

FactIndex FactIndex::fromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed fact index document: ") + e.what());
  }
  if (!j.is_object() || !j.contains("facts") || !j.contains("digest"))
    throw InvalidArgument("fact index document needs 'facts' and 'digest'");
  FactIndex index;
  for (const auto& entry : j["facts"]) index.facts.push_back(Fact::parse(entry.get<std::string>()));
  if (!std::is_sorted(index.facts.begin(), index.facts.end()))
    throw InvalidArgument("fact index entries must be in ascending order");
  index.digest = factIndexDigest(index.facts);
  if (index.digest != j["digest"].get<std::string>())
    throw IndexMismatch("fact index digest " + j["digest"].get<std::string>() +
                        " does not match its facts (expected " + index.digest + ")");
  return index;
}

std::string factIndexDigest(const std::vector<Fact>& facts) {
  std::uint64_t h = fnv1a("");
  for (const auto& f : facts) {
    h = fnv1a(f.text(), h);
    h = fnv1a("\n", h);
  }
  return hex64(h);
}

namespace {

FactIndex buildIndexImpl(const StreamAnalysis& a, const Fact* exclude) {
  std::set<Fact> pool;
  for (int t = 0; t < a.size(); ++t) {
    if (!a.snapshotConsistent(t)) continue;
    std::set<Fact> u = a.universe(Window{t, t}, kDynamic);
    pool.insert(u.begin(), u.end());
  }
  if (exclude) pool.erase(*exclude);
  FactIndex index;
  index.facts.assign(pool.begin(), pool.end());
  index.digest = factIndexDigest(index.facts);
  return index;
}

}  // namespace

FactIndex buildIndex(const StreamAnalysis& a) { return buildIndexImpl(a, nullptr); }

FactIndex buildIndex(const StreamAnalysis& a, const Fact& exclude) {
  return buildIndexImpl(a, &exclude);
}

std::vector<double> entailmentVector(const StreamAnalysis& a, int t, const FactIndex& index) {
  checkSnapshotId(a, t);
  std::vector<double> v(index.facts.size(), 0.0);
  for (std::size_t k = 0; k < index.facts.size(); ++k)
    v[k] = a.snapshotEntails(t, index.facts[k]) ? 1.0 : 0.0;
  return v;
}

double consistencyEntry(const StreamAnalysis& a, int i, int j) {
  checkSnapshotId(a, i);
  checkSnapshotId(a, j);
  for (int t : {i, j})
    if (!a.snapshotConsistent(t))
      throw InconsistentSnapshot("snapshot " + std::to_string(t) +
                                 " is self-contradictory; agreement is undefined");

  std::set<Fact> ui = a.universe(Window{i, i}, kClassOnly);
  std::set<Fact> uj = a.universe(Window{j, j}, kClassOnly);
  std::set<Fact> shared;
  std::set_intersection(ui.begin(), ui.end(), uj.begin(), uj.end(),
                        std::inserter(shared, shared.begin()));
  std::size_t total = ui.size() + uj.size() - shared.size();
  double ratio;
  if (total == 0)
    ratio = (i == j) ? 1.0 : 0.0;
  else
    ratio = static_cast<double>(shared.size()) / static_cast<double>(total);
  if (!a.pairConsistent(i, j)) ratio -= 1.0;
  return ratio;
}

std::vector<double> consistencyVector(const StreamAnalysis& a, int i) {
  checkSnapshotId(a, i);
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(i) + 1);
  for (int j = 0; j <= i; ++j) v.push_back(consistencyEntry(a, i, j));
  return v;
}

}  // namespace ontostream
