#include "ontostream/capi.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ontostream/drift.hpp"
#include "ontostream/embeddings.hpp"
#include "ontostream/errors.hpp"
#include "ontostream/harness.hpp"
#include "ontostream/learner.hpp"
#include "ontostream/ontoformat.hpp"
#include "ontostream/stream.hpp"

using nlohmann::ordered_json;
namespace onto = ontostream;

struct ost_stream {
  onto::Stream stream;
  std::optional<onto::StreamAnalysis> analysis;

  onto::StreamAnalysis& ensure() {
    if (!analysis) analysis.emplace(onto::Stream(stream));
    return *analysis;
  }
};

struct ost_model {
  onto::LinearModel model;
};

namespace {

std::string& lastError() {
  thread_local std::string message;
  return message;
}

ost_status fail(ost_status status, const std::string& message) {
  lastError() = message;
  return status;
}

// Runs `fn` and maps the library's exception hierarchy onto status codes.
template <typename F>
ost_status guarded(F&& fn) {
  lastError().clear();
  try {
    fn();
    return OST_OK;
  } catch (const onto::ParseError& e) {
    return fail(OST_ERR_PARSE, e.what());
  } catch (const onto::IoError& e) {
    return fail(OST_ERR_IO, e.what());
  } catch (const onto::InfeasibleScenario& e) {
    return fail(OST_ERR_INFEASIBLE, e.what());
  } catch (const onto::InvalidArgument& e) {
    return fail(OST_ERR_INVALID, e.what());
  } catch (const onto::WindowOutOfRange& e) {
    return fail(OST_ERR_INVALID, e.what());
  } catch (const onto::UnsupportedAxiom& e) {
    return fail(OST_ERR_INVALID, e.what());
  } catch (const onto::Error& e) {
    return fail(OST_ERR_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(OST_ERR_INTERNAL, e.what());
  }
}

void require(const void* ptr, const char* name) {
  if (ptr == nullptr) throw onto::InvalidArgument(std::string(name) + " must not be null");
}

char* dupString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void checkFormat(ost_format format) {
  if (format != OST_FORMAT_JSON && format != OST_FORMAT_CSV && format != OST_FORMAT_TEXT)
    throw onto::InvalidArgument("unknown output format " + std::to_string(format));
}

void checkSnapshot(const onto::Stream& s, int t) {
  if (t < 0 || t >= s.size())
    throw onto::InvalidArgument("snapshot " + std::to_string(t) + " out of range [0, " +
                                std::to_string(s.size()) + ")");
}

onto::WeightingMode toWeighting(int mode) {
  switch (mode) {
    case OST_WEIGHT_UNIFORM: return onto::WeightingMode::Uniform;
    case OST_WEIGHT_CONSISTENT: return onto::WeightingMode::Consistent;
    case OST_WEIGHT_INCONSISTENT: return onto::WeightingMode::Inconsistent;
    default: throw onto::InvalidArgument("unknown weighting mode " + std::to_string(mode));
  }
}

onto::LossKind toLoss(int loss) {
  switch (loss) {
    case OST_LOSS_LOGISTIC: return onto::LossKind::Logistic;
    case OST_LOSS_HINGE: return onto::LossKind::Hinge;
    default: throw onto::InvalidArgument("unknown loss kind " + std::to_string(loss));
  }
}

onto::DriftOptions toDriftOptions(const ost_drift_options* opt) {
  onto::DriftOptions options;
  if (opt != nullptr) {
    options.epsilon = opt->epsilon;
    options.sigmaMin = opt->sigma_min;
    options.useChangeGuard = opt->use_change_guard != 0;
  }
  return options;
}

std::vector<std::string> splitList(const char* csv) {
  std::vector<std::string> items;
  if (csv == nullptr) return items;
  std::string token;
  std::stringstream in(csv);
  while (std::getline(in, token, ',')) {
    const auto begin = token.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = token.find_last_not_of(" \t");
    items.push_back(token.substr(begin, end - begin + 1));
  }
  return items;
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw onto::IoError("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw onto::IoError("cannot write " + path);
  out << text;
  if (!out) throw onto::IoError("cannot write " + path);
}

onto::Stream streamFromDocuments(const onto::Document& stream, const onto::Document* ontology) {
  if (ontology == nullptr) return onto::Stream::fromDocument(stream);
  return onto::Stream::fromDocument(onto::mergeDocuments(*ontology, stream));
}

// --- report rendering ---

ordered_json snapshotSummary(onto::StreamAnalysis& a, int t) {
  ordered_json j;
  j["snapshot"] = t;
  const bool consistent = a.snapshotConsistent(t);
  j["consistent"] = consistent;
  j["factCount"] = consistent ? static_cast<int>(a.snapshotFacts(t).size()) : 0;
  return j;
}

std::string renderReason(onto::StreamAnalysis& a, int snapshot, ost_format format) {
  const int n = a.size();
  if (snapshot >= 0) {
    const bool consistent = a.snapshotConsistent(snapshot);
    std::vector<std::string> facts;
    if (consistent)
      for (const auto& f : a.snapshotFacts(snapshot)) facts.push_back(f.text());
    switch (format) {
      case OST_FORMAT_JSON: {
        ordered_json j = snapshotSummary(a, snapshot);
        j["facts"] = facts;
        return j.dump(2);
      }
      case OST_FORMAT_CSV: {
        std::ostringstream out;
        out << "snapshot,consistent,factCount\n";
        out << snapshot << ',' << (consistent ? "true" : "false") << ',' << facts.size() << '\n';
        return out.str();
      }
      default: {
        std::ostringstream out;
        out << "snapshot " << snapshot << ": "
            << (consistent ? "consistent" : "inconsistent") << ", " << facts.size()
            << " entailed facts\n";
        for (const auto& f : facts) out << "  " << f << '\n';
        return out.str();
      }
    }
  }

  int consistentCount = 0;
  std::vector<int> inconsistent;
  int prefixThrough = -1;
  for (int t = 0; t < n; ++t) {
    if (a.snapshotConsistent(t))
      ++consistentCount;
    else
      inconsistent.push_back(t);
    if (a.prefixConsistent(t)) prefixThrough = t;
  }
  switch (format) {
    case OST_FORMAT_JSON: {
      ordered_json j;
      j["snapshots"] = n;
      j["consistentSnapshots"] = consistentCount;
      j["inconsistentSnapshots"] = inconsistent;
      j["prefixConsistentThrough"] = prefixThrough;
      j["backgroundFactCount"] = static_cast<int>(a.backgroundFacts().size());
      j["perSnapshot"] = ordered_json::array();
      for (int t = 0; t < n; ++t) j["perSnapshot"].push_back(snapshotSummary(a, t));
      return j.dump(2);
    }
    case OST_FORMAT_CSV: {
      std::ostringstream out;
      out << "snapshot,consistent,factCount\n";
      for (int t = 0; t < n; ++t) {
        const bool c = a.snapshotConsistent(t);
        out << t << ',' << (c ? "true" : "false") << ','
            << (c ? a.snapshotFacts(t).size() : 0) << '\n';
      }
      return out.str();
    }
    default: {
      std::ostringstream out;
      out << "snapshots: " << n << '\n';
      out << "consistent: " << consistentCount << '/' << n << '\n';
      out << "prefix consistent through: " << prefixThrough << '\n';
      for (int t = 0; t < n; ++t) {
        const bool c = a.snapshotConsistent(t);
        out << "snapshot " << t << ": " << (c ? "consistent" : "inconsistent") << ", "
            << (c ? a.snapshotFacts(t).size() : 0) << " entailed facts\n";
      }
      return out.str();
    }
  }
}

std::string renderChanges(const onto::Window& before, const onto::Window& after,
                          const onto::ChangeSet& delta, ost_format format) {
  const auto texts = [](const std::set<onto::Fact>& facts) {
    std::vector<std::string> out;
    for (const auto& f : facts) out.push_back(f.text());
    return out;
  };
  switch (format) {
    case OST_FORMAT_JSON: {
      ordered_json j;
      j["before"] = {{"from", before.from}, {"to", before.to}};
      j["after"] = {{"from", after.from}, {"to", after.to}};
      j["new"] = texts(delta.newFacts);
      j["obsolete"] = texts(delta.obsoleteFacts);
      j["invariant"] = texts(delta.invariantFacts);
      return j.dump(2);
    }
    case OST_FORMAT_CSV: {
      std::ostringstream out;
      out << "kind,fact\n";
      for (const auto& f : delta.newFacts) out << "new," << f.text() << '\n';
      for (const auto& f : delta.obsoleteFacts) out << "obsolete," << f.text() << '\n';
      for (const auto& f : delta.invariantFacts) out << "invariant," << f.text() << '\n';
      return out.str();
    }
    default: {
      std::ostringstream out;
      out << "before [" << before.from << "," << before.to << "] vs after [" << after.from
          << "," << after.to << "]\n";
      const auto section = [&out](const char* name, const std::set<onto::Fact>& facts) {
        out << name << " (" << facts.size() << "):\n";
        for (const auto& f : facts) out << "  " << f.text() << '\n';
      };
      section("new", delta.newFacts);
      section("obsolete", delta.obsoleteFacts);
      section("invariant", delta.invariantFacts);
      return out.str();
    }
  }
}

std::string renderDrift(const onto::DriftReport& report, ost_format format) {
  switch (format) {
    case OST_FORMAT_JSON: return report.toJson();
    case OST_FORMAT_CSV: return report.toCsv();
    default: {
      std::ostringstream out;
      out << "snapshots: " << report.snapshots << ", pairs scanned: " << report.pairs.size()
          << ", drifts: " << report.drifts.size() << '\n';
      for (const auto& d : report.drifts) {
        out << "drift (" << d.from << "," << d.to << "): significance " << d.significance
            << ", evidence " << d.evidence.size() << ", witness " << d.witness.text() << '\n';
      }
      return out.str();
    }
  }
}

std::string renderEval(const onto::EvalReport& report, ost_format format) {
  switch (format) {
    case OST_FORMAT_JSON: return report.toJson();
    case OST_FORMAT_CSV: return report.toCsv();
    default: {
      std::ostringstream out;
      out << "train snapshots: " << report.trainSnapshots
          << ", test points: " << report.testPoints << ", " << report.runtimeMillis << " ms\n";
      for (const auto& m : report.methods) {
        out << m.name << ": accuracy " << m.accuracy << " (" << m.correct << '/' << m.total
            << ')';
        if (m.untrainedHeads > 0) out << ", untrained heads " << m.untrainedHeads;
        out << ", " << m.runtimeMillis << " ms\n";
      }
      return out.str();
    }
  }
}

}  // namespace

extern "C" {

const char* ost_last_error(void) { return lastError().c_str(); }

const char* ost_version(void) { return "1.0.0"; }

void ost_string_free(char* text) { std::free(text); }

void ost_drift_options_init(ost_drift_options* opt) {
  if (opt == nullptr) return;
  onto::DriftOptions defaults;
  opt->epsilon = defaults.epsilon;
  opt->sigma_min = defaults.sigmaMin;
  opt->use_change_guard = defaults.useChangeGuard ? 1 : 0;
}

void ost_scenario_options_init(ost_scenario_options* opt) {
  if (opt == nullptr) return;
  onto::ScenarioConfig defaults;
  opt->roads = defaults.roads;
  opt->horizon_snapshots = defaults.horizonSnapshots;
  opt->drift_fraction = defaults.driftFraction;
  opt->drift_severity = defaults.driftSeverity;
  opt->seed = defaults.seed;
  opt->classes = defaults.classes;
}

void ost_train_options_init(ost_train_options* opt) {
  if (opt == nullptr) return;
  onto::TrainOptions defaults;
  opt->reference = defaults.reference;
  opt->delta = defaults.delta;
  opt->kappa = defaults.kappa;
  opt->budget = defaults.budget;
  opt->weighting = OST_WEIGHT_UNIFORM;
  opt->loss = OST_LOSS_LOGISTIC;
  opt->learning_rate = defaults.learningRate;
  opt->epochs = defaults.epochs;
  opt->l2 = defaults.l2;
  opt->seed = defaults.seed;
  ost_drift_options_init(&opt->drift);
}

void ost_eval_options_init(ost_eval_options* opt) {
  if (opt == nullptr) return;
  onto::EvalOptions defaults;
  opt->methods = nullptr;
  opt->train_fraction = defaults.trainFraction;
  opt->delta = defaults.delta;
  opt->classes = defaults.classes;
  opt->class_prefix = nullptr;
  opt->entities = nullptr;
  opt->weighting = OST_WEIGHT_UNIFORM;
  opt->kappa = defaults.kappa;
  opt->budget = defaults.budget;
  ost_drift_options_init(&opt->drift);
  opt->learning_rate = defaults.learningRate;
  opt->epochs = defaults.epochs;
  opt->l2 = defaults.l2;
  opt->seed = defaults.seed;
  opt->sliding_window = defaults.slidingWindow;
}

ost_status ost_stream_open(const char* stream_path, const char* ontology_path,
                           ost_stream** out) {
  return guarded([&] {
    require(stream_path, "stream_path");
    require(out, "out");
    const onto::Document streamDoc = onto::loadDocument(stream_path);
    std::optional<onto::Document> ontologyDoc;
    if (ontology_path != nullptr && *ontology_path != '\0')
      ontologyDoc = onto::loadDocument(ontology_path);
    auto handle = std::make_unique<ost_stream>();
    handle->stream =
        streamFromDocuments(streamDoc, ontologyDoc ? &*ontologyDoc : nullptr);
    *out = handle.release();
  });
}

ost_status ost_stream_parse(const char* stream_text, const char* ontology_text,
                            ost_stream** out) {
  return guarded([&] {
    require(stream_text, "stream_text");
    require(out, "out");
    const onto::Document streamDoc = onto::parseDocument(stream_text);
    std::optional<onto::Document> ontologyDoc;
    if (ontology_text != nullptr && *ontology_text != '\0')
      ontologyDoc = onto::parseDocument(ontology_text);
    auto handle = std::make_unique<ost_stream>();
    handle->stream =
        streamFromDocuments(streamDoc, ontologyDoc ? &*ontologyDoc : nullptr);
    *out = handle.release();
  });
}

ost_status ost_stream_generate(const ost_scenario_options* opt, ost_stream** out,
                               char** report_json) {
  return guarded([&] {
    require(opt, "opt");
    require(out, "out");
    onto::ScenarioConfig cfg;
    cfg.roads = opt->roads;
    cfg.horizonSnapshots = opt->horizon_snapshots;
    cfg.driftFraction = opt->drift_fraction;
    cfg.driftSeverity = opt->drift_severity;
    cfg.seed = opt->seed;
    cfg.classes = opt->classes;
    onto::GenerationReport report = onto::generateWithReport(cfg);
    if (report_json != nullptr) {
      ordered_json j;
      j["snapshots"] = report.stream.size();
      j["driftTimes"] = report.driftTimes;
      j["realizedDriftFraction"] = report.realizedDriftFraction;
      j["minSignificance"] = report.minSignificance;
      j["incidentsPerDrift"] = report.incidentsPerDrift;
      j["attempts"] = report.attempts;
      *report_json = dupString(j.dump(2));
    }
    auto handle = std::make_unique<ost_stream>();
    handle->stream = std::move(report.stream);
    *out = handle.release();
  });
}

void ost_stream_free(ost_stream* s) { delete s; }

int ost_stream_size(const ost_stream* s) { return s == nullptr ? 0 : s->stream.size(); }

ost_status ost_stream_document(const ost_stream* s, char** text_out) {
  return guarded([&] {
    require(s, "stream");
    require(text_out, "text_out");
    *text_out = dupString(onto::serializeDocument(s->stream.toDocument()));
  });
}

ost_status ost_stream_save(const ost_stream* s, const char* path) {
  return guarded([&] {
    require(s, "stream");
    require(path, "path");
    onto::saveDocument(s->stream.toDocument(), path);
  });
}

ost_status ost_stream_reason(ost_stream* s, int snapshot, ost_format format, char** out) {
  return guarded([&] {
    require(s, "stream");
    require(out, "out");
    checkFormat(format);
    if (snapshot != -1) checkSnapshot(s->stream, snapshot);
    *out = dupString(renderReason(s->ensure(), snapshot, format));
  });
}

ost_status ost_stream_changes(ost_stream* s, int before_from, int before_to, int after_from,
                              int after_to, ost_format format, char** out) {
  return guarded([&] {
    require(s, "stream");
    require(out, "out");
    checkFormat(format);
    const onto::Window before(before_from, before_to);
    const onto::Window after(after_from, after_to);
    const onto::ChangeSet delta = s->ensure().changes(before, after);
    *out = dupString(renderChanges(before, after, delta, format));
  });
}

ost_status ost_stream_drift(ost_stream* s, const ost_drift_options* opt, ost_format format,
                            char** out) {
  return guarded([&] {
    require(s, "stream");
    require(out, "out");
    checkFormat(format);
    const onto::DriftReport report = onto::significantDrifts(s->ensure(), toDriftOptions(opt));
    *out = dupString(renderDrift(report, format));
  });
}

ost_status ost_stream_embed(ost_stream* s, int snapshot, const char* exclude_fact,
                            char** json_out) {
  return guarded([&] {
    require(s, "stream");
    require(json_out, "json_out");
    checkSnapshot(s->stream, snapshot);
    onto::StreamAnalysis& a = s->ensure();
    const onto::FactIndex index = (exclude_fact != nullptr && *exclude_fact != '\0')
                                      ? onto::buildIndex(a, onto::Fact::parse(exclude_fact))
                                      : onto::buildIndex(a);
    const std::vector<double> entailment = onto::entailmentVector(a, snapshot, index);
    const std::vector<double> agreement = onto::consistencyVector(a, snapshot);
    ordered_json j;
    j["snapshot"] = snapshot;
    j["digest"] = index.digest;
    j["facts"] = ordered_json::array();
    for (const auto& f : index.facts) j["facts"].push_back(f.text());
    j["entailment"] = ordered_json::array();
    for (double v : entailment) j["entailment"].push_back(static_cast<int>(v));
    j["consistency"] = agreement;
    *json_out = dupString(j.dump(2));
  });
}

ost_status ost_stream_train(ost_stream* s, const char* target_fact,
                            const ost_train_options* opt, ost_model** out) {
  return guarded([&] {
    require(s, "stream");
    require(target_fact, "target_fact");
    require(opt, "opt");
    require(out, "out");
    onto::TrainOptions topts;
    topts.reference = opt->reference;
    topts.delta = opt->delta;
    topts.kappa = opt->kappa;
    topts.budget = opt->budget;
    topts.weighting = toWeighting(opt->weighting);
    topts.loss = toLoss(opt->loss);
    topts.learningRate = opt->learning_rate;
    topts.epochs = opt->epochs;
    topts.l2 = opt->l2;
    topts.seed = opt->seed;
    topts.drift = toDriftOptions(&opt->drift);
    const onto::Fact target = onto::Fact::parse(target_fact);
    auto handle = std::make_unique<ost_model>();
    handle->model = onto::train(s->ensure(), target, topts);
    *out = handle.release();
  });
}

ost_status ost_stream_evaluate(ost_stream* s, const ost_eval_options* opt, ost_format format,
                               char** out) {
  return guarded([&] {
    require(s, "stream");
    require(opt, "opt");
    require(out, "out");
    checkFormat(format);
    onto::EvalOptions eopts;
    eopts.methods = splitList(opt->methods);
    eopts.trainFraction = opt->train_fraction;
    eopts.delta = opt->delta;
    eopts.classes = opt->classes;
    if (opt->class_prefix != nullptr && *opt->class_prefix != '\0')
      eopts.classPrefix = opt->class_prefix;
    eopts.entities = splitList(opt->entities);
    eopts.weighting = toWeighting(opt->weighting);
    eopts.kappa = opt->kappa;
    eopts.budget = opt->budget;
    eopts.drift = toDriftOptions(&opt->drift);
    eopts.learningRate = opt->learning_rate;
    eopts.epochs = opt->epochs;
    eopts.l2 = opt->l2;
    eopts.seed = opt->seed;
    eopts.slidingWindow = opt->sliding_window;
    const onto::EvalReport report = onto::evaluate(s->stream, eopts);
    *out = dupString(renderEval(report, format));
  });
}

ost_status ost_model_parse(const char* json_text, ost_model** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    auto handle = std::make_unique<ost_model>();
    handle->model = onto::LinearModel::fromJson(json_text);
    *out = handle.release();
  });
}

ost_status ost_model_open(const char* path, ost_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto handle = std::make_unique<ost_model>();
    handle->model = onto::LinearModel::fromJson(readFile(path));
    *out = handle.release();
  });
}

ost_status ost_model_json(const ost_model* m, char** json_out) {
  return guarded([&] {
    require(m, "model");
    require(json_out, "json_out");
    *json_out = dupString(m->model.toJson());
  });
}

ost_status ost_model_save(const ost_model* m, const char* path) {
  return guarded([&] {
    require(m, "model");
    require(path, "path");
    writeFile(path, m->model.toJson());
  });
}

ost_status ost_model_predict(const ost_model* m, ost_stream* s, int snapshot, int* label_out,
                             double* decision_out) {
  return guarded([&] {
    require(m, "model");
    require(s, "stream");
    require(label_out, "label_out");
    checkSnapshot(s->stream, snapshot);
    onto::StreamAnalysis& a = s->ensure();
    const onto::FactIndex index = onto::buildIndex(a, m->model.target);
    if (index.digest != m->model.indexDigest)
      throw onto::IndexMismatch("stream catalogue digest " + index.digest +
                                " does not match model digest " + m->model.indexDigest);
    const std::vector<double> features = onto::entailmentVector(a, snapshot, index);
    const double decision = onto::decisionValue(m->model, features);
    *label_out = decision >= 0.0 ? 1 : 0;
    if (decision_out != nullptr) *decision_out = decision;
  });
}

void ost_model_free(ost_model* m) { delete m; }

}  // extern "C"
