// Command-line front end for the ontostream library. Everything substantive
// goes through the C API; this file only parses arguments and moves bytes.

#include <cctype>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ontostream/capi.h"

namespace {

// Exit codes: 0 success, 1 usage, 2 data error, 3 infeasible scenario.
int exitCodeFor(ost_status status) {
  switch (status) {
    case OST_OK:
      return 0;
    case OST_ERR_INVALID:
      return 1;
    case OST_ERR_INFEASIBLE:
      return 3;
    default:
      return 2;
  }
}

int failWith(ost_status status) {
  std::cerr << "error: " << ost_last_error() << '\n';
  return exitCodeFor(status);
}

struct StreamGuard {
  ost_stream* s = nullptr;
  ~StreamGuard() { ost_stream_free(s); }
};

struct TextGuard {
  char* p = nullptr;
  ~TextGuard() { ost_string_free(p); }
  std::string str() const { return p == nullptr ? std::string() : std::string(p); }
};

struct ModelGuard {
  ost_model* m = nullptr;
  ~ModelGuard() { ost_model_free(m); }
};

ost_format formatFromName(const std::string& name) {
  if (name == "csv") return OST_FORMAT_CSV;
  if (name == "text") return OST_FORMAT_TEXT;
  return OST_FORMAT_JSON;
}

int weightingFromName(const std::string& name) {
  if (name == "consistent") return OST_WEIGHT_CONSISTENT;
  if (name == "inconsistent") return OST_WEIGHT_INCONSISTENT;
  return OST_WEIGHT_UNIFORM;
}

int lossFromName(const std::string& name) {
  return name == "hinge" ? OST_LOSS_HINGE : OST_LOSS_LOGISTIC;
}

int writeOutput(const std::string& text, const std::string& outPath) {
  if (outPath.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return 0;
  }
  std::ofstream out(outPath, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << outPath << '\n';
    return 2;
  }
  out << text;
  return out ? 0 : 2;
}

int openStream(const std::string& streamPath, const std::string& ontologyPath,
               StreamGuard& guard) {
  const ost_status status = ost_stream_open(
      streamPath.c_str(), ontologyPath.empty() ? nullptr : ontologyPath.c_str(), &guard.s);
  return status == OST_OK ? 0 : failWith(status);
}

// Accepts "A:B" (window) or "A" (single snapshot).
bool parseWindow(const std::string& spec, int& from, int& to) {
  const auto number = [](const std::string& s, int& value) {
    if (s.empty()) return false;
    for (char c : s)
      if (std::isdigit(static_cast<unsigned char>(c)) == 0) return false;
    value = std::stoi(s);
    return true;
  };
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    if (!number(spec, from)) return false;
    to = from;
    return true;
  }
  return number(spec.substr(0, colon), from) && number(spec.substr(colon + 1), to);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ontology-stream reasoning, drift analysis, and forecasting"};
  app.require_subcommand(1);

  ost_drift_options driftDefaults;
  ost_drift_options_init(&driftDefaults);
  ost_scenario_options scenario;
  ost_scenario_options_init(&scenario);
  ost_train_options trainOpt;
  ost_train_options_init(&trainOpt);
  ost_eval_options evalDefaults;
  ost_eval_options_init(&evalDefaults);

  std::string streamPath;
  std::string ontologyPath;
  std::string outPath;
  std::string formatName = "json";
  std::string fromSpec;
  std::string toSpec;
  std::string target;
  std::string modelPath;
  std::string excludeFact;
  std::string methods;
  std::string entities;
  std::string classPrefix = "Condition";
  std::string modeName = "uniform";
  std::string lossName = "logistic";
  std::string reportPath;
  int snapshot = -1;
  double epsilon = driftDefaults.epsilon;
  double sigmaMin = driftDefaults.sigma_min;
  bool noChangeGuard = false;
  double kappa = trainOpt.kappa;
  int trainBudget = trainOpt.budget;
  int evalBudget = evalDefaults.budget;
  double trainFraction = evalDefaults.train_fraction;
  int delta = 1;
  int classes = evalDefaults.classes;
  double learningRate = trainOpt.learning_rate;
  int epochs = trainOpt.epochs;
  double l2 = trainOpt.l2;
  std::uint64_t seed = 1;
  int slidingWindow = evalDefaults.sliding_window;

  const auto addStreamOptions = [&](CLI::App* cmd) {
    cmd->add_option("--stream", streamPath, "stream document")->required();
    cmd->add_option("--ontology", ontologyPath, "separate background ontology document");
  };
  const auto addFormatOptions = [&](CLI::App* cmd) {
    cmd->add_option("--format", formatName, "output format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    cmd->add_option("--out", outPath, "write the report to a file instead of stdout");
  };
  const auto addDriftOptions = [&](CLI::App* cmd) {
    cmd->add_option("--epsilon", epsilon, "prediction-change threshold");
    cmd->add_option("--sigma-min", sigmaMin, "significance cutoff");
    cmd->add_flag("--no-change-guard", noChangeGuard, "disable the driftless-update skip");
  };
  const auto addSgdOptions = [&](CLI::App* cmd) {
    cmd->add_option("--kappa", kappa, "budget share reserved for drift snapshots");
    cmd->add_option("--mode", modeName, "sample weighting")
        ->check(CLI::IsMember({"uniform", "consistent", "inconsistent"}));
    cmd->add_option("--delta", delta, "forecast horizon in snapshots");
    cmd->add_option("--learning-rate", learningRate, "SGD step size");
    cmd->add_option("--epochs", epochs, "SGD passes over the samples");
    cmd->add_option("--l2", l2, "ridge penalty strength");
    cmd->add_option("--seed", seed, "random seed");
  };

  CLI::App* reason = app.add_subcommand("reason", "consistency and entailment report");
  addStreamOptions(reason);
  reason->add_option("--snapshot", snapshot, "snapshot to inspect (default: whole stream)");
  addFormatOptions(reason);

  CLI::App* diff = app.add_subcommand("diff", "entailment changes between two windows");
  addStreamOptions(diff);
  diff->add_option("--from", fromSpec, "before window, A:B or single snapshot")->required();
  diff->add_option("--to", toSpec, "after window, A:B or single snapshot")->required();
  addFormatOptions(diff);

  CLI::App* drift = app.add_subcommand("drift", "scan for significant sudden drift");
  addStreamOptions(drift);
  addDriftOptions(drift);
  addFormatOptions(drift);

  CLI::App* embed = app.add_subcommand("embed", "entailment and agreement vectors");
  addStreamOptions(embed);
  embed->add_option("--snapshot", snapshot, "snapshot to embed")->required();
  embed->add_option("--exclude", excludeFact, "fact left out of the catalogue");
  embed->add_option("--out", outPath, "write the JSON to a file instead of stdout");

  CLI::App* train = app.add_subcommand("train", "fit a drift-aware fact forecaster");
  addStreamOptions(train);
  train->add_option("--target", target, "fact to forecast, e.g. 'Busy(road0)'")->required();
  train->add_option("--reference", trainOpt.reference,
                    "snapshot the forecast is anchored at (-1: last)");
  train->add_option("--budget", trainBudget, "max training snapshots");
  train->add_option("--loss", lossName, "training loss")
      ->check(CLI::IsMember({"logistic", "hinge"}));
  addSgdOptions(train);
  addDriftOptions(train);
  train->add_option("--out", outPath, "write the model JSON to a file instead of stdout");

  CLI::App* predict = app.add_subcommand("predict", "apply a saved model at a snapshot");
  addStreamOptions(predict);
  predict->add_option("--model", modelPath, "model JSON file")->required();
  predict->add_option("--snapshot", snapshot, "snapshot to predict from")->required();
  addFormatOptions(predict);

  CLI::App* generate = app.add_subcommand("generate", "synthesize a road-traffic benchmark");
  generate->add_option("--roads", scenario.roads, "observed roads");
  generate->add_option("--snapshots", scenario.horizon_snapshots, "stream length");
  generate->add_option("--drift-fraction", scenario.drift_fraction,
                       "share of updates that drift");
  generate->add_option("--drift-severity", scenario.drift_severity,
                       "target significance per drift");
  generate->add_option("--classes", scenario.classes, "delay regimes / label classes");
  generate->add_option("--seed", scenario.seed, "random seed");
  generate->add_option("--out", outPath, "write the stream document to a file");
  generate->add_option("--report", reportPath, "write the generation report JSON to a file");

  CLI::App* evaluate = app.add_subcommand("evaluate", "compare forecasting methods");
  addStreamOptions(evaluate);
  evaluate->add_option("--methods", methods, "comma-separated subset of methods");
  evaluate->add_option("--train-fraction", trainFraction, "chronological split point");
  evaluate->add_option("--classes", classes, "label classes");
  evaluate->add_option("--class-prefix", classPrefix, "class k reads <prefix><k>");
  evaluate->add_option("--entities", entities, "comma-separated entities to score");
  evaluate->add_option("--budget", evalBudget, "max training snapshots per model");
  evaluate->add_option("--window", slidingWindow, "sliding majority window");
  addSgdOptions(evaluate);
  addDriftOptions(evaluate);
  addFormatOptions(evaluate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  ost_drift_options driftOpt = driftDefaults;
  driftOpt.epsilon = epsilon;
  driftOpt.sigma_min = sigmaMin;
  driftOpt.use_change_guard = noChangeGuard ? 0 : 1;

  if (reason->parsed()) {
    StreamGuard s;
    if (int rc = openStream(streamPath, ontologyPath, s)) return rc;
    TextGuard out;
    const ost_status status =
        ost_stream_reason(s.s, snapshot, formatFromName(formatName), &out.p);
    if (status != OST_OK) return failWith(status);
    return writeOutput(out.str(), outPath);
  }

  if (diff->parsed()) {
    int beforeFrom = 0, beforeTo = 0, afterFrom = 0, afterTo = 0;
    if (!parseWindow(fromSpec, beforeFrom, beforeTo) ||
        !parseWindow(toSpec, afterFrom, afterTo)) {
      std::cerr << "error: windows must be given as A:B or a single snapshot\n";
      return 1;
    }
    StreamGuard s;
    if (int rc = openStream(streamPath, ontologyPath, s)) return rc;
    TextGuard out;
    const ost_status status = ost_stream_changes(s.s, beforeFrom, beforeTo, afterFrom,
                                                 afterTo, formatFromName(formatName), &out.p);
    if (status != OST_OK) return failWith(status);
    return writeOutput(out.str(), outPath);
  }

  if (drift->parsed()) {
    StreamGuard s;
    if (int rc = openStream(streamPath, ontologyPath, s)) return rc;
    TextGuard out;
    const ost_status status =
        ost_stream_drift(s.s, &driftOpt, formatFromName(formatName), &out.p);
    if (status != OST_OK) return failWith(status);
    return writeOutput(out.str(), outPath);
  }

  if (embed->parsed()) {
    StreamGuard s;
    if (int rc = openStream(streamPath, ontologyPath, s)) return rc;
    TextGuard out;
    const ost_status status = ost_stream_embed(
        s.s, snapshot, excludeFact.empty() ? nullptr : excludeFact.c_str(), &out.p);
    if (status != OST_OK) return failWith(status);
    return writeOutput(out.str(), outPath);
  }

  if (train->parsed()) {
    StreamGuard s;
    if (int rc = openStream(streamPath, ontologyPath, s)) return rc;
    trainOpt.delta = delta;
    trainOpt.kappa = kappa;
    trainOpt.budget = trainBudget;
    trainOpt.weighting = weightingFromName(modeName);
    trainOpt.loss = lossFromName(lossName);
    trainOpt.learning_rate = learningRate;
    trainOpt.epochs = epochs;
    trainOpt.l2 = l2;
    trainOpt.seed = seed;
    trainOpt.drift = driftOpt;
    ModelGuard model;
    ost_status status = ost_stream_train(s.s, target.c_str(), &trainOpt, &model.m);
    if (status != OST_OK) return failWith(status);
    if (!outPath.empty()) {
      status = ost_model_save(model.m, outPath.c_str());
      return status == OST_OK ? 0 : failWith(status);
    }
    TextGuard json;
    status = ost_model_json(model.m, &json.p);
    if (status != OST_OK) return failWith(status);
    return writeOutput(json.str(), "");
  }

  if (predict->parsed()) {
    StreamGuard s;
    if (int rc = openStream(streamPath, ontologyPath, s)) return rc;
    ModelGuard model;
    ost_status status = ost_model_open(modelPath.c_str(), &model.m);
    if (status != OST_OK) return failWith(status);
    int label = 0;
    double decision = 0.0;
    status = ost_model_predict(model.m, s.s, snapshot, &label, &decision);
    if (status != OST_OK) return failWith(status);
    std::ostringstream out;
    out << std::setprecision(17);
    if (formatName == "text")
      out << "snapshot " << snapshot << ": label " << label << ", decision " << decision
          << '\n';
    else
      out << "{\n  \"snapshot\": " << snapshot << ",\n  \"label\": " << label
          << ",\n  \"decision\": " << decision << "\n}\n";
    return writeOutput(out.str(), outPath);
  }

  if (generate->parsed()) {
    StreamGuard s;
    TextGuard report;
    const ost_status status = ost_stream_generate(&scenario, &s.s, &report.p);
    if (status != OST_OK) return failWith(status);
    if (!reportPath.empty()) {
      if (int rc = writeOutput(report.str(), reportPath)) return rc;
    }
    if (!outPath.empty()) {
      const ost_status saved = ost_stream_save(s.s, outPath.c_str());
      return saved == OST_OK ? 0 : failWith(saved);
    }
    TextGuard document;
    const ost_status rendered = ost_stream_document(s.s, &document.p);
    if (rendered != OST_OK) return failWith(rendered);
    return writeOutput(document.str(), "");
  }

  if (evaluate->parsed()) {
    StreamGuard s;
    if (int rc = openStream(streamPath, ontologyPath, s)) return rc;
    ost_eval_options opt = evalDefaults;
    opt.methods = methods.empty() ? nullptr : methods.c_str();
    opt.train_fraction = trainFraction;
    opt.delta = delta;
    opt.classes = classes;
    opt.class_prefix = classPrefix.c_str();
    opt.entities = entities.empty() ? nullptr : entities.c_str();
    opt.weighting = weightingFromName(modeName);
    opt.kappa = kappa;
    opt.budget = evalBudget;
    opt.drift = driftOpt;
    opt.learning_rate = learningRate;
    opt.epochs = epochs;
    opt.l2 = l2;
    opt.seed = seed;
    opt.sliding_window = slidingWindow;
    TextGuard out;
    const ost_status status =
        ost_stream_evaluate(s.s, &opt, formatFromName(formatName), &out.p);
    if (status != OST_OK) return failWith(status);
    return writeOutput(out.str(), outPath);
  }

  return 0;
}
