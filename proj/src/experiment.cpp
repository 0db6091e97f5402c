#include "streamfm/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "streamfm/movielens.hpp"
#include "streamfm/stream_runner.hpp"
#include "streamfm/synthetic.hpp"

namespace streamfm {

std::string dataset_name(Dataset d) {
  switch (d) {
    case Dataset::ml100k: return "ml100k";
    case Dataset::synthetic: return "synthetic";
  }
  throw std::logic_error("unknown dataset");
}

std::string model_name(ModelKind m) {
  switch (m) {
    case ModelKind::mfStatic: return "mf-static";
    case ModelKind::mfIncremental: return "mf-incremental";
    case ModelKind::fmStatic: return "fm-static";
    case ModelKind::fmIncremental: return "fm-incremental";
  }
  throw std::logic_error("unknown model");
}

Dataset parse_dataset(const std::string& name) {
  if (name == "ml100k") return Dataset::ml100k;
  if (name == "synthetic") return Dataset::synthetic;
  throw std::invalid_argument("unknown dataset \"" + name + "\"");
}

ModelKind parse_model(const std::string& name) {
  if (name == "mf-static") return ModelKind::mfStatic;
  if (name == "mf-incremental") return ModelKind::mfIncremental;
  if (name == "fm-static") return ModelKind::fmStatic;
  if (name == "fm-incremental") return ModelKind::fmIncremental;
  throw std::invalid_argument("unknown model \"" + name + "\"");
}

namespace {

bool is_mf(ModelKind m) {
  return m == ModelKind::mfStatic || m == ModelKind::mfIncremental;
}

bool is_online(ModelKind m) {
  return m == ModelKind::mfIncremental || m == ModelKind::fmIncremental;
}

}  // namespace

RunConfig apply_defaults(RunConfig c) {
  const bool mf = is_mf(c.model);
  if (c.dataset == Dataset::ml100k) {
    if (c.k == 0) c.k = 40;
    if (c.eta == 0.0) c.eta = mf ? 0.002 : 0.004;
    if (mf) {
      if (c.lambda < 0.0) c.lambda = 0.01;
    } else {
      if (c.lambda0 < 0.0) c.lambda0 = 2.0;
      if (c.lambdaW < 0.0) c.lambdaW = 8.0;
      if (c.lambdaV < 0.0) c.lambdaV = 16.0;
    }
    if (c.n == 0) c.n = 10;
    if (c.windowT == 0) c.windowT = 3000;
  } else {
    if (c.k == 0) c.k = 2;
    if (c.eta == 0.0) c.eta = mf ? 0.0003 : 0.00006;
    if (mf) {
      if (c.lambda < 0.0) c.lambda = 0.01;
    } else {
      if (c.lambda0 < 0.0) c.lambda0 = 0.01;
      if (c.lambdaW < 0.0) c.lambdaW = 0.01;
      if (c.lambdaV < 0.0) c.lambdaV = 0.01;
    }
    if (c.n == 0) c.n = 1;
    if (c.windowT == 0) c.windowT = 500;
  }
  // The unused family's lambdas stay at their sentinel so validate_config can
  // tell "untouched" from "explicitly set".
  return c;
}

void validate_config(const RunConfig& c) {
  const bool mf = is_mf(c.model);
  if (mf) {
    if (c.lambda0 >= 0.0 || c.lambdaW >= 0.0 || c.lambdaV >= 0.0) {
      throw std::invalid_argument("MF models take --lambda, not the FM lambda triplet");
    }
    if (c.lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
  } else {
    if (c.lambda >= 0.0) {
      throw std::invalid_argument("FM models take --lambda0/--lambda-w/--lambda-v, not --lambda");
    }
    if (c.lambda0 < 0.0 || c.lambdaW < 0.0 || c.lambdaV < 0.0) {
      throw std::invalid_argument("FM lambdas must be non-negative");
    }
  }
  if (c.k < 1) throw std::invalid_argument("k must be >= 1");
  if (c.eta <= 0.0) throw std::invalid_argument("eta must be positive");
  if (c.n < 1) throw std::invalid_argument("n must be >= 1");
  if (c.windowT < 1) throw std::invalid_argument("window must be >= 1");
  if (c.maxEpochs < 0) throw std::invalid_argument("max epochs must be >= 0");
  if (c.initSigma <= 0.0) throw std::invalid_argument("init sigma must be positive");
  if (c.seeds.empty()) throw std::invalid_argument("at least one seed is required");
}

nlohmann::json config_to_json(const RunConfig& c) {
  return nlohmann::json{{"dataset", dataset_name(c.dataset)},
                        {"model", model_name(c.model)},
                        {"k", c.k},
                        {"eta", c.eta},
                        {"lambda", c.lambda},
                        {"lambda0", c.lambda0},
                        {"lambda_w", c.lambdaW},
                        {"lambda_v", c.lambdaV},
                        {"adaptive_reg", c.adaptiveReg},
                        {"n", c.n},
                        {"window", c.windowT},
                        {"seeds", c.seeds},
                        {"max_epochs", c.maxEpochs},
                        {"init_sigma", c.initSigma},
                        {"out_dir", c.outDir},
                        {"ml100k_dir", c.ml100kDir},
                        {"synthetic_file", c.syntheticFile},
                        {"exclude_seen", c.excludeSeen}};
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.dataset = parse_dataset(j.at("dataset").get<std::string>());
  c.model = parse_model(j.at("model").get<std::string>());
  c.k = j.at("k").get<std::size_t>();
  c.eta = j.at("eta").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.lambda0 = j.at("lambda0").get<double>();
  c.lambdaW = j.at("lambda_w").get<double>();
  c.lambdaV = j.at("lambda_v").get<double>();
  c.adaptiveReg = j.at("adaptive_reg").get<bool>();
  c.n = j.at("n").get<int>();
  c.windowT = j.at("window").get<int>();
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.maxEpochs = j.at("max_epochs").get<int>();
  c.initSigma = j.at("init_sigma").get<double>();
  c.outDir = j.at("out_dir").get<std::string>();
  c.ml100kDir = j.at("ml100k_dir").get<std::string>();
  c.syntheticFile = j.at("synthetic_file").get<std::string>();
  c.excludeSeen = j.at("exclude_seen").get<bool>();
  return c;
}

namespace {

std::vector<Event> load_events(const RunConfig& c) {
  if (c.dataset == Dataset::ml100k) {
    if (c.ml100kDir.empty()) {
      throw std::invalid_argument("ml100k runs need --ml100k-dir");
    }
    Ml100kData data = load_movielens(c.ml100kDir + "/u.data", c.ml100kDir + "/u.user",
                                     c.ml100kDir + "/u.item");
    return std::move(data.events);
  }
  if (!c.syntheticFile.empty()) return read_synthetic_csv(c.syntheticFile);
  return generate_synthetic(SyntheticRuleSet::defaults(0));
}

std::unique_ptr<DatasetAdapter> make_adapter(const RunConfig& c,
                                             const Ml100kData* ml100k) {
  if (c.dataset == Dataset::ml100k) {
    return std::make_unique<Ml100kEncoder>(*ml100k);
  }
  return std::make_unique<SyntheticAdapter>();
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += (v - mean) * (v - mean);
  return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

}  // namespace

std::string events_csv(const EvalState& eval) {
  std::string out = "event_index,timestamp,hit,windowed_recall,percentile_rank\n";
  for (const LogEntry& entry : eval.log()) {
    out += std::to_string(entry.eventIndex);
    out += ',';
    out += std::to_string(entry.timestamp);
    out += ',';
    out += std::to_string(entry.hit);
    out += ',';
    out += format_double(entry.windowedRecall);
    out += ',';
    out += format_double(entry.percentileRank);
    out += '\n';
  }
  return out;
}

RunResult run_single_seed(const RunConfig& resolved, std::uint64_t seed,
                          const std::vector<Event>& events) {
  // ML100k adapters need the loaded tables; rebuild them per seed so every
  // trial starts from a fresh registry and catalog.
  std::unique_ptr<Ml100kData> ml100k;
  if (resolved.dataset == Dataset::ml100k) {
    Ml100kData data = load_movielens(resolved.ml100kDir + "/u.data",
                                     resolved.ml100kDir + "/u.user",
                                     resolved.ml100kDir + "/u.item");
    ml100k = std::make_unique<Ml100kData>(std::move(data));
  }
  std::unique_ptr<DatasetAdapter> adapter = make_adapter(resolved, ml100k.get());

  std::unique_ptr<StreamModel> model;
  if (is_mf(resolved.model)) {
    MfStreamConfig mc;
    mc.k = resolved.k;
    mc.eta = resolved.eta;
    mc.lambda = resolved.lambda;
    mc.initSigma = resolved.initSigma;
    mc.seed = seed;
    mc.maxEpochs = resolved.maxEpochs;
    mc.shuffleSeed = seed;
    mc.online = is_online(resolved.model);
    mc.excludeSeen = resolved.excludeSeen;
    model = std::make_unique<MfStreamModel>(*adapter, mc);
  } else {
    FmStreamConfig fc;
    fc.k = resolved.k;
    fc.eta = resolved.eta;
    fc.lambda0 = resolved.lambda0;
    fc.lambdaW = resolved.lambdaW;
    fc.lambdaV = resolved.lambdaV;
    fc.initSigma = resolved.initSigma;
    fc.seed = seed;
    fc.policy.adaptiveRegularization =
        resolved.model == ModelKind::fmIncremental && resolved.adaptiveReg;
    fc.policy.anticipateStep = true;
    fc.policy.maxEpochs = resolved.maxEpochs;
    fc.policy.shuffleSeed = seed;
    fc.online = is_online(resolved.model);
    fc.excludeSeen = resolved.excludeSeen;
    model = std::make_unique<FmStreamModel>(*adapter, fc);
  }

  return run_prequential(*model, events, SplitSpec{}, resolved.n, resolved.windowT);
}

ExperimentResult run_experiment(const RunConfig& config) {
  const RunConfig resolved = apply_defaults(config);
  validate_config(resolved);

  const std::vector<Event> events = load_events(resolved);
  std::filesystem::create_directories(resolved.outDir);

  ExperimentResult result;
  result.resolved = resolved;

  std::vector<double> recalls, mprs;
  for (std::uint64_t seed : resolved.seeds) {
    SeedOutcome outcome;
    outcome.seed = seed;
    try {
      const RunResult run = run_single_seed(resolved, seed, events);

      double recallSum = 0.0;
      for (const LogEntry& entry : run.eval.log()) recallSum += entry.windowedRecall;
      outcome.recallNT = run.eval.event_count() > 0
                             ? recallSum / static_cast<double>(run.eval.event_count())
                             : 0.0;
      outcome.mpr = run.eval.mpr();
      outcome.svalRecall = run.svalRecallMean;
      outcome.svalMpr = run.svalMpr;
      outcome.svalCount = run.svalCount;
      outcome.recommendSecPerEvent = run.recommendSecPerEvent;
      outcome.updateSecPerEvent = run.updateSecPerEvent;
      outcome.updateTimed = run.updateTimed;
      outcome.ok = true;

      const std::string csvPath = resolved.outDir + "/events_" +
                                  model_name(resolved.model) + "_" +
                                  std::to_string(seed) + ".csv";
      std::ofstream out(csvPath, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open " + csvPath + " for writing");
      out << events_csv(run.eval);
      if (!out) throw std::runtime_error("write failed for " + csvPath);

      recalls.push_back(outcome.recallNT);
      mprs.push_back(outcome.mpr);
    } catch (const PrequentialError& e) {
      outcome.ok = false;
      outcome.error = e.what();
      outcome.failedEventIndex = e.event_index();
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.error = e.what();
    }
    result.outcomes.push_back(std::move(outcome));
  }

  if (!recalls.empty()) {
    for (double r : recalls) result.recallMean += r;
    result.recallMean /= static_cast<double>(recalls.size());
    for (double m : mprs) result.mprMean += m;
    result.mprMean /= static_cast<double>(mprs.size());
    result.recallStd = sample_std(recalls, result.recallMean);
    result.mprStd = sample_std(mprs, result.mprMean);
  }
  result.allOk = true;
  for (const SeedOutcome& o : result.outcomes) result.allOk = result.allOk && o.ok;

  nlohmann::json seedsJson = nlohmann::json::array();
  for (const SeedOutcome& o : result.outcomes) {
    nlohmann::json s{{"seed", o.seed}, {"ok", o.ok}};
    if (o.ok) {
      s["recall_nt"] = o.recallNT;
      s["mpr"] = o.mpr;
      s["sval_info"] = {{"recall", o.svalRecall}, {"mpr", o.svalMpr}, {"count", o.svalCount}};
      s["timing"] = {
          {"recommend_sec_per_event", o.recommendSecPerEvent},
          {"update_sec_per_event",
           o.updateTimed ? nlohmann::json(o.updateSecPerEvent) : nlohmann::json(nullptr)}};
    } else {
      s["error"] = o.error;
      s["failed_event_index"] = o.failedEventIndex;
    }
    seedsJson.push_back(std::move(s));
  }

  nlohmann::json summary{
      {"config", config_to_json(resolved)},
      {"seeds", seedsJson},
      {"aggregate",
       {{"recall_nt", {{"mean", result.recallMean}, {"std", result.recallStd}}},
        {"mpr", {{"mean", result.mprMean}, {"std", result.mprStd}}},
        {"completed_seeds", recalls.size()}}}};

  const std::string summaryPath =
      resolved.outDir + "/summary_" + model_name(resolved.model) + ".json";
  std::ofstream out(summaryPath, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + summaryPath + " for writing");
  out << summary.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + summaryPath);

  return result;
}

}  // namespace streamfm
