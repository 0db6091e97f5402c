#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamfm/event.hpp"
#include "streamfm/prequential.hpp"

namespace streamfm {

enum class Dataset { ml100k, synthetic };
enum class ModelKind { mfStatic, mfIncremental, fmStatic, fmIncremental };

std::string dataset_name(Dataset d);
std::string model_name(ModelKind m);
Dataset parse_dataset(const std::string& name);
ModelKind parse_model(const std::string& name);

// One experiment: a dataset, a model variant, hyperparameters, and the seeds
// to repeat over. Sentinels (k=0, eta=0, negative lambdas, n=0, windowT=0)
// mean "use the per-dataset default" and are resolved by apply_defaults.
struct RunConfig {
  Dataset dataset = Dataset::ml100k;
  ModelKind model = ModelKind::fmIncremental;
  std::size_t k = 0;
  double eta = 0.0;
  double lambda = -1.0;   // MF models
  double lambda0 = -1.0;  // FM models
  double lambdaW = -1.0;
  double lambdaV = -1.0;  // one starting value shared by all factors
  bool adaptiveReg = true;
  int n = 0;
  int windowT = 0;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  int maxEpochs = 30;
  double initSigma = 0.01;
  std::string outDir = ".";
  std::string ml100kDir;
  std::string syntheticFile;  // empty: generate the shipped default stream
  bool excludeSeen = false;

  bool operator==(const RunConfig&) const = default;
};

// Fills every sentinel field with the published per-dataset defaults:
//   ml100k:    k=40; MF eta=0.002, lambda=0.01; FM eta=0.004, lambda0=2.0,
//              lambdaW=8.0, lambdaV=16.0; N=10, T=3000
//   synthetic: k=2;  MF eta=0.0003, lambda=0.01; FM eta=0.00006,
//              lambda0=lambdaW=lambdaV=0.01; N=1, T=500
RunConfig apply_defaults(RunConfig c);

// Rejects mixed-family settings (MF models with FM lambdas and vice versa)
// and out-of-range values. Expects a defaults-resolved config.
void validate_config(const RunConfig& c);

nlohmann::json config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::size_t failedEventIndex = 0;  // meaningful only when !ok
  double recallNT = 0.0;             // mean of the logged windowed recalls
  double mpr = 0.0;
  double svalRecall = 0.0;
  double svalMpr = 0.0;
  std::size_t svalCount = 0;
  double recommendSecPerEvent = 0.0;
  double updateSecPerEvent = 0.0;
  bool updateTimed = false;
};

struct ExperimentResult {
  RunConfig resolved;
  std::vector<SeedOutcome> outcomes;
  double recallMean = 0.0;
  double recallStd = 0.0;  // sample std over seeds (0 when fewer than 2)
  double mprMean = 0.0;
  double mprStd = 0.0;
  bool allOk = false;
};

// Loads (or generates) the dataset, runs the prequential protocol once per
// seed, and writes events_<model>_<seed>.csv plus summary_<model>.json into
// outDir. Failures abort only the affected seed and are recorded with the
// failing event index.
ExperimentResult run_experiment(const RunConfig& config);

// The protocol for one seed on an already-loaded stream; used by
// run_experiment and directly by tests.
RunResult run_single_seed(const RunConfig& resolved, std::uint64_t seed,
                          const std::vector<Event>& events);

// Renders one per-event log as CSV text with header
// event_index,timestamp,hit,windowed_recall,percentile_rank.
std::string events_csv(const EvalState& eval);

}  // namespace streamfm
