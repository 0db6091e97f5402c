// Command-line runner: `generate` writes the synthetic click stream,
// `run` executes the prequential protocol for one model over several seeds,
// `selftest` checks the numeric oracles.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streamfm/experiment.hpp"
#include "streamfm/selftest.hpp"
#include "streamfm/synthetic.hpp"

namespace {

int cmd_generate(std::uint64_t seed, const std::string& outPath) {
  const streamfm::SyntheticRuleSet rules = streamfm::SyntheticRuleSet::defaults(seed);
  const std::vector<streamfm::Event> events = streamfm::generate_synthetic(rules);
  streamfm::write_synthetic_csv(outPath, events);

  std::size_t preCount = 0;
  std::map<std::string, std::size_t> preShare, postShare;
  for (const streamfm::Event& e : events) {
    if (static_cast<std::size_t>(e.timestamp) < rules.driftImpressionIndex) {
      ++preCount;
      ++preShare[e.itemKey];
    } else {
      ++postShare[e.itemKey];
    }
  }
  const std::size_t postCount = events.size() - preCount;

  std::cout << "wrote " << outPath << "\n"
            << "clicks: " << events.size() << " from " << rules.totalImpressions
            << " impressions (drift at " << rules.driftImpressionIndex << ")\n";
  std::cout << "per-ad click share before / after drift:\n";
  for (const streamfm::AdRule& rule : rules.rules) {
    const double pre = preCount ? static_cast<double>(preShare[rule.adKey]) / preCount : 0.0;
    const double post =
        postCount ? static_cast<double>(postShare[rule.adKey]) / postCount : 0.0;
    std::cout << "  " << rule.adKey << ": " << pre << " / " << post << "\n";
  }
  return 0;
}

// key=value lines; '#' starts a comment. Flags given on the command line win.
void apply_config_file(const std::string& path, streamfm::RunConfig& config,
                       const CLI::App& run) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);

  std::string line;
  for (std::size_t lineNo = 1; std::getline(in, line); ++lineNo) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::size_t last = line.find_last_not_of(" \t\r");
    const std::string trimmed = line.substr(first, last - first + 1);
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--config", path + " line " + std::to_string(lineNo) +
                                                 ": expected key=value");
    }
    const std::string key = trimmed.substr(0, eq);
    const std::string value = trimmed.substr(eq + 1);

    auto overridden = [&](const std::string& flag) { return run.count(flag) > 0; };
    if (key == "dataset") {
      if (!overridden("--dataset")) config.dataset = streamfm::parse_dataset(value);
    } else if (key == "model") {
      if (!overridden("--model")) config.model = streamfm::parse_model(value);
    } else if (key == "k") {
      if (!overridden("--k")) config.k = std::stoull(value);
    } else if (key == "eta") {
      if (!overridden("--eta")) config.eta = std::stod(value);
    } else if (key == "lambda") {
      if (!overridden("--lambda")) config.lambda = std::stod(value);
    } else if (key == "lambda0") {
      if (!overridden("--lambda0")) config.lambda0 = std::stod(value);
    } else if (key == "lambda_w") {
      if (!overridden("--lambda-w")) config.lambdaW = std::stod(value);
    } else if (key == "lambda_v") {
      if (!overridden("--lambda-v")) config.lambdaV = std::stod(value);
    } else if (key == "adaptive_reg") {
      if (!overridden("--adaptive-reg")) config.adaptiveReg = value == "true" || value == "1";
    } else if (key == "n") {
      if (!overridden("--n")) config.n = std::stoi(value);
    } else if (key == "window") {
      if (!overridden("--window")) config.windowT = std::stoi(value);
    } else if (key == "seeds") {
      if (!overridden("--seeds")) {
        config.seeds.clear();
        std::string rest = value;
        while (!rest.empty()) {
          const std::size_t comma = rest.find(',');
          config.seeds.push_back(std::stoull(rest.substr(0, comma)));
          if (comma == std::string::npos) break;
          rest.erase(0, comma + 1);
        }
      }
    } else if (key == "max_epochs") {
      if (!overridden("--max-epochs")) config.maxEpochs = std::stoi(value);
    } else if (key == "out") {
      if (!overridden("--out")) config.outDir = value;
    } else if (key == "ml100k_dir") {
      if (!overridden("--ml100k-dir")) config.ml100kDir = value;
    } else if (key == "synthetic_file") {
      if (!overridden("--synthetic-file")) config.syntheticFile = value;
    } else if (key == "exclude_seen") {
      if (!overridden("--exclude-seen")) config.excludeSeen = value == "true" || value == "1";
    } else {
      throw CLI::ValidationError("--config", path + " line " + std::to_string(lineNo) +
                                                 ": unknown key \"" + key + "\"");
    }
  }
}

int cmd_run(streamfm::RunConfig config) {
  const streamfm::ExperimentResult result = streamfm::run_experiment(config);

  std::cout << "model " << streamfm::model_name(result.resolved.model) << " on "
            << streamfm::dataset_name(result.resolved.dataset) << "\n";
  for (const streamfm::SeedOutcome& o : result.outcomes) {
    if (o.ok) {
      std::cout << "  seed " << o.seed << ": recall@N/T " << o.recallNT << ", MPR "
                << o.mpr << "%\n";
    } else {
      std::cout << "  seed " << o.seed << ": FAILED at event " << o.failedEventIndex
                << ": " << o.error << "\n";
    }
  }
  std::cout << "aggregate: recall@N/T " << result.recallMean << " (+- "
            << result.recallStd << "), MPR " << result.mprMean << "% (+- "
            << result.mprStd << ")\n"
            << "outputs in " << result.resolved.outDir << "\n";
  return result.allOk ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming factorization-machine recommender harness"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Write the synthetic click-stream CSV");
  std::uint64_t generateSeed = 0;
  std::string generateOut = "synthetic.csv";
  generate->add_option("--seed", generateSeed, "Generator seed");
  generate->add_option("--out", generateOut, "Output CSV path");

  // run
  auto* run = app.add_subcommand("run", "Run the prequential protocol");
  streamfm::RunConfig config;
  std::string datasetName = "ml100k";
  std::string modelName = "fm-incremental";
  std::string configPath;
  run->add_option("--dataset", datasetName, "ml100k or synthetic");
  run->add_option("--model", modelName,
                  "mf-static, mf-incremental, fm-static or fm-incremental");
  run->add_option("--k", config.k, "Factorization rank (0: dataset default)");
  run->add_option("--eta", config.eta, "Learning rate (0: dataset default)");
  run->add_option("--lambda", config.lambda, "MF regularization (negative: default)");
  run->add_option("--lambda0", config.lambda0, "FM bias regularization (negative: default)");
  run->add_option("--lambda-w", config.lambdaW,
                  "FM linear-term regularization (negative: default)");
  run->add_option("--lambda-v", config.lambdaV,
                  "FM factor regularization, one starting value for every factor");
  run->add_option("--adaptive-reg", config.adaptiveReg,
                  "Adapt FM regularization online (fm-incremental only)");
  run->add_option("--n", config.n, "Recommendation list size (0: dataset default)");
  run->add_option("--window", config.windowT, "Recall window T (0: dataset default)");
  run->add_option("--seeds", config.seeds, "Seeds to repeat over")->delimiter(',');
  run->add_option("--max-epochs", config.maxEpochs, "Batch-training epochs");
  run->add_option("--out", config.outDir, "Output directory");
  run->add_option("--ml100k-dir", config.ml100kDir,
                  "Directory containing u.data, u.user, u.item");
  run->add_option("--synthetic-file", config.syntheticFile,
                  "Synthetic CSV (empty: generate the default stream)");
  run->add_flag("--exclude-seen", config.excludeSeen,
                "Drop a user's consumed items from their rankings");
  run->add_option("--config", configPath, "key=value file; explicit flags win");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Run the numeric oracle suites");
  streamfm::SelftestOptions selftestOptions;
  selftest->add_option("--seed", selftestOptions.seed, "Suite seed (printed)");
  selftest->add_option("--perturb", selftestOptions.perturb,
                       "Negative control: perturb one suite "
                       "(predict|gradient|imf|lambda|metrics)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      return cmd_generate(generateSeed, generateOut);
    }
    if (run->parsed()) {
      config.dataset = streamfm::parse_dataset(datasetName);
      config.model = streamfm::parse_model(modelName);
      // File values fill in only where no explicit flag was given.
      if (!configPath.empty()) apply_config_file(configPath, config, *run);
      return cmd_run(config);
    }
    const std::vector<streamfm::SuiteResult> results =
        streamfm::run_selftest(selftestOptions, std::cout);
    return streamfm::selftest_passed(results) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
