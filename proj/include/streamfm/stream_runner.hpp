#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "streamfm/dataset.hpp"
#include "streamfm/event.hpp"
#include "streamfm/fm_core.hpp"
#include "streamfm/mf_core.hpp"
#include "streamfm/online_fm.hpp"
#include "streamfm/prequential.hpp"
#include "streamfm/recommender.hpp"

namespace streamfm {

struct FmStreamConfig {
  std::size_t k = 40;
  double eta = 0.004;
  double lambda0 = 0.0;
  double lambdaW = 0.0;
  double lambdaV = 0.0;  // one value shared by all factors initially
  double initSigma = 0.01;
  std::uint64_t seed = 0;
  UpdatePolicy policy;
  bool online = true;        // false: frozen after batch training (growth only)
  bool excludeSeen = false;  // drop the user's consumed items from rankings
};

// Factorization machine driven through the prequential protocol. The model is
// created after the batch segment has been encoded (so its dimension matches
// the registry) and grows whenever the adapter registers new features.
class FmStreamModel : public StreamModel {
 public:
  FmStreamModel(DatasetAdapter& adapter, const FmStreamConfig& config);

  void batch_train(std::span<const Event> s0) override;
  void observe(const Event& e) override;
  ScoredList rank(const Event& e) override;
  void learn(const Event& e) override;
  bool online() const override { return config_.online; }

  const FmModel& model() const { return model_; }

 private:
  void filter_seen(ScoredList& list, const Event& e) const;

  DatasetAdapter* adapter_;
  FmStreamConfig config_;
  FmModel model_;
  bool initialized_ = false;
  std::unordered_map<std::string, std::unordered_set<std::string>> seen_;
};

struct MfStreamConfig {
  std::size_t k = 40;
  double eta = 0.002;
  double lambda = 0.01;
  double initSigma = 0.01;
  std::uint64_t seed = 0;
  int maxEpochs = 30;
  std::uint64_t shuffleSeed = 0;
  bool online = true;
  bool excludeSeen = false;
};

// Matrix-factorization baseline under the same protocol. Unknown users and
// items receive frozen random vectors at first encounter, so rankings are
// always defined; only online models train past the batch phase.
class MfStreamModel : public StreamModel {
 public:
  MfStreamModel(DatasetAdapter& adapter, const MfStreamConfig& config);

  void batch_train(std::span<const Event> s0) override;
  void observe(const Event& e) override;
  ScoredList rank(const Event& e) override;
  void learn(const Event& e) override;
  bool online() const override { return config_.online; }

  const MfModel& model() const { return model_; }

 private:
  void filter_seen(ScoredList& list, const Event& e) const;

  DatasetAdapter* adapter_;
  MfStreamConfig config_;
  MfModel model_;
  std::unordered_map<std::string, std::unordered_set<std::string>> seen_;
};

}  // namespace streamfm
