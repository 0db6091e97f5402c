#include "streamfm/stream_runner.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace streamfm {

namespace {

// Removes the user's already-consumed items, always keeping the event's own
// item so its rank stays defined.
void erase_seen(ScoredList& list, const Event& e,
                const std::unordered_map<std::string, std::unordered_set<std::string>>& seen) {
  const auto it = seen.find(e.userKey);
  if (it == seen.end()) return;
  const std::unordered_set<std::string>& consumed = it->second;
  std::erase_if(list.entries, [&](const ScoredEntry& entry) {
    return entry.itemKey != e.itemKey && consumed.count(entry.itemKey) != 0;
  });
}

}  // namespace

FmStreamModel::FmStreamModel(DatasetAdapter& adapter, const FmStreamConfig& config)
    : adapter_(&adapter), config_(config) {}

void FmStreamModel::batch_train(std::span<const Event> s0) {
  std::vector<std::pair<SparseVector, double>> train;
  train.reserve(s0.size());
  for (const Event& e : s0) {
    adapter_->observe(e);
    train.emplace_back(adapter_->encode(e, e.itemKey), 1.0);
    adapter_->consume(e);
    if (config_.excludeSeen) seen_[e.userKey].insert(e.itemKey);
  }

  model_ = fm_init(adapter_->feature_dim(), config_.k, config_.eta,
                   config_.lambda0, config_.lambdaW,
                   std::vector<double>(config_.k, config_.lambdaV),
                   config_.initSigma, config_.seed);
  initialized_ = true;
  if (!train.empty()) {
    streamfm::batch_train(model_, train, config_.policy);
  }
}

void FmStreamModel::observe(const Event& e) {
  adapter_->observe(e);
  if (!initialized_) {
    model_ = fm_init(adapter_->feature_dim(), config_.k, config_.eta,
                     config_.lambda0, config_.lambdaW,
                     std::vector<double>(config_.k, config_.lambdaV),
                     config_.initSigma, config_.seed);
    initialized_ = true;
  } else if (adapter_->feature_dim() > model_.d) {
    grow_model(model_, adapter_->feature_dim());
  }
}

ScoredList FmStreamModel::rank(const Event& e) {
  ScoredList list = score_all(model_, adapter_->catalog(), [&](const std::string& key) {
    return adapter_->encode(e, key);
  });
  filter_seen(list, e);
  return list;
}

void FmStreamModel::learn(const Event& e) {
  if (config_.online) {
    const SparseVector x = adapter_->encode(e, e.itemKey);
    incremental_step(model_, x, config_.policy);
  }
  adapter_->consume(e);
  if (config_.excludeSeen) seen_[e.userKey].insert(e.itemKey);
}

void FmStreamModel::filter_seen(ScoredList& list, const Event& e) const {
  if (config_.excludeSeen) erase_seen(list, e, seen_);
}

MfStreamModel::MfStreamModel(DatasetAdapter& adapter, const MfStreamConfig& config)
    : adapter_(&adapter), config_(config) {
  model_ = mf_init(config_.k, config_.eta, config_.lambda, config_.initSigma,
                   config_.seed);
}

void MfStreamModel::batch_train(std::span<const Event> s0) {
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(s0.size());
  for (const Event& e : s0) {
    adapter_->observe(e);
    adapter_->consume(e);
    pairs.emplace_back(e.userKey, e.itemKey);
    if (config_.excludeSeen) seen_[e.userKey].insert(e.itemKey);
  }
  mf_batch_train(model_, pairs, config_.maxEpochs, config_.shuffleSeed);
}

void MfStreamModel::observe(const Event& e) {
  adapter_->observe(e);
  // Ensure both vectors exist before any scoring, so a new key's frozen
  // random vector is created at a deterministic point.
  mf_user_vector(model_, e.userKey);
  mf_item_vector(model_, e.itemKey);
}

ScoredList MfStreamModel::rank(const Event& e) {
  ScoredList list = score_all(model_, e.userKey, adapter_->catalog());
  filter_seen(list, e);
  return list;
}

void MfStreamModel::learn(const Event& e) {
  if (config_.online) {
    imf_update(model_, e.userKey, e.itemKey);
  }
  adapter_->consume(e);
  if (config_.excludeSeen) seen_[e.userKey].insert(e.itemKey);
}

void MfStreamModel::filter_seen(ScoredList& list, const Event& e) const {
  if (config_.excludeSeen) erase_seen(list, e, seen_);
}

}  // namespace streamfm
