#include "streamfm/prequential.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace streamfm {

SplitBounds split_events(std::span<const Event> events, const SplitSpec& spec) {
  if (spec.batchFrac < 0.0 || spec.onePassFrac < 0.0 || spec.testFrac < 0.0 ||
      std::abs(spec.batchFrac + spec.onePassFrac + spec.testFrac - 1.0) > 1e-9) {
    throw std::invalid_argument("split_events: fractions must be non-negative and sum to 1");
  }
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].timestamp < events[i - 1].timestamp) {
      throw std::invalid_argument("split_events: events not sorted by timestamp");
    }
  }
  const double count = static_cast<double>(events.size());
  SplitBounds b;
  b.batchEnd = static_cast<std::size_t>(std::floor(count * spec.batchFrac + 1e-9));
  b.onePassEnd =
      b.batchEnd + static_cast<std::size_t>(std::floor(count * spec.onePassFrac + 1e-9));
  return b;
}

int recall_at_n(std::span<const std::string> recommended, std::string_view truth) {
  for (const std::string& key : recommended) {
    if (key == truth) return 1;
  }
  return 0;
}

double percentile_rank(std::size_t rank, std::size_t catalogSize) {
  if (catalogSize < 1) throw std::invalid_argument("percentile_rank: empty catalog");
  if (rank >= catalogSize) throw std::invalid_argument("percentile_rank: rank out of range");
  if (catalogSize == 1) return 0.0;
  return 100.0 * static_cast<double>(rank) / static_cast<double>(catalogSize - 1);
}

EvalState::EvalState(int n, int windowT) : n_(n), windowT_(windowT) {
  if (n < 1) throw std::invalid_argument("EvalState: list size must be >= 1");
  if (windowT < 1) throw std::invalid_argument("EvalState: window size must be >= 1");
}

void EvalState::record(std::size_t eventIndex, long long timestamp, int hit,
                       double percentileRank) {
  window_.push_back(hit);
  windowSum_ += hit;
  if (window_.size() > static_cast<std::size_t>(windowT_)) {
    windowSum_ -= window_.front();
    window_.pop_front();
  }
  const double windowed =
      static_cast<double>(windowSum_) / static_cast<double>(window_.size());
  mprSum_ += percentileRank;
  log_.push_back({eventIndex, timestamp, hit, windowed, percentileRank});
}

double EvalState::mpr() const {
  if (log_.empty()) return 0.0;
  return mprSum_ / static_cast<double>(log_.size());
}

namespace {

// Runs fn for the event at streamIndex, tagging any failure with that index.
template <class Fn>
auto guarded(std::size_t streamIndex, Fn&& fn) {
  try {
    return fn();
  } catch (const PrequentialError&) {
    throw;
  } catch (const std::exception& e) {
    throw PrequentialError(streamIndex, e.what());
  }
}

}  // namespace

RunResult run_prequential(StreamModel& model, std::span<const Event> events,
                          const SplitSpec& spec, int n, int windowT) {
  using Clock = std::chrono::steady_clock;
  const SplitBounds bounds = split_events(events, spec);

  RunResult result{EvalState(n, windowT)};
  result.updateTimed = model.online();

  guarded(0, [&] { model.batch_train(events.subspan(0, bounds.batchEnd)); });

  // One-pass segment: evaluate for information, then update (online models).
  double svalRecallSum = 0.0;
  double svalMprSum = 0.0;
  for (std::size_t i = bounds.batchEnd; i < bounds.onePassEnd; ++i) {
    const Event& e = events[i];
    guarded(i, [&] { model.observe(e); });
    const ScoredList list = guarded(i, [&] { return model.rank(e); });
    const std::vector<std::string> recommended = top_n(list, n);
    svalRecallSum += recall_at_n(recommended, e.itemKey);
    svalMprSum += percentile_rank(rank_of(list, e.itemKey), list.entries.size());
    ++result.svalCount;
    guarded(i, [&] { model.learn(e); });
  }
  if (result.svalCount > 0) {
    svalRecallSum /= static_cast<double>(result.svalCount);
    svalMprSum /= static_cast<double>(result.svalCount);
  }
  result.svalRecallMean = svalRecallSum;
  result.svalMpr = svalMprSum;

  // Test segment: metrics recorded from model state that has not seen the
  // event, then the model learns it.
  double rankSec = 0.0;
  double learnSec = 0.0;
  for (std::size_t i = bounds.onePassEnd; i < events.size(); ++i) {
    const Event& e = events[i];
    guarded(i, [&] { model.observe(e); });

    const auto rankStart = Clock::now();
    const ScoredList list = guarded(i, [&] { return model.rank(e); });
    rankSec += std::chrono::duration<double>(Clock::now() - rankStart).count();

    const std::vector<std::string> recommended = top_n(list, n);
    const int hit = recall_at_n(recommended, e.itemKey);
    const double pr = percentile_rank(rank_of(list, e.itemKey), list.entries.size());
    result.eval.record(i, e.timestamp, hit, pr);

    const auto learnStart = Clock::now();
    guarded(i, [&] { model.learn(e); });
    learnSec += std::chrono::duration<double>(Clock::now() - learnStart).count();
  }

  const std::size_t testCount = events.size() - bounds.onePassEnd;
  if (testCount > 0) {
    result.recommendSecPerEvent = rankSec / static_cast<double>(testCount);
    result.updateSecPerEvent = learnSec / static_cast<double>(testCount);
  }
  return result;
}

}  // namespace streamfm
