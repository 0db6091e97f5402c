#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "streamfm/event.hpp"
#include "streamfm/recommender.hpp"

namespace streamfm {

// Chronological three-way split: a batch-training prefix, a one-pass segment,
// and the test remainder. Boundaries are floor(count * frac) with the
// remainder assigned to the test segment.
struct SplitSpec {
  double batchFrac = 0.20;
  double onePassFrac = 0.10;
  double testFrac = 0.70;
};

struct SplitBounds {
  std::size_t batchEnd = 0;    // S0    = [0, batchEnd)
  std::size_t onePassEnd = 0;  // Sval  = [batchEnd, onePassEnd)
                               // Stest = [onePassEnd, size)
};

SplitBounds split_events(std::span<const Event> events, const SplitSpec& spec);

// 1 iff truth appears in the recommended list.
int recall_at_n(std::span<const std::string> recommended, std::string_view truth);

// 100 * rank / (catalogSize - 1); a single-item catalog scores 0 (best).
double percentile_rank(std::size_t rank, std::size_t catalogSize);

struct LogEntry {
  std::size_t eventIndex = 0;  // position in the full time-ordered stream
  long long timestamp = 0;
  int hit = 0;
  double windowedRecall = 0.0;
  double percentileRank = 0.0;
};

// Accumulates per-event test metrics: hit indicators, their mean over the
// latest windowT events, and the running mean percentile rank.
class EvalState {
 public:
  EvalState(int n, int windowT);

  void record(std::size_t eventIndex, long long timestamp, int hit,
              double percentileRank);

  double mpr() const;  // mean of all logged percentile ranks
  const std::vector<LogEntry>& log() const { return log_; }
  std::size_t event_count() const { return log_.size(); }
  int n() const { return n_; }
  int window_t() const { return windowT_; }

 private:
  int n_;
  int windowT_;
  std::deque<int> window_;
  long long windowSum_ = 0;
  double mprSum_ = 0.0;
  std::vector<LogEntry> log_;
};

// A model driven through the protocol. observe() registers the event's
// features and items (growing the model) before any scoring; rank() is a
// read-only full-catalog scoring; learn() consumes the event — stream
// bookkeeping always advances, parameter updates only when online().
class StreamModel {
 public:
  virtual ~StreamModel() = default;
  virtual void batch_train(std::span<const Event> s0) = 0;
  virtual void observe(const Event& e) = 0;
  virtual ScoredList rank(const Event& e) = 0;
  virtual void learn(const Event& e) = 0;
  virtual bool online() const = 0;
};

// A per-event hook failure, tagged with the position of the offending event
// in the full stream.
class PrequentialError : public std::runtime_error {
 public:
  PrequentialError(std::size_t eventIndex, const std::string& what)
      : std::runtime_error(what), eventIndex_(eventIndex) {}
  std::size_t event_index() const { return eventIndex_; }

 private:
  std::size_t eventIndex_;
};

struct RunResult {
  EvalState eval;
  // Metrics over the one-pass segment, recorded for information only.
  double svalRecallMean = 0.0;
  double svalMpr = 0.0;
  std::size_t svalCount = 0;
  // Mean wall-clock per test event: full-catalog scoring vs model update.
  double recommendSecPerEvent = 0.0;
  double updateSecPerEvent = 0.0;
  bool updateTimed = false;  // false for static models
};

// Test-then-learn over a time-ordered stream: batch-train on the prefix, one
// incremental pass over the middle segment (metrics informational only), then
// per test event: observe, score, record recall@N / windowed recall /
// percentile rank, and only then learn.
RunResult run_prequential(StreamModel& model, std::span<const Event> events,
                          const SplitSpec& spec, int n, int windowT);

}  // namespace streamfm
