#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "streamfm/dataset.hpp"
#include "streamfm/event.hpp"
#include "streamfm/feature_registry.hpp"
#include "streamfm/recommender.hpp"
#include "streamfm/sparse_vector.hpp"

namespace streamfm {

struct Ml100kUser {
  int age = 0;
  bool male = false;
  std::string occupation;
};

// The 18 real genres (the leading "unknown" flag of the raw file is dropped).
inline constexpr std::size_t kMl100kGenreCount = 18;

struct Ml100kItem {
  std::vector<int> genres;  // indices into the 18 kept genre columns
};

// Five-star events in time order plus the user/item tables restricted to
// users and items that appear in at least one such event.
struct Ml100kData {
  std::unordered_map<std::string, Ml100kUser> users;
  std::unordered_map<std::string, Ml100kItem> items;
  std::vector<Event> events;
};

// Reads the MovieLens 100k files (ratings tab-separated, user and item tables
// pipe-separated), keeps only rating==5 events, and sorts them by timestamp
// (stable, so equal timestamps keep file order). Malformed lines are rejected
// with their line number.
Ml100kData load_movielens(const std::string& dataPath,
                          const std::string& userPath,
                          const std::string& itemPath);

// Day of week of a UNIX timestamp in UTC, 0=Sunday .. 6=Saturday.
int day_of_week_utc(long long timestamp);

// Feature encoder for the movie stream. Per event it assembles: user ID
// one-hot, occupation one-hot, sex flag (male), age / 100, candidate movie ID
// one-hot, the candidate's genre flags, the genre flags of the user's
// previously consumed movie, event day-of-week one-hot, and the day-of-week
// of the user's previous event. History blocks are absent until the user has
// consumed an event. Nonzero count is at most 1+3+1+18+18+1+1 = 43.
class Ml100kEncoder : public DatasetAdapter {
 public:
  explicit Ml100kEncoder(const Ml100kData& data);

  void observe(const Event& e) override;
  SparseVector encode(const Event& e, std::string_view candidateKey) const override;
  void consume(const Event& e) override;
  const Catalog& catalog() const override { return catalog_; }
  std::size_t feature_dim() const override { return registry_.size(); }

 private:
  struct History {
    const Ml100kItem* lastItem = nullptr;
    bool hasDay = false;
    int lastDow = 0;
  };

  const Ml100kData* data_;
  FeatureRegistry registry_;
  Catalog catalog_;
  std::unordered_map<std::string, History> history_;
  // Per-item encoded block (movie ID + genre flags), sorted by index once at
  // registration; indices never remap so the cache stays valid.
  std::unordered_map<std::string, std::vector<SparseEntry>> itemBlocks_;
  // The context block is identical for every candidate of one event, so it is
  // cached between observe/consume calls (which bump the stamp).
  std::uint64_t stamp_ = 0;
  mutable std::uint64_t contextStamp_ = ~std::uint64_t{0};
  mutable std::string contextUser_;
  mutable long long contextTimestamp_ = 0;
  mutable std::vector<SparseEntry> contextBlock_;
};

}  // namespace streamfm
