#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "streamfm/fm_core.hpp"
#include "streamfm/mf_core.hpp"
#include "streamfm/sparse_vector.hpp"

namespace streamfm {

// Candidate item universe. Keys are unique and keep their insertion order,
// which doubles as the deterministic tie-break for equal distances.
class Catalog {
 public:
  // Returns the position of key, inserting it at the end when new.
  std::size_t add(std::string_view key);
  bool contains(std::string_view key) const;
  // Position of an existing key; throws std::out_of_range when absent.
  std::size_t position_of(std::string_view key) const;
  const std::vector<std::string>& keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::size_t> positions_;
};

struct ScoredEntry {
  std::string itemKey;
  double score = 0.0;
  double distance = 0.0;  // |score - 1|, NaN scores mapped to +infinity
};

// Full ranking of the catalog, distance ascending; ties keep catalog
// insertion order.
struct ScoredList {
  std::vector<ScoredEntry> entries;
};

// Scores every catalog item with scoreFn(position, key) and sorts by
// closeness to 1. Rejects an empty catalog.
ScoredList score_all(const Catalog& catalog,
                     const std::function<double(std::size_t, const std::string&)>& scoreFn);

// FM ranking: one feature vector per candidate from encodeFn, scored with
// fm_predict. The model is read-only.
ScoredList score_all(const FmModel& m, const Catalog& catalog,
                     const std::function<SparseVector(const std::string&)>& encodeFn);

// MF ranking via p_u.q_i. Unknown keys get their frozen lazy vectors, hence
// the mutable model; trained values never change.
ScoredList score_all(MfModel& m, std::string_view userKey, const Catalog& catalog);

// First min(n, |list|) item keys; n < 1 is rejected.
std::vector<std::string> top_n(const ScoredList& list, int n);

// Zero-based position of target in the sorted list; absent target is
// rejected (the harness always registers the ground-truth item first).
std::size_t rank_of(const ScoredList& list, std::string_view target);

}  // namespace streamfm
