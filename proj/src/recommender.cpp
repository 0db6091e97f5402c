#include "streamfm/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace streamfm {

std::size_t Catalog::add(std::string_view key) {
  auto it = positions_.find(std::string(key));
  if (it != positions_.end()) return it->second;
  const std::size_t pos = keys_.size();
  keys_.emplace_back(key);
  positions_.emplace(keys_.back(), pos);
  return pos;
}

bool Catalog::contains(std::string_view key) const {
  return positions_.count(std::string(key)) != 0;
}

std::size_t Catalog::position_of(std::string_view key) const {
  auto it = positions_.find(std::string(key));
  if (it == positions_.end()) {
    throw std::out_of_range("Catalog: unknown item key");
  }
  return it->second;
}

ScoredList score_all(const Catalog& catalog,
                     const std::function<double(std::size_t, const std::string&)>& scoreFn) {
  if (catalog.size() == 0) throw std::invalid_argument("score_all: empty catalog");

  ScoredList list;
  list.entries.reserve(catalog.size());
  for (std::size_t pos = 0; pos < catalog.size(); ++pos) {
    const std::string& key = catalog.keys()[pos];
    const double score = scoreFn(pos, key);
    const double distance = std::isnan(score)
                                ? std::numeric_limits<double>::infinity()
                                : std::abs(score - 1.0);
    list.entries.push_back({key, score, distance});
  }
  // Entries enter in catalog order, so a stable sort on distance alone keeps
  // insertion order as the tie-break.
  std::stable_sort(list.entries.begin(), list.entries.end(),
                   [](const ScoredEntry& a, const ScoredEntry& b) {
                     return a.distance < b.distance;
                   });
  return list;
}

ScoredList score_all(const FmModel& m, const Catalog& catalog,
                     const std::function<SparseVector(const std::string&)>& encodeFn) {
  return score_all(catalog, [&](std::size_t, const std::string& key) {
    return fm_predict(m, encodeFn(key));
  });
}

ScoredList score_all(MfModel& m, std::string_view userKey, const Catalog& catalog) {
  if (catalog.size() == 0) throw std::invalid_argument("score_all: empty catalog");
  const std::vector<double> scores = mf_score_items(m, userKey, catalog.keys());
  return score_all(catalog, [&](std::size_t pos, const std::string&) {
    return scores[pos];
  });
}

std::vector<std::string> top_n(const ScoredList& list, int n) {
  if (n < 1) throw std::invalid_argument("top_n: n must be >= 1");
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(n),
                                                 list.entries.size());
  std::vector<std::string> keys;
  keys.reserve(take);
  for (std::size_t i = 0; i < take; ++i) keys.push_back(list.entries[i].itemKey);
  return keys;
}

std::size_t rank_of(const ScoredList& list, std::string_view target) {
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    if (list.entries[i].itemKey == target) return i;
  }
  throw std::out_of_range("rank_of: target item not in scored list");
}

}  // namespace streamfm
