#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
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

enum class AdAttr { age, sex, state };

// Matches when the attribute falls in [lo, hi] inclusive.
struct AdPredicate {
  AdAttr attr = AdAttr::sex;
  int lo = 0;
  int hi = 0;
};

struct AdRule {
  std::string adKey;
  int category = 0;
  AdPredicate predicate;
  double clickProb = 0.0;  // fired only when the predicate matches
  double exposure = 0.0;   // share of impressions showing this ad
};

// Five ad variants with one rule rewrite halfway through the impression
// stream: the most popular ad's predicate flips to the complementary (and
// much smaller) audience segment, so models anchored to the old regime keep
// pushing an ad that has mostly stopped converting.
struct SyntheticRuleSet {
  std::vector<AdRule> rules;
  std::size_t driftAd = 0;
  AdPredicate driftedPredicate;
  std::size_t driftImpressionIndex = 500000;
  std::size_t totalImpressions = 1000000;
  std::uint64_t rngSeed = 0;

  // The shipped calibration: exposures 40/15/15/15/15%, one single-attribute
  // predicate per ad, click probabilities tuned so the expected click count
  // over one million impressions is 3570, with the 40%-exposure ad carrying
  // about 65% of the clicks before the rewrite and 39% after it.
  static SyntheticRuleSet defaults(std::uint64_t seed);
};

// Simulates the impressions (age uniform 18-65, sex uniform binary, state
// uniform over 50, ad by exposure) and emits only the clicks, as events whose
// timestamp is the impression index. Fixed seed -> identical event list.
std::vector<Event> generate_synthetic(const SyntheticRuleSet& rules);

// CSV with header impression_index,age,sex,state,ad_id,category (UTF-8, LF).
void write_synthetic_csv(const std::string& path, std::span<const Event> events);
std::vector<Event> read_synthetic_csv(const std::string& path);

// Feature encoder for the ad stream: age / 100, sex flag, state one-hot (50
// reserved dimensions), candidate ad ID one-hot, candidate category one-hot
// (3 reserved dimensions). There is no user-ID block — every impression is a
// fresh user, demographics take that role. Nonzero count is at most 5.
class SyntheticAdapter : public DatasetAdapter {
 public:
  SyntheticAdapter();

  void observe(const Event& e) override;
  SparseVector encode(const Event& e, std::string_view candidateKey) const override;
  void consume(const Event& e) override;
  const Catalog& catalog() const override { return catalog_; }
  std::size_t feature_dim() const override { return registry_.size(); }

 private:
  FeatureRegistry registry_;
  Catalog catalog_;
  std::size_t ageIdx_ = 0;
  std::size_t sexIdx_ = 0;
  std::vector<std::size_t> stateIdx_;     // exactly 50
  std::vector<std::size_t> categoryIdx_;  // exactly 3
  std::unordered_map<std::string, std::size_t> adIdx_;
  std::unordered_map<std::string, int> adCategory_;
};

}  // namespace streamfm
