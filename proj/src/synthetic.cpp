#include "streamfm/synthetic.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "streamfm/rng.hpp"

namespace streamfm {

namespace {

bool matches(const AdPredicate& p, int age, int sex, int state) {
  int value = 0;
  switch (p.attr) {
    case AdAttr::age: value = age; break;
    case AdAttr::sex: value = sex; break;
    case AdAttr::state: value = state; break;
  }
  return p.lo <= value && value <= p.hi;
}

void validate(const SyntheticRuleSet& rules) {
  if (rules.rules.size() != 5) {
    throw std::invalid_argument("synthetic: rule set must have exactly 5 ads");
  }
  double exposureSum = 0.0;
  for (const AdRule& r : rules.rules) {
    if (r.clickProb < 0.0 || r.clickProb > 1.0) {
      throw std::invalid_argument("synthetic: click probability out of [0,1]");
    }
    if (r.exposure < 0.0) throw std::invalid_argument("synthetic: negative exposure");
    exposureSum += r.exposure;
  }
  if (std::abs(exposureSum - 1.0) > 1e-9) {
    throw std::invalid_argument("synthetic: exposures must sum to 1");
  }
  if (rules.driftAd >= rules.rules.size()) {
    throw std::invalid_argument("synthetic: drift ad index out of range");
  }
}

}  // namespace

SyntheticRuleSet SyntheticRuleSet::defaults(std::uint64_t seed) {
  // Expected clicks from 1e6 impressions: ad0 1933 + 387 (its audience shrinks
  // from 40/48 ages to 8/48 at the drift point), ads 1-4 stationary at 312.5
  // each; 3570 in total. The rewrite both retargets the popular ad and cuts
  // its click volume, so frozen models keep favoring an ad that has mostly
  // stopped converting.
  SyntheticRuleSet rs;
  rs.rules = {
      {"ad0", 0, {AdAttr::age, 18, 57}, 0.0116, 0.40},
      {"ad1", 0, {AdAttr::sex, 1, 1}, 0.0041667, 0.15},
      {"ad2", 1, {AdAttr::sex, 0, 0}, 0.0041667, 0.15},
      {"ad3", 1, {AdAttr::age, 18, 41}, 0.0041667, 0.15},
      {"ad4", 2, {AdAttr::state, 0, 24}, 0.0041667, 0.15},
  };
  rs.driftAd = 0;
  rs.driftedPredicate = {AdAttr::age, 58, 65};
  rs.rngSeed = seed;
  return rs;
}

std::vector<Event> generate_synthetic(const SyntheticRuleSet& rules) {
  validate(rules);
  Rng rng(rules.rngSeed);
  std::vector<Event> events;

  for (std::size_t idx = 0; idx < rules.totalImpressions; ++idx) {
    const int age = 18 + static_cast<int>(rng.bounded(48));
    const int sex = static_cast<int>(rng.bounded(2));
    const int state = static_cast<int>(rng.bounded(50));

    const double u = rng.uniform();
    std::size_t ad = rules.rules.size() - 1;
    double cumulative = 0.0;
    for (std::size_t a = 0; a < rules.rules.size(); ++a) {
      cumulative += rules.rules[a].exposure;
      if (u < cumulative) {
        ad = a;
        break;
      }
    }

    const AdRule& rule = rules.rules[ad];
    const AdPredicate& predicate =
        (ad == rules.driftAd && idx >= rules.driftImpressionIndex)
            ? rules.driftedPredicate
            : rule.predicate;
    if (!matches(predicate, age, sex, state)) continue;
    if (rng.uniform() >= rule.clickProb) continue;

    Event e;
    // Impressions carry no user ID; the demographic profile is the identity.
    e.userKey = "a" + std::to_string(age) + "s" + std::to_string(sex) + "g" +
                std::to_string(state);
    e.itemKey = rule.adKey;
    e.timestamp = static_cast<long long>(idx);
    e.age = age;
    e.sex = sex;
    e.state = state;
    e.category = rule.category;
    events.push_back(std::move(e));
  }
  return events;
}

void write_synthetic_csv(const std::string& path, std::span<const Event> events) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "impression_index,age,sex,state,ad_id,category\n";
  for (const Event& e : events) {
    out << e.timestamp << ',' << e.age << ',' << e.sex << ',' << e.state << ','
        << e.itemKey << ',' << e.category << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<Event> read_synthetic_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line) || line != "impression_index,age,sex,state,ad_id,category") {
    throw std::runtime_error(path + ": missing or unexpected CSV header");
  }

  auto parseField = [&](std::string_view text, std::size_t lineNo) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw std::runtime_error(path + " line " + std::to_string(lineNo) +
                               ": expected an integer, got \"" + std::string(text) + "\"");
    }
    return value;
  };

  std::vector<Event> events;
  for (std::size_t lineNo = 2; std::getline(in, line); ++lineNo) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const std::size_t pos = rest.find(',');
      if (pos == std::string_view::npos) {
        fields.push_back(rest);
        break;
      }
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    if (fields.size() != 6) {
      throw std::runtime_error(path + " line " + std::to_string(lineNo) +
                               ": expected 6 comma-separated fields");
    }
    Event e;
    e.timestamp = parseField(fields[0], lineNo);
    e.age = static_cast<int>(parseField(fields[1], lineNo));
    e.sex = static_cast<int>(parseField(fields[2], lineNo));
    e.state = static_cast<int>(parseField(fields[3], lineNo));
    e.itemKey = std::string(fields[4]);
    e.category = static_cast<int>(parseField(fields[5], lineNo));
    e.userKey = "a" + std::to_string(e.age) + "s" + std::to_string(e.sex) +
                "g" + std::to_string(e.state);
    events.push_back(std::move(e));
  }
  return events;
}

SyntheticAdapter::SyntheticAdapter() {
  ageIdx_ = registry_.intern_numeric("age");
  sexIdx_ = registry_.intern_numeric("sex");
  stateIdx_.reserve(50);
  for (int s = 0; s < 50; ++s) {
    stateIdx_.push_back(registry_.intern("state", std::to_string(s)));
  }
  categoryIdx_.reserve(3);
  for (int c = 0; c < 3; ++c) {
    categoryIdx_.push_back(registry_.intern("cat", std::to_string(c)));
  }
}

void SyntheticAdapter::observe(const Event& e) {
  if (e.state < 0 || e.state >= 50) {
    throw std::invalid_argument("synthetic encoder: state out of range");
  }
  if (e.category < 0 || e.category >= 3) {
    throw std::invalid_argument("synthetic encoder: category out of range");
  }
  if (!adIdx_.count(e.itemKey)) {
    adIdx_.emplace(e.itemKey, registry_.intern("ad", e.itemKey));
    adCategory_.emplace(e.itemKey, e.category);
    catalog_.add(e.itemKey);
  }
}

SparseVector SyntheticAdapter::encode(const Event& e, std::string_view candidateKey) const {
  const auto adIt = adIdx_.find(std::string(candidateKey));
  if (adIt == adIdx_.end()) {
    throw std::invalid_argument("synthetic encoder: unregistered candidate ad");
  }
  if (e.state < 0 || e.state >= 50) {
    throw std::invalid_argument("synthetic encoder: state out of range");
  }
  const int category = adCategory_.at(std::string(candidateKey));

  // Registration order guarantees age < sex < state < category < ad indices,
  // so the entries are already sorted.
  std::vector<SparseEntry> entries;
  entries.reserve(5);
  entries.push_back({ageIdx_, e.age / 100.0});
  if (e.sex != 0) entries.push_back({sexIdx_, 1.0});
  entries.push_back({stateIdx_[static_cast<std::size_t>(e.state)], 1.0});
  entries.push_back({categoryIdx_[static_cast<std::size_t>(category)], 1.0});
  entries.push_back({adIt->second, 1.0});
  return SparseVector(registry_.size(), std::move(entries));
}

void SyntheticAdapter::consume(const Event&) {}

}  // namespace streamfm
