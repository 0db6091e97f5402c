#include <stdexcept>
#include <doctest.h>

#include <streamfm/event.hpp>
#include <streamfm/synthetic.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using streamfm::Event;
using streamfm::SyntheticRuleSet;

namespace fs = std::filesystem;

bool same_events(const std::vector<Event>& a, const std::vector<Event>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].userKey != b[i].userKey || a[i].itemKey != b[i].itemKey ||
        a[i].timestamp != b[i].timestamp || a[i].age != b[i].age ||
        a[i].sex != b[i].sex || a[i].state != b[i].state ||
        a[i].category != b[i].category) {
      return false;
    }
  }
  return true;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_SUITE("synthetic") {

TEST_CASE("the default rule set is internally consistent") {
  const SyntheticRuleSet rules = SyntheticRuleSet::defaults(0);
  REQUIRE(rules.rules.size() == 5);
  double exposure = 0.0;
  for (const auto& rule : rules.rules) {
    CHECK(rule.clickProb > 0.0);
    CHECK(rule.clickProb < 1.0);
    CHECK(rule.exposure > 0.0);
    CHECK(rule.category >= 0);
    CHECK(rule.category < 3);
    exposure += rule.exposure;
  }
  CHECK(exposure == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rules.driftAd < rules.rules.size());
  CHECK(rules.driftImpressionIndex == 500000);
  CHECK(rules.totalImpressions == 1000000);
  // All three categories are in play.
  std::map<int, int> categories;
  for (const auto& rule : rules.rules) categories[rule.category]++;
  CHECK(categories.size() == 3);
}

TEST_CASE("generation is deterministic per seed") {
  const std::vector<Event> a = streamfm::generate_synthetic(SyntheticRuleSet::defaults(0));
  const std::vector<Event> b = streamfm::generate_synthetic(SyntheticRuleSet::defaults(0));
  const std::vector<Event> c = streamfm::generate_synthetic(SyntheticRuleSet::defaults(1));
  CHECK(same_events(a, b));
  CHECK(!same_events(a, c));
}

TEST_CASE("the default calibration lands near its expected click volume") {
  const std::vector<Event> events =
      streamfm::generate_synthetic(SyntheticRuleSet::defaults(0));
  // Expected clicks over a million impressions: 3570.
  CHECK(events.size() > 3420);
  CHECK(events.size() < 3720);

  // The heavily exposed ad carries the majority of the clicks.
  std::map<std::string, int> perAd;
  for (const Event& e : events) perAd[e.itemKey]++;
  CHECK(perAd.size() == 5);
  const double topShare =
      static_cast<double>(perAd.at("ad0")) / static_cast<double>(events.size());
  CHECK(topShare > 0.55);
  CHECK(topShare < 0.75);

  // Timestamps are impression indices: strictly increasing, within range.
  for (std::size_t i = 1; i < events.size(); ++i) {
    CHECK(events[i - 1].timestamp < events[i].timestamp);
  }
  CHECK(events.back().timestamp < 1000000);
  // Every clicker matches its ad's audience bounds by construction.
  for (const Event& e : events) {
    CHECK(e.age >= 18);
    CHECK(e.age <= 65);
    CHECK((e.sex == 0 || e.sex == 1));
    CHECK(e.state >= 0);
    CHECK(e.state < 50);
    CHECK(e.category >= 0);
    CHECK(e.category < 3);
  }
}

TEST_CASE("the rewritten rule flips exactly one ad's audience") {
  const SyntheticRuleSet rules = SyntheticRuleSet::defaults(0);
  const std::vector<Event> events = streamfm::generate_synthetic(rules);

  // Clicker age statistics per ad, before and after the rewrite point.
  struct Half {
    int count = 0;
    double ageSum = 0.0;
    int minAge = 999;
    int maxAge = -1;
  };
  std::map<std::string, std::pair<Half, Half>> ads;  // ad -> (pre, post)
  for (const Event& e : events) {
    const bool post =
        static_cast<std::size_t>(e.timestamp) >= rules.driftImpressionIndex;
    Half& h = post ? ads[e.itemKey].second : ads[e.itemKey].first;
    h.count++;
    h.ageSum += e.age;
    h.minAge = std::min(h.minAge, e.age);
    h.maxAge = std::max(h.maxAge, e.age);
  }
  const std::string driftedKey = rules.rules[rules.driftAd].adKey;
  for (const auto& [adKey, halves] : ads) {
    const Half& pre = halves.first;
    const Half& post = halves.second;
    REQUIRE(pre.count > 50);
    REQUIRE(post.count > 50);
    if (adKey == driftedKey) {
      // Audiences on the two sides of the rewrite are disjoint age bands,
      // and the new band is much smaller, so the click volume collapses.
      CHECK(pre.maxAge <= 57);
      CHECK(post.minAge >= 58);
      CHECK(post.count * 3 < pre.count);
    } else {
      // Untouched ads keep a stationary audience (mean clicker age stable).
      CHECK(std::abs(pre.ageSum / pre.count - post.ageSum / post.count) < 3.0);
    }
  }
}

TEST_CASE("zero click probability produces no events") {
  SyntheticRuleSet rules = SyntheticRuleSet::defaults(0);
  for (auto& rule : rules.rules) rule.clickProb = 0.0;
  rules.totalImpressions = 10000;
  // clickProb = 0 passes validation (the bound is prob <= 1); no impression
  // can convert.
  CHECK(streamfm::generate_synthetic(rules).empty());
}

TEST_CASE("malformed rule sets are rejected") {
  SyntheticRuleSet rules = SyntheticRuleSet::defaults(0);
  rules.rules[0].exposure += 0.5;  // exposures no longer sum to one
  CHECK_THROWS_AS(streamfm::generate_synthetic(rules), std::invalid_argument);

  rules = SyntheticRuleSet::defaults(0);
  rules.rules[1].clickProb = 1.5;
  CHECK_THROWS_AS(streamfm::generate_synthetic(rules), std::invalid_argument);

  rules = SyntheticRuleSet::defaults(0);
  rules.driftAd = 99;
  CHECK_THROWS_AS(streamfm::generate_synthetic(rules), std::invalid_argument);
}

TEST_CASE("the click log round-trips through its CSV form") {
  SyntheticRuleSet rules = SyntheticRuleSet::defaults(0);
  rules.totalImpressions = 50000;
  const std::vector<Event> events = streamfm::generate_synthetic(rules);
  REQUIRE(!events.empty());

  const fs::path dir = fs::temp_directory_path() / "streamfm-synthetic-fixture";
  fs::create_directories(dir);
  const std::string path = (dir / "clicks.csv").string();

  streamfm::write_synthetic_csv(path, events);
  const std::string text = read_all(path);
  CHECK(text.rfind("impression_index,age,sex,state,ad_id,category\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);  // LF only, on every platform

  const std::vector<Event> back = streamfm::read_synthetic_csv(path);
  CHECK(same_events(events, back));

  // Writing twice produces identical bytes.
  const std::string path2 = (dir / "clicks2.csv").string();
  streamfm::write_synthetic_csv(path2, events);
  CHECK(read_all(path2) == text);
}

TEST_CASE("the CSV reader reports malformed rows by line") {
  const fs::path dir = fs::temp_directory_path() / "streamfm-synthetic-fixture";
  fs::create_directories(dir);
  const std::string path = (dir / "bad.csv").string();

  SUBCASE("wrong header") {
    std::ofstream(path, std::ios::binary) << "nope\n";
    CHECK_THROWS_WITH_AS(streamfm::read_synthetic_csv(path),
                         doctest::Contains("header"), std::runtime_error);
  }
  SUBCASE("wrong field count") {
    std::ofstream(path, std::ios::binary)
        << "impression_index,age,sex,state,ad_id,category\n"
        << "7,30,1,12,ad1\n";
    CHECK_THROWS_WITH_AS(streamfm::read_synthetic_csv(path),
                         doctest::Contains("line 2"), std::runtime_error);
  }
  SUBCASE("non-numeric field") {
    std::ofstream(path, std::ios::binary)
        << "impression_index,age,sex,state,ad_id,category\n"
        << "7,thirty,1,12,ad1,0\n";
    CHECK_THROWS_AS(streamfm::read_synthetic_csv(path), std::runtime_error);
  }
}

TEST_CASE("the ad feature space is laid out up front") {
  streamfm::SyntheticAdapter adapter;
  // age + sex + 50 states + 3 categories are reserved before any event.
  CHECK(adapter.feature_dim() == 55);
  CHECK(adapter.catalog().size() == 0);

  Event e;
  e.userKey = "u0";
  e.itemKey = "ad3";
  e.age = 30;
  e.sex = 1;
  e.state = 7;
  e.category = 1;
  adapter.observe(e);
  CHECK(adapter.feature_dim() == 56);  // one new ad column
  CHECK(adapter.catalog().keys() == std::vector<std::string>{"ad3"});

  const streamfm::SparseVector x = adapter.encode(e, "ad3");
  CHECK(x.dim() == 56);
  CHECK(x.nnz() == 5);  // age, sex, state, category, ad
  CHECK(x.entries()[0].value == doctest::Approx(0.30));  // age / 100

  Event female = e;
  female.sex = 0;
  female.itemKey = "ad3";
  adapter.observe(female);
  CHECK(adapter.encode(female, "ad3").nnz() == 4);  // sex flag only for sex=1
}

TEST_CASE("candidate encodings vary only in the ad block") {
  streamfm::SyntheticAdapter adapter;
  Event a;
  a.userKey = "u0";
  a.itemKey = "ad0";
  a.age = 44;
  a.sex = 0;
  a.state = 3;
  a.category = 2;
  adapter.observe(a);
  Event b = a;
  b.userKey = "u1";
  b.itemKey = "ad1";
  b.category = 2;  // same category as ad0
  adapter.observe(b);

  const streamfm::SparseVector forA = adapter.encode(b, "ad0");
  const streamfm::SparseVector forB = adapter.encode(b, "ad1");
  REQUIRE(forA.nnz() == 4);  // age, state, category, ad (sex=0)
  REQUIRE(forB.nnz() == 4);
  // Same demographics and same category column; only the ad column differs.
  CHECK(forA.entries()[0] == forB.entries()[0]);
  CHECK(forA.entries()[1] == forB.entries()[1]);
  CHECK(forA.entries()[2] == forB.entries()[2]);
  CHECK(forA.entries()[3].index != forB.entries()[3].index);

  // A candidate that was never observed cannot be encoded.
  CHECK_THROWS_AS(adapter.encode(b, "ad9"), std::invalid_argument);
}

TEST_CASE("the adapter validates attribute ranges") {
  streamfm::SyntheticAdapter adapter;
  Event e;
  e.userKey = "u0";
  e.itemKey = "ad0";
  e.age = 30;
  e.sex = 1;
  e.state = 50;  // out of range
  e.category = 0;
  CHECK_THROWS_AS(adapter.observe(e), std::invalid_argument);
  e.state = 5;
  e.category = 3;  // out of range
  CHECK_THROWS_AS(adapter.observe(e), std::invalid_argument);
}

}  // TEST_SUITE
