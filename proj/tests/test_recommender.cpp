#include <stdexcept>
#include <doctest.h>

#include <streamfm/fm_core.hpp>
#include <streamfm/recommender.hpp>
#include <streamfm/rng.hpp>
#include <streamfm/sparse_vector.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

namespace {

using streamfm::Catalog;
using streamfm::Rng;
using streamfm::ScoredList;
using streamfm::SparseEntry;
using streamfm::SparseVector;

Catalog make_catalog(const std::vector<std::string>& keys) {
  Catalog c;
  for (const auto& k : keys) c.add(k);
  return c;
}

}  // namespace

TEST_SUITE("recommender") {

TEST_CASE("catalog keeps insertion order and deduplicates") {
  Catalog c;
  CHECK(c.size() == 0);
  CHECK(c.add("b") == 0);
  CHECK(c.add("a") == 1);
  CHECK(c.add("b") == 0);  // repeated key keeps its original slot
  CHECK(c.size() == 2);
  CHECK(c.keys() == std::vector<std::string>{"b", "a"});
  CHECK(c.contains("a"));
  CHECK(!c.contains("z"));
  CHECK(c.position_of("a") == 1);
  CHECK_THROWS_AS(c.position_of("z"), std::out_of_range);
}

TEST_CASE("a one-item catalog ranks that item first") {
  const Catalog c = make_catalog({"only"});
  const ScoredList list =
      streamfm::score_all(c, [](std::size_t, const std::string&) { return 0.3; });
  REQUIRE(list.entries.size() == 1);
  CHECK(list.entries[0].itemKey == "only");
  CHECK(streamfm::rank_of(list, "only") == 0);
}

TEST_CASE("closeness to one beats raw score") {
  const Catalog c = make_catalog({"low", "high"});
  const ScoredList list = streamfm::score_all(c, [](std::size_t pos, const std::string&) {
    return pos == 0 ? 0.9 : 1.3;  // distances 0.1 and 0.3
  });
  CHECK(list.entries[0].itemKey == "low");
  CHECK(list.entries[1].itemKey == "high");
  CHECK(list.entries[0].distance == doctest::Approx(0.1));
  CHECK(list.entries[1].distance == doctest::Approx(0.3));
}

TEST_CASE("equal distances fall back to insertion order") {
  // 0.5 and 1.5 are both exactly 0.5 away from 1; whichever entered first wins.
  for (const bool lowFirst : {true, false}) {
    Catalog c;
    c.add(lowFirst ? "low" : "high");
    c.add(lowFirst ? "high" : "low");
    const ScoredList list =
        streamfm::score_all(c, [](std::size_t, const std::string& key) {
          return key == "low" ? 0.5 : 1.5;
        });
    CHECK(list.entries[0].itemKey == (lowFirst ? "low" : "high"));
    CHECK(list.entries[1].itemKey == (lowFirst ? "high" : "low"));
  }
}

TEST_CASE("undefined scores rank behind every finite one") {
  const Catalog c = make_catalog({"bad", "far", "near"});
  const ScoredList list = streamfm::score_all(c, [](std::size_t pos, const std::string&) {
    if (pos == 0) return std::numeric_limits<double>::quiet_NaN();
    return pos == 1 ? 50.0 : 1.25;
  });
  CHECK(list.entries[0].itemKey == "near");
  CHECK(list.entries[1].itemKey == "far");
  CHECK(list.entries[2].itemKey == "bad");
  CHECK(std::isinf(list.entries[2].distance));
}

TEST_CASE("an empty catalog is rejected") {
  const Catalog c;
  CHECK_THROWS_AS(
      streamfm::score_all(c, [](std::size_t, const std::string&) { return 0.0; }),
      std::invalid_argument);
}

TEST_CASE("top_n takes a prefix and validates n") {
  const Catalog c = make_catalog({"a", "b", "c"});
  const ScoredList list = streamfm::score_all(c, [](std::size_t pos, const std::string&) {
    return 1.0 + 0.1 * static_cast<double>(pos + 1);  // a closest, c farthest
  });
  CHECK(streamfm::top_n(list, 1) == std::vector<std::string>{"a"});
  CHECK(streamfm::top_n(list, 2) == std::vector<std::string>{"a", "b"});
  CHECK(streamfm::top_n(list, 10) == std::vector<std::string>{"a", "b", "c"});
  CHECK_THROWS_AS(streamfm::top_n(list, 0), std::invalid_argument);
  CHECK_THROWS_AS(streamfm::top_n(list, -3), std::invalid_argument);
}

TEST_CASE("rank_of agrees with a hand-sorted list") {
  const Catalog c = make_catalog({"a", "b", "c", "d", "e"});
  const std::vector<double> scores = {1.4, 0.99, 3.0, 1.05, 0.2};
  const ScoredList list = streamfm::score_all(
      c, [&](std::size_t pos, const std::string&) { return scores[pos]; });

  std::vector<std::pair<double, std::string>> expected;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    expected.emplace_back(std::abs(scores[i] - 1.0), c.keys()[i]);
  }
  std::stable_sort(expected.begin(), expected.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t r = 0; r < expected.size(); ++r) {
    CHECK(list.entries[r].itemKey == expected[r].second);
    CHECK(streamfm::rank_of(list, expected[r].second) == r);
  }
  CHECK_THROWS_AS(streamfm::rank_of(list, "missing"), std::out_of_range);
}

TEST_CASE("ranking with a feature model never mutates it") {
  streamfm::FmModel m =
      streamfm::fm_init(6, 3, 0.01, 0.1, 0.1, {0.1, 0.1, 0.1}, 0.01, 5);
  Rng rng(9);
  for (std::size_t i = 0; i < m.w.size(); ++i) m.w[i] = rng.gaussian(0.5);
  const std::vector<double> wBefore = m.w;
  const std::vector<double> vBefore = m.V;
  const double w0Before = m.w0;

  const Catalog c = make_catalog({"x", "y", "z"});
  auto encode = [](const std::string& key) {
    const std::size_t idx = static_cast<std::size_t>(key[0] - 'x');
    return SparseVector(6, {{idx, 1.0}, {5, 0.5}});
  };
  const ScoredList list = streamfm::score_all(m, c, encode);
  REQUIRE(list.entries.size() == 3);

  CHECK(m.w0 == w0Before);
  CHECK(std::memcmp(m.w.data(), wBefore.data(), wBefore.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(m.V.data(), vBefore.data(), vBefore.size() * sizeof(double)) == 0);
}

TEST_CASE("feature-model ranking equals independent per-item predictions") {
  streamfm::FmModel m =
      streamfm::fm_init(6, 3, 0.01, 0.1, 0.1, {0.1, 0.1, 0.1}, 0.01, 5);
  Rng rng(9);
  for (std::size_t i = 0; i < m.w.size(); ++i) m.w[i] = rng.gaussian(0.5);
  m.w0 = 0.4;

  const Catalog c = make_catalog({"x", "y", "z"});
  auto encode = [](const std::string& key) {
    const std::size_t idx = static_cast<std::size_t>(key[0] - 'x');
    return SparseVector(6, {{idx, 1.0}, {5, 0.5}});
  };
  const ScoredList list = streamfm::score_all(m, c, encode);
  for (const auto& entry : list.entries) {
    const double direct = streamfm::fm_predict(m, encode(entry.itemKey));
    CHECK(entry.score == direct);  // exact: same code path per item
  }
  const ScoredList again = streamfm::score_all(m, c, encode);
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    CHECK(list.entries[i].itemKey == again.entries[i].itemKey);
    CHECK(list.entries[i].score == again.entries[i].score);
  }
}

TEST_CASE("latent-model ranking matches dot products") {
  streamfm::MfModel m = streamfm::mf_init(2, 0.01, 0.0, 0.01, 3);
  m.P["u"] = {2.0, 0.0};
  m.Q["a"] = {0.5, 1.0};   // score 1.0, distance 0
  m.Q["b"] = {0.25, 4.0};  // score 0.5, distance 0.5
  const Catalog c = make_catalog({"b", "a"});
  const ScoredList list = streamfm::score_all(m, "u", c);
  CHECK(list.entries[0].itemKey == "a");
  CHECK(list.entries[0].score == doctest::Approx(1.0));
  CHECK(list.entries[1].itemKey == "b");
  CHECK(list.entries[1].score == doctest::Approx(0.5));
}

}  // TEST_SUITE
