#include "streamfm/mf_core.hpp"

#include <numeric>
#include <stdexcept>

namespace streamfm {

namespace {

std::vector<double>& lazy_vector(
    MfModel& m, std::unordered_map<std::string, std::vector<double>>& reg,
    std::string_view key) {
  auto it = reg.find(std::string(key));
  if (it != reg.end()) return it->second;
  std::vector<double> vec(m.k);
  for (double& x : vec) x = m.rng.gaussian(m.initSigma);
  return reg.emplace(std::string(key), std::move(vec)).first->second;
}

}  // namespace

MfModel mf_init(std::size_t k, double eta, double lambda, double sigma,
                std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("mf_init: rank k must be >= 1");
  if (eta <= 0.0) throw std::invalid_argument("mf_init: eta must be positive");
  if (lambda < 0.0) throw std::invalid_argument("mf_init: lambda must be non-negative");
  if (sigma <= 0.0) throw std::invalid_argument("mf_init: sigma must be positive");

  MfModel m;
  m.k = k;
  m.eta = eta;
  m.lambda = lambda;
  m.initSigma = sigma;
  m.rngSeed = seed;
  m.rng = Rng(seed);
  return m;
}

std::vector<double>& mf_user_vector(MfModel& m, std::string_view userKey) {
  return lazy_vector(m, m.P, userKey);
}

std::vector<double>& mf_item_vector(MfModel& m, std::string_view itemKey) {
  return lazy_vector(m, m.Q, itemKey);
}

void imf_update(MfModel& m, std::string_view userKey, std::string_view itemKey) {
  std::vector<double>& p = mf_user_vector(m, userKey);
  std::vector<double>& q = mf_item_vector(m, itemKey);

  const double residual =
      1.0 - std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
  const std::vector<double> pPre = p;
  for (std::size_t f = 0; f < m.k; ++f) {
    p[f] += 2.0 * m.eta * (residual * q[f] - m.lambda * pPre[f]);
    q[f] += 2.0 * m.eta * (residual * pPre[f] - m.lambda * q[f]);
  }
}

void mf_batch_train(MfModel& m,
                    std::span<const std::pair<std::string, std::string>> events,
                    int epochs, std::uint64_t seed) {
  if (epochs < 0) throw std::invalid_argument("mf_batch_train: negative epoch count");

  for (const auto& [user, item] : events) {
    mf_user_vector(m, user);
    mf_item_vector(m, item);
  }

  std::vector<std::size_t> order(events.size());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);
    for (std::size_t idx : order) {
      imf_update(m, events[idx].first, events[idx].second);
    }
  }
}

std::vector<double> mf_score_items(MfModel& m, std::string_view userKey,
                                   std::span<const std::string> items) {
  const std::vector<double>& p = mf_user_vector(m, userKey);
  std::vector<double> scores;
  scores.reserve(items.size());
  for (const std::string& item : items) {
    const std::vector<double>& q = mf_item_vector(m, item);
    scores.push_back(std::inner_product(p.begin(), p.end(), q.begin(), 0.0));
  }
  return scores;
}

}  // namespace streamfm
