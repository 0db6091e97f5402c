#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "streamfm/rng.hpp"

namespace streamfm {

// Matrix-factorization baseline over (userKey, itemKey) events with the
// positive-only target y = 1. The rating matrix is never materialized: latent
// vectors live in per-key registries and are created lazily, drawn from
// N(0, initSigma^2) by the model's generator in first-encounter order.
struct MfModel {
  std::size_t k = 1;
  double eta = 0.01;
  double lambda = 0.0;
  double initSigma = 0.01;
  std::uint64_t rngSeed = 0;
  Rng rng{0};
  std::unordered_map<std::string, std::vector<double>> P;  // userKey -> p_u
  std::unordered_map<std::string, std::vector<double>> Q;  // itemKey -> q_i
};

MfModel mf_init(std::size_t k, double eta, double lambda, double sigma,
                std::uint64_t seed);

// Latent vector for a key, created on first encounter. Insertion order plus
// the seed fully determine every vector.
std::vector<double>& mf_user_vector(MfModel& m, std::string_view userKey);
std::vector<double>& mf_item_vector(MfModel& m, std::string_view itemKey);

// One joint gradient step on (1 - p_u.q_i)^2 + lambda*(|p_u|^2 + |q_i|^2):
//   p_u <- p_u + 2*eta*((1 - p_u.q_i)*q_i - lambda*p_u)
//   q_i <- q_i + 2*eta*((1 - p_u.q_i)*p_u - lambda*q_i)
// Both right-hand sides use pre-update values (simultaneous semantics).
void imf_update(MfModel& m, std::string_view userKey, std::string_view itemKey);

// SGD over the events: one initialization pass in event order (so lazy
// creation is shuffle-independent), then `epochs` epochs, each shuffling the
// events with a generator seeded by (seed, epoch) and applying imf_update.
void mf_batch_train(MfModel& m,
                    std::span<const std::pair<std::string, std::string>> events,
                    int epochs, std::uint64_t seed);

// p_u.q_i per item. Unknown keys get a frozen random vector on first
// encounter so a full ranking is always defined; no trained value changes.
std::vector<double> mf_score_items(MfModel& m, std::string_view userKey,
                                   std::span<const std::string> items);

}  // namespace streamfm
