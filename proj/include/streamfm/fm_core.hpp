#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "streamfm/op_count.hpp"
#include "streamfm/rng.hpp"
#include "streamfm/sparse_vector.hpp"

namespace streamfm {

// Factorization machine parameters plus regularization state. V is row-major:
// row i holds the k factor weights of feature i. The embedded Rng is the
// model's own draw stream; init consumes d*k Gaussians and grow_model
// continues from there, so a (d, k, seed, sigma) tuple pins every parameter
// bit for the model's whole life.
struct FmModel {
  std::size_t k = 1;
  std::size_t d = 0;
  double w0 = 0.0;
  std::vector<double> w;        // size d
  std::vector<double> V;        // size d * k
  double eta = 0.01;
  double lambda0 = 0.0;
  double lambdaW = 0.0;
  std::vector<double> lambdaV;  // size k
  double initSigma = 0.01;
  std::uint64_t rngSeed = 0;
  Rng rng{0};

  double v(std::size_t i, std::size_t f) const { return V[i * k + f]; }
  double& v(std::size_t i, std::size_t f) { return V[i * k + f]; }
};

// Gradient of the squared loss, sparse like the input: only nonzero indices
// of x appear. dv is indices-major, dv[a * k + f] = dl/dv_{indices[a], f}.
struct FmGradient {
  double dw0 = 0.0;
  std::vector<std::size_t> indices;
  std::vector<double> dw;
  std::vector<double> dv;
  std::size_t k = 0;

  double dv_at(std::size_t a, std::size_t f) const { return dv[a * k + f]; }
};

// w0 = 0, w = 0, V ~ N(0, sigma^2) from a generator seeded by `seed`.
FmModel fm_init(std::size_t d, std::size_t k, double eta, double lambda0,
                double lambdaW, std::vector<double> lambdaV, double sigma,
                std::uint64_t seed);

// y(x) = w0 + w'x + sum_{i<j} (v_i'v_j) x_i x_j, via the factored per-factor
// form in O(k*Nz(x)).
double fm_predict(const FmModel& m, const SparseVector& x,
                  OpCount* ops = nullptr);

// Same value by the explicit O(d^2 k) pairwise loop; the test oracle for
// fm_predict and the one place that owns the i<j convention.
double fm_predict_naive(const FmModel& m, const SparseVector& x);

// Gradient of (y(x) - y)^2 at the current parameters; the per-factor sums
// are computed once and shared with the prediction.
FmGradient fm_gradient_squared_loss(const FmModel& m, const SparseVector& x,
                                    double y, OpCount* ops = nullptr);

}  // namespace streamfm
