#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "streamfm/fm_core.hpp"
#include "streamfm/op_count.hpp"
#include "streamfm/sparse_vector.hpp"

namespace streamfm {

// Knobs for the training loops. anticipateStep only matters when
// adaptiveRegularization is on: it decides whether the lambda gradient is
// evaluated at the parameters one SGD step ahead or at the current ones.
struct UpdatePolicy {
  bool adaptiveRegularization = true;
  bool anticipateStep = true;
  int maxEpochs = 30;
  std::uint64_t shuffleSeed = 0;
};

// Pre-clamp gradients of the validation loss w.r.t. the regularization
// values. Exposed separately so they can be checked against finite
// differences.
struct LambdaGradients {
  double dLambda0 = 0.0;
  double dLambdaW = 0.0;
  std::vector<double> dLambdaV;  // size k
};

// One SGD step on (x, y): theta <- theta - eta * (dLoss/dTheta + 2*lambda*theta),
// applied to w0 and to the rows of w and V at the nonzero indices of x only.
// All coordinates use their pre-update values.
void theta_update(FmModel& m, const SparseVector& x, double y,
                  OpCount* ops = nullptr);

// Gradients of the squared loss on (xVal, yVal) w.r.t. lambda0, lambdaW and
// each lambdaV[f], taken through one anticipated SGD step on the same sample:
// with theta+ = theta - eta*(dLoss/dTheta + 2*lambda*theta) (or theta+ = theta
// when anticipate is false) and e' = predict(xVal | theta+) - yVal,
//   dLoss'/dLambda0  = 2*e' * (-2*eta*w0)
//   dLoss'/dLambdaW  = 2*e' * sum_i x_i * (-2*eta*w_i)
//   dLoss'/dLambdaVf = 2*e' * sum_i [x_i*S+_f - v+_{i,f}*x_i^2] * (-2*eta*v_{i,f})
// where unsuperscripted values are pre-step and S+_f = sum_j v+_{j,f} x_j.
// The model is not modified.
LambdaGradients lambda_gradients(const FmModel& m, const SparseVector& xVal,
                                 double yVal, bool anticipateStep = true,
                                 OpCount* ops = nullptr);

// Gradient step on the regularization values with clamping to zero:
// lambda <- max(0, lambda - eta * dLoss'/dLambda). Only the lambda fields of
// the model change; w0, w and V are untouched.
void lambda_update(FmModel& m, const SparseVector& xVal, double yVal,
                   bool anticipateStep = true, OpCount* ops = nullptr);

// One streaming update on a positive-only event (target fixed at y = 1):
// lambda_update on (x, 1) first when adaptive regularization is enabled, then
// theta_update on (x, 1). Single pass, no iteration.
void incremental_step(FmModel& m, const SparseVector& x,
                      const UpdatePolicy& policy, OpCount* ops = nullptr);

// Batch SGD over a training set: policy.maxEpochs epochs, each shuffling the
// samples with a generator seeded by (shuffleSeed, epoch) and applying
// theta_update per sample. Regularization values stay fixed here.
void batch_train(FmModel& m,
                 std::span<const std::pair<SparseVector, double>> train,
                 const UpdatePolicy& policy);

// Extend the model to newDim features: zeros appended to w, new V rows drawn
// from N(0, initSigma^2) using the model's own generator. Existing parameters
// are bit-unchanged; shrinking is rejected.
void grow_model(FmModel& m, std::size_t newDim);

}  // namespace streamfm
