#include "streamfm/online_fm.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "streamfm/rng.hpp"

namespace streamfm {

void theta_update(FmModel& m, const SparseVector& x, double y, OpCount* ops) {
  const FmGradient g = fm_gradient_squared_loss(m, x, y, ops);

  m.w0 -= m.eta * (g.dw0 + 2.0 * m.lambda0 * m.w0);
  if (ops) ops->mul_adds += 2;
  for (std::size_t a = 0; a < g.indices.size(); ++a) {
    const std::size_t i = g.indices[a];
    m.w[i] -= m.eta * (g.dw[a] + 2.0 * m.lambdaW * m.w[i]);
    if (ops) ops->mul_adds += 2;
    for (std::size_t f = 0; f < m.k; ++f) {
      double& v = m.v(i, f);
      v -= m.eta * (g.dv_at(a, f) + 2.0 * m.lambdaV[f] * v);
      if (ops) ops->mul_adds += 2;
    }
  }
}

LambdaGradients lambda_gradients(const FmModel& m, const SparseVector& xVal,
                                 double yVal, bool anticipateStep,
                                 OpCount* ops) {
  if (xVal.dim() > m.d) {
    throw std::invalid_argument("lambda_gradients: input dimension exceeds model dimension");
  }
  const auto& entries = xVal.entries();
  const std::size_t nnz = entries.size();

  // Pre-step values at the touched coordinates, then the values one
  // anticipated theta_update ahead (the update itself stays hypothetical).
  const double w0Pre = m.w0;
  std::vector<double> wPre(nnz);
  std::vector<double> vPre(nnz * m.k);
  for (std::size_t a = 0; a < nnz; ++a) {
    const std::size_t i = entries[a].index;
    wPre[a] = m.w[i];
    for (std::size_t f = 0; f < m.k; ++f) vPre[a * m.k + f] = m.v(i, f);
  }

  double w0Post = w0Pre;
  std::vector<double> wPost = wPre;
  std::vector<double> vPost = vPre;
  if (anticipateStep) {
    const FmGradient g = fm_gradient_squared_loss(m, xVal, yVal, ops);
    w0Post -= m.eta * (g.dw0 + 2.0 * m.lambda0 * w0Pre);
    for (std::size_t a = 0; a < nnz; ++a) {
      wPost[a] -= m.eta * (g.dw[a] + 2.0 * m.lambdaW * wPre[a]);
      for (std::size_t f = 0; f < m.k; ++f) {
        vPost[a * m.k + f] -= m.eta * (g.dv_at(a, f) +
                                       2.0 * m.lambdaV[f] * vPre[a * m.k + f]);
      }
    }
    if (ops) ops->mul_adds += 2 * (1 + nnz * (1 + m.k));
  }

  // Validation prediction under the (possibly anticipated) parameters.
  double yhat = w0Post;
  for (std::size_t a = 0; a < nnz; ++a) yhat += wPost[a] * entries[a].value;
  std::vector<double> sPost(m.k, 0.0);
  for (std::size_t f = 0; f < m.k; ++f) {
    double s2 = 0.0;
    for (std::size_t a = 0; a < nnz; ++a) {
      const double t = vPost[a * m.k + f] * entries[a].value;
      sPost[f] += t;
      s2 += t * t;
    }
    yhat += 0.5 * (sPost[f] * sPost[f] - s2);
  }
  if (ops) ops->mul_adds += nnz + m.k * (2 * nnz + 2);
  const double e2 = 2.0 * (yhat - yVal);

  LambdaGradients lg;
  lg.dLambda0 = e2 * (-2.0 * m.eta * w0Pre);
  double sumW = 0.0;
  for (std::size_t a = 0; a < nnz; ++a) {
    sumW += entries[a].value * wPre[a];
  }
  lg.dLambdaW = e2 * (-2.0 * m.eta * sumW);
  lg.dLambdaV.assign(m.k, 0.0);
  for (std::size_t f = 0; f < m.k; ++f) {
    double sum = 0.0;
    for (std::size_t a = 0; a < nnz; ++a) {
      const double xi = entries[a].value;
      const double bracket = xi * sPost[f] - vPost[a * m.k + f] * xi * xi;
      sum += bracket * vPre[a * m.k + f];
    }
    lg.dLambdaV[f] = e2 * (-2.0 * m.eta * sum);
  }
  if (ops) ops->mul_adds += 2 + nnz + m.k * (4 * nnz + 2);
  return lg;
}

void lambda_update(FmModel& m, const SparseVector& xVal, double yVal,
                   bool anticipateStep, OpCount* ops) {
  const LambdaGradients lg = lambda_gradients(m, xVal, yVal, anticipateStep, ops);
  m.lambda0 = std::max(0.0, m.lambda0 - m.eta * lg.dLambda0);
  m.lambdaW = std::max(0.0, m.lambdaW - m.eta * lg.dLambdaW);
  for (std::size_t f = 0; f < m.k; ++f) {
    m.lambdaV[f] = std::max(0.0, m.lambdaV[f] - m.eta * lg.dLambdaV[f]);
  }
  if (ops) ops->mul_adds += 2 + m.k;
}

void incremental_step(FmModel& m, const SparseVector& x,
                      const UpdatePolicy& policy, OpCount* ops) {
  if (policy.adaptiveRegularization) {
    lambda_update(m, x, 1.0, policy.anticipateStep, ops);
  }
  theta_update(m, x, 1.0, ops);
}

void batch_train(FmModel& m,
                 std::span<const std::pair<SparseVector, double>> train,
                 const UpdatePolicy& policy) {
  if (train.empty()) throw std::invalid_argument("batch_train: empty training set");
  if (policy.maxEpochs < 0) throw std::invalid_argument("batch_train: negative epoch count");

  std::vector<std::size_t> order(train.size());
  for (int epoch = 0; epoch < policy.maxEpochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(policy.shuffleSeed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);
    for (std::size_t idx : order) {
      theta_update(m, train[idx].first, train[idx].second);
    }
  }
}

void grow_model(FmModel& m, std::size_t newDim) {
  if (newDim < m.d) throw std::invalid_argument("grow_model: shrinking unsupported");
  if (newDim == m.d) return;

  m.w.resize(newDim, 0.0);
  m.V.resize(newDim * m.k);
  for (std::size_t i = m.d; i < newDim; ++i) {
    for (std::size_t f = 0; f < m.k; ++f) {
      m.v(i, f) = m.rng.gaussian(m.initSigma);
    }
  }
  m.d = newDim;
}

}  // namespace streamfm
