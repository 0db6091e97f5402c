#include "streamfm/fm_core.hpp"

#include <stdexcept>

namespace streamfm {

namespace {

struct NoCount {
  void add(std::uint64_t) {}
};

struct Counting {
  OpCount* c;
  void add(std::uint64_t n) { c->mul_adds += n; }
};

void check_dim(const FmModel& m, const SparseVector& x) {
  if (x.dim() > m.d) {
    throw std::invalid_argument("fm: input dimension exceeds model dimension");
  }
}

// Entries-outer iteration keeps the V row accesses contiguous; per factor the
// accumulation order over entries is the same as a factor-outer loop, so the
// result is bit-identical either way.
template <class Counter>
double predict_impl(const FmModel& m, const SparseVector& x, Counter ops) {
  thread_local std::vector<double> s, s2;
  s.assign(m.k, 0.0);
  s2.assign(m.k, 0.0);

  double yhat = m.w0;
  for (const SparseEntry& e : x.entries()) {
    yhat += m.w[e.index] * e.value;
    ops.add(1);
    const double* row = &m.V[e.index * m.k];
    for (std::size_t f = 0; f < m.k; ++f) {
      const double t = row[f] * e.value;
      s[f] += t;
      s2[f] += t * t;
      ops.add(2);
    }
  }
  for (std::size_t f = 0; f < m.k; ++f) {
    yhat += 0.5 * (s[f] * s[f] - s2[f]);
    ops.add(2);
  }
  return yhat;
}

}  // namespace

FmModel fm_init(std::size_t d, std::size_t k, double eta, double lambda0,
                double lambdaW, std::vector<double> lambdaV, double sigma,
                std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("fm_init: rank k must be >= 1");
  if (eta <= 0.0) throw std::invalid_argument("fm_init: eta must be positive");
  if (sigma <= 0.0) throw std::invalid_argument("fm_init: sigma must be positive");
  if (lambda0 < 0.0 || lambdaW < 0.0) {
    throw std::invalid_argument("fm_init: regularization must be non-negative");
  }
  if (lambdaV.size() != k) {
    throw std::invalid_argument("fm_init: lambdaV must have length k");
  }
  for (double l : lambdaV) {
    if (l < 0.0) throw std::invalid_argument("fm_init: regularization must be non-negative");
  }

  FmModel m;
  m.k = k;
  m.d = d;
  m.w0 = 0.0;
  m.w.assign(d, 0.0);
  m.eta = eta;
  m.lambda0 = lambda0;
  m.lambdaW = lambdaW;
  m.lambdaV = std::move(lambdaV);
  m.initSigma = sigma;
  m.rngSeed = seed;
  m.rng = Rng(seed);
  m.V.resize(d * k);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      m.v(i, f) = m.rng.gaussian(sigma);
    }
  }
  return m;
}

double fm_predict(const FmModel& m, const SparseVector& x, OpCount* ops) {
  check_dim(m, x);
  if (ops) return predict_impl(m, x, Counting{ops});
  return predict_impl(m, x, NoCount{});
}

double fm_predict_naive(const FmModel& m, const SparseVector& x) {
  check_dim(m, x);
  std::vector<double> dense(m.d, 0.0);
  for (const SparseEntry& e : x.entries()) dense[e.index] = e.value;

  double yhat = m.w0;
  for (std::size_t i = 0; i < m.d; ++i) yhat += m.w[i] * dense[i];
  for (std::size_t i = 0; i < m.d; ++i) {
    for (std::size_t j = i + 1; j < m.d; ++j) {
      double dot = 0.0;
      for (std::size_t f = 0; f < m.k; ++f) dot += m.v(i, f) * m.v(j, f);
      yhat += dot * dense[i] * dense[j];
    }
  }
  return yhat;
}

FmGradient fm_gradient_squared_loss(const FmModel& m, const SparseVector& x,
                                    double y, OpCount* ops) {
  check_dim(m, x);
  const std::size_t nnz = x.nnz();

  // One pass for the per-factor sums, shared with the prediction value.
  std::vector<double> s(m.k, 0.0);
  double yhat = m.w0;
  for (const SparseEntry& e : x.entries()) {
    yhat += m.w[e.index] * e.value;
    if (ops) ops->mul_adds += 1;
  }
  for (std::size_t f = 0; f < m.k; ++f) {
    double s2 = 0.0;
    for (const SparseEntry& e : x.entries()) {
      const double t = m.v(e.index, f) * e.value;
      s[f] += t;
      s2 += t * t;
      if (ops) ops->mul_adds += 2;
    }
    yhat += 0.5 * (s[f] * s[f] - s2);
    if (ops) ops->mul_adds += 2;
  }

  const double e2 = 2.0 * (yhat - y);

  FmGradient g;
  g.k = m.k;
  g.dw0 = e2;
  g.indices.reserve(nnz);
  g.dw.reserve(nnz);
  g.dv.resize(nnz * m.k);
  std::size_t a = 0;
  for (const SparseEntry& e : x.entries()) {
    g.indices.push_back(e.index);
    g.dw.push_back(e2 * e.value);
    if (ops) ops->mul_adds += 1;
    for (std::size_t f = 0; f < m.k; ++f) {
      g.dv[a * m.k + f] =
          e2 * (e.value * s[f] - m.v(e.index, f) * e.value * e.value);
      if (ops) ops->mul_adds += 3;
    }
    ++a;
  }
  return g;
}

}  // namespace streamfm
