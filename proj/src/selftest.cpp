#include "streamfm/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

#include "streamfm/fm_core.hpp"
#include "streamfm/mf_core.hpp"
#include "streamfm/online_fm.hpp"
#include "streamfm/prequential.hpp"
#include "streamfm/rng.hpp"
#include "streamfm/sparse_vector.hpp"

namespace streamfm {

namespace {

FmModel random_fm(Rng& rng, std::size_t maxD, std::size_t maxK) {
  const std::size_t d = 1 + rng.bounded(maxD);
  const std::size_t k = 1 + rng.bounded(maxK);
  FmModel m = fm_init(d, k, 0.01 + rng.uniform() * 0.1, rng.uniform(),
                      rng.uniform(), std::vector<double>(k, rng.uniform()), 0.1,
                      rng.next());
  m.w0 = rng.gaussian(1.0);
  for (double& w : m.w) w = rng.gaussian(1.0);
  for (double& v : m.V) v = rng.gaussian(1.0);
  return m;
}

SparseVector random_input(Rng& rng, std::size_t d) {
  std::vector<SparseEntry> entries;
  for (std::size_t i = 0; i < d; ++i) {
    if (rng.uniform() < 0.6) {
      double value = rng.gaussian(1.0);
      if (value == 0.0) value = 1.0;
      entries.push_back({i, value});
    }
  }
  return SparseVector(d, std::move(entries));
}

std::size_t predict_oracle_suite(Rng& rng, bool perturb) {
  std::size_t failures = 0;
  for (int c = 0; c < 1200; ++c) {
    const FmModel m = random_fm(rng, 20, 8);
    const SparseVector x = random_input(rng, m.d);
    double fast = fm_predict(m, x);
    const double oracle = fm_predict_naive(m, x);
    if (perturb) fast += 1e-6;
    if (std::abs(fast - oracle) > 1e-9 * (1.0 + std::abs(oracle))) ++failures;
  }
  return failures;
}

// Central finite difference of the squared loss w.r.t. one model coordinate.
// The coordinate is perturbed in place and restored exactly.
double fd_loss(FmModel& m, double* coord, const SparseVector& x, double y, double h) {
  const double saved = *coord;
  *coord = saved + h;
  const double up = fm_predict(m, x) - y;
  *coord = saved - h;
  const double down = fm_predict(m, x) - y;
  *coord = saved;
  return (up * up - down * down) / (2.0 * h);
}

bool close_to(double actual, double expected, double relTol, double absTol) {
  return std::abs(actual - expected) <= std::max(relTol * std::abs(expected), absTol);
}

std::size_t theta_gradient_suite(Rng& rng, bool perturb) {
  std::size_t failures = 0;
  const double h = 1e-6;
  for (int c = 0; c < 250; ++c) {
    FmModel m = random_fm(rng, 8, 4);
    const SparseVector x = random_input(rng, m.d);
    const double y = rng.gaussian(1.0);
    FmGradient g = fm_gradient_squared_loss(m, x, y);
    if (perturb) g.dw0 += 1e-3;

    bool bad = !close_to(g.dw0, fd_loss(m, &m.w0, x, y, h), 1e-5, 1e-8);
    for (std::size_t a = 0; a < g.indices.size() && !bad; ++a) {
      const std::size_t i = g.indices[a];
      bad = !close_to(g.dw[a], fd_loss(m, &m.w[i], x, y, h), 1e-5, 1e-8);
      for (std::size_t f = 0; f < m.k && !bad; ++f) {
        bad = !close_to(g.dv_at(a, f), fd_loss(m, &m.v(i, f), x, y, h), 1e-5, 1e-8);
      }
    }
    if (bad) ++failures;
  }
  return failures;
}

double imf_objective(const std::vector<double>& p, const std::vector<double>& q,
                     double lambda) {
  const double residual = 1.0 - std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
  double norms = 0.0;
  for (double v : p) norms += v * v;
  for (double v : q) norms += v * v;
  return residual * residual + lambda * norms;
}

std::size_t imf_gradient_suite(Rng& rng, bool perturb) {
  std::size_t failures = 0;
  const double h = 1e-6;
  for (int c = 0; c < 250; ++c) {
    const std::size_t k = 1 + rng.bounded(4);
    MfModel m = mf_init(k, 0.01 + rng.uniform() * 0.1, rng.uniform(), 0.1, rng.next());
    std::vector<double> p(k), q(k);
    for (double& v : p) v = rng.gaussian(1.0);
    for (double& v : q) v = rng.gaussian(1.0);
    m.P.emplace("u", p);
    m.Q.emplace("i", q);

    MfModel updated = m;
    imf_update(updated, "u", "i");

    // The update must equal one gradient step: (new - old) / (-eta) = grad.
    bool bad = false;
    for (std::size_t f = 0; f < k && !bad; ++f) {
      double analyticP = (updated.P.at("u")[f] - p[f]) / -m.eta;
      const double analyticQ = (updated.Q.at("i")[f] - q[f]) / -m.eta;
      if (perturb) analyticP += 1e-3;

      std::vector<double> pp = p;
      pp[f] = p[f] + h;
      const double upP = imf_objective(pp, q, m.lambda);
      pp[f] = p[f] - h;
      const double downP = imf_objective(pp, q, m.lambda);
      std::vector<double> qq = q;
      qq[f] = q[f] + h;
      const double upQ = imf_objective(p, qq, m.lambda);
      qq[f] = q[f] - h;
      const double downQ = imf_objective(p, qq, m.lambda);

      bad = !close_to(analyticP, (upP - downP) / (2.0 * h), 1e-5, 1e-8) ||
            !close_to(analyticQ, (upQ - downQ) / (2.0 * h), 1e-5, 1e-8);
    }
    if (bad) ++failures;
  }
  return failures;
}

// Validation loss after one theta step under perturbed regularization values.
double loss_after_step(FmModel m, const SparseVector& xVal, double yVal) {
  theta_update(m, xVal, yVal);
  const double e = fm_predict(m, xVal) - yVal;
  return e * e;
}

std::size_t lambda_gradient_suite(Rng& rng, bool perturb) {
  std::size_t failures = 0;
  const double h = 1e-6;
  for (int c = 0; c < 200; ++c) {
    FmModel m = random_fm(rng, 6, 3);
    SparseVector xVal = random_input(rng, m.d);
    if (xVal.nnz() == 0) xVal = SparseVector(m.d, {{0, 1.0}});
    const double yVal = rng.gaussian(1.0);

    LambdaGradients lg = lambda_gradients(m, xVal, yVal, true);
    if (perturb) lg.dLambda0 += 1e-3;

    auto fdLambda = [&](double* coord) {
      const double saved = *coord;
      *coord = saved + h;
      const double up = loss_after_step(m, xVal, yVal);
      *coord = saved - h;
      const double down = loss_after_step(m, xVal, yVal);
      *coord = saved;
      return (up - down) / (2.0 * h);
    };

    bool bad = !close_to(lg.dLambda0, fdLambda(&m.lambda0), 1e-4, 1e-8) ||
               !close_to(lg.dLambdaW, fdLambda(&m.lambdaW), 1e-4, 1e-8);
    for (std::size_t f = 0; f < m.k && !bad; ++f) {
      bad = !close_to(lg.dLambdaV[f], fdLambda(&m.lambdaV[f]), 1e-4, 1e-8);
    }
    if (bad) ++failures;
  }
  return failures;
}

std::size_t metrics_suite(Rng& rng, bool perturb) {
  std::size_t failures = 0;
  for (int c = 0; c < 200; ++c) {
    const int windowT = 1 + static_cast<int>(rng.bounded(10));
    const std::size_t length = 1 + rng.bounded(50);
    std::vector<int> hits(length);
    std::vector<double> prs(length);
    for (std::size_t i = 0; i < length; ++i) {
      hits[i] = static_cast<int>(rng.bounded(2));
      prs[i] = rng.uniform() * 100.0;
    }

    EvalState eval(1, windowT);
    for (std::size_t i = 0; i < length; ++i) {
      eval.record(i, static_cast<long long>(i), hits[i], prs[i]);
    }

    bool bad = false;
    double prSum = 0.0;
    for (std::size_t i = 0; i < length && !bad; ++i) {
      const std::size_t start = i + 1 > static_cast<std::size_t>(windowT)
                                    ? i + 1 - static_cast<std::size_t>(windowT)
                                    : 0;
      int inWindow = 0;
      for (std::size_t j = start; j <= i; ++j) inWindow += hits[j];
      double expected = static_cast<double>(inWindow) / static_cast<double>(i - start + 1);
      if (perturb) expected += 1e-6;
      bad = std::abs(eval.log()[i].windowedRecall - expected) > 1e-12;
      prSum += prs[i];
    }
    if (!bad) {
      const double expectedMpr = prSum / static_cast<double>(length);
      bad = std::abs(eval.mpr() - expectedMpr) > 1e-12 * (1.0 + std::abs(expectedMpr));
    }
    if (bad) ++failures;
  }
  return failures;
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelftestOptions& opts, std::ostream& out) {
  out << "selftest seed " << opts.seed << "\n";
  std::vector<SuiteResult> results;

  struct Suite {
    const char* name;
    std::size_t cases;
    std::size_t (*run)(Rng&, bool);
  };
  const Suite suites[] = {
      {"predict", 1200, predict_oracle_suite},
      {"gradient", 250, theta_gradient_suite},
      {"imf", 250, imf_gradient_suite},
      {"lambda", 200, lambda_gradient_suite},
      {"metrics", 200, metrics_suite},
  };

  for (std::size_t idx = 0; idx < std::size(suites); ++idx) {
    const Suite& suite = suites[idx];
    Rng rng(mix_seed(opts.seed, idx));
    const std::size_t failures = suite.run(rng, opts.perturb == suite.name);
    results.push_back({suite.name, suite.cases, failures});
    out << "suite " << suite.name << ": " << suite.cases << " cases, " << failures
        << " failures\n";
  }
  out << (selftest_passed(results) ? "PASS" : "FAIL") << "\n";
  return results;
}

bool selftest_passed(const std::vector<SuiteResult>& results) {
  for (const SuiteResult& r : results) {
    if (r.failures != 0) return false;
  }
  return true;
}

}  // namespace streamfm
