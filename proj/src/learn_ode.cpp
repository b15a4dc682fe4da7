#include <algorithm>
#include <chrono>
#include <cmath>

#include "hawkes/error.hpp"
#include "hawkes/learn.hpp"

namespace hawkes {

namespace {

// D2' D2 for the interior second differences of an n-point grid (free ends).
Eigen::MatrixXd curvature_gram(int n) {
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(std::max(n - 2, 0), n);
  for (int r = 0; r + 2 < n; ++r) {
    d2(r, r) = 1.0;
    d2(r, r + 1) = -2.0;
    d2(r, r + 2) = 1.0;
  }
  return d2.transpose() * d2;
}

}  // namespace

FitReport fit_mle_ode(const Corpus& corpus, double lag, int points, const LearnConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  validate_config(cfg);
  if (!(lag > 0.0)) throw InvalidInput("fit_mle_ode: lag must be positive");
  if (points < 2) throw InvalidInput("fit_mle_ode: at least two grid points required");
  if (cfg.penalty.kind == PenaltyKind::GroupSparse || cfg.penalty.kind == PenaltyKind::LowRank)
    throw InvalidInput(std::string("fit_mle_ode supports penalties none and sparse, not ") +
                       penalty_name(cfg.penalty.kind));
  if (corpus.empty()) throw InvalidInput("cannot fit an empty corpus");
  validate_corpus(corpus);

  FitReport report;
  const double support = lag * points;
  const bool tail_observable = std::any_of(corpus.sequences.begin(), corpus.sequences.end(),
                                           [&](const EventSequence& s) { return s.length() >= support; });
  if (!tail_observable)
    report.warnings.push_back("grid support " + std::to_string(support) +
                              " exceeds every observation window; the kernel tail is unidentifiable");

  const KernelSpec kernel = DiscretizedKernel{lag, points};
  const int d = corpus.dim;
  const auto designs = build_designs(kernel, corpus);
  Coefficients theta = em::initial(corpus, points, cfg.seed, cfg.baseline_only);

  // Integral of (phi'')^2 on the grid: sum of squared second differences / lag^3.
  const Eigen::MatrixXd P = (cfg.smoothness / (lag * lag * lag)) * curvature_gram(points);
  const bool sparse = cfg.penalty.kind == PenaltyKind::Sparse && cfg.penalty.weight > 0.0;

  auto column = [&](int v, int u) {
    Eigen::VectorXd x(points);
    for (int k = 0; k < points; ++k) x[k] = theta.A[k](v, u);
    return x;
  };
  auto objective = [&](const EStepStats& stats) {
    double value = negative_log_likelihood(stats, theta) +
                   penalty_value(cfg.penalty, em::summed_infectivity(theta.A, kernel));
    for (int v = 0; v < d; ++v)
      for (int u = 0; u < d; ++u) {
        const Eigen::VectorXd x = column(v, u);
        value += x.dot(P * x);
      }
    return value;
  };

  EStepStats stats = run_estep(designs, theta);
  report.objective_trace.push_back(objective(stats));
  bool regularised = false;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    theta.mu = em::update_baseline(stats);
    if (!cfg.baseline_only) {
      for (int v = 0; v < d; ++v) {
        for (int u = 0; u < d; ++u) {
          Eigen::VectorXd c(points), e(points);
          for (int k = 0; k < points; ++k) {
            c[k] = stats.offspring[k](v, u);
            e[k] = stats.exposure(k, v) + (sparse ? cfg.penalty.weight * lag : 0.0);
          }
          const Eigen::VectorXd x =
              em::minimize_poisson_quadratic(c, e, P, column(v, u), report.clamp_count, regularised);
          for (int k = 0; k < points; ++k) theta.A[k](v, u) = x[k];
        }
      }
    }
    stats = run_estep(designs, theta);
    report.objective_trace.push_back(objective(stats));
    report.iterations = iter + 1;
    if (em::converged(report.objective_trace, cfg.tol)) {
      report.converged = true;
      break;
    }
  }
  if (regularised) report.warnings.push_back("singular kernel update system; a small diagonal bump was added");
  report.model = HawkesModel{theta.mu, kernel, theta.A};
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace hawkes
