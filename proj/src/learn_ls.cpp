#include <chrono>
#include <cmath>

#include "hawkes/error.hpp"
#include "hawkes/learn.hpp"

namespace hawkes {

FitReport fit_ls(const Corpus& corpus, double bin_width, int lags, double ridge, const LearnConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  validate_config(cfg);
  if (!(bin_width > 0.0)) throw InvalidInput("fit_ls: bin width must be positive");
  if (lags < 1) throw InvalidInput("fit_ls: at least one lag required");
  if (!(ridge >= 0.0)) throw InvalidInput("fit_ls: ridge must be nonnegative");
  if (corpus.empty()) throw InvalidInput("cannot fit an empty corpus");
  validate_corpus(corpus);
  for (const auto& s : corpus.sequences) {
    if (s.length() < (lags + 1) * bin_width)
      throw InvalidInput("fit_ls: sequence '" + s.id + "' is shorter than (lags + 1) * bin width");
  }

  const int d = corpus.dim;
  const int unknowns = 1 + lags * d;  // intercept, then (lag, source) pairs
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(unknowns, unknowns);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(unknowns, d);
  double target_sq = 0.0;
  long rows = 0;

  Eigen::VectorXd x(unknowns);
  for (const auto& s : corpus.sequences) {
    const auto bins = static_cast<Eigen::Index>(std::floor(s.length() / bin_width));
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(bins, d);
    for (const auto& e : s.events) {
      const auto k = static_cast<Eigen::Index>(std::floor((e.time - s.t_start) / bin_width));
      if (k < bins) counts(k, e.mark) += 1.0;
    }
    for (Eigen::Index k = lags; k < bins; ++k) {
      x[0] = bin_width;
      for (int l = 1; l <= lags; ++l)
        for (int v = 0; v < d; ++v) x[1 + (l - 1) * d + v] = counts(k - l, v) * bin_width;
      gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
      rhs += x * counts.row(k);
      target_sq += counts.row(k).squaredNorm();
      ++rows;
    }
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  if (ridge == 0.0 && rows < unknowns)
    throw RankDeficient("fit_ls: " + std::to_string(rows) + " usable bins for " + std::to_string(unknowns) +
                        " unknowns; add a ridge penalty");

  // Per-row normalisation makes the estimate invariant to duplicating data.
  const double scale = 1.0 / static_cast<double>(rows);
  Eigen::MatrixXd system = gram * scale;
  system.diagonal().tail(unknowns - 1).array() += ridge;
  const Eigen::MatrixXd b = rhs * scale;
  if (ridge == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system);
    if (qr.rank() < unknowns)
      throw RankDeficient("fit_ls: normal equations are rank deficient; add a ridge penalty");
  }
  const Eigen::MatrixXd coef = system.ldlt().solve(b);

  FitReport report;
  const double residual = (target_sq * scale - 2.0 * coef.cwiseProduct(b).sum() +
                           (coef.transpose() * (gram * scale) * coef).trace());
  report.objective_trace.push_back(residual + ridge * coef.bottomRows(unknowns - 1).squaredNorm());

  HawkesModel model;
  model.kernel = DiscretizedKernel{bin_width, lags + 1};
  model.mu = coef.row(0).transpose();
  for (int u = 0; u < d; ++u) {
    if (model.mu[u] < 0.0) {
      model.mu[u] = 0.0;
      ++report.clamp_count;
    }
  }
  // Coefficient l averages phi over a triangle centred at l * bin. Steps are
  // read at bin midpoints: step k (k >= 1) halves coefficients k and k + 1,
  // step 0 extrapolates linearly to bin / 2.
  std::vector<Eigen::MatrixXd> coefs(lags + 2, Eigen::MatrixXd::Zero(d, d));
  for (int l = 1; l <= lags; ++l) {
    for (int v = 0; v < d; ++v) {
      for (int u = 0; u < d; ++u) {
        double value = coef(1 + (l - 1) * d + v, u);
        if (value < 0.0) {
          value = 0.0;
          ++report.clamp_count;
        }
        coefs[l](v, u) = value;
      }
    }
  }
  model.A.assign(lags + 1, Eigen::MatrixXd::Zero(d, d));
  for (int k = 1; k <= lags; ++k) model.A[k] = 0.5 * (coefs[k] + coefs[k + 1]);
  model.A[0] = lags >= 2 ? (1.5 * coefs[1] - 0.5 * coefs[2]).cwiseMax(0.0) : coefs[1];
  if (report.clamp_count > 0)
    report.warnings.push_back(std::to_string(report.clamp_count) + " negative coefficients clamped to zero");

  report.model = std::move(model);
  report.converged = true;
  report.iterations = 1;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace hawkes
