#include <chrono>
#include <cmath>
#include <limits>

#include "hawkes/error.hpp"
#include "hawkes/learn.hpp"

namespace hawkes {

namespace {

void check_corpus(const Corpus& corpus) {
  if (corpus.empty()) throw InvalidInput("cannot fit an empty corpus");
  if (corpus.dim < 1) throw InvalidInput("corpus dimension must be >= 1");
  validate_corpus(corpus);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

FitReport fit_mle(const Corpus& corpus, const KernelSpec& kernel, const LearnConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  validate_config(cfg);
  validate_kernel(kernel);
  if (is_discretized(kernel))
    throw UnsupportedKernel(
        "fit_mle needs a continuous kernel (exponential or basis); for discretized kernels use fit_mle_ode or fit_ls");
  check_corpus(corpus);

  const auto designs = build_designs(kernel, corpus);
  Coefficients theta = em::initial(corpus, component_count(kernel), cfg.seed, cfg.baseline_only);
  auto objective = [&](const EStepStats& stats) {
    return negative_log_likelihood(stats, theta) +
           penalty_value(cfg.penalty, em::summed_infectivity(theta.A, kernel));
  };

  FitReport report;
  EStepStats stats = run_estep(designs, theta);
  report.objective_trace.push_back(objective(stats));
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    theta.mu = em::update_baseline(stats);
    const bool penalised = cfg.penalty.kind != PenaltyKind::None && cfg.penalty.weight > 0.0;
    std::vector<Eigen::MatrixXd> candidate;
    if (!cfg.baseline_only && penalised) candidate = em::prox_candidate(stats, cfg.penalty, kernel);
    if (!cfg.baseline_only) theta.A = em::update_infectivity(stats, theta.A, cfg.penalty, kernel);
    stats = run_estep(designs, theta);
    double value = objective(stats);
    if (!candidate.empty()) {
      // The descent step guarantees monotonicity; the thresholded step can
      // reach exact zeros. Keep whichever scores better.
      Coefficients alt{theta.mu, std::move(candidate)};
      std::swap(alt.A, theta.A);
      EStepStats alt_stats = run_estep(designs, theta);
      const double alt_value = alt_stats.impossible ? kInf : objective(alt_stats);
      if (alt_value <= value) {
        stats = std::move(alt_stats);
        value = alt_value;
      } else {
        std::swap(alt.A, theta.A);
      }
    }
    report.objective_trace.push_back(value);
    report.iterations = iter + 1;
    if (em::converged(report.objective_trace, cfg.tol)) {
      report.converged = true;
      break;
    }
  }
  report.model = HawkesModel{theta.mu, kernel, theta.A};
  report.wall_time = seconds_since(start);
  return report;
}

NllGradient nll_gradient(const HawkesModel& model, const Corpus& corpus) {
  validate_model(model);
  if (model.dim() != corpus.dim) throw InvalidInput("dimension mismatch between model and corpus");
  const int d = model.dim();
  const int components = static_cast<int>(model.A.size());
  NllGradient out;
  out.mu = Eigen::VectorXd::Zero(d);
  out.A.assign(components, Eigen::MatrixXd::Zero(d, d));
  Eigen::MatrixXd stacked(components * d, d);
  for (int m = 0; m < components; ++m) stacked.middleRows(m * d, d) = model.A[m];

  Eigen::MatrixXd gathered = Eigen::MatrixXd::Zero(components * d, d);
  Eigen::MatrixXd exposure = Eigen::MatrixXd::Zero(components, d);
  double time = 0.0;
  double loglik = 0.0;
  for (const auto& seq : corpus.sequences) {
    const SequenceDesign design = build_design(model.kernel, seq);
    const Eigen::MatrixXd excitation = design.features * stacked;
    for (std::size_t i = 0; i < design.marks.size(); ++i) {
      const int u = design.marks[i];
      const auto row = static_cast<Eigen::Index>(i);
      const double lambda = model.mu[u] + excitation(row, u);
      loglik += std::log(lambda);
      out.mu[u] -= 1.0 / lambda;
      gathered.col(u) += design.features.row(row).transpose() / lambda;
    }
    exposure += design.exposure;
    time += design.length;
  }
  out.mu.array() += time;
  double integral = model.mu.sum() * time;
  for (int m = 0; m < components; ++m) {
    out.A[m] = exposure.row(m).transpose().replicate(1, d) - gathered.middleRows(m * d, d);
    integral += (exposure.row(m) * model.A[m]).sum();
  }
  out.value = integral - loglik;
  return out;
}

double penalized_objective(const HawkesModel& model, const Corpus& corpus, const Penalty& penalty) {
  double nll = 0.0;
  for (const auto& seq : corpus.sequences) nll -= log_likelihood(model, seq);
  return nll + penalty_value(penalty, branching_matrix(model));
}

std::vector<EventResponsibility> responsibilities(const HawkesModel& model, const EventSequence& seq) {
  validate_model(model);
  if (model.dim() != seq.dim) throw InvalidInput("dimension mismatch between model and sequence");
  std::vector<EventResponsibility> out(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Event& child = seq.events[i];
    auto& r = out[i];
    r.parents.assign(i, 0.0);
    double lambda = model.mu[child.mark];
    for (std::size_t j = 0; j < i; ++j) {
      const double lag = child.time - seq.events[j].time;
      if (lag > 0.0) r.parents[j] = kernel_value(model, seq.events[j].mark, child.mark, lag);
      lambda += r.parents[j];
    }
    if (!(lambda > 0.0)) throw InvalidInput("event " + std::to_string(i) + " has zero intensity");
    r.baseline = model.mu[child.mark] / lambda;
    for (double& p : r.parents) p /= lambda;
  }
  return out;
}

EstimationError estimation_error(const HawkesModel& fitted, const HawkesModel& truth) {
  validate_model(fitted);
  validate_model(truth);
  if (fitted.dim() != truth.dim()) throw InvalidInput("estimation_error: dimension mismatch");
  EstimationError err;
  const double mu_norm = truth.mu.norm();
  const Eigen::MatrixXd phi_truth = branching_matrix(truth);
  const double phi_norm = phi_truth.norm();
  err.absolute = mu_norm == 0.0 || phi_norm == 0.0;
  err.mu_relerr = (fitted.mu - truth.mu).norm() / (mu_norm == 0.0 ? 1.0 : mu_norm);
  err.kernel_relerr = (branching_matrix(fitted) - phi_truth).norm() / (phi_norm == 0.0 ? 1.0 : phi_norm);

  if (const auto* grid = std::get_if<DiscretizedKernel>(&fitted.kernel)) {
    double diff = 0.0;
    double ref = 0.0;
    for (int k = 0; k < grid->points; ++k) {
      const double lag = (k + 0.5) * grid->lag;
      for (int v = 0; v < fitted.dim(); ++v) {
        for (int u = 0; u < fitted.dim(); ++u) {
          const double t = kernel_value(truth, v, u, lag);
          diff += (fitted.A[k](v, u) - t) * (fitted.A[k](v, u) - t);
          ref += t * t;
        }
      }
    }
    err.pointwise_relerr = std::sqrt(diff) / (ref == 0.0 ? 1.0 : std::sqrt(ref));
  }
  return err;
}

}  // namespace hawkes
