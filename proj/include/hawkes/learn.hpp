#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawkes/core.hpp"
#include "hawkes/data.hpp"
#include "hawkes/design.hpp"

namespace hawkes {

enum class PenaltyKind { None, Sparse, GroupSparse, LowRank };

struct Penalty {
  PenaltyKind kind = PenaltyKind::None;
  double weight = 0.0;
};

const char* penalty_name(PenaltyKind kind);
std::optional<PenaltyKind> parse_penalty(const std::string& name);

// weight * (sum |Phi|, sum of row norms, or nuclear norm); 0 for None.
double penalty_value(const Penalty& penalty, const Eigen::MatrixXd& phi);

struct LearnConfig {
  int max_iters = 200;
  double tol = 1e-6;  // relative objective change, must hold 3 iterations running; 0 runs max_iters
  Penalty penalty;
  std::uint64_t seed = 0;
  bool baseline_only = false;         // hold every infectivity at zero
  double smoothness = 10.0;           // curvature weight for fit_mle_ode
  double temporal_smoothness = 1.0;   // node-difference weight for fit_tvhp
  double ridge = 0.0;                 // fit_ls
};

void validate_config(const LearnConfig& cfg);
nlohmann::json config_to_json(const LearnConfig& cfg);
// Fields present in `doc` override `base`.
LearnConfig config_from_json(const nlohmann::json& doc, LearnConfig base = {});

// EM / proximal-EM for exponential and Gaussian-basis kernels. Shape
// hyperparameters in the template are held fixed.
FitReport fit_mle(const Corpus& corpus, const KernelSpec& kernel_template, const LearnConfig& cfg);

// EM with a curvature-penalised kernel update on a step grid.
FitReport fit_mle_ode(const Corpus& corpus, double lag, int points, const LearnConfig& cfg);

// Binned least squares. The returned step kernel has lags + 1 points holding
// phi at bin midpoints, interpolated from the per-lag coefficients.
FitReport fit_ls(const Corpus& corpus, double bin_width, int lags, double ridge, const LearnConfig& cfg);

struct EstimationError {
  double mu_relerr = 0.0;
  double kernel_relerr = 0.0;
  // Discretized fits only: truth sampled at bin midpoints.
  std::optional<double> pointwise_relerr;
  // Set when the truth has zero norm and absolute errors were returned.
  bool absolute = false;
};

EstimationError estimation_error(const HawkesModel& fitted, const HawkesModel& truth);

struct NllGradient {
  double value = 0.0;
  Eigen::VectorXd mu;
  std::vector<Eigen::MatrixXd> A;
};

// Negative log-likelihood over the corpus and its gradient in (mu, A).
NllGradient nll_gradient(const HawkesModel& model, const Corpus& corpus);

// Negative log-likelihood plus the structural penalty on the branching matrix.
double penalized_objective(const HawkesModel& model, const Corpus& corpus, const Penalty& penalty);

// Branching-structure posterior of one event: immigrant vs. each earlier event.
struct EventResponsibility {
  double baseline = 0.0;
  std::vector<double> parents;  // index j < i
};

std::vector<EventResponsibility> responsibilities(const HawkesModel& model, const EventSequence& seq);

// Building blocks shared with the analysis learners.
namespace em {

// mu = 0.5 * n_u / T_total, A entries ~ U(0, 0.1 / D).
Coefficients initial(const Corpus& corpus, int components, std::uint64_t seed, bool baseline_only,
                     const std::vector<double>* weights = nullptr);

// Penalised M-step for the infectivity block; non-increasing in the EM
// surrogate, so the outer objective never goes up.
std::vector<Eigen::MatrixXd> update_infectivity(const EStepStats& stats, const std::vector<Eigen::MatrixXd>& current,
                                                const Penalty& penalty, const KernelSpec& kernel);

// Closed-form M-step followed by the penalty's proximal map (soft threshold,
// row shrinkage or singular value threshold). Can land on exact zeros but is
// not guaranteed to descend; callers keep it only when the objective agrees.
std::vector<Eigen::MatrixXd> prox_candidate(const EStepStats& stats, const Penalty& penalty, const KernelSpec& kernel);

Eigen::VectorXd update_baseline(const EStepStats& stats);

Eigen::MatrixXd summed_infectivity(const std::vector<Eigen::MatrixXd>& A, const KernelSpec& kernel);

// Minimises sum_k (-c_k log x_k + e_k x_k) + x' P x over x >= 0 by projected
// Newton with line search; starts from x0 and never increases the objective.
// `clamps` counts coordinates pinned at zero by projection.
Eigen::VectorXd minimize_poisson_quadratic(const Eigen::VectorXd& c, const Eigen::VectorXd& e,
                                           const Eigen::MatrixXd& P, const Eigen::VectorXd& x0, int& clamps,
                                           bool& regularised);

// True when |prev - cur| / max(1, |prev|) < tol for the last `window` steps.
bool converged(const std::vector<double>& trace, double tol, int window = 3);

}  // namespace em

nlohmann::json fit_report_to_json(const FitReport& report, bool include_timing,
                                  const nlohmann::json& resolved_config = nullptr);
FitReport fit_report_from_json(const nlohmann::json& doc);

}  // namespace hawkes
