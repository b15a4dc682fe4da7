#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawkes/core.hpp"
#include "hawkes/data.hpp"
#include "hawkes/learn.hpp"

namespace hawkes {

struct HeldoutLoglik {
  double total = 0.0;
  double per_event = 0.0;
  bool per_event_defined = false;  // false when the corpus has no events
  std::vector<double> per_sequence;
};

HeldoutLoglik heldout_loglik(const HawkesModel& model, const Corpus& corpus);

struct RescalingResult {
  double ks_statistic = 0.0;
  std::size_t n_transformed = 0;
};

// Random time change: per-dimension compensator increments between that
// dimension's events (the first measured from t_start), pooled and compared
// with Exp(1) by the exact one-sample KS statistic.
RescalingResult rescaling_test(const HawkesModel& model, const EventSequence& seq);

// Exact KS distance between a sample and Exp(1).
double ks_statistic_exp1(std::vector<double> sample);

// Asymptotic 95% critical value with small-sample slack.
inline double ks_critical_95(std::size_t n) { return 1.36 / std::sqrt(static_cast<double>(n)) + 0.01; }

enum class LearnerKind { Mle, MleOde, Ls };

const char* learner_name(LearnerKind kind);
std::optional<LearnerKind> parse_learner(const std::string& name);

struct LearnerSpec {
  std::string name;
  LearnerKind kind = LearnerKind::Mle;
  KernelSpec kernel = ExponentialKernel{1.0};  // Mle
  double lag = 0.1;                            // MleOde and Ls bin width
  int points = 20;                             // MleOde points, Ls lags
  LearnConfig cfg;
};

FitReport run_learner(const LearnerSpec& spec, const Corpus& train);

nlohmann::json learner_spec_to_json(const LearnerSpec& spec);
LearnerSpec learner_spec_from_json(const nlohmann::json& doc);

struct ComparisonRow {
  std::string name;
  std::optional<double> per_event_ll;
  std::optional<double> mu_relerr;
  std::optional<double> kernel_relerr;
  double wall_time = 0.0;
  int iterations = 0;
  std::string error;
  std::optional<HawkesModel> model;
};

// Fits each spec on train and scores it on test; failures become row errors.
std::vector<ComparisonRow> compare_learners(const Corpus& train, const Corpus& test,
                                            const std::vector<LearnerSpec>& specs,
                                            const std::optional<HawkesModel>& truth = std::nullopt);

// name,per_event_ll,mu_relerr,kernel_relerr,wall_time_s,iterations,error
// Wall time is left empty unless include_timing is set.
std::string comparison_csv(const std::vector<ComparisonRow>& rows, bool include_timing);

}  // namespace hawkes
