#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawkes/core.hpp"
#include "hawkes/data.hpp"
#include "hawkes/learn.hpp"

namespace hawkes {

// ---------------------------------------------------------------------------
// Granger causality
// ---------------------------------------------------------------------------

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Edge v -> u means events of type v excite type u.
struct GrangerGraph {
  Eigen::MatrixXd infectivity;
  BoolMatrix adjacency;  // adjacency(v, u) == infectivity(v, u) > threshold
  double threshold = 0.01;
};

inline constexpr double kDefaultGrangerThreshold = 0.01;

GrangerGraph threshold_graph(const Eigen::MatrixXd& infectivity, double threshold);
GrangerGraph granger_from_model(const HawkesModel& model, double threshold);

struct GrangerResult {
  GrangerGraph graph;
  FitReport report;
};

// Penalised fit (fit_mle, or fit_mle_ode for a discretized template), then threshold.
GrangerResult granger_graph(const Corpus& corpus, const KernelSpec& kernel_template, const LearnConfig& cfg,
                            double threshold = kDefaultGrangerThreshold);

nlohmann::json granger_to_json(const GrangerGraph& graph);
GrangerGraph granger_from_json(const nlohmann::json& doc);

// Nodes are named by label when labels are given. Edge labels carry the
// infectivity with three decimals.
std::string granger_to_dot(const GrangerGraph& graph, const std::vector<std::string>& labels = {});

struct DotEdge {
  std::string from;
  std::string to;
  double weight = 0.0;
  bool operator==(const DotEdge&) const = default;
};

// Reads back the edge list written by granger_to_dot.
std::vector<DotEdge> parse_granger_dot(const std::string& text);

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

struct ClusterResult {
  int K = 0;
  Eigen::MatrixXd responsibilities;  // N x K, rows sum to one
  std::vector<int> assignments;
  std::vector<HawkesModel> models;   // empty for distance-based clustering
  Eigen::VectorXd mixing;
  std::vector<int> medoids;          // distance-based clustering only
  std::vector<double> objective_trace;  // mixture log-likelihood (nondecreasing) or k-medoids cost
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;
};

// Finite mixture of Hawkes processes fitted by EM over sequence-level labels.
ClusterResult cluster_mixture(const Corpus& corpus, int K, const KernelSpec& kernel_template, const LearnConfig& cfg);

struct DistanceParams {
  double time_cost = 1.0;
  double mark_mismatch_cost = 1.0;
  double indel_cost = 1.0;
};

// Minimum-cost monotone alignment of two time-sorted event lists.
double sequence_distance(const EventSequence& a, const EventSequence& b, const DistanceParams& params = {});

Eigen::MatrixXd distance_matrix(const Corpus& corpus, const DistanceParams& params = {});

// k-medoids on the distance matrix, k-medoids++ seeding from `seed`.
ClusterResult cluster_distance(const Corpus& corpus, int K, const DistanceParams& params = {},
                               std::uint64_t seed = 0);

// Accuracy under the best one-to-one matching of predicted to true labels.
double clustering_purity(const std::vector<int>& predicted, const std::vector<int>& truth);

nlohmann::json cluster_to_json(const ClusterResult& result, const std::vector<std::string>& ids);

// CSV with an id header row and an id first column.
std::string distance_csv(const Eigen::MatrixXd& distances, const std::vector<std::string>& ids);

struct DistanceTable {
  std::vector<std::string> ids;
  Eigen::MatrixXd distances;
};

DistanceTable parse_distance_csv(const std::string& text);

// ---------------------------------------------------------------------------
// Time-varying Hawkes process
// ---------------------------------------------------------------------------

// Infectivity of a parent at time s interpolates the node matrices linearly.
struct TvhpModel {
  Eigen::VectorXd mu;
  std::vector<double> grid;
  std::vector<Eigen::MatrixXd> nodes;
  double decay = 1.0;

  int dim() const { return static_cast<int>(mu.size()); }
  Eigen::MatrixXd infectivity_at(double s) const;
};

void validate_tvhp(const TvhpModel& model);

struct TvhpFit {
  TvhpModel model;
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations = 0;
  int clamp_count = 0;
  double wall_time = 0.0;
  std::vector<std::string> warnings;
};

// EM with a temporal smoothness penalty beta * sum_g ||A_{g+1} - A_g||_F^2
// (cfg.temporal_smoothness). beta = +inf ties all nodes together.
TvhpFit fit_tvhp(const Corpus& corpus, const std::vector<double>& grid, double decay, const LearnConfig& cfg);

// Direct evaluation by summing over the history.
double tvhp_log_likelihood(const TvhpModel& model, const EventSequence& seq);

// Branching simulation with parent-time infectivity, t in [0, t_end].
Corpus simulate_tvhp(const TvhpModel& model, double t_end, int n_sequences, std::uint64_t seed,
                     std::size_t max_events = 1'000'000);

// Evenly spaced grid of `nodes` points over [t0, t1].
std::vector<double> uniform_grid(double t0, double t1, int nodes);

nlohmann::json tvhp_to_json(const TvhpModel& model);
TvhpModel tvhp_from_json(const nlohmann::json& doc);

// Long form: s,v,u,a with one row per node and pair.
std::string tvhp_long_csv(const TvhpModel& model);

}  // namespace hawkes
