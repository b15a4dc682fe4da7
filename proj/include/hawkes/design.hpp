#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hawkes/core.hpp"
#include "hawkes/data.hpp"

namespace hawkes {

// With kernel shapes held fixed, every intensity used here is linear in the
// parameters:
//
//   lambda_u(t_i) = mu_u + sum_{m,v} A_m(v, u) * features(i, m * D + v)
//   Lambda_u(window) = mu_u * length + sum_{m,v} A_m(v, u) * exposure(m, v)
//
// The features and exposures depend only on the data, so they are computed
// once per fit and every EM iteration is a pass over this table.
struct SequenceDesign {
  std::vector<int> marks;
  Eigen::MatrixXd features;  // n x (M * D)
  Eigen::MatrixXd exposure;  // M x D
  double length = 0.0;
  int dim = 0;
  int components = 0;
};

SequenceDesign build_design(const KernelSpec& kernel, const EventSequence& seq);
std::vector<SequenceDesign> build_designs(const KernelSpec& kernel, const Corpus& corpus);

// Exponential shape whose infectivity is interpolated linearly over `grid` at
// the parent's time: component g carries the hat weight of node g.
SequenceDesign build_varying_design(const std::vector<double>& grid, double decay, const EventSequence& seq);

struct Coefficients {
  Eigen::VectorXd mu;
  std::vector<Eigen::MatrixXd> A;
};

// Sufficient statistics of one E-step, optionally weighted per sequence.
struct EStepStats {
  Eigen::VectorXd baseline;                 // expected immigrant counts per dimension
  std::vector<Eigen::MatrixXd> offspring;   // expected offspring counts, per component (v, u)
  Eigen::MatrixXd exposure;                 // M x D
  double time = 0.0;                        // total observation time
  double event_loglik = 0.0;                // sum of log lambda at events
  bool impossible = false;                  // some event had zero intensity

  EStepStats(int components, int dim);
};

void accumulate_estep(const SequenceDesign& design, const Coefficients& theta, double weight, EStepStats& stats);

EStepStats run_estep(const std::vector<SequenceDesign>& designs, const Coefficients& theta,
                     const std::vector<double>* weights = nullptr);

// Log-likelihood of one sequence through its design; -infinity if impossible.
double design_log_likelihood(const SequenceDesign& design, const Coefficients& theta);

// -loglik assembled from statistics evaluated at theta.
double negative_log_likelihood(const EStepStats& stats, const Coefficients& theta);

}  // namespace hawkes
