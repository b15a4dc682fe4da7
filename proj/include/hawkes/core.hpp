#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hawkes/kernel.hpp"

namespace hawkes {

struct Event {
  double time = 0.0;
  int mark = 0;
  bool operator==(const Event&) const = default;
};

struct EventSequence {
  std::vector<Event> events;
  double t_start = 0.0;
  double t_end = 0.0;
  int dim = 1;
  std::string id;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
  double length() const { return t_end - t_start; }
  bool operator==(const EventSequence&) const = default;
};

// Throws InvalidInput if the sequence is unsorted, out of window, or has bad marks.
void validate_sequence(const EventSequence& seq);

// Per-dimension event counts.
Eigen::VectorXi count_marks(const EventSequence& seq);

// Baseline rates plus one D x D coefficient matrix per kernel component.
// phi_vu(t) = sum_m A[m](v, u) * component_value(kernel, m, t).
struct HawkesModel {
  Eigen::VectorXd mu;
  KernelSpec kernel;
  std::vector<Eigen::MatrixXd> A;

  int dim() const { return static_cast<int>(mu.size()); }
  bool operator==(const HawkesModel& other) const;
};

HawkesModel make_exponential_model(Eigen::VectorXd mu, Eigen::MatrixXd infectivity, double decay);
HawkesModel make_poisson_model(Eigen::VectorXd mu);

// Shape checks plus nonnegativity. Instability is only reported by is_stable().
void validate_model(const HawkesModel& model);

// phi_{from,to}(lag)
double kernel_value(const HawkesModel& model, int from, int to, double lag);

// Integral of phi_{from,to} over [0, x].
double kernel_integral(const HawkesModel& model, int from, int to, double x);

// Phi(v, u) = integral of phi_vu over [0, inf).
Eigen::MatrixXd branching_matrix(const HawkesModel& model);

template <typename Derived>
double spectral_radius(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m.eval(), false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stable(const HawkesModel& model);

// Left-limit intensity of dimension u at time t (events at exactly t excluded).
double intensity(const HawkesModel& model, const EventSequence& seq, int u, double t);

// All D intensities at t.
Eigen::VectorXd intensities(const HawkesModel& model, const EventSequence& seq, double t);

// Integral of the intensity of dimension u over [t0, t1].
double compensator(const HawkesModel& model, const EventSequence& seq, int u, double t0, double t1);

// Lambda_u(t_start, t) for an ascending list of query times. Uses the
// Markov recursion for exponential kernels and support-windowed sums otherwise.
std::vector<double> cumulative_compensator(const HawkesModel& model, const EventSequence& seq, int u,
                                           const std::vector<double>& times);

// sum_i log lambda_{m_i}(t_i) - sum_u Lambda_u(t_start, t_end).
// Returns -infinity when some event has zero intensity.
double log_likelihood(const HawkesModel& model, const EventSequence& seq);

struct FitReport {
  HawkesModel model;
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations = 0;
  double wall_time = 0.0;
  int clamp_count = 0;
  std::vector<std::string> warnings;
};

}  // namespace hawkes
