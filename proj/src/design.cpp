#include "hawkes/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hawkes/error.hpp"
#include "hawkes/parallel.hpp"

namespace hawkes {

namespace {

SequenceDesign empty_design(const EventSequence& seq, int components) {
  SequenceDesign d;
  d.dim = seq.dim;
  d.components = components;
  d.length = seq.length();
  d.marks.reserve(seq.size());
  for (const auto& e : seq.events) d.marks.push_back(e.mark);
  d.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(seq.size()), components * seq.dim);
  d.exposure = Eigen::MatrixXd::Zero(components, seq.dim);
  return d;
}

// Exponential recursion over events; parent_weight(j) gives per-component
// multipliers of event j (a single 1 for the plain exponential kernel).
template <class ParentWeights>
void fill_exponential(SequenceDesign& d, const EventSequence& seq, double w, ParentWeights parent_weight) {
  const int dim = seq.dim;
  const auto& ev = seq.events;
  const std::size_t n = ev.size();
  Eigen::VectorXd state = Eigen::VectorXd::Zero(d.components * dim);
  Eigen::VectorXd weights(d.components);
  double clock = seq.t_start;
  std::size_t i = 0;
  while (i < n) {
    const double t = ev[i].time;
    state *= std::exp(-w * (t - clock));
    clock = t;
    std::size_t group_end = i;
    while (group_end < n && ev[group_end].time == t) ++group_end;
    for (std::size_t k = i; k < group_end; ++k) d.features.row(static_cast<Eigen::Index>(k)) = state.transpose();
    for (std::size_t k = i; k < group_end; ++k) {
      parent_weight(ev[k].time, weights);
      const double tail = -std::expm1(-w * (seq.t_end - ev[k].time));
      for (int m = 0; m < d.components; ++m) {
        if (weights[m] == 0.0) continue;
        state[m * dim + ev[k].mark] += w * weights[m];
        d.exposure(m, ev[k].mark) += weights[m] * tail;
      }
    }
    i = group_end;
  }
}

}  // namespace

SequenceDesign build_design(const KernelSpec& kernel, const EventSequence& seq) {
  const int components = component_count(kernel);
  SequenceDesign d = empty_design(seq, components);
  if (const auto* exp_kernel = std::get_if<ExponentialKernel>(&kernel)) {
    fill_exponential(d, seq, exp_kernel->decay, [](double, Eigen::VectorXd& weights) { weights.setOnes(); });
    return d;
  }
  const double support = kernel_support(kernel);
  const auto& ev = seq.events;
  const int dim = seq.dim;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    for (std::size_t j = i; j-- > 0;) {
      const double lag = ev[i].time - ev[j].time;
      if (lag > support) break;
      if (lag <= 0.0) continue;
      for (int m = 0; m < components; ++m) {
        const double g = component_value(kernel, m, lag);
        if (g != 0.0) d.features(static_cast<Eigen::Index>(i), m * dim + ev[j].mark) += g;
      }
    }
    for (int m = 0; m < components; ++m) d.exposure(m, ev[i].mark) += component_integral(kernel, m, seq.t_end - ev[i].time);
  }
  return d;
}

std::vector<SequenceDesign> build_designs(const KernelSpec& kernel, const Corpus& corpus) {
  std::vector<SequenceDesign> designs(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) { designs[i] = build_design(kernel, corpus.sequences[i]); });
  return designs;
}

SequenceDesign build_varying_design(const std::vector<double>& grid, double decay, const EventSequence& seq) {
  const int nodes = static_cast<int>(grid.size());
  if (nodes < 2) throw InvalidInput("time-varying design needs at least two grid nodes");
  for (const auto& e : seq.events) {
    if (e.time < grid.front() || e.time > grid.back())
      throw InvalidInput("sequence '" + seq.id + "' has an event at t=" + std::to_string(e.time) +
                         " outside the grid span [" + std::to_string(grid.front()) + ", " +
                         std::to_string(grid.back()) + "]");
  }
  SequenceDesign d = empty_design(seq, nodes);
  fill_exponential(d, seq, decay, [&](double t, Eigen::VectorXd& weights) {
    weights.setZero();
    int g = static_cast<int>(std::upper_bound(grid.begin(), grid.end(), t) - grid.begin()) - 1;
    g = std::clamp(g, 0, nodes - 2);
    const double frac = (t - grid[g]) / (grid[g + 1] - grid[g]);
    weights[g] = 1.0 - frac;
    weights[g + 1] = frac;
  });
  return d;
}

EStepStats::EStepStats(int components, int dim)
    : baseline(Eigen::VectorXd::Zero(dim)),
      offspring(components, Eigen::MatrixXd::Zero(dim, dim)),
      exposure(Eigen::MatrixXd::Zero(components, dim)) {}

namespace {

// Stacks A into an (M*D) x D matrix so lambda for all events is one product.
Eigen::MatrixXd stacked(const std::vector<Eigen::MatrixXd>& A) {
  const auto d = A.empty() ? 0 : A[0].rows();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(A.size()) * d, d);
  for (std::size_t m = 0; m < A.size(); ++m) out.middleRows(static_cast<Eigen::Index>(m) * d, d) = A[m];
  return out;
}

}  // namespace

void accumulate_estep(const SequenceDesign& design, const Coefficients& theta, double weight, EStepStats& stats) {
  const int dim = design.dim;
  const Eigen::MatrixXd coef = stacked(theta.A);
  const Eigen::MatrixXd excitation = design.features * coef;  // n x D
  Eigen::MatrixXd gathered = Eigen::MatrixXd::Zero(design.components * dim, dim);
  for (std::size_t i = 0; i < design.marks.size(); ++i) {
    const int u = design.marks[i];
    const auto row = static_cast<Eigen::Index>(i);
    const double lambda = theta.mu[u] + excitation(row, u);
    if (!(lambda > 0.0)) {
      stats.impossible = true;
      continue;
    }
    stats.event_loglik += weight * std::log(lambda);
    stats.baseline[u] += weight * theta.mu[u] / lambda;
    gathered.col(u) += (weight / lambda) * design.features.row(row).transpose();
  }
  for (int m = 0; m < design.components; ++m)
    stats.offspring[m] += theta.A[m].cwiseProduct(gathered.middleRows(m * dim, dim));
  stats.exposure += weight * design.exposure;
  stats.time += weight * design.length;
}

EStepStats run_estep(const std::vector<SequenceDesign>& designs, const Coefficients& theta,
                     const std::vector<double>* weights) {
  const int dim = static_cast<int>(theta.mu.size());
  const int components = static_cast<int>(theta.A.size());
  // Per-sequence partials reduced in index order keep results schedule-independent.
  std::vector<EStepStats> partial(designs.size(), EStepStats(components, dim));
  parallel_for(designs.size(), [&](std::size_t n) {
    const double w = weights ? (*weights)[n] : 1.0;
    if (w != 0.0) accumulate_estep(designs[n], theta, w, partial[n]);
  });
  EStepStats total(components, dim);
  for (const auto& p : partial) {
    total.baseline += p.baseline;
    for (int m = 0; m < components; ++m) total.offspring[m] += p.offspring[m];
    total.exposure += p.exposure;
    total.time += p.time;
    total.event_loglik += p.event_loglik;
    total.impossible = total.impossible || p.impossible;
  }
  return total;
}

double design_log_likelihood(const SequenceDesign& design, const Coefficients& theta) {
  EStepStats stats(design.components, design.dim);
  accumulate_estep(design, theta, 1.0, stats);
  if (stats.impossible) return -std::numeric_limits<double>::infinity();
  return -negative_log_likelihood(stats, theta);
}

double negative_log_likelihood(const EStepStats& stats, const Coefficients& theta) {
  if (stats.impossible) return std::numeric_limits<double>::infinity();
  double integral = theta.mu.sum() * stats.time;
  for (std::size_t m = 0; m < theta.A.size(); ++m)
    integral += (stats.exposure.row(static_cast<Eigen::Index>(m)) * theta.A[m]).sum();
  return integral - stats.event_loglik;
}

}  // namespace hawkes
