#include "hawkes/core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hawkes/error.hpp"

namespace hawkes {

void validate_sequence(const EventSequence& seq) {
  const std::string where = seq.id.empty() ? "sequence" : "sequence '" + seq.id + "'";
  if (seq.dim < 1) throw InvalidInput(where + ": dim must be >= 1");
  if (!(seq.t_start <= seq.t_end)) throw InvalidInput(where + ": t_start must not exceed t_end");
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    const Event& e = seq.events[i];
    if (!std::isfinite(e.time) || e.time < 0.0)
      throw InvalidInput(where + ": event " + std::to_string(i) + " has invalid time");
    if (e.mark < 0 || e.mark >= seq.dim)
      throw InvalidInput(where + ": event " + std::to_string(i) + " has mark outside [0, dim)");
    if (e.time < seq.t_start || e.time > seq.t_end)
      throw InvalidInput(where + ": event " + std::to_string(i) + " lies outside the observation window");
    if (i > 0 && seq.events[i - 1].time > e.time) throw InvalidInput(where + ": events are not sorted by time");
  }
}

Eigen::VectorXi count_marks(const EventSequence& seq) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(seq.dim);
  for (const Event& e : seq.events) ++counts[e.mark];
  return counts;
}

bool HawkesModel::operator==(const HawkesModel& other) const {
  if (mu.size() != other.mu.size() || mu != other.mu || !(kernel == other.kernel) || A.size() != other.A.size())
    return false;
  for (std::size_t m = 0; m < A.size(); ++m) {
    if (A[m].rows() != other.A[m].rows() || A[m].cols() != other.A[m].cols() || A[m] != other.A[m]) return false;
  }
  return true;
}

HawkesModel make_exponential_model(Eigen::VectorXd mu, Eigen::MatrixXd infectivity, double decay) {
  HawkesModel model{std::move(mu), ExponentialKernel{decay}, {std::move(infectivity)}};
  validate_model(model);
  return model;
}

HawkesModel make_poisson_model(Eigen::VectorXd mu) {
  const auto d = mu.size();
  return make_exponential_model(std::move(mu), Eigen::MatrixXd::Zero(d, d), 1.0);
}

void validate_model(const HawkesModel& model) {
  validate_kernel(model.kernel);
  const int d = model.dim();
  if (d < 1) throw InvalidInput("model: dim must be >= 1");
  if (!model.mu.allFinite() || (model.mu.array() < 0.0).any())
    throw InvalidInput("model: baseline rates must be finite and nonnegative");
  if (static_cast<int>(model.A.size()) != component_count(model.kernel))
    throw InvalidInput("model: expected " + std::to_string(component_count(model.kernel)) +
                       " coefficient matrices, got " + std::to_string(model.A.size()));
  for (const auto& a : model.A) {
    if (a.rows() != d || a.cols() != d) throw InvalidInput("model: coefficient matrices must be dim x dim");
    if (!a.allFinite() || (a.array() < 0.0).any())
      throw InvalidInput("model: infectivity coefficients must be finite and nonnegative");
  }
}

double kernel_value(const HawkesModel& model, int from, int to, double lag) {
  double value = 0.0;
  for (int m = 0; m < static_cast<int>(model.A.size()); ++m) {
    const double a = model.A[m](from, to);
    if (a != 0.0) value += a * component_value(model.kernel, m, lag);
  }
  return value;
}

double kernel_integral(const HawkesModel& model, int from, int to, double x) {
  double value = 0.0;
  for (int m = 0; m < static_cast<int>(model.A.size()); ++m) {
    const double a = model.A[m](from, to);
    if (a != 0.0) value += a * component_integral(model.kernel, m, x);
  }
  return value;
}

Eigen::MatrixXd branching_matrix(const HawkesModel& model) {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(model.dim(), model.dim());
  for (int m = 0; m < static_cast<int>(model.A.size()); ++m) phi += component_mass(model.kernel, m) * model.A[m];
  return phi;
}

bool is_stable(const HawkesModel& model) { return spectral_radius(branching_matrix(model)) < 1.0; }

namespace {

void check_dims(const HawkesModel& model, const EventSequence& seq) {
  if (model.dim() != seq.dim)
    throw InvalidInput("dimension mismatch: model has " + std::to_string(model.dim()) + ", sequence has " +
                       std::to_string(seq.dim));
}

void check_dim_index(const HawkesModel& model, int u) {
  if (u < 0 || u >= model.dim()) throw InvalidInput("dimension index out of range");
}

}  // namespace

double intensity(const HawkesModel& model, const EventSequence& seq, int u, double t) {
  check_dims(model, seq);
  check_dim_index(model, u);
  const double support = kernel_support(model.kernel);
  double value = model.mu[u];
  for (const Event& e : seq.events) {
    if (e.time >= t) break;
    const double lag = t - e.time;
    if (lag <= support) value += kernel_value(model, e.mark, u, lag);
  }
  return value;
}

Eigen::VectorXd intensities(const HawkesModel& model, const EventSequence& seq, double t) {
  Eigen::VectorXd out(model.dim());
  for (int u = 0; u < model.dim(); ++u) out[u] = intensity(model, seq, u, t);
  return out;
}

double compensator(const HawkesModel& model, const EventSequence& seq, int u, double t0, double t1) {
  check_dims(model, seq);
  check_dim_index(model, u);
  if (t1 < t0) throw InvalidInput("compensator: t0 must not exceed t1");
  double total = model.mu[u] * (t1 - t0);
  for (const Event& e : seq.events) {
    if (e.time >= t1) break;
    const double lo = std::max(t0 - e.time, 0.0);
    total += kernel_integral(model, e.mark, u, t1 - e.time) - kernel_integral(model, e.mark, u, lo);
  }
  return total;
}

std::vector<double> cumulative_compensator(const HawkesModel& model, const EventSequence& seq, int u,
                                           const std::vector<double>& times) {
  check_dims(model, seq);
  check_dim_index(model, u);
  const int d = model.dim();
  std::vector<double> out;
  out.reserve(times.size());
  const auto& ev = seq.events;
  std::size_t next = 0;

  if (const auto* exp_kernel = std::get_if<ExponentialKernel>(&model.kernel)) {
    const double w = exp_kernel->decay;
    // Per source dimension: number of past events and sum of exp(-w (t - t_j)).
    Eigen::VectorXd count = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd decayed = Eigen::VectorXd::Zero(d);
    double clock = seq.t_start;
    for (double t : times) {
      while (next < ev.size() && ev[next].time < t) {
        decayed *= std::exp(-w * (ev[next].time - clock));
        clock = ev[next].time;
        count[ev[next].mark] += 1.0;
        decayed[ev[next].mark] += 1.0;
        ++next;
      }
      const Eigen::VectorXd now = decayed * std::exp(-w * (t - clock));
      const Eigen::VectorXd mass = count - now;
      out.push_back(model.mu[u] * (t - seq.t_start) + model.A[0].col(u).dot(mass));
    }
    return out;
  }

  const double support = kernel_support(model.kernel);
  std::size_t matured = 0;
  double matured_mass = 0.0;
  for (double t : times) {
    while (next < ev.size() && ev[next].time < t) ++next;
    while (matured < next && t - ev[matured].time >= support) {
      matured_mass += kernel_integral(model, ev[matured].mark, u, support);
      ++matured;
    }
    double total = model.mu[u] * (t - seq.t_start) + matured_mass;
    for (std::size_t j = matured; j < next; ++j) total += kernel_integral(model, ev[j].mark, u, t - ev[j].time);
    out.push_back(total);
  }
  return out;
}

double log_likelihood(const HawkesModel& model, const EventSequence& seq) {
  check_dims(model, seq);
  const int d = model.dim();
  const auto& ev = seq.events;
  const std::size_t n = ev.size();
  double event_term = 0.0;
  bool impossible = false;

  if (const auto* exp_kernel = std::get_if<ExponentialKernel>(&model.kernel)) {
    const double w = exp_kernel->decay;
    const Eigen::MatrixXd& a = model.A[0];
    Eigen::VectorXd excitation = Eigen::VectorXd::Zero(d);  // sum_j w exp(-w (t - t_j)) per source
    double clock = seq.t_start;
    std::size_t i = 0;
    while (i < n) {
      const double t = ev[i].time;
      excitation *= std::exp(-w * (t - clock));
      clock = t;
      std::size_t group_end = i;
      while (group_end < n && ev[group_end].time == t) ++group_end;
      for (std::size_t k = i; k < group_end; ++k) {
        const int u = ev[k].mark;
        const double lambda = model.mu[u] + a.col(u).dot(excitation);
        if (lambda > 0.0) event_term += std::log(lambda);
        else impossible = true;
      }
      for (std::size_t k = i; k < group_end; ++k) excitation[ev[k].mark] += w;
      i = group_end;
    }
  } else {
    const double support = kernel_support(model.kernel);
    for (std::size_t i = 0; i < n; ++i) {
      const int u = ev[i].mark;
      double lambda = model.mu[u];
      for (std::size_t j = i; j-- > 0;) {
        const double lag = ev[i].time - ev[j].time;
        if (lag > support) break;
        if (lag > 0.0) lambda += kernel_value(model, ev[j].mark, u, lag);
      }
      if (lambda > 0.0) event_term += std::log(lambda);
      else impossible = true;
    }
  }
  if (impossible) return -std::numeric_limits<double>::infinity();

  double integral = model.mu.sum() * seq.length();
  for (const Event& e : ev) {
    for (int u = 0; u < d; ++u) integral += kernel_integral(model, e.mark, u, seq.t_end - e.time);
  }
  return event_term - integral;
}

}  // namespace hawkes
