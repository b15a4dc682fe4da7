#include "hawkes/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "hawkes/io.hpp"
#include "hawkes/log.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

const char* method_name(SimMethod method) {
  switch (method) {
    case SimMethod::Branch: return "branch";
    case SimMethod::Ogata: return "ogata";
    case SimMethod::ExactExponential: return "exact-exp";
  }
  return "unknown";
}

std::optional<SimMethod> parse_method(const std::string& name) {
  if (name == "branch") return SimMethod::Branch;
  if (name == "ogata") return SimMethod::Ogata;
  if (name == "exact-exp") return SimMethod::ExactExponential;
  return std::nullopt;
}

namespace {

void check_config(const SimConfig& cfg) {
  validate_model(cfg.model);
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) throw InvalidInput("simulation horizon t_end must be positive");
  if (cfg.n_sequences < 0) throw InvalidInput("n_sequences must be nonnegative");
  if (cfg.max_events == 0) throw InvalidInput("max_events must be positive");
}

EventSequence make_sequence(const SimConfig& cfg, std::size_t index, std::vector<Event> events) {
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  EventSequence seq;
  seq.events = std::move(events);
  seq.t_start = 0.0;
  seq.t_end = cfg.t_end;
  seq.dim = cfg.model.dim();
  seq.id = "seq" + std::to_string(index);
  return seq;
}

template <class Generator>
Corpus simulate_each(const SimConfig& cfg, Generator generate) {
  Corpus corpus;
  corpus.dim = cfg.model.dim();
  corpus.sequences.resize(static_cast<std::size_t>(cfg.n_sequences));
  Rng root(cfg.seed);
  parallel_for(corpus.sequences.size(), [&](std::size_t i) {
    Rng rng = root.split(i);
    corpus.sequences[i] = make_sequence(cfg, i, generate(rng, i));
  });
  return corpus;
}

[[noreturn]] void cap_exceeded(const SimConfig& cfg, std::size_t index, std::vector<Event> events) {
  auto seq = make_sequence(cfg, index, std::move(events));
  if (seq.events.size() > cfg.max_events) seq.events.resize(cfg.max_events);
  throw EventCapExceeded(std::move(seq), index);
}

// Supremum of phi_vu over lags >= lag, summed across components.
double pair_sup_from(const HawkesModel& model, int v, int u, double lag) {
  if (const auto* grid = std::get_if<DiscretizedKernel>(&model.kernel)) {
    // Step components do not overlap, so the supremum is a max, not a sum.
    double s = 0.0;
    for (int m = std::max(0, static_cast<int>(std::floor(lag / grid->lag)) - 1); m < grid->points; ++m)
      s = std::max(s, model.A[m](v, u));
    return s;
  }
  double s = 0.0;
  for (int m = 0; m < static_cast<int>(model.A.size()); ++m) {
    const double a = model.A[m](v, u);
    if (a != 0.0) s += a * component_sup_from(model.kernel, m, lag);
  }
  return s;
}

}  // namespace

Corpus simulate_branch(const SimConfig& cfg) {
  check_config(cfg);
  const HawkesModel& model = cfg.model;
  const double radius = spectral_radius(branching_matrix(model));
  if (!(radius < 1.0))
    throw InvalidInput("branch simulation requires spectral radius < 1 (got " + io::format_fixed(radius, 4) +
                       "); offspring generations may not terminate");
  const int d = model.dim();
  const double support = kernel_support(model.kernel);
  const auto* exp_kernel = std::get_if<ExponentialKernel>(&model.kernel);

  return simulate_each(cfg, [&](Rng& rng, std::size_t index) {
    std::vector<Event> events;
    auto push = [&](double t, int mark) {
      events.push_back(Event{t, mark});
      if (events.size() > cfg.max_events) cap_exceeded(cfg, index, std::move(events));
    };
    for (int u = 0; u < d; ++u) {
      if (model.mu[u] <= 0.0) continue;
      for (double t = rng.exponential(model.mu[u]); t <= cfg.t_end; t += rng.exponential(model.mu[u])) push(t, u);
    }
    for (std::size_t next = 0; next < events.size(); ++next) {
      const Event parent = events[next];
      const double remaining = cfg.t_end - parent.time;
      for (int u = 0; u < d; ++u) {
        if (exp_kernel) {
          // Inversion of the cumulative offspring intensity a * (1 - exp(-w s)).
          const double a = model.A[0](parent.mark, u);
          if (a <= 0.0) continue;
          const double w = exp_kernel->decay;
          const double mass = -a * std::expm1(-w * remaining);
          for (double cum = rng.exponential(1.0); cum < mass; cum += rng.exponential(1.0))
            push(parent.time - std::log1p(-cum / a) / w, u);
        } else {
          const double bound = pair_sup_from(model, parent.mark, u, 0.0);
          if (bound <= 0.0) continue;
          const double horizon = std::min(remaining, support);
          for (double lag = rng.exponential(bound); lag <= horizon; lag += rng.exponential(bound)) {
            if (rng.uniform() * bound <= kernel_value(model, parent.mark, u, lag)) push(parent.time + lag, u);
          }
        }
      }
    }
    return events;
  });
}

Corpus simulate_ogata(const SimConfig& cfg) {
  check_config(cfg);
  const HawkesModel& model = cfg.model;
  if (!is_stable(model)) warn("ogata simulation of an unstable model; event counts may explode");
  const int d = model.dim();
  const double support = kernel_support(model.kernel);
  const double base_rate = model.mu.sum();

  return simulate_each(cfg, [&](Rng& rng, std::size_t index) {
    std::vector<Event> events;
    std::size_t first_active = 0;
    Eigen::VectorXd lambda(d);
    double t = 0.0;
    while (true) {
      while (first_active < events.size() && t - events[first_active].time > support) ++first_active;
      double bound = base_rate;
      for (std::size_t j = first_active; j < events.size(); ++j) {
        const double lag = t - events[j].time;
        for (int u = 0; u < d; ++u) bound += pair_sup_from(model, events[j].mark, u, lag);
      }
      if (bound <= 0.0) break;
      t += rng.exponential(bound);
      if (t > cfg.t_end) break;
      lambda = model.mu;
      for (std::size_t j = first_active; j < events.size(); ++j) {
        const double lag = t - events[j].time;
        for (int u = 0; u < d; ++u) lambda[u] += kernel_value(model, events[j].mark, u, lag);
      }
      // One uniform decides acceptance and, if accepted, the dimension.
      const double draw = rng.uniform() * bound;
      double cumulative = 0.0;
      for (int u = 0; u < d; ++u) {
        cumulative += lambda[u];
        if (draw <= cumulative) {
          events.push_back(Event{t, u});
          if (events.size() > cfg.max_events) cap_exceeded(cfg, index, std::move(events));
          break;
        }
      }
    }
    return events;
  });
}

Corpus simulate_exact_exp(const SimConfig& cfg) {
  check_config(cfg);
  const auto* exp_kernel = std::get_if<ExponentialKernel>(&cfg.model.kernel);
  if (!exp_kernel)
    throw UnsupportedKernel(std::string("exact-exp simulation requires an exponential kernel, got ") +
                            kernel_type_name(cfg.model.kernel) + "; use branch or ogata");
  const HawkesModel& model = cfg.model;
  if (!is_stable(model)) warn("exact-exp simulation of an unstable model; event counts may explode");
  const int d = model.dim();
  const double w = exp_kernel->decay;
  const Eigen::MatrixXd jump = w * model.A[0];

  return simulate_each(cfg, [&](Rng& rng, std::size_t index) {
    std::vector<Event> events;
    Eigen::VectorXd excitation = Eigen::VectorXd::Zero(d);
    double t = 0.0;
    while (true) {
      double wait = kInfinity;
      int winner = -1;
      for (int u = 0; u < d; ++u) {
        double candidate = kInfinity;
        if (excitation[u] > 0.0) {
          // Decaying part: total remaining mass is excitation/w, so it may never fire.
          const double x = 1.0 + w * std::log(rng.uniform()) / excitation[u];
          if (x > 0.0) candidate = -std::log(x) / w;
        }
        if (model.mu[u] > 0.0) candidate = std::min(candidate, rng.exponential(model.mu[u]));
        if (candidate < wait) {
          wait = candidate;
          winner = u;
        }
      }
      if (winner < 0 || t + wait > cfg.t_end) break;
      t += wait;
      excitation *= std::exp(-w * wait);
      excitation += jump.row(winner).transpose();
      events.push_back(Event{t, winner});
      if (events.size() > cfg.max_events) cap_exceeded(cfg, index, std::move(events));
    }
    return events;
  });
}

Corpus simulate(const SimConfig& cfg, SimMethod method) {
  switch (method) {
    case SimMethod::Branch: return simulate_branch(cfg);
    case SimMethod::Ogata: return simulate_ogata(cfg);
    case SimMethod::ExactExponential: return simulate_exact_exp(cfg);
  }
  throw InvalidInput("unknown simulation method");
}

std::vector<BenchmarkRow> benchmark_simulators(const BenchmarkGrid& grid) {
  std::vector<BenchmarkRow> rows;
  for (double horizon : grid.horizons) {
    for (SimMethod method : {SimMethod::Branch, SimMethod::Ogata, SimMethod::ExactExponential}) {
      BenchmarkRow row;
      row.method = method_name(method);
      row.t_end = horizon;
      row.seed = grid.seed;
      if (method == SimMethod::ExactExponential && !is_exponential(grid.model.kernel)) {
        row.applicable = false;
        rows.push_back(std::move(row));
        continue;
      }
      SimConfig cfg{grid.model, horizon, grid.n_sequences, grid.seed, grid.max_events};
      try {
        const auto start = std::chrono::steady_clock::now();
        const Corpus corpus = simulate(cfg, method);
        row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        row.event_count = corpus.event_count();
      } catch (const Error& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows, bool include_timing) {
  std::ostringstream out;
  out << "method,t_end,seed,wall_time_s,event_count\n";
  for (const auto& r : rows) {
    out << r.method << ',' << io::format_double(r.t_end) << ',' << r.seed << ',';
    if (!r.applicable) {
      out << "n/a,n/a\n";
      continue;
    }
    if (!r.error.empty()) {
      out << "error,error\n";
      continue;
    }
    if (include_timing && r.wall_time) out << io::format_double(*r.wall_time);
    out << ',' << *r.event_count << '\n';
  }
  return out.str();
}

}  // namespace hawkes
