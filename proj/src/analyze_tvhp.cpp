#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "hawkes/analyze.hpp"
#include "hawkes/error.hpp"
#include "hawkes/io.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/simulate.hpp"

namespace hawkes {

using nlohmann::json;

Eigen::MatrixXd TvhpModel::infectivity_at(double s) const {
  const int g_count = static_cast<int>(grid.size());
  if (s <= grid.front()) return nodes.front();
  if (s >= grid.back()) return nodes.back();
  int g = static_cast<int>(std::upper_bound(grid.begin(), grid.end(), s) - grid.begin()) - 1;
  g = std::clamp(g, 0, g_count - 2);
  const double frac = (s - grid[g]) / (grid[g + 1] - grid[g]);
  return (1.0 - frac) * nodes[g] + frac * nodes[g + 1];
}

void validate_tvhp(const TvhpModel& model) {
  const int d = model.dim();
  if (d < 1) throw InvalidInput("TVHP model needs at least one dimension");
  if (model.grid.size() < 2) throw InvalidInput("TVHP grid needs at least two nodes");
  if (model.nodes.size() != model.grid.size()) throw InvalidInput("TVHP needs one infectivity matrix per grid node");
  for (std::size_t g = 1; g < model.grid.size(); ++g)
    if (!(model.grid[g] > model.grid[g - 1])) throw InvalidInput("TVHP grid must be strictly increasing");
  if (!(model.decay > 0.0) || !std::isfinite(model.decay)) throw InvalidInput("TVHP decay must be positive");
  if (!model.mu.allFinite() || (model.mu.array() < 0.0).any()) throw InvalidInput("TVHP mu must be nonnegative");
  for (const auto& a : model.nodes) {
    if (a.rows() != d || a.cols() != d) throw InvalidInput("TVHP node matrix has the wrong shape");
    if (!a.allFinite() || (a.array() < 0.0).any()) throw InvalidInput("TVHP node matrices must be nonnegative");
  }
}

namespace {

Eigen::MatrixXd difference_gram(int n) {
  Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(n - 1, n);
  for (int r = 0; r + 1 < n; ++r) {
    d1(r, r) = -1.0;
    d1(r, r + 1) = 1.0;
  }
  return d1.transpose() * d1;
}

double smoothness_penalty(const std::vector<Eigen::MatrixXd>& nodes, double beta) {
  if (!std::isfinite(beta) || beta == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t g = 1; g < nodes.size(); ++g) s += (nodes[g] - nodes[g - 1]).squaredNorm();
  return beta * s;
}

}  // namespace

TvhpFit fit_tvhp(const Corpus& corpus, const std::vector<double>& grid, double decay, const LearnConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  validate_config(cfg);
  if (grid.size() < 2) throw InvalidInput("fit_tvhp: grid needs at least two nodes");
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (!(grid[g] > grid[g - 1])) throw InvalidInput("fit_tvhp: grid must be strictly increasing");
  if (!(decay > 0.0)) throw InvalidInput("fit_tvhp: decay must be positive");
  const double beta = cfg.temporal_smoothness;
  if (!(beta >= 0.0)) throw InvalidInput("fit_tvhp: temporal smoothness must be nonnegative");
  if (corpus.empty()) throw InvalidInput("cannot fit an empty corpus");
  validate_corpus(corpus);

  const int G = static_cast<int>(grid.size());
  const int d = corpus.dim;
  std::vector<SequenceDesign> designs(corpus.size());
  for (std::size_t n = 0; n < corpus.size(); ++n) designs[n] = build_varying_design(grid, decay, corpus.sequences[n]);

  TvhpFit fit;
  Coefficients theta = em::initial(corpus, G, cfg.seed, cfg.baseline_only);
  const bool tied = std::isinf(beta);
  if (tied)
    for (int g = 1; g < G; ++g) theta.A[g] = theta.A[0];
  const Eigen::MatrixXd P = tied ? Eigen::MatrixXd() : Eigen::MatrixXd(beta * difference_gram(G));

  auto objective = [&](const EStepStats& stats) {
    return negative_log_likelihood(stats, theta) + smoothness_penalty(theta.A, beta);
  };

  EStepStats stats = run_estep(designs, theta);
  fit.objective_trace.push_back(objective(stats));
  bool regularised = false;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    theta.mu = em::update_baseline(stats);
    if (!cfg.baseline_only) {
      for (int v = 0; v < d; ++v) {
        for (int u = 0; u < d; ++u) {
          Eigen::VectorXd c(G), e(G), x0(G);
          for (int g = 0; g < G; ++g) {
            c[g] = stats.offspring[g](v, u);
            e[g] = stats.exposure(g, v);
            x0[g] = theta.A[g](v, u);
          }
          if (tied) {
            const double value = e.sum() > 0.0 ? c.sum() / e.sum() : 0.0;
            for (int g = 0; g < G; ++g) theta.A[g](v, u) = value;
          } else {
            const Eigen::VectorXd x = em::minimize_poisson_quadratic(c, e, P, x0, fit.clamp_count, regularised);
            for (int g = 0; g < G; ++g) theta.A[g](v, u) = x[g];
          }
        }
      }
    }
    stats = run_estep(designs, theta);
    fit.objective_trace.push_back(objective(stats));
    fit.iterations = iter + 1;
    if (em::converged(fit.objective_trace, cfg.tol)) {
      fit.converged = true;
      break;
    }
  }
  if (regularised) fit.warnings.push_back("singular node update system; a small diagonal bump was added");
  fit.model = TvhpModel{theta.mu, grid, theta.A, decay};
  fit.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return fit;
}

double tvhp_log_likelihood(const TvhpModel& model, const EventSequence& seq) {
  validate_tvhp(model);
  if (seq.dim != model.dim()) throw InvalidInput("tvhp_log_likelihood: dimension mismatch");
  const double w = model.decay;
  std::vector<Eigen::MatrixXd> a;
  a.reserve(seq.size());
  for (const auto& e : seq.events) a.push_back(model.infectivity_at(e.time));

  double ll = -model.mu.sum() * seq.length();
  for (std::size_t j = 0; j < seq.size(); ++j)
    ll -= a[j].row(seq.events[j].mark).sum() * (1.0 - std::exp(-w * (seq.t_end - seq.events[j].time)));
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const int u = seq.events[i].mark;
    double lambda = model.mu[u];
    for (std::size_t j = 0; j < i; ++j) {
      const double dt = seq.events[i].time - seq.events[j].time;
      if (dt <= 0.0) continue;
      lambda += a[j](seq.events[j].mark, u) * w * std::exp(-w * dt);
    }
    if (!(lambda > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += std::log(lambda);
  }
  return ll;
}

Corpus simulate_tvhp(const TvhpModel& model, double t_end, int n_sequences, std::uint64_t seed,
                     std::size_t max_events) {
  validate_tvhp(model);
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidInput("simulate_tvhp: t_end must be positive");
  if (n_sequences < 0) throw InvalidInput("simulate_tvhp: negative sequence count");
  const int d = model.dim();
  Corpus corpus;
  corpus.dim = d;
  const Rng root(seed);
  for (int n = 0; n < n_sequences; ++n) {
    Rng rng = root.split(static_cast<std::uint64_t>(n));
    EventSequence seq;
    seq.dim = d;
    seq.t_start = 0.0;
    seq.t_end = t_end;
    seq.id = "seq" + std::to_string(n);
    std::vector<Event> pending;
    for (int u = 0; u < d; ++u) {
      if (model.mu[u] <= 0.0) continue;
      for (double t = rng.exponential(model.mu[u]); t <= t_end; t += rng.exponential(model.mu[u]))
        pending.push_back({t, u});
    }
    while (!pending.empty()) {
      const Event parent = pending.back();
      pending.pop_back();
      seq.events.push_back(parent);
      if (seq.events.size() > max_events) {
        std::stable_sort(seq.events.begin(), seq.events.end(),
                         [](const Event& x, const Event& y) { return x.time < y.time; });
        throw EventCapExceeded(seq, static_cast<std::size_t>(n));
      }
      const Eigen::MatrixXd a = model.infectivity_at(parent.time);
      for (int u = 0; u < d; ++u) {
        const double mean = a(parent.mark, u);
        if (mean <= 0.0) continue;
        // Poisson(mean) as the count of unit-rate arrivals before `mean`.
        for (double s = rng.exponential(1.0); s <= mean; s += rng.exponential(1.0)) {
          const double t = parent.time + rng.exponential(model.decay);
          if (t <= t_end) pending.push_back({t, u});
        }
      }
    }
    std::stable_sort(seq.events.begin(), seq.events.end(),
                     [](const Event& x, const Event& y) { return x.time < y.time; });
    corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

std::vector<double> uniform_grid(double t0, double t1, int nodes) {
  if (nodes < 2) throw InvalidInput("uniform_grid: at least two nodes");
  if (!(t1 > t0)) throw InvalidInput("uniform_grid: empty interval");
  std::vector<double> grid(static_cast<std::size_t>(nodes));
  for (int g = 0; g < nodes; ++g) grid[g] = t0 + (t1 - t0) * g / (nodes - 1);
  grid.back() = t1;
  return grid;
}

json tvhp_to_json(const TvhpModel& model) {
  json nodes = json::array();
  for (const auto& a : model.nodes) {
    json rows = json::array();
    for (Eigen::Index v = 0; v < a.rows(); ++v) {
      json row = json::array();
      for (Eigen::Index u = 0; u < a.cols(); ++u) row.push_back(a(v, u));
      rows.push_back(std::move(row));
    }
    nodes.push_back(std::move(rows));
  }
  return json{{"dim", model.dim()},
              {"mu", std::vector<double>(model.mu.data(), model.mu.data() + model.mu.size())},
              {"decay", model.decay},
              {"grid", model.grid},
              {"nodes", std::move(nodes)}};
}

TvhpModel tvhp_from_json(const json& doc) {
  TvhpModel model;
  try {
    const auto mu = doc.at("mu").get<std::vector<double>>();
    model.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size()));
    model.decay = doc.at("decay").get<double>();
    model.grid = doc.at("grid").get<std::vector<double>>();
    const int d = model.dim();
    if (doc.contains("dim") && doc.at("dim").get<int>() != d) throw SchemaError("TVHP dim disagrees with mu");
    for (const auto& node : doc.at("nodes")) {
      Eigen::MatrixXd a(d, d);
      if (static_cast<int>(node.size()) != d) throw SchemaError("TVHP node matrix has the wrong shape");
      for (int v = 0; v < d; ++v) {
        const auto row = node.at(v).get<std::vector<double>>();
        if (static_cast<int>(row.size()) != d) throw SchemaError("TVHP node matrix has the wrong shape");
        for (int u = 0; u < d; ++u) a(v, u) = row[u];
      }
      model.nodes.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed TVHP document: ") + e.what());
  }
  validate_tvhp(model);
  return model;
}

std::string tvhp_long_csv(const TvhpModel& model) {
  std::ostringstream out;
  out << "s,v,u,a\n";
  for (std::size_t g = 0; g < model.grid.size(); ++g)
    for (int v = 0; v < model.dim(); ++v)
      for (int u = 0; u < model.dim(); ++u)
        out << io::format_double(model.grid[g]) << ',' << v << ',' << u << ','
            << io::format_double(model.nodes[g](v, u)) << '\n';
  return out.str();
}

}  // namespace hawkes
