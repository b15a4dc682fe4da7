#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "hawkes/analyze.hpp"
#include "hawkes/error.hpp"
#include "hawkes/io.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

using nlohmann::json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kInnerSteps = 10;

double log_sum_exp(const Eigen::VectorXd& x) {
  const double peak = x.maxCoeff();
  if (!std::isfinite(peak)) return peak;
  return peak + std::log((x.array() - peak).exp().sum());
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& r) {
  std::vector<int> out(static_cast<std::size_t>(r.rows()));
  for (Eigen::Index n = 0; n < r.rows(); ++n) {
    Eigen::Index k = 0;
    r.row(n).maxCoeff(&k);
    out[n] = static_cast<int>(k);
  }
  return out;
}

}  // namespace

ClusterResult cluster_mixture(const Corpus& corpus, int K, const KernelSpec& kernel, const LearnConfig& cfg) {
  validate_config(cfg);
  validate_kernel(kernel);
  if (is_discretized(kernel))
    throw UnsupportedKernel("cluster_mixture needs a continuous kernel (exponential or basis)");
  if (K < 1) throw InvalidInput("cluster count K must be >= 1");
  if (static_cast<int>(corpus.size()) < K) throw InvalidInput("corpus has fewer sequences than clusters");
  validate_corpus(corpus);

  const auto N = static_cast<Eigen::Index>(corpus.size());
  const int components = component_count(kernel);
  const auto designs = build_designs(kernel, corpus);

  ClusterResult result;
  result.K = K;

  // Random balanced one-hot start.
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(N, K);
  for (std::size_t i = 0; i < order.size(); ++i) resp(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(i % K)) = 1.0;

  std::vector<Coefficients> theta;
  for (int k = 0; k < K; ++k) {
    std::vector<double> w(resp.col(k).data(), resp.col(k).data() + N);
    theta.push_back(em::initial(corpus, components, derive_seed(cfg.seed, k + 1), cfg.baseline_only, &w));
  }

  auto m_step = [&](const Eigen::MatrixXd& r) {
    for (int k = 0; k < K; ++k) {
      std::vector<double> w(r.col(k).data(), r.col(k).data() + N);
      for (int step = 0; step < kInnerSteps; ++step) {
        const EStepStats stats = run_estep(designs, theta[k], &w);
        if (!(stats.time > 0.0)) break;
        theta[k].mu = em::update_baseline(stats);
        if (!cfg.baseline_only) theta[k].A = em::update_infectivity(stats, theta[k].A, cfg.penalty, kernel);
      }
    }
  };

  m_step(resp);
  Eigen::VectorXd mixing = Eigen::VectorXd::Constant(K, 1.0 / K);
  Eigen::MatrixXd loglik(N, K);
  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t n) {
      for (int k = 0; k < K; ++k) loglik(static_cast<Eigen::Index>(n), k) = design_log_likelihood(designs[n], theta[k]);
    });
    double objective = 0.0;
    Eigen::VectorXd per_seq(N);
    for (Eigen::Index n = 0; n < N; ++n) {
      Eigen::VectorXd joint = loglik.row(n).transpose() + mixing.array().log().matrix();
      per_seq[n] = log_sum_exp(joint);
      if (std::isfinite(per_seq[n])) {
        resp.row(n) = (joint.array() - per_seq[n]).exp().matrix().transpose();
      } else {
        resp.row(n).setConstant(1.0 / K);
      }
      objective += per_seq[n];
    }
    for (int k = 0; k < K; ++k)
      objective -= penalty_value(cfg.penalty, em::summed_infectivity(theta[k].A, kernel));
    result.objective_trace.push_back(objective);
    result.iterations = iter;
    if (em::converged(result.objective_trace, cfg.tol)) {
      result.converged = true;
      break;
    }
    if (iter == cfg.max_iters) break;

    for (int k = 0; k < K; ++k) {
      if ((resp.col(k).array() < 1e-12).all()) {
        Eigen::Index worst = 0;
        per_seq.minCoeff(&worst);
        resp.row(worst).setZero();
        resp(worst, k) = 1.0;
        result.warnings.push_back("cluster " + std::to_string(k) + " emptied at iteration " + std::to_string(iter) +
                                  "; re-seeded from sequence '" + corpus.sequences[worst].id + "'");
      }
    }
    mixing = resp.colwise().mean().transpose();
    m_step(resp);
  }

  result.responsibilities = resp;
  result.assignments = argmax_rows(resp);
  result.mixing = mixing;
  for (int k = 0; k < K; ++k) result.models.push_back(HawkesModel{theta[k].mu, kernel, theta[k].A});
  return result;
}

double sequence_distance(const EventSequence& a, const EventSequence& b, const DistanceParams& params) {
  if (a.dim != b.dim) throw InvalidInput("sequence_distance: dimension mismatch");
  if (params.time_cost < 0.0 || params.mark_mismatch_cost < 0.0 || params.indel_cost < 0.0)
    throw InvalidInput("sequence_distance: costs must be nonnegative");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<double> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<double>(j) * params.indel_cost;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<double>(i) * params.indel_cost;
    const Event& ea = a.events[i - 1];
    for (std::size_t j = 1; j <= m; ++j) {
      const Event& eb = b.events[j - 1];
      const double match = prev[j - 1] + params.time_cost * std::abs(ea.time - eb.time) +
                           (ea.mark != eb.mark ? params.mark_mismatch_cost : 0.0);
      cur[j] = std::min({prev[j] + params.indel_cost, cur[j - 1] + params.indel_cost, match});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

Eigen::MatrixXd distance_matrix(const Corpus& corpus, const DistanceParams& params) {
  const auto N = static_cast<Eigen::Index>(corpus.size());
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(N, N);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t i) {
    for (std::size_t j = i + 1; j < static_cast<std::size_t>(N); ++j)
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sequence_distance(corpus.sequences[i], corpus.sequences[j], params);
  });
  dist.triangularView<Eigen::StrictlyLower>() = dist.transpose();
  return dist;
}

ClusterResult cluster_distance(const Corpus& corpus, int K, const DistanceParams& params, std::uint64_t seed) {
  const int N = static_cast<int>(corpus.size());
  if (K < 1) throw InvalidInput("cluster count K must be >= 1");
  if (K > N) throw InvalidInput("cluster count K exceeds the number of sequences");
  const Eigen::MatrixXd dist = distance_matrix(corpus, params);

  // k-medoids++ seeding.
  Rng rng(seed);
  std::vector<int> medoids{static_cast<int>(rng.below(static_cast<std::uint64_t>(N)))};
  Eigen::VectorXd nearest = dist.col(medoids[0]);
  while (static_cast<int>(medoids.size()) < K) {
    Eigen::VectorXd weight = nearest.array().square();
    for (int m : medoids) weight[m] = 0.0;
    const double total = weight.sum();
    int pick = -1;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (int i = 0; i < N; ++i) {
        if (weight[i] <= 0.0) continue;
        pick = i;
        target -= weight[i];
        if (target <= 0.0) break;
      }
    } else {
      std::vector<int> rest;
      for (int i = 0; i < N; ++i)
        if (std::find(medoids.begin(), medoids.end(), i) == medoids.end()) rest.push_back(i);
      pick = rest[rng.below(rest.size())];
    }
    medoids.push_back(pick);
    nearest = nearest.cwiseMin(dist.col(pick));
  }

  ClusterResult result;
  result.K = K;
  std::vector<int> assign(static_cast<std::size_t>(N), 0);
  auto assign_all = [&] {
    double cost = 0.0;
    for (int i = 0; i < N; ++i) {
      int best = 0;
      for (int k = 1; k < K; ++k)
        if (dist(i, medoids[k]) < dist(i, medoids[best])) best = k;
      for (int k = 0; k < K; ++k)
        if (medoids[k] == i) best = k;
      assign[i] = best;
      cost += dist(i, medoids[best]);
    }
    return cost;
  };

  double cost = assign_all();
  result.objective_trace.push_back(cost);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int k = 0; k < K; ++k) {
      int best = medoids[k];
      double best_sum = 0.0;
      for (int j = 0; j < N; ++j)
        if (assign[j] == k) best_sum += dist(best, j);
      for (int i = 0; i < N; ++i) {
        if (assign[i] != k) continue;
        double s = 0.0;
        for (int j = 0; j < N; ++j)
          if (assign[j] == k) s += dist(i, j);
        if (s < best_sum) {
          best_sum = s;
          best = i;
        }
      }
      if (best != medoids[k]) {
        medoids[k] = best;
        changed = true;
      }
    }
    result.iterations = iter + 1;
    if (!changed) {
      result.converged = true;
      break;
    }
    cost = assign_all();
    result.objective_trace.push_back(cost);
  }

  result.assignments = assign;
  result.medoids = medoids;
  result.responsibilities = Eigen::MatrixXd::Zero(N, K);
  for (int i = 0; i < N; ++i) result.responsibilities(i, assign[i]) = 1.0;
  result.mixing = result.responsibilities.colwise().mean().transpose();
  return result;
}

double clustering_purity(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw InvalidInput("purity: label vectors differ in length");
  if (predicted.empty()) return 1.0;
  const int kp = *std::max_element(predicted.begin(), predicted.end()) + 1;
  const int kt = *std::max_element(truth.begin(), truth.end()) + 1;
  const int k = std::max(kp, kt);
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(k, k);
  for (std::size_t i = 0; i < predicted.size(); ++i) ++table(predicted[i], truth[i]);

  int best = 0;
  if (k <= 8) {
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      int hits = 0;
      for (int p = 0; p < k; ++p) hits += table(p, perm[p]);
      best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    // Greedy matching for large label sets.
    Eigen::MatrixXi t = table;
    for (int step = 0; step < k; ++step) {
      Eigen::Index r = 0, c = 0;
      const int v = t.maxCoeff(&r, &c);
      if (v <= 0) break;
      best += v;
      t.row(r).setConstant(-1);
      t.col(c).setConstant(-1);
    }
  }
  return static_cast<double>(best) / static_cast<double>(predicted.size());
}

json cluster_to_json(const ClusterResult& result, const std::vector<std::string>& ids) {
  json resp = json::array();
  for (Eigen::Index n = 0; n < result.responsibilities.rows(); ++n) {
    json row = json::array();
    for (Eigen::Index k = 0; k < result.responsibilities.cols(); ++k) row.push_back(result.responsibilities(n, k));
    resp.push_back(std::move(row));
  }
  json models = json::array();
  for (const auto& m : result.models) models.push_back(model_to_json(m));
  return json{{"K", result.K},
              {"ids", ids},
              {"assignments", result.assignments},
              {"responsibilities", std::move(resp)},
              {"mixing", std::vector<double>(result.mixing.data(), result.mixing.data() + result.mixing.size())},
              {"medoids", result.medoids},
              {"models", std::move(models)},
              {"objective_trace", result.objective_trace},
              {"converged", result.converged},
              {"iterations", result.iterations},
              {"warnings", result.warnings}};
}

std::string distance_csv(const Eigen::MatrixXd& distances, const std::vector<std::string>& ids) {
  std::ostringstream out;
  out << "id";
  for (const auto& id : ids) out << ',' << io::csv_field(id);
  out << '\n';
  for (Eigen::Index i = 0; i < distances.rows(); ++i) {
    out << io::csv_field(ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < distances.cols(); ++j) out << ',' << io::format_double(distances(i, j));
    out << '\n';
  }
  return out.str();
}

DistanceTable parse_distance_csv(const std::string& text) {
  const io::CsvTable table = io::parse_csv(text);
  if (table.header.empty() || table.header[0] != "id") throw FormatError("distance CSV must start with an id column");
  DistanceTable out;
  out.ids.assign(table.header.begin() + 1, table.header.end());
  const auto n = static_cast<Eigen::Index>(out.ids.size());
  if (static_cast<Eigen::Index>(table.rows.size()) != n) throw FormatError("distance CSV is not square");
  out.distances.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    if (static_cast<Eigen::Index>(row.size()) != n + 1 || row[0] != out.ids[i])
      throw FormatError("distance CSV row " + std::to_string(i) + " is malformed");
    for (Eigen::Index j = 0; j < n; ++j) {
      try {
        out.distances(i, j) = std::stod(row[j + 1]);
      } catch (const std::exception&) {
        throw ParseError("non-numeric distance '" + row[j + 1] + "'", table.line_numbers[i]);
      }
    }
  }
  return out;
}

}  // namespace hawkes
