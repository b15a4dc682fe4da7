#include <chrono>
#include <cmath>
#include <limits>

#include "hawkes/error.hpp"
#include "hawkes/learn.hpp"
#include "hawkes/prox.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

using nlohmann::json;

const char* penalty_name(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::None: return "none";
    case PenaltyKind::Sparse: return "sparse";
    case PenaltyKind::GroupSparse: return "group";
    case PenaltyKind::LowRank: return "lowrank";
  }
  return "none";
}

std::optional<PenaltyKind> parse_penalty(const std::string& name) {
  if (name == "none") return PenaltyKind::None;
  if (name == "sparse") return PenaltyKind::Sparse;
  if (name == "group" || name == "group_sparse") return PenaltyKind::GroupSparse;
  if (name == "lowrank" || name == "low_rank") return PenaltyKind::LowRank;
  return std::nullopt;
}

double penalty_value(const Penalty& penalty, const Eigen::MatrixXd& phi) {
  if (penalty.weight == 0.0) return 0.0;
  switch (penalty.kind) {
    case PenaltyKind::None: return 0.0;
    case PenaltyKind::Sparse: return penalty.weight * prox::l1_norm(phi);
    case PenaltyKind::GroupSparse: return penalty.weight * prox::group_norm(phi);
    case PenaltyKind::LowRank: return penalty.weight * prox::nuclear_norm(phi);
  }
  return 0.0;
}

void validate_config(const LearnConfig& cfg) {
  if (cfg.max_iters < 1) throw InvalidInput("max_iters must be >= 1");
  if (!(cfg.tol >= 0.0)) throw InvalidInput("tol must be nonnegative");
  if (!(cfg.penalty.weight >= 0.0)) throw InvalidInput("penalty weight must be nonnegative");
  if (!(cfg.smoothness >= 0.0)) throw InvalidInput("smoothness weight must be nonnegative");
  if (!(cfg.temporal_smoothness >= 0.0)) throw InvalidInput("temporal smoothness weight must be nonnegative");
  if (!(cfg.ridge >= 0.0)) throw InvalidInput("ridge must be nonnegative");
}

json config_to_json(const LearnConfig& cfg) {
  return json{{"max_iters", cfg.max_iters},
              {"tol", cfg.tol},
              {"penalty", {{"kind", penalty_name(cfg.penalty.kind)}, {"weight", cfg.penalty.weight}}},
              {"seed", cfg.seed},
              {"baseline_only", cfg.baseline_only},
              {"smoothness", cfg.smoothness},
              {"temporal_smoothness", cfg.temporal_smoothness},
              {"ridge", cfg.ridge}};
}

LearnConfig config_from_json(const json& doc, LearnConfig base) {
  try {
    if (!doc.is_object()) throw FormatError("learn config must be a JSON object");
    base.max_iters = doc.value("max_iters", base.max_iters);
    base.tol = doc.value("tol", base.tol);
    base.seed = doc.value("seed", base.seed);
    base.baseline_only = doc.value("baseline_only", base.baseline_only);
    base.smoothness = doc.value("smoothness", base.smoothness);
    base.temporal_smoothness = doc.value("temporal_smoothness", base.temporal_smoothness);
    base.ridge = doc.value("ridge", base.ridge);
    if (doc.contains("penalty")) {
      const json& p = doc["penalty"];
      if (p.contains("kind")) {
        const auto kind = parse_penalty(p["kind"].get<std::string>());
        if (!kind) throw FormatError("unknown penalty kind '" + p["kind"].get<std::string>() + "'");
        base.penalty.kind = *kind;
      }
      base.penalty.weight = p.value("weight", base.penalty.weight);
    }
    validate_config(base);
    return base;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed learn config: ") + e.what());
  }
}

json fit_report_to_json(const FitReport& report, bool include_timing, const json& resolved_config) {
  json doc;
  doc["model"] = model_to_json(report.model);
  doc["objective_trace"] = report.objective_trace;
  doc["converged"] = report.converged;
  doc["iterations"] = report.iterations;
  doc["wall_time_s"] = include_timing ? json(report.wall_time) : json(nullptr);
  doc["clamp_count"] = report.clamp_count;
  doc["warnings"] = report.warnings;
  doc["config"] = resolved_config;
  return doc;
}

FitReport fit_report_from_json(const json& doc) {
  try {
    FitReport r;
    r.model = model_from_json(doc.at("model"));
    r.objective_trace = doc.at("objective_trace").get<std::vector<double>>();
    r.converged = doc.at("converged").get<bool>();
    r.iterations = doc.at("iterations").get<int>();
    r.wall_time = doc.at("wall_time_s").is_null() ? 0.0 : doc.at("wall_time_s").get<double>();
    r.clamp_count = doc.value("clamp_count", 0);
    r.warnings = doc.value("warnings", std::vector<std::string>{});
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed fit report: ") + e.what());
  }
}

namespace em {

Coefficients initial(const Corpus& corpus, int components, std::uint64_t seed, bool baseline_only,
                     const std::vector<double>* weights) {
  const int d = corpus.dim;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(d);
  double time = 0.0;
  for (std::size_t n = 0; n < corpus.size(); ++n) {
    const double w = weights ? (*weights)[n] : 1.0;
    counts += w * count_marks(corpus.sequences[n]).cast<double>();
    time += w * corpus.sequences[n].length();
  }
  if (!(time > 0.0)) throw InvalidInput("corpus has zero total observation time");
  Coefficients theta;
  theta.mu = 0.5 * counts / time;
  Rng rng(seed);
  for (int m = 0; m < components; ++m) {
    Eigen::MatrixXd a(d, d);
    for (int v = 0; v < d; ++v)
      for (int u = 0; u < d; ++u) a(v, u) = baseline_only ? 0.0 : rng.uniform(0.0, 0.1 / d);
    theta.A.push_back(std::move(a));
  }
  return theta;
}

Eigen::VectorXd update_baseline(const EStepStats& stats) { return stats.baseline / stats.time; }

Eigen::MatrixXd summed_infectivity(const std::vector<Eigen::MatrixXd>& A, const KernelSpec& kernel) {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(A[0].rows(), A[0].cols());
  for (std::size_t m = 0; m < A.size(); ++m) phi += component_mass(kernel, static_cast<int>(m)) * A[m];
  return phi;
}

namespace {

using Stack = std::vector<Eigen::MatrixXd>;

// EM surrogate of the infectivity block: sum(-c log a + e a) + penalty.
struct Surrogate {
  const EStepStats& stats;
  const KernelSpec& kernel;
  const Penalty& penalty;

  double smooth(const Stack& A) const {
    double value = 0.0;
    for (std::size_t m = 0; m < A.size(); ++m) {
      for (Eigen::Index v = 0; v < A[m].rows(); ++v) {
        for (Eigen::Index u = 0; u < A[m].cols(); ++u) {
          const double c = stats.offspring[m](v, u);
          const double a = A[m](v, u);
          if (c > 0.0) {
            if (!(a > 0.0)) return std::numeric_limits<double>::infinity();
            value -= c * std::log(a);
          }
          value += stats.exposure(static_cast<Eigen::Index>(m), v) * a;
        }
      }
    }
    return value;
  }

  double total(const Stack& A) const { return smooth(A) + penalty_value(penalty, summed_infectivity(A, kernel)); }

  Stack gradient(const Stack& A) const {
    Stack g = A;
    for (std::size_t m = 0; m < A.size(); ++m) {
      for (Eigen::Index v = 0; v < A[m].rows(); ++v) {
        for (Eigen::Index u = 0; u < A[m].cols(); ++u) {
          const double c = stats.offspring[m](v, u);
          g[m](v, u) = stats.exposure(static_cast<Eigen::Index>(m), v) - (c > 0.0 ? c / A[m](v, u) : 0.0);
        }
      }
    }
    return g;
  }
};

Eigen::MatrixXd apply_prox(PenaltyKind kind, const Eigen::MatrixXd& s, double t) {
  switch (kind) {
    case PenaltyKind::GroupSparse: return prox::row_shrink(s, t);
    case PenaltyKind::LowRank: return prox::singular_value_threshold(s, t).cwiseMax(0.0);
    case PenaltyKind::Sparse: return prox::soft_threshold(s, t).cwiseMax(0.0);
    case PenaltyKind::None: return s;
  }
  return s;
}

// Projected gradient step followed by the proximal map of the penalty on the
// summed matrix; component matrices are rescaled proportionally.
Stack prox_step(const Stack& X, const Stack& grad, double t, const Penalty& penalty, const KernelSpec& kernel) {
  Stack Y(X.size());
  for (std::size_t m = 0; m < X.size(); ++m) Y[m] = (X[m] - t * grad[m]).cwiseMax(0.0);
  const Eigen::MatrixXd s = summed_infectivity(Y, kernel);
  const Eigen::MatrixXd shrunk = apply_prox(penalty.kind, s, t * penalty.weight);
  if (Y.size() == 1 && component_mass(kernel, 0) == 1.0) {
    Y[0] = shrunk;
    return Y;
  }
  const Eigen::MatrixXd ratio = (s.array() > 0.0).select(shrunk.array() / s.array(), 0.0).matrix();
  for (auto& y : Y) y = y.cwiseProduct(ratio);
  return Y;
}

double squared_distance(const Stack& a, const Stack& b) {
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) s += (a[m] - b[m]).squaredNorm();
  return s;
}

double inner(const Stack& a, const Stack& b) {
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) s += a[m].cwiseProduct(b[m]).sum();
  return s;
}

}  // namespace

std::vector<Eigen::MatrixXd> update_infectivity(const EStepStats& stats, const std::vector<Eigen::MatrixXd>& current,
                                                const Penalty& penalty, const KernelSpec& kernel) {
  const std::size_t M = current.size();
  const bool penalised = penalty.kind != PenaltyKind::None && penalty.weight > 0.0;
  if (!penalised || penalty.kind == PenaltyKind::Sparse) {
    // Closed form: the L1 term is linear on the nonnegative orthant.
    Stack next(M);
    for (std::size_t m = 0; m < M; ++m) {
      const double extra = penalised ? penalty.weight * component_mass(kernel, static_cast<int>(m)) : 0.0;
      const Eigen::ArrayXXd denom = (stats.exposure.row(static_cast<Eigen::Index>(m)).transpose().array() + extra)
                                        .replicate(1, current[m].cols());
      next[m] = (denom > 0.0).select(stats.offspring[m].array() / denom, 0.0).matrix();
    }
    return next;
  }

  const Surrogate sur{stats, kernel, penalty};
  Stack X = current;
  double fx = sur.total(X);
  double step = kInfinity;
  for (int iter = 0; iter < 200; ++iter) {
    const Stack grad = sur.gradient(X);
    const double hx = sur.smooth(X);
    if (!std::isfinite(step)) {
      // Start from the inverse curvature of the log terms.
      step = kInfinity;
      for (std::size_t m = 0; m < M; ++m)
        for (Eigen::Index k = 0; k < X[m].size(); ++k) {
          const double c = stats.offspring[m].data()[k];
          if (c > 0.0) step = std::min(step, X[m].data()[k] * X[m].data()[k] / c);
        }
      if (!std::isfinite(step)) step = 1.0;
    } else {
      step *= 2.0;
    }
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      Stack Y = prox_step(X, grad, step, penalty, kernel);
      const double hy = sur.smooth(Y);
      if (!std::isfinite(hy)) continue;
      const double bound = hx + inner(grad, Y) - inner(grad, X) + squared_distance(X, Y) / (2.0 * step);
      const double fy = hy + penalty_value(penalty, summed_infectivity(Y, kernel));
      if (hy <= bound + 1e-12 * std::abs(hx) && fy <= fx) {
        const double gain = fx - fy;
        X = std::move(Y);
        accepted = gain > 1e-13 * std::max(1.0, std::abs(fx));
        fx = fy;
        break;
      }
    }
    if (!accepted) break;
  }
  return X;
}

std::vector<Eigen::MatrixXd> prox_candidate(const EStepStats& stats, const Penalty& penalty, const KernelSpec& kernel) {
  const auto M = static_cast<Eigen::Index>(stats.offspring.size());
  const Eigen::Index d = stats.exposure.cols();
  Stack S(static_cast<std::size_t>(M));
  Eigen::VectorXd curvature = Eigen::VectorXd::Zero(d);
  for (Eigen::Index m = 0; m < M; ++m) {
    const double mass = component_mass(kernel, static_cast<int>(m));
    const Eigen::ArrayXXd denom = stats.exposure.row(m).transpose().array().replicate(1, d);
    S[m] = (denom > 0.0).select(stats.offspring[m].array() / denom, 0.0).matrix();
    if (mass > 0.0) curvature += stats.exposure.row(m).transpose() / (mass * static_cast<double>(M));
  }
  const Eigen::MatrixXd s = summed_infectivity(S, kernel);
  Eigen::MatrixXd shrunk;
  if (penalty.kind == PenaltyKind::LowRank) {
    const double mean = curvature.mean();
    shrunk = apply_prox(penalty.kind, s, mean > 0.0 ? penalty.weight / mean : 0.0);
  } else {
    // Row v of the quadratic model has curvature E_v, so the prox is row-separable.
    shrunk = s;
    for (Eigen::Index v = 0; v < d; ++v) {
      const double t = curvature[v] > 0.0 ? penalty.weight / curvature[v] : 0.0;
      shrunk.row(v) = apply_prox(penalty.kind, s.row(v), t);
    }
  }
  const Eigen::MatrixXd ratio = (s.array() > 0.0).select(shrunk.array() / s.array(), 0.0).matrix();
  for (auto& x : S) x = x.cwiseProduct(ratio);
  return S;
}

bool converged(const std::vector<double>& trace, double tol, int window) {
  if (static_cast<int>(trace.size()) < window + 1) return false;
  for (std::size_t k = trace.size() - window; k < trace.size(); ++k) {
    const double prev = trace[k - 1];
    if (!(std::abs(prev - trace[k]) / std::max(1.0, std::abs(prev)) < tol)) return false;
  }
  return true;
}

Eigen::VectorXd minimize_poisson_quadratic(const Eigen::VectorXd& c, const Eigen::VectorXd& e,
                                           const Eigen::MatrixXd& P, const Eigen::VectorXd& x0, int& clamps,
                                           bool& regularised) {
  const Eigen::Index n = c.size();
  auto objective = [&](const Eigen::VectorXd& x) {
    double value = e.dot(x) + x.dot(P * x);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (c[k] > 0.0) {
        if (!(x[k] > 0.0)) return std::numeric_limits<double>::infinity();
        value -= c[k] * std::log(x[k]);
      }
    }
    return value;
  };

  Eigen::VectorXd x = x0.cwiseMax(0.0);
  for (Eigen::Index k = 0; k < n; ++k)
    if (c[k] > 0.0 && !(x[k] > 0.0)) x[k] = c[k] / std::max(e[k], 1e-12);
  double fx = objective(x);
  if (!std::isfinite(fx)) return x;

  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd grad = e + 2.0 * P * x;
    for (Eigen::Index k = 0; k < n; ++k)
      if (c[k] > 0.0) grad[k] -= c[k] / x[k];
    std::vector<Eigen::Index> free;
    for (Eigen::Index k = 0; k < n; ++k)
      if (!(x[k] <= 0.0 && grad[k] > 0.0)) free.push_back(k);
    if (free.empty()) break;

    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd H(nf, nf);
    Eigen::VectorXd g(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      g[a] = grad[free[a]];
      for (Eigen::Index b = 0; b < nf; ++b) H(a, b) = 2.0 * P(free[a], free[b]);
      if (c[free[a]] > 0.0) H(a, a) += c[free[a]] / (x[free[a]] * x[free[a]]);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || (ldlt.vectorD().array() <= 0.0).any()) {
      const double bump = 1e-10 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
      H.diagonal().array() += bump;
      ldlt.compute(H);
      regularised = true;
    }
    const Eigen::VectorXd delta = ldlt.solve(-g);
    if (!delta.allFinite()) break;

    bool improved = false;
    int step_clamps = 0;
    for (double s = 1.0; s > 1e-14; s *= 0.5) {
      Eigen::VectorXd y = x;
      step_clamps = 0;
      bool feasible = true;
      for (Eigen::Index a = 0; a < nf; ++a) {
        const Eigen::Index k = free[a];
        y[k] = x[k] + s * delta[a];
        if (y[k] <= 0.0) {
          if (c[k] > 0.0) {
            feasible = false;
            break;
          }
          y[k] = 0.0;
          ++step_clamps;
        }
      }
      if (!feasible) continue;
      const double fy = objective(y);
      if (fy <= fx) {
        improved = fx - fy > 1e-15 * std::max(1.0, std::abs(fx));
        clamps += step_clamps;
        x = std::move(y);
        fx = fy;
        break;
      }
    }
    if (!improved) break;
  }
  return x;
}

}  // namespace em

}  // namespace hawkes
