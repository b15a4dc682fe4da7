#include <filesystem>
#include <sstream>

#include "hawkes/analyze.hpp"
#include "hawkes/cli.hpp"
#include "hawkes/error.hpp"
#include "hawkes/evaluate.hpp"
#include "hawkes/io.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/simulate.hpp"

namespace hawkes::cli {

using nlohmann::json;

namespace {

HawkesModel demo_truth() {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
  A(0, 0) = 0.3;
  A(0, 1) = 0.3;
  A(1, 2) = 0.3;
  A(2, 2) = 0.3;
  return make_exponential_model(Eigen::Vector3d(0.3, 0.4, 0.5), A, 1.0);
}

Corpus take_first(const Corpus& corpus, std::size_t n) {
  Corpus out = corpus;
  out.sequences.resize(std::min(n, corpus.size()));
  return out;
}

}  // namespace

std::vector<std::string> run_demo(const DemoOptions& options) {
  namespace fs = std::filesystem;
  if (options.out_dir.empty()) throw InvalidInput("demo needs an output directory");
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) throw IoError("cannot create " + options.out_dir + ": " + ec.message());
  const fs::path dir(options.out_dir);
  const std::uint64_t seed = options.seed;
  auto sub = [&](std::uint64_t stream) { return derive_seed(seed, stream); };
  auto put = [&](const std::string& name, const std::string& text) {
    io::write_file_atomic((dir / name).string(), text);
  };

  const HawkesModel truth = demo_truth();
  json panels = json::object();

  // (a) intensity of one simulated path.
  {
    const Corpus path = simulate_ogata(SimConfig{truth, 30.0, 1, sub(1), 1'000'000});
    put("a_intensity.csv", intensity_grid_csv(truth, path, 0.1));
    panels["a"] = {{"file", "a_intensity.csv"}, {"columns", "seq_id,t,u,lambda"}};
  }

  // (b) simulator benchmark.
  {
    BenchmarkGrid grid{truth, {50.0, 100.0, 200.0}, 5, sub(2), 1'000'000};
    put("b_benchmark.csv", benchmark_csv(benchmark_simulators(grid), options.record_timing));
    panels["b"] = {{"file", "b_benchmark.csv"}, {"columns", "method,t_end,seed,wall_time_s,event_count"}};
  }

  const Corpus train = simulate_branch(SimConfig{truth, 100.0, 100, sub(3), 1'000'000});
  const Corpus test = simulate_branch(SimConfig{truth, 100.0, 40, sub(4), 1'000'000});

  LearnConfig cfg;
  cfg.seed = sub(5);
  std::vector<LearnerSpec> specs{
      {"mle", LearnerKind::Mle, ExponentialKernel{1.0}, 0.25, 24, cfg},
      {"mle-ode", LearnerKind::MleOde, ExponentialKernel{1.0}, 0.25, 24, cfg},
      {"ls", LearnerKind::Ls, ExponentialKernel{1.0}, 0.25, 23, cfg},
  };

  // (c) learned kernels against the truth, (e) comparison table.
  {
    const auto rows = compare_learners(train, test, specs, truth);
    std::ostringstream out;
    out << "learner,v,u,t,phi_hat,phi_true\n";
    for (const auto& row : rows) {
      if (!row.model) continue;
      for (int v = 0; v < truth.dim(); ++v)
        for (int u = 0; u < truth.dim(); ++u)
          for (int k = 0; k < 60; ++k) {
            const double t = 0.05 + 0.1 * k;
            out << row.name << ',' << v << ',' << u << ',' << io::format_double(t) << ','
                << io::format_double(kernel_value(*row.model, v, u, t)) << ','
                << io::format_double(kernel_value(truth, v, u, t)) << '\n';
          }
    }
    put("c_kernels.csv", out.str());
    panels["c"] = {{"file", "c_kernels.csv"}, {"columns", "learner,v,u,t,phi_hat,phi_true"}};
    put("e_comparison.csv", comparison_csv(rows, options.record_timing));
    panels["e"] = {{"file", "e_comparison.csv"},
                   {"columns", "name,per_event_ll,mu_relerr,kernel_relerr,wall_time_s,iterations,error"}};
  }

  // (d) estimation error against corpus size.
  {
    std::ostringstream out;
    out << "n_sequences,mu_relerr,kernel_relerr\n";
    for (std::size_t n : {10, 20, 40, 80}) {
      const FitReport rep = fit_mle(take_first(train, n), ExponentialKernel{1.0}, cfg);
      const EstimationError err = estimation_error(rep.model, truth);
      out << n << ',' << io::format_double(err.mu_relerr) << ',' << io::format_double(err.kernel_relerr) << '\n';
    }
    put("d_error_vs_size.csv", out.str());
    panels["d"] = {{"file", "d_error_vs_size.csv"}, {"columns", "n_sequences,mu_relerr,kernel_relerr"}};
  }

  // (f) Granger graph.
  {
    LearnConfig sparse = cfg;
    sparse.penalty = {PenaltyKind::Sparse, 2.0};
    const GrangerResult res = granger_graph(train, ExponentialKernel{1.0}, sparse, 0.05);
    put("f_granger.dot", granger_to_dot(res.graph, train.labels));
    panels["f"] = {{"file", "f_granger.dot"}, {"format", "dot"}};
  }

  // (g) time-varying infectivity, ramp 0.2 -> 0.8.
  {
    const double horizon = 50.0;
    TvhpModel ramp{Eigen::VectorXd::Constant(1, 0.5), {0.0, horizon},
                   {Eigen::MatrixXd::Constant(1, 1, 0.2), Eigen::MatrixXd::Constant(1, 1, 0.8)}, 1.0};
    const Corpus data = simulate_tvhp(ramp, horizon, 200, sub(6));
    LearnConfig tcfg = cfg;
    tcfg.temporal_smoothness = 10.0;
    const TvhpFit fit = fit_tvhp(data, uniform_grid(0.0, horizon, 5), 1.0, tcfg);
    put("g_tvhp.csv", tvhp_long_csv(fit.model));
    panels["g"] = {{"file", "g_tvhp.csv"}, {"columns", "s,v,u,a"}};
  }

  // (h) two populations: distances and both clusterings.
  {
    const HawkesModel slow = make_exponential_model(Eigen::VectorXd::Constant(1, 0.2),
                                                    Eigen::MatrixXd::Constant(1, 1, 0.3), 1.0);
    const HawkesModel fast = make_exponential_model(Eigen::VectorXd::Constant(1, 2.0),
                                                    Eigen::MatrixXd::Constant(1, 1, 0.3), 1.0);
    Corpus mixed = simulate_branch(SimConfig{slow, 20.0, 30, sub(7), 1'000'000});
    const Corpus other = simulate_branch(SimConfig{fast, 20.0, 30, sub(8), 1'000'000});
    std::vector<int> labels(mixed.size(), 0);
    for (auto seq : other.sequences) {
      seq.id = "seq" + std::to_string(mixed.size());
      mixed.sequences.push_back(std::move(seq));
      labels.push_back(1);
    }
    std::vector<std::string> ids;
    for (const auto& s : mixed.sequences) ids.push_back(s.id);
    const Eigen::MatrixXd dist = distance_matrix(mixed);
    json matrix = json::array();
    for (Eigen::Index i = 0; i < dist.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < dist.cols(); ++j) row.push_back(dist(i, j));
      matrix.push_back(std::move(row));
    }
    const ClusterResult medoids = cluster_distance(mixed, 2, {}, sub(9));
    const ClusterResult mixture = cluster_mixture(mixed, 2, ExponentialKernel{1.0}, cfg);
    json doc{{"ids", ids},
             {"true_labels", labels},
             {"distances", std::move(matrix)},
             {"distance_clustering", cluster_to_json(medoids, ids)},
             {"mixture_clustering", cluster_to_json(mixture, ids)},
             {"purity", {{"distance", clustering_purity(medoids.assignments, labels)},
                         {"mixture", clustering_purity(mixture.assignments, labels)}}}};
    put("h_clusters.json", doc.dump(2) + "\n");
    panels["h"] = {{"file", "h_clusters.json"}, {"format", "json"}};
  }

  const json manifest{{"seed", seed}, {"panels", panels}};
  put("manifest.json", manifest.dump(2) + "\n");
  std::vector<std::string> files;
  for (const auto& [panel, entry] : panels.items()) files.push_back(entry["file"].get<std::string>());
  return files;
}

}  // namespace hawkes::cli
