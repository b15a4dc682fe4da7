// Runs the ten acceptance checks and prints one PASS/FAIL line for each.
// Exit status is nonzero when any check fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "hawkes/analyze.hpp"
#include "hawkes/cli.hpp"
#include "hawkes/data.hpp"
#include "hawkes/evaluate.hpp"
#include "hawkes/io.hpp"
#include "hawkes/learn.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/simulate.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace hawkes;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

HawkesModel two_dim_model() {
  Eigen::Matrix2d A;
  A << 0.4, 0.1, 0.2, 0.3;
  return make_exponential_model(Eigen::Vector2d(0.3, 0.6), A, 1.0);
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

// --- 1 ---------------------------------------------------------------------

Outcome simulator_agreement() {
  const HawkesModel m = two_dim_model();
  const std::vector<SimMethod> methods{SimMethod::Branch, SimMethod::Ogata, SimMethod::ExactExponential};
  const int runs = 200;
  // per method: mean and variance of counts for dim 0, dim 1, total
  std::vector<std::array<double, 3>> mean(3), var(3);
  for (std::size_t k = 0; k < methods.size(); ++k) {
    const Corpus c = simulate(SimConfig{m, 500.0, runs, derive_seed(1, k)}, methods[k]);
    std::vector<std::array<double, 3>> counts;
    for (const auto& s : c.sequences) {
      const Eigen::VectorXi n = count_marks(s);
      counts.push_back({double(n[0]), double(n[1]), double(n.sum())});
    }
    for (int j = 0; j < 3; ++j) {
      double s1 = 0.0, s2 = 0.0;
      for (const auto& x : counts) s1 += x[j];
      mean[k][j] = s1 / runs;
      for (const auto& x : counts) s2 += (x[j] - mean[k][j]) * (x[j] - mean[k][j]);
      var[k][j] = s2 / (runs - 1);
    }
  }
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      for (int j = 0; j < 3; ++j) {
        const double se = std::sqrt(var[a][j] / runs + var[b][j] / runs);
        worst = std::max(worst, std::abs(mean[a][j] - mean[b][j]) / se);
      }
  return {worst < 3.0, "max pairwise gap " + fmt(worst) + " combined SE; mean totals " + fmt(mean[0][2]) + "/" +
                           fmt(mean[1][2]) + "/" + fmt(mean[2][2])};
}

// --- 2 ---------------------------------------------------------------------

Outcome rescaling_closure() {
  const HawkesModel m = two_dim_model();
  const std::vector<SimMethod> methods{SimMethod::Branch, SimMethod::Ogata, SimMethod::ExactExponential};
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    const Corpus c = simulate(SimConfig{m, 500.0, 100, derive_seed(2, k)}, methods[k]);
    int accepted = 0;
    for (const auto& s : c.sequences) {
      const RescalingResult r = rescaling_test(m, s);
      if (r.ks_statistic < ks_critical_95(r.n_transformed)) ++accepted;
    }
    ok = ok && accepted >= 95;
    detail += std::string(detail.empty() ? "" : ", ") + method_name(methods[k]) + " " + std::to_string(accepted) +
              "/100";
  }
  return {ok, detail};
}

// --- 3 ---------------------------------------------------------------------

Outcome mle_recovery() {
  const HawkesModel truth =
      make_exponential_model(Eigen::VectorXd::Constant(1, 0.5), Eigen::MatrixXd::Constant(1, 1, 0.5), 1.0);
  const Corpus c = simulate_exact_exp(SimConfig{truth, 100.0, 200, 3});
  const EstimationError e = estimation_error(fit_mle(c, ExponentialKernel{1.0}, LearnConfig{}).model, truth);
  const bool recovered = e.mu_relerr < 0.05 && e.kernel_relerr < 0.05;

  std::vector<double> sizes, errors;
  for (int seed = 0; seed < 10; ++seed) {
    const Corpus big = simulate_exact_exp(SimConfig{truth, 100.0, 640, derive_seed(30, seed)});
    for (int n : {10, 40, 160, 640}) {
      Corpus part;
      part.dim = 1;
      part.sequences.assign(big.sequences.begin(), big.sequences.begin() + n);
      const EstimationError err = estimation_error(fit_mle(part, ExponentialKernel{1.0}, LearnConfig{}).model, truth);
      sizes.push_back(n);
      errors.push_back(0.5 * (err.mu_relerr + err.kernel_relerr));
    }
  }
  const double rho = oracle::spearman(sizes, errors);
  return {recovered && rho < -0.8,
          "mu_relerr " + fmt(e.mu_relerr) + ", kernel_relerr " + fmt(e.kernel_relerr) + ", spearman " + fmt(rho)};
}

// --- 4 ---------------------------------------------------------------------

bool monotone(const std::vector<double>& trace, double sign) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (sign * (trace[i] - trace[i - 1]) > 1e-10 * std::max(1.0, std::abs(trace[i - 1]))) return false;
  return true;
}

Outcome monotonicity() {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> weight(0.5, 20.0);
  int violations = 0, fits = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + trial % 3;
    const int kind = trial % 2;  // exponential or Gaussian basis
    const HawkesModel m = testing_support::random_model(gen, dim, kind);
    const Corpus c = simulate_branch(SimConfig{m, 40.0, 15, gen()});
    KernelSpec tmpl = m.kernel;
    for (PenaltyKind p : {PenaltyKind::None, PenaltyKind::Sparse, PenaltyKind::GroupSparse, PenaltyKind::LowRank}) {
      LearnConfig cfg;
      cfg.seed = gen();
      cfg.penalty = {p, p == PenaltyKind::None ? 0.0 : weight(gen)};
      ++fits;
      if (!monotone(fit_mle(c, tmpl, cfg).objective_trace, 1.0)) ++violations;
    }
    LearnConfig cfg;
    cfg.seed = gen();
    cfg.max_iters = 50;
    ++fits;
    if (!monotone(cluster_mixture(c, 2, tmpl, cfg).objective_trace, -1.0)) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(fits) + " fits"};
}

// --- 5 ---------------------------------------------------------------------

double direct_nll(const HawkesModel& m, const Corpus& c) {
  double v = 0.0;
  for (const auto& s : c.sequences) v -= log_likelihood(m, s);
  return v;
}

Outcome gradient_validation() {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    const int d = 1 + point % 3;
    HawkesModel m;
    m.mu = Eigen::VectorXd::NullaryExpr(d, [&] { return 0.2 + unit(gen); });
    m.kernel = ExponentialKernel{0.5 + 2.0 * unit(gen)};
    m.A = {Eigen::MatrixXd::NullaryExpr(d, d, [&] { return 0.05 + 0.4 * unit(gen) / d; })};
    std::vector<EventSequence> seqs;
    for (int s = 0; s < 3; ++s) seqs.push_back(testing_support::random_seq(gen, d, 40, 30.0));
    const Corpus c = testing_support::corpus_of(seqs, d);
    const NllGradient g = nll_gradient(m, c);

    std::vector<double> analytic, numeric;
    auto probe = [&](double& x, double gx) {
      const double h = 1e-5 * std::max(1.0, std::abs(x));
      const double keep = x;
      x = keep + h;
      const double up = direct_nll(m, c);
      x = keep - h;
      const double down = direct_nll(m, c);
      x = keep;
      analytic.push_back(gx);
      numeric.push_back((up - down) / (2.0 * h));
    };
    for (int u = 0; u < d; ++u) probe(m.mu[u], g.mu[u]);
    for (int v = 0; v < d; ++v)
      for (int u = 0; u < d; ++u) probe(m.A[0](v, u), g.A[0](v, u));
    double diff = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
      diff += (analytic[k] - numeric[k]) * (analytic[k] - numeric[k]);
      ref += numeric[k] * numeric[k];
    }
    worst = std::max(worst, std::sqrt(diff / std::max(ref, 1e-300)));
  }

  const Corpus data = simulate_exact_exp(SimConfig{two_dim_model(), 100.0, 50, 55});
  LearnConfig cfg;
  cfg.tol = 0.0;  // no early stop: the objective stalls at rounding level before the parameters do
  cfg.max_iters = 5000;
  const FitReport fit = fit_mle(data, ExponentialKernel{1.0}, cfg);
  const NllGradient g = nll_gradient(fit.model, data);
  double norm_sq = g.mu.squaredNorm();
  for (Eigen::Index k = 0; k < g.A[0].size(); ++k) {
    const double r = std::min(fit.model.A[0].data()[k], g.A[0].data()[k]);
    norm_sq += r * r;
  }
  const double norm = std::sqrt(norm_sq);
  return {worst < 1e-5 && norm < 1e-4,
          "max relative FD mismatch " + fmt(worst) + ", gradient norm at EM fixed point " + fmt(norm) + " after " +
              std::to_string(fit.iterations) + " iterations"};
}

// --- 6 ---------------------------------------------------------------------

Outcome granger_recovery() {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  A(0, 0) = A(0, 1) = A(1, 2) = A(2, 2) = 0.3;
  const HawkesModel truth = make_exponential_model(Eigen::Vector3d(0.3, 0.4, 0.5), A, 1.0);
  const BoolMatrix expect = (A.array() > 0.0).matrix();
  LearnConfig cfg;
  cfg.penalty = {PenaltyKind::Sparse, 2.0};
  int hits = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const Corpus c = simulate_exact_exp(SimConfig{truth, 100.0, 400, derive_seed(6, seed)});
    if (granger_graph(c, ExponentialKernel{1.0}, cfg, 0.05).graph.adjacency == expect) ++hits;
  }
  return {hits >= 18, "exact edge set in " + std::to_string(hits) + "/20 seeds"};
}

// --- 7 ---------------------------------------------------------------------

Outcome clustering() {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Constant(1, 1, 0.3);
  Corpus c = simulate_exact_exp(
      SimConfig{make_exponential_model(Eigen::VectorXd::Constant(1, 0.2), A, 1.0), 50.0, 100, 71});
  const Corpus fast = simulate_exact_exp(
      SimConfig{make_exponential_model(Eigen::VectorXd::Constant(1, 2.0), A, 1.0), 50.0, 100, 72});
  for (auto s : fast.sequences) {
    s.id += "_b";
    c.sequences.push_back(s);
  }
  std::vector<int> truth(200, 0);
  std::fill(truth.begin() + 100, truth.end(), 1);
  const double mix = clustering_purity(cluster_mixture(c, 2, ExponentialKernel{1.0}, LearnConfig{}).assignments, truth);
  const double dist = clustering_purity(cluster_distance(c, 2, {}, 7).assignments, truth);
  return {mix >= 0.9 && dist >= 0.9, "mixture purity " + fmt(mix) + ", distance purity " + fmt(dist)};
}

// --- 8 ---------------------------------------------------------------------

double variation(const TvhpModel& m) {
  double s = 0.0;
  for (const auto& node : m.nodes) s = std::max(s, (node - m.nodes.front()).norm());
  return s;
}

// Shifts every sequence circularly by an independent uniform offset.
Corpus circular_shift(const Corpus& c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Corpus out = c;
  for (auto& s : out.sequences) {
    const double len = s.length();
    const double offset = std::uniform_real_distribution<double>(0.0, len)(gen);
    for (auto& e : s.events) {
      double t = e.time - s.t_start + offset;
      if (t >= len) t -= len;
      e.time = s.t_start + std::clamp(t, 0.0, std::nextafter(len, 0.0));
    }
    std::stable_sort(s.events.begin(), s.events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  }
  return out;
}

Outcome tvhp() {
  const double T = 100.0;
  LearnConfig cfg;
  cfg.temporal_smoothness = 10.0;
  const auto grid = uniform_grid(0.0, T, 5);

  const TvhpModel ramp{Eigen::VectorXd::Constant(1, 0.5), {0.0, T},
                       {Eigen::MatrixXd::Constant(1, 1, 0.2), Eigen::MatrixXd::Constant(1, 1, 0.8)}, 1.0};
  const TvhpFit fit = fit_tvhp(simulate_tvhp(ramp, T, 200, 81), grid, 1.0, cfg);
  bool increasing = true;
  for (std::size_t g = 1; g < fit.model.nodes.size(); ++g)
    increasing = increasing && fit.model.nodes[g](0, 0) > fit.model.nodes[g - 1](0, 0);
  const double lo = std::abs(fit.model.nodes.front()(0, 0) - 0.2);
  const double hi = std::abs(fit.model.nodes.back()(0, 0) - 0.8);

  const TvhpModel flat{Eigen::VectorXd::Constant(1, 0.5), {0.0, T},
                       {Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::MatrixXd::Constant(1, 1, 0.5)}, 1.0};
  const Corpus data = simulate_tvhp(flat, T, 100, 82);
  const double observed = variation(fit_tvhp(data, grid, 1.0, cfg).model);
  std::vector<double> null;
  for (int r = 0; r < 40; ++r) null.push_back(variation(fit_tvhp(circular_shift(data, derive_seed(83, r)), grid, 1.0, cfg).model));
  std::sort(null.begin(), null.end());
  const double pos = 0.95 * (null.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  const double q95 = null[i] + (pos - i) * (null[std::min(i + 1, null.size() - 1)] - null[i]);

  return {increasing && lo < 0.15 && hi < 0.15 && observed < q95,
          std::string("ramp ") + (increasing ? "monotone" : "NOT monotone") + ", endpoint errors " + fmt(lo) + "/" +
              fmt(hi) + "; stationary variation " + fmt(observed) + " vs null q95 " + fmt(q95)};
}

// --- 9 ---------------------------------------------------------------------

Outcome ls_learner() {
  const HawkesModel truth = two_dim_model();
  const Corpus c = simulate_exact_exp(SimConfig{truth, 100.0, 500, 9});
  const Eigen::MatrixXd ls = branching_matrix(fit_ls(c, 0.25, 20, 1e-3, LearnConfig{}).model);
  const Eigen::MatrixXd mle = branching_matrix(fit_mle(c, ExponentialKernel{1.0}, LearnConfig{}).model);
  const double to_truth = (ls - branching_matrix(truth)).norm();
  const double to_mle = (ls - mle).norm();
  return {to_truth < 0.1 && to_mle < 0.1, "||LS - truth||_F " + fmt(to_truth) + ", ||LS - MLE||_F " + fmt(to_mle)};
}

// --- 10 --------------------------------------------------------------------

int quiet_run(const std::vector<std::string>& args) {
  std::ostringstream sink;
  auto* err = std::cerr.rdbuf(sink.rdbuf());
  auto* out = std::cout.rdbuf(sink.rdbuf());
  const int code = cli::run(args);
  std::cerr.rdbuf(err);
  std::cout.rdbuf(out);
  return code;
}

std::string join_csv(const io::CsvTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + io::csv_field(cells[k]);
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

Outcome determinism_and_formats() {
  testing_support::TempDir dir("acceptance");
  std::vector<std::string> problems;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };

  // Demo twice with the same seed.
  expect(quiet_run({"demo", "--out", dir.file("a"), "--seed", "7"}) == 0, "demo run a");
  expect(quiet_run({"demo", "--out", dir.file("b"), "--seed", "7"}) == 0, "demo run b");
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir.file("a"))) {
    const std::string name = entry.path().filename().string();
    expect(fs::exists(dir.file("b") + "/" + name) &&
               io::read_file(entry.path().string()) == io::read_file(dir.file("b") + "/" + name),
           "demo file differs: " + name);
    ++files;
  }
  std::size_t files_b = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir.file("b"))) ++files_b;
  expect(files == files_b && files == 9, "demo tree has " + std::to_string(files) + " files");

  // Demo outputs parse under their formats.
  const auto manifest = nlohmann::json::parse(io::read_file(dir.file("a") + "/manifest.json"));
  expect(manifest.at("panels").size() == 8, "manifest panel count");
  for (const auto& [panel, info] : manifest.at("panels").items()) {
    const std::string path = dir.file("a") + "/" + info.at("file").get<std::string>();
    const std::string text = io::read_file(path);
    if (path.ends_with(".csv")) {
      const io::CsvTable t = io::parse_csv(text);
      bool rect = !t.rows.empty();
      for (const auto& r : t.rows) rect = rect && r.size() == t.header.size();
      expect(rect, "panel " + panel + " CSV shape");
      expect(join_csv(t) == text, "panel " + panel + " CSV round-trip");
    } else if (path.ends_with(".dot")) {
      const auto edges = parse_granger_dot(text);
      expect(!edges.empty(), "panel " + panel + " DOT edges");
    } else {
      const auto doc = nlohmann::json::parse(text);
      expect(doc.dump() == nlohmann::json::parse(doc.dump()).dump(), "panel " + panel + " JSON");
    }
  }

  // Loader round-trips through the library formats.
  const HawkesModel model = two_dim_model();
  const Corpus corpus = simulate_exact_exp(SimConfig{model, 20.0, 4, 10});
  save_corpus(corpus, dir.file("c.json"));
  save_model(model, dir.file("m.json"));
  expect(load_corpus(dir.file("c.json")) == corpus, "corpus JSON");
  expect(load_model(dir.file("m.json")) == model, "model JSON");
  const GrangerGraph g = granger_from_model(model, 0.15);
  expect(granger_to_json(granger_from_json(granger_to_json(g))) == granger_to_json(g), "granger JSON");
  const std::string dot = granger_to_dot(g);
  expect(parse_granger_dot(dot).size() == static_cast<std::size_t>(g.adjacency.count()), "granger DOT");
  const Eigen::MatrixXd dm = distance_matrix(corpus);
  std::vector<std::string> ids;
  for (const auto& s : corpus.sequences) ids.push_back(s.id);
  expect(parse_distance_csv(distance_csv(dm, ids)).distances == dm, "distance CSV");
  const TvhpModel tv{model.mu, {0.0, 10.0, 20.0}, {model.A[0], model.A[0] * 0.5, model.A[0]}, 1.0};
  expect(tvhp_to_json(tvhp_from_json(tvhp_to_json(tv))) == tvhp_to_json(tv), "TVHP JSON");
  const FitReport fr = fit_mle(corpus, ExponentialKernel{1.0}, LearnConfig{});
  expect(fit_report_to_json(fit_report_from_json(fit_report_to_json(fr, false)), false) == fit_report_to_json(fr, false),
         "fit report JSON");

  // Exit-code contract.
  io::write_file_atomic(dir.file("bad.json"), "{oops");
  io::write_file_atomic(dir.file("short.csv"), "seq_id,time,mark,t_start,t_end\ns,0.1,0,0,0.2\n");
  // One event in the last bin: every lag regressor is zero.
  io::write_file_atomic(dir.file("flat.csv"), "seq_id,time,mark,t_start,t_end\ns,0.95,0,0,1\n");
  const std::string out = dir.file("out.json");
  const std::vector<std::pair<std::vector<std::string>, int>> matrix{
      {{}, 2},
      {{"nonsense"}, 2},
      {{"simulate", "--model", dir.file("m.json"), "--t-end", "10"}, 2},
      {{"simulate", "--model", dir.file("m.json"), "--method", "magic", "--t-end", "10", "--out", out}, 2},
      {{"simulate", "--model", dir.file("m.json"), "--t-end", "-1", "--out", out}, 2},
      {{"simulate", "--model", dir.file("missing.json"), "--t-end", "10", "--out", out}, 2},
      {{"simulate", "--model", dir.file("bad.json"), "--t-end", "10", "--out", out}, 2},
      {{"fit", "--data", dir.file("c.json"), "--learner", "svm", "--out", out}, 2},
      {{"fit", "--data", dir.file("c.json"), "--learner", "mle", "--kernel", "grid", "--out", out}, 2},
      {{"fit", "--data", dir.file("c.json"), "--penalty", "sparse", "--weight", "-3", "--out", out}, 2},
      {{"fit", "--data", dir.file("short.csv"), "--learner", "ls", "--kernel", "grid", "--lag", "0.1", "--points",
        "3", "--out", out},
       2},
      {{"cluster", "--data", dir.file("c.json"), "--k", "99", "--out", out}, 2},
      {{"tvhp", "--data", dir.file("c.json"), "--nodes", "1", "--out", out}, 2},
      {{"eval", "--data", dir.file("c.json"), "--out", out}, 2},
      {{"--threads", "abc", "demo", "--out", dir.file("x")}, 2},
      {{"simulate", "--model", dir.file("m.json"), "--t-end", "1000", "--max-events", "3", "--out", out}, 3},
      {{"fit", "--data", dir.file("flat.csv"), "--learner", "ls", "--kernel", "grid", "--lag", "0.1", "--points",
        "5", "--ridge", "0", "--out", out},
       3},
      {{"--help"}, 0},
  };
  int bad_codes = 0;
  for (const auto& [args, code] : matrix) {
    const int got = quiet_run(args);
    if (got != code) {
      ++bad_codes;
      std::string line;
      for (const auto& a : args) line += a + " ";
      problems.push_back("exit " + std::to_string(got) + " (want " + std::to_string(code) + ") for: " + line);
    }
  }
  expect(!fs::exists(out), "failed invocations left an output file");

  std::string detail = "9 demo files identical, loaders round-trip, " +
                       std::to_string(matrix.size() - bad_codes) + "/" + std::to_string(matrix.size()) +
                       " exit codes";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria{
      {1, "simulator cross-agreement", 120, simulator_agreement},
      {2, "goodness-of-fit closure", 180, rescaling_closure},
      {3, "MLE recovery and consistency trend", 300, mle_recovery},
      {4, "EM / proximal-EM monotonicity", 180, monotonicity},
      {5, "gradient validation", 60, gradient_validation},
      {6, "Granger recovery", 300, granger_recovery},
      {7, "clustering purity", 240, clustering},
      {8, "TVHP ramp and stationarity", 300, tvhp},
      {9, "LS learner", 120, ls_learner},
      {10, "determinism and formats", 360, determinism_and_formats},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs < c.budget_s;
    const bool pass = o.pass && in_budget;
    if (!pass) ++failed;
    std::printf("criterion %2d %s: %s (%s; %.1fs of %.0fs budget%s)\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.budget_s, in_budget ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
