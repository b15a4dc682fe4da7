#include "hawkes/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "hawkes/analyze.hpp"
#include "hawkes/error.hpp"
#include "hawkes/evaluate.hpp"
#include "hawkes/io.hpp"
#include "hawkes/learn.hpp"
#include "hawkes/log.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/simulate.hpp"

namespace hawkes::cli {

using nlohmann::json;

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_json(const std::string& path, const json& doc) { io::write_file_atomic(path, doc.dump(2) + "\n"); }

json read_json(const std::string& path) {
  const std::string text = io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

double parse_real(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput(flag + ": '" + text + "' is not a number");
  }
}

// Kernel flags shared by fit, granger and cluster.
struct KernelFlags {
  std::string kind = "exp";
  double decay = 1.0;
  std::vector<double> centers{0.5, 1.5, 3.0};
  double bandwidth = 1.0;
  double support = 10.0;
  double lag = 0.1;
  int points = 20;

  void attach(CLI::App* app) {
    app->add_option("--kernel", kind, "Kernel family")->check(CLI::IsMember({"exp", "basis", "grid"}))
        ->capture_default_str();
    app->add_option("--decay", decay, "Exponential decay rate")->capture_default_str();
    app->add_option("--centers", centers, "Gaussian basis centers, comma separated")->delimiter(',');
    app->add_option("--bandwidth", bandwidth, "Gaussian basis bandwidth")->capture_default_str();
    app->add_option("--support", support, "Gaussian basis truncation")->capture_default_str();
    app->add_option("--lag", lag, "Step width of the grid kernel")->capture_default_str();
    app->add_option("--points", points, "Number of grid kernel steps")->capture_default_str();
  }

  KernelSpec spec() const {
    KernelSpec k;
    if (kind == "exp") k = ExponentialKernel{decay};
    else if (kind == "basis") k = GaussianBasisKernel{centers, bandwidth, support};
    else k = DiscretizedKernel{lag, points};
    validate_kernel(k);
    return k;
  }

  // Values from a config file fill in whatever was not given on the command line.
  void merge(const json& doc, const CLI::App* app) {
    if (!doc.contains("kernel")) return;
    const json& k = doc["kernel"];
    auto take = [&](const char* flag, const char* key, auto& field) {
      if (app->count(flag) == 0 && k.contains(key)) field = k[key].get<std::decay_t<decltype(field)>>();
    };
    if (app->count("--kernel") == 0 && k.contains("type")) {
      const std::string t = k["type"].get<std::string>();
      kind = t == "exponential" ? "exp" : t == "discretized" ? "grid" : t;
      if (kind != "exp" && kind != "basis" && kind != "grid") throw FormatError("unknown kernel type '" + t + "'");
    }
    take("--decay", "decay", decay);
    take("--centers", "centers", centers);
    take("--bandwidth", "bandwidth", bandwidth);
    take("--support", "support", support);
    take("--lag", "lag", lag);
    take("--points", "points", points);
  }
};

// Learning flags; a --config JSON fills the gaps, then built-in defaults.
struct LearnFlags {
  std::string config_path;
  std::string penalty = "none";
  double weight = 0.0;
  std::uint64_t seed = 0;
  int max_iters = 200;
  double tol = 1e-6;
  double smoothness = 10.0;
  std::string temporal = "1";
  double ridge = 0.0;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file; command-line flags take precedence");
    app->add_option("--penalty", penalty, "Structural penalty")
        ->check(CLI::IsMember({"none", "sparse", "group", "lowrank"}))
        ->capture_default_str();
    app->add_option("--weight", weight, "Penalty weight")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--max-iters", max_iters, "Iteration cap")->capture_default_str();
    app->add_option("--tol", tol, "Relative objective tolerance")->capture_default_str();
    app->add_option("--smoothness", smoothness, "Curvature weight for the grid-kernel learner")
        ->capture_default_str();
    app->add_option("--beta", temporal, "Temporal smoothness for tvhp (inf ties all nodes)")->capture_default_str();
    app->add_option("--ridge", ridge, "Ridge weight for least squares")->capture_default_str();
  }

  json file_doc() const { return config_path.empty() ? json::object() : read_json(config_path); }

  LearnConfig resolve(const CLI::App* app, const json& file) const {
    LearnConfig cfg = file.empty() ? LearnConfig{} : config_from_json(file);
    if (app->count("--penalty")) cfg.penalty.kind = *parse_penalty(penalty);
    if (app->count("--weight")) cfg.penalty.weight = weight;
    if (app->count("--seed")) cfg.seed = seed;
    if (app->count("--max-iters")) cfg.max_iters = max_iters;
    if (app->count("--tol")) cfg.tol = tol;
    if (app->count("--smoothness")) cfg.smoothness = smoothness;
    if (app->count("--beta")) cfg.temporal_smoothness = parse_real(temporal, "--beta");
    if (app->count("--ridge")) cfg.ridge = ridge;
    validate_config(cfg);
    return cfg;
  }
};

void report_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) warn(w);
}

// ---------------------------------------------------------------------------

struct Globals {
  int threads = 0;
  bool record_timing = false;
};

struct SimulateCmd {
  std::string model_path, method = "branch", out, intensity_out;
  double t_end = 0.0;
  int n = 1;
  std::uint64_t seed = 0;
  std::size_t max_events = 1'000'000;
  double grid_step = 0.0;

  void attach(CLI::App* app) {
    app->add_option("--model", model_path, "Model JSON")->required();
    app->add_option("--method", method, "Simulator")
        ->check(CLI::IsMember({"branch", "ogata", "exact-exp"}))
        ->capture_default_str();
    app->add_option("--t-end", t_end, "Observation horizon")->required();
    app->add_option("--n", n, "Number of sequences")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--max-events", max_events, "Per-sequence event cap")->capture_default_str();
    app->add_option("--out", out, "Output corpus JSON")->required();
    app->add_option("--intensity-grid", grid_step, "Also sample intensities every STEP time units");
    app->add_option("--intensity-out", intensity_out, "Intensity CSV path (default: OUT.intensity.csv)");
  }

  int run() const {
    const HawkesModel model = load_model(model_path);
    if (!(grid_step >= 0.0)) throw InvalidInput("--intensity-grid must be positive");
    SimConfig cfg{model, t_end, n, seed, max_events};
    const Corpus corpus = simulate(cfg, *parse_method(method));
    save_corpus(corpus, out);
    if (grid_step > 0.0)
      io::write_file_atomic(intensity_out.empty() ? out + ".intensity.csv" : intensity_out,
                            intensity_grid_csv(model, corpus, grid_step));
    return kExitOk;
  }
};

struct FitCmd {
  std::string data, learner = "mle", out, report;
  KernelFlags kernel;
  LearnFlags learn;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "Corpus JSON or event CSV")->required();
    app->add_option("--learner", learner, "Learner")->check(CLI::IsMember({"mle", "mle-ode", "ls"}))
        ->capture_default_str();
    kernel.attach(app);
    learn.attach(app);
    app->add_option("--out", out, "Fitted model JSON")->required();
    app->add_option("--report", report, "Fit report JSON");
  }

  int run(const CLI::App* app, const Globals& g) {
    const json file = learn.file_doc();
    kernel.merge(file, app);
    if (app->count("--learner") == 0 && file.contains("learner")) learner = file["learner"].get<std::string>();
    const LearnConfig cfg = learn.resolve(app, file);
    const KernelSpec k = kernel.spec();
    const Corpus corpus = load_input_corpus(data);

    FitReport rep;
    if (learner == "mle") {
      rep = fit_mle(corpus, k, cfg);
    } else if (learner == "mle-ode" || learner == "ls") {
      if (!is_discretized(k))
        throw InvalidInput("learner " + learner + " estimates a step kernel; use --kernel grid with --lag and --points");
      const auto& grid = std::get<DiscretizedKernel>(k);
      if (learner == "mle-ode") {
        rep = fit_mle_ode(corpus, grid.lag, grid.points, cfg);
      } else {
        if (grid.points < 2) throw InvalidInput("ls needs --points >= 2");
        rep = fit_ls(corpus, grid.lag, grid.points - 1, cfg.ridge, cfg);
      }
    } else {
      throw InvalidInput("unknown learner '" + learner + "' (valid: mle, mle-ode, ls)");
    }
    report_warnings(rep.warnings);
    save_model(rep.model, out);
    if (!report.empty()) {
      json resolved{{"learner", learner}, {"kernel", kernel_to_json(k)}, {"learn", config_to_json(cfg)}};
      write_json(report, fit_report_to_json(rep, g.record_timing, resolved));
    }
    return kExitOk;
  }
};

struct GrangerCmd {
  std::string data, out_json, out_dot, report;
  double threshold = kDefaultGrangerThreshold;
  KernelFlags kernel;
  LearnFlags learn;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "Corpus JSON or event CSV")->required();
    kernel.attach(app);
    learn.attach(app);
    app->add_option("--threshold", threshold, "Edge threshold on the infectivity")->capture_default_str();
    app->add_option("--out", out_json, "Graph JSON");
    app->add_option("--dot", out_dot, "Graph DOT");
    app->add_option("--report", report, "Fit report JSON");
  }

  int run(const CLI::App* app, const Globals& g) {
    if (out_json.empty() && out_dot.empty()) throw InvalidInput("granger needs --out and/or --dot");
    const json file = learn.file_doc();
    kernel.merge(file, app);
    const LearnConfig cfg = learn.resolve(app, file);
    const KernelSpec k = kernel.spec();
    const Corpus corpus = load_input_corpus(data);
    const GrangerResult res = granger_graph(corpus, k, cfg, threshold);
    report_warnings(res.report.warnings);
    if (!out_json.empty()) write_json(out_json, granger_to_json(res.graph));
    if (!out_dot.empty()) io::write_file_atomic(out_dot, granger_to_dot(res.graph, corpus.labels));
    if (!report.empty()) {
      json resolved{{"kernel", kernel_to_json(k)}, {"learn", config_to_json(cfg)}, {"threshold", threshold}};
      write_json(report, fit_report_to_json(res.report, g.record_timing, resolved));
    }
    return kExitOk;
  }
};

DistanceParams make_distance_params(double time_cost, double mismatch, double indel) {
  return DistanceParams{time_cost, mismatch, indel};
}

double mixture_heldout(const ClusterResult& fit, const Corpus& test) {
  double total = 0.0;
  for (const auto& seq : test.sequences) {
    Eigen::VectorXd joint(fit.K);
    for (int k = 0; k < fit.K; ++k) joint[k] = std::log(fit.mixing[k]) + log_likelihood(fit.models[k], seq);
    const double peak = joint.maxCoeff();
    total += std::isfinite(peak) ? peak + std::log((joint.array() - peak).exp().sum()) : peak;
  }
  return total;
}

struct ClusterCmd {
  std::string data, method = "mixture", out;
  std::vector<int> ks{2};
  double time_cost = 1.0, mismatch = 1.0, indel = 1.0;
  KernelFlags kernel;
  LearnFlags learn;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "Corpus JSON or event CSV")->required();
    app->add_option("--method", method, "Clustering route")->check(CLI::IsMember({"mixture", "distance"}))
        ->capture_default_str();
    app->add_option("--k", ks, "Cluster count; several values select K by held-out likelihood (mixture)")
        ->delimiter(',');
    kernel.attach(app);
    learn.attach(app);
    app->add_option("--time-cost", time_cost, "Distance: cost per unit time shift")->capture_default_str();
    app->add_option("--mismatch-cost", mismatch, "Distance: cost of matching different marks")
        ->capture_default_str();
    app->add_option("--indel-cost", indel, "Distance: cost of an unmatched event")->capture_default_str();
    app->add_option("--out", out, "Cluster result JSON")->required();
  }

  int run(const CLI::App* app, const Globals&) {
    const Corpus corpus = load_input_corpus(data);
    std::vector<std::string> ids;
    for (const auto& s : corpus.sequences) ids.push_back(s.id);
    if (ks.empty()) throw InvalidInput("--k needs at least one value");
    json doc;
    if (method == "distance") {
      if (ks.size() != 1) throw InvalidInput("distance clustering takes a single --k");
      const json file = learn.file_doc();
      const LearnConfig cfg = learn.resolve(app, file);
      const ClusterResult res =
          cluster_distance(corpus, ks[0], make_distance_params(time_cost, mismatch, indel), cfg.seed);
      doc = cluster_to_json(res, ids);
      doc["method"] = "distance";
      doc["config"] = {{"k", ks[0]}, {"seed", cfg.seed}, {"time_cost", time_cost},
                       {"mismatch_cost", mismatch}, {"indel_cost", indel}};
    } else {
      const json file = learn.file_doc();
      kernel.merge(file, app);
      const LearnConfig cfg = learn.resolve(app, file);
      const KernelSpec k = kernel.spec();
      int chosen = ks[0];
      json selection = json::array();
      if (ks.size() > 1) {
        const auto [train, test] = split_train_test(corpus, 0.8, cfg.seed);
        double best = -std::numeric_limits<double>::infinity();
        for (int K : ks) {
          const ClusterResult fit = cluster_mixture(train, K, k, cfg);
          const double ll = mixture_heldout(fit, test);
          selection.push_back({{"k", K}, {"heldout_loglik", ll}});
          if (ll > best) {
            best = ll;
            chosen = K;
          }
        }
      }
      const ClusterResult res = cluster_mixture(corpus, chosen, k, cfg);
      report_warnings(res.warnings);
      doc = cluster_to_json(res, ids);
      doc["method"] = "mixture";
      doc["k_selection"] = selection;
      doc["config"] = {{"k", ks}, {"kernel", kernel_to_json(k)}, {"learn", config_to_json(cfg)}};
    }
    write_json(out, doc);
    return kExitOk;
  }
};

struct DistanceCmd {
  std::string data, out;
  double time_cost = 1.0, mismatch = 1.0, indel = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "Corpus JSON or event CSV")->required();
    app->add_option("--time-cost", time_cost, "Cost per unit time shift")->capture_default_str();
    app->add_option("--mismatch-cost", mismatch, "Cost of matching different marks")->capture_default_str();
    app->add_option("--indel-cost", indel, "Cost of an unmatched event")->capture_default_str();
    app->add_option("--out", out, "Distance matrix CSV")->required();
  }

  int run() const {
    const Corpus corpus = load_input_corpus(data);
    std::vector<std::string> ids;
    for (const auto& s : corpus.sequences) ids.push_back(s.id);
    io::write_file_atomic(out, distance_csv(distance_matrix(corpus, {time_cost, mismatch, indel}), ids));
    return kExitOk;
  }
};

std::vector<double> corpus_grid(const Corpus& corpus, int nodes) {
  if (corpus.empty()) throw InvalidInput("cannot build a grid for an empty corpus");
  double lo = corpus.sequences[0].t_start, hi = corpus.sequences[0].t_end;
  for (const auto& s : corpus.sequences) {
    lo = std::min(lo, s.t_start);
    hi = std::max(hi, s.t_end);
  }
  return uniform_grid(lo, hi, nodes);
}

struct TvhpCmd {
  std::string data, out, csv;
  int nodes = 5;
  double decay = 1.0;
  LearnFlags learn;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "Corpus JSON or event CSV")->required();
    app->add_option("--nodes", nodes, "Grid nodes spanning the observation windows")->capture_default_str();
    app->add_option("--decay", decay, "Exponential decay rate")->capture_default_str();
    learn.attach(app);
    app->add_option("--out", out, "TVHP model JSON")->required();
    app->add_option("--csv", csv, "Long-form s,v,u,a CSV");
  }

  int run(const CLI::App* app, const Globals& g) {
    const json file = learn.file_doc();
    const LearnConfig cfg = learn.resolve(app, file);
    const Corpus corpus = load_input_corpus(data);
    const TvhpFit fit = fit_tvhp(corpus, corpus_grid(corpus, nodes), decay, cfg);
    report_warnings(fit.warnings);
    json doc = tvhp_to_json(fit.model);
    doc["objective_trace"] = fit.objective_trace;
    doc["converged"] = fit.converged;
    doc["iterations"] = fit.iterations;
    doc["clamp_count"] = fit.clamp_count;
    doc["warnings"] = fit.warnings;
    doc["wall_time_s"] = g.record_timing ? json(fit.wall_time) : json(nullptr);
    doc["config"] = {{"nodes", nodes}, {"decay", decay}, {"learn", config_to_json(cfg)}};
    write_json(out, doc);
    if (!csv.empty()) io::write_file_atomic(csv, tvhp_long_csv(fit.model));
    return kExitOk;
  }
};

std::vector<LearnerSpec> default_specs(const KernelFlags& kernel) {
  LearnerSpec mle{"mle", LearnerKind::Mle, ExponentialKernel{kernel.decay}, kernel.lag, kernel.points, {}};
  LearnerSpec ode{"mle-ode", LearnerKind::MleOde, ExponentialKernel{kernel.decay}, kernel.lag, kernel.points, {}};
  LearnerSpec ls{"ls", LearnerKind::Ls, ExponentialKernel{kernel.decay}, kernel.lag, kernel.points - 1, {}};
  return {mle, ode, ls};
}

struct EvalCmd {
  std::string data, model_path, train, specs_path, truth_path, out;
  KernelFlags kernel;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "Held-out corpus JSON or event CSV")->required();
    app->add_option("--model", model_path, "Score this model (held-out likelihood and rescaling test)");
    app->add_option("--train", train, "Training corpus for learner comparison");
    app->add_option("--specs", specs_path, "JSON list of learner specs (default: mle, mle-ode, ls)");
    app->add_option("--truth", truth_path, "Ground-truth model for estimation errors");
    app->add_option("--decay", kernel.decay, "Default specs: exponential decay")->capture_default_str();
    app->add_option("--lag", kernel.lag, "Default specs: grid step width")->capture_default_str();
    app->add_option("--points", kernel.points, "Default specs: grid steps")->capture_default_str();
    app->add_option("--out", out, "Output JSON (--model) or comparison CSV")->required();
  }

  int run(const Globals& g) const {
    const Corpus test = load_input_corpus(data);
    if (!model_path.empty()) {
      if (!train.empty() || !specs_path.empty()) throw InvalidInput("--model cannot be combined with --train/--specs");
      const HawkesModel model = load_model(model_path);
      const HeldoutLoglik ll = heldout_loglik(model, test);
      json seqs = json::array();
      for (std::size_t i = 0; i < test.size(); ++i) {
        json row{{"id", test.sequences[i].id}, {"loglik", ll.per_sequence[i]}};
        if (!test.sequences[i].empty()) {
          const RescalingResult r = rescaling_test(model, test.sequences[i]);
          row["ks_statistic"] = r.ks_statistic;
          row["n_transformed"] = r.n_transformed;
          row["ks_pass"] = r.ks_statistic < ks_critical_95(r.n_transformed);
        }
        seqs.push_back(std::move(row));
      }
      write_json(out, json{{"total", ll.total},
                           {"per_event", ll.per_event_defined ? json(ll.per_event) : json(nullptr)},
                           {"per_event_defined", ll.per_event_defined},
                           {"sequences", std::move(seqs)}});
      return kExitOk;
    }
    if (train.empty()) throw InvalidInput("eval needs --model, or --train for a learner comparison");
    std::vector<LearnerSpec> specs;
    if (specs_path.empty()) {
      specs = default_specs(kernel);
    } else {
      const json doc = read_json(specs_path);
      if (!doc.is_array()) throw SchemaError("--specs must hold a JSON array");
      for (const auto& s : doc) specs.push_back(learner_spec_from_json(s));
    }
    std::optional<HawkesModel> truth;
    if (!truth_path.empty()) truth = load_model(truth_path);
    const auto rows = compare_learners(load_input_corpus(train), test, specs, truth);
    io::write_file_atomic(out, comparison_csv(rows, g.record_timing));
    return kExitOk;
  }
};

struct BenchmarkCmd {
  std::string model_path, out;
  std::vector<double> horizons{50, 100, 200};
  int n = 5;
  std::uint64_t seed = 0;
  std::size_t max_events = 1'000'000;

  void attach(CLI::App* app) {
    app->add_option("--model", model_path, "Model JSON")->required();
    app->add_option("--horizons", horizons, "Horizons, comma separated")->delimiter(',');
    app->add_option("--n", n, "Sequences per cell")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--max-events", max_events, "Per-sequence event cap")->capture_default_str();
    app->add_option("--out", out, "Benchmark CSV")->required();
  }

  int run(const Globals& g) const {
    BenchmarkGrid grid{load_model(model_path), horizons, n, seed, max_events};
    io::write_file_atomic(out, benchmark_csv(benchmark_simulators(grid), g.record_timing));
    return kExitOk;
  }
};

}  // namespace

Corpus load_input_corpus(const std::string& path) {
  if (ends_with(path, ".csv")) {
    CsvLoadResult res = load_csv(path);
    report_warnings(res.warnings);
    return std::move(res.corpus);
  }
  return load_corpus(path);
}

std::string intensity_grid_csv(const HawkesModel& model, const Corpus& corpus, double step) {
  if (!(step > 0.0)) throw InvalidInput("intensity grid step must be positive");
  if (!corpus.empty() && corpus.dim != model.dim()) throw InvalidInput("intensity grid: dimension mismatch");
  std::ostringstream out;
  out << "seq_id,t,u,lambda\n";
  for (const auto& seq : corpus.sequences) {
    const auto count = static_cast<std::size_t>(std::floor(seq.length() / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
      const double t = seq.t_start + static_cast<double>(k) * step;
      const Eigen::VectorXd lam = intensities(model, seq, t);
      for (int u = 0; u < model.dim(); ++u)
        out << io::csv_field(seq.id) << ',' << io::format_double(t) << ',' << u << ','
            << io::format_double(lam[u]) << '\n';
    }
  }
  return out.str();
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Multivariate Hawkes process toolkit: simulate, fit, analyze and evaluate event sequences.\n"
               "Exit codes: 0 success, 2 usage or validation error, 3 runtime error.",
               "hawkes"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (default: HAWKES_THREADS or 1)");
  app.add_flag("--record-timing", g.record_timing, "Write wall-clock timings into reports (breaks byte equality)");

  SimulateCmd sim;
  FitCmd fit;
  GrangerCmd granger;
  ClusterCmd cluster;
  DistanceCmd distance;
  TvhpCmd tvhp;
  EvalCmd eval;
  BenchmarkCmd bench;
  DemoOptions demo;

  auto* c_sim = app.add_subcommand("simulate", "Simulate a corpus from a model");
  sim.attach(c_sim);
  auto* c_fit = app.add_subcommand("fit", "Fit a model to a corpus");
  fit.attach(c_fit);
  auto* c_granger = app.add_subcommand("granger", "Granger causality graph from a penalised fit");
  granger.attach(c_granger);
  auto* c_cluster = app.add_subcommand("cluster", "Cluster sequences (mixture model or distance k-medoids)");
  cluster.attach(c_cluster);
  auto* c_dist = app.add_subcommand("distance", "Pairwise sequence distance matrix");
  distance.attach(c_dist);
  auto* c_tvhp = app.add_subcommand("tvhp", "Fit a time-varying Hawkes process");
  tvhp.attach(c_tvhp);
  auto* c_eval = app.add_subcommand("eval", "Held-out likelihood, rescaling test, learner comparison");
  eval.attach(c_eval);
  auto* c_bench = app.add_subcommand("benchmark", "Simulator timing and event counts over horizons");
  bench.attach(c_bench);
  auto* c_demo = app.add_subcommand("demo", "Run the full pipeline and write plot data for panels a-h");
  c_demo->add_option("--out", demo.out_dir, "Output directory")->required();
  c_demo->add_option("--seed", demo.seed, "Random seed")->capture_default_str();
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (g.threads < 0) throw InvalidInput("--threads must be nonnegative");
    if (g.threads > 0) set_thread_count(static_cast<std::size_t>(g.threads));
    if (c_sim->parsed()) return sim.run();
    if (c_fit->parsed()) return fit.run(c_fit, g);
    if (c_granger->parsed()) return granger.run(c_granger, g);
    if (c_cluster->parsed()) return cluster.run(c_cluster, g);
    if (c_dist->parsed()) return distance.run();
    if (c_tvhp->parsed()) return tvhp.run(c_tvhp, g);
    if (c_eval->parsed()) return eval.run(g);
    if (c_bench->parsed()) return bench.run(g);
    if (c_demo->parsed()) {
      demo.record_timing = g.record_timing;
      run_demo(demo);
      return kExitOk;
    }
    return kExitUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace hawkes::cli
