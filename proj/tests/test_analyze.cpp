#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hawkes/analyze.hpp"
#include "hawkes/error.hpp"
#include "hawkes/learn.hpp"
#include "hawkes/simulate.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace hawkes;
using testing_support::corpus_of;
using testing_support::make_seq;

namespace {

Corpus two_populations(std::uint64_t seed, int per_group = 100, double t_end = 50.0) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Constant(1, 1, 0.3);
  const HawkesModel slow = make_exponential_model(Eigen::VectorXd::Constant(1, 0.2), A, 1.0);
  const HawkesModel fast = make_exponential_model(Eigen::VectorXd::Constant(1, 2.0), A, 1.0);
  Corpus a = simulate_exact_exp(SimConfig{slow, t_end, per_group, seed});
  Corpus b = simulate_exact_exp(SimConfig{fast, t_end, per_group, seed + 1000});
  Corpus out;
  out.dim = 1;
  for (auto& s : a.sequences) out.sequences.push_back(s);
  for (auto& s : b.sequences) out.sequences.push_back(s);
  for (std::size_t i = 0; i < out.size(); ++i) out.sequences[i].id = "q" + std::to_string(i);
  return out;
}

std::vector<int> group_labels(int per_group) {
  std::vector<int> truth(2 * per_group, 0);
  std::fill(truth.begin() + per_group, truth.end(), 1);
  return truth;
}

bool nondecreasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i - 1] - trace[i] > 1e-10 * std::max(1.0, std::abs(trace[i - 1]))) return false;
  return true;
}

}  // namespace

// --- Granger ---------------------------------------------------------------

TEST_CASE("threshold graph semantics") {
  Eigen::Matrix2d m;
  m << 0.2, 0.01, 0.0, 0.05;
  const GrangerGraph g = threshold_graph(m, 0.05);
  CHECK(g.adjacency(0, 0));
  CHECK_FALSE(g.adjacency(0, 1));
  CHECK_FALSE(g.adjacency(1, 0));
  CHECK_FALSE(g.adjacency(1, 1));  // strict inequality

  const GrangerGraph all = threshold_graph(Eigen::Matrix2d::Constant(1e-9), 0.0);
  CHECK(all.adjacency.all());
  CHECK_THROWS_AS(threshold_graph(m, -1.0), InvalidInput);
}

TEST_CASE("granger edge sets shrink as the threshold grows") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> unit(0.0, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(4, 4, [&] { return unit(gen); });
    double lo = unit(gen), hi = unit(gen);
    if (lo > hi) std::swap(lo, hi);
    const auto a = threshold_graph(m, lo).adjacency;
    const auto b = threshold_graph(m, hi).adjacency;
    for (int v = 0; v < 4; ++v)
      for (int u = 0; u < 4; ++u)
        if (b(v, u)) CHECK(a(v, u));
  }
}

TEST_CASE("granger recovers the identity pattern on diagonal truth") {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  A(0, 0) = A(1, 1) = 0.5;
  const HawkesModel truth = make_exponential_model(Eigen::Vector2d(0.5, 0.5), A, 1.0);
  LearnConfig cfg;
  cfg.penalty = {PenaltyKind::Sparse, 2.0};
  int hits = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const Corpus c = simulate_exact_exp(SimConfig{truth, 100.0, 100, static_cast<std::uint64_t>(100 + seed)});
    const GrangerResult r = granger_graph(c, ExponentialKernel{1.0}, cfg, 0.05);
    BoolMatrix expect(2, 2);
    expect << true, false, false, true;
    if (r.graph.adjacency == expect) ++hits;
    CHECK(r.graph.infectivity.isApprox(branching_matrix(r.report.model)));
  }
  MESSAGE("identity pattern in " << hits << "/20 seeds");
  CHECK(hits >= 19);
}

TEST_CASE("granger on Poisson data yields an empty graph") {
  const Corpus c = simulate_branch(SimConfig{make_poisson_model(Eigen::Vector2d(1.0, 1.0)), 100.0, 100, 5});
  LearnConfig cfg;
  cfg.penalty = {PenaltyKind::Sparse, 2.0};
  const GrangerResult r = granger_graph(c, ExponentialKernel{1.0}, cfg, 0.05);
  CHECK_FALSE(r.graph.adjacency.any());
}

TEST_CASE("granger on a discretized template goes through the ODE learner") {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  A(0, 1) = 0.5;
  const HawkesModel truth = make_exponential_model(Eigen::Vector2d(0.5, 0.5), A, 1.0);
  const Corpus c = simulate_exact_exp(SimConfig{truth, 100.0, 100, 6});
  const GrangerResult r = granger_graph(c, DiscretizedKernel{0.5, 10}, LearnConfig{}, 0.1);
  CHECK(std::holds_alternative<DiscretizedKernel>(r.report.model.kernel));
  CHECK(r.graph.adjacency(0, 1));
  CHECK_FALSE(r.graph.adjacency(1, 0));
}

TEST_CASE("granger JSON and DOT round-trip") {
  Eigen::Matrix3d m;
  m << 0.3, 0.0, 0.123456, 0.0, 0.0, 0.2, 0.01, 0.0, 0.4;
  const GrangerGraph g = threshold_graph(m, 0.05);
  const GrangerGraph back = granger_from_json(granger_to_json(g));
  CHECK(back.infectivity == g.infectivity);
  CHECK(back.adjacency == g.adjacency);
  CHECK(back.threshold == g.threshold);

  const std::string dot = granger_to_dot(g, {"a", "b c", "d\"e"});
  const auto edges = parse_granger_dot(dot);
  REQUIRE(edges.size() == 4);
  CHECK(edges[0] == DotEdge{"a", "a", 0.3});
  CHECK(edges[1].from == "a");
  CHECK(edges[1].to == "d\"e");
  CHECK(edges[1].weight == doctest::Approx(0.123).epsilon(1e-12));
  CHECK(edges[2] == DotEdge{"b c", "d\"e", 0.2});
  CHECK(edges[3] == DotEdge{"d\"e", "d\"e", 0.4});

  const auto numbered = parse_granger_dot(granger_to_dot(g));
  CHECK(numbered.size() == 4);
  CHECK_THROWS_AS(granger_from_json(nlohmann::json{{"threshold", 1}}), FormatError);
}

// --- distance --------------------------------------------------------------

TEST_CASE("sequence distance worked values") {
  const EventSequence empty = make_seq({}, 10.0);
  const EventSequence a = make_seq({{1.0, 0}}, 10.0);
  const EventSequence b = make_seq({{3.0, 0}}, 10.0);
  DistanceParams p{1.0, 1.0, 5.0};
  CHECK(sequence_distance(a, b, p) == doctest::Approx(2.0));
  CHECK(sequence_distance(a, a, p) == 0.0);
  const EventSequence three = make_seq({{1.0, 0}, {2.0, 0}, {4.0, 0}}, 10.0);
  CHECK(sequence_distance(empty, three, p) == doctest::Approx(15.0));
  CHECK(sequence_distance(three, empty, p) == doctest::Approx(15.0));
  // Far apart: two indels beat one long match.
  const EventSequence far = make_seq({{9.5, 0}}, 10.0);
  CHECK(sequence_distance(a, far, DistanceParams{1.0, 1.0, 1.0}) == doctest::Approx(2.0));
  // Mark mismatch is charged on top of the shift.
  const EventSequence other_mark = make_seq({{1.5, 1}}, 10.0, 2);
  const EventSequence a2 = make_seq({{1.0, 0}}, 10.0, 2);
  CHECK(sequence_distance(a2, other_mark, DistanceParams{1.0, 0.7, 5.0}) == doctest::Approx(1.2));
  CHECK_THROWS_AS(sequence_distance(a, a2), InvalidInput);
}

TEST_CASE("sequence distance matches exhaustive alignment") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> cost(0.1, 3.0);
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = testing_support::random_seq(gen, 2, static_cast<int>(gen() % 6), 5.0);
    const auto b = testing_support::random_seq(gen, 2, static_cast<int>(gen() % 6), 5.0);
    const DistanceParams p{cost(gen), cost(gen), cost(gen)};
    const double expect = oracle::alignment(a.events, 0, b.events, 0, p.time_cost, p.mark_mismatch_cost, p.indel_cost);
    const double got = sequence_distance(a, b, p);
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));
    CHECK(got == sequence_distance(b, a, p));
  }
}

TEST_CASE("sequence distance is translation covariant and nonnegative") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = testing_support::random_seq(gen, 3, 12, 10.0);
    auto b = testing_support::random_seq(gen, 3, 9, 10.0);
    const double d0 = sequence_distance(a, b);
    CHECK(d0 >= 0.0);
    for (auto* s : {&a, &b}) {
      for (auto& e : s->events) e.time += 7.25;
      s->t_start += 7.25;
      s->t_end += 7.25;
    }
    CHECK(sequence_distance(a, b) == doctest::Approx(d0).epsilon(1e-12));
  }
}

TEST_CASE("distance matrix structure") {
  std::mt19937_64 gen(4);
  std::vector<EventSequence> seqs;
  for (int i = 0; i < 7; ++i) seqs.push_back(testing_support::random_seq(gen, 2, 5 + i, 10.0));
  const Corpus c = corpus_of(seqs, 2);
  const Eigen::MatrixXd d = distance_matrix(c);
  CHECK(d.rows() == 7);
  CHECK(d == d.transpose());
  CHECK(d.diagonal().isZero(0.0));
  CHECK((d.array() >= 0.0).all());
  CHECK(d(2, 5) == sequence_distance(c.sequences[2], c.sequences[5]));

  // Permuting the corpus permutes the matrix.
  std::vector<int> perm(7);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  Corpus shuffled = c;
  for (int i = 0; i < 7; ++i) shuffled.sequences[i] = c.sequences[perm[i]];
  const Eigen::MatrixXd ds = distance_matrix(shuffled);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) CHECK(ds(i, j) == d(perm[i], perm[j]));

  const Corpus one = corpus_of({seqs[0]}, 2);
  CHECK(distance_matrix(one) == Eigen::MatrixXd::Zero(1, 1));
}

TEST_CASE("distance CSV round-trip") {
  Eigen::Matrix3d d;
  d << 0.0, 1.5, 0.1, 1.5, 0.0, 1e-17, 0.1, 1e-17, 0.0;
  const std::vector<std::string> ids{"a", "b,c", "d"};
  const DistanceTable t = parse_distance_csv(distance_csv(d, ids));
  CHECK(t.ids == ids);
  CHECK(t.distances == d);
  CHECK_THROWS(parse_distance_csv("id,a\nb,0\n"));
}

// --- k-medoids -------------------------------------------------------------

TEST_CASE("k-medoids splits duplicated groups perfectly") {
  const EventSequence x = make_seq({{1.0, 0}, {2.0, 0}}, 10.0);
  const EventSequence y = make_seq({{5.0, 0}, {6.0, 0}, {7.0, 0}, {8.0, 0}, {9.0, 0}}, 10.0);
  const Corpus c = corpus_of({x, y, x, y, x, y}, 1);
  const ClusterResult r = cluster_distance(c, 2, {}, 11);
  CHECK(clustering_purity(r.assignments, {0, 1, 0, 1, 0, 1}) == 1.0);
  CHECK(r.objective_trace.back() == 0.0);
  CHECK(r.medoids.size() == 2);
  CHECK(r.models.empty());
  for (int n = 0; n < 6; ++n) CHECK(r.responsibilities.row(n).sum() == 1.0);
}

TEST_CASE("k-medoids with K = N gives singletons at zero cost") {
  std::mt19937_64 gen(5);
  std::vector<EventSequence> seqs;
  for (int i = 0; i < 5; ++i) seqs.push_back(testing_support::random_seq(gen, 1, 4 + i, 10.0));
  const Corpus c = corpus_of(seqs, 1);
  const ClusterResult r = cluster_distance(c, 5, {}, 3);
  std::vector<int> sorted = r.assignments;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(r.objective_trace.back() == 0.0);
  CHECK_THROWS_AS(cluster_distance(c, 6), InvalidInput);
  CHECK_THROWS_AS(cluster_distance(c, 0), InvalidInput);
}

TEST_CASE("k-medoids partition ignores sequence ids") {
  const Corpus c = two_populations(7, 20, 30.0);
  Corpus renamed = c;
  for (std::size_t i = 0; i < renamed.size(); ++i) renamed.sequences[i].id = "zz" + std::to_string(1000 - i);
  const ClusterResult a = cluster_distance(c, 2, {}, 4);
  const ClusterResult b = cluster_distance(renamed, 2, {}, 4);
  CHECK(clustering_purity(a.assignments, b.assignments) == 1.0);
}

TEST_CASE("k-medoids separates the two rate populations") {
  const Corpus c = two_populations(8, 50);
  const ClusterResult r = cluster_distance(c, 2, {}, 1);
  const double purity = clustering_purity(r.assignments, group_labels(50));
  MESSAGE("distance purity " << purity);
  CHECK(purity >= 0.9);
}

TEST_CASE("purity uses the best label matching") {
  CHECK(clustering_purity({1, 1, 0, 0}, {0, 0, 1, 1}) == 1.0);
  CHECK(clustering_purity({0, 0, 0, 1}, {0, 0, 1, 1}) == 0.75);
  CHECK(clustering_purity({2, 0, 1}, {0, 1, 2}) == 1.0);
  CHECK_THROWS_AS(clustering_purity({0}, {0, 1}), InvalidInput);
}

// --- mixture ---------------------------------------------------------------

TEST_CASE("single-cluster mixture is the plain MLE") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Constant(1, 1, 0.4);
  const Corpus c =
      simulate_exact_exp(SimConfig{make_exponential_model(Eigen::VectorXd::Constant(1, 0.5), A, 1.0), 50.0, 40, 9});
  LearnConfig cfg;
  cfg.tol = 1e-10;
  cfg.max_iters = 2000;
  const ClusterResult r = cluster_mixture(c, 1, ExponentialKernel{1.0}, cfg);
  const FitReport f = fit_mle(c, ExponentialKernel{1.0}, cfg);
  CHECK((r.responsibilities.array() == 1.0).all());
  CHECK(r.mixing[0] == doctest::Approx(1.0));
  CHECK(r.models[0].mu[0] == doctest::Approx(f.model.mu[0]).epsilon(1e-4));
  CHECK(r.models[0].A[0](0, 0) == doctest::Approx(f.model.A[0](0, 0)).epsilon(1e-4));
}

TEST_CASE("mixture separates the two rate populations") {
  const Corpus c = two_populations(10, 50);
  const ClusterResult r = cluster_mixture(c, 2, ExponentialKernel{1.0}, LearnConfig{});
  const double purity = clustering_purity(r.assignments, group_labels(50));
  MESSAGE("mixture purity " << purity);
  CHECK(purity >= 0.95);
  CHECK(nondecreasing(r.objective_trace));
  CHECK(r.mixing.sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (Eigen::Index n = 0; n < r.responsibilities.rows(); ++n) {
    CHECK(std::abs(r.responsibilities.row(n).sum() - 1.0) <= 1e-9);
    Eigen::Index best;
    r.responsibilities.row(n).maxCoeff(&best);
    CHECK(r.assignments[n] == best);
  }
}

TEST_CASE("duplicated sequences get identical responsibilities") {
  const Corpus base = two_populations(12, 15, 40.0);
  Corpus doubled = base;
  for (const auto& s : base.sequences) {
    doubled.sequences.push_back(s);
    doubled.sequences.back().id += "_dup";
  }
  const ClusterResult r = cluster_mixture(doubled, 2, ExponentialKernel{1.0}, LearnConfig{});
  const auto n = static_cast<Eigen::Index>(base.size());
  for (Eigen::Index i = 0; i < n; ++i) CHECK(r.responsibilities.row(i) == r.responsibilities.row(i + n));
}

TEST_CASE("mixture trace is nondecreasing on random data") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 5; ++trial) {
    const HawkesModel m = testing_support::random_model(gen, 2, 0);
    const Corpus c = simulate_exact_exp(SimConfig{m, 30.0, 20, gen()});
    LearnConfig cfg;
    cfg.seed = gen();
    const ClusterResult r = cluster_mixture(c, 3, ExponentialKernel{1.0}, cfg);
    CHECK(nondecreasing(r.objective_trace));
  }
}

TEST_CASE("mixture input checks") {
  const Corpus c = two_populations(14, 2, 10.0);
  CHECK_THROWS_AS(cluster_mixture(c, 0, ExponentialKernel{1.0}, LearnConfig{}), InvalidInput);
  CHECK_THROWS_AS(cluster_mixture(c, 5, ExponentialKernel{1.0}, LearnConfig{}), InvalidInput);
}

TEST_CASE("cluster JSON lists one entry per sequence") {
  const Corpus c = two_populations(15, 5, 20.0);
  const ClusterResult r = cluster_distance(c, 2, {}, 0);
  std::vector<std::string> ids;
  for (const auto& s : c.sequences) ids.push_back(s.id);
  const nlohmann::json doc = cluster_to_json(r, ids);
  CHECK(doc.at("K") == 2);
  CHECK(doc.at("assignments").size() == 10);
}

// --- TVHP ------------------------------------------------------------------

TEST_CASE("TVHP interpolation and validation") {
  TvhpModel m{Eigen::VectorXd::Constant(1, 0.5), {0.0, 10.0, 20.0},
              {Eigen::MatrixXd::Constant(1, 1, 0.2), Eigen::MatrixXd::Constant(1, 1, 0.6),
               Eigen::MatrixXd::Constant(1, 1, 0.4)},
              1.0};
  CHECK(m.infectivity_at(5.0)(0, 0) == doctest::Approx(0.4));
  CHECK(m.infectivity_at(15.0)(0, 0) == doctest::Approx(0.5));
  CHECK(m.infectivity_at(-1.0)(0, 0) == 0.2);
  validate_tvhp(m);
  TvhpModel bad = m;
  bad.grid = {0.0, 10.0, 10.0};
  CHECK_THROWS_AS(validate_tvhp(bad), InvalidInput);
  bad = m;
  bad.nodes[1](0, 0) = -0.1;
  CHECK_THROWS_AS(validate_tvhp(bad), InvalidInput);
}

TEST_CASE("TVHP likelihood with constant nodes equals the stationary likelihood") {
  std::mt19937_64 gen(16);
  Eigen::Matrix2d A;
  A << 0.3, 0.1, 0.0, 0.2;
  const HawkesModel stat = make_exponential_model(Eigen::Vector2d(0.4, 0.3), A, 1.5);
  const TvhpModel tv{stat.mu, {0.0, 5.0, 20.0}, {A, A, A}, 1.5};
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = testing_support::random_seq(gen, 2, 30, 20.0);
    CHECK(tvhp_log_likelihood(tv, s) == doctest::Approx(log_likelihood(stat, s)).epsilon(1e-12));
  }
}

TEST_CASE("TVHP with infinite smoothness ties nodes to the stationary fit") {
  Eigen::Matrix2d A;
  A << 0.4, 0.1, 0.2, 0.3;
  const HawkesModel truth = make_exponential_model(Eigen::Vector2d(0.3, 0.6), A, 1.0);
  const Corpus c = simulate_exact_exp(SimConfig{truth, 50.0, 40, 17});
  LearnConfig cfg;
  cfg.temporal_smoothness = std::numeric_limits<double>::infinity();
  cfg.tol = 1e-12;
  cfg.max_iters = 3000;
  const FitReport stat = fit_mle(c, ExponentialKernel{1.0}, cfg);

  SUBCASE("G = 2 nests the stationary model") {
    const TvhpFit tv = fit_tvhp(c, {0.0, 50.0}, 1.0, cfg);
    CHECK(tv.model.nodes[0] == tv.model.nodes[1]);
    double ll_tv = 0.0, ll_stat = 0.0;
    for (const auto& s : c.sequences) {
      ll_tv += tvhp_log_likelihood(tv.model, s);
      ll_stat += log_likelihood(stat.model, s);
    }
    CHECK(std::abs(ll_tv - ll_stat) / std::abs(ll_stat) < 1e-6);
  }
  SUBCASE("G = 6 nodes all equal the stationary estimate") {
    const TvhpFit tv = fit_tvhp(c, uniform_grid(0.0, 50.0, 6), 1.0, cfg);
    for (const auto& node : tv.model.nodes) {
      CHECK(node == tv.model.nodes[0]);
      CHECK((node - stat.model.A[0]).cwiseAbs().maxCoeff() < 1e-3);
    }
    CHECK((tv.model.mu - stat.model.mu).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("TVHP trace is nonincreasing for finite smoothness") {
  TvhpModel ramp{Eigen::VectorXd::Constant(1, 0.5), {0.0, 100.0},
                 {Eigen::MatrixXd::Constant(1, 1, 0.2), Eigen::MatrixXd::Constant(1, 1, 0.8)}, 1.0};
  const Corpus c = simulate_tvhp(ramp, 100.0, 30, 18);
  for (double beta : {0.0, 1.0, 100.0}) {
    LearnConfig cfg;
    cfg.temporal_smoothness = beta;
    const TvhpFit fit = fit_tvhp(c, uniform_grid(0.0, 100.0, 5), 1.0, cfg);
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
      CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-10 * std::abs(fit.objective_trace[i - 1]));
  }
}

TEST_CASE("TVHP recovers a ramp") {
  TvhpModel ramp{Eigen::VectorXd::Constant(1, 0.5), {0.0, 100.0},
                 {Eigen::MatrixXd::Constant(1, 1, 0.2), Eigen::MatrixXd::Constant(1, 1, 0.8)}, 1.0};
  const Corpus c = simulate_tvhp(ramp, 100.0, 200, 19);
  LearnConfig cfg;
  cfg.temporal_smoothness = 10.0;
  const TvhpFit fit = fit_tvhp(c, uniform_grid(0.0, 100.0, 5), 1.0, cfg);
  for (std::size_t g = 1; g < fit.model.nodes.size(); ++g)
    CHECK(fit.model.nodes[g](0, 0) > fit.model.nodes[g - 1](0, 0));
  CHECK(std::abs(fit.model.nodes.front()(0, 0) - 0.2) < 0.15);
  CHECK(std::abs(fit.model.nodes.back()(0, 0) - 0.8) < 0.15);
}

TEST_CASE("TVHP rejects events outside the grid and names the sequence") {
  Corpus c = corpus_of({make_seq({{1.0, 0}}, 10.0, 1, 0.0, "inside"), make_seq({{11.0, 0}}, 12.0, 1, 0.0, "late")},
                       1);
  try {
    fit_tvhp(c, {0.0, 10.0}, 1.0, LearnConfig{});
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("late") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_tvhp(c, {0.0}, 1.0, LearnConfig{}), InvalidInput);
}

TEST_CASE("TVHP JSON and CSV exports") {
  TvhpModel m{Eigen::Vector2d(0.5, 0.25), {0.0, 3.5, 10.0},
              {Eigen::Matrix2d::Constant(0.1), Eigen::Matrix2d::Constant(0.2), Eigen::Matrix2d::Identity() * 0.3},
              2.0};
  const TvhpModel back = tvhp_from_json(tvhp_to_json(m));
  CHECK(back.mu == m.mu);
  CHECK(back.grid == m.grid);
  CHECK(back.decay == m.decay);
  for (std::size_t g = 0; g < 3; ++g) CHECK(back.nodes[g] == m.nodes[g]);

  const std::string csv = tvhp_long_csv(m);
  CHECK(csv.rfind("s,v,u,a\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 4);
  CHECK_THROWS_AS(tvhp_from_json(nlohmann::json{{"dim", 1}}), FormatError);
}

TEST_CASE("TVHP simulator is deterministic and respects the window") {
  TvhpModel m{Eigen::VectorXd::Constant(1, 0.5), {0.0, 20.0},
              {Eigen::MatrixXd::Constant(1, 1, 0.2), Eigen::MatrixXd::Constant(1, 1, 0.6)}, 1.0};
  const Corpus a = simulate_tvhp(m, 20.0, 10, 20);
  const Corpus b = simulate_tvhp(m, 20.0, 10, 20);
  CHECK(a.sequences == b.sequences);
  for (const auto& s : a.sequences) {
    validate_sequence(s);
    for (const auto& e : s.events) CHECK(e.time <= 20.0);
  }
  CHECK_THROWS_AS(simulate_tvhp(m, 20.0, 10, 1, 3), EventCapExceeded);
}
