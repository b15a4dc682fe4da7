#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>

#include "hawkes/core.hpp"
#include "hawkes/data.hpp"

namespace testing_support {

inline hawkes::EventSequence make_seq(std::vector<hawkes::Event> events, double t_end, int dim = 1,
                                      double t_start = 0.0, std::string id = "s") {
  hawkes::EventSequence s;
  s.events = std::move(events);
  s.t_start = t_start;
  s.t_end = t_end;
  s.dim = dim;
  s.id = std::move(id);
  return s;
}

inline hawkes::EventSequence random_seq(std::mt19937_64& gen, int dim, int n, double t_end) {
  std::uniform_real_distribution<double> time(0.0, t_end);
  std::uniform_int_distribution<int> mark(0, dim - 1);
  std::vector<hawkes::Event> ev;
  for (int i = 0; i < n; ++i) ev.push_back({time(gen), mark(gen)});
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  return make_seq(ev, t_end, dim);
}

// kind: 0 exponential, 1 Gaussian basis, 2 discretized.
inline hawkes::HawkesModel random_model(std::mt19937_64& gen, int dim, int kind) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  hawkes::HawkesModel m;
  m.mu = Eigen::VectorXd::NullaryExpr(dim, [&] { return 0.1 + unit(gen); });
  int comps = 1;
  if (kind == 0) {
    m.kernel = hawkes::ExponentialKernel{0.5 + 2.0 * unit(gen)};
  } else if (kind == 1) {
    m.kernel = hawkes::GaussianBasisKernel{{0.5, 1.5, 3.0}, 0.3 + unit(gen), 10.0};
    comps = 3;
  } else {
    comps = 6;
    m.kernel = hawkes::DiscretizedKernel{0.3, comps};
  }
  for (int c = 0; c < comps; ++c)
    m.A.push_back(Eigen::MatrixXd::NullaryExpr(dim, dim, [&] { return 0.3 * unit(gen) / comps; }));
  return m;
}

inline hawkes::Corpus corpus_of(std::vector<hawkes::EventSequence> seqs, int dim) {
  hawkes::Corpus c;
  c.dim = dim;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (seqs[i].id.empty() || seqs[i].id == "s") seqs[i].id = "s" + std::to_string(i);
    c.sequences.push_back(std::move(seqs[i]));
  }
  return c;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("hawkes_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testing_support
