#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hawkes/core.hpp"
#include "hawkes/data.hpp"
#include "hawkes/error.hpp"

namespace hawkes {

struct SimConfig {
  HawkesModel model;
  double t_end = 100.0;
  int n_sequences = 1;
  std::uint64_t seed = 0;
  std::size_t max_events = 1'000'000;  // per sequence
};

// Thrown when a sequence outgrows max_events; carries what was generated so far.
class EventCapExceeded : public Error {
 public:
  EventCapExceeded(EventSequence partial, std::size_t sequence_index)
      : Error("simulation exceeded max_events in sequence " + std::to_string(sequence_index) +
              " (model is likely near-critical)"),
        partial_(std::move(partial)),
        index_(sequence_index) {}

  const EventSequence& partial() const { return partial_; }
  std::size_t sequence_index() const { return index_; }

 private:
  EventSequence partial_;
  std::size_t index_;
};

enum class SimMethod { Branch, Ogata, ExactExponential };

const char* method_name(SimMethod method);
std::optional<SimMethod> parse_method(const std::string& name);

// Immigrants plus generation-by-generation offspring. Refuses unstable models.
Corpus simulate_branch(const SimConfig& cfg);

// Thinning against a per-event supremum bound, refreshed at every proposal.
Corpus simulate_ogata(const SimConfig& cfg);

// Rejection-free sampling for exponential kernels, O(D) work per event.
Corpus simulate_exact_exp(const SimConfig& cfg);

Corpus simulate(const SimConfig& cfg, SimMethod method);

struct BenchmarkGrid {
  HawkesModel model;
  std::vector<double> horizons;
  int n_sequences = 1;
  std::uint64_t seed = 0;
  std::size_t max_events = 1'000'000;
};

struct BenchmarkRow {
  std::string method;
  double t_end = 0.0;
  std::uint64_t seed = 0;
  bool applicable = true;
  std::optional<double> wall_time;
  std::optional<std::size_t> event_count;
  std::string error;
};

std::vector<BenchmarkRow> benchmark_simulators(const BenchmarkGrid& grid);

// Columns: method,t_end,seed,wall_time_s,event_count. Without timing the
// wall_time_s column is left empty so the table is reproducible byte for byte.
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows, bool include_timing);

}  // namespace hawkes
