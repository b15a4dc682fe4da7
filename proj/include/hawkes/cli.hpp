#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hawkes/core.hpp"
#include "hawkes/data.hpp"

namespace hawkes::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Full command line without the program name. Never throws; returns 0, 2 or 3.
int run(const std::vector<std::string>& args);

// seq_id,t,u,lambda on t = t_start, t_start + step, ... <= t_end.
std::string intensity_grid_csv(const HawkesModel& model, const Corpus& corpus, double step);

// Reads a corpus from .csv event tables or corpus JSON.
Corpus load_input_corpus(const std::string& path);

struct DemoOptions {
  std::string out_dir;
  std::uint64_t seed = 7;
  bool record_timing = false;
};

// Writes the panel files a..h plus manifest.json; returns the manifest paths.
std::vector<std::string> run_demo(const DemoOptions& options);

}  // namespace hawkes::cli
