#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hawkes/core.hpp"
#include <json.hpp>

namespace hawkes {

struct Corpus {
  std::vector<EventSequence> sequences;
  int dim = 0;
  // labels[mark] is the human-readable name; empty when marks were numeric.
  std::vector<std::string> labels;

  std::size_t size() const { return sequences.size(); }
  bool empty() const { return sequences.empty(); }
  std::size_t event_count() const;
  bool operator==(const Corpus&) const = default;
};

// Shared dim, unique ids, and every sequence valid.
void validate_corpus(const Corpus& corpus);

struct CsvSchema {
  std::string seq_id = "seq_id";
  std::string time = "time";
  std::string mark = "mark";
  std::string t_start = "t_start";  // optional column
  std::string t_end = "t_end";      // optional column
  // Window overrides applied to every sequence; they win over columns.
  std::optional<double> t_start_override;
  std::optional<double> t_end_override;
};

struct CsvLoadResult {
  Corpus corpus;
  std::vector<std::string> warnings;
};

// Marks that all parse as nonnegative integers are used as indices directly;
// otherwise labels get indices by first appearance.
CsvLoadResult load_csv(const std::string& path, const CsvSchema& schema = {});
CsvLoadResult parse_event_csv(const std::string& text, const CsvSchema& schema = {});

nlohmann::json corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& doc);
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

nlohmann::json model_to_json(const HawkesModel& model);
HawkesModel model_from_json(const nlohmann::json& doc);
nlohmann::json kernel_to_json(const KernelSpec& kernel);
KernelSpec kernel_from_json(const nlohmann::json& doc);
void save_model(const HawkesModel& model, const std::string& path);
HawkesModel load_model(const std::string& path);

// Sequence-level split: round(ratio * N) sequences go to the first part.
// Both parts keep the input order.
std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus, double ratio, std::uint64_t seed);

// Keeps each sequence independently with probability `fraction`.
Corpus subsample(const Corpus& corpus, double fraction, std::uint64_t seed);

// b is shifted to start `gap` after a ends.
EventSequence stitch(const EventSequence& a, const EventSequence& b, double gap);

// Keeps each event independently with probability keep_prob; window unchanged.
EventSequence thin_events(const EventSequence& seq, double keep_prob, std::uint64_t seed);

}  // namespace hawkes
