#include "hawkes/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "hawkes/error.hpp"
#include "hawkes/io.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

using nlohmann::json;

std::size_t Corpus::event_count() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.size();
  return n;
}

void validate_corpus(const Corpus& corpus) {
  std::set<std::string> ids;
  for (const auto& seq : corpus.sequences) {
    if (seq.dim != corpus.dim)
      throw InvalidInput("corpus: sequence '" + seq.id + "' has dim " + std::to_string(seq.dim) +
                         ", corpus has " + std::to_string(corpus.dim));
    if (!ids.insert(seq.id).second) throw InvalidInput("corpus: duplicate sequence id '" + seq.id + "'");
    validate_sequence(seq);
  }
  if (!corpus.labels.empty() && static_cast<int>(corpus.labels.size()) != corpus.dim)
    throw InvalidInput("corpus: label_map size does not match dim");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<int> parse_index(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 0) return std::nullopt;
  return value;
}

int require_column(const io::CsvTable& table, const std::string& name) {
  const int c = table.column(name);
  if (c < 0) throw SchemaError("CSV is missing required column '" + name + "'");
  return c;
}

const std::string& cell(const io::CsvTable& table, std::size_t row, int col) {
  static const std::string empty;
  const auto& r = table.rows[row];
  return col < static_cast<int>(r.size()) ? r[col] : empty;
}

}  // namespace

CsvLoadResult parse_event_csv(const std::string& text, const CsvSchema& schema) {
  const io::CsvTable table = io::parse_csv(text);
  const int id_col = require_column(table, schema.seq_id);
  const int time_col = require_column(table, schema.time);
  const int mark_col = require_column(table, schema.mark);
  const int start_col = table.column(schema.t_start);
  const int end_col = table.column(schema.t_end);

  CsvLoadResult result;
  if (table.rows.empty()) {
    result.warnings.push_back("event CSV has a header but no rows; corpus is empty");
    return result;
  }

  struct Pending {
    std::string id;
    std::vector<std::pair<double, std::string>> rows;
    std::optional<double> t_start, t_end;
  };
  std::vector<Pending> pending;
  std::unordered_map<std::string, std::size_t> index_of;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t line = table.line_numbers[r];
    const std::string id = trim(cell(table, r, id_col));
    const auto time = parse_number(cell(table, r, time_col));
    if (!time || !std::isfinite(*time)) throw ParseError("non-numeric time '" + cell(table, r, time_col) + "'", line);
    if (*time < 0.0) throw InvalidInput("negative time at line " + std::to_string(line));
    auto [it, inserted] = index_of.try_emplace(id, pending.size());
    if (inserted) pending.push_back(Pending{id, {}, {}, {}});
    Pending& p = pending[it->second];
    p.rows.emplace_back(*time, trim(cell(table, r, mark_col)));
    auto window_cell = [&](int col, std::optional<double>& slot) {
      if (col < 0 || slot) return;
      const std::string& raw = cell(table, r, col);
      if (trim(raw).empty()) return;
      const auto v = parse_number(raw);
      if (!v) throw ParseError("non-numeric window bound '" + raw + "'", line);
      slot = *v;
    };
    window_cell(start_col, p.t_start);
    window_cell(end_col, p.t_end);
  }

  bool numeric_marks = true;
  int max_mark = -1;
  for (const auto& p : pending) {
    for (const auto& [t, m] : p.rows) {
      const auto idx = parse_index(m);
      if (!idx) {
        numeric_marks = false;
        break;
      }
      max_mark = std::max(max_mark, *idx);
    }
    if (!numeric_marks) break;
  }

  std::map<std::string, int> label_index;
  Corpus& corpus = result.corpus;
  if (!numeric_marks) {
    for (const auto& p : pending) {
      for (const auto& [t, m] : p.rows) {
        if (label_index.try_emplace(m, static_cast<int>(corpus.labels.size())).second) corpus.labels.push_back(m);
      }
    }
    corpus.dim = static_cast<int>(corpus.labels.size());
  } else {
    corpus.dim = max_mark + 1;
  }

  for (auto& p : pending) {
    EventSequence seq;
    seq.id = p.id;
    seq.dim = corpus.dim;
    for (const auto& [t, m] : p.rows) {
      const int mark = numeric_marks ? *parse_index(m) : label_index.at(m);
      seq.events.push_back(Event{t, mark});
    }
    std::stable_sort(seq.events.begin(), seq.events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    seq.t_start = schema.t_start_override.value_or(p.t_start.value_or(0.0));
    seq.t_end = schema.t_end_override.value_or(p.t_end.value_or(seq.events.empty() ? 0.0 : seq.events.back().time));
    validate_sequence(seq);
    corpus.sequences.push_back(std::move(seq));
  }
  return result;
}

CsvLoadResult load_csv(const std::string& path, const CsvSchema& schema) {
  return parse_event_csv(io::read_file(path), schema);
}

json corpus_to_json(const Corpus& corpus) {
  json doc;
  doc["dim"] = corpus.dim;
  doc["label_map"] = corpus.labels.empty() ? json(nullptr) : json(corpus.labels);
  json seqs = json::array();
  for (const auto& s : corpus.sequences) {
    json events = json::array();
    for (const auto& e : s.events) events.push_back(json::array({e.time, e.mark}));
    seqs.push_back(json{{"id", s.id}, {"t_start", s.t_start}, {"t_end", s.t_end}, {"events", std::move(events)}});
  }
  doc["sequences"] = std::move(seqs);
  return doc;
}

Corpus corpus_from_json(const json& doc) {
  try {
    Corpus corpus;
    corpus.dim = doc.at("dim").get<int>();
    if (doc.contains("label_map") && !doc["label_map"].is_null())
      corpus.labels = doc["label_map"].get<std::vector<std::string>>();
    for (const auto& s : doc.at("sequences")) {
      EventSequence seq;
      seq.id = s.at("id").get<std::string>();
      seq.t_start = s.at("t_start").get<double>();
      seq.t_end = s.at("t_end").get<double>();
      seq.dim = corpus.dim;
      for (const auto& e : s.at("events")) seq.events.push_back(Event{e.at(0).get<double>(), e.at(1).get<int>()});
      corpus.sequences.push_back(std::move(seq));
    }
    validate_corpus(corpus);
    return corpus;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed corpus document: ") + e.what());
  }
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  io::write_file_atomic(path, corpus_to_json(corpus).dump() + "\n");
}

Corpus load_corpus(const std::string& path) {
  json doc;
  try {
    doc = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
  return corpus_from_json(doc);
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, int d) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != d) throw FormatError("matrix must have dim rows");
  Eigen::MatrixXd m(d, d);
  for (int r = 0; r < d; ++r) {
    if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != d) throw FormatError("matrix must have dim columns");
    for (int c = 0; c < d; ++c) m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

}  // namespace

json kernel_to_json(const KernelSpec& kernel) {
  if (const auto* k = std::get_if<ExponentialKernel>(&kernel)) return json{{"type", "exponential"}, {"decay", k->decay}};
  if (const auto* k = std::get_if<GaussianBasisKernel>(&kernel))
    return json{{"type", "basis"}, {"centers", k->centers}, {"bandwidth", k->bandwidth}, {"support", k->support}};
  const auto& k = std::get<DiscretizedKernel>(kernel);
  return json{{"type", "discretized"}, {"lag", k.lag}, {"points", k.points}};
}

KernelSpec kernel_from_json(const json& doc) {
  try {
    const std::string type = doc.at("type").get<std::string>();
    KernelSpec kernel;
    if (type == "exponential") {
      kernel = ExponentialKernel{doc.at("decay").get<double>()};
    } else if (type == "basis") {
      kernel = GaussianBasisKernel{doc.at("centers").get<std::vector<double>>(), doc.at("bandwidth").get<double>(),
                                   doc.value("support", 10.0)};
    } else if (type == "discretized") {
      kernel = DiscretizedKernel{doc.at("lag").get<double>(), doc.at("points").get<int>()};
    } else {
      throw FormatError("unknown kernel type '" + type + "' (expected exponential, basis or discretized)");
    }
    validate_kernel(kernel);
    return kernel;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed kernel: ") + e.what());
  }
}

json model_to_json(const HawkesModel& model) {
  json doc;
  doc["dim"] = model.dim();
  doc["mu"] = std::vector<double>(model.mu.data(), model.mu.data() + model.mu.size());
  doc["kernel"] = kernel_to_json(model.kernel);
  if (is_exponential(model.kernel)) {
    doc["A"] = matrix_to_json(model.A.at(0));
  } else {
    json stack = json::array();
    for (const auto& a : model.A) stack.push_back(matrix_to_json(a));
    doc["A"] = std::move(stack);
  }
  return doc;
}

HawkesModel model_from_json(const json& doc) {
  try {
    HawkesModel model;
    const int d = doc.at("dim").get<int>();
    const auto mu = doc.at("mu").get<std::vector<double>>();
    if (static_cast<int>(mu.size()) != d) throw FormatError("model: mu length does not match dim");
    model.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), d);
    model.kernel = kernel_from_json(doc.at("kernel"));
    const json& a = doc.at("A");
    if (is_exponential(model.kernel)) {
      model.A.push_back(matrix_from_json(a, d));
    } else {
      if (!a.is_array()) throw FormatError("model: A must be a list of matrices");
      for (const auto& m : a) model.A.push_back(matrix_from_json(m, d));
    }
    validate_model(model);
    return model;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const HawkesModel& model, const std::string& path) {
  io::write_file_atomic(path, model_to_json(model).dump(2) + "\n");
}

HawkesModel load_model(const std::string& path) {
  json doc;
  try {
    doc = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(doc);
}

std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw InvalidInput("split ratio must lie in [0, 1]");
  const std::size_t n = corpus.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

  Corpus train{{}, corpus.dim, corpus.labels};
  Corpus test{{}, corpus.dim, corpus.labels};
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? train : test).sequences.push_back(corpus.sequences[i]);
  return {std::move(train), std::move(test)};
}

Corpus subsample(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidInput("subsample fraction must lie in [0, 1]");
  Rng rng(seed);
  Corpus out{{}, corpus.dim, corpus.labels};
  for (const auto& s : corpus.sequences)
    if (rng.bernoulli(fraction)) out.sequences.push_back(s);
  return out;
}

EventSequence stitch(const EventSequence& a, const EventSequence& b, double gap) {
  if (a.dim != b.dim) throw InvalidInput("stitch: dimension mismatch");
  if (!(gap >= 0.0)) throw InvalidInput("stitch: gap must be nonnegative");
  EventSequence out = a;
  const double shift = a.t_end - b.t_start + gap;
  for (const auto& e : b.events) out.events.push_back(Event{e.time + shift, e.mark});
  out.t_end = a.t_end + gap + b.length();
  return out;
}

EventSequence thin_events(const EventSequence& seq, double keep_prob, std::uint64_t seed) {
  if (!(keep_prob >= 0.0 && keep_prob <= 1.0)) throw InvalidInput("keep probability must lie in [0, 1]");
  Rng rng(seed);
  EventSequence out = seq;
  out.events.clear();
  for (const auto& e : seq.events)
    if (rng.bernoulli(keep_prob)) out.events.push_back(e);
  return out;
}

}  // namespace hawkes
