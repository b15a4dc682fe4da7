#include "hawkes/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "hawkes/error.hpp"
#include "hawkes/io.hpp"
#include "hawkes/parallel.hpp"

namespace hawkes {

using nlohmann::json;

HeldoutLoglik heldout_loglik(const HawkesModel& model, const Corpus& corpus) {
  validate_model(model);
  if (!corpus.empty() && corpus.dim != model.dim())
    throw InvalidInput("heldout_loglik: corpus has dimension " + std::to_string(corpus.dim) + ", model has " +
                       std::to_string(model.dim()));
  HeldoutLoglik out;
  out.per_sequence.assign(corpus.size(), 0.0);
  parallel_for(corpus.size(), [&](std::size_t n) {
    out.per_sequence[n] = log_likelihood(model, corpus.sequences[n]);
  });
  for (double v : out.per_sequence) out.total += v;
  const std::size_t events = corpus.event_count();
  out.per_event_defined = events > 0;
  out.per_event = events > 0 ? out.total / static_cast<double>(events) : 0.0;
  return out;
}

double ks_statistic_exp1(std::vector<double> sample) {
  if (sample.empty()) throw InvalidInput("KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = -std::expm1(-std::max(sample[i], 0.0));
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

RescalingResult rescaling_test(const HawkesModel& model, const EventSequence& seq) {
  validate_model(model);
  validate_sequence(seq);
  if (seq.dim != model.dim()) throw InvalidInput("rescaling_test: dimension mismatch");
  if (seq.empty()) throw InvalidInput("rescaling_test: sequence has no events");
  std::vector<double> pooled;
  for (int u = 0; u < model.dim(); ++u) {
    std::vector<double> times;
    for (const auto& e : seq.events)
      if (e.mark == u) times.push_back(e.time);
    if (times.empty()) continue;
    const auto cum = cumulative_compensator(model, seq, u, times);
    double prev = 0.0;
    for (double c : cum) {
      pooled.push_back(c - prev);
      prev = c;
    }
  }
  RescalingResult out;
  out.n_transformed = pooled.size();
  out.ks_statistic = ks_statistic_exp1(std::move(pooled));
  return out;
}

const char* learner_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Mle: return "mle";
    case LearnerKind::MleOde: return "ode";
    case LearnerKind::Ls: return "ls";
  }
  return "mle";
}

std::optional<LearnerKind> parse_learner(const std::string& name) {
  if (name == "mle") return LearnerKind::Mle;
  if (name == "ode" || name == "mle_ode") return LearnerKind::MleOde;
  if (name == "ls") return LearnerKind::Ls;
  return std::nullopt;
}

FitReport run_learner(const LearnerSpec& spec, const Corpus& train) {
  switch (spec.kind) {
    case LearnerKind::Mle: return fit_mle(train, spec.kernel, spec.cfg);
    case LearnerKind::MleOde: return fit_mle_ode(train, spec.lag, spec.points, spec.cfg);
    case LearnerKind::Ls: return fit_ls(train, spec.lag, spec.points, spec.cfg.ridge, spec.cfg);
  }
  throw InvalidInput("unknown learner");
}

json learner_spec_to_json(const LearnerSpec& spec) {
  json doc{{"name", spec.name}, {"learner", learner_name(spec.kind)}, {"config", config_to_json(spec.cfg)}};
  if (spec.kind == LearnerKind::Mle) {
    doc["kernel"] = kernel_to_json(spec.kernel);
  } else {
    doc["lag"] = spec.lag;
    doc["points"] = spec.points;
  }
  return doc;
}

LearnerSpec learner_spec_from_json(const json& doc) {
  LearnerSpec spec;
  try {
    spec.name = doc.at("name").get<std::string>();
    const auto kind = parse_learner(doc.value("learner", std::string("mle")));
    if (!kind) throw SchemaError("unknown learner '" + doc.value("learner", std::string()) + "'");
    spec.kind = *kind;
    if (doc.contains("kernel")) spec.kernel = kernel_from_json(doc.at("kernel"));
    spec.lag = doc.value("lag", spec.lag);
    spec.points = doc.value("points", spec.points);
    if (doc.contains("config")) spec.cfg = config_from_json(doc.at("config"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed learner spec: ") + e.what());
  }
  return spec;
}

std::vector<ComparisonRow> compare_learners(const Corpus& train, const Corpus& test,
                                            const std::vector<LearnerSpec>& specs,
                                            const std::optional<HawkesModel>& truth) {
  std::vector<ComparisonRow> rows(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) {
    ComparisonRow& row = rows[i];
    row.name = specs[i].name;
    const auto start = std::chrono::steady_clock::now();
    try {
      FitReport report = run_learner(specs[i], train);
      row.iterations = report.iterations;
      row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const HeldoutLoglik ll = heldout_loglik(report.model, test);
      if (ll.per_event_defined) row.per_event_ll = ll.per_event;
      if (truth) {
        const EstimationError err = estimation_error(report.model, *truth);
        row.mu_relerr = err.mu_relerr;
        row.kernel_relerr = err.kernel_relerr;
      }
      row.model = std::move(report.model);
    } catch (const std::exception& e) {
      row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.error = e.what();
    }
  });
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows, bool include_timing) {
  auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); };
  std::ostringstream out;
  out << "name,per_event_ll,mu_relerr,kernel_relerr,wall_time_s,iterations,error\n";
  for (const auto& r : rows) {
    out << io::csv_field(r.name) << ',' << opt(r.per_event_ll) << ',' << opt(r.mu_relerr) << ','
        << opt(r.kernel_relerr) << ',' << (include_timing ? io::format_double(r.wall_time) : std::string()) << ','
        << r.iterations << ',' << io::csv_field(r.error) << '\n';
  }
  return out.str();
}

}  // namespace hawkes
