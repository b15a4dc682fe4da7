#include <cmath>
#include <regex>
#include <sstream>

#include "hawkes/analyze.hpp"
#include "hawkes/error.hpp"
#include "hawkes/io.hpp"

namespace hawkes {

using nlohmann::json;

GrangerGraph threshold_graph(const Eigen::MatrixXd& infectivity, double threshold) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) throw InvalidInput("granger: threshold must be finite and nonnegative");
  if (!(infectivity.array() >= 0.0).all()) throw InvalidInput("granger: infectivity must be nonnegative");
  return GrangerGraph{infectivity, (infectivity.array() > threshold).matrix(), threshold};
}

GrangerGraph granger_from_model(const HawkesModel& model, double threshold) {
  return threshold_graph(branching_matrix(model), threshold);
}

GrangerResult granger_graph(const Corpus& corpus, const KernelSpec& kernel_template, const LearnConfig& cfg,
                            double threshold) {
  FitReport report;
  if (const auto* grid = std::get_if<DiscretizedKernel>(&kernel_template)) {
    report = fit_mle_ode(corpus, grid->lag, grid->points, cfg);
  } else {
    report = fit_mle(corpus, kernel_template, cfg);
  }
  GrangerGraph graph = granger_from_model(report.model, threshold);
  return GrangerResult{std::move(graph), std::move(report)};
}

json granger_to_json(const GrangerGraph& graph) {
  json inf = json::array();
  json adj = json::array();
  for (Eigen::Index v = 0; v < graph.infectivity.rows(); ++v) {
    json irow = json::array();
    json arow = json::array();
    for (Eigen::Index u = 0; u < graph.infectivity.cols(); ++u) {
      irow.push_back(graph.infectivity(v, u));
      arow.push_back(static_cast<bool>(graph.adjacency(v, u)));
    }
    inf.push_back(std::move(irow));
    adj.push_back(std::move(arow));
  }
  return json{{"threshold", graph.threshold}, {"infectivity", std::move(inf)}, {"adjacency", std::move(adj)}};
}

GrangerGraph granger_from_json(const json& doc) {
  try {
    const double threshold = doc.at("threshold").get<double>();
    const auto rows = doc.at("infectivity").get<std::vector<std::vector<double>>>();
    const auto adj = doc.at("adjacency").get<std::vector<std::vector<bool>>>();
    const auto d = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd inf(d, d);
    for (Eigen::Index v = 0; v < d; ++v) {
      if (static_cast<Eigen::Index>(rows[v].size()) != d) throw FormatError("granger: infectivity must be square");
      for (Eigen::Index u = 0; u < d; ++u) inf(v, u) = rows[v][u];
    }
    GrangerGraph graph = threshold_graph(inf, threshold);
    if (static_cast<Eigen::Index>(adj.size()) != d) throw FormatError("granger: adjacency shape mismatch");
    for (Eigen::Index v = 0; v < d; ++v)
      for (Eigen::Index u = 0; u < d; ++u)
        if (adj[v].size() != rows[v].size() || adj[v][u] != graph.adjacency(v, u))
          throw FormatError("granger: adjacency disagrees with infectivity and threshold");
    return graph;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed granger document: ") + e.what());
  }
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string granger_to_dot(const GrangerGraph& graph, const std::vector<std::string>& labels) {
  const auto d = graph.infectivity.rows();
  auto name = [&](Eigen::Index i) {
    return i < static_cast<Eigen::Index>(labels.size()) ? labels[i] : std::to_string(i);
  };
  std::ostringstream out;
  out << "digraph granger {\n";
  for (Eigen::Index i = 0; i < d; ++i) out << "  " << dot_quote(name(i)) << ";\n";
  for (Eigen::Index v = 0; v < d; ++v)
    for (Eigen::Index u = 0; u < d; ++u)
      if (graph.adjacency(v, u))
        out << "  " << dot_quote(name(v)) << " -> " << dot_quote(name(u)) << " [label=\""
            << io::format_fixed(graph.infectivity(v, u), 3) << "\"];\n";
  out << "}\n";
  return out.str();
}

std::vector<DotEdge> parse_granger_dot(const std::string& text) {
  static const std::regex edge(R"re(^\s*"((?:[^"\\]|\\.)*)"\s*->\s*"((?:[^"\\]|\\.)*)"\s*\[label="([^"]*)"\];\s*$)re");
  static const std::regex unescape(R"(\\(.))");
  if (text.find("digraph") == std::string::npos) throw FormatError("not a DOT digraph");
  std::vector<DotEdge> edges;
  std::istringstream in(text);
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (!std::regex_match(line, m, edge)) continue;
    DotEdge e;
    e.from = std::regex_replace(m[1].str(), unescape, "$1");
    e.to = std::regex_replace(m[2].str(), unescape, "$1");
    try {
      e.weight = std::stod(m[3].str());
    } catch (const std::exception&) {
      throw FormatError("DOT edge label is not numeric: " + m[3].str());
    }
    edges.push_back(std::move(e));
  }
  return edges;
}

}  // namespace hawkes
