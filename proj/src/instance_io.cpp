#include "cluspt/instance_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <tuple>

#include "cluspt/error.hpp"
#include "cluspt/rng.hpp"

namespace cluspt {

namespace {

struct Token {
  std::string_view text;
  std::size_t line;
  std::size_t column;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::vector<Token> split_tokens(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back({line.substr(start, i - start), line_no, start + 1});
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

long long to_integer(const Token& t) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
  if (ec != std::errc() || ptr != t.text.data() + t.text.size())
    throw ParseError("expected an integer, got '" + std::string(t.text) + "'", t.line, t.column);
  return value;
}

double to_real(const Token& t) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
  if (ec != std::errc() || ptr != t.text.data() + t.text.size() || !std::isfinite(value))
    throw ParseError("expected a real number, got '" + std::string(t.text) + "'", t.line,
                     t.column);
  return value;
}

enum class Section { kNone, kCoords, kEdges, kClusters };

constexpr std::string_view kHeaderKeys[] = {"NAME", "TYPE", "DIMENSION", "EDGE_WEIGHT_TYPE",
                                            "NUMBER_OF_CLUSTERS", "ROOT", "COMMENT"};

std::optional<Section> section_keyword(std::string_view s) {
  if (s == "NODE_COORD_SECTION") return Section::kCoords;
  if (s == "EDGE_SECTION") return Section::kEdges;
  if (s == "CLUSTER_SECTION") return Section::kClusters;
  return std::nullopt;
}

bool is_header_key(std::string_view s) {
  return std::find(std::begin(kHeaderKeys), std::end(kHeaderKeys), s) != std::end(kHeaderKeys);
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

ClusteredInstance parse_instance(std::istream& in) {
  std::string name;
  std::optional<long long> dimension, cluster_count, root;
  std::optional<std::string> weight_type;
  bool type_seen = false;

  std::vector<std::optional<Point>> coords;
  std::vector<Edge> edges;
  std::vector<std::vector<VertexId>> clusters;
  std::vector<VertexId> open_cluster;
  bool coords_seen = false, edges_seen = false, clusters_seen = false;

  Section section = Section::kNone;
  std::string line;
  std::size_t line_no = 0;
  std::size_t last_line = 0;

  auto need_dimension = [&](std::size_t l) {
    if (!dimension) throw ParseError("DIMENSION must precede data sections", l);
    return *dimension;
  };
  auto vertex_id = [&](const Token& t) {
    const long long v = to_integer(t);
    if (v < 1 || v > need_dimension(t.line))
      throw ParseError("vertex id " + std::string(t.text) + " out of range", t.line, t.column);
    return static_cast<VertexId>(v - 1);
  };

  while (std::getline(in, line)) {
    ++line_no;
    last_line = line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;

    // A keyword line: "KEY : value", "KEY: value" or a bare section name.
    const auto colon = text.find(':');
    const std::string_view head = trim(colon == std::string_view::npos ? text : text.substr(0, colon));
    if (head == "EOF") break;
    if (auto s = section_keyword(head)) {
      if (!open_cluster.empty()) throw ParseError("cluster list not terminated by -1", line_no);
      section = *s;
      if (section == Section::kCoords) {
        coords_seen = true;
        coords.assign(need_dimension(line_no), std::nullopt);
      }
      if (section == Section::kEdges) edges_seen = true;
      if (section == Section::kClusters) clusters_seen = true;
      continue;
    }
    if (colon != std::string_view::npos || is_header_key(head)) {
      if (!is_header_key(head))
        throw ParseError("unknown keyword '" + std::string(head) + "'", line_no, 1);
      if (!open_cluster.empty()) throw ParseError("cluster list not terminated by -1", line_no);
      section = Section::kNone;
      const std::string_view value =
          colon == std::string_view::npos ? std::string_view{} : trim(text.substr(colon + 1));
      const Token tok{value, line_no, colon + 2};
      if (head == "NAME") {
        name = std::string(value);
      } else if (head == "TYPE") {
        if (value != "CluSPT") throw ParseError("TYPE must be CluSPT", line_no);
        type_seen = true;
      } else if (head == "DIMENSION") {
        dimension = to_integer(tok);
        if (*dimension < 1) throw ParseError("DIMENSION must be positive", line_no);
      } else if (head == "EDGE_WEIGHT_TYPE") {
        if (value != "EUC_2D_REAL" && value != "EXPLICIT")
          throw ParseError("EDGE_WEIGHT_TYPE must be EUC_2D_REAL or EXPLICIT", line_no);
        weight_type = std::string(value);
      } else if (head == "NUMBER_OF_CLUSTERS") {
        cluster_count = to_integer(tok);
        if (*cluster_count < 1) throw ParseError("NUMBER_OF_CLUSTERS must be positive", line_no);
      } else if (head == "ROOT") {
        root = to_integer(tok);
      }
      continue;
    }

    const auto tokens = split_tokens(line, line_no);
    switch (section) {
      case Section::kNone:
        throw ParseError("data outside of a section", line_no, tokens.front().column);
      case Section::kCoords: {
        if (tokens.size() != 3) throw ParseError("expected '<id> <x> <y>'", line_no);
        const VertexId v = vertex_id(tokens[0]);
        if (coords[v]) throw ParseError("duplicate coordinates for vertex", line_no);
        coords[v] = Point{to_real(tokens[1]), to_real(tokens[2])};
        break;
      }
      case Section::kEdges: {
        if (tokens.size() != 3) throw ParseError("expected '<u> <v> <w>'", line_no);
        edges.push_back({vertex_id(tokens[0]), vertex_id(tokens[1]), to_real(tokens[2])});
        break;
      }
      case Section::kClusters: {
        for (const Token& t : tokens) {
          if (t.text == "-1") {
            if (open_cluster.empty()) throw ParseError("empty cluster", t.line, t.column);
            clusters.push_back(std::move(open_cluster));
            open_cluster.clear();
          } else {
            open_cluster.push_back(vertex_id(t));
          }
        }
        break;
      }
    }
  }

  if (!open_cluster.empty()) throw ParseError("cluster list not terminated by -1", last_line);
  if (!type_seen) throw ParseError("missing TYPE", last_line);
  if (!dimension) throw ParseError("missing DIMENSION", last_line);
  if (!weight_type) throw ParseError("missing EDGE_WEIGHT_TYPE", last_line);
  if (!cluster_count) throw ParseError("missing NUMBER_OF_CLUSTERS", last_line);
  if (!root) throw ParseError("missing ROOT", last_line);
  if (!clusters_seen) throw ParseError("missing CLUSTER_SECTION", last_line);
  if (*root < 1 || *root > *dimension) throw ValidationError("ROOT is not a valid vertex id");
  if (static_cast<long long>(clusters.size()) != *cluster_count)
    throw ValidationError("NUMBER_OF_CLUSTERS is " + std::to_string(*cluster_count) + " but " +
                          std::to_string(clusters.size()) + " clusters are listed");

  WeightedGraph graph;
  if (*weight_type == "EUC_2D_REAL") {
    if (!coords_seen || edges_seen)
      throw ParseError("EUC_2D_REAL instances need a NODE_COORD_SECTION only", last_line);
    std::vector<Point> points;
    points.reserve(coords.size());
    for (std::size_t v = 0; v < coords.size(); ++v) {
      if (!coords[v]) throw ValidationError("vertex " + std::to_string(v + 1) + " has no coordinates");
      points.push_back(*coords[v]);
    }
    graph = WeightedGraph::euclidean(std::move(points));
  } else {
    if (coords_seen) throw ParseError("EXPLICIT instances take an EDGE_SECTION", last_line);
    graph = WeightedGraph::from_edges(static_cast<std::size_t>(*dimension), std::move(edges));
  }
  return ClusteredInstance::create(std::move(name), std::move(graph), std::move(clusters),
                                   static_cast<VertexId>(*root - 1));
}

ClusteredInstance parse_instance(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_instance(in);
}

ClusteredInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_instance(in);
}

std::string serialize_instance(const ClusteredInstance& inst) {
  const WeightedGraph& g = inst.graph();
  std::ostringstream out;
  out << "NAME : " << inst.name() << '\n'
      << "TYPE : CluSPT\n"
      << "DIMENSION : " << inst.vertex_count() << '\n'
      << "EDGE_WEIGHT_TYPE : " << (g.is_euclidean() ? "EUC_2D_REAL" : "EXPLICIT") << '\n'
      << "NUMBER_OF_CLUSTERS : " << inst.cluster_count() << '\n'
      << "ROOT : " << inst.root() + 1 << '\n';
  if (g.is_euclidean()) {
    out << "NODE_COORD_SECTION\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
      out << v + 1 << ' ' << format_real(g.coords()[v].x) << ' ' << format_real(g.coords()[v].y)
          << '\n';
  } else {
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    for (Edge& e : edges)
      if (e.u > e.v) std::swap(e.u, e.v);
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    out << "EDGE_SECTION\n";
    for (const Edge& e : edges) out << e.u + 1 << ' ' << e.v + 1 << ' ' << format_real(e.w) << '\n';
  }
  out << "CLUSTER_SECTION\n";
  for (const auto& members : inst.clusters()) {
    for (VertexId v : members) out << v + 1 << ' ';
    out << "-1\n";
  }
  out << "EOF\n";
  return out.str();
}

void save_instance(const ClusteredInstance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_instance(inst);
}

ClusteredInstance generate_instance(std::size_t n, std::size_t k, Layout layout,
                                    std::uint64_t seed) {
  if (k == 0 || n == 0 || k > n)
    throw InvalidParameters("generate_instance needs 1 <= k <= n (n=" + std::to_string(n) +
                            ", k=" + std::to_string(k) + ")");
  constexpr double kSide = 1000.0;
  Rng rng(seed);
  std::vector<Point> points(n);
  std::vector<std::vector<VertexId>> clusters(k);
  std::string name;

  if (layout == Layout::kUniformSquare) {
    for (Point& p : points) p = {rng.uniform(0.0, kSide), rng.uniform(0.0, kSide)};
    // k distinct centers by partial Fisher-Yates.
    std::vector<VertexId> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<VertexId>(i);
    for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.index(n - i)]);
    std::vector<ClusterId> center_of(n, -1);
    for (std::size_t c = 0; c < k; ++c) center_of[order[c]] = static_cast<ClusterId>(c);
    for (std::size_t v = 0; v < n; ++v) {
      ClusterId best = center_of[v];
      if (best < 0) {
        double best_d = kInfinity;
        for (std::size_t c = 0; c < k; ++c) {
          const Point a = points[v], b = points[order[c]];
          const double d = std::hypot(a.x - b.x, a.y - b.y);
          if (d < best_d) {
            best_d = d;
            best = static_cast<ClusterId>(c);
          }
        }
      }
      clusters[best].push_back(static_cast<VertexId>(v));
    }
    name = std::to_string(k) + "u" + std::to_string(n) + "-s" + std::to_string(seed);
  } else {
    std::size_t rows = 1;
    for (std::size_t a = 1; a * a <= k; ++a)
      if (k % a == 0) rows = a;
    const std::size_t cols = k / rows;
    const double cw = kSide / static_cast<double>(cols);
    const double ch = kSide / static_cast<double>(rows);
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t cell;
      if (v < k) {
        cell = v;
        const double x0 = static_cast<double>(cell % cols) * cw;
        const double y0 = static_cast<double>(cell / cols) * ch;
        points[v] = {rng.uniform(x0, x0 + cw), rng.uniform(y0, y0 + ch)};
      } else {
        points[v] = {rng.uniform(0.0, kSide), rng.uniform(0.0, kSide)};
        const auto col = std::min(static_cast<std::size_t>(points[v].x / cw), cols - 1);
        const auto row = std::min(static_cast<std::size_t>(points[v].y / ch), rows - 1);
        cell = row * cols + col;
      }
      clusters[cell].push_back(static_cast<VertexId>(v));
    }
    name = std::to_string(k) + "g" + std::to_string(n) + "-" + std::to_string(rows) + "x" +
           std::to_string(cols) + "-s" + std::to_string(seed);
  }

  const auto root = static_cast<VertexId>(rng.index(n));
  return ClusteredInstance::create(std::move(name), WeightedGraph::euclidean(std::move(points)),
                                   std::move(clusters), root);
}

}  // namespace cluspt
