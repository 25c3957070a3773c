#include <fstream>
#include <sstream>

#include "vsum/spec_io.hpp"

namespace vsum {
namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw ConfigError(std::string("operator spec is missing '") + key + "'");
  return doc.at(key);
}

std::size_t dimension_of(const json& doc) {
  if (doc.contains("n")) {
    const auto n = doc.at("n").get<long long>();
    if (n <= 0) throw ConfigError("operator dimension must be positive");
    return static_cast<std::size_t>(n);
  }
  if (doc.contains("grid")) return grid_from_json(doc.at("grid")).unknowns();
  throw ConfigError("operator spec needs 'n' or 'grid'");
}

std::optional<GridMeta> grid_meta(const json& doc) {
  if (!doc.contains("grid")) return std::nullopt;
  return grid_from_json(doc.at("grid")).meta();
}

SymSparseMatrix matrix_from_json(const json& doc, std::size_t n) {
  if (doc.contains("preset")) {
    const auto name = doc.at("preset").get<std::string>();
    if (name == "zero") return SymSparseMatrix::zero(n);
    if (name == "identity") return SymSparseMatrix::identity(n);
    if (name == "laplacian") {
      const GridSpec g = grid_from_json(require(doc, "grid"));
      if (g.unknowns() != n) throw ConfigError("laplacian grid does not match 'n'");
      return build_laplacian(g);
    }
    throw ConfigError("unknown matrix preset '" + name + "'");
  }
  if (doc.contains("diagonal")) return SymSparseMatrix::diagonal(vector_from_json(doc.at("diagonal")), true);
  std::vector<Triplet> t;
  for (const auto& e : require(doc, "entries")) {
    if (!e.is_array() || e.size() != 3) throw ConfigError("matrix entries are [row, col, value] triplets");
    const auto r = e[0].get<long long>();
    const auto c = e[1].get<long long>();
    if (r < 0 || c < 0) throw ConfigError("matrix indices must be nonnegative");
    t.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), e[2].get<double>()});
  }
  return SymSparseMatrix(n, t, true);
}

ScalarMonotoneGraph graph_from_json(const json& g) {
  if (g.is_string()) return make_reaction_graph(g.get<std::string>());
  if (g.contains("normal_cone")) {
    const auto& ab = g.at("normal_cone");
    auto bound = [](const json& v, double inf) { return v.is_null() ? inf : v.get<double>(); };
    return ScalarMonotoneGraph::normal_cone("normal-cone", bound(ab.at(0), -kPlusInfinity), bound(ab.at(1), kPlusInfinity));
  }
  std::vector<ScalarMonotoneGraph::Breakpoint> pts;
  for (const auto& b : require(g, "breakpoints")) {
    if (!b.is_array() || (b.size() != 2 && b.size() != 3)) {
      throw ConfigError("breakpoints are [x, y] or [x, y_lo, y_hi]");
    }
    const double lo = b[1].get<double>();
    pts.push_back({b[0].get<double>(), lo, b.size() == 3 ? b[2].get<double>() : lo});
  }
  return ScalarMonotoneGraph::piecewise(g.value("name", std::string("piecewise")), std::move(pts),
                                        g.value("left_slope", 0.0), g.value("right_slope", 0.0));
}

ConvexFunctionSpec function_from_json(const json& f, std::size_t n) {
  if (f.is_string()) return ConvexFunctionSpec::preset(f.get<std::string>());
  if (f.is_array()) {
    ConvexFunctionSpec sum;
    for (const auto& part : f) sum = sum + function_from_json(part, n);
    return sum;
  }
  if (f.contains("box")) {
    return ConvexFunctionSpec::box_indicator(f.at("box").at(0).get<double>(), f.at("box").at(1).get<double>());
  }
  if (f.contains("quadratic_form")) return ConvexFunctionSpec::quadratic_form(matrix_from_json(f.at("quadratic_form"), n));
  return ConvexFunctionSpec::preset(require(f, "preset").get<std::string>(), f.value("weight", 1.0));
}

}  // namespace

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

GridSpec grid_from_json(const json& doc) {
  return GridSpec::make(doc.value("dim", 1), static_cast<std::size_t>(require(doc, "n").get<long long>()));
}

PotentialSpec potential_from_json(const json& doc, int dim) {
  PotentialSpec p = PotentialSpec::defaults(dim, doc.value("K", 16));
  p.exponent = doc.value("exponent", p.exponent);
  p.cutoff = doc.value("cutoff", p.cutoff);
  p.offset = doc.value("offset", p.offset);
  if (doc.contains("centers")) {
    p.centers.clear();
    for (const auto& c : doc.at("centers")) {
      if (c.is_number()) {
        p.centers.push_back({c.get<double>(), 0.0});
      } else {
        p.centers.push_back({c.at(0).get<double>(), c.size() > 1 ? c.at(1).get<double>() : 0.0});
      }
    }
  }
  p.validate();
  return p;
}

Vector vector_from_json(const json& doc, std::optional<GridMeta> grid) {
  if (doc.is_number()) return Vector(std::vector<double>{doc.get<double>()}, grid);
  if (!doc.is_array()) throw ConfigError("expected a number or an array of numbers");
  std::vector<double> v;
  for (const auto& x : doc) {
    if (!x.is_number()) throw ConfigError("expected an array of numbers");
    v.push_back(x.get<double>());
  }
  return Vector(std::move(v), grid);
}

OperatorSpec operator_from_json(const json& doc, const std::filesystem::path& base) {
  try {
    if (doc.is_object() && doc.contains("file")) {
      const std::filesystem::path p = base / doc.at("file").get<std::string>();
      return operator_from_json(load_json_file(p), p.parent_path());
    }
    const auto kind = require(doc, "kind").get<std::string>();
    OperatorSpec spec = [&] {
      if (kind == "linear") {
        const std::size_t n = dimension_of(doc);
        return OperatorSpec::linear(matrix_from_json(doc, n));
      }
      if (kind == "separable") return OperatorSpec::separable(graph_from_json(require(doc, "graph")), dimension_of(doc));
      if (kind == "subdifferential") {
        const std::size_t n = dimension_of(doc);
        return OperatorSpec::subdifferential(function_from_json(require(doc, "function"), n), n);
      }
      if (kind == "form_sum") {
        const GridSpec g = grid_from_json(require(doc, "grid"));
        const json& q = doc.contains("potential") ? doc.at("potential") : json::object();
        if (q.is_array()) return build_form_sum(g, vector_from_json(q, g.meta()));
        return build_form_sum(g, potential_from_json(q, g.dim));
      }
      if (kind == "nonsymmetric_linear") {
        const std::size_t n = dimension_of(doc);
        return OperatorSpec::nonsymmetric_linear(n, vector_from_json(require(doc, "rows")).values());
      }
      throw ConfigError("unknown operator kind '" + kind + "'");
    }();
    if (auto g = grid_meta(doc)) {
      if (g->dim == 1 ? g->points_per_axis != spec.dimension()
                      : g->points_per_axis * g->points_per_axis != spec.dimension()) {
        throw ConfigError("operator grid does not match its dimension");
      }
      spec.with_grid(g);
    }
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed operator spec: ") + e.what());
  }
}

}  // namespace vsum
