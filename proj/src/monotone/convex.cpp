#include <cmath>
#include <string>

#include "vsum/monotone.hpp"

namespace vsum {
namespace {

std::string preset_name(const ConvexTerm& t) {
  switch (t.kind) {
    case ConvexPreset::kZero: return "zero";
    case ConvexPreset::kAbs: return "abs";
    case ConvexPreset::kIndicatorNonneg: return "indicator_nonneg";
    case ConvexPreset::kIndicatorBox: return "indicator_box[" + std::to_string(t.lo) + "," + std::to_string(t.hi) + "]";
    case ConvexPreset::kPower4: return "power4";
    case ConvexPreset::kQuadratic: return "quadratic";
  }
  return "?";
}

ScalarMonotoneGraph term_graph(const ConvexTerm& t) {
  const double c = t.weight;
  switch (t.kind) {
    case ConvexPreset::kZero:
      return ScalarMonotoneGraph::piecewise("zero", {{0.0, 0.0, 0.0}}, 0.0, 0.0);
    case ConvexPreset::kAbs:
      return ScalarMonotoneGraph::piecewise("d_abs", {{0.0, -c, c}}, 0.0, 0.0);
    case ConvexPreset::kIndicatorNonneg:
      return ScalarMonotoneGraph::normal_cone("normal_cone_nonneg", 0.0, kPlusInfinity);
    case ConvexPreset::kIndicatorBox:
      return ScalarMonotoneGraph::normal_cone("normal_cone_box", t.lo, t.hi);
    case ConvexPreset::kPower4:
      return ScalarMonotoneGraph::smooth(
          "d_power4", [c](double x) { return c * x * x * x; }, [c](double x) { return 3.0 * c * x * x; });
    case ConvexPreset::kQuadratic:
      return ScalarMonotoneGraph::piecewise("d_quadratic", {{0.0, 0.0, 0.0}}, c, c);
  }
  throw ConfigError("unknown convex preset");
}

double term_value(const ConvexTerm& t, double v) {
  switch (t.kind) {
    case ConvexPreset::kZero: return 0.0;
    case ConvexPreset::kAbs: return t.weight * std::abs(v);
    case ConvexPreset::kIndicatorNonneg: return v >= 0.0 ? 0.0 : kPlusInfinity;
    case ConvexPreset::kIndicatorBox: return (v >= t.lo && v <= t.hi) ? 0.0 : kPlusInfinity;
    case ConvexPreset::kPower4: return t.weight * v * v * v * v / 4.0;
    case ConvexPreset::kQuadratic: return t.weight * v * v / 2.0;
  }
  return 0.0;
}

}  // namespace

ConvexFunctionSpec ConvexFunctionSpec::preset(std::string_view name, double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw ConfigError("convex preset weight must be finite and >= 0");
  ConvexFunctionSpec f;
  ConvexTerm t;
  t.weight = weight;
  if (name == "zero") t.kind = ConvexPreset::kZero;
  else if (name == "abs") t.kind = ConvexPreset::kAbs;
  else if (name == "indicator_nonneg") t.kind = ConvexPreset::kIndicatorNonneg;
  else if (name == "power4") t.kind = ConvexPreset::kPower4;
  else if (name == "quadratic") t.kind = ConvexPreset::kQuadratic;
  else throw ConfigError("unknown convex function preset '" + std::string(name) + "'");
  f.terms_.push_back(t);
  return f;
}

ConvexFunctionSpec ConvexFunctionSpec::box_indicator(double lo, double hi) {
  if (!(lo <= hi)) throw ConfigError("box indicator needs lo <= hi");
  ConvexFunctionSpec f;
  f.terms_.push_back({ConvexPreset::kIndicatorBox, 1.0, lo, hi});
  return f;
}

ConvexFunctionSpec ConvexFunctionSpec::quadratic_form(SymSparseMatrix m) {
  if (!m.psd()) throw ConfigError("quadratic form needs a PSD matrix");
  ConvexFunctionSpec f;
  f.quadratic_ = std::move(m);
  return f;
}

ConvexFunctionSpec ConvexFunctionSpec::operator+(const ConvexFunctionSpec& other) const {
  ConvexFunctionSpec f = *this;
  f.terms_.insert(f.terms_.end(), other.terms_.begin(), other.terms_.end());
  if (other.quadratic_) f.quadratic_ = f.quadratic_ ? *f.quadratic_ + *other.quadratic_ : *other.quadratic_;
  // An empty intersection of indicator domains makes the sum improper.
  (void)f.separable_subdifferential();
  return f;
}

bool ConvexFunctionSpec::has_separable_part() const {
  for (const auto& t : terms_) {
    if (t.kind != ConvexPreset::kZero) return true;
  }
  return false;
}

double ConvexFunctionSpec::scalar_value(double v) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    const double tv = term_value(t, v);
    if (is_plus_infinity(tv)) return kPlusInfinity;
    s += tv;
  }
  return s;
}

double ConvexFunctionSpec::value(const Vector& x) const {
  double s = 0.0;
  if (has_separable_part()) {
    for (double v : x) {
      const double sv = scalar_value(v);
      if (is_plus_infinity(sv)) return kPlusInfinity;
      s += sv;
    }
  }
  if (quadratic_) s += 0.5 * dot(quadratic_->apply(x), x);
  return s;
}

ScalarMonotoneGraph ConvexFunctionSpec::separable_subdifferential() const {
  std::vector<ScalarMonotoneGraph> parts;
  std::string name;
  for (const auto& t : terms_) {
    if (t.kind == ConvexPreset::kZero) continue;
    parts.push_back(term_graph(t));
    name += (name.empty() ? "" : "+") + parts.back().name();
  }
  if (parts.empty()) return term_graph(ConvexTerm{});
  return ScalarMonotoneGraph::sum(name, std::move(parts));
}

bool ConvexFunctionSpec::smooth() const {
  for (const auto& t : terms_) {
    if (t.kind != ConvexPreset::kZero && t.kind != ConvexPreset::kPower4 && t.kind != ConvexPreset::kQuadratic) {
      return false;
    }
  }
  return true;
}

Vector ConvexFunctionSpec::prox(double lambda, const Vector& x, double tol) const {
  if (!(lambda > 0.0)) throw ConfigError("prox parameter must be positive");
  if (quadratic_ && quadratic_->dimension() != x.size()) throw ConfigError("prox: dimension mismatch");
  const bool separable = has_separable_part();
  const auto graph_prox = [g = separable_subdifferential()](double t, const Vector& v) {
    Vector out = v;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = g.resolvent(t, v[i]);
    return out;
  };
  const auto quad_prox = [this, tol](double t, const Vector& v) {
    return cg_solve(*quadratic_, 1.0 / t, (1.0 / t) * v, tol);
  };
  if (!quadratic_) return separable ? graph_prox(lambda, x) : x;
  if (!separable) return quad_prox(lambda, x);
  // No closed form for a quadratic form plus separable terms: split the two.
  return douglas_rachford(quad_prox, graph_prox, x, lambda, tol).u;
}

std::string ConvexFunctionSpec::describe() const {
  std::string s;
  for (const auto& t : terms_) {
    if (!s.empty()) s += " + ";
    if (t.weight != 1.0 && t.kind != ConvexPreset::kIndicatorNonneg && t.kind != ConvexPreset::kIndicatorBox) {
      s += std::to_string(t.weight) + "*";
    }
    s += preset_name(t);
  }
  if (quadratic_) s += (s.empty() ? "" : " + ") + std::string("quadratic_form(n=") +
                       std::to_string(quadratic_->dimension()) + ")";
  return s.empty() ? "zero" : s;
}

double moreau_envelope(const ConvexFunctionSpec& f, double lambda, const Vector& x, double tol) {
  const Vector p = f.prox(lambda, x, tol);
  const Vector d = x - p;
  return f.value(p) + dot(d, d) / (2.0 * lambda);
}

}  // namespace vsum
