#include <algorithm>
#include <cmath>
#include <string>

#include "vsum/monotone.hpp"

namespace vsum {
namespace {

constexpr int kMaxBracketExpansions = 200;
constexpr int kMaxBisections = 4000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double clamp_to(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Bisection on the strictly increasing u -> u + lambda f(u) - w. The bracket
// [w - lambda |f(w)|, w + lambda |f(w)|] always contains the root for a
// nondecreasing f; it is widened geometrically if rounding says otherwise.
double smooth_resolvent(const ScalarMonotoneGraph::Smooth& s, double lambda, double w) {
  auto h = [&](double u) { return u + lambda * s.f(u) - w; };
  const double fw = s.f(w);
  if (fw == 0.0) return w;
  double lo = w - lambda * std::abs(fw);
  double hi = w + lambda * std::abs(fw);
  double width = std::max(1.0, hi - lo);
  int expansions = 0;
  while (h(lo) > 0.0) {
    if (++expansions > kMaxBracketExpansions) throw DomainError("resolvent bracket failure (lower end)");
    width *= 2.0;
    lo = w - width;
  }
  while (h(hi) < 0.0) {
    if (++expansions > kMaxBracketExpansions) throw DomainError("resolvent bracket failure (upper end)");
    width *= 2.0;
    hi = w + width;
  }
  for (int it = 0; it < kMaxBisections; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    const double hm = h(mid);
    if (hm == 0.0) return mid;
    (hm < 0.0 ? lo : hi) = mid;
  }
  return std::abs(h(lo)) <= std::abs(h(hi)) ? lo : hi;
}

double segment_slope(const ScalarMonotoneGraph::Piecewise& p, std::size_t i) {
  const auto& a = p.points[i];
  const auto& b = p.points[i + 1];
  return (b.y_lo - a.y_hi) / (b.x - a.x);
}

Interval piecewise_value(const ScalarMonotoneGraph::Piecewise& p, double x) {
  const auto& pts = p.points;
  if (x < pts.front().x) {
    const double y = pts.front().y_lo + p.left_slope * (x - pts.front().x);
    return {y, y};
  }
  if (x > pts.back().x) {
    const double y = pts.back().y_hi + p.right_slope * (x - pts.back().x);
    return {y, y};
  }
  auto it = std::lower_bound(pts.begin(), pts.end(), x,
                             [](const ScalarMonotoneGraph::Breakpoint& b, double v) { return b.x < v; });
  if (it->x == x) return {it->y_lo, it->y_hi};
  const std::size_t i = static_cast<std::size_t>(it - pts.begin()) - 1;
  const double y = pts[i].y_hi + segment_slope(p, i) * (x - pts[i].x);
  return {y, y};
}

double piecewise_slope(const ScalarMonotoneGraph::Piecewise& p, double x) {
  const auto& pts = p.points;
  if (x < pts.front().x) return p.left_slope;
  if (x >= pts.back().x) return p.right_slope;
  auto it = std::upper_bound(pts.begin(), pts.end(), x,
                             [](double v, const ScalarMonotoneGraph::Breakpoint& b) { return v < b.x; });
  return segment_slope(p, static_cast<std::size_t>(it - pts.begin()) - 1);
}

// Exact resolvent: u + lambda g(u) is piecewise linear and increasing, with a
// jump [x_i + lambda y_lo_i, x_i + lambda y_hi_i] at every breakpoint.
double piecewise_resolvent(const ScalarMonotoneGraph::Piecewise& p, double lambda, double w) {
  const auto& pts = p.points;
  auto s_lo = [&](std::size_t i) { return pts[i].x + lambda * pts[i].y_lo; };
  auto s_hi = [&](std::size_t i) { return pts[i].x + lambda * pts[i].y_hi; };
  std::size_t lo = 0;
  std::size_t hi = pts.size();
  while (lo < hi) {  // first i with s_hi(i) >= w
    const std::size_t mid = (lo + hi) / 2;
    if (s_hi(mid) < w) lo = mid + 1; else hi = mid;
  }
  if (lo == pts.size()) return pts.back().x + (w - s_hi(pts.size() - 1)) / (1.0 + lambda * p.right_slope);
  if (w >= s_lo(lo)) return pts[lo].x;
  if (lo == 0) return pts.front().x + (w - s_lo(0)) / (1.0 + lambda * p.left_slope);
  const std::size_t i = lo - 1;
  return pts[i].x + (w - s_hi(i)) / (1.0 + lambda * segment_slope(p, i));
}

}  // namespace

ScalarMonotoneGraph ScalarMonotoneGraph::smooth(std::string name, std::function<double(double)> f,
                                                std::function<double(double)> df) {
  if (!f || !df) throw ConfigError("smooth graph needs a function and its derivative");
  return ScalarMonotoneGraph(std::move(name), Smooth{std::move(f), std::move(df)});
}

ScalarMonotoneGraph ScalarMonotoneGraph::piecewise(std::string name, std::vector<Breakpoint> points,
                                                   double left_slope, double right_slope) {
  if (points.empty()) throw ConfigError("piecewise graph needs at least one breakpoint");
  if (!(left_slope >= 0.0) || !(right_slope >= 0.0)) throw ConfigError("piecewise graph slopes must be nonnegative");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& b = points[i];
    if (!std::isfinite(b.x) || !std::isfinite(b.y_lo) || !std::isfinite(b.y_hi)) {
      throw ConfigError("piecewise graph breakpoints must be finite");
    }
    if (b.y_lo > b.y_hi) throw ConfigError("vertical segment with y_lo > y_hi");
    if (i > 0) {
      if (!(points[i - 1].x < b.x)) throw ConfigError("breakpoints must be strictly increasing in x");
      if (points[i - 1].y_hi > b.y_lo) throw ConfigError("piecewise graph is not monotone");
    }
  }
  return ScalarMonotoneGraph(std::move(name), Piecewise{std::move(points), left_slope, right_slope});
}

ScalarMonotoneGraph ScalarMonotoneGraph::normal_cone(std::string name, double a, double b) {
  if (std::isnan(a) || std::isnan(b) || a > b || a == kPlusInfinity || b == -kPlusInfinity) {
    throw ConfigError("normal cone needs a nonempty interval a <= b");
  }
  return ScalarMonotoneGraph(std::move(name), NormalCone{a, b});
}

ScalarMonotoneGraph ScalarMonotoneGraph::sum(std::string name, std::vector<ScalarMonotoneGraph> parts) {
  if (parts.empty()) throw ConfigError("graph sum needs at least one part");
  if (parts.size() == 1) {
    parts.front().name_ = std::move(name);
    return std::move(parts.front());
  }
  ScalarMonotoneGraph g(std::move(name), Composite{std::move(parts)});
  const Interval d = g.domain();
  if (d.lo > d.hi) throw ConfigError("graph sum has empty domain");
  return g;
}

std::optional<Interval> ScalarMonotoneGraph::value(double x) const {
  return std::visit(
      Overloaded{
          [&](const Smooth& s) -> std::optional<Interval> {
            const double y = s.f(x);
            return Interval{y, y};
          },
          [&](const Piecewise& p) -> std::optional<Interval> { return piecewise_value(p, x); },
          [&](const NormalCone& c) -> std::optional<Interval> {
            if (x < c.a || x > c.b) return std::nullopt;
            const bool at_a = x == c.a;
            const bool at_b = x == c.b;
            return Interval{at_a ? -kPlusInfinity : 0.0, at_b ? kPlusInfinity : 0.0};
          },
          [&](const Composite& c) -> std::optional<Interval> {
            Interval acc{0.0, 0.0};
            for (const auto& part : c.parts) {
              const auto v = part.value(x);
              if (!v) return std::nullopt;
              acc.lo += v->lo;
              acc.hi += v->hi;
            }
            return acc;
          }},
      rep_);
}

Interval ScalarMonotoneGraph::domain() const {
  return std::visit(Overloaded{[](const Smooth&) { return Interval{-kPlusInfinity, kPlusInfinity}; },
                               [](const Piecewise&) { return Interval{-kPlusInfinity, kPlusInfinity}; },
                               [](const NormalCone& c) { return Interval{c.a, c.b}; },
                               [](const Composite& c) {
                                 Interval d{-kPlusInfinity, kPlusInfinity};
                                 for (const auto& part : c.parts) {
                                   const Interval pd = part.domain();
                                   d.lo = std::max(d.lo, pd.lo);
                                   d.hi = std::min(d.hi, pd.hi);
                                 }
                                 return d;
                               }},
                    rep_);
}

bool ScalarMonotoneGraph::single_valued() const {
  return std::visit(Overloaded{[](const Smooth&) { return true; },
                               [](const Piecewise& p) {
                                 return std::all_of(p.points.begin(), p.points.end(),
                                                    [](const Breakpoint& b) { return b.y_lo == b.y_hi; });
                               },
                               [](const NormalCone& c) { return c.a == -kPlusInfinity && c.b == kPlusInfinity; },
                               [](const Composite& c) {
                                 return std::all_of(c.parts.begin(), c.parts.end(),
                                                    [](const ScalarMonotoneGraph& g) { return g.single_valued(); });
                               }},
                    rep_);
}

double ScalarMonotoneGraph::slope(double x) const {
  return std::visit(Overloaded{[&](const Smooth& s) { return s.df(x); },
                               [&](const Piecewise& p) { return piecewise_slope(p, x); },
                               [](const NormalCone&) { return 0.0; },
                               [&](const Composite& c) {
                                 double s = 0.0;
                                 for (const auto& part : c.parts) s += part.slope(x);
                                 return s;
                               }},
                    rep_);
}

bool ScalarMonotoneGraph::normalized() const {
  const auto v = value(0.0);
  return v && v->contains(0.0);
}

std::vector<double> ScalarMonotoneGraph::kinks() const {
  return std::visit(Overloaded{[](const Smooth&) { return std::vector<double>{}; },
                               [](const Piecewise& p) {
                                 std::vector<double> k;
                                 for (const auto& b : p.points) k.push_back(b.x);
                                 return k;
                               },
                               [](const NormalCone& c) {
                                 std::vector<double> k;
                                 if (std::isfinite(c.a)) k.push_back(c.a);
                                 if (std::isfinite(c.b) && c.b != c.a) k.push_back(c.b);
                                 return k;
                               },
                               [](const Composite& c) {
                                 std::vector<double> k;
                                 for (const auto& part : c.parts) {
                                   auto pk = part.kinks();
                                   k.insert(k.end(), pk.begin(), pk.end());
                                 }
                                 std::sort(k.begin(), k.end());
                                 k.erase(std::unique(k.begin(), k.end()), k.end());
                                 return k;
                               }},
                    rep_);
}

double ScalarMonotoneGraph::resolvent(double lambda, double w) const {
  if (!(lambda > 0.0)) throw ConfigError("resolvent parameter must be positive");
  if (!std::isfinite(w)) throw DomainError("resolvent argument is not finite");
  return std::visit(
      Overloaded{[&](const Smooth& s) { return smooth_resolvent(s, lambda, w); },
                 [&](const Piecewise& p) { return piecewise_resolvent(p, lambda, w); },
                 [&](const NormalCone& c) { return clamp_to(w, c.a, c.b); },
                 [&](const Composite&) {
                   const Interval dom = domain();
                   // -1: u lies left of the solution, +1: right of it, 0: solves the inclusion.
                   auto classify = [&](double u) {
                     if (u < dom.lo) return -1;
                     if (u > dom.hi) return 1;
                     const Interval v = *value(u);
                     if (w > u + lambda * v.hi) return -1;
                     if (w < u + lambda * v.lo) return 1;
                     return 0;
                   };
                   const double u0 = clamp_to(w, dom.lo, dom.hi);
                   const int c0 = classify(u0);
                   if (c0 == 0) return u0;
                   double lo = u0;
                   double hi = u0;
                   double step = std::max(1.0, std::abs(w));
                   int expansions = 0;
                   if (c0 < 0) {
                     do {
                       if (++expansions > kMaxBracketExpansions) throw DomainError("resolvent bracket failure");
                       lo = hi;
                       hi = u0 + step;
                       step *= 2.0;
                     } while (classify(hi) < 0);
                   } else {
                     do {
                       if (++expansions > kMaxBracketExpansions) throw DomainError("resolvent bracket failure");
                       hi = lo;
                       lo = u0 - step;
                       step *= 2.0;
                     } while (classify(lo) > 0);
                   }
                   if (classify(lo) == 0) return lo;
                   if (classify(hi) == 0) return hi;
                   for (int it = 0; it < kMaxBisections; ++it) {
                     const double mid = lo + 0.5 * (hi - lo);
                     if (!(mid > lo && mid < hi)) break;
                     const int c = classify(mid);
                     if (c == 0) return mid;
                     (c < 0 ? lo : hi) = mid;
                   }
                   // The bracket has collapsed onto the root; a kink inside it is the exact answer.
                   for (double k : kinks()) {
                     if (k >= lo && k <= hi && classify(k) == 0) return k;
                   }
                   return lo + 0.5 * (hi - lo);
                 }},
      rep_);
}

double ScalarMonotoneGraph::yosida(double lambda, double w) const {
  const double r = resolvent(lambda, w);
  if (const auto* s = std::get_if<Smooth>(&rep_)) return s->f(r);
  const auto v = value(r);
  const double raw = (w - r) / lambda;
  if (!v) return raw;
  return clamp_to(raw, v->lo, v->hi);
}

double ScalarMonotoneGraph::yosida_slope(double lambda, double w) const {
  const double r = resolvent(lambda, w);
  const auto v = value(r);
  if (v && v->lo < v->hi) {
    const double lo = r + lambda * v->lo;
    const double hi = r + lambda * v->hi;
    if (w > lo && w < hi) return 1.0 / lambda;
  }
  const double s = slope(r);
  return s / (1.0 + lambda * s);
}

double minimal_section_norm(const ScalarMonotoneGraph& g, double x) {
  const auto v = g.value(x);
  if (!v) throw DomainError("point " + std::to_string(x) + " outside the domain of graph '" + g.name() + "'");
  if (v->contains(0.0)) return 0.0;
  return std::min(std::abs(v->lo), std::abs(v->hi));
}

}  // namespace vsum
