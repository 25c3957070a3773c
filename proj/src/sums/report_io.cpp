#include <cmath>
#include <cstdio>
#include <sstream>

#include "vsum/report_io.hpp"

namespace vsum {
namespace {

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& rec : r.records) {
    records.push_back({{"lambda", rec.lambda}, {"mu", rec.mu}, {"norm", number(rec.norm)}, {"diff", number(rec.diff)}});
  }
  nlohmann::json out = {
      {"label", r.label},
      {"converged", r.converged},
      {"converged_at", r.converged_at},
      {"tolerance", r.tolerance},
      {"rate", number(r.rate)},
      {"verdict", r.verdict},
      {"limit_norm", number(norm(r.limit))},
      {"limit", vector_json(r.limit)},
      {"records", records},
  };
  out["extrapolated"] = r.extrapolated ? vector_json(*r.extrapolated) : nlohmann::json(nullptr);
  return out;
}

nlohmann::json to_json(const DiagnosticReport& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [p, v] : r.trace) trace.push_back({number(p), number(v)});
  return {
      {"name", r.name},
      {"samples", r.samples},
      {"pass", r.pass},
      {"worst_value", number(r.worst_value)},
      {"tolerance", r.tolerance},
      {"comparison", r.comparison},
      {"detail", r.detail},
      {"witness", vector_json(r.witness)},
      {"trace", trace},
  };
}

std::string to_csv(const ConvergenceReport& r) {
  std::ostringstream out;
  out << "lambda,mu,norm,diff\n";
  for (const auto& rec : r.records) {
    out << format_double(rec.lambda) << ',' << format_double(rec.mu) << ',' << format_double(rec.norm) << ','
        << format_double(rec.diff) << '\n';
  }
  return out.str();
}

std::string to_csv(const DiagnosticReport& r) {
  std::ostringstream out;
  out << "# " << r.name << " pass=" << (r.pass ? "true" : "false") << " worst=" << format_double(r.worst_value)
      << " tol=" << format_double(r.tolerance) << " samples=" << r.samples << '\n';
  out << "parameter,value\n";
  for (const auto& [p, v] : r.trace) out << format_double(p) << ',' << format_double(v) << '\n';
  return out.str();
}

}  // namespace vsum
