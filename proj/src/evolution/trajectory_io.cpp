#include <cmath>
#include <sstream>

#include "vsum/report_io.hpp"

namespace vsum {

nlohmann::json to_json(const Trajectory& t) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : t.states) states.push_back(vector_json(s));
  nlohmann::json residuals = nlohmann::json::array();
  for (double r : t.residuals) residuals.push_back(std::isfinite(r) ? nlohmann::json(r) : nlohmann::json(nullptr));
  return {
      {"tau", t.step},
      {"steps", t.residuals.size()},
      {"strategy", to_string(t.strategy)},
      {"tolerance", t.tolerance},
      {"dimension", t.states.empty() ? 0 : t.states.front().size()},
      {"times", t.times},
      {"states", states},
      {"residuals", residuals},
  };
}

std::string to_csv(const Trajectory& t) {
  std::ostringstream out;
  out << 't';
  const std::size_t n = t.states.empty() ? 0 : t.states.front().size();
  for (std::size_t j = 1; j <= n; ++j) out << ",u_" << j;
  out << '\n';
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    out << format_double(t.times[i]);
    for (double x : t.states[i]) out << ',' << format_double(x);
    out << '\n';
  }
  return out.str();
}

}  // namespace vsum
