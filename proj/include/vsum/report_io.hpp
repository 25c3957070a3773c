#pragma once
// JSON and CSV serialization of reports and trajectories. Floats in CSV are
// printed with 17 significant digits; JSON uses the shortest representation
// that round-trips. NaN becomes null in JSON and "nan" in CSV.

#include <string>

#include <json.hpp>

#include "vsum/evolution.hpp"

namespace vsum {

std::string format_double(double v);

nlohmann::json vector_json(const Vector& v);

nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json to_json(const DiagnosticReport& r);
nlohmann::json to_json(const Trajectory& t);

// lambda,mu,norm,diff
std::string to_csv(const ConvergenceReport& r);
// parameter,value (trace rows), preceded by a summary comment line
std::string to_csv(const DiagnosticReport& r);
// t,u_1,...,u_n
std::string to_csv(const Trajectory& t);

}  // namespace vsum
