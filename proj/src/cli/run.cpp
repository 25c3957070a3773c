#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "vsum/cli.hpp"
#include "vsum/report_io.hpp"
#include "vsum/spec_io.hpp"

namespace vsum::cli {
namespace {

using nlohmann::json;

struct Pair {
  OperatorSpec a;
  OperatorSpec b;
};

OperatorSpec operator_at(const ExperimentConfig& cfg, const json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("config is missing operator '") + key + "'");
  return operator_from_json(doc.at(key), cfg.base_dir);
}

std::optional<GridMeta> grid_of(const OperatorSpec& a, const OperatorSpec& b) { return a.grid() ? a.grid() : b.grid(); }

Pair operator_pair(const ExperimentConfig& cfg, const json& doc) {
  Pair p{operator_at(cfg, doc, "a"), operator_at(cfg, doc, "b")};
  if (p.a.dimension() != p.b.dimension()) throw ConfigError("operators a and b have different dimensions");
  return p;
}

Vector vector_arg(const json& v, std::size_t n, std::optional<GridMeta> grid, std::uint64_t seed) {
  if (v.is_number()) return Vector(std::vector<double>(n, v.get<double>()), grid);
  if (v.is_string() && v.get<std::string>() == "random") return random_vector(n, seed, grid);
  if (v.is_object() && v.contains("random")) return random_vector(n, seed + v.at("random").get<std::uint64_t>(), grid);
  Vector out = vector_from_json(v, grid);
  if (out.size() != n) throw ConfigError("vector length " + std::to_string(out.size()) + " does not match n = " +
                                         std::to_string(n));
  return out;
}

Vector w_arg(const ExperimentConfig& cfg, const json& doc, std::size_t n, std::optional<GridMeta> grid) {
  if (!doc.contains("w")) throw ConfigError("config is missing right-hand side 'w'");
  return vector_arg(doc.at("w"), n, grid, cfg.seed);
}

FilterPath path_arg(const json& doc) {
  const int last = doc.value("path_length", 20);
  if (!doc.contains("path")) return FilterPath::diagonal(last);
  const json& p = doc.at("path");
  if (p.is_string()) return FilterPath::named(p.get<std::string>(), last);
  std::vector<PathPoint> pts;
  for (const auto& e : p.at("points")) pts.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  return FilterPath::make(p.value("label", std::string("custom")), std::move(pts));
}

std::vector<double> list_arg(const json& doc, const char* key, std::vector<double> fallback) {
  if (!doc.contains(key)) return fallback;
  std::vector<double> out = doc.at(key).get<std::vector<double>>();
  if (out.empty()) throw ConfigError(std::string("'") + key + "' must not be empty");
  return out;
}

Forcing forcing_arg(const json& f, std::size_t n, std::optional<GridMeta> grid, double horizon) {
  if (f.is_string()) {
    const auto name = f.get<std::string>();
    if (grid) return make_forcing(name, GridSpec::make(grid->dim, grid->points_per_axis), horizon);
    if (name == "zero") return Forcing::zero(n);
    if (name == "ones") return Forcing::constant(Vector(std::vector<double>(n, 1.0)), "ones");
    throw ConfigError("forcing preset '" + name + "' needs a grid operator");
  }
  if (f.is_number()) return Forcing::constant(Vector(std::vector<double>(n, f.get<double>()), grid));
  if (f.contains("constant")) return Forcing::constant(vector_arg(f.at("constant"), n, grid, 0));
  if (f.contains("table")) {
    const json& t = f.at("table");
    std::vector<Vector> values;
    for (const auto& v : t.at("values")) values.push_back(vector_arg(v, n, grid, 0));
    return Forcing::table(t.at("times").get<std::vector<double>>(), std::move(values));
  }
  throw ConfigError("forcing must be a preset name, a number, {constant} or {table}");
}

EvolutionProblem problem_arg(const ExperimentConfig& cfg, const json& doc) {
  const double horizon = doc.value("T", 1.0);
  const SumStrategy strategy = parse_strategy(doc.value("strategy", std::string("algebraic")));
  const FilterPath path = path_arg(doc);
  if (doc.contains("example")) {
    const json& ex = doc.at("example");
    const GridSpec g = grid_from_json(ex.at("grid"));
    const std::string type = ex.value("type", std::string("reaction_diffusion"));
    const std::string forcing = ex.value("forcing", std::string("zero"));
    if (type == "reaction_diffusion") {
      EvolutionProblem p = reaction_diffusion_problem(g, ex.value("reaction", std::string("cubic")), forcing, horizon,
                                                      strategy);
      p.path = path;
      return p;
    }
    if (type == "form_sum") {
      return form_sum_problem(g, potential_from_json(ex.value("potential", json::object()), g.dim), forcing, horizon);
    }
    throw ConfigError("unknown example type '" + type + "'");
  }
  Pair ops = operator_pair(cfg, doc);
  const std::size_t n = ops.a.dimension();
  const auto grid = grid_of(ops.a, ops.b);
  Forcing f = forcing_arg(doc.value("forcing", json("zero")), n, grid, horizon);
  std::optional<Vector> u0;
  if (doc.contains("initial")) u0 = vector_arg(doc.at("initial"), n, grid, cfg.seed);
  return EvolutionProblem::make(std::move(ops.a), std::move(ops.b), std::move(f), horizon, strategy, u0, path);
}

std::string csv_of_vector(const Vector& v) {
  std::ostringstream out;
  out << "i,u\n";
  for (std::size_t i = 0; i < v.size(); ++i) out << i + 1 << ',' << format_double(v[i]) << '\n';
  return out.str();
}

RunOutcome run_resolvent(const ExperimentConfig& cfg) {
  const json& d = cfg.doc;
  const OperatorSpec t = operator_at(cfg, d, "a");
  const double lambda = d.value("lambda", 1.0);
  const Vector w = w_arg(cfg, d, t.dimension(), t.grid());
  const Vector u = resolvent(t, lambda, w, d.value("tol", kDefaultResolventTol));
  const Vector y = yosida(t, lambda, w, d.value("tol", kDefaultResolventTol));
  RunOutcome out;
  out.payload = {{"operator", t.describe()}, {"lambda", lambda}, {"w", vector_json(w)},
                 {"resolvent", vector_json(u)}, {"yosida", vector_json(y)}};
  out.files.emplace_back("resolvent", csv_of_vector(u));
  return out;
}

RunOutcome run_vsum(const ExperimentConfig& cfg) {
  const json& d = cfg.doc;
  const Pair ops = operator_pair(cfg, d);
  const Vector w = w_arg(cfg, d, ops.a.dimension(), grid_of(ops.a, ops.b));
  const FilterPath path = path_arg(d);
  auto [u, rep] = variational_sum_resolvent(ops.a, ops.b, w, path, d.value("tol", 1e-4));
  RunOutcome out;
  out.status = rep.converged ? kStatusOk : kStatusFinding;
  out.payload = to_json(rep);
  out.payload["path"] = path.label();
  out.files.emplace_back("vsum", to_csv(rep));
  return out;
}

RunOutcome run_evolve(const ExperimentConfig& cfg) {
  const EvolutionProblem p = problem_arg(cfg, cfg.doc);
  const auto steps = cfg.doc.value("steps", 100LL);
  if (steps <= 0) throw ConfigError("'steps' must be a positive integer");
  const Trajectory tr = implicit_euler_solve(p, static_cast<std::size_t>(steps), cfg.doc.value("tol", 1e-8));
  RunOutcome out;
  out.payload = to_json(tr);
  out.payload["forcing"] = p.forcing.label();
  out.payload["horizon"] = p.horizon;
  out.files.emplace_back("trajectory", to_csv(tr));
  return out;
}

RunOutcome run_diagnose(const ExperimentConfig& cfg) {
  const json& d = cfg.doc;
  const Pair ops = operator_pair(cfg, d);
  const auto samples = static_cast<std::size_t>(d.value("samples", 10));
  if (samples == 0) throw ConfigError("'samples' must be positive");
  const std::vector<double> grid = {1.0, 0.1, 0.01};
  DiagnosticReport rep;
  if (cfg.subkind == "commutation") {
    rep = check_resolvent_commutation(ops.a, ops.b, list_arg(d, "lambdas", grid), list_arg(d, "mus", grid), samples,
                                      d.value("tol", 1e-9), cfg.seed);
  } else if (cfg.subkind == "acute-angle") {
    rep = check_acute_angle(ops.a, ops.b, list_arg(d, "lambdas", grid), list_arg(d, "mus", grid), samples, cfg.seed);
  } else {
    const Vector w = w_arg(cfg, d, ops.a.dimension(), grid_of(ops.a, ops.b));
    rep = boundedness_diagnostic(ops.a, ops.b, w, path_arg(d), d.value("tol", 1e-10));
  }
  RunOutcome out;
  out.status = rep.pass ? kStatusOk : kStatusFinding;
  out.payload = to_json(rep);
  out.files.emplace_back(cfg.subkind, to_csv(rep));
  return out;
}

// One sweep point: the base config with one axis value substituted.
struct SweepPoint {
  RunOutcome outcome;
  Vector final_state;
  std::string error;
};

RunOutcome run_sweep(const ExperimentConfig& cfg) {
  const json& d = cfg.doc;
  if (!d.contains("base") || !d.at("base").is_object()) throw ConfigError("sweep needs a 'base' config object");
  if (!d.contains("axis") || !d.at("axis").is_object() || d.at("axis").size() != 1) {
    throw ConfigError("sweep needs exactly one axis: steps, strategy or path");
  }
  const std::string axis = d.at("axis").begin().key();
  const json values = d.at("axis").begin().value();
  if (axis != "steps" && axis != "strategy" && axis != "path") throw ConfigError("unknown sweep axis '" + axis + "'");
  if (!values.is_array() || values.empty()) throw ConfigError("sweep axis '" + axis + "' is empty");

  json base = d.at("base");
  const std::string base_command = base.value("command", std::string(axis == "path" ? "vsum" : "evolve"));
  if (axis == "path" ? base_command != "vsum" : base_command != "evolve") {
    throw ConfigError("axis '" + axis + "' needs a base command of " + (axis == "path" ? "vsum" : "evolve"));
  }
  base["command"] = base_command;
  base["format"] = cfg.format;
  base["seed"] = cfg.seed;

  std::vector<ExperimentConfig> configs;
  for (const auto& v : values) {
    json doc = base;
    doc[axis] = v;
    ExperimentConfig c = make_config(std::move(doc), cfg.base_dir);
    c.out_dir = cfg.out_dir;
    configs.push_back(std::move(c));
  }

  std::vector<SweepPoint> points(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
      try {
        points[i].outcome = execute(configs[i]);
        if (axis != "path") {
          const auto& st = points[i].outcome.payload.at("report").at("states");
          points[i].final_state = vector_from_json(st.back());
        } else {
          points[i].final_state = vector_from_json(points[i].outcome.payload.at("report").at("limit"));
        }
      } catch (const std::exception& e) {
        points[i].error = e.what();
        points[i].outcome.status = kStatusError;
      }
    }
  };
  const int nworkers = std::min<int>(cfg.workers, static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < nworkers; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Reference for the error column: exact final state if given, otherwise the
  // last axis point (steps) or the first point (strategy, path).
  std::optional<Vector> reference;
  if (axis == "steps" && d.contains("exact_final")) {
    reference = vector_from_json(d.at("exact_final"));
  } else if (axis == "steps" && points.back().error.empty()) {
    reference = points.back().final_state;
  } else if (axis != "steps" && points.front().error.empty()) {
    reference = points.front().final_state;
  }

  RunOutcome out;
  std::ostringstream agg;
  agg << "index,axis,value,status,final_norm,error,order\n";
  json rows = json::array();
  double prev_err = NAN;
  double prev_steps = NAN;
  int status = kStatusOk;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    const std::string value = values[i].is_string() ? values[i].get<std::string>() : values[i].dump();
    double err = NAN;
    double order = NAN;
    double fnorm = NAN;
    if (pt.error.empty()) {
      fnorm = norm(pt.final_state);
      if (reference && reference->size() == pt.final_state.size()) err = max_abs(pt.final_state - *reference);
      if (axis == "steps") {
        const double s = values[i].get<double>();
        if (std::isfinite(prev_err) && prev_err > 0.0 && err > 0.0) order = std::log(prev_err / err) / std::log(s / prev_steps);
        prev_err = err;
        prev_steps = s;
      }
    }
    // Errors dominate findings.
    if (pt.outcome.status == kStatusError) status = kStatusError;
    else if (pt.outcome.status == kStatusFinding && status == kStatusOk) status = kStatusFinding;
    agg << i << ',' << axis << ',' << value << ',' << pt.outcome.status << ',' << format_double(fnorm) << ','
        << format_double(err) << ',' << format_double(order) << '\n';
    json row = {{"index", i}, {"value", values[i]}, {"status", pt.outcome.status}};
    row["final_norm"] = std::isfinite(fnorm) ? json(fnorm) : json(nullptr);
    row["error"] = std::isfinite(err) ? json(err) : json(nullptr);
    row["order"] = std::isfinite(order) ? json(order) : json(nullptr);
    if (!pt.error.empty()) row["message"] = pt.error;
    rows.push_back(row);
    for (const auto& [name, contents] : pt.outcome.files) {
      std::ostringstream fname;
      fname << "sweep_" << std::setw(3) << std::setfill('0') << i << "_" << name;
      const std::string body = cfg.format == "json" ? pt.outcome.payload.dump(2) + "\n" : contents;
      out.files.emplace_back(fname.str(), body);
    }
  }
  out.status = status;
  out.payload = {{"axis", axis}, {"points", rows}};
  if (axis != "steps") {
    double worst = 0.0;
    for (const auto& r : rows) {
      if (r["error"].is_number()) worst = std::max(worst, r["error"].get<double>());
    }
    out.payload["max_disagreement"] = worst;
  }
  out.files.emplace_back("aggregate", agg.str());
  return out;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  f << body;
}

}  // namespace

RunOutcome execute(const ExperimentConfig& cfg) {
  RunOutcome out;
  if (cfg.command == "resolvent") out = run_resolvent(cfg);
  else if (cfg.command == "vsum") out = run_vsum(cfg);
  else if (cfg.command == "evolve") out = run_evolve(cfg);
  else if (cfg.command == "diagnose") out = run_diagnose(cfg);
  else if (cfg.command == "sweep") out = run_sweep(cfg);
  else throw ConfigError("unknown command '" + cfg.command + "'");
  json config = cfg.doc;
  config.erase("out");
  config.erase("workers");
  out.payload = {{"command", cfg.command}, {"status", out.status}, {"config", config}, {"report", out.payload}};
  return out;
}

int run(const ExperimentConfig& cfg, std::ostream& log) {
  const std::string stem = cfg.command == "diagnose" ? "diagnose_" + cfg.subkind : cfg.command;
  int status = kStatusOk;
  json sidecar = {{"nondeterministic", true}, {"timestamp", timestamp()}};
  try {
    std::filesystem::create_directories(cfg.out_dir);
    RunOutcome out = execute(cfg);
    status = out.status;
    const std::string ext = cfg.format == "json" ? ".json" : ".csv";
    if (cfg.format == "json") {
      write_file(cfg.out_dir / (stem + ".json"), out.payload.dump(2) + "\n");
    }
    for (const auto& [name, body] : out.files) {
      const bool aggregate = name == "aggregate";
      if (cfg.format == "csv" || aggregate || cfg.command == "sweep") {
        write_file(cfg.out_dir / (name + (aggregate || cfg.format == "csv" ? ".csv" : ext)), body);
      }
    }
    log << stem << ": status " << status << " -> " << cfg.out_dir.string() << "\n";
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return kStatusError;
  } catch (const std::exception& e) {
    status = kStatusError;
    log << "error: " << e.what() << "\n";
    json err = {{"command", cfg.command}, {"status", status}, {"error", e.what()}};
    if (const auto* se = dynamic_cast<const EvolutionStepError*>(&e)) {
      err["failed_step"] = se->step_index();
      err["partial"] = to_json(se->partial());
    }
    try {
      std::filesystem::create_directories(cfg.out_dir);
      write_file(cfg.out_dir / (stem + ".error.json"), err.dump(2) + "\n");
    } catch (const std::exception&) {
    }
  }
  sidecar["status"] = status;
  try {
    write_file(cfg.out_dir / (stem + ".meta.json"), sidecar.dump(2) + "\n");
  } catch (const std::exception&) {
  }
  return status;
}

}  // namespace vsum::cli
