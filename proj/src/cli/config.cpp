#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "vsum/cli.hpp"
#include "vsum/errors.hpp"
#include "vsum/spec_io.hpp"

namespace vsum::cli {
namespace {

using nlohmann::json;

const std::vector<std::string> kCommands = {"resolvent", "vsum", "evolve", "diagnose", "sweep"};
const std::map<std::string, std::string> kCommandHelp = {
    {"resolvent", "resolvent J_lambda and Yosida approximation of one operator"},
    {"vsum", "variational-sum resolvent of two operators along a filter path"},
    {"evolve", "implicit-Euler trajectory of u' + (A+B)u = f"},
    {"diagnose", "commutation, acute-angle or boundedness diagnostic for a pair"},
    {"sweep", "repeat an evolve or vsum run over one parameter axis"},
};
const std::vector<std::string> kDiagnoseKinds = {"commutation", "acute-angle", "boundedness"};

bool is_index(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

// Every {"file": ...} reference must exist when the config is parsed.
void check_file_refs(const json& node, const std::filesystem::path& base) {
  if (node.is_object()) {
    if (node.contains("file") && node.at("file").is_string()) {
      const auto p = base / node.at("file").get<std::string>();
      if (!std::filesystem::exists(p)) throw ConfigError("referenced file '" + p.string() + "' does not exist");
    }
    for (const auto& [k, v] : node.items()) check_file_refs(v, base);
  } else if (node.is_array()) {
    for (const auto& v : node) check_file_refs(v, base);
  }
}

void check_positive(const json& doc, const char* key) {
  if (doc.contains(key) && !(doc.at(key).is_number() && doc.at(key).get<double>() > 0.0)) {
    throw ConfigError(std::string("'") + key + "' must be a positive number");
  }
}

}  // namespace

void set_dotted(json& doc, const std::string& path, const std::string& value) {
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("bad override path '" + path + "'");
    if (node->is_array() && is_index(key)) {
      const std::size_t i = std::stoul(key);
      if (i >= node->size()) throw ConfigError("override index out of range in '" + path + "'");
      node = &(*node)[i];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError("override path '" + path + "' crosses a non-object");
      node = &(*node)[key];
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(parsed);
}

ExperimentConfig make_config(json doc, std::filesystem::path base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  cfg.command = doc.value("command", std::string());
  if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
    throw ConfigError("unknown or missing command '" + cfg.command + "'");
  }
  if (cfg.command == "diagnose") {
    cfg.subkind = doc.value("kind", std::string());
    if (std::find(kDiagnoseKinds.begin(), kDiagnoseKinds.end(), cfg.subkind) == kDiagnoseKinds.end()) {
      throw ConfigError("diagnose needs kind commutation, acute-angle or boundedness");
    }
  }
  cfg.format = doc.value("format", std::string("json"));
  if (cfg.format != "json" && cfg.format != "csv") throw ConfigError("format must be csv or json");
  const auto seed = doc.value("seed", 0LL);
  if (seed < 0) throw ConfigError("seed must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.workers = doc.value("workers", 1);
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  for (const char* key : {"tol", "lambda", "T"}) check_positive(doc, key);
  if (doc.contains("mu") && !(doc.at("mu").is_number() && doc.at("mu").get<double>() >= 0.0)) {
    throw ConfigError("'mu' must be a nonnegative number");
  }
  check_file_refs(doc, base_dir);
  if (doc.contains("out")) {
    cfg.out_dir = base_dir / doc.at("out").get<std::string>();
  } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
    cfg.out_dir = env;
  } else {
    cfg.out_dir = "vsum_out";
  }
  cfg.base_dir = std::move(base_dir);
  cfg.doc = std::move(doc);
  return cfg;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Resolvents, variational sums and implicit-Euler evolution of monotone operators"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out;
  std::string format;
  long long seed = -1;
  int workers = 0;
  std::vector<std::string> overrides;
  std::string diagnose_kind;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--workers", workers, "parallel workers for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--set", overrides, "override a config leaf: dotted.path=value");
  };
  for (const auto& name : kCommands) {
    auto* sub = app.add_subcommand(name, kCommandHelp.at(name));
    add_common(sub);
    if (name == "diagnose") {
      sub->add_option("kind", diagnose_kind, "commutation | acute-angle | boundedness")
          ->check(CLI::IsMember(kDiagnoseKinds));
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kStatusOk : kStatusError;
  }

  try {
    json doc = json::object();
    std::filesystem::path base = std::filesystem::current_path();
    if (!config_path.empty()) {
      doc = load_json_file(config_path);
      base = std::filesystem::absolute(config_path).parent_path();
    }
    const std::string command = app.get_subcommands().front()->get_name();
    if (doc.contains("command") && doc.at("command") != command) {
      throw ConfigError("config command '" + doc.at("command").get<std::string>() + "' does not match subcommand '" +
                        command + "'");
    }
    doc["command"] = command;
    if (!diagnose_kind.empty()) doc["kind"] = diagnose_kind;
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects dotted.path=value, got '" + o + "'");
      set_dotted(doc, o.substr(0, eq), o.substr(eq + 1));
    }
    if (!format.empty()) doc["format"] = format;
    if (seed >= 0) doc["seed"] = seed;
    if (workers > 0) doc["workers"] = workers;
    ExperimentConfig cfg = make_config(std::move(doc), base);
    if (!out.empty()) cfg.out_dir = out;
    return run(cfg, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kStatusError;
  }
}

}  // namespace vsum::cli
