#pragma once
// Experiment configuration and dispatch for the command-line front end.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace vsum::cli {

inline constexpr int kStatusOk = 0;
inline constexpr int kStatusError = 1;
inline constexpr int kStatusFinding = 2;

struct ExperimentConfig {
  std::string command;  // resolvent | vsum | evolve | diagnose | sweep
  std::string subkind;  // diagnose: commutation | acute-angle | boundedness
  nlohmann::json doc = nlohmann::json::object();
  std::filesystem::path base_dir;  // relative file references resolve here
  std::filesystem::path out_dir;
  std::string format = "json";
  std::uint64_t seed = 0;
  int workers = 1;
};

// Default output directory when neither --out nor "out" is given.
inline constexpr const char* kOutDirEnv = "VSUM_OUT_DIR";

// Sets a leaf of `doc` addressed by a dotted path ("a.graph", "axis.steps.0").
// The value is parsed as JSON when possible, otherwise stored as a string.
void set_dotted(nlohmann::json& doc, const std::string& path, const std::string& value);

// Validates a parsed document and fills command-line overrides.
// Throws ConfigError on any problem.
ExperimentConfig make_config(nlohmann::json doc, std::filesystem::path base_dir);

struct RunOutcome {
  int status = kStatusOk;
  nlohmann::json payload;  // deterministic
  std::vector<std::pair<std::string, std::string>> files;  // (name, contents) written to out_dir
};

// Pure part of a run: no filesystem writes, no clock.
RunOutcome execute(const ExperimentConfig& cfg);

// execute() plus report files, the timestamp sidecar and status mapping for errors.
int run(const ExperimentConfig& cfg, std::ostream& log);

// argv front end; returns the process exit status.
int main_entry(int argc, char** argv);

}  // namespace vsum::cli
