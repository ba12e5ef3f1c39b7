#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoii/simulator.hpp"

namespace aoii {

inline constexpr const char* kConfigSchema = "aoii-config/1";

struct SimulationSettings {
  std::uint64_t cycles = 100000;
  std::uint64_t seed = 1;
  bool trace = false;
};

enum class SweepAxis { Tau, Budget, States, Mu };

struct SweepSettings {
  SweepAxis axis = SweepAxis::Budget;
  std::vector<double> values;
  std::vector<Family> families;
  bool simulate = false;
};

struct OutputSettings {
  std::string dir;               ///< empty: print to stdout only
  std::string format = "json";  ///< json | csv | both
  bool timing = true;
};

struct RunConfig {
  nlohmann::json source_spec;  ///< kept so sweeps over N can rebuild the source
  Generator source;
  Channel channel;
  std::optional<double> budget{};
  std::optional<Family> family{};
  std::optional<Policy> policy{};
  SolverConfig solver{};
  SimulationSettings simulation{};
  std::optional<SweepSettings> sweep{};
  OutputSettings output{};
};

/// Builds the generator described by a "source" object; `n_override`
/// replaces the state count of symmetric and spread sources.
Generator build_source(const nlohmann::json& spec, std::optional<int> n_override = std::nullopt);

/// Parses a run configuration; errors are Error{Config} with a JSON-pointer
/// path to the offending field. Relative `policy_file` paths resolve
/// against `base_dir`.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

std::string_view to_string(SweepAxis a);

/// Thresholds of +infinity serialize as null.
nlohmann::json to_json(const Policy& p);
Policy policy_from_json(const nlohmann::json& j, Eigen::Index n, const std::string& where = "/policy");

nlohmann::json to_json(const CycleParams& c);
nlohmann::json to_json(const EvalResult& e);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const SimResult& r);
nlohmann::json to_json(const SolverConfig& c);

}  // namespace aoii
