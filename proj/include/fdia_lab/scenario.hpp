#pragma once

// Named experiment configurations and their on-disk artifacts.

#include "fdia_lab/fdia.hpp"
#include "fdia_lab/signature.hpp"
#include "fdia_lab/simloop.hpp"
#include "fdia_lab/smsf.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fdia_lab {

struct Scenario {
    std::string name;
    SimConfig sim{};
    std::optional<AttackKind> attack_kind;  ///< none means the nominal loop
    PolySignature signature = default_signature();
    DetectionConfig detection{};
    std::uint64_t seed = 0;
};

std::vector<std::string> builtin_scenario_names();

/// nominal, scenario1 (reflection), scenario2 (scaling 0.5), scenario3
/// (reflection from a pi/6 heading). Throws std::invalid_argument otherwise.
Scenario builtin_scenario(std::string_view name);

/// `seed` is mandatory; other fields default to the nominal configuration.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);

/// Built-in name, or else a path to a JSON scenario file.
Scenario load_scenario(std::string_view name_or_path);

/// Attack built from (attack_kind.beta11, sim.p0); nullopt for nominal.
std::optional<AffineAttack> build_attack(const Scenario& s);

struct ConditionReport {
    double condition1 = 0.0;
    double condition2 = 0.0;
};

inline constexpr double kCondition1Tol = 1e-12;
inline constexpr double kCondition2Tol = 1e-10;
inline constexpr int kCondition2Samples = 1000;

/// Runs both attack conditions and throws std::runtime_error if either fails.
ConditionReport self_validate(const Scenario& s);

struct ScenarioReport {
    std::string name;
    ConditionReport conditions;
    UndetectabilityReport undetectability;
    MonitorResult monitor;
    double final_V = 0.0;
    double final_error_norm = 0.0;  ///< ||(xe, ye)|| at the last logged row
    SimTrace trace;
    std::optional<AffineAttack> attack;
};

inline constexpr double kUndetectabilityTol = 1e-9;

/// Self-validates, runs the attacked and nominal loops and compares them.
ScenarioReport evaluate_scenario(const Scenario& s);

nlohmann::json summary_json(const ScenarioReport& r);

/// Explicit directory if given, else $FDIA_LAB_OUT_DIR, else "out".
std::filesystem::path resolve_out_dir(const std::optional<std::string>& explicit_dir);

/// Writes <name>_trace.csv, <name>_attack.json, <name>_undetectability.json,
/// <name>_monitor.csv and <name>_summary.json. Returns the paths written.
std::vector<std::filesystem::path> write_artifacts(const ScenarioReport& r, const std::filesystem::path& dir);

/// evaluate_scenario + write_artifacts.
ScenarioReport run_scenario(const Scenario& s, const std::filesystem::path& dir);

}  // namespace fdia_lab
