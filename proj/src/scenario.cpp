#include "fdia_lab/scenario.hpp"

#include "fdia_lab/numfmt.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fdia_lab {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

std::string pretty(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json optional_time(const std::optional<double>& t) { return t ? nlohmann::json(*t) : nlohmann::json(nullptr); }

}  // namespace

std::vector<std::string> builtin_scenario_names() { return {"nominal", "scenario1", "scenario2", "scenario3"}; }

Scenario builtin_scenario(std::string_view name)
{
    Scenario s;
    s.name = std::string(name);
    s.seed = 20240501;
    if (name == "nominal") return s;
    if (name == "scenario1") {
        s.attack_kind = AttackKind{AttackTag::Reflection, 1.0};
        return s;
    }
    if (name == "scenario2") {
        s.attack_kind = AttackKind{AttackTag::Scaling, 0.5};
        return s;
    }
    if (name == "scenario3") {
        s.sim.p0 = {0.0, 0.02, std::numbers::pi / 6.0};
        s.attack_kind = AttackKind{AttackTag::Reflection, 1.0};
        return s;
    }
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

Scenario scenario_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw std::invalid_argument("scenario: expected a JSON object");
    for (const auto& [key, val] : j.items()) {
        if (key != "name" && key != "seed" && key != "sim" && key != "attack" && key != "signature" &&
            key != "detection") {
            throw std::invalid_argument("scenario: unknown field '" + key + "'");
        }
    }
    Scenario s;
    if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
        throw std::invalid_argument("scenario.seed is required and must be a nonnegative integer");
    }
    s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw std::invalid_argument("scenario.name must be a string");
        s.name = j["name"].get<std::string>();
    } else {
        s.name = "custom";
    }
    if (j.contains("sim")) s.sim = sim_config_from_json(j["sim"]);
    if (j.contains("attack") && !j["attack"].is_null()) {
        const auto& a = j["attack"];
        if (!a.is_object() || !a.contains("kind") || !a["kind"].is_string()) {
            throw std::invalid_argument("scenario.attack.kind must be a string");
        }
        AttackKind k;
        k.tag = attack_tag_from_string(a["kind"].get<std::string>());
        if (k.tag != AttackTag::Reflection && k.tag != AttackTag::Scaling && k.tag != AttackTag::Identity) {
            throw std::invalid_argument("scenario.attack.kind must be identity, reflection or scaling");
        }
        if (a.contains("beta11")) {
            if (!a["beta11"].is_number()) throw std::invalid_argument("scenario.attack.beta11 must be a number");
            k.beta11 = a["beta11"].get<double>();
        }
        if (k.beta11 == 0.0 || !std::isfinite(k.beta11)) {
            throw std::invalid_argument("scenario.attack.beta11 must be finite and nonzero");
        }
        s.attack_kind = k;
    }
    if (j.contains("signature")) s.signature = signature_from_json(j["signature"]);
    if (j.contains("detection")) {
        const auto& d = j["detection"];
        if (!d.is_object()) throw std::invalid_argument("scenario.detection must be an object");
        if (d.contains("threshold")) {
            if (!d["threshold"].is_number()) throw std::invalid_argument("scenario.detection.threshold must be a number");
            s.detection.threshold = d["threshold"].get<double>();
        }
        if (d.contains("window")) {
            if (!d["window"].is_number_integer()) throw std::invalid_argument("scenario.detection.window must be an integer");
            s.detection.window = d["window"].get<int>();
        }
        s.detection.validate();
    }
    return s;
}

nlohmann::json to_json(const Scenario& s)
{
    nlohmann::json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    j["sim"] = to_json(s.sim);
    if (s.attack_kind) {
        j["attack"] = {{"kind", std::string(to_string(s.attack_kind->tag))}, {"beta11", s.attack_kind->beta11}};
    } else {
        j["attack"] = nullptr;
    }
    j["signature"] = to_json(s.signature);
    j["detection"] = {{"threshold", s.detection.threshold}, {"window", s.detection.window}};
    return j;
}

Scenario load_scenario(std::string_view name_or_path)
{
    for (const auto& n : builtin_scenario_names()) {
        if (n == name_or_path) return builtin_scenario(n);
    }
    const std::filesystem::path path{std::string(name_or_path)};
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("unknown scenario '" + std::string(name_or_path) + "' (not built-in, no such file)");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

std::optional<AffineAttack> build_attack(const Scenario& s)
{
    if (!s.attack_kind) return std::nullopt;
    switch (s.attack_kind->tag) {
    case AttackTag::Reflection: return build_reflection(s.attack_kind->beta11, s.sim.p0);
    case AttackTag::Scaling: return build_scaling(s.attack_kind->beta11, s.sim.p0);
    case AttackTag::Identity: return identity_attack();
    case AttackTag::Custom: break;
    }
    throw std::invalid_argument("scenario '" + s.name + "': custom attacks are not buildable from a kind");
}

ConditionReport self_validate(const Scenario& s)
{
    s.sim.validate();
    s.detection.validate();
    ConditionReport rep;
    const auto attack = build_attack(s);
    if (!attack) return rep;
    rep.condition1 = check_condition1(*attack, s.sim.p0);
    rep.condition2 = check_condition2(*attack, kCondition2Samples, s.seed);
    if (!(rep.condition1 <= kCondition1Tol)) {
        throw std::runtime_error("scenario '" + s.name + "': condition 1 residual " + fmt17(rep.condition1));
    }
    if (!(rep.condition2 <= kCondition2Tol)) {
        throw std::runtime_error("scenario '" + s.name + "': condition 2 residual " + fmt17(rep.condition2));
    }
    return rep;
}

ScenarioReport evaluate_scenario(const Scenario& s)
{
    ScenarioReport r;
    r.name = s.name;
    r.conditions = self_validate(s);
    r.attack = build_attack(s);
    r.trace = run(s.sim, r.attack, s.signature);
    if (r.attack) {
        const SimTrace nominal = run(s.sim, std::nullopt, s.signature);
        r.undetectability = undetectability_report(r.trace, nominal, *r.attack, kUndetectabilityTol);
    }
    r.monitor = monitor(r.trace, s.signature, std::nullopt, s.detection);
    if (!r.trace.rows.empty()) {
        const auto& last = r.trace.rows.back();
        r.final_V = last.V;
        r.final_error_norm = std::hypot(last.e_observed.xe, last.e_observed.ye);
    }
    return r;
}

nlohmann::json summary_json(const ScenarioReport& r)
{
    return {
        {"schema", 1},
        {"scenario", r.name},
        {"attack", r.attack ? std::string(to_string(r.attack->kind.tag)) : std::string("none")},
        {"condition1", r.conditions.condition1},
        {"condition2", r.conditions.condition2},
        {"sup_obs_dev", r.undetectability.sup_obs_dev},
        {"sup_actual_dev", r.undetectability.sup_actual_dev},
        {"undetectable", r.undetectability.verdict},
        {"monitor_flag", r.monitor.flag},
        {"monitor_first_exceed_t", optional_time(r.monitor.first_exceed_time)},
        {"monitor_flag_t", optional_time(r.monitor.flag_time)},
        {"monitor_peak", r.monitor.peak},
        {"final_V", r.final_V},
        {"final_error_norm", r.final_error_norm},
        {"rows", r.trace.rows.size()},
    };
}

std::filesystem::path resolve_out_dir(const std::optional<std::string>& explicit_dir)
{
    if (explicit_dir && !explicit_dir->empty()) return *explicit_dir;
    if (const char* env = std::getenv("FDIA_LAB_OUT_DIR"); env && *env) return env;
    return "out";
}

std::vector<std::filesystem::path> write_artifacts(const ScenarioReport& r, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::string& suffix, const std::string& text) {
        const auto path = dir / (r.name + suffix);
        write_file(path, text);
        written.push_back(path);
    };

    put("_trace.csv", trace_csv(r.trace));
    put("_attack.json", pretty(to_json(r.attack ? *r.attack : identity_attack())));
    put("_undetectability.json", pretty({{"sup_obs_dev", r.undetectability.sup_obs_dev},
                                         {"sup_actual_dev", r.undetectability.sup_actual_dev},
                                         {"tol", kUndetectabilityTol},
                                         {"verdict", r.undetectability.verdict}}));
    std::string mon = "t,residual\n";
    for (std::size_t i = 0; i < r.monitor.t.size(); ++i) {
        append17(mon, r.monitor.t[i]);
        mon += ',';
        append17(mon, r.monitor.residual[i]);
        mon += '\n';
    }
    put("_monitor.csv", mon);
    put("_summary.json", pretty(summary_json(r)));
    return written;
}

ScenarioReport run_scenario(const Scenario& s, const std::filesystem::path& dir)
{
    ScenarioReport r = evaluate_scenario(s);
    write_artifacts(r, dir);
    return r;
}

}  // namespace fdia_lab
