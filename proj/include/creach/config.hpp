#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "creach/errors.hpp"
#include "creach/pac.hpp"
#include "creach/sampler.hpp"

namespace creach {

/// Parsed run configuration: the reachability problem plus fit parameters,
/// seeds and optional output paths.
struct run_config {
    reachability_problem problem;
    int k = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::optional<std::uint64_t> samples_override;
    std::uint64_t seed_train = 0;
    std::uint64_t seed_validate = 0;
    std::optional<std::string> out_estimator;
    std::optional<std::string> out_cloud;

    /// Sample count actually used by an estimate run.
    std::uint64_t sample_count() const {
        if (samples_override) return *samples_override;
        return pac_sample_size({epsilon, delta, problem.effective_dim(), k});
    }
};

namespace detail {

/// Unknown keys are configuration errors: a typo must not silently fall
/// back to a default.
inline void check_keys(const nlohmann::json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) {
                known = true;
                break;
            }
        if (!known)
            throw config_error("config: unknown key '" + where + key + "'");
    }
}

inline double require_real(const nlohmann::json& obj, const std::string& where,
                           const char* key) {
    if (!obj.contains(key))
        throw config_error("config: missing required key '" + where + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw config_error("config: '" + where + key + "' must be a number");
    return v.get<double>();
}

inline std::uint64_t require_u64(const nlohmann::json& obj, const std::string& where,
                                 const char* key) {
    if (!obj.contains(key))
        throw config_error("config: missing required key '" + where + key + "'");
    const auto& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        const std::int64_t s = v.get<std::int64_t>();
        if (s >= 0) return static_cast<std::uint64_t>(s);
    }
    throw config_error("config: '" + where + key + "' must be a non-negative integer");
}

inline std::vector<double> require_real_vector(const nlohmann::json& obj,
                                               const std::string& where, const char* key) {
    if (!obj.contains(key))
        throw config_error("config: missing required key '" + where + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_array())
        throw config_error("config: '" + where + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number())
            throw config_error("config: '" + where + key + "' must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

} // namespace detail

inline run_config parse_run_config(const nlohmann::json& doc) {
    using detail::check_keys;
    if (!doc.is_object()) throw config_error("config: document must be a JSON object");
    check_keys(doc, "", {"system", "time", "integrator", "initial_set", "disturbance_set",
                         "projection", "fit", "seeds", "output"});

    run_config cfg;

    // system
    if (!doc.contains("system")) throw config_error("config: missing required key 'system'");
    const auto& system = doc.at("system");
    check_keys(system, "system.", {"id", "parameters"});
    if (!system.contains("id") || !system.at("id").is_string())
        throw config_error("config: 'system.id' must be a string");
    cfg.problem.system = make_system(system_id_from_string(system.at("id").get<std::string>()));
    if (system.contains("parameters")) {
        const auto& params = system.at("parameters");
        if (!params.is_object())
            throw config_error("config: 'system.parameters' must be an object");
        for (const auto& [name, value] : params.items()) {
            if (!cfg.problem.system.parameters.count(name))
                throw config_error("config: system '" + to_string(cfg.problem.system.id) +
                                   "' has no parameter '" + name + "'");
            if (!value.is_number())
                throw config_error("config: 'system.parameters." + name +
                                   "' must be a number");
            cfg.problem.system.parameters[name] = value.get<double>();
        }
    }

    // time range and integrator
    if (!doc.contains("time")) throw config_error("config: missing required key 'time'");
    const auto& time = doc.at("time");
    check_keys(time, "time.", {"t0", "t1"});
    cfg.problem.t0 = detail::require_real(time, "time.", "t0");
    cfg.problem.t1 = detail::require_real(time, "time.", "t1");

    cfg.problem.integ.step = default_step(cfg.problem.system.id);
    if (doc.contains("integrator")) {
        const auto& integ = doc.at("integrator");
        check_keys(integ, "integrator.", {"step"});
        cfg.problem.integ.step = detail::require_real(integ, "integrator.", "step");
    }

    // intervals
    if (!doc.contains("initial_set"))
        throw config_error("config: missing required key 'initial_set'");
    const auto& init = doc.at("initial_set");
    check_keys(init, "initial_set.", {"lower", "upper"});
    cfg.problem.x0.lower = detail::require_real_vector(init, "initial_set.", "lower");
    cfg.problem.x0.upper = detail::require_real_vector(init, "initial_set.", "upper");

    if (doc.contains("disturbance_set")) {
        const auto& dist = doc.at("disturbance_set");
        check_keys(dist, "disturbance_set.", {"lower", "upper"});
        box d;
        d.lower = detail::require_real_vector(dist, "disturbance_set.", "lower");
        d.upper = detail::require_real_vector(dist, "disturbance_set.", "upper");
        cfg.problem.disturbance = std::move(d);
    }

    // projection: documents use 1-based indices
    if (doc.contains("projection")) {
        const auto& proj = doc.at("projection");
        if (!proj.is_array())
            throw config_error("config: 'projection' must be an array of 1-based indices");
        for (const auto& e : proj) {
            if (!e.is_number_integer())
                throw config_error("config: 'projection' must contain integers");
            const int idx = e.get<int>();
            if (idx < 1 || idx > cfg.problem.system.state_dim)
                throw config_error("config: projection index " + std::to_string(idx) +
                                   " out of range 1.." +
                                   std::to_string(cfg.problem.system.state_dim));
            cfg.problem.projection.push_back(idx - 1);
        }
    }

    // fit parameters
    if (!doc.contains("fit")) throw config_error("config: missing required key 'fit'");
    const auto& fit = doc.at("fit");
    check_keys(fit, "fit.", {"k", "epsilon", "delta", "samples"});
    if (!fit.contains("k") || !fit.at("k").is_number_integer())
        throw config_error("config: 'fit.k' must be an integer");
    cfg.k = fit.at("k").get<int>();
    if (cfg.k < 0) throw config_error("config: 'fit.k' must be >= 0");
    cfg.epsilon = detail::require_real(fit, "fit.", "epsilon");
    cfg.delta = detail::require_real(fit, "fit.", "delta");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw config_error("config: 'fit.epsilon' must lie in (0,1)");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
        throw config_error("config: 'fit.delta' must lie in (0,1)");
    if (fit.contains("samples"))
        cfg.samples_override = detail::require_u64(fit, "fit.", "samples");

    // seeds
    if (!doc.contains("seeds")) throw config_error("config: missing required key 'seeds'");
    const auto& seeds = doc.at("seeds");
    check_keys(seeds, "seeds.", {"train", "validate"});
    cfg.seed_train = detail::require_u64(seeds, "seeds.", "train");
    cfg.seed_validate =
        seeds.contains("validate") ? detail::require_u64(seeds, "seeds.", "validate")
                                   : cfg.seed_train;

    // output paths
    if (doc.contains("output")) {
        const auto& output = doc.at("output");
        check_keys(output, "output.", {"estimator", "cloud"});
        if (output.contains("estimator"))
            cfg.out_estimator = output.at("estimator").get<std::string>();
        if (output.contains("cloud")) cfg.out_cloud = output.at("cloud").get<std::string>();
    }

    // cross-field validation
    try {
        cfg.problem.check();
    } catch (const std::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    if (cfg.samples_override) {
        const std::uint64_t m = basis_size(cfg.problem.effective_dim(), cfg.k);
        if (*cfg.samples_override < m)
            throw config_error("config: 'fit.samples' must be >= " + std::to_string(m) +
                               " (the basis size for n=" +
                               std::to_string(cfg.problem.effective_dim()) +
                               ", k=" + std::to_string(cfg.k) + ")");
    }
    return cfg;
}

inline run_config load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config file '" + path.string() + "': " + e.what());
    }
    return parse_run_config(doc);
}

} // namespace creach
