#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "vortex/constants.hpp"
#include "vortex/dynamics.hpp"
#include "vortex/errors.hpp"
#include "vortex/functionals.hpp"
#include "vortex/geometry.hpp"

namespace vortex {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known)
            throw ValidationError(where + ": unknown key '" + it.key() + "'");
    }
}

inline double require_number(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key))
        throw ValidationError(where + ": missing key '" + key + "'");
    if (!j.at(key).is_number())
        throw ValidationError(where + ": key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline std::vector<double> number_array(const nlohmann::json& j, const char* key,
                                        const std::string& where) {
    if (!j.at(key).is_array())
        throw ValidationError(where + ": key '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number())
            throw ValidationError(where + ": array '" + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline nlohmann::json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

} // namespace detail

/// Strict constants config: exactly the documented field names, unknown keys
/// rejected.
inline PhysicalConstants constants_from_json(const nlohmann::json& j) {
    const std::string where = "constants";
    detail::reject_unknown_keys(j,
                                {"rho0", "v0", "Rf", "mu0", "hbar", "L", "core_a", "omega",
                                 "alpha", "epsilon_pkt"},
                                where);
    PhysicalConstants c;
    c.rho0 = detail::require_number(j, "rho0", where);
    c.v0 = detail::require_number(j, "v0", where);
    c.Rf = detail::require_number(j, "Rf", where);
    c.mu0 = detail::require_number(j, "mu0", where);
    c.hbar = detail::require_number(j, "hbar", where);
    c.L = detail::require_number(j, "L", where);
    c.core_a = detail::require_number(j, "core_a", where);
    c.omega = detail::require_number(j, "omega", where);
    c.alpha = detail::require_number(j, "alpha", where);
    c.epsilon_pkt = detail::require_number(j, "epsilon_pkt", where);
    c.validate();
    return c;
}

inline PhysicalConstants load_constants(const std::filesystem::path& path) {
    return constants_from_json(detail::parse_file(path));
}

/// Curve file: {"harmonics": M, "ax", "bx", "ay", "by", "az", "bz"} with
/// arrays of length M+1 (b*[0] ignored). Regularity is validated by the
/// curve constructor.
inline ClosedCurve curve_from_json(const nlohmann::json& j, ClosedCurve::Options opt = {}) {
    const std::string where = "curve";
    detail::reject_unknown_keys(j, {"harmonics", "ax", "bx", "ay", "by", "az", "bz"}, where);
    if (!j.contains("harmonics") || !j.at("harmonics").is_number_integer())
        throw ValidationError(where + ": missing integer key 'harmonics'");
    const auto m = j.at("harmonics").get<std::int64_t>();
    if (m < 0) throw ValidationError(where + ": harmonics must be >= 0");
    auto get = [&](const char* key) {
        if (!j.contains(key)) throw ValidationError(where + ": missing key '" + key + "'");
        auto arr = detail::number_array(j, key, where);
        if (arr.size() != static_cast<std::size_t>(m + 1))
            throw ValidationError(where + ": array '" + key + "' must have harmonics+1 entries");
        return arr;
    };
    FourierSeries x{get("ax"), get("bx")};
    FourierSeries y{get("ay"), get("by")};
    FourierSeries z{get("az"), get("bz")};
    return ClosedCurve(std::move(x), std::move(y), std::move(z), opt);
}

inline ClosedCurve load_curve(const std::filesystem::path& path, ClosedCurve::Options opt = {}) {
    return curve_from_json(detail::parse_file(path), opt);
}

/// Everything a pipeline run needs: constants, curve reference, weight and
/// momentum specs, grid, thresholds and the per-subcommand parameter blocks.
struct Scenario {
    PhysicalConstants constants;
    std::filesystem::path curve_path;
    WeightSpec f_spec;
    KOfEll k_of_ell;
    int grid_size = 1024;
    std::filesystem::path output_dir;
    double kappa_tol = 0.0;                 ///< resolved default: 1e-6 / Rf
    std::optional<double> gamma_min;        ///< default: 1e-3 max Gamma+ at run time

    struct SpectraSpec {
        double k_min = 0.0;
        double k_max = 2.0;
        int k_count = 21;
        std::int64_t n_max = 5;
    } spectra;

    struct RingSpec {
        RingConfiguration config;
        double t_sharp = 0.0;
    };
    std::optional<RingSpec> ring;

    struct SweepSpec {
        double r_min_over_rf = 1e2;
        double r_max_over_rf = 1e4;
        int points = 40;
        double k0 = 1.0;
    } sweep;
};

inline Scenario scenario_from_json(const nlohmann::json& j,
                                   const std::filesystem::path& base_dir) {
    const std::string where = "scenario";
    detail::reject_unknown_keys(j,
                                {"constants", "curve", "f", "k_of_ell", "grid_size",
                                 "output_dir", "thresholds", "spectra", "ring", "sweep"},
                                where);
    Scenario sc;
    if (!j.contains("constants"))
        throw ValidationError(where + ": missing key 'constants'");
    const auto& jc = j.at("constants");
    if (jc.is_string()) {
        const std::string name = jc.get<std::string>();
        if (name == "unit") sc.constants = unit_constants();
        else if (name == "helium") sc.constants = helium_like_constants();
        else throw ValidationError(where + ": unknown constants preset '" + name + "'");
    } else if (jc.is_object()) {
        sc.constants = constants_from_json(jc);
    } else {
        throw ValidationError(where + ": 'constants' must be a preset name or an object");
    }

    if (!j.contains("curve") || !j.at("curve").is_string())
        throw ValidationError(where + ": missing string key 'curve'");
    sc.curve_path = base_dir / j.at("curve").get<std::string>();
    if (!std::filesystem::exists(sc.curve_path))
        throw ValidationError(where + ": curve file does not exist: " + sc.curve_path.string());

    if (j.contains("f")) {
        const auto& jf = j.at("f");
        detail::reject_unknown_keys(jf, {"family", "center", "width", "s", "values"},
                                    where + ".f");
        const std::string fam = jf.value("family", "uniform");
        if (fam == "uniform") {
            sc.f_spec.family = WeightSpec::Family::uniform;
        } else if (fam == "gaussian-bump") {
            sc.f_spec.family = WeightSpec::Family::gaussian_bump;
            sc.f_spec.center = detail::require_number(jf, "center", where + ".f");
            sc.f_spec.width = detail::require_number(jf, "width", where + ".f");
        } else if (fam == "custom") {
            sc.f_spec.family = WeightSpec::Family::custom;
            sc.f_spec.s_samples = detail::number_array(jf, "s", where + ".f");
            sc.f_spec.values = detail::number_array(jf, "values", where + ".f");
        } else {
            throw ValidationError(where + ": unknown f family '" + fam + "'");
        }
    }

    if (j.contains("k_of_ell")) {
        const auto& jk = j.at("k_of_ell");
        detail::reject_unknown_keys(jk, {"a0", "a", "b"}, where + ".k_of_ell");
        sc.k_of_ell.a0 = jk.value("a0", 0.0);
        if (jk.contains("a")) sc.k_of_ell.a = detail::number_array(jk, "a", where + ".k_of_ell");
        if (jk.contains("b")) sc.k_of_ell.b = detail::number_array(jk, "b", where + ".k_of_ell");
    } else {
        sc.k_of_ell.a0 = 1.0; // default: constant unit wavenumber
    }

    if (j.contains("grid_size")) {
        if (!j.at("grid_size").is_number_integer())
            throw ValidationError(where + ": grid_size must be an integer");
        sc.grid_size = j.at("grid_size").get<int>();
    }
    if (sc.grid_size < 64) throw ValidationError(where + ": grid_size must be >= 64");

    if (j.contains("output_dir")) sc.output_dir = base_dir / j.at("output_dir").get<std::string>();

    sc.kappa_tol = 1e-6 / sc.constants.Rf;
    if (j.contains("thresholds")) {
        const auto& jt = j.at("thresholds");
        detail::reject_unknown_keys(jt, {"kappa_tol", "gamma_min"}, where + ".thresholds");
        if (jt.contains("kappa_tol"))
            sc.kappa_tol = detail::require_number(jt, "kappa_tol", where + ".thresholds");
        if (jt.contains("gamma_min"))
            sc.gamma_min = detail::require_number(jt, "gamma_min", where + ".thresholds");
    }
    if (!(sc.kappa_tol > 0.0))
        throw ValidationError(where + ": kappa_tol must be > 0");

    if (j.contains("spectra")) {
        const auto& js = j.at("spectra");
        detail::reject_unknown_keys(js, {"k_min", "k_max", "k_count", "n_max"},
                                    where + ".spectra");
        sc.spectra.k_min = js.value("k_min", sc.spectra.k_min);
        sc.spectra.k_max = js.value("k_max", sc.spectra.k_max);
        sc.spectra.k_count = js.value("k_count", sc.spectra.k_count);
        sc.spectra.n_max = js.value("n_max", sc.spectra.n_max);
        if (sc.spectra.k_min < 0.0 || sc.spectra.k_max < sc.spectra.k_min ||
            sc.spectra.k_count < 1 || sc.spectra.n_max < 0)
            throw ValidationError(where + ": invalid spectra block");
    }

    if (j.contains("ring")) {
        const auto& jr = j.at("ring");
        detail::reject_unknown_keys(
            jr, {"radius", "center", "binormal", "phase", "circulation", "t_sharp"},
            where + ".ring");
        Scenario::RingSpec rs;
        rs.config.radius = detail::require_number(jr, "radius", where + ".ring");
        rs.config.gamma = detail::require_number(jr, "circulation", where + ".ring");
        rs.config.phase = jr.value("phase", 0.0);
        rs.t_sharp = jr.value("t_sharp", 0.0);
        auto vec = [&](const char* key, Vec3 dflt) {
            if (!jr.contains(key)) return dflt;
            auto arr = detail::number_array(jr, key, where + ".ring");
            if (arr.size() != 3)
                throw ValidationError(where + ".ring: '" + key + "' must have 3 entries");
            return Vec3{arr[0], arr[1], arr[2]};
        };
        rs.config.center = vec("center", {0, 0, 0});
        rs.config.b_hat = vec("binormal", {0, 0, 1});
        sc.ring = rs;
    }

    if (j.contains("sweep")) {
        const auto& jw = j.at("sweep");
        detail::reject_unknown_keys(jw, {"r_min_over_rf", "r_max_over_rf", "points", "k0"},
                                    where + ".sweep");
        sc.sweep.r_min_over_rf = jw.value("r_min_over_rf", sc.sweep.r_min_over_rf);
        sc.sweep.r_max_over_rf = jw.value("r_max_over_rf", sc.sweep.r_max_over_rf);
        sc.sweep.points = jw.value("points", sc.sweep.points);
        sc.sweep.k0 = jw.value("k0", sc.sweep.k0);
    }

    // the referenced curve must not only exist but also validate
    (void)load_curve(sc.curve_path);

    return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(detail::parse_file(path), path.parent_path());
}

} // namespace vortex
