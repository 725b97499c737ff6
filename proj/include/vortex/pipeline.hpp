#pragma once

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "vortex/dynamics.hpp"
#include "vortex/functionals.hpp"
#include "vortex/json_io.hpp"

namespace vortex {

// ---------------------------------------------------------------------------
// Disconnection of a loop into fragments.
// ---------------------------------------------------------------------------

struct CutInterval {
    double begin = 0.0;
    double end = 0.0;        ///< may equal begin (sign-change cut of zero width)
    std::string reason;      ///< "flex", "gamma-below-threshold", "subquantum" or joins
};

struct Fragment {
    double s_begin = 0.0;
    double s_end = 0.0;      ///< may exceed S when the arc wraps past s = 0
    double mean_gamma = 0.0;
    bool closed_loop = false;
};

struct FragmentSet {
    std::vector<Fragment> fragments;
    std::vector<CutInterval> cuts;
    double gamma_min = 0.0;
    std::string note;        ///< set when the fragment list is empty
};

namespace detail {

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// locate the zero of k(ell(s)) between two grid points by bisection
inline double bisect_k_zero(const FilamentState& state, double lo, double hi) {
    auto k_at = [&](double s) { return state.point_at(s).k0; };
    double flo = k_at(lo);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = k_at(mid);
        if (flo * fm <= 0.0) hi = mid; else { lo = mid; flo = fm; }
    }
    return 0.5 * (lo + hi);
}

// refine the |Gamma| = gamma_min crossing between an above- and a below-
// threshold grid point; falls back to `fallback` if a flex pocket hides
// between the samples
inline double bisect_gamma_threshold(const FilamentState& state, double gamma_min, double lo,
                                     double hi, double fallback) {
    try {
        auto f = [&](double s) { return std::abs(gamma_signed_at(state, s)) - gamma_min; };
        double flo = f(lo);
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (flo * fm <= 0.0) hi = mid; else { lo = mid; flo = fm; }
        }
        return 0.5 * (lo + hi);
    } catch (const FlexPointError&) {
        return fallback;
    } catch (const SubQuantumRadiusError&) {
        return fallback;
    }
}

struct RawCut {
    double begin, end; ///< begin <= end in circular coordinates (may stick out of [0,S))
    std::string reason;
};

// merge overlapping or touching cuts on the circle [0, S); a cut crossing
// the seam comes back as the last entry with end > S
inline std::vector<CutInterval> merge_cuts(std::vector<RawCut> cuts, double S) {
    const double eps = 1e-12 * S;
    std::vector<RawCut> flat;
    for (auto& c : cuts) {
        double b = c.begin, e = c.end;
        while (b < 0.0) { b += S; e += S; }
        while (b >= S) { b -= S; e -= S; }
        if (e > S + eps) {
            flat.push_back({b, S, c.reason});
            flat.push_back({0.0, e - S, c.reason});
        } else {
            flat.push_back({b, std::min(e, S), c.reason});
        }
    }
    std::sort(flat.begin(), flat.end(),
              [](const RawCut& a, const RawCut& b) { return a.begin < b.begin; });
    std::vector<CutInterval> merged;
    for (const auto& c : flat) {
        if (!merged.empty() && c.begin <= merged.back().end + eps) {
            merged.back().end = std::max(merged.back().end, c.end);
            if (merged.back().reason.find(c.reason) == std::string::npos)
                merged.back().reason += "+" + c.reason;
        } else {
            merged.push_back({c.begin, c.end, c.reason});
        }
    }
    // seam merge: a cut ending at S and one starting at 0 are one circular cut
    if (merged.size() >= 2 && merged.front().begin <= eps && merged.back().end >= S - eps) {
        if (merged.back().reason.find(merged.front().reason) == std::string::npos)
            merged.back().reason += "+" + merged.front().reason;
        merged.back().end = S + merged.front().end;
        merged.erase(merged.begin());
    }
    return merged;
}

} // namespace detail

/// Cut the loop wherever |Gamma(s)| < gamma_min, where k(ell(s)) changes
/// sign (Gamma passes through zero), or inside flex / sub-quantum regions.
/// Fragments are the complementary arcs; a clean strictly convex loop with
/// Gamma above threshold everywhere comes back as one closed fragment.
inline FragmentSet disconnect(const FilamentState& state, const Profile& gamma_signed,
                              double gamma_min) {
    if (gamma_signed.kind != ProfileKind::gamma_signed)
        throw ValidationError("disconnect: needs a gamma_signed profile");
    const double S = state.curve().total_length();
    const int n = static_cast<int>(gamma_signed.grid.size());
    const double h = S / n;

    FragmentSet out;
    out.gamma_min = gamma_min;

    std::vector<detail::RawCut> raw;
    // flex intervals, already bisection-refined by the geometry scan
    for (const auto& iv : find_flex_points(state.curve(), state.curve().kappa_tol()))
        raw.push_back({iv.begin, iv.end, "flex"});

    auto ok = [&](int i) { return gamma_signed.flags[i] == SampleFlag::ok; };
    bool any_ok = false;

    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        const double si = gamma_signed.grid[i];
        const double sj = (j == 0) ? S : gamma_signed.grid[j];
        if (!ok(i)) {
            if (gamma_signed.flags[i] == SampleFlag::subquantum)
                raw.push_back({std::max(0.0, si - 0.5 * h), std::min(S, si + 0.5 * h),
                               "subquantum"});
            continue;
        }
        any_ok = true;
        const double gi = gamma_signed.values[i];
        if (std::abs(gi) < gamma_min) {
            // below-threshold sample: cell cut; edges are refined where the
            // neighbour is back above threshold and stretched onto flagged
            // neighbours so the cut meets their flex/sub-quantum interval
            const int prev = (i - 1 + n) % n;
            double lo = si - 0.5 * h, hi = si + 0.5 * h;
            if (!ok(prev)) lo = si - h;
            else if (std::abs(gamma_signed.values[prev]) >= gamma_min)
                lo = detail::bisect_gamma_threshold(state, gamma_min, si - h, si, lo);
            if (!ok(j)) hi = si + h;
            else if (std::abs(gamma_signed.values[j]) >= gamma_min)
                hi = detail::bisect_gamma_threshold(state, gamma_min, si, si + h, hi);
            raw.push_back({lo, hi, "gamma-below-threshold"});
        } else if (ok(j) && std::abs(gamma_signed.values[j]) >= gamma_min &&
                   detail::sign_of(gi) * detail::sign_of(gamma_signed.values[j]) < 0) {
            // sign change with both neighbours above threshold: Gamma passes
            // through zero in between; zero-width cut at the k-zero
            const double star = detail::bisect_k_zero(state, si, sj);
            raw.push_back({star, star, "gamma-below-threshold"});
        }
    }

    if (!any_ok) {
        out.note = "no computable samples (flex or sub-quantum everywhere)";
        return out;
    }

    out.cuts = detail::merge_cuts(std::move(raw), S);

    if (out.cuts.empty()) {
        Fragment whole;
        whole.s_begin = 0.0;
        whole.s_end = S;
        whole.closed_loop = true;
        double acc = 0.0;
        int cnt = 0;
        for (int i = 0; i < n; ++i)
            if (ok(i)) { acc += gamma_signed.values[i]; ++cnt; }
        whole.mean_gamma = cnt ? acc / cnt : 0.0;
        out.fragments.push_back(whole);
        return out;
    }

    double cut_total = 0.0;
    for (const auto& c : out.cuts) cut_total += c.end - c.begin;
    if (cut_total >= S - 1e-12 * S) {
        out.note = "entire loop below threshold";
        return out;
    }

    // fragments are the arcs between consecutive cuts (circularly); the
    // last cut wraps to the first one period later
    for (std::size_t c = 0; c < out.cuts.size(); ++c) {
        const double fb_raw = out.cuts[c].end;
        const double fe_raw = (c + 1 < out.cuts.size()) ? out.cuts[c + 1].begin
                                                        : out.cuts.front().begin + S;
        const double len = fe_raw - fb_raw;
        if (len <= 1e-12 * S) continue; // two cuts meeting point-to-point
        Fragment frag;
        frag.s_begin = state.curve().wrap_s(fb_raw);
        frag.s_end = frag.s_begin + len;
        double acc = 0.0;
        int cnt = 0;
        for (int i = 0; i < n; ++i) {
            if (!ok(i)) continue;
            double s = gamma_signed.grid[i];
            if (s < frag.s_begin) s += S;
            if (s > frag.s_begin && s < frag.s_end) { acc += gamma_signed.values[i]; ++cnt; }
        }
        frag.mean_gamma =
            cnt ? acc / cnt
                : gamma_signed_at(state, state.curve().wrap_s(frag.s_begin + 0.5 * len));
        out.fragments.push_back(frag);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Artifact writers. CSV cells carry 17 significant digits so reruns are
// byte-identical; files are written to a temp path and renamed into place.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write file: " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline const char* flag_name(SampleFlag f) {
    switch (f) {
        case SampleFlag::ok: return "";
        case SampleFlag::flex: return "flex";
        case SampleFlag::subquantum: return "subquantum";
        case SampleFlag::gap: return "gap";
    }
    return "";
}

} // namespace detail

/// Everything run_profile computes, for callers that want the data without
/// touching the filesystem.
struct ProfileRun {
    Profile gamma_plus;
    Profile gamma_signed;
    Profile energy;
    Profile w_perp;
    std::vector<FilamentState::Point> points;
    FragmentSet fragments;
    LoopIntegral energy_total;
    LoopIntegral gamma_total;
    double gamma_min = 0.0;
    int flagged_rows = 0;
    std::string profile_csv;
    nlohmann::ordered_json summary;
    nlohmann::ordered_json fragments_json;
    int exit_code = 0;
};

inline ProfileRun compute_profile_run(const Scenario& sc, const FilamentState& state) {
    ProfileRun run;
    run.gamma_plus = gamma_plus_profile(state);
    run.gamma_signed = gamma_signed_profile(state);
    run.energy = energy_profile(state);
    run.w_perp = vorticity_perp_profile(state, run.gamma_signed);

    const int n = state.grid_size();
    run.points.reserve(n);
    for (int i = 0; i < n; ++i) run.points.push_back(state.point_at(state.grid_s(i)));

    double gamma_max = 0.0;
    for (int i = 0; i < n; ++i)
        if (run.gamma_plus.flags[i] == SampleFlag::ok)
            gamma_max = std::max(gamma_max, run.gamma_plus.values[i]);
    run.gamma_min = sc.gamma_min.value_or(1e-3 * gamma_max);

    run.fragments = disconnect(state, run.gamma_signed, run.gamma_min);
    run.energy_total = energy_total(state);
    run.gamma_total = gamma_plus_total(state);

    // profile.csv
    std::string csv = "s,R,ell,beta_abs,gamma_plus,gamma_signed,energy_density,w_perp,flags\n";
    for (int i = 0; i < n; ++i) {
        const auto& p = run.points[i];
        csv += detail::format_double(run.gamma_plus.grid[i]);
        csv += ',';
        if (p.status == SampleFlag::flex) csv += "inf";
        else csv += detail::format_double(p.frame.radius);
        csv += ',';
        if (p.status == SampleFlag::ok) csv += detail::format_double(*p.frame.ell);
        csv += ',';
        if (p.status == SampleFlag::ok) csv += detail::format_double(p.beta.abs_beta);
        csv += ',';
        if (run.gamma_plus.flags[i] == SampleFlag::ok)
            csv += detail::format_double(run.gamma_plus.values[i]);
        csv += ',';
        if (run.gamma_signed.flags[i] == SampleFlag::ok)
            csv += detail::format_double(run.gamma_signed.values[i]);
        csv += ',';
        if (run.energy.flags[i] == SampleFlag::ok)
            csv += detail::format_double(run.energy.values[i]);
        csv += ',';
        if (run.w_perp.flags[i] == SampleFlag::ok)
            csv += detail::format_double(run.w_perp.values[i]);
        csv += ',';
        const char* flag = detail::flag_name(p.status);
        if (p.status == SampleFlag::ok && run.w_perp.flags[i] == SampleFlag::gap) flag = "gap";
        csv += flag;
        csv += '\n';
        if (p.status != SampleFlag::ok) ++run.flagged_rows;
    }
    run.profile_csv = std::move(csv);

    // fragments.json
    nlohmann::ordered_json jf;
    jf["gamma_min"] = run.gamma_min;
    jf["cut_count"] = run.fragments.cuts.size();
    jf["fragment_count"] = run.fragments.fragments.size();
    if (!run.fragments.note.empty()) jf["note"] = run.fragments.note;
    jf["cuts"] = nlohmann::ordered_json::array();
    for (const auto& c : run.fragments.cuts)
        jf["cuts"].push_back({{"s_begin", c.begin}, {"s_end", c.end}, {"reason", c.reason}});
    jf["fragments"] = nlohmann::ordered_json::array();
    for (const auto& f : run.fragments.fragments)
        jf["fragments"].push_back({{"s_begin", f.s_begin},
                                   {"s_end", f.s_end},
                                   {"mean_gamma", f.mean_gamma},
                                   {"closed_loop", f.closed_loop}});
    run.fragments_json = std::move(jf);

    // summary.json
    nlohmann::ordered_json js;
    js["total_length"] = state.curve().total_length();
    js["grid_size"] = n;
    js["energy_total"] = run.energy_total.value;
    js["gamma_plus_total"] = run.gamma_total.value;
    js["partial"] = run.energy_total.partial || run.gamma_total.partial;
    js["flagged_rows"] = run.flagged_rows;
    js["fragment_count"] = run.fragments.fragments.size();
    js["gamma_min"] = run.gamma_min;
    js["gamma_min_is_default"] = !sc.gamma_min.has_value();
    run.summary = std::move(js);

    run.exit_code = run.flagged_rows > 0 ? 3 : 0;
    return run;
}

inline FilamentState state_from_scenario(const Scenario& sc) {
    ClosedCurve::Options opt;
    opt.kappa_tol = sc.kappa_tol;
    ClosedCurve curve = load_curve(sc.curve_path, opt);
    return FilamentState(std::move(curve), sc.constants, sc.f_spec, sc.k_of_ell, sc.grid_size);
}

/// Run the profile pipeline and write profile.csv, summary.json and
/// fragments.json into out_dir. With verify set, a seeded Monte Carlo
/// cross-check of the reduced integrals is appended to the summary (the
/// default artifact path stays fully deterministic). Returns the exit code
/// (0 clean, 3 when flagged rows are present).
inline int run_profile(const Scenario& sc, const std::filesystem::path& out_dir,
                       bool verify = false, std::uint64_t seed = 0) {
    const FilamentState state = state_from_scenario(sc);
    ProfileRun run = compute_profile_run(sc, state);

    if (verify) {
        nlohmann::ordered_json jv = nlohmann::ordered_json::array();
        const int n = state.grid_size();
        const std::size_t mc_samples = 200000;
        int checked = 0;
        for (int i = 0; i < n && checked < 4; i += n / 4, ++checked) {
            const auto& p = run.points[i];
            if (p.status != SampleFlag::ok) continue;
            const auto mc = mc_gamma_plus(p.beta.abs2(), p.k0, state.constants(),
                                          state.scales(), mc_samples, seed + checked);
            const double quad = run.gamma_plus.values[i];
            nlohmann::ordered_json entry;
            entry["s"] = run.gamma_plus.grid[i];
            entry["gamma_plus_quadrature"] = quad;
            entry["gamma_plus_mc"] = mc.value;
            entry["mc_std_error"] = mc.std_error;
            entry["within_3_sigma"] = std::abs(quad - mc.value) <= 3.0 * mc.std_error;
            jv.push_back(entry);
        }
        run.summary["verify"] = {{"seed", seed}, {"samples", mc_samples}, {"points", jv}};
    }

    std::filesystem::create_directories(out_dir);
    detail::atomic_write(out_dir / "profile.csv", run.profile_csv);
    detail::atomic_write(out_dir / "summary.json", run.summary.dump(2) + "\n");
    detail::atomic_write(out_dir / "fragments.json", run.fragments_json.dump(2) + "\n");
    return run.exit_code;
}

/// Disconnect-only entry point: same computation, fragments.json is the
/// main artifact.
inline int run_disconnect(const Scenario& sc, const std::filesystem::path& out_dir) {
    const FilamentState state = state_from_scenario(sc);
    ProfileRun run = compute_profile_run(sc, state);
    std::filesystem::create_directories(out_dir);
    detail::atomic_write(out_dir / "fragments.json", run.fragments_json.dump(2) + "\n");
    detail::atomic_write(out_dir / "profile.csv", run.profile_csv);
    return run.exit_code;
}

/// Sweep Gamma+ over a log-spaced family of circle radii and fit the
/// log-log slope. Refuses under-determined fits (fewer than 10 points).
inline int run_sweep(const Scenario& sc, const std::filesystem::path& out_dir) {
    if (sc.sweep.points < 10)
        throw ValidationError("sweep: need at least 10 points for the slope fit");
    const double r1 = sc.sweep.r_min_over_rf * sc.constants.Rf;
    const double r2 = sc.sweep.r_max_over_rf * sc.constants.Rf;
    const SlopeFit fit =
        asymptotic_exponent(sc.constants, r1, r2, sc.sweep.points, sc.sweep.k0);

    std::string csv = "R,gamma_plus\n";
    for (std::size_t i = 0; i < fit.radii.size(); ++i) {
        csv += detail::format_double(fit.radii[i]);
        csv += ',';
        csv += detail::format_double(fit.gamma_plus[i]);
        csv += '\n';
    }
    nlohmann::ordered_json js;
    js["slope"] = fit.slope;
    js["intercept"] = fit.intercept;
    js["std_error"] = fit.std_error;
    js["ci95"] = fit.ci95;
    js["narrow_range"] = fit.narrow_range;
    js["points"] = sc.sweep.points;
    js["r_min"] = r1;
    js["r_max"] = r2;
    js["k0"] = sc.sweep.k0;

    std::filesystem::create_directories(out_dir);
    detail::atomic_write(out_dir / "asymptotics.csv", csv);
    detail::atomic_write(out_dir / "sweep.json", js.dump(2) + "\n");
    return 0;
}

/// Flow the scenario ring through conditional time and report the result
/// plus the constraint residual as JSON.
inline nlohmann::ordered_json run_ring(const Scenario& sc) {
    if (!sc.ring) throw ValidationError("ring: scenario has no 'ring' block");
    const RingConfiguration& rc = sc.ring->config;
    rc.validate(sc.constants);
    const Vec3 p = momentum_from_ring(rc, sc.constants);
    const RingConfiguration flowed =
        conditional_time_flow(rc, p, sc.ring->t_sharp, sc.constants);

    auto vec_json = [](const Vec3& v) { return nlohmann::ordered_json::array({v.x, v.y, v.z}); };
    auto ring_json = [&](const RingConfiguration& r) {
        nlohmann::ordered_json j;
        j["radius"] = r.radius;
        j["center"] = vec_json(r.center);
        j["binormal"] = vec_json(r.b_hat);
        j["phase"] = r.phase;
        j["circulation"] = r.gamma;
        j["chi"] = r.chi(sc.constants);
        j["varpi"] = r.varpi(sc.constants);
        return j;
    };
    nlohmann::ordered_json j;
    j["t_sharp"] = sc.ring->t_sharp;
    j["initial"] = ring_json(rc);
    j["flowed"] = ring_json(flowed);
    j["momentum"] = vec_json(p);
    j["constraint_residual"] = constraint_residual(rc, sc.constants);
    j["hamiltonian_initial"] = ring_hamiltonian(rc, sc.constants);
    j["hamiltonian_flowed"] = ring_hamiltonian(flowed, sc.constants);
    return j;
}

/// Ring-spectrum table (k, n, R_n, Gamma_plus, E_n) as CSV.
inline std::string run_spectra_csv(const Scenario& sc) {
    std::string csv = "k,n,R_n,Gamma_plus,E_n\n";
    const auto& sp = sc.spectra;
    for (int ik = 0; ik < sp.k_count; ++ik) {
        const double k = sp.k_count == 1
                             ? sp.k_min
                             : sp.k_min + (sp.k_max - sp.k_min) * ik / (sp.k_count - 1);
        for (std::int64_t n = 0; n <= sp.n_max; ++n) {
            RingQuantumNumbers q{k, n, 1};
            csv += detail::format_double(k);
            csv += ',';
            csv += std::to_string(n);
            csv += ',';
            csv += detail::format_double(radius_eigenvalue(n, sc.constants));
            csv += ',';
            csv += detail::format_double(circulation_plus(k, n, sc.constants));
            csv += ',';
            csv += detail::format_double(energy_eigenvalue(q, sc.constants));
            csv += '\n';
        }
    }
    return csv;
}

} // namespace vortex
