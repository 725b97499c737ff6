#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vortex/pipeline.hpp"

using namespace vortex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("vortex_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kCircleCurve = R"({
  "harmonics": 1,
  "ax": [0.0, 2.0], "bx": [0.0, 0.0],
  "ay": [0.0, 0.0], "by": [0.0, 2.0],
  "az": [0.0, 0.0], "bz": [0.0, 0.0]
})";

const char* kEllipseCurve = R"({
  "harmonics": 1,
  "ax": [0.0, 20.0], "bx": [0.0, 0.0],
  "ay": [0.0, 0.0], "by": [0.0, 10.0],
  "az": [0.0, 0.0], "bz": [0.0, 0.0]
})";

// scaled planar curve whose curvature touches zero at u = pi (c = 1/4)
std::string flex_curve_json(double c, double scale) {
    std::ostringstream ss;
    ss << R"({"harmonics": 2,)"
       << "\"ax\": [0.0, " << scale << ", " << scale * c << "], \"bx\": [0.0, 0.0, 0.0],"
       << "\"ay\": [0.0, 0.0, 0.0], \"by\": [0.0, " << scale << ", " << scale * c << "],"
       << "\"az\": [0.0, 0.0, 0.0], \"bz\": [0.0, 0.0, 0.0]}";
    return ss.str();
}

std::string scenario_json(const std::string& curve_file, const std::string& extra = "") {
    return std::string(R"({"constants": "unit", "curve": ")") + curve_file +
           R"(", "f": {"family": "uniform"}, "k_of_ell": {"a0": 1.0}, "grid_size": 256)" +
           extra + "}";
}

} // namespace

TEST_CASE("scenario validation") {
    TempDir dir;
    write_file(dir.path / "curve.json", kCircleCurve);

    SECTION("well-formed scenario loads") {
        write_file(dir.path / "sc.json", scenario_json("curve.json"));
        const Scenario sc = load_scenario(dir.path / "sc.json");
        CHECK(sc.grid_size == 256);
        CHECK_THAT(sc.kappa_tol, WithinRel(1e-6, 1e-12)); // default 1e-6 / Rf
    }
    SECTION("missing curve file is rejected") {
        write_file(dir.path / "sc.json", scenario_json("nope.json"));
        CHECK_THROWS_AS(load_scenario(dir.path / "sc.json"), ValidationError);
    }
    SECTION("grid below 64 is rejected") {
        write_file(dir.path / "sc.json",
                   R"({"constants": "unit", "curve": "curve.json", "grid_size": 32})");
        CHECK_THROWS_AS(load_scenario(dir.path / "sc.json"), ValidationError);
    }
    SECTION("unknown scenario keys are rejected") {
        write_file(dir.path / "sc.json",
                   R"({"constants": "unit", "curve": "curve.json", "grid": 128})");
        CHECK_THROWS_WITH(load_scenario(dir.path / "sc.json"),
                          Catch::Matchers::ContainsSubstring("grid"));
    }
    SECTION("curve schema: wrong array length rejected") {
        write_file(dir.path / "bad.json",
                   R"({"harmonics": 2, "ax": [0.0, 2.0], "bx": [0,0,0],
                       "ay": [0,0,0], "by": [0,0,0], "az": [0,0,0], "bz": [0,0,0]})");
        write_file(dir.path / "sc.json", scenario_json("bad.json"));
        CHECK_THROWS_AS(load_scenario(dir.path / "sc.json"), ValidationError);
    }
}

TEST_CASE("circle profile: constant columns, one closed fragment, determinism") {
    TempDir dir;
    write_file(dir.path / "curve.json", kCircleCurve);
    write_file(dir.path / "sc.json", scenario_json("curve.json"));
    const Scenario sc = load_scenario(dir.path / "sc.json");

    const int code1 = run_profile(sc, dir.path / "out1");
    const int code2 = run_profile(sc, dir.path / "out2");
    CHECK(code1 == 0);
    CHECK(code2 == 0);

    const std::string csv1 = read_file(dir.path / "out1" / "profile.csv");
    const std::string csv2 = read_file(dir.path / "out2" / "profile.csv");
    CHECK(csv1 == csv2); // byte-identical rerun
    CHECK(csv1.substr(0, csv1.find('\n')) ==
          "s,R,ell,beta_abs,gamma_plus,gamma_signed,energy_density,w_perp,flags");

    const auto summary = nlohmann::json::parse(read_file(dir.path / "out1" / "summary.json"));
    CHECK(summary.at("fragment_count").get<int>() == 1);
    CHECK(summary.at("flagged_rows").get<int>() == 0);
    CHECK(summary.at("partial").get<bool>() == false);

    const auto frags = nlohmann::json::parse(read_file(dir.path / "out1" / "fragments.json"));
    REQUIRE(frags.at("fragments").size() == 1);
    CHECK(frags.at("fragments")[0].at("closed_loop").get<bool>() == true);
    CHECK(frags.at("cuts").empty());

    // constant columns: gamma_plus spread within 1e-10 relative
    const FilamentState state = state_from_scenario(sc);
    const ProfileRun run = compute_profile_run(sc, state);
    double lo = 1e300, hi = -1e300;
    for (double v : run.gamma_plus.values) { lo = std::min(lo, v); hi = std::max(hi, v); }
    CHECK((hi - lo) / hi < 1e-10);
}

TEST_CASE("sub-quantum circle: flagged rows, exit code 3, partial output") {
    TempDir dir;
    // unit constants: R0 = sqrt(1.5) > 1, so a unit circle cannot be represented
    write_file(dir.path / "curve.json", R"({
      "harmonics": 1,
      "ax": [0.0, 1.0], "bx": [0.0, 0.0],
      "ay": [0.0, 0.0], "by": [0.0, 1.0],
      "az": [0.0, 0.0], "bz": [0.0, 0.0]})");
    write_file(dir.path / "sc.json", scenario_json("curve.json"));
    const Scenario sc = load_scenario(dir.path / "sc.json");
    CHECK(run_profile(sc, dir.path / "out") == 3);
    const auto summary = nlohmann::json::parse(read_file(dir.path / "out" / "summary.json"));
    CHECK(summary.at("flagged_rows").get<int>() == 256);
    CHECK(summary.at("partial").get<bool>() == true);
    const std::string csv = read_file(dir.path / "out" / "profile.csv");
    CHECK(csv.find("subquantum") != std::string::npos);
}

TEST_CASE("ellipse profile: larger circulation where the radius is smaller") {
    TempDir dir;
    write_file(dir.path / "curve.json", kEllipseCurve);
    write_file(dir.path / "sc.json", scenario_json("curve.json"));
    const Scenario sc = load_scenario(dir.path / "sc.json");
    const FilamentState state = state_from_scenario(sc);
    const ProfileRun run = compute_profile_run(sc, state);

    for (int i = 0; i < state.grid_size(); i += 17)
        for (int j = i + 9; j < state.grid_size(); j += 31) {
            const double ri = run.points[i].frame.radius;
            const double rj = run.points[j].frame.radius;
            const double gi = run.gamma_plus.values[i];
            const double gj = run.gamma_plus.values[j];
            if (ri < rj * (1.0 - 1e-9)) CHECK(gi > gj);
            if (rj < ri * (1.0 - 1e-9)) CHECK(gj > gi);
        }
}

TEST_CASE("disconnect: flex family produces exactly one cut at the flex location") {
    TempDir dir;
    write_file(dir.path / "curve.json", flex_curve_json(0.25, 10.0));
    write_file(dir.path / "sc.json",
               scenario_json("curve.json",
                             R"(, "thresholds": {"kappa_tol": 1e-4}, "grid_size": 512)"));
    // grid_size appears twice -> strict validation rejects; write cleanly
    write_file(dir.path / "sc.json",
               R"({"constants": "unit", "curve": "curve.json",
                   "f": {"family": "uniform"}, "k_of_ell": {"a0": 1.0},
                   "grid_size": 512, "thresholds": {"kappa_tol": 1e-4}})");
    const Scenario sc = load_scenario(dir.path / "sc.json");
    const FilamentState state = state_from_scenario(sc);
    const ProfileRun run = compute_profile_run(sc, state);

    REQUIRE(run.fragments.cuts.size() == 1);
    REQUIRE(run.fragments.fragments.size() == 1);
    CHECK(!run.fragments.fragments[0].closed_loop);
    // the cut covers the curvature zero at u = pi
    const double s_pi = state.curve().s_from_u(M_PI);
    const auto& cut = run.fragments.cuts[0];
    CHECK(cut.begin < s_pi);
    CHECK(cut.end > s_pi);
    CHECK(cut.reason.find("flex") != std::string::npos);

    // cut length + fragment length = S
    const double S = state.curve().total_length();
    const double total = (cut.end - cut.begin) +
                         (run.fragments.fragments[0].s_end - run.fragments.fragments[0].s_begin);
    CHECK_THAT(total, WithinRel(S, 1e-10));
}

TEST_CASE("disconnect: two sign zeros of k give two cuts as gamma_min -> 0+") {
    TempDir dir;
    write_file(dir.path / "curve.json", kEllipseCurve);
    write_file(dir.path / "sc.json",
               R"({"constants": "unit", "curve": "curve.json",
                   "f": {"family": "uniform"},
                   "k_of_ell": {"a0": 0.0, "a": [1.0]},
                   "grid_size": 512,
                   "thresholds": {"gamma_min": 1e-12}})");
    const Scenario sc = load_scenario(dir.path / "sc.json");
    const FilamentState state = state_from_scenario(sc);
    const ProfileRun run = compute_profile_run(sc, state);

    CHECK(run.fragments.cuts.size() == 2);
    CHECK(run.fragments.fragments.size() == 2);
    int flips = 0;
    const int n = static_cast<int>(run.gamma_signed.values.size());
    for (int i = 0; i < n; ++i) {
        const double a = run.gamma_signed.values[i], b = run.gamma_signed.values[(i + 1) % n];
        if ((a > 0 && b < 0) || (a < 0 && b > 0)) ++flips;
    }
    CHECK(flips == 2);
    // zero-width cuts at the k zeros; fragments partition the loop
    double frag_len = 0.0, cut_len = 0.0;
    for (const auto& f : run.fragments.fragments) frag_len += f.s_end - f.s_begin;
    for (const auto& cc : run.fragments.cuts) cut_len += cc.end - cc.begin;
    CHECK_THAT(frag_len + cut_len, WithinRel(state.curve().total_length(), 1e-10));
}

TEST_CASE("disconnect: whole loop below threshold reports an empty fragment set") {
    TempDir dir;
    write_file(dir.path / "curve.json", kCircleCurve);
    write_file(dir.path / "sc.json",
               R"({"constants": "unit", "curve": "curve.json",
                   "f": {"family": "uniform"}, "k_of_ell": {"a0": 1.0},
                   "grid_size": 128, "thresholds": {"gamma_min": 1e10}})");
    const Scenario sc = load_scenario(dir.path / "sc.json");
    const FilamentState state = state_from_scenario(sc);
    const ProfileRun run = compute_profile_run(sc, state);
    CHECK(run.fragments.fragments.empty());
    CHECK(!run.fragments.note.empty());
}

TEST_CASE("sweep: refuses underdetermined fits and flags narrow ranges") {
    TempDir dir;
    write_file(dir.path / "curve.json", kCircleCurve);

    write_file(dir.path / "sc3.json",
               R"({"constants": "unit", "curve": "curve.json",
                   "sweep": {"points": 3}})");
    CHECK_THROWS_AS(run_sweep(load_scenario(dir.path / "sc3.json"), dir.path / "out"),
                    ValidationError);

    write_file(dir.path / "sc_narrow.json",
               R"({"constants": "unit", "curve": "curve.json",
                   "sweep": {"r_min_over_rf": 100.0, "r_max_over_rf": 200.0, "points": 12}})");
    CHECK(run_sweep(load_scenario(dir.path / "sc_narrow.json"), dir.path / "outn") == 0);
    const auto narrow = nlohmann::json::parse(read_file(dir.path / "outn" / "sweep.json"));
    CHECK(narrow.at("narrow_range").get<bool>() == true);

    write_file(dir.path / "sc.json",
               R"({"constants": "unit", "curve": "curve.json",
                   "sweep": {"r_min_over_rf": 100.0, "r_max_over_rf": 10000.0, "points": 40}})");
    CHECK(run_sweep(load_scenario(dir.path / "sc.json"), dir.path / "out") == 0);
    const auto sweep = nlohmann::json::parse(read_file(dir.path / "out" / "sweep.json"));
    const double slope = sweep.at("slope").get<double>();
    CHECK(slope > -2.05);
    CHECK(slope < -1.95);
    CHECK(sweep.at("narrow_range").get<bool>() == false);
    // asymptotics.csv holds points of the fitted family
    const std::string csv = read_file(dir.path / "out" / "asymptotics.csv");
    CHECK(csv.substr(0, csv.find('\n')) == "R,gamma_plus");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
}

TEST_CASE("ring runner: constraint residual and conserved Hamiltonian") {
    TempDir dir;
    write_file(dir.path / "curve.json", kCircleCurve);
    write_file(dir.path / "sc.json",
               R"({"constants": "unit", "curve": "curve.json",
                   "ring": {"radius": 2.0, "circulation": 0.8, "phase": 0.3,
                            "t_sharp": 1.5}})");
    const auto j = run_ring(load_scenario(dir.path / "sc.json"));
    CHECK(j.at("constraint_residual").get<double>() < 1e-12);
    CHECK_THAT(j.at("hamiltonian_flowed").get<double>(),
               WithinRel(j.at("hamiltonian_initial").get<double>(), 1e-13));
    CHECK_THAT(j.at("flowed").at("radius").get<double>(), WithinRel(2.0, 1e-15));
}

TEST_CASE("spectra CSV: schema and substitution row") {
    TempDir dir;
    write_file(dir.path / "curve.json", kCircleCurve);
    write_file(dir.path / "sc.json",
               R"({"constants": "unit", "curve": "curve.json",
                   "spectra": {"k_min": 1.0, "k_max": 1.0, "k_count": 1, "n_max": 0}})");
    const std::string csv = run_spectra_csv(load_scenario(dir.path / "sc.json"));
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "k,n,R_n,Gamma_plus,E_n");
    double k, rn, gp, en;
    int n;
    REQUIRE(std::sscanf(row.c_str(), "%lf,%d,%lf,%lf,%lf", &k, &n, &rn, &gp, &en) == 5);
    CHECK_THAT(rn, WithinRel(std::sqrt(1.5), 1e-12));
    CHECK_THAT(gp, WithinRel(1.0 / (1.5 * M_PI), 1e-12));
    CHECK_THAT(en, WithinRel(1.0 / (9.0 * M_PI * M_PI), 1e-12));
}

TEST_CASE("verify path appends the Monte Carlo cross-check to the summary") {
    TempDir dir;
    write_file(dir.path / "curve.json", kCircleCurve);
    write_file(dir.path / "sc.json", scenario_json("curve.json", ", \"grid_size\": 64"));
    write_file(dir.path / "sc.json",
               R"({"constants": "unit", "curve": "curve.json",
                   "f": {"family": "uniform"}, "k_of_ell": {"a0": 1.0}, "grid_size": 64})");
    const Scenario sc = load_scenario(dir.path / "sc.json");
    CHECK(run_profile(sc, dir.path / "out", true, 12345) == 0);
    const auto summary = nlohmann::json::parse(read_file(dir.path / "out" / "summary.json"));
    REQUIRE(summary.contains("verify"));
    for (const auto& pt : summary.at("verify").at("points"))
        CHECK(pt.at("within_3_sigma").get<bool>() == true);
}
