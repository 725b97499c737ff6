// vortex-spectra: ring-vortex spectra, filament profiles, disconnection and
// asymptotics driven by a JSON scenario file.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure (profile
// rows flagged flex / sub-quantum).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "vortex/vortex.hpp"

namespace {

vortex::Scenario load(const std::string& path) { return vortex::load_scenario(path); }

std::filesystem::path resolve_out(const vortex::Scenario& sc, const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    if (!sc.output_dir.empty()) return sc.output_dir;
    return ".";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum vortex filament spectra and profiles"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    bool verify = false;
    std::uint64_t seed = 0;
    app.add_option("--scenario", scenario_path, "scenario JSON file")->required();
    app.add_option("--out", out_dir, "output directory (overrides scenario output_dir)");
    app.add_flag("--verify", verify, "run the seeded Monte Carlo cross-check");
    app.add_option("--seed", seed, "seed for --verify");

    auto* cmd_spectra = app.add_subcommand("spectra", "ring eigenvalue table as CSV");
    auto* cmd_ring = app.add_subcommand("ring", "flow a ring configuration, print JSON");
    auto* cmd_profile = app.add_subcommand("profile", "filament profile CSV + summary");
    auto* cmd_disconnect = app.add_subcommand("disconnect", "cut the loop into fragments");
    auto* cmd_sweep = app.add_subcommand("sweep", "large-radius asymptotics of Gamma+");
    for (auto* sub : {cmd_spectra, cmd_ring, cmd_profile, cmd_disconnect, cmd_sweep})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        const vortex::Scenario sc = load(scenario_path);
        const std::filesystem::path out = resolve_out(sc, out_dir);

        if (cmd_spectra->parsed()) {
            const std::string csv = vortex::run_spectra_csv(sc);
            if (out_dir.empty() && sc.output_dir.empty()) {
                std::cout << csv;
            } else {
                std::filesystem::create_directories(out);
                vortex::detail::atomic_write(out / "spectra.csv", csv);
            }
            return 0;
        }
        if (cmd_ring->parsed()) {
            const auto j = vortex::run_ring(sc);
            std::cout << j.dump(2) << "\n";
            if (!out_dir.empty() || !sc.output_dir.empty()) {
                std::filesystem::create_directories(out);
                vortex::detail::atomic_write(out / "ring.json", j.dump(2) + "\n");
            }
            return 0;
        }
        if (cmd_profile->parsed()) return vortex::run_profile(sc, out, verify, seed);
        if (cmd_disconnect->parsed()) return vortex::run_disconnect(sc, out);
        if (cmd_sweep->parsed()) return vortex::run_sweep(sc, out);
    } catch (const vortex::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const vortex::GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return 2;
    } catch (const vortex::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
