// Command-line driver: run presets or config files, compare two runs, print derived data.

#include "droplet/coupling.hpp"
#include "droplet/error.hpp"
#include "droplet/frame.hpp"
#include "droplet/parallel.hpp"
#include "droplet/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace droplet;
using nlohmann::json;

namespace {

struct RunArgs {
    std::string preset;
    std::string config;
    std::string algorithm = "both";
    std::uint64_t seed = 42;
    bool seed_set = false;
    std::string out;
    std::size_t molecules = 0;
    int particles = 0;
};

ScenarioConfig resolve(const RunArgs& a)
{
    ScenarioConfig cfg = a.config.empty() ? preset(a.preset) : load_config(a.config);
    if (a.seed_set) {
        cfg.seed = a.seed;
    }
    if (a.molecules > 0) {
        cfg.molecules_per_cell = a.molecules;
    }
    if (a.particles > 0) {
        cfg.particles = a.particles;
    }
    cfg.validate();
    return cfg;
}

json metadata(const ScenarioConfig& cfg, const coupling::RunArtifacts& art, double seconds)
{
    json j;
    j["scenario"] = cfg.name;
    j["algorithm"] = physics::to_string(art.algorithm);
    j["seed"] = cfg.seed;
    j["domain"] = {cfg.a, cfg.b};
    j["liquid_interval"] = {cfg.liquid.lo, cfg.liquid.hi};
    j["particles"] = cfg.particles;
    if (art.algorithm == physics::Algorithm::II) {
        j["molecules_per_cell"] = cfg.molecules_per_cell;
    }
    j["t_end"] = cfg.t_end;
    json times = json::array();
    for (const auto& f : art.frames) {
        times.push_back(f.time);
    }
    j["frame_times"] = times;
    json kn = json::array();
    for (const auto& k : knudsen_numbers(cfg)) {
        kn.push_back({{"lo", k.lo}, {"hi", k.hi}, {"rho", k.rho}, {"lambda", k.lambda}, {"kn", k.kn}});
    }
    j["knudsen"] = kn;
    const auto tr = cfg.transport();
    j["transport"] = {{"T", cfg.reference_temperature()}, {"mu", tr.mu}, {"kappa", tr.kappa}};
    const auto& s = art.stats;
    j["stats"] = {{"steps", s.steps},
                  {"rejected_steps", s.rejected_steps},
                  {"min_dt", s.min_dt},
                  {"max_dt", s.max_dt},
                  {"inserted", s.inserted},
                  {"removed", s.removed},
                  {"max_molecules", s.max_molecules},
                  {"interface_hits", s.interface_hits},
                  {"inflow_molecules", s.inflow_molecules},
                  {"deleted_molecules", s.deleted_molecules},
                  {"subcycled_cells", s.subcycled_cells},
                  {"max_collision_probability", s.max_collision_probability}};
    j["wall_seconds"] = seconds;
    return j;
}

void write_history(const coupling::RunArtifacts& art, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    out.precision(17);
    out << "t,dt,x_L,x_R,u,p_L,p_R,T_L,T_R,liquid_energy\n";
    for (const auto& h : art.history) {
        out << h.t << ',' << h.dt << ',' << h.x_L << ',' << h.x_R << ',' << h.u << ',' << h.p_L << ',' << h.p_R
            << ',' << h.T_L << ',' << h.T_R << ',' << h.liquid_energy << '\n';
    }
}

int cmd_run(const RunArgs& a)
{
    const ScenarioConfig cfg = resolve(a);
    std::vector<physics::Algorithm> algs;
    if (a.algorithm == "I" || a.algorithm == "both") algs.push_back(physics::Algorithm::I);
    if (a.algorithm == "II" || a.algorithm == "both") algs.push_back(physics::Algorithm::II);
    for (auto alg : algs) {
        const fs::path dir = fs::path(a.out) / (std::string("alg") + physics::to_string(alg));
        fs::create_directories(dir);
        coupling::RunOptions opt;
        opt.log = [](const std::string& line) { std::cerr << line << '\n'; };
        const auto t0 = std::chrono::steady_clock::now();
        const auto art = coupling::run_algorithm(cfg, alg, opt);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (std::size_t k = 0; k < art.frames.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "frame_%03zu.csv", k);
            write_frame_csv(art.frames[k], dir / name);
        }
        write_history(art, dir / "history.csv");
        std::ofstream(dir / "metadata.json") << metadata(cfg, art, seconds).dump(2) << '\n';
        std::cerr << "wrote " << art.frames.size() << " frames to " << dir.string() << '\n';
    }
    return 0;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& report)
{
    const auto fa = read_run_dir(a);
    const auto fb = read_run_dir(b);
    const auto rep = compare_runs(fa, fb);
    const std::string text = format_report(rep);
    if (report.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(report, std::ios::binary);
        out << text;
        if (!out) {
            throw SolverError("cannot write report " + report);
        }
    }
    std::cout << (rep.all_pass() ? "all metrics within thresholds" : "some metrics above thresholds") << '\n';
    return 0;
}

int cmd_info(const RunArgs& a)
{
    const ScenarioConfig cfg = resolve(a);
    const auto tr = cfg.transport();
    std::cout << "scenario: " << cfg.name << '\n';
    std::cout << "domain: [" << cfg.a << ", " << cfg.b << "] m, droplet [" << cfg.liquid.lo << ", " << cfg.liquid.hi
              << "] m\n";
    int k = 1;
    for (const auto& e : knudsen_numbers(cfg)) {
        std::cout << "Kn[" << k++ << "] = " << e.kn << "  (rho = " << e.rho << " kg/m^3, lambda = " << e.lambda
                  << " m, L = " << cfg.characteristic_length() << " m)\n";
    }
    std::cout << "T_ref = " << cfg.reference_temperature() << " K\n";
    std::cout << "mu = " << tr.mu << " Pa s\n";
    std::cout << "kappa = " << tr.kappa << " W/(m K)\n";
    const auto summary = coupling::initial_summary(cfg);
    for (auto alg : {physics::Algorithm::I, physics::Algorithm::II}) {
        const auto b = physics::compute_time_step(summary, cfg.species, tr, cfg.liquid.species(), alg, cfg.safety);
        std::cout << "dt bounds (algorithm " << physics::to_string(alg) << "): convective " << b.convective
                  << " s, diffusive " << b.diffusive << " s, collision " << b.collision << " s -> dt " << b.dt
                  << " s\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Droplet in rarefied gas: kinetic and continuum coupled solvers"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "run a scenario and write frame CSVs");
    auto* src = run->add_option_group("source");
    src->add_option("--preset", run_args.preset, "preset name")
        ->check(CLI::IsMember(preset_names()));
    src->add_option("--config", run_args.config, "INI scenario file")->check(CLI::ExistingFile);
    src->require_option(1);
    run->add_option("--algorithm", run_args.algorithm, "I, II or both")
        ->check(CLI::IsMember({"I", "II", "both"}));
    run->add_option("--seed", run_args.seed, "RNG seed")->each([&](const std::string&) { run_args.seed_set = true; });
    run->add_option("--out", run_args.out, "output directory")->required();
    run->add_option("--molecules-per-cell", run_args.molecules, "DSMC molecules per cell of the densest region");
    run->add_option("--particles", run_args.particles, "number of particle spacings / base cells");

    std::string cmp_a, cmp_b, cmp_report;
    auto* compare = app.add_subcommand("compare", "relative differences between two runs");
    compare->add_option("--a", cmp_a, "reference run directory")->required()->check(CLI::ExistingDirectory);
    compare->add_option("--b", cmp_b, "second run directory")->required()->check(CLI::ExistingDirectory);
    compare->add_option("--report", cmp_report, "report CSV path (stdout if omitted)");

    RunArgs info_args;
    auto* info = app.add_subcommand("info", "print Knudsen numbers, transport coefficients and time-step bounds");
    auto* isrc = info->add_option_group("source");
    isrc->add_option("--preset", info_args.preset, "preset name")->check(CLI::IsMember(preset_names()));
    isrc->add_option("--config", info_args.config, "INI scenario file")->check(CLI::ExistingFile);
    isrc->require_option(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (*run) return cmd_run(run_args);
        if (*compare) return cmd_compare(cmp_a, cmp_b, cmp_report);
        if (*info) return cmd_info(info_args);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
