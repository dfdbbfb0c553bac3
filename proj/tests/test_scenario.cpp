#include "droplet/error.hpp"
#include "droplet/frame.hpp"
#include "droplet/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace droplet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("droplet_test_scenario_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

OutputFrame sample_frame(double t, unsigned seed)
{
    const auto grid = comparison_grid(0.0, 1e-4);
    GasSamples gas;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double x = (k + 0.5) * 5e-7;
        if (x > 4e-5 && x < 6e-5) {
            continue;
        }
        gas.x.push_back(x);
        gas.rho.push_back(1.226 * (1.0 + 0.1 * uni(rng)));
        gas.p.push_back(1e5 * (1.0 + 0.1 * uni(rng)));
        gas.u.push_back(50.0 * uni(rng) + 1.0 / 3.0);
        gas.T.push_back(392.2 + 10.0 * uni(rng));
    }
    LiquidSamples liq{{4e-5, 5e-5, 6e-5}, {298.0, 299.0, 300.0}, 100.0, 1e5, 1.2e5, 1000.0};
    auto f = build_frame(grid, 4e-5, 6e-5, gas, liq);
    f.time = t;
    f.algorithm = "II";
    f.scenario = "test1a";
    f.seed = 42;
    f.kn = {0.0045};
    return f;
}

} // namespace

TEST_CASE("presets")
{
    CHECK(preset_names().size() == 6);
    for (const auto& name : preset_names()) {
        const auto c = preset(name);
        CHECK(c.name == name);
        CHECK_NOTHROW(c.validate());
        CHECK(c.particles == 200);
    }
    CHECK_THROWS_AS(preset("test9"), ConfigError);

    const auto t1 = preset("test1a");
    CHECK(t1.liquid.lo == 4e-5);
    CHECK(t1.liquid.hi == 6e-5);
    CHECK(t1.liquid.u == 100.0);
    CHECK(t1.liquid.p == 1e5);
    CHECK(t1.t_end == 5.2e-8);
    CHECK(t1.gas.front().T == doctest::Approx(392.2).epsilon(1e-3));
    CHECK(t1.reference_temperature() == doctest::Approx(392.2).epsilon(1e-3));
    CHECK(preset("test2a").reference_temperature() == doctest::Approx(297.8).epsilon(1e-3));
    CHECK(preset("test2b").liquid.rho_l == 10.0);
    CHECK(preset("test3").output_times.size() == 3);
}

TEST_CASE("Knudsen numbers of the presets")
{
    auto kn = [](const char* name, std::size_t region) { return knudsen_numbers(preset(name)).at(region).kn; };
    CHECK(kn("test1a", 0) == doctest::Approx(0.0045).epsilon(0.02));
    CHECK(kn("test1b", 0) == doctest::Approx(0.045).epsilon(0.02));
    CHECK(kn("test1c", 0) == doctest::Approx(0.45).epsilon(0.02));
    CHECK(kn("test3", 0) == doctest::Approx(0.011).epsilon(0.02));
    CHECK(kn("test3", 1) == doctest::Approx(0.044).epsilon(0.02));
    // lambda rho is a gas constant, so Kn scales as 1/(rho L)
    const auto k2 = knudsen_numbers(preset("test2a"));
    REQUIRE(k2.size() == 2);
    CHECK(k2[0].kn * 2.214 == doctest::Approx(k2[1].kn * 1.58317).epsilon(1e-12));
}

TEST_CASE("config files")
{
    const auto dir = scratch("ini");
    const auto path = dir / "case.ini";
    {
        std::ofstream out(path);
        out << "[scenario]\nbase = test1a\nseed = 7\nmolecules_per_cell = 300\noutput_times = 1e-8, 5.2e-8\n"
               "[liquid]\nu = 50\n[numerics]\ncfl = 0.4\n";
    }
    const auto c = load_config(path);
    CHECK(c.seed == 7);
    CHECK(c.molecules_per_cell == 300);
    CHECK(c.liquid.u == 50.0);
    CHECK(c.output_times == std::vector<double>{1e-8, 5.2e-8});
    CHECK(c.safety.cfl == 0.4);
    CHECK(c.liquid.lo == 4e-5);

    {
        std::ofstream out(path);
        out << "[scenario]\nname = custom\nt_end = 1e-9\noutput_times = 1e-9\n[domain]\na = 0\nb = 1e-5\n"
               "[liquid]\nlo = 4e-6\nhi = 6e-6\nT = 300\np = 1e5\n"
               "[gas1]\nlo = 0\nhi = 1e-5\nrho = 1.0\np = 1e5\n"
               "[boundary_left]\ntype = wall\nT = 300\n[boundary_right]\ntype = open\nrho = 1\nT = 300\n";
    }
    const auto d = load_config(path);
    CHECK(d.name == "custom");
    CHECK(d.gas.size() == 1);
    CHECK(d.gas[0].T == doctest::Approx(1e5 / (1.0 * d.species.R)).epsilon(1e-12));
    CHECK(d.right.kind == BoundaryKind::Open);

    {
        std::ofstream out(path);
        out << "[scenario]\nbase = test1a\n[boundary_left]\ntype = sticky\n";
    }
    CHECK_THROWS_AS(load_config(path), ConfigError);
    {
        std::ofstream out(path);
        out << "[scenario]\nbase = test1a\n[domain]\nb = 3e-5\n";
    }
    CHECK_THROWS_AS(load_config(path), ConfigError);
    CHECK_THROWS_AS(load_config(dir / "missing.ini"), ConfigError);
}

TEST_CASE("output frames")
{
    SUBCASE("initial test1a frame")
    {
        const auto f = sample_frame(0.0, 1);
        CHECK(f.size() == 200);
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f.phase[i] == fpm::Phase::Liquid) {
                CHECK(f.u[i] == 100.0);
                CHECK(f.x[i] >= 4e-5);
                CHECK(f.x[i] <= 6e-5);
                CHECK(f.rho[i] == 1000.0);
            }
        }
    }

    SUBCASE("constant samples stay constant")
    {
        const auto grid = comparison_grid(0.0, 1e-4);
        GasSamples gas;
        for (double x : {1e-6, 7e-6, 3e-5, 7e-5, 9.9e-5}) {
            gas.x.push_back(x);
            gas.rho.push_back(1.5);
            gas.p.push_back(9e4);
            gas.u.push_back(-3.0);
            gas.T.push_back(310.0);
        }
        LiquidSamples liq{{4e-5, 6e-5}, {298.0, 298.0}, 0.0, 1e5, 1e5, 1000.0};
        const auto f = build_frame(grid, 4e-5, 6e-5, gas, liq);
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f.phase[i] == fpm::Phase::Gas) {
                CHECK(f.rho[i] == 1.5);
                CHECK(f.p[i] == 9e4);
                CHECK(f.u[i] == -3.0);
                CHECK(f.T[i] == 310.0);
            } else {
                CHECK(f.p[i] == doctest::Approx(1e5).epsilon(1e-15));
            }
        }
    }

    SUBCASE("interpolation is monotone between samples")
    {
        const auto grid = comparison_grid(0.0, 1e-4);
        GasSamples gas;
        for (double x : {0.0, 2e-5, 3.9e-5, 6.1e-5, 1e-4}) {
            gas.x.push_back(x);
            gas.rho.push_back(1.0 + x * 1e4);
            gas.p.push_back(1e5);
            gas.u.push_back(0.0);
            gas.T.push_back(300.0);
        }
        LiquidSamples liq{{4e-5, 6e-5}, {298.0, 298.0}, 0.0, 1e5, 1e5, 1000.0};
        const auto f = build_frame(grid, 4e-5, 6e-5, gas, liq);
        for (std::size_t i = 0; i + 1 < f.size(); ++i) {
            if (f.phase[i] == fpm::Phase::Gas && f.phase[i + 1] == fpm::Phase::Gas) {
                CHECK(f.rho[i + 1] >= f.rho[i]);
            }
        }
    }

    SUBCASE("errors")
    {
        CHECK_THROWS_AS(comparison_grid(0.0, 1.0, 0), DomainError);
        CHECK_THROWS_AS(comparison_grid(1.0, 1.0), DomainError);
        GasSamples gas;
        LiquidSamples liq{{4e-5, 6e-5}, {298.0, 298.0}, 0.0, 1e5, 1e5, 1000.0};
        CHECK_THROWS_AS(build_frame({}, 4e-5, 6e-5, gas, liq), SolverError);
        CHECK_THROWS_AS(write_frame_csv(OutputFrame{}, scratch("empty") / "f.csv"), SolverError);
    }
}

TEST_CASE("frame CSV round trip")
{
    const auto dir = scratch("csv");
    const auto f = sample_frame(5.2e-8, 3);
    write_frame_csv(f, dir / "frame_000.csv");
    const auto g = read_frame_csv(dir / "frame_000.csv");
    CHECK(g.time == f.time);
    CHECK(g.algorithm == f.algorithm);
    CHECK(g.scenario == f.scenario);
    CHECK(g.seed == f.seed);
    CHECK(g.x_L == f.x_L);
    CHECK(g.x_R == f.x_R);
    CHECK(g.kn == f.kn);
    CHECK(g.x == f.x);
    CHECK(g.rho == f.rho);
    CHECK(g.p == f.p);
    CHECK(g.u == f.u);
    CHECK(g.T == f.T);
    CHECK(g.phase == f.phase);

    write_frame_csv(sample_frame(1e-8, 4), dir / "frame_001.csv");
    const auto run = read_run_dir(dir);
    REQUIRE(run.size() == 2);
    CHECK(run[0].time == 5.2e-8);
    CHECK_THROWS_AS(read_run_dir(scratch("nothing")), SolverError);
    {
        std::ofstream out(dir / "bad.csv");
        out << "# time = 0\nx,rho,p,u,T,phase\n1,2,3\n";
    }
    CHECK_THROWS_AS(read_frame_csv(dir / "bad.csv"), SolverError);
}

TEST_CASE("run comparison")
{
    const auto a = sample_frame(5.2e-8, 5);

    SUBCASE("identical frames")
    {
        const auto r = compare_runs({a}, {a});
        CHECK(r.all_pass());
        for (const auto& m : r.metrics) {
            CHECK(m.l1 == 0.0);
            CHECK(m.linf == 0.0);
        }
    }

    SUBCASE("one percent pressure offset")
    {
        auto b = a;
        for (auto& p : b.p) {
            p *= 1.01;
        }
        const auto r = compare_runs({a}, {b});
        CHECK(r.find("p", 5.2e-8).l1 == doctest::Approx(0.01).epsilon(1e-10));
        CHECK(r.find("p", 5.2e-8).linf == doctest::Approx(0.01).epsilon(1e-10));
        CHECK(r.find("rho", 5.2e-8).l1 == 0.0);
        CHECK(r.find("p", 5.2e-8).pass);
        for (auto& p : b.p) {
            p *= 1.05;
        }
        CHECK_FALSE(compare_runs({a}, {b}).all_pass());
    }

    SUBCASE("interface points are excluded")
    {
        const auto mask = comparison_mask(a, a);
        std::size_t gas = 0;
        std::size_t kept = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            gas += a.phase[i] == fpm::Phase::Gas;
            kept += mask[i];
        }
        CHECK(kept == gas - 6);
        // a change confined to the excluded points is invisible
        auto b = a;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a.phase[i] == fpm::Phase::Gas && !mask[i]) {
                b.T[i] += 100.0;
            }
        }
        CHECK(compare_runs({a}, {b}).find("T", 5.2e-8).l1 == 0.0);
    }

    SUBCASE("mismatches")
    {
        auto b = a;
        b.time = 1e-8;
        CHECK_THROWS_AS(compare_runs({a}, {b}), SolverError);
        CHECK_THROWS_AS(compare_runs({a}, {a, a}), SolverError);
        auto c = a;
        c.x[10] += 1e-9;
        CHECK_THROWS_AS(compare_runs({a}, {c}), SolverError);
    }
}

TEST_CASE("interfacial temperature jump")
{
    const auto f = sample_frame(0.0, 6);
    double expect = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        if (f.phase[i] != f.phase[i + 1]) {
            expect = std::max(expect, std::abs(f.T[i] - f.T[i + 1]));
        }
    }
    CHECK(expect > 0.0);
    CHECK(temperature_jump(f) == expect);
}
