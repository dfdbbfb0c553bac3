#include "droplet/error.hpp"
#include "droplet/fpm.hpp"
#include "droplet/liquid.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace droplet;
using namespace droplet::liquid;
using fpm::FpmParticleSet;
using fpm::Phase;

namespace {

const physics::LiquidSpecies kWater = physics::LiquidSpecies::water();

// n+1 liquid particles on [x0, x0 + n dx] at temperature T.
FpmParticleSet droplet_line(int n, double x0, double dx, double T)
{
    FpmParticleSet s;
    s.dx0 = dx;
    s.h = 3.0 * dx;
    for (int i = 0; i <= n; ++i) {
        s.push_back(x0 + i * dx, kWater.rho_l, 0.0, T, 1e5, Phase::Liquid);
    }
    return s;
}

// Explicit central differences for T_t = D T_xx with Dirichlet ends, on a grid m times finer.
std::vector<double> fd_reference(int n, double dx, double T0, double Tl, double Tr, double t_end, int m)
{
    const int N = n * m;
    const double h = dx / m;
    const double D = kWater.diffusivity();
    const int steps = static_cast<int>(std::ceil(t_end / (0.2 * h * h / D)));
    const double dt = t_end / steps;
    std::vector<double> T(N + 1, T0), next(N + 1);
    T.front() = Tl;
    T.back() = Tr;
    for (int s = 0; s < steps; ++s) {
        next = T;
        for (int i = 1; i < N; ++i) {
            next[i] = T[i] + dt * D * (T[i - 1] - 2.0 * T[i] + T[i + 1]) / (h * h);
        }
        T.swap(next);
    }
    std::vector<double> coarse(n + 1);
    for (int i = 0; i <= n; ++i) {
        coarse[i] = T[i * m];
    }
    return coarse;
}

} // namespace

TEST_CASE("linear droplet pressure")
{
    CHECK(liquid_pressure_field(1e5, 2e5, 0.0, 1.0, 0.5) == doctest::Approx(1.5e5).epsilon(1e-14));
    CHECK(liquid_pressure_field(1e5, 2e5, 0.0, 1.0, 0.0) == 1e5);
    CHECK(liquid_pressure_field(1e5, 2e5, 0.0, 1.0, 1.0) == 2e5);
    CHECK(liquid_pressure_field(3e4, 9e4, 1e-5, 1.2e-5, 1.1e-5) == doctest::Approx(6e4).epsilon(1e-12));
    // second difference of a linear profile
    const double a = liquid_pressure_field(1.3e5, 0.7e5, 2e-6, 7e-6, 3e-6);
    const double b = liquid_pressure_field(1.3e5, 0.7e5, 2e-6, 7e-6, 4e-6);
    const double c = liquid_pressure_field(1.3e5, 0.7e5, 2e-6, 7e-6, 5e-6);
    CHECK(std::abs(a - 2.0 * b + c) < 1e-9);
    CHECK_THROWS_AS(liquid_pressure_field(1e5, 2e5, 1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(liquid_pressure_field(1e5, 2e5, 2.0, 1.0, 1.5), DomainError);
}

TEST_CASE("droplet velocity update")
{
    const double rho = kWater.rho_l;
    CHECK(liquid_velocity_update(0.0, 1e-9, 1e5, 1e5, 0.0, 1e-6, rho) == 0.0);
    // higher pressure on the right decelerates
    CHECK(liquid_velocity_update(100.0, 1e-9, 1e5, 2e5, 0.0, 1e-6, rho) < 100.0);
    CHECK(liquid_velocity_update(0.0, 1e-9, 2e5, 1e5, 0.0, 1e-6, rho) > 0.0);
    CHECK(liquid_velocity_update(10.0, 2e-9, 1e5, 1.5e5, 1e-6, 3e-6, rho) ==
          doctest::Approx(10.0 - 2e-9 / rho * 0.5e5 / 2e-6).epsilon(1e-14));
    CHECK_THROWS_AS(liquid_velocity_update(0.0, 1e-9, 1e5, 1e5, 1e-6, 1e-6, rho), DomainError);
}

TEST_CASE("liquid heat conduction")
{
    const int n = 20;
    const double dx = 5e-7;
    const double D = kWater.diffusivity();
    const double dt = 0.2 * dx * dx / D;

    SUBCASE("uniform temperature is unchanged")
    {
        auto s = droplet_line(n, 1e-5, dx, 298.0);
        for (int k = 0; k < 50; ++k) {
            liquid_temperature_step(s, 298.0, 298.0, dt, kWater);
        }
        for (double T : s.T) {
            CHECK(T == doctest::Approx(298.0).epsilon(1e-13));
        }
    }

    SUBCASE("linear profile is steady")
    {
        auto s = droplet_line(n, 1e-5, dx, 0.0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            s.T[i] = 300.0 + 40.0 * i / n;
        }
        const auto T0 = s.T;
        for (int k = 0; k < 50; ++k) {
            liquid_temperature_step(s, 300.0, 340.0, dt, kWater);
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(s.T[i] == doctest::Approx(T0[i]).epsilon(1e-11));
        }
    }

    SUBCASE("heated end relaxes monotonically toward the linear state")
    {
        auto s = droplet_line(n, 0.0, dx, 298.0);
        s.T.front() = 350.0;
        std::vector<double> steady(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            steady[i] = 350.0 - 52.0 * i / n;
        }
        auto dist = [&] {
            double d = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                d += (s.T[i] - steady[i]) * (s.T[i] - steady[i]);
            }
            return std::sqrt(d);
        };
        double prev = dist();
        const int steps = 1500;
        for (int k = 1; k <= steps; ++k) {
            liquid_temperature_step(s, 350.0, 298.0, dt, kWater);
            const double d = dist();
            CHECK(d < prev);
            prev = d;
            if (k == 150) {
                const auto ref = fd_reference(n, dx, 298.0, 350.0, 298.0, k * dt, 8);
                for (std::size_t i = 0; i < s.size(); ++i) {
                    CHECK(std::abs(s.T[i] - ref[i]) < 0.01 * 52.0);
                }
            }
        }
        CHECK(prev < 0.01 * 52.0);
    }

    SUBCASE("needs two liquid particles")
    {
        FpmParticleSet s = droplet_line(0, 0.0, dx, 298.0);
        CHECK_THROWS_AS(liquid_temperature_step(s, 298.0, 298.0, dt, kWater), StateError);
    }
}

TEST_CASE("advection keeps the droplet shape")
{
    auto s = droplet_line(20, 1e-5, 5e-7, 298.0);
    s.push_back(0.0, 1.0, 5.0, 300.0, 1e5, Phase::Gas);
    s.sort_by_x();
    for (auto i : s.indices(Phase::Liquid)) {
        s.u[i] = -37.0;
    }
    const auto before = s.x;
    advect_liquid(s, 1e-9);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.phase[i] == Phase::Liquid) {
            CHECK(s.x[i] == doctest::Approx(before[i] - 37e-9).epsilon(1e-14));
        } else {
            CHECK(s.x[i] == before[i]);
        }
    }
    const auto idx = s.indices(Phase::Liquid);
    CHECK(s.x[idx.back()] - s.x[idx.front()] == doctest::Approx(1e-5).epsilon(1e-12));
}

TEST_CASE("liquid state from interface pressures")
{
    auto s = droplet_line(20, 1e-5, 5e-7, 298.0);
    set_liquid_state(s, 12.5, 1.1e5, 1.6e5);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s.u[i] == 12.5);
        const double expect = 1.1e5 + 0.5e5 * (s.x[i] - 1e-5) / 1e-5;
        CHECK(std::abs(s.p[i] - expect) < 1e-9 * 1e5);
    }
    CHECK(s.p.front() == doctest::Approx(1.1e5).epsilon(1e-14));
    CHECK(s.p.back() == doctest::Approx(1.6e5).epsilon(1e-14));
}

TEST_CASE("liquid thermal energy")
{
    auto s = droplet_line(20, 1e-5, 5e-7, 300.0);
    const double e = kWater.rho_l * kWater.c_p * 300.0 * 1e-5;
    CHECK(liquid_thermal_energy(s, kWater) == doctest::Approx(e).epsilon(1e-12));

    SUBCASE("changes only through boundary fluxes")
    {
        const double dx = 5e-7;
        const double dt = 0.2 * dx * dx / kWater.diffusivity();
        s.T.front() = 320.0;
        s.T.back() = 290.0;
        const double E0 = liquid_thermal_energy(s, kWater);
        double inflow = 0.0;
        // The end particles hold their temperature, so the energy that can change sits between
        // the inner edges of their half-gap shares.
        const std::size_t n = s.size();
        const double xl = 0.5 * (s.x[0] + s.x[1]);
        const double xr = 0.5 * (s.x[n - 2] + s.x[n - 1]);
        auto flux = [&] {
            const auto l = fpm::lsq_derivatives(s, fpm::Quantity::T, xl, s.h, fpm::Filter::Liquid);
            const auto r = fpm::lsq_derivatives(s, fpm::Quantity::T, xr, s.h, fpm::Filter::Liquid);
            return kWater.kappa_l * (r.d1 - l.d1);
        };
        for (int k = 0; k < 400; ++k) {
            const double before = flux();
            liquid_temperature_step(s, 320.0, 290.0, dt, kWater);
            inflow += 0.5 * dt * (before + flux());
        }
        const double dE = liquid_thermal_energy(s, kWater) - E0;
        CHECK(std::abs(dE - inflow) < 0.01 * std::abs(dE));
    }
}
