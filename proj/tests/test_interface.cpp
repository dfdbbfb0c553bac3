#include "droplet/dsmc.hpp"
#include "droplet/error.hpp"
#include "droplet/interface.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace droplet;
using namespace droplet::coupling;
using fpm::FpmParticleSet;
using fpm::Phase;

namespace {

const physics::GasSpecies kAr = physics::GasSpecies::argon();
const double kKg = 0.0168;
const double kKl = 0.6;

// Gas on [0, x_L), liquid on [x_L, x_R], gas on (x_R, L]; uniform spacing dx.
FpmParticleSet two_phase(double dx, int n_gas, int n_liq, double rho, double T)
{
    FpmParticleSet s;
    s.dx0 = dx;
    s.h = 3.0 * dx;
    int i = 0;
    for (int k = 0; k < n_gas; ++k, ++i) {
        s.push_back(i * dx, rho, 0.0, T, rho * kAr.R * T, Phase::Gas);
    }
    for (int k = 0; k <= n_liq; ++k, ++i) {
        s.push_back(i * dx, 1000.0, 0.0, T, 1e5, Phase::Liquid);
    }
    for (int k = 0; k < n_gas; ++k, ++i) {
        s.push_back(i * dx, rho, 0.0, T, rho * kAr.R * T, Phase::Gas);
    }
    return s;
}

struct KktResult {
    double T_I, g_gas, g_liq;
};

// Dense constrained weighted least squares over (T_I, g_gas, g_liq): the normal equations
// bordered by one linear constraint c . z = r.
KktResult kkt_oracle(const SideRows& gas, const SideRows& liq, const Eigen::Vector3d& c, double r)
{
    Eigen::Matrix3d N = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    auto add = [&](const SideRows& rows, int col) {
        for (std::size_t k = 0; k < rows.dx.size(); ++k) {
            const double q = rows.dx[k] / rows.h;
            const double w = std::exp(-2.0 * q * q);
            Eigen::Vector3d a = Eigen::Vector3d::Zero();
            a(0) = 1.0;
            a(col) = rows.dx[k];
            N += w * a * a.transpose();
            b += w * rows.T[k] * a;
        }
    };
    add(gas, 1);
    add(liq, 2);
    Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
    K.topLeftCorner<3, 3>() = N;
    K.block<3, 1>(0, 3) = c;
    K.block<1, 3>(3, 0) = c.transpose();
    Eigen::Vector4d rhs;
    rhs << b, r;
    const Eigen::Vector4d z = K.fullPivLu().solve(rhs);
    return {z(0), z(1), z(2)};
}

SideRows rows_from(std::vector<double> dx, double T_I, double g, double h, double noise = 0.0,
                   unsigned seed = 1)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    SideRows r;
    r.h = h;
    for (double d : dx) {
        r.dx.push_back(d);
        r.T.push_back(T_I + d * g + noise * nd(rng));
    }
    return r;
}

dsmc::CellMoments line_moments(int n, double x0, double dx)
{
    dsmc::CellMoments m;
    m.resize(n);
    for (int k = 0; k < n; ++k) {
        m.center[k] = x0 + (k + 0.5) * dx;
        m.volume[k] = dx;
        m.count[k] = 100;
        m.active[k] = 1;
    }
    return m;
}

} // namespace

TEST_CASE("interface detection")
{
    FpmParticleSet s;
    s.dx0 = 1e-6;
    s.h = 3e-6;
    for (int i = 0; i <= 100; ++i) {
        const double x = i * 1e-6;
        s.push_back(x, 1.0, 0.0, 300.0, 1e5, (x >= 4e-5 - 1e-12 && x <= 6e-5 + 1e-12) ? Phase::Liquid : Phase::Gas);
    }
    auto [lo, hi] = detect_interface(s);
    CHECK(lo == doctest::Approx(4e-5).epsilon(1e-12));
    CHECK(hi == doctest::Approx(6e-5).epsilon(1e-12));

    for (auto& x : s.x) {
        x += 1e-7;
    }
    auto [lo2, hi2] = detect_interface(s);
    CHECK(lo2 == doctest::Approx(lo + 1e-7).epsilon(1e-12));
    CHECK(hi2 == doctest::Approx(hi + 1e-7).epsilon(1e-12));

    FpmParticleSet r;
    std::mt19937_64 rng(3);
    std::vector<std::size_t> order(s.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
        r.push_back(s.x[i], s.rho[i], s.u[i], s.T[i], s.p[i], s.phase[i]);
    }
    CHECK(detect_interface(r) == detect_interface(s));

    FpmParticleSet one;
    one.push_back(0.0, 1.0, 0.0, 300.0, 1e5, Phase::Gas);
    one.push_back(1.0, 1.0, 0.0, 300.0, 1e5, Phase::Liquid);
    CHECK_THROWS_AS(detect_interface(one), StateError);
}

TEST_CASE("interface pressure from the compressible gas")
{
    const double dx = 5e-7;
    const double mu = 2.466e-5;
    auto s = two_phase(dx, 12, 20, 1.226, 392.2);
    const auto [x_L, x_R] = detect_interface(s);

    SUBCASE("uniform gas at rest")
    {
        for (auto& p : s.p) {
            p = 1e5;
        }
        CHECK(interface_pressure_ns(s, x_L, Side::Left, mu) == doctest::Approx(1e5).epsilon(1e-12));
        CHECK(interface_pressure_ns(s, x_R, Side::Right, mu) == doctest::Approx(1e5).epsilon(1e-12));
        CHECK(interface_pressure_ns(s, x_R, Side::Right, mu, 0.0) == doctest::Approx(1e5).epsilon(1e-12));
    }

    SUBCASE("linear velocity subtracts the viscous stress")
    {
        const double slope = 3e7;
        for (std::size_t i = 0; i < s.size(); ++i) {
            s.p[i] = 1e5;
            s.u[i] = 20.0 + slope * (s.x[i] - x_R);
        }
        const double expect = 1e5 - 4.0 / 3.0 * mu * slope;
        CHECK(interface_pressure_ns(s, x_R, Side::Right, mu) == doctest::Approx(expect).epsilon(1e-10));
        CHECK(interface_pressure_ns(s, x_R, Side::Right, mu, 20.0) == doctest::Approx(expect).epsilon(1e-10));
        // the liquid velocity never enters the gas stencil
        for (auto i : s.indices(Phase::Liquid)) {
            s.u[i] = -1e3;
        }
        CHECK(interface_pressure_ns(s, x_R, Side::Right, mu) == doctest::Approx(expect).epsilon(1e-10));
        // no velocity gradient: plain extrapolation of a linear p
        for (std::size_t i = 0; i < s.size(); ++i) {
            s.u[i] = 5.0;
            s.p[i] = 1e5 + 1e10 * (s.x[i] - x_L);
        }
        CHECK(interface_pressure_ns(s, x_L, Side::Left, mu) == doctest::Approx(1e5).epsilon(1e-10));
    }

    SUBCASE("stencil deficiency")
    {
        FpmParticleSet t = two_phase(dx, 1, 20, 1.226, 392.2);
        const auto [a, b] = detect_interface(t);
        CHECK_THROWS_AS(interface_pressure_ns(t, a, Side::Left, mu), StencilError);
    }
}

TEST_CASE("interface temperature with continuous heat flux")
{
    const double h = 1.5e-6;
    const std::vector<double> gdx = {-5e-7, -1e-6, -1.5e-6};
    const std::vector<double> ldx = {5e-7, 1e-6, 1.5e-6};

    SUBCASE("uniform phases")
    {
        const auto r = solve_interface_temperature_ns(rows_from(gdx, 298.0, 0.0, h), rows_from(ldx, 298.0, 0.0, h),
                                                      kKg, kKl);
        CHECK(r.T_I == doctest::Approx(298.0).epsilon(1e-14));
        CHECK(std::abs(r.dT_gas) < 1e-6);
        CHECK(std::abs(r.dT_liquid) < 1e-6);
    }

    SUBCASE("constraint-consistent data is recovered")
    {
        const double g_liq = 2e5;
        const double g_gas = kKl / kKg * g_liq;
        const auto r = solve_interface_temperature_ns(rows_from(gdx, 330.0, g_gas, h), rows_from(ldx, 330.0, g_liq, h),
                                                      kKg, kKl);
        CHECK(std::abs(r.T_I - 330.0) < 1e-10 * 330.0);
        CHECK(std::abs(r.dT_gas - g_gas) < 1e-10 * std::abs(g_gas));
        CHECK(std::abs(r.dT_liquid - g_liq) < 1e-10 * g_liq);
    }

    SUBCASE("inconsistent data matches the constrained least-squares solution")
    {
        for (unsigned seed = 1; seed <= 20; ++seed) {
            const auto gas = rows_from({-4e-7, -9e-7, -1.3e-6, -1.9e-6}, 310.0, -4e6, 2e-6, 2.0, seed);
            const auto liq = rows_from(ldx, 305.0, 1e6, h, 0.5, seed + 100);
            const auto r = solve_interface_temperature_ns(gas, liq, kKg, kKl);
            const auto o = kkt_oracle(gas, liq, Eigen::Vector3d(0.0, kKg, -kKl), 0.0);
            CHECK(std::abs(kKg * r.dT_gas - kKl * r.dT_liquid) < 1e-12 * kKl * std::abs(r.dT_liquid) + 1e-9);
            CHECK(r.T_I == doctest::Approx(o.T_I).epsilon(1e-10));
            CHECK(r.dT_gas == doctest::Approx(o.g_gas).epsilon(1e-8));
            CHECK(r.dT_liquid == doctest::Approx(o.g_liq).epsilon(1e-8));
        }
    }

    SUBCASE("too few rows and degenerate rows")
    {
        CHECK_THROWS_AS(solve_interface_temperature_ns(rows_from({-5e-7}, 300.0, 0.0, h), rows_from(ldx, 300.0, 0.0, h),
                                                       kKg, kKl),
                        StencilError);
        CHECK_THROWS_AS(solve_interface_temperature_ns(rows_from({0.0, 0.0}, 300.0, 0.0, h),
                                                       rows_from({0.0, 0.0}, 300.0, 0.0, h), kKg, kKl),
                        SingularStencilError);
    }

    SUBCASE("particle sets")
    {
        const double dx = 5e-7;
        auto s = two_phase(dx, 12, 20, 1.226, 300.0);
        const auto [x_L, x_R] = detect_interface(s);
        const double g_liq = -3e5;
        const double g_gas = kKl / kKg * g_liq;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double d = s.x[i] - x_R;
            s.T[i] = 320.0 + (s.phase[i] == Phase::Gas ? g_gas : g_liq) * d;
        }
        const auto r = interface_temperature_ns(s, x_R, Side::Right, kKg, kKl);
        CHECK(std::abs(r.T_I - 320.0) < 1e-10 * 320.0);
        CHECK(r.dT_liquid == doctest::Approx(g_liq).epsilon(1e-10));
        // the particle on the interface is not a liquid row
        const auto lr = liquid_rows(s, x_R, s.h);
        CHECK(lr.dx.size() == 3);
        CHECK(std::none_of(lr.dx.begin(), lr.dx.end(), [](double d) { return d == 0.0; }));
        const auto gr = gas_rows(s, x_R, Side::Right, s.h);
        CHECK(gr.dx.size() == 3);
        CHECK(std::all_of(gr.dx.begin(), gr.dx.end(), [](double d) { return d > 0.0; }));
    }
}

TEST_CASE("interface temperature with kinetic heat flux")
{
    const double h = 1.5e-6;
    const std::vector<double> gdx = {5e-7, 1e-6, 1.5e-6};
    const std::vector<double> ldx = {-5e-7, -1e-6, -1.5e-6};

    SUBCASE("no heat flux")
    {
        const auto r = solve_interface_temperature_boltzmann(rows_from(gdx, 298.0, 0.0, h),
                                                             rows_from(ldx, 298.0, 0.0, h), kKl, 0.0);
        CHECK(r.T_I == doctest::Approx(298.0).epsilon(1e-14));
        CHECK(r.dT_liquid == 0.0);
    }

    SUBCASE("consistent liquid slope")
    {
        const double Q = 1.2e5;
        const auto r = solve_interface_temperature_boltzmann(rows_from(gdx, 301.0, 5e5, h),
                                                             rows_from(ldx, 301.0, -Q / kKl, h), kKl, Q);
        CHECK(std::abs(r.T_I - 301.0) < 1e-10 * 301.0);
        CHECK(r.dT_liquid == doctest::Approx(-Q / kKl).epsilon(1e-14));
        CHECK(r.dT_gas == doctest::Approx(5e5).epsilon(1e-8));
    }

    SUBCASE("inconsistent data matches the constrained least-squares solution")
    {
        const double Q = -3e4;
        for (unsigned seed = 1; seed <= 10; ++seed) {
            const auto gas = rows_from(gdx, 299.0, 2e6, h, 1.0, seed);
            const auto liq = rows_from(ldx, 297.0, 4e5, h, 0.3, seed + 50);
            const auto r = solve_interface_temperature_boltzmann(gas, liq, kKl, Q);
            const auto o = kkt_oracle(gas, liq, Eigen::Vector3d(0.0, 0.0, -kKl), Q);
            CHECK(r.T_I == doctest::Approx(o.T_I).epsilon(1e-10));
            CHECK(r.dT_gas == doctest::Approx(o.g_gas).epsilon(1e-8));
            CHECK(r.dT_liquid == doctest::Approx(o.g_liq).epsilon(1e-12));
        }
    }
}

TEST_CASE("moment extrapolation")
{
    auto m = line_moments(10, 0.0, 1e-6);
    const double x_I = 4e-6;

    SUBCASE("nearest active cells")
    {
        m.active[3] = 0;
        const auto left = nearest_active_cells(m, x_I, Side::Left);
        CHECK(left == std::vector<std::size_t>{2, 1, 0});
        const auto right = nearest_active_cells(m, x_I, Side::Right, 2);
        CHECK(right == std::vector<std::size_t>{4, 5});
    }

    SUBCASE("constant and linear fields")
    {
        for (std::size_t k = 0; k < m.size(); ++k) {
            m.phi11[k] = 123456.0;
            m.q1[k] = 7.0 - 2e6 * (m.center[k] - x_I);
        }
        CHECK(interface_pressure_boltzmann(m, x_I, Side::Left) == doctest::Approx(123456.0).epsilon(1e-14));
        CHECK(interface_pressure_boltzmann(m, x_I, Side::Right) == doctest::Approx(123456.0).epsilon(1e-14));
        const auto f = extrapolate_moment(m, dsmc::Field::Q1, x_I, Side::Right);
        CHECK(f.value == doctest::Approx(7.0).epsilon(1e-10));
        CHECK(f.d1 == doctest::Approx(-2e6).epsilon(1e-10));
    }

    SUBCASE("errors")
    {
        for (std::size_t k = 0; k < 4; ++k) {
            m.active[k] = 0;
        }
        CHECK_THROWS_AS(extrapolate_moment(m, dsmc::Field::Phi11, x_I, Side::Left), StencilError);
        m.active[2] = 1;
        CHECK_THROWS_AS(interface_pressure_boltzmann(m, x_I, Side::Left), StencilError);
    }
}

TEST_CASE("kinetic interface data in equilibrium")
{
    const double a = 0.0;
    const double b = 2e-5;
    const int n = 40;
    const double dx = (b - a) / n;
    const double x_L = 8e-6;
    const double x_R = 1.2e-5;
    const double rho = 1.226;
    const double T0 = 300.0;
    const dsmc::GasRegion region{a, b, rho, 0.0, T0};
    const double p0 = rho * kAr.R * T0;

    FpmParticleSet liq;
    liq.dx0 = dx;
    liq.h = 3.0 * dx;
    for (int i = 0; i <= 8; ++i) {
        liq.push_back(x_L + i * dx, 1000.0, 0.0, T0, 1e5, Phase::Liquid);
    }

    auto sample = [&](unsigned seed) {
        dsmc::Rng rng(seed);
        auto ens = dsmc::init_maxwellian_cells(std::span(&region, 1), a, b, n, x_L, x_R, 2000, kAr, rng);
        auto grid = dsmc::build_cell_grid(a, b, n, x_L, x_R);
        dsmc::sort_into_cells(ens, grid);
        return dsmc::sample_moments(ens, grid, kAr);
    };

    SUBCASE("pressure within three standard deviations")
    {
        const auto raw = sample(11);
        const auto smooth = dsmc::smooth_moments(raw, 3.0 * dx);
        // p_I is linear in the raw phi_11 values; its coefficients follow from unit inputs.
        for (Side side : {Side::Left, Side::Right}) {
            const double x_I = side == Side::Left ? x_L : x_R;
            double var = 0.0;
            for (std::size_t k = 0; k < raw.size(); ++k) {
                auto unit = raw;
                std::fill(unit.phi11.begin(), unit.phi11.end(), 0.0);
                unit.phi11[k] = 1.0;
                const double c = interface_pressure_boltzmann(dsmc::smooth_moments(unit, 3.0 * dx), x_I, side);
                if (raw.count[k] > 0) {
                    var += c * c * 2.0 * p0 * p0 / static_cast<double>(raw.count[k]);
                }
            }
            const double p_I = interface_pressure_boltzmann(smooth, x_I, side);
            CHECK(std::abs(p_I - p0) < 3.0 * std::sqrt(var));
        }
    }

    SUBCASE("temperature agrees with the common temperature on average")
    {
        const int runs = 24;
        double sum = 0.0;
        double sum2 = 0.0;
        for (int r = 0; r < runs; ++r) {
            const auto smooth = dsmc::smooth_moments(sample(100 + r), 3.0 * dx);
            const double T_I = interface_temperature_boltzmann(smooth, liq, x_R, Side::Right, kKl).T_I;
            sum += T_I;
            sum2 += T_I * T_I;
        }
        const double mean = sum / runs;
        const double sd = std::sqrt((sum2 - runs * mean * mean) / (runs - 1));
        CHECK(sd > 0.0);
        CHECK(std::abs(mean - T0) < 3.0 * sd / std::sqrt(runs));
    }
}
