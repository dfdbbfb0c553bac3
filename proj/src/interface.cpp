#include "droplet/interface.hpp"

#include "droplet/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace droplet::coupling {

std::pair<double, double> detect_interface(const fpm::FpmParticleSet& set)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t n = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set.phase[i] == fpm::Phase::Liquid) {
            lo = std::min(lo, set.x[i]);
            hi = std::max(hi, set.x[i]);
            ++n;
        }
    }
    if (n < 2) {
        throw StateError("detect_interface: " + std::to_string(n) + " liquid particles");
    }
    return {lo, hi};
}

namespace {

// Weighted least squares in (T_I, s) for rows T_i = T_I + c_i s.
std::pair<double, double> solve_two(std::span<const double> c, std::span<const double> rhs,
                                    std::span<const double> w)
{
    double scale = 0.0;
    for (double ci : c) {
        scale = std::max(scale, std::abs(ci));
    }
    if (!(scale > 0.0)) {
        throw SingularStencilError("interface system: all rows at the interface");
    }
    double a00 = 0, a01 = 0, a11 = 0, b0 = 0, b1 = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double cs = c[k] / scale;
        a00 += w[k];
        a01 += w[k] * cs;
        a11 += w[k] * cs * cs;
        b0 += w[k] * rhs[k];
        b1 += w[k] * cs * rhs[k];
    }
    const double det = a00 * a11 - a01 * a01;
    if (!(det > 1e-12 * a00 * a11)) {
        throw SingularStencilError("interface system: rank deficient");
    }
    const double t = (a11 * b0 - a01 * b1) / det;
    const double s = (a00 * b1 - a01 * b0) / det;
    return {t, s / scale};
}

double gauss(double dx, double h, double alpha)
{
    const double q = dx / h;
    return std::exp(-alpha * q * q);
}

void require_rows(const SideRows& gas, const SideRows& liq)
{
    if (gas.dx.size() < 2 || liq.dx.size() < 2) {
        throw StencilError("interface system: " + std::to_string(gas.dx.size()) + " gas and " +
                           std::to_string(liq.dx.size()) + " liquid rows");
    }
}

} // namespace

InterfaceTemperature solve_interface_temperature_ns(const SideRows& gas, const SideRows& liq, double kappa_g,
                                                    double kappa_l, double alpha)
{
    require_rows(gas, liq);
    // kappa_g T'_gas = kappa_l T'_liquid: the liquid gradient s is the free unknown.
    const double ratio = kappa_l / kappa_g;
    std::vector<double> c, rhs, w;
    for (std::size_t k = 0; k < gas.dx.size(); ++k) {
        c.push_back(gas.dx[k] * ratio);
        rhs.push_back(gas.T[k]);
        w.push_back(gauss(gas.dx[k], gas.h, alpha));
    }
    for (std::size_t k = 0; k < liq.dx.size(); ++k) {
        c.push_back(liq.dx[k]);
        rhs.push_back(liq.T[k]);
        w.push_back(gauss(liq.dx[k], liq.h, alpha));
    }
    const auto [T_I, s] = solve_two(c, rhs, w);
    return {T_I, ratio * s, s};
}

InterfaceTemperature solve_interface_temperature_boltzmann(const SideRows& gas, const SideRows& liq,
                                                           double kappa_l, double q_g, double alpha)
{
    require_rows(gas, liq);
    const double dT_liquid = -q_g / kappa_l;
    std::vector<double> c, rhs, w;
    for (std::size_t k = 0; k < gas.dx.size(); ++k) {
        c.push_back(gas.dx[k]);
        rhs.push_back(gas.T[k]);
        w.push_back(gauss(gas.dx[k], gas.h, alpha));
    }
    for (std::size_t k = 0; k < liq.dx.size(); ++k) {
        c.push_back(0.0);
        rhs.push_back(liq.T[k] - liq.dx[k] * dT_liquid);
        w.push_back(gauss(liq.dx[k], liq.h, alpha));
    }
    const auto [T_I, g] = solve_two(c, rhs, w);
    return {T_I, g, dT_liquid};
}

SideRows gas_rows(const fpm::FpmParticleSet& set, double x_I, Side side, double h)
{
    SideRows rows;
    rows.h = h;
    for (auto j : fpm::neighbor_search(set, x_I, h, fpm::Filter::Gas)) {
        const double d = set.x[j] - x_I;
        if ((side == Side::Left && d < 0.0) || (side == Side::Right && d > 0.0)) {
            rows.dx.push_back(d);
            rows.T.push_back(set.T[j]);
        }
    }
    return rows;
}

SideRows liquid_rows(const fpm::FpmParticleSet& set, double x_I, double h)
{
    SideRows rows;
    rows.h = h;
    const double tol = 1e-6 * set.dx0;
    for (auto j : fpm::neighbor_search(set, x_I, h, fpm::Filter::Liquid)) {
        const double d = set.x[j] - x_I;
        if (std::abs(d) > tol) {
            rows.dx.push_back(d);
            rows.T.push_back(set.T[j]);
        }
    }
    return rows;
}

double interface_pressure_ns(const fpm::FpmParticleSet& set, double x_I, Side side, double mu,
                             std::optional<double> u_I, const fpm::LsqOptions& opt)
{
    double h = set.h;
    for (int attempt = 0;; ++attempt, h *= 1.5) {
        std::vector<double> dx, p, dxu, u;
        for (auto j : fpm::neighbor_search(set, x_I, h, fpm::Filter::Gas)) {
            const double d = set.x[j] - x_I;
            if ((side == Side::Left && d < 0.0) || (side == Side::Right && d > 0.0)) {
                dx.push_back(d);
                p.push_back(set.p[j]);
                dxu.push_back(d);
                u.push_back(set.u[j]);
            }
        }
        if (u_I) {
            dxu.push_back(0.0);
            u.push_back(*u_I);
        }
        try {
            const auto fp = fpm::lsq_fit(dx, p, h, opt);
            const auto fu = fpm::lsq_fit(dxu, u, h, opt);
            return fp.value - (4.0 / 3.0) * mu * fu.d1;
        } catch (const StencilError&) {
            if (attempt > 0) {
                throw;
            }
        }
    }
}

InterfaceTemperature interface_temperature_ns(const fpm::FpmParticleSet& set, double x_I, Side side,
                                              double kappa_g, double kappa_l)
{
    auto gas = gas_rows(set, x_I, side, set.h);
    auto liq = liquid_rows(set, x_I, set.h);
    if (gas.dx.size() < 2 || liq.dx.size() < 2) {
        gas = gas_rows(set, x_I, side, 1.5 * set.h);
        liq = liquid_rows(set, x_I, 1.5 * set.h);
    }
    return solve_interface_temperature_ns(gas, liq, kappa_g, kappa_l);
}

std::vector<std::size_t> nearest_active_cells(const dsmc::CellMoments& m, double x_I, Side side, std::size_t n)
{
    std::vector<std::size_t> out;
    if (side == Side::Left) {
        for (std::size_t k = m.size(); k-- > 0 && out.size() < n;) {
            if (m.active[k] && m.center[k] < x_I) {
                out.push_back(k);
            }
        }
    } else {
        for (std::size_t k = 0; k < m.size() && out.size() < n; ++k) {
            if (m.active[k] && m.center[k] > x_I) {
                out.push_back(k);
            }
        }
    }
    return out;
}

namespace {

SideRows cell_rows(const dsmc::CellMoments& m, std::span<const double> values, double x_I, Side side,
                   std::size_t n)
{
    SideRows rows;
    for (auto k : nearest_active_cells(m, x_I, side, n)) {
        const double d = m.center[k] - x_I;
        rows.dx.push_back(d);
        rows.T.push_back(values[k]);
        rows.h = std::max(rows.h, 1.25 * std::abs(d));
    }
    return rows;
}

} // namespace

fpm::TaylorFit extrapolate_moment(const dsmc::CellMoments& m, dsmc::Field f, double x_I, Side side, std::size_t n)
{
    const auto rows = cell_rows(m, dsmc::field_values(m, f), x_I, side, n);
    if (rows.dx.size() < 2) {
        throw StencilError("extrapolate_moment: fewer than two active cells next to the interface");
    }
    return fpm::lsq_fit_linear(rows.dx, rows.T, rows.h);
}

double interface_pressure_boltzmann(const dsmc::CellMoments& m, double x_I, Side side)
{
    return extrapolate_moment(m, dsmc::Field::Phi11, x_I, side).value;
}

InterfaceTemperature interface_temperature_boltzmann(const dsmc::CellMoments& m, const fpm::FpmParticleSet& liq,
                                                     double x_I, Side side, double kappa_l)
{
    const double q_g = extrapolate_moment(m, dsmc::Field::Q1, x_I, side).value;
    const auto gas = cell_rows(m, dsmc::field_values(m, dsmc::Field::T), x_I, side, 4);
    auto lrows = liquid_rows(liq, x_I, liq.h);
    if (lrows.dx.size() < 2) {
        lrows = liquid_rows(liq, x_I, 1.5 * liq.h);
    }
    return solve_interface_temperature_boltzmann(gas, lrows, kappa_l, q_g);
}

} // namespace droplet::coupling
