#include "droplet/liquid.hpp"

#include "droplet/error.hpp"
#include "droplet/interface.hpp"

#include <vector>

namespace droplet::liquid {

double liquid_pressure_field(double p_L, double p_R, double x_L, double x_R, double x)
{
    if (!(x_L < x_R)) {
        throw DomainError("liquid_pressure_field: coincident or inverted interfaces");
    }
    return (p_R - p_L) / (x_R - x_L) * x + (p_R * x_L - p_L * x_R) / (x_L - x_R);
}

double liquid_velocity_update(double u, double dt, double p_L, double p_R, double x_L, double x_R,
                              double rho_l)
{
    if (!(x_L < x_R)) {
        throw DomainError("liquid_velocity_update: coincident or inverted interfaces");
    }
    return u - dt / rho_l * (p_R - p_L) / (x_R - x_L);
}

void liquid_temperature_step(fpm::FpmParticleSet& set, double T_left, double T_right, double dt,
                             const physics::LiquidSpecies& liquid, const fpm::LsqOptions& opt)
{
    const auto idx = set.indices(fpm::Phase::Liquid);
    if (idx.size() < 2) {
        throw StateError("liquid_temperature_step: fewer than two liquid particles");
    }
    const double D = liquid.diffusivity();
    // liquid particles move rigidly and keep their initial pitch
    const double h = fpm::kStencilRatio * set.dx0;
    std::vector<double> next(idx.size());
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        const double x0 = set.x[idx[k]];
        fpm::TaylorFit fit;
        try {
            fit = fpm::lsq_derivatives(set, fpm::Quantity::T, x0, h, fpm::Filter::Liquid, opt);
        } catch (const StencilError&) {
            fit = fpm::lsq_derivatives(set, fpm::Quantity::T, x0, 1.5 * h, fpm::Filter::Liquid, opt);
        }
        next[k] = set.T[idx[k]] + dt * D * fit.d2;
    }
    next.front() = T_left;
    next.back() = T_right;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        set.T[idx[k]] = next[k];
    }
}

void advect_liquid(fpm::FpmParticleSet& set, double dt)
{
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set.phase[i] == fpm::Phase::Liquid) {
            set.x[i] += dt * set.u[i];
        }
    }
}

void set_liquid_state(fpm::FpmParticleSet& set, double u, double p_L, double p_R)
{
    const auto [x_L, x_R] = coupling::detect_interface(set);
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set.phase[i] == fpm::Phase::Liquid) {
            set.u[i] = u;
            set.p[i] = liquid_pressure_field(p_L, p_R, x_L, x_R, set.x[i]);
        }
    }
}

double liquid_thermal_energy(const fpm::FpmParticleSet& set, const physics::LiquidSpecies& liquid)
{
    const auto idx = set.indices(fpm::Phase::Liquid);
    double sum = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const double lo = k == 0 ? set.x[idx[k]] : 0.5 * (set.x[idx[k - 1]] + set.x[idx[k]]);
        const double hi = k + 1 == idx.size() ? set.x[idx[k]] : 0.5 * (set.x[idx[k]] + set.x[idx[k + 1]]);
        sum += set.T[idx[k]] * (hi - lo);
    }
    return liquid.rho_l * liquid.c_p * sum;
}

} // namespace droplet::liquid
