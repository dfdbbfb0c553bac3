#pragma once

#include "droplet/fpm.hpp"
#include "droplet/physics.hpp"

namespace droplet::liquid {

/// Linear solution of p_xx = 0 on [x_L, x_R] with p(x_L) = p_L, p(x_R) = p_R.
/// Throws DomainError unless x_L < x_R.
double liquid_pressure_field(double p_L, double p_R, double x_L, double x_R, double x);

/// u - dt/rho_l * (p_R - p_L)/(x_R - x_L).
double liquid_velocity_update(double u, double dt, double p_L, double p_R, double x_L, double x_R,
                              double rho_l);

/// Explicit Euler step of T_t = kappa_l/(rho_l c_p) T_xx on the liquid particles of `set`.
/// The leftmost and rightmost liquid particles take T_left and T_right; second derivatives
/// come from liquid-only least-squares stencils evaluated on the old temperatures.
void liquid_temperature_step(fpm::FpmParticleSet& set, double T_left, double T_right, double dt,
                             const physics::LiquidSpecies& liquid, const fpm::LsqOptions& opt = {});

/// x += dt u for liquid particles.
void advect_liquid(fpm::FpmParticleSet& set, double dt);

/// Writes the common velocity and the linear pressure profile on every liquid particle.
void set_liquid_state(fpm::FpmParticleSet& set, double u, double p_L, double p_R);

/// Thermal energy rho_l c_p sum T_i dV_i, dV_i the half-gap share of particle i within
/// [x_L, x_R] (unit cross-section).
double liquid_thermal_energy(const fpm::FpmParticleSet& set, const physics::LiquidSpecies& liquid);

} // namespace droplet::liquid
