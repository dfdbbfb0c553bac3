#include "droplet/physics.hpp"

#include "droplet/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace droplet::physics {

GasSpecies GasSpecies::argon()
{
    GasSpecies g{};
    g.m = 6.63e-26;
    g.d = 3.68e-10;
    g.k = 1.38e-23;
    g.R = 208.0;
    g.gamma = 5.0 / 3.0;
    g.c_v = 1.5 * g.R;
    return g;
}

LiquidSpecies LiquidSpecies::water(double rho_l)
{
    return LiquidSpecies{rho_l, 0.63, 4181.0};
}

Transport transport_coefficients(double T, const GasSpecies& gas)
{
    if (!(T > 0.0)) {
        throw DomainError("transport_coefficients: temperature must be positive, got " +
                          std::to_string(T));
    }
    const double mu = 5.0 / (16.0 * gas.d * gas.d) * std::sqrt(gas.m * gas.k * T / kPi);
    const double kappa = 15.0 * gas.k / (4.0 * gas.m) * mu;
    return {mu, kappa};
}

double eos_pressure(double rho, double T, const GasSpecies& gas)
{
    if (!(rho > 0.0) || !(T > 0.0)) {
        throw DomainError("eos_pressure: rho and T must be positive");
    }
    return rho * gas.R * T;
}

double eos_temperature(double rho, double p, const GasSpecies& gas)
{
    if (!(rho > 0.0) || !(p > 0.0)) {
        throw DomainError("eos_temperature: rho and p must be positive");
    }
    return p / (rho * gas.R);
}

double mean_free_path(double rho, const GasSpecies& gas)
{
    if (!(rho > 0.0)) {
        throw DomainError("mean_free_path: density must be positive");
    }
    return gas.m / (std::sqrt(2.0) * kPi * gas.d * gas.d * rho);
}

double sound_speed(double T, const GasSpecies& gas)
{
    return std::sqrt(gas.gamma * gas.R * std::max(T, 0.0));
}

double thermal_speed(double T, const GasSpecies& gas)
{
    return std::sqrt(2.0 * gas.R * std::max(T, 0.0));
}

const char* to_string(Algorithm a)
{
    return a == Algorithm::I ? "I" : "II";
}

TimeStepBounds compute_time_step(const FieldSummary& s, const GasSpecies& gas,
                                 const Transport& transport, const LiquidSpecies& liquid,
                                 Algorithm mode, const SafetyFactors& safety)
{
    if (s.samples == 0) {
        throw SolverError("compute_time_step: empty field summary");
    }
    if (!(s.min_spacing > 0.0) || !(s.liquid_spacing > 0.0)) {
        throw DomainError("compute_time_step: spacings must be positive");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    TimeStepBounds b{inf, inf, inf, inf};

    const double c = sound_speed(s.max_T, gas);
    b.convective = safety.cfl * s.min_spacing / (s.max_speed + c);

    const double liquid_diff = safety.diffusive * s.liquid_spacing * s.liquid_spacing /
                               liquid.diffusivity();
    b.diffusive = liquid_diff;
    if (mode == Algorithm::I) {
        if (!(s.rho_min > 0.0)) {
            throw DomainError("compute_time_step: gas density must be positive");
        }
        const double nu = transport.mu / s.rho_min;
        const double chi = transport.kappa / (s.rho_min * gas.c_v);
        const double d_max = std::max({nu, chi, liquid.diffusivity()});
        b.diffusive = std::min(liquid_diff, safety.diffusive * s.min_spacing * s.min_spacing / d_max);
    } else {
        const double lambda = mean_free_path(s.rho_max, gas);
        b.collision = safety.collision * lambda / thermal_speed(s.max_T, gas);
    }
    b.dt = std::min({b.convective, b.diffusive, b.collision});
    return b;
}

} // namespace droplet::physics
