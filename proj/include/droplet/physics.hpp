#pragma once

#include <cstddef>

namespace droplet::physics {

inline constexpr double kPi = 3.14159265358979323846;

/// Monoatomic hard-sphere gas.
struct GasSpecies {
    double m;      ///< molecular mass [kg]
    double d;      ///< molecular diameter [m]
    double k;      ///< Boltzmann constant [J/K]
    double R;      ///< specific gas constant [J/(kg K)]
    double gamma;  ///< adiabatic index
    double c_v;    ///< specific heat at constant volume [J/(kg K)]

    /// Argon with m = 6.63e-26 kg, d = 3.68e-10 m, k = 1.38e-23 J/K, R = 208 J/(kg K).
    static GasSpecies argon();
};

struct LiquidSpecies {
    double rho_l;    ///< density [kg/m^3]
    double kappa_l;  ///< thermal conductivity [J/(m K s)]
    double c_p;      ///< specific heat at constant pressure [J/(kg K)]

    /// Water-like conductivity and heat capacity with a configurable density.
    static LiquidSpecies water(double rho_l = 1000.0);

    double diffusivity() const { return kappa_l / (rho_l * c_p); }
};

struct Transport {
    double mu;     ///< dynamic viscosity [Pa s]
    double kappa;  ///< thermal conductivity [W/(m K)]
};

/// First Chapman-Enskog approximation for hard spheres. Throws DomainError for T <= 0.
Transport transport_coefficients(double T, const GasSpecies& gas);

double eos_pressure(double rho, double T, const GasSpecies& gas);
double eos_temperature(double rho, double p, const GasSpecies& gas);

/// Hard-sphere mean free path 1/(sqrt(2) pi d^2 n) with n = rho/m.
double mean_free_path(double rho, const GasSpecies& gas);

double sound_speed(double T, const GasSpecies& gas);

/// sqrt(2 R T), the most probable molecular speed.
double thermal_speed(double T, const GasSpecies& gas);

enum class Algorithm { I, II };

const char* to_string(Algorithm a);

struct SafetyFactors {
    double cfl = 0.5;
    double diffusive = 0.25;
    double collision = 0.2;
};

/// Extremes of the current gas and liquid state that bound the time step.
struct FieldSummary {
    std::size_t samples = 0;       ///< number of gas samples that contributed; 0 means empty
    double max_speed = 0.0;        ///< max |u| over gas and liquid [m/s]
    double max_T = 0.0;            ///< [K]
    double min_spacing = 0.0;      ///< smallest gas particle gap or collision cell width [m]
    double liquid_spacing = 0.0;   ///< liquid particle spacing [m]
    double rho_min = 0.0;          ///< [kg/m^3]
    double rho_max = 0.0;          ///< [kg/m^3]
};

struct TimeStepBounds {
    double convective = 0.0;
    double diffusive = 0.0;
    double collision = 0.0;  ///< infinity for Algorithm I
    double dt = 0.0;         ///< min of the above
};

/// Global time step shared by both phases.
///
/// Convective bound C_cfl dx/(max|u| + c), diffusive bound C_diff dx^2 / D_max
/// and, for the kinetic solver, a collision-time bound C_coll lambda_min / sqrt(2 R T_max).
/// The gas diffusivities only enter for Algorithm I; the liquid diffusivity
/// always does (with the liquid spacing).
TimeStepBounds compute_time_step(const FieldSummary& summary, const GasSpecies& gas,
                                 const Transport& transport, const LiquidSpecies& liquid,
                                 Algorithm mode, const SafetyFactors& safety = {});

} // namespace droplet::physics
