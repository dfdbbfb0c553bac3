#pragma once

#include "droplet/physics.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace droplet {

enum class BoundaryKind { Wall, Open };

/// Boundary of the gas at x = a or x = b.
///
/// Wall: diffuse wall for the kinetic solver, Dirichlet u and T for the continuum solver.
/// Open: molecules leaving the domain are deleted and ghost cells inject the state
/// (rho, u, T); the continuum solver holds the same values at the end particle. With
/// u_extrapolated the velocity is taken from the adjacent interior gas instead.
struct BoundaryConfig {
    BoundaryKind kind = BoundaryKind::Wall;
    double rho = 0.0;
    double u = 0.0;
    double T = 0.0;
    bool u_extrapolated = false;
};

struct GasRegionConfig {
    double lo = 0.0;
    double hi = 0.0;
    double rho = 0.0;
    double u = 0.0;
    double T = 0.0;
};

struct LiquidConfig {
    double lo = 0.0;
    double hi = 0.0;
    double rho_l = 1000.0;
    double u = 0.0;
    double T = 0.0;
    double p = 0.0;
    double kappa_l = 0.63;
    double c_p = 4181.0;

    physics::LiquidSpecies species() const { return {rho_l, kappa_l, c_p}; }
};

struct ScenarioConfig {
    std::string name;
    double a = 0.0;
    double b = 0.0;
    std::vector<GasRegionConfig> gas;  ///< ordered by x, covering [a, b] outside the droplet
    LiquidConfig liquid;
    BoundaryConfig left;
    BoundaryConfig right;
    physics::GasSpecies species = physics::GasSpecies::argon();
    int particles = 200;                  ///< FPM spacing (b-a)/particles; also the DSMC base cells
    std::size_t molecules_per_cell = 5000;
    std::vector<double> output_times;     ///< ascending, <= t_end
    double t_end = 0.0;
    std::uint64_t seed = 42;
    double transport_temperature = 0.0;   ///< 0: temperature of the widest gas region
    physics::SafetyFactors safety;
    int max_subcycles = 3;
    int refine_cap = 64;

    /// Temperature at which mu and kappa are frozen.
    double reference_temperature() const;
    physics::Transport transport() const;
    /// Droplet width, the length scale of the Knudsen number.
    double characteristic_length() const { return liquid.hi - liquid.lo; }
    /// Region containing x (the last region whose lo <= x).
    const GasRegionConfig& region_at(double x) const;
    /// Throws ConfigError on inconsistent data.
    void validate() const;
};

std::vector<std::string> preset_names();

/// Throws ConfigError for an unknown name.
ScenarioConfig preset(std::string_view name);

/// INI file; `base = <preset>` in [scenario] starts from that preset, other keys override.
ScenarioConfig load_config(const std::filesystem::path& path);

struct KnudsenEntry {
    double lo;
    double hi;
    double rho;
    double lambda;
    double kn;
};

/// Mean free path over droplet width for every gas region.
std::vector<KnudsenEntry> knudsen_numbers(const ScenarioConfig& cfg);

} // namespace droplet
