#pragma once

#include "droplet/frame.hpp"
#include "droplet/fpm.hpp"
#include "droplet/physics.hpp"
#include "droplet/scenario.hpp"

#include <functional>
#include <string>
#include <vector>

namespace droplet::coupling {

/// Droplet state after one step.
struct HistoryRecord {
    double t = 0.0;
    double dt = 0.0;
    double x_L = 0.0;
    double x_R = 0.0;
    double u = 0.0;
    double p_L = 0.0;
    double p_R = 0.0;
    double T_L = 0.0;
    double T_R = 0.0;
    double liquid_energy = 0.0;  ///< rho_l c_p sum T dV
};

struct RunStats {
    std::size_t steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t inserted = 0;
    std::size_t removed = 0;
    std::size_t max_molecules = 0;
    std::size_t interface_hits = 0;
    std::size_t inflow_molecules = 0;
    std::size_t deleted_molecules = 0;
    std::size_t subcycled_cells = 0;
    double max_collision_probability = 0.0;
    double min_dt = 0.0;
    double max_dt = 0.0;
};

struct RunArtifacts {
    physics::Algorithm algorithm = physics::Algorithm::I;
    std::vector<OutputFrame> frames;  ///< t = 0 followed by the configured output times
    std::vector<HistoryRecord> history;
    RunStats stats;
};

struct RunOptions {
    std::size_t grid_points = 200;
    /// Called with a one-line status after each emitted frame.
    std::function<void(const std::string&)> log;
};

/// Particles x_i = a + i (b-a)/N, i = 0..N. Points inside the liquid interval become
/// liquid; with `with_gas` the rest are gas and the two ends are wall particles.
fpm::FpmParticleSet initial_particles(const ScenarioConfig& cfg, bool with_gas);

/// Time-step inputs of the initial state (spacing (b-a)/N for both phases).
physics::FieldSummary initial_summary(const ScenarioConfig& cfg);

/// Compressible gas particles coupled to the incompressible droplet.
RunArtifacts run_algorithm_I(const ScenarioConfig& cfg, const RunOptions& opt = {});

/// Kinetic gas (DSMC) coupled to the incompressible droplet.
RunArtifacts run_algorithm_II(const ScenarioConfig& cfg, const RunOptions& opt = {});

RunArtifacts run_algorithm(const ScenarioConfig& cfg, physics::Algorithm alg, const RunOptions& opt = {});

} // namespace droplet::coupling
