#pragma once

#include "droplet/interface_state.hpp"
#include "droplet/physics.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace droplet::fpm {

enum class Phase : std::uint8_t { Liquid = 1, Gas = 2 };

/// Wall particles sit at x = a or x = b and carry boundary data; they never move.
enum class Role : std::uint8_t { Interior, Wall };

/// Meshfree Lagrangian points of both phases, kept sorted by x.
struct FpmParticleSet {
    std::vector<double> x;
    std::vector<double> rho;
    std::vector<double> u;
    std::vector<double> T;
    std::vector<double> p;
    std::vector<Phase> phase;
    std::vector<Role> role;
    double dx0 = 0.0;  ///< initial spacing
    double h = 0.0;    ///< interaction radius (3 dx0)

    std::size_t size() const { return x.size(); }
    void push_back(double xi, double rhoi, double ui, double Ti, double pi, Phase ph,
                   Role r = Role::Interior);
    void sort_by_x();
    bool is_sorted() const;
    std::size_t count(Phase ph) const;
    std::vector<std::size_t> indices(Phase ph) const;
};

enum class Filter { Any, Gas, Liquid };

bool matches(Filter f, Phase ph);

/// Indices with |x_i - x0| <= h passing the filter; `exclude` drops one index.
std::vector<std::size_t> neighbor_search(const FpmParticleSet& set, double x0, double h, Filter filter,
                                         std::optional<std::size_t> exclude = std::nullopt);

/// Support radius of derivative stencils in units of the local gap. With the Gaussian
/// weight at alpha = 4 the second-derivative stencil of a uniform line is dissipative at
/// every wavenumber for ratios in (3, 3.8); at exactly 3 the outermost pair sits on the
/// support edge and rounding can drop it.
inline constexpr double kStencilRatio = 3.1;

struct LsqOptions {
    double alpha = 4.0;
    double max_condition = 1e12;
};

/// Value and derivatives of a local Taylor polynomial.
struct TaylorFit {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Weighted least-squares fit of psi_i = psi_0 + dx_i psi' + dx_i^2/2 psi'' with Gaussian
/// weights exp(-alpha dx^2/h^2). Exact for quadratics.
/// Throws StencilError for fewer than 3 points and SingularStencilError when the scaled
/// normal matrix has a condition number above `max_condition`.
TaylorFit lsq_fit(std::span<const double> dx, std::span<const double> values, double h,
                  const LsqOptions& opt = {});

/// First-order variant (psi_0 + dx psi'), used to extrapolate noisy data; needs >= 2 points.
TaylorFit lsq_fit_linear(std::span<const double> dx, std::span<const double> values, double h,
                         const LsqOptions& opt = {});

enum class Quantity { Rho, U, T, P };

std::span<const double> quantity(const FpmParticleSet& set, Quantity q);

/// Taylor fit of one particle quantity around x0 over neighbours within h passing `filter`.
TaylorFit lsq_derivatives(const FpmParticleSet& set, Quantity q, double x0, double h, Filter filter,
                          const LsqOptions& opt = {});

/// Known interface value entering gas stencils for u and T.
struct DirichletNode {
    double x;
    double u;
    double T;
};

/// Dirichlet nodes for both interfaces of a droplet.
std::vector<DirichletNode> interface_nodes(const InterfaceState& iface);

struct GasRates {
    std::vector<double> drho;
    std::vector<double> du;
    std::vector<double> dT;
};

/// Lagrangian compressible Navier-Stokes right-hand side in 1D for every interior gas
/// particle (zero for liquid and wall particles):
///   drho/dt = -rho u_x
///   du/dt   = -p_x/rho + (4/3) (mu/rho) u_xx
///   dT/dt   = (-p u_x + (4/3) mu u_x^2 + kappa T_xx) / (c_v rho)
/// Stencils use gas particles only; the Dirichlet nodes add rows to the u and T fits. The
/// smoothing length is local_smoothing_length rather than set.h.
/// Stencil failures widen h by 1.5 once before propagating.
/// kStencilRatio times the mean gap over the two neighbours on each side of particle i,
/// so that stencils keep their width in gaps after insertion or compression.
double local_smoothing_length(const FpmParticleSet& set, std::size_t i);

GasRates compressible_rhs(const FpmParticleSet& set, std::span<const DirichletNode> dirichlet,
                          const physics::GasSpecies& gas, const physics::Transport& transport,
                          const LsqOptions& opt = {});

using StateVector = std::vector<double>;
using RhsFunction = std::function<StateVector(const StateVector&, double /*stage time offset*/)>;

/// Two-stage Runge-Kutta (Heun): y+ = y + dt/2 (f(y) + f(y + dt f(y))).
StateVector heun_step(const StateVector& y, const RhsFunction& f, double dt);

/// Boundary data of the compressible gas at x = a and x = b.
struct GasWall {
    double u = 0.0;
    double T = 0.0;
    bool u_zero_gradient = false;  ///< u copied from the nearest interior particle
    std::optional<double> rho;     ///< held density; zero-gradient when empty
};

struct GasWalls {
    GasWall left;
    GasWall right;
};

/// Advances every interior gas particle (x, rho, u, T) by one Heun step. The interface
/// nodes move with u_I during the step. Wall particles are refreshed afterwards
/// (Dirichlet u/T or zero-gradient u, held or zero-gradient rho) and p = rho R T is restored.
/// Throws StepRejected on negative density/temperature or particle crossing.
void advance_gas(FpmParticleSet& set, const InterfaceState& iface, const GasWalls& walls,
                 const physics::GasSpecies& gas, const physics::Transport& transport, double dt,
                 const LsqOptions& opt = {});

struct ManagementStats {
    std::size_t inserted = 0;
    std::size_t removed = 0;
    std::size_t skipped = 0;
};

struct ManagementOptions {
    double insert_factor = 1.2;
    double remove_factor = 0.2;
    LsqOptions lsq;
};

/// One left-to-right pass of particle insertion/removal.
///
/// A same-phase gap above insert_factor*dx0 receives a midpoint particle; a same-phase
/// pair closer than remove_factor*dx0 is replaced by one midpoint particle (wall particles
/// are kept). Fields of new particles come from least-squares value fits over same-phase
/// neighbours. Across the gas-liquid interface only gas particles are added or removed;
/// gas insertions that would land inside (x_L, x_R) are skipped.
ManagementStats manage_particles(FpmParticleSet& set, std::span<const DirichletNode> dirichlet,
                                 const physics::GasSpecies& gas, const ManagementOptions& opt = {});

} // namespace droplet::fpm
