#pragma once

#include "droplet/interface_state.hpp"
#include "droplet/physics.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace droplet::dsmc {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from (seed, a, b) with a splitmix64 finaliser.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Simulated molecules in 1D physical space with 3D velocities (structure of arrays).
struct MoleculeEnsemble {
    std::vector<double> x;
    std::vector<double> vx;
    std::vector<double> vy;
    std::vector<double> vz;
    double weight = 0.0;  ///< real molecules per simulated molecule

    std::size_t size() const { return x.size(); }
    void reserve(std::size_t n);
    void push_back(double xi, double vxi, double vyi, double vzi);
    /// Gathers all arrays by `order` (order[k] = old index of new slot k).
    void permute(std::span<const std::uint32_t> order);
    /// Removes molecules whose flag is non-zero, keeping the relative order.
    std::size_t erase_flagged(std::span<const std::uint8_t> flags);
};

/// Initial gas state on [lo, hi].
struct GasRegion {
    double lo;
    double hi;
    double rho;
    double u;
    double T;
};

/// Gas part of one base cell (or a merged pair, see build_cell_grid).
struct SampleCell {
    double lo;
    double hi;
    int base;  ///< index of the base cell that owns the cell centre

    double width() const { return hi - lo; }
    double center() const { return 0.5 * (lo + hi); }
};

/// Collision and sampling cells covering the gas part of [a, b].
///
/// Sample cells are the base cells clipped to the gas domain. A clipped
/// fragment narrower than merge_fraction * dx is merged into its gas-side
/// neighbour. Each sample cell is split into `refinement[i]` equal collision
/// sub-cells. After sort_into_cells, molecules of sub-cell s occupy the
/// contiguous range [mol_start[s], mol_start[s+1]).
struct CellGrid {
    double a = 0.0;
    double b = 0.0;
    int n_base = 0;
    std::vector<SampleCell> cells;
    std::vector<int> refinement;
    std::vector<std::size_t> sub_offset;  ///< first sub-cell of each sample cell, size cells+1
    std::vector<std::size_t> mol_start;   ///< per sub-cell, size n_sub+1 (valid after sorting)
    std::vector<int> base_lookup;         ///< 2 sample-cell candidates per base cell (-1 = none)

    double dx() const { return (b - a) / n_base; }
    std::size_t subcell_count() const { return sub_offset.empty() ? 0 : sub_offset.back(); }
    double subcell_width(std::size_t cell) const { return cells[cell].width() / refinement[cell]; }
    std::size_t molecules_in_cell(std::size_t cell) const;
    bool sorted() const { return mol_start.size() == subcell_count() + 1; }
    /// Sample cell containing x, or -1 if x is not in the gas domain.
    int locate(double x) const;
};

CellGrid build_cell_grid(double a, double b, int n_base, double x_L, double x_R,
                         double merge_fraction = 0.5);

/// Splits every sample cell wider than the local mean free path into the smallest
/// power-of-two number of sub-cells with width <= lambda. `lambda_per_base` is
/// indexed by base cell. Throws SolverError if the factor would exceed `cap`.
/// Invalidates the molecule sorting.
void refine_cells(CellGrid& grid, std::span<const double> lambda_per_base, int cap = 64);

/// Counting sort of the ensemble into collision sub-cells. Throws StateError if a
/// molecule lies outside the gas domain.
void sort_into_cells(MoleculeEnsemble& ens, CellGrid& grid);

/// Maxwellian initialisation. The weight is chosen so that the densest region gets
/// `molecules_per_cell` molecules per full base cell. Molecules are placed only in the
/// gas domain, i.e. outside (x_L, x_R).
MoleculeEnsemble init_maxwellian_cells(std::span<const GasRegion> regions, double a, double b,
                                       int n_base, double x_L, double x_R,
                                       std::size_t molecules_per_cell,
                                       const physics::GasSpecies& gas, Rng& rng);

void free_flight(MoleculeEnsemble& ens, double dt);

enum class WallType { Diffuse, Outflow };

struct WallSpec {
    WallType type = WallType::Diffuse;
    double u = 0.0;
    double T = 0.0;
};

struct BoundarySet {
    double a = 0.0;
    double b = 0.0;
    WallSpec left;
    WallSpec right;
};

struct BoundaryStats {
    std::size_t interface_hits = 0;
    std::size_t wall_hits = 0;
    std::size_t deleted = 0;
};

/// Normal speed drawn from the flux-weighted half-range Maxwellian.
double sample_flux_normal_speed(double T, const physics::GasSpecies& gas, Rng& rng);

/// Interface and wall treatment after free flight.
///
/// The pre-flight position is recovered as x - vx*dt. Molecules that entered
/// [x_L, x_R] are put on the interface they crossed and re-emitted diffusely with
/// the interface velocity and temperature. A molecule that starts and ends the flight
/// inside the droplet was overtaken by it and goes to the interface nearest its start.
/// Diffuse walls re-emit with the wall
/// data; outflow walls delete every molecule outside [a, b].
BoundaryStats apply_boundary_interface(MoleculeEnsemble& ens, const InterfaceState& iface,
                                       const BoundarySet& walls, double dt,
                                       const physics::GasSpecies& gas, Rng& rng);

/// Number of molecules strictly inside (x_L, x_R).
std::size_t molecules_inside_liquid(const MoleculeEnsemble& ens, double x_L, double x_R);

struct InflowState {
    double rho = 0.0;
    double u = 0.0;
    double T = 0.0;
};

struct InflowSpec {
    std::optional<InflowState> left;
    std::optional<InflowState> right;
    double cell_width = 0.0;  ///< width of one ghost cell
    int ghost_cells = 2;
};

/// Fills the ghost cells outside [a, b] with fresh Maxwellian molecules. Call right
/// before free_flight; an outflow wall then discards the ones that stay outside.
/// Returns the number of molecules created.
std::size_t inflow_ghost_cells(MoleculeEnsemble& ens, const InflowSpec& spec, double a, double b,
                               const physics::GasSpecies& gas, Rng& rng);

struct CollisionStats {
    std::size_t pairs = 0;
    std::size_t collisions = 0;
    std::size_t subcycled_cells = 0;
    double max_probability = 0.0;
};

/// Applies v' = v - n[n.(v-w)], w' = w + n[n.(v-w)] for a unit vector n.
void elastic_collision(double* v, double* w, const double* n);

/// Nanbu-Babovsky collision step.
///
/// Molecules of each sub-cell are paired at random into disjoint pairs; pair (i,j)
/// collides with probability n sigma |v_i - v_j| dt, n the real number density of the
/// sub-cell and sigma = pi d^2. The impact direction n has density proportional to
/// |n.(v_i - v_j)|, i.e. the relative velocity is scattered isotropically. Each sub-cell uses its own generator seeded from
/// (seed, step, sub-cell), so the result does not depend on the worker count.
/// A probability above one throws TimeStepViolation unless `max_subcycles` > 0, in
/// which case that sub-cell is advanced with two half steps (recursively).
CollisionStats collide_cells(MoleculeEnsemble& ens, const CellGrid& grid, double dt,
                             const physics::GasSpecies& gas, std::uint64_t seed,
                             std::uint64_t step, int max_subcycles = 0);

struct CellMoments {
    std::vector<double> center;
    std::vector<double> volume;
    std::vector<std::size_t> count;
    std::vector<std::uint8_t> active;
    std::vector<double> rho;
    std::vector<double> ux;
    std::vector<double> uy;
    std::vector<double> uz;
    std::vector<double> T;
    std::vector<double> e;
    std::vector<double> p;
    std::vector<double> phi11;
    std::vector<double> q1;

    std::size_t size() const { return center.size(); }
    void resize(std::size_t n);
};

/// Cell averages of density, velocity, internal energy, pressure, phi_11 and q_1
/// (unit cross-sectional area). Cells without molecules are inactive.
CellMoments sample_moments(const MoleculeEnsemble& ens, const CellGrid& grid,
                           const physics::GasSpecies& gas);

enum class Field { Rho, U, T, P, Phi11, Q1 };

std::span<const double> field_values(const CellMoments& m, Field f);

/// Shepard interpolation of `values` at x over active cells within h, Gaussian weight
/// exp(-alpha d^2/h^2). Throws StateError if no active cell lies within h.
double shepard_at(const CellMoments& m, std::span<const double> values, double x, double h,
                  double alpha = 2.0);

/// Shepard smoothing of one field at every active cell centre (inactive cells keep 0).
std::vector<double> shepard_smooth(const CellMoments& m, Field f, double h, double alpha = 2.0);

/// Smooths rho, u_x, T, p, phi_11 and q_1; the remaining fields are copied.
CellMoments smooth_moments(const CellMoments& m, double h, double alpha = 2.0);

} // namespace droplet::dsmc
