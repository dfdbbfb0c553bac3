#pragma once

#include "droplet/dsmc.hpp"
#include "droplet/fpm.hpp"
#include "droplet/interface_state.hpp"

#include <optional>
#include <span>
#include <utility>

namespace droplet::coupling {

/// (min, max) position of the liquid particles. Throws StateError for fewer than two.
std::pair<double, double> detect_interface(const fpm::FpmParticleSet& set);

/// Sample rows of one phase: offsets from the interface, values and Gaussian radius.
struct SideRows {
    std::vector<double> dx;
    std::vector<double> T;
    double h = 0.0;
};

struct InterfaceTemperature {
    double T_I = 0.0;
    double dT_gas = 0.0;
    double dT_liquid = 0.0;
};

/// Weighted least squares for T_I and the one-sided gradients from Taylor rows
/// T_i = T_I + dx_i T'_side, subject to kappa_g T'_gas = kappa_l T'_liquid exactly.
/// Needs >= 2 rows per phase; throws StencilError otherwise and SingularStencilError on
/// a rank-deficient system.
InterfaceTemperature solve_interface_temperature_ns(const SideRows& gas, const SideRows& liq, double kappa_g,
                                                    double kappa_l, double alpha = 2.0);

/// Same rows with the liquid gradient fixed by -kappa_l T'_liquid = q_g.
InterfaceTemperature solve_interface_temperature_boltzmann(const SideRows& gas, const SideRows& liq,
                                                           double kappa_l, double q_g, double alpha = 2.0);

/// Gas particles on `side` of x_I within h (never across the droplet).
SideRows gas_rows(const fpm::FpmParticleSet& set, double x_I, Side side, double h);

/// Liquid particles within h of x_I, without the particle sitting on the interface.
SideRows liquid_rows(const fpm::FpmParticleSet& set, double x_I, double h);

/// p_I = p - (4/3) mu u_x, both extrapolated from gas-only stencils on `side`. When u_I is
/// given it enters the u fit as a row at x_I.
double interface_pressure_ns(const fpm::FpmParticleSet& set, double x_I, Side side, double mu,
                             std::optional<double> u_I = std::nullopt, const fpm::LsqOptions& opt = {});

InterfaceTemperature interface_temperature_ns(const fpm::FpmParticleSet& set, double x_I, Side side,
                                              double kappa_g, double kappa_l);

/// Active cells on `side` of x_I nearest to it (at most n), ordered by distance.
std::vector<std::size_t> nearest_active_cells(const dsmc::CellMoments& m, double x_I, Side side,
                                              std::size_t n = 4);

/// Linear least-squares extrapolation of a smoothed moment to x_I from the nearest
/// active cells on `side`; Gaussian radius 1.25 times the farthest distance.
/// Throws StencilError with fewer than two active cells.
fpm::TaylorFit extrapolate_moment(const dsmc::CellMoments& m, dsmc::Field f, double x_I, Side side,
                                  std::size_t n = 4);

/// p_I = phi_11 extrapolated to the interface.
double interface_pressure_boltzmann(const dsmc::CellMoments& m, double x_I, Side side);

InterfaceTemperature interface_temperature_boltzmann(const dsmc::CellMoments& m, const fpm::FpmParticleSet& liq,
                                                     double x_I, Side side, double kappa_l);

} // namespace droplet::coupling
