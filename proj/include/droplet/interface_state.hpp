#pragma once

#include "droplet/physics.hpp"

namespace droplet {

enum class Side { Left, Right };

/// Gas-liquid interface data for one time step.
struct InterfaceState {
    double x_L = 0.0;
    double x_R = 0.0;
    double u_I = 0.0;          ///< common liquid velocity
    double T_left = 0.0;       ///< interface temperature at x_L
    double T_right = 0.0;      ///< interface temperature at x_R
    double p_left = 0.0;       ///< liquid-side pressure at x_L
    double p_right = 0.0;      ///< liquid-side pressure at x_R
    physics::Algorithm source = physics::Algorithm::I;

    double position(Side s) const { return s == Side::Left ? x_L : x_R; }
    double temperature(Side s) const { return s == Side::Left ? T_left : T_right; }
    double width() const { return x_R - x_L; }
};

} // namespace droplet
