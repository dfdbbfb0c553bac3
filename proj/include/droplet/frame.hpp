#pragma once

#include "droplet/fpm.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace droplet {

/// Field snapshot on the uniform comparison grid.
struct OutputFrame {
    double time = 0.0;
    std::string algorithm;
    std::string scenario;
    std::uint64_t seed = 0;
    double x_L = 0.0;
    double x_R = 0.0;
    std::vector<double> kn;
    std::vector<double> x, rho, p, u, T;
    std::vector<fpm::Phase> phase;

    std::size_t size() const { return x.size(); }
};

/// Gas values at sample positions (particles or cell centres), ascending in x.
struct GasSamples {
    std::vector<double> x, rho, p, u, T;
};

struct LiquidSamples {
    std::vector<double> x, T;  ///< ascending
    double u = 0.0;
    double p_L = 0.0;
    double p_R = 0.0;
    double rho_l = 0.0;
};

/// n points from a to b inclusive.
std::vector<double> comparison_grid(double a, double b, std::size_t n = 200);

/// Grid points in [x_L, x_R] are liquid: rho_l, the common u, the linear pressure and
/// linearly interpolated T. Gas points interpolate linearly between samples on their own
/// side of the droplet, with constant extension beyond the outermost samples.
OutputFrame build_frame(const std::vector<double>& grid, double x_L, double x_R, const GasSamples& gas,
                        const LiquidSamples& liq);

/// Metadata lines start with '#', then the header x,rho,p,u,T,phase. Numbers carry 17
/// significant digits so that read_frame_csv restores them bit for bit.
void write_frame_csv(const OutputFrame& frame, const std::filesystem::path& path);
OutputFrame read_frame_csv(const std::filesystem::path& path);

/// frame_*.csv of a run directory in file-name order.
std::vector<OutputFrame> read_run_dir(const std::filesystem::path& dir);

struct Thresholds {
    double rho = 0.05;
    double p = 0.05;
    double u = 0.05;
    double T = 0.07;
};

struct FieldMetric {
    double time = 0.0;
    std::string field;
    double l1 = 0.0;    ///< sum |A-B| / sum |A|
    double linf = 0.0;  ///< max |A-B| / max |A|
    double threshold = 0.0;
    bool pass = false;
};

struct CompareReport {
    std::vector<FieldMetric> metrics;
    bool all_pass() const;
    /// Metric of one field at the frame closest to `time`.
    const FieldMetric& find(const std::string& field, double time) const;
};

/// Gas points of both frames, minus the `exclude` gas points nearest to each interface.
std::vector<std::uint8_t> comparison_mask(const OutputFrame& a, const OutputFrame& b, int exclude = 3);

/// Relative differences per field and frame. Throws SolverError on mismatched times or grids.
CompareReport compare_runs(const std::vector<OutputFrame>& a, const std::vector<OutputFrame>& b,
                           const Thresholds& thresholds = {}, int exclude = 3);

std::string format_report(const CompareReport& report);

/// Largest |T(gas) - T(liquid)| between the grid points adjacent to either interface.
double temperature_jump(const OutputFrame& frame);

} // namespace droplet
