#include "droplet/frame.hpp"

#include "droplet/error.hpp"
#include "droplet/liquid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace droplet {

std::vector<double> comparison_grid(double a, double b, std::size_t n)
{
    if (n < 2 || !(b > a)) {
        throw DomainError("comparison_grid: need n >= 2 and a < b");
    }
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    g.back() = b;
    return g;
}

namespace {

// Linear interpolation on samples [lo, hi) of (xs, ys), constant beyond the ends.
double interp(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t lo, std::size_t hi,
              double x)
{
    if (x <= xs[lo]) {
        return ys[lo];
    }
    if (x >= xs[hi - 1]) {
        return ys[hi - 1];
    }
    const auto it = std::upper_bound(xs.begin() + static_cast<std::ptrdiff_t>(lo),
                                     xs.begin() + static_cast<std::ptrdiff_t>(hi), x);
    const auto j = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

} // namespace

OutputFrame build_frame(const std::vector<double>& grid, double x_L, double x_R, const GasSamples& gas,
                        const LiquidSamples& liq)
{
    if (grid.empty()) {
        throw SolverError("build_frame: empty grid");
    }
    if (liq.x.empty()) {
        throw SolverError("build_frame: no liquid samples");
    }
    // Split the gas samples into the two sides of the droplet.
    const auto split = static_cast<std::size_t>(
        std::lower_bound(gas.x.begin(), gas.x.end(), 0.5 * (x_L + x_R)) - gas.x.begin());
    OutputFrame f;
    f.x_L = x_L;
    f.x_R = x_R;
    f.x = grid;
    const std::size_t n = grid.size();
    f.rho.resize(n);
    f.p.resize(n);
    f.u.resize(n);
    f.T.resize(n);
    f.phase.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid[i];
        if (x >= x_L && x <= x_R) {
            f.phase[i] = fpm::Phase::Liquid;
            f.rho[i] = liq.rho_l;
            f.u[i] = liq.u;
            f.p[i] = liquid::liquid_pressure_field(liq.p_L, liq.p_R, x_L, x_R, x);
            f.T[i] = interp(liq.x, liq.T, 0, liq.x.size(), x);
            continue;
        }
        const bool left = x < x_L;
        const std::size_t lo = left ? 0 : split;
        const std::size_t hi = left ? split : gas.x.size();
        if (lo == hi) {
            throw SolverError("build_frame: no gas samples on the " + std::string(left ? "left" : "right") +
                              " of the droplet");
        }
        f.phase[i] = fpm::Phase::Gas;
        f.rho[i] = interp(gas.x, gas.rho, lo, hi, x);
        f.p[i] = interp(gas.x, gas.p, lo, hi, x);
        f.u[i] = interp(gas.x, gas.u, lo, hi, x);
        f.T[i] = interp(gas.x, gas.T, lo, hi, x);
    }
    return f;
}

namespace {

std::string num(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_num(std::string_view s, const std::filesystem::path& path)
{
    while (!s.empty() && s.front() == ' ') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) {
        // from_chars rejects "inf"/"nan" spellings produced by to_chars only on some libraries.
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw SolverError(path.string() + ": cannot parse number '" + std::string(s) + "'");
    }
    return v;
}

} // namespace

void write_frame_csv(const OutputFrame& frame, const std::filesystem::path& path)
{
    if (frame.size() == 0) {
        throw SolverError("write_frame_csv: frame has no grid points");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SolverError("write_frame_csv: cannot open " + path.string());
    }
    out << "# time: " << num(frame.time) << '\n';
    out << "# algorithm: " << frame.algorithm << '\n';
    out << "# scenario: " << frame.scenario << '\n';
    out << "# seed: " << frame.seed << '\n';
    out << "# kn:";
    for (double k : frame.kn) {
        out << ' ' << num(k);
    }
    out << '\n';
    out << "# x_L: " << num(frame.x_L) << '\n';
    out << "# x_R: " << num(frame.x_R) << '\n';
    out << "x,rho,p,u,T,phase\n";
    for (std::size_t i = 0; i < frame.size(); ++i) {
        out << num(frame.x[i]) << ',' << num(frame.rho[i]) << ',' << num(frame.p[i]) << ',' << num(frame.u[i])
            << ',' << num(frame.T[i]) << ',' << (frame.phase[i] == fpm::Phase::Liquid ? "liquid" : "gas") << '\n';
    }
    if (!out) {
        throw SolverError("write_frame_csv: write failed for " + path.string());
    }
}

OutputFrame read_frame_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SolverError("read_frame_csv: cannot open " + path.string());
    }
    OutputFrame f;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) {
                continue;
            }
            const std::string key = line.substr(2, colon - 2);
            std::string value = line.substr(colon + 1);
            if (!value.empty() && value.front() == ' ') {
                value.erase(0, 1);
            }
            if (key == "time") f.time = parse_num(value, path);
            else if (key == "algorithm") f.algorithm = value;
            else if (key == "scenario") f.scenario = value;
            else if (key == "seed") f.seed = std::stoull(value);
            else if (key == "x_L") f.x_L = parse_num(value, path);
            else if (key == "x_R") f.x_R = parse_num(value, path);
            else if (key == "kn") {
                std::istringstream ks(value);
                std::string tok;
                while (ks >> tok) {
                    f.kn.push_back(parse_num(tok, path));
                }
            }
            continue;
        }
        if (!header) {
            if (line != "x,rho,p,u,T,phase") {
                throw SolverError(path.string() + ": unexpected header '" + line + "'");
            }
            header = true;
            continue;
        }
        std::string_view rest(line);
        double vals[5];
        for (double& v : vals) {
            const auto c = rest.find(',');
            if (c == std::string_view::npos) {
                throw SolverError(path.string() + ": short row '" + line + "'");
            }
            v = parse_num(rest.substr(0, c), path);
            rest.remove_prefix(c + 1);
        }
        f.x.push_back(vals[0]);
        f.rho.push_back(vals[1]);
        f.p.push_back(vals[2]);
        f.u.push_back(vals[3]);
        f.T.push_back(vals[4]);
        if (rest == "liquid") {
            f.phase.push_back(fpm::Phase::Liquid);
        } else if (rest == "gas") {
            f.phase.push_back(fpm::Phase::Gas);
        } else {
            throw SolverError(path.string() + ": unknown phase '" + std::string(rest) + "'");
        }
    }
    if (!header) {
        throw SolverError(path.string() + ": missing header");
    }
    return f;
}

std::vector<OutputFrame> read_run_dir(const std::filesystem::path& dir)
{
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.starts_with("frame_") && name.ends_with(".csv")) {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw SolverError("read_run_dir: no frame_*.csv in " + dir.string());
    }
    std::vector<OutputFrame> frames;
    for (const auto& p : files) {
        frames.push_back(read_frame_csv(p));
    }
    return frames;
}

bool CompareReport::all_pass() const
{
    return std::all_of(metrics.begin(), metrics.end(), [](const auto& m) { return m.pass; });
}

const FieldMetric& CompareReport::find(const std::string& field, double time) const
{
    const FieldMetric* best = nullptr;
    for (const auto& m : metrics) {
        if (m.field == field && (!best || std::abs(m.time - time) < std::abs(best->time - time))) {
            best = &m;
        }
    }
    if (!best) {
        throw SolverError("CompareReport: no metric for field " + field);
    }
    return *best;
}

std::vector<std::uint8_t> comparison_mask(const OutputFrame& a, const OutputFrame& b, int exclude)
{
    const std::size_t n = a.size();
    std::vector<std::uint8_t> mask(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        mask[i] = a.phase[i] == fpm::Phase::Gas && b.phase[i] == fpm::Phase::Gas;
    }
    auto drop_near = [&](const OutputFrame& f, double x_I, bool left_side) {
        // Gas points on the outer side of the interface, nearest first.
        std::vector<std::size_t> side;
        for (std::size_t i = 0; i < n; ++i) {
            if (f.phase[i] == fpm::Phase::Gas && (left_side ? f.x[i] < x_I : f.x[i] > x_I)) {
                side.push_back(i);
            }
        }
        std::sort(side.begin(), side.end(), [&](std::size_t i, std::size_t j) {
            return std::abs(f.x[i] - x_I) < std::abs(f.x[j] - x_I);
        });
        for (std::size_t k = 0; k < side.size() && k < static_cast<std::size_t>(exclude); ++k) {
            mask[side[k]] = 0;
        }
    };
    for (const auto* f : {&a, &b}) {
        drop_near(*f, f->x_L, true);
        drop_near(*f, f->x_R, false);
    }
    return mask;
}

CompareReport compare_runs(const std::vector<OutputFrame>& a, const std::vector<OutputFrame>& b,
                           const Thresholds& thresholds, int exclude)
{
    if (a.size() != b.size()) {
        throw SolverError("compare_runs: runs have " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()) + " frames");
    }
    CompareReport report;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& fa = a[k];
        const auto& fb = b[k];
        const double scale = std::max({std::abs(fa.time), std::abs(fb.time), 1e-300});
        if (std::abs(fa.time - fb.time) > 1e-9 * scale) {
            throw SolverError("compare_runs: frame times differ (" + num(fa.time) + " vs " + num(fb.time) + ")");
        }
        if (fa.x != fb.x) {
            throw SolverError("compare_runs: comparison grids differ at t = " + num(fa.time));
        }
        const auto mask = comparison_mask(fa, fb, exclude);
        struct Item {
            const char* name;
            const std::vector<double>& va;
            const std::vector<double>& vb;
            double threshold;
        };
        const Item items[] = {{"rho", fa.rho, fb.rho, thresholds.rho},
                              {"p", fa.p, fb.p, thresholds.p},
                              {"u", fa.u, fb.u, thresholds.u},
                              {"T", fa.T, fb.T, thresholds.T}};
        for (const auto& it : items) {
            double num1 = 0, den1 = 0, numi = 0, deni = 0;
            for (std::size_t i = 0; i < fa.size(); ++i) {
                if (!mask[i]) {
                    continue;
                }
                const double d = std::abs(it.va[i] - it.vb[i]);
                num1 += d;
                den1 += std::abs(it.va[i]);
                numi = std::max(numi, d);
                deni = std::max(deni, std::abs(it.va[i]));
            }
            auto ratio = [](double n, double d) {
                if (d > 0.0) return n / d;
                return n == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            };
            FieldMetric m;
            m.time = fa.time;
            m.field = it.name;
            m.l1 = ratio(num1, den1);
            m.linf = ratio(numi, deni);
            m.threshold = it.threshold;
            m.pass = m.l1 <= it.threshold;
            report.metrics.push_back(m);
        }
    }
    return report;
}

std::string format_report(const CompareReport& report)
{
    std::ostringstream out;
    out << "time,field,rel_l1,rel_linf,threshold,result\n";
    for (const auto& m : report.metrics) {
        out << num(m.time) << ',' << m.field << ',' << num(m.l1) << ',' << num(m.linf) << ',' << num(m.threshold)
            << ',' << (m.pass ? "pass" : "fail") << '\n';
    }
    return out.str();
}

double temperature_jump(const OutputFrame& frame)
{
    double jump = 0.0;
    const std::size_t n = frame.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (frame.phase[i] != frame.phase[i + 1]) {
            jump = std::max(jump, std::abs(frame.T[i + 1] - frame.T[i]));
        }
    }
    return jump;
}

} // namespace droplet
