#include "droplet/fpm.hpp"

#include "droplet/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace droplet::fpm {

using physics::GasSpecies;
using physics::Transport;

void FpmParticleSet::push_back(double xi, double rhoi, double ui, double Ti, double pi, Phase ph, Role r)
{
    x.push_back(xi);
    rho.push_back(rhoi);
    u.push_back(ui);
    T.push_back(Ti);
    p.push_back(pi);
    phase.push_back(ph);
    role.push_back(r);
}

void FpmParticleSet::sort_by_x()
{
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    auto gather = [&](auto& v) {
        auto out = v;
        for (std::size_t k = 0; k < order.size(); ++k) {
            out[k] = v[order[k]];
        }
        v.swap(out);
    };
    gather(x);
    gather(rho);
    gather(u);
    gather(T);
    gather(p);
    gather(phase);
    gather(role);
}

bool FpmParticleSet::is_sorted() const
{
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) {
            return false;
        }
    }
    return true;
}

std::size_t FpmParticleSet::count(Phase ph) const
{
    return static_cast<std::size_t>(std::count(phase.begin(), phase.end(), ph));
}

std::vector<std::size_t> FpmParticleSet::indices(Phase ph) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i) {
        if (phase[i] == ph) {
            out.push_back(i);
        }
    }
    return out;
}

bool matches(Filter f, Phase ph)
{
    switch (f) {
    case Filter::Any: return true;
    case Filter::Gas: return ph == Phase::Gas;
    case Filter::Liquid: return ph == Phase::Liquid;
    }
    return false;
}

std::vector<std::size_t> neighbor_search(const FpmParticleSet& set, double x0, double h, Filter filter,
                                         std::optional<std::size_t> exclude)
{
    std::vector<std::size_t> out;
    auto first = std::lower_bound(set.x.begin(), set.x.end(), x0 - h);
    for (auto it = first; it != set.x.end() && *it <= x0 + h; ++it) {
        const auto i = static_cast<std::size_t>(it - set.x.begin());
        if (exclude && *exclude == i) {
            continue;
        }
        if (std::abs(*it - x0) <= h && matches(filter, set.phase[i])) {
            out.push_back(i);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Least squares

namespace {

template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

template <std::size_t N>
double norm1(const Mat<N>& a)
{
    double best = 0.0;
    for (std::size_t c = 0; c < N; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < N; ++r) {
            s += std::abs(a[r][c]);
        }
        best = std::max(best, s);
    }
    return best;
}

// Gauss-Jordan with partial pivoting; returns false if a pivot vanishes.
template <std::size_t N>
bool invert(Mat<N> a, Mat<N>& inv)
{
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = 0; c < N; ++c) {
            inv[r][c] = (r == c) ? 1.0 : 0.0;
        }
    }
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
                piv = r;
            }
        }
        if (a[piv][col] == 0.0) {
            return false;
        }
        std::swap(a[col], a[piv]);
        std::swap(inv[col], inv[piv]);
        const double d = a[col][col];
        for (std::size_t c = 0; c < N; ++c) {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for (std::size_t r = 0; r < N; ++r) {
            if (r == col) {
                continue;
            }
            const double f = a[r][col];
            if (f == 0.0) {
                continue;
            }
            for (std::size_t c = 0; c < N; ++c) {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return true;
}

template <std::size_t N>
std::array<double, N> weighted_fit(std::span<const double> dx, std::span<const double> values, double h,
                                   const LsqOptions& opt)
{
    if (dx.size() != values.size()) {
        throw SolverError("lsq_fit: size mismatch");
    }
    if (dx.size() < N) {
        throw StencilError("lsq_fit: " + std::to_string(dx.size()) + " points for " + std::to_string(N) +
                           " unknowns");
    }
    Mat<N> a{};
    std::array<double, N> rhs{};
    for (std::size_t k = 0; k < dx.size(); ++k) {
        const double d = dx[k] / h;
        const double w = std::exp(-opt.alpha * d * d);
        std::array<double, N> basis{};
        basis[0] = 1.0;
        if constexpr (N > 1) {
            basis[1] = d;
        }
        if constexpr (N > 2) {
            basis[2] = 0.5 * d * d;
        }
        for (std::size_t r = 0; r < N; ++r) {
            rhs[r] += w * basis[r] * values[k];
            for (std::size_t c = 0; c < N; ++c) {
                a[r][c] += w * basis[r] * basis[c];
            }
        }
    }
    Mat<N> inv{};
    if (!invert(a, inv)) {
        throw SingularStencilError("lsq_fit: singular normal matrix");
    }
    const double cond = norm1(a) * norm1(inv);
    if (!(cond <= opt.max_condition)) {
        throw SingularStencilError("lsq_fit: condition number " + std::to_string(cond) + " above threshold");
    }
    std::array<double, N> coef{};
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = 0; c < N; ++c) {
            coef[r] += inv[r][c] * rhs[c];
        }
    }
    return coef;
}

} // namespace

TaylorFit lsq_fit(std::span<const double> dx, std::span<const double> values, double h, const LsqOptions& opt)
{
    const auto c = weighted_fit<3>(dx, values, h, opt);
    return {c[0], c[1] / h, c[2] / (h * h)};
}

TaylorFit lsq_fit_linear(std::span<const double> dx, std::span<const double> values, double h,
                         const LsqOptions& opt)
{
    const auto c = weighted_fit<2>(dx, values, h, opt);
    return {c[0], c[1] / h, 0.0};
}

std::span<const double> quantity(const FpmParticleSet& set, Quantity q)
{
    switch (q) {
    case Quantity::Rho: return set.rho;
    case Quantity::U: return set.u;
    case Quantity::T: return set.T;
    case Quantity::P: return set.p;
    }
    return {};
}

TaylorFit lsq_derivatives(const FpmParticleSet& set, Quantity q, double x0, double h, Filter filter,
                          const LsqOptions& opt)
{
    const auto nb = neighbor_search(set, x0, h, filter);
    const auto vals = quantity(set, q);
    std::vector<double> dx, v;
    dx.reserve(nb.size());
    v.reserve(nb.size());
    for (auto i : nb) {
        dx.push_back(set.x[i] - x0);
        v.push_back(vals[i]);
    }
    return lsq_fit(dx, v, h, opt);
}

std::vector<DirichletNode> interface_nodes(const InterfaceState& iface)
{
    return {{iface.x_L, iface.u_I, iface.T_left}, {iface.x_R, iface.u_I, iface.T_right}};
}

// ---------------------------------------------------------------------------
// Compressible gas

namespace {

struct GasStencil {
    std::vector<double> dx_gas, p;
    std::vector<double> dx_ext, u, T;

    void build(const FpmParticleSet& set, std::size_t i, double h, std::span<const DirichletNode> dirichlet)
    {
        dx_gas.clear();
        p.clear();
        dx_ext.clear();
        u.clear();
        T.clear();
        const double x0 = set.x[i];
        for (auto j : neighbor_search(set, x0, h, Filter::Gas)) {
            const double d = set.x[j] - x0;
            dx_gas.push_back(d);
            p.push_back(set.p[j]);
            dx_ext.push_back(d);
            u.push_back(set.u[j]);
            T.push_back(set.T[j]);
        }
        for (const auto& node : dirichlet) {
            const double d = node.x - x0;
            if (std::abs(d) <= h) {
                dx_ext.push_back(d);
                u.push_back(node.u);
                T.push_back(node.T);
            }
        }
    }
};

} // namespace

double local_smoothing_length(const FpmParticleSet& set, std::size_t i)
{
    const std::size_t n = set.size();
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    const std::size_t hi = std::min(n - 1, i + 2);
    return kStencilRatio * (set.x[hi] - set.x[lo]) / static_cast<double>(hi - lo);
}

GasRates compressible_rhs(const FpmParticleSet& set, std::span<const DirichletNode> dirichlet,
                          const GasSpecies& gas, const Transport& transport, const LsqOptions& opt)
{
    const std::size_t n = set.size();
    GasRates r;
    r.drho.assign(n, 0.0);
    r.du.assign(n, 0.0);
    r.dT.assign(n, 0.0);
    GasStencil st;
    for (std::size_t i = 0; i < n; ++i) {
        if (set.phase[i] != Phase::Gas || set.role[i] == Role::Wall) {
            continue;
        }
        TaylorFit fp, fu, fT;
        double h = local_smoothing_length(set, i);
        for (int attempt = 0;; ++attempt) {
            st.build(set, i, h, dirichlet);
            try {
                fp = lsq_fit(st.dx_gas, st.p, h, opt);
                fu = lsq_fit(st.dx_ext, st.u, h, opt);
                fT = lsq_fit(st.dx_ext, st.T, h, opt);
                break;
            } catch (const StencilError&) {
                if (attempt > 0) {
                    throw;
                }
                h *= 1.5;
            }
        }
        const double rho = set.rho[i];
        const double mu = transport.mu;
        r.drho[i] = -rho * fu.d1;
        r.du[i] = -fp.d1 / rho + (4.0 / 3.0) * (mu / rho) * fu.d2;
        r.dT[i] = (-set.p[i] * fu.d1 + (4.0 / 3.0) * mu * fu.d1 * fu.d1 + transport.kappa * fT.d2) /
                  (gas.c_v * rho);
    }
    return r;
}

StateVector heun_step(const StateVector& y, const RhsFunction& f, double dt)
{
    const StateVector k1 = f(y, 0.0);
    StateVector pred(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        pred[i] = y[i] + dt * k1[i];
    }
    const StateVector k2 = f(pred, dt);
    StateVector out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = y[i] + 0.5 * dt * (k1[i] + k2[i]);
    }
    return out;
}

namespace {

void refresh_walls(FpmParticleSet& set, const GasWalls& walls, const GasSpecies& gas)
{
    const std::size_t n = set.size();
    if (n < 2) {
        return;
    }
    if (set.role.front() == Role::Wall && set.phase[1] == Phase::Gas) {
        set.u[0] = walls.left.u_zero_gradient ? set.u[1] : walls.left.u;
        set.T[0] = walls.left.T;
        set.rho[0] = walls.left.rho.value_or(set.rho[1]);
        set.p[0] = set.rho[0] * gas.R * set.T[0];
    }
    if (set.role.back() == Role::Wall && set.phase[n - 2] == Phase::Gas) {
        set.u[n - 1] = walls.right.u_zero_gradient ? set.u[n - 2] : walls.right.u;
        set.T[n - 1] = walls.right.T;
        set.rho[n - 1] = walls.right.rho.value_or(set.rho[n - 2]);
        set.p[n - 1] = set.rho[n - 1] * gas.R * set.T[n - 1];
    }
}

} // namespace

void advance_gas(FpmParticleSet& set, const InterfaceState& iface, const GasWalls& walls,
                 const GasSpecies& gas, const Transport& transport, double dt, const LsqOptions& opt)
{
    std::vector<std::size_t> moving;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set.phase[i] == Phase::Gas && set.role[i] == Role::Interior) {
            moving.push_back(i);
        }
    }
    const std::size_t m = moving.size();
    StateVector y(4 * m);
    for (std::size_t k = 0; k < m; ++k) {
        const auto i = moving[k];
        y[k] = set.x[i];
        y[m + k] = set.rho[i];
        y[2 * m + k] = set.u[i];
        y[3 * m + k] = set.T[i];
    }

    FpmParticleSet stage = set;
    auto unpack = [&](const StateVector& s, double tau) {
        for (std::size_t i = 0; i < stage.size(); ++i) {
            if (stage.phase[i] == Phase::Liquid) {
                stage.x[i] = set.x[i] + tau * iface.u_I;
            }
        }
        for (std::size_t k = 0; k < m; ++k) {
            const auto i = moving[k];
            stage.x[i] = s[k];
            stage.rho[i] = s[m + k];
            stage.u[i] = s[2 * m + k];
            stage.T[i] = s[3 * m + k];
            stage.p[i] = stage.rho[i] * gas.R * stage.T[i];
        }
    };

    const RhsFunction rhs = [&](const StateVector& s, double tau) {
        unpack(s, tau);
        if (!stage.is_sorted()) {
            throw StepRejected("advance_gas: particles crossed during a stage");
        }
        InterfaceState moved = iface;
        moved.x_L += tau * iface.u_I;
        moved.x_R += tau * iface.u_I;
        const auto nodes = interface_nodes(moved);
        const GasRates r = compressible_rhs(stage, nodes, gas, transport, opt);
        StateVector out(4 * m);
        for (std::size_t k = 0; k < m; ++k) {
            const auto i = moving[k];
            out[k] = stage.u[i];
            out[m + k] = r.drho[i];
            out[2 * m + k] = r.du[i];
            out[3 * m + k] = r.dT[i];
        }
        return out;
    };

    const StateVector next = heun_step(y, rhs, dt);
    for (std::size_t k = 0; k < m; ++k) {
        if (!(next[m + k] > 0.0) || !(next[3 * m + k] > 0.0)) {
            throw StepRejected("advance_gas: non-positive density or temperature at x = " +
                               std::to_string(next[k] * 1e9) + " nm");
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        const auto i = moving[k];
        set.x[i] = next[k];
        set.rho[i] = next[m + k];
        set.u[i] = next[2 * m + k];
        set.T[i] = next[3 * m + k];
        set.p[i] = set.rho[i] * gas.R * set.T[i];
    }
    // Liquid particles are moved by the liquid solver; only gas order is checked here.
    for (std::size_t k = 1; k < m; ++k) {
        if (!(set.x[moving[k]] > set.x[moving[k - 1]])) {
            throw StepRejected("advance_gas: gas particles crossed");
        }
    }
    refresh_walls(set, walls, gas);
}

// ---------------------------------------------------------------------------
// Particle management

namespace {

struct NewParticle {
    double x, rho, u, T, p;
};

double fit_value(const FpmParticleSet& set, Quantity q, double x0, Filter filter,
                 std::span<const DirichletNode> dirichlet, const LsqOptions& opt)
{
    double h = set.h;
    for (int attempt = 0; attempt < 2; ++attempt, h *= 1.5) {
        std::vector<double> dx, v;
        const auto vals = quantity(set, q);
        for (auto j : neighbor_search(set, x0, h, filter)) {
            dx.push_back(set.x[j] - x0);
            v.push_back(vals[j]);
        }
        if (q == Quantity::U || q == Quantity::T) {
            for (const auto& node : dirichlet) {
                if (std::abs(node.x - x0) <= h) {
                    dx.push_back(node.x - x0);
                    v.push_back(q == Quantity::U ? node.u : node.T);
                }
            }
        }
        try {
            return lsq_fit(dx, v, h, opt).value;
        } catch (const StencilError&) {
            if (attempt == 1) {
                throw;
            }
        }
    }
    return 0.0;
}

} // namespace

ManagementStats manage_particles(FpmParticleSet& set, std::span<const DirichletNode> dirichlet,
                                 const GasSpecies& gas, const ManagementOptions& opt)
{
    ManagementStats stats;
    const std::size_t n = set.size();
    if (n < 2) {
        return stats;
    }
    double x_L = 0.0, x_R = 0.0;
    bool has_liquid = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (set.phase[i] == Phase::Liquid) {
            x_L = has_liquid ? std::min(x_L, set.x[i]) : set.x[i];
            x_R = has_liquid ? std::max(x_R, set.x[i]) : set.x[i];
            has_liquid = true;
        }
    }
    const double ins = opt.insert_factor * set.dx0;
    const double rem = opt.remove_factor * set.dx0;

    // Fields of a new particle, fitted on the unmodified set; falls back to the mean of
    // the two parents when the stencil is deficient.
    auto make = [&](double xm, Phase ph, std::size_t i, std::size_t j) {
        const Filter f = ph == Phase::Gas ? Filter::Gas : Filter::Liquid;
        const auto nodes = ph == Phase::Gas ? dirichlet : std::span<const DirichletNode>{};
        NewParticle np{xm, 0, 0, 0, 0};
        try {
            np.rho = fit_value(set, Quantity::Rho, xm, f, {}, opt.lsq);
            np.u = fit_value(set, Quantity::U, xm, f, nodes, opt.lsq);
            np.T = fit_value(set, Quantity::T, xm, f, nodes, opt.lsq);
            np.p = fit_value(set, Quantity::P, xm, f, {}, opt.lsq);
        } catch (const StencilError&) {
            const std::size_t a = set.phase[i] == ph ? i : j;
            const std::size_t b = set.phase[j] == ph ? j : i;
            np.rho = 0.5 * (set.rho[a] + set.rho[b]);
            np.u = 0.5 * (set.u[a] + set.u[b]);
            np.T = 0.5 * (set.T[a] + set.T[b]);
            np.p = 0.5 * (set.p[a] + set.p[b]);
        }
        if (ph == Phase::Gas) {
            np.rho = std::max(np.rho, 0.0);
            np.p = np.rho * gas.R * np.T;
        }
        return np;
    };

    FpmParticleSet out;
    out.dx0 = set.dx0;
    out.h = set.h;
    auto keep = [&](std::size_t i) {
        out.push_back(set.x[i], set.rho[i], set.u[i], set.T[i], set.p[i], set.phase[i], set.role[i]);
    };
    auto add = [&](const NewParticle& np, Phase ph) {
        out.push_back(np.x, np.rho, np.u, np.T, np.p, ph, Role::Interior);
    };

    std::size_t i = 0;
    while (i < n) {
        if (i == n - 1) {
            keep(i);
            break;
        }
        const std::size_t j = i + 1;
        const double gap = set.x[j] - set.x[i];
        const bool same = set.phase[i] == set.phase[j];
        const double xm = 0.5 * (set.x[i] + set.x[j]);
        if (gap > ins) {
            keep(i);
            const Phase ph = same ? set.phase[i] : Phase::Gas;
            if (ph == Phase::Gas && has_liquid && xm > x_L && xm < x_R) {
                ++stats.skipped;
            } else {
                add(make(xm, ph, i, j), ph);
                ++stats.inserted;
            }
            i = j;
        } else if (gap < rem) {
            if (same) {
                if (set.role[i] == Role::Wall) {
                    keep(i);
                    ++stats.removed;
                    i = j + 1;
                } else if (set.role[j] == Role::Wall) {
                    ++stats.removed;
                    i = j;
                } else {
                    add(make(xm, set.phase[i], i, j), set.phase[i]);
                    stats.removed += 2;
                    ++stats.inserted;
                    i = j + 1;
                }
            } else if (set.phase[i] == Phase::Gas && set.role[i] == Role::Interior) {
                ++stats.removed;
                i = j;
            } else if (set.phase[j] == Phase::Gas && set.role[j] == Role::Interior) {
                keep(i);
                ++stats.removed;
                i = j + 1;
            } else {
                keep(i);
                i = j;
            }
        } else {
            keep(i);
            i = j;
        }
    }
    set = std::move(out);
    return stats;
}

} // namespace droplet::fpm
