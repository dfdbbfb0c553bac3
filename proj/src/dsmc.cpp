#include "droplet/dsmc.hpp"

#include "droplet/error.hpp"
#include "droplet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

namespace droplet::dsmc {

using physics::GasSpecies;
using physics::kPi;

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

// ---------------------------------------------------------------------------
// MoleculeEnsemble

void MoleculeEnsemble::reserve(std::size_t n)
{
    x.reserve(n);
    vx.reserve(n);
    vy.reserve(n);
    vz.reserve(n);
}

void MoleculeEnsemble::push_back(double xi, double vxi, double vyi, double vzi)
{
    x.push_back(xi);
    vx.push_back(vxi);
    vy.push_back(vyi);
    vz.push_back(vzi);
}

void MoleculeEnsemble::permute(std::span<const std::uint32_t> order)
{
    auto gather = [&](std::vector<double>& v) {
        std::vector<double> out(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            out[k] = v[order[k]];
        }
        v.swap(out);
    };
    gather(x);
    gather(vx);
    gather(vy);
    gather(vz);
}

std::size_t MoleculeEnsemble::erase_flagged(std::span<const std::uint8_t> flags)
{
    std::size_t w = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (flags[i]) {
            continue;
        }
        x[w] = x[i];
        vx[w] = vx[i];
        vy[w] = vy[i];
        vz[w] = vz[i];
        ++w;
    }
    const std::size_t removed = x.size() - w;
    x.resize(w);
    vx.resize(w);
    vy.resize(w);
    vz.resize(w);
    return removed;
}

// ---------------------------------------------------------------------------
// Cells

std::size_t CellGrid::molecules_in_cell(std::size_t cell) const
{
    return mol_start[sub_offset[cell + 1]] - mol_start[sub_offset[cell]];
}

int CellGrid::locate(double xq) const
{
    if (xq < a || xq > b || cells.empty()) {
        return -1;
    }
    const double h = dx();
    const int base = std::clamp(static_cast<int>((xq - a) / h), 0, n_base - 1);
    for (int bb = std::max(0, base - 1); bb <= std::min(n_base - 1, base + 1); ++bb) {
        for (int slot = 0; slot < 2; ++slot) {
            const int c = base_lookup[2 * bb + slot];
            if (c >= 0 && xq >= cells[c].lo && xq <= cells[c].hi) {
                return c;
            }
        }
    }
    return -1;
}

CellGrid build_cell_grid(double a, double b, int n_base, double x_L, double x_R,
                         double merge_fraction)
{
    if (n_base <= 0 || !(b > a)) {
        throw DomainError("build_cell_grid: invalid domain");
    }
    CellGrid g;
    g.a = a;
    g.b = b;
    g.n_base = n_base;
    const double h = g.dx();
    const bool has_liquid = x_R > x_L;

    struct Part {
        SampleCell cell;
        int merge;  // -1 merge into previous, +1 into next, 0 keep
    };
    std::vector<Part> parts;
    for (int i = 0; i < n_base; ++i) {
        const double lo = a + i * h;
        const double hi = (i == n_base - 1) ? b : a + (i + 1) * h;
        if (!has_liquid || hi <= x_L || lo >= x_R) {
            parts.push_back({{lo, hi, i}, 0});
            continue;
        }
        if (lo < x_L) {
            const bool small = (x_L - lo) < merge_fraction * h;
            parts.push_back({{lo, x_L, i}, small ? -1 : 0});
        }
        if (hi > x_R) {
            const bool small = (hi - x_R) < merge_fraction * h;
            parts.push_back({{x_R, hi, i}, small ? +1 : 0});
        }
    }
    // Merge small interface fragments into the adjacent full gas cell.
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (parts[k].merge == -1 && k > 0 && parts[k - 1].merge == 0 &&
            parts[k - 1].cell.hi == parts[k].cell.lo) {
            parts[k - 1].cell.hi = parts[k].cell.hi;
            parts[k].merge = 2;  // consumed
        } else if (parts[k].merge == +1 && k + 1 < parts.size() && parts[k + 1].merge == 0 &&
                   parts[k + 1].cell.lo == parts[k].cell.hi) {
            parts[k + 1].cell.lo = parts[k].cell.lo;
            parts[k].merge = 2;
        }
    }
    for (const auto& p : parts) {
        if (p.merge != 2 && p.cell.hi > p.cell.lo) {
            g.cells.push_back(p.cell);
        }
    }

    g.refinement.assign(g.cells.size(), 1);
    g.sub_offset.resize(g.cells.size() + 1);
    for (std::size_t c = 0; c <= g.cells.size(); ++c) {
        g.sub_offset[c] = c;
    }
    g.base_lookup.assign(2 * static_cast<std::size_t>(n_base), -1);
    for (std::size_t c = 0; c < g.cells.size(); ++c) {
        const int first = std::clamp(static_cast<int>(std::floor((g.cells[c].lo - a) / h)), 0, n_base - 1);
        const int last = std::clamp(static_cast<int>(std::ceil((g.cells[c].hi - a) / h)) - 1, 0, n_base - 1);
        for (int bb = first; bb <= last; ++bb) {
            int* slot = &g.base_lookup[2 * bb];
            if (slot[0] < 0) {
                slot[0] = static_cast<int>(c);
            } else if (slot[1] < 0) {
                slot[1] = static_cast<int>(c);
            }
        }
    }
    return g;
}

void refine_cells(CellGrid& grid, std::span<const double> lambda_per_base, int cap)
{
    if (lambda_per_base.size() != static_cast<std::size_t>(grid.n_base)) {
        throw SolverError("refine_cells: lambda field does not match the base grid");
    }
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        const double lambda = lambda_per_base[grid.cells[c].base];
        int k = 1;
        if (lambda > 0.0) {
            while (grid.cells[c].width() / k > lambda) {
                k *= 2;
                if (k > cap) {
                    throw SolverError("refine_cells: refinement factor exceeds cap " +
                                      std::to_string(cap) + " (cell width " +
                                      std::to_string(grid.cells[c].width()) + ", lambda " +
                                      std::to_string(lambda) + ")");
                }
            }
        }
        grid.refinement[c] = k;
    }
    grid.sub_offset.resize(grid.cells.size() + 1);
    grid.sub_offset[0] = 0;
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        grid.sub_offset[c + 1] = grid.sub_offset[c] + grid.refinement[c];
    }
    grid.mol_start.clear();
}

void sort_into_cells(MoleculeEnsemble& ens, CellGrid& grid)
{
    const std::size_t n = ens.size();
    const std::size_t n_sub = grid.subcell_count();
    std::vector<std::uint32_t> key(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = grid.locate(ens.x[i]);
        if (c < 0) {
            throw StateError("sort_into_cells: molecule at x = " + std::to_string(ens.x[i]) +
                             " is outside the gas domain");
        }
        const SampleCell& cell = grid.cells[c];
        const int k = grid.refinement[c];
        int s = static_cast<int>((ens.x[i] - cell.lo) / cell.width() * k);
        s = std::clamp(s, 0, k - 1);
        key[i] = static_cast<std::uint32_t>(grid.sub_offset[c] + s);
    }
    grid.mol_start.assign(n_sub + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++grid.mol_start[key[i] + 1];
    }
    for (std::size_t s = 0; s < n_sub; ++s) {
        grid.mol_start[s + 1] += grid.mol_start[s];
    }
    std::vector<std::size_t> cursor(grid.mol_start.begin(), grid.mol_start.end() - 1);
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[cursor[key[i]]++] = static_cast<std::uint32_t>(i);
    }
    ens.permute(order);
}

// ---------------------------------------------------------------------------
// Initialisation, transport, boundaries

MoleculeEnsemble init_maxwellian_cells(std::span<const GasRegion> regions, double a, double b,
                                       int n_base, double x_L, double x_R,
                                       std::size_t molecules_per_cell, const GasSpecies& gas,
                                       Rng& rng)
{
    if (molecules_per_cell == 0) {
        throw SolverError("init_maxwellian_cells: molecules_per_cell must be positive");
    }
    if (regions.empty()) {
        throw SolverError("init_maxwellian_cells: no gas regions");
    }
    double rho_max = 0.0;
    for (const auto& r : regions) {
        if (!(r.rho > 0.0) || r.T < 0.0) {
            throw DomainError("init_maxwellian_cells: region density must be positive");
        }
        rho_max = std::max(rho_max, r.rho);
    }
    const double h = (b - a) / n_base;
    MoleculeEnsemble ens;
    ens.weight = rho_max * h / (static_cast<double>(molecules_per_cell) * gas.m);

    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const bool has_liquid = x_R > x_L;

    auto fill = [&](double lo, double hi, const GasRegion& r) {
        if (!(hi > lo)) {
            return;
        }
        const double expected = r.rho * (hi - lo) / (ens.weight * gas.m);
        const auto count = static_cast<std::size_t>(std::llround(expected));
        const double sigma = std::sqrt(gas.R * r.T);
        for (std::size_t k = 0; k < count; ++k) {
            const double xi = lo + (hi - lo) * uni(rng);
            const double vxi = r.u + sigma * normal(rng);
            const double vyi = sigma * normal(rng);
            const double vzi = sigma * normal(rng);
            ens.push_back(xi, vxi, vyi, vzi);
        }
    };

    for (int i = 0; i < n_base; ++i) {
        const double lo = a + i * h;
        const double hi = (i == n_base - 1) ? b : a + (i + 1) * h;
        for (const auto& r : regions) {
            const double slo = std::max(lo, r.lo);
            const double shi = std::min(hi, r.hi);
            if (!(shi > slo)) {
                continue;
            }
            if (!has_liquid) {
                fill(slo, shi, r);
                continue;
            }
            fill(slo, std::min(shi, x_L), r);
            fill(std::max(slo, x_R), shi, r);
        }
    }
    return ens;
}

void free_flight(MoleculeEnsemble& ens, double dt)
{
    double* x = ens.x.data();
    const double* vx = ens.vx.data();
    parallel_for(ens.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            x[i] += vx[i] * dt;
        }
    }, 4096);
}

double sample_flux_normal_speed(double T, const GasSpecies& gas, Rng& rng)
{
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double u = uni(rng);  // in [0, 1)
    return std::sqrt(-2.0 * gas.R * T * std::log1p(-u));
}

namespace {

void reemit(MoleculeEnsemble& ens, std::size_t i, double x_wall, double u_wall, double T,
            double direction, const GasSpecies& gas, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = std::sqrt(gas.R * T);
    ens.x[i] = x_wall;
    ens.vx[i] = u_wall + direction * sample_flux_normal_speed(T, gas, rng);
    ens.vy[i] = sigma * normal(rng);
    ens.vz[i] = sigma * normal(rng);
}

} // namespace

BoundaryStats apply_boundary_interface(MoleculeEnsemble& ens, const InterfaceState& iface,
                                       const BoundarySet& walls, double dt, const GasSpecies& gas,
                                       Rng& rng)
{
    const bool has_liquid = iface.x_R > iface.x_L;
    if (has_liquid && (iface.x_L <= walls.a || iface.x_R >= walls.b)) {
        throw StateError("apply_boundary_interface: interface outside the domain");
    }
    BoundaryStats stats;
    std::vector<std::uint8_t> dead;
    for (std::size_t i = 0; i < ens.size(); ++i) {
        const double x_new = ens.x[i];
        if (has_liquid) {
            const double x_old = x_new - ens.vx[i] * dt;
            int side = 0;  // -1 left interface, +1 right interface
            if (x_old <= iface.x_L && x_new > iface.x_L) {
                side = -1;
            } else if (x_old >= iface.x_R && x_new < iface.x_R) {
                side = +1;
            } else if (x_old > iface.x_L && x_old < iface.x_R && x_new > iface.x_L && x_new < iface.x_R) {
                // overtaken by the moving droplet and still inside it
                side = (x_old - iface.x_L < iface.x_R - x_old) ? -1 : +1;
            }
            if (side == -1) {
                reemit(ens, i, iface.x_L, iface.u_I, iface.T_left, -1.0, gas, rng);
                ++stats.interface_hits;
            } else if (side == +1) {
                reemit(ens, i, iface.x_R, iface.u_I, iface.T_right, +1.0, gas, rng);
                ++stats.interface_hits;
            }
        }
        const double xi = ens.x[i];
        if (xi < walls.a || xi > walls.b) {
            const bool left = xi < walls.a;
            const WallSpec& w = left ? walls.left : walls.right;
            if (w.type == WallType::Outflow) {
                if (dead.empty()) {
                    dead.assign(ens.size(), 0);
                }
                dead[i] = 1;
                ++stats.deleted;
            } else {
                reemit(ens, i, left ? walls.a : walls.b, w.u, w.T, left ? +1.0 : -1.0, gas, rng);
                ++stats.wall_hits;
            }
        }
    }
    if (!dead.empty()) {
        ens.erase_flagged(dead);
    }
    return stats;
}

std::size_t molecules_inside_liquid(const MoleculeEnsemble& ens, double x_L, double x_R)
{
    return static_cast<std::size_t>(std::count_if(ens.x.begin(), ens.x.end(), [&](double xi) {
        return xi > x_L && xi < x_R;
    }));
}

std::size_t inflow_ghost_cells(MoleculeEnsemble& ens, const InflowSpec& spec, double a, double b,
                               const GasSpecies& gas, Rng& rng)
{
    if (!(spec.cell_width > 0.0) || spec.ghost_cells <= 0) {
        throw SolverError("inflow_ghost_cells: invalid ghost cell geometry");
    }
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::size_t created = 0;
    auto fill = [&](double lo, double hi, const InflowState& st) {
        const double expected = st.rho * (hi - lo) / (ens.weight * gas.m);
        auto count = static_cast<std::size_t>(std::floor(expected));
        if (uni(rng) < expected - std::floor(expected)) {
            ++count;
        }
        const double sigma = std::sqrt(gas.R * std::max(st.T, 0.0));
        for (std::size_t k = 0; k < count; ++k) {
            const double xi = lo + (hi - lo) * uni(rng);
            ens.push_back(xi, st.u + sigma * normal(rng), sigma * normal(rng), sigma * normal(rng));
        }
        created += count;
    };
    for (int k = 0; k < spec.ghost_cells; ++k) {
        if (spec.left) {
            fill(a - (k + 1) * spec.cell_width, a - k * spec.cell_width, *spec.left);
        }
        if (spec.right) {
            fill(b + k * spec.cell_width, b + (k + 1) * spec.cell_width, *spec.right);
        }
    }
    return created;
}

// ---------------------------------------------------------------------------
// Collisions

void elastic_collision(double* v, double* w, const double* n)
{
    const double dot = n[0] * (v[0] - w[0]) + n[1] * (v[1] - w[1]) + n[2] * (v[2] - w[2]);
    for (int c = 0; c < 3; ++c) {
        v[c] -= n[c] * dot;
        w[c] += n[c] * dot;
    }
}

namespace {

struct CellCollider {
    MoleculeEnsemble& ens;
    double sigma;
    int max_subcycles;

    void run(std::size_t begin, std::size_t end, double density, double dt, int depth, Rng& rng,
             std::vector<std::uint32_t>& order, CollisionStats& stats) const
    {
        const std::size_t n = end - begin;
        order.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            order[k] = static_cast<std::uint32_t>(begin + k);
        }
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t pairs = n / 2;
        const double factor = density * sigma * dt;

        double pmax = 0.0;
        for (std::size_t k = 0; k < pairs; ++k) {
            pmax = std::max(pmax, factor * relative_speed(order[2 * k], order[2 * k + 1]));
        }
        if (pmax > 1.0) {
            if (depth >= max_subcycles) {
                throw TimeStepViolation("collide_cells: collision probability " +
                                        std::to_string(pmax) + " exceeds one (" + std::to_string(n) +
                                        " molecules, number density " + std::to_string(density) + ")");
            }
            if (depth == 0) {
                ++stats.subcycled_cells;
            }
            run(begin, end, density, 0.5 * dt, depth + 1, rng, order, stats);
            run(begin, end, density, 0.5 * dt, depth + 1, rng, order, stats);
            return;
        }
        stats.max_probability = std::max(stats.max_probability, pmax);
        stats.pairs += pairs;

        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (std::size_t k = 0; k < pairs; ++k) {
            const std::uint32_t i = order[2 * k];
            const std::uint32_t j = order[2 * k + 1];
            const double prob = factor * relative_speed(i, j);
            if (uni(rng) >= prob) {
                continue;
            }
            double v[3] = {ens.vx[i], ens.vy[i], ens.vz[i]};
            double w[3] = {ens.vx[j], ens.vy[j], ens.vz[j]};
            // Hard spheres scatter g isotropically: with omega uniform on the sphere,
            // n = (g/|g| - omega)/|g/|g| - omega| has density proportional to |n.g|.
            const double z = 2.0 * uni(rng) - 1.0;
            const double phi = 2.0 * kPi * uni(rng);
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double g = relative_speed(i, j);
            double nvec[3] = {(v[0] - w[0]) / g - s * std::cos(phi), (v[1] - w[1]) / g - s * std::sin(phi),
                              (v[2] - w[2]) / g - z};
            const double len = std::sqrt(nvec[0] * nvec[0] + nvec[1] * nvec[1] + nvec[2] * nvec[2]);
            if (!(len > 1e-12)) {
                continue;  // forward scattering leaves the pair unchanged
            }
            for (double& c : nvec) {
                c /= len;
            }
            elastic_collision(v, w, nvec);
            ens.vx[i] = v[0];
            ens.vy[i] = v[1];
            ens.vz[i] = v[2];
            ens.vx[j] = w[0];
            ens.vy[j] = w[1];
            ens.vz[j] = w[2];
            ++stats.collisions;
        }
    }

    double relative_speed(std::uint32_t i, std::uint32_t j) const
    {
        const double gx = ens.vx[i] - ens.vx[j];
        const double gy = ens.vy[i] - ens.vy[j];
        const double gz = ens.vz[i] - ens.vz[j];
        return std::sqrt(gx * gx + gy * gy + gz * gz);
    }
};

} // namespace

CollisionStats collide_cells(MoleculeEnsemble& ens, const CellGrid& grid, double dt,
                             const GasSpecies& gas, std::uint64_t seed, std::uint64_t step,
                             int max_subcycles)
{
    if (!grid.sorted()) {
        throw SolverError("collide_cells: molecules are not sorted into cells");
    }
    // Sub-cell -> owning sample cell.
    const std::size_t n_sub = grid.subcell_count();
    std::vector<std::uint32_t> owner(n_sub);
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        for (std::size_t s = grid.sub_offset[c]; s < grid.sub_offset[c + 1]; ++s) {
            owner[s] = static_cast<std::uint32_t>(c);
        }
    }
    const CellCollider collider{ens, kPi * gas.d * gas.d, max_subcycles};
    CollisionStats total;
    std::mutex merge;
    parallel_for(n_sub, [&](std::size_t lo, std::size_t hi) {
        CollisionStats local;
        std::vector<std::uint32_t> order;
        for (std::size_t s = lo; s < hi; ++s) {
            const std::size_t begin = grid.mol_start[s];
            const std::size_t end = grid.mol_start[s + 1];
            if (end - begin < 2) {
                continue;
            }
            const double volume = grid.subcell_width(owner[s]);
            const double density = static_cast<double>(end - begin) * ens.weight / volume;
            Rng rng(stream_seed(seed, step, s));
            collider.run(begin, end, density, dt, 0, rng, order, local);
        }
        std::lock_guard<std::mutex> lock(merge);
        total.pairs += local.pairs;
        total.collisions += local.collisions;
        total.subcycled_cells += local.subcycled_cells;
        total.max_probability = std::max(total.max_probability, local.max_probability);
    }, 8);
    return total;
}

// ---------------------------------------------------------------------------
// Moments and smoothing

void CellMoments::resize(std::size_t n)
{
    for (auto* v : {&center, &volume, &rho, &ux, &uy, &uz, &T, &e, &p, &phi11, &q1}) {
        v->assign(n, 0.0);
    }
    count.assign(n, 0);
    active.assign(n, 0);
}

CellMoments sample_moments(const MoleculeEnsemble& ens, const CellGrid& grid, const GasSpecies& gas)
{
    if (!grid.sorted()) {
        throw SolverError("sample_moments: molecules are not sorted into cells");
    }
    CellMoments m;
    m.resize(grid.cells.size());
    parallel_for(grid.cells.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) {
            m.center[c] = grid.cells[c].center();
            m.volume[c] = grid.cells[c].width();
            const std::size_t begin = grid.mol_start[grid.sub_offset[c]];
            const std::size_t end = grid.mol_start[grid.sub_offset[c + 1]];
            const std::size_t n = end - begin;
            m.count[c] = n;
            if (n == 0) {
                continue;
            }
            m.active[c] = 1;
            double sx = 0.0, sy = 0.0, sz = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                sx += ens.vx[i];
                sy += ens.vy[i];
                sz += ens.vz[i];
            }
            const double inv = 1.0 / static_cast<double>(n);
            const double ux = sx * inv, uy = sy * inv, uz = sz * inv;
            double c2 = 0.0, c11 = 0.0, q = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                const double cx = ens.vx[i] - ux;
                const double cy = ens.vy[i] - uy;
                const double cz = ens.vz[i] - uz;
                const double cc = cx * cx + cy * cy + cz * cz;
                c2 += cc;
                c11 += cx * cx;
                q += 0.5 * cc * cx;
            }
            const double rho = static_cast<double>(n) * ens.weight * gas.m / m.volume[c];
            m.rho[c] = rho;
            m.ux[c] = ux;
            m.uy[c] = uy;
            m.uz[c] = uz;
            m.e[c] = 0.5 * c2 * inv;
            m.T[c] = 2.0 * m.e[c] / (3.0 * gas.R);
            m.p[c] = rho * gas.R * m.T[c];
            m.phi11[c] = rho * c11 * inv;
            m.q1[c] = rho * q * inv;
        }
    }, 16);
    return m;
}

std::span<const double> field_values(const CellMoments& m, Field f)
{
    switch (f) {
    case Field::Rho: return m.rho;
    case Field::U: return m.ux;
    case Field::T: return m.T;
    case Field::P: return m.p;
    case Field::Phi11: return m.phi11;
    case Field::Q1: return m.q1;
    }
    return {};
}

double shepard_at(const CellMoments& m, std::span<const double> values, double x, double h,
                  double alpha)
{
    auto first = std::lower_bound(m.center.begin(), m.center.end(), x - h);
    double num = 0.0;
    double den = 0.0;
    for (auto it = first; it != m.center.end() && *it <= x + h; ++it) {
        const auto j = static_cast<std::size_t>(it - m.center.begin());
        if (!m.active[j]) {
            continue;
        }
        const double r = (*it - x) / h;
        if (std::abs(r) > 1.0) {
            continue;
        }
        const double w = std::exp(-alpha * r * r);
        num += w * values[j];
        den += w;
    }
    if (den == 0.0) {
        throw StateError("shepard_at: no active cell within the smoothing radius at x = " +
                         std::to_string(x));
    }
    return num / den;
}

std::vector<double> shepard_smooth(const CellMoments& m, Field f, double h, double alpha)
{
    const auto values = field_values(m, f);
    std::vector<double> out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.active[i]) {
            out[i] = shepard_at(m, values, m.center[i], h, alpha);
        }
    }
    return out;
}

CellMoments smooth_moments(const CellMoments& m, double h, double alpha)
{
    CellMoments s = m;
    s.rho = shepard_smooth(m, Field::Rho, h, alpha);
    s.ux = shepard_smooth(m, Field::U, h, alpha);
    s.T = shepard_smooth(m, Field::T, h, alpha);
    s.p = shepard_smooth(m, Field::P, h, alpha);
    s.phi11 = shepard_smooth(m, Field::Phi11, h, alpha);
    s.q1 = shepard_smooth(m, Field::Q1, h, alpha);
    return s;
}

} // namespace droplet::dsmc
