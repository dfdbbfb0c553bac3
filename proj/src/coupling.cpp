#include "droplet/coupling.hpp"

#include "droplet/dsmc.hpp"
#include "droplet/error.hpp"
#include "droplet/interface.hpp"
#include "droplet/liquid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace droplet::coupling {

using physics::Algorithm;

fpm::FpmParticleSet initial_particles(const ScenarioConfig& cfg, bool with_gas)
{
    const int N = cfg.particles;
    const double dx = (cfg.b - cfg.a) / N;
    const double tol = 1e-9 * dx;
    fpm::FpmParticleSet set;
    set.dx0 = dx;
    set.h = 3.0 * dx;
    for (int i = 0; i <= N; ++i) {
        const double x = i == N ? cfg.b : cfg.a + i * dx;
        if (x >= cfg.liquid.lo - tol && x <= cfg.liquid.hi + tol) {
            set.push_back(x, cfg.liquid.rho_l, cfg.liquid.u, cfg.liquid.T, cfg.liquid.p, fpm::Phase::Liquid);
            continue;
        }
        if (!with_gas) {
            continue;
        }
        const auto& r = cfg.region_at(x);
        const bool wall = i == 0 || i == N;
        double u = r.u, T = r.T, rho = r.rho;
        if (wall) {
            const auto& bc = i == 0 ? cfg.left : cfg.right;
            T = bc.T;
            if (!bc.u_extrapolated) {
                u = bc.u;
            }
            if (bc.kind == BoundaryKind::Open) {
                rho = bc.rho;
            }
        }
        set.push_back(x, rho, u, T, physics::eos_pressure(rho, T, cfg.species), fpm::Phase::Gas,
                      wall ? fpm::Role::Wall : fpm::Role::Interior);
    }
    if (set.count(fpm::Phase::Liquid) < 2) {
        throw ConfigError("liquid interval holds fewer than two particles at this resolution");
    }
    return set;
}

physics::FieldSummary initial_summary(const ScenarioConfig& cfg)
{
    physics::FieldSummary s;
    s.samples = cfg.gas.size();
    s.max_speed = std::abs(cfg.liquid.u);
    s.rho_min = std::numeric_limits<double>::infinity();
    for (const auto& r : cfg.gas) {
        s.max_speed = std::max(s.max_speed, std::abs(r.u));
        s.max_T = std::max(s.max_T, r.T);
        s.rho_min = std::min(s.rho_min, r.rho);
        s.rho_max = std::max(s.rho_max, r.rho);
    }
    s.min_spacing = (cfg.b - cfg.a) / cfg.particles;
    s.liquid_spacing = s.min_spacing;
    return s;
}

namespace {

std::string diag(const char* alg, std::size_t step, double t, const std::exception& e)
{
    std::ostringstream s;
    s << "algorithm " << alg << ", step " << step << ", t = " << t << ": " << e.what();
    return s.str();
}

// Throws the same solver error category with step/time context attached.
[[noreturn]] void rethrow_with_context(const char* alg, std::size_t step, double t)
{
    try {
        throw;
    } catch (const TimeStepViolation& e) {
        throw TimeStepViolation(diag(alg, step, t, e));
    } catch (const StepRejected& e) {
        throw StepRejected(diag(alg, step, t, e));
    } catch (const StencilError& e) {
        throw StencilError(diag(alg, step, t, e));
    } catch (const StateError& e) {
        throw StateError(diag(alg, step, t, e));
    } catch (const DomainError& e) {
        throw DomainError(diag(alg, step, t, e));
    } catch (const SolverError& e) {
        throw SolverError(diag(alg, step, t, e));
    }
}

LiquidSamples liquid_samples(const fpm::FpmParticleSet& set, const InterfaceState& iface)
{
    LiquidSamples s;
    for (auto i : set.indices(fpm::Phase::Liquid)) {
        s.x.push_back(set.x[i]);
        s.T.push_back(set.T[i]);
        s.u = set.u[i];
        s.rho_l = set.rho[i];
    }
    s.p_L = iface.p_left;
    s.p_R = iface.p_right;
    return s;
}

OutputFrame make_frame(const ScenarioConfig& cfg, Algorithm alg, double t, const std::vector<double>& grid,
                       const InterfaceState& iface, const GasSamples& gas, const LiquidSamples& liq)
{
    OutputFrame f = build_frame(grid, iface.x_L, iface.x_R, gas, liq);
    f.time = t;
    f.algorithm = physics::to_string(alg);
    f.scenario = cfg.name;
    f.seed = cfg.seed;
    for (const auto& k : knudsen_numbers(cfg)) {
        f.kn.push_back(k.kn);
    }
    return f;
}

// Output schedule: step sizes are clipped so that every output time is hit exactly.
struct Schedule {
    std::vector<double> times;
    std::size_t next = 0;

    explicit Schedule(const ScenarioConfig& cfg) : times(cfg.output_times)
    {
        if (times.empty() || times.back() < cfg.t_end) {
            times.push_back(cfg.t_end);
        }
    }
    bool done() const { return next >= times.size(); }
    double target() const { return times[next]; }
    /// Step size towards the next target; snaps the remainder when it would be tiny.
    double clip(double t, double dt) const
    {
        const double rest = target() - t;
        return dt >= rest * (1.0 - 1e-9) ? rest : dt;
    }
    bool reached(double t) const { return t >= target() * (1.0 - 1e-12); }
};

HistoryRecord record(double t, double dt, const InterfaceState& iface, const fpm::FpmParticleSet& set,
                     const physics::LiquidSpecies& liq)
{
    HistoryRecord h;
    h.t = t;
    h.dt = dt;
    h.x_L = iface.x_L;
    h.x_R = iface.x_R;
    h.u = iface.u_I;
    h.p_L = iface.p_left;
    h.p_R = iface.p_right;
    h.T_L = iface.T_left;
    h.T_R = iface.T_right;
    h.liquid_energy = liquid::liquid_thermal_energy(set, liq);
    return h;
}

double common_velocity(const fpm::FpmParticleSet& set)
{
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set.phase[i] == fpm::Phase::Liquid) {
            return set.u[i];
        }
    }
    throw StateError("no liquid particles");
}

void track_dt(RunStats& s, double dt)
{
    s.min_dt = s.steps == 0 ? dt : std::min(s.min_dt, dt);
    s.max_dt = std::max(s.max_dt, dt);
}

// ---------------------------------------------------------------------------
// Algorithm I

fpm::GasWall gas_wall(const BoundaryConfig& bc)
{
    fpm::GasWall w;
    w.u = bc.u;
    w.T = bc.T;
    w.u_zero_gradient = bc.u_extrapolated;
    if (bc.kind == BoundaryKind::Open) {
        w.rho = bc.rho;
    }
    return w;
}

physics::FieldSummary summary_I(const fpm::FpmParticleSet& set)
{
    physics::FieldSummary s;
    s.min_spacing = std::numeric_limits<double>::infinity();
    s.liquid_spacing = std::numeric_limits<double>::infinity();
    s.rho_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < set.size(); ++i) {
        s.max_speed = std::max(s.max_speed, std::abs(set.u[i]));
        if (set.phase[i] == fpm::Phase::Gas) {
            ++s.samples;
            s.max_T = std::max(s.max_T, set.T[i]);
            s.rho_min = std::min(s.rho_min, set.rho[i]);
            s.rho_max = std::max(s.rho_max, set.rho[i]);
        }
        if (i > 0) {
            const double gap = set.x[i] - set.x[i - 1];
            if (set.phase[i] == fpm::Phase::Liquid && set.phase[i - 1] == fpm::Phase::Liquid) {
                s.liquid_spacing = std::min(s.liquid_spacing, gap);
            } else {
                s.min_spacing = std::min(s.min_spacing, gap);
            }
        }
    }
    return s;
}

GasSamples gas_samples_I(const fpm::FpmParticleSet& set)
{
    GasSamples g;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set.phase[i] == fpm::Phase::Gas) {
            g.x.push_back(set.x[i]);
            g.rho.push_back(set.rho[i]);
            g.p.push_back(set.p[i]);
            g.u.push_back(set.u[i]);
            g.T.push_back(set.T[i]);
        }
    }
    return g;
}

struct ContinuumRun {
    const ScenarioConfig& cfg;
    physics::GasSpecies gas;
    physics::Transport tr;
    physics::LiquidSpecies liq;
    fpm::GasWalls walls;
    fpm::FpmParticleSet set;
    InterfaceState iface;
    RunStats stats;

    explicit ContinuumRun(const ScenarioConfig& c)
        : cfg(c), gas(c.species), tr(c.transport()), liq(c.liquid.species()),
          walls{gas_wall(c.left), gas_wall(c.right)}, set(initial_particles(c, true))
    {
        iface.source = Algorithm::I;
        const auto [x_L, x_R] = detect_interface(set);
        iface.x_L = x_L;
        iface.x_R = x_R;
        iface.u_I = c.liquid.u;
        iface.p_left = iface.p_right = c.liquid.p;
        iface.T_left = interface_temperature_ns(set, x_L, Side::Left, tr.kappa, liq.kappa_l).T_I;
        iface.T_right = interface_temperature_ns(set, x_R, Side::Right, tr.kappa, liq.kappa_l).T_I;
    }

    void step(double dt)
    {
        const auto [x_L, x_R] = detect_interface(set);
        iface.x_L = x_L;
        iface.x_R = x_R;
        const double u_n = common_velocity(set);
        iface.u_I = u_n;

        fpm::advance_gas(set, iface, walls, gas, tr, dt);
        liquid::advect_liquid(set, dt);
        if (!set.is_sorted()) {
            throw StepRejected("gas and liquid particles crossed");
        }
        const auto [xl, xr] = detect_interface(set);
        const double p_L = interface_pressure_ns(set, xl, Side::Left, tr.mu, u_n);
        const double p_R = interface_pressure_ns(set, xr, Side::Right, tr.mu, u_n);
        const auto T_L = interface_temperature_ns(set, xl, Side::Left, tr.kappa, liq.kappa_l);
        const auto T_R = interface_temperature_ns(set, xr, Side::Right, tr.kappa, liq.kappa_l);

        const double u_new = liquid::liquid_velocity_update(u_n, dt, p_L, p_R, xl, xr, liq.rho_l);
        liquid::liquid_temperature_step(set, T_L.T_I, T_R.T_I, dt, liq);
        liquid::set_liquid_state(set, u_new, p_L, p_R);

        iface.x_L = xl;
        iface.x_R = xr;
        iface.u_I = u_new;
        iface.p_left = p_L;
        iface.p_right = p_R;
        iface.T_left = T_L.T_I;
        iface.T_right = T_R.T_I;

        const auto nodes = fpm::interface_nodes(iface);
        const auto ms = fpm::manage_particles(set, nodes, gas);
        stats.inserted += ms.inserted;
        stats.removed += ms.removed;
        if (!set.is_sorted()) {
            throw StepRejected("particle order lost after management");
        }
    }
};

// ---------------------------------------------------------------------------
// Algorithm II

constexpr std::uint64_t kStreamSalt = 0x9e3779b97f4a7c15ULL;

dsmc::WallSpec dsmc_wall(const BoundaryConfig& bc)
{
    dsmc::WallSpec w;
    w.type = bc.kind == BoundaryKind::Open ? dsmc::WallType::Outflow : dsmc::WallType::Diffuse;
    w.u = bc.u;
    w.T = bc.T;
    return w;
}

GasSamples gas_samples_II(const dsmc::CellMoments& m)
{
    GasSamples g;
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (m.active[k]) {
            g.x.push_back(m.center[k]);
            g.rho.push_back(m.rho[k]);
            g.p.push_back(m.p[k]);
            g.u.push_back(m.ux[k]);
            g.T.push_back(m.T[k]);
        }
    }
    return g;
}

struct KineticRun {
    const ScenarioConfig& cfg;
    physics::GasSpecies gas;
    physics::Transport tr;
    physics::LiquidSpecies liq;
    double dx;
    fpm::FpmParticleSet set;  // liquid only
    dsmc::MoleculeEnsemble ens;
    dsmc::BoundarySet walls;
    dsmc::InflowSpec inflow;
    dsmc::CellMoments smooth;
    InterfaceState iface;
    RunStats stats;
    std::uint64_t step_index = 0;

    explicit KineticRun(const ScenarioConfig& c)
        : cfg(c), gas(c.species), tr(c.transport()), liq(c.liquid.species()), dx((c.b - c.a) / c.particles),
          set(initial_particles(c, false))
    {
        iface.source = Algorithm::II;
        const auto [x_L, x_R] = detect_interface(set);
        iface.x_L = x_L;
        iface.x_R = x_R;
        iface.u_I = c.liquid.u;
        iface.p_left = iface.p_right = c.liquid.p;

        std::vector<dsmc::GasRegion> regions;
        for (const auto& r : c.gas) {
            regions.push_back({r.lo, r.hi, r.rho, r.u, r.T});
        }
        dsmc::Rng rng(dsmc::stream_seed(c.seed ^ kStreamSalt, 0, 0));
        ens = dsmc::init_maxwellian_cells(regions, c.a, c.b, c.particles, x_L, x_R, c.molecules_per_cell, gas, rng);
        walls = {c.a, c.b, dsmc_wall(c.left), dsmc_wall(c.right)};
        if (c.left.kind == BoundaryKind::Open) {
            inflow.left = dsmc::InflowState{c.left.rho, c.left.u, c.left.T};
        }
        if (c.right.kind == BoundaryKind::Open) {
            inflow.right = dsmc::InflowState{c.right.rho, c.right.u, c.right.T};
        }
        inflow.cell_width = dx;

        double rho_max = 0.0;
        for (const auto& r : c.gas) {
            rho_max = std::max(rho_max, r.rho);
        }
        collide_and_sample(0.0, std::vector<double>(c.particles, physics::mean_free_path(rho_max, gas)));
        reconstruct_temperature();
        stats.max_molecules = ens.size();
    }

    std::vector<double> lambda_per_base() const
    {
        double rho_max = 0.0;
        for (std::size_t k = 0; k < smooth.size(); ++k) {
            if (smooth.active[k]) {
                rho_max = std::max(rho_max, smooth.rho[k]);
            }
        }
        const double fallback = physics::mean_free_path(rho_max > 0.0 ? rho_max : 1.0, gas);
        std::vector<double> lambda(cfg.particles, std::numeric_limits<double>::infinity());
        for (std::size_t k = 0; k < smooth.size(); ++k) {
            if (smooth.active[k] && smooth.rho[k] > 0.0) {
                const int base = std::clamp(static_cast<int>((smooth.center[k] - cfg.a) / dx), 0, cfg.particles - 1);
                lambda[base] = std::min(lambda[base], physics::mean_free_path(smooth.rho[k], gas));
            }
        }
        for (double& l : lambda) {
            if (std::isinf(l)) {
                l = fallback;
            }
        }
        return lambda;
    }

    // Sorts, collides with step dt (none for dt = 0), samples and smooths.
    void collide_and_sample(double dt, const std::vector<double>& lambda)
    {
        auto grid = dsmc::build_cell_grid(cfg.a, cfg.b, cfg.particles, iface.x_L, iface.x_R);
        dsmc::refine_cells(grid, lambda, cfg.refine_cap);
        dsmc::sort_into_cells(ens, grid);
        if (dt > 0.0) {
            const auto cs = dsmc::collide_cells(ens, grid, dt, gas, cfg.seed, step_index, cfg.max_subcycles);
            stats.subcycled_cells += cs.subcycled_cells;
            stats.max_collision_probability = std::max(stats.max_collision_probability, cs.max_probability);
        }
        const auto raw = dsmc::sample_moments(ens, grid, gas);
        smooth = dsmc::smooth_moments(raw, 3.0 * dx);
    }

    void reconstruct_temperature()
    {
        iface.T_left = interface_temperature_boltzmann(smooth, set, iface.x_L, Side::Left, liq.kappa_l).T_I;
        iface.T_right = interface_temperature_boltzmann(smooth, set, iface.x_R, Side::Right, liq.kappa_l).T_I;
    }

    physics::FieldSummary summary() const
    {
        physics::FieldSummary s;
        s.max_speed = std::abs(iface.u_I);
        s.rho_min = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < smooth.size(); ++k) {
            if (!smooth.active[k]) {
                continue;
            }
            ++s.samples;
            s.max_speed = std::max(s.max_speed, std::abs(smooth.ux[k]));
            s.max_T = std::max(s.max_T, smooth.T[k]);
            s.rho_min = std::min(s.rho_min, smooth.rho[k]);
            s.rho_max = std::max(s.rho_max, smooth.rho[k]);
        }
        for (const auto* st : {&inflow.left, &inflow.right}) {
            if (*st) {
                s.max_T = std::max(s.max_T, (*st)->T);
                s.max_speed = std::max(s.max_speed, std::abs((*st)->u));
                s.rho_max = std::max(s.rho_max, (*st)->rho);
            }
        }
        s.min_spacing = dx;
        s.liquid_spacing = std::numeric_limits<double>::infinity();
        const auto idx = set.indices(fpm::Phase::Liquid);
        for (std::size_t k = 1; k < idx.size(); ++k) {
            s.liquid_spacing = std::min(s.liquid_spacing, set.x[idx[k]] - set.x[idx[k - 1]]);
        }
        return s;
    }

    void step(double dt)
    {
        ++step_index;
        const auto [x_L, x_R] = detect_interface(set);
        iface.x_L = x_L;
        iface.x_R = x_R;
        const double u_n = common_velocity(set);
        iface.u_I = u_n;
        const auto lambda = lambda_per_base();

        dsmc::Rng rng(dsmc::stream_seed(cfg.seed ^ kStreamSalt, step_index, 1));
        if (inflow.left || inflow.right) {
            if (inflow.right && cfg.right.u_extrapolated) {
                for (std::size_t k = smooth.size(); k-- > 0;) {
                    if (smooth.active[k]) {
                        inflow.right->u = smooth.ux[k];
                        break;
                    }
                }
            }
            if (inflow.left && cfg.left.u_extrapolated) {
                for (std::size_t k = 0; k < smooth.size(); ++k) {
                    if (smooth.active[k]) {
                        inflow.left->u = smooth.ux[k];
                        break;
                    }
                }
            }
            stats.inflow_molecules += dsmc::inflow_ghost_cells(ens, inflow, cfg.a, cfg.b, gas, rng);
        }
        dsmc::free_flight(ens, dt);
        const auto bs = dsmc::apply_boundary_interface(ens, iface, walls, dt, gas, rng);
        stats.interface_hits += bs.interface_hits;
        stats.deleted_molecules += bs.deleted;
        if (const auto inside = dsmc::molecules_inside_liquid(ens, x_L, x_R); inside != 0) {
            throw StateError(std::to_string(inside) + " molecules inside the droplet after boundary handling");
        }
        collide_and_sample(dt, lambda);
        stats.max_molecules = std::max(stats.max_molecules, ens.size());

        const double p_L = interface_pressure_boltzmann(smooth, x_L, Side::Left);
        const double p_R = interface_pressure_boltzmann(smooth, x_R, Side::Right);
        const auto T_L = interface_temperature_boltzmann(smooth, set, x_L, Side::Left, liq.kappa_l);
        const auto T_R = interface_temperature_boltzmann(smooth, set, x_R, Side::Right, liq.kappa_l);

        const double u_new = liquid::liquid_velocity_update(u_n, dt, p_L, p_R, x_L, x_R, liq.rho_l);
        liquid::liquid_temperature_step(set, T_L.T_I, T_R.T_I, dt, liq);
        liquid::advect_liquid(set, dt);
        liquid::set_liquid_state(set, u_new, p_L, p_R);
        const auto ms = fpm::manage_particles(set, {}, gas);
        stats.inserted += ms.inserted;
        stats.removed += ms.removed;

        const auto [xl, xr] = detect_interface(set);
        if (!(xl > cfg.a && xr < cfg.b)) {
            throw StateError("droplet left the domain");
        }
        iface.x_L = xl;
        iface.x_R = xr;
        iface.u_I = u_new;
        iface.p_left = p_L;
        iface.p_right = p_R;
        iface.T_left = T_L.T_I;
        iface.T_right = T_R.T_I;
    }
};

std::string status_line(const ScenarioConfig& cfg, Algorithm alg, double t, const RunStats& s)
{
    std::ostringstream out;
    out << cfg.name << " algorithm " << physics::to_string(alg) << ": t = " << t << " s after " << s.steps << " steps";
    return out.str();
}

} // namespace

RunArtifacts run_algorithm_I(const ScenarioConfig& cfg, const RunOptions& opt)
{
    cfg.validate();
    RunArtifacts out;
    out.algorithm = Algorithm::I;
    const auto grid = comparison_grid(cfg.a, cfg.b, opt.grid_points);
    ContinuumRun run(cfg);
    out.frames.push_back(make_frame(cfg, Algorithm::I, 0.0, grid, run.iface, gas_samples_I(run.set),
                                    liquid_samples(run.set, run.iface)));
    Schedule sched(cfg);
    double t = 0.0;
    while (!sched.done()) {
        double dt = 0.0;
        try {
            const auto b = physics::compute_time_step(summary_I(run.set), run.gas, run.tr, run.liq, Algorithm::I,
                                                      cfg.safety);
            dt = sched.clip(t, b.dt);
            auto set0 = run.set;
            auto iface0 = run.iface;
            try {
                run.step(dt);
            } catch (const StepRejected&) {
                run.set = std::move(set0);
                run.iface = iface0;
                ++run.stats.rejected_steps;
                dt *= 0.5;
                run.step(dt);
            }
            t += dt;
            track_dt(run.stats, dt);
            ++run.stats.steps;
        } catch (const SolverError&) {
            rethrow_with_context("I", run.stats.steps + 1, t);
        }
        out.history.push_back(record(t, dt, run.iface, run.set, run.liq));
        if (sched.reached(t)) {
            t = sched.target();
            out.frames.push_back(make_frame(cfg, Algorithm::I, t, grid, run.iface, gas_samples_I(run.set),
                                            liquid_samples(run.set, run.iface)));
            ++sched.next;
            if (opt.log) {
                opt.log(status_line(cfg, Algorithm::I, t, run.stats));
            }
        }
    }
    out.stats = run.stats;
    return out;
}

RunArtifacts run_algorithm_II(const ScenarioConfig& cfg, const RunOptions& opt)
{
    cfg.validate();
    RunArtifacts out;
    out.algorithm = Algorithm::II;
    const auto grid = comparison_grid(cfg.a, cfg.b, opt.grid_points);
    KineticRun run(cfg);
    out.frames.push_back(make_frame(cfg, Algorithm::II, 0.0, grid, run.iface, gas_samples_II(run.smooth),
                                    liquid_samples(run.set, run.iface)));
    Schedule sched(cfg);
    double t = 0.0;
    while (!sched.done()) {
        double dt = 0.0;
        try {
            const auto b = physics::compute_time_step(run.summary(), run.gas, run.tr, run.liq, Algorithm::II,
                                                      cfg.safety);
            dt = sched.clip(t, b.dt);
            run.step(dt);
            t += dt;
            track_dt(run.stats, dt);
            ++run.stats.steps;
        } catch (const SolverError&) {
            rethrow_with_context("II", run.stats.steps + 1, t);
        }
        out.history.push_back(record(t, dt, run.iface, run.set, run.liq));
        if (sched.reached(t)) {
            t = sched.target();
            out.frames.push_back(make_frame(cfg, Algorithm::II, t, grid, run.iface, gas_samples_II(run.smooth),
                                            liquid_samples(run.set, run.iface)));
            ++sched.next;
            if (opt.log) {
                opt.log(status_line(cfg, Algorithm::II, t, run.stats));
            }
        }
    }
    out.stats = run.stats;
    return out;
}

RunArtifacts run_algorithm(const ScenarioConfig& cfg, Algorithm alg, const RunOptions& opt)
{
    return alg == Algorithm::I ? run_algorithm_I(cfg, opt) : run_algorithm_II(cfg, opt);
}

} // namespace droplet::coupling
