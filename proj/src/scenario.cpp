#include "droplet/scenario.hpp"

#include "droplet/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace droplet {

namespace pt = boost::property_tree;

double ScenarioConfig::reference_temperature() const
{
    if (transport_temperature > 0.0) {
        return transport_temperature;
    }
    if (gas.empty()) {
        throw ConfigError("scenario has no gas regions");
    }
    const auto widest = std::max_element(gas.begin(), gas.end(), [](const auto& l, const auto& r) {
        return (l.hi - l.lo) < (r.hi - r.lo);
    });
    return widest->T;
}

physics::Transport ScenarioConfig::transport() const
{
    return physics::transport_coefficients(reference_temperature(), species);
}

const GasRegionConfig& ScenarioConfig::region_at(double x) const
{
    if (gas.empty()) {
        throw ConfigError("scenario has no gas regions");
    }
    const GasRegionConfig* found = &gas.front();
    for (const auto& r : gas) {
        if (r.lo <= x) {
            found = &r;
        }
    }
    return *found;
}

void ScenarioConfig::validate() const
{
    auto fail = [&](const std::string& what) { throw ConfigError("scenario '" + name + "': " + what); };
    if (!(a < b)) fail("domain requires a < b");
    if (!(a < liquid.lo && liquid.lo < liquid.hi && liquid.hi < b)) fail("liquid interval must lie strictly inside (a, b)");
    if (!(liquid.rho_l > 0.0 && liquid.kappa_l > 0.0 && liquid.c_p > 0.0)) fail("liquid properties must be positive");
    if (!(liquid.T > 0.0)) fail("liquid temperature must be positive");
    if (gas.empty()) fail("no gas regions");
    for (std::size_t k = 0; k < gas.size(); ++k) {
        const auto& r = gas[k];
        if (!(r.lo < r.hi)) fail("gas region " + std::to_string(k + 1) + " is empty");
        if (!(r.rho > 0.0 && r.T > 0.0)) fail("gas region " + std::to_string(k + 1) + " needs rho > 0 and T > 0");
        if (k > 0 && r.lo < gas[k - 1].lo) fail("gas regions must be ordered by x");
    }
    if (gas.front().lo > a || gas.back().hi < b) fail("gas regions must cover [a, b]");
    if (particles < 8) fail("particles must be at least 8");
    if (molecules_per_cell == 0) fail("molecules_per_cell must be positive");
    if (!(t_end > 0.0)) fail("t_end must be positive");
    double prev = 0.0;
    for (double t : output_times) {
        if (!(t > prev) || t > t_end) fail("output times must be ascending in (0, t_end]");
        prev = t;
    }
    for (const auto* bc : {&left, &right}) {
        if (!(bc->T > 0.0)) fail("boundary temperature must be positive");
        if (bc->kind == BoundaryKind::Open && !(bc->rho > 0.0)) fail("open boundary needs rho > 0");
    }
    if (!(safety.cfl > 0.0 && safety.diffusive > 0.0 && safety.collision > 0.0)) fail("safety factors must be positive");
    if (max_subcycles < 0 || refine_cap < 1) fail("invalid max_subcycles or refine_cap");
}

namespace {

ScenarioConfig test1(std::string name, double scale, double t_end)
{
    const auto argon = physics::GasSpecies::argon();
    ScenarioConfig c;
    c.name = std::move(name);
    c.a = 0.0;
    c.b = 1e-4 * scale;
    const double T0 = physics::eos_temperature(1.226, 1e5, argon);
    c.gas = {{c.a, c.b, 1.226, 0.0, T0}};
    c.liquid = {4e-5 * scale, 6e-5 * scale, 1000.0, 100.0, 298.0, 1e5};
    c.left = {BoundaryKind::Wall, 0.0, 0.0, T0, false};
    c.right = c.left;
    c.t_end = t_end;
    c.output_times = {t_end};
    c.transport_temperature = T0;
    return c;
}

ScenarioConfig test2(std::string name, double rho_l)
{
    const auto argon = physics::GasSpecies::argon();
    ScenarioConfig c;
    c.name = std::move(name);
    c.a = 0.0;
    c.b = 1e-4;
    const double T_post = physics::eos_temperature(2.214, 148407.3, argon);
    const double T_pre = physics::eos_temperature(1.58317, 98066.5, argon);
    c.gas = {{0.0, 1e-5, 2.214, 89.981, T_post}, {1e-5, 1e-4, 1.58317, 0.0, T_pre}};
    c.liquid = {4e-5, 6e-5, rho_l, 0.0, 298.0, 98066.5};
    c.left = {BoundaryKind::Open, 2.214, 89.981, T_post, false};
    c.right = {BoundaryKind::Open, 1.58317, 0.0, T_pre, true};
    c.t_end = 1.75e-7;
    c.output_times = {1.75e-7};
    c.transport_temperature = T_pre;
    return c;
}

ScenarioConfig test3()
{
    const auto argon = physics::GasSpecies::argon();
    ScenarioConfig c;
    c.name = "test3";
    c.a = 0.0;
    c.b = 1e-4;
    c.gas = {{0.0, 2e-5, 1.0, 0.0, 298.0}, {3e-5, 1e-4, 0.25, 0.0, 298.0}};
    c.liquid = {2e-5, 3e-5, 10.0, 0.0, 298.0, physics::eos_pressure(0.25, 298.0, argon)};
    c.left = {BoundaryKind::Wall, 0.0, 0.0, 298.0, false};
    c.right = c.left;
    c.t_end = 9.938e-7;
    c.output_times = {2.218e-7, 5.678e-7, 9.938e-7};
    c.transport_temperature = 298.0;
    return c;
}

} // namespace

std::vector<std::string> preset_names()
{
    return {"test1a", "test1b", "test1c", "test2a", "test2b", "test3"};
}

ScenarioConfig preset(std::string_view name)
{
    if (name == "test1a") return test1("test1a", 1.0, 5.2e-8);
    if (name == "test1b") return test1("test1b", 1e-1, 5.2e-9);
    if (name == "test1c") return test1("test1c", 1e-2, 5.2e-10);
    if (name == "test2a") return test2("test2a", 1000.0);
    if (name == "test2b") return test2("test2b", 10.0);
    if (name == "test3") return test3();
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

namespace {

std::vector<double> parse_list(const std::string& text)
{
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    double v;
    while (in >> v) {
        out.push_back(v);
    }
    if (!in.eof()) {
        throw ConfigError("cannot parse number list '" + text + "'");
    }
    return out;
}

template <class T>
void read(const pt::ptree& sec, const char* key, T& dst)
{
    if (auto v = sec.get_optional<T>(key)) {
        dst = *v;
    }
}

void read_boundary(const pt::ptree& sec, BoundaryConfig& bc)
{
    if (auto kind = sec.get_optional<std::string>("type")) {
        if (*kind == "wall") {
            bc.kind = BoundaryKind::Wall;
        } else if (*kind == "open") {
            bc.kind = BoundaryKind::Open;
        } else {
            throw ConfigError("boundary type must be 'wall' or 'open', got '" + *kind + "'");
        }
    }
    read(sec, "rho", bc.rho);
    read(sec, "u", bc.u);
    read(sec, "T", bc.T);
    read(sec, "u_extrapolated", bc.u_extrapolated);
}

} // namespace

ScenarioConfig load_config(const std::filesystem::path& path)
{
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    ScenarioConfig c;
    try {
        const auto empty = pt::ptree{};
        const auto& sc = tree.get_child("scenario", empty);
        if (auto base = sc.get_optional<std::string>("base")) {
            c = preset(*base);
        }
        read(sc, "name", c.name);
        read(sc, "t_end", c.t_end);
        if (auto times = sc.get_optional<std::string>("output_times")) {
            c.output_times = parse_list(*times);
        }
        read(sc, "seed", c.seed);
        read(sc, "particles", c.particles);
        read(sc, "molecules_per_cell", c.molecules_per_cell);
        read(sc, "transport_temperature", c.transport_temperature);

        const auto& dom = tree.get_child("domain", empty);
        read(dom, "a", c.a);
        read(dom, "b", c.b);

        const auto& liq = tree.get_child("liquid", empty);
        read(liq, "lo", c.liquid.lo);
        read(liq, "hi", c.liquid.hi);
        read(liq, "rho", c.liquid.rho_l);
        read(liq, "u", c.liquid.u);
        read(liq, "T", c.liquid.T);
        read(liq, "p", c.liquid.p);
        read(liq, "kappa", c.liquid.kappa_l);
        read(liq, "c_p", c.liquid.c_p);

        std::vector<GasRegionConfig> regions;
        for (int k = 1; tree.get_child_optional("gas" + std::to_string(k)); ++k) {
            const auto& g = tree.get_child("gas" + std::to_string(k));
            GasRegionConfig r;
            r.lo = g.get<double>("lo");
            r.hi = g.get<double>("hi");
            r.rho = g.get<double>("rho");
            r.u = g.get<double>("u", 0.0);
            if (auto T = g.get_optional<double>("T")) {
                r.T = *T;
            } else {
                r.T = physics::eos_temperature(r.rho, g.get<double>("p"), c.species);
            }
            regions.push_back(r);
        }
        if (!regions.empty()) {
            c.gas = std::move(regions);
        }

        read_boundary(tree.get_child("boundary_left", empty), c.left);
        read_boundary(tree.get_child("boundary_right", empty), c.right);

        const auto& num = tree.get_child("numerics", empty);
        read(num, "cfl", c.safety.cfl);
        read(num, "diffusive", c.safety.diffusive);
        read(num, "collision", c.safety.collision);
        read(num, "max_subcycles", c.max_subcycles);
        read(num, "refine_cap", c.refine_cap);
    } catch (const pt::ptree_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    if (c.name.empty()) {
        c.name = path.stem().string();
    }
    c.validate();
    return c;
}

std::vector<KnudsenEntry> knudsen_numbers(const ScenarioConfig& cfg)
{
    const double L = cfg.characteristic_length();
    std::vector<KnudsenEntry> out;
    for (const auto& r : cfg.gas) {
        const double lambda = physics::mean_free_path(r.rho, cfg.species);
        out.push_back({r.lo, r.hi, r.rho, lambda, lambda / L});
    }
    return out;
}

} // namespace droplet
