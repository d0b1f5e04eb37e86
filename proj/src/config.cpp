#include "fracmc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "fracmc/errors.hpp"

namespace fracmc {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::vector<std::pair<ExperimentKind, const char*>> kKinds = {
    {ExperimentKind::phi, "phi"},
    {ExperimentKind::constants, "constants"},
    {ExperimentKind::identity_check, "identity-check"},
    {ExperimentKind::abar_convergence, "abar-convergence"},
    {ExperimentKind::kappa, "kappa"},
    {ExperimentKind::evolve, "evolve"},
};

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::validation, "config: " + what); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) invalid(where + " must be an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) invalid("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void get(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        invalid(std::string("wrong type for '") + key + "'");
    }
}

Point point_from(const json& j) {
    if (!j.is_array() || j.empty() || j.size() > 3) invalid("points must be arrays of 1 to 3 numbers");
    Point p{0.0, 0.0, 0.0};
    for (size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) invalid("point coordinates must be numbers");
        p[k] = j[k].get<double>();
    }
    return p;
}

ordered_json point_json(const Point& p) { return ordered_json::array({p[0], p[1], p[2]}); }

}  // namespace

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (const auto& [k, n] : kKinds)
        if (name == n) return k;
    invalid("unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
    for (const auto& [k, n] : kKinds)
        if (k == kind) return n;
    return "unknown";
}

ordered_json to_json(const ExperimentConfig& c) {
    ordered_json j;
    j["schema_version"] = c.schema_version;
    j["kind"] = to_string(c.kind);
    const SurfaceParams& p = c.surface;
    j["surface"] = {{"kind", to_string(c.surface_kind)},
                    {"n", p.n},
                    {"center", point_json(p.center)},
                    {"radius", p.radius},
                    {"normal", point_json(p.normal)},
                    {"offset", p.offset},
                    {"axis", point_json(p.axis)},
                    {"profile", to_string(p.profile)},
                    {"amplitude", p.amplitude},
                    {"wavenumber", p.wavenumber},
                    {"rho_cap", p.rho_cap},
                    {"complement", p.complement}};
    j["s"] = c.s;
    j["potential"] = to_string(c.potential);
    j["solver"] = {{"L", c.solver.L}, {"nodes", c.solver.nodes}, {"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}};
    j["eps"] = c.eps;
    ordered_json list = ordered_json::array();
    for (const Point& x : c.points.list) list.push_back(point_json(x));
    j["points"] = {{"rule", c.points.rule}, {"count", c.points.count}, {"band", c.points.band}, {"list", list}};
    j["quadrature"] = {{"inner_cutoff", c.quad.inner_cutoff},
                       {"outer_radius", c.quad.outer_radius},
                       {"radial_nodes", c.quad.radial_nodes},
                       {"angular_nodes", c.quad.angular_nodes},
                       {"tolerance", c.quad.tolerance}};
    j["evolve"] = {{"nodes", c.evolve.nodes},
                   {"half_width", c.evolve.half_width},
                   {"t_end", c.evolve.t_end},
                   {"snapshot_every", c.evolve.snapshot_every},
                   {"front_every", c.evolve.front_every},
                   {"cfl", c.evolve.cfl}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    check_keys(j, "config",
               {"schema_version", "kind", "surface", "s", "potential", "solver", "eps", "points", "quadrature", "evolve",
                "output_dir", "seed"});
    get(j, "schema_version", c.schema_version);
    if (c.schema_version != kSchemaVersion) invalid("unsupported schema_version " + std::to_string(c.schema_version));
    std::string text;
    if (j.contains("kind")) {
        get(j, "kind", text);
        c.kind = experiment_kind_from_string(text);
    }
    if (j.contains("surface")) {
        const json& s = j.at("surface");
        check_keys(s, "surface",
                   {"kind", "n", "center", "radius", "normal", "offset", "axis", "profile", "amplitude", "wavenumber",
                    "rho_cap", "complement"});
        SurfaceParams& p = c.surface;
        try {
            if (s.contains("kind")) c.surface_kind = surface_kind_from_string(s.at("kind").get<std::string>());
            if (s.contains("profile")) p.profile = graph_profile_from_string(s.at("profile").get<std::string>());
        } catch (const json::exception&) {
            invalid("surface kind and profile must be strings");
        } catch (const Error& e) {
            invalid(e.what());
        }
        get(s, "n", p.n);
        if (s.contains("center")) p.center = point_from(s.at("center"));
        get(s, "radius", p.radius);
        if (s.contains("normal")) p.normal = point_from(s.at("normal"));
        get(s, "offset", p.offset);
        if (s.contains("axis")) p.axis = point_from(s.at("axis"));
        get(s, "amplitude", p.amplitude);
        get(s, "wavenumber", p.wavenumber);
        get(s, "rho_cap", p.rho_cap);
        get(s, "complement", p.complement);
    }
    get(j, "s", c.s);
    if (j.contains("potential")) {
        get(j, "potential", text);
        try {
            c.potential = potential_kind_from_string(text);
        } catch (const Error& e) {
            invalid(e.what());
        }
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, "solver", {"L", "nodes", "tol", "max_iter"});
        get(s, "L", c.solver.L);
        get(s, "nodes", c.solver.nodes);
        get(s, "tol", c.solver.tol);
        get(s, "max_iter", c.solver.max_iter);
    }
    get(j, "eps", c.eps);
    if (j.contains("points")) {
        const json& s = j.at("points");
        check_keys(s, "points", {"rule", "count", "band", "list"});
        get(s, "rule", c.points.rule);
        get(s, "count", c.points.count);
        get(s, "band", c.points.band);
        if (s.contains("list")) {
            if (!s.at("list").is_array()) invalid("points.list must be an array");
            c.points.list.clear();
            for (const json& x : s.at("list")) c.points.list.push_back(point_from(x));
        }
    }
    if (j.contains("quadrature")) {
        const json& s = j.at("quadrature");
        check_keys(s, "quadrature", {"inner_cutoff", "outer_radius", "radial_nodes", "angular_nodes", "tolerance"});
        get(s, "inner_cutoff", c.quad.inner_cutoff);
        get(s, "outer_radius", c.quad.outer_radius);
        get(s, "radial_nodes", c.quad.radial_nodes);
        get(s, "angular_nodes", c.quad.angular_nodes);
        get(s, "tolerance", c.quad.tolerance);
    }
    if (j.contains("evolve")) {
        const json& s = j.at("evolve");
        check_keys(s, "evolve", {"nodes", "half_width", "t_end", "snapshot_every", "front_every", "cfl"});
        get(s, "nodes", c.evolve.nodes);
        get(s, "half_width", c.evolve.half_width);
        get(s, "t_end", c.evolve.t_end);
        get(s, "snapshot_every", c.evolve.snapshot_every);
        get(s, "front_every", c.evolve.front_every);
        get(s, "cfl", c.evolve.cfl);
    }
    get(j, "output_dir", c.output_dir);
    get(j, "seed", c.seed);
    return c;
}

ExperimentConfig read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        invalid(std::string("parse error: ") + e.what());
    }
    return config_from_json(j);
}

void validate(const ExperimentConfig& c) {
    if (!(c.s > 0.0 && c.s < 1.0)) invalid("s must lie in (0, 1)");
    if (c.kind == ExperimentKind::kappa && !(c.s < 0.5)) invalid("kappa experiments need s < 1/2");
    try {
        c.quad.validate();
    } catch (const Error& e) {
        invalid(e.what());
    }
    if (!(c.solver.L >= 20.0) || c.solver.nodes < 101 || c.solver.nodes % 2 == 0 || !(c.solver.tol >= 1e-8) ||
        c.solver.max_iter < 1)
        invalid("solver needs L >= 20, an odd node count >= 101, tol >= 1e-8 and max_iter >= 1");
    double rho = 0.0;
    try {
        rho = make_surface(c.surface_kind, c.surface).rho();
    } catch (const Error& e) {
        invalid(e.what());
    }
    const bool uses_eps = c.kind == ExperimentKind::identity_check || c.kind == ExperimentKind::abar_convergence ||
                          c.kind == ExperimentKind::evolve;
    if (uses_eps) {
        if (c.eps.empty()) invalid("eps list is empty");
        for (double e : c.eps)
            if (!(e > 0.0 && e < std::min(1.0, rho))) invalid("every eps must lie in (0, min(1, rho))");
    }
    if (c.kind == ExperimentKind::abar_convergence)
        for (size_t k = 1; k < c.eps.size(); ++k)
            if (!(c.eps[k] < c.eps[k - 1])) invalid("eps list must be strictly decreasing");
    const bool uses_points = c.kind == ExperimentKind::identity_check || c.kind == ExperimentKind::abar_convergence ||
                             c.kind == ExperimentKind::kappa;
    if (uses_points) {
        const std::string& r = c.points.rule;
        if (r != "list" && r != "boundary" && r != "random") invalid("points.rule must be list, boundary or random");
        if (r == "list" && c.points.list.empty()) invalid("points.list is empty");
        if (r != "list" && (c.points.count < 1 || c.points.count > 100000)) invalid("points.count must lie in [1, 1e5]");
        if (!(c.points.band >= 0.0 && c.points.band < 1.0)) invalid("points.band must lie in [0, 1)");
    }
    if (c.kind == ExperimentKind::evolve) {
        if (c.surface.n != 2) invalid("evolution runs in two dimensions");
        if (c.surface_kind != SurfaceKind::sphere && c.surface_kind != SurfaceKind::hyperplane)
            invalid("evolution starts from a circle or a line");
        const EvolveSettings& e = c.evolve;
        if (e.nodes < 8 || e.nodes > 4096) invalid("evolve.nodes must lie in [8, 4096]");
        if (!(e.half_width > 0.0)) invalid("evolve.half_width must be positive");
        if (!(e.t_end > 0.0)) invalid("evolve.t_end must be positive");
        if (e.snapshot_every < 0 || e.front_every < 1) invalid("evolve cadences must be positive");
        if (!(e.cfl > 0.0 && e.cfl <= 1.0)) invalid("evolve.cfl must lie in (0, 1]");
    }
    if (c.kind == ExperimentKind::constants && (c.surface.n < 2 || c.surface.n > 3))
        invalid("constants need n in {2, 3}");
}

std::string canonical_string(const ExperimentConfig& cfg) {
    ordered_json j = to_json(cfg);
    j.erase("output_dir");
    return j.dump();
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string output_stem(const ExperimentConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_string(cfg))));
    return to_string(cfg.kind) + "-" + buf;
}

std::vector<Point> sample_points(const ExperimentConfig& cfg, const Surface& surface) {
    const PointRule& r = cfg.points;
    if (r.rule == "list") return r.list;
    const SurfaceParams& p = surface.params();
    const int n = p.n;
    const double pi = std::numbers::pi;
    // Point on the surface from parameters (u, v) in [0, 1)^2.
    auto foot = [&](double u, double v) -> Point {
        switch (surface.kind()) {
            case SurfaceKind::sphere: {
                if (n == 2) return {p.center[0] + p.radius * std::cos(2 * pi * u), p.center[1] + p.radius * std::sin(2 * pi * u), 0.0};
                const double z = 1.0 - 2.0 * v, rr = std::sqrt(std::max(0.0, 1.0 - z * z));
                return {p.center[0] + p.radius * rr * std::cos(2 * pi * u), p.center[1] + p.radius * rr * std::sin(2 * pi * u),
                        p.center[2] + p.radius * z};
            }
            case SurfaceKind::hyperplane: {
                Point base{p.offset * p.normal[0], p.offset * p.normal[1], p.offset * p.normal[2]};
                if (n == 1) return base;
                const auto t = orthonormal_complement(p.normal, n);
                const double a = 2.0 * u - 1.0, b = 2.0 * v - 1.0;
                for (int k = 0; k < 3; ++k) base[k] += a * t[0][k] + (n == 3 ? b * t[1][k] : 0.0);
                return base;
            }
            case SurfaceKind::cylinder: {
                const auto t = orthonormal_complement(p.axis, 3);
                const double c = std::cos(2 * pi * u), sn = std::sin(2 * pi * u), h = 2.0 * v - 1.0;
                Point x{};
                for (int k = 0; k < 3; ++k)
                    x[k] = p.center[k] + p.radius * (c * t[0][k] + sn * t[1][k]) + h * p.axis[k];
                return x;
            }
            case SurfaceKind::graph: {
                const double x1 = 2.0 * u - 1.0;
                const double g = p.profile == GraphProfile::parabola ? 0.5 * p.amplitude * x1 * x1
                                                                     : p.amplitude * std::cos(p.wavenumber * x1);
                return {x1, g, 0.0};
            }
        }
        return {0.0, 0.0, 0.0};
    };
    auto offset = [&](const Point& x, double delta) {
        const Point g = surface.gradient(x);
        return Point{x[0] + delta * g[0], x[1] + delta * g[1], x[2] + delta * g[2]};
    };
    std::vector<Point> out;
    out.reserve(static_cast<size_t>(r.count));
    if (r.rule == "boundary") {
        const int side = n == 3 ? std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(r.count))))) : 1;
        for (int k = 0; k < r.count; ++k) {
            const double u = n == 3 ? (k % side + 0.5) / side : (surface.kind() == SurfaceKind::sphere ? 1.0 * k / r.count : (k + 0.5) / r.count);
            const double v = n == 3 ? (k / side + 0.5) / side : 0.5;
            out.push_back(foot(u, v));
        }
        return out;
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Offsets stay within band * min(rho, 1) of the surface.
    const double rho = std::min(surface.rho(), 1.0);
    for (int k = 0; k < r.count; ++k) {
        const double u = unit(rng), v = unit(rng), w = unit(rng);
        out.push_back(offset(foot(u, v), r.band * rho * (2.0 * w - 1.0)));
    }
    return out;
}

}  // namespace fracmc
