#include "fracmc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <optional>

#include "fracmc/aeps.hpp"
#include "fracmc/curvature.hpp"
#include "fracmc/errors.hpp"
#include "fracmc/front.hpp"
#include "fracmc/nonlocal_ops.hpp"
#include "fracmc/profile_average.hpp"
#include "fracmc/report.hpp"

namespace fracmc {

using nlohmann::ordered_json;

namespace {

const double nan_value = std::numeric_limits<double>::quiet_NaN();

struct Context {
    const ExperimentConfig& cfg;
    std::string stem;
    std::filesystem::path dir;
    RunResult result;

    std::string path(const std::string& suffix) const { return (dir / (stem + suffix)).string(); }
    void csv(const std::string& suffix, const CsvTable& t) {
        write_csv(path(suffix), t);
        result.files.push_back(path(suffix));
    }
    void json(const std::string& suffix, const ordered_json& j) {
        write_json(path(suffix), j);
        result.files.push_back(path(suffix));
    }
    ordered_json header() const {
        ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["kind"] = to_string(cfg.kind);
        j["stem"] = stem;
        j["config"] = to_json(cfg);
        j["config"].erase("output_dir");
        return j;
    }
};

std::vector<std::string> point_columns(int n) {
    std::vector<std::string> c;
    for (int k = 1; k <= n; ++k) c.push_back("x" + std::to_string(k));
    return c;
}

std::vector<std::string> columns(std::vector<std::string> head, int n, std::vector<std::string> tail) {
    for (auto& c : point_columns(n)) head.push_back(c);
    for (auto& c : tail) head.push_back(c);
    return head;
}

void add_point(CsvTable& t, const Point& x, int n) {
    for (int k = 0; k < n; ++k) t.add(x[static_cast<size_t>(k)]);
}

ordered_json points_json(const std::vector<Point>& pts, int n) {
    ordered_json a = ordered_json::array();
    for (const Point& x : pts) {
        ordered_json p = ordered_json::array();
        for (int k = 0; k < n; ++k) p.push_back(x[static_cast<size_t>(k)]);
        a.push_back(p);
    }
    return a;
}

PhaseTransition profile(const ExperimentConfig& cfg) {
    return solve_phase_transition(make_potential(cfg.potential), cfg.s, cfg.solver);
}

// Runs body(i) for i in [0, count) concurrently; rethrows the lowest-index
// exception so the outcome does not depend on scheduling.
template <class F>
void for_cells(long count, F body) {
    std::vector<std::exception_ptr> errs(static_cast<size_t>(count));
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
            errs[static_cast<size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
}

void run_phi(Context& ctx) {
    const PhaseTransition pt = profile(ctx.cfg);
    const std::string csv = ctx.path(".csv"), meta = ctx.path(".profile.json");
    pt.write_csv(csv);
    pt.write_sidecar(meta);
    ctx.result.files.push_back(csv);
    ctx.result.files.push_back(meta);
    ordered_json j = ctx.header();
    ordered_json r;
    r["residual"] = pt.residual();
    r["tail_left"] = pt.tail_left();
    r["tail_right"] = pt.tail_right();
    r["tail_theory"] = pt.tail_theory();
    r["phi_at_zero"] = pt.phi(0.0);
    r["nodes"] = pt.nodes();
    if (ctx.cfg.s > 0.5) {
        const QuadResult c1 = energy_constant_c1(pt, ctx.cfg.quad);
        r["c1"] = c1.value;
        r["c1_error"] = c1.error;
    }
    j["result"] = r;
    ctx.json(".json", j);
}

void run_constants(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const int n = c.surface.n;
    ordered_json r;
    r["n"] = n;
    r["s"] = c.s;
    r["regime"] = to_string(regime_of(c.s));
    r["C_ns"] = constant_Cns(n, c.s);
    const QuadResult q = constant_Cns_quadrature(n, c.s);
    r["C_ns_quadrature"] = q.value;
    r["C_ns_quadrature_error"] = q.error;
    r["sphere_factor"] = sphere_area(n - 2) / (n - 1);
    if (c.s > 0.5) {
        const C2Value c2 = constant_c2(n, c.s, c.quad);
        r["c2"] = c2.value;
        r["c2_integrated"] = c2.integrated;
        r["c2_closed"] = c2.closed;
        const PhaseTransition pt = profile(c);
        const CStar cs = constant_cstar(n, pt, c.quad);
        r["c1"] = cs.c1;
        r["c_star"] = cs.product;
        r["c_star_direct"] = cs.direct;
        r["c_star_error"] = cs.error;
    }
    ordered_json j = ctx.header();
    j["result"] = r;
    ctx.json(".json", j);
}

void run_identity(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const Surface S = make_surface(c.surface_kind, c.surface);
    const PhaseTransition pt = profile(c);
    const std::vector<Point> pts = sample_points(c, S);
    const int n = S.dim();
    const long ne = static_cast<long>(c.eps.size()), cells = static_cast<long>(pts.size()) * ne;
    std::vector<QuadResult> direct(static_cast<size_t>(cells));
    std::vector<LaplacianSplit> split(static_cast<size_t>(cells));
    QuadratureSpec q = c.quad;
    q.exec = Exec::serial;
    for_cells(cells, [&](long k) {
        const Point& x = pts[static_cast<size_t>(k / ne)];
        const double eps = c.eps[static_cast<size_t>(k % ne)];
        direct[static_cast<size_t>(k)] = a_eps_direct(S, pt, eps, S.distance(x) / eps, x, q);
        split[static_cast<size_t>(k)] = a_eps_via_laplacians(S, pt, eps, x, q);
    });
    CsvTable t(columns({"surface", "s", "eps"}, n, {"direct", "via_laplacians", "abs_diff", "rel_diff", "est_err"}));
    double worst = 0.0;
    for (long k = 0; k < cells; ++k) {
        const QuadResult& a = direct[static_cast<size_t>(k)];
        const LaplacianSplit& b = split[static_cast<size_t>(k)];
        const double diff = std::abs(a.value - b.value);
        const double rel = diff / std::max(std::abs(a.value), 1e-300);
        worst = std::max(worst, rel);
        t.row().add(to_string(S.kind())).add(c.s).add(c.eps[static_cast<size_t>(k % ne)]);
        add_point(t, pts[static_cast<size_t>(k / ne)], n);
        t.add(a.value).add(b.value).add(diff).add(rel).add(a.error + b.error);
    }
    ctx.csv(".csv", t);
    ordered_json j = ctx.header();
    j["points"] = points_json(pts, n);
    j["result"] = {{"cells", cells}, {"max_rel_diff", worst}};
    ctx.json(".json", j);
}

void run_abar(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const Surface S = make_surface(c.surface_kind, c.surface);
    const std::vector<Point> pts = sample_points(c, S);
    const int n = S.dim();
    const PhaseTransition pt = profile(c);
    const ProfileAverage pa(pt, Exec::parallel);
    double c_star = 0.0;
    if (c.s > 0.5 && n >= 2) c_star = constant_cstar(n, pt, c.quad).product;
    std::vector<double> targets(pts.size());
    QuadratureSpec serial = c.quad;
    serial.exec = Exec::serial;
    for_cells(static_cast<long>(pts.size()),
              [&](long i) { targets[static_cast<size_t>(i)] = limit_target(S, pts[static_cast<size_t>(i)], c.s, c_star, serial).value; });
    QuadratureSpec par = c.quad;
    par.exec = Exec::parallel;
    const ConvergenceReport rep = convergence_study(
        S, pa, c.eps, pts, par, [&](const Point& x) {
            const auto it = std::find(pts.begin(), pts.end(), x);
            return targets[static_cast<size_t>(it - pts.begin())];
        });
    const size_t ne = c.eps.size();
    CsvTable t(columns({"surface", "s", "eps"}, n, {"abar", "target", "abs_err", "est_err", "failed"}));
    ordered_json failures = ordered_json::array();
    for (size_t k = 0; k < rep.cells.size(); ++k) {
        const ConvergenceCell& cell = rep.cells[k];
        t.row().add(rep.surface).add(c.s).add(c.eps[k % ne]);
        add_point(t, pts[k / ne], n);
        t.add(cell.sample.value).add(cell.sample.target).add(cell.abs_err).add(cell.sample.error);
        t.add(std::string(cell.failed ? "1" : "0"));
        if (cell.failed) failures.push_back({{"point", k / ne}, {"eps", c.eps[k % ne]}, {"message", cell.message}});
    }
    ctx.csv(".csv", t);
    ordered_json j = ctx.header();
    j["points"] = points_json(pts, n);
    ordered_json ue = ordered_json::array();
    for (double u : rep.uniform_err) ue.push_back(json_number(u));
    ordered_json r;
    r["regime"] = to_string(regime_of(c.s));
    r["c_star"] = c_star;
    r["eps"] = c.eps;
    r["uniform_err"] = ue;
    r["failed_cells"] = failures;
    j["result"] = r;
    ctx.json(".json", j);
}

void run_kappa(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const Surface S = make_surface(c.surface_kind, c.surface);
    const std::vector<Point> pts = sample_points(c, S);
    const int n = S.dim();
    std::vector<FractionalCurvature> out(pts.size());
    QuadratureSpec q = c.quad;
    q.exec = Exec::serial;
    for_cells(static_cast<long>(pts.size()),
              [&](long i) { out[static_cast<size_t>(i)] = fractional_curvature(S, pts[static_cast<size_t>(i)], c.s, q); });
    CsvTable t(columns({"surface", "s"}, n, {"kappa", "kappa_plus", "kappa_minus", "est_err"}));
    for (size_t i = 0; i < pts.size(); ++i) {
        t.row().add(to_string(S.kind())).add(c.s);
        add_point(t, pts[i], n);
        t.add(out[i].kappa).add(out[i].kappa_plus).add(out[i].kappa_minus).add(out[i].error);
    }
    ctx.csv(".csv", t);
    ordered_json j = ctx.header();
    j["points"] = points_json(pts, n);
    ctx.json(".json", j);
}

void run_evolve(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const Surface S = make_surface(c.surface_kind, c.surface);
    const PhaseTransition pt = profile(c);
    GridSpec g;
    g.nodes = c.evolve.nodes;
    g.half_width = c.evolve.half_width;
    const double eps = c.eps.front();
    const Evolver ev(S, pt, eps, g, Exec::parallel, c.evolve.cfl);
    FrontField f = ev.initial_field();
    CsvTable series({"step", "t", "radius", "cx", "cy", "circularity", "line_deviation", "points"});
    bool vanished = false;
    std::vector<std::pair<double, double>> radius;
    auto record = [&]() {
        try {
            const Front fr = extract_front(f);
            series.row().add(f.steps).add(f.t);
            if (fr.circle.valid) {
                series.add(fr.circle.radius).add(fr.circle.cx).add(fr.circle.cy).add(fr.circle.circularity);
                radius.emplace_back(f.t, fr.circle.radius);
            } else {
                series.add(nan_value).add(nan_value).add(nan_value).add(nan_value);
            }
            series.add(fr.line_deviation).add(static_cast<long>(fr.points.size()));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::no_level_crossing) throw;
            vanished = true;
        }
    };
    auto snapshot = [&]() {
        CsvTable t({"x", "y", "u"});
        for (int j = 0; j < g.nodes; ++j)
            for (int i = 0; i < g.nodes; ++i) t.row().add(g.coord(i)).add(g.coord(j)).add(f.at(i, j));
        char buf[32];
        std::snprintf(buf, sizeof buf, "-snap-%06ld.csv", f.steps);
        ctx.csv(buf, t);
    };
    record();
    if (c.evolve.snapshot_every > 0) snapshot();
    const double dt = ev.stable_dt();
    while (!vanished && f.t < c.evolve.t_end - 1e-12 * c.evolve.t_end) {
        ev.step(f, std::min(dt, c.evolve.t_end - f.t));
        if (f.steps % c.evolve.front_every == 0) record();
        if (c.evolve.snapshot_every > 0 && f.steps % c.evolve.snapshot_every == 0) snapshot();
    }
    if (!vanished && f.steps % c.evolve.front_every != 0) record();
    ctx.csv("-front.csv", series);

    ordered_json r;
    r["eps"] = eps;
    r["eta"] = ev.eta();
    r["dt"] = dt;
    r["lambda"] = ev.lambda();
    r["steps"] = f.steps;
    r["t_final"] = f.t;
    r["clamp_events"] = f.clamp_events;
    r["front_vanished"] = vanished;
    if (radius.size() >= 4) {
        // dR^2/dt on the middle half of the recorded radii.
        const size_t lo = radius.size() / 4, hi = radius.size() - radius.size() / 4;
        std::vector<double> rate;
        for (size_t k = lo; k + 1 < hi; ++k) {
            const auto& [t0, r0] = radius[k];
            const auto& [t1, r1] = radius[k + 1];
            rate.push_back((r1 * r1 - r0 * r0) / (t1 - t0));
        }
        if (!rate.empty()) {
            double mean = 0.0, var = 0.0;
            for (double v : rate) mean += v;
            mean /= static_cast<double>(rate.size());
            for (double v : rate) var += (v - mean) * (v - mean);
            var /= static_cast<double>(rate.size());
            r["dR2dt_mean"] = mean;
            r["dR2dt_cv"] = json_number(std::sqrt(var) / std::abs(mean));
        }
    }
    ordered_json j = ctx.header();
    j["result"] = r;
    ctx.json(".json", j);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    Context ctx{cfg, output_stem(cfg), std::filesystem::path(cfg.output_dir), {}};
    std::error_code ec;
    std::filesystem::create_directories(ctx.dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create output directory '" + cfg.output_dir + "': " + ec.message());
    ctx.result.stem = ctx.stem;
    switch (cfg.kind) {
        case ExperimentKind::phi: run_phi(ctx); break;
        case ExperimentKind::constants: run_constants(ctx); break;
        case ExperimentKind::identity_check: run_identity(ctx); break;
        case ExperimentKind::abar_convergence: run_abar(ctx); break;
        case ExperimentKind::kappa: run_kappa(ctx); break;
        case ExperimentKind::evolve: run_evolve(ctx); break;
    }
    return ctx.result;
}

int exit_status(const Error& e) { return is_numerical_failure(e.kind()) ? 3 : 2; }

ordered_json failure_record(const std::string& kind, const Error& e) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    j["status"] = "failed";
    j["exit_status"] = exit_status(e);
    j["error"] = to_string(e.kind());
    j["message"] = e.what();
    if (const auto* nc = dynamic_cast<const NonConvergence*>(&e)) j["residual"] = json_number(nc->residual());
    return j;
}

}  // namespace fracmc
