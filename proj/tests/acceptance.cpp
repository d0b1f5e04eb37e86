// Acceptance battery: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria. Criterion numbers given as arguments select a
// subset.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fracmc/aeps.hpp"
#include "fracmc/curvature.hpp"
#include "fracmc/errors.hpp"
#include "fracmc/evolution.hpp"
#include "fracmc/front.hpp"
#include "fracmc/nonlocal_ops.hpp"
#include "fracmc/phase_transition.hpp"
#include "fracmc/profile_average.hpp"

using namespace fracmc;

namespace {

const double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char b[128];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

const PhaseTransition& profile(double s) {
    static std::map<double, PhaseTransition> cache;
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, solve_phase_transition(make_potential("cosine"), s)).first;
    return it->second;
}

const ProfileAverage& average(double s) {
    static std::map<double, ProfileAverage> cache;
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, ProfileAverage(profile(s))).first;
    return it->second;
}

QuadratureSpec accurate() {
    QuadratureSpec q;
    q.inner_cutoff = 1e-4;
    return q;
}

Surface sphere(int n) {
    SurfaceParams p;
    p.n = n;
    return make_surface(SurfaceKind::sphere, p);
}

Surface cylinder() {
    SurfaceParams p;
    p.n = 3;
    p.axis = {0.0, 0.0, 1.0};
    return make_surface(SurfaceKind::cylinder, p);
}

Outcome two_path() {
    double worst = 0.0;
    int cases = 0;
    for (const Surface& S : {sphere(3), cylinder()})
        for (double s : {0.25, 0.5, 0.75})
            for (double eps : {0.1, 0.05}) {
                const Point x{0.97, 0.0, 0.0};
                const QuadResult a = a_eps_direct(S, profile(s), eps, S.distance(x) / eps, x, accurate());
                const LaplacianSplit b = a_eps_via_laplacians(S, profile(s), eps, x, accurate());
                worst = std::max(worst, std::abs(a.value - b.value) / std::abs(a.value));
                ++cases;
            }
    return {worst <= 1e-3, std::to_string(cases) + " cases, max rel diff " + fmt("%.2e", worst)};
}

Outcome dimension_reduction() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    int cases = 0;
    for (double s : {0.25, 0.5, 0.75}) {
        const PhaseTransition& pt = profile(s);
        const Field1 v = [&](double t) { return pt.phi(t); };
        for (int n : {2, 3})
            for (int k = 0; k < 5; ++k) {
                Point e{0.0, 0.0, 0.0};
                double len = 0.0;
                for (int i = 0; i < n; ++i) {
                    e[i] = nd(rng);
                    len += e[i] * e[i];
                }
                for (int i = 0; i < n; ++i) e[i] /= std::sqrt(len);
                const Point x{0.3 * nd(rng), 0.3 * nd(rng), n == 3 ? 0.3 * nd(rng) : 0.0};
                const DimensionReduction r = check_dimension_reduction(v, e, x, n, s, accurate(), FarLimits{0.0, 1.0});
                worst = std::max(worst, r.residual);
                ++cases;
            }
    }
    return {worst < 1e-4, std::to_string(cases) + " cases (v = phi), max residual " + fmt("%.2e", worst)};
}

Outcome cns() {
    double worst = 0.0;
    for (int n : {2, 3})
        for (double s : {0.25, 0.5, 0.75}) {
            const QuadResult q = constant_Cns_quadrature(n, s);
            worst = std::max(worst, std::abs(q.value - constant_Cns(n, s)));
        }
    const double e2 = std::abs(constant_Cns(2, 0.5) - 2.0), e3 = std::abs(constant_Cns(3, 0.5) - pi);
    const double q2 = std::abs(constant_Cns_quadrature(2, 0.5).value - 2.0);
    const double q3 = std::abs(constant_Cns_quadrature(3, 0.5).value - pi);
    const double exact = std::max({e2, e3, q2, q3});
    return {worst <= 1e-8 && exact <= 1e-10,
            "quadrature vs closed form " + fmt("%.1e", worst) + ", (2,1/2)->2 and (3,1/2)->pi within " + fmt("%.1e", exact)};
}

Outcome phi_solver() {
    const PhaseTransition& half = profile(0.5);
    double arctan = 0.0;
    for (int j = 0; j < half.nodes(); ++j)
        arctan = std::max(arctan, std::abs(half.values()[static_cast<size_t>(j)] - (0.5 + std::atan(half.node(j)) / pi)));
    double res = 0.0, mass_ratio = 0.0;
    for (double s : {0.25, 0.5, 0.75}) {
        const PhaseTransition& pt = profile(s);
        const std::vector<double> r = standing_wave_residual(pt);
        for (size_t j = 1; j + 1 < r.size(); ++j) res = std::max(res, std::abs(r[j]));
        const double L = pt.L();
        const double mass = pt.phi(L) - pt.phi(-L);
        mass_ratio = std::max(mass_ratio, std::abs(mass - 1.0) / (3.0 * std::pow(L, -2.0 * s)));
    }
    return {arctan <= 1e-3 && res <= 1e-6 && mass_ratio <= 1.0,
            "arctan error " + fmt("%.2e", arctan) + ", max interior residual " + fmt("%.2e", res) +
                ", |int phi' - 1| / (3 L^{-2s}) <= " + fmt("%.3f", mass_ratio)};
}

Outcome c2_cstar() {
    double cross = 0.0, cs_diff = 0.0;
    bool positive = true;
    for (int n : {2, 3})
        for (double s : {0.6, 0.75, 0.9}) {
            const C2Value c2 = constant_c2(n, s, accurate());
            cross = std::max(cross, std::abs(c2.value - c2.integrated));
            positive = positive && c2.value > 0.0;
            const CStar cs = constant_cstar(n, profile(s), accurate());
            cs_diff = std::max(cs_diff, std::abs(cs.product - cs.direct) / cs.product);
            positive = positive && cs.product > 0.0 && cs.c1 > 0.0;
        }
    return {cross <= 1e-8 && cs_diff <= 1e-4 && positive,
            "c2 cross-form " + fmt("%.1e", cross) + ", c_star product vs direct (rel) " + fmt("%.1e", cs_diff) +
                (positive ? ", all positive" : ", NOT all positive")};
}

struct Sweep {
    std::vector<double> eps;
    std::vector<double> err;
    double target = 0.0;
    double last_value = 0.0;
};

Sweep abar_sweep(double s, const std::vector<double>& eps) {
    const Surface C = sphere(2);
    const Point x{1.0, 0.0, 0.0};
    const double c_star = s > 0.5 ? constant_cstar(2, profile(s), accurate()).product : 0.0;
    Sweep w;
    w.eps = eps;
    w.target = limit_target(C, x, s, c_star, accurate()).value;
    for (double e : eps) {
        const AbarSample a = abar_eps(C, average(s), e, x, accurate());
        w.err.push_back(std::abs(a.value - w.target));
        w.last_value = a.value;
    }
    return w;
}

bool non_increasing(const std::vector<double>& v) {
    for (size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[k - 1]) return false;
    return true;
}

std::string sweep_text(const Sweep& w) {
    std::string t = "target " + fmt("%.6f", w.target) + ", rel err";
    for (size_t k = 0; k < w.eps.size(); ++k) t += " " + fmt("%.4g", w.eps[k]) + ":" + fmt("%.3f", w.err[k] / std::abs(w.target));
    return t;
}

const std::vector<double> kHalvings{0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};

Outcome critical() {
    const Sweep w = abar_sweep(0.5, {0.2, 0.1, 0.05, 0.025});
    const double rel = w.err.back() / std::abs(w.target);
    const bool mono = non_increasing(w.err);
    return {rel <= 0.3 && mono, sweep_text(w) + (mono ? ", monotone" : ", NOT monotone")};
}

Outcome regime(double s, double tol) {
    const Sweep w = abar_sweep(s, kHalvings);
    const double rel = w.err.back() / std::abs(w.target);
    const bool mono = non_increasing(w.err);
    return {rel <= tol && mono, sweep_text(w) + (mono ? ", monotone" : ", NOT monotone")};
}

Outcome degenerate() {
    double worst = 0.0;
    for (double s : {0.25, 0.5, 0.75})
        for (int n : {1, 2, 3}) {
            SurfaceParams p;
            p.n = n;
            p.normal = n == 1 ? Point{1.0, 0.0, 0.0} : (n == 2 ? Point{0.6, -0.8, 0.0} : Point{1.0, 2.0, 2.0});
            p.offset = 0.2;
            const Surface S = make_surface(SurfaceKind::hyperplane, p);
            for (double e : {0.2, 0.1, 0.05, 0.025})
                for (double off : {0.0, 0.3, -0.45}) {
                    const Point x{0.2 + off * S.gradient({0, 0, 0})[0], 0.1 + off * S.gradient({0, 0, 0})[1],
                                  n == 3 ? -0.3 + off * S.gradient({0, 0, 0})[2] : 0.0};
                    Point xx = x;
                    if (n == 1) xx = {0.2 + off, 0.0, 0.0};
                    if (n == 2) xx[2] = 0.0;
                    worst = std::max(worst, std::abs(abar_eps(S, average(s), e, xx, accurate()).value));
                }
        }
    return {worst < 1e-10, "hyperplanes n = 2, 3 and the half-line n = 1, max |abar| " + fmt("%.1e", worst)};
}

Outcome evolution() {
    const PhaseTransition& pt = profile(0.5);
    GridSpec g;  // 256^2 on [-3, 3]^2
    const double eps = 0.1;
    std::string detail;
    bool pass = true;

    SurfaceParams lp;
    lp.n = 2;
    lp.normal = {1.0, 2.0, 0.0};
    lp.offset = 0.13;
    const Surface line = make_surface(SurfaceKind::hyperplane, lp);
    const Evolver flat(line, pt, eps, g);
    FrontField f = flat.initial_field();
    // Signed offset of the extracted level set along the unit normal.
    auto offset = [&](const FrontField& field) {
        const Front fr = extract_front(field);
        const Point n = line.gradient({0.0, 0.0, 0.0});
        double sum = 0.0;
        for (const FrontPoint& q : fr.points) sum += n[0] * q.x + n[1] * q.y;
        return sum / static_cast<double>(fr.points.size());
    };
    const double x0 = offset(f);
    // The sampled profile first relaxes onto the lattice equilibrium; drift
    // is measured over t in [0.1, 0.2].
    while (f.t < 0.1) flat.step(f);
    const std::vector<double> u0 = f.values;
    const double t0 = f.t, x1 = offset(f);
    while (f.t < 0.2) flat.step(f);
    double drift = 0.0;
    for (size_t k = 0; k < u0.size(); ++k) drift = std::max(drift, std::abs(f.values[k] - u0[k]));
    const double rate = drift / (f.t - t0);
    const double moved = std::max(std::abs(x1 - x0), std::abs(offset(f) - x0));
    pass = pass && rate < 5e-3 && f.clamp_events == 0;
    detail += "oblique flat front: sup drift " + fmt("%.2e", rate) + "/unit time over [0.1, 0.2], level set moved " +
              fmt("%.1e", moved);

    const Evolver ev(sphere(2), pt, eps, g);
    FrontField c = ev.initial_field();
    std::vector<std::pair<double, double>> R{{0.0, extract_front(c).circle.radius}};
    bool decreasing = true;
    while (R.back().second > 0.3 && c.steps < 5000) {
        for (int k = 0; k < 10; ++k) ev.step(c);
        const Front fr = extract_front(c);
        decreasing = decreasing && fr.circle.radius < R.back().second;
        R.emplace_back(c.t, fr.circle.radius);
    }
    const size_t lo = R.size() / 4, hi = R.size() - R.size() / 4;
    std::vector<double> slope;
    for (size_t k = lo; k + 1 < hi; ++k)
        slope.push_back((R[k + 1].second * R[k + 1].second - R[k].second * R[k].second) / (R[k + 1].first - R[k].first));
    double mean = 0.0, var = 0.0;
    for (double v : slope) mean += v;
    mean /= static_cast<double>(slope.size());
    for (double v : slope) var += (v - mean) * (v - mean);
    const double cv = std::sqrt(var / static_cast<double>(slope.size())) / std::abs(mean);
    bool inside = true;
    for (double v : c.values) inside = inside && v > 0.0 && v < 1.0;
    pass = pass && decreasing && cv < 0.25 && c.clamp_events == 0 && inside;
    detail += "; circle R 1 -> " + fmt("%.3f", R.back().second) + " in " + std::to_string(c.steps) + " steps, " +
              (decreasing ? "strictly decreasing" : "NOT decreasing") + ", dR^2/dt " + fmt("%.2f", mean) + " (CV " +
              fmt("%.3f", cv) + "), clamp events " + std::to_string(f.clamp_events + c.clamp_events);
    return {pass, detail};
}

Outcome kappa_props() {
    double flat = 0.0, anti = 0.0, stab = 0.0;
    bool finite = true;
    SurfaceParams p;
    p.n = 3;
    p.normal = {2.0, -1.0, 2.0};
    const Surface plane = make_surface(SurfaceKind::hyperplane, p);
    p.n = 2;
    p.normal = {0.6, 0.8, 0.0};
    const Surface line = make_surface(SurfaceKind::hyperplane, p);
    const QuadratureSpec q;
    for (double s : {0.1, 0.25, 0.4}) {
        flat = std::max(flat, std::abs(fractional_curvature(plane, {0.1, 0.2, 0.3}, s, q).kappa));
        flat = std::max(flat, std::abs(fractional_curvature(line, {0.1, 0.2, 0.0}, s, q).kappa));
        for (const auto& [S, x] : {std::pair{sphere(2), Point{0.95, 0.1, 0.0}}, std::pair{sphere(3), Point{1.0, 0.0, 0.0}},
                                   std::pair{cylinder(), Point{0.97, 0.0, 0.0}}}) {
            const FractionalCurvature k = fractional_curvature(S, x, s, q);
            const FractionalCurvature m = fractional_curvature(S.complement(), x, s, q);
            const FractionalCurvature r = fractional_curvature(S, x, s, q.refined());
            anti = std::max(anti, std::abs(k.kappa + m.kappa) / (k.error + m.error + 1e-12 * std::abs(k.kappa)));
            for (auto [a, b] : {std::pair{k.kappa_plus, r.kappa_plus}, std::pair{k.kappa_minus, r.kappa_minus}}) {
                finite = finite && std::isfinite(a) && std::isfinite(b);
                if (a != 0.0 || b != 0.0) stab = std::max(stab, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
            }
        }
    }
    return {flat < 1e-6 && anti <= 1.0 && finite && stab < 1e-3,
            "hyperplane |kappa| " + fmt("%.1e", flat) + ", |kappa[d] + kappa[-d]| / est. error " + fmt("%.2f", anti) +
                ", kappa+- refinement change (rel) " + fmt("%.1e", stab)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"two-path identity", two_path},
        {"dimension reduction", dimension_reduction},
        {"C_{n,s} closed form", cns},
        {"standing-wave solver", phi_solver},
        {"c2 forms and c_star", c2_cstar},
        {"abar limit, s = 1/2", critical},
        {"abar limit, s = 1/4", [] { return regime(0.25, 0.2); }},
        {"abar limit, s = 3/4", [] { return regime(0.75, 0.3); }},
        {"degenerate exactness", degenerate},
        {"evolution", evolution},
        {"kappa properties", kappa_props},
    };
    std::printf("acceptance battery (%d OpenMP threads)\n", omp_get_max_threads());
    int failed = 0;
    std::vector<bool> selected(criteria.size(), argc == 1);
    for (int a = 1; a < argc; ++a) {
        const int k = std::atoi(argv[a]);
        if (k < 1 || k > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[a]);
            return 2;
        }
        selected[static_cast<size_t>(k - 1)] = true;
    }
    int ran = 0;
    for (size_t k = 0; k < criteria.size(); ++k) {
        if (!selected[k]) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str(), sec);
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", ran - failed, ran);
    return failed;
}
