#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fracmc/aeps.hpp"
#include "fracmc/errors.hpp"

using namespace fracmc;

namespace {

SolverOptions small_grid() {
    SolverOptions o;
    o.L = 20.0;
    o.nodes = 801;
    return o;
}

const PhaseTransition& profile(double s) {
    static std::vector<std::pair<double, PhaseTransition>> cache;
    for (auto& [key, pt] : cache)
        if (key == s) return pt;
    cache.emplace_back(s, solve_phase_transition(make_potential("cosine"), s, small_grid()));
    return cache.back().second;
}

const ProfileAverage& average(double s) {
    static std::vector<std::pair<double, ProfileAverage>> cache;
    for (auto& [key, pa] : cache)
        if (key == s) return pa;
    cache.emplace_back(s, ProfileAverage(profile(s)));
    return cache.back().second;
}

Surface unit_circle() {
    SurfaceParams p;
    p.n = 2;
    return make_surface(SurfaceKind::sphere, p);
}

Surface line(int n) {
    SurfaceParams p;
    p.n = n;
    p.normal = n == 1 ? Point{1.0, 0.0, 0.0} : Point{0.6, 0.8, 0.0};
    p.offset = 0.3;
    return make_surface(SurfaceKind::hyperplane, p);
}

QuadratureSpec spec() {
    QuadratureSpec q;
    q.inner_cutoff = 1e-4;
    return q;
}

}  // namespace

TEST_CASE("scaling eta and regimes") {
    CHECK(eta_eps(0.25, 0.01) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(eta_eps(0.5, 0.1) == doctest::Approx(0.1 * std::log(10.0)).epsilon(1e-14));
    CHECK(eta_eps(0.75, 0.1) == 0.1);
    CHECK(regime_of(0.25) == Regime::subcritical);
    CHECK(regime_of(0.5) == Regime::critical);
    CHECK(regime_of(0.75) == Regime::supercritical);
    CHECK(to_string(Regime::critical) == "critical");
    CHECK_THROWS_AS(eta_eps(0.5, 1.5), Error);
    CHECK_THROWS_AS(regime_of(1.0), Error);
}

TEST_CASE("flat fronts and one dimension give exact zeros") {
    const QuadratureSpec q = spec();
    for (double s : {0.25, 0.5, 0.75}) {
        const PhaseTransition& pt = profile(s);
        for (int n : {1, 2, 3}) {
            const Surface S = line(n);
            const Point x = n == 1 ? Point{0.1, 0.0, 0.0} : Point{0.2, 0.4, 0.1};
            for (double eps : {0.2, 0.05}) {
                CHECK(std::abs(a_eps_direct(S, pt, eps, 0.7, x, q).value) < 1e-10);
                CHECK(std::abs(abar_eps(S, average(s), eps, x, q).value) < 1e-10);
            }
        }
    }
}

TEST_CASE("two-path identity on the unit circle") {
    const Surface C = unit_circle();
    for (double s : {0.25, 0.5, 0.75}) {
        const PhaseTransition& pt = profile(s);
        for (const Point& x : {Point{1.0, 0.0, 0.0}, Point{0.0, 0.97, 0.0}}) {
            const double eps = 0.1;
            const QuadResult direct = a_eps_direct(C, pt, eps, C.distance(x) / eps, x, spec());
            const LaplacianSplit split = a_eps_via_laplacians(C, pt, eps, x, spec());
            CAPTURE(s);
            CHECK(std::abs(direct.value - split.value) < 1e-4 * std::max(1.0, std::abs(direct.value)));
            CHECK(split.value == doctest::Approx(split.nd.value - split.one.value));
        }
    }
}

TEST_CASE("profile average route agrees with direct xi quadrature") {
    const Surface C = unit_circle();
    const Point x{1.0, 0.0, 0.0};
    QuadratureSpec q = spec();
    q.tolerance = 1e-5;
    for (double s : {0.5, 0.75}) {
        const AbarSample fast = abar_eps(C, average(s), 0.2, x, q);
        const AbarSample slow = abar_eps_xi(C, profile(s), 0.2, x, q, 30.0);
        CAPTURE(s);
        CHECK(std::abs(fast.value - slow.value) <= 1e-3 * std::abs(fast.value) + slow.error);
    }
}

TEST_CASE("shrinking ball has negative abar") {
    const Surface C = unit_circle();
    for (double s : {0.25, 0.5, 0.75})
        for (double eps : {0.2, 0.1, 0.05}) CHECK(abar_eps(C, average(s), eps, {1.0, 0.0, 0.0}, spec()).value < 0.0);
    // The complement grows: sign flips.
    CHECK(abar_eps(C.complement(), average(0.5), 0.1, {1.0, 0.0, 0.0}, spec()).value > 0.0);
}

TEST_CASE("convergence study") {
    const Surface C = unit_circle();
    const ProfileAverage& pa = average(0.5);
    const std::vector<Point> pts{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {1.1, 0.0, 0.0}};
    const std::vector<double> eps{0.2, 0.1, 0.05};
    const TargetFn target = [](const Point&) { return -1.0; };
    QuadratureSpec par = spec();
    par.exec = Exec::parallel;
    const ConvergenceReport rep = convergence_study(C, pa, eps, pts, par, target);
    REQUIRE(rep.cells.size() == 9);
    CHECK(rep.surface == "sphere");
    CHECK(rep.n == 2);
    for (const ConvergenceCell& c : rep.cells) CHECK_FALSE(c.failed);
    // Rotational symmetry between the first two points.
    for (size_t k = 0; k < 3; ++k) CHECK(rep.cells[k].sample.value == doctest::Approx(rep.cells[3 + k].sample.value).epsilon(1e-6));
    for (size_t k = 1; k < 3; ++k) CHECK(rep.uniform_err[k] <= rep.uniform_err[k - 1]);

    QuadratureSpec ser = spec();
    const ConvergenceReport rs = convergence_study(C, pa, eps, pts, ser, target);
    for (size_t c = 0; c < rep.cells.size(); ++c) CHECK(rs.cells[c].sample.value == rep.cells[c].sample.value);

    CHECK_THROWS_AS(convergence_study(C, pa, {}, pts, ser, target), Error);
    CHECK_THROWS_AS(convergence_study(C, pa, {0.1, 0.2}, pts, ser, target), Error);
    CHECK_THROWS_AS(convergence_study(C, pa, {0.1}, {{0.0, 0.0, 0.0}}, ser, target), Error);
}

TEST_CASE("argument validation") {
    const Surface C = unit_circle();
    const PhaseTransition& pt = profile(0.5);
    try {
        a_eps_direct(C, pt, 0.1, 0.0, {0.0, 0.0, 0.0}, spec());
        FAIL("expected out-of-neighborhood");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::out_of_neighborhood);
    }
    CHECK_THROWS_AS(a_eps_direct(C, pt, 1.5, 0.0, {1.0, 0.0, 0.0}, spec()), Error);
}
