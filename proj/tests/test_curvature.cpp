#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fracmc/curvature.hpp"
#include "fracmc/errors.hpp"

using namespace fracmc;

namespace {

const double pi = std::numbers::pi;

Surface ball(int n, double R = 1.0) {
    SurfaceParams p;
    p.n = n;
    p.radius = R;
    return make_surface(SurfaceKind::sphere, p);
}

// Closed form of kappa on a circle of radius R for s < 1/2.
double circle_kappa(double s, double R) {
    return -(std::pow(2.0, -2.0 * s) / (2.0 * s)) * std::sqrt(pi) * std::tgamma(0.5 - s) / std::tgamma(1.0 - s) *
           std::pow(R, -2.0 * s);
}

}  // namespace

TEST_CASE("kappa on flat fronts vanishes") {
    SurfaceParams p;
    p.n = 3;
    p.normal = {0.0, 0.6, 0.8};
    const Surface plane = make_surface(SurfaceKind::hyperplane, p);
    for (double s : {0.1, 0.25, 0.4}) CHECK(std::abs(fractional_curvature(plane, {0.3, 0.1, 0.2}, s, {}).kappa) < 1e-6);
}

TEST_CASE("kappa on circles matches the closed form") {
    for (double R : {1.0, 2.0})
        for (double s : {0.1, 0.25, 0.4}) {
            const FractionalCurvature k = fractional_curvature(ball(2, R), {R, 0.0, 0.0}, s, {});
            CAPTURE(s);
            CHECK(k.kappa == doctest::Approx(circle_kappa(s, R)).epsilon(1e-8));
            CHECK(k.kappa_plus >= 0.0);
            CHECK(k.kappa_minus >= 0.0);
        }
    CHECK(circle_kappa(0.25, 1.0) == doctest::Approx(-7.4162987092).epsilon(1e-9));
}

TEST_CASE("kappa sign flip and refinement") {
    const Surface C = ball(2);
    for (const Point& x : {Point{1.0, 0.0, 0.0}, Point{0.9, 0.1, 0.0}}) {
        const FractionalCurvature k = fractional_curvature(C, x, 0.25, {});
        const FractionalCurvature m = fractional_curvature(C.complement(), x, 0.25, {});
        CHECK(m.kappa == doctest::Approx(-k.kappa).epsilon(1e-8));
        CHECK(m.kappa_plus == doctest::Approx(k.kappa_minus).epsilon(1e-8));
        const QuadratureSpec fine = QuadratureSpec{}.refined();
        const FractionalCurvature r = fractional_curvature(C, x, 0.25, fine);
        CHECK(std::abs(r.kappa_plus - k.kappa_plus) <= 1e-3 * std::abs(k.kappa_plus) + 1e-12);
        CHECK(std::abs(r.kappa_minus - k.kappa_minus) <= 1e-3 * std::abs(k.kappa_minus) + 1e-12);
    }
    CHECK(fractional_curvature(ball(3), {1.0, 0.0, 0.0}, 0.25, {}).kappa < 0.0);
    CHECK_THROWS_AS(fractional_curvature(C, {1.0, 0.0, 0.0}, 0.5, {}), Error);
}

TEST_CASE("c2 forms") {
    for (int n : {2, 3})
        for (double s : {0.6, 0.75, 0.9}) {
            const C2Value c = constant_c2(n, s, {});
            CHECK(std::abs(c.value - c.integrated) < 1e-8);
            CHECK(c.value == doctest::Approx(c.closed).epsilon(1e-9));
            CHECK(c.value > 0.0);
        }
    CHECK_THROWS_AS(constant_c2(2, 0.4, {}), Error);
}

TEST_CASE("c_star and limit targets") {
    SolverOptions o;
    o.L = 20.0;
    o.nodes = 801;
    const PhaseTransition pt = solve_phase_transition(make_potential("cosine"), 0.75, o);
    QuadratureSpec q;
    q.inner_cutoff = 1e-4;
    const CStar cs = constant_cstar(2, pt, q);
    CHECK(cs.product > 0.0);
    CHECK(cs.c1 > 0.0);
    CHECK(cs.c2 > 0.0);
    CHECK(cs.direct == doctest::Approx(cs.product).epsilon(1e-4));

    const Point x{1.0, 0.0, 0.0};
    CHECK(limit_target(ball(2), x, 0.5, 0.0, q).value == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(limit_target(ball(2, 2.0), {2.0, 0.0, 0.0}, 0.5, 0.0, q).value == doctest::Approx(-0.5).epsilon(1e-10));
    // Ball of radius 2 in three dimensions: (1/2) (2 pi / 2) (-2 / 2).
    CHECK(limit_target(ball(3, 2.0), {2.0, 0.0, 0.0}, 0.5, 0.0, q).value ==
          doctest::Approx(-pi / 2.0).epsilon(1e-10));
    const LimitTarget sup = limit_target(ball(2), x, 0.75, cs.product, q);
    CHECK(sup.value == doctest::Approx(-cs.product).epsilon(1e-12));
    const LimitTarget sub = limit_target(ball(2), x, 0.25, 0.0, q);
    CHECK(sub.value == doctest::Approx(circle_kappa(0.25, 1.0)).epsilon(1e-8));
    SurfaceParams p1;
    p1.n = 1;
    p1.normal = {1.0, 0.0, 0.0};
    const Surface half = make_surface(SurfaceKind::hyperplane, p1);
    for (double s : {0.25, 0.5, 0.75}) CHECK(limit_target(half, {0.2, 0.0, 0.0}, s, 1.0, q).value == 0.0);
}
