#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fracmc/errors.hpp"
#include "fracmc/evolution.hpp"
#include "fracmc/front.hpp"

using namespace fracmc;

namespace {

const PhaseTransition& profile() {
    static const PhaseTransition pt = [] {
        SolverOptions o;
        o.L = 20.0;
        o.nodes = 801;
        return solve_phase_transition(make_potential("cosine"), 0.5, o);
    }();
    return pt;
}

GridSpec small_grid() {
    GridSpec g;
    g.nodes = 61;  // spacing 0.1 on [-3, 3]
    g.half_width = 3.0;
    return g;
}

Surface circle(double R = 1.0) {
    SurfaceParams p;
    p.n = 2;
    p.radius = R;
    return make_surface(SurfaceKind::sphere, p);
}

Surface vertical_line() {
    SurfaceParams p;
    p.n = 2;
    p.normal = {1.0, 0.0, 0.0};
    return make_surface(SurfaceKind::hyperplane, p);
}

double sup(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("initial front") {
    const GridSpec g = small_grid();
    const FrontField f = init_front(circle(), profile(), 0.2, g);
    CHECK(f.at(30, 30) == doctest::Approx(profile().phi(5.0)).epsilon(1e-12));
    CHECK(std::abs(f.at(40, 30) - 0.5) < 1e-12);  // node (1, 0) lies on the circle
    CHECK(f.at(0, 0) < 0.05);
    CHECK(f.t == 0.0);
    try {
        init_front(circle(), profile(), 0.15, g);
        FAIL("expected under-resolved");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::under_resolved);
    }
}

TEST_CASE("serial and parallel operators agree") {
    const GridSpec g = small_grid();
    const Evolver par(circle(), profile(), 0.2, g, Exec::parallel);
    const Evolver ser(circle(), profile(), 0.2, g, Exec::serial);
    const FrontField f = par.initial_field();
    const std::vector<double> a = par.apply_operator(f.values), b = ser.apply_operator(f.values);
    double diff = 0.0;
    for (size_t k = 0; k < a.size(); ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
    CHECK(diff < 1e-9 * sup(a));
    CHECK(par.stable_dt() == ser.stable_dt());
}

TEST_CASE("constants are annihilated and zero is stationary") {
    const GridSpec g = small_grid();
    for (Exec e : {Exec::serial, Exec::parallel}) {
        const Evolver ev(circle(), profile(), 0.2, g, e);
        const size_t m = static_cast<size_t>(g.nodes) * g.nodes;
        for (double c : {0.0, 1.0, 0.3}) CHECK(sup(ev.apply_operator(std::vector<double>(m, c), c)) < 1e-10);
        CHECK(sup(ev.apply_operator(std::vector<double>(m, 0.0), 0.0)) == 0.0);
    }
}

TEST_CASE("flat front is steady") {
    const GridSpec g = small_grid();
    const Evolver ev(vertical_line(), profile(), 0.2, g);
    FrontField f = ev.initial_field();
    CHECK(sup(ev.residual(f.values)) < 5e-3);
    const std::vector<double> u0 = f.values;
    for (int k = 0; k < 200; ++k) ev.step(f);
    double drift = 0.0;
    for (size_t k = 0; k < u0.size(); ++k) drift = std::max(drift, std::abs(f.values[k] - u0[k]));
    CHECK(drift / f.t < 5e-3);
    CHECK(f.clamp_events == 0);
    const Front fr = extract_front(f);
    CHECK(fr.line_deviation < g.spacing());
}

TEST_CASE("order preservation") {
    const GridSpec g = small_grid();
    const Evolver ev(circle(), profile(), 0.2, g);
    FrontField lo = ev.initial_field(), hi = ev.initial_field();
    for (int j = 0; j < g.nodes; ++j)
        for (int i = 0; i < g.nodes; ++i) {
            const double r = std::hypot(g.coord(i) - 0.5, g.coord(j));
            double& v = hi.values[static_cast<size_t>(j) * g.nodes + i];
            v = std::min(v + 0.05 * std::exp(-4.0 * r * r), 0.999);
        }
    for (int k = 0; k < 100; ++k) {
        ev.step(lo);
        ev.step(hi);
    }
    double worst = 0.0;
    for (size_t k = 0; k < lo.values.size(); ++k) worst = std::max(worst, lo.values[k] - hi.values[k]);
    CHECK(worst <= 1e-8);
}

TEST_CASE("circle shrinks") {
    const GridSpec g = small_grid();
    const Evolver ev(circle(), profile(), 0.2, g);
    FrontField f = ev.initial_field();
    const Front f0 = extract_front(f);
    REQUIRE(f0.circle.valid);
    CHECK(std::abs(f0.circle.radius - 1.0) < g.spacing());
    CHECK(f0.circle.circularity < 0.05);
    double prev = f0.circle.radius;
    // The circle disappears near t = 0.045 at this eps.
    for (int k = 0; k < 8; ++k) {
        for (int m = 0; m < 5; ++m) ev.step(f);
        const Front fr = extract_front(f);
        CHECK(fr.circle.radius < prev);
        CHECK(fr.circle.circularity < 0.05);
        prev = fr.circle.radius;
    }
    CHECK(f.clamp_events == 0);
    CHECK(f.steps == 40);
    for (double v : f.values) CHECK((v > 0.0 && v < 1.0));
}

TEST_CASE("step validation") {
    const GridSpec g = small_grid();
    const Evolver ev(circle(), profile(), 0.2, g);
    FrontField f = ev.initial_field();
    CHECK_THROWS_AS(ev.step(f, 0.0), Error);
    try {
        ev.step(f, 1e3 * ev.stable_dt());
        FAIL("expected stability violation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::stability_violation);
    }
    FrontField flat = ev.initial_field();
    std::fill(flat.values.begin(), flat.values.end(), 0.2);
    CHECK_THROWS_AS(extract_front(flat), Error);
}
