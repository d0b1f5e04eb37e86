#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "fracmc/errors.hpp"
#include "fracmc/phase_transition.hpp"

using namespace fracmc;

namespace {

const double pi = std::numbers::pi;

SolverOptions small_grid() {
    SolverOptions o;
    o.L = 20.0;
    o.nodes = 801;
    return o;
}

const PhaseTransition& profile(double s, PotentialKind kind) {
    static std::vector<std::pair<std::pair<double, PotentialKind>, PhaseTransition>> cache;
    for (auto& [key, pt] : cache)
        if (key.first == s && key.second == kind) return pt;
    cache.emplace_back(std::make_pair(s, kind), solve_phase_transition(make_potential(kind), s, small_grid()));
    return cache.back().second;
}

}  // namespace

TEST_CASE("potentials") {
    const Potential q = make_potential("quartic");
    CHECK(q.W(0.5) == doctest::Approx(1.0 / 16.0));
    CHECK(q.Wp(0.0) == 0.0);
    CHECK(q.wpp0() == doctest::Approx(2.0));
    CHECK(q.Wpp(1.0) == doctest::Approx(2.0));
    const Potential c = make_potential("cosine");
    CHECK(std::abs(c.W(0.0)) < 1e-15);
    CHECK(std::abs(c.W(1.0)) < 1e-15);
    CHECK(c.wpp0() == doctest::Approx(pi));
    for (const Potential& W : {q, c}) {
        CHECK(std::abs(W.Wp(1.0)) < 1e-15);
        for (int k = 1; k < 1000; ++k) CHECK(W.W(k / 1000.0) > 0.0);
        // Finite-difference derivatives.
        for (double u : {0.1, 0.37, 0.8}) {
            CHECK(W.Wp(u) == doctest::Approx((W.W(u + 1e-6) - W.W(u - 1e-6)) / 2e-6).epsilon(1e-7));
            CHECK(W.Wpp(u) == doctest::Approx((W.Wp(u + 1e-6) - W.Wp(u - 1e-6)) / 2e-6).epsilon(1e-7));
        }
    }
    CHECK_THROWS_AS(make_potential("sextic"), Error);
    CHECK(q.scaled(2.0).W(0.5) == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("arctan layer for s = 1/2 and the cosine well") {
    const PhaseTransition& pt = profile(0.5, PotentialKind::cosine);
    double err = 0.0;
    for (int j = 0; j < pt.nodes(); ++j)
        err = std::max(err, std::abs(pt.values()[j] - (0.5 + std::atan(pt.node(j)) / pi)));
    CHECK(err < 1e-3);
    CHECK(pt.phi(1.0) == doctest::Approx(0.75).epsilon(1e-3));
    for (double xi : {-37.0, -3.3, 0.21, 2.0, 55.0})
        CHECK(std::abs(pt.phi_prime(xi) - 1.0 / (pi * (1.0 + xi * xi))) < 1e-3);
}

TEST_CASE("profile invariants") {
    for (double s : {0.25, 0.5, 0.75})
        for (PotentialKind kind : {PotentialKind::quartic, PotentialKind::cosine}) {
            CAPTURE(s);
            const PhaseTransition& pt = profile(s, kind);
            const auto& u = pt.values();
            CHECK(pt.residual() <= 1e-6);
            const auto r = standing_wave_residual(pt);
            double rmax = 0.0;
            for (size_t j = 1; j + 1 < r.size(); ++j) rmax = std::max(rmax, std::abs(r[j]));
            CHECK(rmax <= 1e-6);
            CHECK(pt.phi(0.0) == doctest::Approx(0.5).epsilon(1e-12));
            for (size_t j = 1; j < u.size(); ++j) REQUIRE(u[j] > u[j - 1]);
            for (double d : pt.slopes()) CHECK(d > 0.0);
            CHECK(u.front() > 0.0);
            CHECK(u.back() < 1.0);
            double sym = 0.0;
            for (size_t j = 0; j < u.size(); ++j) sym = std::max(sym, std::abs(u[j] + u[u.size() - 1 - j] - 1.0));
            CHECK(sym < 1e-6);
            // Mass of phi' on [-L, L].
            CHECK(std::abs(u.back() - u.front() - 1.0) <= 3.0 * std::pow(pt.L(), -2.0 * s));
            // Continuity across the tail junction.
            for (double edge : {-pt.L(), pt.L()}) {
                CHECK(std::abs(pt.phi(edge * (1 + 1e-12)) - pt.phi(edge * (1 - 1e-12))) < 1e-4);
                CHECK(std::abs(pt.phi_prime(edge * (1 + 1e-12)) - pt.phi_prime(edge * (1 - 1e-12))) < 1e-4);
            }
            // Two-sided power-law bounds on phi'.
            double lo = 1e300, hi = 0.0;
            for (double a = 5.0; a <= pt.L(); a += 0.25)
                for (double xi : {a, -a}) {
                    const double v = pt.phi_prime(xi) * std::pow(a, 1.0 + 2.0 * s);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            CHECK(lo > 0.0);
            CHECK(hi / lo < 50.0);
            // Tail amplitude is within a factor of the leading-order value.
            CHECK(pt.tail_right() / pt.tail_theory() > 0.5);
            CHECK(pt.tail_right() / pt.tail_theory() < 2.0);
        }
}

TEST_CASE("solver preconditions") {
    const Potential W = make_potential("cosine");
    SolverOptions o = small_grid();
    CHECK_THROWS_AS(solve_phase_transition(W, 0.0, o), Error);
    CHECK_THROWS_AS(solve_phase_transition(W, 1.0, o), Error);
    o.L = 10.0;
    CHECK_THROWS_AS(solve_phase_transition(W, 0.5, o), Error);
    o = small_grid();
    o.tol = 1e-9;
    CHECK_THROWS_AS(solve_phase_transition(W, 0.5, o), Error);
    o = small_grid();
    o.max_iter = 1;
    try {
        (void)solve_phase_transition(make_potential("quartic"), 0.25, o);
        FAIL("expected non-convergence");
    } catch (const NonConvergence& e) {
        CHECK(e.kind() == ErrorKind::non_convergence);
        CHECK(e.residual() > 0.0);
    }
}

TEST_CASE("csv round trip") {
    const PhaseTransition& pt = profile(0.75, PotentialKind::quartic);
    const auto dir = std::filesystem::temp_directory_path() / "fracmc_test_phase";
    std::filesystem::create_directories(dir);
    const std::string csv = (dir / "phi.csv").string(), js = (dir / "phi.json").string();
    pt.write_csv(csv);
    pt.write_sidecar(js);
    const PhaseTransition back = PhaseTransition::read(csv, js);
    CHECK(back.nodes() == pt.nodes());
    CHECK(back.L() == pt.L());
    CHECK(back.s() == pt.s());
    for (int j = 0; j < pt.nodes(); ++j) REQUIRE(back.values()[j] == pt.values()[j]);
    for (double xi : {-100.0, -3.1, 0.0, 0.77, 20.0, 1e4}) CHECK(back.phi(xi) == pt.phi(xi));
    std::filesystem::remove_all(dir);
}

TEST_CASE("energy constant c1") {
    const PhaseTransition& pt = profile(0.75, PotentialKind::quartic);
    QuadratureSpec q;
    q.tolerance = 1e-7;
    const QuadResult a = energy_constant_c1(pt, q);
    const QuadResult b = energy_constant_c1(pt, q.refined());
    CHECK(a.value > 0.0);
    CHECK(std::isfinite(a.value));
    CHECK(std::abs(a.value - b.value) < 1e-4);
    QuadratureSpec half = q;
    half.inner_cutoff *= 0.5;
    CHECK(std::abs(energy_constant_c1(pt, half).value - a.value) < 1e-6);
    const QuadResult d = energy_double_integral(pt, q);
    CHECK(d.value == doctest::Approx(2.0 * a.value).epsilon(1e-5));
    CHECK_THROWS_AS(energy_constant_c1(profile(0.5, PotentialKind::cosine), q), Error);
    try {
        (void)energy_constant_c1(profile(0.25, PotentialKind::cosine), q);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_regime);
    }
}
