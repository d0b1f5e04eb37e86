#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracmc/geometry.hpp"
#include "fracmc/phase_transition.hpp"
#include "fracmc/profile_average.hpp"

namespace fracmc {

enum class Regime { subcritical, critical, supercritical };

Regime regime_of(double s);
std::string to_string(Regime r);

// eps^{2s} (s < 1/2), eps |ln eps| (s = 1/2), eps (s > 1/2).
double eta_eps(double s, double eps);

// int_{R^n} [F(D(z)) - F(grad d(x) . z)] |z|^{-n-2s} dz with
// D(z) = (d(x + eps z) - d(x)) / eps.
QuadResult mismatch_integral(const Surface& surface, const Point& x, double eps, double s,
                             const std::function<double(double)>& F, const QuadratureSpec& quad);

// a_eps(xi; x) with F = phi(xi + .).
QuadResult a_eps_direct(const Surface& surface, const PhaseTransition& pt, double eps, double xi, const Point& x,
                        const QuadratureSpec& quad);

struct LaplacianSplit {
    QuadResult nd;   // eps^{2s} I_n[phi(d / eps)](x)
    QuadResult one;  // C_{n,s} I_1[phi](d(x) / eps)
    double value = 0.0;
    double error = 0.0;
};

// a_eps(d(x)/eps; x) as the difference of the n-D and 1-D operators.
LaplacianSplit a_eps_via_laplacians(const Surface& surface, const PhaseTransition& pt, double eps, const Point& x,
                                    const QuadratureSpec& quad);

struct AbarSample {
    Point x{0.0, 0.0, 0.0};
    double eps = 0.0;
    double value = 0.0;
    double error = 0.0;
    double target = 0.0;
};

// (1/eta) int a_eps(xi; x) phi'(xi) dxi, evaluated as
// (1/eta) int_z [Psi(D(z)) - Psi(grad d . z)] |z|^{-n-2s} dz.
AbarSample abar_eps(const Surface& surface, const ProfileAverage& psi, double eps, const Point& x,
                    const QuadratureSpec& quad);

// Slow path: adaptive xi quadrature of a_eps_direct over [-xi_max, xi_max].
AbarSample abar_eps_xi(const Surface& surface, const PhaseTransition& pt, double eps, const Point& x,
                       const QuadratureSpec& quad, double xi_max = 30.0);

struct ConvergenceCell {
    AbarSample sample;
    double abs_err = 0.0;
    bool failed = false;
    std::string message;
};

struct ConvergenceReport {
    std::string surface;
    double s = 0.0;
    int n = 2;
    std::vector<double> eps;
    std::vector<Point> points;
    // Row-major: cells[i * eps.size() + k] for point i and eps k.
    std::vector<ConvergenceCell> cells;
    // max over points of abs_err, per eps (NaN if every cell failed).
    std::vector<double> uniform_err;
};

using TargetFn = std::function<double(const Point&)>;

// Cells are evaluated concurrently unless quad.exec is serial; failures are
// recorded per cell.
ConvergenceReport convergence_study(const Surface& surface, const ProfileAverage& psi,
                                    const std::vector<double>& eps_list, const std::vector<Point>& points,
                                    const QuadratureSpec& quad, const TargetFn& target);

}  // namespace fracmc
