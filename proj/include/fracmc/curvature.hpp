#pragma once

#include <string>

#include "fracmc/aeps.hpp"
#include "fracmc/geometry.hpp"
#include "fracmc/phase_transition.hpp"

namespace fracmc {

struct FractionalCurvature {
    double kappa = 0.0;
    double kappa_plus = 0.0;   // nu{d(x+z) > d(x), grad d . z < 0}
    double kappa_minus = 0.0;  // nu{d(x+z) < d(x), grad d . z > 0}
    double error = 0.0;
};

// kappa[x, d] for s in (0, 1/2) with nu = |z|^{-n-2s} dz.
FractionalCurvature fractional_curvature(const Surface& surface, const Point& x, double s,
                                         const QuadratureSpec& quad);

struct C2Value {
    double value = 0.0;        // first (defining) form
    double integrated = 0.0;   // integrated-by-parts form
    double closed = 0.0;       // Beta-function closed form
    double error = 0.0;
};

// Throws cross-form-mismatch if the two quadrature forms differ by more than 1e-8.
C2Value constant_c2(int n, double s, const QuadratureSpec& quad);

// int_0^inf q^{n-2} ((n-1) - q^2) (1 + q^2)^{-(n+2s+2)/2} dq.
double c2_integrated_integral(int n, double s);

struct CStar {
    double product = 0.0;  // c1 * c2
    double direct = 0.0;   // (n+2s)/2 * q-integral * double phi-integral
    double c1 = 0.0;
    double c2 = 0.0;
    double error = 0.0;
};

CStar constant_cstar(int n, const PhaseTransition& pt, const QuadratureSpec& quad);

struct LimitTarget {
    double s = 0.0;
    Regime regime = Regime::critical;
    double value = 0.0;
    double laplacian = 0.0;      // Delta d(x)
    double sphere_factor = 0.0;  // |S^{n-2}| / (n - 1)
    double c_star = 0.0;         // s > 1/2 only
    FractionalCurvature kappa;   // s < 1/2 only
};

// Limit of abar_eps(x): kappa (s < 1/2), |S^{n-2}|/(2(n-1)) Delta d (s = 1/2),
// c_star |S^{n-2}|/(2(n-1)) Delta d (s > 1/2), 0 for n = 1. c_star is only
// read for s > 1/2.
LimitTarget limit_target(const Surface& surface, const Point& x, double s, double c_star,
                           const QuadratureSpec& quad);

}  // namespace fracmc
