#pragma once

#include <functional>
#include <optional>

#include "fracmc/quadrature.hpp"

namespace fracmc {

using Field1 = std::function<double(double)>;
using FieldN = std::function<double(const Point&)>;

// u(-inf), u(+inf)
struct FarLimits {
    double left = 0.0;
    double right = 0.0;
};

// Round-off level of a + b - 2c.
double sample_noise(double a, double b, double c);

// PV int (u(x+y) - u(x)) |y|^{-1-2s} dy via the symmetrized second difference.
QuadResult frac_lap_1d(const Field1& u, double s, double x, const QuadratureSpec& quad,
                       std::optional<FarLimits> limits = std::nullopt);

struct NdOptions {
    // Pole for the angular quadrature (defaults to e_n).
    std::optional<Point> pole;
    // w -> lim_{r->inf} u(x + r w), if known.
    std::function<double(const Point&)> far_limit;
};

// PV int_{R^n} (u(x+y) - u(x)) |y|^{-n-2s} dy, n in {1, 2, 3}.
QuadResult frac_lap_nd(const FieldN& u, double s, const Point& x, int n, const QuadratureSpec& quad,
                       const NdOptions& opt = {});

// int_{R^{n-1}} (|y|^2 + 1)^{-(n+2s)/2} dy in closed form.
double constant_Cns(int n, double s);
// Same constant by radial quadrature.
QuadResult constant_Cns_quadrature(int n, double s, double tol = 1e-13);

// int_{|z|<R} |z|^{-(n+2s-2)} dz = C1 R^{2-2s}, int_{|z|>R} |z|^{-n-2s} dz = C2 R^{-2s}.
double kernel_mass_inner(int n, double s);
double kernel_mass_outer(int n, double s);

struct DimensionReduction {
    double lhs = 0.0;  // I_n[v(e . )](x)
    double rhs = 0.0;  // |e|^{2s} C_{n,s} I_1[v](e . x)
    double residual = 0.0;
    double error = 0.0;  // combined quadrature error estimate
};

DimensionReduction check_dimension_reduction(const Field1& v, const Point& e, const Point& x, int n, double s,
                                             const QuadratureSpec& quad,
                                             std::optional<FarLimits> limits = std::nullopt);

}  // namespace fracmc
