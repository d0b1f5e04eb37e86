#include "fracmc/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fracmc/errors.hpp"

namespace fracmc {

namespace {

// Kernel measure of the part of the ray r -> x + r w (r > 0) where the
// increment f(r) = d(x + r w) - d(x) has the given strict sign.
double ray_measure(const IncrementMap& D, const Point& w, int n, double s, bool want_positive, double r_pred) {
    auto f = [&](double r) {
        Point z{0.0, 0.0, 0.0};
        for (int i = 0; i < n; ++i) z[i] = r * w[i];
        return D(z);
    };
    auto bad = [&](double r) {
        const double v = f(r);
        return want_positive ? v > 0.0 : v < 0.0;
    };
    std::vector<double> grid;
    double lo = 1e-9, hi = 1e9;
    if (std::isfinite(r_pred) && r_pred > 0.0) {
        lo = std::min(lo, 0.25 * r_pred);
        grid.push_back(0.5 * r_pred);
        grid.push_back(r_pred);
        grid.push_back(2.0 * r_pred);
    }
    for (double r = lo; r <= hi; r *= 1.1) grid.push_back(r);
    std::sort(grid.begin(), grid.end());

    const double two_s = 2.0 * s;
    auto root = [&](double a, double b) {
        // a is outside the set, b inside (or the reverse); bisection on the state.
        const bool sa = bad(a);
        for (int k = 0; k < 200 && b - a > 4e-16 * b; ++k) {
            const double m = 0.5 * (a + b);
            (bad(m) == sa ? a : b) = m;
        }
        return 0.5 * (a + b);
    };
    CompensatedSum acc;
    bool state = bad(grid.front());
    double start = grid.front();
    for (size_t k = 1; k < grid.size(); ++k) {
        const bool cur = bad(grid[k]);
        if (cur == state) continue;
        const double r = root(grid[k - 1], grid[k]);
        if (cur)
            start = r;
        else
            acc.add((std::pow(start, -two_s) - std::pow(r, -two_s)) / two_s);
        state = cur;
    }
    if (state) acc.add(std::pow(start, -two_s) / two_s);
    return acc.value();
}

}  // namespace

FractionalCurvature fractional_curvature(const Surface& surface, const Point& x, double s,
                                         const QuadratureSpec& quad) {
    if (!(s > 0.0 && s < 0.5))
        throw Error(ErrorKind::invalid_regime, "fractional curvature is finite only for s in (0, 1/2)");
    if (!surface.in_neighborhood(x, 1.0))
        throw Error(ErrorKind::out_of_neighborhood, "point lies outside the tubular neighborhood |d| < rho");
    quad.validate();
    const int n = surface.dim();
    const IncrementMap D(surface, x, 1.0);
    const Point g = D.grad();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    if (surface.kind() != SurfaceKind::hyperplane) H = surface.hessian(x);

    auto measure = [&](bool plus) {
        Point pole{0.0, 0.0, 0.0};
        for (int i = 0; i < n; ++i) pole[i] = plus ? -g[i] : g[i];
        SphereOptions so = quad.sphere(n, pole);
        so.hemisphere = true;
        // Ray values blow up like |grad d . w|^{-2s} at the tangent directions.
        so.grading = std::ceil(2.0 / (1.0 - 2.0 * s));
        so.abs_tol = 0.5 * quad.tolerance;
        return sphere_integral(
            [&](const Point& w) {
                double gw = 0.0, q = 0.0;
                for (int i = 0; i < n; ++i) {
                    gw += g[i] * w[i];
                    for (int j = 0; j < n; ++j) q += w[i] * H(i, j) * w[j];
                }
                const double pred = q != 0.0 ? -2.0 * gw / q : -1.0;
                return Estimate{ray_measure(D, w, n, s, plus, pred), 0.0};
            },
            so);
    };
    const QuadResult kp = measure(true);
    const QuadResult km = measure(false);
    FractionalCurvature out;
    out.kappa_plus = kp.value;
    out.kappa_minus = km.value;
    out.kappa = kp.value - km.value;
    out.error = kp.error + km.error;
    return out;
}

namespace {

void check_c2_args(int n, double s) {
    if (n < 2 || n > 3) throw Error(ErrorKind::invalid_parameter, "c2 needs n in {2, 3}");
    if (!(s > 0.5 && s < 1.0)) throw Error(ErrorKind::invalid_regime, "c2 is defined only for s in (1/2, 1)");
}

QuadResult half_line(const ScalarFn& f, double knee, double p, double tol) {
    AdaptiveOptions ao;
    ao.abs_tol = tol;
    ao.rel_tol = tol;
    std::vector<double> br{0.0, 0.5, 1.0};
    if (knee > 1.0) br.push_back(knee);
    br.push_back(std::max(4.0, 2.0 * knee));
    const QuadResult a = integrate(f, br, ao);
    const QuadResult b = integrate_power_tail(f, br.back(), p, ao);
    return {a.value + b.value, a.error + b.error, a.evaluations + b.evaluations, a.converged && b.converged};
}

}  // namespace

double c2_integrated_integral(int n, double s) {
    check_c2_args(n, s);
    const double e = 0.5 * (n + 2.0 * s + 2.0);
    return half_line(
               [&](double q) {
                   return std::pow(q, n - 2) * ((n - 1.0) - q * q) * std::pow(1.0 + q * q, -e);
               },
               std::sqrt(n - 1.0), 2.0 + 2.0 * s, 1e-14)
        .value;
}

C2Value constant_c2(int n, double s, const QuadratureSpec& quad) {
    check_c2_args(n, s);
    (void)quad;
    const double ns = n + 2.0 * s;
    const QuadResult a = half_line(
        [&](double q) {
            const double t = 1.0 + q * q;
            return ((ns + 2.0) * std::pow(t, -0.5 * (ns + 4.0)) - std::pow(t, -0.5 * (ns + 2.0))) * std::pow(q, n);
        },
        std::sqrt(n - 1.0), 2.0 + 2.0 * s, 1e-14);
    const double e = 0.5 * (ns + 2.0);
    const QuadResult b = half_line(
        [&](double q) { return std::pow(q, n - 2) * ((n - 1.0) - q * q) * std::pow(1.0 + q * q, -e); },
        std::sqrt(n - 1.0), 2.0 + 2.0 * s, 1e-14);
    auto beta = [](double x, double y) { return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y)); };
    C2Value out;
    out.value = ns * a.value;
    out.integrated = ns * b.value;
    out.closed = 0.5 * ns * ((n - 1.0) * beta(0.5 * (n - 1.0), s + 1.5) - beta(0.5 * (n + 1.0), s + 0.5));
    out.error = ns * (a.error + b.error);
    if (!(std::abs(out.value - out.integrated) <= 1e-8))
        throw Error(ErrorKind::cross_form_mismatch, "c2 quadrature forms disagree beyond 1e-8");
    return out;
}

CStar constant_cstar(int n, const PhaseTransition& pt, const QuadratureSpec& quad) {
    const double s = pt.s();
    const C2Value c2 = constant_c2(n, s, quad);
    const QuadResult c1 = energy_constant_c1(pt, quad);
    const QuadResult dbl = energy_double_integral(pt, quad);
    CStar out;
    out.c1 = c1.value;
    out.c2 = c2.value;
    out.product = c1.value * c2.value;
    out.direct = 0.5 * (n + 2.0 * s) * c2_integrated_integral(n, s) * dbl.value;
    out.error = c1.error * std::abs(c2.value) + std::abs(c1.value) * c2.error;
    return out;
}

LimitTarget limit_target(const Surface& surface, const Point& x, double s, double c_star,
                           const QuadratureSpec& quad) {
    if (!surface.in_neighborhood(x, 1.0))
        throw Error(ErrorKind::out_of_neighborhood, "point lies outside the tubular neighborhood |d| < rho");
    LimitTarget t;
    t.s = s;
    t.regime = regime_of(s);
    const int n = surface.dim();
    if (n == 1) return t;
    const DifferentialData dd = differential_data(surface, x);
    t.laplacian = dd.laplacian;
    t.sphere_factor = sphere_area(n - 2) / (n - 1.0);
    switch (t.regime) {
        case Regime::subcritical:
            t.kappa = fractional_curvature(surface, x, s, quad);
            t.value = t.kappa.kappa;
            break;
        case Regime::critical:
            t.value = 0.5 * t.sphere_factor * t.laplacian;
            break;
        case Regime::supercritical:
            if (!(c_star > 0.0)) throw Error(ErrorKind::invalid_parameter, "c_star must be positive");
            t.c_star = c_star;
            t.value = 0.5 * c_star * t.sphere_factor * t.laplacian;
            break;
    }
    return t;
}

}  // namespace fracmc
