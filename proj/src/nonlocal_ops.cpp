#include "fracmc/nonlocal_ops.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fracmc/errors.hpp"
#include "fracmc/geometry.hpp"

namespace fracmc {

namespace {

void check_order(double s) {
    if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::invalid_parameter, "order s must lie in (0, 1)");
}

}  // namespace

double sample_noise(double a, double b, double c) {
    return 2.0 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b) + 2.0 * std::abs(c));
}

QuadResult frac_lap_1d(const Field1& u, double s, double x, const QuadratureSpec& quad,
                       std::optional<FarLimits> limits) {
    check_order(s);
    const double u0 = u(x);
    RadialOptions ro = quad.radial(quad.tolerance);
    ro.rel_tol = quad.tolerance;
    ro.exec = quad.exec;
    if (limits) ro.far_limit = limits->left + limits->right - 2.0 * u0;
    const double d = quad.inner_cutoff;
    ro.noise = sample_noise(u(x + d), u(x - d), u0);
    return radial_integral([&](double y) { return u(x + y) + u(x - y) - 2.0 * u0; }, s, ro);
}

QuadResult frac_lap_nd(const FieldN& u, double s, const Point& x, int n, const QuadratureSpec& quad,
                       const NdOptions& opt) {
    check_order(s);
    if (n < 1 || n > 3) throw Error(ErrorKind::invalid_parameter, "dimension must be 1, 2 or 3");
    Point pole{0.0, 0.0, 0.0};
    pole[static_cast<size_t>(n - 1)] = 1.0;
    if (opt.pole) {
        const double len = norm(*opt.pole, n);
        if (len > 0.0)
            for (int i = 0; i < n; ++i) pole[i] = (*opt.pole)[i] / len;
    }
    const double u0 = u(x);
    SphereOptions so = quad.sphere(n, pole);
    so.hemisphere = true;
    const double area = sphere_area(n - 1);
    RadialOptions ro = quad.radial(0.1 * quad.tolerance / area);
    return sphere_integral(
        [&](const Point& w) {
            RadialOptions r = ro;
            if (opt.far_limit) {
                const Point mw{-w[0], -w[1], -w[2]};
                r.far_limit = opt.far_limit(w) + opt.far_limit(mw) - 2.0 * u0;
            }
            Point a = x, b = x;
            for (int i = 0; i < n; ++i) {
                a[i] += quad.inner_cutoff * w[i];
                b[i] -= quad.inner_cutoff * w[i];
            }
            r.noise = sample_noise(u(a), u(b), u0);
            const QuadResult q = radial_integral(
                [&](double rr) {
                    Point a = x, b = x;
                    for (int i = 0; i < n; ++i) {
                        a[i] += rr * w[i];
                        b[i] -= rr * w[i];
                    }
                    return u(a) + u(b) - 2.0 * u0;
                },
                s, r);
            return Estimate{q.value, q.error};
        },
        so);
}

double constant_Cns(int n, double s) {
    if (n < 2) throw Error(ErrorKind::invalid_parameter, "C_{n,s} needs n >= 2");
    check_order(s);
    return std::pow(std::numbers::pi, 0.5 * (n - 1)) * std::tgamma(s + 0.5) / std::tgamma(0.5 * (n + 2 * s));
}

QuadResult constant_Cns_quadrature(int n, double s, double tol) {
    if (n < 2) throw Error(ErrorKind::invalid_parameter, "C_{n,s} needs n >= 2");
    check_order(s);
    const double p = 0.5 * (n + 2 * s);
    auto f = [&](double r) { return std::pow(r, n - 2) * std::pow(1.0 + r * r, -p); };
    AdaptiveOptions o;
    o.abs_tol = tol;
    o.rel_tol = tol;
    QuadResult inner = integrate(f, std::vector<double>{0.0, 0.5, 1.0}, o);
    QuadResult tail = integrate_power_tail(f, 1.0, 2.0 + 2.0 * s, o);
    const double area = sphere_area(n - 2);
    QuadResult out;
    out.value = area * (inner.value + tail.value);
    out.error = area * (inner.error + tail.error);
    out.evaluations = inner.evaluations + tail.evaluations;
    out.converged = inner.converged && tail.converged;
    return out;
}

double kernel_mass_inner(int n, double s) { return sphere_area(n - 1) / (2.0 - 2.0 * s); }
double kernel_mass_outer(int n, double s) { return sphere_area(n - 1) / (2.0 * s); }

DimensionReduction check_dimension_reduction(const Field1& v, const Point& e, const Point& x, int n, double s,
                                             const QuadratureSpec& quad, std::optional<FarLimits> limits) {
    DimensionReduction out;
    const double len = norm(e, n);
    if (len == 0.0) return out;
    NdOptions nd;
    nd.pole = e;
    if (limits) {
        const double center = v(dot(e, x, n));
        nd.far_limit = [&, center](const Point& w) {
            const double c = dot(e, w, n);
            return c > 0.0 ? limits->right : (c < 0.0 ? limits->left : center);
        };
    }
    const QuadResult lhs =
        frac_lap_nd([&](const Point& y) { return v(dot(e, y, n)); }, s, x, n, quad, nd);
    const QuadResult one = frac_lap_1d(v, s, dot(e, x, n), quad, limits);
    const double factor = std::pow(len, 2.0 * s) * (n >= 2 ? constant_Cns(n, s) : 1.0);
    out.lhs = lhs.value;
    out.rhs = factor * one.value;
    out.residual = std::abs(out.lhs - out.rhs);
    out.error = lhs.error + factor * one.error;
    return out;
}

}  // namespace fracmc
