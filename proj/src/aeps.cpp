#include "fracmc/aeps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracmc/errors.hpp"
#include "fracmc/nonlocal_ops.hpp"

namespace fracmc {

namespace {

void check_order(double s) {
    if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::invalid_parameter, "order s must lie in (0, 1)");
}

void check_point(const Surface& surface, const Point& x, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::invalid_parameter, "eps must lie in (0, 1)");
    if (!(eps < surface.rho())) throw Error(ErrorKind::invalid_parameter, "eps must be smaller than rho");
    if (!surface.in_neighborhood(x, 1.0))
        throw Error(ErrorKind::out_of_neighborhood, "point lies outside the tubular neighborhood |d| < rho");
}

double cn(int n, double s) { return n >= 2 ? constant_Cns(n, s) : 1.0; }

}  // namespace

Regime regime_of(double s) {
    check_order(s);
    if (s < 0.5) return Regime::subcritical;
    if (s == 0.5) return Regime::critical;
    return Regime::supercritical;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::subcritical:
            return "subcritical";
        case Regime::critical:
            return "critical";
        default:
            return "supercritical";
    }
}

double eta_eps(double s, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::invalid_parameter, "eps must lie in (0, 1)");
    switch (regime_of(s)) {
        case Regime::subcritical:
            return std::pow(eps, 2.0 * s);
        case Regime::critical:
            return eps * std::abs(std::log(eps));
        default:
            return eps;
    }
}

QuadResult mismatch_integral(const Surface& surface, const Point& x, double eps, double s,
                             const std::function<double(double)>& F, const QuadratureSpec& quad) {
    check_order(s);
    check_point(surface, x, eps);
    quad.validate();
    const IncrementMap D(surface, x, eps);
    const Point g = D.grad();
    const int n = surface.dim();
    SphereOptions so = quad.sphere(n, g);
    // The ray integral has an |grad d . w|^{2s} cusp at the tangent directions.
    so.grading = 3.0;
    const RadialOptions ro = quad.radial(0.1 * quad.tolerance / sphere_area(n - 1));
    return sphere_integral(
        [&](const Point& w) {
            RadialOptions r = ro;
            auto diff = [&](double rr) {
                Point z{0.0, 0.0, 0.0};
                for (int i = 0; i < n; ++i) z[i] = rr * w[i];
                return F(D(z)) - F(dot(g, z, n));
            };
            Point z{0.0, 0.0, 0.0};
            for (int i = 0; i < n; ++i) z[i] = quad.inner_cutoff * w[i];
            r.noise = 2.0 * std::numeric_limits<double>::epsilon() *
                      (std::abs(F(D(z))) + std::abs(F(dot(g, z, n))));
            const QuadResult q = radial_integral(diff, s, r);
            return Estimate{q.value, q.error};
        },
        so);
}

QuadResult a_eps_direct(const Surface& surface, const PhaseTransition& pt, double eps, double xi, const Point& x,
                        const QuadratureSpec& quad) {
    return mismatch_integral(surface, x, eps, pt.s(), [&](double a) { return pt.phi(xi + a); }, quad);
}

LaplacianSplit a_eps_via_laplacians(const Surface& surface, const PhaseTransition& pt, double eps, const Point& x,
                                    const QuadratureSpec& quad) {
    const double s = pt.s();
    check_order(s);
    check_point(surface, x, eps);
    quad.validate();
    const IncrementMap D(surface, x, eps);
    const double xi0 = D.base() / eps;
    const int n = surface.dim();
    NdOptions nd;
    nd.pole = D.grad();
    LaplacianSplit out;
    // eps^{2s} I_n[phi(d / eps)](x) = I_n[z -> phi(d(x + eps z) / eps)](0).
    out.nd = frac_lap_nd([&](const Point& z) { return pt.phi(xi0 + D(z)); }, s, Point{0.0, 0.0, 0.0}, n, quad, nd);
    const double c = cn(n, s);
    const QuadResult one = frac_lap_1d([&](double t) { return pt.phi(t); }, s, xi0, quad, FarLimits{0.0, 1.0});
    out.one = {c * one.value, c * one.error, one.evaluations, one.converged};
    out.value = out.nd.value - out.one.value;
    out.error = out.nd.error + out.one.error;
    return out;
}

AbarSample abar_eps(const Surface& surface, const ProfileAverage& psi, double eps, const Point& x,
                    const QuadratureSpec& quad) {
    const double s = psi.s();
    const double eta = eta_eps(s, eps);
    const QuadResult q = mismatch_integral(surface, x, eps, s, [&](double a) { return psi.psi(a); }, quad);
    AbarSample out;
    out.x = x;
    out.eps = eps;
    out.value = q.value / eta;
    out.error = q.error / eta;
    out.target = std::numeric_limits<double>::quiet_NaN();
    return out;
}

AbarSample abar_eps_xi(const Surface& surface, const PhaseTransition& pt, double eps, const Point& x,
                       const QuadratureSpec& quad, double xi_max) {
    if (!(xi_max > 1.0)) throw Error(ErrorKind::invalid_parameter, "xi_max must exceed 1");
    const double eta = eta_eps(pt.s(), eps);
    QuadratureSpec inner = quad;
    inner.exec = Exec::serial;
    double sup_a = 0.0;
    AdaptiveOptions ao;
    ao.abs_tol = quad.tolerance;
    ao.rel_tol = quad.tolerance;
    const QuadResult q = integrate_nested(
        [&](double xi) {
            const QuadResult a = a_eps_direct(surface, pt, eps, xi, x, inner);
            sup_a = std::max(sup_a, std::abs(a.value));
            const double w = pt.phi_prime(xi);
            return Estimate{a.value * w, a.error * w};
        },
        {-xi_max, -5.0, -1.0, 0.0, 1.0, 5.0, xi_max}, ao);
    const double tail_mass = pt.phi(-xi_max) + 1.0 - pt.phi(xi_max);
    AbarSample out;
    out.x = x;
    out.eps = eps;
    out.value = q.value / eta;
    out.error = (q.error + sup_a * tail_mass) / eta;
    out.target = std::numeric_limits<double>::quiet_NaN();
    return out;
}

ConvergenceReport convergence_study(const Surface& surface, const ProfileAverage& psi,
                                    const std::vector<double>& eps_list, const std::vector<Point>& points,
                                    const QuadratureSpec& quad, const TargetFn& target) {
    if (eps_list.empty()) throw Error(ErrorKind::validation, "eps list is empty");
    for (size_t k = 0; k < eps_list.size(); ++k) {
        if (!(eps_list[k] > 0.0 && eps_list[k] < surface.rho()))
            throw Error(ErrorKind::validation, "every eps must lie in (0, rho)");
        if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
            throw Error(ErrorKind::validation, "eps list must be strictly decreasing");
    }
    if (points.empty()) throw Error(ErrorKind::validation, "no sample points");
    for (const Point& x : points)
        if (!surface.in_neighborhood(x, 1.0))
            throw Error(ErrorKind::out_of_neighborhood, "sample point outside |d| < rho");
    quad.validate();

    ConvergenceReport rep;
    rep.surface = to_string(surface.kind());
    rep.s = psi.s();
    rep.n = surface.dim();
    rep.eps = eps_list;
    rep.points = points;
    const long ne = static_cast<long>(eps_list.size());
    const long cells = static_cast<long>(points.size()) * ne;
    rep.cells.resize(static_cast<size_t>(cells));
    std::vector<double> targets(points.size());
    for (size_t i = 0; i < points.size(); ++i) targets[i] = target(points[i]);

    QuadratureSpec inner = quad;
    inner.exec = Exec::serial;
    auto run = [&](long c) {
        ConvergenceCell& cell = rep.cells[static_cast<size_t>(c)];
        const size_t i = static_cast<size_t>(c / ne);
        const double eps = eps_list[static_cast<size_t>(c % ne)];
        cell.sample.x = points[i];
        cell.sample.eps = eps;
        cell.sample.target = targets[i];
        try {
            cell.sample = abar_eps(surface, psi, eps, points[i], inner);
            cell.sample.target = targets[i];
            cell.abs_err = std::abs(cell.sample.value - targets[i]);
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.message = e.what();
            cell.sample.value = std::numeric_limits<double>::quiet_NaN();
            cell.abs_err = std::numeric_limits<double>::quiet_NaN();
        }
    };
    if (quad.exec == Exec::serial) {
        for (long c = 0; c < cells; ++c) run(c);
    } else {
#pragma omp parallel for schedule(dynamic, 1)
        for (long c = 0; c < cells; ++c) run(c);
    }

    rep.uniform_err.assign(eps_list.size(), std::numeric_limits<double>::quiet_NaN());
    for (long c = 0; c < cells; ++c) {
        const ConvergenceCell& cell = rep.cells[static_cast<size_t>(c)];
        if (cell.failed) continue;
        double& u = rep.uniform_err[static_cast<size_t>(c % ne)];
        u = std::isnan(u) ? cell.abs_err : std::max(u, cell.abs_err);
    }
    return rep;
}

}  // namespace fracmc
