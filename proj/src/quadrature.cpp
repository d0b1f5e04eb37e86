#include "fracmc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>

namespace fracmc {

namespace {

// 15-point Kronrod nodes (descending, center last) and weights, 7-point Gauss
// weights for the odd Kronrod nodes.
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr int kNodes = 15;

struct Panel {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;
    double inner = 0.0;
};

double node_at(double a, double b, int k) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    if (k == 0) return c;
    const int j = (k - 1) / 2;
    return (k % 2 == 1) ? c - h * xgk[j] : c + h * xgk[j];
}

void finish_panel(Panel& p, const Estimate* f) {
    const double h = 0.5 * (p.b - p.a);
    const double fc = f[0].value;
    double resk = fc * wgk[7];
    double resg = fc * wg[3];
    double resabs = std::abs(resk);
    double inner = f[0].error * wgk[7];
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        f1[j] = f[1 + 2 * j].value;
        f2[j] = f[2 + 2 * j].value;
        resk += wgk[j] * (f1[j] + f2[j]);
        resabs += wgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        inner += wgk[j] * (f[1 + 2 * j].error + f[2 + 2 * j].error);
        if (j % 2 == 1) resg += wg[j / 2] * (f1[j] + f2[j]);
    }
    const double reskh = resk * 0.5;
    double resasc = wgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
    double err = std::abs((resk - resg) * h);
    resasc *= std::abs(h);
    resabs *= std::abs(h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double epmach = 2.220446049250313e-16;
    constexpr double uflow = 2.2250738585072014e-308;
    if (resabs > uflow / (50.0 * epmach)) err = std::max(epmach * 50.0 * resabs, err);
    p.value = resk * h;
    p.error = err;
    p.inner = std::abs(h) * inner;
}

void evaluate_panels(const SampleFn& f, std::vector<Panel>& panels, Exec exec, long& evals) {
    const long n = static_cast<long>(panels.size()) * kNodes;
    std::vector<Estimate> values(static_cast<size_t>(n));
    if (exec == Exec::parallel && n > kNodes) {
        std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < n; ++i) {
            const Panel& p = panels[static_cast<size_t>(i / kNodes)];
            try {
                values[static_cast<size_t>(i)] = f(node_at(p.a, p.b, static_cast<int>(i % kNodes)));
            } catch (...) {
                errors[static_cast<size_t>(i)] = std::current_exception();
            }
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (long i = 0; i < n; ++i) {
            const Panel& p = panels[static_cast<size_t>(i / kNodes)];
            values[static_cast<size_t>(i)] = f(node_at(p.a, p.b, static_cast<int>(i % kNodes)));
        }
    }
    for (size_t k = 0; k < panels.size(); ++k) finish_panel(panels[k], &values[k * kNodes]);
    evals += n;
}

}  // namespace

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

QuadResult integrate_nested(const SampleFn& f, std::vector<double> breaks, const AdaptiveOptions& opt) {
    if (breaks.size() < 2) throw std::invalid_argument("integrate: need at least two breakpoints");
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    QuadResult out;
    if (breaks.size() < 2) return out;

    std::vector<Panel> panels;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) panels.push_back({breaks[i], breaks[i + 1]});
    evaluate_panels(f, panels, opt.exec, out.evaluations);

    for (;;) {
        CompensatedSum total;
        double gk_err = 0.0, inner_err = 0.0;
        for (const auto& p : panels) {
            total.add(p.value);
            gk_err += p.error;
            inner_err += p.inner;
        }
        out.value = total.value();
        out.error = gk_err + inner_err;
        const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(out.value));
        if (gk_err <= tol) {
            out.converged = true;
            return out;
        }
        if (static_cast<int>(panels.size()) >= opt.max_panels) {
            out.converged = false;
            return out;
        }
        const double threshold = tol / static_cast<double>(panels.size());
        std::vector<char> split(panels.size(), 0);
        int budget = opt.max_panels - static_cast<int>(panels.size());
        size_t worst = 0;
        for (size_t i = 0; i < panels.size(); ++i)
            if (panels[i].error > panels[worst].error) worst = i;
        auto splittable = [](const Panel& p) {
            const double scale = std::max(std::abs(p.a), std::abs(p.b));
            return (p.b - p.a) > 1e-14 * std::max(scale, 1e-300);
        };
        int chosen = 0;
        if (splittable(panels[worst])) {
            split[worst] = 1;
            ++chosen;
        }
        for (size_t i = 0; i < panels.size() && chosen < budget; ++i) {
            if (!split[i] && panels[i].error > threshold && splittable(panels[i])) {
                split[i] = 1;
                ++chosen;
            }
        }
        if (chosen == 0) {
            out.converged = false;
            return out;
        }
        std::vector<Panel> fresh;
        for (size_t i = 0; i < panels.size(); ++i) {
            if (!split[i]) continue;
            const double m = 0.5 * (panels[i].a + panels[i].b);
            fresh.push_back({panels[i].a, m});
            fresh.push_back({m, panels[i].b});
        }
        evaluate_panels(f, fresh, opt.exec, out.evaluations);
        std::vector<Panel> next;
        next.reserve(panels.size() + fresh.size() / 2);
        size_t k = 0;
        for (size_t i = 0; i < panels.size(); ++i) {
            if (split[i]) {
                next.push_back(fresh[k++]);
                next.push_back(fresh[k++]);
            } else {
                next.push_back(panels[i]);
            }
        }
        panels = std::move(next);
    }
}

QuadResult integrate(const ScalarFn& f, std::vector<double> breaks, const AdaptiveOptions& opt) {
    return integrate_nested([&f](double x) { return Estimate{f(x), 0.0}; }, std::move(breaks), opt);
}

QuadResult integrate(const ScalarFn& f, double a, double b, const AdaptiveOptions& opt) {
    if (a == b) return {};
    if (a > b) {
        QuadResult r = integrate(f, std::vector<double>{b, a}, opt);
        r.value = -r.value;
        return r;
    }
    return integrate(f, std::vector<double>{a, b}, opt);
}

QuadResult integrate_power_tail_nested(const SampleFn& f, double M, double p, const AdaptiveOptions& opt) {
    if (!(p > 1.0)) throw std::invalid_argument("integrate_power_tail: exponent must exceed 1");
    const double q = 1.0 / (p - 1.0);
    const double scale = M * q;
    auto g = [&](double u) {
        const double x = M * std::pow(u, -q);
        const double jac = scale * std::pow(u, -q - 1.0);
        const Estimate e = f(x);
        return Estimate{e.value * jac, e.error * jac};
    };
    return integrate_nested(g, {0.0, 0.125, 0.25, 0.5, 1.0}, opt);
}

QuadResult integrate_power_tail(const ScalarFn& f, double M, double p, const AdaptiveOptions& opt) {
    return integrate_power_tail_nested([&f](double x) { return Estimate{f(x), 0.0}; }, M, p, opt);
}

QuadResult integrate_line_nested(const SampleFn& f, std::vector<double> breaks, double p_left,
                                 double p_right, const AdaptiveOptions& opt) {
    std::sort(breaks.begin(), breaks.end());
    const double a = breaks.front();
    const double b = breaks.back();
    AdaptiveOptions part = opt;
    part.abs_tol = opt.abs_tol / 3.0;
    QuadResult mid = integrate_nested(f, breaks, part);
    QuadResult right = integrate_power_tail_nested(f, b, p_right, part);
    QuadResult left = integrate_power_tail_nested(
        [&f](double x) { return f(-x); }, -a, p_left, part);
    QuadResult out;
    CompensatedSum sum;
    sum.add(left.value);
    sum.add(mid.value);
    sum.add(right.value);
    out.value = sum.value();
    out.error = left.error + mid.error + right.error;
    out.evaluations = left.evaluations + mid.evaluations + right.evaluations;
    out.converged = left.converged && mid.converged && right.converged;
    return out;
}

QuadResult integrate_line(const ScalarFn& f, std::vector<double> breaks, double p_left, double p_right,
                          const AdaptiveOptions& opt) {
    return integrate_line_nested([&f](double x) { return Estimate{f(x), 0.0}; }, std::move(breaks),
                                 p_left, p_right, opt);
}

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    GaussRule rule;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<size_t>(i)] = -x;
        rule.nodes[static_cast<size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<size_t>(i)] = w;
        rule.weights[static_cast<size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<size_t>(n / 2)] = 0.0;
    return rule;
}

QuadResult radial_integral(const ScalarFn& f, double s, const RadialOptions& opt) {
    const double delta = opt.inner_cutoff;
    const double Z = opt.outer_radius;
    const double two_s = 2.0 * s;
    QuadResult out;

    // r < delta: f ~ a r^2 + b r^4 fitted at delta and delta/2. The quartic
    // term itself serves as the error bound.
    const double f1 = f(delta);
    const double f2 = f(0.5 * delta);
    const double A = (16.0 * f2 - f1) / 3.0;
    const double B = f1 - A;
    const double scale = std::pow(delta, -two_s);
    const double quartic = B * scale / (4.0 - two_s);
    const double near = A * scale / (2.0 - two_s) + quartic;
    const double near_err = std::abs(quartic) + 1e-15 * std::abs(near);
    out.evaluations += 2;

    AdaptiveOptions part;
    part.abs_tol = opt.abs_tol / 3.0;
    part.rel_tol = opt.rel_tol;
    part.exec = opt.exec;

    const double t0 = std::log(delta);
    const double t1 = std::log(Z);
    std::vector<double> breaks;
    const int panels = std::max(1, opt.panels);
    for (int i = 0; i <= panels; ++i) breaks.push_back(t0 + (t1 - t0) * i / panels);
    breaks.back() = t1;
    QuadResult mid = integrate(
        [&](double t) {
            const double r = std::exp(t);
            return f(r) * std::exp(-two_s * t);
        },
        breaks, part);

    QuadResult far;
    const double tail_scale = std::pow(Z, -two_s) / two_s;
    if (opt.far_limit) {
        const double fz = f(Z);
        far.value = *opt.far_limit * tail_scale;
        far.error = std::abs(fz - *opt.far_limit) * tail_scale;
        far.evaluations = 1;
    } else {
        const double inv = 1.0 / two_s;
        far = integrate([&](double u) { return f(Z * std::pow(u, -inv)); },
                        std::vector<double>{0.0, 0.125, 0.25, 0.5, 1.0}, part);
        far.value *= tail_scale;
        far.error *= tail_scale;
    }

    CompensatedSum sum;
    sum.add(near);
    sum.add(mid.value);
    sum.add(far.value);
    out.value = sum.value();
    out.error = near_err + mid.error + far.error + opt.noise * scale * (1.0 / two_s + 6.0);
    out.evaluations += mid.evaluations + far.evaluations;
    out.converged = mid.converged && far.converged;
    return out;
}

double sphere_area(int k) {
    const double m = 0.5 * (k + 1);
    return 2.0 * std::pow(std::numbers::pi, m) / std::tgamma(m);
}

std::array<Point, 2> orthonormal_complement(const Point& w, int n) {
    if (n <= 1) return {Point{0, 0, 0}, Point{0, 0, 0}};
    if (n == 2) return {Point{-w[1], w[0], 0.0}, Point{0, 0, 0}};
    int axis = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(w[i]) < std::abs(w[axis])) axis = i;
    Point a{0, 0, 0};
    a[axis] = 1.0;
    const double dot = a[0] * w[0] + a[1] * w[1] + a[2] * w[2];
    Point u{a[0] - dot * w[0], a[1] - dot * w[1], a[2] - dot * w[2]};
    const double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (auto& c : u) c /= nu;
    Point v{w[1] * u[2] - w[2] * u[1], w[2] * u[0] - w[0] * u[2], w[0] * u[1] - w[1] * u[0]};
    return {u, v};
}

namespace {

Point direction(const Point& e, const Point& u, double c, double sn) {
    return {c * e[0] + sn * u[0], c * e[1] + sn * u[1], c * e[2] + sn * u[2]};
}

Estimate azimuth_average(const DirectionFn& h, const Point& e, const std::array<Point, 2>& basis,
                         double ct, double st, const SphereOptions& opt) {
    auto ray = [&](double phi) {
        const double cp = std::cos(phi), sp = std::sin(phi);
        Point u{cp * basis[0][0] + sp * basis[1][0], cp * basis[0][1] + sp * basis[1][1],
                cp * basis[0][2] + sp * basis[1][2]};
        return h(direction(e, u, ct, st));
    };
    const double two_pi = 2.0 * std::numbers::pi;
    int k = std::max(4, opt.angular_nodes);
    CompensatedSum sum;
    double inner = 0.0;
    for (int j = 0; j < k; ++j) {
        const Estimate r = ray(two_pi * j / k);
        sum.add(r.value);
        inner += r.error;
    }
    double prev = two_pi * sum.value() / k;
    const double abs_tol = 0.1 * opt.abs_tol;
    for (;;) {
        for (int j = 0; j < k; ++j) {
            const Estimate r = ray(two_pi * (j + 0.5) / k);
            sum.add(r.value);
            inner += r.error;
        }
        k *= 2;
        const double cur = two_pi * sum.value() / k;
        const double diff = std::abs(cur - prev);
        if (diff <= std::max(abs_tol, 0.1 * opt.rel_tol * std::abs(cur)) || k >= opt.max_azimuth)
            return {cur, diff + two_pi * inner / k};
        prev = cur;
    }
}

}  // namespace

QuadResult sphere_integral(const DirectionFn& h, const SphereOptions& opt) {
    const double pi = std::numbers::pi;
    const Point& e = opt.pole;
    QuadResult out;
    if (opt.n == 1) {
        const Estimate a = h(e);
        out.value = a.value;
        out.error = a.error;
        out.evaluations = 1;
        if (!opt.hemisphere) {
            const Estimate b = h(Point{-e[0], -e[1], -e[2]});
            CompensatedSum s;
            s.add(a.value);
            s.add(b.value);
            out.value = s.value();
            out.error += b.error;
            out.evaluations = 2;
        }
        return out;
    }
    if (opt.n != 2 && opt.n != 3) throw std::invalid_argument("sphere_integral: n must be 1, 2 or 3");

    const auto basis = orthonormal_complement(e, opt.n);
    // Polar angle given by cos and sin so that directions near the equator
    // keep their full relative precision.
    auto polar = [&](double c, double sn) -> Estimate {
        if (opt.n == 2) {
            const Estimate a = h(direction(e, basis[0], c, sn));
            const Estimate b = h(direction(e, basis[0], c, -sn));
            return {a.value + b.value, a.error + b.error};
        }
        const Estimate a = azimuth_average(h, e, basis, c, sn, opt);
        return {sn * a.value, sn * a.error};
    };

    const double m = std::max(1.0, opt.grading);
    const int per_half = std::max(1, opt.angular_nodes / 8);
    AdaptiveOptions ao;
    ao.abs_tol = opt.abs_tol / (opt.hemisphere ? 1.0 : 2.0);
    ao.rel_tol = opt.rel_tol;
    ao.exec = opt.exec;
    std::vector<double> breaks;
    for (int i = 0; i <= per_half; ++i) breaks.push_back(static_cast<double>(i) / per_half);

    // Upper half [0, pi/2], graded toward pi/2.
    QuadResult upper = integrate_nested(
        [&](double tau) {
            const double w = 1.0 - tau;
            const double gap = 0.5 * pi * std::pow(w, m);  // pi/2 - theta
            const double jac = 0.5 * pi * m * std::pow(w, m - 1.0);
            const Estimate v = polar(std::sin(gap), std::cos(gap));
            return Estimate{v.value * jac, v.error * jac};
        },
        breaks, ao);
    out.value = upper.value;
    out.error = upper.error;
    out.evaluations = upper.evaluations;
    out.converged = upper.converged;
    if (opt.hemisphere) return out;

    QuadResult lower = integrate_nested(
        [&](double tau) {
            const double gap = 0.5 * pi * std::pow(tau, m);  // theta - pi/2
            const double jac = 0.5 * pi * m * std::pow(tau, m - 1.0);
            const Estimate v = polar(-std::sin(gap), std::cos(gap));
            return Estimate{v.value * jac, v.error * jac};
        },
        breaks, ao);
    CompensatedSum s;
    s.add(upper.value);
    s.add(lower.value);
    out.value = s.value();
    out.error += lower.error;
    out.evaluations += lower.evaluations;
    out.converged = out.converged && lower.converged;
    return out;
}

}  // namespace fracmc

#include "fracmc/errors.hpp"

namespace fracmc {

void QuadratureSpec::validate() const {
    if (!(inner_cutoff > 0.0 && inner_cutoff < 1.0))
        throw Error(ErrorKind::validation, "quadrature: inner_cutoff must lie in (0, 1)");
    if (!(outer_radius > 1.0)) throw Error(ErrorKind::validation, "quadrature: outer_radius must exceed 1");
    if (radial_nodes < 16 || angular_nodes < 16)
        throw Error(ErrorKind::validation, "quadrature: node counts must be at least 16");
    if (!(tolerance > 0.0)) throw Error(ErrorKind::validation, "quadrature: tolerance must be positive");
}

QuadratureSpec QuadratureSpec::refined() const {
    QuadratureSpec q = *this;
    q.radial_nodes *= 2;
    q.angular_nodes *= 2;
    q.tolerance *= 0.25;
    return q;
}

RadialOptions QuadratureSpec::radial(double abs_tol) const {
    RadialOptions r;
    r.inner_cutoff = inner_cutoff;
    r.outer_radius = outer_radius;
    r.panels = radial_nodes;
    r.abs_tol = abs_tol;
    r.rel_tol = 0.1 * tolerance;
    return r;
}

SphereOptions QuadratureSpec::sphere(int n, const Point& pole) const {
    SphereOptions o;
    o.n = n;
    o.pole = pole;
    o.angular_nodes = angular_nodes;
    o.abs_tol = tolerance;
    o.rel_tol = tolerance;
    o.exec = exec;
    return o;
}

}  // namespace fracmc
