#include "fracmc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracmc/errors.hpp"

namespace fracmc {

namespace {

Error invalid(const std::string& what) { return Error(ErrorKind::invalid_parameter, what); }

Point normalized(const Point& v, int n, const char* what) {
    const double len = norm(v, n);
    if (!(len > 0.0) || !std::isfinite(len)) throw invalid(std::string(what) + " must be a nonzero vector");
    Point out{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) out[i] = v[i] / len;
    return out;
}

}  // namespace

double dot(const Point& a, const Point& b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double norm(const Point& a, int n) { return std::sqrt(dot(a, a, n)); }

SurfaceKind surface_kind_from_string(const std::string& name) {
    if (name == "sphere") return SurfaceKind::sphere;
    if (name == "hyperplane") return SurfaceKind::hyperplane;
    if (name == "cylinder") return SurfaceKind::cylinder;
    if (name == "graph") return SurfaceKind::graph;
    throw invalid("unknown surface kind '" + name + "'");
}

std::string to_string(SurfaceKind kind) {
    switch (kind) {
        case SurfaceKind::sphere: return "sphere";
        case SurfaceKind::hyperplane: return "hyperplane";
        case SurfaceKind::cylinder: return "cylinder";
        case SurfaceKind::graph: return "graph";
    }
    return "unknown";
}

GraphProfile graph_profile_from_string(const std::string& name) {
    if (name == "parabola") return GraphProfile::parabola;
    if (name == "cosine") return GraphProfile::cosine;
    throw invalid("unknown graph profile '" + name + "'");
}

std::string to_string(GraphProfile profile) {
    return profile == GraphProfile::parabola ? "parabola" : "cosine";
}

Surface::Surface(SurfaceKind kind, const SurfaceParams& p) : kind_(kind), p_(p) {
    if (p_.n < 1 || p_.n > 3) throw invalid("dimension must be 1, 2 or 3");
    for (int i = p_.n; i < 3; ++i) {
        p_.center[i] = 0.0;
        p_.normal[i] = 0.0;
    }
    if (!(p_.rho_cap > 0.0)) throw invalid("rho_cap must be positive");
    sign_ = p_.complement ? -1.0 : 1.0;
    switch (kind_) {
        case SurfaceKind::sphere:
            if (p_.n < 2) throw invalid("a 1-D sphere is not supported; use a hyperplane (half-line)");
            if (!(p_.radius > 0.0)) throw invalid("sphere radius must be positive");
            rho_ = 0.5 * p_.radius;
            break;
        case SurfaceKind::hyperplane:
            p_.normal = normalized(p_.normal, p_.n, "hyperplane normal");
            rho_ = p_.rho_cap;
            break;
        case SurfaceKind::cylinder:
            if (p_.n != 3) throw invalid("cylinders are defined in dimension 3 only");
            if (!(p_.radius > 0.0)) throw invalid("cylinder radius must be positive");
            p_.axis = normalized(p_.axis, 3, "cylinder axis");
            rho_ = 0.5 * p_.radius;
            break;
        case SurfaceKind::graph: {
            if (p_.n != 2) throw invalid("graph surfaces are defined in dimension 2 only");
            if (!std::isfinite(p_.amplitude)) throw invalid("graph amplitude must be finite");
            double kmax = std::abs(p_.amplitude);
            if (p_.profile == GraphProfile::cosine) {
                if (!(p_.wavenumber > 0.0)) throw invalid("graph wavenumber must be positive");
                kmax = std::abs(p_.amplitude) * p_.wavenumber * p_.wavenumber;
            }
            rho_ = kmax > 0.0 ? std::min(p_.rho_cap, 0.5 / kmax) : p_.rho_cap;
            break;
        }
    }
}

Surface make_surface(SurfaceKind kind, const SurfaceParams& params) { return Surface(kind, params); }

Surface Surface::complement() const {
    SurfaceParams q = p_;
    q.complement = !q.complement;
    return Surface(kind_, q);
}

double Surface::g(double t) const {
    if (p_.profile == GraphProfile::parabola) return 0.5 * p_.amplitude * t * t;
    return p_.amplitude * std::cos(p_.wavenumber * t);
}

double Surface::gp(double t) const {
    if (p_.profile == GraphProfile::parabola) return p_.amplitude * t;
    return -p_.amplitude * p_.wavenumber * std::sin(p_.wavenumber * t);
}

double Surface::gpp(double t) const {
    if (p_.profile == GraphProfile::parabola) return p_.amplitude;
    return -p_.amplitude * p_.wavenumber * p_.wavenumber * std::cos(p_.wavenumber * t);
}

// Parameter t of the closest curve point to x. The foot lies within the
// vertical distance of x1; scan that window, then safeguarded Newton on
// F(t) = (t - x1) + (g(t) - x2) g'(t).
double Surface::graph_foot(const Point& x) const {
    const double x1 = x[0], x2 = x[1];
    const double D = std::abs(x2 - g(x1));
    if (D == 0.0) return x1;
    auto q = [&](double t) {
        const double a = t - x1, b = g(t) - x2;
        return a * a + b * b;
    };
    auto F = [&](double t) { return (t - x1) + (g(t) - x2) * gp(t); };
    const int samples = static_cast<int>(std::clamp(std::ceil(4.0 * D / rho_), 8.0, 4000.0));
    const double step = 2.0 * D / samples;
    double best = x1, best_q = q(x1);
    for (int i = 0; i <= samples; ++i) {
        const double t = x1 - D + step * i;
        const double v = q(t);
        if (v < best_q) {
            best_q = v;
            best = t;
        }
    }
    double lo = best - step, hi = best + step;
    double flo = F(lo), fhi = F(hi);
    double t = best;
    if (flo > 0.0 || fhi < 0.0) {
        for (int it = 0; it < 60; ++it) {
            const double dF = 1.0 + gp(t) * gp(t) + (g(t) - x2) * gpp(t);
            if (dF <= 0.0) break;
            const double dt = F(t) / dF;
            t -= dt;
            if (std::abs(dt) < 1e-15 * (1.0 + std::abs(t))) break;
        }
        return q(t) <= best_q ? t : best;
    }
    for (int it = 0; it < 200; ++it) {
        const double f = F(t);
        if (f == 0.0) break;
        if (f < 0.0)
            lo = t;
        else
            hi = t;
        const double dF = 1.0 + gp(t) * gp(t) + (g(t) - x2) * gpp(t);
        double next = dF > 0.0 ? t - f / dF : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t)) || hi - lo <= 1e-15 * (1.0 + std::abs(t))) {
            t = next;
            break;
        }
        t = next;
    }
    return t;
}

double Surface::raw_distance(const Point& x) const {
    switch (kind_) {
        case SurfaceKind::sphere: {
            Point p{x[0] - p_.center[0], x[1] - p_.center[1], x[2] - p_.center[2]};
            return p_.radius - norm(p, p_.n);
        }
        case SurfaceKind::hyperplane:
            return dot(p_.normal, x, p_.n) - p_.offset;
        case SurfaceKind::cylinder: {
            Point p{x[0] - p_.center[0], x[1] - p_.center[1], x[2] - p_.center[2]};
            const double a = dot(p, p_.axis);
            Point q{p[0] - a * p_.axis[0], p[1] - a * p_.axis[1], p[2] - a * p_.axis[2]};
            return p_.radius - norm(q);
        }
        case SurfaceKind::graph: {
            const double t = graph_foot(x);
            const double a = x[0] - t, b = x[1] - g(t);
            const double dist = std::sqrt(a * a + b * b);
            return x[1] >= g(x[0]) ? dist : -dist;
        }
    }
    return 0.0;
}

double Surface::distance(const Point& x) const { return sign_ * raw_distance(x); }

Point Surface::gradient(const Point& x) const {
    Point out{0.0, 0.0, 0.0};
    switch (kind_) {
        case SurfaceKind::sphere: {
            Point p{x[0] - p_.center[0], x[1] - p_.center[1], x[2] - p_.center[2]};
            const double r = norm(p, p_.n);
            if (r == 0.0) throw Error(ErrorKind::out_of_neighborhood, "gradient undefined at sphere center");
            for (int i = 0; i < p_.n; ++i) out[i] = -sign_ * p[i] / r;
            break;
        }
        case SurfaceKind::hyperplane:
            for (int i = 0; i < p_.n; ++i) out[i] = sign_ * p_.normal[i];
            break;
        case SurfaceKind::cylinder: {
            Point p{x[0] - p_.center[0], x[1] - p_.center[1], x[2] - p_.center[2]};
            const double a = dot(p, p_.axis);
            Point q{p[0] - a * p_.axis[0], p[1] - a * p_.axis[1], p[2] - a * p_.axis[2]};
            const double r = norm(q);
            if (r == 0.0) throw Error(ErrorKind::out_of_neighborhood, "gradient undefined on cylinder axis");
            for (int i = 0; i < 3; ++i) out[i] = -sign_ * q[i] / r;
            break;
        }
        case SurfaceKind::graph: {
            const double t = graph_foot(x);
            const double slope = gp(t);
            const double len = std::sqrt(1.0 + slope * slope);
            out[0] = -sign_ * slope / len;
            out[1] = sign_ / len;
            break;
        }
    }
    return out;
}

Eigen::MatrixXd Surface::hessian(const Point& x) const {
    const int n = p_.n;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    switch (kind_) {
        case SurfaceKind::hyperplane:
            break;
        case SurfaceKind::sphere: {
            Eigen::VectorXd p(n);
            for (int i = 0; i < n; ++i) p[i] = x[i] - p_.center[i];
            const double r = p.norm();
            if (r == 0.0) throw Error(ErrorKind::out_of_neighborhood, "hessian undefined at sphere center");
            const Eigen::VectorXd u = p / r;
            H = -(Eigen::MatrixXd::Identity(n, n) - u * u.transpose()) / r;
            break;
        }
        case SurfaceKind::cylinder: {
            Eigen::Vector3d p(x[0] - p_.center[0], x[1] - p_.center[1], x[2] - p_.center[2]);
            Eigen::Vector3d a(p_.axis[0], p_.axis[1], p_.axis[2]);
            Eigen::Vector3d q = p - p.dot(a) * a;
            const double r = q.norm();
            if (r == 0.0) throw Error(ErrorKind::out_of_neighborhood, "hessian undefined on cylinder axis");
            const Eigen::Vector3d u = q / r;
            H = -(Eigen::Matrix3d::Identity() - a * a.transpose() - u * u.transpose()) / r;
            break;
        }
        case SurfaceKind::graph: {
            // Central differences of the gradient, step 1e-5 rho.
            const double h = 1e-5 * rho_;
            for (int j = 0; j < n; ++j) {
                Point xp = x, xm = x;
                xp[j] += h;
                xm[j] -= h;
                const Point gpl = gradient(xp), gmi = gradient(xm);
                for (int i = 0; i < n; ++i) H(i, j) = (gpl[i] - gmi[i]) / (2.0 * h);
            }
            return 0.5 * (H + H.transpose());
        }
    }
    return sign_ * H;
}

Eigen::VectorXd Surface::principal_curvatures(const Point& x) const {
    const int n = p_.n;
    Eigen::VectorXd k = Eigen::VectorXd::Zero(std::max(0, n - 1));
    switch (kind_) {
        case SurfaceKind::hyperplane:
            break;
        case SurfaceKind::sphere:
            k.setConstant(1.0 / p_.radius);
            break;
        case SurfaceKind::cylinder:
            k[0] = 0.0;
            k[1] = 1.0 / p_.radius;
            break;
        case SurfaceKind::graph: {
            const double t = graph_foot(x);
            const double slope = gp(t);
            k[0] = gpp(t) / std::pow(1.0 + slope * slope, 1.5);
            break;
        }
    }
    k *= sign_;
    std::sort(k.data(), k.data() + k.size());
    return k;
}

bool Surface::in_neighborhood(const Point& x, double factor) const {
    return std::abs(distance(x)) < factor * rho_;
}

IncrementMap::IncrementMap(const Surface& surface, const Point& x, double eps)
    : s_(&surface), x_(x), eps_(eps) {
    dx_ = surface.distance(x);
    grad_ = surface.gradient(x);
    const auto& p = surface.p_;
    if (surface.kind_ == SurfaceKind::sphere) {
        for (int i = 0; i < p.n; ++i) p_[i] = x[i] - p.center[i];
        pn_ = norm(p_, p.n);
    } else if (surface.kind_ == SurfaceKind::cylinder) {
        Point q{x[0] - p.center[0], x[1] - p.center[1], x[2] - p.center[2]};
        const double a = dot(q, p.axis);
        for (int i = 0; i < 3; ++i) p_[i] = q[i] - a * p.axis[i];
        pn_ = norm(p_);
    } else if (surface.kind_ == SurfaceKind::graph) {
        const Eigen::MatrixXd H = surface.hessian(x);
        hess_.topLeftCorner(2, 2) = H;
    }
}

double IncrementMap::operator()(const Point& z) const {
    const Surface& s = *s_;
    const int n = s.p_.n;
    switch (s.kind_) {
        case SurfaceKind::hyperplane:
            return dot(grad_, z, n);
        case SurfaceKind::sphere: {
            Point q{0.0, 0.0, 0.0};
            double pz = 0.0, zz = 0.0;
            for (int i = 0; i < n; ++i) {
                q[i] = p_[i] + eps_ * z[i];
                pz += p_[i] * z[i];
                zz += z[i] * z[i];
            }
            return -s.sign_ * (2.0 * pz + eps_ * zz) / (pn_ + norm(q, n));
        }
        case SurfaceKind::cylinder: {
            const Point& a = s.p_.axis;
            const double za = dot(z, a);
            Point w{z[0] - za * a[0], z[1] - za * a[1], z[2] - za * a[2]};
            Point q{p_[0] + eps_ * w[0], p_[1] + eps_ * w[1], p_[2] + eps_ * w[2]};
            return -s.sign_ * (2.0 * dot(p_, w) + eps_ * dot(w, w)) / (pn_ + norm(q));
        }
        case SurfaceKind::graph: {
            const double step = eps_ * norm(z, n);
            if (step <= 1e-4 * s.rho_) {
                double quad = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) quad += z[i] * hess_(i, j) * z[j];
                return dot(grad_, z, n) + 0.5 * eps_ * quad;
            }
            Point y = x_;
            for (int i = 0; i < n; ++i) y[i] += eps_ * z[i];
            return (s.distance(y) - dx_) / eps_;
        }
    }
    return 0.0;
}

DifferentialData differential_data(const Surface& surface, const Point& x) {
    const int n = surface.dim();
    DifferentialData out;
    out.d = surface.distance(x);
    if (!(std::abs(out.d) < 2.0 * surface.rho()))
        throw Error(ErrorKind::out_of_neighborhood, "point outside the tubular neighborhood |d| < 2 rho");
    out.grad = surface.gradient(x);
    out.hessian = surface.hessian(x);
    out.laplacian = out.hessian.trace();
    out.eigenvalues = Eigen::VectorXd::Zero(n);
    out.T = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g[i] = out.grad[i];
    out.T.col(n - 1) = g;
    if (n == 1) return out;
    const auto comp = orthonormal_complement(out.grad, n);
    Eigen::MatrixXd B(n, n - 1);
    for (int j = 0; j < n - 1; ++j)
        for (int i = 0; i < n; ++i) B(i, j) = comp[static_cast<size_t>(j)][i];
    const Eigen::MatrixXd Ht = B.transpose() * out.hessian * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Ht + Ht.transpose()));
    for (int j = 0; j < n - 1; ++j) {
        out.eigenvalues[j] = es.eigenvalues()[j];
        out.T.col(j) = B * es.eigenvectors().col(j);
    }
    return out;
}

double sphere_average_A(const Surface& surface, const Point& x, const QuadratureSpec& quad) {
    const int n = surface.dim();
    if (n < 2) throw Error(ErrorKind::invalid_parameter, "sphere_average_A needs n >= 2");
    if (!surface.in_neighborhood(x, 1.0))
        throw Error(ErrorKind::out_of_neighborhood, "sphere_average_A needs |d(x)| < rho");
    const DifferentialData dd = differential_data(surface, x);
    SphereOptions opt = quad.sphere(n - 1, Point{1.0, 0.0, 0.0});
    opt.abs_tol = 1e-3 * quad.tolerance;
    opt.rel_tol = 1e-3 * quad.tolerance;
    const QuadResult r = sphere_integral(
        [&](const Point& w) {
            double a = 0.0;
            for (int i = 0; i < n - 1; ++i) a += dd.eigenvalues[i] * w[i] * w[i];
            return Estimate{0.5 * a, 0.0};
        },
        opt);
    return r.value;
}

}  // namespace fracmc
