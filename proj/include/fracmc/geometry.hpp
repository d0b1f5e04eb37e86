#pragma once

#include <Eigen/Dense>
#include <string>

#include "fracmc/quadrature.hpp"

namespace fracmc {

enum class SurfaceKind { sphere, hyperplane, cylinder, graph };
enum class GraphProfile { parabola, cosine };

SurfaceKind surface_kind_from_string(const std::string& name);
std::string to_string(SurfaceKind kind);
GraphProfile graph_profile_from_string(const std::string& name);
std::string to_string(GraphProfile profile);

struct SurfaceParams {
    int n = 2;
    Point center{0.0, 0.0, 0.0};  // sphere center, point on cylinder axis
    double radius = 1.0;
    Point normal{0.0, 0.0, 1.0};  // hyperplane normal (n components used)
    double offset = 0.0;
    Point axis{0.0, 0.0, 1.0};  // cylinder axis
    // Graph x2 = g(x1): parabola g = a x^2 / 2, cosine g = a cos(k x).
    GraphProfile profile = GraphProfile::parabola;
    double amplitude = 1.0;
    double wavenumber = 1.0;
    double rho_cap = 100.0;
    bool complement = false;  // swap inside and outside
};

// Signed distance surface: d > 0 inside Omega. Immutable and thread safe.
class Surface {
public:
    explicit Surface(SurfaceKind kind, const SurfaceParams& p);

    SurfaceKind kind() const { return kind_; }
    int dim() const { return p_.n; }
    double rho() const { return rho_; }
    const SurfaceParams& params() const { return p_; }
    Surface complement() const;

    double distance(const Point& x) const;
    Point gradient(const Point& x) const;
    Eigen::MatrixXd hessian(const Point& x) const;
    // Principal curvatures of Gamma at the foot point of x (n - 1 values,
    // positive for convex Omega), sorted ascending.
    Eigen::VectorXd principal_curvatures(const Point& x) const;
    bool in_neighborhood(const Point& x, double factor) const;

private:
    friend class IncrementMap;
    double raw_distance(const Point& x) const;
    double graph_foot(const Point& x) const;
    double g(double t) const;
    double gp(double t) const;
    double gpp(double t) const;

    SurfaceKind kind_;
    SurfaceParams p_;
    double rho_ = 0.0;
    double sign_ = 1.0;
};

// z -> (d(x + eps z) - d(x)) / eps, evaluated without cancellation. For
// hyperplanes the result is bitwise equal to grad d(x) . z.
class IncrementMap {
public:
    IncrementMap(const Surface& surface, const Point& x, double eps);
    double operator()(const Point& z) const;
    double base() const { return dx_; }
    const Point& grad() const { return grad_; }

private:
    const Surface* s_;
    Point x_;
    double eps_;
    double dx_;
    Point grad_;
    Eigen::Matrix3d hess_ = Eigen::Matrix3d::Zero();
    Point p_{0.0, 0.0, 0.0};  // offset from center (sphere) or axis (cylinder)
    double pn_ = 0.0;
};

Surface make_surface(SurfaceKind kind, const SurfaceParams& params);

struct DifferentialData {
    double d = 0.0;
    Point grad{0.0, 0.0, 0.0};
    Eigen::MatrixXd hessian;
    double laplacian = 0.0;
    Eigen::VectorXd eigenvalues;  // lambda_1..lambda_{n-1} ascending, lambda_n = 0
    Eigen::MatrixXd T;            // tangent eigenvectors, last column grad d
};

// Throws out-of-neighborhood unless |d(x)| < 2 rho.
DifferentialData differential_data(const Surface& surface, const Point& x);

// int over S^{n-2} of A(y') = (1/2) sum lambda_i y_i^2.
double sphere_average_A(const Surface& surface, const Point& x, const QuadratureSpec& quad);

double dot(const Point& a, const Point& b, int n = 3);
double norm(const Point& a, int n = 3);

}  // namespace fracmc
