#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace fracmc {

using Point = std::array<double, 3>;

// Serial is the reference path; parallel must give bit-identical sums.
enum class Exec { serial, parallel };

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
    bool converged = true;
};

struct AdaptiveOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_panels = 4000;
    Exec exec = Exec::serial;
};

// Integrand that returns its own error (for nested integrals). The inner
// errors are integrated with the outer weights and added to the result.
using SampleFn = std::function<Estimate(double)>;
using ScalarFn = std::function<double(double)>;

// Globally adaptive 15-point Gauss-Kronrod over the given breakpoints.
QuadResult integrate_nested(const SampleFn& f, std::vector<double> breaks,
                            const AdaptiveOptions& opt);
QuadResult integrate(const ScalarFn& f, std::vector<double> breaks, const AdaptiveOptions& opt);
QuadResult integrate(const ScalarFn& f, double a, double b, const AdaptiveOptions& opt);

// int_M^inf f for f ~ C x^{-p}, p > 1, via x = M u^{-1/(p-1)}.
QuadResult integrate_power_tail(const ScalarFn& f, double M, double p, const AdaptiveOptions& opt);
QuadResult integrate_power_tail_nested(const SampleFn& f, double M, double p,
                                       const AdaptiveOptions& opt);

// int_R f on [a,b] plus power tails of exponents p_left / p_right outside.
QuadResult integrate_line(const ScalarFn& f, std::vector<double> breaks, double p_left,
                          double p_right, const AdaptiveOptions& opt);
QuadResult integrate_line_nested(const SampleFn& f, std::vector<double> breaks, double p_left,
                                 double p_right, const AdaptiveOptions& opt);

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

struct RadialOptions {
    double inner_cutoff = 1e-6;
    double outer_radius = 1e3;
    int panels = 16;
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    // Limit of f(r) as r -> inf. When set the part beyond outer_radius is
    // taken analytically, otherwise it is integrated in a mapped variable.
    std::optional<double> far_limit;
    // Absolute round-off level of f samples; amplified by r^{-2s} near the
    // cutoff and added to the error estimate.
    double noise = 0.0;
    Exec exec = Exec::serial;
};

// int_0^inf f(r) r^{-1-2s} dr for f(r) = O(r^2) at the origin.
QuadResult radial_integral(const ScalarFn& f, double s, const RadialOptions& opt);

struct SphereOptions {
    int n = 2;
    Point pole{0.0, 0.0, 1.0};
    bool hemisphere = false;
    int angular_nodes = 16;
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    // Polar-angle grading exponent (>= 1) clustering nodes at the equator
    // relative to the pole.
    double grading = 1.0;
    int max_azimuth = 4096;
    Exec exec = Exec::serial;
};

// Integral over S^{n-1} (or the half with pole . w >= 0) of h(w), n in {1,2,3}.
using DirectionFn = std::function<Estimate(const Point&)>;
QuadResult sphere_integral(const DirectionFn& h, const SphereOptions& opt);

// |S^k| = 2 pi^{(k+1)/2} / Gamma((k+1)/2).
double sphere_area(int k);

// Two unit vectors completing w to an orthonormal basis of R^n (n <= 3).
std::array<Point, 2> orthonormal_complement(const Point& w, int n);

// Discretization controls shared by every singular integral.
struct QuadratureSpec {
    double inner_cutoff = 1e-6;
    double outer_radius = 1e3;
    int radial_nodes = 16;
    int angular_nodes = 16;
    double tolerance = 1e-6;
    Exec exec = Exec::serial;

    // Throws a validation Error unless inner_cutoff < 1 < outer_radius and both
    // node counts are at least 16.
    void validate() const;
    // Same spec with node counts doubled and tolerance divided by 4.
    QuadratureSpec refined() const;
    RadialOptions radial(double abs_tol) const;
    SphereOptions sphere(int n, const Point& pole) const;
};

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace fracmc
