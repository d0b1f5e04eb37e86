#include "fracmc/lattice_kernel.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "fracmc/errors.hpp"
#include "fracmc/quadrature.hpp"

namespace fracmc {

namespace {

double lagrange6(int p, double t) {
    double v = 1.0;
    const double tp = p - 2.0;
    for (int q = 0; q < 6; ++q) {
        if (q == p) continue;
        const double tq = q - 2.0;
        v *= (t - tq) / (tp - tq);
    }
    return v;
}

// int over the angle of trig(theta) * rho(theta)^a / a, with rho the
// boundary of the unit square [-1, 1]^2 in polar form.
template <class Trig>
double square_moment(double a, Trig trig) {
    const GaussRule gl = gauss_legendre(24);
    const double pi = std::numbers::pi;
    CompensatedSum acc;
    for (int oct = 0; oct < 8; ++oct) {
        const double lo = oct * pi / 4.0, hi = lo + pi / 4.0;
        for (size_t g = 0; g < gl.nodes.size(); ++g) {
            const double th = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[g];
            const double rho = 1.0 / std::max(std::abs(std::cos(th)), std::abs(std::sin(th)));
            acc.add(0.5 * (hi - lo) * gl.weights[g] * trig(th) * std::pow(rho, a) / a);
        }
    }
    return acc.value();
}

}  // namespace

LatticeKernel::LatticeKernel(double s, double h, int radius) : s_(s), h_(h), radius_(radius) {
    if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::invalid_parameter, "order s must lie in (0, 1)");
    if (!(h > 0.0)) throw Error(ErrorKind::invalid_parameter, "lattice spacing must be positive");
    if (radius < 3) throw Error(ErrorKind::invalid_parameter, "lattice kernel radius must be at least 3");
    const int W = width();
    std::vector<double> acc(static_cast<size_t>(W) * W, 0.0);
    const double two_s = 2.0 * s;
    const double scale = std::pow(h, -two_s);
    auto put = [&](int k1, int k2, double v) {
        if (std::abs(k1) > radius || std::abs(k2) > radius) return;
        acc[static_cast<size_t>((k2 + radius) * W + (k1 + radius))] += v;
    };

    const GaussRule near = gauss_legendre(12), far = gauss_legendre(4);
    // Cells [c1, c1+1] x [c2, c2+1] in units of h, stencil nodes c-2..c+3.
    const int cmax = radius + 2;
    std::array<double, 6> l1{}, l2{};
    for (int c2 = -cmax - 1; c2 <= cmax; ++c2)
        for (int c1 = -cmax - 1; c1 <= cmax; ++c1) {
            if ((c1 == -1 || c1 == 0) && (c2 == -1 || c2 == 0)) continue;
            const GaussRule& gl = (std::max(std::abs(c1), std::abs(c2)) <= 4) ? near : far;
            std::array<std::array<double, 6>, 6> m{};
            for (size_t a = 0; a < gl.nodes.size(); ++a) {
                const double t1 = 0.5 * (gl.nodes[a] + 1.0);
                for (int p = 0; p < 6; ++p) l1[p] = lagrange6(p, t1);
                for (size_t b = 0; b < gl.nodes.size(); ++b) {
                    const double t2 = 0.5 * (gl.nodes[b] + 1.0);
                    for (int p = 0; p < 6; ++p) l2[p] = lagrange6(p, t2);
                    const double y1 = c1 + t1, y2 = c2 + t2;
                    const double k = 0.25 * gl.weights[a] * gl.weights[b] * std::pow(y1 * y1 + y2 * y2, -1.0 - s);
                    for (int p = 0; p < 6; ++p)
                        for (int q = 0; q < 6; ++q) m[p][q] += k * l1[p] * l2[q];
                }
            }
            for (int p = 0; p < 6; ++p)
                for (int q = 0; q < 6; ++q) put(c1 - 2 + p, c2 - 2 + q, scale * m[p][q]);
        }

    // Inner square [-h, h]^2: 1/2 A2 (u_11 + u_22) + 1/24 (A4 (u_1111 + u_2222) + 6 A22 u_1122).
    const double A2 = scale * square_moment(2.0 - two_s, [](double t) { return std::pow(std::cos(t), 2); });
    const double A4 = scale * square_moment(4.0 - two_s, [](double t) { return std::pow(std::cos(t), 4); });
    const double A22 = scale * square_moment(4.0 - two_s, [](double t) {
                           return std::pow(std::cos(t) * std::sin(t), 2);
                       });
    const std::array<double, 5> d2{-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};
    const std::array<double, 5> d4{1.0, -4.0, 6.0, -4.0, 1.0};
    const std::array<double, 3> c2s{1.0, -2.0, 1.0};
    for (int a = 0; a < 5; ++a) {
        put(a - 2, 0, 0.5 * A2 * d2[a] + A4 / 24.0 * d4[a]);
        put(0, a - 2, 0.5 * A2 * d2[a] + A4 / 24.0 * d4[a]);
    }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) put(a - 1, b - 1, 0.25 * A22 * c2s[a] * c2s[b]);

    // Lattice total: cell masses over R^2 \ [-h, h]^2 minus what landed on
    // the origin; the Taylor stencil sums to zero.
    const double outside = scale * square_moment(-two_s, [](double) { return 1.0; }) * -1.0;
    total_ = outside - acc[static_cast<size_t>(radius * W + radius)];
    acc[static_cast<size_t>(radius * W + radius)] = 0.0;
    w_ = std::move(acc);
    CompensatedSum as;
    for (double v : w_) as.add(std::abs(v));
    abs_sum_ = as.value();
}

}  // namespace fracmc
