#include "fracmc/profile_average.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace fracmc {

namespace {

constexpr double uniform_half_width = 40.0;
constexpr double uniform_step = 0.04;
constexpr double log_max = 1e9;
constexpr int per_decade = 50;

struct Pair {
    CompensatedSum psi;
    CompensatedSum dpsi;
};

void add_gauss(const PhaseTransition& pt, double a, double lo, double hi, Pair& acc) {
    static const GaussRule gl = gauss_legendre(6);
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    for (size_t k = 0; k < gl.nodes.size(); ++k) {
        const double xi = c + r * gl.nodes[k];
        const double w = r * gl.weights[k] * pt.phi_prime(xi);
        acc.psi.add(w * pt.phi(xi + a));
        acc.dpsi.add(w * pt.phi_prime(xi + a));
    }
}

void add_gap(const PhaseTransition& pt, double a, double lo, double hi, Pair& acc) {
    // Both factors are power laws here; cluster breakpoints at the two ends.
    const double len = hi - lo;
    std::vector<double> br{lo};
    for (double t = 1e-9; t < 0.5; t *= 10.0) br.push_back(lo + t * len);
    br.push_back(lo + 0.5 * len);
    for (double t = 0.1; t >= 1e-9; t *= 0.1) br.push_back(hi - t * len);
    br.push_back(hi);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    AdaptiveOptions ao;
    ao.abs_tol = 1e-16;
    ao.rel_tol = 1e-13;
    acc.psi.add(integrate([&](double xi) { return pt.phi_prime(xi) * pt.phi(xi + a); }, br, ao).value);
    acc.dpsi.add(integrate([&](double xi) { return pt.phi_prime(xi) * pt.phi_prime(xi + a); }, br, ao).value);
}

}  // namespace

PsiSample psi_sample(const PhaseTransition& pt, double a) {
    const int N = pt.nodes();
    const double L = pt.L(), h = pt.spacing(), s = pt.s();
    // Merged breakpoints: nodes of phi' and nodes of phi(. + a).
    std::vector<double> br;
    br.reserve(static_cast<size_t>(2 * N));
    for (int j = 0; j < N; ++j) br.push_back(pt.node(j));
    for (int j = 0; j < N; ++j) br.push_back(pt.node(j) - a);
    std::inplace_merge(br.begin(), br.begin() + N, br.end());
    Pair acc;
    for (size_t k = 0; k + 1 < br.size(); ++k) {
        const double lo = br[k], hi = br[k + 1];
        if (!(hi > lo)) continue;
        if (hi - lo <= 1.01 * h)
            add_gauss(pt, a, lo, hi, acc);
        else
            add_gap(pt, a, lo, hi, acc);
    }
    const double lo = br.front(), hi = br.back();
    AdaptiveOptions ao;
    ao.abs_tol = 1e-16;
    ao.rel_tol = 1e-13;
    acc.psi.add(
        integrate_power_tail([&](double t) { return pt.phi_prime(-t) * pt.phi(a - t); }, -lo, 1.0 + 4.0 * s, ao)
            .value);
    acc.dpsi.add(integrate_power_tail([&](double t) { return pt.phi_prime(-t) * pt.phi_prime(a - t); }, -lo,
                                      2.0 + 4.0 * s, ao)
                     .value);
    acc.psi.add(
        integrate_power_tail([&](double t) { return pt.phi_prime(t) * pt.phi(t + a); }, hi, 1.0 + 2.0 * s, ao).value);
    acc.dpsi.add(integrate_power_tail([&](double t) { return pt.phi_prime(t) * pt.phi_prime(t + a); }, hi,
                                      2.0 + 4.0 * s, ao)
                     .value);
    (void)L;
    return {acc.psi.value(), acc.dpsi.value()};
}

ProfileAverage::ProfileAverage(const PhaseTransition& pt, Exec exec) : s_(pt.s()) {
    step_ = uniform_step;
    a_uniform_ = uniform_half_width;
    const int half = static_cast<int>(std::lround(a_uniform_ / step_));
    std::vector<double> logs;
    for (int k = 1;; ++k) {
        const double v = a_uniform_ * std::pow(10.0, static_cast<double>(k) / per_decade);
        if (v > log_max * 1.0000001) break;
        logs.push_back(v);
    }
    for (auto it = logs.rbegin(); it != logs.rend(); ++it) a_.push_back(-*it);
    uniform_lo_ = static_cast<int>(a_.size());
    for (int k = -half; k <= half; ++k) a_.push_back(k * step_);
    uniform_hi_ = static_cast<int>(a_.size()) - 1;
    for (double v : logs) a_.push_back(v);

    const long M = static_cast<long>(a_.size());
    v_.assign(a_.size(), 0.0);
    dv_.assign(a_.size(), 0.0);
    auto fill = [&](long k) {
        const PsiSample p = psi_sample(pt, a_[static_cast<size_t>(k)]);
        v_[static_cast<size_t>(k)] = p.psi;
        dv_[static_cast<size_t>(k)] = p.psi_prime;
    };
    if (exec == Exec::serial) {
        for (long k = 0; k < M; ++k) fill(k);
    } else {
        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 16)
        for (long k = 0; k < M; ++k) {
            try {
                fill(k);
            } catch (...) {
#pragma omp critical
                err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    }
    const double two_s = 2.0 * s_;
    c_left_ = v_.front() * std::pow(-a_.front(), two_s);
    c_right_ = (1.0 - v_.back()) * std::pow(a_.back(), two_s);
}

namespace {

double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double a, double* deriv) {
    const double h = x1 - x0;
    const double t = (a - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    if (deriv)
        *deriv = (6 * t2 - 6 * t) / h * y0 + (3 * t2 - 4 * t + 1) * d0 + (-6 * t2 + 6 * t) / h * y1 +
                 (3 * t2 - 2 * t) * d1;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

}  // namespace

double ProfileAverage::psi(double a) const {
    const double two_s = 2.0 * s_;
    if (a > a_.back()) return 1.0 - c_right_ * std::pow(a, -two_s);
    if (a < a_.front()) return c_left_ * std::pow(-a, -two_s);
    size_t k;
    if (std::abs(a) <= a_uniform_) {
        k = static_cast<size_t>(uniform_lo_) + static_cast<size_t>(std::floor((a + a_uniform_) / step_));
        k = std::min(k, static_cast<size_t>(uniform_hi_ - 1));
    } else {
        k = static_cast<size_t>(std::upper_bound(a_.begin(), a_.end(), a) - a_.begin());
        k = std::clamp<size_t>(k, 1, a_.size() - 1) - 1;
    }
    return hermite(a_[k], a_[k + 1], v_[k], v_[k + 1], dv_[k], dv_[k + 1], a, nullptr);
}

double ProfileAverage::psi_prime(double a) const {
    const double two_s = 2.0 * s_;
    if (a > a_.back()) return two_s * c_right_ * std::pow(a, -1.0 - two_s);
    if (a < a_.front()) return two_s * c_left_ * std::pow(-a, -1.0 - two_s);
    size_t k;
    if (std::abs(a) <= a_uniform_) {
        k = static_cast<size_t>(uniform_lo_) + static_cast<size_t>(std::floor((a + a_uniform_) / step_));
        k = std::min(k, static_cast<size_t>(uniform_hi_ - 1));
    } else {
        k = static_cast<size_t>(std::upper_bound(a_.begin(), a_.end(), a) - a_.begin());
        k = std::clamp<size_t>(k, 1, a_.size() - 1) - 1;
    }
    double d = 0.0;
    hermite(a_[k], a_[k + 1], v_[k], v_[k + 1], dv_[k], dv_[k + 1], a, &d);
    return d;
}

}  // namespace fracmc
