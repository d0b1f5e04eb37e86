#pragma once

#include <vector>

#include "fracmc/phase_transition.hpp"

namespace fracmc {

// Psi(a) = int phi'(xi) phi(xi + a) dxi and Psi'(a) = int phi'(xi) phi'(xi + a) dxi,
// tabulated once per profile and interpolated by cubic Hermite.
class ProfileAverage {
public:
    explicit ProfileAverage(const PhaseTransition& pt, Exec exec = Exec::parallel);

    double s() const { return s_; }
    double psi(double a) const;
    double psi_prime(double a) const;
    const std::vector<double>& nodes() const { return a_; }
    const std::vector<double>& values() const { return v_; }
    const std::vector<double>& slopes() const { return dv_; }

private:
    double s_;
    std::vector<double> a_;
    std::vector<double> v_;
    std::vector<double> dv_;
    double step_ = 0.0;
    double a_uniform_ = 0.0;
    int uniform_lo_ = 0;
    int uniform_hi_ = 0;
    double c_left_ = 0.0;
    double c_right_ = 0.0;
};

struct PsiSample {
    double psi = 0.0;
    double psi_prime = 0.0;
};

// Both integrals at one shift, by Gauss-Legendre on the merged cells of
// phi'(xi) and phi(xi + a) plus power tails.
PsiSample psi_sample(const PhaseTransition& pt, double a);

}  // namespace fracmc
