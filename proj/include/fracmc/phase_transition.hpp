#pragma once

#include <string>
#include <vector>

#include "fracmc/potential.hpp"
#include "fracmc/quadrature.hpp"

namespace fracmc {

struct SolverOptions {
    double L = 50.0;
    int nodes = 4001;
    double tol = 1e-6;
    int max_iter = 100;
};

// Monotone standing wave sampled on [-L, L], extended by the power tail
// 1 - a_R xi^{-2s} (right) and a_L |xi|^{-2s} (left) with amplitudes matched
// at the end nodes.
class PhaseTransition {
public:
    PhaseTransition(double s, Potential potential, double L, std::vector<double> values, double residual);

    double s() const { return s_; }
    const Potential& potential() const { return potential_; }
    double L() const { return L_; }
    int nodes() const { return static_cast<int>(u_.size()); }
    double spacing() const { return h_; }
    double node(int j) const { return -L_ + h_ * j; }
    const std::vector<double>& values() const { return u_; }
    const std::vector<double>& slopes() const { return du_; }
    double residual() const { return residual_; }
    double tail_left() const { return aL_; }
    double tail_right() const { return aR_; }
    // Leading-order amplitude 1 / (2 s W''(0)).
    double tail_theory() const;

    double phi(double xi) const;
    double phi_prime(double xi) const;

    void write_csv(const std::string& path) const;
    void write_sidecar(const std::string& path) const;
    static PhaseTransition read(const std::string& csv_path, const std::string& sidecar_path);

private:
    void build_slopes();

    double s_;
    Potential potential_;
    double L_;
    double h_;
    std::vector<double> u_;
    std::vector<double> du_;
    double residual_;
    double aL_ = 0.0;
    double aR_ = 0.0;
};

// Throws NonConvergence (with the final residual) or non-monotone errors.
PhaseTransition solve_phase_transition(const Potential& potential, double s, const SolverOptions& opt = {});

// Residual I_h u - W'(u) of the discrete standing-wave equation at every node.
std::vector<double> standing_wave_residual(const PhaseTransition& pt);

// 1/2 int int (phi(xi+t) - phi(xi))^2 |t|^{-1-2s} dt dxi, s in (1/2, 1).
QuadResult energy_constant_c1(const PhaseTransition& pt, const QuadratureSpec& quad);
// Same double integral over the full t-line without the 1/2 (equals 2 c1).
QuadResult energy_double_integral(const PhaseTransition& pt, const QuadratureSpec& quad);

}  // namespace fracmc
