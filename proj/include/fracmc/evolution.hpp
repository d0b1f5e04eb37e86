#pragma once

#include <memory>
#include <vector>

#include "fracmc/geometry.hpp"
#include "fracmc/lattice_kernel.hpp"
#include "fracmc/phase_transition.hpp"

namespace fracmc {

struct GridSpec {
    int nodes = 256;          // per side
    double half_width = 3.0;  // extent [-X, X]^2
    double spacing() const { return 2.0 * half_width / (nodes - 1); }
    double coord(int i) const { return -half_width + spacing() * i; }
};

// u on the grid, row-major: values[j * nodes + i] at (x_i, x_j).
struct FrontField {
    GridSpec grid;
    std::vector<double> values;
    double t = 0.0;
    double s = 0.5;
    double eps = 0.1;
    long steps = 0;
    long clamp_events = 0;
    double at(int i, int j) const { return values[static_cast<size_t>(j) * grid.nodes + i]; }
};

// u = phi(d0 / eps) nodewise; throws under-resolved unless eps >= 2h.
FrontField init_front(const Surface& surface, const PhaseTransition& pt, double eps, const GridSpec& grid);

// Explicit scheme for eps u_t = (1/eta) (eps^{2s} I_2[u] - C_{2,s} W'(u)). Values
// outside the grid stay at the initial profile. Exec::parallel uses an FFT
// convolution with OpenMP loops, Exec::serial the direct lattice sum.
class Evolver {
public:
    Evolver(const Surface& initial, const PhaseTransition& pt, double eps, const GridSpec& grid,
            Exec exec = Exec::parallel, double cfl = 0.5);
    ~Evolver();
    Evolver(const Evolver&) = delete;
    Evolver& operator=(const Evolver&) = delete;

    const GridSpec& grid() const { return grid_; }
    double eps() const { return eps_; }
    double eta() const { return eta_; }
    // Gershgorin bound of the discrete operator.
    double lambda() const { return lambda_; }
    double stable_dt() const { return dt_; }
    Exec exec() const { return exec_; }
    FrontField initial_field() const;

    // I_2[u] at the grid nodes.
    std::vector<double> apply_operator(const std::vector<double>& u) const;
    // Same operator with every value outside the grid set to a constant.
    std::vector<double> apply_operator(const std::vector<double>& u, double exterior) const;
    // eps^{2s} I_2[u] - C_{2,s} W'(u).
    std::vector<double> residual(const std::vector<double>& u) const;
    // One explicit step; throws stability-violation if u leaves [-0.1, 1.1].
    void step(FrontField& field, double dt) const;
    void step(FrontField& field) const { step(field, dt_); }

private:
    struct Fft;
    std::vector<double> convolve(const std::vector<double>& u, const std::vector<double>& frame) const;
    GridSpec grid_;
    int ghost_ = 4;
    int ext_ = 0;  // extended side (grid plus ghost frame)
    double s_;
    double eps_;
    double eta_;
    Potential wtilde_;
    Surface surface_;
    PhaseTransition pt_;
    LatticeKernel kernel_;
    std::vector<double> frame_;  // extended array with frozen ghosts, zero inside
    std::vector<double> far_;       // exterior lattice sum of W(m - i) u0(x_m)
    std::vector<double> far_mass_;  // exterior lattice sum of W(m - i)
    std::vector<double> init_;
    double lambda_ = 0.0;
    double dt_ = 0.0;
    Exec exec_;
    std::unique_ptr<Fft> fft_;
};

}  // namespace fracmc
