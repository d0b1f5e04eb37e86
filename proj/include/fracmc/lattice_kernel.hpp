#pragma once

#include <vector>

namespace fracmc {

// Translation-invariant weights of the 2-D operator
//   I[u](x_i) ~ sum_{k != 0} W(k) (u_{i+k} - u_i)
// on a square lattice of spacing h, for offsets |k|_inf <= radius. Cells
// outside [-h, h]^2 use 6x6 tensor Lagrange moments of |y|^{-2-2s}; the inner
// square uses a fourth-order Taylor model with finite-difference stencils.
class LatticeKernel {
public:
    LatticeKernel(double s, double h, int radius);

    double s() const { return s_; }
    double h() const { return h_; }
    int radius() const { return radius_; }
    int width() const { return 2 * radius_ + 1; }
    // W(k) (0 at the origin).
    double weight(int k1, int k2) const {
        return w_[static_cast<size_t>((k2 + radius_) * width() + (k1 + radius_))];
    }
    const std::vector<double>& table() const { return w_; }
    // sum of W(k) over the whole lattice (k != 0).
    double total() const { return total_; }
    // sum of |W(k)| over the table.
    double abs_sum() const { return abs_sum_; }

private:
    double s_;
    double h_;
    int radius_;
    std::vector<double> w_;
    double total_ = 0.0;
    double abs_sum_ = 0.0;
};

}  // namespace fracmc
