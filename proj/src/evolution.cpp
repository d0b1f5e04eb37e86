#include "fracmc/evolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fracmc/aeps.hpp"
#include "fracmc/errors.hpp"
#include "fracmc/nonlocal_ops.hpp"

namespace fracmc {

namespace {

int fft_size(int at_least) {
    for (int n = at_least;; ++n) {
        int m = n;
        for (int p : {2, 3, 5, 7})
            while (m % p == 0) m /= p;
        if (m == 1) return n;
    }
}

}  // namespace

struct Evolver::Fft {
    int P = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    std::vector<std::complex<double>> kernel;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit Fft(int p) : P(p) {
        const size_t nr = static_cast<size_t>(P) * P;
        const size_t nc = static_cast<size_t>(P) * (P / 2 + 1);
        real = fftw_alloc_real(nr);
        spec = fftw_alloc_complex(nc);
        // Estimated plans are deterministic from run to run.
        forward = fftw_plan_dft_r2c_2d(P, P, real, spec, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_2d(P, P, spec, real, FFTW_ESTIMATE);
    }
    ~Fft() {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(real);
        fftw_free(spec);
    }
};

FrontField init_front(const Surface& surface, const PhaseTransition& pt, double eps, const GridSpec& grid) {
    if (surface.dim() != 2) throw Error(ErrorKind::invalid_parameter, "evolution runs in two dimensions");
    if (grid.nodes < 8) throw Error(ErrorKind::invalid_parameter, "grid needs at least 8 nodes per side");
    if (!(grid.half_width > 0.0)) throw Error(ErrorKind::invalid_parameter, "grid half width must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::invalid_parameter, "eps must lie in (0, 1)");
    if (eps < 2.0 * grid.spacing())
        throw Error(ErrorKind::under_resolved, "front width eps must be at least two grid spacings");
    FrontField f;
    f.grid = grid;
    f.s = pt.s();
    f.eps = eps;
    f.values.resize(static_cast<size_t>(grid.nodes) * grid.nodes);
    for (int j = 0; j < grid.nodes; ++j)
        for (int i = 0; i < grid.nodes; ++i)
            f.values[static_cast<size_t>(j) * grid.nodes + i] =
                pt.phi(surface.distance({grid.coord(i), grid.coord(j), 0.0}) / eps);
    return f;
}

Evolver::Evolver(const Surface& initial, const PhaseTransition& pt, double eps, const GridSpec& grid, Exec exec,
                 double cfl)
    : grid_(grid),
      s_(pt.s()),
      eps_(eps),
      eta_(eta_eps(pt.s(), eps)),
      wtilde_(pt.potential().scaled(constant_Cns(2, pt.s()))),
      surface_(initial),
      pt_(pt),
      kernel_(pt.s(), grid.spacing(), grid.nodes + 4 - 1),
      exec_(exec) {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw Error(ErrorKind::invalid_parameter, "cfl must lie in (0, 1]");
    init_ = init_front(initial, pt, eps, grid).values;
    const int N = grid.nodes, G = ghost_;
    ext_ = N + 2 * G;
    const int E = ext_;
    const double h = grid.spacing();
    const double s = s_;
    auto u0 = [&](double x, double y) { return pt_.phi(surface_.distance({x, y, 0.0}) / eps_); };

    frame_.assign(static_cast<size_t>(E) * E, 0.0);
    for (int J = 0; J < E; ++J)
        for (int I = 0; I < E; ++I) {
            const bool inside = I >= G && I < G + N && J >= G && J < G + N;
            if (!inside) frame_[static_cast<size_t>(J) * E + I] = u0(grid.coord(I - G), grid.coord(J - G));
        }

    if (exec_ == Exec::parallel) {
        const int R = kernel_.radius();
        fft_ = std::make_unique<Fft>(fft_size(E + R));
        const int P = fft_->P;
        std::fill(fft_->real, fft_->real + static_cast<size_t>(P) * P, 0.0);
        for (int k2 = -R; k2 <= R; ++k2)
            for (int k1 = -R; k1 <= R; ++k1)
                fft_->real[static_cast<size_t>((k2 + P) % P) * P + static_cast<size_t>((k1 + P) % P)] =
                    kernel_.weight(k1, k2);
        fftw_execute(fft_->forward);
        const size_t nc = static_cast<size_t>(P) * (P / 2 + 1);
        fft_->kernel.resize(nc);
        const double norm = 1.0 / (static_cast<double>(P) * P);
        for (size_t k = 0; k < nc; ++k) fft_->kernel[k] = std::complex<double>(fft_->spec[k][0], fft_->spec[k][1]) * norm;
    }

    // Lattice sums over points outside the extended array: D_i is exact
    // (total minus the in-array part), F_i = D_i times the kernel-weighted
    // mean of u0 over the exterior, taken from a polar quadrature.
    // Lattice mass outside the extended array: total minus the in-array sum.
    {
        const std::vector<double> inside =
            convolve(std::vector<double>(static_cast<size_t>(N) * N, 1.0), std::vector<double>(frame_.size(), 1.0));
        far_mass_.resize(inside.size());
        for (size_t k = 0; k < inside.size(); ++k) far_mass_[k] = kernel_.total() - inside[k];
    }
    const double a = -grid.half_width - (G + 0.5) * h, b = -a;
    const GaussRule gt = gauss_legendre(16), gth = gauss_legendre(32);
    const double two_s = 2.0 * s;
    far_.assign(static_cast<size_t>(N) * N, 0.0);
    auto exterior = [&](long idx) {
        const int i = static_cast<int>(idx % N), j = static_cast<int>(idx / N);
        const double x = grid.coord(i), y = grid.coord(j);
        std::array<double, 5> th{std::atan2(a - y, b - x), std::atan2(b - y, b - x), std::atan2(b - y, a - x),
                                 std::atan2(a - y, a - x), 0.0};
        for (int k = 0; k < 4; ++k)
            if (th[k] < th[0]) th[k] += 2.0 * std::numbers::pi;
        std::sort(th.begin(), th.begin() + 4);
        th[4] = th[0] + 2.0 * std::numbers::pi;
        CompensatedSum num, den;
        for (int seg = 0; seg < 4; ++seg)
            for (size_t g = 0; g < gth.nodes.size(); ++g) {
                const double t = 0.5 * (th[seg] + th[seg + 1]) + 0.5 * (th[seg + 1] - th[seg]) * gth.nodes[g];
                const double wt = 0.5 * (th[seg + 1] - th[seg]) * gth.weights[g];
                const double c = std::cos(t), sn = std::sin(t);
                double r = 1e300;
                if (c > 0) r = std::min(r, (b - x) / c);
                if (c < 0) r = std::min(r, (a - x) / c);
                if (sn > 0) r = std::min(r, (b - y) / sn);
                if (sn < 0) r = std::min(r, (a - y) / sn);
                const double mass = std::pow(r, -two_s) / two_s;
                double avg = 0.0;
                for (size_t q = 0; q < gt.nodes.size(); ++q) {
                    const double tt = 0.5 * (gt.nodes[q] + 1.0);
                    const double rr = r * std::pow(tt, -1.0 / two_s);
                    avg += 0.5 * gt.weights[q] * u0(x + rr * c, y + rr * sn);
                }
                num.add(wt * mass * avg);
                den.add(wt * mass);
            }
        const double D = far_mass_[static_cast<size_t>(idx)];
        far_[static_cast<size_t>(idx)] = D * num.value() / den.value();
    };
    const long NN = static_cast<long>(N) * N;
    if (exec_ == Exec::serial) {
        for (long k = 0; k < NN; ++k) exterior(k);
    } else {
#pragma omp parallel for schedule(static)
        for (long k = 0; k < NN; ++k) exterior(k);
    }

    lambda_ = kernel_.total() + kernel_.abs_sum();
    double wmax = 0.0;
    for (int k = 0; k <= 100; ++k) wmax = std::max(wmax, std::abs(wtilde_.Wpp(-0.1 + 1.2 * k / 100.0)));
    dt_ = cfl * eps_ * eta_ / (std::pow(eps_, two_s) * lambda_ + wmax);
}

Evolver::~Evolver() = default;

FrontField Evolver::initial_field() const {
    FrontField f;
    f.grid = grid_;
    f.values = init_;
    f.s = s_;
    f.eps = eps_;
    return f;
}

std::vector<double> Evolver::convolve(const std::vector<double>& u, const std::vector<double>& frame) const {
    const int N = grid_.nodes, G = ghost_, E = ext_;
    if (u.size() != static_cast<size_t>(N) * N) throw Error(ErrorKind::invalid_parameter, "field size mismatch");
    std::vector<double> U = frame;
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) U[static_cast<size_t>(j + G) * E + (i + G)] = u[static_cast<size_t>(j) * N + i];
    std::vector<double> conv(static_cast<size_t>(N) * N, 0.0);
    const long NN = static_cast<long>(N) * N;
    if (exec_ == Exec::serial) {
        for (long idx = 0; idx < NN; ++idx) {
            const int i = static_cast<int>(idx % N) + G, j = static_cast<int>(idx / N) + G;
            CompensatedSum acc;
            for (int J = 0; J < E; ++J)
                for (int I = 0; I < E; ++I) {
                    const double w = kernel_.weight(I - i, J - j);
                    if (w != 0.0) acc.add(w * U[static_cast<size_t>(J) * E + I]);
                }
            conv[static_cast<size_t>(idx)] = acc.value();
        }
        return conv;
    }
    Fft& f = *fft_;
    const int P = f.P;
    std::fill(f.real, f.real + static_cast<size_t>(P) * P, 0.0);
    for (int J = 0; J < E; ++J)
        for (int I = 0; I < E; ++I) f.real[static_cast<size_t>(J) * P + I] = U[static_cast<size_t>(J) * E + I];
    fftw_execute(f.forward);
    const long nc = static_cast<long>(P) * (P / 2 + 1);
#pragma omp parallel for schedule(static)
    for (long k = 0; k < nc; ++k) {
        const std::complex<double> v = std::complex<double>(f.spec[k][0], f.spec[k][1]) * f.kernel[k];
        f.spec[k][0] = v.real();
        f.spec[k][1] = v.imag();
    }
    fftw_execute(f.backward);
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < NN; ++idx) {
        const int i = static_cast<int>(idx % N) + G, j = static_cast<int>(idx / N) + G;
        conv[static_cast<size_t>(idx)] = f.real[static_cast<size_t>(j) * P + i];
    }
    return conv;
}

std::vector<double> Evolver::apply_operator(const std::vector<double>& u) const {
    std::vector<double> out = convolve(u, frame_);
    const double total = kernel_.total();
    for (size_t k = 0; k < out.size(); ++k) out[k] += far_[k] - total * u[k];
    return out;
}

std::vector<double> Evolver::apply_operator(const std::vector<double>& u, double exterior) const {
    std::vector<double> out = convolve(u, std::vector<double>(frame_.size(), exterior));
    const double total = kernel_.total();
    for (size_t k = 0; k < out.size(); ++k) out[k] += exterior * far_mass_[k] - total * u[k];
    return out;
}

std::vector<double> Evolver::residual(const std::vector<double>& u) const {
    std::vector<double> r = apply_operator(u);
    const double e2s = std::pow(eps_, 2.0 * s_);
    for (size_t k = 0; k < r.size(); ++k) r[k] = e2s * r[k] - wtilde_.Wp(u[k]);
    return r;
}

void Evolver::step(FrontField& field, double dt) const {
    if (!(dt > 0.0)) throw Error(ErrorKind::invalid_parameter, "time step must be positive");
    const std::vector<double> r = residual(field.values);
    const double rate = dt / (eps_ * eta_);
    long clamps = 0;
    bool blown = false;
    for (size_t k = 0; k < r.size(); ++k) {
        double v = field.values[k] + rate * r[k];
        if (!(v >= -0.1 && v <= 1.1)) blown = true;
        if (v <= 0.0 || v >= 1.0) {
            ++clamps;
            v = std::clamp(v, 0.0, 1.0);
        }
        field.values[k] = v;
    }
    if (blown) throw Error(ErrorKind::stability_violation, "field left [-0.1, 1.1]; reduce the time step");
    field.clamp_events += clamps;
    field.t += dt;
    ++field.steps;
}

}  // namespace fracmc
